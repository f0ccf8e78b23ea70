use std::collections::HashSet;

use l0lap::criteria::{phi, psi};
use l0lap::metrics::{nmi, nmi_full, overlap_matrix, NmiVariant};
use l0lap::{
    binom_tail, hard_threshold, laplacian_apply, membership_vector, set_stats, two_phase_solve,
    Graph,
};
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 1..(3 * n))
            .prop_map(move |e| Graph::from_edges(n, &e).unwrap())
    })
}

fn graph_and_mask(max_n: usize) -> impl Strategy<Value = (Graph, Vec<bool>)> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), prop::collection::vec(any::<bool>(), n))
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// max over every nonempty support T of ||z_T|| - rho |T|
fn brute_threshold_value(z: &[f64], rho: f64) -> f64 {
    let n = z.len();
    let mut best = f64::NEG_INFINITY;
    for mask in 1u32..(1 << n) {
        let mut sq = 0.0;
        for (i, x) in z.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sq += x * x;
            }
        }
        best = best.max(sq.sqrt() - rho * mask.count_ones() as f64);
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn psi_matches_quadratic_form((g, mask) in graph_and_mask(20), eta in prop::sample::select(vec![0.0, 0.01, 0.3])) {
        let s: Vec<usize> = (0..g.n()).filter(|&i| mask[i] && g.degree(i) > 0).collect();
        prop_assume!(!s.is_empty());
        let u = membership_vector::<f64>(&g, &s).unwrap();
        let qu = laplacian_apply(&g, u.values()).unwrap();
        let rhs = dot(u.values(), &qu) - eta * u.support_size() as f64;
        let lhs = psi(&g, &s, eta).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
        prop_assert!((u.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn laplacian_is_self_adjoint(g in graph_strategy(30), seed in any::<u64>()) {
        let n = g.n();
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let x: Vec<f64> = (0..n).map(|_| next()).collect();
        let y: Vec<f64> = (0..n).map(|_| next()).collect();
        let qx = laplacian_apply(&g, &x).unwrap();
        let qy = laplacian_apply(&g, &y).unwrap();
        prop_assert!((dot(&x, &qy) - dot(&y, &qx)).abs() < 1e-10);
    }

    #[test]
    fn set_stats_additive((g, mask) in graph_and_mask(20)) {
        let s: Vec<usize> = (0..g.n()).filter(|&i| mask[i]).collect();
        let rest: Vec<usize> = (0..g.n()).filter(|&i| !mask[i]).collect();
        let a = set_stats(&g, &s).unwrap();
        let b = set_stats(&g, &rest).unwrap();
        let all = set_stats(&g, &(0..g.n()).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(a.b, b.b);
        prop_assert_eq!(a.w + 2 * a.b + b.w, all.w);
        prop_assert_eq!(a.v + b.v, all.v);
    }

    #[test]
    fn phi_in_unit_interval((g, mask) in graph_and_mask(20)) {
        let s: Vec<usize> = (0..g.n()).filter(|&i| mask[i]).collect();
        let f = phi(&g, &s).unwrap();
        if f.is_finite() {
            prop_assert!((0.0..=1.0).contains(&f));
        }
    }

    #[test]
    fn threshold_is_optimal(
        z in prop::collection::vec(-3.0f64..3.0, 1..=8),
        rho in prop::sample::select(vec![0.01, 0.1, 0.5]),
    ) {
        let best = brute_threshold_value(&z, rho);
        match hard_threshold(&z, rho) {
            Ok(u) => {
                let value = dot(u.values(), &z) - rho * u.support_size() as f64;
                prop_assert!((value - best).abs() < 1e-12, "{value} vs {best}");
                prop_assert!((u.norm() - 1.0).abs() < 1e-12);
            }
            // an empty vector scores 0, so no support may beat it
            Err(_) => prop_assert!(best <= 1e-12, "degenerate but best {best}"),
        }
    }

    #[test]
    fn threshold_support_scale_equivariant(
        z in prop::collection::vec(-3.0f64..3.0, 1..=10),
        rho in 0.0f64..1.0,
        c in 0.01f64..100.0,
    ) {
        let scaled: Vec<f64> = z.iter().map(|x| c * x).collect();
        let a = hard_threshold(&z, rho).map(|u| u.support());
        let b = hard_threshold(&scaled, c * rho).map(|u| u.support());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn solver_deterministic_and_unit_norm(g in graph_strategy(25), k in 0usize..4) {
        prop_assume!(g.edge_count() > 0);
        let eta = k as f64 / g.n() as f64;
        let a = two_phase_solve::<f64>(&g, eta).unwrap();
        let b = two_phase_solve::<f64>(&g, eta).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.support.len() <= g.n());
        if !a.support.is_empty() {
            prop_assert!((a.u.norm() - 1.0).abs() < 1e-12);
            prop_assert!((a.v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn binom_tail_monotone(m in 2usize..30, p in 0.001f64..0.999, dp in 0.0f64..0.5) {
        let pairs = (m * (m - 1) / 2) as u64;
        let mut prev = 0.0;
        for e in 0..=pairs {
            let t = binom_tail(m, e, p).unwrap();
            prop_assert!(t >= prev);
            prev = t;
        }
        let q = (p + dp).min(1.0);
        for e in 0..pairs {
            prop_assert!(binom_tail(m, e, q).unwrap() <= binom_tail(m, e, p).unwrap() + 1e-15);
        }
    }

    #[test]
    fn nmi_symmetric_and_relabel_invariant(
        pairs in prop::collection::vec((0u8..4, 0u8..5), 2..60),
        shift in 1u8..50,
    ) {
        let c: Vec<u8> = pairs.iter().map(|p| p.0).collect();
        let e: Vec<u8> = pairs.iter().map(|p| p.1).collect();
        let a = nmi_full(&c, &e, NmiVariant::Standard).unwrap();
        let b = nmi_full(&e, &c, NmiVariant::Standard).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        let relabeled: Vec<u8> = c.iter().map(|x| x.wrapping_mul(7).wrapping_add(shift)).collect();
        let r = nmi_full(&relabeled, &e, NmiVariant::Standard).unwrap();
        prop_assert!((a - r).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn raw_count_nmi_one_on_identical_blocks(sizes in prop::collection::vec(2usize..8, 1..6)) {
        let c: Vec<Option<usize>> = sizes
            .iter()
            .enumerate()
            .flat_map(|(k, &s)| std::iter::repeat_n(Some(k), s))
            .collect();
        let v = nmi(&c, &c, NmiVariant::Paper).unwrap();
        prop_assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_in_unit_interval_and_symmetric(
        a in prop::collection::hash_set(0usize..40, 1..20),
        b in prop::collection::hash_set(0usize..40, 1..20),
    ) {
        let a: Vec<usize> = a.into_iter().collect();
        let b: Vec<usize> = b.into_iter().collect();
        let ab = overlap_matrix(std::slice::from_ref(&a), std::slice::from_ref(&b))[0][0];
        let ba = overlap_matrix(&[b], &[a])[0][0];
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn degree_sum_is_twice_unique_edges(raw in prop::collection::vec((0usize..60, 0usize..60), 1000)) {
        let g = Graph::from_edges(60, &raw).unwrap();
        let unique: HashSet<(usize, usize)> = raw
            .iter()
            .filter(|(a, b)| a != b)
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * unique.len());
        prop_assert_eq!(g.edge_count(), unique.len());
    }
}
