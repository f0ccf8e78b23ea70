use l0lap::models::gnp;
use l0lap::{
    detect, extract_all, fixed_size_sample, DetectionConfig, Graph, NodeStatus, ThetaDist,
};
use proptest::prelude::*;

fn small_cfg(seed: u64) -> DetectionConfig {
    DetectionConfig {
        n_perm: 20,
        seed,
        ..DetectionConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn peeling_is_disjoint_and_shrinks(seed in 0u64..1000, p in 0.05f64..0.3) {
        let g = gnp(40, p, seed).unwrap();
        let res = extract_all::<f64>(&g, &small_cfg(seed)).unwrap();
        let mut seen = vec![false; g.n()];
        for c in &res.communities {
            for &i in &c.members {
                prop_assert!(!seen[i], "node {i} extracted twice");
                seen[i] = true;
            }
        }
        for w in res.diagnostics.windows(2) {
            prop_assert!(w[1].remaining_edges < w[0].remaining_edges);
        }
        for &i in &res.unassigned {
            prop_assert!(!seen[i]);
        }
    }

    #[test]
    fn lower_alpha_never_restores(seed in 0u64..1000) {
        let g = gnp(60, 0.08, seed).unwrap();
        let res = detect::<f64>(&g, &small_cfg(seed)).unwrap();
        for alpha in [0.01, 0.02, 0.05, 0.1, 0.5] {
            let hi = res.with_alpha(alpha);
            let lo = res.with_alpha(alpha / 2.0);
            for (a, b) in hi.communities.iter().zip(&lo.communities) {
                prop_assert!(!b.kept || a.kept);
            }
        }
    }
}

#[test]
fn detection_is_reproducible() {
    let p = vec![vec![0.3, 0.03], vec![0.03, 0.3]];
    let net = fixed_size_sample(&[30, 30], &p, &ThetaDist::sbm(), false, 2).unwrap();
    let a = detect::<f64>(&net.graph, &small_cfg(9)).unwrap();
    let b = detect::<f64>(&net.graph, &small_cfg(9)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn filter_only_removes() {
    for seed in 0..5 {
        let g = gnp(80, 0.06, seed).unwrap();
        let cfg = small_cfg(seed);
        let raw = extract_all::<f64>(&g, &cfg).unwrap();
        let filtered = detect::<f64>(&g, &cfg).unwrap();
        assert!(filtered.kept_count() <= raw.kept_count());
        assert_eq!(filtered.communities.len(), raw.communities.len());
    }
}

#[test]
fn planted_triples_survive_and_pair_is_dropped() {
    // three 15-node communities plus a detached edge
    let p = vec![
        vec![0.6, 0.02, 0.02],
        vec![0.02, 0.6, 0.02],
        vec![0.02, 0.02, 0.6],
    ];
    let mut good = 0;
    for seed in 0..20 {
        let net = fixed_size_sample(&[15, 15, 15], &p, &ThetaDist::sbm(), false, seed).unwrap();
        let mut edges: Vec<(usize, usize)> = net.graph.edges().collect();
        edges.push((45, 46));
        let g = Graph::from_edges(47, &edges).unwrap();
        let res = detect::<f64>(&g, &small_cfg(seed)).unwrap();
        let status = res.node_status();
        let pair_dropped = !matches!(status[45], NodeStatus::Kept(_));
        let blocks_kept = (0..3).all(|k| {
            let kept = (15 * k..15 * (k + 1))
                .filter(|&i| matches!(status[i], NodeStatus::Kept(_)))
                .count();
            kept >= 12
        });
        if pair_dropped && blocks_kept {
            good += 1;
        }
    }
    println!("planted triples kept with pair dropped in {good}/20 runs");
    assert!(good >= 18, "{good}/20");
}
