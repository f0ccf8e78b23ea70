use l0lap::{
    benchmark_summary, build_connection_matrix, detect, fixed_size_sample, DetectionConfig,
    ThetaDist,
};

/// The 21-block simulation layout at one fifth of its node count.
fn scaled_layout() -> Vec<usize> {
    let mut sizes = vec![20; 5];
    sizes.extend([10; 6]);
    sizes.extend([4; 10]);
    sizes
}

#[test]
fn small_beta_suite_recovers_blocks() {
    let sizes = scaled_layout();
    let n: usize = sizes.iter().sum();
    let pi: Vec<f64> = sizes.iter().map(|&s| s as f64 / n as f64).collect();
    let theta = ThetaDist::sbm();
    let p = build_connection_matrix(&pi, 0.05, 10.0, n, theta.mean(), false).unwrap();
    let runs: Vec<_> = (0..20)
        .map(|seed| {
            let net = fixed_size_sample(&sizes, &p, &theta, false, seed).unwrap();
            let cfg = DetectionConfig {
                seed,
                ..DetectionConfig::default()
            };
            (detect::<f64>(&net.graph, &cfg).unwrap(), net.labels)
        })
        .collect();
    let s = benchmark_summary(&runs).unwrap();
    println!(
        "mean NMI {:.4}, sd {:.4}, mean communities {:.2}",
        s.mean_nmi, s.sd_nmi, s.mean_cn
    );
    assert_eq!(s.replicates, 20);
    assert!(s.mean_nmi >= 0.95, "{}", s.mean_nmi);
}
