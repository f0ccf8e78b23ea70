use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use l0lap::io::{
    align_labels, fmt_g, read_edge_list, read_result_csv, read_truth_csv, write_diagnostics_csv,
    write_edge_list, write_result_csv, write_truth_csv,
};
use l0lap::metrics::{run_nmi, summarize_runs};
use l0lap::models::GeneratedNetwork;
use l0lap::{
    build_connection_matrix, extract_all, fixed_size_sample, nmi, overlap_matrix, DetectionConfig,
    DetectionResult, Graph, NmiVariant, ThetaDist,
};
use serde_json::json;

use crate::manifest::Outputs;
use crate::{BenchArgs, Design, DetectArgs, DetectionFlags, EvalArgs, Model, SimulateArgs, Sweep};

impl DetectionFlags {
    fn config(&self, seed: u64) -> Result<DetectionConfig> {
        let cfg = DetectionConfig {
            c_grid: self.eta_grid_c,
            b_grid: self.eta_grid_b,
            m_small: self.small_m,
            n_perm: self.n_perm,
            alpha: self.alpha,
            seed,
            ..DetectionConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn echo(&self) -> serde_json::Value {
        json!({
            "eta_grid_c": self.eta_grid_c,
            "eta_grid_b": self.eta_grid_b,
            "small_m": self.small_m,
            "n_perm": self.n_perm,
            "alpha": self.alpha,
            "no_filter": self.no_filter,
            "threads": self.threads,
        })
    }

    fn method(&self) -> &'static str {
        if self.no_filter {
            "L0Lap"
        } else {
            "L0LapT"
        }
    }

    fn run(&self, g: &Graph, cfg: &DetectionConfig) -> Result<DetectionResult> {
        Ok(if self.no_filter {
            extract_all::<f64>(g, cfg)?
        } else {
            l0lap::detect::<f64>(g, cfg)?
        })
    }

    /// Runs `f` on a pool with the requested thread count.
    fn in_pool<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R> {
        match self.threads {
            None => Ok(f()),
            Some(0) => bail!("--threads must be at least 1"),
            Some(t) => {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build()?;
                Ok(pool.install(f))
            }
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

pub fn detect(args: &DetectArgs) -> Result<()> {
    let started = Instant::now();
    let (g, report) = read_edge_list(open(&args.edges)?)
        .with_context(|| format!("reading {}", args.edges.display()))?;
    if report.duplicate_edges + report.self_loops > 0 {
        eprintln!(
            "note: dropped {} duplicate edges and {} self-loops",
            report.duplicate_edges, report.self_loops
        );
    }
    let cfg = args.detection.config(args.seed)?;
    let result = args.detection.in_pool(|| args.detection.run(&g, &cfg))??;
    for note in &result.notes {
        eprintln!("note: {note}");
    }

    let mut out = Outputs::new(&args.out_dir, started)?;
    write_result_csv(&g, &result, out.create("result.csv")?)?;
    write_diagnostics_csv(&result, out.create("diagnostics.csv")?)?;
    let mut config = args.detection.echo();
    config["nodes"] = json!(g.n());
    config["edges"] = json!(g.edge_count());
    out.finish(
        "detect",
        config,
        args.seed,
        vec![args.edges.display().to_string()],
    )?;
    eprintln!(
        "{} communities extracted, {} kept",
        result.communities.len(),
        result.kept_count()
    );
    Ok(())
}

/// Samples one network with fixed block sizes; an outlier block, if any,
/// is appended last.
fn planted_network(
    model: Model,
    sizes: &[usize],
    outlier_n: usize,
    beta: f64,
    lambda: f64,
    seed: u64,
) -> Result<GeneratedNetwork> {
    ensure!(!sizes.is_empty(), "need at least one community size");
    ensure!(
        sizes.iter().all(|&s| s > 0),
        "community sizes must be positive"
    );
    let mut all = sizes.to_vec();
    if outlier_n > 0 {
        all.push(outlier_n);
    }
    let n: usize = all.iter().sum();
    let pi: Vec<f64> = all.iter().map(|&s| s as f64 / n as f64).collect();
    let theta = match model {
        Model::Sbm => ThetaDist::sbm(),
        Model::Dcsbm => ThetaDist::dcsbm_uniform(),
    };
    let p = build_connection_matrix(&pi, beta, lambda, n, theta.mean(), outlier_n > 0)?;
    Ok(fixed_size_sample(&all, &p, &theta, outlier_n > 0, seed)?)
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let started = Instant::now();
    let net = planted_network(
        args.model,
        &args.sizes,
        args.outlier_n,
        args.beta,
        args.lambda_deg,
        args.seed,
    )?;
    if net.clipped_pairs > 0 {
        eprintln!(
            "note: {} pair probabilities clipped to 1",
            net.clipped_pairs
        );
    }
    let mut out = Outputs::new(&args.out_dir, started)?;
    let mut w = out.create("edges.txt")?;
    write_edge_list(&net.graph, &mut w)?;
    w.flush()?;
    drop(w);
    write_truth_csv(&net.graph, &net.labels, out.create("truth.csv")?)?;
    let config = json!({
        "model": args.model.name(),
        "sizes": args.sizes,
        "beta": args.beta,
        "lambda_deg": args.lambda_deg,
        "outlier_n": args.outlier_n,
        "nodes": net.graph.n(),
        "edges": net.graph.edge_count(),
    });
    out.finish("simulate", config, args.seed, Vec::new())?;
    Ok(())
}

/// Sort key that orders numeric labels numerically and the rest after them.
fn label_key(s: &str) -> (u8, i64, String) {
    match s.parse::<i64>() {
        Ok(v) => (0, v, String::new()),
        Err(_) => (1, 0, s.to_string()),
    }
}

fn groups(labels: &[Option<String>]) -> (Vec<String>, Vec<Vec<usize>>) {
    let mut map: BTreeMap<(u8, i64, String), (String, Vec<usize>)> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        if let Some(l) = l {
            map.entry(label_key(l))
                .or_insert_with(|| (l.clone(), Vec::new()))
                .1
                .push(i);
        }
    }
    map.into_values().unzip()
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let detected = read_result_csv(open(&args.result)?)
        .with_context(|| format!("reading {}", args.result.display()))?;
    let truth = read_truth_csv(open(&args.truth)?)
        .with_context(|| format!("reading {}", args.truth.display()))?;
    let (_, d, t) = align_labels(&detected, &truth)?;
    let standard = nmi(&d, &t, NmiVariant::Standard)?;
    let paper = nmi(&d, &t, NmiVariant::Paper);
    let (d_names, d_sets) = groups(&d);
    let (t_names, t_sets) = groups(&t);
    let overlap = overlap_matrix(&d_sets, &t_sets);

    let stdout = io::stdout();
    let mut w = stdout.lock();
    writeln!(w, "nmi_standard,{}", fmt_g(standard))?;
    match paper {
        Ok(v) => writeln!(w, "nmi_paper,{}", fmt_g(v))?,
        Err(e) => writeln!(w, "nmi_paper,undefined ({e})")?,
    }
    writeln!(w, "kept_communities,{}", d_names.len())?;
    writeln!(w)?;
    let mut csv = Vec::with_capacity(t_names.len() + 1);
    csv.push("detected".to_string());
    csv.extend(t_names.iter().map(|t| format!("true_{t}")));
    writeln!(w, "{}", csv.join(","))?;
    for (name, row) in d_names.iter().zip(&overlap) {
        let cells: Vec<String> = row.iter().map(|&x| fmt_g(x)).collect();
        writeln!(w, "{name},{}", cells.join(","))?;
    }
    Ok(())
}

/// Block sizes of the simulation designs, multiplied by `scale`.
fn design_sizes(design: Design, scale: f64) -> Result<(Vec<usize>, usize)> {
    ensure!(scale > 0.0, "--scale must be positive");
    let scaled = |s: usize| ((s as f64 * scale).round() as usize).max(2);
    let (blocks, outliers): (&[(usize, usize)], usize) = match design {
        Design::Standard => (&[(5, 100), (6, 50), (10, 20)], 0),
        Design::Outlier => (&[(5, 100), (6, 50), (5, 20)], 100),
    };
    let sizes = blocks
        .iter()
        .flat_map(|&(count, size)| std::iter::repeat_n(scaled(size), count))
        .collect();
    let outliers = if outliers > 0 { scaled(outliers) } else { 0 };
    Ok((sizes, outliers))
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let started = Instant::now();
    ensure!(args.replicates >= 1, "--replicates must be at least 1");
    ensure!(!args.values.is_empty(), "--values needs at least one entry");
    let (sizes, outlier_n) = design_sizes(args.design, args.scale)?;
    let lambda_default = args.lambda_deg.unwrap_or(50.0 * args.scale);

    let mut rows = Vec::new();
    for &value in &args.values {
        let (beta, lambda) = match args.sweep {
            Sweep::Beta => (value, lambda_default),
            Sweep::Lambda => (args.beta, value),
        };
        let mut scores = Vec::with_capacity(args.replicates);
        let mut counts = Vec::with_capacity(args.replicates);
        for r in 0..args.replicates {
            let seed = args.seed.wrapping_add(r as u64);
            let net = planted_network(args.model, &sizes, outlier_n, beta, lambda, seed)?;
            let cfg = args.detection.config(seed)?;
            let result = args
                .detection
                .in_pool(|| args.detection.run(&net.graph, &cfg))??;
            scores.push(run_nmi(&result, &net.labels));
            counts.push(result.kept_count() as f64);
        }
        let summary = summarize_runs(&scores, &counts)?;
        eprintln!(
            "beta={} lambda={}: mean NMI {:.4}, mean communities {:.2}",
            fmt_g(beta),
            fmt_g(lambda),
            summary.mean_nmi,
            summary.mean_cn
        );
        rows.push((beta, lambda, summary));
    }

    let mut out = Outputs::new(&args.out_dir, started)?;
    let mut csv_out = csv::Writer::from_writer(out.create("benchmark.csv")?);
    csv_out.write_record([
        "model",
        "beta",
        "lambda",
        "method",
        "mean_nmi",
        "sd_nmi",
        "mean_cn",
        "replicates",
    ])?;
    for (beta, lambda, s) in &rows {
        csv_out.write_record([
            args.model.name().to_string(),
            fmt_g(*beta),
            fmt_g(*lambda),
            args.detection.method().to_string(),
            fmt_g(s.mean_nmi),
            fmt_g(s.sd_nmi),
            fmt_g(s.mean_cn),
            s.replicates.to_string(),
        ])?;
    }
    csv_out.flush()?;
    drop(csv_out);
    let mut config = args.detection.echo();
    config["sweep"] = json!(format!("{:?}", args.sweep).to_lowercase());
    config["values"] = json!(args.values);
    config["model"] = json!(args.model.name());
    config["design"] = json!(format!("{:?}", args.design).to_lowercase());
    config["sizes"] = json!(sizes);
    config["outlier_n"] = json!(outlier_n);
    config["beta"] = json!(args.beta);
    config["lambda_deg"] = json!(lambda_default);
    config["scale"] = json!(args.scale);
    config["replicates"] = json!(args.replicates);
    out.finish("bench", config, args.seed, Vec::new())?;
    Ok(())
}
