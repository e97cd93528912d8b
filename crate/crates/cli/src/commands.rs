//! Implementations of the five subcommands.

use std::fs;
use std::io::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use accordant::akmeans::{akmeans_restarts, feasible_k_range};
use accordant::analysis::{clustering_distance, davies_bouldin, silhouette, sse};
use accordant::clustering::accordance_report;
use accordant::io::{
    generate, load_csv, write_result, ColumnSelector, Component, IngestConfig, Overlay, ResultFile,
    ResultMetrics, SynthSpec,
};
use accordant::oracle::{optimal_accordant, optimal_unconstrained, OracleOutcome};
use accordant::{AccordanceParams, Clustering, Dataset, Error, Result};

use crate::{Algo, CompareArgs, DataArgs, FeasibleArgs, FitArgs, OracleArgs, SynthArgs};

/// Print a line, swallowing EPIPE so `accordant ... | head` stays quiet.
fn emit(line: impl AsRef<str>) {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let _ = writeln!(lock, "{}", line.as_ref());
}

fn column_selector(raw: &str) -> ColumnSelector {
    match raw.parse::<usize>() {
        Ok(idx) => ColumnSelector::Index(idx),
        Err(_) => ColumnSelector::Name(raw.to_string()),
    }
}

fn load(data: &DataArgs) -> Result<Dataset> {
    let config =
        IngestConfig::new(column_selector(&data.group_col)).with_standardize(data.standardize);
    load_csv(&data.data, &config)
}

fn build_params(args: &FitArgs) -> AccordanceParams {
    AccordanceParams {
        k: args.constraint.k,
        r: args.constraint.r,
        t: args.constraint.t,
        tau: args.run.tau,
        delta: args.run.delta,
        restarts: args.run.restarts,
        seed: args.run.seed,
        init_mode: args.run.init.into(),
    }
}

/// Run the requested algorithm. The baseline path reuses the constrained
/// engine with the constraint disabled (bit-identical to plain k-means) and
/// reports accordance at the requested threshold without enforcing it.
fn run_algo(dataset: &Dataset, params: &AccordanceParams, algo: Algo) -> Result<Clustering> {
    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    match algo {
        Algo::Akmeans => akmeans_restarts(dataset, params, &mut master),
        Algo::Kmeans => {
            let baseline = AccordanceParams {
                t: 0.0,
                r: 0,
                ..params.clone()
            };
            let mut fit = akmeans_restarts(dataset, &baseline, &mut master)?;
            fit.accordance = accordance_report(&fit.assignment, dataset, params.t);
            Ok(fit)
        }
    }
}

pub fn fit(args: FitArgs) -> Result<()> {
    let dataset = load(&args.data)?;
    let params = build_params(&args);
    params.validate(dataset.m())?;
    let started = Instant::now();
    let clustering = run_algo(&dataset, &params, args.algo)?;
    let wall_ms = started.elapsed().as_millis() as u64;

    let metrics = if args.metrics {
        ResultMetrics {
            silhouette: silhouette(&dataset, &clustering.assignment).ok(),
            davies_bouldin: davies_bouldin(&dataset, &clustering.assignment).ok(),
        }
    } else {
        ResultMetrics::default()
    };

    let algo_name = match args.algo {
        Algo::Akmeans => "akmeans",
        Algo::Kmeans => "kmeans",
    };
    let accordant: Vec<String> = clustering
        .accordance
        .iter()
        .map(|e| {
            format!(
                "{}->c{} ({:.3})",
                dataset.group_label(e.group),
                e.cluster,
                e.fraction
            )
        })
        .collect();
    emit(format!(
        "{algo_name} k={} sse={:.6} iterations={} accordant_groups=[{}]",
        params.k,
        clustering.sse,
        clustering.iterations,
        accordant.join(", ")
    ));

    if let Some(out) = &args.out {
        let record = ResultFile::new(&dataset, &params, &clustering, metrics, wall_ms);
        write_result(out, &record)?;
        emit(format!("result written to {}", out.display()));
    }
    Ok(())
}

pub fn feasible(args: FeasibleArgs) -> Result<()> {
    let dataset = load(&args.data)?;
    if args.r > dataset.m() {
        return Err(Error::InvalidInput(format!(
            "r={} exceeds the group count m={}",
            args.r,
            dataset.m()
        )));
    }
    if !(0.0..=1.0).contains(&args.t) {
        return Err(Error::InvalidInput(format!(
            "t must lie in [0, 1], got {}",
            args.t
        )));
    }
    let max_k = feasible_k_range(&dataset, args.r, args.t);
    let mut sizes = dataset.group_sizes();
    sizes.sort_unstable();
    emit(format!(
        "n={} m={} group sizes (sorted)={:?} r={} t={}",
        dataset.n(),
        dataset.m(),
        sizes,
        args.r,
        args.t
    ));
    emit(format!("max k = {max_k}"));
    // Per-k verdicts: every k for small inputs, the boundary otherwise.
    if dataset.n() <= 24 {
        for k in 1..=dataset.n() {
            let verdict = if k <= max_k { "feasible" } else { "infeasible" };
            emit(format!("k={k}: {verdict}"));
        }
    } else {
        emit(format!("k=1..={max_k}: feasible"));
        if max_k < dataset.n() {
            emit(format!("k={}..={}: infeasible", max_k + 1, dataset.n()));
        }
    }
    Ok(())
}

struct AlgoStats {
    runs: usize,
    accordant: usize,
    mean: Option<f64>,
    ci_half_width: Option<f64>,
}

fn summarize(sses: &[f64], runs: usize) -> AlgoStats {
    let accordant = sses.len();
    if accordant == 0 {
        return AlgoStats {
            runs,
            accordant,
            mean: None,
            ci_half_width: None,
        };
    }
    let mean = sses.iter().sum::<f64>() / accordant as f64;
    let ci = if accordant >= 2 {
        let var =
            sses.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (accordant - 1) as f64;
        Some(1.96 * var.sqrt() / (accordant as f64).sqrt())
    } else {
        Some(0.0)
    };
    AlgoStats {
        runs,
        accordant,
        mean: Some(mean),
        ci_half_width: ci,
    }
}

pub fn compare(args: CompareArgs) -> Result<()> {
    if args.runs < 2 {
        return Err(Error::InvalidInput("compare needs at least 2 runs".into()));
    }
    let dataset = load(&args.data)?;
    let base = AccordanceParams {
        k: args.constraint.k,
        r: args.constraint.r,
        t: args.constraint.t,
        tau: args.run.tau,
        delta: args.run.delta,
        restarts: args.run.restarts,
        seed: args.run.seed,
        init_mode: args.run.init.into(),
    };
    base.validate(dataset.m())?;

    // One shared seed list so both algorithms see identical streams.
    let mut master = ChaCha8Rng::seed_from_u64(base.seed);
    let seeds: Vec<u64> = (0..args.runs).map(|_| master.random()).collect();

    let mut rows = Vec::new();
    for algo in [Algo::Akmeans, Algo::Kmeans] {
        let mut accordant_sses = Vec::new();
        for &seed in &seeds {
            let params = AccordanceParams {
                seed,
                ..base.clone()
            };
            let fit = run_algo(&dataset, &params, algo)?;
            let ok = accordance_report(&fit.assignment, &dataset, base.t).len() >= base.r;
            if ok {
                accordant_sses.push(fit.sse);
            }
        }
        let stats = summarize(&accordant_sses, args.runs);
        let name = match algo {
            Algo::Akmeans => "akmeans",
            Algo::Kmeans => "kmeans",
        };
        rows.push((name, stats));
    }

    let mut table = String::from("algo,runs,accordant_fraction,mean_sse,ci95_half_width\n");
    for (name, stats) in &rows {
        let fraction = stats.accordant as f64 / stats.runs as f64;
        let mean = stats.mean.map_or(String::new(), |v| format!("{v:.6}"));
        let ci = stats
            .ci_half_width
            .map_or(String::new(), |v| format!("{v:.6}"));
        table.push_str(&format!(
            "{name},{},{fraction:.4},{mean},{ci}\n",
            stats.runs
        ));
    }
    let stdout = std::io::stdout();
    let _ = write!(stdout.lock(), "{table}");
    if let Some(out) = &args.out {
        fs::write(out, &table)?;
    }
    Ok(())
}

fn random_instance(rng: &mut ChaCha8Rng, points: usize, groups: usize, dim: usize) -> Dataset {
    loop {
        let flat: Vec<f64> = (0..points * dim)
            .map(|_| rng.random_range(-5.0..5.0))
            .collect();
        // Every group must be nonempty: deal one point per group first.
        let group_of: Vec<usize> = (0..points)
            .map(|i| {
                if i < groups {
                    i
                } else {
                    rng.random_range(0..groups)
                }
            })
            .collect();
        if let Ok(ds) = Dataset::new(flat, dim, group_of) {
            return ds;
        }
    }
}

pub fn oracle(args: OracleArgs) -> Result<()> {
    let params = AccordanceParams {
        k: args.constraint.k,
        r: args.constraint.r,
        t: args.constraint.t,
        tau: args.run.tau,
        delta: args.run.delta,
        restarts: args.run.restarts,
        seed: args.run.seed,
        init_mode: args.run.init.into(),
    };

    match args.batch {
        None => {
            let data = args.data.clone().ok_or_else(|| {
                Error::InvalidInput("either --data or --batch is required".into())
            })?;
            let config = IngestConfig::new(column_selector(&args.group_col))
                .with_standardize(args.standardize);
            let dataset = load_csv(&data, &config)?;
            params.validate(dataset.m())?;
            let report = gap_report(&dataset, &params)?;
            emit(format!(
                "oracle_sse={:.9} akmeans_sse={:.9} relative_gap={:.6} dist={:.4}",
                report.oracle_sse, report.heuristic_sse, report.relative_gap, report.dist
            ));
            Ok(())
        }
        Some(instances) => {
            if instances == 0 {
                return Err(Error::InvalidInput("--batch must be at least 1".into()));
            }
            if args.groups > args.points {
                return Err(Error::InvalidInput(
                    "--groups cannot exceed --points".into(),
                ));
            }
            if params.r > args.groups {
                return Err(Error::InvalidInput(format!(
                    "r={} exceeds the group count {}",
                    params.r, args.groups
                )));
            }
            let required = (params.k as f64).powi(args.points as i32);
            if required > accordant::oracle::ENUMERATION_BUDGET {
                return Err(Error::BudgetExceeded {
                    required,
                    budget: accordant::oracle::ENUMERATION_BUDGET,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            let mut within = 0usize;
            for i in 0..instances {
                let mut attempts = 0usize;
                let dataset = loop {
                    attempts += 1;
                    if attempts > 10_000 {
                        return Err(Error::InvalidInput(format!(
                            "could not sample a feasible instance for k={} r={} t={} \
                             with {} points in {} groups",
                            params.k, params.r, params.t, args.points, args.groups
                        )));
                    }
                    let candidate = random_instance(&mut rng, args.points, args.groups, args.dim);
                    if params.k <= feasible_k_range(&candidate, params.r, params.t) {
                        break candidate;
                    }
                };
                let seed: u64 = rng.random();
                let inst_params = AccordanceParams {
                    seed,
                    ..params.clone()
                };
                let report = gap_report(&dataset, &inst_params)?;
                if report.relative_gap <= 0.05 {
                    within += 1;
                }
                emit(format!(
                    "instance={} oracle_sse={:.9} akmeans_sse={:.9} relative_gap={:.6} dist={:.4}",
                    i, report.oracle_sse, report.heuristic_sse, report.relative_gap, report.dist
                ));
            }
            emit(format!(
                "summary: {within}/{instances} instances within 5% of the oracle ({:.1}%)",
                100.0 * within as f64 / instances as f64
            ));
            Ok(())
        }
    }
}

struct GapReport {
    oracle_sse: f64,
    heuristic_sse: f64,
    relative_gap: f64,
    dist: f64,
}

fn gap_report(dataset: &Dataset, params: &AccordanceParams) -> Result<GapReport> {
    let optimal = if params.is_unconstrained() {
        optimal_unconstrained(dataset, params.k)?
    } else {
        match optimal_accordant(dataset, params.k, params.r, params.t)? {
            OracleOutcome::Optimal(sol) => sol,
            OracleOutcome::Infeasible => {
                let max_k = feasible_k_range(dataset, params.r, params.t);
                return Err(Error::Infeasible {
                    k: params.k,
                    r: params.r,
                    t: params.t,
                    max_k,
                });
            }
        }
    };
    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    let heuristic = akmeans_restarts(dataset, params, &mut master)?;
    let relative_gap = if optimal.sse > 0.0 {
        (heuristic.sse - optimal.sse) / optimal.sse
    } else {
        heuristic.sse
    };
    let dist = clustering_distance(&heuristic.assignment, &optimal.assignment, params.k)?.distance;
    // Sanity: SSE recomputed from scratch matches the engine's bookkeeping.
    debug_assert!(
        (sse(dataset, &heuristic.assignment, Some(&heuristic.centers)) - heuristic.sse).abs()
            <= 1e-9
    );
    Ok(GapReport {
        oracle_sse: optimal.sse,
        heuristic_sse: heuristic.sse,
        relative_gap,
        dist,
    })
}

fn parse_centers(raw: &str) -> Result<Vec<Vec<f64>>> {
    let centers: Vec<Vec<f64>> = raw
        .split(';')
        .map(|point| {
            point
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
        })
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidInput(format!("bad --centers value: {e}")))?;
    if centers.is_empty() {
        return Err(Error::InvalidInput(
            "--centers must list at least one point".into(),
        ));
    }
    Ok(centers)
}

fn parse_broadcast<T>(raw: &str, len: usize, flag: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr + Clone,
    T::Err: std::fmt::Display,
{
    let values: Vec<T> = raw
        .split(',')
        .map(|v| v.trim().parse::<T>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidInput(format!("bad {flag} value: {e}")))?;
    match values.len() {
        1 => Ok(vec![values[0].clone(); len]),
        n if n == len => Ok(values),
        n => Err(Error::InvalidInput(format!(
            "{flag} needs 1 or {len} values, got {n}"
        ))),
    }
}

fn parse_overlay(raw: &str, centers: &[Vec<f64>]) -> Result<Overlay> {
    if raw == "component" {
        return Ok(Overlay::ByComponent);
    }
    let Some(rest) = raw.strip_prefix("split:") else {
        return Err(Error::InvalidInput(format!(
            "bad --overlay `{raw}`; expected `component` or `split:DIM[:cuts]`"
        )));
    };
    let mut parts = rest.splitn(2, ':');
    let dim: usize = parts
        .next()
        .unwrap()
        .parse()
        .map_err(|e| Error::InvalidInput(format!("bad split dimension: {e}")))?;
    let cuts = match parts.next() {
        None => centers
            .iter()
            .map(|c| {
                c.get(dim).copied().map(Some).ok_or_else(|| {
                    Error::InvalidInput(format!("split dimension {dim} out of range"))
                })
            })
            .collect::<Result<Vec<_>>>()?,
        Some(list) => {
            let entries: Vec<&str> = list.split(',').collect();
            if entries.len() != centers.len() {
                return Err(Error::InvalidInput(format!(
                    "--overlay cuts need {} entries, got {}",
                    centers.len(),
                    entries.len()
                )));
            }
            entries
                .iter()
                .map(|e| {
                    if e.trim() == "_" {
                        Ok(None)
                    } else {
                        e.trim().parse::<f64>().map(Some).map_err(|err| {
                            Error::InvalidInput(format!("bad cut value `{e}`: {err}"))
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(Overlay::Split { dim, cuts })
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let centers = parse_centers(&args.centers)?;
    let stddevs: Vec<f64> = parse_broadcast(&args.stddev, centers.len(), "--stddev")?;
    let counts: Vec<usize> = parse_broadcast(&args.count, centers.len(), "--count")?;
    let overlay = parse_overlay(&args.overlay, &centers)?;
    let components: Vec<Component> = centers
        .into_iter()
        .zip(stddevs)
        .zip(counts)
        .map(|((center, stddev), count)| Component {
            center,
            stddev,
            count,
        })
        .collect();
    let spec = SynthSpec {
        components,
        overlay,
        seed: args.seed,
    };
    let out = generate(&spec)?;

    let dim = out.dataset.dim();
    let mut csv = String::new();
    for d in 0..dim {
        csv.push_str(&format!("f{d},"));
    }
    csv.push_str("group\n");
    for i in 0..out.dataset.n() {
        for v in out.dataset.point(i) {
            csv.push_str(&format!("{v},"));
        }
        csv.push_str(out.dataset.group_label(out.dataset.group_of(i)));
        csv.push('\n');
    }
    fs::write(&args.out, csv)?;

    let planted_path = args.planted.clone().unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".planted.csv");
        p.into()
    });
    let mut sidecar = fs::File::create(&planted_path)?;
    writeln!(sidecar, "component")?;
    for &c in &out.planted {
        writeln!(sidecar, "{c}")?;
    }
    emit(format!(
        "wrote {} points, {} groups to {} (planted labels: {})",
        out.dataset.n(),
        out.dataset.m(),
        args.out.display(),
        planted_path.display()
    ));
    Ok(())
}
