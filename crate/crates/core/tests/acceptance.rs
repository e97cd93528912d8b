//! Acceptance suite: one test per criterion, each asserting its stated
//! tolerance and printing a PASS line with the measured numbers.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use accordant::akmeans::{
    akmeans_fit, akmeans_restarts, compute_penalties, construct_feasible, feasible_k_range,
    select_pairings,
};
use accordant::analysis::{cluster_cores, clustering_distance};
use accordant::clustering::is_rt_accordant;
use accordant::io::{generate, load_csv, Component, IngestConfig, Overlay, SynthSpec};
use accordant::kmeans::{init_centers, kmeans_fit, recompute_centers};
use accordant::oracle::{optimal_accordant, OracleOutcome};
use accordant::{AccordanceParams, Dataset, GroupedDataset, InitMode, RunControls};

const TRACE_SLACK: f64 = 1e-9;

fn iris() -> Dataset {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/iris.csv");
    load_csv(path, &IngestConfig::new("species")).expect("iris test data must load")
}

/// Random Gaussian-mixture dataset with random group labels.
fn random_mixture(rng: &mut ChaCha8Rng, n: usize, dim: usize, comps: usize, m: usize) -> Dataset {
    let centers: Vec<Vec<f64>> = (0..comps)
        .map(|_| (0..dim).map(|_| rng.random_range(-20.0..20.0)).collect())
        .collect();
    let mut points = Vec::with_capacity(n * dim);
    for i in 0..n {
        for &coord in &centers[i % comps] {
            points.push(coord + rng.random_range(-1.5..1.5));
        }
    }
    // All m groups present: deal one point per group first.
    let groups: Vec<usize> = (0..n)
        .map(|i| if i < m { i } else { rng.random_range(0..m) })
        .collect();
    GroupedDataset::new(points, dim, groups).unwrap()
}

struct RandomizedRun {
    trace: Vec<f64>,
    accordant: bool,
}

/// The shared pool of randomized runs behind the convergence and accordance
/// criteria: random datasets, random feasible (k, r, t), random seeds.
fn randomized_runs(count: usize) -> Vec<RandomizedRun> {
    let mut master = ChaCha8Rng::seed_from_u64(0xACC0);
    (0..count)
        .map(|_| {
            let n = master.random_range(24..=80);
            let dim = master.random_range(1..=3);
            let comps = master.random_range(2..=4);
            let m = master.random_range(2..=4);
            let ds = random_mixture(&mut master, n, dim, comps, m);
            let t: f64 = master.random_range(0.0..1.0);
            let r = master.random_range(0..=ds.m());
            let max_k = feasible_k_range(&ds, r, t);
            let k = 1 + master.random_range(0..max_k.min(8));
            let params = AccordanceParams {
                init_mode: InitMode::UniformRandom,
                ..AccordanceParams::new(k, r, t)
            };
            let seed: u64 = master.random();
            let fit = akmeans_fit(&ds, &params, &mut ChaCha8Rng::seed_from_u64(seed))
                .expect("feasible params must fit");
            RandomizedRun {
                accordant: is_rt_accordant(&fit.assignment, &ds, r, t),
                trace: fit.sse_trace,
            }
        })
        .collect()
}

#[test]
fn a01_monotone_convergence_over_500_randomized_runs() {
    let started = Instant::now();
    let runs = randomized_runs(500);
    let mut worst: f64 = f64::NEG_INFINITY;
    for (i, run) in runs.iter().enumerate() {
        for w in run.trace.windows(2) {
            worst = worst.max(w[1] - w[0]);
            assert!(
                w[1] <= w[0] + TRACE_SLACK,
                "run {i}: objective increased by {}",
                w[1] - w[0]
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "took {elapsed:?}, budget is 2 min"
    );
    println!(
        "acceptance 01 monotone-convergence: PASS | 500/500 non-increasing traces, \
         worst step {worst:+.3e}, {:.1}s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn a02_accordance_guarantee_over_500_randomized_runs() {
    let runs = randomized_runs(500);
    let violations = runs.iter().filter(|r| !r.accordant).count();
    assert_eq!(violations, 0, "{violations} runs violated the constraint");
    println!("acceptance 02 accordance-guarantee: PASS | 500/500 runs (r,t)-accordant");
}

#[test]
fn a03_feasibility_bound_matches_the_oracle_in_both_directions() {
    let mut master = ChaCha8Rng::seed_from_u64(0xFEA5);
    let instances = 200;
    for i in 0..instances {
        let n = master.random_range(5..=8);
        let m = master.random_range(2..=3).min(n);
        let dim = master.random_range(1..=2);
        let ds = random_mixture(&mut master, n, dim, 2, m);
        let t: f64 = master.random_range(0.3..=1.0);
        let r = master.random_range(1..=ds.m());
        let max_k = feasible_k_range(&ds, r, t);

        // Constructive direction: a witness exists exactly at the bound.
        let witness = construct_feasible(&ds, max_k, r, t)
            .unwrap_or_else(|e| panic!("instance {i}: witness failed at the bound: {e}"));
        assert!(
            is_rt_accordant(&witness.assignment, &ds, r, t),
            "instance {i}"
        );

        // Oracle agreement at the bound and one past it.
        if max_k <= ds.n() {
            let at_bound = optimal_accordant(&ds, max_k, r, t).unwrap();
            assert!(
                matches!(at_bound, OracleOutcome::Optimal(_)),
                "instance {i}: oracle disagrees at k = {max_k}"
            );
        }
        let past_bound = optimal_accordant(&ds, max_k + 1, r, t).unwrap();
        assert!(
            matches!(past_bound, OracleOutcome::Infeasible),
            "instance {i}: oracle found a clustering past the bound"
        );
    }
    println!(
        "acceptance 03 feasibility-bound: PASS | {instances}/{instances} instances agree \
         in both directions"
    );
}

#[test]
fn a04_near_optimality_against_the_oracle() {
    let started = Instant::now();
    let mut master = ChaCha8Rng::seed_from_u64(0xC4);
    let instances = 100;
    let mut within = 0usize;
    let mut worst_gap: f64 = 0.0;
    for i in 0..instances {
        let n = master.random_range(6..=10);
        let offset: f64 = master.random_range(2.0..8.0);
        let mut points = Vec::with_capacity(n * 2);
        for j in 0..n {
            let cx = if j % 2 == 0 { 0.0 } else { offset };
            points.push(cx + master.random_range(-1.0..1.0));
            points.push(master.random_range(-1.0..1.0));
        }
        let groups: Vec<usize> = (0..n)
            .map(|j| if j < 2 { j } else { master.random_range(0..2) })
            .collect();
        let ds = GroupedDataset::new(points, 2, groups).unwrap();

        let params = AccordanceParams::new(2, 1, 0.8)
            .with_restarts(50)
            .with_seed(master.random());
        let fit =
            akmeans_restarts(&ds, &params, &mut ChaCha8Rng::seed_from_u64(params.seed)).unwrap();
        let optimal = match optimal_accordant(&ds, 2, 1, 0.8).unwrap() {
            OracleOutcome::Optimal(sol) => sol,
            OracleOutcome::Infeasible => panic!("instance {i} unexpectedly infeasible"),
        };
        assert!(
            fit.sse >= optimal.sse - TRACE_SLACK,
            "instance {i}: heuristic {} beat the exhaustive optimum {}",
            fit.sse,
            optimal.sse
        );
        let gap = if optimal.sse > 0.0 {
            (fit.sse - optimal.sse) / optimal.sse
        } else {
            0.0
        };
        worst_gap = worst_gap.max(gap);
        if gap <= 0.05 {
            within += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(
        within >= 90,
        "only {within}/{instances} within 5% of the optimum"
    );
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "took {elapsed:?}, budget is 5 min"
    );
    println!(
        "acceptance 04 near-optimality: PASS | {within}/{instances} within 5% \
         (worst gap {worst_gap:.4}), {:.1}s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn a05_zero_threshold_reduces_to_baseline_kmeans_exactly() {
    let ds = iris();
    let params = AccordanceParams::new(3, 1, 0.0);
    for seed in 0..50u64 {
        let akm = akmeans_fit(&ds, &params, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let km = kmeans_fit(
            &ds,
            3,
            &params.controls(),
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap();
        assert_eq!(
            akm.assignment, km.assignment,
            "seed {seed}: assignments differ"
        );
        assert_eq!(akm.sse_trace, km.sse_trace, "seed {seed}: traces differ");
    }
    println!(
        "acceptance 05 degenerate-reduction: PASS | 50/50 seeds bitwise identical to the baseline"
    );
}

#[test]
fn a06_trivially_satisfied_constraint_returns_the_baseline_output() {
    let ds = iris();
    let controls = RunControls::default();
    let params = AccordanceParams::new(3, 1, 0.2);
    let mut qualifying = 0usize;
    for seed in 0..50u64 {
        let baseline = kmeans_fit(&ds, 3, &controls, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        if !is_rt_accordant(&baseline.assignment, &ds, 1, 0.2) {
            continue;
        }
        qualifying += 1;
        let akm = akmeans_fit(&ds, &params, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert_eq!(
            akm.assignment, baseline.assignment,
            "seed {seed}: outputs differ although the baseline is already accordant"
        );
    }
    assert!(
        qualifying > 0,
        "no qualifying seeds; the check never engaged"
    );
    println!(
        "acceptance 06 trivially-satisfied-equivalence: PASS | {qualifying}/50 qualifying \
         seeds, all identical"
    );
}

#[test]
fn a07_convergence_speed_on_iris() {
    let ds = iris();
    let params = AccordanceParams::new(3, 1, 0.5);
    let mut fast = 0usize;
    let mut max_seen = 0usize;
    for seed in 0..100u64 {
        let fit = akmeans_fit(&ds, &params, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        max_seen = max_seen.max(fit.iterations);
        if fit.iterations < 20 {
            fast += 1;
        }
    }
    assert!(
        fast >= 90,
        "only {fast}/100 runs converged in under 20 iterations"
    );
    println!(
        "acceptance 07 convergence-speed: PASS | {fast}/100 runs under 20 iterations \
         (max {max_seen})"
    );
}

#[test]
fn a08_planted_structure_is_recovered_at_the_theoretical_rate() {
    let started = Instant::now();
    // Four planted Gaussians, center spacing 10x the standard deviation,
    // with the middle components split into two groups each.
    let spec = SynthSpec {
        components: [0.0, 10.0, 20.0, 30.0]
            .into_iter()
            .map(|x| Component {
                center: vec![x, 0.0],
                stddev: 1.0,
                count: 100,
            })
            .collect(),
        overlay: Overlay::Split {
            dim: 0,
            cuts: vec![None, Some(10.0), Some(20.0), Some(30.0)],
        },
        seed: 0x5EED,
    };
    let out = generate(&spec).unwrap();
    let ds = &out.dataset;
    let n = ds.n();
    let k = 4usize;

    // Measured cluster cores of the planted solution must reach the stated
    // size floor.
    let cores = cluster_cores(ds, &out.planted);
    let min_core = cores.cores.iter().map(Vec::len).min().unwrap();
    assert!(
        min_core as f64 >= 0.1 * n as f64,
        "smallest core has {min_core} points, need {}",
        (0.1 * n as f64).ceil()
    );
    let eps = cores.min_fraction();

    // 500 single-run trials with uniformly random center initialization.
    let params = AccordanceParams {
        init_mode: InitMode::UniformRandom,
        ..AccordanceParams::new(k, 2, 0.75)
    };
    let trials = 500usize;
    let mut hits = 0usize;
    for seed in 0..trials as u64 {
        let fit = akmeans_fit(ds, &params, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let dist = clustering_distance(&fit.assignment, &out.planted, k)
            .unwrap()
            .distance;
        if dist <= 0.05 {
            hits += 1;
        }
    }
    let observed = hits as f64 / trials as f64;
    let bound = 1.0 - (k as f64) * (-eps * k as f64).exp();
    assert!(
        observed >= bound - 0.10,
        "observed recovery rate {observed:.3} below the bound {bound:.3} - 0.10"
    );
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "took {elapsed:?}, budget is 5 min"
    );
    println!(
        "acceptance 08 planted-recovery: PASS | observed {observed:.3} vs bound {:.3} \
         (eps'={eps:.3}, min core {min_core}/{n}), {:.1}s",
        bound - 0.10,
        elapsed.as_secs_f64()
    );
}

#[test]
fn a09_matching_distance_equals_full_bijection_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x909);
    let pairs = 200;
    for _ in 0..pairs {
        let k = rng.random_range(2..=6usize);
        let n = rng.random_range(k..=30usize);
        let a: Vec<usize> = (0..n)
            .map(|i| if i < k { i } else { rng.random_range(0..k) })
            .collect();
        let b: Vec<usize> = (0..n)
            .map(|i| if i < k { i } else { rng.random_range(0..k) })
            .collect();
        let fast = clustering_distance(&a, &b, k).unwrap();
        let brute = brute_force_distance(&a, &b, k);
        assert_eq!(
            fast.distance, brute,
            "matching disagrees with k! enumeration"
        );
    }
    println!(
        "acceptance 09 matching-distance: PASS | {pairs}/{pairs} pairs match the k! enumeration"
    );
}

fn brute_force_distance(a: &[usize], b: &[usize], k: usize) -> f64 {
    fn permute(perm: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
        if at == perm.len() {
            visit(perm);
            return;
        }
        for i in at..perm.len() {
            perm.swap(at, i);
            permute(perm, at + 1, visit);
            perm.swap(at, i);
        }
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = usize::MAX;
    permute(&mut perm, 0, &mut |sigma| {
        let wrong = a
            .iter()
            .zip(b)
            .filter(|&(&ai, &bi)| sigma[ai] != bi)
            .count();
        best = best.min(wrong);
    });
    best as f64 / a.len() as f64
}

#[test]
fn a10_per_iteration_cost_scales_subquadratically() {
    let build = |n: usize| -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
        let mut points = Vec::with_capacity(n * 4);
        for i in 0..n {
            let c = (i % 5) as f64 * 12.0;
            for _ in 0..4 {
                points.push(c + rng.random_range(-1.0..1.0));
            }
        }
        let groups: Vec<usize> = (0..n).map(|i| i % 10).collect();
        GroupedDataset::new(points, 4, groups).unwrap()
    };

    // One full constrained iteration at fixed centers.
    let iteration = |ds: &Dataset, centers: &[Vec<f64>]| {
        let pm = compute_penalties(ds, centers);
        let plan = select_pairings(&pm, ds, 3, 0.8);
        let mut assignment: Vec<usize> = (0..ds.n()).map(|i| pm.nearest(i)).collect();
        for pair in &plan.pairs {
            for &p in &pair.forced {
                assignment[p] = pair.center;
            }
        }
        let _ = recompute_centers(ds, &mut assignment, centers.len(), centers);
    };

    let measure = |n: usize| -> f64 {
        let ds = build(n);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let centers = init_centers(&ds, 5, InitMode::UniformRandom, &mut rng)
            .unwrap()
            .centers(&ds);
        for _ in 0..2 {
            iteration(&ds, &centers); // warmup
        }
        let mut times: Vec<f64> = (0..20)
            .map(|_| {
                let start = Instant::now();
                iteration(&ds, &centers);
                start.elapsed().as_secs_f64()
            })
            .collect();
        times.sort_by(f64::total_cmp);
        times[times.len() / 2]
    };

    let base = measure(10_000);
    let doubled = measure(20_000);
    let ratio = doubled / base;
    assert!(
        ratio <= 3.0,
        "doubling N scaled the per-iteration median by {ratio:.2}x (> 3x)"
    );
    println!(
        "acceptance 10 complexity-sanity: PASS | median per-iteration {:.2}ms -> {:.2}ms, \
         ratio {ratio:.2} <= 3",
        base * 1e3,
        doubled * 1e3
    );
}
