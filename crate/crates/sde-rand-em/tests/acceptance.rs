//! Acceptance criteria C1-C8. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails. Thresholds are pinned below and
//! are never relaxed to make a run pass.

use sde_rand_em::config::{Command, Ladder, Settings};
use sde_rand_em::output::csv_string;
use sde_rand_em::{execute, RayonExecutor, RunConfig};
use sde_rand_em_core::{
    compare_schemes, fit_order, fit_probe, martingale_diagnostic, measure_i1, measure_i2,
    quadrature_order_experiment, run_ladder, simulate_scheme, strong_error_estimate, BrownianPath,
    DriftSpec, Executor, LadderConfig, ObservableKind, ProbeConfig, Purpose, RandomOffsets,
    RngStream, Scheme, Sequential, TestFunction, DEFAULT_ANCHOR,
};
use std::process::ExitCode;
use std::time::{Duration, Instant};

const SEED: u64 = 20_240_917;

// C1
const C1_NS: [usize; 2] = [16, 256];
const C1_DIMS: [usize; 2] = [1, 3];
const C1_SAMPLES: usize = 50;
const C1_ZERO_TOL: f64 = 1e-12;
const C1_CONST_TOL: f64 = 1e-10;
const C1_BUDGET: Duration = Duration::from_secs(5);
// C2
const C2_ALPHA: f64 = 0.3;
const C2_N: usize = 64;
const C2_SAMPLES: usize = 10_000;
const C2_SIGMAS: f64 = 4.0;
const C2_BUDGET: Duration = Duration::from_secs(10);
// C3
const C3_LOG_NS: (u32, u32) = (4, 12);
const C3_SAMPLES: usize = 2000;
const C3_RANDOMISED_BAND: (f64, f64) = (0.65, 0.95);
const C3_LEFTPOINT_BAND: (f64, f64) = (0.15, 0.5);
const C3_BUDGET: Duration = Duration::from_secs(60);
// C4
const C4_ALPHA: f64 = 0.3;
const C4_LOG_NS: (u32, u32) = (4, 9);
const C4_NREF: usize = 1 << 13;
const C4_SAMPLES: usize = 500;
const C4_MIN_SLOPE: f64 = 0.6;
const C4_MIN_R2: f64 = 0.95;
const C4_BUDGET_SEQUENTIAL: Duration = Duration::from_secs(600);
const C4_BUDGET_PARALLEL: Duration = Duration::from_secs(120);
const C4_WORKERS: usize = 8;
// C5
const C5_ALPHA: f64 = 0.25;
const C5_MIN_GAP: f64 = 0.2;
const C5_MAX_STANDARD: f64 = 0.45;
const C5_BUDGET: Duration = Duration::from_secs(1200);
// C6
const C6_ALPHA: f64 = 0.25;
const C6_NS: [usize; 3] = [64, 128, 256];
const C6_Q: usize = 16;
const C6_SAMPLES: usize = 200;
const C6_MIN_SLOPE: f64 = 0.5;
const C6_BUDGET: Duration = Duration::from_secs(600);

struct Verdict {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn dyadic(range: (u32, u32)) -> Vec<usize> {
    (range.0..=range.1).map(|k| 1usize << k).collect()
}

fn product(alpha: f64) -> DriftSpec {
    DriftSpec::product(alpha, 1.0, 1.0, 1).expect("valid drift")
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

/// Strong error of either scheme against `x0 + c t + B(t)` at the nodes.
fn constant_drift_error(c: &[f64], n: usize, scheme: Scheme) -> f64 {
    let drift = DriftSpec::constant(c.to_vec()).expect("valid drift");
    let d = c.len();
    let x0: Vec<f64> = (0..d).map(|l| 0.5 - l as f64).collect();
    let mut acc = 0.0;
    for m in 0..C1_SAMPLES {
        let s = RngStream::new(SEED).child(m as u64);
        let path = BrownianPath::sample(n, d, &s.purpose(Purpose::Brownian)).expect("path");
        let tau = RandomOffsets::sample(n, &s.purpose(Purpose::Offsets)).expect("offsets");
        let traj = simulate_scheme(scheme, &drift, &path, &tau, &x0).expect("simulation");
        let mut worst = 0.0f64;
        for j in 0..=n {
            let t = j as f64 / n as f64;
            let dist2: f64 = (0..d)
                .map(|l| {
                    let exact = x0[l] + c[l] * t + path.position(j)[l];
                    (traj.state(j)[l] - exact).powi(2)
                })
                .sum();
            worst = worst.max(dist2.sqrt());
        }
        acc += worst * worst;
    }
    (acc / C1_SAMPLES as f64).sqrt()
}

fn c1() -> Verdict {
    let start = Instant::now();
    let mut zero_max = 0.0f64;
    let mut const_max = 0.0f64;
    for d in C1_DIMS {
        for n in C1_NS {
            for scheme in [Scheme::RandomisedEm, Scheme::StandardEm] {
                let zero = DriftSpec::zero(d).expect("valid drift");
                let (e, _) = strong_error_estimate(
                    &zero,
                    scheme,
                    n,
                    16 * n,
                    C1_SAMPLES,
                    2.0,
                    SEED,
                    &Sequential,
                )
                .expect("zero-drift ladder");
                zero_max = zero_max.max(e);
                let c: Vec<f64> = [0.7, -0.4, 0.25][..d].to_vec();
                const_max = const_max.max(constant_drift_error(&c, n, scheme));
            }
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        id: "C1",
        title: "exactness oracles",
        pass: zero_max < C1_ZERO_TOL && const_max < C1_CONST_TOL && elapsed < C1_BUDGET,
        detail: format!(
            "zero-drift max {zero_max:.3e} (< {C1_ZERO_TOL:e}), constant-drift max {const_max:.3e} (< {C1_CONST_TOL:e}), {} (< {})",
            secs(elapsed),
            secs(C1_BUDGET)
        ),
    }
}

fn c2(exec: &RayonExecutor) -> Verdict {
    let start = Instant::now();
    let g = TestFunction::power(DEFAULT_ANCHOR, C2_ALPHA);
    let report = martingale_diagnostic(&g, C2_N, C2_SAMPLES, &RngStream::new(SEED), exec)
        .expect("diagnostic");
    let elapsed = start.elapsed();
    let worst = report
        .steps
        .iter()
        .map(|s| {
            if s.std_error > 0.0 {
                s.mean.abs() / s.std_error
            } else {
                0.0
            }
        })
        .fold(0.0f64, f64::max);
    let terminal_z =
        (report.terminal_mean - report.terminal_truth).abs() / report.terminal_std_error;
    Verdict {
        id: "C2",
        title: "quadrature unbiasedness and martingale increments",
        pass: report.flagged() == 0 && terminal_z <= C2_SIGMAS && elapsed < C2_BUDGET,
        detail: format!(
            "{} of {C2_N} steps flagged (worst |mean|/se {worst:.2}), terminal |E Q - I|/se {terminal_z:.2} (<= {C2_SIGMAS}), {} (< {})",
            report.flagged(),
            secs(elapsed),
            secs(C2_BUDGET)
        ),
    }
}

fn in_band(x: f64, band: (f64, f64)) -> bool {
    band.0 <= x && x <= band.1
}

fn c3(exec: &RayonExecutor) -> Verdict {
    let start = Instant::now();
    let g = TestFunction::power(DEFAULT_ANCHOR, C2_ALPHA);
    let report = quadrature_order_experiment(
        &g,
        &dyadic(C3_LOG_NS),
        C3_SAMPLES,
        2.0,
        &RngStream::new(SEED),
        exec,
    )
    .expect("quadrature ladder");
    let elapsed = start.elapsed();
    let r = report.randomised_fit.slope;
    let l = report.leftpoint_fit.slope;
    Verdict {
        id: "C3",
        title: "quadrature order gap",
        pass: in_band(r, C3_RANDOMISED_BAND) && in_band(l, C3_LEFTPOINT_BAND) && elapsed < C3_BUDGET,
        detail: format!(
            "randomised RMS slope {r:.3} (in [{}, {}]), left-point slope {l:.3} (in [{}, {}]), {} (< {})",
            C3_RANDOMISED_BAND.0,
            C3_RANDOMISED_BAND.1,
            C3_LEFTPOINT_BAND.0,
            C3_LEFTPOINT_BAND.1,
            secs(elapsed),
            secs(C3_BUDGET)
        ),
    }
}

fn c4_config() -> LadderConfig {
    let mut cfg = LadderConfig::new(product(C4_ALPHA), dyadic(C4_LOG_NS), C4_SAMPLES, SEED);
    cfg.n_ref = C4_NREF;
    cfg
}

fn c4(excursions: &mut Vec<(&'static str, f64)>) -> Verdict {
    let cfg = c4_config();
    let start = Instant::now();
    let ladder = run_ladder(&cfg, Scheme::RandomisedEm, &Sequential).expect("ladder");
    let sequential = start.elapsed();
    let par = RayonExecutor::new(C4_WORKERS).expect("pool");
    let start = Instant::now();
    let again = run_ladder(&cfg, Scheme::RandomisedEm, &par).expect("ladder");
    let parallel = start.elapsed();
    excursions.push((
        "C4",
        ladder.max_drift_excursion.max(again.max_drift_excursion),
    ));
    let fit = fit_order(&ladder).expect("fit");
    Verdict {
        id: "C4",
        title: "randomised EM slope band",
        pass: fit.slope >= C4_MIN_SLOPE
            && fit.r_squared >= C4_MIN_R2
            && sequential < C4_BUDGET_SEQUENTIAL
            && parallel < C4_BUDGET_PARALLEL
            && ladder == again,
        detail: format!(
            "slope {:.3} (>= {C4_MIN_SLOPE}), r^2 {:.4} (>= {C4_MIN_R2}), 1 worker {} (< {}), {C4_WORKERS} workers {} (< {})",
            fit.slope,
            fit.r_squared,
            secs(sequential),
            secs(C4_BUDGET_SEQUENTIAL),
            secs(parallel),
            secs(C4_BUDGET_PARALLEL)
        ),
    }
}

fn c5(excursions: &mut Vec<(&'static str, f64)>) -> Verdict {
    let mut cfg = LadderConfig::new(product(C5_ALPHA), dyadic(C4_LOG_NS), C4_SAMPLES, SEED);
    cfg.n_ref = C4_NREF;
    let start = Instant::now();
    let cmp = compare_schemes(&cfg, &Sequential).expect("comparison");
    let elapsed = start.elapsed();
    excursions.push(("C5", cmp.randomised.max_drift_excursion));
    let gap = cmp.slope_gap();
    let standard = cmp.standard_fit.slope;
    Verdict {
        id: "C5",
        title: "scheme gap",
        pass: gap >= C5_MIN_GAP && standard <= C5_MAX_STANDARD && elapsed < C5_BUDGET,
        detail: format!(
            "randomised slope {:.3}, standard slope {standard:.3} (<= {C5_MAX_STANDARD}), gap {gap:.3} (>= {C5_MIN_GAP}), {} (< {})",
            cmp.randomised_fit.slope,
            secs(elapsed),
            secs(C5_BUDGET)
        ),
    }
}

fn c6(exec: &RayonExecutor, excursions: &mut Vec<(&'static str, f64)>) -> Verdict {
    let mut cfg = ProbeConfig::new(product(C6_ALPHA), C6_NS.to_vec(), C6_SAMPLES, SEED);
    cfg.q = C6_Q;
    let start = Instant::now();
    let i1 = measure_i1(&cfg, exec).expect("first probe");
    let i2 = measure_i2(&cfg, ObservableKind::SmoothDecay, exec).expect("second probe");
    let elapsed = start.elapsed();
    excursions.push((
        "C6",
        i1.iter()
            .chain(&i2)
            .fold(0.0f64, |a, r| a.max(r.max_drift_excursion)),
    ));
    let decreasing =
        |r: &[sde_rand_em_core::IProbeResult]| r.windows(2).all(|w| w[1].estimate < w[0].estimate);
    let s1 = fit_probe(&i1).expect("fit").slope;
    let s2 = fit_probe(&i2).expect("fit").slope;
    let values = |r: &[sde_rand_em_core::IProbeResult]| {
        r.iter()
            .map(|x| format!("{:.3e}", x.estimate))
            .collect::<Vec<_>>()
            .join(" > ")
    };
    Verdict {
        id: "C6",
        title: "probe decay",
        pass: decreasing(&i1)
            && decreasing(&i2)
            && s1 >= C6_MIN_SLOPE
            && s2 >= C6_MIN_SLOPE
            && elapsed < C6_BUDGET,
        detail: format!(
            "I1 {} slope {s1:.3}, I2 {} slope {s2:.3} (>= {C6_MIN_SLOPE}), {} (< {})",
            values(&i1),
            values(&i2),
            secs(elapsed),
            secs(C6_BUDGET)
        ),
    }
}

fn c7() -> Verdict {
    let csv_at = |workers: usize| -> String {
        let settings = Settings {
            family: Some("product".into()),
            alpha: Some(C4_ALPHA),
            beta: Some(1.0),
            k: Some(1.0),
            d: Some(1),
            scheme: Some("randomised".into()),
            ns: Some(Ladder(dyadic(C4_LOG_NS))),
            nref: Some(C4_NREF),
            samples: Some(C4_SAMPLES),
            p: Some(2.0),
            seed: Some(SEED),
            workers: Some(workers),
            ..Settings::default()
        };
        let cfg = RunConfig::resolve(Command::Converge, settings).expect("config");
        csv_string(&execute(&cfg).expect("run").rows).expect("csv")
    };
    let one = csv_at(1);
    let eight = csv_at(8);
    Verdict {
        id: "C7",
        title: "determinism across worker counts",
        pass: one == eight && one.lines().count() == 1 + dyadic(C4_LOG_NS).len(),
        detail: format!(
            "1-worker and 8-worker CSVs {} ({} bytes)",
            if one == eight {
                "byte-identical"
            } else {
                "differ"
            },
            one.len()
        ),
    }
}

fn c8(excursions: &[(&'static str, f64)]) -> Verdict {
    let k = 1.0;
    let pass = excursions.len() == 3 && excursions.iter().all(|(_, e)| *e <= k);
    Verdict {
        id: "C8",
        title: "drift excursion bound",
        pass,
        detail: format!(
            "max |X_j - x0 - B(t_j)| per run: {} (<= K = {k}, zero tolerance)",
            excursions
                .iter()
                .map(|(id, e)| format!("{id} {e:.6}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

type Criterion<'a> = Box<dyn FnOnce(&mut Vec<(&'static str, f64)>) -> Verdict + 'a>;

fn main() -> ExitCode {
    let exec = RayonExecutor::new(std::thread::available_parallelism().map_or(1, |n| n.get()))
        .expect("pool");
    println!("acceptance: {} worker(s) available", exec.workers());
    let mut excursions = Vec::new();
    let runs: Vec<Criterion<'_>> = vec![
        Box::new(|_| c1()),
        Box::new(|_| c2(&exec)),
        Box::new(|_| c3(&exec)),
        Box::new(c4),
        Box::new(c5),
        Box::new(|e| c6(&exec, e)),
        Box::new(|_| c7()),
    ];
    let mut verdicts = Vec::new();
    for run in runs {
        let v = run(&mut excursions);
        report(&v);
        verdicts.push(v);
    }
    let v = c8(&excursions);
    report(&v);
    verdicts.push(v);
    let passed = verdicts.iter().filter(|v| v.pass).count();
    println!("acceptance: {passed}/{} criteria passed", verdicts.len());
    if passed == verdicts.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn report(v: &Verdict) {
    println!(
        "{} {} {}: {}",
        if v.pass { "PASS" } else { "FAIL" },
        v.id,
        v.title,
        v.detail
    );
}
