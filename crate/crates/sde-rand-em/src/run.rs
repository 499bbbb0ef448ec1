//! Command orchestration: compute a [`Report`], then write it once.

use crate::config::{Command, RunConfig};
use crate::error::{CliError, EXIT_BAND, EXIT_OK};
use crate::exec::RayonExecutor;
use crate::output::{csv_string, write_file, CsvRow, Summary};
use crate::plot::{loglog_svg, Series};
use crate::selftest;
use sde_rand_em_core::{
    compare_schemes, fit_order, fit_probe, martingale_diagnostic, measure_i1, measure_i2,
    quadrature_order_experiment, run_ladder, ErrorLadder, FitStatus, IProbeResult, OrderFit,
    RngStream, Scheme, TestFunction, SLOPE_BAND_SLACK,
};
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything a command produces, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: Command,
    pub rows: Vec<CsvRow>,
    pub summary: Summary,
    pub svg: Option<String>,
    pub bands_pass: bool,
}

/// `pass`, `fail` or `degenerate-zero` for a predicted slope.
pub fn band_verdict(fit: &OrderFit, predicted: f64) -> &'static str {
    match fit.status {
        FitStatus::DegenerateZero => "degenerate-zero",
        FitStatus::NonPositive => "fail",
        FitStatus::Ok if fit.contains_prediction(predicted) => "pass",
        FitStatus::Ok => "fail",
    }
}

fn push_fit(s: &mut Summary, tag: &str, fit: &OrderFit, predicted: Option<f64>) -> bool {
    s.push(format!("fit.{tag}.status"), fit.status.label());
    s.push(format!("fit.{tag}.slope"), format!("{:.6}", fit.slope));
    s.push(
        format!("fit.{tag}.slope_std_error"),
        format!("{:.6}", fit.slope_std_error),
    );
    s.push(
        format!("fit.{tag}.intercept"),
        format!("{:.6}", fit.intercept),
    );
    s.push(
        format!("fit.{tag}.r_squared"),
        format!("{:.6}", fit.r_squared),
    );
    let Some(pred) = predicted else {
        s.push(format!("band.{tag}"), "n/a");
        return true;
    };
    let verdict = band_verdict(fit, pred);
    s.push(format!("predicted.{tag}"), format!("{pred:.6}"));
    s.push(
        format!("band.{tag}.interval"),
        format!(
            "[{:.6}, {:.6}]",
            fit.slope - 3.0 * fit.slope_std_error,
            fit.slope + 3.0 * fit.slope_std_error + SLOPE_BAND_SLACK
        ),
    );
    s.push(format!("band.{tag}"), verdict);
    verdict != "fail"
}

fn band_rule(s: &mut Summary) {
    s.push(
        "band.rule",
        format!("predicted slope within [slope - 3 se, slope + 3 se + {SLOPE_BAND_SLACK}]; the slack stands in for the unestimable epsilon and pre-asymptotic bias"),
    );
}

fn ladder_rows(ladder: &ErrorLadder) -> Vec<CsvRow> {
    ladder
        .points
        .iter()
        .map(|p| CsvRow {
            n: p.n,
            scheme: ladder.scheme.name().to_string(),
            p: ladder.p,
            estimate: p.estimate,
            std_error: p.std_error,
            samples: ladder.samples,
            master_seed: ladder.master_seed,
        })
        .collect()
}

fn probe_rows(tag: &str, results: &[IProbeResult], seed: u64) -> Vec<CsvRow> {
    results
        .iter()
        .map(|r| CsvRow {
            n: r.n,
            scheme: tag.to_string(),
            p: r.p,
            estimate: r.estimate,
            std_error: r.std_error,
            samples: r.samples,
            master_seed: seed,
        })
        .collect()
}

fn points(rows: &[CsvRow], scheme: &str) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| r.scheme == scheme)
        .map(|r| (r.n as f64, r.estimate))
        .collect()
}

fn excursion_lines(s: &mut Summary, excursion: f64, k: f64) {
    s.push("drift_excursion.max", format!("{excursion:.17e}"));
    s.push("drift_excursion.bound", format!("{k:?}"));
    s.push("drift_excursion.within_bound", excursion <= k);
}

fn monotone_line(s: &mut Summary, tag: &str, rows: &[CsvRow]) {
    let est: Vec<f64> = rows
        .iter()
        .filter(|r| r.scheme == tag)
        .map(|r| r.estimate)
        .collect();
    s.push(
        format!("monotone.{tag}"),
        est.windows(2).all(|w| w[1] < w[0]),
    );
}

fn executor(cfg: &RunConfig) -> Result<RayonExecutor, CliError> {
    RayonExecutor::new(cfg.workers).map_err(|e| CliError::config("workers", e.to_string()))
}

/// Run the configured command without writing anything.
pub fn execute(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut s = Summary::default();
    s.push("command", cfg.command);
    s.push("version", VERSION);
    for (k, v) in cfg.echo_lines() {
        s.push(k, v);
    }
    match cfg.command {
        Command::Converge => converge(cfg, s),
        Command::Compare => compare(cfg, s),
        Command::Quadrature => quadrature(cfg, s),
        Command::Iprobe => iprobe(cfg, s),
        Command::Selftest => Ok(selftest_report(s)),
    }
}

fn converge(cfg: &RunConfig, mut s: Summary) -> Result<Report, CliError> {
    let drift = cfg.drift()?;
    let exec = executor(cfg)?;
    let ladder = run_ladder(&cfg.ladder_config(drift), cfg.scheme, &exec)?;
    let fit = fit_order(&ladder)?;
    let rows = ladder_rows(&ladder);
    let tag = cfg.scheme.name();
    band_rule(&mut s);
    let ok = push_fit(
        &mut s,
        tag,
        &fit,
        Some(cfg.scheme.predicted_order(cfg.alpha, cfg.beta)),
    );
    monotone_line(&mut s, tag, &rows);
    excursion_lines(&mut s, ladder.max_drift_excursion, cfg.k);
    let svg = cfg.svg.then(|| {
        loglog_svg(
            &format!("strong error, {} drift", cfg.family),
            &format!("L{} strong error", cfg.p),
            &[Series {
                label: tag,
                points: points(&rows, tag),
                fit: Some(&fit),
            }],
        )
    });
    Ok(Report {
        command: cfg.command,
        rows,
        summary: s,
        svg,
        bands_pass: ok,
    })
}

fn compare(cfg: &RunConfig, mut s: Summary) -> Result<Report, CliError> {
    let drift = cfg.drift()?;
    let exec = executor(cfg)?;
    let cmp = compare_schemes(&cfg.ladder_config(drift), &exec)?;
    let mut rows = ladder_rows(&cmp.randomised);
    rows.extend(ladder_rows(&cmp.standard));
    band_rule(&mut s);
    let pr = Scheme::RandomisedEm.predicted_order(cfg.alpha, cfg.beta);
    let ps = Scheme::StandardEm.predicted_order(cfg.alpha, cfg.beta);
    let ok_r = push_fit(&mut s, "randomised", &cmp.randomised_fit, Some(pr));
    let ok_s = push_fit(&mut s, "standard", &cmp.standard_fit, Some(ps));
    s.push("slope_gap", format!("{:.6}", cmp.slope_gap()));
    s.push("predicted.slope_gap", format!("{:.6}", pr - ps));
    monotone_line(&mut s, "randomised", &rows);
    monotone_line(&mut s, "standard", &rows);
    excursion_lines(&mut s, cmp.randomised.max_drift_excursion, cfg.k);
    let svg = cfg.svg.then(|| {
        loglog_svg(
            &format!("scheme comparison, {} drift", cfg.family),
            &format!("L{} strong error", cfg.p),
            &[
                Series {
                    label: "randomised",
                    points: points(&rows, "randomised"),
                    fit: Some(&cmp.randomised_fit),
                },
                Series {
                    label: "standard",
                    points: points(&rows, "standard"),
                    fit: Some(&cmp.standard_fit),
                },
            ],
        )
    });
    Ok(Report {
        command: cfg.command,
        rows,
        summary: s,
        svg,
        bands_pass: ok_r && ok_s,
    })
}

fn quadrature(cfg: &RunConfig, mut s: Summary) -> Result<Report, CliError> {
    let g = cfg.test_function()?;
    let exec = executor(cfg)?;
    let stream = RngStream::new(cfg.seed);
    let report = quadrature_order_experiment(&g, &cfg.ns, cfg.samples, cfg.p, &stream, &exec)?;
    let mut rows = Vec::new();
    for pt in &report.points {
        let base = CsvRow {
            n: pt.n,
            scheme: String::new(),
            p: cfg.p,
            estimate: 0.0,
            std_error: 0.0,
            samples: cfg.samples,
            master_seed: cfg.seed,
        };
        rows.push(CsvRow {
            scheme: "randomised".into(),
            estimate: pt.randomised,
            std_error: pt.randomised_std_error,
            ..base.clone()
        });
        rows.push(CsvRow {
            scheme: "leftpoint".into(),
            estimate: pt.leftpoint,
            samples: 1,
            ..base
        });
    }
    let rough = matches!(
        g,
        TestFunction::Power { .. } | TestFunction::Weierstrass { .. }
    );
    s.push("function", &report.function);
    band_rule(&mut s);
    let ok_r = push_fit(
        &mut s,
        "randomised",
        &report.randomised_fit,
        rough.then_some(0.5 + cfg.alpha),
    );
    let ok_l = push_fit(
        &mut s,
        "leftpoint",
        &report.leftpoint_fit,
        rough.then_some(cfg.alpha),
    );
    let n_mart = cfg.ns[0];
    let mart = martingale_diagnostic(&g, n_mart, cfg.samples, &stream, &exec)?;
    s.push("martingale.n", n_mart);
    s.push("martingale.flagged_steps", mart.flagged());
    s.push(
        "martingale.terminal_mean",
        format!("{:.17e}", mart.terminal_mean),
    );
    s.push(
        "martingale.terminal_std_error",
        format!("{:.17e}", mart.terminal_std_error),
    );
    s.push(
        "martingale.terminal_truth",
        format!("{:.17e}", mart.terminal_truth),
    );
    s.push("martingale.terminal_unbiased", mart.terminal_unbiased());
    let svg = cfg.svg.then(|| {
        loglog_svg(
            &format!("quadrature of {}", report.function),
            &format!("L{} error at t = 1", cfg.p),
            &[
                Series {
                    label: "randomised",
                    points: points(&rows, "randomised"),
                    fit: Some(&report.randomised_fit),
                },
                Series {
                    label: "leftpoint",
                    points: points(&rows, "leftpoint"),
                    fit: Some(&report.leftpoint_fit),
                },
            ],
        )
    });
    let ok = ok_r && ok_l && mart.flagged() == 0 && mart.terminal_unbiased();
    Ok(Report {
        command: cfg.command,
        rows,
        summary: s,
        svg,
        bands_pass: ok,
    })
}

fn iprobe(cfg: &RunConfig, mut s: Summary) -> Result<Report, CliError> {
    let drift = cfg.drift()?;
    let exec = executor(cfg)?;
    let probe = cfg.probe_config(drift.clone());
    let i1 = measure_i1(&probe, &exec)?;
    let i2 = measure_i2(&probe, cfg.observable, &exec)?;
    let tag2 = format!("i2-{}", cfg.observable);
    let mut rows = probe_rows("i1", &i1, cfg.seed);
    rows.extend(probe_rows(&tag2, &i2, cfg.seed));
    let f1 = fit_probe(&i1)?;
    let f2 = fit_probe(&i2)?;
    let pred = 0.5 + drift.gamma();
    band_rule(&mut s);
    let ok1 = push_fit(&mut s, "i1", &f1, Some(pred));
    let ok2 = push_fit(&mut s, &tag2, &f2, Some(pred));
    monotone_line(&mut s, "i1", &rows);
    monotone_line(&mut s, &tag2, &rows);
    let excursion = i1
        .iter()
        .chain(&i2)
        .fold(0.0f64, |a, r| a.max(r.max_drift_excursion));
    excursion_lines(&mut s, excursion, cfg.k);
    let svg = cfg.svg.then(|| {
        loglog_svg(
            &format!("quadrature-error probes, {} drift", cfg.family),
            &format!("L{} norm of sup", cfg.p),
            &[
                Series {
                    label: "i1",
                    points: points(&rows, "i1"),
                    fit: Some(&f1),
                },
                Series {
                    label: &tag2,
                    points: points(&rows, &tag2),
                    fit: Some(&f2),
                },
            ],
        )
    });
    Ok(Report {
        command: cfg.command,
        rows,
        summary: s,
        svg,
        bands_pass: ok1 && ok2,
    })
}

fn selftest_report(mut s: Summary) -> Report {
    let results = selftest::run_all();
    let passed = results.iter().filter(|r| r.passed).count();
    for r in &results {
        s.push(
            format!("check.{}", r.name),
            if r.passed { "pass" } else { "fail" },
        );
    }
    s.push("passed", format!("{passed}/{}", results.len()));
    Report {
        command: Command::Selftest,
        rows: Vec::new(),
        summary: s,
        svg: None,
        bands_pass: passed == results.len(),
    }
}

/// Files written by [`write_report`].
#[derive(Debug, Clone)]
pub struct Written {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub config: PathBuf,
    pub svg: Option<PathBuf>,
}

/// Write CSV, summary, config echo and (optionally) the plot into `cfg.out`.
pub fn write_report(cfg: &RunConfig, report: &Report) -> Result<Written, CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    let stem = report.command.name();
    let csv = cfg.out.join(format!("{stem}.csv"));
    write_file(&csv, csv_string(&report.rows)?.as_bytes())?;
    let config = cfg.out.join(format!("{stem}_config.toml"));
    let echo =
        toml::to_string(&cfg.echo()).map_err(|e| CliError::config("config", e.to_string()))?;
    write_file(&config, echo.as_bytes())?;
    let summary = cfg.out.join(format!("{stem}_summary.txt"));
    write_file(&summary, report.summary.render().as_bytes())?;
    let svg = match &report.svg {
        Some(text) => {
            let path = cfg.out.join(format!("{stem}.svg"));
            write_file(&path, text.as_bytes())?;
            Some(path)
        }
        None => None,
    };
    Ok(Written {
        csv,
        summary,
        config,
        svg,
    })
}

/// Execute, write, print the summary and return the exit status.
pub fn run(cfg: &RunConfig) -> Result<i32, CliError> {
    let start = Instant::now();
    let mut report = execute(cfg)?;
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    report.summary.push(
        "wall_clock_seconds",
        format!("{:.3}", start.elapsed().as_secs_f64()),
    );
    report.summary.push("timestamp", timestamp);
    if cfg.command != Command::Selftest {
        let written = write_report(cfg, &report)?;
        report.summary.push("output.csv", written.csv.display());
        report
            .summary
            .push("output.summary", written.summary.display());
        if let Some(svg) = written.svg {
            report.summary.push("output.svg", svg.display());
        }
    }
    print!("{}", report.summary.render());
    let status = if cfg.command == Command::Selftest || cfg.strict {
        if report.bands_pass {
            EXIT_OK
        } else {
            EXIT_BAND
        }
    } else {
        EXIT_OK
    };
    Ok(status)
}
