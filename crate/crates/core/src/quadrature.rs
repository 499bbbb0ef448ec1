//! Stratified randomised Riemann quadrature of `∫_0^{j/n} g`.
//!
//! The randomised rule samples each subinterval once at a uniform offset,
//! `Q^j = (1/n) Σ_{i<j} g((i + τ_i)/n)`. Conditionally on the past, each
//! increment of the error sequence `∫_0^{j/n} g - Q^j` has mean zero, so the
//! error is a martingale in `j`. The left-point rule is the deterministic
//! comparator. Ground truth comes from closed-form antiderivatives only.

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::fit::{fit_power_law, OrderFit};
use crate::offsets::RandomOffsets;
use crate::rng::{Purpose, RngStream};
use crate::stats::{lp_norm_summary, mean, std_error};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

/// Scalar test functions of time. Every variant except `Opaque` has an exact
/// antiderivative.
#[derive(Debug, Clone)]
pub enum TestFunction {
    Constant(f64),
    /// `intercept + slope * r`.
    Affine {
        intercept: f64,
        slope: f64,
    },
    /// `scale * |r - anchor|^alpha`.
    Power {
        anchor: f64,
        alpha: f64,
        scale: f64,
    },
    /// `c_L Σ_{k≤L} 2^{-kα} cos(2^k π (r - anchor))`, bounded by one.
    Weierstrass {
        alpha: f64,
        anchor: f64,
        truncation: u32,
    },
    /// An arbitrary function; usable by the quadrature rules but not by the
    /// integral oracle.
    Opaque(fn(f64) -> f64),
}

impl TestFunction {
    pub fn power(anchor: f64, alpha: f64) -> Self {
        TestFunction::Power {
            anchor,
            alpha,
            scale: 1.0,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            TestFunction::Constant(c) => c,
            TestFunction::Affine { intercept, slope } => intercept + slope * r,
            TestFunction::Power {
                anchor,
                alpha,
                scale,
            } => scale * libm::pow(libm::fabs(r - anchor), alpha),
            TestFunction::Weierstrass {
                alpha,
                anchor,
                truncation,
            } => {
                let norm = weierstrass_norm(alpha, truncation);
                let mut acc = 0.0;
                for k in 0..=truncation {
                    let freq = libm::exp2(k as f64) * PI;
                    acc += libm::exp2(-(k as f64) * alpha) * libm::cos(freq * (r - anchor));
                }
                acc / norm
            }
            TestFunction::Opaque(g) => g(r),
        }
    }

    /// Exact `∫_0^t g`.
    pub fn integral(&self, t: f64) -> Result<f64> {
        self.interval_integral(0.0, t)
    }

    /// Exact `∫_lo^hi g`.
    pub fn interval_integral(&self, lo: f64, hi: f64) -> Result<f64> {
        Ok(match *self {
            TestFunction::Constant(c) => c * (hi - lo),
            TestFunction::Affine { intercept, slope } => {
                intercept * (hi - lo) + 0.5 * slope * (hi * hi - lo * lo)
            }
            TestFunction::Power {
                anchor,
                alpha,
                scale,
            } => {
                let prim = |r: f64| {
                    let u = r - anchor;
                    let mag = libm::pow(libm::fabs(u), 1.0 + alpha) / (1.0 + alpha);
                    if u < 0.0 {
                        -mag
                    } else {
                        mag
                    }
                };
                scale * (prim(hi) - prim(lo))
            }
            TestFunction::Weierstrass {
                alpha,
                anchor,
                truncation,
            } => {
                let mut acc = 0.0;
                for k in 0..=truncation {
                    let freq = libm::exp2(k as f64) * PI;
                    let w = libm::exp2(-(k as f64) * alpha);
                    acc += w * (libm::sin(freq * (hi - anchor)) - libm::sin(freq * (lo - anchor)))
                        / freq;
                }
                acc / weierstrass_norm(alpha, truncation)
            }
            TestFunction::Opaque(_) => {
                return Err(Error::Unsupported(
                    "opaque function has no registered antiderivative".into(),
                ))
            }
        })
    }

    /// Parse `constant`, `affine`, `power` or `weierstrass` with the given
    /// roughness parameters; unknown names are unsupported.
    pub fn from_name(name: &str, alpha: f64, anchor: f64, truncation: u32) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "constant" | "one" => Ok(TestFunction::Constant(1.0)),
            "zero" => Ok(TestFunction::Constant(0.0)),
            "affine" | "linear" => Ok(TestFunction::Affine {
                intercept: 0.0,
                slope: 1.0,
            }),
            "power" => Ok(TestFunction::power(anchor, alpha)),
            "weierstrass" => Ok(TestFunction::Weierstrass {
                alpha,
                anchor,
                truncation,
            }),
            other => Err(Error::Unsupported(format!(
                "no registered test function `{other}`"
            ))),
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            TestFunction::Constant(c) => format!("constant({c})"),
            TestFunction::Affine { intercept, slope } => format!("affine({intercept} + {slope} r)"),
            TestFunction::Power {
                anchor,
                alpha,
                scale,
            } => format!("{scale} |r - {anchor}|^{alpha}"),
            TestFunction::Weierstrass {
                alpha,
                anchor,
                truncation,
            } => format!("weierstrass(alpha={alpha}, anchor={anchor}, L={truncation})"),
            TestFunction::Opaque(_) => "opaque".into(),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

fn weierstrass_norm(alpha: f64, truncation: u32) -> f64 {
    (0..=truncation)
        .map(|k| libm::exp2(-(k as f64) * alpha))
        .sum()
}

/// `∫_0^t g` for a registered test function.
pub fn integral_oracle(g: &TestFunction, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("time {t} outside [0, 1]")));
    }
    g.integral(t)
}

/// One quadrature pass over `j = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRun {
    pub n: usize,
    /// Evaluation point used on subinterval `i`.
    pub nodes: Vec<f64>,
    /// `g(nodes[i])`.
    pub samples: Vec<f64>,
    /// `values[j] = (Σ_{i<j} samples[i]) / n`, `values[0] = 0`.
    pub values: Vec<f64>,
    /// `∫_0^{j/n} g`, once attached.
    pub truth: Option<Vec<f64>>,
}

impl QuadratureRun {
    fn from_nodes(n: usize, nodes: Vec<f64>, g: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = nodes.iter().map(|r| g(*r)).collect();
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        let mut sum = 0.0;
        for s in &samples {
            sum += s;
            values.push(sum / n as f64);
        }
        Self {
            n,
            nodes,
            samples,
            values,
            truth: None,
        }
    }

    /// Attach the exact running integral of `g`.
    pub fn with_truth(mut self, g: &TestFunction) -> Result<Self> {
        let truth = (0..=self.n)
            .map(|j| g.integral(j as f64 / self.n as f64))
            .collect::<Result<Vec<_>>>()?;
        self.truth = Some(truth);
        Ok(self)
    }

    /// `truth[j] - values[j]`; `None` until truth is attached.
    pub fn error_process(&self) -> Option<Vec<f64>> {
        self.truth
            .as_ref()
            .map(|t| t.iter().zip(&self.values).map(|(a, b)| a - b).collect())
    }
}

/// Randomised rule with zero-based offsets: subinterval `i` is sampled at
/// `(i + taus[i]) / n`.
pub fn randomised_quadrature(
    g: impl Fn(f64) -> f64,
    n: usize,
    offsets: &RandomOffsets,
) -> Result<QuadratureRun> {
    if n == 0 {
        return Err(Error::Argument("resolution must be at least 1".into()));
    }
    if offsets.len() < n {
        return Err(Error::Length {
            needed: n,
            available: offsets.len(),
        });
    }
    let nodes = (0..n)
        .map(|i| (i as f64 + offsets.taus()[i]) / n as f64)
        .collect();
    Ok(QuadratureRun::from_nodes(n, nodes, g))
}

/// Deterministic left-point rule.
pub fn leftpoint_quadrature(g: impl Fn(f64) -> f64, n: usize) -> Result<QuadratureRun> {
    if n == 0 {
        return Err(Error::Argument("resolution must be at least 1".into()));
    }
    let nodes = (0..n).map(|i| i as f64 / n as f64).collect();
    Ok(QuadratureRun::from_nodes(n, nodes, g))
}

/// Per-step statistics of the error increments `E^j - E^{j-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStat {
    pub step: usize,
    pub mean: f64,
    pub std_error: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleReport {
    pub n: usize,
    pub samples: usize,
    pub steps: Vec<StepStat>,
    /// Sample mean and standard error of `Q^n`.
    pub terminal_mean: f64,
    pub terminal_std_error: f64,
    /// `∫_0^1 g`.
    pub terminal_truth: f64,
}

/// Flag threshold in standard errors.
pub const FLAG_SIGMAS: f64 = 4.0;

impl MartingaleReport {
    pub fn flagged(&self) -> usize {
        self.steps.iter().filter(|s| s.flagged).count()
    }

    /// `|E[Q^n] - ∫g| ≤ 4 SE`.
    pub fn terminal_unbiased(&self) -> bool {
        let rounding = (self.n + self.samples) as f64
            * f64::EPSILON
            * (libm::fabs(self.terminal_truth) + libm::fabs(self.terminal_mean));
        libm::fabs(self.terminal_mean - self.terminal_truth)
            <= FLAG_SIGMAS * self.terminal_std_error + rounding
    }
}

fn offsets_for(stream: &RngStream, sample: usize, n: usize) -> Result<RandomOffsets> {
    RandomOffsets::sample(
        n,
        &stream
            .child(sample as u64)
            .purpose(Purpose::Offsets)
            .child(n as u64),
    )
}

/// Monte Carlo check that the error increments have zero conditional mean.
///
/// Increment `j` is `∫_{t_{j-1}}^{t_j} g - g(node)/n`; a step is flagged when
/// its sample mean is more than four standard errors from zero.
pub fn martingale_diagnostic<E: Executor>(
    g: &TestFunction,
    n: usize,
    samples: usize,
    stream: &RngStream,
    exec: &E,
) -> Result<MartingaleReport> {
    if samples < 100 {
        return Err(Error::config("samples", format!("{samples} < 100")));
    }
    if n == 0 {
        return Err(Error::config("n", "resolution must be at least 1"));
    }
    let exact: Vec<f64> = (0..n)
        .map(|j| g.interval_integral(j as f64 / n as f64, (j + 1) as f64 / n as f64))
        .collect::<Result<_>>()?;
    let terminal_truth = g.integral(1.0)?;
    let runs = exec.map_indexed(samples, |m| -> Result<(Vec<f64>, f64)> {
        let run = randomised_quadrature(|r| g.eval(r), n, &offsets_for(stream, m, n)?)?;
        let incs = exact
            .iter()
            .zip(&run.samples)
            .map(|(e, s)| e - s / n as f64)
            .collect();
        Ok((incs, run.values[n]))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let mut column = Vec::with_capacity(samples);
    let steps = (0..n)
        .map(|j| {
            column.clear();
            column.extend(runs.iter().map(|(incs, _)| incs[j]));
            let mu = mean(&column);
            let se = std_error(&column);
            StepStat {
                step: j + 1,
                mean: mu,
                std_error: se,
                flagged: libm::fabs(mu)
                    > FLAG_SIGMAS * se + 4.0 * f64::EPSILON * libm::fabs(exact[j]),
            }
        })
        .collect();
    let terminals: Vec<f64> = runs.iter().map(|(_, q)| *q).collect();
    Ok(MartingaleReport {
        n,
        samples,
        steps,
        terminal_mean: mean(&terminals),
        terminal_std_error: std_error(&terminals),
        terminal_truth,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureLadderPoint {
    pub n: usize,
    /// `(E|∫g - Q^n|^p)^{1/p}` over the Monte Carlo draws.
    pub randomised: f64,
    pub randomised_std_error: f64,
    /// `|∫g - L^n|` for the left-point rule.
    pub leftpoint: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureOrderReport {
    pub function: String,
    pub samples: usize,
    pub p: f64,
    pub points: Vec<QuadratureLadderPoint>,
    pub randomised_fit: OrderFit,
    pub leftpoint_fit: OrderFit,
}

/// Terminal-error ladder for both rules with log-log fits.
pub fn quadrature_order_experiment<E: Executor>(
    g: &TestFunction,
    ns: &[usize],
    samples: usize,
    p: f64,
    stream: &RngStream,
    exec: &E,
) -> Result<QuadratureOrderReport> {
    if ns.len() < 2 {
        return Err(Error::Fit(format!(
            "ladder needs several resolutions, got {}",
            ns.len()
        )));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] == 0 {
        return Err(Error::config(
            "ns",
            "resolutions must be positive and strictly ascending",
        ));
    }
    if samples < 100 {
        return Err(Error::config("samples", format!("{samples} < 100")));
    }
    if !(p >= 1.0) {
        return Err(Error::config("p", format!("{p} < 1")));
    }
    let truth = g.integral(1.0)?;
    let per_sample = exec.map_indexed(samples, |m| -> Result<Vec<f64>> {
        ns.iter()
            .map(|&n| {
                let run = randomised_quadrature(|r| g.eval(r), n, &offsets_for(stream, m, n)?)?;
                Ok(libm::pow(libm::fabs(truth - run.values[n]), p))
            })
            .collect()
    });
    let per_sample = per_sample.into_iter().collect::<Result<Vec<_>>>()?;
    let mut points = Vec::with_capacity(ns.len());
    let mut column = Vec::with_capacity(samples);
    for (k, &n) in ns.iter().enumerate() {
        column.clear();
        column.extend(per_sample.iter().map(|row| row[k]));
        let (randomised, randomised_std_error) = lp_norm_summary(&column, p);
        let left = leftpoint_quadrature(|r| g.eval(r), n)?;
        points.push(QuadratureLadderPoint {
            n,
            randomised,
            randomised_std_error,
            leftpoint: libm::fabs(truth - left.values[n]),
        });
    }
    let rand_est: Vec<f64> = points.iter().map(|p| p.randomised).collect();
    let rand_se: Vec<f64> = points.iter().map(|p| p.randomised_std_error).collect();
    let left_est: Vec<f64> = points.iter().map(|p| p.leftpoint).collect();
    Ok(QuadratureOrderReport {
        function: g.describe(),
        samples,
        p,
        randomised_fit: fit_power_law(ns, &rand_est, &rand_se)?,
        leftpoint_fit: fit_power_law(ns, &left_est, &[])?,
        points,
    })
}
