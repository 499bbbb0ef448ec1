//! Drift families with certified Hölder exponents, and the scalar observables
//! used as weights in the second quadrature-error probe.
//!
//! All families are bounded componentwise by the amplitude `K`, so vector
//! bounds in this crate are stated in the max norm over components. For
//! `d = 1` this is the absolute value.

use crate::error::{Error, Result};
use crate::rng::{Purpose, RngStream};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

/// Default time-roughness location, `1/√2`; avoids symmetric cancellation in
/// deterministic quadrature.
pub const DEFAULT_ANCHOR: f64 = core::f64::consts::FRAC_1_SQRT_2;
pub const DEFAULT_TRUNCATION: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriftFamily {
    Zero,
    Constant,
    /// `K |t - a|^α` in every component.
    TimeOnly,
    /// `K |t - a|^α |sin x_l|^β`.
    Product,
    /// `K c_L Σ_{k≤L} 2^{-kα} cos(2^k π (t - a)) |sin x_l|^β`, normalised so
    /// that the time factor is bounded by one.
    Weierstrass,
}

impl DriftFamily {
    pub const ALL: [DriftFamily; 5] = [
        DriftFamily::Zero,
        DriftFamily::Constant,
        DriftFamily::TimeOnly,
        DriftFamily::Product,
        DriftFamily::Weierstrass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DriftFamily::Zero => "zero",
            DriftFamily::Constant => "constant",
            DriftFamily::TimeOnly => "time-only",
            DriftFamily::Product => "product",
            DriftFamily::Weierstrass => "weierstrass",
        }
    }
}

impl fmt::Display for DriftFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DriftFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .flat_map(char::to_lowercase)
            .collect();
        Ok(match key.as_str() {
            "zero" => DriftFamily::Zero,
            "constant" => DriftFamily::Constant,
            "timeonly" => DriftFamily::TimeOnly,
            "product" => DriftFamily::Product,
            "weierstrass" => DriftFamily::Weierstrass,
            _ => return Err(Error::Argument(format!("unknown drift family `{s}`"))),
        })
    }
}

/// A validated drift `f : [0,1] x R^d -> R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftSpec {
    family: DriftFamily,
    alpha: f64,
    beta: f64,
    amplitude: f64,
    d: usize,
    anchor: f64,
    constant_value: Vec<f64>,
    truncation: u32,
    /// Normalised Weierstrass weights `c_L 2^{-kα}`; empty for other families.
    weights: Vec<f64>,
}

impl DriftSpec {
    /// General constructor; the family-specific helpers below are usually
    /// more convenient.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        family: DriftFamily,
        alpha: f64,
        beta: f64,
        amplitude: f64,
        d: usize,
        anchor: f64,
        constant_value: Vec<f64>,
        truncation: u32,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::config("alpha", format!("{alpha} not in (0, 1]")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::config("beta", format!("{beta} not in (0, 1]")));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::config(
                "amplitude",
                format!("{amplitude} must be positive"),
            ));
        }
        if d == 0 {
            return Err(Error::config("d", "dimension must be at least 1"));
        }
        if !(0.0..=1.0).contains(&anchor) {
            return Err(Error::config("anchor", format!("{anchor} not in [0, 1]")));
        }
        if family == DriftFamily::Constant {
            if constant_value.len() != d {
                return Err(Error::config(
                    "constant_value",
                    format!("expected {d} components, got {}", constant_value.len()),
                ));
            }
            if constant_value.iter().any(|c| !(c.abs() <= amplitude)) {
                return Err(Error::config(
                    "constant_value",
                    "every component must be bounded by the amplitude",
                ));
            }
        }
        if family == DriftFamily::Weierstrass && !(1..=52).contains(&truncation) {
            return Err(Error::config(
                "truncation",
                format!("{truncation} not in 1..=52"),
            ));
        }
        let weights = if family == DriftFamily::Weierstrass {
            let raw: Vec<f64> = (0..=truncation)
                .map(|k| libm::exp2(-(k as f64) * alpha))
                .collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|w| w / total).collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            family,
            alpha,
            beta,
            amplitude,
            d,
            anchor,
            constant_value: if family == DriftFamily::Constant {
                constant_value
            } else {
                Vec::new()
            },
            truncation,
            weights,
        })
    }

    pub fn zero(d: usize) -> Result<Self> {
        Self::new(
            DriftFamily::Zero,
            1.0,
            1.0,
            1.0,
            d,
            DEFAULT_ANCHOR,
            Vec::new(),
            DEFAULT_TRUNCATION,
        )
    }

    /// Constant drift; the amplitude is the largest component magnitude.
    pub fn constant(value: Vec<f64>) -> Result<Self> {
        let k = value.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let k = if k > 0.0 { k } else { 1.0 };
        Self::new(
            DriftFamily::Constant,
            1.0,
            1.0,
            k,
            value.len(),
            DEFAULT_ANCHOR,
            value,
            DEFAULT_TRUNCATION,
        )
    }

    pub fn time_only(alpha: f64, amplitude: f64, d: usize, anchor: f64) -> Result<Self> {
        Self::new(
            DriftFamily::TimeOnly,
            alpha,
            1.0,
            amplitude,
            d,
            anchor,
            Vec::new(),
            DEFAULT_TRUNCATION,
        )
    }

    pub fn product(alpha: f64, beta: f64, amplitude: f64, d: usize) -> Result<Self> {
        Self::new(
            DriftFamily::Product,
            alpha,
            beta,
            amplitude,
            d,
            DEFAULT_ANCHOR,
            Vec::new(),
            DEFAULT_TRUNCATION,
        )
    }

    pub fn weierstrass(
        alpha: f64,
        beta: f64,
        amplitude: f64,
        d: usize,
        truncation: u32,
    ) -> Result<Self> {
        Self::new(
            DriftFamily::Weierstrass,
            alpha,
            beta,
            amplitude,
            d,
            DEFAULT_ANCHOR,
            Vec::new(),
            truncation,
        )
    }

    /// Same drift with a different time anchor.
    pub fn with_anchor(&self, anchor: f64) -> Result<Self> {
        Self::new(
            self.family,
            self.alpha,
            self.beta,
            self.amplitude,
            self.d,
            anchor,
            self.constant_value.clone(),
            self.truncation,
        )
    }

    pub fn family(&self) -> DriftFamily {
        self.family
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn anchor(&self) -> f64 {
        self.anchor
    }
    pub fn truncation(&self) -> u32 {
        self.truncation
    }
    pub fn constant_value(&self) -> &[f64] {
        &self.constant_value
    }

    /// True when `f` does not depend on `t`; both Euler schemes then coincide.
    pub fn is_time_independent(&self) -> bool {
        matches!(self.family, DriftFamily::Zero | DriftFamily::Constant)
    }

    /// `γ = α ∧ β/2`.
    pub fn gamma(&self) -> f64 {
        self.alpha.min(self.beta / 2.0)
    }

    /// Checked evaluation of `f(t, x)`.
    pub fn eval(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("time {t} outside [0, 1]")));
        }
        if x.len() != self.d {
            return Err(Error::Argument(format!(
                "state has dimension {}, drift expects {}",
                x.len(),
                self.d
            )));
        }
        let mut out = vec![0.0; self.d];
        self.eval_into(t, x, &mut out);
        Ok(out)
    }

    /// Unchecked evaluation into `out`; callers guarantee `t ∈ [0,1]` and
    /// matching lengths.
    #[inline]
    pub fn eval_into(&self, t: f64, x: &[f64], out: &mut [f64]) {
        match self.family {
            DriftFamily::Zero => out.fill(0.0),
            DriftFamily::Constant => out.copy_from_slice(&self.constant_value),
            DriftFamily::TimeOnly => out.fill(self.amplitude * self.time_factor(t)),
            DriftFamily::Product | DriftFamily::Weierstrass => {
                let scale = self.amplitude * self.time_factor(t);
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = scale * self.space_factor(*xi);
                }
            }
        }
    }

    /// Component `l` only.
    #[inline]
    pub fn eval_component(&self, t: f64, x: &[f64], l: usize) -> f64 {
        match self.family {
            DriftFamily::Zero => 0.0,
            DriftFamily::Constant => self.constant_value[l],
            DriftFamily::TimeOnly => self.amplitude * self.time_factor(t),
            DriftFamily::Product | DriftFamily::Weierstrass => {
                self.amplitude * self.time_factor(t) * self.space_factor(x[l])
            }
        }
    }

    #[inline]
    fn time_factor(&self, t: f64) -> f64 {
        match self.family {
            DriftFamily::Weierstrass => {
                let u = PI * (t - self.anchor);
                let mut freq = 1.0;
                let mut acc = 0.0;
                for w in &self.weights {
                    acc += w * libm::cos(freq * u);
                    freq *= 2.0;
                }
                acc
            }
            _ => libm::pow(libm::fabs(t - self.anchor), self.alpha),
        }
    }

    #[inline]
    fn space_factor(&self, x: f64) -> f64 {
        let s = libm::fabs(libm::sin(x));
        if self.beta == 1.0 {
            s
        } else {
            libm::pow(s, self.beta)
        }
    }

    /// Documented upper bounds `(time, space)` on the two Hölder seminorms,
    /// with vector differences in the max norm and `|x - y|` Euclidean.
    ///
    /// Power-type factors use `|u^γ - v^γ| ≤ |u - v|^γ` for `u, v ≥ 0`, giving
    /// `K` for both. The Weierstrass time constant sums
    /// `2^{-kα} min(2, 2^k π δ)` over frequencies, split where `2^k π δ = 2`.
    pub fn holder_constants(&self) -> (f64, f64) {
        let k = self.amplitude;
        match self.family {
            DriftFamily::Zero | DriftFamily::Constant => (0.0, 0.0),
            DriftFamily::TimeOnly => (k, 0.0),
            DriftFamily::Product => (k, k),
            DriftFamily::Weierstrass => {
                let a = self.alpha;
                let c_l = self.weights.first().copied().unwrap_or(1.0);
                let termwise =
                    (self.truncation as f64 + 1.0) * libm::exp2(1.0 - a) * libm::pow(PI, a);
                let split = if a < 1.0 {
                    libm::pow(PI, a)
                        * (libm::pow(4.0, 1.0 - a) / (libm::exp2(1.0 - a) - 1.0)
                            + libm::exp2(1.0 - a) / (1.0 - libm::exp2(-a)))
                } else {
                    f64::INFINITY
                };
                (k * c_l * termwise.min(split), k)
            }
        }
    }
}

/// Largest component magnitude.
#[inline]
pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x)))
}

#[inline]
pub fn euclidean_norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Empirical lower bounds on the time and space Hölder seminorms of `spec`.
///
/// Half of the pairs are uniform, half are close pairs with separations
/// log-uniform in `[1e-6, 1]`, which is where rough factors peak.
pub fn probe_holder_seminorms(
    spec: &DriftSpec,
    n_pairs: usize,
    stream: &RngStream,
) -> Result<(f64, f64)> {
    if n_pairs == 0 {
        return Err(Error::Argument("n_pairs must be at least 1".into()));
    }
    let d = spec.d();
    let draws = stream.purpose(Purpose::Probe);
    let per = 3 + 2 * d as u64;
    let mut x = vec![0.0; d];
    let mut y = vec![0.0; d];
    let mut fa = vec![0.0; d];
    let mut fb = vec![0.0; d];
    let mut diff = vec![0.0; d];
    let (mut time_max, mut space_max) = (0.0f64, 0.0f64);
    for i in 0..n_pairs as u64 {
        let base = i * per;
        let u = |c: u64| draws.uniform(base + c);
        let close = i % 2 == 1;
        let sep = libm::pow(10.0, -6.0 * u(0));
        let s = u(1);
        let t = if close {
            if s + sep <= 1.0 {
                s + sep
            } else {
                s - sep
            }
        } else {
            u(2)
        };
        for l in 0..d {
            x[l] = 8.0 * u(3 + l as u64) - 4.0;
            let dir = 2.0 * u(3 + (d + l) as u64) - 1.0;
            y[l] = if close { x[l] + sep * dir } else { 8.0 * dir };
        }
        // time quotient at state x
        if s != t {
            spec.eval_into(s, &x, &mut fa);
            spec.eval_into(t, &x, &mut fb);
            for l in 0..d {
                diff[l] = fa[l] - fb[l];
            }
            time_max = time_max.max(max_norm(&diff) / libm::pow(libm::fabs(t - s), spec.alpha()));
        }
        // space quotient at time s
        for l in 0..d {
            diff[l] = x[l] - y[l];
        }
        let dist = euclidean_norm(&diff);
        if dist > 0.0 {
            spec.eval_into(s, &x, &mut fa);
            spec.eval_into(s, &y, &mut fb);
            for l in 0..d {
                diff[l] = fa[l] - fb[l];
            }
            space_max = space_max.max(max_norm(&diff) / libm::pow(dist, spec.beta()));
        }
    }
    Ok((time_max, space_max))
}

/// Scalar weight `g₂(t, x)` for the second probe; `|g₂| ≤ 1` and
/// `|∇ₓ g₂| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObservableKind {
    UnitScalar,
    /// `cos(t) / sqrt(1 + |x|²)`.
    SmoothDecay,
}

impl ObservableKind {
    pub fn name(self) -> &'static str {
        match self {
            ObservableKind::UnitScalar => "unit",
            ObservableKind::SmoothDecay => "smooth-decay",
        }
    }
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObservableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "unit" | "unit-scalar" | "unitscalar" => Ok(ObservableKind::UnitScalar),
            "smooth-decay" | "smoothdecay" => Ok(ObservableKind::SmoothDecay),
            _ => Err(Error::Argument(format!("unknown observable `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSpec {
    pub kind: ObservableKind,
    pub d: usize,
}

impl ObservableSpec {
    pub fn new(kind: ObservableKind, d: usize) -> Self {
        Self { kind, d }
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("time {t} outside [0, 1]")));
        }
        if x.len() != self.d {
            return Err(Error::Argument(format!(
                "state has dimension {}, observable expects {}",
                x.len(),
                self.d
            )));
        }
        Ok(self.eval_unchecked(t, x))
    }

    #[inline]
    pub fn eval_unchecked(&self, t: f64, x: &[f64]) -> f64 {
        match self.kind {
            ObservableKind::UnitScalar => 1.0,
            ObservableKind::SmoothDecay => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                libm::cos(t) / libm::sqrt(1.0 + r2)
            }
        }
    }
}
