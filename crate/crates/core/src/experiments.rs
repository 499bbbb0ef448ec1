//! Coupled strong-error ladders, order fits, scheme comparison and the
//! pathwise quadrature-error probes.
//!
//! Sample `m` of every experiment draws all of its randomness from
//! `RngStream::new(master_seed).child(m)`:
//!
//! * the Brownian path on the finest grid from the `Brownian` purpose,
//! * the offsets of the level-`n` randomised scheme from
//!   `purpose(Offsets).child(n)`,
//! * the reference offsets from `purpose(OffsetsRef)`.
//!
//! Every resolution is thereby driven by the same path, and results depend
//! only on the configuration and the seed, whatever the executor.

use crate::brownian::BrownianPath;
use crate::drift::{euclidean_norm, DriftSpec, ObservableKind, ObservableSpec};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::fit::{fit_power_law, OrderFit};
use crate::integrate::{
    extend_continuous, simulate_reference, simulate_scheme, sup_node_distance, DiscreteTrajectory,
    Scheme, REFERENCE_FACTOR,
};
use crate::offsets::RandomOffsets;
use crate::rng::{Purpose, RngStream};
use crate::stats::{lp_norm_summary, BATCHES};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Smallest fine factor accepted by the probes.
pub const MIN_FINE_FACTOR: usize = 8;

/// Everything a strong-error ladder depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderConfig {
    pub drift: DriftSpec,
    pub ns: Vec<usize>,
    pub n_ref: usize,
    pub samples: usize,
    pub p: f64,
    pub master_seed: u64,
    pub x0: Vec<f64>,
}

impl LadderConfig {
    /// Origin start, `p = 2`, `n_ref = 16 max(ns)`.
    pub fn new(drift: DriftSpec, ns: Vec<usize>, samples: usize, master_seed: u64) -> Self {
        let n_ref = REFERENCE_FACTOR * ns.iter().copied().max().unwrap_or(1);
        let x0 = vec![0.0; drift.d()];
        Self {
            drift,
            ns,
            n_ref,
            samples,
            p: 2.0,
            master_seed,
            x0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() {
            return Err(Error::config("ns", "ladder is empty"));
        }
        if self.ns[0] == 0 || self.ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(
                "ns",
                "resolutions must be positive and strictly ascending",
            ));
        }
        let max_n = *self.ns.last().unwrap_or(&0);
        if self.n_ref < REFERENCE_FACTOR * max_n {
            return Err(Error::config(
                "n_ref",
                format!("{} is below {REFERENCE_FACTOR} x {max_n}", self.n_ref),
            ));
        }
        if let Some(n) = self.ns.iter().find(|n| !self.n_ref.is_multiple_of(**n)) {
            return Err(Error::config(
                "n_ref",
                format!("{} is not a multiple of {n}", self.n_ref),
            ));
        }
        if self.samples < BATCHES {
            return Err(Error::config(
                "samples",
                format!("{} is fewer than the {BATCHES} batches", self.samples),
            ));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::config("p", format!("{} < 1", self.p)));
        }
        if self.x0.len() != self.drift.d() {
            return Err(Error::config(
                "x0",
                format!(
                    "{} components for a {}-dimensional drift",
                    self.x0.len(),
                    self.drift.d()
                ),
            ));
        }
        if self.x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("x0", "non-finite component"));
        }
        Ok(())
    }

    fn max_n(&self) -> usize {
        self.ns.last().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderPoint {
    pub n: usize,
    pub estimate: f64,
    pub std_error: f64,
}

/// Strong-error estimates across a resolution ladder for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorLadder {
    pub drift: DriftSpec,
    pub scheme: Scheme,
    pub p: f64,
    pub n_ref: usize,
    pub samples: usize,
    pub master_seed: u64,
    pub points: Vec<LadderPoint>,
    /// Largest `|X_j - x0 - B(t_j)|` (max norm) over every trajectory
    /// simulated for this ladder, the references included.
    pub max_drift_excursion: f64,
}

impl ErrorLadder {
    pub fn ns(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.n).collect()
    }

    /// Indices `k` with `estimate[k + 1] >= estimate[k]`.
    pub fn inversions(&self) -> Vec<usize> {
        self.points
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].estimate >= w[0].estimate)
            .map(|(k, _)| k)
            .collect()
    }

    /// Inversions that exceed two combined standard errors.
    pub fn significant_inversions(&self) -> Vec<usize> {
        self.points
            .windows(2)
            .enumerate()
            .filter(|(_, w)| {
                let se =
                    libm::sqrt(w[0].std_error * w[0].std_error + w[1].std_error * w[1].std_error);
                w[1].estimate - w[0].estimate > 2.0 * se
            })
            .map(|(k, _)| k)
            .collect()
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.inversions().is_empty()
    }
}

/// Per-sample contribution: `|error|^p` per level and the largest drift
/// excursion seen.
struct SampleOutcome {
    powered: Vec<Vec<f64>>,
    excursion: f64,
}

fn sample_stream(master_seed: u64, m: usize) -> RngStream {
    RngStream::new(master_seed).child(m as u64)
}

fn level_offsets(sample: &RngStream, n: usize) -> Result<RandomOffsets> {
    RandomOffsets::sample(n, &sample.purpose(Purpose::Offsets).child(n as u64))
}

fn run_sample(cfg: &LadderConfig, schemes: &[Scheme], m: usize) -> Result<SampleOutcome> {
    let stream = sample_stream(cfg.master_seed, m);
    let fine = BrownianPath::sample(cfg.n_ref, cfg.drift.d(), &stream.purpose(Purpose::Brownian))?;
    let reference = simulate_reference(&cfg.drift, &fine, &cfg.x0, &stream, cfg.max_n())?;
    let mut excursion = reference.drift_excursion(&fine)?;
    let mut powered = vec![Vec::with_capacity(cfg.ns.len()); schemes.len()];
    for &n in &cfg.ns {
        let coarse = fine.at_resolution(n)?;
        let tau = level_offsets(&stream, n)?;
        for (s, scheme) in schemes.iter().enumerate() {
            let traj = simulate_scheme(*scheme, &cfg.drift, &coarse, &tau, &cfg.x0)?;
            excursion = excursion.max(traj.drift_excursion(&coarse)?);
            let err = sup_node_distance(&reference, &traj)?;
            powered[s].push(libm::pow(err, cfg.p));
        }
    }
    Ok(SampleOutcome { powered, excursion })
}

fn run_ladders<E: Executor>(
    cfg: &LadderConfig,
    schemes: &[Scheme],
    exec: &E,
) -> Result<Vec<ErrorLadder>> {
    cfg.validate()?;
    let outcomes = exec.map_indexed(cfg.samples, |m| run_sample(cfg, schemes, m));
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let excursion = outcomes.iter().fold(0.0f64, |a, o| a.max(o.excursion));
    let mut column = Vec::with_capacity(cfg.samples);
    Ok(schemes
        .iter()
        .enumerate()
        .map(|(s, scheme)| {
            let points = cfg
                .ns
                .iter()
                .enumerate()
                .map(|(k, &n)| {
                    column.clear();
                    column.extend(outcomes.iter().map(|o| o.powered[s][k]));
                    let (estimate, std_error) = lp_norm_summary(&column, cfg.p);
                    LadderPoint {
                        n,
                        estimate,
                        std_error,
                    }
                })
                .collect();
            ErrorLadder {
                drift: cfg.drift.clone(),
                scheme: *scheme,
                p: cfg.p,
                n_ref: cfg.n_ref,
                samples: cfg.samples,
                master_seed: cfg.master_seed,
                points,
                max_drift_excursion: excursion,
            }
        })
        .collect())
}

/// `(E max_j |X_ref(t_j) - X_j|^p)^{1/p}` at every level of the ladder, each
/// sample coupled across levels through one fine path.
pub fn run_ladder<E: Executor>(
    cfg: &LadderConfig,
    scheme: Scheme,
    exec: &E,
) -> Result<ErrorLadder> {
    let mut ladders = run_ladders(cfg, &[scheme], exec)?;
    Ok(ladders.remove(0))
}

/// Single-level estimate and its standard error. Agrees with the matching
/// point of any ladder sharing the seed and reference resolution.
#[allow(clippy::too_many_arguments)]
pub fn strong_error_estimate<E: Executor>(
    drift: &DriftSpec,
    scheme: Scheme,
    n: usize,
    n_ref: usize,
    samples: usize,
    p: f64,
    master_seed: u64,
    exec: &E,
) -> Result<(f64, f64)> {
    let cfg = LadderConfig {
        drift: drift.clone(),
        ns: vec![n],
        n_ref,
        samples,
        p,
        master_seed,
        x0: vec![0.0; drift.d()],
    };
    let ladder = run_ladder(&cfg, scheme, exec)?;
    Ok((ladder.points[0].estimate, ladder.points[0].std_error))
}

/// Log-log least-squares fit of the ladder.
pub fn fit_order(ladder: &ErrorLadder) -> Result<OrderFit> {
    let ns = ladder.ns();
    let est: Vec<f64> = ladder.points.iter().map(|p| p.estimate).collect();
    let se: Vec<f64> = ladder.points.iter().map(|p| p.std_error).collect();
    fit_power_law(&ns, &est, &se)
}

/// Both schemes on identical randomness.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeComparison {
    pub randomised: ErrorLadder,
    pub standard: ErrorLadder,
    pub randomised_fit: OrderFit,
    pub standard_fit: OrderFit,
}

impl SchemeComparison {
    /// Randomised slope minus standard slope.
    pub fn slope_gap(&self) -> f64 {
        self.randomised_fit.slope - self.standard_fit.slope
    }
}

/// Runs both schemes in one pass so they share every Brownian path and
/// every reference solution.
pub fn compare_schemes<E: Executor>(cfg: &LadderConfig, exec: &E) -> Result<SchemeComparison> {
    let mut ladders = run_ladders(cfg, &[Scheme::RandomisedEm, Scheme::StandardEm], exec)?;
    let standard = ladders.pop().expect("two ladders");
    let randomised = ladders.pop().expect("two ladders");
    Ok(SchemeComparison {
        randomised_fit: fit_order(&randomised)?,
        standard_fit: fit_order(&standard)?,
        randomised,
        standard,
    })
}

/// Which quadrature error the probe measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    /// Vector integrand `f(r, X_r) - f(κ^τ(r), X_{κ(r)})`, Euclidean norm.
    I1,
    /// First component of the `I1` integrand.
    I1Scalar,
    /// First component of the `I1` integrand weighted by `g₂(r, X_r)`.
    I2(ObservableKind),
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeKind::I1 => f.write_str("I1"),
            ProbeKind::I1Scalar => f.write_str("I1-scalar"),
            ProbeKind::I2(g) => write!(f, "I2[{g}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub drift: DriftSpec,
    pub ns: Vec<usize>,
    /// Fine factor: the inner integral lives on the `q n` grid.
    pub q: usize,
    pub samples: usize,
    pub p: f64,
    pub master_seed: u64,
    pub x0: Vec<f64>,
}

impl ProbeConfig {
    /// Origin start, `q = 16`, `p = 2`.
    pub fn new(drift: DriftSpec, ns: Vec<usize>, samples: usize, master_seed: u64) -> Self {
        let x0 = vec![0.0; drift.d()];
        Self {
            drift,
            ns,
            q: 16,
            samples,
            p: 2.0,
            master_seed,
            x0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() || self.ns[0] == 0 || self.ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(
                "ns",
                "resolutions must be positive and strictly ascending",
            ));
        }
        let max_n = self.fine_resolution() / self.q.max(1);
        if let Some(n) = self.ns.iter().find(|n| !max_n.is_multiple_of(**n)) {
            return Err(Error::config(
                "ns",
                format!("{n} does not divide the largest resolution {max_n}"),
            ));
        }
        if self.q < MIN_FINE_FACTOR {
            return Err(Error::config(
                "q",
                format!("{} < {MIN_FINE_FACTOR}", self.q),
            ));
        }
        if self.samples < BATCHES {
            return Err(Error::config(
                "samples",
                format!("{} is fewer than the {BATCHES} batches", self.samples),
            ));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::config("p", format!("{} < 1", self.p)));
        }
        if self.x0.len() != self.drift.d() {
            return Err(Error::config(
                "x0",
                format!(
                    "{} components for a {}-dimensional drift",
                    self.x0.len(),
                    self.drift.d()
                ),
            ));
        }
        Ok(())
    }

    /// `q max(ns)`: resolution of the shared path of each sample.
    pub fn fine_resolution(&self) -> usize {
        self.q * self.ns.last().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IProbeResult {
    pub kind: ProbeKind,
    pub n: usize,
    pub samples: usize,
    pub p: f64,
    /// `(E sup_u |inner integral up to u|^p)^{1/p}`.
    pub estimate: f64,
    pub std_error: f64,
    pub q: usize,
    /// Largest drift excursion over the sampled trajectories.
    pub max_drift_excursion: f64,
}

/// Pathwise probe: `sup_u |∫_0^u h(r) dr|` for the probe integrand `h`,
/// with the inner integral a left-Riemann sum on the `q n` grid of
/// `fine_path` and `u` ranging over that grid.
pub fn probe_sample(
    kind: ProbeKind,
    drift: &DriftSpec,
    traj: &DiscreteTrajectory,
    fine_path: &BrownianPath,
) -> Result<f64> {
    let ext = extend_continuous(traj, fine_path)?;
    let q = ext.q();
    let fine_n = ext.fine_grid().n();
    let h = ext.fine_grid().step();
    let d = drift.d();
    let observable = match kind {
        ProbeKind::I2(g) => Some(ObservableSpec::new(g, d)),
        _ => None,
    };
    let mut f = vec![0.0; d];
    let mut acc = vec![0.0; d];
    let mut sup = 0.0f64;
    for i in 0..fine_n {
        let r = ext.fine_grid().node(i);
        let x = ext.fine_state(i);
        let frozen = traj.drift_on(i / q);
        match kind {
            ProbeKind::I1 => {
                drift.eval_into(r, x, &mut f);
                for l in 0..d {
                    acc[l] += (f[l] - frozen[l]) * h;
                }
                sup = sup.max(euclidean_norm(&acc));
            }
            ProbeKind::I1Scalar => {
                let diff = drift.eval_component(r, x, 0) - frozen[0];
                acc[0] += diff * h;
                sup = sup.max(libm::fabs(acc[0]));
            }
            ProbeKind::I2(_) => {
                let g2 = observable.as_ref().map_or(1.0, |o| o.eval_unchecked(r, x));
                let diff = drift.eval_component(r, x, 0) - frozen[0];
                acc[0] += g2 * diff * h;
                sup = sup.max(libm::fabs(acc[0]));
            }
        }
    }
    Ok(sup)
}

fn measure_probe<E: Executor>(
    cfg: &ProbeConfig,
    kind: ProbeKind,
    exec: &E,
) -> Result<Vec<IProbeResult>> {
    cfg.validate()?;
    let fine_n = cfg.fine_resolution();
    let per_sample = exec.map_indexed(cfg.samples, |m| -> Result<(Vec<f64>, f64)> {
        let stream = sample_stream(cfg.master_seed, m);
        let path = BrownianPath::sample(fine_n, cfg.drift.d(), &stream.purpose(Purpose::Brownian))?;
        let mut powered = Vec::with_capacity(cfg.ns.len());
        let mut excursion = 0.0f64;
        for &n in &cfg.ns {
            let coarse = path.at_resolution(n)?;
            let fine = path.at_resolution(cfg.q * n)?;
            let tau = level_offsets(&stream, n)?;
            let traj = simulate_scheme(Scheme::RandomisedEm, &cfg.drift, &coarse, &tau, &cfg.x0)?;
            excursion = excursion.max(traj.drift_excursion(&coarse)?);
            powered.push(libm::pow(
                probe_sample(kind, &cfg.drift, &traj, &fine)?,
                cfg.p,
            ));
        }
        Ok((powered, excursion))
    });
    let per_sample = per_sample.into_iter().collect::<Result<Vec<_>>>()?;
    let excursion = per_sample.iter().fold(0.0f64, |a, s| a.max(s.1));
    let mut column = Vec::with_capacity(cfg.samples);
    Ok(cfg
        .ns
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            column.clear();
            column.extend(per_sample.iter().map(|s| s.0[k]));
            let (estimate, std_error) = lp_norm_summary(&column, cfg.p);
            IProbeResult {
                kind,
                n,
                samples: cfg.samples,
                p: cfg.p,
                estimate,
                std_error,
                q: cfg.q,
                max_drift_excursion: excursion,
            }
        })
        .collect())
}

/// First-probe ladder with the vector integrand.
pub fn measure_i1<E: Executor>(cfg: &ProbeConfig, exec: &E) -> Result<Vec<IProbeResult>> {
    measure_probe(cfg, ProbeKind::I1, exec)
}

/// First-probe ladder restricted to the first drift component.
pub fn measure_i1_scalar<E: Executor>(cfg: &ProbeConfig, exec: &E) -> Result<Vec<IProbeResult>> {
    measure_probe(cfg, ProbeKind::I1Scalar, exec)
}

/// Second-probe ladder with observable `g2`.
pub fn measure_i2<E: Executor>(
    cfg: &ProbeConfig,
    g2: ObservableKind,
    exec: &E,
) -> Result<Vec<IProbeResult>> {
    measure_probe(cfg, ProbeKind::I2(g2), exec)
}

/// Log-log fit of a probe ladder.
pub fn fit_probe(results: &[IProbeResult]) -> Result<OrderFit> {
    let ns: Vec<usize> = results.iter().map(|r| r.n).collect();
    let est: Vec<f64> = results.iter().map(|r| r.estimate).collect();
    let se: Vec<f64> = results.iter().map(|r| r.std_error).collect();
    fit_power_law(&ns, &est, &se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::fit::FitStatus;
    use crate::integrate::simulate_randomised_em;

    #[test]
    fn zero_and_constant_ladders_vanish() {
        let cfg = LadderConfig::new(DriftSpec::zero(2).unwrap(), vec![4, 8, 16], 20, 1);
        let ladder = run_ladder(&cfg, Scheme::RandomisedEm, &Sequential).unwrap();
        assert!(ladder.points.iter().all(|p| p.estimate < 1e-12));
        assert_eq!(
            fit_order(&ladder).unwrap().status,
            FitStatus::DegenerateZero
        );
        let cfg = LadderConfig::new(
            DriftSpec::constant(vec![0.7, -0.2]).unwrap(),
            vec![4, 8, 16],
            20,
            1,
        );
        for scheme in [Scheme::RandomisedEm, Scheme::StandardEm] {
            let ladder = run_ladder(&cfg, scheme, &Sequential).unwrap();
            assert!(ladder.points.iter().all(|p| p.estimate < 1e-10));
        }
    }

    #[test]
    fn synthetic_injection_fits_unit_slope() {
        let cfg = LadderConfig::new(DriftSpec::zero(1).unwrap(), vec![4, 8, 16], 20, 1);
        let mut ladder = run_ladder(&cfg, Scheme::RandomisedEm, &Sequential).unwrap();
        for p in &mut ladder.points {
            p.estimate = 1.0 / p.n as f64;
        }
        let fit = fit_order(&ladder).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        assert!(ladder.is_strictly_decreasing());
    }

    #[test]
    fn validation_names_fields() {
        let drift = DriftSpec::product(0.3, 1.0, 1.0, 1).unwrap();
        let field = |cfg: &LadderConfig| match cfg.validate() {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        };
        let base = LadderConfig::new(drift, vec![4, 8, 16], 20, 1);
        let mut c = base.clone();
        c.n_ref = 128;
        assert_eq!(field(&c), "n_ref");
        c = base.clone();
        c.n_ref = 16 * 16 + 8;
        assert_eq!(field(&c), "n_ref");
        c = base.clone();
        c.ns = vec![8, 4, 16];
        assert_eq!(field(&c), "ns");
        c = base.clone();
        c.samples = 9;
        assert_eq!(field(&c), "samples");
        c = base.clone();
        c.p = 0.5;
        assert_eq!(field(&c), "p");
        c = base.clone();
        c.x0 = vec![0.0, 0.0];
        assert_eq!(field(&c), "x0");
        assert!(base.validate().is_ok());
    }

    #[test]
    fn single_level_matches_ladder_point() {
        let drift = DriftSpec::product(0.3, 1.0, 1.0, 1).unwrap();
        let mut cfg = LadderConfig::new(drift.clone(), vec![4, 8, 16], 20, 9);
        cfg.n_ref = 512;
        let ladder = run_ladder(&cfg, Scheme::StandardEm, &Sequential).unwrap();
        let single =
            strong_error_estimate(&drift, Scheme::StandardEm, 8, 512, 20, 2.0, 9, &Sequential)
                .unwrap();
        assert_eq!(
            single,
            (ladder.points[1].estimate, ladder.points[1].std_error)
        );
    }

    #[test]
    fn comparison_shares_randomness() {
        let drift = DriftSpec::product(0.3, 1.0, 1.0, 1).unwrap();
        let cfg = LadderConfig::new(drift, vec![4, 8, 16], 30, 5);
        let cmp = compare_schemes(&cfg, &Sequential).unwrap();
        assert_eq!(
            cmp.randomised,
            run_ladder(&cfg, Scheme::RandomisedEm, &Sequential).unwrap()
        );
        assert_eq!(
            cmp.standard,
            run_ladder(&cfg, Scheme::StandardEm, &Sequential).unwrap()
        );
        assert!(cmp.randomised.max_drift_excursion <= 1.0);
    }

    #[test]
    fn space_only_drift_gives_identical_schemes() {
        // the constant family is the time-independent member
        let cfg = LadderConfig::new(
            DriftSpec::constant(vec![0.4]).unwrap(),
            vec![4, 8, 16],
            20,
            3,
        );
        let cmp = compare_schemes(&cfg, &Sequential).unwrap();
        assert_eq!(cmp.randomised.points, cmp.standard.points);
        assert_eq!(cmp.slope_gap(), 0.0);
    }

    #[test]
    fn inversion_flags() {
        let cfg = LadderConfig::new(DriftSpec::zero(1).unwrap(), vec![4, 8, 16], 20, 1);
        let mut ladder = run_ladder(&cfg, Scheme::RandomisedEm, &Sequential).unwrap();
        let vals = [(0.3, 0.01), (0.31, 0.01), (0.1, 0.01)];
        for (p, (e, se)) in ladder.points.iter_mut().zip(vals) {
            p.estimate = e;
            p.std_error = se;
        }
        assert_eq!(ladder.inversions(), vec![0]);
        assert!(ladder.significant_inversions().is_empty());
        ladder.points[1].estimate = 0.5;
        assert_eq!(ladder.significant_inversions(), vec![0]);
    }

    #[test]
    fn time_only_probe_hand_value() {
        // f = t, n = 2, τ = (1/2, 1/2): integrand r - 1/4 on [0, 1/2) and
        // r - 3/4 on [1/2, 1). The exact prefix integral is 0 at u = 1 and
        // its sup is 1/32. On the fine grid h = 1/(2q) the left-Riemann
        // prefix picks up -h/4 over the first half, then dips by
        // (q + 2)/(32 q) inside the second: sup = 1/32 + 3/(16 q).
        let drift = DriftSpec::time_only(1.0, 1.0, 1, 0.0).unwrap();
        let tau = RandomOffsets::from_taus(vec![0.5, 0.5]).unwrap();
        let mut last = f64::INFINITY;
        for q in [16usize, 256, 4096] {
            let fine = BrownianPath::from_increments(1, &vec![0.0; 2 * q]).unwrap();
            let traj =
                simulate_randomised_em(&drift, &fine.at_resolution(2).unwrap(), &tau, &[0.0])
                    .unwrap();
            let sup = probe_sample(ProbeKind::I1, &drift, &traj, &fine).unwrap();
            let hand = 1.0 / 32.0 + 3.0 / (16.0 * q as f64);
            assert!((sup - hand).abs() < 1e-15, "q = {q}: {sup} vs {hand}");
            assert!(sup < last);
            last = sup;
        }
        assert!((last - 1.0 / 32.0).abs() < 1e-4);
    }

    #[test]
    fn trivial_probes_vanish() {
        for drift in [
            DriftSpec::zero(2).unwrap(),
            DriftSpec::constant(vec![0.3, -0.8]).unwrap(),
        ] {
            let cfg = ProbeConfig::new(drift, vec![8, 16], 10, 4);
            for r in measure_i1(&cfg, &Sequential).unwrap() {
                assert_eq!(r.estimate, 0.0);
            }
            for r in measure_i2(&cfg, ObservableKind::SmoothDecay, &Sequential).unwrap() {
                assert_eq!(r.estimate, 0.0);
            }
        }
    }

    #[test]
    fn unit_observable_matches_scalar_probe() {
        let drift = DriftSpec::product(0.25, 1.0, 1.0, 2).unwrap();
        let cfg = ProbeConfig::new(drift, vec![8, 16, 32], 12, 7);
        let a = measure_i1_scalar(&cfg, &Sequential).unwrap();
        let b = measure_i2(&cfg, ObservableKind::UnitScalar, &Sequential).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.estimate.to_bits(), y.estimate.to_bits());
            assert_eq!(x.std_error.to_bits(), y.std_error.to_bits());
        }
    }

    #[test]
    fn probe_validation() {
        let drift = DriftSpec::product(0.25, 1.0, 1.0, 1).unwrap();
        let mut cfg = ProbeConfig::new(drift, vec![8, 16], 10, 4);
        cfg.q = 4;
        assert!(matches!(
            cfg.validate(),
            Err(Error::Config { field: "q", .. })
        ));
        cfg.q = 16;
        cfg.ns = vec![8, 12];
        assert!(matches!(
            cfg.validate(),
            Err(Error::Config { field: "ns", .. })
        ));
    }
}
