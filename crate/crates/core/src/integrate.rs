//! Euler–Maruyama schemes for `dX = f(t, X) dt + dB` on [0, 1].
//!
//! Both schemes advance `X_{j+1} = X_j + f(s_j, X_j)/n + ΔB_j` and differ only
//! in the evaluation time `s_j`: the left node `j/n` for the standard scheme,
//! `(j + τ_j)/n` for the randomised one. The state is stored as
//! `x0 + A_j + B(t_j)` where `A_j` accumulates the drift steps (drift first,
//! then noise), which is the same recursion with the Brownian part telescoped
//! exactly.

use crate::brownian::BrownianPath;
use crate::drift::{max_norm, DriftSpec};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::offsets::RandomOffsets;
use crate::rng::{Purpose, RngStream};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// The reference resolution must exceed every ladder level by this factor.
pub const REFERENCE_FACTOR: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    RandomisedEm,
    StandardEm,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::StandardEm => "standard",
            Scheme::RandomisedEm => "randomised",
        }
    }

    /// Theoretical strong order with `ε → 0`: `1/2 + α ∧ β/2` for the
    /// randomised scheme, `α ∧ (1/2 + β/2)` for the standard one.
    pub fn predicted_order(self, alpha: f64, beta: f64) -> f64 {
        match self {
            Scheme::RandomisedEm => 0.5 + alpha.min(beta / 2.0),
            Scheme::StandardEm => alpha.min(0.5 + beta / 2.0),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "standard" | "standard-em" | "em" => Ok(Scheme::StandardEm),
            "randomised" | "randomized" | "randomised-em" | "randomized-em" | "rem" => {
                Ok(Scheme::RandomisedEm)
            }
            _ => Err(Error::Argument(format!("unknown scheme `{s}`"))),
        }
    }
}

/// Scheme output on the nodes of a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTrajectory {
    grid: TimeGrid,
    scheme: Scheme,
    d: usize,
    x0: Vec<f64>,
    /// Row-major `(n + 1) x d`.
    states: Vec<f64>,
    /// Accumulated drift `A_j`, row-major `(n + 1) x d`.
    drift_part: Vec<f64>,
    /// Drift value used on subinterval `j`, row-major `n x d`.
    drift_evals: Vec<f64>,
    offsets: Option<RandomOffsets>,
}

impl DiscreteTrajectory {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }
    pub fn n(&self) -> usize {
        self.grid.n()
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
    pub fn x0(&self) -> &[f64] {
        &self.x0
    }
    pub fn offsets(&self) -> Option<&RandomOffsets> {
        self.offsets.as_ref()
    }

    #[inline]
    pub fn state(&self, j: usize) -> &[f64] {
        &self.states[j * self.d..(j + 1) * self.d]
    }

    /// Drift value `f(s_j, X_j)` frozen on subinterval `j`.
    #[inline]
    pub fn drift_on(&self, j: usize) -> &[f64] {
        &self.drift_evals[j * self.d..(j + 1) * self.d]
    }

    /// Evaluation time `s_j` used on subinterval `j`.
    #[inline]
    pub fn eval_time(&self, j: usize) -> f64 {
        eval_time(self.scheme, self.grid.n(), j, self.offsets.as_ref())
    }

    /// `max_j |X_j - x0 - B(t_j)|` in the max norm, computed directly from
    /// the states and the driving path.
    pub fn drift_excursion(&self, path: &BrownianPath) -> Result<f64> {
        let q = coupling_factor(path, self)?;
        let mut worst = 0.0f64;
        for j in 0..=self.n() {
            let b = path.position(j * q);
            for l in 0..self.d {
                worst = worst.max(libm::fabs(self.state(j)[l] - self.x0[l] - b[l]));
            }
        }
        Ok(worst)
    }
}

#[inline]
fn eval_time(scheme: Scheme, n: usize, j: usize, offsets: Option<&RandomOffsets>) -> f64 {
    match (scheme, offsets) {
        (Scheme::RandomisedEm, Some(tau)) => (j as f64 + tau.taus()[j]) / n as f64,
        _ => j as f64 / n as f64,
    }
}

fn coupling_factor(path: &BrownianPath, traj: &DiscreteTrajectory) -> Result<usize> {
    if path.d() != traj.d || !path.n().is_multiple_of(traj.n()) {
        return Err(Error::Consistency(format!(
            "path ({} x {}) cannot drive a trajectory with n = {}, d = {}",
            path.n(),
            path.d(),
            traj.n(),
            traj.d
        )));
    }
    Ok(path.n() / traj.n())
}

fn simulate(
    drift: &DriftSpec,
    path: &BrownianPath,
    x0: &[f64],
    scheme: Scheme,
    offsets: Option<RandomOffsets>,
) -> Result<DiscreteTrajectory> {
    let d = drift.d();
    if path.d() != d {
        return Err(Error::Argument(format!(
            "path dimension {} differs from drift dimension {d}",
            path.d()
        )));
    }
    if x0.len() != d {
        return Err(Error::Argument(format!(
            "initial state has dimension {}, expected {d}",
            x0.len()
        )));
    }
    let n = path.n();
    let grid = TimeGrid::new(n)?;
    if let Some(tau) = &offsets {
        if tau.len() < n {
            return Err(Error::Length {
                needed: n,
                available: tau.len(),
            });
        }
    }
    let step = n as f64;
    let mut states = vec![0.0; (n + 1) * d];
    let mut drift_part = vec![0.0; (n + 1) * d];
    let mut drift_evals = vec![0.0; n * d];
    states[..d].copy_from_slice(x0);
    for j in 0..n {
        let s = eval_time(scheme, n, j, offsets.as_ref());
        let (done, rest) = states.split_at_mut((j + 1) * d);
        let xj = &done[j * d..];
        let fj = &mut drift_evals[j * d..(j + 1) * d];
        drift.eval_into(s, xj, fj);
        let b = path.position(j + 1);
        let next = &mut rest[..d];
        for l in 0..d {
            let acc = drift_part[j * d + l] + fj[l] / step;
            drift_part[(j + 1) * d + l] = acc;
            next[l] = x0[l] + acc + b[l];
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite state at step {}",
                j + 1
            )));
        }
    }
    Ok(DiscreteTrajectory {
        grid,
        scheme,
        d,
        x0: x0.to_vec(),
        states,
        drift_part,
        drift_evals,
        offsets,
    })
}

/// Standard EM on the resolution of `path`.
pub fn simulate_standard_em(
    drift: &DriftSpec,
    path: &BrownianPath,
    x0: &[f64],
) -> Result<DiscreteTrajectory> {
    simulate(drift, path, x0, Scheme::StandardEm, None)
}

/// Randomised EM on the resolution of `path`; subinterval `j` uses `taus[j]`.
pub fn simulate_randomised_em(
    drift: &DriftSpec,
    path: &BrownianPath,
    offsets: &RandomOffsets,
    x0: &[f64],
) -> Result<DiscreteTrajectory> {
    simulate(drift, path, x0, Scheme::RandomisedEm, Some(offsets.clone()))
}

/// Dispatch on `scheme`; `offsets` is ignored by the standard scheme.
pub fn simulate_scheme(
    scheme: Scheme,
    drift: &DriftSpec,
    path: &BrownianPath,
    offsets: &RandomOffsets,
    x0: &[f64],
) -> Result<DiscreteTrajectory> {
    match scheme {
        Scheme::StandardEm => simulate_standard_em(drift, path, x0),
        Scheme::RandomisedEm => simulate_randomised_em(drift, path, offsets, x0),
    }
}

/// Reference solution: randomised EM at the resolution of `fine_path` with
/// fresh offsets from the `OffsetsRef` child of `stream`.
pub fn simulate_reference(
    drift: &DriftSpec,
    fine_path: &BrownianPath,
    x0: &[f64],
    stream: &RngStream,
    max_ladder_n: usize,
) -> Result<DiscreteTrajectory> {
    let n_ref = fine_path.n();
    if n_ref < REFERENCE_FACTOR * max_ladder_n {
        return Err(Error::config(
            "n_ref",
            format!(
                "{n_ref} is below {REFERENCE_FACTOR} x largest ladder resolution {max_ladder_n}"
            ),
        ));
    }
    let offsets = RandomOffsets::sample(n_ref, &stream.purpose(Purpose::OffsetsRef))?;
    simulate_randomised_em(drift, fine_path, &offsets, x0)
}

/// A trajectory evaluated between its nodes on a grid `q` times finer.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousExtension {
    base: DiscreteTrajectory,
    fine_grid: TimeGrid,
    q: usize,
    /// Row-major `(q n + 1) x d`.
    fine_states: Vec<f64>,
}

impl ContinuousExtension {
    pub fn base(&self) -> &DiscreteTrajectory {
        &self.base
    }
    pub fn fine_grid(&self) -> TimeGrid {
        self.fine_grid
    }
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn fine_state(&self, i: usize) -> &[f64] {
        let d = self.base.d;
        &self.fine_states[i * d..(i + 1) * d]
    }
}

/// Continuous-time interpolant on the nodes of `fine_path`:
/// `X(t) = X_j + f(s_j, X_j)(t - t_j) + B(t) - B(t_j)` on subinterval `j`.
///
/// `fine_path` must reproduce, at every coarse node, exactly the Brownian
/// values that drove `traj`.
pub fn extend_continuous(
    traj: &DiscreteTrajectory,
    fine_path: &BrownianPath,
) -> Result<ContinuousExtension> {
    let q = coupling_factor(fine_path, traj)?;
    let (n, d) = (traj.n(), traj.d);
    for j in 0..=n {
        let b = fine_path.position(j * q);
        for l in 0..d {
            let rebuilt = traj.x0[l] + traj.drift_part[j * d + l] + b[l];
            if rebuilt.to_bits() != traj.state(j)[l].to_bits() {
                return Err(Error::Consistency(format!(
                    "fine path does not coarsen to the driving path at node {j}"
                )));
            }
        }
    }
    let fine_n = n * q;
    let fine_grid = TimeGrid::new(fine_n)?;
    let mut fine_states = vec![0.0; (fine_n + 1) * d];
    for i in 0..=fine_n {
        let row = &mut fine_states[i * d..(i + 1) * d];
        if i % q == 0 {
            row.copy_from_slice(traj.state(i / q));
            continue;
        }
        let j = i / q;
        let elapsed = fine_grid.node(i) - traj.grid.node(j);
        let f = traj.drift_on(j);
        let b = fine_path.position(i);
        for l in 0..d {
            row[l] = traj.x0[l] + (traj.drift_part[j * d + l] + f[l] * elapsed) + b[l];
        }
    }
    Ok(ContinuousExtension {
        base: traj.clone(),
        fine_grid,
        q,
        fine_states,
    })
}

/// `max_j |a_j - b_j|` over the nodes of the coarser trajectory, Euclidean in
/// space. `fine` must live on a grid refining `coarse`.
pub fn sup_node_distance(fine: &DiscreteTrajectory, coarse: &DiscreteTrajectory) -> Result<f64> {
    if fine.d != coarse.d || !fine.n().is_multiple_of(coarse.n()) {
        return Err(Error::Argument(
            "trajectories are not on nested grids".into(),
        ));
    }
    let q = fine.n() / coarse.n();
    let mut worst = 0.0f64;
    for j in 0..=coarse.n() {
        let a = fine.state(j * q);
        let b = coarse.state(j);
        let dist2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
        worst = worst.max(libm::sqrt(dist2));
    }
    Ok(worst)
}

/// Componentwise bound on the accumulated drift: `|A_j| ≤ K t_j`, up to the
/// rounding of a `j`-term running sum. `path` must be the driving path.
pub fn satisfies_boundedness(
    traj: &DiscreteTrajectory,
    path: &BrownianPath,
    amplitude: f64,
) -> Result<bool> {
    coupling_factor(path, traj)?;
    let d = traj.d;
    for j in 0..=traj.n() {
        let a = &traj.drift_part[j * d..(j + 1) * d];
        let bound = amplitude * traj.grid.node(j) * (1.0 + (j + 1) as f64 * f64::EPSILON);
        if max_norm(a) > bound {
            return Ok(false);
        }
    }
    Ok(true)
}
