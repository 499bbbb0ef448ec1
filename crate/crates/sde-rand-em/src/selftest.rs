//! Quick oracle checks with known answers: exact cases, hand-computed
//! values and structural identities.

use crate::output::{csv_string, parse_csv, CsvRow};
use sde_rand_em_core::{
    compare_schemes, fit_power_law, integral_oracle, kappa, kappa_tau, leftpoint_quadrature,
    measure_i1_scalar, measure_i2, probe_sample, randomised_quadrature, run_ladder,
    simulate_randomised_em, simulate_standard_em, BrownianPath, DriftSpec, LadderConfig,
    ObservableKind, ProbeConfig, ProbeKind, RandomOffsets, RngStream, Scheme, Sequential,
    TestFunction,
};

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
}

type Check = fn() -> Result<bool, sde_rand_em_core::Error>;

fn zero_drift_exact() -> Result<bool, sde_rand_em_core::Error> {
    let cfg = LadderConfig::new(DriftSpec::zero(3)?, vec![4, 8, 16], 20, 1);
    let ladder = run_ladder(&cfg, Scheme::RandomisedEm, &Sequential)?;
    Ok(ladder.points.iter().all(|p| p.estimate < 1e-12))
}

fn constant_drift_exact() -> Result<bool, sde_rand_em_core::Error> {
    let drift = DriftSpec::constant(vec![0.6, -0.3])?;
    let path = BrownianPath::sample(64, 2, &RngStream::new(2))?;
    let traj = simulate_standard_em(&drift, &path, &[1.0, 0.0])?;
    Ok((0..=64).all(|j| {
        let t = j as f64 / 64.0;
        let b = path.position(j);
        (traj.state(j)[0] - (1.0 + 0.6 * t + b[0])).abs() < 1e-12
            && (traj.state(j)[1] - (-0.3 * t + b[1])).abs() < 1e-12
    }))
}

fn hand_recursion() -> Result<bool, sde_rand_em_core::Error> {
    // f = t, zero noise, n = 2, τ = (1/2, 1/2): evaluation times 1/4, 3/4
    let drift = DriftSpec::time_only(1.0, 1.0, 1, 0.0)?;
    let path = BrownianPath::from_increments(1, &[0.0, 0.0])?;
    let tau = RandomOffsets::from_taus(vec![0.5, 0.5])?;
    let r = simulate_randomised_em(&drift, &path, &tau, &[0.0])?;
    let s = simulate_standard_em(&drift, &path, &[0.0])?;
    Ok(r.state(2)[0] == 0.5 && s.state(2)[0] == 0.25)
}

fn kappa_examples() -> Result<bool, sde_rand_em_core::Error> {
    let tau = RandomOffsets::from_taus(vec![0.5, 0.9])?;
    Ok(kappa(2, 0.75)? == 0.5
        && kappa_tau(2, 0.75, &tau)? == 0.95
        && kappa_tau(2, 0.25, &tau)? == 0.25)
}

fn coarsening_exact() -> Result<bool, sde_rand_em_core::Error> {
    let path = BrownianPath::sample(256, 2, &RngStream::new(3))?;
    let coarse = path.at_resolution(16)?;
    Ok(path.refines(&coarse) && coarse.position(16) == path.position(256))
}

fn quadrature_exact_cases() -> Result<bool, sde_rand_em_core::Error> {
    let tau = RandomOffsets::from_taus(vec![0.5, 0.5])?;
    let mid = randomised_quadrature(|r| r, 2, &tau)?;
    let left = leftpoint_quadrature(|r| r, 2)?;
    let oracle = integral_oracle(&TestFunction::power(0.5, 0.5), 1.0)?;
    Ok(mid.values[2] == 0.5
        && left.values[2] == 0.25
        && (oracle - 0.471_404_520_791_031_7).abs() < 1e-15)
}

fn fits() -> Result<bool, sde_rand_em_core::Error> {
    let ns = [16usize, 32, 64, 128];
    let exact: Vec<f64> = ns.iter().map(|n| 2.0 * (*n as f64).powf(-0.75)).collect();
    let a = fit_power_law(&ns, &exact, &[])?;
    let b = fit_power_law(&[16, 32, 64], &[0.1, 0.052, 0.026], &[])?;
    Ok((a.slope - 0.75).abs() < 1e-12
        && (a.r_squared - 1.0).abs() < 1e-12
        && (b.slope - 0.972).abs() < 5e-4)
}

fn probe_hand_value() -> Result<bool, sde_rand_em_core::Error> {
    let drift = DriftSpec::time_only(1.0, 1.0, 1, 0.0)?;
    let tau = RandomOffsets::from_taus(vec![0.5, 0.5])?;
    let fine = BrownianPath::from_increments(1, &[0.0; 32])?;
    let traj = simulate_randomised_em(&drift, &fine.at_resolution(2)?, &tau, &[0.0])?;
    let sup = probe_sample(ProbeKind::I1, &drift, &traj, &fine)?;
    Ok(sup == 1.0 / 32.0 + 3.0 / 256.0)
}

fn unit_observable_identity() -> Result<bool, sde_rand_em_core::Error> {
    let cfg = ProbeConfig::new(DriftSpec::product(0.25, 1.0, 1.0, 1)?, vec![8, 16], 10, 5);
    let a = measure_i1_scalar(&cfg, &Sequential)?;
    let b = measure_i2(&cfg, ObservableKind::UnitScalar, &Sequential)?;
    Ok(a.iter()
        .zip(&b)
        .all(|(x, y)| x.estimate.to_bits() == y.estimate.to_bits()))
}

fn scheme_agreement() -> Result<bool, sde_rand_em_core::Error> {
    let cfg = LadderConfig::new(DriftSpec::constant(vec![0.4])?, vec![4, 8, 16], 10, 6);
    let cmp = compare_schemes(&cfg, &Sequential)?;
    Ok(cmp.randomised.points == cmp.standard.points)
}

fn csv_round_trip() -> Result<bool, sde_rand_em_core::Error> {
    let rows: Vec<CsvRow> = [16usize, 32, 64]
        .iter()
        .map(|&n| CsvRow {
            n,
            scheme: "randomised".into(),
            p: 2.0,
            estimate: 1.0 / (n as f64).sqrt() / 3.0,
            std_error: 1e-3 / n as f64,
            samples: 500,
            master_seed: 42,
        })
        .collect();
    let check = || -> Option<bool> {
        let text = csv_string(&rows).ok()?;
        let again = csv_string(&parse_csv(text.as_bytes()).ok()?).ok()?;
        Some(text == again && text.lines().count() == 4)
    };
    Ok(check().unwrap_or(false))
}

fn bounded_drift() -> Result<bool, sde_rand_em_core::Error> {
    let drift = DriftSpec::weierstrass(0.3, 0.5, 1.0, 2, 12)?;
    let s = RngStream::new(7);
    Ok((0..10_000u64).all(|i| {
        let t = s.uniform(3 * i);
        let x = [
            8.0 * s.uniform(3 * i + 1) - 4.0,
            8.0 * s.uniform(3 * i + 2) - 4.0,
        ];
        drift
            .eval(t, &x)
            .map(|f| f.iter().all(|v| v.abs() <= 1.0 + 1e-12))
            .unwrap_or(false)
    }))
}

const CHECKS: &[(&str, Check)] = &[
    ("zero-drift-exact", zero_drift_exact),
    ("constant-drift-closed-form", constant_drift_exact),
    ("hand-recursion", hand_recursion),
    ("kappa-examples", kappa_examples),
    ("coarsening-bit-exact", coarsening_exact),
    ("quadrature-exact-cases", quadrature_exact_cases),
    ("order-fits", fits),
    ("probe-hand-value", probe_hand_value),
    ("unit-observable-identity", unit_observable_identity),
    ("scheme-agreement", scheme_agreement),
    ("csv-round-trip", csv_round_trip),
    ("bounded-drift", bounded_drift),
];

pub fn run_all() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|(name, check)| CheckResult {
            name,
            passed: check().unwrap_or(false),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn every_check_passes() {
        for r in super::run_all() {
            assert!(r.passed, "{}", r.name);
        }
    }
}
