//! Equilibrium moment identities and special-function checks.

use serde::Serialize;

use crate::error::Result;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::report::{Check, GridMetrics, Report};
use crate::experiments::{build_setup, to_value, Outcome};
use crate::grid::{GridSpec, PhaseGrid};
use crate::moments::{build_equilibrium, AmplitudeMode, FourVector};
use crate::special::bessel::bessel_k;
use crate::special::quadrature::{integrate, QuadOptions};
use crate::special::Thermodynamics;

const IDENTITY_TOL: f64 = 1e-5;
const MIN_ORDER: f64 = 1.9;
const CLOSED_FORM_TOL: f64 = 1e-8;

/// Relative errors of the three momentum-grid identities at rest, n = 1:
/// sum (p^1)^2 F W / p0 = k_B T0 / c, sum p0 F W = etilde(T0) / c and
/// sum (p^1)^2 F W^2 = b0 m. The amplitude is the closed form, so the
/// normalization error of the grid is part of the measurement.
fn identity_errors(grid: &PhaseGrid, t0: f64, th: &Thermodynamics) -> Result<[f64; 3]> {
    let k = grid.constants;
    let (_, f) = build_equilibrium(grid, 1.0, FourVector::rest(k.c), t0, AmplitudeMode::Continuum)?;
    let m = &grid.momentum;
    let ne = grid.n_energy();
    let s: [f64; 3] = grid.sum(|j, kk| {
        let v = f[j * ne + kk];
        let w = grid.w_int[kk];
        let px2 = m.nodes[j][0] * m.nodes[j][0];
        [px2 * v * w / m.p0[j], m.p0[j] * v * w, px2 * v * w * w]
    });
    let want = [
        k.k_b * t0 / k.c,
        th.etilde(t0)? / k.c,
        th.b_coefficient(1.0, t0)? * k.m,
    ];
    Ok(std::array::from_fn(|i| ((s[i] - want[i]) / want[i]).abs()))
}

#[derive(Serialize)]
struct IdentityRow {
    identity: usize,
    default_error: f64,
    refined_error: f64,
    order: f64,
}

#[derive(Serialize)]
struct MomentsData {
    t0: f64,
    default_grid: GridSpec,
    refined_grid: GridSpec,
    grid_identities: Vec<IdentityRow>,
    /// max over (n, T) of the relative residual of identity 4.
    identity_4: f64,
    identity_5: f64,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

pub fn validate_moments(cfg: &ExperimentConfig) -> Result<Outcome> {
    let t0 = cfg.reference_temperature;
    let k = cfg.constants;
    let th = Thermodynamics::new(k, cfg.density)?;
    let setup = build_setup(cfg)?;
    let metrics = GridMetrics::measure(&setup)?;
    let coarse = identity_errors(&setup.grid, t0, &th)?;
    drop(setup);

    let refined_spec = cfg.grid.refined(&k, t0);
    let fine = {
        let g = PhaseGrid::new(k, cfg.density, &refined_spec, t0)?;
        identity_errors(&g, t0, &th)?
    };

    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for i in 0..3 {
        let order = (coarse[i] / fine[i]).log2();
        checks.push(Check::at_most(format!("identity_{}_error", i + 1), coarse[i], IDENTITY_TOL));
        checks.push(Check::at_least(format!("identity_{}_order", i + 1), order, MIN_ORDER));
        rows.push(IdentityRow {
            identity: i + 1,
            default_error: coarse[i],
            refined_error: fine[i],
            order,
        });
    }

    // The energy per particle comes from the nested 1D quadratures, not from
    // the Bessel closed form that b is built on.
    let mut id4: f64 = 0.0;
    for &n in &[0.5, 1.0, 3.7] {
        for t in log_grid(0.05, 50.0, 12) {
            let lhs = k.rest_energy() * th.b_coefficient(n, t)? / (k.k_b * n * t);
            let rhs = th.etilde_quadrature(t, 1e-12)? + k.k_b * t;
            id4 = id4.max(((lhs - rhs) / rhs).abs());
        }
    }
    let lhs5 = k.rest_energy() * th.b_coefficient(1.0, t0)? / (k.k_b * t0);
    let rhs5 = th.etilde_quadrature(t0, 1e-12)? + k.k_b * t0;
    let id5 = ((lhs5 - rhs5) / rhs5).abs();
    checks.push(Check::at_most("identity_4_error", id4, CLOSED_FORM_TOL));
    checks.push(Check::at_most("identity_5_error", id5, CLOSED_FORM_TOL));

    let data = MomentsData {
        t0,
        default_grid: cfg.grid,
        refined_grid: refined_spec,
        grid_identities: rows,
        identity_4: id4,
        identity_5: id5,
    };
    Ok(Outcome {
        report: Report::new("validate_moments", cfg.hash(), metrics, checks, to_value(&data)),
        timeseries: None,
    })
}

/// K_n(x) from the integral of cosh(n r) exp(-x cosh r) over r >= 0, truncated
/// where the integrand falls below e^{-80} of its scale.
pub fn bessel_oracle(n: usize, x: f64) -> Result<f64> {
    let nf = n as f64;
    let mut r_max = 1.0f64;
    for _ in 0..60 {
        r_max = (1.0 + (nf * r_max + 80.0) / x).acosh();
    }
    let v = integrate(
        |r: f64| {
            let s = (0.5 * r).sinh();
            [(nf * r).cosh() * (-2.0 * x * s * s).exp()]
        },
        0.0,
        r_max,
        QuadOptions::relative(1e-13),
    )?[0];
    Ok(v * (-x).exp())
}

#[derive(Serialize)]
struct BesselData {
    bessel_max_rel_error: f64,
    recurrence_max_residual: f64,
    inversion_max_rel_error: f64,
    min_etilde_prime: f64,
    etilde_prime_fd_max_rel_error: f64,
}

pub fn validate_bessel(cfg: &ExperimentConfig) -> Result<Outcome> {
    let setup = build_setup(cfg)?;
    let metrics = GridMetrics::measure(&setup)?;
    drop(setup);

    let mut bessel_err: f64 = 0.0;
    let mut recurrence: f64 = 0.0;
    for x in log_grid(1e-2, 1e2, 41) {
        let kn: Vec<f64> = (0..=5).map(|n| bessel_k(n, x)).collect::<Result<_>>()?;
        for (n, &got) in kn.iter().enumerate() {
            let want = bessel_oracle(n, x)?;
            bessel_err = bessel_err.max(((got - want) / want).abs());
        }
        for n in 1..5 {
            let r = kn[n + 1] - kn[n - 1] - 2.0 * n as f64 / x * kn[n];
            recurrence = recurrence.max((r / kn[n + 1]).abs());
        }
    }

    let th = Thermodynamics::new(cfg.constants, cfg.density)?;
    let mut inversion: f64 = 0.0;
    let mut min_prime = f64::INFINITY;
    let mut fd_err: f64 = 0.0;
    for t in log_grid(0.05, 50.0, 20) {
        let back = th.invert_temperature(th.etilde(t)?)?;
        inversion = inversion.max(((back - t) / t).abs());
        let d = th.etilde_prime(t)?;
        min_prime = min_prime.min(d);
        let h = 1e-5 * t;
        let fd = (th.etilde(t + h)? - th.etilde(t - h)?) / (2.0 * h);
        fd_err = fd_err.max(((d - fd) / d).abs());
    }

    let checks = vec![
        Check::at_most("bessel_vs_oracle", bessel_err, 1e-10),
        Check::at_most("bessel_recurrence", recurrence, 1e-10),
        Check::at_most("inversion_round_trip", inversion, 1e-9),
        Check::at_least("etilde_prime_min", min_prime, f64::MIN_POSITIVE),
        Check::at_most("etilde_prime_vs_fd", fd_err, 1e-5),
    ];
    let data = BesselData {
        bessel_max_rel_error: bessel_err,
        recurrence_max_residual: recurrence,
        inversion_max_rel_error: inversion,
        min_etilde_prime: min_prime,
        etilde_prime_fd_max_rel_error: fd_err,
    };
    Ok(Outcome {
        report: Report::new("validate_bessel", cfg.hash(), metrics, checks, to_value(&data)),
        timeseries: None,
    })
}
