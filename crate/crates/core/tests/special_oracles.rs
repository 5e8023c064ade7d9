//! Special functions checked against independent quadrature routes.

use relbgk::special::bessel::bessel_k;
use relbgk::special::laguerre::LaguerreRule;
use relbgk::special::quadrature::{integrate, integrate_semi_infinite, QuadOptions};
use relbgk::special::{BesselWeight, StateDensity, Thermodynamics};
use relbgk::PhysicalConstants;

// K_n(x) from the integral of cosh(n r) exp(-x cosh r) over [0, r_max].
// The exponent is written as -x - 2 x sinh^2(r/2) so the e^{-x} factor is
// applied once at the end.
fn bessel_oracle(n: usize, x: f64) -> f64 {
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
    )
    .unwrap()[0];
    v * (-x).exp()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

fn thermo(f_i: f64) -> Thermodynamics {
    Thermodynamics::new(PhysicalConstants::default(), StateDensity::power_law(f_i)).unwrap()
}

#[test]
fn bessel_matches_cosh_representation() {
    for x in log_grid(1e-2, 1e2, 41) {
        for n in 0..=5 {
            let got = bessel_k(n, x).unwrap();
            let want = bessel_oracle(n, x);
            let rel = ((got - want) / want).abs();
            assert!(rel < 1e-12, "K_{n}({x}): {got} vs {want}, rel {rel:e}");
        }
    }
}

#[test]
fn bessel_k0_at_one_matches_direct_integral() {
    let direct = integrate_semi_infinite(|r: f64| [(-r.cosh()).exp()], 0.0, 1.0, QuadOptions::relative(1e-13))
        .unwrap()[0];
    let got = bessel_k(0, 1.0).unwrap();
    assert!(((got - direct) / direct).abs() < 1e-12);
}

#[test]
fn bessel_recurrence_against_oracle() {
    for &x in &[0.5, 5.0, 50.0] {
        for n in 1..5 {
            let lhs = bessel_oracle(n + 1, x);
            let rhs = bessel_k(n - 1, x).unwrap() + 2.0 * n as f64 / x * bessel_k(n, x).unwrap();
            assert!(((lhs - rhs) / lhs).abs() < 1e-10, "n={n} x={x}");
        }
    }
    for x in log_grid(1e-2, 1e2, 25) {
        for n in 1..5 {
            let k = |m| bessel_k(m, x).unwrap();
            let resid = k(n + 1) - k(n - 1) - 2.0 * n as f64 / x * k(n);
            assert!(resid.abs() <= 1e-10 * k(n + 1), "x={x} n={n}");
        }
    }
}

#[test]
fn bessel_k2_alternative_representation() {
    for &x in &[0.05f64, 0.5, 2.0, 9.0, 60.0] {
        let alt = integrate_semi_infinite(
            |r: f64| {
                let s = (1.0 + r * r).sqrt();
                // e^{-x s} = e^{-x} e^{-x r^2 / (1 + s)}
                [(2.0 * r * r + 1.0) / s * (-x * r * r / (1.0 + s)).exp()]
            },
            0.0,
            (1.0 / x).max(1.0 / x.sqrt()),
            QuadOptions::relative(1e-13),
        )
        .unwrap()[0]
            * (-x).exp();
        let got = bessel_k(2, x).unwrap();
        assert!(((got - alt) / alt).abs() < 1e-10, "x={x}");
    }
}

// Independent route for the internal moments: a 160-point generalized
// Laguerre rule in y = I / kT, four times the resolution the adaptive rule
// needs at low temperature.
#[test]
fn low_temperature_moment_ratio_against_refined_rule() {
    for &f_i in &[1.0, 2.0, 4.5] {
        let th = thermo(f_i);
        for &t in &[0.02, 0.005] {
            let m2 = th.internal_bessel_moment(BesselWeight::K2OverGstar, t).unwrap();
            let m3 = th.internal_bessel_moment(BesselWeight::K3, t).unwrap();
            let rule = LaguerreRule::new(160, th.density.alpha()).unwrap();
            let g = 1.0 / t;
            let o2 = rule.apply(|y| {
                let gs = g * (1.0 + t * y);
                relbgk::special::bessel::bessel_k_scaled(2, gs).unwrap() / gs
            });
            let o3 = rule.apply(|y| relbgk::special::bessel::bessel_k_scaled(3, g * (1.0 + t * y)).unwrap());
            let rel = (m3 / m2 - o3 / o2).abs() / (o3 / o2);
            assert!(rel < 1e-11, "f_i={f_i} T={t}: rel {rel:e}");
        }
    }
}

#[test]
fn monatomic_limit_of_b() {
    let th = thermo(2.0 * (1.0 - 0.999));
    assert!((th.density.alpha() + 0.999).abs() < 1e-12);
    for &t in &[0.05, 0.2, 1.0, 5.0, 50.0] {
        let g = 1.0 / t;
        let ratio = th.b_coefficient(1.0, t).unwrap() * g * g;
        let pure = bessel_k(3, g).unwrap() / (bessel_k(2, g).unwrap() / g);
        assert!(((ratio - pure) / pure).abs() < 1e-3, "T={t}");
    }
}

#[test]
fn b_identities_at_reference_state() {
    for &f_i in &[0.5, 2.0, 6.0] {
        let th = thermo(f_i);
        for &t in &[0.1, 1.0] {
            let b = th.b_coefficient(1.0, t).unwrap();
            let lhs = b / t;
            let rhs = th.etilde(t).unwrap() + t;
            assert!(((lhs - rhs) / rhs).abs() < 1e-8);
            let n = 3.7;
            let bn = th.b_coefficient(n, t).unwrap();
            assert!(((bn / (n * t) - rhs) / rhs).abs() < 1e-8);
        }
    }
}

#[test]
fn etilde_paths_agree() {
    for &f_i in &[2.0, 3.0] {
        let th = thermo(f_i);
        for &t in &[0.1, 1.0, 10.0] {
            let closed = th.etilde(t).unwrap();
            let direct = th.etilde_quadrature(t, 1e-12).unwrap();
            assert!(((closed - direct) / closed).abs() < 1e-8);
            assert_eq!(th.etilde_checked(t).unwrap(), closed);
        }
    }
}

#[test]
fn etilde_prime_matches_finite_difference() {
    for &f_i in &[1.0, 2.0, 5.0] {
        let th = thermo(f_i);
        for t in log_grid(0.05, 50.0, 20) {
            let h = 1e-5 * t;
            let fd = (th.etilde(t + h).unwrap() - th.etilde(t - h).unwrap()) / (2.0 * h);
            let d = th.etilde_prime(t).unwrap();
            assert!(d > 0.0);
            assert!(((d - fd) / d).abs() < 1e-5, "f_i={f_i} T={t}: {d} vs {fd}");
        }
    }
}

// Heat capacity per particle tends to (3 + f_i)/2 k_B as T -> 0, and to the
// ultrarelativistic 3 k_B as T -> inf when the internal mode freezes out
// (alpha < 2).
#[test]
fn heat_capacity_limits() {
    for &f_i in &[1.0, 2.0, 3.0, 5.0] {
        let th = thermo(f_i);
        let cold = th.etilde_prime(1e-3).unwrap();
        let want = 0.5 * (3.0 + f_i);
        assert!(((cold - want) / want).abs() < 0.01, "f_i={f_i} cold {cold}");
        let hot = th.etilde_prime(1e3).unwrap();
        assert!(((hot - 3.0) / 3.0).abs() < 0.02, "f_i={f_i} hot {hot}");
    }
}

#[test]
fn damped_density_is_supported() {
    let th = Thermodynamics::new(
        PhysicalConstants::default(),
        StateDensity::DampedPowerLaw { f_i: 3.0, b_damp: 0.4, r: 1.5 },
    )
    .unwrap();
    for &t in &[0.1, 1.0, 10.0] {
        th.etilde_checked(t).unwrap();
        let b = th.b_coefficient(1.0, t).unwrap();
        assert!(((b / t - th.etilde(t).unwrap() - t) / (b / t)).abs() < 1e-10);
    }
}

#[test]
fn evaluations_are_bit_reproducible() {
    let th = thermo(2.0);
    for &t in &[0.07, 1.3, 22.0] {
        assert_eq!(th.etilde(t).unwrap().to_bits(), th.etilde(t).unwrap().to_bits());
        assert_eq!(th.etilde_prime(t).unwrap().to_bits(), th.etilde_prime(t).unwrap().to_bits());
    }
}
