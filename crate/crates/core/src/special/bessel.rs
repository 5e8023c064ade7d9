//! Modified Bessel functions of the second kind, integer orders 0..=5.
//!
//! K_0 and K_1 come from Temme's series for x < 2 and Steed's continued
//! fraction otherwise; higher orders follow from the upward recurrence,
//! which is stable for K_n. Internally everything is carried as e^x K_n(x)
//! so the thermodynamic integrals can run far outside the public range.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Smallest argument accepted by [`bessel_k`].
pub const MIN_ARG: f64 = 1e-2;
/// Largest argument accepted by [`bessel_k`]; e^{-700} is still a normal f64.
pub const MAX_ARG: f64 = 7e2;
/// Highest supported order.
pub const MAX_ORDER: usize = 5;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SWITCH: f64 = 2.0;
const MAX_ITER: usize = 10_000;

/// K_n(x) with relative error near machine precision on [`MIN_ARG`, `MAX_ARG`].
pub fn bessel_k(n: usize, x: f64) -> Result<f64> {
    if n > MAX_ORDER {
        return Err(Error::Domain(format!("Bessel order {n} > {MAX_ORDER}")));
    }
    if !(MIN_ARG..=MAX_ARG).contains(&x) {
        return Err(Error::Domain(format!(
            "Bessel argument {x} outside [{MIN_ARG}, {MAX_ARG}]"
        )));
    }
    Ok(scaled_orders(x)[n] * (-x).exp())
}

/// e^x K_n(x) for n = 0..=5 and any x > 0.
pub fn scaled_orders(x: f64) -> [f64; MAX_ORDER + 1] {
    debug_assert!(x > 0.0);
    let (k0, k1) = if x < SWITCH { temme(x) } else { steed(x) };
    let mut k = [0.0; MAX_ORDER + 1];
    k[0] = k0;
    k[1] = k1;
    for n in 1..MAX_ORDER {
        k[n + 1] = k[n - 1] + (2.0 * n as f64 / x) * k[n];
    }
    k
}

/// e^x K_n(x) for a single order.
pub fn bessel_k_scaled(n: usize, x: f64) -> Result<f64> {
    if n > MAX_ORDER {
        return Err(Error::Domain(format!("Bessel order {n} > {MAX_ORDER}")));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("Bessel argument {x} must be positive")));
    }
    Ok(scaled_orders(x)[n])
}

// Temme's series at order zero, where the gamma-function ratios collapse to
// gam1 = -Euler gamma and gam2 = 1.
fn temme(x: f64) -> (f64, f64) {
    let x2 = 0.5 * x;
    let d = -x2.ln();
    let mut ff = d - EULER_GAMMA;
    let mut sum = ff;
    let mut p = 0.5;
    let mut q = 0.5;
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi);
        c *= dd / fi;
        p /= fi;
        q /= fi;
        let del = c * ff;
        sum += del;
        let del1 = c * (p - fi * ff);
        sum1 += del1;
        if del.abs() < sum.abs() * f64::EPSILON * 0.25
            && del1.abs() < sum1.abs() * f64::EPSILON * 0.25
        {
            break;
        }
    }
    let ex = x.exp();
    (sum * ex, sum1 * (2.0 / x) * ex)
}

// Steed's continued fraction CF2 with Temme's normalization, scaled by e^x.
fn steed(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON * 0.25 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from mpmath at 30 digits.
    #[test]
    fn tabulated_values() {
        let cases = [
            (0, 1.0, 0.421_024_438_240_708_3),
            (1, 1.0, 0.601_907_230_197_234_6),
            (2, 1.0, 1.624_838_898_635_177_5),
            (0, 2.0, 0.113_893_872_749_533_4),
            (1, 2.0, 0.139_865_881_816_522_4),
            (0, 0.1, 2.427_069_024_702_017),
            (1, 10.0, 1.864_877_345_382_558_4e-5),
        ];
        for (n, x, want) in cases {
            let got = bessel_k(n, x).unwrap();
            assert!(((got - want) / want).abs() < 2e-15, "K_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn continuity_across_method_switch() {
        let below = scaled_orders(SWITCH * (1.0 - 1e-12));
        let above = scaled_orders(SWITCH);
        for n in 0..=MAX_ORDER {
            assert!(((below[n] - above[n]) / above[n]).abs() < 1e-11);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k(6, 1.0).is_err());
        assert!(bessel_k(0, 0.0).is_err());
        assert!(bessel_k(0, -1.0).is_err());
        assert!(bessel_k(2, 5e-3).is_err());
        assert!(bessel_k(2, 701.0).is_err());
        assert!(bessel_k(2, MAX_ARG).unwrap() > 0.0);
    }

    #[test]
    fn pure_function() {
        for &x in &[0.013, 1.7, 2.0, 33.0] {
            assert_eq!(scaled_orders(x), scaled_orders(x));
        }
    }
}
