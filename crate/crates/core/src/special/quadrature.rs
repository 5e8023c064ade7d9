//! Adaptive Gauss-Kronrod (7/15) quadrature for vector-valued integrands.
//!
//! Components share one subdivision tree; an interval is refined when its
//! error is large relative to the tolerance of any component. Semi-infinite
//! ranges are handled by the rational map x = a + s t / (1 - t).

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and subdivision budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub epsabs: f64,
    pub epsrel: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            epsabs: 0.0,
            epsrel: 1e-13,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn relative(epsrel: f64) -> Self {
        Self {
            epsrel,
            ..Self::default()
        }
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err.abs();
    if resasc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / resasc).powf(1.5);
        e = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * resabs);
    }
    e
}

#[derive(Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

fn gk15<const N: usize, F>(f: &F, a: f64, b: f64) -> Panel<N>
where
    F: Fn(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut fm = [[0.0; N]; 7];
    let mut fp = [[0.0; N]; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        fm[j] = f(center - dx);
        fp[j] = f(center + dx);
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for c in 0..N {
        let mut kron = WGK[7] * fc[c];
        let mut gauss = WG[3] * fc[c];
        let mut resabs = kron.abs();
        for j in 0..7 {
            let s = fm[j][c] + fp[j][c];
            kron += WGK[j] * s;
            resabs += WGK[j] * (fm[j][c].abs() + fp[j][c].abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * s;
            }
        }
        let mean = 0.5 * kron;
        let mut resasc = WGK[7] * (fc[c] - mean).abs();
        for j in 0..7 {
            resasc += WGK[j] * ((fm[j][c] - mean).abs() + (fp[j][c] - mean).abs());
        }
        let h = half.abs();
        value[c] = kron * half;
        error[c] = rescale_error((kron - gauss) * half, resabs * h, resasc * h);
    }
    Panel { a, b, value, error }
}

/// Integrates a vector-valued `f` over the finite interval [a, b].
pub fn integrate<const N: usize, F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    if a == b {
        return Ok([0.0; N]);
    }
    let mut panels = vec![gk15(&f, a, b)];
    loop {
        let mut total = [0.0; N];
        let mut err = [0.0; N];
        for p in &panels {
            for c in 0..N {
                total[c] += p.value[c];
                err[c] += p.error[c];
            }
        }
        let tol: [f64; N] = std::array::from_fn(|c| opts.epsabs.max(opts.epsrel * total[c].abs()));
        if (0..N).all(|c| err[c] <= tol[c]) {
            return Ok(total);
        }

        // Refine the panel contributing most to the worst tolerance ratio.
        let weight = |p: &Panel<N>| -> f64 {
            (0..N)
                .map(|c| {
                    if tol[c] > 0.0 {
                        p.error[c] / tol[c]
                    } else if p.error[c] > 0.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                })
                .fold(0.0, f64::max)
        };
        let (idx, _) = panels
            .iter()
            .enumerate()
            .map(|(i, p)| (i, weight(p)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let worst = panels[idx];
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b);
        if panels.len() >= opts.max_intervals || too_narrow {
            let (estimate, tolerance) = (0..N)
                .map(|c| (err[c], tol[c]))
                .fold((0.0, 0.0), |acc, x| if x.0 - x.1 > acc.0 - acc.1 { x } else { acc });
            return Err(Error::Quadrature { estimate, tolerance });
        }
        panels[idx] = gk15(&f, worst.a, mid);
        panels.push(gk15(&f, mid, worst.b));
    }
}

/// Integrates `f` over [a, infinity) through x = a + scale * t / (1 - t).
///
/// `scale` should be the decay length of the integrand.
pub fn integrate_semi_infinite<const N: usize, F>(
    f: F,
    a: f64,
    scale: f64,
    opts: QuadOptions,
) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    let g = |t: f64| {
        let u = 1.0 - t;
        let x = a + scale * t / u;
        let jac = scale / (u * u);
        let v = f(x);
        std::array::from_fn(|c| {
            let y = v[c] * jac;
            if y.is_finite() {
                y
            } else {
                0.0
            }
        })
    };
    integrate(g, 0.0, 1.0, opts)
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    integrate(|x| [f(x)], a, b, opts).map(|v| v[0])
}
