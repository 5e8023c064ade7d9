//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs the shipped configs under `configs/` through the same driver
//! the CLI uses.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relbgk::experiments::{run, ExperimentConfig, Report, RunContext};
use relbgk::grid::PhaseGrid;
use relbgk::moments::fourvector::{apply, metric_defect};
use relbgk::moments::{
    build_equilibrium, compute_v_t, eckart_decompose, lorentz_boost_matrix, AmplitudeMode, FourVector,
};

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new() -> Self {
        Self {
            passed: true,
            detail: String::new(),
        }
    }

    fn note(&mut self, ok: bool, text: impl AsRef<str>) {
        self.passed &= ok;
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        if !ok {
            self.detail.push_str("FAILED ");
        }
        self.detail.push_str(text.as_ref());
    }

    /// Requires every named check of `report` to be present and passing.
    fn checks(&mut self, label: &str, report: &Report, names: &[&str]) {
        for name in names {
            match report.check(name) {
                Some(c) => self.note(c.passed, format!("{label}.{name}={:.3e}", c.value)),
                None => self.note(false, format!("{label}.{name} missing")),
            }
        }
    }

    fn runtime(&mut self, label: &str, took: Duration, limit: f64) {
        let s = took.as_secs_f64();
        self.note(s <= limit, format!("{label} {s:.1}s (limit {limit}s)"));
    }
}

fn config(file: &str, overrides: &[&str]) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(file);
    let overrides: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    ExperimentConfig::load(&path, &overrides).unwrap_or_else(|e| panic!("{file}: {e}"))
}

fn execute(v: &mut Verdict, label: &str, cfg: &ExperimentConfig) -> Option<(Report, Duration)> {
    let start = Instant::now();
    match run(cfg, &mut RunContext::default()) {
        Ok(out) => Some((out.report, start.elapsed())),
        Err(f) => {
            v.note(false, format!("{label} aborted: {}", f.error));
            None
        }
    }
}

fn data_usize(report: &Report, key: &str) -> usize {
    report.data[key].as_u64().unwrap_or(0) as usize
}

fn moments() -> Verdict {
    let mut v = Verdict::new();
    if let Some((r, took)) = execute(&mut v, "validate_moments", &config("validate_moments.toml", &[])) {
        v.checks(
            "validate_moments",
            &r,
            &[
                "identity_1_error",
                "identity_2_error",
                "identity_3_error",
                "identity_1_order",
                "identity_2_order",
                "identity_3_order",
                "identity_4_error",
                "identity_5_error",
            ],
        );
        v.runtime("runtime", took, 60.0);
    }
    v
}

fn bessel_and_inversion() -> (Verdict, Verdict) {
    let mut bessel = Verdict::new();
    let mut inversion = Verdict::new();
    if let Some((r, took)) = execute(&mut bessel, "validate_bessel", &config("validate_bessel.toml", &[])) {
        bessel.checks("validate_bessel", &r, &["bessel_vs_oracle", "bessel_recurrence"]);
        bessel.runtime("runtime", took, 5.0);
        inversion.checks(
            "validate_bessel",
            &r,
            &["inversion_round_trip", "etilde_prime_min", "etilde_prime_vs_fd"],
        );
    } else {
        inversion.note(false, "validate_bessel did not run");
    }
    (bessel, inversion)
}

fn conservation() -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let relax = config(
        "relax.toml",
        &["experiment.amplitude=0.1", "solver.t_end=500.0", "solver.dt=0.05"],
    );
    if let Some((r, _)) = execute(&mut v, "relax", &relax) {
        let steps = data_usize(&r, "steps");
        v.note(steps == 10_000, format!("relax steps={steps}"));
        v.checks("relax", &r, &["conservation_drift"]);
    }
    let evolve = config("evolve.toml", &[]);
    if let Some((r, _)) = execute(&mut v, "evolve", &evolve) {
        let steps = data_usize(&r, "steps");
        v.note(
            steps == 2000 && evolve.mesh.n_cells == 64,
            format!("evolve cells={} steps={steps}", evolve.mesh.n_cells),
        );
        v.checks("evolve", &r, &["conservation_drift"]);
    }
    v.runtime("runtime", start.elapsed(), 600.0);
    v
}

fn linear_lab() -> (Verdict, Verdict, Verdict) {
    let mut structure = Verdict::new();
    let mut remainder = Verdict::new();
    let mut psi = Verdict::new();
    if let Some((r, _)) = execute(&mut structure, "linear_lab", &config("linear_lab.toml", &[])) {
        structure.checks(
            "linear_lab",
            &r,
            &["gram_max_dev", "dissipativity_residual", "kernel_residual", "pythagoras_residual"],
        );
        remainder.checks(
            "linear_lab",
            &r,
            &["gamma_at_zero", "quadratic_ratio", "box_gamma_projection"],
        );
        psi.checks("linear_lab", &r, &["psi_identity_residual"]);
    } else {
        remainder.note(false, "linear_lab did not run");
        psi.note(false, "linear_lab did not run");
    }
    (structure, remainder, psi)
}

fn decay() -> Verdict {
    let mut v = Verdict::new();
    let cases: [(&str, &[&str]); 3] = [
        ("decay_macro_sinusoid.toml", &["norm_growth", "min_rate_margin"]),
        ("decay_pure_micro.toml", &["norm_growth", "initial_micro_rate_deviation"]),
        ("decay_zero.toml", &["max_norm"]),
    ];
    for (file, names) in cases {
        let label = file.trim_end_matches(".toml");
        if let Some((r, _)) = execute(&mut v, label, &config(file, &[])) {
            v.checks(label, &r, names);
            v.checks(label, &r, &["conservation_drift"]);
        }
    }
    v
}

fn entropy() -> Verdict {
    let mut v = Verdict::new();
    for profile in ["anisotropic", "anisotropic_heat"] {
        for stiff in ["implicit_relaxation", "explicit_rk2"] {
            let label = format!("relax[{profile},{stiff}]");
            let cfg = config(
                "relax.toml",
                &[
                    "experiment.amplitude=0.05",
                    &format!("experiment.profile=\"{profile}\""),
                    &format!("solver.stiff_mode=\"{stiff}\""),
                ],
            );
            if let Some((r, _)) = execute(&mut v, &label, &cfg) {
                v.checks(&label, &r, &["entropy_max_relative_drop"]);
            }
        }
    }
    v
}

fn boosts() -> Verdict {
    let mut v = Verdict::new();
    let c = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut image, mut defect) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        // Uniform direction, speed up to 0.9 c.
        let z: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let speed: f64 = 0.9 * c * rng.random::<f64>();
        let s = (1.0 - z * z).sqrt();
        let gamma = 1.0 / (1.0 - (speed / c).powi(2)).sqrt();
        let dir = [s * phi.cos(), s * phi.sin(), z];
        let u = FourVector::velocity(dir.map(|d| gamma * speed * d), c);
        let l = match lorentz_boost_matrix(&u, c) {
            Ok(l) => l,
            Err(e) => {
                v.note(false, format!("boost rejected: {e}"));
                return v;
            }
        };
        let r = apply(&l, &u);
        let rest = FourVector::rest(c);
        image = image.max((0..4).map(|i| (r.0[i] - rest.0[i]).abs()).fold(0.0, f64::max));
        defect = defect.max(metric_defect(&l));
    }
    v.note(image <= 1e-12, format!("max |LU - (c,0,0,0)|={image:.2e}"));
    v.note(defect <= 1e-12, format!("max metric defect={defect:.2e}"));

    let cfg = config("validate_moments.toml", &[]);
    let scalars = |grid: &PhaseGrid, u: FourVector| -> relbgk::Result<(f64, f64)> {
        let (_, values) = build_equilibrium(grid, 1.0, u, cfg.reference_temperature, AmplitudeMode::Continuum)?;
        let k = &grid.constants;
        let st = eckart_decompose(&compute_v_t(grid, &values)?, k.mc(), k.c)?;
        Ok((st.n, st.e_over_n))
    };
    let result = (|| -> relbgk::Result<(f64, f64)> {
        let grid = PhaseGrid::new(cfg.constants, cfg.density, &cfg.grid, cfg.reference_temperature)?;
        let (n0, e0) = scalars(&grid, FourVector::rest(c))?;
        let (mut dn, mut de) = (0.0f64, 0.0f64);
        let g = 1.0 / (1.0f64 - 0.04).sqrt();
        let third = (1.0f64 / 3.0).sqrt();
        for dir in [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [third, third, -third]] {
            let (n, e) = scalars(&grid, FourVector::velocity(dir.map(|d| 0.2 * c * g * d), c))?;
            dn = dn.max(((n - n0) / n0).abs());
            de = de.max(((e - e0) / e0).abs());
        }
        Ok((dn, de))
    })();
    match result {
        Ok((dn, de)) => {
            v.note(dn <= 1e-4, format!("boosted n rel dev={dn:.2e}"));
            v.note(de <= 1e-4, format!("boosted e/n rel dev={de:.2e}"));
        }
        Err(e) => v.note(false, format!("boosted equilibrium: {e}")),
    }
    v
}

fn main() -> ExitCode {
    // Timing limits are stated for a single thread.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();

    let mut results: Vec<(usize, &str, Verdict)> = Vec::new();
    let mut emit = |n: usize, title: &'static str, v: Verdict| {
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {tag}: {title}: {}", v.detail);
        results.push((n, title, v));
    };

    emit(1, "equilibrium moment identities", moments());
    let (bessel, inversion) = bessel_and_inversion();
    emit(2, "Bessel suite", bessel);
    emit(3, "temperature inversion", inversion);
    emit(4, "discrete conservation", conservation());
    let (structure, remainder, psi) = linear_lab();
    emit(5, "linearized structure", structure);
    emit(6, "nonlinear remainder", remainder);
    emit(7, "Psi identity", psi);
    emit(8, "decay ordering", decay());
    emit(9, "entropy probe", entropy());
    emit(10, "boost utilities", boosts());

    let failed = results.iter().filter(|r| !r.2.passed).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
