use std::f64::consts::TAU;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use fracdirac_core::dirac::{self, FourMomentum, PhysicalUnits, Sign};
use fracdirac_core::fractional::{self, GridFunction};
use fracdirac_core::gencliff::{self, Mutation, RelationForm, DEFAULT_MAX_ORDER};
use fracdirac_core::linsearch::{self, Coefficients, LinearizationSpec, OdeAnsatz, SearchConfig};
use fracdirac_core::{params, VerificationReport, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::document::{combine, ReportDocument};
use crate::gridcsv;

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("'{s}' is not a positive number")),
    }
}

fn finite(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a finite number")),
    }
}

fn momentum(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s.split(',').map(finite).collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|_| format!("momentum '{s}' must have three comma-separated components"))
}

fn finish(command: String, reports: Vec<VerificationReport>, out: Option<&PathBuf>) -> anyhow::Result<bool> {
    let doc = ReportDocument::new(command, reports);
    doc.emit(out.map(PathBuf::as_path))?;
    Ok(doc.overall_pass)
}

fn order(k: u32) -> usize {
    k as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    GMetric,
    Delta,
    Both,
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    /// Order of the algebra.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    k: u32,
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = FormArg::Both)]
    form: FormArg,
    /// Corrupt one generator first, e.g. `beta1=identity`, `beta0=scale:1.1`,
    /// `beta2=perturb:0.1`, `beta3=copy:beta1`.
    #[arg(long, value_parser = Mutation::from_str)]
    mutate: Option<Mutation>,
    /// Largest order accepted for the full relation check.
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
    max_order: usize,
    /// Random points for the power identity.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, env = "FRACDIRAC_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn algebra(args: &AlgebraArgs, command: String) -> anyhow::Result<bool> {
    let k = order(args.k);
    let mut rep = gencliff::build_beta(k)?;
    if let Some(m) = &args.mutate {
        rep = rep.mutated(m);
    }
    let forms = match args.form {
        FormArg::GMetric => vec![RelationForm::GMetric],
        FormArg::Delta => vec![RelationForm::Delta],
        FormArg::Both => vec![RelationForm::GMetric, RelationForm::Delta],
    };
    let mut reports = Vec::new();
    for form in forms {
        reports.push(gencliff::verify_generalized_clifford_capped(&rep, form, args.tol, args.max_order)?);
    }
    reports.push(gencliff::verify_power_identity(&rep, args.trials, args.seed, args.tol));
    reports.push(gencliff::verify_pauli_adjoint(k, args.tol)?);
    reports.push(gencliff::verify_beta_adjoint_unitarity(k, args.tol)?);
    finish(command, reports, args.out.as_ref())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    k: u32,
    /// Rest mass; must be positive.
    #[arg(long = "m", default_value_t = 1.0, value_parser = positive)]
    mass: f64,
    #[arg(long, value_enum, default_value_t = SignArg::Both)]
    sign: SignArg,
    /// Spatial momentum `px,py,pz` for the dispersion check.
    #[arg(long, default_value = "0,0,0", value_parser = momentum, allow_hyphen_values = true)]
    momentum: [f64; 3],
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    hbar: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    c: f64,
    /// Additional seeded on-shell momenta for the dispersion check.
    #[arg(long, default_value_t = 0)]
    samples: usize,
    /// Relative energy shift used for the off-shell comparison.
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    off_shell: f64,
    #[arg(long, env = "FRACDIRAC_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8, value_parser = positive)]
    tol: f64,
    /// Also classify the exponential plane-wave ansatz.
    #[arg(long)]
    ansatz: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn solve(args: &SolveArgs, command: String) -> anyhow::Result<bool> {
    let k = order(args.k);
    let units = PhysicalUnits::new(args.hbar, args.c, args.mass)?;
    let signs = match args.sign {
        SignArg::Plus => vec![Sign::Plus],
        SignArg::Minus => vec![Sign::Minus],
        SignArg::Both => vec![Sign::Plus, Sign::Minus],
    };
    let mut reports = Vec::new();
    let rest = FourMomentum::rest(&units);
    for sign in signs {
        let set = dirac::rest_frame_solutions(k, sign)?;
        reports.push(dirac::rest_frame_report(&set));
        reports.push(dirac::verify_solution_residual(k, &set, &rest, &units, args.tol)?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut momenta = vec![args.momentum];
    for _ in 0..args.samples {
        momenta.push(std::array::from_fn(|_| StandardNormal.sample(&mut rng)));
    }
    let mut on_cases = Vec::new();
    let mut worst_on: f64 = 0.0;
    let mut best_off = f64::INFINITY;
    for (i, p) in momenta.iter().enumerate() {
        let e = units.on_shell_energy(*p);
        let on = dirac::dispersion_residual(k, e, *p, &units)?;
        let off = dirac::dispersion_residual(k, e * (1.0 + args.off_shell), *p, &units)?;
        worst_on = worst_on.max(on);
        best_off = best_off.min(off);
        on_cases.push(
            fracdirac_core::CaseRecord::new(format!("momentum {i}"), on)
                .with_detail(serde_json::json!({"p": p, "energy": e, "off_shell": off})),
        );
    }
    reports.push(VerificationReport::from_cases(
        "dispersion_determinant",
        params! {"k" => k, "m" => args.mass, "hbar" => args.hbar, "c" => args.c, "seed" => args.seed},
        args.tol,
        on_cases,
    ));
    // on-shell values must sit at least three decades below every off-shell value
    let separation = if best_off > 0.0 { worst_on / best_off } else { f64::INFINITY };
    reports.push(VerificationReport::with_residual(
        "dispersion_separation",
        params! {
            "k" => k,
            "max_on_shell" => worst_on,
            "min_off_shell" => best_off,
            "relative_energy_shift" => args.off_shell,
        },
        separation,
        1e-3,
        Vec::new(),
    ));
    if args.ansatz {
        reports.push(dirac::ansatz_report(&dirac::classify_exponential_ansatz(k)?));
    }
    finish(command, reports, args.out.as_ref())
}

#[derive(Debug, Args)]
pub struct FderivArgs {
    /// Derivative order.
    #[arg(long, value_parser = finite, allow_hyphen_values = true)]
    alpha: f64,
    /// Grid function CSV with header `index,re,im`.
    #[arg(long)]
    input: PathBuf,
    /// Period of the sampled domain.
    #[arg(long, value_parser = positive)]
    length: f64,
    /// Where to write the derivative as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reference samples to compare the result against.
    #[arg(long)]
    expect: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    tol: f64,
    /// Where to write the JSON report (default stdout).
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn fderiv(args: &FderivArgs, command: String) -> anyhow::Result<bool> {
    let f = gridcsv::read(&args.input, args.length)?;
    let d = fractional::frac_derivative(&f, args.alpha)?;
    if let Some(out) = &args.out {
        gridcsv::write(out, &d)?;
    }
    let mut params = params! {
        "alpha" => args.alpha,
        "n" => f.n(),
        "length" => args.length,
        "tail_ratio" => fractional::spectral_tail_ratio(&f),
    };
    let (residual, cases) = match &args.expect {
        Some(path) => {
            let expected = gridcsv::read(path, args.length)?;
            if !expected.same_grid(&d) {
                bail!("{}: expected samples lie on a different grid", path.display());
            }
            let err = d.max_abs_diff(&expected);
            params.insert("expected".into(), serde_json::json!(path.display().to_string()));
            (err, vec![fracdirac_core::CaseRecord::new("max abs error", err)])
        }
        None => (0.0, Vec::new()),
    };
    let report = VerificationReport::with_residual("fractional_derivative", params, residual, args.tol, cases);
    finish(command, vec![report], args.report.as_ref())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FcheckKind {
    Semigroup,
    PlaneWave,
    Adjoint,
}

#[derive(Debug, Args)]
pub struct FcheckArgs {
    #[arg(long, value_enum)]
    kind: FcheckKind,
    /// Number of seeded cases (default 100, 30 and 50 by kind).
    #[arg(long)]
    cases: Option<usize>,
    /// Grid size.
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, env = "FRACDIRAC_SEED", default_value_t = 0)]
    seed: u64,
    /// Default 1e-8 for the semigroup and 1e-10 otherwise.
    #[arg(long, value_parser = positive)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Random trigonometric polynomial on `[0, 2π)` with the given modes.
fn random_modes(rng: &mut ChaCha8Rng, n: usize, modes: impl Iterator<Item = i32> + Clone) -> anyhow::Result<GridFunction> {
    let coeffs: Vec<(i32, C64)> = modes
        .map(|m| (m, C64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))))
        .collect();
    Ok(GridFunction::from_fn(n, TAU, |x| {
        coeffs.iter().map(|&(m, c)| c * C64::from_polar(1.0, m as f64 * x)).sum()
    })?)
}

pub fn fcheck(args: &FcheckArgs, command: String) -> anyhow::Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let n = args.n;
    if n < 64 {
        bail!("grid size must be at least 64, got {n}");
    }
    let band = (n / 16) as i32;
    let mut members = Vec::new();
    let (name, tol) = match args.kind {
        FcheckKind::Semigroup => {
            let tol = args.tol.unwrap_or(1e-8);
            for case in 0..args.cases.unwrap_or(100) {
                let f = random_modes(&mut rng, n, -band..=band)?;
                let alpha = rng.random_range(0.0..2.0);
                let beta = rng.random_range(0.0..2.0);
                members.push((format!("case {case}"), fractional::verify_semigroup(&f, alpha, beta, tol)?));
            }
            ("semigroup", tol)
        }
        FcheckKind::PlaneWave => {
            let tol = args.tol.unwrap_or(1e-10);
            for case in 0..args.cases.unwrap_or(30) {
                let length = rng.random_range(1.0..20.0);
                let mode = rng.random_range(1..n / 2) as f64;
                let alpha = rng.random_range(0.0..2.0);
                let k = TAU * mode / length;
                members.push((format!("case {case}"), fractional::verify_plane_wave_eigen(k, alpha, n, length, tol)?));
            }
            ("plane_wave_eigen", tol)
        }
        FcheckKind::Adjoint => {
            let tol = args.tol.unwrap_or(1e-10);
            for case in 0..args.cases.unwrap_or(50) {
                let f = random_modes(&mut rng, n, 0..=band)?;
                let g = random_modes(&mut rng, n, 0..=band)?;
                let alpha = rng.random_range(0.0..=2.0);
                members.push((format!("case {case}"), fractional::verify_adjoint_identity(&f, &g, alpha, tol)?));
            }
            ("adjoint_identity", tol)
        }
    };
    let report = combine(name, params! {"n" => n, "seed" => args.seed, "cases" => members.len()}, tol, members);
    finish(command, vec![report], args.out.as_ref())
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    /// Eigenvalue in `x²ψ'' = cψ`; seeded values are used when omitted.
    #[arg(long, value_parser = finite, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long = "c1", default_value_t = 1.0, value_parser = finite, allow_hyphen_values = true)]
    c1: f64,
    #[arg(long = "c2", default_value_t = 1.0, value_parser = finite, allow_hyphen_values = true)]
    c2: f64,
    /// Seeded `(c, C1, C2)` triples when `--c` is absent.
    #[arg(long, default_value_t = 10)]
    cases: usize,
    /// Highest polynomial degree for the operator-square check.
    #[arg(long, default_value_t = 6)]
    degree: usize,
    #[arg(long, env = "FRACDIRAC_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn example(args: &ExampleArgs, command: String) -> anyhow::Result<bool> {
    let (g1, g2) = linsearch::reference_ode_pair();
    let points = linsearch::default_sample_points();
    let cond = linsearch::residual_ode_example(&g1, &g2, &points)?;
    let mut reports = vec![VerificationReport::with_residual(
        "operator_conditions",
        params! {"points" => points},
        cond,
        1e-12,
        Vec::new(),
    )];
    reports.push(linsearch::factor_operator_check(&g1, &g2, args.degree, args.seed, args.tol)?);
    let triples: Vec<(f64, f64, f64)> = match args.c {
        Some(c) => vec![(c, args.c1, args.c2)],
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (0..args.cases)
                .map(|_| {
                    (
                        rng.random_range(-0.25..6.0),
                        rng.random_range(-2.0..2.0),
                        rng.random_range(-2.0..2.0),
                    )
                })
                .collect()
        }
    };
    let sample_points: Vec<f64> = (0..12).map(|i| 0.25 + 0.4 * i as f64).collect();
    for (c, c1, c2) in triples {
        reports.push(linsearch::verify_example_solutions(c, c1, c2, &sample_points, args.tol)?);
    }
    finish(command, reports, args.out.as_ref())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    OdeExample,
    Quadratic,
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnsatzArg {
    Linear,
    Affine,
}

#[derive(Debug, Args)]
pub struct LinearizeArgs {
    #[arg(long, value_enum)]
    preset: Preset,
    #[arg(long, default_value_t = 2)]
    nvars: usize,
    /// Representation dimension.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Comma-separated weights of the power sum (default all ones).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weights: Option<Vec<f64>>,
    /// Shape of the first coefficient in the operator example.
    #[arg(long, value_enum, default_value_t = AnsatzArg::Linear)]
    ansatz: AnsatzArg,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, env = "FRACDIRAC_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long = "max-iter", default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-8, value_parser = positive)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn linearize(args: &LinearizeArgs, command: String) -> anyhow::Result<bool> {
    let power = match args.preset {
        Preset::Cubic => 3,
        _ => 2,
    };
    let spec = match args.preset {
        Preset::OdeExample => {
            let ansatz = match args.ansatz {
                AnsatzArg::Linear => OdeAnsatz::Linear,
                AnsatzArg::Affine => OdeAnsatz::Affine,
            };
            LinearizationSpec::ode_example(args.dim, ansatz)?
        }
        _ => {
            let weights = args.weights.clone().unwrap_or_else(|| vec![1.0; args.nvars]);
            if weights.len() != args.nvars {
                bail!("--weights has {} entries but --nvars is {}", weights.len(), args.nvars);
            }
            LinearizationSpec::weighted(power, weights, args.dim)?
        }
    };
    let cfg = SearchConfig {
        restarts: args.restarts,
        max_iterations: args.max_iter,
        seed: args.seed,
        success_tol: args.tol,
        ..SearchConfig::default()
    };
    let outcome = linsearch::search(&spec, &cfg).context("search failed")?;
    let mut reports = vec![linsearch::search_report(&spec, &cfg, &outcome)];
    if let Coefficients::Ode { g1, h1: None, g2 } = &outcome.candidate.coefficients {
        let exact = linsearch::residual_ode_example(g1, g2, &cfg.sample_points)?;
        if outcome.feasible && exact <= 1e-10 {
            reports.push(linsearch::factor_operator_check(g1, g2, 6, args.seed, 1e-10)?);
        }
    }
    finish(command, reports, args.out.as_ref())
}
