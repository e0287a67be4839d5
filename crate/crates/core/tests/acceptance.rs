//! Acceptance run: one line per criterion, nonzero exit on any unexpected
//! outcome.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use fracdirac_core::dirac::{self, PhysicalUnits, Sign};
use fracdirac_core::fractional::{self, GridFunction};
use fracdirac_core::gencliff::{self, RelationForm};
use fracdirac_core::linsearch::{self, LinearizationSpec, OdeAnsatz, SearchConfig};
use fracdirac_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::json;

struct Outcome {
    pass: bool,
    summary: String,
}

type Check = fn() -> Outcome;

struct Criterion {
    id: u32,
    name: &'static str,
    run: Check,
    time_limit: Option<Duration>,
    /// Known not to hold; see the project notes.
    expected_failure: bool,
}

fn outcome(pass: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        summary: summary.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn cnormal(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(normal(rng), normal(rng))
}

/// Random trigonometric polynomial with modes in `modes`.
fn random_modes(rng: &mut ChaCha8Rng, n: usize, modes: &[i32]) -> GridFunction {
    let coeffs: Vec<C64> = modes.iter().map(|_| cnormal(rng)).collect();
    GridFunction::from_fn(n, TAU, |x| {
        modes
            .iter()
            .zip(&coeffs)
            .map(|(&m, &c)| c * C64::from_polar(1.0, m as f64 * x))
            .sum()
    })
    .expect("valid grid")
}

fn clifford_relation() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 2..=7 {
        let rep = gencliff::build_beta(k).expect("beta");
        for form in [RelationForm::GMetric, RelationForm::Delta] {
            let r = gencliff::verify_generalized_clifford(&rep, form, 1e-10).expect("clifford");
            if !r.pass {
                return outcome(false, format!("k={k} {} residual {:.3e}", form.as_str(), r.max_residual));
            }
            worst = worst.max(r.max_residual);
        }
    }
    outcome(true, format!("k=2..7, max residual {worst:.3e}"))
}

fn pauli_adjoint() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 2..=10 {
        let r = gencliff::verify_pauli_adjoint(k, 1e-12).expect("pauli");
        if !r.pass {
            return outcome(false, format!("k={k} residual {:.3e}", r.max_residual));
        }
        worst = worst.max(r.max_residual);
    }
    outcome(true, format!("k=2..10 (odd and even), max residual {worst:.3e}"))
}

fn beta_adjoint_unitarity() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 2..=7 {
        let r = gencliff::verify_beta_adjoint_unitarity(k, 1e-12).expect("beta adjoint");
        if !r.pass {
            return outcome(false, format!("k={k} residual {:.3e}", r.max_residual));
        }
        worst = worst.max(r.max_residual);
    }
    outcome(true, format!("k=2..7, max residual {worst:.3e}"))
}

fn semigroup() -> Outcome {
    let mut rng = rng(4);
    let modes: Vec<i32> = (-24..=24).collect();
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let f = random_modes(&mut rng, 256, &modes);
        let alpha = rng.random_range(0.0..2.0);
        let beta = rng.random_range(0.0..2.0);
        let r = fractional::verify_semigroup(&f, alpha, beta, 1e-8).expect("band-limited");
        if !r.pass {
            return outcome(false, format!("case {case} alpha={alpha} beta={beta} residual {:.3e}", r.max_residual));
        }
        worst = worst.max(r.max_residual);
    }
    outcome(true, format!("100 pairs, n=256, max relative residual {worst:.3e}"))
}

fn plane_wave() -> Outcome {
    let mut rng = rng(5);
    let mut worst: f64 = 0.0;
    for case in 0..30 {
        let n = 64;
        let length = rng.random_range(1.0..20.0);
        let hbar = rng.random_range(0.5..2.0);
        let mode = rng.random_range(1..n / 2) as f64;
        let p = hbar * TAU * mode / length;
        let alpha = rng.random_range(0.0..2.0);
        let r = fractional::verify_plane_wave_eigen(p / hbar, alpha, n, length, 1e-10).expect("grid mode");
        if !r.pass {
            return outcome(false, format!("case {case} p={p} alpha={alpha} residual {:.3e}", r.max_residual));
        }
        worst = worst.max(r.max_residual);
    }
    outcome(true, format!("30 cases, max residual {worst:.3e}"))
}

fn dispersion() -> Outcome {
    let mut rng = rng(6);
    let mut worst_on: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    for k in 2..=6 {
        for _ in 0..50 {
            let units = PhysicalUnits::new(rng.random_range(0.5..2.0), rng.random_range(0.5..2.0), rng.random_range(0.1..2.0))
                .expect("units");
            let p = [normal(&mut rng), normal(&mut rng), normal(&mut rng)];
            let e = units.on_shell_energy(p);
            let on = dirac::dispersion_residual(k, e, p, &units).expect("on shell");
            let off = dirac::dispersion_residual(k, 1.1 * e, p, &units).expect("off shell");
            worst_on = worst_on.max(on);
            min_ratio = min_ratio.min(off / on.max(f64::MIN_POSITIVE));
        }
    }
    let pass = worst_on < 1e-8 && min_ratio >= 1e3;
    outcome(pass, format!("k=2..6, max on-shell {worst_on:.3e}, min off/on ratio {min_ratio:.3e}"))
}

fn solution_counting() -> Outcome {
    let mut notes = Vec::new();
    for k in 2..=7 {
        let plus = dirac::rest_frame_solutions(k, Sign::Plus).expect("plus");
        let minus = dirac::rest_frame_solutions(k, Sign::Minus).expect("minus");
        let total = dirac::count_solutions(k).expect("count");
        if plus.dimension != k || minus.dimension != k || total != 2 * k {
            return outcome(false, format!("k={k}: nullities {}+{}, total {total}", plus.dimension, minus.dimension));
        }
        if !plus.agrees_with_claim() {
            return outcome(false, format!("k={k} plus indices {:?} vs {:?}", plus.free_indices, plus.claimed_indices));
        }
        if k == 2 && !minus.agrees_with_claim() {
            return outcome(false, format!("k=2 minus indices {:?} vs {:?}", minus.free_indices, minus.claimed_indices));
        }
        if !minus.agrees_with_claim() {
            notes.push(format!("k={k} minus {:?} vs claimed {:?}", minus.free_indices, minus.claimed_indices));
        }
    }
    outcome(
        true,
        format!("nullity k per sign for k=2..7, plus indices agree; minus disagreements: {}", notes.join("; ")),
    )
}

fn ansatz() -> Outcome {
    let expected = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
    for k in 2..=12 {
        let cls = dirac::classify_exponential_ansatz(k).expect("classify");
        let admissible = cls.admissible();
        let same = admissible.len() == expected.len()
            && expected.iter().all(|e| admissible.iter().any(|a| (a - e).norm() < 1e-9));
        if !same || !cls.unexpected_hits.is_empty() {
            let shown: Vec<String> = admissible.iter().map(|a| format!("{:+.3}{:+.3}i", a.re, a.im)).collect();
            return outcome(
                false,
                format!(
                    "k={k}: admissible set [{}], {} unexpected scan hits",
                    shown.join(", "),
                    cls.unexpected_hits.len()
                ),
            );
        }
    }
    outcome(true, "k=2..12 admit exactly 1, i, -1, -i")
}

fn adjoint_identity() -> Outcome {
    let mut rng = rng(9);
    let modes: Vec<i32> = (0..=12).collect();
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let f = random_modes(&mut rng, 128, &modes);
        let g = random_modes(&mut rng, 128, &modes);
        let alpha = rng.random_range(0.0..=2.0);
        let r = fractional::verify_adjoint_identity(&f, &g, alpha, 1e-10).expect("adjoint");
        if !r.pass {
            return outcome(false, format!("case {case} alpha={alpha} residual {:.3e}", r.max_residual));
        }
        worst = worst.max(r.max_residual);
    }
    // α = 1: ⟨f', g⟩ = −⟨f, g'⟩ for real periodic f, g
    let f = GridFunction::from_fn(64, TAU, |x| C64::new(x.sin() + 0.3 * (2.0 * x).cos(), 0.0)).expect("grid");
    let g = GridFunction::from_fn(64, TAU, |x| C64::new(x.cos() - 0.2 * (3.0 * x).sin() + 0.5 * x.sin(), 0.0)).expect("grid");
    let df = fractional::frac_derivative(&f, 1.0).expect("d1");
    let dg = fractional::frac_derivative(&g, 1.0).expect("d1");
    let lhs = df.inner(&g);
    let rhs = -f.inner(&dg);
    let classical = (lhs - rhs).norm() / lhs.norm().max(rhs.norm());
    let pass = classical < 1e-10;
    outcome(pass, format!("50 cases, max residual {worst:.3e}; integration by parts {classical:.3e}"))
}

fn ode_example() -> Outcome {
    let (g1, g2) = linsearch::reference_ode_pair();
    let points = linsearch::default_sample_points();
    let cond = linsearch::residual_ode_example(&g1, &g2, &points).expect("conditions");
    if cond >= 1e-12 {
        return outcome(false, format!("condition residual {cond:.3e}"));
    }
    let mut factor_worst: f64 = 0.0;
    for degree in 0..=6 {
        let r = linsearch::factor_operator_check(&g1, &g2, degree, degree as u64, 1e-10).expect("factor");
        if !r.pass {
            return outcome(false, format!("operator square, degree {degree}: {:.3e}", r.max_residual));
        }
        factor_worst = factor_worst.max(r.max_residual);
    }
    let mut rng = rng(10);
    let pts: Vec<f64> = (0..12).map(|i| 0.25 + 0.4 * i as f64).collect();
    let mut archive = Vec::new();
    let mut sol_worst: f64 = 0.0;
    for case in 0..10 {
        let c = rng.random_range(-0.25..6.0);
        let c1 = rng.random_range(-2.0..2.0);
        let c2 = rng.random_range(-2.0..2.0);
        let r = linsearch::verify_example_solutions(c, c1, c2, &pts, 1e-10).expect("solutions");
        if !r.pass {
            return outcome(false, format!("case {case} c={c}: {:.3e}", r.max_residual));
        }
        sol_worst = sol_worst.max(r.max_residual);
        archive.push(json!({
            "c": c,
            "C1": c1,
            "C2": c2,
            "second_order_residual": r.max_residual,
            "first_order_max_residual": r.params["first_order_max_residual"],
            "cases": r.cases,
        }));
    }
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("first_order_residuals.json");
    let archived = std::fs::write(&path, serde_json::to_string_pretty(&archive).expect("json")).is_ok();
    let first_max = archive
        .iter()
        .filter_map(|a| a["first_order_max_residual"].as_f64())
        .fold(0.0, f64::max);
    outcome(
        archived,
        format!(
            "conditions {cond:.1e}, operator square {factor_worst:.1e}, solutions {sol_worst:.1e}, first-order residual up to {first_max:.3e} (archived at {})",
            path.display()
        ),
    )
}

fn search() -> Outcome {
    let cfg = SearchConfig {
        restarts: 50,
        seed: 42,
        ..Default::default()
    };
    let feasible = [
        ("quadratic m=2 n=2", LinearizationSpec::commuting(2, 2, 2).expect("spec")),
        ("quadratic m=2 n=3", LinearizationSpec::commuting(2, 3, 2).expect("spec")),
        ("ode-example m=2", LinearizationSpec::ode_example(2, OdeAnsatz::Linear).expect("spec")),
    ];
    let mut notes = Vec::new();
    for (label, spec) in &feasible {
        let out = linsearch::search(spec, &cfg).expect("search");
        if !out.feasible || out.candidate.residual >= 1e-8 {
            return outcome(false, format!("{label}: best residual {:.3e}", out.candidate.residual));
        }
        notes.push(format!("{label} {:.1e} after {} restarts", out.candidate.residual, out.restarts.len()));
    }
    let spec = LinearizationSpec::commuting(2, 2, 1).expect("spec");
    let out = linsearch::search(&spec, &cfg).expect("search");
    if out.feasible || out.candidate.residual <= 0.5 {
        return outcome(false, format!("m=1: residual {:.3e}", out.candidate.residual));
    }
    notes.push(format!("m=1 stays at {:.4}", out.candidate.residual));
    outcome(true, notes.join("; "))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "generalized Clifford relation", run: clifford_relation, time_limit: Some(Duration::from_secs(60)), expected_failure: false },
        Criterion { id: 2, name: "Pauli adjoint powers", run: pauli_adjoint, time_limit: Some(Duration::from_secs(1)), expected_failure: false },
        Criterion { id: 3, name: "beta adjoint and unitarity", run: beta_adjoint_unitarity, time_limit: None, expected_failure: false },
        Criterion { id: 4, name: "fractional semigroup", run: semigroup, time_limit: Some(Duration::from_secs(5)), expected_failure: false },
        Criterion { id: 5, name: "plane-wave eigenvalue", run: plane_wave, time_limit: None, expected_failure: false },
        Criterion { id: 6, name: "dispersion determinant", run: dispersion, time_limit: None, expected_failure: false },
        Criterion { id: 7, name: "solution counting", run: solution_counting, time_limit: None, expected_failure: false },
        Criterion { id: 8, name: "exponential ansatz classification", run: ansatz, time_limit: None, expected_failure: true },
        Criterion { id: 9, name: "adjoint identity", run: adjoint_identity, time_limit: None, expected_failure: false },
        Criterion { id: 10, name: "operator example", run: ode_example, time_limit: None, expected_failure: false },
        Criterion { id: 11, name: "linearization search", run: search, time_limit: Some(Duration::from_secs(30)), expected_failure: false },
    ];
    let mut unexpected = 0;
    for c in &criteria {
        let start = Instant::now();
        let mut out = (c.run)();
        let elapsed = start.elapsed();
        if let Some(limit) = c.time_limit {
            if elapsed > limit {
                out.pass = false;
                out.summary.push_str(&format!("; over time limit {limit:?}"));
            }
        }
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        let note = match (c.expected_failure, out.pass) {
            (true, false) => " (known failure)",
            (true, true) => " (unexpected pass)",
            _ => "",
        };
        if out.pass == c.expected_failure {
            unexpected += 1;
        }
        println!(
            "criterion {:>2} {:<34} {verdict}{note} [{:.2?}] {}",
            c.id, c.name, elapsed, out.summary
        );
    }
    if unexpected > 0 {
        println!("{unexpected} criterion outcome(s) differ from expectations");
        std::process::exit(1);
    }
}
