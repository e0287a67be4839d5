//! Matrix linearizations of power-sum forms and of the operator
//! `x² d²/dx²`, expressed as residuals and searched for numerically.
//!
//! For commuting indeterminates, `Σ a^i x_i^n = (Σ γ^i x_i)^n` holds when the
//! symmetrized n-fold products of the `γ^i` equal `a^i δ^{i…i}`. For the
//! operator example, `x² d²/dx² = (γ¹(x) d/dx + γ²(x))²` with `γ¹ = G₁x`,
//! `γ² = G₂` is implied by
//!
//! ```text
//! (γ¹)² = x²,   γ¹ dγ²/dx + (γ²)² = 0,   γ¹ dγ¹/dx + γ¹γ² + γ²γ¹ = 0.
//! ```
//!
//! The general noncommuting cubic conditions (with nested commutators of the
//! indeterminates and the coefficients) are not searched here.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::json;

use crate::error::{domain, precondition, Result};
use crate::gencliff::symmetrize_multiset;
use crate::lm::{minimize, LmOptions};
use crate::matrix::{ComplexMatrix, C64};
use crate::params;
use crate::report::{CaseRecord, ComplexValue, VerificationReport};

/// Shape of `γ¹` in the operator example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeAnsatz {
    /// `γ¹ = G₁x`
    Linear,
    /// `γ¹ = G₁x + H₁`
    Affine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// Scalar indeterminates commuting with the coefficients.
    Commuting,
    /// `x₁ = d/dx`, `x₂ = 1` with x-dependent coefficients.
    OdeExample(OdeAnsatz),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearizationSpec {
    pub power: usize,
    pub nvars: usize,
    pub weights: Vec<f64>,
    pub coupling: Coupling,
    pub rep_dim: usize,
}

impl LinearizationSpec {
    /// Unit-weight power sum of `power` ∈ {2, 3} in `nvars` variables.
    pub fn commuting(power: usize, nvars: usize, rep_dim: usize) -> Result<Self> {
        Self::weighted(power, vec![1.0; nvars], rep_dim)
    }

    pub fn weighted(power: usize, weights: Vec<f64>, rep_dim: usize) -> Result<Self> {
        let spec = Self {
            power,
            nvars: weights.len(),
            weights,
            coupling: Coupling::Commuting,
            rep_dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ode_example(rep_dim: usize, ansatz: OdeAnsatz) -> Result<Self> {
        let spec = Self {
            power: 2,
            nvars: 2,
            weights: vec![1.0, 1.0],
            coupling: Coupling::OdeExample(ansatz),
            rep_dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rep_dim == 0 {
            return Err(domain("representation dimension must be at least 1"));
        }
        if self.nvars == 0 || self.weights.len() != self.nvars {
            return Err(domain("need one weight per variable and at least one variable"));
        }
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(domain("weights must be finite"));
        }
        match self.coupling {
            Coupling::Commuting if !(2..=3).contains(&self.power) => {
                Err(domain(format!("power must be 2 or 3, got {}", self.power)))
            }
            Coupling::OdeExample(_) if self.power != 2 || self.nvars != 2 => {
                Err(domain("the operator example fixes power = 2 and nvars = 2"))
            }
            _ => Ok(()),
        }
    }

    /// Number of matrices the search optimizes over.
    fn matrix_count(&self) -> usize {
        match self.coupling {
            Coupling::Commuting => self.nvars,
            Coupling::OdeExample(OdeAnsatz::Linear) => 2,
            Coupling::OdeExample(OdeAnsatz::Affine) => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
    pub success_tol: f64,
    pub sample_points: Vec<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_iterations: 200,
            seed: 0,
            success_tol: 1e-8,
            sample_points: default_sample_points(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(domain("at least one restart is required"));
        }
        if self.sample_points.is_empty() || self.sample_points.iter().any(|&x| x == 0.0 || !x.is_finite()) {
            return Err(domain("sample points must be finite and nonzero"));
        }
        Ok(())
    }
}

/// Eight evenly spaced points in [0.5, 2].
pub fn default_sample_points() -> Vec<f64> {
    (0..8).map(|i| 0.5 + 1.5 * i as f64 / 7.0).collect()
}

/// A known representation for the operator example:
/// `G₁ = [[1, 1], [0, -1]]`, `G₂ = [[-1, -1], [1, 1]]`.
pub fn reference_ode_pair() -> (ComplexMatrix, ComplexMatrix) {
    (
        ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, -1.0]]).expect("2x2"),
        ComplexMatrix::from_real_rows(&[&[-1.0, -1.0], &[1.0, 1.0]]).expect("2x2"),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Constant(Vec<ComplexMatrix>),
    Ode {
        g1: ComplexMatrix,
        h1: Option<ComplexMatrix>,
        g2: ComplexMatrix,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRep {
    pub coefficients: Coefficients,
    pub residual: f64,
}

impl CandidateRep {
    /// Validates dimensions against `spec` and computes the residual.
    pub fn new(spec: &LinearizationSpec, points: &[f64], coefficients: Coefficients) -> Result<Self> {
        let residual = match (&coefficients, spec.coupling) {
            (Coefficients::Constant(mats), Coupling::Commuting) => {
                check_dims(mats.iter(), spec.rep_dim)?;
                residual_commuting(spec, mats)?
            }
            (Coefficients::Ode { g1, h1, g2 }, Coupling::OdeExample(_)) => {
                check_dims([g1, g2].into_iter().chain(h1.iter()), spec.rep_dim)?;
                residual_ode_affine(g1, h1.as_ref(), g2, points)?
            }
            _ => return Err(domain("coefficient shape does not match the coupling")),
        };
        Ok(Self {
            coefficients,
            residual,
        })
    }

    pub fn matrices(&self) -> Vec<&ComplexMatrix> {
        match &self.coefficients {
            Coefficients::Constant(m) => m.iter().collect(),
            Coefficients::Ode { g1, h1, g2 } => {
                let mut v = vec![g1, g2];
                v.extend(h1.iter());
                v
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mat = |m: &ComplexMatrix| -> Vec<Vec<ComplexValue>> {
            (0..m.dim())
                .map(|i| (0..m.dim()).map(|j| m.get(i, j).into()).collect())
                .collect()
        };
        match &self.coefficients {
            Coefficients::Constant(ms) => json!({
                "kind": "constant",
                "gamma": ms.iter().map(mat).collect::<Vec<_>>(),
                "residual": self.residual,
            }),
            Coefficients::Ode { g1, h1, g2 } => json!({
                "kind": "ode",
                "g1": mat(g1),
                "h1": h1.as_ref().map(mat),
                "g2": mat(g2),
                "residual": self.residual,
            }),
        }
    }
}

fn check_dims<'a>(mats: impl Iterator<Item = &'a ComplexMatrix>, dim: usize) -> Result<()> {
    for m in mats {
        if m.dim() != dim {
            return Err(domain(format!("matrix of dimension {} where {dim} expected", m.dim())));
        }
    }
    Ok(())
}

/// Symmetrized products minus their weighted targets, one matrix per index
/// multiset.
fn commuting_violations(spec: &LinearizationSpec, mats: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let refs: Vec<&ComplexMatrix> = mats.iter().collect();
    let id = ComplexMatrix::identity(spec.rep_dim);
    (0..spec.nvars)
        .combinations_with_replacement(spec.power)
        .map(|ms| {
            let mut counts = vec![0usize; spec.nvars];
            for &i in &ms {
                counts[i] += 1;
            }
            let sym = symmetrize_multiset(&refs, &counts);
            if ms.iter().all_equal() {
                &sym - &id.scale(C64::new(spec.weights[ms[0]], 0.0))
            } else {
                sym
            }
        })
        .collect()
}

/// `Σ_multisets ‖sym(γ^{i1}⋯γ^{in}) − a^i δ^{i1…in} I‖_∞²`.
pub fn residual_commuting(spec: &LinearizationSpec, mats: &[ComplexMatrix]) -> Result<f64> {
    spec.validate()?;
    if spec.coupling != Coupling::Commuting {
        return Err(domain("spec is not a commuting linearization"));
    }
    if mats.len() != spec.nvars {
        return Err(domain(format!("expected {} matrices, got {}", spec.nvars, mats.len())));
    }
    check_dims(mats.iter(), spec.rep_dim)?;
    Ok(commuting_violations(spec, mats)
        .iter()
        .map(|v| v.max_abs().powi(2))
        .sum())
}

/// The three operator-example conditions at one point `x`, for
/// `γ¹ = G₁x + H₁` and `γ² = G₂`.
fn ode_violations(g1: &ComplexMatrix, h1: Option<&ComplexMatrix>, g2: &ComplexMatrix, x: f64) -> [ComplexMatrix; 3] {
    let n = g1.dim();
    let xs = C64::new(x, 0.0);
    let gamma1 = match h1 {
        Some(h) => &g1.scale(xs) + h,
        None => g1.scale(xs),
    };
    let id = ComplexMatrix::identity(n);
    let c1 = &(&gamma1 * &gamma1) - &id.scale(C64::new(x * x, 0.0));
    // dγ²/dx = 0
    let c2 = g2 * g2;
    let c3 = &(&(&gamma1 * g1) + &(&gamma1 * g2)) + &(g2 * &gamma1);
    [c1, c2, c3]
}

pub fn residual_ode_example(g1: &ComplexMatrix, g2: &ComplexMatrix, points: &[f64]) -> Result<f64> {
    residual_ode_affine(g1, None, g2, points)
}

/// Max over `points` of the summed squared `‖·‖_∞` condition violations.
pub fn residual_ode_affine(
    g1: &ComplexMatrix,
    h1: Option<&ComplexMatrix>,
    g2: &ComplexMatrix,
    points: &[f64],
) -> Result<f64> {
    let n = g1.dim();
    if g2.dim() != n || h1.is_some_and(|h| h.dim() != n) {
        return Err(domain("coefficient matrices must share a dimension"));
    }
    if points.is_empty() || points.iter().any(|&x| x == 0.0 || !x.is_finite()) {
        return Err(domain("sample points must be finite and nonzero"));
    }
    Ok(points
        .iter()
        .map(|&x| {
            ode_violations(g1, h1, g2, x)
                .iter()
                .map(|v| v.max_abs().powi(2))
                .sum::<f64>()
        })
        .fold(0.0, f64::max))
}

fn unpack(theta: &DVector<f64>, count: usize, dim: usize) -> Vec<ComplexMatrix> {
    let per = dim * dim;
    (0..count)
        .map(|m| {
            let inner = DMatrix::from_fn(dim, dim, |i, j| {
                let base = 2 * (m * per + i * dim + j);
                C64::new(theta[base], theta[base + 1])
            });
            ComplexMatrix::new(inner).unwrap_or_else(|_| ComplexMatrix::zeros(dim))
        })
        .collect()
}

fn flatten_into(out: &mut Vec<f64>, m: &ComplexMatrix) {
    for z in m.as_inner().iter() {
        out.push(z.re);
        out.push(z.im);
    }
}

fn residual_vector(spec: &LinearizationSpec, points: &[f64], theta: &DVector<f64>) -> DVector<f64> {
    let mats = unpack(theta, spec.matrix_count(), spec.rep_dim);
    let mut out = Vec::new();
    match spec.coupling {
        Coupling::Commuting => {
            for v in commuting_violations(spec, &mats) {
                flatten_into(&mut out, &v);
            }
        }
        Coupling::OdeExample(ansatz) => {
            let h1 = (ansatz == OdeAnsatz::Affine).then(|| &mats[2]);
            for &x in points {
                for v in ode_violations(&mats[0], h1, &mats[1], x) {
                    flatten_into(&mut out, &v);
                }
            }
        }
    }
    DVector::from_vec(out)
}

fn candidate_from(spec: &LinearizationSpec, points: &[f64], theta: &DVector<f64>) -> Result<CandidateRep> {
    let mut mats = unpack(theta, spec.matrix_count(), spec.rep_dim);
    let coefficients = match spec.coupling {
        Coupling::Commuting => Coefficients::Constant(mats),
        Coupling::OdeExample(ansatz) => {
            let h1 = (ansatz == OdeAnsatz::Affine).then(|| mats.pop().expect("three matrices"));
            let g2 = mats.pop().expect("g2");
            let g1 = mats.pop().expect("g1");
            Coefficients::Ode { g1, h1, g2 }
        }
    };
    CandidateRep::new(spec, points, coefficients)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartRecord {
    pub index: usize,
    pub residual: f64,
    /// Sum of squared entry violations minimized by the solver.
    pub objective: f64,
    pub iterations: usize,
}

/// Result of [`search`]. Infeasibility is an empirical finding, not a proof.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub feasible: bool,
    /// First restart meeting the tolerance, otherwise the best one.
    pub candidate: CandidateRep,
    pub candidate_restart: usize,
    pub restarts: Vec<RestartRecord>,
}

/// Seeded multistart Levenberg-Marquardt over the real and imaginary parts of
/// all coefficient entries. Restart `r` draws its start from the ChaCha8
/// stream `r` of `cfg.seed`, scaled by `1/√m`; the lowest-index restart that
/// meets `cfg.success_tol` wins.
pub fn search(spec: &LinearizationSpec, cfg: &SearchConfig) -> Result<SearchOutcome> {
    spec.validate()?;
    cfg.validate()?;
    let nparams = 2 * spec.matrix_count() * spec.rep_dim * spec.rep_dim;
    let scale = 1.0 / (spec.rep_dim as f64).sqrt();
    let opts = LmOptions {
        max_iterations: cfg.max_iterations,
        ..LmOptions::default()
    };
    let points = &cfg.sample_points;
    let mut records = Vec::with_capacity(cfg.restarts);
    let mut best: Option<(usize, CandidateRep)> = None;
    for r in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(r as u64);
        let start = DVector::from_fn(nparams, |_, _| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * scale
        });
        let out = minimize(|t| residual_vector(spec, points, t), start, &opts);
        let cand = candidate_from(spec, points, &out.params)?;
        records.push(RestartRecord {
            index: r,
            residual: cand.residual,
            objective: out.cost,
            iterations: out.iterations,
        });
        let success = cand.residual <= cfg.success_tol;
        let better = best.as_ref().is_none_or(|(_, b)| cand.residual < b.residual);
        if success || better {
            best = Some((r, cand));
        }
        if success {
            break;
        }
    }
    let (candidate_restart, candidate) = best.expect("at least one restart");
    Ok(SearchOutcome {
        feasible: candidate.residual <= cfg.success_tol,
        candidate,
        candidate_restart,
        restarts: records,
    })
}

pub fn search_report(spec: &LinearizationSpec, cfg: &SearchConfig, out: &SearchOutcome) -> VerificationReport {
    let cases = out
        .restarts
        .iter()
        .map(|r| {
            CaseRecord::new(format!("restart {}", r.index), r.residual)
                .with_detail(json!({ "iterations": r.iterations, "objective": r.objective }))
        })
        .collect();
    let coupling = match spec.coupling {
        Coupling::Commuting => "commuting",
        Coupling::OdeExample(OdeAnsatz::Linear) => "ode_example",
        Coupling::OdeExample(OdeAnsatz::Affine) => "ode_example_affine",
    };
    VerificationReport::with_residual(
        "linearization_search",
        params! {
            "power" => spec.power,
            "nvars" => spec.nvars,
            "weights" => spec.weights,
            "coupling" => coupling,
            "rep_dim" => spec.rep_dim,
            "restarts" => cfg.restarts,
            "max_iterations" => cfg.max_iterations,
            "seed" => cfg.seed,
            "feasible" => out.feasible,
            "candidate_restart" => out.candidate_restart,
            "candidate" => out.candidate.to_json(),
        },
        out.candidate.residual,
        cfg.success_tol,
        cases,
    )
}

/// `‖(Σ γ^i x_i)^n − Σ a^i x_i^n I‖_∞ / (Σ|x_i|)^n` at a commuting scalar
/// point.
pub fn power_sum_residual(spec: &LinearizationSpec, mats: &[ComplexMatrix], x: &[C64]) -> f64 {
    let mut lin = ComplexMatrix::zeros(spec.rep_dim);
    for (m, &xi) in mats.iter().zip(x) {
        lin.add_assign(&m.scale(xi));
    }
    let target: C64 = spec
        .weights
        .iter()
        .zip(x)
        .map(|(&a, xi)| xi.powu(spec.power as u32) * a)
        .sum();
    let scale = x.iter().map(|z| z.norm()).sum::<f64>().powi(spec.power as i32).max(1e-300);
    lin.pow(spec.power as u32).distance_to_scalar(target) / scale
}

/// Exponents `s = (1 ± √(4c+1))/2` of the power-law solutions of `x²ψ'' = cψ`.
fn example_exponents(c: f64) -> (f64, f64) {
    let r = (4.0 * c + 1.0).sqrt();
    ((1.0 + r) / 2.0, (1.0 - r) / 2.0)
}

/// Checks that `ψ₀ = f(x)(1,0)` and `ψ₁ = f(x)(0,1)` with
/// `f = c√x (C₁ √x^{√(4c+1)} + C₂ √x^{-√(4c+1)})` solve `x²ψ'' = cψ`, using
/// exact power-law derivatives. The first-order residual
/// `‖(γ¹∂_x + γ²)ψ − √c ψ‖_∞` with the reference pair is measured and stored
/// in each case's detail; it does not enter the verdict.
pub fn verify_example_solutions(c: f64, c1: f64, c2: f64, points: &[f64], tol: f64) -> Result<VerificationReport> {
    if !(c.is_finite() && 4.0 * c + 1.0 >= 0.0) {
        return Err(domain(format!("need c >= -1/4, got {c}")));
    }
    if points.is_empty() || points.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(domain("sample points must be positive"));
    }
    let (s1, s2) = example_exponents(c);
    let f = |x: f64| c * (c1 * x.powf(s1) + c2 * x.powf(s2));
    let df = |x: f64| c * (c1 * s1 * x.powf(s1 - 1.0) + c2 * s2 * x.powf(s2 - 1.0));
    let d2f = |x: f64| c * (c1 * s1 * (s1 - 1.0) * x.powf(s1 - 2.0) + c2 * s2 * (s2 - 1.0) * x.powf(s2 - 2.0));
    let (g1, g2) = reference_ode_pair();
    let sqrt_c = (c >= 0.0).then(|| c.sqrt());
    let mut first_order_max: Option<f64> = sqrt_c.map(|_| 0.0);
    let cases = points
        .iter()
        .map(|&x| {
            let lhs = x * x * d2f(x);
            let rhs = c * f(x);
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            let second = (lhs - rhs).abs() / scale;
            let first: Option<Vec<f64>> = sqrt_c.map(|sc| {
                (0..2)
                    .map(|comp| {
                        // (γ¹∂ + γ²)(f e) − √c f e, γ¹ = G₁x
                        (0..2)
                            .map(|row| {
                                let v = g1.get(row, comp) * (x * df(x)) + g2.get(row, comp) * f(x)
                                    - if row == comp { sc * f(x) } else { 0.0 };
                                v.norm()
                            })
                            .fold(0.0, f64::max)
                    })
                    .collect()
            });
            if let (Some(m), Some(v)) = (first_order_max.as_mut(), first.as_ref()) {
                *m = v.iter().copied().fold(*m, f64::max);
            }
            CaseRecord::new(format!("x={x}"), second).with_detail(json!({
                "psi0_first_order": first.as_ref().map(|v| v[0]),
                "psi1_first_order": first.as_ref().map(|v| v[1]),
            }))
        })
        .collect();
    Ok(VerificationReport::from_cases(
        "example_solutions",
        params! {
            "c" => c,
            "C1" => c1,
            "C2" => c2,
            "exponents" => [s1, s2],
            "first_order_max_residual" => first_order_max,
        },
        tol,
        cases,
    ))
}

/// Vector-valued polynomial `Σ_j v_j x^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorPolynomial {
    dim: usize,
    coeffs: Vec<DVector<C64>>,
}

impl VectorPolynomial {
    pub fn new(dim: usize, coeffs: Vec<DVector<C64>>) -> Result<Self> {
        if coeffs.iter().any(|c| c.len() != dim) {
            return Err(domain("coefficient vectors must have the polynomial's dimension"));
        }
        Ok(Self { dim, coeffs })
    }

    pub fn monomial(dim: usize, component: usize, degree: usize) -> Self {
        let mut coeffs = vec![DVector::zeros(dim); degree + 1];
        coeffs[degree][component] = C64::new(1.0, 0.0);
        Self { dim, coeffs }
    }

    pub fn coeffs(&self) -> &[DVector<C64>] {
        &self.coeffs
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, v)| v * C64::new(j as f64, 0.0))
            .collect();
        Self { dim: self.dim, coeffs }
    }

    pub fn times_x(&self) -> Self {
        let mut coeffs = vec![DVector::zeros(self.dim)];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { dim: self.dim, coeffs }
    }

    pub fn apply(&self, m: &ComplexMatrix) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|v| m.mul_vec(v)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = DVector::zeros(self.dim);
        let coeffs = (0..len)
            .map(|j| self.coeffs.get(j).unwrap_or(&zero) + other.coeffs.get(j).unwrap_or(&zero))
            .collect();
        Self { dim: self.dim, coeffs }
    }

    /// Largest coefficient difference, padding the shorter with zeros.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = DVector::zeros(self.dim);
        (0..len)
            .map(|j| {
                let d = self.coeffs.get(j).unwrap_or(&zero) - other.coeffs.get(j).unwrap_or(&zero);
                d.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
            })
            .fold(0.0, f64::max)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0_f64, |m, z| m.max(z.norm()))
    }
}

/// `(G₁ x d/dx + G₂) f`.
pub fn apply_first_order(g1: &ComplexMatrix, g2: &ComplexMatrix, f: &VectorPolynomial) -> VectorPolynomial {
    f.derivative().times_x().apply(g1).add(&f.apply(g2))
}

/// Compares `(γ¹∂_x + γ²)² f` with `x² f''` coefficientwise for every
/// monomial `x^j e_c` with `j ≤ degree` and for five seeded random
/// polynomials. Requires the pair to satisfy the three conditions to 1e-10.
pub fn factor_operator_check(
    g1: &ComplexMatrix,
    g2: &ComplexMatrix,
    degree: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let pre = residual_ode_example(g1, g2, &default_sample_points())?;
    if pre > 1e-10 {
        return Err(precondition(format!(
            "coefficient pair violates the operator-example conditions (residual {pre:.3e})"
        )));
    }
    let dim = g1.dim();
    let check = |f: &VectorPolynomial| -> f64 {
        let lhs = apply_first_order(g1, g2, &apply_first_order(g1, g2, f));
        let rhs = f.derivative().derivative().times_x().times_x();
        lhs.max_coeff_diff(&rhs) / rhs.max_coeff().max(1.0)
    };
    let mut cases = Vec::new();
    for j in 0..=degree {
        for comp in 0..dim {
            let f = VectorPolynomial::monomial(dim, comp, j);
            cases.push(CaseRecord::new(format!("x^{j} e{comp}"), check(&f)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..5 {
        let coeffs = (0..=degree)
            .map(|_| {
                DVector::from_fn(dim, |_, _| {
                    C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
                })
            })
            .collect();
        let f = VectorPolynomial::new(dim, coeffs)?;
        cases.push(CaseRecord::new(format!("random {t}"), check(&f)));
    }
    Ok(VerificationReport::from_cases(
        "factor_operator",
        params! {"degree" => degree, "seed" => seed, "dim" => dim},
        tol,
        cases,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }
    fn sz() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(LinearizationSpec::commuting(4, 2, 2).is_err());
        assert!(LinearizationSpec::commuting(2, 0, 2).is_err());
        assert!(LinearizationSpec::commuting(2, 2, 0).is_err());
        assert!(LinearizationSpec::commuting(3, 2, 2).is_ok());
        let mut s = LinearizationSpec::ode_example(2, OdeAnsatz::Linear).unwrap();
        s.power = 3;
        assert!(s.validate().is_err());
    }

    #[test]
    fn pauli_pair_has_zero_residual() {
        let spec = LinearizationSpec::commuting(2, 2, 2).unwrap();
        assert_eq!(residual_commuting(&spec, &[sx(), sz()]).unwrap(), 0.0);
    }

    #[test]
    fn identity_partner_fails() {
        let spec = LinearizationSpec::commuting(2, 2, 2).unwrap();
        let r = residual_commuting(&spec, &[sx(), ComplexMatrix::identity(2)]).unwrap();
        // {σx, I}/2 = σx
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_pair() {
        let spec = LinearizationSpec::weighted(2, vec![2.0, 3.0], 2).unwrap();
        let a = sx().scale(C64::new(2f64.sqrt(), 0.0));
        let b = sz().scale(C64::new(3f64.sqrt(), 0.0));
        assert!(residual_commuting(&spec, &[a, b]).unwrap() < 1e-28);
    }

    #[test]
    fn commuting_dim_mismatch() {
        let spec = LinearizationSpec::commuting(2, 2, 2).unwrap();
        assert!(residual_commuting(&spec, &[sx(), ComplexMatrix::identity(3)]).is_err());
        assert!(residual_commuting(&spec, &[sx()]).is_err());
    }

    #[test]
    fn reference_pair_conditions() {
        let (g1, g2) = reference_ode_pair();
        assert_eq!(residual_ode_example(&g1, &g2, &default_sample_points()).unwrap(), 0.0);
    }

    #[test]
    fn identity_and_zero_pair() {
        let pts = [0.5, 1.0, 2.0];
        let id = ComplexMatrix::identity(2);
        let zero = ComplexMatrix::zeros(2);
        // only condition three survives: x·I
        let r = residual_ode_example(&id, &zero, &pts).unwrap();
        assert!((r - 4.0).abs() < 1e-14);
        // zero candidate: (γ¹)² − x² = −x², so x⁴ per point
        let r = residual_ode_example(&zero, &zero, &pts).unwrap();
        assert!((r - 16.0).abs() < 1e-14);
        assert!(residual_ode_example(&zero, &zero, &[0.0]).is_err());
    }

    #[test]
    fn example_solutions_exponents() {
        let pts = [0.5, 1.0, 1.7, 3.0];
        let r = verify_example_solutions(2.0, 1.0, 0.0, &pts, 1e-10).unwrap();
        assert!(r.pass);
        assert_eq!(r.params["exponents"][0].as_f64().unwrap(), 2.0);
        assert_eq!(r.params["exponents"][1].as_f64().unwrap(), -1.0);
        assert!(verify_example_solutions(2.0, 0.0, 1.0, &pts, 1e-10).unwrap().pass);
        let r = verify_example_solutions(0.0, 1.0, 1.0, &pts, 1e-10).unwrap();
        assert!(r.pass && r.max_residual == 0.0);
        // c = 2, C1 = 1: f = 2x², first-order residual is nonzero
        let r = verify_example_solutions(2.0, 1.0, 0.0, &pts, 1e-10).unwrap();
        assert!(r.params["first_order_max_residual"].as_f64().unwrap() > 0.1);
    }

    #[test]
    fn example_solutions_domain() {
        assert!(verify_example_solutions(-0.3, 1.0, 1.0, &[1.0], 1e-10).is_err());
        assert!(verify_example_solutions(1.0, 1.0, 1.0, &[-1.0], 1e-10).is_err());
        let r = verify_example_solutions(-0.25, 1.0, 1.0, &[1.0, 2.0], 1e-10).unwrap();
        assert!(r.pass);
        assert!(r.params["first_order_max_residual"].is_null());
    }

    #[test]
    fn operator_square_on_cubic() {
        let (g1, g2) = reference_ode_pair();
        let f = VectorPolynomial::monomial(2, 0, 3);
        let lhs = apply_first_order(&g1, &g2, &apply_first_order(&g1, &g2, &f));
        let expected = VectorPolynomial::monomial(2, 0, 3);
        let expected = VectorPolynomial::new(2, expected.coeffs().iter().map(|v| v * C64::new(6.0, 0.0)).collect()).unwrap();
        assert!(lhs.max_coeff_diff(&expected) < 1e-15);
        let r = factor_operator_check(&g1, &g2, 4, 7, 1e-12).unwrap();
        assert!(r.pass);
        let constant = VectorPolynomial::monomial(2, 1, 0);
        let lhs = apply_first_order(&g1, &g2, &apply_first_order(&g1, &g2, &constant));
        assert_eq!(lhs.max_coeff(), 0.0);
    }

    #[test]
    fn operator_check_precondition() {
        let id = ComplexMatrix::identity(2);
        assert!(matches!(
            factor_operator_check(&id, &id, 3, 0, 1e-10),
            Err(crate::Error::Precondition(_))
        ));
    }

    #[test]
    fn search_quadratic_pair() {
        let spec = LinearizationSpec::commuting(2, 2, 2).unwrap();
        let out = search(&spec, &SearchConfig { seed: 3, ..Default::default() }).unwrap();
        assert!(out.feasible, "{:?}", out.restarts);
        assert!(out.candidate.residual < 1e-8);
    }

    #[test]
    fn search_scalar_infeasible() {
        let spec = LinearizationSpec::commuting(2, 2, 1).unwrap();
        let cfg = SearchConfig { restarts: 10, ..Default::default() };
        let out = search(&spec, &cfg).unwrap();
        assert!(!out.feasible);
        assert_eq!(out.restarts.len(), 10);
        // analytic minimum of (u-1)² + (v-1)² + uv is 2/3
        assert!(out.candidate.residual >= 0.5);
        assert!((out.candidate.residual - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn search_is_deterministic() {
        let spec = LinearizationSpec::ode_example(2, OdeAnsatz::Linear).unwrap();
        let cfg = SearchConfig { restarts: 5, seed: 11, ..Default::default() };
        let a = search(&spec, &cfg).unwrap();
        let b = search(&spec, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn search_rejects_bad_config() {
        let spec = LinearizationSpec::commuting(2, 2, 2).unwrap();
        assert!(search(&spec, &SearchConfig { restarts: 0, ..Default::default() }).is_err());
        assert!(search(&spec, &SearchConfig { sample_points: vec![0.0], ..Default::default() }).is_err());
    }

    #[test]
    fn affine_ansatz_accepts_reference_pair() {
        let (g1, g2) = reference_ode_pair();
        let spec = LinearizationSpec::ode_example(2, OdeAnsatz::Affine).unwrap();
        let cand = CandidateRep::new(
            &spec,
            &default_sample_points(),
            Coefficients::Ode { g1, h1: Some(ComplexMatrix::zeros(2)), g2 },
        )
        .unwrap();
        assert_eq!(cand.residual, 0.0);
    }
}
