//! Generalized Pauli matrices, the four-generator β representation built from
//! them, and checks of the k-fold symmetrized product relations.
//!
//! Matrix indices are 1-based in the documentation (`P_{ij} = δ_{i+1,j}` with
//! `δ_{k+1,j} = δ_{1,j}`), 0-based in code.

use std::str::FromStr;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{domain, Error, Result};
use crate::matrix::{root_of_unity, ComplexMatrix, C64};
use crate::params;
use crate::report::{CaseRecord, VerificationReport};

/// Largest product order accepted by [`symmetrized_product`] and the full
/// relation check unless a different cap is passed explicitly.
pub const DEFAULT_MAX_ORDER: usize = 7;

/// Shift, clock and phase matrices of order `k`.
#[derive(Debug, Clone)]
pub struct PauliSet {
    pub k: usize,
    /// `e^{2πi/k}`
    pub omega: C64,
    /// `e^{πi/k}`
    pub xi: C64,
    /// `σ^1 = P`, `σ^2 = JP` (k odd) or `KP` (k even), `σ^3 = J`.
    pub sigma: [ComplexMatrix; 3],
    /// `(σ^2)^k = sigma2_power_sign · I`.
    pub sigma2_power_sign: i8,
}

impl PauliSet {
    pub fn sigma1(&self) -> &ComplexMatrix {
        &self.sigma[0]
    }
    pub fn sigma2(&self) -> &ComplexMatrix {
        &self.sigma[1]
    }
    pub fn sigma3(&self) -> &ComplexMatrix {
        &self.sigma[2]
    }
}

fn check_order(k: usize) -> Result<()> {
    if k < 2 {
        return Err(domain(format!("order k must be at least 2, got {k}")));
    }
    Ok(())
}

/// Cyclic shift `P_{ij} = δ_{i+1,j}`.
pub fn shift_matrix(k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(k, |i, j| {
        if (i + 1) % k == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Clock `J_{jj} = ω^j`, j = 1..k.
pub fn clock_matrix(k: usize) -> ComplexMatrix {
    let diag: Vec<C64> = (1..=k as i64).map(|j| root_of_unity(j, k as i64)).collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// Phase `K_{jj} = -ξ^{2j-1}`, j = 1..k.
pub fn phase_matrix(k: usize) -> ComplexMatrix {
    // ξ^{2j-1} = e^{2πi (2j-1) / 2k}
    let diag: Vec<C64> = (1..=k as i64)
        .map(|j| -root_of_unity(2 * j - 1, 2 * k as i64))
        .collect();
    ComplexMatrix::from_diagonal(&diag)
}

pub fn build_pauli(k: usize) -> Result<PauliSet> {
    check_order(k)?;
    let p = shift_matrix(k);
    let j = clock_matrix(k);
    let sigma2 = if k % 2 == 1 {
        &j * &p
    } else {
        &phase_matrix(k) * &p
    };
    let power = sigma2.pow(k as u32);
    let sigma2_power_sign = if power.get(0, 0).re >= 0.0 { 1 } else { -1 };
    Ok(PauliSet {
        k,
        omega: root_of_unity(1, k as i64),
        xi: root_of_unity(1, 2 * k as i64),
        sigma: [p, sigma2, j],
        sigma2_power_sign,
    })
}

/// The β-form generators `β^0..β^3` and their A-form rescaling.
#[derive(Debug, Clone)]
pub struct BetaRep {
    pub k: usize,
    pub beta: [ComplexMatrix; 4],
    /// `A^0 = β^0`, `A^j = e^{iπ/k} β^j`.
    pub a: [ComplexMatrix; 4],
}

impl BetaRep {
    /// Assembles a representation from arbitrary β-form generators of equal
    /// dimension; the A-form is derived.
    pub fn from_beta(k: usize, beta: [ComplexMatrix; 4]) -> Result<Self> {
        check_order(k)?;
        let dim = beta[0].dim();
        if beta.iter().any(|b| b.dim() != dim) {
            return Err(domain("all four generators must share a dimension"));
        }
        let phase = root_of_unity(1, 2 * k as i64);
        let a = [
            beta[0].clone(),
            beta[1].scale(phase),
            beta[2].scale(phase),
            beta[3].scale(phase),
        ];
        Ok(Self { k, beta, a })
    }

    pub fn dim(&self) -> usize {
        self.beta[0].dim()
    }

    /// Copy with one generator changed; the A-form is rebuilt.
    pub fn mutated(&self, mutation: &Mutation) -> Self {
        let mut beta = self.beta.clone();
        let idx = mutation.index();
        beta[idx] = match *mutation {
            Mutation::Identity(_) => ComplexMatrix::identity(self.dim()),
            Mutation::Scale(_, s) => beta[idx].scale(s),
            Mutation::Copy { from, .. } => self.beta[from].clone(),
            Mutation::Perturb { row, col, delta, .. } => {
                let mut m = beta[idx].clone();
                let d = self.dim();
                m.set(row % d, col % d, beta[idx].get(row % d, col % d) + delta);
                m
            }
        };
        Self::from_beta(self.k, beta).expect("mutation preserves shape")
    }
}

pub fn build_beta(k: usize) -> Result<BetaRep> {
    let pauli = build_pauli(k)?;
    let id = ComplexMatrix::identity(k);
    let xi = pauli.xi;
    let beta = [
        pauli.sigma3().kron(&id),
        pauli.sigma2().kron(pauli.sigma1()).scale(xi),
        pauli.sigma2().kron(pauli.sigma2()).scale(xi),
        pauli.sigma2().kron(pauli.sigma3()).scale(xi),
    ];
    BetaRep::from_beta(k, beta)
}

/// Deliberate corruption of one β generator, used to confirm that the
/// verifiers detect broken representations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mutation {
    /// Replace `β^μ` by the identity.
    Identity(usize),
    /// Multiply `β^μ` by a scalar.
    Scale(usize, C64),
    /// Overwrite `β^target` with a copy of `β^from`.
    Copy { target: usize, from: usize },
    /// Add `delta` to one entry of `β^μ`.
    Perturb {
        index: usize,
        row: usize,
        col: usize,
        delta: C64,
    },
}

impl Mutation {
    pub fn index(&self) -> usize {
        match *self {
            Mutation::Identity(i) | Mutation::Scale(i, _) => i,
            Mutation::Copy { target, .. } => target,
            Mutation::Perturb { index, .. } => index,
        }
    }
}

/// Parses `beta<μ>=identity`, `beta<μ>=scale:<real>`, `beta<μ>=copy:<ν>` or
/// `beta<μ>=perturb:<real>` (perturbs entry (0,0)).
impl FromStr for Mutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || domain(format!("unrecognized mutation '{s}'"));
        let (lhs, rhs) = s.split_once('=').ok_or_else(bad)?;
        let idx: usize = lhs
            .trim()
            .strip_prefix("beta")
            .and_then(|d| d.parse().ok())
            .filter(|&i| i < 4)
            .ok_or_else(bad)?;
        let (kind, arg) = match rhs.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (rhs.trim(), None),
        };
        let real = |a: Option<&str>| -> Result<f64> {
            a.and_then(|v| v.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(bad)
        };
        match kind {
            "identity" if arg.is_none() => Ok(Mutation::Identity(idx)),
            "scale" => Ok(Mutation::Scale(idx, C64::new(real(arg)?, 0.0))),
            "perturb" => Ok(Mutation::Perturb {
                index: idx,
                row: 0,
                col: 0,
                delta: C64::new(real(arg)?, 0.0),
            }),
            "copy" => {
                let from = arg
                    .and_then(|a| a.strip_prefix("beta").unwrap_or(a).parse::<usize>().ok())
                    .filter(|&i| i < 4)
                    .ok_or_else(bad)?;
                Ok(Mutation::Copy { target: idx, from })
            }
            _ => Err(bad()),
        }
    }
}

/// Average of all distinct orderings of a multiset of generators, where
/// `counts[g]` copies of `gens[g]` are used. Equal to `(1/k!) Σ_{S_k}` over
/// the expanded list, since each distinct word occurs `Π counts!` times.
/// Shared prefixes are multiplied once.
pub fn symmetrize_multiset(gens: &[&ComplexMatrix], counts: &[usize]) -> ComplexMatrix {
    assert_eq!(gens.len(), counts.len());
    let dim = gens[0].dim();
    let total: usize = counts.iter().sum();
    let mut acc = ComplexMatrix::zeros(dim);
    if total == 0 {
        return ComplexMatrix::identity(dim);
    }
    let factors: Vec<Factor> = gens.iter().map(|g| Factor::new(g)).collect();
    let mut counts = counts.to_vec();
    let mut words = 0u64;
    walk_words(&factors, &mut counts, None, total, &mut acc, &mut words);
    acc.scale(C64::new(1.0 / words as f64, 0.0))
}

/// A right factor, stored as `(row, value)` per column when it has exactly
/// one nonzero entry in every column.
enum Factor<'a> {
    Dense(&'a ComplexMatrix),
    Monomial(&'a ComplexMatrix, Vec<(usize, C64)>),
}

impl<'a> Factor<'a> {
    fn new(m: &'a ComplexMatrix) -> Self {
        let inner = m.as_inner();
        let mut cols = Vec::with_capacity(m.dim());
        for col in inner.column_iter() {
            let mut nz = col.iter().enumerate().filter(|(_, z)| **z != C64::new(0.0, 0.0));
            match (nz.next(), nz.next()) {
                (Some((r, &v)), None) => cols.push((r, v)),
                _ => return Factor::Dense(m),
            }
        }
        Factor::Monomial(m, cols)
    }

    fn matrix(&self) -> &ComplexMatrix {
        match self {
            Factor::Dense(m) | Factor::Monomial(m, _) => m,
        }
    }

    fn right_mul(&self, prefix: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Factor::Dense(m) => prefix * m,
            Factor::Monomial(_, cols) => {
                let p = prefix.as_inner();
                ComplexMatrix::from_fn(prefix.dim(), |i, j| {
                    let (r, v) = cols[j];
                    p[(i, r)] * v
                })
            }
        }
    }
}

fn walk_words(
    gens: &[Factor],
    counts: &mut [usize],
    prefix: Option<&ComplexMatrix>,
    remaining: usize,
    acc: &mut ComplexMatrix,
    words: &mut u64,
) {
    for g in 0..gens.len() {
        if counts[g] == 0 {
            continue;
        }
        let next = match prefix {
            None => gens[g].matrix().clone(),
            Some(p) => gens[g].right_mul(p),
        };
        if remaining == 1 {
            acc.add_assign(&next);
            *words += 1;
            continue;
        }
        counts[g] -= 1;
        walk_words(gens, counts, Some(&next), remaining - 1, acc, words);
        counts[g] += 1;
    }
}

fn check_product_list(mats: &[ComplexMatrix], cap: usize) -> Result<()> {
    if mats.is_empty() {
        return Err(domain("symmetrized product needs at least one factor"));
    }
    let dim = mats[0].dim();
    if mats.iter().any(|m| m.dim() != dim) {
        return Err(domain("all factors must share a dimension"));
    }
    if mats.len() > cap {
        return Err(Error::Resource(format!(
            "product order {} exceeds cap {cap}",
            mats.len()
        )));
    }
    Ok(())
}

/// `(1/k!) Σ_{σ∈S_k} M_{σ(1)} ⋯ M_{σ(k)}` with the default order cap.
pub fn symmetrized_product(mats: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    symmetrized_product_capped(mats, DEFAULT_MAX_ORDER)
}

pub fn symmetrized_product_capped(mats: &[ComplexMatrix], cap: usize) -> Result<ComplexMatrix> {
    check_product_list(mats, cap)?;
    // exactly equal factors collapse into one multiset label
    let mut gens: Vec<&ComplexMatrix> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for m in mats {
        match gens.iter().position(|g| *g == m) {
            Some(i) => counts[i] += 1,
            None => {
                gens.push(m);
                counts.push(1);
            }
        }
    }
    // canonical order makes the result bitwise independent of input order
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by(|&a, &b| entry_order(gens[a], gens[b]));
    let gens: Vec<&ComplexMatrix> = order.iter().map(|&i| gens[i]).collect();
    let counts: Vec<usize> = order.iter().map(|&i| counts[i]).collect();
    Ok(symmetrize_multiset(&gens, &counts))
}

fn entry_order(a: &ComplexMatrix, b: &ComplexMatrix) -> std::cmp::Ordering {
    a.as_inner()
        .iter()
        .zip(b.as_inner().iter())
        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Enumerates all `k!` permutations one by one with no sharing. Cross-check
/// mode for small orders.
pub fn symmetrized_product_raw(mats: &[ComplexMatrix], cap: usize) -> Result<ComplexMatrix> {
    check_product_list(mats, cap)?;
    let k = mats.len();
    let dim = mats[0].dim();
    let mut acc = ComplexMatrix::zeros(dim);
    let mut count = 0u64;
    for perm in (0..k).permutations(k) {
        let mut word = mats[perm[0]].clone();
        for &p in &perm[1..] {
            word = &word * &mats[p];
        }
        acc.add_assign(&word);
        count += 1;
    }
    Ok(acc.scale(C64::new(1.0 / count as f64, 0.0)))
}

/// Which relation to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationForm {
    /// A-form: targets `δ^{i1⋯ik}`.
    Delta,
    /// β-form: targets `g^{μ1⋯μk}` (+1 all-zero, -1 all-equal spatial, else 0).
    GMetric,
}

impl RelationForm {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationForm::Delta => "delta",
            RelationForm::GMetric => "g_metric",
        }
    }

    /// Target scalar for a sorted index multiset.
    pub fn target(self, indices: &[usize]) -> f64 {
        let all_equal = indices.windows(2).all(|w| w[0] == w[1]);
        match (self, all_equal) {
            (_, false) => 0.0,
            (RelationForm::Delta, true) => 1.0,
            (RelationForm::GMetric, true) if indices[0] == 0 => 1.0,
            (RelationForm::GMetric, true) => -1.0,
        }
    }
}

impl FromStr for RelationForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta" | "a" | "a-form" => Ok(RelationForm::Delta),
            "g_metric" | "g-metric" | "g" | "beta" => Ok(RelationForm::GMetric),
            _ => Err(domain(format!("unknown relation form '{s}'"))),
        }
    }
}

fn index_label(indices: &[usize]) -> String {
    format!("({})", indices.iter().map(|i| i.to_string()).join(","))
}

/// All `C(k+3, 3)` sorted index multisets of size `k` over {0,1,2,3}, in
/// lexicographic order.
pub fn index_multisets(k: usize) -> Vec<Vec<usize>> {
    (0..4).combinations_with_replacement(k).collect()
}

pub fn verify_generalized_clifford(
    rep: &BetaRep,
    form: RelationForm,
    tol: f64,
) -> Result<VerificationReport> {
    verify_generalized_clifford_capped(rep, form, tol, DEFAULT_MAX_ORDER)
}

/// Checks the symmetrized k-fold relation on every index multiset.
/// Multisets are processed in parallel; each is reduced sequentially in a
/// fixed order, so the report does not depend on the thread count.
pub fn verify_generalized_clifford_capped(
    rep: &BetaRep,
    form: RelationForm,
    tol: f64,
    cap: usize,
) -> Result<VerificationReport> {
    let k = rep.k;
    if k > cap {
        return Err(Error::Resource(format!("order {k} exceeds cap {cap}")));
    }
    let gens = match form {
        RelationForm::Delta => &rep.a,
        RelationForm::GMetric => &rep.beta,
    };
    let gen_refs: Vec<&ComplexMatrix> = gens.iter().collect();
    let multisets = index_multisets(k);
    let cases: Vec<CaseRecord> = multisets
        .par_iter()
        .map(|ms| {
            let mut counts = [0usize; 4];
            for &i in ms {
                counts[i] += 1;
            }
            let sym = symmetrize_multiset(&gen_refs, &counts);
            let target = form.target(ms);
            let residual = sym.distance_to_scalar(C64::new(target, 0.0));
            CaseRecord::new(index_label(ms), residual).with_detail(json!({ "target": target }))
        })
        .collect();
    Ok(VerificationReport::from_cases(
        "generalized_clifford",
        params! {
            "k" => k,
            "form" => form.as_str(),
            "dim" => rep.dim(),
            "multisets" => multisets.len(),
        },
        tol,
        cases,
    ))
}

/// Scaled residuals `(A-form, β-form)` of the k-th power identity at `x`.
pub fn power_identity_residuals(rep: &BetaRep, x: [C64; 4]) -> (f64, f64) {
    let k = rep.k as u32;
    let scale = x.iter().map(|z| z.norm()).sum::<f64>().powi(k as i32);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let combo = |gens: &[ComplexMatrix; 4]| {
        let mut acc = gens[0].scale(x[0]);
        for mu in 1..4 {
            acc = &acc + &gens[mu].scale(x[mu]);
        }
        acc.pow(k)
    };
    let delta_target: C64 = x.iter().map(|z| z.powu(k)).sum();
    let g_target = x[0].powu(k) - x[1].powu(k) - x[2].powu(k) - x[3].powu(k);
    (
        combo(&rep.a).distance_to_scalar(delta_target) / scale,
        combo(&rep.beta).distance_to_scalar(g_target) / scale,
    )
}

/// Checks `(Σ A^μ x_μ)^k = (Σ x_μ^k) I` and
/// `(Σ β^μ x_μ)^k = (x_0^k - x_1^k - x_2^k - x_3^k) I` at seeded random
/// complex points, with residuals scaled by `(Σ|x_μ|)^k`.
pub fn verify_power_identity(
    rep: &BetaRep,
    trials: usize,
    seed: u64,
    tol: f64,
) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = (0..trials.max(1))
        .map(|t| {
            let x: [C64; 4] = std::array::from_fn(|_| {
                C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            });
            let (ra, rb) = power_identity_residuals(rep, x);
            CaseRecord::new(format!("trial {t}"), ra.max(rb))
                .with_detail(json!({ "a_form": ra, "beta_form": rb }))
        })
        .collect();
    VerificationReport::from_cases(
        "power_identity",
        params! {"k" => rep.k, "trials" => trials.max(1), "seed" => seed},
        tol,
        cases,
    )
}

/// `(σ^j)† = (σ^j)^{k-1}` for j = 1, 2, 3.
pub fn verify_pauli_adjoint(k: usize, tol: f64) -> Result<VerificationReport> {
    let pauli = build_pauli(k)?;
    let cases = pauli
        .sigma
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let r = s.adjoint().max_abs_diff(&s.pow(k as u32 - 1));
            CaseRecord::new(format!("sigma{}", j + 1), r)
        })
        .collect();
    Ok(VerificationReport::from_cases(
        "pauli_adjoint",
        params! {"k" => k, "parity" => if k.is_multiple_of(2) { "even" } else { "odd" }},
        tol,
        cases,
    ))
}

/// `(β^0)† = (β^0)^{k-1}`, `(β^j)† = -(β^j)^{k-1}` and `β^μ (β^μ)† = I`.
pub fn verify_beta_adjoint_unitarity(k: usize, tol: f64) -> Result<VerificationReport> {
    let rep = build_beta(k)?;
    let mut cases = Vec::with_capacity(8);
    for (mu, b) in rep.beta.iter().enumerate() {
        let sign = if mu == 0 { 1.0 } else { -1.0 };
        let expected = b.pow(k as u32 - 1).scale(C64::new(sign, 0.0));
        cases.push(CaseRecord::new(
            format!("adjoint beta{mu}"),
            b.adjoint().max_abs_diff(&expected),
        ));
    }
    for (mu, b) in rep.beta.iter().enumerate() {
        let gram = b * &b.adjoint();
        cases.push(CaseRecord::new(
            format!("unitary beta{mu}"),
            gram.distance_to_scalar(C64::new(1.0, 0.0)),
        ));
    }
    Ok(VerificationReport::from_cases(
        "beta_adjoint_unitarity",
        params! {"k" => k},
        tol,
        cases,
    ))
}
