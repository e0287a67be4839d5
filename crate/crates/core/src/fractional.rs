//! Fourier fractional derivative on uniform periodic grids.
//!
//! `∂^α f = F^{-1}{ m_α(ω) F{f} }` with `m_α(ω) = e^{iπα/2} ω^α`, where `ω^α`
//! is taken on the principal branch: for `ω < 0`, `ω^α = |ω|^α e^{iπα}`.
//! With that choice `m_α m_β = m_{α+β}` holds for both signs of `ω`, so the
//! semigroup law is exact at the multiplier level. Because `m_α(-ω)` is not
//! the conjugate of `m_α(ω)` for non-integer `α`, the derivative of a real
//! signal is in general complex.
//!
//! Conventions:
//! * `0^α` is 0 for `α > 0` and 1 for `α = 0`; for `α < 0` (fractional
//!   integral) the zero mode is zeroed.
//! * For even `n` the unpaired Nyquist mode is treated as a positive frequency.
//! * Integer orders use the exact multiplier `(iω)^n`.

use std::f64::consts::{PI, TAU};

use rustfft::FftPlanner;
use serde_json::json;

use crate::error::{domain, precondition, Result};
use crate::matrix::C64;
use crate::params;
use crate::report::{CaseRecord, VerificationReport};

/// Band-limit requirement for the semigroup check: the top quarter of the
/// spectrum must sit below this fraction of the spectral peak.
pub const BAND_LIMIT_RATIO: f64 = 1e-13;

/// Uniform samples of a complex function on the periodic interval `[0, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    length: f64,
    samples: Vec<C64>,
}

impl GridFunction {
    /// `samples.len()` must be a power of two, at least 8; `length > 0`.
    pub fn new(length: f64, samples: Vec<C64>) -> Result<Self> {
        let n = samples.len();
        if n < 8 || !n.is_power_of_two() {
            return Err(domain(format!(
                "grid size must be a power of two >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(domain(format!("domain length must be positive, got {length}")));
        }
        if let Some(i) = samples
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(domain(format!("sample {i} is not finite")));
        }
        Ok(Self { length, samples })
    }

    /// Samples `f` at `x_j = j L / n`.
    pub fn from_fn(n: usize, length: f64, f: impl Fn(f64) -> C64) -> Result<Self> {
        let h = length / n as f64;
        Self::new(length, (0..n).map(|j| f(j as f64 * h)).collect())
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n() as f64
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.n()).map(move |j| j as f64 * h)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.n() == other.n() && self.length == other.length
    }

    /// `a·self + b·other` on a shared grid.
    pub fn combine(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(domain("grid functions live on different grids"));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self::new(self.length, samples)
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Result<Self> {
        Self::new(self.length, self.samples.iter().map(|&z| f(z)).collect())
    }

    /// Unnormalized forward DFT.
    pub fn spectrum(&self) -> Vec<C64> {
        let mut buf = self.samples.clone();
        FftPlanner::new().plan_fft_forward(self.n()).process(&mut buf);
        buf
    }

    /// Trapezoidal approximation of `∫ conj(self) · other dx` over one period.
    pub fn inner(&self, other: &Self) -> C64 {
        let h = self.spacing();
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * h
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }
}

/// Angular frequency of DFT bin `j` for `n` samples on a domain of length `L`.
pub fn grid_frequency(j: usize, n: usize, length: f64) -> f64 {
    let signed = if j <= n / 2 {
        j as f64
    } else {
        j as f64 - n as f64
    };
    TAU * signed / length
}

fn integer_order(alpha: f64) -> Option<i32> {
    (alpha.fract() == 0.0 && alpha.abs() <= 64.0).then_some(alpha as i32)
}

/// `i^n` without rounding.
fn i_pow(n: i32) -> C64 {
    match n.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// `e^{iπθ}`, exact when `θ` is an integer.
pub(crate) fn half_turns(theta: f64) -> C64 {
    match integer_order(theta) {
        Some(n) => i_pow(2 * n),
        None => C64::from_polar(1.0, PI * theta),
    }
}

/// Principal-branch `x^α` for real `x`, with `0^α` as documented above.
pub fn principal_real_pow(x: f64, alpha: f64) -> C64 {
    if x == 0.0 {
        return if alpha == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        };
    }
    if let Some(n) = integer_order(alpha) {
        return C64::new(x.powi(n), 0.0);
    }
    if x > 0.0 {
        C64::new(x.powf(alpha), 0.0)
    } else {
        half_turns(alpha) * x.abs().powf(alpha)
    }
}

/// Principal-branch `(i y)^α` for real `y`.
pub fn principal_imag_pow(y: f64, alpha: f64) -> C64 {
    if y == 0.0 {
        return principal_real_pow(0.0, alpha);
    }
    if let Some(n) = integer_order(alpha) {
        return i_pow(n) * y.powi(n);
    }
    // arg(iy) = ±π/2
    let sign = if y > 0.0 { 1.0 } else { -1.0 };
    half_turns(sign * alpha / 2.0) * y.abs().powf(alpha)
}

/// Per-bin multipliers of the order-`α` derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMultiplier {
    pub alpha: f64,
    pub multipliers: Vec<C64>,
}

impl SpectralMultiplier {
    pub fn new(alpha: f64, n: usize, length: f64) -> Self {
        let multipliers = (0..n)
            .map(|j| Self::symbol(alpha, grid_frequency(j, n, length)))
            .collect();
        Self { alpha, multipliers }
    }

    /// `e^{iπα/2} ω^α`.
    pub fn symbol(alpha: f64, omega: f64) -> C64 {
        if omega == 0.0 {
            return principal_real_pow(0.0, alpha);
        }
        if let Some(n) = integer_order(alpha) {
            // (iω)^n exactly
            return i_pow(n) * omega.powi(n);
        }
        half_turns(alpha / 2.0) * principal_real_pow(omega, alpha)
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if self.multipliers.len() != f.n() {
            return Err(domain("multiplier and grid sizes differ"));
        }
        let n = f.n();
        let mut planner = FftPlanner::new();
        let mut buf = f.samples.clone();
        planner.plan_fft_forward(n).process(&mut buf);
        for (z, m) in buf.iter_mut().zip(&self.multipliers) {
            *z *= m;
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        for z in &mut buf {
            *z *= scale;
        }
        GridFunction::new(f.length, buf)
    }
}

/// `∂^α f`. Negative `α` acts as a fractional integral with the zero mode
/// removed.
pub fn frac_derivative(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    if !alpha.is_finite() {
        return Err(domain(format!("order must be finite, got {alpha}")));
    }
    SpectralMultiplier::new(alpha, f.n(), f.length).apply(f)
}

/// Largest magnitude in the top quarter of the spectrum relative to the peak.
pub fn spectral_tail_ratio(f: &GridFunction) -> f64 {
    let spec = f.spectrum();
    let n = f.n();
    let peak = spec.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if peak == 0.0 {
        return 0.0;
    }
    let cutoff = 3 * n / 8;
    let tail = spec
        .iter()
        .enumerate()
        .filter(|(j, _)| {
            let signed = if *j <= n / 2 { *j } else { n - *j };
            signed > cutoff
        })
        .fold(0.0_f64, |m, (_, z)| m.max(z.norm()));
    tail / peak
}

/// `‖∂^α(∂^β f) − ∂^{α+β} f‖_∞ / ‖∂^{α+β} f‖_∞`. `f` must be band-limited.
pub fn verify_semigroup(
    f: &GridFunction,
    alpha: f64,
    beta: f64,
    tol: f64,
) -> Result<VerificationReport> {
    let tail = spectral_tail_ratio(f);
    if tail > BAND_LIMIT_RATIO {
        return Err(precondition(format!(
            "input is not band-limited: top-quarter spectral magnitude is {tail:.3e} of the peak (limit {BAND_LIMIT_RATIO:e})"
        )));
    }
    let composed = frac_derivative(&frac_derivative(f, beta)?, alpha)?;
    let direct = frac_derivative(f, alpha + beta)?;
    let scale = direct.max_abs();
    let abs = composed.max_abs_diff(&direct);
    let residual = if scale > 0.0 { abs / scale } else { abs };
    Ok(VerificationReport::with_residual(
        "semigroup",
        params! {
            "alpha" => alpha,
            "beta" => beta,
            "n" => f.n(),
            "length" => f.length,
            "tail_ratio" => tail,
        },
        residual,
        tol,
        vec![CaseRecord::new(format!("alpha={alpha} beta={beta}"), residual)],
    ))
}

/// Compares the grid derivative of `e^{i k x}` with the principal-branch
/// eigenvalue `(ik)^α`. `k = p/ħ` must be a grid frequency strictly inside
/// the Nyquist band.
pub fn verify_plane_wave_eigen(
    p_over_hbar: f64,
    alpha: f64,
    n: usize,
    length: f64,
    tol: f64,
) -> Result<VerificationReport> {
    let mode = p_over_hbar * length / TAU;
    let rounded = mode.round();
    if !(mode.is_finite() && (mode - rounded).abs() <= 1e-9 * rounded.abs().max(1.0)) {
        return Err(precondition(format!(
            "p/hbar = {p_over_hbar} is not an integer multiple of 2π/L (mode {mode})"
        )));
    }
    if rounded.abs() >= (n / 2) as f64 {
        return Err(precondition(format!(
            "mode {rounded} is not below the Nyquist index {}",
            n / 2
        )));
    }
    let wave = GridFunction::from_fn(n, length, |x| C64::from_polar(1.0, p_over_hbar * x))?;
    let eigen = principal_imag_pow(p_over_hbar, alpha);
    let d = frac_derivative(&wave, alpha)?;
    let expected = wave.map(|z| eigen * z)?;
    let scale = eigen.norm().max(1.0);
    let residual = d.max_abs_diff(&expected) / scale;
    Ok(VerificationReport::with_residual(
        "plane_wave_eigen",
        params! {
            "p_over_hbar" => p_over_hbar,
            "alpha" => alpha,
            "n" => n,
            "length" => length,
            "eigenvalue" => json!({"re": eigen.re, "im": eigen.im}),
        },
        residual,
        tol,
        vec![CaseRecord::new(format!("mode {rounded}"), residual)],
    ))
}

/// `⟨∂^α f, g⟩` against `⟨f, e^{-iπα} ∂^α g⟩`, both by trapezoidal quadrature.
///
/// The identity relies on `conj(m_α(ω)) = e^{-iπα} m_α(ω)`, which holds for
/// `ω ≥ 0` and for integer `α`; inputs with negative-frequency content and
/// non-integer `α` are expected to fail.
pub fn verify_adjoint_identity(
    f: &GridFunction,
    g: &GridFunction,
    alpha: f64,
    tol: f64,
) -> Result<VerificationReport> {
    if !f.same_grid(g) {
        return Err(domain("f and g must share a grid"));
    }
    let df = frac_derivative(f, alpha)?;
    let dg = frac_derivative(g, alpha)?;
    let lhs = df.inner(g);
    let rhs = f.inner(&dg) * half_turns(-alpha);
    let cs_bound = df.l2_norm() * g.l2_norm();
    let denom = lhs.norm().max(rhs.norm()).max(1e-12 * cs_bound);
    let residual = if denom > 0.0 {
        (lhs - rhs).norm() / denom
    } else {
        0.0
    };
    Ok(VerificationReport::with_residual(
        "adjoint_identity",
        params! {
            "alpha" => alpha,
            "n" => f.n(),
            "lhs" => json!({"re": lhs.re, "im": lhs.im}),
            "rhs" => json!({"re": rhs.re, "im": rhs.im}),
        },
        residual,
        tol,
        vec![CaseRecord::new(format!("alpha={alpha}"), residual)],
    ))
}

/// `𝓛(ψ, ∂^αψ) = (κ/2)(∂^αψ)² − V(ψ)` with `V(ψ) = Σ_n v_n ψ^n`, `n ≤ 6`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianSpec {
    pub kinetic_coefficient: f64,
    /// `v_0, v_1, …`
    pub potential: Vec<f64>,
    pub alpha: f64,
}

impl LagrangianSpec {
    pub const MAX_POTENTIAL_DEGREE: usize = 6;

    pub fn new(kinetic_coefficient: f64, potential: Vec<f64>, alpha: f64) -> Result<Self> {
        if potential.len() > Self::MAX_POTENTIAL_DEGREE + 1 {
            return Err(domain(format!(
                "potential degree {} exceeds {}",
                potential.len() - 1,
                Self::MAX_POTENTIAL_DEGREE
            )));
        }
        if !kinetic_coefficient.is_finite()
            || !alpha.is_finite()
            || potential.iter().any(|v| !v.is_finite())
        {
            return Err(domain("lagrangian coefficients must be finite"));
        }
        Ok(Self {
            kinetic_coefficient,
            potential,
            alpha,
        })
    }

    /// `V'(ψ)`
    pub fn potential_derivative(&self, psi: C64) -> C64 {
        // Horner on Σ n v_n ψ^{n-1}
        self.potential
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, (n, &v)| acc * psi + v * n as f64)
    }
}

/// Pointwise `∂𝓛/∂ψ + e^{-iπα} ∂^α(∂𝓛/∂(∂^αψ))`, i.e.
/// `−V'(ψ) + κ e^{-iπα} ∂^α ∂^α ψ`. For `α = 1` this is the classical
/// `−V'(ψ) − κψ''`.
pub fn euler_lagrange_residual(lagrangian: &LagrangianSpec, psi: &GridFunction) -> Result<GridFunction> {
    let alpha = lagrangian.alpha;
    let momentum = frac_derivative(psi, alpha)?
        .map(|z| z * lagrangian.kinetic_coefficient)?;
    let transported = frac_derivative(&momentum, alpha)?;
    let phase = half_turns(-alpha);
    let samples = psi
        .samples
        .iter()
        .zip(transported.samples())
        .map(|(&p, &t)| -lagrangian.potential_derivative(p) + phase * t)
        .collect();
    GridFunction::new(psi.length, samples)
}
