//! Damped Gauss-Newton (Levenberg-Marquardt) on real parameter vectors.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop once `Σ r_i²` drops below this.
    pub cost_floor: f64,
    pub initial_damping: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            cost_floor: 1e-28,
            initial_damping: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub params: DVector<f64>,
    /// `Σ r_i²` at `params`.
    pub cost: f64,
    pub iterations: usize,
}

fn sum_sq(r: &DVector<f64>) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Central-difference Jacobian. Exact up to rounding for residuals that are
/// at most quadratic in the parameters.
fn jacobian(f: &impl Fn(&DVector<f64>) -> DVector<f64>, x: &DVector<f64>, m: usize) -> DMatrix<f64> {
    let n = x.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut probe = x.clone();
    for j in 0..n {
        let h = 1e-6 * x[j].abs().max(1.0);
        probe[j] = x[j] + h;
        let up = f(&probe);
        probe[j] = x[j] - h;
        let down = f(&probe);
        probe[j] = x[j];
        jac.set_column(j, &((up - down) / (2.0 * h)));
    }
    jac
}

pub fn minimize(
    residual: impl Fn(&DVector<f64>) -> DVector<f64>,
    start: DVector<f64>,
    opts: &LmOptions,
) -> LmOutcome {
    let mut x = start;
    let mut r = residual(&x);
    let mut cost = sum_sq(&r);
    let mut lambda = opts.initial_damping;
    let mut iterations = 0;
    while iterations < opts.max_iterations && cost > opts.cost_floor {
        iterations += 1;
        let jac = jacobian(&residual, &x, r.len());
        let jtj = jac.tr_mul(&jac);
        let grad = jac.tr_mul(&r);
        let mut improved = false;
        while lambda < 1e12 {
            let mut lhs = jtj.clone();
            for i in 0..lhs.nrows() {
                lhs[(i, i)] += lambda * (jtj[(i, i)] + 1e-9);
            }
            let step = match lhs.cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    lambda *= 4.0;
                    continue;
                }
            };
            let trial = &x + &step;
            let r_trial = residual(&trial);
            let c_trial = sum_sq(&r_trial);
            if c_trial.is_finite() && c_trial < cost {
                let tiny_step = step.norm() <= 1e-15 * (1.0 + x.norm());
                x = trial;
                r = r_trial;
                cost = c_trial;
                lambda = (lambda / 3.0).max(1e-12);
                improved = !tiny_step;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    LmOutcome {
        params: x,
        cost,
        iterations,
    }
}
