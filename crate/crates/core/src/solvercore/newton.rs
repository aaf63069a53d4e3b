//! Damped Newton iteration for discretised boundary-value problems.

use super::banded::BandedMatrix;
use crate::error::{invalid, Result};

/// A square nonlinear system `F(x) = 0` with a banded Jacobian.
pub trait DiscreteSystem {
    fn dim(&self) -> usize;
    fn residual(&self, x: &[f64], out: &mut [f64]);
    fn jacobian(&self, x: &[f64]) -> BandedMatrix;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence threshold on the sup-norm of the residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest damping factor tried by the line search.
    pub min_damping: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            min_damping: 1.0 / 1024.0,
            armijo: 1e-4,
        }
    }
}

/// What happened during a Newton solve.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Sup-norm of the residual at the returned iterate.
    pub final_residual: f64,
    /// Euclidean residual norm after each accepted step, starting with the
    /// guess. This is the merit function of the line search, so it never increases.
    pub residual_history: Vec<f64>,
    /// Damping factor of each accepted step.
    pub damping_history: Vec<f64>,
    pub converged: bool,
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// Solve `F(x) = 0` from `guess` with a backtracking line search.
///
/// A step `x + λ dx` is accepted once `|F|₂` drops by the Armijo factor;
/// λ halves down to `min_damping`. Non-convergence is reported through
/// `converged = false`. Only a singular Jacobian is an error.
pub fn solve_bvp<S: DiscreteSystem + ?Sized>(
    system: &S,
    guess: Vec<f64>,
    options: &NewtonOptions,
) -> Result<(Vec<f64>, NewtonReport)> {
    let n = system.dim();
    if guess.len() != n {
        return Err(invalid(format!("guess has length {}, system has {n}", guess.len())));
    }
    let mut x = guess;
    let mut f = vec![0.0; n];
    let mut trial_f = vec![0.0; n];
    let mut trial_x = vec![0.0; n];
    system.residual(&x, &mut f);
    let mut norm = l2(&f);
    let mut report = NewtonReport {
        residual_history: vec![norm],
        ..Default::default()
    };
    report.final_residual = sup(&f);

    while report.iterations < options.max_iter {
        if report.final_residual <= options.tol {
            report.converged = true;
            break;
        }
        if !norm.is_finite() {
            break;
        }
        let jac = system.jacobian(&x);
        let lu = jac.lu()?;
        let mut dx: Vec<f64> = f.iter().map(|v| -v).collect();
        lu.solve_in_place(&mut dx);

        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda >= options.min_damping {
            for ((t, xi), di) in trial_x.iter_mut().zip(&x).zip(&dx) {
                *t = xi + lambda * di;
            }
            system.residual(&trial_x, &mut trial_f);
            let trial_norm = l2(&trial_f);
            if trial_norm.is_finite() && trial_norm <= norm * (1.0 - options.armijo * lambda) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
        std::mem::swap(&mut x, &mut trial_x);
        std::mem::swap(&mut f, &mut trial_f);
        norm = l2(&f);
        report.iterations += 1;
        report.residual_history.push(norm);
        report.damping_history.push(lambda);
        report.final_residual = sup(&f);
    }
    if report.final_residual <= options.tol {
        report.converged = true;
    }
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Componentwise x_i^2 = i + 1.
    struct Squares(usize);

    impl DiscreteSystem for Squares {
        fn dim(&self) -> usize {
            self.0
        }
        fn residual(&self, x: &[f64], out: &mut [f64]) {
            for (i, (o, xi)) in out.iter_mut().zip(x).enumerate() {
                *o = xi * xi - (i + 1) as f64;
            }
        }
        fn jacobian(&self, x: &[f64]) -> BandedMatrix {
            let mut j = BandedMatrix::zeros(self.0, 1, 1);
            for (i, xi) in x.iter().enumerate() {
                j.set(i, i, 2.0 * xi);
            }
            j
        }
    }

    #[test]
    fn converges_and_history_is_monotone() {
        let (x, rep) = solve_bvp(&Squares(4), vec![1.0; 4], &NewtonOptions::default()).unwrap();
        assert!(rep.converged);
        for (i, xi) in x.iter().enumerate() {
            assert!((xi - ((i + 1) as f64).sqrt()).abs() < 1e-10);
        }
        for w in rep.residual_history.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn singular_start_is_an_error() {
        assert!(solve_bvp(&Squares(3), vec![0.0; 3], &NewtonOptions::default()).is_err());
    }
}
