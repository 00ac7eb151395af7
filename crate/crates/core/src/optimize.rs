//! Derivative-free minimization and bracketing root finding.
//!
//! The Nelder–Mead simplex here treats `+∞` (and NaN) as "infeasible", which is how
//! the barrier objectives reject points outside their domain.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NelderMead {
    pub max_evals: usize,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// ...and the simplex diameter falls below this.
    pub x_tol: f64,
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { max_evals: 4000, f_tol: 1e-12, x_tol: 1e-9, initial_step: 0.2 }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

fn clean(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

impl NelderMead {
    /// One simplex run from `x0` (adaptive coefficients for the dimension).
    pub fn minimize(&self, f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            clean(f(x))
        };
        let f0 = eval(x0, &mut evals);
        if n == 0 {
            return Minimum { x: vec![], value: f0, evals, converged: true };
        }
        let nf = n as f64;
        let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
        for i in 0..n {
            let mut step = self.initial_step;
            let mut best = None;
            for _ in 0..12 {
                for sign in [1.0, -1.0] {
                    let mut x = x0.to_vec();
                    x[i] += sign * step;
                    let v = eval(&x, &mut evals);
                    if v.is_finite() {
                        best = Some((x, v));
                        break;
                    }
                }
                if best.is_some() {
                    break;
                }
                step *= 0.5;
            }
            simplex.push(best.unwrap_or_else(|| {
                let mut x = x0.to_vec();
                x[i] += step;
                (x, f64::INFINITY)
            }));
        }

        let mut converged = false;
        while evals < self.max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[n].1 - simplex[0].1;
            let diam = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&simplex[0].0).fold(0.0_f64, |a, (p, q)| a.max((p - q).abs())))
                .fold(0.0_f64, f64::max);
            if spread.is_finite() && spread <= self.f_tol && diam <= self.x_tol.max(1e-300) || diam < 1e-14 {
                converged = spread.is_finite();
                break;
            }
            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let towards = |t: f64, worst: &[f64]| -> Vec<f64> {
                centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect()
            };
            let worst = simplex[n].0.clone();
            let xr = towards(alpha, &worst);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = towards(alpha * beta, &worst);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = towards(alpha * gamma, &worst);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = towards(-gamma, &worst);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for item in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = best.iter().zip(&item.0).map(|(b, x)| b + delta * (x - b)).collect();
                let v = eval(&x, &mut evals);
                *item = (x, v);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum { x, value, evals, converged }
    }

    /// Restarts the simplex at the incumbent until a round improves by less than `f_tol`.
    pub fn minimize_restarting(&self, f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64], rounds: usize) -> Minimum {
        let mut best = self.minimize(f, x0);
        let mut step = self.initial_step;
        let mut total = best.evals;
        for _ in 1..rounds.max(1) {
            step *= 0.5;
            let nm = NelderMead { initial_step: step, ..self.clone() };
            let next = nm.minimize(f, &best.x);
            total += next.evals;
            let gain = best.value - next.value;
            if next.value <= best.value {
                best = Minimum { evals: total, ..next };
            }
            if !(gain > self.f_tol) {
                break;
            }
        }
        best.evals = total;
        best
    }
}

/// Root of `f` on `[lo, hi]` by bisection; requires a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.signum() != fhi.signum()) {
        return Err(Error::ConvergenceFailure(format!(
            "no sign change on [{lo}, {hi}]: f = {flo:.3e}, {fhi:.3e}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo) < tol {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock_minimum() {
        let nm = NelderMead { max_evals: 20000, ..Default::default() };
        let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nm.minimize_restarting(&mut f, &[-1.2, 1.0], 4);
        assert!(r.value < 1e-10, "{r:?}");
        assert!((r.x[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn infeasible_region_is_avoided() {
        // Minimum of (x-2)² restricted to x < 1 sits on the boundary.
        let nm = NelderMead::default();
        let mut f = |x: &[f64]| if x[0] < 1.0 { (x[0] - 2.0).powi(2) } else { f64::INFINITY };
        let r = nm.minimize(&mut f, &[0.0]);
        assert!(r.x[0] < 1.0 && r.x[0] > 0.999);
    }

    #[test]
    fn ten_dimensional_quadratic() {
        let nm = NelderMead { max_evals: 40000, ..Default::default() };
        let mut f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - 0.3).powi(2)).sum();
        let r = nm.minimize_restarting(&mut f, &[0.0; 10], 4);
        assert!(r.value < 1e-9, "{r:?}");
    }

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-12).is_err());
    }
}
