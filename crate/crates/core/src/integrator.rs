//! Adaptive Dormand-Prince 5(4) integrator for complex linear ODEs.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

type CVec = DVector<Complex64>;

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-10, abs: 1e-10 }
    }
}

const MAX_STEPS: usize = 50_000_000;

// Dormand-Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b_hat
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `y' = rhs(t, y)` from `(t0, y0)` and return the state at every time in
/// `outputs` (non-decreasing, all `>= t0`). Steps are shortened to land on each output.
pub fn integrate<F>(rhs: F, t0: f64, y0: &CVec, outputs: &[f64], tol: Tolerance) -> Result<Vec<CVec>>
where
    F: Fn(f64, &CVec) -> CVec,
{
    let mut out = Vec::with_capacity(outputs.len());
    let mut t = t0;
    let mut y = y0.clone();
    let mut k1 = rhs(t, &y);
    let mut h = initial_step(&rhs, t, &y, &k1, tol);
    let mut steps = 0usize;

    for &target in outputs {
        if target < t {
            return Err(Error::Domain("output times must be non-decreasing".into()));
        }
        while t < target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Numeric("integrator exceeded step budget".into()));
            }
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };

            let (y_new, k7, err) = dp_step(&rhs, t, &y, &k1, step, tol);
            if !err.is_finite() {
                return Err(Error::Numeric("integrator produced a non-finite state".into()));
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k1 = k7;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            // A forced short final step says nothing about the next natural step size.
            if !(last && err <= 1.0) {
                h = step * factor;
            }
            if h < f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::Numeric(format!("integrator step size underflow at t = {t}")));
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn dp_step<F>(rhs: &F, t: f64, y: &CVec, k1: &CVec, h: f64, tol: Tolerance) -> (CVec, CVec, f64)
where
    F: Fn(f64, &CVec) -> CVec,
{
    let k2 = rhs(t + C2 * h, &(y + k1 * c(h * A21)));
    let k3 = rhs(t + C3 * h, &(y + k1 * c(h * A31) + &k2 * c(h * A32)));
    let k4 = rhs(t + C4 * h, &(y + k1 * c(h * A41) + &k2 * c(h * A42) + &k3 * c(h * A43)));
    let k5 = rhs(
        t + C5 * h,
        &(y + k1 * c(h * A51) + &k2 * c(h * A52) + &k3 * c(h * A53) + &k4 * c(h * A54)),
    );
    let k6 = rhs(
        t + h,
        &(y + k1 * c(h * A61) + &k2 * c(h * A62) + &k3 * c(h * A63) + &k4 * c(h * A64) + &k5 * c(h * A65)),
    );
    let y_new = y + k1 * c(h * B1) + &k3 * c(h * B3) + &k4 * c(h * B4) + &k5 * c(h * B5) + &k6 * c(h * B6);
    let k7 = rhs(t + h, &y_new);
    let err_vec =
        k1 * c(h * E1) + &k3 * c(h * E3) + &k4 * c(h * E4) + &k5 * c(h * E5) + &k6 * c(h * E6) + &k7 * c(h * E7);

    let n = y.len().max(1) as f64;
    let sum: f64 = (0..y.len())
        .map(|i| {
            let scale = tol.abs + tol.rel * y[i].norm().max(y_new[i].norm());
            (err_vec[i].norm() / scale).powi(2)
        })
        .sum();
    (y_new, k7, (sum / n).sqrt())
}

fn initial_step<F>(rhs: &F, t: f64, y: &CVec, f0: &CVec, tol: Tolerance) -> f64
where
    F: Fn(f64, &CVec) -> CVec,
{
    let scale = |v: &CVec| -> f64 {
        let n = v.len().max(1) as f64;
        let s: f64 = (0..v.len())
            .map(|i| (v[i].norm() / (tol.abs + tol.rel * y[i].norm())).powi(2))
            .sum();
        (s / n).sqrt()
    };
    let d0 = scale(y);
    let d1 = scale(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = y + f0 * c(h0);
    let f1 = rhs(t + h0, &y1);
    let d2 = scale(&(&f1 - f0)) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

#[inline]
fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotating_decay() {
        // y' = (-0.05 + 0.3 i) y
        let lambda = Complex64::new(-0.05, 0.3);
        let y0 = CVec::from_element(1, c(1.0));
        let times = [0.0, 1.0, 10.0, 100.0];
        let ys = integrate(|_, y| y * lambda, 0.0, &y0, &times, Tolerance::default()).unwrap();
        for (t, y) in times.iter().zip(&ys) {
            let exact = (lambda * t).exp();
            assert!((y[0] - exact).norm() < 1e-9, "t={t}: {} vs {}", y[0], exact);
        }
    }

    #[test]
    fn rejects_backwards_outputs() {
        let y0 = CVec::from_element(1, c(1.0));
        assert!(integrate(|_, y| -y, 0.0, &y0, &[1.0, 0.5], Tolerance::default()).is_err());
    }
}
