//! One-dimensional maximization: a coarse scan to bracket the peak, then
//! golden-section refinement inside the bracket.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_ITER: usize = 500;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("bad bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..MAX_ITER {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        }
    }
    // Endpoints are never probed by the interior points; include them.
    let mut best = if f1 >= f2 {
        Maximum { x: x1, value: f1 }
    } else {
        Maximum { x: x2, value: f2 }
    };
    for x in [a, b] {
        let v = f(x)?;
        if v > best.value {
            best = Maximum { x, value: v };
        }
    }
    Ok(best)
}

/// `points` samples of `[lo, hi]` on a linear or logarithmic grid.
pub fn grid(lo: f64, hi: f64, points: usize, scale: Scale) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let last = (points - 1) as f64;
            (0..points)
                .map(|i| {
                    let s = i as f64 / last;
                    match scale {
                        Scale::Linear => lo + (hi - lo) * s,
                        Scale::Log => (lo.ln() + (hi.ln() - lo.ln()) * s).exp(),
                    }
                })
                .collect()
        }
    }
}

/// Scan `f` over `points` samples, then golden-refine between the neighbours of the
/// best sample until the bracket is below `rel_tol` relative to the abscissa.
pub fn scan_and_refine<F>(mut f: F, lo: f64, hi: f64, points: usize, scale: Scale, rel_tol: f64) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if points < 3 {
        return Err(Error::Domain("scan needs at least 3 points".into()));
    }
    if scale == Scale::Log && !(lo > 0.0) {
        return Err(Error::Domain("logarithmic scan needs lo > 0".into()));
    }
    let xs = grid(lo, hi, points, scale);
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &x) in xs.iter().enumerate() {
        let v = f(x)?;
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    let left = xs[best.saturating_sub(1)];
    let right = xs[(best + 1).min(xs.len() - 1)];
    let refined = match scale {
        // Work in ln x so the stopping rule is relative in x.
        Scale::Log => {
            let m = golden_section_max(|u| f(u.exp()), left.ln(), right.ln(), rel_tol)?;
            Maximum {
                x: m.x.exp(),
                value: m.value,
            }
        }
        Scale::Linear => {
            let tol = rel_tol * left.abs().max(right.abs()).max(f64::MIN_POSITIVE);
            golden_section_max(&mut f, left, right, tol)?
        }
    };
    Ok(if refined.value >= best_v {
        refined
    } else {
        Maximum {
            x: xs[best],
            value: best_v,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parabola() {
        let m = golden_section_max(|x| Ok(-(x - 1.3) * (x - 1.3)), 0.0, 4.0, 1e-10).unwrap();
        assert_relative_eq!(m.x, 1.3, epsilon = 1e-7);
    }

    #[test]
    fn peak_on_boundary() {
        let m = golden_section_max(Ok, 0.0, 2.0, 1e-12).unwrap();
        assert_eq!(m.x, 2.0);
    }

    #[test]
    fn scan_finds_global_peak_of_bimodal() {
        // Golden section alone would lock onto the wrong hump from this bracket.
        let f = |x: f64| Ok((-(x - 0.02f64).powi(2) / 1e-5).exp() + 2.0 * (-(x - 3.0f64).powi(2)).exp());
        let m = scan_and_refine(f, 1e-3, 10.0, 400, Scale::Log, 1e-10).unwrap();
        assert_relative_eq!(m.x, 3.0, max_relative = 1e-6);
    }

    #[test]
    fn scalar_charging_power_peak() {
        // P(t) = (1 - e^{-u})^2 / u peaks where 2u = e^u - 1, u = 1.2564312086261697.
        let m = scan_and_refine(
            |u| Ok((1.0 - (-u).exp()).powi(2) / u),
            1e-4,
            100.0,
            2000,
            Scale::Log,
            1e-10,
        )
        .unwrap();
        assert_relative_eq!(m.x, 1.256_431_208_626_169_7, max_relative = 1e-7);
    }

    #[test]
    fn grids() {
        assert!(grid(0.0, 1.0, 0, Scale::Linear).is_empty());
        let g = grid(1e-3, 10.0, 5, Scale::Log);
        assert_relative_eq!(g[2], 0.1, max_relative = 1e-12);
        assert_relative_eq!(g[4], 10.0, max_relative = 1e-12);
    }
}
