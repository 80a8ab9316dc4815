//! Grid-then-golden-section scalar minimization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Search interval and effort for [`minimize_scalar`].
///
/// The coarse grid is log-spaced, which suits positive scale parameters such as
/// the slack `epsilon` of the upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeSpec {
    pub lo: f64,
    pub hi: f64,
    pub grid_points: usize,
    pub refine_iters: usize,
    pub tol: f64,
}

impl Default for MinimizeSpec {
    fn default() -> Self {
        Self {
            lo: 1e-4,
            hi: 50.0,
            grid_points: 200,
            refine_iters: 60,
            tol: 1e-9,
        }
    }
}

impl MinimizeSpec {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.lo < self.hi && self.hi.is_finite()) || self.grid_points < 2 {
            return Err(Error::InvalidParameter(format!("{self:?}")));
        }
        Ok(())
    }
}

fn probe<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    // +inf is a legitimate objective value (an infinite divergence term).
    if v.is_nan() || v == f64::NEG_INFINITY {
        Err(Error::NonFinite { at: x, value: v })
    } else {
        Ok(v)
    }
}

/// Returns `(argmin, min_value)` with `min_value == f(argmin)`.
///
/// The grid scan makes the result an upper bound on `min f` even for
/// multimodal objectives; golden-section refinement then runs on the two grid
/// cells around the best grid point.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, spec: &MinimizeSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let n = spec.grid_points;
    let (llo, lhi) = (spec.lo.ln(), spec.hi.ln());
    let grid: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                spec.hi
            } else {
                (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect();
    let mut best = (grid[0], probe(&f, grid[0])?);
    let mut best_i = 0;
    for (i, &x) in grid.iter().enumerate().skip(1) {
        let v = probe(&f, x)?;
        if v < best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    if best.1 == f64::INFINITY {
        return Ok(best);
    }

    let mut a = grid[best_i.saturating_sub(1)];
    let mut b = grid[(best_i + 1).min(n - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = probe(&f, c)?;
    let mut fd = probe(&f, d)?;
    for _ in 0..spec.refine_iters {
        if (b - a).abs() <= spec.tol * (1.0 + best.0.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = probe(&f, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = probe(&f, d)?;
        }
        if fc < best.1 {
            best = (c, fc);
        }
        if fd < best.1 {
            best = (d, fd);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_vertex() {
        let (x, v) = minimize_scalar(|e| (e - 1.0).powi(2), &MinimizeSpec::new(0.1, 10.0)).unwrap();
        assert!((x - 1.0).abs() < 1e-6);
        assert!(v < 1e-12);
    }

    #[test]
    fn constant_function() {
        let (_, v) = minimize_scalar(|_| 5.0, &MinimizeSpec::new(1.0, 2.0)).unwrap();
        assert_eq!(v, 5.0);
    }

    #[test]
    fn am_gm() {
        let (x, v) = minimize_scalar(|e| e + 1.0 / e, &MinimizeSpec::new(0.01, 100.0)).unwrap();
        assert!((x - 1.0).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-6);
    }

    #[test]
    fn nan_objective_is_an_error() {
        let err = minimize_scalar(|e| if e > 1.0 { f64::NAN } else { e }, &MinimizeSpec::new(0.1, 10.0));
        assert!(matches!(err, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn infinite_values_are_skipped() {
        let (x, v) = minimize_scalar(
            |e| if e > 2.0 { f64::INFINITY } else { (e - 1.5).powi(2) },
            &MinimizeSpec::new(0.1, 10.0),
        )
        .unwrap();
        assert!((x - 1.5).abs() < 1e-6 && v < 1e-10);
    }

    #[test]
    fn invalid_spec() {
        assert!(MinimizeSpec::new(0.0, 1.0).validate().is_err());
        assert!(MinimizeSpec::new(2.0, 1.0).validate().is_err());
    }

    #[test]
    fn result_is_below_dense_grid() {
        // Two local minima; the grid scan must land in the deeper one.
        let f = |x: f64| (x.ln() * 3.0).sin() + 0.05 * x;
        let spec = MinimizeSpec::new(0.05, 20.0);
        let (_, v) = minimize_scalar(f, &spec).unwrap();
        for i in 0..10_000 {
            let x = 0.05 + (20.0 - 0.05) * i as f64 / 9_999.0;
            assert!(v <= f(x) + spec.tol, "x = {x}");
        }
    }
}
