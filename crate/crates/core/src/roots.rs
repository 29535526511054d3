//! Bracketed root finding for monotone scalar functions.
//!
//! Regula falsi with the Illinois weighting, falling back to bisection whenever
//! two consecutive steps fail to halve the bracket. The bracket always contains
//! a sign change, so convergence is guaranteed for continuous functions.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Stop once the bracket is narrower than this.
    pub x_tol: f64,
    /// Stop once `|f(x)|` is at or below this.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            x_tol: 1e-14,
            f_tol: 0.0,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("f({lo}) = {f_lo} and f({hi}) = {f_hi} do not bracket a root")]
    NotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("no convergence after {0} iterations")]
    MaxIterations(usize),
}

pub fn bracketed_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, opts: &RootOptions) -> Result<Root, RootError> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(RootError::NotBracketed {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    // which end was retained on the previous step (-1 = a, +1 = b)
    let mut retained = 0i8;
    let mut width_two_back = f64::INFINITY;
    let mut width_prev = b - a;
    for iter in 1..=opts.max_iter {
        let width = b - a;
        let interpolate = width <= 0.5 * width_two_back;
        let mut x = if interpolate {
            (a * fb - b * fa) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        if x <= a || x >= b {
            // bracket collapsed to adjacent floats
            let (x, fx) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
            return Ok(Root {
                x,
                residual: fx,
                iterations: iter,
            });
        }
        let fx = f(x);
        if fx == 0.0 || fx.abs() <= opts.f_tol {
            return Ok(Root {
                x,
                residual: fx,
                iterations: iter,
            });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if retained == 1 {
                fb *= 0.5;
            }
            retained = 1;
        } else {
            b = x;
            fb = fx;
            if retained == -1 {
                fa *= 0.5;
            }
            retained = -1;
        }
        width_two_back = width_prev;
        width_prev = width;
        if b - a <= opts.x_tol {
            let (x, fx) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
            return Ok(Root {
                x,
                residual: fx,
                iterations: iter,
            });
        }
    }
    Err(RootError::MaxIterations(opts.max_iter))
}
