//! Scalar special functions and 1-D solvers.
//!
//! Everything here is pure; the only state is the [`Tolerance`] passed in.

use crate::error::{Error, Result};

/// Below this magnitude the `coth` forms switch to their Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Stopping rule shared by the root finder and the maximizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iter == 0 {
            return Err(Error::domain(format!(
                "tolerance requires abs_tol > 0, rel_tol > 0, max_iter >= 1 (got {abs_tol}, {rel_tol}, {max_iter})"
            )));
        }
        Ok(Tolerance {
            abs_tol,
            rel_tol,
            max_iter,
        })
    }

    fn width(&self, scale: f64) -> f64 {
        self.abs_tol + self.rel_tol * scale.abs()
    }
}

/// `ln(1 - e^{-x})` for `x > 0`.
///
/// Uses `ln(-expm1(-x))` below `ln 2` and `ln_1p(-e^{-x})` above it, which
/// keeps full relative precision on both sides.
pub fn ln_one_minus_exp_neg(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// `ln((1 - e^{-a}) / (1 - e^{-b}))` for `a`, `b` nonzero with the same sign.
///
/// For negative arguments both factors are negative; the identity
/// `ln(e^{|x|} - 1) = |x| + ln(1 - e^{-|x|})` keeps the result finite up to
/// the largest representable arguments.
pub fn log_ratio_one_minus_exp(a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a == 0.0 || b == 0.0 || (a > 0.0) != (b > 0.0) {
        return Err(Error::domain(format!(
            "log_ratio_one_minus_exp needs nonzero arguments of equal sign, got ({a}, {b})"
        )));
    }
    if a > 0.0 {
        Ok(ln_one_minus_exp_neg(a) - ln_one_minus_exp_neg(b))
    } else {
        let (pa, pb) = (-a, -b);
        Ok((pa - pb) + ln_one_minus_exp_neg(pa) - ln_one_minus_exp_neg(pb))
    }
}

/// `x·coth(x/2)`, an even function with minimum 2 at the origin.
pub fn x_coth_half_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_THRESHOLD {
        let x2 = x * x;
        // 2 + x²/6 - x⁴/360
        2.0 + x2 / 6.0 - x2 * x2 / 360.0
    } else {
        ax / (0.5 * ax).tanh()
    }
}

/// Bracketing root finder: Illinois-modified secant steps, with a bisection
/// step whenever the bracket fails to halve over three iterations.
///
/// Requires `f(lo)` and `f(hi)` of opposite sign (or one of them zero).
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::domain(format!(
            "root bracket needs lo < hi, got [{lo}, {hi}]"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::domain(format!(
            "root not bracketed: f({a}) = {fa:e}, f({b}) = {fb:e}"
        )));
    }

    // +1 when `a` was retained last step, -1 for `b`.
    let mut side = 0i8;
    let mut width_checkpoint = b - a;
    for iter in 0..tol.max_iter {
        let mut c = b - fb * (b - a) / (fb - fa);
        if iter % 3 == 2 {
            if b - a > 0.5 * width_checkpoint {
                c = 0.5 * (a + b);
            }
            width_checkpoint = b - a;
        }
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }

        let fc = f(c);
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }

        if b - a <= tol.width(a.abs().max(b.abs())) {
            return Ok(c);
        }
    }
    Err(Error::Convergence {
        iterations: tol.max_iter,
        width: b - a,
    })
}

/// Inverse of `x·tanh(x)` on `x >= 0`.
pub fn inverse_x_tanh_x(y: f64) -> Result<f64> {
    inverse_x_tanh_x_with(y, &Tolerance::default())
}

pub fn inverse_x_tanh_x_with(y: f64, tol: &Tolerance) -> Result<f64> {
    if !(y >= 0.0) || !y.is_finite() {
        return Err(Error::domain(format!(
            "inverse_x_tanh_x needs finite y >= 0, got {y}"
        )));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let hi = y.sqrt().max(y) + 1.0;
    find_root(|x| x * x.tanh() - y, 0.0, hi, tol)
}

/// Right-hand side `csch²(g(σ/2))` of the generalized uncertainty relation,
/// with `g` the inverse of `x·tanh(x)`.
pub fn generalized_tur_rhs(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!(
            "generalized TUR needs finite entropy production > 0, got {sigma}"
        )));
    }
    let x = inverse_x_tanh_x(0.5 * sigma)?;
    let s = x.sinh();
    Ok(1.0 / (s * s))
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
///
/// Converges to the global maximum when `f` is unimodal there, otherwise to
/// some local maximum. Returns `(argmax, max)`.
pub fn maximize_scalar<F>(f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::domain(format!(
            "search interval needs lo < hi, got [{lo}, {hi}]"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..tol.max_iter {
        if b - a <= tol.width(0.5 * (a + b)) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = f(d);
        }
    }
    let (x, fx) = if fc >= fd { (c, fc) } else { (d, fd) };
    Ok((x, fx))
}
