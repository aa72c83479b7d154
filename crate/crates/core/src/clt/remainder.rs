//! The remainder `w` in `e^{ix} = (1+ix)·e^{-x²/2 + w(x)}`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `w(x) = x²/2 + ix − Log(1+ix)` with the principal logarithm, `|x| < 1`.
///
/// Written as `x²/2 − ½·ln(1+x²) + i·(x − atan x)` so the small-`x` regime,
/// where `w ≈ ix³/3 + x⁴/4`, keeps full relative accuracy in `ln_1p`.
pub fn w_remainder(x: f64) -> Result<Complex64> {
    if !(x.abs() < 1.0) {
        return Err(Error::Domain(x));
    }
    Ok(w_unchecked(x))
}

#[inline]
pub(crate) fn w_unchecked(x: f64) -> Complex64 {
    let x2 = x * x;
    Complex64::new(0.5 * x2 - 0.5 * x2.ln_1p(), x - x.atan())
}

/// `(1+ix)·e^{-x²/2 + w(x)}`, which should reproduce `e^{ix}`.
pub fn reconstruct_exp_ix(x: f64) -> Result<Complex64> {
    let w = w_remainder(x)?;
    Ok(Complex64::new(1.0, x) * (Complex64::new(-0.5 * x * x, 0.0) + w).exp())
}
