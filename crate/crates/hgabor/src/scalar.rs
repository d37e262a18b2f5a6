//! Scalar abstraction for the numerical core.
//!
//! Everything downstream is generic over a floating-point scalar so the same
//! code instantiates at `f64` (the precision all stated tolerances assume)
//! and `f32`. The trait collects the bounds the core actually uses: `Float`
//! for elementary functions, `FloatConst` for pi, `FftNum` for rustfft, and
//! `ToPrimitive` so reports can always be emitted as `f64`.

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign, ToPrimitive};
use rustfft::FftNum;

pub trait Scalar: Float + FloatConst + FftNum + NumAssign + ToPrimitive + Default {
    /// Shorthand for converting a literal; panics only on NaN-free overflow,
    /// which cannot happen for the in-range constants used here.
    fn of(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).expect("literal conversion")
    }

    /// `Float::abs`, named so calls stay unambiguous next to `Signed::abs`.
    fn fabs(self) -> Self {
        Float::abs(self)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    fn two() -> Self {
        Self::of(2.0)
    }

    fn half() -> Self {
        Self::of(0.5)
    }
}

impl Scalar for f64 {}
impl Scalar for f32 {}

/// Complex number over the crate scalar.
pub type C<S> = Complex<S>;

/// Unit-modulus complex exponential `e^{i theta}`.
pub fn cis<S: Scalar>(theta: S) -> C<S> {
    C::new(theta.cos(), theta.sin())
}

/// `e^{2 pi i theta}`.
pub fn cis2pi<S: Scalar>(theta: S) -> C<S> {
    cis(S::TAU() * theta)
}
