//! Scalar abstractions shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
    + Entry<Real = Self>
{
    /// Converts an `f64` literal. Every literal used in the crate is finite,
    /// so the conversion cannot fail for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits in a float")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Matrix entry type: a real scalar or a complex number over one.
pub trait Entry: Copy + NumAssign + Neg<Output = Self> + Debug + Send + Sync + 'static {
    type Real: Real;

    /// Absolute value (real) or modulus (complex).
    fn modulus(self) -> Self::Real;
    fn from_real(r: Self::Real) -> Self;
}

impl Entry for f32 {
    type Real = f32;
    #[inline]
    fn modulus(self) -> f32 {
        self.abs()
    }
    #[inline]
    fn from_real(r: f32) -> f32 {
        r
    }
}

impl Entry for f64 {
    type Real = f64;
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn from_real(r: f64) -> f64 {
        r
    }
}

impl<T: Real> Entry for Complex<T> {
    type Real = T;
    #[inline]
    fn modulus(self) -> T {
        self.norm()
    }
    #[inline]
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

/// Componentwise compensated accumulator for complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexCompensatedSum<T> {
    re: CompensatedSum<T>,
    im: CompensatedSum<T>,
}

impl<T: Real> ComplexCompensatedSum<T> {
    pub fn new() -> Self {
        Self { re: CompensatedSum::new(), im: CompensatedSum::new() }
    }

    #[inline]
    pub fn add(&mut self, z: Complex<T>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex<T> {
        Complex::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_addends() {
        let mut acc = CompensatedSum::<f64>::new();
        acc.add(1.0);
        for _ in 0..10_000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1e-12)).abs() < 1e-20);
    }

    #[test]
    fn complex_modulus() {
        assert_eq!(Complex::new(3.0_f64, 4.0).modulus(), 5.0);
        assert_eq!((-2.5_f32).modulus(), 2.5);
    }
}
