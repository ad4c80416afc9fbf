//! Scalar abstraction: the toolkit's math is generic over the floating-point
//! type. `f64` is the default used by the evaluation harness; `f32` is
//! supported for memory-constrained use (note the dictionary phases at GHz
//! carrier frequencies lose precision in single precision).

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign};
use rand::Rng;
use rand_distr::StandardNormal;
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Floating-point scalar the library is generic over.
pub trait Real:
    Float + FloatConst + NumAssign + Sum<Self> + Debug + Display + rustfft::FftNum
{
    /// One draw from the standard normal distribution N(0, 1).
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn of(v: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(v).expect("f64 conversion")
    }

    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("f64 conversion")
    }
}

impl Real for f32 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

impl Real for f64 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

/// `exp(j * theta)` as a unit-modulus complex number.
pub fn cis<F: Real>(theta: F) -> Complex<F> {
    Complex::new(theta.cos(), theta.sin())
}

/// Euclidean norm of a complex slice.
pub fn norm2<F: Real>(v: &[Complex<F>]) -> F {
    v.iter().map(|x| x.norm_sqr()).sum::<F>().sqrt()
}

/// SplitMix64 step, used to derive independent per-packet / per-band seeds
/// from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
