//! Scalar abstractions.
//!
//! The analytic side of the crate (Cantor geometry, spherical potentials)
//! is written against [`Real`], implemented for `f32` and `f64`. The
//! algebraic side (intersection numbers, masses, Newton polyhedra) is
//! written against [`Exact`], implemented for every `Ratio<I>` over a
//! signed primitive or big integer.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, Signed, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact ordered field (rationals over some integer type).
pub trait Exact:
    Clone + Num + Signed + PartialOrd + Ord + Debug + Display + Send + Sync + 'static
{
    fn from_int(n: i64) -> Self;

    fn from_frac(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn is_integral(&self) -> bool;

    /// Smallest integer `>= self`, if it fits in `i64`.
    fn ceil_i64(&self) -> Option<i64>;

    /// Numerator and denominator in lowest terms, denominator positive.
    fn num_den(&self) -> (String, String);

    fn to_f64_approx(&self) -> f64;

    /// Denominator in lowest terms, if it fits in `u64`.
    fn denom_u64(&self) -> Option<u64>;

    /// `"num/den"` rendering used by every serialized output.
    fn fraction_string(&self) -> String {
        let (n, d) = self.num_den();
        format!("{n}/{d}")
    }

    fn pow_u32(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl<I> Exact for Ratio<I>
where
    I: Integer + Signed + Clone + FromPrimitive + ToPrimitive + Display + Debug + Send + Sync + 'static,
{
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(I::from_i64(n).expect("integer fits scalar"))
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn ceil_i64(&self) -> Option<i64> {
        self.ceil().to_integer().to_i64()
    }

    fn num_den(&self) -> (String, String) {
        (self.numer().to_string(), self.denom().to_string())
    }

    fn denom_u64(&self) -> Option<u64> {
        self.denom().to_u64()
    }

    fn to_f64_approx(&self) -> f64 {
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        if n.is_finite() && d.is_finite() {
            n / d
        } else {
            let (nm, ne) = scaled(&self.numer().to_string());
            let (dm, de) = scaled(&self.denom().to_string());
            nm / dm * 10f64.powi(ne - de)
        }
    }
}

// Huge integers: keep 17 leading digits and rescale by the digit count.
fn scaled(digits: &str) -> (f64, i32) {
    let (sign, body) = match digits.strip_prefix('-') {
        Some(b) => (-1.0, b),
        None => (1.0, digits),
    };
    let head = &body[..body.len().min(17)];
    let mantissa: f64 = head.parse().unwrap_or(f64::NAN);
    (sign * mantissa, (body.len() - head.len()) as i32)
}

/// Arbitrary-precision rational.
pub type BigRational = Ratio<BigInt>;

/// Parses `"p/q"`, `"p"` or a decimal-free integer into an exact scalar.
pub fn parse_fraction<T: Exact>(s: &str) -> Option<T> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?),
        None => (s.parse::<i64>().ok()?, 1),
    };
    if den == 0 {
        return None;
    }
    Some(T::from_frac(num, den))
}
