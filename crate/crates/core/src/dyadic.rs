use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::Ratio;

use crate::scalar::Real;

/// A dyadic rational `num / 2^exp`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: u64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: u64, exp: u32) -> Self {
        assert!(exp < 64, "dyadic exponent {exp} out of range");
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    /// `2^{-exp}`.
    pub fn unit(exp: u32) -> Self {
        Self::new(1, exp)
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        1u64 << self.exp
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (self.denominator() as f64)
    }

    pub fn to_real<T: Real>(&self) -> T {
        T::lit(self.num as f64) / T::lit(self.denominator() as f64)
    }

    pub fn to_ratio(&self) -> Ratio<BigInt> {
        Ratio::new(BigInt::from(self.num), BigInt::from(self.denominator()))
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        let a = self.num << (exp - self.exp);
        let b = rhs.num << (exp - rhs.exp);
        Dyadic::new(a.checked_add(b).expect("dyadic overflow"), exp)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let exp = self.exp.max(other.exp);
        let a = (self.num as u128) << (exp - self.exp);
        let b = (other.num as u128) << (exp - other.exp);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.denominator())
    }
}
