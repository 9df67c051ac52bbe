//! Residual masses from intersection numbers on a blowup of `P^{n-1}`.
//!
//! With `ι(p) = (H - cE)^p · H^{n-2-p} · E` for `p = 0..=n-2`,
//!
//! `e_n = 1 + c Σ_p (2^{n-1-p} - 1) ι(p)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::monomial::{family_ideal, multiplicity_closed_form, Family};
use crate::newton::covolume_grid;
use crate::scalar::{BigRational, Exact};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    /// No blowup: `ι ≡ 0`.
    Trivial,
    /// `E = H`: `ι(p) = (1 - c)^p`.
    Hyperplane,
    /// Blowup of a point: `ι(n-2) = c^{n-2}`, zero below.
    Point,
    Custom,
}

impl Geometry {
    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Trivial => "trivial",
            Geometry::Hyperplane => "hyperplane",
            Geometry::Point => "point",
            Geometry::Custom => "custom",
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(Geometry::Trivial),
            "hyperplane" => Ok(Geometry::Hyperplane),
            "point" => Ok(Geometry::Point),
            "custom" => Ok(Geometry::Custom),
            other => Err(Error::Family(format!("unknown geometry '{other}'"))),
        }
    }
}

impl From<Family> for Geometry {
    fn from(f: Family) -> Self {
        match f {
            Family::Hyperplane => Geometry::Hyperplane,
            Family::Point => Geometry::Point,
        }
    }
}

/// The table `ι(0..=n-2)` together with `n`, `c` and its origin.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionData<T> {
    n: usize,
    c: T,
    iota: Vec<T>,
    geometry: Geometry,
}

impl<T: Exact> IntersectionData<T> {
    /// Built-in geometries, with `c ∈ [0, 1]`.
    pub fn new(geometry: Geometry, n: usize, c: T) -> Result<Self> {
        Self::build(geometry, n, c, None, false)
    }

    pub fn trivial(n: usize, c: T) -> Result<Self> {
        Self::new(Geometry::Trivial, n, c)
    }

    pub fn hyperplane(n: usize, c: T) -> Result<Self> {
        Self::new(Geometry::Hyperplane, n, c)
    }

    pub fn point(n: usize, c: T) -> Result<Self> {
        Self::new(Geometry::Point, n, c)
    }

    /// User-supplied table; only length and nonnegativity are checked.
    pub fn custom(n: usize, c: T, iota: Vec<T>) -> Result<Self> {
        Self::build(Geometry::Custom, n, c, Some(iota), false)
    }

    /// General constructor. With `allow_any_c`, every `c >= 0` is accepted.
    pub fn build(geometry: Geometry, n: usize, c: T, iota: Option<Vec<T>>, allow_any_c: bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::Family(format!("n = {n} must be at least 2")));
        }
        if c < T::zero() || (!allow_any_c && c > T::one()) {
            return Err(Error::CRange(c.fraction_string()));
        }
        let len = n - 1;
        let iota = match (geometry, iota) {
            (Geometry::Custom, Some(t)) => {
                if t.len() != len {
                    return Err(Error::Iota(format!("expected {len} entries, got {}", t.len())));
                }
                if let Some(bad) = t.iter().find(|v| **v < T::zero()) {
                    return Err(Error::Iota(format!("negative entry {}", bad.fraction_string())));
                }
                t
            }
            (Geometry::Custom, None) => return Err(Error::Iota("custom geometry needs a table".into())),
            (_, Some(_)) => return Err(Error::Iota("tables are only accepted for custom geometry".into())),
            (Geometry::Trivial, None) => vec![T::zero(); len],
            (Geometry::Hyperplane, None) => {
                let one_minus = T::one() - c.clone();
                (0..len).map(|p| one_minus.pow_u32(p as u32)).collect()
            }
            (Geometry::Point, None) => {
                let mut t = vec![T::zero(); len];
                t[len - 1] = c.pow_u32(len as u32 - 1);
                t
            }
        };
        Ok(IntersectionData { n, c, iota, geometry })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> &T {
        &self.c
    }

    pub fn iota(&self) -> &[T] {
        &self.iota
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }
}

fn pow2<T: Exact>(e: usize) -> T {
    T::from_int(2).pow_u32(e as u32)
}

/// `e_n = 1 + c Σ_{p=0}^{n-2} (2^{n-1-p} - 1) ι(p)`.
pub fn residual_mass<T: Exact>(data: &IntersectionData<T>) -> T {
    let n = data.n;
    let mut sum = T::zero();
    for (p, iota) in data.iota.iter().enumerate() {
        sum = sum + (pow2::<T>(n - 1 - p) - T::one()) * iota.clone();
    }
    T::one() + data.c.clone() * sum
}

/// Smallest `d` with `c·d` integral: the denominator of `c`.
pub fn default_scale<T: Exact>(c: &T) -> Result<u64> {
    c.denom_u64().ok_or_else(|| Error::TooLarge(format!("denominator of {}", c.fraction_string())))
}

/// Evaluates the mass through `a_k = a_{k-1} + b_{k-1}`,
/// `b_k = 2 b_{k-1} + d^n c ι(k-1)`, starting from `a_0 = d^n`, `b_0 = 0`,
/// and returns `d^{-n} (a_{n-1} + b_{n-1})`.
pub fn mass_via_recursion<T: Exact>(data: &IntersectionData<T>, d: u64) -> Result<T> {
    if d == 0 {
        return Err(Error::Range("d must be at least 1".into()));
    }
    let d_t = T::from_int(i64::try_from(d).map_err(|_| Error::TooLarge(format!("d = {d}")))?);
    let cd = data.c.clone() * d_t.clone();
    if !cd.is_integral() {
        return Err(Error::NonIntegralScale(cd.fraction_string()));
    }
    let dn = d_t.pow_u32(data.n as u32);
    let mut a = dn.clone();
    let mut b = T::zero();
    for k in 1..data.n {
        let next_b = T::from_int(2) * b.clone() + dn.clone() * data.c.clone() * data.iota[k - 1].clone();
        a = a + b;
        b = next_b;
    }
    Ok((a + b) / dn)
}

/// `δ = c Σ ι(p)` and the non-pluripolar volume `1 - δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Defect<T> {
    pub delta: T,
    pub volume: T,
}

pub fn full_mass_defect<T: Exact>(data: &IntersectionData<T>) -> Defect<T> {
    let sum = data.iota.iter().fold(T::zero(), |acc, v| acc + v.clone());
    let delta = data.c.clone() * sum;
    Defect { volume: T::one() - delta.clone(), delta }
}

/// Whether the mass is exactly 1; checks that `δ = 0` agrees.
pub fn is_full_mass<T: Exact>(data: &IntersectionData<T>) -> Result<bool> {
    let by_mass = residual_mass(data) == T::one();
    let by_defect = full_mass_defect(data).delta.is_zero();
    if by_mass != by_defect {
        return Err(Error::Internal(format!(
            "mass criterion ({by_mass}) disagrees with defect criterion ({by_defect})"
        )));
    }
    Ok(by_mass)
}

/// Agreement of the mass formula with the ideal multiplicity at `c = p/q`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossCheck {
    pub family: Family,
    pub n: usize,
    pub p: u32,
    pub q: u32,
    pub c: BigRational,
    pub residual_mass: BigRational,
    pub recursion_mass: BigRational,
    pub mult_closed: BigInt,
    /// `q^{-n} · mult`.
    pub scaled_mult: BigRational,
    /// Grid covolume of the family ideal, when requested.
    pub mult_grid: Option<f64>,
}

pub fn cross_check(family: Family, n: usize, p: u32, q: u32, grid_resolution: Option<usize>) -> Result<CrossCheck> {
    if p < 1 || p > q {
        return Err(Error::Family(format!("need 1 <= p <= q, got p = {p}, q = {q}")));
    }
    let c = BigRational::from_frac(p as i64, q as i64);
    let data = IntersectionData::new(family.into(), n, c.clone())?;
    let mass = residual_mass(&data);
    let recursion = mass_via_recursion(&data, q as u64)?;
    let mult = multiplicity_closed_form(family, n, p, q)?;
    let scaled = BigRational::new(mult.clone(), BigInt::from(q).pow(n as u32));
    if mass != scaled || mass != recursion {
        return Err(Error::Internal(format!(
            "{family} n={n} p={p} q={q}: mass {} recursion {} q^-n mult {}",
            mass.fraction_string(),
            recursion.fraction_string(),
            scaled.fraction_string()
        )));
    }
    let mult_grid = match grid_resolution {
        Some(r) => Some(covolume_grid(&family_ideal(family, n, p, q, false)?, r)?),
        None => None,
    };
    Ok(CrossCheck {
        family,
        n,
        p,
        q,
        c,
        residual_mass: mass,
        recursion_mass: recursion,
        mult_closed: mult,
        scaled_mult: scaled,
        mult_grid,
    })
}
