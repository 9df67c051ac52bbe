//! Monomial ideals primary to the maximal ideal `𝔪 = ⟨z_1, …, z_n⟩`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest `n` and `q` accepted by the family constructors unless the
/// guard is overridden.
pub const MAX_DESK_N: usize = 4;
pub const MAX_DESK_Q: u32 = 8;

/// Colength enumeration refuses staircase boxes larger than this.
const MAX_ENUMERATION: u128 = 50_000_000;

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> Self {
        ExponentVector(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &ExponentVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `Some((axis, exponent))` when the monomial is a pure power `z_i^N`.
    pub fn pure_power(&self) -> Option<(usize, u32)> {
        let mut support = self.0.iter().enumerate().filter(|(_, &e)| e > 0);
        let (axis, &e) = support.next()?;
        if support.next().is_some() {
            return None;
        }
        Some((axis, e))
    }
}

impl From<Vec<u32>> for ExponentVector {
    fn from(v: Vec<u32>) -> Self {
        ExponentVector(v)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// A monomial ideal given by its minimal generators, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialIdeal {
    n: usize,
    generators: Vec<ExponentVector>,
}

impl MonomialIdeal {
    /// Builds the ideal generated by `generators`, minimalizing them.
    /// Primarity is not required here; operations that need it check.
    pub fn new(n: usize, generators: Vec<ExponentVector>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Family("ambient dimension must be positive".into()));
        }
        if generators.is_empty() {
            return Err(Error::EmptyIdeal);
        }
        for g in &generators {
            if g.dim() != n {
                return Err(Error::Dimension { expected: n, got: g.dim() });
            }
        }
        Ok(MonomialIdeal { n, generators: minimalize(generators) })
    }

    /// `𝔪^d`.
    pub fn maximal_power(n: usize, d: u32) -> Result<Self> {
        Self::new(n, monomials_of_degree(n, d))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[ExponentVector] {
        &self.generators
    }

    /// Smallest `N` with `z_axis^N` in the ideal.
    pub fn pure_power_degree(&self, axis: usize) -> Option<u32> {
        self.generators
            .iter()
            .filter_map(|g| g.pure_power().filter(|&(a, _)| a == axis).map(|(_, e)| e))
            .min()
            .or_else(|| self.generators.iter().any(|g| g.degree() == 0).then_some(0))
    }

    pub fn pure_power_degrees(&self) -> Result<Vec<u32>> {
        (0..self.n).map(|i| self.pure_power_degree(i).ok_or(Error::NotPrimary(i))).collect()
    }

    pub fn is_primary(&self) -> bool {
        self.pure_power_degrees().is_ok()
    }

    pub fn contains(&self, v: &ExponentVector) -> bool {
        self.generators.iter().any(|g| g.divides(v))
    }

    /// Staircase membership of the monomial `z^v`.
    pub fn membership(&self, v: &ExponentVector) -> Result<bool> {
        if v.dim() != self.n {
            return Err(Error::Dimension { expected: self.n, got: v.dim() });
        }
        Ok(self.contains(v))
    }

    /// Number of standard monomials, `dim O / 𝔞`.
    pub fn colength(&self) -> Result<u64> {
        let bounds = self.pure_power_degrees()?;
        let cells: u128 = bounds.iter().map(|&b| b as u128).product();
        if cells > MAX_ENUMERATION {
            return Err(Error::TooLarge(format!("colength box of {cells} monomials")));
        }
        let mut count = 0u64;
        let mut v = vec![0u32; self.n];
        if bounds.contains(&0) {
            return Ok(0);
        }
        loop {
            if !self.contains(&ExponentVector(v.clone())) {
                count += 1;
            }
            // odometer over the box
            let mut i = 0;
            loop {
                if i == self.n {
                    return Ok(count);
                }
                v[i] += 1;
                if v[i] < bounds[i] {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
        }
    }

    /// Ideal sum.
    pub fn sum(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        if other.n != self.n {
            return Err(Error::Dimension { expected: self.n, got: other.n });
        }
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        MonomialIdeal::new(self.n, gens)
    }

    /// Ideal product.
    pub fn product(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        if other.n != self.n {
            return Err(Error::Dimension { expected: self.n, got: other.n });
        }
        let mut gens = Vec::with_capacity(self.generators.len() * other.generators.len());
        for a in &self.generators {
            for b in &other.generators {
                gens.push(ExponentVector(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect()));
            }
        }
        MonomialIdeal::new(self.n, gens)
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

/// Removes duplicates and dominated generators; sorts the rest.
pub fn minimalize(mut gens: Vec<ExponentVector>) -> Vec<ExponentVector> {
    gens.sort();
    gens.dedup();
    let keep: Vec<bool> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| !gens.iter().enumerate().any(|(j, h)| j != i && h.divides(g)))
        .collect();
    gens.into_iter().zip(keep).filter_map(|(g, k)| k.then_some(g)).collect()
}

/// All exponent vectors in `n` variables of total degree `d`, sorted.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<ExponentVector> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(ExponentVector(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in 0..=d {
            prefix.push(e);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
    }
    out.sort();
    out
}

/// The two ideal families of the mass examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `⟨z_1^p⟩ · 𝔪^{q-p} + 𝔪^{2q}`.
    Hyperplane,
    /// `⟨z_1, …, z_{n-1}⟩^p · 𝔪^{q-p} + 𝔪^{2q}`.
    Point,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Hyperplane => "hyperplane",
            Family::Point => "point",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperplane" => Ok(Family::Hyperplane),
            "point" => Ok(Family::Point),
            other => Err(Error::Family(format!("unknown family '{other}'"))),
        }
    }
}

fn check_family(n: usize, p: u32, q: u32, allow_large: bool) -> Result<()> {
    if n < 2 {
        return Err(Error::Family(format!("n = {n} must be at least 2")));
    }
    if p < 1 || p > q {
        return Err(Error::Family(format!("need 1 <= p <= q, got p = {p}, q = {q}")));
    }
    if !allow_large && (n > MAX_DESK_N || q > MAX_DESK_Q) {
        return Err(Error::TooLarge(format!("n = {n}, q = {q} (limits n <= {MAX_DESK_N}, q <= {MAX_DESK_Q})")));
    }
    Ok(())
}

/// Builds a family member, enforcing the desk-scale guard unless
/// `allow_large` is set.
pub fn family_ideal(family: Family, n: usize, p: u32, q: u32, allow_large: bool) -> Result<MonomialIdeal> {
    check_family(n, p, q, allow_large)?;
    let m_rest = MonomialIdeal::maximal_power(n, q - p)?;
    let head = match family {
        Family::Hyperplane => {
            let mut e = vec![0; n];
            e[0] = p;
            MonomialIdeal::new(n, vec![ExponentVector(e)])?
        }
        Family::Point => {
            let gens = monomials_of_degree(n - 1, p)
                .into_iter()
                .map(|mut v| {
                    v.0.push(0);
                    v
                })
                .collect();
            MonomialIdeal::new(n, gens)?
        }
    };
    head.product(&m_rest)?.sum(&MonomialIdeal::maximal_power(n, 2 * q)?)
}

pub fn family_hyperplane(n: usize, p: u32, q: u32) -> Result<MonomialIdeal> {
    family_ideal(Family::Hyperplane, n, p, q, false)
}

pub fn family_point(n: usize, p: u32, q: u32) -> Result<MonomialIdeal> {
    family_ideal(Family::Point, n, p, q, false)
}

/// Hilbert–Samuel multiplicity of a family member, in closed form.
pub fn multiplicity_closed_form(family: Family, n: usize, p: u32, q: u32) -> Result<BigInt> {
    check_family(n, p, q, true)?;
    let (p, q) = (BigInt::from(p), BigInt::from(q));
    let n32 = n as u32;
    Ok(match family {
        Family::Hyperplane => {
            let d = &q - &p;
            let two_q = BigInt::from(2) * &q;
            let mut sum = BigInt::zero();
            for k in 0..n32 {
                sum += d.pow(k) * two_q.pow(n32 - 1 - k);
            }
            d.pow(n32) + p * sum
        }
        Family::Point => p.pow(n32 - 1) * &q + q.pow(n32),
    })
}

/// `C(d - 1 + n, n)`, the colength of `𝔪^d`.
pub fn maximal_power_colength(n: usize, d: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..n as u32 {
        acc = acc * BigInt::from(d + i) / BigInt::from(i + 1);
    }
    if d == 0 {
        BigInt::zero()
    } else {
        acc
    }
}
