//! Multiplier-ideal approximants and their masses.
//!
//! For the Cantor family in dimension 2 the multiplier ideals `𝒥(λφ)` are
//! the powers `𝔪^{⌈λ⌉-1}`, exactly as for `log|z|²`, so the approximants
//! `φ_m` have masses `((m-1)/m)^2 → 1` while `e_2(φ) = 2`. In dimension
//! `n` the approximant masses are `((m-n+1)/m)^n`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{self, fraction, opt_fraction};
use crate::intersection::{residual_mass, Geometry, IntersectionData};
use crate::scalar::{BigRational, Exact};

fn check_lambda<T: Exact>(lambda: &T) -> Result<i64> {
    if *lambda <= T::zero() {
        return Err(Error::Lambda(lambda.fraction_string()));
    }
    lambda.ceil_i64().ok_or_else(|| Error::TooLarge(format!("lambda = {}", lambda.fraction_string())))
}

/// Vanishing order `⌈λ⌉ - 1` of `𝒥(λφ) = 𝔪^{⌈λ⌉-1}` (dimension 2).
pub fn multiplier_order<T: Exact>(lambda: &T) -> Result<u64> {
    Ok((check_lambda(lambda)? - 1) as u64)
}

/// Order of `𝒥(λ log|z|²)` in dimension `n`, from the integrability
/// exponent: the least `k >= 0` with `k > λ - n`, i.e. `max(0, ⌊λ⌋ - n + 1)`.
/// Agrees with [`multiplier_order`] at integer `λ` when `n = 2`.
pub fn log_multiplier_order<T: Exact>(lambda: &T, n: usize) -> Result<u64> {
    check_lambda(lambda)?;
    let floor = -((-lambda.clone()).ceil_i64().ok_or_else(|| Error::TooLarge(lambda.fraction_string()))?);
    Ok((floor - n as i64 + 1).max(0) as u64)
}

/// Order `max(0, m - n + 1)` of `𝒥(mφ)` in dimension `n`, read off from the
/// approximant mass formula rather than computed.
pub fn inferred_order(m: u64, n: usize) -> u64 {
    (m + 1).saturating_sub(n as u64)
}

/// Whether every homogeneous polynomial of degree `k` lies in `𝒥(λφ)`.
pub fn homogeneous_membership<T: Exact>(k: u64, lambda: &T) -> Result<bool> {
    Ok(k >= multiplier_order(lambda)?)
}

fn check_mn(m: u64, n: usize) -> Result<()> {
    if m < 1 {
        return Err(Error::Range(format!("m = {m} must be at least 1")));
    }
    if n < 2 {
        return Err(Error::Range(format!("n = {n} must be at least 2")));
    }
    Ok(())
}

/// `((m - n + 1)/m)^n` without clamping; negative bases are kept.
pub fn approx_mass_raw<T: Exact>(m: u64, n: usize) -> Result<T> {
    check_mn(m, n)?;
    let base = T::from_frac(m as i64 - n as i64 + 1, m as i64);
    Ok(base.pow_u32(n as u32))
}

/// Mass `e_n(φ_m)`: `((m - n + 1)/m)^n` for `m >= n`, 0 below.
pub fn approx_mass<T: Exact>(m: u64, n: usize) -> Result<T> {
    check_mn(m, n)?;
    if (m as usize) < n {
        return Ok(T::zero());
    }
    approx_mass_raw(m, n)
}

/// `e_2(φ_λ) = ((⌈λ⌉ - 1)/λ)^2`.
pub fn e2_of_lambda<T: Exact>(lambda: &T) -> Result<T> {
    let order = T::from_int(multiplier_order(lambda)? as i64);
    Ok((order / lambda.clone()).pow_u32(2))
}

/// Lelong number `e_1(φ_m) = (m - n + 1)/m` of the approximant.
pub fn approx_lelong<T: Exact>(m: u64, n: usize) -> Result<T> {
    check_mn(m, n)?;
    Ok(T::from_frac(inferred_order(m, n) as i64, m as i64))
}

#[derive(Clone, Debug, PartialEq)]
pub enum PshFamily<T> {
    /// The Cantor-measure singularity in `ℂ²`.
    Cantor2,
    /// Its `n`-dimensional analogue with parameter `γ >= 2`.
    CantorHighDim { n: usize, gamma: u64 },
    /// Analytic singularity described by blowup intersection numbers.
    Analytic(IntersectionData<T>),
}

impl<T: Exact> PshFamily<T> {
    pub fn cantor_high_dim(n: usize, gamma: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Family(format!("n = {n} must be at least 2")));
        }
        if gamma < 2 {
            return Err(Error::Family(format!("gamma = {gamma} must be at least 2")));
        }
        Ok(PshFamily::CantorHighDim { n, gamma })
    }

    pub fn n(&self) -> usize {
        match self {
            PshFamily::Cantor2 => 2,
            PshFamily::CantorHighDim { n, .. } => *n,
            PshFamily::Analytic(d) => d.n(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PshFamily::Cantor2 => "cantor2",
            PshFamily::CantorHighDim { .. } => "cantor-hd",
            PshFamily::Analytic(_) => "analytic",
        }
    }
}

impl<T: Exact> fmt::Display for PshFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Residual mass `e_n(φ)` of the family.
///
/// For the Cantor family this is `1 + μ(𝒞)` with the total mass of the
/// Cantor measure, which is 1.
pub fn true_mass<T: Exact>(family: &PshFamily<T>) -> T {
    match family {
        PshFamily::Cantor2 => T::one() + cantor_total_mass(),
        PshFamily::CantorHighDim { n, gamma } => {
            T::one() + T::one() / T::from_int(*gamma as i64).pow_u32(*n as u32 - 1)
        }
        PshFamily::Analytic(data) => residual_mass(data),
    }
}

fn cantor_total_mass<T: Exact>() -> T {
    let params = crate::cantor::CantorParams::<f64>::with_default_depth(3.0).expect("a = 3 is admissible");
    let m = crate::cantor::build_level(&params, params.k_max())
        .expect("level k_max buildable")
        .total_mass();
    T::from_frac(m.numerator() as i64, m.denominator() as i64)
}

/// `e_1(φ) - n/m <= e_1(φ_m) <= e_1(φ)` with `e_1(φ) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sandwich {
    pub m: u64,
    pub n: usize,
    #[serde(serialize_with = "fraction")]
    pub lower: BigRational,
    #[serde(serialize_with = "fraction")]
    pub middle: BigRational,
    #[serde(serialize_with = "fraction")]
    pub upper: BigRational,
}

pub fn lelong_sandwich_check(m: u64, n: usize) -> Result<Sandwich> {
    check_mn(m, n)?;
    if (m as usize) < n {
        return Err(Error::Range(format!("need m >= n, got m = {m}, n = {n}")));
    }
    let upper = BigRational::from_int(1);
    let lower = upper.clone() - BigRational::from_frac(n as i64, m as i64);
    let middle = approx_lelong::<BigRational>(m, n)?;
    if !(lower <= middle && middle <= upper) {
        return Err(Error::Internal(format!(
            "Lelong sandwich fails at m = {m}, n = {n}: {} <= {} <= {}",
            lower.fraction_string(),
            middle.fraction_string(),
            upper.fraction_string()
        )));
    }
    Ok(Sandwich { m, n, lower, middle, upper })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxPoint {
    pub m: u64,
    #[serde(serialize_with = "fraction")]
    pub e_n: BigRational,
}

/// `ψ = log|z|²`, which has the same multiplier ideals as the Cantor
/// singularity but mass 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValuativeTwin {
    pub psi: &'static str,
    #[serde(serialize_with = "fraction")]
    pub e_n: BigRational,
    pub same_multiplier_ideals: bool,
    /// The ideals `𝒥(mφ)` and `𝒥(mψ)` were compared for `m = 1..=checked_up_to`.
    pub checked_up_to: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdicts {
    /// Do the approximant masses converge to the true mass?
    pub convergence: &'static str,
    /// Do equal multiplier ideals force equal masses?
    pub valuative: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassReport {
    pub schema: &'static str,
    pub family: &'static str,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
    #[serde(serialize_with = "opt_fraction", skip_serializing_if = "Option::is_none")]
    pub c: Option<BigRational>,
    #[serde(serialize_with = "fraction")]
    pub true_mass: BigRational,
    /// `(m, e_n(φ_m))` for `m = 1..=m_max`; empty when the approximant
    /// masses are not available in closed form.
    pub approximants: Vec<ApproxPoint>,
    #[serde(serialize_with = "fraction")]
    pub limit: BigRational,
    #[serde(serialize_with = "fraction")]
    pub gap: BigRational,
    pub verdict: &'static str,
    pub conjectures: Verdicts,
    pub valuative_twin: Option<ValuativeTwin>,
}

pub const VERDICT_REFUTED: &str = "conjecture refuted";
pub const VERDICT_NONE: &str = "no counterexample";

impl MassReport {
    /// The approximant table as CSV `m,e_n`.
    pub fn to_csv(&self) -> String {
        format::csv(&["m", "e_n"], self.approximants.iter().map(|p| vec![p.m.to_string(), p.e_n.fraction_string()]))
    }
}

fn twin_check(m_max: u64) -> Result<bool> {
    for m in 1..=m_max {
        let lambda = BigRational::from_int(m as i64);
        if multiplier_order(&lambda)? != log_multiplier_order(&lambda, 2)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Assembles the mass report of a family up to `m_max`.
pub fn counterexample_report(family: &PshFamily<BigRational>, m_max: u64) -> Result<MassReport> {
    let n = family.n();
    if (m_max as usize) < n {
        return Err(Error::Range(format!("m_max = {m_max} must be at least n = {n}")));
    }
    let truth = true_mass(family);
    let one = BigRational::from_int(1);
    let standard_sequence = || -> Result<Vec<ApproxPoint>> {
        (1..=m_max).map(|m| Ok(ApproxPoint { m, e_n: approx_mass(m, n)? })).collect()
    };
    let (approximants, limit) = match family {
        PshFamily::Cantor2 | PshFamily::CantorHighDim { .. } => (standard_sequence()?, one.clone()),
        PshFamily::Analytic(d) if d.geometry() == Geometry::Trivial => (standard_sequence()?, one.clone()),
        // Analytic singularities: the approximant masses converge to the
        // true mass, but no closed form for the sequence is used here.
        PshFamily::Analytic(_) => (Vec::new(), truth.clone()),
    };
    if let Some(w) = approximants.windows(2).find(|w| w[1].m as usize > n && w[1].e_n < w[0].e_n) {
        return Err(Error::Internal(format!("approximant masses decrease at m = {}", w[1].m)));
    }
    let gap = truth.clone() - limit.clone();
    let refuted = gap > BigRational::from_int(0);
    let valuative_twin = match family {
        PshFamily::Cantor2 => Some(ValuativeTwin {
            psi: "log|z|^2",
            e_n: one.clone(),
            same_multiplier_ideals: twin_check(m_max)?,
            checked_up_to: m_max,
        }),
        _ => None,
    };
    let valuative = match &valuative_twin {
        Some(t) if t.same_multiplier_ideals && t.e_n != truth => "refuted",
        _ => "not tested",
    };
    let (gamma, geometry, c) = match family {
        PshFamily::CantorHighDim { gamma, .. } => (Some(*gamma), None, None),
        PshFamily::Analytic(d) => (None, Some(d.geometry()), Some(d.c().clone())),
        PshFamily::Cantor2 => (None, None, None),
    };
    Ok(MassReport {
        schema: format::SCHEMA_VERSION,
        family: family.name(),
        n,
        gamma,
        geometry,
        c,
        true_mass: truth,
        approximants,
        limit,
        gap,
        verdict: if refuted { VERDICT_REFUTED } else { VERDICT_NONE },
        conjectures: Verdicts { convergence: if refuted { "refuted" } else { "consistent" }, valuative },
        valuative_twin,
    })
}

impl Serialize for Geometry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}
