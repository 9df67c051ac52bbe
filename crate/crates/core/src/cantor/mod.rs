//! Generalized Cantor sets with super-exponentially shrinking pieces.
//!
//! Level `k` of the construction consists of `2^k` closed intervals of
//! common length `l_k = exp(-a^k)` (`l_0 = 1`). Each level is obtained from
//! the previous one by deleting the open middle part of every interval, in
//! proportion `s_k = 1 - 2 l_k / l_{k-1}`. The Cantor probability measure
//! gives every level-`k` interval mass `2^{-k}`.
//!
//! Lengths underflow `f64` already around `k = 7` for `a = 3`, so every
//! length is carried as its logarithm. Interval endpoints are stored as
//! plain floats for plotting and far-field work; anything that needs the
//! relative position of two nearby points goes through [`LevelTable`] and
//! [`CantorPoint`], which work in log space.

mod point;

pub use point::{mean_log_abs_affine, CantorPoint, LevelTable, Relative};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parameters of the Cantor construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CantorParams<T> {
    a: T,
    k_max: usize,
}

impl<T: Real> CantorParams<T> {
    pub const DEFAULT_K_MAX: usize = 12;

    /// Validates `a > 2` and `s_k ∈ (1/3, 1)` for every `k <= k_max`.
    pub fn new(a: T, k_max: usize) -> Result<Self> {
        if !(a > T::lit(2.0)) || !a.is_finite() {
            return Err(Error::DecayBase(a.to_f64_lossy()));
        }
        let params = CantorParams { a, k_max };
        let third = T::lit(3.0).ln();
        for k in 1..=k_max {
            let lr = params.log_ratio(k);
            // s_k > 1/3  <=>  l_k / l_{k-1} < 1/3
            if !lr.is_finite() || !(lr < -third) {
                return Err(Error::RemovalRatio {
                    level: k,
                    value: (T::one() - T::lit(2.0) * lr.exp()).to_f64_lossy(),
                });
            }
        }
        Ok(params)
    }

    pub fn with_default_depth(a: T) -> Result<Self> {
        Self::new(a, Self::DEFAULT_K_MAX)
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn check_depth(&self, k: usize) -> Result<()> {
        if k > self.k_max {
            return Err(Error::DepthExceeded { depth: k, max: self.k_max });
        }
        Ok(())
    }

    /// `ln l_k = -a^k`, with `ln l_0 = 0`.
    pub fn log_length(&self, k: usize) -> T {
        if k == 0 {
            T::zero()
        } else {
            -self.a.powi(k as i32)
        }
    }

    /// `ln(l_k / l_{k-1})`, evaluated without cancellation.
    pub fn log_ratio(&self, k: usize) -> T {
        assert!(k >= 1, "log_ratio is defined for k >= 1");
        if k == 1 {
            -self.a
        } else {
            -self.a.powi(k as i32 - 1) * (self.a - T::one())
        }
    }

    /// Removal proportion `s_k`.
    pub fn removal_ratio(&self, k: usize) -> Result<T> {
        if k == 0 {
            return Err(Error::LevelTooSmall { min: 1, got: 0 });
        }
        let s = T::one() - self.removal_complement(k);
        if !(s > T::one() / T::lit(3.0)) || !(s <= T::one()) {
            return Err(Error::RemovalRatio { level: k, value: s.to_f64_lossy() });
        }
        Ok(s)
    }

    /// `1 - s_k = 2 l_k / l_{k-1}`, computed directly.
    pub fn removal_complement(&self, k: usize) -> T {
        T::lit(2.0) * self.log_ratio(k).exp()
    }

    /// Lebesgue measure of the level-`k` set, `∏_{j<=k}(1 - s_j) = 2^k l_k`.
    pub fn lebesgue_measure(&self, k: usize) -> T {
        self.log_lebesgue_measure(k).exp()
    }

    pub fn log_lebesgue_measure(&self, k: usize) -> T {
        T::from_usize(k).unwrap() * T::LN_2() + self.log_length(k)
    }

    /// Cached per-level quantities for the first `depth` levels.
    pub fn table(&self, depth: usize) -> LevelTable<T> {
        LevelTable::new(self, depth)
    }
}

/// One closed interval of a level of the construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    pub left: T,
    pub right: T,
    pub log_length: T,
}

impl<T: Real> Interval<T> {
    pub fn midpoint(&self) -> T {
        self.left + (self.right - self.left) / T::lit(2.0)
    }

    pub fn contains(&self, x: T) -> bool {
        self.left <= x && x <= self.right
    }

    pub fn contains_interval(&self, other: &Interval<T>) -> bool {
        self.left <= other.left && other.right <= self.right
    }
}

/// Level-`k` approximation `C(s_1, …, s_k)` together with the discrete
/// measure `μ_k` placing mass `2^{-k}` on each interval.
///
/// Interval `i` has binary address `i`: bit `k - m` is the digit chosen at
/// level `m` (0 for the left child, 1 for the right one).
#[derive(Clone, Debug, PartialEq)]
pub struct CantorApprox<T> {
    pub level: usize,
    pub intervals: Vec<Interval<T>>,
    pub mass_per_interval: Dyadic,
}

impl<T: Real> CantorApprox<T> {
    pub fn total_mass(&self) -> Dyadic {
        self.intervals.iter().map(|_| self.mass_per_interval).sum()
    }

    /// Euclidean distance from a real point to the level set.
    pub fn distance(&self, x: T) -> T {
        let idx = self.intervals.partition_point(|iv| iv.right < x);
        let mut best = T::infinity();
        for i in [idx.saturating_sub(1), idx] {
            if let Some(iv) = self.intervals.get(i) {
                let d = if x < iv.left {
                    iv.left - x
                } else if x > iv.right {
                    x - iv.right
                } else {
                    T::zero()
                };
                best = best.min(d);
            }
        }
        best
    }
}

/// Builds the `2^k` intervals of level `k`.
pub fn build_level<T: Real>(params: &CantorParams<T>, k: usize) -> Result<CantorApprox<T>> {
    params.check_depth(k)?;
    let mut intervals = vec![Interval { left: T::zero(), right: T::one(), log_length: T::zero() }];
    for j in 1..=k {
        let log_length = params.log_length(j);
        let len = log_length.exp();
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for parent in &intervals {
            next.push(Interval { left: parent.left, right: parent.left + len, log_length });
            next.push(Interval { left: parent.right - len, right: parent.right, log_length });
        }
        intervals = next;
    }
    Ok(CantorApprox { level: k, intervals, mass_per_interval: Dyadic::unit(k as u32) })
}

/// `s_k` for the given parameters.
pub fn removal_ratio<T: Real>(params: &CantorParams<T>, k: usize) -> Result<T> {
    params.removal_ratio(k)
}

/// Partial product `∏_{j<=k}(1 - s_j)`.
pub fn lebesgue_measure<T: Real>(params: &CantorParams<T>, k: usize) -> T {
    params.lebesgue_measure(k)
}

/// Level-`k` evaluation of the Cantor distribution function.
///
/// Counts the mass of level-`k` intervals lying strictly left of `x`, and
/// adds the mass of the interval containing `x` when `x` sits right of its
/// midpoint. Exact on every gap point of level `k`.
pub fn cantor_cdf<T: Real>(params: &CantorParams<T>, x: T, k: usize) -> Result<Dyadic> {
    params.check_depth(k)?;
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::OutOfUnitInterval(x.to_f64_lossy()));
    }
    let mut acc: u64 = 0;
    let mut frac = x;
    for j in 1..=k {
        let r = params.log_ratio(j).exp();
        let weight = 1u64 << (k - j);
        if frac <= r {
            frac = if frac == T::zero() { frac } else { frac / r };
        } else if frac >= T::one() - r {
            acc += weight;
            frac = if frac == T::one() { frac } else { T::one() - (T::one() - frac) / r };
        } else {
            // inside the gap removed at level j
            return Ok(Dyadic::new(acc + weight, k as u32));
        }
    }
    if frac > T::lit(0.5) {
        acc += 1;
    }
    Ok(Dyadic::new(acc, k as u32))
}

/// A point mass of the discretised measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom<T> {
    pub point: T,
    pub mass: Dyadic,
}

/// Midpoint atoms of the `2^k` level-`k` intervals.
pub fn measure_atoms<T: Real>(params: &CantorParams<T>, k: usize) -> Result<Vec<Atom<T>>> {
    if k == 0 {
        return Err(Error::LevelTooSmall { min: 1, got: 0 });
    }
    let approx = build_level(params, k)?;
    Ok(approx
        .intervals
        .iter()
        .map(|iv| Atom { point: iv.midpoint(), mass: approx.mass_per_interval })
        .collect())
}

/// Slack, in log space, applied to the window boundary in [`local_mass`].
pub const LOCAL_MASS_LOG_SLACK: f64 = 1e-9;

/// `μ_k`-mass of the closed window `[x - r, x + r]`.
///
/// The measure is represented by its midpoint atoms; distances are compared
/// in log space so that windows far below `f64` resolution still work.
pub fn local_mass<T: Real>(params: &CantorParams<T>, x: T, r: T, k: usize) -> Result<Dyadic> {
    if !(r > T::zero()) {
        return Err(Error::Radius(r.to_f64_lossy()));
    }
    local_mass_log(params, &CantorPoint::real(x), r.ln(), k)
}

/// Like [`local_mass`], but first checks that `x` lies on a level-`k`
/// interval (to within `1e-12` absolute).
pub fn local_mass_on_set<T: Real>(params: &CantorParams<T>, x: T, r: T, k: usize) -> Result<Dyadic> {
    let approx = build_level(params, k)?;
    if approx.distance(x) > T::lit(1e-12) {
        return Err(Error::NotOnCantorSet(x.to_f64_lossy()));
    }
    local_mass(params, x, r, k)
}

/// `μ_k`-mass of the window of radius `exp(log_r)` about a point given in
/// Cantor-relative coordinates.
pub fn local_mass_log<T: Real>(
    params: &CantorParams<T>,
    point: &CantorPoint<T>,
    log_r: T,
    k: usize,
) -> Result<Dyadic> {
    params.check_depth(k)?;
    if k == 0 {
        return Err(Error::LevelTooSmall { min: 1, got: 0 });
    }
    let table = params.table(k);
    let point = table.canonicalize(point);
    let bound = log_r + T::lit(LOCAL_MASS_LOG_SLACK);
    let half = T::lit(0.5);
    let count = (0..1u64 << k)
        .filter(|&idx| table.relative(&point, idx).log_abs_at(half) <= bound)
        .count() as u64;
    Ok(Dyadic::new(count, k as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> CantorParams<f64> {
        CantorParams::with_default_depth(3.0).unwrap()
    }

    #[test]
    fn rejects_small_base() {
        assert!(matches!(CantorParams::new(2.0, 4), Err(Error::DecayBase(_))));
        assert!(matches!(CantorParams::new(1.5f64, 4), Err(Error::DecayBase(_))));
        assert!(CantorParams::new(2.01f64, 4).is_ok());
    }

    #[test]
    fn level_zero_is_unit_interval() {
        let c = build_level(&p3(), 0).unwrap();
        assert_eq!(c.intervals, vec![Interval { left: 0.0, right: 1.0, log_length: 0.0 }]);
        assert_eq!(c.total_mass(), Dyadic::ONE);
    }

    #[test]
    fn level_one_lengths() {
        let c = build_level(&p3(), 1).unwrap();
        assert_eq!(c.intervals.len(), 2);
        let l1 = (-3.0f64).exp();
        assert_eq!(c.intervals[0].left, 0.0);
        for iv in &c.intervals {
            assert!(((iv.right - iv.left) - l1).abs() < 1e-15);
        }
        assert_eq!(c.intervals[1].right, 1.0);
    }

    #[test]
    fn level_two_lengths() {
        let c = build_level(&p3(), 2).unwrap();
        assert_eq!(c.intervals.len(), 4);
        for iv in &c.intervals {
            let len = iv.right - iv.left;
            assert!((len - 1.2341e-4).abs() < 1e-8, "{len}");
            assert_eq!(iv.log_length, -9.0);
        }
    }

    #[test]
    fn depth_guard() {
        assert!(matches!(build_level(&p3(), 13), Err(Error::DepthExceeded { .. })));
    }

    #[test]
    fn removal_ratio_values() {
        let p = p3();
        // s_1 = 1 - 2 l_1 / l_0 with l_0 = 1
        assert!((p.removal_ratio(1).unwrap() - (1.0 - 2.0 * (-3.0f64).exp())).abs() < 1e-15);
        assert!((p.removal_ratio(2).unwrap() - 0.995_042_495).abs() < 1e-9);
        assert!(p.removal_ratio(0).is_err());
        let big = CantorParams::new(40.0f64, 3).unwrap();
        assert!(big.removal_ratio(2).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn lebesgue_values() {
        let p = p3();
        assert_eq!(p.lebesgue_measure(0), 1.0);
        assert!((p.lebesgue_measure(1) - 0.099_574).abs() < 1e-6);
        let l4 = p.lebesgue_measure(4);
        assert!((l4 / (16.0 * (-81.0f64).exp()) - 1.0).abs() < 1e-12);
        assert!((l4 - 1.06e-34).abs() < 0.01e-34);
    }

    #[test]
    fn cdf_endpoints_and_symmetry() {
        let p = p3();
        assert_eq!(cantor_cdf(&p, 0.0, 5).unwrap(), Dyadic::ZERO);
        assert_eq!(cantor_cdf(&p, 1.0, 5).unwrap(), Dyadic::ONE);
        assert_eq!(cantor_cdf(&p, 1.0, 12).unwrap(), Dyadic::ONE);
        assert_eq!(cantor_cdf(&p, 0.5, 2).unwrap(), Dyadic::unit(1));
        assert!(cantor_cdf(&p, 1.5, 2).is_err());
        assert!(cantor_cdf(&p, -0.1, 2).is_err());
    }

    #[test]
    fn cdf_at_first_right_endpoint() {
        let p = p3();
        let c = build_level(&p, 3).unwrap();
        assert_eq!(cantor_cdf(&p, c.intervals[0].right, 3).unwrap(), Dyadic::unit(3));
    }

    #[test]
    fn atoms_are_uniform() {
        let p = p3();
        let atoms = measure_atoms(&p, 1).unwrap();
        assert_eq!(atoms.len(), 2);
        assert!(atoms.iter().all(|a| a.mass == Dyadic::unit(1)));
        let atoms = measure_atoms(&p, 10).unwrap();
        let total: Dyadic = atoms.iter().map(|a| a.mass).sum();
        assert_eq!(total, Dyadic::ONE);
        assert_eq!(atoms.iter().map(|a| a.mass).max().unwrap(), Dyadic::unit(10));
        assert!(measure_atoms(&p, 0).is_err());
    }

    #[test]
    fn local_mass_examples() {
        let p = p3();
        assert_eq!(local_mass(&p, 0.5, 1e-3, 6).unwrap(), Dyadic::ZERO);
        assert_eq!(local_mass(&p, 0.3, 1.0, 6).unwrap(), Dyadic::ONE);
        for j in 1..=3 {
            let r = p.log_length(j).exp();
            assert_eq!(local_mass(&p, 0.0, r, 6).unwrap(), Dyadic::unit(j as u32));
            assert_eq!(local_mass(&p, 1.0, r, 6).unwrap(), Dyadic::unit(j as u32));
        }
        assert!(local_mass(&p, 0.0, 0.0, 6).is_err());
        assert!(matches!(local_mass_on_set(&p, 0.5, 0.1, 4), Err(Error::NotOnCantorSet(_))));
        assert_eq!(local_mass_on_set(&p, 0.0, 1.0, 4).unwrap(), Dyadic::ONE);
    }

    #[test]
    fn local_mass_below_float_resolution() {
        let p = p3();
        let table = p.table(12);
        // leftmost point of the set, window radius l_j for deep j
        let origin = CantorPoint::real(0.0);
        for j in 1..=12 {
            let m = local_mass_log(&p, &origin, p.log_length(j), 12).unwrap();
            assert_eq!(m, Dyadic::unit(j as u32), "j = {j}");
        }
        // left end of an interior level-9 interval
        let pt = CantorPoint::new(9, 0b101100111, num_complex::Complex::new(0.0, 0.0));
        for j in 1..=9 {
            let m = local_mass_log(&p, &pt, table.log_length(j), 12).unwrap();
            assert_eq!(m, Dyadic::unit(j as u32), "j = {j}");
        }
    }
}
