//! Logarithmic potentials of the Cantor measures on the sphere,
//!
//! `p(z) = ∫ ln[|z - w|² / ((1 + |z|²)(1 + |w|²))] dμ_k(w) = -2π ∫ G(z, w) dμ_k(w)`,
//!
//! where `μ_k` spreads mass `2^{-k}` uniformly over each level-`k` interval.

use num_complex::Complex;
use rayon::prelude::*;

use crate::cantor::{build_level, CantorApprox, CantorParams, CantorPoint, LevelTable};
use crate::error::{Error, Result};
use crate::quadrature::{NeumaierSum, UnitGaussLegendre};
use crate::scalar::Real;
use crate::sphere::{chordal_distance, SpherePoint};

const PARALLEL_MIN_INTERVALS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig<T> {
    pub depth: usize,
    pub nodes_per_interval: usize,
    /// Values below this are reported as `-∞`.
    pub clamp_floor: T,
}

impl<T: Real> QuadratureConfig<T> {
    pub const DEFAULT_NODES: usize = 8;
    pub const DEFAULT_CLAMP_FLOOR: f64 = -1e9;

    pub fn new(depth: usize) -> Result<Self> {
        Self::with_nodes(depth, Self::DEFAULT_NODES)
    }

    pub fn with_nodes(depth: usize, nodes_per_interval: usize) -> Result<Self> {
        let cfg = QuadratureConfig { depth, nodes_per_interval, clamp_floor: T::lit(Self::DEFAULT_CLAMP_FLOOR) };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth < 1 || self.nodes_per_interval < 1 {
            return Err(Error::Quadrature);
        }
        Ok(())
    }
}

/// A potential value, with `-∞` as a first-class result.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PotentialValue<T> {
    Finite(T),
    NegInfinity,
}

impl<T: Real> PotentialValue<T> {
    fn clamp(v: T, floor: T) -> Self {
        if v.is_nan() || v > floor {
            PotentialValue::Finite(v)
        } else {
            PotentialValue::NegInfinity
        }
    }

    /// The value as a float, `-inf` for the sentinel.
    pub fn value(&self) -> T {
        match self {
            PotentialValue::Finite(v) => *v,
            PotentialValue::NegInfinity => T::neg_infinity(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, PotentialValue::Finite(_))
    }
}

/// Reusable evaluator of `p_{μ_k}` for one parameter set and configuration.
pub struct CantorPotential<T> {
    table: LevelTable<T>,
    approx: CantorApprox<T>,
    rule: UnitGaussLegendre<T>,
    cfg: QuadratureConfig<T>,
    // ∫ ln(1 + |w|²) dμ_k(w)
    smooth: T,
}

impl<T: Real> CantorPotential<T> {
    pub fn new(params: &CantorParams<T>, cfg: &QuadratureConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let approx = build_level(params, cfg.depth)?;
        let rule = UnitGaussLegendre::new(cfg.nodes_per_interval);
        let table = params.table(cfg.depth);
        let mut acc = NeumaierSum::default();
        for iv in &approx.intervals {
            let len = iv.log_length.exp();
            acc.add(rule.average(|t| {
                let w = iv.left + t * len;
                (w * w).ln_1p()
            }));
        }
        let smooth = acc.value() * approx.mass_per_interval.to_real::<T>();
        Ok(CantorPotential { table, approx, rule, cfg: *cfg, smooth })
    }

    pub fn approx(&self) -> &CantorApprox<T> {
        &self.approx
    }

    pub fn config(&self) -> &QuadratureConfig<T> {
        &self.cfg
    }

    pub fn eval(&self, z: &SpherePoint<T>) -> PotentialValue<T> {
        match z {
            SpherePoint::Infinity => PotentialValue::clamp(-self.smooth, self.cfg.clamp_floor),
            SpherePoint::Finite(z) => self.eval_at(&CantorPoint::plain(*z)),
        }
    }

    /// Evaluates at a point given relative to the construction; use this for
    /// points on, or closer than `f64` resolution to, the set.
    pub fn eval_at(&self, z: &CantorPoint<T>) -> PotentialValue<T> {
        let plain = z.to_complex(self.table.params());
        let v = self.planar_at(z) - plain.norm_sqr().ln_1p() - self.smooth;
        PotentialValue::clamp(v, self.cfg.clamp_floor)
    }

    /// Planar part `∫ ln |z - w|² dμ_k(w)`.
    pub fn planar_at(&self, z: &CantorPoint<T>) -> T {
        let z = self.table.canonicalize(z);
        let n = self.approx.intervals.len();
        let kernel = |idx: usize| -> T {
            let rel = self.table.relative(&z, idx as u64);
            if rel.is_near() {
                rel.mean_log_abs()
            } else {
                self.rule.average(|t| rel.log_abs_at(t))
            }
        };
        let terms: Vec<T> = if n >= PARALLEL_MIN_INTERVALS {
            (0..n).into_par_iter().map(kernel).collect()
        } else {
            (0..n).map(kernel).collect()
        };
        let mut acc = NeumaierSum::default();
        for t in terms {
            acc.add(t);
        }
        T::lit(2.0) * acc.value() * self.approx.mass_per_interval.to_real::<T>()
    }
}

/// `p_{μ_k}(z)` for `k = cfg.depth`.
pub fn potential<T: Real>(
    z: &SpherePoint<T>,
    params: &CantorParams<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<PotentialValue<T>> {
    Ok(CantorPotential::new(params, cfg)?.eval(z))
}

/// `p_{μ_k}` at a point in Cantor-relative coordinates.
pub fn potential_at<T: Real>(
    z: &CantorPoint<T>,
    params: &CantorParams<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<PotentialValue<T>> {
    Ok(CantorPotential::new(params, cfg)?.eval_at(z))
}

/// Potential `Σ m_i ln chordal(z, w_i)²` of a finite list of atoms.
pub fn atomic_potential<T: Real>(z: &SpherePoint<T>, atoms: &[(SpherePoint<T>, T)]) -> PotentialValue<T> {
    let mut acc = NeumaierSum::default();
    for (w, m) in atoms {
        if *m == T::zero() {
            continue;
        }
        let d = chordal_distance(*z, *w);
        if d == T::zero() {
            return PotentialValue::NegInfinity;
        }
        acc.add(*m * T::lit(2.0) * d.ln());
    }
    PotentialValue::Finite(acc.value())
}

/// Least-squares line through `(x_k, p_{μ_k}(x₀))` with `x_k = (a/2)^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperBoundFit<T> {
    pub slope: T,
    pub intercept: T,
    /// `(k, x_k, p_{μ_k}(x₀))`.
    pub points: Vec<(usize, T, T)>,
}

impl<T: Real> UpperBoundFit<T> {
    pub fn strictly_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].2 < w[0].2)
    }

    /// Largest deviation of a fitted value above the line.
    pub fn max_excess(&self) -> T {
        self.points
            .iter()
            .map(|&(_, x, p)| p - (self.intercept + self.slope * x))
            .fold(T::neg_infinity(), T::max)
    }
}

pub fn upper_bound_fit<T: Real>(
    params: &CantorParams<T>,
    ks: &[usize],
    x0: &CantorPoint<T>,
    nodes: usize,
) -> Result<UpperBoundFit<T>> {
    if ks.len() < 3 {
        return Err(Error::InsufficientPoints { need: 3, got: ks.len() });
    }
    let half_a = params.a() / T::lit(2.0);
    let mut points = Vec::with_capacity(ks.len());
    for &k in ks {
        let cfg = QuadratureConfig::with_nodes(k, nodes)?;
        let p = CantorPotential::new(params, &cfg)?.eval_at(x0).value();
        points.push((k, half_a.powi(k as i32), p));
    }
    let (slope, intercept) = least_squares(points.iter().map(|&(_, x, p)| (x, p)));
    Ok(UpperBoundFit { slope, intercept, points })
}

fn least_squares<T: Real>(pts: impl Iterator<Item = (T, T)> + Clone) -> (T, T) {
    let n = T::from_usize(pts.clone().count()).unwrap();
    let (sx, sy) = pts.clone().fold((T::zero(), T::zero()), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts.fold((T::zero(), T::zero()), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Chordal distance from `z` to the union of the level intervals.
pub fn set_distance<T: Real>(z: &SpherePoint<T>, approx: &CantorApprox<T>) -> T {
    match z {
        SpherePoint::Infinity => approx
            .intervals
            .iter()
            .map(|iv| chordal_distance(*z, SpherePoint::real(iv.right.abs().max(iv.left.abs()))))
            .fold(T::infinity(), T::min),
        SpherePoint::Finite(p) => approx
            .intervals
            .iter()
            .map(|iv| segment_chordal_distance(*p, iv.left, iv.right))
            .fold(T::infinity(), T::min),
    }
}

// The squared chordal distance from z = x + iy to a real w is stationary where
// x w² - (|z|² - 1) w - x = 0.
fn segment_chordal_distance<T: Real>(z: Complex<T>, lo: T, hi: T) -> T {
    if z.im == T::zero() && lo <= z.re && z.re <= hi {
        return T::zero();
    }
    let at = |w: T| chordal_distance(SpherePoint::Finite(z), SpherePoint::real(w));
    let mut best = at(lo).min(at(hi));
    let x = z.re;
    let b = z.norm_sqr() - T::one();
    let mut roots = [T::nan(); 2];
    if x == T::zero() {
        roots[0] = T::zero();
    } else {
        let disc = (b * b + T::lit(4.0) * x * x).sqrt();
        // stable pair of roots of x w² - b w - x
        let q = if b >= T::zero() { (b + disc) / T::lit(2.0) } else { (b - disc) / T::lit(2.0) };
        roots[0] = q / x;
        roots[1] = -x / q;
    }
    for w in roots {
        if w >= lo && w <= hi {
            best = best.min(at(w));
        }
    }
    best
}

/// One sample's contribution `2 ln dist(z, 𝒞) - p_{μ_k}(z)`.
pub fn lower_bound_terms<T: Real>(
    params: &CantorParams<T>,
    cfg: &QuadratureConfig<T>,
    samples: &[SpherePoint<T>],
) -> Result<Vec<T>> {
    let pot = CantorPotential::new(params, cfg)?;
    samples
        .iter()
        .map(|z| {
            let d = set_distance(z, pot.approx());
            if !(d > T::zero()) {
                return Err(Error::SampleOnSet(format!("{z:?}")));
            }
            Ok(T::lit(2.0) * d.ln() - pot.eval(z).value())
        })
        .collect()
}

/// Empirical constant `C = max (2 ln dist(z, 𝒞) - p_{μ_k}(z))` over samples.
pub fn lower_bound_constant<T: Real>(
    params: &CantorParams<T>,
    cfg: &QuadratureConfig<T>,
    samples: &[SpherePoint<T>],
) -> Result<T> {
    if samples.is_empty() {
        return Err(Error::InsufficientPoints { need: 1, got: 0 });
    }
    Ok(lower_bound_terms(params, cfg, samples)?.into_iter().fold(T::neg_infinity(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::green;

    fn params(a: f64) -> CantorParams<f64> {
        CantorParams::with_default_depth(a).unwrap()
    }

    // Brute force: midpoint rule of −2πG over plain float intervals, after
    // the substitution t = s² that tames a log singularity at a left end.
    fn brute(z: Complex<f64>, p: &CantorParams<f64>, k: usize) -> f64 {
        let approx = build_level(p, k).unwrap();
        let m = 4000;
        let mut acc = 0.0;
        for iv in &approx.intervals {
            let len = iv.right - iv.left;
            for i in 0..m {
                let s = (i as f64 + 0.5) / m as f64;
                let w = iv.left + s * s * len;
                acc += 2.0 * s * -2.0 * std::f64::consts::PI * green(SpherePoint::Finite(z), SpherePoint::real(w));
            }
        }
        acc / (m as f64 * approx.intervals.len() as f64)
    }

    #[test]
    fn matches_brute_force_at_shallow_depth() {
        let p = params(3.0);
        for z in [Complex::new(0.5, 0.0), Complex::new(0.2, 0.3), Complex::new(-1.0, 2.0), Complex::new(0.02, 0.0)] {
            let cfg = QuadratureConfig::new(2).unwrap();
            let v = potential(&SpherePoint::Finite(z), &p, &cfg).unwrap().value();
            assert!((v - brute(z, &p, 2)).abs() < 1e-6, "{z}: {v}");
        }
    }

    #[test]
    fn on_set_value_matches_brute_force() {
        // z = 0 lies on the set; the self-interval term is integrable.
        let p = params(3.0);
        let cfg = QuadratureConfig::new(1).unwrap();
        let v = potential_at(&CantorPoint::real(0.0), &p, &cfg).unwrap().value();
        let b = brute(Complex::new(0.0, 0.0), &p, 1);
        assert!((v - b).abs() < 1e-6, "{v} vs {b}");
    }

    #[test]
    fn infinity_value_in_range() {
        let p = params(3.0);
        let cfg = QuadratureConfig::new(6).unwrap();
        let v = potential(&SpherePoint::Infinity, &p, &cfg).unwrap().value();
        assert!(v <= 0.0 && v >= -2f64.ln(), "{v}");
        // half the mass sits near 0, half near 1
        assert!((v + 0.5 * 2f64.ln()).abs() < 0.05);
    }

    #[test]
    fn mirror_symmetry() {
        // x -> 1 - x is not a rotation of the sphere: only the planar part
        // of the potential is symmetric.
        let p = params(3.0);
        let cfg = QuadratureConfig::new(6).unwrap();
        let pot = CantorPotential::new(&p, &cfg).unwrap();
        for x in [0.0, 0.01, 0.2, 0.37, 0.5, 1.3, -0.4] {
            let a = pot.planar_at(&CantorPoint::real(x));
            let b = pot.planar_at(&CantorPoint::real(1.0 - x));
            assert!((a - b).abs() < 1e-12, "{x}: {a} vs {b}");
            let pa = pot.eval(&SpherePoint::real(x)).value();
            let pb = pot.eval(&SpherePoint::real(1.0 - x)).value();
            let shift = (1.0 + (1.0 - x) * (1.0 - x)).ln() - (1.0 + x * x).ln();
            assert!((pa - pb - shift).abs() < 1e-12);
        }
        // deep on-set points, mirrored through their addresses
        let deep = CantorPotential::new(&p, &QuadratureConfig::new(10).unwrap()).unwrap();
        for (idx, off) in [(0u64, 0.0), (0b1011, 0.3), (0b110, 1.0)] {
            let a = deep.planar_at(&CantorPoint::new(4, idx, Complex::new(off, 0.0)));
            let b = deep.planar_at(&CantorPoint::new(4, 0b1111 ^ idx, Complex::new(1.0 - off, 0.0)));
            assert!((a - b).abs() < 1e-12 * a.abs(), "{idx}: {a} vs {b}");
        }
    }

    #[test]
    fn node_refinement_is_stable_away_from_set() {
        let p = params(3.0);
        let c8 = CantorPotential::new(&p, &QuadratureConfig::with_nodes(5, 8).unwrap()).unwrap();
        let c16 = CantorPotential::new(&p, &QuadratureConfig::with_nodes(5, 16).unwrap()).unwrap();
        for z in [SpherePoint::new(0.5, 0.0), SpherePoint::new(0.2, 0.15), SpherePoint::new(1.2, -0.3), SpherePoint::Infinity] {
            let d = (c8.eval(&z).value() - c16.eval(&z).value()).abs();
            assert!(d < 1e-6, "{z:?}: {d}");
        }
    }

    #[test]
    fn potential_at_origin_decreases_with_depth() {
        let p = params(3.0);
        let mut prev = f64::INFINITY;
        for k in 1..=10 {
            let v = potential_at(&CantorPoint::real(0.0), &p, &QuadratureConfig::new(k).unwrap()).unwrap().value();
            assert!(v < prev, "k = {k}");
            assert!(v.is_finite());
            prev = v;
        }
    }

    #[test]
    fn upper_bound_holds_with_fitted_constant() {
        // p_k(0) <= -2 (a/2)^k + C for one constant C over k = 4..10
        let p = params(3.0);
        let ks: Vec<usize> = (4..=10).collect();
        let fit = upper_bound_fit(&p, &ks, &CantorPoint::real(0.0), 8).unwrap();
        let c = fit.points.iter().map(|&(_, x, v)| v + 2.0 * x).fold(f64::NEG_INFINITY, f64::max);
        assert!(c.is_finite());
        assert!(fit.slope <= -1.8);
        assert!(fit.strictly_decreasing());
        assert!(upper_bound_fit(&p, &[4, 5], &CantorPoint::real(0.0), 8).is_err());
    }

    #[test]
    fn atomic_potential_hits_minus_infinity_on_atom() {
        let atoms = [(SpherePoint::real(0.0), 0.5), (SpherePoint::real(1.0), 0.5)];
        assert_eq!(atomic_potential(&SpherePoint::real(0.0), &atoms), PotentialValue::NegInfinity);
        let v = atomic_potential(&SpherePoint::Infinity, &atoms).value();
        assert!((v - (-0.5 * 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn clamp_floor_produces_sentinel() {
        let p = params(3.0);
        let mut cfg = QuadratureConfig::new(8).unwrap();
        cfg.clamp_floor = -10.0;
        let v = potential_at(&CantorPoint::real(0.0), &p, &cfg).unwrap();
        assert_eq!(v, PotentialValue::NegInfinity);
        assert_eq!(v.value(), f64::NEG_INFINITY);
    }

    #[test]
    fn set_distance_cases() {
        let p = params(3.0);
        let approx = build_level(&p, 3).unwrap();
        let inf = set_distance(&SpherePoint::Infinity, &approx);
        assert!((inf - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(set_distance(&SpherePoint::real(0.0), &approx), 0.0);
        // brute-force minimum over a fine sample of each interval
        for z in [Complex::new(0.5, 0.2), Complex::new(-3.0, 1.0), Complex::new(0.9, -2.0)] {
            let fast = set_distance(&SpherePoint::Finite(z), &approx);
            let mut slow = f64::INFINITY;
            for iv in &approx.intervals {
                for i in 0..=200 {
                    let w = iv.left + (iv.right - iv.left) * i as f64 / 200.0;
                    slow = slow.min(chordal_distance(SpherePoint::Finite(z), SpherePoint::real(w)));
                }
            }
            assert!(fast <= slow + 1e-15 && slow - fast < 1e-9, "{z}: {fast} {slow}");
        }
    }

    #[test]
    fn lower_bound_constant_rejects_points_on_set() {
        let p = params(3.0);
        let cfg = QuadratureConfig::new(4).unwrap();
        assert!(matches!(
            lower_bound_constant(&p, &cfg, &[SpherePoint::real(0.0)]),
            Err(Error::SampleOnSet(_))
        ));
        let c = lower_bound_constant(&p, &cfg, &[SpherePoint::Infinity, SpherePoint::new(0.5, 1.0)]).unwrap();
        assert!(c.is_finite());
    }
}
