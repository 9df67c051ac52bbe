use num_complex::Complex;
use num_traits::{One, Zero};

use super::CantorParams;
use crate::scalar::Real;

/// A point of the plane described relative to the Cantor construction.
///
/// The point is `left(I) + offset * l_level`, where `I` is the level-`level`
/// interval with address `index`. Points of the set itself, or points
/// closer to it than `f64` can resolve, are written this way so that
/// distances to nearby intervals keep full relative precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CantorPoint<T> {
    pub level: usize,
    pub index: u64,
    pub offset: Complex<T>,
}

impl<T: Real> CantorPoint<T> {
    pub fn new(level: usize, index: u64, offset: Complex<T>) -> Self {
        assert!(level < 64, "address depth limited to 63 levels");
        assert!(level == 63 || index < (1u64 << level), "index {index} out of range for level {level}");
        CantorPoint { level, index, offset }
    }

    /// An ordinary point of the plane.
    pub fn plain(z: Complex<T>) -> Self {
        CantorPoint { level: 0, index: 0, offset: z }
    }

    pub fn real(x: T) -> Self {
        Self::plain(Complex::new(x, T::zero()))
    }

    /// Left endpoint of an interval; this point belongs to the Cantor set.
    pub fn left_end(level: usize, index: u64) -> Self {
        Self::new(level, index, Complex::zero())
    }

    pub fn right_end(level: usize, index: u64) -> Self {
        Self::new(level, index, Complex::one())
    }

    pub fn midpoint(level: usize, index: u64) -> Self {
        Self::new(level, index, Complex::new(T::lit(0.5), T::zero()))
    }

    /// Plain coordinates (rounded to `T`).
    pub fn to_complex(&self, params: &CantorParams<T>) -> Complex<T> {
        let table = LevelTable::new(params, self.level);
        let left = table.digit_offset(self.index, self.level, 0);
        Complex::new(left, T::zero()) + self.offset * params.log_length(self.level).exp()
    }
}

/// Position of a point relative to one level-`k` interval `[w0, w0 + l_k]`:
/// `z - (w0 + t l_k) = exp(log_scale) * (base - exp(log_slope) * t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Relative<T> {
    pub log_scale: T,
    pub base: Complex<T>,
    pub log_slope: T,
    /// The point is anchored inside this very interval.
    pub same_interval: bool,
}

impl<T: Real> Relative<T> {
    pub fn slope(&self) -> T {
        self.log_slope.exp()
    }

    /// `ln |z - w(t)|`.
    pub fn log_abs_at(&self, t: T) -> T {
        self.log_scale + (self.base - self.slope() * t).norm().ln()
    }

    /// True when the point is within one interval length of the interval,
    /// where a polynomial rule would resolve the log kernel poorly.
    pub fn is_near(&self) -> bool {
        self.same_interval || self.base.norm().ln() - self.log_slope < T::LN_2()
    }

    /// `∫_0^1 ln |z - w(t)| dt`, exact.
    pub fn mean_log_abs(&self) -> T {
        let slope = self.slope();
        if slope == T::zero() {
            return self.log_scale + self.base.norm().ln();
        }
        self.log_scale + self.log_slope + mean_log_abs_affine(self.base / slope)
    }
}

/// `∫_0^1 ln |u - t| dt` for complex `u`.
pub fn mean_log_abs_affine<T: Real>(u: Complex<T>) -> T {
    let y = u.im.abs();
    let half = T::lit(0.5);
    let prim = |v: T| -> T {
        if y == T::zero() {
            if v == T::zero() {
                T::zero()
            } else {
                v * v.abs().ln() - v
            }
        } else {
            half * v * (v * v + y * y).ln() - v + y * (v / y).atan()
        }
    };
    prim(T::one() - u.re) - prim(-u.re)
}

/// Per-level logarithmic data for levels `0..=depth`.
#[derive(Clone, Debug)]
pub struct LevelTable<T> {
    params: CantorParams<T>,
    depth: usize,
    log_len: Vec<T>,
    // 1 - l_m / l_{m-1}
    gap_share: Vec<T>,
}

impl<T: Real> LevelTable<T> {
    pub fn new(params: &CantorParams<T>, depth: usize) -> Self {
        let log_len = (0..=depth).map(|j| params.log_length(j)).collect();
        let mut gap_share = vec![T::zero()];
        gap_share.extend((1..=depth).map(|m| -params.log_ratio(m).exp_m1()));
        LevelTable { params: *params, depth, log_len, gap_share }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn params(&self) -> &CantorParams<T> {
        &self.params
    }

    pub fn log_length(&self, j: usize) -> T {
        match self.log_len.get(j) {
            Some(v) => *v,
            None => self.params.log_length(j),
        }
    }

    fn gap_share(&self, m: usize) -> T {
        match self.gap_share.get(m) {
            Some(v) => *v,
            None => -self.params.log_ratio(m).exp_m1(),
        }
    }

    fn ratio(&self, m: usize) -> T {
        (self.log_length(m) - self.log_length(m - 1)).exp()
    }

    /// `l_level / l_from`.
    fn scale(&self, level: usize, from: usize) -> T {
        (self.log_length(level) - self.log_length(from)).exp()
    }

    /// Distance from the left end of the level-`from` ancestor to the left
    /// end of interval `index` at level `level`, in units of `l_from`.
    pub fn digit_offset(&self, index: u64, level: usize, from: usize) -> T {
        let mut acc = T::zero();
        for m in (from + 1)..=level {
            if (index >> (level - m)) & 1 == 1 {
                let step = (self.log_length(m - 1) - self.log_length(from)).exp() * self.gap_share(m);
                acc = acc + step;
            }
        }
        acc
    }

    /// Re-anchors a point at the deepest interval (up to `depth`) whose own
    /// length bounds the point's distance to it.
    pub fn canonicalize(&self, point: &CantorPoint<T>) -> CantorPoint<T> {
        let mut p = *point;
        if p.level > self.depth {
            let lift = self.digit_offset(p.index, p.level, self.depth);
            p.offset = p.offset * self.scale(p.level, self.depth) + lift;
            p.index >>= p.level - self.depth;
            p.level = self.depth;
        }
        let zero = Complex::<T>::zero();
        let one = Complex::<T>::one();
        while p.level < self.depth {
            let r = self.ratio(p.level + 1);
            let left = p.index << 1;
            if p.offset == zero {
                p.index = left;
            } else if p.offset == one {
                p.index = left | 1;
            } else if r > T::zero() && dist_to_segment(p.offset, T::zero(), r) <= r {
                p.offset = p.offset / r;
                p.index = left;
            } else if r > T::zero() && dist_to_segment(p.offset, T::one() - r, T::one()) <= r {
                p.offset = one - (one - p.offset) / r;
                p.index = left | 1;
            } else {
                break;
            }
            p.level += 1;
        }
        p
    }

    /// Geometry of a canonical point against level-`depth` interval `index`.
    pub fn relative(&self, z: &CantorPoint<T>, index: u64) -> Relative<T> {
        let k = self.depth;
        let j = z.level.min(k);
        debug_assert!(z.level <= k, "point must be canonicalized first");
        let w_top = index >> (k - j);
        let diff = z.index ^ w_top;
        if diff != 0 {
            let bit = 63 - diff.leading_zeros() as usize;
            let anchor = j - bit - 1;
            let pos_z = z.offset * self.scale(j, anchor) + self.digit_offset(z.index, j, anchor);
            let pos_w = self.digit_offset(index, k, anchor);
            Relative {
                log_scale: self.log_length(anchor),
                base: pos_z - pos_w,
                log_slope: self.log_length(k) - self.log_length(anchor),
                same_interval: false,
            }
        } else if j == k {
            Relative {
                log_scale: self.log_length(k),
                base: z.offset,
                log_slope: T::zero(),
                same_interval: true,
            }
        } else {
            let pos_w = self.digit_offset(index, k, j);
            Relative {
                log_scale: self.log_length(j),
                base: z.offset - pos_w,
                log_slope: self.log_length(k) - self.log_length(j),
                same_interval: false,
            }
        }
    }
}

fn dist_to_segment<T: Real>(z: Complex<T>, lo: T, hi: T) -> T {
    let x = if z.re < lo {
        lo
    } else if z.re > hi {
        hi
    } else {
        z.re
    };
    (z - Complex::new(x, T::zero())).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> CantorParams<f64> {
        CantorParams::with_default_depth(3.0).unwrap()
    }

    // Midpoint-rule oracle for ∫_0^1 ln|u - t| dt.
    fn brute_mean_log(u: Complex<f64>) -> f64 {
        let n = 400_000;
        (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) / n as f64;
                (u - t).norm().ln()
            })
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn closed_form_log_kernel() {
        assert!((mean_log_abs_affine(Complex::new(0.0f64, 0.0)) + 1.0).abs() < 1e-15);
        assert!((mean_log_abs_affine(Complex::new(0.5, 0.0)) - (0.5f64.ln() - 1.0)).abs() < 1e-15);
        for u in [Complex::new(0.3, 0.2), Complex::new(-1.5, 0.7), Complex::new(2.0, 0.0), Complex::new(0.9, -0.05)] {
            let exact = mean_log_abs_affine(u);
            assert!((exact - brute_mean_log(u)).abs() < 1e-5, "{u}: {exact}");
        }
    }

    #[test]
    fn canonical_origin_descends_to_depth() {
        let p = params();
        let t = p.table(10);
        let c = t.canonicalize(&CantorPoint::real(0.0));
        assert_eq!((c.level, c.index), (10, 0));
        assert_eq!(c.offset, Complex::new(0.0, 0.0));
        let c = t.canonicalize(&CantorPoint::real(1.0));
        assert_eq!((c.level, c.index), (10, (1 << 10) - 1));
        assert_eq!(c.offset, Complex::new(1.0, 0.0));
    }

    #[test]
    fn canonical_gap_point_stays_shallow() {
        let p = params();
        let t = p.table(10);
        let c = t.canonicalize(&CantorPoint::real(0.5));
        assert_eq!(c.level, 0);
    }

    #[test]
    fn relative_matches_float_geometry_at_shallow_levels() {
        let p = params();
        let t = p.table(3);
        let approx = super::super::build_level(&p, 3).unwrap();
        let z = Complex::new(0.37, 0.11);
        let cz = t.canonicalize(&CantorPoint::plain(z));
        for (idx, iv) in approx.intervals.iter().enumerate() {
            for tt in [0.0, 0.25, 1.0] {
                let w = iv.left + tt * (iv.right - iv.left);
                let direct = (z - w).norm().ln();
                let rel = t.relative(&cz, idx as u64).log_abs_at(tt);
                assert!((direct - rel).abs() < 1e-12, "idx {idx}: {direct} vs {rel}");
            }
        }
    }

    #[test]
    fn deep_sibling_distance_in_log_space() {
        let p = params();
        let t = p.table(10);
        let origin = t.canonicalize(&CantorPoint::real(0.0));
        // the interval 0…01 sits at distance l_9 - l_10 from the origin
        let rel = t.relative(&origin, 1);
        let expected = p.log_length(9) + (-(p.log_ratio(10)).exp()).ln_1p();
        assert!((rel.log_abs_at(0.0) - expected).abs() < 1e-9);
        assert!(rel.log_abs_at(0.0).is_finite());
    }

    #[test]
    fn plain_coordinates_round_trip() {
        let p = params();
        let pt = CantorPoint::left_end(2, 0b10);
        let z = pt.to_complex(&p);
        let approx = super::super::build_level(&p, 2).unwrap();
        assert!((z.re - approx.intervals[2].left).abs() < 1e-15);
    }
}
