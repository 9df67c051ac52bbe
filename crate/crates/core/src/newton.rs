//! Newton polyhedra of monomial ideals: exact membership and a grid
//! estimate of the covolume `n! · vol(ℝ^n_{≥0} ∖ P)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::monomial::MonomialIdeal;
use crate::scalar::{BigRational, Exact};

pub const MIN_RESOLUTION: usize = 16;

/// Maximizes `c·y` subject to `A y <= b`, `y >= 0`, for `b >= 0`, starting
/// from the all-slack basis and pivoting by Bland's rule. `None` if
/// unbounded.
pub(crate) fn simplex_max<T: Exact>(a: &[Vec<T>], b: &[T], c: &[T]) -> Option<T> {
    let rows = a.len();
    let vars = c.len();
    let cols = vars + rows;
    // tableau rows: [A | I | b]; objective row: [-c | 0 | value]
    let mut t: Vec<Vec<T>> = Vec::with_capacity(rows + 1);
    for (i, row) in a.iter().enumerate() {
        debug_assert!(b[i] >= T::zero());
        let mut r = row.clone();
        r.extend((0..rows).map(|j| if j == i { T::one() } else { T::zero() }));
        r.push(b[i].clone());
        t.push(r);
    }
    let mut obj: Vec<T> = c.iter().map(|x| -x.clone()).collect();
    obj.extend((0..=rows).map(|_| T::zero()));
    t.push(obj);
    let mut basis: Vec<usize> = (vars..cols).collect();

    loop {
        let Some(enter) = (0..cols).find(|&j| t[rows][j] < T::zero()) else {
            return Some(t[rows][cols].clone());
        };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..rows {
            if t[i][enter] > T::zero() {
                let ratio = t[i][cols].clone() / t[i][enter].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (pr, _) = leave?;
        let piv = t[pr][enter].clone();
        for v in t[pr].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        let pivot_row = t[pr].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == pr || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
        }
        basis[pr] = enter;
    }
}

fn gen_coord<T: Exact>(e: u32) -> T {
    T::from_int(e as i64)
}

/// Whether `x` lies in `conv(generators) + ℝ^n_{≥0}`, decided exactly.
///
/// Solves `max Σλ` over `λ >= 0`, `Σλ <= 1`, `Σ λ_g g <= x`; the point
/// belongs to the polyhedron iff the optimum is 1.
pub fn newton_membership<T: Exact>(ideal: &MonomialIdeal, x: &[T]) -> Result<bool> {
    let n = ideal.n();
    if x.len() != n {
        return Err(Error::Dimension { expected: n, got: x.len() });
    }
    if x.iter().any(|v| *v < T::zero()) {
        return Err(Error::NegativeCoordinate);
    }
    let gens = ideal.generators();
    if gens.iter().any(|g| g.0.iter().zip(x).all(|(&e, v)| gen_coord::<T>(e) <= *v)) {
        return Ok(true);
    }
    let mut a: Vec<Vec<T>> = (0..n).map(|i| gens.iter().map(|g| gen_coord(g.0[i])).collect()).collect();
    a.push(vec![T::one(); gens.len()]);
    let mut b: Vec<T> = x.to_vec();
    b.push(T::one());
    let c = vec![T::one(); gens.len()];
    let opt = simplex_max(&a, &b, &c).ok_or_else(|| Error::Internal("membership LP unbounded".into()))?;
    Ok(opt == T::one())
}

/// Smallest `t` with `(prefix, t)` in the Newton polyhedron, where `prefix`
/// holds the first `n - 1` coordinates. Requires a pure power of the last
/// variable.
pub fn newton_threshold<T: Exact>(ideal: &MonomialIdeal, prefix: &[T]) -> Result<T> {
    let n = ideal.n();
    if prefix.len() + 1 != n {
        return Err(Error::Dimension { expected: n - 1, got: prefix.len() });
    }
    if prefix.iter().any(|v| *v < T::zero()) {
        return Err(Error::NegativeCoordinate);
    }
    let top = ideal.pure_power_degree(n - 1).ok_or(Error::NotPrimary(n - 1))?;
    let top_t: T = gen_coord(top);
    // Eliminate the weight on z_n^N: minimize N + Σ λ_g (g_n - N).
    let others: Vec<_> = ideal.generators().iter().filter(|g| g.0[..n - 1].iter().any(|&e| e > 0)).collect();
    if others.is_empty() {
        return Ok(top_t);
    }
    let mut a: Vec<Vec<T>> = (0..n - 1).map(|i| others.iter().map(|g| gen_coord(g.0[i])).collect()).collect();
    a.push(vec![T::one(); others.len()]);
    let mut b: Vec<T> = prefix.to_vec();
    b.push(T::one());
    let c: Vec<T> = others.iter().map(|g| top_t.clone() - gen_coord(g.0[n - 1])).collect();
    let opt = simplex_max(&a, &b, &c).ok_or_else(|| Error::Internal("threshold LP unbounded".into()))?;
    Ok(top_t - opt)
}

/// Result of a cell-centre count.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCount {
    pub resolution: usize,
    /// Side of the box `[0, B]^n`.
    pub box_size: u32,
    /// Cells whose centres lie outside the polyhedron.
    pub outside: u64,
    /// `n! · outside · (B/R)^n`.
    pub covolume: BigRational,
}

impl GridCount {
    pub fn value(&self) -> f64 {
        self.covolume.to_f64_approx()
    }
}

/// Grid estimate on `[0, B]^n` with `B` the largest pure-power degree.
pub fn covolume_grid(ideal: &MonomialIdeal, resolution: usize) -> Result<f64> {
    Ok(covolume_count(ideal, resolution)?.value())
}

pub fn covolume_count(ideal: &MonomialIdeal, resolution: usize) -> Result<GridCount> {
    let b = ideal.pure_power_degrees()?.into_iter().max().unwrap_or(0);
    covolume_count_in_box::<BigRational>(ideal, resolution, b)
}

/// Cell-centre count on `[0, box_size]^n`, in exact scalar `T`.
///
/// Each column `(i_1, …, i_{n-1})` is resolved with one threshold LP, using
/// that the polyhedron is closed upward in the last coordinate.
pub fn covolume_count_in_box<T: Exact>(ideal: &MonomialIdeal, resolution: usize, box_size: u32) -> Result<GridCount> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Resolution(resolution));
    }
    let degrees = ideal.pure_power_degrees()?;
    if degrees.iter().any(|&d| d > box_size) {
        return Err(Error::Range(format!("box {box_size} smaller than a pure-power degree")));
    }
    let n = ideal.n();
    if box_size == 0 {
        // only the unit ideal fits a zero box; it has covolume 0
        return Ok(GridCount { resolution, box_size, outside: 0, covolume: BigRational::from_int(0) });
    }
    let r = resolution as u64;
    let two_r = T::from_int(2 * resolution as i64);
    let bt = T::from_int(box_size as i64);
    let centre = |i: u64| -> T { T::from_int(2 * i as i64 + 1) * bt.clone() / two_r.clone() };

    let column = |prefix: &[u64]| -> Result<u64> {
        let coords: Vec<T> = prefix.iter().map(|&i| centre(i)).collect();
        let t = newton_threshold(ideal, &coords)?;
        // #{i < R : (2i + 1) B < 2R t}
        let v = (two_r.clone() * t / bt.clone() - T::one()) / T::from_int(2);
        if v <= T::zero() {
            return Ok(0);
        }
        let c = v.ceil_i64().ok_or_else(|| Error::Internal("threshold overflow".into()))? as u64;
        Ok(c.min(r))
    };

    let outside: u64 = if n == 1 {
        column(&[])?
    } else {
        let per_first: Vec<Result<u64>> = (0..r)
            .into_par_iter()
            .map(|i0| {
                let mut prefix = vec![0u64; n - 1];
                prefix[0] = i0;
                let mut acc = 0u64;
                loop {
                    acc += column(&prefix)?;
                    // odometer over the remaining prefix coordinates
                    let mut j = 1;
                    loop {
                        if j == n - 1 {
                            return Ok(acc);
                        }
                        prefix[j] += 1;
                        if prefix[j] < r {
                            break;
                        }
                        prefix[j] = 0;
                        j += 1;
                    }
                }
            })
            .collect();
        per_first.into_iter().sum::<Result<u64>>()?
    };

    let fact = (2..=n as i64).fold(BigRational::from_int(1), |f, k| f * BigRational::from_int(k));
    let pitch = BigRational::from_frac(box_size as i64, resolution as i64);
    let covolume = fact * BigRational::from_integer(outside.into()) * pitch.pow_u32(n as u32);
    Ok(GridCount { resolution, box_size, outside, covolume })
}

/// Grid estimate at `R` and `2R`, with their difference as an error bar.
#[derive(Clone, Debug, PartialEq)]
pub struct GridEstimate {
    pub coarse: GridCount,
    pub fine: GridCount,
}

impl GridEstimate {
    pub fn value(&self) -> f64 {
        self.fine.value()
    }

    pub fn error_bar(&self) -> f64 {
        (self.fine.value() - self.coarse.value()).abs()
    }
}

pub fn covolume_estimate(ideal: &MonomialIdeal, resolution: usize) -> Result<GridEstimate> {
    Ok(GridEstimate { coarse: covolume_count(ideal, resolution)?, fine: covolume_count(ideal, 2 * resolution)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::{family_hyperplane, family_point, ExponentVector};
    use num_rational::Ratio;

    type Q = BigRational;

    #[test]
    fn unit_ideal_has_no_covolume() {
        let unit = MonomialIdeal::new(2, vec![ExponentVector(vec![0, 0])]).unwrap();
        let c = covolume_count(&unit, 16).unwrap();
        assert_eq!((c.outside, c.covolume), (0, Q::from_int(0)));
        assert_eq!(unit.colength().unwrap(), 0);
    }

    fn q(n: i64, d: i64) -> Q {
        Q::from_frac(n, d)
    }

    fn ideal(n: usize, gens: &[&[u32]]) -> MonomialIdeal {
        MonomialIdeal::new(n, gens.iter().map(|g| ExponentVector(g.to_vec())).collect()).unwrap()
    }

    #[test]
    fn simplex_small_lp() {
        // max x + y, x + 2y <= 4, 3x + y <= 6 -> (8/5, 6/5), value 14/5
        let a = vec![vec![q(1, 1), q(2, 1)], vec![q(3, 1), q(1, 1)]];
        let b = vec![q(4, 1), q(6, 1)];
        let c = vec![q(1, 1), q(1, 1)];
        assert_eq!(simplex_max(&a, &b, &c), Some(q(14, 5)));
        // unbounded
        assert_eq!(simplex_max(&[vec![q(-1, 1)]], &[q(1, 1)], &[q(1, 1)]), None);
    }

    #[test]
    fn membership_examples() {
        let a = ideal(2, &[&[2, 0], &[0, 2]]);
        assert!(newton_membership(&a, &[q(1, 1), q(1, 1)]).unwrap());
        assert!(!newton_membership(&a, &[q(1, 1), q(9, 10)]).unwrap());
        assert!(!newton_membership(&a, &[q(0, 1), q(0, 1)]).unwrap());
        assert!(newton_membership(&a, &[q(2, 1), q(0, 1)]).unwrap());
        assert!(matches!(newton_membership(&a, &[q(-1, 1), q(3, 1)]), Err(Error::NegativeCoordinate)));
        assert!(matches!(newton_membership(&a, &[q(1, 1)]), Err(Error::Dimension { .. })));
        // small fixed-width scalar works too
        let x: Vec<Ratio<i64>> = vec![Ratio::new(1, 1), Ratio::new(1, 1)];
        assert!(newton_membership(&a, &x).unwrap());
    }

    #[test]
    fn threshold_agrees_with_membership() {
        let a = family_point(3, 1, 2).unwrap();
        for (x, y) in [(0, 0), (1, 0), (1, 1), (3, 1), (0, 3)] {
            let prefix = [q(x, 2), q(y, 2)];
            let t = newton_threshold(&a, &prefix).unwrap();
            let at = [prefix[0].clone(), prefix[1].clone(), t.clone()];
            assert!(newton_membership(&a, &at).unwrap());
            if t > q(0, 1) {
                let below = [prefix[0].clone(), prefix[1].clone(), t - q(1, 1000)];
                assert!(!newton_membership(&a, &below).unwrap());
            }
        }
        let m = ideal(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(newton_threshold(&m, &[q(1, 4)]).unwrap(), q(3, 4));
    }

    #[test]
    fn grid_examples() {
        let h = covolume_grid(&family_hyperplane(2, 1, 2).unwrap(), 256).unwrap();
        assert!((h - 6.0).abs() / 6.0 < 0.02, "{h}");
        let p = covolume_grid(&family_point(3, 1, 2).unwrap(), 96).unwrap();
        assert!((p - 10.0).abs() / 10.0 < 0.03, "{p}");
        assert!(matches!(covolume_grid(&family_point(3, 1, 2).unwrap(), 8), Err(Error::Resolution(8))));
        assert!(matches!(covolume_grid(&ideal(2, &[&[1, 1]]), 32), Err(Error::NotPrimary(_))));
    }

    #[test]
    fn grid_at_p_equals_q() {
        use crate::monomial::{family_ideal, multiplicity_closed_form, Family};
        for n in 2..=3 {
            for fam in [Family::Hyperplane, Family::Point] {
                let exact = multiplicity_closed_form(fam, n, 1, 1).unwrap();
                let exact = exact.to_string().parse::<f64>().unwrap();
                let v = covolume_grid(&family_ideal(fam, n, 1, 1, false).unwrap(), 64).unwrap();
                assert!((v - exact).abs() / exact < 0.05, "{fam} n={n}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn grid_maximal_powers() {
        for n in 1..=3 {
            for d in 1..=4u32 {
                let v = covolume_grid(&MonomialIdeal::maximal_power(n, d).unwrap(), 128).unwrap();
                let target = (d as f64).powi(n as i32);
                assert!((v - target).abs() / target < 0.02, "n={n} d={d}: {v}");
            }
        }
    }

    #[test]
    fn refinement_error_bar_shrinks() {
        let a = family_hyperplane(2, 1, 2).unwrap();
        let e = covolume_estimate(&a, 32).unwrap();
        assert!(e.error_bar() < 0.5);
        assert!((e.value() - 6.0).abs() < (e.coarse.value() - 6.0).abs() + 1e-12);
    }
}
