//! Riemann-sphere geometry and the Green function of the round metric of
//! total volume one.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point of the Riemann sphere in the chart `w ∈ ℂ`, or the point at
/// infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint<T> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> SpherePoint<T> {
    pub fn new(re: T, im: T) -> Self {
        SpherePoint::Finite(Complex::new(re, im))
    }

    pub fn real(x: T) -> Self {
        Self::new(x, T::zero())
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex<T>> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }

    /// `|z|`, infinite at the point at infinity.
    pub fn modulus(&self) -> T {
        match self {
            SpherePoint::Finite(z) => z.norm(),
            SpherePoint::Infinity => T::infinity(),
        }
    }
}

impl<T> From<Complex<T>> for SpherePoint<T> {
    fn from(z: Complex<T>) -> Self {
        SpherePoint::Finite(z)
    }
}

/// Chordal distance `|z - w| / (√(1+|z|²) √(1+|w|²))`, in `[0, 1]`.
pub fn chordal_distance<T: Real>(z: SpherePoint<T>, w: SpherePoint<T>) -> T {
    match (z, w) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => T::zero(),
        (SpherePoint::Infinity, SpherePoint::Finite(p)) | (SpherePoint::Finite(p), SpherePoint::Infinity) => {
            T::one() / (T::one() + p.norm_sqr()).sqrt()
        }
        (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
            let d = (a - b).norm();
            if d.is_zero() {
                return T::zero();
            }
            (d / ((T::one() + a.norm_sqr()).sqrt() * (T::one() + b.norm_sqr()).sqrt())).min(T::one())
        }
    }
}

/// Green function `G(z, w) = -(1/π) ln chordal(z, w)`; `+∞` on the diagonal.
pub fn green<T: Real>(z: SpherePoint<T>, w: SpherePoint<T>) -> T {
    let d = chordal_distance(z, w);
    if d.is_zero() {
        return T::infinity();
    }
    -d.ln() / T::PI()
}

/// Radial profile `G(r) = G(0, r) = (1/2π) ln((1 + r²)/r²)`.
pub fn green_radial<T: Real>(r: T) -> T {
    (r * r).recip().ln_1p() / (T::lit(2.0) * T::PI())
}

/// Central-difference residual of `(2π)(1+r²)² (G'' + G'/r) / 4 = 1`.
pub fn radial_ode_residual<T: Real>(r: T, h: T) -> Result<T> {
    if !(r > T::zero()) || !(h > T::zero()) || h * T::lit(10.0) > r {
        return Err(Error::StepTooLarge { r: r.to_f64_lossy(), h: h.to_f64_lossy() });
    }
    let gm = green_radial(r - h);
    let g0 = green_radial(r);
    let gp = green_radial(r + h);
    let second = (gp - T::lit(2.0) * g0 + gm) / (h * h);
    let first = (gp - gm) / (T::lit(2.0) * h);
    let q = T::one() + r * r;
    Ok(T::lit(2.0) * T::PI() * q * q * (second + first / r) / T::lit(4.0) - T::one())
}

/// `|G(z, w) - G(0, M_z(w))|` for the unitary Möbius map
/// `M_z(w) = (w - z) / (1 + z̄ w)`, which moves `z` to the origin.
pub fn mobius_invariance_gap<T: Real>(z: SpherePoint<T>, w: SpherePoint<T>) -> T {
    if z == w {
        return T::zero();
    }
    let lhs = green(z, w);
    let rhs = green(SpherePoint::origin(), mobius_image(z, w));
    if lhs.is_infinite() && rhs.is_infinite() {
        return T::zero();
    }
    (lhs - rhs).abs()
}

/// `M_z(w)` up to a unimodular factor, which `G(0, ·)` ignores.
fn mobius_image<T: Real>(z: SpherePoint<T>, w: SpherePoint<T>) -> SpherePoint<T> {
    match (z, w) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => SpherePoint::origin(),
        // |M_∞(w)| = 1/|w|
        (SpherePoint::Infinity, SpherePoint::Finite(b)) => {
            if b.is_zero() {
                SpherePoint::Infinity
            } else {
                SpherePoint::real(T::one() / b.norm())
            }
        }
        // |M_z(∞)| = 1/|z|
        (SpherePoint::Finite(a), SpherePoint::Infinity) => {
            if a.is_zero() {
                SpherePoint::Infinity
            } else {
                SpherePoint::real(T::one() / a.norm())
            }
        }
        (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
            let den = Complex::new(T::one(), T::zero()) + a.conj() * b;
            if den.is_zero() {
                SpherePoint::Infinity
            } else {
                SpherePoint::Finite((b - a) / den)
            }
        }
    }
}
