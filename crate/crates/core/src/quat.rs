//! Real quaternions, the quaternionic exponential and its covering strata.

use core::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Boundary tolerance for [`exp_stratum`].
pub const TAU_STRAT: f64 = 1e-9;

/// Below this modulus of the vector part `sin(t)/t` and `cos(t)` switch to
/// their Taylor expansions.
const SMALL_ANGLE: f64 = 1e-4;

/// `q0 + q1 i + q2 j + q3 k`.
///
/// Serialized as the JSON array `[q0, q1, q2, q3]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[T; 4]", into = "[T; 4]")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Quaternion<T> {
    pub q0: T,
    pub q1: T,
    pub q2: T,
    pub q3: T,
}

impl<T: Real> From<[T; 4]> for Quaternion<T> {
    fn from(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl<T: Real> From<Quaternion<T>> for [T; 4] {
    fn from(q: Quaternion<T>) -> Self {
        [q.q0, q.q1, q.q2, q.q3]
    }
}

impl<T: Real> Quaternion<T> {
    #[inline]
    pub const fn new(q0: T, q1: T, q2: T, q3: T) -> Self {
        Self { q0, q1, q2, q3 }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn one() -> Self {
        Self::real(T::one())
    }

    #[inline]
    pub fn real(a: T) -> Self {
        Self::new(a, T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    #[inline]
    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    #[inline]
    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    /// Pure imaginary quaternion from a 3-vector.
    #[inline]
    pub fn from_vector(v: [T; 3]) -> Self {
        Self::new(T::zero(), v[0], v[1], v[2])
    }

    /// `alpha + I beta` on the slice `C_I`.
    #[inline]
    pub fn on_slice(alpha: T, unit: ImagUnit<T>, beta: T) -> Self {
        let v = unit.as_array();
        Self::new(alpha, beta * v[0], beta * v[1], beta * v[2])
    }

    #[inline]
    pub fn scalar(self) -> T {
        self.q0
    }

    #[inline]
    pub fn vector(self) -> [T; 3] {
        [self.q1, self.q2, self.q3]
    }

    #[inline]
    pub fn vector_part(self) -> Self {
        Self::new(T::zero(), self.q1, self.q2, self.q3)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.q0, -self.q1, -self.q2, -self.q3)
    }

    #[inline]
    pub fn norm_sqr(self) -> T {
        self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `|q_v|`.
    #[inline]
    pub fn vector_norm(self) -> T {
        (self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3).sqrt()
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Self::new(self.q0 * s, self.q1 * s, self.q2 * s, self.q3 * s)
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        let n = self.norm_sqr();
        if n == T::zero() {
            None
        } else {
            Some(self.conj().scale(T::one() / n))
        }
    }

    /// Decomposes `q = alpha + I beta` with `beta = |q_v| > 0`.
    pub fn slice_coords(self) -> Result<(T, ImagUnit<T>, T)> {
        let beta = self.vector_norm();
        if beta == T::zero() {
            return Err(Error::RealAxis);
        }
        let v = self.vector();
        let unit = ImagUnit {
            x1: v[0] / beta,
            x2: v[1] / beta,
            x3: v[2] / beta,
        };
        Ok((self.q0, unit, beta))
    }

    /// Euclidean distance in `R^4`.
    #[inline]
    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.q0.is_finite() && self.q1.is_finite() && self.q2.is_finite() && self.q3.is_finite()
    }

    /// `exp(q)`, see [`quat_exp`].
    #[inline]
    pub fn exp(self) -> Self {
        quat_exp(self)
    }
}

/// Hamilton product in the scalar/vector form
/// `p0 q0 - <p_v, q_v> + p0 q_v + q0 p_v + p_v x q_v`.
#[inline]
pub fn quat_mul<T: Real>(p: Quaternion<T>, q: Quaternion<T>) -> Quaternion<T> {
    let pv = p.vector();
    let qv = q.vector();
    let dot = pv[0] * qv[0] + pv[1] * qv[1] + pv[2] * qv[2];
    let cr = cross(pv, qv);
    Quaternion::new(
        p.q0 * q.q0 - dot,
        p.q0 * qv[0] + q.q0 * pv[0] + cr[0],
        p.q0 * qv[1] + q.q0 * pv[1] + cr[1],
        p.q0 * qv[2] + q.q0 * pv[2] + cr[2],
    )
}

#[inline]
pub(crate) fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `(cos t, sin t / t)` with a Taylor branch near `t = 0`.
pub(crate) fn cos_sinc<T: Real>(t: T) -> (T, T) {
    if t.abs() < T::lit(SMALL_ANGLE) {
        let t2 = t * t;
        let cos = T::one() - t2 / T::lit(2.0) * (T::one() - t2 / T::lit(12.0));
        let sinc = T::one() - t2 / T::lit(6.0) * (T::one() - t2 / T::lit(20.0));
        (cos, sinc)
    } else {
        (t.cos(), t.sin() / t)
    }
}

/// `exp(q) = e^{q0} (cos|q_v| + sinc(|q_v|) q_v)`.
///
/// Slice preserving: the result lies on the slice `C_I` of `q`.
pub fn quat_exp<T: Real>(q: Quaternion<T>) -> Quaternion<T> {
    let (c, s) = cos_sinc(q.vector_norm());
    let e = q.q0.exp();
    let v = q.vector();
    Quaternion::new(e * c, e * s * v[0], e * s * v[1], e * s * v[2])
}

/// Position of a quaternion with respect to the strata
/// `U_k = { k pi < |q_v| < (k + 1) pi }` of the exponential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stratum {
    Regular(u64),
    Singular,
}

/// Locates `q` in the stratification of `exp`.
///
/// Points with `| |q_v| - h pi | <= TAU_STRAT` for some integer `h >= 0`
/// (including the real axis) are reported as [`Stratum::Singular`].
pub fn exp_stratum<T: Real>(q: Quaternion<T>) -> Stratum {
    let t = q.vector_norm();
    let pi = T::PI();
    let h = (t / pi).round();
    if (t - h * pi).abs() <= T::lit(TAU_STRAT) {
        Stratum::Singular
    } else {
        Stratum::Regular((t / pi).floor().to_u64().unwrap_or(u64::MAX))
    }
}

/// `T(alpha + I beta) = alpha + I (beta + pi)`, a diffeomorphism `U_h -> U_{h+1}`.
pub fn tmap<T: Real>(q: Quaternion<T>) -> Result<Quaternion<T>> {
    let (alpha, unit, beta) = q.slice_coords()?;
    Ok(Quaternion::on_slice(alpha, unit, beta + T::PI()))
}

/// The unique preimage of `w` under `exp` inside the stratum `U_h`.
///
/// `exp` restricted to each `U_h` is a diffeomorphism onto `H \ R`, so the
/// inverse exists for every non-real `w`.
pub fn exp_inverse_on_stratum<T: Real>(w: Quaternion<T>, h: u64) -> Result<Quaternion<T>> {
    let (_, unit, wv) = w.slice_coords()?;
    let alpha = w.norm().ln();
    let theta = wv.atan2(w.q0);
    let hh = T::from_u64(h).expect("stratum index representable");
    let pi = T::PI();
    if h % 2 == 0 {
        Ok(Quaternion::on_slice(alpha, unit, theta + hh * pi))
    } else {
        Ok(Quaternion::on_slice(alpha, unit.neg(), (hh + T::one()) * pi - theta))
    }
}

/// Unit imaginary quaternion `I` with `I^2 = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImagUnit<T> {
    x1: T,
    x2: T,
    x3: T,
}

impl<T: Real> ImagUnit<T> {
    /// Validates `x1^2 + x2^2 + x3^2 = 1` to `1e-12`.
    pub fn new(x1: T, x2: T, x3: T) -> Result<Self> {
        let n = x1 * x1 + x2 * x2 + x3 * x3;
        if (n - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(16.0)) {
            return Err(Error::NotUnit(n.as_f64()));
        }
        Ok(Self { x1, x2, x3 })
    }

    /// Normalizes an arbitrary non-zero 3-vector.
    pub fn normalized(v: [T; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n == T::zero() || !n.is_finite() {
            return Err(Error::NotUnit(0.0));
        }
        Ok(Self { x1: v[0] / n, x2: v[1] / n, x3: v[2] / n })
    }

    pub fn i() -> Self {
        Self { x1: T::one(), x2: T::zero(), x3: T::zero() }
    }

    pub fn j() -> Self {
        Self { x1: T::zero(), x2: T::one(), x3: T::zero() }
    }

    pub fn k() -> Self {
        Self { x1: T::zero(), x2: T::zero(), x3: T::one() }
    }

    #[inline]
    pub fn as_array(self) -> [T; 3] {
        [self.x1, self.x2, self.x3]
    }

    #[inline]
    pub fn as_quaternion(self) -> Quaternion<T> {
        Quaternion::from_vector(self.as_array())
    }

    #[inline]
    pub fn neg(self) -> Self {
        Self { x1: -self.x1, x2: -self.x2, x3: -self.x3 }
    }
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn add(self, r: Self) -> Self {
        Self::new(self.q0 + r.q0, self.q1 + r.q1, self.q2 + r.q2, self.q3 + r.q3)
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn sub(self, r: Self) -> Self {
        Self::new(self.q0 - r.q0, self.q1 - r.q1, self.q2 - r.q2, self.q3 - r.q3)
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.q0, -self.q1, -self.q2, -self.q3)
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, r: Self) -> Self {
        quat_mul(self, r)
    }
}

impl<T: Real> Mul<T> for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Real> Div<T> for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        self.scale(T::one() / s)
    }
}
