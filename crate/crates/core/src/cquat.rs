//! The complexified algebra `C ⊗ H ≅ C^4`.
//!
//! Elements are `z0 + z1 i + z2 j + z3 k` with complex coordinates. The
//! product has the same analytic expression as the Hamilton product, so
//! every polynomial identity of `H` carries over. Two commuting conjugations
//! act on it: [`CQuaternion::conj_c`] negates the vector part and
//! [`CQuaternion::bar`] conjugates every coordinate.
//!
//! Throughout, `n(z) = z1^2 + z2^2 + z3^2` (no complex conjugation), so
//! `z z^c = z0^2 + n(z)` is a complex scalar that may vanish for `z != 0`.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::quat::Quaternion;
use crate::scalar::{creal, Real};

/// Absolute tolerance for membership in `V_-1` and `V_inf`.
pub const TAU_CLS: f64 = 1e-10;

/// Power series are used for `|w| < 1` in [`even_trig`].
const EVEN_SERIES_RADIUS: f64 = 1.0;
const EVEN_SERIES_TERMS: usize = 25;

/// Element of `C ⊗ H`.
///
/// JSON form: `[[re, im], [re, im], [re, im], [re, im]]` in the order
/// `z0, z1, z2, z3`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[Complex<T>; 4]", into = "[Complex<T>; 4]")]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct CQuaternion<T> {
    pub z0: Complex<T>,
    pub z1: Complex<T>,
    pub z2: Complex<T>,
    pub z3: Complex<T>,
}

impl<T: Real> From<[Complex<T>; 4]> for CQuaternion<T> {
    fn from(a: [Complex<T>; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl<T: Real> From<CQuaternion<T>> for [Complex<T>; 4] {
    fn from(z: CQuaternion<T>) -> Self {
        [z.z0, z.z1, z.z2, z.z3]
    }
}

impl<T: Real> From<Quaternion<T>> for CQuaternion<T> {
    fn from(q: Quaternion<T>) -> Self {
        Self::new(creal(q.q0), creal(q.q1), creal(q.q2), creal(q.q3))
    }
}

impl<T: Real> CQuaternion<T> {
    #[inline]
    pub const fn new(z0: Complex<T>, z1: Complex<T>, z2: Complex<T>, z3: Complex<T>) -> Self {
        Self { z0, z1, z2, z3 }
    }

    #[inline]
    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, z, z, z)
    }

    #[inline]
    pub fn one() -> Self {
        Self::scalar(creal(T::one()))
    }

    /// `(s, 0, 0, 0)`.
    #[inline]
    pub fn scalar(s: Complex<T>) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(s, z, z, z)
    }

    /// `(0, v1, v2, v3)`.
    #[inline]
    pub fn from_vector(v: [Complex<T>; 3]) -> Self {
        Self::new(Complex::new(T::zero(), T::zero()), v[0], v[1], v[2])
    }

    /// `re + 𝑖 im` with `re, im` real quaternions.
    pub fn from_parts(re: Quaternion<T>, im: Quaternion<T>) -> Self {
        Self::new(
            Complex::new(re.q0, im.q0),
            Complex::new(re.q1, im.q1),
            Complex::new(re.q2, im.q2),
            Complex::new(re.q3, im.q3),
        )
    }

    /// Real parts as a quaternion (the even part of a stem value).
    #[inline]
    pub fn re(self) -> Quaternion<T> {
        Quaternion::new(self.z0.re, self.z1.re, self.z2.re, self.z3.re)
    }

    /// Imaginary parts as a quaternion (the odd part of a stem value).
    #[inline]
    pub fn im(self) -> Quaternion<T> {
        Quaternion::new(self.z0.im, self.z1.im, self.z2.im, self.z3.im)
    }

    #[inline]
    pub fn vector(self) -> [Complex<T>; 3] {
        [self.z1, self.z2, self.z3]
    }

    #[inline]
    pub fn scalar_part(self) -> Self {
        Self::scalar(self.z0)
    }

    #[inline]
    pub fn vector_part(self) -> Self {
        Self::from_vector(self.vector())
    }

    /// `z^c = z0 - z_v`.
    #[inline]
    pub fn conj_c(self) -> Self {
        Self::new(self.z0, -self.z1, -self.z2, -self.z3)
    }

    /// Componentwise complex conjugation.
    #[inline]
    pub fn bar(self) -> Self {
        Self::new(self.z0.conj(), self.z1.conj(), self.z2.conj(), self.z3.conj())
    }

    /// `n(z) = z1^2 + z2^2 + z3^2`.
    #[inline]
    pub fn vnorm(self) -> Complex<T> {
        self.z1 * self.z1 + self.z2 * self.z2 + self.z3 * self.z3
    }

    /// `|z1|^2 + |z2|^2 + |z3|^2`.
    #[inline]
    pub fn norm_sqr_v(self) -> T {
        self.z1.norm_sqr() + self.z2.norm_sqr() + self.z3.norm_sqr()
    }

    /// `z z^c = z0^2 + n(z)`.
    #[inline]
    pub fn snorm(self) -> Complex<T> {
        self.z0 * self.z0 + self.vnorm()
    }

    #[inline]
    pub fn scale(self, s: Complex<T>) -> Self {
        Self::new(self.z0 * s, self.z1 * s, self.z2 * s, self.z3 * s)
    }

    #[inline]
    pub fn scale_re(self, s: T) -> Self {
        Self::new(self.z0 * s, self.z1 * s, self.z2 * s, self.z3 * s)
    }

    /// Euclidean norm of `C^4`; the only norm used for tolerances.
    #[inline]
    pub fn norm(self) -> T {
        (self.z0.norm_sqr() + self.z1.norm_sqr() + self.z2.norm_sqr() + self.z3.norm_sqr()).sqrt()
    }

    #[inline]
    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        [self.z0, self.z1, self.z2, self.z3]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Inverse `z^c / (z z^c)`, `None` on `V_-1`.
    pub fn inverse(self) -> Option<Self> {
        let s = self.snorm();
        if s.norm() <= T::zero() {
            return None;
        }
        Some(self.conj_c().scale(s.inv()))
    }
}

/// Formal bilinear dot product `<a, b> = a1 b1 + a2 b2 + a3 b3`.
#[inline]
pub fn vdot<T: Real>(a: [Complex<T>; 3], b: [Complex<T>; 3]) -> Complex<T> {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Formal cross product.
#[inline]
pub fn vcross<T: Real>(a: [Complex<T>; 3], b: [Complex<T>; 3]) -> [Complex<T>; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Product in `C ⊗ H`:
/// `z0 w0 - <z_v, w_v> + z0 w_v + w0 z_v + z_v x w_v`.
#[inline]
pub fn cq_mul<T: Real>(z: CQuaternion<T>, w: CQuaternion<T>) -> CQuaternion<T> {
    let zv = z.vector();
    let wv = w.vector();
    let c = vcross(zv, wv);
    CQuaternion::new(
        z.z0 * w.z0 - vdot(zv, wv),
        z.z0 * wv[0] + w.z0 * zv[0] + c[0],
        z.z0 * wv[1] + w.z0 * zv[1] + c[1],
        z.z0 * wv[2] + w.z0 * zv[2] + c[2],
    )
}

/// Position of an element relative to `V_-1 = {z0^2 + n(z) = 0}` and
/// `V_inf = {n(z) = 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Locus {
    Generic,
    InVminus1,
    InVinf,
    InBoth,
}

/// Classifies `z` with the absolute tolerance [`TAU_CLS`].
pub fn classify<T: Real>(z: CQuaternion<T>) -> Locus {
    classify_with(z, T::lit(TAU_CLS))
}

pub fn classify_with<T: Real>(z: CQuaternion<T>, tol: T) -> Locus {
    let on_m1 = z.snorm().norm() <= tol;
    let on_inf = z.vnorm().norm() <= tol;
    match (on_m1, on_inf) {
        (false, false) => Locus::Generic,
        (true, false) => Locus::InVminus1,
        (false, true) => Locus::InVinf,
        (true, true) => Locus::InBoth,
    }
}

/// `cos(√w)` and `sin(√w)/√w`; both are entire in `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenTrigPair<T> {
    pub cosr: Complex<T>,
    pub sincr: Complex<T>,
}

/// Evaluates [`EvenTrigPair`] at `w`.
///
/// Power series for `|w| < 1`; otherwise the principal root is used, and the
/// even/odd pairing makes the result independent of the root chosen.
pub fn even_trig<T: Real>(w: Complex<T>) -> EvenTrigPair<T> {
    if w.norm() < T::lit(EVEN_SERIES_RADIUS) {
        even_trig_series(w, EVEN_SERIES_TERMS)
    } else {
        even_trig_from_root(w.sqrt())
    }
}

/// `(cos r, sin r / r)` for a given root `r` of `w`.
pub(crate) fn even_trig_from_root<T: Real>(r: Complex<T>) -> EvenTrigPair<T> {
    EvenTrigPair { cosr: r.cos(), sincr: r.sin() / r }
}

pub(crate) fn even_trig_series<T: Real>(w: Complex<T>, terms: usize) -> EvenTrigPair<T> {
    // cos√w = Σ (-w)^k/(2k)!, sin√w/√w = Σ (-w)^k/(2k+1)!, summed by Horner.
    let mw = -w;
    let mut cosr = creal(T::one());
    let mut sincr = creal(T::one());
    for k in (1..terms).rev() {
        let kk = T::from_count(k);
        let two = T::lit(2.0);
        cosr = creal(T::one()) + mw * cosr / ((two * kk - T::one()) * (two * kk));
        sincr = creal(T::one()) + mw * sincr / ((two * kk) * (two * kk + T::one()));
    }
    EvenTrigPair { cosr, sincr }
}

/// Chebyshev-type coefficients of `(x + I y)^n = P_n(x, y^2) + I y Q_n(x, y^2)`.
///
/// Uses `P_{n+1} = x P_n - y^2 Q_n` and `Q_{n+1} = P_n + x Q_n`, starting
/// from `P_0 = 1, Q_0 = 0`.
pub fn power_coefficients<T: Real>(x: Complex<T>, y2: Complex<T>, n: u32) -> (Complex<T>, Complex<T>) {
    let mut p = creal(T::one());
    let mut q = creal(T::zero());
    for _ in 0..n {
        let np = x * p - y2 * q;
        let nq = p + x * q;
        p = np;
        q = nq;
    }
    (p, q)
}

/// `sigma_n(z) = (P_n(z0, n(z)), z_v Q_n(z0, n(z)))`, equal to `z^n`.
pub fn sigma_n<T: Real>(z: CQuaternion<T>, n: u32) -> CQuaternion<T> {
    let (p, q) = power_coefficients(z.z0, z.vnorm(), n);
    let v = z.vector();
    CQuaternion::new(p, v[0] * q, v[1] * q, v[2] * q)
}

/// Exponential of `C ⊗ H`: `e^{z0} (cos√n(z) + sinc√n(z) z_v)`.
pub fn epsilon<T: Real>(z: CQuaternion<T>) -> CQuaternion<T> {
    let t = even_trig(z.vnorm());
    let e = z.z0.exp();
    let s = e * t.sincr;
    CQuaternion::new(e * t.cosr, z.z1 * s, z.z2 * s, z.z3 * s)
}

/// `nu(z) = Σ_m (-1)^m z^m / (2m+1)!`, the series with `nu(z^2) z = sin z`.
///
/// Summed through the same power recurrence as [`sigma_n`]; `nu(0) = 1`.
pub fn nu<T: Real>(z: CQuaternion<T>) -> CQuaternion<T> {
    if z == CQuaternion::zero() {
        return CQuaternion::one();
    }
    let x = z.z0;
    let y2 = z.vnorm();
    let mut p = creal(T::one());
    let mut q = creal(T::zero());
    let mut coeff = T::one();
    let mut acc_p = creal(T::zero());
    let mut acc_q = creal(T::zero());
    let scale = z.norm().max(T::one());
    for m in 0..200usize {
        let tp = p * coeff;
        let tq = q * coeff;
        acc_p = acc_p + tp;
        acc_q = acc_q + tq;
        if m > 2 && (tp.norm() + tq.norm() * scale) <= T::epsilon() * T::lit(1e-3) * (acc_p.norm() + T::one()) {
            break;
        }
        let np = x * p - y2 * q;
        let nq = p + x * q;
        p = np;
        q = nq;
        let mm = T::from_count(m + 1);
        coeff = -coeff / ((T::lit(2.0) * mm) * (T::lit(2.0) * mm + T::one()));
    }
    let v = z.vector();
    CQuaternion::new(acc_p, v[0] * acc_q, v[1] * acc_q, v[2] * acc_q)
}

impl<T: Real> Add for CQuaternion<T> {
    type Output = Self;
    #[inline]
    fn add(self, r: Self) -> Self {
        Self::new(self.z0 + r.z0, self.z1 + r.z1, self.z2 + r.z2, self.z3 + r.z3)
    }
}

impl<T: Real> Sub for CQuaternion<T> {
    type Output = Self;
    #[inline]
    fn sub(self, r: Self) -> Self {
        Self::new(self.z0 - r.z0, self.z1 - r.z1, self.z2 - r.z2, self.z3 - r.z3)
    }
}

impl<T: Real> Neg for CQuaternion<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.z0, -self.z1, -self.z2, -self.z3)
    }
}

impl<T: Real> Mul for CQuaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, r: Self) -> Self {
        cq_mul(self, r)
    }
}
