//! Slice functions induced by holomorphic stem functions.
//!
//! A [`SliceFunction`] is stored through its stem `F: U -> C ⊗ H`, an
//! immutable closure that satisfies `F(conj z) = bar F(z)`. The induced
//! quaternionic function is `f(alpha + I beta) = A + I B` where
//! `F(alpha + 𝑖 beta) = A + 𝑖 B` with `A, B` quaternions.
//!
//! Operations on slice functions (the `*`-product, conjugates,
//! symmetrizations, derivatives) act pointwise on stems, so every function
//! built here stays holomorphic and Cauchy quadrature applies to it.

use std::sync::Arc;

use num_complex::Complex;

use crate::cquat::{cq_mul, vdot, CQuaternion};
use crate::error::{Error, Result};
use crate::quat::{quat_mul, ImagUnit, Quaternion};
use crate::scalar::{ci, creal, Real};

/// Trapezoid nodes for Cauchy quadrature.
pub const QUAD_NODES: usize = 32;
/// Largest quadrature radius.
pub const QUAD_RADIUS: f64 = 0.1;
/// Agreement required when the node count is doubled.
pub const QUAD_SELF_CHECK: f64 = 1e-9;
/// Below this radius the point is treated as on the boundary.
pub const MIN_QUAD_RADIUS: f64 = 1e-4;
/// `|n(F)| / |F_v|^2` below which `orth_decompose` switches to circle
/// averaging.
pub const TAU_AVERAGE: f64 = 1e-3;

/// Stem evaluator.
pub type Stem<T> = Arc<dyn Fn(Complex<T>) -> Result<CQuaternion<T>> + Send + Sync>;

/// Conjugation-symmetric domain in the complex parameter plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain<T> {
    /// The whole plane.
    Entire,
    /// Disk centred on the real axis.
    Disk { center: T, radius: T },
    /// The disk `|z - center| < radius` with `Im center > radius`, together
    /// with its mirror image.
    DiskPair { center: Complex<T>, radius: T },
}

impl<T: Real> Domain<T> {
    pub fn disk(center: T, radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::InvalidDomain("radius must be positive".into()));
        }
        Ok(Self::Disk { center, radius })
    }

    /// Disk pair from either of its two centres.
    pub fn disk_pair(center: Complex<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::InvalidDomain("radius must be positive".into()));
        }
        let upper = Complex::new(center.re, center.im.abs());
        if upper.im <= radius {
            return Err(Error::InvalidDomain("disk pair must not meet the real axis".into()));
        }
        Ok(Self::DiskPair { center: upper, radius })
    }

    pub fn meets_real_axis(&self) -> bool {
        !matches!(self, Self::DiskPair { .. })
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Self::Entire)
    }

    /// Signed distance to the boundary, positive inside.
    pub fn depth(&self, z: Complex<T>) -> T {
        match *self {
            Self::Entire => T::infinity(),
            Self::Disk { center, radius } => radius - (z - creal(center)).norm(),
            Self::DiskPair { center, radius } => {
                let up = radius - (z - center).norm();
                let down = radius - (z - center.conj()).norm();
                up.max(down)
            }
        }
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        self.depth(z) > T::zero()
    }

    /// Centre of the component containing the closed upper half plane part.
    pub fn upper_center(&self) -> Complex<T> {
        match *self {
            Self::Entire => creal(T::zero()),
            Self::Disk { center, .. } => creal(center),
            Self::DiskPair { center, .. } => center,
        }
    }

    pub fn radius(&self) -> Option<T> {
        match *self {
            Self::Entire => None,
            Self::Disk { radius, .. } | Self::DiskPair { radius, .. } => Some(radius),
        }
    }

    /// Deterministic sunflower pattern of `n` points at most `0.9 R` from
    /// the centres (radius 1 for the entire plane). For a disk pair the
    /// points alternate between the two components.
    pub fn sample_points(&self, n: usize) -> Vec<Complex<T>> {
        let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
        let (c, r) = match *self {
            Self::Entire => (creal(T::zero()), T::one()),
            Self::Disk { center, radius } => (creal(center), radius),
            Self::DiskPair { center, radius } => (center, radius),
        };
        (0..n)
            .map(|k| {
                let kk = T::from_count(k) + T::lit(0.5);
                let rho = T::lit(0.9) * r * (kk / T::from_count(n)).sqrt();
                let th = golden * kk;
                let z = c + Complex::new(rho * th.cos(), rho * th.sin());
                if matches!(self, Self::DiskPair { .. }) && k % 2 == 1 {
                    z.conj()
                } else {
                    z
                }
            })
            .collect()
    }

    /// The domain shared by `self` and `other`; `Entire` defers to the
    /// other domain.
    pub fn join(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Entire, d) | (d, Self::Entire) => Ok(*d),
            (a, b) if a == b => Ok(*a),
            _ => Err(Error::DomainMismatch),
        }
    }
}

/// Slice function given by its stem, its domain and, for polynomials, the
/// right coefficients `f(q) = Σ q^n a_n`.
#[derive(Clone)]
pub struct SliceFunction<T> {
    stem: Stem<T>,
    domain: Domain<T>,
    poly: Option<Arc<Vec<Quaternion<T>>>>,
}

impl<T: core::fmt::Debug> core::fmt::Debug for SliceFunction<T> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SliceFunction")
            .field("domain", &self.domain)
            .field("poly", &self.poly)
            .finish_non_exhaustive()
    }
}

/// Splits `q` into the stem parameter `alpha + 𝑖 beta` (`beta >= 0`) and the
/// imaginary unit, `None` on the real axis.
pub fn slice_point<T: Real>(q: Quaternion<T>) -> (Complex<T>, Option<ImagUnit<T>>) {
    match q.slice_coords() {
        Ok((alpha, unit, beta)) => (Complex::new(alpha, beta), Some(unit)),
        Err(_) => (creal(q.q0), None),
    }
}

/// `A + I B` for a stem value `A + 𝑖 B`.
pub fn induce<T: Real>(v: CQuaternion<T>, unit: Option<ImagUnit<T>>) -> Quaternion<T> {
    match unit {
        Some(u) => v.re() + quat_mul(u.as_quaternion(), v.im()),
        None => v.re(),
    }
}

fn scalar_value<T: Real>(s: Complex<T>) -> CQuaternion<T> {
    CQuaternion::scalar(s)
}

impl<T: Real> SliceFunction<T> {
    pub fn from_stem<F>(domain: Domain<T>, f: F) -> Self
    where
        F: Fn(Complex<T>) -> Result<CQuaternion<T>> + Send + Sync + 'static,
    {
        Self { stem: Arc::new(f), domain, poly: None }
    }

    /// Slice preserving function with complex-valued stem `phi`, which must
    /// satisfy `phi(conj z) = conj phi(z)`.
    pub fn slice_preserving<F>(domain: Domain<T>, phi: F) -> Self
    where
        F: Fn(Complex<T>) -> Result<Complex<T>> + Send + Sync + 'static,
    {
        Self::from_stem(domain, move |z| phi(z).map(scalar_value))
    }

    pub fn constant(q: Quaternion<T>, domain: Domain<T>) -> Self {
        Self::polynomial(vec![q], domain)
    }

    /// `f(q) = q`.
    pub fn identity(domain: Domain<T>) -> Self {
        Self::polynomial(vec![Quaternion::zero(), Quaternion::one()], domain)
    }

    /// `f(q) = Σ q^n a_n` with right coefficients `a_n`.
    pub fn polynomial(coeffs: Vec<Quaternion<T>>, domain: Domain<T>) -> Self {
        let coeffs = Arc::new(coeffs);
        let cs = coeffs.clone();
        let stem: Stem<T> = Arc::new(move |z| {
            let mut acc = CQuaternion::zero();
            for a in cs.iter().rev() {
                acc = acc.scale(z) + CQuaternion::from(*a);
            }
            Ok(acc)
        });
        Self { stem, domain, poly: Some(coeffs) }
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    /// Polynomial coefficients when the function was built from them.
    pub fn poly_coeffs(&self) -> Option<&[Quaternion<T>]> {
        self.poly.as_deref().map(|v| v.as_slice())
    }

    /// Same stem restricted to (or extended to) `domain`.
    pub fn with_domain(&self, domain: Domain<T>) -> Self {
        Self { stem: self.stem.clone(), domain, poly: self.poly.clone() }
    }

    /// Stem value at `z`.
    pub fn stem(&self, z: Complex<T>) -> Result<CQuaternion<T>> {
        if !self.domain.contains(z) {
            return Err(Error::OutOfDomain { re: z.re.as_f64(), im: z.im.as_f64() });
        }
        (self.stem)(z)
    }

    pub(crate) fn stem_unchecked(&self, z: Complex<T>) -> Result<CQuaternion<T>> {
        (self.stem)(z)
    }

    pub(crate) fn stem_fn(&self) -> Stem<T> {
        self.stem.clone()
    }

    /// `f(q)`.
    pub fn eval(&self, q: Quaternion<T>) -> Result<Quaternion<T>> {
        let (z, unit) = slice_point(q);
        Ok(induce(self.stem(z)?, unit))
    }

    /// Applies a pointwise map to the stem. `m` must commute with `bar`.
    pub fn map<M>(&self, m: M) -> Self
    where
        M: Fn(CQuaternion<T>) -> CQuaternion<T> + Send + Sync + 'static,
    {
        let s = self.stem.clone();
        Self::from_stem(self.domain, move |z| s(z).map(&m))
    }

    /// Combines two stems pointwise on the joined domain.
    pub fn zip_with<M>(&self, other: &Self, m: M) -> Result<Self>
    where
        M: Fn(CQuaternion<T>, CQuaternion<T>) -> CQuaternion<T> + Send + Sync + 'static,
    {
        let domain = self.domain.join(&other.domain)?;
        let (a, b) = (self.stem.clone(), other.stem.clone());
        Ok(Self::from_stem(domain, move |z| Ok(m(a(z)?, b(z)?))))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(move |x| x.scale_re(s))
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x)
    }

    /// `f * g`.
    pub fn star_mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, cq_mul)
    }

    /// `f^c`.
    pub fn conj_c(&self) -> Self {
        self.map(|x| x.conj_c())
    }

    /// `f^s = f * f^c`.
    pub fn sym(&self) -> Self {
        self.map(|x| scalar_value(x.snorm()))
    }

    /// `f0`.
    pub fn scalar_part(&self) -> Self {
        self.map(|x| x.scalar_part())
    }

    /// `f_v`.
    pub fn vector_part(&self) -> Self {
        self.map(|x| x.vector_part())
    }

    /// `f_v^s`.
    pub fn vsym(&self) -> Self {
        self.map(|x| scalar_value(x.vnorm()))
    }

    /// Largest `|F(conj z) - bar F(z)|` over `points`.
    pub fn stem_symmetry_defect(&self, points: &[Complex<T>]) -> Result<T> {
        let mut worst = T::zero();
        for &z in points {
            let a = self.stem(z.conj())?;
            let b = self.stem(z)?.bar();
            worst = worst.max(a.distance(b));
        }
        Ok(worst)
    }
}

/// `f(q)` for `q = alpha + I beta`.
pub fn slice_eval<T: Real>(f: &SliceFunction<T>, q: Quaternion<T>) -> Result<Quaternion<T>> {
    f.eval(q)
}

/// `f * g`.
pub fn star_mul<T: Real>(f: &SliceFunction<T>, g: &SliceFunction<T>) -> Result<SliceFunction<T>> {
    f.star_mul(g)
}

/// Value at `alpha + I beta` from values `v_J`, `v_K` at `alpha + J beta`,
/// `alpha + K beta`:
/// `(I - K)((J - K)^{-1} v_J) - (I - J)((J - K)^{-1} v_K)`.
pub fn representation_formula<T: Real>(
    v_j: Quaternion<T>,
    v_k: Quaternion<T>,
    j: ImagUnit<T>,
    k: ImagUnit<T>,
    i: ImagUnit<T>,
) -> Result<Quaternion<T>> {
    let (jq, kq, iq) = (j.as_quaternion(), k.as_quaternion(), i.as_quaternion());
    let inv = (jq - kq).inverse().ok_or(Error::DegenerateUnits)?;
    if (jq - kq).norm() <= T::epsilon() {
        return Err(Error::DegenerateUnits);
    }
    Ok(quat_mul(iq - kq, quat_mul(inv, v_j)) - quat_mul(iq - jq, quat_mul(inv, v_k)))
}

/// The five functions derived from `f`.
#[derive(Debug, Clone)]
pub struct StarParts<T> {
    pub f0: SliceFunction<T>,
    pub fv: SliceFunction<T>,
    pub fc: SliceFunction<T>,
    pub fs: SliceFunction<T>,
    pub fvs: SliceFunction<T>,
}

/// `f0`, `f_v`, `f^c`, `f^s` and `f_v^s`.
pub fn star_decompose<T: Real>(f: &SliceFunction<T>) -> StarParts<T> {
    StarParts { f0: f.scalar_part(), fv: f.vector_part(), fc: f.conj_c(), fs: f.sym(), fvs: f.vsym() }
}

/// Trapezoid rule for `F'(z)` on the circle of radius `r` with `n` nodes.
pub fn cauchy_derivative<T: Real>(
    stem: &(dyn Fn(Complex<T>) -> Result<CQuaternion<T>> + Send + Sync),
    z: Complex<T>,
    r: T,
    n: usize,
) -> Result<CQuaternion<T>> {
    let mut acc = CQuaternion::zero();
    let step = (T::PI() + T::PI()) / T::from_count(n);
    for k in 0..n {
        let w = (ci::<T>() * (step * T::from_count(k))).exp();
        let v = stem(z + w * r)?;
        acc = acc + v.scale(w.inv());
    }
    Ok(acc.scale_re(T::one() / (r * T::from_count(n))))
}

/// Mean of `F` on the circle of radius `r`, `n` nodes.
pub(crate) fn circle_mean<T: Real>(
    stem: &(dyn Fn(Complex<T>) -> Result<CQuaternion<T>> + Send + Sync),
    z: Complex<T>,
    r: T,
    n: usize,
) -> Result<CQuaternion<T>> {
    let mut acc = CQuaternion::zero();
    let step = (T::PI() + T::PI()) / T::from_count(n);
    for k in 0..n {
        let w = (ci::<T>() * (step * T::from_count(k))).exp();
        acc = acc + stem(z + w * r)?;
    }
    Ok(acc.scale_re(T::one() / T::from_count(n)))
}

fn quad_radius<T: Real>(domain: &Domain<T>, z: Complex<T>) -> Result<T> {
    let d = domain.depth(z);
    if !(d > T::zero()) {
        return Err(Error::OutOfDomain { re: z.re.as_f64(), im: z.im.as_f64() });
    }
    let r = T::lit(QUAD_RADIUS).min(d / T::lit(2.0));
    if r < T::lit(MIN_QUAD_RADIUS) {
        return Err(Error::NearBoundary);
    }
    Ok(r)
}

/// `F'(z)` by Cauchy quadrature with the node-doubling self check.
pub fn stem_derivative<T: Real>(f: &SliceFunction<T>, z: Complex<T>) -> Result<CQuaternion<T>> {
    let r = quad_radius(&f.domain, z)?;
    let coarse = cauchy_derivative(&*f.stem, z, r, QUAD_NODES)?;
    let fine = cauchy_derivative(&*f.stem, z, r, 2 * QUAD_NODES)?;
    let change = coarse.distance(fine);
    if change > T::lit(QUAD_SELF_CHECK) * fine.norm().max(T::one()) {
        return Err(Error::QuadratureNotConverged(change.as_f64()));
    }
    Ok(fine)
}

/// The slice derivative `∂_c f` as a function.
pub fn derivative<T: Real>(f: &SliceFunction<T>) -> SliceFunction<T> {
    let g = f.clone();
    SliceFunction::from_stem(f.domain, move |z| stem_derivative(&g, z))
}

/// `∂_c f (q)`.
pub fn slice_derivative<T: Real>(f: &SliceFunction<T>, q: Quaternion<T>) -> Result<Quaternion<T>> {
    let (z, unit) = slice_point(q);
    Ok(induce(stem_derivative(f, z)?, unit))
}

/// `∂_s f (q) = F_od(alpha + 𝑖 beta) / beta`.
pub fn spherical_derivative<T: Real>(f: &SliceFunction<T>, q: Quaternion<T>) -> Result<Quaternion<T>> {
    let (z, unit) = slice_point(q);
    if unit.is_none() {
        return Err(Error::RealAxis);
    }
    Ok(f.stem(z)?.im() / z.im)
}

fn sgn_im<T: Real>(z: Complex<T>) -> Result<T> {
    if z.im > T::zero() {
        Ok(T::one())
    } else if z.im < T::zero() {
        Ok(-T::one())
    } else {
        Err(Error::RealAxis)
    }
}

/// `J(q) = I` for `q = alpha + I beta`, `beta > 0`. Only defined on domains
/// that avoid the real axis.
pub fn j_function<T: Real>(domain: Domain<T>) -> Result<SliceFunction<T>> {
    if domain.meets_real_axis() {
        return Err(Error::JNotDefined);
    }
    Ok(SliceFunction::slice_preserving(domain, |z| Ok(ci::<T>() * sgn_im(z)?)))
}

/// `l_± = (1 ∓ J i) / 2`.
pub fn ell<T: Real>(domain: Domain<T>, plus: bool) -> Result<SliceFunction<T>> {
    if domain.meets_real_axis() {
        return Err(Error::JNotDefined);
    }
    let half = T::lit(0.5);
    let sign = if plus { -T::one() } else { T::one() };
    Ok(SliceFunction::from_stem(domain, move |z| {
        let jz = ci::<T>() * sgn_im(z)?;
        Ok(CQuaternion::new(creal(half), jz * (sign * half), creal(T::zero()), creal(T::zero())))
    }))
}

/// `g = g1 f_v + g_perp` with `g1` slice preserving and
/// `<f_v, (g_perp)_v> = 0`.
pub fn orth_decompose<T: Real>(
    f: &SliceFunction<T>,
    g: &SliceFunction<T>,
) -> Result<(SliceFunction<T>, SliceFunction<T>)> {
    let domain = f.domain.join(&g.domain)?;
    let probes = domain.sample_points(64);
    let tiny = T::lit(1e-12);
    let mut comps = [false, false];
    for &z in &probes {
        let fz = f.stem_unchecked(z)?;
        if fz.vnorm().norm() > tiny * fz.norm_sqr_v() {
            comps[usize::from(z.im < T::zero())] = true;
        }
    }
    let need_both = matches!(domain, Domain::DiskPair { .. });
    if !comps[0] || (need_both && !comps[1]) {
        return Err(Error::VanishingVectorPart);
    }
    let (fs, gs) = (f.stem_fn(), g.stem_fn());
    let ratio: Stem<T> = Arc::new(move |z| {
        let (fz, gz) = (fs(z)?, gs(z)?);
        Ok(scalar_value(vdot(gz.vector(), fz.vector()) / fz.vnorm()))
    });
    let fs = f.stem_fn();
    let g1 = SliceFunction::from_stem(domain, move |z| {
        let fz = fs(z)?;
        if well_conditioned(fz) {
            return ratio(z);
        }
        removable_value(&*fs, &*ratio, &domain, z)
    });
    let g1c = g1.clone();
    let fv = f.vector_part();
    let gperp = g.sub(&g1c.star_mul(&fv)?)?;
    Ok((g1, gperp))
}

/// `|n(F)|` is large compared with `|F_v|^2`, so dividing by it loses
/// little precision.
fn well_conditioned<T: Real>(fz: CQuaternion<T>) -> bool {
    let n = fz.vnorm().norm();
    n > T::min_positive_value() && n >= T::lit(TAU_AVERAGE) * fz.norm_sqr_v()
}

/// Cauchy mean of `ratio` on the largest circle around `z` (radius at most
/// 0.05 and half the depth) on which `n(F)` stays away from zero.
fn removable_value<T: Real>(
    fs: &(dyn Fn(Complex<T>) -> Result<CQuaternion<T>> + Send + Sync),
    ratio: &(dyn Fn(Complex<T>) -> Result<CQuaternion<T>> + Send + Sync),
    domain: &Domain<T>,
    z: Complex<T>,
) -> Result<CQuaternion<T>> {
    const NODES: usize = 64;
    let mut r = T::lit(0.05).min(domain.depth(z) / T::lit(2.0));
    let step = (T::PI() + T::PI()) / T::from_count(NODES);
    for _ in 0..16 {
        let mut ok = true;
        for k in 0..NODES {
            let w = z + (ci::<T>() * (step * T::from_count(k))).exp() * r;
            if !well_conditioned(fs(w)?) {
                ok = false;
                break;
            }
        }
        if ok {
            return circle_mean(ratio, z, r, NODES);
        }
        r = r / T::lit(2.0);
    }
    Err(Error::NonIsolatedZero)
}
