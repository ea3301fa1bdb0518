//! `*`-exponential, the `(h1, h2)` family of `*`-logarithms and `*`-roots.
//!
//! A logarithm of `f` is built by lifting the stem `F` through the covering
//! `epsilon`: at the basepoint `F` is split by `rho` into `((F0, r), F_v/r)`
//! with `r` the principal root of `n(F)`, the pair `(F0, r)` is lifted
//! through `e` with the monodromy index `h`, and the lift is continued over
//! the domain. The result is `G = u0 + u1 F_v / r`.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::continuation::{follow_sqrt, Continuation, Continued};
use crate::cquat::{classify, epsilon, CQuaternion, Locus};
use crate::error::{Error, Result};
use crate::lift::{frak_e_preimage, BranchIndex};
use crate::scalar::{ci, creal, Real};
use crate::slice::{j_function, Domain, SliceFunction};

/// `exp_*(f)`, the function with stem `epsilon ∘ F`.
pub fn star_exp<T: Real>(f: &SliceFunction<T>) -> SliceFunction<T> {
    f.map(epsilon)
}

/// `f^{*n}`.
pub fn star_pow<T: Real>(f: &SliceFunction<T>, n: u32) -> Result<SliceFunction<T>> {
    let mut acc = SliceFunction::constant(crate::quat::Quaternion::one(), *f.domain());
    for _ in 0..n {
        acc = acc.star_mul(f)?;
    }
    Ok(acc)
}

/// Which logarithm to build.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct LogBranchSpec<T> {
    pub h: BranchIndex,
    /// Where the branch is seeded; the centre of the upper component when
    /// absent.
    pub basepoint: Option<Complex<T>>,
    /// Must equal "the domain meets the real axis".
    pub real_constraint: bool,
}

impl<T: Real> LogBranchSpec<T> {
    pub fn new(domain: &Domain<T>, h: BranchIndex) -> Self {
        Self { h, basepoint: None, real_constraint: domain.meets_real_axis() }
    }

    pub fn at(mut self, basepoint: Complex<T>) -> Self {
        self.basepoint = Some(basepoint);
        self
    }

    /// Seed point actually used: moved to the upper component, and onto the
    /// real axis when the domain meets it.
    pub fn effective_basepoint(&self, domain: &Domain<T>) -> Complex<T> {
        let b = self.basepoint.unwrap_or_else(|| domain.upper_center());
        let b = Complex::new(b.re, b.im.abs());
        if domain.meets_real_axis() {
            creal(b.re)
        } else {
            b
        }
    }
}

fn check_generic<T: Real>(z: Complex<T>, v: CQuaternion<T>) -> Result<()> {
    match classify(v) {
        Locus::Generic => Ok(()),
        _ => Err(Error::HitsVLocus { re: z.re.as_f64(), im: z.im.as_f64() }),
    }
}

#[derive(Clone)]
pub(crate) struct LogState<T> {
    fv: CQuaternion<T>,
    r: Complex<T>,
    alpha: Complex<T>,
    beta: Complex<T>,
    la: Complex<T>,
    lb: Complex<T>,
}

struct LogEngine<T: Real> {
    f: SliceFunction<T>,
    h: BranchIndex,
}

impl<T: Real> Continuation<T> for LogEngine<T> {
    type State = LogState<T>;

    fn seed(&self, z: Complex<T>) -> Result<LogState<T>> {
        let fz = self.f.stem(z)?;
        check_generic(z, fz)?;
        let r = fz.vnorm().sqrt();
        let s = [fz.z1 / r, fz.z2 / r, fz.z3 / r];
        let u = frak_e_preimage(fz.z0, r, s, self.h)?;
        Ok(LogState {
            fv: fz,
            r,
            alpha: fz.z0 + ci::<T>() * r,
            beta: fz.z0 - ci::<T>() * r,
            la: u.u0 + ci::<T>() * u.u1,
            lb: u.u0 - ci::<T>() * u.u1,
        })
    }

    fn advance(&self, from: &LogState<T>, z: Complex<T>) -> Result<Option<LogState<T>>> {
        let fz = self.f.stem(z)?;
        check_generic(z, fz)?;
        let (r, small) = follow_sqrt(fz.vnorm(), from.r);
        if !small {
            return Ok(None);
        }
        let alpha = fz.z0 + ci::<T>() * r;
        let beta = fz.z0 - ci::<T>() * r;
        let da = (alpha / from.alpha).ln();
        let db = (beta / from.beta).ln();
        let bound = T::FRAC_PI_2();
        if da.norm() >= bound || db.norm() >= bound {
            return Ok(None);
        }
        Ok(Some(LogState { fv: fz, r, alpha, beta, la: from.la + da, lb: from.lb + db }))
    }

    fn value(&self, s: &LogState<T>) -> CQuaternion<T> {
        let two = T::lit(2.0);
        let u0 = (s.la + s.lb) / two;
        let u1 = (s.la - s.lb) / (ci::<T>() * two);
        let k = u1 / s.r;
        CQuaternion::new(u0, s.fv.z1 * k, s.fv.z2 * k, s.fv.z3 * k)
    }
}

/// Number of domain samples checked for the `V` loci before building a
/// logarithm.
pub const LOG_PRECHECK_SAMPLES: usize = 64;

/// The logarithm of `f` with monodromy index `spec.h`: `exp_*(g) = f`.
///
/// On domains meeting the real axis only `h2 = -h1` gives a slice function;
/// other indices are rejected.
pub fn star_log<T: Real>(f: &SliceFunction<T>, spec: &LogBranchSpec<T>) -> Result<SliceFunction<T>> {
    let domain = *f.domain();
    if !domain.is_bounded() {
        return Err(Error::UnboundedDomain);
    }
    if spec.real_constraint != domain.meets_real_axis() {
        return Err(Error::InvalidDomain("real constraint does not match the domain".into()));
    }
    if spec.real_constraint && spec.h.a() != 0 {
        return Err(Error::InadmissibleBranch { h1: spec.h.h1, h2: spec.h.h2 });
    }
    for z in domain.sample_points(LOG_PRECHECK_SAMPLES) {
        check_generic(z, f.stem(z)?)?;
    }
    let base = spec.effective_basepoint(&domain);
    let cont = Arc::new(Continued::new(LogEngine { f: f.clone(), h: spec.h }, domain, base)?);
    Ok(SliceFunction::from_stem(domain, move |z| cont.eval(z)))
}

#[derive(Clone)]
pub(crate) struct RootState<T> {
    r: Complex<T>,
}

struct SqrtEngine<T: Real> {
    w: SliceFunction<T>,
    sign: T,
}

impl<T: Real> SqrtEngine<T> {
    fn radicand(&self, z: Complex<T>) -> Result<Complex<T>> {
        let w = self.w.stem(z)?.vnorm();
        if w.norm() <= T::lit(crate::cquat::TAU_CLS) {
            return Err(Error::BranchObstruction);
        }
        Ok(w)
    }
}

impl<T: Real> Continuation<T> for SqrtEngine<T> {
    type State = RootState<T>;

    fn seed(&self, z: Complex<T>) -> Result<RootState<T>> {
        Ok(RootState { r: self.radicand(z)?.sqrt() * self.sign })
    }

    fn advance(&self, from: &RootState<T>, z: Complex<T>) -> Result<Option<RootState<T>>> {
        let (r, small) = follow_sqrt(self.radicand(z)?, from.r);
        Ok(small.then_some(RootState { r }))
    }

    fn value(&self, s: &RootState<T>) -> CQuaternion<T> {
        CQuaternion::scalar(s.r)
    }
}

/// Continuous `sqrt(f_v^s)`, equal to `sign` times the principal root at
/// the basepoint.
pub fn sqrt_fvs<T: Real>(f: &SliceFunction<T>, basepoint: Complex<T>, sign: T) -> Result<SliceFunction<T>> {
    let domain = *f.domain();
    let spec = LogBranchSpec::new(&domain, BranchIndex::ZERO).at(basepoint);
    let base = spec.effective_basepoint(&domain);
    let cont = Arc::new(Continued::new(SqrtEngine { w: f.clone(), sign: sign.signum() }, domain, base)?);
    Ok(SliceFunction::from_stem(domain, move |z| cont.eval(z)))
}

/// `g + pi [(h1 + h2) J + (h1 - h2) g_v / sqrt(g_v^s)]`, another logarithm
/// of `exp_*(g)`. The root is the one with sign `sign` at `basepoint`.
pub fn log_translate<T: Real>(
    g: &SliceFunction<T>,
    h: BranchIndex,
    basepoint: Complex<T>,
    sign: T,
) -> Result<SliceFunction<T>> {
    let domain = *g.domain();
    if domain.meets_real_axis() && h.a() != 0 {
        return Err(Error::JNotDefined);
    }
    if h == BranchIndex::ZERO {
        return Ok(g.clone());
    }
    let pi = T::PI();
    let mut out = g.clone();
    if h.a() != 0 {
        let j = j_function(domain)?;
        out = out.add(&j.scale(pi * T::lit(h.a() as f64)))?;
    }
    if h.b() != 0 {
        let root = sqrt_fvs(g, basepoint, sign)?;
        let b = pi * T::lit(h.b() as f64);
        let unit = g.zip_with(&root, move |gz, rz| gz.vector_part().scale(rz.z0.inv()).scale_re(b))?;
        out = out.add(&unit)?;
    }
    Ok(out)
}

/// Sign for [`sqrt_fvs`] such that `g_v / sqrt(g_v^s)` equals the axis
/// `F_v / sqrt(n(F))` (principal root) at `basepoint`. For a logarithm
/// `g` of `f` this makes [`log_translate`] reproduce the branch family of
/// [`star_log`].
pub fn axis_sign<T: Real>(f: &SliceFunction<T>, g: &SliceFunction<T>, basepoint: Complex<T>) -> Result<T> {
    let fz = f.stem(basepoint)?;
    let gz = g.stem(basepoint)?;
    let axis = fz.vector_part().scale(fz.vnorm().sqrt().inv());
    let root = gz.vnorm().sqrt();
    if root.norm() <= T::lit(crate::cquat::TAU_CLS) {
        return Err(Error::BranchObstruction);
    }
    let c = crate::cquat::vdot(gz.vector(), axis.vector()) / root;
    Ok(if c.re >= T::zero() { T::one() } else { -T::one() })
}

/// `exp_*(log_*(f) / n)`; its `n`-th `*`-power is `f`.
pub fn star_root<T: Real>(f: &SliceFunction<T>, n: u32, spec: &LogBranchSpec<T>) -> Result<SliceFunction<T>> {
    if n == 0 {
        return Err(Error::BadOrder);
    }
    let g = star_log(f, spec)?;
    Ok(star_exp(&g.scale(T::one() / T::lit(n as f64))))
}
