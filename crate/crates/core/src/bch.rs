//! Products of `*`-exponentials and the slice derivative of `exp_*`.
//!
//! For stems `F`, `G` the scalar parts factor out of
//! `epsilon(F) epsilon(G)`, and the vector parts give
//!
//! ```text
//! epsilon(F_v) epsilon(G_v) = C + W,
//! C = cA cB - sA sB <F_v, G_v>,
//! W = cA sB G_v + cB sA F_v + sA sB F_v x G_v,
//! ```
//!
//! with `(cA, sA) = even_trig(n(F))` and `(cB, sB) = even_trig(n(G))`.
//! Since `C^2 + n(W) = 1`, the product is an exponential `epsilon(H_v)` as
//! soon as an angle `theta` with `cos theta = C` and `sin theta != 0` can be
//! chosen continuously; then `H_v = theta W / sin theta`.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::continuation::{Continuation, Continued};
use crate::cquat::{cq_mul, epsilon, even_trig, vcross, vdot, CQuaternion, TAU_CLS};
use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::scalar::{creal, Real};
use crate::slice::{ell, induce, slice_point, stem_derivative, Domain, SliceFunction};
use crate::lift::BranchIndex;
use crate::starlog::LogBranchSpec;

/// Smallest admissible `|condition|`.
pub const TAU_BCH: f64 = 1e-8;
/// `|n(F)|` below which the derivative is labelled degenerate.
pub const TAU_DEG: f64 = 1e-6;
/// Number of domain samples scanned by [`bch_condition`].
pub const BCH_SAMPLES: usize = 64;

const LATTICE_TOL: f64 = 1e-8;
const SERIES_RADIUS: f64 = 1.0;
const SERIES_TERMS: usize = 30;

/// `(F0 g1 + G0)^2 n(F) + (F0^2 + n(F)) n(G_perp)` for stem values, where
/// `G_v = g1 F_v + G_perp` with `<F_v, G_perp> = 0`.
pub fn prodvec_sym_values<T: Real>(fz: CQuaternion<T>, gz: CQuaternion<T>) -> Result<Complex<T>> {
    let n = fz.vnorm();
    if n.norm() <= T::lit(TAU_CLS) {
        return Err(Error::VanishingVectorPart);
    }
    let (fv, gv) = (fz.vector(), gz.vector());
    let g1 = vdot(gv, fv) / n;
    let perp = [gv[0] - fv[0] * g1, gv[1] - fv[1] * g1, gv[2] - fv[2] * g1];
    let a = fz.z0 * g1 + gz.z0;
    Ok(a * a * n + fz.snorm() * vdot(perp, perp))
}

/// [`prodvec_sym_values`] at the stem parameter of `q`.
pub fn prodvec_sym<T: Real>(f: &SliceFunction<T>, g: &SliceFunction<T>, q: Quaternion<T>) -> Result<Complex<T>> {
    let (z, _) = slice_point(q);
    prodvec_sym_values(f.stem(z)?, g.stem(z)?)
}

/// `g = -f^c + l_+ * j` for a `C_i`-preserving `f` on a domain off the
/// real axis; then `(f * g)_v^s` vanishes identically.
pub fn construct_vanishing_counterexample<T: Real>(f: &SliceFunction<T>) -> Result<SliceFunction<T>> {
    let domain = *f.domain();
    if domain.meets_real_axis() {
        return Err(Error::BadExampleInput("domain meets the real axis".into()));
    }
    let tiny = T::lit(TAU_CLS);
    for z in domain.sample_points(32) {
        let fz = f.stem(z)?;
        if fz.z2.norm() > tiny || fz.z3.norm() > tiny {
            return Err(Error::BadExampleInput("f is not C_i-preserving".into()));
        }
        if fz.z1.norm() <= tiny {
            return Err(Error::BadExampleInput("f_1 vanishes".into()));
        }
        if fz.snorm().norm() <= tiny {
            return Err(Error::BadExampleInput("f^s vanishes".into()));
        }
    }
    let lj = ell(domain, true)?.star_mul(&SliceFunction::constant(Quaternion::j(), domain))?;
    f.conj_c().neg().add(&lj)
}

/// Which situation [`bch_condition`] found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BchRegime {
    /// `F_v x G_v = 0` at every sample.
    Commuting,
    Generic,
}

/// Condition value at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct ConditionSample<T> {
    pub z: Complex<T>,
    pub value: Complex<T>,
}

/// Sampled condition for `exp_*(f) * exp_*(g)` to be a `*`-exponential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct BchReport<T> {
    pub samples: Vec<ConditionSample<T>>,
    pub min_abs: T,
    pub admissible: bool,
    pub regime: BchRegime,
}

fn near_lattice<T: Real>(n: Complex<T>) -> bool {
    // n = h^2 pi^2 for some integer h >= 0
    let h = n.sqrt().re / T::PI();
    let k = h.round();
    let target = creal(k * k * T::PI() * T::PI());
    (n - target).norm() <= T::lit(LATTICE_TOL) * (T::one() + target.re)
}

/// The pieces `C`, `W` of `epsilon(F_v) epsilon(G_v)` and the branch-free
/// condition value
/// `([P cA sB + cB n(F) sA]^2 + sB^2 (n(G) n(F) - P^2)) / n(F)`, which
/// equals `n(W)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductParts<T> {
    pub c: Complex<T>,
    pub w: [Complex<T>; 3],
    pub condition: Complex<T>,
}

pub fn product_parts<T: Real>(fz: CQuaternion<T>, gz: CQuaternion<T>) -> Result<ProductParts<T>> {
    let (nf, ng) = (fz.vnorm(), gz.vnorm());
    if near_lattice(nf) || near_lattice(ng) {
        return Err(Error::LatticeValue);
    }
    let (fv, gv) = (fz.vector(), gz.vector());
    let p = vdot(fv, gv);
    let a = even_trig(nf);
    let b = even_trig(ng);
    let (ca, sa, cb, sb) = (a.cosr, a.sincr, b.cosr, b.sincr);
    let x = vcross(fv, gv);
    let w = [
        ca * sb * gv[0] + cb * sa * fv[0] + sa * sb * x[0],
        ca * sb * gv[1] + cb * sa * fv[1] + sa * sb * x[1],
        ca * sb * gv[2] + cb * sa * fv[2] + sa * sb * x[2],
    ];
    let c = ca * cb - sa * sb * p;
    let lead = p * ca * sb + cb * nf * sa;
    let condition = (lead * lead + sb * sb * (ng * nf - p * p)) / nf;
    Ok(ProductParts { c, w, condition })
}

fn commutes<T: Real>(fz: CQuaternion<T>, gz: CQuaternion<T>) -> bool {
    let x = vcross(fz.vector(), gz.vector());
    let s = (x[0].norm_sqr() + x[1].norm_sqr() + x[2].norm_sqr()).sqrt();
    s <= T::lit(1e-10) * (fz.norm_sqr_v() * gz.norm_sqr_v()).sqrt().max(T::min_positive_value())
}

/// Samples the condition at `n` domain points.
pub fn bch_condition_at<T: Real>(f: &SliceFunction<T>, g: &SliceFunction<T>, n: usize) -> Result<BchReport<T>> {
    let domain = f.domain().join(g.domain())?;
    let mut samples = Vec::with_capacity(n);
    let mut min_abs = T::infinity();
    let mut all_commute = true;
    for z in domain.sample_points(n) {
        let (fz, gz) = (f.stem(z)?, g.stem(z)?);
        let parts = product_parts(fz, gz)?;
        min_abs = min_abs.min(parts.condition.norm());
        all_commute &= commutes(fz, gz);
        samples.push(ConditionSample { z, value: parts.condition });
    }
    Ok(BchReport {
        samples,
        min_abs,
        admissible: min_abs >= T::lit(TAU_BCH),
        regime: if all_commute { BchRegime::Commuting } else { BchRegime::Generic },
    })
}

/// [`bch_condition_at`] with [`BCH_SAMPLES`] points.
pub fn bch_condition<T: Real>(f: &SliceFunction<T>, g: &SliceFunction<T>) -> Result<BchReport<T>> {
    bch_condition_at(f, g, BCH_SAMPLES)
}

#[derive(Clone)]
pub(crate) struct AngleState<T> {
    theta2: Complex<T>,
    value: CQuaternion<T>,
}

struct AngleEngine<T: Real> {
    f: SliceFunction<T>,
    g: SliceFunction<T>,
}

impl<T: Real> AngleEngine<T> {
    fn parts(&self, z: Complex<T>) -> Result<(CQuaternion<T>, CQuaternion<T>, ProductParts<T>)> {
        let (fz, gz) = (self.f.stem(z)?, self.g.stem(z)?);
        let parts = product_parts(fz, gz)?;
        Ok((fz, gz, parts))
    }

    fn assemble(&self, fz: CQuaternion<T>, gz: CQuaternion<T>, parts: &ProductParts<T>, theta2: Complex<T>) -> Result<AngleState<T>> {
        let s = even_trig(theta2).sincr;
        if s.norm() <= T::lit(TAU_BCH) {
            return Err(Error::DegenerateAngle);
        }
        let k = s.inv();
        let w = parts.w;
        let value = CQuaternion::new(fz.z0 + gz.z0, w[0] * k, w[1] * k, w[2] * k);
        Ok(AngleState { theta2, value })
    }
}

impl<T: Real> Continuation<T> for AngleEngine<T> {
    type State = AngleState<T>;

    fn seed(&self, z: Complex<T>) -> Result<AngleState<T>> {
        let (fz, gz, parts) = self.parts(z)?;
        let a = parts.c.acos();
        self.assemble(fz, gz, &parts, a * a)
    }

    fn advance(&self, from: &AngleState<T>, z: Complex<T>) -> Result<Option<AngleState<T>>> {
        let (fz, gz, parts) = self.parts(z)?;
        let a = parts.c.acos();
        let two_pi = T::PI() + T::PI();
        let centre = (from.theta2.sqrt().norm() / two_pi).round().as_f64() as i64;
        // (±a + 2πk)^2 runs over the same set as (a + 2πk)^2
        let mut dists: Vec<(T, Complex<T>)> = ((centre - 3)..=(centre + 3))
            .map(|k| {
                let th = a + creal(two_pi * T::lit(k as f64));
                let cand = th * th;
                ((cand - from.theta2).norm(), cand)
            })
            .collect();
        dists.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(core::cmp::Ordering::Equal));
        let (d, cand) = dists[0];
        let second = dists[1].0;
        if !(second > T::lit(3.0) * d) {
            if even_trig(cand).sincr.norm() <= T::lit(TAU_BCH) {
                return Err(Error::DegenerateAngle);
            }
            return Ok(None);
        }
        self.assemble(fz, gz, &parts, cand).map(Some)
    }

    fn value(&self, s: &AngleState<T>) -> CQuaternion<T> {
        s.value
    }
}

/// `h` with `exp_*(f) * exp_*(g) = exp_*(h)`, `h0 = f0 + g0`.
///
/// The angle is seeded with the principal `acos` at the basepoint of
/// `LogBranchSpec::new(domain, 0)` and continued over the domain.
pub fn bch_combine<T: Real>(f: &SliceFunction<T>, g: &SliceFunction<T>) -> Result<SliceFunction<T>> {
    let domain = f.domain().join(g.domain())?;
    let report = bch_condition(f, g)?;
    if !report.admissible {
        return Err(Error::NotExponential(report.min_abs.as_f64()));
    }
    let base = LogBranchSpec::new(&domain, BranchIndex::ZERO).effective_basepoint(&domain);
    let engine = AngleEngine { f: f.with_domain(domain), g: g.with_domain(domain) };
    let cont = Arc::new(Continued::new(engine, domain, base)?);
    Ok(SliceFunction::from_stem(domain, move |z| cont.eval(z)))
}

/// Residuals of the two product equations for stem values: `|cos√n(H_v) - C|`
/// and `|sincr(n(H_v)) H_v - W|`.
pub fn bch_residuals<T: Real>(fz: CQuaternion<T>, gz: CQuaternion<T>, hz: CQuaternion<T>) -> Result<(T, T)> {
    let parts = product_parts(fz, gz)?;
    let t = even_trig(hz.vnorm());
    let hv = hz.vector();
    let dc = (t.cosr - parts.c).norm();
    let dw = (0..3).map(|i| (t.sincr * hv[i] - parts.w[i]).norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
    Ok((dc, dw))
}

/// Which formula produced a derivative value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DexpRegime {
    /// `|n(F)| < TAU_DEG`: the value at `n = 0` up to `O(n)`.
    Degenerate,
    /// Power series in `n(F)`.
    Series,
    /// Closed form through `even_trig(4 n(F))`.
    Closed,
}

/// `c1(n) = (1 - sin(2√n)/(2√n)) / n` and `c2(n) = (1 - cos(2√n)) / (2n)`,
/// with `(c1, c2)(0) = (2/3, 1)`.
pub fn dexp_coefficients<T: Real>(n: Complex<T>) -> (Complex<T>, Complex<T>, DexpRegime) {
    let regime = if n.norm() < T::lit(TAU_DEG) {
        DexpRegime::Degenerate
    } else if n.norm() < T::lit(SERIES_RADIUS) {
        DexpRegime::Series
    } else {
        DexpRegime::Closed
    };
    if regime == DexpRegime::Closed {
        let t = even_trig(n * T::lit(4.0));
        let one = creal(T::one());
        return ((one - t.sincr) / n, (one - t.cosr) / (n * T::lit(2.0)), regime);
    }
    // c1 = Σ_{h>=1} (-1)^{h-1} 4^h n^{h-1} / (2h+1)!
    // c2 = Σ_{h>=1} (-1)^{h-1} 2^{2h-1} n^{h-1} / (2h)!
    let mut c1 = creal(T::zero());
    let mut c2 = creal(T::zero());
    let mut t1 = creal(T::lit(4.0) / T::lit(6.0));
    let mut t2 = creal(T::one());
    for h in 1..=SERIES_TERMS {
        c1 = c1 + t1;
        c2 = c2 + t2;
        let hh = T::from_count(h);
        let two = T::lit(2.0);
        let m = -n * T::lit(4.0);
        t1 = t1 * m / ((two * hh + two) * (two * hh + T::lit(3.0)));
        t2 = t2 * m / ((two * hh + T::one()) * (two * hh + two));
    }
    (c1, c2, regime)
}

/// `F' + c1 (<F_v, F'_v> F_v - n F'_v) - c2 F_v x F'_v`, which equals
/// `epsilon(F)^{-1} d epsilon(F)`.
pub fn dexp_bracket<T: Real>(fz: CQuaternion<T>, dfz: CQuaternion<T>) -> (CQuaternion<T>, DexpRegime) {
    let n = fz.vnorm();
    let (c1, c2, regime) = dexp_coefficients(n);
    let (fv, dv) = (fz.vector(), dfz.vector());
    let p = vdot(fv, dv);
    let x = vcross(fv, dv);
    let v = [0, 1, 2].map(|i| dv[i] + c1 * (p * fv[i] - n * dv[i]) - c2 * x[i]);
    (CQuaternion::new(dfz.z0, v[0], v[1], v[2]), regime)
}

/// Stem of `∂_c exp_*(f)` from `F` and `F'`.
pub fn dexp_stem<T: Real>(fz: CQuaternion<T>, dfz: CQuaternion<T>) -> (CQuaternion<T>, DexpRegime) {
    let (b, regime) = dexp_bracket(fz, dfz);
    (cq_mul(epsilon(fz), b), regime)
}

/// Partial sum `Σ_{m=1}^{terms} (-1)^{m-1} / m! ad_X^{m-1}(dX)`, with
/// `ad_X(Y) = XY - YX`.
pub fn commutator_ladder<T: Real>(x: CQuaternion<T>, dx: CQuaternion<T>, terms: usize) -> CQuaternion<T> {
    let mut acc = CQuaternion::zero();
    let mut ad = dx;
    let mut coeff = T::one();
    for m in 1..=terms {
        acc = acc + ad.scale_re(coeff);
        ad = cq_mul(x, ad) - cq_mul(ad, x);
        coeff = -coeff / T::from_count(m + 1);
    }
    acc
}

/// `∂_c f` at `z`, exact for polynomials and by quadrature otherwise.
pub fn stem_slice_derivative<T: Real>(f: &SliceFunction<T>, z: Complex<T>) -> Result<CQuaternion<T>> {
    match f.poly_coeffs() {
        Some(cs) => {
            if !f.domain().contains(z) {
                return Err(Error::OutOfDomain { re: z.re.as_f64(), im: z.im.as_f64() });
            }
            let mut acc = CQuaternion::zero();
            for (k, a) in cs.iter().enumerate().skip(1).rev() {
                acc = acc.scale(z) + CQuaternion::from(*a * T::from_count(k));
            }
            Ok(acc)
        }
        None => stem_derivative(f, z),
    }
}

/// `∂_c exp_*(f)(q)` by the closed formula.
pub fn exp_slice_derivative<T: Real>(f: &SliceFunction<T>, q: Quaternion<T>) -> Result<(Quaternion<T>, DexpRegime)> {
    let (z, unit) = slice_point(q);
    let fz = f.stem(z)?;
    let dfz = stem_slice_derivative(f, z)?;
    let (v, regime) = dexp_stem(fz, dfz);
    Ok((induce(v, unit), regime))
}

/// Domain used when a function is needed only on a neighbourhood of `z`.
pub fn local_disk<T: Real>(z: Complex<T>, r: T) -> Result<Domain<T>> {
    if z.im.abs() > r {
        Domain::disk_pair(z, r)
    } else {
        Domain::disk(z.re, z.im.abs() + r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::quat_mul;
    use crate::slice::{orth_decompose, slice_derivative};
    use crate::starlog::star_exp;

    type Q = Quaternion<f64>;
    type C = Complex<f64>;
    type Z = CQuaternion<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn zq(a: [f64; 8]) -> Z {
        Z::new(c(a[0], a[1]), c(a[2], a[3]), c(a[4], a[5]), c(a[6], a[7]))
    }

    #[test]
    fn prodvec_identity() {
        let f = zq([0.3, -0.2, 1.1, 0.4, -0.5, 0.9, 0.2, -1.3]);
        let g = zq([-0.7, 0.5, 0.1, -0.8, 1.4, 0.3, -0.6, 0.2]);
        let direct = cq_mul(f, g).vnorm();
        assert!((prodvec_sym_values(f, g).unwrap() - direct).norm() < 1e-13);
        let same = prodvec_sym_values(f, f).unwrap();
        assert!((same - f.z0 * f.z0 * 4.0 * f.vnorm()).norm() < 1e-13);
        // g_v parallel to f_v with g0 = -f0 g1
        let g1 = c(0.7, -0.1);
        let gp = Z::new(-f.z0 * g1, f.z1 * g1, f.z2 * g1, f.z3 * g1);
        assert!(prodvec_sym_values(f, gp).unwrap().norm() < 1e-14);
        assert_eq!(prodvec_sym_values(Z::one(), g), Err(Error::VanishingVectorPart));
    }

    #[test]
    fn prodvec_through_decomposition() {
        let d = Domain::disk(0.0, 1.0).unwrap();
        let f = SliceFunction::polynomial(vec![Q::new(0.5, 1.0, 0.2, -0.3), Q::new(0.1, 0.3, -0.4, 0.2)], d);
        let g = SliceFunction::polynomial(vec![Q::new(-0.2, 0.4, 0.5, 0.1), Q::new(0.3, -0.1, 0.2, 0.6)], d);
        let (g1, gp) = orth_decompose(&f, &g).unwrap();
        let z = c(0.2, 0.3);
        let (fz, g1z, gpz) = (f.stem(z).unwrap(), g1.stem(z).unwrap().z0, gp.stem(z).unwrap());
        let expect = (fz.z0 * g1z + gpz.z0).powi(2) * fz.vnorm() + fz.snorm() * gpz.vnorm();
        let got = prodvec_sym(&f, &g, Q::new(0.2, 0.3, 0.0, 0.0)).unwrap();
        assert!((got - expect).norm() < 1e-13);
        // strictly positive on the real axis
        for x in [-0.8, -0.2, 0.0, 0.5] {
            let v = prodvec_sym(&f, &g, Q::real(x)).unwrap();
            assert!(v.re > 0.0 && v.im.abs() < 1e-15);
        }
    }

    #[test]
    fn counterexample_vanishes() {
        let d = Domain::disk_pair(c(0.0, 2.0), 1.0).unwrap();
        for f in [
            SliceFunction::constant(Q::new(1.0, 2.0, 0.0, 0.0), d),
            SliceFunction::polynomial(vec![Q::zero(), Q::i()], d),
        ] {
            let g = construct_vanishing_counterexample(&f).unwrap();
            let fg = f.star_mul(&g).unwrap();
            for z in d.sample_points(50) {
                let v = fg.stem(z).unwrap();
                assert!(v.vnorm().norm() < 1e-12);
                assert!(g.stem(z).unwrap().snorm().norm() > 1e-3);
                assert!(matches!(crate::cquat::classify(v), crate::cquat::Locus::InVinf));
            }
        }
        let id = SliceFunction::identity(d);
        assert!(matches!(construct_vanishing_counterexample(&id), Err(Error::BadExampleInput(_))));
        let on_r = SliceFunction::constant(Q::new(1.0, 2.0, 0.0, 0.0), Domain::disk(0.0, 1.0).unwrap());
        assert!(matches!(construct_vanishing_counterexample(&on_r), Err(Error::BadExampleInput(_))));
    }

    #[test]
    fn condition_equals_vector_symmetrization() {
        let f = zq([0.3, -0.2, 1.1, 0.4, -0.5, 0.9, 0.2, -1.3]);
        let g = zq([-0.7, 0.5, 0.1, -0.8, 1.4, 0.3, -0.6, 0.2]);
        let parts = product_parts(f, g).unwrap();
        let prod = cq_mul(epsilon(f.vector_part()), epsilon(g.vector_part()));
        assert!((prod.z0 - parts.c).norm() < 1e-12);
        assert!((prod.vnorm() - parts.condition).norm() < 1e-11);
        assert!((parts.c * parts.c + parts.condition - c(1.0, 0.0)).norm() < 1e-11);
        let lattice = Z::new(c(0.0, 0.0), c(std::f64::consts::PI, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(product_parts(lattice, g), Err(Error::LatticeValue));
    }

    #[test]
    fn condition_is_positive_on_the_real_axis() {
        let d = Domain::disk(0.0, 1.0).unwrap();
        let f = SliceFunction::polynomial(vec![Q::new(0.2, 0.9, -0.3, 0.4), Q::new(0.1, 0.0, 0.5, -0.2)], d);
        let g = SliceFunction::polynomial(vec![Q::new(-0.4, 0.1, 0.8, 0.3), Q::new(0.0, -0.6, 0.1, 0.2)], d);
        for k in 0..21 {
            let x = -0.9 + 0.09 * k as f64;
            let parts = product_parts(f.stem(c(x, 0.0)).unwrap(), g.stem(c(x, 0.0)).unwrap()).unwrap();
            assert!(parts.condition.im.abs() < 1e-15 && parts.condition.re > 0.0, "x = {x}");
        }
    }

    #[test]
    fn small_constants_are_admissible() {
        let d = Domain::disk(0.0, 1.0).unwrap();
        let f = SliceFunction::constant(Q::new(0.1, 0.3, -0.2, 0.1), d);
        let g = SliceFunction::constant(Q::new(-0.4, 0.1, 0.4, 0.2), d);
        let r = bch_condition(&f, &g).unwrap();
        assert!(r.admissible);
        assert_eq!(r.regime, BchRegime::Generic);
        let r = bch_condition(&f, &f).unwrap();
        assert_eq!(r.regime, BchRegime::Commuting);
    }

    fn series_exp(q: Q) -> Q {
        let mut acc = Q::zero();
        let mut term = Q::one();
        for n in 1..60 {
            acc = acc + term;
            term = quat_mul(term, q) * (1.0 / n as f64);
        }
        acc
    }

    #[test]
    fn constant_product_matches_series() {
        let d = Domain::disk(0.0, 1.0).unwrap();
        let (p, q) = (Q::new(0.2, 0.5, -0.3, 0.1), Q::new(-0.1, 0.2, 0.6, -0.4));
        let f = SliceFunction::constant(p, d);
        let g = SliceFunction::constant(q, d);
        let h = bch_combine(&f, &g).unwrap();
        let x = Q::new(0.1, 0.2, 0.3, -0.1);
        let hq = h.eval(x).unwrap();
        let expect = quat_mul(series_exp(p), series_exp(q));
        assert!(series_exp(hq).distance(expect) < 1e-13);
        let h2 = bch_combine(&f, &f).unwrap();
        assert!(h2.eval(x).unwrap().distance(p * 2.0) < 1e-13);
    }

    #[test]
    fn polynomial_product() {
        let d = Domain::disk_pair(c(0.2, 1.5), 0.8).unwrap();
        let f = SliceFunction::polynomial(vec![Q::new(0.1, 0.4, -0.2, 0.3), Q::new(0.0, 0.2, 0.1, -0.1)], d);
        let g = SliceFunction::polynomial(vec![Q::new(-0.2, 0.1, 0.5, -0.2), Q::new(0.1, -0.1, 0.0, 0.2)], d);
        let h = bch_combine(&f, &g).unwrap();
        let lhs = star_exp(&f).star_mul(&star_exp(&g)).unwrap();
        let rhs = star_exp(&h);
        for z in d.sample_points(32) {
            assert!(lhs.stem(z).unwrap().distance(rhs.stem(z).unwrap()) < 1e-12);
            let (dc, dw) = bch_residuals(f.stem(z).unwrap(), g.stem(z).unwrap(), h.stem(z).unwrap()).unwrap();
            assert!(dc < 1e-12 && dw < 1e-12);
        }
        assert!(h.stem_symmetry_defect(&d.sample_points(16)).unwrap() < 1e-13);
    }

    #[test]
    fn coefficient_forms_agree() {
        for n in [c(0.999, 0.0), c(1.001, 0.0), c(0.0, 0.999), c(-0.7, 0.7)] {
            let (a1, a2, _) = dexp_coefficients(n);
            let t = even_trig(n * 4.0);
            let b1 = (c(1.0, 0.0) - t.sincr) / n;
            let b2 = (c(1.0, 0.0) - t.cosr) / (n * 2.0);
            assert!((a1 - b1).norm() < 1e-13 && (a2 - b2).norm() < 1e-13, "n = {n}");
        }
        let (c1, c2, r) = dexp_coefficients(c(0.0, 0.0));
        assert_eq!(r, DexpRegime::Degenerate);
        assert!((c1 - c(2.0 / 3.0, 0.0)).norm() < 1e-16 && (c2 - c(1.0, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn bracket_matches_ladder() {
        let x = zq([0.3, -0.2, 1.1, 0.4, -0.5, 0.9, 0.2, -1.3]).scale_re(0.6);
        let dx = zq([-0.7, 0.5, 0.1, -0.8, 1.4, 0.3, -0.6, 0.2]);
        let (b, _) = dexp_bracket(x, dx);
        let l = commutator_ladder(x, dx, 80);
        assert!(b.distance(l) < 1e-11, "{}", b.distance(l));
    }

    #[test]
    fn derivative_of_exponential() {
        let f = SliceFunction::polynomial(
            vec![Q::new(0.2, 0.3, -0.1, 0.4), Q::new(0.1, -0.5, 0.2, 0.3), Q::new(-0.3, 0.1, 0.4, 0.0), Q::new(0.1, 0.2, -0.1, 0.2)],
            Domain::Entire,
        );
        let e = star_exp(&f);
        for q in [Q::new(0.3, 0.2, -0.4, 0.1), Q::real(-0.5), Q::new(0.0, 0.0, 0.0, 0.8)] {
            let (v, _) = exp_slice_derivative(&f, q).unwrap();
            let quad = slice_derivative(&e, q).unwrap();
            assert!(v.distance(quad) < 1e-10, "q = {q:?}: {}", v.distance(quad));
        }
    }

    #[test]
    fn slice_preserving_reduction() {
        let f = SliceFunction::polynomial(vec![Q::real(0.3), Q::real(-1.0), Q::real(0.5)], Domain::Entire);
        let q = Q::new(0.4, 0.3, 0.2, -0.5);
        let (v, _) = exp_slice_derivative(&f, q).unwrap();
        let df = SliceFunction::polynomial(vec![Q::real(-1.0), Q::real(1.0)], Domain::Entire);
        let expect = quat_mul(star_exp(&f).eval(q).unwrap(), df.eval(q).unwrap());
        assert!(v.distance(expect) < 1e-14);
    }

    #[test]
    fn degenerate_point_is_continuous() {
        // f_v = (z, z^2, 0) has n(F) = z^2 + z^4, zero at the origin
        let f = SliceFunction::polynomial(vec![Q::real(0.1), Q::new(0.0, 1.0, 0.0, 0.0), Q::new(0.0, 0.0, 1.0, 0.0)], Domain::Entire);
        let (_, r0) = exp_slice_derivative(&f, Q::real(0.0)).unwrap();
        assert_eq!(r0, DexpRegime::Degenerate);
        // x0 with n(F(x0)) = TAU_DEG
        let x0 = ((-1.0 + (1.0 + 4.0 * TAU_DEG).sqrt()) / 2.0).sqrt();
        let (a, ra) = exp_slice_derivative(&f, Q::real(x0 * (1.0 - 1e-10))).unwrap();
        let (b, rb) = exp_slice_derivative(&f, Q::real(x0 * (1.0 + 1e-10))).unwrap();
        assert_eq!((ra, rb), (DexpRegime::Degenerate, DexpRegime::Series));
        assert!(a.distance(b) < 1e-9);
        let z = local_disk(c(0.0, 0.0), 0.5).unwrap();
        assert!(z.contains(c(0.3, 0.0)));
    }
}
