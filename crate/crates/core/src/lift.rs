//! The lift space `C^2 x S` and the covering `e`.
//!
//! A point `((u0, u1), s)` has `s` a vector element of `C ⊗ H` with
//! `n(s) = 1`, so `s^2 = -1`. The map `rho(u0, u1, s) = u0 + u1 s` is a
//! double cover of `{n(z) != 0}` away from `u1 = 0`, and
//! `e(u0, u1, s) = ((e^{u0} cos u1, e^{u0} sin u1), s)` covers
//! `(C^2 \ W) x S` with `W = {w0^2 + w1^2 = 0}`. They intertwine the
//! exponentials: `epsilon ∘ rho = rho ∘ e`.
//!
//! Lifting through `e` is done in the coordinates `alpha = w0 + 𝑖 w1`,
//! `beta = w0 - 𝑖 w1`, where `e` becomes two copies of the scalar
//! exponential: `alpha = e^{u0 + 𝑖 u1}` and `beta = e^{u0 - 𝑖 u1}`.

use core::f64::consts::FRAC_PI_2;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::cquat::{vdot, CQuaternion, TAU_CLS};
use crate::error::{Error, Result};
use crate::scalar::{ci, creal, Real};

/// Tolerance on `n(s) = 1` for points of `S`.
pub const TAU_UNIT: f64 = 1e-8;
/// Agreement required between `e(start)` and the first path sample.
pub const TAU_START: f64 = 1e-9;
/// Distance to the nearest integer tolerated before rounding a monodromy.
pub const TAU_INTEGRAL: f64 = 1e-6;
/// Maximal bisection depth per path segment.
pub const MAX_DEPTH: u32 = 20;

type V3<T> = [Complex<T>; 3];

fn vscale<T: Real>(v: V3<T>, c: Complex<T>) -> V3<T> {
    [v[0] * c, v[1] * c, v[2] * c]
}

fn vdist<T: Real>(a: V3<T>, b: V3<T>) -> T {
    ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr() + (a[2] - b[2]).norm_sqr()).sqrt()
}

/// Point `((u0, u1), s)` of `C^2 x S`.
///
/// The same type is used for points of the target `(C^2 \ W) x S`, where the
/// two complex slots hold `(w0, w1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct LiftPoint<T> {
    pub u0: Complex<T>,
    pub u1: Complex<T>,
    pub s: [Complex<T>; 3],
}

impl<T: Real> LiftPoint<T> {
    /// Checks `n(s) = 1` to [`TAU_UNIT`].
    pub fn new(u0: Complex<T>, u1: Complex<T>, s: [Complex<T>; 3]) -> Result<Self> {
        let n = vdot(s, s);
        let dev = (n - creal(T::one())).norm();
        if dev > T::lit(TAU_UNIT) {
            return Err(Error::NotUnit(n.norm().as_f64()));
        }
        Ok(Self { u0, u1, s })
    }

    /// `s` as an element of `C ⊗ H`.
    pub fn s_quat(&self) -> CQuaternion<T> {
        CQuaternion::from_vector(self.s)
    }

    /// Euclidean distance in `C^2 x C^3`.
    pub fn distance(&self, other: &Self) -> T {
        let d = (self.u0 - other.u0).norm_sqr() + (self.u1 - other.u1).norm_sqr();
        (d + vdist(self.s, other.s).powi(2)).sqrt()
    }

    /// `(u0, u1)` moved by `(du0, du1)`.
    pub fn shifted(&self, du0: Complex<T>, du1: Complex<T>) -> Self {
        Self { u0: self.u0 + du0, u1: self.u1 + du1, s: self.s }
    }
}

/// Monodromy index `(h1, h2)`; acts by
/// `(u0 + (h1 + h2) 𝑖 pi, u1 + (h1 - h2) pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BranchIndex {
    pub h1: i64,
    pub h2: i64,
}

impl BranchIndex {
    pub const ZERO: Self = Self { h1: 0, h2: 0 };

    pub const fn new(h1: i64, h2: i64) -> Self {
        Self { h1, h2 }
    }

    /// `h1 + h2`, the multiple of `𝑖 pi` added to `u0`.
    pub const fn a(self) -> i64 {
        self.h1 + self.h2
    }

    /// `h1 - h2`, the multiple of `pi` added to `u1`.
    pub const fn b(self) -> i64 {
        self.h1 - self.h2
    }

    pub const fn add(self, o: Self) -> Self {
        Self::new(self.h1 + o.h1, self.h2 + o.h2)
    }

    pub const fn sub(self, o: Self) -> Self {
        Self::new(self.h1 - o.h1, self.h2 - o.h2)
    }

    pub const fn neg(self) -> Self {
        Self::new(-self.h1, -self.h2)
    }

    /// Exchanges `h1` and `h2` (conjugation by `Gamma`).
    pub const fn swap(self) -> Self {
        Self::new(self.h2, self.h1)
    }
}

/// One sample `((w0, w1), s)` of a target path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct PathSample<T> {
    pub t: T,
    pub w0: Complex<T>,
    pub w1: Complex<T>,
    pub s: [Complex<T>; 3],
}

impl<T: Real> PathSample<T> {
    pub fn point(&self) -> LiftPoint<T> {
        LiftPoint { u0: self.w0, u1: self.w1, s: self.s }
    }

    pub fn from_point(t: T, p: LiftPoint<T>) -> Self {
        Self { t, w0: p.u0, w1: p.u1, s: p.s }
    }
}

/// Polyline in `(C^2 \ W) x S`, JSON `{"samples": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct SampledPath<T> {
    pub samples: Vec<PathSample<T>>,
}

impl<T: Real> SampledPath<T> {
    /// Samples `f` at `n + 1` equally spaced times in `[0, 1]`.
    pub fn from_fn(n: usize, mut f: impl FnMut(T) -> (Complex<T>, Complex<T>, [Complex<T>; 3])) -> Self {
        let samples = (0..=n)
            .map(|k| {
                let t = T::from_count(k) / T::from_count(n.max(1));
                let (w0, w1, s) = f(t);
                PathSample { t, w0, w1, s }
            })
            .collect();
        Self { samples }
    }

    /// `self` followed by `other`, times rescaled to `[0, 1]`.
    pub fn concat(&self, other: &Self) -> Self {
        let half = T::lit(0.5);
        let mut samples: Vec<_> = self
            .samples
            .iter()
            .map(|p| PathSample { t: p.t * half, ..*p })
            .collect();
        samples.extend(other.samples.iter().skip(1).map(|p| PathSample { t: half + p.t * half, ..*p }));
        Self { samples }
    }

    /// Same samples in reverse order.
    pub fn reversed(&self) -> Self {
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|p| PathSample { t: T::one() - p.t, ..*p })
            .collect();
        Self { samples }
    }
}

/// `rho(u0, u1, s) = u0 + u1 s`.
pub fn rho<T: Real>(p: &LiftPoint<T>) -> CQuaternion<T> {
    CQuaternion::new(p.u0, p.s[0] * p.u1, p.s[1] * p.u1, p.s[2] * p.u1)
}

/// The two points over `z`: `((z0, ±√n(z)), ±z_v/√n(z))`, principal root
/// first.
pub fn rho_fibers<T: Real>(z: CQuaternion<T>) -> Result<[LiftPoint<T>; 2]> {
    let n = z.vnorm();
    if n.norm() <= T::lit(TAU_CLS) {
        return Err(Error::OnVinf);
    }
    let r = n.sqrt();
    let s = vscale(z.vector(), r.inv());
    let plus = LiftPoint { u0: z.z0, u1: r, s };
    Ok([plus, gamma(&plus)])
}

/// `e(u0, u1, s) = ((e^{u0} cos u1, e^{u0} sin u1), s)`.
pub fn frak_e<T: Real>(p: &LiftPoint<T>) -> LiftPoint<T> {
    let e = p.u0.exp();
    LiftPoint { u0: e * p.u1.cos(), u1: e * p.u1.sin(), s: p.s }
}

/// Solves `e(u) = ((w0, w1), s)` with principal logarithms, then applies the
/// monodromy `h`.
pub fn frak_e_preimage<T: Real>(
    w0: Complex<T>,
    w1: Complex<T>,
    s: [Complex<T>; 3],
    h: BranchIndex,
) -> Result<LiftPoint<T>> {
    let alpha = w0 + ci::<T>() * w1;
    let beta = w0 - ci::<T>() * w1;
    if (alpha * beta).norm() <= T::lit(TAU_CLS) {
        return Err(Error::OnW);
    }
    Ok(from_log_pair(alpha.ln(), beta.ln(), s).act(h))
}

/// `(u0, u1)` from lifted logarithms of `alpha` and `beta`.
pub(crate) fn from_log_pair<T: Real>(la: Complex<T>, lb: Complex<T>, s: [Complex<T>; 3]) -> LiftPoint<T> {
    let two = T::lit(2.0);
    LiftPoint { u0: (la + lb) / two, u1: (la - lb) / (ci::<T>() * two), s }
}

/// `Gamma(u0, u1, s) = (u0, -u1, -s)`.
pub fn gamma<T: Real>(p: &LiftPoint<T>) -> LiftPoint<T> {
    LiftPoint { u0: p.u0, u1: -p.u1, s: [-p.s[0], -p.s[1], -p.s[2]] }
}

/// Raw translation `(u0 + a 𝑖 pi, u1 + b pi)`, without any parity check.
pub fn translate<T: Real>(p: &LiftPoint<T>, a: i64, b: i64) -> LiftPoint<T> {
    let pi = T::PI();
    p.shifted(ci::<T>() * (pi * T::lit(a as f64)), creal(pi * T::lit(b as f64)))
}

impl<T: Real> LiftPoint<T> {
    /// Monodromy action of `h`.
    pub fn act(&self, h: BranchIndex) -> Self {
        translate(self, h.a(), h.b())
    }
}

/// Deck transformations of `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Deck {
    /// `a T_1 + b T_-1`, where `T_l` adds `(𝑖 pi, l pi)`. Always a deck map.
    Generator { a: i64, b: i64 },
    /// Raw translation by `(a 𝑖 pi, b pi)`; a deck map iff `a ≡ b (mod 2)`.
    Translation { a: i64, b: i64 },
    Gamma,
    /// Applied right to left, like function composition.
    Compose(Vec<Deck>),
}

/// Applies `d`. Raw translations with `a`, `b` of different parity are
/// rejected with [`Error::NotDeck`].
pub fn apply_deck<T: Real>(p: &LiftPoint<T>, d: &Deck) -> Result<LiftPoint<T>> {
    match d {
        Deck::Generator { a, b } => Ok(translate(p, a + b, a - b)),
        Deck::Translation { a, b } => {
            if (a - b).rem_euclid(2) != 0 {
                return Err(Error::NotDeck { a: *a, b: *b });
            }
            Ok(translate(p, *a, *b))
        }
        Deck::Gamma => Ok(gamma(p)),
        Deck::Compose(ds) => ds.iter().rev().try_fold(*p, |q, d| apply_deck(&q, d)),
    }
}

/// `S_0`: adds `2 𝑖 pi` to the scalar slot.
pub fn s0<T: Real>(z: CQuaternion<T>) -> CQuaternion<T> {
    CQuaternion::new(z.z0 + ci::<T>() * (T::PI() + T::PI()), z.z1, z.z2, z.z3)
}

/// Linear interpolation of `s` renormalized to `n(s) = 1`; the root is the
/// one closer to the interpolant.
pub fn interpolate_s<T: Real>(a: [Complex<T>; 3], b: [Complex<T>; 3], lambda: T) -> Result<[Complex<T>; 3]> {
    let mu = T::one() - lambda;
    let v = [a[0] * mu + b[0] * lambda, a[1] * mu + b[1] * lambda, a[2] * mu + b[2] * lambda];
    let n = vdot(v, v);
    if n.norm() <= T::lit(TAU_CLS) {
        return Err(Error::OnVinf);
    }
    let cand = vscale(v, n.sqrt().inv());
    let neg = vscale(cand, creal(-T::one()));
    Ok(if vdist(cand, v) <= vdist(neg, v) { cand } else { neg })
}

#[derive(Clone, Copy)]
struct Tracker<T> {
    w0: Complex<T>,
    w1: Complex<T>,
    s: [Complex<T>; 3],
    alpha: Complex<T>,
    beta: Complex<T>,
    la: Complex<T>,
    lb: Complex<T>,
}

fn on_w<T: Real>(alpha: Complex<T>, beta: Complex<T>) -> bool {
    (alpha * beta).norm() <= T::lit(TAU_CLS)
}

fn advance<T: Real>(from: Tracker<T>, to: &PathSample<T>, depth: u32) -> Result<Tracker<T>> {
    let alpha = to.w0 + ci::<T>() * to.w1;
    let beta = to.w0 - ci::<T>() * to.w1;
    if on_w(alpha, beta) {
        return Err(Error::OnW);
    }
    let da = (alpha / from.alpha).ln();
    let db = (beta / from.beta).ln();
    let bound = T::lit(FRAC_PI_2);
    if da.norm() < bound && db.norm() < bound {
        return Ok(Tracker {
            w0: to.w0,
            w1: to.w1,
            s: to.s,
            alpha,
            beta,
            la: from.la + da,
            lb: from.lb + db,
        });
    }
    if depth >= MAX_DEPTH {
        return Err(Error::PathTooWild);
    }
    let half = T::lit(0.5);
    let mid = PathSample {
        t: T::zero(),
        w0: (from.w0 + to.w0) * half,
        w1: (from.w1 + to.w1) * half,
        s: interpolate_s(from.s, to.s, half)?,
    };
    let m = advance(from, &mid, depth + 1)?;
    advance(m, to, depth + 1)
}

/// Lifts `path` through `e` starting at `start`.
///
/// Returns one lifted point per input sample; intermediate refinement points
/// are not reported.
pub fn lift_path<T: Real>(path: &SampledPath<T>, start: &LiftPoint<T>) -> Result<Vec<LiftPoint<T>>> {
    let first = path.samples.first().ok_or(Error::BadStart)?;
    let img = frak_e(start);
    let scale = T::one() + first.w0.norm() + first.w1.norm();
    if img.distance(&first.point()) > T::lit(TAU_START) * scale {
        return Err(Error::BadStart);
    }
    let alpha = first.w0 + ci::<T>() * first.w1;
    let beta = first.w0 - ci::<T>() * first.w1;
    if on_w(alpha, beta) {
        return Err(Error::OnW);
    }
    let mut tr = Tracker {
        w0: first.w0,
        w1: first.w1,
        s: first.s,
        alpha,
        beta,
        la: start.u0 + ci::<T>() * start.u1,
        lb: start.u0 - ci::<T>() * start.u1,
    };
    let mut out = Vec::with_capacity(path.samples.len());
    out.push(*start);
    for sample in &path.samples[1..] {
        tr = advance(tr, sample, 0)?;
        out.push(from_log_pair(tr.la, tr.lb, sample.s));
    }
    Ok(out)
}

/// Monodromy of a loop together with the distance to the integer lattice
/// before rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopMonodromy {
    pub index: BranchIndex,
    pub drift: f64,
}

/// Lifts `path` from `start` and reads off `(h1, h2)` from the endpoint.
pub fn loop_monodromy<T: Real>(path: &SampledPath<T>, start: &LiftPoint<T>) -> Result<LoopMonodromy> {
    let (Some(first), Some(last)) = (path.samples.first(), path.samples.last()) else {
        return Err(Error::NotALoop(f64::INFINITY));
    };
    let gap = first.point().distance(&last.point()).as_f64();
    if gap > TAU_START {
        return Err(Error::NotALoop(gap));
    }
    let lifted = lift_path(path, start)?;
    let end = lifted[lifted.len() - 1];
    let pi = T::PI();
    let a = (end.u0 - start.u0) / (ci::<T>() * pi);
    let b = (end.u1 - start.u1) / pi;
    let ar = a.re.round();
    let br = b.re.round();
    let drift = ((a - creal(ar)).norm().max((b - creal(br)).norm())).as_f64();
    if drift > TAU_INTEGRAL {
        return Err(Error::NotALoop(drift));
    }
    let (ai, bi) = (ar.as_f64() as i64, br.as_f64() as i64);
    if (ai - bi).rem_euclid(2) != 0 {
        return Err(Error::NotALoop(drift));
    }
    Ok(LoopMonodromy { index: BranchIndex::new((ai + bi) / 2, (ai - bi) / 2), drift })
}

/// Deck generator of the degree `n^2` cover `e = s_n ∘ e_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootGenerator<T> {
    /// Class `[(a, b)]` in `Z^2 / nZ^2`.
    pub class: (i64, i64),
    pub xi: Complex<T>,
    pub eta: Complex<T>,
}

impl<T: Real> RootGenerator<T> {
    /// `xi · A_eta · w`, with `A_eta` the rotation by `arg eta`.
    pub fn act(&self, w: &LiftPoint<T>) -> LiftPoint<T> {
        let (c, s) = (self.eta.re, self.eta.im);
        let r0 = w.u0 * c - w.u1 * s;
        let r1 = w.u0 * s + w.u1 * c;
        LiftPoint { u0: self.xi * r0, u1: self.xi * r1, s: w.s }
    }
}

/// Generators `xi = e^{(a+b) 𝑖 pi / n}`, `eta = e^{(a-b) 𝑖 pi / n}` for the
/// classes `(1, 1)`, `(1, -1)` and, for even `n`, `(1, 0)`.
pub fn root_monodromy_generators<T: Real>(n: u32) -> Result<Vec<RootGenerator<T>>> {
    if n < 2 {
        return Err(Error::BadOrder);
    }
    let mut classes = vec![(1, 1), (1, -1)];
    if n % 2 == 0 {
        classes.push((1, 0));
    }
    let nn = T::lit(n as f64);
    Ok(classes
        .into_iter()
        .map(|(a, b): (i64, i64)| {
            let xi = (ci::<T>() * (T::PI() * T::lit((a + b) as f64) / nn)).exp();
            let eta = (ci::<T>() * (T::PI() * T::lit((a - b) as f64) / nn)).exp();
            RootGenerator { class: (a, b), xi, eta }
        })
        .collect())
}

/// `e_n(u) = e(u / n)`.
pub fn frak_e_n<T: Real>(p: &LiftPoint<T>, n: u32) -> LiftPoint<T> {
    let nn = T::lit(n as f64);
    frak_e(&LiftPoint { u0: p.u0 / nn, u1: p.u1 / nn, s: p.s })
}
