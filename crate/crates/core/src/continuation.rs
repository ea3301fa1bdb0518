//! Analytic continuation over a basic domain.
//!
//! A [`Continuation`] knows how to seed a branch at a point and how to carry
//! it over a short step. [`Continued`] evaluates the branch anywhere on the
//! closed upper part of the domain by walking from the basepoint to the
//! nearest node of a cached grid and from there to the query point, and
//! defines the lower part by reflection, `G(conj z) = bar G(z)`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex;

use crate::cquat::CQuaternion;
use crate::error::{Error, Result};
use crate::lift::MAX_DEPTH;
use crate::scalar::Real;
use crate::slice::Domain;

/// Nodes per side of the cache grid.
pub const GRID: usize = 64;

pub(crate) trait Continuation<T: Real>: Send + Sync + 'static {
    type State: Clone + Send + Sync + 'static;

    fn seed(&self, z: Complex<T>) -> Result<Self::State>;

    /// `Ok(None)` asks for a shorter step.
    fn advance(&self, from: &Self::State, z: Complex<T>) -> Result<Option<Self::State>>;

    fn value(&self, s: &Self::State) -> CQuaternion<T>;
}

pub(crate) struct Continued<T: Real, E: Continuation<T>> {
    pub engine: E,
    domain: Domain<T>,
    base: Complex<T>,
    base_state: E::State,
    lo: Complex<T>,
    step: Complex<T>,
    max_seg: T,
    cache: Mutex<HashMap<(usize, usize), E::State>>,
}

impl<T: Real, E: Continuation<T>> Continued<T, E> {
    /// `base` must lie in the closed upper part of a bounded domain.
    pub fn new(engine: E, domain: Domain<T>, base: Complex<T>) -> Result<Self> {
        let radius = domain.radius().ok_or(Error::UnboundedDomain)?;
        if !domain.contains(base) || base.im < T::zero() {
            return Err(Error::OutOfDomain { re: base.re.as_f64(), im: base.im.as_f64() });
        }
        let c = domain.upper_center();
        let (lo, hi) = match domain {
            Domain::DiskPair { .. } => (c - Complex::new(radius, radius), c + Complex::new(radius, radius)),
            _ => (Complex::new(c.re - radius, T::zero()), Complex::new(c.re + radius, radius)),
        };
        let n = T::from_count(GRID);
        let step = Complex::new((hi.re - lo.re) / n, (hi.im - lo.im) / n);
        let base_state = engine.seed(base)?;
        Ok(Self {
            engine,
            domain,
            base,
            base_state,
            lo,
            step,
            max_seg: radius / T::lit(32.0),
            cache: Mutex::new(HashMap::new()),
        })
    }

    fn node(&self, i: usize, j: usize) -> Complex<T> {
        let h = T::lit(0.5);
        Complex::new(
            self.lo.re + (T::from_count(i) + h) * self.step.re,
            self.lo.im + (T::from_count(j) + h) * self.step.im,
        )
    }

    fn node_ok(&self, z: Complex<T>) -> bool {
        z.im >= T::zero() && self.domain.contains(z)
    }

    /// Nearest admissible grid node, searched ring by ring.
    fn nearest_node(&self, z: Complex<T>) -> Option<(usize, usize)> {
        let fi = ((z.re - self.lo.re) / self.step.re).floor().as_f64();
        let fj = ((z.im - self.lo.im) / self.step.im).floor().as_f64();
        let clamp = |x: f64| x.max(0.0).min((GRID - 1) as f64) as i64;
        let (ci, cj) = (clamp(fi), clamp(fj));
        for ring in 0..GRID as i64 {
            let mut best: Option<((usize, usize), T)> = None;
            for di in -ring..=ring {
                for dj in -ring..=ring {
                    if di.abs() != ring && dj.abs() != ring {
                        continue;
                    }
                    let (i, j) = (ci + di, cj + dj);
                    if i < 0 || j < 0 || i >= GRID as i64 || j >= GRID as i64 {
                        continue;
                    }
                    let (i, j) = (i as usize, j as usize);
                    let p = self.node(i, j);
                    if !self.node_ok(p) {
                        continue;
                    }
                    let d = (p - z).norm();
                    if best.map_or(true, |(_, bd)| d < bd) {
                        best = Some(((i, j), d));
                    }
                }
            }
            if let Some((ij, _)) = best {
                return Some(ij);
            }
        }
        None
    }

    fn bisect(&self, s: &E::State, from: Complex<T>, to: Complex<T>, depth: u32) -> Result<E::State> {
        if let Some(next) = self.engine.advance(s, to)? {
            return Ok(next);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::PathTooWild);
        }
        let mid = (from + to) * T::lit(0.5);
        let m = self.bisect(s, from, mid, depth + 1)?;
        self.bisect(&m, mid, to, depth + 1)
    }

    /// Continues `s` along the segment `[from, to]`.
    pub fn walk(&self, s: &E::State, from: Complex<T>, to: Complex<T>) -> Result<E::State> {
        let len = (to - from).norm();
        let pieces = (len / self.max_seg).ceil().as_f64().max(1.0) as usize;
        let mut state = s.clone();
        let mut prev = from;
        for k in 1..=pieces {
            let next = from + (to - from) * (T::from_count(k) / T::from_count(pieces));
            state = self.bisect(&state, prev, next, 0)?;
            prev = next;
        }
        Ok(state)
    }

    fn node_state(&self, ij: (usize, usize)) -> Result<E::State> {
        if let Some(s) = self.cache.lock().expect("cache lock").get(&ij) {
            return Ok(s.clone());
        }
        let s = self.walk(&self.base_state, self.base, self.node(ij.0, ij.1))?;
        self.cache.lock().expect("cache lock").insert(ij, s.clone());
        Ok(s)
    }

    /// Branch state at `z` in the closed upper part.
    pub fn state_upper(&self, z: Complex<T>) -> Result<E::State> {
        if !self.domain.contains(z) {
            return Err(Error::OutOfDomain { re: z.re.as_f64(), im: z.im.as_f64() });
        }
        match self.nearest_node(z) {
            Some(ij) => {
                let p = self.node(ij.0, ij.1);
                let s = self.node_state(ij)?;
                self.walk(&s, p, z)
            }
            None => self.walk(&self.base_state, self.base, z),
        }
    }

    pub fn eval(&self, z: Complex<T>) -> Result<CQuaternion<T>> {
        if z.im < T::zero() {
            let s = self.state_upper(z.conj())?;
            return Ok(self.engine.value(&s).bar());
        }
        let s = self.state_upper(z)?;
        Ok(self.engine.value(&s))
    }
}

/// The root of `w` closest to `prev`, and whether the step was small
/// (`|arg(r / prev)| <= pi / 4`).
pub(crate) fn follow_sqrt<T: Real>(w: Complex<T>, prev: Complex<T>) -> (Complex<T>, bool) {
    let r = w.sqrt();
    let r = if (r / prev).re >= T::zero() { r } else { -r };
    let ok = (r / prev).arg().abs() <= T::FRAC_PI_4();
    (r, ok)
}
