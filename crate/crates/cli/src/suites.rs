//! Seeded verification suites behind `starlog verify`.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use clap::ValueEnum;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use starlog::bch::{bch_combine, construct_vanishing_counterexample, prodvec_sym_values};
use starlog::cquat::{cq_mul, epsilon, sigma_n, vdot};
use starlog::lift::{apply_deck, frak_e, frak_e_preimage, loop_monodromy, rho, translate, Deck};
use starlog::slice::slice_derivative;
use starlog::starlog::{axis_sign, log_translate, star_exp, star_log, LogBranchSpec};
use starlog::{exp_slice_derivative, quat_mul, BranchIndex, CQuat, Dom, Lift, Path, Quat, Slice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Bch,
    Covering,
    Derivative,
    Log,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Self::Algebra => "algebra",
            Self::Bch => "bch",
            Self::Covering => "covering",
            Self::Derivative => "derivative",
            Self::Log => "log",
            Self::All => "all",
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Self::All => vec![Self::Algebra, Self::Bch, Self::Covering, Self::Derivative, Self::Log],
            s => vec![s],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub suite: Suite,
}

#[derive(Debug, Clone, Serialize)]
pub struct Property {
    pub name: String,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub properties: Vec<Property>,
    pub all_pass: bool,
}

const DEFAULTS: &[(&str, f64)] = &[
    ("algebra.cnorm_identity", 1e-11),
    ("algebra.matrix_product", 1e-11),
    ("algebra.norm_multiplicative", 1e-11),
    ("algebra.star_associative", 1e-11),
    ("bch.combine", 1e-8),
    ("bch.counterexample", 1e-10),
    ("bch.prodvec", 1e-10),
    ("covering.deck_parity", 1e-12),
    ("covering.intertwine", 1e-12),
    ("covering.monodromy_drift", 1e-6),
    ("covering.periodicity", 1e-12),
    ("covering.powers", 1e-10),
    ("derivative.closed_vs_quadrature", 1e-8),
    ("derivative.commuting", 1e-12),
    ("log.branch_translation", 1e-8),
    ("log.real_axis", 1e-10),
    ("log.round_trip", 1e-8),
];

struct Collector<'a> {
    tol: &'a BTreeMap<String, f64>,
    suite: &'static str,
    out: Vec<Property>,
}

impl Collector<'_> {
    fn push(&mut self, name: &str, residuals: &[f64], note: Option<String>) {
        let key = format!("{}.{name}", self.suite);
        let tolerance = self
            .tol
            .get(&key)
            .copied()
            .or_else(|| DEFAULTS.iter().find(|(k, _)| *k == key).map(|(_, v)| *v))
            .expect("every property has a default tolerance");
        let max = residuals.iter().copied().fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
        let mean = residuals.iter().sum::<f64>() / residuals.len().max(1) as f64;
        let ok = note.is_none() && max < tolerance && !residuals.is_empty();
        self.out.push(Property {
            name: key,
            max_residual: max,
            mean_residual: (residuals.len() > 1).then_some(mean),
            tolerance,
            pass: ok,
            note,
        });
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.samples == 0 {
        bail!("samples must be at least 1");
    }
    for (k, v) in &cfg.tolerances {
        if !DEFAULTS.iter().any(|(d, _)| d == k) {
            bail!("unknown tolerance `{k}`");
        }
        if !(*v > 0.0) {
            bail!("tolerance `{k}` must be positive");
        }
    }
    let mut properties = Vec::new();
    for (i, s) in cfg.suite.members().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9e37_79b9).wrapping_add(i as u64));
        let mut col = Collector { tol: &cfg.tolerances, suite: s.name(), out: Vec::new() };
        let n = cfg.samples;
        match s {
            Suite::Algebra => algebra(&mut col, &mut rng, n),
            Suite::Bch => bch(&mut col, &mut rng, n),
            Suite::Covering => covering(&mut col, &mut rng, n),
            Suite::Derivative => derivative(&mut col, &mut rng, n),
            Suite::Log => log(&mut col, &mut rng, n),
            Suite::All => unreachable!(),
        }
        properties.extend(col.out);
    }
    let all_pass = properties.iter().all(|p| p.pass);
    Ok(SuiteReport { suite: cfg.suite, seed: cfg.seed, samples: cfg.samples, properties, all_pass })
}

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn rq(r: &mut ChaCha8Rng, s: f64) -> Quat {
    Quat::new(r.gen_range(-s..s), r.gen_range(-s..s), r.gen_range(-s..s), r.gen_range(-s..s))
}

fn rc(r: &mut ChaCha8Rng, s: f64) -> Complex<f64> {
    c(r.gen_range(-s..s), r.gen_range(-s..s))
}

fn rz(r: &mut ChaCha8Rng, s: f64) -> CQuat {
    CQuat::new(rc(r, s), rc(r, s), rc(r, s), rc(r, s))
}

fn unit_s(r: &mut ChaCha8Rng) -> [Complex<f64>; 3] {
    loop {
        let v = [rc(r, 1.0), rc(r, 1.0), rc(r, 1.0)];
        let n = vdot(v, v);
        if n.norm() > 0.2 {
            let k = n.sqrt().inv();
            return v.map(|x| x * k);
        }
    }
}

fn vec_quat(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> Quat {
    loop {
        let v = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.2 {
            return Quat::from_vector(v).scale(r.gen_range(lo..hi) / n);
        }
    }
}

fn rel(d: f64, scale: f64) -> f64 {
    d / scale.max(1.0)
}

fn poly(r: &mut ChaCha8Rng, deg: usize, scale: f64, d: Dom) -> Slice {
    Slice::polynomial((0..=deg).map(|_| rq(r, scale)).collect(), d)
}

fn algebra(col: &mut Collector, r: &mut ChaCha8Rng, n: usize) {
    let (mut mat, mut norm, mut cn, mut assoc) = (vec![], vec![], vec![], vec![]);
    for _ in 0..n {
        let (p, q) = (rq(r, 3.0), rq(r, 3.0));
        let s = p.norm() * q.norm();
        let (a, b, cc, d) = (p.q0, p.q1, p.q2, p.q3);
        let m = [[a, -b, -cc, -d], [b, a, -d, cc], [cc, d, a, -b], [d, -cc, b, a]];
        let v = [q.q0, q.q1, q.q2, q.q3];
        let o: Vec<f64> = m.iter().map(|row| row.iter().zip(&v).map(|(x, y)| x * y).sum()).collect();
        mat.push(quat_mul(p, q).distance(Quat::new(o[0], o[1], o[2], o[3])) / s);
        norm.push((quat_mul(p, q).norm() - s).abs() / s);
        let (z, w) = (rz(r, 2.0), rz(r, 2.0));
        let zw = cq_mul(z, w);
        let lhs = cq_mul(zw, zw.conj_c());
        let rhs = cq_mul(cq_mul(z, z.conj_c()), cq_mul(w, w.conj_c()));
        cn.push(lhs.distance(rhs) / (z.norm() * w.norm()).powi(2));
        let (f, g, h) = (poly(r, 2, 1.0, Dom::Entire), poly(r, 2, 1.0, Dom::Entire), poly(r, 2, 1.0, Dom::Entire));
        let z = rc(r, 1.5);
        let x = f.star_mul(&g).and_then(|fg| fg.star_mul(&h)).and_then(|v| v.stem(z));
        let y = g.star_mul(&h).and_then(|gh| f.star_mul(&gh)).and_then(|v| v.stem(z));
        assoc.push(match (x, y) {
            (Ok(x), Ok(y)) => rel(x.distance(y), y.norm()),
            _ => f64::INFINITY,
        });
    }
    col.push("cnorm_identity", &cn, None);
    col.push("matrix_product", &mat, None);
    col.push("norm_multiplicative", &norm, None);
    col.push("star_associative", &assoc, None);
}

fn covering(col: &mut Collector, r: &mut ChaCha8Rng, n: usize) {
    let (mut inter, mut per, mut even, mut pow) = (vec![], vec![], vec![], vec![]);
    let mut odd_min = f64::INFINITY;
    for _ in 0..n {
        let p = Lift::new(rc(r, 1.5), rc(r, 1.5), unit_s(r)).expect("unit s");
        let rhs = rho(&frak_e(&p));
        inter.push(rel(epsilon(rho(&p)).distance(rhs), rhs.norm()));
        let z = rz(r, 1.5);
        per.push(rel(epsilon(starlog::lift::s0(z)).distance(epsilon(z)), epsilon(z).norm()));
        let (a, b) = (r.gen_range(-3..=3i64), r.gen_range(-3..=3i64));
        let e = frak_e(&p);
        let d = frak_e(&translate(&p, a, b)).distance(&e) / e.u0.norm().max(e.u1.norm()).max(1.0);
        if (a - b).rem_euclid(2) == 0 {
            even.push(d);
            let g = apply_deck(&p, &Deck::Generator { a, b }).expect("generator");
            even.push(frak_e(&g).distance(&e) / e.u0.norm().max(e.u1.norm()).max(1.0));
        } else {
            odd_min = odd_min.min(d);
        }
        let small = rz(r, 0.6);
        for k in 0..=6u32 {
            let want = epsilon(small.scale_re(k as f64));
            pow.push(rel(sigma_n(epsilon(small), k).distance(want), want.norm()));
        }
    }
    let s = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let start = frak_e_preimage(c(1.0, 0.0), c(0.0, 0.0), s, BranchIndex::ZERO).expect("preimage");
    let circle = Path::from_fn(400, |t: f64| {
        let th = 2.0 * core::f64::consts::PI * t;
        (c(th.cos(), 0.0), c(th.sin(), 0.0), s)
    });
    let scalar = Path::from_fn(400, |t: f64| (c(0.0, 2.0 * core::f64::consts::PI * t).exp(), c(0.0, 0.0), s));
    let mut drift = vec![];
    let mut note = None;
    for (path, want) in [(&circle, BranchIndex::new(1, -1)), (&scalar, BranchIndex::new(1, 1))] {
        match loop_monodromy(path, &start) {
            Ok(m) if m.index == want => drift.push(m.drift),
            Ok(m) => note = Some(format!("expected {want:?}, got {:?}", m.index)),
            Err(e) => note = Some(e.to_string()),
        }
    }
    let parity_note = (odd_min < 1e-2).then(|| format!("odd-parity translation moved only {odd_min:.2e}"));
    col.push("deck_parity", &even, parity_note);
    col.push("intertwine", &inter, None);
    col.push("monodromy_drift", &drift, note);
    col.push("periodicity", &per, None);
    col.push("powers", &pow, None);
}

/// Polynomial whose vector part stays away from `f_v^s = 0` on `d`.
fn safe_poly(r: &mut ChaCha8Rng, d: Dom) -> Slice {
    loop {
        let coeffs = vec![Quat::real(r.gen_range(-1.0..1.0)) + vec_quat(r, 0.8, 1.6), rq(r, 0.12), rq(r, 0.06)];
        let f = Slice::polynomial(coeffs, d);
        if d.sample_points(200).iter().all(|&z| f.stem(z).map(|v| v.vnorm().norm() > 0.1).unwrap_or(false)) {
            return f;
        }
    }
}

fn log(col: &mut Collector, r: &mut ChaCha8Rng, n: usize) {
    let pair = Dom::disk_pair(c(0.3, 2.0), 1.0).expect("domain");
    let pts = pair.sample_points(n);
    let (mut round, mut trans, mut real) = (vec![], vec![], vec![]);
    let mut note = None;
    for _ in 0..3 {
        let f = safe_poly(r, pair);
        let spec0 = LogBranchSpec::new(&pair, BranchIndex::ZERO);
        let bp = spec0.effective_basepoint(&pair);
        let mut run = || -> starlog::Result<()> {
            let g0 = star_log(&f, &spec0)?;
            let sign = axis_sign(&f, &g0, bp)?;
            for h in [BranchIndex::ZERO, BranchIndex::new(1, 0), BranchIndex::new(-1, 2)] {
                let g = star_log(&f, &LogBranchSpec::new(&pair, h))?;
                let back = star_exp(&g);
                let t = log_translate(&g0, h, bp, sign)?;
                for &z in &pts {
                    let fz = f.stem(z)?;
                    round.push(rel(back.stem(z)?.distance(fz), fz.norm()));
                    trans.push(rel(g.stem(z)?.distance(t.stem(z)?), 1.0));
                }
            }
            Ok(())
        };
        if let Err(e) = run() {
            note = Some(e.to_string());
        }
    }
    let disk = Dom::disk(0.0, 1.0).expect("domain");
    let f = safe_poly(r, disk);
    match star_log(&f, &LogBranchSpec::new(&disk, BranchIndex::new(1, -1))) {
        Ok(g) => {
            for k in 0..n {
                let x = -0.95 + 1.9 * k as f64 / n.max(2).saturating_sub(1) as f64;
                real.push(g.stem(c(x, 0.0)).map(|v| v.im().norm()).unwrap_or(f64::INFINITY));
            }
        }
        Err(e) => note = Some(e.to_string()),
    }
    col.push("branch_translation", &trans, None);
    col.push("real_axis", &real, None);
    col.push("round_trip", &round, note);
}

fn bch(col: &mut Collector, r: &mut ChaCha8Rng, n: usize) {
    let mut prod = vec![];
    for _ in 0..n {
        let (f, g) = (poly(r, 2, 1.0, Dom::Entire), poly(r, 2, 1.0, Dom::Entire));
        let z = rc(r, 1.5);
        let (Ok(fz), Ok(gz)) = (f.stem(z), g.stem(z)) else { continue };
        if fz.vnorm().norm() < 1e-3 {
            continue;
        }
        let direct = cq_mul(fz, gz).vnorm();
        if let Ok(v) = prodvec_sym_values(fz, gz) {
            prod.push(rel((v - direct).norm(), direct.norm()));
        }
    }
    let pair = Dom::disk_pair(c(0.0, 2.0), 1.0).expect("domain");
    let f = Slice::polynomial(vec![Quat::new(1.0, 2.0, 0.0, 0.0), Quat::new(0.5, -1.0, 0.0, 0.0)], pair);
    let mut counter = vec![];
    let mut counter_note = None;
    match construct_vanishing_counterexample(&f).and_then(|g| f.star_mul(&g)) {
        Ok(fg) => {
            for z in pair.sample_points(n) {
                counter.push(fg.stem(z).map(|v| v.vnorm().norm()).unwrap_or(f64::INFINITY));
            }
        }
        Err(e) => counter_note = Some(e.to_string()),
    }
    let domain = Dom::disk_pair(c(0.4, 1.8), 0.7).expect("domain");
    let pts = domain.sample_points(n.min(32));
    let mut comb = vec![];
    for _ in 0..5 {
        let f = Slice::polynomial(vec![rq(r, 1.0), rq(r, 0.3)], domain);
        let g = Slice::polynomial(vec![rq(r, 1.0), rq(r, 0.3)], domain);
        let Ok(h) = bch_combine(&f, &g) else { continue };
        let Ok(lhs) = star_exp(&f).star_mul(&star_exp(&g)) else { continue };
        for &z in &pts {
            comb.push(match (h.stem(z), lhs.stem(z)) {
                (Ok(hz), Ok(w)) => rel(epsilon(hz).distance(w), w.norm()),
                _ => f64::INFINITY,
            });
        }
    }
    col.push("combine", &comb, None);
    col.push("counterexample", &counter, counter_note);
    col.push("prodvec", &prod, None);
}

fn derivative(col: &mut Collector, r: &mut ChaCha8Rng, n: usize) {
    let mut closed = vec![];
    let mut note = None;
    for i in 0..n.min(16) {
        let f = if i % 2 == 0 {
            let x0 = r.gen_range(-1.0..1.0);
            let v = vec_quat(r, 0.5, 1.5);
            Slice::polynomial(vec![Quat::real(r.gen_range(-1.0..1.0)) - v.scale(x0), v], Dom::Entire)
        } else {
            poly(r, 3, 0.8, Dom::Entire)
        };
        let ef = star_exp(&f);
        for _ in 0..4 {
            let q = rq(r, 1.2);
            match (exp_slice_derivative(&f, q), slice_derivative(&ef, q)) {
                (Ok((a, _)), Ok(b)) => closed.push(rel(a.distance(b), b.norm())),
                (Err(e), _) | (_, Err(e)) => note = Some(e.to_string()),
            }
        }
    }
    let mut comm = vec![];
    for _ in 0..n.min(16) {
        let u = vec_quat(r, 1.0, 1.0 + f64::EPSILON);
        let coeffs: Vec<Quat> = (0..4).map(|_| Quat::real(r.gen_range(-1.0..1.0)) + u.scale(r.gen_range(-1.0..1.0))).collect();
        let f = Slice::polynomial(coeffs.clone(), Dom::Entire);
        let df = Slice::polynomial(coeffs.iter().enumerate().skip(1).map(|(k, a)| a.scale(k as f64)).collect(), Dom::Entire);
        let q = rq(r, 1.2);
        let want = star_exp(&f).star_mul(&df).and_then(|p| p.eval(q));
        comm.push(match (exp_slice_derivative(&f, q), want) {
            (Ok((a, _)), Ok(b)) => rel(a.distance(b), b.norm()),
            _ => f64::INFINITY,
        });
    }
    col.push("closed_vs_quadrature", &closed, note);
    col.push("commuting", &comm, None);
}
