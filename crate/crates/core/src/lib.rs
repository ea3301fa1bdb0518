//! Quaternionic slice-regular calculus.
//!
//! The crate evaluates slice functions through their stems in the
//! complexified quaternions `C ⊗ H`, and builds on that:
//!
//! * [`quat`]: the real quaternions, their exponential and its strata.
//! * [`cquat`]: `C ⊗ H`, the loci `V_-1` and `V_inf`, the exponential
//!   `epsilon` and the power map.
//! * [`lift`]: the covering `e` of `(C^2 \ W) x S`, its deck group, path
//!   lifting and loop monodromy.
//! * [`slice`]: slice functions, the `*`-product, Cauchy-quadrature
//!   derivatives and the decomposition along the vector part.
//! * [`starlog`]: `exp_*`, the `(h1, h2)` family of `*`-logarithms and
//!   `*`-roots.
//! * [`bch`]: when `exp_*(f) * exp_*(g)` is an exponential, and the slice
//!   derivative of `exp_*(f)`.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix `f64`, which is what the documented tolerances assume.
//!
//! ```
//! use starlog::{BranchIndex, Domain, LogBranchSpec, Quat, Slice};
//! use num_complex::Complex;
//!
//! let d = Domain::disk_pair(Complex::new(0.0, 2.0), 1.0).unwrap();
//! let f = Slice::polynomial(vec![Quat::new(1.0, 0.2, 0.0, 0.3), Quat::new(0.0, 0.5, 0.1, 0.0)], d);
//! let g = starlog::star_log(&f, &LogBranchSpec::new(&d, BranchIndex::new(1, -1))).unwrap();
//! let q = Quat::new(0.2, 0.0, 2.1, 0.3);
//! let back = starlog::star_exp(&g).eval(q).unwrap();
//! assert!(back.distance(f.eval(q).unwrap()) < 1e-9);
//! ```

pub mod bch;
pub(crate) mod continuation;
pub mod cquat;
pub mod descriptor;
pub mod error;
pub mod lift;
pub mod quat;
pub mod scalar;
pub mod slice;
pub mod starlog;

pub use bch::{
    bch_combine, bch_condition, commutator_ladder, construct_vanishing_counterexample, dexp_stem,
    exp_slice_derivative, prodvec_sym, BchRegime, BchReport, DexpRegime,
};
pub use cquat::{classify, cq_mul, epsilon, even_trig, nu, sigma_n, CQuaternion, EvenTrigPair, Locus};
pub use descriptor::{DomainSpec, FnDescriptor, FnNode};
pub use error::{Error, Result};
pub use lift::{
    apply_deck, frak_e, frak_e_preimage, lift_path, loop_monodromy, rho, rho_fibers, root_monodromy_generators,
    BranchIndex, Deck, LiftPoint, PathSample, SampledPath,
};
pub use quat::{quat_exp, quat_mul, ImagUnit, Quaternion};
pub use scalar::Real;
pub use slice::{
    orth_decompose, representation_formula, slice_derivative, slice_eval, spherical_derivative, star_decompose,
    star_mul, Domain, SliceFunction,
};
pub use starlog::{log_translate, sqrt_fvs, star_exp, star_log, star_pow, star_root, LogBranchSpec};

pub type Quat = Quaternion<f64>;
pub type Quat32 = Quaternion<f32>;
pub type CQuat = CQuaternion<f64>;
pub type CQuat32 = CQuaternion<f32>;
pub type Unit = ImagUnit<f64>;
pub type Slice = SliceFunction<f64>;
pub type Slice32 = SliceFunction<f32>;
pub type Lift = LiftPoint<f64>;
pub type Path = SampledPath<f64>;
pub type Dom = Domain<f64>;
