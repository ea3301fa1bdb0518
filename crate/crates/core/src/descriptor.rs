//! JSON descriptors for slice functions.
//!
//! ```json
//! {"kind": "mul", "args": [
//!     {"kind": "poly", "coeffs": [[0, 0, 0, 0], [1, 0, 0, 0]]},
//!     {"kind": "exp", "arg": {"kind": "const", "value": [0, 0, 1, 0]}}
//!  ],
//!  "domain": {"center": [0.5, 2.0], "radius": 1.0, "realIntersecting": false}}
//! ```
//!
//! Polynomial coefficients are right coefficients, `f(q) = Σ q^n a_n`.
//! Without a `domain` the function is entire.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::scalar::Real;
use crate::slice::{Domain, SliceFunction};
use crate::starlog::star_exp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FnNode {
    Poly { coeffs: Vec<[f64; 4]> },
    Exp { arg: Box<FnNode> },
    Mul { args: Vec<FnNode> },
    Add { args: Vec<FnNode> },
    Const { value: [f64; 4] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub center: [f64; 2],
    pub radius: f64,
    #[serde(rename = "realIntersecting")]
    pub real_intersecting: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnDescriptor {
    #[serde(flatten)]
    pub node: FnNode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
}

fn quat<T: Real>(a: [f64; 4]) -> Quaternion<T> {
    Quaternion::new(T::lit(a[0]), T::lit(a[1]), T::lit(a[2]), T::lit(a[3]))
}

impl DomainSpec {
    pub fn build<T: Real>(&self) -> Result<Domain<T>> {
        let [re, im] = self.center;
        if self.real_intersecting {
            if im != 0.0 {
                return Err(Error::InvalidDomain("a disk meeting the real axis must be centred on it".into()));
            }
            Domain::disk(T::lit(re), T::lit(self.radius))
        } else {
            Domain::disk_pair(num_complex::Complex::new(T::lit(re), T::lit(im)), T::lit(self.radius))
        }
    }
}

impl FnNode {
    pub fn build<T: Real>(&self, domain: Domain<T>) -> Result<SliceFunction<T>> {
        Ok(match self {
            Self::Poly { coeffs } => SliceFunction::polynomial(coeffs.iter().map(|c| quat(*c)).collect(), domain),
            Self::Const { value } => SliceFunction::constant(quat(*value), domain),
            Self::Exp { arg } => star_exp(&arg.build(domain)?),
            Self::Mul { args } => {
                let mut acc = SliceFunction::constant(Quaternion::one(), domain);
                for a in args {
                    acc = acc.star_mul(&a.build(domain)?)?;
                }
                acc
            }
            Self::Add { args } => {
                let mut acc = SliceFunction::constant(Quaternion::zero(), domain);
                for a in args {
                    acc = acc.add(&a.build(domain)?)?;
                }
                acc
            }
        })
    }
}

impl FnDescriptor {
    pub fn domain<T: Real>(&self) -> Result<Domain<T>> {
        self.domain.map_or(Ok(Domain::Entire), |d| d.build())
    }

    pub fn build<T: Real>(&self) -> Result<SliceFunction<T>> {
        self.node.build(self.domain()?)
    }
}
