//! Propagation processes of marked Poisson heterogeneous cellular networks.
//!
//! A typical user at the origin observes every base station `X_i` through its
//! propagation loss `Y_i = A_i |X_i|^{β_i} / (P_i S_i)`. When the stations form a
//! superposition of homogeneous Poisson tiers with i.i.d. marks, the points
//! `{(Y_i, T_i)}` form an independently marked Poisson process on the half-line
//! whose intensity measure depends on the propagation effects only through the
//! moments `E[S̃^{2/β}]`. This crate evaluates that intensity exactly, builds
//! isotropic single-tier networks that induce the same process, and provides
//! the Monte Carlo and goodness-of-fit machinery to check the equivalence
//! empirically.
//!
//! The crate is `no_std` (with `alloc`). File formats, parallel replication
//! and the command line live in the `hetnet` companion crate.
//!
//! | module | contents |
//! |---|---|
//! | [`model`] | distributions, tiers, networks, realized samples |
//! | [`specfun`] | Γ, I₀, ₁F₁, incomplete gamma, adaptive quadrature |
//! | [`moments`] | closed-form and quadrature moments `E[Z^q]` |
//! | [`intensity`] | the intensity measure `Λ(s,t)` and radial densities |
//! | [`equivalence`] | isotropic representations and closed-form special cases |
//! | [`hata`] | COST231-Hata path-loss parameters |
//! | [`simulate`] | keyed random streams and the three samplers |
//! | [`gof`] | time-change KS, binned chi-square, mark tests, verdicts |

#![no_std]
#![deny(unsafe_code)]
// When std is linked into the build (unit tests, or a dependency enabling its
// std feature) its inherent float methods shadow the libm-backed trait.
#![allow(unused_imports)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;

pub mod equivalence;
pub mod gof;
pub mod hata;
pub mod intensity;
pub mod model;
pub mod moments;
pub mod simulate;
pub mod specfun;

pub use error::{Error, Result};
pub use equivalence::{isotropic_representation, IsotropicModel};
pub use intensity::{build_intensity, IntensityMeasure};


pub use model::{
    CompositeMark, JointAtom, MarkDraw, MarkLaw, NetworkModel, PropagationPoint, PropagationSample,
    SampleMeta, ScalarDistribution, TierSpec,
};
