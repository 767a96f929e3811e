//! Numerics for hypergeometric solutions of the qKZ equation attached to
//! U_q(sl2) with two-dimensional evaluation modules.
//!
//! The crate is organised bottom-up:
//!
//! * [`qseries`]: q-Pochhammer symbols, theta, and the auxiliary ratios xi, rho, C.
//! * [`spinchain`]: vectors in (C^2)^{⊗n}, the trigonometric R-matrix and leg actions.
//! * [`tvweights`]: the rational weight function w and the phase function Phi.
//! * [`ellspace`]: structured elliptic gauge functions W with exact p-shift calculus.
//! * [`freefield`]: closed forms of the free-field correlation function and its pieces.
//! * [`contours`]: circle-plus-residue contours and trapezoidal quadrature.
//! * [`qkzcheck`]: solution assembly and qKZ residuals.
//!
//! Leg and variable indices in the API are 0-based. Formulas that use the
//! 1-based position of a leg (exponents like `m + n - l - i`) convert internally.

pub mod contours;
pub mod ellspace;
pub mod error;
pub mod freefield;
pub mod params;
pub mod qkzcheck;
pub mod qseries;
pub mod spinchain;
pub mod tvweights;

pub use num_complex::Complex64 as C64;

pub use contours::{ContourPlan, Quadrature};
pub use ellspace::{Multiplier, StructuredW, ThetaAtom, Var};
pub use error::{Error, Result};
pub use freefield::ScreenSignConfig;
pub use params::ParameterSet;
pub use qkzcheck::QKZReport;
pub use spinchain::{SpinConfig, SpinVector};
pub use tvweights::PointConfig;
