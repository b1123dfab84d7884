//! Variational physics-informed neural networks (VPINNs) for 1D/2D
//! boundary-value problems.
//!
//! Networks act as trial functions; sines or Legendre composites act as test
//! functions. The PDE residual is tested against the basis (Petrov-Galerkin),
//! either through closed-form expressions (shallow sine networks) or Gauss
//! quadrature (deep networks), and the squared residual vector plus a boundary
//! penalty is minimized with Adam. A strong-form (PINN) path with interior
//! penalizing points is included as a baseline.

pub mod analytic;
pub mod basis;
pub mod error;
pub mod net;
pub mod quadrature;

pub use basis::{BasisKind, TestBasis};
pub use error::{Error, Result};
pub use net::{Activation, DeepNetParams, EvalJet, JetField, Layer};
pub use quadrature::{gauss_rule, QuadKind, QuadratureRule};
