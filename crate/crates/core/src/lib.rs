//! Finite-volume solver for the one-dimensional plasma transport system
//!
//! ```text
//! ∂t N + ∂x Γ            = S_N
//! ∂t Γ + ∂x (Γ²/N + N)   = S_Γ
//! ```
//!
//! with a material limiter occupying the right end of the domain and handled by
//! volume penalization. Three penalty formulations are provided: the cut-flux
//! penalization of Isoardi et al. (which develops an interface singularity), a
//! single-field penalization `χ/η (Γ/M0 − N)` free of boundary layer, and its
//! Mach-number variant `χ/η (Γ/N − M0)`.
//!
//! The spatial discretization is VFRoe with non-conservative variables `(N, M)`,
//! MUSCL reconstruction with the minmod limiter and Heun (TVD RK2) time
//! stepping. Penalty terms are integrated implicitly, split from the transport step.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod boundary;
pub mod error;
pub mod experiments;
pub mod mesh;
pub mod model;
pub mod penalty;
pub mod scheme;

pub use boundary::{BoundarySpec, Extrapolation, LeftBoundary, RightBoundary};
pub use error::{Error, Result};
pub use experiments::{
    BlowupReport, BlowupStudy, ConvergenceStudy, ErrorNorms, ErrorReport, RunConfig, Simulation,
    Slopes, Snapshot,
};
pub use mesh::Mesh1D;
pub use model::{CaseKind, Conservative, ManufacturedCase, Primitive, DENSITY_FLOOR};
pub use penalty::{PenaltyConfig, PenaltyKind};
pub use scheme::{Field, InterfaceStates, PenaltyCoupling, Problem, Reconstruction};
