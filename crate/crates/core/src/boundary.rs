//! Ghost-cell filling.

use crate::error::{Error, Result};
use crate::mesh::Mesh1D;
use crate::model::{floor_density, Conservative, ManufacturedCase};
use crate::scheme::{Field, GHOSTS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeftBoundary {
    /// `N` even, `Γ` odd about the left end.
    Symmetry,
    /// Density extrapolated from the interior, `Γ = M N` in the ghosts.
    DirichletMach(f64),
    Periodic,
    /// Ghosts sampled from the manufactured solution.
    Exact,
}

/// How the density is carried into the ghost cells of a Mach condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extrapolation {
    /// Copy of the last interior value.
    #[default]
    Constant,
    /// Linear continuation of the last two interior values. Keeps the
    /// boundary second-order accurate when `N` has a slope at the wall.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RightBoundary {
    /// `Γ = M N` in the ghosts with `N` extrapolated from the interior.
    DirichletMach {
        mach: f64,
        extrapolation: Extrapolation,
    },
    /// Zeroth-order extrapolation of `N` and `Γ` (outflow).
    Transparent,
    Periodic,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec {
    left: LeftBoundary,
    right: RightBoundary,
    epsilon: f64,
}

impl BoundarySpec {
    pub fn new(left: LeftBoundary, right: RightBoundary, epsilon: f64) -> Result<Self> {
        let periodic_left = left == LeftBoundary::Periodic;
        let periodic_right = right == RightBoundary::Periodic;
        if periodic_left != periodic_right {
            return Err(Error::Boundary(
                "periodic conditions must be used on both sides",
            ));
        }
        for m in [left_mach(left), right_mach(right)].into_iter().flatten() {
            if !(libm::fabs(m) < 1.0) {
                return Err(Error::Boundary("Mach boundary values must satisfy |M| < 1"));
            }
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Boundary("epsilon must lie in (0, 1)"));
        }
        Ok(Self {
            left,
            right,
            epsilon,
        })
    }

    /// Symmetry at the left end and `M = 1 − ε` imposed at the right end: the
    /// unpenalized reference boundary value problem.
    pub fn reference(epsilon: f64, extrapolation: Extrapolation) -> Result<Self> {
        let right = RightBoundary::DirichletMach {
            mach: 1.0 - epsilon,
            extrapolation,
        };
        Self::new(LeftBoundary::Symmetry, right, epsilon)
    }

    /// Symmetry at the left end and an outflow condition deep in the limiter.
    pub fn penalized(epsilon: f64) -> Result<Self> {
        Self::new(LeftBoundary::Symmetry, RightBoundary::Transparent, epsilon)
    }

    pub fn periodic() -> Self {
        Self {
            left: LeftBoundary::Periodic,
            right: RightBoundary::Periodic,
            epsilon: 0.1,
        }
    }

    pub fn left(&self) -> LeftBoundary {
        self.left
    }

    pub fn right(&self) -> RightBoundary {
        self.right
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn fill_ghosts(&self, field: &mut Field, mesh: &Mesh1D, case: &ManufacturedCase, t: f64) {
        let n = field.len() as isize;
        let g = GHOSTS as isize;
        for k in 1..=g {
            let ghost = match self.left {
                LeftBoundary::Symmetry => {
                    let u = field.get(k - 1);
                    Conservative::new(u.density, -u.flux)
                }
                LeftBoundary::DirichletMach(m) => {
                    let d = field.get(0).density;
                    Conservative::new(d, m * d)
                }
                LeftBoundary::Periodic => field.get(n - k),
                LeftBoundary::Exact => case.exact_state(t, mesh.center(-k)),
            };
            field.set(-k, ghost);

            let ghost = match self.right {
                RightBoundary::DirichletMach {
                    mach,
                    extrapolation,
                } => {
                    let last = field.get(n - 1).density;
                    let d = match extrapolation {
                        Extrapolation::Constant => last,
                        Extrapolation::Linear => {
                            floor_density(last + k as f64 * (last - field.get(n - 2).density))
                        }
                    };
                    Conservative::new(d, mach * d)
                }
                RightBoundary::Transparent => field.get(n - 1),
                RightBoundary::Periodic => field.get(k - 1),
                RightBoundary::Exact => case.exact_state(t, mesh.center(n - 1 + k)),
            };
            field.set(n - 1 + k, ghost);
        }
    }
}

fn left_mach(b: LeftBoundary) -> Option<f64> {
    match b {
        LeftBoundary::DirichletMach(m) => Some(m),
        _ => None,
    }
}

fn right_mach(b: RightBoundary) -> Option<f64> {
    match b {
        RightBoundary::DirichletMach { mach, .. } => Some(mach),
        _ => None,
    }
}
