//! State variables, the physical flux and the manufactured test solutions.

use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Lower bound applied to the density before any division by it.
pub const DENSITY_FLOOR: f64 = 1e-12;

/// Width parameter of the Gaussian density profile, `exp(-x² / (0.16 (t + 1)))`.
const GAUSSIAN_WIDTH: f64 = 0.16;
/// Half wavelength of the flux profile, `sin(π x / 0.8)`.
const SINE_PERIOD: f64 = 0.8;

/// Conservative unknowns of the transport system: density `N` and particle flux `Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conservative {
    pub density: f64,
    pub flux: f64,
}

/// Non-conservative variables: density `N` and Mach number `M = Γ/N`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Primitive {
    pub density: f64,
    pub mach: f64,
}

impl Conservative {
    pub const fn new(density: f64, flux: f64) -> Self {
        Self { density, flux }
    }

    pub fn is_finite(&self) -> bool {
        self.density.is_finite() && self.flux.is_finite()
    }

    pub fn to_primitive(self) -> Result<Primitive> {
        if !(self.density > 0.0) {
            return Err(Error::NonPositiveDensity(self.density));
        }
        Ok(Primitive::new(self.density, self.flux / self.density))
    }

    /// Conversion with the density clamped to [`DENSITY_FLOOR`].
    pub fn to_primitive_floored(self) -> Primitive {
        let density = floor_density(self.density);
        Primitive::new(density, self.flux / density)
    }

    /// Mach number with the density floor applied.
    pub fn mach(&self) -> f64 {
        self.flux / floor_density(self.density)
    }

    /// `(Γ, Γ²/N + N)`.
    pub fn physical_flux(self) -> Result<Conservative> {
        if !(self.density > 0.0) {
            return Err(Error::NonPositiveDensity(self.density));
        }
        Ok(self.flux_unchecked())
    }

    pub(crate) fn flux_unchecked(self) -> Conservative {
        Conservative::new(
            self.flux,
            self.flux * self.flux / self.density + self.density,
        )
    }
}

impl Primitive {
    pub const fn new(density: f64, mach: f64) -> Self {
        Self { density, mach }
    }

    pub fn to_conservative(self) -> Conservative {
        Conservative::new(self.density, self.density * self.mach)
    }

    /// Eigenvalues of the flux Jacobian, `(M − 1, M + 1)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        (self.mach - 1.0, self.mach + 1.0)
    }

    /// Physical flux written in primitive variables, `(N M, N M² + N)`.
    pub fn physical_flux(self) -> Result<Conservative> {
        self.to_conservative().physical_flux()
    }
}

#[inline]
pub(crate) fn floor_density(n: f64) -> f64 {
    if n > DENSITY_FLOOR {
        n
    } else {
        DENSITY_FLOOR
    }
}

impl core::ops::Add for Conservative {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.density + rhs.density, self.flux + rhs.flux)
    }
}

impl core::ops::Sub for Conservative {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.density - rhs.density, self.flux - rhs.flux)
    }
}

impl core::ops::Mul<Conservative> for f64 {
    type Output = Conservative;
    fn mul(self, rhs: Conservative) -> Conservative {
        Conservative::new(self * rhs.density, self * rhs.flux)
    }
}

/// The two manufactured solutions used by the reference experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// `Γ = sin(πx/0.8) N`, used with the cut-flux penalization.
    A,
    /// `Γ = M0 sin(πx/0.8) N`, used with the single-field penalizations.
    B,
}

/// Closed-form regular solution
///
/// ```text
/// N(t,x) = exp(-x² / (0.16 (t+1)))
/// Γ(t,x) = a sin(πx/0.8) N(t,x)
/// ```
///
/// with amplitude `a = 1` for case A and `a = M0` for case B, together with the
/// source terms that make it an exact solution of the unpenalized system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    kind: CaseKind,
    m0: f64,
}

/// Pointwise values of the exact solution and its first derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Jet {
    n: f64,
    n_t: f64,
    n_x: f64,
    sin: f64,
    cos: f64,
}

impl ManufacturedCase {
    pub fn case_a() -> Self {
        Self {
            kind: CaseKind::A,
            m0: 1.0,
        }
    }

    pub fn case_b(m0: f64) -> Self {
        Self {
            kind: CaseKind::B,
            m0,
        }
    }

    pub fn kind(&self) -> CaseKind {
        self.kind
    }

    /// Target Mach number at the limiter interface; `1` for case A.
    pub fn m0(&self) -> f64 {
        self.m0
    }

    fn amplitude(&self) -> f64 {
        match self.kind {
            CaseKind::A => 1.0,
            CaseKind::B => self.m0,
        }
    }

    fn jet(&self, t: f64, x: f64) -> Jet {
        let tau = t + 1.0;
        let n = libm::exp(-x * x / (GAUSSIAN_WIDTH * tau));
        let k = PI / SINE_PERIOD;
        Jet {
            n,
            n_t: n * x * x / (GAUSSIAN_WIDTH * tau * tau),
            n_x: -2.0 * x * n / (GAUSSIAN_WIDTH * tau),
            sin: libm::sin(k * x),
            cos: libm::cos(k * x),
        }
    }

    pub fn exact_state(&self, t: f64, x: f64) -> Conservative {
        let j = self.jet(t, x);
        Conservative::new(j.n, self.amplitude() * j.sin * j.n)
    }

    /// Spatial derivatives `(∂x N, ∂x Γ)` of the exact solution.
    pub fn exact_gradient(&self, t: f64, x: f64) -> (f64, f64) {
        let j = self.jet(t, x);
        let k = PI / SINE_PERIOD;
        let a = self.amplitude();
        (j.n_x, a * (k * j.cos * j.n + j.sin * j.n_x))
    }

    /// `(S_N, S_Γ)` with `S_N = ∂t N + ∂x Γ` and `S_Γ = ∂t Γ + ∂x (Γ²/N + N)`.
    pub fn source_terms(&self, t: f64, x: f64) -> (f64, f64) {
        let j = self.jet(t, x);
        let k = PI / SINE_PERIOD;
        let a = self.amplitude();
        let gamma_x = a * (k * j.cos * j.n + j.sin * j.n_x);
        let gamma_t = a * j.sin * j.n_t;
        // Γ²/N + N = N (1 + a² sin²)
        let momentum_x =
            j.n_x * (1.0 + a * a * j.sin * j.sin) + j.n * 2.0 * a * a * j.sin * k * j.cos;
        (j.n_t + gamma_x, gamma_t + momentum_x)
    }
}
