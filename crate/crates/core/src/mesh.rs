use crate::error::{Error, Result};

/// Uniform cell-centered grid on `[x_min, x_max]` whose limiter interface
/// `limiter_start` sits on a cell face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh1D {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
    limiter_start: f64,
    dx: f64,
    first_limiter_cell: usize,
}

impl Mesh1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize, limiter_start: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::Mesh("domain must satisfy x_min < x_max"));
        }
        if n_cells < 3 {
            return Err(Error::Mesh("at least three cells are required"));
        }
        if !(limiter_start >= x_min && limiter_start <= x_max) {
            return Err(Error::Mesh("limiter interface lies outside the domain"));
        }
        let dx = (x_max - x_min) / n_cells as f64;
        let faces = (limiter_start - x_min) / dx;
        let face = libm::round(faces);
        if libm::fabs(faces - face) > 1e-8 * faces.max(1.0) {
            return Err(Error::Mesh(
                "limiter interface does not coincide with a cell face",
            ));
        }
        Ok(Self {
            x_min,
            x_max,
            n_cells,
            limiter_start,
            dx,
            first_limiter_cell: face as usize,
        })
    }

    /// `[0, 0.5]` with the limiter interface at `0.4`.
    pub fn reference(n_cells: usize) -> Result<Self> {
        Self::new(0.0, 0.5, n_cells, 0.4)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn limiter_start(&self) -> f64 {
        self.limiter_start
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Index of the first cell inside the limiter; equals `n_cells` when the
    /// limiter is empty.
    pub fn first_limiter_cell(&self) -> usize {
        self.first_limiter_cell
    }

    pub fn center(&self, i: isize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells as isize).map(move |i| self.center(i))
    }

    /// Same geometry with a different resolution.
    pub fn with_cells(&self, n_cells: usize) -> Result<Self> {
        Self::new(self.x_min, self.x_max, n_cells, self.limiter_start)
    }
}
