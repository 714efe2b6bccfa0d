//! Spatial and temporal meshes.
//!
//! The spatial mesh is a periodic tensor-product tessellation of a rectangle.
//! Cells are indexed `(i, j)` with `0 <= i < nx`, `0 <= j < ny`; the right
//! neighbour of `(nx - 1, j)` is `(0, j)` and likewise in `y`.

use crate::error::{invalid, Result};

/// Axis-aligned rectangle `[x_lo, x_hi] x [y_lo, y_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Rect {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Self {
        Self {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        }
    }

    pub fn unit_square() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    fn is_nondegenerate(&self) -> bool {
        self.x_lo.is_finite()
            && self.x_hi.is_finite()
            && self.y_lo.is_finite()
            && self.y_hi.is_finite()
            && self.x_hi > self.x_lo
            && self.y_hi > self.y_lo
    }
}

/// One of the four edges of a rectangular cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    East,
    West,
    North,
    South,
}

/// Periodic rectangular tessellation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialMesh {
    nx: usize,
    ny: usize,
    x_edges: Vec<f64>,
    y_edges: Vec<f64>,
    domain: Rect,
}

impl SpatialMesh {
    /// Uniform `nx x ny` mesh of `domain`.
    pub fn uniform(nx: usize, ny: usize, domain: Rect) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return invalid(format!("cell counts must be positive, got {nx} x {ny}"));
        }
        if !domain.is_nondegenerate() {
            return invalid(format!("degenerate domain {domain:?}"));
        }
        Ok(Self {
            nx,
            ny,
            x_edges: uniform_edges(domain.x_lo, domain.x_hi, nx),
            y_edges: uniform_edges(domain.y_lo, domain.y_hi, ny),
            domain,
        })
    }

    /// Mesh from explicit, strictly increasing edge arrays.
    pub fn from_edges(x_edges: Vec<f64>, y_edges: Vec<f64>) -> Result<Self> {
        if x_edges.len() < 2 || y_edges.len() < 2 {
            return invalid("need at least two edges per axis");
        }
        let increasing = |e: &[f64]| {
            e.windows(2)
                .all(|w| w[1] > w[0] && w[0].is_finite() && w[1].is_finite())
        };
        if !increasing(&x_edges) || !increasing(&y_edges) {
            return invalid("edges must be finite and strictly increasing");
        }
        let domain = Rect::new(
            x_edges[0],
            *x_edges.last().unwrap(),
            y_edges[0],
            *y_edges.last().unwrap(),
        );
        Ok(Self {
            nx: x_edges.len() - 1,
            ny: y_edges.len() - 1,
            x_edges,
            y_edges,
            domain,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn num_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn x_edges(&self) -> &[f64] {
        &self.x_edges
    }

    pub fn y_edges(&self) -> &[f64] {
        &self.y_edges
    }

    pub fn hx(&self, i: usize) -> f64 {
        self.x_edges[i + 1] - self.x_edges[i]
    }

    pub fn hy(&self, j: usize) -> f64 {
        self.y_edges[j + 1] - self.y_edges[j]
    }

    /// Cell centre.
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            0.5 * (self.x_edges[i] + self.x_edges[i + 1]),
            0.5 * (self.y_edges[j] + self.y_edges[j + 1]),
        )
    }

    /// `h = max_ij max(h_i^x, h_j^y)`.
    pub fn h(&self) -> f64 {
        let hx = (0..self.nx).map(|i| self.hx(i)).fold(0.0, f64::max);
        let hy = (0..self.ny).map(|j| self.hy(j)).fold(0.0, f64::max);
        hx.max(hy)
    }

    /// Linear cell index, row-major in `i` then `j`.
    #[inline]
    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    #[inline]
    pub fn cell_coords(&self, c: usize) -> (usize, usize) {
        (c / self.ny, c % self.ny)
    }

    #[inline]
    pub fn east(&self, i: usize) -> usize {
        (i + 1) % self.nx
    }

    #[inline]
    pub fn west(&self, i: usize) -> usize {
        (i + self.nx - 1) % self.nx
    }

    #[inline]
    pub fn north(&self, j: usize) -> usize {
        (j + 1) % self.ny
    }

    #[inline]
    pub fn south(&self, j: usize) -> usize {
        (j + self.ny - 1) % self.ny
    }

    /// Cell across `edge` from `(i, j)`, wrapping periodically.
    pub fn neighbor(&self, i: usize, j: usize, edge: Edge) -> (usize, usize) {
        match edge {
            Edge::East => (self.east(i), j),
            Edge::West => (self.west(i), j),
            Edge::North => (i, self.north(j)),
            Edge::South => (i, self.south(j)),
        }
    }

    /// Map `(x, y)` periodically into `[x_lo, x_hi) x [y_lo, y_hi)`.
    pub fn wrap(&self, x: f64, y: f64) -> (f64, f64) {
        (
            wrap_into(x, self.domain.x_lo, self.domain.x_hi),
            wrap_into(y, self.domain.y_lo, self.domain.y_hi),
        )
    }

    /// Index of the x-cell containing `x` (already wrapped). Points on an
    /// interior edge belong to the cell on their right.
    pub fn locate_x(&self, x: f64) -> usize {
        locate(&self.x_edges, x)
    }

    pub fn locate_y(&self, y: f64) -> usize {
        locate(&self.y_edges, y)
    }
}

fn uniform_edges(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    let mut e: Vec<f64> = (0..=n).map(|i| lo + i as f64 * h).collect();
    e[n] = hi;
    e
}

fn wrap_into(v: f64, lo: f64, hi: f64) -> f64 {
    let len = hi - lo;
    let mut w = lo + (v - lo).rem_euclid(len);
    if w >= hi {
        w = lo;
    }
    w
}

fn locate(edges: &[f64], v: f64) -> usize {
    let n = edges.len() - 1;
    match edges.partition_point(|&e| e <= v) {
        0 => 0,
        p => (p - 1).min(n - 1),
    }
}

/// Graded temporal mesh `t_n = (n/M)^γ T`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedTimeMesh {
    steps: usize,
    gamma: f64,
    final_time: f64,
    t: Vec<f64>,
    tau: Vec<f64>,
}

impl GradedTimeMesh {
    /// Builds the graded mesh. `steps = 0` is accepted and yields the
    /// single point `t_0 = 0` (used for trajectories holding only the
    /// initial projection).
    pub fn new(steps: usize, gamma: f64, final_time: f64) -> Result<Self> {
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return invalid(format!("grading exponent must satisfy γ >= 1, got {gamma}"));
        }
        if !(final_time > 0.0) || !final_time.is_finite() {
            return invalid(format!("final time must be positive, got {final_time}"));
        }
        let m = steps as f64;
        let t: Vec<f64> = (0..=steps)
            .map(|n| {
                if n == 0 {
                    0.0
                } else {
                    final_time * (gamma * (n as f64 / m).ln()).exp()
                }
            })
            .collect();
        let tau = t.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self {
            steps,
            gamma,
            final_time,
            t,
            tau,
        })
    }

    /// Number of steps `M`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    /// Mesh points `t_0..=t_M`.
    pub fn points(&self) -> &[f64] {
        &self.t
    }

    pub fn t(&self, n: usize) -> f64 {
        self.t[n]
    }

    /// Step sizes; `tau()[n-1] = t_n - t_{n-1}`.
    pub fn step_sizes(&self) -> &[f64] {
        &self.tau
    }

    /// `τ_n = t_n - t_{n-1}` for `1 <= n <= M`.
    pub fn tau(&self, n: usize) -> f64 {
        self.tau[n - 1]
    }

    pub fn max_step(&self) -> f64 {
        self.tau.iter().copied().fold(0.0, f64::max)
    }
}
