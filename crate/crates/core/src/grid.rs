//! Uniform node grids and the sampled fields living on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform node grid. Node `(i, j)` sits at `origin + (i dx, j dy)`; each
/// node carries the cell measure `dx * dy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub origin: [f64; 2],
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, origin: [f64; 2]) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidParameter("grid needs at least one node per axis".into()));
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid spacing must be positive, got ({dx}, {dy})")));
        }
        Ok(Self { nx, ny, dx, dy, origin })
    }

    /// Square-spaced grid covering `[-half_width, half_width]^2` (centered).
    pub fn centered(n: usize, half_width: f64) -> Self {
        let h = 2.0 * half_width / n as f64;
        let o = -half_width + 0.5 * h;
        Self { nx: n, ny: n, dx: h, dy: h, origin: [o, o] }
    }

    /// Grid with spacing `h` whose box covers `[x0, x1] x [y0, y1]`.
    pub fn covering(x0: f64, x1: f64, y0: f64, y1: f64, h: f64) -> Self {
        let nx = ((x1 - x0) / h).ceil().max(1.0) as usize;
        let ny = ((y1 - y0) / h).ceil().max(1.0) as usize;
        let cx = 0.5 * (x0 + x1) - 0.5 * (nx as f64 - 1.0) * h;
        let cy = 0.5 * (y0 + y1) - 0.5 * (ny as f64 - 1.0) * h;
        Self { nx, ny, dx: h, dy: h, origin: [cx, cy] }
    }

    /// Same center and spacing, each axis grown to the next size with no
    /// prime factor above 5, which keeps transforms on the fast paths.
    pub fn smoothed(&self) -> Self {
        let nx = next_smooth(self.nx);
        let ny = next_smooth(self.ny);
        let cx = self.origin[0] - 0.5 * (nx - self.nx) as f64 * self.dx;
        let cy = self.origin[1] - 0.5 * (ny - self.ny) as f64 * self.dy;
        Self { nx, ny, dx: self.dx, dy: self.dy, origin: [cx, cy] }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.origin[0] + i as f64 * self.dx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.origin[1] + j as f64 * self.dy
    }

    #[inline]
    pub fn point(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.ij(k);
        [self.x(i), self.y(j)]
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// Extent of the box of cells `[x_min, x_max, y_min, y_max]`.
    pub fn bounds(&self) -> [f64; 4] {
        [
            self.origin[0] - 0.5 * self.dx,
            self.origin[0] + (self.nx as f64 - 0.5) * self.dx,
            self.origin[1] - 0.5 * self.dy,
            self.origin[1] + (self.ny as f64 - 0.5) * self.dy,
        ]
    }

    pub fn same_as(&self, other: &Grid2D) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && rel_eq(self.dx, other.dx)
            && rel_eq(self.dy, other.dy)
            && rel_eq(self.origin[0], other.origin[0])
            && rel_eq(self.origin[1], other.origin[1])
    }

    pub fn ensure_same(&self, other: &Grid2D, what: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{what}: {self:?} vs {other:?}")))
        }
    }
}

fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// Whether fields are compactly supported in an open box (zero outside the
/// mask, transforms zero-pad) or live on a periodic cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Samples of a planar field with its domain mask. Values outside the mask
/// are kept at zero: the field is extended by zero outside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub grid: Grid2D,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    pub boundary: Boundary,
}

impl Field2D {
    pub fn zeros(grid: Grid2D, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), grid.len(), "mask size");
        Self { grid, values: vec![0.0; grid.len()], mask, boundary: Boundary::Open }
    }

    /// Periodic cell, every node inside the domain.
    pub fn periodic(grid: Grid2D) -> Self {
        Self { grid, values: vec![0.0; grid.len()], mask: vec![true; grid.len()], boundary: Boundary::Periodic }
    }

    /// Same grid, mask and boundary with values `f(x, y)` inside the mask.
    pub fn from_fn(grid: Grid2D, mask: Vec<bool>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid, mask);
        out.fill_with(f);
        out
    }

    pub fn fill_with(&mut self, f: impl Fn(f64, f64) -> f64) {
        for k in 0..self.grid.len() {
            if self.mask[k] {
                let [x, y] = self.grid.point(k);
                self.values[k] = f(x, y);
            } else {
                self.values[k] = 0.0;
            }
        }
    }

    pub fn like(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.grid.len());
        Self { grid: self.grid, values, mask: self.mask.clone(), boundary: self.boundary }
    }

    pub fn with_constant(&self, c: f64) -> Self {
        let values = self.mask.iter().map(|&m| if m { c } else { 0.0 }).collect();
        self.like(values)
    }

    pub fn check_finite(&self) -> Result<()> {
        for (k, v) in self.values.iter().enumerate() {
            if !v.is_finite() {
                let (i, j) = self.grid.ij(k);
                return Err(Error::NonFinite { i, j });
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().zip(&self.mask).filter(|(_, &m)| m).fold(0.0, |a, (v, _)| a.max(v.abs()))
    }

    /// Integral of `f(value)` over the mask.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let w = self.grid.cell_area();
        self.values.iter().zip(&self.mask).filter(|(_, &m)| m).map(|(&v, _)| f(v)).sum::<f64>() * w
    }

    pub fn l2_norm(&self) -> f64 {
        self.integrate(|v| v * v).sqrt()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.integrate(|v| v.abs().powf(p)).powf(1.0 / p)
    }

    pub fn area(&self) -> f64 {
        self.mask.iter().filter(|&&m| m).count() as f64 * self.grid.cell_area()
    }
}

/// A film sampled as `N_z` layers of equal thickness `thickness / N_z`, each
/// layer piecewise constant in `z`. All layers share the grid and the
/// cross-section mask of the film.
#[derive(Debug, Clone, PartialEq)]
pub struct Field3D {
    pub grid: Grid2D,
    pub mask: Vec<bool>,
    pub thickness: f64,
    pub layers: Vec<Vec<f64>>,
    pub boundary: Boundary,
}

/// The layered stack used by the dipolar kernels.
pub type LayerStack = Field3D;

impl Field3D {
    pub fn zeros(grid: Grid2D, mask: Vec<bool>, thickness: f64, nz: usize) -> Result<Self> {
        if nz == 0 {
            return Err(Error::InvalidParameter("layer count must be at least 1".into()));
        }
        if !(thickness > 0.0) {
            return Err(Error::InvalidParameter(format!("thickness must be positive, got {thickness}")));
        }
        if mask.len() != grid.len() {
            return Err(Error::GridMismatch("mask size differs from grid".into()));
        }
        Ok(Self { grid, mask, thickness, layers: vec![vec![0.0; grid.len()]; nz], boundary: Boundary::Open })
    }

    /// `nz` copies of a planar field (a z-independent film).
    pub fn replicate(field: &Field2D, thickness: f64, nz: usize) -> Result<Self> {
        let mut s = Self::zeros(field.grid, field.mask.clone(), thickness, nz)?;
        for layer in &mut s.layers {
            layer.copy_from_slice(&field.values);
        }
        s.boundary = field.boundary;
        Ok(s)
    }

    /// Build from explicit layer values; entries outside the mask are zeroed.
    pub fn from_layers(grid: Grid2D, mask: Vec<bool>, thickness: f64, mut layers: Vec<Vec<f64>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParameter("layer count must be at least 1".into()));
        }
        for l in &mut layers {
            if l.len() != grid.len() {
                return Err(Error::GridMismatch("layer size differs from grid".into()));
            }
            for (v, &m) in l.iter_mut().zip(&mask) {
                if !m {
                    *v = 0.0;
                }
            }
        }
        let mut s = Self::zeros(grid, mask, thickness, layers.len())?;
        s.layers = layers;
        Ok(s)
    }

    #[inline]
    pub fn nz(&self) -> usize {
        self.layers.len()
    }

    #[inline]
    pub fn layer_thickness(&self) -> f64 {
        self.thickness / self.nz() as f64
    }

    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.grid.cell_area() * self.layer_thickness()
    }

    pub fn layer(&self, l: usize) -> Field2D {
        Field2D { grid: self.grid, values: self.layers[l].clone(), mask: self.mask.clone(), boundary: self.boundary }
    }

    pub fn check_finite(&self) -> Result<()> {
        for l in &self.layers {
            for (k, v) in l.iter().enumerate() {
                if !v.is_finite() {
                    let (i, j) = self.grid.ij(k);
                    return Err(Error::NonFinite { i, j });
                }
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| l.iter().zip(&self.mask).filter(|(_, &m)| m).map(|(v, _)| v.abs()))
            .fold(0.0, f64::max)
    }

    /// Integral of `f(value)` over the film volume.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let w = self.cell_volume();
        let mut s = 0.0;
        for l in &self.layers {
            for (&v, &m) in l.iter().zip(&self.mask) {
                if m {
                    s += f(v);
                }
            }
        }
        s * w
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.integrate(|v| v * v)
    }

    pub fn volume(&self) -> f64 {
        self.mask.iter().filter(|&&m| m).count() as f64 * self.grid.cell_area() * self.thickness
    }

    /// Multiply every layer by a planar weight (e.g. the cutoff).
    pub fn scaled_by(&self, weight: &[f64]) -> Self {
        let mut out = self.clone();
        for l in &mut out.layers {
            for (v, w) in l.iter_mut().zip(weight) {
                *v *= w;
            }
        }
        out
    }
}

/// Smallest `m ≥ n` of the form `2^a 3^b 5^c`.
pub fn next_smooth(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_grid_is_symmetric() {
        let g = Grid2D::centered(8, 2.0);
        assert!((g.x(0) + g.x(7)).abs() < 1e-14);
        assert!((g.dx - 0.5).abs() < 1e-15);
        let b = g.bounds();
        assert!((b[0] + 2.0).abs() < 1e-14 && (b[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn covering_grid_contains_box() {
        let g = Grid2D::covering(-1.0, 3.0, 0.0, 1.0, 0.3);
        let b = g.bounds();
        assert!(b[0] <= -1.0 && b[1] >= 3.0 && b[2] <= 0.0 && b[3] >= 1.0);
    }

    #[test]
    fn replicate_and_integrate() {
        let g = Grid2D::centered(4, 1.0);
        let f = Field2D::from_fn(g, vec![true; 16], |_, _| 2.0);
        let s = Field3D::replicate(&f, 0.5, 3).unwrap();
        assert!((s.l2_norm_sq() - 4.0 * 4.0 * 0.5).abs() < 1e-12);
        assert!(Field3D::zeros(g, vec![true; 16], 0.5, 0).is_err());
    }

    #[test]
    fn rejects_bad_spacing() {
        assert!(Grid2D::new(4, 4, 0.0, 1.0, [0.0, 0.0]).is_err());
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(next_smooth(260), 270);
        assert_eq!(next_smooth(256), 256);
        assert_eq!(next_smooth(7), 8);
        let g = Grid2D::covering(-1.0, 1.0, -1.0, 1.0, 2.0 / 259.0).smoothed();
        assert_eq!(g.nx, 270);
        assert!((g.x(0) + g.x(g.nx - 1)).abs() < 1e-12);
    }
}
