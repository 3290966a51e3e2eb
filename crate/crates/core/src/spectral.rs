//! In-plane Fourier transforms on zero-padded boxes, the `|k|` symbol and the
//! layered dipolar energy with exact kernels in `z`.
//!
//! A film sampled as `N_z` piecewise-constant layers has `∂_zψ` made of jump
//! sheets `q_j = ψ_j − ψ_{j−1}` at `z_j = j δ/N_z`, `j = 0..=N_z`. In-plane the
//! Newtonian kernel `1/(4π|r|)` becomes `e^{−k|z|}/(2k)`, so per mode
//!
//! ```text
//! E_d = (dx dy / N) Σ_k Σ_ij conj(Q_i) e^{−k|z_i−z_j|}/(2k) Q_j .
//! ```
//!
//! Because `Σ_j q_j = 0` the `1/(2k)` part integrates to nothing, and the
//! kernel `−(1 − e^{−kd})/(2k)` is used instead. It is finite at `k = 0`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;
use std::sync::Arc;

use rayon::prelude::*;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Boundary, Field2D, Field3D, Grid2D};

/// 2D complex FFT on an `nx × ny` row-major array (x fastest).
pub struct Fft2 {
    pub nx: usize,
    pub ny: usize,
    row_f: Arc<dyn Fft<f64>>,
    col_f: Arc<dyn Fft<f64>>,
    row_i: Arc<dyn Fft<f64>>,
    col_i: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut p = FftPlanner::new();
        Self {
            nx,
            ny,
            row_f: p.plan_fft_forward(nx),
            col_f: p.plan_fft_forward(ny),
            row_i: p.plan_fft_inverse(nx),
            col_i: p.plan_fft_inverse(ny),
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn run(&self, data: &mut [Complex64], row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
        let (nx, ny) = (self.nx, self.ny);
        row.process(data);
        if ny > 1 {
            let mut t = vec![Complex64::new(0.0, 0.0); nx * ny];
            for j in 0..ny {
                for i in 0..nx {
                    t[i * ny + j] = data[j * nx + i];
                }
            }
            col.process(&mut t);
            for j in 0..ny {
                for i in 0..nx {
                    data[j * nx + i] = t[i * ny + j];
                }
            }
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.row_f, &self.col_f);
    }

    /// Inverse transform including the `1/N` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.row_i, &self.col_i);
        let s = 1.0 / self.len() as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<(usize, usize), Rc<Fft2>>> = RefCell::new(HashMap::new());
}

/// Per-thread cached plan.
pub fn plan(nx: usize, ny: usize) -> Rc<Fft2> {
    PLANS.with(|p| p.borrow_mut().entry((nx, ny)).or_insert_with(|| Rc::new(Fft2::new(nx, ny))).clone())
}

/// Signed integer mode for index `m` of an `n`-point transform.
#[inline]
pub fn signed_mode(m: usize, n: usize) -> f64 {
    if m <= n / 2 {
        m as f64
    } else {
        m as f64 - n as f64
    }
}

/// The padded box on which a grid is transformed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaddedBox {
    pub grid: Grid2D,
    pub padding: usize,
    pub nx: usize,
    pub ny: usize,
}

impl PaddedBox {
    pub fn new(grid: Grid2D, padding: usize, boundary: Boundary) -> Result<Self> {
        if !matches!(padding, 1 | 2 | 4) {
            return Err(Error::InvalidParameter(format!("padding must be 1, 2 or 4, got {padding}")));
        }
        if boundary == Boundary::Periodic && padding != 1 {
            return Err(Error::InvalidParameter("periodic fields are transformed without padding".into()));
        }
        Ok(Self { grid, padding, nx: grid.nx * padding, ny: grid.ny * padding })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lengths(&self) -> (f64, f64) {
        (self.nx as f64 * self.grid.dx, self.ny as f64 * self.grid.dy)
    }

    /// `|k|` for every padded mode, row-major.
    pub fn kabs(&self) -> Vec<f64> {
        let (lx, ly) = self.lengths();
        let mut out = Vec::with_capacity(self.len());
        for n in 0..self.ny {
            let ky = 2.0 * PI * signed_mode(n, self.ny) / ly;
            for m in 0..self.nx {
                let kx = 2.0 * PI * signed_mode(m, self.nx) / lx;
                out.push(kx.hypot(ky));
            }
        }
        out
    }

    pub fn embed(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len()];
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                buf[j * self.nx + i] = Complex64::new(values[self.grid.idx(i, j)], 0.0);
            }
        }
        buf
    }

    pub fn extract(&self, buf: &[Complex64]) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                out[self.grid.idx(i, j)] = buf[j * self.nx + i].re;
            }
        }
        out
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf = self.embed(values);
        plan(self.nx, self.ny).forward(&mut buf);
        buf
    }

    pub fn inverse(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        plan(self.nx, self.ny).inverse(&mut buf);
        self.extract(&buf)
    }
}

/// Fourier coefficients of a zero-padded field. Coefficients are the raw DFT
/// sums; `Σ|c|² dx dy / N` is the L² norm squared.
#[derive(Debug, Clone)]
pub struct Spectrum2D {
    pub padded: PaddedBox,
    pub coeffs: Vec<Complex64>,
    pub mask: Vec<bool>,
    pub boundary: Boundary,
}

impl Spectrum2D {
    pub fn norm_sq(&self) -> f64 {
        let w = self.padded.grid.cell_area() / self.padded.len() as f64;
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * w
    }

    /// Physical wavevector of mode `(m, n)`.
    pub fn wavevector(&self, m: usize, n: usize) -> [f64; 2] {
        let (lx, ly) = self.padded.lengths();
        [2.0 * PI * signed_mode(m, self.padded.nx) / lx, 2.0 * PI * signed_mode(n, self.padded.ny) / ly]
    }

    pub fn coeff(&self, m: usize, n: usize) -> Complex64 {
        self.coeffs[n * self.padded.nx + m]
    }
}

pub fn transform(field: &Field2D, padding: usize) -> Result<Spectrum2D> {
    field.check_finite()?;
    let padded = PaddedBox::new(field.grid, padding, field.boundary)?;
    let coeffs = padded.forward(&masked(field));
    Ok(Spectrum2D { padded, coeffs, mask: field.mask.clone(), boundary: field.boundary })
}

pub fn inverse_transform(spec: &Spectrum2D) -> Field2D {
    let values = spec.padded.inverse(spec.coeffs.clone());
    Field2D { grid: spec.padded.grid, values, mask: spec.mask.clone(), boundary: spec.boundary }
}

fn masked(field: &Field2D) -> Vec<f64> {
    field.values.iter().zip(&field.mask).map(|(&v, &m)| if m { v } else { 0.0 }).collect()
}

/// True when a compactly supported field is nonzero on the outer ring of its
/// box, where periodic images of the padded transform leak in.
pub fn support_touches_edge(field: &Field2D) -> bool {
    if field.boundary == Boundary::Periodic {
        return false;
    }
    let g = &field.grid;
    (0..g.len()).any(|k| {
        let (i, j) = g.ij(k);
        (i == 0 || j == 0 || i + 1 == g.nx || j + 1 == g.ny) && field.mask[k] && field.values[k] != 0.0
    })
}

#[derive(Debug, Clone)]
pub struct HalfLaplacian {
    pub field: Field2D,
    /// The input support reaches the box edge; periodic images contaminate.
    pub edge_warning: bool,
}

/// `(−Δ)^{1/2}` through the `|k|` symbol. The result lives on the whole box
/// (it is not compactly supported), so its mask is all true.
pub fn half_laplacian(field: &Field2D, padding: usize) -> Result<HalfLaplacian> {
    let spec = transform(field, padding)?;
    let k = spec.padded.kabs();
    let mut c = spec.coeffs;
    for (v, kk) in c.iter_mut().zip(&k) {
        *v *= *kk;
    }
    let values = spec.padded.inverse(c);
    let g = field.grid;
    Ok(HalfLaplacian {
        field: Field2D { grid: g, values, mask: vec![true; g.len()], boundary: field.boundary },
        edge_warning: support_touches_edge(field),
    })
}

/// `∫u(−Δ)^{1/2}u` for node values `u` on `grid` (zero outside the box).
pub fn h12(values: &[f64], padded: &PaddedBox) -> f64 {
    let c = padded.forward(values);
    h12_of_coeffs(&c, &padded.kabs(), padded)
}

fn h12_of_coeffs(c: &[Complex64], k: &[f64], padded: &PaddedBox) -> f64 {
    let w = padded.grid.cell_area() / padded.len() as f64;
    c.iter().zip(k).map(|(v, kk)| kk * v.norm_sqr()).sum::<f64>() * w
}

/// Real-input 2D transform on a padded box. Rows past the embedded field
/// are zero and skipped going forward, and only the rows holding grid nodes
/// are rebuilt going back. The half spectrum is stored column by column.
#[derive(Clone)]
pub struct RealFft2 {
    padded: PaddedBox,
    half: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    col_f: Arc<dyn Fft<f64>>,
    col_i: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for RealFft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealFft2").field("nx", &self.padded.nx).field("ny", &self.padded.ny).finish()
    }
}

impl RealFft2 {
    pub fn new(padded: PaddedBox) -> Self {
        let mut rp = RealFftPlanner::<f64>::new();
        let mut cp = FftPlanner::new();
        Self {
            half: padded.nx / 2 + 1,
            r2c: rp.plan_fft_forward(padded.nx),
            c2r: rp.plan_fft_inverse(padded.nx),
            col_f: cp.plan_fft_forward(padded.ny),
            col_i: cp.plan_fft_inverse(padded.ny),
            padded,
        }
    }

    /// Modes kept per row.
    pub fn half(&self) -> usize {
        self.half
    }

    /// `|k|` and the Hermitian multiplicity of every stored mode.
    pub fn kabs_and_weights(&self) -> (Vec<f64>, Vec<f64>) {
        let (lx, ly) = self.padded.lengths();
        let (nx, ny) = (self.padded.nx, self.padded.ny);
        let mut k = Vec::with_capacity(self.half * ny);
        let mut w = Vec::with_capacity(self.half * ny);
        for m in 0..self.half {
            let kx = 2.0 * PI * m as f64 / lx;
            let mult = if m == 0 || 2 * m == nx { 1.0 } else { 2.0 };
            for n in 0..ny {
                let ky = 2.0 * PI * signed_mode(n, ny) / ly;
                k.push(kx.hypot(ky));
                w.push(mult);
            }
        }
        (k, w)
    }

    /// Unnormalized transform of grid-node values.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let g = self.padded.grid;
        let ny = self.padded.ny;
        let mut spec = vec![Complex64::new(0.0, 0.0); self.half * ny];
        let mut row = self.r2c.make_input_vec();
        let mut out = self.r2c.make_output_vec();
        for j in 0..g.ny {
            row[..g.nx].copy_from_slice(&values[j * g.nx..(j + 1) * g.nx]);
            row[g.nx..].fill(0.0);
            self.r2c.process(&mut row, &mut out).expect("row transform");
            for (m, v) in out.iter().enumerate() {
                spec[m * ny + j] = *v;
            }
        }
        if ny > 1 {
            self.col_f.process(&mut spec);
        }
        spec
    }

    /// Inverse transform, normalized, sampled at the grid nodes.
    pub fn inverse(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        let g = self.padded.grid;
        let (nx, ny) = (self.padded.nx, self.padded.ny);
        if ny > 1 {
            self.col_i.process(&mut spec);
        }
        let scale = 1.0 / (nx * ny) as f64;
        let mut row = self.c2r.make_input_vec();
        let mut out = self.c2r.make_output_vec();
        let mut values = vec![0.0; g.len()];
        for j in 0..g.ny {
            for (m, v) in row.iter_mut().enumerate() {
                *v = spec[m * ny + j];
            }
            // the result is real; drop roundoff in the self-conjugate modes
            row[0].im = 0.0;
            if nx % 2 == 0 {
                row[self.half - 1].im = 0.0;
            }
            self.c2r.process(&mut row, &mut out).expect("row transform");
            for i in 0..g.nx {
                values[j * g.nx + i] = out[i] * scale;
            }
        }
        values
    }
}

/// Precomputed `|k|` table for repeated half-Laplacian evaluations.
#[derive(Debug, Clone)]
pub struct HalfLaplacianOp {
    pub padded: PaddedBox,
    fft: RealFft2,
    kabs: Vec<f64>,
    weights: Vec<f64>,
}

impl HalfLaplacianOp {
    pub fn new(grid: Grid2D, padding: usize, boundary: Boundary) -> Result<Self> {
        let padded = PaddedBox::new(grid, padding, boundary)?;
        let fft = RealFft2::new(padded);
        let (kabs, weights) = fft.kabs_and_weights();
        Ok(Self { padded, fft, kabs, weights })
    }

    fn form_of(&self, c: &[Complex64]) -> f64 {
        let w = self.padded.grid.cell_area() / self.padded.len() as f64;
        c.iter().zip(&self.kabs).zip(&self.weights).map(|((v, k), m)| m * k * v.norm_sqr()).sum::<f64>() * w
    }

    /// `∫u(−Δ)^{1/2}u`.
    pub fn form(&self, u: &[f64]) -> f64 {
        self.form_of(&self.fft.forward(u))
    }

    /// `(∫u(−Δ)^{1/2}u, (−Δ)^{1/2}u)` with the second at the grid nodes.
    pub fn form_and_apply(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let mut c = self.fft.forward(u);
        let e = self.form_of(&c);
        for (v, k) in c.iter_mut().zip(&self.kabs) {
            *v *= *k;
        }
        (e, self.fft.inverse(c))
    }
}

/// `f_δ(k) = (1 − e^{−kδ})/k`, with `f_δ(0) = δ`.
pub fn slab_symbol(k: f64, delta: f64) -> f64 {
    let x = k * delta;
    if x < 1e-4 {
        delta * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0)
    } else {
        -(-x).exp_m1() / k
    }
}

/// `h(x) = (1 − e^{−x})/x − 1 + x/2`, the per-mode remainder of a
/// z-independent film in units of `δ`.
pub fn remainder_symbol(x: f64) -> f64 {
    -tail3(x) / x.max(f64::MIN_POSITIVE)
}

/// `e^{−x} − 1 + x − x²/2`, accurate for small `x`.
fn tail3(x: f64) -> f64 {
    if x < 1.0 {
        let mut term = -x * x * x / 6.0;
        let mut sum = term;
        let mut n = 3.0;
        for _ in 0..40 {
            n += 1.0;
            term *= -x / n;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (-x).exp() - 1.0 + x - 0.5 * x * x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DipolarDecomposition {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub remainder: f64,
    pub total: f64,
}

/// Dipolar energy operator for stacks on one grid, layer count and padding.
#[derive(Debug, Clone)]
pub struct DipolarOp {
    pub padded: PaddedBox,
    pub nz: usize,
    pub thickness: f64,
    kabs: Vec<f64>,
}

// below this kδ the recursion loses digits and the direct sum is used
const RECURSION_MIN_KDELTA: f64 = 0.05;

impl DipolarOp {
    pub fn new(grid: Grid2D, nz: usize, thickness: f64, padding: usize, boundary: Boundary) -> Result<Self> {
        if nz == 0 || !(thickness > 0.0) {
            return Err(Error::InvalidParameter(format!("need nz >= 1 and thickness > 0, got {nz}, {thickness}")));
        }
        let padded = PaddedBox::new(grid, padding, boundary)?;
        let kabs = padded.kabs();
        Ok(Self { padded, nz, thickness, kabs })
    }

    pub fn for_stack(stack: &Field3D, padding: usize) -> Result<Self> {
        Self::new(stack.grid, stack.nz(), stack.thickness, padding, stack.boundary)
    }

    fn check(&self, stack: &Field3D) -> Result<()> {
        self.padded.grid.ensure_same(&stack.grid, "dipolar stack")?;
        if stack.nz() != self.nz || (stack.thickness - self.thickness).abs() > 1e-14 * self.thickness {
            return Err(Error::GridMismatch(format!(
                "stack has {} layers over {}, operator built for {} over {}",
                stack.nz(),
                stack.thickness,
                self.nz,
                self.thickness
            )));
        }
        stack.check_finite()
    }

    fn layer_coeffs(&self, stack: &Field3D) -> Vec<Vec<Complex64>> {
        stack
            .layers
            .iter()
            .map(|l| {
                let v: Vec<f64> = l.iter().zip(&stack.mask).map(|(&x, &m)| if m { x } else { 0.0 }).collect();
                self.padded.forward(&v)
            })
            .collect()
    }

    fn jumps_at(&self, psi: &[Vec<Complex64>], m: usize) -> Vec<Complex64> {
        let nz = self.nz;
        let zero = Complex64::new(0.0, 0.0);
        (0..=nz)
            .map(|j| {
                let a = if j < nz { psi[j][m] } else { zero };
                let b = if j > 0 { psi[j - 1][m] } else { zero };
                a - b
            })
            .collect()
    }

    /// Potentials `P_i = Σ_j K_ij Q_j` with `K(d) = −(1 − e^{−kd})/(2k)`.
    fn potentials(&self, k: f64, q: &[Complex64], p: &mut [Complex64]) {
        let n = q.len();
        let t = self.thickness / self.nz as f64;
        if k * self.thickness < RECURSION_MIN_KDELTA {
            for i in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    let d = (i as f64 - j as f64).abs() * t;
                    s += q[j] * (-0.5 * slab_symbol(k, d));
                }
                p[i] = s;
            }
            return;
        }
        let e = (-k * t).exp();
        let total: Complex64 = q.iter().sum();
        let mut fwd = vec![Complex64::new(0.0, 0.0); n];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            acc = acc * e + q[i];
            fwd[i] = acc;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in (0..n).rev() {
            p[i] = (fwd[i] + acc - total) / (2.0 * k);
            acc = (acc + q[i]) * e;
        }
    }

    pub fn energy(&self, stack: &Field3D) -> Result<f64> {
        self.check(stack)?;
        let psi = self.layer_coeffs(stack);
        Ok(self.energy_of(&psi))
    }

    fn energy_of(&self, psi: &[Vec<Complex64>]) -> f64 {
        let c = self.padded.grid.cell_area() / self.padded.len() as f64;
        let per_mode: Vec<f64> = (0..self.padded.len())
            .into_par_iter()
            .map(|m| {
                let q = self.jumps_at(psi, m);
                let mut p = vec![Complex64::new(0.0, 0.0); q.len()];
                self.potentials(self.kabs[m], &q, &mut p);
                q.iter().zip(&p).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
            })
            .collect();
        c * per_mode.iter().sum::<f64>()
    }

    /// Energy and its gradient with respect to every layer node value.
    pub fn energy_and_gradient(&self, stack: &Field3D) -> Result<(f64, Vec<Vec<f64>>)> {
        self.check(stack)?;
        let psi = self.layer_coeffs(stack);
        let nz = self.nz;
        let nm = self.padded.len();
        let c = self.padded.grid.cell_area() / nm as f64;
        let per_mode: Vec<(f64, Vec<Complex64>)> = (0..nm)
            .into_par_iter()
            .map(|m| {
                let q = self.jumps_at(&psi, m);
                let mut p = vec![Complex64::new(0.0, 0.0); q.len()];
                self.potentials(self.kabs[m], &q, &mut p);
                let e = q.iter().zip(&p).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
                let g: Vec<Complex64> = (0..nz).map(|l| p[l] - p[l + 1]).collect();
                (e, g)
            })
            .collect();
        let energy = c * per_mode.iter().map(|(e, _)| e).sum::<f64>();
        let w = 2.0 * self.padded.grid.cell_area();
        let grads = (0..nz)
            .map(|l| {
                let buf: Vec<Complex64> = per_mode.iter().map(|(_, g)| g[l]).collect();
                let mut v = self.padded.inverse(buf);
                for (x, &m) in v.iter_mut().zip(&stack.mask) {
                    *x = if m { *x * w } else { 0.0 };
                }
                v
            })
            .collect();
        Ok((energy, grads))
    }

    /// Splits `E_d` by expanding the kernel `e^{−k|z|}/(2k)` in `k|z|`:
    /// `1/(2k)`, `−|z|/2`, `k z²/4` and the remainder, each summed directly.
    pub fn decomposition(&self, stack: &Field3D) -> Result<DipolarDecomposition> {
        self.check(stack)?;
        let psi = self.layer_coeffs(stack);
        let t = self.thickness / self.nz as f64;
        let c = self.padded.grid.cell_area() / self.padded.len() as f64;
        let parts: Vec<[f64; 5]> = (0..self.padded.len())
            .into_par_iter()
            .map(|m| {
                let k = self.kabs[m];
                let q = self.jumps_at(&psi, m);
                let s: Complex64 = q.iter().sum();
                let e0 = if k > 0.0 { s.norm_sqr() / (2.0 * k) } else { 0.0 };
                let (mut e1, mut e2, mut r) = (0.0, 0.0, 0.0);
                for i in 0..q.len() {
                    for j in 0..q.len() {
                        let d = (i as f64 - j as f64).abs() * t;
                        let qq = (q[i].conj() * q[j]).re;
                        e1 -= 0.5 * d * qq;
                        e2 += 0.25 * k * d * d * qq;
                        if k > 0.0 {
                            r += tail3(k * d) / (2.0 * k) * qq;
                        }
                    }
                }
                let mut p = vec![Complex64::new(0.0, 0.0); q.len()];
                self.potentials(k, &q, &mut p);
                let tot = q.iter().zip(&p).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
                [e0, e1, e2, r, tot + e0]
            })
            .collect();
        let mut acc = [0.0; 5];
        for p in &parts {
            for (a, b) in acc.iter_mut().zip(p) {
                *a += b;
            }
        }
        Ok(DipolarDecomposition {
            e0: c * acc[0],
            e1: c * acc[1],
            e2: c * acc[2],
            remainder: c * acc[3],
            total: c * acc[4],
        })
    }
}

pub fn dipolar_energy(stack: &Field3D, padding: usize) -> Result<f64> {
    DipolarOp::for_stack(stack, padding)?.energy(stack)
}

pub fn dipolar_decomposition(stack: &Field3D, padding: usize) -> Result<DipolarDecomposition> {
    DipolarOp::for_stack(stack, padding)?.decomposition(stack)
}

/// Default padding for a field: none on periodic cells, 2 otherwise.
pub fn default_padding(boundary: Boundary) -> usize {
    match boundary {
        Boundary::Periodic => 1,
        Boundary::Open => 2,
    }
}
