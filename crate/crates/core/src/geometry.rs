//! Planar cross-sections, signed distances, the smooth cutoff and eroded sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid2D;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Disc {
        radius: f64,
    },
    Rectangle {
        width: f64,
        height: f64,
        corner_radius: f64,
    },
    Annulus {
        r_in: f64,
        r_out: f64,
    },
    /// Pixel bitmap, row-major with `j` (the y index) outermost. Pixel `(i, j)`
    /// is centered at `center + ((i - (nx-1)/2) spacing, (j - (ny-1)/2) spacing)`.
    Mask {
        nx: usize,
        ny: usize,
        spacing: f64,
        pixels: Vec<bool>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub shape: Shape,
    #[serde(default)]
    pub center: [f64; 2],
}

impl DomainSpec {
    pub fn disc(radius: f64) -> Self {
        Self { shape: Shape::Disc { radius }, center: [0.0, 0.0] }
    }

    pub fn rectangle(width: f64, height: f64, corner_radius: f64) -> Self {
        Self { shape: Shape::Rectangle { width, height, corner_radius }, center: [0.0, 0.0] }
    }

    pub fn annulus(r_in: f64, r_out: f64) -> Self {
        Self { shape: Shape::Annulus { r_in, r_out }, center: [0.0, 0.0] }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match &self.shape {
            Shape::Disc { radius } if !(*radius > 0.0) => bad(format!("disc radius must be positive, got {radius}")),
            Shape::Rectangle { width, height, corner_radius } => {
                if !(*width > 0.0 && *height > 0.0) {
                    return bad(format!("rectangle sides must be positive, got {width} x {height}"));
                }
                if !(*corner_radius > 0.0) {
                    return bad("rectangle corner_radius must be positive (the boundary must be C^1)".into());
                }
                if 2.0 * corner_radius > width.min(*height) {
                    return bad(format!("corner_radius {corner_radius} exceeds half the shorter side"));
                }
                Ok(())
            }
            Shape::Annulus { r_in, r_out } if !(*r_in > 0.0 && r_out > r_in) => {
                bad(format!("annulus needs 0 < r_in < r_out, got ({r_in}, {r_out})"))
            }
            Shape::Mask { nx, ny, spacing, pixels } => {
                if pixels.len() != nx * ny || *nx == 0 || *ny == 0 {
                    return bad(format!("mask has {} pixels for {nx} x {ny}", pixels.len()));
                }
                if !(*spacing > 0.0) {
                    return bad(format!("mask spacing must be positive, got {spacing}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `[x_min, x_max, y_min, y_max]` of the closed domain.
    pub fn bounding_box(&self) -> [f64; 4] {
        let [cx, cy] = self.center;
        let (hx, hy) = match &self.shape {
            Shape::Disc { radius } => (*radius, *radius),
            Shape::Rectangle { width, height, .. } => (0.5 * width, 0.5 * height),
            Shape::Annulus { r_out, .. } => (*r_out, *r_out),
            Shape::Mask { nx, ny, spacing, .. } => (0.5 * *nx as f64 * spacing, 0.5 * *ny as f64 * spacing),
        };
        [cx - hx, cx + hx, cy - hy, cy + hy]
    }

    /// Width of the thinnest part of the domain.
    pub fn min_feature(&self) -> f64 {
        match &self.shape {
            Shape::Disc { radius } => 2.0 * radius,
            Shape::Rectangle { width, height, .. } => width.min(*height),
            Shape::Annulus { r_in, r_out } => r_out - r_in,
            Shape::Mask { spacing, .. } => 4.0 * spacing,
        }
    }

    /// Smallest radius of curvature of the boundary, `None` for bitmaps.
    pub fn min_curvature_radius(&self) -> Option<f64> {
        match &self.shape {
            Shape::Disc { radius } => Some(*radius),
            Shape::Rectangle { corner_radius, .. } => Some(*corner_radius),
            Shape::Annulus { r_in, .. } => Some(*r_in),
            Shape::Mask { .. } => None,
        }
    }

    /// Analytic signed distance (positive inside). `None` for bitmaps.
    pub fn rho(&self, x: f64, y: f64) -> Option<f64> {
        let px = x - self.center[0];
        let py = y - self.center[1];
        match &self.shape {
            Shape::Disc { radius } => Some(radius - px.hypot(py)),
            Shape::Rectangle { width, height, corner_radius: r } => {
                let qx = px.abs() - (0.5 * width - r);
                let qy = py.abs() - (0.5 * height - r);
                let outside = qx.max(0.0).hypot(qy.max(0.0));
                let inside = qx.max(qy).min(0.0);
                Some(-(outside + inside - r))
            }
            Shape::Annulus { r_in, r_out } => {
                let d = px.hypot(py);
                Some((d - r_in).min(r_out - d))
            }
            Shape::Mask { .. } => None,
        }
    }

    /// Node grid of spacing `h` covering the domain plus `margin` on every side.
    pub fn grid(&self, h: f64, margin: f64) -> Grid2D {
        let [x0, x1, y0, y1] = self.bounding_box();
        Grid2D::covering(x0 - margin, x1 + margin, y0 - margin, y1 + margin, h)
    }

    fn mask_pixel(&self, x: f64, y: f64) -> bool {
        if let Shape::Mask { nx, ny, spacing, pixels } = &self.shape {
            let fi = (x - self.center[0]) / spacing + 0.5 * (*nx as f64 - 1.0);
            let fj = (y - self.center[1]) / spacing + 0.5 * (*ny as f64 - 1.0);
            let i = fi.round();
            let j = fj.round();
            if i < 0.0 || j < 0.0 || i >= *nx as f64 || j >= *ny as f64 {
                return false;
            }
            pixels[j as usize * nx + i as usize]
        } else {
            false
        }
    }
}

/// Node samples of `ρ(r) = dist(r, ℝ²∖D) − dist(r, D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedDistanceField {
    pub grid: Grid2D,
    pub values: Vec<f64>,
    pub spec: DomainSpec,
}

impl SignedDistanceField {
    /// Nodes of `D` (where `ρ > 0`).
    pub fn domain_mask(&self) -> Vec<bool> {
        self.values.iter().map(|&r| r > 0.0).collect()
    }

    /// `ρ` at an arbitrary point: exact for analytic shapes, bilinear otherwise.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.spec.rho(x, y).unwrap_or_else(|| bilinear(&self.grid, &self.values, x, y).unwrap_or(f64::NEG_INFINITY))
    }

    /// `∇ρ` by central differences of `eval` at scale `step`.
    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let s = 0.25 * self.grid.dx.min(self.grid.dy);
        [
            (self.eval(x + s, y) - self.eval(x - s, y)) / (2.0 * s),
            (self.eval(x, y + s) - self.eval(x, y - s)) / (2.0 * s),
        ]
    }
}

/// Bilinear interpolation of node values; `None` outside the node hull.
pub fn bilinear(grid: &Grid2D, values: &[f64], x: f64, y: f64) -> Option<f64> {
    let fx = (x - grid.origin[0]) / grid.dx;
    let fy = (y - grid.origin[1]) / grid.dy;
    if fx < 0.0 || fy < 0.0 || fx > (grid.nx - 1) as f64 || fy > (grid.ny - 1) as f64 {
        return None;
    }
    let i = (fx.floor() as usize).min(grid.nx.saturating_sub(2));
    let j = (fy.floor() as usize).min(grid.ny.saturating_sub(2));
    let tx = fx - i as f64;
    let ty = fy - j as f64;
    let v = |a, b| values[grid.idx(a, b)];
    let i1 = (i + 1).min(grid.nx - 1);
    let j1 = (j + 1).min(grid.ny - 1);
    Some((1.0 - ty) * ((1.0 - tx) * v(i, j) + tx * v(i1, j)) + ty * ((1.0 - tx) * v(i, j1) + tx * v(i1, j1)))
}

pub fn signed_distance(spec: &DomainSpec, grid: &Grid2D) -> Result<SignedDistanceField> {
    spec.validate()?;
    let [x0, x1, y0, y1] = spec.bounding_box();
    let [gx0, gx1, gy0, gy1] = grid.bounds();
    let tol = 1e-12 * (1.0 + x1.abs().max(y1.abs()));
    if gx0 > x0 + tol || gx1 < x1 - tol || gy0 > y0 + tol || gy1 < y1 - tol {
        return Err(Error::GridTooSmall(format!(
            "grid box [{gx0}, {gx1}] x [{gy0}, {gy1}] vs domain box [{x0}, {x1}] x [{y0}, {y1}]"
        )));
    }
    let h = grid.dx.max(grid.dy);
    let nodes = spec.min_feature() / h;
    if nodes < 4.0 {
        return Err(Error::GridTooCoarse { feature: format!("{:?}", spec.shape), nodes });
    }
    let values = match spec.shape {
        Shape::Mask { .. } => {
            let inside: Vec<bool> = (0..grid.len())
                .map(|k| {
                    let [x, y] = grid.point(k);
                    spec.mask_pixel(x, y)
                })
                .collect();
            mask_signed_distance(grid, &inside)
        }
        _ => (0..grid.len())
            .map(|k| {
                let [x, y] = grid.point(k);
                spec.rho(x, y).unwrap()
            })
            .collect(),
    };
    Ok(SignedDistanceField { grid: *grid, values, spec: spec.clone() })
}

/// Signed distance of a node mask: Euclidean distance transforms of both
/// phases, shifted by half a cell so that the zero level sits between nodes.
pub fn mask_signed_distance(grid: &Grid2D, inside: &[bool]) -> Vec<f64> {
    let d_out = edt(grid, &inside.iter().map(|&b| !b).collect::<Vec<_>>());
    let d_in = edt(grid, inside);
    let half = 0.5 * grid.dx.min(grid.dy);
    inside
        .iter()
        .enumerate()
        .map(|(k, &b)| if b { d_out[k] - half } else { -(d_in[k] - half) })
        .collect()
}

/// Exact Euclidean distance from every node to the nearest `seed` node
/// (separable lower-envelope transform, one pass per axis).
pub fn edt(grid: &Grid2D, seeds: &[bool]) -> Vec<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let inf = 1e30;
    let mut f: Vec<f64> = seeds.iter().map(|&s| if s { 0.0 } else { inf }).collect();
    let mut buf = vec![0.0; nx.max(ny)];
    let mut out = vec![0.0; nx.max(ny)];
    for i in 0..nx {
        for j in 0..ny {
            buf[j] = f[grid.idx(i, j)];
        }
        dt1d(&buf[..ny], grid.dy, &mut out[..ny]);
        for j in 0..ny {
            f[grid.idx(i, j)] = out[j];
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            buf[i] = f[grid.idx(i, j)];
        }
        dt1d(&buf[..nx], grid.dx, &mut out[..nx]);
        for i in 0..nx {
            f[grid.idx(i, j)] = out[i];
        }
    }
    f.iter().map(|v| if *v >= 0.5 * inf { f64::INFINITY } else { v.sqrt() }).collect()
}

// squared-distance transform of a sampled function along one axis
fn dt1d(f: &[f64], h: f64, d: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let pos = |q: usize| q as f64 * h;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + pos(q) * pos(q)) - (f[p] + pos(p) * pos(p))) / (2.0 * (pos(q) - pos(p)));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0: replace the first parabola
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < pos(q) {
            k += 1;
        }
        let dq = pos(q) - pos(v[k]);
        d[q] = dq * dq + f[v[k]];
    }
}

/// The quintic smoothstep in `s = t − 1`.
pub fn eta(t: f64) -> f64 {
    if t <= 1.0 {
        0.0
    } else if t >= 2.0 {
        1.0
    } else {
        let s = t - 1.0;
        s * s * s * (s * (6.0 * s - 15.0) + 10.0)
    }
}

pub fn eta_prime(t: f64) -> f64 {
    if t <= 1.0 || t >= 2.0 {
        0.0
    } else {
        let s = t - 1.0;
        30.0 * s * s * (s - 1.0) * (s - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutoffField {
    pub grid: Grid2D,
    pub delta: f64,
    pub values: Vec<f64>,
    /// Set when the transition band is thinner than two grid cells.
    pub under_resolved: bool,
}

impl CutoffField {
    /// `χ ≡ 1` (periodic cells, or no edge exclusion).
    pub fn ones(grid: Grid2D) -> Self {
        Self { grid, delta: 0.0, values: vec![1.0; grid.len()], under_resolved: false }
    }
}

pub fn cutoff_chi(sdf: &SignedDistanceField, delta: f64) -> Result<CutoffField> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("cutoff thickness must be positive, got {delta}")));
    }
    let h = sdf.grid.dx.max(sdf.grid.dy);
    let values = sdf.values.iter().map(|&r| eta(r.max(0.0) / delta)).collect();
    Ok(CutoffField { grid: sdf.grid, delta, values, under_resolved: delta < 2.0 * h })
}

/// Nodes of `D_δ = {ρ > δ}`.
pub fn erode(sdf: &SignedDistanceField, delta: f64) -> Vec<bool> {
    sdf.values.iter().map(|&r| r > delta).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    pub area: f64,
    pub perimeter: f64,
    pub area_uncertainty: f64,
    pub perimeter_uncertainty: f64,
}

pub fn measures(spec: &DomainSpec) -> Result<Measures> {
    spec.validate()?;
    let exact = |area, perimeter| Measures { area, perimeter, area_uncertainty: 0.0, perimeter_uncertainty: 0.0 };
    use std::f64::consts::PI;
    Ok(match &spec.shape {
        Shape::Disc { radius: r } => exact(PI * r * r, 2.0 * PI * r),
        Shape::Rectangle { width: w, height: h, corner_radius: r } => {
            exact(w * h - (4.0 - PI) * r * r, 2.0 * (w + h) - 8.0 * r + 2.0 * PI * r)
        }
        Shape::Annulus { r_in, r_out } => exact(PI * (r_out * r_out - r_in * r_in), 2.0 * PI * (r_in + r_out)),
        Shape::Mask { nx, ny, spacing, pixels } => {
            let (area, perim) = bitmap_measures(*nx, *ny, *spacing, pixels);
            // same measurement on the 2x coarsened bitmap
            let (cnx, cny) = (nx.div_ceil(2), ny.div_ceil(2));
            let mut coarse = vec![false; cnx * cny];
            for j in 0..cny {
                for i in 0..cnx {
                    let mut c = 0;
                    let mut t = 0;
                    for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                        let (ii, jj) = (2 * i + a, 2 * j + b);
                        if ii < *nx && jj < *ny {
                            t += 1;
                            c += pixels[jj * nx + ii] as usize;
                        }
                    }
                    coarse[j * cnx + i] = 2 * c >= t;
                }
            }
            let (ca, cp) = bitmap_measures(cnx, cny, 2.0 * spacing, &coarse);
            Measures { area, perimeter: perim, area_uncertainty: (area - ca).abs(), perimeter_uncertainty: (perim - cp).abs() }
        }
    })
}

fn bitmap_measures(nx: usize, ny: usize, spacing: f64, pixels: &[bool]) -> (f64, f64) {
    let area = pixels.iter().filter(|&&b| b).count() as f64 * spacing * spacing;
    // pad by one outside pixel on every side so the contour closes
    let g = Grid2D { nx: nx + 2, ny: ny + 2, dx: spacing, dy: spacing, origin: [0.0, 0.0] };
    let mut v = vec![-1.0; g.len()];
    for j in 0..ny {
        for i in 0..nx {
            if pixels[j * nx + i] {
                v[g.idx(i + 1, j + 1)] = 1.0;
            }
        }
    }
    (area, contour_length(&g, &v, 0.0))
}

/// Total length of the level set `{u = level}` by marching squares with
/// linear interpolation along cell edges. Saddles are resolved with the
/// cell-center average.
pub fn contour_length(grid: &Grid2D, values: &[f64], level: f64) -> f64 {
    let (dx, dy) = (grid.dx, grid.dy);
    let mut total = 0.0;
    for j in 0..grid.ny.saturating_sub(1) {
        for i in 0..grid.nx.saturating_sub(1) {
            let c = [
                values[grid.idx(i, j)] - level,
                values[grid.idx(i + 1, j)] - level,
                values[grid.idx(i + 1, j + 1)] - level,
                values[grid.idx(i, j + 1)] - level,
            ];
            let corners = [[0.0, 0.0], [dx, 0.0], [dx, dy], [0.0, dy]];
            let mut pts: Vec<[f64; 2]> = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (c[e], c[(e + 1) % 4]);
                if (a > 0.0) != (b > 0.0) {
                    let t = a / (a - b);
                    let (pa, pb) = (corners[e], corners[(e + 1) % 4]);
                    pts.push([pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]);
                }
            }
            let seg = |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]);
            match pts.len() {
                2 => total += seg(pts[0], pts[1]),
                4 => {
                    // crossings on edges 0,1,2,3 in order; pair according to the center sign
                    let center = 0.25 * (c[0] + c[1] + c[2] + c[3]);
                    if (center > 0.0) == (c[0] > 0.0) {
                        total += seg(pts[0], pts[1]) + seg(pts[2], pts[3]);
                    } else {
                        total += seg(pts[3], pts[0]) + seg(pts[1], pts[2]);
                    }
                }
                _ => {}
            }
        }
    }
    total
}

/// Reads a binary PGM (P5) bitmap. Pixels brighter than half the maximum are
/// inside. A comment line `# spacing <value>` sets the pixel size (default 1).
/// The first image row is the top (largest y).
pub fn read_pgm_mask(bytes: &[u8]) -> Result<Shape> {
    let mut pos = 0usize;
    let mut spacing = 1.0;
    let mut tokens = Vec::new();
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            return Err(Error::Format("truncated PGM header".into()));
        }
        if bytes[pos] == b'#' {
            let end = bytes[pos..].iter().position(|&b| b == b'\n').map_or(bytes.len(), |e| pos + e);
            let line = String::from_utf8_lossy(&bytes[pos + 1..end]);
            let mut it = line.split_whitespace();
            if it.next() == Some("spacing") {
                spacing = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Format(format!("bad spacing comment: {line}")))?;
            }
            pos = end;
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if tokens[0] != "P5" {
        return Err(Error::Format(format!("expected P5 magic, got {}", tokens[0])));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Format(format!("bad PGM header field '{s}'")));
    let (nx, ny, maxval) = (parse(&tokens[1])?, parse(&tokens[2])?, parse(&tokens[3])?);
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("bad PGM maxval {maxval}")));
    }
    pos += 1;
    let bpp = if maxval > 255 { 2 } else { 1 };
    let data = &bytes[pos.min(bytes.len())..];
    if data.len() < nx * ny * bpp {
        return Err(Error::Format(format!("PGM data has {} bytes, need {}", data.len(), nx * ny * bpp)));
    }
    let mut pixels = vec![false; nx * ny];
    for row in 0..ny {
        for i in 0..nx {
            let k = row * nx + i;
            let v = if bpp == 1 { data[k] as usize } else { (data[2 * k] as usize) << 8 | data[2 * k + 1] as usize };
            pixels[(ny - 1 - row) * nx + i] = 2 * v > maxval;
        }
    }
    Ok(Shape::Mask { nx, ny, spacing, pixels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_values() {
        assert_eq!(eta(0.5), 0.0);
        assert_eq!(eta(3.0), 1.0);
        assert!((eta(1.5) - 0.5).abs() < 1e-15);
        assert!((eta_prime(1.5) - 15.0 / 8.0).abs() < 1e-14);
    }

    #[test]
    fn disc_distances() {
        let d = DomainSpec::disc(1.0);
        assert_eq!(d.rho(0.0, 0.0), Some(1.0));
        assert_eq!(d.rho(2.0, 0.0), Some(-1.0));
    }

    #[test]
    fn rounded_corner_arc_is_on_boundary() {
        let d = DomainSpec::rectangle(2.0, 2.0, 0.2);
        let c = 1.0 - 0.2;
        let a = std::f64::consts::FRAC_PI_4;
        let rho = d.rho(c + 0.2 * a.cos(), c + 0.2 * a.sin()).unwrap();
        assert!(rho.abs() < 1e-14);
        assert!((d.rho(0.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((d.rho(0.0, 1.5).unwrap() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn rounded_rectangle_measures() {
        let m = measures(&DomainSpec::rectangle(2.0, 1.0, 0.1)).unwrap();
        let pi = std::f64::consts::PI;
        assert!((m.area - (2.0 - (4.0 - pi) * 0.01)).abs() < 1e-14);
        assert!((m.perimeter - (6.0 - 0.8 + 0.2 * pi)).abs() < 1e-14);
        assert!(measures(&DomainSpec::rectangle(2.0, 1.0, 0.0)).is_err());
        let a = measures(&DomainSpec::annulus(1.0, 2.0)).unwrap();
        assert!((a.area - 3.0 * pi).abs() < 1e-13 && (a.perimeter - 6.0 * pi).abs() < 1e-13);
    }

    #[test]
    fn coarse_grid_rejected() {
        let d = DomainSpec::disc(1.0);
        assert!(matches!(signed_distance(&d, &d.grid(0.6, 0.1)), Err(Error::GridTooCoarse { .. })));
        let g = Grid2D::centered(40, 0.5);
        assert!(matches!(signed_distance(&d, &g), Err(Error::GridTooSmall(_))));
    }

    #[test]
    fn cutoff_examples() {
        let d = DomainSpec::disc(1.0);
        let sdf = signed_distance(&d, &d.grid(0.02, 0.1)).unwrap();
        let delta = 0.1;
        let chi = cutoff_chi(&sdf, delta).unwrap();
        assert!(!chi.under_resolved);
        for (r, c) in sdf.values.iter().zip(&chi.values) {
            if *r <= delta {
                assert_eq!(*c, 0.0);
            }
            if *r >= 2.0 * delta {
                assert_eq!(*c, 1.0);
            }
        }
        assert!(cutoff_chi(&sdf, 0.03).unwrap().under_resolved);
        assert!(cutoff_chi(&sdf, 0.0).is_err());
    }

    #[test]
    fn erode_disc() {
        let d = DomainSpec::disc(1.0);
        let g = d.grid(0.02, 0.1);
        let sdf = signed_distance(&d, &g).unwrap();
        let m = erode(&sdf, 0.25);
        for k in 0..g.len() {
            let [x, y] = g.point(k);
            let r = x.hypot(y);
            if r < 0.75 - 0.02 {
                assert!(m[k]);
            }
            if r > 0.75 + 0.02 {
                assert!(!m[k]);
            }
        }
        assert!(erode(&sdf, 1.0).iter().all(|&b| !b));
        assert_eq!(erode(&sdf, 0.0), sdf.domain_mask());
    }

    #[test]
    fn mask_distance_matches_disc() {
        let d = DomainSpec::disc(1.0);
        let g = d.grid(0.02, 0.2);
        let exact = signed_distance(&d, &g).unwrap();
        let inside = exact.domain_mask();
        let approx = mask_signed_distance(&g, &inside);
        let worst = exact.values.iter().zip(&approx).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 0.03, "worst {worst}");
    }

    #[test]
    fn contour_of_disc_and_line() {
        let g = Grid2D::centered(200, 1.0);
        let v: Vec<f64> = (0..g.len())
            .map(|k| {
                let [x, y] = g.point(k);
                0.5 - x.hypot(y)
            })
            .collect();
        let l = contour_length(&g, &v, 0.0);
        assert!((l - std::f64::consts::PI).abs() < 2e-3, "{l}");
        let w: Vec<f64> = (0..g.len()).map(|k| if g.point(k)[0] > 0.0 { 1.0 } else { -1.0 }).collect();
        let l = contour_length(&g, &w, 0.0);
        assert!((l - (2.0 - g.dy)).abs() < 1e-12, "{l}");
    }

    #[test]
    fn pgm_mask_round_trip() {
        let mut bytes = b"P5\n# spacing 0.25\n4 3\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 255, 255, 0, 0, 255, 255, 0, 0, 0, 0, 0]);
        match read_pgm_mask(&bytes).unwrap() {
            Shape::Mask { nx, ny, spacing, pixels } => {
                assert_eq!((nx, ny, spacing), (4, 3, 0.25));
                assert!(pixels[2 * 4 + 1] && !pixels[1]);
            }
            _ => unreachable!(),
        }
    }
}
