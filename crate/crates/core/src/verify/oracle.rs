//! Brute-force references for the spectral operators. Both are quadratic or
//! worse in the node count and refuse large inputs.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Boundary, Field2D, Field3D};

/// `Σ' |m|⁻³` over the nonzero points of `ℤ²`.
pub const ZETA3: f64 = 9.033_621_683_100_950_5;
/// `Σ' |m|⁻¹` over `ℤ²`, by analytic continuation of the Epstein zeta function.
pub const ZETA1: f64 = -3.900_264_920_001_955_9;

pub const MAX_DIPOLAR_CELLS: usize = 32 * 32 * 4;
pub const MAX_H12_NODES: usize = 64 * 64;

/// Antiderivative of `1/√(u² + v² + z²)`, twice in `u` and twice in `v`.
fn panel_phi(u: f64, v: f64, z: f64) -> f64 {
    let (u, v, z) = (u.abs(), v.abs(), z.abs());
    let r = (u * u + v * v + z * z).sqrt();
    if r == 0.0 {
        return 0.0;
    }
    let mut s = -(u * u + v * v - 2.0 * z * z) * r / 6.0;
    let ruz = (u * u + z * z).sqrt();
    if ruz > 0.0 && v > 0.0 {
        s += 0.5 * (u * u - z * z) * v * (v / ruz).asinh();
    }
    let rvz = (v * v + z * z).sqrt();
    if rvz > 0.0 && u > 0.0 {
        s += 0.5 * (v * v - z * z) * u * (u / rvz).asinh();
    }
    if z > 0.0 {
        s -= u * v * z * (u * v / (z * r)).atan();
    }
    s
}

/// `∬ 1/|r − r′|` over two parallel `a × b` rectangles whose centers differ
/// by `(x, y, z)`.
pub fn panel_mutual(a: f64, b: f64, x: f64, y: f64, z: f64) -> f64 {
    const W: [(f64, f64); 3] = [(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)];
    let mut s = 0.0;
    for (i, wi) in W {
        for (j, wj) in W {
            s += wi * wj * panel_phi(x + i * a, y + j * b, z);
        }
    }
    s
}

/// Jump sheets `q_j = ψ_j − ψ_{j−1}`, `j = 0..=N_z`, masked.
fn sheets(stack: &Field3D) -> Vec<Vec<f64>> {
    let n = stack.grid.len();
    let nz = stack.nz();
    let layer = |l: isize| -> Vec<f64> {
        if l < 0 || l as usize >= nz {
            vec![0.0; n]
        } else {
            stack.layers[l as usize].iter().zip(&stack.mask).map(|(&v, &m)| if m { v } else { 0.0 }).collect()
        }
    };
    (0..=nz as isize)
        .map(|j| {
            let (a, b) = (layer(j), layer(j - 1));
            a.iter().zip(&b).map(|(x, y)| x - y).collect()
        })
        .collect()
}

/// `E_d = (1/4π) Σ q q′ ∬ 1/|r − r′|` with every pixel of every jump sheet a
/// uniformly charged rectangle. Free space, no images.
pub fn brute_force_dipolar(stack: &Field3D) -> Result<f64> {
    let g = stack.grid;
    let cells = g.len() * stack.nz();
    if cells > MAX_DIPOLAR_CELLS {
        return Err(Error::SizeCap(format!("{cells} cells, the direct sum takes at most {MAX_DIPOLAR_CELLS}")));
    }
    if stack.boundary == Boundary::Periodic {
        return Err(Error::InvalidParameter("the direct sum is for compactly supported stacks".into()));
    }
    let q = sheets(stack);
    let t = stack.layer_thickness();
    let (nx, ny) = (g.nx as isize, g.ny as isize);
    let wx = 2 * nx - 1;
    // kernel table by sheet separation and pixel offset
    let table: Vec<Vec<f64>> = (0..q.len())
        .map(|dz| {
            let mut k = vec![0.0; (wx * (2 * ny - 1)) as usize];
            for dj in -(ny - 1)..ny {
                for di in -(nx - 1)..nx {
                    k[((dj + ny - 1) * wx + di + nx - 1) as usize] =
                        panel_mutual(g.dx, g.dy, di as f64 * g.dx, dj as f64 * g.dy, dz as f64 * t);
                }
            }
            k
        })
        .collect();
    let support: Vec<Vec<(isize, isize, f64)>> = q
        .iter()
        .map(|s| {
            s.iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(k, &v)| ((k % g.nx) as isize, (k / g.nx) as isize, v))
                .collect()
        })
        .collect();
    let mut e = 0.0;
    for (a, sa) in support.iter().enumerate() {
        for (b, sb) in support.iter().enumerate() {
            let k = &table[a.abs_diff(b)];
            for &(i, j, va) in sa {
                for &(i2, j2, vb) in sb {
                    e += va * vb * k[((j2 - j + ny - 1) * wx + i2 - i + nx - 1) as usize];
                }
            }
        }
    }
    Ok(e / (4.0 * PI))
}

/// `(1/4π) ∬ (u(r) − u(r′))² / |r − r′|³` by a lattice sum over node pairs.
///
/// The bare lattice sum differs from the integral by `ζ(1)·h/(8π)` times the
/// Dirichlet integral at leading order, where `ζ(1) = ZETA1`; that term is
/// added back, leaving an `O(h³)` error for smooth fields. Open fields vanish
/// off the grid; periodic fields repeat, and there the sum runs over a window
/// of neighbouring cells with the remaining lattice tail closed by the mean.
pub fn brute_force_h12(field: &Field2D) -> Result<f64> {
    let g = field.grid;
    if g.len() > MAX_H12_NODES {
        return Err(Error::SizeCap(format!("{} nodes, the direct sum takes at most {MAX_H12_NODES}", g.len())));
    }
    if (g.dx - g.dy).abs() > 1e-12 * g.dx {
        return Err(Error::InvalidParameter("the lattice sum needs square cells".into()));
    }
    field.check_finite()?;
    let h = g.dx;
    let u: Vec<f64> = field.values.iter().zip(&field.mask).map(|(&v, &m)| if m { v } else { 0.0 }).collect();
    let (nx, ny) = (g.nx as isize, g.ny as isize);
    let at = |i: isize, j: isize| u[(j * nx + i) as usize];
    let c0: f64 = u.iter().map(|v| v * v).sum();
    let mut s;
    let dirichlet;
    match field.boundary {
        Boundary::Open => {
            let mut cross = 0.0;
            for dj in -(ny - 1)..ny {
                for di in -(nx - 1)..nx {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let mut c = 0.0;
                    for j in 0.max(-dj)..ny.min(ny - dj) {
                        for i in 0.max(-di)..nx.min(nx - di) {
                            c += at(i, j) * at(i + di, j + dj);
                        }
                    }
                    cross += c / ((di * di + dj * dj) as f64).powf(1.5);
                }
            }
            s = ZETA3 * c0 - cross;
            let mut d = 0.0;
            for j in -1..ny {
                for i in -1..nx {
                    let v = |a: isize, b: isize| if a >= 0 && b >= 0 && a < nx && b < ny { at(a, b) } else { 0.0 };
                    d += (v(i + 1, j) - v(i, j)).powi(2) * f64::from(j >= 0);
                    d += (v(i, j + 1) - v(i, j)).powi(2) * f64::from(i >= 0);
                }
            }
            dirichlet = d;
        }
        Boundary::Periodic => {
            let reps = 3;
            let mean = u.iter().sum::<f64>() / u.len() as f64;
            let mut window = 0.0;
            s = 0.0;
            for dj in -reps * ny..=reps * ny {
                for di in -reps * nx..=reps * nx {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let w = 1.0 / ((di * di + dj * dj) as f64).powf(1.5);
                    let mut c = 0.0;
                    for j in 0..ny {
                        for i in 0..nx {
                            c += at(i, j) * at((i + di).rem_euclid(nx), (j + dj).rem_euclid(ny));
                        }
                    }
                    s += w * (c0 - c);
                    window += w;
                }
            }
            s += (ZETA3 - window) * (c0 - u.len() as f64 * mean * mean);
            let mut d = 0.0;
            for j in 0..ny {
                for i in 0..nx {
                    d += (at((i + 1) % nx, j) - at(i, j)).powi(2);
                    d += (at(i, (j + 1) % ny) - at(i, j)).powi(2);
                }
            }
            dirichlet = d;
        }
    }
    s *= 2.0 * h / (4.0 * PI);
    Ok(s - ZETA1 * h / (8.0 * PI) * dirichlet)
}
