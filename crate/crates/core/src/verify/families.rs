//! Field families the inequalities are exercised on. Every family stays
//! within `[−1, 1]` and is zero off the mask.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::grid::{Field2D, Field3D, Grid2D};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Uniform { value: f64 },
    /// `cos(k·r + phase)`.
    SingleMode { k: [f64; 2], phase: f64 },
    /// `tanh(d/(√2 w))` with `d` the signed distance to the nearest stripe
    /// boundary, stripes normal to `x`.
    TanhStripes { period: f64, width: f64 },
    /// `1 − 2s` with `s` a smoothed indicator of the disc of `radius` about
    /// the origin, the step spread over `±width`.
    MollifiedDisc { radius: f64, width: f64 },
    /// A few random modes with `|k| ≤ kmax`, scaled to unit sup norm.
    BandLimited { kmax: f64, seed: u64 },
    /// Independent uniform samples in `[−1, 1]`.
    Rough { seed: u64 },
}

/// `0` below `−1`, `1` above `1`, quintic and `C²` in between.
pub fn smoothstep(t: f64) -> f64 {
    let s = (0.5 * (t + 1.0)).clamp(0.0, 1.0);
    s * s * s * (s * (6.0 * s - 15.0) + 10.0)
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Uniform { .. } => "uniform",
            Family::SingleMode { .. } => "single_mode",
            Family::TanhStripes { .. } => "tanh_stripes",
            Family::MollifiedDisc { .. } => "mollified_disc",
            Family::BandLimited { .. } => "band_limited",
            Family::Rough { .. } => "rough",
        }
    }

    pub fn label(&self) -> String {
        match self {
            Family::Uniform { value } => format!("uniform({value})"),
            Family::SingleMode { k, phase } => format!("single_mode(k=[{:.3},{:.3}],phase={phase:.3})", k[0], k[1]),
            Family::TanhStripes { period, width } => format!("tanh_stripes(L={period},w={width})"),
            Family::MollifiedDisc { radius, width } => format!("mollified_disc(R={radius},w={width})"),
            Family::BandLimited { kmax, seed } => format!("band_limited(kmax={kmax},seed={seed})"),
            Family::Rough { seed } => format!("rough(seed={seed})"),
        }
    }

    pub fn values(&self, grid: &Grid2D, mask: &[bool]) -> Vec<f64> {
        let mut out = vec![0.0; grid.len()];
        match self {
            Family::BandLimited { kmax, seed } => {
                let mut rng = SplitMix64::new(*seed);
                let modes: Vec<[f64; 3]> = (0..8)
                    .map(|_| {
                        let k = kmax * rng.next_f64().sqrt();
                        let a = 2.0 * PI * rng.next_f64();
                        [k * a.cos(), k * a.sin(), 2.0 * PI * rng.next_f64()]
                    })
                    .collect();
                for k in 0..grid.len() {
                    let [x, y] = grid.point(k);
                    out[k] = modes.iter().map(|m| (m[0] * x + m[1] * y + m[2]).cos()).sum();
                }
                let max = out.iter().zip(mask).filter(|(_, &m)| m).map(|(v, _)| v.abs()).fold(0.0, f64::max);
                if max > 0.0 {
                    out.iter_mut().for_each(|v| *v /= max);
                }
            }
            Family::Rough { seed } => {
                let mut rng = SplitMix64::new(*seed);
                out.iter_mut().for_each(|v| *v = rng.uniform(-1.0, 1.0));
            }
            _ => {
                for k in 0..grid.len() {
                    let [x, y] = grid.point(k);
                    out[k] = self.at(x, y);
                }
            }
        }
        for (v, &m) in out.iter_mut().zip(mask) {
            if !m {
                *v = 0.0;
            }
        }
        out
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        match self {
            Family::Uniform { value } => *value,
            Family::SingleMode { k, phase } => (k[0] * x + k[1] * y + phase).cos(),
            Family::TanhStripes { period, width } => {
                let t = x.rem_euclid(*period);
                let half = 0.5 * period;
                let d = if t < half { t.min(half - t) } else { -(t - half).min(period - t) };
                (d / (2f64.sqrt() * width)).tanh()
            }
            Family::MollifiedDisc { radius, width } => 1.0 - 2.0 * smoothstep((radius - x.hypot(y)) / width),
            Family::BandLimited { .. } | Family::Rough { .. } => unreachable!("sampled per grid"),
        }
    }

    pub fn field(&self, grid: Grid2D, mask: Vec<bool>) -> Field2D {
        let values = self.values(&grid, &mask);
        Field2D { grid, values, mask, boundary: crate::grid::Boundary::Open }
    }
}

/// Multiplies by a radial envelope equal to 1 inside `radius − width` and 0
/// beyond `radius`.
pub fn with_envelope(field: &mut Field2D, radius: f64, width: f64) {
    for k in 0..field.grid.len() {
        let [x, y] = field.grid.point(k);
        field.values[k] *= smoothstep(2.0 * (radius - x.hypot(y)) / width - 1.0);
    }
}

/// `N_z` layers drawn independently, `base` shared plus `spread` of rough
/// noise per layer, clamped to `[−1, 1]`.
pub fn random_stack(grid: Grid2D, mask: Vec<bool>, thickness: f64, nz: usize, seed: u64, base: &Family, spread: f64) -> Field3D {
    let b = base.values(&grid, &mask);
    let mut rng = SplitMix64::new(seed ^ 0x5eed);
    let layers = (0..nz)
        .map(|_| {
            b.iter()
                .zip(&mask)
                .map(|(&v, &m)| if m { (v + spread * rng.uniform(-1.0, 1.0)).clamp(-1.0, 1.0) } else { 0.0 })
                .collect()
        })
        .collect();
    Field3D::from_layers(grid, mask, thickness, layers).expect("nonempty layers")
}
