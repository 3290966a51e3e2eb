//! Initial fields for the minimizers, registered by name.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::rng::SplitMix64;

/// Parameters shared by all initial-field families; each family reads the
/// ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitSpec {
    pub name: String,
    #[serde(default = "one")]
    pub value: f64,
    #[serde(default = "quarter")]
    pub period: f64,
    /// Stripe normal direction in radians.
    #[serde(default)]
    pub angle: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "tenth")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}
fn quarter() -> f64 {
    0.25
}
fn tenth() -> f64 {
    0.1
}

impl InitSpec {
    pub fn named(name: &str) -> Self {
        Self { name: name.into(), value: 1.0, period: 0.25, angle: 0.0, seed: 0, amplitude: 0.1 }
    }

    pub fn uniform(value: f64) -> Self {
        Self { value, ..Self::named("uniform") }
    }

    pub fn stripes(period: f64, angle: f64) -> Self {
        Self { period, angle, ..Self::named("stripes") }
    }

    pub fn checkerboard(period: f64) -> Self {
        Self { period, ..Self::named("checkerboard") }
    }

    /// A reversed disc of diameter `period` about the origin.
    pub fn bubble(period: f64) -> Self {
        Self { period, ..Self::named("bubble") }
    }

    pub fn random(seed: u64, amplitude: f64) -> Self {
        Self { seed, amplitude, ..Self::named("random") }
    }
}

impl Default for InitSpec {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

pub trait InitStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    /// Node values on `grid`; nodes outside `mask` are zero.
    fn build(&self, grid: &Grid2D, mask: &[bool], spec: &InitSpec) -> Vec<f64>;
}

struct Uniform;
struct Stripes;
struct Checkerboard;
struct Random;
struct Bubble;

fn fill(grid: &Grid2D, mask: &[bool], mut f: impl FnMut(f64, f64) -> f64) -> Vec<f64> {
    (0..grid.len())
        .map(|k| {
            if mask[k] {
                let [x, y] = grid.point(k);
                f(x, y)
            } else {
                0.0
            }
        })
        .collect()
}

fn square_wave(s: f64) -> f64 {
    if s.rem_euclid(1.0) < 0.5 {
        1.0
    } else {
        -1.0
    }
}

impl InitStrategy for Uniform {
    fn name(&self) -> &'static str {
        "uniform"
    }
    fn build(&self, grid: &Grid2D, mask: &[bool], spec: &InitSpec) -> Vec<f64> {
        fill(grid, mask, |_, _| spec.value)
    }
}

impl InitStrategy for Stripes {
    fn name(&self) -> &'static str {
        "stripes"
    }
    fn build(&self, grid: &Grid2D, mask: &[bool], spec: &InitSpec) -> Vec<f64> {
        let (c, s) = (spec.angle.cos(), spec.angle.sin());
        fill(grid, mask, |x, y| square_wave((c * x + s * y) / spec.period + 0.25))
    }
}

impl InitStrategy for Checkerboard {
    fn name(&self) -> &'static str {
        "checkerboard"
    }
    fn build(&self, grid: &Grid2D, mask: &[bool], spec: &InitSpec) -> Vec<f64> {
        fill(grid, mask, |x, y| square_wave(x / spec.period + 0.25) * square_wave(y / spec.period + 0.25))
    }
}

impl InitStrategy for Random {
    fn name(&self) -> &'static str {
        "random"
    }
    fn build(&self, grid: &Grid2D, mask: &[bool], spec: &InitSpec) -> Vec<f64> {
        let mut rng = SplitMix64::new(spec.seed);
        // one draw per node, inside or not, so the pattern does not depend on the mask
        (0..grid.len())
            .map(|k| {
                let v = rng.uniform(-spec.amplitude, spec.amplitude);
                if mask[k] {
                    v
                } else {
                    0.0
                }
            })
            .collect()
    }
}

impl InitStrategy for Bubble {
    fn name(&self) -> &'static str {
        "bubble"
    }
    fn build(&self, grid: &Grid2D, mask: &[bool], spec: &InitSpec) -> Vec<f64> {
        let r = 0.5 * spec.period;
        fill(grid, mask, |x, y| if x.hypot(y) < r { -spec.value } else { spec.value })
    }
}

pub struct InitRegistry {
    entries: Vec<Box<dyn InitStrategy>>,
}

impl InitRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn register(&mut self, s: Box<dyn InitStrategy>) {
        self.entries.retain(|e| e.name() != s.name());
        self.entries.push(s);
    }

    pub fn get(&self, name: &str) -> Result<&dyn InitStrategy> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::Unknown { kind: "init", name: name.into() })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn build(&self, grid: &Grid2D, mask: &[bool], spec: &InitSpec) -> Result<Vec<f64>> {
        Ok(self.get(&spec.name)?.build(grid, mask, spec))
    }
}

impl Default for InitRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Uniform));
        r.register(Box::new(Stripes));
        r.register(Box::new(Checkerboard));
        r.register(Box::new(Random));
        r.register(Box::new(Bubble));
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lookup() {
        let r = InitRegistry::default();
        assert_eq!(r.names(), vec!["uniform", "stripes", "checkerboard", "random", "bubble"]);
        assert!(matches!(r.get("spiral"), Err(Error::Unknown { .. })));
        let g = Grid2D::centered(8, 1.0);
        let m = vec![true; 64];
        let s = r.build(&g, &m, &InitSpec::stripes(1.0, 0.0)).unwrap();
        assert!(s.iter().all(|v| v.abs() == 1.0));
        assert!(s.iter().any(|&v| v < 0.0));
        let a = r.build(&g, &m, &InitSpec::random(5, 0.1)).unwrap();
        assert_eq!(a, r.build(&g, &m, &InitSpec::random(5, 0.1)).unwrap());
        assert!(a.iter().all(|v| v.abs() <= 0.1));
    }
}
