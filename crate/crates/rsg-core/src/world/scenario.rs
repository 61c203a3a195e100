//! Built-in synthetic scenarios and the scenario file format.
//!
//! A scenario file is TOML:
//!
//! ```toml
//! name = "z-tunnel"
//! d = 3
//! resolution = 0.001
//! start = [0.1, 0.1, 0.1]
//! goal = [0.9, 0.9, 0.9]
//!
//! [[obstacles]]
//! lo = [0.0, 0.3, 0.0]
//! hi = [0.75, 0.4, 1.0]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Aabb, World, DEFAULT_RESOLUTION};
use crate::error::{Error, Result};
use crate::geometry::Point;

pub const SCENARIO_NAMES: [&str; 3] = ["empty", "z-tunnel", "grid-of-boxes"];

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub world: World,
    pub start: Point,
    pub goal: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub name: String,
    pub d: usize,
    pub resolution: f64,
    pub start: Vec<f64>,
    pub goal: Vec<f64>,
    #[serde(default)]
    pub obstacles: Vec<BoxSpec>,
}

impl Scenario {
    pub fn new(name: impl Into<String>, world: World, start: Point, goal: Point) -> Result<Self> {
        for (label, p) in [("start", &start), ("goal", &goal)] {
            if !p.coords().iter().all(|x| (0.0..=1.0).contains(x)) {
                return Err(Error::InvalidArgument(format!("{label} lies outside the unit cube")));
            }
            if !world.is_free(p.coords())? {
                return Err(Error::InvalidArgument(format!("{label} is inside an obstacle")));
            }
        }
        Ok(Scenario { name: name.into(), world, start, goal })
    }

    pub fn to_file(&self) -> ScenarioFile {
        ScenarioFile {
            name: self.name.clone(),
            d: self.world.dim(),
            resolution: self.world.resolution(),
            start: self.start.0.clone(),
            goal: self.goal.0.clone(),
            obstacles: self.world.obstacles().iter().map(|b| BoxSpec { lo: b.lo.clone(), hi: b.hi.clone() }).collect(),
        }
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        let obstacles = file.obstacles.into_iter().map(|b| Aabb::new(b.lo, b.hi)).collect::<Result<Vec<_>>>()?;
        let world = World::new(file.d, obstacles, file.resolution)?;
        Scenario::new(file.name, world, Point(file.start), Point(file.goal))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("scenario serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Scenario::from_file(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Scenario::from_toml(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml()).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// Straight-line distance from start to goal.
    pub fn straight_line(&self) -> f64 {
        crate::geometry::dist_unchecked(self.start.coords(), self.goal.coords())
    }
}

/// Builds one of [`SCENARIO_NAMES`] in dimension `d`.
///
/// * `empty`: no obstacles, start `(0.1, ..)`, goal `(0.9, ..)`.
/// * `z-tunnel`: two offset walls and a floor bump in the first two axes,
///   extruded through the rest. The free corridor zig-zags right, up through
///   the gap at `x > 0.75`, left, up through the gap at `x < 0.25`, then right.
///   Needs `d >= 2`.
/// * `grid-of-boxes`: a `3^k` lattice of cubes of side 0.2 over the first
///   `k = min(d, 3)` axes, extruded through the rest. Start `(0.05, ..)`,
///   goal `(0.95, ..)`; the diagonal between them hits the center cube.
pub fn make_scenario(name: &str, d: usize) -> Result<Scenario> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    match name {
        "empty" => Scenario::new(name, World::empty(d)?, Point::splat(d, 0.1), Point::splat(d, 0.9)),
        "z-tunnel" => z_tunnel(d),
        "grid-of-boxes" => grid_of_boxes(d, 3, 0.2),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

fn slab(d: usize, x: (f64, f64), y: (f64, f64)) -> Result<Aabb> {
    let mut lo = vec![0.0; d];
    let mut hi = vec![1.0; d];
    (lo[0], hi[0]) = x;
    (lo[1], hi[1]) = y;
    Aabb::new(lo, hi)
}

fn z_tunnel(d: usize) -> Result<Scenario> {
    if d < 2 {
        return Err(Error::InvalidArgument("z-tunnel needs at least two dimensions".into()));
    }
    let obstacles =
        vec![slab(d, (0.0, 0.75), (0.3, 0.4))?, slab(d, (0.25, 1.0), (0.6, 0.7))?, slab(d, (0.4, 0.6), (0.0, 0.2))?];
    let world = World::new(d, obstacles, DEFAULT_RESOLUTION)?;
    Scenario::new("z-tunnel", world, Point::splat(d, 0.1), Point::splat(d, 0.9))
}

/// `k^min(d,3)` cubes of side `side` centered on the lattice `(i + 1/2) / k`.
pub fn grid_of_boxes(d: usize, k: usize, side: f64) -> Result<Scenario> {
    if k == 0 || !(side > 0.0 && side < 1.0 / k as f64) {
        return Err(Error::InvalidParameter(format!("need k >= 1 and 0 < side < 1/k, got k={k}, side={side}")));
    }
    let axes = d.min(3);
    let mut obstacles = Vec::with_capacity(k.pow(axes as u32));
    for code in 0..k.pow(axes as u32) {
        let mut lo = vec![0.0; d];
        let mut hi = vec![1.0; d];
        let mut c = code;
        for a in 0..axes {
            let center = ((c % k) as f64 + 0.5) / k as f64;
            c /= k;
            lo[a] = center - side / 2.0;
            hi[a] = center + side / 2.0;
        }
        obstacles.push(Aabb::new(lo, hi)?);
    }
    let world = World::new(d, obstacles, DEFAULT_RESOLUTION)?;
    Scenario::new("grid-of-boxes", world, Point::splat(d, 0.05), Point::splat(d, 0.95))
}
