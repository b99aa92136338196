//! 2-D particle dynamics driven by a multiplex network.
//!
//! Each layer contributes one force law acting along its edges: springs for
//! pairwise layers, softened repulsive charges for collective layers (whose
//! edges form the clique on the charged set). Integration is velocity Verlet
//! with unit masses.
//!
//! Per-particle force totals are produced by sorting the contribution list
//! by IEEE bit pattern before summing. Force laws are written as
//! scalar-times-difference-vector, so flipping the edge orientation negates
//! the contribution bit-exactly; together these make a simulation commute
//! with vertex relabeling exactly, not just to rounding error.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphKind;
use crate::multiplex::MultiplexNetwork;

pub const DEFAULT_DT: f64 = 0.001;
pub const DEFAULT_SUBSAMPLE: usize = 100;
pub const DEFAULT_FRAMES: usize = 70;
pub const DEFAULT_POS_STD: f64 = 0.5;
pub const DEFAULT_VEL_NORM: f64 = 0.5;
pub const DEFAULT_SPRING_K: f64 = 0.1;
pub const DEFAULT_FINITE_SPRING_K: f64 = 0.1;
pub const DEFAULT_FINITE_SPRING_LEN: f64 = 1.0;
pub const DEFAULT_CHARGE_STRENGTH: f64 = 1.0;
pub const DEFAULT_SOFTENING: f64 = 0.1;

/// Force law attached to one layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ForceKind {
    /// Ideal spring with zero rest length: F_i = -k (r_i - r_j).
    Spring { k: f64 },
    /// Spring with rest length `length`: F_i = -k (|d| - length) d/|d|.
    FiniteSpring { k: f64, length: f64 },
    /// Softened repulsion: F_i = strength * d / (|d| * max(|d|, softening)^2).
    Charge { strength: f64 },
}

impl ForceKind {
    pub fn default_for(kind: GraphKind) -> ForceKind {
        match kind {
            GraphKind::Pairwise => ForceKind::Spring { k: DEFAULT_SPRING_K },
            GraphKind::Collective => ForceKind::Charge {
                strength: DEFAULT_CHARGE_STRENGTH,
            },
        }
    }

    fn compatible_with(&self, kind: GraphKind) -> bool {
        match self {
            ForceKind::Spring { .. } | ForceKind::FiniteSpring { .. } => {
                kind == GraphKind::Pairwise
            }
            ForceKind::Charge { .. } => kind == GraphKind::Collective,
        }
    }
}

/// Simulation parameters, including one force law per network layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    /// Integration steps between recorded frames.
    pub subsample: usize,
    /// Recorded frames, including the initial state.
    pub n_frames: usize,
    pub pos_std: f64,
    pub vel_norm: f64,
    pub softening: f64,
    /// Reflecting square box spanning [-box_half, box_half] per axis.
    pub box_half: Option<f64>,
    pub forces: Vec<ForceKind>,
}

impl SimConfig {
    pub fn for_kinds(kinds: &[GraphKind]) -> SimConfig {
        SimConfig {
            dt: DEFAULT_DT,
            subsample: DEFAULT_SUBSAMPLE,
            n_frames: DEFAULT_FRAMES,
            pos_std: DEFAULT_POS_STD,
            vel_norm: DEFAULT_VEL_NORM,
            softening: DEFAULT_SOFTENING,
            box_half: None,
            forces: kinds.iter().map(|&k| ForceKind::default_for(k)).collect(),
        }
    }

    pub fn validate_for(&self, network: &MultiplexNetwork) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.subsample == 0 || self.n_frames == 0 {
            return Err(Error::invalid("subsample and n_frames must be positive"));
        }
        if !(self.softening > 0.0) {
            return Err(Error::invalid("softening must be positive"));
        }
        if let Some(b) = self.box_half {
            if !(b > 0.0) {
                return Err(Error::invalid("box_half must be positive"));
            }
        }
        if self.forces.len() != network.layer_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} force laws for {} layers",
                self.forces.len(),
                network.layer_count()
            )));
        }
        for (li, (force, layer)) in self.forces.iter().zip(network.layers()).enumerate() {
            if !force.compatible_with(layer.kind()) {
                return Err(Error::invalid(format!(
                    "layer {li} is {} but its force law is {force:?}",
                    layer.kind().name()
                )));
            }
        }
        Ok(())
    }
}

pub type Vec2 = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConditions {
    pub positions: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
}

impl InitialConditions {
    pub fn new(positions: Vec<Vec2>, velocities: Vec<Vec2>) -> Result<Self> {
        if positions.len() != velocities.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} positions vs {} velocities",
                positions.len(),
                velocities.len()
            )));
        }
        Ok(InitialConditions {
            positions,
            velocities,
        })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    /// Moves particle i to slot p(i).
    pub fn relabel(&self, p: &crate::perm::Permutation) -> InitialConditions {
        let n = self.n();
        let mut positions = vec![[0.0; 2]; n];
        let mut velocities = vec![[0.0; 2]; n];
        for i in 0..n {
            positions[p.image(i)] = self.positions[i];
            velocities[p.image(i)] = self.velocities[i];
        }
        InitialConditions {
            positions,
            velocities,
        }
    }
}

/// Positions ~ N(0, pos_std) per coordinate; velocities are uniformly random
/// directions scaled to norm vel_norm.
pub fn sample_initial_conditions(
    n: usize,
    cfg: &SimConfig,
    rng: &mut impl Rng,
) -> InitialConditions {
    let mut positions = Vec::with_capacity(n);
    let mut velocities = Vec::with_capacity(n);
    for _ in 0..n {
        let px: f64 = rng.sample(StandardNormal);
        let py: f64 = rng.sample(StandardNormal);
        positions.push([px * cfg.pos_std, py * cfg.pos_std]);
        let mut vx: f64 = rng.sample(StandardNormal);
        let mut vy: f64 = rng.sample(StandardNormal);
        let norm = (vx * vx + vy * vy).sqrt();
        if norm < 1e-12 {
            vx = 1.0;
            vy = 0.0;
        } else {
            vx /= norm;
            vy /= norm;
        }
        velocities.push([vx * cfg.vel_norm, vy * cfg.vel_norm]);
    }
    InitialConditions {
        positions,
        velocities,
    }
}

/// Scalar multiplier s such that the force on i from j is s * (r_i - r_j).
/// Depends on the pair only through |d|, so flipping the edge orientation
/// negates the contribution exactly.
fn force_scale(force: &ForceKind, dist: f64, softening: f64) -> f64 {
    match *force {
        ForceKind::Spring { k } => -k,
        ForceKind::FiniteSpring { k, length } => {
            if dist < 1e-12 {
                0.0 // direction undefined for coincident particles
            } else {
                -k * (dist - length) / dist
            }
        }
        ForceKind::Charge { strength } => {
            if dist < 1e-12 {
                0.0
            } else {
                let eff = dist.max(softening);
                strength / (dist * eff * eff)
            }
        }
    }
}

fn contribution_key(f: &Vec2) -> (u64, u64) {
    (f[0].to_bits(), f[1].to_bits())
}

/// Net force on every particle, summed in a label-independent order.
pub fn forces(network: &MultiplexNetwork, positions: &[Vec2], cfg: &SimConfig) -> Vec<Vec2> {
    let n = network.n();
    let mut contribs: Vec<Vec<Vec2>> = vec![Vec::new(); n];
    for (layer, force) in network.layers().iter().zip(&cfg.forces) {
        for (i, j) in layer.edges() {
            let d = [
                positions[i][0] - positions[j][0],
                positions[i][1] - positions[j][1],
            ];
            let dist = (d[0] * d[0] + d[1] * d[1]).sqrt();
            let s = force_scale(force, dist, cfg.softening);
            let f = [s * d[0], s * d[1]];
            contribs[i].push(f);
            contribs[j].push([-f[0], -f[1]]);
        }
    }
    contribs
        .into_iter()
        .map(|mut list| {
            list.sort_by_key(contribution_key);
            let mut total = [0.0, 0.0];
            for f in list {
                total[0] += f[0];
                total[1] += f[1];
            }
            total
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryFrame {
    pub positions: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n: usize,
    pub frames: Vec<TrajectoryFrame>,
}

impl Trajectory {
    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }
}

fn reflect(positions: &mut [Vec2], velocities: &mut [Vec2], b: f64) {
    for (pos, vel) in positions.iter_mut().zip(velocities.iter_mut()) {
        for d in 0..2 {
            // mirror until inside; handles multi-box overshoots
            while pos[d] < -b || pos[d] > b {
                if pos[d] > b {
                    pos[d] = 2.0 * b - pos[d];
                } else {
                    pos[d] = -2.0 * b - pos[d];
                }
                vel[d] = -vel[d];
            }
        }
    }
}

/// Velocity Verlet (kick-drift-kick) for `(n_frames - 1) * subsample` steps,
/// recording every `subsample`-th state. Frame 0 is the initial state.
pub fn simulate(
    network: &MultiplexNetwork,
    init: &InitialConditions,
    cfg: &SimConfig,
) -> Result<Trajectory> {
    cfg.validate_for(network)?;
    if init.n() != network.n() {
        return Err(Error::ShapeMismatch(format!(
            "{} particles vs {} vertices",
            init.n(),
            network.n()
        )));
    }
    let n = network.n();
    let mut pos = init.positions.clone();
    let mut vel = init.velocities.clone();
    let mut frames = Vec::with_capacity(cfg.n_frames);
    frames.push(TrajectoryFrame {
        positions: pos.clone(),
        velocities: vel.clone(),
    });
    let half = 0.5 * cfg.dt;
    let mut f = forces(network, &pos, cfg);
    let mut step = 0usize;
    for _ in 1..cfg.n_frames {
        for _ in 0..cfg.subsample {
            step += 1;
            for i in 0..n {
                vel[i][0] += half * f[i][0];
                vel[i][1] += half * f[i][1];
                pos[i][0] += cfg.dt * vel[i][0];
                pos[i][1] += cfg.dt * vel[i][1];
            }
            if let Some(b) = cfg.box_half {
                reflect(&mut pos, &mut vel, b);
            }
            f = forces(network, &pos, cfg);
            for i in 0..n {
                vel[i][0] += half * f[i][0];
                vel[i][1] += half * f[i][1];
            }
            for p in &pos {
                if !p[0].is_finite() || !p[1].is_finite() {
                    return Err(Error::invalid(format!(
                        "simulation diverged: non-finite position at step {step}"
                    )));
                }
            }
        }
        frames.push(TrajectoryFrame {
            positions: pos.clone(),
            velocities: vel.clone(),
        });
    }
    Ok(Trajectory { n, frames })
}

fn pair_potential(force: &ForceKind, dist: f64, softening: f64) -> f64 {
    match *force {
        ForceKind::Spring { k } => 0.5 * k * dist * dist,
        ForceKind::FiniteSpring { k, length } => {
            let x = dist - length;
            0.5 * k * x * x
        }
        ForceKind::Charge { strength } => {
            if dist >= softening {
                strength / dist
            } else {
                // constant-force region: linear continuation of the potential
                strength / softening + strength * (softening - dist) / (softening * softening)
            }
        }
    }
}

/// Kinetic plus pairwise potential energy of a state.
pub fn total_energy(
    network: &MultiplexNetwork,
    positions: &[Vec2],
    velocities: &[Vec2],
    cfg: &SimConfig,
) -> f64 {
    let mut e = 0.0;
    for v in velocities {
        e += 0.5 * (v[0] * v[0] + v[1] * v[1]);
    }
    for (layer, force) in network.layers().iter().zip(&cfg.forces) {
        for (i, j) in layer.edges() {
            let dx = positions[i][0] - positions[j][0];
            let dy = positions[i][1] - positions[j][1];
            e += pair_potential(force, (dx * dx + dy * dy).sqrt(), cfg.softening);
        }
    }
    e
}

/// Writes `frame,particle,px,py,vx,vy` rows.
pub fn write_trajectory_csv(w: &mut impl std::io::Write, t: &Trajectory) -> Result<()> {
    writeln!(w, "frame,particle,px,py,vx,vy")?;
    for (fi, frame) in t.frames.iter().enumerate() {
        for i in 0..t.n {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fi,
                i,
                frame.positions[i][0],
                frame.positions[i][1],
                frame.velocities[i][0],
                frame.velocities[i][1]
            )?;
        }
    }
    Ok(())
}
