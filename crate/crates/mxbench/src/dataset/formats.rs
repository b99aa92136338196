//! On-disk sample formats.
//!
//! `trajectories.bin`: magic `MXTRJ1`, then five u32 LE header words
//! (samples, frames, particles, dims=2, channels=2), then f32 LE values in
//! (sample, frame, particle, dim, channel) order with channel 0 = position
//! and channel 1 = velocity.
//!
//! `networks.bin`: magic `MXNET1`, then three u32 LE header words (samples,
//! layers, vertices), then per sample per layer one byte-padded MSB-first
//! edge bitset over the C(n,2) vertex pairs in lexicographic order.
//!
//! `classes.txt`: one canonical class id in hex per line, aligned with the
//! sample order of the binary files.

use std::io::{BufRead, Read, Write};

use crate::canon::CanonicalForm;
use crate::dynamics::{Trajectory, TrajectoryFrame};
use crate::error::{Error, Result};
use crate::graph::{bytes_to_bits, pair_count, GraphKind, LabeledGraph};
use crate::multiplex::MultiplexNetwork;

pub const TRAJECTORY_MAGIC: &[u8; 6] = b"MXTRJ1";
pub const NETWORK_MAGIC: &[u8; 6] = b"MXNET1";
pub const TRAJECTORY_FILE: &str = "trajectories.bin";
pub const NETWORK_FILE: &str = "networks.bin";
pub const CLASS_FILE: &str = "classes.txt";

const DIMS: usize = 2;
const CHANNELS: usize = 2;

fn write_u32(w: &mut impl Write, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::invalid(format!("{v} exceeds u32")))?;
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

pub fn write_trajectories(w: &mut impl Write, trajectories: &[Trajectory]) -> Result<()> {
    let Some(first) = trajectories.first() else {
        return Err(Error::invalid("no trajectories to write"));
    };
    let (frames, particles) = (first.n_frames(), first.n);
    for t in trajectories {
        if t.n_frames() != frames || t.n != particles {
            return Err(Error::ShapeMismatch(format!(
                "trajectory shape {}x{} differs from {}x{}",
                t.n_frames(),
                t.n,
                frames,
                particles
            )));
        }
    }
    w.write_all(TRAJECTORY_MAGIC)?;
    write_u32(w, trajectories.len())?;
    write_u32(w, frames)?;
    write_u32(w, particles)?;
    write_u32(w, DIMS)?;
    write_u32(w, CHANNELS)?;
    let mut buf = Vec::with_capacity(frames * particles * DIMS * CHANNELS * 4);
    for t in trajectories {
        buf.clear();
        for frame in &t.frames {
            for i in 0..particles {
                for d in 0..DIMS {
                    buf.extend_from_slice(&(frame.positions[i][d] as f32).to_le_bytes());
                    buf.extend_from_slice(&(frame.velocities[i][d] as f32).to_le_bytes());
                }
            }
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_trajectories(r: &mut impl Read) -> Result<Vec<Trajectory>> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)?;
    if &magic != TRAJECTORY_MAGIC {
        return Err(Error::parse("not a trajectory file (bad magic)".to_string()));
    }
    let samples = read_u32(r)? as usize;
    let frames = read_u32(r)? as usize;
    let particles = read_u32(r)? as usize;
    let dims = read_u32(r)? as usize;
    let channels = read_u32(r)? as usize;
    if dims != DIMS || channels != CHANNELS {
        return Err(Error::parse(format!(
            "unsupported trajectory layout: dims={dims} channels={channels}"
        )));
    }
    let mut out = Vec::with_capacity(samples);
    let mut buf = vec![0u8; frames * particles * DIMS * CHANNELS * 4];
    for _ in 0..samples {
        r.read_exact(&mut buf)?;
        let mut at = 0usize;
        let mut read_f32 = |buf: &[u8]| {
            let v = f32::from_le_bytes(buf[at..at + 4].try_into().unwrap());
            at += 4;
            v as f64
        };
        let mut t = Trajectory {
            n: particles,
            frames: Vec::with_capacity(frames),
        };
        for _ in 0..frames {
            let mut frame = TrajectoryFrame {
                positions: Vec::with_capacity(particles),
                velocities: Vec::with_capacity(particles),
            };
            for _ in 0..particles {
                let px = read_f32(&buf);
                let vx = read_f32(&buf);
                let py = read_f32(&buf);
                let vy = read_f32(&buf);
                frame.positions.push([px, py]);
                frame.velocities.push([vx, vy]);
            }
            t.frames.push(frame);
        }
        out.push(t);
    }
    Ok(out)
}

pub fn write_networks(w: &mut impl Write, networks: &[MultiplexNetwork]) -> Result<()> {
    let Some(first) = networks.first() else {
        return Err(Error::invalid("no networks to write"));
    };
    let (n, layers) = (first.n(), first.layer_count());
    for network in networks {
        if network.n() != n || network.layer_count() != layers {
            return Err(Error::ShapeMismatch(
                "all networks in one file must share n and layer count".to_string(),
            ));
        }
    }
    w.write_all(NETWORK_MAGIC)?;
    write_u32(w, networks.len())?;
    write_u32(w, layers)?;
    write_u32(w, n)?;
    for network in networks {
        for layer in network.layers() {
            w.write_all(&layer.to_bytes())?;
        }
    }
    Ok(())
}

/// Layer kinds are not stored in the file; the caller supplies them (from
/// the manifest) and collective layers are re-validated as cliques.
pub fn read_networks(r: &mut impl Read, kinds: &[GraphKind]) -> Result<Vec<MultiplexNetwork>> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)?;
    if &magic != NETWORK_MAGIC {
        return Err(Error::parse("not a network file (bad magic)".to_string()));
    }
    let samples = read_u32(r)? as usize;
    let layers = read_u32(r)? as usize;
    let n = read_u32(r)? as usize;
    if layers != kinds.len() {
        return Err(Error::ShapeMismatch(format!(
            "file has {layers} layers but {} kinds were supplied",
            kinds.len()
        )));
    }
    let n_bits = pair_count(n);
    let n_bytes = n_bits.div_ceil(8);
    let mut out = Vec::with_capacity(samples);
    let mut buf = vec![0u8; n_bytes];
    for _ in 0..samples {
        let mut stack = Vec::with_capacity(layers);
        for &kind in kinds {
            r.read_exact(&mut buf)?;
            let bits = bytes_to_bits(&buf, n_bits)?;
            let g = LabeledGraph::from_bits(n, kind, bits);
            if kind == GraphKind::Collective {
                // re-validate through the public constructor
                let charged = g.charged_set().ok_or_else(|| {
                    Error::parse("stored collective layer is not a clique".to_string())
                })?;
                LabeledGraph::collective(n, &charged)?;
            }
            stack.push(g);
        }
        out.push(MultiplexNetwork::new(stack)?);
    }
    Ok(out)
}

pub fn write_classes(w: &mut impl Write, ids: &[CanonicalForm]) -> Result<()> {
    for id in ids {
        writeln!(w, "{}", id.hex())?;
    }
    Ok(())
}

pub fn read_classes(r: impl BufRead) -> Result<Vec<CanonicalForm>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        out.push(CanonicalForm::from_hex(line)?);
    }
    Ok(out)
}
