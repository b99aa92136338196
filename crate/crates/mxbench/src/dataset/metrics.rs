//! Evaluation metrics for trajectory prediction and network reconstruction.

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::graph::{pair_count, GraphKind};
use crate::multiplex::MultiplexNetwork;

/// Mean squared position error at one frame, averaged over samples,
/// particles and dimensions. Velocities are excluded.
pub fn mse_positions(pred: &[Trajectory], truth: &[Trajectory], frame: usize) -> Result<f64> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "{} predictions vs {} references",
            pred.len(),
            truth.len()
        )));
    }
    let mut total = 0.0;
    let mut terms = 0usize;
    for (p, t) in pred.iter().zip(truth) {
        if p.n != t.n {
            return Err(Error::ShapeMismatch("particle count mismatch".to_string()));
        }
        let (pf, tf) = (
            p.frames.get(frame).ok_or_else(|| {
                Error::invalid(format!("prediction has no frame {frame}"))
            })?,
            t.frames.get(frame).ok_or_else(|| {
                Error::invalid(format!("reference has no frame {frame}"))
            })?,
        );
        for i in 0..p.n {
            for d in 0..2 {
                let e = pf.positions[i][d] - tf.positions[i][d];
                total += e * e;
                terms += 1;
            }
        }
    }
    Ok(total / terms as f64)
}

/// Mean squared position error over the first `k` predicted frames, i.e.
/// frames 1..=k. Frame 0 is the shared initial condition handed to the
/// predictor and is not scored.
pub fn mse_k(pred: &[Trajectory], truth: &[Trajectory], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut total = 0.0;
    for frame in 1..=k {
        total += mse_positions(pred, truth, frame)?;
    }
    Ok(total / k as f64)
}

/// `mse_k` for the predictor that freezes everything at frame 0. The floor
/// any dynamics model must beat.
pub fn stationary_mse_k(truth: &[Trajectory], k: usize) -> Result<f64> {
    let frozen: Vec<Trajectory> = truth
        .iter()
        .map(|t| {
            let frame = t
                .frames
                .first()
                .ok_or_else(|| Error::invalid("empty trajectory"))?
                .clone();
            Ok(Trajectory {
                n: t.n,
                frames: vec![frame; k + 1],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    mse_k(&frozen, truth, k)
}

/// MSE of the predictor that freezes everything at frame `from`, evaluated
/// `horizon` frames later.
pub fn stationary_mse(trajectories: &[Trajectory], from: usize, horizon: usize) -> Result<f64> {
    let frozen: Vec<Trajectory> = trajectories
        .iter()
        .map(|t| {
            let frame = t
                .frames
                .get(from)
                .ok_or_else(|| Error::invalid(format!("no frame {from}")))?
                .clone();
            Ok(Trajectory {
                n: t.n,
                frames: vec![frame; from + horizon + 1],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    mse_positions(&frozen, trajectories, from + horizon)
}

/// Edge recovery scores: fraction of (unordered pair, layer) slots predicted
/// correctly, overall and per reference layer.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeAccuracy {
    pub overall: f64,
    pub per_layer: Vec<f64>,
    /// Prediction layer scored against each reference layer: reference layer
    /// i was compared to prediction layer `matching[i]`. Identity unless
    /// layer matching picked a better same-kind alignment.
    pub matching: Vec<usize>,
}

/// Scores predicted layers against reference layers slot by slot.
///
/// With `allow_layer_matching` the prediction layers may be reordered by a
/// single kind-preserving permutation, chosen to maximize the overall score.
/// One permutation is applied to the whole sample set, covering models that
/// emit interchangeable layers in a consistent but different order; it does
/// not let each sample pick its own alignment.
pub fn edge_accuracy(
    pred: &[MultiplexNetwork],
    truth: &[MultiplexNetwork],
    allow_layer_matching: bool,
) -> Result<EdgeAccuracy> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "{} predictions vs {} references",
            pred.len(),
            truth.len()
        )));
    }
    let kinds: Vec<GraphKind> = truth[0].kinds();
    let layers = kinds.len();
    for (p, t) in pred.iter().zip(truth) {
        if p.n() != t.n() || p.layer_count() != layers || t.layer_count() != layers {
            return Err(Error::ShapeMismatch(
                "network shapes do not match".to_string(),
            ));
        }
        if p.kinds() != kinds || t.kinds() != kinds {
            return Err(Error::ShapeMismatch(
                "layer kind signatures differ across the sample set".to_string(),
            ));
        }
    }

    let candidates = if allow_layer_matching {
        kind_preserving_permutations(&kinds)
    } else {
        vec![(0..layers).collect()]
    };
    // Identity is always a candidate and sorts first, so ties keep it.
    let mut best: Option<EdgeAccuracy> = None;
    for matching in candidates {
        let scored = score_matching(pred, truth, &matching)?;
        if best.as_ref().is_none_or(|b| scored.overall > b.overall) {
            best = Some(scored);
        }
    }
    Ok(best.expect("at least the identity matching"))
}

fn score_matching(
    pred: &[MultiplexNetwork],
    truth: &[MultiplexNetwork],
    matching: &[usize],
) -> Result<EdgeAccuracy> {
    let layers = matching.len();
    let mut correct = vec![0usize; layers];
    let mut total = vec![0usize; layers];
    for (p, t) in pred.iter().zip(truth) {
        let n = t.n();
        for (ti, &pi) in matching.iter().enumerate() {
            let (pl, tl) = (p.layer(pi), t.layer(ti));
            for i in 0..n {
                for j in (i + 1)..n {
                    if pl.contains_edge(i, j) == tl.contains_edge(i, j) {
                        correct[ti] += 1;
                    }
                    total[ti] += 1;
                }
            }
            debug_assert_eq!(total[ti] % pair_count(n), 0);
        }
    }
    let overall =
        correct.iter().sum::<usize>() as f64 / total.iter().sum::<usize>().max(1) as f64;
    let per_layer = correct
        .iter()
        .zip(&total)
        .map(|(&c, &t)| c as f64 / t.max(1) as f64)
        .collect();
    Ok(EdgeAccuracy {
        overall,
        per_layer,
        matching: matching.to_vec(),
    })
}

/// All permutations of layer indices that keep every layer on its own kind,
/// in lexicographic order (identity first).
fn kind_preserving_permutations(kinds: &[GraphKind]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(kinds.len());
    let mut used = vec![false; kinds.len()];
    fn recurse(
        kinds: &[GraphKind],
        used: &mut Vec<bool>,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let slot = current.len();
        if slot == kinds.len() {
            out.push(current.clone());
            return;
        }
        for i in 0..kinds.len() {
            if !used[i] && kinds[i] == kinds[slot] {
                used[i] = true;
                current.push(i);
                recurse(kinds, used, current, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    recurse(kinds, &mut used, &mut current, &mut out);
    out
}
