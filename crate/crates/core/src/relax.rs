//! Label-correcting longest-walk engine over dense graphs.
//!
//! Labels maximize walk sums of `weight(u, v) - slack`. A cycle in the
//! predecessor graph certifies a cycle of positive perturbed weight; it is
//! looked for once every `n` successful relaxations, which keeps the check
//! amortized O(1) per relaxation.

use std::collections::VecDeque;

/// How labels are seeded.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Seed {
    /// Virtual source joined to every vertex by a zero-weight edge.
    AllZero,
    /// Walks leaving `source` with at least `min_edges` (1 or 2) edges.
    From { source: usize, min_edges: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Pred {
    None,
    /// Seeded directly (first edge of the walk, or the virtual source).
    Root,
    /// Seeded through the two-edge walk `source -> k -> v`.
    Via(usize),
    Vertex(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct Labels {
    pub value: Vec<Option<f64>>,
    pub pred: Vec<Pred>,
    source: Option<usize>,
}

impl Labels {
    /// Vertex sequence of the walk realizing `v`'s label, starting at the
    /// source. Only meaningful for [`Seed::From`].
    pub fn walk_to(&self, v: usize) -> Option<Vec<usize>> {
        let source = self.source?;
        self.value[v]?;
        let mut walk = vec![v];
        let mut cur = v;
        for _ in 0..=self.pred.len() {
            match self.pred[cur] {
                Pred::Vertex(u) => {
                    walk.push(u);
                    cur = u;
                }
                Pred::Root => {
                    walk.push(source);
                    walk.reverse();
                    return Some(walk);
                }
                Pred::Via(k) => {
                    walk.push(k);
                    walk.push(source);
                    walk.reverse();
                    return Some(walk);
                }
                Pred::None => return None,
            }
        }
        None
    }
}

/// Runs the label-correcting scheme. Returns the converged labels, or a
/// cycle `[v0, v1, ..., vk]` (edges `v_i -> v_{i+1}` and `vk -> v0`) of
/// positive perturbed weight.
pub(crate) fn longest_walks<W>(n: usize, weight: W, seed: Seed, slack: f64) -> Result<Labels, Vec<usize>>
where
    W: Fn(usize, usize) -> Option<f64>,
{
    let mut value: Vec<Option<f64>> = vec![None; n];
    let mut pred = vec![Pred::None; n];
    let mut source = None;
    match seed {
        Seed::AllZero => {
            value.iter_mut().for_each(|v| *v = Some(0.0));
            pred.iter_mut().for_each(|p| *p = Pred::Root);
        }
        Seed::From { source: s, min_edges } => {
            source = Some(s);
            if min_edges <= 1 {
                for v in 0..n {
                    if let Some(w) = weight(s, v) {
                        value[v] = Some(w - slack);
                        pred[v] = Pred::Root;
                    }
                }
            } else {
                for k in 0..n {
                    let Some(w1) = weight(s, k) else { continue };
                    for v in 0..n {
                        let Some(w2) = weight(k, v) else { continue };
                        let cand = (w1 - slack) + (w2 - slack);
                        if value[v].is_none_or(|cur| cand > cur) {
                            value[v] = Some(cand);
                            pred[v] = Pred::Via(k);
                        }
                    }
                }
            }
        }
    }

    let mut queue: VecDeque<usize> = (0..n).filter(|&v| value[v].is_some()).collect();
    let mut queued = vec![false; n];
    for &v in &queue {
        queued[v] = true;
    }
    let mut relaxations = 0usize;
    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        let Some(base) = value[u] else { continue };
        for v in 0..n {
            let Some(w) = weight(u, v) else { continue };
            let cand = base + (w - slack);
            if value[v].is_none_or(|cur| cand > cur) {
                value[v] = Some(cand);
                pred[v] = Pred::Vertex(u);
                relaxations += 1;
                if relaxations.is_multiple_of(n.max(1)) {
                    if let Some(cycle) = pred_cycle(&pred) {
                        return Err(cycle);
                    }
                }
                if !queued[v] {
                    queued[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    Ok(Labels { value, pred, source })
}

/// Finds a cycle in the predecessor graph, in forward edge order and
/// rotated to start at its smallest vertex.
fn pred_cycle(pred: &[Pred]) -> Option<Vec<usize>> {
    const WHITE: u8 = 0;
    const ON_STACK: u8 = 1;
    const DONE: u8 = 2;
    let n = pred.len();
    let mut color = vec![WHITE; n];
    for start in 0..n {
        if color[start] != WHITE {
            continue;
        }
        let mut trail = Vec::new();
        let mut cur = start;
        loop {
            if color[cur] == ON_STACK {
                let pos = trail.iter().position(|&t| t == cur).unwrap();
                // trail follows predecessors, i.e. edges backwards
                let mut cycle: Vec<usize> = trail[pos..].to_vec();
                cycle.reverse();
                return Some(rotate_to_min(cycle));
            }
            if color[cur] == DONE {
                break;
            }
            color[cur] = ON_STACK;
            trail.push(cur);
            match pred[cur] {
                Pred::Vertex(u) => cur = u,
                _ => break,
            }
        }
        for t in trail {
            color[t] = DONE;
        }
    }
    None
}

pub(crate) fn rotate_to_min(mut cycle: Vec<usize>) -> Vec<usize> {
    if let Some((pos, _)) = cycle.iter().enumerate().min_by_key(|&(_, v)| *v) {
        cycle.rotate_left(pos);
    }
    cycle
}
