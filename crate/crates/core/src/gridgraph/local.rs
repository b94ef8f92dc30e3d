//! Bridge detection that only looks near removed edges.
//!
//! On a torus every edge lies on two unit squares. An edge with an intact
//! square lies on a cycle, so only edges whose two squares both lost an edge
//! can be bridges. Each candidate is then settled by a two-sided search that
//! stops as soon as the sides meet or one side runs out; the side that runs
//! out first is the smaller side of the split.

use std::cell::RefCell;

use crate::boolcore::VarId;

use super::{bridges, LiveGraph};

/// A bridge together with the vertex set of the smaller side of the split
/// (ties broken so the side holding the smallest vertex is the larger one).
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BridgeSplit {
    pub edge: VarId,
    pub small_side: Vec<usize>,
}

struct Scratch {
    stamp: Vec<u32>,
    side: Vec<u8>,
    gen: u32,
}

thread_local! {
    static SCRATCH: RefCell<Scratch> = const { RefCell::new(Scratch { stamp: Vec::new(), side: Vec::new(), gen: 0 }) };
}

/// All bridges of `g` with their small sides, sorted by edge.
pub(crate) fn bridge_splits(g: &LiveGraph) -> Vec<BridgeSplit> {
    let candidates = match g.base().torus_side() {
        Some(n) => torus_candidates(g, n),
        None => bridges(g),
    };
    candidates.into_iter().filter_map(|e| split(g, e).map(|small_side| BridgeSplit { edge: e, small_side })).collect()
}

/// Bridges of `g` computed locally; agrees with [`bridges`].
#[cfg(test)]
pub(crate) fn local_bridges(g: &LiveGraph) -> Vec<VarId> {
    bridge_splits(g).into_iter().map(|s| s.edge).collect()
}

fn squares_of(e: usize, n: usize) -> [(usize, usize); 2] {
    let v = e / 2;
    let (i, j) = (v / n, v % n);
    if e % 2 == 0 {
        [(i, j), ((i + n - 1) % n, j)]
    } else {
        [(i, j), (i, (j + n - 1) % n)]
    }
}

fn square_edges(i: usize, j: usize, n: usize) -> [usize; 4] {
    let v = |a: usize, b: usize| (a % n) * n + (b % n);
    [2 * v(i, j), 2 * v(i + 1, j), 2 * v(i, j) + 1, 2 * v(i, j + 1) + 1]
}

fn torus_candidates(g: &LiveGraph, n: usize) -> Vec<VarId> {
    let removed = g.removed();
    let broken = |sq: (usize, usize)| square_edges(sq.0, sq.1, n).iter().any(|&f| removed.contains(VarId(f as u32)));
    let mut out = Vec::new();
    for r in removed.iter() {
        for sq in squares_of(r.index(), n) {
            for f in square_edges(sq.0, sq.1, n) {
                let fe = VarId(f as u32);
                if !removed.contains(fe) && squares_of(f, n).iter().all(|&s| broken(s)) {
                    out.push(fe);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// If `e` is a bridge of `g`, the smaller side of `g − e` within `e`'s
/// component.
pub(crate) fn split(g: &LiveGraph, e: VarId) -> Option<Vec<usize>> {
    let (u, v) = g.base().ends(e);
    if u == v {
        return None;
    }
    SCRATCH.with(|cell| {
        let mut s = cell.borrow_mut();
        let nv = g.num_vertices();
        if s.stamp.len() < nv {
            s.stamp.resize(nv, 0);
            s.side.resize(nv, 0);
        }
        s.gen = s.gen.wrapping_add(1);
        if s.gen == 0 {
            s.stamp.iter_mut().for_each(|x| *x = 0);
            s.gen = 1;
        }
        let gen = s.gen;
        let mut queues = [vec![u], vec![v]];
        let mut heads = [0usize, 0usize];
        for (k, &x) in [u, v].iter().enumerate() {
            s.stamp[x] = gen;
            s.side[x] = k as u8;
        }
        let mut done = [false, false];
        loop {
            for k in 0..2 {
                if done[k] {
                    continue;
                }
                if done[1 - k] && queues[k].len() > queues[1 - k].len() {
                    // the other side is complete and already smaller
                    return Some(std::mem::take(&mut queues[1 - k]));
                }
                if heads[k] == queues[k].len() {
                    done[k] = true;
                    continue;
                }
                let x = queues[k][heads[k]];
                heads[k] += 1;
                for (w, f) in g.neighbors(x) {
                    if f == e {
                        continue;
                    }
                    if s.stamp[w] == gen {
                        if s.side[w] as usize != k {
                            return None;
                        }
                    } else {
                        s.stamp[w] = gen;
                        s.side[w] = k as u8;
                        queues[k].push(w);
                    }
                }
            }
            if done[0] && done[1] {
                let [a, b] = queues;
                return Some(match a.len().cmp(&b.len()) {
                    std::cmp::Ordering::Less => a,
                    std::cmp::Ordering::Greater => b,
                    std::cmp::Ordering::Equal => {
                        let min_a = *a.iter().min().expect("nonempty");
                        let min_b = *b.iter().min().expect("nonempty");
                        if min_a < min_b {
                            b
                        } else {
                            a
                        }
                    }
                });
            }
        }
    })
}
