use std::fmt::Write as _;

use rand::Rng;

use crate::boolcore::{Literal, VarId};
use crate::error::{Error, Result};

use super::TseitinInstance;

pub type Clause = Vec<Literal>;

/// For every vertex, the 8 width-4 clauses excluding the assignments to its
/// edges whose parity differs from its charge.
pub fn tseitin_clauses(inst: &TseitinInstance) -> Result<Vec<Clause>> {
    let g = &inst.graph;
    let mut out = Vec::with_capacity(8 * g.num_vertices());
    for v in 0..g.num_vertices() {
        let edges: Vec<VarId> = g.neighbors(v).map(|(_, e)| e).collect();
        if edges.len() != 4 {
            return Err(Error::NotFullGrid(v));
        }
        for mask in 0u32..16 {
            let odd = mask.count_ones() % 2 == 1;
            if odd == inst.charge.get(v) {
                continue;
            }
            // the clause false exactly on this assignment
            out.push(
                edges.iter().enumerate().map(|(i, &e)| Literal { var: e, positive: mask >> i & 1 == 0 }).collect(),
            );
        }
    }
    Ok(out)
}

/// DIMACS CNF text: variable `VarId + 1`, one clause per line.
pub fn dimacs(inst: &TseitinInstance) -> Result<String> {
    let clauses = tseitin_clauses(inst)?;
    let mut s = String::new();
    writeln!(s, "c tseitin instance, {} vertices", inst.graph.num_vertices()).expect("string write");
    writeln!(s, "p cnf {} {}", inst.graph.base().num_edges(), clauses.len()).expect("string write");
    for c in &clauses {
        for l in c {
            let v = l.var.0 as i64 + 1;
            write!(s, "{} ", if l.positive { v } else { -v }).expect("string write");
        }
        s.push_str("0\n");
    }
    Ok(s)
}

/// A uniformly random solution, indexed by edge (removed edges read 0).
/// Edges off a BFS spanning forest get fair coins; forest edges are then
/// solved from the leaves up, which is a bijection from coin outcomes to
/// solutions.
pub fn sample_uniform_solution<R: Rng + ?Sized>(inst: &TseitinInstance, rng: &mut R) -> Result<Vec<bool>> {
    if !inst.is_satisfiable() {
        return Err(Error::Unsatisfiable);
    }
    let g = &inst.graph;
    let nv = g.num_vertices();
    let ne = g.base().num_edges();
    let mut parent_edge = vec![u32::MAX; nv];
    let mut seen = vec![false; nv];
    let mut order = Vec::with_capacity(nv);
    let mut in_forest = vec![false; ne];
    for root in 0..nv {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let start = order.len();
        order.push(root);
        let mut head = start;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for (w, e) in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent_edge[w] = e.0;
                    in_forest[e.index()] = true;
                    order.push(w);
                }
            }
        }
    }
    let mut values = vec![false; ne];
    let mut need = inst.charge.values.clone();
    for e in g.live_edges() {
        if !in_forest[e.index()] && rng.random::<bool>() {
            values[e.index()] = true;
            let (u, v) = g.base().ends(e);
            need[u] = !need[u];
            need[v] = !need[v];
        }
    }
    for &v in order.iter().rev() {
        let pe = parent_edge[v];
        if pe == u32::MAX {
            continue;
        }
        if need[v] {
            values[pe as usize] = true;
            let (a, b) = g.base().ends(VarId(pe));
            need[a] = !need[a];
            need[b] = !need[b];
        }
    }
    debug_assert!(need.iter().all(|x| !x));
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridgraph::{build_grid, Charge, LiveGraph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn clause_count_and_semantics() {
        let g = build_grid(3).unwrap();
        let inst = TseitinInstance::new(g.full(), Charge::ones(9)).unwrap();
        let clauses = tseitin_clauses(&inst).unwrap();
        assert_eq!(clauses.len(), 72);
        assert!(clauses.iter().all(|c| c.len() == 4));
        let at = g.edges_at(0, 0);
        let first_vertex = &clauses[..8];
        let sat = |assign: [bool; 4], c: &Clause| {
            c.iter().any(|l| {
                let i = at.iter().position(|&e| e == l.var).unwrap();
                assign[i] == l.positive
            })
        };
        assert!(first_vertex.iter().all(|c| sat([true, false, false, false], c)));
        assert_eq!(first_vertex.iter().filter(|c| !sat([false; 4], c)).count(), 1);
    }

    #[test]
    fn dimacs_header() {
        let g = build_grid(3).unwrap();
        let inst = TseitinInstance::new(g.full(), Charge::ones(9)).unwrap();
        let text = dimacs(&inst).unwrap();
        assert!(text.lines().any(|l| l == "p cnf 18 72"));
        assert_eq!(text.lines().filter(|l| l.ends_with(" 0")).count(), 72);
    }

    #[test]
    fn solutions_satisfy_every_vertex() {
        let g = build_grid(5).unwrap();
        let mut charge = Charge::ones(25);
        charge.toggle(0);
        let inst = TseitinInstance::new(g.full(), charge).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = sample_uniform_solution(&inst, &mut rng).unwrap();
            assert!(inst.satisfied_by(&x));
        }
        let bad = TseitinInstance::new(g.full(), Charge::ones(25)).unwrap();
        assert_eq!(sample_uniform_solution(&bad, &mut rng), Err(Error::Unsatisfiable));
    }

    #[test]
    fn cycle_has_two_solutions_each_half() {
        let g = LiveGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let inst = TseitinInstance::new(g, Charge::zeros(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 20_000;
        let ones = (0..n).filter(|_| sample_uniform_solution(&inst, &mut rng).unwrap()[0]).count();
        assert!(inst.satisfied_by(&[true; 4]));
        let z = (ones as f64 - n as f64 / 2.0) / (n as f64 / 4.0).sqrt();
        assert!(z.abs() < 4.0, "z = {z}");
    }
}
