use crate::boolcore::VarId;

use super::LiveGraph;

/// Connected components of a live graph: a label per vertex and the size of
/// each component. Labels are assigned in order of smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub label: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn members(&self, c: u32) -> Vec<usize> {
        (0..self.label.len()).filter(|&v| self.label[v] == c).collect()
    }
}

pub fn components(g: &LiveGraph) -> Components {
    let nv = g.num_vertices();
    let mut label = vec![u32::MAX; nv];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for s in 0..nv {
        if label[s] != u32::MAX {
            continue;
        }
        let c = sizes.len() as u32;
        label[s] = c;
        stack.push(s);
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for (w, _) in g.neighbors(v) {
                if label[w] == u32::MAX {
                    label[w] = c;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    Components { label, sizes }
}

/// The unique component holding more than half of the vertices.
pub fn giant_component(g: &LiveGraph) -> Option<(Components, u32)> {
    let comps = components(g);
    let nv = g.num_vertices();
    let giant = comps.sizes.iter().position(|&s| 2 * s > nv)?;
    Some((comps, giant as u32))
}

/// Bridges of the live graph, sorted, by the lowpoint method: a tree edge
/// `(p, v)` is a bridge iff no back edge from `v`'s subtree reaches `p` or
/// above. Parallel edges are told apart by edge id, so a doubled edge is
/// never a bridge.
pub fn bridges(g: &LiveGraph) -> Vec<VarId> {
    let nv = g.num_vertices();
    let mut tin = vec![u32::MAX; nv];
    let mut low = vec![0u32; nv];
    let mut out = Vec::new();
    let mut timer = 0u32;
    // frame: vertex, edge used to enter it, position in its incidence list
    let mut stack: Vec<(usize, u32, usize)> = Vec::new();
    for root in 0..nv {
        if tin[root] != u32::MAX {
            continue;
        }
        tin[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, u32::MAX, 0));
        while let Some(frame) = stack.last_mut() {
            let (v, via, pos) = *frame;
            let inc = g.base().incident(v);
            if pos < inc.len() {
                frame.2 += 1;
                let (w, e) = inc[pos];
                if e == via || g.removed().contains(VarId(e)) {
                    continue;
                }
                let w = w as usize;
                if tin[w] == u32::MAX {
                    tin[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, e, 0));
                } else {
                    low[v] = low[v].min(tin[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] > tin[p] {
                        out.push(VarId(via));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridgraph::build_grid;

    #[test]
    fn full_torus_has_no_bridges() {
        let g = build_grid(5).unwrap();
        assert!(bridges(&g.full()).is_empty());
        let (comps, giant) = giant_component(&g.full()).unwrap();
        assert_eq!(comps.count(), 1);
        assert_eq!(giant, 0);
    }

    #[test]
    fn path_fixture_is_all_bridges() {
        let g = LiveGraph::from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(bridges(&g), vec![VarId(0), VarId(1)]);
    }

    #[test]
    fn parallel_edges_are_not_bridges() {
        let g = LiveGraph::from_edges(3, &[(0, 1), (0, 1), (1, 2)]);
        assert_eq!(bridges(&g), vec![VarId(2)]);
    }

    #[test]
    fn three_of_four_edges_removed() {
        let g = build_grid(5).unwrap();
        let at = g.edges_at(2, 2);
        let h = g.full().minus(at[..3].iter().copied()).unwrap();
        assert_eq!(bridges(&h), vec![at[3]]);
        let h = g.full().minus(at).unwrap();
        let (comps, giant) = giant_component(&h).unwrap();
        assert_eq!(comps.count(), 2);
        assert_eq!(comps.sizes[giant as usize], 24);
    }
}
