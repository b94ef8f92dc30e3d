use crate::boolcore::{Assign, Restriction, VarId};
use crate::error::{Error, Result};

use super::local::{bridge_splits, split};
use super::{components, Charge, LiveGraph};

/// `α↾β`: every edge fixed to 1 toggles the charge at both ends.
pub fn restrict_charge(alpha: &Charge, beta: &Restriction, g: &LiveGraph) -> Result<Charge> {
    let mut out = alpha.clone();
    for (e, b) in beta.fixed_vars() {
        if !g.is_live(e) {
            return Err(Error::Invariant(format!("{e:?} is not a live edge")));
        }
        if b {
            let (u, v) = g.base().ends(e);
            out.toggle(u);
            out.toggle(v);
        }
    }
    Ok(out)
}

/// `S ∪ bridges(G − S)`, sorted. One round: removing a bridge never creates
/// another bridge, since no cycle passes through a bridge.
pub fn closure_set(g: &LiveGraph, s: &[VarId]) -> Result<Vec<VarId>> {
    let h = g.minus(s.iter().copied())?;
    let mut out: Vec<VarId> = s.to_vec();
    out.extend(bridge_splits(&h).into_iter().map(|b| b.edge));
    out.sort();
    out.dedup();
    Ok(out)
}

/// The value a bridge must take: the smaller side of the split ends up with
/// even charge, so the odd charge of an odd component stays on the larger
/// side.
pub fn forced_bridge_value(g: &LiveGraph, alpha: &Charge, e: VarId) -> Result<bool> {
    if !g.is_live(e) {
        return Err(Error::NotBridge(e));
    }
    let small = split(g, e).ok_or(Error::NotBridge(e))?;
    Ok(alpha.parity_over(&small))
}

/// The closure of `β`: `β` extended by the forced value of every bridge of
/// `G − supp(β)`. Errors when `G` minus the closed support has no giant
/// component.
pub fn closure_restriction(g: &LiveGraph, alpha: &Charge, beta: &Restriction) -> Result<Restriction> {
    let (out, h) = closure_with_graph(g, alpha, beta)?;
    let comps = components(&h);
    if !comps.sizes.iter().any(|&s| 2 * s > h.num_vertices()) {
        return Err(Error::NoGiant);
    }
    Ok(out)
}

/// Closure without the giant-component check; also returns the live graph
/// with the closed support removed.
pub(crate) fn closure_with_graph(g: &LiveGraph, alpha: &Charge, beta: &Restriction) -> Result<(Restriction, LiveGraph)> {
    let h = g.minus(beta.fixed_vars().map(|(e, _)| e))?;
    let a = restrict_charge(alpha, beta, g)?;
    let mut out = beta.clone();
    let splits = bridge_splits(&h);
    let closed = h.minus(splits.iter().map(|s| s.edge))?;
    for s in splits {
        out.set(s.edge, Assign::bit(a.parity_over(&s.small_side)));
    }
    Ok((out, closed))
}

/// `G − I` is connected.
pub fn is_independent(g: &LiveGraph, i: &[VarId]) -> Result<bool> {
    Ok(components(&g.minus(i.iter().copied())?).count() == 1)
}

/// A giant component exists and exactly the giant carries odd charge.
pub fn is_nice(g: &LiveGraph, alpha: &Charge) -> bool {
    let comps = components(g);
    let nv = g.num_vertices();
    let Some(giant) = comps.sizes.iter().position(|&s| 2 * s > nv) else {
        return false;
    };
    let mut par = vec![false; comps.count()];
    for v in 0..nv {
        if alpha.get(v) {
            let c = comps.label[v] as usize;
            par[c] = !par[c];
        }
    }
    par.iter().enumerate().all(|(c, &odd)| odd == (c == giant))
}

/// `β` pushes the contradiction of `α` into the giant component.
pub fn pushes_contradiction(g: &LiveGraph, alpha: &Charge, beta: &Restriction) -> Result<bool> {
    let h = g.minus(beta.fixed_vars().map(|(e, _)| e))?;
    let a = restrict_charge(alpha, beta, g)?;
    Ok(is_nice(&h, &a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridgraph::build_grid;

    #[test]
    fn charge_restriction_toggles_endpoints() {
        let g = build_grid(3).unwrap();
        let live = g.full();
        let a = Charge::ones(9);
        let e = g.edges_at(1, 1)[0];
        let r = restrict_charge(&a, &Restriction::from_bits([(e, true)]), &live).unwrap();
        let (u, v) = live.base().ends(e);
        for w in 0..9 {
            assert_eq!(r.get(w), !(w == u || w == v));
        }
        let zeros = Restriction::from_bits(g.edges_at(0, 0).map(|e| (e, false)));
        assert_eq!(restrict_charge(&a, &zeros, &live).unwrap(), a);
        let at = g.edges_at(1, 1);
        let two = Restriction::from_bits([(at[0], true), (at[2], true)]);
        let r = restrict_charge(&a, &two, &live).unwrap();
        assert!(r.get(g.vertex(1, 1)));
        assert!(!r.get(g.vertex(1, 2)) && !r.get(g.vertex(1, 0)));
    }

    #[test]
    fn closure_of_three_edges_at_a_vertex() {
        let g = build_grid(5).unwrap();
        let live = g.full();
        let at = g.edges_at(2, 2);
        assert!(closure_set(&live, &[]).unwrap().is_empty());
        let mut want = at.to_vec();
        want.sort();
        assert_eq!(closure_set(&live, &at[..3]).unwrap(), want);
        let beta = Restriction::from_bits(at[..3].iter().map(|&e| (e, false)));
        let cl = closure_restriction(&live, &Charge::ones(25), &beta).unwrap();
        assert_eq!(cl.fixed(at[3]), Some(true));
        let beta1 = Restriction::from_bits(at[..3].iter().map(|&e| (e, e == at[0])));
        assert_eq!(closure_restriction(&live, &Charge::ones(25), &beta1).unwrap().fixed(at[3]), Some(false));
    }

    #[test]
    fn pendant_forced_value_follows_charge() {
        let g = LiveGraph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]);
        let mut a = Charge::zeros(4);
        assert_eq!(forced_bridge_value(&g, &a, VarId(3)), Ok(false));
        a.toggle(3);
        assert_eq!(forced_bridge_value(&g, &a, VarId(3)), Ok(true));
        assert_eq!(forced_bridge_value(&g, &a, VarId(0)), Err(Error::NotBridge(VarId(0))));
    }

    #[test]
    fn odd_charge_goes_to_larger_side() {
        // square 0-1-2-3 with a tail 3-4-5: bridge 3-4 splits {0,1,2,3} from {4,5}
        let g = LiveGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5)]);
        let mut a = Charge::zeros(6);
        a.toggle(4);
        // setting the bridge to 1 moves the odd unit from {4,5} to the square
        assert_eq!(forced_bridge_value(&g, &a, VarId(4)), Ok(true));
        a.toggle(0);
        a.toggle(4);
        assert_eq!(forced_bridge_value(&g, &a, VarId(4)), Ok(false));
    }

    #[test]
    fn independence_and_niceness() {
        let g = build_grid(5).unwrap();
        let live = g.full();
        let at = g.edges_at(0, 0);
        assert!(is_independent(&live, &[]).unwrap());
        assert!(!is_independent(&live, &at).unwrap());
        assert!(is_independent(&live, &at[..1]).unwrap());
        assert!(is_nice(&live, &Charge::ones(25)));
        assert!(!is_nice(&live, &Charge::zeros(25)));
        let cut = live.minus(at).unwrap();
        assert!(!is_nice(&cut, &Charge::ones(25)));
        let one = Charge::ones(25);
        assert!(pushes_contradiction(&live, &one, &Restriction::new()).unwrap());
        let beta = Restriction::from_bits(at.map(|e| (e, false)));
        assert!(!pushes_contradiction(&live, &one, &beta).unwrap());
        let beta = Restriction::from_bits(at.iter().enumerate().map(|(i, &e)| (e, i == 0)));
        assert!(pushes_contradiction(&live, &one, &beta).unwrap());
    }
}
