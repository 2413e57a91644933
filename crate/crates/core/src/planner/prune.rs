use crate::topology::{inverse, product, reduce, CdtCode, TopoPath, TopologyGraph};

/// Topology graph with singly-connected branches removed.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedGraph {
    pub alive: Vec<bool>,
}

impl PrunedGraph {
    pub fn full(g: &TopologyGraph) -> Self {
        PrunedGraph {
            alive: vec![true; g.nodes],
        }
    }

    pub fn cutline_alive(&self, g: &TopologyGraph, e: usize) -> bool {
        let (a, b) = g.edges[e];
        self.alive[a] && self.alive[b]
    }

    pub fn alive_cutlines(&self, g: &TopologyGraph) -> Vec<usize> {
        (0..g.edges.len()).filter(|&e| self.cutline_alive(g, e)).collect()
    }

    fn alive_neighbors(&self, g: &TopologyGraph, n: usize) -> Vec<usize> {
        let mut out: Vec<usize> = g
            .neighbors(n)
            .iter()
            .map(|&(m, _)| m)
            .filter(|&m| self.alive[m])
            .collect();
        out.dedup();
        out
    }
}

/// Strips singly-connected nodes other than `s` and `g`, then follows the
/// forced corridors out of both cells. Returns the optimal class code when
/// the corridors decide it.
pub fn reduce_branches(g: &TopologyGraph, s: usize, t: usize) -> (PrunedGraph, Option<CdtCode>) {
    let mut pg = PrunedGraph::full(g);
    if s == t {
        return (pg, Some(reduce(&TopoPath::single(s))));
    }
    for x in 0..g.nodes {
        if g.degree(x) != 1 {
            continue;
        }
        let mut cur = x;
        loop {
            if !pg.alive[cur] {
                break;
            }
            let nb = pg.alive_neighbors(g, cur);
            if nb.len() != 1 || cur == s || cur == t {
                break;
            }
            pg.alive[cur] = false;
            cur = nb[0];
        }
    }
    let corridor = |from: usize, to: usize| -> (Vec<usize>, bool) {
        let mut f = vec![from];
        loop {
            let last = *f.last().unwrap();
            let next: Vec<usize> = pg
                .alive_neighbors(g, last)
                .into_iter()
                .filter(|m| !f.contains(m))
                .collect();
            if next.len() != 1 {
                return (f, false);
            }
            f.push(next[0]);
            if next[0] == to {
                return (f, true);
            }
        }
    };
    let code = |nodes: &[usize]| TopoPath::from_nodes(g, nodes).map(|p| reduce(&p)).ok();
    let (f_init, hit) = corridor(s, t);
    if hit {
        return (pg.clone(), code(&f_init));
    }
    let (f_goal, hit) = corridor(t, s);
    if hit {
        let mut rev = f_goal.clone();
        rev.reverse();
        return (pg.clone(), code(&rev));
    }
    if f_init.last() == f_goal.last() {
        let a = TopoPath::from_nodes(g, &f_init).ok();
        let b = TopoPath::from_nodes(g, &f_goal).ok();
        if let (Some(a), Some(b)) = (a, b) {
            if let Ok(p) = product(&a, &inverse(&b)) {
                return (pg, Some(reduce(&p)));
            }
        }
    }
    (pg, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_graph_gives_code() {
        // 0 - 1 - 2 - 3, with a branch 1 - 4 - 5
        let g = TopologyGraph::from_edges(6, vec![(0, 1), (1, 2), (2, 3), (1, 4), (4, 5)]);
        let (pg, code) = reduce_branches(&g, 0, 3);
        assert_eq!(code.unwrap().nodes(), &[0, 1, 2, 3]);
        assert!(!pg.alive[4] && !pg.alive[5]);
        let (_, code) = reduce_branches(&g, 5, 3);
        assert_eq!(code.unwrap().nodes(), &[5, 4, 1, 2, 3]);
    }

    #[test]
    fn cycle_keeps_everything() {
        let g = TopologyGraph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6)).collect());
        let (pg, code) = reduce_branches(&g, 0, 3);
        assert!(code.is_none());
        assert!(pg.alive.iter().all(|&a| a));
    }

    #[test]
    fn corridors_meeting_on_a_cycle() {
        // s=0 - 1 - [ring 2..5] where both corridors end at 2
        let g = TopologyGraph::from_edges(7, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 2), (2, 6)]);
        let (pg, code) = reduce_branches(&g, 0, 6);
        assert_eq!(code.unwrap().nodes(), &[0, 1, 2, 6]);
        assert!(pg.alive.iter().all(|&a| a));
        // dead-end spur 6 pruned when it holds neither endpoint
        let (pg, code) = reduce_branches(&g, 0, 4);
        assert!(!pg.alive[6]);
        assert!(code.is_none());
    }
}
