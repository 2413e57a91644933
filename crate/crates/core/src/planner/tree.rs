use std::collections::VecDeque;

use crate::decomposition::DissectionMap;
use crate::geometry::Point2;

pub const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub point: Point2,
    /// Cutline holding the point; `None` for the root.
    pub cutline: Option<usize>,
    pub parent: u32,
    /// Cell the edge from the parent runs through (the start cell for the
    /// root).
    pub via: usize,
    pub cost: f64,
    /// Iteration at which the root path last changed.
    pub stamp: u64,
    pub children: Vec<u32>,
}

/// Rooted tree of cutline samples. Each node is listed in every cell it
/// lies on: both sides of its cutline, or the start cell for the root.
#[derive(Debug, Clone)]
pub struct PlanTree {
    pub nodes: Vec<TreeNode>,
    pub cell_nodes: Vec<Vec<u32>>,
    /// `(x, y, cost)` per node, kept in step with `nodes` for the scans.
    hot: Vec<[f64; 3]>,
}

impl PlanTree {
    pub fn new(root: Point2, root_cell: usize, cells: usize) -> Self {
        let mut cell_nodes = vec![Vec::new(); cells];
        cell_nodes[root_cell].push(0);
        PlanTree {
            nodes: vec![TreeNode {
                point: root,
                cutline: None,
                parent: NONE,
                via: root_cell,
                cost: 0.0,
                stamp: 0,
                children: Vec::new(),
            }],
            cell_nodes,
            hot: vec![[root.x, root.y, 0.0]],
        }
    }

    fn reach(&self, i: usize, x: Point2) -> f64 {
        let [px, py, c] = self.hot[i];
        c + ((px - x.x) * (px - x.x) + (py - x.y) * (py - x.y)).sqrt()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &TreeNode {
        &self.nodes[i]
    }

    /// Cells node `i` lies on.
    pub fn cells_of(&self, dm: &DissectionMap, i: usize) -> (usize, Option<usize>) {
        match self.nodes[i].cutline {
            None => (self.nodes[i].via, None),
            Some(l) => {
                let c = dm.cutline(l);
                (c.left_poly, Some(c.right_poly))
            }
        }
    }

    /// Nodes lying on either cell of cutline `l`, each once.
    pub fn near(&self, dm: &DissectionMap, l: usize, out: &mut Vec<usize>) {
        out.clear();
        let c = dm.cutline(l);
        out.extend(self.cell_nodes[c.left_poly].iter().map(|&i| i as usize));
        out.extend(
            self.cell_nodes[c.right_poly]
                .iter()
                .map(|&i| i as usize)
                .filter(|&i| !self.lies_in(dm, i, c.left_poly)),
        );
    }

    fn lies_in(&self, dm: &DissectionMap, i: usize, cell: usize) -> bool {
        match self.nodes[i].cutline {
            None => self.nodes[i].via == cell,
            Some(m) => dm.cutline(m).borders(cell),
        }
    }

    /// Argmin of cost plus distance to `x`; ties go to the lower id.
    pub fn closest(&self, x: Point2, near: &[usize]) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for &i in near {
            let v = self.reach(i, x);
            if best.is_none_or(|(bv, bi)| v < bv || (v == bv && i < bi)) {
                best = Some((v, i));
            }
        }
        best.map(|(_, i)| i)
    }

    /// Cell shared by node `i` and cutline `l`, preferring the cell `i`
    /// was reached through.
    pub fn shared_cell(&self, dm: &DissectionMap, i: usize, l: usize) -> usize {
        let c = dm.cutline(l);
        let n = &self.nodes[i];
        if c.borders(n.via) {
            return n.via;
        }
        match n.cutline {
            Some(m) => {
                let d = dm.cutline(m);
                if c.borders(d.left_poly) {
                    d.left_poly
                } else {
                    d.right_poly
                }
            }
            None => n.via,
        }
    }

    pub fn insert(&mut self, dm: &DissectionMap, x: Point2, l: usize, parent: usize, stamp: u64) -> usize {
        let id = self.nodes.len();
        let via = self.shared_cell(dm, parent, l);
        let cost = self.reach(parent, x);
        self.hot.push([x.x, x.y, cost]);
        self.nodes.push(TreeNode {
            point: x,
            cutline: Some(l),
            parent: parent as u32,
            via,
            cost,
            stamp,
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id as u32);
        let c = dm.cutline(l);
        self.cell_nodes[c.left_poly].push(id as u32);
        self.cell_nodes[c.right_poly].push(id as u32);
        id
    }

    /// FIFO rewiring from the queued nodes. Returns the nodes whose parent
    /// changed.
    pub fn rewire(&mut self, dm: &DissectionMap, queue: &mut VecDeque<usize>, stamp: u64) -> Vec<usize> {
        let mut changed = Vec::new();
        let mut near = Vec::new();
        while let Some(r) = queue.pop_front() {
            let Some(l) = self.nodes[r].cutline else { continue };
            self.near(dm, l, &mut near);
            for &x in &near {
                let old = self.hot[x][2];
                if x == r || x == 0 || old <= self.hot[r][2] {
                    continue;
                }
                let new_cost = self.reach(r, Point2::new(self.hot[x][0], self.hot[x][1]));
                if new_cost < old - 1e-12 * old.max(1.0) && !self.is_ancestor(x, r) {
                    let xl = self.nodes[x].cutline.expect("non-root");
                    let via = self.shared_cell(dm, r, xl);
                    self.attach(x, r, via, new_cost, stamp);
                    queue.push_back(x);
                    changed.push(x);
                    for y in self.shortcut_reentries(x, stamp) {
                        queue.push_back(y);
                        changed.push(y);
                    }
                }
            }
        }
        changed
    }

    fn is_ancestor(&self, a: usize, mut b: usize) -> bool {
        while b != NONE as usize {
            if a == b {
                return true;
            }
            b = self.nodes[b].parent as usize;
        }
        false
    }

    fn attach(&mut self, x: usize, r: usize, via: usize, new_cost: f64, stamp: u64) {
        let old_parent = self.nodes[x].parent as usize;
        self.nodes[old_parent].children.retain(|&c| c as usize != x);
        self.nodes[r].children.push(x as u32);
        self.nodes[x].parent = r as u32;
        self.nodes[x].via = via;
        let delta = new_cost - self.nodes[x].cost;
        let mut stack = vec![x];
        while let Some(i) = stack.pop() {
            self.nodes[i].cost += delta;
            self.hot[i][2] = self.nodes[i].cost;
            self.nodes[i].stamp = stamp;
            stack.extend(self.nodes[i].children.iter().map(|&c| c as usize));
        }
    }

    /// Node where the root path of `y` entered the cell of `y`'s edge on an
    /// earlier, separate visit.
    fn reentry(&self, y: usize) -> Option<usize> {
        let c = self.nodes[y].via;
        let mut k = self.nodes[y].parent as usize;
        while k != NONE as usize && self.nodes[k].via == c {
            k = self.nodes[k].parent as usize;
        }
        while k != NONE as usize && self.nodes[k].via != c {
            k = self.nodes[k].parent as usize;
        }
        if k == NONE as usize {
            return None;
        }
        while self.nodes[k].parent != NONE && self.nodes[self.nodes[k].parent as usize].via == c {
            k = self.nodes[k].parent as usize;
        }
        match self.nodes[k].parent {
            NONE => Some(k),
            p => Some(p as usize),
        }
    }

    /// Moves every node below `x` whose root path re-enters a cell straight
    /// to the node where that cell was first entered. Returns the moved
    /// nodes.
    fn shortcut_reentries(&mut self, x: usize, stamp: u64) -> Vec<usize> {
        let mut moved = Vec::new();
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            if let Some(a) = self.reentry(y) {
                let cost = self.reach(a, self.nodes[y].point);
                let via = self.nodes[y].via;
                self.attach(y, a, via, cost, stamp);
                moved.push(y);
            }
            stack.extend(self.nodes[y].children.iter().map(|&c| c as usize));
        }
        moved
    }

    /// Subtree of `i` including `i`.
    pub fn subtree(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![i];
        while let Some(j) = stack.pop() {
            out.push(j);
            stack.extend(self.nodes[j].children.iter().map(|&c| c as usize));
        }
        out
    }

    /// Root-to-node points.
    pub fn backtrack(&self, i: usize) -> Vec<Point2> {
        let mut pts = Vec::new();
        let mut k = i;
        while k != NONE as usize {
            pts.push(self.nodes[k].point);
            k = self.nodes[k].parent as usize;
        }
        pts.reverse();
        pts
    }

    /// Cells of the root path in order, consecutive repeats merged.
    pub fn cell_sequence(&self, i: usize) -> Vec<usize> {
        let mut seq = Vec::new();
        let mut k = i;
        while k != NONE as usize {
            let v = self.nodes[k].via;
            if seq.last() != Some(&v) {
                seq.push(v);
            }
            k = self.nodes[k].parent as usize;
        }
        seq.reverse();
        seq
    }

    /// Whether the root path of `i` visits some cell twice.
    pub fn repeats_cell(&self, i: usize) -> bool {
        let mut s = self.cell_sequence(i);
        s.sort_unstable();
        s.windows(2).any(|w| w[0] == w[1])
    }

    /// Stored cost matches the root path length.
    pub fn cost_consistent(&self, i: usize) -> bool {
        let p = self.nodes[i].parent;
        if p == NONE {
            return self.nodes[i].cost == 0.0;
        }
        let pn = &self.nodes[p as usize];
        let expect = pn.cost + pn.point.dist(self.nodes[i].point);
        (expect - self.nodes[i].cost).abs() <= 1e-9 * expect.max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn push(t: &mut PlanTree, p: Point2, parent: usize, via: usize) -> usize {
        let id = t.nodes.len();
        let cost = t.reach(parent, p);
        t.hot.push([p.x, p.y, cost]);
        t.nodes.push(TreeNode {
            point: p,
            cutline: Some(id),
            parent: parent as u32,
            via,
            cost,
            stamp: 0,
            children: Vec::new(),
        });
        t.nodes[parent].children.push(id as u32);
        id
    }

    #[test]
    fn reentry_goes_back_to_the_first_entry() {
        let mut t = PlanTree::new(Point2::new(0.0, 0.0), 0, 3);
        let a = push(&mut t, Point2::new(1.0, 0.0), 0, 0);
        let b = push(&mut t, Point2::new(1.0, 1.0), a, 1);
        let c = push(&mut t, Point2::new(0.5, 1.0), b, 0);
        let d = push(&mut t, Point2::new(0.0, 2.0), c, 2);
        assert!(t.repeats_cell(d));
        assert_eq!(t.reentry(c), Some(0));
        assert_eq!(t.reentry(b), None);
        assert_eq!(t.shortcut_reentries(b, 7), vec![c]);
        assert_eq!(t.node(c).parent, 0);
        assert_eq!(t.cell_sequence(d), vec![0, 2]);
        assert!((0..t.len()).all(|i| t.cost_consistent(i) && !t.repeats_cell(i)));
        assert_eq!(t.node(d).stamp, 7);
    }
}
