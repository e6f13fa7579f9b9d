//! d-separation by reachability ("Bayes-ball"): a single traversal over
//! (node, direction) states, linear in the size of the graph.

use std::collections::VecDeque;

use super::{GraphError, MGraph};

impl MGraph {
    /// Returns true iff every path between `x` and `y` is blocked by `z`.
    ///
    /// The three sets must be pairwise disjoint; an empty `x` or `y` is
    /// trivially separated.
    pub fn d_separated(&self, x: &[&str], y: &[&str], z: &[&str]) -> Result<bool, GraphError> {
        let (xs, ys, zs) = (self.idx_set(x)?, self.idx_set(y)?, self.idx_set(z)?);
        let mut owner = vec![0u8; self.len()];
        for (tag, set) in [(1u8, &xs), (2, &ys), (3, &zs)] {
            for &v in set {
                if owner[v] != 0 && owner[v] != tag {
                    return Err(GraphError::OverlappingSets(self.names[v].clone()));
                }
                owner[v] = tag;
            }
        }
        Ok(self.d_separated_idx(&xs, &ys, &zs))
    }

    pub(crate) fn d_separated_idx(&self, xs: &[usize], ys: &[usize], zs: &[usize]) -> bool {
        let reach = self.reachable_from(xs, zs);
        !ys.iter().any(|&y| reach[y])
    }

    /// Nodes d-connected to some member of `sources` given `observed`.
    fn reachable_from(&self, sources: &[usize], observed: &[usize]) -> Vec<bool> {
        let n = self.len();
        let mut in_z = vec![false; n];
        for &v in observed {
            in_z[v] = true;
        }

        // Ancestors of the conditioning set (including itself) open colliders.
        let mut anc_z = in_z.clone();
        let mut stack: Vec<usize> = observed.to_vec();
        while let Some(v) = stack.pop() {
            for &p in &self.parents[v] {
                if !anc_z[p] {
                    anc_z[p] = true;
                    stack.push(p);
                }
            }
        }

        const UP: usize = 0; // arrived from a child
        const DOWN: usize = 1; // arrived from a parent
        let mut visited = vec![[false; 2]; n];
        let mut reach = vec![false; n];
        let mut queue: VecDeque<(usize, usize)> = sources.iter().map(|&s| (s, UP)).collect();

        while let Some((v, dir)) = queue.pop_front() {
            if visited[v][dir] {
                continue;
            }
            visited[v][dir] = true;
            if !in_z[v] {
                reach[v] = true;
            }
            if dir == UP && !in_z[v] {
                queue.extend(self.parents[v].iter().map(|&p| (p, UP)));
                queue.extend(self.children[v].iter().map(|&c| (c, DOWN)));
            } else if dir == DOWN {
                if !in_z[v] {
                    queue.extend(self.children[v].iter().map(|&c| (c, DOWN)));
                }
                if anc_z[v] {
                    queue.extend(self.parents[v].iter().map(|&p| (p, UP)));
                }
            }
        }
        reach
    }
}
