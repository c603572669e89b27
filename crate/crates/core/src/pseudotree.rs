//! DFS pseudo trees and the structural sets the solver and the checks rely on.

use std::collections::BTreeSet;
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::model::Problem;

/// A DFS arrangement of the constraint graph. Immutable once built; all
/// derived sets are computed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoTree {
    root: usize,
    parent: Vec<Option<usize>>,
    pseudo_parents: Vec<BTreeSet<usize>>,
    children: Vec<BTreeSet<usize>>,
    pseudo_children: Vec<BTreeSet<usize>>,
    depth: Vec<usize>,
    /// Children in the order the DFS discovered them.
    visit_order: Vec<Vec<usize>>,
    descendants: Vec<BTreeSet<usize>>,
    separators: Vec<BTreeSet<usize>>,
    interface: Vec<BTreeSet<usize>>,
}

impl PseudoTree {
    /// Root is the highest-degree agent (lowest index on ties); children are
    /// visited by descending degree, then ascending index.
    pub fn build<C: Cost>(problem: &Problem<C>) -> Result<Self> {
        let root = (0..problem.n_agents())
            .max_by_key(|&a| (problem.degree(a), std::cmp::Reverse(a)))
            .unwrap_or(0);
        Self::build_rooted(problem, root)
    }

    /// Same visiting rule as [`PseudoTree::build`] with an explicit root.
    pub fn build_rooted<C: Cost>(problem: &Problem<C>, root: usize) -> Result<Self> {
        if root >= problem.n_agents() {
            return Err(Error::InvalidProblem(format!(
                "root {root} is not an agent"
            )));
        }
        let order = |u: usize| {
            let mut ns: Vec<usize> = problem.neighbors(u).into_iter().collect();
            ns.sort_by_key(|&v| (std::cmp::Reverse(problem.degree(v)), v));
            ns
        };
        Self::dfs(problem, root, order)
    }

    /// DFS from `root` visiting neighbors in ascending index order; on a
    /// path numbered from the root this yields the path itself.
    pub fn build_by_index<C: Cost>(problem: &Problem<C>, root: usize) -> Result<Self> {
        if root >= problem.n_agents() {
            return Err(Error::InvalidProblem(format!(
                "root {root} is not an agent"
            )));
        }
        Self::dfs(problem, root, |u| {
            problem.neighbors(u).into_iter().collect()
        })
    }

    /// Uniformly random root and neighbor order, reproducible from `seed`.
    pub fn build_randomized<C: Cost>(problem: &Problem<C>, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = problem.n_agents();
        let mut orders: Vec<Vec<usize>> = (0..n)
            .map(|u| problem.neighbors(u).into_iter().collect())
            .collect();
        for o in &mut orders {
            o.shuffle(&mut rng);
        }
        let root = *(0..n).collect::<Vec<_>>().choose(&mut rng).unwrap_or(&0);
        Self::dfs(problem, root, |u| orders[u].clone())
    }

    fn dfs<C: Cost>(
        problem: &Problem<C>,
        root: usize,
        mut neighbor_order: impl FnMut(usize) -> Vec<usize>,
    ) -> Result<Self> {
        let n = problem.n_agents();
        let mut parent = vec![None; n];
        let mut pseudo_parents = vec![BTreeSet::new(); n];
        let mut children = vec![BTreeSet::new(); n];
        let mut pseudo_children = vec![BTreeSet::new(); n];
        let mut depth = vec![0; n];
        let mut visit_order = vec![Vec::new(); n];
        let mut visited = vec![false; n];
        let mut on_stack = vec![false; n];

        // explicit stack of (agent, its neighbor order, next neighbor position)
        let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(root, neighbor_order(root), 0)];
        visited[root] = true;
        on_stack[root] = true;
        while let Some(top) = stack.last_mut() {
            let (u, ref ns, ref mut pos) = *top;
            if *pos == ns.len() {
                on_stack[u] = false;
                stack.pop();
                continue;
            }
            let v = ns[*pos];
            *pos += 1;
            if !visited[v] {
                visited[v] = true;
                on_stack[v] = true;
                parent[v] = Some(u);
                depth[v] = depth[u] + 1;
                children[u].insert(v);
                visit_order[u].push(v);
                stack.push((v, neighbor_order(v), 0));
            } else if on_stack[v] && parent[u] != Some(v) {
                // back edge to an ancestor
                pseudo_parents[u].insert(v);
                pseudo_children[v].insert(u);
            }
        }
        if let Some(missing) = visited.iter().position(|&s| !s) {
            return Err(Error::Disconnected(missing));
        }

        let mut tree = Self {
            root,
            parent,
            pseudo_parents,
            children,
            pseudo_children,
            depth,
            visit_order,
            descendants: vec![BTreeSet::new(); n],
            separators: vec![BTreeSet::new(); n],
            interface: vec![BTreeSet::new(); n],
        };
        tree.derive_sets(problem);
        Ok(tree)
    }

    fn derive_sets<C: Cost>(&mut self, problem: &Problem<C>) {
        let n = self.n_agents();
        // post-order: deepest first
        let mut by_depth: Vec<usize> = (0..n).collect();
        by_depth.sort_by_key(|&a| std::cmp::Reverse(self.depth[a]));
        for &a in &by_depth {
            let mut desc = BTreeSet::new();
            for &c in &self.children[a] {
                desc.insert(c);
                desc.extend(self.descendants[c].iter().copied());
            }
            self.descendants[a] = desc;
        }
        for a in 0..n {
            let ancestors: BTreeSet<usize> = self.ancestors(a).into_iter().collect();
            let subtree = std::iter::once(a).chain(self.descendants[a].iter().copied());
            let sep: BTreeSet<usize> = subtree
                .flat_map(|x| problem.neighbors(x))
                .filter(|y| ancestors.contains(y))
                .collect();
            let id = self.descendants[a]
                .iter()
                .copied()
                .filter(|&x| problem.neighbors(x).iter().any(|y| sep.contains(y)))
                .collect();
            self.separators[a] = sep;
            self.interface[a] = id;
        }
    }

    pub fn n_agents(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn pseudo_parents(&self, i: usize) -> &BTreeSet<usize> {
        &self.pseudo_parents[i]
    }

    pub fn children(&self, i: usize) -> &BTreeSet<usize> {
        &self.children[i]
    }

    /// Children in DFS discovery order.
    pub fn children_in_visit_order(&self, i: usize) -> &[usize] {
        &self.visit_order[i]
    }

    pub fn pseudo_children(&self, i: usize) -> &BTreeSet<usize> {
        &self.pseudo_children[i]
    }

    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.children[i].is_empty()
    }

    /// Proper ancestors, nearest first.
    pub fn ancestors(&self, i: usize) -> Vec<usize> {
        std::iter::successors(self.parent[i], |&a| self.parent[a]).collect()
    }

    pub fn descendants(&self, i: usize) -> &BTreeSet<usize> {
        &self.descendants[i]
    }

    /// Ancestors constrained with `i` or one of its descendants.
    pub fn separators(&self, i: usize) -> &BTreeSet<usize> {
        &self.separators[i]
    }

    /// Descendants of `i` constrained with some member of `Sep(i)`.
    pub fn interface_descendants(&self, i: usize) -> &BTreeSet<usize> {
        &self.interface[i]
    }

    /// Parent plus pseudo parents.
    pub fn all_parents(&self, i: usize) -> BTreeSet<usize> {
        let mut ap = self.pseudo_parents[i].clone();
        ap.extend(self.parent[i]);
        ap
    }

    /// Children plus pseudo children.
    pub fn lower_neighbors(&self, i: usize) -> BTreeSet<usize> {
        self.children[i]
            .union(&self.pseudo_children[i])
            .copied()
            .collect()
    }

    /// The shallowest agent among the (pseudo) parents of `x`: the one that
    /// eliminates it. `None` for the root.
    pub fn highest_parent(&self, x: usize) -> Option<usize> {
        self.all_parents(x)
            .into_iter()
            .min_by_key(|&a| self.depth[a])
    }

    /// Variables in branch `c` whose highest (pseudo) parent is `i`.
    pub fn elimination_set(&self, i: usize, c: usize) -> Result<BTreeSet<usize>> {
        if !self.children[i].contains(&c) {
            return Err(Error::NotAChild(c, i));
        }
        Ok(std::iter::once(c)
            .chain(self.descendants[c].iter().copied())
            .filter(|&x| self.highest_parent(x) == Some(i))
            .collect())
    }

    /// `((PC(i) ∩ Desc(c)) ∪ {c}) \ ID(i)`; agrees with
    /// [`PseudoTree::elimination_set`] on every valid tree.
    pub fn elimination_set_formula(&self, i: usize, c: usize) -> Result<BTreeSet<usize>> {
        if !self.children[i].contains(&c) {
            return Err(Error::NotAChild(c, i));
        }
        let mut ev: BTreeSet<usize> = self.pseudo_children[i]
            .intersection(&self.descendants[c])
            .copied()
            .collect();
        ev.insert(c);
        Ok(ev.difference(&self.interface[i]).copied().collect())
    }

    /// Largest joint message width, `max |Sep(i)| + |ID(i)| + 1` over
    /// non-root agents; 1 for a single agent.
    pub fn induced_width(&self) -> usize {
        (0..self.n_agents())
            .filter(|&a| a != self.root)
            .map(|a| self.separators[a].len() + self.interface[a].len() + 1)
            .max()
            .unwrap_or(1)
    }

    /// Indented dump of the tree with each agent's role sets.
    pub fn dump(&self) -> String {
        fn set(s: &BTreeSet<usize>) -> String {
            let items: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            format!("{{{}}}", items.join(","))
        }
        let mut out = String::new();
        let mut stack = vec![self.root];
        while let Some(a) = stack.pop() {
            let _ = writeln!(
                out,
                "{}{} pp={} pc={} sep={} id={}",
                "  ".repeat(self.depth[a]),
                a,
                set(&self.pseudo_parents[a]),
                set(&self.pseudo_children[a]),
                set(&self.separators[a]),
                set(&self.interface[a]),
            );
            stack.extend(self.visit_order[a].iter().rev());
        }
        out
    }
}
