//! Quenched evaluation of `B_n(u) = R_n Σ_{v child of u} g(B_n(v))` on
//! Galton–Watson trees of depth `n`, with `B_n = +∞` on the leaves.
//!
//! [`evaluate_root`] streams the tree depth-first and never materializes it.
//! [`ExplicitTree`] is the materialized counterpart used by the exact oracles;
//! [`ExplicitTree::sample`] draws child counts in the same order as the
//! streaming evaluator, so both see the same realization for a given
//! `(master_seed, sample_index)`.

use serde::{Deserialize, Serialize};

use crate::concave::{KernelKind, RecursionFunction};
use crate::error::{Error, Result};
use crate::offspring::OffspringDistribution;
use crate::rcm::critical_point;
use crate::rng::Stream;

/// Default per-sample node budget of the streaming evaluator.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;
/// Default node cap for materialized trees.
pub const DEFAULT_TREE_CAP: usize = 1_000_000;

/// How the inverse temperature `β_n` of a random cluster cell depends on `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum BetaRule {
    Fixed { beta: f64 },
    /// `β_n = factor · β_c`.
    CriticalFraction { factor: f64 },
    /// `β_n = β_c + c · n^(-theta)`.
    NearCritical { c: f64, theta: f64 },
}

/// Per-depth resistance parameter `R_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "snake_case", deny_unknown_fields)]
pub enum RSchedule {
    Fixed { r: f64 },
    /// `R_n = 1/m`.
    CriticalProduct,
    /// `m R_n = 1 + c · n^(-theta)`.
    Window { c: f64, theta: f64 },
    /// Random cluster cell: `R_n = ψ_q(β_n)` and the kernel is `g_{β_n}`.
    RcmBeta(BetaRule),
}

impl RSchedule {
    /// Resolve `(kernel, R_n)` at depth `n` for offspring mean `m`.
    pub fn resolve(
        &self,
        kernel: &RecursionFunction,
        m: f64,
        n: usize,
    ) -> Result<(RecursionFunction, f64)> {
        let nf = n as f64;
        let r = match *self {
            RSchedule::Fixed { r } => r,
            RSchedule::CriticalProduct => 1.0 / m,
            RSchedule::Window { c, theta } => (1.0 + c * nf.powf(-theta)) / m,
            RSchedule::RcmBeta(rule) => {
                let q = match kernel.kind() {
                    KernelKind::Rcm { q, .. } => q,
                    KernelKind::Conductance { .. } => {
                        return Err(Error::Config(
                            "a beta schedule needs a random cluster kernel".into(),
                        ))
                    }
                };
                let beta = match rule {
                    BetaRule::Fixed { beta } => beta,
                    BetaRule::CriticalFraction { factor } => factor * critical_point(m, q)?.0,
                    BetaRule::NearCritical { c, theta } => {
                        critical_point(m, q)?.0 + c * nf.powf(-theta)
                    }
                };
                let g = RecursionFunction::rcm(beta, q)?;
                let r = g.psi_beta();
                return Ok((g, r));
            }
        };
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Config(format!("R_n = {r} at n = {n} is not positive")));
        }
        Ok((*kernel, r))
    }
}

/// One quenched-recursion cell.
#[derive(Debug, Clone)]
pub struct RecursionConfig {
    pub dist: OffspringDistribution,
    pub kernel: RecursionFunction,
    pub depth: usize,
    pub schedule: RSchedule,
}

impl RecursionConfig {
    pub fn new(
        dist: OffspringDistribution,
        kernel: RecursionFunction,
        depth: usize,
        schedule: RSchedule,
    ) -> Self {
        Self {
            dist,
            kernel,
            depth,
            schedule,
        }
    }

    /// The kernel and `R_n` in effect at this cell's depth.
    pub fn resolve(&self) -> Result<(RecursionFunction, f64)> {
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        let (g, r) = self.schedule.resolve(&self.kernel, self.dist.mean(), self.depth)?;
        let scale = (self.dist.mean() * r).powf(self.depth as f64);
        if scale < 1e-200 {
            return Err(Error::ScaleUnderflow { scale });
        }
        Ok((g, r))
    }
}

/// Root value of one sampled tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootEvaluation {
    /// `B_n(ρ)`.
    pub b_root: f64,
    /// `Z_n`, the number of leaves.
    pub z_n: u64,
    pub total_nodes: u64,
    /// `W_n = Z_n / m^n`.
    pub w_n: f64,
}

/// Knobs of the streaming evaluator.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub node_budget: u64,
    /// Value placed on the leaves; `+∞` is the recursion's boundary condition.
    pub boundary: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
            boundary: f64::INFINITY,
        }
    }
}

struct Frame {
    remaining: u64,
    sum: f64,
}

/// `B_n(ρ)` for sample `sample_index`, by a post-order streaming DFS.
pub fn evaluate_root(
    config: &RecursionConfig,
    master_seed: u64,
    sample_index: u64,
) -> Result<RootEvaluation> {
    evaluate_root_with(config, master_seed, sample_index, EvalOptions::default())
}

pub fn evaluate_root_with(
    config: &RecursionConfig,
    master_seed: u64,
    sample_index: u64,
    options: EvalOptions,
) -> Result<RootEvaluation> {
    let (g, r) = config.resolve()?;
    let n = config.depth;
    let leaf_value = g.eval(options.boundary);
    let mut stream = Stream::for_tree(master_seed, sample_index);
    let mut stack: Vec<Frame> = Vec::with_capacity(n);
    let mut z_n = 0u64;
    let mut nodes = 1u64;
    stack.push(Frame {
        remaining: config.dist.sample(&mut stream),
        sum: 0.0,
    });
    loop {
        let depth = stack.len();
        let top = stack.last_mut().expect("stack holds the current path");
        if top.remaining > 0 {
            top.remaining -= 1;
            nodes += 1;
            if nodes > options.node_budget {
                return Err(Error::NodeBudget {
                    budget: options.node_budget,
                    depth: n,
                    sample: sample_index,
                });
            }
            if depth == n {
                top.sum += leaf_value;
                z_n += 1;
            } else {
                let d = config.dist.sample(&mut stream);
                stack.push(Frame { remaining: d, sum: 0.0 });
            }
        } else {
            let value = r * top.sum;
            stack.pop();
            match stack.last_mut() {
                Some(parent) => parent.sum += g.eval(value),
                None => {
                    return Ok(RootEvaluation {
                        b_root: value,
                        z_n,
                        total_nodes: nodes,
                        w_n: z_n as f64 / config.dist.mean().powi(n as i32),
                    })
                }
            }
        }
    }
}

/// A materialized rooted tree whose leaves all sit at depth `depth`.
///
/// Nodes are stored in depth-first preorder (root is node 0), so every child
/// has a larger index than its parent and reverse order is a post-order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitTree {
    depth: usize,
    node_depth: Vec<u32>,
    parent: Vec<usize>,
    child_start: Vec<usize>,
    child_list: Vec<usize>,
}

impl ExplicitTree {
    /// Build from the child counts of internal nodes listed in preorder.
    pub fn from_preorder_counts(depth: usize, counts: &[u64]) -> Result<Self> {
        let mut it = counts.iter().copied();
        let tree = Self::build(depth, DEFAULT_TREE_CAP, || {
            it.next().ok_or_else(|| Error::Config("too few child counts for the tree".into()))
        })?;
        if it.next().is_some() {
            return Err(Error::Config("too many child counts for the tree".into()));
        }
        Ok(tree)
    }

    /// Sample a Galton–Watson tree with the same draw order as [`evaluate_root`].
    pub fn sample(
        dist: &OffspringDistribution,
        depth: usize,
        master_seed: u64,
        sample_index: u64,
    ) -> Result<Self> {
        Self::sample_capped(dist, depth, master_seed, sample_index, DEFAULT_TREE_CAP)
    }

    pub fn sample_capped(
        dist: &OffspringDistribution,
        depth: usize,
        master_seed: u64,
        sample_index: u64,
        cap: usize,
    ) -> Result<Self> {
        let mut stream = Stream::for_tree(master_seed, sample_index);
        Self::build(depth, cap, || Ok(dist.sample(&mut stream)))
    }

    /// Sample from an arbitrary stream (used by test corpora).
    pub fn sample_from(
        dist: &OffspringDistribution,
        depth: usize,
        stream: &mut Stream,
        cap: usize,
    ) -> Result<Self> {
        Self::build(depth, cap, || Ok(dist.sample(stream)))
    }

    /// Complete `d`-ary tree of depth `n`.
    pub fn full(d: u64, depth: usize) -> Result<Self> {
        Self::build(depth, DEFAULT_TREE_CAP, || Ok(d))
    }

    /// A single path of `depth` edges.
    pub fn path(depth: usize) -> Result<Self> {
        Self::full(1, depth)
    }

    /// Root with `d` leaf children.
    pub fn star(d: u64) -> Result<Self> {
        Self::full(d, 1)
    }

    fn build(
        depth: usize,
        cap: usize,
        mut next_count: impl FnMut() -> Result<u64>,
    ) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Config("tree depth must be at least 1".into()));
        }
        let mut node_depth = vec![0u32];
        let mut parent = vec![usize::MAX];
        let mut children: Vec<Vec<usize>> = vec![Vec::new()];
        // (node, remaining children)
        let mut stack: Vec<(usize, u64)> = vec![(0, next_count()?)];
        while let Some(top) = stack.last_mut() {
            if top.1 == 0 {
                stack.pop();
                continue;
            }
            top.1 -= 1;
            let p = top.0;
            let id = node_depth.len();
            if id >= cap {
                return Err(Error::CapExceeded {
                    what: "explicit tree",
                    size: id as u64 + 1,
                    cap: cap as u64,
                });
            }
            let d = node_depth[p] + 1;
            node_depth.push(d);
            parent.push(p);
            children.push(Vec::new());
            children[p].push(id);
            if (d as usize) < depth {
                let count = next_count()?;
                if count == 0 {
                    return Err(Error::Config("internal nodes need at least one child".into()));
                }
                stack.push((id, count));
            }
        }
        let mut child_start = Vec::with_capacity(children.len() + 1);
        let mut child_list = Vec::with_capacity(children.len().saturating_sub(1));
        for c in &children {
            child_start.push(child_list.len());
            child_list.extend_from_slice(c);
        }
        child_start.push(child_list.len());
        Ok(Self {
            depth,
            node_depth,
            parent,
            child_start,
            child_list,
        })
    }

    /// Extend every leaf by one generation, child counts drawn in preorder of
    /// the current leaves.
    pub fn grow(&self, mut next_count: impl FnMut() -> u64) -> Result<Self> {
        let mut counts = Vec::new();
        for u in 0..self.len() {
            if self.is_leaf(u) {
                counts.push(next_count());
            } else {
                counts.push(self.children(u).len() as u64);
            }
        }
        Self::from_preorder_counts(self.depth + 1, &counts)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.node_depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_depth.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.len() - 1
    }

    pub fn node_depth(&self, u: usize) -> usize {
        self.node_depth[u] as usize
    }

    /// Parent of `u`; `None` for the root.
    pub fn parent(&self, u: usize) -> Option<usize> {
        (u != 0).then(|| self.parent[u])
    }

    pub fn children(&self, u: usize) -> &[usize] {
        &self.child_list[self.child_start[u]..self.child_start[u + 1]]
    }

    pub fn is_leaf(&self, u: usize) -> bool {
        self.child_start[u] == self.child_start[u + 1]
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&u| self.is_leaf(u))
    }

    /// `Z_n(v)`: number of depth-`n` descendants of each node.
    pub fn leaf_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.len()];
        for u in (0..self.len()).rev() {
            counts[u] = if self.is_leaf(u) {
                1
            } else {
                self.children(u).iter().map(|&v| counts[v]).sum()
            };
        }
        counts
    }

    /// `[Z_0, Z_1, ..., Z_n]`.
    pub fn generation_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.depth + 1];
        for &d in &self.node_depth {
            sizes[d as usize] += 1;
        }
        sizes
    }

    /// Child counts of the internal nodes, in preorder.
    pub fn preorder_counts(&self) -> Vec<u64> {
        (0..self.len())
            .filter(|&u| !self.is_leaf(u))
            .map(|u| self.children(u).len() as u64)
            .collect()
    }
}

/// `B(u)` at every node, by post-order over the explicit tree.
pub fn evaluate_on_tree(tree: &ExplicitTree, g: &RecursionFunction, r: f64) -> Vec<f64> {
    evaluate_on_tree_with_boundary(tree, g, r, f64::INFINITY)
}

/// As [`evaluate_on_tree`] with leaf value `boundary` instead of `+∞`.
pub fn evaluate_on_tree_with_boundary(
    tree: &ExplicitTree,
    g: &RecursionFunction,
    r: f64,
    boundary: f64,
) -> Vec<f64> {
    let mut values = vec![0.0; tree.len()];
    for u in (0..tree.len()).rev() {
        values[u] = if tree.is_leaf(u) {
            boundary
        } else {
            let sum = tree
                .children(u)
                .iter()
                .fold(0.0, |acc, &v| acc + g.eval(values[v]));
            r * sum
        };
    }
    values
}
