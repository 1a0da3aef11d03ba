//! p-conductance between the root and the leaves of a finite tree whose edge
//! into `v` carries resistance `R_v = R^(-|v|)`.
//!
//! With `s = 1/(p-1)` and `q = p/(p-1)` the energy of a unit flow `θ` is
//! `E(θ) = Σ_v R_v^s θ(v)^q`, and Thomson's principle gives
//! `C = (min_θ E(θ))^(-1/s)`. The recursion of [`crate::tree`] with the
//! conductance kernel computes `C` exactly; [`min_flow_energy`] is an
//! independent numerical check.

use crate::concave::RecursionFunction;
use crate::error::{Error, Result};
use crate::tree::{evaluate_on_tree, ExplicitTree};

/// Edge cap of [`min_flow_energy`].
pub const FLOW_EDGE_CAP: usize = 10_000;
/// Iteration cap of [`min_flow_energy`].
pub const FLOW_ITERATION_CAP: usize = 100_000;

/// `s = 1/(p-1)` and `q = p/(p-1)`.
pub fn exponents(p: f64) -> Result<(f64, f64)> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p-conductance needs p > 1, got {p}")));
    }
    Ok((1.0 / (p - 1.0), p / (p - 1.0)))
}

/// `p = (1+s)/s`.
pub fn p_from_s(s: f64) -> f64 {
    (1.0 + s) / s
}

/// Series law for p-resistances.
pub fn series_resistance(r1: f64, r2: f64, s: f64) -> f64 {
    assert!(r1 >= 0.0 && r2 >= 0.0, "resistances must be nonnegative");
    (r1.powf(s) + r2.powf(s)).powf(1.0 / s)
}

/// Parallel law for p-conductances.
pub fn parallel_conductance(c1: f64, c2: f64) -> f64 {
    assert!(c1 >= 0.0 && c2 >= 0.0, "conductances must be nonnegative");
    c1 + c2
}

/// `C_n(ρ)` by the conductance recursion.
pub fn conductance_exact(tree: &ExplicitTree, s: f64, r: f64) -> Result<f64> {
    let g = RecursionFunction::conductance(s)?;
    Ok(evaluate_on_tree(tree, &g, r)[0])
}

/// Per-edge weights `R_v^s = R^(-s|v|)`, indexed by child node.
fn edge_weights(tree: &ExplicitTree, s: f64, r: f64) -> Vec<f64> {
    let ln_r = r.ln();
    (0..tree.len())
        .map(|v| if v == 0 { 0.0 } else { (-s * ln_r * tree.node_depth(v) as f64).exp() })
        .collect()
}

/// A unit flow from the root to the leaves, one value per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowAssignment {
    /// `flow[v]` is the flow on the edge from `parent(v)` to `v`; `flow[0]` is unused.
    pub flow: Vec<f64>,
}

impl FlowAssignment {
    /// Flow putting mass `leaf_mass[i]` on the `i`-th leaf (in node order).
    pub fn from_leaf_masses(tree: &ExplicitTree, leaf_mass: &[f64]) -> Self {
        let mut flow = vec![0.0; tree.len()];
        for (u, &mass) in tree.leaves().zip(leaf_mass) {
            flow[u] = mass;
        }
        for u in (0..tree.len()).rev() {
            if !tree.is_leaf(u) {
                flow[u] = tree.children(u).iter().map(|&v| flow[v]).sum();
            }
        }
        flow[0] = 0.0;
        Self { flow }
    }

    /// `Σ_{v child of ρ} θ(v)`.
    pub fn strength(&self, tree: &ExplicitTree) -> f64 {
        tree.children(0).iter().map(|&v| self.flow[v]).sum()
    }

    /// Largest `|θ(u) - Σ_{v child of u} θ(v)|` over internal non-root nodes.
    pub fn kirchhoff_residual(&self, tree: &ExplicitTree) -> f64 {
        (1..tree.len())
            .filter(|&u| !tree.is_leaf(u))
            .map(|u| {
                let out: f64 = tree.children(u).iter().map(|&v| self.flow[v]).sum();
                (self.flow[u] - out).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `Σ_v R_v^s |θ(v)|^q`.
    pub fn energy(&self, tree: &ExplicitTree, p: f64, r: f64) -> Result<f64> {
        let (s, q) = exponents(p)?;
        let w = edge_weights(tree, s, r);
        Ok((1..tree.len()).map(|v| w[v] * self.flow[v].abs().powf(q)).sum())
    }
}

/// Energy of the flow splitting at each node in proportion to leaf counts,
/// `Σ_v R_v^s (Z_n(v)/Z_n)^q`.
pub fn uniform_flow_energy(tree: &ExplicitTree, p: f64, r: f64) -> Result<f64> {
    let (s, q) = exponents(p)?;
    let w = edge_weights(tree, s, r);
    let z = tree.leaf_counts();
    let total = z[0] as f64;
    Ok((1..tree.len()).map(|v| w[v] * (z[v] as f64 / total).powf(q)).sum())
}

/// Minimal unit-flow energy and a minimizing flow.
#[derive(Debug, Clone)]
pub struct FlowOptimum {
    pub energy: f64,
    pub flow: FlowAssignment,
    pub iterations: usize,
    /// Frank–Wolfe duality gap at the returned flow; bounds `energy - min`.
    pub gap: f64,
}

/// Minimize the flow energy over unit flows.
///
/// A unit flow on a tree is fixed by the amount ending at each leaf, and any
/// probability vector on the leaves is feasible. The energy is convex in that
/// vector. Starting from the uniform flow, damped Newton steps are taken on
/// the edge flows: the quadratic model `Σ_v (G_v t_v + D_v t_v^2 / 2)` is
/// minimized over zero-strength perturbations `t` by one bottom-up and one
/// top-down pass, steps stay strictly inside the positive orthant, and an
/// Armijo search guards the energy. Iteration stops once the Frank–Wolfe gap
/// in the leaf variables, an upper bound on the suboptimality, drops below
/// `tol · (1 + energy)`.
pub fn min_flow_energy(tree: &ExplicitTree, p: f64, r: f64, tol: f64) -> Result<FlowOptimum> {
    let (s, q) = exponents(p)?;
    let edges = tree.edge_count();
    if edges > FLOW_EDGE_CAP {
        return Err(Error::CapExceeded {
            what: "flow optimization edges",
            size: edges as u64,
            cap: FLOW_EDGE_CAP as u64,
        });
    }
    let w = edge_weights(tree, s, r);
    let n = tree.len();
    let energy_of = |flow: &[f64]| -> f64 { (1..n).map(|v| w[v] * flow[v].powf(q)).sum() };

    let z = tree.leaf_counts();
    let total = z[0] as f64;
    let mut flow: Vec<f64> = z.iter().map(|&c| c as f64 / total).collect();
    let mut energy = energy_of(&flow);
    let mut grad = vec![0.0; n];
    let mut curv = vec![0.0; n];
    let mut lin = vec![0.0; n];
    let mut quad = vec![0.0; n];
    let mut step = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut path = vec![0.0; n];
    let mut gap = f64::INFINITY;

    for iteration in 0..=FLOW_ITERATION_CAP {
        for v in 1..n {
            grad[v] = w[v] * q * flow[v].powf(q - 1.0);
            curv[v] = w[v] * q * (q - 1.0) * flow[v].powf(q - 2.0);
        }
        // Frank–Wolfe gap: leaf gradient is the path sum of edge gradients.
        let (mut dot, mut min) = (0.0, f64::INFINITY);
        for v in 1..n {
            path[v] = path[tree.parent(v).expect("non-root")] + grad[v];
            if tree.is_leaf(v) {
                dot += path[v] * flow[v];
                min = min.min(path[v]);
            }
        }
        gap = dot - min;
        if gap <= tol * (1.0 + energy) {
            flow[0] = 0.0;
            return Ok(FlowOptimum {
                energy,
                flow: FlowAssignment { flow },
                iterations: iteration,
                gap,
            });
        }
        // Bottom-up: the cost of pushing t more through edge v is
        // lin[v] t + quad[v] t^2 / 2 after optimizing inside the subtree.
        for v in (1..n).rev() {
            let (a, b) = if tree.is_leaf(v) {
                (0.0, 0.0)
            } else {
                split_quadratics(tree.children(v), &lin, &quad)
            };
            lin[v] = grad[v] + a;
            quad[v] = curv[v] + b;
        }
        // Top-down: distribute zero net perturbation at the root.
        let mut incoming = vec![0.0; n];
        for u in 0..n {
            if tree.is_leaf(u) {
                continue;
            }
            let kids = tree.children(u);
            let inv: f64 = kids.iter().map(|&v| 1.0 / quad[v]).sum();
            let lambda = (incoming[u] + kids.iter().map(|&v| lin[v] / quad[v]).sum::<f64>()) / inv;
            for &v in kids {
                incoming[v] = (lambda - lin[v]) / quad[v];
            }
        }
        step.copy_from_slice(&incoming);
        let slope: f64 = (1..n).map(|v| grad[v] * step[v]).sum();
        // Largest step keeping every flow positive.
        let mut t = 1.0f64;
        for v in 1..n {
            if step[v] < 0.0 {
                t = t.min(-0.99 * flow[v] / step[v]);
            }
        }
        loop {
            for v in 0..n {
                trial[v] = flow[v] + t * step[v];
            }
            // Once the predicted decrease is at rounding level, take the step.
            if energy_of(&trial) <= energy + 1e-4 * t * slope || -slope <= 1e-15 * energy || t < 1e-30 {
                break;
            }
            t *= 0.5;
        }
        // Recompute interior flows from the leaves so Kirchhoff holds exactly.
        for u in (0..n).rev() {
            flow[u] = if tree.is_leaf(u) {
                trial[u]
            } else {
                tree.children(u).iter().map(|&v| flow[v]).sum()
            };
        }
        let strength = flow[0];
        for f in flow.iter_mut() {
            *f /= strength;
        }
        energy = energy_of(&flow);
    }
    let grad_norm = (1..n).map(|v| grad[v] * grad[v]).sum::<f64>().sqrt();
    Err(Error::NonConvergence {
        iterations: FLOW_ITERATION_CAP,
        gap,
        grad_norm,
    })
}

/// Combine child quadratics `lin_i t_i + quad_i t_i^2 / 2` minimized subject
/// to `Σ t_i = t` into one quadratic in `t`.
fn split_quadratics(kids: &[usize], lin: &[f64], quad: &[f64]) -> (f64, f64) {
    let inv: f64 = kids.iter().map(|&v| 1.0 / quad[v]).sum();
    let weighted: f64 = kids.iter().map(|&v| lin[v] / quad[v]).sum();
    (weighted / inv, 1.0 / inv)
}
