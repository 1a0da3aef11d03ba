//! Random cluster model with wired boundary on a finite tree.
//!
//! The probability `π_n(ρ)` that the root is connected to the (contracted)
//! boundary can be computed three ways, which the tests hold against each
//! other: the kernel recursion on `B = ψ_q⁻¹(π)`, the two-term partition
//! function recursion, and brute-force enumeration of edge configurations.

use std::collections::BTreeMap;

use crate::concave::RecursionFunction;
use crate::error::{Error, Result};
use crate::tree::{evaluate_on_tree, ExplicitTree};

/// Edge cap of [`connection_prob_enumerate`].
pub const ENUMERATION_EDGE_CAP: usize = 20;
/// Node cap of [`connection_prob_partition`].
pub const PARTITION_NODE_CAP: usize = 100_000;

/// `ψ_q(x) = (e^x - 1) / (e^x + q - 1)`, with `ψ_q(+∞) = 1`.
pub fn psi(q: f64, x: f64) -> f64 {
    assert!(x >= 0.0, "psi argument must be >= 0, got {x}");
    if x == f64::INFINITY {
        return 1.0;
    }
    if x > 1.0 {
        // Divide through by e^x to stay finite for large x.
        let e = (-x).exp();
        return (1.0 - e) / (1.0 + (q - 1.0) * e);
    }
    let em1 = x.exp_m1();
    em1 / (em1 + q)
}

/// `ψ_q⁻¹(y) = log((1 + (q-1) y) / (1 - y))` for `y ∈ [0, 1]`.
pub fn psi_inv(q: f64, y: f64) -> f64 {
    assert!((0.0..=1.0).contains(&y), "psi_inv argument must be in [0, 1], got {y}");
    if y == 1.0 {
        return f64::INFINITY;
    }
    ((q - 1.0) * y).ln_1p() - (-y).ln_1p()
}

/// `φ_q(x) = (1 - x) / (1 + (q-1) x)`, an involution of `[0, 1]`.
pub fn phi(q: f64, x: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "phi argument must be in [0, 1], got {x}");
    (1.0 - x) / (1.0 + (q - 1.0) * x)
}

/// `γ_{p,q} = p / (p + q(1-p))`, the connection probability across one edge.
pub fn gamma_pq(p: f64, q: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p) && q > 0.0, "gamma_pq needs p in [0,1], q > 0");
    p / (p + q * (1.0 - p))
}

/// `(β_c, p_c)` with `p_c = q/(q+m-1)` and `β_c = log((m+q-1)/(m-1))`.
pub fn critical_point(m: f64, q: f64) -> Result<(f64, f64)> {
    if !(m > 1.0 && m.is_finite()) {
        return Err(Error::Domain(format!("critical point needs m > 1, got {m}")));
    }
    if !(q > 0.0 && q <= 2.0) {
        return Err(Error::Unsupported(format!(
            "no critical point prediction for q = {q}; supported range is (0, 2]"
        )));
    }
    let beta_c = (q / (m - 1.0)).ln_1p();
    let p_c = q / (q + m - 1.0);
    Ok((beta_c, p_c))
}

/// Edge parameter `p` (equivalently `β = -log(1-p)`) and cluster weight `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RCMParams {
    p_edge: f64,
    q_cluster: f64,
    beta: f64,
}

impl RCMParams {
    pub fn new(p_edge: f64, q_cluster: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_edge) {
            return Err(Error::Domain(format!("p = {p_edge} not in [0, 1]")));
        }
        if !(q_cluster > 0.0 && q_cluster.is_finite()) {
            return Err(Error::Domain(format!("q = {q_cluster} must be > 0")));
        }
        Ok(Self {
            p_edge,
            q_cluster,
            beta: -(-p_edge).ln_1p(),
        })
    }

    pub fn from_beta(beta: f64, q_cluster: f64) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(Error::Domain(format!("beta = {beta} must be >= 0")));
        }
        let mut params = Self::new(-(-beta).exp_m1(), q_cluster)?;
        params.beta = beta;
        Ok(params)
    }

    pub fn p(&self) -> f64 {
        self.p_edge
    }

    pub fn q(&self) -> f64 {
        self.q_cluster
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// `π_n(ρ) = ψ_q(B_n(ρ))` with `B` from the kernel recursion, `R = ψ_q(β)`.
pub fn connection_prob_recursive(tree: &ExplicitTree, params: &RCMParams) -> Result<f64> {
    let (p, q) = (params.p(), params.q());
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let g = RecursionFunction::rcm(params.beta(), q)?;
    let b = evaluate_on_tree(tree, &g, g.psi_beta())[0];
    Ok(psi(q, b))
}

/// Output of the partition function recursion at the root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionResult {
    /// `Z(A) / Z`.
    pub pi: f64,
    /// `log Z`, the full wired partition function.
    pub log_z: f64,
}

/// Root connection probability from the recursions for `Z_u(A_u^c)` and
/// `q Z_u(A_u) + Z_u(A_u^c)`, renormalized at every node.
pub fn connection_prob_partition(tree: &ExplicitTree, params: &RCMParams) -> Result<f64> {
    Ok(partition_function(tree, params)?.pi)
}

pub fn partition_function(tree: &ExplicitTree, params: &RCMParams) -> Result<PartitionResult> {
    if tree.len() > PARTITION_NODE_CAP {
        return Err(Error::CapExceeded {
            what: "partition recursion nodes",
            size: tree.len() as u64,
            cap: PARTITION_NODE_CAP as u64,
        });
    }
    let (p, q) = (params.p(), params.q());
    let ln_q = q.ln();
    // Per node: c = Z(A^c)/Z and log Z.
    let mut c = vec![0.0; tree.len()];
    let mut log_z = vec![0.0; tree.len()];
    for u in (0..tree.len()).rev() {
        if tree.is_leaf(u) {
            c[u] = 0.0;
            log_z[u] = ln_q;
            continue;
        }
        let kids = tree.children(u);
        let mut ln_closed = 0.0;
        let mut ln_sum = 0.0;
        let mut ln_children = 0.0;
        for &v in kids {
            ln_closed += ((1.0 - p) + p / q * c[v]).ln();
            ln_sum += (1.0 + p * (1.0 / q - 1.0) * c[v]).ln();
            ln_children += log_z[v];
        }
        // Shared scale q^(2-d) Π Z_v cancels from c and π.
        let scale = (2.0 - kids.len() as f64) * ln_q + ln_children;
        let shift = ln_closed.max(ln_sum);
        let closed = (ln_closed - shift).exp();
        let sum = (ln_sum - shift).exp();
        let open = (sum - closed).max(0.0) / q;
        let total = open + closed;
        c[u] = closed / total;
        log_z[u] = scale + shift + total.ln();
    }
    Ok(PartitionResult {
        pi: 1.0 - c[0],
        log_z: log_z[0],
    })
}

/// Vertex labels for the wired graph: leaves collapse onto one boundary vertex.
fn wired_labels(tree: &ExplicitTree) -> (Vec<usize>, usize) {
    let mut label = vec![0; tree.len()];
    let mut next = 0;
    for (u, l) in label.iter_mut().enumerate() {
        if !tree.is_leaf(u) {
            *l = next;
            next += 1;
        }
    }
    let boundary = next;
    for u in tree.leaves() {
        label[u] = boundary;
    }
    (label, boundary + 1)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two components merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Edge `i` of the tree joins node `i + 1` to its parent.
fn edge_ends(tree: &ExplicitTree, label: &[usize]) -> Vec<(usize, usize)> {
    (1..tree.len())
        .map(|v| (label[tree.parent(v).expect("non-root")], label[v]))
        .collect()
}

/// Histogram of `(open edges, clusters, root connected)` over all `2^|E|`
/// configurations. Any `(p, q)` can then be evaluated in time proportional to
/// the number of distinct keys.
#[derive(Debug, Clone)]
pub struct ConfigurationCensus {
    edges: usize,
    counts: BTreeMap<(u32, u32, bool), u64>,
}

impl ConfigurationCensus {
    pub fn new(tree: &ExplicitTree) -> Result<Self> {
        let edges = tree.edge_count();
        if edges > ENUMERATION_EDGE_CAP {
            return Err(Error::CapExceeded {
                what: "enumeration edges",
                size: edges as u64,
                cap: ENUMERATION_EDGE_CAP as u64,
            });
        }
        let (label, vertices) = wired_labels(tree);
        let ends = edge_ends(tree, &label);
        let root = label[0];
        let boundary = vertices - 1;
        let mut counts = BTreeMap::new();
        for mask in 0u32..(1u32 << edges) {
            let mut uf = UnionFind::new(vertices);
            let mut clusters = vertices as u32;
            for (i, &(a, b)) in ends.iter().enumerate() {
                if mask >> i & 1 == 1 && uf.union(a, b) {
                    clusters -= 1;
                }
            }
            let connected = uf.find(root) == uf.find(boundary);
            *counts.entry((mask.count_ones(), clusters, connected)).or_insert(0) += 1;
        }
        Ok(Self { edges, counts })
    }

    /// Probability that the root connects to the boundary.
    pub fn connection_prob(&self, params: &RCMParams) -> f64 {
        let (p, q) = (params.p(), params.q());
        let (mut hit, mut total) = (0.0, 0.0);
        for (&(open, clusters, connected), &count) in &self.counts {
            let w = count as f64
                * p.powi(open as i32)
                * (1.0 - p).powi((self.edges as u32 - open) as i32)
                * q.powi(clusters as i32);
            total += w;
            if connected {
                hit += w;
            }
        }
        hit / total
    }
}

/// Brute-force sum over all edge configurations (at most 20 edges).
pub fn connection_prob_enumerate(tree: &ExplicitTree, params: &RCMParams) -> Result<f64> {
    Ok(ConfigurationCensus::new(tree)?.connection_prob(params))
}

/// Cap for [`cluster_identity_holds`].
pub const CLUSTER_IDENTITY_EDGE_CAP: usize = 12;

/// Check, for every configuration of `tree`, that the union-find cluster
/// count equals the count built up subtree by subtree from
/// `K_u = Σ K_v - (d_u - 1) + 1 - Σ 1{ω_uv = 1, A_v^c} - 1{A_u}`.
pub fn cluster_identity_holds(tree: &ExplicitTree) -> Result<bool> {
    let edges = tree.edge_count();
    if edges > CLUSTER_IDENTITY_EDGE_CAP {
        return Err(Error::CapExceeded {
            what: "cluster identity edges",
            size: edges as u64,
            cap: CLUSTER_IDENTITY_EDGE_CAP as u64,
        });
    }
    let (label, vertices) = wired_labels(tree);
    let ends = edge_ends(tree, &label);
    let mut k = vec![0i64; tree.len()];
    let mut a = vec![false; tree.len()];
    for mask in 0u32..(1u32 << edges) {
        let mut uf = UnionFind::new(vertices);
        let mut direct = vertices as i64;
        for (i, &(x, y)) in ends.iter().enumerate() {
            if mask >> i & 1 == 1 && uf.union(x, y) {
                direct -= 1;
            }
        }
        for u in (0..tree.len()).rev() {
            if tree.is_leaf(u) {
                k[u] = 1;
                a[u] = true;
                continue;
            }
            let kids = tree.children(u);
            let open = |v: usize| mask >> (v - 1) & 1 == 1;
            a[u] = kids.iter().any(|&v| open(v) && a[v]);
            k[u] = kids.iter().map(|&v| k[v]).sum::<i64>() - (kids.len() as i64 - 1) + 1
                - kids.iter().filter(|&&v| open(v) && !a[v]).count() as i64
                - a[u] as i64;
        }
        if k[0] != direct {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::offspring::OffspringDistribution;
    use crate::rng::{Domain, Stream};

    fn params(p: f64, q: f64) -> RCMParams {
        RCMParams::new(p, q).unwrap()
    }

    #[test]
    fn algebra() {
        for q in [0.5, 1.0, 2.0, 3.0] {
            assert_eq!(psi(q, 0.0), 0.0);
            assert_eq!(psi(q, f64::INFINITY), 1.0);
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                assert!((phi(q, phi(q, x)) - x).abs() < 1e-14);
                let y = psi(q, 3.0 * x);
                assert!((psi_inv(q, y) - 3.0 * x).abs() < 1e-12);
            }
        }
        for i in 1..10 {
            let p = i as f64 / 10.0;
            assert!((gamma_pq(p, 1.0) - p).abs() < 1e-15);
        }
        // Defining formula at q = 2 is tanh(x/2).
        assert!((psi(2.0, 1.3) - (0.65f64).tanh()).abs() < 1e-15);
    }

    #[test]
    fn critical_points() {
        let (b, p) = critical_point(2.0, 1.0).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((b - 2f64.ln()).abs() < 1e-15);
        let (b, p) = critical_point(2.0, 2.0).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-15);
        assert!((b - 3f64.ln()).abs() < 1e-15);
        let (b, p) = critical_point(3.0, 2.0).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((3.0 * psi(2.0, b) - 1.0).abs() < 1e-12);
        for m in [1.01, 1.2, 1.5, 4.0, 10.0] {
            for q in [0.3, 1.0, 1.7, 2.0] {
                let (b, p) = critical_point(m, q).unwrap();
                assert!((m * psi(q, b) - 1.0).abs() < 1e-12);
                assert!((p - (1.0 - (-b).exp())).abs() < 1e-14);
            }
        }
        assert!(critical_point(1.0, 1.0).is_err());
        assert!(critical_point(2.0, 2.5).is_err());
    }

    #[test]
    fn params_are_consistent() {
        let r = params(0.3, 2.0);
        assert!((r.beta() + (0.7f64).ln()).abs() < 1e-14);
        let s = RCMParams::from_beta(r.beta(), 2.0).unwrap();
        assert!((s.p() - 0.3).abs() < 1e-14);
        assert!(RCMParams::new(1.5, 1.0).is_err());
        assert!(RCMParams::new(0.5, 0.0).is_err());
    }

    #[test]
    fn single_edge() {
        let t = ExplicitTree::path(1).unwrap();
        let r = params(0.5, 2.0);
        for v in [
            connection_prob_recursive(&t, &r).unwrap(),
            connection_prob_partition(&t, &r).unwrap(),
            connection_prob_enumerate(&t, &r).unwrap(),
        ] {
            assert!((v - 1.0 / 3.0).abs() < 1e-14, "{v}");
        }
        for (p, q) in [(0.2, 0.5), (0.7, 3.0), (0.9, 1.0)] {
            let r = params(p, q);
            assert!((connection_prob_recursive(&t, &r).unwrap() - gamma_pq(p, q)).abs() < 1e-14);
        }
        let pf = partition_function(&t, &r).unwrap();
        // Z(A) = pq = 1 and Z(A^c) = (1-p)q^2 = 2.
        assert!((pf.log_z - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn stars_reduce_to_percolation() {
        let t = ExplicitTree::star(2).unwrap();
        for p in [0.1, 0.5, 0.8] {
            let v = connection_prob_recursive(&t, &params(p, 1.0)).unwrap();
            assert!((v - (1.0 - (1.0 - p) * (1.0 - p))).abs() < 1e-14);
        }
        let t3 = ExplicitTree::star(3).unwrap();
        let v = connection_prob_enumerate(&t3, &params(0.5, 1.0)).unwrap();
        assert!((v - 0.875).abs() < 1e-15);
    }

    #[test]
    fn binary_tree_at_ising_critical_point() {
        let t = ExplicitTree::full(2, 2).unwrap();
        let r = params(2.0 / 3.0, 2.0);
        let a = connection_prob_enumerate(&t, &r).unwrap();
        let b = connection_prob_partition(&t, &r).unwrap();
        let c = connection_prob_recursive(&t, &r).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((a - c).abs() < 1e-12);
    }

    #[test]
    fn p_near_one_connects() {
        let t = ExplicitTree::full(3, 3).unwrap();
        let v = connection_prob_recursive(&t, &params(1.0 - 1e-9, 2.0)).unwrap();
        assert!(v > 1.0 - 1e-6);
        assert_eq!(connection_prob_recursive(&t, &params(1.0, 2.0)).unwrap(), 1.0);
    }

    fn independent_percolation(tree: &ExplicitTree, p: f64) -> f64 {
        let mut pi = vec![1.0; tree.len()];
        for u in (0..tree.len()).rev() {
            if !tree.is_leaf(u) {
                pi[u] = 1.0 - tree.children(u).iter().map(|&v| 1.0 - p * pi[v]).product::<f64>();
            }
        }
        pi[0]
    }

    #[test]
    fn percolation_matches_product_formula() {
        let dist = OffspringDistribution::geometric(0.5).unwrap();
        let mut s = Stream::new(3, Domain::Corpus, 0, 0);
        for _ in 0..50 {
            let t = ExplicitTree::sample_from(&dist, 5, &mut s, 10_000).unwrap();
            for p in [0.2, 0.5, 0.9] {
                let direct = independent_percolation(&t, p);
                let r = params(p, 1.0);
                assert!((connection_prob_partition(&t, &r).unwrap() - direct).abs() < 1e-13);
                assert!((connection_prob_recursive(&t, &r).unwrap() - direct).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn recursion_matches_partition_on_random_trees() {
        let dist = OffspringDistribution::geometric(0.6).unwrap();
        let mut s = Stream::new(11, Domain::Corpus, 1, 0);
        for _ in 0..100 {
            let t = ExplicitTree::sample_from(&dist, 6, &mut s, 100_000).unwrap();
            for p in [0.1, 0.5, 0.9] {
                for q in [0.5, 1.0, 2.0, 3.0] {
                    let r = params(p, q);
                    let a = connection_prob_recursive(&t, &r).unwrap();
                    let b = connection_prob_partition(&t, &r).unwrap();
                    assert!((a - b).abs() < 1e-12, "p={p} q={q}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn cluster_identity_on_small_trees() {
        for t in [
            ExplicitTree::path(3).unwrap(),
            ExplicitTree::full(2, 2).unwrap(),
            ExplicitTree::full(3, 2).unwrap(),
            ExplicitTree::from_preorder_counts(3, &[2, 1, 3, 2, 1, 1]).unwrap(),
        ] {
            assert!(cluster_identity_holds(&t).unwrap());
        }
        assert!(cluster_identity_holds(&ExplicitTree::full(2, 3).unwrap()).is_err());
    }

    #[test]
    fn enumeration_cap() {
        let t = ExplicitTree::full(3, 3).unwrap();
        assert!(matches!(
            connection_prob_enumerate(&t, &params(0.5, 1.0)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn monotone_in_p_and_depth() {
        let dist = OffspringDistribution::geometric(0.5).unwrap();
        let t = ExplicitTree::sample(&dist, 4, 5, 0).unwrap();
        let mut prev = 0.0;
        for i in 1..20 {
            let v = connection_prob_recursive(&t, &params(i as f64 / 20.0, 2.0)).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        let mut s = Stream::new(5, Domain::Corpus, 9, 0);
        let mut tree = t;
        let r = params(0.6, 1.5);
        let mut prev = connection_prob_recursive(&tree, &r).unwrap();
        for _ in 0..4 {
            tree = tree.grow(|| dist.sample(&mut s)).unwrap();
            let v = connection_prob_recursive(&tree, &r).unwrap();
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }
}
