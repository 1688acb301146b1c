//! Information flow graphs for cooperative repair.
//!
//! Stage `-1` holds the source `S`; stage 0 holds `out` vertices for the
//! `n` initial nodes, each fed by `S` with capacity `α`. A repair stage
//! failing the set `S_t` adds, per newcomer `i`, the triple
//! `in_i -> mid_i -> out_i` (capacities ∞ and `α`), `d` helper edges of
//! capacity `β1` into `in_i` and exchange edges `in_i -> mid_j` of
//! capacity `β2` for every ordered pair of newcomers. The data collector
//! `DC` reads the latest `out` vertex of `k` distinct nodes over ∞ edges.
//!
//! Vertices are named `stage:kind:index`, e.g. `-1:S:0`, `2:mid:4`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::bounds::{int, CutType, Rational};
use crate::error::{param, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Source,
    In,
    Mid,
    Out,
    Collector,
}

impl VertexKind {
    fn label(self) -> &'static str {
        match self {
            VertexKind::Source => "S",
            VertexKind::In => "in",
            VertexKind::Mid => "mid",
            VertexKind::Out => "out",
            VertexKind::Collector => "DC",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub stage: i64,
    pub kind: VertexKind,
    /// Storage node index `1..=n`; 0 for `S` and `DC`.
    pub index: usize,
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.stage, self.kind.label(), self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Capacity {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => f.write_str(&crate::bounds::show(c)),
            Capacity::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeRole {
    /// `S -> out`, capacity α.
    Source,
    /// Survivor `out -> in`, capacity β1.
    Helper,
    /// `in_i -> mid_i`, infinite.
    Internal,
    /// `in_i -> mid_j`, capacity β2.
    Exchange,
    /// `mid -> out`, capacity α.
    Storage,
    /// `out -> DC`, infinite.
    Collector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub capacity: Capacity,
    pub role: EdgeRole,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub r: usize,
    pub alpha: Rational,
    pub beta1: Rational,
    pub beta2: Rational,
}

impl FlowParams {
    /// `α = 2d + r - 1`, `β1 = 2`, `β2 = 1`: the optimal point for
    /// `B = k(2d + r - k)`.
    pub fn mbcr_unit(n: usize, k: usize, d: usize, r: usize) -> Self {
        Self {
            n,
            k,
            d,
            r,
            alpha: int((2 * d + r - 1) as i64),
            beta1: int(2),
            beta2: int(1),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return param(format!("need 1 <= k <= n, got k = {}, n = {}", self.k, self.n));
        }
        if self.r == 0 || self.r > self.n {
            return param(format!("need 1 <= r <= n, got r = {}", self.r));
        }
        if self.d + self.r > self.n {
            return param(format!(
                "d = {} helpers cannot be found among n - r = {} survivors",
                self.d,
                self.n - self.r
            ));
        }
        let negative = |c: &Rational| *c < Rational::zero();
        if negative(&self.alpha) || negative(&self.beta1) || negative(&self.beta2) {
            return param("capacities must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairStage {
    pub failed: Vec<usize>,
    /// Helpers (node indices) feeding each newcomer; each reads that node's
    /// latest `out` vertex from an earlier stage.
    pub helpers: BTreeMap<usize, Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HelperRule {
    /// Prefer nodes whose latest `out` vertex is from the most recent stage.
    MostRecentFirst,
    LowestIndex,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepairHistory {
    pub stages: Vec<RepairStage>,
}

impl RepairHistory {
    pub fn new(stages: Vec<RepairStage>) -> Self {
        Self { stages }
    }

    /// History whose helpers are picked by `rule`.
    pub fn from_rule(n: usize, d: usize, failed_sets: &[Vec<usize>], rule: HelperRule) -> Result<Self> {
        let mut last_stage = vec![0usize; n + 1];
        let mut stages = Vec::with_capacity(failed_sets.len());
        for (t, failed) in failed_sets.iter().enumerate() {
            let mut live: Vec<usize> = (1..=n).filter(|i| !failed.contains(i)).collect();
            if rule == HelperRule::MostRecentFirst {
                live.sort_by_key(|&i| (std::cmp::Reverse(last_stage[i]), i));
            }
            if live.len() < d {
                return param(format!("stage {} leaves only {} live helpers", t + 1, live.len()));
            }
            let chosen = live[..d].to_vec();
            let helpers = failed.iter().map(|&j| (j, chosen.clone())).collect();
            for &j in failed {
                if j <= n {
                    last_stage[j] = t + 1;
                }
            }
            stages.push(RepairStage {
                failed: failed.clone(),
                helpers,
            });
        }
        Ok(Self { stages })
    }
}

#[derive(Debug, Clone)]
pub struct FlowGraph {
    pub params: FlowParams,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub source: usize,
    pub sink: usize,
    /// Collector node indices, ascending.
    pub dc: Vec<usize>,
    index: HashMap<Vertex, usize>,
}

impl FlowGraph {
    pub fn vertex(&self, stage: i64, kind: VertexKind, index: usize) -> Option<usize> {
        self.index
            .get(&Vertex { stage, kind, index })
            .copied()
    }

    pub fn stages(&self) -> usize {
        self.vertices.iter().map(|v| v.stage).max().unwrap_or(0).max(0) as usize
    }

    /// Stage of the `out` vertex the collector reads for `node`.
    pub fn collector_stage(&self, node: usize) -> Option<i64> {
        self.edges
            .iter()
            .filter(|e| e.role == EdgeRole::Collector)
            .map(|e| self.vertices[e.from])
            .find(|v| v.index == node)
            .map(|v| v.stage)
    }

    /// One edge per line: `from to capacity`.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            out.push_str(&format!(
                "{} {} {}\n",
                self.vertices[e.from], self.vertices[e.to], e.capacity
            ));
        }
        out
    }

    /// Copy of the graph with edge `idx` deleted.
    pub fn without_edge(&self, idx: usize) -> Self {
        let mut g = self.clone();
        g.edges.remove(idx);
        g
    }

    /// The `(stage, nodes)` groups the collector reads from, ordered by stage.
    pub fn collector_groups(&self) -> Vec<StageGroup> {
        let mut by_stage: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for &node in &self.dc {
            if let Some(s) = self.collector_stage(node) {
                by_stage.entry(s).or_default().push(node);
            }
        }
        by_stage
            .into_iter()
            .map(|(stage, nodes)| StageGroup { stage, nodes })
            .collect()
    }
}

pub fn build_graph(params: &FlowParams, history: &RepairHistory, dc: &[usize]) -> Result<FlowGraph> {
    params.validate()?;
    let FlowParams { n, k, d, r, .. } = *params;

    let dc_set: BTreeSet<usize> = dc.iter().copied().collect();
    if dc_set.len() != dc.len() || dc.len() != k {
        return param(format!("collector must name exactly k = {k} distinct nodes, got {dc:?}"));
    }
    if let Some(&bad) = dc_set.iter().find(|&&i| i == 0 || i > n) {
        return param(format!("collector node {bad} outside 1..={n}"));
    }

    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut index = HashMap::new();
    let mut add_vertex = |vertices: &mut Vec<Vertex>, v: Vertex| {
        index.insert(v, vertices.len());
        vertices.push(v);
        vertices.len() - 1
    };
    let finite = |c: &Rational| Capacity::Finite(c.clone());

    let source = add_vertex(&mut vertices, Vertex { stage: -1, kind: VertexKind::Source, index: 0 });
    // latest[i] = vertex id of node i's most recent out vertex
    let mut latest = vec![usize::MAX; n + 1];
    for i in 1..=n {
        let out = add_vertex(&mut vertices, Vertex { stage: 0, kind: VertexKind::Out, index: i });
        latest[i] = out;
        edges.push(Edge { from: source, to: out, capacity: finite(&params.alpha), role: EdgeRole::Source });
    }

    for (t, stage) in history.stages.iter().enumerate() {
        let st = (t + 1) as i64;
        let failed: BTreeSet<usize> = stage.failed.iter().copied().collect();
        if failed.len() != stage.failed.len() || failed.len() != r {
            return param(format!("stage {st} must fail exactly r = {r} distinct nodes, got {:?}", stage.failed));
        }
        if let Some(&bad) = failed.iter().find(|&&i| i == 0 || i > n) {
            return param(format!("stage {st} fails node {bad} outside 1..={n}"));
        }
        let mut ins = BTreeMap::new();
        let mut mids = BTreeMap::new();
        for &i in &stage.failed {
            let helpers = stage
                .helpers
                .get(&i)
                .ok_or_else(|| Error::Parameter(format!("stage {st} has no helpers for newcomer {i}")))?;
            let hs: BTreeSet<usize> = helpers.iter().copied().collect();
            if hs.len() != helpers.len() || hs.len() != d {
                return param(format!("stage {st} newcomer {i} needs d = {d} distinct helpers, got {helpers:?}"));
            }
            if let Some(&bad) = hs.iter().find(|&&h| h == 0 || h > n || failed.contains(&h)) {
                return param(format!("stage {st} newcomer {i} uses helper {bad}, which is not live"));
            }
            let vin = add_vertex(&mut vertices, Vertex { stage: st, kind: VertexKind::In, index: i });
            let vmid = add_vertex(&mut vertices, Vertex { stage: st, kind: VertexKind::Mid, index: i });
            for &h in helpers {
                edges.push(Edge { from: latest[h], to: vin, capacity: finite(&params.beta1), role: EdgeRole::Helper });
            }
            edges.push(Edge { from: vin, to: vmid, capacity: Capacity::Infinite, role: EdgeRole::Internal });
            ins.insert(i, vin);
            mids.insert(i, vmid);
        }
        for (&i, &vin) in &ins {
            for (&j, &vmid) in &mids {
                if i != j {
                    edges.push(Edge { from: vin, to: vmid, capacity: finite(&params.beta2), role: EdgeRole::Exchange });
                }
            }
        }
        for &i in &stage.failed {
            let vout = add_vertex(&mut vertices, Vertex { stage: st, kind: VertexKind::Out, index: i });
            edges.push(Edge { from: mids[&i], to: vout, capacity: finite(&params.alpha), role: EdgeRole::Storage });
            latest[i] = vout;
        }
    }

    let sink_stage = history.stages.len() as i64;
    let sink = add_vertex(&mut vertices, Vertex { stage: sink_stage, kind: VertexKind::Collector, index: 0 });
    for &i in &dc_set {
        edges.push(Edge { from: latest[i], to: sink, capacity: Capacity::Infinite, role: EdgeRole::Collector });
    }

    Ok(FlowGraph {
        params: params.clone(),
        vertices,
        edges,
        source,
        sink,
        dc: dc_set.into_iter().collect(),
        index,
    })
}

#[derive(Debug, Clone)]
pub struct MaxFlow {
    pub value: Rational,
    /// Flow on each edge, aligned with `FlowGraph::edges`.
    pub edge_flow: Vec<Rational>,
}

/// Exact max-flow. Capacities are scaled to integers by the LCM of their
/// denominators; infinite edges get the sum of all finite capacities plus one.
pub fn max_flow(g: &FlowGraph) -> Result<MaxFlow> {
    let mut scale = BigInt::one();
    for e in &g.edges {
        if let Capacity::Finite(c) = &e.capacity {
            scale = scale.lcm(c.denom());
        }
    }
    let to_int = |c: &Rational| -> Result<i128> {
        (c * Rational::from_integer(scale.clone()))
            .to_integer()
            .to_i128()
            .ok_or_else(|| Error::Internal("scaled capacity overflows i128".into()))
    };
    let mut finite_total: i128 = 0;
    let mut caps = Vec::with_capacity(g.edges.len());
    for e in &g.edges {
        let c = match &e.capacity {
            Capacity::Finite(c) => {
                let v = to_int(c)?;
                finite_total = finite_total
                    .checked_add(v)
                    .ok_or_else(|| Error::Internal("capacity sum overflows i128".into()))?;
                Some(v)
            }
            Capacity::Infinite => None,
        };
        caps.push(c);
    }
    let infinite = finite_total + 1;

    // residual arcs: 2i forward, 2i + 1 backward
    let nv = g.vertices.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut residual = Vec::with_capacity(2 * g.edges.len());
    let mut head = Vec::with_capacity(2 * g.edges.len());
    for (i, e) in g.edges.iter().enumerate() {
        adj[e.from].push(2 * i);
        adj[e.to].push(2 * i + 1);
        residual.push(caps[i].unwrap_or(infinite));
        residual.push(0);
        head.push(e.to);
        head.push(e.from);
    }

    let mut total: i128 = 0;
    loop {
        let mut via = vec![usize::MAX; nv];
        let mut seen = vec![false; nv];
        seen[g.source] = true;
        let mut queue = VecDeque::from([g.source]);
        while let Some(u) = queue.pop_front() {
            if u == g.sink {
                break;
            }
            for &a in &adj[u] {
                let v = head[a];
                if !seen[v] && residual[a] > 0 {
                    seen[v] = true;
                    via[v] = a;
                    queue.push_back(v);
                }
            }
        }
        if !seen[g.sink] {
            break;
        }
        let mut push = i128::MAX;
        let mut v = g.sink;
        while v != g.source {
            let a = via[v];
            push = push.min(residual[a]);
            v = head[a ^ 1];
        }
        let mut v = g.sink;
        while v != g.source {
            let a = via[v];
            residual[a] -= push;
            residual[a ^ 1] += push;
            v = head[a ^ 1];
        }
        total += push;
    }

    let unscale = |v: i128| Rational::new(BigInt::from(v), scale.clone());
    Ok(MaxFlow {
        value: unscale(total),
        edge_flow: (0..g.edges.len()).map(|i| unscale(residual[2 * i + 1])).collect(),
    })
}

/// Vertex partition; `far[v]` is true for vertices on the collector's side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub far: Vec<bool>,
}

/// Newcomers of one repair stage placed on the collector's side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageGroup {
    pub stage: i64,
    pub nodes: Vec<usize>,
}

/// The staged cut of type `t`: the `in`/`mid`/`out` triples of the
/// newcomers in `assignment[ν]` (which must number `ℓ_ν`) plus `DC`.
pub fn type_cut(g: &FlowGraph, t: &CutType, assignment: &[StageGroup]) -> Result<Cut> {
    if assignment.len() != t.stages() {
        return param(format!("cut type {t} has {} stages, assignment has {}", t.stages(), assignment.len()));
    }
    let mut far = vec![false; g.vertices.len()];
    far[g.sink] = true;
    let mut prev_stage = 0;
    let mut designated = BTreeSet::new();
    for (group, &l) in assignment.iter().zip(t.parts()) {
        if group.stage <= prev_stage {
            return param("assignment stages must be increasing and >= 1");
        }
        prev_stage = group.stage;
        if group.nodes.len() != l {
            return param(format!("stage {} lists {} nodes, cut type needs {l}", group.stage, group.nodes.len()));
        }
        for &i in &group.nodes {
            for kind in [VertexKind::In, VertexKind::Mid, VertexKind::Out] {
                let v = g.vertex(group.stage, kind, i).ok_or_else(|| {
                    Error::Parameter(format!("node {i} was not repaired in stage {}", group.stage))
                })?;
                far[v] = true;
            }
            if !designated.insert(i) {
                return param(format!("node {i} assigned twice"));
            }
        }
    }
    // every collector edge must start inside the far side
    for e in g.edges.iter().filter(|e| e.role == EdgeRole::Collector) {
        if !far[e.from] {
            return param(format!(
                "collector reads {} which the cut type does not cover",
                g.vertices[e.from]
            ));
        }
    }
    Ok(Cut { far })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutCapacity {
    /// `None` when an infinite edge crosses.
    pub value: Option<Rational>,
    /// Crossing edges per role.
    pub crossing: BTreeMap<EdgeRole, usize>,
}

impl CutCapacity {
    pub fn count(&self, role: EdgeRole) -> usize {
        self.crossing.get(&role).copied().unwrap_or(0)
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_none()
    }
}

pub fn cut_capacity(g: &FlowGraph, cut: &Cut) -> Result<CutCapacity> {
    if cut.far.len() != g.vertices.len() {
        return param("cut does not match the graph");
    }
    if cut.far[g.source] || !cut.far[g.sink] {
        return param("cut must keep S on the near side and DC on the far side");
    }
    let mut total = Some(Rational::zero());
    let mut crossing = BTreeMap::new();
    for e in &g.edges {
        if !cut.far[e.from] && cut.far[e.to] {
            *crossing.entry(e.role).or_insert(0) += 1;
            total = match (&e.capacity, total) {
                (Capacity::Finite(c), Some(acc)) => Some(acc + c),
                _ => None,
            };
        }
    }
    Ok(CutCapacity { value: total, crossing })
}

/// History, collector and assignment realising the smallest cut of type `t`:
/// nodes `1..=k` are the collector's, assigned to stages in order; each
/// stage's remaining `r - ℓ_ν` failures come from nodes `k+1..=n`; every
/// newcomer uses all earlier collector nodes as helpers before others.
pub fn adversarial_history(params: &FlowParams, t: &CutType) -> Result<(RepairHistory, Vec<usize>, Vec<StageGroup>)> {
    params.validate()?;
    let FlowParams { n, k, d, r, .. } = *params;
    if t.k() != k {
        return param(format!("cut type {t} sums to {}, expected k = {k}", t.k()));
    }
    if t.parts().iter().any(|&l| l > r) {
        return param(format!("cut type {t} has a part larger than r = {r}"));
    }
    let others: Vec<usize> = (k + 1..=n).collect();
    if others.len() < r {
        return param(format!("need at least r = {r} nodes outside the collector, have {}", others.len()));
    }
    let mut stages = Vec::new();
    let mut groups = Vec::new();
    let mut next = 1;
    let mut rotate = 0;
    for (nu, &l) in t.parts().iter().enumerate() {
        let designated: Vec<usize> = (next..next + l).collect();
        let earlier: Vec<usize> = (1..next).collect();
        next += l;
        let fillers: Vec<usize> = (0..r - l).map(|i| others[(rotate + i) % others.len()]).collect();
        rotate += r - l;
        let failed: Vec<usize> = designated.iter().chain(&fillers).copied().collect();
        let rest: Vec<usize> = (1..=n).filter(|i| !failed.contains(i) && !earlier.contains(i)).collect();
        let helpers_order: Vec<usize> = earlier.into_iter().chain(rest).collect();
        if helpers_order.len() < d {
            return param("not enough live helpers");
        }
        let chosen = helpers_order[..d].to_vec();
        stages.push(RepairStage {
            helpers: failed.iter().map(|&j| (j, chosen.clone())).collect(),
            failed,
        });
        groups.push(StageGroup { stage: nu as i64 + 1, nodes: designated });
    }
    Ok((RepairHistory::new(stages), (1..=k).collect(), groups))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{cut_coefficients, enumerate_cut_types, file_size_bound};

    fn two_failure_graph(dc: &[usize]) -> FlowGraph {
        let p = FlowParams::mbcr_unit(4, 2, 2, 2);
        let h = RepairHistory::from_rule(4, 2, &[vec![1, 3]], HelperRule::LowestIndex).unwrap();
        build_graph(&p, &h, dc).unwrap()
    }

    #[test]
    fn single_stage_shape() {
        let g = two_failure_graph(&[1, 3]);
        // 1 + n + 3r + 1
        assert_eq!(g.vertices.len(), 1 + 4 + 6 + 1);
        let count = |role| g.edges.iter().filter(|e| e.role == role).count();
        assert_eq!(count(EdgeRole::Source), 4);
        assert_eq!(count(EdgeRole::Helper), 4);
        assert_eq!(count(EdgeRole::Internal), 2);
        assert_eq!(count(EdgeRole::Exchange), 2);
        assert_eq!(count(EdgeRole::Storage), 2);
        assert_eq!(count(EdgeRole::Collector), 2);
        assert!(g.edge_list().contains("0:out:2 1:in:1 2\n"));
        assert!(g.edge_list().contains("1:in:1 1:mid:3 1\n"));
        assert!(g.edge_list().contains("1:out:3 1:DC:0 inf\n"));
    }

    #[test]
    fn vertex_count_closed_form() {
        let p = FlowParams::mbcr_unit(5, 3, 3, 2);
        for stages in 0..5 {
            let sets: Vec<Vec<usize>> = (0..stages).map(|s| vec![1 + s % 5, 1 + (s + 2) % 5]).collect();
            let h = RepairHistory::from_rule(5, 3, &sets, HelperRule::MostRecentFirst).unwrap();
            let g = build_graph(&p, &h, &[1, 2, 3]).unwrap();
            assert_eq!(g.vertices.len(), 1 + 5 + 3 * 2 * stages + 1);
            assert_eq!(g.stages(), stages);
        }
    }

    #[test]
    fn empty_history_flow_is_k_alpha() {
        let p = FlowParams::mbcr_unit(5, 3, 3, 2);
        let g = build_graph(&p, &RepairHistory::default(), &[2, 4, 5]).unwrap();
        assert_eq!(g.vertices.len(), 1 + 5 + 1);
        assert_eq!(max_flow(&g).unwrap().value, int(21));
    }

    #[test]
    fn n5_repair_of_4_5_is_tight() {
        let p = FlowParams::mbcr_unit(5, 3, 3, 2);
        let h = RepairHistory::from_rule(5, 3, &[vec![4, 5]], HelperRule::LowestIndex).unwrap();
        let g = build_graph(&p, &h, &[3, 4, 5]).unwrap();
        let mf = max_flow(&g).unwrap();
        assert_eq!(mf.value, int(15));
        // conservation at every inner vertex, capacity respected
        for v in 0..g.vertices.len() {
            if v == g.source || v == g.sink {
                continue;
            }
            let inflow: Rational = g.edges.iter().zip(&mf.edge_flow).filter(|(e, _)| e.to == v).map(|(_, f)| f.clone()).sum();
            let outflow: Rational = g.edges.iter().zip(&mf.edge_flow).filter(|(e, _)| e.from == v).map(|(_, f)| f.clone()).sum();
            assert_eq!(inflow, outflow);
        }
        for (e, f) in g.edges.iter().zip(&mf.edge_flow) {
            assert!(*f >= Rational::zero());
            if let Capacity::Finite(c) = &e.capacity {
                assert!(f <= c);
            }
        }
    }

    #[test]
    fn fractional_capacities_are_exact() {
        let mut p = FlowParams::mbcr_unit(4, 2, 2, 2);
        p.alpha = crate::bounds::ratio(5, 3);
        p.beta1 = crate::bounds::ratio(2, 3);
        p.beta2 = crate::bounds::ratio(1, 3);
        let h = RepairHistory::from_rule(4, 2, &[vec![1, 3]], HelperRule::LowestIndex).unwrap();
        let g = build_graph(&p, &h, &[1, 3]).unwrap();
        // type (2) cut: 4 helper edges of 2/3
        assert_eq!(max_flow(&g).unwrap().value, crate::bounds::ratio(8, 3));
    }

    #[test]
    fn cut_capacity_examples() {
        // type (2): 4 β1 = 8
        let g = two_failure_graph(&[1, 3]);
        let t = CutType::new(vec![2], 2).unwrap();
        let cut = type_cut(&g, &t, &[StageGroup { stage: 1, nodes: vec![1, 3] }]).unwrap();
        let cap = cut_capacity(&g, &cut).unwrap();
        assert_eq!(cap.value, Some(int(8)));
        assert_eq!(cap.count(EdgeRole::Helper), 4);
        assert_eq!(cap.count(EdgeRole::Exchange), 0);

        // type (1,1) with newcomer 2 drawing from the earlier collector node: 3 β1 + 2 β2 = 8
        let p = FlowParams::mbcr_unit(4, 2, 2, 2);
        let t = CutType::new(vec![1, 1], 2).unwrap();
        let (h, dc, groups) = adversarial_history(&p, &t).unwrap();
        let g = build_graph(&p, &h, &dc).unwrap();
        let cap = cut_capacity(&g, &type_cut(&g, &t, &groups).unwrap()).unwrap();
        assert_eq!(cap.count(EdgeRole::Helper), 3);
        assert_eq!(cap.count(EdgeRole::Exchange), 2);
        assert_eq!(cap.value, Some(int(8)));

        // only S on the near side: n·α
        let far = (0..g.vertices.len()).map(|v| v != g.source).collect();
        assert_eq!(cut_capacity(&g, &Cut { far }).unwrap().value, Some(int(4 * 5)));
    }

    #[test]
    fn infinite_crossing_is_flagged() {
        let g = two_failure_graph(&[1, 3]);
        let mut far = vec![false; g.vertices.len()];
        far[g.sink] = true;
        far[g.vertex(1, VertexKind::Mid, 1).unwrap()] = true;
        let cap = cut_capacity(&g, &Cut { far }).unwrap();
        assert!(cap.is_infinite());
    }

    #[test]
    fn type_cut_rejects_mismatches() {
        let g = two_failure_graph(&[1, 3]);
        let t = CutType::new(vec![1, 1], 2).unwrap();
        assert!(type_cut(&g, &t, &[StageGroup { stage: 1, nodes: vec![1, 3] }]).is_err());
        let t = CutType::new(vec![2], 2).unwrap();
        assert!(type_cut(&g, &t, &[StageGroup { stage: 1, nodes: vec![1, 2] }]).is_err());
        let g = two_failure_graph(&[1, 2]);
        assert!(type_cut(&g, &t, &[StageGroup { stage: 1, nodes: vec![1, 3] }]).is_err());
    }

    #[test]
    fn build_rejects_bad_inputs() {
        let p = FlowParams::mbcr_unit(4, 2, 2, 2);
        let h = RepairHistory::default();
        assert!(build_graph(&p, &h, &[1]).is_err());
        assert!(build_graph(&p, &h, &[1, 1]).is_err());
        assert!(build_graph(&p, &h, &[1, 5]).is_err());
        let bad = RepairHistory::new(vec![RepairStage {
            failed: vec![1, 2],
            helpers: [(1, vec![2, 3]), (2, vec![3, 4])].into_iter().collect(),
        }]);
        assert!(build_graph(&p, &bad, &[1, 2]).is_err());
        let wrong_r = RepairHistory::new(vec![RepairStage {
            failed: vec![1],
            helpers: [(1, vec![2, 3])].into_iter().collect(),
        }]);
        assert!(build_graph(&p, &wrong_r, &[1, 2]).is_err());
    }

    #[test]
    fn three_stage_type_212() {
        let p = FlowParams::mbcr_unit(9, 5, 6, 3);
        let t = CutType::new(vec![2, 1, 2], 3).unwrap();
        let (h, dc, groups) = adversarial_history(&p, &t).unwrap();
        let g = build_graph(&p, &h, &dc).unwrap();
        assert_eq!(g.stages(), 3);
        assert_eq!(g.collector_groups(), groups);
        let cap = cut_capacity(&g, &type_cut(&g, &t, &groups).unwrap()).unwrap();
        let c = cut_coefficients(&t, 6, 3);
        assert_eq!(cap.count(EdgeRole::Helper) as i64, c.beta1);
        assert_eq!(cap.count(EdgeRole::Exchange) as i64, c.beta2);
        assert_eq!(cap.value, Some(file_size_bound(&t, 6, 3, &p.beta1, &p.beta2)));
        assert!(max_flow(&g).unwrap().value <= cap.value.unwrap());
    }

    #[test]
    fn bridge_small_exhaustive() {
        for k in 1..=3 {
            for r in 1..=3 {
                let d = k;
                let p = FlowParams::mbcr_unit(d + r, k, d, r);
                for t in enumerate_cut_types(k, r) {
                    let (h, dc, groups) = adversarial_history(&p, &t).unwrap();
                    let g = build_graph(&p, &h, &dc).unwrap();
                    let cap = cut_capacity(&g, &type_cut(&g, &t, &groups).unwrap()).unwrap();
                    assert_eq!(cap.value, Some(file_size_bound(&t, d, r, &p.beta1, &p.beta2)));
                }
            }
        }
    }
}
