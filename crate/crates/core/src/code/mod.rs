//! Exact cooperative regenerating codes with `d = k` and `n = d + r`.
//!
//! A stripe of `B = k·n` symbols is cut into `n` groups `x_1..x_n` of `k`
//! symbols. Node `i` keeps `x_i` verbatim and, for each offset
//! `t = 1..n-1`, the single parity `x_{i⊕t} · v_t`, where `v_t` is column
//! `t` of a `k × (n-1)` MDS generator. Every node therefore stores
//! `α = k + n - 1` symbols, any `k` nodes rebuild the stripe, and any `r`
//! failed nodes are regenerated exactly by the protocol in [`repair`].

pub mod layout;
pub mod repair;

use std::collections::BTreeSet;

use crate::error::{param, Error, Result};
use crate::gf::{Field, Symbol};
use crate::matrix::FieldMatrix;
use crate::mds::{build_generator, GeneratorSpec};

pub use layout::{mod_n_add, offset_of};
pub use repair::{
    Phase, PlannedTransfer, Provenance, RepairOutcome, RepairPlan, RepairTranscript, Transfer,
    TransferKind,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub r: usize,
    pub generator: GeneratorSpec,
}

impl CodeParams {
    pub fn new(n: usize, k: usize, d: usize, r: usize, generator: GeneratorSpec) -> Result<Self> {
        if k == 0 || r == 0 {
            return param(format!("need k >= 1 and r >= 1, got k = {k}, r = {r}"));
        }
        if d != k {
            return param(format!("this code family requires d = k, got d = {d}, k = {k}"));
        }
        if n != d + r {
            return param(format!("this code family requires n = d + r, got n = {n}, d + r = {}", d + r));
        }
        if n > u16::MAX as usize {
            return param(format!("n = {n} is too large"));
        }
        if generator.k != k || generator.length != n - 1 {
            return param(format!(
                "generator is {}x{}, code needs {k}x{}",
                generator.k,
                generator.length,
                n - 1
            ));
        }
        generator.validate()?;
        Ok(Self { n, k, d, r, generator })
    }

    /// `n = k + r` with the Vandermonde generator on points `0..n-1`.
    pub fn vandermonde(k: usize, r: usize, field: &Field) -> Result<Self> {
        let n = k + r;
        Self::new(n, k, k, r, GeneratorSpec::default_vandermonde(field, k, n - 1)?)
    }

    /// n = 5, k = d = 3, r = 2 over GF(2) with the builtin binary generator.
    pub fn binary_example() -> Self {
        Self::new(5, 3, 3, 2, GeneratorSpec::builtin_gf2()).expect("builtin example parameters")
    }

    pub fn field(&self) -> &Field {
        &self.generator.field
    }

    /// Source symbols per stripe, `B = k·n`.
    pub fn stripe_len(&self) -> usize {
        self.k * self.n
    }

    /// Symbols stored per node per stripe, `α = k + n - 1`.
    pub fn alpha(&self) -> usize {
        self.k + self.n - 1
    }

    pub fn beta1(&self) -> usize {
        2
    }

    pub fn beta2(&self) -> usize {
        1
    }

    /// Symbols received per newcomer, `γ = d·β1 + (r-1)·β2 = 2d + r - 1`.
    pub fn gamma(&self) -> usize {
        self.d * self.beta1() + (self.r - 1) * self.beta2()
    }
}

/// One stripe of `B = k·n` source symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stripe {
    packets: Vec<Symbol>,
}

impl Stripe {
    pub fn new(packets: Vec<Symbol>) -> Self {
        Self { packets }
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.packets
    }

    pub fn into_inner(self) -> Vec<Symbol> {
        self.packets
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }
}

/// What one node stores for one stripe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeShare {
    pub node_id: usize,
    /// The node's own group `x_{node_id}`.
    pub systematic: Vec<Symbol>,
    /// `parity[t - 1] = x_{node_id ⊕ t} · v_t` for `t = 1..n-1`.
    pub parity: Vec<Symbol>,
}

impl NodeShare {
    pub fn parity(&self, offset: usize) -> Symbol {
        self.parity[offset - 1]
    }

    /// Stored symbols in on-disk order: the systematic group, then offsets `1..n-1`.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.systematic.iter().chain(&self.parity).copied()
    }

    pub fn from_symbols(node_id: usize, k: usize, symbols: &[Symbol]) -> Self {
        Self {
            node_id,
            systematic: symbols[..k].to_vec(),
            parity: symbols[k..].to_vec(),
        }
    }

    pub fn stored_len(&self) -> usize {
        self.systematic.len() + self.parity.len()
    }
}

/// A code instance: validated parameters plus the built generator matrix.
#[derive(Debug, Clone)]
pub struct MbcrCode {
    params: CodeParams,
    generator: FieldMatrix,
    // columns[t - 1] = v_t
    columns: Vec<Vec<Symbol>>,
}

impl MbcrCode {
    pub fn new(params: CodeParams) -> Result<Self> {
        let generator = build_generator(&params.generator)?;
        let columns = (0..generator.cols()).map(|c| generator.column(c)).collect();
        Ok(Self {
            params,
            generator,
            columns,
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn field(&self) -> &Field {
        self.params.field()
    }

    pub fn generator(&self) -> &FieldMatrix {
        &self.generator
    }

    /// Generator column `v_t`, `t` in `1..n`.
    pub fn column(&self, t: usize) -> &[Symbol] {
        &self.columns[t - 1]
    }

    pub(crate) fn check_node(&self, id: usize) -> Result<()> {
        if id == 0 || id > self.params.n {
            return param(format!("node id {id} outside 1..={}", self.params.n));
        }
        Ok(())
    }

    pub(crate) fn check_share(&self, share: &NodeShare) -> Result<()> {
        self.check_node(share.node_id)?;
        let CodeParams { n, k, .. } = self.params;
        if share.systematic.len() != k || share.parity.len() != n - 1 {
            return Err(Error::Corruption(format!(
                "share for node {} has shape {}+{}, expected {k}+{}",
                share.node_id,
                share.systematic.len(),
                share.parity.len(),
                n - 1
            )));
        }
        if let Some(bad) = share.symbols().find(|&s| !self.field().contains(s)) {
            return Err(Error::Corruption(format!(
                "share for node {} holds symbol {bad} outside {:?}",
                share.node_id,
                self.field()
            )));
        }
        Ok(())
    }

    /// Groups `x_1..x_n` (returned 0-indexed).
    pub fn split_stripe(&self, stripe: &Stripe) -> Result<Vec<Vec<Symbol>>> {
        let b = self.params.stripe_len();
        if stripe.len() != b {
            return param(format!("stripe has {} symbols, expected B = {b}", stripe.len()));
        }
        for &s in stripe.as_slice() {
            self.field().check(s)?;
        }
        Ok(stripe
            .as_slice()
            .chunks(self.params.k)
            .map(<[Symbol]>::to_vec)
            .collect())
    }

    /// Content of node `i` given all `n` groups.
    pub fn encode_node(&self, i: usize, groups: &[Vec<Symbol>]) -> Result<NodeShare> {
        self.check_node(i)?;
        let CodeParams { n, k, .. } = self.params;
        if groups.len() != n || groups.iter().any(|g| g.len() != k) {
            return param(format!("encode_node needs {n} groups of {k} symbols"));
        }
        let parity = (1..n)
            .map(|t| {
                let g = mod_n_add(i, t, n)?;
                Ok(self.field().dot(&groups[g - 1], self.column(t)))
            })
            .collect::<Result<_>>()?;
        Ok(NodeShare {
            node_id: i,
            systematic: groups[i - 1].clone(),
            parity,
        })
    }

    /// Shares for nodes `1..=n`.
    pub fn encode(&self, stripe: &Stripe) -> Result<Vec<NodeShare>> {
        let groups = self.split_stripe(stripe)?;
        (1..=self.params.n).map(|i| self.encode_node(i, &groups)).collect()
    }

    /// Precomputes the per-group inversions for a fixed set of `k` nodes.
    pub fn decoder(&self, collector: &[usize]) -> Result<Decoder> {
        let CodeParams { n, k, .. } = self.params;
        let members: BTreeSet<usize> = collector.iter().copied().collect();
        if members.len() != collector.len() {
            return param("collector lists a node twice");
        }
        if members.len() != k {
            return param(format!("collector has {} nodes, need exactly k = {k}", members.len()));
        }
        for &m in &members {
            self.check_node(m)?;
        }
        let members: Vec<usize> = members.into_iter().collect();
        let mut missing = Vec::new();
        for g in (1..=n).filter(|g| !members.contains(g)) {
            let offsets = members
                .iter()
                .map(|&m| offset_of(g, m, n))
                .collect::<Result<Vec<_>>>()?;
            let rows: Vec<&[Symbol]> = offsets.iter().map(|&t| self.column(t)).collect();
            let system = FieldMatrix::from_rows(self.field(), &rows)?;
            let inverse = system.inverse().map_err(|e| match e {
                Error::SingularMatrix => Error::Corruption(format!(
                    "generator columns {offsets:?} are dependent; cannot recover group {g}"
                )),
                other => other,
            })?;
            missing.push(MissingGroup {
                group: g,
                offsets,
                inverse,
            });
        }
        Ok(Decoder {
            members,
            missing,
        })
    }

    /// Rebuilds a stripe from the shares of exactly `k` distinct nodes.
    pub fn reconstruct(&self, shares: &[&NodeShare]) -> Result<Stripe> {
        let ids: Vec<usize> = shares.iter().map(|s| s.node_id).collect();
        self.decoder(&ids)?.decode(self, shares)
    }
}

#[derive(Debug, Clone)]
struct MissingGroup {
    group: usize,
    // offsets[i] is the parity offset used at members[i]
    offsets: Vec<usize>,
    inverse: FieldMatrix,
}

/// Reconstruction plan for one collector set, reusable across stripes.
#[derive(Debug, Clone)]
pub struct Decoder {
    members: Vec<usize>,
    missing: Vec<MissingGroup>,
}

impl Decoder {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Decodes one stripe. `shares` must be the collector's shares in any order.
    ///
    /// Groups held systematically are cross-checked against the parities the
    /// other members store for them; a mismatch is reported as corruption.
    pub fn decode(&self, code: &MbcrCode, shares: &[&NodeShare]) -> Result<Stripe> {
        let CodeParams { n, k, .. } = code.params;
        let mut by_id: Vec<Option<&NodeShare>> = vec![None; n + 1];
        for s in shares {
            code.check_share(s)?;
            by_id[s.node_id] = Some(s);
        }
        let ordered: Vec<&NodeShare> = self
            .members
            .iter()
            .map(|&m| {
                by_id[m].ok_or_else(|| Error::Parameter(format!("missing share for collector node {m}")))
            })
            .collect::<Result<_>>()?;
        if shares.len() != k {
            return param(format!("expected {k} shares, got {}", shares.len()));
        }

        let field = code.field();
        let mut packets = vec![0; n * k];
        for share in &ordered {
            let g = share.node_id;
            packets[(g - 1) * k..g * k].copy_from_slice(&share.systematic);
            for other in ordered.iter().filter(|o| o.node_id != g) {
                let t = offset_of(g, other.node_id, n)?;
                if field.dot(&share.systematic, code.column(t)) != other.parity(t) {
                    return Err(Error::Corruption(format!(
                        "node {} parity at offset {t} disagrees with node {g}'s systematic data",
                        other.node_id
                    )));
                }
            }
        }
        for mg in &self.missing {
            let rhs: Vec<Symbol> = ordered
                .iter()
                .zip(&mg.offsets)
                .map(|(s, &t)| s.parity(t))
                .collect();
            let x = mg.inverse.mul_slice(&rhs);
            packets[(mg.group - 1) * k..mg.group * k].copy_from_slice(&x);
        }
        Ok(Stripe::new(packets))
    }
}
