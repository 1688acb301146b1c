//! Cooperative repair of exactly `r` failed nodes.
//!
//! Every survivor `i` sends two symbols to each newcomer `j`:
//!
//! * `x_i · v_{offset_of(i, j)}`, the parity about group `i` that `j` must
//!   store ([`TransferKind::SurvivorGroup`]);
//! * its stored parity about group `j`, `x_j · v_{offset_of(j, i)}`
//!   ([`TransferKind::SurvivorParity`]).
//!
//! The `k` parities about group `j` use distinct generator columns, so `j`
//! solves for `x_j`. Newcomers then exchange one symbol each:
//! `j` sends `x_j · v_{offset_of(j, j')}` to every other newcomer `j'`
//! ([`TransferKind::Exchange`]). The exchange indexing follows the storage
//! layout, so each newcomer ends up with exactly its original share.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{mod_n_add, offset_of, CodeParams, MbcrCode, NodeShare};
use crate::error::{Error, Result};
use crate::gf::Symbol;
use crate::matrix::FieldMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Phase {
    /// Survivor to newcomer.
    Download,
    /// Newcomer to newcomer.
    Exchange,
}

impl Phase {
    pub fn number(self) -> u8 {
        match self {
            Phase::Download => 1,
            Phase::Exchange => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TransferKind {
    SurvivorGroup,
    SurvivorParity,
    Exchange,
}

impl TransferKind {
    pub fn phase(self) -> Phase {
        match self {
            TransferKind::SurvivorGroup | TransferKind::SurvivorParity => Phase::Download,
            TransferKind::Exchange => Phase::Exchange,
        }
    }
}

/// The payload of a transfer is `x_group · v_offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Provenance {
    pub group: usize,
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlannedTransfer {
    pub sender: usize,
    pub receiver: usize,
    pub kind: TransferKind,
    pub provenance: Provenance,
}

impl PlannedTransfer {
    pub fn phase(&self) -> Phase {
        self.kind.phase()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairPlan {
    pub failed: Vec<usize>,
    pub survivors: Vec<usize>,
    pub transfers: Vec<PlannedTransfer>,
}

impl RepairPlan {
    pub fn count(&self, phase: Phase) -> usize {
        self.transfers.iter().filter(|t| t.phase() == phase).count()
    }

    pub fn received_by(&self, node: usize) -> usize {
        self.transfers.iter().filter(|t| t.receiver == node).count()
    }
}

/// A performed transfer. `payload[s]` is the symbol for stripe `s`; the same
/// logical transfer across all stripes is one record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transfer {
    pub sender: usize,
    pub receiver: usize,
    pub phase: Phase,
    pub kind: TransferKind,
    pub provenance: Provenance,
    pub payload: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepairTranscript {
    pub stripes: usize,
    pub transfers: Vec<Transfer>,
}

impl RepairTranscript {
    /// Logical transfers (one per stripe-batched record).
    pub fn count(&self, phase: Phase) -> usize {
        self.transfers.iter().filter(|t| t.phase == phase).count()
    }

    pub fn total(&self) -> usize {
        self.transfers.len()
    }

    /// Symbols moved across all stripes.
    pub fn packets(&self) -> usize {
        self.transfers.iter().map(|t| t.payload.len()).sum()
    }

    /// Logical transfers received by each receiver; per stripe this is γ.
    pub fn received_per_newcomer(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for t in &self.transfers {
            *out.entry(t.receiver).or_insert(0) += 1;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RepairOutcome {
    /// Regenerated shares per newcomer, one entry per stripe.
    pub regenerated: BTreeMap<usize, Vec<NodeShare>>,
    pub transcript: RepairTranscript,
}

impl MbcrCode {
    /// Transfer schedule for regenerating `failed` (exactly `r` distinct nodes).
    pub fn plan_repair(&self, failed: &[usize]) -> Result<RepairPlan> {
        let CodeParams { n, r, .. } = self.params;
        let failed_set: BTreeSet<usize> = failed.iter().copied().collect();
        if failed_set.len() != failed.len() || failed.len() != r {
            return Err(Error::UnsupportedFailurePattern(format!(
                "repair needs exactly r = {r} distinct failed nodes, got {failed:?}"
            )));
        }
        for &f in &failed_set {
            self.check_node(f)
                .map_err(|e| Error::UnsupportedFailurePattern(e.to_string()))?;
        }
        let newcomers: Vec<usize> = failed_set.into_iter().collect();
        let survivors: Vec<usize> = (1..=n).filter(|i| !newcomers.contains(i)).collect();

        let mut transfers = Vec::with_capacity(2 * survivors.len() * r + r * (r - 1));
        for &i in &survivors {
            for &j in &newcomers {
                transfers.push(PlannedTransfer {
                    sender: i,
                    receiver: j,
                    kind: TransferKind::SurvivorGroup,
                    provenance: Provenance {
                        group: i,
                        offset: offset_of(i, j, n)?,
                    },
                });
            }
        }
        for &i in &survivors {
            for &j in &newcomers {
                transfers.push(PlannedTransfer {
                    sender: i,
                    receiver: j,
                    kind: TransferKind::SurvivorParity,
                    provenance: Provenance {
                        group: j,
                        offset: offset_of(j, i, n)?,
                    },
                });
            }
        }
        for &j in &newcomers {
            for &other in newcomers.iter().filter(|&&o| o != j) {
                transfers.push(PlannedTransfer {
                    sender: j,
                    receiver: other,
                    kind: TransferKind::Exchange,
                    provenance: Provenance {
                        group: j,
                        offset: offset_of(j, other, n)?,
                    },
                });
            }
        }
        Ok(RepairPlan {
            failed: newcomers,
            survivors,
            transfers,
        })
    }

    /// Runs `plan` against the survivors' shares (one `Vec` entry per stripe).
    pub fn execute_repair(
        &self,
        plan: &RepairPlan,
        survivors: &BTreeMap<usize, Vec<NodeShare>>,
    ) -> Result<RepairOutcome> {
        let CodeParams { n, k, .. } = self.params;
        let present: Vec<usize> = survivors.keys().copied().collect();
        if present != plan.survivors {
            return Err(Error::UnsupportedFailurePattern(format!(
                "repair needs shares from survivors {:?}, got {present:?}",
                plan.survivors
            )));
        }
        let stripes = survivors.values().next().map_or(0, Vec::len);
        for (&id, shares) in survivors {
            if shares.len() != stripes {
                return Err(Error::Corruption(format!(
                    "node {id} has {} stripes, expected {stripes}",
                    shares.len()
                )));
            }
            for s in shares {
                self.check_share(s)?;
                if s.node_id != id {
                    return Err(Error::Corruption(format!(
                        "share labelled node {} supplied for node {id}",
                        s.node_id
                    )));
                }
            }
        }

        let field = self.field();
        let mut transfers: Vec<Transfer> = Vec::with_capacity(plan.transfers.len());
        for pt in plan.transfers.iter().filter(|t| t.phase() == Phase::Download) {
            let shares = &survivors[&pt.sender];
            let payload = match pt.kind {
                TransferKind::SurvivorGroup => shares
                    .iter()
                    .map(|s| field.dot(&s.systematic, self.column(pt.provenance.offset)))
                    .collect(),
                TransferKind::SurvivorParity => {
                    shares.iter().map(|s| s.parity(pt.provenance.offset)).collect()
                }
                TransferKind::Exchange => unreachable!("filtered to download phase"),
            };
            transfers.push(record(pt, payload));
        }

        // Each newcomer solves for its own group from the k parities it received.
        let mut recovered: BTreeMap<usize, Vec<Vec<Symbol>>> = BTreeMap::new();
        for &j in &plan.failed {
            let incoming: Vec<&Transfer> = transfers
                .iter()
                .filter(|t| t.receiver == j && t.kind == TransferKind::SurvivorParity)
                .collect();
            if incoming.len() != k {
                return Err(Error::Internal(format!(
                    "newcomer {j} received {} parities about its group, expected {k}",
                    incoming.len()
                )));
            }
            let rows: Vec<&[Symbol]> = incoming
                .iter()
                .map(|t| self.column(t.provenance.offset))
                .collect();
            let inverse = FieldMatrix::from_rows(field, &rows)?
                .inverse()
                .map_err(|_| {
                    Error::Corruption(format!("recovery system for newcomer {j} is singular"))
                })?;
            let groups = (0..stripes)
                .map(|s| {
                    let rhs: Vec<Symbol> = incoming.iter().map(|t| t.payload[s]).collect();
                    inverse.mul_slice(&rhs)
                })
                .collect();
            recovered.insert(j, groups);
        }

        for pt in plan.transfers.iter().filter(|t| t.phase() == Phase::Exchange) {
            let payload = recovered[&pt.sender]
                .iter()
                .map(|x| field.dot(x, self.column(pt.provenance.offset)))
                .collect();
            transfers.push(record(pt, payload));
        }

        // Assemble: parity t of newcomer j is x_{j⊕t}·v_t, delivered by node j⊕t.
        let mut regenerated = BTreeMap::new();
        for &j in &plan.failed {
            let mut by_offset: Vec<Option<&Transfer>> = vec![None; n];
            for t in transfers.iter().filter(|t| t.receiver == j && t.kind != TransferKind::SurvivorParity) {
                by_offset[t.provenance.offset] = Some(t);
            }
            let mut parity_rows = Vec::with_capacity(n - 1);
            for t in 1..n {
                let src = by_offset[t].ok_or_else(|| {
                    Error::Internal(format!("newcomer {j} never received its offset-{t} parity"))
                })?;
                let holder_group = mod_n_add(j, t, n)?;
                if src.provenance.group != holder_group {
                    return Err(Error::Internal(format!(
                        "newcomer {j} offset {t} expected group {holder_group}, got {}",
                        src.provenance.group
                    )));
                }
                parity_rows.push(&src.payload);
            }
            let shares = (0..stripes)
                .map(|s| NodeShare {
                    node_id: j,
                    systematic: recovered[&j][s].clone(),
                    parity: parity_rows.iter().map(|p| p[s]).collect(),
                })
                .collect();
            regenerated.insert(j, shares);
        }

        Ok(RepairOutcome {
            regenerated,
            transcript: RepairTranscript { stripes, transfers },
        })
    }
}

fn record(pt: &PlannedTransfer, payload: Vec<Symbol>) -> Transfer {
    Transfer {
        sender: pt.sender,
        receiver: pt.receiver,
        phase: pt.phase(),
        kind: pt.kind,
        provenance: pt.provenance,
        payload,
    }
}
