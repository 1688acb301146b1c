//! Fail-and-repair lifecycle of a storage cluster with bandwidth accounting.
//!
//! Each round fails exactly `r` nodes, regenerates them cooperatively,
//! checks the regenerated shares against the pre-failure state and audits
//! every `k`-node data collector.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{decimal, int, mbcr_lower_bound, show, Rational, SystemParams};
use crate::code::{CodeParams, MbcrCode, NodeShare, Phase, Stripe};
use crate::error::{param, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureModel {
    /// A uniformly random `r`-subset of nodes per round.
    UniformRandom,
    /// Failed sets used in order, cycling when rounds outnumber entries.
    Schedule(Vec<Vec<usize>>),
}

#[derive(Debug, Clone)]
pub struct ClusterState {
    code: MbcrCode,
    shares: BTreeMap<usize, Vec<NodeShare>>,
    reference: Vec<Stripe>,
    round: usize,
}

impl ClusterState {
    pub fn new(code: MbcrCode, stripes: Vec<Stripe>) -> Result<Self> {
        let n = code.params().n;
        let mut shares: BTreeMap<usize, Vec<NodeShare>> = (1..=n).map(|i| (i, Vec::new())).collect();
        for stripe in &stripes {
            for share in code.encode(stripe)? {
                shares.get_mut(&share.node_id).expect("node ids are 1..=n").push(share);
            }
        }
        Ok(Self {
            code,
            shares,
            reference: stripes,
            round: 0,
        })
    }

    /// Cluster holding `stripes` uniformly random stripes.
    pub fn random<R: Rng>(code: MbcrCode, stripes: usize, rng: &mut R) -> Result<Self> {
        let order = code.field().order();
        let len = code.params().stripe_len();
        let data = (0..stripes)
            .map(|_| Stripe::new((0..len).map(|_| rng.gen_range(0..order) as u16).collect()))
            .collect();
        Self::new(code, data)
    }

    pub fn code(&self) -> &MbcrCode {
        &self.code
    }

    pub fn shares(&self) -> &BTreeMap<usize, Vec<NodeShare>> {
        &self.shares
    }

    /// Mutable access for fault injection.
    pub fn shares_mut(&mut self) -> &mut BTreeMap<usize, Vec<NodeShare>> {
        &mut self.shares
    }

    pub fn reference(&self) -> &[Stripe] {
        &self.reference
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Fails `failed`, repairs it and verifies the shares were restored.
    pub fn fail_and_repair(&mut self, failed: &[usize]) -> Result<RoundReport> {
        let plan = self.code.plan_repair(failed)?;
        let before = self.shares.clone();
        let survivors: BTreeMap<usize, Vec<NodeShare>> = self
            .shares
            .iter()
            .filter(|(id, _)| !plan.failed.contains(id))
            .map(|(&id, s)| (id, s.clone()))
            .collect();
        for id in &plan.failed {
            self.shares.remove(id);
        }
        let outcome = self.code.execute_repair(&plan, &survivors)?;
        let transcript = outcome.transcript;

        // every performed transfer must be the matching plan entry
        let stripes = self.reference.len();
        if transcript.transfers.len() != plan.transfers.len() {
            return Err(Error::Internal(format!(
                "transcript has {} transfers, plan has {}",
                transcript.transfers.len(),
                plan.transfers.len()
            )));
        }
        for (done, planned) in transcript.transfers.iter().zip(&plan.transfers) {
            if (done.sender, done.receiver, done.kind, done.provenance)
                != (planned.sender, planned.receiver, planned.kind, planned.provenance)
                || done.payload.len() != stripes
            {
                return Err(Error::Internal(format!(
                    "transfer {} -> {} does not match its plan entry",
                    done.sender, done.receiver
                )));
            }
        }

        self.shares.extend(outcome.regenerated);
        let restored = self.shares == before;
        if !restored {
            let bad: Vec<usize> = plan
                .failed
                .iter()
                .copied()
                .filter(|id| self.shares.get(id) != before.get(id))
                .collect();
            return Err(Error::Corruption(format!(
                "round {}: regenerated nodes {bad:?} differ from their lost content",
                self.round + 1
            )));
        }
        self.round += 1;

        let received: BTreeMap<usize, usize> = transcript.received_per_newcomer();
        let gamma_measured = received.values().copied().max().unwrap_or(0);
        let phase1 = transcript.count(Phase::Download);
        let phase2 = transcript.count(Phase::Exchange);
        let audit = audit_collectors(self).summary();
        Ok(RoundReport {
            round: self.round,
            failed: plan.failed,
            phase1_transfers: phase1,
            phase2_transfers: phase2,
            phase1_packets: phase1 * stripes,
            phase2_packets: phase2 * stripes,
            received,
            gamma_measured,
            ratio: String::new(),
            restored,
            audit,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "detail")]
pub enum CollectorStatus {
    Pass,
    Mismatch,
    Corruption(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollectorResult {
    pub collector: Vec<usize>,
    pub status: CollectorStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditResult {
    pub results: Vec<CollectorResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuditSummary {
    pub collectors: usize,
    pub passed: usize,
}

impl AuditResult {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.status == CollectorStatus::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CollectorResult> {
        self.results.iter().filter(|r| r.status != CollectorStatus::Pass)
    }

    pub fn summary(&self) -> AuditSummary {
        AuditSummary {
            collectors: self.results.len(),
            passed: self.results.len() - self.failures().count(),
        }
    }
}

/// Reconstructs through every `k`-subset of nodes and compares with the
/// reference stripes.
pub fn audit_collectors(state: &ClusterState) -> AuditResult {
    let CodeParams { n, k, .. } = *state.code.params();
    let results = (1..=n)
        .combinations(k)
        .map(|collector| {
            let status = audit_one(state, &collector);
            CollectorResult { collector, status }
        })
        .collect();
    AuditResult { results }
}

fn audit_one(state: &ClusterState, collector: &[usize]) -> CollectorStatus {
    let decoder = match state.code.decoder(collector) {
        Ok(d) => d,
        Err(e) => return CollectorStatus::Corruption(e.to_string()),
    };
    for (s, expected) in state.reference.iter().enumerate() {
        let shares: Option<Vec<&NodeShare>> = collector
            .iter()
            .map(|id| state.shares.get(id).and_then(|v| v.get(s)))
            .collect();
        let Some(shares) = shares else {
            return CollectorStatus::Corruption(format!("stripe {s} missing on a collector node"));
        };
        match decoder.decode(&state.code, &shares) {
            Ok(stripe) if stripe == *expected => {}
            Ok(_) => return CollectorStatus::Mismatch,
            Err(e) => return CollectorStatus::Corruption(e.to_string()),
        }
    }
    CollectorStatus::Pass
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundReport {
    pub round: usize,
    pub failed: Vec<usize>,
    /// Logical transfers per stripe.
    pub phase1_transfers: usize,
    pub phase2_transfers: usize,
    /// Packets across all stripes.
    pub phase1_packets: usize,
    pub phase2_packets: usize,
    /// Packets received by each newcomer per stripe.
    pub received: BTreeMap<usize, usize>,
    pub gamma_measured: usize,
    /// `gamma_measured / gamma_bound`, exact.
    pub ratio: String,
    pub restored: bool,
    pub audit: AuditSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub r: usize,
    pub field_degree: u32,
    pub field_poly: u32,
    pub stripes: usize,
    pub file_size: usize,
    pub alpha: usize,
    pub beta1: usize,
    pub beta2: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub rounds: usize,
    pub phase1_packets: usize,
    pub phase2_packets: usize,
    pub packets: usize,
    pub collectors_audited: usize,
    pub collectors_passed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub gamma_bound: String,
    pub gamma_bound_decimal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioReport {
    /// Mean over rounds of `gamma_measured / gamma_bound`.
    pub exact: String,
    pub decimal: String,
    pub all_rounds_optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BandwidthReport {
    pub params: ReportParams,
    pub rounds: Vec<RoundReport>,
    pub totals: Totals,
    pub bound: BoundReport,
    pub ratio: RatioReport,
    pub seed: u64,
}

impl BandwidthReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Runs `rounds` fail-and-repair cycles over `stripes` random stripes.
/// Stripe contents and uniform failure sets are drawn from `seed`.
pub fn run_simulation(
    params: CodeParams,
    stripes: usize,
    rounds: usize,
    model: &FailureModel,
    seed: u64,
) -> Result<BandwidthReport> {
    let code = MbcrCode::new(params.clone())?;
    let CodeParams { n, k, d, r, .. } = params;
    if let FailureModel::Schedule(s) = model {
        if s.is_empty() && rounds > 0 {
            return param("failure schedule is empty");
        }
        for set in s {
            code.plan_repair(set)?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = ClusterState::random(code, stripes, &mut rng)?;

    let b = params.stripe_len() as u64;
    let gamma_bound = mbcr_lower_bound(&SystemParams::new(b, k, d, r))?;

    let mut reports = Vec::with_capacity(rounds);
    let mut ratio_sum = Rational::from_integer(0.into());
    for round in 0..rounds {
        let failed: Vec<usize> = match model {
            FailureModel::UniformRandom => sample(&mut rng, n, r).into_iter().map(|i| i + 1).sorted().collect(),
            FailureModel::Schedule(s) => s[round % s.len()].clone(),
        };
        let mut report = state.fail_and_repair(&failed)?;
        let ratio = int(report.gamma_measured as i64) / &gamma_bound;
        report.ratio = show(&ratio);
        ratio_sum += ratio;
        reports.push(report);
    }

    let mean = if rounds == 0 {
        int(1)
    } else {
        ratio_sum / int(rounds as i64)
    };
    let phase1: usize = reports.iter().map(|r| r.phase1_packets).sum();
    let phase2: usize = reports.iter().map(|r| r.phase2_packets).sum();
    let audited: usize = reports.iter().map(|r| r.audit.collectors).sum();
    let passed: usize = reports.iter().map(|r| r.audit.passed).sum();
    let all_optimal = reports.iter().all(|r| r.ratio == "1");
    Ok(BandwidthReport {
        params: ReportParams {
            n,
            k,
            d,
            r,
            field_degree: params.field().degree(),
            field_poly: params.field().poly(),
            stripes,
            file_size: params.stripe_len(),
            alpha: params.alpha(),
            beta1: params.beta1(),
            beta2: params.beta2(),
        },
        rounds: reports,
        totals: Totals {
            rounds,
            phase1_packets: phase1,
            phase2_packets: phase2,
            packets: phase1 + phase2,
            collectors_audited: audited,
            collectors_passed: passed,
        },
        bound: BoundReport {
            gamma_bound: show(&gamma_bound),
            gamma_bound_decimal: decimal(&gamma_bound, 6),
        },
        ratio: RatioReport {
            exact: show(&mean),
            decimal: decimal(&mean, 6),
            all_rounds_optimal: all_optimal,
        },
        seed,
    })
}
