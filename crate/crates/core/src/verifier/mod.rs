//! Empirical checks of the sieve inequality: single instances, seeded random
//! campaigns, a derivative-free search for near-extremal polynomials, and
//! tables comparing the available constants.

mod campaign;
mod compare;
mod nodes;
mod search;

pub use campaign::{
    random_campaign, trial_instance, CampaignConfig, CampaignSummary, DegreeRange, ReplayInstance,
    TrialRow,
};
pub use compare::{compare_bounds, CompareRow};
pub use nodes::{NodeStrategy, StrategyKind};
pub use search::{extremal_search, SearchConfig, SearchOutcome, TraceRow};

use serde::{Deserialize, Serialize};

use crate::bounds::sharp_constant;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::trigpoly::{sieve_sum, NodeSet, TrigPoly};

/// Relative slack in the pass test `ratio ≤ bound · (1 + PASS_SLACK)`.
pub const PASS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    #[serde(rename = "N")]
    pub n: u32,
    pub p: f64,
    pub delta: f64,
    pub r: usize,
    pub seed: Option<u64>,
}

/// Outcome of checking `Σ|s(x_j)|^p ≤ C ‖s‖_p^p` on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyResult {
    /// `sieve_sum / ‖s‖_p^p`, or 0 for the zero polynomial.
    pub ratio: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    pub meta: InstanceMeta,
}

impl VerifyResult {
    pub fn tightness(&self) -> f64 {
        self.ratio / self.bound
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.meta.seed = Some(seed);
        self
    }
}

/// Ratio and pass flag for one polynomial and node set. Inequality failures
/// are data in the result; only malformed input is an error.
pub fn verify_instance(
    s: &TrigPoly,
    nodes: &NodeSet,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<VerifyResult> {
    if nodes.is_empty() {
        return Err(Error::Validation("node set is empty".into()));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("p must be a finite value ≥ 1, got {p}")));
    }
    let n = s.degree();
    let delta = nodes.separation();
    let bound = sharp_constant(n, &delta, p)?;
    let ratio = sieve_ratio(s, nodes, p, cfg)?;
    Ok(VerifyResult {
        ratio,
        bound,
        margin: bound - ratio,
        pass: ratio <= bound * (1.0 + PASS_SLACK),
        meta: InstanceMeta {
            n,
            p,
            delta: delta.value(),
            r: nodes.len(),
            seed: None,
        },
    })
}

/// `Σ|s(x_j)|^p / ‖s‖_p^p`, 0 for the zero polynomial.
pub(crate) fn sieve_ratio(s: &TrigPoly, nodes: &NodeSet, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if s.is_zero() {
        return Ok(0.0);
    }
    let norm = s.lp_norm(p, cfg)?;
    Ok(sieve_sum(s, nodes, p) / norm.powf(p))
}
