//! Derivative-free search for polynomials with a large sieve ratio.
//!
//! `|s(x_j)|^p` is not smooth where `s` vanishes when `p < 2`, so the search
//! uses random coordinate perturbations with a decaying step and independent
//! restarts instead of gradients.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::campaign::trial_seed;
use super::nodes::NodeStrategy;
use super::{sieve_ratio, verify_instance, VerifyResult};
use crate::bounds::sharp_constant;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::trigpoly::{random_poly_with, NodeSet, TrigPoly};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    #[serde(rename = "N")]
    pub n: u32,
    pub p: f64,
    pub strategy: NodeStrategy,
    /// Perturbation attempts per restart.
    pub iterations: usize,
    pub restarts: usize,
    /// First step, relative to the RMS coefficient size.
    pub initial_step: f64,
    /// Step multiplier applied after every `2(2N+1)` attempts.
    pub step_decay: f64,
    pub seed: u64,
    pub quadrature: QuadratureConfig,
}

impl SearchConfig {
    pub fn new(n: u32, p: f64, strategy: NodeStrategy, seed: u64) -> Self {
        Self {
            n,
            p,
            strategy,
            iterations: 200,
            restarts: 4,
            initial_step: 0.5,
            step_decay: 0.7,
            seed,
            quadrature: QuadratureConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("degree N must be at least 1".into()));
        }
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::Domain(format!("p must be a finite value ≥ 1, got {}", self.p)));
        }
        if self.iterations == 0 || self.restarts == 0 {
            return Err(Error::Validation("search needs iterations ≥ 1 and restarts ≥ 1".into()));
        }
        if !(self.initial_step > 0.0) || !(self.step_decay > 0.0 && self.step_decay <= 1.0) {
            return Err(Error::Validation(
                "step must be positive and decay must lie in (0, 1]".into(),
            ));
        }
        self.strategy.validate()?;
        self.quadrature.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub restart: usize,
    pub iteration: usize,
    pub step: f64,
    pub ratio: f64,
    pub tightness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub best: VerifyResult,
    /// `best.ratio / best.bound`.
    pub tightness: f64,
    /// Best polynomial, scaled to unit `L^p` norm.
    pub poly: TrigPoly,
    pub nodes: NodeSet,
    pub best_restart: usize,
    /// Best tightness among random starting points before any search step.
    pub random_start_tightness: Option<f64>,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

struct RestartResult {
    coeffs: Vec<Complex64>,
    nodes: NodeSet,
    ratio: f64,
    start_ratio: f64,
    trace: Vec<TraceRow>,
}

fn run_restart(cfg: &SearchConfig, restart: usize, bound: f64) -> Result<RestartResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, restart));
    let nodes = cfg.strategy.nodes(&mut rng)?;
    let n = cfg.n;
    // Restart 0 starts from the Dirichlet kernel, a natural peak candidate.
    let mut coeffs: Vec<Complex64> = if restart == 0 {
        vec![Complex64::new(1.0, 0.0); 2 * n as usize + 1]
    } else {
        random_poly_with(n, &mut rng, 1.0)?.coeffs().to_vec()
    };
    let ratio_of = |c: &[Complex64]| -> Result<f64> {
        sieve_ratio(&TrigPoly::new(c.to_vec())?, &nodes, cfg.p, &cfg.quadrature)
    };
    let mut ratio = ratio_of(&coeffs)?;
    let start_ratio = ratio;
    let coords = 2 * coeffs.len();
    let mut step = cfg.initial_step;
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    trace.push(TraceRow {
        restart,
        iteration: 0,
        step,
        ratio,
        tightness: ratio / bound,
    });
    for it in 1..=cfg.iterations {
        let rms = (coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / coeffs.len() as f64).sqrt();
        let coord = rng.random_range(0..coords);
        let first_sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        for sign in [first_sign, -first_sign] {
            let mut trial = coeffs.clone();
            let d = sign * step * rms.max(f64::MIN_POSITIVE);
            let c = &mut trial[coord / 2];
            if coord % 2 == 0 {
                c.re += d;
            } else {
                c.im += d;
            }
            let r = ratio_of(&trial)?;
            if r > ratio {
                ratio = r;
                coeffs = trial;
                break;
            }
        }
        if it % coords == 0 {
            step *= cfg.step_decay;
        }
        trace.push(TraceRow {
            restart,
            iteration: it,
            step,
            ratio,
            tightness: ratio / bound,
        });
    }
    Ok(RestartResult {
        coeffs,
        nodes,
        ratio,
        start_ratio,
        trace,
    })
}

/// Restarts run concurrently; the best is chosen by ratio, lowest restart
/// index on ties. A search that never improves still returns its best start.
pub fn extremal_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    // Random-separated placements differ per restart, and so may their bound.
    let bound_for = |nodes: &NodeSet| sharp_constant(cfg.n, &nodes.separation(), cfg.p);
    let results = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, r));
            let bound = bound_for(&cfg.strategy.nodes(&mut rng)?)?;
            run_restart(cfg, r, bound).map(|res| (res, bound))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (i, (res, bound)) in results.iter().enumerate() {
        if res.ratio / bound > results[best].0.ratio / results[best].1 {
            best = i;
        }
    }
    let random_start_tightness = results
        .iter()
        .skip(1)
        .map(|(res, bound)| res.start_ratio / bound)
        .reduce(f64::max);
    let (winner, _) = &results[best];
    let poly = TrigPoly::new(winner.coeffs.clone())?;
    let norm = poly.lp_norm(cfg.p, &cfg.quadrature)?;
    let poly = if norm > 0.0 {
        poly.scaled(Complex64::new(1.0 / norm, 0.0))
    } else {
        poly
    };
    let best_result = verify_instance(&poly, &winner.nodes, cfg.p, &cfg.quadrature)?.with_seed(cfg.seed);
    let trace = results.iter().flat_map(|(r, _)| r.trace.iter().cloned()).collect();
    Ok(SearchOutcome {
        tightness: best_result.tightness(),
        best: best_result,
        poly,
        nodes: winner.nodes.clone(),
        best_restart: best,
        random_start_tightness,
        trace,
    })
}
