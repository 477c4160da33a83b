//! Gauss–Legendre rules and the composite adaptive integrators built on them.
//!
//! Two drivers are provided:
//!
//! * [`integrate`] bisects the panel with the largest local error estimate
//!   until the summed estimate drops below `rel_tol` times the L1 mass of the
//!   integrand. Local error is the difference between the rule on a panel and
//!   the rule on its two halves, so panels near a zero of `|s|^p` or near an
//!   endpoint singularity get refined automatically.
//! * [`integrate_vec`] refines a uniform composite rule by doubling, for
//!   vector-valued integrands whose components share one sample of an
//!   expensive factor (the reciprocal-series coefficients).

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Target error relative to the L1 mass of the integrand.
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Number of Gauss–Legendre nodes per panel.
    pub order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_panels: 20_000,
            order: 20,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::Validation(format!(
                "quadrature tolerance must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_panels < 1 {
            return Err(Error::Validation("max panel count must be at least 1".into()));
        }
        if !(2..=256).contains(&self.order) {
            return Err(Error::Validation(format!(
                "rule order must lie in 2..=256, got {}",
                self.order
            )));
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared rule for `order`, cached per thread.
    pub fn cached(order: usize) -> Rc<Self> {
        thread_local! {
            static RULES: RefCell<HashMap<usize, Rc<GaussLegendre>>> = RefCell::new(HashMap::new());
        }
        RULES.with(|rules| {
            rules
                .borrow_mut()
                .entry(order)
                .or_insert_with(|| Rc::new(GaussLegendre::new(order)))
                .clone()
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Returns (∫f, ∫|f|) over [a, b].
    pub fn apply<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> (f64, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        let mut abs = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let y = f(mid + half * x);
            sum += w * y;
            abs += w * y.abs();
        }
        (sum * half, abs * half.abs())
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy)]
struct Half {
    value: f64,
    abs: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    left: Half,
    right: Half,
    err: f64,
}

impl Panel {
    fn value(&self) -> f64 {
        self.left.value + self.right.value
    }

    fn abs(&self) -> f64 {
        self.left.abs + self.right.abs
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn make_panel<F: Fn(f64) -> f64>(rule: &GaussLegendre, f: &F, a: f64, b: f64, whole: f64) -> Panel {
    let m = 0.5 * (a + b);
    let (lv, la) = rule.apply(f, a, m);
    let (rv, ra) = rule.apply(f, m, b);
    Panel {
        a,
        b,
        left: Half { value: lv, abs: la },
        right: Half { value: rv, abs: ra },
        err: (lv + rv - whole).abs(),
    }
}

/// Adaptive integral of `f` over `[breaks[0], breaks[last]]`.
///
/// `breaks` is the initial partition; put known kinks or sample boundaries
/// there. On failure the [`Error::Convergence`] value carries the best
/// estimate reached.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if breaks.len() < 2 {
        return Err(Error::Validation("need at least two breakpoints".into()));
    }
    if breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Validation("breakpoints must be strictly increasing".into()));
    }
    let rule = GaussLegendre::cached(cfg.order);
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 2);
    let (mut value, mut abs, mut err) = (0.0, 0.0, 0.0);
    for w in breaks.windows(2) {
        let (whole, _) = rule.apply(&f, w[0], w[1]);
        let panel = make_panel(&rule, &f, w[0], w[1], whole);
        value += panel.value();
        abs += panel.abs();
        err += panel.err;
        heap.push(panel);
    }

    loop {
        if !value.is_finite() || !err.is_finite() {
            return Err(Error::Domain("integrand is not finite on the interval".into()));
        }
        if err <= cfg.rel_tol * abs {
            break;
        }
        if heap.len() >= cfg.max_panels {
            let estimate: f64 = heap.iter().map(Panel::value).sum();
            return Err(Error::Convergence {
                estimate,
                error: err,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            // Panel collapsed to adjacent floats; nothing left to refine.
            let estimate: f64 = heap.iter().map(Panel::value).sum::<f64>() + worst.value();
            return Err(Error::Convergence {
                estimate,
                error: err,
                panels: heap.len() + 1,
            });
        }
        let l = make_panel(&rule, &f, worst.a, m, worst.left.value);
        let r = make_panel(&rule, &f, m, worst.b, worst.right.value);
        value += l.value() + r.value() - worst.value();
        abs += l.abs() + r.abs() - worst.abs();
        err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
    }

    // Re-sum to shed drift from the incremental updates.
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(panels.iter().map(Panel::value).sum())
}

/// Uniform composite rule on `[a, b]` for a `dim`-component integrand.
///
/// Starts from `initial_panels` and doubles the panel count until every
/// component changes by at most `rel_tol` times the largest component's L1
/// mass. `f(x, out)` must fill `out` completely.
pub fn integrate_vec<F: Fn(f64, &mut [f64])>(
    f: F,
    dim: usize,
    a: f64,
    b: f64,
    initial_panels: usize,
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if !(b > a) {
        return Err(Error::Validation("integration interval is empty".into()));
    }
    let rule = GaussLegendre::cached(cfg.order);
    let mut panels = initial_panels.max(1);
    let mut prev = composite(&rule, &f, dim, a, b, panels);
    let mut last_diff = f64::INFINITY;
    loop {
        if panels * 2 > cfg.max_panels {
            return Err(Error::Convergence {
                estimate: prev.0.first().copied().unwrap_or(0.0),
                error: last_diff,
                panels,
            });
        }
        panels *= 2;
        let next = composite(&rule, &f, dim, a, b, panels);
        let diff = max_diff(&prev.0, &next.0);
        let scale = next.1.iter().cloned().fold(0.0, f64::max);
        if !diff.is_finite() {
            return Err(Error::Domain("integrand is not finite on the interval".into()));
        }
        if diff <= cfg.rel_tol * scale {
            return Ok(next.0);
        }
        last_diff = diff;
        prev = next;
    }
}

fn max_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

fn composite<F: Fn(f64, &mut [f64])>(
    rule: &GaussLegendre,
    f: &F,
    dim: usize,
    a: f64,
    b: f64,
    panels: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut sum = vec![0.0; dim];
    let mut abs = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    let h = (b - a) / panels as f64;
    for i in 0..panels {
        let lo = a + h * i as f64;
        let mid = lo + 0.5 * h;
        for (x, w) in rule.nodes().iter().zip(rule.weights()) {
            f(mid + 0.5 * h * x, &mut buf);
            let wh = 0.5 * h * w;
            for c in 0..dim {
                sum[c] += wh * buf[c];
                abs[c] += wh * buf[c].abs();
            }
        }
    }
    (sum, abs)
}

/// `n + 1` equally spaced breakpoints on `[a, b]`.
pub fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut out: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    out.push(b);
    out
}
