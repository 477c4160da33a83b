//! Trigonometric polynomials `s(x) = Σ_{k=-N}^{N} c_k e^{ikx}` and separated
//! node sets on the circle `(-π, π]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bounds::Separation;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, uniform_breaks, QuadratureConfig};

/// Degree-N trigonometric polynomial with dense coefficients `c_{-N..=N}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrigPolyRepr", into = "TrigPolyRepr")]
pub struct TrigPoly {
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct TrigPolyRepr {
    degree: u32,
    coeffs: Vec<[f64; 2]>,
}

impl TryFrom<TrigPolyRepr> for TrigPoly {
    type Error = Error;

    fn try_from(r: TrigPolyRepr) -> Result<Self> {
        if r.coeffs.len() != 2 * r.degree as usize + 1 {
            return Err(Error::Validation(format!(
                "degree {} needs {} coefficients, found {}",
                r.degree,
                2 * r.degree + 1,
                r.coeffs.len()
            )));
        }
        TrigPoly::new(r.coeffs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<TrigPoly> for TrigPolyRepr {
    fn from(p: TrigPoly) -> Self {
        Self {
            degree: p.degree(),
            coeffs: p.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

/// Largest supported degree.
pub const MAX_DEGREE: u32 = 4096;

impl TrigPoly {
    /// Builds from coefficients ordered `k = -N..=N`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let len = coeffs.len();
        if len < 3 || len % 2 == 0 {
            return Err(Error::Validation(format!(
                "coefficient vector must have odd length 2N+1 with N >= 1, got {len}"
            )));
        }
        if (len - 1) / 2 > MAX_DEGREE as usize {
            return Err(Error::Validation(format!("degree exceeds {MAX_DEGREE}")));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Validation("coefficients must be finite".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(n: u32) -> Result<Self> {
        check_degree(n)?;
        Self::new(vec![Complex64::zero(); 2 * n as usize + 1])
    }

    /// `c · e^{ikx}` as a degree-`n` polynomial.
    pub fn monomial(n: u32, k: i64, c: Complex64) -> Result<Self> {
        let mut p = Self::zero(n)?;
        if k.unsigned_abs() > n as u64 {
            return Err(Error::Validation(format!("frequency {k} exceeds degree {n}")));
        }
        p.coeffs[(k + n as i64) as usize] = c;
        Ok(p)
    }

    /// Builds from `f(k)` for `k = -N..=N`.
    pub fn from_fn(n: u32, f: impl Fn(i64) -> Complex64) -> Result<Self> {
        check_degree(n)?;
        let ni = n as i64;
        Self::new((-ni..=ni).map(f).collect())
    }

    pub fn degree(&self) -> u32 {
        ((self.coeffs.len() - 1) / 2) as u32
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_k`; zero outside the band.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.degree() as i64;
        if k.abs() > n {
            Complex64::zero()
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Σ|c_k|
    pub fn l1_coeffs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Multiplies every coefficient by `f(k)`.
    pub fn map_coeffs(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        let n = self.degree() as i64;
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| f(i as i64 - n, c))
                .collect(),
        }
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        self.map_coeffs(|_, c| c * alpha)
    }

    /// `x ↦ s(x - t)`.
    pub fn shifted(&self, t: f64) -> Self {
        self.map_coeffs(|k, c| c * Complex64::from_polar(1.0, -(k as f64) * t))
    }

    /// `s(x)`, by Horner's rule in `e^{ix}`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let w = Complex64::from_polar(1.0, x);
        let mut acc = Complex64::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc * Complex64::from_polar(1.0, -(self.degree() as f64) * x)
    }

    /// `(∫_T |s|^p)^{1/p}` by adaptive quadrature.
    pub fn lp_norm(&self, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
        lp_norm(self, p, cfg)
    }

    /// `(2π Σ |c_k|²)^{1/2}`
    pub fn parseval_norm(&self) -> f64 {
        (2.0 * PI * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }
}

fn check_degree(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("degree N must be at least 1".into()));
    }
    if n > MAX_DEGREE {
        return Err(Error::Domain(format!("degree exceeds {MAX_DEGREE}")));
    }
    Ok(())
}

pub fn evaluate(poly: &TrigPoly, x: f64) -> Complex64 {
    poly.evaluate(x)
}

/// L^p(T) norm of `poly`.
pub fn lp_norm(poly: &TrigPoly, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("L^p norm needs p >= 1, got {p}")));
    }
    if poly.is_zero() {
        return Ok(0.0);
    }
    // One panel per half-period of the top frequency to start.
    let panels = 2 * poly.degree() as usize + 2;
    let breaks = uniform_breaks(-PI, PI, panels);
    let integral = if p == 2.0 {
        integrate(|x| poly.evaluate(x).norm_sqr(), &breaks, cfg)?
    } else {
        integrate(|x| poly.evaluate(x).norm().powf(p), &breaks, cfg)?
    };
    Ok(integral.powf(1.0 / p))
}

/// Σ_j |s(x_j)|^p
pub fn sieve_sum(poly: &TrigPoly, nodes: &NodeSet, p: f64) -> f64 {
    nodes
        .points()
        .iter()
        .map(|&x| poly.evaluate(x).norm().powf(p))
        .sum()
}

/// Coefficients i.i.d. centered complex Gaussian with `E|c_k|² = scale²`.
pub fn random_poly(n: u32, seed: u64, scale: f64) -> Result<TrigPoly> {
    check_degree(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_poly_with(n, &mut rng, scale)
}

pub fn random_poly_with<R: rand::Rng>(n: u32, rng: &mut R, scale: f64) -> Result<TrigPoly> {
    check_degree(n)?;
    if !scale.is_finite() {
        return Err(Error::Domain("scale must be finite".into()));
    }
    let sd = scale / std::f64::consts::SQRT_2;
    let coeffs = (0..2 * n as usize + 1)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(sd * re, sd * im)
        })
        .collect();
    TrigPoly::new(coeffs)
}

/// Minimal circular gap of strictly increasing points in `(-π, π]`.
pub fn separation(points: &[f64]) -> Result<f64> {
    validate_points(points)?;
    let r = points.len();
    let inner = points
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    Ok(inner.min(2.0 * PI - (points[r - 1] - points[0])))
}

fn validate_points(points: &[f64]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::Validation(format!(
            "need at least two nodes, got {}",
            points.len()
        )));
    }
    if let Some(x) = points.iter().find(|x| !(**x > -PI && **x <= PI)) {
        return Err(Error::Validation(format!("node {x} lies outside (-π, π]")));
    }
    if points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Validation("nodes must be strictly increasing".into()));
    }
    Ok(())
}

/// Exact circular gap for nodes given as multiples of π.
pub fn separation_exact(fractions: &[Ratio<i64>]) -> Result<Ratio<i64>> {
    let one = Ratio::from_integer(1);
    if fractions.len() < 2 {
        return Err(Error::Validation(format!(
            "need at least two nodes, got {}",
            fractions.len()
        )));
    }
    if let Some(x) = fractions.iter().find(|x| !(**x > -one && **x <= one)) {
        return Err(Error::Validation(format!("node {x}·π lies outside (-π, π]")));
    }
    if fractions.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Validation("nodes must be strictly increasing".into()));
    }
    let r = fractions.len();
    let wrap = Ratio::from_integer(2) - (fractions[r - 1] - fractions[0]);
    Ok(fractions
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(wrap, |acc, g| if g < acc { g } else { acc }))
}

/// Sorted sample points with their separation δ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NodeSetRepr", into = "NodeSetRepr")]
pub struct NodeSet {
    points: Vec<f64>,
    pi_rational: Option<Vec<Ratio<i64>>>,
    separation: Separation,
}

#[derive(Serialize, Deserialize)]
struct NodeSetRepr {
    points: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi_rational: Option<Vec<[i64; 2]>>,
}

impl TryFrom<NodeSetRepr> for NodeSet {
    type Error = Error;

    fn try_from(r: NodeSetRepr) -> Result<Self> {
        match r.pi_rational {
            None => NodeSet::from_points(r.points),
            Some(pairs) => {
                if pairs.iter().any(|[_, d]| *d == 0) {
                    return Err(Error::Validation("zero denominator in node fraction".into()));
                }
                let set = NodeSet::from_pi_rationals(
                    pairs.into_iter().map(|[n, d]| Ratio::new(n, d)).collect(),
                )?;
                if set.points.len() != r.points.len()
                    || set
                        .points
                        .iter()
                        .zip(&r.points)
                        .any(|(a, b)| (a - b).abs() > 1e-12)
                {
                    return Err(Error::Validation(
                        "points disagree with their rational π multiples".into(),
                    ));
                }
                Ok(set)
            }
        }
    }
}

impl From<NodeSet> for NodeSetRepr {
    fn from(n: NodeSet) -> Self {
        Self {
            points: n.points,
            pi_rational: n
                .pi_rational
                .map(|v| v.into_iter().map(|r| [*r.numer(), *r.denom()]).collect()),
        }
    }
}

impl NodeSet {
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        let delta = separation(&points)?;
        Ok(Self {
            points,
            pi_rational: None,
            separation: Separation::new(delta)?,
        })
    }

    /// Nodes `π · f` for each fraction `f ∈ (-1, 1]`; the separation is exact.
    pub fn from_pi_rationals(fractions: Vec<Ratio<i64>>) -> Result<Self> {
        let delta = separation_exact(&fractions)?;
        let points = fractions
            .iter()
            .map(|f| PI * f.to_f64().expect("bounded ratio converts"))
            .collect();
        Ok(Self {
            points,
            pi_rational: Some(fractions),
            separation: Separation::pi_multiple(delta)?,
        })
    }

    /// `r` equispaced nodes `π (2j + 2 - r) / r`, with δ = 2π/r exactly.
    pub fn equispaced(r: usize) -> Result<Self> {
        let ri = r as i64;
        Self::from_pi_rationals((0..ri).map(|j| Ratio::new(2 * j + 2 - ri, ri)).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn pi_rational(&self) -> Option<&[Ratio<i64>]> {
        self.pi_rational.as_deref()
    }

    pub fn separation(&self) -> Separation {
        self.separation
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// All nodes moved by `t`, reduced to `(-π, π]` and re-sorted.
    pub fn rotated(&self, t: f64) -> Result<Self> {
        let mut pts: Vec<f64> = self.points.iter().map(|&x| reduce_angle(x + t)).collect();
        pts.sort_by(f64::total_cmp);
        Self::from_points(pts)
    }

    /// Exact rotation by `t · π`; needs rational nodes.
    pub fn rotated_pi(&self, t: Ratio<i64>) -> Result<Self> {
        let rats = self
            .pi_rational
            .as_ref()
            .ok_or_else(|| Error::Validation("exact rotation needs rational nodes".into()))?;
        let one = Ratio::from_integer(1);
        let two = Ratio::from_integer(2);
        let mut out: Vec<Ratio<i64>> = rats
            .iter()
            .map(|&f| {
                let mut g = f + t;
                while g > one {
                    g -= two;
                }
                while g <= -one {
                    g += two;
                }
                g
            })
            .collect();
        out.sort();
        Self::from_pi_rationals(out)
    }

    /// Union with `other`; fails if the result has coincident points.
    pub fn merged(&self, extra: &[f64]) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.extend_from_slice(extra);
        pts.sort_by(f64::total_cmp);
        Self::from_points(pts)
    }
}

/// Reduces an angle to `(-π, π]`.
pub fn reduce_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn poly(coeffs: &[(f64, f64)]) -> TrigPoly {
        TrigPoly::new(coeffs.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn constant_polynomial_evaluates_to_one() {
        let p = TrigPoly::monomial(3, 0, Complex64::new(1.0, 0.0)).unwrap();
        assert!((p.evaluate(1.3) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn cosine_at_zero() {
        let p = poly(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        assert!((p.evaluate(0.0) - 2.0).norm() < 1e-15);
    }

    #[test]
    fn horner_matches_term_by_term_sum() {
        let p = random_poly(8, 11, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x: f64 = rng.random_range(-10.0..10.0);
            let direct: Complex64 = (-8i64..=8)
                .map(|k| p.coeff(k) * Complex64::from_polar(1.0, k as f64 * x))
                .sum();
            assert!((p.evaluate(x) - direct).norm() <= 1e-12 * p.l1_coeffs());
        }
    }

    #[test]
    fn evaluation_is_periodic() {
        let p = random_poly(16, 5, 1.0).unwrap();
        for x in [-3.0, -0.2, 0.7, 2.9] {
            let d = (p.evaluate(x) - p.evaluate(x + 2.0 * PI)).norm();
            assert!(d <= 1e-12 * p.l1_coeffs());
        }
    }

    #[test]
    fn lp_norm_of_unimodular_polys() {
        let cfg = QuadratureConfig::default();
        let one = TrigPoly::monomial(2, 0, Complex64::new(1.0, 0.0)).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0, 7.0] {
            let v = lp_norm(&one, p, &cfg).unwrap();
            assert!((v - (2.0 * PI).powf(1.0 / p)).abs() < 1e-12);
        }
        let e3 = TrigPoly::monomial(3, 3, Complex64::new(1.0, 0.0)).unwrap();
        assert!((lp_norm(&e3, 4.0, &cfg).unwrap() - (2.0 * PI).powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn lp_norm_of_cosine_is_parseval() {
        let cfg = QuadratureConfig::default();
        let p = poly(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        assert!((lp_norm(&p, 2.0, &cfg).unwrap() - 2.0 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lp_norm_of_cosine_p1() {
        // ∫|2cos x| = 8
        let cfg = QuadratureConfig::default();
        let p = poly(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        assert!((lp_norm(&p, 1.0, &cfg).unwrap() - 8.0).abs() < 1e-9);
    }

    #[test]
    fn lp_norm_rejects_small_p() {
        let p = TrigPoly::zero(1).unwrap();
        assert!(matches!(lp_norm(&p, 0.5, &QuadratureConfig::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn lp_norm_reports_nonconvergence() {
        let cfg = QuadratureConfig {
            max_panels: 4,
            rel_tol: 1e-14,
            order: 3,
        };
        let p = random_poly(6, 1, 1.0).unwrap();
        assert!(matches!(lp_norm(&p, 1.0, &cfg), Err(Error::Convergence { .. })));
    }

    #[test]
    fn sieve_sum_examples() {
        let one = TrigPoly::monomial(4, 0, Complex64::new(1.0, 0.0)).unwrap();
        let nodes = NodeSet::equispaced(5).unwrap();
        assert!((sieve_sum(&one, &nodes, 3.0) - 5.0).abs() < 1e-14);
        let e1 = TrigPoly::monomial(4, 1, Complex64::new(1.0, 0.0)).unwrap();
        assert!((sieve_sum(&e1, &nodes, 2.0) - 5.0).abs() < 1e-13);
    }

    #[test]
    fn sieve_sum_matches_pointwise_oracle() {
        let p = random_poly(7, 2, 1.0).unwrap();
        let nodes = NodeSet::from_points(vec![-2.0, -0.5, 0.1, 1.7, 3.0]).unwrap();
        let oracle: f64 = nodes
            .points()
            .iter()
            .map(|&x| {
                let v: Complex64 = (-7i64..=7)
                    .map(|k| p.coeff(k) * Complex64::from_polar(1.0, k as f64 * x))
                    .sum();
                v.norm().powf(2.5)
            })
            .sum();
        assert!(((sieve_sum(&p, &nodes, 2.5) - oracle) / oracle).abs() < 1e-12);
    }

    #[test]
    fn separation_examples() {
        assert!((separation(&[0.0, PI / 2.0, PI]).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((separation(&[-PI / 2.0, PI / 2.0]).unwrap() - PI).abs() < 1e-15);
        let n = 7;
        let nodes = NodeSet::equispaced(2 * n).unwrap();
        assert_eq!(nodes.separation().pi_rational(), Some(Ratio::new(1, n as i64)));
        assert!((nodes.separation().value() - PI / n as f64).abs() < 1e-15);
    }

    #[test]
    fn separation_rejects_bad_points() {
        assert!(matches!(separation(&[0.0, 0.0]), Err(Error::Validation(_))));
        assert!(matches!(separation(&[0.5, 0.1]), Err(Error::Validation(_))));
        assert!(matches!(separation(&[-PI, 0.0]), Err(Error::Validation(_))));
        assert!(matches!(separation(&[0.0, 3.5]), Err(Error::Validation(_))));
        assert!(matches!(separation(&[0.0]), Err(Error::Validation(_))));
    }

    #[test]
    fn random_poly_is_deterministic() {
        let a = random_poly(4, 7, 1.0).unwrap();
        let b = random_poly(4, 7, 1.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coeffs().len(), 9);
        assert!(random_poly(4, 7, 0.0).unwrap().is_zero());
        assert!(matches!(random_poly(0, 7, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn json_shapes() {
        let p = poly(&[(1.0, 2.0), (3.0, 4.0), (5.0, 6.0)]);
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v, serde_json::json!({"degree": 1, "coeffs": [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]}));
        let bad = r#"{"degree": 2, "coeffs": [[1.0, 0.0]]}"#;
        assert!(serde_json::from_str::<TrigPoly>(bad).is_err());

        let nodes = NodeSet::equispaced(4).unwrap();
        let v = serde_json::to_value(&nodes).unwrap();
        assert_eq!(v["pi_rational"], serde_json::json!([[-1, 2], [0, 1], [1, 2], [1, 1]]));
        let back: NodeSet = serde_json::from_value(v).unwrap();
        assert_eq!(back, nodes);
        let float_nodes: NodeSet = serde_json::from_str(r#"{"points": [-1.0, 0.5, 2.0]}"#).unwrap();
        assert!(float_nodes.pi_rational().is_none());
    }

    #[test]
    fn rejects_inconsistent_node_json() {
        let s = r#"{"points": [0.0, 1.0], "pi_rational": [[0, 1], [1, 2]]}"#;
        assert!(serde_json::from_str::<NodeSet>(s).is_err());
        let s = r#"{"points": [0.0, 1.0], "pi_rational": [[0, 1], [1, 0]]}"#;
        assert!(serde_json::from_str::<NodeSet>(s).is_err());
    }

    #[test]
    fn rotation_is_exact_for_rational_nodes() {
        let nodes = NodeSet::from_pi_rationals(vec![
            Ratio::new(-3, 4),
            Ratio::new(0, 1),
            Ratio::new(1, 3),
            Ratio::new(5, 6),
        ])
        .unwrap();
        let rot = nodes.rotated_pi(Ratio::new(1, 2)).unwrap();
        assert_eq!(rot.separation(), nodes.separation());
    }

    #[test]
    fn reduce_angle_range() {
        for x in [-7.0, -PI, 0.0, PI, 4.0, 100.0] {
            let y = reduce_angle(x);
            assert!(y > -PI && y <= PI, "{x} -> {y}");
            assert!(((x - y) / (2.0 * PI)).fract().abs() < 1e-12 || ((x - y) / (2.0 * PI)).fract().abs() > 1.0 - 1e-12);
        }
    }
}
