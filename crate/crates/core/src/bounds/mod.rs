//! Closed-form sieve constants and the comparator bounds they are measured
//! against.
//!
//! Everything here is a pure function of `(N, δ, p)`. The overlap count
//! `σ(δ; N)` branches on whether `π/(Nδ)` is an integer, so a separation can
//! carry an exact rational multiple of π; when it does, the branch is decided
//! in integer arithmetic.

pub mod overlap;
pub mod special;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::cos_p_norm;

pub use overlap::{max_cover_count, overlap_multiplicity};
pub use special::{
    double_factorial, factorial, gamma, gamma_ratio, half_integer_gamma, hurwitz_zeta, ln_gamma,
    ExactGamma,
};

/// Relative tolerance for treating a floating `π/(Nδ)` as an integer.
pub const INTEGRALITY_TOL: f64 = 1e-9;
/// Agreement required between the two algebraic forms of each constant.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Minimal circular gap δ between sample points, optionally known exactly as
/// `π · num / den`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    value: f64,
    pi_rational: Option<Ratio<i64>>,
}

impl Separation {
    pub fn new(value: f64) -> Result<Self> {
        if !(value > 0.0 && value <= 2.0 * PI) || !value.is_finite() {
            return Err(Error::Domain(format!(
                "separation must lie in (0, 2π], got {value}"
            )));
        }
        Ok(Self {
            value,
            pi_rational: None,
        })
    }

    /// δ = π · `fraction`.
    pub fn pi_multiple(fraction: Ratio<i64>) -> Result<Self> {
        if fraction <= Ratio::zero() || fraction > Ratio::from_integer(2) {
            return Err(Error::Domain(format!(
                "separation must lie in (0, 2π], got {fraction}·π"
            )));
        }
        let value = PI * fraction.to_f64().expect("bounded ratio converts");
        Ok(Self {
            value,
            pi_rational: Some(fraction),
        })
    }

    pub fn pi_fraction(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Validation("zero denominator in π fraction".into()));
        }
        Self::pi_multiple(Ratio::new(num, den))
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn pi_rational(&self) -> Option<Ratio<i64>> {
        self.pi_rational
    }
}

impl fmt::Display for Separation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pi_rational {
            Some(r) if *r.numer() == 1 && *r.denom() == 1 => write!(f, "pi"),
            Some(r) if *r.denom() == 1 => write!(f, "{}pi", r.numer()),
            Some(r) if *r.numer() == 1 => write!(f, "pi/{}", r.denom()),
            Some(r) => write!(f, "{}pi/{}", r.numer(), r.denom()),
            None => write!(f, "{}", self.value),
        }
    }
}

/// Parses `pi/20`, `3pi/20`, `3*pi/20`, `pi`, `2pi`, or a plain float.
impl FromStr for Separation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace(' ', "");
        if let Some(idx) = t.find("pi") {
            let head = t[..idx].trim_end_matches('*');
            let tail = &t[idx + 2..];
            let num: i64 = if head.is_empty() {
                1
            } else {
                head.parse()
                    .map_err(|_| Error::Validation(format!("bad numerator in delta literal {s:?}")))?
            };
            let den: i64 = if tail.is_empty() {
                1
            } else if let Some(d) = tail.strip_prefix('/') {
                d.parse()
                    .map_err(|_| Error::Validation(format!("bad denominator in delta literal {s:?}")))?
            } else {
                return Err(Error::Validation(format!("malformed delta literal {s:?}")));
            };
            if den <= 0 || num <= 0 {
                return Err(Error::Validation(format!(
                    "delta literal {s:?} needs positive integers"
                )));
            }
            return Self::pi_fraction(num, den).map_err(|e| Error::Validation(e.to_string()));
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Validation(format!("malformed delta literal {s:?}")))?;
        Self::new(v).map_err(|e| Error::Validation(e.to_string()))
    }
}

/// Outcome of evaluating σ(δ; N).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaInfo {
    pub sigma: u64,
    /// π / (Nδ)
    pub ratio: f64,
    /// `π/(Nδ)` was judged an integer.
    pub integral: bool,
    /// The integrality test ran in exact arithmetic.
    pub exact: bool,
}

impl SigmaInfo {
    pub fn branch_label(&self) -> &'static str {
        match (self.integral, self.exact) {
            (true, true) => "integer (exact)",
            (true, false) => "integer (tolerance)",
            (false, true) => "non-integer (exact)",
            (false, false) => "non-integer (tolerance)",
        }
    }
}

fn check_degree(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("degree N must be at least 1".into()));
    }
    Ok(())
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("exponent p must be >= 1, got {p}")));
    }
    Ok(())
}

/// σ(δ; N) with the branch it took.
pub fn sigma_info(delta: &Separation, n: u32) -> Result<SigmaInfo> {
    check_degree(n)?;
    let ratio = PI / (n as f64 * delta.value());
    if let Some(r) = delta.pi_rational() {
        // π / (N · π num/den) = den / (N num)
        let q = Ratio::new(*r.denom() as i128, n as i128 * *r.numer() as i128);
        let integral = q.is_integer();
        let floor = q.floor().to_integer();
        let sigma = if integral { floor } else { floor + 1 };
        return Ok(SigmaInfo {
            sigma: u64::try_from(sigma).map_err(|_| Error::Overflow("sigma".into()))?,
            ratio,
            integral,
            exact: true,
        });
    }
    let nearest = ratio.round();
    let integral = nearest >= 1.0 && (ratio - nearest).abs() <= INTEGRALITY_TOL * ratio;
    let sigma = if integral { nearest } else { 1.0 + ratio.floor() };
    if sigma > u64::MAX as f64 {
        return Err(Error::Overflow("sigma".into()));
    }
    Ok(SigmaInfo {
        sigma: sigma as u64,
        ratio,
        integral,
        exact: false,
    })
}

/// σ(δ; N): `π/(Nδ)` when that is an integer, `1 + ⌊π/(Nδ)⌋` otherwise.
pub fn sigma(delta: &Separation, n: u32) -> Result<u64> {
    Ok(sigma_info(delta, n)?.sigma)
}

fn relative_gap(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Sieve constant `p N σ Γ(p/2) / (2 √π Γ(p/2 + 1/2))`.
///
/// Also evaluated as `N σ / ∫cos^p` and required to match to
/// [`IDENTITY_TOL`].
pub fn sharp_constant(n: u32, delta: &Separation, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let s = sigma(delta, n)? as f64;
    let nf = n as f64;
    let gamma_form = p * nf * s / (2.0 * PI.sqrt()) * gamma_ratio(p / 2.0, p / 2.0 + 0.5)?;
    let beta_form = nf * s / cos_p_norm(p)?;
    let gap = relative_gap(gamma_form, beta_form);
    if gap > IDENTITY_TOL {
        return Err(Error::IdentityViolation(format!(
            "gamma-ratio and beta forms of the sieve constant differ by {gap:e} (p={p})"
        )));
    }
    Ok(gamma_form)
}

/// Exact constant `numer / denom · π^pi_power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactConstant {
    pub numer: u128,
    pub denom: u128,
    pub pi_power: i32,
}

impl ExactConstant {
    fn reduced(numer: u128, denom: u128, pi_power: i32) -> Self {
        let g = numer.gcd(&denom).max(1);
        Self {
            numer: numer / g,
            denom: denom / g,
            pi_power,
        }
    }

    pub fn value(&self) -> f64 {
        self.numer as f64 / self.denom as f64 * PI.powi(self.pi_power)
    }
}

impl fmt::Display for ExactConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.pi_power, self.denom) {
            (0, 1) => write!(f, "{}", self.numer),
            (0, d) => write!(f, "{}/{}", self.numer, d),
            (-1, 1) => write!(f, "{}/pi", self.numer),
            (-1, d) => write!(f, "{}/({}pi)", self.numer, d),
            (k, 1) => write!(f, "{}*pi^{}", self.numer, k),
            (k, d) => write!(f, "{}/{}*pi^{}", self.numer, d, k),
        }
    }
}

fn mul_all(factors: &[u128]) -> Result<u128> {
    factors.iter().try_fold(1u128, |acc, &x| {
        acc.checked_mul(x)
            .ok_or_else(|| Error::Overflow("integer-exponent constant exceeds 128 bits".into()))
    })
}

/// Integer-exponent form of the sieve constant, in exact arithmetic.
///
/// For `p = 2l`: `p N σ 2^{l-1} (l-1)! / (π (2l-1)!!)`.
/// For `p = 2l+1`: `p N σ (2l-1)!! / (2^{l+1} l!)`.
pub fn exact_constant(n: u32, delta: &Separation, p: f64) -> Result<ExactConstant> {
    if !(p >= 2.0) || p.fract() != 0.0 || p > u32::MAX as f64 {
        return Err(Error::Domain(format!(
            "integer-exponent constant needs an integer p >= 2, got {p}"
        )));
    }
    let pi = p as u32;
    let s = sigma(delta, n)? as u128;
    let l = pi / 2;
    let pow2 = |e: u32| -> Result<u128> {
        1u128
            .checked_shl(e)
            .filter(|_| e < 128)
            .ok_or_else(|| Error::Overflow(format!("2^{e} exceeds 128 bits")))
    };
    let exact = if pi % 2 == 0 {
        let numer = mul_all(&[pi as u128, n as u128, s, pow2(l - 1)?, factorial(l - 1)?])?;
        ExactConstant::reduced(numer, double_factorial(2 * l - 1)?, -1)
    } else {
        let numer = mul_all(&[pi as u128, n as u128, s, double_factorial(2 * l - 1)?])?;
        let denom = mul_all(&[pow2(l + 1)?, factorial(l)?])?;
        ExactConstant::reduced(numer, denom, 0)
    };
    let sharp = sharp_constant(n, delta, p)?;
    let gap = relative_gap(exact.value(), sharp);
    if gap > IDENTITY_TOL {
        return Err(Error::IdentityViolation(format!(
            "exact integer-exponent constant {exact} differs from gamma form by {gap:e}"
        )));
    }
    Ok(exact)
}

/// Relaxed bound: `(p+1)/δ` when `π/(Nδ)` is an integer, else
/// `(p+1)(N/π + 1/δ)`. Always strictly larger than [`sharp_constant`].
pub fn relaxed_bound(n: u32, delta: &Separation, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let info = sigma_info(delta, n)?;
    let bound = if info.integral {
        (p + 1.0) / delta.value()
    } else {
        (p + 1.0) * (n as f64 / PI + 1.0 / delta.value())
    };
    let sharp = sharp_constant(n, delta, p)?;
    if !(sharp < bound) {
        return Err(Error::IdentityViolation(format!(
            "relaxed bound {bound} is not above the sieve constant {sharp}"
        )));
    }
    Ok(bound)
}

/// Earlier bounds used for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalBounds {
    /// `N/(2π) + 1/δ`, only for p = 2.
    pub l2_classical: Option<f64>,
    /// `(N/π + 1/δ)(p+1)e/2`
    pub majorant: f64,
    /// `((N+1)/(2π) + 1/δ)(p+1)e/2`
    pub majorant_improved: f64,
}

pub fn classical_bounds(n: u32, delta: &Separation, p: f64) -> Result<ClassicalBounds> {
    check_degree(n)?;
    check_exponent(p)?;
    let nf = n as f64;
    let inv = 1.0 / delta.value();
    let factor = (p + 1.0) * std::f64::consts::E / 2.0;
    Ok(ClassicalBounds {
        l2_classical: (p == 2.0).then(|| nf / (2.0 * PI) + inv),
        majorant: (nf / PI + inv) * factor,
        majorant_improved: ((nf + 1.0) / (2.0 * PI) + inv) * factor,
    })
}

/// Every constant for one `(N, δ, p)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    #[serde(rename = "N")]
    pub n: u32,
    pub p: f64,
    pub delta: f64,
    pub sigma: u64,
    pub sharp: f64,
    pub integer_form: Option<f64>,
    pub relaxed: f64,
    pub l2_classical: Option<f64>,
    pub majorant: f64,
    pub majorant_improved: f64,
    #[serde(skip)]
    pub sigma_info: SigmaInfo,
    #[serde(skip)]
    pub integer_form_exact: Option<ExactConstant>,
    #[serde(skip)]
    pub delta_label: String,
}

impl BoundReport {
    pub fn compute(n: u32, delta: &Separation, p: f64) -> Result<Self> {
        let sigma_info = sigma_info(delta, n)?;
        let sharp = sharp_constant(n, delta, p)?;
        let integer_form_exact = if p >= 2.0 && p.fract() == 0.0 {
            Some(exact_constant(n, delta, p)?)
        } else {
            None
        };
        let relaxed = relaxed_bound(n, delta, p)?;
        let classical = classical_bounds(n, delta, p)?;
        Ok(Self {
            n,
            p,
            delta: delta.value(),
            sigma: sigma_info.sigma,
            sharp,
            integer_form: integer_form_exact.map(|c| c.value()),
            relaxed,
            l2_classical: classical.l2_classical,
            majorant: classical.majorant,
            majorant_improved: classical.majorant_improved,
            sigma_info,
            integer_form_exact,
            delta_label: delta.to_string(),
        })
    }

    /// Fixed column names for tabular output.
    pub const FIELDS: [&'static str; 10] = [
        "N", "p", "delta", "sigma", "sharp", "integer_form", "relaxed", "l2_classical", "majorant", "majorant_improved",
    ];

    /// How each value was obtained, keyed by field name.
    pub fn sources(&self) -> Vec<(&'static str, &'static str)> {
        let mut out = vec![
            ("sigma", self.sigma_info.branch_label()),
            ("sharp", "gamma ratio, cross-checked against N*sigma/||cos||_p^p"),
        ];
        if self.integer_form.is_some() {
            out.push(("integer_form", "exact 128-bit integer arithmetic"));
        }
        out.push(("relaxed", if self.sigma_info.integral { "(p+1)/delta" } else { "(p+1)(N/pi+1/delta)" }));
        if self.l2_classical.is_some() {
            out.push(("l2_classical", "classical L^2 large sieve"));
        }
        out.push(("majorant", "convex-majorant bound with Psi(t)=t"));
        out.push(("majorant_improved", "improved convex-majorant bound"));
        out
    }

    /// Name of the smallest available bound among sharp, relaxed, l2_classical, majorant, majorant_improved.
    pub fn smallest(&self) -> &'static str {
        let mut best = ("sharp", self.sharp);
        let mut candidates = vec![("relaxed", self.relaxed), ("majorant", self.majorant), ("majorant_improved", self.majorant_improved)];
        if let Some(v) = self.l2_classical {
            candidates.push(("l2_classical", v));
        }
        for (name, v) in candidates {
            if v < best.1 {
                best = (name, v);
            }
        }
        best.0
    }
}
