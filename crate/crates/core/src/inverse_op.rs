//! The convolution operator `A_u s = s * u` on degree-N polynomials and its
//! inverse, realized as convolution with an atomic measure
//! `μ = Σ_{m=-N+1}^{N} τ_m δ_{πm/N}`.
//!
//! Construction: `v = 1/û` on `[-N, N]` is expanded in a Fourier series on
//! the period-2N torus, `v(x) = Σ a_k e^{ikπx/N}`, and the coefficients are
//! folded by residue class mod 2N into the atoms `τ_m`. Then
//! `p_u(n) = Σ τ_m e^{-iπmn/N}` equals `1/û(n)` for every `|n| ≤ N`.
//!
//! The periodic extension of `v` has a corner at `±N` (`v'(N) > 0` meets
//! `v'(-N) = -v'(N)`), so `a_k` decays only like `k^{-2}`. Integrating by
//! parts twice at that corner gives
//! `a_k ≈ (-1)^k (v'(N) N / (π² k²) - v'''(N) N³ / (π⁴ k⁴))`; the series keeps
//! this model for `|k| > K` and sums its contribution in closed form, so the
//! truncation error left over is `O(K^{-5})`.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::special::hurwitz_zeta;
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::quadrature::{integrate_vec, QuadratureConfig};
use crate::trigpoly::TrigPoly;

/// Default tolerance for the reciprocal series, relative to `a_0`.
pub const DEFAULT_SERIES_TOL: f64 = 1e-10;
/// Relative agreement demanded between `Σ|τ_m|` and `1/û(N)`.
pub const INVERSE_NORM_TOL: f64 = 1e-6;
/// Coefficients are computed up to `max(K_MAX_FACTOR · N, K_MAX_FLOOR)`.
pub const K_MAX_FACTOR: usize = 64;
/// The truncation needed is nearly independent of N, so small degrees get a floor.
pub const K_MAX_FLOOR: usize = 256;

fn check_degrees(a: u32, b: u32) -> Result<()> {
    if a != b {
        return Err(Error::Validation(format!("degree mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// `û(k)` for `k = 0..=N`.
fn uhat_band(u: &Kernel, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    (0..=u.degree())
        .map(|k| u.fourier_coeff(k as f64, cfg))
        .collect()
}

/// `A_u s`: coefficients `c_k û(k)`.
pub fn apply_conv(s: &TrigPoly, u: &Kernel, cfg: &QuadratureConfig) -> Result<TrigPoly> {
    check_degrees(s.degree(), u.degree())?;
    let band = uhat_band(u, cfg)?;
    Ok(s.map_coeffs(|k, c| c * band[k.unsigned_abs() as usize]))
}

/// Asymptotic model `a_k ≈ (-1)^k (c2/k² + c4/k⁴)` used beyond the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub c2: f64,
    pub c4: f64,
}

impl TailModel {
    pub const ZERO: TailModel = TailModel { c2: 0.0, c4: 0.0 };

    pub fn coeff(&self, k: i64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let kf = k as f64;
        let k2 = kf * kf;
        sign(k) * (self.c2 / k2 + self.c4 / (k2 * k2))
    }

    /// `Σ_{|k| > K} model_k e^{ikθ}`, via the Bernoulli-polynomial sums
    /// `Σ_{k≥1} (-1)^k cos(kθ)/k² = θ²/4 - π²/12` and its quartic analogue.
    fn tail_series(&self, k_trunc: usize, theta: f64) -> f64 {
        let th = theta.abs().min(PI);
        let phi = th + PI; // in [π, 2π]
        let full2 = phi * phi / 4.0 - PI * phi / 2.0 + PI * PI / 6.0;
        let full4 = PI.powi(4) / 90.0 - PI * PI * phi * phi / 12.0 + PI * phi.powi(3) / 12.0
            - phi.powi(4) / 48.0;
        let mut head2 = 0.0;
        let mut head4 = 0.0;
        for k in 1..=k_trunc {
            let kf = k as f64;
            let c = sign(k as i64) * (kf * theta).cos();
            head2 += c / (kf * kf);
            head4 += c / (kf * kf * kf * kf);
        }
        2.0 * (self.c2 * (full2 - head2) + self.c4 * (full4 - head4))
    }

    /// `Σ_{k > K, k ≡ r mod period} model_k`, with `r` taken for `k > 0`.
    fn one_sided_class_sum(&self, k_trunc: usize, residue: i64, period: i64) -> Result<f64> {
        let start = k_trunc as i64 + 1;
        let k0 = start + (residue - start).rem_euclid(period);
        let a = k0 as f64 / period as f64;
        let pf = period as f64;
        Ok(sign(k0) * (self.c2 * hurwitz_zeta(2.0, a)? / (pf * pf)
            + self.c4 * hurwitz_zeta(4.0, a)? / pf.powi(4)))
    }
}

fn sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Fourier coefficients `a_k`, `|k| ≤ K`, of `v = 1/û` on the period-2N torus,
/// plus the asymptotic model for `|k| > K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReciprocalSeries {
    degree: u32,
    /// `a_0, a_1, …, a_K`; `a_{-k} = a_k`.
    coeffs: Vec<f64>,
    tail: TailModel,
    tail_estimate: f64,
    tol: f64,
}

impl ReciprocalSeries {
    /// Series from raw parts. `coeffs[k] = a_k` for `k = 0..=K`.
    pub fn from_parts(
        degree: u32,
        coeffs: Vec<f64>,
        tail: TailModel,
        tail_estimate: f64,
        tol: f64,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Domain("degree N must be at least 1".into()));
        }
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Validation("series needs finite coefficients a_0..a_K".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::Validation("series tolerance must be positive".into()));
        }
        Ok(Self {
            degree,
            coeffs,
            tail,
            tail_estimate,
            tol,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Truncation index K.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `a_k` for `|k| ≤ K`, the model value beyond.
    pub fn coeff(&self, k: i64) -> f64 {
        let a = k.unsigned_abs() as usize;
        if a <= self.truncation() {
            self.coeffs[a]
        } else {
            self.tail.coeff(k)
        }
    }

    pub fn tail(&self) -> TailModel {
        self.tail
    }

    /// Estimated `Σ_{|k|>K} |a_k - model_k|`.
    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `(-1)^k a_k > 0` for every computed `|k| ≤ K`.
    pub fn sign_alternates(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(k, &a)| sign(k as i64) * a > 0.0)
    }

    /// `Σ_k a_k e^{ikπx/N}` including the modeled tail.
    pub fn reconstruct(&self, x: f64) -> f64 {
        let theta = PI * x / self.degree as f64;
        let head: f64 = self.coeffs[0]
            + 2.0
                * self.coeffs[1..]
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a * ((i + 1) as f64 * theta).cos())
                    .sum::<f64>();
        head + self.tail.tail_series(self.truncation(), theta)
    }

    /// `Σ_k (-1)^k a_k` over all k, tail included; equals `v(N)`.
    pub fn alternating_sum(&self) -> Result<f64> {
        let k = self.truncation();
        let head: f64 = self.coeffs[0]
            + 2.0
                * self.coeffs[1..]
                    .iter()
                    .enumerate()
                    .map(|(i, a)| sign((i + 1) as i64) * a)
                    .sum::<f64>();
        let a = (k + 1) as f64;
        let tail = 2.0 * (self.tail.c2 * hurwitz_zeta(2.0, a)? + self.tail.c4 * hurwitz_zeta(4.0, a)?);
        Ok(head + tail)
    }

    /// Largest `|v(x) - reconstruct(x)|` over `points` uniform nodes in `[0, N]`.
    pub fn reconstruction_error(&self, u: &Kernel, points: usize, cfg: &QuadratureConfig) -> Result<f64> {
        check_degrees(self.degree, u.degree())?;
        let n = self.degree as f64;
        let points = points.max(2);
        let mut worst: f64 = 0.0;
        for i in 0..points {
            let x = n * i as f64 / (points - 1) as f64;
            let v = 1.0 / u.fourier_coeff(x, cfg)?;
            worst = worst.max((v - self.reconstruct(x)).abs());
        }
        Ok(worst)
    }
}

/// `f > 0` at `grid + 1` uniform points of `[0, n]`.
fn check_positive(n: f64, grid: usize, f: impl Fn(f64) -> Result<f64>) -> Result<()> {
    for i in 0..=grid {
        let x = n * i as f64 / grid as f64;
        let y = f(x)?;
        if !(y > 0.0) {
            return Err(Error::KernelAdmissibility(format!(
                "Fourier transform is {y:e} at x = {x}, not positive on [-N, N]"
            )));
        }
    }
    Ok(())
}

/// Fourier coefficients of `v = 1/û` on the period-2N torus.
///
/// Requires `û > 0` on a dense grid of `[-N, N]`. Computes `a_0..a_{K_max}`
/// by a shared composite rule, fits the endpoint tail model, then keeps the
/// smallest K for which five consecutive residuals `|a_k - model_k|` and the
/// tail estimate are below `tol · a_0`. The reconstruction of `v` at 100
/// points must then match within `tol · v(N)`.
pub fn reciprocal_coeffs(u: &Kernel, tol: f64, cfg: &QuadratureConfig) -> Result<ReciprocalSeries> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Validation(format!("series tolerance must be positive, got {tol}")));
    }
    let n = u.degree();
    let nf = n as f64;

    check_positive(nf, 64 * n as usize, |x| u.fourier_coeff(x, cfg))?;

    let inner_tol = (tol * 1e-3).clamp(1e-14, cfg.rel_tol);
    let inner = QuadratureConfig {
        rel_tol: inner_tol,
        ..*cfg
    };
    let k_max = (K_MAX_FACTOR * n as usize).max(K_MAX_FLOOR);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let coeffs = integrate_vec(
        |t, out: &mut [f64]| {
            let v = match u.fourier_coeff(t, &inner) {
                Ok(uh) => 1.0 / (nf * uh),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            };
            // cos(kθ) by the three-term recurrence.
            let theta = PI * t / nf;
            let c1 = theta.cos();
            let (mut prev, mut cur) = (c1, 1.0);
            for o in out.iter_mut() {
                *o = v * cur;
                let next = 2.0 * c1 * cur - prev;
                prev = cur;
                cur = next;
            }
        },
        k_max + 1,
        0.0,
        nf,
        (k_max / 4).max(4),
        &inner,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let coeffs = coeffs?;
    let a0 = coeffs[0];

    // v' = -û'/û², v''' = -û'''/û² + 6û'û''/û³ - 6û'³/û⁴ at x = N.
    let d0 = u.fourier_derivative(0, nf, &inner)?;
    let d1 = u.fourier_derivative(1, nf, &inner)?;
    let d2 = u.fourier_derivative(2, nf, &inner)?;
    let d3 = u.fourier_derivative(3, nf, &inner)?;
    let v1 = -d1 / (d0 * d0);
    let v3 = -d3 / (d0 * d0) + 6.0 * d1 * d2 / d0.powi(3) - 6.0 * d1.powi(3) / d0.powi(4);
    let tail = TailModel {
        c2: v1 * nf / (PI * PI),
        c4: -v3 * nf.powi(3) / PI.powi(4),
    };

    let target = tol * a0.abs();
    let residual = |k: usize| (coeffs[k] - tail.coeff(k as i64)).abs();
    let estimate = |k: usize| {
        let window = (k - 4..=k).map(residual).fold(0.0, f64::max);
        2.0 * window * k as f64 / 5.0
    };
    let chosen = (8..=k_max).find(|&k| {
        (k - 4..=k).all(|j| residual(j) < target) && estimate(k) < target
    });
    let Some(k_trunc) = chosen else {
        return Err(Error::Truncation {
            tail: estimate(k_max),
            target,
            k_max,
        });
    };
    let tail_estimate = estimate(k_trunc);
    let mut coeffs = coeffs;
    coeffs.truncate(k_trunc + 1);
    let series = ReciprocalSeries::from_parts(n, coeffs, tail, tail_estimate, tol)?;

    let v_n = 1.0 / d0;
    // The reference 1/û must be sharper than tol itself.
    let recon = series.reconstruction_error(u, 100, &inner)?;
    if recon > tol * v_n {
        return Err(Error::Consistency(format!(
            "reconstruction of 1/û misses by {recon:e}, above {:e}",
            tol * v_n
        )));
    }
    Ok(series)
}

/// Finite atomic measure `Σ_{m=-N+1}^{N} τ_m δ_{πm/N}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct AtomicMeasure {
    degree: u32,
    tau: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    #[serde(rename = "N")]
    n: u32,
    tau: Vec<f64>,
}

impl TryFrom<MeasureRepr> for AtomicMeasure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        AtomicMeasure::new(r.n, r.tau)
    }
}

impl From<AtomicMeasure> for MeasureRepr {
    fn from(m: AtomicMeasure) -> Self {
        Self {
            n: m.degree,
            tau: m.tau,
        }
    }
}

impl AtomicMeasure {
    /// `tau[i]` is the atom at `m = i - N + 1`.
    pub fn new(degree: u32, tau: Vec<f64>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Domain("degree N must be at least 1".into()));
        }
        if tau.len() != 2 * degree as usize {
            return Err(Error::Validation(format!(
                "measure of degree {degree} needs {} atoms, got {}",
                2 * degree,
                tau.len()
            )));
        }
        if tau.iter().any(|t| !t.is_finite()) {
            return Err(Error::Validation("atoms must be finite".into()));
        }
        Ok(Self { degree, tau })
    }

    /// Unit mass at the origin.
    pub fn dirac(degree: u32, mass: f64) -> Result<Self> {
        let mut tau = vec![0.0; 2 * degree as usize];
        if let Some(t) = tau.get_mut(degree.saturating_sub(1) as usize) {
            *t = mass;
        }
        Self::new(degree, tau)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    /// Range of atom indices `m`.
    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        let n = self.degree as i64;
        -n + 1..=n
    }

    pub fn atom(&self, m: i64) -> f64 {
        self.tau[(m + self.degree as i64 - 1) as usize]
    }

    /// `(m, location πm/N, τ_m)`.
    pub fn atoms(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        let n = self.degree as f64;
        self.indices()
            .zip(&self.tau)
            .map(move |(m, &t)| (m, PI * m as f64 / n, t))
    }

    /// Total variation `Σ|τ_m|`.
    pub fn total_variation(&self) -> f64 {
        self.tau.iter().map(|t| t.abs()).sum()
    }

    /// `(-1)^m τ_m > 0` for every atom.
    pub fn sign_alternates(&self) -> bool {
        self.atoms().all(|(m, _, t)| sign(m) * t > 0.0)
    }

    /// Copy with atom `m` multiplied by `factor`.
    pub fn with_scaled_atom(&self, m: i64, factor: f64) -> Result<Self> {
        if !self.indices().contains(&m) {
            return Err(Error::Domain(format!("atom index {m} out of range")));
        }
        let mut tau = self.tau.clone();
        tau[(m + self.degree as i64 - 1) as usize] *= factor;
        Self::new(self.degree, tau)
    }

    /// `p_u(n) = μ̂(n) = Σ τ_m e^{-iπmn/N}`.
    pub fn interp_sum_complex(&self, n: i64) -> Result<Complex64> {
        let deg = self.degree as i64;
        if n.abs() > deg {
            return Err(Error::Domain(format!("frequency {n} outside [-{deg}, {deg}]")));
        }
        let period = 2 * deg;
        Ok(self
            .atoms()
            .map(|(m, _, t)| {
                // Reduce m·n mod 2N so the phase is exact for large products.
                let r = (m * n).rem_euclid(period) as f64;
                t * Complex64::from_polar(1.0, -PI * r / deg as f64)
            })
            .sum())
    }

    /// Real part of [`Self::interp_sum_complex`]; the imaginary part vanishes
    /// for even measures.
    pub fn interp_sum(&self, n: i64) -> Result<f64> {
        Ok(self.interp_sum_complex(n)?.re)
    }
}

/// Folds `a_k` by residue class mod 2N: `τ_m = Σ_j a_{m+2jN}`.
///
/// Terms in one class must share a sign (anything larger than
/// `tol · |a_0|` counts), and the folded atoms must alternate in sign.
pub fn fold_tau(series: &ReciprocalSeries) -> Result<AtomicMeasure> {
    let measure = AtomicMeasure::new(series.degree(), fold_classes(series)?)?;
    if !measure.sign_alternates() {
        return Err(Error::Consistency("folded atoms do not alternate in sign".into()));
    }
    Ok(measure)
}

fn fold_classes(series: &ReciprocalSeries) -> Result<Vec<f64>> {
    let n = series.degree() as i64;
    let period = 2 * n;
    let k_trunc = series.truncation() as i64;
    let noise = series.tol() * series.coeffs()[0].abs();
    let mut tau = Vec::with_capacity(period as usize);
    for m in -n + 1..=n {
        let mut sum = 0.0;
        let (mut pos, mut neg) = (false, false);
        let first = m - ((m + k_trunc).div_euclid(period)) * period;
        let mut k = first;
        while k <= k_trunc {
            let a = series.coeff(k);
            sum += a;
            if a.abs() > noise {
                pos |= a > 0.0;
                neg |= a < 0.0;
            }
            k += period;
        }
        if pos && neg {
            return Err(Error::Consistency(format!(
                "coefficients folded into atom {m} have mixed signs"
            )));
        }
        let tail = series.tail();
        if tail != TailModel::ZERO {
            sum += tail.one_sided_class_sum(k_trunc as usize, m, period)?
                + tail.one_sided_class_sum(k_trunc as usize, -m, period)?;
        }
        tau.push(sum);
    }
    Ok(tau)
}

pub fn interp_sum(mu: &AtomicMeasure, n: i64) -> Result<f64> {
    mu.interp_sum(n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationRow {
    pub n: i64,
    pub p_u: f64,
    pub uhat: f64,
    pub product: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationReport {
    pub rows: Vec<InterpolationRow>,
    pub max_deviation: f64,
    pub worst_n: i64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks `|p_u(n) û(n) - 1| ≤ tol` for `n = -N..=N`. Failures are reported,
/// not raised.
pub fn verify_interpolation(
    mu: &AtomicMeasure,
    u: &Kernel,
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<InterpolationReport> {
    check_degrees(mu.degree(), u.degree())?;
    let band = uhat_band(u, cfg)?;
    let n = mu.degree() as i64;
    let mut rows = Vec::with_capacity(2 * n as usize + 1);
    let (mut max_deviation, mut worst_n) = (0.0, -n);
    for k in -n..=n {
        let pu = mu.interp_sum_complex(k)?;
        let uh = band[k.unsigned_abs() as usize];
        let product = pu * uh;
        let deviation = (product - 1.0).norm();
        if deviation > max_deviation {
            max_deviation = deviation;
            worst_n = k;
        }
        rows.push(InterpolationRow {
            n: k,
            p_u: pu.re,
            uhat: uh,
            product: product.re,
            deviation,
        });
    }
    Ok(InterpolationReport {
        rows,
        max_deviation,
        worst_n,
        tol,
        pass: max_deviation <= tol,
    })
}

/// `A_u^{-1} s = s * μ`: coefficients `c_k p_u(k)`.
pub fn apply_inverse(s: &TrigPoly, mu: &AtomicMeasure) -> Result<TrigPoly> {
    check_degrees(s.degree(), mu.degree())?;
    let n = mu.degree() as i64;
    let multipliers = (-n..=n)
        .map(|k| mu.interp_sum_complex(k))
        .collect::<Result<Vec<_>>>()?;
    Ok(s.map_coeffs(|k, c| c * multipliers[(k + n) as usize]))
}

/// `‖A_u^{-1}‖ = Σ|τ_m|`, required to equal `1/û(N)` within
/// [`INVERSE_NORM_TOL`].
pub fn inverse_norm(mu: &AtomicMeasure, u: &Kernel, cfg: &QuadratureConfig) -> Result<f64> {
    check_degrees(mu.degree(), u.degree())?;
    let tv = mu.total_variation();
    let expected = 1.0 / u.fourier_coeff(u.degree() as f64, cfg)?;
    let gap = ((tv - expected) / expected).abs();
    if gap > INVERSE_NORM_TOL {
        return Err(Error::IdentityViolation(format!(
            "total variation {tv} differs from 1/û(N) = {expected} by {gap:e}"
        )));
    }
    Ok(tv)
}

/// `max_{|k|≤N} |p_u(k)|`, the spectral radius of `A_u^{-1}`.
pub fn spectral_radius_inverse(mu: &AtomicMeasure) -> f64 {
    let n = mu.degree() as i64;
    (-n..=n)
        .map(|k| mu.interp_sum_complex(k).map(|z| z.norm()).unwrap_or(0.0))
        .fold(0.0, f64::max)
}

/// Kernel, reciprocal series and inverse measure built together.
#[derive(Debug, Clone)]
pub struct InverseOperator {
    pub kernel: Kernel,
    pub series: ReciprocalSeries,
    pub measure: AtomicMeasure,
}

impl InverseOperator {
    pub fn build(u: &Kernel, tol: f64, cfg: &QuadratureConfig) -> Result<Self> {
        let series = reciprocal_coeffs(u, tol, cfg)?;
        let measure = fold_tau(&series)?;
        Ok(Self {
            kernel: u.clone(),
            series,
            measure,
        })
    }

    pub fn apply(&self, s: &TrigPoly) -> Result<TrigPoly> {
        apply_inverse(s, &self.measure)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Kernel;
    use crate::trigpoly::random_poly;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn conv_examples() {
        let u = Kernel::extremal(5, 2.0).unwrap();
        let one = TrigPoly::monomial(5, 0, Complex64::new(1.0, 0.0)).unwrap();
        let out = apply_conv(&one, &u, &cfg()).unwrap();
        let u0 = u.fourier_coeff(0.0, &cfg()).unwrap();
        assert!((out.coeff(0) - u0).norm() < 1e-14);

        let top = TrigPoly::monomial(5, 5, Complex64::new(1.0, 0.0)).unwrap();
        let out = apply_conv(&top, &u, &cfg()).unwrap();
        assert!((out.coeff(5).re - (PI / 10.0).sqrt()).abs() < 1e-12);

        let z = TrigPoly::zero(5).unwrap();
        assert!(apply_conv(&z, &u, &cfg()).unwrap().is_zero());
        let wrong = TrigPoly::zero(4).unwrap();
        assert!(matches!(apply_conv(&wrong, &u, &cfg()), Err(Error::Validation(_))));
    }

    #[test]
    fn tail_closed_forms_match_direct_sums() {
        let model = TailModel { c2: 0.7, c4: -0.3 };
        let k_trunc = 5;
        for theta in [0.0, 0.4, 1.9, PI] {
            let direct: f64 = (k_trunc + 1..400_000)
                .map(|k| 2.0 * model.coeff(k as i64) * (k as f64 * theta).cos())
                .sum();
            assert!((model.tail_series(k_trunc, theta) - direct).abs() < 1e-5, "θ={theta}");
        }
        let period = 6;
        for r in [-2i64, 0, 3] {
            let direct: f64 = (6..2_000_000i64)
                .filter(|k| (k - r).rem_euclid(period) == 0)
                .map(|k| model.coeff(k))
                .sum();
            // The partial sum stops at 2e6; its remainder is about c2 / (6 · 2e6).
            let remainder = model.c2 / (period as f64 * 2e6);
            let v = model.one_sided_class_sum(5, r, period).unwrap();
            assert!((v - direct - sign(r) * remainder).abs() < 1e-10, "r={r}");
        }
    }

    #[test]
    fn fold_single_term_per_residue() {
        // K < N: each residue class holds one coefficient.
        let coeffs = vec![2.0, -0.5, 0.25];
        let s = ReciprocalSeries::from_parts(4, coeffs, TailModel::ZERO, 0.0, 1e-9).unwrap();
        let tau = fold_classes(&s).unwrap();
        for (i, &t) in tau.iter().enumerate() {
            let m = i as i64 - 3;
            let expected = if m.abs() <= 2 { s.coeff(m) } else { 0.0 };
            assert_eq!(t, expected, "m={m}");
        }
        // Empty classes leave zero atoms, which do not alternate.
        assert!(matches!(fold_tau(&s), Err(Error::Consistency(_))));
    }

    #[test]
    fn fold_rejects_mixed_signs() {
        // a_1 and a_{1-2N} = a_{-3} land in the same class for N = 2.
        let coeffs = vec![2.0, -0.5, 0.25, 0.1];
        let s = ReciprocalSeries::from_parts(2, coeffs, TailModel::ZERO, 0.0, 1e-9).unwrap();
        assert!(matches!(fold_tau(&s), Err(Error::Consistency(_))));
    }

    #[test]
    fn dirac_measure() {
        let mu = AtomicMeasure::dirac(3, 1.7).unwrap();
        for n in -3..=3 {
            assert!((mu.interp_sum(n).unwrap() - 1.7).abs() < 1e-15);
        }
        assert_eq!(spectral_radius_inverse(&mu), 1.7);
        assert!(matches!(mu.interp_sum(4), Err(Error::Domain(_))));
    }

    #[test]
    fn measure_json_shape() {
        let mu = AtomicMeasure::new(1, vec![0.5, -0.25]).unwrap();
        let v = serde_json::to_value(&mu).unwrap();
        assert_eq!(v, serde_json::json!({"N": 1, "tau": [0.5, -0.25]}));
        assert!(serde_json::from_str::<AtomicMeasure>(r#"{"N": 2, "tau": [1.0]}"#).is_err());
    }

    #[test]
    fn pipeline_small_degree() {
        let u = Kernel::extremal(4, 2.0).unwrap();
        let op = InverseOperator::build(&u, DEFAULT_SERIES_TOL, &cfg()).unwrap();
        assert!(op.series.sign_alternates());
        assert!(op.measure.sign_alternates());
        assert!(op.series.coeffs()[0] > 0.0);
        let report = verify_interpolation(&op.measure, &u, 1e-6, &cfg()).unwrap();
        assert!(report.pass, "max deviation {}", report.max_deviation);
        let norm = inverse_norm(&op.measure, &u, &cfg()).unwrap();
        assert!((norm - (8.0 / PI).sqrt()).abs() < 1e-6 * norm);
        let alt = op.series.alternating_sum().unwrap();
        let signed: f64 = op.measure.atoms().map(|(m, _, t)| sign(m) * t).sum();
        assert!((alt - signed).abs() < 1e-9 * alt);
    }

    #[test]
    fn atoms_match_dft_of_samples() {
        // Independent route: folding is aliasing, so
        // τ_m = (1/2N) Σ_{n=-N+1}^{N} v(n) e^{-iπmn/N}.
        let n = 3u32;
        let u = Kernel::extremal(n, 3.0).unwrap();
        let op = InverseOperator::build(&u, DEFAULT_SERIES_TOL, &cfg()).unwrap();
        let ni = n as i64;
        for m in -ni + 1..=ni {
            let dft: f64 = (-ni + 1..=ni)
                .map(|k| {
                    let v = 1.0 / u.fourier_coeff(k as f64, &cfg()).unwrap();
                    v * (PI * (m * k) as f64 / n as f64).cos()
                })
                .sum::<f64>()
                / (2 * n) as f64;
            assert!((op.measure.atom(m) - dft).abs() < 1e-9 * dft.abs().max(1.0), "m={m}");
        }
    }

    #[test]
    fn inverse_undoes_convolution() {
        let u = Kernel::extremal(6, 3.0).unwrap();
        let op = InverseOperator::build(&u, DEFAULT_SERIES_TOL, &cfg()).unwrap();
        let s = random_poly(6, 21, 1.0).unwrap();
        let back = op.apply(&apply_conv(&s, &u, &cfg()).unwrap()).unwrap();
        for (a, b) in back.coeffs().iter().zip(s.coeffs()) {
            assert!((a - b).norm() <= 1e-8 * b.norm());
        }
    }

    #[test]
    fn perturbed_atom_fails_interpolation() {
        let n = 8;
        let u = Kernel::extremal(n, 2.0).unwrap();
        let op = InverseOperator::build(&u, DEFAULT_SERIES_TOL, &cfg()).unwrap();
        let m = 3;
        let bad = op.measure.with_scaled_atom(m, 1.01).unwrap();
        let report = verify_interpolation(&bad, &u, 1e-6, &cfg()).unwrap();
        assert!(!report.pass);
        // Scaling τ_m by 1.01 shifts p_u(k)û(k) by 0.01 τ_m e^{-iπmk/N} û(k).
        for row in &report.rows {
            let predicted = 0.01 * op.measure.atom(m).abs() * row.uhat;
            assert!((row.deviation - predicted).abs() < 1e-6, "n={}", row.n);
        }
    }

    #[test]
    fn nonpositive_transform_is_rejected() {
        assert!(check_positive(2.0, 128, |x| Ok(1.0 + x)).is_ok());
        let err = check_positive(2.0, 128, |x| Ok((x * 1.2).cos())).unwrap_err();
        assert!(matches!(err, Error::KernelAdmissibility(_)));
        // A nonnegative kernel on [-π/2N, π/2N] has cos(xt) ≥ 0 under the
        // integral for |x| ≤ N, so real kernels always pass.
        let u = Kernel::extremal(3, 1.0).unwrap();
        assert!(check_positive(3.0, 192, |x| u.fourier_coeff(x, &cfg())).is_ok());
    }
}
