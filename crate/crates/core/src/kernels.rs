//! Admissible kernels: even, nonnegative, supported in `[-π/2N, π/2N]`,
//! with unit `L^q` norm where `1/p + 1/q = 1`.
//!
//! The closed form `θ cos^{p-1}(Nx)` maximizes `û(N)` over all admissible
//! kernels; tabulated kernels exist to probe that claim.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::special::gamma_ratio;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};

/// `∫_{-π/2}^{π/2} cos^p t dt = √π Γ((p+1)/2) / Γ(p/2 + 1)`.
///
/// Integer `p` goes through the exact half-integer gamma recurrences.
pub fn cos_p_norm(p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("cos_p_norm needs p >= 1, got {p}")));
    }
    Ok(PI.sqrt() * gamma_ratio((p + 1.0) / 2.0, p / 2.0 + 1.0)?)
}

/// Closed-form supremum of `û(N)` over admissible kernels: `(∫cos^p / N)^{1/p}`.
pub fn uhat_n_extremal(n: u32, p: f64) -> Result<f64> {
    check_degree(n)?;
    Ok((cos_p_norm(p)? / n as f64).powf(1.0 / p))
}

pub fn extremal_kernel(n: u32, p: f64) -> Result<Kernel> {
    Kernel::extremal(n, p)
}

pub fn fourier_coeff(u: &Kernel, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    u.fourier_coeff(x, cfg)
}

fn check_degree(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("degree N must be at least 1".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelForm {
    /// `θ cos^{p-1}(Nx)` on the support.
    Closed { theta: f64 },
    /// Odd number of uniform samples over `[-π/2N, π/2N]`, linearly
    /// interpolated.
    Tabulated { samples: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelRepr", into = "KernelRepr")]
pub struct Kernel {
    degree: u32,
    p: f64,
    form: KernelForm,
}

#[derive(Serialize, Deserialize)]
struct KernelRepr {
    #[serde(rename = "N")]
    n: u32,
    p: f64,
    form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<f64>>,
}

impl TryFrom<KernelRepr> for Kernel {
    type Error = Error;

    fn try_from(r: KernelRepr) -> Result<Self> {
        let cfg = QuadratureConfig::default();
        let kernel = match (r.form.as_str(), r.theta, r.samples) {
            ("closed", Some(theta), None) => {
                let k = Kernel::extremal(r.n, r.p)?;
                let KernelForm::Closed { theta: expected } = k.form else {
                    unreachable!()
                };
                if ((theta - expected) / expected).abs() > 1e-9 {
                    return Err(Error::Validation(format!(
                        "theta {theta} does not normalize the kernel (expected {expected})"
                    )));
                }
                k
            }
            ("tabulated", None, Some(samples)) => {
                let k = Kernel::tabulated(r.n, r.p, samples.clone(), &cfg)?;
                let KernelForm::Tabulated { samples: normalized } = &k.form else {
                    unreachable!()
                };
                let scale = normalized.iter().cloned().fold(0.0, f64::max);
                if samples
                    .iter()
                    .zip(normalized)
                    .any(|(a, b)| (a - b).abs() > 1e-9 * scale)
                {
                    return Err(Error::Validation("tabulated kernel is not L^q-normalized".into()));
                }
                Kernel {
                    form: KernelForm::Tabulated { samples },
                    ..k
                }
            }
            (form, _, _) => {
                return Err(Error::Validation(format!(
                    "kernel form {form:?} needs exactly one of theta (closed) or samples (tabulated)"
                )))
            }
        };
        Ok(kernel)
    }
}

impl From<Kernel> for KernelRepr {
    fn from(k: Kernel) -> Self {
        match k.form {
            KernelForm::Closed { theta } => Self {
                n: k.degree,
                p: k.p,
                form: "closed".into(),
                theta: Some(theta),
                samples: None,
            },
            KernelForm::Tabulated { samples } => Self {
                n: k.degree,
                p: k.p,
                form: "tabulated".into(),
                theta: None,
                samples: Some(samples),
            },
        }
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("kernel exponent p must be >= 1, got {p}")));
    }
    Ok(())
}

impl Kernel {
    /// `θ cos^{p-1}(Nx)` with `θ = (N / ∫cos^p)^{1/q}`; the box of height 1
    /// when `p = 1`.
    pub fn extremal(n: u32, p: f64) -> Result<Self> {
        check_degree(n)?;
        check_exponent(p)?;
        let theta = if p == 1.0 {
            1.0
        } else {
            (n as f64 / cos_p_norm(p)?).powf((p - 1.0) / p)
        };
        Ok(Self {
            degree: n,
            p,
            form: KernelForm::Closed { theta },
        })
    }

    /// Tabulated kernel from an even, nonnegative profile, rescaled to unit
    /// `L^q` norm.
    pub fn tabulated(n: u32, p: f64, samples: Vec<f64>, cfg: &QuadratureConfig) -> Result<Self> {
        check_degree(n)?;
        check_exponent(p)?;
        let m = samples.len();
        if m < 3 || m % 2 == 0 {
            return Err(Error::Validation(format!(
                "tabulated kernel needs an odd number (>= 3) of samples, got {m}"
            )));
        }
        if samples.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::KernelAdmissibility("samples must be finite and nonnegative".into()));
        }
        let peak = samples.iter().cloned().fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(Error::KernelAdmissibility("kernel is identically zero".into()));
        }
        if (0..m / 2).any(|i| (samples[i] - samples[m - 1 - i]).abs() > 1e-12 * peak) {
            return Err(Error::KernelAdmissibility("samples are not even".into()));
        }
        let mut sym = samples;
        for i in 0..m / 2 {
            let avg = 0.5 * (sym[i] + sym[m - 1 - i]);
            sym[i] = avg;
            sym[m - 1 - i] = avg;
        }
        let raw = Self {
            degree: n,
            p,
            form: KernelForm::Tabulated { samples: sym },
        };
        let norm = raw.lq_norm(cfg)?;
        let KernelForm::Tabulated { samples } = raw.form else {
            unreachable!()
        };
        Ok(Self {
            degree: n,
            p,
            form: KernelForm::Tabulated {
                samples: samples.into_iter().map(|s| s / norm).collect(),
            },
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent; infinite for `p = 1`.
    pub fn q(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }

    pub fn form(&self) -> &KernelForm {
        &self.form
    }

    /// Support half-width `π/2N`.
    pub fn half_width(&self) -> f64 {
        PI / (2.0 * self.degree as f64)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let h = self.half_width();
        let a = t.abs();
        if a > h {
            return 0.0;
        }
        match &self.form {
            KernelForm::Closed { theta } => {
                if self.p == 1.0 {
                    *theta
                } else {
                    theta * (self.degree as f64 * a).cos().max(0.0).powf(self.p - 1.0)
                }
            }
            KernelForm::Tabulated { samples } => {
                let m = samples.len();
                let pos = (a + h) / (2.0 * h) * (m - 1) as f64;
                let i = (pos.floor() as usize).min(m - 2);
                let frac = pos - i as f64;
                samples[i] * (1.0 - frac) + samples[i + 1] * frac
            }
        }
    }

    /// Breakpoints on `[0, π/2N]` where the kernel may fail to be smooth.
    fn half_breaks(&self) -> Vec<f64> {
        let h = self.half_width();
        match &self.form {
            KernelForm::Closed { .. } => vec![0.0, h],
            KernelForm::Tabulated { samples } => {
                let half = (samples.len() - 1) / 2;
                (0..=half).map(|j| h * j as f64 / half as f64).collect()
            }
        }
    }

    /// `2 ∫_0^{π/2N} f(t) dt` for an even integrand.
    fn even_integral(&self, f: impl Fn(f64) -> f64, cfg: &QuadratureConfig) -> Result<f64> {
        Ok(2.0 * integrate(f, &self.half_breaks(), cfg)?)
    }

    pub fn lq_norm(&self, cfg: &QuadratureConfig) -> Result<f64> {
        let q = self.q();
        if q.is_infinite() {
            return Ok(match &self.form {
                KernelForm::Closed { theta } => *theta,
                KernelForm::Tabulated { samples } => samples.iter().cloned().fold(0.0, f64::max),
            });
        }
        Ok(self.even_integral(|t| self.eval(t).powf(q), cfg)?.powf(1.0 / q))
    }

    /// `û(x) = 2 ∫_0^{π/2N} u(t) cos(xt) dt`.
    pub fn fourier_coeff(&self, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
        self.even_integral(|t| self.eval(t) * (x * t).cos(), cfg)
    }

    /// `d^j/dx^j û(x)` for `j ≤ 3`.
    pub fn fourier_derivative(&self, order: u8, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
        match order {
            0 => self.fourier_coeff(x, cfg),
            1 => self.even_integral(|t| -t * self.eval(t) * (x * t).sin(), cfg),
            2 => self.even_integral(|t| -t * t * self.eval(t) * (x * t).cos(), cfg),
            3 => self.even_integral(|t| t * t * t * self.eval(t) * (x * t).sin(), cfg),
            _ => Err(Error::Domain(format!("derivative order {order} not supported"))),
        }
    }
}
