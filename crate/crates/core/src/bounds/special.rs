//! Gamma function, exact factorial-type products and the Hurwitz zeta
//! function.
//!
//! Integer and half-integer gamma arguments never touch the Lanczos sum: they
//! run through the exact recurrences `Γ(n+1) = n!` and
//! `Γ(n+1/2) = √π (2n-1)!! / 2^n`, so the integer-exponent constants agree
//! to rounding level with their exact rational forms.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest argument for which Γ is finite in f64.
const GAMMA_MAX: f64 = 171.624_376_956_302_7;

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    if x > GAMMA_MAX {
        return Err(Error::Overflow(format!("gamma({x}) exceeds f64 range")));
    }
    let twice = 2.0 * x;
    if twice.fract() == 0.0 {
        let k = twice as u64;
        return Ok(if k % 2 == 0 {
            // Γ(n) = (n-1)!
            (1..k / 2).fold(1.0, |acc, j| acc * j as f64)
        } else {
            // Γ(n + 1/2) = √π ∏_{j=1}^{n} (j - 1/2)
            let n = (k - 1) / 2;
            (1..=n).fold(PI.sqrt(), |acc, j| acc * (j as f64 - 0.5))
        });
    }
    if x < 0.5 {
        // Shift up once; Lanczos is most accurate for x >= 1/2.
        return Ok(lanczos(x + 1.0) / x);
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * sum
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok(ln_lanczos(x + 1.0) - x.ln());
    }
    Ok(ln_lanczos(x))
}

fn ln_lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

/// Γ(a) / Γ(b), through logarithms once either argument is large.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    if a.max(b) < 100.0 {
        Ok(gamma(a)? / gamma(b)?)
    } else {
        Ok((ln_gamma(a)? - ln_gamma(b)?).exp())
    }
}

/// Exact value `numer / denom`, times `√π` when `sqrt_pi` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactGamma {
    pub numer: u128,
    pub denom: u128,
    pub sqrt_pi: bool,
}

impl ExactGamma {
    pub fn value(&self) -> f64 {
        let r = self.numer as f64 / self.denom as f64;
        if self.sqrt_pi {
            r * PI.sqrt()
        } else {
            r
        }
    }
}

/// Γ(n) when `half` is false, Γ(n + 1/2) when it is true, in exact form.
pub fn half_integer_gamma(n: u32, half: bool) -> Result<ExactGamma> {
    if half {
        // Γ(n + 1/2) = √π (2n-1)!! / 2^n
        let numer = if n == 0 { 1 } else { double_factorial(2 * n - 1)? };
        let denom = 1u128
            .checked_shl(n)
            .filter(|_| n < 128)
            .ok_or_else(|| Error::Overflow(format!("2^{n} exceeds 128 bits")))?;
        let g = num_integer::gcd(numer, denom);
        Ok(ExactGamma {
            numer: numer / g,
            denom: denom / g,
            sqrt_pi: true,
        })
    } else {
        if n == 0 {
            return Err(Error::Domain("gamma has a pole at 0".into()));
        }
        Ok(ExactGamma {
            numer: factorial(n - 1)?,
            denom: 1,
            sqrt_pi: false,
        })
    }
}

pub fn factorial(n: u32) -> Result<u128> {
    (1..=n as u128).try_fold(1u128, |acc, j| {
        acc.checked_mul(j)
            .ok_or_else(|| Error::Overflow(format!("{n}! exceeds 128 bits")))
    })
}

/// n!! = n (n-2) (n-4) ⋯, with 0!! = (-1)!! = 1.
pub fn double_factorial(n: u32) -> Result<u128> {
    let mut acc = 1u128;
    let mut k = n as u128;
    while k > 1 {
        acc = acc
            .checked_mul(k)
            .ok_or_else(|| Error::Overflow(format!("{n}!! exceeds 128 bits")))?;
        k -= 2;
    }
    Ok(acc)
}

// B_{2j} / (2j)!
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
];

/// Hurwitz zeta ζ(s, a) = Σ_{i≥0} (a + i)^{-s} for s > 1, a > 0.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if !(s > 1.0) || !(a > 0.0) {
        return Err(Error::Domain(format!(
            "hurwitz zeta requires s > 1 and a > 0, got s={s}, a={a}"
        )));
    }
    const SHIFT: usize = 16;
    let mut sum: f64 = (0..SHIFT).map(|i| (a + i as f64).powf(-s)).sum();
    let x = a + SHIFT as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // Euler–Maclaurin correction terms.
    let mut rising = s;
    let mut xpow = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum += b * rising * xpow;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        xpow /= x * x;
    }
    Ok(sum)
}
