//! Series expansions of the (smoothed) Brownian bridge used as `log a`.
//!
//! Parameters are 0-based in parameter vectors: `xi[0]` multiplies `phi_1`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Scale making the Levy-Ciesielski hats a Parseval frame of the bridge,
/// so that `sum_m phi_m(x) phi_m(y) = min(x, y) - x y`.
pub const LC_BRIDGE_SCALE: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldKind {
    /// `phi_m = sqrt(2) / (pi m)^q sin(pi m x)`.
    KarhunenLoeve { q: f64 },
    /// Hats `2^{-l/2} hat(2^l x - j)` for `m = 2^l + j`.
    LevyCiesielski,
    /// `C^{1/2} psi_m` for Haar wavelets `psi_m`, sine series cut at `series`.
    HaarChalf { q: f64, series: usize },
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::KarhunenLoeve { q } => write!(f, "kl(q={q})"),
            FieldKind::LevyCiesielski => write!(f, "lc"),
            FieldKind::HaarChalf { q, series } => write!(f, "haar(q={q},series={series})"),
        }
    }
}

/// Short kind name without parameters, as used on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKindName {
    Kl,
    Lc,
    Haar,
}

impl FromStr for FieldKindName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kl" | "karhunen-loeve" => Ok(FieldKindName::Kl),
            "lc" | "levy-ciesielski" => Ok(FieldKindName::Lc),
            "haar" | "haar-chalf" => Ok(FieldKindName::Haar),
            other => Err(Error::InvalidArgument(format!("unknown field kind {other:?}"))),
        }
    }
}

/// `log a(x) = sum_{m=1}^{M} phi_m(x) xi_m` with the mean `phi_0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldExpansion {
    pub kind: FieldKind,
    pub sigma: f64,
    pub truncation: usize,
    /// Constant in front of the LC hats; [`LC_BRIDGE_SCALE`] by default.
    pub lc_scale: f64,
}

impl FieldExpansion {
    pub fn karhunen_loeve(q: f64, sigma: f64, truncation: usize) -> Self {
        Self {
            kind: FieldKind::KarhunenLoeve { q },
            sigma,
            truncation,
            lc_scale: LC_BRIDGE_SCALE,
        }
    }

    pub fn levy_ciesielski(sigma: f64, truncation: usize) -> Self {
        Self {
            kind: FieldKind::LevyCiesielski,
            sigma,
            truncation,
            lc_scale: LC_BRIDGE_SCALE,
        }
    }

    pub fn haar_chalf(q: f64, series: usize, sigma: f64, truncation: usize) -> Self {
        Self {
            kind: FieldKind::HaarChalf { q, series },
            sigma,
            truncation,
            lc_scale: LC_BRIDGE_SCALE,
        }
    }

    pub fn with_lc_scale(mut self, scale: f64) -> Self {
        self.lc_scale = scale;
        self
    }

    pub fn with_truncation(mut self, truncation: usize) -> Self {
        self.truncation = truncation;
        self
    }

    /// `phi_m(x)` for `m >= 1`.
    pub fn phi(&self, m: usize, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("basis functions are numbered from 1".into()));
        }
        Ok(match self.kind {
            FieldKind::KarhunenLoeve { q } => self.sigma * kl_amplitude(q, m) * (PI * m as f64 * x).sin(),
            FieldKind::LevyCiesielski => {
                let (level, shift) = dyadic(m);
                let scale = (2f64).powi(level as i32);
                self.sigma * self.lc_scale * scale.sqrt().recip() * hat(scale * x - shift as f64)
            }
            FieldKind::HaarChalf { q, series } => self.sigma * chalf_haar(q, m, x, series),
        })
    }

    /// `g_m = sup_x |phi_m(x)|`.
    pub fn sup_norm(&self, m: usize) -> f64 {
        match self.kind {
            FieldKind::KarhunenLoeve { q } => self.sigma * kl_amplitude(q, m),
            FieldKind::LevyCiesielski => {
                let (level, _) = dyadic(m);
                self.sigma * self.lc_scale * (2f64).powf(-(level as f64) / 2.0)
            }
            FieldKind::HaarChalf { .. } => {
                let grid = 512;
                (0..=grid)
                    .map(|i| self.phi(m, i as f64 / grid as f64).map_or(0.0, f64::abs))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// `log a(x)` from a parameter vector with at least `M` entries.
    pub fn log_a(&self, xi: &[f64], x: f64) -> Result<f64> {
        if xi.len() < self.truncation {
            return Err(Error::ShortParameter {
                got: xi.len(),
                need: self.truncation,
            });
        }
        self.log_a_partial(&xi[..self.truncation], x)
    }

    /// `log a(x)` from the leading parameters only; missing ones count as 0.
    pub fn log_a_partial(&self, xi: &[f64], x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        let mut out = [0.0];
        self.log_a_many(xi, &[x], &mut out)?;
        Ok(out[0])
    }

    /// `log a` at every `xs[k]`, using the leading `xi.len()` parameters.
    pub fn log_a_many(&self, xi: &[f64], xs: &[f64], out: &mut [f64]) -> Result<()> {
        if xi.len() > self.truncation {
            return Err(Error::InvalidArgument(format!(
                "{} parameters for an expansion truncated at {}",
                xi.len(),
                self.truncation
            )));
        }
        // trailing zeros cost nothing
        let used = xi.iter().rposition(|&v| v != 0.0).map_or(0, |p| p + 1);
        let xi = &xi[..used];
        match self.kind {
            FieldKind::KarhunenLoeve { q } => {
                let coeff: Vec<f64> = (1..=xi.len())
                    .map(|m| self.sigma * kl_amplitude(q, m) * xi[m - 1])
                    .collect();
                for (o, &x) in out.iter_mut().zip(xs) {
                    *o = sine_series(&coeff, x);
                }
            }
            FieldKind::LevyCiesielski => {
                for (o, &x) in out.iter_mut().zip(xs) {
                    let mut total = 0.0;
                    let mut level = 0u32;
                    loop {
                        let first = 1usize << level;
                        if first > xi.len() {
                            break;
                        }
                        let scale = (1u64 << level) as f64;
                        let shift = ((scale * x).floor() as usize).min(first - 1);
                        let m = first + shift;
                        if m <= xi.len() {
                            total += xi[m - 1] * scale.sqrt().recip() * hat(scale * x - shift as f64);
                        }
                        level += 1;
                    }
                    *o = self.sigma * self.lc_scale * total;
                }
            }
            FieldKind::HaarChalf { .. } => {
                for (o, &x) in out.iter_mut().zip(xs) {
                    let mut total = 0.0;
                    for (m, &v) in xi.iter().enumerate() {
                        if v != 0.0 {
                            total += v * self.phi(m + 1, x)?;
                        }
                    }
                    *o = total;
                }
            }
        }
        Ok(())
    }
}

fn kl_amplitude(q: f64, m: usize) -> f64 {
    SQRT_2 / (PI * m as f64).powf(q)
}

/// `(l, j)` with `m = 2^l + j`, `0 <= j < 2^l`.
fn dyadic(m: usize) -> (u32, usize) {
    let level = usize::BITS - 1 - m.leading_zeros();
    (level, m - (1usize << level))
}

fn hat(t: f64) -> f64 {
    (1.0 - (2.0 * t - 1.0).abs()).max(0.0)
}

/// `sum_{m>=1} c[m-1] sin(pi m x)` by the three-term sine recurrence.
fn sine_series(c: &[f64], x: f64) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    let theta = PI * x;
    let two_cos = 2.0 * theta.cos();
    let (mut prev, mut cur) = (0.0, theta.sin());
    let mut total = 0.0;
    for &cm in c {
        total += cm * cur;
        let next = two_cos * cur - prev;
        prev = cur;
        cur = next;
    }
    total
}

/// Share of the variance of `sum_m (pi m)^{-q} sqrt(2) sin(pi m x) xi_m`
/// captured by the first `M` terms: `sum_{m<=M} m^{-2q} / zeta(2q)`.
pub fn variance_coverage(q: f64, truncation: usize) -> f64 {
    let s = 2.0 * q;
    let head: f64 = (1..=truncation).rev().map(|m| (m as f64).powf(-s)).sum();
    head / zeta(s)
}

/// Riemann zeta for `s > 1`: direct sum to 1000 plus an Euler-Maclaurin tail.
pub fn zeta(s: f64) -> f64 {
    let n = 1000usize;
    let direct: f64 = (1..=n).rev().map(|m| (m as f64).powf(-s)).sum();
    let nf = n as f64;
    let tail = nf.powf(1.0 - s) / (s - 1.0) - 0.5 * nf.powf(-s) + s * nf.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * nf.powf(-s - 3.0) / 720.0;
    direct + tail
}

/// `kappa_tau(x) = sum_{m<=M} m^{1/p} sqrt(2)/(pi m) sin(m pi x)`, Kahan summed.
pub fn kappa_tau(p: f64, truncation: usize, x: f64) -> f64 {
    kappa_tau_many(p, truncation, &[x])[0]
}

/// [`kappa_tau`] at several locations, parallel over `xs`.
pub fn kappa_tau_many(p: f64, truncation: usize, xs: &[f64]) -> Vec<f64> {
    let expo = 1.0 / p - 1.0;
    let amp: Vec<f64> = (1..=truncation).map(|m| SQRT_2 / PI * (m as f64).powf(expo)).collect();
    xs.par_iter()
        .map(|&x| {
            let (mut sum, mut comp) = (0.0f64, 0.0f64);
            for (k, &a) in amp.iter().enumerate() {
                let term = a * ((k + 1) as f64 * PI * x).sin() - comp;
                let t = sum + term;
                comp = (t - sum) - term;
                sum = t;
            }
            sum
        })
        .collect()
}

/// `(C^{1/2} psi_m)(x)` for the covariance `2 sum (pi n)^{-2q} sin sin` and
/// the Haar wavelet `psi_m`, `m = 2^l + j >= 1`, with the sine series cut
/// after `series` terms.
pub fn chalf_haar(q: f64, m: usize, x: f64, series: usize) -> f64 {
    let (level, shift) = dyadic(m.max(1));
    let width = (2f64).powi(-(level as i32));
    let a = shift as f64 * width;
    let mid = a + 0.5 * width;
    let b = a + width;
    let height = (2f64).powf(level as f64 / 2.0);
    let mut total = 0.0;
    for n in 1..=series {
        let w = PI * n as f64;
        // <sqrt(2) sin(n pi .), psi_m> in closed form
        let inner = SQRT_2 * height / w * ((w * a).cos() - 2.0 * (w * mid).cos() + (w * b).cos());
        total += SQRT_2 * w.powf(-q) * (w * x).sin() * inner;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_examples() {
        let kl = FieldExpansion::karhunen_loeve(1.0, 1.0, 10);
        assert!((kl.phi(1, 0.5).unwrap() - SQRT_2 / PI).abs() < 1e-15);
        let lc = FieldExpansion::levy_ciesielski(1.0, 10).with_lc_scale(1.0);
        assert_eq!(lc.phi(1, 0.5).unwrap(), 1.0);
        for f in [&kl, &lc, &FieldExpansion::haar_chalf(3.0, 256, 1.0, 10)] {
            for m in 1..=9 {
                assert!(f.phi(m, 0.0).unwrap().abs() < 1e-12);
                assert!(f.phi(m, 1.0).unwrap().abs() < 1e-12);
            }
        }
        assert_eq!(kl.phi(1, 1.5), Err(Error::OutOfDomain(1.5)));
    }

    #[test]
    fn log_a_examples() {
        let kl = FieldExpansion::karhunen_loeve(1.0, 3.0, 1);
        assert!((kl.log_a(&[1.0], 0.5).unwrap() - 3.0 * SQRT_2 / PI).abs() < 1e-15);
        let kl = FieldExpansion::karhunen_loeve(2.0, 3.0, 8);
        assert_eq!(kl.log_a(&[0.0; 8], 0.3), Ok(0.0));
        assert_eq!(kl.log_a(&[0.0; 7], 0.3), Err(Error::ShortParameter { got: 7, need: 8 }));
        let xi: Vec<f64> = (0..8).map(|i| (i as f64 * 0.37).cos()).collect();
        let xi2: Vec<f64> = xi.iter().map(|v| 2.0 * v).collect();
        for x in [0.1, 0.5, 0.77] {
            let direct: f64 = (1..=8).map(|m| kl.phi(m, x).unwrap() * xi[m - 1]).sum();
            let fast = kl.log_a(&xi, x).unwrap();
            assert!((direct - fast).abs() < 1e-13);
            assert!((kl.log_a(&xi2, x).unwrap() - 2.0 * fast).abs() < 1e-13);
        }
    }

    #[test]
    fn lc_fast_path_matches_direct_sum() {
        let lc = FieldExpansion::levy_ciesielski(1.5, 37);
        let xi: Vec<f64> = (0..37).map(|i| (i as f64 * 1.3).sin()).collect();
        for x in [0.0, 0.03, 0.5, 0.61, 0.999, 1.0] {
            let direct: f64 = (1..=37).map(|m| lc.phi(m, x).unwrap() * xi[m - 1]).sum();
            assert!((direct - lc.log_a(&xi, x).unwrap()).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn sup_norms() {
        let kl = FieldExpansion::karhunen_loeve(3.0, 2.0, 10);
        assert!((kl.sup_norm(2) - 2.0 * SQRT_2 / (2.0 * PI).powi(3)).abs() < 1e-15);
        let lc = FieldExpansion::levy_ciesielski(2.0, 10);
        assert!((lc.sup_norm(5) - 2.0 * 0.5 * 0.5).abs() < 1e-15);
        for m in 1..10 {
            let peak = (0..=4096)
                .map(|i| lc.phi(m, i as f64 / 4096.0).unwrap().abs())
                .fold(0.0, f64::max);
            assert!((peak - lc.sup_norm(m)).abs() < 1e-12);
        }
    }

    #[test]
    fn coverage_examples() {
        assert!((variance_coverage(1.0, 1) - 6.0 / PI.powi(2)).abs() < 1e-12);
        assert!((zeta(2.0) - PI.powi(2) / 6.0).abs() < 1e-13);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-13);
    }

    #[test]
    fn kappa_single_term_and_reflection() {
        assert!((kappa_tau(4.0, 1, 0.5) - SQRT_2 / PI).abs() < 1e-15);
        // sin(m pi (1 - x)) = (-1)^{m+1} sin(m pi x)
        let (p, m, x) = (3.0, 200, 0.137);
        let direct = |x: f64, parity: usize| -> f64 {
            (1..=m)
                .filter(|k| k % 2 == parity)
                .map(|k| (k as f64).powf(1.0 / p) * SQRT_2 / (PI * k as f64) * (k as f64 * PI * x).sin())
                .sum()
        };
        let diff = kappa_tau(p, m, x) - kappa_tau(p, m, 1.0 - x);
        assert!((diff - 2.0 * direct(x, 0)).abs() < 1e-12);
    }

    #[test]
    fn chalf_series_converges() {
        let a = chalf_haar(3.0, 3, 0.3, 256);
        let b = chalf_haar(3.0, 3, 0.3, 512);
        assert!((a - b).abs() < 1e-4);
        assert_eq!(chalf_haar(3.0, 1, 0.0, 64), 0.0);
    }
}
