//! Multiplier objects for the joint functional calculus: smooth dyadic
//! bumps with an exact partition of unity, compactly supported spectral
//! multipliers, center-scale truncations, Bochner–Riesz means, and
//! band-limited Fourier localizations computed on a fine periodic grid.
//!
//! Variable convention: a `MultiplierSpec` is a function of s = sqrt(lambda)
//! (the square root of the joint eigenvalue), even in s. The truncated
//! object evaluates F(sqrt([k] rho)) chi_ell([k]) at the spectral point
//! (k, rho).

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fftutil::CenteredDft;

/// Smooth compactly supported seed: exp(-1/(1-t^2)) on (-1, 1), else 0.
pub fn smooth_seed(t: f64) -> f64 {
    let t2 = t * t;
    if t2 >= 1.0 {
        return 0.0;
    }
    (-1.0 / (1.0 - t2)).exp()
}

/// Normalized translate weight w(tau) = seed(tau) / sum_m seed(tau - m);
/// the denominator has at most two nonzero terms.
fn partition_weight(tau: f64) -> f64 {
    let num = smooth_seed(tau);
    if num == 0.0 {
        return 0.0;
    }
    let base = tau.floor() as i64;
    let mut den = 0.0;
    for m in (base - 1)..=(base + 2) {
        den += smooth_seed(tau - m as f64);
    }
    num / den
}

/// The base dyadic bump chi, supported in 1/2 <= |lambda| <= 2, even, with
/// sum_j chi(lambda / 2^j) = 1 for all lambda != 0.
pub fn dyadic_chi(lambda: f64) -> f64 {
    let a = lambda.abs();
    if a == 0.0 || !a.is_finite() {
        return 0.0;
    }
    partition_weight(a.log2())
}

/// chi_j(lambda) = chi(lambda / 2^j), computed with exact power-of-two
/// scaling so that chi_j(2^j lambda) reproduces chi_0(lambda) bit for bit.
pub fn dyadic_bump(j: i32, lambda: f64) -> f64 {
    dyadic_chi(scale_pow2(lambda, -j))
}

fn scale_pow2(x: f64, e: i32) -> f64 {
    // exact for the ranges used here (no overflow/underflow to subnormals)
    x * (e as f64).exp2()
}

/// psi = sum_{j=-2}^{2} chi_j: equals 1 on 1/4 <= |lambda| <= 4, supported
/// in 1/8 <= |lambda| <= 8, even.
pub fn psi_window(lambda: f64) -> f64 {
    (-2..=2).map(|j| dyadic_bump(j, lambda)).sum()
}

#[derive(Clone)]
enum Kind {
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Uniform table with cubic (Catmull–Rom) interpolation; start is the
    /// coordinate of values[0].
    Table {
        start: f64,
        step: f64,
        values: Arc<Vec<f64>>,
    },
}

/// A real, even, bounded spectral multiplier in the variable s =
/// sqrt(lambda), with a declared support interval on the positive axis.
#[derive(Clone)]
pub struct MultiplierSpec {
    label: String,
    /// declared support [a, b] in |s|; evaluation returns exactly 0 outside
    support: (f64, f64),
    kind: Kind,
}

impl std::fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiplierSpec")
            .field("label", &self.label)
            .field("support", &self.support)
            .finish()
    }
}

impl MultiplierSpec {
    pub fn from_closure(
        label: impl Into<String>,
        support: (f64, f64),
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MultiplierSpec {
            label: label.into(),
            support,
            kind: Kind::Closure(Arc::new(f)),
        }
    }

    /// Smooth even bump centered at `center` with half-width `width`:
    /// s -> seed((|s| - center) / width) / seed(0), peak value 1.
    pub fn bump(center: f64, width: f64) -> Result<Self> {
        if !(center > 0.0 && width > 0.0) {
            return Err(Error::domain("bump requires positive center and width"));
        }
        let peak = smooth_seed(0.0);
        Ok(Self::from_closure(
            format!("bump({center},{width})"),
            (center - width, center + width),
            move |s| smooth_seed((s.abs() - center) / width) / peak,
        ))
    }

    /// Bochner–Riesz mean of order delta at scale t, as a function of
    /// s = sqrt(lambda): (1 - t s^2)_+^delta.
    pub fn bochner_riesz(delta: f64, t: f64) -> Result<Self> {
        if delta <= 0.0 {
            return Err(Error::domain("Bochner–Riesz order must be positive"));
        }
        if t < 0.0 {
            return Err(Error::domain("Bochner–Riesz scale must be nonnegative"));
        }
        let support = if t == 0.0 {
            (0.0, f64::INFINITY)
        } else {
            (0.0, (1.0 / t).sqrt())
        };
        Ok(Self::from_closure(
            format!("bochner_riesz({delta},{t})"),
            support,
            move |s| {
                let v = 1.0 - t * s * s;
                if v <= 0.0 {
                    0.0
                } else {
                    v.powf(delta)
                }
            },
        ))
    }

    /// Pointwise product with a window function (support intersects with
    /// the window's declared support).
    pub fn windowed(
        &self,
        window_label: &str,
        window_support: (f64, f64),
        window: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let inner = self.clone();
        let support = (
            self.support.0.max(window_support.0),
            self.support.1.min(window_support.1),
        );
        MultiplierSpec {
            label: format!("{}*{}", self.label, window_label),
            support,
            kind: Kind::Closure(Arc::new(move |s| inner.eval(s) * window(s))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Declared support [a, b] in |s|.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Evaluates the multiplier; even in s, exactly zero outside the
    /// declared support.
    pub fn eval(&self, s: f64) -> f64 {
        let a = s.abs();
        if a < self.support.0 || a > self.support.1 {
            return 0.0;
        }
        match &self.kind {
            Kind::Closure(f) => f(a),
            Kind::Table {
                start,
                step,
                values,
            } => {
                // cubic Catmull–Rom on the uniform table; evaluated at |s|
                // so even symmetry is exact
                let x = (a - start) / step;
                if x < 1.0 || x > (values.len() - 3) as f64 {
                    return 0.0;
                }
                let i = x.floor() as usize;
                let f = x - i as f64;
                let (p0, p1, p2, p3) = (values[i - 1], values[i], values[i + 1], values[i + 2]);
                let a0 = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
                let a1 = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
                let a2 = -0.5 * p0 + 0.5 * p2;
                f * (f * (f * a0 + a1) + a2) + p1
            }
        }
    }

    pub fn eval_c(&self, s: f64) -> Complex64 {
        Complex64::new(self.eval(s), 0.0)
    }

    /// L^2 norm on the line (even extension), by trapezoid over the
    /// declared support.
    pub fn l2_norm(&self) -> f64 {
        let (a, b) = self.support;
        if !b.is_finite() {
            return f64::INFINITY;
        }
        let n = 4096;
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let s = a + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            let v = self.eval(s);
            acc += w * v * v * h;
        }
        (2.0 * acc).sqrt()
    }

    /// Reads the JSON multiplier definition
    /// {"kind": "bump"|"bochner_riesz"|"table", ...}.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MultiplierDocument = serde_json::from_str(text)?;
        match doc {
            MultiplierDocument::Bump { center, width } => Self::bump(center, width),
            MultiplierDocument::BochnerRiesz { delta, t } => Self::bochner_riesz(delta, t),
            MultiplierDocument::Table {
                start,
                step,
                values,
                support,
            } => {
                if values.len() < 4 {
                    return Err(Error::domain("table multiplier needs at least 4 samples"));
                }
                if step <= 0.0 {
                    return Err(Error::domain("table step must be positive"));
                }
                Ok(MultiplierSpec {
                    label: "table".into(),
                    support: (support[0], support[1]),
                    kind: Kind::Table {
                        start,
                        step,
                        values: Arc::new(values),
                    },
                })
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MultiplierDocument {
    Bump { center: f64, width: f64 },
    BochnerRiesz { delta: f64, t: f64 },
    Table {
        start: f64,
        step: f64,
        values: Vec<f64>,
        support: [f64; 2],
    },
}

/// Center-scale truncation F_ell: evaluates F(sqrt([k] rho)) chi_ell([k])
/// at a spectral point, where [k] = 2k + n.
#[derive(Debug, Clone)]
pub struct TruncatedMultiplier {
    pub base: MultiplierSpec,
    pub ell: i32,
}

impl TruncatedMultiplier {
    pub fn new(base: MultiplierSpec, ell: i32) -> Result<Self> {
        if ell < -1 {
            return Err(Error::domain(
                "truncation index below -1 vanishes on every eigenvalue",
            ));
        }
        Ok(TruncatedMultiplier { base, ell })
    }

    /// The truncation weight chi_ell([k]).
    pub fn bracket_weight(&self, k: usize, n: usize) -> f64 {
        dyadic_bump(self.ell, (2 * k + n) as f64)
    }

    /// Coefficient at the joint spectral point: F(sqrt([k] rho)) chi_ell([k]).
    pub fn coefficient(&self, k: usize, n: usize, rho: f64) -> f64 {
        let w = self.bracket_weight(k, n);
        if w == 0.0 {
            return 0.0;
        }
        self.base.eval(((2 * k + n) as f64 * rho).sqrt()) * w
    }
}

/// Coefficient source for kernel synthesis and the joint functional
/// calculus: the value attached to the joint spectral point ([k], rho) with
/// [k] = 2k + n, together with the declared support in s = sqrt(lambda).
pub trait SpectralCoefficients: Sync {
    /// Full value attached to the joint spectral point ([k], rho), band
    /// weight included — consumers must not multiply by `bracket_weight`
    /// again.
    fn coefficient(&self, k: usize, n: usize, rho: f64) -> f64;

    /// Per-k factor independent of rho (1 for plain multipliers).  Exposed
    /// so sums over k can skip bands where it vanishes and so norm
    /// identities can separate the k-dependence; it is already folded into
    /// `coefficient`.
    fn bracket_weight(&self, _k: usize, _n: usize) -> f64 {
        1.0
    }

    /// Declared support of the underlying profile in s = sqrt(lambda).
    fn s_support(&self) -> (f64, f64);

    /// Label for spectral records and manifests.
    fn record_label(&self) -> String;
}

impl SpectralCoefficients for MultiplierSpec {
    fn coefficient(&self, k: usize, n: usize, rho: f64) -> f64 {
        self.eval(((2 * k + n) as f64 * rho).sqrt())
    }

    fn s_support(&self) -> (f64, f64) {
        self.support
    }

    fn record_label(&self) -> String {
        self.label.clone()
    }
}

impl SpectralCoefficients for TruncatedMultiplier {
    fn coefficient(&self, k: usize, n: usize, rho: f64) -> f64 {
        TruncatedMultiplier::coefficient(self, k, n, rho)
    }

    fn bracket_weight(&self, k: usize, n: usize) -> f64 {
        TruncatedMultiplier::bracket_weight(self, k, n)
    }

    fn s_support(&self) -> (f64, f64) {
        self.base.support()
    }

    fn record_label(&self) -> String {
        format!("{}:ell={}", self.base.label(), self.ell)
    }
}

/// Period of the fine grid used for Fourier localization.
const LOCALIZE_PERIOD: f64 = 32.0;
/// Base sample count of the fine grid.
const LOCALIZE_BASE: usize = 1 << 14;

/// Band-limits a multiplier to the dyadic frequency band iota:
/// output = (Fhat * window_iota)^inverse, where window_iota = chi_iota for
/// iota >= 1 and the absorbing low-pass 1 - sum_{j>=1} chi_j (including the
/// zero frequency) for iota = 0, so that partial sums over iota <= I
/// reconstruct F.
pub fn fourier_localize(f: &MultiplierSpec, iota: u32) -> Result<MultiplierSpec> {
    let n0 = LOCALIZE_BASE;
    let period = LOCALIZE_PERIOD;
    let nyquist = std::f64::consts::PI * n0 as f64 / period;
    if (iota as f64 + 1.0).exp2() >= nyquist {
        return Err(Error::domain(format!(
            "band 2^{} exceeds the localization grid Nyquist frequency {nyquist:.1}",
            iota + 1
        )));
    }
    let step0 = period / n0 as f64;
    let c0 = n0 / 2;
    let dft = CenteredDft::new(n0);
    let mut modes: Vec<Complex64> = (0..n0)
        .map(|j| Complex64::new(f.eval((j as f64 - c0 as f64) * step0), 0.0))
        .collect();
    dft.forward_slice(&mut modes);
    let dxi = 2.0 * std::f64::consts::PI / period;
    for (m, v) in modes.iter_mut().enumerate() {
        let xi = (m as f64 - c0 as f64) * dxi;
        let w = if iota == 0 {
            // absorbing low band: everything below the iota = 1 band
            let mut high = 0.0;
            let mut j = 1;
            while (j as f64 - 1.0).exp2() <= xi.abs() * 2.0 && j < 64 {
                high += dyadic_bump(j, xi);
                j += 1;
            }
            1.0 - high
        } else {
            dyadic_bump(iota as i32, xi)
        };
        *v *= w;
    }
    // upsample so cubic interpolation resolves the band: M >= 2^{iota+11}
    let m_len = usize::max(n0, 1usize << usize::min(21, iota as usize + 11));
    let mut padded = vec![Complex64::new(0.0, 0.0); m_len];
    let cm = m_len / 2;
    for (m, v) in modes.iter().enumerate() {
        let offset = m as i64 - c0 as i64;
        padded[(cm as i64 + offset) as usize] = *v;
    }
    let dft_m = CenteredDft::new(m_len);
    dft_m.inverse_slice(&mut padded);
    let scale = m_len as f64 / n0 as f64;
    let values: Vec<f64> = padded.iter().map(|v| v.re * scale).collect();
    let step_m = period / m_len as f64;
    Ok(MultiplierSpec {
        label: format!("{}^(band {iota})", f.label()),
        // band-limited output is not compactly supported; declare the full
        // table window
        support: (0.0, period / 2.0 - 2.0 * step_m),
        kind: Kind::Table {
            start: -(period / 2.0),
            step: step_m,
            values: Arc::new(values),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dyadic_partition_of_unity() {
        for &lambda in &[1e-6, 3.7e-4, 0.2, 1.0, 1.5, 8.0, 1234.5, 9.9e5] {
            let total: f64 = (-25..=25).map(|j| dyadic_bump(j, lambda)).sum();
            assert!(
                (total - 1.0).abs() < 1e-12,
                "partition defect at {lambda}: {total}"
            );
        }
        assert_eq!(dyadic_bump(0, 0.0), 0.0);
        assert_eq!(dyadic_bump(3, 0.0), 0.0);
    }

    #[test]
    fn bump_scaling_is_exact() {
        for &lambda in &[0.6, 1.0, 1.9, 0.51] {
            for j in [-3i32, -1, 0, 2, 5] {
                let scaled = lambda * (j as f64).exp2();
                assert_eq!(dyadic_bump(j, scaled), dyadic_bump(0, lambda));
            }
        }
    }

    #[test]
    fn bump_support_and_range() {
        assert_eq!(dyadic_bump(0, 0.49), 0.0);
        assert_eq!(dyadic_bump(0, 2.01), 0.0);
        assert_eq!(dyadic_bump(0, 1.0), 1.0); // exactly, by w(0) = x/x
        for &l in &[0.6, 0.8, 1.3, 1.7] {
            let v = dyadic_bump(0, l);
            assert!(v > 0.0 && v < 1.0 + 1e-15);
        }
        // even
        assert_eq!(dyadic_bump(0, -1.3), dyadic_bump(0, 1.3));
    }

    #[test]
    fn psi_window_examples() {
        assert!((psi_window(1.0) - 1.0).abs() < 1e-13);
        assert!((psi_window(0.25) - 1.0).abs() < 1e-13);
        assert!((psi_window(4.0) - 1.0).abs() < 1e-13);
        assert_eq!(psi_window(1.0 / 16.0), 0.0);
        assert_eq!(psi_window(8.01), 0.0);
        assert_eq!(psi_window(-2.0), psi_window(2.0));
    }

    #[test]
    fn truncation_partition_exact_on_eigenvalues() {
        for n in [1usize, 2, 4] {
            for k in 0..=200usize {
                let bracket = (2 * k + n) as f64;
                let total: f64 = (-1..=10)
                    .map(|ell| dyadic_bump(ell, bracket))
                    .sum();
                assert!(
                    (total - 1.0).abs() < 1e-13,
                    "n={n} k={k}: partition {total}"
                );
                // and nothing survives below ell = -1
                for ell in -6..-1 {
                    assert_eq!(dyadic_bump(ell, bracket), 0.0);
                }
            }
        }
    }

    #[test]
    fn bochner_riesz_closed_forms() {
        let flat = MultiplierSpec::bochner_riesz(1.0, 0.0).unwrap();
        assert_eq!(flat.eval(3.0), 1.0);
        let br = MultiplierSpec::bochner_riesz(1.0, 1.0).unwrap();
        // lambda = 1/2 -> s = sqrt(1/2): value 1/2
        assert_relative_eq!(br.eval(0.5f64.sqrt()), 0.5, epsilon = 1e-15);
        assert_eq!(br.eval(1.0), 0.0);
        assert_eq!(br.eval(1.5), 0.0);
        assert!(MultiplierSpec::bochner_riesz(0.5, -1.0).is_err());
    }

    #[test]
    fn bump_respects_declared_support() {
        let f = MultiplierSpec::bump(1.0, 0.3).unwrap();
        assert_eq!(f.eval(0.699), 0.0);
        assert_eq!(f.eval(1.301), 0.0);
        assert_relative_eq!(f.eval(1.0), 1.0);
        assert_eq!(f.eval(-1.1), f.eval(1.1));
        assert!(f.eval(1.15) > 0.0 && f.eval(1.15) < 1.0);
    }

    #[test]
    fn multiplier_json_parsing() {
        let b = MultiplierSpec::from_json(r#"{"kind":"bump","center":1.0,"width":0.25}"#).unwrap();
        assert_relative_eq!(b.eval(1.0), 1.0);
        let br =
            MultiplierSpec::from_json(r#"{"kind":"bochner_riesz","delta":2.0,"t":1.0}"#).unwrap();
        assert_relative_eq!(br.eval(0.0), 1.0);
        let table = MultiplierSpec::from_json(
            r#"{"kind":"table","start":0.0,"step":0.5,"values":[0.0,1.0,1.0,0.0,0.0,0.0],"support":[0.4,2.0]}"#,
        )
        .unwrap();
        assert_relative_eq!(table.eval(1.0), 1.0);
        assert!(MultiplierSpec::from_json(r#"{"kind":"mystery"}"#).is_err());
    }

    #[test]
    fn localization_reconstructs_band_limited_sum() {
        let f = MultiplierSpec::bump(1.1, 0.55).unwrap();
        let parts: Vec<MultiplierSpec> = (0..=9)
            .map(|i| fourier_localize(&f, i).unwrap())
            .collect();
        // L^2 error of the partial sum against F on a probe grid
        let mut num = 0.0;
        let mut den = 0.0;
        let probes = 2000;
        for i in 0..probes {
            let s = -4.0 + 8.0 * i as f64 / probes as f64;
            let sum: f64 = parts.iter().map(|p| p.eval(s)).sum();
            let diff = sum - f.eval(s);
            num += diff * diff;
            den += f.eval(s) * f.eval(s);
        }
        let rel = (num / den).sqrt();
        assert!(rel < 1e-6, "reconstruction defect {rel}");
    }

    #[test]
    fn localization_is_even_and_l2_bounded() {
        let f = MultiplierSpec::bump(1.0, 0.4).unwrap();
        let g = fourier_localize(&f, 3).unwrap();
        for &s in &[0.3, 0.9, 1.7, 2.5] {
            assert_eq!(g.eval(-s), g.eval(s));
        }
        // Plancherel: banded piece has no more L^2 mass than F
        assert!(g.l2_norm() <= f.l2_norm() * (1.0 + 1e-9));
    }

    #[test]
    fn localization_nyquist_guard() {
        let f = MultiplierSpec::bump(1.0, 0.4).unwrap();
        assert!(fourier_localize(&f, 10).is_err());
        assert!(fourier_localize(&f, 9).is_ok());
    }

    #[test]
    fn truncated_multiplier_support() {
        let f = MultiplierSpec::bump(1.0, 0.5).unwrap();
        let t = TruncatedMultiplier::new(f, 2).unwrap();
        // chi_2 lives on [k] in (2, 8)
        assert_eq!(t.bracket_weight(0, 1), 0.0); // [0] = 1
        assert!(t.bracket_weight(1, 1) > 0.0); // [1] = 3
        assert!(t.bracket_weight(2, 1) > 0.0); // [2] = 5
        assert_eq!(t.bracket_weight(4, 1), 0.0); // [4] = 9
        let f2 = MultiplierSpec::bump(1.0, 0.5).unwrap();
        assert!(TruncatedMultiplier::new(f2, -2).is_err());
    }
}
