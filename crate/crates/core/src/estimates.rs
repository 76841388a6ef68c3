//! Scaling experiments over dyadic band truncations: weighted kernel norms,
//! L^1 -> L^2 restriction constants, randomized lower bounds, essential
//! support profiles, and finite-propagation checks, each packaged as a scan
//! with an ordinary-least-squares slope in log2 coordinates.
//!
//! Everything that admits a spectral reduction is computed on the spectral
//! side: the central Fourier transform turns group integrals of the kernel
//! into one-dimensional integrals over the central frequency magnitude rho,
//! weighted by cross-Gram matrices of Laguerre polynomials.  Scans therefore
//! run at any center dimension without allocating a spatial grid; only the
//! randomized lower bound and the propagation check work on sampled grid
//! functions.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::apply_multiplier;
use crate::error::{Error, Result};
use crate::exec::{self, Mode};
use crate::grid::{GroupGrid, GroupGridFunction};
use crate::group::{CentralFrequency, HTypeGroup, Point};
use crate::multiplier::{
    dyadic_bump, fourier_localize, psi_window, MultiplierSpec, SpectralCoefficients,
    TruncatedMultiplier,
};
use crate::quad::{self, GaussLegendre};
use crate::specfun;

/// Unit window in s = sqrt(lambda) that profiles handed to the scans must
/// live in; wider profiles are rescaled by the caller (dyadic scaling is
/// exactly what the truncation index expresses).
pub const UNIT_WINDOW: (f64, f64) = (0.125, 8.0);

/// Widest Laguerre index window a cross-Gram computation will accept.
const GRAM_BAND_CAP: usize = 512;

/// Widest index window for diagonal-only spectral sums.
const DIAG_BAND_CAP: usize = 4096;

// ---------------------------------------------------------------------------
// scan reports
// ---------------------------------------------------------------------------

/// Outcome of a scaling scan: measured values against an independent
/// variable, an OLS fit of log2(value) when the data supports one, and the
/// run's identifying metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    /// Name of the independent variable ("ell", "c", ...).
    pub variable: String,
    pub variable_values: Vec<f64>,
    /// Measured values, in the same order as `variable_values`.
    pub values: Vec<f64>,
    /// OLS slope of log2(value) against the variable; present only when the
    /// scan has at least four points, all values positive and finite, and
    /// the variable is not constant.
    #[serde(default)]
    pub slope: Option<f64>,
    #[serde(default)]
    pub intercept: Option<f64>,
    /// Largest |log2(value) - fitted line| over the scan points.
    #[serde(default)]
    pub residual_max: Option<f64>,
    /// True when every measured value is zero, so no fit is meaningful.
    pub degenerate: bool,
    pub group_name: String,
    pub multiplier_label: String,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub p: Option<f64>,
}

impl ScanReport {
    /// Builds a report from raw scan data, fitting log2(value) against the
    /// variable when the data supports it.
    pub fn assemble(
        variable: impl Into<String>,
        variable_values: Vec<f64>,
        values: Vec<f64>,
        group_name: impl Into<String>,
        multiplier_label: impl Into<String>,
        alpha: Option<f64>,
        p: Option<f64>,
    ) -> Self {
        let degenerate = !values.is_empty() && values.iter().all(|&v| v == 0.0);
        let fit = ols_log2(&variable_values, &values);
        ScanReport {
            variable: variable.into(),
            variable_values,
            values,
            slope: fit.map(|f| f.0),
            intercept: fit.map(|f| f.1),
            residual_max: fit.map(|f| f.2),
            degenerate,
            group_name: group_name.into(),
            multiplier_label: multiplier_label.into(),
            alpha,
            p,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// CSV rendering (CRLF line endings): one row per scan point with the
    /// variable, the value, and log2(value) (empty for nonpositive values).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("variable,value,log2value\r\n");
        for (x, v) in self.variable_values.iter().zip(&self.values) {
            if *v > 0.0 {
                out.push_str(&format!("{x},{v},{}\r\n", v.log2()));
            } else {
                out.push_str(&format!("{x},{v},\r\n"));
            }
        }
        out
    }

    /// Two-column "variable log2value" text block for plotting tools.
    pub fn to_plot_columns(&self) -> String {
        let mut out = String::new();
        for (x, v) in self.variable_values.iter().zip(&self.values) {
            if *v > 0.0 {
                out.push_str(&format!("{x} {}\n", v.log2()));
            }
        }
        out
    }
}

/// OLS fit of log2(values) on xs: (slope, intercept, max residual).
/// Requires at least four points, positive finite values, and a
/// non-constant variable.
fn ols_log2(xs: &[f64], values: &[f64]) -> Option<(f64, f64, f64)> {
    if xs.len() != values.len() || xs.len() < 4 {
        return None;
    }
    if !values.iter().all(|&v| v > 0.0 && v.is_finite()) {
        return None;
    }
    let n = xs.len() as f64;
    let ys: Vec<f64> = values.iter().map(|v| v.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_max = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0, f64::max);
    Some((slope, intercept, residual_max))
}

// ---------------------------------------------------------------------------
// spectral-side building blocks
// ---------------------------------------------------------------------------

fn check_unit_window(f: &MultiplierSpec) -> Result<()> {
    let (a, b) = f.support();
    if a < UNIT_WINDOW.0 - 1e-12 || b > UNIT_WINDOW.1 + 1e-12 {
        return Err(Error::domain(format!(
            "profile '{}' with support [{a}, {b}] must live in the unit window [{}, {}]; \
             rescale it (the truncation index carries the dyadic scale)",
            f.label(),
            UNIT_WINDOW.0,
            UNIT_WINDOW.1
        )));
    }
    Ok(())
}

/// Inclusive window of Laguerre indices k whose truncation weight
/// chi_ell(2k + n) is nonzero, i.e. 2^{ell-1} < 2k + n < 2^{ell+1}.
fn truncation_window(ell: i32, n: usize) -> Option<(usize, usize)> {
    let lo = (ell as f64 - 1.0).exp2();
    let hi = (ell as f64 + 1.0).exp2();
    let k_lo = (((lo - n as f64) / 2.0).floor() as i64 + 1).max(0);
    let k_hi = ((hi - n as f64) / 2.0).ceil() as i64 - 1;
    if k_hi < k_lo {
        return None;
    }
    let mut a = k_lo as usize;
    let mut b = k_hi as usize;
    while a <= b && dyadic_bump(ell, (2 * a + n) as f64) == 0.0 {
        a += 1;
    }
    while b > a && dyadic_bump(ell, (2 * b + n) as f64) == 0.0 {
        b -= 1;
    }
    if a > b || dyadic_bump(ell, (2 * a + n) as f64) == 0.0 {
        None
    } else {
        Some((a, b))
    }
}

fn empty_band_error(ell: i32, n: usize) -> Error {
    Error::domain(format!(
        "no Laguerre band satisfies 2^{} < 2k + {n} < 2^{}: the truncation at \
         scale index {ell} vanishes on every joint eigenvalue",
        ell - 1,
        ell + 1
    ))
}

/// Geometric prefactor of the radially reduced squared kernel norm:
/// (2 pi)^{-(2n + d2)} |S^{d2-1}| |S^{2n-1}|.
fn radial_reduction_constant(n: usize, d2: usize) -> f64 {
    (2.0 * std::f64::consts::PI).powi(-((2 * n + d2) as i32))
        * quad::sphere_measure(d2)
        * quad::sphere_measure(2 * n)
}

/// Upper integration limit for weighted Laguerre products of index <= k_hi:
/// past the oscillatory region 4(k_hi + n), the exponential weight has
/// decayed far below any polynomial weight t^a with a <= n + 3.
fn gram_t_upper(k_hi: usize, n: usize) -> f64 {
    4.0 * (k_hi + n) as f64 + 32.0 * ((k_hi + 1) as f64).sqrt() + 80.0
}

/// Composite Gauss–Legendre with panel doubling.  The stopping test is
/// relative to the integral itself, with an escape hatch for heavily
/// cancelling integrands judged against their absolute-value mass (the
/// result then only matters at the scale of the non-cancelling terms it is
/// summed with).
fn integrate_relative<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel: f64,
    max_panels: usize,
) -> Result<f64> {
    let base = GaussLegendre::new(16);
    let eval = |panels: usize| -> (f64, f64) {
        let step = (b - a) / panels as f64;
        let mut vals = Vec::with_capacity(panels);
        let mut mags = Vec::with_capacity(panels);
        for p in 0..panels {
            let (nodes, weights) = base.mapped(a + step * p as f64, a + step * (p + 1) as f64);
            let mut v = 0.0;
            let mut m = 0.0;
            for (x, w) in nodes.iter().zip(&weights) {
                let y = f(*x);
                v += w * y;
                m += w * y.abs();
            }
            vals.push(v);
            mags.push(m);
        }
        (exec::pairwise_sum(&vals), exec::pairwise_sum(&mags))
    };
    let mut panels = 1;
    let (mut prev, _) = eval(panels);
    loop {
        panels *= 2;
        let (cur, mag) = eval(panels);
        if (cur - prev).abs() <= rel * cur.abs().max(1e-6 * mag) {
            return Ok(cur);
        }
        if panels >= max_panels {
            return Err(Error::Accuracy {
                message: format!(
                    "band integral over [{a:.6e}, {b:.6e}] did not stabilize at {panels} panels"
                ),
                estimate: cur,
            });
        }
        prev = cur;
    }
}

/// rho-interval on which both bands k and kp of `spec` are live
/// (2k + n and 2kp + n both map the support of the profile onto rho).
fn band_overlap(s_support: (f64, f64), n: usize, k: usize, kp: usize) -> Option<(f64, f64)> {
    let (sa, sb) = s_support;
    let (la, lb) = (sa * sa, sb * sb);
    let bk = (2 * k + n) as f64;
    let bkp = (2 * kp + n) as f64;
    let lo = (la / bk).max(la / bkp);
    let hi = (lb / bk).min(lb / bkp);
    if hi > lo {
        Some((lo, hi))
    } else {
        None
    }
}

/// Integral of rho^pow c_k(rho) c_kp(rho) over the joint live interval.
///
/// Integrated in the variable s = sqrt((2k + n) rho) rather than rho
/// itself: a profile oscillating uniformly in s (the natural variable of
/// the spectral parameter) is compressed near rho = 0 under the rho
/// parametrization, and uniform panels would need to chase the compressed
/// cycles.  In s the cycle density is constant and panel doubling
/// converges at the profile's own cycle count.
fn band_pair_integral(
    spec: &(impl SpectralCoefficients + ?Sized),
    n: usize,
    k: usize,
    kp: usize,
    pow: f64,
) -> Result<f64> {
    let Some((lo, hi)) = band_overlap(spec.s_support(), n, k, kp) else {
        return Ok(0.0);
    };
    let bk = (2 * k + n) as f64;
    let (s_lo, s_hi) = ((bk * lo).sqrt(), (bk * hi).sqrt());
    integrate_relative(
        |s| {
            let rho = s * s / bk;
            rho.powf(pow)
                * spec.coefficient(k, n, rho)
                * spec.coefficient(kp, n, rho)
                * (2.0 * s / bk)
        },
        s_lo,
        s_hi,
        1e-11,
        1 << 10,
    )
}

/// Cross-Gram matrix of Laguerre polynomials of order n - 1 against the
/// weight t^{alpha + n - 1} e^{-t}, for indices k_lo..=k_hi: entry (i, j)
/// is the integral for the pair (k_lo + i, k_lo + j).  Computed with
/// composite Gauss–Legendre panels doubled until the matrix stabilizes.
fn laguerre_cross_matrix(
    k_lo: usize,
    k_hi: usize,
    n: usize,
    alpha: f64,
) -> Result<Vec<Vec<f64>>> {
    let w = k_hi - k_lo + 1;
    let t_max = gram_t_upper(k_hi, n);
    let nu = n as f64 - 1.0;
    let weight_pow = alpha + n as f64 - 1.0;
    let gl = GaussLegendre::new(32);
    let eval = |panels: usize| -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; w]; w];
        let step = t_max / panels as f64;
        for p in 0..panels {
            let (nodes, weights) = gl.mapped(step * p as f64, step * (p + 1) as f64);
            for (t, wq) in nodes.iter().zip(&weights) {
                // the e^{-t/2}-weighted sequence keeps every product of two
                // entries at the scale of the e^{-t}-weighted integrand
                let seq = specfun::laguerre_weighted_sequence(k_hi, nu, *t);
                let amp = wq * t.powf(weight_pow);
                for i in 0..w {
                    let a = amp * seq[k_lo + i];
                    for (j, mj) in m[i].iter_mut().enumerate().skip(i) {
                        *mj += a * seq[k_lo + j];
                    }
                }
            }
        }
        for i in 0..w {
            for j in 0..i {
                m[i][j] = m[j][i];
            }
        }
        m
    };
    let mut panels = (k_hi / 2).max(8);
    let mut prev = eval(panels);
    loop {
        panels *= 2;
        let cur = eval(panels);
        let mut diff: f64 = 0.0;
        let mut scale: f64 = f64::MIN_POSITIVE;
        for i in 0..w {
            for j in 0..w {
                diff = diff.max((cur[i][j] - prev[i][j]).abs());
                scale = scale.max(cur[i][j].abs());
            }
        }
        if diff <= 1e-11 * scale {
            return Ok(cur);
        }
        if panels >= 4096 {
            return Err(Error::Accuracy {
                message: format!(
                    "Laguerre cross-Gram matrix for indices {k_lo}..={k_hi} did not \
                     stabilize at {panels} panels"
                ),
                estimate: scale,
            });
        }
        prev = cur;
    }
}

// ---------------------------------------------------------------------------
// weighted Plancherel scans
// ---------------------------------------------------------------------------

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=4.0).contains(&alpha) {
        return Err(Error::domain(format!(
            "weight exponent alpha = {alpha} outside the supported range [0, 4]"
        )));
    }
    Ok(())
}

/// Squared L^2 norm of |x|^alpha K_ell over the group, where K_ell is the
/// convolution kernel of the band truncation of `f` at scale index `ell`.
///
/// Computed entirely on the spectral side: the central Plancherel identity
/// and the substitution t = rho r^2 / 2 reduce the weighted group integral
/// to the Laguerre cross-Gram matrix (weight t^{alpha+n-1} e^{-t}) paired
/// with one-dimensional band integrals in rho.  Cross terms k != k' are
/// essential for alpha > 0, where the weight breaks Laguerre orthogonality.
pub fn weighted_kernel_norm_sq(
    f: &MultiplierSpec,
    group: &HTypeGroup,
    alpha: f64,
    ell: i32,
) -> Result<f64> {
    check_unit_window(f)?;
    check_alpha(alpha)?;
    let n = group.n();
    let d2 = group.d2();
    let trunc = TruncatedMultiplier::new(f.clone(), ell)?;
    let (k_lo, k_hi) = truncation_window(ell, n).ok_or_else(|| empty_band_error(ell, n))?;
    let w = k_hi - k_lo + 1;
    if w > GRAM_BAND_CAP {
        return Err(Error::budget(format!(
            "scale index {ell} spans {w} Laguerre bands; the cross-Gram budget is {GRAM_BAND_CAP}"
        )));
    }
    let gram = laguerre_cross_matrix(k_lo, k_hi, n, alpha)?;
    let gram_scale = gram
        .iter()
        .flatten()
        .fold(f64::MIN_POSITIVE, |a, v| a.max(v.abs()));
    let pow = (n + d2) as f64 - 1.0 - alpha;
    let mut terms = Vec::new();
    for i in 0..w {
        for j in i..w {
            let g = gram[i][j];
            if g.abs() <= 1e-14 * gram_scale {
                continue;
            }
            let ii = band_pair_integral(&trunc, n, k_lo + i, k_lo + j, pow)?;
            if ii == 0.0 {
                continue;
            }
            let term = g * ii;
            terms.push(if i == j { term } else { 2.0 * term });
        }
    }
    let value = radial_reduction_constant(n, d2)
        * (alpha + n as f64 - 1.0).exp2()
        * exec::pairwise_sum(&terms);
    Ok(value.max(0.0))
}

/// Scans ||  |x|^alpha K_ell ||_2 over a range of scale indices and fits the
/// slope of its log2 against ell.
pub fn weighted_plancherel_scan(
    f: &MultiplierSpec,
    group: &HTypeGroup,
    alpha: f64,
    ells: RangeInclusive<i32>,
    mode: Mode,
) -> Result<ScanReport> {
    let ell_list: Vec<i32> = ells.collect();
    if ell_list.is_empty() {
        return Err(Error::domain("empty scale range"));
    }
    let results = exec::map_indexed(ell_list.len(), mode, |i| {
        weighted_kernel_norm_sq(f, group, alpha, ell_list[i]).map(f64::sqrt)
    });
    let mut values = Vec::with_capacity(results.len());
    for r in results {
        values.push(r?);
    }
    Ok(ScanReport::assemble(
        "ell",
        ell_list.iter().map(|&e| e as f64).collect(),
        values,
        group.name(),
        f.label(),
        Some(alpha),
        None,
    ))
}

/// Band-diagonal upper bound for `weighted_kernel_norm_sq`: the spatial
/// weight |x|^{2 alpha} is dominated by the matching power of the rescaled
/// harmonic oscillator, which acts on the joint eigenspace (k, mu) by the
/// scalar (2k + n)^alpha |mu|^{-alpha}.  That substitution removes the
/// Laguerre cross terms entirely, leaving a diagonal sum that agrees with
/// the squared p = 1 restriction constant at alpha = 0 and is computable
/// with the same one-dimensional band integrals.
///
/// The bound controls the exact weighted norm up to a constant depending
/// only on alpha and the group, and its diagonal structure makes the
/// dyadic growth 2^{ell (2 alpha - d2)} sharp for every profile.  The
/// exact norm attains the same growth on profiles whose band coefficients
/// decorrelate across neighboring k (oscillation faster than the band
/// spacing), while smooth slowly varying profiles cancel the cross terms
/// and decay strictly faster for alpha > 0.
pub fn weighted_dominating_norm_sq(
    f: &MultiplierSpec,
    group: &HTypeGroup,
    alpha: f64,
    ell: i32,
) -> Result<f64> {
    check_unit_window(f)?;
    check_alpha(alpha)?;
    let n = group.n();
    let d2 = group.d2();
    let trunc = TruncatedMultiplier::new(f.clone(), ell)?;
    let (k_lo, k_hi) = truncation_window(ell, n).ok_or_else(|| empty_band_error(ell, n))?;
    if k_hi - k_lo + 1 > DIAG_BAND_CAP {
        return Err(Error::budget(format!(
            "scale index {ell} spans {} Laguerre bands; the budget is {DIAG_BAND_CAP}",
            k_hi - k_lo + 1
        )));
    }
    let pow = (n + d2) as f64 - 1.0 - alpha;
    let mut terms = Vec::with_capacity(k_hi - k_lo + 1);
    for k in k_lo..=k_hi {
        let ii = band_pair_integral(&trunc, n, k, k, pow)?;
        terms.push(((2 * k + n) as f64).powf(alpha) * specfun::binomial(k + n - 1, k) * ii);
    }
    let sq = (2.0 * std::f64::consts::PI).powi(-((n + d2) as i32))
        * quad::sphere_measure(d2)
        * exec::pairwise_sum(&terms);
    Ok(sq.max(0.0))
}

/// Scans the square root of `weighted_dominating_norm_sq` over scale
/// indices and fits the slope of its log2 against ell.
pub fn weighted_dominating_scan(
    f: &MultiplierSpec,
    group: &HTypeGroup,
    alpha: f64,
    ells: RangeInclusive<i32>,
    mode: Mode,
) -> Result<ScanReport> {
    let ell_list: Vec<i32> = ells.collect();
    if ell_list.is_empty() {
        return Err(Error::domain("empty scale range"));
    }
    let results = exec::map_indexed(ell_list.len(), mode, |i| {
        weighted_dominating_norm_sq(f, group, alpha, ell_list[i]).map(f64::sqrt)
    });
    let mut values = Vec::with_capacity(results.len());
    for r in results {
        values.push(r?);
    }
    Ok(ScanReport::assemble(
        "ell",
        ell_list.iter().map(|&e| e as f64).collect(),
        values,
        group.name(),
        f.label(),
        Some(alpha),
        None,
    ))
}

/// L^2 norm of max(|x|, 1)^alpha K_ell, by direct nested quadrature over
/// (rho, r).  The clamp breaks the Gram factorization, so this route shares
/// no machinery with `weighted_kernel_norm_sq`; it exists as a cross-check
/// (at alpha = 0 the two agree) and because the clamped weight is pointwise
/// monotone in alpha, which the unclamped power weight is not below |x| = 1.
pub fn clamped_weighted_norm(
    f: &MultiplierSpec,
    group: &HTypeGroup,
    alpha: f64,
    ell: i32,
) -> Result<f64> {
    check_unit_window(f)?;
    check_alpha(alpha)?;
    let n = group.n();
    let d2 = group.d2();
    let trunc = TruncatedMultiplier::new(f.clone(), ell)?;
    let (k_lo, k_hi) = truncation_window(ell, n).ok_or_else(|| empty_band_error(ell, n))?;
    if k_hi - k_lo + 1 > 64 {
        return Err(Error::budget(format!(
            "scale index {ell} spans {} bands; the nested-quadrature budget is 64",
            k_hi - k_lo + 1
        )));
    }
    let (sa, sb) = f.support();
    let rho_lo = sa * sa / (2 * k_hi + n) as f64;
    let rho_hi = sb * sb / (2 * k_lo + n) as f64;
    let t_max = gram_t_upper(k_hi, n);
    let radial_pow = (2 * n - 1) as i32;
    let value = integrate_relative(
        |rho| {
            let cs: Vec<f64> = (k_lo..=k_hi)
                .map(|k| trunc.coefficient(k, n, rho))
                .collect();
            if cs.iter().all(|&c| c == 0.0) {
                return 0.0;
            }
            let profile_sq = |r: f64| -> f64 {
                let phis = specfun::laguerre_fn_radial_sequence(k_hi, n, rho, r);
                let s: f64 = cs.iter().zip(&phis[k_lo..]).map(|(c, p)| c * p).sum();
                s * s
            };
            let r_end = (2.0 * t_max / rho).sqrt().max(1.5);
            // weight is exactly 1 below r = 1 and r^{2 alpha} beyond
            let head = integrate_relative(
                |r| r.powi(radial_pow) * profile_sq(r),
                0.0,
                1.0,
                1e-8,
                128,
            )
            .unwrap_or(0.0);
            let tail = integrate_relative(
                |r| r.powi(radial_pow) * r.powf(2.0 * alpha) * profile_sq(r),
                1.0,
                r_end,
                1e-8,
                256,
            )
            .unwrap_or(0.0);
            rho.powi(d2 as i32 - 1) * (head + tail)
        },
        rho_lo,
        rho_hi,
        1e-8,
        256,
    )?;
    Ok((radial_reduction_constant(n, d2) * value).max(0.0).sqrt())
}

// ---------------------------------------------------------------------------
// restriction constants at p = 1
// ---------------------------------------------------------------------------

/// Exact L^1 -> L^2 operator norm of the band truncation at scale index
/// ell: the L^2 norm of its convolution kernel, via the spectral norm
/// identity (diagonal Laguerre terms only; no spatial grid).
pub fn restriction_norm_p1(f: &MultiplierSpec, group: &HTypeGroup, ell: i32) -> Result<f64> {
    check_unit_window(f)?;
    let n = group.n();
    let d2 = group.d2();
    let trunc = TruncatedMultiplier::new(f.clone(), ell)?;
    let (k_lo, k_hi) = truncation_window(ell, n).ok_or_else(|| empty_band_error(ell, n))?;
    if k_hi - k_lo + 1 > DIAG_BAND_CAP {
        return Err(Error::budget(format!(
            "scale index {ell} spans {} Laguerre bands; the budget is {DIAG_BAND_CAP}",
            k_hi - k_lo + 1
        )));
    }
    let pow = (n + d2 - 1) as f64;
    let mut terms = Vec::with_capacity(k_hi - k_lo + 1);
    for k in k_lo..=k_hi {
        let ii = band_pair_integral(&trunc, n, k, k, pow)?;
        terms.push(specfun::binomial(k + n - 1, k) * ii);
    }
    let sq = (2.0 * std::f64::consts::PI).powi(-((n + d2) as i32))
        * quad::sphere_measure(d2)
        * exec::pairwise_sum(&terms);
    Ok(sq.max(0.0).sqrt())
}

/// Scans the p = 1 restriction constant over scale indices.
pub fn restriction_scan(
    f: &MultiplierSpec,
    group: &HTypeGroup,
    ells: RangeInclusive<i32>,
    mode: Mode,
) -> Result<ScanReport> {
    let ell_list: Vec<i32> = ells.collect();
    if ell_list.is_empty() {
        return Err(Error::domain("empty scale range"));
    }
    let results = exec::map_indexed(ell_list.len(), mode, |i| {
        restriction_norm_p1(f, group, ell_list[i])
    });
    let mut values = Vec::with_capacity(results.len());
    for r in results {
        values.push(r?);
    }
    Ok(ScanReport::assemble(
        "ell",
        ell_list.iter().map(|&e| e as f64).collect(),
        values,
        group.name(),
        f.label(),
        None,
        Some(1.0),
    ))
}

// ---------------------------------------------------------------------------
// discrete restriction: a single joint eigenspace
// ---------------------------------------------------------------------------

/// L^1 -> L^2 constant of the projection onto a single joint eigenspace
/// (Laguerre index k, central frequency mu): the L^2(R^{2n}) norm of the
/// matrix-trace function of the projection, which has the closed form
/// sqrt((2 pi)^n |mu|^n binom(k + n - 1, k)).  The closed form is
/// cross-checked internally by radial quadrature to a relative 1e-8.
pub fn discrete_restriction_p1(
    group: &HTypeGroup,
    k: usize,
    mu: &CentralFrequency,
) -> Result<f64> {
    if mu.components().len() != group.d2() {
        return Err(Error::structural(format!(
            "central frequency has {} components; the group center has dimension {}",
            mu.components().len(),
            group.d2()
        )));
    }
    if k > 50 {
        return Err(Error::domain(format!(
            "eigenspace index k = {k} above the verified range k <= 50"
        )));
    }
    let n = group.n();
    let rho = mu.norm();
    let closed = specfun::laguerre_fn_norm_sq(k, n, rho);
    let r_end = (2.0 * gram_t_upper(k, n) / rho).sqrt();
    let radial = quad::integrate_adaptive(
        |r| {
            let phi = specfun::laguerre_fn_radial(k, n, rho, r);
            r.powi((2 * n - 1) as i32) * phi * phi
        },
        0.0,
        r_end,
        1e-12,
        1 << 12,
    )?;
    let measured = quad::sphere_measure(2 * n) * radial;
    let rel = (measured - closed).abs() / closed;
    if rel > 1e-8 {
        return Err(Error::Accuracy {
            message: format!(
                "radial quadrature disagrees with the closed eigenspace norm by {rel:.3e}"
            ),
            estimate: closed.sqrt(),
        });
    }
    Ok(closed.sqrt())
}

/// Ratio of the discrete restriction constant to the dimensional shape
/// |mu|^{n/2} (2k + n)^{(n-1)/2}; bounded uniformly in k and mu.
pub fn discrete_restriction_shape_ratio(
    group: &HTypeGroup,
    k: usize,
    mu: &CentralFrequency,
) -> Result<f64> {
    let value = discrete_restriction_p1(group, k, mu)?;
    let n = group.n();
    let shape = mu.norm().powf(n as f64 / 2.0)
        * ((2 * k + n) as f64).powf((n as f64 - 1.0) / 2.0);
    Ok(value / shape)
}

// ---------------------------------------------------------------------------
// randomized restriction lower bounds
// ---------------------------------------------------------------------------

/// Largest admissible exponent 2(d2 + 1)/(d2 + 3) for the restriction
/// estimate on a group with center dimension d2.
pub fn restriction_p_limit(d2: usize) -> f64 {
    2.0 * (d2 as f64 + 1.0) / (d2 as f64 + 3.0)
}

/// Outcome of a randomized search for the operator norm from below.
#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundReport {
    /// Best ratio ||F_ell(L, U) f||_2 / ||f||_p found.
    pub value: f64,
    pub p: f64,
    pub ell: i32,
    pub trials: usize,
    /// Index of the trial achieving `value`.
    pub best_trial: usize,
    /// True when p was outside the admissible range and sampling was forced.
    pub out_of_range: bool,
    pub warnings: Vec<String>,
}

/// L^p norm of a grid function under the grid quadrature weights.
pub fn lp_norm(f: &GroupGridFunction, p: f64) -> f64 {
    let ct = f.grid.central_total();
    let cell = f.grid.central_cell();
    let terms: Vec<f64> = (0..f.values.len())
        .map(|flat| {
            let w = f.grid.spatial().quad_weight(flat / ct) * cell;
            w * f.values[flat].norm().powf(p)
        })
        .collect();
    exec::pairwise_sum(&terms).powf(1.0 / p)
}

/// Searches for the L^p -> L^2 operator norm of the band truncation from
/// below by maximizing the output/input norm ratio over seeded random
/// Gaussian wave packets whose central carrier sits inside the live
/// frequency band of the truncation.  The result is always a valid lower
/// bound; more trials only improve it.
///
/// Exponents above 2(d2 + 1)/(d2 + 3) are rejected unless
/// `allow_out_of_range` is set, in which case the run proceeds and the
/// report carries a warning.
#[allow(clippy::too_many_arguments)]
pub fn restriction_lower_bound(
    f: &MultiplierSpec,
    group: &HTypeGroup,
    grid: &GroupGrid,
    ell: i32,
    p: f64,
    trials: usize,
    seed: u64,
    allow_out_of_range: bool,
    mode: Mode,
) -> Result<LowerBoundReport> {
    check_unit_window(f)?;
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    if grid.spatial().d1() != group.d1() || grid.d2() != group.d2() {
        return Err(Error::structural(format!(
            "grid is {}+{} dimensional; the group is {}+{}",
            grid.spatial().d1(),
            grid.d2(),
            group.d1(),
            group.d2()
        )));
    }
    if p < 1.0 {
        return Err(Error::domain(format!("p = {p} is below 1")));
    }
    let limit = restriction_p_limit(group.d2());
    let out_of_range = p > limit + 1e-12;
    let mut warnings = Vec::new();
    if out_of_range {
        if !allow_out_of_range {
            return Err(Error::domain(format!(
                "p = {p} exceeds the admissible ceiling 2(d2+1)/(d2+3) = {limit:.6}; \
                 set allow_out_of_range to sample anyway"
            )));
        }
        warnings.push(format!(
            "p = {p} above the admissible ceiling {limit:.6}; sampled anyway"
        ));
    }
    let n = group.n();
    let trunc = TruncatedMultiplier::new(f.clone(), ell)?;
    let (k_lo, k_hi) = truncation_window(ell, n).ok_or_else(|| empty_band_error(ell, n))?;
    let (sa, sb) = f.support();
    let axis = grid.central();
    let nyquist = std::f64::consts::PI / axis.spacing();
    let rho_lo = sa * sa / (2 * k_hi + n) as f64;
    let rho_hi = (sb * sb / (2 * k_lo + n) as f64).min(0.8 * nyquist);
    if rho_hi <= rho_lo {
        return Err(Error::domain(format!(
            "central grid resolves frequencies only up to {:.3}, below the live band \
             starting at {rho_lo:.3}",
            0.8 * nyquist
        )));
    }
    let d1 = group.d1();
    let d2 = group.d2();
    let extent = grid.spatial().extent();
    let period = axis.period;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0_f64;
    let mut best_trial = 0usize;
    for trial in 0..trials {
        // random interior Gaussian packet with carriers aimed at the band
        let x0: Vec<f64> = (0..d1)
            .map(|_| rng.gen_range(-0.2 * extent..0.2 * extent))
            .collect();
        let u0: Vec<f64> = (0..d2)
            .map(|_| rng.gen_range(-period / 8.0..period / 8.0))
            .collect();
        let sx = rng.gen_range(extent / 10.0..extent / 5.0);
        let su = rng.gen_range(period / 16.0..period / 10.0);
        let xi: Vec<f64> = (0..d1).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let mut dir: Vec<f64>;
        loop {
            dir = (0..d2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.1 && norm <= 1.0 {
                for v in &mut dir {
                    *v /= norm;
                }
                break;
            }
        }
        let span = rho_hi - rho_lo;
        let mag = rng.gen_range(rho_lo + 0.15 * span..rho_hi - 0.15 * span);
        let theta: Vec<f64> = dir.iter().map(|v| v * mag).collect();
        let packet = GroupGridFunction::sample(grid.clone(), mode, |x, u| {
            let mut quad_form = 0.0;
            let mut phase = 0.0;
            for i in 0..d1 {
                let dx = x[i] - x0[i];
                quad_form += dx * dx / (2.0 * sx * sx);
                phase += xi[i] * dx;
            }
            for i in 0..d2 {
                let du = u[i] - u0[i];
                quad_form += du * du / (2.0 * su * su);
                phase += theta[i] * du;
            }
            Complex64::from_polar((-quad_form).exp(), phase)
        });
        let denom = lp_norm(&packet, p);
        if denom == 0.0 {
            continue;
        }
        let out = apply_multiplier(&trunc, &packet, group, mode)?;
        warnings.extend(out.warnings.iter().cloned());
        let ratio = out.norm() / denom;
        if ratio > best {
            best = ratio;
            best_trial = trial;
        }
    }
    Ok(LowerBoundReport {
        value: best,
        p,
        ell,
        trials,
        best_trial,
        out_of_range,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// essential support of the frequency-localized kernel
// ---------------------------------------------------------------------------

/// Squared-mass tails of the kernel beyond spatial radii `radii`, plus the
/// total squared mass: entry j is the integral of |K|^2 over |x| > radii[j]
/// (all central variables).  The tail of the r-integral maps to an
/// incomplete Laguerre Gram integral from t_c = rho r_c^2 / 2; the rho
/// resolution is calibrated once on the total mass (a positive quantity)
/// and reused for every radius, so the reported fractions are ratios of
/// consistently discretized integrals.
fn tail_masses(
    spec: &(impl SpectralCoefficients + ?Sized),
    n: usize,
    d2: usize,
    window: (usize, usize),
    radii: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let (k_lo, k_hi) = window;
    let nu = n as f64 - 1.0;
    let pow = (n + d2 - 1) as f64;
    let t_bulk = gram_t_upper(k_hi, n);
    let inner = GaussLegendre::new(32);
    let base = GaussLegendre::new(16);
    // incomplete Gram integral of the pair (k, kp) from t_c on, on uniform
    // sub-panels so the e^{-t} decay stays resolved across the whole range
    let incomplete_gram = |k: usize, kp: usize, t_c: f64| -> f64 {
        let t_end = t_bulk.max(t_c) + 80.0;
        let m = 12usize;
        let step = (t_end - t_c) / m as f64;
        let mut acc = 0.0;
        for p in 0..m {
            acc += inner.integrate(t_c + step * p as f64, t_c + step * (p + 1) as f64, |t| {
                let seq = specfun::laguerre_weighted_sequence(kp, nu, t);
                t.powf(nu) * seq[k] * seq[kp]
            });
        }
        acc
    };
    let pairs: Vec<(usize, usize, f64, f64)> = (k_lo..=k_hi)
        .flat_map(|k| (k..=k_hi).map(move |kp| (k, kp)))
        .filter_map(|(k, kp)| {
            band_overlap(spec.s_support(), n, k, kp).map(|(lo, hi)| (k, kp, lo, hi))
        })
        .collect();
    // rho-panels are placed uniformly in s = sqrt((2k + n) rho), where the
    // profile's oscillation has constant cycle density (see
    // band_pair_integral)
    let eval = |panels: usize, r_c: f64| -> f64 {
        let mut terms = Vec::with_capacity(pairs.len());
        for &(k, kp, lo, hi) in &pairs {
            let bk = (2 * k + n) as f64;
            let (s_lo, s_hi) = ((bk * lo).sqrt(), (bk * hi).sqrt());
            let step = (s_hi - s_lo) / panels as f64;
            let mut vals = Vec::with_capacity(panels);
            for pidx in 0..panels {
                let (nodes, weights) =
                    base.mapped(s_lo + step * pidx as f64, s_lo + step * (pidx + 1) as f64);
                let mut acc = 0.0;
                for (s, wq) in nodes.iter().zip(&weights) {
                    let rho = s * s / bk;
                    let c2 = spec.coefficient(k, n, rho) * spec.coefficient(kp, n, rho);
                    if c2 == 0.0 {
                        continue;
                    }
                    let t_c = rho * r_c * r_c / 2.0;
                    let gram = incomplete_gram(k, kp, t_c);
                    acc += wq * rho.powf(pow) * c2 * gram * (2.0 * s / bk);
                }
                vals.push(acc);
            }
            let v = exec::pairwise_sum(&vals);
            terms.push(if k == kp { v } else { 2.0 * v });
        }
        exec::pairwise_sum(&terms)
    };
    // calibrate the rho resolution on the total mass
    let mut panels = 4usize;
    let mut total = eval(panels, 0.0);
    loop {
        let next = eval(panels * 2, 0.0);
        if (next - total).abs() <= 1e-9 * next.abs().max(f64::MIN_POSITIVE) {
            total = next;
            panels *= 2;
            break;
        }
        panels *= 2;
        total = next;
        if panels >= 256 {
            return Err(Error::Accuracy {
                message: format!("kernel mass did not stabilize at {panels} rho panels"),
                estimate: total,
            });
        }
    }
    let constant = radial_reduction_constant(n, d2) * (n as f64 - 1.0).exp2();
    let tails: Vec<f64> = radii
        .iter()
        .map(|&r_c| (constant * eval(panels, r_c)).max(0.0))
        .collect();
    Ok(((constant * total).max(0.0), tails))
}

/// Fraction of the squared mass of the frequency-localized, band-truncated
/// kernel lying at spatial radius |x| > c 2^ell, for each cutoff c.
///
/// The profile is first band-limited to the dyadic frequency band iota
/// (convolution of its transform with the band window), then restricted to
/// the unit spectral window; the scan covers the localized regime
/// ell <= iota, where the kernel concentrates at radius ~ 2^ell.  The total
/// mass is cross-checked against the diagonal norm identity before any
/// fraction is reported.
pub fn essential_support_scan(
    f: &MultiplierSpec,
    group: &HTypeGroup,
    iota: u32,
    ell: i32,
    c_values: &[f64],
) -> Result<ScanReport> {
    if c_values.is_empty() {
        return Err(Error::domain("no cutoff values supplied"));
    }
    if c_values.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::domain("cutoff values must be positive"));
    }
    if ell > iota as i32 {
        return Err(Error::domain(format!(
            "scale index ell = {ell} above the frequency band iota = {iota}: the scan \
             covers the localized regime ell <= iota"
        )));
    }
    let n = group.n();
    let d2 = group.d2();
    let localized = fourier_localize(f, iota)?;
    let piece = localized.windowed("psi", UNIT_WINDOW, psi_window);
    let trunc = TruncatedMultiplier::new(piece.clone(), ell)?;
    let window = truncation_window(ell, n).ok_or_else(|| empty_band_error(ell, n))?;
    if window.1 - window.0 + 1 > 256 {
        return Err(Error::budget(format!(
            "scale index {ell} spans {} bands; the essential-support budget is 256",
            window.1 - window.0 + 1
        )));
    }
    let radii: Vec<f64> = c_values.iter().map(|c| c * (ell as f64).exp2()).collect();
    let (total, tails) = tail_masses(&trunc, n, d2, window, &radii)?;
    let check = restriction_norm_p1(&piece, group, ell)?;
    let check_sq = check * check;
    if total == 0.0 && check_sq == 0.0 {
        return Ok(ScanReport::assemble(
            "c",
            c_values.to_vec(),
            vec![0.0; c_values.len()],
            group.name(),
            trunc.record_label(),
            None,
            None,
        ));
    }
    let rel = (total - check_sq).abs() / check_sq.max(f64::MIN_POSITIVE);
    if rel > 1e-6 {
        return Err(Error::Accuracy {
            message: format!(
                "pair-sum kernel mass disagrees with the diagonal norm identity by {rel:.3e}"
            ),
            estimate: total,
        });
    }
    let fractions: Vec<f64> = tails.iter().map(|t| (t / total).clamp(0.0, 1.0)).collect();
    Ok(ScanReport::assemble(
        "c",
        c_values.to_vec(),
        fractions,
        group.name(),
        trunc.record_label(),
        None,
        None,
    ))
}

// ---------------------------------------------------------------------------
// finite propagation speed
// ---------------------------------------------------------------------------

/// Outcome of a propagation check: energy fractions outside dilates of the
/// input's quasi-ball after wave evolution.
#[derive(Debug, Clone, Serialize)]
pub struct PropagationReport {
    pub t: f64,
    /// Radius (homogeneous norm) holding all but 1e-6 of the input mass.
    pub input_radius: f64,
    /// Upper edge of the low-pass band in s = sqrt(lambda), when filtered.
    pub band_limit_s: Option<f64>,
    pub kappas: Vec<f64>,
    /// For each kappa: fraction of output energy at homogeneous norm
    /// > kappa (input_radius + |t|), within the grid box.
    pub outside_fractions: Vec<f64>,
    /// Relative L^2 distance between the low-passed input and the input:
    /// the part of the propagation budget spent on the frequency cutoff.
    pub cutoff_leakage: f64,
    pub warnings: Vec<String>,
}

/// Smallest radius (homogeneous norm) such that grid points strictly
/// outside it carry at most `tail` of the squared mass of `f`.
pub fn quasi_ball_radius(f: &GroupGridFunction, group: &HTypeGroup, tail: f64) -> f64 {
    let ct = f.grid.central_total();
    let cell = f.grid.central_cell();
    let mut pts: Vec<(f64, f64)> = (0..f.values.len())
        .map(|flat| {
            let x = f.grid.spatial().point(flat / ct);
            let u = f.grid.central_point(flat % ct);
            let w = f.grid.spatial().quad_weight(flat / ct) * cell;
            (
                group.homogeneous_norm(&Point::new(x, u)),
                w * f.values[flat].norm_sqr(),
            )
        })
        .collect();
    let total: f64 = exec::pairwise_sum(&pts.iter().map(|p| p.1).collect::<Vec<_>>());
    if total <= 0.0 {
        return 0.0;
    }
    pts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let budget = tail * total;
    let mut acc = 0.0;
    for (r, m) in pts {
        acc += m;
        if acc > budget {
            return r;
        }
    }
    0.0
}

/// Smooth low-pass plateau in s = sqrt(lambda): identically 1 for
/// s <= 2^j, decaying to 0 at 2^{j+1}.
fn lowpass_window(j: i32) -> MultiplierSpec {
    let edge = (j as f64).exp2();
    MultiplierSpec::from_closure(
        format!("lowpass(2^{j})"),
        (0.0, 2.0 * edge),
        move |s| {
            if s <= edge {
                1.0
            } else {
                1.0 - dyadic_bump(j + 1, s)
            }
        },
    )
}

/// Applies the wave multiplier cos(t sqrt(lambda)), low-passed to
/// s <= 2^{band_exponent + 1}, to `f`, and measures the fraction of output
/// energy outside homogeneous-norm balls of radius kappa (rho_f + |t|)
/// for each kappa, where rho_f is the input's quasi-ball radius.
///
/// `band_exponent = None` skips the frequency cutoff and is only admissible
/// at t = 0, where the evolution is the identity.  The low-pass leakage
/// (how far the filtered input is from the input) is measured and reported
/// alongside, since mass the filter removes is mass the locality statement
/// cannot see.  Fractions count only in-box energy; mass leaving the box
/// is guarded separately by the wrap check inside the calculus.
pub fn propagation_check(
    group: &HTypeGroup,
    f: &GroupGridFunction,
    t: f64,
    kappas: &[f64],
    band_exponent: Option<i32>,
    mode: Mode,
) -> Result<PropagationReport> {
    if kappas.is_empty() {
        return Err(Error::domain("no dilation factors supplied"));
    }
    if kappas.iter().any(|&k| !(k > 0.0)) {
        return Err(Error::domain("dilation factors must be positive"));
    }
    if f.grid.spatial().d1() != group.d1() || f.grid.d2() != group.d2() {
        return Err(Error::structural(format!(
            "grid is {}+{} dimensional; the group is {}+{}",
            f.grid.spatial().d1(),
            f.grid.d2(),
            group.d1(),
            group.d2()
        )));
    }
    let fnorm = f.norm();
    if fnorm == 0.0 {
        return Err(Error::domain("propagation check needs a nonzero input"));
    }
    let rho_f = quasi_ball_radius(f, group, 1e-6);
    let mut warnings = f.warnings.clone();
    let (out, cutoff_leakage, band_limit_s) = match band_exponent {
        None => {
            if t != 0.0 {
                return Err(Error::domain(
                    "time evolution requires a band exponent; only t = 0 runs unfiltered",
                ));
            }
            (f.clone(), 0.0, None)
        }
        Some(j) => {
            let lp = lowpass_window(j);
            let edge = (j as f64).exp2();
            let wave = MultiplierSpec::from_closure(
                format!("cos({t}s)*lowpass(2^{j})"),
                (0.0, 2.0 * edge),
                move |s| {
                    let w = if s <= edge {
                        1.0
                    } else {
                        1.0 - dyadic_bump(j + 1, s)
                    };
                    (t * s).cos() * w
                },
            );
            let banded = apply_multiplier(&lp, f, group, mode)?;
            warnings.extend(banded.warnings.iter().cloned());
            let leak = banded.sub(f)?.norm() / fnorm;
            let out = apply_multiplier(&wave, f, group, mode)?;
            warnings.extend(out.warnings.iter().cloned());
            (out, leak, Some(2.0 * edge))
        }
    };
    let ct = out.grid.central_total();
    let cell = out.grid.central_cell();
    let masses: Vec<(f64, f64)> = (0..out.values.len())
        .map(|flat| {
            let x = out.grid.spatial().point(flat / ct);
            let u = out.grid.central_point(flat % ct);
            let w = out.grid.spatial().quad_weight(flat / ct) * cell;
            (
                group.homogeneous_norm(&Point::new(x, u)),
                w * out.values[flat].norm_sqr(),
            )
        })
        .collect();
    let total = exec::pairwise_sum(&masses.iter().map(|p| p.1).collect::<Vec<_>>());
    let outside_fractions: Vec<f64> = kappas
        .iter()
        .map(|&kappa| {
            let radius = kappa * (rho_f + t.abs());
            if total <= 0.0 {
                return 0.0;
            }
            let outside: Vec<f64> = masses
                .iter()
                .filter(|(r, _)| *r > radius)
                .map(|(_, m)| *m)
                .collect();
            (exec::pairwise_sum(&outside) / total).clamp(0.0, 1.0)
        })
        .collect();
    Ok(PropagationReport {
        t,
        input_radius: rho_f,
        band_limit_s,
        kappas: kappas.to_vec(),
        outside_fractions,
        cutoff_leakage,
        warnings,
    })
}
