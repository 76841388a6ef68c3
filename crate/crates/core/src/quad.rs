//! Quadrature: Gauss–Legendre rules, adaptive composite integration with
//! panel doubling, and sphere rules for oscillatory central-variable
//! integrals.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes nodes as roots of the degree-`n` Legendre polynomial by
    /// Newton iteration from the Chebyshev initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // initial guess (Abramowitz–Stegun 22.16.6 flavor)
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_and_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x.abs(); // enforce symmetric ordering, ascending
            nodes[n - 1 - i] = x.abs();
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
            let (_, d) = legendre_and_derivative(n, 0.0);
            weights[n / 2] = 2.0 / (d * d);
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrates `f` over `[a, b]` with this rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let vals: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(c + h * x))
            .collect();
        h * crate::exec::pairwise_sum(&vals)
    }

    /// Complex-valued variant of [`integrate`](Self::integrate).
    pub fn integrate_c<F: Fn(f64) -> Complex64>(&self, a: f64, b: f64, f: F) -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let vals: Vec<Complex64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(c + h * x) * w)
            .collect();
        crate::exec::pairwise_sum_c(&vals) * h
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        (
            self.nodes.iter().map(|&x| c + h * x).collect(),
            self.weights.iter().map(|&w| w * h).collect(),
        )
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre nodes/weights on `[a, b]` with `panels` equal
/// panels of a fixed 16-point rule.
pub fn composite_rule(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let base = GaussLegendre::new(16);
    let mut nodes = Vec::with_capacity(16 * panels);
    let mut weights = Vec::with_capacity(16 * panels);
    let step = (b - a) / panels as f64;
    for p in 0..panels {
        let (n, w) = base.mapped(a + p as f64 * step, a + (p + 1) as f64 * step);
        nodes.extend(n);
        weights.extend(w);
    }
    (nodes, weights)
}

/// Integrates `f` over `[a, b]` by composite Gauss–Legendre, doubling the
/// panel count until two successive results differ by less than
/// `tol * max(1, |I|)` or `max_panels` is exceeded.
pub fn integrate_adaptive_c<F>(f: F, a: f64, b: f64, tol: f64, max_panels: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let base = GaussLegendre::new(16);
    let mut panels = 1usize;
    let mut prev = composite_eval_c(&base, &f, a, b, panels);
    loop {
        panels *= 2;
        let cur = composite_eval_c(&base, &f, a, b, panels);
        let delta = (cur - prev).norm();
        if delta <= tol * cur.norm().max(1.0) {
            return Ok(cur);
        }
        if panels >= max_panels {
            return Err(Error::Accuracy {
                message: format!(
                    "composite quadrature on [{a}, {b}] did not converge (delta {delta:.3e} after {panels} panels)"
                ),
                estimate: cur.norm(),
            });
        }
        prev = cur;
    }
}

/// Real-valued variant of [`integrate_adaptive_c`].
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, tol: f64, max_panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_adaptive_c(|x| Complex64::new(f(x), 0.0), a, b, tol, max_panels).map(|v| v.re)
}

fn composite_eval_c<F: Fn(f64) -> Complex64>(
    base: &GaussLegendre,
    f: &F,
    a: f64,
    b: f64,
    panels: usize,
) -> Complex64 {
    let step = (b - a) / panels as f64;
    let vals: Vec<Complex64> = (0..panels)
        .map(|p| base.integrate_c(a + p as f64 * step, a + (p + 1) as f64 * step, f))
        .collect();
    crate::exec::pairwise_sum_c(&vals)
}

/// Surface measure of the unit sphere S^{m-1} in R^m (counting measure 2 for
/// m = 1).
pub fn sphere_measure(m: usize) -> f64 {
    assert!(m >= 1);
    let pi = std::f64::consts::PI;
    if m % 2 == 0 {
        // 2 pi^{m/2} / (m/2 - 1)!
        let half = m / 2;
        let mut fact = 1.0;
        for k in 2..half {
            fact *= k as f64;
        }
        2.0 * pi.powi(half as i32) / fact
    } else {
        // Gamma(m/2) = sqrt(pi) (m-2)!! / 2^{(m-1)/2}
        let mut dfact = 1.0;
        let mut k = m as i64 - 2;
        while k >= 2 {
            dfact *= k as f64;
            k -= 2;
        }
        let gamma_half = pi.sqrt() * dfact / 2f64.powi(((m - 1) / 2) as i32);
        2.0 * pi.powf(m as f64 / 2.0) / gamma_half
    }
}

/// Product rule on S^2: Gauss–Legendre in the polar cosine, uniform azimuth.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(polar: usize, azimuth: usize) -> Self {
        let gl = GaussLegendre::new(polar);
        let dphi = 2.0 * std::f64::consts::PI / azimuth as f64;
        let mut points = Vec::with_capacity(polar * azimuth);
        let mut weights = Vec::with_capacity(polar * azimuth);
        for (i, &c) in gl.nodes.iter().enumerate() {
            let s = (1.0 - c * c).sqrt();
            for j in 0..azimuth {
                let phi = dphi * j as f64;
                points.push([s * phi.cos(), s * phi.sin(), c]);
                weights.push(gl.weights[i] * dphi);
            }
        }
        SphereRule { points, weights }
    }

    /// Integral of `exp(i rho <omega, u>)` over S^2 (real by symmetry).
    pub fn oscillatory_factor(&self, rho: f64, u: &[f64; 3]) -> f64 {
        let vals: Vec<f64> = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(p, &w)| w * (rho * (p[0] * u[0] + p[1] * u[1] + p[2] * u[2])).cos())
            .collect();
        crate::exec::pairwise_sum(&vals)
    }
}

/// Integral of `exp(i rho <omega, u>)` over the unit sphere in R^{d2},
/// evaluated by the rule appropriate for the dimension. For `d2 = 1` the
/// "sphere" is the two-point set {+1, -1}; for `d2 = 3` a product rule sized
/// for the oscillation `rho * |u|` is used (doubled until stable to 1e-8).
pub fn sphere_oscillatory_factor(d2: usize, rho: f64, u: &[f64]) -> f64 {
    match d2 {
        1 => 2.0 * (rho * u[0]).cos(),
        3 => {
            let uu = [u[0], u[1], u[2]];
            let t = rho * (uu[0] * uu[0] + uu[1] * uu[1] + uu[2] * uu[2]).sqrt();
            let mut polar = ((t.abs() * 0.8) as usize).max(8);
            let mut prev = SphereRule::new(polar, 2 * polar).oscillatory_factor(rho, &uu);
            loop {
                polar *= 2;
                let cur = SphereRule::new(polar, 2 * polar).oscillatory_factor(rho, &uu);
                if (cur - prev).abs() < 1e-8 || polar > 2048 {
                    return cur;
                }
                prev = cur;
            }
        }
        _ => panic!("sphere_oscillatory_factor: unsupported center dimension {d2}"),
    }
}
