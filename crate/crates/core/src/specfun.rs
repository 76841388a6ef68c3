//! Special functions: normalized Hermite functions, Laguerre polynomials and
//! Laguerre-type radial eigenfunctions, and the oscillator matrix
//! coefficients that diagonalize the twisted Laplacian.
//!
//! All families are evaluated by their three-term recurrences. Exponential
//! weights are folded *into* the recurrences (the recurrences are linear, so
//! scaling commutes) to avoid overflow at large index or argument.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;

/// Hard cap on Hermite index; the recurrence is forward-stable well past
/// this, the cap just bounds compute.
pub const HERMITE_MAX_INDEX: usize = 200;

/// Normalized Hermite functions h_0..h_max at `t`:
/// h_0(t) = pi^{-1/4} exp(-t^2/2), h_1(t) = sqrt(2) t h_0(t),
/// h_{l+1}(t) = t sqrt(2/(l+1)) h_l(t) - sqrt(l/(l+1)) h_{l-1}(t).
pub fn hermite_sequence(max_index: usize, t: f64) -> Result<Vec<f64>> {
    if max_index > HERMITE_MAX_INDEX {
        return Err(Error::budget(format!(
            "hermite index {max_index} exceeds cap {HERMITE_MAX_INDEX}"
        )));
    }
    let mut out = Vec::with_capacity(max_index + 1);
    let h0 = std::f64::consts::PI.powf(-0.25) * (-t * t / 2.0).exp();
    out.push(h0);
    if max_index == 0 {
        return Ok(out);
    }
    out.push(std::f64::consts::SQRT_2 * t * h0);
    for l in 1..max_index {
        let next = t * (2.0 / (l as f64 + 1.0)).sqrt() * out[l]
            - (l as f64 / (l as f64 + 1.0)).sqrt() * out[l - 1];
        out.push(next);
    }
    Ok(out)
}

/// Single normalized Hermite function h_l(t).
pub fn hermite(l: usize, t: f64) -> Result<f64> {
    Ok(*hermite_sequence(l, t)?.last().unwrap())
}

/// Tensor Hermite function: Phi_nu^lambda(xi) = lambda^{n/4} prod_j
/// h_{nu_j}(sqrt(lambda) xi_j).
pub fn hermite_tensor(nu: &[usize], lambda: f64, xi: &[f64]) -> Result<f64> {
    if nu.len() != xi.len() {
        return Err(Error::structural(format!(
            "index/point dimension mismatch: {} vs {}",
            nu.len(),
            xi.len()
        )));
    }
    if lambda <= 0.0 {
        return Err(Error::domain("hermite_tensor requires lambda > 0"));
    }
    let n = nu.len();
    let sq = lambda.sqrt();
    let mut prod = lambda.powf(n as f64 / 4.0);
    for j in 0..n {
        prod *= hermite(nu[j], sq * xi[j])?;
    }
    Ok(prod)
}

/// Associated Laguerre polynomials L_0^alpha..L_max^alpha at `x` by the
/// standard recurrence (k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}.
pub fn laguerre_sequence(max_index: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_index + 1);
    out.push(1.0);
    if max_index == 0 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for k in 1..max_index {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Single Laguerre polynomial L_k^alpha(x).
pub fn laguerre(k: usize, alpha: f64, x: f64) -> f64 {
    *laguerre_sequence(k, alpha, x).last().unwrap()
}

/// Exponentially weighted Laguerre values L_0^alpha(x) e^{-x/2} ..
/// L_max^alpha(x) e^{-x/2}, computed with the weight inside the recurrence so
/// large `x` and `k` never overflow.
pub fn laguerre_weighted_sequence(max_index: usize, alpha: f64, x: f64) -> Vec<f64> {
    let w = (-x / 2.0).exp();
    let mut out = Vec::with_capacity(max_index + 1);
    out.push(w);
    if max_index == 0 {
        return out;
    }
    out.push((1.0 + alpha - x) * w);
    for k in 1..max_index {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Binomial coefficient C(a, b) as f64 (exact for the index ranges used
/// here).
pub fn binomial(a: usize, b: usize) -> f64 {
    if b > a {
        return 0.0;
    }
    let b = b.min(a - b);
    let mut acc = 1.0f64;
    for i in 0..b {
        acc = acc * (a - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Radial Laguerre-type eigenfunction of the twisted Laplacian at radius `r`
/// in R^{2n}: phi_k^lambda(r) = lambda^n L_k^{n-1}(lambda r^2 / 2)
/// exp(-lambda r^2 / 4).
pub fn laguerre_fn_radial(k: usize, n: usize, lambda: f64, r: f64) -> f64 {
    let x = lambda * r * r / 2.0;
    lambda.powi(n as i32)
        * *laguerre_weighted_sequence(k, n as f64 - 1.0, x).last().unwrap()
}

/// All of phi_0^lambda(r) .. phi_kmax^lambda(r) in one recurrence sweep.
pub fn laguerre_fn_radial_sequence(k_max: usize, n: usize, lambda: f64, r: f64) -> Vec<f64> {
    let x = lambda * r * r / 2.0;
    let scale = lambda.powi(n as i32);
    laguerre_weighted_sequence(k_max, n as f64 - 1.0, x)
        .into_iter()
        .map(|v| v * scale)
        .collect()
}

/// Closed form phi_k^lambda(0) = lambda^n C(k+n-1, k).
pub fn laguerre_fn_at_zero(k: usize, n: usize, lambda: f64) -> f64 {
    lambda.powi(n as i32) * binomial(k + n - 1, k)
}

/// Closed form of the squared L^2 norm of phi_k^lambda on R^{2n}:
/// (2 pi)^n lambda^n C(k+n-1, k).
pub fn laguerre_fn_norm_sq(k: usize, n: usize, lambda: f64) -> f64 {
    (2.0 * std::f64::consts::PI).powi(n as i32) * lambda.powi(n as i32) * binomial(k + n - 1, k)
}

/// One-dimensional oscillator displacement elements
/// M_{p,q}(A, B) = int e^{iA(s + B/2)} h_p(s + B) h_q(s) ds
/// for all p, q <= max_index, by adaptive composite Gauss–Legendre with
/// panel doubling (successive results within 1e-10).
///
/// The closed forms M_{00} = exp(-(A^2+B^2)/4) and the displacement-operator
/// Laguerre expressions exist, but the quadrature route is kept as the
/// primary implementation so the Laguerre-sum identity remains an
/// independent cross-check.
pub fn displacement_elements(max_index: usize, a: f64, b: f64) -> Result<Vec<Vec<Complex64>>> {
    if max_index > HERMITE_MAX_INDEX {
        return Err(Error::budget(format!(
            "displacement index {max_index} exceeds cap {HERMITE_MAX_INDEX}"
        )));
    }
    // The product h_p(s+B) h_q(s) lives between bumps centered at -B and 0;
    // integrate a symmetric window about -B/2 wide enough for both tails.
    let spread = (2.0 * max_index as f64 + 1.0).sqrt();
    let half_width = (spread + 8.0).max(12.0) + b.abs() / 2.0;
    let center = -b / 2.0;
    let (lo, hi) = (center - half_width, center + half_width);

    // panel count starts high enough to resolve the e^{iAs} oscillation
    let wavelengths = a.abs() * half_width / std::f64::consts::PI;
    let mut panels = ((wavelengths / 4.0).ceil() as usize).max(4);
    let mut prev = displacement_panel_eval(max_index, a, b, lo, hi, panels);
    loop {
        panels *= 2;
        let cur = displacement_panel_eval(max_index, a, b, lo, hi, panels);
        let mut delta = 0.0f64;
        for p in 0..=max_index {
            for q in 0..=max_index {
                delta = delta.max((cur[p][q] - prev[p][q]).norm());
            }
        }
        if delta < 1e-10 {
            return Ok(cur);
        }
        if panels > 1 << 13 {
            return Err(Error::Accuracy {
                message: format!("displacement quadrature not converged (A={a}, B={b})"),
                estimate: delta,
            });
        }
        prev = cur;
    }
}

fn displacement_panel_eval(
    max_index: usize,
    a: f64,
    b: f64,
    lo: f64,
    hi: f64,
    panels: usize,
) -> Vec<Vec<Complex64>> {
    let (nodes, weights) = quad::composite_rule(lo, hi, panels);
    let m = max_index + 1;
    let mut acc = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for (&s, &w) in nodes.iter().zip(&weights) {
        let hq = hermite_sequence(max_index, s).expect("index checked");
        let hp = hermite_sequence(max_index, s + b).expect("index checked");
        let phase = Complex64::from_polar(w, a * (s + b / 2.0));
        for p in 0..m {
            let f = phase * hp[p];
            for q in 0..m {
                acc[p][q] += f * hq[q];
            }
        }
    }
    acc
}

/// Single displacement matrix element M_{p,q}(A, B) in closed Laguerre
/// form: with gamma = (-B + iA)/sqrt(2) and x = |gamma|^2,
///
///   M_{p,q} = sqrt(q!/p!) (-conj(gamma))^{p-q} e^{-x/2} L_q^{(p-q)}(x)
///
/// (indices swapped and gamma in place of -conj(gamma) for q > p).  This
/// is the fast point-evaluation route; `displacement_elements` keeps the
/// direct quadrature as an independent cross-check of the same quantity.
pub fn displacement_element(p: usize, q: usize, a: f64, b: f64) -> Complex64 {
    let gamma = Complex64::new(-b, a) / 2.0_f64.sqrt();
    let x = gamma.norm_sqr();
    let (lo, hi, base) = if p >= q {
        (q, p, -gamma.conj())
    } else {
        (p, q, gamma)
    };
    let m = hi - lo;
    // sqrt(lo!/hi!) = 1/sqrt((lo+1)(lo+2)..hi)
    let mut fac = 1.0;
    for i in lo + 1..=hi {
        fac *= i as f64;
    }
    let weight = (-x / 2.0).exp();
    if weight == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    base.powu(m as u32) * (laguerre(lo, m as f64, x) * weight / fac.sqrt())
}

/// Matrix coefficient of the Schrödinger representation between tensor
/// Hermite states, normalized so the family is orthonormal in L^2(R^{2n}):
///
/// Phi_{nu,nu'}^lambda(z) = (2 pi)^{-n/2} lambda^{n/2}
///     prod_j M_{nu'_j, nu_j}(sqrt(lambda) a_j, sqrt(lambda) b_j),
/// z = (a_1..a_n, b_1..b_n).
///
/// The index roles inside M are arranged so that the twisted Laplacian
/// eigenvalue is carried by the *first* index: apply_L0 on Phi_{nu,nu'}
/// yields (2|nu|_1 + n) lambda.
pub fn matrix_coefficient(
    nu: &[usize],
    nu_prime: &[usize],
    lambda: f64,
    z: &[f64],
) -> Result<Complex64> {
    let n = nu.len();
    if nu_prime.len() != n || z.len() != 2 * n {
        return Err(Error::structural(format!(
            "matrix_coefficient dimension mismatch: |nu|={n}, |nu'|={}, |z|={}",
            nu_prime.len(),
            z.len()
        )));
    }
    if lambda <= 0.0 {
        return Err(Error::domain("matrix_coefficient requires lambda > 0"));
    }
    let sq = lambda.sqrt();
    let mut acc = Complex64::new(
        (2.0 * std::f64::consts::PI).powf(-(n as f64) / 2.0) * lambda.powf(n as f64 / 2.0),
        0.0,
    );
    for j in 0..n {
        let elems = displacement_elements(nu[j].max(nu_prime[j]), sq * z[j], sq * z[n + j])?;
        acc *= elems[nu_prime[j]][nu[j]];
    }
    Ok(acc)
}

/// Samples a family of matrix coefficients (shared index pairs) at one point,
/// reusing a single displacement-element table per coordinate. `pairs` holds
/// (nu, nu') with all entries bounded by `max_index`.
pub fn matrix_coefficient_family(
    pairs: &[(Vec<usize>, Vec<usize>)],
    max_index: usize,
    lambda: f64,
    z: &[f64],
) -> Result<Vec<Complex64>> {
    let n = z.len() / 2;
    let sq = lambda.sqrt();
    let tables: Vec<Vec<Vec<Complex64>>> = (0..n)
        .map(|j| displacement_elements(max_index, sq * z[j], sq * z[n + j]))
        .collect::<Result<_>>()?;
    let norm = (2.0 * std::f64::consts::PI).powf(-(n as f64) / 2.0) * lambda.powf(n as f64 / 2.0);
    pairs
        .iter()
        .map(|(nu, nu_prime)| {
            if nu.len() != n || nu_prime.len() != n {
                return Err(Error::structural("family pair dimension mismatch"));
            }
            let mut acc = Complex64::new(norm, 0.0);
            for j in 0..n {
                acc *= tables[j][nu_prime[j]][nu[j]];
            }
            Ok(acc)
        })
        .collect()
}

/// Multi-indices nu in N^n with |nu|_1 = k, in lexicographic order.
pub fn multi_indices_of_degree(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=k {
            prefix.push(first);
            rec(n - 1, k - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // The closed Laguerre form and the direct quadrature must produce the
    // same displacement elements; they share no code beyond the Laguerre
    // recurrence.
    #[test]
    fn displacement_closed_form_matches_quadrature() {
        for &(a, b) in &[(0.0, 0.0), (1.3, -0.7), (-2.1, 0.4), (3.0, 2.5), (0.0, -1.9)] {
            let table = displacement_elements(5, a, b).unwrap();
            for p in 0..=5 {
                for q in 0..=5 {
                    let closed = displacement_element(p, q, a, b);
                    let diff = (closed - table[p][q]).norm();
                    assert!(
                        diff < 1e-9,
                        "M_{{{p},{q}}}({a},{b}): closed {closed} vs quadrature {}",
                        table[p][q]
                    );
                }
            }
        }
    }

    #[test]
    fn hermite_low_orders_match_explicit_forms() {
        let pi4 = std::f64::consts::PI.powf(-0.25);
        for &t in &[-2.3, 0.0, 0.4, 1.7] {
            let h = hermite_sequence(2, t).unwrap();
            let g = (-t * t / 2.0).exp();
            assert_relative_eq!(h[0], pi4 * g, epsilon = 1e-15);
            assert_relative_eq!(h[1], pi4 * std::f64::consts::SQRT_2 * t * g, epsilon = 1e-14);
            // h_2 = pi^{-1/4} (2 t^2 - 1) / sqrt(2) * exp(-t^2/2)
            assert_relative_eq!(
                h[2],
                pi4 * (2.0 * t * t - 1.0) / std::f64::consts::SQRT_2 * g,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn hermite_orthonormal_under_quadrature() {
        let max = 12;
        let (nodes, weights) = quad::composite_rule(-12.0, 12.0, 24);
        let mut gram = vec![vec![0.0; max + 1]; max + 1];
        for (&t, &w) in nodes.iter().zip(&weights) {
            let h = hermite_sequence(max, t).unwrap();
            for p in 0..=max {
                for q in 0..=max {
                    gram[p][q] += w * h[p] * h[q];
                }
            }
        }
        for p in 0..=max {
            for q in 0..=max {
                let expect = if p == q { 1.0 } else { 0.0 };
                assert!(
                    (gram[p][q] - expect).abs() < 1e-10,
                    "gram[{p}][{q}] = {}",
                    gram[p][q]
                );
            }
        }
    }

    #[test]
    fn hermite_100_matches_extended_precision_fixture() {
        // reference computed once at 60-digit precision
        let fixture = [
            (0.0, 0.21190426776343108883),
            (1.0, -0.0060679802386717752544),
            (5.0, 0.21085461968393164179),
        ];
        for (t, reference) in fixture {
            let got = hermite(100, t).unwrap();
            assert_relative_eq!(got, reference, max_relative = 1e-9);
        }
    }

    #[test]
    fn hermite_budget_enforced() {
        assert!(matches!(hermite(201, 0.0), Err(Error::Budget(_))));
        assert!(hermite(200, 0.0).is_ok());
    }

    #[test]
    fn laguerre_closed_forms() {
        assert_relative_eq!(laguerre(1, 0.0, 2.0), -1.0);
        assert_relative_eq!(laguerre(2, 1.0, 0.5), {
            // L_2^1(x) = (x^2 - 6x + 6)/2
            let x: f64 = 0.5;
            (x * x - 6.0 * x + 6.0) / 2.0
        });
        for k in 0..10usize {
            for n in 1..4usize {
                assert_relative_eq!(
                    laguerre(k, n as f64 - 1.0, 0.0),
                    binomial(k + n - 1, k),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn weighted_laguerre_stays_finite_at_large_argument() {
        // unweighted L_150(600) overflows f64; the weighted recurrence must not
        let vals = laguerre_weighted_sequence(150, 0.0, 600.0);
        assert!(vals.iter().all(|v| v.is_finite()));
        // and must agree with unweighted * exp(-x/2) where that is representable
        let x = 30.0;
        let plain = laguerre_sequence(40, 2.0, x);
        let weighted = laguerre_weighted_sequence(40, 2.0, x);
        for k in 0..=40 {
            assert_relative_eq!(weighted[k], plain[k] * (-x / 2.0f64).exp(), max_relative = 1e-11);
        }
    }

    #[test]
    fn laguerre_fn_zero_and_norm_closed_forms() {
        assert_relative_eq!(laguerre_fn_at_zero(0, 1, 1.0), 1.0);
        assert_relative_eq!(laguerre_fn_at_zero(3, 2, 2.0), 4.0 * binomial(4, 3));
        // norm^2 by radial quadrature: |S^{2n-1}| int phi^2 r^{2n-1} dr
        for (k, n, lambda) in [(0usize, 1usize, 1.0f64), (2, 1, 0.5), (1, 2, 2.0), (5, 1, 1.0)] {
            let quadrature = quad::integrate_adaptive(
                |r| {
                    let v = laguerre_fn_radial(k, n, lambda, r);
                    v * v * r.powi(2 * n as i32 - 1)
                },
                0.0,
                40.0 / lambda.sqrt(),
                1e-12,
                1 << 10,
            )
            .unwrap()
                * quad::sphere_measure(2 * n);
            assert_relative_eq!(quadrature, laguerre_fn_norm_sq(k, n, lambda), max_relative = 1e-10);
        }
    }

    #[test]
    fn displacement_elements_match_gaussian_closed_forms() {
        for (a, b) in [(0.3, -1.2), (2.0, 0.7), (0.0, 0.0), (-4.0, 3.0)] {
            let m = displacement_elements(1, a, b).unwrap();
            let g = (-(a * a + b * b) / 4.0f64).exp();
            // M_00 = exp(-(A^2+B^2)/4)
            assert_relative_eq!(m[0][0].re, g, epsilon = 1e-10);
            assert!(m[0][0].im.abs() < 1e-10);
            // M_01 = (iA - B)/sqrt(2) g, M_10 = (iA + B)/sqrt(2) g
            let m01 = Complex64::new(-b, a) / std::f64::consts::SQRT_2 * g;
            let m10 = Complex64::new(b, a) / std::f64::consts::SQRT_2 * g;
            assert!((m[0][1] - m01).norm() < 1e-10);
            assert!((m[1][0] - m10).norm() < 1e-10);
        }
    }

    #[test]
    fn matrix_coefficient_center_value_and_bound() {
        // Phi_{0,0}(0) = (2 pi)^{-n/2} lambda^{n/2}
        for n in 1..=2usize {
            let z = vec![0.0; 2 * n];
            let v = matrix_coefficient(&vec![0; n], &vec![0; n], 1.0, &z).unwrap();
            assert_relative_eq!(
                v.re,
                (2.0 * std::f64::consts::PI).powf(-(n as f64) / 2.0),
                max_relative = 1e-9
            );
            assert!(v.im.abs() < 1e-12);
        }
        // |Phi| <= (2 pi)^{-n/2} lambda^{n/2} everywhere
        let bound = (2.0 * std::f64::consts::PI).powf(-0.5) * 2.0f64.powf(0.5);
        for z in [[0.5, -1.0], [2.0, 2.0], [-3.0, 0.25]] {
            let v = matrix_coefficient(&[2], &[3], 2.0, &z).unwrap();
            assert!(v.norm() <= bound + 1e-12);
        }
    }

    #[test]
    fn matrix_coefficient_scaling_law() {
        // Phi^lambda(z) = lambda^{n/2} Phi^1(sqrt(lambda) z)
        let lambda = 2.5f64;
        let z = [0.7, -0.4];
        let zs = [z[0] * lambda.sqrt(), z[1] * lambda.sqrt()];
        let a = matrix_coefficient(&[1], &[2], lambda, &z).unwrap();
        let b = matrix_coefficient(&[1], &[2], 1.0, &zs).unwrap() * lambda.sqrt();
        assert!((a - b).norm() < 1e-9, "scaling violated: {a} vs {b}");
    }

    #[test]
    fn matrix_coefficients_orthonormal_in_l2() {
        // 2-dim quadrature of Phi_{p,q} conj(Phi_{r,s}) over R^2, n = 1
        let lambda = 1.0f64;
        let pairs: Vec<(usize, usize)> = vec![(0, 0), (0, 1), (1, 0), (1, 1), (2, 1)];
        let (nodes, weights) = quad::composite_rule(-9.0, 9.0, 8);
        let mut gram = vec![vec![Complex64::new(0.0, 0.0); pairs.len()]; pairs.len()];
        for (&a, &wa) in nodes.iter().zip(&weights) {
            for (&b, &wb) in nodes.iter().zip(&weights) {
                let elems = displacement_elements(2, a, b).unwrap();
                let c = (2.0 * std::f64::consts::PI).powf(-0.5) * lambda.powf(0.5);
                let vals: Vec<Complex64> =
                    pairs.iter().map(|&(p, q)| elems[q][p] * c).collect();
                for i in 0..pairs.len() {
                    for j in 0..pairs.len() {
                        gram[i][j] += vals[i] * vals[j].conj() * (wa * wb);
                    }
                }
            }
        }
        for i in 0..pairs.len() {
            for j in 0..pairs.len() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram[i][j] - expect).norm() < 1e-8,
                    "gram[{i}][{j}] = {}",
                    gram[i][j]
                );
            }
        }
    }

    #[test]
    fn laguerre_link_identity() {
        // phi_k^lambda(z) = (2 pi)^{n/2} lambda^{n/2} sum_{|nu|=k} Phi_{nu,nu}(z)
        for n in 1..=2usize {
            for k in 0..=3usize {
                let z: Vec<f64> = (0..2 * n).map(|i| 0.3 * i as f64 - 0.5).collect();
                let lambda = 1.3;
                let r = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                let lhs = laguerre_fn_radial(k, n, lambda, r);
                let mut rhs = Complex64::new(0.0, 0.0);
                for nu in multi_indices_of_degree(n, k) {
                    rhs += matrix_coefficient(&nu, &nu, lambda, &z).unwrap();
                }
                rhs *= (2.0 * std::f64::consts::PI).powf(n as f64 / 2.0) * lambda.powf(n as f64 / 2.0);
                assert!(
                    (rhs.re - lhs).abs() < 1e-8 && rhs.im.abs() < 1e-8,
                    "laguerre link failed n={n} k={k}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn multi_index_enumeration_counts() {
        assert_eq!(multi_indices_of_degree(1, 5), vec![vec![5]]);
        assert_eq!(multi_indices_of_degree(2, 2).len(), 3);
        assert_eq!(multi_indices_of_degree(3, 4).len(), binomial(6, 4) as usize);
    }
}
