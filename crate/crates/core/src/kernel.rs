//! Convolution-kernel synthesis for spectral multipliers.
//!
//! A multiplier applied jointly to the sub-Laplacian and the central
//! derivatives acts by group convolution with a kernel K(x, u).  On a group
//! with horizontal dimension 2n and center dimension d2 the kernel is a sum
//! over Laguerre bands of radial profiles in x, modulated by oscillatory
//! spherical factors in u:
//!
//!   K(x, u) = (2 pi)^{-(d2 + n)} * sum_k  int_{mu_min <= |mu|}
//!             coeff(k, |mu|) * phi_k^{|mu|}(|x|) * e^{i <mu, u>} d mu,
//!
//! which in polar coordinates on the center becomes a one-dimensional
//! integral over rho = |mu| with the sphere factor from
//! [`crate::quad::sphere_oscillatory_factor`].  The band coefficients come
//! from a [`SpectralCoefficients`] source; for a plain multiplier F acting
//! on the operator pair the coefficient at band k and radius rho is
//! F(sqrt((2k + n) * rho)).
//!
//! Synthesis tabulates K on a tensor grid and keeps the full quadrature
//! record (band indices, radial nodes/weights, coefficient values) alongside
//! the samples, so any later consumer can re-evaluate K at arbitrary points
//! or perform spectral-side computations without redoing the adaptive node
//! selection.

use std::io::{Read as _, Write as _};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Mode};
use crate::grid::{sidecar_path_for, Grid1, GroupGridFunction};
use crate::group::HTypeGroup;
use crate::multiplier::SpectralCoefficients;
use crate::quad::{self, GaussLegendre};
use crate::specfun;
use crate::twisted;

/// Default lower cutoff for the central-frequency radius.  The synthesized
/// kernel omits the spectral mass with |mu| below this value; the omitted
/// share is quantified in [`KernelTable::excluded_mass_sq`].
pub const MU_MIN_DEFAULT: f64 = 1.0 / 1024.0;

/// Hard cap on the number of Laguerre bands a single synthesis may touch.
pub(crate) const BAND_CAP: usize = 4096;

/// Hard cap on the Gauss-Legendre order used for one radial band.
const NODE_CAP: usize = 4096;

/// One radial quadrature node of the synthesis record: band index k, radius
/// rho = |mu|, quadrature weight, and the multiplier coefficient at (k, rho)
/// (including any band window attached to the coefficient source).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralTerm {
    pub k: usize,
    pub rho: f64,
    pub weight: f64,
    pub coefficient: f64,
}

/// A synthesized convolution kernel: samples on a tensor grid (horizontal

/// axes first, central axes second, x-major layout) plus the spectral
/// record that produced them.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub group_name: String,
    pub n: usize,
    pub d2: usize,
    pub x_grid: Grid1,
    pub u_grid: Grid1,
    /// Samples, laid out as values[x_flat * u_total + u_flat].
    pub values: Vec<Complex64>,
    pub spectral: Vec<SpectralTerm>,
    pub mu_min: f64,
    /// Squared L^2 mass of the multiplier below the mu_min cutoff,
    /// normalized so it is comparable with [`spectral_norm_sq`].
    pub excluded_mass_sq: f64,
    pub multiplier_label: String,
}

/// Enumerates the bands that can contribute for a coefficient source with
/// the given support in s = sqrt(lambda): band k is live on the radial
/// interval [sa^2 / (2k+n), sb^2 / (2k+n)] intersected with [mu_min, inf).
fn live_bands(
    f: &(impl SpectralCoefficients + ?Sized),
    n: usize,
    mu_min: f64,
) -> Result<Vec<(usize, f64, f64)>> {
    let (sa, sb) = f.s_support();
    if !(sb.is_finite() && sb > 0.0) {
        return Err(Error::domain(format!(
            "coefficient source '{}' reports unbounded support; kernel synthesis needs a finite band",
            f.record_label()
        )));
    }
    if mu_min <= 0.0 {
        return Err(Error::domain(
            "mu_min must be positive: every Laguerre band reaches arbitrarily small radii, \
             so a zero cutoff makes the band sum infinite",
        ));
    }
    let lo_lambda = (sa.max(0.0)).powi(2);
    let hi_lambda = sb.powi(2);
    let mut bands = Vec::new();
    let mut k = 0usize;
    loop {
        let bk = (2 * k + n) as f64;
        let lo = (lo_lambda / bk).max(mu_min);
        let hi = hi_lambda / bk;
        if hi <= mu_min {
            break;
        }
        if lo < hi && f.bracket_weight(k, n) != 0.0 {
            bands.push((k, lo, hi));
        }
        k += 1;
        if k > BAND_CAP {
            return Err(Error::budget(format!(
                "band enumeration exceeded {BAND_CAP} Laguerre bands (mu_min = {mu_min:.3e}); \
                 raise mu_min or narrow the multiplier support"
            )));
        }
    }
    Ok(bands)
}

/// Chooses a Gauss-Legendre order for one band by doubling until a small set
/// of probe integrals (the slowest-varying and the most oscillatory samples
/// the output grid will request) stabilizes to ~1e-9 relative.
fn band_rule(
    f: &(impl SpectralCoefficients + ?Sized),
    k: usize,
    n: usize,
    d2: usize,
    lo: f64,
    hi: f64,
    r_probe: f64,
    u_probe: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let probes: [(f64, f64); 4] = [
        (0.0, 0.0),
        (0.0, u_probe),
        (r_probe, u_probe),
        (0.37 * r_probe, 0.61 * u_probe),
    ];
    let integrand = |rho: f64, r: f64, uu: f64| -> f64 {
        let c = f.coefficient(k, n, rho);
        if c == 0.0 {
            return 0.0;
        }
        let mut uvec = vec![0.0; d2.max(1)];
        uvec[0] = uu;
        c * rho.powi(d2 as i32 - 1)
            * specfun::laguerre_fn_radial(k, n, rho, r)
            * quad::sphere_oscillatory_factor(d2, rho, &uvec)
    };
    let mut order = 16usize;
    let mut prev: Option<[f64; 4]> = None;
    loop {
        let rule = GaussLegendre::new(order);
        let mut vals = [0.0f64; 4];
        for (slot, &(r, uu)) in vals.iter_mut().zip(probes.iter()) {
            *slot = rule.integrate(lo, hi, |rho| integrand(rho, r, uu));
        }
        if let Some(p) = prev {
            // Convergence is judged against the band's overall magnitude,
            // not each probe's own value: probes deep in the kernel's tail
            // have true integrals far below the integrand scale and would
            // otherwise chase roundoff forever.
            let scale = vals
                .iter()
                .chain(p.iter())
                .fold(1e-12, |m: f64, v| m.max(v.abs()));
            let ok = vals
                .iter()
                .zip(p.iter())
                .all(|(a, b)| (a - b).abs() <= 1e-9 * scale);
            if ok {
                return Ok(rule.mapped(lo, hi));
            }
        }
        if order >= NODE_CAP {
            return Err(Error::Accuracy {
                message: format!(
                    "radial quadrature for band k = {k} on [{lo:.4e}, {hi:.4e}] did not \
                     stabilize by order {NODE_CAP}; the requested grid likely extends into \
                     a regime the band cannot resolve"
                ),
                estimate: f64::NAN,
            });
        }
        prev = Some(vals);
        order *= 2;
    }
}

/// Builds the full spectral record for a coefficient source: per live band,
/// an adaptively sized Gauss-Legendre rule on the band's radial interval.
fn spectral_record(
    f: &(impl SpectralCoefficients + ?Sized),
    n: usize,
    d2: usize,
    mu_min: f64,
    r_probe: f64,
    u_probe: f64,
) -> Result<Vec<SpectralTerm>> {
    let bands = live_bands(f, n, mu_min)?;
    let mut record = Vec::new();
    for &(k, lo, hi) in &bands {
        let (nodes, weights) = band_rule(f, k, n, d2, lo, hi, r_probe, u_probe)?;
        for (rho, w) in nodes.iter().zip(weights.iter()) {
            let coefficient = f.coefficient(k, n, *rho);
            if coefficient != 0.0 {
                record.push(SpectralTerm {
                    k,
                    rho: *rho,
                    weight: *w,
                    coefficient,
                });
            }
        }
    }
    Ok(record)
}

/// Squared L^2(group) norm of the kernel, evaluated on the spectral side:
///
///   (2 pi)^{-(d2 + n)} * |S^{d2-1}| * sum_k C(k+n-1, k) *
///       int_{mu_min}^inf rho^{d2+n-1} |coeff(k, rho)|^2 d rho.
pub fn spectral_norm_sq(
    f: &(impl SpectralCoefficients + ?Sized),
    n: usize,
    d2: usize,
    mu_min: f64,
) -> Result<f64> {
    let bands = live_bands(f, n, mu_min)?;
    let sphere = quad::sphere_measure(d2);
    let norm = (2.0 * std::f64::consts::PI).powi(-((d2 + n) as i32));
    let mut total = 0.0;
    for &(k, lo, hi) in &bands {
        let integral = quad::integrate_adaptive(
            |rho| {
                let c = f.coefficient(k, n, rho);
                rho.powi((d2 + n) as i32 - 1) * c * c
            },
            lo,
            hi,
            1e-13,
            1 << 16,
        )?;
        total += specfun::binomial(k + n - 1, k) * integral;
    }
    Ok(norm * sphere * total)
}

/// Squared spectral mass excluded by the mu_min cutoff, in the same
/// normalization as [`spectral_norm_sq`].  Bands whose radial interval is
/// clipped (or entirely removed) by the cutoff contribute the clipped
/// portion.  Once whole bands sit below the cutoff their contributions
/// decay like a power of the band index, so the sum is truncated when the
/// running term is small and the remainder is added by power-law
/// extrapolation from the last two terms.
fn excluded_mass_sq(
    f: &(impl SpectralCoefficients + ?Sized),
    n: usize,
    d2: usize,
    mu_min: f64,
) -> Result<f64> {
    if mu_min <= 0.0 {
        return Ok(0.0);
    }
    let (sa, sb) = f.s_support();
    let lo_lambda = (sa.max(0.0)).powi(2);
    let hi_lambda = sb.powi(2);
    let sphere = quad::sphere_measure(d2);
    let norm = (2.0 * std::f64::consts::PI).powi(-((d2 + n) as i32));
    // Fixed rule: every excluded interval is a smooth compactly supported
    // integrand over a narrow range, for which 64 nodes are ample.
    let rule = GaussLegendre::new(64);
    let mut total = 0.0;
    let mut prev_term = 0.0;
    let mut k = 0usize;
    loop {
        let bk = (2 * k + n) as f64;
        let lo = lo_lambda / bk;
        let hi = (hi_lambda / bk).min(mu_min);
        let mut term = 0.0;
        if lo < hi && f.bracket_weight(k, n) != 0.0 {
            let integral = rule.integrate(lo, hi, |rho| {
                let c = f.coefficient(k, n, rho);
                rho.powi((d2 + n) as i32 - 1) * c * c
            });
            term = specfun::binomial(k + n - 1, k) * integral;
            total += term;
        }
        let fully_below = hi_lambda / bk <= mu_min;
        if fully_below && (term <= 1e-8 * total.max(1e-300) || k >= (1 << 17)) {
            if term > 0.0 && prev_term > term && k > 1 {
                let p = (prev_term / term).ln() / (k as f64 / (k as f64 - 1.0)).ln();
                if p > 1.1 {
                    total += term * k as f64 / (p - 1.0);
                }
            }
            break;
        }
        prev_term = term;
        k += 1;
    }
    Ok(norm * sphere * total)
}

/// Tabulates the convolution kernel of a spectral coefficient source on the
/// product of a horizontal grid (d1 = 2n axes) and a central grid (d2 axes).
///
/// The returned table stores both the samples and the spectral record;
/// [`KernelTable::resynthesize_at`] re-evaluates the same quadrature at
/// arbitrary points.  Fails with a domain error if mu_min <= 0 or the
/// source has unbounded support, and with an accuracy error if a band's
/// radial quadrature cannot stabilize within the node cap.
pub fn synthesize_kernel(
    f: &(impl SpectralCoefficients + ?Sized),
    group: &HTypeGroup,
    x_grid: &Grid1,
    u_grid: &Grid1,
    mu_min: f64,
    mode: Mode,
) -> Result<KernelTable> {
    let n = group.n();
    let d2 = group.d2();
    if x_grid.d1() != group.d1() {
        return Err(Error::structural(format!(
            "horizontal grid has {} axes but the group needs {}",
            x_grid.d1(),
            group.d1()
        )));
    }
    if u_grid.d1() != d2 {
        return Err(Error::structural(format!(
            "central grid has {} axes but the group center has dimension {d2}",
            u_grid.d1()
        )));
    }
    let nx = x_grid.total_points();
    let nu = u_grid.total_points();
    if nx.saturating_mul(nu) > 4 * crate::grid::DEFAULT_POINT_BUDGET {
        return Err(Error::budget(format!(
            "kernel table would hold {} samples; shrink the grids",
            nx * nu
        )));
    }
    let r_probe = x_grid.extent() * (group.d1() as f64).sqrt();
    let u_probe = u_grid.extent() * (d2 as f64).sqrt();
    let record = spectral_record(f, n, d2, mu_min, r_probe, u_probe)?;
    let excluded = excluded_mass_sq(f, n, d2, mu_min)?;
    let c_norm = (2.0 * std::f64::consts::PI).powi(-((d2 + n) as i32));
    let m_terms = record.len();

    // Per-term radial profile over the horizontal grid (m-major).
    let profiles = exec::map_indexed(m_terms * nx, mode, |i| {
        let m = i / nx;
        let xf = i % nx;
        let r = x_grid
            .point(xf)
            .iter()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt();
        let t = &record[m];
        specfun::laguerre_fn_radial(t.k, n, t.rho, r)
    });
    // Per-term oscillatory sphere factor over the central grid (m-major).
    let sphere_factors = exec::map_indexed(m_terms * nu, mode, |i| {
        let m = i / nu;
        let uf = i % nu;
        let u = u_grid.point(uf);
        quad::sphere_oscillatory_factor(d2, record[m].rho, &u)
    });
    let amplitudes: Vec<f64> = record
        .iter()
        .map(|t| c_norm * t.weight * t.coefficient * t.rho.powi(d2 as i32 - 1))
        .collect();

    let rows = exec::map_indexed(nx, mode, |xf| {
        let mut row = vec![Complex64::new(0.0, 0.0); nu];
        for m in 0..m_terms {
            let a = amplitudes[m] * profiles[m * nx + xf];
            if a == 0.0 {
                continue;
            }
            let sf = &sphere_factors[m * nu..(m + 1) * nu];
            for (slot, s) in row.iter_mut().zip(sf.iter()) {
                slot.re += a * s;
            }
        }
        row
    });
    let mut values = Vec::with_capacity(nx * nu);
    for row in rows {
        values.extend(row);
    }

    Ok(KernelTable {
        group_name: group.name().to_string(),
        n,
        d2,
        x_grid: x_grid.clone(),
        u_grid: u_grid.clone(),
        values,
        spectral: record,
        mu_min,
        excluded_mass_sq: excluded,
        multiplier_label: f.record_label(),
    })
}

impl KernelTable {
    /// Sample at grid indices (x_flat, u_flat).
    pub fn value(&self, x_flat: usize, u_flat: usize) -> Complex64 {
        self.values[x_flat * self.u_grid.total_points() + u_flat]
    }

    /// Re-evaluates the synthesis quadrature at an arbitrary point (x, u);
    /// by construction this reproduces the tabulated samples at grid nodes.
    pub fn resynthesize_at(&self, x: &[f64], u: &[f64]) -> Result<Complex64> {
        if x.len() != 2 * self.n || u.len() != self.d2 {
            return Err(Error::domain(format!(
                "point has ({}, {}) coordinates; kernel expects ({}, {})",
                x.len(),
                u.len(),
                2 * self.n,
                self.d2
            )));
        }
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let c_norm = (2.0 * std::f64::consts::PI).powi(-((self.d2 + self.n) as i32));
        let mut acc = 0.0;
        for t in &self.spectral {
            acc += t.weight
                * t.coefficient
                * t.rho.powi(self.d2 as i32 - 1)
                * specfun::laguerre_fn_radial(t.k, self.n, t.rho, r)
                * quad::sphere_oscillatory_factor(self.d2, t.rho, u);
        }
        Ok(Complex64::new(c_norm * acc, 0.0))
    }

    /// Squared L^2 norm of the tabulated samples under the tensor trapezoid
    /// rule (horizontal) x trapezoid rule (central).
    pub fn grid_norm_sq(&self) -> f64 {
        let nu = self.u_grid.total_points();
        let mut acc = Vec::with_capacity(self.values.len());
        for (i, v) in self.values.iter().enumerate() {
            let xf = i / nu;
            let uf = i % nu;
            acc.push(v.norm_sqr() * self.x_grid.quad_weight(xf) * self.u_grid.quad_weight(uf));
        }
        exec::pairwise_sum(&acc)
    }

    /// Writes the samples as a binary container (same layout as grid
    /// functions, axes = horizontal then central) plus a JSON sidecar that
    /// carries the spectral record and metadata.
    pub fn save(&self, path: &Path, provenance: &str) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(b"HGF1")?;
        let d1 = self.x_grid.d1();
        let axes = d1 + self.d2;
        file.write_all(&(axes as u32).to_le_bytes())?;
        for _ in 0..d1 {
            file.write_all(&(self.x_grid.points_per_axis() as u32).to_le_bytes())?;
        }
        for _ in 0..self.d2 {
            file.write_all(&(self.u_grid.points_per_axis() as u32).to_le_bytes())?;
        }
        for _ in 0..d1 {
            file.write_all(&self.x_grid.extent().to_le_bytes())?;
        }
        for _ in 0..self.d2 {
            file.write_all(&self.u_grid.extent().to_le_bytes())?;
        }
        file.write_all(&[1u8])?;
        let mut payload = Vec::with_capacity(self.values.len() * 16);
        for v in &self.values {
            payload.extend_from_slice(&v.re.to_le_bytes());
            payload.extend_from_slice(&v.im.to_le_bytes());
        }
        file.write_all(&payload)?;
        let sidecar = KernelSidecar {
            kind: "kernel-table".into(),
            format_version: 1,
            group_name: self.group_name.clone(),
            n: self.n,
            d2: self.d2,
            x_points: self.x_grid.points_per_axis(),
            x_extent: self.x_grid.extent(),
            u_points: self.u_grid.points_per_axis(),
            u_extent: self.u_grid.extent(),
            mu_min: self.mu_min,
            excluded_mass_sq: self.excluded_mass_sq,
            multiplier_label: self.multiplier_label.clone(),
            provenance: provenance.into(),
            spectral: self.spectral.clone(),
        };
        std::fs::write(
            sidecar_path_for(path),
            serde_json::to_string_pretty(&sidecar)?,
        )?;
        Ok(())
    }

    /// Reads a table written by `save`; needs both the container and its
    /// sidecar, since the spectral record lives in the latter.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(sidecar_path_for(path)).map_err(|e| {
            Error::Format(format!(
                "kernel table at {} has no readable sidecar: {e}",
                path.display()
            ))
        })?;
        let sidecar: KernelSidecar = serde_json::from_str(&text)?;
        if sidecar.kind != "kernel-table" {
            return Err(Error::Format(format!(
                "sidecar kind '{}' is not a kernel table",
                sidecar.kind
            )));
        }
        let mut file = std::fs::File::open(path)?;
        let mut magic = [0u8; 4];
        file.read_exact(&mut magic)?;
        if &magic != b"HGF1" {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let mut buf4 = [0u8; 4];
        file.read_exact(&mut buf4)?;
        let axes = u32::from_le_bytes(buf4) as usize;
        if axes != 2 * sidecar.n + sidecar.d2 {
            return Err(Error::Format(format!(
                "container has {axes} axes; sidecar promises {}",
                2 * sidecar.n + sidecar.d2
            )));
        }
        let mut counts = Vec::with_capacity(axes);
        for _ in 0..axes {
            file.read_exact(&mut buf4)?;
            counts.push(u32::from_le_bytes(buf4) as usize);
        }
        let mut buf8 = [0u8; 8];
        let mut extents = Vec::with_capacity(axes);
        for _ in 0..axes {
            file.read_exact(&mut buf8)?;
            extents.push(f64::from_le_bytes(buf8));
        }
        let d1 = 2 * sidecar.n;
        let x_grid = Grid1::new(d1, extents[0], counts[0])?;
        let u_grid = Grid1::new(sidecar.d2, extents[d1], counts[d1])?;
        let mut flag = [0u8; 1];
        file.read_exact(&mut flag)?;
        if flag[0] != 1 {
            return Err(Error::Format(format!(
                "unsupported value-kind flag {} in kernel container",
                flag[0]
            )));
        }
        let total = x_grid.total_points() * u_grid.total_points();
        let mut payload = vec![0u8; total * 16];
        file.read_exact(&mut payload)?;
        let mut values = Vec::with_capacity(total);
        for chunk in payload.chunks_exact(16) {
            let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
            let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
            values.push(Complex64::new(re, im));
        }
        Ok(KernelTable {
            group_name: sidecar.group_name,
            n: sidecar.n,
            d2: sidecar.d2,
            x_grid,
            u_grid,
            values,
            spectral: sidecar.spectral,
            mu_min: sidecar.mu_min,
            excluded_mass_sq: sidecar.excluded_mass_sq,
            multiplier_label: sidecar.multiplier_label,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct KernelSidecar {
    kind: String,
    format_version: u32,
    group_name: String,
    n: usize,
    d2: usize,
    x_points: usize,
    x_extent: f64,
    u_points: usize,
    u_extent: f64,
    mu_min: f64,
    excluded_mass_sq: f64,
    multiplier_label: String,
    provenance: String,
    spectral: Vec<SpectralTerm>,
}

/// Group convolution f * K for a one-dimensional center, computed through
/// the kernel's spectral record rather than a direct six-fold sum.
///
/// Writing the central dependence of each record term as
/// 2 cos(rho u) = e^{i rho u} + e^{-i rho u}, every term factorizes into a
/// partial central transform of f followed by one twisted projection at
/// lambda = rho (with the sign of the symplectic phase tracking the sign of
/// the central frequency), followed by re-modulation in u:
///
///   (f * K)(x, u) = (2 pi)^{-1} * sum_m w_m c_m sum_{s = +,-}
///        e^{s i rho_m u} * P_s[G_s](x),
///
/// where G_s(y) = sum_v f(y, v) e^{-s i rho_m v} dv and P_s is the twisted
/// projection onto band k_m at |mu| = rho_m with J scaled by s.
///
/// Record nodes at or above the central Nyquist frequency of the data grid
/// are dropped (with a warning): sampled data carries no such frequencies,
/// and evaluating the partial transform there would alias low-frequency
/// content into the node.  Nodes whose partial transform is negligible
/// against the dominant one are skipped for speed.
pub fn group_convolve(
    f: &GroupGridFunction,
    table: &KernelTable,
    group: &HTypeGroup,
    mode: Mode,
) -> Result<GroupGridFunction> {
    if group.d2() != 1 {
        return Err(Error::domain(format!(
            "direct group convolution is implemented for one-dimensional centers; \
             group '{}' has d2 = {}",
            group.name(),
            group.d2()
        )));
    }
    if table.d2 != 1 || table.n != group.n() {
        return Err(Error::structural(
            "kernel table does not match the group (n or center dimension differ)",
        ));
    }
    if f.grid.d2() != 1 {
        return Err(Error::structural("input grid must have a 1-axis center"));
    }
    let spatial = f.grid.spatial().clone();
    if spatial.d1() != group.d1() {
        return Err(Error::structural(format!(
            "input horizontal grid has {} axes; group needs {}",
            spatial.d1(),
            group.d1()
        )));
    }
    let nx = spatial.total_points();
    let ct = f.grid.central_total();
    let dv = f.grid.central().spacing();
    let n = group.n();
    let j1 = &group.bracket_maps()[0];
    let mut base_entries: Vec<(usize, usize, f64)> = Vec::new();
    for a in 0..j1.nrows() {
        for b in 0..j1.ncols() {
            let v = j1[(a, b)];
            if v != 0.0 {
                base_entries.push((a, b, v));
            }
        }
    }

    let mut out = GroupGridFunction::zeros(f.grid.clone());
    let mut warnings: Vec<String> = Vec::new();
    // (2 pi)^{-(d2+n)} from the kernel, times (2 pi)^{+n} because the
    // twisted projection engine already carries (2 pi)^{-n}.
    let c_amp = (2.0 * std::f64::consts::PI).powi(-1);

    // Partial central transforms for every quadrature node and sideband,
    // scored by how much they can contribute; nodes whose data content is
    // negligible against the dominant one are dropped before the expensive
    // projection pass.
    struct Pass {
        k: usize,
        rho: f64,
        sign: f64,
        amp: f64,
        g_vals: Vec<Complex64>,
        score: f64,
    }
    let mut passes: Vec<Pass> = Vec::with_capacity(2 * table.spectral.len());
    // Data sampled at central spacing dv carries no frequencies at or above
    // pi / dv; a record node there would only see its own alias image, so
    // it is dropped rather than resolved.
    let nyquist = std::f64::consts::PI / dv;
    let mut beyond_nyquist = 0usize;
    for term in &table.spectral {
        if term.rho >= nyquist {
            beyond_nyquist += 1;
            continue;
        }
        let amp = c_amp * term.weight * term.coefficient;
        for sign in [1.0f64, -1.0] {
            // Partial central transform at frequency sign * rho.
            let g_vals = exec::map_indexed(nx, mode, |xf| {
                let mut acc = Complex64::new(0.0, 0.0);
                for uf in 0..ct {
                    let v = f.grid.central().coord(uf);
                    let phase = Complex64::new(0.0, -sign * term.rho * v).exp();
                    acc += f.values[xf * ct + uf] * phase;
                }
                acc * dv
            });
            let norm = g_vals.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            passes.push(Pass {
                k: term.k,
                rho: term.rho,
                sign,
                amp,
                g_vals,
                score: amp.abs() * norm,
            });
        }
    }
    if beyond_nyquist > 0 {
        warnings.push(format!(
            "{beyond_nyquist} spectral nodes lie at or above the central Nyquist \
             frequency {nyquist:.3e} of the data grid and were dropped"
        ));
    }
    let top_score = passes.iter().fold(0.0f64, |m, p| m.max(p.score));

    for pass in &passes {
        if pass.score <= 1e-8 * top_score {
            continue;
        }
        let g_fn = crate::grid::GridFunction1 {
            grid: spatial.clone(),
            values: pass.g_vals.clone(),
            warnings: Vec::new(),
        };
        // Phase (i/2) <x, J_mu y> at mu = sign * rho * e_1.
        let entries: Vec<(usize, usize, f64)> = base_entries
            .iter()
            .map(|&(a, b, v)| (a, b, pass.sign * pass.rho * v))
            .collect();
        let proj = twisted::projection_engine(
            n,
            &entries,
            pass.rho,
            &[(pass.k, Complex64::new(1.0, 0.0))],
            &g_fn,
            mode,
        )?;
        warnings.extend(proj.warnings.iter().cloned());
        for xf in 0..nx {
            let p = pass.amp * proj.values[xf];
            if p.norm_sqr() == 0.0 {
                continue;
            }
            for uf in 0..ct {
                let u = f.grid.central().coord(uf);
                let phase = Complex64::new(0.0, pass.sign * pass.rho * u).exp();
                out.values[xf * ct + uf] += p * phase;
            }
        }
    }
    warnings.sort();
    warnings.dedup();
    out.warnings = warnings;
    Ok(out)
}
