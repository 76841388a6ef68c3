//! Joint functional calculus on group grid functions.
//!
//! Data sampled on a periodic central box decomposes into discrete central
//! frequency modes mu on the dual lattice.  A spectral multiplier of the
//! sub-Laplacian / central-derivative pair acts mode by mode: the partial
//! central transform f^mu is hit with sum_k coeff(k, |mu|) Pi_k^mu (the
//! twisted band projections at frequency mu), and the central transform is
//! inverted.  The mu = 0 mode is annihilated — every multiplier accepted
//! here vanishes near the bottom of the spectrum, and the discrete zero
//! mode is the measure-zero hyperplane of the continuum picture.
//!
//! The box must be large enough for the intended data: if the input is
//! concentrated inside the box but the output piles up mass at the box
//! edges, the periodic model has wrapped genuinely distinct translates onto
//! each other and the run fails with an accuracy error.  Inputs that
//! already fill the box (global central oscillations) are taken as
//! torus-native and exempt from that check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Mode;
use crate::fftutil::{transform_axis, CenteredDft};
use crate::grid::{GridFunction1, GroupGrid, GroupGridFunction};
use crate::group::{CentralFrequency, HTypeGroup};
use crate::kernel::BAND_CAP;
use crate::multiplier::SpectralCoefficients;
use crate::twisted;

/// Relative squared-mass threshold below which a central mode of the input
/// is treated as empty and skipped without a projection pass.
const MODE_SCREEN: f64 = 1e-26;

/// Output edge-mass fraction above which the central box is deemed too
/// small (wrap-around), provided the input itself was interior.
const WRAP_LIMIT: f64 = 1e-4;

/// Input edge-mass fraction below which the input counts as interior.
const INTERIOR_LIMIT: f64 = 5e-5;

/// Fraction of squared sample mass lying in the outermost central layer
/// (any central index at either end of its axis).
fn central_edge_fraction(values: &[Complex64], grid: &GroupGrid) -> f64 {
    let ct = grid.central_total();
    let pts = grid.central().points;
    let edge_mask: Vec<bool> = (0..ct)
        .map(|uf| {
            grid.central_unravel(uf)
                .iter()
                .any(|&m| m == 0 || m + 1 == pts)
        })
        .collect();
    let mut edge = 0.0;
    let mut total = 0.0;
    for (i, v) in values.iter().enumerate() {
        let e = v.norm_sqr();
        total += e;
        if edge_mask[i % ct] {
            edge += e;
        }
    }
    if total <= 0.0 {
        0.0
    } else {
        edge / total
    }
}

/// Applies the joint spectral multiplier to a function on the group grid.
///
/// Per discrete central frequency mu != 0 with live bands, one twisted
/// projection pass computes sum_k coeff(k, |mu|) Pi_k^mu on the partial
/// transform; modes carrying a negligible share of the input's spectral
/// mass (relative squared mass below 1e-26) are zeroed without a pass.
/// Linear in both the multiplier and the data.
///
/// Errors: domain if the coefficient source has unbounded support; budget
/// if a single mode would touch more Laguerre bands than the synthesis cap;
/// accuracy if the output concentrates more than 1e-4 of its mass on the
/// central box edge while the input was interior (box too small).
pub fn apply_multiplier(
    f_spec: &(impl SpectralCoefficients + ?Sized),
    f: &GroupGridFunction,
    group: &HTypeGroup,
    mode: Mode,
) -> Result<GroupGridFunction> {
    let grid = &f.grid;
    if grid.spatial().d1() != group.d1() || grid.d2() != group.d2() {
        return Err(Error::structural(format!(
            "grid dimensions ({}, {}) do not match group '{}' ({}, {})",
            grid.spatial().d1(),
            grid.d2(),
            group.name(),
            group.d1(),
            group.d2()
        )));
    }
    let (sa, sb) = f_spec.s_support();
    if !(sb.is_finite() && sb > 0.0) {
        return Err(Error::domain(format!(
            "coefficient source '{}' reports unbounded support; the per-mode band sum \
             needs a finite band",
            f_spec.record_label()
        )));
    }
    let n = group.n();
    let spatial = grid.spatial().clone();
    let nx = spatial.total_points();
    let ct = grid.central_total();
    let pts = grid.central().points;
    let d2 = grid.d2();

    let mut work = f.values.clone();
    let dft = CenteredDft::new(pts);
    let mut shape = vec![nx];
    shape.extend(std::iter::repeat(pts).take(d2));
    for ax in 0..d2 {
        transform_axis(&mut work, &shape, 1 + ax, &dft, false);
    }

    let total_spec: f64 = work.iter().map(|v| v.norm_sqr()).sum();
    let mode_energy: Vec<f64> = (0..ct)
        .map(|mf| (0..nx).map(|xf| work[xf * ct + mf].norm_sqr()).sum())
        .collect();

    let mut warnings = f.warnings.clone();
    let mut zero_mode_energy = 0.0;
    let lo_lambda = (sa.max(0.0)).powi(2);
    let hi_lambda = sb * sb;

    for mf in 0..ct {
        let idx = grid.central_unravel(mf);
        let mu_vec: Vec<f64> = idx
            .iter()
            .map(|&m| grid.central().dual_coord(m))
            .collect();
        let mu_norm = mu_vec.iter().map(|c| c * c).sum::<f64>().sqrt();
        let annihilate = |work: &mut Vec<Complex64>| {
            for xf in 0..nx {
                work[xf * ct + mf] = Complex64::new(0.0, 0.0);
            }
        };
        if mu_norm == 0.0 {
            zero_mode_energy += mode_energy[mf];
            annihilate(&mut work);
            continue;
        }
        if total_spec > 0.0 && mode_energy[mf] <= MODE_SCREEN * total_spec {
            annihilate(&mut work);
            continue;
        }
        // Bands with (2k+n) * |mu| inside the support.
        let k_hi_f = (hi_lambda / mu_norm - n as f64) / 2.0;
        if k_hi_f < 0.0 {
            annihilate(&mut work);
            continue;
        }
        let k_lo = ((lo_lambda / mu_norm - n as f64) / 2.0).ceil().max(0.0) as usize;
        let k_hi = k_hi_f.floor() as usize;
        if k_hi >= k_lo && k_hi - k_lo > BAND_CAP {
            return Err(Error::budget(format!(
                "mode |mu| = {mu_norm:.3e} meets {} Laguerre bands; enlarge the central \
                 frequency spacing or narrow the multiplier",
                k_hi - k_lo + 1
            )));
        }
        let mut terms: Vec<(usize, Complex64)> = Vec::new();
        for k in k_lo..=k_hi {
            if f_spec.bracket_weight(k, n) == 0.0 {
                continue;
            }
            let c = f_spec.coefficient(k, n, mu_norm);
            if c != 0.0 {
                terms.push((k, Complex64::new(c, 0.0)));
            }
        }
        if terms.is_empty() {
            annihilate(&mut work);
            continue;
        }
        let g_vals: Vec<Complex64> = (0..nx).map(|xf| work[xf * ct + mf]).collect();
        let g_fn = GridFunction1 {
            grid: spatial.clone(),
            values: g_vals,
            warnings: Vec::new(),
        };
        let mu = CentralFrequency::new(mu_vec)?;
        let proj = twisted::project_pi_combination(&terms, &mu, &g_fn, group, mode)?;
        warnings.extend(proj.warnings.iter().cloned());
        for xf in 0..nx {
            work[xf * ct + mf] = proj.values[xf];
        }
    }

    for ax in 0..d2 {
        transform_axis(&mut work, &shape, 1 + ax, &dft, true);
    }

    if total_spec > 0.0 && zero_mode_energy > 1e-8 * total_spec {
        warnings.push(format!(
            "central mean mode carried {:.3e} of the spectral mass and was annihilated",
            zero_mode_energy / total_spec
        ));
    }
    warnings.sort();
    warnings.dedup();

    let out = GroupGridFunction {
        grid: grid.clone(),
        values: work,
        warnings,
    };
    let out_frac = central_edge_fraction(&out.values, grid);
    if out_frac > WRAP_LIMIT {
        let in_frac = central_edge_fraction(&f.values, grid);
        if in_frac <= INTERIOR_LIMIT {
            return Err(Error::Accuracy {
                message: format!(
                    "output concentrates {out_frac:.3e} of its mass on the central box \
                     edge while the input was interior; the box is too small for this \
                     multiplier (wrap-around)"
                ),
                estimate: out_frac,
            });
        }
    }
    Ok(out)
}
