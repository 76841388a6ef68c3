//! Heisenberg-type group structures: bracket maps, group law, dilations,
//! the homogeneous quasi-norm, and the deterministic symplectic rotation
//! that reduces a general central frequency to the standard one.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for structural matrix identities (skew-symmetry, Clifford
/// relations) — all entries are O(1).
const STRUCTURAL_TOL: f64 = 1e-12;
/// Tolerance for derived identities (orthogonality of the constructed
/// rotation and its defining relation).
const DERIVED_TOL: f64 = 1e-10;

/// A two-step stratified group with bracket maps satisfying the Clifford
/// relations J_i J_j + J_j J_i = -2 delta_ij Id.
#[derive(Debug, Clone)]
pub struct HTypeGroup {
    name: String,
    n: usize,
    d2: usize,
    j: Vec<DMatrix<f64>>,
}

/// A point (x, u) with horizontal part x in R^{d1} and central part u in
/// R^{d2}.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

impl Point {
    pub fn new(x: Vec<f64>, u: Vec<f64>) -> Self {
        Point { x, u }
    }

    pub fn origin(d1: usize, d2: usize) -> Self {
        Point {
            x: vec![0.0; d1],
            u: vec![0.0; d2],
        }
    }
}

/// A nonzero frequency in the dual of the center.
#[derive(Debug, Clone)]
pub struct CentralFrequency {
    mu: Vec<f64>,
    norm: f64,
}

impl CentralFrequency {
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        let norm = mu.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::domain("central frequency must be nonzero and finite"));
        }
        Ok(CentralFrequency { mu, norm })
    }

    pub fn components(&self) -> &[f64] {
        &self.mu
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Unit vector mu / |mu|.
    pub fn direction(&self) -> Vec<f64> {
        self.mu.iter().map(|v| v / self.norm).collect()
    }
}

/// Validation outcome for a candidate list of bracket maps.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    /// Human-readable description of the first violated condition, if any.
    pub first_violation: Option<String>,
}

/// Checks skew-symmetry and the Clifford anticommutation relations for a
/// candidate family of bracket maps.
pub fn validate_htype(j: &[DMatrix<f64>]) -> Result<ValidationReport> {
    if j.is_empty() {
        return Err(Error::structural("no bracket maps supplied"));
    }
    let d1 = j[0].nrows();
    for (i, m) in j.iter().enumerate() {
        if m.nrows() != d1 || m.ncols() != d1 {
            return Err(Error::structural(format!(
                "bracket map {i} has shape {}x{}, expected {d1}x{d1}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    if d1 % 2 != 0 {
        return Err(Error::structural(format!(
            "horizontal dimension {d1} must be even"
        )));
    }
    for (i, m) in j.iter().enumerate() {
        let skew = m + m.transpose();
        if skew.amax() > STRUCTURAL_TOL {
            return Ok(ValidationReport {
                pass: false,
                first_violation: Some(format!("J_{} is not skew-symmetric", i + 1)),
            });
        }
    }
    let id = DMatrix::<f64>::identity(d1, d1);
    for a in 0..j.len() {
        for b in a..j.len() {
            let anti = &j[a] * &j[b] + &j[b] * &j[a];
            let expect = if a == b { -2.0 * &id } else { DMatrix::zeros(d1, d1) };
            if (anti - expect).amax() > STRUCTURAL_TOL {
                return Ok(ValidationReport {
                    pass: false,
                    first_violation: Some(format!(
                        "anticommutation fails at pair ({}, {})",
                        a + 1,
                        b + 1
                    )),
                });
            }
        }
    }
    Ok(ValidationReport {
        pass: true,
        first_violation: None,
    })
}

impl HTypeGroup {
    /// Builds a group from bracket maps, validating the structure.
    pub fn new(name: impl Into<String>, j: Vec<DMatrix<f64>>) -> Result<Self> {
        let report = validate_htype(&j)?;
        if !report.pass {
            return Err(Error::structural(format!(
                "bracket maps rejected: {}",
                report.first_violation.unwrap_or_default()
            )));
        }
        let d1 = j[0].nrows();
        if j.len() >= d1 {
            return Err(Error::structural(format!(
                "center dimension {} must be smaller than horizontal dimension {d1}",
                j.len()
            )));
        }
        Ok(HTypeGroup {
            name: name.into(),
            n: d1 / 2,
            d2: j.len(),
            j,
        })
    }

    /// Built-in groups: "heisenberg-<n>" (center dimension 1) and
    /// "quaternionic" (horizontal dimension 4, center dimension 3, bracket
    /// maps given by left multiplication by i, j, k on the quaternions).
    pub fn builtin(name: &str) -> Result<Self> {
        if let Some(suffix) = name.strip_prefix("heisenberg-") {
            let n: usize = suffix
                .parse()
                .map_err(|_| Error::domain(format!("bad builtin name '{name}'")))?;
            if n == 0 {
                return Err(Error::domain("heisenberg-<n> requires n >= 1"));
            }
            return Self::new(name, vec![standard_symplectic_matrix(n)]);
        }
        if name == "quaternionic" {
            let li = DMatrix::from_row_slice(
                4,
                4,
                &[
                    0.0, -1.0, 0.0, 0.0, //
                    1.0, 0.0, 0.0, 0.0, //
                    0.0, 0.0, 0.0, -1.0, //
                    0.0, 0.0, 1.0, 0.0,
                ],
            );
            let lj = DMatrix::from_row_slice(
                4,
                4,
                &[
                    0.0, 0.0, -1.0, 0.0, //
                    0.0, 0.0, 0.0, 1.0, //
                    1.0, 0.0, 0.0, 0.0, //
                    0.0, -1.0, 0.0, 0.0,
                ],
            );
            let lk = DMatrix::from_row_slice(
                4,
                4,
                &[
                    0.0, 0.0, 0.0, -1.0, //
                    0.0, 0.0, -1.0, 0.0, //
                    0.0, 1.0, 0.0, 0.0, //
                    1.0, 0.0, 0.0, 0.0,
                ],
            );
            return Self::new(name, vec![li, lj, lk]);
        }
        Err(Error::domain(format!("unknown builtin group '{name}'")))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Half the horizontal dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Horizontal dimension d1 = 2n.
    pub fn d1(&self) -> usize {
        2 * self.n
    }

    /// Center dimension.
    pub fn d2(&self) -> usize {
        self.d2
    }

    /// Topological dimension d1 + d2.
    pub fn dim(&self) -> usize {
        self.d1() + self.d2
    }

    /// Homogeneous dimension d1 + 2 d2 (governs volume growth under
    /// dilations).
    pub fn homogeneous_dim(&self) -> usize {
        self.d1() + 2 * self.d2
    }

    pub fn bracket_maps(&self) -> &[DMatrix<f64>] {
        &self.j
    }

    /// J_mu = sum_i mu_i J_i. Satisfies J_mu^2 = -|mu|^2 Id.
    pub fn j_map(&self, mu: &CentralFrequency) -> Result<DMatrix<f64>> {
        if mu.components().len() != self.d2 {
            return Err(Error::structural(format!(
                "frequency has {} components, group center has {}",
                mu.components().len(),
                self.d2
            )));
        }
        let d1 = self.d1();
        let mut acc = DMatrix::<f64>::zeros(d1, d1);
        for (c, m) in mu.components().iter().zip(&self.j) {
            acc += m * *c;
        }
        Ok(acc)
    }

    /// Bracket [x, y] in the center, component k given by x^T J_k y.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let d1 = self.d1();
        if x.len() != d1 || y.len() != d1 {
            return Err(Error::structural("bracket arguments must have length d1"));
        }
        let xv = DVector::from_column_slice(x);
        let yv = DVector::from_column_slice(y);
        Ok(self.j.iter().map(|jk| (xv.transpose() * jk * &yv)[0]).collect())
    }

    /// Symplectic form omega_mu(x, y) = x^T J_mu y = <mu, [x, y]>.
    pub fn symplectic_form(&self, mu: &CentralFrequency, x: &[f64], y: &[f64]) -> Result<f64> {
        let b = self.bracket(x, y)?;
        Ok(b.iter().zip(mu.components()).map(|(bi, mi)| bi * mi).sum())
    }

    /// Group law (x, u)(y, v) = (x + y, u + v + [x, y]/2).
    pub fn multiply(&self, g: &Point, h: &Point) -> Result<Point> {
        self.check_point(g)?;
        self.check_point(h)?;
        let bracket = self.bracket(&g.x, &h.x)?;
        let x = g.x.iter().zip(&h.x).map(|(a, b)| a + b).collect();
        let u = g
            .u
            .iter()
            .zip(&h.u)
            .zip(&bracket)
            .map(|((a, b), c)| a + b + 0.5 * c)
            .collect();
        Ok(Point { x, u })
    }

    /// Group inverse (-x, -u).
    pub fn inverse(&self, g: &Point) -> Point {
        Point {
            x: g.x.iter().map(|v| -v).collect(),
            u: g.u.iter().map(|v| -v).collect(),
        }
    }

    /// Anisotropic dilation delta_r(x, u) = (r x, r^2 u).
    pub fn dilate(&self, r: f64, g: &Point) -> Point {
        Point {
            x: g.x.iter().map(|v| r * v).collect(),
            u: g.u.iter().map(|v| r * r * v).collect(),
        }
    }

    /// Homogeneous quasi-norm (|x|^4 + |u|^2)^{1/4}; exactly homogeneous of
    /// degree one under dilations.
    pub fn homogeneous_norm(&self, g: &Point) -> f64 {
        let x2: f64 = g.x.iter().map(|v| v * v).sum();
        let u2: f64 = g.u.iter().map(|v| v * v).sum();
        (x2 * x2 + u2).powf(0.25)
    }

    /// Deterministic orthogonal T with T^T J_{mu/|mu|} T = J_std, built by
    /// symplectic Gram–Schmidt over standard basis candidates: each accepted
    /// residual a_i is paired with b_i = -J_{mu/|mu|} a_i; candidates whose
    /// residual against the accumulated span falls below 1e-8 are skipped.
    pub fn rotation(&self, mu: &CentralFrequency) -> Result<DMatrix<f64>> {
        let d1 = self.d1();
        let n = self.n;
        let jbar = {
            let unit = CentralFrequency::new(mu.direction())?;
            self.j_map(&unit)?
        };
        let mut a_cols: Vec<DVector<f64>> = Vec::with_capacity(n);
        let mut b_cols: Vec<DVector<f64>> = Vec::with_capacity(n);
        for cand_idx in 0..d1 {
            if a_cols.len() == n {
                break;
            }
            let mut v = DVector::<f64>::zeros(d1);
            v[cand_idx] = 1.0;
            // remove components along the span built so far
            for w in a_cols.iter().chain(&b_cols) {
                let coeff = w.dot(&v);
                v -= w * coeff;
            }
            let norm = v.norm();
            if norm < 1e-8 {
                continue;
            }
            let a = v / norm;
            let b = -&jbar * &a;
            a_cols.push(a);
            b_cols.push(b);
        }
        if a_cols.len() < n {
            return Err(Error::structural(
                "rotation construction exhausted candidate vectors",
            ));
        }
        let mut t = DMatrix::<f64>::zeros(d1, d1);
        for i in 0..n {
            t.set_column(i, &a_cols[i]);
            t.set_column(n + i, &b_cols[i]);
        }
        // postconditions: orthogonality and the defining relation
        let orth_defect = (t.transpose() * &t - DMatrix::identity(d1, d1)).amax();
        if orth_defect > DERIVED_TOL {
            return Err(Error::structural(format!(
                "rotation not orthogonal (defect {orth_defect:.3e})"
            )));
        }
        let relation_defect =
            (t.transpose() * &jbar * &t - standard_symplectic_matrix(n)).amax();
        if relation_defect > DERIVED_TOL {
            return Err(Error::structural(format!(
                "rotation defining relation violated (defect {relation_defect:.3e})"
            )));
        }
        Ok(t)
    }

    fn check_point(&self, g: &Point) -> Result<()> {
        if g.x.len() != self.d1() || g.u.len() != self.d2 {
            return Err(Error::structural(format!(
                "point has shape ({}, {}), group expects ({}, {})",
                g.x.len(),
                g.u.len(),
                self.d1(),
                self.d2
            )));
        }
        Ok(())
    }

    /// Serializes to the group-definition JSON document.
    pub fn to_json(&self) -> Result<String> {
        let doc = GroupDocument {
            name: Some(self.name.clone()),
            n: self.n,
            d2: self.d2,
            j: self
                .j
                .iter()
                .map(|m| m.transpose().as_slice().to_vec()) // row-major
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Parses the group-definition JSON document
    /// {"n": int, "d2": int, "J": [[row-major d1 x d1 reals], ...]}.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GroupDocument = serde_json::from_str(text)?;
        let d1 = 2 * doc.n;
        if doc.j.len() != doc.d2 {
            return Err(Error::structural(format!(
                "document declares d2={} but supplies {} matrices",
                doc.d2,
                doc.j.len()
            )));
        }
        let mats = doc
            .j
            .iter()
            .map(|flat| {
                if flat.len() != d1 * d1 {
                    return Err(Error::structural(format!(
                        "matrix has {} entries, expected {}",
                        flat.len(),
                        d1 * d1
                    )));
                }
                Ok(DMatrix::from_row_slice(d1, d1, flat))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.name.unwrap_or_else(|| "custom".into()), mats)
    }
}

/// The standard symplectic matrix [[0, I], [-I, 0]] on R^{2n}; the standard
/// form is omega(z, w) = z^T J_std w.
pub fn standard_symplectic_matrix(n: usize) -> DMatrix<f64> {
    let d1 = 2 * n;
    let mut j = DMatrix::<f64>::zeros(d1, d1);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

#[derive(Serialize, Deserialize)]
struct GroupDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    n: usize,
    d2: usize,
    #[serde(rename = "J")]
    j: Vec<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_point(g: &HTypeGroup, rng: &mut impl Rng) -> Point {
        Point {
            x: (0..g.d1()).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            u: (0..g.d2()).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        }
    }

    #[test]
    fn builtin_groups_validate() {
        let h1 = HTypeGroup::builtin("heisenberg-1").unwrap();
        assert_eq!((h1.n(), h1.d2(), h1.homogeneous_dim()), (1, 1, 4));
        let h3 = HTypeGroup::builtin("heisenberg-3").unwrap();
        assert_eq!((h3.d1(), h3.dim()), (6, 7));
        let q = HTypeGroup::builtin("quaternionic").unwrap();
        assert_eq!((q.n(), q.d2(), q.homogeneous_dim()), (2, 3, 10));
        assert!(HTypeGroup::builtin("octonionic").is_err());
    }

    #[test]
    fn validation_rejects_repeated_map() {
        let j = standard_symplectic_matrix(1);
        let report = validate_htype(&[j.clone(), j]).unwrap();
        assert!(!report.pass);
        assert!(report.first_violation.unwrap().contains("(1, 2)"));
    }

    #[test]
    fn group_construction_rejects_center_as_large_as_horizontal() {
        // the relations alone cannot distinguish J and -J as a pair (the
        // anticommutator already fails), but group construction must also
        // enforce d2 < d1 even when a candidate passes the matrix checks
        let j = standard_symplectic_matrix(1);
        let k = -standard_symplectic_matrix(1);
        let report = validate_htype(&[j.clone(), k.clone()]).unwrap();
        assert!(!report.pass);
        assert!(HTypeGroup::new("bad", vec![j, k]).is_err());
    }

    #[test]
    fn multiply_matches_worked_example() {
        let g = HTypeGroup::builtin("heisenberg-1").unwrap();
        let a = Point::new(vec![1.0, 0.0], vec![0.0]);
        let b = Point::new(vec![0.0, 1.0], vec![0.0]);
        let p = g.multiply(&a, &b).unwrap();
        assert_eq!(p.x, vec![1.0, 1.0]);
        assert_relative_eq!(p.u[0], 0.5);
    }

    #[test]
    fn central_elements_commute_and_translate() {
        let g = HTypeGroup::builtin("quaternionic").unwrap();
        let a = Point::new(vec![1.0, -0.5, 0.25, 2.0], vec![0.1, 0.2, 0.3]);
        let c = Point::new(vec![0.0; 4], vec![1.0, -1.0, 0.5]);
        let p = g.multiply(&a, &c).unwrap();
        let q = g.multiply(&c, &a).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.x, a.x);
        assert_relative_eq!(p.u[0], 1.1);
    }

    #[test]
    fn group_axioms_hold_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in ["heisenberg-1", "heisenberg-2", "quaternionic"] {
            let g = HTypeGroup::builtin(name).unwrap();
            for _ in 0..200 {
                let a = random_point(&g, &mut rng);
                let b = random_point(&g, &mut rng);
                let c = random_point(&g, &mut rng);
                let ab_c = g.multiply(&g.multiply(&a, &b).unwrap(), &c).unwrap();
                let a_bc = g.multiply(&a, &g.multiply(&b, &c).unwrap()).unwrap();
                for (p, q) in ab_c.x.iter().zip(&a_bc.x) {
                    assert_relative_eq!(p, q, epsilon = 1e-12);
                }
                for (p, q) in ab_c.u.iter().zip(&a_bc.u) {
                    assert_relative_eq!(p, q, epsilon = 1e-12);
                }
                let inv = g.multiply(&a, &g.inverse(&a)).unwrap();
                assert!(inv.x.iter().chain(&inv.u).all(|v| v.abs() < 1e-14));
            }
        }
    }

    #[test]
    fn norm_is_homogeneous_and_left_invariant_as_quasimetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = HTypeGroup::builtin("quaternionic").unwrap();
        for _ in 0..100 {
            let p = random_point(&g, &mut rng);
            let r: f64 = rng.gen_range(0.0..3.0);
            assert_relative_eq!(
                g.homogeneous_norm(&g.dilate(r, &p)),
                r * g.homogeneous_norm(&p),
                epsilon = 1e-12
            );
            // d(ag, ah) = d(g, h) where d(g, h) = ||g^{-1} h||
            let a = random_point(&g, &mut rng);
            let h = random_point(&g, &mut rng);
            let lhs = g.homogeneous_norm(
                &g.multiply(
                    &g.inverse(&g.multiply(&a, &p).unwrap()),
                    &g.multiply(&a, &h).unwrap(),
                )
                .unwrap(),
            );
            let rhs = g.homogeneous_norm(&g.multiply(&g.inverse(&p), &h).unwrap());
            assert_relative_eq!(lhs, rhs, epsilon = 1e-10);
        }
    }

    #[test]
    fn norm_closed_form_example() {
        let g = HTypeGroup::builtin("heisenberg-1").unwrap();
        let p = Point::new(vec![1.0, 0.0], vec![1.0]);
        assert_relative_eq!(g.homogeneous_norm(&p), 2.0f64.powf(0.25), epsilon = 1e-14);
        let q = Point::new(vec![0.6, -0.8], vec![0.0]);
        assert_relative_eq!(g.homogeneous_norm(&q), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn quasi_triangle_constant_is_moderate() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for name in ["heisenberg-1", "quaternionic"] {
            let g = HTypeGroup::builtin(name).unwrap();
            let mut worst: f64 = 0.0;
            for _ in 0..2000 {
                let a = random_point(&g, &mut rng);
                let b = random_point(&g, &mut rng);
                let lhs = g.homogeneous_norm(&g.multiply(&a, &b).unwrap());
                let rhs = g.homogeneous_norm(&a) + g.homogeneous_norm(&b);
                if rhs > 1e-12 {
                    worst = worst.max(lhs / rhs);
                }
            }
            assert!(worst < 2.0, "quasi-triangle constant {worst} too large on {name}");
        }
    }

    #[test]
    fn volume_of_unit_ball_scales_with_homogeneous_dimension() {
        // Monte Carlo measure of {||g|| <= R} vs R^Q * measure(R=1)
        let g = HTypeGroup::builtin("heisenberg-1").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let r = 1.7f64;
        let box_half = r.max(1.0) * 1.05;
        let (mut in_unit, mut in_r) = (0u64, 0u64);
        let samples = 600_000;
        for _ in 0..samples {
            let p = Point::new(
                vec![
                    rng.gen_range(-box_half..box_half),
                    rng.gen_range(-box_half..box_half),
                ],
                vec![rng.gen_range(-box_half * box_half..box_half * box_half)],
            );
            let nrm = g.homogeneous_norm(&p);
            if nrm <= 1.0 {
                in_unit += 1;
            }
            if nrm <= r {
                in_r += 1;
            }
        }
        // identical sampling box, so the count ratio estimates the volume ratio
        let ratio = in_r as f64 / in_unit as f64;
        let expect = r.powi(g.homogeneous_dim() as i32);
        assert!(
            (ratio / expect - 1.0).abs() < 0.02,
            "volume ratio {ratio} vs homogeneity {expect}"
        );
    }

    #[test]
    fn j_map_linearity_and_clifford_square() {
        let g = HTypeGroup::builtin("quaternionic").unwrap();
        let mu = CentralFrequency::new(vec![1.0, 1.0, 1.0]).unwrap();
        let jm = g.j_map(&mu).unwrap();
        let sq = &jm * &jm + 3.0 * DMatrix::<f64>::identity(4, 4);
        assert!(sq.amax() < 1e-12, "J_mu^2 != -|mu|^2 I");
        // linearity: mu = 2 e1
        let mu2 = CentralFrequency::new(vec![2.0, 0.0, 0.0]).unwrap();
        let diff = g.j_map(&mu2).unwrap() - 2.0 * &g.bracket_maps()[0];
        assert!(diff.amax() == 0.0);
        // <J_mu x, .> pairs with mu . [x, y]
        let x = [0.3, -1.0, 0.7, 0.2];
        let y = [1.1, 0.4, -0.6, 0.9];
        let direct = g.symplectic_form(&mu, &x, &y).unwrap();
        let via_bracket: f64 = g
            .bracket(&x, &y)
            .unwrap()
            .iter()
            .zip(mu.components())
            .map(|(b, m)| b * m)
            .sum();
        assert_relative_eq!(direct, via_bracket, epsilon = 1e-13);
    }

    #[test]
    fn rotation_defining_relation_across_frequencies() {
        let q = HTypeGroup::builtin("quaternionic").unwrap();
        let cases = [
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.3, -1.2, 0.4],
            vec![1.0, 1.0, 1.0],
        ];
        for mu_raw in cases {
            let mu = CentralFrequency::new(mu_raw).unwrap();
            let t = q.rotation(&mu).unwrap();
            let unit = CentralFrequency::new(mu.direction()).unwrap();
            let defect =
                (t.transpose() * q.j_map(&unit).unwrap() * &t - standard_symplectic_matrix(2))
                    .amax();
            assert!(defect < 1e-12, "defining relation defect {defect}");
            let orth = (t.transpose() * &t - DMatrix::<f64>::identity(4, 4)).amax();
            assert!(orth < 1e-12);
            // omega_mu(T e_i, T e_{n+i}) = |mu|
            for i in 0..q.n() {
                let ei: Vec<f64> = t.column(i).iter().copied().collect();
                let fi: Vec<f64> = t.column(q.n() + i).iter().copied().collect();
                assert_relative_eq!(
                    q.symplectic_form(&mu, &ei, &fi).unwrap(),
                    mu.norm(),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn rotation_is_identity_on_standard_heisenberg() {
        let g = HTypeGroup::builtin("heisenberg-1").unwrap();
        let mu = CentralFrequency::new(vec![1.0]).unwrap();
        let t = g.rotation(&mu).unwrap();
        assert!((t - DMatrix::<f64>::identity(2, 2)).amax() < 1e-14);
    }

    #[test]
    fn json_roundtrip_preserves_structure() {
        let g = HTypeGroup::builtin("quaternionic").unwrap();
        let text = g.to_json().unwrap();
        let back = HTypeGroup::from_json(&text).unwrap();
        assert_eq!(back.name(), "quaternionic");
        assert_eq!(back.d2(), 3);
        for (a, b) in g.bracket_maps().iter().zip(back.bracket_maps()) {
            assert!((a - b).amax() == 0.0);
        }
        // malformed: declared d2 inconsistent with matrix count
        let bad = r#"{"n": 1, "d2": 2, "J": [[0.0, 1.0, -1.0, 0.0]]}"#;
        assert!(HTypeGroup::from_json(bad).is_err());
    }
}
