//! Polytopal unit balls stored as explicit primal and dual vertex lists.
//!
//! With both lists at hand every sup over `B_X` or `B_{X*}` that is linear
//! (or convex) in each argument is a finite max, which is what makes the
//! exact numerical radius and the CL-space test possible.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp;
use crate::point::{dot, lex_cmp, max_abs_diff};

pub const DEFAULT_PAIRING_TOLERANCE: f64 = 1e-10;

/// Largest dimension for which primal vertices are enumerated from facets.
pub const MAX_ENUMERATION_DIM: usize = 6;

const DEDUP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeBall {
    dim: usize,
    primal: Vec<Vec<f64>>,
    dual: Vec<Vec<f64>>,
    pairing_tolerance: f64,
    /// `(primal index, dual index)` with `⟨f, v⟩ = 1`.
    #[serde(skip)]
    faces: Vec<(usize, usize)>,
}

/// Outcome of [`PolytopeBall::is_cl_space`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ClCertificate {
    /// Every primal vertex lies in `conv(F ∪ -F)` for every maximal face `F`,
    /// so the space is CL and its numerical index is 1.
    Certified,
    /// `vertex` is outside `conv(F ∪ -F)` for the face exposed by `functional`.
    Refuted {
        functional: Vec<f64>,
        face: Vec<Vec<f64>>,
        vertex: Vec<f64>,
        residual: f64,
    },
}

impl ClCertificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, ClCertificate::Certified)
    }
}

impl PolytopeBall {
    /// Builds a ball from both vertex lists and checks the pairing invariants.
    pub fn new(dim: usize, primal: Vec<Vec<f64>>, dual: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerance(dim, primal, dual, DEFAULT_PAIRING_TOLERANCE)
    }

    pub fn with_tolerance(
        dim: usize,
        mut primal: Vec<Vec<f64>>,
        mut dual: Vec<Vec<f64>>,
        pairing_tolerance: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Polytope("dimension must be positive".into()));
        }
        if primal.len() < 2 || dual.len() < 2 {
            return Err(Error::Polytope(format!(
                "degenerate polytope: {} primal and {} dual vertices",
                primal.len(),
                dual.len()
            )));
        }
        for v in primal.iter().chain(dual.iter()) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Polytope("non-finite vertex coordinate".into()));
            }
        }
        check_symmetric(&primal, "primal")?;
        check_symmetric(&dual, "dual")?;
        primal.sort_by(|a, b| lex_cmp(a, b));
        dual.sort_by(|a, b| lex_cmp(a, b));
        for (set, other, name) in [(&primal, &dual, "primal"), (&dual, &primal, "dual")] {
            for v in set.iter() {
                let m = other.iter().map(|f| dot(f, v).abs()).fold(0.0, f64::max);
                if (m - 1.0).abs() > pairing_tolerance.max(1e-9) {
                    return Err(Error::Polytope(format!(
                        "{name} vertex {v:?} has pairing max {m}, expected 1"
                    )));
                }
            }
        }
        let mut faces = Vec::new();
        for (i, v) in primal.iter().enumerate() {
            for (j, f) in dual.iter().enumerate() {
                if (dot(f, v) - 1.0).abs() <= pairing_tolerance.max(1e-9) {
                    faces.push((i, j));
                }
            }
        }
        Ok(Self {
            dim,
            primal,
            dual,
            pairing_tolerance,
            faces,
        })
    }

    /// Ball given by dual generators: the unit ball of `x ↦ max_g |⟨g, x⟩|`.
    /// Generators need not be extreme or symmetric; primal vertices are
    /// enumerated from facet intersections (`dim ≤ 6`).
    pub fn from_dual_generators(dim: usize, generators: &[Vec<f64>]) -> Result<Self> {
        let dual = extreme_points(generators)?;
        let primal = enumerate_vertices(dim, &dual)?;
        Self::new(dim, primal, dual)
    }

    /// Ball given as the absolutely convex hull of primal generators.
    pub fn from_primal_generators(dim: usize, generators: &[Vec<f64>]) -> Result<Self> {
        let primal = extreme_points(generators)?;
        let dual = enumerate_vertices(dim, &primal)?;
        Self::new(dim, primal, dual)
    }

    /// Both sides given as generators; each list is reduced to its extreme
    /// points. Used when both hulls are known in closed form, e.g. for sums.
    pub fn from_generators(
        dim: usize,
        primal_generators: &[Vec<f64>],
        dual_generators: &[Vec<f64>],
    ) -> Result<Self> {
        let primal = extreme_points(primal_generators)?;
        let dual = extreme_points(dual_generators)?;
        Self::new(dim, primal, dual)
    }

    /// `B_{ℓ∞^m}`: primal vertices `{±1}^m`, dual vertices `±e_i`.
    pub fn cube(m: usize) -> Self {
        let primal = sign_vectors(m);
        let dual = cross_vertices(m);
        Self::new(m, primal, dual).expect("cube ball is valid")
    }

    /// `B_{ℓ1^m}`: primal vertices `±e_i`, dual vertices `{±1}^m`.
    pub fn cross(m: usize) -> Self {
        Self::new(m, cross_vertices(m), sign_vectors(m)).expect("cross-polytope ball is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn primal_vertices(&self) -> &[Vec<f64>] {
        &self.primal
    }

    pub fn dual_vertices(&self) -> &[Vec<f64>] {
        &self.dual
    }

    pub fn pairing_tolerance(&self) -> f64 {
        self.pairing_tolerance
    }

    /// Pairs of (primal vertex, dual vertex) with `⟨f, v⟩ = 1`.
    pub fn vertex_pairs(&self) -> impl Iterator<Item = (&[f64], &[f64])> {
        self.faces
            .iter()
            .map(|&(i, j)| (self.primal[i].as_slice(), self.dual[j].as_slice()))
    }

    /// The ball with the roles of the primal and dual vertex lists swapped.
    pub fn polar(&self) -> Self {
        Self::with_tolerance(
            self.dim,
            self.dual.clone(),
            self.primal.clone(),
            self.pairing_tolerance,
        )
        .expect("polar of a valid ball is valid")
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.dual
            .iter()
            .map(|f| dot(f, x).abs())
            .fold(0.0, f64::max)
    }

    pub fn dual_norm(&self, f: &[f64]) -> f64 {
        self.primal
            .iter()
            .map(|v| dot(f, v).abs())
            .fold(0.0, f64::max)
    }

    /// All dual vertices `f` with `f(x) = ‖x‖`, sorted lexicographically.
    pub fn attaining_functionals(&self, x: &[f64]) -> Vec<Vec<f64>> {
        attaining(&self.dual, x, self.pairing_tolerance)
    }

    /// All primal vertices `v` with `f(v) = ‖f‖*`, sorted lexicographically.
    pub fn attaining_points(&self, f: &[f64]) -> Vec<Vec<f64>> {
        attaining(&self.primal, f, self.pairing_tolerance)
    }

    /// Restriction of the norm to the coordinates in `coords` (re-indexed).
    /// The dual ball of a coordinate section is the coordinate projection of
    /// the dual ball.
    pub fn section(&self, coords: &[usize]) -> Result<Self> {
        let projected: Vec<Vec<f64>> = self
            .dual
            .iter()
            .map(|f| coords.iter().map(|&c| f[c]).collect())
            .collect();
        Self::from_dual_generators(coords.len(), &projected)
    }

    /// Tests whether the space is a CL-space: for each maximal face `F` of
    /// the unit ball (the vertices on which a dual vertex attains 1) every
    /// primal vertex must lie in `conv(F ∪ -F)`.
    pub fn is_cl_space(&self) -> Result<ClCertificate> {
        if self.primal.len() < 2 || self.dual.len() < 2 {
            return Err(Error::InvalidArgument("degenerate polytope".into()));
        }
        let tol = self.pairing_tolerance.max(1e-9);
        for f in representatives(&self.dual) {
            let face: Vec<&[f64]> = self
                .primal
                .iter()
                .filter(|v| (dot(f, v) - 1.0).abs() <= tol)
                .map(|v| v.as_slice())
                .collect();
            let negated: Vec<Vec<f64>> = face
                .iter()
                .map(|v| v.iter().map(|x| -x).collect())
                .collect();
            let mut hull = face.clone();
            hull.extend(negated.iter().map(|v| v.as_slice()));
            for v in representatives(&self.primal) {
                if (dot(f, v).abs() - 1.0).abs() <= tol {
                    continue;
                }
                let fit = lp::convex_fit(v, &hull)?;
                if fit.residual > 1e-8 {
                    return Ok(ClCertificate::Refuted {
                        functional: f.to_vec(),
                        face: face.iter().map(|v| v.to_vec()).collect(),
                        vertex: v.to_vec(),
                        residual: fit.residual,
                    });
                }
            }
        }
        Ok(ClCertificate::Certified)
    }
}

fn attaining(set: &[Vec<f64>], x: &[f64], tol: f64) -> Vec<Vec<f64>> {
    let vals: Vec<f64> = set.iter().map(|f| dot(f, x)).collect();
    let m = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if m == 0.0 {
        return Vec::new();
    }
    let slack = tol.max(1e-12) * m.max(1.0);
    let mut out: Vec<Vec<f64>> = set
        .iter()
        .zip(&vals)
        .filter(|(_, &v)| v >= m - slack)
        .map(|(f, _)| f.clone())
        .collect();
    out.sort_by(|a, b| lex_cmp(a, b));
    out
}

/// One member of each `{v, -v}` pair (the lexicographically larger).
fn representatives(set: &[Vec<f64>]) -> impl Iterator<Item = &[f64]> {
    set.iter().filter_map(|v| {
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        (lex_cmp(v, &neg) == Ordering::Greater).then_some(v.as_slice())
    })
}

fn check_symmetric(set: &[Vec<f64>], name: &str) -> Result<()> {
    for v in set {
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        if !set.iter().any(|w| max_abs_diff(w, &neg) <= DEDUP_TOL) {
            return Err(Error::Polytope(format!(
                "{name} vertex list is not symmetric: missing -{v:?}"
            )));
        }
    }
    Ok(())
}

pub(crate) fn sign_vectors(m: usize) -> Vec<Vec<f64>> {
    (0..1usize << m)
        .map(|mask| {
            (0..m)
                .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
                .collect()
        })
        .collect()
}

pub(crate) fn cross_vertices(m: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * m);
    for i in 0..m {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; m];
            v[i] = s;
            out.push(v);
        }
    }
    out
}

/// Symmetrizes, de-duplicates and drops every point that is a convex
/// combination of the others.
pub fn extreme_points(generators: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for g in generators {
        let neg: Vec<f64> = g.iter().map(|x| -x).collect();
        for cand in [g.clone(), neg] {
            if cand.iter().all(|&x| x.abs() <= DEDUP_TOL) {
                continue;
            }
            if !pts.iter().any(|p| max_abs_diff(p, &cand) <= DEDUP_TOL) {
                pts.push(cand);
            }
        }
    }
    if pts.len() < 2 {
        return Err(Error::Polytope("fewer than two nonzero generators".into()));
    }
    let mut keep = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        let others: Vec<&[f64]> = pts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| q.as_slice())
            .collect();
        let fit = lp::convex_fit(p, &others)?;
        if fit.residual > 1e-9 {
            keep.push(p.clone());
        }
    }
    keep.sort_by(|a, b| lex_cmp(a, b));
    Ok(keep)
}

/// Vertices of `{x : |⟨g, x⟩| ≤ 1 for all g}` by brute-force intersection of
/// `dim` facet hyperplanes.
pub fn enumerate_vertices(dim: usize, normals: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if dim > MAX_ENUMERATION_DIM {
        return Err(Error::Polytope(format!(
            "vertex enumeration limited to dim <= {MAX_ENUMERATION_DIM}, got {dim}"
        )));
    }
    let reps: Vec<&[f64]> = representatives(normals).collect();
    if reps.len() < dim {
        return Err(Error::Polytope("unbounded polytope: too few facets".into()));
    }
    let signs = sign_vectors(dim);
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        let rows = DMatrix::from_fn(dim, dim, |r, c| reps[subset[r]][c]);
        let lu = rows.lu();
        if lu.determinant().abs() > 1e-12 {
            for s in &signs {
                let rhs = DVector::from_column_slice(s);
                if let Some(x) = lu.solve(&rhs) {
                    let x: Vec<f64> = x.iter().copied().collect();
                    let feasible = reps.iter().all(|g| dot(g, &x).abs() <= 1.0 + 1e-9);
                    if feasible && !out.iter().any(|p| max_abs_diff(p, &x) <= DEDUP_TOL) {
                        out.push(x);
                    }
                }
            }
        }
        if !next_combination(&mut subset, reps.len()) {
            break;
        }
    }
    if out.is_empty() {
        return Err(Error::Polytope("unbounded polytope: no vertices".into()));
    }
    // snap round-off so that pairing checks are exact on rational data
    for v in &mut out {
        for x in v.iter_mut() {
            let r = x.round();
            if (*x - r).abs() < 1e-12 {
                *x = r;
            }
        }
    }
    out.sort_by(|a, b| lex_cmp(a, b));
    Ok(out)
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_3_3_duals() -> Vec<Vec<f64>> {
        let mut gens = Vec::new();
        for s in sign_vectors(2) {
            gens.push(vec![s[0], s[1], 0.0, 0.0, 0.0]);
            gens.push(vec![0.0, 0.0, s[0], s[1], 0.0]);
        }
        for s in sign_vectors(3) {
            gens.push(vec![0.0, s[0], s[1], 0.0, s[2]]);
        }
        gens
    }

    #[test]
    fn cube_and_cross_are_polar() {
        let c = PolytopeBall::cube(3);
        let x = PolytopeBall::cross(3);
        assert_eq!(c.primal_vertices(), x.dual_vertices());
        assert_eq!(c.polar().primal_vertices(), x.primal_vertices());
        assert_eq!(c.norm(&[0.5, -2.0, 1.0]), 2.0);
        assert_eq!(x.norm(&[0.5, -2.0, 1.0]), 3.5);
    }

    #[test]
    fn dual_norm_of_square() {
        // enumerate the 4 primal vertices (±1, ±1): max |f1 ± f2| = 2
        assert_eq!(PolytopeBall::cube(2).dual_norm(&[1.0, 1.0]), 2.0);
    }

    #[test]
    fn enumeration_recovers_cube_from_cross_normals() {
        let v = enumerate_vertices(3, &cross_vertices(3)).unwrap();
        let mut expected = sign_vectors(3);
        expected.sort_by(|a, b| lex_cmp(a, b));
        assert_eq!(v, expected);
    }

    #[test]
    fn extreme_points_drop_interior_generators() {
        let gens = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.5, 0.5],
            vec![0.2, -0.1],
        ];
        let ext = extreme_points(&gens).unwrap();
        assert_eq!(ext.len(), 4);
    }

    #[test]
    fn rejects_asymmetric_or_unnormalized() {
        assert!(PolytopeBall::new(1, vec![vec![1.0], vec![-1.0]], vec![vec![1.0]]).is_err());
        assert!(
            PolytopeBall::new(1, vec![vec![2.0], vec![-2.0]], vec![vec![1.0], vec![-1.0]]).is_err()
        );
        assert!(PolytopeBall::new(0, vec![], vec![]).is_err());
    }

    #[test]
    fn non_absolute_ball_from_duals() {
        // ‖(x, y)‖ = max(|x|, |x + y|)
        let b = PolytopeBall::from_dual_generators(2, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(b.norm(&[1.0, -1.0]), 1.0);
        assert_eq!(b.norm(&[1.0, 1.0]), 2.0);
        assert_eq!(b.primal_vertices().len(), 4);
    }

    #[test]
    fn attaining_set_and_ties() {
        let c = PolytopeBall::cross(2);
        // (1,1) in l1: dual vertices (1,1) only
        assert_eq!(c.attaining_functionals(&[1.0, 1.0]), vec![vec![1.0, 1.0]]);
        // e1 in l1: (1,1) and (1,-1) both attain
        assert_eq!(
            c.attaining_functionals(&[1.0, 0.0]),
            vec![vec![1.0, -1.0], vec![1.0, 1.0]]
        );
    }

    #[test]
    fn cl_certificates() {
        for m in 1..=4 {
            assert!(PolytopeBall::cube(m).is_cl_space().unwrap().is_certified());
            assert!(PolytopeBall::cross(m).is_cl_space().unwrap().is_certified());
        }
        let x = PolytopeBall::from_dual_generators(5, &example_3_3_duals()).unwrap();
        assert!(x.is_cl_space().unwrap().is_certified());
        let p4 = x.section(&[0, 1, 2, 3]).unwrap();
        assert!(!p4.is_cl_space().unwrap().is_certified());
    }

    #[test]
    fn hexagon_is_not_cl() {
        // regular hexagon: n(X) = 1/2 < 1
        let gens: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / 3.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let h = PolytopeBall::from_primal_generators(2, &gens).unwrap();
        assert_eq!(h.primal_vertices().len(), 6);
        assert!(!h.is_cl_space().unwrap().is_certified());
    }
}
