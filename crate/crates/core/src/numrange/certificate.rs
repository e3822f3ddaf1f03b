//! Positivity certificate for `n(X)`: if the only operator annihilated by a
//! finite family of pairs `(x_i, f_i) ∈ Π(X)` is zero, the smallest singular
//! value of `T ↦ (f_i(T x_i))_i` bounds `v(T)/‖T‖` from below.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::search;
use crate::spaces::{Kind, NormSpace, SupportPair};

/// Relative rank cut-off on singular values.
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Pairs must satisfy `‖x‖ = 1`, `‖f‖* ≤ 1` and `f(x) = 1` to this accuracy.
pub const PAIR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRadiusCertificate {
    pub pairs: usize,
    pub rank: usize,
    pub columns: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `a·b` with `‖y‖ ≤ a‖y‖₂` and `‖y‖₂ ≤ b‖y‖`; bounds `‖T‖/‖T‖_F`.
    pub norm_constant: f64,
    /// `σ_min / (√N · a·b)` when the system has full rank.
    pub bound: Option<f64>,
    /// A unit-Frobenius operator in the numerical kernel when rank-deficient.
    pub kernel: Option<OperatorMatrix>,
}

impl ZeroRadiusCertificate {
    pub fn is_certified(&self) -> bool {
        self.bound.is_some()
    }
}

/// Row `f ⊗ x` of the constraint matrix: `f(Tx) = Σ_{r,c} f_r x_c a_{rc}`.
pub fn constraint_row(x: &[f64], f: &[f64]) -> Vec<f64> {
    f.iter()
        .flat_map(|fr| x.iter().map(move |xc| fr * xc))
        .collect()
}

pub fn constraint_matrix(pairs: &[SupportPair]) -> DMatrix<f64> {
    let d = pairs.first().map_or(0, |p| p.x.len());
    let rows: Vec<f64> = pairs
        .iter()
        .flat_map(|p| constraint_row(&p.x, &p.f))
        .collect();
    DMatrix::from_row_slice(pairs.len(), d * d, &rows)
}

/// Builds and solves the zero-radius system for `pairs`.
pub fn zero_radius_certificate(
    x: &NormSpace,
    pairs: &[SupportPair],
) -> Result<ZeroRadiusCertificate> {
    let d = x.dim();
    let n = pairs.len();
    if n < d * d {
        return Err(Error::InvalidArgument(format!(
            "certificate impossible: {n} pairs for {} unknown entries",
            d * d
        )));
    }
    for (i, p) in pairs.iter().enumerate() {
        if p.x.len() != d || p.f.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.x.len().max(p.f.len()),
            });
        }
        if !p.is_valid(x, PAIR_TOLERANCE)? {
            return Err(Error::InvalidArgument(format!(
                "pair {i} is not a norm-one supporting pair"
            )));
        }
    }
    let l = constraint_matrix(pairs);
    let svd = l.svd(false, true);
    let sv = &svd.singular_values;
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    let (kmin, sigma_min) = sv
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty spectrum");
    let cut = RANK_TOLERANCE * sigma_max;
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let (a, b) = x.euclidean_constants();
    let norm_constant = a * b;
    let full = rank == d * d && sigma_max > 0.0;
    let bound = full.then(|| sigma_min / ((n as f64).sqrt() * norm_constant));
    let kernel = if full {
        None
    } else {
        let vt = svd.v_t.expect("requested V^T");
        let row: Vec<f64> = vt.row(kmin).iter().copied().collect();
        Some(OperatorMatrix::new(d, row)?)
    };
    Ok(ZeroRadiusCertificate {
        pairs: n,
        rank,
        columns: d * d,
        sigma_min,
        sigma_max,
        norm_constant,
        bound,
        kernel,
    })
}

/// The points `x_1 … x_8` and functionals `x*_1 … x*_7` of the positivity
/// argument for the max-of-Euclidean-pairs norm on `R³`.
pub fn example_3_2_elements() -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let points = vec![
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![s, s, 0.0],
        vec![0.0, s, s],
        vec![s, 0.0, s],
        vec![s, -s, s],
        vec![s, s, s],
    ];
    let t = s / 3.0;
    let mut functionals: Vec<Vec<f64>> = points[..6].to_vec();
    functionals.push(vec![t, -3.0 * t, 2.0 * t]);
    (points, functionals)
}

/// The ten pairings used in the argument, in order:
/// `(x_i, x*_i)` for `i ≤ 6`, then `(x_8, x*_4)`, `(x_8, x*_5)`,
/// `(x_8, x*_6)` and `(x_7, x*_7)`.
pub fn example_3_2_pairs() -> Vec<SupportPair> {
    let (p, f) = example_3_2_elements();
    let mut idx: Vec<(usize, usize)> = (0..6).map(|i| (i, i)).collect();
    idx.extend([(7, 3), (7, 4), (7, 5), (6, 6)]);
    idx.into_iter()
        .map(|(i, j)| SupportPair::new(p[i].clone(), f[j].clone()))
        .collect()
}

/// A printed consequence `f(Tx) = expression` read against the earlier rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Implication {
    pub label: String,
    /// Index into [`example_3_2_pairs`].
    pub row: usize,
    /// `(r, c, coefficient)` triples of the printed linear form in `a_{rc}`
    /// (0-based).
    pub expression: Vec<(usize, usize, f64)>,
    /// Distance from `row − expression` to the span of the earlier rows.
    pub residual: f64,
}

impl Implication {
    pub fn holds(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

/// `(label, row, linear form as (r, c, coefficient) terms)`.
type ImplicationSpec = (&'static str, usize, Vec<(usize, usize, f64)>);

/// The six printed reductions: each pairing row, once the earlier rows are
/// used, equals the stated linear form.
pub fn example_3_2_implications() -> Vec<Implication> {
    let specs: [ImplicationSpec; 6] = [
        ("a21 = -a12", 3, vec![(0, 1, 0.5), (1, 0, 0.5)]),
        ("a32 = -a23", 4, vec![(1, 2, 0.5), (2, 1, 0.5)]),
        ("a31 = -a13", 5, vec![(0, 2, 0.5), (2, 0, 0.5)]),
        ("a13 = -a12", 7, vec![(0, 1, -0.5), (0, 2, -0.5)]),
        ("a23 = a12", 8, vec![(0, 1, 0.5), (1, 2, -0.5)]),
        ("a12 = 0", 9, vec![(0, 1, 1.0 / 3.0)]),
    ];
    let pairs = example_3_2_pairs();
    let rows: Vec<Vec<f64>> = pairs.iter().map(|p| constraint_row(&p.x, &p.f)).collect();
    // rows that the argument has already used, in the order they are used
    let order = [0usize, 1, 2, 3, 4, 5, 7, 8, 9];
    specs
        .into_iter()
        .map(|(label, row, expression)| {
            let mut target = rows[row].clone();
            for &(r, c, v) in &expression {
                target[r * 3 + c] -= v;
            }
            let pos = order.iter().position(|&o| o == row).expect("row is used");
            let earlier: Vec<&Vec<f64>> = order[..pos].iter().map(|&o| &rows[o]).collect();
            Implication {
                label: label.to_string(),
                row,
                expression,
                residual: span_residual(&target, &earlier),
            }
        })
        .collect()
}

/// Euclidean distance from `v` to the span of `basis`.
fn span_residual(v: &[f64], basis: &[&Vec<f64>]) -> f64 {
    let n = v.len();
    if basis.is_empty() {
        return crate::point::l2(v);
    }
    let a = DMatrix::from_fn(n, basis.len(), |i, j| basis[j][i]);
    let b = nalgebra::DVector::from_column_slice(v);
    let svd = a.clone().svd(true, true);
    let coef = svd.solve(&b, 1e-13).expect("SVD with U and V^T");
    (a * coef - b).norm()
}

/// A default family of pairs for the certificate: the argument's ten pairs
/// for the Example 3.2 norm, every vertex pair for polytopal spaces, and
/// `4·d²` sampled supporting pairs (plus coordinate and sign directions)
/// otherwise.
pub fn certificate_pairs(x: &NormSpace, seed: u64) -> Vec<SupportPair> {
    if let Kind::Example32 = x.kind() {
        return example_3_2_pairs();
    }
    if let Some(ball) = x.ball() {
        return ball
            .vertex_pairs()
            .map(|(v, f)| SupportPair::new(v.to_vec(), f.to_vec()))
            .collect();
    }
    let d = x.dim();
    let mut points = x.seed_points();
    let mut rng = search::rng_for(seed, 0x6365_7274);
    for _ in 0..4 * d * d {
        points.push(search::sphere_direction(&mut rng, d));
    }
    points
        .into_iter()
        .filter_map(|p| x.support_functional(&p).ok())
        .collect()
}
