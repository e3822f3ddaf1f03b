//! Operator norms, numerical radii and numerical index estimation.
//!
//! `v(T) = sup{|f(Tx)| : ‖x‖ = 1 = ‖f‖, f(x) = 1}` is evaluated exactly on
//! polytopal spaces (vertex-pair enumeration) and Euclidean spaces (spectrum
//! of the symmetric part); elsewhere it is a sampled lower bound polished by
//! local ascent.

mod certificate;
mod index;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use certificate::{
    certificate_pairs, constraint_row, example_3_2_elements, example_3_2_implications,
    example_3_2_pairs, zero_radius_certificate, Implication, ZeroRadiusCertificate,
};
pub use index::{
    certified_lower_bound, evaluate_ratio, numerical_index, CertificateTag, IndexEstimate,
    IndexOptions, LowerBound, Ratio, RatioEvaluator,
};

use crate::error::{check_dim, Error, Result};
use crate::operator::OperatorMatrix;
use crate::point::{dot, lex_cmp};
use crate::search::{self, Compass};
use crate::spaces::{NormSpace, SupportPair};

const NORM_SEARCH_SEED: u64 = 0x6f70_6e6f;
const NORM_SEARCH_RESTARTS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum RadiusMethod {
    ExactVertex,
    /// `max |λ|` over the spectrum of `(T + Tᵀ)/2`.
    ExactHilbert,
    Sampled {
        n_samples: usize,
        seed: u64,
    },
}

impl RadiusMethod {
    pub fn is_exact(&self) -> bool {
        !matches!(self, RadiusMethod::Sampled { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub value: f64,
    pub witness: SupportPair,
    #[serde(flatten)]
    pub method: RadiusMethod,
    /// `Some(0.0)` for exact methods; `None` for sampled lower bounds.
    pub gap_bound: Option<f64>,
}

impl RadiusEstimate {
    fn from_pair(x: Vec<f64>, f: Vec<f64>, t: &OperatorMatrix, method: RadiusMethod) -> Self {
        let value = dot(&f, &t.apply(&x)).abs();
        let gap_bound = method.is_exact().then_some(0.0);
        Self {
            value,
            witness: SupportPair::new(x, f),
            method,
            gap_bound,
        }
    }

    /// `|f(Tx)|` recomputed from the stored witness.
    pub fn replay(&self, t: &OperatorMatrix) -> f64 {
        dot(&self.witness.f, &t.apply(&self.witness.x)).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorNorm {
    pub value: f64,
    /// Unit vector with `‖Tx‖ = value`.
    pub witness: Vec<f64>,
    /// False when `value` is a search lower bound.
    pub exact: bool,
}

fn check_sizes(x: &NormSpace, t: &OperatorMatrix) -> Result<()> {
    check_dim(x.dim(), t.size())
}

/// `‖T‖`: exact over primal vertices for polytopal spaces and by SVD for
/// Euclidean ones; a multi-start maximization of `‖Tx‖/‖x‖` otherwise.
pub fn operator_norm(x: &NormSpace, t: &OperatorMatrix) -> Result<OperatorNorm> {
    check_sizes(x, t)?;
    if let Some(ball) = x.ball() {
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, v) in ball.primal_vertices().iter().enumerate() {
            let n = ball.norm(&t.apply(v));
            if n > best.0 {
                best = (n, i);
            }
        }
        return Ok(OperatorNorm {
            value: best.0,
            witness: ball.primal_vertices()[best.1].clone(),
            exact: true,
        });
    }
    if x.is_hilbert() {
        let svd = t.to_dmatrix().svd(false, true);
        let (k, &s) = svd
            .singular_values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty spectrum");
        let vt = svd.v_t.expect("requested V^T");
        let w: Vec<f64> = vt.row(k).iter().copied().collect();
        return Ok(OperatorNorm {
            value: s,
            witness: w,
            exact: true,
        });
    }
    Ok(operator_norm_search(x, t))
}

fn operator_norm_search(x: &NormSpace, t: &OperatorMatrix) -> OperatorNorm {
    let n = x.dim();
    if t.is_zero() {
        return OperatorNorm {
            value: 0.0,
            witness: x.normalized(&crate::spaces::unit(n, 0)),
            exact: false,
        };
    }
    let objective = |v: &[f64]| {
        let nv = x.eval(v);
        if nv > 0.0 {
            x.eval(&t.apply(v)) / nv
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut starts = x.seed_points();
    let mut rng = search::rng_for(NORM_SEARCH_SEED, n as u64);
    for _ in 0..NORM_SEARCH_RESTARTS {
        starts.push(search::sphere_direction(&mut rng, n));
    }
    let mut scored: Vec<(f64, Vec<f64>)> = starts.into_iter().map(|s| (objective(&s), s)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| lex_cmp(&a.1, &b.1)));
    let cfg = Compass {
        initial_step: 0.1,
        min_step: 1e-12,
        random_directions: n,
        ..Compass::default()
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (_, s) in scored.into_iter().take(4) {
        let r = search::maximize(objective, s, |v| x.normalize_in_place(v), &cfg);
        if best.as_ref().is_none_or(|(b, _)| r.value > *b) {
            best = Some((r.value, r.x));
        }
    }
    let (value, witness) = best.expect("at least one start");
    OperatorNorm {
        value,
        witness,
        exact: false,
    }
}

/// Exact numerical radius on a polytopal space: the max of `|f(Tv)|` over
/// primal vertices `v` and dual vertices `f` with `f(v) = 1`. Ties go to the
/// lexicographically largest `(v, f)`.
pub fn numerical_radius_exact(x: &NormSpace, t: &OperatorMatrix) -> Result<RadiusEstimate> {
    check_sizes(x, t)?;
    let ball = x.ball().ok_or_else(|| Error::UnsupportedKind {
        op: "numerical_radius_exact",
        kind: x.kind().name().to_string(),
    })?;
    let mut best: Option<(f64, &[f64], &[f64])> = None;
    for (v, f) in ball.vertex_pairs() {
        let val = dot(f, &t.apply(v)).abs();
        let better = match best {
            None => true,
            Some((b, bv, bf)) => {
                val > b || (val == b && lex_cmp(v, bv).then_with(|| lex_cmp(f, bf)).is_gt())
            }
        };
        if better {
            best = Some((val, v, f));
        }
    }
    let (_, v, f) = best.expect("polytope has vertex pairs");
    Ok(RadiusEstimate::from_pair(
        v.to_vec(),
        f.to_vec(),
        t,
        RadiusMethod::ExactVertex,
    ))
}

/// Exact numerical radius on a Euclidean space.
pub fn numerical_radius_hilbert(x: &NormSpace, t: &OperatorMatrix) -> Result<RadiusEstimate> {
    check_sizes(x, t)?;
    if !x.is_hilbert() {
        return Err(Error::UnsupportedKind {
            op: "numerical_radius_hilbert",
            kind: x.kind().name().to_string(),
        });
    }
    let m = t.to_dmatrix();
    let sym = (&m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let (k, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
        .expect("nonempty spectrum");
    let mut u: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
    let r = crate::point::l2(&u);
    u.iter_mut().for_each(|v| *v /= r);
    Ok(RadiusEstimate::from_pair(
        u.clone(),
        u,
        t,
        RadiusMethod::ExactHilbert,
    ))
}

/// Pairing `|f_x(T x)|` at the normalized point `x` with its supporting
/// functional.
fn pairing(x: &NormSpace, t: &OperatorMatrix, v: &[f64]) -> Option<(f64, Vec<f64>, Vec<f64>)> {
    let nv = x.eval(v);
    if nv == 0.0 || !nv.is_finite() {
        return None;
    }
    let xn: Vec<f64> = v.iter().map(|c| c / nv).collect();
    let f = x.support_raw(&xn);
    let val = dot(&f, &t.apply(&xn)).abs();
    Some((val, xn, f))
}

/// Sampled numerical radius: `n_samples` uniform directions normalized into
/// `S_X`, each paired with its supporting functional, followed by local
/// ascent from the best pairs. Always a lower bound on `v(T)`.
pub fn numerical_radius_sampled(
    x: &NormSpace,
    t: &OperatorMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<RadiusEstimate> {
    check_sizes(x, t)?;
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be >= 1".into()));
    }
    Ok(sampled_radius(x, t, n_samples, seed, 1e-10, 3))
}

pub(crate) fn sampled_radius(
    x: &NormSpace,
    t: &OperatorMatrix,
    n_samples: usize,
    seed: u64,
    polish_tol: f64,
    polish_count: usize,
) -> RadiusEstimate {
    let n = x.dim();
    let mut rng = search::rng_for(seed, 0);
    let mut top: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::with_capacity(polish_count + 1);
    // on a polytope almost every sample lies inside a facet; keep the best
    // sample per facet functional so every facet hit gets polished
    let mut per_facet: BTreeMap<Vec<u64>, (f64, Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for _ in 0..n_samples {
        let d = search::sphere_direction(&mut rng, n);
        if let Some(p) = pairing(x, t, &d) {
            if x.is_polytopal() {
                let key = p.2.iter().map(|v| v.to_bits()).collect();
                let e = per_facet.entry(key).or_insert_with(|| p.clone());
                if p.0 > e.0 {
                    *e = p;
                }
            } else if top.len() < polish_count || p.0 > top.last().expect("nonempty").0 {
                top.push(p);
                top.sort_by(|a, b| b.0.total_cmp(&a.0));
                top.truncate(polish_count.max(1));
            }
        }
    }
    top.extend(per_facet.into_values());
    let method = RadiusMethod::Sampled { n_samples, seed };
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for (val, xn, f) in top {
        let polished = if let Some(ball) = x.ball() {
            vertex_ascent(ball, t, xn, f, val)
        } else {
            smooth_ascent(x, t, xn, f, val, polish_tol)
        };
        if best.as_ref().is_none_or(|b| polished.0 > b.0) {
            best = Some(polished);
        }
    }
    let (_, xn, f) = best.expect("at least one sample");
    RadiusEstimate::from_pair(xn, f, t, method)
}

/// Alternating ascent on a polytope: best vertex of the face exposed by `f`,
/// then best dual vertex exposing that vertex, until no improvement.
fn vertex_ascent(
    ball: &crate::polytope::PolytopeBall,
    t: &OperatorMatrix,
    mut xn: Vec<f64>,
    mut f: Vec<f64>,
    mut val: f64,
) -> (f64, Vec<f64>, Vec<f64>) {
    let tol = ball.pairing_tolerance().max(1e-9);
    loop {
        let mut improved = false;
        for v in ball.primal_vertices() {
            if (dot(&f, v) - 1.0).abs() <= tol {
                let cand = dot(&f, &t.apply(v)).abs();
                if cand > val + 1e-15 {
                    val = cand;
                    xn = v.clone();
                    improved = true;
                }
            }
        }
        let tx = t.apply(&xn);
        for g in ball.dual_vertices() {
            if (dot(g, &xn) - 1.0).abs() <= tol {
                let cand = dot(g, &tx).abs();
                if cand > val + 1e-15 {
                    val = cand;
                    f = g.clone();
                    improved = true;
                }
            }
        }
        if !improved {
            return (val, xn, f);
        }
    }
}

fn smooth_ascent(
    x: &NormSpace,
    t: &OperatorMatrix,
    xn: Vec<f64>,
    f: Vec<f64>,
    val: f64,
    tol: f64,
) -> (f64, Vec<f64>, Vec<f64>) {
    let objective = |v: &[f64]| pairing(x, t, v).map_or(f64::NEG_INFINITY, |p| p.0);
    let cfg = Compass {
        initial_step: 0.05,
        min_step: tol,
        max_evals: 4000,
        ..Compass::default()
    };
    let r = search::maximize(objective, xn.clone(), |v| x.normalize_in_place(v), &cfg);
    if r.value > val {
        let (v, xr, fr) = pairing(x, t, &r.x).expect("nonzero point");
        (v, xr, fr)
    } else {
        (val, xn, f)
    }
}

/// Settings for the radius evaluation inside [`numerical_radius`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct RadiusConfig {
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for RadiusConfig {
    fn default() -> Self {
        Self {
            n_samples: 10_000,
            seed: 0,
        }
    }
}

/// Exact radius where available, sampled otherwise.
pub fn numerical_radius(
    x: &NormSpace,
    t: &OperatorMatrix,
    cfg: &RadiusConfig,
) -> Result<RadiusEstimate> {
    if x.is_polytopal() {
        numerical_radius_exact(x, t)
    } else if x.is_hilbert() {
        numerical_radius_hilbert(x, t)
    } else {
        numerical_radius_sampled(x, t, cfg.n_samples, cfg.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn op(rows: &[&[f64]]) -> OperatorMatrix {
        OperatorMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn operator_norm_examples() {
        let linf = NormSpace::lp(2, f64::INFINITY).unwrap();
        let shift = op(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(operator_norm(&linf, &shift).unwrap().value, 1.0);
        let e = NormSpace::euclidean(2);
        let d = op(&[&[2.0, 0.0], &[0.0, 3.0]]);
        assert_abs_diff_eq!(operator_norm(&e, &d).unwrap().value, 3.0, epsilon = 1e-14);
        for s in [
            linf,
            e,
            NormSpace::example_3_2().section(&[0, 2]).unwrap(),
            NormSpace::lp(2, 3.0).unwrap(),
        ] {
            let id = OperatorMatrix::identity(s.dim());
            assert_abs_diff_eq!(operator_norm(&s, &id).unwrap().value, 1.0, epsilon = 1e-12);
        }
        let x = NormSpace::example_3_2();
        assert_abs_diff_eq!(
            operator_norm(&x, &OperatorMatrix::identity(3))
                .unwrap()
                .value,
            1.0,
            epsilon = 1e-12
        );
        assert!(operator_norm(&x, &OperatorMatrix::identity(2)).is_err());
    }

    #[test]
    fn lp_operator_norm_of_diagonal() {
        let l3 = NormSpace::lp(3, 3.0).unwrap();
        let d = op(&[&[0.5, 0.0, 0.0], &[0.0, -2.0, 0.0], &[0.0, 0.0, 1.0]]);
        let n = operator_norm(&l3, &d).unwrap();
        assert!(!n.exact);
        assert_abs_diff_eq!(n.value, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn exact_radius_examples() {
        let linf = NormSpace::lp(2, f64::INFINITY).unwrap();
        let shift = op(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = numerical_radius_exact(&linf, &shift).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.witness.x, vec![1.0, 1.0]);
        assert_eq!(r.witness.f, vec![1.0, 0.0]);
        assert_eq!(r.gap_bound, Some(0.0));

        let l1 = NormSpace::lp(2, 1.0).unwrap();
        let rot = op(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let r = numerical_radius_exact(&l1, &rot).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.witness.x, vec![1.0, 0.0]);
        assert_eq!(r.witness.f, vec![1.0, 1.0]);

        for s in [linf, l1, NormSpace::example_3_3()] {
            let id = OperatorMatrix::identity(s.dim());
            assert_eq!(numerical_radius_exact(&s, &id).unwrap().value, 1.0);
        }
        let err = numerical_radius_exact(&NormSpace::euclidean(2), &rot);
        assert!(matches!(err, Err(Error::UnsupportedKind { .. })));
    }

    #[test]
    fn sampled_radius_examples() {
        let e = NormSpace::euclidean(2);
        let skew = op(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let r = numerical_radius_sampled(&e, &skew, 500, 1).unwrap();
        assert!(r.value < 1e-15);
        assert_eq!(r.gap_bound, None);
        for s in [NormSpace::example_3_2(), NormSpace::lp(3, 1.5).unwrap()] {
            let id = OperatorMatrix::identity(s.dim());
            let r = numerical_radius_sampled(&s, &id, 50, 2).unwrap();
            assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        }
        let linf = NormSpace::lp(2, f64::INFINITY).unwrap();
        let shift = op(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = numerical_radius_sampled(&linf, &shift, 10_000, 3).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-2);
        assert!(numerical_radius_sampled(&linf, &shift, 0, 3).is_err());
    }

    #[test]
    fn hilbert_radius_matches_sampling() {
        let e = NormSpace::euclidean(3);
        let t = op(&[&[0.3, -1.0, 0.2], &[0.5, 0.1, 0.0], &[-0.7, 0.4, 0.9]]);
        let exact = numerical_radius_hilbert(&e, &t).unwrap();
        let sampled = numerical_radius_sampled(&e, &t, 2000, 5).unwrap();
        assert!(sampled.value <= exact.value + 1e-12);
        assert_abs_diff_eq!(sampled.value, exact.value, epsilon = 1e-8);
        assert_abs_diff_eq!(exact.replay(&t), exact.value, epsilon = 1e-14);
    }
}
