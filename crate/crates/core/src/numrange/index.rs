//! Numerical index estimation: an upper bound from the best operator found
//! by pattern search, a lower bound from whichever certificate applies.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::certificate::{certificate_pairs, zero_radius_certificate};
use super::{numerical_radius_exact, numerical_radius_hilbert, operator_norm, pairing};
use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::parallel::par_map;
use crate::point::dot;
use crate::search::{self, Compass};
use crate::spaces::{Kind, NormSpace};
use crate::sums::SumSpace;

const ACTIVE_ROUNDS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateTag {
    ClSpace,
    ZeroRadiusRank,
    TheoremTransfer,
    None,
}

impl CertificateTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateTag::ClSpace => "cl_space",
            CertificateTag::ZeroRadiusRank => "zero_radius_rank",
            CertificateTag::TheoremTransfer => "theorem_transfer",
            CertificateTag::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: f64,
    pub tag: CertificateTag,
    pub detail: String,
}

impl LowerBound {
    fn none(detail: impl Into<String>) -> Self {
        Self {
            value: 0.0,
            tag: CertificateTag::None,
            detail: detail.into(),
        }
    }
}

/// How `v(T)/‖T‖` is evaluated: exactly (polytopal or Euclidean spaces) or
/// from `samples` seeded directions followed by local ascent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RatioEvaluator {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

impl RatioEvaluator {
    pub fn for_space(x: &NormSpace, samples: usize, seed: u64) -> Self {
        if x.is_polytopal() || x.is_hilbert() {
            RatioEvaluator::Exact
        } else {
            RatioEvaluator::Sampled { samples, seed }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio {
    pub radius: f64,
    pub norm: f64,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        if self.norm > 0.0 {
            self.radius / self.norm
        } else {
            f64::INFINITY
        }
    }
}

/// `v(T)` and `‖T‖` under `eval`. Deterministic in its inputs.
pub fn evaluate_ratio(x: &NormSpace, t: &OperatorMatrix, eval: &RatioEvaluator) -> Result<Ratio> {
    crate::error::check_dim(x.dim(), t.size())?;
    Ok(match eval {
        RatioEvaluator::Exact if x.is_polytopal() => Ratio {
            radius: numerical_radius_exact(x, t)?.value,
            norm: operator_norm(x, t)?.value,
        },
        RatioEvaluator::Exact if x.is_hilbert() => Ratio {
            radius: numerical_radius_hilbert(x, t)?.value,
            norm: operator_norm(x, t)?.value,
        },
        RatioEvaluator::Exact => {
            return Err(Error::UnsupportedKind {
                op: "exact ratio",
                kind: x.kind().name().to_string(),
            })
        }
        RatioEvaluator::Sampled { samples, seed } => sampled_ratio(x, t, *samples, *seed),
    })
}

fn sampled_ratio(x: &NormSpace, t: &OperatorMatrix, samples: usize, seed: u64) -> Ratio {
    let n = x.dim();
    let mut rng = search::rng_for(seed, 0x7261_7469);
    let mut points = x.seed_points();
    for _ in 0..samples {
        points.push(search::sphere_direction(&mut rng, n));
    }
    let mut best_v = (f64::NEG_INFINITY, 0usize);
    let mut best_n = (f64::NEG_INFINITY, 0usize);
    for (i, p) in points.iter().enumerate() {
        let np = x.eval(p);
        if np == 0.0 {
            continue;
        }
        let tp = t.apply(p);
        let nt = x.eval(&tp) / np;
        if nt > best_n.0 {
            best_n = (nt, i);
        }
        if let Some((v, _, _)) = pairing(x, t, p) {
            if v > best_v.0 {
                best_v = (v, i);
            }
        }
    }
    let cfg = Compass {
        initial_step: 0.05,
        min_step: 1e-9,
        max_evals: 600,
        ..Compass::default()
    };
    let radius = search::maximize(
        |p| pairing(x, t, p).map_or(f64::NEG_INFINITY, |q| q.0),
        points[best_v.1].clone(),
        |p| x.normalize_in_place(p),
        &cfg,
    )
    .value
    .max(best_v.0);
    let norm = search::maximize(
        |p| {
            let np = x.eval(p);
            if np > 0.0 {
                x.eval(&t.apply(p)) / np
            } else {
                f64::NEG_INFINITY
            }
        },
        points[best_n.1].clone(),
        |p| x.normalize_in_place(p),
        &cfg,
    )
    .value
    .max(best_n.0);
    Ratio { radius, norm }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Objective evaluations per restart.
    pub budget: usize,
    /// Directions per sampled evaluation inside the search.
    pub radius_samples: usize,
    /// Directions for the final, reported evaluation.
    pub final_samples: usize,
    /// Extra starting operators (e.g. lifted witnesses from summands).
    #[serde(default)]
    pub starts: Vec<OperatorMatrix>,
    /// Compute a certified lower bound.
    pub certify: bool,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            seed: 0,
            budget: 3000,
            radius_samples: 64,
            final_samples: 4000,
            starts: Vec::new(),
            certify: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub upper: f64,
    /// Operator with `v(T)/‖T‖ = upper`, scaled to `‖T‖ = 1` as evaluated.
    pub witness: OperatorMatrix,
    pub witness_radius: f64,
    pub witness_norm: f64,
    pub evaluator: RatioEvaluator,
    pub lower: f64,
    pub certificate: CertificateTag,
    pub certificate_detail: String,
    pub restarts: usize,
    pub seed: u64,
}

impl IndexEstimate {
    /// Recomputes `v(witness)/‖witness‖` with the stored evaluator.
    pub fn replay(&self, x: &NormSpace) -> Result<f64> {
        Ok(evaluate_ratio(x, &self.witness, &self.evaluator)?.value())
    }
}

/// Pattern search for `inf v(T)/‖T‖`, plus a certified lower bound.
pub fn numerical_index(x: &NormSpace, opts: &IndexOptions) -> Result<IndexEstimate> {
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be >= 1".into()));
    }
    let d = x.dim();
    for s in &opts.starts {
        crate::error::check_dim(d, s.size())?;
    }
    let inner = RatioEvaluator::for_space(x, opts.radius_samples, opts.seed);
    let outer = RatioEvaluator::for_space(x, opts.final_samples, opts.seed);

    let mut starts: Vec<OperatorMatrix> = vec![OperatorMatrix::identity(d)];
    starts.extend(opts.starts.iter().cloned());
    if x.is_hilbert() && d >= 2 {
        let mut rot = OperatorMatrix::zeros(d);
        rot.set(0, 1, 1.0);
        rot.set(1, 0, -1.0);
        starts.push(rot);
    }
    for r in 0..opts.restarts {
        let mut rng = search::rng_for(opts.seed, 1 + r as u64);
        starts.push(OperatorMatrix::new(
            d,
            search::gaussian_vec(&mut rng, d * d),
        )?);
    }
    let jobs: Vec<(usize, OperatorMatrix)> = starts.into_iter().enumerate().collect();
    let mut found = par_map(&jobs, |(id, t0)| {
        if d == 1 || *id == 0 {
            return t0.clone();
        }
        descend(x, t0.clone(), &inner, opts.budget, opts.seed ^ *id as u64)
    });
    // the cheap inner evaluator can drift away from a good start
    found.extend(opts.starts.iter().filter(|s| !s.is_zero()).cloned());

    let scored = par_map(&found, |t| {
        evaluate_ratio(x, t, &outer).map(|r| (r.value(), r))
    });
    let mut best: Option<(usize, f64, Ratio)> = None;
    for (i, s) in scored.into_iter().enumerate() {
        let (v, r) = s?;
        if best.is_none_or(|(_, b, _)| v < b) {
            best = Some((i, v, r));
        }
    }
    let (bi, _, ratio) = best.expect("identity start");
    let witness = found[bi].scaled(1.0 / ratio.norm);
    let final_ratio = evaluate_ratio(x, &witness, &outer)?;

    let lb = if opts.certify {
        certified_lower_bound(x, opts.seed)
    } else {
        LowerBound::none("not requested")
    };
    Ok(IndexEstimate {
        upper: final_ratio.value(),
        witness,
        witness_radius: final_ratio.radius,
        witness_norm: final_ratio.norm,
        evaluator: outer,
        lower: lb.value,
        certificate: lb.tag,
        certificate_detail: lb.detail,
        restarts: opts.restarts,
        seed: opts.seed,
    })
}

fn frobenius_normalize(t: &mut [f64]) {
    let r = t.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r > 0.0 {
        t.iter_mut().for_each(|v| *v /= r);
    }
}

/// Compass search on the entries (ratio is scale invariant, so iterates
/// stay on the Frobenius sphere), alternated with projections onto the
/// operators annihilated by the currently active pairs.
fn descend(
    x: &NormSpace,
    t0: OperatorMatrix,
    eval: &RatioEvaluator,
    budget: usize,
    seed: u64,
) -> OperatorMatrix {
    let d = x.dim();
    let objective = |e: &[f64]| {
        let t = OperatorMatrix::new(d, e.to_vec()).expect("finite entries");
        match evaluate_ratio(x, &t, eval) {
            Ok(r) => -r.value(),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let mut cur = t0.entries().to_vec();
    let mut cur_val = objective(&cur);
    let mut remaining = budget;
    let mut step = 0.3;
    for round in 0..ACTIVE_ROUNDS {
        if remaining == 0 {
            break;
        }
        let cfg = Compass {
            initial_step: step,
            min_step: 1e-12,
            max_evals: remaining,
            random_directions: d * d,
            seed: seed.wrapping_add(round as u64),
            ..Compass::default()
        };
        let r = search::maximize(objective, cur.clone(), |e| frobenius_normalize(e), &cfg);
        remaining = remaining.saturating_sub(r.evals);
        let improved = r.value > cur_val;
        cur = r.x;
        cur_val = r.value;
        if !matches!(eval, RatioEvaluator::Exact) {
            break;
        }
        let t = OperatorMatrix::new(d, cur.clone()).expect("finite entries");
        let Some(mut p) = active_projection(x, &t) else {
            if !improved {
                break;
            }
            continue;
        };
        frobenius_normalize(&mut p);
        let pv = objective(&p);
        remaining = remaining.saturating_sub(1);
        if pv > cur_val {
            cur = p;
            cur_val = pv;
            step = 0.05;
        } else if !improved {
            break;
        }
    }
    OperatorMatrix::new(d, cur).expect("finite entries")
}

/// Least-change operator killing `f(Tx)` on the pairs within 5% of `v(T)`.
fn active_projection(x: &NormSpace, t: &OperatorMatrix) -> Option<Vec<f64>> {
    let d = x.dim();
    let pairs: Vec<(Vec<f64>, Vec<f64>, f64)> = if let Some(ball) = x.ball() {
        ball.vertex_pairs()
            .map(|(v, f)| (v.to_vec(), f.to_vec(), dot(f, &t.apply(v)).abs()))
            .collect()
    } else if x.is_hilbert() {
        let m = t.to_dmatrix();
        let eig = ((&m + m.transpose()) * 0.5).symmetric_eigen();
        (0..d)
            .map(|k| {
                let u: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
                (u.clone(), u, eig.eigenvalues[k].abs())
            })
            .collect()
    } else {
        return None;
    };
    let vmax = pairs.iter().map(|p| p.2).fold(0.0, f64::max);
    if vmax == 0.0 {
        return None;
    }
    let active: Vec<&(Vec<f64>, Vec<f64>, f64)> =
        pairs.iter().filter(|p| p.2 >= 0.95 * vmax).collect();
    let rows: Vec<f64> = active
        .iter()
        .flat_map(|(v, f, _)| super::certificate::constraint_row(v, f))
        .collect();
    let l = DMatrix::from_row_slice(active.len(), d * d, &rows);
    let tv = DVector::from_column_slice(t.entries());
    let rhs = &l * &tv;
    let svd = l.svd(true, true);
    let delta = svd.solve(&rhs, 1e-12).ok()?;
    let p = tv - delta;
    if p.iter().all(|v| v.abs() < 1e-14) {
        return None;
    }
    Some(p.iter().copied().collect())
}

/// The best lower bound on `n(X)` this library can certify:
/// one-dimensional spaces and CL polytopes give 1; absolute sums whose outer
/// norm admits the orthogonal `A`/`B` sets (or has index 1) inherit the
/// minimum over their summands; otherwise the zero-radius certificate on the
/// default pair family.
pub fn certified_lower_bound(x: &NormSpace, seed: u64) -> LowerBound {
    if x.dim() == 1 {
        return LowerBound {
            value: 1.0,
            tag: CertificateTag::ClSpace,
            detail: "one-dimensional".into(),
        };
    }
    if let Some(s) = x.as_sum() {
        if let Some(lb) = transfer_lower_bound(s, seed) {
            return lb;
        }
    }
    if let Some(ball) = x.ball() {
        if let Ok(c) = ball.is_cl_space() {
            if c.is_certified() {
                return LowerBound {
                    value: 1.0,
                    tag: CertificateTag::ClSpace,
                    detail: "every vertex lies in conv(F ∪ -F) for every maximal face F".into(),
                };
            }
        }
    }
    if x.is_hilbert() {
        return LowerBound::none("Euclidean space of dimension >= 2");
    }
    match zero_radius_certificate(x, &certificate_pairs(x, seed)) {
        Ok(c) => match c.bound {
            Some(b) => LowerBound {
                value: b,
                tag: CertificateTag::ZeroRadiusRank,
                detail: format!(
                    "rank {}/{} over {} pairs, sigma_min {:.6e}, constant {:.6e}",
                    c.rank, c.columns, c.pairs, c.sigma_min, c.norm_constant
                ),
            },
            None => LowerBound::none(format!("rank {}/{}", c.rank, c.columns)),
        },
        Err(e) => LowerBound::none(e.to_string()),
    }
}

fn transfer_lower_bound(s: &SumSpace, seed: u64) -> Option<LowerBound> {
    let outer = s.outer();
    let eligible = outer.dim() == 1
        || matches!(outer.kind(), Kind::Lp { p } if *p == 1.0 || p.is_infinite())
        || outer
            .ball()
            .is_some_and(|b| b.is_cl_space().is_ok_and(|c| c.is_certified()));
    if !eligible {
        return None;
    }
    let parts: Vec<LowerBound> = s
        .components()
        .iter()
        .map(|c| certified_lower_bound(c, seed))
        .collect();
    let (k, worst) = parts
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .expect("sum has components");
    if worst.value <= 0.0 {
        return Some(LowerBound::none(format!(
            "summand {k} has no certified bound"
        )));
    }
    Some(LowerBound {
        value: worst.value,
        tag: CertificateTag::TheoremTransfer,
        detail: format!(
            "min over summands, attained at {k} ({}: {})",
            worst.tag.as_str(),
            worst.detail
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(restarts: usize) -> IndexOptions {
        IndexOptions {
            restarts,
            budget: 1500,
            ..IndexOptions::default()
        }
    }

    #[test]
    fn hilbert_plane_has_index_zero() {
        let e = NormSpace::euclidean(2);
        let est = numerical_index(&e, &quick(8)).unwrap();
        assert!(est.upper <= 1e-6, "{est:?}");
        assert_eq!(est.certificate, CertificateTag::None);
        assert!((est.replay(&e).unwrap() - est.upper).abs() <= 1e-9);
    }

    #[test]
    fn max_norm_plane_has_index_one() {
        let x = NormSpace::lp(2, f64::INFINITY).unwrap();
        let est = numerical_index(&x, &quick(4)).unwrap();
        assert_eq!(est.lower, 1.0);
        assert_eq!(est.certificate, CertificateTag::ClSpace);
        assert!((est.upper - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn example_3_2_lower_bound_is_positive() {
        let lb = certified_lower_bound(&NormSpace::example_3_2(), 0);
        assert_eq!(lb.tag, CertificateTag::ZeroRadiusRank);
        assert!(lb.value > 0.0);
    }

    #[test]
    fn rejects_zero_restarts() {
        let opts = IndexOptions {
            restarts: 0,
            ..IndexOptions::default()
        };
        assert!(numerical_index(&NormSpace::euclidean(2), &opts).is_err());
    }
}
