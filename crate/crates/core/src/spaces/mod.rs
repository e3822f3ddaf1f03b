//! Finite-dimensional real normed spaces.
//!
//! A [`NormSpace`] is an immutable, cheaply clonable descriptor that answers
//! norm, dual norm and supporting-functional queries. Polytopal spaces carry
//! a [`PolytopeBall`], which every exact algorithm downstream keys on.

mod descriptor;
mod validate;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use descriptor::Descriptor;
pub use validate::{PropertyCheck, ValidationReport};

use crate::error::{check_dim, Error, Result};
use crate::point::{abs, dot, l2, lex_cmp, max_abs_diff};
use crate::polytope::{sign_vectors, PolytopeBall};
use crate::search::{self, Compass};
use crate::sums::SumSpace;

/// Tolerance for `f(x) = 1` on supporting pairs.
pub const SUPPORT_TOLERANCE: f64 = 1e-9;

const DUAL_SEARCH_SEED: u64 = 0x6475_616c;
const DUAL_SEARCH_RESTARTS: usize = 8;

#[derive(Debug, Clone)]
pub enum Kind {
    /// `ℓ_p` with `1 ≤ p ≤ ∞` (`p = f64::INFINITY` for the max norm).
    Lp {
        p: f64,
    },
    Euclidean,
    Polytope,
    /// `max{√(x²+y²), √(x²+z²), √(y²+z²)}` on `R³`.
    Example32,
    /// `max{|x1|+|x2|, |x2|+|x3|+|x5|, |x3|+|x4|}` on `R⁵`.
    Example33,
    /// Example33 restricted to the first four coordinates.
    Example33P4,
    /// `2^{-1/p}((x²+y²)^{p/2} + (x²+z²)^{p/2} + (y²+z²)^{p/2})^{1/p}` on `R³`.
    Lorentz {
        p: f64,
    },
    Section {
        parent: NormSpace,
        coords: Vec<usize>,
    },
    Sum(Arc<SumSpace>),
    /// Köthe dual `E′` of an absolute norm without a closed form.
    KoetheDual {
        inner: NormSpace,
    },
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Lp { .. } => "lp",
            Kind::Euclidean => "euclidean",
            Kind::Polytope => "polytope",
            Kind::Example32 => "example_3_2",
            Kind::Example33 => "example_3_3",
            Kind::Example33P4 => "example_3_3_p4",
            Kind::Lorentz { .. } => "lorentz_xp",
            Kind::Section { .. } => "section",
            Kind::Sum(_) => "sum",
            Kind::KoetheDual { .. } => "koethe_dual",
        }
    }
}

#[derive(Debug)]
struct Inner {
    dim: usize,
    label: String,
    kind: Kind,
    ball: Option<PolytopeBall>,
}

#[derive(Clone)]
pub struct NormSpace(Arc<Inner>);

impl fmt::Debug for NormSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NormSpace({}, dim {})", self.0.label, self.0.dim)
    }
}

/// A unit vector together with a norm-one functional exposing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportPair {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    /// `|f(x) - 1|`.
    pub slack: f64,
}

impl SupportPair {
    pub fn new(x: Vec<f64>, f: Vec<f64>) -> Self {
        let slack = (dot(&f, &x) - 1.0).abs();
        Self { x, f, slack }
    }

    /// Checks `‖x‖ = 1`, `‖f‖* ≤ 1` and `f(x) = 1` within `tol`.
    pub fn is_valid(&self, space: &NormSpace, tol: f64) -> Result<bool> {
        let nx = space.norm(&self.x)?;
        let nf = space.dual_norm(&self.f)?;
        Ok((nx - 1.0).abs() <= tol && nf <= 1.0 + tol && self.slack <= tol)
    }
}

/// A value with a flag telling whether it is exact or a sampled lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub exact: bool,
    pub witness: Vec<f64>,
}

impl NormSpace {
    fn build(dim: usize, label: impl Into<String>, kind: Kind, ball: Option<PolytopeBall>) -> Self {
        Self(Arc::new(Inner {
            dim,
            label: label.into(),
            kind,
            ball,
        }))
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dim must be positive".into()));
        }
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "lp requires p >= 1, got {p}"
            )));
        }
        let ball = if dim == 1 || p == 1.0 {
            Some(PolytopeBall::cross(dim))
        } else if p == f64::INFINITY {
            Some(PolytopeBall::cube(dim))
        } else {
            None
        };
        Ok(Self::build(dim, lp_label(dim, p), Kind::Lp { p }, ball))
    }

    pub fn euclidean(dim: usize) -> Self {
        assert!(dim > 0, "dim must be positive");
        let ball = (dim == 1).then(|| PolytopeBall::cross(1));
        Self::build(dim, format!("euclidean{dim}"), Kind::Euclidean, ball)
    }

    pub fn polytope(ball: PolytopeBall, label: impl Into<String>) -> Self {
        Self::build(ball.dim(), label, Kind::Polytope, Some(ball))
    }

    pub fn example_3_2() -> Self {
        Self::build(3, "example_3_2", Kind::Example32, None)
    }

    pub fn example_3_3() -> Self {
        let ball = PolytopeBall::from_dual_generators(5, &example_3_3_generators())
            .expect("example 3.3 ball is valid");
        Self::build(5, "example_3_3", Kind::Example33, Some(ball))
    }

    pub fn example_3_3_p4() -> Self {
        let ball = PolytopeBall::from_dual_generators(5, &example_3_3_generators())
            .and_then(|b| b.section(&[0, 1, 2, 3]))
            .expect("example 3.3 section is valid");
        Self::build(4, "example_3_3_p4", Kind::Example33P4, Some(ball))
    }

    pub fn lorentz(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 || p.is_infinite() {
            return Err(Error::InvalidArgument(format!(
                "lorentz_xp requires finite p >= 1, got {p}"
            )));
        }
        Ok(Self::build(
            3,
            format!("lorentz_x{p}"),
            Kind::Lorentz { p },
            None,
        ))
    }

    pub(crate) fn sum(space: SumSpace, ball: Option<PolytopeBall>) -> Self {
        let dim = space.total_dim();
        let label = space.label();
        Self::build(dim, label, Kind::Sum(Arc::new(space)), ball)
    }

    pub(crate) fn koethe(inner: NormSpace) -> Self {
        let label = format!("{}'", inner.label());
        Self::build(inner.dim(), label, Kind::KoetheDual { inner }, None)
    }

    pub fn with_label(&self, label: impl Into<String>) -> Self {
        Self::build(self.0.dim, label, self.0.kind.clone(), self.0.ball.clone())
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Explicit vertex representation, present for every polytopal space.
    pub fn ball(&self) -> Option<&PolytopeBall> {
        self.0.ball.as_ref()
    }

    pub fn is_polytopal(&self) -> bool {
        self.0.ball.is_some()
    }

    /// True when the norm is the Euclidean one in these coordinates.
    pub fn is_hilbert(&self) -> bool {
        match &self.0.kind {
            Kind::Euclidean => true,
            Kind::Lp { p } => *p == 2.0,
            _ => self.0.dim == 1 && self.unit_norms_all_one(),
        }
    }

    fn unit_norms_all_one(&self) -> bool {
        (0..self.0.dim).all(|i| {
            let mut e = vec![0.0; self.0.dim];
            e[i] = 1.0;
            (self.eval(&e) - 1.0).abs() < 1e-15
        })
    }

    pub fn as_sum(&self) -> Option<&SumSpace> {
        match &self.0.kind {
            Kind::Sum(s) => Some(s),
            _ => None,
        }
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.0.dim, x.len())?;
        Ok(self.eval(x))
    }

    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        if let Some(ball) = &self.0.ball {
            return ball.norm(x);
        }
        match &self.0.kind {
            Kind::Lp { p } => lp_norm(x, *p),
            Kind::Euclidean => l2(x),
            Kind::Example32 => {
                let (a, b, c) = (x[0], x[1], x[2]);
                a.hypot(b).max(a.hypot(c)).max(b.hypot(c))
            }
            Kind::Lorentz { p } => lorentz_norm(x, *p),
            Kind::Section { parent, coords } => parent.eval(&embed(parent.dim(), coords, x)),
            Kind::Sum(s) => s.eval(x),
            Kind::KoetheDual { inner } => inner.dual_search(&abs(x)).value,
            Kind::Polytope | Kind::Example33 | Kind::Example33P4 => {
                unreachable!("polytope kinds carry a ball")
            }
        }
    }

    /// `‖f‖* = sup{|f(x)| : ‖x‖ ≤ 1}`. Exact for polytopal, `ℓ_p`, Euclidean,
    /// Köthe duals and sums of those; a sampled lower bound otherwise.
    pub fn dual_norm(&self, f: &[f64]) -> Result<f64> {
        Ok(self.dual_norm_estimate(f)?.value)
    }

    pub fn dual_norm_estimate(&self, f: &[f64]) -> Result<Estimate> {
        check_dim(self.0.dim, f.len())?;
        Ok(self.dual_eval(f))
    }

    pub(crate) fn dual_eval(&self, f: &[f64]) -> Estimate {
        if let Some(ball) = &self.0.ball {
            let value = ball.dual_norm(f);
            let witness = ball
                .attaining_points(f)
                .into_iter()
                .next()
                .unwrap_or_else(|| ball.primal_vertices()[0].clone());
            return Estimate {
                value,
                exact: true,
                witness,
            };
        }
        match &self.0.kind {
            Kind::Lp { p } => {
                let q = conjugate(*p);
                let value = lp_norm(f, q);
                let witness = if value > 0.0 {
                    lp_gradient(f, q)
                } else {
                    unit(self.0.dim, 0)
                };
                Estimate {
                    value,
                    exact: true,
                    witness,
                }
            }
            Kind::Euclidean => {
                let value = l2(f);
                let witness = if value > 0.0 {
                    f.iter().map(|v| v / value).collect()
                } else {
                    unit(self.0.dim, 0)
                };
                Estimate {
                    value,
                    exact: true,
                    witness,
                }
            }
            Kind::Sum(s) => s.dual_eval(f),
            Kind::KoetheDual { inner } => {
                // finite-dimensional Köthe bidual: E'' = E
                let value = inner.eval(&abs(f));
                let witness = if value > 0.0 {
                    let g = inner.support_raw(&abs(f));
                    g.iter()
                        .zip(f)
                        .map(|(gi, fi)| gi.abs() * sign(*fi))
                        .collect()
                } else {
                    unit(self.0.dim, 0)
                };
                Estimate {
                    value,
                    exact: true,
                    witness,
                }
            }
            _ => self.dual_search(f),
        }
    }

    /// Multi-start compass maximization of `|f(x)|/‖x‖`; a certified lower
    /// bound on `‖f‖*`, attained at the returned witness.
    pub(crate) fn dual_search(&self, f: &[f64]) -> Estimate {
        let n = self.0.dim;
        if f.iter().all(|&v| v == 0.0) {
            return Estimate {
                value: 0.0,
                exact: true,
                witness: self.normalized(&unit(n, 0)),
            };
        }
        let objective = |x: &[f64]| {
            let nx = self.eval(x);
            if nx > 0.0 {
                dot(f, x) / nx
            } else {
                f64::NEG_INFINITY
            }
        };
        let mut starts = self.seed_points();
        starts.push(f.to_vec());
        let mut rng = search::rng_for(DUAL_SEARCH_SEED, n as u64);
        for _ in 0..DUAL_SEARCH_RESTARTS {
            starts.push(search::sphere_direction(&mut rng, n));
        }
        // polish the best few seeds only
        let mut scored: Vec<(f64, Vec<f64>)> = starts
            .into_iter()
            .flat_map(|s| {
                let neg: Vec<f64> = s.iter().map(|v| -v).collect();
                [s, neg]
            })
            .map(|s| (objective(&s), s))
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| lex_cmp(&a.1, &b.1)));
        let cfg = Compass {
            initial_step: 0.1,
            min_step: 1e-13,
            ..Compass::default()
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        for (_, s) in scored.into_iter().take(4) {
            let r = search::maximize(objective, s, |x| self.normalize_in_place(x), &cfg);
            if best.as_ref().is_none_or(|(v, _)| r.value > *v) {
                best = Some((r.value, r.x));
            }
        }
        let (value, witness) = best.expect("at least one start");
        Estimate {
            value,
            exact: false,
            witness,
        }
    }

    pub(crate) fn normalize_in_place(&self, x: &mut [f64]) {
        let n = self.eval(x);
        if n > 0.0 {
            x.iter_mut().for_each(|v| *v /= n);
        }
    }

    pub(crate) fn normalized(&self, x: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        self.normalize_in_place(&mut v);
        v
    }

    /// A norm-one functional `f` with `f(x/‖x‖) = 1`. Ties are broken
    /// towards the lexicographically smallest functional.
    pub fn support_functional(&self, x: &[f64]) -> Result<SupportPair> {
        check_dim(self.0.dim, x.len())?;
        if x.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidArgument(
                "supporting functional of the zero vector".into(),
            ));
        }
        let xn = self.normalized(x);
        let f = self.support_raw(&xn);
        Ok(SupportPair::new(xn, f))
    }

    /// Every extreme supporting functional at `x`, where that set is finite
    /// and known (polytopal spaces, Example 3.2 ties); otherwise the single
    /// functional of [`support_functional`](Self::support_functional).
    pub fn support_functionals_all(&self, x: &[f64]) -> Result<Vec<SupportPair>> {
        let first = self.support_functional(x)?;
        let xn = first.x.clone();
        let all = if let Some(ball) = &self.0.ball {
            ball.attaining_functionals(&xn)
        } else if let Kind::Example32 = self.0.kind {
            example_3_2_candidates(&xn)
        } else {
            return Ok(vec![first]);
        };
        Ok(all
            .into_iter()
            .map(|f| SupportPair::new(xn.clone(), f))
            .collect())
    }

    /// Supporting functional at a nonzero point (not necessarily normalized).
    pub(crate) fn support_raw(&self, x: &[f64]) -> Vec<f64> {
        if let Some(ball) = &self.0.ball {
            return ball
                .attaining_functionals(x)
                .into_iter()
                .next()
                .expect("nonzero point has an attaining dual vertex");
        }
        match &self.0.kind {
            Kind::Lp { p } => lp_gradient(x, *p),
            Kind::Euclidean => {
                let r = l2(x);
                x.iter().map(|v| v / r).collect()
            }
            Kind::Example32 => example_3_2_candidates(x).swap_remove(0),
            Kind::Lorentz { p } => lorentz_gradient(&self.normalized(x), *p),
            Kind::Section { parent, coords } => {
                let g = parent.support_raw(&embed(parent.dim(), coords, x));
                coords.iter().map(|&c| g[c]).collect()
            }
            Kind::Sum(s) => s.support_raw(x),
            Kind::KoetheDual { inner } => {
                let est = inner.dual_search(&abs(x));
                est.witness
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a.abs() * sign(*b))
                    .collect()
            }
            Kind::Polytope | Kind::Example33 | Kind::Example33P4 => {
                unreachable!("polytope kinds carry a ball")
            }
        }
    }

    /// Restriction of the norm to vectors supported on `coords`, re-indexed
    /// in the given order.
    pub fn section(&self, coords: &[usize]) -> Result<NormSpace> {
        let n = self.0.dim;
        if coords.is_empty() {
            return Err(Error::InvalidArgument(
                "section needs at least one coordinate".into(),
            ));
        }
        for (i, &c) in coords.iter().enumerate() {
            if c >= n {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {c} out of range for dim {n}"
                )));
            }
            if coords[..i].contains(&c) {
                return Err(Error::InvalidArgument(format!("duplicate coordinate {c}")));
            }
        }
        if coords.iter().copied().eq(0..n) {
            return Ok(self.clone());
        }
        let label = format!("{}|{:?}", self.0.label, coords);
        let k = coords.len();
        if k == 1 {
            // every one-dimensional space is c·|t|
            let c = self.eval(&unit_at(n, coords[0]));
            let ball = PolytopeBall::new(
                1,
                vec![vec![1.0 / c], vec![-1.0 / c]],
                vec![vec![c], vec![-c]],
            )?;
            return if c == 1.0 {
                Ok(NormSpace::lp(1, 1.0)?.with_label(label))
            } else {
                Ok(NormSpace::polytope(ball, label))
            };
        }
        match &self.0.kind {
            Kind::Lp { p } => return Ok(NormSpace::lp(k, *p)?.with_label(label)),
            Kind::Euclidean => return Ok(NormSpace::euclidean(k).with_label(label)),
            Kind::Example32 if k == 2 => return Ok(NormSpace::euclidean(2).with_label(label)),
            Kind::Section {
                parent,
                coords: inner,
            } => {
                let composed: Vec<usize> = coords.iter().map(|&c| inner[c]).collect();
                return parent.section(&composed);
            }
            _ => {}
        }
        if let Some(ball) = &self.0.ball {
            return Ok(NormSpace::polytope(ball.section(coords)?, label));
        }
        Ok(Self::build(
            k,
            label,
            Kind::Section {
                parent: self.clone(),
                coords: coords.to_vec(),
            },
            None,
        ))
    }

    /// Points worth trying first when maximizing convex functions over the
    /// unit sphere: vertices, coordinate vectors, and sign vectors.
    pub fn seed_points(&self) -> Vec<Vec<f64>> {
        let n = self.0.dim;
        let mut out: Vec<Vec<f64>> = Vec::new();
        if let Some(ball) = &self.0.ball {
            out.extend(ball.primal_vertices().iter().cloned());
            return out;
        }
        if let Kind::Sum(s) = &self.0.kind {
            out.extend(s.seed_points());
        }
        for i in 0..n {
            out.push(unit(n, i));
        }
        if n <= 4 {
            out.extend(sign_vectors(n).into_iter().filter(|s| s[0] > 0.0));
        } else {
            out.push(vec![1.0; n]);
        }
        out.into_iter().map(|v| self.normalized(&v)).collect()
    }

    /// Upper bounds `(a, b)` with `‖y‖ ≤ a‖y‖₂` and `‖y‖₂ ≤ b‖y‖`.
    pub fn euclidean_constants(&self) -> (f64, f64) {
        let n = self.0.dim as f64;
        if let Some(ball) = &self.0.ball {
            let a = ball
                .dual_vertices()
                .iter()
                .map(|f| l2(f))
                .fold(0.0, f64::max);
            let b = ball
                .primal_vertices()
                .iter()
                .map(|v| l2(v))
                .fold(0.0, f64::max);
            return (a, b);
        }
        match &self.0.kind {
            Kind::Euclidean => (1.0, 1.0),
            Kind::Lp { p } => {
                let e = 1.0 / p - 0.5;
                if e >= 0.0 {
                    (n.powf(e), 1.0)
                } else {
                    (1.0, n.powf(-e))
                }
            }
            Kind::Example32 => (1.0, 1.5f64.sqrt()),
            Kind::Lorentz { p } => (1.5f64.powf(1.0 / p), 2f64.powf(1.0 / p) * 1.5f64.sqrt()),
            Kind::Section { parent, .. } => parent.euclidean_constants(),
            Kind::Sum(s) => s.euclidean_constants(),
            Kind::KoetheDual { inner } => {
                let (a, b) = inner.euclidean_constants();
                (b, a)
            }
            Kind::Polytope | Kind::Example33 | Kind::Example33P4 => {
                unreachable!("polytope kinds carry a ball")
            }
        }
    }

    /// Checks the absolute-norm properties (a)–(c) on `trials` random
    /// samples; see [`ValidationReport`].
    pub fn validate_absolute(&self, trials: usize, seed: u64) -> ValidationReport {
        validate::validate_absolute(self, trials, seed)
    }

    /// Serializable descriptor.
    pub fn descriptor(&self) -> Descriptor {
        Descriptor::from_space(self)
    }

    pub fn from_descriptor(d: &Descriptor) -> Result<Self> {
        d.build()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.descriptor())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: Descriptor = serde_json::from_str(text)?;
        d.build()
    }
}

pub(crate) fn unit(n: usize, i: usize) -> Vec<f64> {
    unit_at(n, i)
}

fn unit_at(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

pub(crate) fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

pub(crate) fn embed(dim: usize, coords: &[usize], x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (&c, &v) in coords.iter().zip(x) {
        out[c] = v;
    }
    out
}

pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn lp_label(dim: usize, p: f64) -> String {
    if p.is_infinite() {
        format!("linf{dim}")
    } else {
        format!("l{p}_{dim}")
    }
}

pub(crate) fn lp_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if p.is_infinite() || m == 0.0 {
        return m;
    }
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        return l2(x);
    }
    m * x
        .iter()
        .map(|v| (v.abs() / m).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Gradient of the `ℓ_p` norm (`1 < p < ∞`) at a nonzero point.
fn lp_gradient(x: &[f64], p: f64) -> Vec<f64> {
    let n = lp_norm(x, p);
    if p.is_infinite() || p == 1.0 {
        unreachable!("l1 and linf are polytopal");
    }
    x.iter()
        .map(|v| sign(*v) * (v.abs() / n).powf(p - 1.0))
        .map(|v| if v == -0.0 { 0.0 } else { v })
        .collect()
}

fn lorentz_norm(x: &[f64], p: f64) -> f64 {
    let r = [x[0].hypot(x[1]), x[0].hypot(x[2]), x[1].hypot(x[2])];
    let m = r.iter().fold(0.0f64, |a, v| a.max(*v));
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = r.iter().map(|v| (v / m).powf(p)).sum();
    m * (s / 2.0).powf(1.0 / p)
}

/// Gradient at a point with `‖x‖_(p) = 1`; zero pair-radii contribute the
/// zero subgradient.
fn lorentz_gradient(x: &[f64], p: f64) -> Vec<f64> {
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    let mut g = [0.0; 3];
    for &(i, j) in &pairs {
        let r = x[i].hypot(x[j]);
        if r == 0.0 {
            continue;
        }
        let w = r.powf(p - 2.0);
        g[i] += 0.5 * w * x[i];
        g[j] += 0.5 * w * x[j];
    }
    g.to_vec()
}

fn example_3_2_candidates(x: &[f64]) -> Vec<Vec<f64>> {
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    let r: Vec<f64> = pairs.iter().map(|&(i, j)| x[i].hypot(x[j])).collect();
    let m = r.iter().fold(0.0f64, |a, v| a.max(*v));
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        if r[k] >= m * (1.0 - 1e-12) {
            let mut f = vec![0.0; 3];
            f[i] = x[i] / r[k];
            f[j] = x[j] / r[k];
            if !out.iter().any(|g| max_abs_diff(g, &f) <= 1e-15) {
                out.push(f);
            }
        }
    }
    out.sort_by(|a, b| lex_cmp(a, b));
    out
}

fn example_3_3_generators() -> Vec<Vec<f64>> {
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

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn named_norm_values() {
        let x = NormSpace::example_3_2();
        assert_abs_diff_eq!(
            x.norm(&[1.0, 1.0, 1.0]).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-15
        );
        let l = NormSpace::lorentz(1.0).unwrap();
        assert_abs_diff_eq!(l.norm(&[1.0, 0.0, 0.0]).unwrap(), 1.0, epsilon = 1e-15);
        let e = NormSpace::example_3_3();
        assert_eq!(e.norm(&[1.0, 1.0, 0.0, 0.0, 0.0]).unwrap(), 2.0);
        for s in [x, l, e, NormSpace::lp(4, 3.0).unwrap()] {
            assert_eq!(s.norm(&vec![0.0; s.dim()]).unwrap(), 0.0);
        }
    }

    #[test]
    fn dimension_and_parameter_errors() {
        let x = NormSpace::example_3_2();
        assert!(matches!(
            x.norm(&[1.0, 2.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                got: 2
            })
        ));
        assert!(NormSpace::lp(2, 0.5).is_err());
        assert!(NormSpace::lorentz(0.9).is_err());
        assert!(x.support_functional(&[0.0; 3]).is_err());
    }

    #[test]
    fn dual_norms() {
        assert_eq!(
            NormSpace::lp(2, 1.0)
                .unwrap()
                .dual_norm(&[1.0, 1.0])
                .unwrap(),
            1.0
        );
        assert_eq!(
            NormSpace::lp(2, 2.0)
                .unwrap()
                .dual_norm(&[3.0, 4.0])
                .unwrap(),
            5.0
        );
        let cube = NormSpace::lp(2, f64::INFINITY).unwrap();
        assert_eq!(cube.dual_norm(&[1.0, 1.0]).unwrap(), 2.0);
    }

    #[test]
    fn sampled_dual_norm_is_tight_on_example_3_2() {
        // x7* from the Example 3.2 proof has dual norm 1, attained at x7
        let s = 1.0 / (3.0 * 2f64.sqrt());
        let f = [s, -3.0 * s, 2.0 * s];
        let est = NormSpace::example_3_2().dual_norm_estimate(&f).unwrap();
        assert!(!est.exact);
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn support_functionals() {
        let e2 = NormSpace::lp(2, 2.0).unwrap();
        let sp = e2.support_functional(&[0.0, 2.0]).unwrap();
        assert_eq!(sp.x, vec![0.0, 1.0]);
        assert_eq!(sp.f, vec![0.0, 1.0]);

        let x = NormSpace::example_3_2();
        let sp = x.support_functional(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(sp.f, vec![1.0, 0.0, 0.0]);

        let l1 = NormSpace::lp(2, 1.0).unwrap();
        let sp = l1.support_functional(&[1.0, 1.0]).unwrap();
        assert_eq!(sp.f, vec![1.0, 1.0]);
        assert_eq!(sp.x, vec![0.5, 0.5]);
    }

    #[test]
    fn support_ties_enumerate_all() {
        let l1 = NormSpace::lp(2, 1.0).unwrap();
        let all = l1.support_functionals_all(&[1.0, 0.0]).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(
            l1.support_functional(&[1.0, 0.0]).unwrap().f,
            vec![1.0, -1.0]
        );
        let x = NormSpace::example_3_2();
        let all = x.support_functionals_all(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn lorentz_support_pairs_are_exact() {
        for p in [1.0, 1.5, 2.0, 4.0, 32.0] {
            let l = NormSpace::lorentz(p).unwrap();
            for x in [[1.0, 0.0, 0.0], [0.3, -0.7, 0.2], [1.0, 1.0, 1.0]] {
                let sp = l.support_functional(&x).unwrap();
                assert!(sp.slack < 1e-12, "p={p} x={x:?}");
                let dn = l.dual_norm(&sp.f).unwrap();
                assert!(dn <= 1.0 + 1e-9, "p={p} dual norm {dn}");
            }
        }
    }

    #[test]
    fn sections() {
        let x = NormSpace::example_3_2();
        let p2 = x.section(&[0, 1]).unwrap();
        assert!(p2.is_hilbert());
        let same = x.section(&[0, 1, 2]).unwrap();
        assert_eq!(
            same.norm(&[0.3, 0.4, 1.0]).unwrap(),
            x.norm(&[0.3, 0.4, 1.0]).unwrap()
        );

        for p in [1.0, 3.0, 8.0] {
            let l = NormSpace::lorentz(p).unwrap().section(&[0, 1]).unwrap();
            let (a, b) = (0.7f64, -0.4f64);
            let expect = 2f64.powf(-1.0 / p)
                * ((a * a + b * b).powf(p / 2.0) + a.abs().powf(p) + b.abs().powf(p)).powf(1.0 / p);
            assert_abs_diff_eq!(l.norm(&[a, b]).unwrap(), expect, epsilon = 1e-14);
        }
        assert!(x.section(&[0, 3]).is_err());
        assert!(x.section(&[1, 1]).is_err());
        assert!(x.section(&[]).is_err());
    }

    #[test]
    fn section_of_polytope_recomputes_ball() {
        let p4 = NormSpace::example_3_3().section(&[0, 1, 2, 3]).unwrap();
        let direct = NormSpace::example_3_3_p4();
        assert!(p4.is_polytopal());
        let v = [0.3, -1.2, 0.5, 2.0];
        assert_eq!(p4.norm(&v).unwrap(), direct.norm(&v).unwrap());
        assert_abs_diff_eq!(p4.norm(&v).unwrap(), 2.5, epsilon = 1e-15);
    }

    #[test]
    fn euclidean_constants_bound_sampled_ratios() {
        let spaces = [
            NormSpace::example_3_2(),
            NormSpace::lorentz(1.0).unwrap(),
            NormSpace::lorentz(7.0).unwrap(),
            NormSpace::lp(3, 1.5).unwrap(),
            NormSpace::lp(3, 4.0).unwrap(),
            NormSpace::example_3_3(),
        ];
        let mut rng = search::rng_for(1, 0);
        for s in &spaces {
            let (a, b) = s.euclidean_constants();
            for _ in 0..500 {
                let y = search::gaussian_vec(&mut rng, s.dim());
                let n = s.norm(&y).unwrap();
                assert!(n <= a * l2(&y) * (1.0 + 1e-12));
                assert!(l2(&y) <= b * n * (1.0 + 1e-12));
            }
        }
    }
}
