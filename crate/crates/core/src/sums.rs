//! Absolute sums `[X_1 ⊕ … ⊕ X_m]_E`, Köthe duals, the canonical
//! injections and projections, and the two operator constructions that move
//! operators between a sum and its summands.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::operator::OperatorMatrix;
use crate::point::{abs, dot, l2};
use crate::polytope::PolytopeBall;
use crate::search;
use crate::spaces::{sign, Estimate, Kind, NormSpace};

const ABSOLUTE_TRIALS: usize = 64;
const MAX_BALL_GENERATORS: usize = 1500;

/// An absolute norm `E` on `R^m` together with `m` component spaces.
#[derive(Debug, Clone)]
pub struct SumSpace {
    outer: NormSpace,
    components: Vec<NormSpace>,
    offsets: Vec<usize>,
    total: usize,
}

/// A point of a sum space split into its blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockVector {
    pub blocks: Vec<Vec<f64>>,
}

impl BlockVector {
    pub fn flatten(&self) -> Vec<f64> {
        self.blocks.concat()
    }
}

/// Builds the `E`-sum of `components`. `E` must pass the absolute-norm
/// checks and have one coordinate per component.
pub fn sum_space(outer: &NormSpace, components: Vec<NormSpace>) -> Result<SumSpace> {
    if components.len() != outer.dim() {
        return Err(Error::InvalidArgument(format!(
            "outer norm has dim {} but {} components were given",
            outer.dim(),
            components.len()
        )));
    }
    let report = outer.validate_absolute(ABSOLUTE_TRIALS, 0);
    if let Some(bad) = report.first_failure() {
        return Err(Error::NotAbsolute {
            property: bad.property,
            counterexample: bad
                .counterexample
                .as_ref()
                .map(|(x, _)| x.clone())
                .unwrap_or_default(),
        });
    }
    let mut offsets = Vec::with_capacity(components.len());
    let mut total = 0;
    for c in &components {
        offsets.push(total);
        total += c.dim();
    }
    Ok(SumSpace {
        outer: outer.clone(),
        components,
        offsets,
        total,
    })
}

/// The Köthe dual `E′`: `‖b‖_{E′} = sup_{a ∈ B_E} Σ |b_i a_i|`. Exact (by
/// polarity) for polytopal `E`, closed form for `ℓ_p`, numerical otherwise.
pub fn koethe_dual(e: &NormSpace) -> Result<NormSpace> {
    let report = e.validate_absolute(ABSOLUTE_TRIALS, 0);
    if let Some(bad) = report.first_failure() {
        return Err(Error::NotAbsolute {
            property: bad.property,
            counterexample: bad
                .counterexample
                .as_ref()
                .map(|(x, _)| x.clone())
                .unwrap_or_default(),
        });
    }
    let label = format!("{}'", e.label());
    Ok(match e.kind() {
        Kind::Lp { p } => NormSpace::lp(e.dim(), crate::spaces::conjugate(*p))?.with_label(label),
        Kind::Euclidean => NormSpace::euclidean(e.dim()).with_label(label),
        Kind::KoetheDual { inner } => inner.clone(),
        _ => match e.ball() {
            Some(ball) => NormSpace::polytope(ball.polar(), label),
            None => NormSpace::koethe(e.clone()),
        },
    })
}

impl SumSpace {
    pub fn outer(&self) -> &NormSpace {
        &self.outer
    }

    pub fn components(&self) -> &[NormSpace] {
        &self.components
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.dim()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn block_range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k] + self.components[k].dim()
    }

    pub(crate) fn label(&self) -> String {
        let parts: Vec<&str> = self.components.iter().map(|c| c.label()).collect();
        format!("[{}]_{}", parts.join("+"), self.outer.label())
    }

    pub fn split(&self, x: &[f64]) -> Result<BlockVector> {
        check_dim(self.total, x.len())?;
        Ok(BlockVector {
            blocks: (0..self.components.len())
                .map(|k| x[self.block_range(k)].to_vec())
                .collect(),
        })
    }

    /// Block norms `(‖x_1‖, …, ‖x_m‖)`.
    pub fn profile(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .enumerate()
            .map(|(k, c)| c.eval(&x[self.block_range(k)]))
            .collect()
    }

    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        self.outer.eval(&self.profile(x))
    }

    pub fn norm_blocks(&self, v: &BlockVector) -> Result<f64> {
        self.check_blocks(v)?;
        Ok(self.eval(&v.flatten()))
    }

    fn check_blocks(&self, v: &BlockVector) -> Result<()> {
        check_dim(self.components.len(), v.blocks.len())?;
        for (b, c) in v.blocks.iter().zip(&self.components) {
            check_dim(c.dim(), b.len())?;
        }
        Ok(())
    }

    pub(crate) fn dual_eval(&self, f: &[f64]) -> Estimate {
        let mut exact = true;
        let mut dual_profile = Vec::with_capacity(self.components.len());
        let mut block_witness = Vec::with_capacity(self.components.len());
        for (k, c) in self.components.iter().enumerate() {
            let est = c.dual_eval(&f[self.block_range(k)]);
            exact &= est.exact;
            dual_profile.push(est.value);
            block_witness.push(est.witness);
        }
        let outer = self.outer.dual_eval(&dual_profile);
        exact &= outer.exact;
        let witness = block_witness
            .iter()
            .zip(&outer.witness)
            .flat_map(|(w, a)| w.iter().map(move |v| v * a.abs()))
            .collect();
        Estimate {
            value: outer.value,
            exact,
            witness,
        }
    }

    pub(crate) fn support_raw(&self, x: &[f64]) -> Vec<f64> {
        let profile = self.profile(x);
        let c = abs(&self.outer.support_raw(&profile));
        let mut f = vec![0.0; self.total];
        for (k, comp) in self.components.iter().enumerate() {
            let r = self.block_range(k);
            if profile[k] == 0.0 || c[k] == 0.0 {
                continue;
            }
            let g = comp.support_raw(&x[r.clone()]);
            for (dst, v) in f[r].iter_mut().zip(g) {
                *dst = c[k] * v;
            }
        }
        f
    }

    pub(crate) fn seed_points(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for (k, c) in self.components.iter().enumerate() {
            for s in c.seed_points() {
                let mut v = vec![0.0; self.total];
                v[self.block_range(k)].copy_from_slice(&s);
                out.push(v);
            }
        }
        for a in self.outer.seed_points() {
            let mut v = vec![0.0; self.total];
            for (k, c) in self.components.iter().enumerate() {
                let s = &c.seed_points()[0];
                for (dst, x) in v[self.block_range(k)].iter_mut().zip(s) {
                    *dst = a[k].abs() * x;
                }
            }
            out.push(v);
        }
        out
    }

    pub(crate) fn euclidean_constants(&self) -> (f64, f64) {
        let (ae, be) = self.outer.euclidean_constants();
        let (mut a, mut b) = (0.0f64, 0.0f64);
        for c in &self.components {
            let (ak, bk) = c.euclidean_constants();
            a = a.max(ak);
            b = b.max(bk);
        }
        (ae * a, be * b)
    }

    /// Wraps the sum as a norm space; polytopal summands under a polytopal
    /// outer norm yield an explicit vertex representation.
    pub fn into_space(self) -> NormSpace {
        let ball = self.polytope_ball();
        NormSpace::sum(self, ball)
    }

    fn polytope_ball(&self) -> Option<PolytopeBall> {
        let outer = self.outer.ball()?;
        let comps: Vec<&PolytopeBall> = self
            .components
            .iter()
            .map(|c| c.ball())
            .collect::<Option<_>>()?;
        let primal = self.product_generators(
            outer.primal_vertices(),
            &comps
                .iter()
                .map(|b| b.primal_vertices())
                .collect::<Vec<_>>(),
        )?;
        let dual = self.product_generators(
            outer.dual_vertices(),
            &comps.iter().map(|b| b.dual_vertices()).collect::<Vec<_>>(),
        )?;
        PolytopeBall::from_generators(self.total, &primal, &dual).ok()
    }

    /// `{(|a_k| v_k)}` over extreme `a` of the outer ball and vertices `v_k`
    /// of the summands; blocks with `a_k = 0` stay zero.
    fn product_generators(
        &self,
        outer: &[Vec<f64>],
        blocks: &[&[Vec<f64>]],
    ) -> Option<Vec<Vec<f64>>> {
        let mut profiles: Vec<Vec<f64>> = outer.iter().map(|a| abs(a)).collect();
        profiles.sort_by(|a, b| crate::point::lex_cmp(a, b));
        profiles.dedup();
        let mut out: Vec<Vec<f64>> = Vec::new();
        for a in &profiles {
            let active: Vec<usize> = (0..a.len()).filter(|&k| a[k] != 0.0).collect();
            let count: usize = active.iter().map(|&k| blocks[k].len()).product();
            if out.len() + count > MAX_BALL_GENERATORS * 4 {
                return None;
            }
            let mut idx = vec![0usize; active.len()];
            loop {
                let mut v = vec![0.0; self.total];
                for (slot, &k) in active.iter().enumerate() {
                    let r = self.block_range(k);
                    for (dst, x) in v[r].iter_mut().zip(&blocks[k][idx[slot]]) {
                        *dst = a[k] * x;
                    }
                }
                // keep one of each ± pair
                if v.iter().find(|x| **x != 0.0).is_some_and(|x| *x > 0.0) {
                    out.push(v);
                }
                let mut pos = 0;
                loop {
                    if pos == idx.len() {
                        break;
                    }
                    idx[pos] += 1;
                    if idx[pos] < blocks[active[pos]].len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == idx.len() {
                    break;
                }
            }
        }
        (out.len() <= MAX_BALL_GENERATORS).then_some(out)
    }
}

/// `I_κ(x)`: `x` in block `kappa`, zeros elsewhere.
pub fn inject(s: &SumSpace, kappa: usize, x: &[f64]) -> Result<BlockVector> {
    let comp = s
        .components
        .get(kappa)
        .ok_or_else(|| Error::InvalidArgument(format!("block index {kappa} out of range")))?;
    check_dim(comp.dim(), x.len())?;
    Ok(BlockVector {
        blocks: s
            .components
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k == kappa {
                    x.to_vec()
                } else {
                    vec![0.0; c.dim()]
                }
            })
            .collect(),
    })
}

/// `P_κ(v) = v_κ`.
pub fn project(s: &SumSpace, kappa: usize, v: &BlockVector) -> Result<Vec<f64>> {
    if kappa >= s.components.len() {
        return Err(Error::InvalidArgument(format!(
            "block index {kappa} out of range"
        )));
    }
    s.check_blocks(v)?;
    Ok(v.blocks[kappa].clone())
}

/// `I_κ S P_κ` as a `total_dim`-sized matrix.
pub fn lift_operator(s: &SumSpace, kappa: usize, op: &OperatorMatrix) -> Result<OperatorMatrix> {
    let comp = s
        .components
        .get(kappa)
        .ok_or_else(|| Error::InvalidArgument(format!("block index {kappa} out of range")))?;
    check_dim(comp.dim(), op.size())?;
    let mut t = OperatorMatrix::zeros(s.total);
    let off = s.offsets[kappa];
    for i in 0..op.size() {
        for j in 0..op.size() {
            t.set(off + i, off + j, op.get(i, j));
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityWitness {
    pub a_index: usize,
    pub b_index: usize,
    pub kappa: usize,
    /// `|a_λ b_λ|` for `λ ≠ κ`.
    pub residuals: Vec<f64>,
    /// `|a_κ b_κ|`.
    pub product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub witnesses: Vec<OrthogonalityWitness>,
    /// Pairs for which no coordinate works; `kappa` is the best candidate.
    pub failures: Vec<OrthogonalityWitness>,
    /// Sampled evidence that the solid hull of `A` is `B_E`.
    pub hull_gap: f64,
    /// Sampled evidence that `B` is norming for `E`.
    pub norming_gap: f64,
    pub samples: usize,
    pub tolerance: f64,
}

impl OrthogonalityReport {
    pub fn pairs_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn hull_ok(&self) -> bool {
        self.hull_gap <= self.tolerance
    }

    pub fn norming_ok(&self) -> bool {
        self.norming_gap <= self.tolerance
    }

    pub fn passed(&self) -> bool {
        self.pairs_ok() && self.hull_ok() && self.norming_ok()
    }
}

/// Checks the coordinatewise orthogonality condition on `A × B`: for every
/// pair there must be a single `κ` with `a_κ b_κ = ±1` and `a_λ b_λ = 0`
/// elsewhere. The closed-convex-hull and norming hypotheses are only probed
/// on random directions.
pub fn check_orthogonality(
    e: &NormSpace,
    a_set: &[Vec<f64>],
    b_set: &[Vec<f64>],
    tol: f64,
) -> Result<OrthogonalityReport> {
    if a_set.is_empty() || b_set.is_empty() {
        return Err(Error::InvalidArgument("A and B must be nonempty".into()));
    }
    let m = e.dim();
    for (i, a) in a_set.iter().enumerate() {
        let n = e.norm(a)?;
        if (n - 1.0).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "A[{i}] has norm {n}, not 1"
            )));
        }
    }
    for (j, b) in b_set.iter().enumerate() {
        let n = e.dual_norm(&abs(b))?;
        if (n - 1.0).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "B[{j}] has Köthe dual norm {n}, not 1"
            )));
        }
    }
    let pair = |i: usize, j: usize| {
        let prods: Vec<f64> = (0..m).map(|l| (a_set[i][l] * b_set[j][l]).abs()).collect();
        let kappa = (0..m)
            .max_by(|&x, &y| prods[x].total_cmp(&prods[y]).then(y.cmp(&x)))
            .expect("m >= 1");
        let residuals: Vec<f64> = (0..m).filter(|&l| l != kappa).map(|l| prods[l]).collect();
        OrthogonalityWitness {
            a_index: i,
            b_index: j,
            kappa,
            residuals,
            product: prods[kappa],
        }
    };
    let all: Vec<OrthogonalityWitness> = (0..a_set.len())
        .flat_map(|i| (0..b_set.len()).map(move |j| (i, j)))
        .map(|(i, j)| pair(i, j))
        .collect();
    let (witnesses, failures): (Vec<_>, Vec<_>) = all
        .into_iter()
        .partition(|w| w.residuals.iter().all(|&r| r <= tol) && (w.product - 1.0).abs() <= tol);

    let samples = 256;
    let mut rng = search::rng_for(0x6f72_7468, m as u64);
    let mut hull_gap = 0.0f64;
    let mut norming_gap = 0.0f64;
    for _ in 0..samples {
        let g = abs(&search::gaussian_vec(&mut rng, m));
        let support = a_set.iter().map(|a| dot(&g, &abs(a))).fold(0.0, f64::max);
        hull_gap = hull_gap.max(e.dual_eval(&g).value - support);
        let x = abs(&search::gaussian_vec(&mut rng, m));
        let best = b_set.iter().map(|b| dot(&x, &abs(b))).fold(0.0, f64::max);
        norming_gap = norming_gap.max(e.eval(&x) - best);
    }
    Ok(OrthogonalityReport {
        witnesses,
        failures,
        hull_gap,
        norming_gap,
        samples,
        tolerance: tol,
    })
}

/// Sets `A` and `B` of outer-norm vectors.
pub type OrthogonalSets = (Vec<Vec<f64>>, Vec<Vec<f64>>);

/// The hard-coded `A` and `B` sets for `ℓ1` and `ℓ∞` outer norms: unit
/// vectors on one side and sign vectors on the other.
pub fn canonical_orthogonal_sets(e: &NormSpace) -> Option<OrthogonalSets> {
    let m = e.dim();
    let units: Vec<Vec<f64>> = (0..m).map(|i| crate::spaces::unit(m, i)).collect();
    let signs = crate::polytope::sign_vectors(m);
    match e.kind() {
        Kind::Lp { p } if *p == 1.0 => Some((units, signs)),
        Kind::Lp { p } if p.is_infinite() => Some((signs, units)),
        _ if m == 1 => Some((units.clone(), units)),
        _ => None,
    }
}

/// Output of [`transfer_operator`]: the operator on block `κ` and the data
/// needed to replay the pairing identities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Transfer {
    pub kappa: usize,
    pub op: OperatorMatrix,
    /// Scalars `a_λ` and unit vectors `x_λ` with `a = (a_λ x_λ)`.
    pub a_scalars: Vec<f64>,
    pub a_units: Vec<Vec<f64>>,
    /// Scalars `b_λ` and norm-one functionals `x*_λ` with `b = (b_λ x*_λ)`.
    pub b_scalars: Vec<f64>,
    pub b_units: Vec<Vec<f64>>,
    /// Norm-attaining point of `x*_κ`.
    pub x_tilde: Vec<f64>,
    /// Supporting functional of `x_κ`.
    pub y_star: Vec<f64>,
    /// `|x*_κ(S x_κ)|`.
    pub lhs: f64,
    /// `|b(T a)|`.
    pub rhs: f64,
}

impl Transfer {
    /// `Φ(z)`: block `λ ≠ κ` is `a_λ y*_κ(z) x_λ`, block `κ` is `a_κ z`.
    pub fn phi(&self, z: &[f64]) -> BlockVector {
        let yz = dot(&self.y_star, z);
        BlockVector {
            blocks: (0..self.a_scalars.len())
                .map(|l| {
                    if l == self.kappa {
                        z.iter().map(|v| self.a_scalars[l] * v).collect()
                    } else {
                        self.a_units[l]
                            .iter()
                            .map(|v| self.a_scalars[l] * yz * v)
                            .collect()
                    }
                })
                .collect(),
        }
    }

    /// `Ψ(ζ*)`: block `λ ≠ κ` is `b_λ ζ*(x̃_κ) x*_λ`, block `κ` is `b_κ ζ*`.
    pub fn psi(&self, zeta_star: &[f64]) -> BlockVector {
        let zx = dot(zeta_star, &self.x_tilde);
        BlockVector {
            blocks: (0..self.b_scalars.len())
                .map(|l| {
                    if l == self.kappa {
                        zeta_star.iter().map(|v| self.b_scalars[l] * v).collect()
                    } else {
                        self.b_units[l]
                            .iter()
                            .map(|v| self.b_scalars[l] * zx * v)
                            .collect()
                    }
                })
                .collect(),
        }
    }
}

fn split_scaled(comps: &[NormSpace], blocks: &[Vec<f64>], dual: bool) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut scalars = Vec::with_capacity(comps.len());
    let mut units = Vec::with_capacity(comps.len());
    for (c, b) in comps.iter().zip(blocks) {
        let s = if dual {
            c.dual_eval(b).value
        } else {
            c.eval(b)
        };
        scalars.push(s);
        if s > 0.0 {
            units.push(b.iter().map(|v| v / s).collect());
        } else {
            // any unit vector (or norm-one functional) will do
            let e = crate::spaces::unit(c.dim(), 0);
            units.push(if dual {
                let w = c.eval(&e);
                e.iter().map(|v| v * w).collect()
            } else {
                c.normalized(&e)
            });
        }
    }
    (scalars, units)
}

/// Builds the operator `S` on block `κ` from `T` on the sum and a pair
/// `a = (a_λ x_λ)`, `b = (b_λ x*_λ)` satisfying the orthogonality condition
/// at `κ`, so that `|x*_κ(S x_κ)| = |b(T a)|`.
pub fn transfer_operator(
    s: &SumSpace,
    t: &OperatorMatrix,
    a: &BlockVector,
    b: &BlockVector,
    kappa: usize,
    tol: f64,
) -> Result<Transfer> {
    check_dim(s.total, t.size())?;
    s.check_blocks(a)?;
    s.check_blocks(b)?;
    let m = s.components.len();
    if kappa >= m {
        return Err(Error::InvalidArgument(format!(
            "block index {kappa} out of range"
        )));
    }
    let (a_scalars, a_units) = split_scaled(&s.components, &a.blocks, false);
    let (b_scalars, b_units) = split_scaled(&s.components, &b.blocks, true);
    for l in 0..m {
        let prod = a_scalars[l] * b_scalars[l];
        let bad = if l == kappa {
            ((prod - 1.0).abs() > tol).then(|| format!("a_κ b_κ = {prod}, expected 1"))
        } else {
            (prod.abs() > tol).then(|| format!("a_{l} b_{l} = {prod}, expected 0"))
        };
        if let Some(reason) = bad {
            return Err(Error::Orthogonality {
                a_index: l,
                b_index: l,
                reason,
            });
        }
    }
    let comp = &s.components[kappa];
    let dk = comp.dim();
    let x_star = b_units[kappa].clone();
    let attain = comp.dual_eval(&x_star);
    let x_tilde = if attain.value > 0.0 {
        attain
            .witness
            .iter()
            .map(|v| v / comp.eval(&attain.witness).max(f64::MIN_POSITIVE))
            .collect::<Vec<_>>()
    } else {
        comp.normalized(&crate::spaces::unit(dk, 0))
    };
    // orient x̃ so that x*_κ(x̃) = +1
    let x_tilde: Vec<f64> = if dot(&x_star, &x_tilde) < 0.0 {
        x_tilde.iter().map(|v| -v).collect()
    } else {
        x_tilde
    };
    let y_star = comp.support_raw(&a_units[kappa]);

    let mut transfer = Transfer {
        kappa,
        op: OperatorMatrix::zeros(dk),
        a_scalars,
        a_units,
        b_scalars,
        b_units,
        x_tilde,
        y_star,
        lhs: 0.0,
        rhs: 0.0,
    };
    let mut op = OperatorMatrix::zeros(dk);
    let range_k = s.block_range(kappa);
    for j in 0..dk {
        let phi = transfer.phi(&crate::spaces::unit(dk, j)).flatten();
        let w = t.apply(&phi);
        let mut scalar = 0.0;
        for l in (0..m).filter(|&l| l != kappa) {
            scalar += transfer.b_scalars[l] * dot(&transfer.b_units[l], &w[s.block_range(l)]);
        }
        for i in 0..dk {
            let v = scalar * transfer.x_tilde[i] + transfer.b_scalars[kappa] * w[range_k.start + i];
            op.set(i, j, v);
        }
    }
    let xk = &transfer.a_units[kappa];
    transfer.lhs = dot(&x_star, &op.apply(xk)).abs();
    transfer.rhs = dot(&b.flatten(), &t.apply(&a.flatten())).abs();
    transfer.op = op;
    Ok(transfer)
}

/// `‖·‖₂`-normalized helper used by tests and scenarios.
pub fn unit_l2(v: &[f64]) -> Vec<f64> {
    let r = l2(v);
    v.iter().map(|x| x / r).collect()
}

/// Flips the sign of `b` coordinatewise to match `a` (used to build `B`
/// members from absolute values).
pub fn signed_like(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| y.abs() * sign(*x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn l1(m: usize) -> NormSpace {
        NormSpace::lp(m, 1.0).unwrap()
    }

    fn linf(m: usize) -> NormSpace {
        NormSpace::lp(m, f64::INFINITY).unwrap()
    }

    #[test]
    fn block_formula() {
        let comps = vec![NormSpace::euclidean(2), linf(2)];
        let x = [3.0, 4.0, 1.0, -1.0];
        let s1 = sum_space(&l1(2), comps.clone()).unwrap().into_space();
        assert_abs_diff_eq!(s1.norm(&x).unwrap(), 6.0, epsilon = 1e-15);
        let s2 = sum_space(&linf(2), comps).unwrap().into_space();
        assert_abs_diff_eq!(s2.norm(&x).unwrap(), 5.0, epsilon = 1e-15);
        assert!(!s1.is_polytopal());
    }

    #[test]
    fn arity_and_absoluteness_errors() {
        assert!(sum_space(&l1(2), vec![NormSpace::euclidean(2)]).is_err());
        let ball =
            PolytopeBall::from_dual_generators(2, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let skewed = NormSpace::polytope(ball, "skewed");
        let err = sum_space(&skewed, vec![l1(1), l1(1)]).unwrap_err();
        assert!(matches!(err, Error::NotAbsolute { property: 'a', .. }));
        assert!(koethe_dual(&skewed).is_err());
    }

    #[test]
    fn koethe_duals() {
        let d = koethe_dual(&l1(3)).unwrap();
        let x = [0.5, -2.0, 1.0];
        assert_eq!(d.norm(&x).unwrap(), 2.0);
        let d3 = koethe_dual(&NormSpace::lp(3, 3.0).unwrap()).unwrap();
        assert_abs_diff_eq!(
            d3.norm(&x).unwrap(),
            crate::spaces::lp_norm(&x, 1.5),
            epsilon = 1e-14
        );
        let lor = NormSpace::lorentz(1.0).unwrap();
        let dl = koethe_dual(&lor).unwrap();
        assert_abs_diff_eq!(dl.norm(&[1.0, 0.0, 0.0]).unwrap(), 1.0, epsilon = 1e-10);
        assert!(dl.validate_absolute(40, 1).passed());
    }

    #[test]
    fn polytopal_sums_get_vertex_lists() {
        let s = sum_space(&l1(2), vec![linf(2), linf(2)])
            .unwrap()
            .into_space();
        let ball = s.ball().expect("polytopal");
        assert_eq!(ball.primal_vertices().len(), 8);
        assert_eq!(ball.dual_vertices().len(), 16);
        let x = [0.5, -1.0, 0.25, 0.0];
        assert_abs_diff_eq!(s.norm(&x).unwrap(), 1.25, epsilon = 1e-15);
    }

    #[test]
    fn one_dimensional_outer_is_identity() {
        let x = NormSpace::lorentz(3.0).unwrap();
        let s = sum_space(&l1(1), vec![x.clone()]).unwrap().into_space();
        let mut rng = search::rng_for(4, 0);
        for _ in 0..100 {
            let v = search::gaussian_vec(&mut rng, 3);
            assert_abs_diff_eq!(s.norm(&v).unwrap(), x.norm(&v).unwrap(), epsilon = 1e-14);
        }
    }

    #[test]
    fn inject_project() {
        let s = sum_space(
            &l1(2),
            vec![NormSpace::euclidean(2), NormSpace::euclidean(2)],
        )
        .unwrap();
        let v = inject(&s, 1, &[1.0, 0.0]).unwrap();
        assert_eq!(s.norm_blocks(&v).unwrap(), 1.0);
        assert_eq!(project(&s, 1, &v).unwrap(), vec![1.0, 0.0]);
        let z = inject(&s, 0, &[0.0, 0.0]).unwrap();
        assert_eq!(s.norm_blocks(&z).unwrap(), 0.0);
        assert!(inject(&s, 2, &[1.0, 0.0]).is_err());
        assert!(inject(&s, 0, &[1.0]).is_err());
        assert!(project(&s, 5, &v).is_err());

        let lines = vec![l1(1), l1(1), l1(1)];
        let s = sum_space(&NormSpace::lorentz(1.0).unwrap(), lines).unwrap();
        let v = inject(&s, 1, &[1.0]).unwrap();
        assert_abs_diff_eq!(s.norm_blocks(&v).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn equal_blocks_in_linf_sum() {
        let s = sum_space(
            &linf(2),
            vec![NormSpace::euclidean(2), NormSpace::euclidean(2)],
        )
        .unwrap();
        let v = BlockVector {
            blocks: vec![vec![0.6, 0.8], vec![0.6, 0.8]],
        };
        let n = s.norm_blocks(&v).unwrap();
        for k in 0..2 {
            let p = project(&s, k, &v).unwrap();
            assert_abs_diff_eq!(s.components()[k].norm(&p).unwrap(), n, epsilon = 1e-15);
        }
    }

    #[test]
    fn lift_shapes() {
        let s = sum_space(&l1(2), vec![NormSpace::euclidean(2), linf(2)]).unwrap();
        let t = lift_operator(&s, 1, &OperatorMatrix::identity(2)).unwrap();
        assert_eq!(t.get(2, 2), 1.0);
        assert_eq!(t.get(0, 0), 0.0);
        assert!(lift_operator(&s, 0, &OperatorMatrix::zeros(2))
            .unwrap()
            .is_zero());
        assert!(lift_operator(&s, 0, &OperatorMatrix::zeros(3)).is_err());
    }

    #[test]
    fn orthogonality_of_canonical_sets() {
        let (a, b) = canonical_orthogonal_sets(&l1(2)).unwrap();
        let r = check_orthogonality(&l1(2), &a, &b, 1e-12).unwrap();
        assert_eq!(r.witnesses.len(), 8);
        assert!(r.passed());
        let (a, b) = canonical_orthogonal_sets(&linf(2)).unwrap();
        let r = check_orthogonality(&linf(2), &a, &b, 1e-12).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn orthogonality_failure_in_l2() {
        let e = NormSpace::lp(2, 2.0).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let r = check_orthogonality(&e, &[vec![1.0, 0.0]], &[vec![h, h]], 1e-9).unwrap();
        assert!(!r.pairs_ok());
        assert_abs_diff_eq!(r.failures[0].product, h, epsilon = 1e-15);
        assert!(check_orthogonality(&e, &[], &[vec![1.0, 0.0]], 1e-9).is_err());
    }

    #[test]
    fn transfer_of_identity_and_lift() {
        let comps = vec![linf(2), NormSpace::euclidean(2)];
        let s = sum_space(&l1(2), comps).unwrap();
        // a = e_1-block point, b = sign vector profile with unit functionals
        let a = BlockVector {
            blocks: vec![vec![1.0, -1.0], vec![0.0, 0.0]],
        };
        let b = BlockVector {
            blocks: vec![vec![1.0, 0.0], vec![0.6, 0.8]],
        };
        let id = OperatorMatrix::identity(4);
        let tr = transfer_operator(&s, &id, &a, &b, 0, 1e-12).unwrap();
        assert_abs_diff_eq!(tr.lhs, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tr.rhs, 1.0, epsilon = 1e-12);

        let s0 = OperatorMatrix::from_rows(&[vec![0.3, -1.0], vec![2.0, 0.5]]).unwrap();
        let t = lift_operator(&s, 0, &s0).unwrap();
        let tr = transfer_operator(&s, &t, &a, &b, 0, 1e-12).unwrap();
        let direct = dot(&tr.b_units[0], &s0.apply(&tr.a_units[0])).abs();
        assert_abs_diff_eq!(tr.lhs, direct, epsilon = 1e-12);
        assert_abs_diff_eq!(tr.lhs, tr.rhs, epsilon = 1e-12);

        // Ψ(ζ*)(Φ(ζ)) = 1 for a supporting pair of block κ
        let zeta = [1.0, 0.3];
        let zs = s.components()[0].support_functional(&zeta).unwrap();
        let val = dot(&tr.psi(&zs.f).flatten(), &tr.phi(&zs.x).flatten());
        assert_abs_diff_eq!(val, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn transfer_rejects_non_orthogonal_pairs() {
        let s = sum_space(&l1(2), vec![linf(2), linf(2)]).unwrap();
        let a = BlockVector {
            blocks: vec![vec![0.5, 0.5], vec![0.5, 0.0]],
        };
        let b = BlockVector {
            blocks: vec![vec![1.0, 0.0], vec![1.0, 0.0]],
        };
        let err = transfer_operator(&s, &OperatorMatrix::identity(4), &a, &b, 0, 1e-9);
        assert!(matches!(err, Err(Error::Orthogonality { .. })));
    }
}
