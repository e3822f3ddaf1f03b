//! Scenario runners.

use std::collections::HashMap;

use serde_json::json;

use super::params::{self, Params};
use super::{Recorder, Relation, ScenarioKind};
use crate::error::{Error, Result};
use crate::numrange::{
    certified_lower_bound, evaluate_ratio, example_3_2_implications, example_3_2_pairs,
    numerical_index, numerical_radius, operator_norm, zero_radius_certificate, CertificateTag,
    IndexEstimate, IndexOptions, RadiusConfig, RatioEvaluator,
};
use crate::operator::OperatorMatrix;
use crate::point::{dot, max_abs_diff};
use crate::search;
use crate::spaces::NormSpace;
use crate::sums::{self, lift_operator, sum_space, BlockVector, SumSpace};

/// Tolerance when both sides of a comparison are exact.
const EXACT_TOL: f64 = 1e-9;
/// One-sided slack when either side involves sampled radii or norms.
const SAMPLED_TOL: f64 = 1e-2;
/// Default for optimizer-versus-optimizer index comparisons.
const INDEX_TOL: f64 = 5e-3;

pub(crate) fn run(kind: ScenarioKind, p: &Params, seed: u64, rec: &mut Recorder) -> Result<()> {
    match kind {
        ScenarioKind::LiftUpper => lift_upper(p, seed, rec),
        ScenarioKind::L1LinfEquality => l1_linf_equality(p, seed, rec),
        ScenarioKind::IndexOneOuterEquality => index_one_outer_equality(p, seed, rec),
        ScenarioKind::Transfer => transfer(p, seed, rec),
        ScenarioKind::ChainLimsup => chain_limsup(p, seed, rec),
        ScenarioKind::LpMonotone => lp_monotone(p, seed, rec),
        ScenarioKind::MaxPairs => max_pairs(p, seed, rec),
        ScenarioKind::Polyhedral5 => polyhedral5(p, seed, rec),
        ScenarioKind::LorentzSweep => lorentz_sweep(p, seed, rec),
    }
}

/// Index estimates with a per-run cache; sums are seeded with the lifted
/// witnesses of their summands.
pub(crate) struct Estimator {
    opts: IndexOptions,
    cache: HashMap<String, IndexEstimate>,
}

impl Estimator {
    pub(crate) fn new(opts: IndexOptions) -> Self {
        Self {
            opts,
            cache: HashMap::new(),
        }
    }

    fn key(x: &NormSpace) -> String {
        serde_json::to_string(&x.descriptor()).expect("descriptor serializes")
    }

    pub(crate) fn estimate(&mut self, x: &NormSpace) -> Result<IndexEstimate> {
        self.estimate_with(x, Vec::new())
    }

    pub(crate) fn estimate_with(
        &mut self,
        x: &NormSpace,
        extra: Vec<OperatorMatrix>,
    ) -> Result<IndexEstimate> {
        let key = Self::key(x);
        if extra.is_empty() {
            if let Some(e) = self.cache.get(&key) {
                return Ok(e.clone());
            }
        }
        let mut opts = self.opts.clone();
        if let Some(s) = x.as_sum() {
            for (k, c) in s.components().iter().enumerate() {
                let e = self.estimate(c)?;
                opts.starts.push(lift_operator(s, k, &e.witness)?);
            }
        }
        opts.starts.extend(extra);
        let e = numerical_index(x, &opts)?;
        self.cache.insert(key, e.clone());
        Ok(e)
    }
}

/// Index estimate of `x` where sums start from their summands' lifted
/// witnesses.
pub fn estimate_index(x: &NormSpace, opts: &IndexOptions) -> Result<IndexEstimate> {
    let mut est = Estimator::new(opts.clone());
    est.estimate_with(x, opts.starts.clone())
}

/// Lower bound carries a certificate and meets the upper bound.
fn certified(e: &IndexEstimate) -> bool {
    e.certificate != CertificateTag::None && e.lower >= e.upper - EXACT_TOL
}

fn exact_eval(x: &NormSpace) -> bool {
    x.is_polytopal() || x.is_hilbert()
}

fn build_sum(outer: &NormSpace, comps: Vec<NormSpace>) -> Result<(SumSpace, NormSpace)> {
    let s = sum_space(outer, comps)?;
    let space = s.clone().into_space();
    Ok((s, space))
}

fn sum_params(p: &Params) -> Result<(NormSpace, Vec<NormSpace>)> {
    let comps = params::spaces(p, "components")?;
    let outer = match params::opt::<String>(p, "direction")? {
        Some(d) => {
            let q = match d.as_str() {
                "l1" => 1.0,
                "linf" => f64::INFINITY,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "direction must be l1 or linf, got `{other}`"
                    )))
                }
            };
            NormSpace::lp(comps.len(), q)?
        }
        None => params::space(p, "outer")?,
    };
    Ok((outer, comps))
}

/// Records `|n(sum) − min_κ n(X_κ)| ≤ tol`, with `tol` tightened to the
/// exact tolerance when both sides are certified.
fn sum_equality(
    p: &Params,
    seed: u64,
    rec: &mut Recorder,
    outer: &NormSpace,
    comps: Vec<NormSpace>,
) -> Result<()> {
    let tol = params::tolerance(p, "tolerance", INDEX_TOL)?;
    let mut est = Estimator::new(params::index_options(p, seed)?);
    let mut parts = Vec::new();
    for (k, c) in comps.iter().enumerate() {
        let e = est.estimate(c)?;
        rec.value(format!("component_{k}_upper"), e.upper);
        rec.value(format!("component_{k}_lower"), e.lower);
        rec.witness(format!("component_{k}"), &e);
        parts.push(e);
    }
    let (_, space) = build_sum(outer, comps)?;
    let sum = est.estimate(&space)?;
    rec.value("sum_upper", sum.upper);
    rec.value("sum_lower", sum.lower);
    rec.witness("sum", &sum);
    let (kmin, min) = parts
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.upper.total_cmp(&b.1.upper))
        .expect("nonempty components");
    let both = certified(&sum) && certified(min);
    rec.value("sum_certified", f64::from(u8::from(certified(&sum))));
    rec.value("min_certified", f64::from(u8::from(certified(min))));
    rec.check(
        "sum_bounds_consistent",
        Relation::Le,
        sum.lower,
        sum.upper,
        EXACT_TOL,
        Some("sum"),
    );
    let w = format!("component_{kmin}");
    rec.check(
        "index_equals_min",
        Relation::Eq,
        sum.upper,
        min.upper,
        if both { EXACT_TOL } else { tol },
        Some(if both { "sum" } else { w.as_str() }),
    );
    Ok(())
}

fn l1_linf_equality(p: &Params, seed: u64, rec: &mut Recorder) -> Result<()> {
    let (outer, comps) = sum_params(p)?;
    let ok = matches!(outer.kind(), crate::spaces::Kind::Lp { p } if *p == 1.0 || p.is_infinite());
    if !ok {
        return Err(Error::InvalidArgument(
            "outer norm must be l1 or linf".into(),
        ));
    }
    sum_equality(p, seed, rec, &outer, comps)
}

fn index_one_outer_equality(p: &Params, seed: u64, rec: &mut Recorder) -> Result<()> {
    let (outer, comps) = sum_params(p)?;
    let lb = certified_lower_bound(&outer, seed);
    rec.witness("outer_certificate", &lb);
    rec.check(
        "outer_index_one_certified",
        Relation::Ge,
        lb.value,
        1.0,
        0.0,
        Some("outer_certificate"),
    );
    sum_equality(p, seed, rec, &outer, comps)
}

fn lift_upper(p: &Params, seed: u64, rec: &mut Recorder) -> Result<()> {
    let (outer, comps) = sum_params(p)?;
    let opts = params::index_options(p, seed)?;
    let (s, space) = build_sum(&outer, comps)?;
    let eval = RatioEvaluator::for_space(&space, opts.final_samples, seed);
    let mut est = Estimator::new(opts);
    let mut best_lift = f64::INFINITY;
    let mut best_comp = f64::INFINITY;
    for (k, c) in s.components().iter().enumerate() {
        let e = est.estimate(c)?;
        let lifted = lift_operator(&s, k, &e.witness)?;
        let r = evaluate_ratio(&space, &lifted, &eval)?;
        let tol = if exact_eval(c) && exact_eval(&space) {
            EXACT_TOL
        } else {
            SAMPLED_TOL
        };
        let key = format!("lift_{k}");
        rec.witness(
            &key,
            &json!({"summand": k, "operator": e.witness, "summand_estimate": e,
                    "lifted": lifted, "evaluator": eval, "radius": r.radius, "norm": r.norm}),
        );
        rec.check(
            format!("lift_{k}_norm_preserved"),
            Relation::Eq,
            r.norm,
            e.witness_norm,
            tol,
            Some(&key),
        );
        rec.check(
            format!("lift_{k}_ratio_not_larger"),
            Relation::Le,
            r.value(),
            e.upper,
            tol,
            Some(&key),
        );
        best_lift = best_lift.min(r.value());
        best_comp = best_comp.min(e.upper);
    }
    rec.value("sum_upper", best_lift);
    rec.value("min_summand_upper", best_comp);
    rec.check(
        "sum_upper_below_min",
        Relation::Le,
        best_lift,
        best_comp,
        SAMPLED_TOL.min(params::tolerance(p, "tolerance", SAMPLED_TOL)?),
        None,
    );
    if let Some(cap) = params::opt::<f64>(p, "expected_upper_at_most")? {
        rec.check(
            "sum_upper_expected",
            Relation::Le,
            best_lift,
            cap,
            0.0,
            None,
        );
    }
    Ok(())
}

fn random_unit(x: &NormSpace, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    x.normalized(&search::sphere_direction(rng, x.dim()))
}

fn random_dual_unit(x: &NormSpace, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    let f = search::sphere_direction(rng, x.dim());
    let n = x.dual_eval(&f).value;
    f.iter().map(|v| v / n).collect()
}

fn transfer(p: &Params, seed: u64, rec: &mut Recorder) -> Result<()> {
    let (outer, comps) = sum_params(p)?;
    let trials: usize = params::or(p, "operators", 20)?;
    let tol = params::tolerance(p, "tolerance", EXACT_TOL)?;
    let (a_set, b_set) = match (
        params::opt::<Vec<Vec<f64>>>(p, "a_set")?,
        params::opt::<Vec<Vec<f64>>>(p, "b_set")?,
    ) {
        (Some(a), Some(b)) => (a, b),
        _ => sums::canonical_orthogonal_sets(&outer).ok_or_else(|| {
            Error::InvalidArgument(
                "no orthogonal sets known for this outer norm; pass a_set and b_set".into(),
            )
        })?,
    };
    let orth = sums::check_orthogonality(&outer, &a_set, &b_set, 1e-9)?;
    rec.witness("orthogonality", &orth);
    rec.check(
        "orthogonality_condition",
        Relation::Eq,
        f64::from(u8::from(orth.passed())),
        1.0,
        0.0,
        Some("orthogonality"),
    );
    if !orth.passed() {
        return Ok(());
    }
    let (s, space) = build_sum(&outer, comps)?;
    let n = s.total_dim();
    let mut worst = [0.0f64; 5];
    let radius_cfg = RadiusConfig {
        n_samples: 4000,
        seed,
    };
    for i in 0..trials {
        let mut rng = search::rng_for(seed, i as u64);
        let t = OperatorMatrix::new(n, search::gaussian_vec(&mut rng, n * n))?;
        let ai = (search::gaussian_vec(&mut rng, 1)[0].abs() * 1e6) as usize % a_set.len();
        let bi = (search::gaussian_vec(&mut rng, 1)[0].abs() * 1e6) as usize % b_set.len();
        let (av, bv) = (&a_set[ai], &b_set[bi]);
        let kappa = (0..av.len())
            .find(|&l| (av[l] * bv[l]).abs() > 0.5)
            .expect("orthogonality gives a block");
        let a = BlockVector {
            blocks: s
                .components()
                .iter()
                .enumerate()
                .map(|(l, c)| random_unit(c, &mut rng).iter().map(|v| v * av[l]).collect())
                .collect(),
        };
        let b = BlockVector {
            blocks: s
                .components()
                .iter()
                .enumerate()
                .map(|(l, c)| {
                    random_dual_unit(c, &mut rng)
                        .iter()
                        .map(|v| v * bv[l])
                        .collect()
                })
                .collect(),
        };
        let tr = sums::transfer_operator(&s, &t, &a, &b, kappa, 1e-9)?;
        let comp = &s.components()[kappa];
        // Φ is a contraction mapping x_κ to a
        let xk = &tr.a_units[kappa];
        let phi_x = tr.phi(xk).flatten();
        let z = random_unit(comp, &mut rng);
        let phi_excess = space.norm(&tr.phi(&z).flatten())? - 1.0;
        // a radius witness of S, carried back through Φ and Ψ
        let r = numerical_radius(comp, &tr.op, &radius_cfg)?;
        let (zeta, zeta_star) = (&r.witness.x, &r.witness.f);
        let psi = tr.psi(zeta_star).flatten();
        let phi = tr.phi(zeta).flatten();
        let psi_excess = space.dual_eval(&psi).value - 1.0;
        let pairing = dot(&psi, &phi);
        let carried = dot(&psi, &t.apply(&phi)).abs();
        let diffs = [
            (tr.lhs - tr.rhs).abs(),
            max_abs_diff(&phi_x, &a.flatten()),
            phi_excess.max(0.0) + psi_excess.max(0.0),
            (pairing - 1.0).abs(),
            (carried - r.value).abs(),
        ];
        for (w, d) in worst.iter_mut().zip(diffs) {
            *w = w.max(d);
        }
        if i == 0 {
            rec.witness(
                "trial_0",
                &json!({"operator": t, "a": a, "b": b, "kappa": kappa, "transfer": tr,
                        "zeta": zeta, "zeta_star": zeta_star}),
            );
        }
    }
    let names = [
        "pairing_identity",
        "phi_maps_x_to_a",
        "phi_psi_contractive",
        "psi_phi_pairing_one",
        "radius_carried_back",
    ];
    for (name, w) in names.iter().zip(worst) {
        rec.check(*name, Relation::Le, w, 0.0, tol, Some("trial_0"));
    }
    rec.value("trials", trials as f64);
    Ok(())
}

fn submatrix(t: &OperatorMatrix, coords: &[usize]) -> OperatorMatrix {
    let k = coords.len();
    let mut s = OperatorMatrix::zeros(k);
    for (i, &ci) in coords.iter().enumerate() {
        for (j, &cj) in coords.iter().enumerate() {
            s.set(i, j, t.get(ci, cj));
        }
    }
    s
}

/// `(Z_i, coordinates of Z_i in Z)` for the chain and the final space `Z`.
type Chain = (Vec<(NormSpace, Vec<usize>)>, NormSpace, bool);

fn chain_params(p: &Params) -> Result<Chain> {
    if let Some(family) = params::opt::<String>(p, "family")? {
        if family != "l1_example_3_2" {
            return Err(Error::InvalidArgument(format!(
                "unknown chain family `{family}`"
            )));
        }
        let depth: usize = params::req(p, "depth")?;
        if depth < 2 {
            return Err(Error::InvalidArgument("depth must be >= 2".into()));
        }
        let x = NormSpace::example_3_2();
        let plane = x.section(&[0, 1])?;
        let mut chain = Vec::new();
        for m in 1..depth {
            let mut comps = vec![x.clone(); m];
            comps.push(plane.clone());
            let (_, zm) = build_sum(&NormSpace::lp(m + 1, 1.0)?, comps)?;
            chain.push((zm, (0..3 * m + 2).collect()));
        }
        let (_, z) = build_sum(&NormSpace::lp(depth, 1.0)?, vec![x; depth])?;
        chain.push((z.clone(), (0..3 * depth).collect()));
        return Ok((chain, z, true));
    }
    let z = params::space(p, "space")?;
    let coords: Vec<Vec<usize>> = params::req(p, "chain")?;
    if coords.is_empty() {
        return Err(Error::InvalidArgument("chain is empty".into()));
    }
    for w in coords.windows(2) {
        if !w[0].iter().all(|c| w[1].contains(c)) || w[0].len() >= w[1].len() {
            return Err(Error::InvalidArgument(
                "chain must be strictly increasing".into(),
            ));
        }
    }
    let last = coords.last().expect("nonempty");
    if last.len() != z.dim() {
        return Err(Error::InvalidArgument(
            "chain must end at the whole space".into(),
        ));
    }
    let chain = coords
        .iter()
        .map(|c| Ok((z.section(c)?, c.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok((chain, z, false))
}

fn chain_limsup(p: &Params, seed: u64, rec: &mut Recorder) -> Result<()> {
    let (chain, z, strict_family) = chain_params(p)?;
    let tol = params::tolerance(p, "tolerance", INDEX_TOL)?;
    let mut est = Estimator::new(params::index_options(p, seed)?);
    let k = chain.len();
    let tail_from: usize = params::or(p, "tail_from", k - 1)?;
    if tail_from >= k {
        return Err(Error::InvalidArgument("tail_from out of range".into()));
    }
    let radius_cfg = RadiusConfig {
        n_samples: params::or(p, "radius_samples_check", 4000)?,
        seed,
    };
    let mut ests = Vec::new();
    for (i, (zi, _)) in chain.iter().enumerate() {
        let e = est.estimate(zi)?;
        rec.value(format!("section_{i}_upper"), e.upper);
        rec.value(format!("section_{i}_lower"), e.lower);
        rec.witness(format!("section_{i}"), &e);
        ests.push(e);
    }
    let ez = ests.last().expect("nonempty chain").clone();
    let t = &ez.witness;
    let vt = numerical_radius(&z, t, &radius_cfg)?;
    let nt = operator_norm(&z, t)?;
    rec.witness("final_radius", &vt);
    for (i, (zi, coords)) in chain.iter().enumerate() {
        let si = submatrix(t, coords);
        let vs = numerical_radius(zi, &si, &radius_cfg)?;
        let tol_i = if exact_eval(zi) && exact_eval(&z) {
            EXACT_TOL
        } else {
            SAMPLED_TOL
        };
        let key = format!("compression_{i}");
        rec.witness(
            &key,
            &json!({"coords": coords, "operator": si, "radius": vs}),
        );
        rec.check(
            format!("compression_{i}_radius"),
            Relation::Le,
            vs.value,
            vt.value,
            tol_i,
            Some(&key),
        );
        if i == k - 1 {
            let ns = operator_norm(zi, &si)?;
            rec.check(
                "compression_final_norm",
                Relation::Eq,
                ns.value,
                nt.value,
                if nt.exact { EXACT_TOL } else { SAMPLED_TOL },
                Some(&key),
            );
        }
    }
    let tail_max = ests[tail_from..]
        .iter()
        .map(|e| e.upper)
        .fold(f64::NEG_INFINITY, f64::max);
    rec.value("tail_max_upper", tail_max);
    rec.check(
        "index_at_least_limsup",
        Relation::Ge,
        ez.upper,
        tail_max,
        tol,
        Some(&format!("section_{}", k - 1)),
    );
    if strict_family {
        let x = NormSpace::example_3_2();
        let beta = certified_lower_bound(&x, seed);
        rec.value("example_bound", beta.value);
        rec.witness("example_certificate", &beta);
        rec.check(
            "final_lower_vs_example_bound",
            Relation::Ge,
            ez.lower,
            beta.value,
            INDEX_TOL,
            Some(&format!("section_{}", k - 1)),
        );
        let mut proper_max = f64::NEG_INFINITY;
        for (i, e) in ests[..k - 1].iter().enumerate() {
            rec.check(
                format!("section_{i}_upper_zero"),
                Relation::Le,
                e.upper,
                0.0,
                1e-6,
                Some(&format!("section_{i}")),
            );
            proper_max = proper_max.max(e.upper);
        }
        rec.value("gap", ez.lower - proper_max);
        rec.check(
            "strict_gap",
            Relation::Gt,
            ez.lower,
            proper_max,
            0.0,
            Some(&format!("section_{}", k - 1)),
        );
    }
    Ok(())
}

/// `T ⊕ 0` on `R^{n+extra}`.
fn pad(t: &OperatorMatrix, extra: usize) -> OperatorMatrix {
    let n = t.size();
    let mut out = OperatorMatrix::zeros(n + extra);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, t.get(i, j));
        }
    }
    out
}

fn lp_power(base: &NormSpace, m: usize, p: f64) -> Result<NormSpace> {
    let scalar = base.dim() == 1 && (base.norm(&[1.0])? - 1.0).abs() == 0.0;
    if scalar {
        return NormSpace::lp(m, p);
    }
    Ok(build_sum(&NormSpace::lp(m, p)?, vec![base.clone(); m])?.1)
}

fn lp_monotone(p: &Params, seed: u64, rec: &mut Recorder) -> Result<()> {
    let q = params::real(
        p.get("p")
            .ok_or_else(|| Error::InvalidArgument("missing p".into()))?,
        "p",
    )?;
    let m_max: usize = params::req(p, "m_max")?;
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be >= 1".into()));
    }
    let base = match p.get("base") {
        Some(_) => params::space(p, "base")?,
        None => NormSpace::lp(1, 1.0)?,
    };
    let tol = params::tolerance(p, "tolerance", INDEX_TOL)?;
    let expected = match p.get("expected") {
        Some(_) => Some(params::reals(p, "expected")?),
        None => None,
    };
    let opts = params::index_options(p, seed)?;
    let mut ests: Vec<IndexEstimate> = Vec::new();
    for m in 1..=m_max {
        let x = lp_power(&base, m, q)?;
        let mut o = opts.clone();
        if let Some(prev) = ests.last() {
            o.starts.push(pad(&prev.witness, base.dim()));
        }
        let e = numerical_index(&x, &o)?;
        rec.value(format!("m{m}_upper"), e.upper);
        rec.value(format!("m{m}_lower"), e.lower);
        rec.witness(format!("m{m}"), &e);
        ests.push(e);
    }
    for m in 1..m_max {
        let (a, b) = (&ests[m - 1], &ests[m]);
        let both = certified(a) && certified(b);
        rec.check(
            format!("non_increasing_m{}_m{}", m, m + 1),
            Relation::Ge,
            a.upper,
            b.upper,
            if both { EXACT_TOL } else { tol },
            Some(&format!("m{}", m + 1)),
        );
    }
    if (q == 1.0 || q.is_infinite()) && base.dim() == 1 {
        for (i, e) in ests.iter().enumerate() {
            let key = format!("m{}", i + 1);
            rec.check(
                format!("certified_one_{key}"),
                Relation::Eq,
                e.lower,
                1.0,
                0.0,
                Some(&key),
            );
            rec.check(
                format!("upper_one_{key}"),
                Relation::Eq,
                e.upper,
                1.0,
                EXACT_TOL,
                Some(&key),
            );
        }
    }
    if let Some(exp) = expected {
        if exp.len() != m_max {
            return Err(Error::InvalidArgument(
                "expected must have m_max entries".into(),
            ));
        }
        for (i, (e, v)) in ests.iter().zip(exp).enumerate() {
            let key = format!("m{}", i + 1);
            rec.check(
                format!("expected_{key}"),
                Relation::Eq,
                e.upper,
                v,
                1e-6,
                Some(&key),
            );
        }
    }
    Ok(())
}

fn absolute_and_symmetric(x: &NormSpace, trials: usize, seed: u64, rec: &mut Recorder) {
    let report = x.validate_absolute(trials, seed);
    rec.witness("absolute_checks", &report.checks);
    rec.check(
        "absolute_norm",
        Relation::Eq,
        f64::from(u8::from(report.passed())),
        1.0,
        0.0,
        Some("absolute_checks"),
    );
}

fn max_pairs(p: &Params, seed: u64, rec: &mut Recorder) -> Result<()> {
    let x = NormSpace::example_3_2();
    let trials: usize = params::or(p, "trials", 256)?;
    absolute_and_symmetric(&x, trials, seed, rec);
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut rng = search::rng_for(seed, 0x7379_6d6d);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let v = search::gaussian_vec(&mut rng, 3);
        let base = x.norm(&v)?;
        for pm in &perms {
            let w: Vec<f64> = pm.iter().map(|&i| v[i]).collect();
            worst = worst.max((x.norm(&w)? - base).abs());
        }
    }
    rec.check("symmetric_norm", Relation::Le, worst, 0.0, 1e-15, None);

    let pairs = example_3_2_pairs();
    let cert = zero_radius_certificate(&x, &pairs)?;
    rec.witness("certificate", &json!({"pairs": pairs, "result": cert}));
    rec.value("certificate_rank", cert.rank as f64);
    rec.value("certificate_sigma_min", cert.sigma_min);
    rec.check(
        "certificate_full_rank",
        Relation::Eq,
        cert.rank as f64,
        9.0,
        0.0,
        Some("certificate"),
    );
    let beta = cert.bound.unwrap_or(0.0);
    rec.value("certificate_bound", beta);
    rec.check(
        "certificate_bound_positive",
        Relation::Gt,
        beta,
        0.0,
        0.0,
        Some("certificate"),
    );

    let n_ops: usize = params::or(p, "soundness_operators", 50)?;
    let cfg = RadiusConfig {
        n_samples: params::or(p, "soundness_samples", 2000)?,
        seed,
    };
    let mut min_ratio = f64::INFINITY;
    let mut min_op = None;
    for i in 0..n_ops {
        let mut rng = search::rng_for(seed, 0x1000 + i as u64);
        let t = OperatorMatrix::new(3, search::gaussian_vec(&mut rng, 9))?;
        let t = t.scaled(1.0 / operator_norm(&x, &t)?.value);
        let v = numerical_radius(&x, &t, &cfg)?.value;
        if v < min_ratio {
            min_ratio = v;
            min_op = Some(t);
        }
    }
    rec.witness("soundness_worst", &min_op);
    rec.check(
        "certificate_sound_on_random_operators",
        Relation::Ge,
        min_ratio,
        beta,
        EXACT_TOL,
        Some("soundness_worst"),
    );

    for (i, imp) in example_3_2_implications().iter().enumerate() {
        let key = format!("implication_{}", i + 1);
        rec.witness(&key, imp);
        rec.check(&key, Relation::Le, imp.residual, 0.0, 1e-12, Some(&key));
    }

    let plane = x.section(&[0, 1])?;
    let e = numerical_index(&plane, &params::index_options(p, seed)?)?;
    rec.witness("plane_section", &e);
    rec.check(
        "plane_section_index_zero",
        Relation::Le,
        e.upper,
        0.0,
        1e-6,
        Some("plane_section"),
    );
    Ok(())
}

fn polyhedral5(p: &Params, seed: u64, rec: &mut Recorder) -> Result<()> {
    let x = NormSpace::example_3_3();
    let p4 = NormSpace::example_3_3_p4();
    absolute_and_symmetric(&x, params::or(p, "trials", 256)?, seed, rec);
    let ball = x.ball().expect("polytopal");
    let c = ball.is_cl_space()?;
    rec.witness("cl_certificate", &c);
    rec.check(
        "cl_space_certified",
        Relation::Eq,
        f64::from(u8::from(c.is_certified())),
        1.0,
        0.0,
        Some("cl_certificate"),
    );
    let c4 = p4.ball().expect("polytopal").is_cl_space()?;
    rec.witness("p4_cl_certificate", &c4);
    rec.check(
        "p4_not_cl_space",
        Relation::Eq,
        f64::from(u8::from(c4.is_certified())),
        0.0,
        0.0,
        Some("p4_cl_certificate"),
    );
    let opts = params::index_options(p, seed)?;
    let e = numerical_index(&x, &opts)?;
    rec.witness("index", &e);
    rec.check(
        "index_lower_one",
        Relation::Eq,
        e.lower,
        1.0,
        0.0,
        Some("index"),
    );
    rec.check(
        "index_upper_one",
        Relation::Eq,
        e.upper,
        1.0,
        EXACT_TOL,
        Some("index"),
    );
    let e4 = numerical_index(&p4, &opts)?;
    rec.value("p4_upper", e4.upper);
    rec.value("p4_lower", e4.lower);
    rec.witness("p4_index", &e4);
    rec.check(
        "p4_index_below_one",
        Relation::Lt,
        e4.upper,
        1.0,
        params::tolerance(p, "margin", 1e-3)?,
        Some("p4_index"),
    );
    Ok(())
}

fn lorentz_sweep(p: &Params, seed: u64, rec: &mut Recorder) -> Result<()> {
    let ps = params::reals(p, "p_list")?;
    if ps.is_empty() || ps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "p_list must be nonempty and increasing".into(),
        ));
    }
    let thresholds: Vec<Option<f64>> = match p.get("thresholds") {
        Some(serde_json::Value::Array(a)) => {
            if a.len() != ps.len() {
                return Err(Error::InvalidArgument(
                    "thresholds must match p_list".into(),
                ));
            }
            a.iter()
                .map(|v| {
                    if v.is_null() {
                        Ok(None)
                    } else {
                        params::real(v, "thresholds").map(Some)
                    }
                })
                .collect::<Result<_>>()?
        }
        Some(_) => return Err(Error::InvalidArgument("thresholds must be an array".into())),
        None => vec![None; ps.len()],
    };
    let tol = params::tolerance(p, "tolerance", INDEX_TOL)?;
    let margin = params::tolerance(p, "margin", 0.0)?;
    let mut est = Estimator::new(params::index_options(p, seed)?);
    let mut plane_uppers = Vec::new();
    let mut last = None;
    for (i, &q) in ps.iter().enumerate() {
        let x = NormSpace::lorentz(q)?;
        let plane = x.section(&[0, 1])?;
        let ex = est.estimate(&x)?;
        let ep = est.estimate(&plane)?;
        let tag = format!("p{}", params_label(q));
        rec.value(format!("{tag}_space_upper"), ex.upper);
        rec.value(format!("{tag}_space_lower"), ex.lower);
        rec.value(format!("{tag}_plane_upper"), ep.upper);
        rec.witness(format!("{tag}_space"), &ex);
        rec.witness(format!("{tag}_plane"), &ep);
        if let Some(th) = thresholds[i] {
            rec.check(
                format!("{tag}_plane_below_threshold"),
                Relation::Le,
                ep.upper,
                th,
                0.0,
                Some(&format!("{tag}_plane")),
            );
        }
        plane_uppers.push((tag, ep.upper));
        last = Some((tag_of(q), ex, ep));
    }
    for w in plane_uppers.windows(2) {
        rec.check(
            format!("plane_trend_{}_{}", w[0].0, w[1].0),
            Relation::Le,
            w[1].1,
            w[0].1,
            tol,
            Some(&format!("{}_plane", w[1].0)),
        );
    }
    let (tag, ex, ep) = last.expect("nonempty p_list");
    rec.check(
        format!("{tag}_space_above_plane"),
        Relation::Gt,
        ex.upper,
        ep.upper,
        margin,
        Some(&format!("{tag}_space")),
    );
    rec.check(
        format!("{tag}_space_lower_positive"),
        Relation::Gt,
        ex.lower,
        0.0,
        0.0,
        Some(&format!("{tag}_space")),
    );
    let q_norm = params::real_or(p, "norm_check_p", 64.0)?;
    let xq = NormSpace::lorentz(q_norm)?;
    let v = xq.norm(&[1.0, 1.0, 1.0])?;
    let closed = 2f64.sqrt() * 1.5f64.powf(1.0 / q_norm);
    rec.value("norm_ones", v);
    rec.check(
        "norm_ones_closed_form",
        Relation::Eq,
        v,
        closed,
        1e-12,
        None,
    );
    rec.check(
        "norm_ones_near_limit",
        Relation::Eq,
        v,
        2f64.sqrt(),
        params::tolerance(p, "norm_limit_tolerance", 1e-2)?,
        None,
    );
    Ok(())
}

fn tag_of(q: f64) -> String {
    format!("p{}", params_label(q))
}

/// `8` for 8.0, `2_5` for 2.5.
fn params_label(q: f64) -> String {
    let s = format!("{q}");
    s.replace('.', "_")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{run_scenario, Scenario};

    fn scenario(kind: ScenarioKind, parameters: serde_json::Value) -> Scenario {
        Scenario {
            id: "t".into(),
            kind,
            parameters: parameters.as_object().unwrap().clone(),
        }
    }

    #[test]
    fn polyhedral_example_passes() {
        let r = run_scenario(
            &scenario(
                ScenarioKind::Polyhedral5,
                json!({"restarts": 2, "budget": 300}),
            ),
            0,
        )
        .unwrap();
        assert!(r.passed(), "{:#?}", r.assertions);
    }

    #[test]
    fn non_index_one_outer_fails_equality() {
        let r = run_scenario(
            &scenario(
                ScenarioKind::IndexOneOuterEquality,
                json!({
                    "outer": {"dim": 2, "kind": "euclidean"},
                    "components": [{"dim": 1, "kind": "lp", "parameters": {"p": 1}},
                                   {"dim": 1, "kind": "lp", "parameters": {"p": 1}}],
                    "restarts": 4, "budget": 600
                }),
            ),
            0,
        )
        .unwrap();
        assert!(!r.passed());
        let failing: Vec<&str> = r
            .assertions
            .iter()
            .filter(|a| !a.pass)
            .map(|a| a.id.as_str())
            .collect();
        assert!(failing.contains(&"index_equals_min"), "{failing:?}");
    }

    #[test]
    fn missing_parameters_are_errors() {
        assert!(run_scenario(&scenario(ScenarioKind::LpMonotone, json!({})), 0).is_err());
        assert!(run_scenario(
            &scenario(ScenarioKind::ChainLimsup, json!({"family": "nope"})),
            0
        )
        .is_err());
    }

    #[test]
    fn padding_is_block_diagonal() {
        let t = OperatorMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let p = pad(&t, 1);
        assert_eq!(
            p.rows(),
            vec![vec![1.0, 2.0, 0.0], vec![3.0, 4.0, 0.0], vec![0.0; 3]]
        );
        assert_eq!(submatrix(&p, &[0, 1]), t);
    }
}
