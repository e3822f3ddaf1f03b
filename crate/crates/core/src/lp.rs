//! Thin wrappers over `minilp` for the few linear programs the polytope code
//! needs: convex-hull membership and the gauge (Minkowski functional) of a
//! vertex hull.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};

/// Result of a hull-membership query.
#[derive(Debug, Clone)]
pub struct HullFit {
    /// Convex weights, one per input point.
    pub weights: Vec<f64>,
    /// l1 distance between the target and the best convex combination.
    pub residual: f64,
}

/// Finds convex weights reproducing `target` from `points`, minimizing the
/// l1 residual. The target is inside the hull iff the residual is ~0.
pub fn convex_fit(target: &[f64], points: &[&[f64]]) -> Result<HullFit> {
    let dim = target.len();
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let mut pb = Problem::new(OptimizationDirection::Minimize);
    let lambdas: Vec<_> = points
        .iter()
        .map(|_| pb.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let slack: Vec<_> = (0..dim)
        .map(|_| {
            (
                pb.add_var(1.0, (0.0, f64::INFINITY)),
                pb.add_var(1.0, (0.0, f64::INFINITY)),
            )
        })
        .collect();
    let sum: Vec<_> = lambdas.iter().map(|&l| (l, 1.0)).collect();
    pb.add_constraint(&sum, ComparisonOp::Eq, 1.0);
    for i in 0..dim {
        let mut row: Vec<_> = lambdas
            .iter()
            .zip(points)
            .filter(|(_, p)| p[i] != 0.0)
            .map(|(&l, p)| (l, p[i]))
            .collect();
        row.push((slack[i].0, 1.0));
        row.push((slack[i].1, -1.0));
        pb.add_constraint(&row, ComparisonOp::Eq, target[i]);
    }
    let sol = pb
        .solve()
        .map_err(|e| Error::LinearProgram(e.to_string()))?;
    Ok(HullFit {
        weights: lambdas.iter().map(|&l| sol[l]).collect(),
        residual: sol.objective(),
    })
}

/// `inf { t > 0 : x ∈ t·conv(vertices) }` for a vertex set whose hull
/// contains the origin in its interior.
pub fn gauge(x: &[f64], vertices: &[Vec<f64>]) -> Result<f64> {
    let dim = x.len();
    let mut pb = Problem::new(OptimizationDirection::Minimize);
    let mus: Vec<_> = vertices
        .iter()
        .map(|_| pb.add_var(1.0, (0.0, f64::INFINITY)))
        .collect();
    for i in 0..dim {
        let row: Vec<_> = mus
            .iter()
            .zip(vertices)
            .filter(|(_, v)| v[i] != 0.0)
            .map(|(&m, v)| (m, v[i]))
            .collect();
        pb.add_constraint(&row, ComparisonOp::Eq, x[i]);
    }
    let sol = pb
        .solve()
        .map_err(|e| Error::LinearProgram(e.to_string()))?;
    Ok(sol.objective())
}
