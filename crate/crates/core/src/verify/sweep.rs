//! Index estimates over a grid of `p` values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numrange::{numerical_index, IndexOptions};
use crate::operator::OperatorMatrix;
use crate::spaces::NormSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepFamily {
    /// `ℓ_p^m` for each requested dimension `m`.
    Lp,
    /// `X_p` on `R³` (dimension 3) and its planar section (dimension 2).
    Lorentz,
}

impl SweepFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepFamily::Lp => "lp",
            SweepFamily::Lorentz => "lorentz",
        }
    }

    fn space(&self, p: f64, dim: usize) -> Result<NormSpace> {
        match self {
            SweepFamily::Lp => NormSpace::lp(dim, p),
            SweepFamily::Lorentz => match dim {
                3 => NormSpace::lorentz(p),
                2 => NormSpace::lorentz(p)?.section(&[0, 1]),
                _ => Err(Error::InvalidArgument(format!(
                    "lorentz family has dimensions 2 and 3, got {dim}"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: SweepFamily,
    pub p: f64,
    pub dim: usize,
    pub upper: f64,
    pub lower: f64,
    pub certificate: String,
}

/// One row per `(p, dim)`, ordered by `p` then `dim`. Each dimension after
/// the smallest starts from the previous witness padded with zeros.
pub fn sweep(
    family: SweepFamily,
    ps: &[f64],
    dims: &[usize],
    opts: &IndexOptions,
) -> Result<Vec<SweepRow>> {
    if ps.is_empty() || dims.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep needs at least one p and one dimension".into(),
        ));
    }
    let mut dims = dims.to_vec();
    dims.sort_unstable();
    dims.dedup();
    let mut rows = Vec::with_capacity(ps.len() * dims.len());
    for &p in ps {
        let mut prev: Option<OperatorMatrix> = None;
        for &dim in &dims {
            let x = family.space(p, dim)?;
            let mut o = opts.clone();
            if let Some(w) = prev.take() {
                if w.size() < dim {
                    o.starts.push(pad(&w, dim));
                }
            }
            let e = numerical_index(&x, &o)?;
            rows.push(SweepRow {
                family,
                p,
                dim,
                upper: e.upper,
                lower: e.lower,
                certificate: e.certificate.as_str().to_string(),
            });
            prev = Some(e.witness);
        }
    }
    Ok(rows)
}

fn pad(t: &OperatorMatrix, dim: usize) -> OperatorMatrix {
    let mut out = OperatorMatrix::zeros(dim);
    for i in 0..t.size() {
        for j in 0..t.size() {
            out.set(i, j, t.get(i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_count_is_grid_size() {
        let opts = IndexOptions {
            restarts: 1,
            budget: 100,
            ..IndexOptions::default()
        };
        let rows = sweep(SweepFamily::Lp, &[1.0, f64::INFINITY], &[2, 1], &opts).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].dim, 1);
        assert!(rows.iter().all(|r| r.upper == 1.0));
        assert!(sweep(SweepFamily::Lp, &[], &[2], &opts).is_err());
        assert!(sweep(SweepFamily::Lorentz, &[4.0], &[4], &opts).is_err());
    }
}
