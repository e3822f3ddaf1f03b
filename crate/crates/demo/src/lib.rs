//! Browser bindings: unit balls of planar norms, the numerical radius of a
//! 2×2 operator, and a small index sweep over the Lorentz family.
//!
//! Every export takes and returns plain strings or numbers; errors surface as
//! JS exceptions carrying the message.

use std::fmt::Write as _;

use numindex::numrange::{numerical_radius, operator_norm, RadiusConfig};
use numindex::verify::{sweep, SweepFamily};
use numindex::{IndexOptions, NormSpace, OperatorMatrix};
use serde_json::json;
use wasm_bindgen::prelude::*;

const SIZE: f64 = 320.0;
const BOUNDARY_POINTS: usize = 360;

fn space(descriptor: &str) -> Result<NormSpace, String> {
    NormSpace::from_json(descriptor).map_err(|e| e.to_string())
}

fn planar(descriptor: &str) -> Result<NormSpace, String> {
    let x = space(descriptor)?;
    if x.dim() != 2 {
        return Err(format!("expected a planar norm, got dimension {}", x.dim()));
    }
    Ok(x)
}

/// Boundary of `{‖u‖ ≤ 1}` traced along rays.
fn boundary(norm: impl Fn(&[f64]) -> f64) -> Vec<(f64, f64)> {
    (0..BOUNDARY_POINTS)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / BOUNDARY_POINTS as f64;
            let u = [t.cos(), t.sin()];
            let r = 1.0 / norm(&u);
            (r * u[0], r * u[1])
        })
        .collect()
}

/// SVG of the unit ball (filled) and the dual unit ball (outline) of a
/// planar norm.
pub fn unit_balls_svg(descriptor: &str) -> Result<String, String> {
    let x = planar(descriptor)?;
    let primal = boundary(|u| x.norm(u).unwrap_or(f64::NAN));
    let dual = boundary(|f| x.dual_norm(f).unwrap_or(f64::NAN));
    let extent = primal
        .iter()
        .chain(&dual)
        .map(|&(a, b)| a.abs().max(b.abs()))
        .fold(1.0f64, f64::max)
        * 1.1;
    let s = SIZE / (2.0 * extent);
    let pts = |v: &[(f64, f64)]| {
        v.iter()
            .map(|&(a, b)| format!("{:.2},{:.2}", SIZE / 2.0 + a * s, SIZE / 2.0 - b * s))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    let _ = write!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"##
    );
    let _ = write!(
        out,
        r##"<path d="M0 {h} H{SIZE} M{h} 0 V{SIZE}" stroke="#bbb"/>"##,
        h = SIZE / 2.0
    );
    let _ = write!(
        out,
        r##"<polygon points="{}" fill="#1f77b4" fill-opacity="0.25" stroke="#1f77b4"/>"##,
        pts(&primal)
    );
    let _ = write!(
        out,
        r##"<polygon points="{}" fill="none" stroke="#d62728" stroke-dasharray="4 3"/>"##,
        pts(&dual)
    );
    out.push_str("</svg>");
    Ok(out)
}

/// `{"radius", "norm", "ratio", "exact", "x", "f"}` for the operator with
/// rows `(a, b)`, `(c, d)`.
pub fn radius_2x2_json(descriptor: &str, a: f64, b: f64, c: f64, d: f64) -> Result<String, String> {
    let x = planar(descriptor)?;
    let t = OperatorMatrix::from_rows(&[vec![a, b], vec![c, d]]).map_err(|e| e.to_string())?;
    let r = numerical_radius(
        &x,
        &t,
        &RadiusConfig {
            n_samples: 2000,
            seed: 0,
        },
    )
    .map_err(|e| e.to_string())?;
    let n = operator_norm(&x, &t).map_err(|e| e.to_string())?;
    let ratio = if n.value > 0.0 {
        r.value / n.value
    } else {
        0.0
    };
    Ok(json!({
        "radius": r.value,
        "norm": n.value,
        "ratio": ratio,
        "exact": r.method.is_exact() && n.exact,
        "x": r.witness.x,
        "f": r.witness.f,
    })
    .to_string())
}

/// Index estimates of `X_p` and its planar section for each `p` in
/// `ps` (comma separated), as a JSON array of rows.
pub fn lorentz_sweep_json(ps: &str, restarts: usize) -> Result<String, String> {
    let ps = ps
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad p `{s}`: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let opts = IndexOptions {
        restarts: restarts.max(1),
        budget: 600,
        final_samples: 1500,
        ..IndexOptions::default()
    };
    let rows = sweep(SweepFamily::Lorentz, &ps, &[2, 3], &opts).map_err(|e| e.to_string())?;
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = unitBallsSvg)]
pub fn unit_balls_svg_js(descriptor: &str) -> Result<String, JsError> {
    unit_balls_svg(descriptor).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = radius2x2)]
pub fn radius_2x2_js(descriptor: &str, a: f64, b: f64, c: f64, d: f64) -> Result<String, JsError> {
    radius_2x2_json(descriptor, a, b, c, d).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = lorentzSweep)]
pub fn lorentz_sweep_js(ps: &str, restarts: usize) -> Result<String, JsError> {
    lorentz_sweep_json(ps, restarts).map_err(|e| JsError::new(&e))
}
