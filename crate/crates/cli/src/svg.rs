//! Line plots of sweep rows as plain SVG text.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use numindex::verify::SweepRow;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn n2(v: f64) -> String {
    format!("{v:.2}")
}

/// Upper estimate against `p`, one polyline per dimension. Output depends
/// only on the rows, so identical sweeps give identical bytes.
pub fn plot(title: &str, rows: &[SweepRow]) -> String {
    let mut series: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        series.entry(r.dim).or_default().push((r.p, r.upper));
    }
    let (pmin, pmax) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| {
            (a.min(r.p), b.max(r.p))
        });
    let span = if pmax > pmin { pmax - pmin } else { 1.0 };
    let ymax = rows
        .iter()
        .map(|r| r.upper)
        .fold(0.0f64, f64::max)
        .max(1e-3)
        * 1.05;
    let sx = |p: f64| MARGIN + (p - pmin) / span * (WIDTH - 2.0 * MARGIN);
    let sy = |v: f64| HEIGHT - MARGIN - v / ymax * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        n2(WIDTH / 2.0),
        escape(title)
    );
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{} {} H{} M{} {} V{}" stroke="black" fill="none"/>"#,
        n2(x0),
        n2(y0),
        n2(x1),
        n2(x0),
        n2(y0),
        n2(y1)
    );
    for i in 0..=4 {
        let v = ymax * f64::from(i) / 4.0;
        let y = sy(v);
        let _ = writeln!(
            s,
            r##"<line x1="{a}" y1="{y}" x2="{b}" y2="{y}" stroke="#ddd"/><text x="{t}" y="{ty}" text-anchor="end">{v:.3}</text>"##,
            a = n2(x0),
            b = n2(x1),
            y = n2(y),
            t = n2(x0 - 6.0),
            ty = n2(y + 4.0)
        );
    }
    let mut ps: Vec<f64> = rows.iter().map(|r| r.p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    for p in &ps {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            n2(sx(*p)),
            n2(y0 + 18.0),
            trim(*p)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">p</text>"#,
        n2(WIDTH / 2.0),
        n2(HEIGHT - 12.0)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">index upper estimate</text>"#,
        n2(HEIGHT / 2.0),
        n2(HEIGHT / 2.0)
    );
    for (k, (dim, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(p, v)| format!("{},{}", n2(sx(p)), n2(sy(v))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for &(p, v) in pts {
            let _ = writeln!(
                s,
                r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#,
                n2(sx(p)),
                n2(sy(v))
            );
        }
        let ly = MARGIN + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">dim {dim}</text>"#,
            n2(x1 - 60.0),
            n2(ly)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn trim(p: f64) -> String {
    let s = format!("{p:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
