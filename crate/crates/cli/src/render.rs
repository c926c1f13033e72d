use std::fmt::Write;

use dihedral::{Chain, Point3};

const PANEL: f64 = 400.0;
const MARGIN: f64 = 20.0;

/// Projection of a point onto a view plane.
type Project = fn(Point3) -> (f64, f64);

fn top(p: Point3) -> (f64, f64) {
    (p.x, p.z)
}

fn side(p: Point3) -> (f64, f64) {
    (p.x, p.y)
}

struct View {
    title: &'static str,
    project: Project,
    offset: f64,
}

fn panel(out: &mut String, chain: &Chain, view: &View) {
    let pts: Vec<(f64, f64)> = chain.vertices().iter().map(|&p| (view.project)(p)).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let scale = (PANEL - 2.0 * MARGIN) / span;
    let map = |(x, y): (f64, f64)| {
        (
            view.offset + MARGIN + (x - x0) * scale,
            PANEL - MARGIN - (y - y0) * scale,
        )
    };

    writeln!(out, r#"  <g class="view">"#).unwrap();
    writeln!(
        out,
        r##"    <rect x="{:.3}" y="0" width="{PANEL}" height="{PANEL}" fill="none" stroke="#ccc"/>"##,
        view.offset
    )
    .unwrap();
    writeln!(
        out,
        r#"    <text x="{:.3}" y="14" font-size="12" font-family="sans-serif">{}</text>"#,
        view.offset + MARGIN,
        view.title
    )
    .unwrap();
    let coords: Vec<String> = pts
        .iter()
        .map(|&p| {
            let (x, y) = map(p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    writeln!(
        out,
        r##"    <polyline class="chain" fill="none" stroke="#1f4e79" stroke-width="1.5" points="{}"/>"##,
        coords.join(" ")
    )
    .unwrap();
    for &(i, j) in chain.allowed_overlaps() {
        for s in [i, j] {
            let (ax, ay) = map(pts[s]);
            let (bx, by) = map(pts[s + 1]);
            writeln!(
                out,
                r##"    <line class="overlap" data-pair="{i},{j}" x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}" stroke="#c0392b" stroke-width="3" stroke-opacity="0.5" stroke-dasharray="4 2"/>"##
            )
            .unwrap();
        }
    }
    writeln!(out, "  </g>").unwrap();
}

/// Two orthographic views side by side: top (x–z) and side (x–y).
/// Segments named in allowed overlaps are drawn again, dashed.
pub fn render_svg(chain: &Chain) -> String {
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{PANEL}" viewBox="0 0 {w} {PANEL}">"#,
        w = 2.0 * PANEL
    )
    .unwrap();
    for view in [
        View {
            title: "top (x-z)",
            project: top,
            offset: 0.0,
        },
        View {
            title: "side (x-y)",
            project: side,
            offset: PANEL,
        },
    ] {
        panel(&mut out, chain, &view);
    }
    out.push_str("</svg>\n");
    out
}
