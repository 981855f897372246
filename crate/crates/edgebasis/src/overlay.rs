//! Static SVG overlay of a reference set, a probe mapped into the reference
//! frame, and the edges paired by a match.

use std::fmt::Write as _;

use edgebasis_core::{Edge, EdgeSet, MatchResult, Transform};

/// Drawn length of each edge segment, pixels.
pub const SEGMENT_LENGTH: f64 = 6.0;

const STYLE: &str = "\
.frame{fill:none;stroke:#888;stroke-width:0.5}\
.ref{stroke:#1f77b4;stroke-width:1}\
.probe{stroke:#d62728;stroke-width:1}\
.matched{stroke:#2ca02c;stroke-width:1.5}\
.basis{stroke:#000;stroke-width:2.5}";

fn segment(out: &mut String, class: &str, x: f64, y: f64, theta: f64) {
    let (dx, dy) = (0.5 * SEGMENT_LENGTH * theta.cos(), 0.5 * SEGMENT_LENGTH * theta.sin());
    writeln!(
        out,
        r#"<line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
        x - dx,
        y - dy,
        x + dx,
        y + dy
    )
    .expect("write to String");
}

fn mapped(t: &Transform, e: &Edge) -> (f64, f64) {
    t.apply(e.x, e.y)
}

/// Renders the overlay in the frame of `a`. Without a transform the probe is
/// drawn unmapped.
pub fn render_svg(a: &EdgeSet, n: &EdgeSet, result: Option<&MatchResult>) -> String {
    let (w, h) = (a.width(), a.height());
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="-0.5 -0.5 {w} {h}">"#
    )
    .expect("write to String");
    writeln!(out, "<style>{STYLE}</style>").expect("write to String");
    writeln!(out, r#"<rect class="frame" x="-0.5" y="-0.5" width="{w}" height="{h}"/>"#).expect("write to String");

    let t = result.and_then(|r| r.transform).unwrap_or_default();
    out.push_str("<g id=\"reference\">\n");
    for e in a.edges() {
        segment(&mut out, "ref", e.x, e.y, e.theta);
    }
    out.push_str("</g>\n<g id=\"probe\">\n");
    for e in n.edges() {
        let (x, y) = mapped(&t, e);
        segment(&mut out, "probe", x, y, e.theta);
    }
    out.push_str("</g>\n");
    if let Some(r) = result {
        out.push_str("<g id=\"matched\">\n");
        for &(i, k) in &r.matched_pairs {
            let (ea, en) = (a.edges().get(i), n.edges().get(k));
            if let (Some(ea), Some(en)) = (ea, en) {
                segment(&mut out, "matched", ea.x, ea.y, ea.theta);
                let (x, y) = mapped(&t, en);
                segment(&mut out, "matched", x, y, en.theta);
            }
        }
        out.push_str("</g>\n");
        if let Some(b) = r.basis {
            out.push_str("<g id=\"basis\">\n");
            for i in [b.a.0, b.a.1] {
                if let Some(e) = a.edges().get(i) {
                    segment(&mut out, "basis", e.x, e.y, e.theta);
                }
            }
            for k in [b.n.0, b.n.1] {
                if let Some(e) = n.edges().get(k) {
                    let (x, y) = mapped(&t, e);
                    segment(&mut out, "basis", x, y, e.theta);
                }
            }
            out.push_str("</g>\n");
        }
    }
    out.push_str("</svg>\n");
    out
}
