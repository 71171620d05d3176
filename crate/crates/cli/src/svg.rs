//! Seed-space drawings: each polygon becomes one SVG path inside a square
//! 1024-unit viewport mapped linearly from [0, 2^W)^2, y pointing up.

use std::fmt::Write as _;

use descramble_core::{ConvexPolygon, ScrambleParams};

const VIEW: f64 = 1024.0;

pub fn render_polygons<'a>(
    polygons: impl IntoIterator<Item = &'a ConvexPolygon>,
    params: &ScrambleParams,
    title: &str,
) -> String {
    let span = params.half_width() as f64;
    let scale = VIEW / span;
    let mut out = String::new();
    writeln!(
        &mut out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{VIEW}" height="{VIEW}" viewBox="0 0 {VIEW} {VIEW}">"#
    )
    .unwrap();
    writeln!(&mut out, "  <title>{}</title>", escape(title)).unwrap();
    writeln!(
        &mut out,
        r##"  <rect x="0" y="0" width="{VIEW}" height="{VIEW}" fill="white" stroke="#444" stroke-width="1"/>"##
    )
    .unwrap();
    for poly in polygons {
        if poly.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (i, vertex) in poly.vertices().iter().enumerate() {
            let (x, y) = vertex.to_f64();
            let sx = x * scale;
            // Flip so the origin sits bottom-left like the plots the
            // geometry reasoning is done in.
            let sy = VIEW - y * scale;
            let op = if i == 0 { 'M' } else { 'L' };
            write!(&mut d, "{op}{sx:.3},{sy:.3} ").unwrap();
        }
        d.push('Z');
        writeln!(
            &mut out,
            r##"  <path d="{d}" fill="#1f6feb" fill-opacity="0.35" stroke="#0a3069" stroke-width="0.6"/>"##
        )
        .unwrap();
    }
    writeln!(&mut out, "</svg>").unwrap();
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_path_per_polygon_and_wellformed_header() {
        let params = ScrambleParams::toy(12);
        let polys = vec![
            ConvexPolygon::from_closed_ints(&[(0, 0), (100, 0), (100, 80), (0, 80)]),
            ConvexPolygon::from_closed_ints(&[(200, 200), (300, 220), (250, 400)]),
            ConvexPolygon::empty(),
        ];
        let svg = render_polygons(&polys, &params, "two boxes & a blank");
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("viewBox=\"0 0 1024 1024\""));
        assert!(svg.contains("two boxes &amp; a blank"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
