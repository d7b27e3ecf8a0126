use std::fmt::Write;

use gdlayout_core::criteria::ideal_length::ideal_lengths;
use gdlayout_core::{Graph, Layout};

#[derive(Debug, Clone, Copy, Default)]
pub struct SvgOptions {
    /// Color edges from red (too short) to blue (too long) relative to
    /// their ideal length.
    pub edge_color_by_length: bool,
}

/// Red at `t = -1`, blue at `t = 1`, linear in between.
fn discrepancy_color(t: f64) -> String {
    let s = (t.clamp(-1.0, 1.0) + 1.0) / 2.0;
    let r = (255.0 * (1.0 - s)).round() as u8;
    let b = (255.0 * s).round() as u8;
    format!("#{r:02x}00{b:02x}")
}

/// Draws `layout` with one `<line>` per edge and one `<circle>` per node.
pub fn export_svg(g: &Graph, layout: &Layout, options: SvgOptions) -> Vec<u8> {
    let p = layout.positions();
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in p {
        lo_x = lo_x.min(v.x);
        lo_y = lo_y.min(v.y);
        hi_x = hi_x.max(v.x);
        hi_y = hi_y.max(v.y);
    }
    if p.is_empty() {
        (lo_x, lo_y, hi_x, hi_y) = (0.0, 0.0, 0.0, 0.0);
    }
    let size = (hi_x - lo_x).max(hi_y - lo_y);
    let size = if size > 0.0 { size } else { 1.0 };
    let pad_x = 0.05 * if hi_x > lo_x { hi_x - lo_x } else { size };
    let pad_y = 0.05 * if hi_y > lo_y { hi_y - lo_y } else { size };
    let radius = 0.01 * size;
    let stroke = 0.004 * size;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        lo_x - pad_x,
        lo_y - pad_y,
        hi_x - lo_x + 2.0 * pad_x,
        hi_y - lo_y + 2.0 * pad_y
    );
    let targets = options.edge_color_by_length.then(|| ideal_lengths(g, layout));
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        let color = match &targets {
            Some(l) if l[e] > 0.0 => discrepancy_color((layout.distance(i, j) - l[e]) / l[e]),
            _ => "#000000".to_string(),
        };
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="{stroke}"/>"#,
            p[i].x, p[i].y, p[j].x, p[j].y
        );
    }
    for v in p {
        let _ = writeln!(out, r##"<circle cx="{}" cy="{}" r="{radius}" fill="#000000"/>"##, v.x, v.y);
    }
    out.push_str("</svg>\n");
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use gdlayout_core::Vec2;

    #[test]
    fn color_scale() {
        assert_eq!(discrepancy_color(-1.0), "#ff0000");
        assert_eq!(discrepancy_color(-7.0), "#ff0000");
        assert_eq!(discrepancy_color(1.0), "#0000ff");
        assert_eq!(discrepancy_color(0.0), "#800080");
    }

    #[test]
    fn ideal_edge_is_mid_scale() {
        let g = Graph::new(2, [(0, 1)]).unwrap().with_ideal_lengths(vec![2.0]).unwrap();
        let l = Layout::new(vec![Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0)]).unwrap();
        let svg = String::from_utf8(export_svg(&g, &l, SvgOptions { edge_color_by_length: true })).unwrap();
        assert!(svg.contains(r##"stroke="#800080""##), "{svg}");
        assert_eq!(svg.matches("<line").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains(r#"viewBox="-0.1 -0.1 2.2 0.2""#), "{svg}");
    }
}
