//! Deterministic SVG rendering of a ray catalog and sector layout: bold
//! labeled separating rays, dashed critical rays, and translucent annular
//! wedges for the overlapping sectors.

use crate::geometry::{RayCatalog, SectorLayout};

const VIEW: f64 = 600.0;
const CENTER: f64 = 300.0;
const UNIT_RADIUS: f64 = 170.0;
const SECTOR_INNER: f64 = 34.0;
const SECTOR_OUTER: f64 = 220.0;
const SEPARATING_LEN: f64 = 240.0;
const CRITICAL_LEN: f64 = 205.0;
const LABEL_RADIUS: f64 = 262.0;
const SECTOR_LABEL_RADIUS: f64 = 120.0;

const SECTOR_FILLS: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];

fn fmt(v: f64) -> String {
    // Fixed 3-decimal formatting keeps the output byte-deterministic.
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn point(angle: f64, radius: f64) -> (f64, f64) {
    // SVG y grows downward; flip the sine.
    (CENTER + radius * angle.cos(), CENTER - radius * angle.sin())
}

fn line(angle: f64, radius: f64, class: &str) -> String {
    let (x, y) = point(angle, radius);
    format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" class=\"{class}\"/>\n",
        fmt(CENTER),
        fmt(CENTER),
        fmt(x),
        fmt(y)
    )
}

/// Annular wedge between two radii over `[start, end]` (radians, end > start).
fn wedge(start: f64, end: f64, fill: &str) -> String {
    let large = if end - start > std::f64::consts::PI {
        1
    } else {
        0
    };
    let (x0, y0) = point(start, SECTOR_INNER);
    let (x1, y1) = point(start, SECTOR_OUTER);
    let (x2, y2) = point(end, SECTOR_OUTER);
    let (x3, y3) = point(end, SECTOR_INNER);
    format!(
        "  <path d=\"M {} {} L {} {} A {} {} 0 {large} 0 {} {} L {} {} A {} {} 0 {large} 1 {} {}\
         Z\" fill=\"{fill}\" fill-opacity=\"0.16\" stroke=\"{fill}\" stroke-opacity=\"0.45\" stroke-width=\"1\"/>\n",
        fmt(x0),
        fmt(y0),
        fmt(x1),
        fmt(y1),
        fmt(SECTOR_OUTER),
        fmt(SECTOR_OUTER),
        fmt(x2),
        fmt(y2),
        fmt(x3),
        fmt(y3),
        fmt(SECTOR_INNER),
        fmt(SECTOR_INNER),
        fmt(x0),
        fmt(y0),
    )
}

fn text(angle: f64, radius: f64, class: &str, content: &str) -> String {
    let (x, y) = point(angle, radius);
    format!(
        "  <text x=\"{}\" y=\"{}\" class=\"{class}\" text-anchor=\"middle\" dominant-baseline=\"middle\">{content}</text>\n",
        fmt(x),
        fmt(y)
    )
}

fn pair_label(pairs: &[(usize, usize)]) -> String {
    pairs
        .iter()
        .map(|&(p, q)| format!("({},{})", p + 1, q + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders the diagram. Output is byte-identical for identical inputs:
/// fixed element order, fixed `viewBox`, fixed numeral formatting.
pub fn emit_svg(catalog: &RayCatalog, layout: &SectorLayout) -> String {
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\">\n",
        fmt(VIEW),
        fmt(VIEW),
        fmt(VIEW),
        fmt(VIEW)
    ));
    svg.push_str(
        "  <style>\n    .separating { stroke: #111111; stroke-width: 2.5; }\n    .critical { stroke: #888888; stroke-width: 1; stroke-dasharray: 6 4; }\n    .axis { stroke: #cccccc; stroke-width: 0.5; }\n    .ray-label { font: 12px sans-serif; fill: #111111; }\n    .sector-label { font: 14px sans-serif; fill: #333333; }\n  </style>\n",
    );
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
        fmt(VIEW),
        fmt(VIEW)
    ));
    svg.push_str(&format!(
        "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
        fmt(CENTER),
        fmt(CENTER),
        fmt(UNIT_RADIUS)
    ));
    svg.push_str(&line(0.0, SECTOR_OUTER, "axis"));
    svg.push_str(&line(std::f64::consts::PI, SECTOR_OUTER, "axis"));

    for sector in &layout.sectors {
        let fill = SECTOR_FILLS[(sector.index - 1) % SECTOR_FILLS.len()];
        svg.push_str(&wedge(sector.start, sector.end, fill));
    }
    for ray in &catalog.critical {
        svg.push_str(&line(ray.angle, CRITICAL_LEN, "critical"));
    }
    for ray in &catalog.separating {
        svg.push_str(&line(ray.angle, SEPARATING_LEN, "separating"));
    }
    for sector in &layout.sectors {
        svg.push_str(&text(
            sector.midpoint(),
            SECTOR_LABEL_RADIUS,
            "sector-label",
            &format!("S{}", sector.index),
        ));
    }
    for (i, ray) in catalog.separating.iter().enumerate() {
        svg.push_str(&text(
            ray.angle,
            LABEL_RADIUS,
            "ray-label",
            &format!("&#x3c6;{} {}", i + 1, pair_label(&ray.pairs)),
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sector_layout, separating_rays, EigenvalueConfig};
    use num_complex::Complex64;

    fn setup(k: usize) -> (RayCatalog, SectorLayout) {
        let config =
            EigenvalueConfig::new(k, vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)])
                .unwrap();
        let catalog = separating_rays(&config).unwrap();
        let layout = sector_layout(&config, 0.0).unwrap();
        (catalog, layout)
    }

    #[test]
    fn k2_has_four_wedges_and_four_bold_rays() {
        let (catalog, layout) = setup(2);
        let svg = emit_svg(&catalog, &layout);
        assert_eq!(svg.matches("<path").count(), 4);
        assert_eq!(svg.matches("class=\"separating\"").count(), 4);
        assert!(svg.contains("S1") && svg.contains("S4"));
    }

    #[test]
    fn k1_has_two_wedges_and_two_rays() {
        let (catalog, layout) = setup(1);
        let svg = emit_svg(&catalog, &layout);
        assert_eq!(svg.matches("<path").count(), 2);
        assert_eq!(svg.matches("class=\"separating\"").count(), 2);
    }

    #[test]
    fn output_is_byte_deterministic() {
        let (catalog, layout) = setup(2);
        assert_eq!(emit_svg(&catalog, &layout), emit_svg(&catalog, &layout));
    }

    #[test]
    fn adjacent_wedges_overlap() {
        let (_, layout) = setup(2);
        for pair in layout.sectors.windows(2) {
            assert!(pair[0].end > pair[1].start);
        }
        // And around the seam.
        let first = layout.sectors.first().unwrap();
        let last = layout.sectors.last().unwrap();
        assert!(last.end - std::f64::consts::TAU > first.start);
    }
}
