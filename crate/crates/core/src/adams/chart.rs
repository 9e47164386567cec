//! Text and SVG renderings of Adams charts (`t - s` across, `s` up).

use std::fmt::Write;

use super::ChartCell;

/// One character per bidegree: `.` empty, the dimension, `*` above 9.
pub fn text_chart(cells: &[ChartCell], max_stem: u32) -> String {
    let smax = cells.iter().map(|c| c.s).max().unwrap_or(0);
    let mut grid = vec![vec!['.'; max_stem as usize + 1]; smax as usize + 1];
    for c in cells.iter().filter(|c| c.stem <= max_stem && c.dim > 0) {
        grid[c.s as usize][c.stem as usize] = match c.dim {
            d @ 1..=9 => char::from_digit(d as u32, 10).unwrap(),
            _ => '*',
        };
    }
    let mut out = String::new();
    for s in (0..=smax).rev() {
        let row: String = grid[s as usize].iter().collect();
        let _ = writeln!(out, "{s:>3} {row}");
    }
    let axis: String = (0..=max_stem).map(|k| char::from_digit(k % 10, 10).unwrap()).collect();
    let _ = writeln!(out, "    {axis}");
    out
}

const UNIT: u32 = 16;
const MARGIN: u32 = 24;

/// Dots for classes and segments for non-zero `v₁`-multiplications.
pub fn svg_chart(cells: &[ChartCell], max_stem: u32) -> String {
    let smax = cells.iter().map(|c| c.s).max().unwrap_or(0);
    let width = (max_stem + 1) * UNIT + 2 * MARGIN;
    let height = (smax + 1) * UNIT + 2 * MARGIN;
    let x = |stem: u32| MARGIN + stem * UNIT + UNIT / 2;
    let y = |s: u32| height - MARGIN - s * UNIT - UNIT / 2;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for stem in (0..=max_stem).step_by(4) {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="9" text-anchor="middle">{stem}</text>"#,
            x(stem),
            height - MARGIN / 3
        );
    }
    for c in cells.iter().filter(|c| c.stem <= max_stem && c.dim > 0) {
        if c.v1_rank > 0 && c.stem + 2 <= max_stem {
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1"/>"#,
                x(c.stem),
                y(c.s),
                x(c.stem + 2),
                y(c.s + 1)
            );
        }
    }
    for c in cells.iter().filter(|c| c.stem <= max_stem && c.dim > 0) {
        for k in 0..c.dim as u32 {
            let dx = (2 * k as i32 - (c.dim as i32 - 1)) * 3;
            let _ = writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="2.5" fill="black"><title>s={} t-s={}</title></circle>"#,
                x(c.stem) as i32 + dx,
                y(c.s),
                c.s,
                c.stem
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
