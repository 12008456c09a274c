//! Ext chart export: JSON, TSV and SVG.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::resolution::ChartEntry;

pub const TSV_HEADER: &str = "# steenres-chart v1";

/// A bare JSON array of `{s, t, n}` objects.
pub fn to_json(chart: &[ChartEntry]) -> String {
    let mut out = serde_json::to_string(chart).expect("serializable");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> Result<Vec<ChartEntry>, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

/// `s<TAB>t<TAB>n` lines after a version comment.
pub fn to_tsv(chart: &[ChartEntry]) -> String {
    let mut out = format!("{TSV_HEADER}\n");
    for e in chart {
        writeln!(out, "{}\t{}\t{}", e.s, e.t, e.n).expect("writing to String");
    }
    out
}

pub fn from_tsv(text: &str) -> Result<Vec<ChartEntry>, String> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|line| {
            let f: Vec<u32> = line
                .split('\t')
                .map(|x| x.parse::<u32>().map_err(|e| format!("{line:?}: {e}")))
                .collect::<Result<_, _>>()?;
            match f[..] {
                [s, t, n] => Ok(ChartEntry { s, t, n }),
                _ => Err(format!("expected three columns: {line:?}")),
            }
        })
        .collect()
}

const CELL: f64 = 24.0;
const MARGIN: f64 = 32.0;

/// Adams chart: stem `t - s` across, `s` up, one dot per generator.
pub fn to_svg(chart: &[ChartEntry]) -> String {
    let cells: BTreeMap<(i64, u32), u32> = chart
        .iter()
        .map(|e| ((e.t as i64 - e.s as i64, e.s), e.n))
        .collect();
    let max_x = cells.keys().map(|&(x, _)| x).max().unwrap_or(0).max(0) as f64;
    let max_y = cells.keys().map(|&(_, y)| y).max().unwrap_or(0) as f64;
    let width = 2.0 * MARGIN + (max_x + 1.0) * CELL;
    let height = 2.0 * MARGIN + (max_y + 1.0) * CELL;
    let px = |x: f64| MARGIN + x * CELL;
    let py = |y: f64| height - MARGIN - y * CELL;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(svg, "<!-- steenres-chart v1 -->").unwrap();
    writeln!(svg, r#"<g stroke="lightgray" stroke-width="0.5">"#).unwrap();
    for x in 0..=(max_x as u32 + 1) {
        let x = px(x as f64);
        writeln!(svg, r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}"/>"#, py(0.0), py(max_y + 1.0)).unwrap();
    }
    for y in 0..=(max_y as u32 + 1) {
        let y = py(y as f64);
        writeln!(svg, r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}"/>"#, px(0.0), px(max_x + 1.0)).unwrap();
    }
    writeln!(svg, "</g>").unwrap();
    writeln!(svg, r#"<g font-family="sans-serif" font-size="9" fill="gray">"#).unwrap();
    for x in (0..=max_x as u32).step_by(2) {
        writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{x}</text>"#, px(x as f64 + 0.5), py(0.0) + 12.0).unwrap();
    }
    for y in (0..=max_y as u32).step_by(2) {
        writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{y}</text>"#, px(0.0) - 4.0, py(y as f64 + 0.5) + 3.0).unwrap();
    }
    writeln!(svg, "</g>").unwrap();
    writeln!(svg, r#"<g fill="black">"#).unwrap();
    for (&(x, y), &n) in &cells {
        if x < 0 {
            continue;
        }
        for k in 0..n {
            // Spread several dots across the cell.
            let offset = (k as f64 + 1.0) / (n as f64 + 1.0);
            let cx = px(x as f64 + offset);
            let cy = py(y as f64 + 0.5);
            writeln!(
                svg,
                r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="2.5" data-s="{y}" data-t="{}"/>"#,
                x + y as i64
            )
            .unwrap();
        }
    }
    writeln!(svg, "</g>").unwrap();
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ChartEntry> {
        vec![
            ChartEntry { s: 0, t: 0, n: 1 },
            ChartEntry { s: 1, t: 1, n: 1 },
            ChartEntry { s: 1, t: 2, n: 1 },
            ChartEntry { s: 2, t: 4, n: 2 },
        ]
    }

    #[test]
    fn formats_agree() {
        let chart = sample();
        assert_eq!(from_json(&to_json(&chart)).unwrap(), chart);
        assert_eq!(from_tsv(&to_tsv(&chart)).unwrap(), chart);
        assert!(to_tsv(&chart).contains("\n1\t2\t1\n"));
    }

    #[test]
    fn svg_has_one_dot_per_generator() {
        let svg = to_svg(&sample());
        assert_eq!(svg.matches("<circle").count(), 5);
        assert!(svg.starts_with("<svg"));
    }
}
