//! Minimal log-log SVG line plot of sweep and validation CSV files.

use std::fmt::Write as _;
use std::path::Path;

use crate::Failure;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;
/// Horizontal space between the negative and positive `t` panels.
const PANEL_GAP: f64 = 30.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Table {
    t: Vec<f64>,
    series: Vec<(String, Vec<Option<f64>>)>,
}

fn parse_value(text: &str) -> Option<f64> {
    match text.trim() {
        "" => None,
        s => s.parse::<f64>().ok().filter(|v| v.is_finite() && *v > 0.0),
    }
}

fn read_table(path: &Path, columns: &[String]) -> Result<Table, Failure> {
    let input = |msg: String| Failure::Input(format!("{}: {msg}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| input(e.to_string()))?;
    let header = reader.headers().map_err(|e| input(e.to_string()))?.clone();
    if header.is_empty() {
        return Err(input("empty CSV".into()));
    }
    let index = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| input(format!("missing column {name}")))
    };
    let t_col = index("t_rel")?;
    let flagged_col = header.iter().position(|h| h == "flagged");
    let cols = columns
        .iter()
        .map(|c| index(c))
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table {
        t: Vec::new(),
        series: columns.iter().map(|c| (c.clone(), Vec::new())).collect(),
    };
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| input(format!("row {line}: {e}")))?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let t: f64 = field(t_col).trim().parse().map_err(|_| {
            input(format!(
                "row {line}: t_rel is not a number: {:?}",
                field(t_col)
            ))
        })?;
        let flagged = flagged_col.is_some_and(|i| field(i).trim() == "true");
        table.t.push(t);
        for (s, &c) in table.series.iter_mut().zip(&cols) {
            s.1.push(if flagged { None } else { parse_value(field(c)) });
        }
    }
    if table.t.is_empty() {
        return Err(input("no data rows".into()));
    }
    Ok(table)
}

/// Map of signed `t` onto the horizontal axis: log scale in `|t|`, with the
/// negative branch mirrored into a left panel when present.
struct XAxis {
    lo: f64,
    hi: f64,
    two_sided: bool,
}

impl XAxis {
    fn new(t: &[f64]) -> Self {
        let logs: Vec<f64> = t
            .iter()
            .filter(|v| **v != 0.0)
            .map(|v| v.abs().log10())
            .collect();
        let (mut lo, mut hi) = logs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(*v), b.max(*v))
            });
        if !lo.is_finite() {
            (lo, hi) = (-1.0, 1.0);
        }
        if hi - lo < 1e-9 {
            lo -= 0.5;
            hi += 0.5;
        }
        Self {
            lo,
            hi,
            two_sided: t.iter().any(|v| *v < 0.0),
        }
    }

    fn map(&self, t: f64) -> f64 {
        let inner = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        if !self.two_sided {
            let s = if t > 0.0 {
                (t.log10() - self.lo) / (self.hi - self.lo)
            } else {
                0.0
            };
            return MARGIN_LEFT + s * inner;
        }
        let half = (inner - PANEL_GAP) / 2.0;
        let center = MARGIN_LEFT + half + PANEL_GAP / 2.0;
        if t == 0.0 {
            return center;
        }
        let s = (t.abs().log10() - self.lo) / (self.hi - self.lo);
        // small |t| sits next to the center, large |t| at the edges
        if t > 0.0 {
            center + PANEL_GAP / 2.0 + s * half
        } else {
            center - PANEL_GAP / 2.0 - s * half
        }
    }
}

struct YAxis {
    lo: f64,
    hi: f64,
}

impl YAxis {
    fn map(&self, v: f64) -> f64 {
        let inner = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        HEIGHT - MARGIN_BOTTOM - (v.log10() - self.lo) / (self.hi - self.lo) * inner
    }
}

fn decades(lo: f64, hi: f64) -> impl Iterator<Item = i32> {
    (lo.ceil() as i32)..=(hi.floor() as i32)
}

fn render(table: &Table) -> String {
    let x = XAxis::new(&table.t);
    let values = table.series.iter().flat_map(|s| s.1.iter().flatten());
    let (mut ylo, mut yhi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v.log10()), b.max(v.log10()))
    });
    if !ylo.is_finite() {
        (ylo, yhi) = (-1.0, 1.0);
    }
    if yhi - ylo < 1e-9 {
        ylo -= 0.5;
        yhi += 0.5;
    }
    let pad = 0.05 * (yhi - ylo);
    let y = YAxis {
        lo: ylo - pad,
        hi: yhi + pad,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let bottom = HEIGHT - MARGIN_BOTTOM;
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        bottom - MARGIN_TOP
    );

    svg.push_str("<g class=\"ticks\">\n");
    for d in decades(y.lo, y.hi) {
        let py = y.map(10f64.powi(d));
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
            WIDTH - MARGIN_RIGHT,
            MARGIN_LEFT - 4.0,
            py + 4.0
        );
    }
    let signs: &[f64] = if x.two_sided { &[-1.0, 1.0] } else { &[1.0] };
    for d in decades(x.lo, x.hi) {
        for &sign in signs {
            let px = x.map(sign * 10f64.powi(d));
            let label = if sign < 0.0 {
                format!("-1e{d}")
            } else {
                format!("1e{d}")
            };
            let _ = writeln!(
                svg,
                r##"<line x1="{px:.2}" y1="{MARGIN_TOP}" x2="{px:.2}" y2="{bottom}" stroke="#eee"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{label}</text>"##,
                bottom + 15.0
            );
        }
    }
    svg.push_str("</g>\n");
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t / |x|</text>"#,
        (WIDTH + MARGIN_LEFT - MARGIN_RIGHT) / 2.0,
        HEIGHT - 10.0
    );

    for (k, (name, vals)) in table.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut d = String::new();
        let mut pen_down = false;
        let mut prev_t: Option<f64> = None;
        for (&t, v) in table.t.iter().zip(vals) {
            let crosses = prev_t.is_some_and(|p| (p < 0.0) != (t < 0.0));
            prev_t = Some(t);
            match v {
                Some(v) => {
                    let cmd = if pen_down && !crosses { 'L' } else { 'M' };
                    let _ = write!(d, "{cmd}{:.2},{:.2} ", x.map(t), y.map(*v));
                    pen_down = true;
                }
                None => pen_down = false,
            }
        }
        let _ = writeln!(
            svg,
            r#"<path class="series" data-name="{name}" d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            d.trim_end()
        );
        let ly = MARGIN_TOP + 15.0 + 15.0 * k as f64;
        let lx = MARGIN_LEFT + 10.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{name}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// SVG document plotting `columns` of the CSV at `path` against `t_rel`.
pub fn svg_from_csv(path: &Path, columns: &[String]) -> Result<String, Failure> {
    if columns.is_empty() {
        return Err(Failure::Input("no columns selected".into()));
    }
    Ok(render(&read_table(path, columns)?))
}
