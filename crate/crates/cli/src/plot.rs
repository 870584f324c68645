//! Self-contained log-log SVG plots of sweep and GMRES tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::gmres_study::GmresRow;
use crate::sweep::{FittedSlope, SweepRow};
use crate::table::read_rows;
use crate::{io_err, CliError, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// `(log10 min, log10 max)` padded by 5% of the span.
fn log_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v.log10()), hi.max(v.log10()))
    });
    let span = (hi - lo).max(0.1);
    (lo - 0.05 * span, hi + 0.05 * span)
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let decades: Vec<f64> = (lo.ceil() as i32..=hi.floor() as i32)
        .map(f64::from)
        .collect();
    if decades.len() >= 2 {
        return decades;
    }
    let n = 4;
    (0..=n)
        .map(|i| lo + (hi - lo) * (0.05 + 0.9 * i as f64 / n as f64))
        .collect()
}

fn tick_label(e: f64) -> String {
    let v = 10f64.powf(e);
    if (e - e.round()).abs() < 1e-12 {
        format!("{v}")
    } else if v >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Figure {
    /// Renders the figure; series must be nonempty with positive data.
    pub fn to_svg(&self) -> Result<String> {
        if self.series.is_empty() {
            return Err(CliError::Input(format!("{}: nothing to plot", self.title)));
        }
        for s in &self.series {
            if s.points.is_empty() {
                return Err(CliError::Input(format!(
                    "{}: series `{}` is empty",
                    self.title, s.label
                )));
            }
            if s.points
                .iter()
                .any(|&(x, y)| !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite())
            {
                return Err(CliError::Input(format!(
                    "{}: series `{}` has nonpositive values",
                    self.title, s.label
                )));
            }
        }
        let all = || self.series.iter().flat_map(|s| s.points.iter());
        let (x0, x1) = log_range(all().map(|p| p.0));
        let (y0, y1) = log_range(all().map(|p| p.1));
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x.log10() - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y.log10()) / (y1 - y0) * ph;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(
            svg,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            svg,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for t in ticks(x0, x1) {
            let x = LEFT + (t - x0) / (x1 - x0) * pw;
            let _ = writeln!(
                svg,
                r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                TOP + ph,
                TOP + ph + 16.0,
                tick_label(t)
            );
        }
        for t in ticks(y0, y1) {
            let y = TOP + (y1 - t) / (y1 - y0) * ph;
            let _ = writeln!(
                svg,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                LEFT + pw,
                LEFT - 6.0,
                y + 4.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">k</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 12.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                path.join(" ")
            );
            for &(x, y) in &s.points {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
                    sx(x),
                    sy(y)
                );
            }
            let ly = TOP + 14.0 + 34.0 * i as f64;
            let lx = LEFT + pw + 12.0;
            let _ = writeln!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="7" height="7" fill="{color}"/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
                lx - 3.5,
                ly - 7.5,
                lx + 8.0,
                escape(&s.label)
            );
            let (ks, vs): (Vec<f64>, Vec<f64>) = s.points.iter().copied().unzip();
            let slope = match FittedSlope::fit(&ks, &vs) {
                Some(f) => slope_annotation(f.slope),
                None => "slope n/a".to_string(),
            };
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}">{slope}</text>"#,
                lx + 8.0,
                ly + 14.0
            );
        }
        svg.push_str("</svg>\n");
        Ok(svg)
    }
}

pub fn slope_annotation(slope: f64) -> String {
    format!("slope {slope:.3}")
}

/// File key, axis label and column accessor.
type Quantity = (&'static str, &'static str, fn(&SweepRow) -> f64);

fn sweep_figures(rows: &[SweepRow]) -> Vec<(&'static str, Figure)> {
    let mut groups: BTreeMap<String, Vec<&SweepRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.ok()) {
        let label = if r.beta > 0.0 {
            format!("{} {} beta=k", r.geometry, r.regularizer)
        } else {
            format!("{} {}", r.geometry, r.regularizer)
        };
        groups.entry(label).or_default().push(r);
    }
    let quantities: [Quantity; 3] = [
        ("sigma_max", "sigma_max(M^-1 B)", |r| r.sigma_max),
        ("inv_sigma_min", "1 / sigma_min(M^-1 B)", |r| {
            1.0 / r.sigma_min
        }),
        ("cond", "cond(M^-1 B)", |r| r.cond),
    ];
    quantities
        .iter()
        .map(|&(key, y_label, f)| {
            let series = groups
                .iter()
                .map(|(label, rs)| {
                    let mut points: Vec<(f64, f64)> = rs.iter().map(|r| (r.k, f(r))).collect();
                    points.sort_by(|a, b| a.0.total_cmp(&b.0));
                    Series {
                        label: label.clone(),
                        points,
                    }
                })
                .collect();
            (
                key,
                Figure {
                    title: y_label.to_string(),
                    y_label: y_label.to_string(),
                    series,
                },
            )
        })
        .collect()
}

fn gmres_figure(rows: &[GmresRow]) -> Figure {
    let mut groups: BTreeMap<(String, u64), Vec<&GmresRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.iters > 0) {
        groups
            .entry((r.geometry.clone(), r.alpha.to_bits()))
            .or_default()
            .push(r);
    }
    let series = groups
        .into_values()
        .map(|rs| {
            let mut points: Vec<(f64, f64)> = rs.iter().map(|r| (r.k, r.iters as f64)).collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series {
                label: format!("{} eta={}k^-{:.4}", rs[0].geometry, rs[0].c, rs[0].alpha),
                points,
            }
        })
        .collect();
    Figure {
        title: "GMRES iterations".into(),
        y_label: "iterations".into(),
        series,
    }
}

fn header(path: &Path) -> Result<csv::StringRecord> {
    Ok(csv::Reader::from_path(path)?.headers()?.clone())
}

/// Writes one SVG per plotted quantity into `out_dir`, named after the CSV
/// file stem, and returns their paths. Nothing is written if any figure fails.
pub fn emit_plot(csv_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let head = header(csv_path)?;
    let has = |name: &str| head.iter().any(|h| h == name);
    let figures: Vec<(&str, Figure)> = if has("sigma_max") {
        sweep_figures(&read_rows::<SweepRow>(csv_path)?)
    } else if has("iters") {
        vec![(
            "iterations",
            gmres_figure(&read_rows::<GmresRow>(csv_path)?),
        )]
    } else {
        return Err(CliError::Input(format!(
            "{}: neither a sweep nor a GMRES table",
            csv_path.display()
        )));
    };
    let rendered = figures
        .iter()
        .map(|(key, fig)| Ok((*key, fig.to_svg()?)))
        .collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let stem = csv_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("plot");
    let mut written = Vec::new();
    for (key, svg) in rendered {
        let path = out_dir.join(format!("{stem}_{key}.svg"));
        std::fs::write(&path, svg).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
