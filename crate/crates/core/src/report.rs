//! Artifact writers: CSV tables, JSON documents and self-contained SVG line plots.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! inputs give byte-identical files.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremizer::SearchResult;
use crate::flow::FlowTrace;
use crate::infconv::ComparisonReport;
use crate::rearrange::LevelSetMass;
use crate::transforms::SupportBody2D;
use crate::verify::CriterionReport;

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Columns `lambda, mass_lhs, mass_rhs, slack, verdict`.
pub fn comparison_csv(r: &ComparisonReport) -> Result<String> {
    table(
        &["lambda", "mass_lhs", "mass_rhs", "slack", "verdict"],
        r.rows.iter().map(|row| {
            vec![
                num(row.lambda),
                num(row.mass_lhs),
                num(row.mass_rhs),
                num(row.slack),
                verdict(row.pass).into(),
            ]
        }),
    )
}

/// Columns `lambda, mass_f, mass_rearranged, error_bound, verdict`, where
/// `error_bound` is the sum of the two one-layer bounds.
pub fn rearrangement_csv(f: &[LevelSetMass], rearranged: &[LevelSetMass]) -> Result<String> {
    if f.len() != rearranged.len() {
        return Err(Error::InvalidArgument(format!(
            "{} levels for f but {} for the rearrangement",
            f.len(),
            rearranged.len()
        )));
    }
    table(
        &["lambda", "mass_f", "mass_rearranged", "error_bound", "verdict"],
        f.iter().zip(rearranged).map(|(a, b)| {
            let bound = a.error_bound + b.error_bound;
            vec![
                num(a.lambda),
                num(a.mass),
                num(b.mass),
                num(bound),
                verdict((a.mass - b.mass).abs() <= bound).into(),
            ]
        }),
    )
}

/// Columns `t, mass, alpha, residual, verdict`; `residual` is empty where not evaluated.
pub fn flow_csv(tr: &FlowTrace) -> Result<String> {
    let m0 = tr.states[0].mass;
    let a0 = tr.states[0].alpha;
    let bound = (2.0 * std::f64::consts::PI).powi(tr.n as i32);
    let rows = tr.states.iter().zip(&tr.residuals).enumerate().map(|(k, (s, res))| {
        let a_prev = if k == 0 { a0 } else { tr.states[k - 1].alpha };
        let ok = (s.mass - m0).abs() <= crate::flow::MASS_TOL * m0
            && (tr.kind != crate::flow::DualKind::Legendre
                || (s.alpha >= a_prev - crate::flow::ALPHA_TOL && s.product() <= bound + crate::flow::PRODUCT_TOL))
            && res.as_ref().is_none_or(|r| r.pass());
        vec![
            num(s.t),
            num(s.mass),
            num(s.alpha),
            res.as_ref().map(|r| num(r.residual)).unwrap_or_default(),
            verdict(ok).into(),
        ]
    });
    table(&["t", "mass", "alpha", "residual", "verdict"], rows)
}

/// Columns `angle, support`.
pub fn body_csv(k: &SupportBody2D) -> Result<String> {
    table(
        &["angle", "support"],
        (0..k.len()).map(|j| vec![num(k.angle(j)), num(k.support()[j])]),
    )
}

/// Columns `r, profile, gaussian`.
pub fn profile_csv(res: &SearchResult, r_max: f64, samples: usize) -> Result<String> {
    table(
        &["r", "profile", "gaussian"],
        (0..=samples).map(|k| {
            let r = r_max * k as f64 / samples as f64;
            vec![num(r), num(res.profile.eval(r)), num(0.5 * r * r)]
        }),
    )
}

/// Columns `id, title, pass, instances, summary`.
pub fn criteria_csv(reports: &[CriterionReport]) -> Result<String> {
    table(
        &["id", "title", "pass", "instances", "summary"],
        reports.iter().map(|r| {
            vec![
                r.id.to_string(),
                r.title.clone(),
                verdict(r.pass).into(),
                r.instances.to_string(),
                r.summary.clone(),
            ]
        }),
    )
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            name: name.into(),
            points,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl LinePlot {
    pub fn new(title: &str, x_label: &str, y_label: &str, series: Vec<Series>) -> Self {
        LinePlot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series,
        }
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let pts = || {
            self.series
                .iter()
                .flat_map(|s| s.points.iter())
                .filter(|p| p.0.is_finite() && p.1.is_finite())
        };
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts() {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |lo: f64, hi: f64| {
            let d = (hi - lo).max(1e-9 * hi.abs().max(1.0));
            (lo - 0.05 * d, hi + 0.05 * d)
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        (x0, x1, y0, y1)
    }

    /// Renders a standalone SVG; `timestamp` adds a leading comment.
    pub fn to_svg(&self, timestamp: Option<&str>) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
        let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        if let Some(ts) = timestamp {
            out.push_str(&format!("<!-- generated {} -->\n", escape(ts)));
        }
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        ));
        out.push_str(&format!("<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"));
        out.push_str(&format!(
            "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
            W - 2.0 * MARGIN,
            H - 2.0 * MARGIN
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
            W / 2.0,
            MARGIN / 2.0,
            escape(&self.title)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            W / 2.0,
            H - 15.0,
            escape(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"15\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 15 {})\">{}</text>\n",
            H / 2.0,
            H / 2.0,
            escape(&self.y_label)
        ));
        for k in 0..=4 {
            let fx = x0 + (x1 - x0) * k as f64 / 4.0;
            let fy = y0 + (y1 - y0) * k as f64 / 4.0;
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
                sx(fx),
                H - MARGIN + 16.0,
                tick(fx)
            ));
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
                MARGIN - 4.0,
                sy(fy) + 4.0,
                tick(fy)
            ));
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let path: Vec<String> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                path.join(" ")
            ));
            let ly = MARGIN + 16.0 + 16.0 * i as f64;
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{ly:.1}\" fill=\"{color}\" text-anchor=\"end\">{}</text>\n",
                W - MARGIN - 6.0,
                escape(&s.name)
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e5) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infconv::ComparisonRow;

    #[test]
    fn comparison_table_has_stable_columns() {
        let r = ComparisonReport {
            form: "sublevel".into(),
            rows: vec![ComparisonRow {
                lambda: 0.5,
                mass_lhs: 1.0,
                mass_rhs: 1.25,
                slack: 0.1,
                pass: true,
            }],
            pass: true,
            max_slack: 0.1,
        };
        assert_eq!(
            comparison_csv(&r).unwrap(),
            "lambda,mass_lhs,mass_rhs,slack,verdict\n0.5,1.0,1.25,0.1,pass\n"
        );
    }

    #[test]
    fn rearrangement_table_sums_the_bounds() {
        let m = |mass, error_bound| LevelSetMass {
            lambda: 1.0,
            mass,
            error_bound,
        };
        assert_eq!(
            rearrangement_csv(&[m(2.0, 0.25)], &[m(2.5, 0.25)]).unwrap(),
            "lambda,mass_f,mass_rearranged,error_bound,verdict\n1.0,2.0,2.5,0.5,pass\n"
        );
        assert!(rearrangement_csv(&[m(2.0, 0.25)], &[]).is_err());
    }

    #[test]
    fn svg_is_deterministic_without_timestamp() {
        let p = LinePlot::new(
            "a < b",
            "t",
            "alpha",
            vec![Series::new("alpha", vec![(0.0, 1.0), (1.0, 2.0)])],
        );
        let a = p.to_svg(None);
        assert_eq!(a, p.to_svg(None));
        assert!(a.contains("a &lt; b") && a.ends_with("</svg>\n"));
        assert!(!a.contains("<!--"));
        assert!(p.to_svg(Some("now")).contains("<!-- generated now -->"));
    }
}
