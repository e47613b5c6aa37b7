use std::fmt::Write as _;

use super::{ExponentFit, SweepResult, Verdict};
use crate::quantities::CSV_COLUMNS;
use crate::{Error, Result};

pub const VERDICT_COLUMNS: [&str; 8] = ["check", "epsilon", "status", "lhs", "rhs", "margin", "constant", "note"];

const FIT_HEADER: [&str; 11] = [
    "#FIT",
    "x_column",
    "y_column",
    "slope",
    "intercept",
    "r_squared",
    "ci_low",
    "ci_high",
    "rows",
    "log_profile_slope",
    "log_profile_r_squared",
];

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

impl SweepResult {
    /// One report row per member, then a `#FIT` block (and a `#FAILED`
    /// line per failed member).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        w.write_record(CSV_COLUMNS)?;
        for row in &self.rows {
            w.write_record(row.report.csv_record())?;
        }
        w.write_record(FIT_HEADER)?;
        for f in &self.fits {
            w.write_record(fit_record(f))?;
        }
        for fail in &self.failures {
            w.write_record(["#FAILED".to_string(), num(fail.epsilon), fail.message.clone()])?;
        }
        into_string(w)
    }
}

fn fit_record(f: &ExponentFit) -> Vec<String> {
    vec![
        "#FIT".into(),
        f.x_column.clone(),
        f.y_column.clone(),
        num(f.fit.slope),
        num(f.fit.intercept),
        num(f.fit.r_squared),
        num(f.fit.ci_low),
        num(f.fit.ci_high),
        f.fit.n.to_string(),
        num(f.log_profile.slope),
        num(f.log_profile.r_squared),
    ]
}

/// Verdict table as CSV.
pub fn verdicts_csv(verdicts: &[Verdict]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(VERDICT_COLUMNS)?;
    for v in verdicts {
        w.write_record([
            v.check.as_str().to_string(),
            v.epsilon.map(num).unwrap_or_default(),
            v.status.to_string(),
            num(v.lhs),
            num(v.rhs),
            num(v.margin),
            v.constant.map(num).unwrap_or_default(),
            v.note.clone(),
        ])?;
    }
    into_string(w)
}

/// Log-log scatter of the fit's columns over the perturbed rows with the
/// fitted line.
pub fn svg_loglog(result: &SweepResult, fit: &ExponentFit) -> String {
    const W: f64 = 480.0;
    const H: f64 = 360.0;
    const PAD: f64 = 56.0;
    let pts: Vec<(f64, f64)> = result
        .perturbed()
        .filter_map(|r| Some((r.column(&fit.x_column)?.ln(), r.column(&fit.y_column)?.ln())))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let range = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        let pad = 0.1 * (hi - lo).max(1e-3);
        (lo - pad, hi + pad)
    };
    let (x0, x1) = range(&mut pts.iter().map(|p| p.0));
    let (y0, y1) = range(&mut pts.iter().map(|p| p.1));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{a} {b} L{a} {c} L{d} {c}" stroke="black" fill="none"/>"#,
        a = PAD,
        b = PAD,
        c = H - PAD,
        d = W - PAD
    );
    for (v, x, y, anchor) in [
        (x0, PAD, H - PAD + 16.0, "start"),
        (x1, W - PAD, H - PAD + 16.0, "end"),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" font-size="11" text-anchor="{anchor}">{:.2e}</text>"#, v.exp());
    }
    for (v, y) in [(y0, H - PAD), (y1, PAD + 10.0)] {
        let _ = writeln!(s, r#"<text x="{}" y="{y}" font-size="11" text-anchor="end">{:.2e}</text>"#, PAD - 4.0, v.exp());
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{} (log)</text>"#,
        W / 2.0,
        H - 12.0,
        fit.x_column
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{} (log)</text>"#,
        H / 2.0,
        H / 2.0,
        fit.y_column
    );
    let line = |x: f64| fit.fit.intercept + fit.fit.slope * x;
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-width="1.5"/>"#,
        sx(x0),
        sy(line(x0)),
        sx(x1),
        sy(line(x1))
    );
    for (x, y) in &pts {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="firebrick"/>"#, sx(*x), sy(*y));
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12">slope {:.3}, r² {:.4}</text>"#,
        PAD + 8.0,
        PAD - 12.0,
        fit.fit.slope,
        fit.fit.r_squared
    );
    s.push_str("</svg>\n");
    s
}
