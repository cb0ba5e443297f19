//! Static log-log SVG charts.

use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::{bail, Result};
use dfr_core::TrainingRecord;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 64.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    /// Training loss against iteration.
    Loss,
    /// Training and validation loss against iteration.
    Validation,
    /// H¹ relative error against iteration.
    Error,
    /// H¹ relative error against the square root of the loss.
    Correlation,
}

impl ChartKind {
    pub const ALL: [ChartKind; 4] = [Self::Loss, Self::Validation, Self::Error, Self::Correlation];

    pub fn name(self) -> &'static str {
        match self {
            Self::Loss => "loss",
            Self::Validation => "validation",
            Self::Error => "error",
            Self::Correlation => "correlation",
        }
    }
}

impl FromStr for ChartKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| anyhow::anyhow!("unknown chart kind `{s}`; expected loss, validation, error or correlation"))
    }
}

struct Series {
    label: &'static str,
    points: Vec<(f64, f64)>,
}

fn series(history: &[TrainingRecord], label: &'static str, f: impl Fn(&TrainingRecord) -> (f64, f64)) -> Series {
    let points = history.iter().map(f).filter(|&(x, y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()).collect();
    Series { label, points }
}

/// Renders `history` as a chart of the given kind.
pub fn render(history: &[TrainingRecord], kind: ChartKind) -> Result<String> {
    if history.is_empty() {
        bail!("empty history: nothing to chart");
    }
    let iter = |r: &TrainingRecord| r.iteration.max(1) as f64;
    let (title, xlabel, ylabel, data, scatter) = match kind {
        ChartKind::Loss => {
            ("Training loss", "iteration", "loss", vec![series(history, "train", |r| (iter(r), r.train_loss))], false)
        }
        ChartKind::Validation => (
            "Training and validation loss",
            "iteration",
            "loss",
            vec![
                series(history, "train", |r| (iter(r), r.train_loss)),
                series(history, "validation", |r| (iter(r), r.val_loss)),
            ],
            false,
        ),
        ChartKind::Error => (
            "Relative H1 error",
            "iteration",
            "relative error",
            vec![series(history, "H1", |r| (iter(r), r.h1_rel_err_sq.sqrt()))],
            false,
        ),
        ChartKind::Correlation => (
            "Error against loss",
            "sqrt(loss)",
            "relative H1 error",
            vec![series(history, "records", |r| (r.train_loss.sqrt(), r.h1_rel_err_sq.sqrt()))],
            true,
        ),
    };
    let all: Vec<(f64, f64)> = data.iter().flat_map(|s| s.points.iter().copied()).collect();
    if all.is_empty() {
        bail!("history has no positive finite values for a {} chart", kind.name());
    }
    let bounds = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x.log10()), b.max(x.log10())));
        let (lo, hi) = (lo.floor(), hi.ceil());
        if hi > lo {
            (lo, hi)
        } else {
            (lo, lo + 1.0)
        }
    };
    let (x0, x1) = bounds(&mut all.iter().map(|p| p.0));
    let (y0, y1) = bounds(&mut all.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x.log10() - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y.log10() - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{title}</text>"#, WIDTH / 2.0);
    for e in x0 as i32..=x1 as i32 {
        let x = sx(10f64.powi(e));
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{MARGIN}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{e}</text>"##,
            HEIGHT - MARGIN,
            HEIGHT - MARGIN + 16.0
        );
    }
    for e in y0 as i32..=y1 as i32 {
        let y = sy(10f64.powi(e));
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            WIDTH - MARGIN,
            MARGIN - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"##,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, WIDTH / 2.0, HEIGHT - 16.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{ylabel}</text>"#,
        HEIGHT / 2.0
    );

    if scatter {
        // unit-slope guide through the geometric mean of the points
        let n = all.len() as f64;
        let (mx, my) = all.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0.log10() / n, b + p.1.log10() / n));
        let (ga, gb) = (x0.max(y0 - my + mx), x1.min(y1 - my + mx));
        if gb > ga {
            let _ = writeln!(
                s,
                r##"<line class="guide" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="6 4"/>"##,
                sx(10f64.powf(ga)),
                sy(10f64.powf(ga - mx + my)),
                sx(10f64.powf(gb)),
                sy(10f64.powf(gb - mx + my))
            );
        }
        for &(x, y) in &data[0].points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#, sx(x), sy(y), COLORS[0]);
        }
    } else {
        for (i, ser) in data.iter().enumerate() {
            if ser.points.is_empty() {
                continue;
            }
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
            let ly = MARGIN + 16.0 + 16.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{ly:.2}" text-anchor="end" fill="{color}">{}</text>"#,
                WIDTH - MARGIN - 8.0,
                ser.label
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
