//! Two-panel diagnostic plot: oscillator frequency against the ground
//! truth on top, HNR below, strobe instants as tick marks. Hand-rolled SVG,
//! figures are diagnostics rather than contracts.

use crate::error::Result;
use std::io::Write;

/// One plotted instance.
#[derive(Debug, Clone, Default)]
pub struct Series {
    pub name: String,
    pub fc_hz: Vec<f64>,
    pub hnr_db: Vec<f64>,
    /// Sample indices of strobes.
    pub strobes: Vec<usize>,
    /// Optional ground-truth track, drawn dashed.
    pub f0_ref: Option<Vec<f64>>,
}

pub struct Plot {
    pub title: String,
    pub fs: f64,
    pub series: Vec<Series>,
}

const W: f64 = 860.0;
const H: f64 = 520.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 840.0;
const TOP_PANEL: (f64, f64) = (40.0, 250.0);
const BOT_PANEL: (f64, f64) = (300.0, 480.0);
const COLORS: [&str; 6] = [
    "#1b6ca8", "#c23b22", "#2e8540", "#8a4f9e", "#b8860b", "#444444",
];

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn polyline(
    out: &mut String,
    xs: &[f64],
    panel: (f64, f64),
    lo: f64,
    hi: f64,
    n: usize,
    style: &str,
) {
    if xs.is_empty() {
        return;
    }
    out.push_str(&format!("<polyline fill=\"none\" {style} points=\""));
    let span = (n.max(2) - 1) as f64;
    for (i, &v) in xs.iter().enumerate() {
        let x = LEFT + (RIGHT - LEFT) * i as f64 / span;
        let y = panel.1 - (panel.1 - panel.0) * ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
        out.push_str(&format!("{x:.2},{y:.2} "));
    }
    out.push_str("\"/>\n");
}

/// Render the plot document.
pub fn render(plot: &Plot) -> String {
    let n = plot.series.iter().map(|s| s.fc_hz.len()).max().unwrap_or(0);
    let (f_lo, f_hi) = bounds(plot.series.iter().flat_map(|s| {
        s.fc_hz
            .iter()
            .chain(s.f0_ref.iter().flatten())
            .copied()
            .collect::<Vec<_>>()
    }));
    let (h_lo, h_hi) = bounds(plot.series.iter().flat_map(|s| s.hnr_db.iter().copied()));
    let dur = n as f64 / plot.fs;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    out.push_str(&format!(
        "<text x=\"{LEFT}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">{}</text>\n",
        xml_escape(&plot.title)
    ));
    for (panel, lo, hi, label) in [
        (TOP_PANEL, f_lo, f_hi, "frequency / Hz"),
        (BOT_PANEL, h_lo, h_hi, "HNR / dB"),
    ] {
        out.push_str(&format!(
            "<rect x=\"{LEFT}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>\n",
            panel.0,
            RIGHT - LEFT,
            panel.1 - panel.0
        ));
        out.push_str(&format!(
            "<text x=\"6\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{hi:.1}</text>\n",
            panel.0 + 12.0
        ));
        out.push_str(&format!(
            "<text x=\"6\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{lo:.1}</text>\n",
            panel.1
        ));
        out.push_str(&format!(
            "<text x=\"6\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             transform=\"rotate(-90 14 {})\">{label}</text>\n",
            (panel.0 + panel.1) / 2.0,
            (panel.0 + panel.1) / 2.0
        ));
    }
    out.push_str(&format!(
        "<text x=\"{RIGHT}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{dur:.3} s</text>\n",
        BOT_PANEL.1 + 16.0
    ));
    for (k, s) in plot.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        if let Some(f0) = &s.f0_ref {
            polyline(
                &mut out,
                f0,
                TOP_PANEL,
                f_lo,
                f_hi,
                n,
                &format!("stroke=\"{color}\" stroke-width=\"1\" stroke-dasharray=\"5 4\""),
            );
        }
        polyline(
            &mut out,
            &s.fc_hz,
            TOP_PANEL,
            f_lo,
            f_hi,
            n,
            &format!("stroke=\"{color}\" stroke-width=\"1.4\""),
        );
        polyline(
            &mut out,
            &s.hnr_db,
            BOT_PANEL,
            h_lo,
            h_hi,
            n,
            &format!("stroke=\"{color}\" stroke-width=\"1.4\""),
        );
        // strobe ticks under the top panel, one row per series
        let y0 = TOP_PANEL.1 + 4.0 + 6.0 * k as f64;
        let span = (n.max(2) - 1) as f64;
        for &t in &s.strobes {
            let x = LEFT + (RIGHT - LEFT) * t as f64 / span;
            out.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{y0:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"0.8\"/>\n",
                y0 + 5.0
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            LEFT + 8.0 + 120.0 * k as f64,
            TOP_PANEL.0 + 16.0,
            xml_escape(&s.name)
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Render and write to `w`.
pub fn write_plot<Wr: Write>(w: &mut Wr, plot: &Plot) -> Result<()> {
    w.write_all(render(plot).as_bytes())?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
