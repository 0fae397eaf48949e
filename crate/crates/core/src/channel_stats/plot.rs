use std::fmt::Write;

use super::PowerDelayProfile;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 50.0;

fn header(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n\
         <text x=\"14\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 {})\">{}</text>\n\
         <rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        W / 2.0,
        escape(title),
        W / 2.0,
        H - 10.0,
        escape(x_label),
        H / 2.0,
        H / 2.0,
        escape(y_label),
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN,
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

fn axis_labels(out: &mut String, (x0, x1): (f64, f64), (y0, y1): (f64, f64)) {
    let _ = writeln!(
        out,
        "<text x=\"{MARGIN}\" y=\"{}\" font-size=\"10\">{x0:.1}</text>\
         <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{x1:.1}</text>\
         <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{y0:.1}</text>\
         <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{y1:.1}</text>",
        H - MARGIN + 14.0,
        W - MARGIN,
        H - MARGIN + 14.0,
        MARGIN - 4.0,
        H - MARGIN,
        MARGIN - 4.0,
        MARGIN + 10.0,
    );
}

/// Stem plot of a profile in dBm against delay.
pub fn pdp_svg(pdp: &PowerDelayProfile, title: &str) -> String {
    let pts: Vec<(f64, f64)> = pdp.bins.iter().map(|(t, p)| (*t, 10.0 * p.log10())).collect();
    let xr = range(pts.iter().map(|p| p.0));
    let yr = range(pts.iter().map(|p| p.1));
    let yr = (yr.0 - 3.0, yr.1 + 3.0);
    let sx = |x: f64| MARGIN + (x - xr.0) / (xr.1 - xr.0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - yr.0) / (yr.1 - yr.0) * (H - 2.0 * MARGIN);
    let mut out = String::new();
    header(&mut out, title, "delay (ns)", "power (dBm)");
    axis_labels(&mut out, xr, yr);
    for (t, p) in &pts {
        let _ = writeln!(
            out,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"steelblue\"/>\
             <circle cx=\"{x:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>",
            sy(yr.0),
            sy(*p),
            sy(*p),
            x = sx(*t),
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Measured against predicted scatter with the identity line.
pub fn scatter_svg(pairs: &[(f64, f64)], title: &str, label: &str) -> String {
    let r = range(pairs.iter().flat_map(|p| [p.0, p.1]));
    let s = |v: f64, lo: f64, span: f64| (v - r.0) / (r.1 - r.0) * span + lo;
    let sx = |x: f64| s(x, MARGIN, W - 2.0 * MARGIN);
    let sy = |y: f64| H - s(y, MARGIN, H - 2.0 * MARGIN);
    let mut out = String::new();
    header(&mut out, title, &format!("measured {label}"), &format!("predicted {label}"));
    axis_labels(&mut out, r, r);
    let _ = writeln!(
        out,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"gray\" stroke-dasharray=\"4\"/>",
        sx(r.0),
        sy(r.0),
        sx(r.1),
        sy(r.1)
    );
    for (m, p) in pairs {
        let _ = writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"firebrick\"/>", sx(*m), sy(*p));
    }
    out.push_str("</svg>\n");
    out
}
