//! Minimal deterministic SVG backend.

use std::fmt::Write;

use super::{Plot, PlotKind};

const W: f64 = 480.0;
const H: f64 = 360.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

pub trait PlotRenderer {
    fn extension(&self) -> &'static str;
    fn render(&self, plot: &Plot) -> String;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SvgRenderer;

impl PlotRenderer for SvgRenderer {
    fn extension(&self) -> &'static str {
        "svg"
    }

    fn render(&self, plot: &Plot) -> String {
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
        );
        let _ = writeln!(s, "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>", W / 2.0, esc(&plot.title));
        match plot.kind {
            PlotKind::Line => line(&mut s, plot),
            PlotKind::Bar => bars(&mut s, plot),
            PlotKind::Silhouette => silhouette(&mut s, plot),
            PlotKind::Radar => radar(&mut s, plot),
            PlotKind::Heatmap => heatmap(&mut s, plot),
        }
        s.push_str("</svg>\n");
        s
    }
}

fn esc(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn n(v: f64) -> String {
    let r = format!("{v:.2}");
    if r == "-0.00" { "0.00".into() } else { r }
}

struct Scale {
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
}

impl Scale {
    fn new(lo: f64, hi: f64, a: f64, b: f64) -> Scale {
        let (lo, hi) = if (hi - lo).abs() < 1e-12 { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
        Scale { lo, hi, a, b }
    }

    fn map(&self, v: f64) -> f64 {
        self.a + (v - self.lo) / (self.hi - self.lo) * (self.b - self.a)
    }
}

fn axes(s: &mut String, plot: &Plot, xs: &Scale, ys: &Scale, x_ticks: bool) {
    let (x0, y0, x1, y1) = (LEFT, H - BOTTOM, W - RIGHT, TOP);
    let _ = writeln!(s, "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>");
    let _ = writeln!(s, "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>");
    for i in 0..=4 {
        let v = ys.lo + (ys.hi - ys.lo) * i as f64 / 4.0;
        let y = ys.map(v);
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>", n(x0 - 4.0), n(y + 4.0), n(v));
        if x_ticks {
            let v = xs.lo + (xs.hi - xs.lo) * i as f64 / 4.0;
            let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", n(xs.map(v)), n(y0 + 14.0), n(v));
        }
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", (x0 + x1) / 2.0, H - 12.0, esc(&plot.x_label));
    let _ = writeln!(
        s,
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        esc(&plot.y_label)
    );
}

fn line(s: &mut String, plot: &Plot) {
    let all_x = plot.series.iter().flat_map(|r| r.x.iter().copied());
    let (xlo, xhi) = bounds(all_x);
    let all_y = plot.series.iter().flat_map(|r| {
        let band = r.band.clone().unwrap_or_default();
        r.y.iter()
            .enumerate()
            .flat_map(move |(i, &y)| {
                let b = band.get(i).copied().unwrap_or(0.0);
                [y - b, y + b]
            })
            .collect::<Vec<_>>()
    });
    let (ylo, yhi) = bounds(all_y);
    let xs = Scale::new(xlo, xhi, LEFT, W - RIGHT);
    let ys = Scale::new(ylo, yhi, H - BOTTOM, TOP);
    axes(s, plot, &xs, &ys, true);
    for (k, r) in plot.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if let Some(band) = &r.band {
            let upper: Vec<String> = r.x.iter().zip(&r.y).zip(band).map(|((x, y), b)| format!("{},{}", n(xs.map(*x)), n(ys.map(y + b)))).collect();
            let lower: Vec<String> = r.x.iter().zip(&r.y).zip(band).rev().map(|((x, y), b)| format!("{},{}", n(xs.map(*x)), n(ys.map(y - b)))).collect();
            let _ = writeln!(s, "<polygon points=\"{} {}\" fill=\"{color}\" fill-opacity=\"0.15\" stroke=\"none\"/>", upper.join(" "), lower.join(" "));
        }
        let pts: Vec<String> = r.x.iter().zip(&r.y).map(|(x, y)| format!("{},{}", n(xs.map(*x)), n(ys.map(*y)))).collect();
        let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>", pts.join(" "));
        for (x, y) in r.x.iter().zip(&r.y) {
            let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>", n(xs.map(*x)), n(ys.map(*y)));
        }
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>", LEFT + 10.0, TOP + 14.0 * (k + 1) as f64, esc(&r.name));
    }
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn bars(s: &mut String, plot: &Plot) {
    let y = &plot.series[0].y;
    let (_, hi) = bounds(y.iter().copied());
    let ys = Scale::new(0.0, hi.max(0.0), H - BOTTOM, TOP);
    let xs = Scale::new(0.0, 1.0, LEFT, W - RIGHT);
    axes(s, plot, &xs, &ys, false);
    let slot = (W - RIGHT - LEFT) / y.len() as f64;
    for (i, v) in y.iter().enumerate() {
        let x = LEFT + slot * i as f64 + slot * 0.15;
        let top = ys.map(*v);
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
            n(x),
            n(top),
            n(slot * 0.7),
            n(ys.map(0.0) - top),
            PALETTE[0]
        );
        let label = plot.categories.get(i).map_or_else(|| i.to_string(), |c| c.clone());
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", n(x + slot * 0.35), n(H - BOTTOM + 14.0), esc(&label));
    }
}

fn silhouette(s: &mut String, plot: &Plot) {
    let xs = Scale::new(-1.0, 1.0, LEFT, W - RIGHT);
    let total: usize = plot.series.iter().map(|r| r.y.len()).sum::<usize>() + 2 * plot.series.len();
    let row_h = (H - TOP - BOTTOM) / total.max(1) as f64;
    let _ = writeln!(s, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>", LEFT, H - BOTTOM, W - RIGHT, H - BOTTOM);
    for i in 0..=4 {
        let v = -1.0 + 0.5 * i as f64;
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", n(xs.map(v)), n(H - BOTTOM + 14.0), n(v));
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", W / 2.0, H - 12.0, esc(&plot.x_label));
    let mut row = 1.0;
    for (k, r) in plot.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>", LEFT - 4.0, n(TOP + row_h * (row + r.y.len() as f64 / 2.0)), esc(&r.name));
        for v in &r.y {
            let (a, b) = (xs.map(0.0), xs.map(*v));
            let _ = writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\"/>",
                n(a.min(b)),
                n(TOP + row_h * row),
                n((b - a).abs()),
                n(row_h)
            );
            row += 1.0;
        }
        row += 2.0;
    }
    if let Some(m) = plot.reference {
        let x = xs.map(m);
        let _ = writeln!(s, "<line x1=\"{}\" y1=\"{TOP}\" x2=\"{}\" y2=\"{}\" stroke=\"red\" stroke-dasharray=\"4 3\"/>", n(x), n(x), H - BOTTOM);
    }
}

fn radar(s: &mut String, plot: &Plot) {
    let (cx, cy, radius) = (W / 2.0, (H + TOP) / 2.0 - 10.0, 120.0);
    let m = plot.categories.len().max(1);
    let angle = |i: usize| -std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * i as f64 / m as f64;
    let point = |i: usize, r: f64| (cx + r * angle(i).cos(), cy + r * angle(i).sin());
    for ring in 1..=4 {
        let r = radius * ring as f64 / 4.0;
        let pts: Vec<String> = (0..m).map(|i| { let (x, y) = point(i, r); format!("{},{}", n(x), n(y)) }).collect();
        let _ = writeln!(s, "<polygon points=\"{}\" fill=\"none\" stroke=\"#cccccc\"/>", pts.join(" "));
    }
    for (i, c) in plot.categories.iter().enumerate() {
        let (x, y) = point(i, radius);
        let _ = writeln!(s, "<line x1=\"{cx}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999999\"/>", n(cy), n(x), n(y));
        let (lx, ly) = point(i, radius + 16.0);
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", n(lx), n(ly), esc(c));
    }
    for (k, r) in plot.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = r.y.iter().enumerate().map(|(i, v)| { let (x, y) = point(i, radius * v.clamp(0.0, 1.0)); format!("{},{}", n(x), n(y)) }).collect();
        let _ = writeln!(s, "<polygon points=\"{}\" fill=\"{color}\" fill-opacity=\"0.35\" stroke=\"{color}\" stroke-width=\"2\"/>", pts.join(" "));
    }
}

fn heatmap(s: &mut String, plot: &Plot) {
    let d = plot.matrix.len().max(1);
    let size = ((W - LEFT - RIGHT).min(H - TOP - BOTTOM)) / d as f64;
    let max = plot.matrix.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for (i, row) in plot.matrix.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let t = if max > 0.0 { v / max } else { 0.0 };
            let fill = if t >= 0.0 {
                let c = (255.0 * (1.0 - t)).round() as u8;
                format!("#ff{c:02x}{c:02x}")
            } else {
                let c = (255.0 * (1.0 + t)).round() as u8;
                format!("#{c:02x}{c:02x}ff")
            };
            let (x, y) = (LEFT + size * j as f64, TOP + size * i as f64);
            let _ = writeln!(s, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\" stroke=\"white\"/>", n(x), n(y), n(size), n(size));
            let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", n(x + size / 2.0), n(y + size / 2.0 + 4.0), n(*v));
        }
    }
    for (i, c) in plot.categories.iter().enumerate() {
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>", LEFT - 4.0, n(TOP + size * (i as f64 + 0.5) + 4.0), esc(c));
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", n(LEFT + size * (i as f64 + 0.5)), n(TOP + size * d as f64 + 14.0), esc(c));
    }
}
