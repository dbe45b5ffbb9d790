//! Text and SVG artifacts. All numbers are formatted explicitly so reruns
//! produce identical bytes.

use std::fmt::Write as _;

/// One series on a log-scale chart.
pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub values: &'a [f64],
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 48.0;

/// Line chart of `log10(value)` against the row index. Non-positive or
/// non-finite values break the line instead of being drawn.
pub fn log_chart(title: &str, series: &[Series<'_>]) -> String {
    let logs: Vec<Vec<Option<f64>>> = series
        .iter()
        .map(|s| s.values.iter().map(|&v| (v > 0.0 && v.is_finite()).then(|| v.log10())).collect())
        .collect();
    let finite = logs.iter().flatten().flatten().copied();
    let (lo, hi) =
        finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (lo, hi) = if lo.is_finite() {
        let (lo, hi) = (lo.floor(), hi.ceil());
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, hi + 1.0)
        }
    } else {
        (0.0, 1.0)
    };
    let steps = series.iter().map(|s| s.values.len()).max().unwrap_or(0).saturating_sub(1).max(1);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |t: usize| LEFT + plot_w * t as f64 / steps as f64;
    let y = |l: f64| TOP + plot_h * (hi - l) / (hi - lo);

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // Decade gridlines, thinned to at most 12 labels.
    let decades = (hi - lo) as i64;
    let stride = (decades + 11) / 12;
    let mut d = lo as i64;
    while d <= hi as i64 {
        let yy = y(d as f64);
        let _ = writeln!(
            w,
            r##"<line x1="{LEFT:.2}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#dddddd"/>"##,
            WIDTH - RIGHT
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
            LEFT - 6.0,
            yy + 4.0
        );
        d += stride.max(1);
    }
    let tick = nice_step(steps);
    let mut t = 0;
    while t <= steps {
        let xx = x(t);
        let _ = writeln!(
            w,
            r##"<line x1="{xx:.2}" y1="{:.2}" x2="{xx:.2}" y2="{:.2}" stroke="#444444"/>"##,
            TOP + plot_h,
            TOP + plot_h + 5.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{xx:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            TOP + plot_h + 18.0
        );
        t += tick;
    }
    let _ = writeln!(
        w,
        r##"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#444444"/>"##
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );

    for (k, (s, ls)) in series.iter().zip(&logs).enumerate() {
        let mut run: Vec<String> = Vec::new();
        let flush = |run: &mut Vec<String>, w: &mut String| {
            if run.len() > 1 {
                let _ = writeln!(
                    w,
                    r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                    s.color,
                    run.join(" ")
                );
            }
            run.clear();
        };
        for (t, l) in ls.iter().enumerate() {
            match l {
                Some(l) => run.push(format!("{:.2},{:.2}", x(t), y(*l))),
                None => flush(&mut run, w),
            }
        }
        flush(&mut run, w);
        let ly = TOP + 16.0 + 16.0 * k as f64;
        let lx = WIDTH - RIGHT - 110.0;
        let _ = writeln!(
            w,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="2"/>"#,
            ly - 4.0,
            lx + 18.0,
            ly - 4.0,
            s.color
        );
        let _ = writeln!(w, r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#, lx + 24.0, escape(s.label));
    }
    out.push_str("</svg>\n");
    out
}

/// A 1-2-5 tick spacing giving at most 10 intervals.
fn nice_step(span: usize) -> usize {
    let mut base = 1;
    loop {
        for m in [1, 2, 5] {
            if span <= 10 * m * base {
                return m * base;
            }
        }
        base *= 10;
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `{:.16e}`, the precision of the metrics CSV.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn point(coords: &[f64]) -> String {
    let inner: Vec<String> = coords.iter().map(|&c| num(c)).collect();
    format!("[{}]", inner.join(", "))
}
