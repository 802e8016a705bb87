//! Minimal SVG scatter/line plots for the diagnostic graphs: polylines,
//! axes with ticks, reference lines and point markers. No plotting stack,
//! just enough to look at a trajectory.

use std::fmt::Write as _;

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

const SERIES_COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

pub struct SvgPlot {
    width: f64,
    height: f64,
    title: String,
    x_label: String,
    y_label: String,
    series: Vec<(String, Vec<(f64, f64)>)>,
    /// Straight reference lines given as (slope, intercept, dashed label).
    lines: Vec<(f64, f64, String)>,
    markers: Vec<(f64, f64, String)>,
}

impl SvgPlot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            width: 640.0,
            height: 480.0,
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            series: Vec::new(),
            lines: Vec::new(),
            markers: Vec::new(),
        }
    }

    pub fn add_series(&mut self, label: &str, points: Vec<(f64, f64)>) {
        self.series.push((label.to_string(), points));
    }

    pub fn add_line(&mut self, slope: f64, intercept: f64, label: &str) {
        self.lines.push((slope, intercept, label.to_string()));
    }

    pub fn add_marker(&mut self, x: f64, y: f64, label: &str) {
        self.markers.push((x, y, label.to_string()));
    }

    fn data_bounds(&self) -> (f64, f64, f64, f64) {
        let mut x_max = f64::MIN_POSITIVE;
        let mut y_max = f64::MIN_POSITIVE;
        for (_, pts) in &self.series {
            for &(x, y) in pts {
                x_max = x_max.max(x);
                y_max = y_max.max(y);
            }
        }
        for &(x, y, _) in &self.markers {
            x_max = x_max.max(x);
            y_max = y_max.max(y);
        }
        // origin-anchored frame with a little headroom
        (0.0, x_max * 1.05, 0.0, y_max * 1.05)
    }

    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = self.data_bounds();
        let plot_w = self.width - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = self.height - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64| MARGIN_TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            self.width, self.height, self.width, self.height
        );
        let _ = writeln!(
            s,
            r#"<rect width="{}" height="{}" fill="white"/>"#,
            self.width, self.height
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15" font-family="sans-serif">{}</text>"#,
            self.width / 2.0,
            self.title
        );

        // frame
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );

        // ticks (5 per axis)
        for i in 0..=5 {
            let fx = x0 + (x1 - x0) * i as f64 / 5.0;
            let fy = y0 + (y1 - y0) * i as f64 / 5.0;
            let px = sx(fx);
            let py = sy(fy);
            let _ = writeln!(
                s,
                r#"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="black"/>"#,
                MARGIN_TOP + plot_h,
                MARGIN_TOP + plot_h + 5.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{px}" y="{}" text-anchor="middle" font-size="11" font-family="sans-serif">{fx:.3}</text>"#,
                MARGIN_TOP + plot_h + 18.0
            );
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{py}" x2="{MARGIN_LEFT}" y2="{py}" stroke="black"/>"#,
                MARGIN_LEFT - 5.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end" font-size="11" font-family="sans-serif">{fy:.3}</text>"#,
                MARGIN_LEFT - 8.0,
                py + 4.0
            );
        }

        // axis labels
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="13" font-family="sans-serif">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            self.height - 12.0,
            self.x_label
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" font-size="13" font-family="sans-serif" transform="rotate(-90 16 {})">{}</text>"#,
            MARGIN_TOP + plot_h / 2.0,
            MARGIN_TOP + plot_h / 2.0,
            self.y_label
        );

        // reference lines, clipped to the frame
        for (slope, intercept, label) in &self.lines {
            let mut xa = x0;
            let mut xb = x1;
            let clip = |x: f64| slope * x + intercept;
            if *slope > 0.0 && clip(x1) > y1 {
                xb = (y1 - intercept) / slope;
            }
            if *slope > 0.0 && clip(x0) < y0 {
                xa = (y0 - intercept) / slope;
            }
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="6,4"/>"#,
                sx(xa),
                sy(clip(xa)),
                sx(xb),
                sy(clip(xb))
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="11" fill="gray" font-family="sans-serif">{}</text>"#,
                sx(xb) - 40.0,
                sy(clip(xb)) - 6.0,
                label
            );
        }

        // data polylines + legend
        for (i, (label, pts)) in self.series.iter().enumerate() {
            if pts.is_empty() {
                continue;
            }
            let color = SERIES_COLORS[i % SERIES_COLORS.len()];
            let mut path = String::new();
            for &(x, y) in pts {
                let _ = write!(path, "{:.2},{:.2} ", sx(x), sy(y));
            }
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#,
                path.trim_end()
            );
            let ly = MARGIN_TOP + 14.0 + 16.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
                MARGIN_LEFT + 10.0,
                MARGIN_LEFT + 34.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="11" font-family="sans-serif">{label}</text>"#,
                MARGIN_LEFT + 40.0,
                ly + 4.0
            );
        }

        for (x, y, label) in &self.markers {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="black"/>"#,
                sx(*x),
                sy(*y)
            );
            if !label.is_empty() {
                let _ = writeln!(
                    s,
                    r#"<text x="{:.2}" y="{:.2}" font-size="11" font-family="sans-serif">{label}</text>"#,
                    sx(*x) + 6.0,
                    sy(*y) - 6.0
                );
            }
        }

        s.push_str("</svg>\n");
        s
    }
}
