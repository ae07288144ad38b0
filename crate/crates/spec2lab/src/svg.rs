//! Minimal SVG scatter of a second-order spectrum over `Q(Σ)`.

use std::fmt::Write;

use num_complex::Complex64;

use crate::spectra::{IntervalUnion, QRegion};

pub struct Plot<'a> {
    pub sigma: &'a IntervalUnion,
    /// Drawn as filled dots.
    pub spectrum: &'a [Complex64],
    /// Drawn as open circles.
    pub target: &'a [Complex64],
    pub title: &'a str,
}

const WIDTH: f64 = 720.0;

impl Plot<'_> {
    pub fn render(&self) -> String {
        let q = QRegion::new(self.sigma);
        let pad = 0.08 * q.diameter();
        let (x0, x1) = (self.sigma.min() - pad, self.sigma.max() + pad);
        let (y0, y1) = (-q.outer.radius - pad, q.outer.radius + pad);
        let scale = WIDTH / (x1 - x0);
        let height = (y1 - y0) * scale;
        let px = |x: f64| (x - x0) * scale;
        let py = |y: f64| (y1 - y) * scale;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r##"<title>{}</title>"##, escape(self.title));
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="#eef3fb" stroke="#4a6fa5"/>"##,
            px(q.outer.center),
            py(0.0),
            q.outer.radius * scale
        );
        for g in &q.gaps {
            let _ = writeln!(
                s,
                r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="white" stroke="#4a6fa5" stroke-dasharray="4 3"/>"##,
                px(g.center),
                py(0.0),
                g.radius * scale
            );
        }
        let _ = writeln!(s, r##"<line x1="0" y1="{0:.2}" x2="{WIDTH:.0}" y2="{0:.2}" stroke="#bbbbbb"/>"##, py(0.0));
        for &(a, b) in self.sigma.intervals() {
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{2:.2}" x2="{:.2}" y2="{2:.2}" stroke="#222222" stroke-width="4"/>"##,
                px(a),
                px(b),
                py(0.0)
            );
        }
        for z in self.target {
            let _ = writeln!(
                s,
                r##"<circle cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="#d0504a" stroke-width="1.5"/>"##,
                px(z.re),
                py(z.im)
            );
        }
        for z in self.spectrum {
            let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="2.2" fill="#1b1b1b"/>"##, px(z.re), py(z.im));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
