//! SVG figures: the lines, their intersection points with degrees, an
//! optional selected polygon with its area and an optional tree overlay.

use std::fmt::Write;

use lagrangian_ainf::geometry::{classify_sequence, polygon_area, LineConfig, Obj, Point, Shape};
use lagrangian_ainf::scalar::Rational;

const WIDTH: f64 = 640.0;
const PAD: f64 = 24.0;

/// What to draw on top of the lines.
#[derive(Clone, Debug, Default)]
pub struct Selection {
    /// Cyclic sequence of line ids; the polygon corners are the points of
    /// consecutive lines, closing with the last and first.
    pub polygon: Vec<Obj>,
    pub tree: bool,
}

/// A rendered figure. `admissible` is false when a selected polygon is not
/// clockwise convex; the figure then carries a diagnostic instead.
pub struct Figure {
    pub svg: String,
    pub admissible: bool,
}

struct Frame {
    x0: f64,
    y0: f64,
    y1: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(points: &[Point]) -> Frame {
        let xs: Vec<f64> = points.iter().map(|p| p.x.to_f64()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.y.to_f64()).collect();
        let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mut x0, mut x1, mut y0, mut y1) = (lo(&xs), hi(&xs), lo(&ys), hi(&ys));
        let margin = ((x1 - x0).max(y1 - y0) * 0.15).max(1.0);
        x0 -= margin;
        x1 += margin;
        y0 -= margin;
        y1 += margin;
        let scale = (WIDTH - 2.0 * PAD) / (x1 - x0);
        Frame {
            x0,
            y0,
            y1,
            scale,
            height: (y1 - y0) * scale + 2.0 * PAD,
        }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) * self.scale
    }

    fn py(&self, y: f64) -> f64 {
        PAD + (self.y1 - y) * self.scale
    }

    fn left(&self) -> f64 {
        self.x0
    }

    fn right(&self) -> f64 {
        self.x0 + (WIDTH - 2.0 * PAD) / self.scale
    }

    /// The x-range where `y = t x + s` stays inside the frame.
    fn clip(&self, t: f64, s: f64) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (self.left(), self.right());
        if t != 0.0 {
            let (a, b) = ((self.y0 - s) / t, (self.y1 - s) / t);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        } else if s < self.y0 || s > self.y1 {
            return None;
        }
        (lo < hi).then_some((lo, hi))
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render(cfg: &LineConfig, sel: &Selection) -> Figure {
    let points = cfg.all_points();
    let corners_all: Vec<Point> = points.iter().map(|(_, _, p)| p.clone()).collect();
    let frame = Frame::new(&corners_all);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(WIDTH),
        num(frame.height),
        num(WIDTH),
        num(frame.height)
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let mut admissible = true;
    let mut overlay = String::new();
    let mut notes: Vec<String> = Vec::new();
    if !sel.polygon.is_empty() {
        let k = sel.polygon.len();
        let ids: Vec<&str> = sel.polygon.iter().map(|&a| cfg.id(a)).collect();
        let corners: Vec<Point> = (0..k)
            .map(|i| cfg.point(sel.polygon[i], sel.polygon[(i + 1) % k]))
            .collect();
        let distinct = {
            let mut s = corners.clone();
            s.sort_by(|p, q| (&p.x, &p.y).cmp(&(&q.x, &q.y)));
            s.dedup();
            s.len() == corners.len()
        };
        let cc = k >= 3 && distinct && matches!(classify_sequence(&corners), Shape::Polygon(_));
        if cc {
            let area = polygon_area(&corners);
            let pts: Vec<String> = corners
                .iter()
                .map(|p| format!("{},{}", num(frame.px(p.x.to_f64())), num(frame.py(p.y.to_f64()))))
                .collect();
            let _ = writeln!(
                overlay,
                r##"<polygon class="cc-polygon" points="{}" fill="#9ecae1" fill-opacity="0.5" stroke="#08519c"/>"##,
                pts.join(" ")
            );
            let n = Rational::from_integer(k as i64);
            let cx = corners.iter().fold(Rational::zero(), |acc, p| &acc + &p.x) / n.clone();
            let cy = corners.iter().fold(Rational::zero(), |acc, p| &acc + &p.y) / n;
            let _ = writeln!(
                overlay,
                r#"<text class="area" x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
                num(frame.px(cx.to_f64())),
                num(frame.py(cy.to_f64())),
                area
            );
            notes.push(format!("polygon {} area {}", ids.join(" "), area));
            if sel.tree {
                match tree(&frame, &corners) {
                    Ok(t) => overlay.push_str(&t),
                    Err(why) => notes.push(format!("no tree: {why}")),
                }
            }
        } else {
            admissible = false;
            notes.push(format!("{} is not a clockwise convex polygon", ids.join(" ")));
        }
    }

    for l in cfg.lines() {
        let (t, c) = (l.t.to_f64(), l.s.to_f64());
        let Some((xa, xb)) = frame.clip(t, c) else {
            continue;
        };
        let y = |x: f64| t * x + c;
        let _ = writeln!(
            out,
            r##"<line class="line" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#444" stroke-width="1"/>"##,
            num(frame.px(xa)),
            num(frame.py(y(xa))),
            num(frame.px(xb)),
            num(frame.py(y(xb)))
        );
        let _ = writeln!(
            out,
            r#"<text class="line-id" x="{}" y="{}" font-size="12">{}</text>"#,
            num(frame.px(xb) - 14.0),
            num(frame.py(y(xb)) + if t > 0.0 { 14.0 } else { -4.0 }),
            escape(&l.id)
        );
    }
    out.push_str(&overlay);
    for (a, b, p) in &points {
        let (x, y) = (frame.px(p.x.to_f64()), frame.py(p.y.to_f64()));
        let _ = writeln!(
            out,
            r#"<circle class="point" cx="{}" cy="{}" r="3" fill="black"/>"#,
            num(x),
            num(y)
        );
        let _ = writeln!(
            out,
            r#"<text class="point-label" x="{}" y="{}" font-size="10">v_{}{} [{},{}]:{} [{},{}]:{}</text>"#,
            num(x + 5.0),
            num(y - 5.0),
            escape(cfg.id(*a)),
            escape(cfg.id(*b)),
            escape(cfg.id(*a)),
            escape(cfg.id(*b)),
            cfg.morphism_degree(*a, *b),
            escape(cfg.id(*b)),
            escape(cfg.id(*a)),
            cfg.morphism_degree(*b, *a)
        );
    }
    for (i, n) in notes.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text class="note" x="{}" y="{}" font-size="12">{}</text>"#,
            num(PAD),
            num(PAD + 14.0 * i as f64),
            escape(n)
        );
    }
    out.push_str("</svg>\n");
    Figure { svg: out, admissible }
}

/// Tree of a clockwise convex polygon: a spine joining the two corners of
/// extreme x, a vertical edge from every other corner to the spine, and the
/// edge of the last corner (the output point) drawn as the root.
fn tree(frame: &Frame, corners: &[Point]) -> Result<String, String> {
    let k = corners.len();
    let lo = (0..k).min_by(|&i, &j| corners[i].x.cmp(&corners[j].x)).unwrap();
    let hi = (0..k).max_by(|&i, &j| corners[i].x.cmp(&corners[j].x)).unwrap();
    if (0..k).any(|i| i != lo && corners[i].x == corners[lo].x)
        || (0..k).any(|i| i != hi && corners[i].x == corners[hi].x)
    {
        return Err("two corners share an extreme x".into());
    }
    let (p, q) = (&corners[lo], &corners[hi]);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"<line class="spine" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#d94801" stroke-width="2"/>"##,
        num(frame.px(p.x.to_f64())),
        num(frame.py(p.y.to_f64())),
        num(frame.px(q.x.to_f64())),
        num(frame.py(q.y.to_f64()))
    );
    let root = k - 1;
    for (i, c) in corners.iter().enumerate() {
        if i == lo || i == hi {
            continue;
        }
        let t = (&c.x - &p.x) / (&q.x - &p.x);
        let foot = &p.y + &(&t * &(&q.y - &p.y));
        let (class, width) = if i == root { ("root", 3) } else { ("leaf", 2) };
        let _ = writeln!(
            out,
            r##"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#d94801" stroke-width="{width}"/>"##,
            num(frame.px(c.x.to_f64())),
            num(frame.py(c.y.to_f64())),
            num(frame.px(c.x.to_f64())),
            num(frame.py(foot.to_f64()))
        );
    }
    if root == lo || root == hi {
        let c = &corners[root];
        let _ = writeln!(
            out,
            r##"<circle class="root" cx="{}" cy="{}" r="6" fill="none" stroke="#d94801" stroke-width="2"/>"##,
            num(frame.px(c.x.to_f64())),
            num(frame.py(c.y.to_f64()))
        );
    }
    Ok(out)
}
