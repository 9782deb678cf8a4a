//! Lines `y = t·x + s`, their intersection points, and classification of
//! cyclic point sequences into points, clockwise convex polygons, or
//! neither.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::Rational;

/// Index of a line (an object of the category) within its configuration.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Obj(pub u16);

impl Obj {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("lines `{0}` and `{1}` are parallel")]
    Parallel(String, String),
    #[error("lines `{0}`, `{1}` and `{2}` meet in a single point")]
    Concurrent(String, String, String),
    #[error("duplicate line id `{0}`")]
    DuplicateId(String),
    #[error("unknown line id `{0}`")]
    UnknownId(String),
    #[error("a line needs at least one other line to intersect")]
    TooFewLines,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// The line `y = t·x + s`, graph of `df` for `f(x) = t·x²/2 + s·x`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Line {
    pub id: String,
    pub t: Rational,
    pub s: Rational,
}

impl Line {
    pub fn new(id: impl Into<String>, t: Rational, s: Rational) -> Self {
        Line { id: id.into(), t, s }
    }

    pub fn y_at(&self, x: &Rational) -> Rational {
        &(&self.t * x) + &self.s
    }

    /// The primitive `t·x²/2 + s·x`.
    pub fn primitive(&self, x: &Rational) -> Rational {
        let half = Rational::new(1, 2);
        &(&(&half * &self.t) * &(x * x)) + &(&self.s * x)
    }
}

/// A finite family of lines with pairwise distinct slopes and no three
/// through a common point.
#[derive(Clone, Debug)]
pub struct LineConfig {
    lines: Vec<Line>,
    by_id: HashMap<String, Obj>,
}

impl LineConfig {
    pub fn new(lines: Vec<Line>) -> Result<Self, GeometryError> {
        let mut by_id = HashMap::new();
        for (i, l) in lines.iter().enumerate() {
            if by_id.insert(l.id.clone(), Obj(i as u16)).is_some() {
                return Err(GeometryError::DuplicateId(l.id.clone()));
            }
        }
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                if lines[i].t == lines[j].t {
                    return Err(GeometryError::Parallel(lines[i].id.clone(), lines[j].id.clone()));
                }
            }
        }
        let cfg = LineConfig { lines, by_id };
        let n = cfg.lines.len();
        for i in 0..n {
            for j in i + 1..n {
                let p = cfg.point(Obj(i as u16), Obj(j as u16));
                for k in j + 1..n {
                    if cfg.lines[k].y_at(&p.x) == p.y {
                        return Err(GeometryError::Concurrent(
                            cfg.lines[i].id.clone(),
                            cfg.lines[j].id.clone(),
                            cfg.lines[k].id.clone(),
                        ));
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line(&self, a: Obj) -> &Line {
        &self.lines[a.index()]
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> + '_ {
        (0..self.lines.len()).map(|i| Obj(i as u16))
    }

    pub fn obj(&self, id: &str) -> Result<Obj, GeometryError> {
        self.by_id
            .get(id)
            .copied()
            .ok_or_else(|| GeometryError::UnknownId(id.to_string()))
    }

    pub fn id(&self, a: Obj) -> &str {
        &self.lines[a.index()].id
    }

    /// Intersection point `v_ab`; `a` and `b` must differ.
    pub fn point(&self, a: Obj, b: Obj) -> Point {
        let la = self.line(a);
        let lb = self.line(b);
        let x = &(&lb.s - &la.s) / &(&la.t - &lb.t);
        let y = la.y_at(&x);
        Point { x, y }
    }

    pub fn intersect(&self, a: &str, b: &str) -> Result<Point, GeometryError> {
        let (oa, ob) = (self.obj(a)?, self.obj(b)?);
        if oa == ob || self.line(oa).t == self.line(ob).t {
            return Err(GeometryError::Parallel(a.to_string(), b.to_string()));
        }
        Ok(self.point(oa, ob))
    }

    /// Degree of the transversal generator `[v_ab]`: 0 iff `t_a < t_b`.
    pub fn morphism_degree(&self, a: Obj, b: Obj) -> u8 {
        debug_assert!(a != b);
        if self.line(a).t < self.line(b).t {
            0
        } else {
            1
        }
    }

    pub fn slope_cmp(&self, a: Obj, b: Obj) -> Ordering {
        self.line(a).t.cmp(&self.line(b).t)
    }

    /// `f_ab(x) = f_a(x) - f_b(x)`.
    pub fn primitive_diff(&self, a: Obj, b: Obj, x: &Rational) -> Rational {
        &self.line(a).primitive(x) - &self.line(b).primitive(x)
    }

    /// All intersection points, ordered by line pair.
    pub fn all_points(&self) -> Vec<(Obj, Obj, Point)> {
        let mut out = Vec::new();
        for a in self.objects() {
            for b in self.objects() {
                if a < b {
                    out.push((a, b, self.point(a, b)));
                }
            }
        }
        out
    }
}

/// `(b - a) × (c - b)`: negative for a clockwise (right) turn.
pub fn turn(a: &Point, b: &Point, c: &Point) -> Rational {
    let (ux, uy) = (&b.x - &a.x, &b.y - &a.y);
    let (vx, vy) = (&c.x - &b.x, &c.y - &b.y);
    &(&ux * &vy) - &(&uy * &vx)
}

fn dot_step(a: &Point, b: &Point, c: &Point) -> Rational {
    let (ux, uy) = (&b.x - &a.x, &b.y - &a.y);
    let (vx, vy) = (&c.x - &b.x, &c.y - &b.y);
    &(&ux * &vx) + &(&uy * &vy)
}

/// A cyclic sequence with consecutive repeats collapsed into runs.
///
/// `runs[i]` covers sequence positions `start..end` (linear order). When the
/// first and last runs sit at the same point they form one polygon vertex;
/// `wraps` records this.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedCycle {
    pub vertices: Vec<Point>,
    pub runs: Vec<(usize, usize)>,
    pub wraps: bool,
}

impl ReducedCycle {
    pub fn from_sequence(seq: &[Point]) -> Self {
        let mut vertices: Vec<Point> = Vec::new();
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for (i, p) in seq.iter().enumerate() {
            match vertices.last() {
                Some(last) if last == p => runs.last_mut().unwrap().1 = i + 1,
                _ => {
                    vertices.push(p.clone());
                    runs.push((i, i + 1));
                }
            }
        }
        let wraps = vertices.len() > 1 && vertices.first() == vertices.last();
        ReducedCycle { vertices, runs, wraps }
    }

    /// Distinct polygon vertices in cyclic order.
    pub fn corners(&self) -> &[Point] {
        if self.wraps {
            &self.vertices[..self.vertices.len() - 1]
        } else {
            &self.vertices
        }
    }

    /// Run index (into `runs`) that contains sequence position `pos`.
    pub fn run_of(&self, pos: usize) -> usize {
        self.runs
            .iter()
            .position(|&(s, e)| s <= pos && pos < e)
            .expect("position inside sequence")
    }

    /// Corner index of a run (the wrapped last run maps to corner 0).
    pub fn corner_of_run(&self, run: usize) -> usize {
        if self.wraps && run == self.runs.len() - 1 {
            0
        } else {
            run
        }
    }

    /// Sequence positions belonging to a corner, in cyclic order starting
    /// from the first position after the previous corner.
    pub fn corner_positions(&self, corner: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if self.wraps && corner == 0 {
            let (s, e) = self.runs[self.runs.len() - 1];
            out.extend(s..e);
        }
        let (s, e) = self.runs[corner];
        out.extend(s..e);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    /// All entries coincide.
    Point(Point),
    /// The collapsed cycle bounds a clockwise convex polygon.
    Polygon(ReducedCycle),
    NotAdmissible,
}

/// Classifies a cyclic point sequence.
pub fn classify_sequence(seq: &[Point]) -> Shape {
    if seq.is_empty() {
        return Shape::NotAdmissible;
    }
    let cycle = ReducedCycle::from_sequence(seq);
    let corners = cycle.corners();
    if corners.len() == 1 {
        return Shape::Point(corners[0].clone());
    }
    if is_clockwise_convex(corners) {
        Shape::Polygon(cycle)
    } else {
        Shape::NotAdmissible
    }
}

/// Every interior angle lies in `(0, π]` and the boundary winds once
/// clockwise: each corner lies on or to the right of every edge line.
pub fn is_clockwise_convex(corners: &[Point]) -> bool {
    let n = corners.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let prev = &corners[(i + n - 1) % n];
        let cur = &corners[i];
        let next = &corners[(i + 1) % n];
        let c = turn(prev, cur, next);
        if c.is_positive() || (c.is_zero() && !dot_step(prev, cur, next).is_positive()) {
            return false;
        }
    }
    let mut strict_turn = false;
    for i in 0..n {
        let a = &corners[i];
        let b = &corners[(i + 1) % n];
        for (j, p) in corners.iter().enumerate() {
            if j == i || j == (i + 1) % n {
                continue;
            }
            let c = turn(a, b, p);
            if c.is_positive() {
                return false;
            }
            if c.is_negative() {
                strict_turn = true;
            }
        }
    }
    strict_turn
}

/// Enclosed area by the shoelace formula.
pub fn polygon_area(corners: &[Point]) -> Rational {
    let n = corners.len();
    let mut twice = Rational::zero();
    for i in 0..n {
        let p = &corners[i];
        let q = &corners[(i + 1) % n];
        twice += &(&(&p.x * &q.y) - &(&q.x * &p.y));
    }
    (&twice * &Rational::new(1, 2)).abs()
}

/// Positional degrees and sign of a polygon: corners at the minimal and
/// maximal x get degree 0, the rest degree 1. `marks` lists the sequence
/// positions of degree-0 elements; it must hit exactly those two corners
/// (one mark each). The sign is `-1` when the leftmost mark's run index is
/// smaller than the rightmost mark's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonDegrees {
    pub degrees: Vec<u8>,
    pub sign: i32,
    pub left_run: usize,
    pub right_run: usize,
}

pub fn polygon_sign_degrees(cycle: &ReducedCycle, marks: &[usize]) -> Option<PolygonDegrees> {
    let corners = cycle.corners();
    let n = corners.len();
    let min_x = corners.iter().map(|p| &p.x).min()?;
    let max_x = corners.iter().map(|p| &p.x).max()?;
    if min_x == max_x || marks.len() != 2 {
        return None;
    }
    let mut left = None;
    let mut right = None;
    for &m in marks {
        let run = cycle.run_of(m);
        let corner = cycle.corner_of_run(run);
        let x = &corners[corner].x;
        if x == min_x && left.is_none() {
            left = Some((corner, run));
        } else if x == max_x && right.is_none() {
            right = Some((corner, run));
        } else {
            return None;
        }
    }
    let (lc, lr) = left?;
    let (rc, rr) = right?;
    // Every corner at an extreme x must be one of the marked ones.
    for (i, p) in corners.iter().enumerate() {
        if (&p.x == min_x && i != lc) || (&p.x == max_x && i != rc) {
            return None;
        }
    }
    let mut degrees = vec![1u8; n];
    degrees[lc] = 0;
    degrees[rc] = 0;
    Some(PolygonDegrees {
        degrees,
        sign: if lr < rr { -1 } else { 1 },
        left_run: lr,
        right_run: rr,
    })
}
