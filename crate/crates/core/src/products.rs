//! Closed-form products of the minimal model.
//!
//! Each tuple is routed to one branch of the product table. Patterns that
//! the table leaves to the Stasheff constraints (higher `ϑ^{m-1}δ` inputs,
//! `δ` insertions around the three-term `ϑ` products) fall back to
//! homotopy transfer.

use std::fmt;

use dashmap::DashMap;

use crate::category::{BasisMorphism, LineCategory, VElement};
use crate::dr::XKey;
use crate::geometry::{classify_sequence, polygon_area, polygon_sign_degrees, Obj, Point, ReducedCycle, Shape};
use crate::hpt::{Transfer, Tuple};
use crate::scalar::{ExpScalar, Rational};
use crate::step::StepElement;

/// The row of the product table a tuple falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    /// `m_1`: zero on crossings, `d` on diagonals.
    Differential,
    /// `m_2` of two diagonal elements.
    StepProduct,
    /// `m_k`, `k ≥ 3`, of diagonal elements only.
    DiagonalHigher,
    /// `m_2` with a unit.
    UnitAction,
    /// `m_k`, `k ≥ 3`, with a unit.
    UnitHigher,
    /// Output degree does not fit the target hom space.
    DegreeMismatch,
    TypeA,
    TypeB,
    TypeC1,
    TypeC2,
    TypeC3,
    /// One `ϑ` input outside the listed types, or a guarded pattern.
    ThetaZero,
    /// Two opposite crossings with `δ`'s at their common point.
    Point,
    /// All points coincide but not in the listed point pattern.
    PointZero,
    /// Polygon with a crossing output.
    Polygon,
    /// Polygon with a diagonal output.
    ClosedPolygon,
    /// Point sequence is not a clockwise convex polygon.
    NotAdmissible,
    /// Computed by homotopy transfer.
    Transfer,
}

impl Branch {
    pub const ALL: [Branch; 18] = [
        Branch::Differential,
        Branch::StepProduct,
        Branch::DiagonalHigher,
        Branch::UnitAction,
        Branch::UnitHigher,
        Branch::DegreeMismatch,
        Branch::TypeA,
        Branch::TypeB,
        Branch::TypeC1,
        Branch::TypeC2,
        Branch::TypeC3,
        Branch::ThetaZero,
        Branch::Point,
        Branch::PointZero,
        Branch::Polygon,
        Branch::ClosedPolygon,
        Branch::NotAdmissible,
        Branch::Transfer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Branch::Differential => "differential",
            Branch::StepProduct => "step-product",
            Branch::DiagonalHigher => "diagonal-higher",
            Branch::UnitAction => "unit-action",
            Branch::UnitHigher => "unit-higher",
            Branch::DegreeMismatch => "degree-mismatch",
            Branch::TypeA => "type-a",
            Branch::TypeB => "type-b",
            Branch::TypeC1 => "type-c1",
            Branch::TypeC2 => "type-c2",
            Branch::TypeC3 => "type-c3",
            Branch::ThetaZero => "theta-zero",
            Branch::Point => "point",
            Branch::PointZero => "point-zero",
            Branch::Polygon => "polygon",
            Branch::ClosedPolygon => "closed-polygon",
            Branch::NotAdmissible => "not-admissible",
            Branch::Transfer => "transfer",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A routed tuple: the branch and, unless the branch defers to transfer,
/// the closed-form value.
#[derive(Clone, Debug)]
pub struct Dispatch {
    pub branch: Branch,
    pub value: Option<VElement>,
}

impl Dispatch {
    fn closed(branch: Branch, value: VElement) -> Self {
        Dispatch {
            branch,
            value: Some(value),
        }
    }

    fn zero(branch: Branch, a: Obj, b: Obj) -> Self {
        Dispatch::closed(branch, VElement::zero(a, b))
    }

    fn deferred() -> Self {
        Dispatch {
            branch: Branch::Transfer,
            value: None,
        }
    }
}

fn sign_scalar(sign: i32) -> Rational {
    Rational::from_integer(sign as i64)
}

/// `Σ|w_i| + 2 - k`, the degree a nonzero `m_k(w)` must have.
pub fn output_degree(cat: &LineCategory, args: &[BasisMorphism]) -> i64 {
    let total: i64 = args.iter().map(|w| cat.degree(w) as i64).sum();
    total + 2 - args.len() as i64
}

/// Degree count: the number of degree-zero elements among the inputs and
/// the closing generator must be two. Without an explicit closing
/// generator, checks that some closing generator of the right hom space
/// exists, i.e. that the output degree fits the target.
pub fn degree_precheck(cat: &LineCategory, args: &[BasisMorphism], closing: Option<&BasisMorphism>) -> bool {
    if let Some(c) = closing {
        let zeros = args
            .iter()
            .chain(std::iter::once(c))
            .filter(|w| cat.degree(w) == 0)
            .count();
        return zeros == 2;
    }
    let a = args[0].source();
    let b = args[args.len() - 1].target();
    let d = output_degree(cat, args);
    if a == b {
        d == 0 || d == 1
    } else {
        d == cat.config().morphism_degree(a, b) as i64
    }
}

/// Closed-form dispatcher for `m_k` on a composable basis tuple.
pub fn dispatch(cat: &LineCategory, args: &[BasisMorphism]) -> Dispatch {
    assert!(!args.is_empty(), "empty tuple");
    let a = args[0].source();
    let b = args[args.len() - 1].target();
    let k = args.len();

    if k == 1 {
        let value = match args[0] {
            BasisMorphism::Theta { at, with, power } => VElement::diagonal(
                at,
                StepElement::delta_times(
                    cat.crossing_key(at, with),
                    power,
                    ExpScalar::constant(Rational::from_integer(power as i64)),
                ),
            ),
            _ => VElement::zero(a, b),
        };
        return Dispatch::closed(Branch::Differential, value);
    }

    if let Some(pos) = args.iter().position(|w| matches!(w, BasisMorphism::Unit(_))) {
        if k == 2 {
            return Dispatch::closed(Branch::UnitAction, VElement::basis(cat, &args[1 - pos]));
        }
        return Dispatch::zero(Branch::UnitHigher, a, b);
    }

    if args.iter().all(BasisMorphism::is_diagonal) {
        if k == 2 {
            let x = diagonal_form(cat, &args[0]);
            let y = diagonal_form(cat, &args[1]);
            return Dispatch::closed(Branch::StepProduct, VElement::diagonal(a, x.mul(&y)));
        }
        return Dispatch::zero(Branch::DiagonalHigher, a, b);
    }

    if !degree_precheck(cat, args, None) {
        return Dispatch::zero(Branch::DegreeMismatch, a, b);
    }

    let thetas: Vec<usize> = (0..k)
        .filter(|&i| matches!(args[i], BasisMorphism::Theta { .. }))
        .collect();
    // Two `ϑ`'s leave only degree-1 crossings, whose slopes then decrease
    // along the chain, which the degree count above has already excluded.
    debug_assert!(thetas.len() <= 1);
    let crossings: Vec<usize> = (0..k).filter(|&i| !args[i].is_diagonal()).collect();
    let plain_deltas = args
        .iter()
        .all(|w| !matches!(w, BasisMorphism::Delta { power, .. } if *power > 1));

    if let Some(&t) = thetas.first() {
        return one_theta(cat, args, t, &crossings, plain_deltas);
    }
    if !plain_deltas {
        return Dispatch::deferred();
    }
    no_theta(cat, args, &crossings)
}

fn diagonal_form(cat: &LineCategory, w: &BasisMorphism) -> StepElement<XKey> {
    match *w {
        BasisMorphism::Unit(_) => StepElement::one(),
        BasisMorphism::Theta { at, with, power } => StepElement::theta(cat.crossing_key(at, with), power),
        BasisMorphism::Delta { at, with, power } => StepElement::delta(cat.crossing_key(at, with), power),
        BasisMorphism::Crossing { .. } => unreachable!("crossing is not diagonal"),
    }
}

/// `ϑ_u^n` evaluated at the crossing `v_ab` on the side of the crossing
/// generator: the jump value is `1/2^n` for a degree-0 crossing and
/// `1/(n+1)` for a degree-1 crossing.
fn theta_at_crossing(cat: &LineCategory, u: XKey, n: u32, a: Obj, b: Obj) -> Rational {
    let v = cat.crossing_key(a, b);
    if u < v {
        Rational::one()
    } else if u > v {
        Rational::zero()
    } else if cat.config().morphism_degree(a, b) == 0 {
        Rational::half_pow(n)
    } else {
        Rational::new(1, n as i64 + 1)
    }
}

fn one_theta(
    cat: &LineCategory,
    args: &[BasisMorphism],
    t: usize,
    crossings: &[usize],
    plain_deltas: bool,
) -> Dispatch {
    let a = args[0].source();
    let b = args[args.len() - 1].target();
    let k = args.len();
    let (u, n) = match args[t] {
        BasisMorphism::Theta { at, with, power } => (cat.crossing_key(at, with), power),
        _ => unreachable!(),
    };
    match crossings.len() {
        1 => {
            let c = crossings[0];
            let (branch, guarded) = if t < c {
                // δ^{k1} ϑ δ^{k2} [ab]^r δ^{k3}
                let r = cat.degree(&args[c]);
                (Branch::TypeA, (r == 0 && t > 0) || (r == 1 && c > t + 1))
            } else {
                // δ^{k1} [ab]^r δ^{k2} ϑ δ^{k3}
                let r = cat.degree(&args[c]);
                (Branch::TypeB, (r == 0 && t + 1 < k) || (r == 1 && t > c + 1))
            };
            if guarded {
                return Dispatch::zero(branch, a, b);
            }
            if k != 2 {
                return Dispatch::deferred();
            }
            let coeff = theta_at_crossing(cat, u, n, a, b);
            Dispatch::closed(branch, VElement::crossing(a, b, ExpScalar::constant(coeff)))
        }
        2 => {
            let (c1, c2) = (crossings[0], crossings[1]);
            let (x, y) = match args[c1] {
                BasisMorphism::Crossing { source, target } => (source, target),
                _ => unreachable!(),
            };
            if args[c2] != (BasisMorphism::Crossing { source: y, target: x }) {
                return Dispatch::zero(Branch::ThetaZero, a, b);
            }
            let r = cat.config().morphism_degree(x, y);
            let branch = if c1 < t && t < c2 {
                Branch::TypeC1
            } else if t < c1 && r == 1 {
                Branch::TypeC2
            } else if t > c2 && r == 0 {
                Branch::TypeC3
            } else {
                return Dispatch::zero(Branch::ThetaZero, a, b);
            };
            let guarded = match branch {
                // δ^{k1} [ab]^r δ^{k2} ϑ δ^{k3} [ba]^{1-r} δ^{k4}
                Branch::TypeC1 => (r == 0 && c2 > t + 1) || (r == 1 && t > c1 + 1),
                // δ^{k1} ϑ δ^{k2} [ab] δ^{k3} [ba] δ^{k4}
                Branch::TypeC2 => c1 > t + 1,
                // δ^{k1} [ab] δ^{k2} [ba] δ^{k3} ϑ δ^{k4}
                _ => t > c2 + 1,
            };
            if guarded {
                return Dispatch::zero(branch, a, b);
            }
            let v = cat.crossing_key(x, y);
            if k != 3 || !plain_deltas {
                return Dispatch::deferred();
            }
            if u != v {
                return Dispatch::zero(branch, a, b);
            }
            // ±(1/(n+1))·ϑ(1 - ϑ^n), negative when the output sits on the
            // line of smaller slope.
            let sign = if r == 1 { 1 } else { -1 };
            let c = Rational::new(sign, n as i64 + 1);
            let mut form = StepElement::theta_times(v, 1, ExpScalar::constant(c.clone()));
            form.add_theta(v, n + 1, &ExpScalar::constant(-&c));
            Dispatch::closed(branch, VElement::diagonal(x, form))
        }
        _ => Dispatch::zero(Branch::ThetaZero, a, b),
    }
}

/// The point an input sits at.
fn input_point(cat: &LineCategory, w: &BasisMorphism) -> Point {
    let (p, q) = w.crossing_pair().expect("no units here");
    cat.point(p, q).clone()
}

fn no_theta(cat: &LineCategory, args: &[BasisMorphism], crossings: &[usize]) -> Dispatch {
    let a = args[0].source();
    let b = args[args.len() - 1].target();
    let k = args.len();
    let mut seq: Vec<Point> = args.iter().map(|w| input_point(cat, w)).collect();
    let mut marks: Vec<usize> = (0..k).filter(|&i| cat.degree(&args[i]) == 0).collect();
    if a != b {
        seq.push(cat.point(a, b).clone());
        if cat.config().morphism_degree(b, a) == 0 {
            marks.push(k);
        }
    }
    match classify_sequence(&seq) {
        Shape::Point(_) => {
            if a != b {
                return Dispatch::zero(Branch::PointZero, a, b);
            }
            point_case(cat, args, crossings)
        }
        Shape::NotAdmissible => Dispatch::zero(Branch::NotAdmissible, a, b),
        Shape::Polygon(cycle) => polygon_case(cat, args, &cycle, &marks),
    }
}

/// `δ^{d-} [ab] δ^{d+} [ba]` and its rotation `[ba] δ^{d-} [ab] δ^{d+}`
/// with `t_a < t_b`, all `δ`'s at `v_ab`.
fn point_case(cat: &LineCategory, args: &[BasisMorphism], crossings: &[usize]) -> Dispatch {
    let a = args[0].source();
    if crossings.len() != 2 {
        return Dispatch::zero(Branch::PointZero, a, a);
    }
    let (c1, c2) = (crossings[0], crossings[1]);
    let k = args.len();
    let deg1 = cat.degree(&args[c1]);
    let (d_minus, d_plus) = if deg1 == 0 && c2 == k - 1 {
        (c1, c2 - c1 - 1)
    } else if deg1 == 1 && c1 == 0 {
        (c2 - 1, k - 1 - c2)
    } else {
        return Dispatch::zero(Branch::PointZero, a, a);
    };
    let v = match args[c1] {
        BasisMorphism::Crossing { source, target } => cat.crossing_key(source, target),
        _ => unreachable!(),
    };
    let d = (d_minus + d_plus) as u32;
    let form = point_form(v, d)
        .scale_rational(&(Rational::factorial(d_minus as u32) * Rational::factorial(d_plus as u32)).recip());
    Dispatch::closed(Branch::Point, VElement::diagonal(a, form))
}

/// `(1/2 - ϑ_v)^d·δ_v`.
fn point_form(v: XKey, d: u32) -> StepElement<XKey> {
    let mut base = StepElement::unit_times(ExpScalar::constant(Rational::new(1, 2)));
    base.add_theta(v, 1, &ExpScalar::constant(Rational::from_integer(-1)));
    let mut acc = StepElement::one();
    for _ in 0..d {
        acc = acc.mul(&base);
    }
    acc.mul(&StepElement::delta(v, 1))
}

/// The inputs sitting at one polygon vertex, in cyclic order.
struct VertexGroup {
    positions: Vec<usize>,
    /// Index into `positions` of the degree-0 element, if any.
    marked: Option<usize>,
}

impl VertexGroup {
    fn new(positions: Vec<usize>, marks: &[usize]) -> Self {
        let marked = positions.iter().position(|p| marks.contains(p));
        VertexGroup { positions, marked }
    }

    /// `d_i`: copies besides the degree-0 element.
    fn multiplicity(&self) -> u32 {
        let len = self.positions.len() as u32;
        if self.marked.is_some() {
            len - 1
        } else {
            len
        }
    }

    /// Copies before and after position `m`.
    fn split(&self, m: usize) -> (u32, u32) {
        (m as u32, (self.positions.len() - m - 1) as u32)
    }

    /// `1/D_i`: `1/(2^d d_-! d_+!)` at degree 0, `1/d!` at degree 1. At the
    /// closing vertex the closing generator splits the copies: degree 1
    /// weighs as degree 0 does, degree 0 weighs `B_d/(d_-! d_+!)`.
    fn weight(&self, closing: Option<usize>) -> Rational {
        let split_weight = |m: usize, halves: bool| {
            let (dm, dp) = self.split(m);
            let lead = if halves {
                Rational::half_pow(dm + dp)
            } else {
                Rational::bernoulli(dm + dp)
            };
            &lead / &(&Rational::factorial(dm) * &Rational::factorial(dp))
        };
        let at_close = closing.and_then(|k| self.positions.iter().position(|&p| p == k));
        match (at_close, self.marked) {
            (Some(m), Some(_)) => split_weight(m, false),
            (Some(m), None) => split_weight(m, true),
            (None, Some(m)) => split_weight(m, true),
            (None, None) => Rational::factorial(self.positions.len() as u32).recip(),
        }
    }
}

fn polygon_case(cat: &LineCategory, args: &[BasisMorphism], cycle: &ReducedCycle, marks: &[usize]) -> Dispatch {
    let a = args[0].source();
    let b = args[args.len() - 1].target();
    let k = args.len();
    let Some(pd) = polygon_sign_degrees(cycle, marks) else {
        return Dispatch::zero(Branch::NotAdmissible, a, b);
    };
    let mut groups: Vec<VertexGroup> = (0..cycle.corners().len())
        .map(|c| VertexGroup::new(cycle.corner_positions(c), marks))
        .collect();
    let closing = (a != b).then_some(k);
    let mut weight = Rational::one();
    for g in &groups {
        weight = &weight * &g.weight(closing);
    }
    let sigma = pd.sign;
    let sign_k = if k.is_multiple_of(2) { 1 } else { sigma };
    let area = polygon_area(cycle.corners());
    let c = ExpScalar::term(sign_scalar(sign_k) * weight, -&area);
    if a != b {
        return Dispatch::closed(Branch::Polygon, VElement::crossing(a, b, c));
    }
    if cycle.wraps {
        return Dispatch::deferred();
    }
    let last = groups.pop().expect("polygon has corners");
    let first = groups.swap_remove(0);
    // Copies between a degree-0 end and the rest of the chain.
    let inner_first = first.marked.map_or(0, |m| first.split(m).1);
    let inner_last = last.marked.map_or(0, |m| last.split(m).0);
    if inner_first + inner_last > 0 {
        return Dispatch::deferred();
    }
    let v1 = point_key(cat, &args[first.positions[0]]);
    let vn = point_key(cat, &args[last.positions[0]]);
    let alpha1 = end_factor(v1, -sigma, &first);
    let alphan = end_factor(vn, sigma, &last);
    let form = alpha1.mul(&alphan).scale(&c);
    Dispatch::closed(Branch::ClosedPolygon, VElement::diagonal(a, form))
}

fn point_key(cat: &LineCategory, w: &BasisMorphism) -> XKey {
    let (p, q) = w.crossing_pair().expect("no units here");
    cat.crossing_key(p, q)
}

/// `ϑ_v^{+1} = ϑ_v`, `ϑ_v^{-1} = 1 - ϑ_v`.
fn signed_theta(v: XKey, s: i32) -> StepElement<XKey> {
    if s > 0 {
        StepElement::theta(v, 1)
    } else {
        let mut e = StepElement::one();
        e.add_theta(v, 1, &ExpScalar::constant(Rational::from_integer(-1)));
        e
    }
}

/// `α_1` (with `s = -σ`) or `α_n` (with `s = σ`).
fn end_factor(v: XKey, s: i32, run: &VertexGroup) -> StepElement<XKey> {
    let d = run.multiplicity();
    let base = signed_theta(v, s);
    let mut acc = StepElement::one();
    match run.marked {
        Some(_) => {
            // ϑ^{s}·(s·2(ϑ - 1/2))^d
            let mut lin = StepElement::theta_times(v, 1, ExpScalar::constant(Rational::from_integer(2 * s as i64)));
            lin.add_unit(&ExpScalar::constant(Rational::from_integer(-s as i64)));
            for _ in 0..d {
                acc = acc.mul(&lin);
            }
            base.mul(&acc)
        }
        None => {
            for _ in 0..d {
                acc = acc.mul(&base);
            }
            acc
        }
    }
}

/// Closed-form products with transfer fallback, memoised per tuple.
pub struct Products<'c> {
    transfer: Transfer<'c>,
    memo: DashMap<Tuple, (Branch, VElement)>,
}

impl<'c> Products<'c> {
    pub fn new(cat: &'c LineCategory) -> Self {
        Products {
            transfer: Transfer::new(cat),
            memo: DashMap::new(),
        }
    }

    pub fn category(&self) -> &'c LineCategory {
        self.transfer.category()
    }

    pub fn transfer(&self) -> &Transfer<'c> {
        &self.transfer
    }

    /// `m_k(args)` and the branch that produced it.
    pub fn product_with_branch(&self, args: &[BasisMorphism]) -> (Branch, VElement) {
        if let Some(v) = self.memo.get(args) {
            return v.clone();
        }
        let d = dispatch(self.category(), args);
        let out = match d.value {
            Some(v) => (d.branch, v),
            None => (d.branch, self.transfer.product(args)),
        };
        self.memo.insert(Tuple::from_slice(args), out.clone());
        out
    }

    pub fn product(&self, args: &[BasisMorphism]) -> VElement {
        self.product_with_branch(args).1
    }

    /// Every tuple evaluated so far with its branch, sorted.
    pub fn evaluated(&self) -> Vec<(Tuple, Branch)> {
        let mut out: Vec<(Tuple, Branch)> = self.memo.iter().map(|e| (e.key().clone(), e.value().0)).collect();
        out.sort();
        out
    }
}

/// Convenience wrapper: `m_k(args)` without memoisation.
pub fn mk_closed(cat: &LineCategory, args: &[BasisMorphism]) -> VElement {
    let d = dispatch(cat, args);
    match d.value {
        Some(v) => v,
        None => Transfer::new(cat).product(args),
    }
}
