//! The minimal model: basis morphisms between lines, linear combinations of
//! them, and their text literals.
//!
//! Between distinct lines `a`, `b` the hom space is spanned by the single
//! intersection generator `[a,b]`. The endomorphisms of `a` are step forms
//! supported at the intersection points of `a` with the other lines.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::dr::{Frame, IndexedFrame, XKey};
use crate::geometry::{GeometryError, LineConfig, Obj, Point};
use crate::scalar::{split_signed_terms, ExpScalar};
use crate::step::{delta_literal, render_linear_combination, split_coefficient, Monomial, StepElement, StepError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiteralError {
    #[error("malformed morphism literal `{0}`")]
    Malformed(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("`{0}` needs distinct lines")]
    SameLine(String),
    #[error("point of `{0}` does not lie on its line")]
    PointNotOnLine(String),
    #[error("terms of `{0}` live in different hom spaces")]
    MixedHoms(String),
    #[error("morphisms {0} and {1} are not composable")]
    NotComposable(String, String),
    #[error("empty argument list")]
    Empty,
}

/// A basis element of the minimal model.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BasisMorphism {
    /// `[v_ab] ∈ hom(a, b)`.
    Crossing { source: Obj, target: Obj },
    /// The unit `1_a`.
    Unit(Obj),
    /// `ϑ^n` at `v_{at,with}`, an endomorphism of `at`.
    Theta { at: Obj, with: Obj, power: u32 },
    /// `ϑ^{n-1}δ` at `v_{at,with}`, an endomorphism of `at`.
    Delta { at: Obj, with: Obj, power: u32 },
}

impl BasisMorphism {
    pub fn source(&self) -> Obj {
        match *self {
            BasisMorphism::Crossing { source, .. } => source,
            BasisMorphism::Unit(a) => a,
            BasisMorphism::Theta { at, .. } | BasisMorphism::Delta { at, .. } => at,
        }
    }

    pub fn target(&self) -> Obj {
        match *self {
            BasisMorphism::Crossing { target, .. } => target,
            BasisMorphism::Unit(a) => a,
            BasisMorphism::Theta { at, .. } | BasisMorphism::Delta { at, .. } => at,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        !matches!(self, BasisMorphism::Crossing { .. })
    }

    /// The intersection point it sits at, as an unordered line pair.
    pub fn crossing_pair(&self) -> Option<(Obj, Obj)> {
        match *self {
            BasisMorphism::Crossing { source, target } => Some((source, target)),
            BasisMorphism::Unit(_) => None,
            BasisMorphism::Theta { at, with, .. } | BasisMorphism::Delta { at, with, .. } => Some((at, with)),
        }
    }
}

/// A configuration together with the tables the algebraic layers share.
#[derive(Clone, Debug)]
pub struct LineCategory {
    cfg: LineConfig,
    frame: IndexedFrame,
    on_line: Vec<BTreeMap<XKey, Obj>>,
    points: Vec<Option<Point>>,
}

impl LineCategory {
    pub fn new(cfg: LineConfig) -> Self {
        let frame = IndexedFrame::new(&cfg);
        let n = cfg.len();
        let mut on_line = vec![BTreeMap::new(); n];
        let mut points = vec![None; n * n];
        for a in cfg.objects() {
            for b in cfg.objects() {
                if a != b {
                    on_line[a.index()].insert(frame.crossing(a, b), b);
                    points[a.index() * n + b.index()] = Some(cfg.point(a, b));
                }
            }
        }
        LineCategory {
            cfg,
            frame,
            on_line,
            points,
        }
    }

    pub fn config(&self) -> &LineConfig {
        &self.cfg
    }

    pub fn frame(&self) -> &IndexedFrame {
        &self.frame
    }

    pub fn len(&self) -> usize {
        self.cfg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cfg.is_empty()
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> + '_ {
        self.cfg.objects()
    }

    pub fn point(&self, a: Obj, b: Obj) -> &Point {
        self.points[a.index() * self.cfg.len() + b.index()]
            .as_ref()
            .expect("distinct lines")
    }

    pub fn crossing_key(&self, a: Obj, b: Obj) -> XKey {
        self.frame.crossing(a, b)
    }

    /// The line `b` with `v_ab` at the point `key`, if any.
    pub fn partner_at(&self, a: Obj, key: XKey) -> Option<Obj> {
        self.on_line[a.index()].get(&key).copied()
    }

    /// Intersection points on `a` in ascending x, with the other line.
    pub fn points_on(&self, a: Obj) -> impl Iterator<Item = (XKey, Obj)> + '_ {
        self.on_line[a.index()].iter().map(|(k, b)| (*k, *b))
    }

    pub fn degree(&self, m: &BasisMorphism) -> u8 {
        match *m {
            BasisMorphism::Crossing { source, target } => self.cfg.morphism_degree(source, target),
            BasisMorphism::Unit(_) | BasisMorphism::Theta { .. } => 0,
            BasisMorphism::Delta { .. } => 1,
        }
    }

    pub fn id(&self, a: Obj) -> &str {
        self.cfg.id(a)
    }

    /// Every basis morphism with diagonal powers up to `max_power`.
    pub fn alphabet(&self, max_power: u32) -> Vec<BasisMorphism> {
        let mut out = Vec::new();
        for a in self.objects() {
            out.push(BasisMorphism::Unit(a));
            for (_, b) in self.points_on(a) {
                for power in 1..=max_power {
                    out.push(BasisMorphism::Theta { at: a, with: b, power });
                    out.push(BasisMorphism::Delta { at: a, with: b, power });
                }
            }
            for b in self.objects() {
                if a != b {
                    out.push(BasisMorphism::Crossing { source: a, target: b });
                }
            }
        }
        out
    }

    pub fn render_basis(&self, m: &BasisMorphism) -> String {
        match *m {
            BasisMorphism::Crossing { source, target } => {
                format!("[{},{}]", self.id(source), self.id(target))
            }
            BasisMorphism::Unit(a) => format!("one@{}", self.id(a)),
            BasisMorphism::Theta { at, with, power } => {
                let pt = format!("{},{}", self.id(at), self.id(with));
                format!("{}@{}", crate::step::theta_literal(&pt, power), self.id(at))
            }
            BasisMorphism::Delta { at, with, power } => {
                let pt = format!("{},{}", self.id(at), self.id(with));
                format!("{}@{}", delta_literal(&pt, power), self.id(at))
            }
        }
    }

    pub fn render_tuple(&self, args: &[BasisMorphism]) -> String {
        args.iter().map(|m| self.render_basis(m)).collect::<Vec<_>>().join(" ")
    }

    fn point_on(&self, text: &str, at: Obj, pair: &str) -> Result<Obj, LiteralError> {
        let (x, y) = pair
            .split_once(',')
            .ok_or_else(|| LiteralError::Malformed(text.to_string()))?;
        let (x, y) = (self.cfg.obj(x.trim())?, self.cfg.obj(y.trim())?);
        if x == y {
            return Err(LiteralError::SameLine(text.to_string()));
        }
        if x == at {
            Ok(y)
        } else if y == at {
            Ok(x)
        } else {
            Err(LiteralError::PointNotOnLine(text.to_string()))
        }
    }

    /// Parses one basis literal: `[a,b]`, `one@a`, `th(a,b)^n@a`,
    /// `dl(a,b)@a` or `th(a,b)^k*dl(a,b)@a`.
    pub fn parse_basis(&self, text: &str) -> Result<BasisMorphism, LiteralError> {
        let t = text.trim();
        if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| LiteralError::Malformed(text.to_string()))?;
            let (a, b) = (self.cfg.obj(a.trim())?, self.cfg.obj(b.trim())?);
            if a == b {
                return Err(LiteralError::SameLine(text.to_string()));
            }
            return Ok(BasisMorphism::Crossing { source: a, target: b });
        }
        let (c, mono, suffix) = split_coefficient(t).map_err(|_| LiteralError::Malformed(text.to_string()))?;
        if !c.is_one() || suffix.is_empty() {
            return Err(LiteralError::Malformed(text.to_string()));
        }
        self.basis_from_monomial(text, &mono, &suffix)
    }

    fn basis_from_monomial(&self, text: &str, mono: &Monomial, at: &str) -> Result<BasisMorphism, LiteralError> {
        let at = self.cfg.obj(at)?;
        Ok(match mono {
            Monomial::One => BasisMorphism::Unit(at),
            Monomial::Theta(p, n) => BasisMorphism::Theta {
                at,
                with: self.point_on(text, at, p)?,
                power: *n,
            },
            Monomial::Delta(p, n) => BasisMorphism::Delta {
                at,
                with: self.point_on(text, at, p)?,
                power: *n,
            },
        })
    }

    /// Parses a linear combination of basis literals of one hom space,
    /// e.g. `exp(-1)*[a,c]` or `th(a,b)@a - 1/2*dl(a,c)@a`.
    pub fn parse_element(&self, text: &str) -> Result<VElement, LiteralError> {
        let t = text.trim();
        let mut acc: Option<VElement> = None;
        for (neg, term) in split_signed_terms(t) {
            let (coeff, basis) = match term.rfind('[') {
                Some(i) if term.ends_with(']') => {
                    let head = term[..i].trim();
                    let coeff = match head.strip_suffix('*') {
                        Some(c) => {
                            let c = c.trim();
                            let c = c.strip_prefix('(').and_then(|c| c.strip_suffix(')')).unwrap_or(c);
                            ExpScalar::parse(c).map_err(|_| LiteralError::Malformed(term.clone()))?
                        }
                        None if head.is_empty() => ExpScalar::one(),
                        None => return Err(LiteralError::Malformed(term.clone())),
                    };
                    (coeff, self.parse_basis(&term[i..])?)
                }
                _ => {
                    let (c, mono, suffix) =
                        split_coefficient(&term).map_err(|_| LiteralError::Malformed(term.clone()))?;
                    if suffix.is_empty() {
                        return Err(LiteralError::Malformed(term.clone()));
                    }
                    (c, self.basis_from_monomial(&term, &mono, &suffix)?)
                }
            };
            let coeff = if neg { coeff.negate() } else { coeff };
            let piece = VElement::basis(self, &basis).scale(&coeff);
            match &mut acc {
                None => acc = Some(piece),
                Some(v) => {
                    if (v.source, v.target) != (piece.source, piece.target) {
                        return Err(LiteralError::MixedHoms(text.to_string()));
                    }
                    v.add_assign(&piece);
                }
            }
        }
        acc.ok_or_else(|| LiteralError::Malformed(text.to_string()))
    }

    /// Parses a composable sequence of basis literals.
    pub fn parse_tuple<S: AsRef<str>>(&self, items: &[S]) -> Result<Vec<BasisMorphism>, LiteralError> {
        if items.is_empty() {
            return Err(LiteralError::Empty);
        }
        let args: Vec<BasisMorphism> = items
            .iter()
            .map(|s| self.parse_basis(s.as_ref()))
            .collect::<Result<_, _>>()?;
        for w in args.windows(2) {
            if w[0].target() != w[1].source() {
                return Err(LiteralError::NotComposable(
                    self.render_basis(&w[0]),
                    self.render_basis(&w[1]),
                ));
            }
        }
        Ok(args)
    }
}

/// A linear combination in one hom space of the minimal model.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VElement {
    pub source: Obj,
    pub target: Obj,
    value: VValue,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum VValue {
    Crossing(ExpScalar),
    Diagonal(StepElement<XKey>),
}

impl VElement {
    pub fn zero(source: Obj, target: Obj) -> Self {
        let value = if source == target {
            VValue::Diagonal(StepElement::zero())
        } else {
            VValue::Crossing(ExpScalar::zero())
        };
        VElement { source, target, value }
    }

    pub fn crossing(source: Obj, target: Obj, c: ExpScalar) -> Self {
        assert!(source != target);
        VElement {
            source,
            target,
            value: VValue::Crossing(c),
        }
    }

    pub fn diagonal(at: Obj, form: StepElement<XKey>) -> Self {
        VElement {
            source: at,
            target: at,
            value: VValue::Diagonal(form),
        }
    }

    pub fn basis(cat: &LineCategory, m: &BasisMorphism) -> Self {
        match *m {
            BasisMorphism::Crossing { source, target } => VElement::crossing(source, target, ExpScalar::one()),
            BasisMorphism::Unit(a) => VElement::diagonal(a, StepElement::one()),
            BasisMorphism::Theta { at, with, power } => {
                VElement::diagonal(at, StepElement::theta(cat.crossing_key(at, with), power))
            }
            BasisMorphism::Delta { at, with, power } => {
                VElement::diagonal(at, StepElement::delta(cat.crossing_key(at, with), power))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            VValue::Crossing(c) => c.is_zero(),
            VValue::Diagonal(f) => f.is_zero(),
        }
    }

    pub fn crossing_coeff(&self) -> Option<&ExpScalar> {
        match &self.value {
            VValue::Crossing(c) => Some(c),
            VValue::Diagonal(_) => None,
        }
    }

    pub fn form(&self) -> Option<&StepElement<XKey>> {
        match &self.value {
            VValue::Crossing(_) => None,
            VValue::Diagonal(f) => Some(f),
        }
    }

    pub fn scale(&self, c: &ExpScalar) -> Self {
        let value = match &self.value {
            VValue::Crossing(x) => VValue::Crossing(x.mul_ref(c)),
            VValue::Diagonal(f) => VValue::Diagonal(f.scale(c)),
        };
        VElement { value, ..*self }
    }

    pub fn neg(&self) -> Self {
        self.scale(&ExpScalar::constant(crate::scalar::Rational::from_integer(-1)))
    }

    pub fn add_assign(&mut self, rhs: &VElement) {
        assert_eq!(
            (self.source, self.target),
            (rhs.source, rhs.target),
            "hom spaces differ"
        );
        match (&mut self.value, &rhs.value) {
            (VValue::Crossing(x), VValue::Crossing(y)) => x.add_assign_ref(y),
            (VValue::Diagonal(x), VValue::Diagonal(y)) => x.add_assign(y),
            _ => unreachable!("matching hom spaces share a representation"),
        }
    }

    pub fn add(&self, rhs: &VElement) -> VElement {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }

    pub fn sub(&self, rhs: &VElement) -> VElement {
        self.add(&rhs.neg())
    }

    /// Homogeneous degree, if nonzero and homogeneous.
    pub fn degree(&self, cat: &LineCategory) -> Option<u8> {
        match &self.value {
            VValue::Crossing(c) if !c.is_zero() => Some(cat.config().morphism_degree(self.source, self.target)),
            VValue::Crossing(_) => None,
            VValue::Diagonal(f) => f.degree(),
        }
    }

    /// Expansion in basis morphisms. Fails if a diagonal term sits at a
    /// point that is not an intersection point of its line.
    pub fn terms(&self, cat: &LineCategory) -> Result<Vec<(BasisMorphism, ExpScalar)>, XKey> {
        let mut out = Vec::new();
        match &self.value {
            VValue::Crossing(c) => {
                if !c.is_zero() {
                    out.push((
                        BasisMorphism::Crossing {
                            source: self.source,
                            target: self.target,
                        },
                        c.clone(),
                    ));
                }
            }
            VValue::Diagonal(f) => {
                let at = self.source;
                if !f.unit_coeff().is_zero() {
                    out.push((BasisMorphism::Unit(at), f.unit_coeff().clone()));
                }
                for (k, power, c) in f.theta_terms() {
                    let with = cat.partner_at(at, *k).ok_or(*k)?;
                    out.push((BasisMorphism::Theta { at, with, power }, c.clone()));
                }
                for (k, power, c) in f.delta_terms() {
                    let with = cat.partner_at(at, *k).ok_or(*k)?;
                    out.push((BasisMorphism::Delta { at, with, power }, c.clone()));
                }
            }
        }
        Ok(out)
    }

    /// Canonical text, e.g. `exp(-1)*[a,c]` or `th(a,b)@a - th(a,c)^2@a`.
    pub fn render(&self, cat: &LineCategory) -> String {
        match &self.value {
            VValue::Crossing(c) if c.is_zero() => "0".to_string(),
            VValue::Crossing(c) => {
                render_linear_combination(&[(c.clone(), format!("[{},{}]", cat.id(self.source), cat.id(self.target)))])
            }
            VValue::Diagonal(f) => {
                let at = self.source;
                let label = |k: &XKey| match cat.partner_at(at, *k) {
                    Some(b) => format!("{},{}", cat.id(at), cat.id(b)),
                    None => format!("x={}", cat.frame().x(*k)),
                };
                f.render(label, &format!("@{}", cat.id(at)))
            }
        }
    }
}

impl fmt::Debug for VElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            VValue::Crossing(c) => write!(f, "({c:?})*[{:?},{:?}]", self.source, self.target),
            VValue::Diagonal(s) => write!(f, "{s:?}@{:?}", self.source),
        }
    }
}
