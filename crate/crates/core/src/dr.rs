//! The de Rham model: hom spaces `e^{f_ab}·(step forms)` between lines,
//! with differential, composition, and the strong deformation retract onto
//! the one-dimensional spaces spanned by the intersection generators.
//!
//! A hom element stores its degree-0 part relative to `e^{f_ab}` and its
//! degree-1 part absolutely, using `e^{f_ab}ϑ_v^{n-1}δ_v = e^{f_ab(x_v)}ϑ_v^{n-1}δ_v`.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::geometry::{LineConfig, Obj};
use crate::scalar::{ExpScalar, Rational};
use crate::step::{PointKey, StepElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DrError {
    #[error("cannot compose a morphism into {0:?} with one out of {1:?}")]
    NotComposable(Obj, Obj),
    #[error("point {0} is not an intersection point of the configuration")]
    UnknownPoint(String),
}

/// Geometric data the de Rham operations need: primitives evaluated at
/// point keys, the key of each intersection, and slope order.
pub trait Frame {
    type Key: PointKey;
    /// `f_ab(x)` at the point `key`.
    fn primitive_diff(&self, a: Obj, b: Obj, key: &Self::Key) -> Rational;
    /// Key of `x(v_ab)`.
    fn crossing(&self, a: Obj, b: Obj) -> Self::Key;
    /// Order of the slopes `t_a`, `t_b`.
    fn slope_cmp(&self, a: Obj, b: Obj) -> Ordering;
}

impl Frame for LineConfig {
    type Key = Rational;

    fn primitive_diff(&self, a: Obj, b: Obj, key: &Rational) -> Rational {
        LineConfig::primitive_diff(self, a, b, key)
    }

    fn crossing(&self, a: Obj, b: Obj) -> Rational {
        self.point(a, b).x
    }

    fn slope_cmp(&self, a: Obj, b: Obj) -> Ordering {
        LineConfig::slope_cmp(self, a, b)
    }
}

/// Index of an intersection x-coordinate in ascending order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct XKey(pub u32);

/// A frame over the distinct x-coordinates of all intersection points with
/// every `f_ab` tabulated.
#[derive(Clone, Debug)]
pub struct IndexedFrame {
    xs: Vec<Rational>,
    n: usize,
    slopes: Vec<Rational>,
    crossing: Vec<XKey>,
    table: Vec<Rational>,
}

impl IndexedFrame {
    pub fn new(cfg: &LineConfig) -> Self {
        let n = cfg.len();
        let mut xs: Vec<Rational> = cfg.all_points().into_iter().map(|(_, _, p)| p.x).collect();
        xs.sort();
        xs.dedup();
        let key_of = |x: &Rational| XKey(xs.binary_search(x).expect("known x") as u32);
        let mut crossing = vec![XKey(u32::MAX); n * n];
        for a in cfg.objects() {
            for b in cfg.objects() {
                if a != b {
                    crossing[a.index() * n + b.index()] = key_of(&cfg.point(a, b).x);
                }
            }
        }
        let mut table = Vec::with_capacity(n * n * xs.len());
        for a in cfg.objects() {
            for b in cfg.objects() {
                for x in &xs {
                    table.push(cfg.primitive_diff(a, b, x));
                }
            }
        }
        IndexedFrame {
            xs: xs.clone(),
            n,
            slopes: cfg.lines().iter().map(|l| l.t.clone()).collect(),
            crossing,
            table,
        }
    }

    pub fn x(&self, k: XKey) -> &Rational {
        &self.xs[k.0 as usize]
    }

    pub fn key(&self, x: &Rational) -> Option<XKey> {
        self.xs.binary_search(x).ok().map(|i| XKey(i as u32))
    }

    pub fn xs(&self) -> &[Rational] {
        &self.xs
    }

    pub fn f(&self, a: Obj, b: Obj, k: XKey) -> &Rational {
        &self.table[(a.index() * self.n + b.index()) * self.xs.len() + k.0 as usize]
    }
}

impl Frame for IndexedFrame {
    type Key = XKey;

    fn primitive_diff(&self, a: Obj, b: Obj, key: &XKey) -> Rational {
        self.f(a, b, *key).clone()
    }

    fn crossing(&self, a: Obj, b: Obj) -> XKey {
        self.crossing[a.index() * self.n + b.index()]
    }

    fn slope_cmp(&self, a: Obj, b: Obj) -> Ordering {
        self.slopes[a.index()].cmp(&self.slopes[b.index()])
    }
}

/// An element of `hom(source, target)` in reduced coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomElement<K: PointKey> {
    pub source: Obj,
    pub target: Obj,
    pub form: StepElement<K>,
}

impl<K: PointKey> fmt::Debug for HomElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "hom({:?},{:?}) {:?}", self.source, self.target, self.form)
    }
}

impl<K: PointKey> HomElement<K> {
    pub fn zero(source: Obj, target: Obj) -> Self {
        HomElement {
            source,
            target,
            form: StepElement::zero(),
        }
    }

    pub fn new(source: Obj, target: Obj, form: StepElement<K>) -> Self {
        HomElement { source, target, form }
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero()
    }

    pub fn degree(&self) -> Option<u8> {
        self.form.degree()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!((self.source, self.target), (rhs.source, rhs.target));
        HomElement::new(self.source, self.target, self.form.add(&rhs.form))
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        debug_assert_eq!((self.source, self.target), (rhs.source, rhs.target));
        self.form.add_assign(&rhs.form);
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        HomElement::new(self.source, self.target, self.form.sub(&rhs.form))
    }

    pub fn neg(&self) -> Self {
        HomElement::new(self.source, self.target, self.form.neg())
    }

    pub fn scale(&self, c: &ExpScalar) -> Self {
        HomElement::new(self.source, self.target, self.form.scale(c))
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        HomElement::new(self.source, self.target, self.form.scale_rational(c))
    }
}

/// The differential `d_ab(e^{f_ab}α) = e^{f_ab}dα`.
pub fn hom_d<F: Frame>(frame: &F, x: &HomElement<F::Key>) -> HomElement<F::Key> {
    let (a, b) = (x.source, x.target);
    let mut out = StepElement::zero();
    for (v, n, c) in x.form.theta_terms() {
        let k = Rational::from_integer(n as i64);
        let q = if a == b {
            Rational::zero()
        } else {
            frame.primitive_diff(a, b, v)
        };
        out.add_delta(v.clone(), n, &c.scale_shift(&k, &q));
    }
    HomElement::new(a, b, out)
}

/// Composition `hom(a,b) ⊗ hom(b,c) → hom(a,c)`, written left to right.
pub fn compose<F: Frame>(
    frame: &F,
    x: &HomElement<F::Key>,
    y: &HomElement<F::Key>,
) -> Result<HomElement<F::Key>, DrError> {
    if x.target != y.source {
        return Err(DrError::NotComposable(x.target, y.source));
    }
    let (a, b, c) = (x.source, x.target, y.target);
    let mut out = x.form.mul_degree0(&y.form);
    x.form
        .mul_into_delta_weighted(&y.form, |w| exp_primitive(frame, a, b, w), &mut out);
    y.form
        .mul_into_delta_weighted(&x.form, |w| exp_primitive(frame, b, c, w), &mut out);
    Ok(HomElement::new(a, c, out))
}

fn exp_primitive<F: Frame>(frame: &F, a: Obj, b: Obj, w: &F::Key) -> ExpScalar {
    if a == b {
        ExpScalar::one()
    } else {
        ExpScalar::exp(frame.primitive_diff(a, b, w))
    }
}

/// Value of `ϑ_v^n` at the crossing point used by the retract when the
/// primitive has a maximum there: 1, 2^-n or 0 as `x_v` is left of, at, or
/// right of the crossing.
fn step_value_at<T: Ord>(v: &T, crossing: &T, n: u32) -> Rational {
    match v.cmp(crossing) {
        Ordering::Less => Rational::one(),
        Ordering::Equal => Rational::half_pow(n),
        Ordering::Greater => Rational::zero(),
    }
}

fn evaluate_at_crossing<K: PointKey>(form: &StepElement<K>, crossing: &K) -> ExpScalar {
    let mut v = form.unit_coeff().clone();
    for (x, n, c) in form.theta_terms() {
        let w = step_value_at(x, crossing, n);
        v.add_scaled(c, &w);
    }
    v
}

/// The homotopy `h_ab`, with `h_aa = 0`.
///
/// On `ϑ_v^{n-1}δ_v = (1/n)d(ϑ_v^n)`: subtract from `ϑ_v^n` the constant
/// picked by the projection (`t_a < t_b`) or `ϑ_{v_ab}` (`t_a > t_b`).
pub fn homotopy<F: Frame>(frame: &F, x: &HomElement<F::Key>) -> HomElement<F::Key> {
    let (a, b) = (x.source, x.target);
    let mut out = StepElement::zero();
    if a == b {
        return HomElement::new(a, b, out);
    }
    let cross = frame.crossing(a, b);
    let lower = frame.slope_cmp(a, b) == Ordering::Less;
    for (v, n, c) in x.form.delta_terms() {
        let k = Rational::new(1, n as i64);
        let coeff = c.scale_shift(&k, &-frame.primitive_diff(a, b, v));
        out.add_theta(v.clone(), n, &coeff);
        if lower {
            let val = step_value_at(v, &cross, n);
            if !val.is_zero() {
                out.add_unit(&coeff.scale(&-val));
            }
        } else {
            out.add_theta(cross.clone(), 1, &coeff.negate());
        }
    }
    HomElement::new(a, b, out)
}

/// The projection `P_ab = ι∘π`, with `P_aa = Id`.
pub fn projection<F: Frame>(frame: &F, x: &HomElement<F::Key>) -> HomElement<F::Key> {
    let (a, b) = (x.source, x.target);
    if a == b {
        return x.clone();
    }
    let coeff = pi(frame, x);
    iota(frame, a, b).scale(&coeff)
}

/// The generator `e_ab` of the retract: `e^{f_ab - f_ab(x_ab)}` when
/// `t_a < t_b`, `δ_{v_ab}` when `t_a > t_b`. For `a = b` the unit.
pub fn iota<F: Frame>(frame: &F, a: Obj, b: Obj) -> HomElement<F::Key> {
    if a == b {
        return HomElement::new(a, b, StepElement::one());
    }
    let cross = frame.crossing(a, b);
    let form = if frame.slope_cmp(a, b) == Ordering::Less {
        StepElement::unit_times(ExpScalar::exp(-frame.primitive_diff(a, b, &cross)))
    } else {
        StepElement::delta(cross, 1)
    };
    HomElement::new(a, b, form)
}

/// Coefficient of `e_ab` in the projection of `x` (`a ≠ b`).
pub fn pi<F: Frame>(frame: &F, x: &HomElement<F::Key>) -> ExpScalar {
    let (a, b) = (x.source, x.target);
    debug_assert!(a != b);
    let cross = frame.crossing(a, b);
    let top = frame.primitive_diff(a, b, &cross);
    if frame.slope_cmp(a, b) == Ordering::Less {
        evaluate_at_crossing(&x.form, &cross).shift(&top)
    } else {
        let mut out = ExpScalar::zero();
        for (v, n, c) in x.form.delta_terms() {
            let q = &top - &frame.primitive_diff(a, b, v);
            out.add_assign_ref(&c.scale_shift(&Rational::new(1, n as i64), &q));
        }
        out
    }
}

/// Transports a hom element to a configuration with the same slope order:
/// `ω ↦ e^{f_{a'b'} - f_ab}ω`. Degree-0 parts are unchanged in reduced
/// coordinates; each degree-1 term at `x` picks up `e^{(f_{a'b'} - f_ab)(x)}`.
pub fn rescale(from: &LineConfig, to: &LineConfig, x: &HomElement<Rational>) -> HomElement<Rational> {
    let (a, b) = (x.source, x.target);
    if a == b {
        return x.clone();
    }
    let form = x
        .form
        .map_delta_coeffs(|p| ExpScalar::exp(&to.primitive_diff(a, b, p) - &from.primitive_diff(a, b, p)));
    HomElement::new(a, b, form)
}

/// Residuals of the retract identities on `x`:
/// `dh + hd - (Id - P)`, `πι - 1` (as `P∘ι - ι`), `hι`, `Ph`, `hh`.
pub struct SdrResiduals<K: PointKey> {
    pub homotopy_identity: HomElement<K>,
    pub projection_idempotent: HomElement<K>,
    pub h_iota: HomElement<K>,
    pub p_h: HomElement<K>,
    pub h_h: HomElement<K>,
}

impl<K: PointKey> SdrResiduals<K> {
    pub fn all_zero(&self) -> bool {
        self.homotopy_identity.is_zero()
            && self.projection_idempotent.is_zero()
            && self.h_iota.is_zero()
            && self.p_h.is_zero()
            && self.h_h.is_zero()
    }
}

pub fn sdr_residuals<F: Frame>(frame: &F, x: &HomElement<F::Key>) -> SdrResiduals<F::Key> {
    let (a, b) = (x.source, x.target);
    let dh = hom_d(frame, &homotopy(frame, x));
    let hd = homotopy(frame, &hom_d(frame, x));
    let p = projection(frame, x);
    let homotopy_identity = dh.add(&hd).sub(&x.sub(&p));
    let i = iota(frame, a, b);
    let projection_idempotent = projection(frame, &i).sub(&i);
    let h_iota = homotopy(frame, &i);
    let hx = homotopy(frame, x);
    let p_h = if a == b {
        HomElement::zero(a, b)
    } else {
        projection(frame, &hx)
    };
    let h_h = homotopy(frame, &hx);
    SdrResiduals {
        homotopy_identity,
        projection_idempotent,
        h_iota,
        p_h,
        h_h,
    }
}
