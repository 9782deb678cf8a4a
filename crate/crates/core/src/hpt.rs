//! Homotopy transfer of the de Rham category onto the minimal model.
//!
//! Works in the suspended convention, where the source has
//! `m_1 = d` and `m_2(x, y) = (-1)^{|x|+1}·x∘y` (`|x|` the unsuspended
//! degree) and no higher products, so only binary trees contribute:
//!
//! ```text
//! g_1 = ι,   g_n = -h Σ m_2(g_i, g_{n-i}),   m'_n = π Σ m_2(g_i, g_{n-i}),   m'_1 = π d ι.
//! ```
//!
//! Products on the minimal model are returned desuspended:
//! `m_n(w) = (-1)^{Σ_{i<n} (n-i)(|w_i|-1)}·m'_n(w)`.

use std::cmp::Ordering;
use std::sync::Arc;

use dashmap::DashMap;
use smallvec::SmallVec;

use crate::category::{BasisMorphism, LineCategory, VElement};
use crate::dr::{compose, hom_d, homotopy, iota, pi, Frame, HomElement, XKey};
use crate::geometry::Obj;
use crate::scalar::ExpScalar;
use crate::step::StepElement;
use crate::trees::{enumerate_trees, PlanarTree};

pub type Tuple = SmallVec<[BasisMorphism; 8]>;

type Hom = HomElement<XKey>;

/// Homotopy-transfer engine for one configuration, with memoised
/// intermediate values.
pub struct Transfer<'c> {
    cat: &'c LineCategory,
    functor_memo: DashMap<Tuple, Arc<Hom>>,
}

/// `(-1)^{Σ_{i<n}(n-i)(|w_i|-1)}`.
pub fn desuspension_sign(cat: &LineCategory, args: &[BasisMorphism]) -> i32 {
    let n = args.len();
    let mut parity = 0usize;
    for (i, w) in args.iter().enumerate() {
        let shifted = cat.degree(w) as usize + 1;
        parity += (n - 1 - i) * shifted;
    }
    if parity.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// The suspended binary product on the de Rham category.
pub fn suspended_product(cat: &LineCategory, x: &Hom, y: &Hom, x_degree: u8) -> Hom {
    let p = compose(cat.frame(), x, y).expect("composable");
    if x_degree == 0 {
        p.neg()
    } else {
        p
    }
}

/// One vertex of an evaluated tree.
#[derive(Clone, Debug)]
pub struct VertexRecord {
    /// Leaf range `start..end` below the vertex.
    pub start: usize,
    pub end: usize,
    pub left_degree: u8,
    pub right_degree: u8,
    /// The product at the vertex before `-h` (or `π` at the root).
    pub product: Hom,
}

/// The contribution of one tree to a transferred product.
#[derive(Clone, Debug)]
pub struct TreeTerm {
    pub tree: PlanarTree,
    /// Desuspended contribution.
    pub value: VElement,
    /// Vertices in post-order; the root is last.
    pub vertices: Vec<VertexRecord>,
}

impl<'c> Transfer<'c> {
    pub fn new(cat: &'c LineCategory) -> Self {
        Transfer {
            cat,
            functor_memo: DashMap::new(),
        }
    }

    pub fn category(&self) -> &'c LineCategory {
        self.cat
    }

    pub fn memo_len(&self) -> usize {
        self.functor_memo.len()
    }

    /// `ι(w)` in reduced coordinates.
    pub fn leaf(&self, w: &BasisMorphism) -> Hom {
        let cat = self.cat;
        match *w {
            BasisMorphism::Crossing { source, target } => iota(cat.frame(), source, target),
            BasisMorphism::Unit(a) => HomElement::new(a, a, StepElement::one()),
            BasisMorphism::Theta { at, with, power } => {
                HomElement::new(at, at, StepElement::theta(cat.crossing_key(at, with), power))
            }
            BasisMorphism::Delta { at, with, power } => {
                HomElement::new(at, at, StepElement::delta(cat.crossing_key(at, with), power))
            }
        }
    }

    fn value_degree(&self, args: &[BasisMorphism]) -> u8 {
        if args.len() == 1 {
            self.cat.degree(&args[0])
        } else {
            0
        }
    }

    /// The transferred functor component `g_n` (suspended convention).
    pub fn functor(&self, args: &[BasisMorphism]) -> Arc<Hom> {
        if args.len() == 1 {
            return Arc::new(self.leaf(&args[0]));
        }
        let a = args[0].source();
        let b = args[args.len() - 1].target();
        if a == b {
            return Arc::new(HomElement::zero(a, b));
        }
        if let Some(v) = self.functor_memo.get(args) {
            return v.clone();
        }
        let inner = self.split_sum(args, Some(1));
        let value = Arc::new(homotopy(self.cat.frame(), &inner).neg());
        self.functor_memo.insert(SmallVec::from_slice(args), value.clone());
        value
    }

    /// `Σ_splits m_2(g_i, g_{n-i})`, keeping only splits whose degrees add
    /// up to `want` when given.
    fn split_sum(&self, args: &[BasisMorphism], want: Option<u8>) -> Hom {
        let a = args[0].source();
        let b = args[args.len() - 1].target();
        let mut acc = HomElement::zero(a, b);
        for i in 1..args.len() {
            let (l, r) = args.split_at(i);
            let (dl, dr) = (self.value_degree(l), self.value_degree(r));
            if let Some(w) = want {
                if dl + dr != w {
                    continue;
                }
            }
            let gl = self.functor(l);
            if gl.is_zero() {
                continue;
            }
            let gr = self.functor(r);
            if gr.is_zero() {
                continue;
            }
            acc.add_assign(&suspended_product(self.cat, &gl, &gr, dl));
        }
        acc
    }

    /// `m'_n` before projection, in `hom(a_0, a_n)`.
    fn pre_projection(&self, args: &[BasisMorphism]) -> Hom {
        let a = args[0].source();
        let b = args[args.len() - 1].target();
        if args.len() == 1 {
            return hom_d(self.cat.frame(), &self.leaf(&args[0]));
        }
        let want = if a == b {
            None
        } else if self.cat.frame().slope_cmp(a, b) == Ordering::Less {
            Some(0)
        } else {
            Some(1)
        };
        self.split_sum(args, want)
    }

    fn project(&self, x: &Hom) -> VElement {
        let (a, b) = (x.source, x.target);
        if a == b {
            VElement::diagonal(a, x.form.clone())
        } else {
            VElement::crossing(a, b, pi(self.cat.frame(), x))
        }
    }

    /// The transferred product in the suspended convention.
    pub fn product_suspended(&self, args: &[BasisMorphism]) -> VElement {
        self.project(&self.pre_projection(args))
    }

    /// The transferred product `m_n` on basis morphisms.
    pub fn product(&self, args: &[BasisMorphism]) -> VElement {
        let v = self.product_suspended(args);
        if desuspension_sign(self.cat, args) < 0 {
            v.neg()
        } else {
            v
        }
    }

    /// The same product summed tree by tree over all planar trees with
    /// arity at most `max_arity` (vertices of arity above two contribute
    /// zero since the source has no higher products).
    pub fn product_by_trees(&self, args: &[BasisMorphism], max_arity: Option<usize>) -> VElement {
        if args.len() == 1 {
            return self.product(args);
        }
        let mut acc = VElement::zero(args[0].source(), args[args.len() - 1].target());
        for t in enumerate_trees(args.len(), max_arity).expect("at least two leaves") {
            acc.add_assign(&self.evaluate_tree(&t, args).value);
        }
        acc
    }

    /// Contribution of every binary tree, in enumeration order.
    pub fn trace(&self, args: &[BasisMorphism]) -> Vec<TreeTerm> {
        if args.len() < 2 {
            return Vec::new();
        }
        enumerate_trees(args.len(), Some(2))
            .expect("at least two leaves")
            .iter()
            .map(|t| self.evaluate_tree(t, args))
            .collect()
    }

    pub fn evaluate_tree(&self, tree: &PlanarTree, args: &[BasisMorphism]) -> TreeTerm {
        let mut vertices = Vec::new();
        let root = self.eval_subtree(tree, args, 0, true, &mut vertices);
        let mut value = match root {
            Some(x) => self.project(&x),
            None => VElement::zero(args[0].source(), args[args.len() - 1].target()),
        };
        if desuspension_sign(self.cat, args) < 0 {
            value = value.neg();
        }
        TreeTerm {
            tree: tree.clone(),
            value,
            vertices,
        }
    }

    /// Returns the value carried by the edge above `tree` (after `-h`), or
    /// the pre-projection product at the root. `None` means zero.
    fn eval_subtree(
        &self,
        tree: &PlanarTree,
        args: &[BasisMorphism],
        offset: usize,
        root: bool,
        records: &mut Vec<VertexRecord>,
    ) -> Option<Hom> {
        let n = tree.leaves();
        let slice = &args[offset..offset + n];
        match tree {
            PlanarTree::Leaf => Some(self.leaf(&slice[0])),
            PlanarTree::Node(children) if children.len() == 2 => {
                let nl = children[0].leaves();
                let l = self.eval_subtree(&children[0], args, offset, false, records)?;
                let r = self.eval_subtree(&children[1], args, offset + nl, false, records)?;
                let dl = l.degree()?;
                let dr = r.degree()?;
                let p = suspended_product(self.cat, &l, &r, dl);
                records.push(VertexRecord {
                    start: offset,
                    end: offset + n,
                    left_degree: dl,
                    right_degree: dr,
                    product: p.clone(),
                });
                if root {
                    Some(p)
                } else {
                    let h = homotopy(self.cat.frame(), &p).neg();
                    if h.is_zero() {
                        None
                    } else {
                        Some(h)
                    }
                }
            }
            PlanarTree::Node(_) => None,
        }
    }
}

/// Sign of one transversal tree contribution predicted by counting:
/// `I` = vertices whose left input has degree 0, `J` = internal edges whose
/// homotopy output is supported to the right of its `δ`, `K` =
/// `Σ (n-i)` over degree-0 inputs `w_i` (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignCount {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl SignCount {
    pub fn sign(&self) -> i32 {
        if (self.i + self.j + self.k).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Computes `I`, `J`, `K` for an evaluated tree over crossing generators.
/// Returns `None` when an internal edge carries something other than a
/// single `δ` away from the crossing of its hom space.
pub fn sign_count(cat: &LineCategory, args: &[BasisMorphism], term: &TreeTerm) -> Option<SignCount> {
    let n = args.len();
    let mut i = 0;
    let mut j = 0;
    let root = term.vertices.last()?;
    for v in &term.vertices {
        if v.left_degree == 0 {
            i += 1;
        }
        if std::ptr::eq(v, root) {
            continue;
        }
        let (a, b) = (v.product.source, v.product.target);
        if a == b {
            return None;
        }
        let mut deltas = v.product.form.delta_terms();
        let (x, power, _) = deltas.next()?;
        if deltas.next().is_some() || power != 1 || v.product.form.has_degree0() {
            return None;
        }
        let cross = cat.crossing_key(a, b);
        let right = match (cat.frame().slope_cmp(a, b), x.cmp(&cross)) {
            (_, Ordering::Equal) => return None,
            (Ordering::Less, o) => o == Ordering::Greater,
            (_, o) => o == Ordering::Less,
        };
        if right {
            j += 1;
        }
    }
    let k = args
        .iter()
        .enumerate()
        .filter(|(_, w)| cat.degree(w) == 0)
        .map(|(idx, _)| n - 1 - idx)
        .sum();
    Some(SignCount { i, j, k })
}

/// Sign of a single-exponential coefficient, if it has exactly one term.
pub fn contribution_sign(v: &VElement) -> Option<i32> {
    v.crossing_coeff().and_then(ExpScalar::monomial_sign)
}

/// `I + J + K` parities claimed for the two families of contributing trees
/// of a transversal polygon with `k`, `k'`, `l`, `l'` vertices in its
/// sub-chains: the first family has `n = k + k' + l + l' + 2` inputs.
pub fn family_signs(k: usize, kp: usize, l: usize, lp: usize) -> (i32, i32) {
    let parity = |s: usize| if s.is_multiple_of(2) { 1 } else { -1 };
    let first = parity((k + lp + 1) + (k + kp) + (lp + (k + l + 1 + lp)));
    let second = parity((k + lp + 1) + (k + kp) + (k + (lp + kp + 1 + k)));
    (first, second)
}

/// Objects `a_0, …, a_n` along a composable sequence.
pub fn chain_objects(args: &[BasisMorphism]) -> Vec<Obj> {
    let mut out: Vec<Obj> = args.iter().map(BasisMorphism::source).collect();
    if let Some(last) = args.last() {
        out.push(last.target());
    }
    out
}
