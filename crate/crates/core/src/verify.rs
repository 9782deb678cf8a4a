//! Residual checks: Stasheff relations, deformation-retract identities,
//! closed form against transfer, and the functor relations of the
//! transferred morphism. Every check returns the defect, never a boolean.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::category::{BasisMorphism, LineCategory, VElement};
use crate::dr::{sdr_residuals, HomElement, XKey};
use crate::geometry::{Line, LineConfig, Obj};
use crate::hpt::{Transfer, Tuple};
use crate::products::{Branch, Products};
use crate::scalar::Rational;
use crate::step::StepElement;

/// Sequential or data-parallel evaluation. `Parallel` falls back to
/// sequential when the `parallel` feature is off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    Sequential,
    #[default]
    Parallel,
}

/// Order-preserving map over a slice.
pub fn map_slice<T, R, F>(mode: Mode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == Mode::Parallel {
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Applies `m` to `pre ⊗ x ⊗ post`, extending linearly in `x`.
pub fn apply_linear(
    cat: &LineCategory,
    product: &impl Fn(&[BasisMorphism]) -> VElement,
    pre: &[BasisMorphism],
    x: &VElement,
    post: &[BasisMorphism],
) -> VElement {
    let a = pre.first().map(|w| w.source()).unwrap_or(x.source);
    let b = post.last().map(|w| w.target()).unwrap_or(x.target);
    let mut acc = VElement::zero(a, b);
    let terms = x.terms(cat).expect("products stay on basis points");
    let mut args: Vec<BasisMorphism> = Vec::with_capacity(pre.len() + post.len() + 1);
    for (m, c) in terms {
        args.clear();
        args.extend_from_slice(pre);
        args.push(m);
        args.extend_from_slice(post);
        let v = product(&args);
        if !v.is_zero() {
            acc.add_assign(&v.scale(&c));
        }
    }
    acc
}

fn prefix_degrees(cat: &LineCategory, w: &[BasisMorphism]) -> Vec<usize> {
    let mut out = vec![0usize; w.len() + 1];
    for i in 0..w.len() {
        out[i + 1] = out[i] + cat.degree(&w[i]) as usize;
    }
    out
}

/// `Σ (-1)^σ m_k(w_1, …, w_j, m_l(w_{j+1}, …, w_{j+l}), …, w_n)` with
/// `σ = (j+1)(l+1) + l(|w_1| + ⋯ + |w_j|)`.
pub fn stasheff_residual(
    cat: &LineCategory,
    product: &impl Fn(&[BasisMorphism]) -> VElement,
    w: &[BasisMorphism],
) -> VElement {
    let n = w.len();
    let mut acc = VElement::zero(w[0].source(), w[n - 1].target());
    let prefix = prefix_degrees(cat, w);
    for l in 1..=n {
        for j in 0..=n - l {
            let inner = product(&w[j..j + l]);
            if inner.is_zero() {
                continue;
            }
            let v = apply_linear(cat, product, &w[..j], &inner, &w[j + l..]);
            if v.is_zero() {
                continue;
            }
            let sigma = (j + 1) * (l + 1) + l * prefix[j];
            if sigma % 2 == 1 {
                acc.add_assign(&v.neg());
            } else {
                acc.add_assign(&v);
            }
        }
    }
    acc
}

/// Defect of the functor relations of the transferred morphism `g` on `w`,
/// in the suspended convention:
///
/// ```text
/// d g_n(w) + Σ m_2(g_i, g_{n-i}) - Σ (-1)^{Σ_{i≤j}(|w_i|+1)} g(w_1, …, m'_l(…), …, w_n)
/// ```
pub fn morphism_residual(transfer: &Transfer, w: &[BasisMorphism]) -> HomElement<XKey> {
    use crate::dr::hom_d;
    use crate::hpt::suspended_product;
    let cat = transfer.category();
    let n = w.len();
    let (a, b) = (w[0].source(), w[n - 1].target());
    let mut acc = hom_d(cat.frame(), &transfer.functor(w));
    for i in 1..n {
        let gl = transfer.functor(&w[..i]);
        let gr = transfer.functor(&w[i..]);
        if gl.is_zero() || gr.is_zero() {
            continue;
        }
        let dl = if i == 1 { cat.degree(&w[0]) } else { 0 };
        acc.add_assign(&suspended_product(cat, &gl, &gr, dl));
    }
    let prefix = prefix_degrees(cat, w);
    let mut args: Vec<BasisMorphism> = Vec::with_capacity(n);
    for l in 1..=n {
        for j in 0..=n - l {
            let inner = transfer.product_suspended(&w[j..j + l]);
            if inner.is_zero() {
                continue;
            }
            let sign_odd = (prefix[j] + j) % 2 == 1;
            for (m, c) in inner.terms(cat).expect("products stay on basis points") {
                args.clear();
                args.extend_from_slice(&w[..j]);
                args.push(m);
                args.extend_from_slice(&w[j + l..]);
                let g = transfer.functor(&args).scale(&c);
                if sign_odd {
                    acc.add_assign(&g);
                } else {
                    acc.add_assign(&g.neg());
                }
            }
        }
    }
    debug_assert_eq!((acc.source, acc.target), (a, b));
    acc
}

/// Tuples on which the transferred functor `g` or product `m'` can be
/// nonzero. For `n ≥ 2`, `g_n(T) ≠ 0` needs a split of `T` whose `g`'s are
/// nonzero with degrees adding up to one; since `g` of a tuple of length
/// two or more has degree zero, one side is a single degree-1 generator.
/// A nonzero product needs a split into two such tuples.
///
/// Tuples are kept in two layers: over the alphabet only, and with exactly
/// one element from a list of extra basis elements.
#[derive(Clone, Debug, Default)]
pub struct Support {
    /// `functor[e][L]`: tuples of length `L` with `e` extras and `g ≠ 0`.
    pub functor: [Vec<Vec<Tuple>>; 2],
    /// `nonzero[e][L]`: tuples of length `L` with `e` extras and `m' ≠ 0`.
    pub nonzero: [Vec<Vec<Tuple>>; 2],
}

impl Support {
    pub fn nonzero_count(&self) -> usize {
        self.nonzero.iter().flatten().map(Vec::len).sum()
    }

    /// Nonzero tuples over the alphabet.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = &Tuple> {
        self.nonzero[0].iter().flatten()
    }

    /// Nonzero tuples carrying one extra element.
    pub fn iter_nonzero_extra(&self) -> impl Iterator<Item = &Tuple> {
        self.nonzero[1].iter().flatten()
    }
}

struct Layers<'a> {
    transfer: &'a Transfer<'a>,
    extra: HashSet<BasisMorphism>,
    mode: Mode,
}

impl Layers<'_> {
    fn extras(&self, t: &[BasisMorphism]) -> usize {
        t.iter().filter(|w| self.extra.contains(w)).count()
    }

    fn value_degree(&self, t: &[BasisMorphism]) -> u8 {
        if t.len() == 1 {
            self.transfer.category().degree(&t[0])
        } else {
            0
        }
    }

    fn keep(&self, cand: BTreeSet<Tuple>, test: impl Fn(&Tuple) -> bool + Sync + Send) -> Vec<Tuple> {
        let cand: Vec<Tuple> = cand.into_iter().collect();
        let keep = map_slice(self.mode, &cand, test);
        cand.into_iter().zip(keep).filter(|(_, k)| *k).map(|(t, _)| t).collect()
    }
}

/// Builds the support up to length `max_len`: the alphabet layer and, when
/// `extra` is nonempty, the layer with one extra element up to
/// `max_extra_len`.
pub fn support(
    transfer: &Transfer,
    alphabet: &[BasisMorphism],
    extra: &[BasisMorphism],
    max_len: usize,
    max_extra_len: usize,
    mode: Mode,
) -> Support {
    let cat = transfer.category();
    let lay = Layers {
        transfer,
        extra: extra.iter().copied().filter(|w| !alphabet.contains(w)).collect(),
        mode,
    };
    let top = [max_len, if lay.extra.is_empty() { 0 } else { max_extra_len }];
    let mut singles: [Vec<BasisMorphism>; 2] = [alphabet.to_vec(), lay.extra.iter().copied().collect()];
    for s in singles.iter_mut() {
        s.sort();
        s.dedup();
    }
    // Degree-1 singles, by layer, keyed by target and by source.
    let mut odd_by_target: [HashMap<Obj, Vec<BasisMorphism>>; 2] = Default::default();
    let mut odd_by_source: [HashMap<Obj, Vec<BasisMorphism>>; 2] = Default::default();
    for e in 0..2 {
        for w in singles[e].iter().filter(|w| cat.degree(w) == 1) {
            odd_by_target[e].entry(w.target()).or_default().push(*w);
            odd_by_source[e].entry(w.source()).or_default().push(*w);
        }
    }
    let mut functor: [Vec<Vec<Tuple>>; 2] = [vec![Vec::new(); max_len + 1], vec![Vec::new(); max_len + 1]];
    let mut nonzero: [Vec<Vec<Tuple>>; 2] = [vec![Vec::new(); max_len + 1], vec![Vec::new(); max_len + 1]];
    for e in 0..2 {
        if top[e] >= 1 {
            functor[e][1] = singles[e].iter().map(|w| Tuple::from_slice(&[*w])).collect();
        }
    }
    // `g` is needed up to one less than the longest product.
    for e in 0..2 {
        for len in 2..top[e] {
            let mut cand: BTreeSet<Tuple> = BTreeSet::new();
            if len == 2 {
                for (ex, ey) in [(0, e), (e, 0)] {
                    for x in &singles[ex] {
                        for y in &singles[ey] {
                            if x.target() == y.source()
                                && x.source() != y.target()
                                && cat.degree(x) + cat.degree(y) == 1
                            {
                                cand.insert(Tuple::from_slice(&[*x, *y]));
                            }
                        }
                    }
                }
            } else {
                for (ew, et) in [(0, e), (e, 0)] {
                    if ew + et != e {
                        continue;
                    }
                    for t in &functor[et][len - 1] {
                        let (a, b) = (t[0].source(), t[t.len() - 1].target());
                        for w in odd_by_target[ew].get(&a).into_iter().flatten() {
                            if w.source() != b {
                                let mut u = Tuple::with_capacity(len);
                                u.push(*w);
                                u.extend_from_slice(t);
                                cand.insert(u);
                            }
                        }
                        for w in odd_by_source[ew].get(&b).into_iter().flatten() {
                            if w.target() != a {
                                let mut u = t.clone();
                                u.push(*w);
                                cand.insert(u);
                            }
                        }
                    }
                }
            }
            cand.retain(|t| lay.extras(t) == e);
            functor[e][len] = lay.keep(cand, |t| !transfer.functor(t).is_zero());
        }
    }
    let mut by_source: [HashMap<Obj, Vec<Vec<&Tuple>>>; 2] = Default::default();
    for e in 0..2 {
        for (len, ts) in functor[e].iter().enumerate() {
            for t in ts {
                let slot = by_source[e]
                    .entry(t[0].source())
                    .or_insert_with(|| vec![Vec::new(); max_len + 1]);
                slot[len].push(t);
            }
        }
    }
    for e in 0..2 {
        if top[e] >= 1 {
            nonzero[e][1] = functor[e][1]
                .iter()
                .filter(|t| !transfer.product_suspended(t).is_zero())
                .cloned()
                .collect();
        }
        for len in 2..=top[e] {
            let mut cand: BTreeSet<Tuple> = BTreeSet::new();
            for (el, er) in [(0, e), (e, 0)] {
                if el + er != e {
                    continue;
                }
                for i in 1..len {
                    for left in &functor[el][i] {
                        let mid = left[left.len() - 1].target();
                        let Some(rights) = by_source[er].get(&mid) else {
                            continue;
                        };
                        let a = left[0].source();
                        let dl = lay.value_degree(left);
                        for right in &rights[len - i] {
                            let b = right[right.len() - 1].target();
                            if a != b {
                                let want = 1 - cat.config().morphism_degree(b, a);
                                if dl + lay.value_degree(right) != want {
                                    continue;
                                }
                            }
                            let mut u = left.clone();
                            u.extend_from_slice(right);
                            cand.insert(u);
                        }
                    }
                }
            }
            nonzero[e][len] = lay.keep(cand, |t| !transfer.product_suspended(t).is_zero());
        }
    }
    Support { functor, nonzero }
}

/// Basis elements in the output of some product on `support` that lie
/// outside `alphabet`.
pub fn output_extras(transfer: &Transfer, support: &Support, alphabet: &[BasisMorphism]) -> Vec<BasisMorphism> {
    let cat = transfer.category();
    let known: HashSet<&BasisMorphism> = alphabet.iter().collect();
    let mut out = BTreeSet::new();
    for t in support.iter_nonzero() {
        let v = transfer.product_suspended(t);
        for (m, _) in v.terms(cat).expect("products stay on basis points") {
            if !known.contains(&m) {
                out.insert(m);
            }
        }
    }
    out.into_iter().collect()
}

/// Every tuple of length at most `max_len` over `alphabet` with at least
/// one nonzero term in its Stasheff relation: an inner tuple with nonzero
/// product, spliced into an outer tuple with nonzero product at a slot
/// carrying a basis element of the inner output.
pub fn stasheff_candidates(transfer: &Transfer, alphabet: &[BasisMorphism], max_len: usize, mode: Mode) -> Vec<Tuple> {
    let cat = transfer.category();
    let base = support(transfer, alphabet, &[], max_len, 0, mode);
    let extra = output_extras(transfer, &base, alphabet);
    // Extras come out of products of two or more inputs, so the outer
    // tuple around them is at most `max_len - 1` long.
    let supp = support(transfer, alphabet, &extra, max_len, max_len.saturating_sub(1), mode);
    let mut slots: HashMap<BasisMorphism, Vec<(&Tuple, usize)>> = HashMap::new();
    for o in supp.iter_nonzero() {
        for p in 0..o.len() {
            slots.entry(o[p]).or_default().push((o, p));
        }
    }
    let extra_set: HashSet<&BasisMorphism> = extra.iter().collect();
    for o in supp.iter_nonzero_extra() {
        let p = o.iter().position(|w| extra_set.contains(w)).expect("one extra");
        slots.entry(o[p]).or_default().push((o, p));
    }
    let mut out: BTreeSet<Tuple> = BTreeSet::new();
    for i in supp.iter_nonzero() {
        out.insert(i.clone());
        let v = transfer.product_suspended(i);
        for (m, _) in v.terms(cat).expect("products stay on basis points") {
            for (o, p) in slots.get(&m).into_iter().flatten() {
                if o.len() - 1 + i.len() > max_len {
                    continue;
                }
                let mut w: Tuple = SmallVec::with_capacity(o.len() + i.len() - 1);
                w.extend_from_slice(&o[..*p]);
                w.extend_from_slice(i);
                w.extend_from_slice(&o[*p + 1..]);
                out.insert(w);
            }
        }
    }
    out.into_iter().collect()
}

/// One line of a sweep report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportLine {
    pub tuple: String,
    pub branch: Branch,
    pub residual: String,
}

impl std::fmt::Display for ReportLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "TUPLE {} BRANCH {} RESIDUAL {}",
            self.tuple, self.branch, self.residual
        )
    }
}

/// Outcome of a Stasheff sweep over one configuration.
#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub lines: Vec<ReportLine>,
    /// Tuples with a nonzero residual.
    pub failures: usize,
    /// Product evaluations per branch, over every call the sweep made.
    pub branch_counts: BTreeMap<Branch, usize>,
    /// Closed-form evaluations that disagree with transfer.
    pub oracle_mismatches: Vec<String>,
}

impl SweepReport {
    pub fn is_clean(&self) -> bool {
        self.failures == 0 && self.oracle_mismatches.is_empty()
    }

    pub fn missing_branches(&self) -> Vec<Branch> {
        Branch::ALL
            .iter()
            .copied()
            .filter(|b| !self.branch_counts.contains_key(b))
            .collect()
    }

    pub fn merge(&mut self, other: SweepReport) {
        self.lines.extend(other.lines);
        self.failures += other.failures;
        for (b, c) in other.branch_counts {
            *self.branch_counts.entry(b).or_default() += c;
        }
        self.oracle_mismatches.extend(other.oracle_mismatches);
    }

    /// Branch coverage, one `BRANCH <name> <count>` line per branch.
    pub fn coverage_lines(&self) -> Vec<String> {
        Branch::ALL
            .iter()
            .map(|b| format!("BRANCH {} {}", b, self.branch_counts.get(b).copied().unwrap_or(0)))
            .collect()
    }
}

/// Bounds of a Stasheff sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub k_max: usize,
    pub n_max: u32,
    pub mode: Mode,
    /// Compare every closed-form evaluation against transfer.
    pub cross_check: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            k_max: 6,
            n_max: 3,
            mode: Mode::default(),
            cross_check: true,
        }
    }
}

/// Stasheff residual of every tuple that can have a nonzero term, using
/// the closed-form products.
pub fn stasheff_sweep(cat: &LineCategory, opts: SweepOptions) -> SweepReport {
    let products = Products::new(cat);
    let alphabet = cat.alphabet(opts.n_max);
    let tuples = stasheff_candidates(products.transfer(), &alphabet, opts.k_max, opts.mode);
    let f = |x: &[BasisMorphism]| products.product(x);
    let residuals = map_slice(opts.mode, &tuples, |w| stasheff_residual(cat, &f, w));
    let mut report = SweepReport::default();
    for (w, r) in tuples.iter().zip(residuals) {
        let (branch, _) = products.product_with_branch(w);
        if !r.is_zero() {
            report.failures += 1;
        }
        report.lines.push(ReportLine {
            tuple: cat.render_tuple(w),
            branch,
            residual: r.render(cat),
        });
    }
    let evaluated = products.evaluated();
    for (_, b) in &evaluated {
        *report.branch_counts.entry(*b).or_default() += 1;
    }
    if opts.cross_check {
        let closed: Vec<&Tuple> = evaluated
            .iter()
            .filter(|(_, b)| *b != Branch::Transfer)
            .map(|(t, _)| t)
            .collect();
        let bad = map_slice(opts.mode, &closed, |t| {
            let c = products.product(t);
            let h = products.transfer().product(t);
            (c != h).then(|| {
                format!(
                    "{}: closed {} transfer {}",
                    cat.render_tuple(t),
                    c.render(cat),
                    h.render(cat)
                )
            })
        });
        report.oracle_mismatches = bad.into_iter().flatten().collect();
    }
    report
}

/// Closed form against transfer on one tuple: the defect and the branch.
pub fn oracle_compare(products: &Products, w: &[BasisMorphism]) -> (Branch, VElement) {
    let (branch, closed) = products.product_with_branch(w);
    let transfer = products.transfer().product(w);
    (branch, closed.sub(&transfer))
}

/// Outcome of comparing closed forms with transfer on every tuple up to
/// some length.
#[derive(Clone, Debug, Default)]
pub struct OracleReport {
    pub tuples: usize,
    /// Tuples the closed form hands to transfer.
    pub deferred: usize,
    /// Tuples in the transfer support.
    pub nonzero: usize,
    /// Support tuples the closed form hands to transfer.
    pub deferred_on_support: usize,
    pub mismatches: Vec<String>,
}

/// Closed form against transfer on every composable tuple of length at
/// most `k_max` over the alphabet with powers up to `n_max`.
///
/// Transfer is evaluated on its support, which contains every tuple where
/// it can be nonzero. Outside the support the closed form must vanish; the
/// tuples it does not send to zero outright (no unit, at most one `ϑ`, one
/// or two degree-0 inputs, a crossing) are enumerated depth-first and
/// dispatched.
pub fn oracle_sweep(cat: &LineCategory, k_max: usize, n_max: u32, mode: Mode) -> OracleReport {
    let products = Products::new(cat);
    let transfer = products.transfer();
    let alphabet = cat.alphabet(n_max);
    let supp = support(transfer, &alphabet, &[], k_max, 0, mode);
    let in_support: HashSet<&Tuple> = supp.iter_nonzero().collect();
    let mut report = OracleReport::default();
    let on_support: Vec<&Tuple> = supp.iter_nonzero().collect();
    let checked = map_slice(mode, &on_support, |t| {
        let d = crate::products::dispatch(cat, t);
        let h = transfer.product(t);
        let bad = match &d.value {
            Some(v) if *v != h => Some(format!(
                "{}: closed {} transfer {}",
                cat.render_tuple(t),
                v.render(cat),
                h.render(cat)
            )),
            _ => None,
        };
        (d.value.is_none(), bad)
    });
    for (deferred, bad) in checked {
        report.tuples += 1;
        report.nonzero += 1;
        report.deferred += deferred as usize;
        report.deferred_on_support += deferred as usize;
        report.mismatches.extend(bad);
    }
    let outside = map_slice(mode, &alphabet, |first| {
        let mut acc = OracleReport::default();
        let mut stack: Tuple = Tuple::new();
        stack.push(*first);
        dfs_outside(cat, &alphabet, k_max, &in_support, &mut stack, &mut acc);
        acc
    });
    for r in outside {
        report.tuples += r.tuples;
        report.deferred += r.deferred;
        report.mismatches.extend(r.mismatches);
    }
    report
}

fn dfs_outside(
    cat: &LineCategory,
    alphabet: &[BasisMorphism],
    k_max: usize,
    in_support: &HashSet<&Tuple>,
    stack: &mut Tuple,
    acc: &mut OracleReport,
) {
    let k = stack.len();
    let units = stack.iter().filter(|w| matches!(w, BasisMorphism::Unit(_))).count();
    let thetas = stack
        .iter()
        .filter(|w| matches!(w, BasisMorphism::Theta { .. }))
        .count();
    let zeros = stack.iter().filter(|w| cat.degree(w) == 0).count();
    let live = k <= 2 || (units == 0 && thetas <= 1 && zeros <= 2 && stack.iter().any(|w| !w.is_diagonal()));
    if live && !in_support.contains(stack) {
        let d = crate::products::dispatch(cat, stack);
        acc.tuples += 1;
        match d.value {
            None => acc.deferred += 1,
            Some(v) if !v.is_zero() => acc.mismatches.push(format!(
                "{}: closed {} transfer 0",
                cat.render_tuple(stack),
                v.render(cat)
            )),
            Some(_) => {}
        }
    }
    // Longer tuples with a unit, two `ϑ`'s or three degree-0 inputs vanish.
    if k == k_max || (k >= 2 && (units > 0 || thetas > 1 || zeros > 2)) {
        return;
    }
    let end = stack[k - 1].target();
    for w in alphabet {
        if w.source() == end {
            stack.push(*w);
            dfs_outside(cat, alphabet, k_max, in_support, stack, acc);
            stack.pop();
        }
    }
}

/// One nonzero retract defect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdrDefect {
    pub hom: (String, String),
    pub generator: String,
    pub identity: &'static str,
    pub residual: String,
}

/// Checks `dh + hd = Id - P`, `P² = P`, `dP = Pd` and the side conditions
/// on `ϑ_v^n` and `ϑ_v^{n-1}δ_v` for every hom pair, every point and
/// `n ≤ n_max`; in `hom(a, b)` with `t_a > t_b` the degree-0 generators are
/// `ϑ_v^n - ϑ_{v_ab}`. Returns the number of generators checked and the defects.
pub fn sdr_report(cat: &LineCategory, n_max: u32) -> (usize, Vec<SdrDefect>) {
    use crate::dr::{hom_d, projection};
    let frame = cat.frame();
    let keys: Vec<XKey> = (0..frame.xs().len() as u32).map(XKey).collect();
    let mut checked = 0;
    let mut defects = Vec::new();
    let objs: Vec<Obj> = cat.objects().collect();
    for &a in &objs {
        for &b in &objs {
            for &v in &keys {
                for n in 1..=n_max {
                    // Degree-0 forms in `hom(a, b)`, `t_a > t_b`, vanish at both ends.
                    let compact = a != b && cat.config().slope_cmp(a, b) == std::cmp::Ordering::Greater;
                    let even = if compact {
                        let cross = cat.crossing_key(a, b);
                        (
                            format!("th({})^{n} - th({})", frame.x(v), frame.x(cross)),
                            StepElement::theta(v, n).sub(&StepElement::theta(cross, 1)),
                        )
                    } else {
                        (format!("th({})^{n}", frame.x(v)), StepElement::theta(v, n))
                    };
                    let gens = [even, (format!("dl({})^{n}", frame.x(v)), StepElement::delta(v, n))];
                    for (name, form) in gens {
                        checked += 1;
                        let x = HomElement::new(a, b, form);
                        let r = sdr_residuals(frame, &x);
                        let p = projection(frame, &x);
                        let pp = projection(frame, &p).sub(&p);
                        let dp = hom_d(frame, &p).sub(&projection(frame, &hom_d(frame, &x)));
                        let named: [(&'static str, &HomElement<XKey>); 7] = [
                            ("dh+hd=Id-P", &r.homotopy_identity),
                            ("P(iota)=iota", &r.projection_idempotent),
                            ("h(iota)=0", &r.h_iota),
                            ("Ph=0", &r.p_h),
                            ("hh=0", &r.h_h),
                            ("PP=P", &pp),
                            ("dP=Pd", &dp),
                        ];
                        for (identity, e) in named {
                            if !e.is_zero() {
                                defects.push(SdrDefect {
                                    hom: (cat.id(a).to_string(), cat.id(b).to_string()),
                                    generator: name.clone(),
                                    identity,
                                    residual: format!("{:?}", e.form),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    (checked, defects)
}

/// A random valid configuration with `n` lines, ids `a`, `b`, …, slopes
/// and intercepts of the form `p/q` with small `p` and `q ∈ {1, 2, 3}`.
pub fn random_config(rng: &mut ChaCha8Rng, n: usize) -> LineConfig {
    let ids = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"];
    assert!(n <= ids.len());
    let small = |rng: &mut ChaCha8Rng, span: i64| {
        let q = rng.gen_range(1..=3i64);
        Rational::new(rng.gen_range(-span * q..=span * q), q)
    };
    loop {
        let lines: Vec<Line> = (0..n)
            .map(|i| {
                let t = small(rng, 3);
                let s = small(rng, 4);
                Line::new(ids[i], t, s)
            })
            .collect();
        if let Ok(cfg) = LineConfig::new(lines) {
            return cfg;
        }
    }
}

/// A configuration with the same lines as `cfg` up to new intercepts, so
/// the slope order is kept.
pub fn random_partner(rng: &mut ChaCha8Rng, cfg: &LineConfig) -> LineConfig {
    loop {
        let lines: Vec<Line> = cfg
            .lines()
            .iter()
            .map(|l| {
                let q = rng.gen_range(1..=3i64);
                Line::new(
                    l.id.clone(),
                    l.t.clone(),
                    Rational::new(rng.gen_range(-4 * q..=4 * q), q),
                )
            })
            .collect();
        if let Ok(c) = LineConfig::new(lines) {
            return c;
        }
    }
}

/// Seeded generator for the sweeps.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
