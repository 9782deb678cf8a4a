//! Acceptance suite: one `PASS`/`FAIL` line per criterion.
//!
//! `cargo test --test acceptance -- 4 5` runs only the listed criteria.
//! `AINF_FULL_SWEEP=1` raises the Stasheff sweep to `k ≤ 6` on every
//! configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use lagrangian_ainf::category::{BasisMorphism, LineCategory, VElement};
use lagrangian_ainf::dr::{compose, hom_d, rescale, HomElement};
use lagrangian_ainf::geometry::{classify_sequence, polygon_area, Line, LineConfig, Point, Shape};
use lagrangian_ainf::hpt::{contribution_sign, family_signs, sign_count};
use lagrangian_ainf::products::{Branch, Products};
use lagrangian_ainf::scalar::{ExpScalar, Rational};
use lagrangian_ainf::step::StepElement;
use lagrangian_ainf::trees::enumerate_trees;
use lagrangian_ainf::verify::{
    oracle_compare, oracle_sweep, random_config, random_partner, rng, sdr_report, stasheff_residual, stasheff_sweep,
    support, Mode, SweepOptions, SweepReport,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(s: &str) -> Rational {
    s.parse().expect("rational literal")
}

fn config(lines: &[(&str, &str, &str)]) -> LineConfig {
    LineConfig::new(lines.iter().map(|(id, t, s)| Line::new(*id, q(t), q(s))).collect()).expect("valid configuration")
}

fn cfg3() -> LineConfig {
    config(&[("a", "0", "0"), ("b", "1", "0"), ("c", "2", "-2")])
}

/// Quadrilateral with `x(v_ab) < x(v_bc) < x(v_da) < x(v_cd)`.
fn quad_open() -> LineConfig {
    config(&[
        ("a", "-1/2", "0"),
        ("b", "2", "0"),
        ("c", "-2/3", "8/3"),
        ("d", "1/2", "-2"),
    ])
}

/// Quadrilateral with `x(v_bc) < x(v_ab) < x(v_da) < x(v_cd)`.
fn quad_closed() -> LineConfig {
    config(&[("a", "0", "-2"), ("b", "-2", "0"), ("c", "1/4", "0"), ("d", "3", "-11")])
}

/// Nine lines whose points `v_ab, …, v_hi, v_ia` bound a clockwise polygon
/// with one reflex corner at `v_ef`.
fn reflex() -> LineConfig {
    config(&[
        ("a", "-1/3", "-3"),
        ("b", "-1", "-3"),
        ("c", "2", "7/2"),
        ("d", "2/5", "2/5"),
        ("e", "0", "0"),
        ("f", "1", "0"),
        ("g", "-1/2", "3/2"),
        ("h", "3", "-6"),
        ("i", "1/3", "-10/3"),
    ])
}

/// The 25 random configurations: seed `i`, `3 + i % 3` lines.
fn random_configs() -> Vec<(String, LineConfig)> {
    (1..=25u64)
        .map(|i| {
            let n = 3 + (i % 3) as usize;
            (format!("random#{i}"), random_config(&mut rng(i), n))
        })
        .collect()
}

fn sampled() -> Vec<(String, LineConfig)> {
    let mut out = vec![("cfg3".to_string(), cfg3())];
    out.extend(random_configs());
    out
}

fn tuple(cat: &LineCategory, lits: &[&str]) -> Vec<BasisMorphism> {
    cat.parse_tuple(lits).expect("tuple literal")
}

fn el(cat: &LineCategory, text: &str) -> VElement {
    cat.parse_element(text).expect("element literal")
}

fn point(cfg: &LineConfig, a: &str, b: &str) -> Point {
    cfg.intersect(a, b).expect("points")
}

fn area(cfg: &LineConfig, pairs: &[(&str, &str)]) -> Rational {
    let corners: Vec<Point> = pairs.iter().map(|(a, b)| point(cfg, a, b)).collect();
    polygon_area(&corners)
}

/// Area of the part of a convex polygon with `lo ≤ x ≤ hi`.
fn slab(corners: &[Point], lo: &Rational, hi: &Rational) -> Rational {
    let clip = |poly: Vec<Point>, keep: &dyn Fn(&Point) -> bool, edge: &Rational| -> Vec<Point> {
        let mut out = Vec::new();
        for i in 0..poly.len() {
            let p = &poly[i];
            let r = &poly[(i + 1) % poly.len()];
            if keep(p) {
                out.push(p.clone());
            }
            if keep(p) != keep(r) {
                let t = (edge - &p.x) / (&r.x - &p.x);
                out.push(Point::new(edge.clone(), &p.y + &(&t * &(&r.y - &p.y))));
            }
        }
        out
    };
    let left = clip(corners.to_vec(), &|p: &Point| &p.x >= lo, lo);
    let both = clip(left, &|p: &Point| &p.x <= hi, hi);
    if both.len() < 3 {
        Rational::zero()
    } else {
        polygon_area(&both)
    }
}

fn pm_equal(x: &VElement, y: &VElement) -> bool {
    x == y || *x == y.neg()
}

fn factorial(n: usize) -> Rational {
    Rational::factorial(n as u32)
}

fn power(x: &StepElement<lagrangian_ainf::dr::XKey>, n: usize) -> StepElement<lagrangian_ainf::dr::XKey> {
    let mut out = StepElement::one();
    for _ in 0..n {
        out = out.mul(x);
    }
    out
}

/// Every way of splitting `n` items into a left and a right group.
fn splits(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=n).map(move |l| (l, n - l))
}

fn repeat(lit: &str, n: usize) -> Vec<String> {
    vec![lit.to_string(); n]
}

fn strings(parts: &[Vec<String>]) -> Vec<String> {
    parts.concat()
}

fn one(lit: &str) -> Vec<String> {
    vec![lit.to_string()]
}

// Criterion 1.

fn stasheff() -> Outcome {
    let full = std::env::var_os("AINF_FULL_SWEEP").is_some();
    let mut total = SweepReport::default();
    let mut tuples = 0usize;
    let mut bounds = BTreeMap::new();
    for (name, cfg) in sampled() {
        let n = cfg.len();
        let k_max = if full || n == 3 { 6 } else { 5 };
        *bounds.entry((n, k_max)).or_insert(0usize) += 1;
        let cat = LineCategory::new(cfg);
        let r = stasheff_sweep(
            &cat,
            SweepOptions {
                k_max,
                n_max: 3,
                mode: Mode::Parallel,
                cross_check: true,
            },
        );
        tuples += r.lines.len();
        if !r.is_clean() {
            let first = r.lines.iter().find(|l| l.residual != "0").map(|l| l.to_string());
            return Err(format!(
                "{name}: {} failures, {} closed/transfer mismatches; first {:?} {:?}",
                r.failures,
                r.oracle_mismatches.len(),
                first,
                r.oracle_mismatches.first()
            ));
        }
        total.merge(r);
    }
    let missing = total.missing_branches();
    let shown: Vec<String> = bounds.iter().map(|((n, k), c)| format!("{c}x(N={n},k<={k})")).collect();
    let detail = format!(
        "{tuples} candidate tuples, 0 nonzero residuals, powers<=3, bounds {}",
        shown.join(" ")
    );
    if missing.is_empty() {
        Ok(format!("{detail}, all {} branches hit", Branch::ALL.len()))
    } else {
        Err(format!("{detail}, branches never hit: {missing:?}"))
    }
}

// Criterion 2.

/// Tuples of the multiplicity patterns on the open quadrilateral: `δ`'s
/// around `e_bc` (total multiplicity `d ≤ 4`), around `e_ab` (`d ≤ 4`),
/// and around `e_ab` together with `e_da` closing the polygon.
fn multiplicity_patterns() -> Vec<(String, Vec<String>)> {
    let mut out = Vec::new();
    for d in 1..=4 {
        for (l, r) in splits(d - 1) {
            out.push((
                format!("bc^({l},{r})"),
                strings(&[
                    one("[a,b]"),
                    repeat("dl(b,c)@b", l),
                    one("[b,c]"),
                    repeat("dl(c,b)@c", r),
                    one("[c,d]"),
                ]),
            ));
        }
    }
    for d in 0..=4 {
        for (l, r) in splits(d) {
            out.push((
                format!("ab^({l},{r})"),
                strings(&[
                    repeat("dl(a,b)@a", l),
                    one("[a,b]"),
                    repeat("dl(b,a)@b", r),
                    one("[b,c]"),
                    one("[c,d]"),
                ]),
            ));
        }
    }
    for d in 0..=3 {
        for (l, r) in splits(d) {
            for dp in 1..=3 {
                for (pl, pr) in splits(dp - 1) {
                    out.push((
                        format!("ab^({l},{r})da^({pl},{pr})"),
                        strings(&[
                            repeat("dl(a,b)@a", l),
                            one("[a,b]"),
                            repeat("dl(b,a)@b", r),
                            one("[b,c]"),
                            one("[c,d]"),
                            repeat("dl(d,a)@d", pl),
                            one("[d,a]"),
                            repeat("dl(a,d)@a", pr),
                        ]),
                    ));
                }
            }
        }
    }
    out
}

fn oracle() -> Outcome {
    let mut configs = vec![("cfg3".to_string(), cfg3())];
    for i in 0..5u64 {
        let n = 4 + (i % 2) as usize;
        configs.push((format!("random#{}", 101 + i), random_config(&mut rng(101 + i), n)));
    }
    let mut tuples = 0;
    let mut deferred = 0;
    let mut nonzero = 0;
    for (name, cfg) in &configs {
        let cat = LineCategory::new(cfg.clone());
        let r = oracle_sweep(&cat, 5, 3, Mode::Parallel);
        if let Some(m) = r.mismatches.first() {
            return Err(format!("{name}: {} mismatches, first {m}", r.mismatches.len()));
        }
        tuples += r.tuples;
        deferred += r.deferred_on_support;
        nonzero += r.nonzero;
    }
    let cat = LineCategory::new(quad_open());
    let products = Products::new(&cat);
    let patterns = multiplicity_patterns();
    for (name, lits) in &patterns {
        let w = cat.parse_tuple(lits).expect("pattern");
        let (_, defect) = oracle_compare(&products, &w);
        if !defect.is_zero() {
            return Err(format!("pattern {name}: defect {}", defect.render(&cat)));
        }
    }
    Ok(format!(
        "{tuples} tuples with k<=5, powers<=3 on cfg3 + 5 random N=4,5 configs; {nonzero} in the transfer support, {deferred} of them computed by transfer; {} multiplicity patterns agree",
        patterns.len()
    ))
}

// Criterion 3.

fn sdr() -> Outcome {
    let mut configs = sampled();
    configs.push(("quad-open".into(), quad_open()));
    configs.push(("quad-closed".into(), quad_closed()));
    configs.push(("reflex".into(), reflex()));
    let mut checked = 0;
    for (name, cfg) in &configs {
        let cat = LineCategory::new(cfg.clone());
        let (n, defects) = sdr_report(&cat, 4);
        if let Some(d) = defects.first() {
            return Err(format!("{name}: {} defects, first {d:?}", defects.len()));
        }
        checked += n;
    }
    Ok(format!(
        "{checked} generators (n<=4, every hom pair) on {} configurations, 7 identities each",
        configs.len()
    ))
}

// Criterion 4.

fn worked_examples() -> Outcome {
    let mut notes = Vec::new();

    // Transversal triangle fan on the open quadrilateral.
    let cfg = quad_open();
    let cat = LineCategory::new(cfg.clone());
    let products = Products::new(&cat);
    let corners: Vec<Point> = [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]
        .iter()
        .map(|(a, b)| point(&cfg, a, b))
        .collect();
    let xs = |a, b| point(&cfg, a, b).x;
    let (x0, x1, x2, x3) = (xs("a", "b"), xs("b", "c"), xs("d", "a"), xs("c", "d"));
    if !(x0 < x1 && x1 < x2 && x2 < x3) {
        return Err("open quadrilateral has the wrong x-order".into());
    }
    let (sx, sy, sz) = (
        slab(&corners, &x0, &x1),
        slab(&corners, &x1, &x2),
        slab(&corners, &x2, &x3),
    );
    let total = polygon_area(&corners);
    if &(&sx + &sy) + &sz != total {
        return Err("slab areas do not add up".into());
    }
    let ad = el(&cat, "[a,d]");
    let expect = ad.scale(&ExpScalar::exp(-(&sx + &(&sy + &sz))));
    let w = tuple(&cat, &["[a,b]", "[b,c]", "[c,d]"]);
    let m3 = products.product(&w);
    if !pm_equal(&m3, &expect) {
        return Err(format!("triangle fan: got {}", m3.render(&cat)));
    }
    let live: Vec<String> = products
        .transfer()
        .trace(&w)
        .into_iter()
        .filter(|t| !t.value.is_zero())
        .map(|t| t.tree.to_string())
        .collect();
    if live != ["((x x) x)"] {
        return Err(format!("triangle fan: surviving trees {live:?}"));
    }
    notes.push(format!("m3=±exp(-(X+(Y+Z)))[a,d] with X,Y,Z={sx},{sy},{sz}, one tree"));

    // Telescoping on both quadrilaterals.
    for (label, cfg, trees) in [("closed", quad_closed(), 1usize), ("open", quad_open(), 2usize)] {
        let cat = LineCategory::new(cfg.clone());
        let products = Products::new(&cat);
        let a = area(&cfg, &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]);
        let w = tuple(&cat, &["[a,b]", "[b,c]", "[c,d]", "[d,a]"]);
        let got = products.product(&w);
        let expect = el(&cat, "th(a,b)@a - th(a,d)@a").scale(&ExpScalar::exp(-a.clone()));
        if !pm_equal(&got, &expect) {
            return Err(format!("quadrilateral ({label}): got {}", got.render(&cat)));
        }
        let live = products
            .transfer()
            .trace(&w)
            .iter()
            .filter(|t| !t.value.is_zero())
            .count();
        if live != trees {
            return Err(format!("quadrilateral ({label}): {live} contributing trees"));
        }
    }
    notes.push("m4=±exp(-A)(th_ab-th_da) with 1 and 2 trees".into());

    // Multiplicities on the open quadrilateral.
    let base = VElement::basis(&cat, &tuple(&cat, &["[a,d]"])[0]).scale(&ExpScalar::exp(-total.clone()));
    let mut checked = 0;
    for d in 1..=4usize {
        for (l, r) in splits(d - 1) {
            let lits = strings(&[
                one("[a,b]"),
                repeat("dl(b,c)@b", l),
                one("[b,c]"),
                repeat("dl(c,b)@c", r),
                one("[c,d]"),
            ]);
            let got = products.product(&cat.parse_tuple(&lits).unwrap());
            let expect = base.scale(&ExpScalar::constant(factorial(d).recip()));
            if !pm_equal(&got, &expect) {
                return Err(format!("bc multiplicity {d} ({l},{r}): got {}", got.render(&cat)));
            }
            checked += 1;
        }
    }
    for d in 0..=4usize {
        for (l, r) in splits(d) {
            let lits = strings(&[
                repeat("dl(a,b)@a", l),
                one("[a,b]"),
                repeat("dl(b,a)@b", r),
                one("[b,c]"),
                one("[c,d]"),
            ]);
            let got = products.product(&cat.parse_tuple(&lits).unwrap());
            let c = (&(&Rational::half_pow(d as u32) * &factorial(l).recip()) * &factorial(r).recip()).clone();
            let expect = base.scale(&ExpScalar::constant(c));
            if !pm_equal(&got, &expect) {
                return Err(format!("ab multiplicity ({l},{r}): got {}", got.render(&cat)));
            }
            checked += 1;
        }
    }
    notes.push(format!("{checked} multiplicity tuples give 1/d! and 1/(2^d d-! d+!)"));

    // Both ends: `δ`'s before `e_ab` and around `e_da`.
    let a_obj = cfg.obj("a").unwrap();
    let th_ab = StepElement::theta(cat.crossing_key(a_obj, cfg.obj("b").unwrap()), 1);
    let th_da = StepElement::theta(cat.crossing_key(a_obj, cfg.obj("d").unwrap()), 1);
    let shifted = th_ab.sub(&StepElement::unit_times(ExpScalar::constant(Rational::new(1, 2))));
    let inverse = StepElement::one().sub(&th_da);
    let mut both = 0;
    let mut deferred_side = 0;
    for d in 0..=4usize {
        for dp in 1..=4usize {
            for (pl, pr) in splits(dp - 1) {
                let lits = strings(&[
                    repeat("dl(a,b)@a", d),
                    one("[a,b]"),
                    one("[b,c]"),
                    one("[c,d]"),
                    repeat("dl(d,a)@d", pl),
                    one("[d,a]"),
                    repeat("dl(a,d)@a", pr),
                ]);
                let w = cat.parse_tuple(&lits).unwrap();
                let got = products.product(&w);
                let c = (&factorial(d) * &factorial(dp)).recip();
                let form = th_ab
                    .mul(&power(&shifted, d))
                    .mul(&power(&inverse, dp))
                    .scale(&ExpScalar::term(c, -total.clone()));
                let expect = VElement::diagonal(a_obj, form);
                if !pm_equal(&got, &expect) {
                    return Err(format!(
                        "both ends d={d} d'={dp} ({pl},{pr}): got {} want ±{}",
                        got.render(&cat),
                        expect.render(&cat)
                    ));
                }
                both += 1;
            }
        }
    }
    // `δ`'s between `e_ab` and `e_bc`: compared against transfer only.
    for (name, lits) in multiplicity_patterns() {
        if !name.starts_with("ab^") || !name.contains("da") || name.starts_with("ab^(0,0)") {
            continue;
        }
        let w = cat.parse_tuple(&lits).unwrap();
        if !oracle_compare(&products, &w).1.is_zero() {
            return Err(format!("both ends {name}: closed form differs from transfer"));
        }
        deferred_side += 1;
    }
    notes.push(format!(
        "{both} two-end tuples equal ±exp(-A) th_ab (th_ab-1/2)^d (1-th_da)^d'/(d! d'!), {deferred_side} with d+>0 match transfer"
    ));
    Ok(notes.join("; "))
}

// Criterion 5.

fn reflex_polygon() -> Outcome {
    let cfg = reflex();
    let cat = LineCategory::new(cfg.clone());
    let products = Products::new(&cat);
    let f = |w: &[BasisMorphism]| products.product(w);
    let x = area(&cfg, &[("b", "c"), ("c", "d"), ("d", "e"), ("e", "f"), ("f", "b")]);
    let z = area(&cfg, &[("e", "f"), ("f", "g"), ("g", "h"), ("h", "e")]);
    let yz = area(
        &cfg,
        &[("a", "b"), ("b", "f"), ("f", "g"), ("g", "h"), ("h", "i"), ("i", "a")],
    );
    let xy = area(
        &cfg,
        &[
            ("a", "b"),
            ("b", "c"),
            ("c", "d"),
            ("d", "e"),
            ("e", "h"),
            ("h", "i"),
            ("i", "a"),
        ],
    );
    let y = &yz - &z;
    if &xy - &x != y {
        return Err(format!("areas inconsistent: X={x} Z={z} Y+Z={yz} X+Y={xy}"));
    }
    let m = |lits: &[&str]| products.product(&tuple(&cat, lits));
    let scaled = |lit: &str, sign: i64, a: &Rational| {
        el(&cat, lit).scale(&ExpScalar::term(Rational::from_integer(sign), -a.clone()))
    };
    let checks = [
        (m(&["[b,c]", "[c,d]", "[d,e]", "[e,f]"]), scaled("[b,f]", 1, &x)),
        (
            m(&["[a,b]", "[b,f]", "[f,g]", "[g,h]", "[h,i]"]),
            scaled("[a,i]", -1, &yz),
        ),
        (m(&["[e,f]", "[f,g]", "[g,h]"]), scaled("[e,h]", -1, &z)),
        (
            m(&["[a,b]", "[b,c]", "[c,d]", "[d,e]", "[e,h]", "[h,i]"]),
            scaled("[a,i]", 1, &xy),
        ),
    ];
    let mut signs = Vec::new();
    for (got, want) in &checks {
        if got == want {
            signs.push("=");
        } else if *got == want.neg() {
            signs.push("-");
        } else {
            return Err(format!("got {} want ±{}", got.render(&cat), want.render(&cat)));
        }
    }
    let w = tuple(
        &cat,
        &["[a,b]", "[b,c]", "[c,d]", "[d,e]", "[e,f]", "[f,g]", "[g,h]", "[h,i]"],
    );
    let inner4 = products.product(&w[1..5]);
    let inner3 = products.product(&w[4..7]);
    let t1 = lagrangian_ainf::verify::apply_linear(&cat, &f, &w[..1], &inner4, &w[5..]);
    let t2 = lagrangian_ainf::verify::apply_linear(&cat, &f, &w[..4], &inner3, &w[7..]);
    if !t1.sub(&t2).is_zero() || t1.is_zero() {
        return Err(format!(
            "m5(.m4.) = {}, m6(.m3.) = {}",
            t1.render(&cat),
            t2.render(&cat)
        ));
    }
    let r = stasheff_residual(&cat, &f, &w);
    if !r.is_zero() {
        return Err(format!("full residual {}", r.render(&cat)));
    }
    // The tuple through the reflex corner needs a diagonal product.
    let m2 = m(&["[f,e]", "[e,f]"]);
    if m2 != el(&cat, "dl(f,e)@f") {
        return Err(format!("m2([f,e],[e,f]) = {}", m2.render(&cat)));
    }
    let v = tuple(&cat, &["[a,b]", "[b,f]", "[f,e]", "[e,f]", "[f,g]", "[g,h]", "[h,i]"]);
    let via_m3 = lagrangian_ainf::verify::apply_linear(&cat, &f, &v[..3], &products.product(&v[3..6]), &v[6..]);
    let via_m2 = lagrangian_ainf::verify::apply_linear(&cat, &f, &v[..2], &m2, &v[4..]);
    let target = el(&cat, "[a,i]").scale(&ExpScalar::exp(-yz.clone()));
    if !pm_equal(&via_m3, &target) || !pm_equal(&via_m2, &target) || via_m3 != via_m2 {
        return Err(format!(
            "through v_fe: m5(.m3.) = {}, m6(.m2.) = {}",
            via_m3.render(&cat),
            via_m2.render(&cat)
        ));
    }
    let r = stasheff_residual(&cat, &f, &v);
    if !r.is_zero() {
        return Err(format!("residual through v_fe {}", r.render(&cat)));
    }
    Ok(format!(
        "X={x} Y={y} Z={z}; m5(.m4.) = m6(.m3.) = {}; printed signs {}; m2([f,e],[e,f]) = dl(f,e)@f and m6(.dl.) = m5(.m3.) = {}",
        t1.render(&cat),
        signs.join(""),
        via_m2.render(&cat)
    ))
}

// Criterion 6.

fn degree_law() -> Outcome {
    let mut configs = vec![
        ("cfg3".to_string(), cfg3()),
        ("quad-open".into(), quad_open()),
        ("quad-closed".into(), quad_closed()),
    ];
    for (name, cfg) in random_configs() {
        if cfg.len() <= 4 {
            configs.push((name, cfg));
        }
    }
    let mut tuples = 0;
    let mut nonzero = 0;
    for (name, cfg) in &configs {
        let cat = LineCategory::new(cfg.clone());
        let products = Products::new(&cat);
        let objs: Vec<_> = cat.objects().collect();
        let mut chains: Vec<Vec<_>> = objs.iter().map(|&a| vec![a]).collect();
        for k in 1..=5usize {
            let mut next = Vec::new();
            for c in &chains {
                for &b in &objs {
                    if b != *c.last().unwrap() {
                        let mut e = c.clone();
                        e.push(b);
                        next.push(e);
                    }
                }
            }
            chains = next;
            if k < 2 {
                continue;
            }
            for c in &chains {
                let (a0, ak) = (c[0], c[k]);
                if a0 == ak {
                    continue;
                }
                let w: Vec<BasisMorphism> = c
                    .windows(2)
                    .map(|p| BasisMorphism::Crossing {
                        source: p[0],
                        target: p[1],
                    })
                    .collect();
                tuples += 1;
                let value = products.product(&w);
                // The closed point sequence with its degrees: inputs, then `v_{a_k a_0}`.
                let mut pts: Vec<Point> = c.windows(2).map(|p| cat.point(p[0], p[1]).clone()).collect();
                pts.push(cat.point(ak, a0).clone());
                let mut degs: Vec<u8> = w.iter().map(|x| cat.degree(x)).collect();
                degs.push(cfg.morphism_degree(ak, a0));
                let distinct = {
                    let mut s = pts.clone();
                    s.sort_by(|p, r| (&p.x, &p.y).cmp(&(&r.x, &r.y)));
                    s.dedup();
                    s.len() == pts.len()
                };
                let cc = distinct && matches!(classify_sequence(&pts), Shape::Polygon(_));
                let positional = cc && {
                    let lo = pts.iter().map(|p| &p.x).min().unwrap();
                    let hi = pts.iter().map(|p| &p.x).max().unwrap();
                    pts.iter()
                        .zip(&degs)
                        .all(|(p, &g)| g == if &p.x == lo || &p.x == hi { 0 } else { 1 })
                };
                let sum: usize = degs.iter().map(|&g| g as usize).sum();
                if value.is_zero() == positional {
                    return Err(format!(
                        "{name}: {} nonzero={} cc-polygon={cc} degrees {degs:?}",
                        cat.render_tuple(&w),
                        !value.is_zero()
                    ));
                }
                if !value.is_zero() {
                    nonzero += 1;
                    if sum != k - 1 {
                        return Err(format!(
                            "{name}: {} degree sum {sum} != {}",
                            cat.render_tuple(&w),
                            k - 1
                        ));
                    }
                }
            }
        }
    }
    Ok(format!(
        "{tuples} transversal tuples (k=2..5) on {} configurations with N<=4; {nonzero} nonzero, each a CC-polygon with degree sum k-1",
        configs.len()
    ))
}

// Criterion 7.

fn signs() -> Outcome {
    let mut configs = vec![
        ("cfg3".to_string(), cfg3()),
        ("quad-open".into(), quad_open()),
        ("quad-closed".into(), quad_closed()),
        ("reflex".into(), reflex()),
    ];
    configs.extend(random_configs().into_iter().take(9));
    let mut trees = 0;
    let mut ties = 0;
    for (name, cfg) in &configs {
        let cat = LineCategory::new(cfg.clone());
        let products = Products::new(&cat);
        let alphabet: Vec<BasisMorphism> = cat.alphabet(1).into_iter().filter(|w| !w.is_diagonal()).collect();
        let max_len = if cfg.len() > 5 { 6 } else { 5 };
        let supp = support(products.transfer(), &alphabet, &[], max_len, 0, Mode::Parallel);
        for w in supp.iter_nonzero() {
            if w.len() < 2 || w[0].source() == w[w.len() - 1].target() {
                continue;
            }
            // The count assumes distinct x-coordinates along the polygon.
            let mut xs: Vec<Rational> = w
                .iter()
                .map(|m| {
                    let (a, b) = m.crossing_pair().expect("crossing");
                    cat.point(a, b).x.clone()
                })
                .collect();
            xs.push(cat.point(w[w.len() - 1].target(), w[0].source()).x.clone());
            xs.sort();
            let n = xs.len();
            xs.dedup();
            if xs.len() < n {
                ties += 1;
                continue;
            }
            for term in products.transfer().trace(w) {
                if term.value.is_zero() {
                    continue;
                }
                trees += 1;
                let predicted = sign_count(&cat, w, &term).map(|c| c.sign());
                let actual = contribution_sign(&term.value);
                if predicted.is_none() || predicted != actual {
                    return Err(format!(
                        "{name}: {} tree {} counted {predicted:?} actual {actual:?}",
                        cat.render_tuple(w),
                        term.tree
                    ));
                }
            }
        }
    }
    for k in 0..4 {
        for kp in 0..4 {
            for l in 0..4 {
                for lp in 0..4 {
                    let n = k + kp + l + lp + 2;
                    let want = if n % 2 == 0 { 1 } else { -1 };
                    if family_signs(k, kp, l, lp) != (want, 1) {
                        return Err(format!("family signs at ({k},{kp},{l},{lp})"));
                    }
                }
            }
        }
    }
    Ok(format!(
        "{trees} contributing trees over {} configurations carry sign (-1)^(I+J+K) ({ties} tuples with tied x skipped); tree families give (-1)^n and +1",
        configs.len()
    ))
}

// Criterion 8.

fn functor() -> Outcome {
    let mut pairs = 0;
    let mut checks = 0;
    for seed in 201..206u64 {
        let mut g = rng(seed);
        let n = g.gen_range(3..=5);
        let from = random_config(&mut g, n);
        let to = random_partner(&mut g, &from);
        let objs: Vec<_> = from.objects().collect();
        let pts: Vec<Rational> = from.all_points().into_iter().map(|(_, _, p)| p.x).collect();
        let random_form = |g: &mut rand_chacha::ChaCha8Rng| {
            let mut f = StepElement::zero();
            for _ in 0..3 {
                let x = pts[g.gen_range(0..pts.len())].clone();
                let c = ExpScalar::constant(Rational::new(g.gen_range(-5..=5), g.gen_range(1..=3)));
                let p = g.gen_range(1..=3);
                if g.gen_bool(0.5) {
                    f.add_theta(x, p, &c);
                } else {
                    f.add_delta(x, p, &c);
                }
            }
            f
        };
        for _ in 0..20 {
            let a = objs[g.gen_range(0..objs.len())];
            let b = objs[g.gen_range(0..objs.len())];
            let c = objs[g.gen_range(0..objs.len())];
            let x = HomElement::new(a, b, random_form(&mut g));
            let y = HomElement::new(b, c, random_form(&mut g));
            let lhs = rescale(&from, &to, &hom_d(&from, &x));
            let rhs = hom_d(&to, &rescale(&from, &to, &x));
            if lhs.sub(&rhs).form != StepElement::zero() {
                return Err(format!("seed {seed}: d does not commute on {x:?}"));
            }
            let lhs = rescale(&from, &to, &compose(&from, &x, &y).unwrap());
            let rhs = compose(&to, &rescale(&from, &to, &x), &rescale(&from, &to, &y)).unwrap();
            if lhs.sub(&rhs).form != StepElement::zero() {
                return Err(format!("seed {seed}: composition does not commute on {x:?} {y:?}"));
            }
            checks += 2;
        }
        pairs += 1;
    }
    Ok(format!(
        "{pairs} configuration pairs, {checks} identities on random elements"
    ))
}

// Criterion 9.

/// Rank of a dense rational matrix given by rows.
#[allow(clippy::needless_range_loop)]
fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                for j in c..cols {
                    let v = &rows[i][j] - &(&f * &rows[r][j]);
                    rows[i][j] = v;
                }
            }
        }
        r += 1;
    }
    r
}

fn cohomology() -> Outcome {
    let mut g = rng(301);
    let pts: Vec<Rational> = ["-2", "-1/3", "1/2", "5/2"].iter().map(|s| q(s)).collect();
    let n_max = 6u32;
    let keys: Vec<(Rational, u32)> = pts
        .iter()
        .flat_map(|x| (1..=n_max).map(move |n| (x.clone(), n)))
        .collect();
    // Degree 0: `ϑ_x^n - ϑ_{x_0}` spans the forms vanishing at both ends.
    let zero_basis: Vec<StepElement<Rational>> = keys
        .iter()
        .skip(1)
        .map(|(x, n)| StepElement::theta(x.clone(), *n).sub(&StepElement::theta(pts[0].clone(), 1)))
        .collect();
    let coords = |w: &StepElement<Rational>| -> Vec<Rational> {
        keys.iter()
            .map(|(x, n)| w.delta_coeff(x, *n).as_rational().expect("rational coefficients"))
            .collect()
    };
    let image: Vec<Vec<Rational>> = zero_basis.iter().map(|f| coords(&f.d())).collect();
    let r = rank(image.clone());
    if r != zero_basis.len() {
        return Err(format!("d has a kernel on degree 0: rank {r} of {}", zero_basis.len()));
    }
    let h1 = keys.len() - r;
    if h1 != 1 {
        return Err(format!("H^1 has dimension {h1}"));
    }
    let (mut exact, mut closed) = (0, 0);
    for trial in 0..200 {
        let mut w = StepElement::zero();
        if trial % 2 == 0 {
            for f in &zero_basis {
                let c = Rational::new(g.gen_range(-4..=4), g.gen_range(1..=4));
                w.add_assign(&f.d().scale_rational(&c));
            }
        } else {
            for (x, n) in keys.iter() {
                if g.gen_bool(0.3) {
                    let c = ExpScalar::constant(Rational::new(g.gen_range(-4..=4), g.gen_range(1..=4)));
                    w.add_delta(x.clone(), *n, &c);
                }
            }
        }
        let mut extended = image.clone();
        extended.push(coords(&w));
        let in_image = rank(extended) == r;
        let class_zero = w.h1_class().is_zero();
        if in_image != class_zero {
            return Err(format!("{w:?}: oracle exact={in_image}, class zero={class_zero}"));
        }
        if in_image {
            exact += 1;
        } else {
            closed += 1;
        }
    }
    Ok(format!(
        "{} points, powers<=6: H^0 = 0, dim H^1 = 1; {exact} exact and {closed} non-exact samples classified correctly",
        pts.len()
    ))
}

// Criterion 10.

fn trees() -> Outcome {
    let catalan = |m: usize| -> usize {
        let mut c = 1usize;
        for i in 0..m {
            c = c * 2 * (2 * i + 1) / (i + 2);
        }
        c
    };
    let mut binary = Vec::new();
    for n in 2..=7 {
        let got = enumerate_trees(n, Some(2)).unwrap().len();
        if got != catalan(n - 1) {
            return Err(format!("binary trees with {n} leaves: {got}"));
        }
        binary.push(got);
    }
    let schroeder = [1usize, 3, 11, 45, 197];
    let mut all = Vec::new();
    for (i, &want) in schroeder.iter().enumerate() {
        let got = enumerate_trees(i + 2, None).unwrap().len();
        if got != want {
            return Err(format!("planar trees with {} leaves: {got}", i + 2));
        }
        all.push(got);
    }
    Ok(format!("binary n=2..7 {binary:?}, unbounded n=2..6 {all:?}"))
}

// Criterion 11.

fn cli_goldens() -> Outcome {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests");
    let golden = root.join("golden");
    let cases: Vec<(&str, Vec<&str>, &str)> = vec![
        (
            "product",
            vec!["product", "cfg3.json", "[a,b]", "[b,c]", "--via", "both"],
            "product.txt",
        ),
        (
            "check",
            vec!["check", "cfg3.json", "--kmax", "4", "--nmax", "2"],
            "check.txt",
        ),
        (
            "hpt-trace",
            vec!["hpt-trace", "cfg3.json", "[a,b]", "[b,c]", "[c,a]"],
            "hpt_trace.txt",
        ),
        (
            "svg",
            vec!["svg", "cfg3.json", "--polygon", "a", "b", "c", "--tree", "-o", "-"],
            "triangle.svg",
        ),
    ];
    let mut done = Vec::new();
    for (name, args, file) in cases {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(env!("CARGO_BIN_EXE_ainf"))
                .args(&args)
                .current_dir(&golden)
                .output()
                .map_err(|e| format!("{name}: {e}"))?;
            if !out.status.success() {
                return Err(format!(
                    "{name}: exit {:?}: {}",
                    out.status.code(),
                    String::from_utf8_lossy(&out.stderr)
                ));
            }
            outputs.push(out.stdout);
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{name}: output differs between runs"));
        }
        let want = std::fs::read(golden.join(file)).map_err(|e| format!("{name}: {e}"))?;
        if outputs[0] != want {
            return Err(format!("{name}: output differs from {file}"));
        }
        done.push(name);
    }
    Ok(format!("{} match their golden files byte for byte", done.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("stasheff-sweep", stasheff),
        ("closed-form-vs-transfer", oracle),
        ("retract-identities", sdr),
        ("worked-examples", worked_examples),
        ("reflex-polygon", reflex_polygon),
        ("degree-law", degree_law),
        ("sign-count", signs),
        ("rescale-functor", functor),
        ("cohomology", cohomology),
        ("tree-counts", trees),
        ("cli-determinism", cli_goldens),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let number = i + 1;
        if !only.is_empty() && !only.contains(&number) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {number:>2} {name}: PASS ({secs:.1}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {number:>2} {name}: FAIL ({secs:.1}s) {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
