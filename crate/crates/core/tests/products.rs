use lagrangian_ainf::category::LineCategory;
use lagrangian_ainf::geometry::{Line, LineConfig};
use lagrangian_ainf::products::{Branch, Products};
use lagrangian_ainf::verify::{random_config, rng, stasheff_sweep, Mode, SweepOptions};
use proptest::prelude::*;

fn config(lines: &[(&str, &str, &str)]) -> LineCategory {
    let q = |s: &str| s.parse().unwrap();
    LineCategory::new(LineConfig::new(lines.iter().map(|(id, t, s)| Line::new(*id, q(t), q(s))).collect()).unwrap())
}

fn cfg3() -> LineCategory {
    config(&[("a", "0", "0"), ("b", "1", "0"), ("c", "2", "-2")])
}

fn quad_open() -> LineCategory {
    config(&[
        ("a", "-1/2", "0"),
        ("b", "2", "0"),
        ("c", "-2/3", "8/3"),
        ("d", "1/2", "-2"),
    ])
}

fn eval(cat: &LineCategory, args: &[&str]) -> String {
    let w = cat.parse_tuple(args).unwrap();
    Products::new(cat).product(&w).render(cat)
}

#[test]
fn triangle_products() {
    let cat = cfg3();
    assert_eq!(eval(&cat, &["[a,b]", "[b,c]"]), "exp(-1)*[a,c]");
    assert_eq!(eval(&cat, &["[a,b]", "[b,a]"]), "dl(a,b)@a");
    assert_eq!(eval(&cat, &["[b,c]", "[c,a]"]), "exp(-1)*[b,a]");
    assert_eq!(eval(&cat, &["[a,c]", "[c,b]"]), "0");
}

#[test]
fn unit_acts_trivially() {
    let cat = cfg3();
    assert_eq!(eval(&cat, &["one@a", "[a,b]"]), "[a,b]");
    assert_eq!(eval(&cat, &["[a,b]", "one@b"]), "[a,b]");
    assert_eq!(eval(&cat, &["one@a", "one@a", "[a,b]"]), "0");
}

#[test]
fn quadrilateral_fan_and_telescope() {
    let cat = quad_open();
    let products = Products::new(&cat);
    let w = cat.parse_tuple(&["[a,b]", "[b,c]", "[c,d]", "[d,a]"]).unwrap();
    let (branch, value) = products.product_with_branch(&w);
    assert_eq!(branch, Branch::ClosedPolygon);
    assert_eq!(value, products.transfer().product(&w));
    assert!(!value.is_zero());
}

#[test]
fn closed_forms_agree_with_transfer_on_short_tuples() {
    for cat in [cfg3(), quad_open()] {
        let products = Products::new(&cat);
        let alphabet = cat.alphabet(1);
        for x in &alphabet {
            for y in alphabet.iter().filter(|y| y.source() == x.target()) {
                let w = [*x, *y];
                assert_eq!(
                    products.product(&w),
                    products.transfer().product(&w),
                    "{}",
                    cat.render_tuple(&w)
                );
                for z in alphabet.iter().filter(|z| z.source() == y.target()) {
                    let w = [*x, *y, *z];
                    assert_eq!(
                        products.product(&w),
                        products.transfer().product(&w),
                        "{}",
                        cat.render_tuple(&w)
                    );
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn random_configurations_satisfy_stasheff(seed in 0u64..10_000, n in 3usize..=4) {
        let cat = LineCategory::new(random_config(&mut rng(seed), n));
        let report = stasheff_sweep(&cat, SweepOptions { k_max: 3, n_max: 1, mode: Mode::Sequential, cross_check: true });
        prop_assert!(report.is_clean(), "{:?}", report.oracle_mismatches);
    }
}
