use laminatron::curves::words::{self, linked_pairs};
use laminatron::curves::{
    fills, intersection, regions, Curve, Generator, Interval, Letter, MappingClass, Surface,
};
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

fn braid(n: usize, len: usize) -> impl Strategy<Value = Vec<(usize, bool)>> {
    prop::collection::vec((1..n, any::<bool>()), 0..=len)
}

fn round(n: usize) -> impl Strategy<Value = Interval> {
    (1..n, 1..n).prop_filter_map("essential round curve", move |(a, l)| Interval::new(a, a + l, n).ok())
}

fn curve(s: Surface, iv: Interval, w: &[(usize, bool)]) -> Curve {
    let letters: Vec<Letter> = w.iter().map(|&(i, inverse)| Letter::Half { i, inverse }).collect();
    Curve::round(s, iv).unwrap().apply_letters(&letters).unwrap()
}

fn mapping(s: Surface, w: &[(usize, bool)]) -> MappingClass {
    MappingClass::new(s, w.iter().map(|&(i, inv)| Generator::half(i, inv)).collect())
}

fn pair() -> impl Strategy<Value = (usize, Interval, Vec<(usize, bool)>, Interval, Vec<(usize, bool)>)> {
    (4usize..=6).prop_flat_map(|n| (Just(n), round(n), braid(n, 8), round(n), braid(n, 8)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn coordinates_agree_with_linked_pair_oracle((n, i1, w1, i2, w2) in pair()) {
        let s = Surface::sphere(n + 1).unwrap();
        let (x, y) = (curve(s, i1, &w1), curve(s, i2, &w2));
        let (p, q) = (x.word(10_000).unwrap(), y.word(10_000).unwrap());
        let oracle = if words::same_cyclic_class(&p, &q) { 0 } else { linked_pairs(&p, &q, n) };
        prop_assert_eq!(intersection(&x, &y).unwrap(), BigInt::from(oracle));
    }

    #[test]
    fn intersection_is_symmetric((n, i1, w1, i2, w2) in pair()) {
        let s = Surface::sphere(n + 1).unwrap();
        let (x, y) = (curve(s, i1, &w1), curve(s, i2, &w2));
        prop_assert_eq!(intersection(&x, &y).unwrap(), intersection(&y, &x).unwrap());
        prop_assert_eq!(intersection(&x, &x).unwrap(), BigInt::from(0));
    }

    #[test]
    fn mapping_classes_preserve_intersection(
        (n, i1, w1, i2, w2, g) in (4usize..=6).prop_flat_map(|n| (Just(n), round(n), braid(n, 6), round(n), braid(n, 6), braid(n, 12)))
    ) {
        let s = Surface::sphere(n + 1).unwrap();
        let (x, y) = (curve(s, i1, &w1), curve(s, i2, &w2));
        let f = mapping(s, &g);
        let (fx, fy) = (f.apply(&x).unwrap(), f.apply(&y).unwrap());
        prop_assert_eq!(intersection(&fx, &fy).unwrap(), intersection(&x, &y).unwrap());
        prop_assert_eq!(f.inverse().apply(&fx).unwrap(), x);
    }

    #[test]
    fn twist_inequality(
        (n, ia, wa, ib, wb, ic, wc, e) in (4usize..=6).prop_flat_map(|n| (
            Just(n), round(n), braid(n, 5), round(n), braid(n, 5), round(n), braid(n, 5), -40i64..=40))
    ) {
        let s = Surface::sphere(n + 1).unwrap();
        let (a, d, dp) = (curve(s, ia, &wa), curve(s, ib, &wb), curve(s, ic, &wc));
        let td = a.twist(e).apply(&d).unwrap();
        let lhs = intersection(&td, &dp).unwrap();
        let pred = BigInt::from(e.abs()) * intersection(&a, &d).unwrap() * intersection(&a, &dp).unwrap();
        prop_assert!((lhs - pred).abs() <= intersection(&d, &dp).unwrap());
    }

    #[test]
    fn realizations_certify((n, i1, w1, i2, w2) in pair()) {
        let s = Surface::sphere(n + 1).unwrap();
        let (x, y) = (curve(s, i1, &w1), curve(s, i2, &w2));
        prop_assume!(x != y);
        let r = regions(&[x.clone(), y.clone()]).unwrap();
        prop_assert_eq!(BigInt::from(r.crossings[0][1]), intersection(&x, &y).unwrap());
        let _ = fills(&[x, y]).unwrap();
    }

    #[test]
    fn triple_realizations_certify(
        (n, i1, w1, i2, w2, i3, w3) in (4usize..=6).prop_flat_map(|n| (
            Just(n), round(n), braid(n, 7), round(n), braid(n, 7), round(n), braid(n, 7)))
    ) {
        let s = Surface::sphere(n + 1).unwrap();
        let cs = [curve(s, i1, &w1), curve(s, i2, &w2), curve(s, i3, &w3)];
        prop_assume!(cs[0] != cs[1] && cs[1] != cs[2] && cs[0] != cs[2]);
        let r = regions(&cs).unwrap();
        prop_assert_eq!(r.count(), r.crossings[0][1] + r.crossings[0][2] + r.crossings[1][2] + 1 + r.components);
    }

    #[test]
    fn words_untangle_back((n, i1, w1) in (4usize..=6).prop_flat_map(|n| (Just(n), round(n), braid(n, 8)))) {
        let s = Surface::sphere(n + 1).unwrap();
        let x = curve(s, i1, &w1);
        let w = x.word(10_000).unwrap();
        prop_assert_eq!(Curve::from_word(s, &w).unwrap(), x.clone());
        prop_assert_eq!(Curve::from_coords(s, x.coords().to_vec()).unwrap(), x);
    }
}
