use std::collections::BTreeMap;

use proptest::prelude::*;
use thhforge_core::bokstedt::{catalog, SpectrumId};
use thhforge_core::fplin::{binomial_mod, PrimeField};
use thhforge_core::gca::{
    coaction, poincare_series, Algebra, AlgebraPresentation, CoTensor, CoactionTable, Element, GeneratorSpec,
    Monomial,
};

fn mixed(p: u32) -> AlgebraPresentation {
    AlgebraPresentation::new(
        p,
        vec![
            GeneratorSpec::polynomial("x", 2),
            GeneratorSpec::exterior("e", 1),
            GeneratorSpec::exterior("f", 3),
            GeneratorSpec::truncated("t", 4, p),
            GeneratorSpec::divided_power("g", 2),
        ],
    )
}

fn all_monomials(alg: &Algebra, max: u32) -> Vec<Monomial> {
    (0..=max).flat_map(|d| alg.monomial_basis(d).unwrap().as_ref().clone()).collect()
}

#[test]
fn multiplication_is_associative_and_graded_commutative() {
    for p in [2, 3] {
        let alg = Algebra::new(&mixed(p), 20).unwrap();
        let f = alg.field().clone();
        let monos = all_monomials(&alg, 20);
        let el = |m: &Monomial| Element::monomial(m.clone());
        for a in &monos {
            for b in &monos {
                let da = alg.degree(a);
                let db = alg.degree(b);
                if da + db > 20 {
                    continue;
                }
                let ab = alg.mul(&el(a), &el(b));
                let ba = alg.mul(&el(b), &el(a));
                let sign = if da % 2 == 1 && db % 2 == 1 { f.neg(1) } else { 1 };
                assert_eq!(ab, ba.scale(&f, sign), "p={p} {a:?} {b:?}");
                for c in &monos {
                    if da + db + alg.degree(c) > 20 {
                        continue;
                    }
                    assert_eq!(alg.mul(&ab, &el(c)), alg.mul(&el(a), &alg.mul(&el(b), &el(c))));
                }
            }
        }
    }
}

#[test]
fn divided_power_law() {
    for p in [2, 3, 5] {
        let alg = Algebra::new(&AlgebraPresentation::new(p, vec![GeneratorSpec::divided_power("g", 2)]), 24).unwrap();
        let f = alg.field().clone();
        for i in 0..=12u32 {
            for j in 0..=12 - i {
                let lhs = alg.mul(&alg.divided_power(0, i).unwrap(), &alg.divided_power(0, j).unwrap());
                let c = binomial_mod((i + j) as u64, i as u64, p);
                let rhs = alg.divided_power(0, i + j).unwrap().scale(&f, c);
                assert_eq!(lhs, rhs, "p={p} γ{i}γ{j}");
            }
        }
    }
}

fn convolve(a: &[usize], b: &[usize]) -> Vec<usize> {
    (0..a.len()).map(|n| (0..=n).map(|i| a[i] * b[n - i]).sum()).collect()
}

#[test]
fn series_of_tensor_product_is_convolution() {
    for p in [2, 3] {
        let a = mixed(p);
        let b = AlgebraPresentation::new(
            p,
            vec![GeneratorSpec::polynomial("y", 4), GeneratorSpec::divided_power("h", 6), GeneratorSpec::exterior("z", 5)],
        );
        let sa = poincare_series(&Algebra::new(&a, 30).unwrap(), 30);
        let sb = poincare_series(&Algebra::new(&b, 30).unwrap(), 30);
        let st = poincare_series(&Algebra::new(&a.tensor(&b), 30).unwrap(), 30);
        assert_eq!(st, convolve(&sa, &sb));
        // and against counting the basis
        let alg = Algebra::new(&a, 30).unwrap();
        let counted: Vec<usize> = (0..=30).map(|d| alg.monomial_basis(d).unwrap().len()).collect();
        assert_eq!(sa, counted);
    }
}

fn cotensor_product(alg: &Algebra, x: &CoTensor, y: &CoTensor) -> CoTensor {
    let f = alg.field();
    let p = alg.p();
    let mut terms = BTreeMap::new();
    for ((a, m), &c) in &x.terms {
        for ((b, n), &d) in &y.terms {
            let Some((ab, s1)) = a.mul(b) else { continue };
            let Some((mn, s2)) = alg.mul_mono(m, n) else { continue };
            let s3 = alg.is_odd(m) && b.degree(p) % 2 == 1;
            let k = f.mul(c, d);
            let k = if p != 2 && (s1 ^ s2 ^ s3) { f.neg(k) } else { k };
            let e: &mut u32 = terms.entry((ab, mn)).or_insert(0);
            *e = f.add(*e, k);
        }
    }
    terms.retain(|_, c| *c != 0);
    CoTensor { terms }
}

fn base_with_coaction(id: SpectrumId, p: u32, bound: u32) -> (Algebra, CoactionTable) {
    let entry = catalog(id, p, bound).unwrap();
    let alg = entry.base_algebra().unwrap();
    let table = CoactionTable::from_spec(&alg, &entry.coaction).unwrap();
    (alg, table)
}

#[test]
fn coaction_is_multiplicative() {
    for (id, p, bound) in [(SpectrumId::Ku, 2, 24), (SpectrumId::Hf, 3, 30), (SpectrumId::Hz, 2, 20)] {
        let (alg, table) = base_with_coaction(id, p, bound);
        let monos = all_monomials(&alg, bound / 2);
        for a in &monos {
            for b in &monos {
                let Some((ab, neg)) = alg.mul_mono(a, b) else { continue };
                let lhs = coaction(&alg, &table, &ab).unwrap();
                let rhs = cotensor_product(
                    &alg,
                    &coaction(&alg, &table, a).unwrap(),
                    &coaction(&alg, &table, b).unwrap(),
                );
                let f: &PrimeField = alg.field();
                let lhs = if neg {
                    CoTensor {
                        terms: lhs.terms.into_iter().map(|(k, c)| (k, f.neg(c))).collect(),
                    }
                } else {
                    lhs
                };
                assert_eq!(lhs, rhs, "{id:?} p={p} {} {}", alg.label(a), alg.label(b));
            }
        }
    }
}

proptest! {
    #[test]
    fn parse_label_roundtrip(p in prop::sample::select(vec![2u32, 3]), d in 0u32..=16, pick in any::<prop::sample::Index>()) {
        let alg = Algebra::new(&mixed(p), 16).unwrap();
        let basis = alg.monomial_basis(d).unwrap();
        prop_assume!(!basis.is_empty());
        let m = &basis[pick.index(basis.len())];
        prop_assert_eq!(&alg.parse_monomial(&alg.label(m)).unwrap(), m);
    }
}
