use std::collections::BTreeMap;

use proptest::prelude::*;
use thhforge_core::gca::{Algebra, AlgebraPresentation, GeneratorSpec, Monomial};
use thhforge_core::hochschild::*;

fn pres(p: u32, gens: Vec<GeneratorSpec>) -> AlgebraPresentation {
    AlgebraPresentation::new(p, gens)
}

fn alg(p: u32, gens: Vec<GeneratorSpec>, bound: u32) -> Algebra {
    Algebra::new(&pres(p, gens), bound).unwrap()
}

fn samples() -> Vec<Algebra> {
    vec![
        alg(2, vec![GeneratorSpec::polynomial("x", 2)], 16),
        alg(2, vec![GeneratorSpec::exterior("x", 1), GeneratorSpec::polynomial("y", 3)], 16),
        alg(3, vec![GeneratorSpec::exterior("x", 1), GeneratorSpec::polynomial("y", 2)], 16),
        alg(3, vec![GeneratorSpec::exterior("x", 1), GeneratorSpec::exterior("y", 3)], 16),
        alg(5, vec![GeneratorSpec::truncated("y", 2, 5), GeneratorSpec::exterior("z", 1)], 16),
        alg(3, vec![GeneratorSpec::divided_power("g", 2), GeneratorSpec::exterior("z", 3)], 16),
    ]
}

/// A random basic chain with at most `q` reduced slots and internal
/// degree at most 16.
fn random_chain(a: &Algebra, seeds: &[(u32, u32)]) -> HochschildChain {
    let mut slots: Vec<Monomial> = Vec::new();
    let mut left = 16u32;
    for (i, &(d, pick)) in seeds.iter().enumerate() {
        let d = d % (left + 1);
        let basis = a.monomial_basis(d).unwrap();
        let basis: Vec<_> = basis.iter().filter(|m| i == 0 || !a.is_unit(m)).collect();
        if basis.is_empty() {
            if i == 0 {
                slots.push(a.unit());
            }
            continue;
        }
        slots.push(basis[pick as usize % basis.len()].clone());
        left -= d;
    }
    HochschildChain::basic(slots)
}

proptest! {
    #[test]
    fn boundary_squares_to_zero(
        which in 0usize..6,
        seeds in prop::collection::vec((0u32..10, 0u32..50), 1..6),
    ) {
        let a = &samples()[which];
        let c = random_chain(a, &seeds);
        prop_assert!(boundary(a, &boundary(a, &c)).is_zero());
    }

    #[test]
    fn shuffle_satisfies_leibniz(
        which in 0usize..6,
        s1 in prop::collection::vec((0u32..6, 0u32..50), 1..4),
        s2 in prop::collection::vec((0u32..6, 0u32..50), 1..4),
    ) {
        let a = &samples()[which];
        let f = a.field();
        let x = random_chain(a, &s1);
        let y = random_chain(a, &s2);
        let lhs = boundary(a, &shuffle_product(a, &x, &y));
        let rhs1 = shuffle_product(a, &boundary(a, &x), &y);
        let mut rhs2 = shuffle_product(a, &x, &boundary(a, &y));
        if x.q % 2 == 1 {
            rhs2 = rhs2.scale(f, f.neg(1));
        }
        let rhs = rhs1.add(f, &rhs2);
        prop_assert_eq!(lhs.terms, rhs.terms);
    }

    #[test]
    fn shuffle_is_graded_commutative_and_associative(
        which in 0usize..6,
        s1 in prop::collection::vec((0u32..5, 0u32..50), 1..3),
        s2 in prop::collection::vec((0u32..5, 0u32..50), 1..3),
        s3 in prop::collection::vec((0u32..5, 0u32..50), 1..3),
    ) {
        let a = &samples()[which];
        let f = a.field();
        let x = random_chain(a, &s1);
        let y = random_chain(a, &s2);
        let z = random_chain(a, &s3);
        let t = |c: &HochschildChain| {
            let (s, _) = c.terms.iter().next().unwrap();
            s.iter().map(|m| a.degree(m)).sum::<u32>() as usize
        };
        let xy = shuffle_product(a, &x, &y);
        let mut yx = shuffle_product(a, &y, &x);
        if (x.q * y.q + t(&x) * t(&y)) % 2 == 1 {
            yx = yx.scale(f, f.neg(1));
        }
        prop_assert_eq!(&xy.terms, &yx.terms);
        let l = shuffle_product(a, &xy, &z);
        let r = shuffle_product(a, &x, &shuffle_product(a, &y, &z));
        prop_assert_eq!(l.terms, r.terms);
    }

    #[test]
    fn coproduct_is_co_leibniz(
        which in 0usize..6,
        seeds in prop::collection::vec((0u32..8, 0u32..50), 1..6),
    ) {
        let a = &samples()[which];
        let c = random_chain(a, &seeds);
        let lhs = chain_coproduct(a, &boundary(a, &c));
        let rhs = tensor_boundary(a, &chain_coproduct(a, &c));
        prop_assert_eq!(lhs.terms, rhs.terms);
    }

    #[test]
    fn tensor_boundary_squares_to_zero(
        which in 0usize..6,
        seeds in prop::collection::vec((0u32..8, 0u32..50), 1..6),
    ) {
        let a = &samples()[which];
        let c = random_chain(a, &seeds);
        let t = chain_coproduct(a, &c);
        prop_assert!(tensor_boundary(a, &tensor_boundary(a, &t)).is_zero());
    }
}

#[test]
fn boundary_of_one_tensor_x_vanishes() {
    for a in samples() {
        let c = HochschildChain::tensor_power(&a, 0, 1);
        assert!(boundary(&a, &c).is_zero());
    }
}

fn closed_dims(a: &Algebra, n: u32, qmax: usize) -> BTreeMap<(usize, u32), usize> {
    let cf = closed_form_hh(a.presentation()).unwrap();
    let closed = Algebra::new(&cf.presentation, n + qmax as u32 + 2).unwrap();
    bigraded_dims(&closed, n, qmax).unwrap()
}

fn nonzero(d: &BTreeMap<(usize, u32), usize>) -> BTreeMap<(usize, u32), usize> {
    d.iter().filter(|(_, &v)| v > 0).map(|(&k, &v)| (k, v)).collect()
}

#[test]
fn polynomial_and_exterior_match_closed_form() {
    let cases: Vec<(Algebra, u32)> = vec![
        (alg(2, vec![GeneratorSpec::polynomial("x", 2)], 24), 24),
        (alg(2, vec![GeneratorSpec::exterior("x", 1)], 24), 24),
        (alg(2, vec![GeneratorSpec::exterior("x", 1), GeneratorSpec::polynomial("y", 3)], 24), 16),
        (alg(3, vec![GeneratorSpec::polynomial("x", 2)], 24), 24),
        (alg(3, vec![GeneratorSpec::exterior("x", 1)], 24), 24),
        (alg(3, vec![GeneratorSpec::exterior("x", 3), GeneratorSpec::polynomial("y", 4)], 24), 20),
        (alg(5, vec![GeneratorSpec::exterior("x", 1), GeneratorSpec::exterior("y", 3)], 24), 14),
    ];
    for (a, n) in cases {
        let qmax = n as usize;
        let hh = hh_homology(&a, n, qmax, false).unwrap();
        assert_eq!(nonzero(&hh.dims), closed_dims(&a, n, qmax), "{:?}", a.presentation());
    }
}

#[test]
fn polynomial_generator_class() {
    let a = alg(2, vec![GeneratorSpec::polynomial("x", 2)], 8);
    let hh = hh_homology(&a, 8, 8, true).unwrap();
    assert_eq!(hh.dim(1, 2), 1);
    let rep = &hh.reps[&(1, 2)][0];
    assert_eq!(rep.label(&a), "1⊗x");
}

#[test]
fn exterior_divided_power_classes() {
    let a = alg(2, vec![GeneratorSpec::exterior("x", 1)], 8);
    let hh = hh_homology(&a, 8, 8, true).unwrap();
    for i in 1..=8usize {
        assert_eq!(hh.dim(i, i as u32), 1);
        let c = HochschildChain::tensor_power(&a, 0, i);
        assert!(boundary(&a, &c).is_zero());
        assert_eq!(hh.reps[&(i, i as u32)][0], c);
    }
}

#[test]
fn engines_agree() {
    let cases = vec![
        alg(2, vec![GeneratorSpec::truncated("x", 1, 4)], 6),
        alg(2, vec![GeneratorSpec::exterior("x", 1), GeneratorSpec::exterior("y", 2)], 6),
        alg(3, vec![GeneratorSpec::truncated("y", 2, 3), GeneratorSpec::exterior("z", 1)], 6),
        alg(2, vec![GeneratorSpec::idempotent("u"), GeneratorSpec::exterior("x", 1)], 4),
    ];
    for a in cases {
        let n = a.bound();
        let e1 = nonzero(&hh_homology(&a, n, 4, false).unwrap().dims);
        let e2 = FiniteAlgebra::from_algebra(&a).unwrap().hh_dims(n, 4);
        assert_eq!(e1, e2, "{:?}", a.presentation());
    }
}

#[test]
fn shuffle_examples() {
    let a = alg(2, vec![GeneratorSpec::exterior("x", 1)], 8);
    let sx = HochschildChain::tensor_power(&a, 0, 1);
    assert!(shuffle_product(&a, &sx, &sx).is_zero());
    let one = HochschildChain::basic(vec![a.unit()]);
    assert_eq!(shuffle_product(&a, &one, &sx), sx);

    let b = alg(2, vec![GeneratorSpec::exterior("x", 1), GeneratorSpec::exterior("y", 3)], 8);
    let f = b.field();
    let sx = HochschildChain::tensor_power(&b, 0, 1);
    let sy = HochschildChain::tensor_power(&b, 1, 1);
    let sum = shuffle_product(&b, &sx, &sy).add(f, &shuffle_product(&b, &sy, &sx));
    assert!(sum.is_zero());
    assert!(!shuffle_product(&b, &sx, &sy).is_zero());

    // at p = 3 the divided powers of σx behave as γ_1^2 = 2γ_2
    let c = alg(3, vec![GeneratorSpec::exterior("x", 1)], 8);
    let s = HochschildChain::tensor_power(&c, 0, 1);
    let g2 = HochschildChain::tensor_power(&c, 0, 2);
    assert_eq!(shuffle_product(&c, &s, &s), g2.scale(c.field(), 2));
}

#[test]
fn coproduct_examples() {
    for p in [2, 3] {
        let a = alg(p, vec![GeneratorSpec::exterior("x", 1)], 12);
        let mut kb = KunnethBasis::new(&a, 6).unwrap();
        let closed = kb.closed.clone();
        for d in 0..=6 {
            for m in closed.monomial_basis(d).unwrap().iter() {
                let got = kb.coproduct_in_homology(m).unwrap();
                let want = thhforge_core::gca::hopf_coproduct(&closed, &kb.hopf, m);
                assert_eq!(got, want, "p = {p}, {}", closed.label(m));
            }
        }
    }
    let a = alg(2, vec![GeneratorSpec::polynomial("x", 2)], 12);
    let mut kb = KunnethBasis::new(&a, 6).unwrap();
    let closed = kb.closed.clone();
    let sx = closed.parse_monomial("s(x)").unwrap();
    let got = kb.coproduct_in_homology(&sx).unwrap();
    let want: BTreeMap<_, _> = [((sx.clone(), closed.unit()), 1), ((closed.unit(), sx.clone()), 1)].into();
    assert_eq!(got, want);
    let got = kb.coproduct_in_homology(&closed.unit()).unwrap();
    assert_eq!(got, BTreeMap::from([((closed.unit(), closed.unit()), 1)]));
    for d in 0..=6 {
        for m in closed.monomial_basis(d).unwrap().iter() {
            let got = kb.coproduct_in_homology(m).unwrap();
            let want = thhforge_core::gca::hopf_coproduct(&closed, &kb.hopf, m);
            assert_eq!(got, want, "{}", closed.label(m));
        }
    }
}

#[test]
fn truncated_input_is_rejected_or_not_flat() {
    let a = alg(3, vec![GeneratorSpec::truncated("y", 2, 2)], 12);
    assert!(KunnethBasis::new(&a, 6).is_err());
}

#[test]
fn bar_roundtrips() {
    let p = alg(2, vec![GeneratorSpec::polynomial("x", 2)], 8);
    assert!(bar_roundtrip_check(&p, 8, 1).unwrap());
    let e = alg(2, vec![GeneratorSpec::exterior("x", 1)], 8);
    assert!(bar_roundtrip_check(&e, 4, 2).unwrap());
    let e3 = alg(3, vec![GeneratorSpec::exterior("x", 1), GeneratorSpec::polynomial("y", 2)], 8);
    assert!(bar_roundtrip_check(&e3, 5, 2).unwrap());
    let x = p.letter(0);
    let got = bar_roundtrip(&p, &[x.clone(), x.clone()]);
    assert_eq!(got, BTreeMap::from([(vec![x.clone(), x], 1)]));
}

#[test]
fn squarezero_matches_direct_computation() {
    let cases: Vec<(u32, Vec<u32>)> = vec![
        (2, vec![1]),
        (2, vec![1, 2]),
        (3, vec![1, 2]),
        (3, vec![1, 1, 2]),
        (2, vec![2, 3, 3]),
        (5, vec![2, 3, 4]),
    ];
    for (p, v) in cases {
        let n = 10;
        let qmax = 5;
        let closed = hh_squarezero(p, &v, n, qmax).unwrap();
        let a = Algebra::new(&square_zero_presentation(p, &v), n).unwrap();
        let direct = nonzero(&hh_homology(&a, n, qmax, false).unwrap().dims);
        assert_eq!(closed, direct, "p = {p}, V = {v:?}");
    }
}

#[test]
fn squarezero_two_odd_classes() {
    let dims = hh_squarezero(2, &[1, 1], 6, 1).unwrap();
    let hh1: usize = dims.iter().filter(|((q, _), _)| *q == 1).map(|(_, d)| d).sum();
    assert_eq!(hh1, 5);
}

#[test]
fn closed_form_for_hf_p() {
    // A_* at p = 3 through degree 12: ξ̄_1 (4), ξ̄_2 (16); τ̄_0 (1), τ̄_1 (5), τ̄_2 (17)
    let a = pres(
        3,
        vec![
            GeneratorSpec::polynomial("xib1", 4),
            GeneratorSpec::exterior("taub0", 1),
            GeneratorSpec::exterior("taub1", 5),
        ],
    );
    let cf = closed_form_hh(&a).unwrap();
    let kinds: Vec<_> = cf.presentation.generators[3..]
        .iter()
        .map(|g| (g.name.as_str(), g.degree, g.kind, g.filtration))
        .collect();
    use thhforge_core::gca::Kind::*;
    assert_eq!(
        kinds,
        vec![
            ("s(xib1)", 5, Exterior, 1),
            ("s(taub0)", 2, DividedPower, 1),
            ("s(taub1)", 6, DividedPower, 1),
        ]
    );
    let bad = pres(3, vec![GeneratorSpec::truncated("y", 2, 2)]);
    assert!(closed_form_hh(&bad).is_err());
}

#[test]
fn squarezero_on_suspended_kernel_module() {
    use thhforge_core::steenrod::{module_map_kernel, quotient_module, SteenrodElement, SubalgebraSpec};
    let el = |s: &str| SteenrodElement::parse(s).unwrap();
    let a2 = SubalgebraSpec::A(2);
    let mut source = quotient_module(&a2, &[el("Sq1"), el("Sq2Sq3")]).unwrap();
    source.shift = 4;
    let target = quotient_module(&a2, &[el("Sq1"), el("Sq2")]).unwrap();
    let k = module_map_kernel(&el("Sq4"), &source, &target).unwrap().kernel;
    let series = k.poincare_series();
    let low = *series.keys().next().unwrap();
    let mut v: Vec<u32> = Vec::new();
    for (d, n) in series {
        v.extend(std::iter::repeat_n((d - low + 7) as u32, n));
    }
    assert_eq!(v, vec![7, 9, 10, 11, 12, 13, 13, 14, 15, 16, 16, 17, 18, 19, 20, 22, 23]);
    let n = 4 * 23;
    let qmax = 3;
    let closed = hh_squarezero(2, &v, n, qmax).unwrap();
    let a = Algebra::new(&square_zero_presentation(2, &v), n).unwrap();
    let direct = nonzero(&hh_homology(&a, n, qmax, false).unwrap().dims);
    assert_eq!(closed, direct);
    // HH_1 ≅ V ⊕ (V⊗V)_{C_2}: 17 + 17·18/2
    let hh1: usize = closed.iter().filter(|((q, _), _)| *q == 1).map(|(_, d)| d).sum();
    assert_eq!(hh1, 17 + 153);
}
