use proptest::prelude::*;
use thhforge_core::fplin::{rank, Echelon, PrimeField, SparseMat, SparseVec};
use thhforge_core::steenrod::dual::{antipode, milnor_basis_in, DualElement, Tensor};
use thhforge_core::steenrod::*;

fn el(s: &str) -> SteenrodElement {
    SteenrodElement::parse(s).unwrap()
}

fn f2() -> PrimeField {
    PrimeField::new(2).unwrap()
}

#[test]
fn a2_has_rank_64() {
    assert_eq!(total_rank(&SubalgebraSpec::A(2)).unwrap(), 64);
}

#[test]
fn a_n_ranks_match_milnor_count() {
    // |A_n| = 2^{(n+1)(n+2)/2}
    for n in 0..=2u32 {
        let expected = 1usize << ((n + 1) * (n + 2) / 2);
        assert_eq!(total_rank(&SubalgebraSpec::A(n)).unwrap(), expected);
    }
}

fn kernel_setup() -> (GradedModule, GradedModule, MapKernel) {
    let a2 = SubalgebraSpec::A(2);
    let mut source = quotient_module(&a2, &[el("Sq1"), el("Sq2Sq3")]).unwrap();
    source.shift = 4;
    let target = quotient_module(&a2, &[el("Sq1"), el("Sq2")]).unwrap();
    let k = module_map_kernel(&el("Sq4"), &source, &target).unwrap();
    (source, target, k)
}

#[test]
fn sq4_kernel_ranks() {
    let (source, target, k) = kernel_setup();
    assert_eq!(source.total_rank(), 24);
    assert_eq!(target.total_rank(), 8);
    assert_eq!(k.kernel_rank, 17);
    assert_eq!(k.cokernel_rank, 1);
}

const LISTED: [&str; 17] = [
    "Sq4",
    "Sq6",
    "Sq7",
    "Sq6Sq2",
    "Sq9",
    "Sq10+Sq8Sq2",
    "Sq7Sq3",
    "Sq11+Sq9Sq2",
    "Sq10Sq2",
    "Sq13+Sq10Sq3",
    "Sq11Sq2",
    "Sq11Sq3",
    "Sq13Sq2+Sq12Sq3",
    "Sq13Sq3",
    "Sq17+Sq15Sq2",
    "Sq17Sq2+Sq16Sq3",
    "Sq17Sq3",
];

/// Span of `A·gens` in degree `d` of the full algebra.
fn left_ideal(gens: &[SteenrodElement], d: u32) -> Vec<SparseVec> {
    let mut out = Vec::new();
    for g in gens {
        let gd = g.degree().unwrap();
        if gd <= d {
            for b in admissible_basis(d - gd).iter() {
                let x = SteenrodElement::from_monomial(b.clone()).mul(g);
                out.push(to_vector(&x, d));
            }
        }
    }
    out
}

#[test]
fn listed_kernel_basis_spans_the_kernel() {
    let (_, _, k) = kernel_setup();
    let ideal = [el("Sq1"), el("Sq2Sq3")];
    let target_ideal = [el("Sq1"), el("Sq2")];
    let listed: Vec<SteenrodElement> = LISTED.iter().map(|s| el(s)).collect();
    let f = f2();
    let a2 = SubalgebraSpec::A(2);
    for d in 0..=23u32 {
        let n = admissible_basis(d).len();
        let rel = left_ideal(&ideal, d);
        let here: Vec<&SteenrodElement> =
            listed.iter().filter(|x| x.degree() == Some(d)).collect();
        // listed elements are classes of A_2 + A·I, independent modulo A·I
        let mut w = Echelon::new(&f, n);
        for v in steenrod_basis(&a2, d).iter().map(|b| to_vector(b, d)).chain(rel.clone()) {
            w.insert(&v);
        }
        let mut listed_span = Echelon::new(&f, n);
        for v in &rel {
            listed_span.insert(v);
        }
        let base = listed_span.dim();
        for x in &here {
            assert!(w.contains(&to_vector(x, d)), "{x} not in A_2 + A·I");
            // x·Sq^4 vanishes in A//A_1
            let y = x.mul(&el("Sq4"));
            let mut t = Echelon::new(&f, admissible_basis(d + 4).len());
            for v in left_ideal(&target_ideal, d + 4) {
                t.insert(&v);
            }
            assert!(t.contains(&to_vector(&y, d + 4)), "{x}·Sq4 != 0");
            listed_span.insert(&to_vector(x, d));
        }
        assert_eq!(listed_span.dim() - base, here.len(), "degree {d}: dependent");
        // and they span the computed kernel modulo A·I
        let mut kernel_span = Echelon::new(&f, n);
        for v in &rel {
            kernel_span.insert(v);
        }
        for b in k.kernel.basis(d) {
            kernel_span.insert(&to_vector(&b, d));
        }
        assert_eq!(kernel_span.dim(), listed_span.dim(), "degree {d}");
        for v in listed_span.basis() {
            assert!(kernel_span.contains(&v), "degree {d}");
        }
    }
    assert_eq!(k.kernel.total_rank(), LISTED.len());
}

#[test]
fn kernel_is_cyclic_with_expected_annihilator() {
    let (_, _, k) = kernel_setup();
    let ann = [el("Sq1"), el("Sq7"), el("Sq10+Sq8Sq2+Sq7Sq3")];
    assert_eq!(ann[2], adem_reduce(&[4, 6]).unwrap().add(&adem_reduce(&[6, 4]).unwrap()));
    assert!(cyclic_and_annihilator_check(&k.kernel, &el("Sq4"), &ann).unwrap());
    assert!(!cyclic_and_annihilator_check(&k.kernel, &el("Sq4"), &ann[..1]).unwrap());
}

#[test]
fn kernel_poincare_series() {
    let (_, _, k) = kernel_setup();
    // module degrees of Σ^8 K
    let degrees: Vec<i32> = k
        .kernel
        .poincare_series()
        .into_iter()
        .flat_map(|(d, n)| std::iter::repeat(d - 8).take(n))
        .collect();
    assert_eq!(degrees, vec![0, 2, 3, 4, 5, 6, 6, 7, 8, 9, 9, 10, 11, 12, 13, 15, 16]);
}

#[test]
fn admissible_and_milnor_dimensions_agree() {
    for d in 0..=30u64 {
        assert_eq!(
            admissible_basis(d as u32).len(),
            milnor_basis_in(2, d, false).len(),
            "degree {d}"
        );
    }
}

#[test]
fn pairing_matrix_is_invertible() {
    let f = f2();
    for d in 0..=20u32 {
        let adm = admissible_basis(d);
        let mil = milnor_basis_in(2, d as u64, false);
        assert_eq!(adm.len(), mil.len());
        let mut entries = Vec::new();
        for (i, a) in adm.iter().enumerate() {
            let a = SteenrodElement::from_monomial(a.clone());
            for (j, m) in mil.iter().enumerate() {
                entries.push((i, j, pairing(&a, m).unwrap()));
            }
        }
        let mat = SparseMat::from_entries(&f, adm.len(), mil.len(), entries);
        assert_eq!(rank(&f, &mat), adm.len(), "degree {d}");
    }
}

#[test]
fn milnor_primitives_pair_with_xi() {
    for k in 0..=3u32 {
        let q = milnor_primitive(k);
        let d = (1u64 << (k + 1)) - 1;
        for m in milnor_basis_in(2, d, false) {
            let expected = (m == MilnorMonomial::xi_power(k + 1, 1, false)) as u32;
            assert_eq!(pairing(&q, &m).unwrap(), expected, "Q_{k} on {m}");
        }
    }
}

fn all_monomials(p: u32, max: u64, conj: bool) -> Vec<MilnorMonomial> {
    (0..=max).flat_map(|d| milnor_basis_in(p, d, conj)).collect()
}

#[test]
fn conjugation_is_an_involution() {
    for (p, max) in [(2, 20), (3, 40), (5, 40)] {
        for conj in [false, true] {
            for m in all_monomials(p, max, conj) {
                let back = conjugate(p, &m).in_alphabet(conj);
                assert_eq!(back, DualElement::monomial(p, m.clone()), "p={p} {m}");
            }
        }
    }
}

fn mult(t: &Tensor, p: u32, left: bool) -> DualElement {
    // μ(χ⊗1)ψ or μ(1⊗χ)ψ
    let mut out = DualElement::zero(p);
    for (key, c) in t.terms() {
        let (a, b) = (&key[0], &key[1]);
        let (a, b) = if left {
            (antipode(p, a), DualElement::monomial(p, b.clone()))
        } else {
            (DualElement::monomial(p, a.clone()), antipode(p, b))
        };
        out = out.add(&a.mul(&b).scale(c));
    }
    out
}

#[test]
fn antipode_identities() {
    for (p, max) in [(2, 16), (3, 30)] {
        for conj in [false, true] {
            for m in all_monomials(p, max, conj).into_iter().filter(|m| !m.is_one()) {
                let t = milnor_coproduct(p, &m);
                assert!(mult(&t, p, true).is_zero(), "p={p} {m}");
                assert!(mult(&t, p, false).is_zero(), "p={p} {m}");
            }
        }
    }
}

#[test]
fn alphabets_have_compatible_coproducts() {
    for (p, max) in [(2, 20), (3, 40)] {
        for m in all_monomials(p, max, true) {
            let direct = milnor_coproduct(p, &m).in_alphabet(false);
            let mut via = Tensor::zero(p);
            for (mm, c) in DualElement::monomial(p, m.clone()).in_alphabet(false).terms() {
                let mut t = Tensor::zero(p);
                for (k, d) in milnor_coproduct(p, mm).terms() {
                    t.add_term(k.clone(), c * d);
                }
                via = via.add(&t);
            }
            assert_eq!(direct, via, "p={p} {m}");
        }
    }
}

#[test]
fn coassociativity() {
    for (p, max) in [(2, 20), (3, 40)] {
        for conj in [false, true] {
            for m in all_monomials(p, max, conj) {
                let t = milnor_coproduct(p, &m);
                let t = Tensor::clone(&t);
                assert_eq!(t.expand(0), t.expand(1), "p={p} {m}");
            }
        }
    }
}

fn admissible_word() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..9, 0..5)
}

proptest! {
    #[test]
    fn adem_output_is_admissible(word in admissible_word()) {
        let e = adem_reduce(&word).unwrap();
        let d: u32 = word.iter().sum();
        for m in e.terms() {
            prop_assert!(m.is_admissible());
            prop_assert_eq!(m.degree(), d);
        }
    }

    #[test]
    fn adem_fixes_admissible_words(d in 0u32..24, pick in any::<prop::sample::Index>()) {
        let basis = admissible_basis(d);
        let m = &basis[pick.index(basis.len())];
        let e = adem_reduce(&m.0).unwrap();
        prop_assert_eq!(e, SteenrodElement::from_monomial(m.clone()));
    }

    #[test]
    fn multiplication_is_associative(a in admissible_word(), b in admissible_word(), c in admissible_word()) {
        let (x, y, z) = (
            adem_reduce(&a).unwrap(),
            adem_reduce(&b).unwrap(),
            adem_reduce(&c).unwrap(),
        );
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
    }

    #[test]
    fn pairing_adjunction(
        da in 0u32..9,
        db in 0u32..9,
        ia in any::<prop::sample::Index>(),
        ib in any::<prop::sample::Index>(),
        im in any::<prop::sample::Index>(),
    ) {
        let ba = admissible_basis(da);
        let bb = admissible_basis(db);
        let a = SteenrodElement::from_monomial(ba[ia.index(ba.len())].clone());
        let b = SteenrodElement::from_monomial(bb[ib.index(bb.len())].clone());
        let ms = milnor_basis_in(2, (da + db) as u64, false);
        let m = &ms[im.index(ms.len())];
        let lhs = pairing(&a.mul(&b), m).unwrap();
        let mut rhs = 0;
        for (k, c) in milnor_coproduct(2, m).terms() {
            if k[0].degree(2) == da as u64 {
                rhs ^= c & pairing(&a, &k[0]).unwrap() & pairing(&b, &k[1]).unwrap();
            }
        }
        prop_assert_eq!(lhs, rhs);
    }
}
