//! Normalized Hochschild complexes of presented graded-commutative
//! algebras: homology, shuffle products, the chain-level coproduct, the
//! bar-construction roundtrip, closed forms and square-zero extensions.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::fplin::{kernel_basis, rank, Echelon, PrimeField, SparseMat, SparseVec, Subquotient};
use crate::gca::{
    poincare_series, Algebra, AlgebraPresentation, Element, GeneratorSpec, HopfData, Kind,
    Monomial,
};
use crate::{Error, Result};

/// `λ_0 ⊗ λ̄_1 ⊗ ⋯ ⊗ λ̄_q` sums, keyed by the tuple of monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HochschildChain {
    pub q: usize,
    pub terms: BTreeMap<Vec<Monomial>, u32>,
}

impl HochschildChain {
    pub fn zero(q: usize) -> Self {
        HochschildChain {
            q,
            terms: BTreeMap::new(),
        }
    }

    pub fn basic(slots: Vec<Monomial>) -> Self {
        let q = slots.len() - 1;
        let mut c = Self::zero(q);
        c.terms.insert(slots, 1);
        c
    }

    /// `1 ⊗ x ⊗ ⋯ ⊗ x` with `n` copies of the letter.
    pub fn tensor_power(alg: &Algebra, letter: usize, n: usize) -> Self {
        let mut slots = vec![alg.unit()];
        slots.extend(std::iter::repeat_n(alg.letter(letter), n));
        Self::basic(slots)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, f: &PrimeField, key: Vec<Monomial>, c: u32) {
        add_into(&mut self.terms, f, key, c);
    }

    pub fn add(&self, f: &PrimeField, other: &HochschildChain) -> HochschildChain {
        let mut out = self.clone();
        for (k, &c) in &other.terms {
            out.add_term(f, k.clone(), c);
        }
        out
    }

    pub fn scale(&self, f: &PrimeField, c: u32) -> HochschildChain {
        let mut out = HochschildChain::zero(self.q);
        for (k, &d) in &self.terms {
            out.add_term(f, k.clone(), f.mul(c, d));
        }
        out
    }

    pub fn label(&self, alg: &Algebra) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(k, &c)| {
                let t: Vec<String> = k.iter().map(|m| alg.label(m)).collect();
                let t = t.join("⊗");
                if c == 1 {
                    t
                } else {
                    format!("{c}·{t}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn add_into<K: Ord + Clone>(map: &mut BTreeMap<K, u32>, f: &PrimeField, key: K, c: u32) {
    let c = f.reduce(c as i64);
    if c == 0 {
        return;
    }
    let e = map.entry(key.clone()).or_insert(0);
    *e = f.add(*e, c);
    if *e == 0 {
        map.remove(&key);
    }
}

fn signed(f: &PrimeField, c: u32, neg: bool) -> u32 {
    if neg {
        f.neg(c)
    } else {
        c
    }
}

/// The Hochschild boundary on one basic tensor.
fn boundary_term(alg: &Algebra, slots: &[Monomial]) -> Vec<(Vec<Monomial>, bool)> {
    let q = slots.len() - 1;
    let mut out = Vec::new();
    if q == 0 {
        return out;
    }
    for i in 0..q {
        if let Some((m, neg)) = alg.mul_mono(&slots[i], &slots[i + 1]) {
            if i > 0 && alg.is_unit(&m) {
                continue;
            }
            let mut key = slots[..i].to_vec();
            key.push(m);
            key.extend_from_slice(&slots[i + 2..]);
            out.push((key, neg ^ (i % 2 == 1)));
        }
    }
    let last = &slots[q];
    if let Some((m, neg)) = alg.mul_mono(last, &slots[0]) {
        let before: u32 = slots[..q].iter().map(|s| alg.degree(s)).sum();
        let eps = alg.degree(last) as u64 * before as u64;
        let mut key = vec![m];
        key.extend_from_slice(&slots[1..q]);
        out.push((key, neg ^ ((q as u64 + eps) % 2 == 1)));
    }
    out
}

pub fn boundary(alg: &Algebra, c: &HochschildChain) -> HochschildChain {
    let f = alg.field();
    let mut out = HochschildChain::zero(c.q.saturating_sub(1));
    for (slots, &k) in &c.terms {
        for (key, neg) in boundary_term(alg, slots) {
            out.add_term(f, key, signed(f, k, neg && alg.p() != 2));
        }
    }
    out
}

/// One bigraded cell of Hochschild homology.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct HHCell {
    pub q: usize,
    pub t: u32,
    pub dim: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub representatives: Vec<String>,
}

/// Bigraded Hochschild homology through the requested bounds.
#[derive(Clone, Debug)]
pub struct HHResult {
    pub dims: BTreeMap<(usize, u32), usize>,
    pub reps: BTreeMap<(usize, u32), Vec<HochschildChain>>,
}

impl HHResult {
    pub fn dim(&self, q: usize, t: u32) -> usize {
        self.dims.get(&(q, t)).copied().unwrap_or(0)
    }

    pub fn cells(&self, alg: &Algebra) -> Vec<HHCell> {
        self.dims
            .iter()
            .filter(|(_, &d)| d > 0)
            .map(|(&(q, t), &dim)| HHCell {
                q,
                t,
                dim,
                representatives: self
                    .reps
                    .get(&(q, t))
                    .map(|r| r.iter().map(|c| c.label(alg)).collect())
                    .unwrap_or_default(),
            })
            .collect()
    }
}

/// Exponent vectors (idempotent letters zeroed) of total degree <= n and
/// at most `cap` letters.
fn weights(alg: &Algebra, n: u32, cap: u32) -> Vec<Monomial> {
    fn rec(alg: &Algebra, i: usize, left: u32, cap: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if i == alg.letters().len() {
            out.push(cur.clone());
            return;
        }
        let l = &alg.letters()[i];
        if l.idempotent || l.degree == 0 {
            rec(alg, i + 1, left, cap, cur, out);
            return;
        }
        let mut e = 0;
        while e * l.degree <= left && e <= cap {
            cur[i] = e;
            rec(alg, i + 1, left - e * l.degree, cap - e, cur, out);
            e += 1;
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    let mut cur = alg.unit();
    rec(alg, 0, n, cap, &mut cur, &mut out);
    out
}

/// Allowed monomials whose non-idempotent part is bounded by `w`.
fn monomials_below(alg: &Algebra, w: &Monomial) -> Vec<Monomial> {
    fn rec(alg: &Algebra, w: &Monomial, i: usize, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if i == w.len() {
            let ok = alg
                .basis_index(cur)
                .is_some();
            if ok {
                out.push(cur.clone());
            }
            return;
        }
        let l = &alg.letters()[i];
        let max = if l.idempotent { 1 } else { w[i] };
        for e in 0..=max {
            cur[i] = e;
            rec(alg, w, i + 1, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    let mut cur = alg.unit();
    rec(alg, w, 0, &mut cur, &mut out);
    out
}

fn weight_of(alg: &Algebra, m: &Monomial) -> Monomial {
    m.iter()
        .zip(alg.letters())
        .map(|(&e, l)| if l.idempotent { 0 } else { e })
        .collect()
}

fn sub(a: &Monomial, b: &Monomial) -> Option<Monomial> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x.checked_sub(y))
        .collect()
}

/// Normalized chains of Hochschild degree `q` and weight `w`.
fn chains_of_weight(alg: &Algebra, pieces: &[Monomial], w: &Monomial, q: usize) -> Vec<Vec<Monomial>> {
    fn rec(
        alg: &Algebra,
        pieces: &[Monomial],
        left: &Monomial,
        slots_left: usize,
        cur: &mut Vec<Monomial>,
        out: &mut Vec<Vec<Monomial>>,
    ) {
        if slots_left == 0 {
            if left.iter().all(|&e| e == 0) {
                out.push(cur.clone());
            }
            return;
        }
        let first = cur.is_empty();
        for m in pieces {
            if !first && alg.is_unit(m) {
                continue;
            }
            if let Some(rest) = sub(left, &weight_of(alg, m)) {
                cur.push(m.clone());
                rec(alg, pieces, &rest, slots_left - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(alg, pieces, w, q + 1, &mut Vec::new(), &mut out);
    out
}

/// Hochschild homology of a presented algebra for internal degrees
/// `t <= n` and `q <= qmax`. The complex splits by weight (exponent
/// vector), which keeps the matrices small.
pub fn hh_homology(alg: &Algebra, n: u32, qmax: usize, with_reps: bool) -> Result<HHResult> {
    if n > alg.bound() {
        return Err(Error::BoundExceeded {
            degree: n,
            bound: alg.bound(),
        });
    }
    let f = alg.field();
    let has_idempotent = alg.letters().iter().any(|l| l.idempotent);
    let mut result = HHResult {
        dims: BTreeMap::new(),
        reps: BTreeMap::new(),
    };
    // in k ⊕ V every reduced slot holds exactly one letter
    let cap = if alg.is_square_zero() {
        qmax as u32 + 1
    } else {
        u32::MAX
    };
    for w in weights(alg, n, cap) {
        let t = alg.degree(&w);
        let pieces = monomials_below(alg, &w);
        // a connected algebra has no normalized chains with q > t
        let top = if has_idempotent {
            qmax + 1
        } else {
            (qmax + 1).min(w.iter().sum::<u32>() as usize)
        };
        let bases: Vec<Vec<Vec<Monomial>>> =
            (0..=top).map(|q| chains_of_weight(alg, &pieces, &w, q)).collect();
        let index: Vec<HashMap<&Vec<Monomial>, usize>> = bases
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, k)| (k, i)).collect())
            .collect();
        // boundary matrices ∂_q : C_q → C_{q-1}
        let mut mats: Vec<Option<SparseMat>> = vec![None];
        for q in 1..=top {
            let mut entries = Vec::new();
            for (col, slots) in bases[q].iter().enumerate() {
                for (key, neg) in boundary_term(alg, slots) {
                    let row = index[q - 1][&key];
                    entries.push((row, col, signed(f, 1, neg && alg.p() != 2)));
                }
            }
            mats.push(Some(SparseMat::from_entries(
                f,
                bases[q - 1].len(),
                bases[q].len(),
                entries,
            )));
        }
        let ranks: Vec<usize> = mats
            .iter()
            .map(|m| m.as_ref().map_or(0, |m| rank(f, m)))
            .collect();
        for q in 0..=qmax.min(top) {
            let out_rank = ranks[q];
            let in_rank = if q < top { ranks[q + 1] } else { 0 };
            let dim = bases[q].len() - out_rank - in_rank;
            *result.dims.entry((q, t)).or_insert(0) += dim;
            if with_reps && dim > 0 {
                let cycles: Vec<SparseVec> = match &mats[q] {
                    Some(m) => kernel_basis(f, m),
                    None => (0..bases[q].len()).map(SparseVec::unit).collect(),
                };
                let bounds: Vec<SparseVec> = if q < top {
                    mats[q + 1].as_ref().unwrap().columns()
                } else {
                    Vec::new()
                };
                let sq = Subquotient::new(f, bases[q].len(), &cycles, &bounds);
                let reps = result.reps.entry((q, t)).or_default();
                for r in sq.reps() {
                    let mut c = HochschildChain::zero(q);
                    for &(i, k) in r.entries() {
                        c.add_term(f, bases[q][i].clone(), k);
                    }
                    reps.push(c);
                }
            }
        }
    }
    Ok(result)
}

/// A finite-dimensional graded algebra given by structure constants.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    pub field: PrimeField,
    pub degrees: Vec<u32>,
    pub unit: usize,
    pub labels: Vec<String>,
    table: Vec<Vec<Vec<(usize, u32)>>>,
}

impl FiniteAlgebra {
    pub fn new(
        field: PrimeField,
        degrees: Vec<u32>,
        unit: usize,
        labels: Vec<String>,
        table: Vec<Vec<Vec<(usize, u32)>>>,
    ) -> Self {
        FiniteAlgebra {
            field,
            degrees,
            unit,
            labels,
            table,
        }
    }

    /// All monomials of a presented algebra through its bound, with the
    /// products that stay within the bound.
    pub fn from_algebra(alg: &Algebra) -> Result<Self> {
        let mut monos: Vec<Monomial> = Vec::new();
        for d in 0..=alg.bound() {
            monos.extend(alg.monomial_basis(d)?.iter().cloned());
        }
        let index: HashMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let f = alg.field().clone();
        let mut table = vec![vec![Vec::new(); monos.len()]; monos.len()];
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                if let Some((m, neg)) = alg.mul_mono(a, b) {
                    if let Some(&k) = index.get(&m) {
                        table[i][j].push((k, signed(&f, 1, neg)));
                    }
                }
            }
        }
        Ok(FiniteAlgebra {
            field: f,
            degrees: monos.iter().map(|m| alg.degree(m)).collect(),
            unit: index[&alg.unit()],
            labels: monos.iter().map(|m| alg.label(m)).collect(),
            table,
        })
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn product(&self, a: usize, b: usize) -> &[(usize, u32)] {
        &self.table[a][b]
    }

    fn chains(&self, q: usize, max_t: u32) -> Vec<Vec<usize>> {
        fn rec(a: &FiniteAlgebra, q: usize, left: u32, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == q + 1 {
                out.push(cur.clone());
                return;
            }
            for i in 0..a.dim() {
                if !cur.is_empty() && i == a.unit {
                    continue;
                }
                if a.degrees[i] <= left {
                    cur.push(i);
                    rec(a, q, left - a.degrees[i], cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(self, q, max_t, &mut Vec::new(), &mut out);
        out
    }

    fn boundary_of(&self, slots: &[usize]) -> Vec<(Vec<usize>, u32)> {
        let f = &self.field;
        let q = slots.len() - 1;
        let mut out = Vec::new();
        for i in 0..q {
            for &(m, c) in self.product(slots[i], slots[i + 1]) {
                if i > 0 && m == self.unit {
                    continue;
                }
                let mut key = slots[..i].to_vec();
                key.push(m);
                key.extend_from_slice(&slots[i + 2..]);
                out.push((key, signed(f, c, i % 2 == 1)));
            }
        }
        let before: u64 = slots[..q].iter().map(|&s| self.degrees[s] as u64).sum();
        let eps = self.degrees[slots[q]] as u64 * before;
        for &(m, c) in self.product(slots[q], slots[0]) {
            let mut key = vec![m];
            key.extend_from_slice(&slots[1..q]);
            out.push((key, signed(f, c, (q as u64 + eps) % 2 == 1)));
        }
        out
    }

    /// Bigraded Hochschild homology dimensions by direct linear algebra.
    pub fn hh_dims(&self, n: u32, qmax: usize) -> BTreeMap<(usize, u32), usize> {
        let f = &self.field;
        let chains: Vec<Vec<Vec<usize>>> = (0..=qmax + 1).map(|q| self.chains(q, n)).collect();
        let mut dims = BTreeMap::new();
        let deg = |c: &Vec<usize>| c.iter().map(|&i| self.degrees[i]).sum::<u32>();
        for t in 0..=n {
            let cells: Vec<Vec<&Vec<usize>>> = chains
                .iter()
                .map(|cs| cs.iter().filter(|c| deg(c) == t).collect())
                .collect();
            let index: Vec<HashMap<&Vec<usize>, usize>> = cells
                .iter()
                .map(|cs| cs.iter().enumerate().map(|(i, &c)| (c, i)).collect())
                .collect();
            let mut ranks = vec![0usize];
            for q in 1..=qmax + 1 {
                let mut entries = Vec::new();
                for (col, c) in cells[q].iter().enumerate() {
                    for (key, k) in self.boundary_of(c) {
                        entries.push((index[q - 1][&key], col, k));
                    }
                }
                let m = SparseMat::from_entries(f, cells[q - 1].len(), cells[q].len(), entries);
                ranks.push(rank(f, &m));
            }
            for q in 0..=qmax {
                let d = cells[q].len() - ranks[q] - ranks[q + 1];
                if d > 0 {
                    dims.insert((q, t), d);
                }
            }
        }
        dims
    }
}

/// The shuffle product of Hochschild chains over a commutative algebra.
/// Signs are bigraded: `∂(x·y) = ∂x·y + (-1)^q x·∂y` and
/// `x·y = (-1)^{q q' + t t'} y·x` for bidegrees `(q, t)`, `(q', t')`.
pub fn shuffle_product(alg: &Algebra, x: &HochschildChain, y: &HochschildChain) -> HochschildChain {
    let f = alg.field();
    let odd_p = alg.p() != 2;
    let mut out = HochschildChain::zero(x.q + y.q);
    for (a, &c) in &x.terms {
        for (b, &d) in &y.terms {
            let Some((head, neg0)) = alg.mul_mono(&a[0], &b[0]) else {
                continue;
            };
            // move b_0 past a_1 … a_p
            let a_tail: u32 = a[1..].iter().map(|m| alg.degree(m)).sum();
            let mut base_neg = neg0 ^ (alg.degree(&b[0]) as u64 * a_tail as u64 % 2 == 1);
            base_neg &= odd_p;
            let k = f.mul(c, d);
            for (slots, neg) in shuffles(alg, &a[1..], &b[1..]) {
                let mut key = vec![head.clone()];
                key.extend(slots);
                out.add_term(f, key, signed(f, k, odd_p && (base_neg ^ neg)));
            }
        }
    }
    out
}

/// All shuffles of two slot sequences with the sign `(-1)^{1 + |a||b|}`
/// for each pair that changes order.
fn shuffles(alg: &Algebra, a: &[Monomial], b: &[Monomial]) -> Vec<(Vec<Monomial>, bool)> {
    if a.is_empty() {
        return vec![(b.to_vec(), false)];
    }
    if b.is_empty() {
        return vec![(a.to_vec(), false)];
    }
    let mut out = Vec::new();
    for (mut rest, neg) in shuffles(alg, &a[1..], b) {
        rest.insert(0, a[0].clone());
        out.push((rest, neg));
    }
    // b_0 goes first: it passes every a_i
    let mut pass = false;
    for m in a {
        pass ^= !(alg.is_odd(m) && alg.is_odd(&b[0]));
    }
    for (mut rest, neg) in shuffles(alg, a, &b[1..]) {
        rest.insert(0, b[0].clone());
        out.push((rest, neg ^ pass));
    }
    out
}

/// An element of `C_*(Λ) ⊗_Λ C_*(Λ)`, keyed by `(λ, α, β)` for
/// `(λ ⊗ α) ⊗_Λ (1 ⊗ β)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorChain {
    pub terms: BTreeMap<(Monomial, Vec<Monomial>, Vec<Monomial>), u32>,
}

impl TensorChain {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, f: &PrimeField, key: (Monomial, Vec<Monomial>, Vec<Monomial>), c: u32) {
        add_into(&mut self.terms, f, key, c);
    }
}

/// The chain-level coproduct
/// `ψ(λ_0 ⊗ ⋯ ⊗ λ_q) = Σ_i (λ_0 ⊗ ⋯ ⊗ λ_i) ⊗_Λ (1 ⊗ λ_{i+1} ⊗ ⋯ ⊗ λ_q)`.
pub fn chain_coproduct(alg: &Algebra, c: &HochschildChain) -> TensorChain {
    let f = alg.field();
    let mut out = TensorChain::default();
    for (slots, &k) in &c.terms {
        for i in 0..=c.q {
            out.add_term(
                f,
                (slots[0].clone(), slots[1..=i].to_vec(), slots[i + 1..].to_vec()),
                k,
            );
        }
    }
    out
}

/// `(λ ⊗ α) · μ` moved into the `λ` slot: `(-1)^{|μ||α|} λμ ⊗ α`.
fn absorb(alg: &Algebra, lambda: &Monomial, alpha: &[Monomial], mu: &Monomial) -> Option<(Monomial, bool)> {
    let (m, neg) = alg.mul_mono(lambda, mu)?;
    let a: u32 = alpha.iter().map(|x| alg.degree(x)).sum();
    Some((m, neg ^ (a as u64 * alg.degree(mu) as u64 % 2 == 1)))
}

/// Boundary on `C ⊗_Λ C`: `∂(x ⊗ y) = ∂x ⊗ y + (-1)^q x ⊗ ∂y` for `x` of
/// Hochschild degree `q`.
pub fn tensor_boundary(alg: &Algebra, t: &TensorChain) -> TensorChain {
    let f = alg.field();
    let odd_p = alg.p() != 2;
    let mut out = TensorChain::default();
    for ((lambda, alpha, beta), &k) in &t.terms {
        let mut x = vec![lambda.clone()];
        x.extend(alpha.iter().cloned());
        for (key, neg) in boundary_term(alg, &x) {
            out.add_term(
                f,
                (key[0].clone(), key[1..].to_vec(), beta.clone()),
                signed(f, k, odd_p && neg),
            );
        }
        let x_deg = alpha.len() as u64;
        let mut y = vec![alg.unit()];
        y.extend(beta.iter().cloned());
        for (key, neg) in boundary_term(alg, &y) {
            let Some((l2, neg2)) = absorb(alg, lambda, alpha, &key[0]) else {
                continue;
            };
            let total = neg ^ neg2 ^ (x_deg % 2 == 1);
            out.add_term(
                f,
                (l2, alpha.clone(), key[1..].to_vec()),
                signed(f, k, odd_p && total),
            );
        }
    }
    out
}

/// `x ⊗_Λ y` for Hochschild chains.
pub fn tensor_chains(alg: &Algebra, x: &HochschildChain, y: &HochschildChain) -> TensorChain {
    let f = alg.field();
    let mut out = TensorChain::default();
    for (a, &c) in &x.terms {
        for (b, &d) in &y.terms {
            let Some((l, neg)) = absorb(alg, &a[0], &a[1..], &b[0]) else {
                continue;
            };
            out.add_term(
                f,
                (l, a[1..].to_vec(), b[1..].to_vec()),
                signed(f, f.mul(c, d), alg.p() != 2 && neg),
            );
        }
    }
    out
}

/// `λ · z` on the `λ` slot of a tensor chain.
fn scale_by_monomial(alg: &Algebra, lambda: &Monomial, t: &TensorChain) -> TensorChain {
    let f = alg.field();
    let mut out = TensorChain::default();
    for ((l, a, b), &k) in &t.terms {
        if let Some((m, neg)) = alg.mul_mono(lambda, l) {
            out.add_term(f, (m, a.clone(), b.clone()), signed(f, k, alg.p() != 2 && neg));
        }
    }
    out
}

fn tensor_degree(alg: &Algebra, key: &(Monomial, Vec<Monomial>, Vec<Monomial>)) -> (usize, u32) {
    let t = alg.degree(&key.0)
        + key.1.iter().chain(&key.2).map(|m| alg.degree(m)).sum::<u32>();
    (key.1.len() + key.2.len(), t)
}

/// Presentation of `HH_*` produced by [`closed_form_hh`].
#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub presentation: AlgebraPresentation,
    /// For each new generator, the index of the generator it suspends.
    pub suspends: Vec<(usize, usize)>,
    pub base_generators: usize,
}

/// `HH_*(P(x)) = P(x) ⊗ E(σx)` and `HH_*(E(x)) = E(x) ⊗ Γ(σx)`, combined
/// by the Künneth formula. New generators record their Hochschild
/// filtration; degrees are total degrees.
pub fn closed_form_hh(pres: &AlgebraPresentation) -> Result<ClosedForm> {
    let mut generators: Vec<GeneratorSpec> = pres.generators.clone();
    let mut suspends = Vec::new();
    for (i, g) in pres.generators.iter().enumerate() {
        let exterior_like = match g.kind {
            Kind::Polynomial => false,
            Kind::Exterior => true,
            Kind::Truncated if pres.p == 2 && g.height == Some(2) => true,
            _ => return Err(Error::UnsupportedKind(g.name.clone())),
        };
        let name = format!("s({})", g.name);
        let spec = if exterior_like {
            GeneratorSpec::divided_power(name, g.degree + 1)
        } else {
            GeneratorSpec::exterior(name, g.degree + 1)
        };
        suspends.push((generators.len(), i));
        generators.push(spec.with_filtration(1));
    }
    let mut presentation = AlgebraPresentation::new(pres.p, generators);
    presentation.square_zero = false;
    Ok(ClosedForm {
        presentation,
        suspends,
        base_generators: pres.generators.len(),
    })
}

/// Bigraded dimensions `(filtration, degree - filtration)` of a presented
/// algebra, for internal degree `<= n`.
pub fn bigraded_dims(alg: &Algebra, n: u32, qmax: usize) -> Result<BTreeMap<(usize, u32), usize>> {
    let mut out = BTreeMap::new();
    for d in 0..=alg.bound() {
        for m in alg.monomial_basis(d)?.iter() {
            let s = alg.filtration(m) as usize;
            let t = d - s as u32;
            if t <= n && s <= qmax {
                *out.entry((s, t)).or_insert(0) += 1;
            }
        }
    }
    Ok(out)
}

/// Chain representatives of the closed-form classes, built from
/// `σx = [1 ⊗ x]` and `γ_n(σx) = [1 ⊗ x ⊗ ⋯ ⊗ x]` by shuffle products.
pub struct KunnethBasis<'a> {
    pub base: &'a Algebra,
    pub closed: Algebra,
    pub hopf: HopfData,
    reps: HashMap<Monomial, HochschildChain>,
}

impl<'a> KunnethBasis<'a> {
    /// Checks flatness by comparing Hochschild homology with the closed
    /// form through internal degree `n`.
    pub fn new(base: &'a Algebra, n: u32) -> Result<Self> {
        let cf = closed_form_hh(base.presentation())?;
        let closed = Algebra::new(&cf.presentation, 2 * n + 2)?;
        let hh = hh_homology(base, n, 2 * n as usize + 1, false)?;
        let expected = bigraded_dims(&closed, n, 2 * n as usize + 1)?;
        let got: BTreeMap<(usize, u32), usize> =
            hh.dims.iter().filter(|(_, &d)| d > 0).map(|(&k, &d)| (k, d)).collect();
        if got != expected {
            return Err(Error::NotFlat(format!(
                "Hochschild homology of {} generators differs from the closed form",
                base.letters().len()
            )));
        }
        let hopf = HopfData::standard(&closed)?;
        Ok(KunnethBasis {
            base,
            closed,
            hopf,
            reps: HashMap::new(),
        })
    }

    fn letter_rep(&self, letter: usize) -> HochschildChain {
        let l = &self.closed.letters()[letter];
        let gen = &self.closed.presentation().generators[l.generator];
        let base_name = gen.name.trim_start_matches("s(").trim_end_matches(')');
        let x = self.base.letter_index(base_name).expect("suspended letter");
        let n = l.dp_power.unwrap_or(1) as usize;
        HochschildChain::tensor_power(self.base, x, n)
    }

    /// The chain representative of a closed-form monomial.
    pub fn rep(&mut self, m: &Monomial) -> HochschildChain {
        if let Some(hit) = self.reps.get(m) {
            return hit.clone();
        }
        let nb = self.base.letters().len();
        let mut lambda = self.base.unit();
        let mut chain: Option<HochschildChain> = None;
        for (i, &e) in m.iter().enumerate() {
            if i < nb {
                lambda[i] = e;
                continue;
            }
            for _ in 0..e {
                let r = self.letter_rep(i);
                chain = Some(match chain {
                    None => r,
                    Some(c) => shuffle_product(self.base, &c, &r),
                });
            }
        }
        let mut chain = chain.unwrap_or_else(|| HochschildChain::basic(vec![self.base.unit()]));
        let f = self.base.field();
        let mut out = HochschildChain::zero(chain.q);
        for (slots, &c) in std::mem::take(&mut chain.terms).iter() {
            if let Some((l, neg)) = self.base.mul_mono(&lambda, &slots[0]) {
                let mut key = slots.clone();
                key[0] = l;
                out.add_term(f, key, signed(f, c, self.base.p() != 2 && neg));
            }
        }
        self.reps.insert(m.clone(), out.clone());
        out
    }

    /// Expresses `ψ[rep(m)]` in the basis `λ · f' ⊗ f''` of
    /// `HH ⊗_Λ HH`, returning `(λ f', f'')` pairs of closed-form monomials.
    pub fn coproduct_in_homology(&mut self, m: &Monomial) -> Result<BTreeMap<(Monomial, Monomial), u32>> {
        let f = self.base.field().clone();
        let nb = self.base.letters().len();
        let z = chain_coproduct(self.base, &self.rep(m));
        let Some(first) = z.terms.keys().next() else {
            return Ok(BTreeMap::new());
        };
        let (qn, t) = tensor_degree(self.base, first);
        // candidate classes λ · f' ⊗ f'' of the same bidegree
        let fibers: Vec<Monomial> = (0..=self.closed.bound())
            .flat_map(|d| self.closed.monomial_basis(d).unwrap().to_vec())
            .filter(|x| x[..nb].iter().all(|&e| e == 0))
            .collect();
        let mut candidates: Vec<((Monomial, Monomial), TensorChain)> = Vec::new();
        for a in &fibers {
            for b in &fibers {
                let q = (self.closed.filtration(a) + self.closed.filtration(b)) as usize;
                let ta = self.closed.degree(a) - self.closed.filtration(a);
                let tb = self.closed.degree(b) - self.closed.filtration(b);
                if q != qn || ta + tb > t {
                    continue;
                }
                for lambda in self.base.monomial_basis(t - ta - tb)?.iter() {
                    let ra = self.rep(a);
                    let rb = self.rep(b);
                    let prod = scale_by_monomial(self.base, lambda, &tensor_chains(self.base, &ra, &rb));
                    let mut key_a = a.clone();
                    key_a[..nb].copy_from_slice(lambda);
                    candidates.push(((key_a, b.clone()), prod));
                }
            }
        }
        // boundaries of C ⊗_Λ C one degree up, same internal degree
        let boundaries = self.tensor_cell_boundaries(qn + 1, t)?;
        let mut keys: HashMap<(Monomial, Vec<Monomial>, Vec<Monomial>), usize> = HashMap::new();
        let vec_of = |tc: &TensorChain, keys: &mut HashMap<_, usize>| {
            let pairs: Vec<(usize, u32)> = tc
                .terms
                .iter()
                .map(|(k, &c)| {
                    let n = keys.len();
                    (*keys.entry(k.clone()).or_insert(n), c)
                })
                .collect();
            SparseVec::from_pairs(&f, pairs)
        };
        let bvecs: Vec<SparseVec> = boundaries.iter().map(|b| vec_of(b, &mut keys)).collect();
        let cvecs: Vec<SparseVec> = candidates.iter().map(|(_, c)| vec_of(c, &mut keys)).collect();
        let zvec = vec_of(&z, &mut keys);
        let n = keys.len();
        let mut ech = Echelon::with_tags(&f, n, cvecs.len());
        for b in &bvecs {
            ech.insert_tagged(b, None);
        }
        for (i, c) in cvecs.iter().enumerate() {
            ech.insert_tagged(c, Some(&SparseVec::unit(i)));
        }
        let coords = ech.coordinates(&zvec).ok_or_else(|| {
            Error::NotFlat("coproduct is not in the span of Künneth classes".into())
        })?;
        let mut out = BTreeMap::new();
        for &(i, c) in coords.entries() {
            add_into(&mut out, &f, candidates[i].0.clone(), c);
        }
        Ok(out)
    }

    fn tensor_cell_boundaries(&self, qn: usize, t: u32) -> Result<Vec<TensorChain>> {
        let alg = self.base;
        let mut monos = Vec::new();
        for d in 0..=t {
            monos.extend(alg.monomial_basis(d)?.iter().cloned());
        }
        let reduced: Vec<Monomial> = monos.iter().filter(|m| !alg.is_unit(m)).cloned().collect();
        let mut out = Vec::new();
        for a_len in 0..=qn {
            let b_len = qn - a_len;
            let mut seqs: Vec<(Vec<Monomial>, u32)> = vec![(Vec::new(), 0)];
            for _ in 0..qn {
                let mut next = Vec::new();
                for (s, d) in &seqs {
                    for m in &reduced {
                        let nd = d + alg.degree(m);
                        if nd <= t {
                            let mut s2 = s.clone();
                            s2.push(m.clone());
                            next.push((s2, nd));
                        }
                    }
                }
                seqs = next;
            }
            for (s, d) in &seqs {
                for lambda in alg.monomial_basis(t - d)?.iter() {
                    let mut tc = TensorChain::default();
                    tc.add_term(
                        alg.field(),
                        (lambda.clone(), s[..a_len].to_vec(), s[a_len..a_len + b_len].to_vec()),
                        1,
                    );
                    let b = tensor_boundary(alg, &tc);
                    if !b.is_zero() {
                        out.push(b);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Two-sided bar chains `λ_0 [λ_1 | ⋯ | λ_q] λ_{q+1}`.
pub type BarChain = BTreeMap<Vec<Monomial>, u32>;

fn degeneracy(alg: &Algebra, x: &[Monomial], k: usize) -> Vec<Monomial> {
    let mut out = x.to_vec();
    out.insert(k + 1, alg.unit());
    out
}

/// `π ∘ sh ∘ ψ` on a basic bar chain, with degenerate terms dropped.
pub fn bar_roundtrip(alg: &Algebra, x: &[Monomial]) -> BarChain {
    let f = alg.field();
    let q = x.len() - 2;
    let mut out = BarChain::new();
    for i in 0..=q {
        // ψ: λ_0[λ_1|…|λ_i]1 ⊗_Λ 1[λ_{i+1}|…|λ_q]λ_{q+1}
        let mut left = x[..=i].to_vec();
        left.push(alg.unit());
        let mut right = vec![alg.unit()];
        right.extend_from_slice(&x[i + 1..]);
        let j = q - i;
        for (mu, nu, neg) in index_shuffles(i, j) {
            let mut a = left.clone();
            for &k in &nu {
                a = degeneracy(alg, &a, k);
            }
            let mut b = right.clone();
            for &k in &mu {
                b = degeneracy(alg, &b, k);
            }
            // π(a ⊗ b) = a · ε(b)
            let mut eps = Element::monomial(alg.unit());
            for m in &b {
                eps = alg.mul(&eps, &Element::monomial(m.clone()));
            }
            for (m, &c) in &eps.terms {
                let Some((last, neg2)) = alg.mul_mono(&a[q + 1], m) else {
                    continue;
                };
                let mut key = a.clone();
                key[q + 1] = last;
                if key[1..=q].iter().any(|s| alg.is_unit(s)) {
                    continue;
                }
                add_into(&mut out, f, key, signed(f, c, alg.p() != 2 && (neg ^ neg2)));
            }
        }
    }
    out
}

/// `(i, j)`-shuffles of `{0, …, i+j-1}` as `(μ, ν)` with the sign of the
/// permutation.
fn index_shuffles(i: usize, j: usize) -> Vec<(Vec<usize>, Vec<usize>, bool)> {
    let n = i + j;
    let mut out = Vec::new();
    for mask in 0u64..(1 << n) {
        if mask.count_ones() as usize != i {
            continue;
        }
        let mu: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        let nu: Vec<usize> = (0..n).filter(|k| mask & (1 << k) == 0).collect();
        let inversions: usize = mu
            .iter()
            .map(|&m| nu.iter().filter(|&&v| v < m).count())
            .sum();
        out.push((mu, nu, inversions % 2 == 1));
    }
    out
}

/// Whether `π ∘ sh ∘ ψ` is the identity modulo degenerate terms on all
/// normalized bar chains with `q <= qmax` and internal degree `<= n`.
pub fn bar_roundtrip_check(alg: &Algebra, n: u32, qmax: usize) -> Result<bool> {
    let mut monos = Vec::new();
    for d in 0..=n {
        monos.extend(alg.monomial_basis(d)?.iter().cloned());
    }
    let reduced: Vec<Monomial> = monos.iter().filter(|m| !alg.is_unit(m)).cloned().collect();
    for q in 0..=qmax {
        let mut seqs: Vec<(Vec<Monomial>, u32)> = vec![(Vec::new(), 0)];
        for k in 0..q + 2 {
            let pool = if k == 0 || k == q + 1 { &monos } else { &reduced };
            let mut next = Vec::new();
            for (s, d) in &seqs {
                for m in pool {
                    let nd = d + alg.degree(m);
                    if nd <= n {
                        let mut s2 = s.clone();
                        s2.push(m.clone());
                        next.push((s2, nd));
                    }
                }
            }
            seqs = next;
        }
        for (x, _) in seqs {
            let got = bar_roundtrip(alg, &x);
            let mut want = BarChain::new();
            want.insert(x.clone(), 1);
            if got != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `HH_*(k ⊕ V)` from `HH_q = ker(1 + (-1)^q t_q | V^{⊗q}) ⊕
/// coker(1 + (-1)^{q+1} t_{q+1} | V^{⊗(q+1)})`, where `t` is the signed
/// cyclic permutation. Returns dims keyed by `(q, internal degree)`.
pub fn hh_squarezero(
    p: u32,
    v_degrees: &[u32],
    n: u32,
    qmax: usize,
) -> Result<BTreeMap<(usize, u32), usize>> {
    let f = PrimeField::new(p)?;
    let mut dims: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    // q = 0 contributes k from the empty tensor
    dims.insert((0, 0), 1);
    for len in 1..=qmax + 1 {
        // tensors of length `len`, grouped by internal degree
        let mut by_degree: BTreeMap<u32, Vec<Vec<usize>>> = BTreeMap::new();
        let mut stack: Vec<(Vec<usize>, u32)> = vec![(Vec::new(), 0)];
        while let Some((s, d)) = stack.pop() {
            if s.len() == len {
                by_degree.entry(d).or_default().push(s);
                continue;
            }
            for (i, &g) in v_degrees.iter().enumerate() {
                if d + g <= n {
                    let mut s2 = s.clone();
                    s2.push(i);
                    stack.push((s2, d + g));
                }
            }
        }
        for (t, mut tensors) in by_degree {
            tensors.sort();
            let index: HashMap<&Vec<usize>, usize> =
                tensors.iter().enumerate().map(|(i, s)| (s, i)).collect();
            let mut entries = Vec::new();
            for (col, s) in tensors.iter().enumerate() {
                entries.push((col, col, 1));
                // t(v_1 … v_n) = (-1)^{|v_n|(|v_1|+…+|v_{n-1}|)} v_n v_1 … v_{n-1}
                let last = s[len - 1];
                let mut rot = vec![last];
                rot.extend_from_slice(&s[..len - 1]);
                let before: u32 = s[..len - 1].iter().map(|&i| v_degrees[i]).sum();
                let eps = (v_degrees[last] as u64 * before as u64) % 2 == 1;
                let neg = eps ^ (len % 2 == 1);
                entries.push((index[&rot], col, signed(&f, 1, neg)));
            }
            let m = SparseMat::from_entries(&f, tensors.len(), tensors.len(), entries);
            let r = rank(&f, &m);
            let ker = tensors.len() - r;
            let coker = tensors.len() - r;
            if len <= qmax && ker > 0 {
                *dims.entry((len, t)).or_insert(0) += ker;
            }
            if coker > 0 {
                *dims.entry((len - 1, t)).or_insert(0) += coker;
            }
        }
    }
    Ok(dims)
}

/// The presentation of `k ⊕ V` as a square-zero algebra.
pub fn square_zero_presentation(p: u32, v_degrees: &[u32]) -> AlgebraPresentation {
    let generators = v_degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| GeneratorSpec::truncated(format!("v{i}"), d, 2))
        .collect();
    let mut pres = AlgebraPresentation::new(p, generators);
    pres.square_zero = true;
    pres
}

/// Poincaré series of the closed form, for comparison with raw dims.
pub fn closed_form_series(pres: &AlgebraPresentation, n: u32) -> Result<Vec<usize>> {
    let cf = closed_form_hh(pres)?;
    let alg = Algebra::new(&cf.presentation, n)?;
    Ok(poincare_series(&alg, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::GeneratorSpec;

    fn idempotent() -> Algebra {
        let pres = AlgebraPresentation::new(2, vec![GeneratorSpec::idempotent("u")]);
        Algebra::new(&pres, 0).unwrap()
    }

    #[test]
    fn idempotent_boundary() {
        let alg = idempotent();
        let u = alg.letter(0);
        let one = alg.unit();
        let c = HochschildChain::basic(vec![one.clone(), u.clone(), u.clone()]);
        let b = boundary(&alg, &c);
        assert_eq!(b, HochschildChain::basic(vec![one.clone(), u.clone()]));
        // ∂_2 on {1⊗u⊗u, u⊗u⊗u} has full rank 2 onto C_1
        let f = alg.field();
        let c1 = [vec![one.clone(), u.clone()], vec![u.clone(), u.clone()]];
        let mut entries = Vec::new();
        for (col, first) in [one.clone(), u.clone()].iter().enumerate() {
            let b = boundary(&alg, &HochschildChain::basic(vec![first.clone(), u.clone(), u.clone()]));
            for (k, &c) in &b.terms {
                let row = c1.iter().position(|x| x == k).unwrap();
                entries.push((row, col, c));
            }
        }
        assert_eq!(rank(f, &SparseMat::from_entries(f, 2, 2, entries)), 2);
    }

    #[test]
    fn idempotent_homology() {
        let alg = idempotent();
        let hh = hh_homology(&alg, 0, 6, false).unwrap();
        assert_eq!(hh.dim(0, 0), 2);
        for q in 1..=6 {
            assert_eq!(hh.dim(q, 0), 0, "q = {q}");
        }
        let fin = FiniteAlgebra::from_algebra(&alg).unwrap();
        assert_eq!(fin.hh_dims(0, 6), BTreeMap::from([((0, 0), 2)]));
    }

    #[test]
    fn square_zero_rank_five() {
        let dims = hh_squarezero(2, &[1, 1], 4, 2).unwrap();
        let hh1: usize = dims.iter().filter(|((q, _), _)| *q == 1).map(|(_, d)| d).sum();
        assert_eq!(hh1, 5);
        let dims = hh_squarezero(3, &[1, 3], 8, 2).unwrap();
        let hh1: usize = dims.iter().filter(|((q, _), _)| *q == 1).map(|(_, d)| d).sum();
        assert_eq!(hh1, 5);
        let empty = hh_squarezero(2, &[], 10, 4).unwrap();
        assert_eq!(empty, BTreeMap::from([((0, 0), 1)]));
    }
}
