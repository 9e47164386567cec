//! The dual Steenrod algebra `A_*` at any prime, in either the `ξ, τ` or
//! the conjugate `ξ̄, τ̄` alphabet.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::{SteenrodElement, SubalgebraSpec};
use crate::fplin::PrimeField;
use crate::{Error, Result};

/// `ξ_1^{e_1} ξ_2^{e_2} ⋯ τ_{i_1} ⋯ τ_{i_k}` (τ indices increasing).
///
/// `xi[k - 1]` is the exponent of `ξ_k`; bit `k` of `tau` marks `τ_k`.
/// With `conj` set the letters are the conjugates `ξ̄_k`, `τ̄_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MilnorMonomial {
    pub xi: Vec<u32>,
    pub tau: u64,
    pub conj: bool,
}

pub fn xi_degree(p: u32, k: u32) -> u64 {
    if p == 2 {
        (1u64 << k) - 1
    } else {
        2 * (p as u64).pow(k) - 2
    }
}

pub fn tau_degree(p: u32, k: u32) -> u64 {
    2 * (p as u64).pow(k) - 1
}

impl MilnorMonomial {
    pub fn one(conj: bool) -> Self {
        MilnorMonomial {
            xi: Vec::new(),
            tau: 0,
            conj,
        }
    }

    /// `ξ_k^e` (`k >= 1`); `ξ_0` is read as 1.
    pub fn xi_power(k: u32, e: u32, conj: bool) -> Self {
        let mut m = Self::one(conj);
        if k > 0 && e > 0 {
            m.xi = vec![0; k as usize];
            m.xi[k as usize - 1] = e;
        }
        m
    }

    pub fn tau_gen(k: u32, conj: bool) -> Self {
        MilnorMonomial {
            xi: Vec::new(),
            tau: 1 << k,
            conj,
        }
    }

    pub fn from_exponents(xi: &[u32], tau: u64, conj: bool) -> Self {
        let mut m = MilnorMonomial {
            xi: xi.to_vec(),
            tau,
            conj,
        };
        m.trim();
        m
    }

    fn trim(&mut self) {
        while self.xi.last() == Some(&0) {
            self.xi.pop();
        }
    }

    pub fn is_one(&self) -> bool {
        self.xi.is_empty() && self.tau == 0
    }

    pub fn xi_exponent(&self, k: u32) -> u32 {
        if k == 0 {
            return 0;
        }
        self.xi.get(k as usize - 1).copied().unwrap_or(0)
    }

    pub fn tau_indices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..64).filter(move |k| self.tau & (1 << k) != 0)
    }

    pub fn degree(&self, p: u32) -> u64 {
        let x: u64 = self
            .xi
            .iter()
            .enumerate()
            .map(|(i, &e)| e as u64 * xi_degree(p, i as u32 + 1))
            .sum();
        x + self.tau_indices().map(|k| tau_degree(p, k)).sum::<u64>()
    }

    /// Parity of the degree: the number of exterior letters.
    pub fn is_odd(&self) -> bool {
        self.tau.count_ones() % 2 == 1
    }

    /// Product of monomials in the same alphabet, with its sign; `None`
    /// when an exterior letter repeats.
    pub fn mul(&self, other: &MilnorMonomial) -> Option<(MilnorMonomial, bool)> {
        debug_assert_eq!(self.conj, other.conj);
        if self.tau & other.tau != 0 {
            return None;
        }
        let n = self.xi.len().max(other.xi.len());
        let xi = (0..n)
            .map(|i| self.xi.get(i).unwrap_or(&0) + other.xi.get(i).unwrap_or(&0))
            .collect();
        // sign from moving each τ of `other` past the larger τ's of `self`
        let mut inversions = 0;
        for b in other.tau_indices() {
            inversions += (self.tau >> (b + 1)).count_ones();
        }
        Some((
            MilnorMonomial {
                xi,
                tau: self.tau | other.tau,
                conj: self.conj,
            },
            inversions % 2 == 1,
        ))
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MilnorMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let bar = if self.conj { "b" } else { "" };
        let mut parts = Vec::new();
        for (i, &e) in self.xi.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("xi{bar}{}", i + 1)),
                _ => parts.push(format!("xi{bar}{}^{e}", i + 1)),
            }
        }
        for k in self.tau_indices() {
            parts.push(format!("tau{bar}{k}"));
        }
        write!(f, "{}", parts.join("*"))
    }
}

impl std::str::FromStr for MilnorMonomial {
    type Err = Error;

    /// Parses labels such as `xib1^4*xib2`, `tau0*xi1` or `1`.
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse {
            what: "Milnor monomial",
            input: s.to_string(),
        };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "1" {
            return Ok(MilnorMonomial::one(true));
        }
        let mut conj = None;
        let mut xi: Vec<u32> = Vec::new();
        let mut tau = 0u64;
        for factor in t.split('*') {
            let (letter, rest) = if let Some(r) = factor.strip_prefix("xi") {
                ("xi", r)
            } else if let Some(r) = factor.strip_prefix("tau") {
                ("tau", r)
            } else {
                return Err(err());
            };
            let (barred, rest) = match rest.strip_prefix('b') {
                Some(r) => (true, r),
                None => (false, rest),
            };
            if *conj.get_or_insert(barred) != barred {
                return Err(err());
            }
            let (idx, exp) = match rest.split_once('^') {
                Some((i, e)) => (i, e.parse::<u32>().map_err(|_| err())?),
                None => (rest, 1),
            };
            let k: u32 = idx.parse().map_err(|_| err())?;
            if letter == "xi" {
                if k == 0 {
                    return Err(err());
                }
                if xi.len() < k as usize {
                    xi.resize(k as usize, 0);
                }
                xi[k as usize - 1] += exp;
            } else {
                if exp != 1 || k >= 64 || tau & (1 << k) != 0 {
                    return Err(err());
                }
                tau |= 1 << k;
            }
        }
        Ok(MilnorMonomial::from_exponents(&xi, tau, conj.unwrap_or(true)))
    }
}

/// An `F_p`-linear combination of monomials in one alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualElement {
    pub p: u32,
    terms: BTreeMap<MilnorMonomial, u32>,
}

impl DualElement {
    pub fn zero(p: u32) -> Self {
        DualElement {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(p: u32, m: MilnorMonomial) -> Self {
        Self::term(p, m, 1)
    }

    pub fn term(p: u32, m: MilnorMonomial, c: u32) -> Self {
        let mut e = Self::zero(p);
        e.add_term(m, c);
        e
    }

    pub fn one(p: u32, conj: bool) -> Self {
        Self::monomial(p, MilnorMonomial::one(conj))
    }

    fn field(&self) -> PrimeField {
        PrimeField::new(self.p).expect("valid prime")
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MilnorMonomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &MilnorMonomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: MilnorMonomial, c: u32) {
        let f = self.field();
        let c = f.reduce(c as i64);
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert(0);
        *entry = f.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &DualElement) -> DualElement {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: u32) -> DualElement {
        let mut out = DualElement::zero(self.p);
        let f = self.field();
        for (m, d) in self.terms() {
            out.add_term(m.clone(), f.mul(c, d));
        }
        out
    }

    pub fn neg(&self) -> DualElement {
        self.scale(self.p - 1)
    }

    pub fn mul(&self, other: &DualElement) -> DualElement {
        let f = self.field();
        let mut out = DualElement::zero(self.p);
        for (a, c) in self.terms() {
            for (b, d) in other.terms() {
                if let Some((m, neg)) = a.mul(b) {
                    let mut k = f.mul(c, d);
                    if neg {
                        k = f.neg(k);
                    }
                    out.add_term(m, k);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> DualElement {
        let conj = self.terms.keys().next().is_some_and(|m| m.conj);
        let mut out = DualElement::one(self.p, conj);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Rewrites the element in the requested alphabet.
    pub fn in_alphabet(&self, conj: bool) -> DualElement {
        let mut out = DualElement::zero(self.p);
        for (m, c) in self.terms() {
            if m.conj == conj {
                out.add_term(m.clone(), c);
            } else {
                out = out.add(&conjugate(self.p, m).scale(c));
            }
        }
        out
    }
}

impl fmt::Display for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(m, c)| if c == 1 { m.to_string() } else { format!("{c}*{m}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// An element of `A_*^{⊗n}`, keyed by the tuple of tensor factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    pub p: u32,
    terms: BTreeMap<Vec<MilnorMonomial>, u32>,
}

impl Tensor {
    pub fn zero(p: u32) -> Self {
        Tensor {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(p: u32, n: usize, conj: bool) -> Self {
        let mut t = Tensor::zero(p);
        t.add_term(vec![MilnorMonomial::one(conj); n], 1);
        t
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<MilnorMonomial>, u32)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn coefficient(&self, key: &[MilnorMonomial]) -> u32 {
        self.terms.get(key).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, key: Vec<MilnorMonomial>, c: u32) {
        let f = PrimeField::new(self.p).expect("valid prime");
        let c = f.reduce(c as i64);
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(key.clone()).or_insert(0);
        *entry = f.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k.clone(), c);
        }
        out
    }

    /// Componentwise product with the Koszul sign.
    pub fn mul(&self, other: &Tensor) -> Tensor {
        let f = PrimeField::new(self.p).expect("valid prime");
        let mut out = Tensor::zero(self.p);
        for (a, c) in self.terms() {
            'pairs: for (b, d) in other.terms() {
                let mut neg = false;
                // moving b_j past a_i for i > j
                for j in 0..b.len() {
                    if b[j].is_odd() {
                        for ai in &a[j + 1..] {
                            neg ^= ai.is_odd();
                        }
                    }
                }
                let mut key = Vec::with_capacity(a.len());
                for (x, y) in a.iter().zip(b) {
                    match x.mul(y) {
                        Some((m, s)) => {
                            neg ^= s;
                            key.push(m);
                        }
                        None => continue 'pairs,
                    }
                }
                let mut k = f.mul(c, d);
                if neg {
                    k = f.neg(k);
                }
                out.add_term(key, k);
            }
        }
        out
    }

    /// Applies the coproduct to tensor factor `slot`.
    pub fn expand(&self, slot: usize) -> Tensor {
        let f = PrimeField::new(self.p).expect("valid prime");
        let mut out = Tensor::zero(self.p);
        for (key, c) in self.terms() {
            for (pair, d) in milnor_coproduct(self.p, &key[slot]).terms() {
                let mut k = key[..slot].to_vec();
                k.extend(pair.iter().cloned());
                k.extend(key[slot + 1..].iter().cloned());
                out.add_term(k, f.mul(c, d));
            }
        }
        out
    }

    /// Rewrites every factor in the requested alphabet.
    pub fn in_alphabet(&self, conj: bool) -> Tensor {
        let mut out = Tensor::zero(self.p);
        for (key, c) in self.terms() {
            let mut acc = Tensor::unit(self.p, 0, conj);
            acc.terms = BTreeMap::from([(Vec::new(), c)]);
            for m in key {
                let e = DualElement::monomial(self.p, m.clone()).in_alphabet(conj);
                let mut next = Tensor::zero(self.p);
                for (k, a) in acc.terms() {
                    for (mm, b) in e.terms() {
                        let mut kk = k.clone();
                        kk.push(mm.clone());
                        next.add_term(kk, a * b);
                    }
                }
                acc = next;
            }
            out = out.add(&acc);
        }
        out
    }
}

fn gen_coproduct(p: u32, m: &MilnorMonomial, is_tau: bool, k: u32) -> Tensor {
    let conj = m.conj;
    let pk = |i: u32| p.pow(i);
    let mut t = Tensor::zero(p);
    if !is_tau {
        for i in 0..=k {
            let j = k - i;
            let pair = if conj {
                vec![
                    MilnorMonomial::xi_power(i, 1, true),
                    MilnorMonomial::xi_power(j, pk(i), true),
                ]
            } else {
                vec![
                    MilnorMonomial::xi_power(j, pk(i), false),
                    MilnorMonomial::xi_power(i, 1, false),
                ]
            };
            t.add_term(pair, 1);
        }
    } else if conj {
        t.add_term(vec![MilnorMonomial::one(true), MilnorMonomial::tau_gen(k, true)], 1);
        for i in 0..=k {
            t.add_term(
                vec![
                    MilnorMonomial::tau_gen(i, true),
                    MilnorMonomial::xi_power(k - i, pk(i), true),
                ],
                1,
            );
        }
    } else {
        t.add_term(vec![MilnorMonomial::tau_gen(k, false), MilnorMonomial::one(false)], 1);
        for i in 0..=k {
            t.add_term(
                vec![
                    MilnorMonomial::xi_power(k - i, pk(i), false),
                    MilnorMonomial::tau_gen(i, false),
                ],
                1,
            );
        }
    }
    t
}

type CoproductKey = (u32, MilnorMonomial);

fn coproduct_cache() -> &'static Mutex<HashMap<CoproductKey, Arc<Tensor>>> {
    static CACHE: OnceLock<Mutex<HashMap<CoproductKey, Arc<Tensor>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The coproduct of a monomial, in the monomial's alphabet.
pub fn milnor_coproduct(p: u32, m: &MilnorMonomial) -> Arc<Tensor> {
    let key = (p, m.clone());
    if let Some(hit) = coproduct_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let mut t = Tensor::unit(p, 2, m.conj);
    for (i, &e) in m.xi.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let g = gen_coproduct(p, m, false, i as u32 + 1);
        for _ in 0..e {
            t = t.mul(&g);
        }
    }
    for k in m.tau_indices() {
        t = t.mul(&gen_coproduct(p, m, true, k));
    }
    let t = Arc::new(t);
    coproduct_cache().lock().unwrap().insert(key, t.clone());
    t
}

type ConjKey = (u32, bool, u32, bool);

fn conj_cache() -> &'static Mutex<HashMap<ConjKey, DualElement>> {
    static CACHE: OnceLock<Mutex<HashMap<ConjKey, DualElement>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `χ` of a generator, written in the same alphabet as the generator.
fn antipode_gen(p: u32, is_tau: bool, k: u32, conj: bool) -> DualElement {
    let key = (p, is_tau, k, conj);
    if let Some(hit) = conj_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    // χ(ξ_k) = -Σ_{i<k} ξ_{k-i}^{p^i} χ(ξ_i)
    // χ(τ_k) = -τ_k - Σ_{i<k} ξ_{k-i}^{p^i} χ(τ_i)
    let mut acc = DualElement::zero(p);
    if is_tau {
        acc = acc.add(&DualElement::monomial(p, MilnorMonomial::tau_gen(k, conj)));
    }
    for i in 0..k {
        let lower = if is_tau {
            antipode_gen(p, true, i, conj)
        } else if i == 0 {
            DualElement::one(p, conj)
        } else {
            antipode_gen(p, false, i, conj)
        };
        let xi = DualElement::monomial(p, MilnorMonomial::xi_power(k - i, p.pow(i), conj));
        acc = acc.add(&xi.mul(&lower));
    }
    let out = acc.neg();
    conj_cache().lock().unwrap().insert(key, out.clone());
    out
}

fn relabel(e: &DualElement, conj: bool) -> DualElement {
    let mut out = DualElement::zero(e.p);
    for (m, c) in e.terms() {
        let mut m = m.clone();
        m.conj = conj;
        out.add_term(m, c);
    }
    out
}

/// Expands a monomial in the other alphabet: `ξ̄_k = χ(ξ_k)` and, since
/// `χ` is an involution, `ξ_k = χ(ξ̄_k)` by the same polynomial.
pub fn conjugate(p: u32, m: &MilnorMonomial) -> DualElement {
    let target = !m.conj;
    let mut out = DualElement::one(p, target);
    for (i, &e) in m.xi.iter().enumerate() {
        if e > 0 {
            let g = relabel(&antipode_gen(p, false, i as u32 + 1, m.conj), target);
            out = out.mul(&g.pow(e));
        }
    }
    for k in m.tau_indices() {
        out = out.mul(&relabel(&antipode_gen(p, true, k, m.conj), target));
    }
    out
}

/// The antipode `χ` on `A_*`, staying in the monomial's alphabet.
pub fn antipode(p: u32, m: &MilnorMonomial) -> DualElement {
    relabel(&conjugate(p, m), m.conj)
}

fn generators_upto(p: u32, d: u64) -> (Vec<(u32, u64)>, Vec<(u32, u64)>) {
    let xi = (1..)
        .map(|k| (k, xi_degree(p, k)))
        .take_while(|&(_, g)| g <= d)
        .collect();
    let tau = if p == 2 {
        Vec::new()
    } else {
        (0..)
            .map(|k| (k, tau_degree(p, k)))
            .take_while(|&(_, g)| g <= d)
            .collect()
    };
    (xi, tau)
}

fn xi_vectors(gens: &[(u32, u64)], d: u64, step: &dyn Fn(u32) -> u32, out: &mut Vec<Vec<u32>>) {
    fn rec(
        gens: &[(u32, u64)],
        idx: usize,
        d: u64,
        step: &dyn Fn(u32) -> u32,
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if idx == gens.len() {
            if d == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let (k, g) = gens[idx];
        let s = step(k);
        let mut e = 0u32;
        while e as u64 * g <= d {
            cur[idx] = e;
            rec(gens, idx + 1, d - e as u64 * g, step, cur, out);
            e += s;
        }
        cur[idx] = 0;
    }
    let mut cur = vec![0; gens.len()];
    rec(gens, 0, d, step, &mut cur, out);
}

fn monomials_with(
    p: u32,
    d: u64,
    conj: bool,
    step: &dyn Fn(u32) -> u32,
    tau_allowed: &dyn Fn(u32) -> bool,
) -> Vec<MilnorMonomial> {
    let (xi_gens, tau_gens) = generators_upto(p, d);
    let tau_gens: Vec<(u32, u64)> = tau_gens.into_iter().filter(|&(k, _)| tau_allowed(k)).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << tau_gens.len()) {
        let mut tau = 0u64;
        let mut td = 0u64;
        for (i, &(k, g)) in tau_gens.iter().enumerate() {
            if mask & (1 << i) != 0 {
                tau |= 1 << k;
                td += g;
            }
        }
        if td > d {
            continue;
        }
        let mut vecs = Vec::new();
        xi_vectors(&xi_gens, d - td, step, &mut vecs);
        for v in vecs {
            out.push(MilnorMonomial::from_exponents(&v, tau, conj));
        }
    }
    // τ-part first, then exponent vectors in decreasing lexicographic order
    out.sort_by(|a, b| a.tau.cmp(&b.tau).then_with(|| b.xi.cmp(&a.xi)));
    out
}

/// All monomials of degree `d` in the `ξ, τ` alphabet.
pub fn milnor_basis(p: u32, d: u64) -> Vec<MilnorMonomial> {
    milnor_basis_in(p, d, false)
}

pub fn milnor_basis_in(p: u32, d: u64, conj: bool) -> Vec<MilnorMonomial> {
    monomials_with(p, d, conj, &|_| 1, &|_| true)
}

/// Exponent divisor of `ξ̄_k` and admissibility of `τ̄_k` in `(A//B)_*`.
fn dual_quotient_profile(spec: &SubalgebraSpec, p: u32) -> Result<(Box<dyn Fn(u32) -> u32>, Box<dyn Fn(u32) -> bool>)> {
    let unsupported = || Error::UnsupportedSubalgebra(format!("{spec} at p = {p}"));
    match spec {
        SubalgebraSpec::A(n) if p == 2 => {
            let n = *n;
            Ok((
                Box::new(move |k| if k <= n + 1 { 1 << (n + 2 - k) } else { 1 }),
                Box::new(|_| false),
            ))
        }
        SubalgebraSpec::E(_) | SubalgebraSpec::Exterior(_) | SubalgebraSpec::EAll => {
            let in_b = |k: u32| match spec {
                SubalgebraSpec::E(n) => k <= *n,
                SubalgebraSpec::Exterior(qs) => qs.contains(&k),
                _ => true,
            };
            let listed: Vec<bool> = (0..64).map(in_b).collect();
            if p == 2 {
                // Q_{k-1} ∈ B squares ξ̄_k
                Ok((
                    Box::new(move |k| if listed[k as usize - 1] { 2 } else { 1 }),
                    Box::new(|_| false),
                ))
            } else {
                // Q_k ∈ B removes τ̄_k
                Ok((Box::new(|_| 1), Box::new(move |k| !listed[k as usize])))
            }
        }
        _ => Err(unsupported()),
    }
}

/// Monomial basis of `(A//B)_* ⊂ A_*` in degree `d`, in the conjugate alphabet.
pub fn dual_quotient_basis(spec: &SubalgebraSpec, p: u32, d: u64) -> Result<Vec<MilnorMonomial>> {
    let (step, tau_ok) = dual_quotient_profile(spec, p)?;
    Ok(monomials_with(p, d, true, &*step, &*tau_ok))
}

/// `<a, m>` for `a` in the mod 2 Steenrod algebra, computed from the
/// iterated coproduct and `<Sq^i, ξ_1^i> = 1`.
pub fn pairing(a: &SteenrodElement, m: &MilnorMonomial) -> Result<u32> {
    let md = m.degree(2);
    let mut total = 0;
    let e = DualElement::monomial(2, m.clone()).in_alphabet(false);
    for word in a.terms() {
        if word.degree() as u64 != md {
            return Err(Error::DegreeMismatch {
                expected: md as i64,
                found: word.degree() as i64,
            });
        }
        for (mm, c) in e.terms() {
            total ^= c & pair_word(&word.0, mm);
        }
    }
    Ok(total)
}

fn pair_word(word: &[u32], m: &MilnorMonomial) -> u32 {
    match word {
        [] => m.is_one() as u32,
        [i] => (*m == MilnorMonomial::xi_power(1, *i, false)) as u32,
        [first, rest @ ..] => {
            let left = MilnorMonomial::xi_power(1, *first, false);
            let mut acc = 0;
            for (pair, c) in milnor_coproduct(2, m).terms() {
                if pair[0] == left {
                    acc ^= c & pair_word(rest, &pair[1]);
                }
            }
            acc
        }
    }
}

/// `<Sq^r, m>` for a monomial in either alphabet, `<Sq^0, 1> = 1`.
pub fn pair_sq(r: u32, m: &MilnorMonomial) -> u32 {
    if r == 0 {
        return m.is_one() as u32;
    }
    if m.degree(2) != r as u64 {
        return 0;
    }
    DualElement::monomial(2, m.clone())
        .in_alphabet(false)
        .coefficient(&MilnorMonomial::xi_power(1, r, false))
}

#[cfg(test)]
mod tests {
    use super::super::{milnor_primitive, SteenrodElement};
    use super::*;

    fn mm(s: &str) -> MilnorMonomial {
        s.parse().unwrap()
    }

    #[test]
    fn small_bases() {
        assert_eq!(milnor_basis(2, 3), vec![mm("xi1^3"), mm("xi2")]);
        assert_eq!(milnor_basis(2, 0), vec![MilnorMonomial::one(false)]);
        assert_eq!(milnor_basis(3, 1), vec![mm("tau0")]);
    }

    #[test]
    fn coproduct_examples() {
        let t = milnor_coproduct(2, &mm("xib2"));
        assert_eq!(t.len(), 3);
        assert_eq!(t.coefficient(&[mm("xib1"), mm("xib1^2")]), 1);
        let t = milnor_coproduct(3, &mm("taub1"));
        assert_eq!(t.len(), 3);
        assert_eq!(t.coefficient(&[mm("taub0"), mm("xib1")]), 1);
        assert_eq!(t.coefficient(&[mm("taub1"), MilnorMonomial::one(true)]), 1);
    }

    #[test]
    fn conjugation() {
        assert_eq!(conjugate(2, &mm("xi1")), DualElement::monomial(2, mm("xib1")));
        let x = conjugate(2, &mm("xi2"));
        assert_eq!(x.terms().count(), 2);
        assert_eq!(x.coefficient(&mm("xib2")), 1);
        assert_eq!(x.coefficient(&mm("xib1^3")), 1);
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(&SteenrodElement::sq(2), &mm("xi1^2")).unwrap(), 1);
        assert_eq!(pairing(&milnor_primitive(1), &mm("xi2")).unwrap(), 1);
        assert_eq!(pairing(&milnor_primitive(1), &mm("xi1^3")).unwrap(), 0);
        assert_eq!(pairing(&SteenrodElement::sq(3), &mm("xib2")).unwrap(), 1);
        assert!(pairing(&SteenrodElement::sq(3), &mm("xi1")).is_err());
    }

    #[test]
    fn dual_quotients() {
        let a1 = dual_quotient_basis(&SubalgebraSpec::A(1), 2, 4).unwrap();
        assert_eq!(a1, vec![mm("xib1^4")]);
        for d in 1..4 {
            assert!(dual_quotient_basis(&SubalgebraSpec::A(1), 2, d).unwrap().is_empty());
        }
        let a2 = dual_quotient_basis(&SubalgebraSpec::A(2), 2, 8).unwrap();
        assert!(a2.contains(&mm("xib1^8")));
        let eq1 = dual_quotient_basis(&SubalgebraSpec::Exterior(vec![1]), 2, 1).unwrap();
        assert_eq!(eq1, vec![mm("xib1")]);
        assert!(dual_quotient_basis(&SubalgebraSpec::A(1), 3, 4).is_err());
    }

    #[test]
    fn label_round_trip() {
        for m in milnor_basis_in(3, 40, true) {
            assert_eq!(mm(&m.to_string()), m);
        }
    }
}
