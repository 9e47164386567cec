//! Presented graded-commutative `F_p`-algebras: free on polynomial,
//! exterior, truncated and divided-power generators (plus degree-zero
//! idempotents), with monomial bases, Poincaré series, `A_*`-coaction
//! tables and coproduct data.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::fplin::{is_prime, kernel_basis, PrimeField, SparseMat, SparseVec};
use crate::steenrod::dual::{milnor_coproduct, pair_sq, MilnorMonomial};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Polynomial,
    Exterior,
    Truncated,
    DividedPower,
    /// A degree-zero class with `u² = u`.
    Idempotent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
    #[serde(default)]
    pub filtration: u32,
}

impl GeneratorSpec {
    pub fn new(name: impl Into<String>, degree: u32, kind: Kind) -> Self {
        GeneratorSpec {
            name: name.into(),
            degree,
            kind,
            height: None,
            filtration: 0,
        }
    }

    pub fn polynomial(name: impl Into<String>, degree: u32) -> Self {
        Self::new(name, degree, Kind::Polynomial)
    }

    pub fn exterior(name: impl Into<String>, degree: u32) -> Self {
        Self::new(name, degree, Kind::Exterior)
    }

    pub fn truncated(name: impl Into<String>, degree: u32, height: u32) -> Self {
        GeneratorSpec {
            height: Some(height),
            ..Self::new(name, degree, Kind::Truncated)
        }
    }

    pub fn divided_power(name: impl Into<String>, degree: u32) -> Self {
        Self::new(name, degree, Kind::DividedPower)
    }

    pub fn idempotent(name: impl Into<String>) -> Self {
        Self::new(name, 0, Kind::Idempotent)
    }

    pub fn with_filtration(mut self, s: u32) -> Self {
        self.filtration = s;
        self
    }
}

/// One label of an `A_*`-coaction value: `c · a ⊗ x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoactionTermSpec {
    pub a: String,
    #[serde(default = "one")]
    pub c: u32,
    pub x: String,
}

fn one() -> u32 {
    1
}

/// The serialized presentation format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraPresentation {
    pub p: u32,
    pub generators: Vec<GeneratorSpec>,
    /// Products of positive-degree classes vanish (`k ⊕ V`).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub square_zero: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coaction: Option<BTreeMap<String, Vec<CoactionTermSpec>>>,
}

impl AlgebraPresentation {
    pub fn new(p: u32, generators: Vec<GeneratorSpec>) -> Self {
        AlgebraPresentation {
            p,
            generators,
            square_zero: false,
            coaction: None,
        }
    }

    /// Tensor product of two presentations (generator names must differ).
    pub fn tensor(&self, other: &AlgebraPresentation) -> Self {
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        AlgebraPresentation::new(self.p, generators)
    }
}

/// An algebra generator after divided powers are expanded into their
/// `γ_{p^i}` families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Letter {
    pub name: String,
    pub degree: u32,
    /// `x^h = 0`; `None` for polynomial letters.
    pub height: Option<u32>,
    pub idempotent: bool,
    pub filtration: u32,
    /// Index of the originating generator.
    pub generator: usize,
    /// `p^i` when the letter is `γ_{p^i}` of a divided-power generator.
    pub dp_power: Option<u32>,
}

/// Exponent vector over the letters of an [`Algebra`].
pub type Monomial = Vec<u32>;

/// An `F_p`-linear combination of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Element {
    pub terms: BTreeMap<Monomial, u32>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(m, 1)
    }

    pub fn term(m: Monomial, c: u32) -> Self {
        let mut e = Element::zero();
        if c != 0 {
            e.terms.insert(m, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, f: &PrimeField, m: Monomial, c: u32) {
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

    pub fn add(&self, f: &PrimeField, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(f, m.clone(), c);
        }
        out
    }

    pub fn scale(&self, f: &PrimeField, c: u32) -> Element {
        let mut out = Element::zero();
        for (m, &d) in &self.terms {
            out.add_term(f, m.clone(), f.mul(c, d));
        }
        out
    }
}

struct Basis {
    monomials: Arc<Vec<Monomial>>,
    index: HashMap<Monomial, usize>,
}

/// A presented algebra, materialized through internal degree `bound`.
pub struct Algebra {
    presentation: AlgebraPresentation,
    field: PrimeField,
    letters: Vec<Letter>,
    bound: u32,
    square_zero: bool,
    cache: Mutex<HashMap<u32, Arc<Basis>>>,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra")
            .field("p", &self.field.p())
            .field("letters", &self.letters)
            .field("bound", &self.bound)
            .finish()
    }
}

impl Clone for Algebra {
    fn clone(&self) -> Self {
        Algebra {
            presentation: self.presentation.clone(),
            field: self.field.clone(),
            letters: self.letters.clone(),
            bound: self.bound,
            square_zero: self.square_zero,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl Algebra {
    pub fn new(presentation: &AlgebraPresentation, bound: u32) -> Result<Self> {
        let p = presentation.p;
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        let field = PrimeField::new(p)?;
        let invalid = |msg: String| Err(Error::InvalidPresentation(msg));
        let mut letters = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (gi, g) in presentation.generators.iter().enumerate() {
            if !seen.insert(g.name.clone()) {
                return invalid(format!("duplicate generator {}", g.name));
            }
            if g.name.is_empty() || g.name.contains(['*', ' ']) {
                return invalid(format!("bad generator name {:?}", g.name));
            }
            let odd = g.degree % 2 == 1;
            if g.degree == 0 && g.kind != Kind::Idempotent {
                return invalid(format!("{} has degree 0 but is not idempotent", g.name));
            }
            let mut letter = Letter {
                name: g.name.clone(),
                degree: g.degree,
                height: None,
                idempotent: false,
                filtration: g.filtration,
                generator: gi,
                dp_power: None,
            };
            match g.kind {
                Kind::Polynomial => {
                    if p != 2 && odd {
                        return invalid(format!("polynomial generator {} has odd degree", g.name));
                    }
                }
                Kind::Exterior => {
                    if p != 2 && !odd {
                        return invalid(format!("exterior generator {} has even degree", g.name));
                    }
                    letter.height = Some(2);
                }
                Kind::Truncated => {
                    let h = g.height.ok_or_else(|| {
                        Error::InvalidPresentation(format!("{} needs a height", g.name))
                    })?;
                    if h < 2 {
                        return invalid(format!("{} has height {h}", g.name));
                    }
                    if p != 2 && odd && h != 2 {
                        return invalid(format!("odd generator {} must have height 2", g.name));
                    }
                    letter.height = Some(h);
                }
                Kind::Idempotent => {
                    if g.degree != 0 {
                        return invalid(format!("idempotent {} must have degree 0", g.name));
                    }
                    letter.height = Some(2);
                    letter.idempotent = true;
                }
                Kind::DividedPower => {
                    if p != 2 && odd {
                        return invalid(format!("divided powers on odd {} are exterior", g.name));
                    }
                    let mut power = 1u32;
                    while (power as u64) * (g.degree as u64) <= bound as u64 {
                        letters.push(Letter {
                            name: if power == 1 {
                                g.name.clone()
                            } else {
                                format!("g{power}({})", g.name)
                            },
                            degree: power * g.degree,
                            height: Some(p),
                            idempotent: false,
                            filtration: power * g.filtration,
                            generator: gi,
                            dp_power: Some(power),
                        });
                        match power.checked_mul(p) {
                            Some(next) => power = next,
                            None => break,
                        }
                    }
                    continue;
                }
            }
            if g.degree > bound && !letter.idempotent {
                continue;
            }
            letters.push(letter);
        }
        Ok(Algebra {
            presentation: presentation.clone(),
            field,
            letters,
            bound,
            square_zero: presentation.square_zero,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn presentation(&self) -> &AlgebraPresentation {
        &self.presentation
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_square_zero(&self) -> bool {
        self.square_zero
    }

    pub fn letter_index(&self, name: &str) -> Option<usize> {
        self.letters.iter().position(|l| l.name == name)
    }

    pub fn unit(&self) -> Monomial {
        vec![0; self.letters.len()]
    }

    pub fn letter(&self, i: usize) -> Monomial {
        let mut m = self.unit();
        m[i] = 1;
        m
    }

    pub fn is_unit(&self, m: &Monomial) -> bool {
        m.iter().all(|&e| e == 0)
    }

    pub fn degree(&self, m: &Monomial) -> u32 {
        m.iter().zip(&self.letters).map(|(&e, l)| e * l.degree).sum()
    }

    pub fn filtration(&self, m: &Monomial) -> u32 {
        m.iter().zip(&self.letters).map(|(&e, l)| e * l.filtration).sum()
    }

    /// Parity of the degree.
    pub fn is_odd(&self, m: &Monomial) -> bool {
        self.degree(m) % 2 == 1
    }

    fn allowed(&self, m: &Monomial) -> bool {
        if self.square_zero && m.iter().sum::<u32>() > 1 {
            return false;
        }
        m.iter()
            .zip(&self.letters)
            .all(|(&e, l)| l.height.is_none_or(|h| e < h))
    }

    /// Product of two monomials: the result and whether its sign is negative.
    pub fn mul_mono(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        if self.square_zero && !self.is_unit(a) && !self.is_unit(b) {
            return None;
        }
        let mut out = Vec::with_capacity(a.len());
        for (i, l) in self.letters.iter().enumerate() {
            let e = if l.idempotent {
                (a[i] + b[i]).min(1)
            } else {
                a[i] + b[i]
            };
            if l.height.is_some_and(|h| e >= h) {
                return None;
            }
            out.push(e);
        }
        // sign Π_{i>j} (-1)^{a_i b_j |x_i||x_j|}
        let mut odd_in_b = 0u32;
        let mut neg = false;
        for (i, l) in self.letters.iter().enumerate() {
            if l.degree % 2 == 1 {
                if a[i] % 2 == 1 && odd_in_b % 2 == 1 {
                    neg = !neg;
                }
                odd_in_b += b[i];
            }
        }
        Some((out, neg && self.p() != 2))
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        let f = &self.field;
        let mut out = Element::zero();
        for (a, &c) in &x.terms {
            for (b, &d) in &y.terms {
                if let Some((m, neg)) = self.mul_mono(a, b) {
                    let k = f.mul(c, d);
                    out.add_term(f, m, if neg { f.neg(k) } else { k });
                }
            }
        }
        out
    }

    pub fn pow(&self, x: &Element, e: u32) -> Element {
        let mut out = Element::monomial(self.unit());
        for _ in 0..e {
            out = self.mul(&out, x);
        }
        out
    }

    fn enumerate(&self, d: u32) -> Vec<Monomial> {
        fn rec(alg: &Algebra, i: usize, d: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
            if i == alg.letters.len() {
                if d == 0 && alg.allowed(cur) {
                    out.push(cur.clone());
                }
                return;
            }
            let l = &alg.letters[i];
            let max_e = match (l.degree, l.height) {
                (0, h) => h.unwrap_or(1) - 1,
                (g, Some(h)) => (h - 1).min(d / g),
                (g, None) => d / g,
            };
            for e in 0..=max_e {
                cur[i] = e;
                rec(alg, i + 1, d - e * l.degree, cur, out);
            }
            cur[i] = 0;
        }
        let mut out = Vec::new();
        let mut cur = self.unit();
        rec(self, 0, d, &mut cur, &mut out);
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    fn basis_entry(&self, d: u32) -> Result<Arc<Basis>> {
        if d > self.bound {
            return Err(Error::BoundExceeded {
                degree: d,
                bound: self.bound,
            });
        }
        if let Some(hit) = self.cache.lock().unwrap().get(&d) {
            return Ok(hit.clone());
        }
        let monomials = self.enumerate(d);
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let entry = Arc::new(Basis {
            monomials: Arc::new(monomials),
            index,
        });
        self.cache.lock().unwrap().insert(d, entry.clone());
        Ok(entry)
    }

    /// Monomials of internal degree `d`.
    pub fn monomial_basis(&self, d: u32) -> Result<Arc<Vec<Monomial>>> {
        Ok(self.basis_entry(d)?.monomials.clone())
    }

    pub fn basis_index(&self, m: &Monomial) -> Option<usize> {
        let d = self.degree(m);
        self.basis_entry(d).ok()?.index.get(m).copied()
    }

    pub fn to_vector(&self, x: &Element) -> Result<SparseVec> {
        let mut pairs = Vec::new();
        for (m, &c) in &x.terms {
            let i = self.basis_index(m).ok_or_else(|| {
                Error::InvalidPresentation(format!("{} is not a basis monomial", self.label(m)))
            })?;
            pairs.push((i, c));
        }
        Ok(SparseVec::from_pairs(&self.field, pairs))
    }

    pub fn from_vector(&self, v: &SparseVec, d: u32) -> Result<Element> {
        let basis = self.monomial_basis(d)?;
        let mut out = Element::zero();
        for &(i, c) in v.entries() {
            out.add_term(&self.field, basis[i].clone(), c);
        }
        Ok(out)
    }

    pub fn label(&self, m: &Monomial) -> String {
        if self.is_unit(m) {
            return "1".into();
        }
        let mut parts = Vec::new();
        for (l, &e) in self.letters.iter().zip(m) {
            let name = if l.name.contains('^') && e > 1 {
                format!("[{}]", l.name)
            } else {
                l.name.clone()
            };
            match e {
                0 => {}
                1 => parts.push(name),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        parts.join("*")
    }

    pub fn element_label(&self, x: &Element) -> String {
        if x.is_zero() {
            return "0".into();
        }
        x.terms
            .iter()
            .map(|(m, &c)| {
                if c == 1 {
                    self.label(m)
                } else {
                    format!("{c}*{}", self.label(m))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses a monomial label such as `b*xib1^4` or `[xib1^4]^2`.
    pub fn parse_monomial(&self, s: &str) -> Result<Monomial> {
        let err = || Error::Parse {
            what: "monomial",
            input: s.to_string(),
        };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut m = self.unit();
        if t == "1" {
            return Ok(m);
        }
        for factor in t.split('*') {
            let (name, e) = if let Some(i) = self.letter_index(factor) {
                (i, 1)
            } else if let Some(rest) = factor.strip_prefix('[') {
                let (inner, tail) = rest.split_once(']').ok_or_else(err)?;
                let e = match tail.strip_prefix('^') {
                    Some(e) => e.parse().map_err(|_| err())?,
                    None if tail.is_empty() => 1,
                    None => return Err(err()),
                };
                (self.letter_index(inner).ok_or_else(err)?, e)
            } else {
                let (n, e) = factor.rsplit_once('^').ok_or_else(err)?;
                (
                    self.letter_index(n).ok_or_else(err)?,
                    e.parse().map_err(|_| err())?,
                )
            };
            m[name] += e;
        }
        if !self.allowed(&m) {
            return Err(err());
        }
        Ok(m)
    }

    /// `γ_j` of the divided-power generator `generator`, expanded through
    /// `Γ(x) = P_p(γ_{p^i}(x))`: `γ_j = Π γ_{p^i}^{j_i} / j_i!`.
    pub fn divided_power(&self, generator: usize, j: u32) -> Result<Element> {
        let p = self.p();
        let f = &self.field;
        let mut m = self.unit();
        let mut coef = 1u32;
        let mut rest = j;
        let mut power = 1u32;
        while rest > 0 {
            let digit = rest % p;
            if digit > 0 {
                let idx = self
                    .letters
                    .iter()
                    .position(|l| l.generator == generator && l.dp_power == Some(power))
                    .ok_or(Error::BoundExceeded {
                        degree: j * self.presentation.generators[generator].degree,
                        bound: self.bound,
                    })?;
                m[idx] = digit;
                for k in 1..=digit {
                    coef = f.mul(coef, f.inv(k));
                }
            }
            rest /= p;
            power = power.saturating_mul(p);
        }
        if self.presentation.generators[generator].kind != Kind::DividedPower {
            return Err(Error::UnsupportedKind(
                self.presentation.generators[generator].name.clone(),
            ));
        }
        Ok(Element::term(m, coef))
    }
}

/// Dimensions `dim_d` for `0 <= d <= n`, from the generating function.
pub fn poincare_series(alg: &Algebra, n: u32) -> Vec<usize> {
    let n = n as usize;
    let mut series = vec![0usize; n + 1];
    series[0] = 1;
    if alg.is_square_zero() {
        for l in alg.letters() {
            if (l.degree as usize) <= n {
                series[l.degree as usize] += 1;
            }
        }
        return series;
    }
    for l in alg.letters() {
        let d = l.degree as usize;
        if d == 0 {
            // an idempotent doubles every degree
            for s in series.iter_mut() {
                *s *= 2;
            }
            continue;
        }
        let mut next = vec![0usize; n + 1];
        for (i, &s) in series.iter().enumerate() {
            if s == 0 {
                continue;
            }
            let mut e = 0usize;
            while i + e * d <= n && l.height.is_none_or(|h| (e as u32) < h) {
                next[i + e * d] += s;
                e += 1;
            }
        }
        series = next;
    }
    series
}

/// An element of `A_* ⊗ H`, keyed by `(a, x)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoTensor {
    pub terms: BTreeMap<(MilnorMonomial, Monomial), u32>,
}

impl CoTensor {
    fn add_term(&mut self, f: &PrimeField, key: (MilnorMonomial, Monomial), c: u32) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Coaction values `ν(g) = Σ c · a ⊗ x` on the letters of an algebra.
#[derive(Clone, Debug, Default)]
pub struct CoactionTable {
    entries: HashMap<usize, Vec<(MilnorMonomial, u32, Monomial)>>,
}

impl CoactionTable {
    pub fn new() -> Self {
        CoactionTable::default()
    }

    /// Sets `ν(letter)`. The term `1 ⊗ letter` must be included.
    pub fn set(&mut self, letter: usize, terms: Vec<(MilnorMonomial, u32, Monomial)>) {
        self.entries.insert(letter, terms);
    }

    pub fn set_primitive(&mut self, alg: &Algebra, letter: usize) {
        self.set(letter, vec![(MilnorMonomial::one(true), 1, alg.letter(letter))]);
    }

    pub fn get(&self, letter: usize) -> Option<&[(MilnorMonomial, u32, Monomial)]> {
        self.entries.get(&letter).map(Vec::as_slice)
    }

    pub fn from_spec(alg: &Algebra, spec: &BTreeMap<String, Vec<CoactionTermSpec>>) -> Result<Self> {
        let mut table = CoactionTable::new();
        for (name, terms) in spec {
            let letter = alg.letter_index(name).ok_or_else(|| Error::Parse {
                what: "coaction generator",
                input: name.clone(),
            })?;
            let mut parsed = Vec::new();
            for t in terms {
                let a: MilnorMonomial = t.a.parse()?;
                parsed.push((a, t.c, alg.parse_monomial(&t.x)?));
            }
            table.set(letter, parsed);
        }
        Ok(table)
    }

    pub fn to_spec(&self, alg: &Algebra) -> BTreeMap<String, Vec<CoactionTermSpec>> {
        let mut out = BTreeMap::new();
        for (&letter, terms) in &self.entries {
            out.insert(
                alg.letters()[letter].name.clone(),
                terms
                    .iter()
                    .map(|(a, c, x)| CoactionTermSpec {
                        a: a.to_string(),
                        c: *c,
                        x: alg.label(x),
                    })
                    .collect(),
            );
        }
        out
    }
}

fn cotensor_mul(alg: &Algebra, x: &CoTensor, y: &CoTensor) -> CoTensor {
    let f = alg.field();
    let p = alg.p();
    let mut out = CoTensor::default();
    for ((a, m), &c) in &x.terms {
        for ((b, n), &d) in &y.terms {
            let Some((ab, s1)) = a.mul(b) else { continue };
            let Some((mn, s2)) = alg.mul_mono(m, n) else {
                continue;
            };
            // (a⊗m)(b⊗n) = (-1)^{|m||b|} ab ⊗ mn
            let s3 = alg.is_odd(m) && b.degree(p) % 2 == 1;
            let neg = p != 2 && (s1 ^ s2 ^ s3);
            let k = f.mul(c, d);
            out.add_term(f, (ab, mn), if neg { f.neg(k) } else { k });
        }
    }
    out
}

/// `ν(m)` for a monomial, extended multiplicatively from the table.
pub fn coaction(alg: &Algebra, table: &CoactionTable, m: &Monomial) -> Result<CoTensor> {
    let f = alg.field();
    let mut out = CoTensor::default();
    out.add_term(f, (MilnorMonomial::one(true), alg.unit()), 1);
    for (i, &e) in m.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let letter = &alg.letters()[i];
        let mut nu = CoTensor::default();
        if letter.idempotent {
            nu.add_term(f, (MilnorMonomial::one(true), alg.letter(i)), 1);
        } else {
            let terms = table
                .get(i)
                .ok_or(Error::CoactionUnavailable(letter.degree))?;
            for (a, c, x) in terms {
                nu.add_term(f, (a.clone(), x.clone()), *c);
            }
        }
        for _ in 0..e {
            out = cotensor_mul(alg, &out, &nu);
        }
    }
    Ok(out)
}

pub fn coaction_of(alg: &Algebra, table: &CoactionTable, x: &Element) -> Result<CoTensor> {
    let f = alg.field();
    let mut out = CoTensor::default();
    for (m, &c) in &x.terms {
        for (k, &d) in &coaction(alg, table, m)?.terms {
            out.add_term(f, k.clone(), f.mul(c, d));
        }
    }
    Ok(out)
}

/// Basis of `{x : ν(x) = 1 ⊗ x}` in degree `d`.
pub fn comodule_primitives(alg: &Algebra, table: &CoactionTable, d: u32) -> Result<Vec<Element>> {
    let basis = alg.monomial_basis(d)?;
    let mut rows: HashMap<(MilnorMonomial, Monomial), usize> = HashMap::new();
    let mut entries = Vec::new();
    for (col, m) in basis.iter().enumerate() {
        for ((a, x), &c) in &coaction(alg, table, m)?.terms {
            if a.is_one() {
                continue;
            }
            let n = rows.len();
            let row = *rows.entry((a.clone(), x.clone())).or_insert(n);
            entries.push((row, col, c));
        }
    }
    let mat = SparseMat::from_entries(alg.field(), rows.len(), basis.len(), entries);
    kernel_basis(alg.field(), &mat)
        .iter()
        .map(|v| alg.from_vector(v, d))
        .collect()
}

pub fn is_comodule_primitive(alg: &Algebra, table: &CoactionTable, x: &Element) -> Result<bool> {
    let nu = coaction_of(alg, table, x)?;
    Ok(nu.terms.keys().all(|(a, _)| a.is_one()))
}

/// The counit law `(ε ⊗ 1)ν = id` on a monomial.
pub fn check_counit(alg: &Algebra, table: &CoactionTable, m: &Monomial) -> Result<bool> {
    let nu = coaction(alg, table, m)?;
    let units: Vec<_> = nu.terms.iter().filter(|((a, _), _)| a.is_one()).collect();
    Ok(units.len() == 1 && units[0].0 .1 == *m && *units[0].1 == 1)
}

/// Coassociativity `(ψ ⊗ 1)ν = (1 ⊗ ν)ν` on a monomial.
pub fn check_coassociative(alg: &Algebra, table: &CoactionTable, m: &Monomial) -> Result<bool> {
    let f = alg.field();
    let p = alg.p();
    let nu = coaction(alg, table, m)?;
    type Key = (MilnorMonomial, MilnorMonomial, Monomial);
    let add = |map: &mut BTreeMap<Key, u32>, k: Key, c: u32| {
        let e = map.entry(k.clone()).or_insert(0);
        *e = f.add(*e, f.reduce(c as i64));
        if *e == 0 {
            map.remove(&k);
        }
    };
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for ((a, x), &c) in &nu.terms {
        for (pair, d) in milnor_coproduct(p, a).terms() {
            add(&mut left, (pair[0].clone(), pair[1].clone(), x.clone()), f.mul(c, d));
        }
        for ((b, y), &d) in &coaction(alg, table, x)?.terms {
            // a ⊗ (b ⊗ y): no sign, b is moved nowhere
            add(&mut right, (a.clone(), b.clone(), y.clone()), f.mul(c, d));
        }
    }
    Ok(left == right)
}

/// `Sq^r_*(x) = Σ <Sq^r, a_i> x_i` where `ν(x) = Σ a_i ⊗ x_i` (p = 2).
pub fn dual_action(alg: &Algebra, table: &CoactionTable, r: u32, x: &Element) -> Result<Element> {
    if alg.p() != 2 {
        return Err(Error::NeedsPrimeTwo(alg.p()));
    }
    let f = alg.field();
    let mut out = Element::zero();
    for ((a, y), &c) in &coaction_of(alg, table, x)?.terms {
        if pair_sq(r, a) == 1 {
            out.add_term(f, y.clone(), c);
        }
    }
    Ok(out)
}

/// Coproducts of the fiber letters of `Λ ⊗ F` over the base `Λ`.
#[derive(Clone, Debug)]
pub struct HopfData {
    fiber: Vec<bool>,
    coproduct: HashMap<usize, Vec<(Monomial, Monomial, u32)>>,
}

impl HopfData {
    /// Letters with positive filtration form the fiber. Divided-power
    /// letters get `ψ(γ_n) = Σ γ_a ⊗ γ_b`, all others are primitive.
    pub fn standard(alg: &Algebra) -> Result<Self> {
        let fiber: Vec<bool> = alg.letters().iter().map(|l| l.filtration > 0).collect();
        let mut coproduct = HashMap::new();
        for (i, l) in alg.letters().iter().enumerate() {
            if !fiber[i] {
                continue;
            }
            let terms = match l.dp_power {
                Some(n) if n > 1 => {
                    let mut terms = Vec::new();
                    for a in 0..=n {
                        let ga = alg.divided_power(l.generator, a)?;
                        let gb = alg.divided_power(l.generator, n - a)?;
                        for (x, &c) in &ga.terms {
                            for (y, &d) in &gb.terms {
                                terms.push((x.clone(), y.clone(), alg.field().mul(c, d)));
                            }
                        }
                    }
                    terms
                }
                _ => vec![(alg.letter(i), alg.unit(), 1), (alg.unit(), alg.letter(i), 1)],
            };
            coproduct.insert(i, terms);
        }
        Ok(HopfData { fiber, coproduct })
    }

    pub fn is_fiber(&self, letter: usize) -> bool {
        self.fiber[letter]
    }

    pub fn set(&mut self, letter: usize, terms: Vec<(Monomial, Monomial, u32)>) {
        self.fiber[letter] = true;
        self.coproduct.insert(letter, terms);
    }

    fn fiber_part(&self, m: &Monomial) -> Monomial {
        m.iter()
            .enumerate()
            .map(|(i, &e)| if self.fiber[i] { e } else { 0 })
            .collect()
    }

    fn base_part(&self, m: &Monomial) -> Monomial {
        m.iter()
            .enumerate()
            .map(|(i, &e)| if self.fiber[i] { 0 } else { e })
            .collect()
    }
}

/// `ψ(m)` in `H ⊗_Λ H`, with base letters gathered in the left factor.
pub fn hopf_coproduct(
    alg: &Algebra,
    h: &HopfData,
    m: &Monomial,
) -> BTreeMap<(Monomial, Monomial), u32> {
    let f = alg.field();
    let p = alg.p();
    let mut acc: BTreeMap<(Monomial, Monomial), u32> = BTreeMap::new();
    acc.insert((alg.unit(), alg.unit()), 1);
    for (i, &e) in m.iter().enumerate() {
        for _ in 0..e {
            let gen: Vec<(Monomial, Monomial, u32)> = if h.fiber[i] {
                h.coproduct[&i].clone()
            } else {
                vec![(alg.letter(i), alg.unit(), 1)]
            };
            let mut next = BTreeMap::new();
            for ((a, b), &c) in &acc {
                for (x, y, d) in &gen {
                    let Some((ax, s1)) = alg.mul_mono(a, x) else {
                        continue;
                    };
                    let Some((by, s2)) = alg.mul_mono(b, y) else {
                        continue;
                    };
                    let s3 = alg.is_odd(b) && alg.is_odd(x);
                    let neg = p != 2 && (s1 ^ s2 ^ s3);
                    let k = f.mul(c, *d);
                    let entry = next.entry((ax, by)).or_insert(0);
                    *entry = f.add(*entry, if neg { f.neg(k) } else { k });
                }
            }
            next.retain(|_, c| *c != 0);
            acc = next;
        }
    }
    acc
}

/// Coalgebra primitives of `Λ ⊗ F` in degree `d`, excluding the base.
pub fn coalgebra_primitives(alg: &Algebra, h: &HopfData, d: u32) -> Result<Vec<Element>> {
    let basis = alg.monomial_basis(d)?;
    let cols: Vec<(usize, &Monomial)> = basis
        .iter()
        .enumerate()
        .filter(|(_, m)| !alg.is_unit(&h.fiber_part(m)))
        .collect();
    let mut rows: HashMap<(Monomial, Monomial), usize> = HashMap::new();
    let mut entries = Vec::new();
    for (col, (_, m)) in cols.iter().enumerate() {
        let left = ((*m).clone(), alg.unit());
        let right = (h.base_part(m), h.fiber_part(m));
        for (k, c) in hopf_coproduct(alg, h, m) {
            if k == left || k == right {
                continue;
            }
            let n = rows.len();
            let row = *rows.entry(k).or_insert(n);
            entries.push((row, col, c));
        }
    }
    let mat = SparseMat::from_entries(alg.field(), rows.len(), cols.len(), entries);
    let f = alg.field();
    Ok(kernel_basis(f, &mat)
        .iter()
        .map(|v| {
            let mut e = Element::zero();
            for &(i, c) in v.entries() {
                e.add_term(f, cols[i].1.clone(), c);
            }
            e
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bases() {
        let pres = AlgebraPresentation::new(
            2,
            vec![GeneratorSpec::exterior("a", 1), GeneratorSpec::polynomial("b", 2)],
        );
        let alg = Algebra::new(&pres, 10).unwrap();
        let b3 = alg.monomial_basis(3).unwrap();
        assert_eq!(b3.len(), 1);
        assert_eq!(alg.label(&b3[0]), "a*b");
        assert_eq!(alg.monomial_basis(0).unwrap().len(), 1);
        assert!(alg.monomial_basis(11).is_err());
    }

    #[test]
    fn divided_power_expansion() {
        let pres = AlgebraPresentation::new(3, vec![GeneratorSpec::divided_power("x", 2)]);
        let alg = Algebra::new(&pres, 30).unwrap();
        let names: Vec<&str> = alg.letters().iter().map(|l| l.name.as_str()).collect();
        assert_eq!(names, vec!["x", "g3(x)", "g9(x)"]);
        let b6 = alg.monomial_basis(6).unwrap();
        assert_eq!(b6.len(), 1);
        assert_eq!(alg.label(&b6[0]), "g3(x)");
        assert_eq!(poincare_series(&alg, 6), vec![1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn validation() {
        let bad = AlgebraPresentation::new(3, vec![GeneratorSpec::exterior("x", 2)]);
        assert!(Algebra::new(&bad, 10).is_err());
        let bad = AlgebraPresentation::new(3, vec![GeneratorSpec::polynomial("x", 3)]);
        assert!(Algebra::new(&bad, 10).is_err());
        let bad = AlgebraPresentation::new(2, vec![GeneratorSpec::polynomial("x", 0)]);
        assert!(Algebra::new(&bad, 10).is_err());
        let bad = AlgebraPresentation::new(4, vec![]);
        assert!(Algebra::new(&bad, 10).is_err());
    }

    #[test]
    fn idempotent_algebra() {
        let pres = AlgebraPresentation::new(2, vec![GeneratorSpec::idempotent("u")]);
        let alg = Algebra::new(&pres, 0).unwrap();
        assert_eq!(alg.monomial_basis(0).unwrap().len(), 2);
        let u = Element::monomial(alg.letter(0));
        assert_eq!(alg.mul(&u, &u), u);
    }

    #[test]
    fn parse_labels() {
        let pres = AlgebraPresentation::new(
            2,
            vec![GeneratorSpec::polynomial("xib1^4", 4), GeneratorSpec::exterior("b", 3)],
        );
        let alg = Algebra::new(&pres, 20).unwrap();
        let m = alg.parse_monomial("[xib1^4]^2*b").unwrap();
        assert_eq!(m, vec![2, 1]);
        assert_eq!(alg.parse_monomial(&alg.label(&m)).unwrap(), m);
        assert!(alg.parse_monomial("b^2").is_err());
    }
}
