//! The Bökstedt spectral sequence `E² = HH_*(H_*(R)) ⇒ H_*(THH(R))`.
//!
//! The pipeline is `build_e2 → apply_d_pminus1 → page_homology →
//! collapse_check / obstruction_scan → resolve_extensions`, and
//! [`thh_homology`] chains the stages and compares the abutment with the
//! catalog's expected presentation.

pub mod catalog;
pub mod nishida;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::fplin::{rank, Echelon, SparseMat, SparseVec};
use crate::gca::{
    coaction, hopf_coproduct, poincare_series, Algebra, AlgebraPresentation, CoactionTable,
    CoactionTermSpec, Element, GeneratorSpec, HopfData, Kind, Monomial,
};
use crate::hochschild::{bigraded_dims, closed_form_hh, hh_homology, hh_squarezero};
use crate::steenrod::dual::MilnorMonomial;
use crate::{Error, Result};

pub use catalog::{catalog, custom_entry, DlTable, DlValue, SpectrumEntry, SpectrumId, Structure};

/// One bigraded dimension: filtration `s`, total degree `degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub s: u32,
    pub degree: u32,
    pub dim: usize,
}

pub type Bigraded = BTreeMap<(u32, u32), usize>;

fn to_cells(dims: &Bigraded) -> Vec<Cell> {
    dims.iter()
        .filter(|(_, &d)| d > 0)
        .map(|(&(s, degree), &dim)| Cell { s, degree, dim })
        .collect()
}

/// Total-degree series `0..=n` of bigraded dims.
pub fn total_series(dims: &Bigraded, n: u32) -> Vec<usize> {
    let mut out = vec![0; n as usize + 1];
    for (&(_, d), &c) in dims {
        if d <= n {
            out[d as usize] += c;
        }
    }
    out
}

/// Bigraded Poincaré series `(filtration, degree)` of a presented algebra
/// through degree `n`, from the generating function.
pub fn bigraded_series(alg: &Algebra, n: u32) -> Bigraded {
    let mut acc: Bigraded = BTreeMap::from([((0, 0), 1)]);
    for l in alg.letters() {
        if l.degree == 0 || l.degree > n {
            continue;
        }
        let mut next = BTreeMap::new();
        for (&(s, d), &c) in &acc {
            let mut e = 0u32;
            while d + e * l.degree <= n && l.height.is_none_or(|h| e < h) {
                *next.entry((s + e * l.filtration, d + e * l.degree)).or_insert(0) += c;
                e += 1;
            }
        }
        acc = next;
    }
    acc
}

fn convolve(a: &Bigraded, b: &Bigraded, n: u32) -> Bigraded {
    let mut out = BTreeMap::new();
    for (&(s1, d1), &c1) in a {
        for (&(s2, d2), &c2) in b {
            if d1 + d2 <= n {
                *out.entry((s1 + s2, d1 + d2)).or_insert(0) += c1 * c2;
            }
        }
    }
    out.retain(|_, c| *c > 0);
    out
}

/// A page `E^r` presented as an algebra with a derivation `d^r` on letters.
#[derive(Clone, Debug, Serialize)]
pub struct SsPage {
    pub p: u32,
    pub r: u32,
    pub bound: u32,
    /// `None` when the page could not be recognized as a presented algebra.
    pub presentation: Option<AlgebraPresentation>,
    /// `d^r` on letters: `(coefficient, monomial label)` terms.
    pub differential: BTreeMap<String, Vec<(u32, String)>>,
    /// Divided-power generators whose `γ_p` supports a non-zero `d^{p-1}`.
    pub truncated: Vec<String>,
    pub dims: Vec<Cell>,
}

impl SsPage {
    pub fn dims_map(&self) -> Bigraded {
        self.dims.iter().map(|c| ((c.s, c.degree), c.dim)).collect()
    }

    pub fn series(&self) -> Vec<usize> {
        total_series(&self.dims_map(), self.bound)
    }

    pub fn algebra(&self) -> Result<Algebra> {
        let pres = self
            .presentation
            .as_ref()
            .ok_or_else(|| Error::NotFlat("page has no presentation".into()))?;
        Algebra::new(pres, self.bound)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub through: u32,
    pub agrees: bool,
}

/// `E²` is either a presented algebra or, when not flat, bare dimensions.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum E2Term {
    Flat { page: SsPage, cross_check: CrossCheck },
    NonFlat { dims: Vec<Cell>, series: Vec<usize> },
}

/// The raw Hochschild cross-check range: `min(n, 20)`, lowered to 12 when
/// the base has a polynomial generator in degree 1 (`ξ̄_1` in `A_*`),
/// whose Hochschild complex grows too fast beyond that.
pub fn cross_check_bound(entry: &SpectrumEntry, n: u32) -> u32 {
    let low = entry
        .base
        .generators
        .iter()
        .any(|g| g.degree == 1 && g.kind == Kind::Polynomial);
    n.min(if low { 12 } else { 20 })
}

/// Compares raw `hh_homology` of the base with the closed form through
/// internal degree `t`.
pub fn cross_check(base: &AlgebraPresentation, t: u32) -> Result<bool> {
    let qmax = t as usize;
    let alg = Algebra::new(base, t)?;
    let raw = hh_homology(&alg, t, qmax, false)?;
    let closed = Algebra::new(&closed_form_hh(base)?.presentation, t + qmax as u32 + 1)?;
    let expected = bigraded_dims(&closed, t, qmax)?;
    let got: BTreeMap<(usize, u32), usize> = raw
        .dims
        .into_iter()
        .filter(|&((q, tt), d)| d > 0 && q <= qmax && tt <= t)
        .collect();
    let expected: BTreeMap<(usize, u32), usize> = expected.into_iter().filter(|&(_, d)| d > 0).collect();
    Ok(got == expected)
}

/// `E²(R) = HH_*(H_*(R))` through total degree `n`.
pub fn build_e2(entry: &SpectrumEntry, n: u32) -> Result<E2Term> {
    if let Some(nf) = &entry.nonflat {
        // Künneth: HH of the flat quotient ⊗ HH of the square-zero part
        let closed = Algebra::new(&closed_form_hh(&nf.quotient)?.presentation, n)?;
        let left = bigraded_series(&closed, n);
        let min = nf.kernel_degrees.iter().copied().min().unwrap_or(1).max(1);
        let qmax = (n / min) as usize + 1;
        let mut right = Bigraded::new();
        for ((q, t), d) in hh_squarezero(entry.p, &nf.kernel_degrees, n, qmax)? {
            let total = q as u32 + t;
            if total <= n {
                *right.entry((q as u32, total)).or_insert(0) += d;
            }
        }
        let dims = convolve(&left, &right, n);
        return Ok(E2Term::NonFlat {
            series: total_series(&dims, n),
            dims: to_cells(&dims),
        });
    }
    let cf = closed_form_hh(&entry.base)?;
    let alg = Algebra::new(&cf.presentation, n)?;
    let dims = bigraded_series(&alg, n);
    let through = cross_check_bound(entry, n);
    let agrees = cross_check(&entry.base, through)?;
    Ok(E2Term::Flat {
        page: SsPage {
            p: entry.p,
            r: 2,
            bound: n,
            presentation: Some(cf.presentation),
            differential: BTreeMap::new(),
            truncated: Vec::new(),
            dims: to_cells(&dims),
        },
        cross_check: CrossCheck { through, agrees },
    })
}

/// The base generator `x` of a σ-letter named `s(x)`.
fn sigma_base(name: &str) -> Option<&str> {
    name.strip_prefix("s(")?.strip_suffix(')')
}

fn base_spec<'a>(entry: &'a SpectrumEntry, name: &str) -> Option<&'a GeneratorSpec> {
    entry.base.generators.iter().find(|g| g.name == name)
}

fn element_terms(alg: &Algebra, x: &Element) -> Vec<(u32, String)> {
    x.terms.iter().map(|(m, &c)| (c, alg.label(m))).collect()
}

/// `d^{p-1}(γ_{p^i}(σx)) = σ(βQ^{(|x|+1)/2} x) · γ_{p^i - p}(σx)`, with the
/// unit fixed to 1. The identity at `p = 2`.
pub fn apply_d_pminus1(page: &SsPage, entry: &SpectrumEntry) -> Result<SsPage> {
    let p = page.p;
    if p == 2 {
        return Ok(page.clone());
    }
    // d is recorded one degree past the bound for page_homology
    let pres = page
        .presentation
        .clone()
        .ok_or_else(|| Error::NotFlat("page has no presentation".into()))?;
    let alg = Algebra::new(&pres, page.bound + 1)?;
    let base_alg = entry.base_algebra()?;
    let mut differential = BTreeMap::new();
    let mut truncated = Vec::new();
    for (gi, g) in pres.generators.iter().enumerate() {
        if g.kind != Kind::DividedPower {
            continue;
        }
        let Some(x) = sigma_base(&g.name).and_then(|x| base_spec(entry, x)) else {
            continue;
        };
        let k = (x.degree + 1) / 2;
        let target = match entry.dl.lookup(x, k) {
            Some(DlValue::Zero) => None,
            Some(DlValue::Class(y)) => match entry.dl.beta(&y) {
                Some(DlValue::Zero) => None,
                Some(DlValue::Class(z)) => Some(z),
                None => return Err(Error::MissingBockstein(y)),
            },
            None => {
                // zero when the target group of βQ^k(x) vanishes
                let d = p * (x.degree + 1) - 2;
                if d <= base_alg.bound() && base_alg.monomial_basis(d)?.is_empty() {
                    None
                } else {
                    return Err(Error::MissingDyerLashof {
                        generator: x.name.clone(),
                        k,
                    });
                }
            }
        };
        let Some(z) = target else { continue };
        truncated.push(g.name.clone());
        let sz = format!("s({z})");
        for (li, l) in alg.letters().iter().enumerate() {
            if l.generator != gi || l.dp_power.is_none_or(|n| n < p) {
                continue;
            }
            let Some(si) = alg.letter_index(&sz) else {
                return Err(Error::InvalidPresentation(format!(
                    "{sz} is missing from the page but {} is present",
                    l.name
                )));
            };
            let rest = alg.divided_power(gi, l.dp_power.unwrap() - p)?;
            let value = alg.mul(&Element::monomial(alg.letter(si)), &rest);
            let _ = li;
            differential.insert(l.name.clone(), element_terms(&alg, &value));
        }
    }
    Ok(SsPage {
        r: p - 1,
        differential,
        truncated,
        ..page.clone()
    })
}

/// Applies a derivation of odd degree given on letters to a monomial.
pub fn apply_derivation(alg: &Algebra, d: &HashMap<usize, Element>, m: &Monomial) -> Element {
    let f = alg.field();
    let mut out = Element::zero();
    for (i, &e) in m.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let Some(dx) = d.get(&i) else { continue };
        let mut left = m.clone();
        for v in left.iter_mut().skip(i) {
            *v = 0;
        }
        let sign_neg = alg.is_odd(&left) && alg.p() != 2;
        left[i] = e - 1;
        let mut right = alg.unit();
        right[(i + 1)..].copy_from_slice(&m[(i + 1)..]);
        let term = alg.mul(&alg.mul(&Element::monomial(left), dx), &Element::monomial(right));
        let mut c = f.reduce(e as i64);
        if sign_neg {
            c = f.neg(c);
        }
        out = out.add(f, &term.scale(f, c));
    }
    out
}

fn parse_differential(alg: &Algebra, page: &SsPage) -> Result<HashMap<usize, Element>> {
    let f = alg.field();
    let mut d = HashMap::new();
    for (name, terms) in &page.differential {
        let Some(i) = alg.letter_index(name) else { continue };
        let mut x = Element::zero();
        for (c, label) in terms {
            x.add_term(f, alg.parse_monomial(label)?, *c);
        }
        d.insert(i, x);
    }
    Ok(d)
}

/// The filtration-positive part of a page presentation.
fn fiber_presentation(pres: &AlgebraPresentation) -> AlgebraPresentation {
    AlgebraPresentation::new(
        pres.p,
        pres.generators.iter().filter(|g| g.filtration > 0).cloned().collect(),
    )
}

fn base_presentation(pres: &AlgebraPresentation) -> AlgebraPresentation {
    AlgebraPresentation::new(
        pres.p,
        pres.generators.iter().filter(|g| g.filtration == 0).cloned().collect(),
    )
}

/// Monomials of `alg` grouped by `(filtration, degree)`.
fn grouped(alg: &Algebra, n: u32) -> Result<BTreeMap<(u32, u32), Vec<Monomial>>> {
    let mut out: BTreeMap<(u32, u32), Vec<Monomial>> = BTreeMap::new();
    for d in 0..=n {
        for m in alg.monomial_basis(d)?.iter() {
            out.entry((alg.filtration(m), d)).or_default().push(m.clone());
        }
    }
    Ok(out)
}

/// Homology of the fiber of a page under its differential: bigraded dims
/// and, per bidegree, the image subspace (as an echelon) for class checks.
struct FiberHomology {
    dims: Bigraded,
    images: HashMap<(u32, u32), Echelon>,
    groups: BTreeMap<(u32, u32), Vec<Monomial>>,
}

fn fiber_homology(alg: &Algebra, d: &HashMap<usize, Element>, r: u32, n: u32) -> Result<FiberHomology> {
    let f = alg.field();
    let groups = grouped(alg, n)?;
    let index: HashMap<&Monomial, usize> = groups
        .values()
        .flat_map(|v| v.iter().enumerate().map(|(i, m)| (m, i)))
        .collect();
    let mut out_rank: HashMap<(u32, u32), usize> = HashMap::new();
    let mut images: HashMap<(u32, u32), Echelon> = HashMap::new();
    for (&(s, deg), ms) in &groups {
        if s < r || deg == 0 {
            continue;
        }
        let tkey = (s - r, deg - 1);
        let Some(target) = groups.get(&tkey) else { continue };
        let mut cols = Vec::new();
        for m in ms {
            let dm = apply_derivation(alg, d, m);
            let mut pairs = Vec::new();
            for (t, &c) in &dm.terms {
                if alg.filtration(t) != s - r || alg.degree(t) != deg - 1 {
                    return Err(Error::InvalidPresentation(
                        "differential does not have the page bidegree".into(),
                    ));
                }
                pairs.push((index[t], c));
            }
            cols.push(SparseVec::from_pairs(f, pairs));
        }
        let mat = SparseMat::from_columns(f, target.len(), &cols);
        out_rank.insert((s, deg), rank(f, &mat));
        let mut ech = Echelon::new(f, target.len());
        for c in &cols {
            ech.insert(c);
        }
        images.insert(tkey, ech);
    }
    let mut dims = Bigraded::new();
    for (&key, ms) in &groups {
        let ker = ms.len() - out_rank.get(&key).copied().unwrap_or(0);
        let im = images.get(&key).map_or(0, |e| e.dim());
        if ker > im {
            dims.insert(key, ker - im);
        }
    }
    Ok(FiberHomology { dims, images, groups })
}

/// The presentation expected after `d^{p-1}`: each truncated `Γ(σx)`
/// becomes `P_p(σx)` and the targets `σy` disappear.
fn candidate(page: &SsPage, pres: &AlgebraPresentation, alg: &Algebra) -> AlgebraPresentation {
    let p = page.p;
    let mut targets = BTreeSet::new();
    for terms in page.differential.values() {
        for (_, label) in terms {
            if let Ok(m) = alg.parse_monomial(label) {
                for (i, &e) in m.iter().enumerate() {
                    let l = &alg.letters()[i];
                    if e > 0 && l.filtration == 1 && l.dp_power.is_none() {
                        targets.insert(l.name.clone());
                    }
                }
            }
        }
    }
    let gens = pres
        .generators
        .iter()
        .filter(|g| !targets.contains(&g.name))
        .map(|g| {
            if page.truncated.contains(&g.name) {
                GeneratorSpec::truncated(g.name.clone(), g.degree, p).with_filtration(g.filtration)
            } else {
                g.clone()
            }
        })
        .collect();
    AlgebraPresentation::new(p, gens)
}

/// `E^{r+1} = H(E^r, d^r)`, computed on the fiber (the differential is
/// linear over the base) and recognized against the candidate
/// presentation; raw dims are kept when recognition fails.
pub fn page_homology(page: &SsPage, n: u32) -> Result<SsPage> {
    let n = n.min(page.bound);
    if page.differential.is_empty() {
        return Ok(SsPage {
            r: page.r + 1,
            ..page.clone()
        });
    }
    let pres = page
        .presentation
        .as_ref()
        .ok_or_else(|| Error::NotFlat("page has no presentation".into()))?;
    // one degree past the bound, so that degree n sees its boundaries
    let fiber = Algebra::new(&fiber_presentation(pres), n + 1)?;
    let d = parse_differential(&fiber, page)?;
    let mut fh = fiber_homology(&fiber, &d, page.r, n + 1)?;
    fh.dims.retain(|&(_, deg), _| deg <= n);
    let base = Algebra::new(&base_presentation(pres), n)?;
    let dims = convolve(&bigraded_series(&base, n), &fh.dims, n);
    let full = Algebra::new(pres, n)?;
    let cand = candidate(page, pres, &full);
    let cand_alg = Algebra::new(&cand, n)?;
    let mut recognized = bigraded_series(&cand_alg, n) == dims;
    // the candidate's fiber generators must be non-zero classes
    if recognized {
        let f = fiber.field();
        for g in cand.generators.iter().filter(|g| g.filtration > 0) {
            let Some(i) = fiber.letter_index(&g.name) else { continue };
            let m = fiber.letter(i);
            let key = (fiber.filtration(&m), fiber.degree(&m));
            let is_cycle = apply_derivation(&fiber, &d, &m).is_zero();
            let pos = fh.groups[&key].iter().position(|x| *x == m).unwrap();
            let v = SparseVec::from_pairs(f, [(pos, 1)]);
            let is_boundary = fh.images.get(&key).is_some_and(|e| e.contains(&v));
            if !is_cycle || is_boundary {
                recognized = false;
            }
        }
    }
    Ok(SsPage {
        p: page.p,
        r: page.r + 1,
        bound: n,
        presentation: recognized.then_some(cand),
        differential: BTreeMap::new(),
        truncated: Vec::new(),
        dims: to_cells(&dims),
    })
}

/// True iff every algebra generator of the page has filtration `<= 1`.
pub fn collapse_check(page: &SsPage) -> Result<bool> {
    Ok(page.algebra()?.letters().iter().all(|l| l.filtration <= 1))
}

/// `σ` of a base monomial, as a derivation into `alg`; `sigma` maps base
/// letter names to their σ-classes (absent: zero).
fn sigma_of(
    alg: &Algebra,
    base: &Algebra,
    m: &Monomial,
    sigma: &dyn Fn(&str) -> Option<Element>,
) -> Result<Element> {
    let f = alg.field();
    let mut factors = Vec::new();
    for (i, &e) in m.iter().enumerate() {
        for _ in 0..e {
            factors.push(i);
        }
    }
    let lift = |i: usize| -> Result<Element> {
        let name = &base.letters()[i].name;
        let idx = alg
            .letter_index(name)
            .ok_or_else(|| Error::InvalidPresentation(format!("{name} is missing")))?;
        Ok(Element::monomial(alg.letter(idx)))
    };
    let mut out = Element::zero();
    for j in 0..factors.len() {
        let Some(s) = sigma(&base.letters()[factors[j]].name) else { continue };
        let mut term = Element::monomial(alg.unit());
        let mut prefix_deg = 0;
        for (k, &i) in factors.iter().enumerate() {
            if k < j {
                prefix_deg += base.letters()[i].degree;
            }
            let x = if k == j { s.clone() } else { lift(i)? };
            term = alg.mul(&term, &x);
        }
        if prefix_deg % 2 == 1 && alg.p() != 2 {
            term = term.scale(f, f.neg(1));
        }
        out = out.add(f, &term);
    }
    Ok(out)
}

/// Coaction terms of `ν(σy) = (1 ⊗ σ)ν(y)` in `alg`.
fn sigma_coaction(
    alg: &Algebra,
    base: &Algebra,
    spec: &[CoactionTermSpec],
    sigma: &dyn Fn(&str) -> Option<Element>,
) -> Result<Vec<(MilnorMonomial, u32, Monomial)>> {
    let f = alg.field();
    let mut acc: BTreeMap<(MilnorMonomial, Monomial), u32> = BTreeMap::new();
    for t in spec {
        let a: MilnorMonomial = t.a.parse()?;
        let x = base.parse_monomial(&t.x)?;
        for (m, c) in sigma_of(alg, base, &x, sigma)?.terms {
            let e = acc.entry((a.clone(), m)).or_insert(0);
            *e = f.add(*e, f.mul(c, t.c));
        }
    }
    Ok(acc
        .into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|((a, m), c)| (a, c, m))
        .collect())
}

/// The `A_*`-coaction on a page or abutment algebra: restricted from the
/// catalog on base letters, `(1 ⊗ σ)ν` on σ-letters, and primitive on the
/// higher divided powers of a primitive σ-class. `sigma` resolves the
/// σ-class of a base letter in `alg`.
fn build_coaction(
    alg: &Algebra,
    entry: &SpectrumEntry,
    sigma: &dyn Fn(&str) -> Option<Element>,
) -> Result<CoactionTable> {
    let base = Algebra::new(&entry.base, alg.bound())?;
    let mut table = CoactionTable::new();
    let mut primitive_sigma = BTreeSet::new();
    for (i, l) in alg.letters().iter().enumerate() {
        if l.filtration == 0 {
            if let Some(spec) = entry.coaction.get(&l.name) {
                let mut terms = Vec::new();
                for t in spec {
                    terms.push((t.a.parse()?, t.c, alg.parse_monomial(&t.x)?));
                }
                table.set(i, terms);
            }
            continue;
        }
        if l.dp_power.is_some_and(|n| n > 1) {
            continue;
        }
        let Some(y) = sigma_base(&l.name) else { continue };
        let Some(spec) = entry.coaction.get(y) else { continue };
        let terms = sigma_coaction(alg, &base, spec, sigma)?;
        if terms.iter().all(|(a, _, _)| a.is_one()) {
            primitive_sigma.insert(l.generator);
        }
        table.set(i, terms);
    }
    for (i, l) in alg.letters().iter().enumerate() {
        if l.dp_power.is_some_and(|n| n > 1) && primitive_sigma.contains(&l.generator) {
            table.set_primitive(alg, i);
        }
    }
    Ok(table)
}

/// The coaction on a page whose σ-letters are named `s(x)`.
pub fn page_coaction(alg: &Algebra, entry: &SpectrumEntry) -> Result<CoactionTable> {
    let sigma = |x: &str| {
        alg.letter_index(&format!("s({x})"))
            .map(|i| Element::monomial(alg.letter(i)))
    };
    build_coaction(alg, entry, &sigma)
}

/// A potential differential allowed by degree and primitivity.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Obstruction {
    pub source: String,
    pub source_filtration: u32,
    pub source_degree: u32,
    pub r: u32,
    pub target_filtration: u32,
    pub target_degree: u32,
    pub primitives: usize,
}

/// Dimension of simultaneous coalgebra and comodule primitives in
/// bidegree `(s, d)`, `s >= 1`.
pub fn primitive_dim(alg: &Algebra, hopf: &HopfData, table: &CoactionTable, s: u32, d: u32) -> Result<usize> {
    let f = alg.field();
    let cols: Vec<Monomial> = alg
        .monomial_basis(d)?
        .iter()
        .filter(|m| alg.filtration(m) == s)
        .cloned()
        .collect();
    if cols.is_empty() {
        return Ok(0);
    }
    let fiber: Vec<bool> = alg.letters().iter().map(|l| l.filtration > 0).collect();
    let split = |m: &Monomial| -> (Monomial, Monomial) {
        let b = m.iter().enumerate().map(|(i, &e)| if fiber[i] { 0 } else { e }).collect();
        let t = m.iter().enumerate().map(|(i, &e)| if fiber[i] { e } else { 0 }).collect();
        (b, t)
    };
    #[derive(PartialEq, Eq, Hash)]
    enum Row {
        Co(Monomial, Monomial),
        Nu(MilnorMonomial, Monomial),
    }
    let mut rows: HashMap<Row, usize> = HashMap::new();
    let mut entries = Vec::new();
    for (col, m) in cols.iter().enumerate() {
        let left = (m.clone(), alg.unit());
        let right = split(m);
        for (k, c) in hopf_coproduct(alg, hopf, m) {
            if k == left || k == right {
                continue;
            }
            let n = rows.len();
            let row = *rows.entry(Row::Co(k.0, k.1)).or_insert(n);
            entries.push((row, col, c));
        }
        for ((a, x), c) in coaction(alg, table, m)?.terms {
            if a.is_one() {
                continue;
            }
            let n = rows.len();
            let row = *rows.entry(Row::Nu(a, x)).or_insert(n);
            entries.push((row, col, c));
        }
    }
    let mat = SparseMat::from_entries(f, rows.len(), cols.len(), entries);
    Ok(cols.len() - rank(f, &mat))
}

/// Lists every `(source, target)` pair a shortest `d^{r'}`, `r' >= r`, could
/// connect: sources are indecomposables in filtration `> r`, targets
/// simultaneous coalgebra and comodule primitives. Empty means collapse.
pub fn obstruction_scan(page: &SsPage, entry: &SpectrumEntry) -> Result<Vec<Obstruction>> {
    let alg = page.algebra()?;
    let hopf = HopfData::standard(&alg)?;
    let table = page_coaction(&alg, entry)?;
    let mut out = Vec::new();
    for l in alg.letters() {
        if l.filtration <= page.r || l.degree > page.bound {
            continue;
        }
        for r in page.r..l.filtration {
            let ts = l.filtration - r;
            let dim = primitive_dim(&alg, &hopf, &table, ts, l.degree - 1)?;
            if dim > 0 {
                out.push(Obstruction {
                    source: l.name.clone(),
                    source_filtration: l.filtration,
                    source_degree: l.degree,
                    r,
                    target_filtration: ts,
                    target_degree: l.degree - 1,
                    primitives: dim,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorInfo {
    pub name: String,
    pub degree: u32,
    pub kind: Kind,
    pub filtration: u32,
}

/// The multiplicative abutment `H_*(THH(R))`.
#[derive(Clone, Debug, Serialize)]
pub struct Abutment {
    pub presentation: AlgebraPresentation,
    pub generators: Vec<GeneratorInfo>,
    pub series: Vec<usize>,
    /// `ν` on the σ-generators.
    pub coaction: BTreeMap<String, Vec<CoactionTermSpec>>,
    /// σ-generators whose coaction needs unknown base coactions.
    pub coaction_unavailable: Vec<String>,
    /// `(σy)^p = σQ(y)` relations used, as `(σy, value)`.
    pub relations: Vec<(String, String)>,
}

/// Resolves multiplicative extensions with `(σy)^p = σQ^k(y)` (`k = |y|+1`
/// at `p = 2`, `(|y|+1)/2` at odd `p`), chaining σ-generators into
/// polynomial generators, and computes `ν` on σ-generators via `(1 ⊗ σ)ν`.
pub fn resolve_extensions(einf: &SsPage, entry: &SpectrumEntry) -> Result<Abutment> {
    let p = einf.p;
    let n = einf.bound;
    let pres = einf
        .presentation
        .as_ref()
        .ok_or_else(|| Error::NotFlat("E-infinity is not presented as a free module".into()))?;
    let present: BTreeMap<&str, &GeneratorSpec> =
        pres.generators.iter().map(|g| (g.name.as_str(), g)).collect();
    let mut next: BTreeMap<String, String> = BTreeMap::new();
    let mut relations = Vec::new();
    for g in pres.generators.iter().filter(|g| g.filtration > 0) {
        let Some(y) = sigma_base(&g.name).and_then(|y| base_spec(entry, y)) else {
            return Err(Error::InvalidPresentation(format!("{} is not a σ-class", g.name)));
        };
        if p != 2 && g.degree % 2 == 1 {
            continue;
        }
        let k = if p == 2 { y.degree + 1 } else { (y.degree + 1) / 2 };
        let value = entry.dl.lookup(y, k).ok_or_else(|| Error::MissingDyerLashof {
            generator: y.name.clone(),
            k,
        })?;
        match (&value, g.kind) {
            (DlValue::Zero, Kind::DividedPower) => {
                if !entry.divided_power_facts.contains(&g.name) {
                    return Err(Error::InvalidPresentation(format!(
                        "no extension data for the divided powers of {}",
                        g.name
                    )));
                }
                relations.push((g.name.clone(), "0".into()));
            }
            (DlValue::Zero, _) => relations.push((g.name.clone(), "0".into())),
            // a divided-power generator whose p-th power lies past the
            // bound is indistinguishable from a truncated one
            (DlValue::Class(z), kind)
                if matches!(kind, Kind::Exterior | Kind::Truncated)
                    || (kind == Kind::DividedPower && p * g.degree > n) =>
            {
                let sz = format!("s({z})");
                match present.get(sz.as_str()) {
                    Some(h) if h.kind == g.kind || p * h.degree > n => {}
                    None if p * g.degree > n => {}
                    _ => {
                        return Err(Error::InvalidPresentation(format!(
                            "E-infinity is not free: {sz} cannot be the p-th power of {}",
                            g.name
                        )))
                    }
                }
                relations.push((g.name.clone(), sz.clone()));
                next.insert(g.name.clone(), sz);
            }
            _ => {
                return Err(Error::InvalidPresentation(format!(
                    "unexpected extension for {}",
                    g.name
                )))
            }
        }
    }
    let removed: BTreeSet<&String> = next.values().collect();
    // each removed generator is a p^j-th power of its chain head
    let mut power_of: BTreeMap<String, (String, u32)> = BTreeMap::new();
    let mut gens = Vec::new();
    for g in &pres.generators {
        if removed.contains(&g.name) {
            continue;
        }
        if let Some(mut cur) = next.get(&g.name).cloned() {
            let mut e = p;
            while present.contains_key(cur.as_str()) {
                power_of.insert(cur.clone(), (g.name.clone(), e));
                match next.get(&cur) {
                    Some(c) => cur = c.clone(),
                    None => break,
                }
                e *= p;
            }
            gens.push(GeneratorSpec::polynomial(g.name.clone(), g.degree).with_filtration(g.filtration));
        } else {
            gens.push(g.clone());
        }
    }
    let presentation = AlgebraPresentation::new(p, gens);
    let alg = Algebra::new(&presentation, n)?;
    let sigma = |x: &str| -> Option<Element> {
        let name = format!("s({x})");
        if let Some(i) = alg.letter_index(&name) {
            return Some(Element::monomial(alg.letter(i)));
        }
        let (head, e) = power_of.get(&name)?;
        let i = alg.letter_index(head)?;
        let mut m = alg.unit();
        m[i] = *e;
        Some(Element::monomial(m))
    };
    let table = build_coaction(&alg, entry, &sigma)?;
    let mut coaction_out = BTreeMap::new();
    let mut unavailable = Vec::new();
    for (i, l) in alg.letters().iter().enumerate() {
        if l.filtration == 0 {
            continue;
        }
        match table.get(i) {
            Some(terms) => {
                coaction_out.insert(
                    l.name.clone(),
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
            None => unavailable.push(l.name.clone()),
        }
    }
    let generators = presentation
        .generators
        .iter()
        .map(|g| GeneratorInfo {
            name: g.name.clone(),
            degree: g.degree,
            kind: g.kind,
            filtration: g.filtration,
        })
        .collect();
    Ok(Abutment {
        series: poincare_series(&alg, n),
        presentation,
        generators,
        coaction: coaction_out,
        coaction_unavailable: unavailable,
        relations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PageSummary {
    pub r: u32,
    pub recognized: bool,
    pub generators: Vec<String>,
    pub differential: BTreeMap<String, Vec<(u32, String)>>,
    pub series: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CollapseCertificate {
    pub page: u32,
    /// Every generator in filtration `<= 1`.
    pub filtration_criterion: bool,
    /// Empty when the primitive-obstruction argument applies.
    pub obstructions: Vec<Obstruction>,
    /// Whether the obstruction scan was run (needs a commutative ring spectrum).
    pub scanned: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThhResult {
    pub spectrum: String,
    pub p: u32,
    pub n: u32,
    pub cross_check: CrossCheck,
    pub e2: Vec<Cell>,
    pub pages: Vec<PageSummary>,
    pub einf: Vec<Cell>,
    pub collapse: CollapseCertificate,
    pub abutment: Abutment,
    pub target_series: Vec<usize>,
    pub matches_target: bool,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name,
        detail: e.to_string(),
    })
}

fn summary(page: &SsPage) -> PageSummary {
    PageSummary {
        r: page.r,
        recognized: page.presentation.is_some(),
        generators: page
            .presentation
            .as_ref()
            .map(|p| p.generators.iter().map(|g| g.name.clone()).collect())
            .unwrap_or_default(),
        differential: page.differential.clone(),
        series: page.series(),
    }
}

/// Runs the whole pipeline for a catalog spectrum through degree `n`.
pub fn thh_homology(id: SpectrumId, p: u32, n: u32) -> Result<ThhResult> {
    let entry = stage("catalog", catalog(id, p, n))?;
    run_entry(&entry, n)
}

/// Runs the pipeline on an arbitrary entry, e.g. one from [`custom_entry`].
pub fn run_entry(entry: &SpectrumEntry, n: u32) -> Result<ThhResult> {
    let entry = entry.clone();
    let (id, p) = (entry.id, entry.p);
    let (e2, cross) = match stage("build_e2", build_e2(&entry, n))? {
        E2Term::Flat { page, cross_check } => (page, cross_check),
        E2Term::NonFlat { .. } => {
            return Err(Error::Stage {
                stage: "build_e2",
                detail: format!("E2 of {id} is not flat over the homology of {id}"),
            })
        }
    };
    let mut pages = vec![summary(&e2)];
    let mut page = e2.clone();
    if p != 2 {
        let with_d = stage("apply_d_pminus1", apply_d_pminus1(&page, &entry))?;
        if !with_d.differential.is_empty() {
            pages[0] = summary(&with_d);
            page = stage("page_homology", page_homology(&with_d, n))?;
            if page.presentation.is_none() {
                return Err(Error::Stage {
                    stage: "page_homology",
                    detail: format!("E{} was not recognized", page.r),
                });
            }
            pages.push(summary(&page));
        }
    }
    let filtration_criterion = stage("collapse_check", collapse_check(&page))?;
    let scanned = !filtration_criterion && entry.structure == Structure::Commutative;
    let obstructions = if scanned {
        stage("obstruction_scan", obstruction_scan(&page, &entry))?
    } else {
        Vec::new()
    };
    if !filtration_criterion && (!scanned || !obstructions.is_empty()) {
        return Err(Error::Stage {
            stage: "collapse",
            detail: format!("no collapse certificate at E{}", page.r),
        });
    }
    let abutment = stage("resolve_extensions", resolve_extensions(&page, &entry))?;
    let target_series = match &entry.target {
        Some(t) => poincare_series(&Algebra::new(t, n)?, n),
        None => Vec::new(),
    };
    Ok(ThhResult {
        spectrum: id.to_string(),
        p,
        n,
        cross_check: cross,
        e2: e2.dims.clone(),
        pages,
        einf: page.dims.clone(),
        collapse: CollapseCertificate {
            page: page.r,
            filtration_criterion,
            obstructions,
            scanned,
        },
        matches_target: abutment.series == target_series,
        abutment,
        target_series,
    })
}
