//! Homology presentations, coactions and Dyer–Lashof data for the ring
//! spectra the pipeline knows about.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::gca::{Algebra, AlgebraPresentation, CoactionTermSpec, GeneratorSpec, Kind, Monomial};
use crate::steenrod::dual::{milnor_coproduct, DualElement, MilnorMonomial};
use crate::steenrod::{module_map_kernel, quotient_module, SteenrodElement, SubalgebraSpec};
use crate::{Error, Result};

/// Which spectrum. `Bp(Some(n))` is `BP⟨n⟩` (so `m = n + 1`), `Bp(None)` is `BP`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectrumId {
    Hf,
    Hz,
    Ku,
    Ko,
    Tmf,
    Ell,
    Ju,
    J,
    Bp(Option<i32>),
    /// A user-supplied presentation; see [`custom_entry`].
    Custom,
}

impl SpectrumId {
    pub const ALL: [SpectrumId; 8] = [
        SpectrumId::Hf,
        SpectrumId::Hz,
        SpectrumId::Ku,
        SpectrumId::Ko,
        SpectrumId::Tmf,
        SpectrumId::Ell,
        SpectrumId::Ju,
        SpectrumId::J,
    ];

    pub fn supports(&self, p: u32) -> bool {
        match self {
            SpectrumId::Ku | SpectrumId::Ko | SpectrumId::Tmf | SpectrumId::J => p == 2,
            SpectrumId::Ell => p != 2,
            _ => true,
        }
    }

    /// `m` with `H_*(R)` of the form `H_*(BP⟨m-1⟩)`, `None` for `m = ∞`.
    fn bp_m(&self, p: u32) -> Option<Option<u32>> {
        match self {
            SpectrumId::Hf => Some(Some(0)),
            SpectrumId::Hz => Some(Some(1)),
            SpectrumId::Ku if p == 2 => Some(Some(2)),
            SpectrumId::Ell if p != 2 => Some(Some(2)),
            SpectrumId::Bp(Some(n)) => Some(Some((n + 1) as u32)),
            SpectrumId::Bp(None) => Some(None),
            _ => None,
        }
    }
}

impl fmt::Display for SpectrumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumId::Hf => write!(f, "hf"),
            SpectrumId::Hz => write!(f, "hz"),
            SpectrumId::Ku => write!(f, "ku"),
            SpectrumId::Ko => write!(f, "ko"),
            SpectrumId::Tmf => write!(f, "tmf"),
            SpectrumId::Ell => write!(f, "ell"),
            SpectrumId::Ju => write!(f, "ju"),
            SpectrumId::J => write!(f, "j"),
            SpectrumId::Bp(Some(n)) => write!(f, "bp<{n}>"),
            SpectrumId::Bp(None) => write!(f, "bp"),
            SpectrumId::Custom => write!(f, "custom"),
        }
    }
}

impl FromStr for SpectrumId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        Ok(match t.as_str() {
            "hf" | "hf2" | "hfp" | "hf3" | "hf5" => SpectrumId::Hf,
            "hz" => SpectrumId::Hz,
            "ku" => SpectrumId::Ku,
            "ko" => SpectrumId::Ko,
            "tmf" => SpectrumId::Tmf,
            "ell" | "l" => SpectrumId::Ell,
            "ju" => SpectrumId::Ju,
            "j" => SpectrumId::J,
            "bp" => SpectrumId::Bp(None),
            "custom" => SpectrumId::Custom,
            _ => {
                let inner = t
                    .strip_prefix("bp<")
                    .and_then(|r| r.strip_suffix('>'))
                    .ok_or_else(|| Error::UnknownSpectrum(s.to_string()))?;
                let n: i32 = inner.parse().map_err(|_| Error::UnknownSpectrum(s.to_string()))?;
                if !(-1..=3).contains(&n) {
                    return Err(Error::UnknownSpectrum(s.to_string()));
                }
                SpectrumId::Bp(Some(n))
            }
        })
    }
}

/// A Dyer–Lashof or Bockstein value: zero or a monomial label in the base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DlValue {
    Zero,
    Class(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DlEntry {
    pub generator: String,
    pub k: u32,
    pub value: DlValue,
}

/// Known `Q^k` and `β` values on base generators. Lookups fall back to
/// instability and, when `cartan` is set, to `Q^{odd}(y²) = 0` at `p = 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DlTable {
    pub p: u32,
    pub entries: Vec<DlEntry>,
    pub bockstein: BTreeMap<String, DlValue>,
    pub cartan: bool,
    /// Generators that are squares in `H_*(R)` (`ξ̄_k^{2^i}`, `i >= 1`).
    pub squares: BTreeSet<String>,
}

impl DlTable {
    pub fn new(p: u32) -> Self {
        DlTable {
            p,
            ..Default::default()
        }
    }

    pub fn set(&mut self, generator: &str, k: u32, value: DlValue) {
        self.entries.retain(|e| !(e.generator == generator && e.k == k));
        self.entries.push(DlEntry {
            generator: generator.to_string(),
            k,
            value,
        });
    }

    /// `Q^k(g)`, or `None` when the table does not determine it.
    pub fn lookup(&self, g: &GeneratorSpec, k: u32) -> Option<DlValue> {
        if let Some(e) = self.entries.iter().find(|e| e.generator == g.name && e.k == k) {
            return Some(e.value.clone());
        }
        let p = self.p;
        let (below, equal) = if p == 2 {
            (k < g.degree, k == g.degree)
        } else {
            (2 * k < g.degree, 2 * k == g.degree)
        };
        if below {
            return Some(DlValue::Zero);
        }
        if equal {
            // Q^{|x|}(x) = x^p
            return Some(match g.kind {
                Kind::Exterior => DlValue::Zero,
                _ => DlValue::Class(power_label(&g.name, p)),
            });
        }
        if self.cartan && p == 2 && k % 2 == 1 && self.squares.contains(&g.name) {
            return Some(DlValue::Zero);
        }
        None
    }

    pub fn beta(&self, name: &str) -> Option<DlValue> {
        self.bockstein.get(name).cloned()
    }
}

fn power_label(name: &str, e: u32) -> String {
    if name.contains('^') {
        format!("[{name}]^{e}")
    } else {
        format!("{name}^{e}")
    }
}

/// Whether the ring spectrum is known to be commutative; otherwise only an
/// `E_3` structure is assumed and Hopf-algebra based checks are skipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Commutative,
    E3,
}

/// The non-flat data of `j`: `H_*(j) = Q ⊗ (F_2 ⊕ V)` with `V` square-zero.
#[derive(Clone, Debug, Serialize)]
pub struct NonFlatData {
    pub quotient: AlgebraPresentation,
    pub kernel_degrees: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumEntry {
    pub id: SpectrumId,
    pub p: u32,
    pub bound: u32,
    pub base: AlgebraPresentation,
    /// Images of the base generators in `A_*` (conjugate alphabet), where
    /// the generator is the class of a monomial of `A_*`.
    pub images: BTreeMap<String, MilnorMonomial>,
    /// `ν` on the base generators; absent generators have unknown coaction.
    pub coaction: BTreeMap<String, Vec<CoactionTermSpec>>,
    pub dl: DlTable,
    /// The expected abutment presentation.
    pub target: Option<AlgebraPresentation>,
    /// σ-generators whose divided-power structure survives to the abutment
    /// (`γ_{p^k}^p = 0` is a known extension fact for these).
    pub divided_power_facts: Vec<String>,
    pub structure: Structure,
    pub nonflat: Option<NonFlatData>,
}

impl SpectrumEntry {
    pub fn name(&self) -> String {
        self.id.to_string()
    }

    pub fn base_algebra(&self) -> Result<Algebra> {
        Algebra::new(&self.base, self.bound)
    }
}

fn xi_name(k: u32, e: u32, tilde: bool) -> String {
    let l = if tilde { "xit" } else { "xib" };
    if e == 1 {
        format!("{l}{k}")
    } else {
        format!("{l}{k}^{e}")
    }
}

fn xi_deg(p: u32, k: u32) -> u64 {
    crate::steenrod::dual::xi_degree(p, k)
}

fn tau_deg(p: u32, k: u32) -> u64 {
    crate::steenrod::dual::tau_degree(p, k)
}

struct Profile {
    /// `xi_steps[k-1]`: exponent of `ξ̄_k` generating `H_*`.
    xi_step: Box<dyn Fn(u32) -> u32>,
    tau_from: Option<u32>,
}

fn bp_profile(p: u32, m: Option<u32>) -> Profile {
    if p == 2 {
        Profile {
            xi_step: Box::new(move |k| if m.is_none_or(|m| k <= m) { 2 } else { 1 }),
            tau_from: None,
        }
    } else {
        Profile {
            xi_step: Box::new(|_| 1),
            tau_from: m,
        }
    }
}

fn a_n_profile(n: u32) -> Profile {
    Profile {
        xi_step: Box::new(move |k| if k <= n + 1 { 1 << (n + 2 - k) } else { 1 }),
        tau_from: None,
    }
}

/// Generators of a subalgebra of `A_*` cut out by a profile, with their images.
fn profile_generators(p: u32, prof: &Profile, bound: u32) -> Vec<(GeneratorSpec, MilnorMonomial)> {
    let mut out = Vec::new();
    let mut k = 1;
    while xi_deg(p, k) <= bound as u64 {
        let e = (prof.xi_step)(k);
        let d = e as u64 * xi_deg(p, k);
        if d <= bound as u64 {
            out.push((
                GeneratorSpec::polynomial(xi_name(k, e, false), d as u32),
                MilnorMonomial::xi_power(k, e, true),
            ));
        }
        k += 1;
    }
    if let Some(from) = prof.tau_from {
        let mut k = from;
        while tau_deg(p, k) <= bound as u64 {
            out.push((
                GeneratorSpec::exterior(format!("taub{k}"), tau_deg(p, k) as u32),
                MilnorMonomial::tau_gen(k, true),
            ));
            k += 1;
        }
    }
    out
}

/// Restricts `ψ` on `A_*` to the base generators that are images of
/// monomials, rewriting right-hand factors in base letters.
fn restricted_coaction(
    alg: &Algebra,
    images: &BTreeMap<String, MilnorMonomial>,
) -> Result<BTreeMap<String, Vec<CoactionTermSpec>>> {
    let p = alg.p();
    // letter for ξ̄_k^{step} and τ̄_k
    let mut xi_letters: BTreeMap<u32, (usize, u32)> = BTreeMap::new();
    let mut tau_letters: BTreeMap<u32, usize> = BTreeMap::new();
    for (name, m) in images {
        let Some(i) = alg.letter_index(name) else { continue };
        if m.tau != 0 {
            tau_letters.insert(m.tau.trailing_zeros(), i);
        } else {
            let k = m.xi.len() as u32;
            xi_letters.insert(k, (i, m.xi_exponent(k)));
        }
    }
    let to_base = |m: &MilnorMonomial| -> Option<Monomial> {
        let mut out = alg.unit();
        for (i, &e) in m.xi.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let &(letter, step) = xi_letters.get(&(i as u32 + 1))?;
            if e % step != 0 {
                return None;
            }
            out[letter] += e / step;
        }
        for k in m.tau_indices() {
            out[*tau_letters.get(&k)?] += 1;
        }
        Some(out)
    };
    let mut table = BTreeMap::new();
    for (name, m) in images {
        if alg.letter_index(name).is_none() {
            continue;
        }
        let mut terms = Vec::new();
        for (pair, c) in milnor_coproduct(p, m).terms() {
            let x = to_base(&pair[1]).ok_or_else(|| {
                Error::InvalidPresentation(format!("{} is not in the subalgebra", pair[1]))
            })?;
            terms.push(CoactionTermSpec {
                a: pair[0].to_string(),
                c,
                x: alg.label(&x),
            });
        }
        table.insert(name.clone(), terms);
    }
    Ok(table)
}

fn dl_for_profile(p: u32, gens: &[(GeneratorSpec, MilnorMonomial)], bound_k: u32) -> DlTable {
    let mut dl = DlTable::new(p);
    dl.cartan = true;
    for (g, m) in gens {
        if m.tau == 0 {
            let k = m.xi.len() as u32;
            let e = m.xi_exponent(k);
            if e > 1 && p == 2 {
                dl.squares.insert(g.name.clone());
            }
        }
    }
    // Q^{p^k}(ξ̄_k) = ξ̄_{k+1} (p = 2), Q^{p^k}(τ̄_k) = τ̄_{k+1} and β(τ̄_k) = ξ̄_k (p odd)
    for k in 1..=bound_k {
        if p == 2 {
            dl.set(&xi_name(k, 1, false), 1 << k, DlValue::Class(xi_name(k + 1, 1, false)));
        } else {
            dl.set(
                &format!("taub{}", k - 1),
                p.pow(k - 1),
                DlValue::Class(format!("taub{k}")),
            );
            dl.bockstein.insert(format!("taub{k}"), DlValue::Class(xi_name(k, 1, false)));
        }
    }
    dl
}

fn max_index(p: u32, bound: u32) -> u32 {
    let mut k = 1;
    while xi_deg(p, k) <= 2 * bound as u64 + 2 {
        k += 1;
    }
    k + 1
}

fn exterior_sigma(name: &str, degree: u32) -> GeneratorSpec {
    GeneratorSpec::exterior(format!("s({name})"), degree + 1).with_filtration(1)
}

fn polynomial_sigma(name: &str, degree: u32) -> GeneratorSpec {
    GeneratorSpec::polynomial(format!("s({name})"), degree + 1).with_filtration(1)
}

fn target_from(
    p: u32,
    base: &AlgebraPresentation,
    exterior: &[(String, u32)],
    polynomial: &[(String, u32)],
    divided: &[(String, u32)],
    bound: u32,
) -> AlgebraPresentation {
    let mut gens = base.generators.clone();
    for (n, d) in exterior {
        if d + 1 <= bound {
            gens.push(exterior_sigma(n, *d));
        }
    }
    for (n, d) in polynomial {
        if d + 1 <= bound {
            gens.push(polynomial_sigma(n, *d));
        }
    }
    for (n, d) in divided {
        if d + 1 <= bound {
            gens.push(GeneratorSpec::divided_power(format!("s({n})"), d + 1).with_filtration(1));
        }
    }
    AlgebraPresentation::new(p, gens)
}

/// Degrees of `Σ^7 K`, where `Σ^4 K` is the kernel of right multiplication
/// by `Sq^4` from `Σ^4 A_2/A_2{Sq^1, Sq^2Sq^3}` to `A_2/A_2{Sq^1, Sq^2}`.
pub fn j_kernel_degrees() -> Result<Vec<u32>> {
    let el = |s: &str| SteenrodElement::parse(s);
    let a2 = SubalgebraSpec::A(2);
    let mut source = quotient_module(&a2, &[el("Sq1")?, el("Sq2Sq3")?])?;
    source.shift = 4;
    let target = quotient_module(&a2, &[el("Sq1")?, el("Sq2")?])?;
    let k = module_map_kernel(&el("Sq4")?, &source, &target)?.kernel;
    let series = k.poincare_series();
    let low = *series
        .keys()
        .next()
        .ok_or_else(|| Error::InvalidPresentation("empty kernel".into()))?;
    let mut v = Vec::new();
    for (d, n) in series {
        v.extend(std::iter::repeat_n((d - low + 7) as u32, n));
    }
    Ok(v)
}

/// Expands a label in the unbarred or barred alphabet into barred monomials.
fn barred(p: u32, label: &str) -> Result<DualElement> {
    let m: MilnorMonomial = label.parse()?;
    Ok(DualElement::monomial(p, m).in_alphabet(true))
}

/// The explicitly known coactions on `H_*(ju; F_p)` for odd `p`.
fn ju_odd_coaction(p: u32, alg: &Algebra) -> Result<BTreeMap<String, Vec<CoactionTermSpec>>> {
    let xp = xi_name(1, p, true);
    let xi1p = MilnorMonomial::xi_power(1, p, true).to_string();
    let raw: Vec<(&str, Vec<(&str, i64, &str)>)> = vec![
        ("b", vec![("1", 1, "b")]),
        (&xp, vec![("1", 1, &xp), ("tau0", -1, "b"), (&xi1p, 1, "1")]),
        (
            "xit2",
            vec![("1", 1, "xit2"), ("xib1", 1, &xp), ("tau1", 1, "b"), ("xib2", 1, "1")],
        ),
        (
            "taut2",
            vec![
                ("1", 1, "taut2"),
                ("taub0", 1, "xit2"),
                ("taub1", 1, &xp),
                ("tau0*tau1", -1, "b"),
                ("taub2", 1, "1"),
            ],
        ),
    ];
    let f = alg.field();
    let mut out = BTreeMap::new();
    for (name, terms) in raw {
        if alg.letter_index(name).is_none() {
            continue;
        }
        let mut spec: BTreeMap<(String, String), u32> = BTreeMap::new();
        for (a, c, x) in terms {
            for (m, d) in barred(p, a)?.terms() {
                let e = spec.entry((m.to_string(), x.to_string())).or_insert(0);
                *e = f.add(*e, f.mul(d, f.reduce(c)));
            }
        }
        let terms = spec
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|((a, x), c)| CoactionTermSpec { a, c, x })
            .collect();
        out.insert(name.to_string(), terms);
    }
    Ok(out)
}

/// An entry for a presented `H_*(R)` with optional coaction and
/// Dyer–Lashof data. Nothing is known about its abutment in advance.
pub fn custom_entry(
    base: AlgebraPresentation,
    coaction: BTreeMap<String, Vec<CoactionTermSpec>>,
    dl: DlTable,
    structure: Structure,
    bound: u32,
) -> Result<SpectrumEntry> {
    if !crate::fplin::is_prime(base.p) {
        return Err(Error::InvalidPrime(base.p));
    }
    Ok(SpectrumEntry {
        id: SpectrumId::Custom,
        p: base.p,
        bound,
        base,
        images: BTreeMap::new(),
        coaction,
        dl,
        target: None,
        divided_power_facts: Vec::new(),
        structure,
        nonflat: None,
    })
}

/// The catalog entry for `id` at the prime `p`, truncated at degree `bound`.
pub fn catalog(id: SpectrumId, p: u32, bound: u32) -> Result<SpectrumEntry> {
    if !crate::fplin::is_prime(p) {
        return Err(Error::InvalidPrime(p));
    }
    if !id.supports(p) {
        return Err(Error::UnknownSpectrum(format!("{id} at p = {p}")));
    }
    if id == SpectrumId::Custom {
        return Err(Error::UnknownSpectrum("custom presentations are built with custom_entry".into()));
    }
    let kmax = max_index(p, bound);
    let mut divided_power_facts = Vec::new();
    let mut nonflat = None;
    let structure;
    let (gens, mut extra, target_spec): (Vec<(GeneratorSpec, MilnorMonomial)>, Vec<GeneratorSpec>, _);
    let sig = |g: &GeneratorSpec| (g.name.clone(), g.degree);
    if let Some(m) = id.bp_m(p) {
        gens = profile_generators(p, &bp_profile(p, m), bound);
        extra = Vec::new();
        structure = match (id, m) {
            (SpectrumId::Bp(_), Some(m)) if m >= 3 => Structure::E3,
            _ => Structure::Commutative,
        };
        let mut ext = Vec::new();
        let mut pol = Vec::new();
        if p == 2 {
            for (g, mm) in &gens {
                let k = mm.xi.len() as u32;
                if m.is_none_or(|m| k <= m) {
                    ext.push(sig(g));
                } else if Some(k) == m.map(|m| m + 1) {
                    pol.push(sig(g));
                }
            }
        } else {
            for (g, mm) in &gens {
                if mm.tau == 0 && m.is_none_or(|m| (mm.xi.len() as u32) <= m) {
                    ext.push(sig(g));
                }
                if mm.tau != 0 && Some(mm.tau.trailing_zeros()) == m {
                    pol.push(sig(g));
                }
            }
        }
        target_spec = Some((ext, pol, Vec::new()));
    } else {
        structure = Structure::Commutative;
        match id {
            SpectrumId::Ko | SpectrumId::Tmf => {
                let n = if id == SpectrumId::Ko { 1 } else { 2 };
                gens = profile_generators(2, &a_n_profile(n), bound);
                extra = Vec::new();
                let ext = gens.iter().filter(|(g, _)| g.name.contains('^')).map(|(g, _)| sig(g)).collect();
                let pol = gens
                    .iter()
                    .filter(|(_, mm)| mm.xi.len() as u32 == n + 2)
                    .map(|(g, _)| sig(g))
                    .collect();
                target_spec = Some((ext, pol, Vec::new()));
            }
            SpectrumId::Ju if p == 2 => {
                gens = profile_generators(2, &a_n_profile(1), bound);
                extra = vec![GeneratorSpec::exterior("b", 3)];
                let ext = gens.iter().filter(|(g, _)| g.name.contains('^')).map(|(g, _)| sig(g)).collect();
                let pol = gens.iter().filter(|(_, mm)| mm.xi.len() == 3).map(|(g, _)| sig(g)).collect();
                divided_power_facts.push("s(b)".to_string());
                target_spec = Some((ext, pol, vec![("b".to_string(), 3)]));
            }
            SpectrumId::Ju => {
                // lifts ξ̃_1^p, ξ̃_k, τ̃_k (k >= 2) and b in degree pq - 1
                let q = 2 * p - 2;
                let mut g = Vec::new();
                let mut k = 1;
                while xi_deg(p, k) <= bound as u64 {
                    let e = if k == 1 { p } else { 1 };
                    let d = e as u64 * xi_deg(p, k);
                    if d <= bound as u64 {
                        g.push((
                            GeneratorSpec::polynomial(xi_name(k, e, true), d as u32),
                            MilnorMonomial::xi_power(k, e, true),
                        ));
                    }
                    k += 1;
                }
                let mut k = 2;
                while tau_deg(p, k) <= bound as u64 {
                    g.push((
                        GeneratorSpec::exterior(format!("taut{k}"), tau_deg(p, k) as u32),
                        MilnorMonomial::tau_gen(k, true),
                    ));
                    k += 1;
                }
                gens = g;
                extra = vec![GeneratorSpec::exterior("b", p * q - 1)];
                let ext = gens
                    .iter()
                    .filter(|(_, mm)| mm.tau == 0 && mm.xi.len() <= 2)
                    .map(|(g, _)| sig(g))
                    .collect();
                let pol = gens
                    .iter()
                    .filter(|(g, _)| g.name == "taut2")
                    .map(|(g, _)| sig(g))
                    .collect();
                divided_power_facts.push("s(b)".to_string());
                target_spec = Some((ext, pol, vec![("b".to_string(), p * q - 1)]));
            }
            SpectrumId::J => {
                gens = profile_generators(2, &a_n_profile(2), bound);
                extra = Vec::new();
                let quotient = AlgebraPresentation::new(2, gens.iter().map(|(g, _)| g.clone()).collect());
                nonflat = Some(NonFlatData {
                    quotient,
                    kernel_degrees: j_kernel_degrees()?,
                });
                target_spec = None;
            }
            _ => unreachable!("handled by bp_m"),
        }
    }
    extra.retain(|g| g.degree <= bound);
    let mut generators: Vec<GeneratorSpec> = gens.iter().map(|(g, _)| g.clone()).collect();
    generators.extend(extra.iter().cloned());
    let base = AlgebraPresentation::new(p, generators);
    let alg = Algebra::new(&base, bound)?;
    let tilde = id == SpectrumId::Ju && p != 2;
    let images: BTreeMap<String, MilnorMonomial> =
        gens.iter().map(|(g, m)| (g.name.clone(), m.clone())).collect();
    let mut coaction = if tilde {
        ju_odd_coaction(p, &alg)?
    } else {
        restricted_coaction(&alg, &images)?
    };
    if id == SpectrumId::Ju && p == 2 && alg.letter_index("b").is_some() {
        coaction.insert(
            "b".into(),
            vec![CoactionTermSpec {
                a: "1".into(),
                c: 1,
                x: "b".into(),
            }],
        );
    }
    let mut dl = dl_for_profile(p, &gens, kmax);
    if tilde {
        // the lifts are named ξ̃, τ̃
        dl = DlTable::new(p);
        dl.cartan = true;
        for k in 2..=kmax {
            dl.set(&format!("taut{k}"), p.pow(k), DlValue::Class(format!("taut{}", k + 1)));
            dl.bockstein.insert(format!("taut{k}"), DlValue::Class(xi_name(k, 1, true)));
        }
        dl.set("b", p * (p - 1), DlValue::Zero);
    }
    if id == SpectrumId::Ju && p == 2 {
        // certified by the Nishida instance checks
        dl.set("b", 4, DlValue::Zero);
        dl.set("xib1^4", 5, DlValue::Zero);
        dl.set("xib2^2", 7, DlValue::Zero);
    }
    let target = target_spec.map(|(ext, pol, div)| target_from(p, &base, &ext, &pol, &div, bound));
    Ok(SpectrumEntry {
        id,
        p,
        bound,
        base,
        images: if tilde { BTreeMap::new() } else { images },
        coaction,
        dl,
        target,
        divided_power_facts,
        structure,
        nonflat,
    })
}
