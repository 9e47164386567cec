//! Adams spectral sequences for `THH(ku) ∧ M` and `THH(ko) ∧ Y`.
//!
//! After change of rings the `E₂`-term is `Ext` over the exterior Hopf
//! algebra `E(ξ₂)` with coefficients in the `λ/μ` factor, a comodule
//! described by one operator `q` (the `ξ₂`-component of the coaction).
//! The differentials are input data ([`schedule`]); [`run_ss`] computes the
//! pages by linear algebra on cycles and boundaries and checks that the
//! result is consistent.

pub mod chart;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::fplin::{kernel_basis, rank, Echelon, PrimeField, SparseMat, SparseVec, Subquotient};
use crate::{Error, Result};

/// Internal degree of `ξ₂`, the degree by which `q` lowers.
pub const Q_DEGREE: u32 = 3;
/// Internal degree of `μ = σξ̄₃ + ξ̄₁·σξ̄₂²`.
pub const MU_DEGREE: u32 = 8;
/// Internal degree of `λ₂`.
pub const LAMBDA2_DEGREE: u32 = 7;

fn f2() -> PrimeField {
    PrimeField::new(2).expect("2 is prime")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Target {
    /// `THH(ku) ∧ M`, `M` the mod 2 Moore spectrum.
    #[serde(rename = "thh-ku-M")]
    KuM,
    /// `THH(ko) ∧ Y`, `Y = M ∧ Cη`.
    #[serde(rename = "thh-ko-Y")]
    KoY,
}

impl Target {
    pub const ALL: [Target; 2] = [Target::KuM, Target::KoY];

    /// `|λ₁|`: `σξ̄₁²` for ku, `σξ̄₁⁴` for ko.
    pub fn lambda1_degree(self) -> u32 {
        match self {
            Target::KuM => 3,
            Target::KoY => 5,
        }
    }

    fn initial(self) -> ([u32; 2], [u32; 2]) {
        // (r(1), r(2)), (s(1), s(2))
        match self {
            Target::KuM => ([2, 4], [3, 7]),
            Target::KoY => ([1, 4], [5, 7]),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::KuM => "thh-ku-M",
            Target::KoY => "thh-ko-Y",
        })
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "thh-ku-m" | "thh-ku-mod2" | "ku" | "ku-m" => Ok(Target::KuM),
            "thh-ko-y" | "ko" | "ko-y" => Ok(Target::KoY),
            _ => Err(Error::Parse {
                what: "Adams target",
                input: s.into(),
            }),
        }
    }
}

/// A comodule over `E(ξ₂)`: a graded basis and the operator `q` with
/// `ν(x) = 1 ⊗ x + ξ₂ ⊗ q(x)`, so `|q(x)| = |x| - 3` and `q² = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct ExteriorComodule {
    pub names: Vec<String>,
    pub degrees: Vec<u32>,
    /// `q` of each basis element, as `(index, coefficient)` pairs.
    pub q: Vec<Vec<(usize, u32)>>,
}

impl ExteriorComodule {
    pub fn new(names: Vec<String>, degrees: Vec<u32>, q: Vec<Vec<(usize, u32)>>) -> Result<Self> {
        if names.len() != degrees.len() || q.len() != degrees.len() {
            return Err(Error::InvalidPresentation("comodule data lengths differ".into()));
        }
        for (i, terms) in q.iter().enumerate() {
            for &(j, c) in terms {
                if j >= degrees.len() {
                    return Err(Error::InvalidPresentation(format!("q({}) leaves the basis", names[i])));
                }
                if c % 2 != 0 && degrees[j] + Q_DEGREE != degrees[i] {
                    return Err(Error::DegreeMismatch {
                        expected: degrees[i] as i64 - Q_DEGREE as i64,
                        found: degrees[j] as i64,
                    });
                }
            }
        }
        let m = ExteriorComodule { names, degrees, q };
        let f = f2();
        for i in 0..m.dim() {
            if !m.apply_q(&f, &m.apply_q(&f, &SparseVec::unit(i))).is_zero() {
                return Err(Error::NotADifferential);
            }
        }
        Ok(m)
    }

    /// `F₂` in degree 0.
    pub fn trivial() -> Self {
        ExteriorComodule {
            names: vec!["1".into()],
            degrees: vec![0],
            q: vec![vec![]],
        }
    }

    /// `E(ξ₂)` coacting on itself.
    pub fn free() -> Self {
        ExteriorComodule {
            names: vec!["1".into(), "ξ2".into()],
            degrees: vec![0, Q_DEGREE],
            q: vec![vec![], vec![(0, 1)]],
        }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn apply_q(&self, f: &PrimeField, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for &(i, c) in v.entries() {
            let qi = SparseVec::from_pairs(f, self.q[i].iter().copied());
            out = out.add_scaled(f, &qi, c);
        }
        out
    }

    fn in_degree(&self, d: u32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    fn label(&self, v: &SparseVec) -> String {
        let parts: Vec<_> = v.entries().iter().map(|&(i, _)| self.names[i].clone()).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ExtCell {
    pub s: u32,
    pub t: u32,
    pub dim: usize,
    pub labels: Vec<String>,
}

/// `Ext_{E(ξ₂)}^{s,t}(F₂, M)` as a bigraded basis over `P(v₁)`.
#[derive(Clone, Debug, Serialize, Default)]
pub struct ExtPage {
    pub cells: Vec<ExtCell>,
}

impl ExtPage {
    pub fn dims(&self) -> BTreeMap<(u32, u32), usize> {
        self.cells.iter().map(|c| ((c.s, c.t), c.dim)).collect()
    }

    pub fn dim(&self, s: u32, t: u32) -> usize {
        self.cells.iter().find(|c| c.s == s && c.t == t).map_or(0, |c| c.dim)
    }
}

/// `Ext^0 = ker q` and `Ext^s = H(M, q)·v₁^s` for `s >= 1`, with `v₁ = [ξ₂]`
/// in bidegree `(1, 3)`.
pub fn ext_over_exterior(m: &ExteriorComodule, smax: u32, tmax: u32) -> Result<ExtPage> {
    let f = f2();
    for i in 0..m.dim() {
        if !m.apply_q(&f, &m.apply_q(&f, &SparseVec::unit(i))).is_zero() {
            return Err(Error::NotADifferential);
        }
    }
    let top = m.degrees.iter().copied().max().unwrap_or(0);
    let mut cells = Vec::new();
    for d in 0..=top.min(tmax) {
        let basis = m.in_degree(d);
        if basis.is_empty() {
            continue;
        }
        let local: HashMap<usize, usize> = basis.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let below = if d >= Q_DEGREE { m.in_degree(d - Q_DEGREE) } else { Vec::new() };
        let below_local: HashMap<usize, usize> = below.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let cols: Vec<SparseVec> = basis
            .iter()
            .map(|&i| {
                let qi = m.apply_q(&f, &SparseVec::unit(i));
                SparseVec::from_pairs(&f, qi.entries().iter().map(|&(j, c)| (below_local[&j], c)))
            })
            .collect();
        let kernel = kernel_basis(&f, &SparseMat::from_columns(&f, below.len(), &cols));
        let globalize = |v: &SparseVec| SparseVec::from_pairs(&f, v.entries().iter().map(|&(k, c)| (basis[k], c)));
        let ker_global: Vec<SparseVec> = kernel.iter().map(globalize).collect();
        if !ker_global.is_empty() {
            cells.push(ExtCell {
                s: 0,
                t: d,
                dim: ker_global.len(),
                labels: ker_global.iter().map(|v| m.label(v)).collect(),
            });
        }
        let above: Vec<usize> = m.in_degree(d + Q_DEGREE);
        let image: Vec<SparseVec> = above
            .iter()
            .map(|&i| {
                let qi = m.apply_q(&f, &SparseVec::unit(i));
                SparseVec::from_pairs(&f, qi.entries().iter().map(|&(j, c)| (local[&j], c)))
            })
            .collect();
        let h = Subquotient::new(&f, basis.len(), &kernel, &image);
        if h.dim() == 0 {
            continue;
        }
        let labels: Vec<String> = h.reps().iter().map(|v| m.label(&globalize(v))).collect();
        for s in 1..=smax {
            let t = d + Q_DEGREE * s;
            if t > tmax {
                break;
            }
            let v = if s == 1 { "v1".to_string() } else { format!("v1^{s}") };
            cells.push(ExtCell {
                s,
                t,
                dim: h.dim(),
                labels: labels.iter().map(|l| format!("{v}·[{l}]")).collect(),
            });
        }
    }
    cells.sort_by_key(|c| (c.s, c.t));
    Ok(ExtPage { cells })
}

/// A monomial `v₁^v λ₁^{l1} λ₂^{l2} μ^mu` of `P(v₁) ⊗ E(λ₁, λ₂) ⊗ P(μ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mono {
    pub v: u32,
    pub l1: u32,
    pub l2: u32,
    pub mu: u32,
}

impl Mono {
    pub const ONE: Mono = Mono { v: 0, l1: 0, l2: 0, mu: 0 };

    pub fn mul(&self, o: &Mono) -> Option<Mono> {
        if self.l1 + o.l1 > 1 || self.l2 + o.l2 > 1 {
            return None;
        }
        Some(Mono {
            v: self.v + o.v,
            l1: self.l1 + o.l1,
            l2: self.l2 + o.l2,
            mu: self.mu + o.mu,
        })
    }

    /// Internal degree of the `λ/μ` part.
    pub fn fiber_degree(&self, target: Target) -> u32 {
        self.l1 * target.lambda1_degree() + self.l2 * LAMBDA2_DEGREE + self.mu * MU_DEGREE
    }

    /// Topological degree `t - s`.
    pub fn stem(&self, target: Target) -> u32 {
        2 * self.v + self.fiber_degree(target)
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.v {
            0 => {}
            1 => parts.push("v1".to_string()),
            v => parts.push(format!("v1^{v}")),
        }
        if self.l1 == 1 {
            parts.push("λ1".into());
        }
        if self.l2 == 1 {
            parts.push("λ2".into());
        }
        match self.mu {
            0 => {}
            1 => parts.push("μ".into()),
            m => parts.push(format!("μ^{m}")),
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("·"))
        }
    }
}

/// The `E(ξ₂)`-comodule `E(λ₁, λ₂) ⊗ P(μ)` through internal degree `tmax`:
/// `q = 0` for `THH(ku) ∧ M`; `q(μ) = λ₁` extended as a derivation for
/// `THH(ko) ∧ Y` (so `q(μ²) = 0`).
pub fn build_comodule(target: Target, tmax: u32) -> ExteriorComodule {
    let mut monos = Vec::new();
    for mu in 0..=tmax / MU_DEGREE {
        for l1 in 0..2 {
            for l2 in 0..2 {
                let m = Mono { v: 0, l1, l2, mu };
                if m.fiber_degree(target) <= tmax {
                    monos.push(m);
                }
            }
        }
    }
    monos.sort_by_key(|m| (m.fiber_degree(target), *m));
    let index: HashMap<Mono, usize> = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let q = monos
        .iter()
        .map(|m| match target {
            Target::KuM => vec![],
            Target::KoY => {
                if m.mu % 2 == 1 && m.l1 == 0 {
                    let t = Mono { l1: 1, mu: m.mu - 1, ..*m };
                    index.get(&t).map(|&j| vec![(j, 1)]).unwrap_or_default()
                } else {
                    vec![]
                }
            }
        })
        .collect();
    ExteriorComodule {
        names: monos.iter().map(|m| m.to_string()).collect(),
        degrees: monos.iter().map(|m| m.fiber_degree(target)).collect(),
        q,
    }
}

/// `λ_1`, `λ_2` and `λ_n = λ_{n-2} μ^{2^{n-3}}` as monomials.
pub fn lambda(n: u32) -> Mono {
    match n {
        1 => Mono { l1: 1, ..Mono::ONE },
        2 => Mono { l2: 1, ..Mono::ONE },
        _ => {
            let mut m = lambda(n - 2);
            m.mu += 1 << (n - 3);
            m
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub n: u32,
    pub r: u32,
    pub s: u32,
    /// `μ^{2^{n-1}}`
    pub source: String,
    /// `v₁^{r(n)} λ_n`
    pub target: String,
    pub source_stem: u32,
}

/// `d^{r(n)}(μ^{2^{n-1}}) = v₁^{r(n)} λ_n`, `n >= 1`.
#[derive(Clone, Debug, Serialize)]
pub struct DifferentialSchedule {
    pub target: Target,
    pub entries: Vec<ScheduleEntry>,
}

impl DifferentialSchedule {
    pub fn entry(&self, n: u32) -> Option<&ScheduleEntry> {
        self.entries.iter().find(|e| e.n == n)
    }
}

/// The schedules `r(n) = 2^n + r(n-2)`, `s(n) = 2^n + s(n-2)` for
/// `n <= nmax`, checking `2r(n) + s(n) = 2^{n+2} - 1` and `|λ_n| = s(n)`.
pub fn schedule(target: Target, nmax: u32) -> Result<DifferentialSchedule> {
    let (r0, s0) = target.initial();
    let mut r: Vec<u32> = Vec::new();
    let mut s: Vec<u32> = Vec::new();
    let mut entries = Vec::new();
    for n in 1..=nmax {
        let (rn, sn) = if n <= 2 {
            (r0[n as usize - 1], s0[n as usize - 1])
        } else {
            ((1 << n) + r[n as usize - 3], (1 << n) + s[n as usize - 3])
        };
        r.push(rn);
        s.push(sn);
        if 2 * rn + sn != (1 << (n + 2)) - 1 {
            return Err(Error::ScheduleIdentity(n));
        }
        let lam = lambda(n);
        if lam.stem(target) != sn {
            return Err(Error::DegreeMismatch {
                expected: sn as i64,
                found: lam.stem(target) as i64,
            });
        }
        let source = Mono { mu: 1 << (n - 1), ..Mono::ONE };
        entries.push(ScheduleEntry {
            n,
            r: rn,
            s: sn,
            source: source.to_string(),
            target: Mono { v: rn, ..lam }.to_string(),
            source_stem: source.stem(target),
        });
    }
    Ok(DifferentialSchedule { target, entries })
}

/// The shortest schedule whose `λ_n` and `λ_{n+1}` cover stems `<= max_stem`.
pub fn schedule_for(target: Target, max_stem: u32) -> Result<DifferentialSchedule> {
    let mut n = 2;
    while schedule(target, n)?.entries.last().map_or(0, |e| e.s) <= max_stem + 1 {
        n += 1;
    }
    schedule(target, n + 1)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ModuleGenerator {
    pub label: String,
    pub degree: u32,
    /// Least `r` with `v₁^r · g = 0`; `None` for the free generator.
    pub torsion: Option<u32>,
    pub monomial: String,
    #[serde(skip)]
    pub rep: Mono,
}

/// `π_*` as a `P(v₁)`-module: `1` free, `x_{n,m} = λ_n μ^{2^n m}` and
/// `x'_{n,m} = λ_n λ_{n+1} μ^{2^n m}` with `v₁^{r(n)}` torsion.
#[derive(Clone, Debug, Serialize)]
pub struct PModulePresentation {
    pub target: Target,
    pub max_degree: u32,
    pub generators: Vec<ModuleGenerator>,
}

impl PModulePresentation {
    pub fn from_schedule(sched: &DifferentialSchedule, max_degree: u32) -> Result<Self> {
        let target = sched.target;
        let mut generators = vec![ModuleGenerator {
            label: "1".into(),
            degree: 0,
            torsion: None,
            monomial: "1".into(),
            rep: Mono::ONE,
        }];
        for e in &sched.entries {
            if e.s > max_degree {
                break;
            }
            let next = sched
                .entry(e.n + 1)
                .ok_or(Error::BoundExceeded { degree: max_degree, bound: e.s })?;
            let period = 1u32 << (e.n + 3);
            let lam = lambda(e.n);
            let pair = lam.mul(&lambda(e.n + 1)).expect("λ_n λ_{n+1} is non-zero");
            let mut m = 0;
            while e.s + period * m <= max_degree {
                let rep = Mono { mu: lam.mu + (1 << e.n) * m, ..lam };
                generators.push(ModuleGenerator {
                    label: format!("x_{{{},{}}}", e.n, m),
                    degree: e.s + period * m,
                    torsion: Some(e.r),
                    monomial: rep.to_string(),
                    rep,
                });
                if e.s + next.s + period * m <= max_degree {
                    let rep = Mono { mu: pair.mu + (1 << e.n) * m, ..pair };
                    generators.push(ModuleGenerator {
                        label: format!("x'_{{{},{}}}", e.n, m),
                        degree: e.s + next.s + period * m,
                        torsion: Some(e.r),
                        monomial: rep.to_string(),
                        rep,
                    });
                }
                m += 1;
            }
        }
        generators.sort_by(|a, b| (a.degree, &a.label).cmp(&(b.degree, &b.label)));
        Ok(PModulePresentation {
            target,
            max_degree,
            generators,
        })
    }

    /// The bigraded `E∞` dims `(s, t - s)` this presentation predicts.
    pub fn expected_dims(&self, max_stem: u32) -> BTreeMap<(u32, u32), usize> {
        let mut out = BTreeMap::new();
        for g in &self.generators {
            let mut j = 0;
            while g.degree + 2 * j <= max_stem && g.torsion.is_none_or(|r| j < r) {
                *out.entry((j, g.degree + 2 * j)).or_insert(0) += 1;
                j += 1;
            }
        }
        out
    }
}

/// One bidegree of a page: `s`, `t`, `t - s`, dimension and the rank of
/// multiplication by `v₁` into `(s + 1, t - s + 2)`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct ChartCell {
    pub s: u32,
    pub t: u32,
    pub stem: u32,
    pub dim: usize,
    pub v1_rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PageRecord {
    /// The page `E_{r+1}` after `d^r`.
    pub after_r: u32,
    pub n: u32,
    pub cells: Vec<ChartCell>,
    /// v₁-nontorsion classes in odd stems, judged within the reported range.
    pub odd_nontorsion: usize,
}

#[derive(Clone, Debug, Serialize, Default)]
pub struct Consistency {
    /// `d^r ∘ d^r` lands in the boundaries on every page.
    pub d_squared_zero: bool,
    /// `d^r` maps cycles to cycles and boundaries to boundaries.
    pub well_defined: bool,
    /// Every scheduled target is a non-zero class when its differential runs.
    pub targets_alive: bool,
    /// `d(ab) = d(a)b + a d(b)` modulo boundaries on pairs of cycles.
    pub leibniz: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdamsRun {
    pub target: Target,
    pub max_stem: u32,
    pub e2: Vec<ChartCell>,
    pub pages: Vec<PageRecord>,
    pub einf: Vec<ChartCell>,
    pub module: PModulePresentation,
    pub closed_form_matches: bool,
    /// Torsion orders read off `E∞` agree with the presentation.
    pub torsion_verified: bool,
    /// Stems `<= free_window` are far enough from the edge to judge towers.
    pub free_window: u32,
    pub free_towers: usize,
    pub consistency: Consistency,
}

impl AdamsRun {
    pub fn einf_dims(&self) -> BTreeMap<(u32, u32), usize> {
        dims_of(&self.einf)
    }

    pub fn e2_dims(&self) -> BTreeMap<(u32, u32), usize> {
        dims_of(&self.e2)
    }
}

/// `(s, stem) ↦ dim` of chart cells.
pub fn dims_of(cells: &[ChartCell]) -> BTreeMap<(u32, u32), usize> {
    cells.iter().filter(|c| c.dim > 0).map(|c| ((c.s, c.stem), c.dim)).collect()
}

struct Cell {
    basis: Vec<Mono>,
    index: HashMap<Mono, usize>,
    cycles: Echelon,
    boundaries: Echelon,
}

/// `Z_r ⊇ B_r` per bidegree of `P(v₁) ⊗ E(λ₁, λ₂) ⊗ P(μ)`.
pub struct Pages {
    target: Target,
    top: u32,
    field: PrimeField,
    cells: BTreeMap<(u32, u32), Cell>,
}

impl Pages {
    /// The free model through stem `top`, with `Z = everything`, `B = 0`.
    pub fn new(target: Target, top: u32) -> Self {
        let field = f2();
        let mut cells = BTreeMap::new();
        for stem in 0..=top {
            for s in 0..=stem / 2 {
                let rest = stem - 2 * s;
                let mut basis = Vec::new();
                for l1 in 0..2 {
                    for l2 in 0..2 {
                        let lam = l1 * target.lambda1_degree() + l2 * LAMBDA2_DEGREE;
                        if lam <= rest && (rest - lam) % MU_DEGREE == 0 {
                            basis.push(Mono { v: s, l1, l2, mu: (rest - lam) / MU_DEGREE });
                        }
                    }
                }
                if basis.is_empty() {
                    continue;
                }
                basis.sort();
                let n = basis.len();
                let mut cycles = Echelon::new(&field, n);
                for i in 0..n {
                    cycles.insert(&SparseVec::unit(i));
                }
                let index = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
                cells.insert(
                    (s, stem),
                    Cell {
                        basis,
                        index,
                        cycles,
                        boundaries: Echelon::new(&field, n),
                    },
                );
            }
        }
        Pages {
            target,
            top,
            field,
            cells,
        }
    }

    fn vector(&self, key: (u32, u32), m: &Mono) -> Option<SparseVec> {
        let i = *self.cells.get(&key)?.index.get(m)?;
        Some(SparseVec::unit(i))
    }

    /// `d^{r(n)}` on a monomial, treating the part of `μ^b` below
    /// `μ^{2^{n-1}}` and all `v₁`, `λ` factors as cycles.
    pub fn d_mono(&self, e: &ScheduleEntry, m: &Mono) -> Option<Mono> {
        let k = 1u32 << (e.n - 1);
        if (m.mu / k) % 2 == 0 {
            return None;
        }
        let rest = Mono { mu: m.mu - k, ..*m };
        rest.mul(&Mono { v: e.r, ..lambda(e.n) })
    }

    fn d_vec(&self, e: &ScheduleEntry, key: (u32, u32), v: &SparseVec) -> ((u32, u32), SparseVec) {
        let cell = &self.cells[&key];
        let tkey = (key.0 + e.r, key.1.wrapping_sub(1));
        let mut out = SparseVec::zero();
        if key.1 == 0 {
            return (tkey, out);
        }
        for &(i, c) in v.entries() {
            if let Some(t) = self.d_mono(e, &cell.basis[i]) {
                if let Some(tv) = self.vector(tkey, &t) {
                    out = out.add_scaled(&self.field, &tv, c);
                }
            }
        }
        (tkey, out)
    }

    /// Is `m` a non-zero class (a cycle outside the boundaries)?
    pub fn is_live(&self, m: &Mono) -> Option<bool> {
        let key = (m.v, m.stem(self.target));
        let cell = self.cells.get(&key)?;
        let v = SparseVec::unit(*cell.index.get(m)?);
        Some(cell.cycles.contains(&v) && !cell.boundaries.contains(&v))
    }

    /// Is `m` a boundary (zero on this page) while still a cycle?
    pub fn is_zero_class(&self, m: &Mono) -> Option<bool> {
        let key = (m.v, m.stem(self.target));
        let cell = self.cells.get(&key)?;
        let v = SparseVec::unit(*cell.index.get(m)?);
        Some(cell.boundaries.contains(&v))
    }

    pub fn is_cycle(&self, m: &Mono) -> Option<bool> {
        let key = (m.v, m.stem(self.target));
        let cell = self.cells.get(&key)?;
        let v = SparseVec::unit(*cell.index.get(m)?);
        Some(cell.cycles.contains(&v))
    }

    /// `d^r(x)` of a monomial as a class on this page: `Some(true)` when it
    /// is zero modulo boundaries.
    pub fn d_is_zero(&self, e: &ScheduleEntry, m: &Mono) -> Option<bool> {
        let key = (m.v, m.stem(self.target));
        let i = *self.cells.get(&key)?.index.get(m)?;
        let (tkey, img) = self.d_vec(e, key, &SparseVec::unit(i));
        Some(img.is_zero() || self.cells.get(&tkey).is_some_and(|c| c.boundaries.contains(&img)))
    }

    /// Applies `d^{r(n)}`: `Z ← Z ∩ d⁻¹(B)`, `B ← B + d(Z)`.
    pub fn apply(&mut self, e: &ScheduleEntry, checks: &mut Consistency) -> Result<()> {
        let f = self.field.clone();
        let lam = Mono { v: e.r, ..lambda(e.n) };
        if lam.stem(self.target) <= self.top {
            if self.is_live(&lam) != Some(true) {
                checks.targets_alive = false;
                return Err(Error::DeadTarget(lam.to_string()));
            }
            let src = Mono { mu: 1 << (e.n - 1), ..Mono::ONE };
            if self.is_cycle(&src) != Some(true) {
                return Err(Error::InvalidPresentation(format!("{src} is not a cycle on E{}", e.r)));
            }
        }
        if !self.leibniz_holds(e) {
            checks.leibniz = false;
        }
        let mut new_cycles = Vec::new();
        let mut new_boundaries: Vec<((u32, u32), Vec<SparseVec>)> = Vec::new();
        for (&key, cell) in &self.cells {
            let z = cell.cycles.basis();
            let mut images = Vec::new();
            let mut reduced = Vec::new();
            let mut tkey = key;
            for v in &z {
                let (k, img) = self.d_vec(e, key, v);
                tkey = k;
                let target = self.cells.get(&k);
                let red = match target {
                    Some(t) => t.boundaries.reduce(&img),
                    None => SparseVec::zero(),
                };
                if let Some(t) = target {
                    if !t.cycles.contains(&img) {
                        checks.well_defined = false;
                    }
                    // d² = 0: d(d(z)) must be a boundary
                    let (k2, img2) = self.d_vec(e, k, &img);
                    if !img2.is_zero() && !self.cells.get(&k2).is_some_and(|c| c.boundaries.contains(&img2)) {
                        checks.d_squared_zero = false;
                    }
                }
                images.push(img);
                reduced.push(red);
            }
            for b in cell.boundaries.basis() {
                let (k, img) = self.d_vec(e, key, &b);
                if !img.is_zero() && !self.cells.get(&k).is_some_and(|c| c.boundaries.contains(&img)) {
                    checks.well_defined = false;
                }
            }
            let rows = self.cells.get(&tkey).map_or(0, |c| c.basis.len());
            let mat = SparseMat::from_columns(&f, rows, &reduced);
            let mut kept: Vec<SparseVec> = Vec::new();
            for coeffs in kernel_basis(&f, &mat) {
                let mut v = SparseVec::zero();
                for &(i, c) in coeffs.entries() {
                    v = v.add_scaled(&f, &z[i], c);
                }
                kept.push(v);
            }
            kept.extend(cell.boundaries.basis());
            new_cycles.push((key, kept));
            if self.cells.contains_key(&tkey) {
                new_boundaries.push((tkey, images));
            }
        }
        for (key, kept) in new_cycles {
            let cell = self.cells.get_mut(&key).unwrap();
            let mut ech = Echelon::new(&f, cell.basis.len());
            for v in &kept {
                ech.insert(v);
            }
            cell.cycles = ech;
        }
        for (key, images) in new_boundaries {
            let cell = self.cells.get_mut(&key).unwrap();
            for v in &images {
                cell.boundaries.insert(v);
            }
        }
        Ok(())
    }

    /// Leibniz on all pairs of monomial cycles `a, b` without `v₁`
    /// (the differential is `v₁`-linear).
    fn leibniz_holds(&self, e: &ScheduleEntry) -> bool {
        let monos: Vec<Mono> = self
            .cells
            .iter()
            .filter(|(k, _)| k.0 == 0)
            .flat_map(|(_, c)| c.basis.iter().copied())
            .filter(|m| self.is_cycle(m) == Some(true))
            .collect();
        for a in &monos {
            for b in &monos {
                let stem = a.stem(self.target) + b.stem(self.target);
                if stem > self.top || stem == 0 {
                    continue;
                }
                let key = (e.r, stem - 1);
                let Some(cell) = self.cells.get(&key) else { continue };
                let mut terms = Vec::new();
                terms.extend(a.mul(b).and_then(|ab| self.d_mono(e, &ab)));
                terms.extend(self.d_mono(e, a).and_then(|da| da.mul(b)));
                terms.extend(self.d_mono(e, b).and_then(|db| a.mul(&db)));
                let mut v = SparseVec::zero();
                for t in terms {
                    v = v.add_scaled(&self.field, &SparseVec::unit(cell.index[&t]), 1);
                }
                if !v.is_zero() && !cell.boundaries.contains(&v) {
                    return false;
                }
            }
        }
        true
    }

    fn quotient(&self, key: (u32, u32)) -> Option<Subquotient> {
        let cell = self.cells.get(&key)?;
        Some(Subquotient::new(
            &self.field,
            cell.basis.len(),
            &cell.cycles.basis(),
            &cell.boundaries.basis(),
        ))
    }

    /// Rank of `v₁^j` from `(s, stem)` to `(s + j, stem + 2j)` on the page.
    fn v1_power_rank(&self, key: (u32, u32), j: u32) -> usize {
        let Some(h) = self.quotient(key) else { return 0 };
        let tkey = (key.0 + j, key.1 + 2 * j);
        let Some(target) = self.cells.get(&tkey) else { return 0 };
        let basis = &self.cells[&key].basis;
        let cols: Vec<SparseVec> = h
            .reps()
            .iter()
            .map(|v| {
                let mut out = SparseVec::zero();
                for &(i, c) in v.entries() {
                    let m = Mono { v: basis[i].v + j, ..basis[i] };
                    out = out.add_scaled(&self.field, &SparseVec::unit(target.index[&m]), c);
                }
                target.boundaries.reduce(&out)
            })
            .collect();
        rank(&self.field, &SparseMat::from_columns(&self.field, target.basis.len(), &cols))
    }

    pub fn chart(&self, max_stem: u32) -> Vec<ChartCell> {
        self.cells
            .keys()
            .filter(|k| k.1 <= max_stem)
            .filter_map(|&(s, stem)| {
                let dim = self.quotient((s, stem))?.dim();
                (dim > 0).then(|| ChartCell {
                    s,
                    t: stem + s,
                    stem,
                    dim,
                    v1_rank: if stem + 2 <= self.top { self.v1_power_rank((s, stem), 1) } else { 0 },
                })
            })
            .collect()
    }

    /// Classes `x` in stems `<= window` with `v₁^j x ≠ 0` for all `j` with
    /// `stem + 2j <= limit`.
    pub fn nontorsion(&self, window: u32, limit: u32, odd_only: bool) -> usize {
        self.cells
            .keys()
            .filter(|&&(_, stem)| stem <= window && (!odd_only || stem % 2 == 1))
            .map(|&(s, stem)| {
                let j = (limit - stem) / 2;
                self.v1_power_rank((s, stem), j)
            })
            .sum()
    }

    /// Free `P(v₁)`-towers starting in stems `<= window`: nontorsion
    /// classes that are not `v₁` times a nontorsion class.
    pub fn free_towers(&self, window: u32, limit: u32) -> usize {
        let mut total = 0isize;
        for &(s, stem) in self.cells.keys().filter(|k| k.1 <= window) {
            total += self.v1_power_rank((s, stem), (limit - stem) / 2) as isize;
            if s > 0 && stem >= 2 {
                total -= self.v1_power_rank((s - 1, stem - 2), (limit - stem) / 2 + 1) as isize;
            }
        }
        total as usize
    }

    /// Least `j` with `v₁^j m` zero on the page, searched while the stem
    /// stays `<= limit`.
    pub fn torsion_order(&self, m: &Mono, limit: u32) -> Option<u32> {
        let mut j = 0;
        while m.stem(self.target) + 2 * j <= limit {
            let x = Mono { v: m.v + j, ..*m };
            if self.is_zero_class(&x) != Some(false) {
                return Some(j);
            }
            j += 1;
        }
        None
    }
}

/// Runs the schedule on the free model `P(v₁) ⊗ E(λ₁, λ₂) ⊗ P(μ)` through
/// stem `max_stem`. For `THH(ko) ∧ Y` the model is an imagined `E₁` and the
/// scheduled `d¹(μ) = v₁λ₁` produces `E₂`.
pub fn run_ss(sched: &DifferentialSchedule, max_stem: u32) -> Result<AdamsRun> {
    let target = sched.target;
    // one stem of slack per page: d lowers the stem by one
    let top = max_stem + sched.entries.len() as u32 + 2;
    if sched.entries.last().is_none_or(|e| e.source_stem <= top) {
        return Err(Error::BoundExceeded {
            degree: top,
            bound: sched.entries.last().map_or(0, |e| e.source_stem),
        });
    }
    let mut pages = Pages::new(target, top);
    let mut checks = Consistency {
        d_squared_zero: true,
        well_defined: true,
        targets_alive: true,
        leibniz: true,
    };
    let mut e2 = None;
    let mut records = Vec::new();
    for e in &sched.entries {
        if e.r >= 2 && e2.is_none() {
            e2 = Some(pages.chart(max_stem));
        }
        if e.source_stem > top {
            break;
        }
        pages.apply(e, &mut checks)?;
        records.push(PageRecord {
            after_r: e.r,
            n: e.n,
            cells: pages.chart(max_stem),
            odd_nontorsion: pages.nontorsion(max_stem, max_stem, true),
        });
    }
    let e2 = e2.unwrap_or_else(|| pages.chart(max_stem));
    let module = PModulePresentation::from_schedule(sched, max_stem)?;
    let einf = pages.chart(max_stem);
    let closed_form_matches = dims_of(&einf) == module.expected_dims(max_stem);
    let mut torsion_verified = true;
    for g in &module.generators {
        let found = pages.torsion_order(&g.rep, max_stem);
        let ok = match (g.torsion, found) {
            (Some(r), Some(j)) => r == j,
            (Some(r), None) => g.degree + 2 * r > max_stem,
            (None, None) => true,
            (None, Some(_)) => false,
        };
        torsion_verified &= ok;
    }
    let free_window = module
        .generators
        .iter()
        .filter(|g| g.torsion.is_some_and(|r| g.degree + 2 * r > max_stem))
        .map(|g| g.degree.saturating_sub(1))
        .min()
        .unwrap_or(max_stem);
    let free_towers = pages.free_towers(free_window, max_stem);
    Ok(AdamsRun {
        target,
        max_stem,
        e2,
        pages: records,
        einf,
        module,
        closed_form_matches,
        torsion_verified,
        free_window,
        free_towers,
        consistency: checks,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct HomotopyEntry {
    pub label: String,
    pub torsion: Option<u32>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct HomotopyRow {
    pub degree: u32,
    pub generators: Vec<HomotopyEntry>,
}

/// `π_d` for `d <= n`: the classes `v₁^j g` with `|g| + 2j = d`, `j < r(g)`.
pub fn homotopy_table(target: Target, n: u32) -> Result<Vec<HomotopyRow>> {
    let module = PModulePresentation::from_schedule(&schedule_for(target, n)?, n)?;
    Ok(homotopy_rows(&module, n))
}

pub fn homotopy_rows(module: &PModulePresentation, n: u32) -> Vec<HomotopyRow> {
    let mut rows: Vec<HomotopyRow> = (0..=n)
        .map(|degree| HomotopyRow {
            degree,
            generators: Vec::new(),
        })
        .collect();
    for g in &module.generators {
        let mut j = 0;
        while g.degree + 2 * j <= n && g.torsion.is_none_or(|r| j < r) {
            let label = match (j, g.label.as_str()) {
                (0, l) => l.to_string(),
                (1, "1") => "v1".into(),
                (j, "1") => format!("v1^{j}"),
                (1, l) => format!("v1·{l}"),
                (j, l) => format!("v1^{j}·{l}"),
            };
            rows[(g.degree + 2 * j) as usize].generators.push(HomotopyEntry {
                label,
                torsion: g.torsion,
            });
            j += 1;
        }
    }
    rows
}
