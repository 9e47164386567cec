//! Finite modules over finite subalgebras of `A`, realized as subquotients
//! of `A` itself in each degree.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    admissible_basis, contains, f2, from_vector, steenrod_basis, to_vector, SteenrodElement,
    SubalgebraSpec,
};
use crate::fplin::{kernel_basis, rank, SparseMat, SparseVec, Subquotient};
use crate::{Error, Result};

/// A graded module `W/R` with `R ⊂ W ⊂ A` degreewise. An element of `A`
/// of degree `d` represents a class in module degree `d + shift`.
#[derive(Clone, Debug)]
pub struct GradedModule {
    pub spec: SubalgebraSpec,
    pub shift: i32,
    parts: BTreeMap<u32, Subquotient>,
    actions: BTreeMap<(usize, u32), SparseMat>,
}

/// Result of [`module_map_kernel`].
#[derive(Clone, Debug)]
pub struct MapKernel {
    pub kernel: GradedModule,
    pub kernel_rank: usize,
    pub image_rank: usize,
    pub cokernel_rank: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DegreeSummary {
    pub degree: i32,
    pub dim: usize,
    pub basis: Vec<String>,
}

impl GradedModule {
    fn build(spec: &SubalgebraSpec, shift: i32, parts: BTreeMap<u32, Subquotient>) -> Self {
        let mut m = GradedModule {
            spec: spec.clone(),
            shift,
            parts,
            actions: BTreeMap::new(),
        };
        let top = m.parts.keys().next_back().copied().unwrap_or(0);
        for (gi, g) in spec.generators(top).iter().enumerate() {
            let gd = g.degree().unwrap_or(0);
            for (&d, part) in &m.parts {
                let cols: Vec<SparseVec> = part
                    .reps()
                    .iter()
                    .map(|r| {
                        let x = g.mul(&from_vector(r, d));
                        m.coordinates(&x, d + gd).unwrap_or_default()
                    })
                    .collect();
                let rows = m.parts.get(&(d + gd)).map_or(0, Subquotient::dim);
                m.actions
                    .insert((gi, d), SparseMat::from_columns(&f2(), rows, &cols));
            }
        }
        m
    }

    /// Ambient degrees with a nonzero or zero part recorded.
    pub fn ambient_degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.parts.keys().copied()
    }

    pub fn dim_ambient(&self, d: u32) -> usize {
        self.parts.get(&d).map_or(0, Subquotient::dim)
    }

    pub fn total_rank(&self) -> usize {
        self.parts.values().map(Subquotient::dim).sum()
    }

    /// Nonzero dimensions keyed by module degree.
    pub fn poincare_series(&self) -> BTreeMap<i32, usize> {
        self.parts
            .iter()
            .filter(|(_, p)| p.dim() > 0)
            .map(|(&d, p)| (d as i32 + self.shift, p.dim()))
            .collect()
    }

    /// Representatives of a basis in ambient degree `d`.
    pub fn basis(&self, d: u32) -> Vec<SteenrodElement> {
        self.parts
            .get(&d)
            .map(|p| p.reps().iter().map(|r| from_vector(r, d)).collect())
            .unwrap_or_default()
    }

    pub fn summary(&self) -> Vec<DegreeSummary> {
        self.parts
            .iter()
            .filter(|(_, p)| p.dim() > 0)
            .map(|(&d, p)| DegreeSummary {
                degree: d as i32 + self.shift,
                dim: p.dim(),
                basis: self.basis(d).iter().map(|e| e.to_string()).collect(),
            })
            .collect()
    }

    /// Coordinates of the class of `x` (ambient degree `d`); `None` if
    /// `x` does not lie in `W`.
    pub fn coordinates(&self, x: &SteenrodElement, d: u32) -> Option<SparseVec> {
        match self.parts.get(&d) {
            Some(p) => p.coordinates(&to_vector(x, d)),
            None => x.is_zero().then(SparseVec::zero),
        }
    }

    /// Whether `x` represents the zero class (and lies in `W`).
    pub fn is_zero_class(&self, x: &SteenrodElement, d: u32) -> bool {
        matches!(self.coordinates(x, d), Some(v) if v.is_zero())
    }

    /// Matrix of left multiplication by the `i`-th algebra generator out of
    /// ambient degree `d`.
    pub fn action(&self, generator: usize, d: u32) -> Option<&SparseMat> {
        self.actions.get(&(generator, d))
    }
}

fn ambient_range(spec: &SubalgebraSpec) -> Result<std::ops::RangeInclusive<u32>> {
    let top = spec
        .top_degree()
        .ok_or_else(|| Error::InfiniteSubalgebra(spec.to_string()))?;
    Ok(0..=top)
}

/// `B / B{g_1, ..., g_k}` for a finite subalgebra `B`.
pub fn quotient_module(spec: &SubalgebraSpec, ideal: &[SteenrodElement]) -> Result<GradedModule> {
    let range = ambient_range(spec)?;
    for g in ideal {
        if g.degree().is_none() || !contains(spec, g) {
            return Err(Error::InvalidPresentation(format!(
                "{g} is not a homogeneous element of {spec}"
            )));
        }
    }
    let f = f2();
    let mut parts = BTreeMap::new();
    for d in range {
        let n = admissible_basis(d).len();
        let spanning: Vec<SparseVec> = steenrod_basis(spec, d).iter().map(|b| to_vector(b, d)).collect();
        let mut relations = Vec::new();
        for g in ideal {
            let gd = g.degree().unwrap();
            if gd > d {
                continue;
            }
            for b in steenrod_basis(spec, d - gd).iter() {
                relations.push(to_vector(&b.mul(g), d));
            }
        }
        parts.insert(d, Subquotient::new(&f, n, &spanning, &relations));
    }
    Ok(GradedModule::build(spec, 0, parts))
}

/// Kernel of `x ↦ x·f` from `source` to `target`.
pub fn module_map_kernel(
    f: &SteenrodElement,
    source: &GradedModule,
    target: &GradedModule,
) -> Result<MapKernel> {
    let field = f2();
    let Some(fd) = f.degree() else {
        if !f.is_zero() {
            return Err(Error::InvalidPresentation(format!("{f} is not homogeneous")));
        }
        return Ok(MapKernel {
            kernel: source.clone(),
            kernel_rank: source.total_rank(),
            image_rank: 0,
            cokernel_rank: target.total_rank(),
        });
    };
    if source.shift != target.shift + fd as i32 {
        return Err(Error::DegreeMismatch {
            expected: (target.shift + fd as i32) as i64,
            found: source.shift as i64,
        });
    }
    let mut parts = BTreeMap::new();
    let mut image_rank = 0;
    for (&d, part) in &source.parts {
        let td = d + fd;
        let mut cols = Vec::new();
        for r in part.reps() {
            let y = from_vector(r, d).mul(f);
            let c = target.coordinates(&y, td).ok_or_else(|| {
                Error::InvalidPresentation(format!("right multiplication by {f} leaves the target"))
            })?;
            cols.push(c);
        }
        let rows = target.dim_ambient(td);
        let mat = SparseMat::from_columns(&field, rows, &cols);
        image_rank += rank(&field, &mat);
        let n = admissible_basis(d).len();
        let relations = part.relations().basis();
        let mut spanning = relations.clone();
        for k in kernel_basis(&field, &mat) {
            let mut v = SparseVec::zero();
            for &(i, c) in k.entries() {
                v = v.add_scaled(&field, &part.reps()[i], c);
            }
            spanning.push(v);
        }
        parts.insert(d, Subquotient::new(&field, n, &spanning, &relations));
    }
    let kernel = GradedModule::build(&source.spec, source.shift, parts);
    let kernel_rank = kernel.total_rank();
    Ok(MapKernel {
        kernel,
        kernel_rank,
        image_rank,
        cokernel_rank: target.total_rank() - image_rank,
    })
}

/// Whether `m` is cyclic on `generator` with annihilator ideal generated by
/// `candidates`.
pub fn cyclic_and_annihilator_check(
    m: &GradedModule,
    generator: &SteenrodElement,
    candidates: &[SteenrodElement],
) -> Result<bool> {
    let Some(gd) = generator.degree() else {
        return Err(Error::InvalidPresentation(format!(
            "{generator} is not homogeneous"
        )));
    };
    match m.coordinates(generator, gd) {
        Some(v) if !v.is_zero() => {}
        _ => return Ok(false),
    }
    let field = f2();
    // the orbit spans the module
    for (&d, part) in &m.parts {
        if part.dim() == 0 {
            continue;
        }
        if d < gd {
            return Ok(false);
        }
        let cols: Vec<SparseVec> = steenrod_basis(&m.spec, d - gd)
            .iter()
            .filter_map(|b| m.coordinates(&b.mul(generator), d))
            .collect();
        let mat = SparseMat::from_columns(&field, part.dim(), &cols);
        if rank(&field, &mat) != part.dim() {
            return Ok(false);
        }
    }
    // each candidate annihilates the generator
    for c in candidates {
        let Some(cd) = c.degree() else {
            return Ok(false);
        };
        if !m.is_zero_class(&c.mul(generator), cd + gd) {
            return Ok(false);
        }
    }
    // and nothing else does
    let q = match quotient_module(&m.spec, candidates) {
        Ok(q) => q,
        Err(Error::InvalidPresentation(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let offset = gd as i32 + m.shift;
    let shifted: BTreeMap<i32, usize> = q
        .poincare_series()
        .into_iter()
        .map(|(d, n)| (d + offset, n))
        .collect();
    Ok(shifted == m.poincare_series())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(s: &str) -> SteenrodElement {
        SteenrodElement::parse(s).unwrap()
    }

    #[test]
    fn small_quotients() {
        let a2 = SubalgebraSpec::A(2);
        let m = quotient_module(&a2, &[el("Sq1"), el("Sq2")]).unwrap();
        assert_eq!(m.total_rank(), 8);
        let m = quotient_module(&a2, &[el("Sq1"), el("Sq2"), el("Sq4")]).unwrap();
        assert_eq!(m.total_rank(), 1);
        assert!(quotient_module(&SubalgebraSpec::A(1), &[el("Sq4")]).is_err());
    }

    #[test]
    fn trivial_maps() {
        let a1 = SubalgebraSpec::A(1);
        let m = quotient_module(&a1, &[el("Sq1")]).unwrap();
        let id = module_map_kernel(&SteenrodElement::one(), &m, &m).unwrap();
        assert_eq!(id.kernel_rank, 0);
        assert_eq!(id.cokernel_rank, 0);
        let zero = module_map_kernel(&SteenrodElement::zero(), &m, &m).unwrap();
        assert_eq!(zero.kernel_rank, m.total_rank());
        assert!(matches!(
            module_map_kernel(&el("Sq2"), &m, &m),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn quotient_is_cyclic() {
        let a2 = SubalgebraSpec::A(2);
        let gens = [el("Sq1"), el("Sq2")];
        let m = quotient_module(&a2, &gens).unwrap();
        assert!(cyclic_and_annihilator_check(&m, &SteenrodElement::one(), &gens).unwrap());
        assert!(!cyclic_and_annihilator_check(&m, &SteenrodElement::one(), &gens[..1]).unwrap());
    }
}
