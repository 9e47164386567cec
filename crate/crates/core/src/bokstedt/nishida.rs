//! Instance checks of Dyer–Lashof values through the Nishida relations at
//! `p = 2`: a value `Q^s(x)` is forced to vanish when the predicted images
//! `Sq^r_* Q^s(x)` are all zero and the operators `Sq^r_*` are jointly
//! injective on the candidate subspace of `H_{|x|+s}`.

use serde::Serialize;

use crate::fplin::{binomial_mod, kernel_basis, SparseMat};
use crate::gca::{dual_action, Algebra, CoactionTable, Element};
use crate::{Error, Result};

use super::catalog::{DlTable, DlValue};

/// `Sq^r_* Q^s = Σ_i C(s-r, r-2i) Q^{s-r+i} Sq^i_*`, as pairs `(s-r+i, i)`.
pub fn nishida_terms(r: u32, s: u32) -> Vec<(u32, u32)> {
    if s < r {
        return Vec::new();
    }
    (0..=r / 2)
        .filter(|&i| binomial_mod((s - r) as u64, (r - 2 * i) as u64, 2) == 1)
        .map(|i| (s - r + i, i))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct NishidaInstance {
    pub claim: String,
    pub degree: u32,
    pub operators: Vec<u32>,
    pub candidate_dim: usize,
    /// Dimension of the joint kernel of the operators on the candidates.
    pub kernel_dim: usize,
    /// Whether every `Sq^r_* Q^s(x)` is predicted to vanish.
    pub predicted_zero: bool,
    pub certified_zero: bool,
}

/// `Q^k(y)` for a class `y`, using instability and the table on letters.
fn apply_q(alg: &Algebra, dl: &DlTable, k: u32, y: &Element) -> Result<Element> {
    if y.is_zero() {
        return Ok(Element::zero());
    }
    let d = alg.degree(y.terms.keys().next().unwrap());
    if k < d {
        return Ok(Element::zero());
    }
    if k == d {
        return Ok(alg.mul(y, y));
    }
    if y.terms.len() == 1 {
        let (m, &c) = y.terms.iter().next().unwrap();
        if m.iter().sum::<u32>() == 1 && c == 1 {
            let i = m.iter().position(|&e| e == 1).unwrap();
            let letter = &alg.letters()[i];
            let spec = &alg.presentation().generators[letter.generator];
            match dl.lookup(spec, k) {
                Some(DlValue::Zero) => return Ok(Element::zero()),
                Some(DlValue::Class(label)) => return Ok(Element::monomial(alg.parse_monomial(&label)?)),
                None => {}
            }
        }
    }
    Err(Error::MissingDyerLashof {
        generator: alg.element_label(y),
        k,
    })
}

/// Certifies `Q^s(x) = 0` for the letter `x`. With `kernel_letter` set, the
/// candidates are restricted to monomials divisible by that letter (the
/// kernel of the map killing it).
pub fn certify_vanishing(
    alg: &Algebra,
    table: &CoactionTable,
    dl: &DlTable,
    x: &str,
    s: u32,
    operators: &[u32],
    kernel_letter: Option<&str>,
) -> Result<NishidaInstance> {
    if alg.p() != 2 {
        return Err(Error::NeedsPrimeTwo(alg.p()));
    }
    let xi = alg
        .letter_index(x)
        .ok_or_else(|| Error::InvalidPresentation(format!("no letter {x}")))?;
    let xe = Element::monomial(alg.letter(xi));
    let degree = alg.letters()[xi].degree + s;
    let restrict = match kernel_letter {
        None => None,
        Some(n) => Some(
            alg.letter_index(n)
                .ok_or_else(|| Error::InvalidPresentation(format!("no letter {n}")))?,
        ),
    };
    let candidates: Vec<_> = alg
        .monomial_basis(degree)?
        .iter()
        .filter(|m| restrict.is_none_or(|i| m[i] > 0))
        .cloned()
        .collect();
    let f = alg.field();
    let mut entries = Vec::new();
    let mut offset = 0;
    let mut predicted_zero = true;
    for &r in operators {
        let rows = alg.monomial_basis(degree - r)?.len();
        for (col, m) in candidates.iter().enumerate() {
            let y = dual_action(alg, table, r, &Element::monomial(m.clone()))?;
            for &(i, c) in alg.to_vector(&y)?.entries() {
                entries.push((offset + i, col, c));
            }
        }
        offset += rows;
        for (j, i) in nishida_terms(r, s) {
            let y = dual_action(alg, table, i, &xe)?;
            if !apply_q(alg, dl, j, &y)?.is_zero() {
                predicted_zero = false;
            }
        }
    }
    let mat = SparseMat::from_entries(f, offset, candidates.len(), entries);
    let kernel_dim = kernel_basis(f, &mat).len();
    Ok(NishidaInstance {
        claim: format!("Q^{s}({x}) = 0"),
        degree,
        operators: operators.to_vec(),
        candidate_dim: candidates.len(),
        kernel_dim,
        predicted_zero,
        certified_zero: kernel_dim == 0 && predicted_zero,
    })
}
