//! Exact linear algebra over prime fields.
//!
//! Two back ends share one interface: bit-packed dense rows for `p = 2`, byte
//! rows for odd primes, plus a sparse column reduction used for the large and
//! very sparse boundary matrices of Hochschild complexes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::Error;

/// The prime field `F_p`. Scalars are stored as `u32` in `0..p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
    inverses: Vec<u32>,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, Error> {
        if p < 2 || p > 251 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        let mut inverses = vec![0; p as usize];
        for a in 1..p {
            inverses[a as usize] = pow_mod(a, p - 2, p);
        }
        Ok(PrimeField { p, inverses })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.p - b) % self.p
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        (self.p - a) % self.p
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a * b) % self.p
    }

    /// Multiplicative inverse. Panics on zero, which is a caller bug.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.inverses[(a % self.p) as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        let mut base = a % self.p;
        let mut e = e;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `(-1)^k` as a field element.
    #[inline]
    pub fn sign(&self, k: u64) -> u32 {
        if k % 2 == 0 {
            1 % self.p
        } else {
            self.p - 1
        }
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(a: u32, e: u32, m: u32) -> u32 {
    let mut acc: u64 = 1;
    let mut b = a as u64 % m as u64;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m as u64;
        }
        b = b * b % m as u64;
        e >>= 1;
    }
    acc as u32
}

/// Binomial coefficient mod p via Lucas' theorem. Zero when `k > n`.
pub fn binomial_mod(n: u64, k: u64, p: u32) -> u32 {
    if k > n {
        return 0;
    }
    let p64 = p as u64;
    let (mut n, mut k) = (n, k);
    let mut acc: u64 = 1;
    while k > 0 || n > 0 {
        let (ni, ki) = (n % p64, k % p64);
        if ki > ni {
            return 0;
        }
        acc = acc * small_binomial(ni, ki, p64) % p64;
        n /= p64;
        k /= p64;
    }
    acc as u32
}

fn small_binomial(n: u64, k: u64, p: u64) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * pow_mod(den as u32, (p - 2) as u32, p as u32) as u64 % p
}

/// A sparse vector: sorted `(index, coefficient)` pairs with no zero entries.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparseVec {
    entries: Vec<(usize, u32)>,
}

impl SparseVec {
    pub fn zero() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec {
            entries: vec![(i, 1)],
        }
    }

    /// Builds a vector from arbitrary pairs, combining repeated indices.
    pub fn from_pairs(f: &PrimeField, pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut map: HashMap<usize, u32> = HashMap::new();
        for (i, c) in pairs {
            let e = map.entry(i).or_insert(0);
            *e = f.add(*e, c % f.p());
        }
        let mut entries: Vec<(usize, u32)> = map.into_iter().filter(|&(_, c)| c != 0).collect();
        entries.sort_unstable();
        SparseVec { entries }
    }

    pub fn from_dense(f: &PrimeField, dense: &[u32]) -> Self {
        SparseVec {
            entries: dense
                .iter()
                .enumerate()
                .filter_map(|(i, &c)| {
                    let c = c % f.p();
                    (c != 0).then_some((i, c))
                })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, f: &PrimeField, other: &SparseVec, c: u32) -> SparseVec {
        let c = c % f.p();
        if c == 0 {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let take_left = j >= other.entries.len()
                || (i < self.entries.len() && self.entries[i].0 < other.entries[j].0);
            let take_right = i >= self.entries.len()
                || (j < other.entries.len() && other.entries[j].0 < self.entries[i].0);
            if take_left {
                out.push(self.entries[i]);
                i += 1;
            } else if take_right {
                let (idx, v) = other.entries[j];
                out.push((idx, f.mul(v, c)));
                j += 1;
            } else {
                let idx = self.entries[i].0;
                let v = f.add(self.entries[i].1, f.mul(other.entries[j].1, c));
                if v != 0 {
                    out.push((idx, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn scale(&self, f: &PrimeField, c: u32) -> SparseVec {
        let c = c % f.p();
        if c == 0 {
            return SparseVec::zero();
        }
        SparseVec {
            entries: self.entries.iter().map(|&(i, v)| (i, f.mul(v, c))).collect(),
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<u32> {
        let mut v = vec![0; n];
        for &(i, c) in &self.entries {
            v[i] = c;
        }
        v
    }
}

/// A sparse matrix given by its nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMat {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<(usize, usize, u32)>,
}

impl SparseMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMat {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(f: &PrimeField, n: usize) -> Self {
        Self::from_entries(f, n, n, (0..n).map(|i| (i, i, 1)))
    }

    /// Combines repeated positions and drops zeros.
    pub fn from_entries(
        f: &PrimeField,
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, u32)>,
    ) -> Self {
        let mut map: HashMap<(usize, usize), u32> = HashMap::new();
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            let e = map.entry((r, c)).or_insert(0);
            *e = f.add(*e, v % f.p());
        }
        let mut entries: Vec<_> = map
            .into_iter()
            .filter(|&(_, v)| v != 0)
            .map(|((r, c), v)| (r, c, v))
            .collect();
        entries.sort_unstable();
        SparseMat {
            rows,
            cols,
            entries,
        }
    }

    /// Matrix whose `j`th column is `columns[j]`.
    pub fn from_columns(f: &PrimeField, rows: usize, columns: &[SparseVec]) -> Self {
        Self::from_entries(
            f,
            rows,
            columns.len(),
            columns
                .iter()
                .enumerate()
                .flat_map(|(j, col)| col.entries().iter().map(move |&(i, v)| (i, j, v))),
        )
    }

    pub fn entries(&self) -> &[(usize, usize, u32)] {
        &self.entries
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        let mut cols: Vec<Vec<(usize, u32)>> = vec![Vec::new(); self.cols];
        for &(r, c, v) in &self.entries {
            cols[c].push((r, v));
        }
        cols.into_iter()
            .map(|mut e| {
                e.sort_unstable();
                SparseVec { entries: e }
            })
            .collect()
    }

    pub fn dense_rows(&self) -> Vec<Vec<u32>> {
        let mut m = vec![vec![0; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            m[r][c] = v;
        }
        m
    }

    pub fn mul_vec(&self, f: &PrimeField, v: &SparseVec) -> SparseVec {
        let mut out = vec![0u32; self.rows];
        for &(r, c, a) in &self.entries {
            let b = v.get(c);
            if b != 0 {
                out[r] = f.add(out[r], f.mul(a, b));
            }
        }
        SparseVec::from_dense(f, &out)
    }

    /// `self * other`.
    pub fn compose(&self, f: &PrimeField, other: &SparseMat) -> SparseMat {
        assert_eq!(self.cols, other.rows);
        let cols = other.columns();
        let prod: Vec<SparseVec> = cols.iter().map(|c| self.mul_vec(f, c)).collect();
        SparseMat::from_columns(f, self.rows, &prod)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Dense rows

#[derive(Clone, Debug, PartialEq, Eq)]
enum Row {
    Bits(Vec<u64>),
    Bytes(Vec<u8>),
}

impl Row {
    fn zero(p: u32, width: usize) -> Row {
        if p == 2 {
            Row::Bits(vec![0; width.div_ceil(64)])
        } else {
            Row::Bytes(vec![0; width])
        }
    }

    fn from_sparse(p: u32, width: usize, v: &SparseVec, offset: usize) -> Row {
        let mut row = Row::zero(p, width);
        for &(i, c) in v.entries() {
            row.set(i + offset, c);
        }
        row
    }

    #[inline]
    fn get(&self, i: usize) -> u32 {
        match self {
            Row::Bits(b) => ((b[i / 64] >> (i % 64)) & 1) as u32,
            Row::Bytes(b) => b[i] as u32,
        }
    }

    #[inline]
    fn set(&mut self, i: usize, c: u32) {
        match self {
            Row::Bits(b) => {
                if c & 1 == 1 {
                    b[i / 64] |= 1 << (i % 64);
                } else {
                    b[i / 64] &= !(1 << (i % 64));
                }
            }
            Row::Bytes(b) => b[i] = c as u8,
        }
    }

    /// First nonzero position below `limit`.
    fn leading(&self, limit: usize) -> Option<usize> {
        match self {
            Row::Bits(b) => {
                for (w, &word) in b.iter().enumerate() {
                    if word != 0 {
                        let i = w * 64 + word.trailing_zeros() as usize;
                        return (i < limit).then_some(i);
                    }
                }
                None
            }
            Row::Bytes(b) => b[..limit].iter().position(|&c| c != 0),
        }
    }

    /// `self += c * other`.
    fn axpy(&mut self, f: &PrimeField, other: &Row, c: u32) {
        match (self, other) {
            (Row::Bits(a), Row::Bits(b)) => {
                if c & 1 == 1 {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x ^= *y;
                    }
                }
            }
            (Row::Bytes(a), Row::Bytes(b)) => {
                let p = f.p();
                let c = c % p;
                if c == 0 {
                    return;
                }
                for (x, &y) in a.iter_mut().zip(b) {
                    if y != 0 {
                        *x = ((*x as u32 + c * y as u32) % p) as u8;
                    }
                }
            }
            _ => unreachable!("mixed row kinds"),
        }
    }

    fn scale(&mut self, f: &PrimeField, c: u32) {
        if let Row::Bytes(a) = self {
            for x in a.iter_mut() {
                *x = f.mul(*x as u32, c) as u8;
            }
        }
    }

    fn to_sparse(&self, range: std::ops::Range<usize>) -> SparseVec {
        let start = range.start;
        let entries = range
            .filter_map(|i| {
                let c = self.get(i);
                (c != 0).then_some((i - start, c))
            })
            .collect();
        SparseVec { entries }
    }

    fn is_zero_in(&self, limit: usize) -> bool {
        self.leading(limit).is_none()
    }
}

/// A subspace of `F_p^n` kept in reduced row echelon form.
///
/// Rows may carry `tags`: extra coordinates that record which combination
/// of tagged input vectors produced them, so that coordinates relative to a
/// chosen basis can be read off after reduction.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: PrimeField,
    n: usize,
    tags: usize,
    rows: Vec<Row>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(field: &PrimeField, n: usize) -> Self {
        Self::with_tags(field, n, 0)
    }

    pub fn with_tags(field: &PrimeField, n: usize, tags: usize) -> Self {
        Echelon {
            field: field.clone(),
            n,
            tags,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn width(&self) -> usize {
        self.n + self.tags
    }

    fn make_row(&self, v: &SparseVec, tag: Option<&SparseVec>) -> Row {
        let mut row = Row::from_sparse(self.field.p(), self.width(), v, 0);
        if let Some(t) = tag {
            for &(i, c) in t.entries() {
                assert!(i < self.tags);
                row.set(self.n + i, c);
            }
        }
        row
    }

    fn reduce_row(&self, row: &mut Row) {
        // rows are fully reduced, so one pass in pivot order suffices
        for (k, &piv) in self.pivots.iter().enumerate() {
            let c = row.get(piv);
            if c != 0 {
                let c = self.field.neg(c);
                row.axpy(&self.field, &self.rows[k], c);
            }
        }
    }

    /// Inserts a vector; returns `true` if it enlarged the subspace.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        self.insert_tagged(v, None)
    }

    pub fn insert_tagged(&mut self, v: &SparseVec, tag: Option<&SparseVec>) -> bool {
        let mut row = self.make_row(v, tag);
        self.reduce_row(&mut row);
        let Some(piv) = row.leading(self.n) else {
            return false;
        };
        let inv = self.field.inv(row.get(piv));
        row.scale(&self.field, inv);
        for r in self.rows.iter_mut() {
            let c = r.get(piv);
            if c != 0 {
                let c = self.field.neg(c);
                r.axpy(&self.field, &row, c);
            }
        }
        // keep pivots sorted so that reduce_row stays a single pass
        let pos = self.pivots.partition_point(|&q| q < piv);
        self.pivots.insert(pos, piv);
        self.rows.insert(pos, row);
        true
    }

    /// Reduces `v` against the subspace; zero iff `v` lies in it.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut row = self.make_row(v, None);
        self.reduce_row(&mut row);
        row.to_sparse(0..self.n)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        let mut row = self.make_row(v, None);
        self.reduce_row(&mut row);
        row.is_zero_in(self.n)
    }

    /// For a vector in the span, returns the combination of tagged inputs that
    /// produces it; `None` when the vector is outside the span.
    pub fn coordinates(&self, v: &SparseVec) -> Option<SparseVec> {
        let mut row = self.make_row(v, None);
        self.reduce_row(&mut row);
        if !row.is_zero_in(self.n) {
            return None;
        }
        let t = row.to_sparse(self.n..self.width());
        Some(t.scale(&self.field, self.field.neg(1)))
    }

    /// The reduced basis vectors (without tags).
    pub fn basis(&self) -> Vec<SparseVec> {
        self.rows.iter().map(|r| r.to_sparse(0..self.n)).collect()
    }
}

/// Rank of a matrix over `F_p`.
pub fn rank(f: &PrimeField, m: &SparseMat) -> usize {
    if m.rows == 0 || m.cols == 0 || m.is_zero() {
        return 0;
    }
    if m.rows.min(m.cols) > 400 {
        sparse_column_rank(f, m)
    } else {
        dense_rank(f, m)
    }
}

/// Dense elimination over rows; also the reference implementation in tests.
pub fn dense_rank(f: &PrimeField, m: &SparseMat) -> usize {
    let mut ech = Echelon::new(f, m.cols);
    let mut rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); m.rows];
    for &(r, c, v) in m.entries() {
        rows[r].push((c, v));
    }
    for r in rows {
        ech.insert(&SparseVec { entries: r });
    }
    ech.dim()
}

/// Column reduction with lowest-pivot bookkeeping. Works well on the very
/// sparse boundary matrices of bar-type complexes.
pub fn sparse_column_rank(f: &PrimeField, m: &SparseMat) -> usize {
    let mut cols = m.columns();
    let mut pivot_col: HashMap<usize, usize> = HashMap::new();
    let mut rank = 0;
    for j in 0..cols.len() {
        let mut col = std::mem::take(&mut cols[j]);
        while let Some(low) = col.max_index() {
            match pivot_col.get(&low) {
                Some(&k) => {
                    let other: &SparseVec = &cols[k];
                    let c = f.mul(col.get(low), f.inv(other.get(low)));
                    col = col.add_scaled(f, other, f.neg(c));
                }
                None => {
                    pivot_col.insert(low, j);
                    rank += 1;
                    break;
                }
            }
        }
        cols[j] = col;
    }
    rank
}

/// Basis of the null space `{v : m v = 0}`, indexed by free columns in
/// increasing order.
pub fn kernel_basis(f: &PrimeField, m: &SparseMat) -> Vec<SparseVec> {
    let mut ech = Echelon::new(f, m.cols);
    let mut rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); m.rows];
    for &(r, c, v) in m.entries() {
        rows[r].push((c, v));
    }
    for r in rows {
        ech.insert(&SparseVec { entries: r });
    }
    let pivots: Vec<usize> = ech.pivots().to_vec();
    let is_pivot: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let basis = ech.basis();
    (0..m.cols)
        .filter(|c| !is_pivot.contains(c))
        .map(|free| {
            let mut pairs = vec![(free, 1)];
            for (row, &piv) in basis.iter().zip(&pivots) {
                let a = row.get(free);
                if a != 0 {
                    pairs.push((piv, f.neg(a)));
                }
            }
            SparseVec::from_pairs(f, pairs)
        })
        .collect()
}

/// Standard-basis representatives of a basis of `F_p^n / span(subspace)`.
pub fn quotient_basis(f: &PrimeField, space_dim: usize, subspace: &[SparseVec]) -> Vec<SparseVec> {
    let mut ech = Echelon::new(f, space_dim);
    for v in subspace {
        ech.insert(v);
    }
    let pivots: std::collections::HashSet<usize> = ech.pivots().iter().copied().collect();
    (0..space_dim)
        .filter(|i| !pivots.contains(i))
        .map(SparseVec::unit)
        .collect()
}

/// A chosen basis of a subquotient `W / R` of `F_p^n`, with coordinate lookup.
#[derive(Clone, Debug)]
pub struct Subquotient {
    reps: Vec<SparseVec>,
    relations: Echelon,
    coords: Echelon,
}

impl Subquotient {
    /// Representatives are picked greedily from `spanning`, in order.
    pub fn new(f: &PrimeField, n: usize, spanning: &[SparseVec], relations: &[SparseVec]) -> Self {
        let mut rel = Echelon::new(f, n);
        for r in relations {
            rel.insert(r);
        }
        let mut probe = rel.clone();
        let mut reps = Vec::new();
        for v in spanning {
            if probe.insert(v) {
                reps.push(v.clone());
            }
        }
        let mut coords = Echelon::with_tags(f, n, reps.len());
        for r in relations {
            coords.insert_tagged(r, None);
        }
        for (k, v) in reps.iter().enumerate() {
            coords.insert_tagged(v, Some(&SparseVec::unit(k)));
        }
        Subquotient {
            reps,
            relations: rel,
            coords,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[SparseVec] {
        &self.reps
    }

    pub fn relations(&self) -> &Echelon {
        &self.relations
    }

    /// Coordinates of the class of `v`; `None` if `v` is not in `W + R`.
    pub fn coordinates(&self, v: &SparseVec) -> Option<SparseVec> {
        self.coords.coordinates(v)
    }

    pub fn is_zero_class(&self, v: &SparseVec) -> bool {
        self.relations.contains(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lucas() {
        assert_eq!(binomial_mod(5, 2, 2), 0);
        assert_eq!(binomial_mod(3, 1, 2), 1);
        assert_eq!(binomial_mod(6, 3, 3), 2);
        assert_eq!(binomial_mod(2, 5, 3), 0);
    }

    #[test]
    fn small_ranks() {
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(rank(&f2, &SparseMat::identity(&f2, 2)), 2);
        assert_eq!(rank(&f2, &SparseMat::zero(3, 4)), 0);
        let row = SparseMat::from_entries(&f2, 1, 2, [(0, 0, 1), (0, 1, 1)]);
        let k = kernel_basis(&f2, &row);
        assert_eq!(k, vec![SparseVec::from_pairs(&f2, [(0, 1), (1, 1)])]);
        assert!(kernel_basis(&f2, &SparseMat::identity(&f2, 3)).is_empty());
    }

    #[test]
    fn quotients() {
        let f2 = PrimeField::new(2).unwrap();
        let q = quotient_basis(&f2, 3, &[SparseVec::unit(0)]);
        assert_eq!(q, vec![SparseVec::unit(1), SparseVec::unit(2)]);
        let all = quotient_basis(&f2, 2, &[SparseVec::unit(0), SparseVec::unit(1)]);
        assert!(all.is_empty());
    }

    #[test]
    fn coordinates_in_subquotient() {
        let f3 = PrimeField::new(3).unwrap();
        let w = vec![
            SparseVec::from_pairs(&f3, [(0, 1), (1, 1)]),
            SparseVec::from_pairs(&f3, [(2, 1)]),
        ];
        let r = vec![SparseVec::from_pairs(&f3, [(1, 1)])];
        let sq = Subquotient::new(&f3, 3, &w, &r);
        assert_eq!(sq.dim(), 2);
        let v = SparseVec::from_pairs(&f3, [(0, 2), (2, 1)]);
        assert_eq!(
            sq.coordinates(&v).unwrap(),
            SparseVec::from_pairs(&f3, [(0, 2), (1, 1)])
        );
    }
}
