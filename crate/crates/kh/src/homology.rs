//! Exact integer linear algebra and the derived invariants: Smith
//! normal form over arbitrary-precision integers, bigraded homology
//! over ℤ and 𝔽_p, the Bockstein Sq¹, graded Euler characteristics,
//! and the independent Kauffman state-sum oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::{resolve, LinkDiagram};
use crate::intmat::IntMat;
use crate::khovanov::BigradedComplex;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("input is not a complex: d^2 != 0 at bidegree ({0}, {1})")]
    NotAComplex(i32, i32),
    #[error("unknown coefficient system {0:?}")]
    UnknownCoefficients(String),
}

// ---------------------------------------------------------------------------
// Smith normal form

/// The Smith normal form of an integer matrix: the nonzero invariant
/// factors `d₁ | d₂ | …` and, when requested, unimodular transforms
/// with `U · M · V` diagonal.
#[derive(Clone, Debug)]
pub struct Snf {
    pub factors: Vec<BigInt>,
    pub u: Option<Vec<Vec<BigInt>>>,
    pub v: Option<Vec<Vec<BigInt>>>,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| **d > BigInt::one()).cloned().collect()
    }
}

struct SnfWork {
    nrows: usize,
    ncols: usize,
    rows: Vec<BTreeMap<usize, BigInt>>,
    cols: Vec<BTreeSet<usize>>,
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
}

impl SnfWork {
    fn new(m: &IntMat, with_transforms: bool) -> Self {
        let mut rows: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); m.rows];
        let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
        for (r, c, val) in m.iter() {
            rows[r].insert(c, BigInt::from(val));
            cols[c].insert(r);
        }
        let ident = |n: usize| -> Vec<Vec<BigInt>> {
            (0..n)
                .map(|i| {
                    (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()
                })
                .collect()
        };
        SnfWork {
            nrows: m.rows,
            ncols: m.cols,
            rows,
            cols,
            u: with_transforms.then(|| ident(m.rows)),
            v: with_transforms.then(|| ident(m.cols)),
        }
    }

    fn get(&self, r: usize, c: usize) -> BigInt {
        self.rows[r].get(&c).cloned().unwrap_or_else(BigInt::zero)
    }

    fn set(&mut self, r: usize, c: usize, val: BigInt) {
        if val.is_zero() {
            self.rows[r].remove(&c);
            self.cols[c].remove(&r);
        } else {
            self.rows[r].insert(c, val);
            self.cols[c].insert(r);
        }
    }

    /// row dst += coeff * row src
    fn row_add(&mut self, dst: usize, src: usize, coeff: &BigInt) {
        let entries: Vec<(usize, BigInt)> =
            self.rows[src].iter().map(|(&c, v)| (c, v.clone())).collect();
        for (c, v) in entries {
            let cur = self.get(dst, c);
            self.set(dst, c, cur + coeff * v);
        }
        if let Some(u) = &mut self.u {
            for j in 0..self.nrows {
                let add = coeff * &u[src][j];
                u[dst][j] += add;
            }
        }
    }

    /// col dst += coeff * col src
    fn col_add(&mut self, dst: usize, src: usize, coeff: &BigInt) {
        let rows_touched: Vec<usize> = self.cols[src].iter().copied().collect();
        for r in rows_touched {
            let v = self.get(r, src);
            let cur = self.get(r, dst);
            self.set(r, dst, cur + coeff * v);
        }
        if let Some(v) = &mut self.v {
            for i in 0..self.ncols {
                let add = coeff * &v[i][src];
                v[i][dst] += add;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for val in self.rows[r].values_mut() {
            *val = -std::mem::take(val);
        }
        if let Some(u) = &mut self.u {
            for x in u[r].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let touched: Vec<usize> = self.rows[a].keys().chain(self.rows[b].keys()).copied().collect();
        self.rows.swap(a, b);
        for c in touched {
            let has_a = self.rows[a].contains_key(&c);
            let has_b = self.rows[b].contains_key(&c);
            if has_a {
                self.cols[c].insert(a);
            } else {
                self.cols[c].remove(&a);
            }
            if has_b {
                self.cols[c].insert(b);
            } else {
                self.cols[c].remove(&b);
            }
        }
        if let Some(u) = &mut self.u {
            u.swap(a, b);
        }
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let touched: Vec<usize> = self.cols[a].union(&self.cols[b]).copied().collect();
        for r in touched {
            let va = self.rows[r].remove(&a);
            let vb = self.rows[r].remove(&b);
            if let Some(v) = va {
                self.rows[r].insert(b, v);
            }
            if let Some(v) = vb {
                self.rows[r].insert(a, v);
            }
        }
        self.cols.swap(a, b);
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                row.swap(a, b);
            }
        }
    }
}

/// Smith normal form with smallest-entry pivoting; `with_transforms`
/// additionally returns unimodular `U`, `V` with `U · M · V` diagonal.
pub fn smith_normal_form(m: &IntMat, with_transforms: bool) -> Snf {
    let mut w = SnfWork::new(m, with_transforms);
    let mut active_rows: BTreeSet<usize> = (0..m.rows).filter(|&r| !w.rows[r].is_empty()).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();

    loop {
        diagonalize(&mut w, &mut active_rows, &mut pivots);
        // enforce the divisibility chain: merge any offending pair and
        // run the elimination again on the touched rows and columns
        let mut merged = false;
        'outer: for i in 0..pivots.len() {
            for j in 0..pivots.len() {
                if i == j {
                    continue;
                }
                let (ri, ci) = pivots[i];
                let (rj, cj) = pivots[j];
                let a = w.get(ri, ci);
                let b = w.get(rj, cj);
                if !(&b % &a).is_zero() {
                    // bring b into a's row and re-reduce the reactivated
                    // 2x2 block; the corner becomes gcd(a, b)
                    w.row_add(ri, rj, &BigInt::one());
                    pivots.retain(|&p| p != (ri, ci) && p != (rj, cj));
                    active_rows.insert(ri);
                    active_rows.insert(rj);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }

    let mut factors: Vec<BigInt> = pivots.iter().map(|&(r, c)| w.get(r, c)).collect();
    factors.sort();
    Snf { factors, u: w.u.take(), v: w.v.take() }
}

fn diagonalize(
    w: &mut SnfWork,
    active_rows: &mut BTreeSet<usize>,
    pivots: &mut Vec<(usize, usize)>,
) {
    loop {
        // pick the pivot: smallest magnitude, then least fill-in
        let mut best: Option<(BigInt, usize, usize, usize)> = None;
        'scan: for &r in active_rows.iter() {
            for (&c, v) in &w.rows[r] {
                let mag = v.abs();
                let fill = (w.rows[r].len() - 1) * (w.cols[c].len() - 1);
                let better = match &best {
                    None => true,
                    Some((bm, bf, _, _)) => mag < *bm || (mag == *bm && fill < *bf),
                };
                if better {
                    let stop = mag.is_one() && fill == 0;
                    best = Some((mag, fill, r, c));
                    if stop {
                        break 'scan;
                    }
                }
            }
        }
        let (pr, pc) = match best {
            None => return,
            Some((_, _, r, c)) => (r, c),
        };

        // clear the pivot column and row with rounded division; any
        // leftover remainder is strictly smaller in magnitude than the
        // pivot, so swapping it into the corner terminates by Euclid
        loop {
            let pv = w.get(pr, pc);
            debug_assert!(!pv.is_zero());
            let col_rows: Vec<usize> = w.cols[pc].iter().copied().filter(|&r| r != pr).collect();
            for r in col_rows {
                let val = w.get(r, pc);
                let q = div_round(&val, &pv);
                if !q.is_zero() {
                    w.row_add(r, pr, &(-q));
                }
            }
            if let Some(r) = w.cols[pc]
                .iter()
                .copied()
                .filter(|&r| r != pr)
                .min_by_key(|&r| w.get(r, pc).abs())
            {
                w.row_swap(pr, r);
                continue;
            }
            // the column holds only the pivot now; clearing the row only
            // touches row pr, so the column stays clear
            let row_cols: Vec<usize> = w.rows[pr].keys().copied().filter(|&c| c != pc).collect();
            for c in row_cols {
                let val = w.get(pr, c);
                let q = div_round(&val, &pv);
                if !q.is_zero() {
                    w.col_add(c, pc, &(-q));
                }
            }
            if let Some(c) = w.rows[pr]
                .keys()
                .copied()
                .filter(|&c| c != pc)
                .min_by_key(|&c| w.get(pr, c).abs())
            {
                w.col_swap(pc, c);
                continue;
            }
            break;
        }

        if w.get(pr, pc).is_negative() {
            w.negate_row(pr);
        }
        pivots.push((pr, pc));
        active_rows.remove(&pr);
        let empty: Vec<usize> =
            active_rows.iter().copied().filter(|&r| w.rows[r].is_empty()).collect();
        for r in empty {
            active_rows.remove(&r);
        }
    }
}

/// Rounded division: minimizes the remainder magnitude.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let two_r = BigInt::from(2) * r.abs();
    if two_r > b.abs() {
        if a.is_negative() == b.is_negative() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Rank of an integer matrix modulo a prime.
pub fn rank_mod_p(m: &IntMat, p: u64) -> usize {
    let pi = p as i128;
    let mut rows: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); m.rows];
    for (r, c, v) in m.iter() {
        let val = (((v as i128) % pi + pi) % pi) as u64;
        if val != 0 {
            rows[r].insert(c, val);
        }
    }
    let mut rank = 0;
    let mut active: Vec<BTreeMap<usize, u64>> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    while !active.is_empty() {
        let best_idx = (0..active.len()).min_by_key(|&i| active[i].len()).unwrap();
        let pivot_row = active.swap_remove(best_idx);
        let (&pc, &pv) = pivot_row.iter().next().unwrap();
        rank += 1;
        let inv = mod_inverse(pv, p);
        for row in active.iter_mut() {
            if let Some(&val) = row.get(&pc) {
                let factor = (val as u128 * inv as u128 % p as u128) as u64;
                for (&c, &v) in &pivot_row {
                    let cur = row.get(&c).copied().unwrap_or(0);
                    let sub = (v as u128 * factor as u128 % p as u128) as u64;
                    let new = (cur + p - sub) % p;
                    if new == 0 {
                        row.remove(&c);
                    } else {
                        row.insert(c, new);
                    }
                }
            }
        }
        active.retain(|r| !r.is_empty());
    }
    rank
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "not invertible mod p");
    (((t % p as i128) + p as i128) % p as i128) as u64
}

// ---------------------------------------------------------------------------
// bigraded homology

/// A finitely generated abelian group: free rank and invariant factors
/// greater than one, in divisibility order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroupSummary {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroupSummary {
    pub fn free(rank: usize) -> Self {
        AbelianGroupSummary { free_rank: rank, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn two_torsion_count(&self) -> usize {
        self.torsion.iter().filter(|d| (*d % BigInt::from(2)).is_zero()).count()
    }
}

impl fmt::Display for AbelianGroupSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

pub type IntegralTable = BTreeMap<(i32, i32), AbelianGroupSummary>;
pub type DimensionTable = BTreeMap<(i32, i32), usize>;

/// Bigraded homology over ℤ via Smith normal forms of the adjacent
/// differentials.
pub fn bigraded_homology_z(c: &BigradedComplex) -> Result<IntegralTable, HomologyError> {
    validate(c)?;
    let keys: Vec<(i32, i32)> = c.gens.keys().copied().collect();
    let snfs: BTreeMap<(i32, i32), Snf> = keys
        .par_iter()
        .map(|&(i, j)| ((i, j), smith_normal_form(&c.differential(i, j), false)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let mut table = IntegralTable::new();
    for &(i, j) in &keys {
        let dim = c.dim(i, j);
        let rank_out = snfs.get(&(i, j)).map_or(0, |s| s.rank());
        let incoming = snfs.get(&(i - 1, j));
        let rank_in = incoming.map_or(0, |s| s.rank());
        let torsion = incoming.map_or_else(Vec::new, |s| s.torsion());
        let summary = AbelianGroupSummary { free_rank: dim - rank_out - rank_in, torsion };
        if !summary.is_trivial() {
            table.insert((i, j), summary);
        }
    }
    Ok(table)
}

/// Bigraded homology dimensions over 𝔽_p.
pub fn bigraded_homology_fp(c: &BigradedComplex, p: u64) -> Result<DimensionTable, HomologyError> {
    validate(c)?;
    let keys: Vec<(i32, i32)> = c.gens.keys().copied().collect();
    let ranks: BTreeMap<(i32, i32), usize> = keys
        .par_iter()
        .map(|&(i, j)| ((i, j), rank_mod_p(&c.differential(i, j), p)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let mut table = DimensionTable::new();
    for &(i, j) in &keys {
        let dim = c.dim(i, j)
            - ranks.get(&(i, j)).copied().unwrap_or(0)
            - ranks.get(&(i - 1, j)).copied().unwrap_or(0);
        if dim > 0 {
            table.insert((i, j), dim);
        }
    }
    Ok(table)
}

fn validate(c: &BigradedComplex) -> Result<(), HomologyError> {
    for &(i, j) in c.d.keys() {
        if !c.differential(i + 1, j).mul(&c.differential(i, j)).is_zero() {
            return Err(HomologyError::NotAComplex(i, j));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// coefficient systems (strategy registry for the CLI)

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomologyTable {
    Integral(IntegralTable),
    Field { p: u64, dims: DimensionTable },
}

/// A coefficient system for homology computations, selected by name at
/// run time: `Z`, `F2`, or `Fp:<p>`.
pub trait CoefficientSystem: Send + Sync {
    fn name(&self) -> String;
    fn homology(&self, c: &BigradedComplex) -> Result<HomologyTable, HomologyError>;
}

pub struct IntegerCoefficients;

impl CoefficientSystem for IntegerCoefficients {
    fn name(&self) -> String {
        "Z".into()
    }

    fn homology(&self, c: &BigradedComplex) -> Result<HomologyTable, HomologyError> {
        Ok(HomologyTable::Integral(bigraded_homology_z(c)?))
    }
}

pub struct PrimeField(pub u64);

impl CoefficientSystem for PrimeField {
    fn name(&self) -> String {
        if self.0 == 2 {
            "F2".into()
        } else {
            format!("Fp:{}", self.0)
        }
    }

    fn homology(&self, c: &BigradedComplex) -> Result<HomologyTable, HomologyError> {
        Ok(HomologyTable::Field { p: self.0, dims: bigraded_homology_fp(c, self.0)? })
    }
}

fn is_prime(n: u64) -> bool {
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

/// Looks up a coefficient system by its registry name.
pub fn coefficient_system(spec: &str) -> Result<Box<dyn CoefficientSystem>, HomologyError> {
    match spec {
        "Z" => Ok(Box::new(IntegerCoefficients)),
        "F2" => Ok(Box::new(PrimeField(2))),
        other => {
            if let Some(ps) = other.strip_prefix("Fp:") {
                if let Ok(p) = ps.parse::<u64>() {
                    if is_prime(p) {
                        return Ok(Box::new(PrimeField(p)));
                    }
                }
            }
            Err(HomologyError::UnknownCoefficients(other.to_string()))
        }
    }
}

// ---------------------------------------------------------------------------
// the Bockstein

/// Packed 𝔽₂ vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    fn zero(len: usize) -> Self {
        BitVec { len, words: vec![0; len.div_ceil(64)] }
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    fn leading(&self) -> Option<usize> {
        for (w, &word) in self.words.iter().enumerate() {
            if word != 0 {
                return Some(w * 64 + word.trailing_zeros() as usize);
            }
        }
        None
    }

    fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn ones(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }
}

/// An 𝔽₂ echelon basis with coefficient tracking over marked
/// insertions.
struct F2Echelon {
    /// (leading index, vector, coordinates over marked insertions)
    rows: Vec<(usize, BitVec, BitVec)>,
    marked: usize,
    capacity: usize,
}

impl F2Echelon {
    fn new(capacity: usize) -> Self {
        F2Echelon { rows: Vec::new(), marked: 0, capacity }
    }

    /// Reduces `v` against the basis; returns the remainder and the
    /// accumulated coordinates over marked insertions.
    fn reduce(&self, mut v: BitVec) -> (BitVec, BitVec) {
        let mut coeffs = BitVec::zero(self.capacity.max(1));
        loop {
            let lead = match v.leading() {
                None => return (v, coeffs),
                Some(l) => l,
            };
            match self.rows.iter().find(|(l, _, _)| *l == lead) {
                None => return (v, coeffs),
                Some((_, basis, c)) => {
                    v.xor_assign(basis);
                    coeffs.xor_assign(c);
                }
            }
        }
    }

    /// Inserts `v`, optionally marking it as a tracked generator;
    /// returns false when `v` was already in the span.
    fn insert(&mut self, v: BitVec, mark: bool) -> bool {
        let (rem, mut coeffs) = self.reduce(v);
        let idx = self.marked;
        if mark {
            self.marked += 1;
        }
        if rem.is_zero() {
            return false;
        }
        if mark {
            coeffs.flip(idx);
        }
        let lead = rem.leading().unwrap();
        self.rows.push((lead, rem, coeffs));
        true
    }
}

fn intmat_cols_mod2(m: &IntMat, rows: usize) -> Vec<BitVec> {
    let mut cols = vec![BitVec::zero(rows.max(1)); m.cols];
    for (r, c, v) in m.iter() {
        if v % 2 != 0 {
            cols[c].flip(r);
        }
    }
    cols
}

/// Deterministic mod-2 cycle representatives of `H^{i,j}(𝔽₂)`: kernel
/// vectors of the outgoing differential, reduced against the incoming
/// image, in kernel-basis order.
fn f2_homology_reps(c: &BigradedComplex, i: i32, j: i32) -> Vec<BitVec> {
    let dim = c.dim(i, j);
    if dim == 0 {
        return Vec::new();
    }
    let d_out = c.differential(i, j);
    let d_in = c.differential(i - 1, j);

    // kernel of d_out over F2 by column reduction with unit tracking
    let mut work = intmat_cols_mod2(&d_out, d_out.rows);
    let mut track: Vec<BitVec> = (0..dim)
        .map(|k| {
            let mut v = BitVec::zero(dim);
            v.set(k);
            v
        })
        .collect();
    let mut used_lead: BTreeMap<usize, usize> = BTreeMap::new();
    let mut kernel: Vec<BitVec> = Vec::new();
    for k in 0..dim {
        loop {
            let lead = match work[k].leading() {
                None => {
                    kernel.push(track[k].clone());
                    break;
                }
                Some(l) => l,
            };
            match used_lead.get(&lead) {
                None => {
                    used_lead.insert(lead, k);
                    break;
                }
                Some(&prev) => {
                    let (pw, pt) = (work[prev].clone(), track[prev].clone());
                    work[k].xor_assign(&pw);
                    track[k].xor_assign(&pt);
                }
            }
        }
    }

    // quotient by the image of d_in over F2
    let mut ech = F2Echelon::new(0);
    for col in intmat_cols_mod2(&d_in, dim) {
        ech.insert(col, false);
    }
    let mut reps = Vec::new();
    for v in kernel {
        if ech.insert(v.clone(), false) {
            reps.push(v);
        }
    }
    reps
}

/// The Bockstein `Sq¹ : H^{i,j}(𝔽₂) → H^{i+1,j}(𝔽₂)`: matrices over the
/// deterministic representative bases, computed by lifting each cycle
/// to ℤ, applying the integral differential, halving, and projecting
/// back to homology.
#[derive(Clone, Debug)]
pub struct Bockstein {
    /// dimensions of `H^{i,j}(𝔽₂)` in the chosen bases
    pub dims: DimensionTable,
    /// matrix of Sq¹ out of `(i, j)`: rows index the `(i+1, j)` basis
    pub maps: BTreeMap<(i32, i32), Vec<Vec<u8>>>,
}

impl Bockstein {
    pub fn rank(&self, i: i32, j: i32) -> usize {
        match self.maps.get(&(i, j)) {
            None => 0,
            Some(m) => {
                let cols = m.first().map_or(0, |r| r.len());
                let entries = m.iter().enumerate().flat_map(|(r, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, &v)| v != 0)
                        .map(move |(c, &v)| (r, c, v as i64))
                });
                rank_mod_p(&IntMat::from_entries(m.len(), cols, entries), 2)
            }
        }
    }

    pub fn total_rank(&self) -> usize {
        self.maps.keys().map(|&(i, j)| self.rank(i, j)).sum()
    }

    /// `Sq¹ ∘ Sq¹ = 0` in every bidegree.
    pub fn squares_to_zero(&self) -> bool {
        for (&(i, j), m1) in &self.maps {
            if let Some(m2) = self.maps.get(&(i + 1, j)) {
                let cols = m1.first().map_or(0, |r| r.len());
                let mid = m1.len();
                let rows = m2.len();
                for c in 0..cols {
                    for r in 0..rows {
                        let mut acc = 0u8;
                        for k in 0..mid.min(m2.first().map_or(0, |x| x.len())) {
                            acc ^= m2[r][k] & m1[k][c];
                        }
                        if acc != 0 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

pub fn bockstein(c: &BigradedComplex) -> Result<Bockstein, HomologyError> {
    validate(c)?;
    let keys: Vec<(i32, i32)> = c.gens.keys().copied().collect();
    let reps: BTreeMap<(i32, i32), Vec<BitVec>> = keys
        .par_iter()
        .map(|&(i, j)| ((i, j), f2_homology_reps(c, i, j)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    let mut dims = DimensionTable::new();
    for (&(i, j), r) in &reps {
        if !r.is_empty() {
            dims.insert((i, j), r.len());
        }
    }

    let mut maps = BTreeMap::new();
    for &(i, j) in &keys {
        let src = match reps.get(&(i, j)) {
            Some(r) if !r.is_empty() => r,
            _ => continue,
        };
        let tgt = reps.get(&(i + 1, j)).map_or(&[][..], |r| r.as_slice());
        let d_int = c.differential(i, j);
        let next_dim = c.dim(i + 1, j);

        // echelon of image(d^{i,j} mod 2), then the marked homology basis
        // of (i+1, j); reducing a cycle yields its homology coordinates
        let mut ech = F2Echelon::new(tgt.len());
        for col in intmat_cols_mod2(&d_int, next_dim) {
            ech.insert(col, false);
        }
        for rep in tgt {
            ech.insert(rep.clone(), true);
        }

        let mut mat = vec![vec![0u8; src.len()]; tgt.len()];
        for (col, rep) in src.iter().enumerate() {
            // integral lift with 0/1 entries
            let lift: Vec<i64> = (0..c.dim(i, j)).map(|k| rep.get(k) as i64).collect();
            let w = d_int.apply(&lift);
            let mut half = BitVec::zero(next_dim.max(1));
            for (r, &val) in w.iter().enumerate() {
                assert!(val % 2 == 0, "lift of a mod-2 cycle must map to even chains");
                if (val / 2) % 2 != 0 {
                    half.set(r);
                }
            }
            let (rem, coords) = ech.reduce(half);
            assert!(rem.is_zero(), "Bockstein image must be a cycle modulo boundaries");
            for row in coords.ones() {
                if row < tgt.len() {
                    mat[row][col] = 1;
                }
            }
        }
        if !mat.is_empty() {
            maps.insert((i, j), mat);
        }
    }
    Ok(Bockstein { dims, maps })
}

// ---------------------------------------------------------------------------
// Laurent polynomials, Euler characteristics, the Kauffman oracle

/// A Laurent polynomial in one variable with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(0, 1)
    }

    pub fn monomial(exp: i64, coeff: i64) -> Self {
        let mut p = LaurentPoly::default();
        p.add_term(exp, coeff);
        p
    }

    pub fn add_term(&mut self, exp: i64, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let e = self.coeffs.entry(exp).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.coeffs.remove(&exp);
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, &c) in &other.coeffs {
            out.add_term(e, c);
        }
        out
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::default();
        for (&e1, &c1) in &self.coeffs {
            for (&e2, &c2) in &other.coeffs {
                out.add_term(e1 + e2, c1.checked_mul(c2).expect("coefficient overflow"));
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> LaurentPoly {
        let mut out = LaurentPoly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Substitutes `q ↦ q⁻¹`.
    pub fn invert_variable(&self) -> LaurentPoly {
        let mut out = LaurentPoly::default();
        for (&e, &c) in &self.coeffs {
            out.add_term(-e, c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact division in ℤ[q^{±1}], when the quotient exists.
    pub fn div_exact(&self, divisor: &LaurentPoly) -> Option<LaurentPoly> {
        if divisor.is_zero() {
            return None;
        }
        let mut rem = self.clone();
        let mut out = LaurentPoly::default();
        let (&dlead, &dc) = divisor.coeffs.iter().next_back().unwrap();
        while !rem.is_zero() {
            let (&rlead, &rc) = rem.coeffs.iter().next_back().unwrap();
            if rc % dc != 0 {
                return None;
            }
            let exp = rlead - dlead;
            let coeff = rc / dc;
            out.add_term(exp, coeff);
            rem = rem.add(&divisor.mul(&LaurentPoly::monomial(exp, -coeff)));
        }
        Some(out)
    }

    /// Evaluates at an integer point; the polynomial may be Laurent as
    /// long as `x = ±1`.
    pub fn eval_unit(&self, x: i64) -> i64 {
        assert!(x == 1 || x == -1);
        let mut acc = 0i64;
        for (&e, &c) in &self.coeffs {
            let sign = if x == -1 && e.rem_euclid(2) == 1 { -1 } else { 1 };
            acc += c * sign;
        }
        acc
    }

    /// Divides all exponents by two (for passing from `q` to `q²`);
    /// fails if an odd exponent appears.
    pub fn halve_exponents(&self) -> Option<LaurentPoly> {
        let mut out = LaurentPoly::default();
        for (&e, &c) in &self.coeffs {
            if e % 2 != 0 {
                return None;
            }
            out.add_term(e / 2, c);
        }
        Some(out)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, &c) in &self.coeffs {
            if first {
                first = false;
                write!(f, "{c}*q^{e}")?;
            } else if c >= 0 {
                write!(f, " + {c}*q^{e}")?;
            } else {
                write!(f, " - {}*q^{e}", -c)?;
            }
        }
        Ok(())
    }
}

/// The graded Euler characteristic `Σ (−1)^i q^j · dim C^{i,j}`,
/// computed at basis level.
pub fn graded_euler(c: &BigradedComplex) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    for (&(i, j), gens) in &c.gens {
        let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
        p.add_term(j as i64, sign * gens.len() as i64);
    }
    p
}

/// The Kauffman state sum
/// `(−1)^{n₋} q^{n₊−2n₋} · Σ_v (−q)^{|v|} (q+q⁻¹)^{#circles(v)}`,
/// computed from circle counts alone.
pub fn kauffman_oracle(d: &LinkDiagram) -> LaurentPoly {
    let n = d.num_crossings();
    let loop_poly = LaurentPoly::monomial(1, 1).add(&LaurentPoly::monomial(-1, 1));
    let circle_counts: Vec<usize> = (0u32..(1u32 << n))
        .into_par_iter()
        .map(|v| resolve(d, v).expect("vertex in range").num_circles())
        .collect();
    let mut body = LaurentPoly::zero();
    for (v, &circles) in circle_counts.iter().enumerate() {
        let w = (v as u32).count_ones() as i64;
        let sign = if w % 2 == 0 { 1 } else { -1 };
        body = body.add(&loop_poly.pow(circles).mul(&LaurentPoly::monomial(w, sign)));
    }
    let shift_sign = if d.n_minus() % 2 == 0 { 1 } else { -1 };
    let shift = LaurentPoly::monomial(d.n_plus() as i64 - 2 * d.n_minus() as i64, shift_sign);
    body.mul(&shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;
    use crate::khovanov::khovanov_complex;

    fn snf_factors(m: &IntMat) -> Vec<i64> {
        smith_normal_form(m, false)
            .factors
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect()
    }

    #[test]
    fn snf_trivial_cases() {
        assert_eq!(snf_factors(&IntMat::from_dense(&[vec![2]])), vec![2]);
        assert_eq!(snf_factors(&IntMat::from_dense(&[vec![1, 1], vec![1, 1]])), vec![1]);
        assert_eq!(snf_factors(&IntMat::zero(3, 2)), Vec::<i64>::new());
    }

    #[test]
    fn snf_divisibility_chain() {
        assert_eq!(snf_factors(&IntMat::from_dense(&[vec![2, 4], vec![6, 8]])), vec![2, 4]);
        // diag(2, 3) must become 1 | 6
        assert_eq!(snf_factors(&IntMat::from_dense(&[vec![2, 0], vec![0, 3]])), vec![1, 6]);
        // diag(2, 6, 10): gcds of minors give 2 | 2 | 30
        assert_eq!(
            snf_factors(&IntMat::from_dense(&[vec![2, 0, 0], vec![0, 6, 0], vec![0, 0, 10]])),
            vec![2, 2, 30]
        );
    }

    #[test]
    fn snf_transforms_diagonalize() {
        let m = IntMat::from_dense(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let snf = smith_normal_form(&m, true);
        let u = snf.u.clone().unwrap();
        let v = snf.v.clone().unwrap();
        let mut prod = vec![vec![BigInt::zero(); 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                let mut acc = BigInt::zero();
                for k in 0..3 {
                    for l in 0..3 {
                        acc += &u[r][k] * BigInt::from(m.get(k, l)) * &v[l][c];
                    }
                }
                prod[r][c] = acc;
            }
        }
        let mut diag: Vec<BigInt> = Vec::new();
        for r in 0..3 {
            for c in 0..3 {
                if r != c {
                    assert!(prod[r][c].is_zero(), "off-diagonal ({r},{c}) = {}", prod[r][c]);
                } else if !prod[r][c].is_zero() {
                    diag.push(prod[r][c].abs());
                }
            }
        }
        diag.sort();
        assert_eq!(diag, snf.factors);
    }

    #[test]
    fn rank_mod_p_small() {
        let m = IntMat::from_dense(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(rank_mod_p(&m, 2), 0);
        assert_eq!(rank_mod_p(&m, 3), 2);
        assert_eq!(rank_mod_p(&IntMat::zero(2, 2), 5), 0);
    }

    #[test]
    fn unknot_homology() {
        let d = parse_pd("U").unwrap();
        let c = khovanov_complex(&d).unwrap();
        let t = bigraded_homology_z(&c).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[&(0, 1)], AbelianGroupSummary::free(1));
        assert_eq!(t[&(0, -1)], AbelianGroupSummary::free(1));
    }

    #[test]
    fn kink_homology_is_unknot() {
        for pd in ["X[1,2,2,1]", "X[2,2,1,1]"] {
            let d = parse_pd(pd).unwrap();
            let c = khovanov_complex(&d).unwrap();
            let t = bigraded_homology_z(&c).unwrap();
            assert_eq!(t.len(), 2, "kink {pd} gives {t:?}");
            assert_eq!(t.get(&(0, 1)), Some(&AbelianGroupSummary::free(1)), "kink {pd}");
            assert_eq!(t.get(&(0, -1)), Some(&AbelianGroupSummary::free(1)), "kink {pd}");
        }
    }

    #[test]
    fn bockstein_on_multiplication_by_two() {
        // complex Z --2--> Z concentrated in (0, 0) -> (1, 0)
        use crate::khovanov::Labeling;
        let mut gens = BTreeMap::new();
        gens.insert((0, 0), vec![Labeling { vertex: 0, mask: 0 }]);
        gens.insert((1, 0), vec![Labeling { vertex: 1, mask: 0 }]);
        let mut dm = BTreeMap::new();
        dm.insert((0, 0), IntMat::from_dense(&[vec![2]]));
        let c = BigradedComplex { gens, d: dm };
        let b = bockstein(&c).unwrap();
        assert_eq!(b.dims.get(&(0, 0)), Some(&1));
        assert_eq!(b.dims.get(&(1, 0)), Some(&1));
        assert_eq!(b.maps[&(0, 0)], vec![vec![1u8]]);
        assert!(b.squares_to_zero());
    }

    #[test]
    fn bockstein_zero_differential() {
        use crate::khovanov::Labeling;
        let mut gens = BTreeMap::new();
        gens.insert(
            (0, 0),
            vec![Labeling { vertex: 0, mask: 0 }, Labeling { vertex: 0, mask: 1 }],
        );
        let c = BigradedComplex { gens, d: BTreeMap::new() };
        let b = bockstein(&c).unwrap();
        assert_eq!(b.dims.get(&(0, 0)), Some(&2));
        assert_eq!(b.total_rank(), 0);
    }

    #[test]
    fn laurent_arithmetic() {
        let q = LaurentPoly::monomial(1, 1);
        let qinv = LaurentPoly::monomial(-1, 1);
        let loop_poly = q.add(&qinv);
        assert_eq!(
            loop_poly.pow(2).terms().collect::<Vec<_>>(),
            vec![(-2, 1), (0, 2), (2, 1)]
        );
        let prod = loop_poly.mul(&loop_poly);
        assert_eq!(prod.div_exact(&loop_poly), Some(loop_poly.clone()));
        assert_eq!(loop_poly.invert_variable(), loop_poly);
    }

    #[test]
    fn kauffman_unknot_and_unlink() {
        let u = parse_pd("U").unwrap();
        let p = kauffman_oracle(&u);
        assert_eq!(p.terms().collect::<Vec<_>>(), vec![(-1, 1), (1, 1)]);
        let uu = u.disjoint_union(&u);
        assert_eq!(kauffman_oracle(&uu), p.mul(&p));
    }

    #[test]
    fn euler_matches_kauffman_on_trefoil() {
        let d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        let c = khovanov_complex(&d).unwrap();
        assert_eq!(graded_euler(&c), kauffman_oracle(&d));
        // the left-handed trefoil state sum: q^-1 + q^-3 + q^-5 - q^-9
        assert_eq!(
            kauffman_oracle(&d).terms().collect::<Vec<_>>(),
            vec![(-9, -1), (-5, 1), (-3, 1), (-1, 1)]
        );
    }

    #[test]
    fn euler_of_dual_inverts_variable() {
        let d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        let m = d.mirror();
        let e = graded_euler(&khovanov_complex(&d).unwrap());
        let em = graded_euler(&khovanov_complex(&m).unwrap());
        assert_eq!(em, e.invert_variable());
    }

    #[test]
    fn coefficient_registry() {
        assert_eq!(coefficient_system("Z").unwrap().name(), "Z");
        assert_eq!(coefficient_system("F2").unwrap().name(), "F2");
        assert_eq!(coefficient_system("Fp:7").unwrap().name(), "Fp:7");
        assert!(coefficient_system("Fp:6").is_err());
        assert!(coefficient_system("Q").is_err());
    }
}
