//! Independent coefficients of the rotational-average operator.
//!
//! For odd rank `n` the operator is block diagonal over epsilon triples, and
//! every block is the same `(m-1)!! x (m-1)!!` matrix `A` over the perfect
//! matchings of `m = n - 3` positions. Entries of `A` depend only on the
//! [`PairClass`] of the two matchings. The class values are fixed by one
//! equation per odd partition `(q, r, s)`, obtained by evaluating both sides
//! at the diagonal component `x^q y^r z^s`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    check_rank, complement, enumerate_matchings, epsilon_triples, levi_civita, odd_partitions, pair_class, IndexTuple,
    Matching, OddIsoTensor, OddPartition, PairClass,
};
use crate::error::{Error, Result};
use crate::exact::{binomial, denominator_lcm, double_factorial, solve_linear_exact, LinearSolution, Rational};

fn odd_positive(v: i64) -> Result<()> {
    if v < 1 || v % 2 == 0 {
        return Err(Error::NotOddPositive(v));
    }
    Ok(())
}

fn dfact(k: i64) -> Rational {
    Rational::from(double_factorial(k).expect("argument >= -1"))
}

/// The closed form evaluated exactly as written, without reordering.
pub(crate) fn closed_form(q: i64, r: i64, s: i64) -> Rational {
    let prefactor = dfact(r + s).checked_div(&(dfact(q + r) * dfact(q + s))).expect("double factorials are positive");
    let mut sum = Rational::zero();
    for i in 0..=(q - 1) / 2 {
        let lead = dfact(q - 2 * i - 2);
        let numer =
            Rational::from(binomial(q as u64, 2 * i + 1)) * &lead * &lead * &lead * dfact(2 * i + r) * dfact(2 * i + s);
        sum += numer.checked_div(&dfact(q + r + s - 2 * i)).expect("positive");
    }
    prefactor * sum
}

/// `I(q, r, s) = <l_xx^q l_yy^r l_zz^s>` for odd `q`, `r`, `s`.
pub fn diag_average(q: i64, r: i64, s: i64) -> Result<Rational> {
    for v in [q, r, s] {
        odd_positive(v)?;
    }
    let mut args = [q, r, s];
    args.sort_unstable();
    Ok(closed_form(args[0], args[1], args[2]))
}

/// Matchings of `1..=m` with the class of every ordered pair precomputed.
#[derive(Debug, Clone)]
pub struct InnerBasis {
    pub size: usize,
    pub matchings: Vec<Matching>,
    pub classes: Vec<PairClass>,
    class_index: Vec<Vec<u8>>,
}

impl InnerBasis {
    pub fn new(size: usize) -> Result<Self> {
        let positions: Vec<u8> = (1..=size as u8).collect();
        let matchings = enumerate_matchings(&positions)?;
        let mut table = Vec::with_capacity(matchings.len());
        let mut classes: BTreeSet<PairClass> = BTreeSet::new();
        for a in &matchings {
            let row: Vec<PairClass> = matchings.iter().map(|b| pair_class(a, b)).collect::<Result<_>>()?;
            classes.extend(row.iter().cloned());
            table.push(row);
        }
        let classes: Vec<PairClass> = classes.into_iter().collect();
        let class_index = table
            .into_iter()
            .map(|row| row.iter().map(|c| classes.binary_search(c).expect("collected above") as u8).collect())
            .collect();
        Ok(InnerBasis { size, matchings, classes, class_index })
    }

    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    pub fn class_of(&self, r: usize, alpha: usize) -> &PairClass {
        &self.classes[self.class_index[r][alpha] as usize]
    }

    pub(crate) fn class_index(&self, r: usize, alpha: usize) -> usize {
        self.class_index[r][alpha] as usize
    }

    /// Which matchings have all deltas satisfied by `sub` (a tuple of length `size`).
    pub fn delta_mask(&self, sub: &IndexTuple) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.matchings[i].delta(sub)).collect()
    }
}

/// Signed number of basis pairs per class contributing to the entry
/// `(lab, mol)`, summed over all blocks.
pub(crate) fn class_counts(n: usize, inner: &InnerBasis, lab: &IndexTuple, mol: &IndexTuple) -> Vec<i64> {
    let triples = epsilon_triples(n);
    triples.par_iter().map(|t| block_counts(n, inner, t, lab, mol)).reduce(
        || vec![0i64; inner.classes.len()],
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )
}

fn block_counts(n: usize, inner: &InnerBasis, t: &[u8; 3], lab: &IndexTuple, mol: &IndexTuple) -> Vec<i64> {
    let mut counts = vec![0i64; inner.classes.len()];
    let sign = |idx: &IndexTuple| levi_civita(idx.at(t[0]), idx.at(t[1]), idx.at(t[2])) as i64;
    let sign = sign(lab) * sign(mol);
    if sign == 0 {
        return counts;
    }
    let rest = complement(n, t);
    let sub = |idx: &IndexTuple| IndexTuple(rest.iter().map(|&p| idx.at(p)).collect());
    let rows = inner.delta_mask(&sub(lab));
    let cols = inner.delta_mask(&sub(mol));
    for &r in &rows {
        for &a in &cols {
            counts[inner.class_index(r, a)] += sign;
        }
    }
    counts
}

/// One linear equation `sum_c count_c * value_c = I(q, r, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationRow {
    pub partition: OddPartition,
    pub class_counts: BTreeMap<PairClass, i64>,
    pub rhs: Rational,
}

fn assemble_with(n: usize, inner: &InnerBasis, p: OddPartition) -> Result<EquationRow> {
    let tuple = p.diagonal_tuple();
    let counts = class_counts(n, inner, &tuple, &tuple);
    let class_counts = inner.classes.iter().zip(counts).filter(|&(_, c)| c != 0).map(|(k, c)| (k.clone(), c)).collect();
    let rhs = diag_average(p.q as i64, p.r as i64, p.s as i64)?;
    Ok(EquationRow { partition: p, class_counts, rhs })
}

pub fn assemble_equation(n: usize, p: OddPartition) -> Result<EquationRow> {
    check_rank(n)?;
    if p.rank() != n {
        return Err(Error::InvalidPartition { n, q: p.q, r: p.r, s: p.s });
    }
    OddPartition::new(n, p.q, p.r, p.s)?;
    assemble_with(n, &InnerBasis::new(n - 3)?, p)
}

/// Classes pinned to zero for inner size `m`.
///
/// On eight points the cycle types number five while only four coefficients
/// are independent; the single 8-cycle carries zero.
pub fn zero_classes(m: usize) -> BTreeSet<PairClass> {
    match m {
        8 => BTreeSet::from([PairClass::new(vec![4])]),
        _ => BTreeSet::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTable {
    pub rank: usize,
    pub inner_rank: usize,
    pub class_values: BTreeMap<PairClass, Rational>,
    pub zero_classes: BTreeSet<PairClass>,
    pub letters: Vec<(PairClass, char)>,
}

impl CoefficientTable {
    pub fn value(&self, class: &PairClass) -> Rational {
        self.class_values.get(class).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn letter(&self, class: &PairClass) -> Option<char> {
        self.letters.iter().find(|(c, _)| c == class).map(|&(_, l)| l)
    }

    /// Solved values in letter order.
    pub fn letter_values(&self) -> Vec<Rational> {
        self.letters.iter().map(|(c, _)| self.value(c)).collect()
    }

    pub fn denominator_lcm(&self) -> BigInt {
        denominator_lcm(self.class_values.values())
    }

    /// E.g. `(38,-7,2)/22680`.
    pub fn summary(&self) -> String {
        let d = Rational::from(self.denominator_lcm());
        let numerators: Vec<String> = self.letter_values().iter().map(|v| (v * &d).to_string()).collect();
        format!("({})/{}", numerators.join(","), d)
    }

    /// Substitutes the table into an equation and returns the left-hand side.
    pub fn evaluate(&self, row: &EquationRow) -> Rational {
        row.class_counts.iter().map(|(c, &k)| Rational::from(k) * self.value(c)).sum()
    }

    pub fn to_json(&self) -> CoefficientTableJson {
        let classes = self
            .class_values
            .iter()
            .map(|(c, v)| ClassEntryJson {
                partition: c.parts().to_vec(),
                letter: self.letter(c).map(String::from),
                value: v.clone(),
            })
            .collect();
        CoefficientTableJson {
            rank: self.rank,
            denominator_lcm: self.denominator_lcm().try_into().expect("denominator fits in u64"),
            classes,
        }
    }
}

impl fmt::Display for CoefficientTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank {} (inner rank {})", self.rank, self.inner_rank)?;
        for (c, v) in &self.class_values {
            let letter = self.letter(c).map_or("0".to_string(), |l| l.to_string());
            writeln!(f, "  {letter:>2}  {c:<10} {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntryJson {
    pub partition: Vec<u8>,
    pub letter: Option<String>,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientTableJson {
    pub rank: usize,
    pub denominator_lcm: u64,
    pub classes: Vec<ClassEntryJson>,
}

/// Letters follow the order in which classes first appear across `rows`.
fn letter_order(rows: &[EquationRow], zero: &BTreeSet<PairClass>, all: &[PairClass]) -> Vec<PairClass> {
    let mut order: Vec<PairClass> = Vec::new();
    for row in rows {
        for c in row.class_counts.keys() {
            if !zero.contains(c) && !order.contains(c) {
                order.push(c.clone());
            }
        }
    }
    // Classes absent from every equation still need a column; the solve
    // will report the system as underdetermined.
    for c in all {
        if !zero.contains(c) && !order.contains(c) {
            order.push(c.clone());
        }
    }
    order
}

pub fn solve_coefficients(n: usize) -> Result<CoefficientTable> {
    check_rank(n)?;
    let m = n - 3;
    let inner = InnerBasis::new(m)?;
    let rows: Vec<EquationRow> =
        odd_partitions(n)?.into_iter().map(|p| assemble_with(n, &inner, p)).collect::<Result<_>>()?;
    let zero = zero_classes(m);
    let unknowns = letter_order(&rows, &zero, &inner.classes);

    let matrix: Vec<Vec<Rational>> = rows
        .iter()
        .map(|row| unknowns.iter().map(|c| Rational::from(row.class_counts.get(c).copied().unwrap_or(0))).collect())
        .collect();
    let rhs: Vec<Rational> = rows.iter().map(|r| r.rhs.clone()).collect();
    let values = match solve_linear_exact(&matrix, &rhs)? {
        LinearSolution::Unique(x) => x,
        other => return Err(Error::Unsolvable { rank: n, verdict: other.verdict() }),
    };

    let mut class_values: BTreeMap<PairClass, Rational> = unknowns.iter().cloned().zip(values).collect();
    for c in &zero {
        class_values.insert(c.clone(), Rational::zero());
    }
    let letters = unknowns.into_iter().zip('a'..='z').collect();
    Ok(CoefficientTable { rank: n, inner_rank: m, class_values, zero_classes: zero, letters })
}

/// All equations for rank `n`, in partition order.
pub fn equations(n: usize) -> Result<Vec<EquationRow>> {
    check_rank(n)?;
    let inner = InnerBasis::new(n - 3)?;
    odd_partitions(n)?.into_iter().map(|p| assemble_with(n, &inner, p)).collect()
}

/// The operator `E (x) A` over the overcomplete basis.
#[derive(Debug, Clone)]
pub struct BlockDiagonalAverage {
    pub rank: usize,
    pub groups: Vec<[u8; 3]>,
    pub inner: InnerBasis,
    pub table: CoefficientTable,
    class_value: Vec<Rational>,
}

impl BlockDiagonalAverage {
    pub fn from_table(table: CoefficientTable) -> Result<Self> {
        check_rank(table.rank)?;
        let inner = InnerBasis::new(table.inner_rank)?;
        let class_value = inner.classes.iter().map(|c| table.value(c)).collect();
        Ok(BlockDiagonalAverage { rank: table.rank, groups: epsilon_triples(table.rank), inner, table, class_value })
    }

    /// Size of the overcomplete basis, `N_n`.
    pub fn dim(&self) -> usize {
        self.groups.len() * self.inner.len()
    }

    /// Entry `A[r][alpha]` of the inner block.
    pub fn block_entry(&self, r: usize, alpha: usize) -> &Rational {
        &self.class_value[self.inner.class_index(r, alpha)]
    }

    pub fn block(&self) -> Vec<Vec<Rational>> {
        (0..self.inner.len()).map(|r| (0..self.inner.len()).map(|a| self.block_entry(r, a).clone()).collect()).collect()
    }

    /// Entry of the full `N_n x N_n` operator, zero across different triples.
    pub fn entry(&self, row: usize, col: usize) -> Rational {
        let k = self.inner.len();
        if row / k != col / k {
            return Rational::zero();
        }
        self.block_entry(row % k, col % k).clone()
    }

    /// Letter pattern of the inner block (`0` for zero classes).
    pub fn letter_pattern(&self) -> Vec<Vec<char>> {
        (0..self.inner.len())
            .map(|r| {
                (0..self.inner.len()).map(|a| self.table.letter(self.inner.class_of(r, a)).unwrap_or('0')).collect()
            })
            .collect()
    }

    /// The basis in operator order; equals `enumerate_odd_iso(rank)`.
    pub fn basis(&self) -> Vec<OddIsoTensor> {
        let mut out = Vec::with_capacity(self.dim());
        for t in &self.groups {
            let rest = complement(self.rank, t);
            out.extend(self.inner.matchings.iter().map(|m| OddIsoTensor { epsilon: *t, matching: m.relabel(&rest) }));
        }
        out
    }

    pub(crate) fn class_values(&self) -> &[Rational] {
        &self.class_value
    }

    /// `sum_{r, alpha} M'_{r alpha} f_r(lab) g_alpha(mol)`.
    pub fn component(&self, lab: &IndexTuple, mol: &IndexTuple) -> Result<Rational> {
        for t in [lab, mol] {
            if t.len() != self.rank {
                return Err(Error::LengthMismatch { expected: self.rank, found: t.len() });
            }
        }
        let counts = class_counts(self.rank, &self.inner, lab, mol);
        Ok(counts.iter().zip(&self.class_value).filter(|(&k, _)| k != 0).map(|(&k, v)| Rational::from(k) * v).sum())
    }
}

pub fn build_block_matrix(n: usize) -> Result<BlockDiagonalAverage> {
    BlockDiagonalAverage::from_table(solve_coefficients(n)?)
}

/// Process-wide solved operator for rank `n`.
pub fn shared_average(n: usize) -> Result<Arc<BlockDiagonalAverage>> {
    check_rank(n)?;
    static CACHE: [OnceLock<std::result::Result<Arc<BlockDiagonalAverage>, Error>>; 5] = [const { OnceLock::new() }; 5];
    CACHE[(n - 3) / 2].get_or_init(|| build_block_matrix(n).map(Arc::new)).clone()
}
