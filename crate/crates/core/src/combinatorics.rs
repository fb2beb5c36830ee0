//! Overcomplete isotropic bases for odd rank.
//!
//! An odd-rank basis element is one Levi-Civita symbol on three positions
//! times a product of Kronecker deltas that perfectly match the remaining
//! positions. Positions are 1-based. The sign convention is `eps(x,y,z) = +1`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MIN_RANK: usize = 3;
pub const MAX_RANK: usize = 11;

/// Rejects even ranks and ranks outside `3..=11`.
pub fn check_rank(n: usize) -> Result<()> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenRank(n));
    }
    if !(MIN_RANK..=MAX_RANK).contains(&n) {
        return Err(Error::UnsupportedRank(n));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    pub fn letter(self) -> char {
        ['x', 'y', 'z'][self.index()]
    }
}

/// Levi-Civita symbol with `eps(X, Y, Z) = +1`.
pub fn levi_civita(a: Axis, b: Axis, c: Axis) -> i32 {
    let (a, b, c) = (a as i32, b as i32, c as i32);
    if a == b || b == c || a == c {
        return 0;
    }
    // For a permutation of (0, 1, 2) this product is +2 or -2.
    (b - a) * (c - b) * (c - a) / 2
}

/// Ordered list of axes, one per tensor slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexTuple(pub Vec<Axis>);

impl IndexTuple {
    pub fn new(axes: Vec<Axis>) -> Self {
        IndexTuple(axes)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Axis at 1-based position `p`.
    pub fn at(&self, p: u8) -> Axis {
        self.0[p as usize - 1]
    }

    pub fn axes(&self) -> &[Axis] {
        &self.0
    }

    /// `x^q y^r z^s`, the tuple behind a diagonal component.
    pub fn diagonal(q: usize, r: usize, s: usize) -> Self {
        let mut axes = vec![Axis::X; q];
        axes.extend(std::iter::repeat_n(Axis::Y, r));
        axes.extend(std::iter::repeat_n(Axis::Z, s));
        IndexTuple(axes)
    }

    /// Multiplicities of x, y and z.
    pub fn counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for a in &self.0 {
            c[a.index()] += 1;
        }
        c
    }

    /// Row-major offset into a dense `3^n` array (last slot fastest).
    pub fn flat_index(&self) -> usize {
        self.0.iter().fold(0, |acc, a| acc * 3 + a.index())
    }

    pub fn from_flat_index(mut idx: usize, n: usize) -> Self {
        let mut axes = vec![Axis::X; n];
        for slot in axes.iter_mut().rev() {
            *slot = Axis::from_index(idx % 3);
            idx /= 3;
        }
        IndexTuple(axes)
    }

    /// Applies `perm` to slot positions: slot `k` of the result is slot `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        IndexTuple(perm.iter().map(|&k| self.0[k]).collect())
    }
}

impl FromStr for IndexTuple {
    type Err = Error;

    /// Letters `x`, `y`, `z`, case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_ascii_lowercase() {
                'x' => Ok(Axis::X),
                'y' => Ok(Axis::Y),
                'z' => Ok(Axis::Z),
                _ => Err(Error::ParseAxis(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .and_then(|axes| if axes.is_empty() { Err(Error::ParseAxis(s.to_string())) } else { Ok(IndexTuple(axes)) })
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|a| write!(f, "{}", a.letter()))
    }
}

/// Perfect matching of a set of positions, stored canonically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    pairs: Vec<(u8, u8)>,
}

impl Matching {
    /// Builds a canonical matching; `pairs` must cover each position once.
    pub fn new(pairs: impl IntoIterator<Item = (u8, u8)>) -> Result<Self> {
        let mut pairs: Vec<(u8, u8)> = pairs.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        pairs.sort_unstable();
        let mut seen: Vec<u8> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DimensionMismatch("a position appears in more than one pair".into()));
        }
        Ok(Matching { pairs })
    }

    pub fn pairs(&self) -> &[(u8, u8)] {
        &self.pairs
    }

    pub fn positions(&self) -> Vec<u8> {
        let mut p: Vec<u8> = self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        p.sort_unstable();
        p
    }

    /// Relabels position `i` (1-based) as `targets[i - 1]`.
    pub fn relabel(&self, targets: &[u8]) -> Matching {
        let pairs = self.pairs.iter().map(|&(a, b)| (targets[a as usize - 1], targets[b as usize - 1]));
        Matching::new(pairs).expect("relabeling by an injective map")
    }

    /// Product of Kronecker deltas over the matched pairs.
    pub fn delta(&self, idx: &IndexTuple) -> bool {
        self.pairs.iter().all(|&(a, b)| idx.at(a) == idx.at(b))
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, b) in &self.pairs {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "d({a},{b})")?;
        }
        Ok(())
    }
}

/// All perfect matchings of `positions`, in lexicographic order of their
/// canonical pair lists.
pub fn enumerate_matchings(positions: &[u8]) -> Result<Vec<Matching>> {
    if !positions.len().is_multiple_of(2) {
        return Err(Error::OddPositionCount(positions.len()));
    }
    let mut sorted = positions.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(sorted.len() / 2);
    matchings_rec(&sorted, &mut current, &mut out);
    Ok(out)
}

fn matchings_rec(rest: &[u8], current: &mut Vec<(u8, u8)>, out: &mut Vec<Matching>) {
    let Some((&first, tail)) = rest.split_first() else {
        out.push(Matching { pairs: current.clone() });
        return;
    };
    for j in 0..tail.len() {
        let remaining: Vec<u8> = tail.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &p)| p).collect();
        current.push((first, tail[j]));
        matchings_rec(&remaining, current, out);
        current.pop();
    }
}

/// `eps` on three positions times a perfect matching of the others.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OddIsoTensor {
    pub epsilon: [u8; 3],
    pub matching: Matching,
}

impl OddIsoTensor {
    pub fn rank(&self) -> usize {
        3 + 2 * self.matching.pairs().len()
    }
}

impl fmt::Display for OddIsoTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.epsilon;
        write!(f, "eps({a},{b},{c})")?;
        if !self.matching.pairs().is_empty() {
            write!(f, " {}", self.matching)?;
        }
        Ok(())
    }
}

/// All 3-subsets of `1..=n` in lexicographic order.
pub fn epsilon_triples(n: usize) -> Vec<[u8; 3]> {
    let n = n as u8;
    let mut out = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Positions of `1..=n` not in `triple`, ascending.
pub fn complement(n: usize, triple: &[u8; 3]) -> Vec<u8> {
    (1..=n as u8).filter(|p| !triple.contains(p)).collect()
}

/// Closed-form size of the overcomplete basis for odd `n`:
/// `n! / (3 * 2^((n-1)/2) * ((n-3)/2)!)`.
pub fn basis_count(n: usize) -> Result<u64> {
    check_rank(n)?;
    let fact = |k: usize| (1..=k as u64).product::<u64>();
    Ok(fact(n) / (3 * (1u64 << ((n - 1) / 2)) * fact((n - 3) / 2)))
}

/// The full overcomplete basis, grouped by epsilon triple.
pub fn enumerate_odd_iso(n: usize) -> Result<Vec<OddIsoTensor>> {
    check_rank(n)?;
    let inner_positions: Vec<u8> = (1..=(n - 3) as u8).collect();
    let inner = enumerate_matchings(&inner_positions)?;
    let mut out = Vec::new();
    for triple in epsilon_triples(n) {
        let rest = complement(n, &triple);
        out.extend(inner.iter().map(|m| OddIsoTensor { epsilon: triple, matching: m.relabel(&rest) }));
    }
    Ok(out)
}

/// Value of a basis element at `idx`: `eps` on the triple times the deltas.
pub fn eval_iso(t: &OddIsoTensor, idx: &IndexTuple) -> Result<i32> {
    if idx.len() != t.rank() {
        return Err(Error::LengthMismatch { expected: t.rank(), found: idx.len() });
    }
    let [a, b, c] = t.epsilon;
    let e = levi_civita(idx.at(a), idx.at(b), idx.at(c));
    if e == 0 || !t.matching.delta(idx) {
        return Ok(0);
    }
    Ok(e)
}

/// Halved cycle lengths of the union of two perfect matchings, descending.
///
/// Identifies which independent coefficient an entry of the inner block
/// carries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairClass(Vec<u8>);

impl PairClass {
    pub fn new(mut parts: Vec<u8>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        PairClass(parts)
    }

    pub fn parts(&self) -> &[u8] {
        &self.0
    }

    /// Sum of the parts, i.e. half the number of matched positions.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

pub fn pair_class(m1: &Matching, m2: &Matching) -> Result<PairClass> {
    let positions = m1.positions();
    if positions != m2.positions() {
        return Err(Error::PositionSetMismatch);
    }
    let max = positions.last().copied().unwrap_or(0) as usize;
    let mut partner = [vec![0u8; max + 1], vec![0u8; max + 1]];
    for (side, m) in [m1, m2].into_iter().enumerate() {
        for &(a, b) in m.pairs() {
            partner[side][a as usize] = b;
            partner[side][b as usize] = a;
        }
    }
    let mut seen = vec![false; max + 1];
    let mut parts = Vec::new();
    for &start in &positions {
        if seen[start as usize] {
            continue;
        }
        // Alternate edges from m1 and m2 until the walk closes.
        let mut len = 0u8;
        let mut v = start;
        loop {
            seen[v as usize] = true;
            let w = partner[0][v as usize];
            seen[w as usize] = true;
            v = partner[1][w as usize];
            len += 1;
            if v == start {
                break;
            }
        }
        parts.push(len);
    }
    Ok(PairClass::new(parts))
}

/// `n = q + r + s` with all parts odd and `q <= r <= s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OddPartition {
    pub q: usize,
    pub r: usize,
    pub s: usize,
}

impl OddPartition {
    pub fn new(n: usize, q: usize, r: usize, s: usize) -> Result<Self> {
        let ok = q % 2 == 1 && r % 2 == 1 && s % 2 == 1 && q <= r && r <= s && q + r + s == n;
        if !ok {
            return Err(Error::InvalidPartition { n, q, r, s });
        }
        Ok(OddPartition { q, r, s })
    }

    pub fn rank(&self) -> usize {
        self.q + self.r + self.s
    }

    pub fn diagonal_tuple(&self) -> IndexTuple {
        IndexTuple::diagonal(self.q, self.r, self.s)
    }
}

impl fmt::Display for OddPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.q, self.r, self.s)
    }
}

/// Odd partitions of `n` ordered by `q`, then `r`.
pub fn odd_partitions(n: usize) -> Result<Vec<OddPartition>> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenRank(n));
    }
    let mut out = Vec::new();
    for q in (1..=n).step_by(2) {
        for r in (q..=n).step_by(2) {
            if q + r >= n {
                break;
            }
            let s = n - q - r;
            if s >= r {
                out.push(OddPartition { q, r, s });
            }
        }
    }
    Ok(out)
}
