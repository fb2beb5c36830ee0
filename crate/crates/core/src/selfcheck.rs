//! Built-in consistency checks against known reference values.

use std::fmt;

use crate::coefficients::{diag_average, equations, solve_coefficients, BlockDiagonalAverage, CoefficientTable};
use crate::combinatorics::{basis_count, enumerate_odd_iso, epsilon_triples, odd_partitions};
use crate::error::Result;
use crate::exact::Rational;
use crate::oracle::exact_component;

pub const RANKS: [usize; 5] = [3, 5, 7, 9, 11];

/// Known coefficients per rank: numerators in letter order over a common denominator.
pub const REFERENCE_COEFFICIENTS: [(usize, &[i64], i64); 5] =
    [(3, &[1], 6), (5, &[1], 30), (7, &[6, -1], 840), (9, &[38, -7, 2], 22680), (11, &[548, -80, 3, 14], 1_496_880)];

pub struct ReferenceSystem {
    pub rank: usize,
    pub counts: &'static [&'static [i64]],
    pub rhs: &'static [(i64, i64)],
}

/// Equation constants per rank, one row per odd partition in partition order.
pub const REFERENCE_SYSTEMS: [ReferenceSystem; 5] = [
    ReferenceSystem { rank: 3, counts: &[&[1]], rhs: &[(1, 6)] },
    ReferenceSystem { rank: 5, counts: &[&[3]], rhs: &[(1, 10)] },
    ReferenceSystem { rank: 7, counts: &[&[15, 30], &[9, 0]], rhs: &[(1, 14), (9, 140)] },
    ReferenceSystem {
        rank: 9,
        counts: &[&[105, 630, 840], &[45, 90, 0], &[27, 0, 0]],
        rhs: &[(1, 18), (1, 21), (19, 420)],
    },
    ReferenceSystem {
        rank: 11,
        counts: &[&[945, 11340, 11340, 30240], &[315, 1890, 0, 2520], &[225, 900, 900, 0], &[135, 270, 0, 0]],
        rhs: &[(1, 22), (5, 132), (25, 693), (97, 2772)],
    },
];

/// Reference letter pattern of the rank-6 inner block.
pub const REFERENCE_A6: [&str; 15] = [
    "abbbccbccccbccb",
    "babcbcccbbcccbc",
    "bbaccbcbccbcbcc",
    "bccabbbcccbccbc",
    "cbcbabcbcbccccb",
    "ccbbbaccbccbbcc",
    "bccbccabbbccbcc",
    "ccbcbcbabcbcccb",
    "cbcccbbbaccbcbc",
    "cbccbcbccabbbcc",
    "ccbbcccbcbabcbc",
    "bccccbccbbbaccb",
    "ccbccbbccbccabb",
    "cbcbccccbcbcbab",
    "bcccbccbcccbbba",
];

pub fn reference_a6() -> Vec<Vec<char>> {
    REFERENCE_A6.iter().map(|r| r.chars().collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status}  {:<28} {}", self.name, self.detail)
    }
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

/// A permutation `p` with `a[p[i]][p[j]] == b[i][j]` for all `i, j`, if any.
pub fn simultaneous_permutation(a: &[Vec<char>], b: &[Vec<char>]) -> Option<Vec<usize>> {
    let n = a.len();
    if b.len() != n {
        return None;
    }
    fn extend(a: &[Vec<char>], b: &[Vec<char>], perm: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let i = perm.len();
        if i == a.len() {
            return true;
        }
        for cand in 0..a.len() {
            if used[cand] || a[cand][cand] != b[i][i] {
                continue;
            }
            let consistent = perm.iter().enumerate().all(|(j, &pj)| a[cand][pj] == b[i][j] && a[pj][cand] == b[j][i]);
            if consistent {
                perm.push(cand);
                used[cand] = true;
                if extend(a, b, perm, used) {
                    return true;
                }
                perm.pop();
                used[cand] = false;
            }
        }
        false
    }
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    extend(a, b, &mut perm, &mut used).then_some(perm)
}

fn reference_values(n: usize) -> Vec<Rational> {
    let (_, nums, den) = REFERENCE_COEFFICIENTS.iter().find(|(r, _, _)| *r == n).expect("known rank");
    nums.iter().map(|&p| Rational::frac(p, *den)).collect()
}

fn coefficient_checks(table: &CoefficientTable, out: &mut Vec<Check>) -> Result<()> {
    let n = table.rank;
    let expected = reference_values(n);
    out.push(check(
        format!("coefficients n={n}"),
        table.letter_values() == expected,
        format!("n={n}: {}", table.summary()),
    ));

    let rows = equations(n)?;
    let system = REFERENCE_SYSTEMS.iter().find(|s| s.rank == n).expect("known rank");
    let counts: Vec<Vec<i64>> = rows
        .iter()
        .map(|row| table.letters.iter().map(|(c, _)| row.class_counts.get(c).copied().unwrap_or(0)).collect())
        .collect();
    let ref_counts: Vec<Vec<i64>> = system.counts.iter().map(|r| r.to_vec()).collect();
    let rhs: Vec<Rational> = rows.iter().map(|r| r.rhs.clone()).collect();
    let ref_rhs: Vec<Rational> = system.rhs.iter().map(|&(p, q)| Rational::frac(p, q)).collect();
    out.push(check(
        format!("equation constants n={n}"),
        counts == ref_counts && rhs == ref_rhs,
        format!("{counts:?} = {}", rhs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")),
    ));

    let reproduced = rows.iter().all(|row| table.evaluate(row) == row.rhs);
    out.push(check(format!("solution reproduces rhs n={n}"), reproduced, format!("{} equations", rows.len())));
    Ok(())
}

fn structure_checks(table: &CoefficientTable, out: &mut Vec<Check>) -> Result<()> {
    let op = BlockDiagonalAverage::from_table(table.clone())?;
    let pattern = op.letter_pattern();
    let profile_ok = pattern.iter().all(|row| {
        let count = |l| row.iter().filter(|&&c| c == l).count();
        count('a') == 1 && count('b') == 6 && count('c') == 8
    });
    out.push(check("A6 row profile", profile_ok, "1 a, 6 b, 8 c per row"));
    let perm = simultaneous_permutation(&pattern, &reference_a6());
    out.push(check(
        "A6 pattern",
        perm.is_some(),
        match &perm {
            Some(p) => format!("matches under reordering {p:?}"),
            None => "no simultaneous row/column permutation".into(),
        },
    ));
    Ok(())
}

fn basis_checks(out: &mut Vec<Check>) -> Result<()> {
    let expected = [(3, 1), (5, 10), (7, 105), (9, 1260), (11, 17325)];
    for (n, count) in expected {
        let enumerated = enumerate_odd_iso(n)?.len() as u64;
        out.push(check(
            format!("basis count n={n}"),
            enumerated == count && basis_count(n)? == count,
            format!("N_{n} = {enumerated}"),
        ));
    }
    let groups = epsilon_triples(9).len();
    out.push(check("n=9 grouping", groups == 84 && groups * 15 == 1260, format!("{groups} x 15")));
    Ok(())
}

fn diagonal_checks(out: &mut Vec<Check>) -> Result<()> {
    for n in RANKS {
        let mut ok = true;
        for p in odd_partitions(n)? {
            let t = p.diagonal_tuple();
            ok &= diag_average(p.q as i64, p.r as i64, p.s as i64)? == exact_component(n, &t, &t)?;
        }
        out.push(check(format!("closed form vs oracle n={n}"), ok, "diagonal components"));
    }
    Ok(())
}

/// Runs every check using the supplied tables (one per supported rank).
pub fn run_checks(tables: &[CoefficientTable]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    basis_checks(&mut out)?;
    for table in tables {
        coefficient_checks(table, &mut out)?;
        if table.rank == 9 {
            structure_checks(table, &mut out)?;
        }
    }
    diagonal_checks(&mut out)?;
    Ok(out)
}

pub fn solve_all() -> Result<Vec<CoefficientTable>> {
    RANKS.iter().map(|&n| solve_coefficients(n)).collect()
}

pub fn run_selfcheck() -> Result<Vec<Check>> {
    run_checks(&solve_all()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_pattern_is_symmetric_with_expected_profile() {
        let p = reference_a6();
        for (i, row) in p.iter().enumerate() {
            assert_eq!(row[i], 'a');
            for (j, &c) in row.iter().enumerate() {
                assert_eq!(c, p[j][i], "({i},{j})");
            }
            assert_eq!(row.iter().filter(|&&c| c == 'b').count(), 6);
            assert_eq!(row.iter().filter(|&&c| c == 'c').count(), 8);
        }
    }

    #[test]
    fn permutation_search() {
        let a: Vec<Vec<char>> = ["ab", "ba"].iter().map(|r| r.chars().collect()).collect();
        assert_eq!(simultaneous_permutation(&a, &a), Some(vec![0, 1]));
        let b: Vec<Vec<char>> = ["ab", "bb"].iter().map(|r| r.chars().collect()).collect();
        assert_eq!(simultaneous_permutation(&a, &b), None);
    }

    #[test]
    fn corrupted_table_fails() {
        let mut tables = vec![solve_coefficients(5).unwrap(), solve_coefficients(7).unwrap()];
        let class = tables[1].letters[0].0.clone();
        let bumped = tables[1].value(&class) + Rational::frac(1, 840);
        tables[1].class_values.insert(class, bumped);
        let checks = run_checks(&tables).unwrap();
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert_eq!(failed, vec!["coefficients n=7", "solution reproduces rhs n=7"]);
    }
}
