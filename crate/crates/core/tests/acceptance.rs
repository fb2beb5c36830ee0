//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rotavg::averaging::average_tensor;
use rotavg::coefficients::equations;
use rotavg::combinatorics::{basis_count, enumerate_odd_iso, epsilon_triples, odd_partitions};
use rotavg::oracle::{exact_component, quad_component, random_rotation, EulerQuadrature};
use rotavg::selfcheck::{reference_a6, simultaneous_permutation, REFERENCE_SYSTEMS};
use rotavg::verify::{parity_admissible, sample_pairs};
use rotavg::{
    average_entry, diag_average, shared_average, solve_coefficients, Axis, DenseTensor, IndexTuple, Rational,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: rotavg::Error) -> String {
    e.to_string()
}

fn random_tuple(rng: &mut ChaCha8Rng, n: usize) -> IndexTuple {
    IndexTuple((0..n).map(|_| Axis::from_index(rng.random_range(0..3))).collect())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::frac(rng.random_range(-9..=9), rng.random_range(1..=7))
}

fn coefficients() -> Outcome {
    let start = Instant::now();
    let expected: [(usize, &[i64], i64); 4] =
        [(5, &[1], 30), (7, &[6, -1], 840), (9, &[38, -7, 2], 22680), (11, &[548, -80, 3, 14], 1_496_880)];
    let mut summaries = Vec::new();
    for (n, nums, den) in expected {
        let table = solve_coefficients(n).map_err(err)?;
        let want: Vec<Rational> = nums.iter().map(|&p| Rational::frac(p, den)).collect();
        ensure(table.letter_values() == want, || format!("n={n}: got {}", table.summary()))?;
        summaries.push(format!("n={n} {}", table.summary()));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:.1?}"))?;
    Ok(format!("{} in {elapsed:.2?}", summaries.join("; ")))
}

fn equation_constants() -> Outcome {
    for system in REFERENCE_SYSTEMS.iter().filter(|s| s.rank >= 7) {
        let n = system.rank;
        let table = solve_coefficients(n).map_err(err)?;
        let rows = equations(n).map_err(err)?;
        ensure(rows.len() == system.counts.len(), || format!("n={n}: {} equations", rows.len()))?;
        for (row, (want_counts, &(p, q))) in rows.iter().zip(system.counts.iter().zip(system.rhs)) {
            let counts: Vec<i64> =
                table.letters.iter().map(|(c, _)| row.class_counts.get(c).copied().unwrap_or(0)).collect();
            ensure(counts == *want_counts, || format!("n={n} {}: counts {counts:?}", row.partition))?;
            ensure(row.rhs == Rational::frac(p, q), || format!("n={n} {}: rhs {}", row.partition, row.rhs))?;
        }
    }
    Ok("n=7, 9, 11 systems match".into())
}

fn basis_counts() -> Outcome {
    for (n, want) in [(3, 1), (5, 10), (7, 105), (9, 1260), (11, 17325)] {
        let enumerated = enumerate_odd_iso(n).map_err(err)?.len() as u64;
        let closed = basis_count(n).map_err(err)?;
        ensure(enumerated == want && closed == want, || format!("n={n}: {enumerated} enumerated, {closed} closed"))?;
    }
    let basis = enumerate_odd_iso(9).map_err(err)?;
    let triples = epsilon_triples(9);
    ensure(triples.len() == 84, || format!("{} groups", triples.len()))?;
    for (block, triple) in basis.chunks(15).zip(&triples) {
        ensure(block.len() == 15 && block.iter().all(|g| g.epsilon == *triple), || {
            format!("group {triple:?} is not a block of 15")
        })?;
    }
    Ok("N = 1, 10, 105, 1260, 17325; n=9 is 84 x 15".into())
}

fn closed_form() -> Outcome {
    let mut count = 0;
    for n in [3, 5, 7, 9, 11] {
        for p in odd_partitions(n).map_err(err)? {
            let (q, r, s) = (p.q, p.r, p.s);
            let closed = diag_average(q as i64, r as i64, s as i64).map_err(err)?;
            let t = p.diagonal_tuple();
            let exact = exact_component(n, &t, &t).map_err(err)?;
            ensure(closed == exact, || format!("{p}: closed {closed}, oracle {exact}"))?;
            let axes = |order: [Axis; 3]| {
                let mut v = vec![order[0]; q];
                v.extend(std::iter::repeat_n(order[1], r));
                v.extend(std::iter::repeat_n(order[2], s));
                IndexTuple(v)
            };
            let lab = axes([Axis::X, Axis::Z, Axis::Y]);
            let mol = axes([Axis::X, Axis::Y, Axis::Z]);
            let minus = -exact_component(n, &lab, &mol).map_err(err)?;
            ensure(minus == closed, || format!("{p}: minus identity gives {minus}, expected {closed}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} partitions, closed form and minus identity exact"))
}

fn audit() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for (n, count) in [(3, 100), (5, 100), (7, 100), (9, 100), (11, 25)] {
        let mut nonzero = 0;
        let mut total = 0;
        for admissible in [false, true] {
            for (lab, mol) in sample_pairs(n, count, 2024 + n as u64, admissible) {
                let pipeline = average_entry(n, &lab, &mol).map_err(err)?;
                let exact = exact_component(n, &lab, &mol).map_err(err)?;
                ensure(pipeline == exact, || format!("n={n} {lab};{mol}: pipeline {pipeline}, oracle {exact}"))?;
                nonzero += usize::from(!exact.is_zero());
                total += 1;
            }
        }
        parts.push(format!("n={n} {total} pairs ({nonzero} nonzero)"));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(600), || format!("took {elapsed:.1?}"))?;
    Ok(format!("{} in {elapsed:.2?}", parts.join(", ")))
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut vanishing, mut permutation) = (0, 0);
    for i in 0..1000 {
        let n = [3, 5, 7, 9][i % 4];
        if i % 2 == 0 {
            // Parity rule: a component with a wrong-parity axis count is zero.
            let (lab, mol) = loop {
                let lab = random_tuple(&mut rng, n);
                let mol = random_tuple(&mut rng, n);
                if !parity_admissible(&lab) || !parity_admissible(&mol) {
                    break (lab, mol);
                }
            };
            let v = exact_component(n, &lab, &mol).map_err(err)?;
            ensure(v.is_zero(), || format!("{lab};{mol} = {v}, expected 0"))?;
            vanishing += 1;
        } else {
            let (lab, mol) = sample_pairs(n, 1, rng.random(), rng.random_bool(0.7)).remove(0);
            let mut perm: Vec<usize> = (0..n).collect();
            for k in (1..n).rev() {
                perm.swap(k, rng.random_range(0..=k));
            }
            let a = exact_component(n, &lab, &mol).map_err(err)?;
            let b = exact_component(n, &lab.permuted(&perm), &mol.permuted(&perm)).map_err(err)?;
            ensure(a == b, || format!("{lab};{mol} under {perm:?}: {a} vs {b}"))?;
            permutation += 1;
        }
    }
    let op = shared_average(9).map_err(err)?;
    let pattern = op.letter_pattern();
    for row in &pattern {
        let count = |l| row.iter().filter(|&&c| c == l).count();
        ensure(count('a') == 1 && count('b') == 6 && count('c') == 8, || {
            format!("row {} has profile {}/{}/{}", row.iter().collect::<String>(), count('a'), count('b'), count('c'))
        })?;
    }
    ensure(simultaneous_permutation(&pattern, &reference_a6()).is_some(), || {
        "A6 pattern differs from the reference under every reordering".into()
    })?;
    Ok(format!("{vanishing} parity + {permutation} permutation assertions; A6 rows 1 a, 6 b, 8 c"))
}

fn averaging() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [5, 7] {
        let t = DenseTensor::from_fn(n, |_| random_rational(&mut rng)).map_err(err)?;
        let avg = average_tensor(&t).map_err(err)?;
        let total = 3usize.pow(n as u32);
        for _ in 0..20 {
            let lab = IndexTuple::from_flat_index(rng.random_range(0..total), n);
            let mut brute = Rational::zero();
            for flat in 0..total {
                let mol = IndexTuple::from_flat_index(flat, n);
                let w = t.get(&mol);
                if !w.is_zero() {
                    brute += exact_component(n, &lab, &mol).map_err(err)? * w.clone();
                }
            }
            ensure(*avg.get(&lab) == brute, || format!("n={n} entry {lab}: {} vs brute force {brute}", avg.get(&lab)))?;
        }
        let basis = enumerate_odd_iso(n).map_err(err)?;
        let coeffs: Vec<Rational> = basis.iter().map(|_| random_rational(&mut rng)).collect();
        let iso = DenseTensor::isotropic(n, &basis, &coeffs).map_err(err)?;
        ensure(average_tensor(&iso).map_err(err)? == iso, || format!("n={n}: averaging moved an isotropic tensor"))?;
    }
    let mut worst = 0.0f64;
    for n in [5, 7] {
        let t = DenseTensor::from_fn(n, |_| rng.random_range(-1.0..1.0)).map_err(err)?;
        let avg = average_tensor(&t).map_err(err)?;
        for _ in 0..3 {
            let r = random_rotation(&mut rng);
            worst = worst.max(avg.rotated(&r).max_abs_diff(&avg));
            worst = worst.max(average_tensor(&t.rotated(&r)).map_err(err)?.max_abs_diff(&avg));
        }
    }
    ensure(worst <= 1e-10, || format!("float rotation deviation {worst:e}"))?;
    Ok(format!("40 brute-force entries exact; idempotent; float rotation deviation {worst:.1e}"))
}

fn quadrature() -> Outcome {
    let quad = EulerQuadrature::default();
    let mut worst = 0.0f64;
    for n in [3, 5, 7, 9] {
        let mut pairs = sample_pairs(n, 25, 80 + n as u64, false);
        pairs.extend(sample_pairs(n, 25, 90 + n as u64, true));
        for (lab, mol) in pairs {
            let exact = exact_component(n, &lab, &mol).map_err(err)?.to_f64();
            let q = quad_component(n, &lab, &mol, &quad).map_err(err)?;
            let diff = (q - exact).abs();
            ensure(diff <= 1e-12, || format!("n={n} {lab};{mol}: quad {q}, exact {exact}"))?;
            worst = worst.max(diff);
        }
    }
    Ok(format!("200 components, max deviation {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("coefficient reproduction", coefficients),
        ("equation constants", equation_constants),
        ("basis counts", basis_counts),
        ("closed form vs oracle", closed_form),
        ("pipeline audit", audit),
        ("parity and permutation", properties),
        ("averaging correctness", averaging),
        ("quadrature oracle", quadrature),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
