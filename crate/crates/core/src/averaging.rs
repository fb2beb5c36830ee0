//! Rotational averaging of molecular tensors.
//!
//! For a molecule-frame tensor `T` of odd rank the lab-frame average is
//! `<T>_i = sum_{r, alpha} M'_{r alpha} f_r(i) (g_alpha . T)`. The
//! contraction `g_alpha . T` only touches the `6 * 3^((n-3)/2)` entries where
//! the epsilon-delta product is nonzero, and `M'` is block diagonal, so the
//! whole average costs far less than the `3^n x 3^n` operator it represents.

use std::fmt::Debug;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coefficients::{shared_average, BlockDiagonalAverage};
use crate::combinatorics::{check_rank, complement, IndexTuple, Matching, OddIsoTensor, MAX_RANK};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::oracle::RotationSample;

/// Field the tensor entries live in.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn add_assign(&mut self, rhs: &Self);
    fn sub_assign(&mut self, rhs: &Self);
    fn mul(&self, rhs: &Self) -> Self;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        Rational::from(v)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn sub_assign(&mut self, rhs: &Self) {
        *self = &*self - rhs;
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn sub_assign(&mut self, rhs: &Self) {
        *self -= rhs;
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

fn pow3(k: usize) -> usize {
    3usize.pow(k as u32)
}

/// Dense rank-`n` tensor over `{x, y, z}^n`, last index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor<S> {
    rank: usize,
    entries: Vec<S>,
}

impl<S: Scalar> DenseTensor<S> {
    pub fn new(rank: usize, entries: Vec<S>) -> Result<Self> {
        if rank > MAX_RANK {
            return Err(Error::UnsupportedRank(rank));
        }
        if entries.len() != pow3(rank) {
            return Err(Error::DimensionMismatch(format!(
                "rank {rank} needs {} entries, got {}",
                pow3(rank),
                entries.len()
            )));
        }
        Ok(DenseTensor { rank, entries })
    }

    pub fn zeros(rank: usize) -> Result<Self> {
        if rank > MAX_RANK {
            return Err(Error::UnsupportedRank(rank));
        }
        DenseTensor::new(rank, vec![S::zero(); pow3(rank)])
    }

    pub fn from_fn(rank: usize, mut f: impl FnMut(&IndexTuple) -> S) -> Result<Self> {
        if rank > MAX_RANK {
            return Err(Error::UnsupportedRank(rank));
        }
        let entries = (0..pow3(rank)).map(|i| f(&IndexTuple::from_flat_index(i, rank))).collect();
        DenseTensor::new(rank, entries)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<S> {
        self.entries
    }

    pub fn get(&self, idx: &IndexTuple) -> &S {
        &self.entries[idx.flat_index()]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: &S, other: &Self, b: &S) -> Result<Self> {
        if self.rank != other.rank {
            return Err(Error::LengthMismatch { expected: self.rank, found: other.rank });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| {
                let mut v = a.mul(x);
                v.add_assign(&b.mul(y));
                v
            })
            .collect();
        DenseTensor::new(self.rank, entries)
    }

    /// `sum_r c_r f_r` over `basis`.
    pub fn isotropic(rank: usize, basis: &[OddIsoTensor], coefficients: &[S]) -> Result<Self> {
        let mut out = DenseTensor::zeros(rank)?;
        for (f, c) in basis.iter().zip(coefficients) {
            if f.rank() != rank {
                return Err(Error::LengthMismatch { expected: rank, found: f.rank() });
            }
            if c.is_zero() {
                continue;
            }
            let strides = strides(rank);
            for (sign, offset) in nonzero_offsets(rank, &f.epsilon, &f.matching, &strides) {
                apply_signed(&mut out.entries[offset], c, sign);
            }
        }
        Ok(out)
    }
}

impl DenseTensor<f64> {
    /// Rotates every molecular index: `T'_lambda = sum_mu prod_k R[lambda_k][mu_k] T_mu`.
    pub fn rotated(&self, r: &RotationSample) -> Self {
        let mut cur = self.entries.clone();
        for slot in 0..self.rank {
            let stride = pow3(self.rank - 1 - slot);
            let mut next = vec![0.0; cur.len()];
            for (i, out) in next.iter_mut().enumerate() {
                let a = (i / stride) % 3;
                let base = i - a * stride;
                *out = (0..3).map(|b| r.matrix[a][b] * cur[base + b * stride]).sum();
            }
            cur = next;
        }
        DenseTensor { rank: self.rank, entries: cur }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn apply_signed<S: Scalar>(slot: &mut S, value: &S, sign: i32) {
    if sign > 0 {
        slot.add_assign(value);
    } else {
        slot.sub_assign(value);
    }
}

fn strides(rank: usize) -> Vec<usize> {
    // Index 0 unused so positions stay 1-based.
    (0..=rank).map(|p| if p == 0 { 0 } else { pow3(rank - p) }).collect()
}

/// The six signed placements of `(x, y, z)` on the epsilon positions.
fn epsilon_offsets(triple: &[u8; 3], strides: &[usize]) -> [(i32, usize); 6] {
    const PERMS: [([usize; 3], i32); 6] =
        [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([0, 2, 1], -1), ([2, 1, 0], -1), ([1, 0, 2], -1)];
    PERMS.map(|(axes, sign)| {
        let offset = triple.iter().zip(axes).map(|(&p, a)| a * strides[p as usize]).sum();
        (sign, offset)
    })
}

/// Offsets of all `3^k` assignments satisfying the deltas of `matching`.
fn delta_offsets(matching: &Matching, strides: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &(a, b) in matching.pairs() {
        let step = strides[a as usize] + strides[b as usize];
        out = out.iter().flat_map(|&o| (0..3).map(move |axis| o + axis * step)).collect();
    }
    out
}

fn nonzero_offsets(rank: usize, triple: &[u8; 3], matching: &Matching, strides: &[usize]) -> Vec<(i32, usize)> {
    debug_assert_eq!(strides.len(), rank + 1);
    let deltas = delta_offsets(matching, strides);
    epsilon_offsets(triple, strides)
        .into_iter()
        .flat_map(|(sign, e)| deltas.iter().map(move |&d| (sign, e + d)))
        .collect()
}

/// `sum_lambda g(lambda) T_lambda`, visiting only the nonzero entries of `g`.
pub fn contract_iso<S: Scalar>(g: &OddIsoTensor, t: &DenseTensor<S>) -> Result<S> {
    if g.rank() != t.rank {
        return Err(Error::LengthMismatch { expected: g.rank(), found: t.rank });
    }
    let strides = strides(t.rank);
    let mut acc = S::zero();
    for (sign, offset) in nonzero_offsets(t.rank, &g.epsilon, &g.matching, &strides) {
        apply_signed(&mut acc, &t.entries[offset], sign);
    }
    Ok(acc)
}

/// One component `I_{lab; mol}` from the solved coefficient table.
pub fn average_entry(n: usize, lab: &IndexTuple, mol: &IndexTuple) -> Result<Rational> {
    shared_average(n)?.component(lab, mol)
}

/// Coefficients `t_r` of the averaged tensor on the overcomplete basis, in
/// basis order: `t_r = sum_alpha A[r][alpha] (g_alpha . T)` within each block.
pub fn average_coefficients<S: Scalar>(op: &BlockDiagonalAverage, t: &DenseTensor<S>) -> Result<Vec<S>> {
    if t.rank != op.rank {
        return Err(Error::LengthMismatch { expected: op.rank, found: t.rank });
    }
    let values: Vec<S> = op.class_values().iter().map(S::from_rational).collect();
    let k = op.inner.len();
    let class_count = values.len();
    let blocks: Vec<Vec<S>> = op
        .groups
        .par_iter()
        .map(|triple| {
            let rest = complement(op.rank, triple);
            let projections: Vec<S> = op
                .inner
                .matchings
                .iter()
                .map(|m| {
                    let g = OddIsoTensor { epsilon: *triple, matching: m.relabel(&rest) };
                    contract_iso(&g, t).expect("ranks checked")
                })
                .collect();
            (0..k)
                .map(|r| {
                    let mut per_class = vec![S::zero(); class_count];
                    for (alpha, s) in projections.iter().enumerate() {
                        per_class[op.inner.class_index(r, alpha)].add_assign(s);
                    }
                    let mut acc = S::zero();
                    for (sum, v) in per_class.iter().zip(&values) {
                        if !sum.is_zero() && !v.is_zero() {
                            acc.add_assign(&sum.mul(v));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(blocks.into_iter().flatten().collect())
}

/// Dense `sum_r t_r f_r` for coefficients in the operator's basis order.
pub fn expand_coefficients<S: Scalar>(op: &BlockDiagonalAverage, coefficients: &[S]) -> Result<DenseTensor<S>> {
    if coefficients.len() != op.dim() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} coefficients, got {}",
            op.dim(),
            coefficients.len()
        )));
    }
    let n = op.rank;
    let m = n - 3;
    let full_strides = strides(n);
    let k = op.inner.len();
    // Per-block partial sums over the 3^m assignments of the non-epsilon slots.
    let partials: Vec<(usize, Vec<S>)> = op
        .groups
        .par_iter()
        .enumerate()
        .map(|(g, _)| {
            let inner_strides = strides(m);
            let mut h = vec![S::zero(); pow3(m)];
            for (r, matching) in op.inner.matchings.iter().enumerate() {
                let c = &coefficients[g * k + r];
                if c.is_zero() {
                    continue;
                }
                for sub in delta_offsets(matching, &inner_strides) {
                    h[sub].add_assign(c);
                }
            }
            (g, h)
        })
        .collect();

    let mut out = vec![S::zero(); pow3(n)];
    for (g, h) in partials {
        let triple = &op.groups[g];
        let rest = complement(n, triple);
        let rest_offsets: Vec<usize> = (0..pow3(m))
            .map(|sub| {
                let axes = IndexTuple::from_flat_index(sub, m);
                rest.iter().zip(axes.axes()).map(|(&p, a)| a.index() * full_strides[p as usize]).sum()
            })
            .collect();
        for (sign, e) in epsilon_offsets(triple, &full_strides) {
            for (sub, value) in h.iter().enumerate() {
                if !value.is_zero() {
                    apply_signed(&mut out[e + rest_offsets[sub]], value, sign);
                }
            }
        }
    }
    DenseTensor::new(n, out)
}

pub fn average_tensor_with<S: Scalar>(op: &BlockDiagonalAverage, t: &DenseTensor<S>) -> Result<DenseTensor<S>> {
    let coefficients = average_coefficients(op, t)?;
    expand_coefficients(op, &coefficients)
}

/// Lab-frame rotational average of a molecule-frame tensor.
pub fn average_tensor<S: Scalar>(t: &DenseTensor<S>) -> Result<DenseTensor<S>> {
    check_rank(t.rank)?;
    average_tensor_with(shared_average(t.rank)?.as_ref(), t)
}

/// A tensor read from or written to a file, in either scalar kind.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTensor {
    Rational(DenseTensor<Rational>),
    Float(DenseTensor<f64>),
}

impl AnyTensor {
    pub fn rank(&self) -> usize {
        match self {
            AnyTensor::Rational(t) => t.rank,
            AnyTensor::Float(t) => t.rank,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AnyTensor::Rational(_) => "rational",
            AnyTensor::Float(_) => "float",
        }
    }

    pub fn average(&self) -> Result<AnyTensor> {
        Ok(match self {
            AnyTensor::Rational(t) => AnyTensor::Rational(average_tensor(t)?),
            AnyTensor::Float(t) => AnyTensor::Float(average_tensor(t)?),
        })
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = match self {
            AnyTensor::Rational(t) => t.entries.iter().map(|v| Value::String(v.to_string())).collect(),
            AnyTensor::Float(t) => t.entries.iter().map(|&v| float_value(v)).collect(),
        };
        serde_json::json!({ "rank": self.rank(), "kind": self.kind(), "entries": entries })
    }

    pub fn from_json_str(text: &str) -> Result<AnyTensor> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            rank: usize,
            kind: String,
            entries: Vec<Value>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::TensorFormat(e.to_string()))?;
        if raw.rank > MAX_RANK {
            return Err(Error::UnsupportedRank(raw.rank));
        }
        let bad = |i: usize, what: &str| Error::TensorFormat(format!("entry {i}: {what}"));
        match raw.kind.as_str() {
            "rational" => {
                let entries = raw
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, v)| match v {
                        Value::String(s) => s.parse::<Rational>().map_err(|e| bad(i, &e.to_string())),
                        Value::Number(n) if n.is_i64() => Ok(Rational::from(n.as_i64().unwrap())),
                        _ => Err(bad(i, "expected a \"p/q\" string")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnyTensor::Rational(DenseTensor::new(raw.rank, entries)?))
            }
            "float" => {
                let entries = raw
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v.as_f64().ok_or_else(|| bad(i, "expected a number")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnyTensor::Float(DenseTensor::new(raw.rank, entries)?))
            }
            other => Err(Error::TensorFormat(format!("unknown kind {other:?}"))),
        }
    }
}

fn float_value(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// Little-endian binary layout: `u64` rank, then `3^rank` `f64` entries.
pub fn write_binary<W: Write>(t: &DenseTensor<f64>, mut w: W) -> Result<()> {
    w.write_all(&(t.rank as u64).to_le_bytes())?;
    for v in &t.entries {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<DenseTensor<f64>> {
    let mut header = [0u8; 8];
    r.read_exact(&mut header).map_err(|_| Error::TensorFormat("binary header shorter than 8 bytes".into()))?;
    let rank = u64::from_le_bytes(header);
    if rank > MAX_RANK as u64 {
        return Err(Error::UnsupportedRank(rank as usize));
    }
    let rank = rank as usize;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    let expected = pow3(rank) * 8;
    if body.len() != expected {
        return Err(Error::TensorFormat(format!(
            "binary body has {} bytes at offset 8, expected {expected}",
            body.len()
        )));
    }
    let entries = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect();
    DenseTensor::new(rank, entries)
}

/// Compact result: the coefficient vector on the overcomplete basis.
#[derive(Debug, Clone, Serialize)]
pub struct CompactAverage {
    pub rank: usize,
    pub kind: &'static str,
    pub basis: Vec<String>,
    pub coefficients: Vec<Value>,
}

pub fn compact_average(t: &AnyTensor) -> Result<CompactAverage> {
    let n = t.rank();
    check_rank(n)?;
    let op = shared_average(n)?;
    let coefficients = match t {
        AnyTensor::Rational(t) => average_coefficients(&op, t)?.iter().map(|v| Value::String(v.to_string())).collect(),
        AnyTensor::Float(t) => average_coefficients(&op, t)?.into_iter().map(float_value).collect(),
    };
    Ok(CompactAverage {
        rank: n,
        kind: t.kind(),
        basis: op.basis().iter().map(ToString::to_string).collect(),
        coefficients,
    })
}
