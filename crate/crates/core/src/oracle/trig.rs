//! Exact integration of products of direction cosines.
//!
//! Each direction cosine in the z-x-z Euler parametrization is a short
//! polynomial in `cos`/`sin` of the three angles. A product of `n` of them
//! expands into at most `2^n` monomials, each of which integrates in closed
//! form against the normalized Haar measure
//! `(1 / 8 pi^2) dpsi dphi sin(theta) dtheta`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use crate::combinatorics::{Axis, IndexTuple};
use crate::error::{Error, Result};
use crate::exact::{double_factorial, Rational};

/// Exponent slots, in storage order.
pub const COS_PSI: usize = 0;
pub const SIN_PSI: usize = 1;
pub const COS_PHI: usize = 2;
pub const SIN_PHI: usize = 3;
pub const COS_THETA: usize = 4;
pub const SIN_THETA: usize = 5;

pub type Exponents = [u8; 6];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrigMonomial {
    pub coeff: Rational,
    pub exponents: Exponents,
}

impl TrigMonomial {
    pub fn new(coeff: i64, factors: &[usize]) -> Self {
        let mut exponents = [0u8; 6];
        for &f in factors {
            exponents[f] += 1;
        }
        TrigMonomial { coeff: Rational::from(coeff), exponents }
    }
}

/// Sum of monomials keyed by exponent tuple; zero coefficients never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TrigPolynomial {
    terms: BTreeMap<Exponents, Rational>,
}

impl TrigPolynomial {
    pub fn one() -> Self {
        TrigPolynomial { terms: BTreeMap::from([([0; 6], Rational::one())]) }
    }

    pub fn from_monomials(monomials: impl IntoIterator<Item = TrigMonomial>) -> Self {
        let mut p = TrigPolynomial::default();
        for m in monomials {
            p.add_term(m.exponents, m.coeff);
        }
        p
    }

    fn add_term(&mut self, exponents: Exponents, coeff: Rational) {
        let slot = self.terms.entry(exponents).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exponents);
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn monomials(&self) -> impl Iterator<Item = TrigMonomial> + '_ {
        self.terms.iter().map(|(e, c)| TrigMonomial { coeff: c.clone(), exponents: *e })
    }

    /// Haar average of the polynomial.
    pub fn integrate(&self) -> Result<Rational> {
        self.monomials().map(|m| integrate_monomial(&m)).sum()
    }
}

impl Mul<&TrigPolynomial> for &TrigPolynomial {
    type Output = TrigPolynomial;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &TrigPolynomial) -> TrigPolynomial {
        let mut out = TrigPolynomial::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                e.iter_mut().zip(eb).for_each(|(x, y)| *x += y);
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for TrigPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 6] = ["Cpsi", "Spsi", "Cphi", "Sphi", "Ctheta", "Stheta"];
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            for (k, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, " {}", NAMES[k])?,
                    _ => write!(f, " {}^{p}", NAMES[k])?,
                }
            }
        }
        Ok(())
    }
}

/// Entry `l[row][col]` of the z-x-z direction-cosine matrix.
pub fn dir_cosine_entry(row: Axis, col: Axis) -> TrigPolynomial {
    use Axis::*;
    let m = TrigMonomial::new;
    let terms = match (row, col) {
        (X, X) => vec![m(1, &[COS_PSI, COS_PHI]), m(-1, &[COS_THETA, SIN_PHI, SIN_PSI])],
        (X, Y) => vec![m(1, &[COS_PSI, SIN_PHI]), m(1, &[COS_THETA, COS_PHI, SIN_PSI])],
        (X, Z) => vec![m(1, &[SIN_PSI, SIN_THETA])],
        (Y, X) => vec![m(-1, &[SIN_PSI, COS_PHI]), m(-1, &[COS_THETA, SIN_PHI, COS_PSI])],
        (Y, Y) => vec![m(-1, &[SIN_PSI, SIN_PHI]), m(1, &[COS_THETA, COS_PHI, COS_PSI])],
        (Y, Z) => vec![m(1, &[COS_PSI, SIN_THETA])],
        (Z, X) => vec![m(1, &[SIN_THETA, SIN_PHI])],
        (Z, Y) => vec![m(-1, &[SIN_THETA, COS_PHI])],
        (Z, Z) => vec![m(1, &[COS_THETA])],
    };
    TrigPolynomial::from_monomials(terms)
}

fn df(k: i64) -> Rational {
    Rational::from(double_factorial(k).expect("k >= -1"))
}

/// `(1/2pi) int_0^{2pi} sin^i cos^j`, zero unless both powers are even.
fn full_period(sin_pow: u8, cos_pow: u8) -> Rational {
    if sin_pow % 2 == 1 || cos_pow % 2 == 1 {
        return Rational::zero();
    }
    let (i, j) = (sin_pow as i64, cos_pow as i64);
    df(i - 1) * df(j - 1) * df(i + j).recip().expect("positive")
}

/// Haar average of one monomial.
///
/// The `sin(theta)` of the measure raises the `sin(theta)` power by one.
/// Whenever the psi and phi averages are nonzero for a product of direction
/// cosines the resulting power is odd; an even power would bring in a factor
/// of pi and is reported as [`Error::IrrationalIntegral`].
pub fn integrate_monomial(m: &TrigMonomial) -> Result<Rational> {
    let e = m.exponents;
    let psi = full_period(e[SIN_PSI], e[COS_PSI]);
    let phi = full_period(e[SIN_PHI], e[COS_PHI]);
    if psi.is_zero() || phi.is_zero() || e[COS_THETA] % 2 == 1 {
        return Ok(Rational::zero());
    }
    let sin_pow = e[SIN_THETA] as i64 + 1;
    if sin_pow % 2 == 0 {
        return Err(Error::IrrationalIntegral);
    }
    let cos_pow = e[COS_THETA] as i64;
    // (1/2) int_0^pi sin^i cos^j = (i-1)!! (j-1)!! / (i+j)!! for i odd, j even.
    let theta = df(sin_pow - 1) * df(cos_pow - 1) * df(sin_pow + cos_pow).recip().expect("positive");
    Ok(&m.coeff * &(psi * phi * theta))
}

fn check_lengths(n: usize, lab: &IndexTuple, mol: &IndexTuple) -> Result<()> {
    for t in [lab, mol] {
        if t.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: t.len() });
        }
    }
    Ok(())
}

/// `prod_k l[lab_k][mol_k]` as an expanded polynomial.
pub fn direction_cosine_product(lab: &IndexTuple, mol: &IndexTuple) -> TrigPolynomial {
    lab.axes().iter().zip(mol.axes()).fold(TrigPolynomial::one(), |acc, (&i, &l)| &acc * &dir_cosine_entry(i, l))
}

/// Exact component `I_{lab; mol}` of the rotational average.
pub fn exact_component(n: usize, lab: &IndexTuple, mol: &IndexTuple) -> Result<Rational> {
    check_lengths(n, lab, mol)?;
    direction_cosine_product(lab, mol).integrate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn idx(s: &str) -> IndexTuple {
        s.parse().unwrap()
    }

    #[test]
    fn entries() {
        use Axis::*;
        assert_eq!(dir_cosine_entry(Z, Z), TrigPolynomial::from_monomials([TrigMonomial::new(1, &[COS_THETA])]));
        assert_eq!(dir_cosine_entry(X, Z).to_string(), "1 Spsi Stheta");
        assert_eq!(dir_cosine_entry(Z, X).to_string(), "1 Sphi Stheta");
        for r in Axis::ALL {
            for c in Axis::ALL {
                assert!(dir_cosine_entry(r, c).len() <= 2);
            }
        }
    }

    #[test]
    fn monomial_integrals() {
        assert_eq!(integrate_monomial(&TrigMonomial::new(1, &[])).unwrap(), Rational::one());
        assert_eq!(integrate_monomial(&TrigMonomial::new(1, &[COS_PSI])).unwrap(), Rational::zero());
        assert_eq!(integrate_monomial(&TrigMonomial::new(1, &[COS_THETA, COS_THETA])).unwrap(), q("1/3"));
        // <cos^2 psi> = 1/2, <sin^2 theta> = 2/3.
        assert_eq!(integrate_monomial(&TrigMonomial::new(3, &[COS_PSI, COS_PSI])).unwrap(), q("3/2"));
        assert_eq!(integrate_monomial(&TrigMonomial::new(1, &[SIN_THETA, SIN_THETA])).unwrap(), q("2/3"));
        assert_eq!(integrate_monomial(&TrigMonomial::new(1, &[SIN_THETA])), Err(Error::IrrationalIntegral));
    }

    #[test]
    fn components() {
        assert_eq!(exact_component(5, &idx("xyzzz"), &idx("xyzzz")).unwrap(), q("1/10"));
        assert_eq!(exact_component(9, &idx("xyyyzzzzz"), &idx("xyyyzzzzz")).unwrap(), q("1/21"));
        assert_eq!(exact_component(5, &idx("xxyzz"), &idx("xxyzz")).unwrap(), Rational::zero());
        assert_eq!(exact_component(7, &idx("yxxxzzz"), &idx("yxxxzzz")).unwrap(), q("9/140"));
        assert_eq!(exact_component(3, &idx("xyz"), &idx("xyz")).unwrap(), q("1/6"));
        assert_eq!(exact_component(1, &idx("x"), &idx("x")).unwrap(), Rational::zero());
        assert_eq!(exact_component(2, &idx("xx"), &idx("yy")).unwrap(), q("1/3"));
        assert!(matches!(exact_component(5, &idx("xyz"), &idx("xyzzz")), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn expansion_stays_small() {
        let p = direction_cosine_product(&idx("xxxxxxxxxxx"), &idx("yyyyyyyyyyy"));
        assert!(p.len() <= 1 << 11);
    }
}
