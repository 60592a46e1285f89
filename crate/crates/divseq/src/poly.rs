//! Dense univariate polynomials with exact rational coefficients.
//!
//! Coefficients are stored lowest degree first and the vector never ends in
//! a zero, so the representation is canonical.  The zero polynomial is the
//! empty vector and has no degree; `degree()` returns `Option<usize>` to keep
//! callers honest about that case.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rat::{rat_i64, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<Rat>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Polynomial::from_coeffs(vec![c])
    }

    /// The monomial `c * t^k`.
    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Polynomial::from_coeffs(coeffs)
    }

    /// The coordinate `t` itself.
    pub fn t() -> Self {
        Polynomial::monomial(Rat::one(), 1)
    }

    /// Builds from ascending coefficients, stripping trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64_coeffs(coeffs: &[i64]) -> Self {
        Polynomial::from_coeffs(coeffs.iter().map(|&c| rat_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of `t^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Zero or degree 0.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    /// Multiplicity of t = 0 as a root; `None` for the zero polynomial.
    pub fn order_at_zero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * rat_i64(k as i64))
            .collect();
        Polynomial::from_coeffs(coeffs)
    }

    /// Divides by the leading coefficient; the zero polynomial stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading_coeff() {
            None => Polynomial::zero(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => {
                let inv = lc.recip();
                Polynomial::from_coeffs(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_some_and(|lc| lc.is_one())
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Coefficients in reversed order: `t^deg * self(1/t)`.  Used for the
    /// substitution t -> 1/s when working at the place at infinity.
    pub fn reversed(&self) -> Polynomial {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Polynomial::from_coeffs(coeffs)
    }

    pub fn pow(&self, mut e: u64) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division; panics when `div` is zero.
    pub fn div_rem(&self, div: &Polynomial) -> (Polynomial, Polynomial) {
        let d = div.degree().expect("division by the zero polynomial");
        let lc_inv = div.leading_coeff().expect("nonzero").recip();
        let mut rem = self.coeffs.clone();
        if rem.len() < d + 1 {
            return (Polynomial::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); rem.len() - d];
        for k in (d..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let q = &rem[k] * &lc_inv;
            for j in 0..d {
                let delta = &q * &div.coeffs[j];
                rem[k - d + j] -= delta;
            }
            rem[k] = Rat::zero();
            quot[k - d] = q;
        }
        (Polynomial::from_coeffs(quot), Polynomial::from_coeffs(rem))
    }

    /// Exact quotient, or `None` when the remainder is nonzero.
    ///
    /// Runs over the integer primitive parts: by the Gauss lemma the
    /// division is exact over Q precisely when it is exact over Z, and the
    /// integer loop avoids rational coefficient arithmetic.
    pub fn exact_div(&self, div: &Polynomial) -> Option<Polynomial> {
        div.degree().expect("division by the zero polynomial");
        if self.is_zero() {
            return Some(Polynomial::zero());
        }
        if self.coeffs.len() < div.coeffs.len() {
            return None;
        }
        if div.is_constant() {
            return Some(self.scale(&div.coeffs[0].recip()));
        }
        let (nz, cn) = self.primitive_parts();
        let (dz, cd) = div.primitive_parts();
        let q = crate::gcd::exact_div_z(&nz, &dz)?;
        Some(poly_from_bigint_coeffs(q).scale(&(cn / cd)))
    }

    pub fn divides(&self, other: &Polynomial) -> bool {
        other.exact_div(self).is_some()
    }

    /// Rational content `c > 0` with `self = c * primitive` and the primitive
    /// part integral with coprime coefficients.  Zero has content zero.
    pub fn content(&self) -> Rat {
        if self.is_zero() {
            return Rat::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        Rat::new(num_gcd, den_lcm)
    }

    /// Integer primitive part and the content, with `self = content * prim`.
    pub fn primitive_parts(&self) -> (Vec<BigInt>, Rat) {
        let content = self.content();
        if content.is_zero() {
            return (Vec::new(), content);
        }
        let inv = content.recip();
        let prim = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * &inv;
                debug_assert!(v.denom().is_one());
                v.numer().clone()
            })
            .collect();
        (prim, content)
    }
}

pub fn poly_from_bigint_coeffs(coeffs: Vec<BigInt>) -> Polynomial {
    Polynomial::from_coeffs(coeffs.into_iter().map(Rat::from_integer).collect())
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + rhs.coeff(k));
        }
        Polynomial::from_coeffs(coeffs)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) - rhs.coeff(k));
        }
        Polynomial::from_coeffs(coeffs)
    }
}

/// Numerators of an all-integer coefficient vector, or `None` when some
/// coefficient has a nontrivial denominator.
fn integral_coeffs(p: &Polynomial) -> Option<Vec<BigInt>> {
    p.coeffs
        .iter()
        .map(|c| c.denom().is_one().then(|| c.numer().clone()))
        .collect()
}

fn convolve_z(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] += x * y;
        }
    }
    out
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        if rhs.coeffs.len() == 1 {
            return self.scale(&rhs.coeffs[0]);
        }
        if self.coeffs.len() == 1 {
            return rhs.scale(&self.coeffs[0]);
        }
        // Convolving in BigInt sidesteps a rational renormalization per
        // coefficient product, which dominates at high degree.
        if let (Some(a), Some(b)) = (integral_coeffs(self), integral_coeffs(rhs)) {
            return poly_from_bigint_coeffs(convolve_z(&a, &b));
        }
        let (a, ca) = self.primitive_parts();
        let (b, cb) = rhs.primitive_parts();
        poly_from_bigint_coeffs(convolve_z(&a, &b)).scale(&(ca * cb))
    }
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: &Rat) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    /// Descending powers with explicit `*`, e.g. `3/2*t^4 - t + 5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let abs = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = abs.is_one() && k > 0;
            if !unit_coeff {
                write_coeff(f, &abs)?;
            }
            if k > 0 {
                if !unit_coeff {
                    write!(f, "*")?;
                }
                write!(f, "t")?;
                if k > 1 {
                    write!(f, "^{}", k)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_frac;

    fn p(coeffs: &[i64]) -> Polynomial {
        Polynomial::from_i64_coeffs(coeffs)
    }

    #[test]
    fn canonical_representation() {
        let a = Polynomial::from_coeffs(vec![rat_i64(1), rat_i64(0), rat_i64(0)]);
        assert_eq!(a.degree(), Some(0));
        assert!(Polynomial::zero().degree().is_none());
        assert_eq!(p(&[0, 0]), Polynomial::zero());
    }

    #[test]
    fn arithmetic_basics() {
        let a = p(&[1, 1]); // t + 1
        let b = p(&[-1, 1]); // t - 1
        assert_eq!(&a * &b, p(&[-1, 0, 1]));
        assert_eq!(&a + &b, p(&[0, 2]));
        assert_eq!(&a - &a, Polynomial::zero());
        assert_eq!(a.pow(3), p(&[1, 3, 3, 1]));
    }

    #[test]
    fn division_with_remainder() {
        let num = p(&[-1, 0, 0, 1]); // t^3 - 1
        let den = p(&[-1, 1]); // t - 1
        let (q, r) = num.div_rem(&den);
        assert_eq!(q, p(&[1, 1, 1]));
        assert!(r.is_zero());
        let (q2, r2) = p(&[1, 0, 1]).div_rem(&p(&[1, 1]));
        assert_eq!(q2, p(&[-1, 1]));
        assert_eq!(r2, p(&[2]));
        assert!(num.exact_div(&p(&[1, 1])).is_none());
    }

    #[test]
    fn content_and_primitive_parts() {
        let a = Polynomial::from_coeffs(vec![rat_frac(4, 3), rat_i64(2)]);
        let c = a.content();
        assert_eq!(c, rat_frac(2, 3));
        let (prim, content) = a.primitive_parts();
        assert_eq!(content, rat_frac(2, 3));
        assert_eq!(prim, vec![BigInt::from(2), BigInt::from(3)]);
    }

    #[test]
    fn derivative_and_eval() {
        let a = p(&[5, -1, 0, 0, 0]); // -t + 5, trailing zeros stripped
        assert_eq!(a.degree(), Some(1));
        let b = p(&[1, 2, 3]);
        assert_eq!(b.derivative(), p(&[2, 6]));
        assert_eq!(b.eval(&rat_i64(2)), rat_i64(17));
    }

    #[test]
    fn display_matches_input_syntax() {
        let a = Polynomial::from_coeffs(vec![
            rat_i64(5),
            rat_i64(-1),
            rat_i64(0),
            rat_i64(0),
            rat_frac(3, 2),
        ]);
        assert_eq!(a.to_string(), "3/2*t^4 - t + 5");
        assert_eq!(p(&[0, 1]).to_string(), "t");
        assert_eq!(p(&[0, -1]).to_string(), "-t");
        assert_eq!(p(&[-2, 0, 1]).to_string(), "t^2 - 2");
        assert_eq!(Polynomial::zero().to_string(), "0");
        assert_eq!(p(&[0, 2]).to_string(), "2*t");
    }

    #[test]
    fn reversed_swaps_ends() {
        let a = p(&[2, 0, 0, 1]); // t^3 + 2
        assert_eq!(a.reversed(), p(&[1, 0, 0, 2]));
        assert_eq!(p(&[0, 1]).reversed(), p(&[1]));
    }
}
