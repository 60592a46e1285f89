//! Rational functions in t over Q, kept in lowest terms.
//!
//! Every value satisfies the canonical-form invariant: numerator and
//! denominator are coprime, the denominator is monic and nonzero, and zero
//! is `0/1`.  Arithmetic reduces through the modular gcd, so results are
//! canonical too; equality is plain structural equality.
//!
//! [`Frac`] is the escape hatch for formula evaluation: it postpones
//! reduction across a whole arithmetic expression so that only the final
//! result pays for a gcd.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gcd::reduce_fraction;
use crate::poly::Polynomial;
use crate::rat::{rat_i64, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    /// Builds `num/den` in canonical form; errors when `den` is zero.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (num, den) = reduce_fraction(&num, &den);
        Ok(RationalFunction { num, den })
    }

    /// Wraps an already coprime pair with monic denominator.
    ///
    /// Used on hot paths where coprimality is guaranteed by construction;
    /// debug builds spot-check the claim at one prime.
    pub(crate) fn from_coprime(num: Polynomial, den: Polynomial) -> Self {
        debug_assert!(!den.is_zero());
        debug_assert!(den.is_monic());
        debug_assert!(crate::gcd::poly_gcd(&num, &den).is_one() || num.is_zero());
        RationalFunction { num, den }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn t() -> Self {
        Self::from_poly(Polynomial::t())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// `Some(c)` when the function is the constant `c`.
    pub fn as_constant(&self) -> Option<Rat> {
        (self.num.is_constant() && self.den.is_one()).then(|| self.num.coeff(0))
    }

    pub fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let lc_inv = self.num.leading_coeff().expect("nonzero").recip();
        Ok(RationalFunction {
            num: self.den.scale(&lc_inv),
            den: self.num.monic(),
        })
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.try_inv()?)
    }

    /// Integer power; negative exponents invert, `0^0 = 1`.
    pub fn pow_i(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one());
        }
        let base = if e < 0 { self.try_inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        // num and den powers stay coprime, so no reduction is needed.
        Ok(RationalFunction {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    /// `self^n - g` with a single reduction at the end; `g = None` means 1.
    ///
    /// Subtracting after the exponentiation keeps the intermediate
    /// `num^n / den^n` coprime, which is what makes long sequences of these
    /// calls affordable.
    pub fn pow_minus(&self, n: u64, g: Option<&Self>) -> Result<Self> {
        let pn = self.num.pow(n);
        let pd = self.den.pow(n);
        match g {
            None => {
                // gcd(pn - pd, pd) = gcd(pn, pd) = 1 already
                Ok(RationalFunction {
                    num: &pn - &pd,
                    den: pd,
                })
            }
            Some(g) => {
                let num = &(&pn * &g.den) - &(&g.num * &pd);
                let den = &pd * &g.den;
                RationalFunction::new(num, den)
            }
        }
    }

    /// Evaluation at `t = x`; `None` at a pole.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x) / d)
    }

    /// The function `f(1/s)` of `s`, in canonical form.
    ///
    /// With `f = p/q`, clearing powers of `s` gives
    /// `f(1/s) = s^(deg q - deg p) * rev(p)/rev(q)`, and the reversal of a
    /// polynomial with nonzero constant term keeps its coprimality, so only
    /// powers of `s` need balancing.
    pub fn subst_inv(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let dp = self.num.degree().expect("nonzero") as i64;
        let dq = self.den.degree().expect("nonzero") as i64;
        // rev(p) and rev(q) stay coprime and have nonzero constant terms, so
        // the only bookkeeping is the net power of s.
        let mut num = self.num.reversed();
        let mut den = self.den.reversed();
        let shift = dq - dp;
        if shift >= 0 {
            num = &num * &Polynomial::monomial(Rat::one(), shift as usize);
        } else {
            den = &den * &Polynomial::monomial(Rat::one(), (-shift) as usize);
        }
        let lc = den.leading_coeff().expect("nonzero").recip();
        RationalFunction::from_coprime(num.scale(&lc), den.monic())
    }

    /// Order of vanishing at the place at infinity: `deg den - deg num`.
    pub fn ord_at_infinity(&self) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroFunctionOrder);
        }
        let dp = self.num.degree().expect("nonzero") as i64;
        let dq = self.den.degree().expect("nonzero") as i64;
        Ok(dq - dp)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RationalFunction::new(num, den).expect("nonzero denominator")
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        let num = &self.num * &rhs.num;
        let den = &self.den * &rhs.den;
        RationalFunction::new(num, den).expect("nonzero denominator")
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    /// Panics on division by zero; use `try_div` to keep the error.
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self.try_div(rhs).expect("division by zero rational function")
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Unreduced fraction for formula evaluation.  All operations are exact but
/// never call the gcd; `reduce` converts back to canonical form.
#[derive(Debug, Clone)]
pub struct Frac {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl Frac {
    pub fn from_ratfun(f: &RationalFunction) -> Self {
        Frac {
            num: f.num.clone(),
            den: f.den.clone(),
        }
    }

    pub fn from_poly(p: &Polynomial) -> Self {
        Frac {
            num: p.clone(),
            den: Polynomial::one(),
        }
    }

    pub fn constant_i64(c: i64) -> Self {
        Frac::from_poly(&Polynomial::constant(rat_i64(c)))
    }

    pub fn add(&self, rhs: &Frac) -> Frac {
        Frac {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }

    pub fn sub(&self, rhs: &Frac) -> Frac {
        Frac {
            num: &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }

    pub fn mul(&self, rhs: &Frac) -> Frac {
        Frac {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        }
    }

    pub fn div(&self, rhs: &Frac) -> Result<Frac> {
        if rhs.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Frac {
            num: &self.num * &rhs.den,
            den: &self.den * &rhs.num,
        })
    }

    pub fn neg(&self) -> Frac {
        Frac {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn square(&self) -> Frac {
        self.mul(self)
    }

    pub fn reduce(&self) -> Result<RationalFunction> {
        RationalFunction::new(self.num.clone(), self.den.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_frac;

    fn p(coeffs: &[i64]) -> Polynomial {
        Polynomial::from_i64_coeffs(coeffs)
    }

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(p(num), p(den)).unwrap()
    }

    #[test]
    fn construction_reduces_to_canonical_form() {
        // (t^2-1)/(2t-2) = (t+1)/2
        let f = rf(&[-1, 0, 1], &[-2, 2]);
        assert_eq!(f.num(), &p(&[1, 1]).scale(&rat_frac(1, 2)));
        assert_eq!(f.den(), &Polynomial::one());
        assert!(RationalFunction::new(p(&[1]), Polynomial::zero()).is_err());
    }

    #[test]
    fn field_operations() {
        let f = rf(&[0, 1], &[1, 1]); // t/(t+1)
        let g = rf(&[1], &[0, 1]); // 1/t
        let sum = &f + &g;
        assert_eq!(sum, rf(&[1, 1, 1], &[0, 1, 1]));
        let prod = &f * &g;
        assert_eq!(prod, rf(&[1], &[1, 1]));
        let quot = &f / &g;
        assert_eq!(quot, rf(&[0, 0, 1], &[1, 1]));
        assert_eq!(&(&sum - &f) - &g, RationalFunction::zero());
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let f = rf(&[0, 2], &[1]); // 2t
        let inv = f.pow_i(-2).unwrap();
        assert_eq!(inv, rf(&[1], &[0, 0, 4]));
        assert_eq!(f.pow_i(0).unwrap(), RationalFunction::one());
        assert!(RationalFunction::zero().pow_i(-1).is_err());
    }

    #[test]
    fn pow_minus_one_example() {
        // f = (2t+1)/t^2, f^2 - 1 = (4t^3 + 4t^2 ... ) with coprime parts
        let f = rf(&[1, 2], &[0, 0, 1]);
        let g = f.pow_minus(2, None).unwrap();
        let direct = &(&f * &f) - &RationalFunction::one();
        assert_eq!(g, direct);
        assert_eq!(g.den(), &p(&[0, 0, 0, 0, 1]));

        // subtracting a general g matches the field arithmetic
        let q = rf(&[3, 1], &[2, 1]);
        let h = f.pow_minus(3, Some(&q)).unwrap();
        let direct = &(&(&f * &f) * &f) - &q;
        assert_eq!(h, direct);
    }

    #[test]
    fn substitution_t_to_inverse() {
        // f = t^2 -> f(1/s) = 1/s^2
        assert_eq!(rf(&[0, 0, 1], &[1]).subst_inv(), rf(&[1], &[0, 0, 1]));
        // f = (t+1)/t -> (1/s + 1)/(1/s) = 1 + s
        assert_eq!(rf(&[1, 1], &[0, 1]).subst_inv(), rf(&[1, 1], &[1]));
        // f = 2/(3t^2) -> 2s^2/3
        let f = rf(&[2], &[0, 0, 3]);
        assert_eq!(
            f.subst_inv(),
            RationalFunction::from_poly(p(&[0, 0, 1]).scale(&rat_frac(2, 3)))
        );
        // involution on a generic function
        let g = rf(&[1, 2, 3], &[-5, 0, 0, 1]);
        assert_eq!(g.subst_inv().subst_inv(), g);
    }

    #[test]
    fn order_at_infinity() {
        assert_eq!(rf(&[0, 1], &[1]).ord_at_infinity().unwrap(), -1);
        assert_eq!(rf(&[1], &[0, 1]).ord_at_infinity().unwrap(), 1);
        assert_eq!(rf(&[1, 1], &[-1, 1]).ord_at_infinity().unwrap(), 0);
        assert!(RationalFunction::zero().ord_at_infinity().is_err());
    }

    #[test]
    fn frac_matches_reduced_arithmetic() {
        let f = rf(&[0, 1], &[1, 1]);
        let g = rf(&[1, 2], &[0, 0, 1]);
        let frac = Frac::from_ratfun(&f)
            .add(&Frac::from_ratfun(&g))
            .mul(&Frac::from_ratfun(&f))
            .sub(&Frac::constant_i64(4));
        let reduced = frac.reduce().unwrap();
        let direct = &(&(&f + &g) * &f) - &RationalFunction::constant(rat_i64(4));
        assert_eq!(reduced, direct);
    }

    #[test]
    fn display_round_trip_shapes() {
        assert_eq!(rf(&[1, 1], &[1]).to_string(), "t + 1");
        assert_eq!(rf(&[1, 2], &[0, 0, 1]).to_string(), "(2*t + 1)/(t^2)");
    }
}
