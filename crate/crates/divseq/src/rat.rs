//! Exact rational constants and their trial-division factorizations.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number; always stored reduced.
pub type Rat = num_rational::BigRational;

pub fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Default bound for trial division of constants.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// Factored nonzero rational: `sign * prod p^e` with negative exponents for
/// denominator primes.  Primes are ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFactors {
    pub negative: bool,
    pub factors: Vec<(u64, i64)>,
}

impl RatFactors {
    pub fn is_one(&self) -> bool {
        !self.negative && self.factors.is_empty()
    }
}

/// Factors a nonzero rational by trial division up to `bound`.
///
/// A leftover cofactor above the bound is accepted only when it is provably
/// prime because it survived trial division past its square root; anything
/// larger is an error rather than a silent partial factorization.
pub fn factor_rational(c: &Rat, bound: u64) -> Result<RatFactors> {
    if c.is_zero() {
        return Err(Error::Invalid("cannot factor zero".into()));
    }
    let mut factors: Vec<(u64, i64)> = Vec::new();
    let num = c.numer().abs().to_biguint().expect("abs is nonnegative");
    let den = c.denom().abs().to_biguint().expect("abs is nonnegative");
    accumulate_factors(num, 1, bound, &mut factors)?;
    accumulate_factors(den, -1, bound, &mut factors)?;
    factors.sort_unstable_by_key(|&(p, _)| p);
    Ok(RatFactors {
        negative: c.is_negative(),
        factors,
    })
}

fn accumulate_factors(
    mut n: BigUint,
    orientation: i64,
    bound: u64,
    out: &mut Vec<(u64, i64)>,
) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    let mut push = |p: u64, e: i64| {
        if e != 0 {
            out.push((p, e * orientation));
        }
    };
    let mut d: u64 = 2;
    while d <= bound {
        let big_d = BigUint::from(d);
        if (&big_d * &big_d) > n {
            break;
        }
        let mut e = 0i64;
        loop {
            let (q, r) = num_integer::Integer::div_rem(&n, &big_d);
            if r.is_zero() {
                n = q;
                e += 1;
            } else {
                break;
            }
        }
        push(d, e);
        d = if d == 2 { 3 } else { d + 2 };
    }
    if n.is_one() {
        return Ok(());
    }
    // Whatever is left has no factor below min(bound, sqrt); it is prime
    // exactly when it fits below bound^2.
    match n.to_u64() {
        Some(v) if v <= bound => {
            push(v, 1);
            Ok(())
        }
        Some(v) if v / bound <= bound => {
            push(v, 1);
            Ok(())
        }
        _ => Err(Error::ConstantTooLarge(n.to_string(), bound)),
    }
}
