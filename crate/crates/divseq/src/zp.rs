//! Arithmetic modulo word-sized primes.
//!
//! The modular gcd engine works over random primes of 61 to 62 bits, large
//! enough that one image usually determines a gcd and small enough that all
//! products fit in `u128`.  Primes are drawn from a seeded ChaCha stream and
//! certified with a deterministic Miller-Rabin test, so runs are reproducible
//! and never depend on an unproven primality claim.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rat::Rat;

#[derive(Debug, Clone, Copy)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        debug_assert!(is_prime_u64(p));
        PrimeField { p }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b; // p < 2^63 keeps this below u64::MAX
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element via Fermat.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }

    /// Image of a rational with invertible denominator.
    pub fn from_rat(&self, c: &Rat) -> Option<u64> {
        let den = self.from_bigint(c.denom());
        if den == 0 {
            return None;
        }
        let num = self.from_bigint(c.numer());
        Some(self.mul(num, self.inv(den)))
    }

    pub fn from_bigint(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let mut r = n % &p;
        if r.is_negative() {
            r += &p;
        }
        r.to_u64().expect("reduced below a u64 prime")
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This base set decides primality for every integer below 3.3 * 10^24.
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Endless stream of random primes in `[2^61, 2^62)`, reproducible from the
/// seed.
pub struct PrimeStream {
    rng: ChaCha8Rng,
}

impl PrimeStream {
    pub fn new(seed: u64) -> Self {
        PrimeStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            let candidate = (self.rng.next_u64() >> 3) | (1 << 61) | 1;
            if is_prime_u64(candidate) {
                return Some(candidate);
            }
        }
    }
}

/// Polynomials over `Z/p` as ascending coefficient vectors without trailing
/// zeros; all functions below maintain that normalization.
pub type ZpPoly = Vec<u64>;

pub fn zp_trim(a: &mut ZpPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn zp_degree(a: &ZpPoly) -> Option<usize> {
    a.len().checked_sub(1)
}

/// Reduces a rational polynomial; `None` when a denominator vanishes mod p.
pub fn zp_from_rat_coeffs(coeffs: &[Rat], field: &PrimeField) -> Option<ZpPoly> {
    let mut out = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        out.push(field.from_rat(c)?);
    }
    zp_trim(&mut out);
    Some(out)
}

pub fn zp_from_bigint_coeffs(coeffs: &[BigInt], field: &PrimeField) -> ZpPoly {
    let mut out: ZpPoly = coeffs.iter().map(|c| field.from_bigint(c)).collect();
    zp_trim(&mut out);
    out
}

pub fn zp_monic(a: &ZpPoly, field: &PrimeField) -> ZpPoly {
    match a.last() {
        None => Vec::new(),
        Some(&1) => a.clone(),
        Some(&lc) => {
            let inv = field.inv(lc);
            a.iter().map(|&c| field.mul(c, inv)).collect()
        }
    }
}

/// In-place remainder of `a` by nonzero `b`.
pub fn zp_rem(a: &mut ZpPoly, b: &ZpPoly, field: &PrimeField) {
    let db = zp_degree(b).expect("remainder by zero");
    let lc_inv = field.inv(*b.last().expect("nonzero"));
    while let Some(da) = zp_degree(a) {
        if da < db {
            break;
        }
        let q = field.mul(*a.last().expect("nonzero"), lc_inv);
        let shift = da - db;
        for j in 0..db {
            let sub = field.mul(q, b[j]);
            a[shift + j] = field.sub(a[shift + j], sub);
        }
        a.pop();
        zp_trim(a);
    }
}

/// Quotient and remainder by nonzero `b`.
pub fn zp_div_rem(a: &ZpPoly, b: &ZpPoly, field: &PrimeField) -> (ZpPoly, ZpPoly) {
    let db = zp_degree(b).expect("division by zero");
    let mut rem = a.clone();
    let Some(da) = zp_degree(&rem) else {
        return (Vec::new(), Vec::new());
    };
    if da < db {
        return (Vec::new(), rem);
    }
    let lc_inv = field.inv(*b.last().expect("nonzero"));
    let mut quot = vec![0u64; da - db + 1];
    while let Some(da) = zp_degree(&rem) {
        if da < db {
            break;
        }
        let q = field.mul(*rem.last().expect("nonzero"), lc_inv);
        let shift = da - db;
        quot[shift] = q;
        for j in 0..db {
            let sub = field.mul(q, b[j]);
            rem[shift + j] = field.sub(rem[shift + j], sub);
        }
        rem.pop();
        zp_trim(&mut rem);
    }
    (quot, rem)
}

pub fn zp_mul(a: &ZpPoly, b: &ZpPoly, field: &PrimeField) -> ZpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    zp_trim(&mut out);
    out
}

/// Monic gcd over `Z/p`.
pub fn zp_gcd(a: &ZpPoly, b: &ZpPoly, field: &PrimeField) -> ZpPoly {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    while !r1.is_empty() {
        zp_rem(&mut r0, &r1, field);
        std::mem::swap(&mut r0, &mut r1);
    }
    zp_monic(&r0, field)
}

/// Evaluation by Horner.
pub fn zp_eval(a: &ZpPoly, x: u64, field: &PrimeField) -> u64 {
    let mut acc = 0u64;
    for &c in a.iter().rev() {
        acc = field.add(field.mul(acc, x), c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_frac;

    #[test]
    fn miller_rabin_agrees_with_small_sieve() {
        let mut sieve = vec![true; 2000];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..2000usize {
            if sieve[i] {
                for j in (i * i..2000).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for n in 0..2000usize {
            assert_eq!(is_prime_u64(n as u64), sieve[n], "n = {n}");
        }
        // Known Miller-Rabin stress cases.
        assert!(!is_prime_u64(3_215_031_751));
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(u64::MAX));
    }

    #[test]
    fn prime_stream_is_reproducible_and_in_range() {
        let a: Vec<u64> = PrimeStream::new(7).take(5).collect();
        let b: Vec<u64> = PrimeStream::new(7).take(5).collect();
        assert_eq!(a, b);
        for p in a {
            assert!(p >= 1 << 61 && p < 1 << 62);
            assert!(is_prime_u64(p));
        }
        let c: Vec<u64> = PrimeStream::new(8).take(5).collect();
        assert_ne!(
            PrimeStream::new(7).take(5).collect::<Vec<_>>(),
            c,
            "different seeds should give different primes"
        );
    }

    #[test]
    fn field_inverse_and_fraction_reduction() {
        let f = PrimeField::new((1 << 61) - 1);
        for a in [1u64, 2, 3, 12345, 1 << 60] {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        let half = f.from_rat(&rat_frac(1, 2)).unwrap();
        assert_eq!(f.add(half, half), 1);
        let p = f.p;
        assert!(f.from_rat(&Rat::new(1.into(), p.into())).is_none());
    }

    #[test]
    fn gcd_of_images() {
        let f = PrimeField::new((1 << 61) - 1);
        // (t^2 - 1, t^3 - 1) -> t - 1
        let a = vec![f.p - 1, 0, 1];
        let b = vec![f.p - 1, 0, 0, 1];
        assert_eq!(zp_gcd(&a, &b, &f), vec![f.p - 1, 1]);
        // coprime pair
        let c = vec![1, 1];
        let d = vec![2, 1];
        assert_eq!(zp_gcd(&c, &d, &f), vec![1]);
    }

    #[test]
    fn division_roundtrip() {
        let f = PrimeField::new((1 << 61) - 1);
        let a = vec![5, 0, 3, 1, 2];
        let b = vec![7, 1, 1];
        let (q, r) = zp_div_rem(&a, &b, &f);
        let mut back = zp_mul(&q, &b, &f);
        for (k, &c) in r.iter().enumerate() {
            if back.len() <= k {
                back.resize(k + 1, 0);
            }
            back[k] = f.add(back[k], c);
        }
        zp_trim(&mut back);
        assert_eq!(back, a);
    }
}
