//! Polynomial gcds over Q and reduction of fractions to lowest terms.
//!
//! The fast path reduces both inputs at random word-sized primes, takes gcds
//! over Z/p, combines images by CRT, and lifts the candidate to Q by rational
//! reconstruction.  A candidate is accepted only after exact trial division
//! into both inputs, so an unlucky prime can cost time but never a wrong
//! answer.  Degree-zero images certify coprimality outright, which makes the
//! very common "already coprime" case essentially free.  When certification
//! keeps failing the code falls back to the subresultant remainder sequence,
//! which is slow but unconditional.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::{poly_from_bigint_coeffs, Polynomial};
use crate::rat::Rat;
use crate::zp::{
    zp_degree, zp_from_bigint_coeffs, zp_gcd, PrimeField, PrimeStream,
};

/// Seed for the prime stream when the caller does not supply one.  Fixing it
/// makes every run byte-for-byte reproducible.
pub const DEFAULT_GCD_SEED: u64 = 0x0123_4567_89ab_cdef;

/// Total primes to try before declaring the modular path stuck.
const MAX_PRIMES: usize = 512;

/// Monic gcd over Q; `gcd(0, 0) = 0`.
pub fn poly_gcd(p: &Polynomial, q: &Polynomial) -> Polynomial {
    poly_gcd_seeded(p, q, DEFAULT_GCD_SEED)
}

pub fn poly_gcd_seeded(p: &Polynomial, q: &Polynomial, seed: u64) -> Polynomial {
    if p.is_zero() {
        return q.monic();
    }
    if q.is_zero() || p == q {
        return p.monic();
    }
    if p.is_constant() || q.is_constant() {
        return Polynomial::one();
    }
    let (pz, _) = p.primitive_parts();
    let (qz, _) = q.primitive_parts();
    match modular_gcd(&pz, &qz, seed) {
        Some(g) => g,
        None => subresultant_gcd(p, q),
    }
}

/// Reduces `num/den` to lowest terms with a monic denominator.
///
/// Returns the pair `(num', den')` with `num'/den' = num/den`,
/// `gcd(num', den') = 1` and `den'` monic.  Panics when `den` is zero.
pub fn reduce_fraction(num: &Polynomial, den: &Polynomial) -> (Polynomial, Polynomial) {
    reduce_fraction_seeded(num, den, DEFAULT_GCD_SEED)
}

pub fn reduce_fraction_seeded(
    num: &Polynomial,
    den: &Polynomial,
    seed: u64,
) -> (Polynomial, Polynomial) {
    let lc = den.leading_coeff().expect("zero denominator").clone();
    if num.is_zero() {
        return (Polynomial::zero(), Polynomial::one());
    }
    if den.is_constant() {
        return (num.scale(&lc.recip()), Polynomial::one());
    }
    if num.is_constant() {
        return (num.scale(&lc.recip()), den.monic());
    }
    let g = poly_gcd_seeded(num, den, seed);
    if g.is_one() {
        let inv = lc.recip();
        return (num.scale(&inv), den.monic());
    }
    let n1 = num.exact_div(&g).expect("gcd divides the numerator");
    let d1 = den.exact_div(&g).expect("gcd divides the denominator");
    let inv = d1.leading_coeff().expect("nonzero").recip();
    (n1.scale(&inv), d1.monic())
}

/// Modular gcd of primitive integer polynomials; monic result over Q.
/// `None` when no candidate certifies within the prime budget.
fn modular_gcd(pz: &[BigInt], qz: &[BigInt], seed: u64) -> Option<Polynomial> {
    let mut stream = PrimeStream::new(seed);
    let p_lc = pz.last().expect("nonzero");
    let q_lc = qz.last().expect("nonzero");

    // CRT state for the current minimal image degree.
    let mut best_deg = usize::MAX;
    let mut residues: Vec<BigInt> = Vec::new();
    let mut modulus = BigInt::one();
    let mut primes_used = 0usize;
    let mut last_lift: Option<Polynomial> = None;

    while primes_used < MAX_PRIMES {
        let prime = stream.next().expect("stream is endless");
        let field = PrimeField::new(prime);
        if field.from_bigint(p_lc) == 0 || field.from_bigint(q_lc) == 0 {
            continue;
        }
        primes_used += 1;
        let pa = zp_from_bigint_coeffs(pz, &field);
        let qa = zp_from_bigint_coeffs(qz, &field);
        let g = zp_gcd(&pa, &qa, &field);
        let deg = zp_degree(&g).expect("gcd of nonzero images is nonzero");
        if deg == 0 {
            // The gcd degree mod any leading-coefficient-preserving prime
            // bounds the true gcd degree from above, so the inputs are
            // coprime; no lift or certification is needed.
            return Some(Polynomial::one());
        }
        if deg > best_deg {
            continue; // unlucky prime
        }
        if deg < best_deg {
            best_deg = deg;
            residues = g.iter().map(|&c| BigInt::from(c)).collect();
            modulus = BigInt::from(prime);
            last_lift = None;
        } else {
            crt_merge(&mut residues, &mut modulus, &g, &field);
        }
        if let Some(candidate) = lift_monic(&residues, &modulus) {
            // A junk residue vector passes rational reconstruction far too
            // often to certify every lift; wait until the lift repeats under
            // a fresh prime unless trial division is obviously cheap.
            let stable = last_lift.as_ref() == Some(&candidate);
            let cheap = best_deg * pz.len().max(qz.len()) <= 1024;
            if stable || cheap {
                if let Some(result) = certify_gcd(&candidate, pz, qz) {
                    return Some(result);
                }
            }
            last_lift = Some(candidate);
        } else {
            last_lift = None;
        }
    }
    None
}

/// Merges one prime image into the CRT accumulator.
fn crt_merge(residues: &mut [BigInt], modulus: &mut BigInt, image: &[u64], field: &PrimeField) {
    let m_inv = field.inv(field.from_bigint(modulus));
    let p_big = BigInt::from(field.p);
    for (acc, &r) in residues.iter_mut().zip(image.iter()) {
        // acc' = acc + M * ((r - acc) * M^-1 mod p)
        let delta = field.sub(r, field.from_bigint(acc));
        let corr = field.mul(delta, m_inv);
        *acc += &*modulus * BigInt::from(corr);
    }
    *modulus *= p_big;
}

/// Rational reconstruction of all coefficients of a monic image.
fn lift_monic(residues: &[BigInt], modulus: &BigInt) -> Option<Polynomial> {
    let mut coeffs = Vec::with_capacity(residues.len());
    for (k, r) in residues.iter().enumerate() {
        if k + 1 == residues.len() {
            coeffs.push(Rat::one()); // monic by construction
        } else {
            coeffs.push(rational_reconstruct(r, modulus)?);
        }
    }
    Some(Polynomial::from_coeffs(coeffs))
}

/// Recovers `n/d` from `n * d^-1 mod m` with `|n|, d <= sqrt(m/2)`.
pub fn rational_reconstruct(x: &BigInt, m: &BigInt) -> Option<Rat> {
    if x.is_zero() {
        return Some(Rat::zero());
    }
    let bound = (m / BigInt::from(2)).sqrt();
    let mut r0 = m.clone();
    let mut r1 = x.clone();
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    if t1.is_negative() {
        Some(Rat::new(-r1, -t1))
    } else {
        Some(Rat::new(r1, t1))
    }
}

/// Exact certification: clears denominators of the candidate and trial
/// divides both inputs.  Success proves the candidate is the gcd, because
/// its degree already lower-bounds the truth through the image degrees.
fn certify_gcd(candidate: &Polynomial, pz: &[BigInt], qz: &[BigInt]) -> Option<Polynomial> {
    let (gz, _) = candidate.primitive_parts();
    if exact_div_z(pz, &gz).is_none() {
        return None;
    }
    exact_div_z(qz, &gz)?;
    Some(candidate.clone())
}

/// Exact division in Z[t]; `None` as soon as a step fails.
pub fn exact_div_z(num: &[BigInt], den: &[BigInt]) -> Option<Vec<BigInt>> {
    if den.is_empty() {
        return None;
    }
    if num.is_empty() {
        return Some(Vec::new());
    }
    if num.len() < den.len() {
        return None;
    }
    let lc = den.last().expect("nonzero");
    let dd = den.len() - 1;
    let mut rem: Vec<BigInt> = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for k in (dd..num.len()).rev() {
        let head = std::mem::take(&mut rem[k]);
        if head.is_zero() {
            continue;
        }
        let (q, r) = head.div_rem(lc);
        if !r.is_zero() {
            return None;
        }
        for j in 0..dd {
            let delta = &q * &den[j];
            rem[k - dd + j] -= delta;
        }
        quot[k - dd] = q;
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(quot)
}

/// Subresultant polynomial remainder sequence over Z; monic result over Q.
/// Unconditionally correct and used both as fallback and as a test oracle.
pub fn subresultant_gcd(p: &Polynomial, q: &Polynomial) -> Polynomial {
    if p.is_zero() {
        return q.monic();
    }
    if q.is_zero() {
        return p.monic();
    }
    if p.is_constant() || q.is_constant() {
        return Polynomial::one();
    }
    let (mut r0, _) = p.primitive_parts();
    let (mut r1, _) = q.primitive_parts();
    if r0.len() < r1.len() {
        std::mem::swap(&mut r0, &mut r1);
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let d = (r0.len() - 1) - (r1.len() - 1);
        let rem = pseudo_rem_z(&r0, &r1);
        if rem.is_empty() {
            return poly_from_bigint_coeffs(primitive_z(&r1)).monic();
        }
        if rem.len() == 1 {
            return Polynomial::one();
        }
        let divisor = &g * pow_bigint(&h, d as u32);
        r0 = r1;
        r1 = rem
            .iter()
            .map(|c| {
                let (q, r) = c.div_rem(&divisor);
                debug_assert!(r.is_zero(), "subresultant divisibility");
                q
            })
            .collect();
        g = r0.last().expect("nonzero").clone();
        h = if d == 0 {
            h
        } else {
            // h = g^d * h^(1-d), kept exact via integer division
            let num = pow_bigint(&g, d as u32);
            if d == 1 {
                num
            } else {
                let den = pow_bigint(&h, (d - 1) as u32);
                let (q, r) = num.div_rem(&den);
                debug_assert!(r.is_zero(), "subresultant h update");
                q
            }
        };
    }
}

fn pow_bigint(b: &BigInt, e: u32) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..e {
        acc *= b;
    }
    acc
}

fn primitive_z(coeffs: &[BigInt]) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for c in coeffs {
        g = g.gcd(c);
    }
    if g.is_zero() || g.is_one() {
        return coeffs.to_vec();
    }
    coeffs.iter().map(|c| c / &g).collect()
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b` over Z.
fn pseudo_rem_z(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lc = b.last().expect("nonzero");
    let mut rem: Vec<BigInt> = a.to_vec();
    let mut steps = a.len() as i64 - b.len() as i64 + 1;
    while rem.len() > db && steps > 0 {
        let head = rem.last().expect("nonzero").clone();
        let shift = rem.len() - 1 - db;
        for c in rem.iter_mut() {
            *c *= lc;
        }
        if !head.is_zero() {
            for j in 0..db {
                let delta = &head * &b[j];
                rem[shift + j] -= delta;
            }
        }
        rem.pop();
        while rem.last().is_some_and(|c| c.is_zero()) {
            rem.pop();
        }
        steps -= 1;
    }
    // Account for skipped steps when the degree dropped by more than one.
    while steps > 0 {
        for c in rem.iter_mut() {
            *c *= lc;
        }
        steps -= 1;
    }
    rem
}

/// The largest monic factor of `u` supported on the zero set of `g`:
/// shared factors are peeled off with their full multiplicity in `u`.
pub fn supported_part(u: &Polynomial, g: &Polynomial) -> Polynomial {
    let mut acc = Polynomial::one();
    let mut rem = u.monic();
    let mut s = g.monic();
    loop {
        s = poly_gcd(&rem, &s);
        if s.is_constant() {
            return acc;
        }
        acc = &acc * &s;
        rem = rem.exact_div(&s).expect("gcd divides");
    }
}

/// Yun's squarefree decomposition of a nonconstant polynomial: monic
/// pairwise-coprime squarefree factors with their multiplicities, ascending.
pub fn squarefree_decomposition(p: &Polynomial) -> Vec<(Polynomial, u32)> {
    if p.is_constant() {
        return Vec::new();
    }
    let f = p.monic();
    let df = f.derivative();
    let a = poly_gcd(&f, &df);
    if a.is_constant() {
        return vec![(f, 1)];
    }
    let mut b = f.exact_div(&a).expect("gcd divides");
    let c = df.exact_div(&a).expect("gcd divides");
    let mut z = &c - &b.derivative();
    let mut k = 1u32;
    let mut out = Vec::new();
    while !b.is_constant() {
        let g = poly_gcd(&b, &z);
        if !g.is_constant() {
            out.push((g.clone(), k));
        }
        b = b.exact_div(&g).expect("gcd divides");
        let c_next = z.exact_div(&g).expect("gcd divides");
        z = &c_next - &b.derivative();
        k += 1;
    }
    out
}
