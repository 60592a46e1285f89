//! Acceptance gate: one test per criterion, each printing a PASS line with
//! its runtime.  Targets are exact values derived independently of the
//! library (by hand factorization, direct big-integer gcds, or explicit
//! chord-tangent computation), so these tests double as end-to-end oracles.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use divseq::ellff::{
    ec_nontorsion_certificate, ec_sequence, Certificate, EllCurveFF, EllPointFF,
};
use divseq::gcd::{poly_gcd, subresultant_gcd};
use divseq::mulgrp::{gm_sequence, is_power_relation, mult_independent, GmPoint, Independence, IndependenceMode};
use divseq::parse::{parse_poly, parse_ratfun};
use divseq::rat::{rat_i64, Rat};
use divseq::seqlab::{analyze, int_gcd_sequence, pq_bound_check};
use divseq::{Divisor, Place, PlaceRegistry, Polynomial, RationalFunction};

fn rf(src: &str) -> RationalFunction {
    parse_ratfun(src).unwrap()
}

fn gm(coords: &[&str]) -> GmPoint {
    GmPoint::new(coords.iter().map(|s| rf(s)).collect()).unwrap()
}

fn label_mults(d: &Divisor, reg: &PlaceRegistry) -> Vec<(String, i64)> {
    let mut out: Vec<(String, i64)> = d
        .support()
        .iter()
        .map(|&pl| (reg.place_label(pl), d.multiplicity(pl)))
        .collect();
    out.sort();
    out
}

fn pass(criterion: u32, what: &str, started: Instant) {
    println!(
        "ACCEPTANCE {criterion}: PASS - {what} ({:.2?})",
        started.elapsed()
    );
}

/// D_{n(t, 1-t)} is {t^2 - t + 1 : 1} exactly at the multiples of six and
/// empty otherwise, over the full horizon of 300.
#[test]
fn torus_progression_structure() {
    let started = Instant::now();
    let mut reg = PlaceRegistry::new();
    let p = gm(&["t", "1 - t"]);
    let seq = gm_sequence(&p, None, 300, &mut reg).unwrap();

    for (d, n) in seq.iter().zip(1u64..) {
        if n % 6 == 0 {
            assert_eq!(
                label_mults(d, &reg),
                vec![("t^2 - t + 1".to_string(), 1)],
                "wrong divisor at n = {n}"
            );
        } else {
            assert!(d.is_empty(), "unexpected support at n = {n}");
        }
    }

    let report = analyze(&seq, true, None, Vec::new()).unwrap();
    assert_eq!(report.support_table.len(), 1);
    let rec = &report.support_table[0];
    assert_eq!(reg.place_label(rec.place), "t^2 - t + 1");
    assert_eq!((rec.n_first, rec.max_mult), (6, 1));
    assert!(rec.dichotomy_ok && rec.divisibility_ok);
    assert_eq!(report.bound_divisor.degree(&reg), 2);
    assert_eq!(report.progression_moduli, vec![6]);
    let sixes: Vec<u32> = (1..=300).filter(|n| n % 6 == 0).collect();
    assert_eq!(report.exceptional_set, sixes);
    assert_eq!(report.progression_consistent, Some(true));
    assert!(report.stabilized);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "horizon-300 run took {elapsed:.2?}");
    pass(1, "torus progression structure at horizon 300", started);
}

/// For f = 1 + (t-1)^2 the order of D_{nf} at t - 1 is exactly two for
/// every n: f^n - 1 = (f - 1)(f^{n-1} + ... + 1) and the cofactor is n != 0
/// at t = 1.
#[test]
fn order_dichotomy_at_fixed_place() {
    let started = Instant::now();
    let mut reg = PlaceRegistry::new();
    let seq = gm_sequence(&gm(&["(t-1)^2 + 1"]), None, 100, &mut reg).unwrap();
    let place = reg
        .live_indices()
        .into_iter()
        .map(Place::Finite)
        .find(|&pl| reg.place_label(pl) == "t - 1")
        .expect("t - 1 tracked");
    for (d, n) in seq.iter().zip(1u64..) {
        assert_eq!(d.multiplicity(place), 2, "order at t - 1 is not 2 at n = {n}");
    }
    pass(2, "order at t - 1 is two for every n <= 100", started);
}

/// The relative sequence D_{nP,Q} for P = (t, 1-t), Q = (t+1, t-1) is
/// dominated by its supremum, which is attained before the trailing window.
#[test]
fn relative_sequence_is_bounded() {
    let started = Instant::now();
    let p = gm(&["t", "1 - t"]);
    let q = gm(&["t + 1", "t - 1"]);
    assert_eq!(is_power_relation(&p, &q, 100).unwrap(), None);

    let mut reg = PlaceRegistry::new();
    let seq = gm_sequence(&p, Some(&q), 100, &mut reg).unwrap();
    let check = pq_bound_check(&seq, None).unwrap();
    assert!(check.stable_tail, "bound still growing in the trailing window");
    for (d, n) in seq.iter().zip(1u64..) {
        assert!(d.leq(&check.bound).unwrap(), "entry {n} exceeds the bound");
    }
    pass(3, "relative-sequence bound attained and stable at horizon 100", started);
}

/// Group law and divisor pipeline on y^2 = x^3 - t^2 x + t^2 with P = (t, t):
/// hand-checked double, exact curve membership of nP, the even-order parity
/// law at good places, and dichotomy plus divisibility over fifty multiples.
#[test]
fn elliptic_pipeline() {
    let started = Instant::now();
    let curve = EllCurveFF::short(rf("-t^2"), rf("t^2")).unwrap();
    let p = EllPointFF::affine(rf("t"), rf("t"));

    let two = curve.mul(2, &p).unwrap();
    assert_eq!(
        two,
        EllPointFF::affine(rf("t^2 - 2t"), rf("-t^3 + 3t^2 - t"))
    );

    let mut multiples = Vec::new();
    let mut r = p.clone();
    for n in 1u64..=20 {
        if n > 1 {
            r = curve.add(&r, &p).unwrap();
        }
        assert!(curve.contains(&r), "{n}P left the curve");
        multiples.push(r.clone());
    }
    assert_eq!(multiples[19], curve.mul(20, &p).unwrap());

    let mut reg = PlaceRegistry::new();
    let (seq, tags) = ec_sequence(&curve, &p, None, 50, &mut reg).unwrap();
    let bad: BTreeSet<Place> = tags.iter().map(|t| t.place).collect();

    // parity law: at a good finite pole of x, ord(x) is even and
    // ord(y) = (3/2) ord(x)
    for point in &multiples {
        let (x, y) = point.coordinates().unwrap();
        for (pl, m) in reg.resolve(x.den()).unwrap() {
            if bad.contains(&pl) {
                continue;
            }
            let vx = -(m as i64);
            assert_eq!(vx % 2, 0, "odd pole order of x at {}", reg.place_label(pl));
            assert_eq!(
                reg.ord_at(y, pl).unwrap(),
                3 * vx / 2,
                "parity law fails at {}",
                reg.place_label(pl)
            );
        }
    }

    let report = analyze(&seq, true, None, tags).unwrap();
    for rec in &report.support_table {
        if bad.contains(&rec.place) {
            continue;
        }
        assert!(
            rec.dichotomy_ok,
            "dichotomy fails at {}",
            reg.place_label(rec.place)
        );
        assert!(
            rec.divisibility_ok,
            "divisibility fails at {}",
            reg.place_label(rec.place)
        );
    }
    for d in &seq {
        assert!(d.leq(&report.bound_divisor).unwrap());
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "elliptic run took {elapsed:.2?}");
    pass(4, "elliptic group law and divisor pipeline at horizon 50", started);
}

/// Specializing (t, t) at t = 1 gives a point of infinite order on
/// y^2 = x^3 - x + 1, certifying the section nontorsion.
#[test]
fn nontorsion_certificate_witness() {
    let started = Instant::now();
    let curve = EllCurveFF::short(rf("-t^2"), rf("t^2")).unwrap();
    let p = EllPointFF::affine(rf("t"), rf("t"));
    let cert = ec_nontorsion_certificate(&curve, &p, 8, 0).unwrap();
    assert_eq!(cert, Certificate::NonTorsion { witness: rat_i64(1) });
    pass(5, "nontorsion witness found at t = 1", started);
}

/// Independence verdicts: monomials are dependent with exponent vector
/// (3, -2); (t, 1-t) is independent; (2t, 3t) is dependent only up to the
/// constant 2/3, hence independent in exact mode.
#[test]
fn independence_verdicts() {
    let started = Instant::now();
    for mode in [IndependenceMode::Exact, IndependenceMode::ModuloConstants] {
        assert_eq!(
            mult_independent(&[rf("t^2"), rf("t^3")], mode).unwrap(),
            Independence::Dependent {
                relation: vec![3, -2],
                constant: rat_i64(1)
            }
        );
        assert_eq!(
            mult_independent(&[rf("t"), rf("1 - t")], mode).unwrap(),
            Independence::Independent
        );
    }
    assert_eq!(
        mult_independent(&[rf("2t"), rf("3t")], IndependenceMode::Exact).unwrap(),
        Independence::Independent
    );
    pass(6, "independence lattice verdicts", started);
}

/// gcd(2^n - 1, 3^n - 1) matches direct big-integer computation and is a
/// divisibility sequence over the whole horizon.
#[test]
fn integer_comparator() {
    let started = Instant::now();
    let report = int_gcd_sequence(2, 3, 300, None).unwrap();
    let first: Vec<u64> = report.values[..6]
        .iter()
        .map(|(_, g)| g.to_u64().unwrap())
        .collect();
    assert_eq!(first, vec![1, 1, 1, 5, 1, 7]);
    assert_eq!(report.values[11], (12, BigUint::from(455u32)));

    for (m, gm) in &report.values {
        for (n, gn) in &report.values {
            if n % m == 0 {
                assert!(
                    gn.is_multiple_of(gm),
                    "gcd at {m} does not divide gcd at {n}"
                );
            }
        }
    }
    // the log statistic is reported, not thresholded
    assert!(report.max_log_ratio_tail.is_finite() && report.max_log_ratio_tail >= 0.0);
    pass(7, "integer comparator values and divisibility at horizon 300", started);
}

const LINEAR_POOL: [&str; 6] = ["t", "t - 1", "t + 1", "t - 2", "t + 2", "t - 3"];
const QUADRATIC_POOL: [&str; 6] = [
    "t^2 + 1",
    "t^2 + 2",
    "t^2 - 2",
    "t^2 + t + 1",
    "t^2 - t + 1",
    "t^2 - 3",
];

/// A coordinate built from pool factors with known net exponents, kept to
/// degree at most six on each side.
fn random_known_coordinate(
    pool: &[Polynomial],
    rng: &mut ChaCha8Rng,
) -> (RationalFunction, Vec<i64>) {
    loop {
        let mut exps = vec![0i64; pool.len()];
        for _ in 0..3 {
            let idx = (rng.next_u32() as usize) % pool.len();
            exps[idx] = (rng.next_u32() % 5) as i64 - 2;
        }
        let side_deg = |sign: i64| -> i64 {
            exps.iter()
                .zip(pool)
                .map(|(&e, p)| {
                    if e * sign > 0 {
                        e.abs() * p.degree().unwrap() as i64
                    } else {
                        0
                    }
                })
                .sum()
        };
        if side_deg(1) > 6 || side_deg(-1) > 6 {
            continue;
        }
        let mut num = Polynomial::constant(rat_i64((rng.next_u32() % 3) as i64 + 1));
        let mut den = Polynomial::one();
        for (&e, p) in exps.iter().zip(pool) {
            if e > 0 {
                num = &num * &p.pow(e as u64);
            } else if e < 0 {
                den = &den * &p.pow((-e) as u64);
            }
        }
        return (RationalFunction::new(num, den).unwrap(), exps);
    }
}

/// Registry divisors against direct factor bookkeeping, and the modular gcd
/// against the subresultant gcd.
#[test]
fn oracle_equivalence_suite() {
    let started = Instant::now();
    let pool: Vec<Polynomial> = LINEAR_POOL
        .iter()
        .chain(QUADRATIC_POOL.iter())
        .map(|s| parse_poly(s).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1065);

    for trial in 0..100 {
        let mut reg = PlaceRegistry::new();
        let (f1, e1) = random_known_coordinate(&pool, &mut rng);
        let (f2, e2) = random_known_coordinate(&pool, &mut rng);
        if !f1.num().is_constant() {
            reg.refine(f1.num()).unwrap();
        }
        if !f2.num().is_constant() {
            reg.refine(f2.num()).unwrap();
        }
        let d1 = reg.zero_divisor(&f1).unwrap();
        let d2 = reg.zero_divisor(&f2).unwrap();
        let dmin = d1.min(&d2).unwrap();

        // factor bookkeeping: clamp each net exponent, then take minima
        let mut expected_degree = 0i64;
        for ((&a, &b), p) in e1.iter().zip(&e2).zip(&pool) {
            let m = a.max(0).min(b.max(0));
            expected_degree += m * p.degree().unwrap() as i64;
            let entry = reg
                .live_indices()
                .into_iter()
                .find(|&i| p.divides(reg.entry_poly(i)));
            let got = entry.map_or(0, |i| dmin.multiplicity(Place::Finite(i)));
            assert_eq!(got, m, "trial {trial}: multiplicity at {p} is off");
        }
        let inf1 = f1.ord_at_infinity().unwrap().max(0);
        let inf2 = f2.ord_at_infinity().unwrap().max(0);
        assert_eq!(dmin.infinity_mult(), inf1.min(inf2), "trial {trial}: infinity");
        assert_eq!(
            dmin.degree(&reg),
            expected_degree + inf1.min(inf2),
            "trial {trial}: stray support"
        );
    }

    // modular gcd against the subresultant oracle on dense random inputs
    let random_poly = |deg: usize, rng: &mut ChaCha8Rng| -> Polynomial {
        let coeffs: Vec<Rat> = (0..=deg)
            .map(|i| {
                let c = (rng.next_u64() % 2_000_001) as i64 - 1_000_000;
                rat_i64(if i == deg && c == 0 { 1 } else { c })
            })
            .collect();
        Polynomial::from_coeffs(coeffs)
    };
    for trial in 0..200 {
        let g = random_poly(1 + (rng.next_u32() as usize % 20), &mut rng);
        let a = random_poly(rng.next_u32() as usize % 41, &mut rng);
        let b = random_poly(rng.next_u32() as usize % 41, &mut rng);
        let p = &a * &g;
        let q = &b * &g;
        assert_eq!(
            poly_gcd(&p, &q),
            subresultant_gcd(&p, &q),
            "trial {trial}: gcd paths disagree"
        );
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "oracle suite took {elapsed:.2?}");
    pass(8, "divisor bookkeeping and gcd oracles agree", started);
}
