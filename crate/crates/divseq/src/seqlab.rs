//! Analysis of divisor sequences: stabilized support, bound divisors,
//! exceptional sets and their arithmetic-progression structure, the mixed
//! elliptic-times-torus pipeline, and the integer gcd comparator.
//!
//! All statistics are computed over a finite horizon N.  Stabilization over
//! the trailing window is a heuristic surrogate for support finiteness, not
//! a certificate, and the reports say so by carrying the window they used.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::ellff::{ec_sequence, EllCurveFF, EllPointFF, ReductionTag};
use crate::error::{Error, Result};
use crate::places::{Divisor, Place, PlaceRegistry};
use crate::rat::{rat_i64, Rat};
use crate::ratfun::RationalFunction;

/// Trailing-window length used for stabilization checks at horizon `n`.
pub fn default_window(n: u32) -> u32 {
    (n / 4).max(20)
}

/// Per-place summary of a divisor sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportRecord {
    pub place: Place,
    /// Least n with the place in supp D_n.
    pub n_first: u32,
    /// Largest multiplicity over the horizon.
    pub max_mult: i64,
    /// Every nonzero multiplicity at the place equals `max_mult`.
    pub dichotomy_ok: bool,
    /// The place appears at exactly the multiples of `n_first`.
    pub divisibility_ok: bool,
}

/// Horizon-wide summary of a divisor sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceReport {
    pub horizon: u32,
    /// Trailing window actually used for the stabilization verdict.
    pub window: u32,
    pub support_table: Vec<SupportRecord>,
    /// Pointwise supremum of all entries; dominates each D_n by construction.
    pub bound_divisor: Divisor,
    /// Sorted n with D_n different from D_1.
    pub exceptional_set: Vec<u32>,
    /// Sorted distinct first-appearance indices of places outside supp D_1.
    pub progression_moduli: Vec<u32>,
    /// No place appeared for the first time inside the trailing window.
    pub stabilized: bool,
    /// In torsion-comparison mode: the exceptional set equals the set of
    /// n divisible by some listed modulus.
    pub progression_consistent: Option<bool>,
    /// In torsion-comparison mode: product of (1 - 1/d) over the moduli,
    /// the local-density estimate for the unexceptional n.
    pub complement_density: Option<Rat>,
    pub bad_places: Vec<ReductionTag>,
}

fn check_single_generation(seq: &[Divisor]) -> Result<u64> {
    let first = seq.first().ok_or(Error::EmptySequence)?.generation();
    for d in seq {
        if d.generation() != first {
            return Err(Error::GenerationMismatch(first, d.generation()));
        }
    }
    Ok(first)
}

/// Summarizes a divisor sequence indexed by n = 1..=N.
///
/// `torsion_comparison` enables the exceptional-set-versus-progressions
/// equivalence and the density estimate; it is meaningful when every entry
/// compares against the identity section, where support membership is
/// periodic in n.  The window defaults to [`default_window`].
pub fn analyze(
    seq: &[Divisor],
    torsion_comparison: bool,
    window: Option<u32>,
    bad_places: Vec<ReductionTag>,
) -> Result<SequenceReport> {
    check_single_generation(seq)?;
    let n_max = seq.len() as u32;
    let window = window.unwrap_or_else(|| default_window(n_max));

    let mut bound = seq[0].clone();
    for d in &seq[1..] {
        bound = bound.sup(d)?;
    }

    let mut support_table = Vec::new();
    for place in bound.support() {
        let mults: Vec<i64> = seq.iter().map(|d| d.multiplicity(place)).collect();
        let n_first = 1 + mults.iter().position(|&m| m > 0).expect("place in bound") as u32;
        let max_mult = *mults.iter().max().expect("nonempty");
        let dichotomy_ok = mults.iter().all(|&m| m == 0 || m == max_mult);
        let divisibility_ok = mults
            .iter()
            .zip(1u32..)
            .all(|(&m, n)| (m > 0) == (n % n_first == 0));
        support_table.push(SupportRecord {
            place,
            n_first,
            max_mult,
            dichotomy_ok,
            divisibility_ok,
        });
    }

    let exceptional_set: Vec<u32> = seq
        .iter()
        .zip(1u32..)
        .filter(|(d, _)| *d != &seq[0])
        .map(|(_, n)| n)
        .collect();

    let mut progression_moduli: Vec<u32> = support_table
        .iter()
        .filter(|r| seq[0].multiplicity(r.place) == 0)
        .map(|r| r.n_first)
        .collect();
    progression_moduli.sort_unstable();
    progression_moduli.dedup();

    let stabilized = support_table
        .iter()
        .all(|r| r.n_first <= n_max.saturating_sub(window));

    let (progression_consistent, complement_density) = if torsion_comparison {
        let predicted: Vec<u32> = (1..=n_max)
            .filter(|n| progression_moduli.iter().any(|d| n % d == 0))
            .collect();
        let density = progression_moduli
            .iter()
            .map(|&d| Rat::new((d as i64 - 1).into(), (d as i64).into()))
            .product::<Rat>();
        (Some(predicted == exceptional_set), Some(density))
    } else {
        (None, None)
    };

    Ok(SequenceReport {
        horizon: n_max,
        window,
        support_table,
        bound_divisor: bound,
        exceptional_set,
        progression_moduli,
        stabilized,
        progression_consistent,
        complement_density,
        bad_places,
    })
}

impl SequenceReport {
    pub fn to_json(&self, reg: &PlaceRegistry) -> Value {
        let table: Vec<Value> = self
            .support_table
            .iter()
            .map(|r| {
                json!({
                    "place": reg.place_label(r.place),
                    "degree": reg.place_degree(r.place),
                    "n_first": r.n_first,
                    "max_mult": r.max_mult,
                    "dichotomy_ok": r.dichotomy_ok,
                    "divisibility_ok": r.divisibility_ok,
                })
            })
            .collect();
        let bad: Vec<Value> = self
            .bad_places
            .iter()
            .map(|t| {
                json!({
                    "place": reg.place_label(t.place),
                    "status": t.status.as_str(),
                })
            })
            .collect();
        json!({
            "horizon": self.horizon,
            "window": self.window,
            "support_table": table,
            "bound_divisor": self.bound_divisor.to_json(reg),
            "exceptional_set": self.exceptional_set,
            "progression_moduli": self.progression_moduli,
            "stabilized": self.stabilized,
            "progression_consistent": self.progression_consistent,
            "complement_density": self.complement_density.as_ref().map(|d| d.to_string()),
            "bad_places": bad,
        })
    }
}

/// Outcome of the bound-divisor check for a relative sequence D_{nP,Q}.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    /// Pointwise supremum of the sequence.
    pub bound: Divisor,
    /// Least n by which every place has reached its final multiplicity.
    pub first_attained: u32,
    /// The running supremum stopped growing before the trailing window.
    pub stable_tail: bool,
    pub window: u32,
}

/// Computes the supremum divisor of a sequence and checks that it was
/// already attained before the trailing window.
pub fn pq_bound_check(seq: &[Divisor], window: Option<u32>) -> Result<BoundCheck> {
    check_single_generation(seq)?;
    let n_max = seq.len() as u32;
    let window = window.unwrap_or_else(|| default_window(n_max));
    let mut bound = seq[0].clone();
    for d in &seq[1..] {
        bound = bound.sup(d)?;
    }
    let mut running = seq[0].clone();
    let mut first_attained = 1u32;
    for (d, n) in seq.iter().zip(1u32..).skip(1) {
        if running == bound {
            break;
        }
        running = running.sup(d)?;
        first_attained = n;
    }
    let stable_tail = first_attained <= n_max.saturating_sub(window).max(1);
    Ok(BoundCheck {
        bound,
        first_attained,
        stable_tail,
        window,
    })
}

impl BoundCheck {
    pub fn to_json(&self, reg: &PlaceRegistry) -> Value {
        json!({
            "bound": self.bound.to_json(reg),
            "first_attained": self.first_attained,
            "stable_tail": self.stable_tail,
            "window": self.window,
        })
    }
}

/// Combined report JSON for a divisor sequence: the analysis fields plus
/// the bound check, sharing one registry for labels.
pub fn sequence_report_json(
    report: &SequenceReport,
    check: &BoundCheck,
    reg: &PlaceRegistry,
) -> Value {
    let mut v = report.to_json(reg);
    v.as_object_mut()
        .expect("report is an object")
        .insert("bound_check".into(), check.to_json(reg));
    v
}

/// CSV series `n, degree, support_size, equals_d1` for plotting.
pub fn series_csv(seq: &[Divisor], reg: &PlaceRegistry) -> String {
    let mut out = String::from("n,degree,support_size,equals_d1\n");
    for (d, n) in seq.iter().zip(1u32..) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            n,
            d.degree(reg),
            d.support_size(),
            u8::from(d == &seq[0]),
        ));
    }
    out
}

fn split_tags(tags: Vec<ReductionTag>, reg: &PlaceRegistry) -> Vec<ReductionTag> {
    let mut out = Vec::new();
    for tag in tags {
        match tag.place {
            Place::Finite(idx) if !reg.is_live(idx) => {
                // the status is a statement about every root of the cluster,
                // so each descendant inherits it
                for leaf in reg.descendants(idx) {
                    out.push(ReductionTag {
                        place: Place::Finite(leaf),
                        status: tag.status,
                    });
                }
            }
            _ => out.push(tag),
        }
    }
    out.sort_by_key(|t| t.place);
    out
}

/// The sequence `min(D_{n Qe}, div0(f^n - 1))` on E x G_m for n = 1..=nmax.
///
/// The elliptic side runs first; the torus side then refines the registry
/// further, so both sides are upgraded to the final generation before the
/// minima are taken.  Entries with an empty elliptic divisor skip the torus
/// computation, since the minimum is empty regardless.
pub fn mixed_sequence(
    curve: &EllCurveFF,
    qe: &EllPointFF,
    f: &RationalFunction,
    nmax: u64,
    reg: &mut PlaceRegistry,
) -> Result<(Vec<Divisor>, Vec<ReductionTag>)> {
    if f.is_zero() {
        return Err(Error::Invalid("torus coordinate must be nonzero".into()));
    }
    if f.as_constant().is_some_and(|c| c == rat_i64(1) || c == rat_i64(-1)) {
        return Err(Error::RootOfUnityCoordinate);
    }
    let (ell, tags) = ec_sequence(curve, qe, None, nmax, reg)?;
    let mut torus: Vec<Option<Divisor>> = Vec::with_capacity(ell.len());
    for (e, n) in ell.iter().zip(1u64..) {
        if e.is_empty() {
            torus.push(None);
            continue;
        }
        // f is not 0 or a sign, so f^n - 1 is never the zero function
        let u = f.pow_minus(n, None)?;
        torus.push(Some(reg.zero_divisor(&u)?));
    }
    let frozen: &PlaceRegistry = reg;
    let mut out = Vec::with_capacity(ell.len());
    for (e, t) in ell.iter().zip(&torus) {
        let e = e.upgraded(frozen);
        out.push(match t {
            Some(t) => e.min(&t.upgraded(frozen))?,
            None => e,
        });
    }
    Ok((out, split_tags(tags, frozen)))
}

/// One row of the integer comparator: n and gcd(a^n - 1, b^n - 1).
pub type IntGcdRow = (u32, BigUint);

/// Exact gcd sequence of a^n - 1 and b^n - 1 with summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct IntGcdReport {
    pub a: u64,
    pub b: u64,
    pub horizon: u32,
    pub window: u32,
    pub values: Vec<IntGcdRow>,
    /// gcd(a - 1, b - 1), a divisor of every entry.
    pub baseline: BigUint,
    /// Number of n at which the gcd equals the baseline exactly.
    pub baseline_count: u32,
    /// Max of log(gcd)/n over the trailing window; reported, not thresholded.
    pub max_log_ratio_tail: f64,
}

fn ln_biguint(x: &BigUint) -> f64 {
    debug_assert!(!num_traits::Zero::is_zero(x));
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v.ln();
        }
    }
    // mantissa-exponent split for values beyond f64 range
    let shift = x.bits() - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Computes gcd(a^n - 1, b^n - 1) exactly for n = 1..=nmax.
///
/// Entries are independent, so they are computed in parallel and assembled
/// in index order.
pub fn int_gcd_sequence(
    a: u64,
    b: u64,
    nmax: u32,
    window: Option<u32>,
) -> Result<IntGcdReport> {
    if a < 2 || b < 2 || a == b {
        return Err(Error::Invalid(
            "integer comparator needs distinct bases a, b >= 2".into(),
        ));
    }
    if nmax == 0 {
        return Err(Error::Invalid("horizon must be at least 1".into()));
    }
    let window = window.unwrap_or_else(|| default_window(nmax)).min(nmax);
    let values: Vec<IntGcdRow> = (1..=nmax)
        .into_par_iter()
        .map(|n| {
            let an = BigUint::from(a).pow(n) - BigUint::one();
            let bn = BigUint::from(b).pow(n) - BigUint::one();
            (n, an.gcd(&bn))
        })
        .collect();
    let baseline = BigUint::from(a - 1).gcd(&BigUint::from(b - 1));
    let baseline_count = values.iter().filter(|(_, g)| *g == baseline).count() as u32;
    let max_log_ratio_tail = values[(nmax - window) as usize..]
        .iter()
        .map(|(n, g)| ln_biguint(g) / f64::from(*n))
        .fold(0.0f64, f64::max);
    Ok(IntGcdReport {
        a,
        b,
        horizon: nmax,
        window,
        values,
        baseline,
        baseline_count,
        max_log_ratio_tail,
    })
}

impl IntGcdReport {
    pub fn to_json(&self) -> Value {
        let values: Vec<Value> = self
            .values
            .iter()
            .map(|(n, g)| json!({"n": n, "gcd": g.to_string()}))
            .collect();
        json!({
            "a": self.a,
            "b": self.b,
            "horizon": self.horizon,
            "window": self.window,
            "baseline": self.baseline.to_string(),
            "baseline_count": self.baseline_count,
            "max_log_ratio_tail": self.max_log_ratio_tail,
            "values": values,
        })
    }

    /// CSV series `n, gcd, log_gcd_over_n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,gcd,log_gcd_over_n\n");
        for (n, g) in &self.values {
            out.push_str(&format!("{},{},{}\n", n, g, ln_biguint(g) / f64::from(*n)));
        }
        out
    }
}
