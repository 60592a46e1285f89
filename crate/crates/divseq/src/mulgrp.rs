//! Points on split tori G_m^l over Q(t): identity-meeting divisors of their
//! multiples, multiplicative independence, and power relation detection.
//!
//! For a point P = (f_1, ..., f_l) the divisor D_P records, place by place,
//! how deeply the section P meets the identity section (1, ..., 1):
//! the multiplicity at gamma is `min_j max(0, ord_gamma(f_j - 1))`, and the
//! place at infinity is handled through degrees.  Sequences D_{nP} and
//! relative variants D_{nP,Q} follow by applying this to f^n and f^n/g.
//!
//! Independence tests reduce coordinates to exponent vectors over the shared
//! cluster registry of all their zeros and poles; integer left kernels of
//! the exponent matrix then decide dependence, with an exact mode that also
//! tracks prime factorizations and signs of the constants so that only
//! genuine relations `prod f_j^{a_j} = 1` count.

use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gcd::{poly_gcd, supported_part};
use crate::intlin::{left_kernel, normalize_primitive};
use crate::places::{Divisor, Place, PlaceRegistry};
use crate::poly::Polynomial;
use crate::rat::Rat;
use crate::ratfun::RationalFunction;

/// A point of G_m^l over Q(t): nonzero coordinates, l >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GmPoint {
    coords: Vec<RationalFunction>,
}

impl GmPoint {
    pub fn new(coords: Vec<RationalFunction>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Invalid("a torus point needs at least one coordinate".into()));
        }
        if coords.iter().any(|f| f.is_zero()) {
            return Err(Error::Invalid("torus coordinates must be nonzero".into()));
        }
        Ok(GmPoint { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[RationalFunction] {
        &self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|f| f.is_one())
    }

    /// All coordinates constant +-1, i.e. a torsion point of G_m^l(Q(t)).
    pub fn is_sign_tuple(&self) -> bool {
        self.coords.iter().all(|f| {
            f.as_constant()
                .is_some_and(|c| c.is_one() || (-&c).is_one())
        })
    }
}

fn rat_pow_u64(c: &Rat, mut e: u64) -> Rat {
    let mut base = c.clone();
    let mut acc = Rat::one();
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

/// Shared exponent-vector data for a list of nonzero functions: each f is
/// `constant * prod_i entry_i^{e_i}` over the scratch registry clusters.
struct ExponentData {
    rows: Vec<Vec<i64>>,
    constants: Vec<Rat>,
}

fn exponent_data(fs: &[RationalFunction]) -> Result<ExponentData> {
    let mut scratch = PlaceRegistry::new();
    for f in fs {
        debug_assert!(!f.is_zero());
        if !f.num().is_constant() {
            scratch.refine(f.num())?;
        }
        if !f.den().is_constant() {
            scratch.refine(f.den())?;
        }
    }
    let live = scratch.live_indices();
    let col_of = |idx: usize| live.binary_search(&idx).expect("live index");
    let mut rows = Vec::with_capacity(fs.len());
    let mut constants = Vec::with_capacity(fs.len());
    for f in fs {
        let mut row = vec![0i64; live.len()];
        for (place, mult) in scratch.resolve(f.num())? {
            if let Place::Finite(idx) = place {
                row[col_of(idx)] += mult as i64;
            }
        }
        for (place, mult) in scratch.resolve(f.den())? {
            if let Place::Finite(idx) = place {
                row[col_of(idx)] -= mult as i64;
            }
        }
        rows.push(row);
        // canonical form has a monic denominator, so the constant is the
        // leading coefficient of the numerator
        constants.push(f.num().leading_coeff().expect("nonzero").clone());
    }
    Ok(ExponentData { rows, constants })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndependenceMode {
    /// Relations `prod f_j^{a_j} = 1` on the nose.
    Exact,
    /// Relations up to a nonzero rational constant.
    ModuloConstants,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Independence {
    Independent,
    Dependent {
        relation: Vec<i64>,
        constant: Rat,
    },
}

/// Decides multiplicative independence of nonzero rational functions.
///
/// Returned relations are primitive with positive first nonzero entry, and
/// `constant` is the exact value of `prod f_j^{a_j}` (always 1 in exact
/// mode).  In exact mode the constants are factored by trial division, so a
/// constant with a huge prime factor is reported as an error rather than
/// guessed at.
pub fn mult_independent(
    fs: &[RationalFunction],
    mode: IndependenceMode,
) -> Result<Independence> {
    if fs.is_empty() {
        return Err(Error::Invalid("independence test needs at least one function".into()));
    }
    if fs.iter().any(|f| f.is_zero()) {
        return Err(Error::Invalid("independence test requires nonzero functions".into()));
    }
    let data = exponent_data(fs)?;
    let mut matrix: Vec<Vec<i128>> = data
        .rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut signs = vec![0u8; fs.len()];
    if mode == IndependenceMode::Exact {
        // extend rows with prime exponents of the constants; signs join as a
        // separate Z/2 character handled on the kernel below
        let factored: Vec<_> = data
            .constants
            .iter()
            .map(|c| crate::rat::factor_rational(c, crate::rat::TRIAL_DIVISION_BOUND))
            .collect::<Result<Vec<_>>>()?;
        let mut primes: Vec<u64> = factored
            .iter()
            .flat_map(|f| f.factors.iter().map(|&(p, _)| p))
            .collect();
        primes.sort_unstable();
        primes.dedup();
        for (row, fac) in matrix.iter_mut().zip(factored.iter()) {
            for &p in &primes {
                let e = fac
                    .factors
                    .iter()
                    .find(|&&(q, _)| q == p)
                    .map_or(0, |&(_, e)| e);
                row.push(e as i128);
            }
        }
        for (s, fac) in signs.iter_mut().zip(factored.iter()) {
            *s = u8::from(fac.negative);
        }
    }
    let mut kernel = left_kernel(&matrix);
    if mode == IndependenceMode::Exact {
        kernel = sign_even_sublattice(kernel, &signs);
    }
    if kernel.is_empty() {
        return Ok(Independence::Independent);
    }
    let relation = pick_relation(&kernel, &signs);
    let mut product = RationalFunction::one();
    for (f, &a) in fs.iter().zip(relation.iter()) {
        product = &product * &f.pow_i(a)?;
    }
    let constant = product.as_constant().ok_or_else(|| {
        Error::Certification("kernel vector does not produce a constant".into())
    })?;
    if mode == IndependenceMode::Exact && !constant.is_one() {
        return Err(Error::Certification(
            "exact relation does not evaluate to 1".into(),
        ));
    }
    Ok(Independence::Dependent { relation, constant })
}

/// Sublattice of kernel vectors whose sign character vanishes, i.e. whose
/// relation evaluates to a positive constant.  Never empty when the input
/// is nonempty, because doubling any vector kills the character.
fn sign_even_sublattice(basis: Vec<Vec<i128>>, signs: &[u8]) -> Vec<Vec<i128>> {
    let chi = |v: &[i128]| -> u8 {
        v.iter()
            .zip(signs.iter())
            .map(|(&a, &s)| (a.unsigned_abs() % 2) as u8 * s)
            .fold(0, |acc, x| acc ^ x)
    };
    let (even, odd): (Vec<_>, Vec<_>) = basis.into_iter().partition(|v| chi(v) == 0);
    let mut out = even;
    let mut odd_iter = odd.into_iter();
    if let Some(w) = odd_iter.next() {
        for v in odd_iter {
            out.push(v.iter().zip(w.iter()).map(|(&a, &b)| a + b).collect());
        }
        out.push(w.iter().map(|&a| 2 * a).collect());
    }
    out
}

/// Deterministic pick: smallest maximum entry, ties broken lexicographically.
///
/// Making a vector primitive can strip the doubling that the sign
/// sublattice introduced, so sign-odd primitives are doubled back.
fn pick_relation(kernel: &[Vec<i128>], signs: &[u8]) -> Vec<i64> {
    let chi = |v: &[i128]| -> u8 {
        v.iter()
            .zip(signs.iter())
            .map(|(&a, &s)| (a.unsigned_abs() % 2) as u8 * s)
            .fold(0, |acc, x| acc ^ x)
    };
    let best = kernel
        .iter()
        .map(|v| {
            let mut c = normalize_primitive(v);
            if chi(&c) == 1 {
                for x in c.iter_mut() {
                    *x *= 2;
                }
            }
            c
        })
        .min_by(|a, b| {
            let ka = a.iter().map(|x| x.abs()).max().unwrap_or(0);
            let kb = b.iter().map(|x| x.abs()).max().unwrap_or(0);
            ka.cmp(&kb).then_with(|| a.cmp(b))
        })
        .expect("nonempty kernel");
    best.iter()
        .map(|&x| i64::try_from(x).expect("relation entries fit in i64"))
        .collect()
}

/// Finds n with 1 <= n <= horizon and nP = Q, if any.
pub fn is_power_relation(p: &GmPoint, q: &GmPoint, horizon: u64) -> Result<Option<u64>> {
    if p.dim() != q.dim() {
        return Err(Error::Invalid("points live on tori of different rank".into()));
    }
    let all: Vec<RationalFunction> = p
        .coords
        .iter()
        .chain(q.coords.iter())
        .cloned()
        .collect();
    let data = exponent_data(&all)?;
    let (p_rows, q_rows) = data.rows.split_at(p.dim());
    let (p_consts, q_consts) = data.constants.split_at(p.dim());

    // a nonzero exponent anywhere pins down the only possible n
    let mut candidate: Option<u64> = None;
    'outer: for (pr, qr) in p_rows.iter().zip(q_rows.iter()) {
        for (&a, &b) in pr.iter().zip(qr.iter()) {
            if a != 0 {
                if b % a != 0 {
                    return Ok(None);
                }
                let n = b / a;
                if n < 1 {
                    return Ok(None);
                }
                candidate = Some(n as u64);
                break 'outer;
            } else if b != 0 {
                return Ok(None);
            }
        }
    }
    match candidate {
        Some(n) => {
            if n > horizon {
                return Ok(None);
            }
            for (pr, qr) in p_rows.iter().zip(q_rows.iter()) {
                for (&a, &b) in pr.iter().zip(qr.iter()) {
                    let prod = a.checked_mul(n as i64).expect("exponent overflow");
                    if prod != b {
                        return Ok(None);
                    }
                }
            }
            for (cp, cq) in p_consts.iter().zip(q_consts.iter()) {
                if &rat_pow_u64(cp, n) != cq {
                    return Ok(None);
                }
            }
            Ok(Some(n))
        }
        None => {
            // both points are tuples of constants
            let mut acc: Vec<Rat> = vec![Rat::one(); p.dim()];
            for n in 1..=horizon {
                for (a, c) in acc.iter_mut().zip(p_consts.iter()) {
                    *a = &*a * c;
                }
                if acc.iter().zip(q_consts.iter()).all(|(a, c)| a == c) {
                    return Ok(Some(n));
                }
            }
            Ok(None)
        }
    }
}

/// Per-multiple raw data: for each active coordinate the numerator of
/// `h - 1` and the order of `h - 1` at infinity.
struct Layer {
    us: Vec<Polynomial>,
    infinity: i64,
}

impl Layer {
    /// Differences are nonzero by construction: zero ones were dropped as
    /// imposing no condition.
    fn from_differences(diffs: Vec<RationalFunction>) -> Result<Layer> {
        let mut us = Vec::with_capacity(diffs.len());
        let mut infinity = i64::MAX;
        for d in &diffs {
            us.push(d.num().clone());
            infinity = infinity.min(d.ord_at_infinity()?.max(0));
        }
        Ok(Layer { us, infinity })
    }

    /// Common zero part: constant when some coordinate has no finite zeros.
    fn common_core(&self) -> Polynomial {
        let mut g = self.us[0].monic();
        for u in &self.us[1..] {
            if g.is_constant() {
                break;
            }
            g = poly_gcd(&g, u);
        }
        g
    }
}

/// The identity-meeting divisor of P (or of P relative to Q).
///
/// Refines the registry as needed; the result lives at the registry
/// generation current after that refinement.
pub fn gm_divisor(
    p: &GmPoint,
    q: Option<&GmPoint>,
    reg: &mut PlaceRegistry,
) -> Result<Divisor> {
    let layer = difference_layer(p, q, 1)?;
    let core = layer.common_core();
    let accs: Vec<Polynomial> = if core.is_constant() {
        Vec::new()
    } else {
        layer.us.iter().map(|u| supported_part(u, &core)).collect()
    };
    for acc in &accs {
        reg.refine(acc)?;
    }
    assemble_divisor(&layer, &accs, reg)
}

fn difference_layer(p: &GmPoint, q: Option<&GmPoint>, n: u64) -> Result<Layer> {
    if let Some(q) = q {
        if p.dim() != q.dim() {
            return Err(Error::Invalid("points live on tori of different rank".into()));
        }
    }
    let mut diffs = Vec::new();
    for (j, f) in p.coords.iter().enumerate() {
        let g = q.map(|q| &q.coords[j]);
        let h = f.pow_minus(n, g)?;
        if h.is_zero() {
            continue;
        }
        diffs.push(h);
    }
    if diffs.is_empty() {
        return Err(match q {
            Some(_) => Error::PowerRelation { n },
            None => Error::IdentityBasePoint,
        });
    }
    Layer::from_differences(diffs)
}

fn assemble_divisor(layer: &Layer, accs: &[Polynomial], reg: &PlaceRegistry) -> Result<Divisor> {
    let mut div = Divisor::empty(reg);
    if !accs.is_empty() {
        let mut mins: Option<Vec<(usize, i64)>> = None;
        for acc in accs {
            let parts = reg.resolve(acc)?;
            let mut map: Vec<(usize, i64)> = parts
                .into_iter()
                .filter_map(|(pl, m)| match pl {
                    Place::Finite(idx) => Some((idx, m as i64)),
                    Place::Infinity => None,
                })
                .collect();
            map.sort_unstable();
            mins = Some(match mins {
                None => map,
                Some(prev) => prev
                    .into_iter()
                    .filter_map(|(idx, m)| {
                        map.iter()
                            .find(|&&(i, _)| i == idx)
                            .map(|&(_, m2)| (idx, m.min(m2)))
                    })
                    .collect(),
            });
        }
        for (idx, m) in mins.unwrap_or_default() {
            div.set_finite(idx, m);
        }
    }
    div.set_infinity(layer.infinity);
    Ok(div)
}

/// The sequence D_{nP} (or D_{nP,Q}) for n = 1..=nmax, all expressed at one
/// final registry generation.
///
/// Rejects identity and torsion base points, and any power relation
/// `nP = Q` within the horizon, before computing anything.
pub fn gm_sequence(
    p: &GmPoint,
    q: Option<&GmPoint>,
    nmax: u64,
    reg: &mut PlaceRegistry,
) -> Result<Vec<Divisor>> {
    if nmax == 0 {
        return Err(Error::Invalid("horizon must be at least 1".into()));
    }
    if p.is_identity() {
        return Err(Error::IdentityBasePoint);
    }
    if p.is_sign_tuple() {
        return Err(Error::TorsionBasePoint(2));
    }
    if let Some(q) = q {
        if let Some(n) = is_power_relation(p, q, nmax)? {
            return Err(Error::PowerRelation { n });
        }
    }

    // raw layers in parallel: powers are rebuilt per n by binary
    // exponentiation inside pow_minus, and each layer reduces h - 1 once
    let layers: Vec<Layer> = (1..=nmax)
        .into_par_iter()
        .map(|n| difference_layer(p, q, n))
        .collect::<Result<Vec<_>>>()?;

    // find common cores and their supported parts (parallel, read-only)
    let accs_per_n: Vec<Vec<Polynomial>> = layers
        .par_iter()
        .map(|layer| {
            let core = layer.common_core();
            if core.is_constant() {
                Vec::new()
            } else {
                layer.us.iter().map(|u| supported_part(u, &core)).collect()
            }
        })
        .collect();

    // serial refinement pass fixes the final generation
    for accs in &accs_per_n {
        for acc in accs {
            reg.refine(acc)?;
        }
    }

    // read-only assembly against the frozen registry
    let frozen: &PlaceRegistry = reg;
    layers
        .par_iter()
        .zip(accs_per_n.par_iter())
        .map(|(layer, accs)| assemble_divisor(layer, accs, frozen))
        .collect()
}

impl Independence {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Independence::Independent => serde_json::json!({
                "verdict": "independent",
            }),
            Independence::Dependent { relation, constant } => serde_json::json!({
                "verdict": "dependent",
                "relation": relation,
                "constant": constant.to_string(),
            }),
        }
    }
}
