//! Closed points of the projective line over Q, tracked as clusters.
//!
//! Irreducible factorization over Q is never computed.  Instead a registry
//! holds monic squarefree pairwise-coprime polynomials, each standing for the
//! Galois orbit cluster of its roots, and refines them by gcd splitting
//! whenever a new polynomial forces a distinction.  Every query that would
//! need a finer cluster than the registry currently has fails loudly instead
//! of guessing, so results are always valid statements about true closed
//! points even though clusters may lump several of them together.
//!
//! The place at infinity is not an entry; it is addressed by
//! [`Place::Infinity`] and handled separately by order computations.
//!
//! Splitting an entry retires its index and bumps the registry generation.
//! Divisors remember the generation they were computed at; [`Divisor::upgraded`]
//! moves them forward by pushing multiplicities onto the split descendants.
//! Adding a brand-new coprime entry does not bump the generation, because it
//! cannot invalidate any existing divisor: absent indices simply have
//! multiplicity zero.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gcd::{poly_gcd, squarefree_decomposition};
use crate::poly::Polynomial;
use crate::ratfun::RationalFunction;
use crate::zp::{zp_degree, zp_from_rat_coeffs, zp_gcd, zp_rem, PrimeField};

/// A place of P^1 over Q: a registry cluster or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Finite(usize),
    Infinity,
}

#[derive(Debug, Clone)]
enum EntryState {
    Live,
    SplitInto(Vec<usize>),
}

#[derive(Debug, Clone)]
struct Entry {
    poly: Polynomial,
    state: EntryState,
}

/// Prime used only as a cheap non-divisibility screen before exact division.
const SCREEN_PRIME: u64 = (1 << 61) - 1;

#[derive(Debug, Clone)]
pub struct PlaceRegistry {
    entries: Vec<Entry>,
    generation: u64,
}

impl Default for PlaceRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl PlaceRegistry {
    pub fn new() -> Self {
        PlaceRegistry {
            entries: Vec::new(),
            generation: 0,
        }
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Number of entries ever created, live or split.
    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_live(&self, idx: usize) -> bool {
        matches!(self.entries[idx].state, EntryState::Live)
    }

    pub fn entry_poly(&self, idx: usize) -> &Polynomial {
        &self.entries[idx].poly
    }

    pub fn live_indices(&self) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&i| self.is_live(i))
            .collect()
    }

    /// Residue degree of a place: the cluster degree, or 1 at infinity.
    pub fn place_degree(&self, place: Place) -> usize {
        match place {
            Place::Infinity => 1,
            Place::Finite(idx) => self.entries[idx]
                .poly
                .degree()
                .expect("entries are nonconstant"),
        }
    }

    pub fn place_label(&self, place: Place) -> String {
        match place {
            Place::Infinity => "infinity".to_string(),
            Place::Finite(idx) => self.entries[idx].poly.to_string(),
        }
    }

    /// Live leaves below an entry in the split tree.
    pub fn descendants(&self, idx: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![idx];
        while let Some(i) = stack.pop() {
            match &self.entries[i].state {
                EntryState::Live => out.push(i),
                EntryState::SplitInto(children) => stack.extend(children.iter().rev().copied()),
            }
        }
        out.sort_unstable();
        out
    }

    /// Makes the registry fine enough to factor `p` across clusters exactly,
    /// splitting entries as needed, and returns the factorization of `p` as
    /// `(place, multiplicity)` pairs in index order.
    pub fn refine(&mut self, p: &Polynomial) -> Result<Vec<(Place, u32)>> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !p.is_constant() {
            for (level, _mult) in squarefree_decomposition(p) {
                self.insert_squarefree(level);
            }
        }
        self.resolve(p)
    }

    /// Splits live entries against a monic squarefree polynomial and adds
    /// whatever part of it is new.
    fn insert_squarefree(&mut self, mut s: Polynomial) {
        debug_assert!(s.is_monic() && !s.is_constant());
        let snapshot = self.live_indices();
        for idx in snapshot {
            if certainly_coprime(&s, &self.entries[idx].poly) {
                continue;
            }
            let g = poly_gcd(&s, &self.entries[idx].poly);
            if g.is_constant() {
                continue;
            }
            let e = &self.entries[idx].poly;
            if g.degree() < e.degree() {
                let cofactor = e.exact_div(&g).expect("gcd divides the entry");
                let a = self.push_live(g.clone());
                let b = self.push_live(cofactor);
                self.entries[idx].state = EntryState::SplitInto(vec![a, b]);
                self.generation += 1;
            }
            s = s.exact_div(&g).expect("gcd divides the refiner");
            if s.is_constant() {
                return;
            }
        }
        if !s.is_constant() {
            self.push_live(s);
        }
    }

    fn push_live(&mut self, poly: Polynomial) -> usize {
        self.entries.push(Entry {
            poly,
            state: EntryState::Live,
        });
        self.entries.len() - 1
    }

    /// Read-only factorization of `p` over the current clusters.
    ///
    /// Errors with [`Error::UnrefinedPlace`] when `p` does not factor into
    /// current entries with uniform multiplicities, i.e. when a `refine`
    /// call is missing.
    pub fn resolve(&self, p: &Polynomial) -> Result<Vec<(Place, u32)>> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut rem = p.monic();
        let mut out = Vec::new();
        let field = PrimeField::new(SCREEN_PRIME);
        let mut rem_mod = zp_from_rat_coeffs(rem.coeffs(), &field);
        for idx in 0..self.entries.len() {
            if rem.is_constant() {
                break;
            }
            if !self.is_live(idx) {
                continue;
            }
            let e = &self.entries[idx].poly;
            if e.degree() > rem.degree() {
                continue;
            }
            // Entries are monic, so divisibility survives reduction mod any
            // prime; a nonzero screened remainder rules the entry out.
            if let (Some(rm), Some(em)) = (&rem_mod, zp_from_rat_coeffs(e.coeffs(), &field)) {
                let mut probe = rm.clone();
                zp_rem(&mut probe, &em, &field);
                if !probe.is_empty() {
                    continue;
                }
            }
            let mut count = 0u32;
            while let Some(q) = rem.exact_div(e) {
                rem = q;
                count += 1;
                if rem.is_constant() {
                    break;
                }
            }
            if count > 0 {
                out.push((Place::Finite(idx), count));
                rem_mod = zp_from_rat_coeffs(rem.coeffs(), &field);
            }
        }
        if !rem.is_constant() {
            return Err(Error::UnrefinedPlace(rem.to_string()));
        }
        Ok(out)
    }

    /// Exact multiplicity of a live entry in a nonzero polynomial, failing
    /// when the entry's roots occur with different multiplicities.
    fn uniform_multiplicity(&self, p: &Polynomial, idx: usize) -> Result<i64> {
        debug_assert!(!p.is_zero());
        let e = &self.entries[idx].poly;
        let mut rem = p.clone();
        let mut count = 0i64;
        while let Some(q) = rem.exact_div(e) {
            rem = q;
            count += 1;
        }
        if !rem.is_constant()
            && !certainly_coprime(&rem, e)
            && !poly_gcd(&rem, e).is_constant()
        {
            return Err(Error::UnrefinedPlace(e.to_string()));
        }
        Ok(count)
    }

    /// Order of vanishing of a nonzero rational function at a place.
    pub fn ord_at(&self, f: &RationalFunction, place: Place) -> Result<i64> {
        if f.is_zero() {
            return Err(Error::ZeroFunctionOrder);
        }
        match place {
            Place::Infinity => f.ord_at_infinity(),
            Place::Finite(idx) => {
                if !self.is_live(idx) {
                    return Err(Error::UnrefinedPlace(format!(
                        "entry {idx} was split; upgrade the divisor or re-resolve"
                    )));
                }
                // num and den are coprime: a pole rules out zeros of the
                // numerator on the whole cluster
                let down = self.uniform_multiplicity(f.den(), idx)?;
                if down > 0 {
                    return Ok(-down);
                }
                Ok(self.uniform_multiplicity(f.num(), idx)?)
            }
        }
    }

    /// The divisor of zeros of a nonzero function: positive part of its
    /// principal divisor, including the place at infinity.  Refines the
    /// registry against the numerator.
    pub fn zero_divisor(&mut self, f: &RationalFunction) -> Result<Divisor> {
        if f.is_zero() {
            return Err(Error::ZeroFunctionOrder);
        }
        let parts = self.refine(f.num())?;
        let mut div = Divisor::empty(self);
        for (place, mult) in parts {
            if let Place::Finite(idx) = place {
                div.set_finite(idx, mult as i64);
            }
        }
        let inf = f.ord_at_infinity()?;
        if inf > 0 {
            div.infinity = inf;
        }
        Ok(div)
    }
}

/// Certifies coprimality from a single mod-p gcd image.  A monic divisor of
/// a p-integral polynomial is p-integral with p-integral cofactor, so the
/// image of the true gcd divides the image gcd with its degree intact; a
/// constant image gcd therefore proves a constant gcd over Q.  Returning
/// `false` just means the screen was inconclusive.
fn certainly_coprime(a: &Polynomial, e: &Polynomial) -> bool {
    debug_assert!(e.is_monic());
    let field = PrimeField::new(SCREEN_PRIME);
    match (
        zp_from_rat_coeffs(a.coeffs(), &field),
        zp_from_rat_coeffs(e.coeffs(), &field),
    ) {
        (Some(am), Some(em)) if !am.is_empty() => {
            zp_degree(&zp_gcd(&am, &em, &field)) == Some(0)
        }
        _ => false,
    }
}

/// An effective divisor on P^1 relative to a registry generation: finitely
/// many cluster places with positive multiplicities plus a multiplicity at
/// infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divisor {
    finite: BTreeMap<usize, i64>,
    infinity: i64,
    generation: u64,
}

impl Divisor {
    pub fn empty(reg: &PlaceRegistry) -> Self {
        Divisor {
            finite: BTreeMap::new(),
            infinity: 0,
            generation: reg.generation(),
        }
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn infinity_mult(&self) -> i64 {
        self.infinity
    }

    pub fn set_infinity(&mut self, m: i64) {
        debug_assert!(m >= 0);
        self.infinity = m;
    }

    pub fn set_finite(&mut self, idx: usize, mult: i64) {
        debug_assert!(mult >= 0);
        if mult == 0 {
            self.finite.remove(&idx);
        } else {
            self.finite.insert(idx, mult);
        }
    }

    pub fn multiplicity(&self, place: Place) -> i64 {
        match place {
            Place::Infinity => self.infinity,
            Place::Finite(idx) => self.finite.get(&idx).copied().unwrap_or(0),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.infinity == 0
    }

    /// Support in canonical order: finite places ascending, then infinity.
    pub fn support(&self) -> Vec<Place> {
        let mut out: Vec<Place> = self.finite.keys().map(|&i| Place::Finite(i)).collect();
        if self.infinity != 0 {
            out.push(Place::Infinity);
        }
        out
    }

    pub fn finite_entries(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.finite.iter().map(|(&i, &m)| (i, m))
    }

    /// Degree as a divisor on P^1: cluster degrees weigh their multiplicity,
    /// infinity has degree one.
    pub fn degree(&self, reg: &PlaceRegistry) -> i64 {
        let finite: i64 = self
            .finite
            .iter()
            .map(|(&i, &m)| m * reg.place_degree(Place::Finite(i)) as i64)
            .sum();
        finite + self.infinity
    }

    pub fn support_size(&self) -> usize {
        self.finite.len() + usize::from(self.infinity != 0)
    }

    fn check_same_generation(&self, other: &Divisor) -> Result<()> {
        if self.generation != other.generation {
            return Err(Error::GenerationMismatch(self.generation, other.generation));
        }
        Ok(())
    }

    /// Pointwise minimum of two effective divisors at the same generation.
    pub fn min(&self, other: &Divisor) -> Result<Divisor> {
        self.check_same_generation(other)?;
        let mut finite = BTreeMap::new();
        for (&idx, &m) in &self.finite {
            let o = other.multiplicity(Place::Finite(idx));
            let v = m.min(o);
            if v > 0 {
                finite.insert(idx, v);
            }
        }
        Ok(Divisor {
            finite,
            infinity: self.infinity.min(other.infinity),
            generation: self.generation,
        })
    }

    /// Pointwise maximum of two effective divisors at the same generation.
    pub fn sup(&self, other: &Divisor) -> Result<Divisor> {
        self.check_same_generation(other)?;
        let mut finite = self.finite.clone();
        for (&idx, &m) in &other.finite {
            let e = finite.entry(idx).or_insert(0);
            *e = (*e).max(m);
        }
        Ok(Divisor {
            finite,
            infinity: self.infinity.max(other.infinity),
            generation: self.generation,
        })
    }

    /// Whether `self <= other` pointwise.
    pub fn leq(&self, other: &Divisor) -> Result<bool> {
        self.check_same_generation(other)?;
        if self.infinity > other.infinity {
            return Ok(false);
        }
        Ok(self
            .finite
            .iter()
            .all(|(&idx, &m)| m <= other.multiplicity(Place::Finite(idx))))
    }

    /// Rewrites the divisor at the current registry generation by pushing
    /// multiplicities of split entries onto their live descendants.
    pub fn upgraded(&self, reg: &PlaceRegistry) -> Divisor {
        if self.generation == reg.generation() {
            return self.clone();
        }
        let mut finite = BTreeMap::new();
        for (&idx, &m) in &self.finite {
            for leaf in reg.descendants(idx) {
                finite.insert(leaf, m);
            }
        }
        Divisor {
            finite,
            infinity: self.infinity,
            generation: reg.generation(),
        }
    }

    pub fn to_json(&self, reg: &PlaceRegistry) -> Value {
        let places: Vec<Value> = self
            .finite
            .iter()
            .map(|(&idx, &m)| {
                json!({
                    "poly": reg.entry_poly(idx).to_string(),
                    "mult": m,
                })
            })
            .collect();
        json!({
            "places": places,
            "infinity": self.infinity,
            "generation": self.generation,
        })
    }
}
