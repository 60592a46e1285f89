//! Elliptic curves over Q(t) in Weierstrass form: exact group law, local
//! reduction analysis, divisors of section contact with the zero section,
//! and a nontorsion certificate by specialization.
//!
//! A section nP meets the zero section over a place gamma exactly when its
//! x-coordinate has a pole there in a minimal integral model; the contact
//! multiplicity is half that pole order.  Minimal models are reached by
//! u-scaling alone, which is enough over residue characteristic zero: the
//! scaling exponent at gamma is `m = max_i ceil(-v(a_i)/i)` over the
//! weighted invariants, and the reduction is good precisely when the
//! minimized discriminant valuation `v(disc) + 12m` vanishes.  Places where
//! it does not are reported as tags and excluded from the divisor.

use std::collections::{BTreeMap, BTreeSet};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gcd::supported_part;
use crate::places::{Divisor, Place, PlaceRegistry};
use crate::poly::Polynomial;
use crate::rat::{rat_frac, rat_i64, Rat};
use crate::ratfun::{Frac, RationalFunction};

/// A Weierstrass curve y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over
/// Q(t), with the standard derived invariants precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllCurveFF {
    a1: RationalFunction,
    a2: RationalFunction,
    a3: RationalFunction,
    a4: RationalFunction,
    a6: RationalFunction,
    b2: RationalFunction,
    b4: RationalFunction,
    b6: RationalFunction,
    b8: RationalFunction,
    c4: RationalFunction,
    c6: RationalFunction,
    disc: RationalFunction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EllPointFF {
    Identity,
    Affine {
        x: RationalFunction,
        y: RationalFunction,
    },
}

impl EllPointFF {
    pub fn identity() -> Self {
        EllPointFF::Identity
    }

    pub fn affine(x: RationalFunction, y: RationalFunction) -> Self {
        EllPointFF::Affine { x, y }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, EllPointFF::Identity)
    }

    pub fn coordinates(&self) -> Option<(&RationalFunction, &RationalFunction)> {
        match self {
            EllPointFF::Identity => None,
            EllPointFF::Affine { x, y } => Some((x, y)),
        }
    }
}

fn rf_i64(c: i64) -> RationalFunction {
    RationalFunction::constant(rat_i64(c))
}

impl EllCurveFF {
    pub fn new(
        a1: RationalFunction,
        a2: RationalFunction,
        a3: RationalFunction,
        a4: RationalFunction,
        a6: RationalFunction,
    ) -> Result<Self> {
        let b2 = &(&a1 * &a1) + &(&rf_i64(4) * &a2);
        let b4 = &(&rf_i64(2) * &a4) + &(&a1 * &a3);
        let b6 = &(&a3 * &a3) + &(&rf_i64(4) * &a6);
        let b8 = &(&(&(&(&a1 * &a1) * &a6) + &(&(&rf_i64(4) * &a2) * &a6))
            - &(&(&a1 * &a3) * &a4))
            + &(&(&(&a2 * &a3) * &a3) - &(&a4 * &a4));
        let c4 = &(&b2 * &b2) - &(&rf_i64(24) * &b4);
        let c6 = &(&(&rf_i64(36) * &(&b2 * &b4)) - &(&(&b2 * &b2) * &b2))
            - &(&rf_i64(216) * &b6);
        let disc = &(&(&rf_i64(9) * &(&(&b2 * &b4) * &b6))
            - &(&(&(&b2 * &b2) * &b8) + &(&rf_i64(8) * &(&(&b4 * &b4) * &b4))))
            - &(&rf_i64(27) * &(&b6 * &b6));
        if disc.is_zero() {
            return Err(Error::SingularCurve);
        }
        debug_assert_eq!(
            &(&rf_i64(4) * &b8),
            &(&(&b2 * &b6) - &(&b4 * &b4)),
            "b-invariant identity"
        );
        debug_assert_eq!(
            &(&(&(&c4 * &c4) * &c4) - &(&c6 * &c6)),
            &(&rf_i64(1728) * &disc),
            "c-invariant identity"
        );
        Ok(EllCurveFF {
            a1,
            a2,
            a3,
            a4,
            a6,
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
        })
    }

    /// Short form y^2 = x^3 + a x + b.
    pub fn short(a: RationalFunction, b: RationalFunction) -> Result<Self> {
        let zero = RationalFunction::zero();
        EllCurveFF::new(zero.clone(), zero.clone(), zero, a, b)
    }

    pub fn a_invariants(&self) -> [&RationalFunction; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn discriminant(&self) -> &RationalFunction {
        &self.disc
    }

    pub fn c4(&self) -> &RationalFunction {
        &self.c4
    }

    pub fn contains(&self, p: &EllPointFF) -> bool {
        let Some((x, y)) = p.coordinates() else {
            return true;
        };
        let lhs = &(&(y * y) + &(&(&self.a1 * x) * y)) + &(&self.a3 * y);
        let rhs = &(&(&(x * x) * x) + &(&self.a2 * &(x * x)))
            + &(&(&self.a4 * x) + &self.a6);
        lhs == rhs
    }

    pub fn neg(&self, p: &EllPointFF) -> EllPointFF {
        match p {
            EllPointFF::Identity => EllPointFF::Identity,
            EllPointFF::Affine { x, y } => EllPointFF::Affine {
                x: x.clone(),
                y: &(-y) - &(&(&self.a1 * x) + &self.a3),
            },
        }
    }

    /// Chord and tangent addition.  Formulas run on unreduced fractions; the
    /// slope and the two output coordinates each pay for one reduction.
    pub fn add(&self, p: &EllPointFF, q: &EllPointFF) -> Result<EllPointFF> {
        let Some((x1, y1)) = p.coordinates() else {
            return Ok(q.clone());
        };
        let Some((x2, y2)) = q.coordinates() else {
            return Ok(p.clone());
        };
        let x1f = Frac::from_ratfun(x1);
        let y1f = Frac::from_ratfun(y1);
        let a1f = Frac::from_ratfun(&self.a1);
        let lambda = if x1 == x2 {
            let y2_of_inverse = &(-y1) - &(&(&self.a1 * x1) + &self.a3);
            if *y2 == y2_of_inverse {
                return Ok(EllPointFF::Identity);
            }
            // tangent: (3x^2 + 2a2 x + a4 - a1 y) / (2y + a1 x + a3)
            let num = Frac::constant_i64(3)
                .mul(&x1f.square())
                .add(&Frac::constant_i64(2).mul(&Frac::from_ratfun(&self.a2)).mul(&x1f))
                .add(&Frac::from_ratfun(&self.a4))
                .sub(&a1f.mul(&y1f));
            let den = Frac::constant_i64(2)
                .mul(&y1f)
                .add(&a1f.mul(&x1f))
                .add(&Frac::from_ratfun(&self.a3));
            num.div(&den)?
        } else {
            let num = Frac::from_ratfun(y2).sub(&y1f);
            let den = Frac::from_ratfun(x2).sub(&x1f);
            num.div(&den)?
        };
        // The slope enters every later term; reducing it once here keeps the
        // unreduced tails of x3 and y3 near the size of the final results.
        let lambda = Frac::from_ratfun(&lambda.reduce()?);
        let x3 = lambda
            .square()
            .add(&a1f.mul(&lambda))
            .sub(&Frac::from_ratfun(&self.a2))
            .sub(&x1f)
            .sub(&Frac::from_ratfun(x2))
            .reduce()?;
        let nu = y1f.sub(&lambda.mul(&x1f));
        let y3 = lambda
            .add(&a1f)
            .neg()
            .mul(&Frac::from_ratfun(&x3))
            .sub(&nu)
            .sub(&Frac::from_ratfun(&self.a3))
            .reduce()?;
        Ok(EllPointFF::Affine { x: x3, y: y3 })
    }

    pub fn mul(&self, n: u64, p: &EllPointFF) -> Result<EllPointFF> {
        let mut r = EllPointFF::Identity;
        if n == 0 {
            return Ok(r);
        }
        let bits = 64 - n.leading_zeros();
        for i in (0..bits).rev() {
            r = self.add(&r, &r)?;
            if (n >> i) & 1 == 1 {
                r = self.add(&r, p)?;
            }
        }
        Ok(r)
    }

    /// All multiples nP for n = 1..=nmax along the division-polynomial
    /// ladder; errors with the exact order when P is torsion of order at
    /// most nmax.
    ///
    /// Division polynomials are evaluated at P in the normalized form
    /// `u_k = psi_k(P)` for odd k and `psi_k(P)/psi_2(P)` for even k, which
    /// the doubling recurrences relate without any division.  Successive
    /// values share factors only over places of bad reduction, so each
    /// output coordinate needs one small reduction, while a chord-tangent
    /// chain drags unreduced parts that grow with the whole chain.
    fn multiples_ladder(&self, p: &EllPointFF, nmax: u64) -> Result<Vec<EllPointFF>> {
        let Some((x, y)) = p.coordinates() else {
            return Err(Error::IdentityBasePoint);
        };
        let mut pts = Vec::with_capacity(nmax as usize);
        pts.push(p.clone());
        if nmax == 1 {
            return Ok(pts);
        }
        let two = rf_i64(2);
        let psi2 = &(&(&two * y) + &(&self.a1 * x)) + &self.a3;
        if psi2.is_zero() {
            return Err(Error::TorsionBasePoint(2));
        }
        // polynomials in x alone, highest coefficient first
        let horner = |coeffs: &[RationalFunction]| {
            let mut acc = RationalFunction::zero();
            for c in coeffs {
                acc = &(&acc * x) + c;
            }
            acc
        };
        // psi_2^2, with y eliminated through the curve equation
        let f = horner(&[
            rf_i64(4),
            self.b2.clone(),
            &two * &self.b4,
            self.b6.clone(),
        ]);
        debug_assert_eq!(f, &psi2 * &psi2, "square of psi_2");
        let f2 = &f * &f;
        let u3 = horner(&[
            rf_i64(3),
            self.b2.clone(),
            &rf_i64(3) * &self.b4,
            &rf_i64(3) * &self.b6,
            self.b8.clone(),
        ]);
        let u4 = horner(&[
            rf_i64(2),
            self.b2.clone(),
            &rf_i64(5) * &self.b4,
            &rf_i64(10) * &self.b6,
            &rf_i64(10) * &self.b8,
            &(&self.b2 * &self.b8) - &(&self.b4 * &self.b6),
            &(&self.b4 * &self.b8) - &(&self.b6 * &self.b6),
        ]);
        let horizon = nmax as usize + 2;
        let mut u: Vec<RationalFunction> = Vec::with_capacity(horizon + 1);
        u.push(RationalFunction::zero());
        u.push(RationalFunction::one());
        u.push(RationalFunction::one());
        u.push(u3);
        u.push(u4);
        for k in 5..=horizon {
            let next = if k % 2 == 1 {
                let m = (k - 1) / 2;
                let a = &u[m + 2] * &u[m].pow_i(3)?;
                let b = &u[m - 1] * &u[m + 1].pow_i(3)?;
                if m % 2 == 0 {
                    &(&f2 * &a) - &b
                } else {
                    &a - &(&f2 * &b)
                }
            } else {
                let m = k / 2;
                let j = &(&u[m + 2] * &u[m - 1].pow_i(2)?)
                    - &(&u[m - 2] * &u[m + 1].pow_i(2)?);
                &u[m] * &j
            };
            u.push(next);
        }
        let half = RationalFunction::constant(rat_frac(1, 2));
        for n in 2..=nmax as usize {
            if u[n].is_zero() {
                return Err(Error::TorsionBasePoint(n as u64));
            }
            let un2 = u[n].pow_i(2)?;
            let un3 = &un2 * &u[n];
            let v = &u[n - 1] * &u[n + 1];
            let j = &(&u[n + 2] * &u[n - 1].pow_i(2)?)
                - &(&u[n - 2] * &u[n + 1].pow_i(2)?);
            let num = &psi2 * &j;
            let (xn, ybase) = if n % 2 == 1 {
                (
                    x - &(&f * &v).try_div(&un2)?,
                    num.try_div(&(&two * &un3))?,
                )
            } else {
                (
                    x - &v.try_div(&(&f * &un2))?,
                    num.try_div(&(&(&two * &f2) * &un3))?,
                )
            };
            let yn = &ybase - &(&(&(&self.a1 * &xn) + &self.a3) * &half);
            pts.push(EllPointFF::affine(xn, yn));
        }
        Ok(pts)
    }

    fn weighted_invariants(&self) -> Vec<(&RationalFunction, i64)> {
        [
            (&self.a1, 1),
            (&self.a2, 2),
            (&self.a3, 3),
            (&self.a4, 4),
            (&self.a6, 6),
        ]
        .into_iter()
        .filter(|(a, _)| !a.is_zero())
        .collect()
    }

    /// Refines the registry against everything local analysis will query:
    /// numerators and denominators of the invariants and the discriminant.
    fn refine_local_data(&self, reg: &mut PlaceRegistry) -> Result<()> {
        let mut polys = Vec::new();
        for (a, _) in self.weighted_invariants() {
            polys.push(a.num());
            polys.push(a.den());
        }
        polys.push(self.disc.num());
        polys.push(self.disc.den());
        for p in polys {
            if !p.is_constant() {
                reg.refine(p)?;
            }
        }
        Ok(())
    }

    /// Places where reduction might not be good as given: zeros of the
    /// discriminant numerator and poles of the invariants.
    fn candidate_places(&self, reg: &PlaceRegistry) -> Result<Vec<Place>> {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        let mut collect = |parts: Vec<(Place, u32)>| {
            for (pl, _) in parts {
                if let Place::Finite(idx) = pl {
                    set.insert(idx);
                }
            }
        };
        if !self.disc.num().is_constant() {
            collect(reg.resolve(self.disc.num())?);
        }
        for (a, _) in self.weighted_invariants() {
            if !a.den().is_constant() {
                collect(reg.resolve(a.den())?);
            }
        }
        Ok(set.into_iter().map(Place::Finite).collect())
    }

    fn local_model(&self, reg: &PlaceRegistry, place: Place) -> Result<LocalModel> {
        let mut m = i64::MIN;
        for (a, w) in self.weighted_invariants() {
            let v = reg.ord_at(a, place)?;
            m = m.max(div_ceil_i64(-v, w));
        }
        let vd = reg.ord_at(&self.disc, place)?;
        let vmin = vd + 12 * m;
        debug_assert!(vmin >= 0, "minimized discriminant order must not be negative");
        let status = if vmin == 0 {
            if m == 0 {
                ReductionStatus::Good
            } else {
                ReductionStatus::MinimizedThenGood
            }
        } else {
            ReductionStatus::Bad
        };
        Ok(LocalModel { m, status })
    }

    fn local_models(&self, reg: &PlaceRegistry) -> Result<CurveContext> {
        let mut models = BTreeMap::new();
        for pl in self.candidate_places(reg)? {
            models.insert(pl, self.local_model(reg, pl)?);
        }
        models.insert(Place::Infinity, self.local_model(reg, Place::Infinity)?);
        Ok(CurveContext { models })
    }
}

fn div_ceil_i64(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    (a + b - 1).div_euclid(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionStatus {
    Good,
    Bad,
    MinimizedThenGood,
}

impl ReductionStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReductionStatus::Good => "good",
            ReductionStatus::Bad => "bad",
            ReductionStatus::MinimizedThenGood => "minimized-then-good",
        }
    }
}

/// Reduction verdict at one place of the base line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTag {
    pub place: Place,
    pub status: ReductionStatus,
}

#[derive(Debug, Clone, Copy)]
struct LocalModel {
    m: i64,
    status: ReductionStatus,
}

const TRIVIAL_MODEL: LocalModel = LocalModel {
    m: 0,
    status: ReductionStatus::Good,
};

struct CurveContext {
    models: BTreeMap<Place, LocalModel>,
}

impl CurveContext {
    fn model(&self, pl: Place) -> LocalModel {
        self.models.get(&pl).copied().unwrap_or(TRIVIAL_MODEL)
    }

    fn tags(&self) -> Vec<ReductionTag> {
        self.models
            .iter()
            .filter(|(_, m)| m.status != ReductionStatus::Good)
            .map(|(&place, m)| ReductionTag {
                place,
                status: m.status,
            })
            .collect()
    }

    /// True when some usable place needs a descending rescale, in which
    /// case numerator valuations of coordinates start to matter.
    fn has_negative_descent(&self) -> bool {
        self.models
            .iter()
            .any(|(pl, m)| {
                matches!(pl, Place::Finite(_)) && m.m < 0 && m.status != ReductionStatus::Bad
            })
    }
}

/// Contact multiplicity of a section with the zero section from the orders
/// of x and y and the scaling exponent: `-(ord x + 2m)/2`, consistency
/// checked against y.
fn contact_multiplicity(vx: i64, vy: i64, m: i64, label: &str) -> Result<i64> {
    let o = vx + 2 * m;
    if o >= 0 {
        return Ok(0);
    }
    if o % 2 != 0 {
        return Err(Error::Certification(format!(
            "contact order parity violated at {label}: minimized ord(x) = {o}"
        )));
    }
    let k = -o / 2;
    if vy + 3 * m != -3 * k {
        return Err(Error::Certification(format!(
            "x/y contact orders disagree at {label}: expected ord(y) + 3m = {}, got {}",
            -3 * k,
            vy + 3 * m
        )));
    }
    Ok(k)
}

fn finite_mult_map(reg: &PlaceRegistry, p: &Polynomial) -> Result<BTreeMap<usize, i64>> {
    let mut out = BTreeMap::new();
    if p.is_constant() {
        return Ok(out);
    }
    for (pl, m) in reg.resolve(p)? {
        if let Place::Finite(idx) = pl {
            out.insert(idx, m as i64);
        }
    }
    Ok(out)
}

fn section_divisor(
    ctx: &CurveContext,
    x: &RationalFunction,
    y: &RationalFunction,
    reg: &PlaceRegistry,
) -> Result<Divisor> {
    let mut div = Divisor::empty(reg);
    if x.is_zero() {
        return Ok(div);
    }
    let xden = finite_mult_map(reg, x.den())?;
    let yden = finite_mult_map(reg, y.den())?;
    for (&idx, &dm) in &xden {
        let pl = Place::Finite(idx);
        let model = ctx.model(pl);
        if model.status == ReductionStatus::Bad {
            continue;
        }
        let vx = -dm;
        let vy = -yden.get(&idx).copied().unwrap_or(0);
        let k = contact_multiplicity(vx, vy, model.m, &reg.place_label(pl))?;
        div.set_finite(idx, k);
    }
    // descent places can have contact without a visible pole of x
    for (&pl, model) in &ctx.models {
        let Place::Finite(idx) = pl else { continue };
        if model.m >= 0 || model.status == ReductionStatus::Bad || xden.contains_key(&idx) {
            continue;
        }
        let vx = reg.ord_at(x, pl)?;
        if vx + 2 * model.m < 0 {
            let vy = if y.is_zero() { 0 } else { reg.ord_at(y, pl)? };
            div.set_finite(idx, contact_multiplicity(vx, vy, model.m, &reg.place_label(pl))?);
        }
    }
    let model = ctx.model(Place::Infinity);
    if model.status != ReductionStatus::Bad {
        let vx = x.ord_at_infinity()?;
        if vx + 2 * model.m < 0 {
            let vy = if y.is_zero() { 0 } else { y.ord_at_infinity()? };
            div.set_infinity(contact_multiplicity(vx, vy, model.m, "infinity")?);
        }
    }
    Ok(div)
}

/// Shared pipeline: refine everything the given affine sections need, fix
/// the local models on the final registry, then assemble divisors
/// read-only and in parallel.
fn ec_divisors(
    curve: &EllCurveFF,
    pts: &[EllPointFF],
    reg: &mut PlaceRegistry,
) -> Result<(Vec<Divisor>, Vec<ReductionTag>)> {
    let coords: Vec<(&RationalFunction, &RationalFunction)> = pts
        .iter()
        .map(|p| p.coordinates().ok_or(Error::IdentityBasePoint))
        .collect::<Result<_>>()?;
    curve.refine_local_data(reg)?;
    for (x, y) in &coords {
        if !x.den().is_constant() {
            reg.refine(x.den())?;
        }
        if !y.den().is_constant() {
            reg.refine(y.den())?;
        }
    }
    let mut ctx = curve.local_models(reg)?;
    if ctx.has_negative_descent() && !curve.disc.num().is_constant() {
        // zero orders of the coordinates at discriminant places become
        // relevant; pull their supported parts in and rebuild the models on
        // the finer registry
        let core = curve.disc.num().monic();
        for (x, y) in &coords {
            for f in [*x, *y] {
                if f.is_zero() {
                    continue;
                }
                let s = supported_part(f.num(), &core);
                if !s.is_constant() {
                    reg.refine(&s)?;
                }
            }
        }
        ctx = curve.local_models(reg)?;
    }
    let frozen: &PlaceRegistry = reg;
    let divisors = coords
        .par_iter()
        .map(|(x, y)| section_divisor(&ctx, x, y, frozen))
        .collect::<Result<Vec<_>>>()?;
    Ok((divisors, ctx.tags()))
}

/// The contact divisor of a single section with the zero section, plus the
/// reduction tags of the curve.
pub fn ec_section_divisor(
    curve: &EllCurveFF,
    point: &EllPointFF,
    reg: &mut PlaceRegistry,
) -> Result<(Divisor, Vec<ReductionTag>)> {
    if point.is_identity() {
        return Err(Error::IdentityBasePoint);
    }
    if !curve.contains(point) {
        return Err(Error::PointNotOnCurve);
    }
    let (mut divs, tags) = ec_divisors(curve, std::slice::from_ref(point), reg)?;
    Ok((divs.pop().expect("one divisor"), tags))
}

/// Divisors of nP (or nP - Q) for n = 1..=nmax, sharing one final registry
/// generation, plus the curve's reduction tags.
///
/// Degenerate configurations are rejected: identity base point, torsion
/// base point, and nP = Q within the horizon.
pub fn ec_sequence(
    curve: &EllCurveFF,
    p: &EllPointFF,
    q: Option<&EllPointFF>,
    nmax: u64,
    reg: &mut PlaceRegistry,
) -> Result<(Vec<Divisor>, Vec<ReductionTag>)> {
    if nmax == 0 {
        return Err(Error::Invalid("horizon must be at least 1".into()));
    }
    if p.is_identity() {
        return Err(Error::IdentityBasePoint);
    }
    if !curve.contains(p) {
        return Err(Error::PointNotOnCurve);
    }
    if let Some(q) = q {
        if !curve.contains(q) {
            return Err(Error::PointNotOnCurve);
        }
    }
    let neg_q = q.map(|q| curve.neg(q));
    let multiples = curve.multiples_ladder(p, nmax)?;
    let mut pts = Vec::with_capacity(nmax as usize);
    for (r, n) in multiples.iter().zip(1u64..) {
        let s = match &neg_q {
            Some(nq) => curve.add(r, nq)?,
            None => r.clone(),
        };
        if s.is_identity() {
            return Err(Error::PowerRelation { n });
        }
        pts.push(s);
    }
    ec_divisors(curve, &pts, reg)
}

/// Outcome of the nontorsion certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Some specialization t = witness has a point of infinite order, so
    /// the section has infinite order.
    NonTorsion { witness: Rat },
    /// The section is torsion of this exact order.
    TorsionOrder(u64),
    /// Every good specialization tried was torsion of small order.
    Inconclusive { tried: u32 },
}

#[derive(Clone, PartialEq)]
enum QPoint {
    O,
    Xy(Rat, Rat),
}

struct QCurve {
    a1: Rat,
    a2: Rat,
    a3: Rat,
    a4: Rat,
    a6: Rat,
}

impl QCurve {
    fn contains(&self, p: &QPoint) -> bool {
        let QPoint::Xy(x, y) = p else { return true };
        let lhs = y * y + &self.a1 * x * y + &self.a3 * y;
        let rhs = x * x * x + &self.a2 * x * x + &self.a4 * x + &self.a6;
        lhs == rhs
    }

    fn add(&self, p: &QPoint, q: &QPoint) -> QPoint {
        let QPoint::Xy(x1, y1) = p else { return q.clone() };
        let QPoint::Xy(x2, y2) = q else { return p.clone() };
        let lambda = if x1 == x2 {
            if *y2 == -y1 - &self.a1 * x1 - &self.a3 {
                return QPoint::O;
            }
            (rat_i64(3) * x1 * x1 + rat_i64(2) * &self.a2 * x1 + &self.a4 - &self.a1 * y1)
                / (rat_i64(2) * y1 + &self.a1 * x1 + &self.a3)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda + &self.a1 * &lambda - &self.a2 - x1 - x2;
        let nu = y1 - &lambda * x1;
        let y3 = -(&lambda + &self.a1) * &x3 - nu - &self.a3;
        QPoint::Xy(x3, y3)
    }
}

/// Deterministic specialization candidates: a fixed list of small integers
/// followed by seed-derived extras, zero excluded.
fn candidate_pool(trials: u32, seed: u64) -> Vec<Rat> {
    let base: [i64; 26] = [
        1, 2, 3, -1, 5, -2, 7, -3, 11, -5, 13, -7, 17, -11, 19, -13, 23, -17, 29, -19, 31,
        -23, 37, -29, 41, -31,
    ];
    let mut seen: BTreeSet<i64> = base.iter().copied().collect();
    let mut out: Vec<i64> = base.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = base.len() + trials as usize * 4 + 8;
    while out.len() < target {
        let v = (rng.next_u64() % 20001) as i64 - 10000;
        if v != 0 && seen.insert(v) {
            out.push(v);
        }
    }
    out.into_iter().map(rat_i64).collect()
}

/// Certifies that P has infinite order in E(Q(t)), or finds its exact
/// torsion order.
///
/// Generic multiples rule out small torsion first.  Then each good
/// specialization t = c (integral invariants and coordinates, nonzero
/// discriminant) is tested over Q: a specialized point surviving twelve
/// multiples is nontorsion by the uniform rational torsion bound, and that
/// lifts back to the section.  Specializations where the point becomes
/// torsion prove nothing and are merely counted.
pub fn ec_nontorsion_certificate(
    curve: &EllCurveFF,
    p: &EllPointFF,
    trials: u32,
    seed: u64,
) -> Result<Certificate> {
    if trials == 0 {
        return Err(Error::Invalid("certificate needs at least one trial".into()));
    }
    if p.is_identity() {
        return Ok(Certificate::TorsionOrder(1));
    }
    if !curve.contains(p) {
        return Err(Error::PointNotOnCurve);
    }
    let mut r = p.clone();
    for k in 2..=12u64 {
        r = curve.add(&r, p)?;
        if r.is_identity() {
            return Ok(Certificate::TorsionOrder(k));
        }
    }
    let (x, y) = p.coordinates().expect("affine");
    let mut good = 0u32;
    for c in candidate_pool(trials, seed) {
        let specialized = (|| {
            let qc = QCurve {
                a1: curve.a1.eval(&c)?,
                a2: curve.a2.eval(&c)?,
                a3: curve.a3.eval(&c)?,
                a4: curve.a4.eval(&c)?,
                a6: curve.a6.eval(&c)?,
            };
            let d = curve.disc.eval(&c)?;
            if d == rat_i64(0) {
                return None;
            }
            Some((qc, x.eval(&c)?, y.eval(&c)?))
        })();
        let Some((qc, xc, yc)) = specialized else {
            continue;
        };
        let pc = QPoint::Xy(xc, yc);
        debug_assert!(qc.contains(&pc), "specialization left the curve");
        good += 1;
        let mut rc = pc.clone();
        let mut torsion = false;
        for _ in 2..=12u64 {
            rc = qc.add(&rc, &pc);
            if rc == QPoint::O {
                torsion = true;
                break;
            }
        }
        if !torsion {
            // no rational point has order beyond twelve, so pc is
            // nontorsion over Q and p is nontorsion over Q(t)
            return Ok(Certificate::NonTorsion { witness: c });
        }
        if good == trials {
            break;
        }
    }
    if good == 0 {
        return Err(Error::NoGoodSpecialization);
    }
    Ok(Certificate::Inconclusive { tried: good })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_ratfun;

    fn rf(src: &str) -> RationalFunction {
        parse_ratfun(src).unwrap()
    }

    /// y^2 = x^3 - t^2 x + t^2 with the section (t, t).
    fn showcase() -> (EllCurveFF, EllPointFF) {
        let e = EllCurveFF::short(rf("0 - t^2"), rf("t^2")).unwrap();
        (e, EllPointFF::affine(rf("t"), rf("t")))
    }

    fn label_mults(d: &Divisor, reg: &PlaceRegistry) -> Vec<(String, i64)> {
        d.support()
            .iter()
            .map(|&pl| (reg.place_label(pl), d.multiplicity(pl)))
            .collect()
    }

    #[test]
    fn invariants_of_short_curve() {
        let (e, p) = showcase();
        assert_eq!(e.discriminant(), &rf("64t^6 - 432t^4"));
        assert_eq!(e.c4(), &rf("48t^2"));
        assert!(e.contains(&p));
        assert!(!e.contains(&EllPointFF::affine(rf("t"), rf("t + 1"))));
        assert!(matches!(
            EllCurveFF::short(rf("0"), rf("0")),
            Err(Error::SingularCurve)
        ));
    }

    #[test]
    fn group_law_matches_hand_computation() {
        let (e, p) = showcase();
        let two_p = e.add(&p, &p).unwrap();
        assert_eq!(
            two_p,
            EllPointFF::affine(rf("t^2 - 2t"), rf("-t^3 + 3t^2 - t"))
        );
        let three_p = e.add(&two_p, &p).unwrap();
        let (x3, _) = three_p.coordinates().unwrap();
        assert_eq!(x3, &rf("(t^3 - 2t^2 - 3t + 4)/((t-3)^2)"));
        for n in 1..=6 {
            assert!(e.contains(&e.mul(n, &p).unwrap()), "n = {n}");
        }
        assert_eq!(e.mul(3, &p).unwrap(), three_p);
        assert_eq!(e.mul(5, &p).unwrap(), e.add(&two_p, &e.mul(3, &p).unwrap()).unwrap());
        assert!(e.add(&p, &e.neg(&p)).unwrap().is_identity());
        assert_eq!(e.add(&EllPointFF::identity(), &p).unwrap(), p);
    }

    #[test]
    fn ladder_matches_chord_tangent_chain() {
        let (e, p) = showcase();
        // substituting y -> y + x + t moves the showcase to a model with
        // a1 = 2 and a3 = 2t, exercising the correction terms of the ladder
        let e2 = EllCurveFF::new(
            rf("2"),
            rf("-1"),
            rf("2t"),
            rf("-t^2 - 2t"),
            rf("0"),
        )
        .unwrap();
        let p2 = EllPointFF::affine(rf("t"), rf("-t"));
        assert!(e2.contains(&p2));
        for (curve, base) in [(&e, &p), (&e2, &p2)] {
            let ladder = curve.multiples_ladder(base, 8).unwrap();
            let mut r = base.clone();
            for (n, pt) in ladder.iter().enumerate() {
                if n > 0 {
                    r = curve.add(&r, base).unwrap();
                }
                assert_eq!(pt, &r, "multiple {} disagrees", n + 1);
            }
        }
    }

    #[test]
    fn ladder_reports_odd_torsion_order() {
        // (0, 0) has exact order 3 on y^2 + y = x^3
        let e = EllCurveFF::new(rf("0"), rf("0"), rf("1"), rf("0"), rf("0")).unwrap();
        let p = EllPointFF::affine(rf("0"), rf("0"));
        assert!(e.contains(&p));
        assert!(matches!(
            e.multiples_ladder(&p, 5),
            Err(Error::TorsionBasePoint(3))
        ));
        assert_eq!(e.multiples_ladder(&p, 2).unwrap().len(), 2);
    }

    #[test]
    fn two_torsion_point_is_detected() {
        // (0, 0) is 2-torsion on y^2 = x^3 - t x
        let e = EllCurveFF::short(rf("0 - t"), rf("0")).unwrap();
        let p = EllPointFF::affine(rf("0"), rf("0"));
        assert!(e.contains(&p));
        assert!(e.add(&p, &p).unwrap().is_identity());
        assert_eq!(
            ec_nontorsion_certificate(&e, &p, 3, 7).unwrap(),
            Certificate::TorsionOrder(2)
        );
        let mut reg = PlaceRegistry::new();
        assert!(matches!(
            ec_sequence(&e, &p, None, 5, &mut reg),
            Err(Error::TorsionBasePoint(2))
        ));
    }

    #[test]
    fn reduction_tags_of_showcase_curve() {
        let (e, p) = showcase();
        let mut reg = PlaceRegistry::new();
        let (_, tags) = ec_section_divisor(&e, &p, &mut reg).unwrap();
        let seen: Vec<(String, ReductionStatus)> = tags
            .iter()
            .map(|t| (reg.place_label(t.place), t.status))
            .collect();
        assert_eq!(
            seen,
            vec![
                ("t".to_string(), ReductionStatus::Bad),
                ("t^2 - 27/4".to_string(), ReductionStatus::Bad),
                ("infinity".to_string(), ReductionStatus::Bad),
            ]
        );
    }

    #[test]
    fn small_multiples_have_expected_divisors() {
        let (e, p) = showcase();
        let mut reg = PlaceRegistry::new();
        let (divs, _) = ec_sequence(&e, &p, None, 3, &mut reg).unwrap();
        assert!(divs[0].is_empty());
        assert!(divs[1].is_empty());
        assert_eq!(label_mults(&divs[2], &reg), vec![("t - 3".to_string(), 1)]);
    }

    #[test]
    fn rescaled_model_gives_same_divisors() {
        // scale the showcase by u = t - 1: a4' = u^4 a4, a6' = u^6 a6,
        // P' = (u^2 x, u^3 y); divisors must agree, and the scaled place
        // must be tagged as minimized
        let (e, p) = showcase();
        let e2 = EllCurveFF::short(
            rf("(0 - t^2)(t-1)^4"),
            rf("t^2 (t-1)^6"),
        )
        .unwrap();
        let p2 = EllPointFF::affine(rf("t (t-1)^2"), rf("t (t-1)^3"));
        assert!(e2.contains(&p2));
        let mut reg1 = PlaceRegistry::new();
        let (d1, _) = ec_sequence(&e, &p, None, 4, &mut reg1).unwrap();
        let mut reg2 = PlaceRegistry::new();
        let (d2, tags2) = ec_sequence(&e2, &p2, None, 4, &mut reg2).unwrap();
        for n in 0..4 {
            assert_eq!(
                label_mults(&d1[n], &reg1),
                label_mults(&d2[n], &reg2),
                "divisors differ at n = {}",
                n + 1
            );
        }
        assert!(tags2.iter().any(|t| {
            reg2.place_label(t.place) == "t - 1"
                && t.status == ReductionStatus::MinimizedThenGood
        }));
    }

    #[test]
    fn sequence_rejects_degenerate_configurations() {
        let (e, p) = showcase();
        let mut reg = PlaceRegistry::new();
        assert!(matches!(
            ec_sequence(&e, &EllPointFF::identity(), None, 3, &mut reg),
            Err(Error::IdentityBasePoint)
        ));
        assert!(matches!(
            ec_sequence(&e, &EllPointFF::affine(rf("t"), rf("t+1")), None, 3, &mut reg),
            Err(Error::PointNotOnCurve)
        ));
        let q = e.mul(2, &p).unwrap();
        assert!(matches!(
            ec_sequence(&e, &p, Some(&q), 5, &mut reg),
            Err(Error::PowerRelation { n: 2 })
        ));
    }

    #[test]
    fn nontorsion_certificate_finds_first_witness() {
        let (e, p) = showcase();
        match ec_nontorsion_certificate(&e, &p, 5, 42).unwrap() {
            Certificate::NonTorsion { witness } => assert_eq!(witness, rat_i64(1)),
            other => panic!("expected a nontorsion witness, got {other:?}"),
        }
    }
}
