//! Named divisor classes and the aggregate boundary classes `theta_{i;S}`.
//!
//! `theta_{i;S}` on the space `(0, g+n)` is the sum of `delta_{0; T u (S+g)}`
//! over all size-`i` subsets `T` of the tail marks `{1..g}`; the marks of the
//! modeled `(g,n)` space sit at positions `g+1..g+n`. Because the number of
//! summands is `C(g,i)`, theta classes are kept *symbolic* (`ThetaIndex`,
//! `ThetaCombo`) wherever large genus must work, and only materialized into
//! `DivisorClass` values on demand for small genus.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::basis::{canonical_boundary, BasisElement, BoundaryIndex, MarkSet, SpaceId};
use crate::class::DivisorClass;
use crate::error::{Error, Result};
use crate::rational::{binomial, rat, ratio, Integer, Rational};

/// Number of materialized summands we are willing to build eagerly.
const MATERIALIZE_LIMIT: u64 = 1 << 20;

/// The conventional boundary index `delta_i` on `(g,1)`: the divisor whose
/// genus-`i` side carries the marked point, i.e. `canonical(i, {1})`.
pub fn marked_delta(g: u32, i: u32) -> Result<BoundaryIndex> {
    let space = SpaceId::new(g, 1)?;
    canonical_boundary(space, i, MarkSet::from_marks([1])?)
}

/// The Brill-Noether class on `(g,0)`:
/// `(g+3) lambda - (g+1)/6 delta_0 - sum_i i(g-i) delta_{i;{}}`.
pub fn bn_class(g: u32) -> Result<DivisorClass> {
    if g < 3 {
        return Err(Error::OutOfRange(format!("bn class needs genus >= 3, got {g}")));
    }
    let space = SpaceId::new(g, 0)?;
    let mut terms: Vec<(BasisElement, Rational)> = vec![
        (BasisElement::Lambda, rat(i64::from(g) + 3)),
        (BasisElement::DeltaIrr, -ratio(i64::from(g) + 1, 6)),
    ];
    for i in 1..=g / 2 {
        let b = canonical_boundary(space, i, MarkSet::EMPTY)?;
        terms.push((BasisElement::Boundary(b), -rat(i64::from(i) * i64::from(g - i))));
    }
    DivisorClass::from_terms(space, terms)
}

/// The Weierstrass class on `(g,1)`:
/// `g(g+1)/2 omega - lambda - sum_{i=1}^{g-1} (g-i)(g-i+1)/2 delta_i`,
/// with `delta_i = canonical(i, {1})`.
pub fn weierstrass_class(g: u32) -> Result<DivisorClass> {
    if g < 2 {
        return Err(Error::OutOfRange(format!("weierstrass class needs genus >= 2, got {g}")));
    }
    let space = SpaceId::new(g, 1)?;
    let mut terms: Vec<(BasisElement, Rational)> = vec![
        (BasisElement::Omega(1), ratio(i64::from(g) * (i64::from(g) + 1), 2)),
        (BasisElement::Lambda, rat(-1)),
    ];
    for i in 1..=g - 1 {
        let c = i64::from(g - i) * (i64::from(g - i) + 1) / 2;
        terms.push((BasisElement::Boundary(marked_delta(g, i)?), rat(-c)));
    }
    DivisorClass::from_terms(space, terms)
}

/// Which block of marks the `S` part of `theta_{i;S}` is shifted into.
/// The consistent reading shifts by the tail count `g`; the alternative
/// (shift by the mark count `n`) is exposed only so its failure can be
/// demonstrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaShift {
    ByTails,
    ByMarks,
}

/// Symbolic index of a theta class on `(0, g+n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThetaIndex {
    pub i: u32,
    pub s: MarkSet,
}

impl fmt::Display for ThetaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "theta:{}:{}", self.i, self.s)
    }
}

impl ThetaIndex {
    /// Validity on `(g, n)` (marks of `S` drawn from `{1..n}`):
    /// `2 <= i + |S| <= g + n - 2`.
    pub fn validate(&self, g: u32, n: u32) -> Result<()> {
        if n < 1 {
            return Err(Error::OutOfRange("theta classes need n >= 1".into()));
        }
        if self.i > g || !self.s.is_subset_of(MarkSet::full(n)) {
            return Err(Error::InvalidBoundary(format!(
                "theta index ({}, {}) out of range for (g={g}, n={n})",
                self.i, self.s
            )));
        }
        let size = self.i + self.s.len();
        if size < 2 || size > g + n - 2 {
            return Err(Error::InvalidBoundary(format!(
                "theta index ({}, {}) has summand size {size} outside 2..={} on (0,{})",
                self.i,
                self.s,
                g + n - 2,
                g + n
            )));
        }
        Ok(())
    }

    /// The mirrored index naming the same class: `theta_{i;S} = theta_{g-i;S^c}`.
    pub fn mirror(&self, g: u32, n: u32) -> ThetaIndex {
        ThetaIndex { i: g - self.i, s: self.s.complement(n) }
    }

    /// Multiplicity (0 or 1) of a canonical boundary class of `(0, g+n)`
    /// among the summands `delta_{0; T u (S+g)}`, decided symbolically.
    pub fn contains(&self, g: u32, n: u32, b: &BoundaryIndex) -> bool {
        debug_assert_eq!(b.genus, 0);
        let m = g + n;
        let specials = MarkSet::full(m).minus(MarkSet::full(g));
        let shifted = self.s.shift_up(g).expect("shifted theta marks in range");
        for v in [b.marks, b.marks.complement(m)] {
            if v.intersection(specials) == shifted && v.minus(specials).len() == self.i {
                return true;
            }
        }
        false
    }

}

/// All distinct theta classes on `(0, g+n)`, one representative per
/// mirror pair `(i,S) ~ (g-i, S^c)`, in deterministic order.
pub fn theta_representatives(g: u32, n: u32) -> Result<Vec<ThetaIndex>> {
    if n < 1 {
        return Err(Error::OutOfRange("theta classes need n >= 1".into()));
    }
    SpaceId::new(0, g + n)?;
    let mut out = Vec::new();
    for i in 0..=g {
        for s in MarkSet::full(n).subsets() {
            let idx = ThetaIndex { i, s };
            if idx.validate(g, n).is_err() {
                continue;
            }
            let mir = idx.mirror(g, n);
            if (i, s.bits()) <= (mir.i, mir.s.bits()) {
                out.push(idx);
            }
        }
    }
    Ok(out)
}

/// Materializes `theta_{i;S}` as an explicit class on `(0, g+n)`.
pub fn theta_class(g: u32, n: u32, i: u32, s: MarkSet) -> Result<DivisorClass> {
    theta_class_with(g, n, i, s, ThetaShift::ByTails)
}

/// Materialization with an explicit shift reading (demonstration hook).
pub fn theta_class_with(g: u32, n: u32, i: u32, s: MarkSet, shift: ThetaShift) -> Result<DivisorClass> {
    let idx = ThetaIndex { i, s };
    idx.validate(g, n)?;
    let count = binomial(u64::from(g), u64::from(i));
    if count > Integer::from(MATERIALIZE_LIMIT) {
        return Err(Error::OutOfRange(format!(
            "theta_{{{i};{s}}} on (0,{}) has {count} summands; too many to materialize",
            g + n
        )));
    }
    let space = SpaceId::new(0, g + n)?;
    let offset = match shift {
        ThetaShift::ByTails => g,
        ThetaShift::ByMarks => n,
    };
    let shifted = s.shift_up(offset)?;
    if !shifted.is_subset_of(space.marks()) {
        return Err(Error::InvalidBoundary(format!(
            "shifted marks {shifted} escape the space (0,{})",
            g + n
        )));
    }
    let mut d = DivisorClass::zero(space);
    for t in combinations(g, i) {
        let b = canonical_boundary(space, 0, t.union(shifted))?;
        d.add_term(BasisElement::Boundary(b), rat(1))?;
    }
    Ok(d)
}

/// Size-`i` subsets of `{1..g}` in deterministic order.
fn combinations(g: u32, i: u32) -> Vec<MarkSet> {
    let mut out = Vec::new();
    if i > g {
        return out;
    }
    let mut idx: Vec<u32> = (1..=i).collect();
    loop {
        out.push(MarkSet::from_marks(idx.iter().copied()).expect("marks in range"));
        // Advance the combination.
        let mut k = i as i64 - 1;
        while k >= 0 && idx[k as usize] == g - (i - 1 - k as u32) {
            k -= 1;
        }
        if k < 0 {
            break;
        }
        idx[k as usize] += 1;
        for j in (k as usize + 1)..i as usize {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

/// `epsilon_i` on `(0,m)`: the sum of `delta_{0;S}` over all size-`i`
/// subsets, with complementary pairs merging under canonicalization.
pub fn epsilon_class(m: u32, i: u32) -> Result<DivisorClass> {
    if i < 2 || i + 2 > m {
        return Err(Error::InvalidBoundary(format!(
            "epsilon index {i} outside 2..={} on (0,{m})",
            m.saturating_sub(2)
        )));
    }
    if binomial(u64::from(m), u64::from(i)) > Integer::from(MATERIALIZE_LIMIT) {
        return Err(Error::OutOfRange(format!(
            "epsilon_{i} on (0,{m}) has too many summands to materialize"
        )));
    }
    let space = SpaceId::new(0, m)?;
    let mut d = DivisorClass::zero(space);
    for s in combinations(m, i) {
        let b = canonical_boundary(space, 0, s)?;
        d.add_term(BasisElement::Boundary(b), rat(1))?;
    }
    Ok(d)
}

/// A formal rational combination of the classes `theta_1..theta_{g-2}`
/// on `(0, g+1)` (the `n = 1` theta coordinates used by the tails table).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaCombo {
    g: u32,
    coeffs: BTreeMap<u32, Rational>,
}

impl ThetaCombo {
    pub fn zero(g: u32) -> ThetaCombo {
        ThetaCombo { g, coeffs: BTreeMap::new() }
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Adds `c * theta_i`, validating `1 <= i <= g-2`.
    pub fn add(&mut self, i: u32, c: Rational) -> Result<()> {
        ThetaIndex { i, s: MarkSet::from_marks([1])? }.validate(self.g, 1)?;
        if c.is_zero() {
            return Ok(());
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(i) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    pub fn coeff(&self, i: u32) -> Rational {
        self.coeffs.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &Rational)> {
        self.coeffs.iter()
    }

    pub fn scale(&self, s: &Rational) -> ThetaCombo {
        if s.is_zero() {
            return ThetaCombo::zero(self.g);
        }
        ThetaCombo {
            g: self.g,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * s)).collect(),
        }
    }

    pub fn accumulate(&mut self, other: &ThetaCombo, s: &Rational) -> Result<()> {
        if self.g != other.g {
            return Err(Error::SpaceMismatch(format!(
                "theta combos for g={} and g={}",
                self.g, other.g
            )));
        }
        for (i, c) in &other.coeffs {
            self.add(*i, c * s)?;
        }
        Ok(())
    }

    /// Expands into an explicit class on `(0, g+1)` (small genus only).
    pub fn materialize(&self) -> Result<DivisorClass> {
        let space = SpaceId::new(0, self.g + 1)?;
        let mut out = DivisorClass::zero(space);
        for (i, c) in &self.coeffs {
            let t = theta_class(self.g, 1, *i, MarkSet::from_marks([1])?)?;
            out = DivisorClass::combine(&rat(1), &out, c, &t)?;
        }
        Ok(out)
    }
}

/// Eliminates `lambda` on `(2,1)` using `lambda = delta_0/10 + delta_1/5`
/// (the marked form of the classical genus-2 relation `10 lambda = delta_0
/// + 2 delta_1`). The result spans `{omega, delta_0, delta_{1;{}}}`.
pub fn reduce_lambda_21(d: &DivisorClass) -> Result<DivisorClass> {
    let s21 = SpaceId::new(2, 1)?;
    if d.space() != s21 {
        return Err(Error::SpaceMismatch(format!(
            "lambda reduction is specific to (g=2, n=1), got {}",
            d.space()
        )));
    }
    let lam = d.coeff(&BasisElement::Lambda);
    if lam.is_zero() {
        return Ok(d.clone());
    }
    let mut out = DivisorClass::zero(s21);
    let delta1 = BasisElement::Boundary(canonical_boundary(s21, 1, MarkSet::EMPTY)?);
    for (k, v) in d.iter() {
        if *k != BasisElement::Lambda {
            out.add_term(*k, v.clone())?;
        }
    }
    out.add_term(BasisElement::DeltaIrr, &lam * &ratio(1, 10))?;
    out.add_term(delta1, &lam * &ratio(1, 5))?;
    Ok(out)
}

/// The lambda-eliminated Weierstrass class on `(2,1)`:
/// `3 omega - delta_0/10 - (6/5) delta_{1;{}}`.
pub fn w2_reduced() -> DivisorClass {
    reduce_lambda_21(&weierstrass_class(2).expect("g=2 valid")).expect("reduction valid")
}

/// Tests membership of a `(2,1)` class in the span of the Weierstrass class
/// modulo the lambda relation; returns the multiplier when it lies there.
pub fn span_w2_coefficient(d: &DivisorClass) -> Result<Option<Rational>> {
    let reduced = reduce_lambda_21(d)?;
    if reduced.is_zero() {
        return Ok(Some(Rational::zero()));
    }
    let w = w2_reduced();
    let c = reduced.coeff(&BasisElement::Omega(1)) / w.coeff(&BasisElement::Omega(1));
    if w.scale(&c) == reduced {
        Ok(Some(c))
    } else {
        Ok(None)
    }
}
