//! Divisor classes: sparse exact-rational vectors over the canonical basis.
//!
//! A `DivisorClass` stores only canonical keys (`psi` is expanded on ingest
//! via `psi_i = omega_i + sum_{S: i in S, |S| >= 2} delta_{0;S}`) and never
//! stores a zero coefficient, so equality is plain coefficient-wise equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;

use crate::basis::{canonical_boundary, BasisElement, MarkSet, Relabeling, SpaceId};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// An exact-rational divisor class on a fixed space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClass {
    space: SpaceId,
    coeffs: BTreeMap<BasisElement, Rational>,
}

impl DivisorClass {
    /// The zero class.
    pub fn zero(space: SpaceId) -> DivisorClass {
        DivisorClass { space, coeffs: BTreeMap::new() }
    }

    /// A single canonicalized term.
    pub fn term(space: SpaceId, element: BasisElement, coeff: Rational) -> Result<DivisorClass> {
        let mut d = DivisorClass::zero(space);
        d.add_term(element, coeff)?;
        Ok(d)
    }

    /// Builds a class from (element, coefficient) pairs, canonicalizing and
    /// merging as it goes.
    pub fn from_terms<I>(space: SpaceId, terms: I) -> Result<DivisorClass>
    where
        I: IntoIterator<Item = (BasisElement, Rational)>,
    {
        let mut d = DivisorClass::zero(space);
        for (e, c) in terms {
            d.add_term(e, c)?;
        }
        Ok(d)
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The coefficient of a canonical basis element (zero if absent).
    /// Non-canonical queries are canonicalized first; invalid ones are zero.
    pub fn coeff(&self, element: &BasisElement) -> Rational {
        let key = match *element {
            BasisElement::Boundary(b) => {
                match canonical_boundary(self.space, b.genus, b.marks) {
                    Ok(c) => BasisElement::Boundary(c),
                    Err(_) => return Rational::zero(),
                }
            }
            other => other,
        };
        self.coeffs.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Iterates stored terms in canonical basis order.
    pub fn iter(&self) -> impl Iterator<Item = (&BasisElement, &Rational)> {
        self.coeffs.iter()
    }

    /// Adds `coeff * element`, canonicalizing the key. `Psi(i)` is expanded
    /// to `omega_i + sum delta_{0;S}`; boundary indices are canonicalized.
    pub fn add_term(&mut self, element: BasisElement, coeff: Rational) -> Result<()> {
        match element {
            BasisElement::Psi(i) => {
                if i == 0 || i > self.space.n {
                    return Err(Error::InvalidMark(format!(
                        "psi index {i} outside 1..={}",
                        self.space.n
                    )));
                }
                if self.space.g == 0 {
                    return Err(Error::OutOfRange(
                        "psi classes are not representable on genus-0 spaces (no omega in the basis)"
                            .into(),
                    ));
                }
                if coeff.is_zero() {
                    return Ok(());
                }
                self.add_raw(BasisElement::Omega(i), coeff.clone());
                for marks in self.space.marks().subsets() {
                    if marks.contains(i) && marks.len() >= 2 {
                        let b = canonical_boundary(self.space, 0, marks)?;
                        self.add_raw(BasisElement::Boundary(b), coeff.clone());
                    }
                }
                Ok(())
            }
            other => {
                // Validate the key even for zero coefficients, so errors do
                // not depend on coefficients; `add_raw` drops stored zeros.
                let key = self.canonical_key(other)?;
                self.add_raw(key, coeff);
                Ok(())
            }
        }
    }

    fn canonical_key(&self, element: BasisElement) -> Result<BasisElement> {
        match element {
            BasisElement::Lambda | BasisElement::DeltaIrr => {
                if self.space.g == 0 {
                    return Err(Error::OutOfRange(format!(
                        "{element} is not in the basis of genus-0 spaces"
                    )));
                }
                Ok(element)
            }
            BasisElement::Omega(i) => {
                if self.space.g == 0 {
                    return Err(Error::OutOfRange(
                        "omega classes are not in the basis of genus-0 spaces".into(),
                    ));
                }
                if i == 0 || i > self.space.n {
                    return Err(Error::InvalidMark(format!(
                        "omega index {i} outside 1..={}",
                        self.space.n
                    )));
                }
                Ok(element)
            }
            BasisElement::Psi(_) => unreachable!("psi handled by add_term"),
            BasisElement::Boundary(b) => {
                let c = canonical_boundary(self.space, b.genus, b.marks)?;
                Ok(BasisElement::Boundary(c))
            }
        }
    }

    fn add_raw(&mut self, key: BasisElement, coeff: Rational) {
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(key) {
            Entry::Vacant(v) => {
                if !coeff.is_zero() {
                    v.insert(coeff);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Multiplies every coefficient by `s`.
    pub fn scale(&self, s: &Rational) -> DivisorClass {
        if s.is_zero() {
            return DivisorClass::zero(self.space);
        }
        DivisorClass {
            space: self.space,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * s)).collect(),
        }
    }

    /// `s*a + t*b` with a space check.
    pub fn combine(s: &Rational, a: &DivisorClass, t: &Rational, b: &DivisorClass) -> Result<DivisorClass> {
        if a.space != b.space {
            return Err(Error::SpaceMismatch(format!(
                "cannot combine classes on {} and {}",
                a.space, b.space
            )));
        }
        let mut out = a.scale(s);
        for (k, v) in &b.coeffs {
            out.add_raw(*k, v * t);
        }
        Ok(out)
    }

    /// Rewrites the class in the `psi` presentation: the returned map uses
    /// `Psi(i)` in place of `Omega(i)`, compensating boundary coefficients so
    /// that re-ingesting the map reproduces the class exactly.
    pub fn to_psi_presentation(&self) -> Result<BTreeMap<BasisElement, Rational>> {
        if self.space.n > 16 {
            return Err(Error::OutOfRange(format!(
                "psi presentation enumerates subsets; n = {} exceeds 16",
                self.space.n
            )));
        }
        let mut out: BTreeMap<BasisElement, Rational> = BTreeMap::new();
        let mut add = |k: BasisElement, v: Rational| {
            let e = out.entry(k).or_insert_with(Rational::zero);
            *e += v;
            if e.is_zero() {
                out.remove(&k);
            }
        };
        for (k, v) in &self.coeffs {
            match *k {
                BasisElement::Omega(i) => {
                    add(BasisElement::Psi(i), v.clone());
                    for marks in self.space.marks().subsets() {
                        if marks.contains(i) && marks.len() >= 2 {
                            let b = canonical_boundary(self.space, 0, marks)?;
                            add(BasisElement::Boundary(b), -v.clone());
                        }
                    }
                }
                other => add(other, v.clone()),
            }
        }
        Ok(out)
    }

    /// Applies a mark relabeling to every key.
    pub fn relabel(&self, perm: &Relabeling) -> Result<DivisorClass> {
        if perm.n() != self.space.n {
            return Err(Error::InvalidMark(format!(
                "relabeling of {} marks applied on {}",
                perm.n(),
                self.space
            )));
        }
        let mut out = DivisorClass::zero(self.space);
        for (k, v) in &self.coeffs {
            let image = match *k {
                BasisElement::Omega(i) => BasisElement::Omega(perm.image(i)),
                BasisElement::Boundary(b) => {
                    let c = canonical_boundary(self.space, b.genus, b.marks.map(perm))?;
                    BasisElement::Boundary(c)
                }
                other => other,
            };
            out.add_raw(image, v.clone());
        }
        Ok(out)
    }

    /// Coefficient vector with respect to an explicit basis ordering.
    /// Errors if the class has support outside `basis`.
    pub fn to_vector(&self, basis: &[BasisElement]) -> Result<Vec<Rational>> {
        let mut v = vec![Rational::zero(); basis.len()];
        let index: BTreeMap<&BasisElement, usize> =
            basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        for (k, c) in &self.coeffs {
            match index.get(k) {
                Some(&i) => v[i] = c.clone(),
                None => {
                    return Err(Error::SpaceMismatch(format!(
                        "class term {k} not present in the supplied basis"
                    )))
                }
            }
        }
        Ok(v)
    }

    /// Rebuilds a class from a coefficient vector over `basis`.
    pub fn from_vector(space: SpaceId, basis: &[BasisElement], v: &[Rational]) -> Result<DivisorClass> {
        if basis.len() != v.len() {
            return Err(Error::SpaceMismatch(format!(
                "vector length {} does not match basis length {}",
                v.len(),
                basis.len()
            )));
        }
        DivisorClass::from_terms(space, basis.iter().copied().zip(v.iter().cloned()))
    }

    /// Convenience: the delta_{0;S} coefficient for a mark pair.
    pub fn pair_coeff(&self, i: u32, j: u32) -> Result<Rational> {
        let marks = MarkSet::from_marks([i, j])?;
        let b = canonical_boundary(self.space, 0, marks)?;
        Ok(self.coeff(&BasisElement::Boundary(b)))
    }
}

impl Add<&DivisorClass> for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        assert_eq!(self.space, rhs.space, "space mismatch in class addition");
        let mut out = self.clone();
        for (k, v) in &rhs.coeffs {
            out.add_raw(*k, v.clone());
        }
        out
    }
}

impl Sub<&DivisorClass> for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        assert_eq!(self.space, rhs.space, "space mismatch in class subtraction");
        let mut out = self.clone();
        for (k, v) in &rhs.coeffs {
            out.add_raw(*k, -v.clone());
        }
        out
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass {
            space: self.space,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, v) in &self.coeffs {
            if first {
                write!(f, "{}*{}", format_rational(v), k)?;
                first = false;
            } else {
                write!(f, " + {}*{}", format_rational(v), k)?;
            }
        }
        Ok(())
    }
}
