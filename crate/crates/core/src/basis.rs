//! Spaces, mark sets, and the canonical basis of the modeled Picard group.
//!
//! A space is a pair `(g, n)`: genus `g` curves with `n` marked points.
//! For `g >= 1` the modeled rational Picard basis is
//! `lambda`, `delta0`, `omega_1..omega_n`, and the canonical boundary classes
//! `delta_{i;S}`; for `g == 0` the basis consists of boundary classes alone.
//! `psi_i` is accepted on input and converted, never stored.
//!
//! Invariants maintained here:
//! * every stored boundary index is canonical under `(i, S) ~ (g-i, S^c)`;
//! * every stored index is stable (`i = 0` forces `|S| >= 2`, `i = g`
//!   forces `|S^c| >= 2`; on genus 0 both at once);
//! * basis enumeration order is deterministic: `lambda < delta0 <
//!   omega_1 < ... < omega_n < psi_* < delta_{(i;S)}` with boundaries ordered
//!   by genus then mark bitmask.

use std::fmt;

use crate::error::{Error, Result};

/// A set of marked points, stored as a bitmask over marks `1..=63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MarkSet(u64);

impl MarkSet {
    /// The empty mark set.
    pub const EMPTY: MarkSet = MarkSet(0);

    /// Largest mark representable.
    pub const MAX_MARK: u32 = 63;

    /// Builds a set from individual marks; duplicates collapse.
    pub fn from_marks<I: IntoIterator<Item = u32>>(marks: I) -> Result<MarkSet> {
        let mut s = MarkSet::EMPTY;
        for m in marks {
            s = s.with(m)?;
        }
        Ok(s)
    }

    /// The full set `{1..=n}`.
    pub fn full(n: u32) -> MarkSet {
        debug_assert!(n <= Self::MAX_MARK);
        if n == 0 {
            MarkSet::EMPTY
        } else {
            MarkSet(((1u64 << n) - 1) << 1)
        }
    }

    /// Returns the set with `mark` added.
    pub fn with(self, mark: u32) -> Result<MarkSet> {
        if mark == 0 || mark > Self::MAX_MARK {
            return Err(Error::InvalidMark(format!("mark {mark} outside 1..={}", Self::MAX_MARK)));
        }
        Ok(MarkSet(self.0 | (1u64 << mark)))
    }

    /// Returns the set with `mark` removed.
    pub fn without(self, mark: u32) -> MarkSet {
        MarkSet(self.0 & !(1u64 << mark))
    }

    pub fn contains(self, mark: u32) -> bool {
        mark >= 1 && mark <= Self::MAX_MARK && (self.0 >> mark) & 1 == 1
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: MarkSet) -> MarkSet {
        MarkSet(self.0 | other.0)
    }

    pub fn intersection(self, other: MarkSet) -> MarkSet {
        MarkSet(self.0 & other.0)
    }

    pub fn minus(self, other: MarkSet) -> MarkSet {
        MarkSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: MarkSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint_from(self, other: MarkSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Complement inside `{1..=n}`.
    pub fn complement(self, n: u32) -> MarkSet {
        MarkSet(MarkSet::full(n).0 & !self.0)
    }

    /// Marks in ascending order.
    pub fn iter(self) -> impl Iterator<Item = u32> {
        let bits = self.0;
        (1..=Self::MAX_MARK).filter(move |m| (bits >> m) & 1 == 1)
    }

    /// Applies a relabeling `m -> perm(m)` to every mark.
    pub fn map(self, perm: &Relabeling) -> MarkSet {
        let mut out = MarkSet::EMPTY;
        for m in self.iter() {
            out.0 |= 1u64 << perm.image(m);
        }
        out
    }

    /// Shifts every mark up by `offset`.
    pub fn shift_up(self, offset: u32) -> Result<MarkSet> {
        MarkSet::from_marks(self.iter().map(|m| m + offset))
    }

    /// All subsets of this set, in deterministic (bitmask) order.
    pub fn subsets(self) -> Vec<MarkSet> {
        let bits = self.0;
        let mut out = Vec::new();
        // Standard submask enumeration, ascending by value.
        let mut sub = 0u64;
        loop {
            out.push(MarkSet(sub));
            if sub == bits {
                break;
            }
            sub = (sub.wrapping_sub(bits)) & bits;
        }
        out.sort_unstable();
        out
    }

    /// Raw bitmask, used only for deterministic ordering.
    pub fn bits(self) -> u64 {
        self.0
    }
}

impl fmt::Display for MarkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for m in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

/// A permutation of the marks `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling {
    /// `images[m-1]` is the image of mark `m`.
    images: Vec<u32>,
}

impl Relabeling {
    /// Builds a relabeling from the images of `1..=n`; must be a bijection.
    pub fn new(images: Vec<u32>) -> Result<Relabeling> {
        let n = images.len() as u32;
        let mut seen = vec![false; images.len()];
        for &im in &images {
            if im == 0 || im > n {
                return Err(Error::InvalidMark(format!("relabel image {im} outside 1..={n}")));
            }
            if std::mem::replace(&mut seen[(im - 1) as usize], true) {
                return Err(Error::InvalidMark(format!("relabel image {im} repeated")));
            }
        }
        Ok(Relabeling { images })
    }

    pub fn identity(n: u32) -> Relabeling {
        Relabeling { images: (1..=n).collect() }
    }

    /// Transposition of two marks.
    pub fn swap(n: u32, a: u32, b: u32) -> Result<Relabeling> {
        let mut images: Vec<u32> = (1..=n).collect();
        if a == 0 || a > n || b == 0 || b > n {
            return Err(Error::InvalidMark(format!("swap marks {a},{b} outside 1..={n}")));
        }
        images.swap((a - 1) as usize, (b - 1) as usize);
        Relabeling::new(images)
    }

    /// The relabeling of `{1..=n}` sending `a -> x`, `b -> y` (`a != b`,
    /// `x != y`) and the remaining marks order-preservingly onto the
    /// remaining targets.
    pub fn sending_pair(n: u32, a: u32, b: u32, x: u32, y: u32) -> Result<Relabeling> {
        if a == b || x == y {
            return Err(Error::InvalidMark("pair relabeling needs distinct marks".into()));
        }
        for m in [a, b, x, y] {
            if m == 0 || m > n {
                return Err(Error::InvalidMark(format!("mark {m} outside 1..={n}")));
            }
        }
        let mut images = vec![0u32; n as usize];
        images[(a - 1) as usize] = x;
        images[(b - 1) as usize] = y;
        let mut rest_targets: Vec<u32> = (1..=n).filter(|m| *m != x && *m != y).collect();
        rest_targets.reverse();
        for m in 1..=n {
            if m != a && m != b {
                images[(m - 1) as usize] = rest_targets.pop().ok_or_else(|| {
                    Error::InvalidMark(format!("marks {a},{b},{x},{y} outside 1..={n}"))
                })?;
            }
        }
        Relabeling::new(images)
    }

    pub fn n(&self) -> u32 {
        self.images.len() as u32
    }

    pub fn image(&self, mark: u32) -> u32 {
        self.images[(mark - 1) as usize]
    }

    /// Composition `other` after `self` (apply `self` first).
    pub fn then(&self, other: &Relabeling) -> Relabeling {
        Relabeling {
            images: self.images.iter().map(|&m| other.image(m)).collect(),
        }
    }

    pub fn inverse(&self) -> Relabeling {
        let mut images = vec![0; self.images.len()];
        for (k, &m) in self.images.iter().enumerate() {
            images[(m - 1) as usize] = k as u32 + 1;
        }
        Relabeling { images }
    }
}

/// The moduli space of stable `n`-pointed genus `g` curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpaceId {
    pub g: u32,
    pub n: u32,
}

impl SpaceId {
    /// Validates existence of the space (genus zero needs three points) and
    /// the mark-count bound of the representation.
    pub fn new(g: u32, n: u32) -> Result<SpaceId> {
        if n > MarkSet::MAX_MARK {
            return Err(Error::OutOfRange(format!("n = {n} exceeds {}", MarkSet::MAX_MARK)));
        }
        if g == 0 && n < 3 {
            return Err(Error::OutOfRange(format!("no moduli space with g = 0, n = {n}")));
        }
        Ok(SpaceId { g, n })
    }

    /// The full mark set `{1..=n}`.
    pub fn marks(&self) -> MarkSet {
        MarkSet::full(self.n)
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(g={}, n={})", self.g, self.n)
    }
}

/// A canonical boundary index `(i, S)`: the divisor of curves with a node
/// separating a genus-`i` piece carrying the marks `S` from its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryIndex {
    pub genus: u32,
    pub marks: MarkSet,
}

/// Canonicalizes `(i, S)` on `space` under the identification
/// `(i, S) = (g - i, S^c)`, rejecting unstable indices.
///
/// The representative with the smaller genus wins; at `i = g - i` the side
/// not containing the largest mark wins (for `n = 0` the empty side).
pub fn canonical_boundary(space: SpaceId, genus: u32, marks: MarkSet) -> Result<BoundaryIndex> {
    let SpaceId { g, n } = space;
    if genus > g {
        return Err(Error::InvalidBoundary(format!(
            "side genus {genus} exceeds ambient genus {g}"
        )));
    }
    if !marks.is_subset_of(space.marks()) {
        return Err(Error::InvalidBoundary(format!(
            "marks {marks} not contained in {}",
            space.marks()
        )));
    }
    let co_genus = g - genus;
    let co_marks = marks.complement(n);
    if genus == 0 && marks.len() < 2 {
        return Err(Error::InvalidBoundary(format!(
            "genus-0 side ({genus}, {marks}) has fewer than 2 marks"
        )));
    }
    if co_genus == 0 && co_marks.len() < 2 {
        return Err(Error::InvalidBoundary(format!(
            "genus-0 side ({co_genus}, {co_marks}) has fewer than 2 marks"
        )));
    }
    let keep = if genus < co_genus {
        true
    } else if genus > co_genus {
        false
    } else if n == 0 {
        true // both sides are (g/2, {}); the representative is unique
    } else {
        !marks.contains(n)
    };
    Ok(if keep {
        BoundaryIndex { genus, marks }
    } else {
        BoundaryIndex { genus: co_genus, marks: co_marks }
    })
}

impl BoundaryIndex {
    /// The mirrored representative `(g - i, S^c)` on `space`.
    pub fn mirror(&self, space: SpaceId) -> (u32, MarkSet) {
        (space.g - self.genus, self.marks.complement(space.n))
    }
}

impl fmt::Display for BoundaryIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{})", self.genus, self.marks)
    }
}

/// One element of the modeled Picard basis, plus the input-only `psi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisElement {
    /// Hodge class.
    Lambda,
    /// Irreducible-node boundary class.
    DeltaIrr,
    /// Relative dualizing-sheaf class at a mark (the internal cotangent basis).
    Omega(u32),
    /// Cotangent class at a mark; accepted on input, converted to `Omega`.
    Psi(u32),
    /// Canonical separating-boundary class.
    Boundary(BoundaryIndex),
}

impl BasisElement {
    /// Whether this element may carry a coefficient in a stored class on
    /// `space`. `Psi` never qualifies; genus 0 admits only boundaries.
    pub fn is_basis_key(&self, space: SpaceId) -> bool {
        match *self {
            BasisElement::Lambda | BasisElement::DeltaIrr => space.g >= 1,
            BasisElement::Omega(i) => space.g >= 1 && i >= 1 && i <= space.n,
            BasisElement::Psi(_) => false,
            BasisElement::Boundary(b) => {
                canonical_boundary(space, b.genus, b.marks).map(|c| c == b).unwrap_or(false)
            }
        }
    }

    /// Whether the element is syntactically meaningful on `space` (valid
    /// marks, stable boundary), regardless of canonical form. This is the
    /// validity notion used by intersection pairings.
    pub fn is_valid_on(&self, space: SpaceId) -> bool {
        match *self {
            BasisElement::Lambda | BasisElement::DeltaIrr => space.g >= 1,
            BasisElement::Omega(i) | BasisElement::Psi(i) => i >= 1 && i <= space.n,
            BasisElement::Boundary(b) => canonical_boundary(space, b.genus, b.marks).is_ok(),
        }
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisElement::Lambda => write!(f, "lambda"),
            BasisElement::DeltaIrr => write!(f, "delta0"),
            BasisElement::Omega(i) => write!(f, "omega:{i}"),
            BasisElement::Psi(i) => write!(f, "psi:{i}"),
            BasisElement::Boundary(b) => write!(f, "delta:{}:{}", b.genus, b.marks),
        }
    }
}

/// Enumerates the canonical boundary indices of `space` in deterministic
/// order (side genus ascending, then mark bitmask ascending).
pub fn enumerate_boundaries(space: SpaceId) -> Vec<BoundaryIndex> {
    let SpaceId { g, n } = space;
    debug_assert!(n <= 16, "boundary enumeration is exponential in n");
    let mut out = Vec::new();
    for genus in 0..=g / 2 {
        for marks in MarkSet::full(n).subsets() {
            if let Ok(b) = canonical_boundary(space, genus, marks) {
                if b.genus == genus && b.marks == marks {
                    out.push(b);
                }
            }
        }
    }
    out
}

/// Enumerates the full modeled basis of `space` in deterministic order.
pub fn enumerate_basis(space: SpaceId) -> Vec<BasisElement> {
    let mut out = Vec::new();
    if space.g >= 1 {
        out.push(BasisElement::Lambda);
        out.push(BasisElement::DeltaIrr);
        for i in 1..=space.n {
            out.push(BasisElement::Omega(i));
        }
    }
    out.extend(enumerate_boundaries(space).into_iter().map(BasisElement::Boundary));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(marks: &[u32]) -> MarkSet {
        MarkSet::from_marks(marks.iter().copied()).unwrap()
    }

    #[test]
    fn mark_set_basics() {
        let s = ms(&[2, 5, 3]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![2, 3, 5]);
        assert_eq!(s.to_string(), "{2,3,5}");
        assert_eq!(s.complement(5), ms(&[1, 4]));
        assert!(ms(&[2, 3]).is_subset_of(s));
        assert_eq!(MarkSet::full(3), ms(&[1, 2, 3]));
        assert_eq!(MarkSet::EMPTY.to_string(), "{}");
        assert!(MarkSet::from_marks([0]).is_err());
        assert_eq!(MarkSet::full(4).subsets().len(), 16);
    }

    #[test]
    fn relabeling_validation_and_action() {
        assert!(Relabeling::new(vec![1, 1]).is_err());
        assert!(Relabeling::new(vec![1, 3]).is_err());
        let p = Relabeling::swap(4, 1, 3).unwrap();
        assert_eq!(ms(&[1, 2]).map(&p), ms(&[3, 2]));
        let q = Relabeling::sending_pair(4, 2, 4, 3, 4).unwrap();
        // 2 -> 3, 4 -> 4, remaining {1,3} -> {1,2} order-preserving.
        assert_eq!(q.image(1), 1);
        assert_eq!(q.image(2), 3);
        assert_eq!(q.image(3), 2);
        assert_eq!(q.image(4), 4);
    }

    #[test]
    fn space_validation() {
        assert!(SpaceId::new(0, 2).is_err());
        assert!(SpaceId::new(0, 3).is_ok());
        assert!(SpaceId::new(3, 0).is_ok());
    }

    #[test]
    fn canonicalization_examples() {
        // Mirror with strictly smaller genus wins.
        let s51 = SpaceId::new(5, 1).unwrap();
        let b = canonical_boundary(s51, 4, ms(&[1])).unwrap();
        assert_eq!((b.genus, b.marks), (1, MarkSet::EMPTY));
        // Middle genus: the side without the largest mark wins.
        let s41 = SpaceId::new(4, 1).unwrap();
        let b = canonical_boundary(s41, 2, ms(&[1])).unwrap();
        assert_eq!((b.genus, b.marks), (2, MarkSet::EMPTY));
        // Unstable: genus-0 side with fewer than two marks.
        let s30 = SpaceId::new(3, 0).unwrap();
        assert!(canonical_boundary(s30, 0, MarkSet::EMPTY).is_err());
        assert!(canonical_boundary(s30, 3, MarkSet::EMPTY).is_err());
        // Genus 0 ambient: the side without the largest mark wins.
        let s05 = SpaceId::new(0, 5).unwrap();
        let b = canonical_boundary(s05, 0, ms(&[1, 5])).unwrap();
        assert_eq!(b.marks, ms(&[2, 3, 4]));
        assert!(canonical_boundary(s05, 0, ms(&[1])).is_err());
        // Idempotence and mirror equality on a sweep of valid indices.
        for space in [s51, s41, SpaceId::new(6, 2).unwrap(), s05] {
            for genus in 0..=space.g {
                for marks in MarkSet::full(space.n).subsets() {
                    if let Ok(b) = canonical_boundary(space, genus, marks) {
                        let again = canonical_boundary(space, b.genus, b.marks).unwrap();
                        assert_eq!(b, again);
                        let (mg, mm) = (space.g - genus, marks.complement(space.n));
                        assert_eq!(canonical_boundary(space, mg, mm).unwrap(), b);
                    }
                }
            }
        }
    }

    #[test]
    fn middle_genus_with_no_marks_is_unique() {
        let s = SpaceId::new(4, 0).unwrap();
        let b = canonical_boundary(s, 2, MarkSet::EMPTY).unwrap();
        assert_eq!((b.genus, b.marks), (2, MarkSet::EMPTY));
    }

    #[test]
    fn basis_enumeration_counts() {
        // (g,1): lambda, delta0, omega_1, and g-1 boundary classes.
        for g in 2..=12u32 {
            let basis = enumerate_basis(SpaceId::new(g, 1).unwrap());
            assert_eq!(basis.len() as u32, 3 + (g - 1), "g={g}");
        }
        // (g,2): 4 + (2g-1); (g,3): 5 + 4g.
        for g in 3..=10u32 {
            let b2 = enumerate_basis(SpaceId::new(g, 2).unwrap());
            assert_eq!(b2.len() as u32, 4 + 2 * g - 1, "g={g}");
            let b3 = enumerate_basis(SpaceId::new(g, 3).unwrap());
            assert_eq!(b3.len() as u32, 5 + 4 * g, "g={g}");
        }
        // Genus 0: only boundaries; M(0,5) has 10 unordered splits... of
        // which each 2-or-3 element side appears once: C(5,2) = 10 classes.
        let b = enumerate_basis(SpaceId::new(0, 5).unwrap());
        assert_eq!(b.len(), 10);
        assert!(b.iter().all(|e| matches!(e, BasisElement::Boundary(_))));
    }

    #[test]
    fn basis_key_validity() {
        let s = SpaceId::new(0, 5).unwrap();
        assert!(!BasisElement::Lambda.is_basis_key(s));
        assert!(!BasisElement::Omega(1).is_basis_key(s));
        let g31 = SpaceId::new(3, 1).unwrap();
        assert!(BasisElement::Omega(1).is_basis_key(g31));
        assert!(!BasisElement::Omega(2).is_basis_key(g31));
        assert!(!BasisElement::Psi(1).is_basis_key(g31));
        let nc = BoundaryIndex { genus: 2, marks: ms(&[1]) };
        assert!(!BasisElement::Boundary(nc).is_basis_key(g31));
        assert!(BasisElement::Boundary(nc).is_valid_on(g31));
    }
}
