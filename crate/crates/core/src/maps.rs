//! Pullback homomorphisms between Picard spaces: forgetful maps, mark
//! relabelings, the elliptic-tails map, the genus-2-tail map, and the
//! bubble-attachment map.

use std::collections::BTreeMap;

use num_traits::One;

use crate::basis::{
    canonical_boundary, enumerate_basis, BasisElement, MarkSet, Relabeling, SpaceId,
};
use crate::class::DivisorClass;
use crate::classes::ThetaCombo;
use crate::error::{Error, Result};
use crate::rational::{rat, ratio, Rational};

/// A linear map of divisor classes given by a full table of basis images.
///
/// `source_space` is the space input classes live on; applying the map yields
/// classes on `dest_space`. For a geometric morphism this is the pullback
/// direction: classes on the morphism's target map to classes on its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PullbackMap {
    source: SpaceId,
    dest: SpaceId,
    rows: BTreeMap<BasisElement, DivisorClass>,
}

impl PullbackMap {
    fn from_rows(
        source: SpaceId,
        dest: SpaceId,
        mut row: impl FnMut(&BasisElement) -> Result<DivisorClass>,
    ) -> Result<PullbackMap> {
        let mut rows = BTreeMap::new();
        for e in enumerate_basis(source) {
            let image = row(&e)?;
            if image.space() != dest {
                return Err(Error::SpaceMismatch(format!(
                    "image of {e} lies on {}, expected {dest}",
                    image.space()
                )));
            }
            rows.insert(e, image);
        }
        Ok(PullbackMap { source, dest, rows })
    }

    pub fn source_space(&self) -> SpaceId {
        self.source
    }

    pub fn dest_space(&self) -> SpaceId {
        self.dest
    }

    /// The identity map on `space`.
    pub fn identity(space: SpaceId) -> PullbackMap {
        Self::from_rows(space, space, |e| DivisorClass::term(space, e.clone(), rat(1)))
            .expect("identity rows are valid")
    }

    /// The pullback along the automorphism relabeling marks by `perm`.
    pub fn relabeling_map(space: SpaceId, perm: &Relabeling) -> Result<PullbackMap> {
        if perm.n() != space.n {
            return Err(Error::InvalidMark(format!(
                "relabeling of {} marks applied to {space}",
                perm.n()
            )));
        }
        Self::from_rows(space, space, |e| {
            DivisorClass::term(space, e.clone(), rat(1))?.relabel(perm)
        })
    }

    /// Table row for a canonical basis element of the source space.
    pub fn row(&self, e: &BasisElement) -> Result<&DivisorClass> {
        self.rows.get(e).ok_or_else(|| {
            Error::SpaceMismatch(format!(
                "{e} is not a canonical basis element of {}",
                self.source
            ))
        })
    }

    pub fn rows(&self) -> impl Iterator<Item = (&BasisElement, &DivisorClass)> {
        self.rows.iter()
    }

    /// Image of a single element (which may be non-canonical or a psi class).
    pub fn image_of(&self, e: BasisElement) -> Result<DivisorClass> {
        self.apply(&DivisorClass::term(self.source, e, rat(1))?)
    }

    /// Applies the map to a class on the source space.
    pub fn apply(&self, d: &DivisorClass) -> Result<DivisorClass> {
        if d.space() != self.source {
            return Err(Error::SpaceMismatch(format!(
                "class on {} fed to a map from {}",
                d.space(),
                self.source
            )));
        }
        let mut acc = DivisorClass::zero(self.dest);
        for (e, c) in d.iter() {
            acc = DivisorClass::combine(&Rational::one(), &acc, c, self.row(e)?)?;
        }
        Ok(acc)
    }

    /// The composite map: `self` first, then `next`.
    pub fn then(&self, next: &PullbackMap) -> Result<PullbackMap> {
        if self.dest != next.source {
            return Err(Error::SpaceMismatch(format!(
                "cannot chain a map into {} with a map from {}",
                self.dest, next.source
            )));
        }
        Self::from_rows(self.source, next.dest, |e| {
            next.apply(self.rows.get(e).expect("table is complete"))
        })
    }
}

/// Pullback along the projection forgetting mark `j`, sending classes on
/// `(g, n-1)` to classes on `(g, n)`. Mark `i` of the smaller space
/// corresponds to mark `i` (when `i < j`) or `i+1` (when `i >= j`) of the
/// larger one.
pub fn forgetful_pullback(g: u32, n: u32, j: u32) -> Result<PullbackMap> {
    if n == 0 || j < 1 || j > n {
        return Err(Error::InvalidMark(format!(
            "cannot forget mark {j} on a space with {n} marks"
        )));
    }
    let dest = SpaceId::new(g, n)?;
    let source = SpaceId::new(g, n - 1)?;
    let renumber = |i: u32| if i < j { i } else { i + 1 };
    PullbackMap::from_rows(source, dest, |e| match e {
        BasisElement::Lambda | BasisElement::DeltaIrr => {
            DivisorClass::term(dest, e.clone(), rat(1))
        }
        BasisElement::Omega(i) => {
            DivisorClass::term(dest, BasisElement::Omega(renumber(*i)), rat(1))
        }
        BasisElement::Psi(_) => unreachable!("canonical bases never contain psi"),
        BasisElement::Boundary(b) => {
            let marks = MarkSet::from_marks(b.marks.iter().map(renumber))?;
            let plain = canonical_boundary(dest, b.genus, marks)?;
            let added = canonical_boundary(dest, b.genus, marks.with(j)?)?;
            let mut img = DivisorClass::term(dest, BasisElement::Boundary(plain), rat(1))?;
            // The two summands can name the same divisor (this happens only
            // at genus g/2 on the unpointed source); the image then carries
            // coefficient 1, not 2.
            if added != plain {
                img.add_term(BasisElement::Boundary(added), rat(1))?;
            }
            Ok(img)
        }
    })
}

/// How to read the top boundary row of the elliptic-tails table.
///
/// The rows follow the pattern `delta_j -> theta_j`, which cannot continue to
/// `j = g-1`: no aggregate class with that index exists on `(0, g+1)`.
/// `Clamp` (the adopted reading) substitutes the combination forced by the
/// irreducible-node row; `Literal` tries `theta_{g-1}` and fails loudly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaTopReading {
    #[default]
    Clamp,
    Literal,
}

/// The pullback along the map attaching a fixed elliptic curve at each of
/// the first `g` marks of a rational `(g+1)`-pointed curve, kept in formal
/// theta coordinates so that large genus stays cheap.
///
/// Rows, writing `delta_j` for the boundary class whose genus-`j` side
/// carries the mark: `lambda -> 0`, `delta_0 -> 0`, `delta_j -> theta_j`
/// for `j <= g-2`, `delta_{g-1} -> -sum_i i(g-i)/(g-1) theta_i`, and
/// `omega -> sum_i (g-i)(g-i-1)/(g(g-1)) theta_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticTailsPullback {
    g: u32,
    source: SpaceId,
    rows: BTreeMap<BasisElement, ThetaCombo>,
}

pub fn elliptic_tails_pullback(g: u32) -> Result<EllipticTailsPullback> {
    elliptic_tails_pullback_with(g, ThetaTopReading::Clamp)
}

pub fn elliptic_tails_pullback_with(
    g: u32,
    top: ThetaTopReading,
) -> Result<EllipticTailsPullback> {
    if g < 3 {
        return Err(Error::OutOfRange(format!(
            "elliptic-tails pullback needs g >= 3, got {g}"
        )));
    }
    let source = SpaceId::new(g, 1)?;
    let gi = i64::from(g);
    let mut rows = BTreeMap::new();
    for e in enumerate_basis(source) {
        let combo = match &e {
            BasisElement::Lambda | BasisElement::DeltaIrr => ThetaCombo::zero(g),
            BasisElement::Omega(_) => {
                let mut c = ThetaCombo::zero(g);
                for i in 1..=g - 2 {
                    let ii = i64::from(i);
                    c.add(i, ratio((gi - ii) * (gi - ii - 1), gi * (gi - 1)))?;
                }
                c
            }
            BasisElement::Psi(_) => unreachable!("canonical bases never contain psi"),
            BasisElement::Boundary(b) => {
                let j = if b.marks.is_empty() { g - b.genus } else { b.genus };
                let mut c = ThetaCombo::zero(g);
                if j <= g - 2 {
                    c.add(j, rat(1))?;
                } else {
                    match top {
                        ThetaTopReading::Clamp => {
                            for i in 1..=g - 2 {
                                let ii = i64::from(i);
                                c.add(i, ratio(-(ii * (gi - ii)), gi - 1))?;
                            }
                        }
                        // No such class; surfaces the range error.
                        ThetaTopReading::Literal => c.add(j, rat(1))?,
                    }
                }
                c
            }
        };
        rows.insert(e, combo);
    }
    Ok(EllipticTailsPullback { g, source, rows })
}

impl EllipticTailsPullback {
    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn source_space(&self) -> SpaceId {
        self.source
    }

    pub fn row(&self, e: &BasisElement) -> Result<&ThetaCombo> {
        self.rows.get(e).ok_or_else(|| {
            Error::SpaceMismatch(format!(
                "{e} is not a canonical basis element of {}",
                self.source
            ))
        })
    }

    pub fn rows(&self) -> impl Iterator<Item = (&BasisElement, &ThetaCombo)> {
        self.rows.iter()
    }

    /// Applies the map to a class on `(g, 1)`, in theta coordinates.
    pub fn apply(&self, d: &DivisorClass) -> Result<ThetaCombo> {
        if d.space() != self.source {
            return Err(Error::SpaceMismatch(format!(
                "class on {} fed to the elliptic-tails map on {}",
                d.space(),
                self.source
            )));
        }
        let mut acc = ThetaCombo::zero(self.g);
        for (e, c) in d.iter() {
            acc.accumulate(self.row(e)?, c)?;
        }
        Ok(acc)
    }

    /// Expands every row into explicit boundary classes on `(0, g+1)`.
    /// Exponential in `g`; rejected beyond the materialization limit.
    pub fn materialize(&self) -> Result<PullbackMap> {
        let dest = SpaceId::new(0, self.g + 1)?;
        PullbackMap::from_rows(self.source, dest, |e| {
            self.rows.get(e).expect("table is complete").materialize()
        })
    }
}

/// Sign of the image of the node divisor under the genus-2-tail pullback.
/// `Minus` is the adopted reading; `Plus` is exposed so the resulting span
/// failure can be demonstrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum G2Sign {
    #[default]
    Minus,
    Plus,
}

/// How to read the genus of the fixed curve carrying the marks in the
/// genus-2-tail construction. The glued curve must have genus `g`, which
/// forces `g-2`; `LiteralG` takes a stated genus of `g` at face value and
/// fails the genus bookkeeping check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailGenusReading {
    #[default]
    GMinus2,
    LiteralG,
}

/// Pullback along the map attaching a moving one-pointed genus-2 curve to a
/// fixed general `(n+1)`-pointed curve of genus `g-2` carrying all `n` marks,
/// from classes on `(g, n)` to classes on `(2, 1)`.
///
/// Images are emitted with `lambda` already eliminated through the relation
/// `10 lambda = delta_0 + 2 delta_{1;{}}` on `(2, 1)`, so results live in the
/// span of `{omega, delta_0, delta_{1;{}}}`.
pub fn genus2_tail_pullback(g: u32, n: u32) -> Result<PullbackMap> {
    genus2_tail_pullback_with(g, n, G2Sign::Minus, TailGenusReading::GMinus2)
}

pub fn genus2_tail_pullback_with(
    g: u32,
    n: u32,
    sign: G2Sign,
    tail: TailGenusReading,
) -> Result<PullbackMap> {
    if g < 4 {
        return Err(Error::OutOfRange(format!(
            "genus-2-tail pullback needs g >= 4 so the fixed curve has genus >= 2, got {g}"
        )));
    }
    if n < 1 {
        return Err(Error::OutOfRange(
            "genus-2-tail pullback needs n >= 1".into(),
        ));
    }
    let fixed_genus = match tail {
        TailGenusReading::GMinus2 => g - 2,
        TailGenusReading::LiteralG => g,
    };
    if 2 + fixed_genus != g {
        return Err(Error::OutOfRange(format!(
            "a genus-2 tail glued to a fixed genus-{fixed_genus} curve has total genus {}, \
             not {g}; the fixed curve must have genus {}",
            2 + fixed_genus,
            g - 2
        )));
    }
    let source = SpaceId::new(g, n)?;
    let dest = SpaceId::new(2, 1)?;
    let full = source.marks();
    // The divisor traced when the tail splits off an elliptic piece, and the
    // divisor containing the whole image (the gluing node itself).
    let tail_degenerate = canonical_boundary(source, g - 1, full)?;
    let node = canonical_boundary(source, fixed_genus, full)?;
    let delta1 = BasisElement::Boundary(canonical_boundary(dest, 1, MarkSet::EMPTY)?);
    let node_sign = match sign {
        G2Sign::Minus => rat(-1),
        G2Sign::Plus => rat(1),
    };
    PullbackMap::from_rows(source, dest, |e| match e {
        BasisElement::Lambda => DivisorClass::from_terms(
            dest,
            [
                (BasisElement::DeltaIrr, ratio(1, 10)),
                (delta1.clone(), ratio(1, 5)),
            ],
        ),
        BasisElement::DeltaIrr => DivisorClass::term(dest, BasisElement::DeltaIrr, rat(1)),
        BasisElement::Omega(_) => Ok(DivisorClass::zero(dest)),
        BasisElement::Psi(_) => unreachable!("canonical bases never contain psi"),
        BasisElement::Boundary(b) => {
            if *b == tail_degenerate {
                DivisorClass::term(dest, delta1.clone(), rat(1))
            } else if *b == node {
                DivisorClass::term(dest, BasisElement::Omega(1), node_sign.clone())
            } else {
                Ok(DivisorClass::zero(dest))
            }
        }
    })
}

/// Pullback along the map attaching a rational bubble carrying marks `i` and
/// `j` at the `i`-th point, from classes on `(g, n+1)` to classes on `(g, n)`.
///
/// The canonical table is stated for `(i, j) = (n, n+1)`; other pairs are
/// obtained by conjugating with relabelings. Composing with the forgetful
/// pullback of mark `j` gives the identity.
pub fn bubble_pullback(g: u32, n: u32, i: u32, j: u32) -> Result<PullbackMap> {
    if g < 1 {
        return Err(Error::OutOfRange(
            "bubble pullback needs g >= 1: its rows use psi/omega classes, \
             which genus-0 spaces lack"
                .into(),
        ));
    }
    if n < 1 || i == j || i < 1 || j < 1 || i > n + 1 || j > n + 1 {
        return Err(Error::InvalidMark(format!(
            "bubble marks ({i}, {j}) invalid on a space with {} marks",
            n + 1
        )));
    }
    if (i, j) == (n, n + 1) {
        return base_bubble(g, n);
    }
    let source = SpaceId::new(g, n + 1)?;
    let dest = SpaceId::new(g, n)?;
    let sigma = Relabeling::sending_pair(n + 1, i, j, n, n + 1)?;
    let m_j = |k: u32| if k < j { k } else { k + 1 };
    let nu = Relabeling::new((1..=n).map(|k| sigma.image(m_j(k))).collect())?;
    PullbackMap::relabeling_map(source, &sigma)?
        .then(&base_bubble(g, n)?)?
        .then(&PullbackMap::relabeling_map(dest, &nu.inverse())?)
}

fn base_bubble(g: u32, n: u32) -> Result<PullbackMap> {
    let source = SpaceId::new(g, n + 1)?;
    let dest = SpaceId::new(g, n)?;
    let pair = MarkSet::from_marks([n, n + 1])?;
    PullbackMap::from_rows(source, dest, |e| match e {
        BasisElement::Lambda | BasisElement::DeltaIrr => {
            DivisorClass::term(dest, e.clone(), rat(1))
        }
        BasisElement::Omega(k) => {
            let target = if *k == n + 1 { n } else { *k };
            DivisorClass::term(dest, BasisElement::Omega(target), rat(1))
        }
        BasisElement::Psi(_) => unreachable!("canonical bases never contain psi"),
        BasisElement::Boundary(b) => {
            if b.genus == 0 && b.marks == pair {
                // The divisor whose generic member is the bubble itself.
                let mut img = DivisorClass::zero(dest);
                img.add_term(BasisElement::Psi(n), rat(-1))?;
                Ok(img)
            } else if pair.is_subset_of(b.marks) {
                let c = canonical_boundary(dest, b.genus, b.marks.without(n + 1))?;
                DivisorClass::term(dest, BasisElement::Boundary(c), rat(1))
            } else if b.marks.is_disjoint_from(pair) {
                let c = canonical_boundary(dest, b.genus, b.marks)?;
                DivisorClass::term(dest, BasisElement::Boundary(c), rat(1))
            } else {
                Ok(DivisorClass::zero(dest))
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    
    use crate::classes::{
        bn_class, span_w2_coefficient, theta_class, w2_reduced, weierstrass_class,
    };

    fn space(g: u32, n: u32) -> SpaceId {
        SpaceId::new(g, n).unwrap()
    }

    fn boundary(s: SpaceId, genus: u32, marks: impl IntoIterator<Item = u32>) -> BasisElement {
        BasisElement::Boundary(
            canonical_boundary(s, genus, MarkSet::from_marks(marks).unwrap()).unwrap(),
        )
    }

    fn pull_bn(g: u32) -> DivisorClass {
        forgetful_pullback(g, 1, 1)
            .unwrap()
            .apply(&bn_class(g).unwrap())
            .unwrap()
    }

    #[test]
    fn forgetful_table_examples() {
        // Forgetting the only mark: boundary rows split into two summands.
        let p1 = forgetful_pullback(3, 1, 1).unwrap();
        let s31 = space(3, 1);
        assert_eq!(
            p1.image_of(boundary(space(3, 0), 1, [])).unwrap(),
            DivisorClass::from_terms(
                s31,
                [(boundary(s31, 1, []), rat(1)), (boundary(s31, 1, [1]), rat(1))]
            )
            .unwrap()
        );
        assert_eq!(
            p1.image_of(BasisElement::Lambda).unwrap(),
            DivisorClass::term(s31, BasisElement::Lambda, rat(1)).unwrap()
        );
        // Middle-genus exception: both summands name one divisor, coefficient 1.
        let p41 = forgetful_pullback(4, 1, 1).unwrap();
        let s41 = space(4, 1);
        assert_eq!(
            p41.image_of(boundary(space(4, 0), 2, [])).unwrap(),
            DivisorClass::term(s41, boundary(s41, 2, []), rat(1)).unwrap()
        );
        // A pointed source: no coincidence, marks renumbered around j.
        let p2 = forgetful_pullback(3, 2, 2).unwrap();
        let s32 = space(3, 2);
        assert_eq!(
            p2.image_of(boundary(s31, 1, [1])).unwrap(),
            DivisorClass::from_terms(
                s32,
                [(boundary(s32, 1, [1]), rat(1)), (boundary(s32, 1, [1, 2]), rat(1))]
            )
            .unwrap()
        );
        assert_eq!(
            p2.image_of(BasisElement::Omega(1)).unwrap(),
            DivisorClass::term(s32, BasisElement::Omega(1), rat(1)).unwrap()
        );
        // Renumbering: forgetting mark 1 shifts the surviving mark upward.
        let pj1 = forgetful_pullback(3, 2, 1).unwrap();
        assert_eq!(
            pj1.image_of(BasisElement::Omega(1)).unwrap(),
            DivisorClass::term(s32, BasisElement::Omega(2), rat(1)).unwrap()
        );
        assert!(matches!(
            forgetful_pullback(3, 2, 3),
            Err(Error::InvalidMark(_))
        ));
    }

    #[test]
    fn forgetful_psi_rule() {
        // psi_i pulls back to psi_{m(i)} - delta_{0;{m(i), j}}.
        for (g, n, j) in [(1, 2, 1), (2, 3, 2), (3, 2, 2), (1, 1, 1), (2, 4, 4)] {
            let map = forgetful_pullback(g, n, j).unwrap();
            let dest = space(g, n);
            for i in 1..n {
                // Source mark i; its name on the larger space.
                let m = if i < j { i } else { i + 1 };
                let image = map.image_of(BasisElement::Psi(i)).unwrap();
                let mut expect = DivisorClass::term(dest, BasisElement::Psi(m), rat(1)).unwrap();
                expect
                    .add_term(boundary(dest, 0, [m, j]), rat(-1))
                    .unwrap();
                assert_eq!(image, expect, "psi rule at (g,n,j,i)=({g},{n},{j},{i})");
            }
        }
    }

    #[test]
    fn forgetful_summand_coincidence_only_on_unpointed_source() {
        for g in 2..=9u32 {
            for n in 1..=4u32 {
                for j in 1..=n {
                    let dest = space(g, n);
                    let renumber = |i: u32| if i < j { i } else { i + 1 };
                    for b in crate::basis::enumerate_boundaries(space(g, n - 1)) {
                        let marks = MarkSet::from_marks(b.marks.iter().map(renumber)).unwrap();
                        let plain = canonical_boundary(dest, b.genus, marks).unwrap();
                        let added =
                            canonical_boundary(dest, b.genus, marks.with(j).unwrap()).unwrap();
                        let coincide = plain == added;
                        let expected =
                            n == 1 && g % 2 == 0 && b.genus == g / 2 && b.marks.is_empty();
                        assert_eq!(coincide, expected, "(g,n,j,b)=({g},{n},{j},{b})");
                    }
                }
            }
        }
    }

    #[test]
    fn forgetful_order_commutes() {
        for (g, n) in [(2u32, 4u32), (0, 5), (1, 3)] {
            for q in 2..=n {
                for p in 1..q {
                    let one = forgetful_pullback(g, n - 1, p)
                        .unwrap()
                        .then(&forgetful_pullback(g, n, q).unwrap())
                        .unwrap();
                    let two = forgetful_pullback(g, n - 1, q - 1)
                        .unwrap()
                        .then(&forgetful_pullback(g, n, p).unwrap())
                        .unwrap();
                    assert_eq!(one, two, "(g,n,p,q)=({g},{n},{p},{q})");
                }
            }
        }
    }

    #[test]
    fn elliptic_rows_small_genus() {
        let f = elliptic_tails_pullback(4).unwrap();
        let s = space(4, 1);
        let theta = |pairs: &[(u32, Rational)]| {
            let mut c = ThetaCombo::zero(4);
            for (i, v) in pairs {
                c.add(*i, v.clone()).unwrap();
            }
            c
        };
        assert_eq!(*f.row(&boundary(s, 1, [1])).unwrap(), theta(&[(1, rat(1))]));
        assert_eq!(*f.row(&boundary(s, 2, [])).unwrap(), theta(&[(2, rat(1))]));
        assert_eq!(
            *f.row(&boundary(s, 1, [])).unwrap(),
            theta(&[(1, rat(-1)), (2, ratio(-4, 3))])
        );
        assert_eq!(
            *f.row(&BasisElement::Omega(1)).unwrap(),
            theta(&[(1, ratio(1, 2)), (2, ratio(1, 6))])
        );
        assert!(f.row(&BasisElement::Lambda).unwrap().is_zero());
        assert!(f.row(&BasisElement::DeltaIrr).unwrap().is_zero());
        assert!(matches!(
            elliptic_tails_pullback(2),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn elliptic_tails_kill_the_two_standard_classes() {
        for g in (3..=12).chain([20, 40]) {
            let f = elliptic_tails_pullback(g).unwrap();
            assert!(
                f.apply(&weierstrass_class(g).unwrap()).unwrap().is_zero(),
                "w({g})"
            );
            assert!(f.apply(&pull_bn(g)).unwrap().is_zero(), "bn({g})");
        }
    }

    #[test]
    fn elliptic_literal_top_reading_fails() {
        assert!(elliptic_tails_pullback_with(5, ThetaTopReading::Literal).is_err());
        assert!(elliptic_tails_pullback_with(5, ThetaTopReading::Clamp).is_ok());
    }

    #[test]
    fn elliptic_materialized_table_matches_aggregates() {
        let f = elliptic_tails_pullback(4).unwrap();
        let table = f.materialize().unwrap();
        let s = space(4, 1);
        let one = MarkSet::from_marks([1]).unwrap();
        assert_eq!(
            *table.row(&boundary(s, 1, [1])).unwrap(),
            theta_class(4, 1, 1, one).unwrap()
        );
        assert_eq!(
            *table.row(&boundary(s, 2, [])).unwrap(),
            theta_class(4, 1, 2, one).unwrap()
        );
        // Applying the materialized table agrees with materializing the
        // formal image.
        let w = weierstrass_class(4).unwrap();
        assert_eq!(
            table.apply(&w).unwrap(),
            f.apply(&w).unwrap().materialize().unwrap()
        );
        assert!(table.apply(&w).unwrap().is_zero());
    }

    #[test]
    fn genus2_rows_and_exact_identities() {
        let g2 = genus2_tail_pullback(5, 1).unwrap();
        let s51 = space(5, 1);
        let d21 = space(2, 1);
        let delta1 = boundary(d21, 1, []);
        assert_eq!(
            g2.image_of(BasisElement::Lambda).unwrap(),
            DivisorClass::from_terms(
                d21,
                [(BasisElement::DeltaIrr, ratio(1, 10)), (delta1.clone(), ratio(1, 5))]
            )
            .unwrap()
        );
        assert_eq!(
            g2.image_of(BasisElement::DeltaIrr).unwrap(),
            DivisorClass::term(d21, BasisElement::DeltaIrr, rat(1)).unwrap()
        );
        assert!(g2.image_of(BasisElement::Omega(1)).unwrap().is_zero());
        assert_eq!(
            g2.image_of(boundary(s51, 4, [1])).unwrap(),
            DivisorClass::term(d21, delta1, rat(1)).unwrap()
        );
        assert_eq!(
            g2.image_of(boundary(s51, 3, [1])).unwrap(),
            DivisorClass::term(d21, BasisElement::Omega(1), rat(-1)).unwrap()
        );
        assert!(g2.image_of(boundary(s51, 1, [1])).unwrap().is_zero());
        assert!(g2.image_of(boundary(s51, 2, [1])).unwrap().is_zero());

        for g in 4..=12 {
            let map = genus2_tail_pullback(g, 1).unwrap();
            assert_eq!(
                map.apply(&weierstrass_class(g).unwrap()).unwrap(),
                w2_reduced(),
                "w({g}) image"
            );
            let expect = w2_reduced().scale(&ratio(2 * (i64::from(g) - 2), 3));
            assert_eq!(map.apply(&pull_bn(g)).unwrap(), expect, "bn({g}) image");
        }
    }

    #[test]
    fn genus2_plus_sign_breaks_span_membership() {
        for g in [4, 5, 9] {
            let plus =
                genus2_tail_pullback_with(g, 1, G2Sign::Plus, TailGenusReading::GMinus2).unwrap();
            let image = plus.apply(&pull_bn(g)).unwrap();
            assert_eq!(span_w2_coefficient(&image).unwrap(), None, "g={g}");
            // The adopted sign stays in the span.
            let minus = genus2_tail_pullback(g, 1).unwrap();
            let image = minus.apply(&pull_bn(g)).unwrap();
            assert!(span_w2_coefficient(&image).unwrap().is_some());
        }
    }

    #[test]
    fn genus2_literal_tail_genus_fails_bookkeeping() {
        for g in [4, 5, 8] {
            let err = genus2_tail_pullback_with(g, 1, G2Sign::Minus, TailGenusReading::LiteralG)
                .unwrap_err();
            assert!(matches!(err, Error::OutOfRange(_)));
        }
        assert!(matches!(
            genus2_tail_pullback(3, 1),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn genus2_composite_matches_unpointed_table() {
        for g in [4u32, 5, 8, 11, 40] {
            let composite = forgetful_pullback(g, 1, 1)
                .unwrap()
                .then(&genus2_tail_pullback(g, 1).unwrap())
                .unwrap();
            let s = space(g, 0);
            let d21 = space(2, 1);
            let delta1 = boundary(d21, 1, []);
            let expect = |e: &BasisElement| match e {
                BasisElement::Lambda => DivisorClass::from_terms(
                    d21,
                    [
                        (BasisElement::DeltaIrr, ratio(1, 10)),
                        (delta1.clone(), ratio(1, 5)),
                    ],
                ),
                BasisElement::DeltaIrr => {
                    DivisorClass::term(d21, BasisElement::DeltaIrr, rat(1))
                }
                BasisElement::Boundary(b) if b.genus == 1 => {
                    DivisorClass::term(d21, delta1.clone(), rat(1))
                }
                BasisElement::Boundary(b) if b.genus == 2 => {
                    DivisorClass::term(d21, BasisElement::Omega(1), rat(-1))
                }
                _ => Ok(DivisorClass::zero(d21)),
            };
            for e in enumerate_basis(s) {
                assert_eq!(
                    composite.image_of(e.clone()).unwrap(),
                    expect(&e).unwrap(),
                    "g={g}, row {e}"
                );
            }
        }
    }

    #[test]
    fn bubble_base_rows() {
        // (g,n) = (3,1): source (3,2), dest (3,1).
        let b = bubble_pullback(3, 1, 1, 2).unwrap();
        let s32 = space(3, 2);
        let s31 = space(3, 1);
        assert_eq!(
            b.image_of(boundary(s32, 1, [1, 2])).unwrap(),
            DivisorClass::term(s31, boundary(s31, 1, [1]), rat(1)).unwrap()
        );
        assert_eq!(
            b.image_of(boundary(s32, 0, [1, 2])).unwrap(),
            DivisorClass::term(s31, BasisElement::Omega(1), rat(-1)).unwrap()
        );
        assert_eq!(
            b.image_of(BasisElement::Omega(2)).unwrap(),
            DivisorClass::term(s31, BasisElement::Omega(1), rat(1)).unwrap()
        );
        assert_eq!(
            b.image_of(BasisElement::Omega(1)).unwrap(),
            DivisorClass::term(s31, BasisElement::Omega(1), rat(1)).unwrap()
        );
        assert_eq!(
            b.image_of(boundary(s32, 1, [])).unwrap(),
            DivisorClass::term(s31, boundary(s31, 1, []), rat(1)).unwrap()
        );
        // Mixed marks vanish.
        assert!(b.image_of(boundary(s32, 1, [1])).unwrap().is_zero());
        assert!(b.image_of(boundary(s32, 1, [2])).unwrap().is_zero());
    }

    #[test]
    fn bubble_psi_rows() {
        // Derived psi rows on (2,3) -> (2,2): psi_n and psi_{n+1} die,
        // earlier psi classes survive.
        let b = bubble_pullback(2, 2, 2, 3).unwrap();
        let s22 = space(2, 2);
        assert!(b.image_of(BasisElement::Psi(2)).unwrap().is_zero());
        assert!(b.image_of(BasisElement::Psi(3)).unwrap().is_zero());
        let mut psi1 = DivisorClass::zero(s22);
        psi1.add_term(BasisElement::Psi(1), rat(1)).unwrap();
        assert_eq!(b.image_of(BasisElement::Psi(1)).unwrap(), psi1);
    }

    #[test]
    fn bubble_forgetful_compositions_are_identities() {
        for (g, n) in [(1u32, 1u32), (2, 1), (2, 2), (3, 2), (1, 3)] {
            let id = PullbackMap::identity(space(g, n));
            let bubble = bubble_pullback(g, n, n, n + 1).unwrap();
            let via_last = forgetful_pullback(g, n + 1, n + 1)
                .unwrap()
                .then(&bubble)
                .unwrap();
            assert_eq!(via_last, id, "forget n+1 at (g,n)=({g},{n})");
            let via_n = forgetful_pullback(g, n + 1, n).unwrap().then(&bubble).unwrap();
            assert_eq!(via_n, id, "forget n at (g,n)=({g},{n})");
        }
    }

    #[test]
    fn bubble_general_pairs() {
        // Every pair: composing with the forgetful pullback of the second
        // mark gives the identity.
        for (g, n) in [(2u32, 2u32), (1, 2), (2, 3)] {
            for i in 1..=n + 1 {
                for j in 1..=n + 1 {
                    if i == j {
                        continue;
                    }
                    let comp = forgetful_pullback(g, n + 1, j)
                        .unwrap()
                        .then(&bubble_pullback(g, n, i, j).unwrap())
                        .unwrap();
                    assert_eq!(
                        comp,
                        PullbackMap::identity(space(g, n)),
                        "(g,n,i,j)=({g},{n},{i},{j})"
                    );
                }
            }
        }
        // Composing with the forgetful pullback of the first mark is a pure
        // relabeling: bubble (1,3) after adding mark 1 swaps the two marks.
        let comp = forgetful_pullback(2, 3, 1)
            .unwrap()
            .then(&bubble_pullback(2, 2, 1, 3).unwrap())
            .unwrap();
        let swap = PullbackMap::relabeling_map(space(2, 2), &Relabeling::swap(2, 1, 2).unwrap())
            .unwrap();
        assert_eq!(comp, swap);
    }

    #[test]
    fn bubble_rejects_genus_zero_and_bad_marks() {
        assert!(matches!(
            bubble_pullback(0, 4, 4, 5),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            bubble_pullback(2, 2, 2, 2),
            Err(Error::InvalidMark(_))
        ));
        assert!(matches!(
            bubble_pullback(2, 2, 1, 4),
            Err(Error::InvalidMark(_))
        ));
    }

    #[test]
    fn apply_respects_linearity_and_spaces() {
        let map = forgetful_pullback(3, 1, 1).unwrap();
        let zero = DivisorClass::zero(space(3, 0));
        assert!(map.apply(&zero).unwrap().is_zero());
        let a = bn_class(3).unwrap();
        let b = DivisorClass::term(space(3, 0), BasisElement::Lambda, rat(2)).unwrap();
        let lhs = map
            .apply(&DivisorClass::combine(&ratio(2, 3), &a, &rat(-5), &b).unwrap())
            .unwrap();
        let rhs = DivisorClass::combine(
            &ratio(2, 3),
            &map.apply(&a).unwrap(),
            &rat(-5),
            &map.apply(&b).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
        assert!(matches!(
            map.apply(&DivisorClass::zero(space(3, 1))),
            Err(Error::SpaceMismatch(_))
        ));
    }
}
