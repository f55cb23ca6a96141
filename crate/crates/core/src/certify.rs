//! Exact-rank certificates for the divisor subspaces cut out by the
//! tail-attachment and test-family constraints.
//!
//! A [`ConstraintSystem`] stacks labeled blocks of linear functionals on the
//! Picard basis of one space. Its kernel is computed exactly over the
//! rationals; a [`KernelCertificate`] records how much rank each block
//! contributes, the kernel classes themselves, and a list of named witnesses
//! (membership, independence, and surjectivity spot checks) that must all
//! pass for the certificate to pass.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::basis::{enumerate_basis, BasisElement, MarkSet, SpaceId};
use crate::class::DivisorClass;
use crate::classes::{bn_class, w2_reduced, weierstrass_class, ThetaIndex};
use crate::counting::{even_genus_pair_check, odd_genus_pair_check};
use crate::error::{Error, Result};
use crate::families::standard_catalog;
use crate::linalg::{annihilator, dot, RationalMatrix};
use crate::maps::{
    bubble_pullback, elliptic_tails_pullback, forgetful_pullback, genus2_tail_pullback,
};
use crate::rational::{format_rational, rat, Rational};
use crate::serial::class_to_value;

/// Largest number of surviving marks the multi-mark certificate is
/// configured for. The recursion is valid for any `n`; this cap keeps the
/// default catalogs at a size where every certificate is cheap to recompute.
pub const MAX_SURVIVING_MARKS: u32 = 3;

/// One labeled batch of linear functionals, stored as coefficient rows over
/// the Picard basis of the ambient space.
#[derive(Debug, Clone)]
pub struct ConstraintBlock {
    pub label: String,
    pub rows: Vec<Vec<Rational>>,
}

/// A stack of constraint blocks over the Picard basis of one space.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    space: SpaceId,
    basis: Vec<BasisElement>,
    blocks: Vec<ConstraintBlock>,
}

/// Rank bookkeeping for one block inside a stacked system.
#[derive(Debug, Clone)]
pub struct BlockRank {
    pub label: String,
    pub rows: usize,
    pub rank_added: usize,
}

/// A named boolean spot check attached to a certificate.
#[derive(Debug, Clone)]
pub struct Witness {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

/// The outcome of cutting a subspace out of a Picard group: the per-block
/// rank ledger, the kernel itself, and the witnesses backing the claim.
#[derive(Debug, Clone)]
pub struct KernelCertificate {
    pub space: SpaceId,
    pub expected_dimension: usize,
    pub achieved_dimension: usize,
    pub blocks: Vec<BlockRank>,
    pub witnesses: Vec<Witness>,
    pub kernel: Vec<DivisorClass>,
    pub pass: bool,
}

/// The outcome of pairing the standard family catalog against the distinct
/// theta classes: full rank certifies their independence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaRankCertificate {
    pub g: u32,
    pub n: u32,
    pub rank: usize,
    pub expected: usize,
    pub pass: bool,
}

impl ConstraintSystem {
    pub fn new(space: SpaceId) -> ConstraintSystem {
        ConstraintSystem {
            space,
            basis: enumerate_basis(space),
            blocks: Vec::new(),
        }
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn blocks(&self) -> &[ConstraintBlock] {
        &self.blocks
    }

    /// Appends a block after checking that every row matches the basis width.
    pub fn add_block(&mut self, label: impl Into<String>, rows: Vec<Vec<Rational>>) -> Result<()> {
        let label = label.into();
        for row in &rows {
            if row.len() != self.basis.len() {
                return Err(Error::SpaceMismatch(format!(
                    "block `{label}` row has {} entries but the basis of {} has {}",
                    row.len(),
                    self.space,
                    self.basis.len()
                )));
            }
        }
        self.blocks.push(ConstraintBlock { label, rows });
        Ok(())
    }

    /// All rows of all blocks stacked into one matrix, in insertion order.
    pub fn stacked(&self) -> RationalMatrix {
        let mut m = RationalMatrix::new(self.basis.len());
        for block in &self.blocks {
            for row in &block.rows {
                m.push_row(row.clone())
                    .expect("rows are width-checked when the block is added");
            }
        }
        m
    }

    /// Rank contributed by each block when the blocks are stacked in order.
    pub fn block_ranks(&self) -> Vec<BlockRank> {
        let mut m = RationalMatrix::new(self.basis.len());
        let mut previous = 0;
        let mut out = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            for row in &block.rows {
                m.push_row(row.clone())
                    .expect("rows are width-checked when the block is added");
            }
            let rank = m.rank();
            out.push(BlockRank {
                label: block.label.clone(),
                rows: block.rows.len(),
                rank_added: rank - previous,
            });
            previous = rank;
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.stacked().rank()
    }

    /// The common kernel of all blocks, decoded as divisor classes.
    pub fn kernel_classes(&self) -> Result<Vec<DivisorClass>> {
        self.stacked()
            .kernel()
            .into_iter()
            .map(|v| DivisorClass::from_vector(self.space, &self.basis, &v))
            .collect()
    }

    /// Whether every functional in the system vanishes on `d`.
    pub fn annihilates(&self, d: &DivisorClass) -> Result<bool> {
        if d.space() != self.space {
            return Err(Error::SpaceMismatch(format!(
                "class on {} tested against constraints on {}",
                d.space(),
                self.space
            )));
        }
        let v = d.to_vector(&self.basis)?;
        for block in &self.blocks {
            for row in &block.rows {
                if !dot(row, &v).is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// A canonical minimal generating set for the row space: the nonzero
    /// rows of the reduced echelon form, independent of block order.
    pub fn annihilator_rows(&self) -> Vec<Vec<Rational>> {
        let (reduced, _) = self.stacked().rref();
        (0..reduced.rows()).map(|r| reduced.row(r).to_vec()).collect()
    }
}

fn expected_dimension(n: u32) -> usize {
    // One pulled-back Brill-Noether class, one pointed-Weierstrass class per
    // mark, and one coincidence class per unordered pair of marks.
    (1 + n + n * (n - 1) / 2) as usize
}

/// Functionals on `(g, n)` that vanish exactly on the classes whose
/// genus-2-tail pullback lies in the span of the reduced Weierstrass class.
fn genus2_span_rows(g: u32, n: u32, basis: &[BasisElement]) -> Result<Vec<Vec<Rational>>> {
    let tail = genus2_tail_pullback(g, n)?;
    let small_basis = enumerate_basis(SpaceId::new(2, 1)?);
    let target = w2_reduced().to_vector(&small_basis)?;
    let functionals = annihilator(&target)?;
    let mut images = Vec::with_capacity(basis.len());
    for b in basis {
        images.push(tail.row(b)?.to_vector(&small_basis)?);
    }
    Ok(functionals
        .iter()
        .map(|phi| images.iter().map(|image| dot(phi, image)).collect())
        .collect())
}

/// The single-mark constraint system: theta-coordinate functionals of the
/// elliptic-tails pullback, then the genus-2-tail span conditions.
fn single_mark_system(g: u32) -> Result<ConstraintSystem> {
    let space = SpaceId::new(g, 1)?;
    let mut system = ConstraintSystem::new(space);
    let basis = system.basis().to_vec();

    let tails = elliptic_tails_pullback(g)?;
    let mut rows = Vec::with_capacity((g - 2) as usize);
    for i in 1..=g - 2 {
        let mut row = Vec::with_capacity(basis.len());
        for b in &basis {
            row.push(tails.row(b)?.coeff(i));
        }
        rows.push(row);
    }
    system.add_block("fprime-theta", rows)?;
    let gprime = genus2_span_rows(g, 1, &basis)?;
    system.add_block("gprime-span", gprime)?;
    Ok(system)
}

/// The Brill-Noether class pulled back from `(g, 0)` to `(g, n)`.
fn pulled_bn_class(g: u32, n: u32) -> Result<DivisorClass> {
    let mut d = bn_class(g)?;
    for k in 1..=n {
        d = forgetful_pullback(g, k, k)?.apply(&d)?;
    }
    Ok(d)
}

/// The pointed-Weierstrass class pulled back from `(g, 1)` to `(g, n)` so
/// that its distinguished mark lands at position `i`.
fn pulled_weierstrass_class(g: u32, n: u32, i: u32) -> Result<DivisorClass> {
    if i < 1 || i > n {
        return Err(Error::InvalidMark(format!(
            "mark {i} is not one of the {n} surviving marks"
        )));
    }
    let mut d = weierstrass_class(g)?;
    let mut position = 1;
    for k in 2..=n {
        // Inserting the new mark in front shifts the distinguished mark up;
        // inserting it at the end leaves the position alone.
        let j = if position < i { 1 } else { k };
        d = forgetful_pullback(g, k, j)?.apply(&d)?;
        if j <= position {
            position += 1;
        }
    }
    debug_assert_eq!(position, i);
    Ok(d)
}

fn finish_certificate(
    system: &ConstraintSystem,
    expected: usize,
    witnesses: Vec<Witness>,
) -> Result<KernelCertificate> {
    let blocks = system.block_ranks();
    let rank: usize = blocks.iter().map(|b| b.rank_added).sum();
    let kernel = system.kernel_classes()?;
    debug_assert_eq!(rank + kernel.len(), system.basis().len());
    let achieved = kernel.len();
    let pass = achieved == expected && witnesses.iter().all(|w| w.pass);
    Ok(KernelCertificate {
        space: system.space(),
        expected_dimension: expected,
        achieved_dimension: achieved,
        blocks,
        witnesses,
        kernel,
        pass,
    })
}

fn certify_single_mark(g: u32, system: &ConstraintSystem) -> Result<KernelCertificate> {
    let mut witnesses = Vec::new();

    let w = weierstrass_class(g)?;
    let bn = pulled_bn_class(g, 1)?;

    let w_in = system.annihilates(&w)?;
    witnesses.push(Witness {
        label: "membership:weierstrass".into(),
        pass: w_in,
        detail: format!("all constraints vanish on the pointed-Weierstrass class: {w_in}"),
    });
    let bn_in = system.annihilates(&bn)?;
    witnesses.push(Witness {
        label: "membership:pulled-bn".into(),
        pass: bn_in,
        detail: format!("all constraints vanish on the pulled-back Brill-Noether class: {bn_in}"),
    });

    let w_omega = w.coeff(&BasisElement::Omega(1));
    let bn_omega = bn.coeff(&BasisElement::Omega(1));
    let independent = !w_omega.is_zero() && bn_omega.is_zero();
    witnesses.push(Witness {
        label: "independence:omega-coefficient".into(),
        pass: independent,
        detail: format!(
            "omega coefficients {} vs {} separate the two members",
            format_rational(&w_omega),
            format_rational(&bn_omega)
        ),
    });

    let theta = theta_rank_certificate(g, 1)?;
    witnesses.push(Witness {
        label: "theta-rank".into(),
        pass: theta.pass,
        detail: format!(
            "catalog families pair with rank {} against {} distinct theta classes",
            theta.rank, theta.expected
        ),
    });

    finish_certificate(system, expected_dimension(1), witnesses)
}

fn certify_multi_mark(
    g: u32,
    n: u32,
    system: &ConstraintSystem,
    sub: &KernelCertificate,
) -> Result<KernelCertificate> {
    let mut witnesses = Vec::new();

    let bn = pulled_bn_class(g, n)?;
    let bn_in = system.annihilates(&bn)?;
    witnesses.push(Witness {
        label: "membership:pulled-bn".into(),
        pass: bn_in,
        detail: format!("all constraints vanish on the pulled-back Brill-Noether class: {bn_in}"),
    });
    let bn_lambda = bn.coeff(&BasisElement::Lambda);
    witnesses.push(Witness {
        label: "surjectivity:bn-lambda".into(),
        pass: !bn_lambda.is_zero(),
        detail: format!(
            "lambda coefficient {} of the pulled-back Brill-Noether class",
            format_rational(&bn_lambda)
        ),
    });

    for i in 1..=n {
        let w = pulled_weierstrass_class(g, n, i)?;
        let w_in = system.annihilates(&w)?;
        witnesses.push(Witness {
            label: format!("membership:pulled-w({i})"),
            pass: w_in,
            detail: format!(
                "all constraints vanish on the Weierstrass class at mark {i}: {w_in}"
            ),
        });
        let w_omega = w.coeff(&BasisElement::Omega(i));
        witnesses.push(Witness {
            label: format!("surjectivity:w-omega({i})"),
            pass: !w_omega.is_zero(),
            detail: format!(
                "omega_{i} coefficient {} of the Weierstrass class at mark {i}",
                format_rational(&w_omega)
            ),
        });
    }

    let (pair_nonzero, pair_detail) = if g % 2 == 1 {
        let check = odd_genus_pair_check(u64::from(g))?;
        (
            check.nonzero,
            format!(
                "odd-genus point counts {} and {} stay apart",
                check.lhs, check.rhs
            ),
        )
    } else {
        let check = even_genus_pair_check(u64::from(g))?;
        (
            check.nonzero,
            format!(
                "even-genus point counts differ by {}",
                check.difference
            ),
        )
    };
    witnesses.push(Witness {
        label: "surjectivity:delta-pair".into(),
        pass: pair_nonzero,
        detail: pair_detail,
    });

    witnesses.push(Witness {
        label: format!("subspace({})", n - 1),
        pass: sub.pass,
        detail: format!(
            "certificate one mark down achieved dimension {} of {}",
            sub.achieved_dimension, sub.expected_dimension
        ),
    });

    finish_certificate(system, expected_dimension(n), witnesses)
}

/// Builds the constraint system and certificate at `(g, n)`, recursing down
/// to the single-mark base so each bubble block can reuse the annihilator of
/// the system one mark below.
fn build_certified_system(g: u32, n: u32) -> Result<(ConstraintSystem, KernelCertificate)> {
    if g < 4 {
        return Err(Error::OutOfRange(format!(
            "kernel certificates need genus >= 4 so the genus-2 tail map exists, got {g}"
        )));
    }
    if n < 1 || n > MAX_SURVIVING_MARKS {
        return Err(Error::OutOfRange(format!(
            "kernel certificates are configured for 1..={MAX_SURVIVING_MARKS} marks, got {n}"
        )));
    }
    if n == 1 {
        let system = single_mark_system(g)?;
        let certificate = certify_single_mark(g, &system)?;
        return Ok((system, certificate));
    }

    let (sub_system, sub_certificate) = build_certified_system(g, n - 1)?;
    let space = SpaceId::new(g, n)?;
    let mut system = ConstraintSystem::new(space);
    let basis = system.basis().to_vec();

    let mut rows = Vec::new();
    for family in standard_catalog(g, n)? {
        let forwarded = family.forward(g, n)?;
        let mut row = Vec::with_capacity(basis.len());
        for b in &basis {
            row.push(rat(forwarded.intersect(b)?));
        }
        rows.push(row);
    }
    system.add_block("family-pairing", rows)?;

    let gprime = genus2_span_rows(g, n, &basis)?;
    system.add_block("gprime-span", gprime)?;

    // Bubbling marks i and j must send each kernel class into the kernel one
    // mark below; compose the sub-level annihilator with the bubble pullback.
    let sub_annihilator = sub_system.annihilator_rows();
    let sub_basis = sub_system.basis().to_vec();
    for i in 1..=n {
        for j in i + 1..=n {
            let bubble = bubble_pullback(g, n - 1, i, j)?;
            let mut images = Vec::with_capacity(basis.len());
            for b in &basis {
                images.push(bubble.row(b)?.to_vector(&sub_basis)?);
            }
            let rows: Vec<Vec<Rational>> = sub_annihilator
                .iter()
                .map(|phi| images.iter().map(|image| dot(phi, image)).collect())
                .collect();
            system.add_block(format!("bubble({i},{j})-membership"), rows)?;
        }
    }

    let certificate = certify_multi_mark(g, n, &system, &sub_certificate)?;
    Ok((system, certificate))
}

/// Certifies that the single-mark constraints cut the expected
/// two-dimensional subspace out of the Picard group of `(g, 1)`.
pub fn bn_space_n1(g: u32) -> Result<KernelCertificate> {
    build_certified_system(g, 1).map(|(_, certificate)| certificate)
}

/// Certifies the subspace cut out on `(g, n)` for `2 <= n <=`
/// [`MAX_SURVIVING_MARKS`]: expected dimension `1 + n + n(n-1)/2`.
pub fn bn_space_general(g: u32, n: u32) -> Result<KernelCertificate> {
    if n < 2 {
        return Err(Error::OutOfRange(format!(
            "the multi-mark certificate starts at 2 marks (got {n}); use bn_space_n1 for one"
        )));
    }
    build_certified_system(g, n).map(|(_, certificate)| certificate)
}

/// The marked theta classes: `theta_{i;{1}}` for every valid `i`. Their
/// mirrors cover the classes marked by the second surviving mark, so this
/// family has `g + n - 3` distinct members.
///
/// The unmarked and fully-marked columns are deliberately excluded: together
/// with the marked ones they satisfy one genuine divisor-class relation per
/// extra mark (checkable against the span of all four-part-partition
/// curves), so no pairing matrix can separate the merged full set.
pub fn marked_theta_indices(g: u32, n: u32) -> Result<Vec<ThetaIndex>> {
    if g + n < 4 {
        return Err(Error::OutOfRange(format!(
            "no valid marked theta classes on genus {g} with {n} marks"
        )));
    }
    let first = MarkSet::from_marks([1])?;
    (1..=g + n - 3)
        .map(|i| {
            let index = ThetaIndex { i, s: first };
            index.validate(g, n)?;
            Ok(index)
        })
        .collect()
}

/// Pairs the standard family catalog against the distinct marked theta
/// classes and certifies that the pairing matrix has full column rank.
pub fn theta_rank_certificate(g: u32, n: u32) -> Result<ThetaRankCertificate> {
    if g < 4 {
        return Err(Error::OutOfRange(format!(
            "theta rank certificates need genus >= 4, got {g}"
        )));
    }
    if !(1..=2).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "theta rank certificates cover 1 or 2 surviving marks, got {n}"
        )));
    }
    let columns = marked_theta_indices(g, n)?;
    let mut matrix = RationalMatrix::new(columns.len());
    for family in standard_catalog(g, n)? {
        let mut row = Vec::with_capacity(columns.len());
        for index in &columns {
            row.push(rat(family.theta_pairing(g, n, index)?));
        }
        matrix.push_row(row)?;
    }
    let rank = matrix.rank();
    let expected = columns.len();
    Ok(ThetaRankCertificate {
        g,
        n,
        rank,
        expected,
        pass: rank == expected,
    })
}

/// Propagates pairwise coincidence coefficients `d_{ij}` to a coefficient
/// for every subset of the marks via the triviality relations
/// `(|S| - 2) d_S = sum over x in S of d_(S minus x)`, re-checking every
/// relation on the completed assignment.
///
/// The input must contain exactly one coefficient per unordered pair of
/// marks; the output maps every subset of size `>= 2` (the pairs included)
/// to its forced coefficient.
pub fn showtriv_propagate(
    n: u32,
    pair_coeffs: &BTreeMap<(u32, u32), Rational>,
) -> Result<BTreeMap<MarkSet, Rational>> {
    if !(3..=MarkSet::MAX_MARK).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "propagation needs between 3 and {} marks, got {n}",
            MarkSet::MAX_MARK
        )));
    }
    let mut expected_pairs = 0usize;
    for i in 1..=n {
        for j in i + 1..=n {
            if !pair_coeffs.contains_key(&(i, j)) {
                return Err(Error::OutOfRange(format!(
                    "missing pair coefficient for marks ({i}, {j})"
                )));
            }
            expected_pairs += 1;
        }
    }
    if pair_coeffs.len() != expected_pairs {
        return Err(Error::OutOfRange(format!(
            "expected exactly the {expected_pairs} ordered pairs i < j <= {n}, got {} entries",
            pair_coeffs.len()
        )));
    }

    let mut out: BTreeMap<MarkSet, Rational> = BTreeMap::new();
    for (&(i, j), coeff) in pair_coeffs {
        out.insert(MarkSet::from_marks([i, j])?, coeff.clone());
    }
    let subsets = MarkSet::full(n).subsets();
    for size in 3..=n {
        for s in subsets.iter().filter(|s| s.len() == size) {
            let mut sum = Rational::zero();
            for x in s.iter() {
                sum += &out[&s.without(x)];
            }
            out.insert(*s, sum / rat(i64::from(size) - 2));
        }
    }
    // Every relation holds by construction; re-check the completed
    // assignment anyway so a future refactor cannot silently break it.
    for s in subsets.iter().filter(|s| s.len() >= 3) {
        let mut relation = rat(2 - i64::from(s.len())) * &out[s];
        for x in s.iter() {
            relation += &out[&s.without(x)];
        }
        assert!(
            relation.is_zero(),
            "propagated coefficients fail the relation at {s}"
        );
    }
    Ok(out)
}

/// Serializes a kernel certificate for reports.
pub fn certificate_to_value(certificate: &KernelCertificate) -> Value {
    json!({
        "space": { "g": certificate.space.g, "n": certificate.space.n },
        "expected-dimension": certificate.expected_dimension,
        "achieved-dimension": certificate.achieved_dimension,
        "blocks": certificate.blocks.iter().map(|b| json!({
            "label": b.label,
            "rows": b.rows,
            "rank-added": b.rank_added,
        })).collect::<Vec<_>>(),
        "witnesses": certificate.witnesses.iter().map(|w| json!({
            "label": w.label,
            "pass": w.pass,
            "detail": w.detail,
        })).collect::<Vec<_>>(),
        "kernel": certificate.kernel.iter().map(class_to_value).collect::<Vec<_>>(),
        "pass": certificate.pass,
    })
}

/// Serializes a theta rank certificate for reports.
pub fn theta_certificate_to_value(certificate: &ThetaRankCertificate) -> Value {
    json!({
        "g": certificate.g,
        "n": certificate.n,
        "rank": certificate.rank,
        "expected": certificate.expected,
        "pass": certificate.pass,
    })
}
