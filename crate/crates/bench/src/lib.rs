//! Scenario builders shared by the benchmark targets: each wraps one hot
//! path of the core crate with fixed, representative parameters.

use modpic_core::basis::{enumerate_basis, SpaceId};
use modpic_core::certify::{bn_space_n1, theta_rank_certificate, KernelCertificate};
use modpic_core::class::DivisorClass;
use modpic_core::classes::weierstrass_class;
use modpic_core::counting::a_count;
use modpic_core::families::{pairing_matrix, standard_catalog};
use modpic_core::maps::elliptic_tails_pullback;
use modpic_core::rational::rat;
use modpic_core::{Integer, Result};

/// Full single-mark kernel certificate (matrix assembly plus elimination).
pub fn single_mark_certificate(g: u32) -> Result<KernelCertificate> {
    bn_space_n1(g)
}

/// Rank of the marked theta-class pairing matrix.
pub fn theta_rank(g: u32, n: u32) -> Result<usize> {
    theta_rank_certificate(g, n).map(|c| c.rank)
}

/// Rank of the catalog-versus-basis intersection matrix on `(g, 1)`.
pub fn catalog_pairing_rank(g: u32) -> Result<usize> {
    let space = SpaceId::new(g, 1)?;
    let classes = enumerate_basis(space)
        .into_iter()
        .map(|b| DivisorClass::term(space, b, rat(1)))
        .collect::<Result<Vec<_>>>()?;
    let families = standard_catalog(g, 1)?
        .into_iter()
        .map(|f| f.forward(g, 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairing_matrix(&families, &classes)?.rank())
}

/// Applies the elliptic-tails pullback to the Weierstrass class; the image
/// is zero, and staying in formal theta coordinates keeps large genus cheap.
pub fn tails_image_is_zero(g: u32) -> Result<bool> {
    let image = elliptic_tails_pullback(g)?.apply(&weierstrass_class(g)?)?;
    Ok(image.is_zero())
}

/// One big-integer point count (`g` must be odd for the derived degree to
/// be integral).
pub fn point_count(g: u64) -> Result<Integer> {
    a_count(g, 1, 3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenarios_produce_the_expected_shapes() {
        let cert = single_mark_certificate(6).unwrap();
        assert!(cert.pass);
        assert_eq!(cert.achieved_dimension, 2);
        assert_eq!(theta_rank(8, 1).unwrap(), 6);
        // Rank of the forwarded catalog matrix is bounded by the basis size.
        let rank = catalog_pairing_rank(5).unwrap();
        assert!(rank > 0 && rank <= enumerate_basis(SpaceId::new(5, 1).unwrap()).len());
        assert!(tails_image_is_zero(25).unwrap());
        assert_eq!(point_count(5).unwrap(), Integer::from(120));
    }
}
