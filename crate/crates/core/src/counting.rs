//! Exact enumerative counts: Catalan numbers, the A-count of linear series
//! with prescribed ramification, ramification budgets, and the two
//! coefficient-nonvanishing checks they feed.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{binomial, expect_integer, factorial, rat, rat_int, Integer, Rational};

/// The `k`-th Catalan number `(2k)! / (k! (k+1)!)`.
pub fn catalan(k: u64) -> Integer {
    factorial(2 * k) / (factorial(k) * factorial(k + 1))
}

/// Parameters of a linear series: a `g^r_d` on a genus-`g` curve, with the
/// derived Brill-Noether slack `a = g - (r+1)(g-d+r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesParams {
    pub g: i64,
    pub r: i64,
    pub d: i64,
}

impl SeriesParams {
    pub fn new(g: i64, r: i64, d: i64) -> Result<SeriesParams> {
        if r < 1 || d < 1 {
            return Err(Error::OutOfRange(format!(
                "series parameters need r >= 1 and d >= 1, got r={r}, d={d}"
            )));
        }
        Ok(SeriesParams { g, r, d })
    }

    /// The ramification budget `a = g - (r+1)(g-d+r)`, equal to
    /// `(r+1)(d-r) - g*r`.
    pub fn slack(&self) -> i64 {
        self.g - (self.r + 1) * (self.g - self.d + self.r)
    }
}

/// A ramification sequence: `r+1` nondecreasing nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamificationSeq {
    z: Vec<i64>,
}

impl RamificationSeq {
    pub fn new(z: Vec<i64>) -> Result<RamificationSeq> {
        if z.is_empty() {
            return Err(Error::OutOfRange("a ramification sequence has length r+1 >= 2".into()));
        }
        if z[0] < 0 || z.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::OutOfRange(format!(
                "ramification entries must be nondecreasing and nonnegative: {z:?}"
            )));
        }
        Ok(RamificationSeq { z })
    }

    pub fn entries(&self) -> &[i64] {
        &self.z
    }

    /// The weight `|Z| = sum of the entries`.
    pub fn weight(&self) -> i64 {
        self.z.iter().sum()
    }

    /// Checks the sequence against an ambient series: length `r+1` and top
    /// entry at most `d-r`.
    pub fn validate_for(&self, p: &SeriesParams) -> Result<()> {
        if self.z.len() as i64 != p.r + 1 {
            return Err(Error::OutOfRange(format!(
                "sequence length {} does not match r+1 = {}",
                self.z.len(),
                p.r + 1
            )));
        }
        let top = *self.z.last().expect("nonempty");
        if top > p.d - p.r {
            return Err(Error::OutOfRange(format!(
                "top ramification entry {top} exceeds d-r = {}",
                p.d - p.r
            )));
        }
        Ok(())
    }
}

/// The weight of a ramification sequence.
pub fn beta_weight(z: &RamificationSeq) -> i64 {
    z.weight()
}

/// The number of linear series `g^1_d` with one `m`-fold and one `n`-fold
/// point on a general curve of genus `g`, where `2d = g+m+n-1`:
///
/// `g! (n^2-1) * sum_{j=max(0,m+n-d-1)}^{min(m-1,n-1,d)}
///      (m+n-2j-1) / ((d-m-n+j+1)! (d-j)!)`.
///
/// The result is provably integral; integrality is asserted on every call.
/// An empty summation range yields 0.
pub fn a_count(g: u64, m: u64, n: u64) -> Result<Integer> {
    if m < 1 || n < 1 {
        return Err(Error::OutOfRange(format!("a_count needs m, n >= 1, got m={m}, n={n}")));
    }
    let twice_d = g + m + n - 1;
    if twice_d % 2 != 0 {
        return Err(Error::ParityError(format!(
            "2d = g+m+n-1 = {twice_d} is odd for (g,m,n) = ({g},{m},{n})"
        )));
    }
    let d = twice_d / 2;
    if d < 1 {
        return Err(Error::OutOfRange(format!("derived degree d = {d} must be at least 1")));
    }
    let j_min = if m + n >= d + 1 { m + n - d - 1 } else { 0 };
    let j_max = (m - 1).min(n - 1).min(d);
    let mut sum = Rational::zero();
    let mut j = j_min;
    while j <= j_max {
        let numer = rat((m + n - 2 * j - 1) as i64);
        // d+j+1 >= m+n holds for every j >= max(0, m+n-d-1).
        let denom = rat_int(factorial(d + j + 1 - (m + n)) * factorial(d - j));
        sum += numer / denom;
        j += 1;
    }
    let total = rat_int(factorial(g) * (Integer::from(n) * Integer::from(n) - Integer::one())) * sum;
    let value = expect_integer(&total, "a_count")?;
    if value.is_negative() {
        return Err(Error::OutOfRange(format!("a_count produced a negative value {value}")));
    }
    Ok(value)
}

/// The A-count addressed by `(g, d, n)` instead of `(g, m, n)`: derives the
/// companion multiplicity `m = 2d+1-g-n`.
pub fn a_count_by_degree(g: u64, d: u64, n: u64) -> Result<Integer> {
    let m = (2 * d + 1) as i64 - g as i64 - n as i64;
    if m < 1 {
        return Err(Error::OutOfRange(format!(
            "derived multiplicity m = 2d+1-g-n = {m} must be at least 1 for (g,d,n) = ({g},{d},{n})"
        )));
    }
    a_count(g, m as u64, n)
}

/// Total ramification weight of a `g^r_d` on a smooth genus-`g` curve:
/// `(r+1)(d + r(g-1))`.
pub fn plucker_total(g: u64, r: u64, d: u64) -> Result<i64> {
    if r < 1 || d < 1 {
        return Err(Error::OutOfRange(format!("plucker_total needs r, d >= 1, got r={r}, d={d}")));
    }
    let (g, r, d) = (g as i64, r as i64, d as i64);
    Ok((r + 1) * (d + r * (g - 1)))
}

/// Whether prescribed ramification sequences fit inside the budget of a
/// series: returns `(sum of weights <= a, a - sum of weights)` where `a` is
/// the slack of `p`. Divisor-defining data (total weight `a+1`) therefore
/// always reports `(false, -1)`.
pub fn elliptic_tail_feasible(p: &SeriesParams, zs: &[RamificationSeq]) -> Result<(bool, i64)> {
    for z in zs {
        z.validate_for(p)?;
    }
    let a = p.slack();
    let total: i64 = zs.iter().map(RamificationSeq::weight).sum();
    Ok((total <= a, a - total))
}

/// For odd `g`, the residual count of simple ramification points of the
/// pencils appearing in the odd-genus coefficient check:
/// `2((g+3)/2 + g - 1) - 1`, which collapses to `3g`.
pub fn residual_simple_points(g: u64) -> Result<i64> {
    if g % 2 == 0 {
        return Err(Error::ParityError(format!("residual count is defined for odd g, got {g}")));
    }
    let v = 2 * ((g as i64 + 3) / 2 + g as i64 - 1) - 1;
    debug_assert_eq!(v, 3 * g as i64);
    Ok(v)
}

/// Result of the odd-genus coefficient check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddPairCheck {
    /// `a_count(g, 1, 3)`.
    pub lhs: Integer,
    /// `6g * catalan((g+1)/2)`.
    pub rhs: Integer,
    pub nonzero: bool,
    /// `lhs * K` with `K = ((g+1)/2)! ((g+3)/2)! / (6 g!)`; equals
    /// `(g-1)(g+1)`.
    pub reduced_lhs: Integer,
    /// `rhs * K`; equals `g(g+1)`.
    pub reduced_rhs: Integer,
}

/// Compares `a_count(g,1,3)` with `6g * catalan((g+1)/2)` for odd `g >= 3`
/// and verifies the closed-form reduction of both sides.
pub fn odd_genus_pair_check(g: u64) -> Result<OddPairCheck> {
    if g % 2 == 0 {
        return Err(Error::ParityError(format!("the odd-genus check needs odd g, got {g}")));
    }
    if g < 3 {
        return Err(Error::OutOfRange(format!("the odd-genus check needs g >= 3, got {g}")));
    }
    let lhs = a_count(g, 1, 3)?;
    let rhs = Integer::from(6 * g) * catalan((g + 1) / 2);
    let k = rat_int(factorial((g + 1) / 2) * factorial((g + 3) / 2))
        / rat_int(Integer::from(6) * factorial(g));
    let reduced_lhs = expect_integer(&(rat_int(lhs.clone()) * k.clone()), "reduced lhs")?;
    let reduced_rhs = expect_integer(&(rat_int(rhs.clone()) * k), "reduced rhs")?;
    let gi = Integer::from(g);
    let one = Integer::one();
    if reduced_lhs != (&gi - &one) * (&gi + &one) || reduced_rhs != &gi * (&gi + &one) {
        return Err(Error::OutOfRange(format!(
            "reduction identity failed at g={g}: got {reduced_lhs} vs (g-1)(g+1) and {reduced_rhs} vs g(g+1)"
        )));
    }
    let nonzero = lhs != rhs;
    Ok(OddPairCheck { lhs, rhs, nonzero, reduced_lhs, reduced_rhs })
}

/// Result of the even-genus coefficient check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenPairCheck {
    /// `a_count(g,2,3) + a_count(g,3,2)`.
    pub lhs: Integer,
    /// `a_count(g,1,2) + a_count(g,1,4)`.
    pub rhs: Integer,
    /// `lhs - rhs`; equals `48 * g! / ((g/2-1)! (g/2+2)!)`.
    pub difference: Integer,
    pub nonzero: bool,
}

/// Compares `a_count(g,2,3) + a_count(g,3,2)` with
/// `a_count(g,1,2) + a_count(g,1,4)` for even `g >= 4` and verifies the
/// closed-form difference.
pub fn even_genus_pair_check(g: u64) -> Result<EvenPairCheck> {
    if g % 2 != 0 {
        return Err(Error::ParityError(format!("the even-genus check needs even g, got {g}")));
    }
    if g < 4 {
        return Err(Error::OutOfRange(format!("the even-genus check needs g >= 4, got {g}")));
    }
    let lhs = a_count(g, 2, 3)? + a_count(g, 3, 2)?;
    let rhs = a_count(g, 1, 2)? + a_count(g, 1, 4)?;
    let difference = &lhs - &rhs;
    // The common rational factor g! / ((g/2-1)! (g/2+2)!): the two sides are
    // 33g and 33g-48 times it (the factor itself need not be integral).
    let scale = rat_int(factorial(g)) / rat_int(factorial(g / 2 - 1) * factorial(g / 2 + 2));
    let thirty_three_g = rat(33 * g as i64);
    if rat_int(lhs.clone()) != &thirty_three_g * &scale
        || rat_int(rhs.clone()) != (&thirty_three_g - rat(48)) * &scale
        || rat_int(difference.clone()) != rat(48) * &scale
    {
        return Err(Error::OutOfRange(format!(
            "difference identity failed at g={g}: lhs={lhs}, rhs={rhs}"
        )));
    }
    let nonzero = lhs != rhs;
    Ok(EvenPairCheck { lhs, rhs, difference, nonzero })
}

/// `24 * C(g, (g+3)/2)`: the closed form of `a_count(g,1,3)` for odd `g`.
pub fn odd_a13_closed_form(g: u64) -> Result<Integer> {
    if g % 2 == 0 {
        return Err(Error::ParityError(format!("closed form defined for odd g, got {g}")));
    }
    Ok(Integer::from(24) * binomial(g, (g + 3) / 2))
}
