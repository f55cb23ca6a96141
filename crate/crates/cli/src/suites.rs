//! The verification suites: each builds a deterministic list of check tasks,
//! which the runner may execute in parallel. Report order never depends on
//! the parallelism level.

use crate::report::CheckReport;
use modpic_core::basis::{canonical_boundary, enumerate_basis, BasisElement, MarkSet, SpaceId};
use modpic_core::certify::{
    bn_space_general, bn_space_n1, marked_theta_indices, showtriv_propagate,
    theta_rank_certificate,
};
use modpic_core::class::DivisorClass;
use modpic_core::classes::{
    bn_class, span_w2_coefficient, theta_class_with, w2_reduced, weierstrass_class, ThetaCombo,
    ThetaIndex, ThetaShift,
};
use modpic_core::counting::{
    a_count, elliptic_tail_feasible, even_genus_pair_check, odd_genus_pair_check, plucker_total,
    residual_simple_points, RamificationSeq, SeriesParams,
};
use modpic_core::families::{attach_family, fiber_family, standard_catalog};
use modpic_core::linalg::RationalMatrix;
use modpic_core::maps::{
    elliptic_tails_pullback_with, forgetful_pullback, genus2_tail_pullback_with, G2Sign,
    TailGenusReading, ThetaTopReading,
};
use modpic_core::rational::{binomial, factorial, format_rational, rat, rat_int, ratio};
use modpic_core::{Integer, Rational, Result};
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::time::Instant;

/// An inclusive genus or mark range, written `a..b` (or a single value).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GRange {
    pub lo: u32,
    pub hi: u32,
}

impl GRange {
    pub fn new(lo: u32, hi: u32) -> GRange {
        GRange { lo, hi }
    }

    pub fn iter(self) -> std::ops::RangeInclusive<u32> {
        self.lo..=self.hi
    }
}

pub fn parse_grange(s: &str) -> std::result::Result<GRange, String> {
    let parse_end = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| format!("`{t}` is not a nonnegative integer"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse_end(a)?, parse_end(b)?),
        None => {
            let v = parse_end(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(GRange::new(lo, hi))
}

/// The adopted readings of the source-table ambiguities, each with a flag to
/// flip it so the resulting failure can be demonstrated.
#[derive(Debug, Clone, Copy)]
pub struct Readings {
    pub g2_sign: G2Sign,
    pub theta_top: ThetaTopReading,
    pub theta_shift: ThetaShift,
    pub tail_genus: TailGenusReading,
}

impl Default for Readings {
    fn default() -> Readings {
        Readings {
            g2_sign: G2Sign::Minus,
            theta_top: ThetaTopReading::Clamp,
            theta_shift: ThetaShift::ByTails,
            tail_genus: TailGenusReading::GMinus2,
        }
    }
}

impl Readings {
    fn theta_top_note(&self) -> String {
        match self.theta_top {
            ThetaTopReading::Clamp => {
                "theta-top=clamp: the quoted top row theta_{g-1} names no class and is read as \
                 the combination forced by the irreducible-node row"
                    .into()
            }
            ThetaTopReading::Literal => {
                "theta-top=literal: the top row is read as a literal theta_{g-1} (no such class; \
                 expected to fail)"
                    .into()
            }
        }
    }

    fn g2_sign_note(&self) -> String {
        match self.g2_sign {
            G2Sign::Minus => "g2-sign=minus: the node-divisor image carries the minus sign".into(),
            G2Sign::Plus => {
                "g2-sign=plus: the node-divisor image sign is flipped (expected to leave the \
                 Weierstrass span)"
                    .into()
            }
        }
    }

    fn tail_genus_note(&self) -> String {
        match self.tail_genus {
            TailGenusReading::GMinus2 => {
                "tail-genus=g-minus-2: the marked component has genus g-2".into()
            }
            TailGenusReading::LiteralG => {
                "tail-genus=literal-g: the marked-component genus is read literally as g \
                 (expected to fail)"
                    .into()
            }
        }
    }

    fn theta_shift_note(&self) -> String {
        match self.theta_shift {
            ThetaShift::ByTails => {
                "theta-shift=by-tails: surviving marks are shifted past the g tail marks".into()
            }
            ThetaShift::ByMarks => {
                "theta-shift=by-marks: surviving marks shifted by the mark count (expected to \
                 fail)"
                    .into()
            }
        }
    }
}

pub type Task = Box<dyn FnOnce() -> CheckReport + Send>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    KernelN1,
    ThetaRank,
    SubspaceDim,
    PairCoeff,
    Counts,
    Plucker,
    EngineGoldens,
    MapIdentities,
    All,
}

/// Builds the deterministic task list for a suite over the given ranges.
pub fn collect_tasks(
    suite: Suite,
    g: Option<GRange>,
    n: Option<GRange>,
    readings: Readings,
) -> Vec<Task> {
    let mut tasks = Vec::new();
    match suite {
        Suite::KernelN1 => kernel_n1_tasks(g.unwrap_or(GRange::new(4, 30)), readings, &mut tasks),
        Suite::ThetaRank => theta_rank_tasks(g, n, readings, &mut tasks),
        Suite::SubspaceDim => subspace_dim_tasks(g, n, &mut tasks),
        Suite::PairCoeff => pair_coeff_tasks(n.unwrap_or(GRange::new(3, 5)), &mut tasks),
        Suite::Counts => counts_tasks(g.unwrap_or(GRange::new(3, 41)), &mut tasks),
        Suite::Plucker => plucker_tasks(g.unwrap_or(GRange::new(3, 41)), &mut tasks),
        Suite::EngineGoldens => engine_tasks(g.unwrap_or(GRange::new(3, 12)), &mut tasks),
        Suite::MapIdentities => {
            map_identity_tasks(g.unwrap_or(GRange::new(3, 40)), readings, &mut tasks)
        }
        Suite::All => {
            for sub in [
                Suite::KernelN1,
                Suite::ThetaRank,
                Suite::SubspaceDim,
                Suite::PairCoeff,
                Suite::Counts,
                Suite::Plucker,
                Suite::EngineGoldens,
                Suite::MapIdentities,
            ] {
                tasks.extend(collect_tasks(sub, g, n, readings));
            }
        }
    }
    tasks
}

/// Runs the tasks, optionally on a dedicated pool of `jobs` threads, and
/// returns the reports in task order.
pub fn execute(tasks: Vec<Task>, jobs: Option<usize>) -> Vec<CheckReport> {
    let run = |tasks: Vec<Task>| {
        tasks
            .into_par_iter()
            .map(|task| {
                let start = Instant::now();
                let mut report = task();
                report.elapsed = start.elapsed();
                report
            })
            .collect()
    };
    match jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("worker pool")
            .install(|| run(tasks)),
        None => run(tasks),
    }
}

fn pulled_bn(g: u32) -> Result<DivisorClass> {
    forgetful_pullback(g, 1, 1)?.apply(&bn_class(g)?)
}

fn combo_text(c: &ThetaCombo) -> String {
    if c.is_zero() {
        return "0".into();
    }
    c.iter()
        .map(|(i, v)| format!("{}*theta_{i}", format_rational(v)))
        .collect::<Vec<_>>()
        .join(" + ")
}

// ---------------------------------------------------------------------------
// kernel-n1
// ---------------------------------------------------------------------------

fn kernel_n1_tasks(g_range: GRange, readings: Readings, tasks: &mut Vec<Task>) {
    for g in g_range.iter() {
        let note = readings.theta_top_note();
        tasks.push(Box::new(move || {
            let report = CheckReport::new("kernel-n1").param("g", i64::from(g)).note(note);
            let expected = "dimension 2 containing W and the pulled-back BN class";
            match bn_space_n1(g) {
                Ok(cert) => {
                    let theta_ok = cert
                        .witnesses
                        .iter()
                        .any(|w| w.label == "theta-rank" && w.pass);
                    let failing: Vec<&str> = cert
                        .witnesses
                        .iter()
                        .filter(|w| !w.pass)
                        .map(|w| w.label.as_str())
                        .collect();
                    let computed = if failing.is_empty() {
                        format!(
                            "dimension {}; all witnesses pass",
                            cert.achieved_dimension
                        )
                    } else {
                        format!(
                            "dimension {}; failing witnesses: {}",
                            cert.achieved_dimension,
                            failing.join(", ")
                        )
                    };
                    let pass = cert.pass && cert.achieved_dimension == 2 && theta_ok;
                    let report = if theta_ok {
                        report
                    } else {
                        report.note(
                            "refused: the theta-rank certificate does not pass at this genus",
                        )
                    };
                    report.outcome(expected, computed, pass)
                }
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
    }
}

// ---------------------------------------------------------------------------
// theta-rank
// ---------------------------------------------------------------------------

fn theta_rank_tasks(
    g: Option<GRange>,
    n: Option<GRange>,
    readings: Readings,
    tasks: &mut Vec<Task>,
) {
    let n_range = n.unwrap_or(GRange::new(1, 2));
    for marks in n_range.iter() {
        let g_default = if marks == 1 {
            GRange::new(4, 30)
        } else {
            GRange::new(4, 15)
        };
        let g_range = g.unwrap_or(g_default);
        // Materializing theta classes is exponential in g; unless the caller
        // pinned the range, keep the cross-check to small genus.
        let mat_cap = if g.is_some() { g_range.hi } else if marks == 1 { 10 } else { 8 };
        for genus in g_range.iter() {
            tasks.push(Box::new(move || {
                let report = CheckReport::new("theta-rank")
                    .param("g", i64::from(genus))
                    .param("n", i64::from(marks))
                    .note(
                        "columns are the marked theta classes theta_{i;{1}}; merged with their \
                         mirrors the unmarked columns satisfy a genuine divisor relation, so \
                         only the marked family can have full rank",
                    );
                match theta_rank_certificate(genus, marks) {
                    Ok(cert) => {
                        let pass = cert.pass && cert.rank == cert.expected;
                        report.outcome(
                            format!("rank {} (full)", cert.expected),
                            format!("rank {}", cert.rank),
                            pass,
                        )
                    }
                    Err(e) => report.failure("full column rank", e.to_string()),
                }
            }));
            if genus <= mat_cap {
                let shift = readings.theta_shift;
                let note = readings.theta_shift_note();
                tasks.push(Box::new(move || {
                    let report = CheckReport::new("theta-rank/materialized")
                        .param("g", i64::from(genus))
                        .param("n", i64::from(marks))
                        .note(note);
                    let expected = "materialized pairings equal the formal table";
                    match materialized_cross_check(genus, marks, shift) {
                        Ok(None) => report.outcome(expected, "all pairings agree", true),
                        Ok(Some(mismatch)) => report.outcome(expected, mismatch, false),
                        Err(e) => report.failure(expected, e.to_string()),
                    }
                }));
            }
        }
    }
}

/// Pairs every cataloged family with every marked theta class twice: through
/// the formal theta table and through the materialized boundary expansion
/// under the selected shift reading. Returns the first mismatch, if any.
fn materialized_cross_check(g: u32, n: u32, shift: ThetaShift) -> Result<Option<String>> {
    let columns = marked_theta_indices(g, n)?;
    let families = standard_catalog(g, n)?;
    for (k, family) in families.iter().enumerate() {
        for idx in &columns {
            let formal = rat(family.theta_pairing(g, n, idx)?);
            let class = theta_class_with(g, n, idx.i, idx.s, shift)?;
            let direct = family.pairing(&class)?;
            if direct != formal {
                return Ok(Some(format!(
                    "family #{k} pairs theta_{} as {} materialized vs {} formal",
                    idx.i,
                    format_rational(&direct),
                    format_rational(&formal)
                )));
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// subspace-dim
// ---------------------------------------------------------------------------

fn subspace_dim_tasks(g: Option<GRange>, n: Option<GRange>, tasks: &mut Vec<Task>) {
    let n_range = n.unwrap_or(GRange::new(2, 3));
    for marks in n_range.iter() {
        let g_default = if marks <= 2 {
            GRange::new(4, 15)
        } else {
            GRange::new(4, 10)
        };
        let g_range = g.unwrap_or(g_default);
        for genus in g_range.iter() {
            tasks.push(Box::new(move || {
                let expected_dim = 1 + marks + marks * (marks.saturating_sub(1)) / 2;
                let report = CheckReport::new("subspace-dim")
                    .param("g", i64::from(genus))
                    .param("n", i64::from(marks));
                let expected = format!("dimension {expected_dim}");
                match bn_space_general(genus, marks) {
                    Ok(cert) => {
                        let pass = cert.pass
                            && cert.achieved_dimension == expected_dim as usize;
                        report.outcome(
                            expected,
                            format!("dimension {}", cert.achieved_dimension),
                            pass,
                        )
                    }
                    Err(e) => report.failure(expected, e.to_string()),
                }
            }));
        }
    }
}

// ---------------------------------------------------------------------------
// pair-coeff
// ---------------------------------------------------------------------------

fn all_pairs(n: u32, f: impl Fn(u32, u32) -> Rational) -> BTreeMap<(u32, u32), Rational> {
    let mut out = BTreeMap::new();
    for i in 1..=n {
        for j in i + 1..=n {
            out.insert((i, j), f(i, j));
        }
    }
    out
}

fn pair_coeff_tasks(n_range: GRange, tasks: &mut Vec<Task>) {
    for n in n_range.iter() {
        tasks.push(Box::new(move || {
            let report = CheckReport::new("pair-coeff/zero").param("n", i64::from(n));
            let expected = "every propagated coefficient is zero";
            match showtriv_propagate(n, &all_pairs(n, |_, _| rat(0))) {
                Ok(out) => {
                    let nonzero = out.iter().find(|(_, v)| !v.is_zero());
                    match nonzero {
                        None => report.outcome(expected, "all zero", true),
                        Some((s, v)) => report.outcome(
                            expected,
                            format!("coefficient {} at a {}-set", format_rational(v), s.len()),
                            false,
                        ),
                    }
                }
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
        tasks.push(Box::new(move || {
            let report = CheckReport::new("pair-coeff/uniqueness").param("n", i64::from(n));
            let expected = "the restricted relation system has full column rank";
            match propagation_uniqueness_rank(n) {
                Ok((rank, unknowns)) => report.outcome(
                    format!("{expected} ({unknowns})"),
                    format!("rank {rank}"),
                    rank == unknowns,
                ),
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
    }
    if n_range.iter().contains(&3) {
        tasks.push(Box::new(|| {
            let report = CheckReport::new("pair-coeff/worked").param("n", 3);
            let expected = "all-ones pairs give the full set coefficient 3";
            match showtriv_propagate(3, &all_pairs(3, |_, _| rat(1))) {
                Ok(out) => {
                    let full = out[&MarkSet::full(3)].clone();
                    let pass = full == rat(3);
                    report.outcome(expected, format!("coefficient {}", format_rational(&full)), pass)
                }
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
    }
    if n_range.iter().contains(&4) {
        tasks.push(Box::new(|| {
            let report = CheckReport::new("pair-coeff/worked").param("n", 4);
            let expected = "indicator pair {1,2} propagates to 1,1,0,0,1 on the size-3+ sets";
            let input = all_pairs(4, |i, j| if (i, j) == (1, 2) { rat(1) } else { rat(0) });
            match showtriv_propagate(4, &input) {
                Ok(out) => {
                    let set = |marks: &[u32]| MarkSet::from_marks(marks.iter().copied()).unwrap();
                    let got = [
                        out[&set(&[1, 2, 3])].clone(),
                        out[&set(&[1, 2, 4])].clone(),
                        out[&set(&[1, 3, 4])].clone(),
                        out[&set(&[2, 3, 4])].clone(),
                        out[&set(&[1, 2, 3, 4])].clone(),
                    ];
                    let want = [rat(1), rat(1), rat(0), rat(0), rat(1)];
                    let text = got
                        .iter()
                        .map(format_rational)
                        .collect::<Vec<_>>()
                        .join(",");
                    report.outcome(expected, text, got == want)
                }
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
    }
}

fn propagation_uniqueness_rank(n: u32) -> Result<(usize, usize)> {
    let unknowns: Vec<MarkSet> = MarkSet::full(n)
        .subsets()
        .into_iter()
        .filter(|s| s.len() >= 3)
        .collect();
    let position: BTreeMap<MarkSet, usize> =
        unknowns.iter().enumerate().map(|(k, s)| (*s, k)).collect();
    let mut matrix = RationalMatrix::new(unknowns.len());
    for s in &unknowns {
        let mut row = vec![Rational::zero(); unknowns.len()];
        row[position[s]] = rat(2 - i64::from(s.len()));
        for x in s.iter() {
            let rest = s.without(x);
            if rest.len() >= 3 {
                row[position[&rest]] += rat(1);
            }
        }
        matrix.push_row(row)?;
    }
    Ok((matrix.rank(), unknowns.len()))
}

// ---------------------------------------------------------------------------
// counts
// ---------------------------------------------------------------------------

fn counts_tasks(g_range: GRange, tasks: &mut Vec<Task>) {
    tasks.push(Box::new(|| {
        let report = CheckReport::new("counts/golden");
        let golden: &[((u64, u64, u64), i64)] = &[
            ((5, 1, 3), 120),
            ((4, 2, 3), 96),
            ((4, 3, 2), 36),
            ((4, 1, 2), 24),
            ((4, 1, 4), 60),
        ];
        let expected = "120, 96, 36, 24, 60 with difference 48 at g=4";
        for &((g, m, n), want) in golden {
            match a_count(g, m, n) {
                Ok(v) if v == Integer::from(want) => {}
                Ok(v) => {
                    return report.outcome(
                        expected,
                        format!("a_count({g},{m},{n}) = {v}, wanted {want}"),
                        false,
                    );
                }
                Err(e) => return report.failure(expected, e.to_string()),
            }
        }
        match even_genus_pair_check(4) {
            Ok(c) if c.difference == Integer::from(48) => {
                report.outcome(expected, "all golden counts match", true)
            }
            Ok(c) => report.outcome(
                expected,
                format!("difference {} at g=4, wanted 48", c.difference),
                false,
            ),
            Err(e) => report.failure(expected, e.to_string()),
        }
    }));
    for g in g_range.iter().filter(|g| g % 2 == 1).map(u64::from) {
        tasks.push(Box::new(move || {
            let report = CheckReport::new("counts/odd-closed-form").param("g", g as i64);
            let want = Integer::from(24) * binomial(g, (g + 3) / 2);
            let expected = format!("a_count({g},1,3) = {want}");
            match a_count(g, 1, 3) {
                Ok(v) => {
                    let pass = v == want;
                    report.outcome(expected, v.to_string(), pass)
                }
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
        tasks.push(Box::new(move || {
            let report = CheckReport::new("counts/odd-reduction").param("g", g as i64);
            let below = Integer::from(g - 1);
            let above = Integer::from(g + 1);
            let middle = Integer::from(g);
            let want_lhs = &below * &above;
            let want_rhs = &middle * &above;
            let expected = format!("{want_lhs} vs {want_rhs}, never equal");
            match odd_genus_pair_check(g) {
                Ok(c) => {
                    let pass =
                        c.nonzero && c.reduced_lhs == want_lhs && c.reduced_rhs == want_rhs;
                    report.outcome(
                        expected,
                        format!("{} vs {}", c.reduced_lhs, c.reduced_rhs),
                        pass,
                    )
                }
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
    }
    for g in g_range.iter().filter(|g| g % 2 == 0 && *g >= 4).map(u64::from) {
        tasks.push(Box::new(move || {
            let report = CheckReport::new("counts/even-difference").param("g", g as i64);
            let scale = rat_int(factorial(g))
                / rat_int(factorial(g / 2 - 1) * factorial(g / 2 + 2));
            let want = rat(48) * scale;
            let expected = format!("difference 48*g!/((g/2-1)!(g/2+2)!) = {}", format_rational(&want));
            match even_genus_pair_check(g) {
                Ok(c) => {
                    let got = rat_int(c.difference.clone());
                    let pass = c.nonzero && got == want;
                    report.outcome(expected, format_rational(&got), pass)
                }
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
    }
}

// ---------------------------------------------------------------------------
// plucker
// ---------------------------------------------------------------------------

fn plucker_tasks(g_range: GRange, tasks: &mut Vec<Task>) {
    tasks.push(Box::new(|| {
        let report = CheckReport::new("plucker/golden").param("g", 3).param("r", 1).param("d", 2);
        match plucker_total(3, 1, 2) {
            Ok(v) => report.outcome("total weight 8", v.to_string(), v == 8),
            Err(e) => report.failure("total weight 8", e.to_string()),
        }
    }));
    tasks.push(Box::new(|| {
        let report = CheckReport::new("plucker/two-component");
        let expected = "spine budget minus node budget equals the total, over the full grid";
        for r in 1..=20u64 {
            for d in 1..=20u64 {
                for g in [0u64, 1, 2, 3, 5, 11, 23, 40] {
                    let total = match plucker_total(g, r, d) {
                        Ok(v) => v,
                        Err(e) => return report.failure(expected, e.to_string()),
                    };
                    let (gi, ri, di) = (g as i64, r as i64, d as i64);
                    let spine = (ri + 1) * (2 * di + ri * (gi - 2));
                    let node = (ri + 1) * (di - ri);
                    if spine - node != total {
                        return report.outcome(
                            expected,
                            format!("mismatch at (g,r,d)=({g},{r},{d})"),
                            false,
                        );
                    }
                }
            }
        }
        report.outcome(expected, "identity holds on the grid", true)
    }));
    tasks.push(Box::new(|| {
        let report = CheckReport::new("plucker/budget");
        let expected = "slack 1 admits weight 0 and rejects weight 2 with deficit -1";
        let run = || -> Result<(i64, (bool, i64), (bool, i64))> {
            let p = SeriesParams::new(3, 1, 3)?;
            let heavy = RamificationSeq::new(vec![0, 2])?;
            let light = RamificationSeq::new(vec![0, 0])?;
            Ok((
                p.slack(),
                elliptic_tail_feasible(&p, &[heavy])?,
                elliptic_tail_feasible(&p, &[light])?,
            ))
        };
        match run() {
            Ok((slack, heavy, light)) => {
                let pass = slack == 1 && heavy == (false, -1) && light == (true, 1);
                report.outcome(
                    expected,
                    format!("slack {slack}, heavy {heavy:?}, light {light:?}"),
                    pass,
                )
            }
            Err(e) => report.failure(expected, e.to_string()),
        }
    }));
    for g in g_range.iter().filter(|g| g % 2 == 1).map(u64::from) {
        tasks.push(Box::new(move || {
            let report = CheckReport::new("plucker/residual").param("g", g as i64);
            let expected = format!("3g = {}", 3 * g);
            match residual_simple_points(g) {
                Ok(v) => {
                    let pass = v == 3 * g as i64;
                    report.outcome(expected, v.to_string(), pass)
                }
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
    }
}

// ---------------------------------------------------------------------------
// engine-goldens
// ---------------------------------------------------------------------------

fn engine_tasks(g_range: GRange, tasks: &mut Vec<Task>) {
    tasks.push(Box::new(|| {
        let report = CheckReport::new("engine/attach-rows").param_text("ambient", "(3,8)");
        let expected =
            "moving-attachment rows: 2-|S| on delta_{0;S}, +1 on each delta_{0;S-x}, 0 on omega";
        match attach_rows_check() {
            Ok(None) => report.outcome(expected, "all rows match", true),
            Ok(Some(bad)) => report.outcome(expected, bad, false),
            Err(e) => report.failure(expected, e.to_string()),
        }
    }));
    for g in g_range.iter() {
        tasks.push(Box::new(move || {
            let report = CheckReport::new("engine/fiber-theta-degree").param("g", i64::from(g));
            let expected = format!("theta_1 degree {g} on the fiber family");
            let run = || -> Result<i64> {
                let fiber = fiber_family(g + 1, g + 1)?;
                let idx = ThetaIndex {
                    i: 1,
                    s: MarkSet::from_marks([1])?,
                };
                fiber.theta_pairing(g, 1, &idx)
            };
            match run() {
                Ok(v) => {
                    let pass = v == i64::from(g);
                    report.outcome(expected, format!("degree {v}"), pass)
                }
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
        tasks.push(Box::new(move || {
            let report = CheckReport::new("engine/forward-cross-check").param("g", i64::from(g));
            let expected = "forwarded intersections equal the formal theta pairings";
            match forward_cross_check(g) {
                Ok(None) => report.outcome(expected, "all pairings agree", true),
                Ok(Some(bad)) => report.outcome(expected, bad, false),
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
    }
}

fn attach_rows_check() -> Result<Option<String>> {
    let space = SpaceId::new(3, 8)?;
    for k in 2u32..=6 {
        let s = MarkSet::from_marks(1..=k)?;
        let family = attach_family(space, s)?;
        let main = BasisElement::Boundary(canonical_boundary(space, 0, s)?);
        if family.intersect(&main)? != 2 - i64::from(k) {
            return Ok(Some(format!("main row off at |S|={k}")));
        }
        for x in s.iter() {
            let rest = s.without(x);
            if rest.len() >= 2 {
                let b = BasisElement::Boundary(canonical_boundary(space, 0, rest)?);
                if family.intersect(&b)? != 1 {
                    return Ok(Some(format!("unit row off at |S|={k}, x={x}")));
                }
            }
        }
        for i in 1..=8 {
            if family.intersect(&BasisElement::Omega(i))? != 0 {
                return Ok(Some(format!("omega_{i} row off at |S|={k}")));
            }
        }
        if family.intersect(&BasisElement::Lambda)? != 0
            || family.intersect(&BasisElement::DeltaIrr)? != 0
        {
            return Ok(Some(format!("lambda or delta_irr row off at |S|={k}")));
        }
    }
    Ok(None)
}

fn forward_cross_check(g: u32) -> Result<Option<String>> {
    let pull = elliptic_tails_pullback_with(g, ThetaTopReading::Clamp)?;
    let space = SpaceId::new(g, 1)?;
    let basis = enumerate_basis(space);
    let first = MarkSet::from_marks([1])?;
    for (k, family) in standard_catalog(g, 1)?.iter().enumerate() {
        for b in &basis {
            let d = DivisorClass::term(space, *b, rat(1))?;
            let direct = family.forward_pair(&d)?;
            let combo = pull.apply(&d)?;
            let mut formal = Rational::zero();
            for (i, c) in combo.iter() {
                let idx = ThetaIndex { i: *i, s: first };
                formal += c * rat(family.theta_pairing(g, 1, &idx)?);
            }
            if direct != formal {
                return Ok(Some(format!(
                    "family #{k} on basis {b}: forwarded {} vs formal {}",
                    format_rational(&direct),
                    format_rational(&formal)
                )));
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// map-identities
// ---------------------------------------------------------------------------

fn map_identity_tasks(g_range: GRange, readings: Readings, tasks: &mut Vec<Task>) {
    for g in g_range.iter() {
        let top = readings.theta_top;
        let top_note = readings.theta_top_note();
        {
            let top_note = top_note.clone();
            tasks.push(Box::new(move || {
                let report = CheckReport::new("map/fprime-weierstrass")
                    .param("g", i64::from(g))
                    .note(top_note);
                let expected = "zero theta image";
                let run = || -> Result<ThetaCombo> {
                    elliptic_tails_pullback_with(g, top)?.apply(&weierstrass_class(g)?)
                };
                match run() {
                    Ok(image) => {
                        let pass = image.is_zero();
                        report.outcome(expected, combo_text(&image), pass)
                    }
                    Err(e) => report.failure(expected, e.to_string()),
                }
            }));
        }
        tasks.push(Box::new(move || {
            let report = CheckReport::new("map/fprime-bn")
                .param("g", i64::from(g))
                .note(top_note);
            let expected = "zero theta image";
            let run = || -> Result<ThetaCombo> {
                elliptic_tails_pullback_with(g, top)?.apply(&pulled_bn(g)?)
            };
            match run() {
                Ok(image) => {
                    let pass = image.is_zero();
                    report.outcome(expected, combo_text(&image), pass)
                }
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
        if g < 4 {
            continue;
        }
        let sign = readings.g2_sign;
        let tail = readings.tail_genus;
        let notes = vec![readings.g2_sign_note(), readings.tail_genus_note()];
        {
            let notes = notes.clone();
            tasks.push(Box::new(move || {
                let report = CheckReport::new("map/gprime-weierstrass")
                    .param("g", i64::from(g))
                    .notes(&notes);
                let expected = "the genus-2 Weierstrass class (lambda eliminated)";
                let run = || -> Result<DivisorClass> {
                    genus2_tail_pullback_with(g, 1, sign, tail)?.apply(&weierstrass_class(g)?)
                };
                match run() {
                    Ok(image) => {
                        let pass = image == w2_reduced();
                        report.outcome(expected, image.to_string(), pass)
                    }
                    Err(e) => report.failure(expected, e.to_string()),
                }
            }));
        }
        tasks.push(Box::new(move || {
            let report = CheckReport::new("map/gprime-bn")
                .param("g", i64::from(g))
                .notes(&notes);
            let coefficient = ratio(2 * (i64::from(g) - 2), 3);
            let expected = format!("({})*W2", format_rational(&coefficient));
            let run = || -> Result<Option<Rational>> {
                let image =
                    genus2_tail_pullback_with(g, 1, sign, tail)?.apply(&pulled_bn(g)?)?;
                span_w2_coefficient(&image)
            };
            match run() {
                Ok(Some(c)) => {
                    let pass = c == coefficient;
                    report.outcome(expected, format!("({})*W2", format_rational(&c)), pass)
                }
                Ok(None) => report.outcome(expected, "outside span{W2}", false),
                Err(e) => report.failure(expected, e.to_string()),
            }
        }));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse_inclusively() {
        assert_eq!(parse_grange("4..30").unwrap(), GRange::new(4, 30));
        assert_eq!(parse_grange("7").unwrap(), GRange::new(7, 7));
        assert!(parse_grange("9..4").is_err());
        assert!(parse_grange("x..4").is_err());
        assert_eq!(GRange::new(4, 30).iter().count(), 27);
    }

    #[test]
    fn kernel_suite_passes_on_a_small_range() {
        let tasks = collect_tasks(
            Suite::KernelN1,
            Some(GRange::new(4, 6)),
            None,
            Readings::default(),
        );
        let reports = execute(tasks, Some(2));
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(|r| r.pass), "{reports:#?}");
    }

    #[test]
    fn flipping_the_sign_fails_the_gprime_check() {
        let readings = Readings {
            g2_sign: G2Sign::Plus,
            ..Readings::default()
        };
        let tasks = collect_tasks(
            Suite::MapIdentities,
            Some(GRange::new(5, 5)),
            None,
            readings,
        );
        let reports = execute(tasks, None);
        let bn = reports
            .iter()
            .find(|r| r.name == "map/gprime-bn")
            .expect("gprime-bn report");
        assert!(!bn.pass);
        assert_eq!(bn.computed, "outside span{W2}");
    }

    #[test]
    fn flipping_the_shift_fails_the_materialized_cross_check() {
        let readings = Readings {
            theta_shift: ThetaShift::ByMarks,
            ..Readings::default()
        };
        let tasks = collect_tasks(
            Suite::ThetaRank,
            Some(GRange::new(5, 5)),
            Some(GRange::new(1, 1)),
            readings,
        );
        let reports = execute(tasks, None);
        let cert = reports.iter().find(|r| r.name == "theta-rank").unwrap();
        assert!(cert.pass, "the formal certificate is shift-independent");
        let mat = reports
            .iter()
            .find(|r| r.name == "theta-rank/materialized")
            .unwrap();
        assert!(!mat.pass);
    }

    #[test]
    fn report_order_is_independent_of_parallelism() {
        let build = || {
            collect_tasks(
                Suite::Counts,
                Some(GRange::new(3, 12)),
                None,
                Readings::default(),
            )
        };
        let one = execute(build(), Some(1));
        let four = execute(build(), Some(4));
        let text =
            |rs: &[CheckReport]| rs.iter().map(|r| r.to_text(false)).collect::<Vec<_>>();
        assert_eq!(text(&one), text(&four));
    }
}
