//! Foliated discrepancies on a minimal resolution via numerical pullback,
//! singularity status, partial log discrepancies, the good-lc test, and the
//! foliation-vs-variety gap coefficients.
//!
//! Two bookkeeping conventions are in play and are kept strictly apart:
//! the linear system is solved in the "log" convention (non-invariant
//! exceptional curves absorbed with coefficient 1), which makes the solved
//! coefficients the log discrepancies a_i + eps_i; the report then stores
//! both the plain discrepancies a_i and the log discrepancies so the two can
//! never be confused downstream.

use crate::classify::{classify, TypeTag};
use crate::graph::{CurveRole, CurveVertex, FoliatedDualGraph};
use crate::linalg::{self, LinalgError};
use crate::rat::{rat, Rat};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DiscrepancyError {
    #[error("intersection matrix is not negative definite")]
    NotNegativeDefinite,
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] LinalgError),
    #[error("non-invariant components intersect; log-resolution hypotheses violated")]
    NonInvariantIntersection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Terminal,
    Canonical,
    LogTerminal,
    LogCanonical,
    NotLC,
}

impl Status {
    pub fn at_least_canonical(self) -> bool {
        matches!(self, Status::Terminal | Status::Canonical)
    }

    pub fn at_least_log_canonical(self) -> bool {
        !matches!(self, Status::NotLC)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Terminal => "Terminal",
            Status::Canonical => "Canonical",
            Status::LogTerminal => "LogTerminal",
            Status::LogCanonical => "LogCanonical",
            Status::NotLC => "NotLC",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoodLc {
    Yes,
    No,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    /// Discrepancy a(E_i) per exceptional curve.
    pub a: BTreeMap<String, Rat>,
    /// Log discrepancy a(E_i) + eps(E_i).
    pub log_disc: BTreeMap<String, Rat>,
    pub status: Status,
    /// Minimum of the nonzero log discrepancies on the resolution, with the
    /// convention min(empty) = 0. Surprising but deliberate: a germ whose log
    /// discrepancies all vanish reports pld = 0.
    pub pld: Rat,
    /// True when pld came from the empty-minimum convention.
    pub pld_by_convention: bool,
    /// Minimum over all log discrepancies, zeros included.
    pub unfiltered_min: Rat,
    pub good_lc: GoodLc,
}

/// K_Fol . E for a single curve: invariant curves contribute their Z-index
/// corrected by the virtual Euler characteristic, non-invariant ones their
/// tangency order minus the self-intersection.
pub fn kfol_degree(v: &CurveVertex) -> i64 {
    match &v.role {
        CurveRole::Invariant { z_index } => *z_index as i64 + 2 * v.genus as i64 - 2,
        CurveRole::Transverse { tang } => *tang as i64 - v.self_int,
    }
}

/// K_Y . E by adjunction on the underlying surface.
pub fn kvar_degree(v: &CurveVertex) -> i64 {
    2 * v.genus as i64 - 2 - v.self_int
}

/// Theta . E_j = sum_i b_i t_{i,j}.
fn boundary_degree(g: &FoliatedDualGraph, j: usize) -> Rat {
    let id = &g.vertices[j].id;
    let mut acc = Rat::zero();
    for b in &g.boundary {
        let t = b.meets_mult(id);
        if t > 0 {
            acc += &b.coeff * rat(t as i64);
        }
    }
    acc
}

/// (sum of non-invariant exceptional curves) . E_j.
fn transverse_divisor_degree(g: &FoliatedDualGraph, j: usize) -> i64 {
    let vj = &g.vertices[j];
    let mut acc = 0i64;
    if !vj.role.is_invariant() {
        acc += vj.self_int;
    }
    for (k, vk) in g.vertices.iter().enumerate() {
        if k != j && !vk.role.is_invariant() {
            acc += g.pair_mult(&vj.id, &vk.id) as i64;
        }
    }
    acc
}

/// Solves the numerical pullback system for the log discrepancies, keyed by
/// curve id. This is the raw solve shared by the report and the blowup oracle.
pub fn solve_log_discrepancies(
    g: &FoliatedDualGraph,
) -> Result<BTreeMap<String, Rat>, DiscrepancyError> {
    let m = linalg::intersection_matrix(g);
    let d: Vec<Rat> = (0..g.vertices.len())
        .map(|j| {
            rat(kfol_degree(&g.vertices[j]))
                + boundary_degree(g, j)
                + rat(transverse_divisor_degree(g, j))
        })
        .collect();
    let x = linalg::solve_negative_definite(&m, &d).map_err(|e| match e {
        LinalgError::NotNegativeDefinite => DiscrepancyError::NotNegativeDefinite,
        other => DiscrepancyError::Linalg(other),
    })?;
    Ok(g.vertices
        .iter()
        .zip(x)
        .map(|(v, xi)| (v.id.clone(), xi))
        .collect())
}

fn decide_status(g: &FoliatedDualGraph, log: &BTreeMap<String, Rat>) -> Status {
    let a_of = |v: &CurveVertex| -> Rat { &log[&v.id] - rat(v.role.epsilon()) };
    // Zero-coefficient boundary components are not part of the divisor.
    let active: Vec<_> = g.boundary.iter().filter(|b| b.coeff.is_positive()).collect();
    let invariant_boundary = active.iter().any(|b| b.invariant);
    let noninv_over_one = active.iter().any(|b| !b.invariant && b.coeff > Rat::one());
    let noninv_at_one = active.iter().any(|b| !b.invariant && b.coeff >= Rat::one());

    let all_log_nonneg = log.values().all(|x| !x.is_negative());
    let all_log_pos = log.values().all(|x| x.is_positive());
    let all_a_nonneg = g.vertices.iter().all(|v| !a_of(v).is_negative());
    let all_a_pos = g.vertices.iter().all(|v| a_of(v).is_positive());

    if all_a_pos && active.is_empty() {
        Status::Terminal
    } else if all_a_nonneg && active.is_empty() {
        Status::Canonical
    } else if all_log_pos && !invariant_boundary && !noninv_at_one {
        Status::LogTerminal
    } else if all_log_nonneg && !invariant_boundary && !noninv_over_one {
        Status::LogCanonical
    } else {
        Status::NotLC
    }
}

/// Full discrepancy report for a germ graph.
pub fn discrepancies(g: &FoliatedDualGraph) -> Result<DiscrepancyReport, DiscrepancyError> {
    let log = solve_log_discrepancies(g)?;
    let a: BTreeMap<String, Rat> = g
        .vertices
        .iter()
        .map(|v| (v.id.clone(), &log[&v.id] - rat(v.role.epsilon())))
        .collect();
    let status = decide_status(g, &log);

    let nonzero: Vec<&Rat> = log.values().filter(|x| !x.is_zero()).collect();
    let pld_by_convention = nonzero.is_empty();
    let pld = nonzero.into_iter().min().cloned().unwrap_or_else(Rat::zero);
    let unfiltered_min = log.values().min().cloned().unwrap_or_else(Rat::zero);

    let mut report = DiscrepancyReport {
        a,
        log_disc: log,
        status,
        pld,
        pld_by_convention,
        unfiltered_min,
        good_lc: GoodLc::NotApplicable,
    };
    if status.at_least_log_canonical() {
        report.good_lc = if good_lc(g, &report) {
            GoodLc::Yes
        } else {
            GoodLc::No
        };
    }
    Ok(report)
}

/// A log canonical germ is good when its graph is one of the five canonical
/// types, or a transverse-curve type whose invariant curves all have Z = 1
/// and whose non-invariant curve E satisfies
/// -E^2 >= max(2 p_a(E) - 1 + deg E, 2 - 2 p_a(E)).
pub fn good_lc(g: &FoliatedDualGraph, report: &DiscrepancyReport) -> bool {
    if !report.status.at_least_log_canonical() {
        return false;
    }
    let Ok(c) = classify(g) else {
        return false;
    };
    match c.type_tag {
        TypeTag::FChain
        | TypeTag::BadTailTriple
        | TypeTag::Minus2Chain
        | TypeTag::Dihedral
        | TypeTag::EllipticGorensteinLeaf => true,
        TypeTag::ChainOneTransverse | TypeTag::StarTransverseCenter => {
            let invariant_ok = g.vertices.iter().all(|v| match &v.role {
                CurveRole::Invariant { z_index } => *z_index == 1 && v.genus == 0,
                CurveRole::Transverse { .. } => true,
            });
            let transverse_ok = g.vertices.iter().all(|v| match &v.role {
                CurveRole::Invariant { .. } => true,
                CurveRole::Transverse { .. } => {
                    let deg = g.degree(&v.id).unwrap_or(0) as i64;
                    let pa = v.genus as i64;
                    let bound = (2 * pa - 1 + deg).max(2 - 2 * pa);
                    -v.self_int >= bound
                }
            });
            invariant_ok && transverse_ok
        }
        TypeTag::NotClassified => false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapVector {
    pub b: BTreeMap<String, Rat>,
}

/// Coefficients of the relative expansion of K_Fol - K_Y over the
/// exceptional curves.
pub fn variety_gap(g: &FoliatedDualGraph) -> Result<GapVector, DiscrepancyError> {
    let m = linalg::intersection_matrix(g);
    let d: Vec<Rat> = g
        .vertices
        .iter()
        .map(|v| rat(kfol_degree(v) - kvar_degree(v)))
        .collect();
    let x = linalg::solve_negative_definite(&m, &d).map_err(|e| match e {
        LinalgError::NotNegativeDefinite => DiscrepancyError::NotNegativeDefinite,
        other => DiscrepancyError::Linalg(other),
    })?;
    Ok(GapVector {
        b: g.vertices
            .iter()
            .zip(x)
            .map(|(v, xi)| (v.id.clone(), xi))
            .collect(),
    })
}

/// Minimal log discrepancy computed as a rational value or minus infinity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum MldValue {
    NegInfinity,
    Value(Rat),
}

impl fmt::Display for MldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MldValue::NegInfinity => f.write_str("-inf"),
            MldValue::Value(v) => f.write_str(&crate::rat::fmt_rat(v)),
        }
    }
}

/// Whether a non-invariant curve has only smooth foliation points, read off
/// from the singularity flags of its incident edges and boundary crossings.
fn exceptional_in_smooth_set(g: &FoliatedDualGraph, id: &str) -> bool {
    let v = g.vertex(id).expect("known curve");
    if v.role.is_invariant() {
        return false;
    }
    let edges_smooth = g
        .edges
        .iter()
        .filter(|e| e.touches(id))
        .all(|e| !e.is_foliation_sing);
    let meets_smooth = g
        .boundary
        .iter()
        .all(|b| b.meets.get(id).map(|m| m.mult == 0 || !m.sing).unwrap_or(true));
    edges_smooth && meets_smooth
}

fn boundary_in_smooth_set(b: &crate::graph::BoundaryComponent) -> bool {
    !b.invariant && b.meets.values().all(|m| m.mult == 0 || !m.sing)
}

/// Closed-form mld on a log resolution: the minimum over the exceptional
/// terms, the strict-transform terms, and the constant 1, with any negative
/// term collapsing the answer to minus infinity.
///
/// The pairwise-disjointness of non-invariant components is machine-checked;
/// the separatrix-degree hypothesis is a declared property of the input.
pub fn mld_from_log_resolution(g: &FoliatedDualGraph) -> Result<MldValue, DiscrepancyError> {
    // Non-invariant components must be pairwise disjoint.
    for e in &g.edges {
        let (Some(a), Some(b)) = (g.vertex(&e.a), g.vertex(&e.b)) else {
            continue;
        };
        if !a.role.is_invariant() && !b.role.is_invariant() && e.mult > 0 {
            return Err(DiscrepancyError::NonInvariantIntersection);
        }
    }
    for b in &g.boundary {
        if b.invariant {
            continue;
        }
        for (curve, m) in &b.meets {
            if m.mult > 0 {
                if let Some(v) = g.vertex(curve) {
                    if !v.role.is_invariant() {
                        return Err(DiscrepancyError::NonInvariantIntersection);
                    }
                }
            }
        }
    }

    let report = discrepancies(g)?;
    let mut terms: Vec<Rat> = vec![Rat::one()];
    for v in &g.vertices {
        let a = report.a[&v.id].clone();
        if exceptional_in_smooth_set(g, &v.id) {
            terms.push(Rat::one() + a);
        } else {
            terms.push(a);
        }
    }
    for b in &g.boundary {
        if boundary_in_smooth_set(b) {
            terms.push(Rat::one() - &b.coeff);
        } else {
            terms.push(-&b.coeff);
        }
    }
    let min = terms.into_iter().min().expect("nonempty");
    if min.is_negative() {
        Ok(MldValue::NegInfinity)
    } else {
        Ok(MldValue::Value(min))
    }
}
