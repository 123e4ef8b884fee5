//! Blowup engine on germ configurations: applies the three discrepancy
//! update rules (smooth point, corner, reduced singularity on one curve),
//! keeps the graph bookkeeping (self-intersections, Z-indices, edges,
//! boundary crossings) consistent so that a full re-solve reproduces the
//! updated values, and drives a breadth-limited search for the minimal log
//! discrepancy with an honest certification flag.
//!
//! Blowup centers live on invariant curves: a smooth foliation point on one
//! curve, a singular corner of two invariant curves, or a reduced
//! singularity on exactly one curve. Points on non-invariant curves would
//! need tangency bookkeeping that graph data does not carry, and the search
//! never needs them; they are rejected.

use crate::discrepancy::{self, DiscrepancyError, MldValue};
use crate::graph::{CurveRole, Edge, FoliatedDualGraph, GraphBuilder, Meet, ShapeResult};
use crate::rat::{rat, Rat};
use num::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BlowupError {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("point `{0}` must sit on an invariant curve")]
    NotInvariant(String),
    #[error("corner `{0}` does not reference a singular edge between invariant curves")]
    BadCorner(String),
    #[error("branch plan inconsistent with point multiplicities: {0}")]
    BadPlan(String),
    #[error("boundary `{0}` crosses `{1}` fewer times than the point multiplicity")]
    MeetsUnderflow(String, String),
    #[error(transparent)]
    Discrepancy(#[from] DiscrepancyError),
    #[error("search depth must be positive")]
    ZeroDepth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointKind {
    SmoothOnCurve(String),
    Corner(String, String),
    ReducedOnCurve(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedPoint {
    pub id: String,
    pub kind: PointKind,
    /// boundary id -> multiplicity of the branch at this point.
    pub bmult: BTreeMap<String, u32>,
}

impl MarkedPoint {
    pub fn curves(&self) -> Vec<&str> {
        match &self.kind {
            PointKind::SmoothOnCurve(c) | PointKind::ReducedOnCurve(c) => vec![c],
            PointKind::Corner(a, b) => vec![a, b],
        }
    }
}

/// Where a boundary branch goes after the blowup at its point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchTarget {
    /// A fresh smooth point on the new curve (the default).
    FreshSmooth,
    /// The residual reduced singularity on the new curve (reduced case only).
    Residual,
    /// The corner of the new curve with the named old curve.
    CornerWith(String),
    /// The branch separates: still crosses the new curve, but at an
    /// untracked point.
    Separate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchMove {
    pub boundary: String,
    /// Multiplicity of the branch at its new point.
    pub mult: u32,
    pub target: BranchTarget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GermConfig {
    pub graph: FoliatedDualGraph,
    pub points: Vec<MarkedPoint>,
    /// Current discrepancies a(E) per curve (plain convention, not log).
    pub a: BTreeMap<String, Rat>,
}

fn corner_point_id(a: &str, b: &str) -> String {
    if a <= b {
        format!("c:{a}*{b}")
    } else {
        format!("c:{b}*{a}")
    }
}

impl GermConfig {
    /// Builds a configuration from a solvable graph: discrepancies come from
    /// the pullback solve, and every singular corner between invariant
    /// curves becomes an available blowup center.
    pub fn from_graph(graph: FoliatedDualGraph) -> Result<Self, BlowupError> {
        Self::with_points(graph, Vec::new())
    }

    pub fn with_points(
        graph: FoliatedDualGraph,
        declared: Vec<MarkedPoint>,
    ) -> Result<Self, BlowupError> {
        let log = discrepancy::solve_log_discrepancies(&graph)?;
        let a = graph
            .vertices
            .iter()
            .map(|v| (v.id.clone(), &log[&v.id] - rat(v.role.epsilon())))
            .collect();
        let mut cfg = GermConfig {
            graph,
            points: declared,
            a,
        };
        cfg.sync_corner_points();
        cfg.validate_points()?;
        Ok(cfg)
    }

    /// Ensures every singular invariant-invariant edge has a corner point.
    fn sync_corner_points(&mut self) {
        let mut have: BTreeSet<String> = self
            .points
            .iter()
            .filter(|p| matches!(p.kind, PointKind::Corner(_, _)))
            .map(|p| match &p.kind {
                PointKind::Corner(a, b) => corner_point_id(a, b),
                _ => unreachable!(),
            })
            .collect();
        for e in &self.graph.edges {
            if !e.is_foliation_sing || e.mult == 0 {
                continue;
            }
            let inv = |id: &str| {
                self.graph
                    .vertex(id)
                    .map(|v| v.role.is_invariant())
                    .unwrap_or(false)
            };
            if inv(&e.a) && inv(&e.b) {
                let cid = corner_point_id(&e.a, &e.b);
                if have.insert(cid.clone()) {
                    self.points.push(MarkedPoint {
                        id: cid,
                        kind: PointKind::Corner(e.a.clone(), e.b.clone()),
                        bmult: BTreeMap::new(),
                    });
                }
            }
        }
    }

    pub fn point(&self, id: &str) -> Option<&MarkedPoint> {
        self.points.iter().find(|p| p.id == id)
    }

    pub fn validate_points(&self) -> Result<(), BlowupError> {
        for p in &self.points {
            for c in p.curves() {
                let v = self
                    .graph
                    .vertex(c)
                    .ok_or_else(|| BlowupError::UnknownCurve(c.to_string()))?;
                if !v.role.is_invariant() {
                    return Err(BlowupError::NotInvariant(p.id.clone()));
                }
            }
            if let PointKind::Corner(a, b) = &p.kind {
                let ok = self
                    .graph
                    .edge_between(a, b)
                    .map(|e| e.is_foliation_sing && e.mult > 0)
                    .unwrap_or(false);
                if !ok {
                    return Err(BlowupError::BadCorner(p.id.clone()));
                }
            }
        }
        // Declared branch multiplicities cannot exceed the crossing numbers.
        for b in &self.graph.boundary {
            let mut per_curve: BTreeMap<&str, u32> = BTreeMap::new();
            for p in &self.points {
                if let Some(m) = p.bmult.get(&b.id) {
                    for c in p.curves() {
                        *per_curve.entry(c).or_insert(0) += m;
                    }
                }
            }
            for (curve, total) in per_curve {
                if total > b.meets_mult(curve) {
                    return Err(BlowupError::MeetsUnderflow(b.id.clone(), curve.to_string()));
                }
            }
        }
        Ok(())
    }

    /// Log discrepancy of a curve in this configuration.
    pub fn log_disc(&self, id: &str) -> Option<Rat> {
        let v = self.graph.vertex(id)?;
        Some(&self.a[id] + rat(v.role.epsilon()))
    }

    fn fresh_curve_id(&self) -> String {
        let mut k = 1usize;
        loop {
            let id = format!("F{k}");
            if self.graph.vertex(&id).is_none() {
                return id;
            }
            k += 1;
        }
    }

    /// Total weighted boundary mass sitting on marked points; zero means no
    /// blowup formula can ever subtract anything.
    pub fn marked_boundary_mass(&self) -> Rat {
        let mut acc = Rat::zero();
        for p in &self.points {
            for (bid, m) in &p.bmult {
                if let Some(b) = self.graph.boundary.iter().find(|b| b.id == *bid) {
                    acc += &b.coeff * rat(*m as i64);
                }
            }
        }
        acc
    }
}

fn default_plan(p: &MarkedPoint) -> Vec<BranchMove> {
    p.bmult
        .iter()
        .filter(|(_, m)| **m > 0)
        .map(|(b, m)| BranchMove {
            boundary: b.clone(),
            mult: *m,
            target: BranchTarget::FreshSmooth,
        })
        .collect()
}

/// Blows up one marked point. Each curve through the point loses one from
/// its self-intersection; a new invariant (-1)-curve F joins them; the
/// discrepancy of F follows the case formula; Z-indices and boundary
/// crossings move so that a fresh pullback solve reproduces the whole map.
pub fn blowup(
    cfg: &GermConfig,
    point_id: &str,
    plan: Option<Vec<BranchMove>>,
) -> Result<GermConfig, BlowupError> {
    let p = cfg
        .point(point_id)
        .ok_or_else(|| BlowupError::UnknownPoint(point_id.to_string()))?
        .clone();
    for c in p.curves() {
        let v = cfg
            .graph
            .vertex(c)
            .ok_or_else(|| BlowupError::UnknownCurve(c.to_string()))?;
        if !v.role.is_invariant() {
            return Err(BlowupError::NotInvariant(p.id.clone()));
        }
    }
    let plan = plan.unwrap_or_else(|| default_plan(&p));
    for mv in &plan {
        let at_p = p.bmult.get(&mv.boundary).copied().unwrap_or(0);
        if at_p == 0 {
            return Err(BlowupError::BadPlan(format!(
                "boundary `{}` does not pass through `{}`",
                mv.boundary, p.id
            )));
        }
        if mv.mult > at_p {
            return Err(BlowupError::BadPlan(format!(
                "boundary `{}` cannot gain multiplicity at the new point",
                mv.boundary
            )));
        }
        if matches!(mv.target, BranchTarget::Residual)
            && !matches!(p.kind, PointKind::ReducedOnCurve(_))
        {
            return Err(BlowupError::BadPlan(
                "residual target only exists for reduced-singularity blowups".into(),
            ));
        }
        if let BranchTarget::CornerWith(c) = &mv.target {
            if !p.curves().contains(&c.as_str()) {
                return Err(BlowupError::BadPlan(format!(
                    "corner target `{c}` is not a curve through `{}`",
                    p.id
                )));
            }
        }
    }

    // sum_i mult_p(B_i) b_i.
    let mut drop = Rat::zero();
    for (bid, m) in &p.bmult {
        if *m == 0 {
            continue;
        }
        let b = cfg
            .graph
            .boundary
            .iter()
            .find(|b| b.id == *bid)
            .ok_or_else(|| BlowupError::UnknownCurve(bid.clone()))?;
        drop += &b.coeff * rat(*m as i64);
    }

    let fid = cfg.fresh_curve_id();
    let mut graph = cfg.graph.clone();
    let mut a = cfg.a.clone();
    let mut points: Vec<MarkedPoint> = cfg.points.iter().filter(|q| q.id != p.id).cloned().collect();

    let (a_f, z_f) = match &p.kind {
        PointKind::SmoothOnCurve(c) => {
            let v = graph.vertices.iter_mut().find(|v| v.id == *c).unwrap();
            v.self_int -= 1;
            if let CurveRole::Invariant { z_index } = &mut v.role {
                *z_index += 1;
            }
            graph.edges.push(Edge {
                a: fid.clone(),
                b: c.clone(),
                mult: 1,
                is_foliation_sing: true,
            });
            (&a[c] + Rat::one() - &drop, 1)
        }
        PointKind::Corner(c1, c2) => {
            let ok = graph
                .edge_between(c1, c2)
                .map(|e| e.is_foliation_sing && e.mult > 0)
                .unwrap_or(false);
            if !ok {
                return Err(BlowupError::BadCorner(p.id.clone()));
            }
            for c in [c1, c2] {
                let v = graph.vertices.iter_mut().find(|v| v.id == *c).unwrap();
                v.self_int -= 1;
            }
            let e = graph
                .edges
                .iter_mut()
                .find(|e| (e.a == *c1 && e.b == *c2) || (e.a == *c2 && e.b == *c1))
                .unwrap();
            e.mult -= 1;
            if e.mult == 0 {
                graph
                    .edges
                    .retain(|e| !((e.a == *c1 && e.b == *c2) || (e.a == *c2 && e.b == *c1)) || e.mult > 0);
            }
            for c in [c1, c2] {
                graph.edges.push(Edge {
                    a: fid.clone(),
                    b: c.clone(),
                    mult: 1,
                    is_foliation_sing: true,
                });
            }
            (&a[c1] + &a[c2] - &drop, 2)
        }
        PointKind::ReducedOnCurve(c) => {
            let v = graph.vertices.iter_mut().find(|v| v.id == *c).unwrap();
            v.self_int -= 1;
            graph.edges.push(Edge {
                a: fid.clone(),
                b: c.clone(),
                mult: 1,
                is_foliation_sing: true,
            });
            (&a[c] - &drop, 2)
        }
    };

    graph.vertices.push(crate::graph::CurveVertex {
        id: fid.clone(),
        self_int: -1,
        genus: 0,
        role: CurveRole::Invariant { z_index: z_f },
    });
    a.insert(fid.clone(), a_f);

    // The residual reduced singularity on F, present only in the reduced case.
    let residual_id = format!("r:{fid}");
    if matches!(p.kind, PointKind::ReducedOnCurve(_)) {
        points.push(MarkedPoint {
            id: residual_id.clone(),
            kind: PointKind::ReducedOnCurve(fid.clone()),
            bmult: BTreeMap::new(),
        });
    }

    // Boundary crossings: every branch through p now crosses F with its full
    // multiplicity at p and stops crossing the old curves there.
    for (bid, m) in &p.bmult {
        if *m == 0 {
            continue;
        }
        let b = graph.boundary.iter_mut().find(|b| b.id == *bid).unwrap();
        for c in p.curves() {
            let meet = b
                .meets
                .get_mut(c)
                .ok_or_else(|| BlowupError::MeetsUnderflow(bid.clone(), c.to_string()))?;
            if meet.mult < *m {
                return Err(BlowupError::MeetsUnderflow(bid.clone(), c.to_string()));
            }
            meet.mult -= *m;
        }
        b.meets
            .entry(fid.clone())
            .or_insert(Meet {
                mult: 0,
                sing: false,
            })
            .mult += *m;
    }

    // Route the branches to their new marked points.
    let mut fresh_counter = 0usize;
    for mv in &plan {
        if mv.mult == 0 || matches!(mv.target, BranchTarget::Separate) {
            continue;
        }
        match &mv.target {
            BranchTarget::FreshSmooth => {
                fresh_counter += 1;
                let mut bm = BTreeMap::new();
                bm.insert(mv.boundary.clone(), mv.mult);
                points.push(MarkedPoint {
                    id: format!("s:{fid}.{fresh_counter}"),
                    kind: PointKind::SmoothOnCurve(fid.clone()),
                    bmult: bm,
                });
            }
            BranchTarget::Residual => {
                let q = points.iter_mut().find(|q| q.id == residual_id).unwrap();
                *q.bmult.entry(mv.boundary.clone()).or_insert(0) += mv.mult;
            }
            BranchTarget::CornerWith(c) => {
                let cid = corner_point_id(&fid, c);
                if let Some(q) = points.iter_mut().find(|q| q.id == cid) {
                    *q.bmult.entry(mv.boundary.clone()).or_insert(0) += mv.mult;
                } else {
                    let mut bm = BTreeMap::new();
                    bm.insert(mv.boundary.clone(), mv.mult);
                    points.push(MarkedPoint {
                        id: cid,
                        kind: PointKind::Corner(fid.clone(), c.clone()),
                        bmult: bm,
                    });
                }
            }
            BranchTarget::Separate => unreachable!(),
        }
    }

    let mut out = GermConfig { graph, points, a };
    out.sync_corner_points();
    out.validate_points()?;
    Ok(out)
}

/// Oracle for the update formulas: re-solving the enlarged graph must
/// reproduce the tracked discrepancies exactly, curve by curve.
pub fn resolve_check(cfg: &GermConfig) -> bool {
    let Ok(log) = discrepancy::solve_log_discrepancies(&cfg.graph) else {
        return false;
    };
    cfg.graph.vertices.iter().all(|v| {
        let expect = &log[&v.id] - rat(v.role.epsilon());
        cfg.a.get(&v.id) == Some(&expect)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MldResult {
    pub value: MldValue,
    pub certified: bool,
    pub explored: usize,
}

/// Whether the graph is an F-chain with boundary, matching the long-chain
/// shortcut hypotheses for the given epsilon.
fn family_shortcut_applies(cfg: &GermConfig, pld: &Rat, epsilon: &Rat) -> bool {
    if pld < epsilon {
        return false;
    }
    if cfg
        .graph
        .boundary
        .iter()
        .any(|b| b.coeff.is_positive() && &b.coeff < epsilon)
    {
        return false;
    }
    if !matches!(cfg.graph.shape(), ShapeResult::Chain) {
        return false;
    }
    let Some(order) = cfg.graph.chain_order() else {
        return false;
    };
    let ids_fwd: Vec<&str> = order.iter().map(|s| s.as_str()).collect();
    let ids_rev: Vec<&str> = order.iter().rev().map(|s| s.as_str()).collect();
    let is_fchain = crate::classify::is_f_chain(&cfg.graph, &ids_fwd).unwrap_or(false)
        || crate::classify::is_f_chain(&cfg.graph, &ids_rev).unwrap_or(false);
    if !is_fchain {
        return false;
    }
    let n0 = crate::rat::floor_div(&Rat::one(), epsilon);
    let r = rat(order.len() as i64);
    r > Rat::from_integer(n0 * 2) + rat(2)
}

/// Raw breadth-limited search over blowup sequences: returns the smallest
/// nonzero discrepancy encountered among the new curves, whether any
/// negative value appeared, and the number of configurations explored.
pub struct SearchOutcome {
    pub min_nonzero: Option<Rat>,
    pub negative: bool,
    pub explored: usize,
}

pub fn search_min(cfg: &GermConfig, depth: u32, node_cap: usize) -> SearchOutcome {
    let mut out = SearchOutcome {
        min_nonzero: None,
        negative: false,
        explored: 0,
    };
    let mut frontier = vec![cfg.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for c in &frontier {
            let targets: Vec<String> = c.points.iter().map(|p| p.id.clone()).collect();
            for t in targets {
                if out.explored >= node_cap {
                    return out;
                }
                let Ok(b) = blowup(c, &t, None) else { continue };
                out.explored += 1;
                let new_id = b
                    .graph
                    .vertices
                    .last()
                    .expect("blowup adds a curve")
                    .id
                    .clone();
                let val = b.a[&new_id].clone();
                if val.is_negative() {
                    out.negative = true;
                    return out;
                }
                if !val.is_zero() {
                    out.min_nonzero = Some(match out.min_nonzero.take() {
                        Some(m) => m.min(val),
                        None => val,
                    });
                }
                next.push(b);
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    out
}

/// Minimal log discrepancy of a germ configuration.
///
/// Returns minus infinity (certified) when any log discrepancy on the
/// resolution is already negative; the partial log discrepancy (certified)
/// when the long-chain shortcut applies; otherwise the minimum of the
/// partial log discrepancy and the nonzero values found by a depth-limited
/// blowup search, certified only when no positively-weighted boundary mass
/// can enter any future formula.
pub fn mld(cfg: &GermConfig, depth: u32, epsilon: &Rat) -> Result<MldResult, BlowupError> {
    if depth == 0 {
        return Err(BlowupError::ZeroDepth);
    }
    // Negative log discrepancy anywhere on the resolution: minus infinity.
    let mut neg = cfg
        .graph
        .vertices
        .iter()
        .any(|v| cfg.log_disc(&v.id).map(|x| x.is_negative()).unwrap_or(false));
    for b in &cfg.graph.boundary {
        if b.invariant && b.coeff.is_positive() {
            neg = true;
        }
        if !b.invariant && b.coeff > Rat::one() {
            neg = true;
        }
    }
    if neg {
        return Ok(MldResult {
            value: MldValue::NegInfinity,
            certified: true,
            explored: 0,
        });
    }

    let report = discrepancy::discrepancies(&cfg.graph)?;
    let pld = report.pld.clone();

    if family_shortcut_applies(cfg, &pld, epsilon) {
        return Ok(MldResult {
            value: MldValue::Value(pld),
            certified: true,
            explored: 0,
        });
    }

    let outcome = search_min(cfg, depth, 100_000);
    if outcome.negative {
        return Ok(MldResult {
            value: MldValue::NegInfinity,
            certified: true,
            explored: outcome.explored,
        });
    }
    let mut candidates = vec![Rat::one()];
    if let Some(m) = outcome.min_nonzero {
        candidates.push(m);
    }
    let search_floor = candidates.into_iter().min().expect("nonempty");
    let value = pld.clone().min(search_floor);

    // Certification: blowup centers sit on invariant curves only, so the
    // case formulas combine invariant-curve values and +1 terms. With those
    // values nonnegative, every log discrepancy nonnegative, and no boundary
    // mass on marked points, nothing below the reported minimum can appear
    // at any depth.
    let all_nonneg = cfg.graph.vertices.iter().all(|v| {
        if v.role.is_invariant() {
            !cfg.a[&v.id].is_negative()
        } else {
            !cfg.log_disc(&v.id).map(|x| x.is_negative()).unwrap_or(true)
        }
    });
    let certified = all_nonneg && cfg.marked_boundary_mass().is_zero();

    Ok(MldResult {
        value: MldValue::Value(value),
        certified,
        explored: outcome.explored,
    })
}

/// Enumerated boundary-free germs: F-chains realized as (-2)-chains so the
/// values stay at unit fractions, the bad-tail types with varying tail
/// weight, (-2)-curve chains, dihedral graphs, and small cycles. Returns the
/// set of certified minimal log discrepancies.
pub fn mld_zero_boundary_scan(max_chain_len: usize) -> Result<BTreeSet<Rat>, BlowupError> {
    assert!(max_chain_len >= 1);
    let mut graphs: Vec<FoliatedDualGraph> = Vec::new();

    let chain = |weights: &[i64], zs: &[u32]| -> FoliatedDualGraph {
        let mut b = GraphBuilder::new();
        for (i, (w, z)) in weights.iter().zip(zs).enumerate() {
            b = b.invariant(&format!("E{}", i + 1), -w, 0, *z);
        }
        for i in 1..weights.len() {
            b = b.edge(&format!("E{i}"), &format!("E{}", i + 1));
        }
        b.build()
    };

    // F-chains of (-2)-curves, every length.
    for len in 1..=max_chain_len {
        let weights = vec![2i64; len];
        let mut zs = vec![2u32; len];
        zs[0] = 1;
        graphs.push(chain(&weights, &zs));
    }
    // Bad-tail triples with tail weight up to 5.
    for w in 2..=5 {
        graphs.push(chain(&[2, w, 2], &[1, 3, 1]));
    }
    // Chains of (-2)-F-curves (Z = 2 everywhere), uniform and mixed weights.
    for len in 1..=max_chain_len {
        for w in 2..=5i64 {
            graphs.push(chain(&vec![w; len], &vec![2; len]));
        }
        let mixed: Vec<i64> = (0..len).map(|i| if i % 2 == 0 { 3 } else { 2 }).collect();
        graphs.push(chain(&mixed, &vec![2; len]));
    }
    // Dihedral graphs: bad tail with two (-2) leaves and a (-2)-chain.
    for tail_w in 2..=5 {
        for chain_len in 1..=max_chain_len.saturating_sub(3).max(1) {
            let mut b = GraphBuilder::new()
                .invariant("P1", -2, 0, 1)
                .invariant("P2", -2, 0, 1)
                .invariant("T", -tail_w, 0, 3);
            let mut prev = "T".to_string();
            for k in 1..=chain_len {
                let id = format!("M{k}");
                b = b.invariant(&id, -2, 0, 2);
                b = b.edge(&prev, &id);
                prev = id;
            }
            b = b.edge("T", "P1").edge("T", "P2");
            graphs.push(b.build());
        }
    }
    // Cycles: all (-2) with one (-3), plus the nodal one-vertex form.
    for len in 2..=max_chain_len.max(2) {
        let mut b = GraphBuilder::new();
        for i in 1..=len {
            let w = if i == 1 { 3 } else { 2 };
            b = b.invariant(&format!("E{i}"), -w, 0, 2);
        }
        if len == 2 {
            b = b.edge_full("E1", "E2", 2, true);
        } else {
            for i in 1..=len {
                let j = if i == len { 1 } else { i + 1 };
                b = b.edge(&format!("E{i}"), &format!("E{j}"));
            }
        }
        graphs.push(b.build());
    }
    graphs.push(GraphBuilder::new().invariant("E1", -1, 1, 0).build());

    let mut values = BTreeSet::new();
    for g in graphs {
        let m = crate::linalg::intersection_matrix(&g);
        if !crate::linalg::is_negative_definite(&m) {
            continue;
        }
        let cfg = GermConfig::from_graph(g)?;
        let res = mld(&cfg, 3, &crate::rat::frac(1, 4))?;
        assert!(res.certified, "zero-boundary scan must certify every value");
        match res.value {
            MldValue::Value(v) => {
                values.insert(v);
            }
            MldValue::NegInfinity => panic!("boundary-free lc germ cannot be -infinity"),
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::rat::frac;

    fn fchain(weights: &[i64], zs: &[u32]) -> FoliatedDualGraph {
        let mut b = GraphBuilder::new();
        for (i, (w, z)) in weights.iter().zip(zs).enumerate() {
            b = b.invariant(&format!("E{}", i + 1), -w, 0, *z);
        }
        for i in 1..weights.len() {
            b = b.edge(&format!("E{i}"), &format!("E{}", i + 1));
        }
        b.build()
    }

    #[test]
    fn corner_blowup_matches_formula_and_resolve() {
        // Chain (2,2) with Z = (2,1): discrepancies (1/3, 2/3).
        let g = fchain(&[2, 2], &[2, 1]);
        let cfg = GermConfig::from_graph(g).unwrap();
        assert_eq!(cfg.a["E1"], frac(1, 3));
        assert_eq!(cfg.a["E2"], frac(2, 3));
        let corner = cfg
            .points
            .iter()
            .find(|p| matches!(p.kind, PointKind::Corner(_, _)))
            .unwrap()
            .id
            .clone();
        let after = blowup(&cfg, &corner, None).unwrap();
        assert_eq!(after.a["F1"], rat(1));
        assert!(resolve_check(&after));
        // Graph bookkeeping: both curves dropped by one, F1 added at -1.
        assert_eq!(after.graph.vertex("E1").unwrap().self_int, -3);
        assert_eq!(after.graph.vertex("F1").unwrap().self_int, -1);
        assert!(after.graph.edge_between("E1", "E2").is_none());
    }

    #[test]
    fn smooth_blowup_with_branch() {
        // Chain (2,2), Z=(1,2), boundary 1/2 crossing E2 at a smooth point:
        // a = (1/2, 0); the new curve gets 0 + 1 - 1/2 = 1/2.
        let g = GraphBuilder::new()
            .invariant("E1", -2, 0, 1)
            .invariant("E2", -2, 0, 2)
            .edge("E1", "E2")
            .boundary("B1", frac(1, 2), false, &[("E2", 1)])
            .build();
        let mut bm = BTreeMap::new();
        bm.insert("B1".to_string(), 1u32);
        let pt = MarkedPoint {
            id: "p".into(),
            kind: PointKind::SmoothOnCurve("E2".into()),
            bmult: bm,
        };
        let cfg = GermConfig::with_points(g, vec![pt]).unwrap();
        assert_eq!(cfg.a["E2"], rat(0));
        let after = blowup(&cfg, "p", None).unwrap();
        assert_eq!(after.a["F1"], frac(1, 2));
        assert!(resolve_check(&after));
        // Z-bookkeeping: E2 gained a singularity, F1 is a (-1)-curve with Z=1.
        let e2 = after.graph.vertex("E2").unwrap();
        assert_eq!(e2.role, CurveRole::Invariant { z_index: 3 });
        // The branch now crosses F1 instead of E2.
        let b = &after.graph.boundary[0];
        assert_eq!(b.meets_mult("E2"), 0);
        assert_eq!(b.meets_mult("F1"), 1);
    }

    #[test]
    fn corner_blowup_with_branch_through_corner() {
        // Hand-checked: chain (2,2) Z=(2,1), boundary 1/2 through the corner.
        let g = GraphBuilder::new()
            .invariant("E1", -2, 0, 2)
            .invariant("E2", -2, 0, 1)
            .edge("E1", "E2")
            .boundary("B1", frac(1, 2), false, &[("E1", 1), ("E2", 1)])
            .build();
        let mut bm = BTreeMap::new();
        bm.insert("B1".to_string(), 1u32);
        let pt = MarkedPoint {
            id: "c".into(),
            kind: PointKind::Corner("E1".into(), "E2".into()),
            bmult: bm,
        };
        let cfg = GermConfig::with_points(g, vec![pt]).unwrap();
        assert_eq!(cfg.a["E1"], frac(-1, 6));
        assert_eq!(cfg.a["E2"], frac(1, 6));
        let after = blowup(&cfg, "c", None).unwrap();
        assert_eq!(after.a["F1"], frac(-1, 2));
        assert!(resolve_check(&after));
    }

    #[test]
    fn reduced_blowup_keeps_value() {
        let g = fchain(&[2], &[1]);
        let pt = MarkedPoint {
            id: "q".into(),
            kind: PointKind::ReducedOnCurve("E1".into()),
            bmult: BTreeMap::new(),
        };
        let cfg = GermConfig::with_points(g, vec![pt]).unwrap();
        assert_eq!(cfg.a["E1"], frac(1, 2));
        let after = blowup(&cfg, "q", None).unwrap();
        assert_eq!(after.a["F1"], frac(1, 2));
        assert!(resolve_check(&after));
        // The residual singularity moved onto F1.
        assert!(after
            .points
            .iter()
            .any(|p| p.kind == PointKind::ReducedOnCurve("F1".into())));
    }

    #[test]
    fn resolve_check_catches_corruption() {
        let g = fchain(&[2], &[1]);
        let cfg = GermConfig::from_graph(g).unwrap();
        assert!(resolve_check(&cfg));
        let mut bad = cfg;
        bad.a.insert("E1".into(), rat(7));
        assert!(!resolve_check(&bad));
    }

    #[test]
    fn mld_examples() {
        let cfg = GermConfig::from_graph(fchain(&[2], &[1])).unwrap();
        let r = mld(&cfg, 2, &frac(1, 4)).unwrap();
        assert_eq!(r.value, MldValue::Value(frac(1, 2)));
        assert!(r.certified);

        let cfg2 = GermConfig::from_graph(fchain(&[2, 2], &[1, 2])).unwrap();
        let r2 = mld(&cfg2, 3, &frac(1, 4)).unwrap();
        assert_eq!(r2.value, MldValue::Value(frac(1, 3)));
        assert!(r2.certified);

        let g3 = GraphBuilder::new()
            .invariant("E1", -2, 0, 1)
            .boundary("B1", rat(1), true, &[("E1", 1)])
            .build();
        let cfg3 = GermConfig::with_points(g3, vec![]).unwrap();
        let r3 = mld(&cfg3, 2, &frac(1, 4)).unwrap();
        assert_eq!(r3.value, MldValue::NegInfinity);
        assert!(r3.certified);
    }

    #[test]
    fn mld_zero_convention_for_vanishing_germs() {
        let cfg = GermConfig::from_graph(fchain(&[2], &[2])).unwrap();
        let r = mld(&cfg, 2, &frac(1, 4)).unwrap();
        assert_eq!(r.value, MldValue::Value(rat(0)));
        assert!(r.certified);
    }

    #[test]
    fn transverse_curve_does_not_break_certification() {
        // Boundary-free chain with a transverse middle: the search stays on
        // the invariant side, so the value is certified even though the
        // transverse curve has plain discrepancy -1.
        let g = GraphBuilder::new()
            .invariant("E1", -2, 0, 1)
            .transverse("T", -2, 0, 0)
            .invariant("E2", -2, 0, 1)
            .edge("E1", "T")
            .edge("T", "E2")
            .build();
        let cfg = GermConfig::from_graph(g).unwrap();
        assert_eq!(cfg.a["T"], rat(-1));
        let r = mld(&cfg, 3, &frac(1, 4)).unwrap();
        assert_eq!(r.value, MldValue::Value(rat(0)));
        assert!(r.certified);
    }

    #[test]
    fn long_chain_mld_equals_pld() {
        // F-chain of eleven (-2)-curves: the search cannot undercut pld and
        // the boundary-free rule certifies the value at depth one.
        let weights = vec![2i64; 11];
        let mut zs = vec![2u32; 11];
        zs[0] = 1;
        let cfg = GermConfig::from_graph(fchain(&weights, &zs)).unwrap();
        let r = mld(&cfg, 1, &frac(1, 4)).unwrap();
        assert_eq!(r.value, MldValue::Value(frac(1, 12)));
        assert!(r.certified);
    }

    #[test]
    fn shortcut_hypotheses_are_checked() {
        // The declared epsilon must really bound pld from below; an eleven
        // curve chain has pld 1/12 < 1/4, so the long-chain shortcut is
        // refused and the search route is taken instead.
        let weights = vec![2i64; 11];
        let mut zs = vec![2u32; 11];
        zs[0] = 1;
        let cfg = GermConfig::from_graph(fchain(&weights, &zs)).unwrap();
        assert!(!family_shortcut_applies(&cfg, &frac(1, 12), &frac(1, 4)));
        // With a truthful epsilon the chain is too short by the r-bound.
        assert!(!family_shortcut_applies(&cfg, &frac(1, 12), &frac(1, 12)));
    }

    #[test]
    fn corner_value_dominates_nonnegative_neighbors() {
        // The pruning monotonicity: with no boundary, a corner blowup value
        // is at least the larger neighbor value when both are nonnegative.
        for (weights, zs) in [
            (vec![2i64, 2], vec![2u32, 1]),
            (vec![3, 2, 3], vec![1, 2, 2]),
            (vec![2, 2, 2], vec![1, 3, 1]),
        ] {
            let cfg = GermConfig::from_graph(fchain(&weights, &zs)).unwrap();
            let corners: Vec<String> = cfg
                .points
                .iter()
                .filter(|p| matches!(p.kind, PointKind::Corner(_, _)))
                .map(|p| p.id.clone())
                .collect();
            for c in corners {
                let p = cfg.point(&c).unwrap().clone();
                let PointKind::Corner(a, b) = &p.kind else { unreachable!() };
                let (va, vb) = (cfg.a[a].clone(), cfg.a[b].clone());
                if va.is_negative() || vb.is_negative() {
                    continue;
                }
                let after = blowup(&cfg, &c, None).unwrap();
                let f = after.graph.vertices.last().unwrap().id.clone();
                assert!(after.a[&f] >= va.max(vb));
            }
        }
    }

    #[test]
    fn zero_boundary_scan_small() {
        let vals = mld_zero_boundary_scan(3).unwrap();
        assert!(vals.contains(&rat(0)));
        assert!(vals.contains(&frac(1, 2)));
        assert!(vals.contains(&frac(1, 3)));
        assert!(vals.contains(&frac(1, 4)));
        for v in &vals {
            let ok = v.is_zero() || (v.numer() == &crate::rat::int(1) && !v.is_negative());
            assert!(ok, "unexpected value {v}");
        }
    }
}
