//! Weighted dual graphs of exceptional curve configurations, enriched with
//! per-curve foliation data (invariance, Z-index or tangency order, genus)
//! and boundary components with exact rational coefficients.
//!
//! All values are immutable after construction and every operation here is a
//! pure function, so graphs can be shared freely across threads.

use crate::rat::{fmt_rat, Rat};
use num::{One, Signed};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Whether a curve is tangent to the foliation, and the index it carries.
///
/// An invariant curve houses the Z-index (sum of local vanishing orders of
/// the foliation along the curve); a non-invariant one houses the total
/// tangency order. Never both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveRole {
    Invariant { z_index: u32 },
    Transverse { tang: u32 },
}

impl CurveRole {
    pub fn is_invariant(&self) -> bool {
        matches!(self, CurveRole::Invariant { .. })
    }

    /// epsilon(E): 0 for invariant curves, 1 otherwise.
    pub fn epsilon(&self) -> i64 {
        match self {
            CurveRole::Invariant { .. } => 0,
            CurveRole::Transverse { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveVertex {
    pub id: String,
    /// Self-intersection E^2, always negative for exceptional curves.
    pub self_int: i64,
    /// Arithmetic genus p_a(E).
    pub genus: u32,
    pub role: CurveRole,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub a: String,
    pub b: String,
    /// Total intersection number E_a . E_b contributed by this edge.
    pub mult: u32,
    /// Whether the intersection point is a foliation singularity. Two
    /// invariant curves can only cross at a singularity, so for such pairs
    /// this must be true; for mixed pairs it defaults to false.
    pub is_foliation_sing: bool,
}

impl Edge {
    pub fn touches(&self, id: &str) -> bool {
        self.a == id || self.b == id
    }

    pub fn other(&self, id: &str) -> Option<&str> {
        if self.a == id {
            Some(&self.b)
        } else if self.b == id {
            Some(&self.a)
        } else {
            None
        }
    }
}

/// One crossing pattern of a boundary component with an exceptional curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Meet {
    pub mult: u32,
    /// Whether the crossing points are foliation singularities.
    pub sing: bool,
}

/// A boundary branch through the germ: the proper transform of a divisor
/// component, carrying its coefficient and its intersection pattern with the
/// exceptional curves.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryComponent {
    pub id: String,
    /// Coefficient b_i, an exact rational in [0, 1].
    pub coeff: Rat,
    /// curve id -> crossing data (t_{i,j} = B_i . E_j).
    pub meets: BTreeMap<String, Meet>,
    pub invariant: bool,
}

impl BoundaryComponent {
    pub fn meets_mult(&self, curve: &str) -> u32 {
        self.meets.get(curve).map(|m| m.mult).unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FoliatedDualGraph {
    pub vertices: Vec<CurveVertex>,
    pub edges: Vec<Edge>,
    pub boundary: Vec<BoundaryComponent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Chain,
    Cycle,
    StarShaped,
    TreeOther,
    NonTree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeResult {
    Chain,
    Cycle,
    StarShaped { center: String },
    TreeOther,
    NonTree,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateId(String),
    NonNegativeSelfInt(String),
    UnknownCurve(String),
    SelfLoop(String),
    ZeroMultEdge(String, String),
    SeparatrixCrossing(String, String),
    BoundaryCoeffOutOfRange(String),
    BoundaryMeetsNothing(String),
    Disconnected,
    NotNegativeDefinite,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId(id) => write!(f, "duplicate id `{id}`"),
            Violation::NonNegativeSelfInt(id) => {
                write!(f, "curve `{id}` must have self-intersection <= -1")
            }
            Violation::UnknownCurve(id) => write!(f, "reference to unknown curve `{id}`"),
            Violation::SelfLoop(id) => write!(f, "self-loop on `{id}`"),
            Violation::ZeroMultEdge(a, b) => write!(f, "edge `{a}`-`{b}` has multiplicity 0"),
            Violation::SeparatrixCrossing(a, b) => write!(
                f,
                "edge `{a}`-`{b}` joins two invariant curves but is not marked as a singularity"
            ),
            Violation::BoundaryCoeffOutOfRange(id) => {
                write!(f, "boundary `{id}` coefficient outside [0, 1]")
            }
            Violation::BoundaryMeetsNothing(id) => {
                write!(f, "boundary `{id}` meets no curve with positive multiplicity")
            }
            Violation::Disconnected => write!(f, "graph is not connected"),
            Violation::NotNegativeDefinite => {
                write!(f, "intersection matrix is not negative definite")
            }
        }
    }
}

impl FoliatedDualGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&self, id: &str) -> Option<&CurveVertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.vertices.iter().map(|v| v.id.as_str()).collect()
    }

    /// Degree of a vertex: total edge multiplicity incident to it.
    pub fn degree(&self, id: &str) -> Result<u32, Violation> {
        if self.vertex(id).is_none() {
            return Err(Violation::UnknownCurve(id.to_string()));
        }
        Ok(self
            .edges
            .iter()
            .filter(|e| e.touches(id))
            .map(|e| e.mult)
            .sum())
    }

    /// Neighbours of `id`, one entry per distinct adjacent vertex.
    pub fn neighbors(&self, id: &str) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in &self.edges {
            if let Some(o) = e.other(id) {
                if !out.contains(&o) {
                    out.push(o);
                }
            }
        }
        out
    }

    pub fn edge_between(&self, a: &str, b: &str) -> Option<&Edge> {
        self.edges
            .iter()
            .find(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
    }

    /// Total intersection number between two distinct curves.
    pub fn pair_mult(&self, a: &str, b: &str) -> u32 {
        self.edges
            .iter()
            .filter(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
            .map(|e| e.mult)
            .sum()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.vertices[0].id.as_str()];
        seen.insert(self.vertices[0].id.as_str());
        while let Some(v) = stack.pop() {
            for n in self.neighbors(v) {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Structural invariants plus negative definiteness of the intersection
    /// matrix. Violations are data, not failures: an empty list means the
    /// graph is a valid germ configuration.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut ids = BTreeSet::new();
        for v in &self.vertices {
            if !ids.insert(v.id.as_str()) {
                out.push(Violation::DuplicateId(v.id.clone()));
            }
            if v.self_int >= 0 {
                out.push(Violation::NonNegativeSelfInt(v.id.clone()));
            }
        }
        for b in &self.boundary {
            if !ids.insert(b.id.as_str()) {
                out.push(Violation::DuplicateId(b.id.clone()));
            }
        }
        for e in &self.edges {
            if e.a == e.b {
                out.push(Violation::SelfLoop(e.a.clone()));
                continue;
            }
            for end in [&e.a, &e.b] {
                if self.vertex(end).is_none() {
                    out.push(Violation::UnknownCurve(end.clone()));
                }
            }
            if e.mult == 0 {
                out.push(Violation::ZeroMultEdge(e.a.clone(), e.b.clone()));
            }
            if let (Some(a), Some(b)) = (self.vertex(&e.a), self.vertex(&e.b)) {
                if a.role.is_invariant() && b.role.is_invariant() && !e.is_foliation_sing {
                    out.push(Violation::SeparatrixCrossing(e.a.clone(), e.b.clone()));
                }
            }
        }
        for b in &self.boundary {
            if b.coeff.is_negative() || b.coeff > Rat::one() {
                out.push(Violation::BoundaryCoeffOutOfRange(b.id.clone()));
            }
            if b.meets.values().all(|m| m.mult == 0) {
                out.push(Violation::BoundaryMeetsNothing(b.id.clone()));
            }
            for curve in b.meets.keys() {
                if self.vertex(curve).is_none() {
                    out.push(Violation::UnknownCurve(curve.clone()));
                }
            }
        }
        if !self.is_connected() {
            out.push(Violation::Disconnected);
        }
        if out.is_empty() && !self.vertices.is_empty() {
            let m = crate::linalg::intersection_matrix(self);
            if !crate::linalg::is_negative_definite(&m) {
                out.push(Violation::NotNegativeDefinite);
            }
        }
        out
    }

    /// Coarse shape of the graph. Degrees count edge multiplicities, so a
    /// double edge between two vertices is a cycle, not a chain.
    pub fn shape(&self) -> ShapeResult {
        if !self.is_connected() {
            return ShapeResult::NonTree;
        }
        let n = self.vertices.len();
        if n == 0 {
            return ShapeResult::Chain;
        }
        let total_mult: u32 = self.edges.iter().map(|e| e.mult).sum();
        let is_tree = self.edges.iter().all(|e| e.mult == 1)
            && total_mult as usize == n - 1
            && self.edges.iter().all(|e| e.a != e.b);
        if is_tree {
            let forks: Vec<&CurveVertex> = self
                .vertices
                .iter()
                .filter(|v| self.degree(&v.id).unwrap_or(0) >= 3)
                .collect();
            return match forks.len() {
                0 => ShapeResult::Chain,
                1 => ShapeResult::StarShaped {
                    center: forks[0].id.clone(),
                },
                _ => ShapeResult::TreeOther,
            };
        }
        // A connected graph where every vertex has degree exactly two and the
        // edge count matches the vertex count is a single cycle.
        let all_deg_two = self
            .vertices
            .iter()
            .all(|v| self.degree(&v.id).unwrap_or(0) == 2);
        if n >= 2 && all_deg_two && total_mult as usize == n {
            return ShapeResult::Cycle;
        }
        ShapeResult::NonTree
    }

    /// Vertex order along a chain-shaped graph, leaf to leaf.
    pub fn chain_order(&self) -> Option<Vec<String>> {
        match self.shape() {
            ShapeResult::Chain => {}
            _ => return None,
        }
        if self.vertices.len() == 1 {
            return Some(vec![self.vertices[0].id.clone()]);
        }
        let start = self
            .vertices
            .iter()
            .find(|v| self.degree(&v.id).unwrap_or(0) == 1)?;
        let mut order = vec![start.id.clone()];
        let mut prev: Option<String> = None;
        loop {
            let cur = order.last().unwrap().clone();
            let next: Vec<&str> = self
                .neighbors(&cur)
                .into_iter()
                .filter(|n| Some(*n) != prev.as_deref())
                .collect();
            match next.as_slice() {
                [] => break,
                [n] => {
                    prev = Some(cur);
                    order.push(n.to_string());
                }
                _ => return None,
            }
        }
        if order.len() == self.vertices.len() {
            Some(order)
        } else {
            None
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            let role = match &v.role {
                CurveRole::Invariant { z_index } => format!("invariant Z={z_index}"),
                CurveRole::Transverse { tang } => format!("transverse tang={tang}"),
            };
            s.push_str(&format!(
                "curve {} self={} genus={} {}\n",
                v.id, v.self_int, v.genus, role
            ));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "edge {} {} mult={} sing={}\n",
                e.a, e.b, e.mult, e.is_foliation_sing
            ));
        }
        for b in &self.boundary {
            s.push_str(&format!(
                "boundary {} coeff={}{}\n",
                b.id,
                fmt_rat(&b.coeff),
                if b.invariant { " invariant" } else { "" }
            ));
            for (c, m) in &b.meets {
                s.push_str(&format!("meets {} {} mult={} sing={}\n", b.id, c, m.mult, m.sing));
            }
        }
        s
    }
}

/// Convenience builder used across tests and enumeration drivers.
pub struct GraphBuilder {
    g: FoliatedDualGraph,
}

impl GraphBuilder {
    pub fn new() -> Self {
        GraphBuilder {
            g: FoliatedDualGraph::new(),
        }
    }

    pub fn invariant(mut self, id: &str, self_int: i64, genus: u32, z: u32) -> Self {
        self.g.vertices.push(CurveVertex {
            id: id.to_string(),
            self_int,
            genus,
            role: CurveRole::Invariant { z_index: z },
        });
        self
    }

    pub fn transverse(mut self, id: &str, self_int: i64, genus: u32, tang: u32) -> Self {
        self.g.vertices.push(CurveVertex {
            id: id.to_string(),
            self_int,
            genus,
            role: CurveRole::Transverse { tang },
        });
        self
    }

    /// Edge with the default singularity flag: true when both ends invariant.
    pub fn edge(mut self, a: &str, b: &str) -> Self {
        let sing = match (self.g.vertex(a), self.g.vertex(b)) {
            (Some(va), Some(vb)) => va.role.is_invariant() && vb.role.is_invariant(),
            _ => false,
        };
        self.g.edges.push(Edge {
            a: a.to_string(),
            b: b.to_string(),
            mult: 1,
            is_foliation_sing: sing,
        });
        self
    }

    pub fn edge_full(mut self, a: &str, b: &str, mult: u32, sing: bool) -> Self {
        self.g.edges.push(Edge {
            a: a.to_string(),
            b: b.to_string(),
            mult,
            is_foliation_sing: sing,
        });
        self
    }

    pub fn boundary(mut self, id: &str, coeff: Rat, invariant: bool, meets: &[(&str, u32)]) -> Self {
        let meets = meets
            .iter()
            .map(|(c, m)| {
                let sing = self
                    .g
                    .vertex(c)
                    .map(|v| v.role.is_invariant() && invariant)
                    .unwrap_or(false);
                (c.to_string(), Meet { mult: *m, sing })
            })
            .collect();
        self.g.boundary.push(BoundaryComponent {
            id: id.to_string(),
            coeff,
            meets,
            invariant,
        });
        self
    }

    pub fn build(self) -> FoliatedDualGraph {
        self.g
    }
}

impl Default for GraphBuilder {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{frac, rat};

    fn single(z: u32) -> FoliatedDualGraph {
        GraphBuilder::new().invariant("E1", -2, 0, z).build()
    }

    #[test]
    fn validate_accepts_single_minus_two() {
        assert!(single(1).validate().is_empty());
    }

    #[test]
    fn validate_flags_non_negative_definite_pair() {
        let g = GraphBuilder::new()
            .invariant("E1", -1, 0, 1)
            .invariant("E2", -1, 0, 1)
            .edge("E1", "E2")
            .build();
        assert_eq!(g.validate(), vec![Violation::NotNegativeDefinite]);
    }

    #[test]
    fn validate_flags_separatrix_crossing() {
        let g = GraphBuilder::new()
            .invariant("E1", -2, 0, 1)
            .invariant("E2", -2, 0, 1)
            .edge_full("E1", "E2", 1, false)
            .build();
        assert!(g
            .validate()
            .contains(&Violation::SeparatrixCrossing("E1".into(), "E2".into())));
    }

    #[test]
    fn validate_flags_boundary_coeff_and_dangling() {
        let g = GraphBuilder::new()
            .invariant("E1", -2, 0, 1)
            .boundary("B1", frac(3, 2), false, &[("E1", 1)])
            .build();
        assert!(g
            .validate()
            .contains(&Violation::BoundaryCoeffOutOfRange("B1".into())));
        let g2 = GraphBuilder::new()
            .invariant("E1", -2, 0, 1)
            .boundary("B1", rat(1), false, &[])
            .build();
        assert!(g2
            .validate()
            .contains(&Violation::BoundaryMeetsNothing("B1".into())));
    }

    #[test]
    fn shape_detects_chain_cycle_star() {
        let chain = GraphBuilder::new()
            .invariant("A", -2, 0, 2)
            .invariant("B", -2, 0, 2)
            .invariant("C", -2, 0, 2)
            .edge("A", "B")
            .edge("B", "C")
            .build();
        assert_eq!(chain.shape(), ShapeResult::Chain);
        assert_eq!(
            chain.chain_order().unwrap(),
            vec!["A".to_string(), "B".into(), "C".into()]
        );

        let cycle = GraphBuilder::new()
            .invariant("A", -2, 0, 2)
            .invariant("B", -2, 0, 2)
            .invariant("C", -3, 0, 2)
            .edge("A", "B")
            .edge("B", "C")
            .edge("C", "A")
            .build();
        assert_eq!(cycle.shape(), ShapeResult::Cycle);

        let star = GraphBuilder::new()
            .invariant("O", -2, 0, 3)
            .invariant("L1", -2, 0, 1)
            .invariant("L2", -2, 0, 1)
            .invariant("L3", -2, 0, 1)
            .edge("O", "L1")
            .edge("O", "L2")
            .edge("O", "L3")
            .build();
        assert_eq!(
            star.shape(),
            ShapeResult::StarShaped {
                center: "O".to_string()
            }
        );
    }

    #[test]
    fn double_edge_counts_as_cycle() {
        let g = GraphBuilder::new()
            .invariant("A", -2, 0, 2)
            .invariant("B", -3, 0, 2)
            .edge_full("A", "B", 2, true)
            .build();
        assert_eq!(g.shape(), ShapeResult::Cycle);
    }

    #[test]
    fn degree_counts_multiplicity() {
        let g = GraphBuilder::new()
            .invariant("A", -2, 0, 2)
            .invariant("B", -3, 0, 2)
            .edge_full("A", "B", 2, true)
            .build();
        assert_eq!(g.degree("A").unwrap(), 2);
        let lone = single(1);
        assert_eq!(lone.degree("E1").unwrap(), 0);
        assert!(lone.degree("E9").is_err());
    }

    #[test]
    fn degree_sums_to_twice_edge_mult() {
        let g = GraphBuilder::new()
            .invariant("A", -2, 0, 2)
            .invariant("B", -2, 0, 2)
            .invariant("C", -3, 0, 2)
            .edge("A", "B")
            .edge_full("B", "C", 3, true)
            .build();
        let total: u32 = g.ids().iter().map(|v| g.degree(v).unwrap()).sum();
        let edges: u32 = g.edges.iter().map(|e| e.mult).sum();
        assert_eq!(total, 2 * edges);
    }
}
