//! Membership tests for the seven exceptional-divisor types of log canonical
//! foliation singularities, plus the auxiliary chain predicates
//! (Hirzebruch-Jung strings, F-chains, bad tails).
//!
//! The classifier checks the types in order and returns the first match;
//! graphs outside the list come back as `NotClassified` rather than a guess.

use crate::discrepancy::{kfol_degree, DiscrepancyReport};
use crate::graph::{CurveRole, FoliatedDualGraph, ShapeResult, Violation};
use crate::rat::fmt_rat;
use num::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("invalid graph: {0:?}")]
    InvalidGraph(Vec<Violation>),
    #[error("unknown curve id `{0}`")]
    UnknownCurve(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeTag {
    FChain,
    BadTailTriple,
    Minus2Chain,
    Dihedral,
    EllipticGorensteinLeaf,
    ChainOneTransverse,
    StarTransverseCenter,
    NotClassified,
}

impl TypeTag {
    /// Short tags used in reports: T1..T7 in the conventional order.
    pub fn as_str(self) -> &'static str {
        match self {
            TypeTag::FChain => "T1_GChain",
            TypeTag::BadTailTriple => "T2_BadTailTriple",
            TypeTag::Minus2Chain => "T3_Minus2Chain",
            TypeTag::Dihedral => "T4_Dihedral",
            TypeTag::EllipticGorensteinLeaf => "T5_EGL",
            TypeTag::ChainOneTransverse => "T6_ChainOneTransverse",
            TypeTag::StarTransverseCenter => "T7_StarTransverseCenter",
            TypeTag::NotClassified => "NotClassified",
        }
    }

    pub fn is_canonical_type(self) -> bool {
        matches!(
            self,
            TypeTag::FChain
                | TypeTag::BadTailTriple
                | TypeTag::Minus2Chain
                | TypeTag::Dihedral
                | TypeTag::EllipticGorensteinLeaf
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    None,
    FChainOrder(Vec<String>),
    BadTail(String),
    ChainOrder(Vec<String>),
    DihedralTail { tail: String, chain: Vec<String> },
    Cycle(Vec<String>),
    NodalCurve(String),
    TransverseCurve(String),
    StarCenter(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationResult {
    pub type_tag: TypeTag,
    pub witness: Witness,
}

fn vertex_z(g: &FoliatedDualGraph, id: &str) -> Option<u32> {
    match &g.vertex(id)?.role {
        CurveRole::Invariant { z_index } => Some(*z_index),
        CurveRole::Transverse { .. } => None,
    }
}

/// Hirzebruch-Jung string in the given order: smooth rational curves with
/// self-intersection at most -2, consecutive intersections one,
/// non-consecutive zero.
pub fn is_hj_string(g: &FoliatedDualGraph, ids: &[&str]) -> Result<bool, ClassifyError> {
    for id in ids {
        if g.vertex(id).is_none() {
            return Err(ClassifyError::UnknownCurve(id.to_string()));
        }
    }
    for (i, id) in ids.iter().enumerate() {
        let v = g.vertex(id).unwrap();
        if v.genus != 0 || v.self_int > -2 {
            return Ok(false);
        }
        for (j, other) in ids.iter().enumerate().skip(i + 1) {
            let want = if j == i + 1 { 1 } else { 0 };
            if g.pair_mult(id, other) != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// F-chain in the given order: an all-invariant Hirzebruch-Jung string with
/// Z = 1 on the first curve and Z = 2 afterwards. (Reducedness of the chain
/// singularities is an input contract, not re-derived from graph data.)
pub fn is_f_chain(g: &FoliatedDualGraph, ids: &[&str]) -> Result<bool, ClassifyError> {
    if !is_hj_string(g, ids)? {
        return Ok(false);
    }
    for (i, id) in ids.iter().enumerate() {
        match vertex_z(g, id) {
            Some(z) if i == 0 && z == 1 => {}
            Some(z) if i > 0 && z == 2 => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// A bad tail: smooth rational invariant curve with Z = 3 and
/// self-intersection at most -2, meeting two distinct invariant curves that
/// are (-1)-curves of the foliation with self-intersection -2.
pub fn is_bad_tail(g: &FoliatedDualGraph, id: &str) -> Result<bool, ClassifyError> {
    let v = g
        .vertex(id)
        .ok_or_else(|| ClassifyError::UnknownCurve(id.to_string()))?;
    if v.genus != 0 || v.self_int > -2 || vertex_z(g, id) != Some(3) {
        return Ok(false);
    }
    let companions = g
        .neighbors(id)
        .into_iter()
        .filter(|n| {
            let nv = g.vertex(n).unwrap();
            nv.genus == 0 && nv.self_int == -2 && vertex_z(g, n) == Some(1)
        })
        .count();
    Ok(companions >= 2)
}

fn all_invariant(g: &FoliatedDualGraph) -> bool {
    g.vertices.iter().all(|v| v.role.is_invariant())
}

fn f_chain_either_way(g: &FoliatedDualGraph, order: &[String]) -> Option<Vec<String>> {
    let fwd: Vec<&str> = order.iter().map(|s| s.as_str()).collect();
    if is_f_chain(g, &fwd).ok()? {
        return Some(order.to_vec());
    }
    let rev: Vec<&str> = order.iter().rev().map(|s| s.as_str()).collect();
    if is_f_chain(g, &rev).ok()? {
        return Some(order.iter().rev().cloned().collect());
    }
    None
}

fn classify_chain(g: &FoliatedDualGraph, order: &[String]) -> ClassificationResult {
    // Type 1: the whole graph is an F-chain.
    if let Some(o) = f_chain_either_way(g, order) {
        return ClassificationResult {
            type_tag: TypeTag::FChain,
            witness: Witness::FChainOrder(o),
        };
    }
    // Type 2: bad-tail triple.
    if order.len() == 3 {
        let ends_ok = [0, 2].iter().all(|&i| {
            let v = g.vertex(&order[i]).unwrap();
            v.genus == 0 && v.self_int == -2 && vertex_z(g, &order[i]) == Some(1)
        });
        if ends_ok && is_bad_tail(g, &order[1]).unwrap_or(false) {
            return ClassificationResult {
                type_tag: TypeTag::BadTailTriple,
                witness: Witness::BadTail(order[1].clone()),
            };
        }
    }
    // Type 3: chain of (-2)-curves of the foliation (invariant, genus 0, Z=2).
    let minus2 = order.iter().all(|id| {
        let v = g.vertex(id).unwrap();
        v.genus == 0 && vertex_z(g, id) == Some(2)
    });
    if minus2 {
        return ClassificationResult {
            type_tag: TypeTag::Minus2Chain,
            witness: Witness::ChainOrder(order.to_vec()),
        };
    }
    // Type 5, nodal form: one genus-1 invariant curve with Z = 0.
    if order.len() == 1 {
        let v = g.vertex(&order[0]).unwrap();
        if v.genus == 1 && vertex_z(g, &order[0]) == Some(0) {
            return ClassificationResult {
                type_tag: TypeTag::EllipticGorensteinLeaf,
                witness: Witness::NodalCurve(order[0].clone()),
            };
        }
    }
    // Type 6: exactly one transverse curve of tangency order zero, flanked by
    // F-chains ordered away from it (possibly empty).
    let transverse: Vec<usize> = order
        .iter()
        .enumerate()
        .filter(|(_, id)| !g.vertex(id).unwrap().role.is_invariant())
        .map(|(i, _)| i)
        .collect();
    if let [pos] = transverse.as_slice() {
        let t = g.vertex(&order[*pos]).unwrap();
        let tang_zero = matches!(t.role, CurveRole::Transverse { tang: 0 });
        if tang_zero {
            let left: Vec<&str> = order[..*pos].iter().rev().map(|s| s.as_str()).collect();
            let right: Vec<&str> = order[*pos + 1..].iter().map(|s| s.as_str()).collect();
            let left_ok = left.is_empty() || is_f_chain(g, &left).unwrap_or(false);
            let right_ok = right.is_empty() || is_f_chain(g, &right).unwrap_or(false);
            if left_ok && right_ok {
                return ClassificationResult {
                    type_tag: TypeTag::ChainOneTransverse,
                    witness: Witness::TransverseCurve(order[*pos].clone()),
                };
            }
        }
    }
    ClassificationResult {
        type_tag: TypeTag::NotClassified,
        witness: Witness::None,
    }
}

/// Branches of a star: for each neighbour of the center, the chain walked
/// outward from that neighbour. Returns None on anything non-chain.
fn star_branches(g: &FoliatedDualGraph, center: &str) -> Option<Vec<Vec<String>>> {
    let mut out = Vec::new();
    for start in g.neighbors(center) {
        let mut branch = vec![start.to_string()];
        let mut prev = center.to_string();
        loop {
            let cur = branch.last().unwrap().clone();
            let next: Vec<&str> = g
                .neighbors(&cur)
                .into_iter()
                .filter(|n| **n != *prev && *n != center)
                .collect();
            match next.as_slice() {
                [] => break,
                [n] => {
                    prev = cur;
                    branch.push(n.to_string());
                }
                _ => return None,
            }
        }
        out.push(branch);
    }
    Some(out)
}

fn classify_star(g: &FoliatedDualGraph, center: &str) -> ClassificationResult {
    let Some(branches) = star_branches(g, center) else {
        return ClassificationResult {
            type_tag: TypeTag::NotClassified,
            witness: Witness::None,
        };
    };
    let cv = g.vertex(center).unwrap();
    if cv.role.is_invariant() {
        // Type 4: bad-tail center, two single-curve branches with Z = 1 and
        // self-intersection -2, one nonempty chain of Z=2 / self -2 curves.
        if branches.len() == 3 && is_bad_tail(g, center).unwrap_or(false) {
            let mut singles = Vec::new();
            let mut chains = Vec::new();
            for b in &branches {
                let first = g.vertex(&b[0]).unwrap();
                if b.len() == 1
                    && first.genus == 0
                    && first.self_int == -2
                    && vertex_z(g, &b[0]) == Some(1)
                {
                    singles.push(b);
                } else {
                    chains.push(b);
                }
            }
            if singles.len() == 2 && chains.len() == 1 {
                let tail = chains[0];
                let tail_ok = !tail.is_empty()
                    && tail.iter().all(|id| {
                        let v = g.vertex(id).unwrap();
                        v.genus == 0 && v.self_int == -2 && vertex_z(g, id) == Some(2)
                    });
                if tail_ok {
                    return ClassificationResult {
                        type_tag: TypeTag::Dihedral,
                        witness: Witness::DihedralTail {
                            tail: center.to_string(),
                            chain: tail.clone(),
                        },
                    };
                }
            }
        }
    } else {
        // Type 7: transverse center of tangency order zero, every branch an
        // F-chain whose first curve meets the center with multiplicity one.
        let tang_zero = matches!(cv.role, CurveRole::Transverse { tang: 0 });
        if tang_zero {
            let all_ok = branches.iter().all(|b| {
                let ids: Vec<&str> = b.iter().map(|s| s.as_str()).collect();
                g.pair_mult(center, &b[0]) == 1 && is_f_chain(g, &ids).unwrap_or(false)
            });
            if all_ok {
                return ClassificationResult {
                    type_tag: TypeTag::StarTransverseCenter,
                    witness: Witness::StarCenter(center.to_string()),
                };
            }
        }
    }
    ClassificationResult {
        type_tag: TypeTag::NotClassified,
        witness: Witness::None,
    }
}

fn classify_cycle(g: &FoliatedDualGraph) -> ClassificationResult {
    // Type 5: every curve invariant with K_Fol-degree zero.
    let egl = all_invariant(g) && g.vertices.iter().all(|v| kfol_degree(v) == 0);
    if egl {
        return ClassificationResult {
            type_tag: TypeTag::EllipticGorensteinLeaf,
            witness: Witness::Cycle(g.vertices.iter().map(|v| v.id.clone()).collect()),
        };
    }
    ClassificationResult {
        type_tag: TypeTag::NotClassified,
        witness: Witness::None,
    }
}

/// Decides membership in the seven types, first match wins. Requires a valid
/// (in particular negative definite) graph.
pub fn classify(g: &FoliatedDualGraph) -> Result<ClassificationResult, ClassifyError> {
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(ClassifyError::InvalidGraph(violations));
    }
    Ok(match g.shape() {
        ShapeResult::Chain => {
            let order = g.chain_order().expect("chain shape has an order");
            classify_chain(g, &order)
        }
        ShapeResult::StarShaped { center } => classify_star(g, &center),
        ShapeResult::Cycle => classify_cycle(g),
        _ => ClassificationResult {
            type_tag: TypeTag::NotClassified,
            witness: Witness::None,
        },
    })
}

/// Cross-checks the classified type against the discrepancy report: type 1
/// must be terminal, types 1-5 canonical, every classified type at least log
/// canonical, and a cycle-type germ is expected to carry vanishing
/// discrepancies (reported as a warning, not an error).
pub fn thm_consistency(
    c: &ClassificationResult,
    report: &DiscrepancyReport,
) -> Vec<String> {
    let mut out = Vec::new();
    if c.type_tag == TypeTag::NotClassified {
        return out;
    }
    if c.type_tag == TypeTag::FChain && report.status != crate::discrepancy::Status::Terminal {
        out.push(format!("type T1 must be terminal, found {}", report.status));
    }
    if c.type_tag.is_canonical_type() && !report.status.at_least_canonical() {
        out.push(format!(
            "type {} must be canonical, found {}",
            c.type_tag.as_str(),
            report.status
        ));
    }
    if !report.status.at_least_log_canonical() {
        out.push(format!(
            "type {} must be log canonical, found {}",
            c.type_tag.as_str(),
            report.status
        ));
    }
    if c.type_tag == TypeTag::EllipticGorensteinLeaf {
        for (id, a) in &report.a {
            if !a.is_zero() {
                out.push(format!(
                    "warning: cycle-type germ with nonzero discrepancy a({id}) = {}",
                    fmt_rat(a)
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::discrepancies;
    use crate::graph::GraphBuilder;

    fn fchain_graph(weights: &[i64], zs: &[u32]) -> FoliatedDualGraph {
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
    fn hj_string_examples() {
        let g = fchain_graph(&[2, 3], &[1, 2]);
        assert!(is_hj_string(&g, &["E1", "E2"]).unwrap());
        let bad = fchain_graph(&[2, 1], &[1, 2]);
        assert!(!is_hj_string(&bad, &["E1", "E2"]).unwrap());
        let cyc = GraphBuilder::new()
            .invariant("A", -2, 0, 2)
            .invariant("B", -2, 0, 2)
            .invariant("C", -3, 0, 2)
            .edge("A", "B")
            .edge("B", "C")
            .edge("C", "A")
            .build();
        assert!(!is_hj_string(&cyc, &["A", "B", "C"]).unwrap());
        assert!(is_hj_string(&g, &["E1", "E9"]).is_err());
    }

    #[test]
    fn f_chain_examples() {
        let single = fchain_graph(&[2], &[1]);
        assert!(is_f_chain(&single, &["E1"]).unwrap());
        let two = fchain_graph(&[2, 2], &[1, 2]);
        assert!(is_f_chain(&two, &["E1", "E2"]).unwrap());
        let wrong = fchain_graph(&[2, 2], &[2, 2]);
        assert!(!is_f_chain(&wrong, &["E1", "E2"]).unwrap());
    }

    #[test]
    fn bad_tail_examples() {
        let g = fchain_graph(&[2, 2, 2], &[1, 3, 1]);
        assert!(is_bad_tail(&g, "E2").unwrap());
        let g2 = fchain_graph(&[2, 2, 2], &[1, 2, 1]);
        assert!(!is_bad_tail(&g2, "E2").unwrap());
        let g3 = fchain_graph(&[2, 2, 3], &[1, 3, 1]);
        assert!(!is_bad_tail(&g3, "E2").unwrap());
    }

    #[test]
    fn classify_t1_t2() {
        let single = fchain_graph(&[2], &[1]);
        assert_eq!(classify(&single).unwrap().type_tag, TypeTag::FChain);

        let triple = fchain_graph(&[2, 2, 2], &[1, 3, 1]);
        let c = classify(&triple).unwrap();
        assert_eq!(c.type_tag, TypeTag::BadTailTriple);
        assert_eq!(c.witness, Witness::BadTail("E2".into()));
    }

    #[test]
    fn classify_t3_t5() {
        let minus2 = fchain_graph(&[2, 3, 2], &[2, 2, 2]);
        assert_eq!(classify(&minus2).unwrap().type_tag, TypeTag::Minus2Chain);

        let cyc = GraphBuilder::new()
            .invariant("A", -2, 0, 2)
            .invariant("B", -2, 0, 2)
            .invariant("C", -3, 0, 2)
            .edge("A", "B")
            .edge("B", "C")
            .edge("C", "A")
            .build();
        assert_eq!(
            classify(&cyc).unwrap().type_tag,
            TypeTag::EllipticGorensteinLeaf
        );

        let nodal = GraphBuilder::new().invariant("E1", -1, 1, 0).build();
        assert_eq!(
            classify(&nodal).unwrap().type_tag,
            TypeTag::EllipticGorensteinLeaf
        );
    }

    #[test]
    fn classify_t4() {
        let g = GraphBuilder::new()
            .invariant("L1", -2, 0, 1)
            .invariant("L2", -2, 0, 1)
            .invariant("T", -2, 0, 3)
            .invariant("M1", -2, 0, 2)
            .invariant("M2", -2, 0, 2)
            .edge("T", "L1")
            .edge("T", "L2")
            .edge("T", "M1")
            .edge("M1", "M2")
            .build();
        let c = classify(&g).unwrap();
        assert_eq!(c.type_tag, TypeTag::Dihedral);
    }

    #[test]
    fn classify_t6_t7() {
        let t6 = GraphBuilder::new()
            .invariant("E1", -2, 0, 1)
            .transverse("E2", -2, 0, 0)
            .invariant("E3", -2, 0, 1)
            .edge("E1", "E2")
            .edge("E2", "E3")
            .build();
        let c = classify(&t6).unwrap();
        assert_eq!(c.type_tag, TypeTag::ChainOneTransverse);
        assert_eq!(c.witness, Witness::TransverseCurve("E2".into()));

        let t7 = GraphBuilder::new()
            .transverse("O", -3, 0, 0)
            .invariant("A", -2, 0, 1)
            .invariant("B", -2, 0, 1)
            .invariant("C", -2, 0, 1)
            .edge("O", "A")
            .edge("O", "B")
            .edge("O", "C")
            .build();
        let c7 = classify(&t7).unwrap();
        assert_eq!(c7.type_tag, TypeTag::StarTransverseCenter);

        // Single transverse vertex of tangency order zero is the degenerate
        // chain case.
        let lone = GraphBuilder::new().transverse("E1", -2, 0, 0).build();
        assert_eq!(
            classify(&lone).unwrap().type_tag,
            TypeTag::ChainOneTransverse
        );
    }

    #[test]
    fn classify_rejects_oddballs() {
        // A chain with an interior Z=1 curve fits none of the types.
        let odd = fchain_graph(&[2, 2, 2], &[2, 1, 2]);
        assert_eq!(classify(&odd).unwrap().type_tag, TypeTag::NotClassified);
    }

    #[test]
    fn classify_invariant_under_relabeling_and_reversal() {
        let fwd = fchain_graph(&[2, 2, 3], &[1, 2, 2]);
        let mut rev = GraphBuilder::new()
            .invariant("X3", -3, 0, 2)
            .invariant("X2", -2, 0, 2)
            .invariant("X1", -2, 0, 1)
            .edge("X3", "X2")
            .edge("X2", "X1")
            .build();
        rev.vertices.reverse();
        assert_eq!(classify(&fwd).unwrap().type_tag, TypeTag::FChain);
        assert_eq!(classify(&rev).unwrap().type_tag, TypeTag::FChain);
    }

    #[test]
    fn consistency_checks() {
        let t1 = fchain_graph(&[2], &[1]);
        let r = discrepancies(&t1).unwrap();
        let c = classify(&t1).unwrap();
        assert!(thm_consistency(&c, &r).is_empty());

        let t3 = fchain_graph(&[2, 2], &[2, 2]);
        let r3 = discrepancies(&t3).unwrap();
        let c3 = classify(&t3).unwrap();
        assert!(thm_consistency(&c3, &r3).is_empty());
    }
}
