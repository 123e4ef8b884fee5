//! Text formats for germ data.
//!
//! Graph files are line based, UTF-8, `#` comments:
//!
//! ```text
//! curve <id> self=<neg-int> genus=<nat> (invariant Z=<nat> | transverse tang=<nat>)
//! edge <id1> <id2> [mult=<nat>] [sing=<true|false>]
//! boundary <id> coeff=<rational> [invariant]
//! meets <bid> <cid> mult=<nat> [sing=<true|false>]
//! point <id> kind=smooth|corner|reduced1 at=<cid>[,<cid>] [bmult <bid>=<nat>]*
//! ```
//!
//! Germ files carry two polynomials with rational coefficients:
//!
//! ```text
//! P = <poly>
//! Q = <poly>
//! ```
//!
//! with terms like `3*x^2*y`, `-1/2*y`, `x`, joined by `+` and `-`. All
//! rationals are exact; no floating point appears anywhere in either format.

use crate::blowup::{MarkedPoint, PointKind};
use crate::graph::{BoundaryComponent, CurveRole, CurveVertex, Edge, FoliatedDualGraph, Meet};
use crate::poly::BiPoly;
use crate::rat::{parse_rat, Rat};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        msg: msg.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GraphFile {
    pub graph: FoliatedDualGraph,
    pub points: Vec<MarkedPoint>,
}

fn key_value<'a>(tok: &'a str, key: &str) -> Option<&'a str> {
    tok.strip_prefix(key)?.strip_prefix('=')
}

/// Parses the graph format. References are checked: every edge, meets and
/// point line must name ids declared earlier in the file.
pub fn parse_graph(text: &str) -> Result<GraphFile, ParseError> {
    let mut g = FoliatedDualGraph::new();
    let mut points: Vec<MarkedPoint> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "curve" => {
                if toks.len() < 5 {
                    return err(lineno, "curve needs: id self= genus= role");
                }
                let id = toks[1].to_string();
                if g.vertex(&id).is_some() {
                    return err(lineno, format!("duplicate curve id `{id}`"));
                }
                let self_int: i64 = key_value(toks[2], "self")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| ParseError {
                        line: lineno,
                        msg: "expected self=<int>".into(),
                    })?;
                let genus: u32 = key_value(toks[3], "genus")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| ParseError {
                        line: lineno,
                        msg: "expected genus=<nat>".into(),
                    })?;
                let role = match toks[4] {
                    "invariant" => {
                        let z = toks
                            .get(5)
                            .and_then(|t| key_value(t, "Z"))
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| ParseError {
                                line: lineno,
                                msg: "invariant curve needs Z=<nat>".into(),
                            })?;
                        CurveRole::Invariant { z_index: z }
                    }
                    "transverse" => {
                        let t = toks
                            .get(5)
                            .and_then(|t| key_value(t, "tang"))
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| ParseError {
                                line: lineno,
                                msg: "transverse curve needs tang=<nat>".into(),
                            })?;
                        CurveRole::Transverse { tang: t }
                    }
                    other => return err(lineno, format!("unknown role `{other}`")),
                };
                g.vertices.push(CurveVertex {
                    id,
                    self_int,
                    genus,
                    role,
                });
            }
            "edge" => {
                if toks.len() < 3 {
                    return err(lineno, "edge needs two curve ids");
                }
                let (a, b) = (toks[1].to_string(), toks[2].to_string());
                for c in [&a, &b] {
                    if g.vertex(c).is_none() {
                        return err(lineno, format!("edge references unknown curve `{c}`"));
                    }
                }
                let mut mult = 1u32;
                let mut sing: Option<bool> = None;
                for t in &toks[3..] {
                    if let Some(v) = key_value(t, "mult") {
                        mult = v.parse().map_err(|_| ParseError {
                            line: lineno,
                            msg: "bad mult".into(),
                        })?;
                    } else if let Some(v) = key_value(t, "sing") {
                        sing = Some(v == "true");
                    } else {
                        return err(lineno, format!("unknown edge attribute `{t}`"));
                    }
                }
                let both_invariant = g.vertex(&a).unwrap().role.is_invariant()
                    && g.vertex(&b).unwrap().role.is_invariant();
                g.edges.push(Edge {
                    a,
                    b,
                    mult,
                    is_foliation_sing: sing.unwrap_or(both_invariant),
                });
            }
            "boundary" => {
                if toks.len() < 3 {
                    return err(lineno, "boundary needs: id coeff=<rational>");
                }
                let id = toks[1].to_string();
                let coeff = key_value(toks[2], "coeff")
                    .and_then(parse_rat)
                    .ok_or_else(|| ParseError {
                        line: lineno,
                        msg: "expected coeff=<p/q>".into(),
                    })?;
                let invariant = toks.get(3) == Some(&"invariant");
                g.boundary.push(BoundaryComponent {
                    id,
                    coeff,
                    meets: BTreeMap::new(),
                    invariant,
                });
            }
            "meets" => {
                if toks.len() < 4 {
                    return err(lineno, "meets needs: bid cid mult=<nat>");
                }
                let bid = toks[1];
                let cid = toks[2].to_string();
                if g.vertex(&cid).is_none() {
                    return err(lineno, format!("meets references unknown curve `{cid}`"));
                }
                let mult: u32 = key_value(toks[3], "mult")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| ParseError {
                        line: lineno,
                        msg: "expected mult=<nat>".into(),
                    })?;
                let mut sing: Option<bool> = None;
                if let Some(t) = toks.get(4) {
                    match key_value(t, "sing") {
                        Some(v) => sing = Some(v == "true"),
                        None => return err(lineno, format!("unknown meets attribute `{t}`")),
                    }
                }
                let Some(b_invariant) =
                    g.boundary.iter().find(|b| b.id == bid).map(|b| b.invariant)
                else {
                    return err(lineno, format!("meets references unknown boundary `{bid}`"));
                };
                // Two invariant curves cross only at singularities.
                let default_sing = b_invariant
                    && g.vertices
                        .iter()
                        .find(|v| v.id == cid)
                        .map(|v| v.role.is_invariant())
                        .unwrap_or(false);
                let b = g.boundary.iter_mut().find(|b| b.id == bid).unwrap();
                b.meets.insert(
                    cid,
                    Meet {
                        mult,
                        sing: sing.unwrap_or(default_sing),
                    },
                );
            }
            "point" => {
                if toks.len() < 4 {
                    return err(lineno, "point needs: id kind= at=");
                }
                let id = toks[1].to_string();
                let kind_str = key_value(toks[2], "kind").ok_or_else(|| ParseError {
                    line: lineno,
                    msg: "expected kind=smooth|corner|reduced1".into(),
                })?;
                let at = key_value(toks[3], "at").ok_or_else(|| ParseError {
                    line: lineno,
                    msg: "expected at=<cid>[,<cid>]".into(),
                })?;
                let curves: Vec<String> = at.split(',').map(|s| s.to_string()).collect();
                for c in &curves {
                    if g.vertex(c).is_none() {
                        return err(lineno, format!("point references unknown curve `{c}`"));
                    }
                }
                let kind = match (kind_str, curves.as_slice()) {
                    ("smooth", [c]) => PointKind::SmoothOnCurve(c.clone()),
                    ("reduced1", [c]) => PointKind::ReducedOnCurve(c.clone()),
                    ("corner", [c1, c2]) => PointKind::Corner(c1.clone(), c2.clone()),
                    ("corner", _) => return err(lineno, "corner points need at=<c1>,<c2>"),
                    _ => return err(lineno, format!("bad point kind `{kind_str}`")),
                };
                let mut bmult = BTreeMap::new();
                let mut k = 4;
                while k < toks.len() {
                    if toks[k] != "bmult" {
                        return err(lineno, format!("unknown point attribute `{}`", toks[k]));
                    }
                    let Some(spec) = toks.get(k + 1) else {
                        return err(lineno, "bmult needs <bid>=<nat>");
                    };
                    let Some((bid, m)) = spec.split_once('=') else {
                        return err(lineno, "bmult needs <bid>=<nat>");
                    };
                    if !g.boundary.iter().any(|b| b.id == bid) {
                        return err(lineno, format!("bmult references unknown boundary `{bid}`"));
                    }
                    let m: u32 = m.parse().map_err(|_| ParseError {
                        line: lineno,
                        msg: "bad bmult value".into(),
                    })?;
                    bmult.insert(bid.to_string(), m);
                    k += 2;
                }
                points.push(MarkedPoint { id, kind, bmult });
            }
            other => return err(lineno, format!("unknown directive `{other}`")),
        }
    }
    Ok(GraphFile { graph: g, points })
}

/// Canonical serialization; parse-serialize round-trips to a fixed point.
pub fn serialize_graph(file: &GraphFile) -> String {
    let mut out = file.graph.summary();
    for p in &file.points {
        let (kind, at) = match &p.kind {
            PointKind::SmoothOnCurve(c) => ("smooth", c.clone()),
            PointKind::ReducedOnCurve(c) => ("reduced1", c.clone()),
            PointKind::Corner(a, b) => ("corner", format!("{a},{b}")),
        };
        out.push_str(&format!("point {} kind={} at={}", p.id, kind, at));
        for (b, m) in &p.bmult {
            out.push_str(&format!(" bmult {b}={m}"));
        }
        out.push('\n');
    }
    out
}

/// Parses a polynomial in x and y: terms `c*x^a*y^b` with rational c,
/// joined by `+` / `-`.
pub fn parse_poly(text: &str) -> Result<BiPoly, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut out = BiPoly::zero();
    // Split into signed terms.
    let mut terms: Vec<(i64, String)> = Vec::new();
    let mut sign = 1i64;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '+' | '-' if !cur.trim().is_empty() => {
                terms.push((sign, cur.trim().to_string()));
                sign = if ch == '-' { -1 } else { 1 };
                cur = String::new();
            }
            '-' => {
                sign = -sign;
            }
            '+' => {}
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        terms.push((sign, cur.trim().to_string()));
    }
    if terms.is_empty() {
        return Err("no terms".into());
    }
    for (sgn, t) in terms {
        let mut coeff = Rat::from_integer(sgn.into());
        let mut ex = 0u32;
        let mut ey = 0u32;
        for factor in t.split('*') {
            let factor = factor.trim();
            if factor.is_empty() {
                return Err(format!("empty factor in term `{t}`"));
            }
            if let Some(rest) = factor.strip_prefix('x') {
                ex += parse_exp(rest).ok_or(format!("bad exponent in `{factor}`"))?;
            } else if let Some(rest) = factor.strip_prefix('y') {
                ey += parse_exp(rest).ok_or(format!("bad exponent in `{factor}`"))?;
            } else if let Some(r) = parse_rat(factor) {
                coeff *= r;
            } else {
                return Err(format!("cannot parse factor `{factor}`"));
            }
        }
        out.add_term(ex, ey, coeff);
    }
    Ok(out)
}

fn parse_exp(rest: &str) -> Option<u32> {
    if rest.is_empty() {
        Some(1)
    } else {
        rest.strip_prefix('^')?.parse().ok()
    }
}

/// Germ files: `P = <poly>` and `Q = <poly>` lines.
pub fn parse_germ(text: &str) -> Result<crate::germ::VectorFieldGerm, ParseError> {
    let mut p: Option<BiPoly> = None;
    let mut q: Option<BiPoly> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((lhs, rhs)) = line.split_once('=') else {
            return err(lineno, "expected `P = <poly>` or `Q = <poly>`");
        };
        let poly = parse_poly(rhs).map_err(|msg| ParseError { line: lineno, msg })?;
        match lhs.trim() {
            "P" => p = Some(poly),
            "Q" => q = Some(poly),
            other => return err(lineno, format!("unknown component `{other}`")),
        }
    }
    match (p, q) {
        (Some(p), Some(q)) => Ok(crate::germ::VectorFieldGerm::new(p, q)),
        _ => err(0, "germ file must define both P and Q"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{frac, rat};

    #[test]
    fn parse_single_curve() {
        let f = parse_graph("curve E1 self=-2 genus=0 invariant Z=1\n").unwrap();
        assert_eq!(f.graph.vertices.len(), 1);
        let v = f.graph.vertex("E1").unwrap();
        assert_eq!(v.self_int, -2);
        assert_eq!(v.role, CurveRole::Invariant { z_index: 1 });
    }

    #[test]
    fn dangling_edge_reference_is_diagnosed() {
        let e = parse_graph("curve E1 self=-2 genus=0 invariant Z=1\nedge E1 E9\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.msg.contains("E9"));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let text = "curve E1 self=-2 genus=0 invariant Z=1\ncurve E1 self=-3 genus=0 invariant Z=2\n";
        let e = parse_graph(text).unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn full_file_round_trips() {
        let text = "\
# a germ with boundary and a marked point
curve E1 self=-2 genus=0 invariant Z=1
curve E2 self=-2 genus=0 invariant Z=2
edge E1 E2 mult=1 sing=true
boundary B1 coeff=2/3
meets B1 E2 mult=1 sing=false
point p1 kind=smooth at=E2 bmult B1=1
";
        let f = parse_graph(text).unwrap();
        assert_eq!(f.graph.boundary[0].coeff, frac(2, 3));
        assert_eq!(f.points.len(), 1);
        let ser = serialize_graph(&f);
        let f2 = parse_graph(&ser).unwrap();
        assert_eq!(f, f2);
        assert_eq!(ser, serialize_graph(&f2));
    }

    #[test]
    fn edge_sing_defaults_to_invariance() {
        let text = "\
curve A self=-2 genus=0 invariant Z=1
curve B self=-2 genus=0 transverse tang=0
curve C self=-2 genus=0 invariant Z=1
edge A B
edge A C
";
        let f = parse_graph(text).unwrap();
        assert!(!f.graph.edge_between("A", "B").unwrap().is_foliation_sing);
        assert!(f.graph.edge_between("A", "C").unwrap().is_foliation_sing);
    }

    #[test]
    fn parse_poly_terms() {
        let p = parse_poly("3*x^2*y - 1/2*y + x").unwrap();
        assert_eq!(p.coeff(2, 1), rat(3));
        assert_eq!(p.coeff(0, 1), frac(-1, 2));
        assert_eq!(p.coeff(1, 0), rat(1));
        assert!(parse_poly("3*z").is_err());
        assert!(parse_poly("").is_err());
        // Leading minus and bare constants.
        let q = parse_poly("-x + 2").unwrap();
        assert_eq!(q.coeff(1, 0), rat(-1));
        assert_eq!(q.coeff(0, 0), rat(2));
    }

    #[test]
    fn parse_germ_file() {
        let v = parse_germ("P = 2*x\nQ = y\n").unwrap();
        assert_eq!(v.p.coeff(1, 0), rat(2));
        assert_eq!(v.q.coeff(0, 1), rat(1));
        assert!(parse_germ("P = x\n").is_err());
    }
}
