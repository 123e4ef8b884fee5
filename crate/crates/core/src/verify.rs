//! Cross-module verification suites: each one pits an implementation against
//! an independent oracle (recursion vs determinant, closed form vs solver,
//! update formula vs re-solve, staircase vs parametrization, sign lemmas on
//! random systems) and reports one pass/fail line. The randomized parts are
//! seeded for reproducibility.

use crate::blowup::{self, GermConfig, MarkedPoint, PointKind};
use crate::classify::TypeTag;
use crate::discrepancy;
use crate::family::{self, FamilyBoundary, FamilyInvariants, Side};
use crate::germ::{self, CurveGerm, VectorFieldGerm};
use crate::graph::{FoliatedDualGraph, GraphBuilder};
use crate::linalg;
use crate::poly::BiPoly;
use crate::rat::{frac, rat, Rat};
use num::{One, Signed, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl SuiteReport {
    pub fn line(&self) -> String {
        format!(
            "{}: {} ({} ms) — {}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.millis,
            self.detail
        )
    }
}

fn finish(name: &'static str, start: Instant, failures: Vec<String>, detail: String) -> SuiteReport {
    SuiteReport {
        name,
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            detail
        } else {
            format!("{detail}; first failure: {}", failures[0])
        },
        millis: start.elapsed().as_millis(),
    }
}

/// Random connected tree on `n` vertices with weights in 1..=6, retried
/// until the intersection matrix is negative definite (the hypothesis under
/// which the determinant recursions hold).
pub fn random_negdef_tree(rng: &mut ChaCha8Rng, max_vertices: usize) -> FoliatedDualGraph {
    loop {
        let n = rng.gen_range(1..=max_vertices);
        let mut b = GraphBuilder::new();
        for i in 0..n {
            let w = rng.gen_range(1..=6);
            b = b.invariant(&format!("V{i}"), -w, 0, 2);
        }
        for i in 1..n {
            let j = rng.gen_range(0..i);
            b = b.edge(&format!("V{j}"), &format!("V{i}"));
        }
        let g = b.build();
        if linalg::is_negative_definite(&linalg::intersection_matrix(&g)) {
            return g;
        }
    }
}

/// Determinant and cofactor recursions against direct Bareiss computation.
pub fn suite_tree_recursions(seed: u64, trees: usize, max_vertices: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut pivots = 0usize;
    let mut pairs = 0usize;
    for t in 0..trees {
        let g = random_negdef_tree(&mut rng, max_vertices);
        let m = linalg::intersection_matrix(&g);
        let det = linalg::det_exact(&m);
        let delta = det.abs();
        for v in &g.vertices {
            pivots += 1;
            match linalg::delta_recursive(&g, &v.id) {
                Ok(d) if d == delta => {}
                other => failures.push(format!("tree {t} pivot {}: {:?} vs {delta}", v.id, other)),
            }
        }
        for (i, vi) in g.vertices.iter().enumerate() {
            for (j, vj) in g.vertices.iter().enumerate() {
                pairs += 1;
                let direct = linalg::cofactor(&m, i, j).expect("in range");
                match linalg::cofactor_path(&g, &vi.id, &vj.id) {
                    Ok(p) if p == direct => {}
                    other => failures.push(format!(
                        "tree {t} cofactor ({},{}): {:?} vs {direct}",
                        vi.id, vj.id, other
                    )),
                }
            }
        }
    }
    finish(
        "tree-recursions",
        start,
        failures,
        format!("{trees} trees, {pivots} pivots, {pairs} cofactor pairs"),
    )
}

/// Closed forms and family determinant against the exact solver over the
/// full coprime grid.
pub fn suite_closed_forms(
    m_lo: i64,
    m_hi: i64,
    n_max: u32,
    coeffs: &[Rat],
) -> SuiteReport {
    let start = Instant::now();
    let mut failures = Vec::new();
    let pairs = family::coprime_pairs(&(m_lo..=m_hi).collect::<Vec<_>>());
    let mut checked = 0usize;
    let mut dets = 0usize;
    for &(m1, q1) in &pairs {
        for &(m2, q2) in &pairs {
            for bl in coeffs {
                for br in coeffs {
                    let mut boundary = Vec::new();
                    if bl.is_positive() {
                        boundary.push(FamilyBoundary {
                            coeff: bl.clone(),
                            side: Side::Left,
                            index: 1,
                            mult: 1,
                        });
                    }
                    if br.is_positive() {
                        boundary.push(FamilyBoundary {
                            coeff: br.clone(),
                            side: Side::Right,
                            index: 1,
                            mult: 1,
                        });
                    }
                    let inv = FamilyInvariants::new(m1, q1, m2, q2, boundary)
                        .expect("coprime parameters assemble");
                    let det_once = bl.is_zero() && br.is_zero();
                    for n in 0..=n_max {
                        let g = family::assemble(&inv, n);
                        let log = match discrepancy::solve_log_discrepancies(&g) {
                            Ok(l) => l,
                            Err(e) => {
                                failures.push(format!("({m1},{q1},{m2},{q2}) n={n}: {e}"));
                                continue;
                            }
                        };
                        checked += 1;
                        if log["L1"] != family::a_l1(&inv, n) || log["R1"] != family::a_r1(&inv, n)
                        {
                            failures.push(format!(
                                "({m1},{q1},{m2},{q2}) n={n} bl={bl} br={br}: closed form mismatch"
                            ));
                        }
                        if det_once {
                            dets += 1;
                            let d = linalg::det_exact(&linalg::intersection_matrix(&g).negated());
                            if d != family::family_det(&inv, n) {
                                failures.push(format!(
                                    "({m1},{q1},{m2},{q2}) n={n}: determinant mismatch"
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    finish(
        "closed-forms",
        start,
        failures,
        format!(
            "{} coprime side pairs, {checked} solves, {dets} determinants",
            pairs.len()
        ),
    )
}

/// Random solvable germ configurations for the blowup oracle.
pub fn random_germ_config(rng: &mut ChaCha8Rng) -> GermConfig {
    loop {
        let n = rng.gen_range(1..=4usize);
        let mut b = GraphBuilder::new();
        for i in 0..n {
            let w = rng.gen_range(2..=4);
            let z = rng.gen_range(1..=3);
            b = b.invariant(&format!("E{i}"), -w, 0, z);
        }
        for i in 1..n {
            let j = rng.gen_range(0..i);
            b = b.edge(&format!("E{j}"), &format!("E{i}"));
        }
        let with_boundary = rng.gen_bool(0.6);
        if with_boundary {
            let target = format!("E{}", rng.gen_range(0..n));
            let coeff = [frac(1, 2), frac(2, 3), frac(3, 4)][rng.gen_range(0..3)].clone();
            b = b.boundary("B0", coeff, false, &[(target.as_str(), 1)]);
        }
        let g = b.build();
        if !linalg::is_negative_definite(&linalg::intersection_matrix(&g)) {
            continue;
        }
        let mut declared = Vec::new();
        // A smooth point, carrying the boundary branch when present.
        let host = format!("E{}", rng.gen_range(0..n));
        let mut bmult = BTreeMap::new();
        if with_boundary {
            if let Some(b0) = g.boundary.first() {
                if b0.meets_mult(&host) > 0 {
                    bmult.insert(b0.id.clone(), 1);
                }
            }
        }
        declared.push(MarkedPoint {
            id: "p0".into(),
            kind: PointKind::SmoothOnCurve(host),
            bmult,
        });
        if rng.gen_bool(0.5) {
            declared.push(MarkedPoint {
                id: "p1".into(),
                kind: PointKind::ReducedOnCurve(format!("E{}", rng.gen_range(0..n))),
                bmult: BTreeMap::new(),
            });
        }
        match GermConfig::with_points(g, declared) {
            Ok(cfg) => return cfg,
            Err(_) => continue,
        }
    }
}

fn check_all_sequences(
    cfg: &GermConfig,
    depth: u32,
    checks: &mut usize,
    failures: &mut Vec<String>,
    label: &str,
) {
    if depth == 0 {
        return;
    }
    let targets: Vec<String> = cfg.points.iter().map(|p| p.id.clone()).collect();
    for t in targets {
        match blowup::blowup(cfg, &t, None) {
            Ok(next) => {
                *checks += 1;
                if !blowup::resolve_check(&next) {
                    failures.push(format!("{label} blowup at {t}: re-solve mismatch"));
                    return;
                }
                check_all_sequences(&next, depth - 1, checks, failures, label);
            }
            Err(e) => {
                failures.push(format!("{label} blowup at {t}: {e}"));
                return;
            }
        }
    }
}

/// Update formulas against full re-solves over all blowup sequences.
pub fn suite_blowup_consistency(seed: u64, configs: usize, depth: u32) -> SuiteReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut checks = 0usize;
    for k in 0..configs {
        let cfg = random_germ_config(&mut rng);
        let label = format!("config {k}");
        check_all_sequences(&cfg, depth, &mut checks, &mut failures, &label);
        if !failures.is_empty() {
            break;
        }
    }
    finish(
        "blowup-consistency",
        start,
        failures,
        format!("{configs} configs, {checks} sequence prefixes re-solved"),
    )
}

/// Sign lemma on random negative definite connected systems: nonnegative
/// right-hand side gives a nonpositive solution, strictly so when some
/// entry is positive.
pub fn suite_sign_lemma(seed: u64, systems: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for k in 0..systems {
        let g = random_negdef_tree(&mut rng, 8);
        let m = linalg::intersection_matrix(&g);
        let n = m.n;
        let d: Vec<Rat> = (0..n)
            .map(|_| {
                let num = rng.gen_range(0..5i64);
                let den = rng.gen_range(1..4i64);
                frac(num, den)
            })
            .collect();
        let x = match linalg::solve(&m, &d) {
            Ok(x) => x,
            Err(e) => {
                failures.push(format!("system {k}: {e}"));
                continue;
            }
        };
        if x.iter().any(|v| v.is_positive()) {
            failures.push(format!("system {k}: positive solution entry"));
        }
        if d.iter().any(|v| v.is_positive()) && x.iter().any(|v| v.is_zero()) {
            failures.push(format!("system {k}: zero entry despite positive rhs"));
        }
    }
    finish(
        "sign-lemma",
        start,
        failures,
        format!("{systems} random negative definite systems"),
    )
}

fn random_poly(rng: &mut ChaCha8Rng, max_deg: u32, density: f64) -> BiPoly {
    let mut p = BiPoly::zero();
    for i in 0..=max_deg {
        for j in 0..=(max_deg - i) {
            if rng.gen_bool(density) {
                let num = rng.gen_range(-3..=3i64);
                let den = rng.gen_range(1..=2i64);
                p.add_term(i, j, frac(num, den));
            }
        }
    }
    p
}

/// Staircase tangency dimension against the parametrization-order oracle on
/// random non-invariant pairs with a curve smooth at the origin.
pub fn suite_tang_oracle(seed: u64, pairs: usize) -> SuiteReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut done = 0usize;
    while done < pairs {
        let v = VectorFieldGerm::new(
            random_poly(&mut rng, 3, 0.4),
            random_poly(&mut rng, 3, 0.4),
        );
        let mut f = random_poly(&mut rng, 3, 0.5);
        // Force a curve through the origin, smooth there.
        let mut fz = f.coeff(0, 0);
        fz = -fz;
        f.add_term(0, 0, fz);
        if f.coeff(1, 0).is_zero() && f.coeff(0, 1).is_zero() {
            f.add_term(0, 1, Rat::one());
        }
        let Ok(c) = CurveGerm::new(f) else { continue };
        if germ::is_invariant(&v, &c) {
            continue;
        }
        let lhs = germ::tang(&v, &c);
        let rhs = germ::tang_oracle(&v, &c);
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => {
                if a != b {
                    failures.push(format!("pair {done}: staircase {a} vs oracle {b}"));
                }
                done += 1;
            }
            // A common factor through the origin: both routes refuse; skip.
            (Err(_), Err(_)) => continue,
            (a, b) => {
                failures.push(format!("pair {done}: disagree on finiteness {a:?} vs {b:?}"));
                done += 1;
            }
        }
    }
    finish(
        "tang-oracle",
        start,
        failures,
        format!("{pairs} random vector-field/curve pairs"),
    )
}

/// The Z and Camacho-Sad index values on the reduced-singularity families:
/// linear fields over a rational grid and saddle-nodes with small k.
pub fn suite_index_grid() -> SuiteReport {
    let start = Instant::now();
    let mut failures = Vec::new();
    let axis_y = CurveGerm::new(BiPoly::var_y()).unwrap();
    let axis_x = CurveGerm::new(BiPoly::var_x()).unwrap();
    let lambdas = [
        rat(1),
        rat(-1),
        rat(2),
        rat(-2),
        frac(1, 2),
        frac(-1, 2),
        rat(3),
        rat(-3),
        frac(-5, 7),
    ];
    for lambda in &lambdas {
        let mut q = BiPoly::zero();
        q.add_term(0, 1, lambda.clone());
        let v = VectorFieldGerm::new(BiPoly::var_x(), q);
        let checks = [
            (germ::z_index(&v, &axis_y), Ok(1u32)),
            (germ::z_index(&v, &axis_x), Ok(1u32)),
        ];
        for (got, want) in checks {
            if got != want {
                failures.push(format!("lambda {lambda}: Z mismatch {got:?}"));
            }
        }
        if germ::cs_index(&v, &axis_y) != Ok(lambda.clone()) {
            failures.push(format!("lambda {lambda}: CS(y=0) mismatch"));
        }
        if germ::cs_index(&v, &axis_x) != Ok(Rat::one() / lambda) {
            failures.push(format!("lambda {lambda}: CS(x=0) mismatch"));
        }
    }
    for k in 1..=4u32 {
        for nu in [rat(0), rat(1), frac(-2, 3)] {
            let mut p = BiPoly::var_x();
            p.add_term(1, k, nu.clone());
            let mut q = BiPoly::zero();
            q.add_term(0, k + 1, Rat::one());
            let v = VectorFieldGerm::new(p, q);
            if germ::z_index(&v, &axis_y) != Ok(1) || germ::cs_index(&v, &axis_y) != Ok(rat(0)) {
                failures.push(format!("saddle-node k={k} nu={nu}: y=0 indices"));
            }
            if germ::z_index(&v, &axis_x) != Ok(k + 1) || germ::cs_index(&v, &axis_x) != Ok(nu.clone())
            {
                failures.push(format!("saddle-node k={k} nu={nu}: x=0 indices"));
            }
        }
    }
    finish(
        "index-grid",
        start,
        failures,
        format!("{} eigenvalues, 12 saddle-node cases", lambdas.len()),
    )
}

/// Enumerated graphs of every classified type, paired with their expected
/// tags. Used for status consistency and the variety-gap bounds.
pub fn golden_corpus() -> Vec<(FoliatedDualGraph, TypeTag)> {
    let mut out = Vec::new();
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

    // Type 1: F-chains of assorted weights.
    for weights in [
        vec![2],
        vec![3],
        vec![2, 2],
        vec![2, 3],
        vec![3, 2],
        vec![2, 2, 2],
        vec![3, 2, 3],
        vec![2, 2, 2, 2, 2],
        vec![4, 2, 3],
    ] {
        let mut zs = vec![2u32; weights.len()];
        zs[0] = 1;
        out.push((chain(&weights, &zs), TypeTag::FChain));
    }
    // Type 2: bad-tail triples.
    for w in 2..=5 {
        out.push((chain(&[2, w, 2], &[1, 3, 1]), TypeTag::BadTailTriple));
    }
    // Type 3: chains of Z=2 curves.
    for weights in [vec![2], vec![2, 2], vec![3, 2, 4], vec![2, 2, 2, 2]] {
        let zs = vec![2u32; weights.len()];
        out.push((chain(&weights, &zs), TypeTag::Minus2Chain));
    }
    // Type 4: dihedral graphs.
    for tail_w in 2..=4i64 {
        for chain_len in 1..=3usize {
            let mut b = GraphBuilder::new()
                .invariant("P1", -2, 0, 1)
                .invariant("P2", -2, 0, 1)
                .invariant("T", -tail_w, 0, 3);
            let mut prev = "T".to_string();
            for k in 1..=chain_len {
                let id = format!("M{k}");
                b = b.invariant(&id, -2, 0, 2).edge(&prev, &id);
                prev = id;
            }
            b = b.edge("T", "P1").edge("T", "P2");
            out.push((b.build(), TypeTag::Dihedral));
        }
    }
    // Type 5: cycles and the nodal curve.
    for len in 3..=6usize {
        let mut b = GraphBuilder::new();
        for i in 1..=len {
            let w = if i == 1 { 3 } else { 2 };
            b = b.invariant(&format!("E{i}"), -w, 0, 2);
        }
        for i in 1..=len {
            let j = if i == len { 1 } else { i + 1 };
            b = b.edge(&format!("E{i}"), &format!("E{j}"));
        }
        out.push((b.build(), TypeTag::EllipticGorensteinLeaf));
    }
    out.push((
        GraphBuilder::new().invariant("E1", -1, 1, 0).build(),
        TypeTag::EllipticGorensteinLeaf,
    ));
    out.push((
        GraphBuilder::new()
            .invariant("A", -2, 0, 2)
            .invariant("B", -3, 0, 2)
            .edge_full("A", "B", 2, true)
            .build(),
        TypeTag::EllipticGorensteinLeaf,
    ));
    // Type 6: one transverse curve with F-chain flanks (lengths 0..2).
    for (left, right) in [(0usize, 1usize), (1, 1), (2, 1), (2, 2), (0, 0)] {
        let mut b = GraphBuilder::new();
        let mut order: Vec<String> = Vec::new();
        for i in (1..=left).rev() {
            // Outward curve first: Z = 2 away from the center, 1 adjacent.
            let id = format!("L{i}");
            let z = if i == 1 { 1 } else { 2 };
            b = b.invariant(&id, -2, 0, z);
            order.push(id);
        }
        b = b.transverse("T", -2, 0, 0);
        order.push("T".into());
        for i in 1..=right {
            let id = format!("R{i}");
            let z = if i == 1 { 1 } else { 2 };
            b = b.invariant(&id, -2, 0, z);
            order.push(id);
        }
        for w in order.windows(2) {
            b = b.edge(&w[0], &w[1]);
        }
        out.push((b.build(), TypeTag::ChainOneTransverse));
    }
    // Type 7: star with transverse center.
    for branches in [3usize, 4] {
        let mut b = GraphBuilder::new().transverse("O", -(branches as i64), 0, 0);
        for k in 1..=branches {
            let id = format!("A{k}");
            b = b.invariant(&id, -2, 0, 1).edge("O", &id);
        }
        out.push((b.build(), TypeTag::StarTransverseCenter));
    }
    // Star with a longer F-chain branch.
    let g = GraphBuilder::new()
        .transverse("O", -3, 0, 0)
        .invariant("A1", -2, 0, 1)
        .invariant("A2", -2, 0, 2)
        .invariant("B1", -2, 0, 1)
        .invariant("C1", -2, 0, 1)
        .edge("O", "A1")
        .edge("A1", "A2")
        .edge("O", "B1")
        .edge("O", "C1")
        .build();
    out.push((g, TypeTag::StarTransverseCenter));
    out
}

/// Status consistency over the golden corpus: classification tags match and
/// the sign statements hold (type 1 terminal, 1-5 canonical, all log
/// canonical).
pub fn suite_corpus_status() -> SuiteReport {
    let start = Instant::now();
    let mut failures = Vec::new();
    let corpus = golden_corpus();
    let total = corpus.len();
    for (k, (g, expected)) in corpus.into_iter().enumerate() {
        let c = match crate::classify::classify(&g) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("graph {k}: classify failed: {e}"));
                continue;
            }
        };
        if c.type_tag != expected {
            failures.push(format!(
                "graph {k}: expected {} got {}",
                expected.as_str(),
                c.type_tag.as_str()
            ));
            continue;
        }
        let r = match discrepancy::discrepancies(&g) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("graph {k}: solve failed: {e}"));
                continue;
            }
        };
        for line in crate::classify::thm_consistency(&c, &r) {
            if !line.starts_with("warning") {
                failures.push(format!("graph {k} ({}): {line}", expected.as_str()));
            }
        }
    }
    finish(
        "corpus-status",
        start,
        failures,
        format!("{total} classified graphs"),
    )
}

/// Variety-gap bounds over the corpus: b_i <= 1 everywhere, with
/// componentwise equality exactly on cycle-type graphs.
pub fn suite_variety_gap() -> SuiteReport {
    let start = Instant::now();
    let mut failures = Vec::new();
    let corpus = golden_corpus();
    let total = corpus.len();
    for (k, (g, expected)) in corpus.into_iter().enumerate() {
        let gap = match discrepancy::variety_gap(&g) {
            Ok(gap) => gap,
            Err(e) => {
                failures.push(format!("graph {k}: {e}"));
                continue;
            }
        };
        let one = Rat::one();
        if gap.b.values().any(|b| b > &one) {
            failures.push(format!("graph {k}: gap coefficient above one"));
        }
        let all_one = gap.b.values().all(|b| b == &one);
        let is_cycle_type = expected == TypeTag::EllipticGorensteinLeaf;
        if all_one != is_cycle_type {
            failures.push(format!(
                "graph {k}: gap == 1 componentwise is {} but type is {}",
                all_one,
                expected.as_str()
            ));
        }
    }
    finish(
        "variety-gap",
        start,
        failures,
        format!("{total} corpus graphs"),
    )
}

/// Runs every suite with sizes matching the acceptance criteria.
pub fn run_all(seed: u64, quick: bool) -> Vec<SuiteReport> {
    let (trees, configs, pairs, systems) = if quick {
        (50, 100, 30, 50)
    } else {
        (500, 1000, 200, 500)
    };
    let coeffs = [Rat::zero(), frac(1, 2), frac(2, 3), frac(3, 4)];
    let (m_hi, n_max) = if quick { (4, 12) } else { (6, 50) };
    vec![
        suite_closed_forms(2, m_hi, n_max, &coeffs),
        suite_tree_recursions(seed, trees, 12),
        suite_blowup_consistency(seed.wrapping_add(1), configs, 4),
        suite_sign_lemma(seed.wrapping_add(2), systems),
        suite_index_grid(),
        suite_tang_oracle(seed.wrapping_add(3), pairs),
        suite_corpus_status(),
        suite_variety_gap(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_pass() {
        let coeffs = [Rat::zero(), frac(1, 2)];
        let r = suite_closed_forms(2, 3, 6, &coeffs);
        assert!(r.passed, "{}", r.line());
        let r = suite_tree_recursions(7, 25, 9);
        assert!(r.passed, "{}", r.line());
        let r = suite_sign_lemma(7, 40);
        assert!(r.passed, "{}", r.line());
        let r = suite_blowup_consistency(7, 20, 3);
        assert!(r.passed, "{}", r.line());
        let r = suite_index_grid();
        assert!(r.passed, "{}", r.line());
        let r = suite_tang_oracle(7, 12);
        assert!(r.passed, "{}", r.line());
        let r = suite_corpus_status();
        assert!(r.passed, "{}", r.line());
        let r = suite_variety_gap();
        assert!(r.passed, "{}", r.line());
    }
}
