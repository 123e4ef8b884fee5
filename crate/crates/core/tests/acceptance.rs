//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Every tolerance is exact equality or exact membership; nothing is
//! floating point. Run with `cargo test --test acceptance -- --nocapture`
//! to see the criterion lines and timings.

use folsurf::blowup::{self, GermConfig, MarkedPoint, PointKind};
use folsurf::discrepancy::{discrepancies, good_lc, variety_gap};
use folsurf::family::{self, FamilyBoundary, FamilyInvariants, ScanSpec, Side};
use folsurf::rat::{frac, rat, rat_abs, Rat};
use folsurf::verify;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::time::Instant;

fn criterion(n: u32, name: &str, passed: bool, detail: &str, start: Instant) {
    println!(
        "criterion {n} [{name}]: {} ({} ms) — {detail}",
        if passed { "PASS" } else { "FAIL" },
        start.elapsed().as_millis()
    );
    assert!(passed, "criterion {n} failed: {detail}");
}

#[test]
fn criterion_01_closed_form_equivalence() {
    let start = Instant::now();
    let coeffs = [Rat::zero(), frac(1, 2), frac(2, 3), frac(3, 4)];
    let r = verify::suite_closed_forms(2, 6, 50, &coeffs);
    criterion(1, "closed forms vs solver", r.passed, &r.detail, start);
}

#[test]
fn criterion_02_determinant_cofactor_recursions() {
    let start = Instant::now();
    let r = verify::suite_tree_recursions(20260809, 500, 12);
    criterion(2, "determinant/cofactor recursions", r.passed, &r.detail, start);
}

#[test]
fn criterion_03_blowup_consistency() {
    let start = Instant::now();
    let r = verify::suite_blowup_consistency(20260809, 1000, 4);
    criterion(3, "blowup update vs re-solve", r.passed, &r.detail, start);
}

#[test]
fn criterion_04_zero_boundary_mld_values() {
    let start = Instant::now();
    let values = blowup::mld_zero_boundary_scan(8).expect("scan runs");
    let allowed: Vec<Rat> = std::iter::once(Rat::zero())
        .chain((1..=9).map(|n| frac(1, n)))
        .collect();
    let ok = values.iter().all(|v| allowed.contains(v));
    let detail = format!(
        "values {{{}}}",
        values
            .iter()
            .map(folsurf::rat::fmt_rat)
            .collect::<Vec<_>>()
            .join(", ")
    );
    criterion(4, "boundary-free mld value set", ok, &detail, start);
}

#[test]
fn criterion_05_long_chain_shortcut() {
    let start = Instant::now();
    let mut failures: Vec<String> = Vec::new();

    // Depth-4 search never undercuts pld on long assembled families whose
    // boundary coefficients respect eps = 1/4 (r = 11 > 2*4 + 2).
    let family_specs: [(i64, i64, i64, i64, Rat, Rat); 4] = [
        (2, 1, 2, 1, Rat::zero(), Rat::zero()),
        (2, 1, 2, 1, frac(1, 2), frac(1, 2)),
        (2, 1, 2, 1, frac(3, 4), frac(1, 4)),
        (3, 1, 2, 1, frac(1, 2), Rat::zero()),
    ];
    let mut searched = 0usize;
    for (m1, q1, m2, q2, bl, br) in family_specs {
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
        let inv = FamilyInvariants::new(m1, q1, m2, q2, boundary).unwrap();
        let n = 9u32;
        let g = family::assemble(&inv, n);
        let report = match discrepancies(&g) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("family ({m1},{q1},{m2},{q2}): {e}"));
                continue;
            }
        };
        if !report.status.at_least_log_canonical() {
            continue;
        }
        // Boundary branches sit at declared smooth points so the search
        // genuinely exercises the subtraction terms.
        let mut declared = Vec::new();
        for (k, b) in g.boundary.iter().enumerate() {
            let curve = b
                .meets
                .iter()
                .find(|(_, m)| m.mult > 0)
                .map(|(c, _)| c.clone())
                .unwrap();
            let mut bm = BTreeMap::new();
            bm.insert(b.id.clone(), 1u32);
            declared.push(MarkedPoint {
                id: format!("q{k}"),
                kind: PointKind::SmoothOnCurve(curve),
                bmult: bm,
            });
        }
        let cfg = GermConfig::with_points(g, declared).unwrap();
        let outcome = blowup::search_min(&cfg, 4, 40_000);
        searched += outcome.explored;
        if outcome.negative {
            failures.push(format!(
                "family ({m1},{q1},{m2},{q2}) bl={bl} br={br}: negative value in search"
            ));
        }
        if let Some(m) = outcome.min_nonzero {
            if m < report.pld {
                failures.push(format!(
                    "family ({m1},{q1},{m2},{q2}) bl={bl} br={br}: search found {m} below pld {}",
                    report.pld
                ));
            }
        }
    }

    // |pld_n - limit| decreases monotonically in n, exactly.
    let pairs = family::coprime_pairs(&[2, 3, 4, 5, 6]);
    let mut tuples = 0usize;
    for &(m1, q1) in &pairs {
        for &(m2, q2) in &pairs {
            for bl in [Rat::zero(), frac(1, 2)] {
                let mut boundary = Vec::new();
                if bl.is_positive() {
                    boundary.push(FamilyBoundary {
                        coeff: bl.clone(),
                        side: Side::Left,
                        index: 1,
                        mult: 1,
                    });
                }
                let inv = FamilyInvariants::new(m1, q1, m2, q2, boundary).unwrap();
                let limit = family::pld_limit(&inv);
                let mut prev: Option<Rat> = None;
                tuples += 1;
                for n in 1..=50u32 {
                    let row = family::evaluate(&inv, n).unwrap();
                    let gap = rat_abs(&(&row.pld - &limit));
                    if let Some(p) = &prev {
                        if &gap > p {
                            failures.push(format!(
                                "({m1},{q1},{m2},{q2}) bl={bl}: |pld_n - limit| grew at n={n}"
                            ));
                            break;
                        }
                    }
                    prev = Some(gap);
                }
            }
        }
    }
    let detail = format!(
        "{searched} search nodes, {tuples} gap sequences over n in [1,50]{}",
        failures
            .first()
            .map(|f| format!("; first failure: {f}"))
            .unwrap_or_default()
    );
    criterion(5, "long-chain shortcut and limit", failures.is_empty(), &detail, start);
}

#[test]
fn criterion_06_status_consistency() {
    let start = Instant::now();
    let r = verify::suite_corpus_status();
    criterion(6, "classified types vs status", r.passed, &r.detail, start);
}

#[test]
fn criterion_07_variety_gap_bounds() {
    let start = Instant::now();
    let r = verify::suite_variety_gap();
    let mut passed = r.passed;
    let mut detail = r.detail.clone();
    // Restricted to the good-lc sub-corpus the same statements hold.
    let mut good = 0usize;
    for (g, tag) in verify::golden_corpus() {
        let report = discrepancies(&g).unwrap();
        if !good_lc(&g, &report) {
            continue;
        }
        good += 1;
        let gap = variety_gap(&g).unwrap();
        let all_one = gap.b.values().all(|b| b == &Rat::one());
        if gap.b.values().any(|b| b > &Rat::one()) {
            passed = false;
            detail = format!("good-lc graph of type {} has b > 1", tag.as_str());
        }
        if all_one != (tag == folsurf::classify::TypeTag::EllipticGorensteinLeaf) {
            passed = false;
            detail = format!("good-lc graph of type {} breaks the b == 1 rule", tag.as_str());
        }
    }
    let detail = format!("{detail}; {good} good-lc graphs");
    criterion(7, "variety gap bounds", passed, &detail, start);
}

#[test]
fn criterion_08_index_grid() {
    let start = Instant::now();
    let r = verify::suite_index_grid();
    criterion(8, "Z and CS index grid", r.passed, &r.detail, start);
}

#[test]
fn criterion_09_tang_oracle() {
    let start = Instant::now();
    let r = verify::suite_tang_oracle(20260809, 200);
    criterion(9, "tangency staircase vs parametrization", r.passed, &r.detail, start);
}

#[test]
fn criterion_10_acc_scan_stabilization() {
    let start = Instant::now();
    let mut spec = ScanSpec::standard();
    spec.coeffs = vec![
        Rat::zero(),
        frac(1, 2),
        frac(2, 3),
        frac(3, 4),
        frac(4, 5),
        Rat::one(),
    ];
    // Longest possible strictly increasing run within one tuple's sequence.
    spec.max_increasing_run = (spec.n_to - spec.n_from + 1) as usize;
    let a = family::acc_scan(&spec).expect("scan runs");
    let b = family::acc_scan(&spec).expect("scan runs");
    let deterministic = a == b;
    let no_flags = a.acc_flags.is_empty();

    // Per tuple, |pld_n - limit| never increases: stabilization observed.
    let mut stab_ok = true;
    let mut key = None;
    let mut prev_gap: Option<Rat> = None;
    for row in &a.rows {
        let k = (
            row.m1,
            row.q1,
            row.m2,
            row.q2,
            row.alpha_l.clone(),
            row.alpha_r.clone(),
        );
        if Some(&k) != key.as_ref() {
            key = Some(k);
            prev_gap = None;
        }
        let gap = rat_abs(&(&row.pld - &row.limit));
        if let Some(p) = &prev_gap {
            if &gap > p {
                stab_ok = false;
            }
        }
        prev_gap = Some(gap);
    }
    let detail = format!(
        "{} rows, deterministic: {deterministic}, flags: {}, stabilization: {stab_ok}, min off ends: {}",
        a.rows.len(),
        a.acc_flags.len(),
        a.attained_elsewhere
    );
    criterion(
        10,
        "acc scan stabilization",
        deterministic && no_flags && stab_ok,
        &detail,
        start,
    );
}

#[test]
fn criterion_11_sign_lemma() {
    let start = Instant::now();
    let r = verify::suite_sign_lemma(20260809, 500);
    criterion(11, "negative definite sign lemma", r.passed, &r.detail, start);
}

#[test]
fn criterion_examples_round_out() {
    // Spot values from the worked examples, pinned exactly.
    let start = Instant::now();
    let inv = FamilyInvariants::new(5, 2, 3, 1, vec![]).unwrap();
    let ok = family::family_det(&inv, 4) == 37.into()
        && family::s_n(3, 1, 2) == 7.into()
        && family::a_l1(&FamilyInvariants::new(3, 1, 3, 1, vec![]).unwrap(), 1) == frac(5, 12)
        && family::pld_limit(
            &FamilyInvariants::with_alphas(3, 1, 3, 1, rat(1), frac(1, 2)).unwrap(),
        ) == frac(1, 4);
    criterion(0, "worked examples", ok, "pinned example values", start);
}
