//! Local analytic layer: polynomial vector-field germs at the origin with
//! exact rational coefficients. Eigenvalue classification and reducedness,
//! invariance tests, tangency orders, Z and Camacho-Sad indices, dicritical
//! detection, single blowups in the two standard charts, and a desk-scale
//! reduction of singularities driver.
//!
//! Index computations run on truncated power series; truncation orders grow
//! until two consecutive orders agree, and failure to stabilize is an error
//! rather than a silent approximation.

use crate::poly::{rational_roots, BiPoly, UniPoly};
use crate::rat::{Int, Rat};
use num::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GermError {
    #[error("vector field does not vanish at the origin")]
    NonSingular,
    #[error("curve is invariant, tangency order is infinite")]
    InvariantCurve,
    #[error("curve is not invariant")]
    NotInvariant,
    #[error("curve is singular at the origin")]
    SingularCurve,
    #[error("curve germ must vanish at the origin and be nonzero")]
    BadCurve,
    #[error("series computation did not stabilize at order {0}")]
    NonStabilizing(u32),
    #[error("curve lies in the singular locus of the foliation")]
    DegenerateCurve,
    #[error("root enumeration out of desk-scale range")]
    RootsOutOfRange,
}

/// v = P d/dx + Q d/dy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorFieldGerm {
    pub p: BiPoly,
    pub q: BiPoly,
}

impl VectorFieldGerm {
    pub fn new(p: BiPoly, q: BiPoly) -> Self {
        VectorFieldGerm { p, q }
    }

    /// v(f) = P f_x + Q f_y.
    pub fn apply(&self, f: &BiPoly) -> BiPoly {
        self.p.mul(&f.dx()).add(&self.q.mul(&f.dy()))
    }

    pub fn is_singular_at_origin(&self) -> bool {
        self.p.coeff(0, 0).is_zero() && self.q.coeff(0, 0).is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveGerm {
    pub f: BiPoly,
}

impl CurveGerm {
    pub fn new(f: BiPoly) -> Result<Self, GermError> {
        if f.is_zero() || !f.coeff(0, 0).is_zero() {
            return Err(GermError::BadCurve);
        }
        Ok(CurveGerm { f })
    }

    fn fx0(&self) -> Rat {
        self.f.coeff(1, 0)
    }

    fn fy0(&self) -> Rat {
        self.f.coeff(0, 1)
    }

    pub fn is_smooth_at_origin(&self) -> bool {
        !self.fx0().is_zero() || !self.fy0().is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaKind {
    Rational(Rat),
    /// Eigenvalue ratio generated by an irrational or complex square root;
    /// the discriminant of the characteristic polynomial is recorded.
    NonRational { discriminant: Rat },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SingKind {
    NonDegenerate(LambdaKind),
    SaddleNode,
    NilpotentOrZero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenData {
    pub kind: SingKind,
    pub reduced: bool,
    pub trace: Rat,
    pub det: Rat,
}

fn is_perfect_square(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Rat::new(sn, sd))
    } else {
        None
    }
}

/// Classifies the linear part of the field at the origin. The eigenvalue
/// ratio is reported up to reciprocal, normalized to |lambda| <= 1.
pub fn eigen(v: &VectorFieldGerm) -> Result<EigenData, GermError> {
    if !v.is_singular_at_origin() {
        return Err(GermError::NonSingular);
    }
    let a = v.p.coeff(1, 0);
    let b = v.p.coeff(0, 1);
    let c = v.q.coeff(1, 0);
    let d = v.q.coeff(0, 1);
    let trace = &a + &d;
    let det = &a * &d - &b * &c;
    if det.is_zero() {
        if trace.is_zero() {
            return Ok(EigenData {
                kind: SingKind::NilpotentOrZero,
                reduced: false,
                trace,
                det,
            });
        }
        return Ok(EigenData {
            kind: SingKind::SaddleNode,
            reduced: true,
            trace,
            det,
        });
    }
    let disc = &trace * &trace - Rat::from_integer(Int::from(4)) * &det;
    match is_perfect_square(&disc) {
        Some(s) => {
            let two = Rat::from_integer(Int::from(2));
            let l1 = (&trace + &s) / &two;
            let l2 = (&trace - &s) / &two;
            let mut ratio = l1 / l2;
            if ratio.abs() > Rat::one() {
                ratio = Rat::one() / ratio;
            }
            let reduced = ratio.is_negative();
            Ok(EigenData {
                kind: SingKind::NonDegenerate(LambdaKind::Rational(ratio)),
                reduced,
                trace,
                det,
            })
        }
        None => Ok(EigenData {
            kind: SingKind::NonDegenerate(LambdaKind::NonRational {
                discriminant: disc,
            }),
            reduced: true,
            trace,
            det,
        }),
    }
}

/// A curve is invariant exactly when f divides v(f).
pub fn is_invariant(v: &VectorFieldGerm, c: &CurveGerm) -> bool {
    c.f.divides(&v.apply(&c.f))
}

// --- truncated power series helpers (dense, length = order) ---

fn series_mul(a: &[Rat], b: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n];
    for (i, ai) in a.iter().enumerate().take(n) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn series_eval(h: &BiPoly, xs: &[Rat], ys: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n];
    let one = {
        let mut s = vec![Rat::zero(); n];
        s[0] = Rat::one();
        s
    };
    let max_i = h.terms().map(|(&(i, _), _)| i).max().unwrap_or(0) as usize;
    let max_j = h.terms().map(|(&(_, j), _)| j).max().unwrap_or(0) as usize;
    let mut xp = vec![one.clone()];
    for _ in 0..max_i {
        let next = series_mul(xp.last().unwrap(), xs, n);
        xp.push(next);
    }
    let mut yp = vec![one];
    for _ in 0..max_j {
        let next = series_mul(yp.last().unwrap(), ys, n);
        yp.push(next);
    }
    for (&(i, j), coeff) in h.terms() {
        let prod = series_mul(&xp[i as usize], &yp[j as usize], n);
        for (k, p) in prod.into_iter().enumerate() {
            if !p.is_zero() {
                out[k] += coeff * p;
            }
        }
    }
    out
}

fn series_ord(a: &[Rat]) -> Option<usize> {
    a.iter().position(|c| !c.is_zero())
}

fn series_inverse(a: &[Rat], n: usize) -> Vec<Rat> {
    assert!(!a[0].is_zero(), "series inverse needs a unit");
    let mut out = vec![Rat::zero(); n];
    out[0] = Rat::one() / &a[0];
    for k in 1..n {
        let mut acc = Rat::zero();
        for i in 1..=k {
            if i < a.len() && !a[i].is_zero() {
                acc += &a[i] * &out[k - i];
            }
        }
        out[k] = -acc / &a[0];
    }
    out
}

enum Param {
    /// sigma(t) = (t, phi(t)).
    YofX(Vec<Rat>),
    /// sigma(t) = (psi(t), t).
    XofY(Vec<Rat>),
}

/// Series parametrization of a curve smooth at the origin, to order n.
fn parametrize(c: &CurveGerm, n: usize) -> Result<Param, GermError> {
    if !c.is_smooth_at_origin() {
        return Err(GermError::SingularCurve);
    }
    let (f, swap) = if !c.fy0().is_zero() {
        (c.f.clone(), false)
    } else {
        // Swap x and y.
        let mut g = BiPoly::zero();
        for (&(i, j), coeff) in c.f.terms() {
            g.add_term(j, i, coeff.clone());
        }
        (g, true)
    };
    let fy0 = f.coeff(0, 1);
    let mut t = vec![Rat::zero(); n];
    if n > 1 {
        t[1] = Rat::one();
    }
    let mut phi = vec![Rat::zero(); n];
    for k in 1..n {
        let vals = series_eval(&f, &t, &phi, k + 1);
        let residual = vals[k].clone();
        if !residual.is_zero() {
            phi[k] = -residual / &fy0;
        }
    }
    Ok(if swap {
        Param::XofY(phi)
    } else {
        Param::YofX(phi)
    })
}

fn on_curve_series(p: &Param, h: &BiPoly, n: usize) -> Vec<Rat> {
    let mut t = vec![Rat::zero(); n];
    if n > 1 {
        t[1] = Rat::one();
    }
    match p {
        Param::YofX(phi) => series_eval(h, &t, &phi[..n.min(phi.len())], n),
        Param::XofY(psi) => series_eval(h, &psi[..n.min(psi.len())], &t, n),
    }
}

/// Tangency order of a non-invariant curve: the length of the local ring
/// modulo (f, v(f)), computed by staircase linear algebra on truncations of
/// increasing order until two consecutive orders agree.
pub fn tang(v: &VectorFieldGerm, c: &CurveGerm) -> Result<u32, GermError> {
    let vf = v.apply(&c.f);
    if c.f.divides(&vf) {
        return Err(GermError::InvariantCurve);
    }
    if !vf.coeff(0, 0).is_zero() {
        return Ok(0);
    }
    let mut n = 3u32;
    loop {
        let d1 = staircase_dim(&c.f, &vf, n);
        let d2 = staircase_dim(&c.f, &vf, n + 1);
        if d1 == d2 {
            return Ok(d1 as u32);
        }
        n *= 2;
        if n > 40 {
            return Err(GermError::NonStabilizing(n));
        }
    }
}

/// dim k[x,y] / ((f, g) + m^n): monomials of degree < n modulo the spans of
/// all truncated multiples of f and g.
fn staircase_dim(f: &BiPoly, g: &BiPoly, n: u32) -> usize {
    let cols: Vec<(u32, u32)> = (0..n)
        .flat_map(|d| (0..=d).map(move |i| (i, d - i)))
        .collect();
    let col_index = |i: u32, j: u32| -> Option<usize> {
        if i + j < n {
            Some(((i + j) * (i + j + 1) / 2 + i) as usize)
        } else {
            None
        }
    };
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for h in [f, g] {
        let min_ord = h.ord().unwrap_or(0);
        for d in 0..n.saturating_sub(min_ord) {
            for a in 0..=d {
                let b = d - a;
                let mut row = vec![Rat::zero(); cols.len()];
                let mut nonzero = false;
                for (&(i, j), coeff) in h.terms() {
                    if let Some(k) = col_index(i + a, j + b) {
                        row[k] = coeff.clone();
                        nonzero = true;
                    }
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }
    }
    let rank = row_rank(&mut rows);
    cols.len() - rank
}

#[allow(clippy::needless_range_loop)]
fn row_rank(rows: &mut [Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pv = rows[rank][col].clone();
        for r in (rank + 1)..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &pv;
            for k in col..ncols {
                if !rows[rank][k].is_zero() {
                    let v = &rows[r][k] - &factor * &rows[rank][k];
                    rows[r][k] = v;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Independent route for the tangency order: the vanishing order of v(f)
/// along a series parametrization of the curve. Applies to curves smooth at
/// the origin.
pub fn tang_oracle(v: &VectorFieldGerm, c: &CurveGerm) -> Result<u32, GermError> {
    let vf = v.apply(&c.f);
    if c.f.divides(&vf) {
        return Err(GermError::InvariantCurve);
    }
    let df = c.f.total_degree().unwrap_or(0);
    let dg = vf.total_degree().unwrap_or(0);
    let cap = (df * dg + 2).max(8) as usize;
    let param = parametrize(c, cap)?;
    let series = on_curve_series(&param, &vf, cap);
    match series_ord(&series) {
        Some(k) => Ok(k as u32),
        None => Err(GermError::DegenerateCurve),
    }
}

struct InvariantSetup {
    param: Param,
    main: BiPoly,
    cofactor: BiPoly,
}

fn invariant_setup(v: &VectorFieldGerm, c: &CurveGerm, n: usize) -> Result<InvariantSetup, GermError> {
    let vf = v.apply(&c.f);
    let Some(cofactor) = vf.div_exact(&c.f) else {
        return Err(GermError::NotInvariant);
    };
    if !c.is_smooth_at_origin() {
        return Err(GermError::SingularCurve);
    }
    let main = if !c.fy0().is_zero() {
        v.p.clone()
    } else {
        v.q.clone()
    };
    let param = parametrize(c, n)?;
    Ok(InvariantSetup {
        param,
        main,
        cofactor,
    })
}

/// Z-index: vanishing order at the origin of the restriction of the field
/// to an invariant curve, read along a series parametrization.
pub fn z_index(v: &VectorFieldGerm, c: &CurveGerm) -> Result<u32, GermError> {
    let mut n = 16usize;
    loop {
        let setup = invariant_setup(v, c, n)?;
        let series = on_curve_series(&setup.param, &setup.main, n);
        if let Some(k) = series_ord(&series) {
            return Ok(k as u32);
        }
        n *= 2;
        if n > 256 {
            return Err(GermError::DegenerateCurve);
        }
    }
}

/// Camacho-Sad index of an invariant curve smooth at the origin: the residue
/// of (cofactor / main-component) along the parametrization, where the
/// cofactor is v(f)/f. Orders double until two consecutive values agree.
pub fn cs_index(v: &VectorFieldGerm, c: &CurveGerm) -> Result<Rat, GermError> {
    let mut n = 16usize;
    let mut prev: Option<Rat> = None;
    loop {
        let setup = invariant_setup(v, c, n)?;
        let num = on_curve_series(&setup.param, &setup.cofactor, n);
        let den = on_curve_series(&setup.param, &setup.main, n);
        let m = series_ord(&den).ok_or(GermError::DegenerateCurve)?;
        if m < n {
            let unit: Vec<Rat> = den[m..].to_vec();
            let inv = series_inverse(&unit, n - m);
            let prod = series_mul(&num, &inv, n);
            // Residue: coefficient of t^{m-1} in num * unit^{-1}.
            let res = if m == 0 {
                Rat::zero()
            } else {
                prod.get(m - 1).cloned().unwrap_or_else(Rat::zero)
            };
            match prev {
                Some(p) if p == res => return Ok(res),
                _ => prev = Some(res),
            }
        }
        n *= 2;
        if n > 512 {
            return Err(GermError::NonStabilizing(n as u32));
        }
    }
}

/// Dicritical at the origin: the lowest-degree homogeneous parts satisfy
/// x Q_k - y P_k = 0, so the blowup exceptional divisor is not invariant.
pub fn dicritical(v: &VectorFieldGerm) -> bool {
    let op = v.p.ord();
    let oq = v.q.ord();
    let k = match (op, oq) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => return false,
    };
    let pk = v.p.homogeneous_part(k);
    let qk = v.q.homogeneous_part(k);
    let x = BiPoly::var_x();
    let y = BiPoly::var_y();
    x.mul(&qk).sub(&y.mul(&pk)).is_zero()
}

/// One chart of a blown-up germ.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartGerm {
    pub field: VectorFieldGerm,
    pub exceptional_invariant: bool,
    /// Rational singular points on the exceptional divisor, as (coordinate
    /// along E, germ translated to the origin).
    pub singular_points: Vec<(Rat, VectorFieldGerm)>,
    /// Root-free factor carrying the non-rational singular locus, if any.
    pub nonrational_factor: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GermBlowup {
    pub dicritical: bool,
    /// Chart (x, y/x); covers all of E except one point.
    pub chart1: ChartGerm,
    /// Chart (x/y, y); only its origin adds a new point of E.
    pub chart2: ChartGerm,
}

fn saturate(p: BiPoly, q: BiPoly, along_x: bool) -> (BiPoly, BiPoly) {
    let min_exp = |h: &BiPoly| -> Option<u32> {
        if along_x {
            h.min_x_exponent()
        } else {
            h.terms().map(|(&(_, j), _)| j).min()
        }
    };
    let s = match (min_exp(&p), min_exp(&q)) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => 0,
    };
    if s == 0 {
        return (p, q);
    }
    let div = |h: &BiPoly| -> BiPoly {
        if h.is_zero() {
            return BiPoly::zero();
        }
        if along_x {
            h.div_xpow(s)
        } else {
            let mut out = BiPoly::zero();
            for (&(i, j), c) in h.terms() {
                out.add_term(i, j - s, c.clone());
            }
            out
        }
    };
    (div(&p), div(&q))
}

fn translate_y(v: &VectorFieldGerm, y0: &Rat) -> VectorFieldGerm {
    let px = BiPoly::var_x();
    let py = BiPoly::var_y().add(&BiPoly::constant(y0.clone()));
    VectorFieldGerm {
        p: v.p.compose(&px, &py),
        q: v.q.compose(&px, &py),
    }
}

fn chart_singular_points(
    field: &VectorFieldGerm,
    exceptional_invariant: bool,
    restrict: impl Fn(&BiPoly) -> UniPoly,
) -> Result<(Vec<Rat>, Option<String>), GermError> {
    let pu = restrict(&field.p);
    let qu = restrict(&field.q);
    let locus = if exceptional_invariant {
        // The E-component vanishes identically; singularities come from the
        // other component alone.
        if pu.is_zero() {
            qu
        } else {
            pu
        }
    } else {
        pu.gcd(&qu)
    };
    if locus.is_zero() {
        // Every point of E singular: not saturated, should not happen.
        return Err(GermError::DegenerateCurve);
    }
    if locus.degree() == Some(0) {
        return Ok((vec![], None));
    }
    let (roots, leftover) = rational_roots(&locus).ok_or(GermError::RootsOutOfRange)?;
    let flag = match leftover.degree() {
        Some(d) if d >= 1 => Some(format!(
            "non-rational singular locus with coefficients {:?}",
            leftover
                .coeffs()
                .iter()
                .map(crate::rat::fmt_rat)
                .collect::<Vec<_>>()
        )),
        _ => None,
    };
    Ok((roots, flag))
}

/// Blows up the origin: returns the saturated transformed fields in the two
/// standard charts with the exceptional divisor invariance flag and the
/// singular points on E (rational ones carry translated germs; irrational
/// ones are reported symbolically).
pub fn blowup_germ(v: &VectorFieldGerm) -> Result<GermBlowup, GermError> {
    if !v.is_singular_at_origin() {
        return Err(GermError::NonSingular);
    }
    let dic = dicritical(v);

    // Chart 1: x = u, y = u w; components (u', w') = (P1, (Q1 - w P1)/u).
    let u = BiPoly::var_x();
    let w = BiPoly::var_y();
    let uw = u.mul(&w);
    let p1 = v.p.compose(&u, &uw);
    let q1raw = v.q.compose(&u, &uw).sub(&w.mul(&p1));
    let q1 = q1raw.div_xpow(1);
    let (p1, q1) = saturate(p1, q1, true);
    let e1_invariant = p1.restrict_x0().is_zero();
    let field1 = VectorFieldGerm { p: p1, q: q1 };
    let (roots1, flag1) = chart_singular_points(&field1, e1_invariant, |h| h.restrict_x0())?;
    let sing1 = roots1
        .iter()
        .map(|r| (r.clone(), translate_y(&field1, r)))
        .collect();
    let chart1 = ChartGerm {
        field: field1,
        exceptional_invariant: e1_invariant,
        singular_points: sing1,
        nonrational_factor: flag1,
    };

    // Chart 2: x = p y, y = y; components (p', y') = ((P2 - p Q2)/y, Q2).
    let pvar = BiPoly::var_x();
    let yvar = BiPoly::var_y();
    let py = pvar.mul(&yvar);
    let q2 = v.q.compose(&py, &yvar);
    let p2raw = v.p.compose(&py, &yvar).sub(&pvar.mul(&q2));
    let mut p2 = BiPoly::zero();
    for (&(i, j), c) in p2raw.terms() {
        assert!(j >= 1, "chart-two numerator must be divisible by y");
        p2.add_term(i, j - 1, c.clone());
    }
    let (p2, q2) = saturate(p2, q2, false);
    let e2_invariant = {
        let restricted: UniPoly = {
            let mut g = BiPoly::zero();
            for (&(i, j), c) in q2.terms() {
                if j == 0 {
                    g.add_term(0, i, c.clone());
                }
            }
            g.restrict_x0()
        };
        restricted.is_zero()
    };
    let field2 = VectorFieldGerm { p: p2, q: q2 };
    // Only the chart-two origin is a new point of E.
    let origin_singular = field2.p.coeff(0, 0).is_zero() && field2.q.coeff(0, 0).is_zero();
    let sing2 = if origin_singular {
        vec![(Rat::zero(), field2.clone())]
    } else {
        vec![]
    };
    let chart2 = ChartGerm {
        field: field2,
        exceptional_invariant: e2_invariant,
        singular_points: sing2,
        nonrational_factor: None,
    };

    debug_assert_eq!(chart1.exceptional_invariant, !dic);
    Ok(GermBlowup {
        dicritical: dic,
        chart1,
        chart2,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionNode {
    pub label: String,
    pub eigen: EigenData,
    pub expanded: bool,
    pub children: Vec<ReductionNode>,
}

impl ReductionNode {
    pub fn depth(&self) -> u32 {
        1 + self
            .children
            .iter()
            .map(|c| c.depth())
            .max()
            .unwrap_or(0)
    }

    fn all_leaves_reduced(&self) -> bool {
        if self.children.is_empty() && !self.expanded {
            self.eigen.reduced
        } else {
            self.children.iter().all(|c| c.all_leaves_reduced())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOutcome {
    pub root: ReductionNode,
    pub success: bool,
    pub flags: Vec<String>,
}

fn reduce_rec(
    v: &VectorFieldGerm,
    label: String,
    depth_left: u32,
    flags: &mut Vec<String>,
) -> Result<ReductionNode, GermError> {
    let e = eigen(v)?;
    if e.reduced {
        return Ok(ReductionNode {
            label,
            eigen: e,
            expanded: false,
            children: vec![],
        });
    }
    if depth_left == 0 {
        flags.push(format!("depth exhausted at {label}"));
        return Ok(ReductionNode {
            label,
            eigen: e,
            expanded: false,
            children: vec![],
        });
    }
    let b = blowup_germ(v)?;
    let mut children = Vec::new();
    for (r, germ) in &b.chart1.singular_points {
        let child_label = format!("{label}/c1@{}", crate::rat::fmt_rat(r));
        children.push(reduce_rec(germ, child_label, depth_left - 1, flags)?);
    }
    if let Some(f) = &b.chart1.nonrational_factor {
        flags.push(format!("{label}: {f}"));
    }
    for (_, germ) in &b.chart2.singular_points {
        let child_label = format!("{label}/c2@0");
        children.push(reduce_rec(germ, child_label, depth_left - 1, flags)?);
    }
    Ok(ReductionNode {
        label,
        eigen: e,
        expanded: true,
        children,
    })
}

/// Repeatedly blows up non-reduced singular points (rational ones) until all
/// leaves are reduced or the depth budget runs out.
pub fn seidenberg_reduce(
    v: &VectorFieldGerm,
    max_depth: u32,
) -> Result<ReductionOutcome, GermError> {
    assert!(max_depth >= 1);
    let mut flags = Vec::new();
    let root = reduce_rec(v, "root".into(), max_depth, &mut flags)?;
    let success = flags.is_empty() && root.all_leaves_reduced();
    Ok(ReductionOutcome {
        root,
        success,
        flags,
    })
}
