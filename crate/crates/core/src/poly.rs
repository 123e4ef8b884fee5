//! Bivariate and univariate polynomials with exact rational coefficients,
//! sized for local computations at a single germ: arithmetic, substitution,
//! exact division, and rational root extraction.

use crate::rat::{fmt_rat, Int, Rat};
use num::{Integer, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A polynomial in x and y; keys are (x-exponent, y-exponent) and zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = BiPoly::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn var_x() -> Self {
        let mut p = BiPoly::zero();
        p.add_term(1, 0, Rat::one());
        p
    }

    pub fn var_y() -> Self {
        let mut p = BiPoly::zero();
        p.add_term(0, 1, Rat::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rat)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((i, j)).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly {
            terms: self.terms.iter().map(|(&k, c)| (k, -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> BiPoly {
        if c.is_zero() {
            return BiPoly::zero();
        }
        BiPoly {
            terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }

    pub fn dx(&self) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                out.add_term(i - 1, j, c * crate::rat::rat(i as i64));
            }
        }
        out
    }

    pub fn dy(&self) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i, j), c) in &self.terms {
            if j > 0 {
                out.add_term(i, j - 1, c * crate::rat::rat(j as i64));
            }
        }
        out
    }

    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (&(i, j), c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..i {
                t *= x;
            }
            for _ in 0..j {
                t *= y;
            }
            acc += t;
        }
        acc
    }

    /// Total-degree order at the origin (minimal total degree of a term).
    pub fn ord(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).min()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    /// Homogeneous part of the given total degree.
    pub fn homogeneous_part(&self, k: u32) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(&(i, j), _)| i + j == k)
                .map(|(&k2, c)| (k2, c.clone()))
                .collect(),
        }
    }

    /// Substitutes x -> px, y -> py.
    pub fn compose(&self, px: &BiPoly, py: &BiPoly) -> BiPoly {
        let max_i = self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0);
        let max_j = self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0);
        let mut xpow = Vec::with_capacity(max_i as usize + 1);
        let mut ypow = Vec::with_capacity(max_j as usize + 1);
        xpow.push(BiPoly::constant(Rat::one()));
        for _ in 0..max_i {
            let next = xpow.last().unwrap().mul(px);
            xpow.push(next);
        }
        ypow.push(BiPoly::constant(Rat::one()));
        for _ in 0..max_j {
            let next = ypow.last().unwrap().mul(py);
            ypow.push(next);
        }
        let mut out = BiPoly::zero();
        for (&(i, j), c) in &self.terms {
            out = out.add(&xpow[i as usize].mul(&ypow[j as usize]).scale(c));
        }
        out
    }

    /// Exact division by x^k; panics if some term has a smaller x-exponent.
    pub fn div_xpow(&self, k: u32) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| {
                    assert!(i >= k, "division by x^{k} is not exact");
                    ((i - k, j), c.clone())
                })
                .collect(),
        }
    }

    pub fn min_x_exponent(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).min()
    }

    fn leading_term(&self) -> Option<((u32, u32), Rat)> {
        // Graded lexicographic order.
        self.terms
            .iter()
            .max_by_key(|(&(i, j), _)| (i + j, i))
            .map(|(&k, c)| (k, c.clone()))
    }

    /// Exact quotient self / divisor, or None when the division leaves a
    /// remainder. Single-divisor reduction: the first irreducible term
    /// certifies non-divisibility.
    pub fn div_exact(&self, divisor: &BiPoly) -> Option<BiPoly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let ((di, dj), dc) = divisor.leading_term().unwrap();
        let mut rem = self.clone();
        let mut quot = BiPoly::zero();
        while let Some(((ri, rj), rc)) = rem.leading_term() {
            if ri < di || rj < dj {
                return None;
            }
            let (qi, qj) = (ri - di, rj - dj);
            let qc = &rc / &dc;
            quot.add_term(qi, qj, qc.clone());
            let mut shifted = BiPoly::zero();
            shifted.add_term(qi, qj, qc);
            rem = rem.sub(&shifted.mul(divisor));
        }
        Some(quot)
    }

    pub fn divides(&self, other: &BiPoly) -> bool {
        if other.is_zero() {
            return true;
        }
        other.div_exact(self).is_some()
    }

    /// Restriction to x = 0 as a univariate polynomial in y.
    pub fn restrict_x0(&self) -> UniPoly {
        let deg = self
            .terms
            .keys()
            .filter(|&&(i, _)| i == 0)
            .map(|&(_, j)| j)
            .max();
        let Some(deg) = deg else {
            return UniPoly::zero();
        };
        let mut coeffs = vec![Rat::zero(); deg as usize + 1];
        for (&(i, j), c) in &self.terms {
            if i == 0 {
                coeffs[j as usize] = c.clone();
            }
        }
        UniPoly::new(coeffs)
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        // Highest degree first reads better.
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by_key(|&(i, j)| std::cmp::Reverse((i + j, i)));
        for (i, j) in keys {
            let c = &self.terms[&(i, j)];
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
                first = false;
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || (i == 0 && j == 0) {
                parts.push(fmt_rat(&mag));
            }
            if i == 1 {
                parts.push("x".into());
            } else if i > 1 {
                parts.push(format!("x^{i}"));
            }
            if j == 1 {
                parts.push("y".into());
            } else if j > 1 {
                parts.push(format!("y^{j}"));
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

/// Univariate polynomial, dense coefficients from degree zero upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn rem(&self, other: &UniPoly) -> UniPoly {
        let mut r = self.coeffs.clone();
        let dn = other.coeffs.len();
        assert!(dn > 0);
        while r.len() >= dn {
            let lead = r.last().unwrap().clone();
            if lead.is_zero() {
                r.pop();
                continue;
            }
            let shift = r.len() - dn;
            let factor = lead / other.coeffs.last().unwrap();
            for (k, c) in other.coeffs.iter().enumerate() {
                let v = &r[shift + k] - &factor * c;
                r[shift + k] = v;
            }
            r.pop();
        }
        UniPoly::new(r)
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if let Some(lead) = a.coeffs.last().cloned() {
            UniPoly::new(a.coeffs.iter().map(|c| c / &lead).collect())
        } else {
            a
        }
    }

    /// Divides out t^k where k is the valuation at zero.
    fn strip_root_zero(&self) -> (usize, UniPoly) {
        let k = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len());
        (k, UniPoly::new(self.coeffs[k..].to_vec()))
    }
}

fn small_divisors(n: &Int, cap: usize) -> Option<Vec<Int>> {
    let n = n.abs();
    if n.is_zero() {
        return Some(vec![]);
    }
    let mut divs = Vec::new();
    let mut d = Int::one();
    let mut count = 0usize;
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            divs.push(d.clone());
            let other = &n / &d;
            if other != d {
                divs.push(other);
            }
            count += 2;
            if count > cap {
                return None;
            }
        }
        d += 1;
        if d > Int::from(2_000_000) && &d * &d <= n {
            // Coefficients out of desk scale; refuse rather than stall.
            return None;
        }
    }
    Some(divs)
}

/// Rational roots of a univariate polynomial plus the root-free cofactor.
/// Returns None when coefficient divisors are out of enumeration range.
pub fn rational_roots(p: &UniPoly) -> Option<(Vec<Rat>, UniPoly)> {
    if p.is_zero() {
        return Some((vec![], UniPoly::zero()));
    }
    let (k, mut body) = p.strip_root_zero();
    let mut roots = Vec::new();
    if k > 0 {
        roots.push(Rat::zero());
    }
    if body.degree() == Some(0) {
        return Some((roots, body));
    }
    // Clear denominators to an integer polynomial.
    let mut lcm = Int::one();
    for c in body.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<Int> = body
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let a0 = ints.first().cloned().unwrap_or_else(Int::zero);
    let an = ints.last().cloned().unwrap_or_else(Int::zero);
    let ps = small_divisors(&a0, 4096)?;
    let qs = small_divisors(&an, 4096)?;
    let mut candidates: Vec<Rat> = Vec::new();
    for pnum in &ps {
        for qden in &qs {
            for sign in [1i64, -1] {
                let c = Rat::new(pnum * Int::from(sign), qden.clone());
                if !candidates.contains(&c) {
                    candidates.push(c);
                }
            }
        }
    }
    for c in candidates {
        while body.eval(&c).is_zero() {
            roots.push(c.clone());
            // Deflate by (t - c).
            let mut out: Vec<Rat> = Vec::with_capacity(body.coeffs().len().saturating_sub(1));
            let mut carry = Rat::zero();
            for coeff in body.coeffs().iter().rev() {
                carry = coeff + &carry * &c;
                out.push(carry.clone());
            }
            out.pop();
            out.reverse();
            body = UniPoly::new(out);
            if body.degree().is_none() || body.degree() == Some(0) {
                break;
            }
        }
        if body.degree().is_none() || body.degree() == Some(0) {
            break;
        }
    }
    roots.sort();
    roots.dedup();
    Some((roots, body))
}
