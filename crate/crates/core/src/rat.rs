//! Exact rational scalars. Everything in this crate computes over `Rat`
//! (arbitrary-precision rationals); there is no floating point anywhere.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::str::FromStr;

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(int(n))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(int(n), int(d))
}

pub fn is_zero(x: &Rat) -> bool {
    x.is_zero()
}

/// Renders a rational as `p/q`, or just `p` when the denominator is one.
pub fn fmt_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `-p`, or `p/q` into an exact rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        None => Int::from_str(s).ok().map(Rat::from_integer),
        Some((n, d)) => {
            let n = Int::from_str(n.trim()).ok()?;
            let d = Int::from_str(d.trim()).ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rat::new(n, d))
            }
        }
    }
}

/// Floor of `a / b` for positive rationals, as used in `floor(2/eps)` bounds.
pub fn floor_div(a: &Rat, b: &Rat) -> Int {
    let q = a / b;
    q.floor().to_integer()
}

pub fn rat_min<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> Option<Rat> {
    xs.into_iter().min().cloned()
}

pub fn rat_abs(x: &Rat) -> Rat {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7", "5/12", "-2/3"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(fmt_rat(&r), s);
        }
        assert_eq!(parse_rat("4/6").map(|r| fmt_rat(&r)).unwrap(), "2/3");
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }

    #[test]
    fn floor_div_matches_integer_floor() {
        assert_eq!(floor_div(&rat(2), &frac(1, 4)), int(8));
        assert_eq!(floor_div(&rat(2), &frac(3, 4)), int(2));
        assert_eq!(floor_div(&rat(1), &frac(2, 3)), int(1));
    }
}
