//! Exact nonnegative integers with a symbolic tower-of-exponentials form.
//!
//! A value is a sum `c_1*2^(E_1) + ... + c_m*2^(E_m) + k` where the
//! exponents are themselves such values, kept only when the power is too
//! large to materialize. Everything is exact; comparisons are decided
//! structurally (heights, then top exponents, then margins) and fall back
//! to exact big-integer arithmetic when both sides are small enough.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

/// Powers with exponent value at most this are materialized exactly.
const MATERIALIZE_LIMIT: u64 = 1 << 16;
/// Ceiling (in bits) for exact fallback materialization in comparisons.
const CAP_BITS: u64 = 1 << 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TowerError {
    #[error("comparison undecidable without materializing a tower")]
    Incomparable,
}

#[derive(Debug, Clone)]
struct Term {
    coeff: BigUint,
    exp: Box<TowerInt>,
}

#[derive(Debug, Clone)]
pub struct TowerInt {
    /// Sorted by strictly descending exponent value.
    terms: Vec<Term>,
    konst: BigUint,
}

impl TowerInt {
    pub fn from_u64(x: u64) -> Self {
        TowerInt { terms: Vec::new(), konst: BigUint::from(x) }
    }

    pub fn from_biguint(x: BigUint) -> Self {
        TowerInt { terms: Vec::new(), konst: x }
    }

    pub fn zero() -> Self {
        TowerInt::from_u64(0)
    }

    pub fn is_exact(&self) -> bool {
        self.terms.is_empty()
    }

    /// The exact value, when it was small enough to materialize.
    pub fn to_biguint(&self) -> Option<&BigUint> {
        self.terms.is_empty().then_some(&self.konst)
    }

    /// 2^self, materialized exactly when the exponent is small.
    pub fn power2(&self) -> TowerInt {
        if self.terms.is_empty() && self.konst <= BigUint::from(MATERIALIZE_LIMIT) {
            let e = self.konst.to_u64().expect("small exponent") as usize;
            TowerInt::from_biguint(BigUint::one() << e)
        } else {
            TowerInt {
                terms: vec![Term { coeff: BigUint::one(), exp: Box::new(self.clone()) }],
                konst: BigUint::zero(),
            }
        }
    }

    pub fn add(&self, other: &TowerInt) -> TowerInt {
        let mut terms = self.terms.clone();
        for t in &other.terms {
            insert_term(&mut terms, t.clone());
        }
        TowerInt { terms, konst: &self.konst + &other.konst }
    }

    pub fn add_u64(&self, x: u64) -> TowerInt {
        self.add(&TowerInt::from_u64(x))
    }

    pub fn mul(&self, other: &TowerInt) -> TowerInt {
        let mut out = TowerInt::from_biguint(&self.konst * &other.konst);
        for t in &self.terms {
            if !other.konst.is_zero() {
                out = out.add(&TowerInt {
                    terms: vec![Term { coeff: &t.coeff * &other.konst, exp: t.exp.clone() }],
                    konst: BigUint::zero(),
                });
            }
            for u in &other.terms {
                let exp = t.exp.add(&u.exp);
                out = out.add(&TowerInt {
                    terms: vec![Term { coeff: &t.coeff * &u.coeff, exp: Box::new(exp) }],
                    konst: BigUint::zero(),
                });
            }
        }
        for u in &other.terms {
            if !self.konst.is_zero() {
                out = out.add(&TowerInt {
                    terms: vec![Term { coeff: &u.coeff * &self.konst, exp: u.exp.clone() }],
                    konst: BigUint::zero(),
                });
            }
        }
        out
    }

    pub fn mul_u64(&self, x: u64) -> TowerInt {
        self.mul(&TowerInt::from_u64(x))
    }

    fn lower_exp(&self) -> &TowerInt {
        &self.terms[0].exp
    }

    /// An exponent bound with self < 2^(upper_exp).
    fn upper_exp(&self) -> TowerInt {
        if self.terms.is_empty() {
            TowerInt::from_u64(self.konst.bits())
        } else {
            let total: BigUint =
                self.terms.iter().map(|t| t.coeff.clone()).sum::<BigUint>() + &self.konst;
            self.terms[0].exp.add(&TowerInt::from_u64(total.bits()))
        }
    }

    fn without_top(&self) -> TowerInt {
        TowerInt { terms: self.terms[1..].to_vec(), konst: self.konst.clone() }
    }

    fn to_biguint_capped(&self, cap: u64) -> Option<BigUint> {
        let mut out = self.konst.clone();
        for t in &self.terms {
            let e = t.exp.to_biguint_capped(cap)?;
            let e = e.to_u64()?;
            if e > cap {
                return None;
            }
            out += &t.coeff << (e as usize);
        }
        Some(out)
    }

    pub fn try_cmp(&self, other: &TowerInt) -> Result<Ordering, TowerError> {
        match (self.terms.is_empty(), other.terms.is_empty()) {
            (true, true) => Ok(self.konst.cmp(&other.konst)),
            (true, false) => other.cmp_with_exact(&self.konst).map(Ordering::reverse),
            (false, true) => self.cmp_with_exact(&other.konst),
            (false, false) => self.cmp_symbolic(other),
        }
    }

    /// Total comparison; panics on values whose comparison would require
    /// materializing an oversized tower (cannot happen for values built
    /// from the tow/delta recurrences).
    pub fn cmp_value(&self, other: &TowerInt) -> Ordering {
        self.try_cmp(other).expect("tower comparison")
    }

    pub fn eq_value(&self, other: &TowerInt) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }

    pub fn gt(&self, other: &TowerInt) -> bool {
        self.cmp_value(other) == Ordering::Greater
    }

    pub fn ge(&self, other: &TowerInt) -> bool {
        self.cmp_value(other) != Ordering::Less
    }

    /// Comparison against a machine-scale integer; always decidable.
    pub fn cmp_u64(&self, x: u64) -> Ordering {
        self.try_cmp(&TowerInt::from_u64(x)).expect("exact comparison")
    }

    fn cmp_with_exact(&self, x: &BigUint) -> Result<Ordering, TowerError> {
        // self has at least one term
        let xbits = TowerInt::from_u64(x.bits());
        match self.lower_exp().try_cmp(&xbits)? {
            Ordering::Greater | Ordering::Equal => Ok(Ordering::Greater),
            Ordering::Less => {
                // every exponent is below bits(x), so the value materializes
                let v = self.to_biguint_capped(CAP_BITS).ok_or(TowerError::Incomparable)?;
                Ok(v.cmp(x))
            }
        }
    }

    fn cmp_symbolic(&self, other: &TowerInt) -> Result<Ordering, TowerError> {
        if !matches!(self.lower_exp().try_cmp(&other.upper_exp())?, Ordering::Less) {
            return Ok(Ordering::Greater);
        }
        if !matches!(other.lower_exp().try_cmp(&self.upper_exp())?, Ordering::Less) {
            return Ok(Ordering::Less);
        }
        if self.lower_exp().try_cmp(other.lower_exp())? == Ordering::Equal {
            let cx = &self.terms[0].coeff;
            let cy = &other.terms[0].coeff;
            let rx = self.without_top();
            let ry = other.without_top();
            return match cx.cmp(cy) {
                Ordering::Equal => rx.try_cmp(&ry),
                Ordering::Greater => {
                    // surplus >= 2^e dominates ry when e >= upper_exp(ry)
                    if !matches!(self.lower_exp().try_cmp(&ry.upper_exp())?, Ordering::Less) {
                        Ok(Ordering::Greater)
                    } else {
                        self.materialized_cmp(other)
                    }
                }
                Ordering::Less => {
                    if !matches!(other.lower_exp().try_cmp(&rx.upper_exp())?, Ordering::Less) {
                        Ok(Ordering::Less)
                    } else {
                        self.materialized_cmp(other)
                    }
                }
            };
        }
        self.materialized_cmp(other)
    }

    fn materialized_cmp(&self, other: &TowerInt) -> Result<Ordering, TowerError> {
        let a = self.to_biguint_capped(CAP_BITS).ok_or(TowerError::Incomparable)?;
        let b = other.to_biguint_capped(CAP_BITS).ok_or(TowerError::Incomparable)?;
        Ok(a.cmp(&b))
    }
}

fn insert_term(terms: &mut Vec<Term>, t: Term) {
    if t.coeff.is_zero() {
        return;
    }
    for i in 0..terms.len() {
        match terms[i].exp.try_cmp(&t.exp).expect("comparable exponents") {
            Ordering::Equal => {
                terms[i].coeff += t.coeff;
                return;
            }
            Ordering::Less => {
                terms.insert(i, t);
                return;
            }
            Ordering::Greater => {}
        }
    }
    terms.push(t);
}

impl fmt::Display for TowerInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            if self.konst.bits() <= 128 {
                return write!(f, "{}", self.konst);
            }
            return write!(f, "2^{}ish", self.konst.bits() - 1);
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if !t.coeff.is_one() {
                write!(f, "{}*", TowerInt::from_biguint(t.coeff.clone()))?;
            }
            write!(f, "2^({})", t.exp)?;
        }
        if !self.konst.is_zero() {
            write!(f, " + {}", TowerInt::from_biguint(self.konst.clone()))?;
        }
        Ok(())
    }
}

/// tow(0, n) = n, tow(i + 1, n) = 2^tow(i, n).
pub fn tow(i: usize, n: u64) -> TowerInt {
    let mut t = TowerInt::from_u64(n);
    for _ in 0..i {
        t = t.power2();
    }
    t
}

/// The occurrence-bound function: delta(1) = 3p and
/// delta(i + 1) = 2^(2^(delta(i) * 2^(20 q p^2))).
pub fn delta(p: u64, q: u64, i: u64) -> TowerInt {
    assert!(p >= 1 && q >= 1 && i >= 1, "delta requires p, q, i >= 1");
    let scale = tow(1, 20 * q * p * p);
    let mut d = TowerInt::from_u64(3 * p);
    for _ in 1..i {
        d = d.mul(&scale).power2().power2();
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tow_base_cases() {
        assert_eq!(tow(0, 7).to_biguint(), Some(&BigUint::from(7u32)));
        assert_eq!(tow(2, 2).to_biguint(), Some(&BigUint::from(16u32)));
    }

    #[test]
    fn tow_three_three_is_exact_two_to_256() {
        let t = tow(3, 3);
        assert_eq!(t.to_biguint(), Some(&(BigUint::one() << 256usize)));
    }

    #[test]
    fn tow_towers_go_symbolic() {
        let t = tow(5, 2); // 2^(2^65536)
        assert!(!t.is_exact());
        assert_eq!(t.cmp_u64(u64::MAX), Ordering::Greater);
    }

    #[test]
    fn delta_base_case_is_3p() {
        for p in 1..=4 {
            assert!(delta(p, 1, 1).eq_value(&TowerInt::from_u64(3 * p)));
        }
    }

    #[test]
    fn delta_two_exceeds_googol_symbolically() {
        let d = delta(1, 1, 2); // 2^(2^(3 * 2^20))
        assert!(!d.is_exact());
        let googol = BigUint::from(10u32).pow(100);
        assert_eq!(
            d.try_cmp(&TowerInt::from_biguint(googol)).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn delta_is_strictly_increasing() {
        for p in 1..=3 {
            for q in 1..=3 {
                for i in 1..5 {
                    assert!(delta(p, q, i + 1).gt(&delta(p, q, i)), "p={p} q={q} i={i}");
                }
            }
        }
    }

    #[test]
    fn addition_merges_equal_exponents() {
        let a = tow(5, 2);
        let sum = a.add(&a);
        let two_a = a.mul_u64(2);
        assert!(sum.eq_value(&two_a));
        assert!(sum.gt(&a));
    }

    #[test]
    fn coefficient_scaling_orders_correctly() {
        let base = tow(5, 2);
        let small = base.mul_u64(3).add_u64(17);
        let big = base.mul_u64(4);
        assert!(big.gt(&small));
        assert!(small.ge(&base));
    }

    #[test]
    fn exact_vs_symbolic_comparisons() {
        let sym = tow(4, 3); // 2^(2^256), symbolic
        assert!(!sym.is_exact());
        assert_eq!(sym.cmp_u64(0), Ordering::Greater);
        let exact_large = TowerInt::from_biguint(BigUint::one() << 100000usize);
        let t = tow(5, 2); // 2^(2^65536)
        assert_eq!(t.try_cmp(&exact_large).unwrap(), Ordering::Greater);
        assert_eq!(exact_large.try_cmp(&t).unwrap(), Ordering::Less);
    }

    #[test]
    fn mul_distributes_over_materialized_values() {
        let a = TowerInt::from_u64(12).power2(); // 4096
        let b = TowerInt::from_u64(5);
        assert_eq!(a.mul(&b).to_biguint(), Some(&BigUint::from(4096u32 * 5)));
    }

    /// 2 * 2^(2^65536) and 2^(2^65536 + 1) are equal, but deciding that
    /// would require materializing the tower; the comparison must refuse
    /// rather than guess.
    #[test]
    fn near_ties_refuse_instead_of_guessing() {
        let base = tow(4, 2); // 2^65536, exact
        let doubled = base.power2().mul_u64(2);
        let shifted = base.add_u64(1).power2();
        assert_eq!(doubled.try_cmp(&shifted), Err(TowerError::Incomparable));
        // while clearly separated values at the same height still decide
        let tripled = base.power2().mul_u64(3);
        assert_eq!(doubled.try_cmp(&tripled).unwrap(), Ordering::Less);
    }

    #[test]
    fn sums_of_mixed_heights_compare() {
        let big = tow(5, 2); // 2^(2^65536)
        let small = tow(3, 3); // 2^256, exact
        let mixed = big.add(&small); // one symbolic term plus an exact tail
        assert!(mixed.gt(&big));
        assert!(mixed.gt(&small));
        assert_eq!(big.power2().try_cmp(&mixed).unwrap(), Ordering::Greater);
    }
}
