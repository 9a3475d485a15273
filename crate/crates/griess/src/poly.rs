//! Sparse multivariate Laurent polynomials over the rationals.
//!
//! Exponents may be negative per variable; this houses the coordinate poles
//! `z_i^{-k}` that show up in component coefficients.  Terms are kept in a
//! `BTreeMap` so iteration order, and hence every derived computation, is
//! deterministic.

use crate::error::{Error, Result};
use crate::rat::{binomial, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector; `expo[i]` is the power of `z_{i+1}`.
pub type Expo = Vec<i32>;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Expo, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rat::from_integer(1.into()))
    }

    /// Single term `c * z^expo`.
    pub fn monomial(nvars: usize, expo: Expo, c: Rat) -> Self {
        assert_eq!(expo.len(), nvars);
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(expo, c);
        }
        p
    }

    /// The variable `z_{i+1}` (0-based index).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(nvars, e, Rat::from_integer(1.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, expo: Expo, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(expo) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get_mut();
                *v += c;
                if v.is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Poly {
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c = -c.clone();
        }
        r
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut r = self.clone();
        for v in r.terms.values_mut() {
            *v *= c;
        }
        r
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut r = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Expo = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    /// Multiply by the monomial `z^expo` (entries may be negative).
    pub fn mul_monomial(&self, expo: &[i32], c: &Rat) -> Poly {
        assert_eq!(expo.len(), self.nvars);
        let mut r = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            let ne: Expo = e.iter().zip(expo).map(|(a, b)| a + b).collect();
            r.add_term(ne, v * c);
        }
        r
    }

    /// `(z_i - z_j)` as a polynomial, `i != j`, 0-based.
    pub fn diag(nvars: usize, i: usize, j: usize) -> Poly {
        let mut p = Poly::zero(nvars);
        let mut e = vec![0; nvars];
        e[i] = 1;
        p.add_term(e, Rat::from_integer(1.into()));
        let mut e = vec![0; nvars];
        e[j] = 1;
        p.add_term(e, Rat::from_integer((-1).into()));
        p
    }

    /// Partial derivative with respect to variable `i` (0-based), Laurent rule.
    pub fn diff(&self, i: usize) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            r.add_term(ne, c * Rat::from_integer(e[i].into()));
        }
        r
    }

    /// Total degree of each term must agree; returns it, or None for 0 or
    /// inhomogeneous input.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut deg = None;
        for e in self.terms.keys() {
            let d: i64 = e.iter().map(|&x| x as i64).sum();
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Minimal exponent of variable `i` over all terms (0 for the zero poly).
    pub fn min_exponent(&self, i: usize) -> i32 {
        self.terms.keys().map(|e| e[i]).min().unwrap_or(0)
    }

    /// Renames variables: term exponent `e` moves to position `sigma[k]`,
    /// realizing `p(z_{sigma(1)}, ..., z_{sigma(l)})` — see `RatFun::permute`.
    pub fn permute_vars(&self, sigma: &[usize]) -> Poly {
        assert_eq!(sigma.len(), self.nvars);
        let mut r = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; self.nvars];
            for (k, &ex) in e.iter().enumerate() {
                ne[sigma[k]] = ex;
            }
            r.add_term(ne, c.clone());
        }
        r
    }

    /// Extends to `new_nvars` variables; existing exponents keep positions.
    pub fn extend_vars(&self, new_nvars: usize) -> Poly {
        assert!(new_nvars >= self.nvars);
        let mut r = Poly::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne.resize(new_nvars, 0);
            r.add_term(ne, c.clone());
        }
        r
    }

    /// Removes variable `i`, which must not occur in any term.
    pub fn remove_var(&self, i: usize) -> Result<Poly> {
        let mut r = Poly::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            if e[i] != 0 {
                return Err(Error::Internal(format!(
                    "removing live variable z{}",
                    i + 1
                )));
            }
            let mut ne = e.clone();
            ne.remove(i);
            r.add_term(ne, c.clone());
        }
        Ok(r)
    }

    /// Substitute `z_i -> -z_i`-style sign maps are not needed; but inversion
    /// `z_i -> 1/z_i` for all variables is: every exponent is negated.
    pub fn invert_all_vars(&self) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let ne: Expo = e.iter().map(|&x| -x).collect();
            r.add_term(ne, c.clone());
        }
        r
    }

    /// Exact division by `(z_i - z_j)` in the Laurent ring; None if not
    /// divisible.  Divisibility is unchanged by clearing the monomial
    /// content, since each `z_k` is a unit coprime to `z_i - z_j`.
    pub fn div_diag(&self, i: usize, j: usize) -> Option<Poly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        // Clear negative exponents.
        let shift: Expo = (0..self.nvars)
            .map(|k| -self.min_exponent(k).min(0))
            .collect();
        let cleared = self.mul_monomial(&shift, &Rat::from_integer(1.into()));
        // Synthetic division viewing `cleared` as a polynomial in z_i with
        // coefficients in the remaining variables: substitute z_i = z_j into
        // a Horner scheme.  deg_i is bounded, exponents of z_i all >= 0.
        let deg_i = cleared.terms.keys().map(|e| e[i]).max().unwrap_or(0);
        // coeffs[d] = coefficient of z_i^d, a Poly in all vars with e[i]=0.
        let mut coeffs: Vec<Poly> = vec![Poly::zero(self.nvars); (deg_i + 1) as usize];
        for (e, c) in &cleared.terms {
            let d = e[i] as usize;
            let mut ne = e.clone();
            ne[i] = 0;
            coeffs[d].add_term(ne, c.clone());
        }
        // p = q*(z_i - z_j) + r with r = p|_{z_i=z_j}; compute q by Horner.
        let mut quotient: Vec<Poly> = vec![Poly::zero(self.nvars); deg_i.max(1) as usize];
        let mut carry = Poly::zero(self.nvars);
        for d in (1..=deg_i as usize).rev() {
            let qd = coeffs[d].add(&carry);
            // carry into d-1: z_j * q_{d-1-term}
            let mut zj = vec![0; self.nvars];
            zj[j] = 1;
            carry = qd.mul_monomial(&zj, &Rat::from_integer(1.into()));
            quotient[d - 1] = qd;
        }
        let remainder = coeffs[0].add(&carry);
        if !remainder.is_zero() {
            return None;
        }
        let mut q = Poly::zero(self.nvars);
        for (d, qd) in quotient.iter().enumerate() {
            let mut zi = vec![0; self.nvars];
            zi[i] = d as i32;
            q = q.add(&qd.mul_monomial(&zi, &Rat::from_integer(1.into())));
        }
        // Undo the clearing shift.
        let unshift: Expo = shift.iter().map(|&s| -s).collect();
        Some(q.mul_monomial(&unshift, &Rat::from_integer(1.into())))
    }

    /// Evaluate at a rational point; fails on a zero coordinate with a
    /// negative exponent.
    pub fn eval(&self, point: &[Rat]) -> Result<Rat> {
        assert_eq!(point.len(), self.nvars);
        let mut total = Rat::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (k, &ex) in e.iter().enumerate() {
                if ex == 0 {
                    continue;
                }
                if point[k].is_zero() && ex < 0 {
                    return Err(Error::Internal("pole at evaluation point".into()));
                }
                let p = pow_rat(&point[k], ex);
                v *= p;
            }
            total += v;
        }
        Ok(total)
    }
}

/// `b^e` for integer `e` (negative allowed, `b != 0`).
pub fn pow_rat(b: &Rat, e: i32) -> Rat {
    let mut r = Rat::from_integer(1.into());
    let pos = b.clone();
    let base = if e >= 0 { pos } else { b.recip() };
    for _ in 0..e.unsigned_abs() {
        r *= base.clone();
    }
    r
}

/// Truncated power series in one formal parameter `t` with `Poly`
/// coefficients: `sum_{k=0..=order} coeff[k] t^k`, everything above `order`
/// dropped.
#[derive(Clone)]
pub struct TruncSeries {
    pub order: i32,
    pub coeffs: Vec<Poly>,
}

impl TruncSeries {
    pub fn constant(nvars: usize, order: i32, p: Poly) -> Self {
        let mut coeffs = vec![Poly::zero(nvars); (order + 1) as usize];
        if order >= 0 {
            coeffs[0] = p;
        }
        TruncSeries { order, coeffs }
    }

    /// `(u + t)^k` truncated, where `u` is a unit in the target ring and
    /// `u_pow(m)` supplies `u^m` for `m <= k`.
    pub fn binomial_expand<F>(nvars: usize, order: i32, k: i64, u_pow: F) -> Self
    where
        F: Fn(i64) -> Poly,
    {
        let mut coeffs = vec![Poly::zero(nvars); (order.max(0) + 1) as usize];
        let smax = if k >= 0 {
            (k as i32).min(order)
        } else {
            order
        };
        for s in 0..=smax.max(-1) {
            let b = binomial(k, s as u32);
            coeffs[s as usize] = u_pow(k - s as i64).scale(&b);
        }
        TruncSeries {
            order: order.max(0),
            coeffs,
        }
    }

    pub fn mul(&self, other: &TruncSeries, nvars: usize) -> TruncSeries {
        let order = self.order.min(other.order);
        let mut coeffs = vec![Poly::zero(nvars); (order + 1) as usize];
        for (a, pa) in self.coeffs.iter().enumerate().take(order as usize + 1) {
            if pa.is_zero() {
                continue;
            }
            for (b, pb) in other.coeffs.iter().enumerate() {
                if a + b > order as usize {
                    break;
                }
                coeffs[a + b] = coeffs[a + b].add(&pa.mul(pb));
            }
        }
        TruncSeries { order, coeffs }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", crate::rat::format_rat(c))?;
            for (k, &ex) in e.iter().enumerate() {
                if ex != 0 {
                    write!(f, "*z{}^{}", k + 1, ex)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn div_diag_exact_and_inexact() {
        // (z1 - z2)^2 / (z1 - z2) = z1 - z2
        let d = Poly::diag(2, 0, 1);
        let sq = d.mul(&d);
        assert_eq!(sq.div_diag(0, 1).unwrap(), d);
        // z1 not divisible by z1 - z2
        assert!(Poly::var(2, 0).div_diag(0, 1).is_none());
        // Laurent: z1^{-1} - z2^{-1} = -(z1 - z2) z1^{-1} z2^{-1}
        let mut p = Poly::zero(2);
        p.add_term(vec![-1, 0], rat(1));
        p.add_term(vec![0, -1], rat(-1));
        let q = p.div_diag(0, 1).unwrap();
        let expect = Poly::monomial(2, vec![-1, -1], rat(-1));
        assert_eq!(q, expect);
    }

    #[test]
    fn diff_laurent() {
        // d/dz1 of z1^{-4} = -4 z1^{-5}
        let p = Poly::monomial(1, vec![-4], rat(1));
        assert_eq!(p.diff(0), Poly::monomial(1, vec![-5], rat(-4)));
    }

    #[test]
    fn homogeneous_degree_detects() {
        let d = Poly::diag(2, 0, 1);
        assert_eq!(d.homogeneous_degree(), Some(1));
        let mix = d.add(&Poly::one(2));
        assert_eq!(mix.homogeneous_degree(), None);
        assert_eq!(Poly::zero(2).homogeneous_degree(), None);
    }
}
