//! Module elements: polynomials in `t` with `CoefPoly` coefficients.
//!
//! The rank-one free modules are `Q[t]` as vector spaces, with the module
//! parameters entering through the coefficients, so a single type covers
//! both symbolic and numeric work: numeric values are simply `TPoly`s whose
//! coefficients are constant.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::coef::{term_string, CoefPoly};
use crate::error::Error;
use crate::rat::{binom, factorial, rat, Rat};

/// Polynomial in `t` over `Q[l, l^-1, a, b]`. No stored coefficient is zero;
/// the zero polynomial stores nothing.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TPoly {
    terms: BTreeMap<u32, CoefPoly>,
}

impl TPoly {
    pub fn zero() -> Self {
        TPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(CoefPoly::one())
    }

    /// The monomial `t^k`.
    pub fn t_pow(k: u32) -> Self {
        Self::term(k, CoefPoly::one())
    }

    /// The variable `t`.
    pub fn t() -> Self {
        Self::t_pow(1)
    }

    pub fn constant(c: CoefPoly) -> Self {
        Self::term(0, c)
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::constant(CoefPoly::from_rat(r))
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_rat(rat(n))
    }

    /// `c * t^k`.
    pub fn term(k: u32, c: CoefPoly) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(k, c);
        }
        p
    }

    /// `t - c` for an integer `c`.
    pub fn t_minus(c: i64) -> Self {
        &Self::t() - &Self::from_i64(c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree in `t`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, k: u32) -> CoefPoly {
        self.terms.get(&k).cloned().unwrap_or_else(CoefPoly::zero)
    }

    /// The constant coefficient; the whole value for a degree-zero input.
    pub fn constant_term(&self) -> CoefPoly {
        self.coeff(0)
    }

    /// `Some(c)` when the polynomial is the constant `c` (possibly zero).
    pub fn as_coef(&self) -> Option<CoefPoly> {
        match self.degree() {
            None => Some(CoefPoly::zero()),
            Some(0) => Some(self.constant_term()),
            Some(_) => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &CoefPoly)> {
        self.terms.iter()
    }

    pub(crate) fn add_term(&mut self, k: u32, c: CoefPoly) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(k) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    o.insert(sum);
                }
            }
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, CoefPoly)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in it {
            p.add_term(k, c);
        }
        p
    }

    pub fn scale(&self, c: &CoefPoly) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        TPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&CoefPoly::from_rat(r.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `f(t - c)` for a constant `c` from the coefficient ring, expanded via
    /// the binomial theorem. This realizes every substitution `t -> t - i`
    /// in the action formulas.
    pub fn shift(&self, c: &CoefPoly) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        // Powers of -c, reused across terms.
        let neg_c = -c;
        let max_k = match self.degree() {
            None => return Self::zero(),
            Some(d) => d,
        };
        let mut c_pows = Vec::with_capacity(max_k as usize + 1);
        c_pows.push(CoefPoly::one());
        for s in 1..=max_k {
            c_pows.push(&c_pows[(s - 1) as usize] * &neg_c);
        }
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            for s in 0..=*k {
                let b = binom(*k as i64, s);
                out.add_term(k - s, v.scale(&b) * c_pows[s as usize].clone());
            }
        }
        out
    }

    /// `f(t - c)` for an integer shift.
    pub fn shift_i64(&self, c: i64) -> Self {
        self.shift(&CoefPoly::from_i64(c))
    }

    /// The `s`-th derivative with respect to `t`; `s = 0` is the identity
    /// and the result is zero once `s` exceeds the degree.
    pub fn derivative(&self, s: u32) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            if *k >= s {
                // k (k-1) ... (k-s+1) = s! * binom(k, s)
                let fall = factorial(s) * binom(*k as i64, s);
                out.add_term(k - s, v.scale(&fall));
            }
        }
        out
    }

    /// Substitutes any subset of `(l, a, b)` in every coefficient.
    pub fn subst(
        &self,
        la: Option<&Rat>,
        al: Option<&Rat>,
        be: Option<&Rat>,
    ) -> Result<TPoly, Error> {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, v.subst(la, al, be)?);
        }
        Ok(out)
    }

    /// Evaluates all three parameters, leaving a polynomial in `t` with
    /// rational (constant) coefficients. Requires `l != 0`.
    pub fn eval_params(&self, la: &Rat, al: &Rat, be: &Rat) -> Result<TPoly, Error> {
        self.subst(Some(la), Some(al), Some(be))
    }

    /// True when every coefficient is a plain rational.
    pub fn is_numeric(&self) -> bool {
        self.terms.values().all(|c| c.as_rat().is_some())
    }

    /// Dense rational coefficient vector `[c_0, ..., c_len-1]`; `None` if
    /// some coefficient is symbolic or the degree exceeds `len - 1`.
    pub fn to_dense_rat(&self, len: usize) -> Option<Vec<Rat>> {
        let mut v = vec![Rat::zero(); len];
        for (k, c) in &self.terms {
            let slot = v.get_mut(*k as usize)?;
            *slot = c.as_rat()?;
        }
        Some(v)
    }
}

impl Add for &TPoly {
    type Output = TPoly;
    fn add(self, rhs: &TPoly) -> TPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl Sub for &TPoly {
    type Output = TPoly;
    fn sub(self, rhs: &TPoly) -> TPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, -v);
        }
        out
    }
}

impl Neg for &TPoly {
    type Output = TPoly;
    fn neg(self) -> TPoly {
        TPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

impl Mul for &TPoly {
    type Output = TPoly;
    fn mul(self, rhs: &TPoly) -> TPoly {
        let mut out = TPoly::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                out.add_term(ka + kb, va * vb);
            }
        }
        out
    }
}

macro_rules! forward_owned_binop {
    ($t:ty, $trait:ident, $method:ident) => {
        impl $trait for $t {
            type Output = $t;
            fn $method(self, rhs: $t) -> $t {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned_binop!(TPoly, Add, add);
forward_owned_binop!(TPoly, Sub, sub);
forward_owned_binop!(TPoly, Mul, mul);

impl Neg for TPoly {
    type Output = TPoly;
    fn neg(self) -> TPoly {
        -&self
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut rendered = Vec::new();
        for (k, v) in self.terms.iter().rev() {
            let t_factor = if *k == 0 {
                String::new()
            } else {
                format!("t^{k}")
            };
            for (e, c) in v.iter().rev() {
                let mut factors = crate::coef::factors_string(e);
                if !t_factor.is_empty() {
                    if !factors.is_empty() {
                        factors.push('*');
                    }
                    factors.push_str(&t_factor);
                }
                rendered.push(term_string(c, &factors));
            }
        }
        write!(f, "{}", rendered.join(" + "))
    }
}

impl std::str::FromStr for TPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::parse::parse_tpoly(s)
    }
}

/// `Some(e)` if the poly is exactly the monomial `t^e` (unit coefficient).
impl TPoly {
    pub fn as_t_power(&self) -> Option<u32> {
        if self.terms.len() != 1 {
            return None;
        }
        let (k, c) = self.terms.iter().next().unwrap();
        if c.is_one() {
            Some(*k)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::frac;

    #[test]
    fn shift_expands_binomially() {
        // (t - 1)^2 = t^2 - 2t + 1 via shifting t^2 by 1.
        let p = TPoly::t_pow(2).shift_i64(1);
        let expect = TPoly::from_terms([
            (2, CoefPoly::one()),
            (1, CoefPoly::from_i64(-2)),
            (0, CoefPoly::one()),
        ]);
        assert_eq!(p, expect);
    }

    #[test]
    fn shift_identity_and_inverse() {
        let f = &TPoly::t_pow(3) + &TPoly::t().scale(&CoefPoly::beta());
        assert_eq!(f.shift_i64(0), f);
        // Shifting by i then -i restores the polynomial; i = 2 on t^3.
        assert_eq!(TPoly::t_pow(3).shift_i64(2).shift_i64(-2), TPoly::t_pow(3));
    }

    #[test]
    fn shift_by_symbolic_constant() {
        // t^2 shifted by a: t^2 - 2at + a^2.
        let p = TPoly::t_pow(2).shift(&CoefPoly::alpha());
        assert_eq!(p.coeff(1), CoefPoly::alpha().scale(&rat(-2)));
        assert_eq!(p.coeff(0), CoefPoly::alpha().pow(2));
    }

    #[test]
    fn derivative_values() {
        assert_eq!(
            TPoly::t_pow(3).derivative(1),
            TPoly::t_pow(2).scale_rat(&rat(3))
        );
        assert_eq!(TPoly::t_pow(3).derivative(4), TPoly::zero());
        assert_eq!(TPoly::t_pow(3).derivative(0), TPoly::t_pow(3));
        // Leading coefficient of (t^5)'' is 5!/3! = 20.
        assert_eq!(
            TPoly::t_pow(5).derivative(2),
            TPoly::t_pow(3).scale_rat(&rat(20))
        );
    }

    #[test]
    fn eval_params_example() {
        // l^2*b*t - a*b^2 at (1/2, 1, 4) -> t - 16.
        let p = &TPoly::t().scale(&(&CoefPoly::lambda_pow(2) * &CoefPoly::beta()))
            - &TPoly::constant(&CoefPoly::alpha() * &CoefPoly::beta_pow(2));
        let v = p.eval_params(&frac(1, 2), &rat(1), &rat(4)).unwrap();
        assert_eq!(v, &TPoly::t() - &TPoly::from_i64(16));
    }

    #[test]
    fn display_order_and_forms() {
        // b*t + -1*a*b^2 (descending t first, then coefficient order).
        let p = &TPoly::t().scale(&CoefPoly::beta())
            - &TPoly::constant(&CoefPoly::alpha() * &CoefPoly::beta_pow(2));
        assert_eq!(p.to_string(), "b*t^1 + -1*a*b^2");
        assert_eq!(TPoly::zero().to_string(), "0");
        assert_eq!(TPoly::t_pow(2).to_string(), "t^2");
        assert_eq!(TPoly::from_i64(-3).to_string(), "-3");
    }
}
