//! The coefficient ring `Q[l, l^-1, a, b]`: sparse polynomials in the module
//! parameters, Laurent in `l` (the basis action scales by `l^i` with `i` of
//! either sign) and ordinary in `a`, `b`.
//!
//! Terms live in a map keyed by the exponent triple, so the canonical
//! serialization order (strictly descending lexicographic on `(e_l, e_a,
//! e_b)`) is the reverse of the map order. No zero coefficient is ever
//! stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::Error;
use crate::rat::{rat_pow, rat_to_string, Rat};

/// Exponent triple of one monomial `l^la * a^al * b^be`. Only `la` may be
/// negative.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Exps {
    pub la: i64,
    pub al: u32,
    pub be: u32,
}

impl Exps {
    pub const CONST: Exps = Exps {
        la: 0,
        al: 0,
        be: 0,
    };

    fn mul(self, other: Exps) -> Exps {
        Exps {
            la: self.la + other.la,
            al: self.al + other.al,
            be: self.be + other.be,
        }
    }
}

/// Element of `Q[l, l^-1, a, b]`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CoefPoly {
    terms: BTreeMap<Exps, Rat>,
}

impl CoefPoly {
    pub fn zero() -> Self {
        CoefPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        let mut p = Self::zero();
        if !r.is_zero() {
            p.terms.insert(Exps::CONST, r);
        }
        p
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_rat(crate::rat::rat(n))
    }

    /// The monomial `c * l^la * a^al * b^be`.
    pub fn monomial(exps: Exps, coeff: Rat) -> Self {
        let mut p = Self::zero();
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        p
    }

    /// `l^i`, any integer `i`.
    pub fn lambda_pow(i: i64) -> Self {
        Self::monomial(
            Exps {
                la: i,
                al: 0,
                be: 0,
            },
            Rat::one(),
        )
    }

    pub fn alpha() -> Self {
        Self::monomial(
            Exps {
                la: 0,
                al: 1,
                be: 0,
            },
            Rat::one(),
        )
    }

    pub fn beta() -> Self {
        Self::monomial(
            Exps {
                la: 0,
                al: 0,
                be: 1,
            },
            Rat::one(),
        )
    }

    /// `b^e` for nonnegative `e`.
    pub fn beta_pow(e: u32) -> Self {
        Self::monomial(
            Exps {
                la: 0,
                al: 0,
                be: e,
            },
            Rat::one(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rat().map(|r| r.is_one()).unwrap_or(false)
    }

    /// The value as a plain rational when the polynomial is constant.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Exps::CONST) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn coeff(&self, exps: Exps) -> Rat {
        self.terms.get(&exps).cloned().unwrap_or_else(Rat::zero)
    }

    /// Terms in ascending map order; callers wanting the canonical descending
    /// order should reverse.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&Exps, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, exps: Exps, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    o.insert(sum);
                }
            }
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Exps, Rat)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        CoefPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c * r)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes any subset of the three parameters, leaving the others
    /// symbolic. Substituting `l = 0` is rejected because `l` is invertible.
    pub fn subst(
        &self,
        la: Option<&Rat>,
        al: Option<&Rat>,
        be: Option<&Rat>,
    ) -> Result<CoefPoly, Error> {
        if let Some(v) = la {
            if v.is_zero() {
                return Err(Error::ZeroLambda);
            }
        }
        let mut out = CoefPoly::zero();
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = *e;
            if let Some(v) = la {
                coeff *= rat_pow(v, e.la);
                exps.la = 0;
            }
            if let Some(v) = al {
                coeff *= rat_pow(v, e.al as i64);
                exps.al = 0;
            }
            if let Some(v) = be {
                coeff *= rat_pow(v, e.be as i64);
                exps.be = 0;
            }
            out.add_term(exps, coeff);
        }
        Ok(out)
    }

    /// Full evaluation at numeric `(l, a, b)`; requires `l != 0`.
    pub fn eval_params(&self, la: &Rat, al: &Rat, be: &Rat) -> Result<Rat, Error> {
        let p = self.subst(Some(la), Some(al), Some(be))?;
        Ok(p.as_rat().expect("fully substituted"))
    }

    /// Exact division by `a`; `None` when some term has no factor of `a`.
    pub fn div_alpha(&self) -> Option<CoefPoly> {
        let mut out = CoefPoly::zero();
        for (e, c) in &self.terms {
            if e.al == 0 {
                return None;
            }
            out.add_term(
                Exps {
                    la: e.la,
                    al: e.al - 1,
                    be: e.be,
                },
                c.clone(),
            );
        }
        Some(out)
    }

    /// Maximum degree in `a`, for genericity-condition bookkeeping.
    pub fn alpha_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.al).max()
    }

    /// True when every exponent of `l` and `b` is zero, i.e. the value lies
    /// in `Q[a]`.
    pub fn is_alpha_only(&self) -> bool {
        self.terms.keys().all(|e| e.la == 0 && e.be == 0)
    }

    /// Divides out the rational content and fixes the sign of the leading
    /// (canonically first) coefficient to be positive. Used to normalize
    /// recorded genericity conditions.
    pub fn normalized_primitive(&self) -> CoefPoly {
        if self.is_zero() {
            return CoefPoly::zero();
        }
        use num_bigint::BigInt;
        use num_integer::Integer as _;
        let mut num_gcd = num_bigint::BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut factor = Rat::new(den_lcm, num_gcd);
        let lead = self.terms.iter().next_back().expect("nonzero").1;
        if (lead * &factor) < Rat::zero() {
            factor = -factor;
        }
        self.scale(&factor)
    }
}

impl Add for &CoefPoly {
    type Output = CoefPoly;
    fn add(self, rhs: &CoefPoly) -> CoefPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &CoefPoly {
    type Output = CoefPoly;
    fn sub(self, rhs: &CoefPoly) -> CoefPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Neg for &CoefPoly {
    type Output = CoefPoly;
    fn neg(self) -> CoefPoly {
        CoefPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Mul for &CoefPoly {
    type Output = CoefPoly;
    fn mul(self, rhs: &CoefPoly) -> CoefPoly {
        let mut out = CoefPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.mul(*eb), ca * cb);
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
forward_owned_binop!(CoefPoly, Add, add);
forward_owned_binop!(CoefPoly, Sub, sub);
forward_owned_binop!(CoefPoly, Mul, mul);

impl Neg for CoefPoly {
    type Output = CoefPoly;
    fn neg(self) -> CoefPoly {
        -&self
    }
}

/// Renders one monomial's factor list (without the coefficient); empty for
/// the constant monomial. Exponent 1 is omitted on the parameter variables.
pub(crate) fn factors_string(e: &Exps) -> String {
    let mut parts = Vec::new();
    if e.la != 0 {
        parts.push(if e.la == 1 {
            "l".to_string()
        } else {
            format!("l^{}", e.la)
        });
    }
    if e.al != 0 {
        parts.push(if e.al == 1 {
            "a".to_string()
        } else {
            format!("a^{}", e.al)
        });
    }
    if e.be != 0 {
        parts.push(if e.be == 1 {
            "b".to_string()
        } else {
            format!("b^{}", e.be)
        });
    }
    parts.join("*")
}

/// Shared by `CoefPoly` and `TPoly` display: one canonical term, given the
/// coefficient and a (possibly empty) factor string. A unit coefficient is
/// omitted before factors; `-1` keeps its sign explicit as `-1*`.
pub(crate) fn term_string(coeff: &Rat, factors: &str) -> String {
    if factors.is_empty() {
        rat_to_string(coeff)
    } else if coeff.is_one() {
        factors.to_string()
    } else {
        format!("{}*{}", rat_to_string(coeff), factors)
    }
}

impl fmt::Display for CoefPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| term_string(c, &factors_string(e)))
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

impl std::str::FromStr for CoefPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: crate::tpoly::TPoly = s.parse()?;
        match t.as_coef() {
            Some(c) => Ok(c),
            None => Err(Error::Parse(format!(
                "`{s}` involves t, not a pure coefficient"
            ))),
        }
    }
}
