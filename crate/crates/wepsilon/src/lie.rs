//! The Lie algebras `W(eps)`: basis symbols `L[i,m]` with `i` any integer and
//! `m >= 0`, rational linear combinations, and the bracket
//!
//! ```text
//! [L[i,m], L[j,n]] = (j-i) L[i+j, m+n] + eps (m-n) L[i+j, m+n-eps]
//! ```
//!
//! For `eps = +1` the second summand formally points at `m+n-1`, which is
//! negative only when `m = n = 0`; its coefficient `m-n` vanishes there, and
//! the implementation drops zero summands before forming the index. That
//! ordering is what makes the bracket well-formed, so it is asserted, not
//! assumed.
//!
//! The `m = 0` slice is a copy of the centerless Virasoro algebra, and
//! `{L[i,0], L[i,1]}` generates everything; `generator_decomposition`
//! exhibits the (fixed, deterministic) bracket words.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::rat::{frac, rat, rat_to_string, Rat};

/// The sign parameter of the family; the two algebras are genuinely
/// different (for `eps = -1` brackets raise the second index).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn value(self) -> i64 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Epsilon::Plus),
            -1 => Some(Epsilon::Minus),
            _ => None,
        }
    }

    pub const BOTH: [Epsilon; 2] = [Epsilon::Plus, Epsilon::Minus];
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Plus => write!(f, "+1"),
            Epsilon::Minus => write!(f, "-1"),
        }
    }
}

/// Finite rational linear combination of basis symbols `L[i,m]`. No stored
/// coefficient is zero.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LieElt {
    terms: BTreeMap<(i64, u32), Rat>,
}

impl LieElt {
    pub fn zero() -> Self {
        LieElt {
            terms: BTreeMap::new(),
        }
    }

    /// The basis symbol `L[i,m]`.
    pub fn basis(i: i64, m: u32) -> Self {
        let mut e = Self::zero();
        e.terms.insert((i, m), Rat::one());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: i64, m: u32) -> Rat {
        self.terms.get(&(i, m)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&(i64, u32), &Rat)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, i: i64, m: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((i, m)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    o.insert(sum);
                }
            }
        }
    }

    pub fn add(&self, other: &LieElt) -> LieElt {
        let mut out = self.clone();
        for ((i, m), c) in &other.terms {
            out.add_term(*i, *m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LieElt) -> LieElt {
        let mut out = self.clone();
        for ((i, m), c) in &other.terms {
            out.add_term(*i, *m, -c.clone());
        }
        out
    }

    pub fn scale(&self, r: &Rat) -> LieElt {
        if r.is_zero() {
            return LieElt::zero();
        }
        LieElt {
            terms: self.terms.iter().map(|(k, c)| (*k, c * r)).collect(),
        }
    }
}

impl fmt::Display for LieElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|((i, m), c)| {
                if c.is_one() {
                    format!("L[{i},{m}]")
                } else {
                    format!("{}*L[{i},{m}]", rat_to_string(c))
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

/// The bracket of `W(eps)`, extended bilinearly from the basis rule. A
/// summand whose coefficient vanishes is dropped before its index is formed;
/// a nonzero summand with a negative second index would indicate a bug in
/// the structure constants and panics.
pub fn bracket(eps: Epsilon, x: &LieElt, y: &LieElt) -> LieElt {
    let ev = eps.value();
    let mut out = LieElt::zero();
    for ((i, m), cx) in x.iter() {
        for ((j, n), cy) in y.iter() {
            let c = cx * cy;
            let first = rat(j - i) * &c;
            if !first.is_zero() {
                out.add_term(i + j, m + n, first);
            }
            let struct_c = ev * (*m as i64 - *n as i64);
            if struct_c != 0 {
                let idx = *m as i64 + *n as i64 - ev;
                assert!(
                    idx >= 0,
                    "nonzero bracket term with negative second index at ({i},{m}),({j},{n})"
                );
                out.add_term(i + j, idx as u32, rat(struct_c) * &c);
            }
        }
    }
    out
}

/// Expression tree over the generators `L[j,0]`, `L[j,1]` with bracket,
/// scaling, and sum nodes. Evaluating under `bracket` reproduces the target
/// basis symbol exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenExpr {
    /// A generator leaf; `m` is 0 or 1.
    Gen {
        i: i64,
        m: u32,
    },
    Scale(Rat, Box<GenExpr>),
    Sum(Box<GenExpr>, Box<GenExpr>),
    Bracket(Box<GenExpr>, Box<GenExpr>),
}

impl GenExpr {
    pub fn eval(&self, eps: Epsilon) -> LieElt {
        match self {
            GenExpr::Gen { i, m } => LieElt::basis(*i, *m),
            GenExpr::Scale(r, e) => e.eval(eps).scale(r),
            GenExpr::Sum(a, b) => a.eval(eps).add(&b.eval(eps)),
            GenExpr::Bracket(a, b) => bracket(eps, &a.eval(eps), &b.eval(eps)),
        }
    }
}

fn gen(i: i64, m: u32) -> GenExpr {
    GenExpr::Gen { i, m }
}

fn scale(r: Rat, e: GenExpr) -> GenExpr {
    GenExpr::Scale(r, Box::new(e))
}

fn sum(a: GenExpr, b: GenExpr) -> GenExpr {
    GenExpr::Sum(Box::new(a), Box::new(b))
}

fn br(a: GenExpr, b: GenExpr) -> GenExpr {
    GenExpr::Bracket(Box::new(a), Box::new(b))
}

/// Writes `L[i,m]` as a bracket word in the generators `{L[j,0], L[j,1]}`.
///
/// The routes are fixed so the output is deterministic:
///
/// * `eps = +1`, `i != 0`: `[L[0,1], L[i,m-1]] = i L[i,m] + (2-m) L[i,m-1]`,
///   solved for `L[i,m]`.
/// * `eps = +1`, `i = 0`, `m >= 2`: route through the nonzero indices -1 and
///   +1 via `[L[-1,0], L[1,m]] = 2 L[0,m] - m L[0,m-1]`.
/// * `eps = -1`: `[L[0,m-1], L[i,0]] = i L[i,m-1] - (m-1) L[i,m]`, solved
///   for `L[i,m]`; this works for every `i`, including 0.
pub fn generator_decomposition(eps: Epsilon, i: i64, m: u32) -> GenExpr {
    if m <= 1 {
        return gen(i, m);
    }
    match eps {
        Epsilon::Plus => {
            if i != 0 {
                // i L[i,m] = [L[0,1], L[i,m-1]] - (2-m) L[i,m-1]
                let prev = generator_decomposition(eps, i, m - 1);
                let word = sum(br(gen(0, 1), prev.clone()), scale(rat(m as i64 - 2), prev));
                scale(frac(1, i), word)
            } else {
                // 2 L[0,m] = [L[-1,0], L[1,m]] + m L[0,m-1]
                let side = generator_decomposition(eps, 1, m);
                let lower = generator_decomposition(eps, 0, m - 1);
                sum(
                    scale(frac(1, 2), br(gen(-1, 0), side)),
                    scale(frac(m as i64, 2), lower),
                )
            }
        }
        Epsilon::Minus => {
            // (m-1) L[i,m] = i L[i,m-1] - [L[0,m-1], L[i,0]]
            let prev = generator_decomposition(eps, i, m - 1);
            let head = generator_decomposition(eps, 0, m - 1);
            let word = sum(scale(rat(i), prev), scale(rat(-1), br(head, gen(i, 0))));
            scale(frac(1, m as i64 - 1), word)
        }
    }
}
