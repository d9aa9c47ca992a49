//! The rank-one free module families over `W(eps)`.
//!
//! All three actions below make `Q[t]` a module with `L[0,0]` acting as
//! multiplication by `t`:
//!
//! * the Virasoro action `L[i] . t^k = l^i (t - i a)(t - i)^k`, which is the
//!   `m = 0` slice of both families;
//! * the `eps = +1` family,
//!   `L[i,m] . t^k = sum_s s! C(m,s) C(k,s) l^i b^(m-s-1) ((m-s)a - iab + bt) (t-i)^(k-s)`,
//!   where the bracketed factor is stored termwise as
//!   `(m-s) a b^(m-s-1) - i a b^(m-s) + b^(m-s) t` with the first term
//!   omitted at `s = m`, so no negative power of `b` ever exists and `b = 0`
//!   needs no special path;
//! * the `eps = -1` family,
//!   `L[i,m] . t^k = sum_s (-1)^s s! C(m+s-1,s) C(k,s) l^i b^(m+s) (t - ia - (m+s)ab) (t-i)^(k-s)`,
//!   whose binomial conventions (`C(-1,0) = 1`, `C(n-1,n) = 0`) come for
//!   free from the falling-factorial definition of `binom`, together with
//!   its equivalent derivative form.
//!
//! Everything is computed symbolically in `(l, a, b)`; numeric parameters
//! are applied by exact evaluation at the end, so both modes share one code
//! path.

use crate::coef::CoefPoly;
use crate::error::Error;
use crate::lie::{Epsilon, LieElt};
use crate::rat::{binom, factorial, rat, Rat};
use crate::report::{CheckRecord, GridPoint, VerificationReport, Window};
use crate::tpoly::TPoly;

/// Module family parameters: the sign `eps` together with symbolic or
/// numeric `(lambda, alpha, beta)`. Numeric `lambda` is never zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleParams {
    pub epsilon: Epsilon,
    pub values: ParamValues,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamValues {
    Symbolic,
    Numeric { lambda: Rat, alpha: Rat, beta: Rat },
}

impl ModuleParams {
    pub fn symbolic(epsilon: Epsilon) -> Self {
        ModuleParams {
            epsilon,
            values: ParamValues::Symbolic,
        }
    }

    /// Numeric parameters; `lambda = 0` is rejected.
    pub fn numeric(epsilon: Epsilon, lambda: Rat, alpha: Rat, beta: Rat) -> Result<Self, Error> {
        use num_traits::Zero;
        if lambda.is_zero() {
            return Err(Error::ZeroLambda);
        }
        Ok(ModuleParams {
            epsilon,
            values: ParamValues::Numeric {
                lambda,
                alpha,
                beta,
            },
        })
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.values, ParamValues::Symbolic)
    }

    /// Applies numeric parameters to a symbolically computed value; the
    /// identity in symbolic mode.
    fn apply(&self, p: TPoly) -> TPoly {
        match &self.values {
            ParamValues::Symbolic => p,
            ParamValues::Numeric {
                lambda,
                alpha,
                beta,
            } => p
                .eval_params(lambda, alpha, beta)
                .expect("lambda nonzero by construction"),
        }
    }
}

/// `(t - i)^p`.
fn t_minus_i_pow(i: i64, p: u32) -> TPoly {
    TPoly::t_minus(i).pow(p)
}

/// Virasoro action on the monomial `t^k`, symbolic.
fn vir_monomial(i: i64, k: u32) -> TPoly {
    let prefix = &TPoly::t() - &TPoly::constant(CoefPoly::alpha().scale(&rat(i)));
    let shifted = t_minus_i_pow(i, k);
    (&prefix * &shifted).scale(&CoefPoly::lambda_pow(i))
}

/// `eps = +1` action on `t^k`, symbolic, with the bracketed factor expanded
/// termwise (the `m - s = 0` term of the expansion is simply absent).
fn w1_monomial(i: i64, m: u32, k: u32) -> TPoly {
    let mut acc = TPoly::zero();
    for s in 0..=m.min(k) {
        let c = factorial(s) * binom(m as i64, s) * binom(k as i64, s);
        let d = m - s;
        let mut bracketed = TPoly::term(1, CoefPoly::beta_pow(d));
        let mut const_part = CoefPoly::alpha().scale(&rat(-i)) * CoefPoly::beta_pow(d);
        if d >= 1 {
            const_part = &const_part
                + &(CoefPoly::alpha().scale(&rat(d as i64)) * CoefPoly::beta_pow(d - 1));
        }
        bracketed.add_term(0, const_part);
        acc = &acc + &(&bracketed * &t_minus_i_pow(i, k - s)).scale_rat(&c);
    }
    acc.scale(&CoefPoly::lambda_pow(i))
}

/// `eps = -1` action on `t^k`, symbolic.
fn wm1_monomial(i: i64, m: u32, k: u32) -> TPoly {
    let mut acc = TPoly::zero();
    for s in 0..=k {
        use num_traits::Zero;
        let mut c = factorial(s) * binom(m as i64 + s as i64 - 1, s) * binom(k as i64, s);
        if c.is_zero() {
            continue;
        }
        if s % 2 == 1 {
            c = -c;
        }
        // b^(m+s) (t - i a - (m+s) a b)
        let ms = m + s;
        let const_part = &CoefPoly::alpha().scale(&rat(-i))
            - &(&CoefPoly::alpha() * &CoefPoly::beta()).scale(&rat(ms as i64));
        let linear = TPoly::from_terms([(1, CoefPoly::one()), (0, const_part)]);
        let term =
            (&linear.scale(&CoefPoly::beta_pow(ms)) * &t_minus_i_pow(i, k - s)).scale_rat(&c);
        acc = &acc + &term;
    }
    acc.scale(&CoefPoly::lambda_pow(i))
}

/// Extends a monomial action linearly over a polynomial argument.
fn extend<F: Fn(u32) -> TPoly>(f: &TPoly, monomial_action: F) -> TPoly {
    let mut acc = TPoly::zero();
    for (k, c) in f.iter() {
        acc = &acc + &monomial_action(*k).scale(c);
    }
    acc
}

/// The Virasoro action `L[i] . f`; the `m = 0` slice of both families.
pub fn act_vir(i: i64, f: &TPoly, params: &ModuleParams) -> TPoly {
    params.apply(extend(f, |k| vir_monomial(i, k)))
}

/// The `eps = +1` family action `L[i,m] . f`.
pub fn act_w1(i: i64, m: u32, f: &TPoly, params: &ModuleParams) -> TPoly {
    assert_eq!(
        params.epsilon,
        Epsilon::Plus,
        "act_w1 takes eps = +1 parameters"
    );
    params.apply(extend(f, |k| w1_monomial(i, m, k)))
}

/// The `eps = -1` family action `L[i,m] . f`.
pub fn act_wm1(i: i64, m: u32, f: &TPoly, params: &ModuleParams) -> TPoly {
    assert_eq!(
        params.epsilon,
        Epsilon::Minus,
        "act_wm1 takes eps = -1 parameters"
    );
    params.apply(extend(f, |k| wm1_monomial(i, m, k)))
}

/// The `eps = -1` action in derivative form,
/// `sum_s (-1)^s C(m+s-1,s) l^i b^(m+s) (t - ia - (m+s)ab) f^(s)(t-i)`,
/// truncating at `deg f`. Must agree with `act_wm1` on every input.
pub fn act_wm1_deriv(i: i64, m: u32, f: &TPoly, params: &ModuleParams) -> TPoly {
    assert_eq!(
        params.epsilon,
        Epsilon::Minus,
        "act_wm1_deriv takes eps = -1 parameters"
    );
    let deg = match f.degree() {
        None => return TPoly::zero(),
        Some(d) => d,
    };
    let mut acc = TPoly::zero();
    for s in 0..=deg {
        let mut c = binom(m as i64 + s as i64 - 1, s);
        use num_traits::Zero;
        if c.is_zero() {
            continue;
        }
        if s % 2 == 1 {
            c = -c;
        }
        let ms = m + s;
        let const_part = &CoefPoly::alpha().scale(&rat(-i))
            - &(&CoefPoly::alpha() * &CoefPoly::beta()).scale(&rat(ms as i64));
        let linear = TPoly::from_terms([(1, CoefPoly::one()), (0, const_part)]);
        let deriv_shift = f.derivative(s).shift_i64(i);
        let term = (&linear.scale(&CoefPoly::beta_pow(ms)) * &deriv_shift).scale_rat(&c);
        acc = &acc + &term;
    }
    params.apply(acc.scale(&CoefPoly::lambda_pow(i)))
}

/// Dispatches to the family action selected by `params.epsilon`.
pub fn act(i: i64, m: u32, f: &TPoly, params: &ModuleParams) -> TPoly {
    match params.epsilon {
        Epsilon::Plus => act_w1(i, m, f, params),
        Epsilon::Minus => act_wm1(i, m, f, params),
    }
}

/// Action of a linear combination of basis symbols.
pub fn act_lie(x: &LieElt, f: &TPoly, params: &ModuleParams) -> TPoly {
    let mut acc = TPoly::zero();
    for ((i, m), c) in x.iter() {
        acc = &acc + &act(*i, *m, f, params).scale_rat(c);
    }
    acc
}

/// An abstract module action, linear in its polynomial argument with
/// `L[0,0]` acting as multiplication by `t`. The built-in families implement
/// it, and externally supplied tables may too.
pub trait ActionOracle {
    fn act(&self, i: i64, m: u32, f: &TPoly) -> TPoly;
}

/// The built-in family action as an oracle.
#[derive(Clone, Debug)]
pub struct OmegaOracle {
    pub params: ModuleParams,
}

impl OmegaOracle {
    pub fn new(params: ModuleParams) -> Self {
        OmegaOracle { params }
    }
}

impl ActionOracle for OmegaOracle {
    fn act(&self, i: i64, m: u32, f: &TPoly) -> TPoly {
        act(i, m, f, &self.params)
    }
}

/// Right-hand side of the expansion identities: the action on `t^k` written
/// as a combination of actions on `1`.
///
/// * `eps = +1`: `sum_{s<=min(m,k)} s! C(m,s) C(k,s) (t-i)^(k-s) (L[i,m-s] . 1)`
/// * `eps = -1`: `sum_{s<=k} (-1)^s s! C(m+s-1,s) C(k,s) (t-i)^(k-s) (L[i,m+s] . 1)`
pub fn expansion_rhs(eps: Epsilon, i: i64, m: u32, k: u32, oracle: &dyn ActionOracle) -> TPoly {
    let one = TPoly::one();
    let mut acc = TPoly::zero();
    match eps {
        Epsilon::Plus => {
            for s in 0..=m.min(k) {
                let c = factorial(s) * binom(m as i64, s) * binom(k as i64, s);
                let term = (&t_minus_i_pow(i, k - s) * &oracle.act(i, m - s, &one)).scale_rat(&c);
                acc = &acc + &term;
            }
        }
        Epsilon::Minus => {
            for s in 0..=k {
                let mut c = factorial(s) * binom(m as i64 + s as i64 - 1, s) * binom(k as i64, s);
                use num_traits::Zero;
                if c.is_zero() {
                    continue;
                }
                if s % 2 == 1 {
                    c = -c;
                }
                let term = (&t_minus_i_pow(i, k - s) * &oracle.act(i, m + s, &one)).scale_rat(&c);
                acc = &acc + &term;
            }
        }
    }
    acc
}

/// The shift map `t^k -> t^(k+1)`, i.e. multiplication by `t`. It
/// identifies the submodule `t Omega(l, 0, b)` with `Omega(l, 1, b)`.
pub fn shift_map(f: &TPoly) -> TPoly {
    &TPoly::t() * f
}

/// Verifies, symbolically in `(l, b)`, that the shift map intertwines the
/// actions: `L[i,m] . shift(t^k)` computed at `alpha = 0` equals
/// `shift(L[i,m] . t^k)` computed at `alpha = 1`, over the whole window.
pub fn check_shift_iso(eps: Epsilon, window: &Window) -> VerificationReport {
    let sym = ModuleParams::symbolic(eps);
    let zero = rat(0);
    let one_v = rat(1);
    let mut records = Vec::new();
    for i in window.i_range() {
        for m in 0..=window.m_max {
            for k in 0..=window.k_max {
                let lhs = act(i, m, &TPoly::t_pow(k + 1), &sym)
                    .subst(None, Some(&zero), None)
                    .expect("no lambda substitution");
                let rhs = shift_map(
                    &act(i, m, &TPoly::t_pow(k), &sym)
                        .subst(None, Some(&one_v), None)
                        .expect("no lambda substitution"),
                );
                let diff = &lhs - &rhs;
                records.push(CheckRecord::from_diff(
                    "shift-iso",
                    Some(eps),
                    GridPoint(vec![("i", i), ("m", m as i64), ("k", k as i64)]),
                    &diff,
                ));
            }
        }
    }
    VerificationReport::new(records)
}

/// One exported action value: `L[i,m] . t^k` in the canonical grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionTableEntry {
    pub epsilon: Epsilon,
    pub i: i64,
    pub m: u32,
    pub k: u32,
    pub result: String,
}

impl std::fmt::Display for ActionTableEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "epsilon={} i={} m={} k={} result={}",
            self.epsilon, self.i, self.m, self.k, self.result
        )
    }
}

/// Exports the oracle's values on monomials over the window as records in
/// the canonical grammar, in deterministic grid order. The table is diffable
/// externally and replayable by `verify::check_action_table`.
pub fn action_table(
    oracle: &dyn ActionOracle,
    eps: Epsilon,
    window: &Window,
) -> Vec<ActionTableEntry> {
    let mut entries = Vec::new();
    for i in window.i_range() {
        for m in 0..=window.m_max {
            for k in 0..=window.k_max {
                let result = oracle.act(i, m, &crate::tpoly::TPoly::t_pow(k)).to_string();
                entries.push(ActionTableEntry {
                    epsilon: eps,
                    i,
                    m,
                    k,
                    result,
                });
            }
        }
    }
    entries
}

/// Renders an action table, one record per line.
pub fn action_table_to_text(entries: &[ActionTableEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

/// Parses the line format produced by `action_table_to_text`.
pub fn parse_action_table(text: &str) -> Result<Vec<ActionTableEntry>, Error> {
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Parse(format!("table line {}: {what}", lineno + 1));
        let mut fields = line.splitn(5, ' ');
        let mut take = |prefix: &str, what: &str| -> Result<String, Error> {
            fields
                .next()
                .and_then(|f| f.strip_prefix(prefix))
                .map(str::to_string)
                .ok_or_else(|| bad(what))
        };
        let eps_v: i64 = take("epsilon=", "missing epsilon")?
            .parse()
            .map_err(|_| bad("bad epsilon"))?;
        let epsilon = Epsilon::from_value(eps_v).ok_or_else(|| bad("bad epsilon"))?;
        let i: i64 = take("i=", "missing i")?.parse().map_err(|_| bad("bad i"))?;
        let m: u32 = take("m=", "missing m")?.parse().map_err(|_| bad("bad m"))?;
        let k: u32 = take("k=", "missing k")?.parse().map_err(|_| bad("bad k"))?;
        let result = take("result=", "missing result")?;
        // The payload must parse in the canonical grammar.
        let _: crate::tpoly::TPoly = result.parse()?;
        entries.push(ActionTableEntry {
            epsilon,
            i,
            m,
            k,
            result,
        });
    }
    Ok(entries)
}

/// An action backed by an exported table instead of a formula: values on
/// monomials are looked up and extended linearly. Queries outside the
/// tabulated window panic, so the table must cover whatever grid the
/// consumer walks (`extract_params` needs `|i| <= 2`, `m <= 2`, `k <= 3`
/// plus the two defining entries).
#[derive(Clone, Debug, Default)]
pub struct TableOracle {
    values: std::collections::BTreeMap<(i64, u32, u32), TPoly>,
}

impl TableOracle {
    pub fn from_entries(entries: &[ActionTableEntry]) -> Result<Self, Error> {
        let mut values = std::collections::BTreeMap::new();
        for e in entries {
            let poly: TPoly = e.result.parse()?;
            values.insert((e.i, e.m, e.k), poly);
        }
        Ok(TableOracle { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl ActionOracle for TableOracle {
    fn act(&self, i: i64, m: u32, f: &TPoly) -> TPoly {
        let mut acc = TPoly::zero();
        for (k, c) in f.iter() {
            let value = self
                .values
                .get(&(i, m, *k))
                .unwrap_or_else(|| panic!("action table has no entry for i={i} m={m} k={k}"));
            acc = &acc + &value.scale(c);
        }
        acc
    }
}

/// Reads the parameters back off a rank-one family action: `lambda` and
/// `alpha` from `L[1,0] . 1 = lambda (t - alpha)`, then `beta` as the `t`
/// coefficient of `L[0,1] . 1` (equal to `a + b t` for `eps = +1` and
/// `b (t - a b)` for `eps = -1`). The returned triple is verified to
/// regenerate the oracle on a small grid.
pub fn extract_params(oracle: &dyn ActionOracle, eps: Epsilon) -> Result<(Rat, Rat, Rat), Error> {
    use num_traits::Zero;
    let one = TPoly::one();
    let g1 = oracle.act(1, 0, &one);
    if g1.degree() != Some(1) {
        return Err(Error::OracleOutsideFamily(format!(
            "L[1,0].1 must have degree 1, got `{g1}`"
        )));
    }
    let lead = g1
        .coeff(1)
        .as_rat()
        .ok_or_else(|| Error::OracleOutsideFamily("L[1,0].1 is not numeric".into()))?;
    if lead.is_zero() {
        return Err(Error::OracleOutsideFamily(
            "L[1,0].1 has zero leading coefficient".into(),
        ));
    }
    let constant = g1
        .coeff(0)
        .as_rat()
        .ok_or_else(|| Error::OracleOutsideFamily("L[1,0].1 is not numeric".into()))?;
    let lambda = lead;
    let alpha = -constant / &lambda;

    let g2 = oracle.act(0, 1, &one);
    let beta = g2
        .coeff(1)
        .as_rat()
        .ok_or_else(|| Error::OracleOutsideFamily("L[0,1].1 is not numeric".into()))?;

    // The triple must regenerate the oracle on a verification grid.
    let params = ModuleParams::numeric(eps, lambda.clone(), alpha.clone(), beta.clone())?;
    for i in -2..=2i64 {
        for m in 0..=2u32 {
            for k in 0..=3u32 {
                let expected = act(i, m, &TPoly::t_pow(k), &params);
                let got = oracle.act(i, m, &TPoly::t_pow(k));
                if expected != got {
                    return Err(Error::OracleOutsideFamily(format!(
                        "extracted parameters do not regenerate the action at i={i} m={m} k={k}"
                    )));
                }
            }
        }
    }
    Ok((lambda, alpha, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::frac;

    fn sym(eps: Epsilon) -> ModuleParams {
        ModuleParams::symbolic(eps)
    }

    fn tp(s: &str) -> TPoly {
        s.parse().unwrap()
    }

    #[test]
    fn vir_examples() {
        let p = sym(Epsilon::Plus);
        // i = 0 is multiplication by t.
        assert_eq!(act_vir(0, &TPoly::t_pow(3), &p), TPoly::t_pow(4));
        // k = 0: L[i].1 = l^i (t - i a), at i = 2.
        assert_eq!(act_vir(2, &TPoly::one(), &p), tp("l^2*t^1 + -2*l^2*a"));
        // (i,k) = (1,1): l (t^2 - (1 + a) t + a).
        assert_eq!(
            act_vir(1, &TPoly::t(), &p),
            tp("l*t^2 + -1*l*t^1 + -1*l*a*t^1 + l*a")
        );
    }

    #[test]
    fn zero_maps_to_zero() {
        let pp = sym(Epsilon::Plus);
        let pm = sym(Epsilon::Minus);
        assert!(act_vir(3, &TPoly::zero(), &pp).is_zero());
        assert!(act_w1(2, 3, &TPoly::zero(), &pp).is_zero());
        assert!(act_wm1(2, 3, &TPoly::zero(), &pm).is_zero());
        assert!(act_wm1_deriv(2, 3, &TPoly::zero(), &pm).is_zero());
    }

    #[test]
    fn freeness() {
        // L[0,0] acts as multiplication by t in every family and mode.
        let f = tp("t^3 + 2*t + 1/2");
        for eps in Epsilon::BOTH {
            let s = sym(eps);
            assert_eq!(act(0, 0, &f, &s), shift_map(&f));
            let n = ModuleParams::numeric(eps, rat(3), frac(1, 2), rat(-2)).unwrap();
            assert_eq!(act(0, 0, &f, &n), shift_map(&f));
        }
    }

    #[test]
    fn w1_explicit_forms() {
        let p = sym(Epsilon::Plus);
        // (i,1,1): l^i (a - i a b + b t) at i = 2.
        assert_eq!(
            act_w1(2, 1, &TPoly::one(), &p),
            tp("l^2*b*t^1 + l^2*a + -2*l^2*a*b")
        );
        // (i,2,t) at i = 1: l b (2a - ab + bt)(t-1) + 2 l (a - ab + bt).
        let direct = act_w1(1, 2, &TPoly::t(), &p);
        let expect = {
            let first = &tp("2*a + -1*a*b + b*t^1") * &tp("t^1 + -1");
            let second = tp("a + -1*a*b + b*t^1").scale_rat(&rat(2));
            (&first.scale(&CoefPoly::beta()) + &second).scale(&CoefPoly::lambda_pow(1))
        };
        assert_eq!(direct, expect);
        // (1,1,t^2) at b = 0: l a (t-1)^2 + 2 l (t-a)(t-1).
        let at_b0 = act_w1(1, 1, &TPoly::t_pow(2), &p)
            .subst(None, None, Some(&rat(0)))
            .unwrap();
        let expect = {
            let one = &tp("a") * &tp("t^2 + -2*t + 1");
            let two = (&tp("t^1 + -1*a") * &tp("t^1 + -1")).scale_rat(&rat(2));
            (&one + &two).scale(&CoefPoly::lambda_pow(1))
        };
        assert_eq!(at_b0, expect);
    }

    #[test]
    fn m_zero_reduces_to_vir() {
        let pp = sym(Epsilon::Plus);
        let pm = sym(Epsilon::Minus);
        for i in -3..=3i64 {
            for k in 0..=5u32 {
                let f = TPoly::t_pow(k);
                let vir = act_vir(i, &f, &pp);
                assert_eq!(act_w1(i, 0, &f, &pp), vir, "w1 i={i} k={k}");
                assert_eq!(act_wm1(i, 0, &f, &pm), vir, "wm1 i={i} k={k}");
            }
        }
    }

    #[test]
    fn wm1_frozen_values() {
        let p = sym(Epsilon::Minus);
        // (i,1,1): l^i b (t - i a - a b), at i = 3.
        assert_eq!(
            act_wm1(3, 1, &TPoly::one(), &p),
            tp("l^3*b*t^1 + -3*l^3*a*b + -1*l^3*a*b^2")
        );
        // (0,1,t): b t^2 - (a b^2 + b^2) t + 2 a b^3, summing the s = 0 and
        // s = 1 terms by hand.
        assert_eq!(
            act_wm1(0, 1, &TPoly::t(), &p),
            tp("b*t^2 + -1*a*b^2*t^1 + -1*b^2*t^1 + 2*a*b^3")
        );
    }

    #[test]
    fn deriv_form_matches() {
        let p = sym(Epsilon::Minus);
        // Constant argument: single s = 0 term.
        assert_eq!(
            act_wm1_deriv(2, 3, &TPoly::one(), &p),
            act_wm1(2, 3, &TPoly::one(), &p)
        );
        assert_eq!(
            act_wm1_deriv(0, 1, &TPoly::t(), &p),
            act_wm1(0, 1, &TPoly::t(), &p)
        );
        assert_eq!(
            act_wm1_deriv(1, 2, &TPoly::t_pow(5), &p),
            act_wm1(1, 2, &TPoly::t_pow(5), &p)
        );
        // And on a non-monomial input.
        let f = tp("t^4 + -3*t^2 + 1/2*t^1 + 7");
        assert_eq!(act_wm1_deriv(-2, 1, &f, &p), act_wm1(-2, 1, &f, &p));
    }

    #[test]
    fn expansion_rhs_forms() {
        let pp = sym(Epsilon::Plus);
        let pm = sym(Epsilon::Minus);
        let op = OmegaOracle::new(pp.clone());
        let om = OmegaOracle::new(pm.clone());
        // k = 0 is the bare action on 1.
        assert_eq!(
            expansion_rhs(Epsilon::Plus, 2, 3, 0, &op),
            act_w1(2, 3, &TPoly::one(), &pp)
        );
        // eps = +1, k = 1: (t-i)(L[i,m].1) + m (L[i,m-1].1), at (i,m) = (2,3).
        let direct = expansion_rhs(Epsilon::Plus, 2, 3, 1, &op);
        let expect = &(&TPoly::t_minus(2) * &act_w1(2, 3, &TPoly::one(), &pp))
            + &act_w1(2, 2, &TPoly::one(), &pp).scale_rat(&rat(3));
        assert_eq!(direct, expect);
        // eps = -1, (i,m,k) = (1,1,2): matches the direct action.
        assert_eq!(
            expansion_rhs(Epsilon::Minus, 1, 1, 2, &om),
            act_wm1(1, 1, &TPoly::t_pow(2), &pm)
        );
    }

    #[test]
    fn shift_iso_points() {
        // eps = +1, (i,m,k) = (0,1,0): both sides equal b t^2 + t.
        let sym_p = sym(Epsilon::Plus);
        let lhs = act(0, 1, &TPoly::t(), &sym_p)
            .subst(None, Some(&rat(0)), None)
            .unwrap();
        let rhs = shift_map(
            &act(0, 1, &TPoly::one(), &sym_p)
                .subst(None, Some(&rat(1)), None)
                .unwrap(),
        );
        assert_eq!(lhs, tp("b*t^2 + t"));
        assert_eq!(lhs, rhs);
        // m = 0, k = 2: both sides l^i t (t-i)^3 at i = 1.
        let lhs = act(1, 0, &TPoly::t_pow(3), &sym_p)
            .subst(None, Some(&rat(0)), None)
            .unwrap();
        let rhs = shift_map(
            &act(1, 0, &TPoly::t_pow(2), &sym_p)
                .subst(None, Some(&rat(1)), None)
                .unwrap(),
        );
        let expect = (&TPoly::t() * &TPoly::t_minus(1).pow(3)).scale(&CoefPoly::lambda_pow(1));
        assert_eq!(lhs, expect);
        assert_eq!(lhs, rhs);
        // Whole small window, both eps.
        for eps in Epsilon::BOTH {
            let rep = check_shift_iso(eps, &Window::new(2, 2, 3));
            assert!(rep.pass(), "eps={eps}:\n{}", rep.to_text());
        }
    }

    #[test]
    fn shift_is_not_equivariant_at_equal_alpha() {
        // Negative control: the shift map intertwines alpha = 0 with
        // alpha = 1, not alpha = 0 with itself.
        let sym_p = sym(Epsilon::Plus);
        let zero = rat(0);
        let lhs = act(1, 1, &TPoly::t(), &sym_p)
            .subst(None, Some(&zero), None)
            .unwrap();
        let rhs = shift_map(
            &act(1, 1, &TPoly::one(), &sym_p)
                .subst(None, Some(&zero), None)
                .unwrap(),
        );
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn extraction_examples() {
        // Omega_{W(1)}(2,3,5): L[1,0].1 = 2t - 6, L[0,1].1 = 3 + 5t.
        let params = ModuleParams::numeric(Epsilon::Plus, rat(2), rat(3), rat(5)).unwrap();
        let oracle = OmegaOracle::new(params);
        assert_eq!(oracle.act(1, 0, &TPoly::one()), tp("2*t^1 + -6"));
        assert_eq!(oracle.act(0, 1, &TPoly::one()), tp("5*t^1 + 3"));
        let (l, a, b) = extract_params(&oracle, Epsilon::Plus).unwrap();
        assert_eq!((l, a, b), (rat(2), rat(3), rat(5)));

        // All-default parameters.
        let oracle =
            OmegaOracle::new(ModuleParams::numeric(Epsilon::Plus, rat(1), rat(0), rat(0)).unwrap());
        assert_eq!(oracle.act(1, 0, &TPoly::one()), TPoly::t());
        assert!(oracle.act(0, 1, &TPoly::one()).is_zero());
        let (l, a, b) = extract_params(&oracle, Epsilon::Plus).unwrap();
        assert_eq!((l, a, b), (rat(1), rat(0), rat(0)));

        // Omega_{W(-1)}(3,1,2): L[0,1].1 = 2t - 4, L[1,0].1 = 3t - 3.
        let oracle = OmegaOracle::new(
            ModuleParams::numeric(Epsilon::Minus, rat(3), rat(1), rat(2)).unwrap(),
        );
        assert_eq!(oracle.act(0, 1, &TPoly::one()), tp("2*t^1 + -4"));
        assert_eq!(oracle.act(1, 0, &TPoly::one()), tp("3*t^1 + -3"));
        let (l, a, b) = extract_params(&oracle, Epsilon::Minus).unwrap();
        assert_eq!((l, a, b), (rat(3), rat(1), rat(2)));
    }

    #[test]
    fn extraction_rejects_non_family() {
        struct Bogus;
        impl ActionOracle for Bogus {
            fn act(&self, _i: i64, _m: u32, f: &TPoly) -> TPoly {
                &TPoly::t_pow(2) * f
            }
        }
        assert!(matches!(
            extract_params(&Bogus, Epsilon::Plus),
            Err(Error::OracleOutsideFamily(_))
        ));
    }

    #[test]
    fn extraction_from_exported_table() {
        // A table exported at numeric parameters stands in for the built-in
        // action: extraction recovers the same triple from it.
        let eps = Epsilon::Minus;
        let params = ModuleParams::numeric(eps, frac(5, 2), rat(-1), frac(1, 3)).unwrap();
        let oracle = OmegaOracle::new(params);
        // m up to 3: the eps = -1 expansion of (m,k) = (1,2) reaches m+s = 3.
        let window = crate::report::Window::new(2, 3, 3);
        let entries = action_table(&oracle, eps, &window);
        let text = action_table_to_text(&entries);
        let table = TableOracle::from_entries(&parse_action_table(&text).unwrap()).unwrap();
        assert_eq!(table.len(), entries.len());
        let (l, a, b) = extract_params(&table, eps).unwrap();
        assert_eq!((l, a, b), (frac(5, 2), rat(-1), frac(1, 3)));
        // expansion_rhs works against the table too: it only queries
        // actions on 1 inside the window.
        let direct = oracle.act(1, 1, &TPoly::t_pow(2));
        assert_eq!(expansion_rhs(eps, 1, 1, 2, &table), direct);
    }

    #[test]
    fn numeric_lambda_zero_rejected() {
        assert_eq!(
            ModuleParams::numeric(Epsilon::Plus, rat(0), rat(1), rat(1)),
            Err(Error::ZeroLambda)
        );
    }
}
