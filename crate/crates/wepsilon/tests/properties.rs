//! Property tests for the exact-arithmetic core: ring axioms, shift
//! composition, the evaluation homomorphism, and parse/print round-trips.

use proptest::prelude::*;

use wepsilon::coef::{CoefPoly, Exps};
use wepsilon::rat::{frac, is_normalized, rat_pow, Rat};
use wepsilon::tpoly::TPoly;

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| frac(n, d))
}

fn arb_nonzero_rat() -> impl Strategy<Value = Rat> {
    (prop_oneof![-40i64..=-1, 1i64..=40], 1i64..=12).prop_map(|(n, d)| frac(n, d))
}

fn arb_exps() -> impl Strategy<Value = Exps> {
    (-3i64..=3, 0u32..=3, 0u32..=3).prop_map(|(la, al, be)| Exps { la, al, be })
}

fn arb_coef() -> impl Strategy<Value = CoefPoly> {
    proptest::collection::vec((arb_exps(), arb_rat()), 0..4).prop_map(CoefPoly::from_terms)
}

fn arb_tpoly() -> impl Strategy<Value = TPoly> {
    proptest::collection::vec((0u32..=5, arb_coef()), 0..4).prop_map(TPoly::from_terms)
}

proptest! {
    #[test]
    fn coef_add_commutes(x in arb_coef(), y in arb_coef()) {
        prop_assert_eq!(&x + &y, &y + &x);
    }

    #[test]
    fn coef_mul_commutes(x in arb_coef(), y in arb_coef()) {
        prop_assert_eq!(&x * &y, &y * &x);
    }

    #[test]
    fn coef_mul_associates(x in arb_coef(), y in arb_coef(), z in arb_coef()) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn coef_distributes(x in arb_coef(), y in arb_coef(), z in arb_coef()) {
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
    }

    #[test]
    fn coef_add_inverse(x in arb_coef()) {
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn tpoly_add_commutes(x in arb_tpoly(), y in arb_tpoly()) {
        prop_assert_eq!(&x + &y, &y + &x);
    }

    #[test]
    fn tpoly_mul_associates(x in arb_tpoly(), y in arb_tpoly(), z in arb_tpoly()) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn tpoly_distributes(x in arb_tpoly(), y in arb_tpoly(), z in arb_tpoly()) {
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
    }

    /// Shifting by a then b is one shift by a + b.
    #[test]
    fn shift_composes(f in arb_tpoly(), a in -5i64..=5, b in -5i64..=5) {
        prop_assert_eq!(f.shift_i64(a).shift_i64(b), f.shift_i64(a + b));
    }

    /// Shift is a ring homomorphism in the argument.
    #[test]
    fn shift_respects_products(f in arb_tpoly(), g in arb_tpoly(), c in -4i64..=4) {
        prop_assert_eq!((&f * &g).shift_i64(c), &f.shift_i64(c) * &g.shift_i64(c));
    }

    /// Parameter evaluation is a ring homomorphism.
    #[test]
    fn eval_is_hom(
        x in arb_coef(),
        y in arb_coef(),
        l in arb_nonzero_rat(),
        a in arb_rat(),
        b in arb_rat(),
    ) {
        let ev = |p: &CoefPoly| p.eval_params(&l, &a, &b).unwrap();
        prop_assert_eq!(ev(&(&x * &y)), ev(&x) * ev(&y));
        prop_assert_eq!(ev(&(&x + &y)), ev(&x) + ev(&y));
    }

    /// Evaluation agrees with direct monomial substitution.
    #[test]
    fn eval_matches_monomials(
        e in arb_exps(),
        c in arb_rat(),
        l in arb_nonzero_rat(),
        a in arb_rat(),
        b in arb_rat(),
    ) {
        let p = CoefPoly::monomial(e, c.clone());
        let direct = c
            * rat_pow(&l, e.la)
            * rat_pow(&a, e.al as i64)
            * rat_pow(&b, e.be as i64);
        prop_assert_eq!(p.eval_params(&l, &a, &b).unwrap(), direct);
    }

    /// Canonical print parses back to the same value.
    #[test]
    fn print_parse_round_trip(f in arb_tpoly()) {
        let text = f.to_string();
        let back: TPoly = text.parse().unwrap();
        prop_assert_eq!(back, f);
    }

    /// All rationals surfaced by arithmetic stay normalized.
    #[test]
    fn rationals_stay_normalized(x in arb_coef(), y in arb_coef()) {
        let p = &x * &y;
        for (_, c) in p.iter() {
            prop_assert!(is_normalized(c));
        }
    }

    /// Derivative is linear and satisfies the Leibniz rule.
    #[test]
    fn derivative_leibniz(f in arb_tpoly(), g in arb_tpoly()) {
        let lhs = (&f * &g).derivative(1);
        let rhs = &(&f.derivative(1) * &g) + &(&f * &g.derivative(1));
        prop_assert_eq!(lhs, rhs);
    }
}

// Structural invariants of the algebra and module layers on random data.
mod structure {
    use super::*;
    use wepsilon::lie::{bracket, Epsilon, LieElt};
    use wepsilon::omega::{act, shift_map, ModuleParams};

    fn arb_eps() -> impl Strategy<Value = Epsilon> {
        prop_oneof![Just(Epsilon::Plus), Just(Epsilon::Minus)]
    }

    fn arb_lie() -> impl Strategy<Value = LieElt> {
        proptest::collection::vec(((-3i64..=3, 0u32..=3), arb_rat()), 0..4).prop_map(|terms| {
            let mut e = LieElt::zero();
            for ((i, m), c) in terms {
                e.add_term(i, m, c);
            }
            e
        })
    }

    proptest! {
        /// The bracket is bilinear.
        #[test]
        fn bracket_bilinear(
            eps in arb_eps(),
            x in arb_lie(),
            y in arb_lie(),
            z in arb_lie(),
            c in arb_rat(),
        ) {
            let lhs = bracket(eps, &x.add(&y.scale(&c)), &z);
            let rhs = bracket(eps, &x, &z).add(&bracket(eps, &y, &z).scale(&c));
            prop_assert_eq!(lhs, rhs);
        }

        /// The bracket is antisymmetric on random combinations.
        #[test]
        fn bracket_antisymmetric(eps in arb_eps(), x in arb_lie(), y in arb_lie()) {
            prop_assert!(bracket(eps, &x, &y).add(&bracket(eps, &y, &x)).is_zero());
        }

        /// Every family action is linear in its polynomial argument.
        #[test]
        fn action_linear_in_argument(
            eps in arb_eps(),
            i in -3i64..=3,
            m in 0u32..=3,
            f in arb_tpoly(),
            g in arb_tpoly(),
        ) {
            let params = ModuleParams::symbolic(eps);
            let lhs = act(i, m, &(&f + &g), &params);
            let rhs = &act(i, m, &f, &params) + &act(i, m, &g, &params);
            prop_assert_eq!(lhs, rhs);
        }

        /// L[0,0] acts as multiplication by t on arbitrary vectors.
        #[test]
        fn freeness_on_random_vectors(eps in arb_eps(), f in arb_tpoly()) {
            let params = ModuleParams::symbolic(eps);
            prop_assert_eq!(act(0, 0, &f, &params), shift_map(&f));
        }
    }
}
