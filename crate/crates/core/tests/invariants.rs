use std::sync::{Arc, OnceLock};

use decat::cartan::{CartanData, Content, Weight};
use decat::nilhecke::{demazure, MultiPoly};
use decat::report::{CheckRun, Params, Status, VerificationReport};
use decat::rewrite::{normal_form, oracle_equal, random_content, random_word, FormalSum, Measure};
use decat::tensor_rep::{build_module, WeightModule};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn module_3_4() -> &'static WeightModule {
    static M: OnceLock<WeightModule> = OnceLock::new();
    M.get_or_init(|| build_module(3, 4).unwrap())
}

fn random_sum(seed: u64) -> FormalSum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cartan = Arc::new(CartanData::type_a(2));
    loop {
        let anchor = Weight::from_content(random_content(&mut rng, 3, 4));
        let word = random_word(&mut rng, 2, 5, 2);
        if !word.is_null(&cartan, &anchor) {
            return FormalSum::word(cartan, anchor, word).unwrap();
        }
    }
}

fn poly(vars: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0u32..4, vars), -3i64..=3), 0..5).prop_map(move |terms| {
        terms.into_iter().fold(MultiPoly::zero(vars), |acc, (e, c)| &acc + &MultiPoly::monomial(vars, e, c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_sound_and_idempotent(seed in any::<u64>()) {
        let sum = random_sum(seed);
        let nf = normal_form(&sum).unwrap();
        prop_assert!(!sum.is_zero());
        prop_assert_eq!(oracle_equal(&sum, &nf.sum, module_3_4()).unwrap().status, Status::Pass);
        let again = normal_form(&nf.sum).unwrap();
        prop_assert_eq!(again.steps, 0);
        prop_assert_eq!(again.sum.to_string(), nf.sum.to_string());
    }

    #[test]
    fn normal_form_never_grows_the_measure(seed in any::<u64>()) {
        let sum = random_sum(seed);
        let before = sum.terms().map(|(w, _)| Measure::of(w)).max();
        let after = normal_form(&sum).unwrap().sum.terms().map(|(w, _)| Measure::of(w)).max();
        if let (Some(b), Some(a)) = (before, after) {
            prop_assert!(a <= b, "{:?} > {:?}", a, b);
        }
    }

    #[test]
    fn demazure_leibniz_and_square_zero(f in poly(3), g in poly(3), k in 1usize..3) {
        // d(fg) = d(f) g + s(f) d(g)
        let lhs = demazure(k, &(&f * &g));
        let rhs = &(&demazure(k, &f) * &g) + &(&f.swap(k) * &demazure(k, &g));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(demazure(k, &demazure(k, &f)).is_zero());
        let symmetric = &f + &f.swap(k);
        prop_assert!(demazure(k, &symmetric).is_zero());
    }

    #[test]
    fn reflections_are_involutions(content in prop::collection::vec(0i64..5, 4), i in 1usize..4) {
        let a3 = CartanData::type_a(3);
        let w = Weight::from_content(Content(content));
        let s = a3.reflect(&w, i);
        prop_assert_eq!(s.pairing(i), -w.pairing(i));
        let back = a3.reflect(&s, i);
        prop_assert_eq!(back.pairings(), w.pairings());
    }

    #[test]
    fn report_json_round_trip(cases in 0usize..20, i in 1usize..5, seed in any::<u64>()) {
        let mut run = CheckRun::start("probe", "oracle", Params::module(3, 2).with_i(i));
        for _ in 0..cases {
            run.record_case();
        }
        let report = run.finish().with_seed(seed);
        let back: VerificationReport = serde_json::from_str(&report.to_json()).unwrap();
        prop_assert_eq!(back, report);
    }
}
