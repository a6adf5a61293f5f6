use bxlens::corpus::{lawful_pure_lenses, random_lawful_mlens};
use bxlens::lens::{check_pure_laws, compose_pure, id_lens, LensTable, PureLens};
use bxlens::mlens::{
    abs_lens, abs_lens_over, check_mlens_laws, check_naive_laws, check_put_lens_laws, compose_m,
    compose_naive, const_mlens, lens2mlens, log_lens, mlens_difference,
    search_naive_counterexample, Budget, MLens, NaiveMLens, NaiveSearch, PutLens,
    DEFAULT_SEARCH_BUDGET,
};
use bxlens::{Bounds, Carrier, Effect, EffectValue, Monoid, Value};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn every_effect() -> Vec<Effect> {
    vec![
        Effect::Identity,
        Effect::Maybe,
        Effect::List,
        Effect::Writer(Monoid::FreeList(Carrier::int_range(0, 1))),
        Effect::State(Carrier::bool()),
    ]
}

fn pure_corpus() -> Vec<PureLens> {
    let mut budget = Budget::new("corpus", 10_000_000);
    let cs = [
        Carrier::int_range(0, 0),
        Carrier::int_range(0, 1),
        Carrier::int_range(0, 2),
    ];
    let mut out = Vec::new();
    for a in &cs {
        for b in &cs[..2] {
            out.extend(lawful_pure_lenses(a, b, &mut budget).unwrap());
        }
    }
    out
}

#[test]
fn lifting_preserves_laws_under_every_effect() {
    let corpus = pure_corpus();
    assert!(corpus.len() >= 20, "{}", corpus.len());
    for e in every_effect() {
        for l in &corpus {
            let report = check_mlens_laws(&lens2mlens(&e, l)).unwrap();
            assert!(
                report.passed(),
                "{e} {}: {}",
                l.name(),
                report.render_human()
            );
        }
    }
}

#[test]
fn lifting_reflects_unlawful_tables() {
    let mut rng = StdRng::seed_from_u64(11);
    let (a, b) = (Carrier::int_range(0, 2), Carrier::int_range(0, 1));
    let mut unlawful = 0;
    for _ in 0..200 {
        let table = LensTable {
            get: (0..3).map(|_| rng.gen_range(0..2)).collect(),
            put: (0..3)
                .map(|_| (0..2).map(|_| rng.gen_range(0..3)).collect())
                .collect(),
            create: (0..2).map(|_| rng.gen_range(0..3)).collect(),
        };
        let l = PureLens::from_table("t", a.clone(), b.clone(), table).unwrap();
        let pure = check_pure_laws(&l).unwrap().passed();
        unlawful += usize::from(!pure);
        for e in every_effect() {
            assert_eq!(
                check_mlens_laws(&lens2mlens(&e, &l)).unwrap().passed(),
                pure,
                "{e}"
            );
        }
    }
    assert!(unlawful > 100);
}

fn builtins() -> Vec<MLens> {
    let c3 = Carrier::int_range(0, 2);
    vec![
        abs_lens(1).unwrap(),
        const_mlens(&c3, &c3, Value::Int(1), Value::Int(0)).unwrap(),
        const_mlens(&c3, &Carrier::int_range(0, 0), Value::Int(0), Value::Int(2)).unwrap(),
    ]
}

fn composable_corpus(effect: &Effect, rng: &mut StdRng) -> Vec<MLens> {
    let cs = [
        Carrier::int_range(0, 0),
        Carrier::int_range(0, 1),
        Carrier::int_range(0, 2),
    ];
    let mut out: Vec<MLens> = Vec::new();
    if *effect == Effect::Maybe {
        out.extend(builtins());
    }
    for l in pure_corpus().into_iter().step_by(7) {
        out.push(lens2mlens(effect, &l));
    }
    for a in &cs {
        for b in &cs {
            if a.len() >= b.len() {
                for _ in 0..4 {
                    out.push(random_lawful_mlens(rng, effect, a, b, &Bounds::default()).unwrap());
                }
            }
        }
    }
    out
}

#[test]
fn composition_preserves_laws_for_maybe_and_state() {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut pairs = 0;
    for effect in [Effect::Maybe, Effect::State(Carrier::bool())] {
        let corpus = composable_corpus(&effect, &mut rng);
        for l1 in &corpus {
            for l2 in &corpus {
                if !l1.view().same_elements(l2.source()) {
                    continue;
                }
                assert!(check_mlens_laws(l1).unwrap().passed());
                let l = compose_m(l1, &l2.with_source(l1.view().clone())).unwrap();
                let report = check_mlens_laws(&l).unwrap();
                assert!(
                    report.passed(),
                    "{} ; {}: {}",
                    l1.name(),
                    l2.name(),
                    report.render_human()
                );
                pairs += 1;
            }
        }
    }
    assert!(pairs >= 200, "{pairs}");
}

#[test]
fn abs_gallery() {
    let l = abs_lens(3).unwrap();
    assert!(check_mlens_laws(&l).unwrap().passed());
    assert_eq!(l.mget(&Value::Int(-3)).unwrap(), Value::Int(3));
    let wide = abs_lens_over(Carrier::int_range(-5, 5), Carrier::int_range(-5, 5));
    assert_eq!(
        wide.mput(&Value::Int(-3), &Value::Int(5)).unwrap(),
        EffectValue::Maybe(Some(Value::Int(-5)))
    );
    assert_eq!(
        wide.mput(&Value::Int(4), &Value::Int(-2)).unwrap(),
        EffectValue::Maybe(None)
    );
    // Successful puts read back the view.
    for a in -3..=3 {
        for b in 0..=3 {
            if let EffectValue::Maybe(Some(a2)) = l.mput(&Value::Int(a), &Value::Int(b)).unwrap() {
                assert_eq!(l.mget(&a2).unwrap(), Value::Int(b));
            }
        }
    }
}

#[test]
fn abs_composed_with_identity() {
    let wide = abs_lens_over(Carrier::int_range(-5, 5), Carrier::int_range(-5, 5));
    let l = compose_m(&wide, &lens2mlens(&Effect::Maybe, &id_lens(wide.view()))).unwrap();
    assert_eq!(
        l.mput(&Value::Int(-3), &Value::Int(5)).unwrap(),
        EffectValue::Maybe(Some(Value::Int(-5)))
    );
    assert_eq!(mlens_difference(&l, &wide).unwrap(), None);
}

#[test]
fn const_and_log_gallery() {
    let view = Carrier::int_range(6, 8);
    let c = const_mlens(
        &Carrier::int_range(0, 2),
        &view,
        Value::Int(7),
        Value::Int(0),
    )
    .unwrap();
    assert!(check_mlens_laws(&c).unwrap().passed());
    let log = log_lens(&id_lens(&Carrier::int_range(0, 2)));
    assert!(check_mlens_laws(&log).unwrap().passed());
    assert_eq!(
        log.mput(&Value::Int(1), &Value::Int(2)).unwrap(),
        EffectValue::Writer {
            log: Value::List(vec![Value::Int(1)]),
            value: Value::Int(2)
        }
    );
}

#[test]
fn composition_with_lifted_identity_is_neutral() {
    let mut rng = StdRng::seed_from_u64(5);
    let (a, b) = (Carrier::int_range(0, 2), Carrier::int_range(0, 1));
    for effect in every_effect() {
        let l = random_lawful_mlens(&mut rng, &effect, &a, &b, &Bounds::default()).unwrap();
        let left = compose_m(&lens2mlens(&effect, &id_lens(&a)), &l).unwrap();
        let right = compose_m(&l, &lens2mlens(&effect, &id_lens(&b))).unwrap();
        assert_eq!(mlens_difference(&left, &l).unwrap(), None, "{effect}");
        assert_eq!(mlens_difference(&right, &l).unwrap(), None, "{effect}");
    }
}

#[test]
fn put_lens_gallery_passes() {
    for l in builtins() {
        let p = PutLens::from_mlens(&l).unwrap();
        assert!(check_put_lens_laws(&p).unwrap().passed(), "{}", l.name());
    }
}

#[test]
fn put_that_ignores_the_view_breaks_put_get() {
    let c = Carrier::int_range(0, 1);
    let p = PutLens::new(
        "keep",
        Effect::Maybe,
        c.clone(),
        c,
        |a| Ok(a.clone()),
        |a, _| Ok(EffectValue::Maybe(Some(a.clone()))),
    )
    .unwrap();
    let report = check_put_lens_laws(&p).unwrap();
    assert!(
        report.violation("MPutGet1").is_some(),
        "{}",
        report.render_human()
    );
    assert!(report.violation("MGetPut1").is_none());
}

#[test]
fn naive_composition_counterexample_at_smallest_size() {
    let state = Effect::State(Carrier::bool());
    let found = search_naive_counterexample(&state, 1, 2, DEFAULT_SEARCH_BUDGET).unwrap();
    let NaiveSearch::Found(cx) = found else {
        panic!("expected a counterexample");
    };
    assert!(check_naive_laws(&cx.first).unwrap().passed());
    assert!(check_naive_laws(&cx.second).unwrap().passed());
    assert!(!check_naive_laws(&cx.composite).unwrap().passed());
    assert!(cx.reverify().unwrap());
    assert!(["MGetPut0", "MPutGet0"].contains(&cx.violation.law.as_str()));
}

#[test]
fn naive_composition_closed_on_singleton_carriers() {
    let state = Effect::State(Carrier::bool());
    let found = search_naive_counterexample(&state, 1, 1, DEFAULT_SEARCH_BUDGET).unwrap();
    assert!(matches!(found, NaiveSearch::NotFound { .. }));
}

#[test]
fn naive_lifted_composition_matches_pure() {
    let e = Effect::Identity;
    let corpus = pure_corpus();
    for l1 in corpus.iter().filter(|l| l.view().len() == 2) {
        for l2 in corpus.iter().filter(|l| l.source().len() == 2) {
            let n1 = NaiveMLens::from_mlens(&lens2mlens(&e, l1));
            let n2 = NaiveMLens::from_mlens(&lens2mlens(&e, l2));
            let composite = compose_naive(&n1, &n2).unwrap();
            let pure = compose_pure(l1, l2).unwrap();
            for a in l1.source().elements() {
                assert_eq!(
                    composite.mget(a).unwrap(),
                    EffectValue::Identity(pure.get(a).unwrap())
                );
                for c in l2.view().elements() {
                    assert_eq!(
                        composite.mput(a, c).unwrap(),
                        EffectValue::Identity(pure.put(a, c).unwrap())
                    );
                }
            }
            assert!(check_naive_laws(&composite).unwrap().passed());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_state_lenses_compose(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let effect = Effect::State(Carrier::bool());
        let (a, b, c) = (Carrier::int_range(0, 2), Carrier::int_range(0, 1), Carrier::int_range(0, 0));
        let l1 = random_lawful_mlens(&mut rng, &effect, &a, &b, &Bounds::default()).unwrap();
        let l2 = random_lawful_mlens(&mut rng, &effect, &b, &c, &Bounds::default()).unwrap();
        prop_assert!(check_mlens_laws(&compose_m(&l1, &l2).unwrap()).unwrap().passed());
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let effect = Effect::Maybe;
        let cs = [Carrier::int_range(0, 2), Carrier::int_range(0, 1), Carrier::int_range(0, 1), Carrier::int_range(0, 0)];
        let ls: Vec<MLens> = cs
            .windows(2)
            .map(|w| random_lawful_mlens(&mut rng, &effect, &w[0], &w[1], &Bounds::default()).unwrap())
            .collect();
        let left = compose_m(&compose_m(&ls[0], &ls[1]).unwrap(), &ls[2]).unwrap();
        let right = compose_m(&ls[0], &compose_m(&ls[1], &ls[2]).unwrap()).unwrap();
        prop_assert_eq!(mlens_difference(&left, &right).unwrap(), None);
    }
}
