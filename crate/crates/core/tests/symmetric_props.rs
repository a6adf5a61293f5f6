use bxlens::corpus::{lawful_pure_slenses, lawful_smlenses};
use bxlens::effects::FiniteMonoid;
use bxlens::mlens::Budget;
use bxlens::symmetric::{
    check_slens_laws, check_smlens_laws, compose_relations, compose_s, compose_sm, converse,
    id_slens, search_slens_equiv, set_bool, slens_difference, smlens_difference,
    verify_slens_equiv, SLens, SMLens, DEFAULT_RELATION_BOUND,
};
use bxlens::{Bounds, Carrier, Effect, Monoid, Value};

fn bits() -> Carrier {
    Carrier::int_range(0, 1)
}

fn slenses(left: &Carrier, right: &Carrier, complement: &Carrier) -> Vec<SLens> {
    let mut budget = Budget::new("corpus", 50_000_000);
    let missing = complement.elements()[0].clone();
    lawful_pure_slenses(left, right, complement, &missing, &mut budget).unwrap()
}

fn small_corpus() -> Vec<SLens> {
    let one = Carrier::int_range(0, 0);
    let mut out = Vec::new();
    for c in [one.clone(), bits()] {
        out.extend(slenses(&bits(), &bits(), &c));
    }
    out
}

#[test]
fn pure_composition_closed() {
    let one = Carrier::int_range(0, 0);
    let carriers = [one.clone(), bits()];
    let mut pairs = 0;
    for a in &carriers {
        for b in &carriers {
            for c in &carriers {
                for (c1, c2) in [(&one, &one), (&bits(), &one), (&one, &bits())] {
                    let first = slenses(a, b, c1);
                    let second = slenses(b, c, c2);
                    for sl1 in &first {
                        for sl2 in &second {
                            let report = check_slens_laws(&compose_s(sl1, sl2).unwrap()).unwrap();
                            assert!(report.passed(), "{}", report.render_human());
                            pairs += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(pairs > 100, "{pairs}");
}

#[test]
fn identity_is_a_unit_up_to_equivalence() {
    for sl in small_corpus() {
        let id = id_slens(sl.left());
        let composed = compose_s(&id, &sl).unwrap();
        let r = search_slens_equiv(&composed, &sl, DEFAULT_RELATION_BOUND)
            .unwrap()
            .expect("witness");
        assert!(verify_slens_equiv(&composed, &sl, &r).unwrap().holds);
        // Every related pair is ((), c) against c.
        assert!(r
            .iter()
            .all(|(p, c)| p.split_pair().unwrap() == (&Value::Unit, c)));
    }
}

#[test]
fn composition_associative_up_to_equivalence() {
    let corpus = small_corpus();
    for sl1 in corpus.iter().step_by(3) {
        for sl2 in corpus.iter().step_by(5) {
            for sl3 in corpus.iter().step_by(7) {
                let left = compose_s(&compose_s(sl1, sl2).unwrap(), sl3).unwrap();
                let right = compose_s(sl1, &compose_s(sl2, sl3).unwrap()).unwrap();
                assert!(search_slens_equiv(&left, &right, DEFAULT_RELATION_BOUND)
                    .unwrap()
                    .is_some());
            }
        }
    }
}

#[test]
fn equivalence_is_reflexive_symmetric_transitive() {
    let corpus = small_corpus();
    let find = |x: &SLens, y: &SLens| search_slens_equiv(x, y, DEFAULT_RELATION_BOUND).unwrap();
    for x in &corpus {
        let diag: Vec<(Value, Value)> = x
            .complement()
            .elements()
            .iter()
            .map(|c| (c.clone(), c.clone()))
            .collect();
        assert!(verify_slens_equiv(x, x, &diag).unwrap().holds);
        for y in &corpus {
            let Some(r) = find(x, y) else {
                assert!(find(y, x).is_none());
                continue;
            };
            assert!(verify_slens_equiv(y, x, &converse(&r)).unwrap().holds);
            for z in &corpus {
                if let Some(s) = find(y, z) {
                    assert!(
                        verify_slens_equiv(x, z, &compose_relations(&r, &s))
                            .unwrap()
                            .holds
                    );
                }
            }
        }
    }
}

#[test]
fn different_outputs_are_never_equivalent() {
    let corpus = small_corpus();
    for x in &corpus {
        for y in &corpus {
            let fresh = |sl: &SLens| sl.put_r(&Value::Int(0), sl.missing()).unwrap().0;
            if fresh(x) != fresh(y) {
                assert!(search_slens_equiv(x, y, DEFAULT_RELATION_BOUND)
                    .unwrap()
                    .is_none());
            }
        }
    }
}

#[test]
fn set_bool_instances_are_lawful() {
    for b in [false, true] {
        assert!(check_smlens_laws(&set_bool(b)).unwrap().passed());
    }
}

#[test]
fn set_bool_composite_ends_in_different_states() {
    let r = check_smlens_laws(&compose_sm(&set_bool(true), &set_bool(false)).unwrap()).unwrap();
    let v = r.violation("PutRLM").expect("PutRLM witness");
    let d = v.divergence.as_ref().unwrap();
    assert_eq!(
        (&d.lhs_final, &d.rhs_final),
        (&Value::Bool(true), &Value::Bool(false))
    );
    assert_eq!(v.binding("a"), Some(&Value::Unit));
}

#[test]
fn identity_effect_composition_is_pure_composition() {
    let corpus = small_corpus();
    let lift = |sl: &SLens| SMLens::lift(&Effect::Identity, sl);
    for sl1 in corpus.iter().step_by(2) {
        for sl2 in corpus.iter().step_by(3) {
            let monadic = compose_sm(&lift(sl1), &lift(sl2)).unwrap();
            let pure = compose_s(sl1, sl2).unwrap();
            assert_eq!(
                slens_difference(&monadic.to_pure().unwrap(), &pure).unwrap(),
                None
            );
            assert_eq!(smlens_difference(&monadic, &lift(&pure)).unwrap(), None);
        }
    }
}

fn writer_corpus(m: &Monoid) -> Vec<SMLens> {
    let effect = Effect::Writer(m.clone());
    let unit = Carrier::unit();
    let mut budget = Budget::new("corpus", 50_000_000);
    let mut out = Vec::new();
    for c in [Carrier::int_range(0, 0), bits()] {
        out.extend(
            lawful_smlenses(
                &effect,
                &unit,
                &unit,
                &c,
                &Value::Int(0),
                &Bounds::default(),
                &mut budget,
            )
            .unwrap(),
        );
    }
    out
}

#[test]
fn commutative_writer_composition_closed() {
    for m in [
        Monoid::Finite(FiniteMonoid::xor()),
        Monoid::Multiset(bits()),
    ] {
        let corpus = writer_corpus(&m);
        assert!(corpus.len() > 2);
        for sl1 in &corpus {
            for sl2 in &corpus {
                let report = check_smlens_laws(&compose_sm(sl1, sl2).unwrap()).unwrap();
                assert!(report.passed(), "{m:?}: {}", report.render_human());
            }
        }
    }
}
