use bxlens::corpus::{
    bisimulations, lawful_pure_lenses, lawful_pure_spans, random_span, span_steps,
};
use bxlens::equivalence::{
    bisim_from_span_witness, check_lens_span, direct_span_witness, lift_witness_left,
    lift_witness_right, normalize_equiv_chain, paired_bisim, search_equivalence,
    span_witness_from_bisim, verify_equivalence, BaseMap, EquivKind, EquivWitness, IsoWitness,
    SpanEquivWitness,
};
use bxlens::fixtures::{
    bool_span, collapse_lens, create_mismatch_bisim, create_mismatch_spans, unit_span,
};
use bxlens::mlens::{compose_m, lens2mlens, Budget};
use bxlens::spans::{id_span, Span};
use bxlens::symmetric::converse;
use bxlens::{BxError, Carrier, Effect, Value};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn budget() -> Budget {
    Budget::new("corpus", 50_000_000)
}

fn views() -> Vec<(Carrier, Carrier)> {
    let (one, two) = (Carrier::int_range(0, 0), Carrier::int_range(0, 1));
    vec![
        (one.clone(), one.clone()),
        (one.clone(), two.clone()),
        (two.clone(), two),
    ]
}

/// Every pure span with state of size at most two over the given views.
fn span_corpus(left: &Carrier, right: &Carrier) -> Vec<Span> {
    let mut b = budget();
    let mut out = Vec::new();
    for n in ["P", "Q"] {
        let state = if n == "P" {
            Carrier::symbols("P", &["p"]).unwrap()
        } else {
            Carrier::symbols("Q", &["q0", "q1"]).unwrap()
        };
        out.extend(lawful_pure_spans(&state, left, right, &mut b).unwrap());
    }
    out
}

fn precompose(h: &bxlens::lens::PureLens, sp: &Span) -> Span {
    let m = lens2mlens(sp.effect(), h);
    Span::new(
        format!("{} then {}", h.name(), sp.name()),
        compose_m(&m, sp.left()).unwrap(),
        compose_m(&m, sp.right()).unwrap(),
    )
    .unwrap()
}

#[test]
fn unit_and_bool_spans_separate_iso_from_span() {
    let (sp1, sp2) = (unit_span(), bool_span());
    assert!(search_equivalence(EquivKind::Iso, &sp1, &sp2, 1000)
        .unwrap()
        .is_none());
    let Some(EquivWitness::Span(w)) =
        search_equivalence(EquivKind::Span, &sp1, &sp2, 1000).unwrap()
    else {
        panic!("span witness expected");
    };
    assert!(
        verify_equivalence(&sp1, &sp2, &EquivWitness::Span(w.clone()))
            .unwrap()
            .passed()
    );
    let b = bisim_from_span_witness(&sp1, &sp2, &w).unwrap();
    assert_eq!(b.relation().len(), 2);
    assert!(verify_equivalence(&sp1, &sp2, &EquivWitness::Bisim(b))
        .unwrap()
        .passed());
    // The only admissible witness is the fixture lens.
    let all = span_steps(&sp1, &sp2, &mut budget()).unwrap();
    assert_eq!(all.len(), 1);
    assert_eq!(
        all[0].lens.create(&Value::Unit).unwrap(),
        collapse_lens().create(&Value::Unit).unwrap()
    );
}

#[test]
fn isomorphisms_are_span_witnesses() {
    let mut rng = StdRng::seed_from_u64(9);
    let s = Carrier::int_range(0, 2);
    let (a, b) = (Carrier::int_range(0, 1), Carrier::int_range(0, 1));
    for e in [
        Effect::Identity,
        Effect::Maybe,
        Effect::State(Carrier::bool()),
    ] {
        for _ in 0..10 {
            let sp1 = random_span(&mut rng, &e, &s, &a, &b).unwrap();
            let mut images: Vec<Value> = s.elements().to_vec();
            images.shuffle(&mut rng);
            let inverse: Vec<Value> = s
                .elements()
                .iter()
                .map(|x| s.elements()[images.iter().position(|y| y == x).unwrap()].clone())
                .collect();
            let iso = IsoWitness::new(
                BaseMap::from_images("h", &s, &s, images).unwrap(),
                BaseMap::from_images("h'", &s, &s, inverse).unwrap(),
            )
            .unwrap();
            // Transport sp1 along the bijection.
            let sp2 = precompose(
                &IsoWitness::new(iso.backward.clone(), iso.forward.clone())
                    .unwrap()
                    .to_lens(),
                &sp1,
            );
            let w = EquivWitness::Iso(iso.clone());
            assert!(verify_equivalence(&sp1, &sp2, &w).unwrap().passed(), "{e}");
            let sw = EquivWitness::Span(iso.to_span_witness());
            assert!(verify_equivalence(&sp1, &sp2, &sw).unwrap().passed(), "{e}");
        }
    }
}

#[test]
fn graph_construction_always_verifies() {
    let mut rng = StdRng::seed_from_u64(10);
    let mut b = budget();
    let (a, v) = (Carrier::int_range(0, 1), Carrier::int_range(0, 1));
    for small in [Carrier::int_range(0, 1), Carrier::int_range(0, 2)] {
        for big in [Carrier::int_range(0, 2), Carrier::int_range(0, 3)] {
            let hs = lawful_pure_lenses(&big, &small, &mut b).unwrap();
            for _ in 0..5 {
                let sp = random_span(&mut rng, &Effect::Identity, &small, &a, &v).unwrap();
                for h in hs.iter().step_by(5) {
                    let bigger = precompose(h, &sp);
                    let w = SpanEquivWitness::forward(h.clone());
                    let bisim = bisim_from_span_witness(&bigger, &sp, &w).unwrap();
                    assert!(
                        verify_equivalence(&bigger, &sp, &EquivWitness::Bisim(bisim.clone()))
                            .unwrap()
                            .passed()
                    );
                    // The relation is the graph of the witness's get.
                    for p in bisim.relation().elements() {
                        let (x, y) = p.split_pair().unwrap();
                        assert_eq!(&h.get(x).unwrap(), y);
                    }
                    let w = SpanEquivWitness::backward(h.clone());
                    let bisim = bisim_from_span_witness(&sp, &bigger, &w).unwrap();
                    assert!(
                        verify_equivalence(&sp, &bigger, &EquivWitness::Bisim(bisim))
                            .unwrap()
                            .passed()
                    );
                }
            }
        }
    }
}

#[test]
fn graph_construction_rejects_bad_witness() {
    let (sp1, sp2) = (bool_span(), unit_span());
    let creates_false = bxlens::lens::PureLens::new(
        "collapse to false",
        Carrier::bool(),
        Carrier::unit(),
        |_| Ok(Value::Unit),
        |a, _| Ok(a.clone()),
        |_| Ok(Value::Bool(false)),
    );
    let w = SpanEquivWitness::forward(creates_false);
    assert!(matches!(
        bisim_from_span_witness(&sp1, &sp2, &w),
        Err(BxError::InvalidWitness(_))
    ));
    let w = SpanEquivWitness::forward(collapse_lens());
    assert!(bisim_from_span_witness(&sp1, &sp2, &w).is_ok());
}

#[test]
fn verifiers_are_reflexive() {
    for (l, r) in views() {
        for sp in span_corpus(&l, &r) {
            let s = sp.state();
            let iso = IsoWitness::identity(s);
            assert!(
                verify_equivalence(&sp, &sp, &EquivWitness::Iso(iso.clone()))
                    .unwrap()
                    .passed()
            );
            assert!(
                verify_equivalence(&sp, &sp, &EquivWitness::Span(iso.to_span_witness()))
                    .unwrap()
                    .passed()
            );
            let diag = Carrier::product(s, s).filter("diag", |p| {
                let (x, y) = p.split_pair().unwrap();
                x == y
            });
            let w = EquivWitness::Bisim(paired_bisim(&sp, &sp, diag));
            assert!(verify_equivalence(&sp, &sp, &w).unwrap().passed());
        }
    }
}

#[test]
fn bisimulation_is_symmetric() {
    for (l, r) in views() {
        let corpus = span_corpus(&l, &r);
        for sp1 in &corpus {
            for sp2 in &corpus {
                for w in bisimulations(sp1, sp2, &mut budget()).unwrap() {
                    let pairs: Vec<(Value, Value)> = w
                        .relation()
                        .elements()
                        .iter()
                        .map(|p| {
                            let (x, y) = p.split_pair().unwrap();
                            (x.clone(), y.clone())
                        })
                        .collect();
                    let swapped: Vec<Value> = converse(&pairs)
                        .into_iter()
                        .map(|(x, y)| Value::pair(x, y))
                        .collect();
                    let relation = Carrier::new("R'", swapped).unwrap();
                    let back = paired_bisim(sp2, sp1, relation);
                    assert!(verify_equivalence(sp2, sp1, &EquivWitness::Bisim(back))
                        .unwrap()
                        .passed());
                }
            }
        }
    }
}

#[test]
fn bisimilar_spans_without_span_witness() {
    let (sp1, sp2) = create_mismatch_spans();
    let w = create_mismatch_bisim();
    assert!(
        verify_equivalence(&sp1, &sp2, &EquivWitness::Bisim(w.clone()))
            .unwrap()
            .passed()
    );
    assert!(span_steps(&sp1, &sp2, &mut budget()).unwrap().is_empty());
    assert!(matches!(
        span_witness_from_bisim(&sp1, &sp2, &w),
        Err(BxError::NoSpanWitness(_))
    ));
    // Agreement of the two creates survives every single step.
    let agree = |sp: &Span| {
        let v = &sp.left_view().elements()[0];
        sp.left().mcreate(v).unwrap() == sp.right().mcreate(v).unwrap()
    };
    assert!(agree(&sp1) && !agree(&sp2));
    for (l, r) in [views()[0].clone()] {
        for sp in span_corpus(&l, &r) {
            for other in span_corpus(&l, &r) {
                if !span_steps(&sp, &other, &mut budget()).unwrap().is_empty() {
                    assert_eq!(agree(&sp), agree(&other));
                }
            }
        }
    }
}

struct Tally {
    bisims: usize,
    constructed: usize,
    refused: usize,
    direct_broken: usize,
}

fn run_bisim_corpus() -> Tally {
    let mut t = Tally {
        bisims: 0,
        constructed: 0,
        refused: 0,
        direct_broken: 0,
    };
    for (l, r) in views() {
        let corpus = span_corpus(&l, &r);
        for sp1 in &corpus {
            for sp2 in &corpus {
                let single_step = !span_steps(sp1, sp2, &mut budget()).unwrap().is_empty();
                for w in bisimulations(sp1, sp2, &mut budget()).unwrap() {
                    t.bisims += 1;
                    match span_witness_from_bisim(sp1, sp2, &w) {
                        Ok(ls) => {
                            let report = check_lens_span(&ls, sp1, sp2).unwrap();
                            assert!(report.passed(), "{}", report.render_human());
                            t.constructed += 1;
                        }
                        Err(BxError::NoSpanWitness(_)) => {
                            assert!(!single_step, "{} vs {}", sp1.name(), sp2.name());
                            t.refused += 1;
                        }
                        Err(e) => panic!("{e}"),
                    }
                    if let Ok(ls) = direct_span_witness(sp1, sp2, &w) {
                        if !check_lens_span(&ls, sp1, sp2).unwrap().passed() {
                            t.direct_broken += 1;
                        }
                    } else {
                        t.direct_broken += 1;
                    }
                }
            }
        }
    }
    t
}

#[test]
fn bisimulation_to_span_on_small_corpus() {
    let t = run_bisim_corpus();
    assert!(t.bisims > 50, "{}", t.bisims);
    assert!(t.constructed > 0);
    // Pure bisimilarity does not imply span equivalence on this corpus.
    assert!(t.refused > 0);
    // The literal left-legs construction does not always give a witness.
    assert!(t.direct_broken > 0);
}

#[test]
fn graph_then_back_round_trips() {
    for (l, r) in views() {
        let corpus = span_corpus(&l, &r);
        for sp1 in &corpus {
            for sp2 in &corpus {
                for w in span_steps(sp1, sp2, &mut budget()).unwrap() {
                    let b = bisim_from_span_witness(sp1, sp2, &w).unwrap();
                    let ls = span_witness_from_bisim(sp1, sp2, &b).unwrap();
                    assert!(check_lens_span(&ls, sp1, sp2).unwrap().passed());
                }
            }
        }
    }
}

#[test]
fn two_step_chains_normalize() {
    let mut chains = 0;
    for (l, r) in views() {
        let corpus = span_corpus(&l, &r);
        for sp1 in &corpus {
            for sp2 in &corpus {
                let first = span_steps(sp1, sp2, &mut budget()).unwrap();
                if first.is_empty() {
                    continue;
                }
                for sp3 in &corpus {
                    let second = span_steps(sp2, sp3, &mut budget()).unwrap();
                    for w1 in &first {
                        for w2 in &second {
                            let steps = [(sp2.clone(), w1.clone()), (sp3.clone(), w2.clone())];
                            let ls = normalize_equiv_chain(sp1, &steps).unwrap();
                            let report = check_lens_span(&ls, sp1, sp3).unwrap();
                            assert!(report.passed(), "{}", report.render_human());
                            chains += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(chains > 100, "{chains}");
}

#[test]
fn chain_with_bad_step_is_rejected() {
    let (sp1, sp2) = (unit_span(), bool_span());
    let wrong = SpanEquivWitness::forward(collapse_lens());
    assert!(matches!(
        normalize_equiv_chain(&sp1, &[(sp2, wrong)]),
        Err(BxError::InvalidChain(_))
    ));
}

#[test]
fn witnesses_lift_through_composition() {
    let mut rng = StdRng::seed_from_u64(12);
    let (a, b) = (Carrier::int_range(0, 1), Carrier::int_range(0, 1));
    let mut lifted = 0;
    for _ in 0..10 {
        let sp1 = random_span(
            &mut rng,
            &Effect::Identity,
            &Carrier::int_range(0, 1),
            &a,
            &b,
        )
        .unwrap();
        let sp3 = random_span(
            &mut rng,
            &Effect::Identity,
            &Carrier::int_range(0, 1),
            &b,
            &a,
        )
        .unwrap();
        let sp0 = random_span(
            &mut rng,
            &Effect::Identity,
            &Carrier::int_range(0, 1),
            &b,
            &a,
        )
        .unwrap();
        for h in lawful_pure_lenses(&Carrier::int_range(0, 2), sp1.state(), &mut budget()).unwrap()
        {
            let sp2 = precompose(&h, &sp1);
            let w = SpanEquivWitness::backward(h.clone());
            assert!(
                verify_equivalence(&sp1, &sp2, &EquivWitness::Span(w.clone()))
                    .unwrap()
                    .passed()
            );
            let (c1, c2, lw) = lift_witness_right(&w, &sp1, &sp2, &sp3).unwrap();
            let report = verify_equivalence(&c1, &c2, &EquivWitness::Span(lw)).unwrap();
            assert!(report.passed(), "{}", report.render_human());
            let (c1, c2, lw) = lift_witness_left(&w, &sp0, &sp1, &sp2).unwrap();
            let report = verify_equivalence(&c1, &c2, &EquivWitness::Span(lw)).unwrap();
            assert!(report.passed(), "{}", report.render_human());
            lifted += 1;
        }
    }
    assert!(lifted > 0);
}

#[test]
fn identity_span_composition_is_iso_up_to_pairs() {
    let s = Carrier::int_range(0, 1);
    let sp = id_span(&Effect::Maybe, &s);
    let composed = bxlens::spans::compose_span(&sp, &sp).unwrap();
    let w = search_equivalence(EquivKind::Iso, &composed, &sp, 1000)
        .unwrap()
        .expect("iso witness");
    assert!(verify_equivalence(&composed, &sp, &w).unwrap().passed());
}
