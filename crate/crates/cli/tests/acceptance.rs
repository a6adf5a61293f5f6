//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use bxlens::corpus::{
    bisimulations, lawful_pure_lenses, lawful_pure_slenses, lawful_pure_spans, lawful_smlenses,
    random_lawful_mlens, random_span, span_steps,
};
use bxlens::effects::{check_commutative, check_membership_laws, FiniteMonoid};
use bxlens::equivalence::{
    bisim_from_span_witness, check_lens_span, normalize_equiv_chain, search_equivalence,
    span_witness_from_bisim, verify_equivalence, EquivKind, EquivWitness,
};
use bxlens::fixtures::{bool_span, create_mismatch_bisim, create_mismatch_spans, unit_span};
use bxlens::lens::{check_pure_laws, compose_pure, id_lens, LensTable, PureLens};
use bxlens::mlens::{
    abs_lens, abs_lens_over, check_mlens_laws, check_put_lens_laws, compose_m, const_mlens,
    lens2mlens, log_lens, mlens_difference, search_naive_counterexample, Budget, MLens,
    NaiveSearch, PutLens, DEFAULT_SEARCH_BUDGET,
};
use bxlens::spans::{
    check_span_wb, compose_span, consistent_triples, join, smlens2span, span2smlens, Span,
    SpanWarning,
};
use bxlens::symmetric::{check_smlens_laws, compose_sm, fail_smlens, set_bool, SMLens};
use bxlens::{Bounds, BxError, Carrier, Effect, EffectValue, Monoid, Value};
use bxlens_cli::parse;
use bxlens_cli::render;
use rand::rngs::StdRng;
use rand::SeedableRng;

/// Budget for corpus enumeration; generous, since every corpus here is tiny.
const CORPUS_BUDGET: u64 = 50_000_000;
/// Budget for the equivalence searches on fixtures.
const EQUIV_BUDGET: u64 = 1_000_000;
/// Minimum number of composed pairs for the monadic composition criterion.
const MIN_MONADIC_PAIRS: usize = 200;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn budget() -> Budget {
    Budget::new("corpus", CORPUS_BUDGET)
}

fn ints(hi: i64) -> Carrier {
    Carrier::int_range(0, hi)
}

fn lawful(a: &Carrier, b: &Carrier) -> Vec<PureLens> {
    lawful_pure_lenses(a, b, &mut budget()).unwrap()
}

// Oracle straight from the tables, independent of the checker.
fn lawful_by_table(t: &LensTable, na: usize, nb: usize) -> bool {
    (0..na).all(|a| t.put[a][t.get[a]] == a)
        && (0..na).all(|a| (0..nb).all(|b| t.get[t.put[a][b]] == b))
        && (0..nb).all(|b| t.get[t.create[b]] == b)
}

fn pure_closure() -> Outcome {
    let sizes = [ints(0), ints(1)];
    let mut pairs = 0;
    for a in &sizes {
        for b in &sizes {
            for c in &sizes {
                for l1 in lawful(a, b) {
                    for l2 in lawful(b, c) {
                        let l = compose_pure(&l1, &l2).unwrap();
                        let report = check_pure_laws(&l).unwrap();
                        ensure(report.passed(), || report.render_human())?;
                        ensure(
                            lawful_by_table(&l.tabulate().unwrap(), a.len(), c.len()),
                            || format!("table oracle rejects {}", l.name()),
                        )?;
                        pairs += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{pairs} composed pairs, 0 failures"))
}

fn pure_corpus() -> Vec<PureLens> {
    let cs = [ints(0), ints(1), ints(2)];
    let mut out = Vec::new();
    for a in &cs {
        for b in &cs[..2] {
            out.extend(lawful(a, b));
        }
    }
    out
}

fn monadic_corpus(effect: &Effect, rng: &mut StdRng) -> Vec<MLens> {
    let cs = [ints(0), ints(1), ints(2)];
    let mut out = Vec::new();
    if *effect == Effect::Maybe {
        out.push(abs_lens(1).unwrap());
        out.push(const_mlens(&cs[2], &cs[2], Value::Int(1), Value::Int(0)).unwrap());
        out.push(const_mlens(&cs[2], &cs[0], Value::Int(0), Value::Int(2)).unwrap());
    }
    for l in pure_corpus().into_iter().step_by(7) {
        out.push(lens2mlens(effect, &l));
    }
    for a in &cs {
        for b in cs.iter().filter(|b| b.len() <= a.len()) {
            for _ in 0..4 {
                out.push(random_lawful_mlens(rng, effect, a, b, &Bounds::default()).unwrap());
            }
        }
    }
    out
}

fn monadic_closure() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut pairs = 0;
    for effect in [Effect::Maybe, Effect::State(Carrier::bool())] {
        let corpus = monadic_corpus(&effect, &mut rng);
        for l in &corpus {
            ensure(check_mlens_laws(l).unwrap().passed(), || {
                format!("corpus lens {} is unlawful", l.name())
            })?;
        }
        for l1 in &corpus {
            for l2 in corpus
                .iter()
                .filter(|l2| l1.view().same_elements(l2.source()))
            {
                let l = compose_m(l1, &l2.with_source(l1.view().clone())).unwrap();
                let report = check_mlens_laws(&l).unwrap();
                ensure(report.passed(), || {
                    format!("{effect}: {}", report.render_human())
                })?;
                pairs += 1;
            }
        }
    }
    ensure(pairs >= MIN_MONADIC_PAIRS, || format!("only {pairs} pairs"))?;
    Ok(format!(
        "{pairs} composed pairs over maybe and state Bool, 0 failures"
    ))
}

fn every_effect() -> Vec<Effect> {
    vec![
        Effect::Identity,
        Effect::Maybe,
        Effect::List,
        Effect::Writer(Monoid::FreeList(ints(1))),
        Effect::Writer(Monoid::Multiset(ints(1))),
        Effect::Writer(Monoid::Finite(FiniteMonoid::xor())),
        Effect::Writer(Monoid::Finite(FiniteMonoid::or())),
        Effect::State(Carrier::bool()),
    ]
}

fn lifting() -> Outcome {
    let corpus = pure_corpus();
    let effects = every_effect();
    for e in &effects {
        for l in &corpus {
            let report = check_mlens_laws(&lens2mlens(e, l)).unwrap();
            ensure(report.passed(), || {
                format!("{e} {}: {}", l.name(), report.render_human())
            })?;
        }
    }
    Ok(format!(
        "{} lenses x {} effects, 0 failures",
        corpus.len(),
        effects.len()
    ))
}

fn gallery() -> Outcome {
    let abs = abs_lens(3).unwrap();
    let constant = const_mlens(
        &ints(2),
        &Carrier::int_range(6, 8),
        Value::Int(7),
        Value::Int(0),
    )
    .unwrap();
    let log = log_lens(&id_lens(&ints(2)));
    for l in [&abs, &constant, &log] {
        let report = check_mlens_laws(l).unwrap();
        ensure(report.passed(), || report.render_human())?;
    }
    let wide = abs_lens_over(Carrier::int_range(-5, 5), Carrier::int_range(-5, 5));
    let p1 = wide.mput(&Value::Int(-3), &Value::Int(5)).unwrap();
    let p2 = wide.mput(&Value::Int(4), &Value::Int(-2)).unwrap();
    let (s1, s2) = (Effect::Maybe.render(&p1), Effect::Maybe.render(&p2));
    ensure(p1 == EffectValue::Maybe(Some(Value::Int(-5))), || {
        format!("mput(-3, 5) = {s1}")
    })?;
    ensure(p2 == EffectValue::Maybe(None), || {
        format!("mput(4, -2) = {s2}")
    })?;
    Ok(format!(
        "abs, const and log lenses lawful; mput(-3, 5) = {s1}, mput(4, -2) = {s2}"
    ))
}

fn set_bool_composite() -> Outcome {
    for b in [true, false] {
        let report = check_smlens_laws(&set_bool(b)).unwrap();
        ensure(report.passed(), || report.render_human())?;
    }
    let report =
        check_smlens_laws(&compose_sm(&set_bool(true), &set_bool(false)).unwrap()).unwrap();
    let v = report
        .violation("PutRLM")
        .ok_or("composite passes PutRLM")?;
    let d = v
        .divergence
        .as_ref()
        .ok_or("no state divergence recorded")?;
    ensure(
        d.lhs_final == Value::Bool(true) && d.rhs_final == Value::Bool(false),
        || format!("final states {} / {}", d.lhs_final, d.rhs_final),
    )?;
    Ok(format!(
        "PutRLM fails; final states lhs {} rhs {}",
        d.lhs_final, d.rhs_final
    ))
}

fn commutative_writers() -> Outcome {
    let unit = Carrier::unit();
    let monoids = [
        Monoid::Finite(FiniteMonoid::xor()),
        Monoid::Finite(FiniteMonoid::or()),
        Monoid::Multiset(ints(1)),
    ];
    let mut pairs = 0;
    for m in monoids {
        let effect = Effect::Writer(m);
        let mut corpus = Vec::new();
        for c in [ints(0), ints(1)] {
            corpus.extend(
                lawful_smlenses(
                    &effect,
                    &unit,
                    &unit,
                    &c,
                    &Value::Int(0),
                    &Bounds::default(),
                    &mut budget(),
                )
                .unwrap(),
            );
        }
        ensure(corpus.len() > 2, || format!("{effect}: corpus too small"))?;
        for sl1 in &corpus {
            for sl2 in &corpus {
                let report = check_smlens_laws(&compose_sm(sl1, sl2).unwrap()).unwrap();
                ensure(report.passed(), || {
                    format!("{effect}: {}", report.render_human())
                })?;
                pairs += 1;
            }
        }
    }
    let state = Effect::State(Carrier::bool());
    let report = check_commutative(&state, &unit, &Bounds::default()).unwrap();
    ensure(!report.commutative, || {
        "state Bool reported commutative".into()
    })?;
    let w = report.witness.ok_or("no commutativity witness")?;
    ensure(
        w.first_shown == "set T" && w.second_shown == "set F",
        || format!("witness ({}, {})", w.first_shown, w.second_shown),
    )?;
    Ok(format!(
        "{pairs} writer composites lawful; state Bool not commutative, witness ({}, {})",
        w.first_shown, w.second_shown
    ))
}

fn span_effects() -> Vec<Effect> {
    vec![
        Effect::Identity,
        Effect::Maybe,
        Effect::State(Carrier::bool()),
    ]
}

fn joins_and_span_composition() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let cs = [ints(0), ints(1), ints(2)];
    let mut joins = 0;
    for e in span_effects() {
        for s1 in &cs {
            for s2 in &cs {
                for b in cs.iter().filter(|b| b.len() <= s1.len().min(s2.len())) {
                    for _ in 0..3 {
                        let l1 =
                            random_lawful_mlens(&mut rng, &e, s1, b, &Bounds::default()).unwrap();
                        let l2 =
                            random_lawful_mlens(&mut rng, &e, s2, b, &Bounds::default()).unwrap();
                        let report = check_span_wb(&join(&l1, &l2).unwrap()).unwrap();
                        ensure(report.passed(), || {
                            format!("join {e}: {}", report.render_human())
                        })?;
                        joins += 1;
                    }
                }
            }
        }
    }
    let mut squares = 0;
    for b in [ints(0), ints(1)] {
        for s1 in &cs {
            for s2 in &cs {
                for p1 in lawful(s1, &b) {
                    for p2 in lawful(s2, &b) {
                        let (l1, l2) = (
                            lens2mlens(&Effect::Identity, &p1),
                            lens2mlens(&Effect::Identity, &p2),
                        );
                        let sp = join(&l1, &l2).unwrap();
                        let via_first = compose_m(sp.left(), &l1).unwrap();
                        let via_second = compose_m(sp.right(), &l2).unwrap();
                        if let Some(d) = mlens_difference(&via_first, &via_second).unwrap() {
                            return Err(format!("square does not commute: {d}"));
                        }
                        squares += 1;
                    }
                }
            }
        }
    }
    let mut composites = 0;
    for e in span_effects() {
        for _ in 0..25 {
            let sp1 = random_span(&mut rng, &e, &ints(2), &ints(1), &ints(1)).unwrap();
            let sp2 = random_span(&mut rng, &e, &ints(1), &ints(1), &ints(0)).unwrap();
            let report = check_span_wb(&compose_span(&sp1, &sp2).unwrap()).unwrap();
            ensure(report.passed(), || {
                format!("compose {e}: {}", report.render_human())
            })?;
            composites += 1;
        }
    }
    Ok(format!(
        "{joins} joins, {squares} pure squares, {composites} span composites, 0 failures"
    ))
}

fn span_symmetric_conversions() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let cs = [ints(0), ints(1), ints(2)];
    let mut spans = 0;
    for e in span_effects() {
        for s in &cs {
            for a in cs.iter().filter(|a| a.len() <= s.len()) {
                for b in cs.iter().filter(|b| b.len() <= s.len()) {
                    for _ in 0..2 {
                        let sp = random_span(&mut rng, &e, s, a, b).unwrap();
                        let report = check_smlens_laws(&span2smlens(&sp).unwrap()).unwrap();
                        ensure(report.passed(), || {
                            format!("{e}: {}", report.render_human())
                        })?;
                        spans += 1;
                    }
                }
            }
        }
    }
    let small = [ints(0), ints(1)];
    let mut slenses = 0;
    for a in &small {
        for b in &small {
            for c in &small {
                for sl in lawful_pure_slenses(a, b, c, &Value::Int(0), &mut budget()).unwrap() {
                    let (sp, _) = smlens2span(&SMLens::lift(&Effect::Identity, &sl)).unwrap();
                    let report = check_span_wb(&sp).unwrap();
                    ensure(report.passed(), || report.render_human())?;
                    slenses += 1;
                }
            }
        }
    }
    let fail = fail_smlens();
    let triples = consistent_triples(&fail).unwrap();
    ensure(triples.is_empty(), || {
        format!("{} consistent triples", triples.len())
    })?;
    let (sp, warnings) = smlens2span(&fail).unwrap();
    ensure(
        warnings.contains(&SpanWarning::EmptyStateWithNonemptyViews { left: 1, right: 1 }),
        || "no empty-state warning".into(),
    )?;
    let report = check_span_wb(&sp).unwrap();
    let v = report
        .violation("left.MGetPut")
        .ok_or("no MGetPut violation")?;
    ensure(v.lhs == "nothing", || format!("MGetPut lhs {}", v.lhs))?;
    Ok(format!(
        "{spans} spans to lawful smlenses, {slenses} pure slenses to lawful spans; fail: 0 triples, MGetPut lhs {} rhs {}",
        v.lhs, v.rhs
    ))
}

fn span_corpus(left: &Carrier, right: &Carrier) -> Vec<Span> {
    let mut out = Vec::new();
    for state in [
        Carrier::symbols("P", &["p"]).unwrap(),
        Carrier::symbols("Q", &["q0", "q1"]).unwrap(),
    ] {
        out.extend(lawful_pure_spans(&state, left, right, &mut budget()).unwrap());
    }
    out
}

fn view_pairs() -> Vec<(Carrier, Carrier)> {
    vec![(ints(0), ints(0)), (ints(0), ints(1)), (ints(1), ints(1))]
}

fn strictness_and_inclusions() -> Outcome {
    let (sp1, sp2) = (bool_span(), unit_span());
    ensure(
        search_equivalence(EquivKind::Iso, &sp1, &sp2, EQUIV_BUDGET)
            .unwrap()
            .is_none(),
        || "iso witness found between Bool and unit states".into(),
    )?;
    let Some(EquivWitness::Span(w)) =
        search_equivalence(EquivKind::Span, &sp1, &sp2, EQUIV_BUDGET).unwrap()
    else {
        return Err("no span witness on the Bool/unit fixture".into());
    };
    let report = verify_equivalence(&sp1, &sp2, &EquivWitness::Span(w.clone())).unwrap();
    ensure(report.passed(), || report.render_human())?;
    let bisim = bisim_from_span_witness(&sp1, &sp2, &w).unwrap();
    let report = verify_equivalence(&sp1, &sp2, &EquivWitness::Bisim(bisim)).unwrap();
    ensure(report.passed(), || report.render_human())?;
    let fixture = format!(
        "fixture: iso none, span witness create () = {}, bisim verifies",
        w.lens.create(&Value::Unit).unwrap()
    );

    let (mut bisims, mut constructed, mut refused) = (0, 0, 0);
    for (l, r) in view_pairs() {
        let corpus = span_corpus(&l, &r);
        for a in &corpus {
            for b in &corpus {
                for bw in bisimulations(a, b, &mut budget()).unwrap() {
                    bisims += 1;
                    match span_witness_from_bisim(a, b, &bw) {
                        Ok(ls) => {
                            let report = check_lens_span(&ls, a, b).unwrap();
                            ensure(report.passed(), || report.render_human())?;
                            constructed += 1;
                        }
                        Err(BxError::NoSpanWitness(_)) => refused += 1,
                        Err(e) => return Err(e.to_string()),
                    }
                }
            }
        }
    }
    let (m1, m2) = create_mismatch_spans();
    let mw = create_mismatch_bisim();
    let mismatch_verifies = verify_equivalence(&m1, &m2, &EquivWitness::Bisim(mw.clone()))
        .unwrap()
        .passed();
    let mismatch_refused = matches!(
        span_witness_from_bisim(&m1, &m2, &mw),
        Err(BxError::NoSpanWitness(_))
    );
    let pairs: Vec<String> = mw
        .relation()
        .elements()
        .iter()
        .map(|p| p.to_string())
        .collect();
    let tally =
        format!("{bisims} pure bisimulations, {constructed} span witnesses, {refused} with none");
    if refused == 0 {
        return Ok(format!("{fixture}; {tally}"));
    }
    Err(format!(
        "{fixture}; {tally}. Witness: spans {} / {} related by {{{}}} (verifies: {mismatch_verifies}) have no span witness \
         (refused: {mismatch_refused}); left.create = right.create holds for one and not the other and every lens step \
         preserves it",
        m1.name(),
        m2.name(),
        pairs.join(", ")
    ))
}

fn chain_normalization() -> Outcome {
    let mut chains = 0;
    for (l, r) in view_pairs() {
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
                            ensure(report.passed(), || report.render_human())?;
                            chains += 1;
                        }
                    }
                }
            }
        }
    }
    ensure(chains > 0, || "no chains generated".into())?;
    Ok(format!("{chains} two-step chains normalized, 0 failures"))
}

fn naive_counterexample() -> Outcome {
    let state = Effect::State(Carrier::bool());
    match search_naive_counterexample(&state, 1, 1, DEFAULT_SEARCH_BUDGET).unwrap() {
        NaiveSearch::Found(cx) => {
            let again = cx.reverify().unwrap();
            ensure(again, || "violation does not re-verify".into())?;
            Ok(format!("|A| = |B| = 1: {} re-verifies", cx.violation.law))
        }
        NaiveSearch::NotFound { pairs_examined } => {
            let larger = match search_naive_counterexample(&state, 1, 2, DEFAULT_SEARCH_BUDGET).unwrap() {
                NaiveSearch::Found(cx) => format!(
                    "smallest counterexample at |A| = 1, |B|,|C| <= 2: {} (lhs {}, rhs {}), re-verified {}",
                    cx.violation.law,
                    cx.violation.lhs,
                    cx.violation.rhs,
                    cx.reverify().unwrap()
                ),
                NaiveSearch::NotFound { .. } => "none at |A| = 1, |B|,|C| <= 2 either".into(),
            };
            Err(format!(
                "|A| = |B| = 1: no counterexample among {pairs_examined} pairs; {larger}"
            ))
        }
    }
}

fn membership_and_put_lenses() -> Outcome {
    for e in [Effect::Maybe, Effect::List] {
        let report = check_membership_laws(&e, &ints(1), &Bounds::default()).unwrap();
        ensure(report.passed(), || {
            format!("{e}: {}", report.render_human())
        })?;
    }
    let c3 = ints(2);
    for l in [
        abs_lens(3).unwrap(),
        const_mlens(&c3, &c3, Value::Int(1), Value::Int(0)).unwrap(),
    ] {
        let report = check_put_lens_laws(&PutLens::from_mlens(&l).unwrap()).unwrap();
        ensure(report.passed(), || {
            format!("{}: {}", l.name(), report.render_human())
        })?;
    }
    Ok("membership laws for maybe and list; abs and const as put-lenses".into())
}

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn cli_contract() -> Outcome {
    type Demo<'a> = (&'a str, i32, &'a [&'a str]);
    let demos: [Demo; 4] = [
        (
            "setbool-compose",
            1,
            &["witness: PutRLM from initial state F: lhs final state T, rhs final state F"],
        ),
        (
            "fail-span",
            1,
            &[
                "consistent triples (0): {}",
                "witness: left.MGetPut lhs = nothing, rhs = just ((), (), ())",
            ],
        ),
        (
            "bool-unit-equiv",
            0,
            &["iso witness: not found", "span.found=true", "span.create=T"],
        ),
        (
            "naive-compose-search",
            1,
            &[
                "search.1x1=not_found",
                "search.1x2=found",
                "counterexample.reverified=true",
            ],
        ),
    ];
    for (name, code, lines) in demos {
        let out = Command::new(env!("CARGO_BIN_EXE_bxlens"))
            .args(["demo", name])
            .output()
            .unwrap();
        let stdout = String::from_utf8_lossy(&out.stdout);
        ensure(out.status.code() == Some(code), || {
            format!("demo {name} exited {:?}", out.status.code())
        })?;
        for l in lines {
            ensure(stdout.lines().any(|x| x == *l), || {
                format!("demo {name} lacks `{l}`")
            })?;
        }
    }
    let mut files = 0;
    for entry in std::fs::read_dir(fixtures_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "lens") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let first = parse(&text).map_err(|d| format!("{}:{d}", path.display()))?;
        let rendered = render(&first.file);
        let second = parse(&rendered).map_err(|d| format!("rendered {}:{d}", path.display()))?;
        ensure(first.file == second.file, || {
            format!("{} does not round-trip", path.display())
        })?;
        ensure(render(&second.file) == rendered, || {
            format!("{} renders differently", path.display())
        })?;
        files += 1;
    }
    Ok(format!(
        "4 demos with expected codes and witness lines; {files} fixture files round-trip"
    ))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("pure composition preserves the lens laws", pure_closure),
        (
            "monadic composition preserves the lens laws",
            monadic_closure,
        ),
        ("lifted pure lenses are lawful under every effect", lifting),
        ("abs, const and log lens gallery", gallery),
        ("set-bool composite breaks PutRLM", set_bool_composite),
        (
            "commutative writers compose; state does not commute",
            commutative_writers,
        ),
        (
            "join, pure squares and span composition",
            joins_and_span_composition,
        ),
        (
            "span and symmetric lens conversions",
            span_symmetric_conversions,
        ),
        (
            "strictness and inclusions of the equivalences",
            strictness_and_inclusions,
        ),
        ("two-step chains normalize to one span", chain_normalization),
        (
            "naive lens composition counterexample at |A| = |B| = 1",
            naive_counterexample,
        ),
        ("membership laws and put-lenses", membership_and_put_lenses),
        ("command-line contract", cli_contract),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let total = Instant::now();
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {title} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {title} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        total.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
