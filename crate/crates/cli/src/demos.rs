//! Built-in counterexamples and separations.

use bxlens::equivalence::{
    bisim_from_span_witness, search_equivalence, verify_equivalence, EquivKind, EquivWitness,
};
use bxlens::fixtures::{bool_span, unit_span};
use bxlens::mlens::{search_naive_counterexample, NaiveSearch};
use bxlens::spans::{check_span_wb, consistent_triples, smlens2span};
use bxlens::symmetric::{check_smlens_laws, compose_sm, fail_smlens, set_bool};
use bxlens::{Carrier, Effect};

use crate::commands::{DemoName, Settings};
use crate::export::Exporter;
use crate::format::render;
use crate::report::{Outcome, Report};

pub fn run(name: DemoName, settings: &Settings) -> Outcome {
    let result = match name {
        DemoName::SetboolCompose => setbool_compose(),
        DemoName::FailSpan => fail_span(),
        DemoName::BoolUnitEquiv => bool_unit_equiv(settings),
        DemoName::NaiveComposeSearch => naive_compose_search(settings),
    };
    match result {
        Ok(r) => r.finish(),
        Err(e) => Outcome::usage(e.to_string()),
    }
}

fn setbool_compose() -> bxlens::Result<Report> {
    let mut r = Report::new("demo setbool-compose");
    let (first, second) = (set_bool(true), set_bool(false));
    r.laws("first", &check_smlens_laws(&first)?);
    r.laws("second", &check_smlens_laws(&second)?);
    let composite = compose_sm(&first, &second)?;
    let report = check_smlens_laws(&composite)?;
    r.laws("composite", &report);
    if let Some(d) = report
        .violation("PutRLM")
        .and_then(|v| v.divergence.as_ref())
    {
        r.line(format!(
            "witness: PutRLM from initial state {}: lhs final state {}, rhs final state {}",
            d.initial, d.lhs_final, d.rhs_final
        ));
    }
    Ok(r)
}

fn fail_span() -> bxlens::Result<Report> {
    let mut r = Report::new("demo fail-span");
    let sl = fail_smlens();
    r.laws("input", &check_smlens_laws(&sl)?);
    let triples = consistent_triples(&sl)?;
    r.line(format!("consistent triples ({}): {{}}", triples.len()));
    r.key("consistent_triples", triples.len());
    let (sp, warnings) = smlens2span(&sl)?;
    for w in &warnings {
        r.line(format!("warning: {w}"));
    }
    let report = check_span_wb(&sp)?;
    r.laws("span", &report);
    if let Some(v) = report.violation("left.MGetPut") {
        r.line(format!(
            "witness: left.MGetPut lhs = {}, rhs = {}",
            v.lhs, v.rhs
        ));
    }
    Ok(r)
}

fn bool_unit_equiv(settings: &Settings) -> bxlens::Result<Report> {
    let mut r = Report::new("demo bool-unit-equiv");
    let (sp1, sp2) = (bool_span(), unit_span());
    let budget = settings.equiv_budget();
    r.line(format!(
        "spans: {} over {} and {} over {}",
        sp1.name(),
        sp1.state(),
        sp2.name(),
        sp2.state()
    ));
    match search_equivalence(EquivKind::Iso, &sp1, &sp2, budget)? {
        None => {
            r.line("iso witness: not found");
            r.key("iso.found", false);
        }
        Some(_) => {
            r.line("iso witness: found, but the state spaces differ in size");
            r.key("iso.found", true);
            r.fail();
        }
    }
    let Some(EquivWitness::Span(w)) = search_equivalence(EquivKind::Span, &sp1, &sp2, budget)?
    else {
        r.line("span witness: not found");
        r.key("span.found", false);
        r.fail();
        return Ok(r);
    };
    r.key("span.found", true);
    let (unit, h) = (&bxlens::Value::Unit, &w.lens);
    r.line(format!(
        "span witness ({}): {} with create () = {}",
        w.direction,
        h.name(),
        h.create(unit)?
    ));
    r.key("span.create", h.create(unit)?);
    let mut ex = Exporter::new();
    if ex.witness("h", &w).is_ok() {
        r.text(&render(&ex.finish()));
    }
    r.laws(
        "span",
        &verify_equivalence(&sp1, &sp2, &EquivWitness::Span(w.clone()))?,
    );
    let bisim = bisim_from_span_witness(&sp1, &sp2, &w)?;
    let pairs: Vec<String> = bisim
        .relation()
        .elements()
        .iter()
        .map(|p| p.to_string())
        .collect();
    r.line(format!(
        "bisimulation from the span witness: {{{}}}",
        pairs.join(", ")
    ));
    r.laws(
        "bisim",
        &verify_equivalence(&sp1, &sp2, &EquivWitness::Bisim(bisim))?,
    );
    Ok(r)
}

fn naive_compose_search(settings: &Settings) -> bxlens::Result<Report> {
    let mut r = Report::new("demo naive-compose-search");
    let state = Effect::State(Carrier::bool());
    r.line(format!("effect: {state}"));
    for (max_source, max_view) in [(1, 1), (1, 2)] {
        let key = format!("search.{max_source}x{max_view}");
        match search_naive_counterexample(&state, max_source, max_view, settings.search_budget())? {
            NaiveSearch::NotFound { pairs_examined } => {
                r.line(format!(
                    "|A| <= {max_source}, |B|,|C| <= {max_view}: no counterexample among {pairs_examined} pairs"
                ));
                r.key(&key, "not_found");
                r.key(&format!("{key}.pairs"), pairs_examined);
            }
            NaiveSearch::Found(cx) => {
                r.line(format!(
                    "|A| <= {max_source}, |B|,|C| <= {max_view}: counterexample"
                ));
                r.key(&key, "found");
                r.line("first:");
                r.text(&cx.first.render_tables()?);
                r.line("second:");
                r.text(&cx.second.render_tables()?);
                r.line("composite:");
                r.text(&cx.composite.render_tables()?);
                r.line(format!("witness: {}", cx.violation));
                let again = cx.reverify()?;
                r.line(format!("re-verified: {again}"));
                r.key("counterexample.law", &cx.violation.law);
                r.key("counterexample.lhs", &cx.violation.lhs);
                r.key("counterexample.rhs", &cx.violation.rhs);
                r.key("counterexample.reverified", again);
                r.fail();
                break;
            }
        }
    }
    Ok(r)
}
