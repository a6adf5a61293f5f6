//! Spans of monadic lenses: two lenses out of a shared state carrier.
//!
//! Spans built by [`join`] and [`smlens2span`] have a state carrier that is a
//! filtered subset (consistent pairs, consistent triples) of a wider product.
//! Their legs are declared over the subset; the same operations over the
//! whole product are kept alongside so that [`check_span_wb`] can report a
//! put that leaves the subset instead of failing on it.

use std::fmt::{self, Write as _};

use crate::effects::Effect;
use crate::error::{BxError, Result};
use crate::lens::id_lens;
use crate::mlens::{check_mlens_laws_on, compose_m, lens2mlens, mlens_difference, MLens};
use crate::report::{LawReport, Violation};
use crate::symmetric::SMLens;
use crate::value::{Carrier, Value};

#[derive(Clone)]
struct Wide {
    carrier: Carrier,
    left: MLens,
    right: MLens,
}

/// `left : state ~> A` and `right : state ~> B` in one effect.
#[derive(Clone)]
pub struct Span {
    name: String,
    state: Carrier,
    left: MLens,
    right: MLens,
    wide: Option<Wide>,
}

impl Span {
    pub fn new(name: impl Into<String>, left: MLens, right: MLens) -> Result<Span> {
        left.effect().expect_same(right.effect(), "span legs")?;
        left.source().expect_same(right.source(), "span legs")?;
        Ok(Span {
            name: name.into(),
            state: left.source().clone(),
            left,
            right,
            wide: None,
        })
    }

    /// Legs given over `wide`, restricted to `state`. Restricted operations
    /// fail with `ConsistencyViolation` when a result leaves `state`.
    fn over_subset(name: String, state: Carrier, wide: Carrier, left: MLens, right: MLens) -> Span {
        Span {
            name,
            left: restrict_leg(&left, &state),
            right: restrict_leg(&right, &state),
            state,
            wide: Some(Wide {
                carrier: wide,
                left,
                right,
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Span {
        self.name = name.into();
        self
    }

    pub fn state(&self) -> &Carrier {
        &self.state
    }

    pub fn left(&self) -> &MLens {
        &self.left
    }

    pub fn right(&self) -> &MLens {
        &self.right
    }

    pub fn effect(&self) -> &Effect {
        self.left.effect()
    }

    pub fn left_view(&self) -> &Carrier {
        self.left.view()
    }

    pub fn right_view(&self) -> &Carrier {
        self.right.view()
    }

    /// The product the state carrier was filtered from, if any.
    pub fn representation(&self) -> Option<&Carrier> {
        self.wide.as_ref().map(|w| &w.carrier)
    }

    fn raw_legs(&self) -> (&MLens, &MLens) {
        match &self.wide {
            Some(w) => (&w.left, &w.right),
            None => (&self.left, &self.right),
        }
    }

    pub fn render_tables(&self) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "span {} : {} <~ {} ~> {} [{}]",
            self.name,
            self.left_view().name(),
            self.state.name(),
            self.right_view().name(),
            self.effect()
        );
        let states: Vec<String> = self
            .state
            .elements()
            .iter()
            .map(|s| s.to_string())
            .collect();
        let _ = writeln!(out, "  states {{ {} }}", states.join(" "));
        for leg in [&self.left, &self.right] {
            for line in leg.render_tables()?.lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Span({} : {} <~ {} ~> {} [{}])",
            self.name,
            self.left_view().name(),
            self.state.name(),
            self.right_view().name(),
            self.effect()
        )
    }
}

fn restrict_leg(raw: &MLens, state: &Carrier) -> MLens {
    let (g, p, c) = (raw.clone(), raw.clone(), raw.clone());
    let (st1, st2) = (state.clone(), state.clone());
    MLens::new(
        raw.name().to_string(),
        raw.effect().clone(),
        state.clone(),
        raw.view().clone(),
        move |s| g.mget(s),
        move |s, a| {
            let m = p.mput(s, a)?;
            inside(&st1, &m.results(), || format!("{} put {s} {a}", p.name()))?;
            Ok(m)
        },
        move |a| {
            let m = c.mcreate(a)?;
            inside(&st2, &m.results(), || format!("{} create {a}", c.name()))?;
            Ok(m)
        },
    )
}

fn inside(state: &Carrier, results: &[&Value], at: impl Fn() -> String) -> Result<()> {
    match results.iter().find(|v| !state.contains(v)) {
        Some(v) => Err(BxError::ConsistencyViolation(format!(
            "{} produced {v}, which is not in {}",
            at(),
            state.name()
        ))),
        None => Ok(()),
    }
}

/// Both legs the lifted identity lens.
pub fn id_span(effect: &Effect, c: &Carrier) -> Span {
    let leg = lens2mlens(effect, &id_lens(c));
    Span::new(format!("id {}", c.name()), leg.clone(), leg).expect("identical legs")
}

/// `ml ◁ sp`: extends the left leg.
pub fn extend_left(ml: &MLens, sp: &Span) -> Result<Span> {
    let left = compose_m(&sp.left, ml)?;
    let name = format!("({} <| {})", ml.name(), sp.name);
    Ok(match &sp.wide {
        None => Span::new(name, left, sp.right.clone())?,
        Some(w) => Span {
            name,
            state: sp.state.clone(),
            left,
            right: sp.right.clone(),
            wide: Some(Wide {
                carrier: w.carrier.clone(),
                left: compose_m(&w.left, ml)?,
                right: w.right.clone(),
            }),
        },
    })
}

/// `sp ▷ ml`: extends the right leg.
pub fn extend_right(sp: &Span, ml: &MLens) -> Result<Span> {
    let right = compose_m(&sp.right, ml)?;
    let name = format!("({} |> {})", sp.name, ml.name());
    Ok(match &sp.wide {
        None => Span::new(name, sp.left.clone(), right)?,
        Some(w) => Span {
            name,
            state: sp.state.clone(),
            left: sp.left.clone(),
            right,
            wide: Some(Wide {
                carrier: w.carrier.clone(),
                left: w.left.clone(),
                right: compose_m(&w.right, ml)?,
            }),
        },
    })
}

/// `l1 ⋈ l2` for a cospan `l1 : S1 ~> B`, `l2 : S2 ~> B`, over the pairs
/// `(s1, s2)` with `l1.mget s1 = l2.mget s2`.
pub fn join(l1: &MLens, l2: &MLens) -> Result<Span> {
    l1.effect().expect_same(l2.effect(), "join")?;
    l1.view().expect_same(l2.view(), "join")?;
    let e = l1.effect().clone();
    let product = Carrier::product(l1.source(), l2.source());
    let state = product.try_filter(
        format!("{}*{}|consistent", l1.source().name(), l2.source().name()),
        |p| {
            let (s1, s2) = p.split_pair()?;
            Ok(l1.mget(s1)? == l2.mget(s2)?)
        },
    )?;

    let (e1, a1, b1) = (e.clone(), l1.clone(), l2.clone());
    let (e2, a2, b2) = (e.clone(), l1.clone(), l2.clone());
    let left = MLens::new(
        "fst",
        e.clone(),
        product.clone(),
        l1.source().clone(),
        |p| Ok(p.split_pair()?.0.clone()),
        move |p, s1n| {
            let (_, s2) = p.split_pair()?;
            let m = b1.mput(s2, &a1.mget(s1n)?)?;
            e1.bind(&m, &mut |s2n| {
                Ok(e1.ret(Value::pair(s1n.clone(), s2n.clone())))
            })
        },
        move |s1| {
            let m = b2.mcreate(&a2.mget(s1)?)?;
            e2.bind(&m, &mut |s2n| {
                Ok(e2.ret(Value::pair(s1.clone(), s2n.clone())))
            })
        },
    );

    let (e3, a3, b3) = (e.clone(), l1.clone(), l2.clone());
    let (e4, a4, b4) = (e.clone(), l1.clone(), l2.clone());
    let right = MLens::new(
        "snd",
        e,
        product.clone(),
        l2.source().clone(),
        |p| Ok(p.split_pair()?.1.clone()),
        move |p, s2n| {
            let (s1, _) = p.split_pair()?;
            let m = a3.mput(s1, &b3.mget(s2n)?)?;
            e3.bind(&m, &mut |s1n| {
                Ok(e3.ret(Value::pair(s1n.clone(), s2n.clone())))
            })
        },
        move |s2| {
            let m = a4.mcreate(&b4.mget(s2)?)?;
            e4.bind(&m, &mut |s1n| {
                Ok(e4.ret(Value::pair(s1n.clone(), s2.clone())))
            })
        },
    );

    Ok(Span::over_subset(
        format!("({} >< {})", l1.name(), l2.name()),
        state,
        product,
        left,
        right,
    ))
}

/// `sp1 ; sp2 = sp1.left ◁ (sp1.right ⋈ sp2.left) ▷ sp2.right`.
pub fn compose_span(sp1: &Span, sp2: &Span) -> Result<Span> {
    sp1.effect().expect_same(sp2.effect(), "span composition")?;
    sp1.right_view()
        .expect_same(sp2.left_view(), "span composition")?;
    let middle = join(&sp1.right, &sp2.left)?;
    let composed = extend_right(&extend_left(&sp1.left, &middle)?, &sp2.right)?;
    Ok(composed.with_name(format!("({} ; {})", sp1.name, sp2.name)))
}

/// The symmetric lens of a span, with complement `Maybe state` (`none`
/// marks the missing complement).
pub fn span2smlens(sp: &Span) -> Result<SMLens> {
    let e = sp.effect().clone();
    let complement = Carrier::maybe(&sp.state);
    let (er, l_r, r_r) = (e.clone(), sp.left.clone(), sp.right.clone());
    let (el, l_l, r_l) = (e.clone(), sp.left.clone(), sp.right.clone());
    SMLens::new(
        format!("span2smlens {}", sp.name),
        e,
        sp.left_view().clone(),
        sp.right_view().clone(),
        complement,
        move |a, c| {
            let m = match c.as_option()? {
                Some(s) => l_r.mput(s, a)?,
                None => l_r.mcreate(a)?,
            };
            er.bind(&m, &mut |s2| {
                Ok(er.ret(Value::pair(r_r.mget(s2)?, Value::some(s2.clone()))))
            })
        },
        move |b, c| {
            let m = match c.as_option()? {
                Some(s) => r_l.mput(s, b)?,
                None => r_l.mcreate(b)?,
            };
            el.bind(&m, &mut |s2| {
                Ok(el.ret(Value::pair(l_l.mget(s2)?, Value::some(s2.clone()))))
            })
        },
        Value::none(),
    )
}

/// Triples `(a, b, c)` with `mputR (a, c) = return (b, c)` and
/// `mputL (b, c) = return (a, c)`.
pub fn consistent_triples(sl: &SMLens) -> Result<Carrier> {
    let e = sl.effect();
    let all = Carrier::product3(sl.left(), sl.right(), sl.complement());
    all.try_filter(format!("{}|consistent", all.name()), |t| {
        let (a, b, c) = (t.component(0)?, t.component(1)?, t.component(2)?);
        let forward = e.eq(&sl.mput_r(a, c)?, &e.ret(Value::pair(b.clone(), c.clone())))?;
        Ok(forward && e.eq(&sl.mput_l(b, c)?, &e.ret(Value::pair(a.clone(), c.clone())))?)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpanWarning {
    /// No consistent triple exists although both views are inhabited.
    EmptyStateWithNonemptyViews { left: usize, right: usize },
    /// The input has effects; the result is only known to be well-behaved
    /// for pure inputs.
    EffectfulInput { effect: String },
}

impl fmt::Display for SpanWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpanWarning::EmptyStateWithNonemptyViews { left, right } => write!(
                f,
                "the consistent state set is empty while the views have {left} and {right} elements"
            ),
            SpanWarning::EffectfulInput { effect } => write!(
                f,
                "input runs in {effect}; well-behavedness of the span is only guaranteed for pure inputs"
            ),
        }
    }
}

/// The span over consistent triples of a monadic symmetric lens.
pub fn smlens2span(sl: &SMLens) -> Result<(Span, Vec<SpanWarning>)> {
    let e = sl.effect().clone();
    let state = consistent_triples(sl)?;
    let all = Carrier::product3(sl.left(), sl.right(), sl.complement());

    let (e1, s1) = (e.clone(), sl.clone());
    let (e2, s2) = (e.clone(), sl.clone());
    let left = MLens::new(
        "triple.left",
        e.clone(),
        all.clone(),
        sl.left().clone(),
        |t| Ok(t.component(0)?.clone()),
        move |t, a| {
            let m = s1.mput_r(a, t.component(2)?)?;
            e1.bind(&m, &mut |bc| {
                let (b, c) = bc.split_pair()?;
                Ok(e1.ret(Value::triple(a.clone(), b.clone(), c.clone())))
            })
        },
        move |a| {
            let m = s2.mput_r(a, s2.missing())?;
            e2.bind(&m, &mut |bc| {
                let (b, c) = bc.split_pair()?;
                Ok(e2.ret(Value::triple(a.clone(), b.clone(), c.clone())))
            })
        },
    );

    let (e3, s3) = (e.clone(), sl.clone());
    let (e4, s4) = (e.clone(), sl.clone());
    let right = MLens::new(
        "triple.right",
        e.clone(),
        all.clone(),
        sl.right().clone(),
        |t| Ok(t.component(1)?.clone()),
        move |t, b| {
            let m = s3.mput_l(b, t.component(2)?)?;
            e3.bind(&m, &mut |ac| {
                let (a, c) = ac.split_pair()?;
                Ok(e3.ret(Value::triple(a.clone(), b.clone(), c.clone())))
            })
        },
        move |b| {
            let m = s4.mput_l(b, s4.missing())?;
            e4.bind(&m, &mut |ac| {
                let (a, c) = ac.split_pair()?;
                Ok(e4.ret(Value::triple(a.clone(), b.clone(), c.clone())))
            })
        },
    );

    let mut warnings = Vec::new();
    if state.is_empty() && !sl.left().is_empty() && !sl.right().is_empty() {
        warnings.push(SpanWarning::EmptyStateWithNonemptyViews {
            left: sl.left().len(),
            right: sl.right().len(),
        });
    }
    if !e.is_identity() {
        warnings.push(SpanWarning::EffectfulInput {
            effect: e.to_string(),
        });
    }
    let span = Span::over_subset(
        format!("smlens2span {}", sl.name()),
        state,
        all,
        left,
        right,
    );
    Ok((span, warnings))
}

/// Both legs' laws over the state carrier, plus, for spans with a filtered
/// state carrier, an audit that puts and creates stay inside it.
///
/// When that filtered carrier is empty the leg laws are also read over the
/// whole product, where a leg that cannot put anything back shows up as an
/// MGetPut failure rather than passing vacuously.
pub fn check_span_wb(sp: &Span) -> Result<LawReport> {
    let mut report = LawReport::new(format!("span {} [{}]", sp.name, sp.effect()));
    let (raw_l, raw_r) = sp.raw_legs();
    report.absorb("left", check_mlens_laws_on(raw_l, sp.state.elements())?);
    report.absorb("right", check_mlens_laws_on(raw_r, sp.state.elements())?);
    let Some(w) = &sp.wide else {
        return Ok(report);
    };
    audit(&mut report, "left.Consistency", raw_l, &sp.state)?;
    audit(&mut report, "right.Consistency", raw_r, &sp.state)?;
    if sp.state.is_empty() && !w.carrier.is_empty() {
        report.note(format!(
            "state carrier {} is empty; leg laws also read over all {} elements of {}",
            sp.state.name(),
            w.carrier.len(),
            w.carrier.name()
        ));
        report.absorb("left", check_mlens_laws_on(raw_l, w.carrier.elements())?);
        report.absorb("right", check_mlens_laws_on(raw_r, w.carrier.elements())?);
    }
    Ok(report)
}

fn audit(report: &mut LawReport, law: &str, leg: &MLens, state: &Carrier) -> Result<()> {
    report.declare(law);
    let e = leg.effect();
    let expected = format!("results within {}", state.name());
    for s in state.elements() {
        for a in leg.view().elements() {
            let m = leg.mput(s, a)?;
            let ok = m.results().iter().all(|v| state.contains(v));
            report.record(law, ok, || {
                Violation::new(
                    law,
                    vec![("s".into(), s.clone()), ("a".into(), a.clone())],
                    e.render(&m),
                    expected.clone(),
                )
            });
        }
    }
    for a in leg.view().elements() {
        let m = leg.mcreate(a)?;
        let ok = m.results().iter().all(|v| state.contains(v));
        report.record(law, ok, || {
            Violation::new(
                law,
                vec![("a".into(), a.clone())],
                e.render(&m),
                expected.clone(),
            )
        });
    }
    Ok(())
}

/// The first point where two spans over the same state carrier differ.
pub fn span_difference(sp1: &Span, sp2: &Span) -> Result<Option<String>> {
    if let Some(d) = mlens_difference(&sp1.left, &sp2.left)? {
        return Ok(Some(format!("left leg: {d}")));
    }
    Ok(mlens_difference(&sp1.right, &sp2.right)?.map(|d| format!("right leg: {d}")))
}
