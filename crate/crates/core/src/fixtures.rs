//! Named small objects used by the demos, examples and tests.

use crate::effects::{Effect, EffectValue};
use crate::equivalence::{paired_bisim, BisimWitness};
use crate::lens::PureLens;
use crate::mlens::{compose_m, lens2mlens, MLens};
use crate::spans::{id_span, Span};
use crate::value::{Carrier, Value};

/// `Bool ~> ()` forgetting the flag; `create` picks `true`.
pub fn collapse_lens() -> PureLens {
    PureLens::new(
        "collapse",
        Carrier::bool(),
        Carrier::unit(),
        |_| Ok(Value::Unit),
        |a, _| Ok(a.clone()),
        |_| Ok(Value::Bool(true)),
    )
}

/// The identity span over the unit carrier.
pub fn unit_span() -> Span {
    id_span(&Effect::Identity, &Carrier::unit()).with_name("unit")
}

/// [`unit_span`] with both legs precomposed with [`collapse_lens`]: its
/// state is `Bool`, so it cannot be isomorphic to [`unit_span`].
pub fn bool_span() -> Span {
    let h = lens2mlens(&Effect::Identity, &collapse_lens());
    let sp = unit_span();
    Span::new(
        "bool",
        compose_m(&h, sp.left())
            .expect("views align")
            .with_name("left"),
        compose_m(&h, sp.right())
            .expect("views align")
            .with_name("right"),
    )
    .expect("legs share Bool")
}

fn unit_leg(name: &str, state: &Carrier, created: Value) -> MLens {
    MLens::new(
        name,
        Effect::Identity,
        state.clone(),
        Carrier::unit(),
        |_| Ok(Value::Unit),
        |s, _| Ok(EffectValue::Identity(s.clone())),
        move |_| Ok(EffectValue::Identity(created.clone())),
    )
}

/// Two pure spans with unit views that are bisimilar but have no span
/// witness in either direction.
///
/// The first is the identity span over `{p}`. The second has state
/// `{x, y}`, puts that keep the state, and creates that disagree: the left
/// leg creates `y`, the right leg creates `x`. Whether the two creates agree
/// is preserved by precomposing with a full lens, so no chain of single
/// steps can link a span where they agree to one where they do not.
pub fn create_mismatch_spans() -> (Span, Span) {
    let one = Carrier::symbols("P", &["p"]).expect("one symbol");
    let two = Carrier::symbols("XY", &["x", "y"]).expect("distinct symbols");
    let sp1 = Span::new(
        "agreeing",
        unit_leg("left", &one, Value::sym("p")),
        unit_leg("right", &one, Value::sym("p")),
    )
    .expect("legs share P");
    let sp2 = Span::new(
        "disagreeing",
        unit_leg("left", &two, Value::sym("y")),
        unit_leg("right", &two, Value::sym("x")),
    )
    .expect("legs share XY");
    (sp1, sp2)
}

/// The full relation `{(p, x), (p, y)}` between [`create_mismatch_spans`].
pub fn create_mismatch_bisim() -> BisimWitness {
    let (sp1, sp2) = create_mismatch_spans();
    let relation = Carrier::product(sp1.state(), sp2.state()).renamed("R");
    paired_bisim(&sp1, &sp2, relation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{search_equivalence, verify_equivalence, EquivKind, EquivWitness};

    #[test]
    fn mismatch_pair_is_bisimilar_only() {
        let (sp1, sp2) = create_mismatch_spans();
        let w = EquivWitness::Bisim(create_mismatch_bisim());
        assert!(verify_equivalence(&sp1, &sp2, &w).unwrap().passed());
        assert!(search_equivalence(EquivKind::Span, &sp1, &sp2, 10_000)
            .unwrap()
            .is_none());
    }
}
