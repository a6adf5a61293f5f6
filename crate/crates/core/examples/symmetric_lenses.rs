//! Symmetric lenses with effects: two lawful state-setting lenses whose
//! composite is not lawful, and a commutative writer where composition is.

use bxlens::corpus::lawful_smlenses;
use bxlens::effects::FiniteMonoid;
use bxlens::mlens::Budget;
use bxlens::symmetric::{check_smlens_laws, compose_sm, set_bool};
use bxlens::{Bounds, Carrier, Effect, Monoid, Value};

fn main() -> bxlens::Result<()> {
    for b in [true, false] {
        print!("{}", check_smlens_laws(&set_bool(b))?.render_human());
    }
    let composite = compose_sm(&set_bool(true), &set_bool(false))?;
    let report = check_smlens_laws(&composite)?;
    print!("{}", report.render_human());
    if let Some(d) = report
        .violation("PutRLM")
        .and_then(|v| v.divergence.as_ref())
    {
        println!(
            "from state {}: left ends in {}, right ends in {}",
            d.initial, d.lhs_final, d.rhs_final
        );
    }

    let xor = Effect::Writer(Monoid::Finite(FiniteMonoid::xor()));
    let unit = Carrier::unit();
    let mut budget = Budget::new("writer lenses", 1_000_000);
    let lenses = lawful_smlenses(
        &xor,
        &unit,
        &unit,
        &Carrier::int_range(0, 1),
        &Value::Int(0),
        &Bounds::default(),
        &mut budget,
    )?;
    let mut failures = 0;
    for l1 in &lenses {
        for l2 in &lenses {
            failures += usize::from(!check_smlens_laws(&compose_sm(l1, l2)?)?.passed());
        }
    }
    println!(
        "{} lawful xor-writer lenses, {} unlawful composites",
        lenses.len(),
        failures
    );
    Ok(())
}
