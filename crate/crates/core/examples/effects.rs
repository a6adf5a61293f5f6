//! Monad laws, commutativity and membership for the built-in effects.

use bxlens::effects::{check_commutative, check_membership_laws, check_monad_laws, FiniteMonoid};
use bxlens::{Bounds, Carrier, Effect, Monoid};

fn main() -> bxlens::Result<()> {
    let bounds = Bounds::default();
    let bits = Carrier::int_range(0, 1);
    let effects = [
        Effect::Identity,
        Effect::Maybe,
        Effect::List,
        Effect::Writer(Monoid::Finite(FiniteMonoid::xor())),
        Effect::State(Carrier::bool()),
    ];
    for e in &effects {
        let laws = check_monad_laws(e, &bits, &bounds)?;
        println!(
            "{e}: monad laws {}",
            if laws.passed() { "hold" } else { "fail" }
        );
        println!("  {}", check_commutative(e, &Carrier::unit(), &bounds)?);
    }
    for e in [Effect::Maybe, Effect::List] {
        print!(
            "{}",
            check_membership_laws(&e, &bits, &bounds)?.render_human()
        );
    }
    Ok(())
}
