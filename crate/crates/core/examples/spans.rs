//! Spans of monadic lenses: join, composition and the two conversions
//! to and from symmetric lenses.

use bxlens::corpus::random_span;
use bxlens::spans::{check_span_wb, compose_span, smlens2span, span2smlens};
use bxlens::symmetric::{check_smlens_laws, fail_smlens};
use bxlens::{Carrier, Effect};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn main() -> bxlens::Result<()> {
    let mut rng = StdRng::seed_from_u64(1);
    let e = Effect::State(Carrier::bool());
    let bits = Carrier::int_range(0, 1);
    let sp1 = random_span(&mut rng, &e, &Carrier::int_range(0, 2), &bits, &bits)?;
    let sp2 = random_span(&mut rng, &e, &Carrier::int_range(0, 1), &bits, &bits)?;
    let sp = compose_span(&sp1, &sp2)?;
    println!("composite state: {:?}", sp.state());
    print!("{}", check_span_wb(&sp)?.render_human());
    print!("{}", check_smlens_laws(&span2smlens(&sp)?)?.render_human());

    let (failing, warnings) = smlens2span(&fail_smlens())?;
    println!("fail: {} consistent triples", failing.state().len());
    for w in &warnings {
        println!("warning: {w}");
    }
    print!("{}", check_span_wb(&failing)?.render_human());
    Ok(())
}
