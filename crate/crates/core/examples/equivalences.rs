//! The three span equivalences and the constructions between them.

use bxlens::equivalence::{
    bisim_from_span_witness, check_lens_span, normalize_equiv_chain, search_equivalence,
    span_witness_from_bisim, verify_equivalence, EquivKind, EquivWitness,
};
use bxlens::fixtures::{bool_span, create_mismatch_bisim, create_mismatch_spans, unit_span};
use bxlens::Value;

fn main() -> bxlens::Result<()> {
    let (sp1, sp2) = (unit_span(), bool_span());
    let iso = search_equivalence(EquivKind::Iso, &sp1, &sp2, 10_000)?;
    println!(
        "iso witness: {}",
        if iso.is_some() { "found" } else { "none" }
    );
    let Some(EquivWitness::Span(w)) = search_equivalence(EquivKind::Span, &sp1, &sp2, 10_000)?
    else {
        return Ok(());
    };
    let created = w.lens.create(&Value::Unit)?;
    println!(
        "span witness ({}): {}, create () = {created}",
        w.direction,
        w.lens.name()
    );

    let bisim = bisim_from_span_witness(&sp1, &sp2, &w)?;
    println!("relation: {:?}", bisim.relation());
    print!(
        "{}",
        verify_equivalence(&sp1, &sp2, &EquivWitness::Bisim(bisim.clone()))?.render_human()
    );
    let back = span_witness_from_bisim(&sp1, &sp2, &bisim)?;
    print!("{}", check_lens_span(&back, &sp1, &sp2)?.render_human());

    let chain = normalize_equiv_chain(&sp1, &[(sp2.clone(), w)])?;
    print!("{}", check_lens_span(&chain, &sp1, &sp2)?.render_human());

    // Bisimilar, yet no span of lenses relates them.
    let (p, q) = create_mismatch_spans();
    let r = create_mismatch_bisim();
    print!(
        "{}",
        verify_equivalence(&p, &q, &EquivWitness::Bisim(r.clone()))?.render_human()
    );
    match span_witness_from_bisim(&p, &q, &r) {
        Ok(_) => println!("span witness constructed"),
        Err(e) => println!("{e}"),
    }
    Ok(())
}
