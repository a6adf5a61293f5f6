//! Lenses whose get may have effects do not compose: search for the
//! smallest pair of lawful ones whose composite breaks a law.

use bxlens::mlens::{search_naive_counterexample, NaiveSearch, DEFAULT_SEARCH_BUDGET};
use bxlens::{Carrier, Effect};

fn main() -> bxlens::Result<()> {
    let state = Effect::State(Carrier::bool());
    for (max_source, max_view) in [(1, 1), (1, 2)] {
        match search_naive_counterexample(&state, max_source, max_view, DEFAULT_SEARCH_BUDGET)? {
            NaiveSearch::NotFound { pairs_examined } => {
                println!(
                    "|A| <= {max_source}, |B|,|C| <= {max_view}: none among {pairs_examined} pairs"
                )
            }
            NaiveSearch::Found(cx) => {
                println!("|A| <= {max_source}, |B|,|C| <= {max_view}: found");
                println!("first:\n{}", cx.first.render_tables()?);
                println!("second:\n{}", cx.second.render_tables()?);
                println!("violation: {}", cx.violation);
                println!("re-verified: {}", cx.reverify()?);
            }
        }
    }
    Ok(())
}
