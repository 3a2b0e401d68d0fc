//! Input, outcome and party liftings of CHSH, checked against exact local bounds.

use liftbell::bell::chsh;
use liftbell::bell::format::functional_to_json;
use liftbell::bounds::local_bound;
use liftbell::lifting::{apply_steps, LiftStep};

fn main() -> liftbell::Result<()> {
    let steps: Vec<LiftStep> = serde_json::from_str(
        r#"[
            {"op": "input", "party": 0, "inputs": [2, 2, 2]},
            {"op": "outcome", "party": 1, "input": 0, "outcome": 1},
            {"op": "shift"},
            {"op": "party", "anchor": [0, 0], "outcomes": [2, 2]}
        ]"#,
    )
    .expect("valid steps");
    let mut f = chsh();
    println!("seed {:?}: local bound {}", f.scenario().outcome_table(), local_bound(&f)?.value);
    for step in &steps {
        f = step.apply(&f)?;
        println!("{step:?}\n  -> {:?}: local bound {}", f.scenario().outcome_table(), local_bound(&f)?.value);
    }
    assert_eq!(apply_steps(&chsh(), &steps)?, f);
    println!("{} terms, {} bytes of JSON", f.num_terms(), functional_to_json(&f).len());
    Ok(())
}
