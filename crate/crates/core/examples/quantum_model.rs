//! The reference qubit strategy for the outcome-lifted CHSH inequality:
//! its correlation, measurement transforms and JSON round trip.

use liftbell::bell::chsh;
use liftbell::catalog::lo_chsh;
use liftbell::qmodel::{model_from_json, model_to_json, reference_lo_chsh_model, tsirelson_model};

fn main() -> liftbell::Result<()> {
    let t = tsirelson_model();
    t.validate(1e-12)?;
    println!("Tsirelson model, chsh: {:.15}", chsh().value(&t.correlation())?);

    let model = reference_lo_chsh_model();
    model.validate(1e-12)?;
    println!("reference model {:?}, lo-chsh: {:.15}", model.scenario().outcome_table(), lo_chsh().value(&model.correlation())?);

    let grouped = model.group_outcomes(1, 0, 0, 2)?;
    println!("Bob's outcome 2 merged into 0 at input 0: {:?}", grouped.scenario().outcome_table());
    let split = t.split_outcome(1, 0, 0, 0.25)?.split_outcome(1, 1, 0, 0.5)?;
    println!("Tsirelson model with Bob's outcome 0 split, lo-chsh: {:.15}", lo_chsh().value(&split.correlation())?);

    let json = model_to_json(&model);
    let again = model_from_json(&json)?;
    let drift = model
        .correlation()
        .probs()
        .iter()
        .zip(again.correlation().probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("JSON round trip: {} bytes, correlation drift {drift:.1e}", json.len());
    Ok(())
}
