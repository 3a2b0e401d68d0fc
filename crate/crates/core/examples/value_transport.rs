//! Moves the Tsirelson point through the correlation maps that pair with
//! each lifting and prints the Bell value on both sides.

use liftbell::bell::chsh;
use liftbell::bounds::local_bound;
use liftbell::catalog::{lo_chsh, tsirelson_point};
use liftbell::lifting::{coarse_grain, condition_on_party, embed_with_deterministic_party, lift_outcome, lift_party, split_outcome, LocalBoundCheck};

fn main() -> liftbell::Result<()> {
    let p = tsirelson_point();
    println!("chsh at the Tsirelson point: {:.12}", chsh().value(&p)?);

    let lifted = split_outcome(&split_outcome(&p, 1, 0, 0, 0.3)?, 1, 1, 0, 0.8)?;
    println!("Bob's outcome 0 split on both inputs, lo-chsh: {:.12}", lo_chsh().value(&lifted)?);
    let back = coarse_grain(&coarse_grain(&lifted, 1, 0, 0, 2)?, 1, 1, 0, 2)?;
    println!("coarse-grained back, chsh: {:.12}", chsh().value(&back)?);

    let lo = lift_outcome(&chsh(), 1, 1, 0)?;
    let q = split_outcome(&p, 1, 1, 0, 0.6)?;
    println!("outcome lift at input 1, split 0.6: {:.12}", lo.value(&q)?);

    let seed = chsh().shift_to_zero_local_bound(local_bound(&chsh())?.value);
    let tripartite = lift_party(&seed, &[2, 2], (0, 1), LocalBoundCheck::Require)?;
    let embedded = embed_with_deterministic_party(&p, &[2, 2], 1)?;
    println!("shifted chsh {:.12}, party lift on the embedding {:.12}", seed.value(&p)?, tripartite.value(&embedded)?);
    let (conditioned, marginal) = condition_on_party(&embedded, 2, (0, 1), 1e-12)?;
    println!("conditioned on the third party (marginal {marginal}): {:.12}", seed.value(&conditioned)?);
    Ok(())
}
