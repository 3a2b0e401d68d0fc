//! Ranges of the input-lifted CHSH value over the local, nonsignaling and
//! quantum sets at fixed values of Bob's marginal correlator.

use liftbell::catalog::{bob_marginal_correlator, li_chsh};
use liftbell::slice::Slice;

fn main() -> liftbell::Result<()> {
    let slice = Slice::new(li_chsh(), bob_marginal_correlator(), "1+AB".parse()?)?;
    let grid: Vec<f64> = (0..=8).map(|i| -1.0 + i as f64 / 4.0).collect();
    println!("set  pinned      min         max");
    for row in slice.rows(&grid) {
        match row.range {
            Ok(r) => println!("{}  {:>6.3}  {:>10.6}  {:>10.6}", row.set, row.pinned_value, r.min, r.max),
            Err(e) => println!("{}  {:>6.3}  {e}", row.set, row.pinned_value),
        }
    }
    Ok(())
}
