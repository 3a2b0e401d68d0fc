//! Local, nonsignaling and NPA bounds of CHSH and its three liftings.

use std::time::Instant;

use liftbell::bounds::{local_bound, nonsignaling_bound};
use liftbell::catalog::{by_name, NAMES};
use liftbell::npa::quantum_bound;
use liftbell::sdp::SdpSettings;

fn main() -> liftbell::Result<()> {
    let level = "1+AB".parse()?;
    println!("{:<8} {:>6} {:>10} {:>12} {:>10}", "name", "local", "ns", "quantum", "gap");
    for name in NAMES {
        let f = by_name(name).expect("built-in");
        let start = Instant::now();
        let l = local_bound(&f)?;
        let n = nonsignaling_bound(&f)?;
        let q = quantum_bound(&f, &level, &SdpSettings::default())?;
        println!(
            "{name:<8} {:>6} {:>10.6} {:>12.9} {:>10.1e}  ({} words, {} iterations, {:.0?})",
            l.value.to_string(),
            n.value.to_f64(),
            q.value,
            q.gap,
            q.words,
            q.iterations,
            start.elapsed()
        );
    }
    Ok(())
}
