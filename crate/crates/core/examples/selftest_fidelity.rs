//! Lower bounds on the swap fidelity versus the observed Bell value, for
//! CHSH and its outcome lifting.

use std::time::Instant;

use liftbell::bell::chsh;
use liftbell::catalog::lo_chsh;
use liftbell::sdp::SdpSettings;
use liftbell::selftest::{metric_functional, selftest_curve, Metric, Mode, SelftestProblem};

fn main() -> liftbell::Result<()> {
    let level = "1+AB".parse()?;
    let top = 2.0 * 2f64.sqrt() - 1e-5;
    let grid: Vec<f64> = (0..=8).map(|i| 2.0 + (top - 2.0) * i as f64 / 8.0).collect();
    for (name, f) in [("chsh", chsh()), ("lo-chsh", lo_chsh())] {
        let start = Instant::now();
        let metric = metric_functional(Metric::Fidelity, f.scenario())?;
        let problem = SelftestProblem::new(&f, metric, &level);
        println!(
            "{name}: {} words, {} moment classes ({:.1?} to build)",
            problem.structure.size(),
            problem.structure.classes().len(),
            start.elapsed()
        );
        for p in selftest_curve(&problem, &grid, Mode::Equality, &SdpSettings::default()) {
            match p.result {
                Ok(r) => println!("  {:.6}  {:.6}  gap {:.1e}  iters {}  {}", p.bell_value, r.bound, r.gap, r.iterations, r.status),
                Err(e) => println!("  {:.6}  failed: {e}", p.bell_value),
            }
        }
        println!("  ({:.1?})", start.elapsed());
    }
    Ok(())
}
