//! Swap-method bounds on how close the measurements are to the ideal qubit
//! ones, as a function of the observed outcome-lifted CHSH value.

use liftbell::catalog::lo_chsh;
use liftbell::sdp::SdpSettings;
use liftbell::selftest::{metric_functional, selftest_curve, Metric, Mode, SelftestProblem};

fn main() -> liftbell::Result<()> {
    let f = lo_chsh();
    let level = "1+AB".parse()?;
    let top = 2.0 * 2f64.sqrt() - 1e-5;
    let grid = [2.5, 2.7, 2.8, top];
    for metric in [Metric::Tau, Metric::Tau3, Metric::Tau1] {
        let problem = SelftestProblem::new(&f, metric_functional(metric, f.scenario())?, &level);
        println!("{metric}");
        for mode in [Mode::Equality, Mode::AtLeast] {
            for p in selftest_curve(&problem, &grid, mode, &SdpSettings::default()) {
                match p.result {
                    Ok(r) => println!("  {mode:?} {:.6}  {:.6}  gap {:.1e}", p.bell_value, r.bound, r.gap),
                    Err(e) => println!("  {mode:?} {:.6}  failed: {e}", p.bell_value),
                }
            }
        }
    }
    Ok(())
}
