// Weighted resolvent integral condition on a Crandall-Pazy family: finite at the model's β,
// growing with K once β is overstated.

use cpsg::integral_conditions::{condition_iii_value, plancherel_sides};
use cpsg::spectral_models::{build_spectrum, FamilySpec};
use cpsg::Result;

fn run_example() -> Result<Vec<(usize, f64, f64)>> {
    let gamma = 2.0;
    let beta = 1.0 / gamma;
    let mut rows = Vec::new();
    for k in [500, 1000, 2000, 4000] {
        let model = build_spectrum(&FamilySpec::crandall_pazy(gamma, k))?;
        let at = condition_iii_value(&model, beta, 0.4, 0.5)?.sup_value;
        let over = condition_iii_value(&model, beta + 0.2, 0.4, 0.5)?.sup_value;
        rows.push((k, at, over));
    }
    let model = build_spectrum(&FamilySpec::crandall_pazy(gamma, 16))?;
    let p = plancherel_sides(&model, beta, 0.4, 2.0, 5)?;
    println!(
        "plancherel: resolvent {:.10} semigroup {:.10} closed {:.10}",
        p.resolvent_side, p.semigroup_side, p.closed_form
    );
    Ok(rows)
}

fn main() -> Result<()> {
    println!("K      beta        beta+0.2");
    for (k, at, over) in run_example()? {
        println!("{k:<6} {at:<11.5} {over:.5}");
    }
    Ok(())
}
