// Build the two diagonal families and a custom list, and inspect them.

use cpsg::spectral_models::{build_spectrum, parse_custom_list, FamilySpec, SpectrumModel};
use cpsg::Result;

fn run_example() -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for spec in [FamilySpec::crandall_pazy(2.0, 8), FamilySpec::polynomial_decay(1.0, 8)] {
        let m = build_spectrum(&spec)?;
        let ev = m.eigenvalues();
        lines.push(format!(
            "{:?}: K={} beta={:?} growth={:.3} first={:.3} last={:.3}",
            m.family(),
            m.truncation(),
            m.nominal_beta(),
            m.growth_bound(),
            ev[0],
            ev[ev.len() - 1],
        ));
    }

    // custom spectra: one eigenvalue per line, "re im" or "re"
    let ev = parse_custom_list("1 0\n2 3\n# comment\n0.5 -1\n", "inline")?;
    let m = SpectrumModel::diagonal(ev)?;
    lines.push(format!("custom: stable={} digest={}", m.is_stable(), &m.digest()[..12]));
    Ok(lines)
}

fn main() -> Result<()> {
    for l in run_example()? {
        println!("{l}");
    }
    Ok(())
}
