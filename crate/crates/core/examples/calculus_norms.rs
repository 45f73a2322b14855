// Function-space norms of calculus kernels, closed-form sups and the rate envelopes.

use cpsg::calculus_norms::{
    b0_norm, ds_norm, fta_sup_closed, g_sup_closed, rate_envelope_eval, sup_derivative, weighted_b0_norm, xi1,
    RateEnvelope, WeightPhiQ,
};
use cpsg::kernels::{Anchor, KernelSpec, OmegaSequence};
use cpsg::quadrature::scan_max;
use cpsg::Result;

fn run_example() -> Result<Vec<(String, f64)>> {
    let one = OmegaSequence::constant(1.0)?;
    let f = |n| KernelSpec::Fnaw { n, alpha: 1.0, c: 1.0, omegas: one.clone(), anchor: Anchor::Min };
    let mut rows = Vec::new();
    for n in [16, 64] {
        rows.push((format!("B0 norm n={n}"), b0_norm(&f(n), 1e-10)?.value));
        rows.push((format!("phi_q norm q=1/2 n={n}"), weighted_b0_norm(&f(n), WeightPhiQ::new(0.5)?, 1e-10)?.value));
        rows.push((format!("D_2 norm n={n}"), ds_norm(&f(n), 2.0, 1e-8)?.value));
    }

    let x = xi1(64, 1.0, 1.0, 1.0);
    let xi = 2.0 * x.value;
    let g = |s: f64| ((xi + 0.0).powi(2) + s).powf(32.0) / ((xi + 2.0).powi(2) + s).powf(33.0);
    rows.push(("xi1(64)".into(), x.value));
    rows.push(("g sup numeric".into(), scan_max(g, 0.0, 1e8, 20_000)));
    rows.push(("g sup closed".into(), g_sup_closed(xi, 64, 1.0, 1.0, 1.0)?));
    rows.push(("sup |f'| on Re z = xi".into(), sup_derivative(&f(64), xi)?));
    rows.push(("fta sup closed".into(), fta_sup_closed(2.0, 8.0, 1.0)?));
    rows.push(("F_{1,1/2}(64)".into(), rate_envelope_eval(RateEnvelope::FAlphaQ { alpha: 1.0, q: 0.5 }, 64.0)?));
    Ok(rows)
}

fn main() -> Result<()> {
    for (k, v) in run_example()? {
        println!("{k:<24} {v:.10}");
    }
    Ok(())
}
