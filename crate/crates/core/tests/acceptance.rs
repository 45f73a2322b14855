//! One pass/fail line per acceptance criterion. Runs the catalog scenarios with
//! the criterion's parameters and reads the recorded checks.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cpsg::cli::{check_scenario, Check, Outcome};

const SEED: u64 = 0;

fn run(id: &str, overrides: &[(&str, toml::Value)]) -> (Outcome, Duration) {
    let o: Vec<(String, toml::Value)> = overrides.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    let start = Instant::now();
    let out = check_scenario(id, &o, SEED).unwrap_or_else(|e| panic!("{id}: {e}"));
    (out, start.elapsed())
}

/// All checks under the prefixes, failing when a prefix matched nothing or the scenario errored.
fn select<'a>(out: &'a Outcome, prefixes: &[&str]) -> (Vec<&'a Check>, Vec<String>) {
    let mut checks = Vec::new();
    let mut problems = Vec::new();
    if let Some(e) = &out.error {
        problems.push(format!("{}: error {e}", out.scenario_id));
    }
    for p in prefixes {
        let found = out.checks_with(p);
        if found.is_empty() {
            problems.push(format!("{}: no check named {p}*", out.scenario_id));
        }
        checks.extend(found);
    }
    for c in &checks {
        if !c.passed() {
            problems.push(format!(
                "{} = {:.6e} [{:?}, {:?}] {}",
                c.name,
                c.value,
                c.lower,
                c.upper,
                c.verdict.as_str()
            ));
        }
    }
    (checks, problems)
}

struct Line {
    number: usize,
    title: &'static str,
    detail: String,
    problems: Vec<String>,
}

fn holomorphic_rate() -> Line {
    let (out, t) = run(
        "thm34-holomorphic",
        &[
            ("gamma", 1.0.into()),
            ("k", 2000.into()),
            ("alpha", 1.0.into()),
            ("omega", 1.0.into()),
            ("n_lo", 5.into()),
            ("n_hi", 12.into()),
        ],
    );
    let mut problems = Vec::new();
    let fitted = out.checks_with("fit:cn_decay").first().map_or(f64::NAN, |c| c.value);
    if !(0.90..=1.05).contains(&fitted) {
        problems.push(format!("exponent {fitted:.4} outside [0.90, 1.05]"));
    }
    if t >= Duration::from_secs(10) {
        problems.push(format!("runtime {t:.2?} >= 10 s"));
    }
    if let Some(e) = &out.error {
        problems.push(e.clone());
    }
    let truncated = out.results.iter().any(|r| r.truncation_hit);
    Line {
        number: 1,
        title: "holomorphic rate",
        detail: format!("exponent {fitted:.4} in [0.90, 1.05], {t:.2?}, truncation reached: {truncated}"),
        problems,
    }
}

fn cp_cayley_rate() -> Line {
    let (out, t) = run(
        "thm41-no-log",
        &[
            ("gamma", 2.0.into()),
            ("k", 2000.into()),
            ("n_lo", 5.into()),
            ("n_hi", 12.into()),
            ("tolerance", 0.07.into()),
        ],
    );
    let (checks, mut problems) = select(&out, &["fit:cn_constant", "fit:cn_alternating"]);
    if t >= Duration::from_secs(30) {
        problems.push(format!("runtime {t:.2?} >= 30 s"));
    }
    let fits: Vec<String> = checks.iter().map(|c| format!("{:.4}", c.value)).collect();
    Line {
        number: 2,
        title: "Crandall-Pazy Cayley rate",
        detail: format!("exponents {} vs 2/3 +- 0.07, {t:.2?}", fits.join(", ")),
        problems,
    }
}

fn inverse_rate() -> Line {
    let (out, _) = run(
        "thm42-inverse-equiv",
        &[
            ("gamma", 2.0.into()),
            ("k", 10_000.into()),
            ("alpha", 1.0.into()),
            ("t_lo", 5.into()),
            ("t_hi", 14.into()),
            ("tolerance", 0.07.into()),
        ],
    );
    let (checks, problems) = select(&out, &["fit:inverse_gen"]);
    Line {
        number: 3,
        title: "inverse-generator rate",
        detail: format!("exponent {:.4} vs 2/3 +- 0.07", checks[0].value),
        problems,
    }
}

fn characterizations() -> Line {
    let (out, _) = run(
        "thm23-characterizations",
        &[
            ("k", 100_000.into()),
            ("beta_tolerance", 0.08.into()),
            ("drift_max", 0.01.into()),
            ("wrong_shift", 0.2.into()),
            ("growth_min", 2.0.into()),
        ],
    );
    let (checks, problems) = select(&out, &["beta:", "condition:"]);
    let worst_beta = checks.iter().filter(|c| c.name.starts_with("beta:")).map(|c| c.value).fold(0.0, f64::max);
    let worst_drift = checks.iter().filter(|c| c.name.ends_with(":drift")).map(|c| c.value).fold(0.0, f64::max);
    let min_growth =
        checks.iter().filter(|c| c.name.ends_with(":divergence_growth")).map(|c| c.value).fold(f64::INFINITY, f64::min);
    Line {
        number: 4,
        title: "characterization agreement",
        detail: format!("max beta gap {worst_beta:.4}, max drift {worst_drift:.2e}, min growth {min_growth:.2}"),
        problems,
    }
}

fn oracles(selftest: &Outcome) -> Line {
    let (checks, problems) = select(selftest, &["oracle:", "sup:", "junction:"]);
    let detail = checks.iter().map(|c| format!("{} {:.1e}", c.name, c.value)).collect::<Vec<_>>().join(", ");
    Line { number: 5, title: "closed forms vs quadrature", detail, problems }
}

fn calculus() -> Line {
    let (out, _) = run(
        "appendix-dcalc",
        &[("k", 32.into()), ("max_error", 1e-5.into()), ("s_values", toml::Value::Array(vec![0.0.into(), 1.0.into()]))],
    );
    let (checks, problems) = select(&out, &["bcalc:", "dcalc:"]);
    let worst = checks.iter().map(|c| c.value).fold(0.0, f64::max);
    Line {
        number: 6,
        title: "B/D-calculus reproduction",
        detail: format!("{} checks, max error {worst:.2e}", checks.len()),
        problems,
    }
}

fn envelopes(selftest: &Outcome) -> Line {
    let (out, _) = run("thm36-cp-rate", &[("env_n_lo", 3.into()), ("env_n_hi", 9.into())]);
    let (f, mut problems) = select(&out, &["envelope:F"]);
    let (rest, more) = select(selftest, &["fta:", "v_bound:"]);
    problems.extend(more);
    Line {
        number: 7,
        title: "norm-envelope properties",
        detail: format!("{} F-envelope checks, {} fta/v checks", f.len(), rest.len()),
        problems,
    }
}

fn lower_bounds() -> Line {
    let (sec, _) = run("sec44-lower-subsequence", &[("gamma", 1.0.into()), ("alpha", 1.0.into())]);
    let (prop, _) = run("prop35-lower-bound", &[]);
    let (a, mut problems) = select(&sec, &["cayley:"]);
    let (b, more) = select(&prop, &["normal:"]);
    problems.extend(more);
    let w = |cs: &[&Check]| cs.iter().find(|c| c.name.ends_with(":witness")).map_or(f64::NAN, |c| c.value);
    Line {
        number: 8,
        title: "lower bounds",
        detail: format!("subsequence witness {:.4}, normal witness {:.4}", w(&a), w(&b)),
        problems,
    }
}

fn identities(selftest: &Outcome) -> Line {
    let (out, _) =
        run("thm48-equivalence", &[("max_dim", 8.into()), ("eta_max", 1000.0.into()), ("identity_max", 1e-10.into())]);
    let (a, mut problems) = select(&out, &["identity:"]);
    let (b, more) = select(selftest, &["moment:"]);
    problems.extend(more);
    Line {
        number: 9,
        title: "identity checks",
        detail: format!("resolvent identity {:.2e}, moment ratio {:.12}", a[0].value, b[0].value),
        problems,
    }
}

fn beta_asymptotics(selftest: &Outcome) -> Line {
    let (checks, problems) = select(selftest, &["beta:alpha="]);
    let worst = checks.iter().map(|c| c.value).fold(0.0, f64::max);
    Line {
        number: 10,
        title: "beta asymptotics",
        detail: format!("max |n^a B(n+1,a) - Gamma(a)| {worst:.2e}"),
        problems,
    }
}

fn polynomial() -> Line {
    let (out, _) = run("prop47-poly", &[("beta", 1.0.into()), ("tolerance", 0.07.into())]);
    let (checks, problems) = select(&out, &["fit:poly_inverse", "fit:poly_cayley"]);
    let fits: Vec<String> = checks.iter().map(|c| format!("{:.4}", c.value)).collect();
    Line {
        number: 11,
        title: "polynomial-decay analogue",
        detail: format!("exponents {} vs 1/3 +- 0.07", fits.join(", ")),
        problems,
    }
}

fn main() -> ExitCode {
    let (selftest, _) = run(
        "norms-selftest",
        &[
            ("oracle_rel", 1e-6.into()),
            ("sup_rel", 1e-8.into()),
            ("junction_rel", 1e-10.into()),
            ("beta_n", 10_000.into()),
            ("beta_tol", 1e-3.into()),
            ("moment_vectors", 1000.into()),
        ],
    );
    let lines = vec![
        holomorphic_rate(),
        cp_cayley_rate(),
        inverse_rate(),
        characterizations(),
        oracles(&selftest),
        calculus(),
        envelopes(&selftest),
        lower_bounds(),
        identities(&selftest),
        beta_asymptotics(&selftest),
        polynomial(),
    ];
    let mut failed = 0;
    for l in &lines {
        let verdict = if l.problems.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {}: {}", l.number, l.title, l.detail);
        for p in &l.problems {
            println!("    {p}");
        }
        failed += usize::from(!l.problems.is_empty());
    }
    println!("{} of {} criteria passed", lines.len() - failed, lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
