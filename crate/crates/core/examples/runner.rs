// Run two catalog scenarios from an inline config and write the result files.

use cpsg::cli::{run_config, RunConfig};
use cpsg::Result;

const CONFIG: &str = r#"
seed = 11
output_dir = "cpsg-example-out"

[[scenario]]
id = "thm34-holomorphic"
k = 2000
n_hi = 10

[[scenario]]
id = "thm48-equivalence"
"#;

fn run_example() -> Result<i32> {
    let mut cfg = RunConfig::parse(CONFIG, "inline")?;
    cfg.output_dir = std::env::temp_dir().join(format!("cpsg-example-{}", std::process::id()));
    let manifest = run_config(&cfg, Some(1))?;
    for s in &manifest.scenarios {
        println!("{:02} {:<24} {} -> {}", s.index, s.scenario_id, s.verdict.as_str(), s.result_file);
    }
    std::fs::remove_dir_all(&cfg.output_dir)?;
    Ok(manifest.exit_code())
}

fn main() -> Result<()> {
    std::process::exit(run_example()?);
}
