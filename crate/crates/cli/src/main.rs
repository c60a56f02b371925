use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subfinsler::scenario::{self, Command, ScenarioConfig, ScenarioError};

/// Normal curves, branching and face-stability certificates on sub-Finsler
/// Lie groups, driven by JSON scenario files.
#[derive(Parser, Debug)]
#[command(name = "subfinsler", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Integrate one normal curve; writes CSV, metadata and a summary.
    Integrate(Common),
    /// Integrate two normal curves and report where they branch.
    Branch(Common),
    /// Face-stability certificates for polyhedral normal curves.
    Certify(Common),
    /// The four-piece Heisenberg curve shorter than exp(t X3).
    Shortcut(Common),
    /// Face lattice and star covering of a polyhedral unit ball.
    Faces(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed of the scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the step of the scenario.
    #[arg(long)]
    step: Option<f64>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

fn prepare(command: Command, args: &Common) -> Result<ScenarioConfig, ScenarioError> {
    let mut config = ScenarioConfig::load(&args.config)?.with_command(command)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(step) = args.step {
        config.step = Some(step);
    }
    Ok(config)
}

fn execute(cli: &Cli) -> i32 {
    let (command, args) = match &cli.command {
        Cmd::Integrate(a) => (Command::Integrate, a),
        Cmd::Branch(a) => (Command::Branch, a),
        Cmd::Certify(a) => (Command::Certify, a),
        Cmd::Shortcut(a) => (Command::Shortcut, a),
        Cmd::Faces(a) => (Command::Faces, a),
    };
    let result = match prepare(command, args) {
        Ok(config) => scenario::run_or_report(&config, &args.out),
        Err(e) => {
            let _ = std::fs::create_dir_all(&args.out);
            let _ = std::fs::write(args.out.join("error.json"), format!("{:#}\n", e.to_json()));
            Err(e)
        }
    };
    match result {
        Ok(summary) => {
            if !args.quiet {
                for f in &summary.files {
                    println!("{}", f.display());
                }
            }
            0
        }
        Err(e) => {
            eprintln!("subfinsler: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(execute(&Cli::parse()) as u8)
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;

    fn scenario(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
    }

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("subfinsler").chain(args.iter().copied())).unwrap()
    }

    fn error_json(dir: &Path) -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(dir.join("error.json")).unwrap()).unwrap()
    }

    #[test]
    fn overrides_replace_seed_and_step() {
        let path = scenario("affine_half.json");
        let c = cli(&["integrate", "--config", path.to_str().unwrap(), "--seed", "9", "--step", "0.5"]);
        let Cmd::Integrate(args) = &c.command else { panic!() };
        let config = prepare(Command::Integrate, args).unwrap();
        assert_eq!(config.seed, 9);
        assert_eq!(config.step, Some(0.5));
        assert_eq!(args.out, PathBuf::from("out"));
    }

    #[test]
    fn integrate_writes_its_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let path = scenario("affine_half.json");
        let c = cli(&["integrate", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--step", "0.01", "--quiet"]);
        assert_eq!(execute(&c), 0);
        for f in ["affine_half.config.json", "affine_half.summary.json", "affine_half.csv", "affine_half.json"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        assert!(!dir.path().join("error.json").exists());
    }

    #[test]
    fn conflicting_subcommand_exits_with_two() {
        let dir = tempfile::tempdir().unwrap();
        let path = scenario("affine_half.json");
        let c = cli(&["branch", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(execute(&c), 2);
        assert_eq!(error_json(dir.path())["kind"], "config");
    }

    #[test]
    fn unreadable_or_malformed_configs_exit_with_two() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.json");
        let c = cli(&["faces", "--config", missing.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(execute(&c), 2);
        let bad = dir.path().join("bad.json");
        std::fs::write(&bad, r#"{"name": "bad", "command": "faces", "norm": {"family": "l7", "dim": 2}}"#).unwrap();
        let c = cli(&["faces", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(execute(&c), 2);
        assert_eq!(error_json(dir.path())["exit_code"], 2);
    }

    #[test]
    fn face_thrashing_exits_with_three_and_lists_events() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("thrash.json");
        std::fs::write(
            &cfg,
            r#"{"name": "thrash", "command": "integrate", "group": "heisenberg",
                "norm": {"family": "linf", "dim": 3}, "lambda": [0.3, -0.1, 0.6],
                "horizon": 6.0, "step": 0.001, "max_switches": 0}"#,
        )
        .unwrap();
        let out = dir.path().join("out");
        let c = cli(&["integrate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--quiet"]);
        assert_eq!(execute(&c), 3);
        let e = error_json(&out);
        assert_eq!(e["kind"], "numeric");
        assert_eq!(e["events"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn missing_config_flag_is_a_usage_error() {
        assert!(Cli::try_parse_from(["subfinsler", "faces"]).is_err());
        assert!(Cli::try_parse_from(["subfinsler", "plot", "--config", "x"]).is_err());
    }
}
