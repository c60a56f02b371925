use std::path::{Path, PathBuf};

use subfinsler::scenario::{run, ScenarioConfig};

fn shipped() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
}

#[test]
fn shipped_scenarios_round_trip() {
    let files = shipped();
    assert!(files.len() >= 10);
    for path in files {
        let config = ScenarioConfig::load(&path).unwrap();
        assert!(config.command.is_some(), "{}", path.display());
        assert_eq!(ScenarioConfig::from_json(&config.to_json()).unwrap(), config, "{}", path.display());
    }
}

#[test]
fn config_echo_reparses_to_the_run_config() {
    let dir = std::env::temp_dir().join(format!("subfinsler-echo-{}", std::process::id()));
    let config = ScenarioConfig::load(&shipped().into_iter().find(|p| p.ends_with("faces_l1.json")).unwrap()).unwrap();
    run(&config, &dir).unwrap();
    let echo = ScenarioConfig::load(&dir.join("faces_l1.config.json")).unwrap();
    assert_eq!(echo, config);
    std::fs::remove_dir_all(&dir).unwrap();
}
