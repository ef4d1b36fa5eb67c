//! The published config schema must match the one derived from the types.

use std::path::PathBuf;

use pdm_dirac::cli::config_schema;

fn schema_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/run_config.schema.json")
}

#[test]
fn published_schema_is_current() {
    let mut generated = serde_json::to_string_pretty(&config_schema()).unwrap();
    generated.push('\n');
    if std::env::var_os("PDMDIRAC_UPDATE_SCHEMA").is_some() {
        std::fs::write(schema_path(), &generated).unwrap();
    }
    let published = std::fs::read_to_string(schema_path()).expect("schema file present");
    assert_eq!(published, generated, "regenerate with PDMDIRAC_UPDATE_SCHEMA=1 cargo test --test schema");
}

#[test]
fn schema_lists_every_subcommand() {
    let s = config_schema().to_string();
    for sc in ["profile", "potential", "spectrum", "scatter", "heun", "fw-check", "pt-check", "figures"] {
        assert!(s.contains(&format!("\"{sc}\"")), "{sc} missing");
    }
}
