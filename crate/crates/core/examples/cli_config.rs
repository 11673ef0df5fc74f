//! Parse a run configuration the way `nlsh evolve` does and print its schema.

use nls_harmonic::harness::RunConfig;

const CONFIG: &str = r#"{
    "grid": {"dim": 1, "L": 16.0, "n": 256},
    "initial": {"kind": "gaussian", "amplitude": 1.0, "width": 1.0},
    "mu": 1.0, "dt": 0.001, "t_end": 0.5
}"#;

fn main() {
    match RunConfig::from_json(CONFIG) {
        Ok(cfg) => println!("{}", cfg.canonical_json()),
        Err(e) => eprintln!("{e}"),
    }
    match RunConfig::from_json(&CONFIG.replace("\"mu\"", "\"nu\"")) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
    println!("{}", serde_json::to_string_pretty(&RunConfig::schema()).expect("schema serializes"));
}
