//! Regenerates the canonical benchmark scenario file at
//! `scenarios/scenario-1.json`.

use std::path::Path;

fn main() -> anyhow::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/scenario-1.json");
    mdpmix_cli::scenario::scenario_one_file().save(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}
