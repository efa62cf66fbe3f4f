//! Regenerates the JSON derivations under `fixtures/`.

use std::fs;
use std::path::Path;

use ordgame_core::logic::{single_node_mutations, ti_omega_derivation, ti_omega_derivation_with_cut, MutationKind};

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    fs::create_dir_all(&dir)?;
    let d = ti_omega_derivation();
    fs::write(dir.join("ti_omega.json"), d.to_json() + "\n")?;
    fs::write(dir.join("ti_omega_cut.json"), ti_omega_derivation_with_cut().to_json() + "\n")?;
    let bad = single_node_mutations(&d)
        .into_iter()
        .find(|m| m.kind == MutationKind::EigenvariableCapture)
        .expect("the derivation has ∀-rules below free variables");
    fs::write(dir.join("ti_omega_bad_eigen.json"), bad.derivation.to_json() + "\n")?;
    println!("wrote fixtures to {}", dir.display());
    Ok(())
}
