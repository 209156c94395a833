//! Regenerates the invariant-set regression fixtures under tests/fixtures/.
use std::fs;

fn main() {
    let out_dir = std::env::args().nth(1).unwrap_or_else(|| "crates/core/tests/fixtures".into());
    for (name, sys) in [
        ("aps_c_inf.json", invsched::system::aps_model()),
        ("aps_a32_zero_c_inf.json", invsched::system::aps_model_a32_zero()),
    ] {
        let result = invsched::invariant::max_invariant(&sys, 50).unwrap();
        assert!(result.converged);
        let path = format!("{out_dir}/{name}");
        fs::write(&path, serde_json::to_string_pretty(&result).unwrap()).unwrap();
        println!("wrote {path}: {} rows, {} iterations", result.set.num_rows(), result.iterations);
    }
}
