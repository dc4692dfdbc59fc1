//! Benchmark inputs.

use histslice::synthetic::{sweep_history, SweepShape};
use histslice::History;

/// A sweep history with `files` files and `rounds` rounds: `rounds * (2 *
/// files + 1)` commits.
pub fn sweeps(files: usize, rounds: usize) -> History {
    sweep_history(SweepShape { files, rounds }).to_history().expect("generated histories are valid")
}

/// A class with `members` fields and methods, with every `stride`-th method
/// body changed when `edited` is set.
pub fn program(members: usize, stride: usize, edited: bool) -> String {
    let mut out = String::from("package bench;\n\nclass Big {\n");
    for i in 0..members {
        out.push_str(&format!("    int f{i} = {i};\n"));
        let body = if edited && i % stride == 0 { format!("f{i} + 1") } else { format!("f{i}") };
        out.push_str(&format!("    int get{i}(int x) {{\n        return {body} * x;\n    }}\n"));
    }
    out.push_str("}\n");
    out
}
