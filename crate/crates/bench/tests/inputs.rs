use histslice::edit::{apply, tree_diff};
use histslice::syntax::parse;
use histslice_bench::{program, sweeps};

#[test]
fn inputs_are_well_formed() {
    assert_eq!(sweeps(3, 2).len(), 2 * (2 * 3 + 1));
    let (a, b) = (parse(&program(12, 3, false)), parse(&program(12, 3, true)));
    assert!(!a.is_unparseable() && !b.is_unparseable());
    let d = tree_diff(&a, &b).unwrap();
    assert!(!d.ops.is_empty());
    assert_eq!(apply(&a, &d.ops).unwrap(), b.to_plain());
}
