//! Shared inputs for the benchmarks.

use rowpoly::{Kind, Label, RowType, Type, TypeVar};

/// Two open rows of `n` fields each, sharing half their labels, so that
/// unifying them exercises common fields, leftovers on both sides and a
/// fresh tail.
pub fn overlapping_rows(n: usize) -> (RowType, RowType) {
    let field = |i: usize| (Label::new(&format!("f{i}")), Type::int());
    let left = RowType::open((0..n).map(field), TypeVar::new(0, Kind::Row));
    let right = RowType::open((n / 2..n + n / 2).map(field), TypeVar::new(1, Kind::Row));
    (left, right)
}

/// A record literal with `n` fields written in reverse label order.
pub fn wide_record(n: usize) -> String {
    let fields: Vec<String> = (0..n).rev().map(|i| format!("f{i} = {i}")).collect();
    format!("{{{}}}", fields.join(", "))
}

/// A function selecting `n` fields of its argument, applied to a record
/// holding all of them plus one more.
pub fn select_chain(n: usize) -> String {
    let selects: Vec<String> = (0..n).map(|i| format!("r.f{i}")).collect();
    let nested = selects
        .iter()
        .rev()
        .fold(String::from("0"), |acc, s| format!("pair {s} ({acc})"));
    format!("(\\r. {nested}) {}", wide_record(n + 1))
}

/// `depth` nested lets, each reusing the previous polymorphic binding at two
/// types.
pub fn let_tower(depth: usize) -> String {
    let mut src = String::from("let f0 = \\x. x in\n");
    for i in 1..=depth {
        src.push_str(&format!(
            "let f{i} = \\x. pair (f{} x) (f{} 1) in\n",
            i - 1,
            i - 1
        ));
    }
    src.push_str(&format!("f{depth} \"s\""));
    src
}

/// Small programs covering every construct.
pub const PROGRAMS: &[(&str, &str)] = &[
    ("select", r"\r. r.name"),
    ("record", r#"{name = "Ana", age = 7}"#),
    ("extend", r"\r. {y = r.x | r - x}"),
    ("compose", r"\f. \g. \x. f (g x)"),
    (
        "higher_kinded",
        r"(\x. x : ∀f:*->*. ∀a:*. f a -> f a) (cons 1 nil)",
    ),
];
