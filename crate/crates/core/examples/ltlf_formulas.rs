//! Parse, canonicalise and evaluate LTLf formulas over finite traces.
//!
//! Run with `cargo run --example ltlf_formulas`.

use std::collections::BTreeSet;

use divsim::{evaluate, format_formula, parse_formula};

fn letter(atoms: &[&str]) -> BTreeSet<String> {
    atoms.iter().map(|s| s.to_string()).collect()
}

fn main() -> anyhow::Result<()> {
    // Three positions: p holds, then p and q, then only r.
    let trace = vec![letter(&["p"]), letter(&["p", "q"]), letter(&["r"])];

    for text in [
        "p U r",
        "G p",
        "F (q & X r)",
        "X X X true",
        "X X !X true",
        "(q | p) & (r | (p & true))",
        "!q R p",
        "F G r",
    ] {
        let f = parse_formula(text)?;
        println!("{text:<28} canonical {:<28} holds: {}", format_formula(&f), evaluate(&f, &trace, 0));
    }

    // Next is strong: it fails on the last position, so `!X true` marks the end.
    let last = trace.len() - 1;
    println!("X true at end: {}", evaluate(&parse_formula("X true")?, &trace, last));
    println!("!X true at end: {}", evaluate(&parse_formula("!X true")?, &trace, last));

    if let Err(e) = parse_formula("p U") {
        println!("parse error: {e}");
    }
    Ok(())
}
