//! Renders `fixtures/trig.terms` into the type-labeled treebank
//! `fixtures/trig.treebank`.
//!
//! Usage: cargo run -p typecyk-core --example make_trig_fixture [--lexicalized]

use std::path::PathBuf;

use typecyk_core::formal::Term;
use typecyk_core::treebank::{label_with_types, render_treebank};
use typecyk_core::Signature;

fn main() {
    let lexicalized = std::env::args().any(|a| a == "--lexicalized");
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let sig = Signature::load(&dir.join("trig.sig")).expect("signature");
    let vars = sig.var_names();
    let text = std::fs::read_to_string(dir.join("trig.terms")).expect("term list");
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, term) = line.split_once('\t').expect("id<TAB>term");
        let term = Term::parse(term, &vars).expect("term syntax");
        let tree = label_with_types(&term, &sig, lexicalized).expect("well-typed term");
        rows.push((id.to_string(), tree));
    }
    let out = render_treebank(rows.iter().map(|(id, t)| (id.as_str(), t)));
    let name = if lexicalized { "trig_lex.treebank" } else { "trig.treebank" };
    std::fs::write(dir.join(name), out).expect("write treebank");
    eprintln!("wrote {} entries to {name}", rows.len());
}
