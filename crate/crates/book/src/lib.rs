//! Every chapter of the guide in `book/src` is a module here, so that
//! `cargo test --doc` compiles and runs its code blocks. The README is
//! checked the same way.

#[doc = include_str!("../../../README.md")]
pub mod readme {}

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/grammar.md")]
pub mod grammar {}
#[doc = include_str!("../../../book/src/grammar_tree.md")]
pub mod grammar_tree {}
#[doc = include_str!("../../../book/src/extract.md")]
pub mod extract {}
#[doc = include_str!("../../../book/src/locate.md")]
pub mod locate {}
#[doc = include_str!("../../../book/src/patricia.md")]
pub mod patricia {}
#[doc = include_str!("../../../book/src/file_format.md")]
pub mod file_format {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/testing.md")]
pub mod testing {}

#[cfg(test)]
mod tests {
    use std::path::Path;

    /// Each chapter listed in SUMMARY.md is included above, and the reverse.
    #[test]
    fn summary_matches_modules() {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../book/src");
        let summary = std::fs::read_to_string(root.join("SUMMARY.md")).unwrap();
        let lib = include_str!("lib.rs");
        let mut listed = 0;
        for line in summary.lines() {
            if let Some(file) = line.split("](").nth(1).map(|s| s.trim_end_matches(')')) {
                assert!(root.join(file).exists(), "{file}");
                assert!(
                    lib.contains(&format!("book/src/{file}\")")),
                    "{file} not included"
                );
                listed += 1;
            }
        }
        assert_eq!(
            lib.matches("include_str!(\"../../../book/src").count(),
            listed
        );
    }
}
