//! A hand-labeled corpus of commits for the systematic-edit detector.
//!
//! Each commit message starts with its label: the expected verdict kind,
//! optionally followed by `split` when the commit should be splittable.

use histslice::history::{Fixture, FixtureBuilder};
use histslice::VerdictKind;

fn class(name: &str, extra_call: &str) -> String {
    format!(
        "package corpus;\n\nimport java.util.List;\n\nclass {name} {{\n    int count = 0;\n    String name = \"{}\";\n\n    void run() {{\n        foo();\n        log();\n{extra_call}    }}\n\n    int size() {{\n        return count;\n    }}\n\n    void stop() {{\n        cleanup();\n    }}\n}}\n",
        name.to_lowercase()
    )
}

struct Corpus {
    b: FixtureBuilder,
}

impl Corpus {
    /// A commit made of literal replacements, each applied once to the
    /// current content of its file.
    fn commit(&mut self, label: &str, edits: &[(&str, &str, &str)]) {
        let mut files: Vec<(String, Option<String>)> = Vec::new();
        for &(path, from, to) in edits {
            let current = match files.iter().find(|(p, _)| p == path) {
                Some((_, t)) => t.clone().unwrap(),
                None => self.b.content(path).unwrap().to_owned(),
            };
            assert!(current.contains(from), "{label}: {path} lacks {from:?}");
            let next = current.replacen(from, to, 1);
            match files.iter_mut().find(|(p, _)| p == path) {
                Some(slot) => slot.1 = Some(next),
                None => files.push((path.to_owned(), Some(next))),
            }
        }
        let id = format!("k{:02}", self.b.fixture().commits.len() + 1);
        self.b.commit(&id, label, files.iter().map(|(p, t)| (p.as_str(), t.clone())));
    }

    fn raw(&mut self, label: &str, path: &str, text: Option<&str>) {
        let id = format!("k{:02}", self.b.fixture().commits.len() + 1);
        self.b.commit(&id, label, [(path, text.map(str::to_owned))]);
    }
}

pub fn detector_corpus() -> Fixture {
    let mut b = FixtureBuilder::new();
    b.base("src/A.java", &class("A", ""))
        .base("src/B.java", &class("B", "        size();\n"))
        .base("src/C.java", &class("C", ""))
        .base("src/D.java", "package corpus;\n\nclass D {\n    Runnable r = () -> go();\n}\n")
        .base("README.txt", "hello\n");
    let mut c = Corpus { b };
    let (a, bb, cc, d) = ("src/A.java", "src/B.java", "src/C.java", "src/D.java");

    let fin = ("int count = 0;", "final int count = 0;");
    c.commit("ast_systematic split: make counters final", &[(a, fin.0, fin.1), (bb, fin.0, fin.1), (cc, fin.0, fin.1)]);
    c.commit("ast_systematic split: rename foo to bar", &[(a, "foo();", "bar();"), (bb, "foo();", "bar();")]);
    let indent = ("        log();", "            log();");
    c.commit("whitespace_or_comment_only split: reindent", &[(a, indent.0, indent.1), (bb, indent.0, indent.1)]);
    c.commit("whitespace_or_comment_only: explain size", &[(cc, "    int size() {", "    // size of the thing\n    int size() {")]);
    c.commit(
        "whitespace_or_comment_only split: banner comments",
        &[
            (a, "class A {", "/* note */\nclass A {"),
            (bb, "class B {", "/* note */\nclass B {"),
            (cc, "class C {", "/* note */\n\nclass C {"),
        ],
    );
    c.commit("non_systematic: unrelated fixes", &[(a, "\"a\"", "\"z\""), (bb, "return count;", "return 0;")]);
    c.commit(
        "non_systematic: rename log with an unparseable file",
        &[(a, "log();", "trace();"), (bb, "log();", "trace();"), (d, "go()", "stop()")],
    );
    c.commit("ast_systematic: off by one", &[(a, "return count;", "return count + 1;")]);
    c.raw("non_systematic: add E", "src/E.java", Some("package corpus;\n\nclass E {\n}\n"));
    c.raw("non_systematic: drop E", "src/E.java", None);
    c.commit(
        "non_systematic: final names and an import swap",
        &[
            (a, "String name", "final String name"),
            (bb, "String name", "final String name"),
            (bb, "import java.util.List;", "import java.util.Map;"),
        ],
    );
    let import = ("import java.util.List;", "import java.util.List;\nimport java.util.Set;");
    c.commit("ast_systematic split: import Set", &[(a, import.0, import.1), (cc, import.0, import.1)]);
    c.commit(
        "ast_systematic: publish C",
        &[(cc, "void run() {", "public void run() {"), (cc, "int size() {", "public int size() {")],
    );
    c.commit(
        "ast_systematic split: pass limit",
        &[
            (a, "bar();", "bar(limit);"),
            (a, "trace();", "trace(limit);"),
            (bb, "bar();", "bar(limit);"),
            (bb, "trace();", "trace(limit);"),
        ],
    );
    c.commit(
        "non_systematic: almost uniform",
        &[(a, "bar(limit);", "bar(limit, 2);"), (bb, "bar(limit);", "bar(limit, 2);"), (bb, "trace(limit);", "trace();")],
    );
    c.commit("non_systematic: readme", &[("README.txt", "hello", "hello world")]);
    c.commit(
        "non_systematic: spacing next to an unparseable file",
        &[(a, "    int size() {", "    int  size() {"), (d, "stop()", "halt()")],
    );
    let five = ("final int count = 0;", "final int count = 5;");
    c.commit("ast_systematic split: start at five", &[(a, five.0, five.1), (bb, five.0, five.1), (cc, five.0, five.1)]);
    let cleanup = ("        cleanup();\n", "");
    c.commit("ast_systematic split: no cleanup", &[(a, cleanup.0, cleanup.1), (bb, cleanup.0, cleanup.1)]);
    let over = ("    void stop() {", "    @Override\n    void stop() {");
    c.commit("ast_systematic split: override stop", &[(bb, over.0, over.1), (cc, over.0, over.1)]);
    c.commit(
        "ast_systematic split: rename size to length",
        &[(cc, "public int size() {", "public int length() {"), (bb, "size();", "length();")],
    );
    c.commit(
        "ast_systematic split: deprecate stop",
        &[(bb, "@Override", "@Deprecated"), (cc, "@Override", "@Deprecated")],
    );
    c.commit("whitespace_or_comment_only: breathing room", &[(a, "class A {", "class A {\n")]);
    c.b.fixture()
}

/// Expected kind and splittability from a commit message.
pub fn label(message: &str) -> (VerdictKind, bool) {
    let (head, _) = message.split_once(':').expect("labeled message");
    let mut words = head.split_whitespace();
    let kind = match words.next() {
        Some("ast_systematic") => VerdictKind::AstSystematic,
        Some("whitespace_or_comment_only") => VerdictKind::WhitespaceOrCommentOnly,
        Some("non_systematic") => VerdictKind::NonSystematic,
        other => panic!("unknown label {other:?}"),
    };
    (kind, words.next() == Some("split"))
}
