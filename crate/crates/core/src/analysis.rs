//! Per-file facts derived from parsing and differencing each change once:
//! abstract edit scripts for the detector and declaration/use names for
//! build dependencies.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use rayon::prelude::*;

use crate::edit::{abstract_scripts, field_names, member_key_of, tree_diff, AbstractEditScript, EditOp, MemberKey};
use crate::history::{ChangeKind, CommitId, FileChange, FilePath, History};
use crate::syntax::{is_keyword, parse, Kind, NodeId, SyntaxTree};

/// A named declaration that a change introduced or modified.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Declaration {
    /// Unique within a file, e.g. `A.B#m(int)`.
    pub key: String,
    /// The simple name other code refers to it by.
    pub name: String,
}

#[derive(Debug, Clone)]
pub struct FileAnalysis {
    pub path: FilePath,
    pub kind: ChangeKind,
    pub binary: bool,
    /// Either side failed to parse.
    pub unparseable: bool,
    /// Added, deleted or renamed.
    pub whole_file: bool,
    pub scripts: Vec<(Option<MemberKey>, AbstractEditScript)>,
    pub declared: Vec<Declaration>,
    /// Keys of declarations present before and gone after.
    pub removed: Vec<String>,
    /// Names referenced by the code this change wrote.
    pub uses: BTreeSet<String>,
}

pub fn analyze_file_change(fc: &FileChange) -> FileAnalysis {
    let mut out = FileAnalysis {
        path: fc.path.clone(),
        kind: fc.kind,
        binary: fc.binary,
        unparseable: false,
        whole_file: fc.kind != ChangeKind::Modified,
        scripts: Vec::new(),
        declared: Vec::new(),
        removed: Vec::new(),
        uses: BTreeSet::new(),
    };
    if fc.binary {
        return out;
    }
    let before = parse(fc.before_text.as_deref().unwrap_or(""));
    let after = parse(fc.after_text.as_deref().unwrap_or(""));
    out.unparseable = before.is_unparseable() || after.is_unparseable();

    if after.is_unparseable() {
        for h in &fc.hunks {
            for line in &h.new_lines {
                out.uses.extend(words(line));
            }
        }
        return out;
    }
    let new_decls = declarations(&after);
    if before.is_unparseable() {
        out.declared = new_decls.into_iter().map(|(key, (name, _))| Declaration { key, name }).collect();
        for h in &fc.hunks {
            for line in &h.new_lines {
                out.uses.extend(words(line));
            }
        }
        return out;
    }

    let diff = tree_diff(&before, &after).expect("both sides parsed");
    out.scripts = abstract_scripts(&diff, &before, &after, &fc.path);
    let old_decls = declarations(&before);
    out.removed = old_decls.keys().filter(|k| !new_decls.contains_key(*k)).cloned().collect();
    out.declared = new_decls
        .into_iter()
        .filter(|(key, (_, fp))| old_decls.get(key).is_none_or(|(_, old)| old != fp))
        .map(|(key, (name, _))| Declaration { key, name })
        .collect();

    let mut written: BTreeSet<NodeId> = BTreeSet::new();
    for op in &diff.ops {
        match op {
            EditOp::Insert { node, .. } | EditOp::Update { node, .. } => {
                written.extend(diff.dst_of(*node));
            }
            EditOp::Move { node, .. } => {
                if let Some(x) = diff.dst_of(*node) {
                    written.extend(after.preorder_from(x));
                }
            }
            EditOp::Delete { .. } => {}
        }
    }
    for n in written {
        referenced_names(&after, n, &mut out.uses);
    }
    out
}

/// Identifier-like words of a line, minus keywords.
fn words(line: &str) -> impl Iterator<Item = String> + '_ {
    line.split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '$'))
        .filter(|w| w.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_' || c == '$'))
        .filter(|w| !is_keyword(w))
        .map(str::to_owned)
}

fn referenced_names(tree: &SyntaxTree, n: NodeId, out: &mut BTreeSet<String>) {
    match tree.kind(n) {
        Kind::SimpleName => {
            let declaring = tree.parent(n).is_some_and(|p| {
                matches!(
                    tree.kind(p),
                    Kind::VarDeclarator | Kind::MethodDecl | Kind::ConstructorDecl | Kind::TypeDecl | Kind::Param
                )
            });
            if !declaring {
                out.insert(tree.label(n).to_owned());
            }
        }
        Kind::Type | Kind::TypeParams | Kind::Annotation | Kind::ImportDecl => {
            out.extend(words(tree.label(n)));
        }
        _ => {}
    }
}

fn fingerprint<T: Hash>(value: &T) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

/// Named declarations of a parsed file with a structural fingerprint each.
/// Constructors and initializers have no name of their own and are skipped.
pub fn declarations(tree: &SyntaxTree) -> BTreeMap<String, (String, u64)> {
    let file = FilePath::new("_").expect("valid path");
    let mut out = BTreeMap::new();
    if tree.is_unparseable() {
        return out;
    }
    for n in tree.preorder() {
        let Some(key) = member_key_of(tree, n, &file) else { continue };
        match tree.kind(n) {
            Kind::TypeDecl => {
                let header: Vec<_> = tree
                    .children(n)
                    .iter()
                    .filter(|&&c| tree.kind(c) != Kind::Body)
                    .map(|&c| tree.plain_from(c))
                    .collect();
                let name = key.signature.rsplit('.').next().unwrap_or("").to_owned();
                out.insert(format!("type {}", key.signature), (name, fingerprint(&(tree.label(n), header))));
            }
            Kind::MethodDecl => {
                let name = tree
                    .children(n)
                    .iter()
                    .find(|&&c| tree.kind(c) == Kind::SimpleName)
                    .map_or("", |&c| tree.label(c))
                    .to_owned();
                out.insert(key.signature, (name, fingerprint(&tree.plain_from(n))));
            }
            Kind::EnumConstant => {
                out.insert(key.signature, (tree.label(n).to_owned(), fingerprint(&tree.plain_from(n))));
            }
            Kind::FieldDecl => {
                let chain = key.signature.split('#').next().unwrap_or("").to_owned();
                let shared: Vec<_> = tree
                    .children(n)
                    .iter()
                    .filter(|&&c| tree.kind(c) != Kind::VarDeclarator)
                    .map(|&c| tree.plain_from(c))
                    .collect();
                let declarators = tree.children(n).iter().filter(|&&c| tree.kind(c) == Kind::VarDeclarator);
                for (name, &d) in field_names(tree, n).into_iter().zip(declarators) {
                    let fp = fingerprint(&(&shared, tree.plain_from(d)));
                    out.insert(format!("{chain}#{name}"), (name.to_owned(), fp));
                }
            }
            _ => {}
        }
    }
    out
}

/// Analyses of every file change in a history, computed once in parallel.
#[derive(Debug, Clone)]
pub struct HistoryAnalysis {
    /// Per commit, in history order; per file, in the commit's file order.
    pub commits: Vec<(CommitId, Vec<FileAnalysis>)>,
}

impl HistoryAnalysis {
    pub fn new(h: &History) -> HistoryAnalysis {
        let commits = h
            .commits()
            .par_iter()
            .map(|c| (c.id.clone(), c.file_changes.par_iter().map(analyze_file_change).collect()))
            .collect();
        HistoryAnalysis { commits }
    }

    pub fn files(&self, c: &CommitId) -> Option<&[FileAnalysis]> {
        self.commits.iter().find(|(id, _)| id == c).map(|(_, f)| f.as_slice())
    }
}
