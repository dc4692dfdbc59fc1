//! Fine-grained source changes: tree differencing and the location-free
//! abstraction of its edit operations.

pub mod matcher;
pub mod script;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::analysis::{analyze_file_change, FileAnalysis};
use crate::error::{Error, Result};
use crate::history::{CommitId, FilePath, History};
use crate::syntax::{Kind, NodeId, SyntaxTree};

pub use script::{apply, tree_diff, EditOp, TreeDiff};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChangeType {
    Insert,
    Delete,
    Update,
    Move,
}

/// One edit operation stripped of where it happened: what kind of change,
/// on what kind of node, and the code before and after.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AbstractEditScript {
    pub change_type: ChangeType,
    pub node_kind: Kind,
    pub before_fragment: String,
    pub after_fragment: String,
}

impl fmt::Display for AbstractEditScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} {} ({:?}, {:?})",
            self.change_type, self.node_kind, self.before_fragment, self.after_fragment
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MemberKind {
    Method,
    Constructor,
    Field,
    Initializer,
    TypeLevel,
    /// Pseudo-member for changes outside every declaration, such as imports.
    Unit,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MemberKey {
    pub file: FilePath,
    pub member_kind: MemberKind,
    pub signature: String,
}

impl fmt::Display for MemberKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.signature)
    }
}

/// Dotted names of the type declarations enclosing `node`, outermost first.
fn type_chain(tree: &SyntaxTree, node: NodeId) -> String {
    let mut names: Vec<&str> = tree
        .ancestors(node)
        .filter(|&a| tree.kind(a) == Kind::TypeDecl)
        .map(|a| declared_name(tree, a))
        .collect();
    names.reverse();
    names.join(".")
}

fn declared_name(tree: &SyntaxTree, decl: NodeId) -> &str {
    tree.children(decl)
        .iter()
        .find(|&&c| tree.kind(c) == Kind::SimpleName)
        .map_or("", |&c| tree.label(c))
}

fn param_types(tree: &SyntaxTree, decl: NodeId) -> String {
    let Some(&params) = tree.children(decl).iter().find(|&&c| tree.kind(c) == Kind::Params) else {
        return String::new();
    };
    tree.children(params)
        .iter()
        .filter_map(|&p| tree.children(p).iter().find(|&&c| tree.kind(c) == Kind::Type))
        .map(|&t| tree.label(t))
        .collect::<Vec<_>>()
        .join(",")
}

/// Field declarator names, in order.
pub(crate) fn field_names(tree: &SyntaxTree, field: NodeId) -> Vec<&str> {
    tree.children(field)
        .iter()
        .filter(|&&c| tree.kind(c) == Kind::VarDeclarator)
        .map(|&d| tree.label(tree.children(d)[0]))
        .collect()
}

/// Key of a member declaration node. `None` if `member` is not one.
pub fn member_key_of(tree: &SyntaxTree, member: NodeId, file: &FilePath) -> Option<MemberKey> {
    let chain = type_chain(tree, member);
    let (member_kind, signature) = match tree.kind(member) {
        Kind::TypeDecl => {
            let name = declared_name(tree, member);
            let sig = if chain.is_empty() { name.to_owned() } else { format!("{chain}.{name}") };
            (MemberKind::TypeLevel, sig)
        }
        Kind::MethodDecl => (
            MemberKind::Method,
            format!("{chain}#{}({})", declared_name(tree, member), param_types(tree, member)),
        ),
        Kind::ConstructorDecl => {
            (MemberKind::Constructor, format!("{chain}#<init>({})", param_types(tree, member)))
        }
        Kind::FieldDecl => (MemberKind::Field, format!("{chain}#{}", field_names(tree, member).join(","))),
        Kind::EnumConstant => (MemberKind::Field, format!("{chain}#{}", tree.label(member))),
        Kind::Initializer => {
            let index = tree.parent(member).map_or(0, |p| {
                tree.children(p)
                    .iter()
                    .take_while(|&&c| c != member)
                    .filter(|&&c| tree.kind(c) == Kind::Initializer)
                    .count()
            });
            (MemberKind::Initializer, format!("{chain}#{}{{}}@{index}", tree.label(member)))
        }
        _ => return None,
    };
    Some(MemberKey { file: file.clone(), member_kind, signature })
}

/// Smallest member declaration containing `node`, including `node` itself.
pub fn enclosing_member(tree: &SyntaxTree, node: NodeId) -> Option<NodeId> {
    std::iter::once(node)
        .chain(tree.ancestors(node))
        .find(|&n| tree.kind(n).is_member())
}

fn fragment(tree: &SyntaxTree, node: NodeId) -> String {
    tree.text(node)
}

/// Fragment for operations that require one on both sides; nodes spanning no
/// tokens (an empty modifier list) fall back to their kind.
fn nonempty_fragment(tree: &SyntaxTree, node: NodeId) -> String {
    let text = tree.text(node);
    if text.is_empty() {
        format!("<{}>", tree.kind(node))
    } else {
        text
    }
}

/// Maps every operation of `diff` to an abstract script and the member it
/// is grouped under (`None` for changes outside any member).
///
/// Deletions, updates and moves are grouped by the member enclosing the
/// node before the change; insertions by the enclosing member after it,
/// translated to its pre-change key when that member already existed.
pub fn abstract_scripts(
    diff: &TreeDiff,
    before: &SyntaxTree,
    after: &SyntaxTree,
    file: &FilePath,
) -> Vec<(Option<MemberKey>, AbstractEditScript)> {
    let src_key = |node: NodeId| {
        enclosing_member(before, node).and_then(|m| member_key_of(before, m, file))
    };
    diff.ops
        .iter()
        .map(|op| match op {
            EditOp::Insert { node, kind, .. } => {
                let x = diff.dst_of(*node).expect("inserted nodes have targets");
                let key = enclosing_member(after, x).and_then(|m| match diff.mapping.dst_to_src[m] {
                    Some(old) => member_key_of(before, old, file),
                    None => member_key_of(after, m, file),
                });
                let script = AbstractEditScript {
                    change_type: ChangeType::Insert,
                    node_kind: *kind,
                    before_fragment: String::new(),
                    after_fragment: fragment(after, x),
                };
                (key, script)
            }
            EditOp::Delete { node } => (
                src_key(*node),
                AbstractEditScript {
                    change_type: ChangeType::Delete,
                    node_kind: before.kind(*node),
                    before_fragment: fragment(before, *node),
                    after_fragment: String::new(),
                },
            ),
            EditOp::Update { node, .. } | EditOp::Move { node, .. } => {
                let x = diff.dst_of(*node).expect("updated and moved nodes are matched");
                let change_type = if matches!(op, EditOp::Update { .. }) {
                    ChangeType::Update
                } else {
                    ChangeType::Move
                };
                (
                    src_key(*node),
                    AbstractEditScript {
                        change_type,
                        node_kind: before.kind(*node),
                        before_fragment: nonempty_fragment(before, *node),
                        after_fragment: nonempty_fragment(after, x),
                    },
                )
            }
        })
        .collect()
}

fn serialize_members<S: Serializer>(
    map: &BTreeMap<MemberKey, BTreeSet<AbstractEditScript>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        member: &'a MemberKey,
        scripts: &'a BTreeSet<AbstractEditScript>,
    }
    s.collect_seq(map.iter().map(|(member, scripts)| Entry { member, scripts }))
}

/// Abstracted edit scripts of one commit, grouped by changed member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommitEditSummary {
    pub commit: CommitId,
    #[serde(serialize_with = "serialize_members")]
    pub per_member: BTreeMap<MemberKey, BTreeSet<AbstractEditScript>>,
    pub non_member_scripts: BTreeSet<AbstractEditScript>,
    /// First file with a change outside every member.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_member_file: Option<FilePath>,
    /// Every changed file's trees are isomorphic: only whitespace or
    /// comments changed.
    pub syntax_identical: bool,
    /// Text files changed by the commit.
    pub changed_files: usize,
    pub unparseable_files: Vec<FilePath>,
    /// Added, deleted or renamed files, which have no member mapping.
    pub whole_file_changes: Vec<FilePath>,
    pub binary_files: Vec<FilePath>,
}

impl CommitEditSummary {
    pub fn from_files(commit: CommitId, files: &[FileAnalysis]) -> CommitEditSummary {
        let mut summary = CommitEditSummary {
            commit,
            per_member: BTreeMap::new(),
            non_member_scripts: BTreeSet::new(),
            non_member_file: None,
            syntax_identical: false,
            changed_files: 0,
            unparseable_files: Vec::new(),
            whole_file_changes: Vec::new(),
            binary_files: Vec::new(),
        };
        for f in files {
            if f.binary {
                summary.binary_files.push(f.path.clone());
                continue;
            }
            summary.changed_files += 1;
            if f.unparseable {
                summary.unparseable_files.push(f.path.clone());
            }
            if f.whole_file {
                summary.whole_file_changes.push(f.path.clone());
            }
            if f.unparseable || f.whole_file {
                continue;
            }
            for (key, script) in &f.scripts {
                match key {
                    Some(k) => {
                        summary.per_member.entry(k.clone()).or_default().insert(script.clone());
                    }
                    None => {
                        summary.non_member_file.get_or_insert_with(|| f.path.clone());
                        summary.non_member_scripts.insert(script.clone());
                    }
                }
            }
        }
        summary.syntax_identical = summary.changed_files > 0
            && summary.unparseable_files.is_empty()
            && summary.whole_file_changes.is_empty()
            && summary.binary_files.is_empty()
            && summary.per_member.is_empty()
            && summary.non_member_scripts.is_empty();
        summary
    }

    /// Whether the commit can be judged at all: no unparseable, binary or
    /// whole-file changes.
    pub fn is_judgeable(&self) -> bool {
        self.unparseable_files.is_empty() && self.whole_file_changes.is_empty() && self.binary_files.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

pub fn summarize_commit(h: &History, c: &CommitId) -> Result<CommitEditSummary> {
    let commit = h.commit(c).ok_or_else(|| Error::UnknownCriterion(c.clone()))?;
    let files: Vec<FileAnalysis> = commit.file_changes.iter().map(analyze_file_change).collect();
    Ok(CommitEditSummary::from_files(c.clone(), &files))
}
