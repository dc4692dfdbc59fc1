//! Classification of commits as systematic edits and splittability.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::HistoryAnalysis;
use crate::edit::{AbstractEditScript, CommitEditSummary, MemberKey, MemberKind};
use crate::history::{CommitId, History};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    AstSystematic,
    WhitespaceOrCommentOnly,
    NonSystematic,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::AstSystematic => "ast_systematic",
            VerdictKind::WhitespaceOrCommentOnly => "whitespace_or_comment_only",
            VerdictKind::NonSystematic => "non_systematic",
        }
    }

    pub fn is_systematic(self) -> bool {
        self != VerdictKind::NonSystematic
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystematicVerdict {
    pub commit: CommitId,
    pub kind: VerdictKind,
    pub splittable: bool,
    /// Two members whose script sets differ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(MemberKey, MemberKey)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform_script_set: Option<BTreeSet<AbstractEditScript>>,
}

impl SystematicVerdict {
    fn non_systematic(commit: CommitId, witness: Option<(MemberKey, MemberKey)>) -> Self {
        SystematicVerdict { commit, kind: VerdictKind::NonSystematic, splittable: false, witness, uniform_script_set: None }
    }
}

pub fn classify(summary: &CommitEditSummary) -> SystematicVerdict {
    let commit = summary.commit.clone();
    if !summary.is_judgeable() || summary.changed_files == 0 {
        return SystematicVerdict::non_systematic(commit, None);
    }
    let splittable = summary.changed_files >= 2;
    if summary.syntax_identical {
        return SystematicVerdict {
            commit,
            kind: VerdictKind::WhitespaceOrCommentOnly,
            splittable,
            witness: None,
            uniform_script_set: None,
        };
    }

    let mut members: Vec<(MemberKey, &BTreeSet<AbstractEditScript>)> =
        summary.per_member.iter().map(|(k, s)| (k.clone(), s)).collect();
    if !summary.non_member_scripts.is_empty() {
        let file = summary.non_member_file.clone().expect("recorded with the scripts");
        let key = MemberKey { file, member_kind: MemberKind::Unit, signature: "<unit>".to_owned() };
        members.push((key, &summary.non_member_scripts));
    }
    let Some((first_key, first)) = members.first() else {
        return SystematicVerdict::non_systematic(commit, None);
    };
    if let Some((other_key, _)) = members.iter().find(|(_, s)| s != first) {
        return SystematicVerdict::non_systematic(commit, Some((first_key.clone(), other_key.clone())));
    }
    SystematicVerdict {
        commit,
        kind: VerdictKind::AstSystematic,
        splittable,
        witness: None,
        uniform_script_set: Some((*first).clone()),
    }
}

/// Verdicts for every commit from a precomputed analysis.
pub fn detect_from(analysis: &HistoryAnalysis) -> BTreeMap<CommitId, SystematicVerdict> {
    analysis
        .commits
        .par_iter()
        .map(|(id, files)| (id.clone(), classify(&CommitEditSummary::from_files(id.clone(), files))))
        .collect()
}

pub fn detect_all(h: &History) -> BTreeMap<CommitId, SystematicVerdict> {
    detect_from(&HistoryAnalysis::new(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edit::{ChangeType, CommitEditSummary};
    use crate::history::FilePath;
    use crate::syntax::Kind;

    fn script(before: &str, after: &str) -> AbstractEditScript {
        AbstractEditScript {
            change_type: if before.is_empty() { ChangeType::Insert } else { ChangeType::Update },
            node_kind: if before.is_empty() { Kind::Modifier } else { Kind::SimpleName },
            before_fragment: before.into(),
            after_fragment: after.into(),
        }
    }

    fn key(file: &str, sig: &str) -> MemberKey {
        MemberKey { file: FilePath::new(file).unwrap(), member_kind: MemberKind::Method, signature: sig.into() }
    }

    fn summary(members: Vec<(MemberKey, Vec<AbstractEditScript>)>, files: usize) -> CommitEditSummary {
        CommitEditSummary {
            commit: CommitId::new("c").unwrap(),
            per_member: members.into_iter().map(|(k, s)| (k, s.into_iter().collect())).collect(),
            non_member_scripts: BTreeSet::new(),
            non_member_file: None,
            syntax_identical: false,
            changed_files: files,
            unparseable_files: Vec::new(),
            whole_file_changes: Vec::new(),
            binary_files: Vec::new(),
        }
    }

    #[test]
    fn differing_sets_give_a_witness() {
        let s = summary(
            vec![(key("A", "A#f()"), vec![script("", "final")]), (key("B", "B#g()"), vec![script("foo", "bar")])],
            2,
        );
        let v = classify(&s);
        assert_eq!(v.kind, VerdictKind::NonSystematic);
        assert!(!v.splittable);
        assert_eq!(v.witness, Some((key("A", "A#f()"), key("B", "B#g()"))));
    }

    #[test]
    fn uniform_single_file_is_not_splittable() {
        let s = summary(
            vec![(key("A", "A#f()"), vec![script("", "final")]), (key("A", "A#g()"), vec![script("", "final")])],
            1,
        );
        let v = classify(&s);
        assert_eq!(v.kind, VerdictKind::AstSystematic);
        assert!(!v.splittable);
        assert_eq!(v.uniform_script_set.unwrap().len(), 1);
    }

    #[test]
    fn unit_pseudo_member_breaks_uniformity() {
        let mut s = summary(
            vec![(key("A", "A#f()"), vec![script("", "final")]), (key("B", "B#f()"), vec![script("", "final")])],
            2,
        );
        assert_eq!(classify(&s).kind, VerdictKind::AstSystematic);
        s.non_member_scripts.insert(script("a.B", "a.C"));
        s.non_member_file = Some(FilePath::new("B").unwrap());
        let v = classify(&s);
        assert_eq!(v.kind, VerdictKind::NonSystematic);
        assert_eq!(v.witness.unwrap().1.member_kind, MemberKind::Unit);
    }

    #[test]
    fn unparseable_file_is_conservative() {
        let mut s = summary(
            vec![(key("A", "A#f()"), vec![script("", "final")]), (key("B", "B#f()"), vec![script("", "final")])],
            3,
        );
        s.unparseable_files.push(FilePath::new("C").unwrap());
        let v = classify(&s);
        assert_eq!(v.kind, VerdictKind::NonSystematic);
        assert_eq!(v.witness, None);
    }
}
