//! Patch series for a slice: each slice commit's changes are re-applied
//! onto the sliced file contents and emitted as mbox-style unified diffs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::DateTime;

use super::HistorySlice;
use crate::error::{Error, Result};
use crate::history::text::{diff_lines, ends_with_newline, join_lines, lines};
use crate::history::{ChangeKind, Commit, CommitId, FileChange, FilePath, History, Hunk};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    /// `0001-subject-slug.patch`
    pub file_name: String,
    pub contents: String,
}

const NO_NEWLINE: &str = "\\ No newline at end of file";

/// A git-style diff section for one file. `None` texts mean the file is
/// absent on that side.
pub fn unified_diff(
    old_path: &FilePath,
    new_path: &FilePath,
    before: Option<&str>,
    after: Option<&str>,
    context: usize,
) -> String {
    let mut out = format!("diff --git a/{old_path} b/{new_path}\n");
    match (before, after) {
        (None, _) => out.push_str("new file mode 100644\n"),
        (_, None) => out.push_str("deleted file mode 100644\n"),
        _ if old_path != new_path => {
            out.push_str(&format!("rename from {old_path}\nrename to {new_path}\n"));
        }
        _ => {}
    }
    let (b, a) = (before.unwrap_or(""), after.unwrap_or(""));
    let hunks = diff_lines(b, a);
    if hunks.is_empty() {
        return out;
    }
    let minus = before.map_or("/dev/null".to_owned(), |_| format!("a/{old_path}"));
    let plus = after.map_or("/dev/null".to_owned(), |_| format!("b/{new_path}"));
    out.push_str(&format!("--- {minus}\n+++ {plus}\n"));

    let (bl, al) = (lines(b), lines(a));
    let (b_open, a_open) = (!ends_with_newline(b), !ends_with_newline(a));
    for group in group_hunks(&hunks, context) {
        let (first, last) = (&group[0], group[group.len() - 1]);
        let lo = first.old_start - context.min(first.old_start - 1);
        let hi = (last.old_start + last.old_len - 1 + context).min(bl.len());
        let old_count = (hi + 1).saturating_sub(lo);
        let delta: isize = group.iter().map(|h| h.new_len as isize - h.old_len as isize).sum();
        let new_count = (old_count as isize + delta) as usize;
        let new_lo = first.new_start - (first.old_start - lo);
        out.push_str(&format!("@@ -{} +{} @@\n", range(lo, old_count), range(new_lo, new_count)));

        let context_line = |out: &mut String, i: usize| {
            out.push_str(&format!(" {}\n", bl[i - 1]));
            if i == bl.len() && b_open {
                out.push_str(NO_NEWLINE);
                out.push('\n');
            }
        };
        let mut cursor = lo;
        for h in group {
            for i in cursor..h.old_start {
                context_line(&mut out, i);
            }
            for (k, l) in h.old_lines.iter().enumerate() {
                out.push_str(&format!("-{l}\n"));
                if h.old_start + k == bl.len() && b_open {
                    out.push_str(NO_NEWLINE);
                    out.push('\n');
                }
            }
            for (k, l) in h.new_lines.iter().enumerate() {
                out.push_str(&format!("+{l}\n"));
                if h.new_start + k == al.len() && a_open {
                    out.push_str(NO_NEWLINE);
                    out.push('\n');
                }
            }
            cursor = h.old_start + h.old_len;
        }
        for i in cursor..=hi {
            context_line(&mut out, i);
        }
    }
    out
}

fn range(start: usize, count: usize) -> String {
    match count {
        0 => format!("{},0", start - 1),
        1 => start.to_string(),
        _ => format!("{start},{count}"),
    }
}

/// Hunks whose context windows touch or overlap share one `@@` block.
fn group_hunks(hunks: &[Hunk], context: usize) -> Vec<Vec<&Hunk>> {
    let mut groups: Vec<Vec<&Hunk>> = Vec::new();
    for h in hunks {
        match groups.last_mut() {
            Some(g) if {
                let prev = g[g.len() - 1];
                h.old_start - (prev.old_start + prev.old_len) <= 2 * context
            } =>
            {
                g.push(h)
            }
            _ => groups.push(vec![h]),
        }
    }
    groups
}

/// Re-applies `fc`'s hunks to `current`, locating each by its pre-image
/// block (leading context, replaced lines, trailing context).
fn relocate(current: &str, fc: &FileChange, context: usize) -> std::result::Result<String, String> {
    let before = fc.before_lines();
    let cur = lines(current);
    let mut out: Vec<&str> = Vec::with_capacity(cur.len());
    let mut trailing = ends_with_newline(current);
    let mut cursor = 0usize;
    let mut offset: isize = 0;
    for h in &fc.hunks {
        let start = h.old_start - 1;
        let pre_lo = start - context.min(start);
        let post_hi = (start + h.old_len + context).min(before.len());
        let block = &before[pre_lo..post_hi];
        let reaches_end = post_hi == before.len();
        // Leading context may overlap the previous hunk's lines; only the
        // replaced lines must come after it.
        let lead = start - pre_lo;
        let floor = cursor.saturating_sub(lead);
        let expected = (pre_lo as isize + offset).max(floor as isize) as usize;
        let fits = |p: usize| {
            p + block.len() <= cur.len()
                && cur[p..p + block.len()] == *block
                && (!reaches_end
                    || (p + block.len() == cur.len()
                        && ends_with_newline(current) == ends_with_newline(fc.before_text.as_deref().unwrap_or(""))))
        };
        let p = if block.is_empty() {
            Some(expected.min(cur.len()))
        } else {
            (0..=cur.len() + expected)
                .flat_map(|d| [expected.checked_add(d), expected.checked_sub(d)])
                .flatten()
                .filter(|&p| p >= floor && p <= cur.len())
                .find(|&p| fits(p))
        };
        let Some(p) = p else {
            return Err(format!("context of the change at line {} is not present", h.old_start));
        };
        let hit = p + lead;
        out.extend(&cur[cursor..hit]);
        out.extend(h.new_lines.iter().map(String::as_str));
        cursor = hit + h.old_len;
        offset = p as isize - pre_lo as isize;
        if start + h.old_len == before.len() {
            trailing = ends_with_newline(fc.after_text.as_deref().unwrap_or(""));
        }
    }
    out.extend(&cur[cursor..]);
    Ok(join_lines(&out, trailing))
}

fn slug(subject: &str) -> String {
    let mut s = String::new();
    for c in subject.chars() {
        if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
            s.push(c);
        } else if !s.ends_with('-') {
            s.push('-');
        }
    }
    let s: String = s.trim_matches(|c| c == '-' || c == '.').chars().take(52).collect();
    let s = s.trim_end_matches(['-', '.']).to_owned();
    if s.is_empty() {
        "patch".to_owned()
    } else {
        s
    }
}

fn header(commit: &Commit, index: usize, total: usize, split: bool) -> String {
    let date = DateTime::from_timestamp(commit.timestamp, 0).map_or_else(String::new, |d| d.to_rfc2822());
    let suffix = if split { " [split]" } else { "" };
    let mut out = format!(
        "From {} Mon Sep 17 00:00:00 2001\nDate: {date}\nSubject: [PATCH {index}/{total}] {}{suffix}\n\n",
        commit.id,
        commit.subject()
    );
    let body = commit.message.split_once('\n').map_or("", |(_, rest)| rest).trim();
    if !body.is_empty() {
        out.push_str(body);
        out.push_str("\n\n");
    }
    out
}

fn conflict(commit: &CommitId, file: &FilePath, reason: impl Into<String>) -> Error {
    Error::PatchConflict { commit: commit.clone(), file: file.clone(), reason: reason.into() }
}

/// The patch series of a slice, built by replaying its commits onto the
/// range's base snapshot. Fails on the first change whose pre-image is not
/// found in the sliced contents.
pub fn patch_series(h: &History, slice: &HistorySlice, context: usize) -> Result<Vec<Patch>> {
    let mut state = h.base_snapshot();
    let total = slice.commits.len();
    let mut patches = Vec::with_capacity(total);
    for (n, sc) in slice.commits.iter().enumerate() {
        let commit = h.commit(&sc.source).ok_or_else(|| Error::UnknownCriterion(sc.source.clone()))?;
        let mut diffs = String::new();
        let mut binaries = Vec::new();
        for fc in commit.file_changes.iter().filter(|fc| sc.included_files.contains(&fc.path)) {
            if fc.binary {
                binaries.push(fc.path.as_str());
                continue;
            }
            let src = fc.source_path();
            let current = state.get(src).cloned();
            let next = match fc.kind {
                ChangeKind::Added => {
                    if current.is_some() {
                        return Err(conflict(&commit.id, &fc.path, "file already exists"));
                    }
                    fc.after_text.clone()
                }
                ChangeKind::Deleted => {
                    if current != fc.before_text {
                        return Err(conflict(&commit.id, &fc.path, "content of the deleted file differs"));
                    }
                    None
                }
                ChangeKind::Modified | ChangeKind::Renamed => {
                    let Some(cur) = current.as_deref() else {
                        return Err(conflict(&commit.id, &fc.path, "file does not exist"));
                    };
                    Some(relocate(cur, fc, context).map_err(|r| conflict(&commit.id, &fc.path, r))?)
                }
            };
            diffs.push_str(&unified_diff(src, &fc.path, current.as_deref(), next.as_deref(), context));
            state.remove(src);
            if let Some(t) = next {
                state.insert(fc.path.clone(), t);
            }
        }
        let mut contents = header(commit, n + 1, total, sc.split);
        if !binaries.is_empty() {
            contents.push_str(&format!("Binary changes omitted: {}\n\n", binaries.join(", ")));
        }
        contents.push_str("---\n");
        contents.push_str(&diffs);
        patches.push(Patch { file_name: format!("{:04}-{}.patch", n + 1, slug(commit.subject())), contents });
    }
    Ok(patches)
}

/// Writes the slice's patch series into `out`, creating it if needed.
/// Nothing is written when any patch fails to build.
pub fn materialize(h: &History, slice: &HistorySlice, out: &Path, context: usize) -> Result<Vec<PathBuf>> {
    let patches = patch_series(h, slice, context)?;
    fs::create_dir_all(out)?;
    let mut written = Vec::with_capacity(patches.len());
    for p in patches {
        let path = out.join(&p.file_name);
        fs::write(&path, p.contents)?;
        written.push(path);
    }
    Ok(written)
}

struct Section<'a> {
    src: Option<FilePath>,
    dst: Option<FilePath>,
    hunks: Vec<(usize, usize, Vec<&'a str>)>,
}

fn parse_path(s: &str, prefix: &str) -> Option<FilePath> {
    if s == "/dev/null" {
        return None;
    }
    FilePath::new(s.strip_prefix(prefix).unwrap_or(s)).ok()
}

fn parse_range(s: &str) -> Option<(usize, usize)> {
    match s.split_once(',') {
        Some((a, b)) => Some((a.parse().ok()?, b.parse().ok()?)),
        None => Some((s.parse().ok()?, 1)),
    }
}

fn parse_sections(text: &str) -> std::result::Result<Vec<Section<'_>>, String> {
    let mut sections: Vec<Section> = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("diff --git ") {
            let (a, b) = rest.split_once(" b/").ok_or("malformed diff header")?;
            let (src, dst) = (parse_path(a, "a/"), FilePath::new(b).ok());
            sections.push(Section { src, dst, hunks: Vec::new() });
            continue;
        }
        let Some(sec) = sections.last_mut() else { continue };
        if line == "new file mode 100644" {
            sec.src = None;
        } else if line == "deleted file mode 100644" {
            sec.dst = None;
        } else if let Some(p) = line.strip_prefix("rename from ") {
            sec.src = FilePath::new(p).ok();
        } else if let Some(p) = line.strip_prefix("rename to ") {
            sec.dst = FilePath::new(p).ok();
        } else if let Some(p) = line.strip_prefix("--- ") {
            sec.src = parse_path(p, "a/");
        } else if let Some(p) = line.strip_prefix("+++ ") {
            sec.dst = parse_path(p, "b/");
        } else if let Some(rest) = line.strip_prefix("@@ -") {
            let (old, rest) = rest.split_once(" +").ok_or("malformed hunk header")?;
            let new = rest.split_once(" @@").ok_or("malformed hunk header")?.0;
            let (os, oc) = parse_range(old).ok_or("malformed hunk range")?;
            let (_, nc) = parse_range(new).ok_or("malformed hunk range")?;
            let start = if oc == 0 { os } else { os - 1 };
            sec.hunks.push((start, nc, Vec::new()));
        } else if let Some(h) = sec.hunks.last_mut() {
            h.2.push(line);
        }
    }
    Ok(sections)
}

/// Applies a patch series strictly (exact positions, no fuzz) onto a
/// snapshot and returns the resulting snapshot.
pub fn apply_series(base: &BTreeMap<FilePath, String>, patches: &[Patch]) -> Result<BTreeMap<FilePath, String>> {
    let mut state = base.clone();
    for p in patches {
        let id = p
            .contents
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("From "))
            .and_then(|l| l.split(' ').next())
            .and_then(|s| CommitId::new(s).ok())
            .ok_or_else(|| Error::InvalidHistory(format!("{}: missing From line", p.file_name)))?;
        let diff_start = p.contents.find("\ndiff --git ").map_or(p.contents.len(), |i| i + 1);
        let sections = parse_sections(&p.contents[diff_start..]).map_err(|r| {
            conflict(&id, &FilePath::new(p.file_name.clone()).unwrap_or_else(|_| FilePath::new("patch").unwrap()), r)
        })?;
        for sec in sections {
            let name = sec.dst.clone().or_else(|| sec.src.clone()).expect("a diff names a file");
            let fail = |r: &str| conflict(&id, &name, r);
            let current = match &sec.src {
                Some(s) => Some(state.get(s).ok_or_else(|| fail("file does not exist"))?.clone()),
                None => {
                    if sec.dst.as_ref().is_some_and(|d| state.contains_key(d)) {
                        return Err(fail("file already exists"));
                    }
                    None
                }
            };
            let text = current.as_deref().unwrap_or("");
            let cur = lines(text);
            let mut out: Vec<&str> = Vec::new();
            let mut trailing = ends_with_newline(text);
            let mut cursor = 0;
            for (start, new_count, body) in &sec.hunks {
                let (mut old, mut new) = (Vec::new(), Vec::new());
                let (mut old_open, mut new_open) = (false, false);
                let mut last = ' ';
                for l in body {
                    if *l == NO_NEWLINE {
                        match last {
                            '-' => old_open = true,
                            '+' => new_open = true,
                            _ => (old_open, new_open) = (true, true),
                        }
                        continue;
                    }
                    let (tag, rest) = l.split_at(1.min(l.len()));
                    last = tag.chars().next().unwrap_or(' ');
                    match last {
                        ' ' => {
                            old.push(rest);
                            new.push(rest);
                        }
                        '-' => old.push(rest),
                        '+' => new.push(rest),
                        _ => return Err(fail("malformed hunk line")),
                    }
                }
                if new.len() != *new_count || *start < cursor || start + old.len() > cur.len() {
                    return Err(fail("hunk out of range"));
                }
                if cur[*start..start + old.len()] != old[..] {
                    return Err(fail("hunk does not match"));
                }
                if start + old.len() == cur.len() && old_open == trailing && !old.is_empty() {
                    return Err(fail("final newline differs"));
                }
                out.extend(&cur[cursor..*start]);
                out.extend(&new);
                cursor = start + old.len();
                if cursor == cur.len() {
                    trailing = !new_open;
                }
            }
            out.extend(&cur[cursor..]);
            if let Some(s) = &sec.src {
                state.remove(s);
            }
            if let Some(d) = sec.dst {
                state.insert(d, join_lines(&out, trailing || out.is_empty()));
            }
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deps::build_graph;
    use crate::analysis::HistoryAnalysis;
    use crate::history::FixtureBuilder;
    use crate::slicer::slice;

    fn p(s: &str) -> FilePath {
        FilePath::new(s).unwrap()
    }

    #[test]
    fn diff_format() {
        let d = unified_diff(&p("f"), &p("f"), Some("a\nb\nc\n"), Some("a\nB\nc\n"), 3);
        assert_eq!(d, "diff --git a/f b/f\n--- a/f\n+++ b/f\n@@ -1,3 +1,3 @@\n a\n-b\n+B\n c\n");
        let added = unified_diff(&p("g"), &p("g"), None, Some("x"), 3);
        assert_eq!(added, "diff --git a/g b/g\nnew file mode 100644\n--- /dev/null\n+++ b/g\n@@ -0,0 +1 @@\n+x\n\\ No newline at end of file\n");
    }

    #[test]
    fn diff_roundtrips_through_apply() {
        let cases = [
            ("a\nb\nc\nd\ne\nf\ng\nh\ni\nj\n", "a\nB\nc\nd\ne\nf\ng\nh\nI\nj\n"),
            ("a\nb", "a\nb\n"),
            ("a\nb\n", "a\nb"),
            ("", "x\n"),
            ("x\n", ""),
            ("a\n", "z\na\n"),
        ];
        for (b, a) in cases {
            let patch = Patch {
                file_name: "0001-x.patch".into(),
                contents: format!("From c1 Mon Sep 17 00:00:00 2001\n---\n{}", unified_diff(&p("f"), &p("f"), Some(b), Some(a), 1)),
            };
            let base = BTreeMap::from([(p("f"), b.to_owned())]);
            let out = apply_series(&base, &[patch]).unwrap();
            assert_eq!(out[&p("f")], a, "{b:?} -> {a:?}");
        }
    }

    #[test]
    fn relocation_follows_shifted_lines() {
        let fc = FileChange::from_texts(p("f"), None, Some("a\nb\nc\n".into()), Some("a\nB\nc\n".into())).unwrap();
        assert_eq!(relocate("x\ny\na\nb\nc\n", &fc, 1).unwrap(), "x\ny\na\nB\nc\n");
        assert!(relocate("a\nq\nc\n", &fc, 1).is_err());
    }

    #[test]
    fn relocation_of_hunks_sharing_context() {
        let before = "1\n2\n3\n4\n5\n6\n7\n8\n";
        let after = "1\n2\nnew\n3\nX\n5\n6\n7\n8\n";
        let fc = FileChange::from_texts(p("f"), None, Some(before.into()), Some(after.into())).unwrap();
        assert_eq!(fc.hunks.len(), 2);
        assert_eq!(relocate(&format!("0\n{before}"), &fc, 3).unwrap(), format!("0\n{after}"));
        assert_eq!(relocate(before, &fc, 3).unwrap(), after);
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("Add final to fields"), "Add-final-to-fields");
        assert_eq!(slug("  --fix: a/b.c!"), "fix-a-b.c");
        assert_eq!(slug("!!!"), "patch");
    }

    #[test]
    fn missing_dependency_is_a_conflict() {
        let mut b = FixtureBuilder::new();
        b.base("f", "1\n2\n3\n4\n5\n");
        b.commit("c1", "first", [("f", Some("1\n2\nthree\n4\n5\n".into()))]);
        b.commit("c2", "second", [("f", Some("1\n2\nthree\nfour\n5\n".into()))]);
        let h = b.history();
        let g = build_graph(&h, &HistoryAnalysis::new(&h), 3).unwrap();
        let mut s = slice(&g, &CommitId::new("c2").unwrap()).unwrap();
        assert_eq!(s.commits.len(), 2);
        let series = patch_series(&h, &s, 3).unwrap();
        let out = apply_series(&h.base_snapshot(), &series).unwrap();
        assert_eq!(out, h.final_snapshot());

        s.commits.remove(0);
        match patch_series(&h, &s, 3) {
            Err(Error::PatchConflict { commit, .. }) => assert_eq!(commit.as_str(), "c2"),
            other => panic!("expected a conflict, got {other:?}"),
        }
    }
}
