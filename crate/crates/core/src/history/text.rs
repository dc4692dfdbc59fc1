//! Line handling and the line diff every ingestion route shares.

use similar::algorithms::{myers, Capture};
use similar::DiffOp;

use super::Hunk;

/// CRLF to LF.
pub fn normalize(text: &str) -> String {
    if text.contains('\r') {
        text.replace("\r\n", "\n")
    } else {
        text.to_owned()
    }
}

/// Lines without terminators. A trailing newline does not open a new line.
pub fn lines(text: &str) -> Vec<&str> {
    text.split_inclusive('\n')
        .map(|l| l.strip_suffix('\n').unwrap_or(l))
        .collect()
}

/// False only when the text is non-empty and its last line is unterminated.
pub fn ends_with_newline(text: &str) -> bool {
    text.is_empty() || text.ends_with('\n')
}

pub fn join_lines(lines: &[impl AsRef<str>], trailing_newline: bool) -> String {
    let mut out = String::new();
    for (i, l) in lines.iter().enumerate() {
        out.push_str(l.as_ref());
        if i + 1 < lines.len() || trailing_newline {
            out.push('\n');
        }
    }
    out
}

/// Minimal line diff between two texts, as non-overlapping hunks in order.
///
/// Lines are compared with their terminators, so a change in the final
/// newline shows up as a change of the last line.
pub fn diff_lines(before: &str, after: &str) -> Vec<Hunk> {
    let old: Vec<&str> = before.split_inclusive('\n').collect();
    let new: Vec<&str> = after.split_inclusive('\n').collect();
    let strip = |l: &&str| l.strip_suffix('\n').unwrap_or(l).to_owned();

    let mut hunks: Vec<Hunk> = Vec::new();
    let mut pending: Option<(usize, usize, usize, usize)> = None;
    let flush = |p: (usize, usize, usize, usize), hunks: &mut Vec<Hunk>| {
        let (os, ol, ns, nl) = p;
        hunks.push(Hunk {
            old_start: os + 1,
            old_len: ol,
            new_start: ns + 1,
            new_len: nl,
            old_lines: old[os..os + ol].iter().map(strip).collect(),
            new_lines: new[ns..ns + nl].iter().map(strip).collect(),
        });
    };
    // The raw algorithm output; the crate's compacting wrappers can emit
    // inconsistent operation sequences.
    let mut capture = Capture::new();
    myers::diff(&mut capture, &old, 0..old.len(), &new, 0..new.len()).expect("capture never fails");
    for op in capture.into_ops() {
        let (os, ol, ns, nl) = match op {
            DiffOp::Equal { .. } => {
                if let Some(p) = pending.take() {
                    flush(p, &mut hunks);
                }
                continue;
            }
            DiffOp::Delete { old_index, old_len, new_index } => (old_index, old_len, new_index, 0),
            DiffOp::Insert { old_index, new_index, new_len } => (old_index, 0, new_index, new_len),
            DiffOp::Replace { old_index, old_len, new_index, new_len } => {
                (old_index, old_len, new_index, new_len)
            }
        };
        pending = Some(match pending {
            Some((pos, pol, pns, pnl)) => (pos, pol + ol, pns, pnl + nl),
            None => (os, ol, ns, nl),
        });
    }
    if let Some(p) = pending {
        flush(p, &mut hunks);
    }
    hunks
}

/// Replays hunks onto the pre-image lines.
pub fn apply_hunks(before: &[&str], hunks: &[Hunk]) -> Option<Vec<String>> {
    let mut out = Vec::with_capacity(before.len());
    let mut cursor = 0usize;
    for h in hunks {
        let start = h.old_start - 1;
        if start < cursor || start + h.old_len > before.len() {
            return None;
        }
        out.extend(before[cursor..start].iter().map(|s| s.to_string()));
        if before[start..start + h.old_len] != h.old_lines[..] {
            return None;
        }
        out.extend(h.new_lines.iter().cloned());
        cursor = start + h.old_len;
    }
    out.extend(before[cursor..].iter().map(|s| s.to_string()));
    Some(out)
}
