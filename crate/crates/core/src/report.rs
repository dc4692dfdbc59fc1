//! End-to-end runs and the reports they print.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::Serialize;

use crate::analysis::HistoryAnalysis;
use crate::deps::{build_graph, eliminate, DependencyGraph};
use crate::error::{Error, Result};
use crate::history::{load_fixture_history, load_git_history, CommitId, History};
use crate::slicer::{materialize, HistorySlice, Slicer};
use crate::systematic::{detect_from, SystematicVerdict, VerdictKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Git { repo: PathBuf, from: String, to: String },
    Fixture(PathBuf),
}

impl Source {
    pub fn load(&self) -> Result<History> {
        match self {
            Source::Git { repo, from, to } => load_git_history(repo, from, to),
            Source::Fixture(path) => load_fixture_history(path),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Slice,
    Detect,
    Deps,
    Report,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub source: Source,
    /// Absent means every commit in turn.
    pub criterion: Option<String>,
    pub context: usize,
    pub elimination: bool,
    pub format: Format,
    pub patches: Option<PathBuf>,
    pub min_slice_size_report: usize,
}

impl RunConfig {
    pub fn new(command: Command, source: Source) -> RunConfig {
        RunConfig {
            command,
            source,
            criterion: None,
            context: 3,
            elimination: true,
            format: Format::Json,
            patches: None,
            min_slice_size_report: 3,
        }
    }
}

/// Everything derived from one history: detector verdicts and the
/// dependency graph with and without elimination.
pub struct Pipeline {
    pub history: History,
    pub verdicts: BTreeMap<CommitId, SystematicVerdict>,
    /// Without elimination.
    pub graph: DependencyGraph,
    /// With the verdicts' splittable commits eliminated.
    pub reduced: DependencyGraph,
}

impl Pipeline {
    pub fn new(history: History, context: usize) -> Result<Pipeline> {
        let analysis = HistoryAnalysis::new(&history);
        let verdicts = detect_from(&analysis);
        let graph = build_graph(&history, &analysis, context)?;
        Ok(Pipeline::with_verdicts(history, graph, verdicts))
    }

    /// A pipeline whose detector output is replaced by `verdicts`.
    pub fn with_verdicts(
        history: History,
        graph: DependencyGraph,
        verdicts: BTreeMap<CommitId, SystematicVerdict>,
    ) -> Pipeline {
        let reduced = eliminate(&graph, &verdicts);
        Pipeline { history, verdicts, graph, reduced }
    }

    /// Verdicts as if no commit were systematic.
    pub fn without_detection(self) -> Pipeline {
        let verdicts = self
            .verdicts
            .keys()
            .map(|c| {
                let v = SystematicVerdict {
                    commit: c.clone(),
                    kind: VerdictKind::NonSystematic,
                    splittable: false,
                    witness: None,
                    uniform_script_set: None,
                };
                (c.clone(), v)
            })
            .collect();
        Pipeline::with_verdicts(self.history, self.graph, verdicts)
    }

    /// Resolves a criterion by exact id or unique id prefix.
    pub fn resolve(&self, criterion: &str) -> Result<CommitId> {
        let id = CommitId::new(criterion)?;
        if self.history.commit(&id).is_some() {
            return Ok(id);
        }
        let mut hits = self.history.commits().iter().filter(|c| c.id.as_str().starts_with(criterion));
        match (hits.next(), hits.next()) {
            (Some(c), None) => Ok(c.id.clone()),
            _ => Err(Error::UnknownCriterion(id)),
        }
    }

    pub fn verdicts_in_order(&self) -> Vec<&SystematicVerdict> {
        self.history.commits().iter().map(|c| &self.verdicts[&c.id]).collect()
    }

    pub fn systematic_counts(&self) -> SystematicCounts {
        SystematicCounts::of(self.verdicts.values())
    }

    /// Slices for the given criteria (all commits when `None`), in history
    /// order, over the reduced graph.
    pub fn slices(&self, criteria: Option<&[CommitId]>) -> Result<Vec<HistorySlice>> {
        use rayon::prelude::*;
        let slicer = Slicer::new(&self.reduced);
        let all: Vec<CommitId>;
        let ids = match criteria {
            Some(ids) => ids,
            None => {
                all = self.history.commits().iter().map(|c| c.id.clone()).collect();
                &all
            }
        };
        ids.par_iter().map(|c| slicer.slice(c)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SystematicCounts {
    pub total: usize,
    pub ast: usize,
    pub whitespace_comment: usize,
    pub splittable: usize,
}

impl SystematicCounts {
    pub fn of<'a>(verdicts: impl IntoIterator<Item = &'a SystematicVerdict>) -> SystematicCounts {
        let mut c = SystematicCounts::default();
        for v in verdicts {
            match v.kind {
                VerdictKind::AstSystematic => c.ast += 1,
                VerdictKind::WhitespaceOrCommentOnly => c.whitespace_comment += 1,
                VerdictKind::NonSystematic => continue,
            }
            c.total += 1;
            c.splittable += usize::from(v.splittable);
        }
        c
    }
}

/// Slice size of one criterion: change elements and commits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SliceSize {
    pub criterion: CommitId,
    pub elements: usize,
    pub commits: usize,
}

impl SliceSize {
    pub fn of(s: &HistorySlice) -> SliceSize {
        SliceSize { criterion: s.criterion.clone(), elements: s.stats.size, commits: s.stats.commits }
    }

    /// Size the same slice has without elimination.
    pub fn original_of(s: &HistorySlice) -> SliceSize {
        SliceSize {
            criterion: s.criterion.clone(),
            elements: s.stats.original_size,
            commits: s.stats.original_commits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionRow {
    pub criterion: CommitId,
    pub original_size: usize,
    pub reduced_size: usize,
    pub original_commits: usize,
    pub reduced_commits: usize,
    pub reduction_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport {
    pub per_criterion: Vec<ReductionRow>,
    /// Mean of `reduction_pct` over rows with `original_size` at least
    /// `min_slice_size`; zero when there are none.
    pub mean_reduction_pct: f64,
    pub rows_averaged: usize,
    pub min_slice_size: usize,
    pub systematic_counts: SystematicCounts,
}

impl ReductionReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `criterion,original_size,reduced_size,reduction_pct`
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["criterion", "original_size", "reduced_size", "reduction_pct"]).expect("in-memory write");
        for r in &self.per_criterion {
            w.write_record([
                r.criterion.as_str(),
                &r.original_size.to_string(),
                &r.reduced_size.to_string(),
                &format!("{:.4}", r.reduction_pct),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

/// Pairs slice sizes with and without elimination, row by row.
pub fn compare_reports(
    with_elim: &[SliceSize],
    without_elim: &[SliceSize],
    min_slice_size: usize,
) -> Result<ReductionReport> {
    let with: BTreeMap<&CommitId, &SliceSize> = with_elim.iter().map(|s| (&s.criterion, s)).collect();
    let a: BTreeSet<&CommitId> = with.keys().copied().collect();
    let b: BTreeSet<&CommitId> = without_elim.iter().map(|s| &s.criterion).collect();
    if a != b || a.len() != with_elim.len() || b.len() != without_elim.len() {
        let only: Vec<String> = a.symmetric_difference(&b).map(|c| c.to_string()).collect();
        return Err(Error::MismatchedCriteria(if only.is_empty() {
            "duplicate criteria".to_owned()
        } else {
            only.join(", ")
        }));
    }
    let mut rows = Vec::with_capacity(without_elim.len());
    for orig in without_elim {
        let red = with[&orig.criterion];
        let reduction_pct = if orig.elements == 0 {
            0.0
        } else {
            100.0 * (1.0 - red.elements as f64 / orig.elements as f64)
        };
        rows.push(ReductionRow {
            criterion: orig.criterion.clone(),
            original_size: orig.elements,
            reduced_size: red.elements,
            original_commits: orig.commits,
            reduced_commits: red.commits,
            reduction_pct,
        });
    }
    let counted: Vec<f64> =
        rows.iter().filter(|r| r.original_size >= min_slice_size).map(|r| r.reduction_pct).collect();
    let mean = if counted.is_empty() { 0.0 } else { counted.iter().sum::<f64>() / counted.len() as f64 };
    Ok(ReductionReport {
        per_criterion: rows,
        mean_reduction_pct: mean,
        rows_averaged: counted.len(),
        min_slice_size,
        systematic_counts: SystematicCounts::default(),
    })
}

/// Output of one run: what goes to standard output, plus written patches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub stdout: String,
    pub patches: Vec<PathBuf>,
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn csv_table<const N: usize>(header: [&str; N], rows: impl IntoIterator<Item = [String; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let history = config.source.load()?;
    let mut pipeline = Pipeline::new(history, config.context)?;
    if !config.elimination {
        pipeline = pipeline.without_detection();
    }
    run_pipeline(&pipeline, config)
}

/// Runs a command over an already built pipeline.
pub fn run_pipeline(p: &Pipeline, config: &RunConfig) -> Result<RunOutput> {
    let criteria = config.criterion.as_deref().map(|c| p.resolve(c)).transpose()?;
    if config.patches.is_some() && (config.command != Command::Slice || criteria.is_none()) {
        return Err(Error::InvalidConfig("patch output needs the slice command and a criterion".into()));
    }
    let mut patches = Vec::new();
    let stdout = match config.command {
        Command::Detect => {
            let verdicts = p.verdicts_in_order();
            match config.format {
                Format::Json => json(&verdicts),
                Format::Csv => csv_table(
                    ["commit", "kind", "splittable", "witness"],
                    verdicts.iter().map(|v| {
                        let witness = v.witness.as_ref().map_or(String::new(), |(a, b)| format!("{a}|{b}"));
                        [v.commit.to_string(), v.kind.as_str().to_owned(), v.splittable.to_string(), witness]
                    }),
                ),
            }
        }
        Command::Deps => match config.format {
            Format::Json => p.reduced.to_json(),
            Format::Csv => p.reduced.to_edge_list(true),
        },
        Command::Slice => {
            let ids = criteria.map(|c| vec![c]);
            let slices = p.slices(ids.as_deref())?;
            if let (Some(dir), [s]) = (&config.patches, slices.as_slice()) {
                patches = materialize(&p.history, s, dir, config.context)?;
            }
            match config.format {
                Format::Json if ids.is_some() => json(&slices[0]),
                Format::Json => json(&slices),
                Format::Csv => csv_table(
                    ["criterion", "size", "commits", "split_commits", "original_size", "original_commits"],
                    slices.iter().map(|s| {
                        [
                            s.criterion.to_string(),
                            s.stats.size.to_string(),
                            s.stats.commits.to_string(),
                            s.commits.iter().filter(|c| c.split).count().to_string(),
                            s.stats.original_size.to_string(),
                            s.stats.original_commits.to_string(),
                        ]
                    }),
                ),
            }
        }
        Command::Report => {
            let ids = criteria.map(|c| vec![c]);
            let slices = p.slices(ids.as_deref())?;
            let with: Vec<SliceSize> = slices.iter().map(SliceSize::of).collect();
            let without: Vec<SliceSize> = slices.iter().map(SliceSize::original_of).collect();
            let mut report = compare_reports(&with, &without, config.min_slice_size_report)?;
            report.systematic_counts = p.systematic_counts();
            match config.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            }
        }
    };
    Ok(RunOutput { stdout, patches })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn size(c: &str, elements: usize) -> SliceSize {
        SliceSize { criterion: CommitId::new(c).unwrap(), elements, commits: 1 }
    }

    #[test]
    fn identical_inputs_reduce_nothing() {
        let rows = [size("a", 4), size("b", 1)];
        let r = compare_reports(&rows, &rows, 3).unwrap();
        assert!(r.per_criterion.iter().all(|r| r.reduction_pct == 0.0));
        assert_eq!(r.rows_averaged, 1);
        assert_eq!(r.mean_reduction_pct, 0.0);
    }

    #[test]
    fn mean_skips_small_slices() {
        let with = [size("a", 1), size("b", 1), size("c", 2)];
        let without = [size("a", 4), size("b", 2), size("c", 8)];
        let r = compare_reports(&with, &without, 3).unwrap();
        assert_eq!(r.rows_averaged, 2);
        assert!((r.mean_reduction_pct - (75.0 + 75.0) / 2.0).abs() < 1e-12);
        assert_eq!(
            r.to_csv(),
            "criterion,original_size,reduced_size,reduction_pct\na,4,1,75.0000\nb,2,1,50.0000\nc,8,2,75.0000\n"
        );
    }

    #[test]
    fn mismatched_criteria() {
        let err = compare_reports(&[size("a", 1)], &[size("b", 1)], 3).unwrap_err();
        assert!(matches!(err, Error::MismatchedCriteria(m) if m == "a, b"));
    }
}
