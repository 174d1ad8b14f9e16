//! Loading experiment results: confusion counts, raw predictions or
//! precomputed precision/recall pairs.
//!
//! The CSV dialect is deliberately strict: comma separated, no quoting, exact
//! lowercase headers, `\n` or `\r\n` line endings.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::ClassifierRecord;
use crate::metrics::{simple_rates, ConfusionCounts, MetricsError, PointEstimate};

pub const COUNTS_HEADER: [&str; 6] = ["classifier", "fold", "tp", "fn", "fp", "tn"];
pub const PREDICTIONS_HEADER: [&str; 4] = ["classifier", "fold", "y_true", "y_pred"];
pub const DEFAULT_POSITIVE_LABEL: &str = "1";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("expected header `{expected}`, found `{found}`")]
    MissingHeader { expected: String, found: String },
    #[error("row {row}: expected {expected} fields, found {found}")]
    FieldCount {
        row: u64,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {column}: cannot parse {value:?}")]
    BadCell {
        row: u64,
        column: &'static str,
        value: String,
    },
    #[error("duplicate entry for classifier {classifier:?}, fold {fold}")]
    DuplicateKey { classifier: String, fold: u32 },
    #[error("classifier {classifier:?} has folds {found:?}, expected {expected:?}")]
    RaggedFolds {
        classifier: String,
        expected: Vec<u32>,
        found: Vec<u32>,
    },
    #[error("table mixes confusion counts and rate payloads")]
    MixedPayload,
    #[error("input contains no data rows")]
    NoRows,
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("classifier {classifier:?}, fold {fold}: {field} = {value} is outside [0, 1]")]
    ValueOutOfRange {
        classifier: String,
        fold: u32,
        field: &'static str,
        value: f64,
    },
    #[error("classifier {classifier:?}, fold {fold}: {source}")]
    Rates {
        classifier: String,
        fold: u32,
        source: MetricsError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IngestWarning {
    /// The positive label never occurs among the true labels.
    UnseenPositiveLabel(String),
}

impl std::fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IngestWarning::UnseenPositiveLabel(l) => {
                write!(f, "positive label {l:?} does not appear in any y_true cell")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payload {
    Counts(ConfusionCounts),
    Rates(PointEstimate),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub classifier: String,
    pub fold: u32,
    pub payload: Payload,
}

/// Validated experiment results, kept sorted by `(classifier, fold)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTable {
    entries: Vec<RunEntry>,
    pub warnings: Vec<IngestWarning>,
}

impl RunTable {
    pub fn new(mut entries: Vec<RunEntry>) -> Result<Self, IngestError> {
        if entries.is_empty() {
            return Err(IngestError::NoRows);
        }
        let counts = matches!(entries[0].payload, Payload::Counts(_));
        if entries
            .iter()
            .any(|e| matches!(e.payload, Payload::Counts(_)) != counts)
        {
            return Err(IngestError::MixedPayload);
        }
        entries.sort_by(|a, b| (&a.classifier, a.fold).cmp(&(&b.classifier, b.fold)));
        for w in entries.windows(2) {
            if w[0].classifier == w[1].classifier && w[0].fold == w[1].fold {
                return Err(IngestError::DuplicateKey {
                    classifier: w[0].classifier.clone(),
                    fold: w[0].fold,
                });
            }
        }
        let mut folds: BTreeMap<&str, Vec<u32>> = BTreeMap::new();
        for e in &entries {
            folds.entry(&e.classifier).or_default().push(e.fold);
        }
        let mut iter = folds.iter();
        let (_, expected) = iter.next().expect("non-empty");
        for (name, found) in iter {
            if found != expected {
                return Err(IngestError::RaggedFolds {
                    classifier: name.to_string(),
                    expected: expected.clone(),
                    found: found.clone(),
                });
            }
        }
        Ok(Self {
            entries,
            warnings: Vec::new(),
        })
    }

    pub fn entries(&self) -> &[RunEntry] {
        &self.entries
    }

    pub fn is_counts(&self) -> bool {
        matches!(self.entries[0].payload, Payload::Counts(_))
    }

    pub fn classifier_names(&self) -> Vec<&str> {
        let names: BTreeSet<&str> = self.entries.iter().map(|e| e.classifier.as_str()).collect();
        names.into_iter().collect()
    }
}

fn read_all(mut input: impl Read) -> Result<String, IngestError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    Ok(text)
}

/// Yields `(line, fields)` for each data row after checking the exact header.
fn strict_rows(text: &str, header: &[&str]) -> Result<Vec<(u64, Vec<String>)>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .quoting(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let expected = header.join(",");
    let first = match records.next() {
        Some(r) => r?,
        None => {
            return Err(IngestError::MissingHeader {
                expected,
                found: String::new(),
            })
        }
    };
    if first.iter().ne(header.iter().copied()) {
        return Err(IngestError::MissingHeader {
            expected,
            found: first.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(IngestError::FieldCount {
                row: line,
                expected: header.len(),
                found: rec.len(),
            });
        }
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(rows)
}

fn cell<T: std::str::FromStr>(
    row: u64,
    column: &'static str,
    value: &str,
) -> Result<T, IngestError> {
    value.parse().map_err(|_| IngestError::BadCell {
        row,
        column,
        value: value.to_string(),
    })
}

fn name_cell(row: u64, value: &str) -> Result<String, IngestError> {
    if value.is_empty() {
        return Err(IngestError::BadCell {
            row,
            column: "classifier",
            value: String::new(),
        });
    }
    Ok(value.to_string())
}

pub fn parse_counts_csv(input: impl Read) -> Result<RunTable, IngestError> {
    let text = read_all(input)?;
    let mut entries = Vec::new();
    for (row, f) in strict_rows(&text, &COUNTS_HEADER)? {
        let counts = ConfusionCounts {
            tp: cell(row, "tp", &f[2])?,
            fn_: cell(row, "fn", &f[3])?,
            fp: cell(row, "fp", &f[4])?,
            tn: cell(row, "tn", &f[5])?,
        };
        if counts.total() == 0 {
            return Err(IngestError::BadCell {
                row,
                column: "tn",
                value: "all four counts are zero".into(),
            });
        }
        entries.push(RunEntry {
            classifier: name_cell(row, &f[0])?,
            fold: cell(row, "fold", &f[1])?,
            payload: Payload::Counts(counts),
        });
    }
    RunTable::new(entries)
}

pub fn parse_predictions_csv(
    input: impl Read,
    positive_label: &str,
) -> Result<RunTable, IngestError> {
    let text = read_all(input)?;
    let mut tally: HashMap<(String, u32), ConfusionCounts> = HashMap::new();
    let mut seen_positive = false;
    for (row, f) in strict_rows(&text, &PREDICTIONS_HEADER)? {
        let key = (name_cell(row, &f[0])?, cell(row, "fold", &f[1])?);
        let actual = f[2] == positive_label;
        let predicted = f[3] == positive_label;
        seen_positive |= actual;
        let c = tally.entry(key).or_default();
        match (actual, predicted) {
            (true, true) => c.tp += 1,
            (true, false) => c.fn_ += 1,
            (false, true) => c.fp += 1,
            (false, false) => c.tn += 1,
        }
    }
    let entries = tally
        .into_iter()
        .map(|((classifier, fold), c)| RunEntry {
            classifier,
            fold,
            payload: Payload::Counts(c),
        })
        .collect();
    let mut table = RunTable::new(entries)?;
    if !seen_positive {
        table.warnings.push(IngestWarning::UnseenPositiveLabel(
            positive_label.to_string(),
        ));
    }
    Ok(table)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RateRow {
    fold: u32,
    ppv: f64,
    tpr: f64,
}

pub fn parse_rates_json(input: impl Read) -> Result<RunTable, IngestError> {
    let text = read_all(input)?;
    let doc: BTreeMap<String, Vec<RateRow>> =
        serde_json::from_str(&text).map_err(|e| IngestError::MalformedDocument(e.to_string()))?;
    let mut entries = Vec::new();
    for (classifier, rows) in doc {
        if classifier.is_empty() {
            return Err(IngestError::MalformedDocument(
                "empty classifier name".into(),
            ));
        }
        for row in rows {
            for (field, value) in [("ppv", row.ppv), ("tpr", row.tpr)] {
                if !(0.0..=1.0).contains(&value) {
                    return Err(IngestError::ValueOutOfRange {
                        classifier,
                        fold: row.fold,
                        field,
                        value,
                    });
                }
            }
            entries.push(RunEntry {
                classifier: classifier.clone(),
                fold: row.fold,
                payload: Payload::Rates(PointEstimate {
                    ppv: row.ppv,
                    tpr: row.tpr,
                }),
            });
        }
    }
    RunTable::new(entries)
}

/// Counts table in the `classifier,fold,tp,fn,fp,tn` format. Rate tables yield only the header.
pub fn to_counts_csv(table: &RunTable) -> String {
    let mut out = COUNTS_HEADER.join(",");
    out.push('\n');
    for e in &table.entries {
        if let Payload::Counts(c) = e.payload {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.classifier, e.fold, c.tp, c.fn_, c.fp, c.tn
            ));
        }
    }
    out
}

/// Rates document accepted by [`parse_rates_json`]. Count payloads are converted first.
pub fn to_rates_json(table: &RunTable) -> Result<String, IngestError> {
    let mut doc: BTreeMap<&str, Vec<RateRow>> = BTreeMap::new();
    for e in &table.entries {
        let p = point_of(e)?;
        doc.entry(&e.classifier).or_default().push(RateRow {
            fold: e.fold,
            ppv: p.ppv,
            tpr: p.tpr,
        });
    }
    Ok(serde_json::to_string_pretty(&doc).expect("rates document serializes"))
}

fn point_of(e: &RunEntry) -> Result<PointEstimate, IngestError> {
    match e.payload {
        Payload::Rates(p) => Ok(p),
        Payload::Counts(c) => {
            simple_rates(&c)
                .map(|r| r.point())
                .map_err(|source| IngestError::Rates {
                    classifier: e.classifier.clone(),
                    fold: e.fold,
                    source,
                })
        }
    }
}

/// Classifier records sorted by name, folds ordered by fold id.
pub fn to_records(table: &RunTable) -> Result<Vec<ClassifierRecord>, IngestError> {
    let mut records: Vec<ClassifierRecord> = Vec::new();
    for e in &table.entries {
        let p = point_of(e)?;
        match records.last_mut() {
            Some(r) if r.name == e.classifier => r.folds.push(p),
            _ => records.push(ClassifierRecord::holdout(e.classifier.clone(), p)),
        }
    }
    Ok(records)
}
