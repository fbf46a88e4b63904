//! Raw dataset parsing and the implicit-feedback preprocessing pipeline.
//!
//! The pipeline runs in a fixed order: interaction-level filter, removal of
//! pairs observed with conflicting ratings, duplicate collapse, then the
//! explicit-rating threshold.

mod presets;

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interactions::{sparsity, InteractionMatrix};

pub use presets::{preset, PRESET_NAMES};

#[derive(Clone, Debug, PartialEq)]
pub struct RawRecord {
    pub user_id: String,
    pub item_id: String,
    pub rating: Option<f64>,
    pub interaction_type: Option<String>,
    /// Seconds or milliseconds, as found in the file. Parsed but unused.
    pub timestamp: Option<i64>,
}

impl RawRecord {
    pub fn new(user_id: impl Into<String>, item_id: impl Into<String>) -> Self {
        Self {
            user_id: user_id.into(),
            item_id: item_id.into(),
            rating: None,
            interaction_type: None,
            timestamp: None,
        }
    }

    pub fn rated(user_id: impl Into<String>, item_id: impl Into<String>, rating: f64) -> Self {
        Self {
            rating: Some(rating),
            ..Self::new(user_id, item_id)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeedbackKind {
    Explicit,
    Implicit,
    MultiLevel,
}

/// A column addressed either by zero-based position or by header name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Column {
    Index(usize),
    Name(String),
}

impl From<usize> for Column {
    fn from(i: usize) -> Self {
        Column::Index(i)
    }
}

impl From<&str> for Column {
    fn from(s: &str) -> Self {
        Column::Name(s.to_owned())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMapping {
    pub user: Column,
    pub item: Column,
    #[serde(default)]
    pub rating: Option<Column>,
    #[serde(default)]
    pub interaction_type: Option<Column>,
    #[serde(default)]
    pub timestamp: Option<Column>,
}

impl ColumnMapping {
    pub fn new(user: impl Into<Column>, item: impl Into<Column>) -> Self {
        Self {
            user: user.into(),
            item: item.into(),
            rating: None,
            interaction_type: None,
            timestamp: None,
        }
    }

    pub fn with_rating(mut self, c: impl Into<Column>) -> Self {
        self.rating = Some(c.into());
        self
    }

    pub fn with_type(mut self, c: impl Into<Column>) -> Self {
        self.interaction_type = Some(c.into());
        self
    }

    pub fn with_timestamp(mut self, c: impl Into<Column>) -> Self {
        self.timestamp = Some(c.into());
        self
    }
}

fn default_delimiter() -> String {
    ",".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub name: String,
    pub path: PathBuf,
    pub columns: ColumnMapping,
    /// A single character, a multi-character separator such as `::`, or the
    /// word `whitespace` for runs of spaces and tabs.
    #[serde(default = "default_delimiter")]
    pub delimiter: String,
    #[serde(default)]
    pub has_header: bool,
    pub feedback: FeedbackKind,
    #[serde(default)]
    pub selected_level: Option<String>,
    /// Keep ratings equal to the intermediary rating as well.
    #[serde(default)]
    pub inclusive_threshold: bool,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.delimiter.is_empty() {
            return Err(Error::InvalidConfig(format!("{}: empty delimiter", self.name)));
        }
        match self.feedback {
            FeedbackKind::MultiLevel => {
                if self.selected_level.is_none() {
                    return Err(Error::InvalidConfig(format!(
                        "{}: multi-level feedback requires selected_level",
                        self.name
                    )));
                }
                if self.columns.interaction_type.is_none() {
                    return Err(Error::InvalidConfig(format!(
                        "{}: multi-level feedback requires an interaction_type column",
                        self.name
                    )));
                }
            }
            FeedbackKind::Explicit if self.columns.rating.is_none() => {
                return Err(Error::InvalidConfig(format!(
                    "{}: explicit feedback requires a rating column",
                    self.name
                )));
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct ParsedDataset {
    pub records: Vec<RawRecord>,
    /// Data rows that failed type coercion or had an empty id.
    pub rejected: usize,
    /// One-based line numbers of the first few rejected rows.
    pub rejected_lines: Vec<usize>,
}

const REJECTED_LINES_KEPT: usize = 20;

enum Splitter<'a> {
    Whitespace,
    Separator(&'a str),
}

impl Splitter<'_> {
    fn split<'l>(&self, line: &'l str) -> Vec<&'l str> {
        match self {
            Splitter::Whitespace => line.split_whitespace().collect(),
            Splitter::Separator(sep) => line.split(sep).map(str::trim).collect(),
        }
    }
}

fn resolve(col: &Column, header: Option<&[String]>) -> Result<usize> {
    match col {
        Column::Index(i) => Ok(*i),
        Column::Name(name) => header
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(|| Error::MissingColumn(name.clone())),
    }
}

struct Resolved {
    user: usize,
    item: usize,
    rating: Option<usize>,
    kind: Option<usize>,
    timestamp: Option<usize>,
}

impl Resolved {
    fn new(m: &ColumnMapping, header: Option<&[String]>) -> Result<Self> {
        let opt = |c: &Option<Column>| c.as_ref().map(|c| resolve(c, header)).transpose();
        Ok(Self {
            user: resolve(&m.user, header)?,
            item: resolve(&m.item, header)?,
            rating: opt(&m.rating)?,
            kind: opt(&m.interaction_type)?,
            timestamp: opt(&m.timestamp)?,
        })
    }

    fn max_index(&self) -> usize {
        [Some(self.user), Some(self.item), self.rating, self.kind, self.timestamp]
            .into_iter()
            .flatten()
            .max()
            .unwrap_or(0)
    }

    fn record<S: AsRef<str>>(&self, fields: &[S]) -> Option<RawRecord> {
        let get = |i: usize| fields.get(i).map(|s| s.as_ref().trim());
        let user_id = get(self.user).filter(|s| !s.is_empty())?;
        let item_id = get(self.item).filter(|s| !s.is_empty())?;
        let rating = match self.rating {
            Some(c) => Some(get(c)?.parse::<f64>().ok().filter(|r| r.is_finite())?),
            None => None,
        };
        let interaction_type = match self.kind {
            Some(c) => Some(get(c)?.to_owned()),
            None => None,
        };
        let timestamp = match self.timestamp {
            Some(c) => Some(get(c)?.parse::<i64>().ok()?),
            None => None,
        };
        Some(RawRecord {
            user_id: user_id.to_owned(),
            item_id: item_id.to_owned(),
            rating,
            interaction_type,
            timestamp,
        })
    }
}

/// Reads every data row of the dataset file into a [`RawRecord`]. Rows that
/// fail coercion are counted in [`ParsedDataset::rejected`].
pub fn parse_dataset(spec: &DatasetSpec) -> Result<ParsedDataset> {
    spec.validate()?;
    let file = File::open(&spec.path).map_err(|e| Error::io(&spec.path, e))?;
    let parsed = if spec.delimiter.len() == 1 && spec.delimiter != " " {
        parse_csv(spec, file)?
    } else {
        parse_split(spec, file)?
    };
    if parsed.records.is_empty() {
        return Err(Error::NoParseableRows {
            path: spec.path.clone(),
            rejected: parsed.rejected,
        });
    }
    if parsed.rejected > 0 {
        log::warn!(
            "{}: rejected {} malformed rows (first at lines {:?})",
            spec.name,
            parsed.rejected,
            parsed.rejected_lines
        );
    }
    Ok(parsed)
}

fn parse_csv(spec: &DatasetSpec, file: File) -> Result<ParsedDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter.as_bytes()[0])
        .has_headers(spec.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let header: Option<Vec<String>> = if spec.has_header {
        Some(reader.headers()?.iter().map(str::to_owned).collect())
    } else {
        None
    };
    let cols = Resolved::new(&spec.columns, header.as_deref())?;
    let mut out = ParsedDataset::default();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                out.reject(line);
                continue;
            }
        };
        if row.iter().all(str::is_empty) {
            continue;
        }
        let line = row.position().map_or(0, |p| p.line() as usize);
        let fields: Vec<&str> = row.iter().collect();
        match cols.record(&fields) {
            Some(r) => out.records.push(r),
            None => out.reject(line),
        }
    }
    Ok(out)
}

fn parse_split(spec: &DatasetSpec, file: File) -> Result<ParsedDataset> {
    let splitter = if spec.delimiter.eq_ignore_ascii_case("whitespace") || spec.delimiter == " " {
        Splitter::Whitespace
    } else {
        Splitter::Separator(&spec.delimiter)
    };
    let mut lines = BufReader::new(file).lines().enumerate();
    let mut header = None;
    if spec.has_header {
        if let Some((_, line)) = lines.next() {
            let line = line.map_err(|e| Error::io(&spec.path, e))?;
            header = Some(splitter.split(&line).into_iter().map(str::to_owned).collect::<Vec<_>>());
        }
    }
    let cols = Resolved::new(&spec.columns, header.as_deref())?;
    if header.is_none() && cols.max_index() > 64 {
        log::warn!("{}: column index {} looks suspicious", spec.name, cols.max_index());
    }
    let mut out = ParsedDataset::default();
    for (n, line) in lines {
        let line = line.map_err(|e| Error::io(&spec.path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match cols.record(&splitter.split(&line)) {
            Some(r) => out.records.push(r),
            None => out.reject(n + 1),
        }
    }
    Ok(out)
}

impl ParsedDataset {
    fn reject(&mut self, line: usize) {
        self.rejected += 1;
        if self.rejected_lines.len() < REJECTED_LINES_KEPT {
            self.rejected_lines.push(line);
        }
    }
}

/// `min + (max - min) / 2` over every observed rating.
pub fn intermediary_rating(ratings: &[f64]) -> Result<f64> {
    let mut it = ratings.iter().copied();
    let first = it.next().ok_or(Error::NoRatings)?;
    let (lo, hi) = it.fold((first, first), |(lo, hi), r| (lo.min(r), hi.max(r)));
    Ok(lo + (hi - lo) / 2.0)
}

struct PairState {
    order: usize,
    rating: Option<f64>,
    conflicting: bool,
}

/// Applies the preprocessing pipeline and returns unique `(user, item)` pairs
/// in order of first appearance.
pub fn preprocess(records: &[RawRecord], spec: &DatasetSpec) -> Result<Vec<(String, String)>> {
    spec.validate()?;

    // the threshold sees every parsed rating, before any filtering
    let threshold = match spec.feedback {
        FeedbackKind::Explicit => {
            let ratings: Vec<f64> = records.iter().filter_map(|r| r.rating).collect();
            Some(intermediary_rating(&ratings)?)
        }
        _ => None,
    };

    let level = match spec.feedback {
        FeedbackKind::MultiLevel => spec.selected_level.as_deref(),
        _ => None,
    };

    let mut pairs: HashMap<(&str, &str), PairState> = HashMap::new();
    for r in records {
        if let Some(level) = level {
            if r.interaction_type.as_deref() != Some(level) {
                continue;
            }
        }
        let next = pairs.len();
        pairs
            .entry((r.user_id.as_str(), r.item_id.as_str()))
            .and_modify(|s| {
                if s.rating != r.rating {
                    s.conflicting = true;
                }
            })
            .or_insert(PairState {
                order: next,
                rating: r.rating,
                conflicting: false,
            });
    }

    let mut kept: Vec<(usize, &str, &str)> = pairs
        .into_iter()
        .filter(|(_, s)| !s.conflicting)
        .filter(|(_, s)| match threshold {
            None => true,
            Some(t) => match s.rating {
                Some(r) if spec.inclusive_threshold => r >= t,
                Some(r) => r > t,
                None => false,
            },
        })
        .map(|((u, i), s)| (s.order, u, i))
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyAfterPreprocessing);
    }
    kept.sort_unstable_by_key(|k| k.0);
    Ok(kept
        .into_iter()
        .map(|(_, u, i)| (u.to_owned(), i.to_owned()))
        .collect())
}

/// |U|, |I|, |R| and sparsity of a prepared dataset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub users: usize,
    pub items: usize,
    pub interactions: usize,
    pub sparsity: f64,
}

impl DatasetStats {
    pub fn of(m: &InteractionMatrix) -> Result<Self> {
        Ok(Self {
            users: m.n_users(),
            items: m.n_items(),
            interactions: m.interaction_count(),
            sparsity: sparsity(m)?,
        })
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|U|={} |I|={} |R|={} S={:.2}%",
            self.users,
            self.items,
            self.interactions,
            self.sparsity * 100.0
        )
    }
}

/// Writes one `user_id<TAB>item_id` line per interaction, users in index
/// order and items ascending by index within a user.
pub fn write_interactions(m: &InteractionMatrix, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (u, i) in m.iter() {
        writeln!(w, "{}\t{}", m.user_map().id(u), m.item_map().id(i)).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a canonical interactions file back into a matrix.
pub fn read_interactions(path: &Path) -> Result<InteractionMatrix> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let (u, i) = line.split_once('\t').ok_or_else(|| {
            Error::InvalidConfig(format!("{}:{}: expected user<TAB>item", path.display(), n + 1))
        })?;
        pairs.push((u.to_owned(), i.to_owned()));
    }
    InteractionMatrix::from_pairs(&pairs)
}

/// Parses, preprocesses and indexes a dataset in one step.
pub fn load_dataset(spec: &DatasetSpec) -> Result<(InteractionMatrix, ParsedDataset)> {
    let parsed = parse_dataset(spec)?;
    let pairs = preprocess(&parsed.records, spec)?;
    Ok((InteractionMatrix::from_pairs(&pairs)?, parsed))
}
