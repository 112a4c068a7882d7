//! Delimited claim files: one claim per row, header on the first line.

use std::path::Path;

use powerburr::ClaimSample;

use crate::error::CliError;

/// Which column holds the claim amounts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Name(String),
    Index(usize),
}

impl Column {
    /// A header name if one matches, otherwise a zero-based index.
    pub fn parse(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub column: Column,
    pub delimiter: u8,
    /// Subtracted from every claim; claims not exceeding it are dropped.
    pub deductible: Option<f64>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            column: Column::Index(0),
            delimiter: b',',
            deductible: None,
        }
    }
}

pub fn parse_delimiter(s: &str) -> Result<u8, CliError> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(CliError::Config(format!("delimiter must be one ASCII character, got {s:?}"))),
    }
}

pub fn ingest(path: &Path, opts: &IngestOptions) -> Result<ClaimSample, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
        .clone();
    let col = match &opts.column {
        Column::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Parse(format!("{}: no column named {name:?}", path.display())))?,
        Column::Index(i) => {
            // A purely numeric header name takes precedence over the index.
            let name = i.to_string();
            headers.iter().position(|h| h == name).unwrap_or(*i)
        }
    };
    if col >= headers.len() {
        return Err(CliError::Parse(format!(
            "{}: column {col} requested but the header has {} columns",
            path.display(),
            headers.len()
        )));
    }

    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = record.get(col).unwrap_or("");
        if field.is_empty() && record.iter().all(str::is_empty) {
            continue;
        }
        let v: f64 = field.parse().map_err(|_| {
            CliError::Parse(format!("{}:{line}: cannot parse {field:?} as a number", path.display()))
        })?;
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Parse(format!(
                "{}:{line}: claim {v} is not strictly positive",
                path.display()
            )));
        }
        values.push(v);
    }

    let mut subtracted = false;
    if let Some(d) = opts.deductible {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(CliError::Config(format!("deductible must be nonnegative, got {d}")));
        }
        values = values.into_iter().map(|v| v - d).filter(|&v| v > 0.0).collect();
        subtracted = true;
    }
    if values.is_empty() {
        return Err(CliError::Parse(format!("{}: no claims left after filtering", path.display())));
    }
    let mut sample = ClaimSample::new(values, path.display().to_string())
        .map_err(|e| CliError::Parse(e.to_string()))?;
    sample.deductible_subtracted = subtracted;
    Ok(sample)
}
