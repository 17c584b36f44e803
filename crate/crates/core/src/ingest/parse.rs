//! Tab-separated readers driven by a configurable column map.

use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{normalize_keyword, AuthorshipLink, CitationEdge, KeywordRecord, PaperRecord, RawGraph};
use crate::error::{Error, Result};
use crate::tsv;

/// A record type that can be read from one TSV line.
pub trait TableRecord: Sized {
    type Columns;

    /// Largest column index the mapping reads.
    fn max_column(cols: &Self::Columns) -> usize;

    /// Builds a record from the split line, or explains why the line is skipped.
    fn from_fields(fields: &[&str], cols: &Self::Columns, opts: &ParseOptions) -> Result<Self, String>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperColumns {
    pub paper_id: usize,
    pub year: usize,
    #[serde(default)]
    pub conference: Option<usize>,
    #[serde(default)]
    pub full_research: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorshipColumns {
    pub paper_id: usize,
    pub author_id: usize,
    #[serde(default)]
    pub affiliation_id: Option<usize>,
    #[serde(default)]
    pub author_sequence: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationColumns {
    pub citing: usize,
    pub cited: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordColumns {
    pub paper_id: usize,
    pub keyword: usize,
}

/// Column layout for each file of a dump.
///
/// The defaults follow the 2016 MAG release: `Papers.txt` (id, titles, year
/// at 3, conference series at 9), `PaperAuthorAffiliations.txt` (paper,
/// author, affiliation, names, sequence at 5), `PaperReferences.txt` and
/// `PaperKeywords.txt`. MAG has no full-research column, so that flag comes
/// from a separate flag file unless a column is configured.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSchema {
    #[serde(default)]
    pub has_header: bool,
    pub papers: PaperColumns,
    pub authorships: AuthorshipColumns,
    pub citations: CitationColumns,
    pub keywords: KeywordColumns,
}

impl Default for IngestSchema {
    fn default() -> Self {
        Self {
            has_header: false,
            papers: PaperColumns {
                paper_id: 0,
                year: 3,
                conference: Some(9),
                full_research: None,
            },
            authorships: AuthorshipColumns {
                paper_id: 0,
                author_id: 1,
                affiliation_id: Some(2),
                author_sequence: Some(5),
            },
            citations: CitationColumns { citing: 0, cited: 1 },
            keywords: KeywordColumns {
                paper_id: 0,
                keyword: 1,
            },
        }
    }
}

impl IngestSchema {
    /// The layout used by [`super::write_snapshot`].
    pub fn interchange() -> Self {
        Self {
            has_header: false,
            papers: PaperColumns {
                paper_id: 0,
                year: 1,
                conference: Some(2),
                full_research: Some(3),
            },
            authorships: AuthorshipColumns {
                paper_id: 0,
                author_id: 1,
                affiliation_id: Some(2),
                author_sequence: Some(3),
            },
            citations: CitationColumns { citing: 0, cited: 1 },
            keywords: KeywordColumns {
                paper_id: 0,
                keyword: 1,
            },
        }
    }

    pub fn options(&self) -> ParseOptions {
        ParseOptions {
            has_header: self.has_header,
            ..ParseOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    pub has_header: bool,
    /// Treat malformed lines as fatal instead of counting them.
    pub strict: bool,
    /// Years outside `[min_year, max_year]` are malformed.
    pub min_year: i32,
    pub max_year: i32,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            has_header: false,
            strict: false,
            min_year: 1800,
            max_year: current_year() + 1,
        }
    }
}

/// Records read from one table plus the lines that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub skipped: usize,
    /// `(line number, reason)` for the first few skipped lines.
    pub skip_samples: Vec<(usize, String)>,
}

const SKIP_SAMPLES: usize = 10;

pub fn parse_table<T: TableRecord>(
    path: &Path,
    cols: &T::Columns,
    opts: &ParseOptions,
) -> Result<Parsed<T>> {
    let reader = tsv::open(path)?;
    parse_reader(reader, path, cols, opts)
}

/// Like [`parse_table`] over any buffered reader; `source` labels errors.
pub fn parse_reader<T: TableRecord, R: BufRead>(
    reader: R,
    source: &Path,
    cols: &T::Columns,
    opts: &ParseOptions,
) -> Result<Parsed<T>> {
    let max_col = T::max_column(cols);
    let mut out = Parsed {
        records: Vec::new(),
        skipped: 0,
        skip_samples: Vec::new(),
    };
    let mut checked_width = false;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(source, e))?;
        if idx == 0 && opts.has_header {
            continue;
        }
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !checked_width {
            if fields.len() <= max_col {
                return Err(Error::Schema(format!(
                    "{}: column {max_col} requested but line {line_no} has {} columns",
                    source.display(),
                    fields.len()
                )));
            }
            checked_width = true;
        }
        let parsed = if fields.len() <= max_col {
            Err(format!("expected at least {} columns, found {}", max_col + 1, fields.len()))
        } else {
            T::from_fields(&fields, cols, opts)
        };
        match parsed {
            Ok(record) => out.records.push(record),
            Err(reason) if opts.strict => {
                return Err(Error::Malformed {
                    path: source.to_path_buf(),
                    line: line_no,
                    reason,
                })
            }
            Err(reason) => {
                out.skipped += 1;
                if out.skip_samples.len() < SKIP_SAMPLES {
                    out.skip_samples.push((line_no, reason));
                }
            }
        }
    }
    if out.skipped > 0 {
        log::warn!("{}: skipped {} malformed lines", source.display(), out.skipped);
    }
    Ok(out)
}

fn required<'a>(fields: &[&'a str], col: usize, what: &str) -> Result<&'a str, String> {
    let value = fields[col].trim();
    if value.is_empty() {
        Err(format!("empty {what}"))
    } else {
        Ok(value)
    }
}

fn optional<'a>(fields: &[&'a str], col: Option<usize>) -> Option<&'a str> {
    col.map(|c| fields[c].trim()).filter(|v| !v.is_empty())
}

fn parse_flag(raw: &str) -> Result<bool, String> {
    match raw.to_ascii_lowercase().as_str() {
        "" | "0" | "false" | "f" | "n" | "no" => Ok(false),
        "1" | "true" | "t" | "y" | "yes" => Ok(true),
        other => Err(format!("unrecognized flag `{other}`")),
    }
}

impl TableRecord for PaperRecord {
    type Columns = PaperColumns;

    fn max_column(c: &PaperColumns) -> usize {
        [Some(c.paper_id), Some(c.year), c.conference, c.full_research]
            .into_iter()
            .flatten()
            .max()
            .unwrap_or(0)
    }

    fn from_fields(fields: &[&str], c: &PaperColumns, opts: &ParseOptions) -> Result<Self, String> {
        let paper_id = required(fields, c.paper_id, "paper id")?;
        let raw_year = fields[c.year].trim();
        let year: i32 = raw_year
            .parse()
            .map_err(|_| format!("unparseable year `{raw_year}`"))?;
        if year < opts.min_year || year > opts.max_year {
            return Err(format!("year {year} out of range"));
        }
        let is_full_research = match c.full_research {
            Some(col) => parse_flag(fields[col].trim())?,
            None => false,
        };
        Ok(PaperRecord {
            paper_id: paper_id.into(),
            year,
            conference: optional(fields, c.conference).map(Into::into),
            is_full_research,
        })
    }
}

impl TableRecord for AuthorshipLink {
    type Columns = AuthorshipColumns;

    fn max_column(c: &AuthorshipColumns) -> usize {
        [Some(c.paper_id), Some(c.author_id), c.affiliation_id, c.author_sequence]
            .into_iter()
            .flatten()
            .max()
            .unwrap_or(0)
    }

    fn from_fields(fields: &[&str], c: &AuthorshipColumns, _: &ParseOptions) -> Result<Self, String> {
        let author_sequence = match optional(fields, c.author_sequence) {
            Some(raw) => match raw.parse::<u32>() {
                Ok(n) if n >= 1 => n,
                _ => return Err(format!("bad author sequence `{raw}`")),
            },
            None => 1,
        };
        Ok(AuthorshipLink {
            paper_id: required(fields, c.paper_id, "paper id")?.into(),
            author_id: required(fields, c.author_id, "author id")?.into(),
            affiliation_id: optional(fields, c.affiliation_id).map(Into::into),
            author_sequence,
        })
    }
}

impl TableRecord for CitationEdge {
    type Columns = CitationColumns;

    fn max_column(c: &CitationColumns) -> usize {
        c.citing.max(c.cited)
    }

    fn from_fields(fields: &[&str], c: &CitationColumns, _: &ParseOptions) -> Result<Self, String> {
        Ok(CitationEdge {
            citing: required(fields, c.citing, "citing id")?.into(),
            cited: required(fields, c.cited, "cited id")?.into(),
        })
    }
}

impl TableRecord for KeywordRecord {
    type Columns = KeywordColumns;

    fn max_column(c: &KeywordColumns) -> usize {
        c.paper_id.max(c.keyword)
    }

    fn from_fields(fields: &[&str], c: &KeywordColumns, _: &ParseOptions) -> Result<Self, String> {
        let keyword = normalize_keyword(fields[c.keyword]);
        if keyword.is_empty() {
            return Err("empty keyword".into());
        }
        Ok(KeywordRecord {
            paper_id: required(fields, c.paper_id, "paper id")?.into(),
            keyword,
        })
    }
}

/// Reads a full-research flag file: one paper id per line.
pub fn read_flag_file(path: &Path) -> Result<BTreeSet<crate::PaperId>> {
    let reader = tsv::open(path)?;
    let mut ids = BTreeSet::new();
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let id = line.trim();
        if !id.is_empty() {
            ids.insert(id.into());
        }
    }
    Ok(ids)
}

/// Paths of the four tables of a dump plus the optional flag file.
#[derive(Debug, Clone, Default)]
pub struct GraphFiles {
    pub papers: PathBuf,
    pub authorships: PathBuf,
    pub citations: PathBuf,
    pub keywords: PathBuf,
    pub full_research_flags: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipCounters {
    pub papers: usize,
    pub authorships: usize,
    pub citations: usize,
    pub keywords: usize,
}

impl RawGraph {
    /// Parses all tables of a dump, each on its own thread.
    ///
    /// Papers listed in the flag file are marked full research in addition to
    /// any flag column configured in the schema.
    pub fn load(files: &GraphFiles, schema: &IngestSchema) -> Result<(RawGraph, SkipCounters)> {
        let opts = schema.options();
        let (papers, authorships, citations, keywords, flags) = std::thread::scope(|s| {
            let papers = s.spawn(|| parse_table::<PaperRecord>(&files.papers, &schema.papers, &opts));
            let links = s.spawn(|| {
                parse_table::<AuthorshipLink>(&files.authorships, &schema.authorships, &opts)
            });
            let refs =
                s.spawn(|| parse_table::<CitationEdge>(&files.citations, &schema.citations, &opts));
            let kws =
                s.spawn(|| parse_table::<KeywordRecord>(&files.keywords, &schema.keywords, &opts));
            let flags = files
                .full_research_flags
                .as_deref()
                .map(read_flag_file)
                .transpose();
            (
                papers.join().expect("paper parser panicked"),
                links.join().expect("authorship parser panicked"),
                refs.join().expect("citation parser panicked"),
                kws.join().expect("keyword parser panicked"),
                flags,
            )
        });
        let (mut papers, authorships, citations, keywords) = (papers?, authorships?, citations?, keywords?);
        if let Some(flags) = flags? {
            for p in &mut papers.records {
                p.is_full_research |= flags.contains(&p.paper_id);
            }
        }
        let skips = SkipCounters {
            papers: papers.skipped,
            authorships: authorships.skipped,
            citations: citations.skipped,
            keywords: keywords.skipped,
        };
        Ok((
            RawGraph {
                papers: papers.records,
                authorships: authorships.records,
                citations: citations.records,
                keywords: keywords.records,
            },
            skips,
        ))
    }
}

/// The current UTC calendar year.
pub fn current_year() -> i32 {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    civil_year((secs / 86_400) as i64)
}

// Days since 1970-01-01 to the proleptic Gregorian year.
fn civil_year(days: i64) -> i32 {
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let month = if mp < 10 { mp + 3 } else { mp - 9 };
    let year = yoe + era * 400 + i64::from(month <= 2);
    year as i32
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn papers(text: &str, cols: PaperColumns) -> Result<Parsed<PaperRecord>> {
        parse_reader(Cursor::new(text), Path::new("papers.tsv"), &cols, &ParseOptions::default())
    }

    const FLAT: PaperColumns = PaperColumns {
        paper_id: 0,
        year: 1,
        conference: Some(2),
        full_research: Some(3),
    };

    #[test]
    fn direct_field_mapping() {
        let parsed = papers("p1\t2014\tc7\t1\n", FLAT).unwrap();
        assert_eq!(
            parsed.records,
            vec![PaperRecord {
                paper_id: "p1".into(),
                year: 2014,
                conference: Some("c7".into()),
                is_full_research: true,
            }]
        );
        assert_eq!(parsed.skipped, 0);
    }

    #[test]
    fn empty_input_is_empty_stream() {
        let parsed = papers("", FLAT).unwrap();
        assert!(parsed.records.is_empty());
        assert_eq!(parsed.skipped, 0);
    }

    #[test]
    fn bad_year_is_skipped_and_counted() {
        let parsed = papers("p1\t20x4\tc7\t1\np2\t2001\t\t0\n", FLAT).unwrap();
        assert_eq!(parsed.skipped, 1);
        assert_eq!(parsed.records.len(), 1);
        assert_eq!(parsed.records[0].conference, None);
        assert!(parsed.skip_samples[0].1.contains("20x4"));
    }

    #[test]
    fn out_of_range_column_is_a_schema_error() {
        let cols = PaperColumns { full_research: Some(7), ..FLAT };
        assert!(matches!(papers("p1\t2014\tc7\t1\n", cols), Err(Error::Schema(_))));
    }

    #[test]
    fn strict_mode_fails_on_malformed_line() {
        let opts = ParseOptions { strict: true, ..ParseOptions::default() };
        let res = parse_reader::<PaperRecord, _>(
            Cursor::new("p1\t2014\tc7\t1\np2\tnope\tc7\t1\n"),
            Path::new("x"),
            &FLAT,
            &opts,
        );
        assert!(matches!(res, Err(Error::Malformed { line: 2, .. })));
    }

    #[test]
    fn header_and_crlf() {
        let opts = ParseOptions { has_header: true, ..ParseOptions::default() };
        let parsed = parse_reader::<CitationEdge, _>(
            Cursor::new("citing\tcited\r\na\tb\r\n"),
            Path::new("x"),
            &CitationColumns { citing: 0, cited: 1 },
            &opts,
        )
        .unwrap();
        assert_eq!(parsed.records, vec![CitationEdge { citing: "a".into(), cited: "b".into() }]);
    }

    #[test]
    fn authorship_defaults_sequence_and_optional_affiliation() {
        let cols = AuthorshipColumns {
            paper_id: 0,
            author_id: 1,
            affiliation_id: Some(2),
            author_sequence: None,
        };
        let parsed = parse_reader::<AuthorshipLink, _>(
            Cursor::new("p\ta\t\n"),
            Path::new("x"),
            &cols,
            &ParseOptions::default(),
        )
        .unwrap();
        assert_eq!(parsed.records[0].affiliation_id, None);
        assert_eq!(parsed.records[0].author_sequence, 1);
    }

    #[test]
    fn civil_year_boundaries() {
        assert_eq!(civil_year(0), 1970);
        assert_eq!(civil_year(364), 1970);
        assert_eq!(civil_year(365), 1971);
        // 2000-02-29 and 2000-12-31
        assert_eq!(civil_year(11_016), 2000);
        assert_eq!(civil_year(11_322), 2000);
        assert_eq!(civil_year(11_323), 2001);
        assert!(current_year() >= 2024);
    }
}
