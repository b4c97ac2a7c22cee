//! Report tables: one CSV and one markdown matrix per feature family, a
//! long-format cell listing, and a summary of significant results.
//!
//! Output contains no timestamps, so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;

use crate::features::FeatureFamily;
use crate::ks::Alternative;
use crate::pipeline::{io_err, CompareOptions, CorpusProfile, PipelineError, ReportCell};

const MISSING: &str = "-";

/// Scientific notation with three significant digits and a signed two-digit
/// exponent, e.g. `1.66e-02`.
pub fn format_pvalue(p: f64) -> String {
    let s = format!("{p:.2e}");
    let (mantissa, exponent) = s.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let sign = if exponent < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exponent.abs())
}

/// The three p-values of a cell as `≠ | > | <`.
pub fn format_cell(cell: &ReportCell) -> String {
    cell.p_values()
        .iter()
        .map(|&p| format_pvalue(p))
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Rows and columns of a family's matrix. Symmetric families show the upper
/// triangle only.
fn layout(family: FeatureFamily, names: &[&str]) -> (Vec<String>, Vec<String>) {
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    if family.is_symmetric() {
        let n = names.len();
        (names[..n - 1].to_vec(), names[1..].to_vec())
    } else {
        (names.clone(), names)
    }
}

fn lookup<'a>(
    cells: &'a [&'a ReportCell],
    family: FeatureFamily,
    row: &str,
    col: &str,
) -> Option<&'a ReportCell> {
    cells
        .iter()
        .copied()
        .find(|c| c.family == family && c.source == row && c.target == col)
}

fn markdown_table(family: FeatureFamily, names: &[&str], cells: &[&ReportCell]) -> String {
    let (rows, cols) = layout(family, names);
    let mut out = String::new();
    writeln!(out, "# {} (`{}`)", family.title(), family.slug()).unwrap();
    writeln!(out).unwrap();
    let mut header = String::from("| |");
    let mut rule = String::from("|---|");
    for col in &cols {
        for alt in Alternative::ALL {
            write!(header, " {col} {} |", alt.symbol()).unwrap();
            rule.push_str("---|");
        }
    }
    writeln!(out, "{header}").unwrap();
    writeln!(out, "{rule}").unwrap();
    for row in &rows {
        let parts: Vec<String> = cols
            .iter()
            .map(|col| match lookup(cells, family, row, col) {
                Some(cell) => format_cell(cell),
                None => [MISSING; 3].join(" | "),
            })
            .collect();
        writeln!(out, "| {row} | {} |", parts.join(" | ")).unwrap();
    }
    out
}

fn csv_table(
    family: FeatureFamily,
    names: &[&str],
    cells: &[&ReportCell],
) -> Result<Vec<u8>, PipelineError> {
    let (rows, cols) = layout(family, names);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["source".to_string()];
    for col in &cols {
        for alt in Alternative::ALL {
            header.push(format!("{col}:{}", alt.short_name()));
        }
    }
    w.write_record(&header)?;
    for row in &rows {
        let mut record = vec![row.clone()];
        for col in &cols {
            match lookup(cells, family, row, col) {
                Some(cell) => record.extend(cell.p_values().iter().map(|&p| format_pvalue(p))),
                None => record.extend([MISSING; 3].map(String::from)),
            }
        }
        w.write_record(&record)?;
    }
    Ok(w.into_inner().expect("in-memory writer"))
}

fn cells_csv(cells: &[ReportCell]) -> Result<Vec<u8>, PipelineError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "family",
        "source",
        "target",
        "alternative",
        "n1",
        "n2",
        "statistic",
        "p_value",
        "significant",
        "method",
    ])?;
    for cell in cells {
        for (outcome, significant) in cell.outcomes.iter().zip(cell.significant) {
            w.write_record([
                cell.family.slug().to_string(),
                cell.source.clone(),
                cell.target.clone(),
                outcome.alternative.short_name().to_string(),
                outcome.n1.to_string(),
                outcome.n2.to_string(),
                outcome.statistic.to_string(),
                outcome.p_value.to_string(),
                significant.to_string(),
                format!("{:?}", outcome.method).to_lowercase(),
            ])?;
        }
    }
    Ok(w.into_inner().expect("in-memory writer"))
}

fn summary(
    profiles: &[CorpusProfile],
    cells: &[ReportCell],
    opts: &CompareOptions,
    omitted: &[FeatureFamily],
) -> String {
    let mut out = String::new();
    writeln!(out, "# Corpus comparison summary").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "## Corpora").unwrap();
    writeln!(out).unwrap();
    writeln!(
        out,
        "| Corpus | Files | Sentences | Words | Word types | Skipped | Foreign |"
    )
    .unwrap();
    writeln!(out, "|---|---|---|---|---|---|---|").unwrap();
    for p in profiles {
        let t = &p.totals;
        writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} |",
            p.name,
            t.files,
            t.sentences,
            t.parsed_tokens,
            t.word_types,
            t.skipped_tokens,
            t.foreign_tokens
        )
        .unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "## Settings").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "- top-k: {}", opts.top_k).unwrap();
    writeln!(out, "- length mode: {:?}", opts.length_mode).unwrap();
    writeln!(out, "- p-values: {:?}", opts.pvalue_method).unwrap();
    writeln!(out, "- significance level: {}", opts.alpha).unwrap();
    if let Some(fp) = profiles.first().map(|p| &p.fingerprint) {
        writeln!(out, "- profile fingerprint: {fp}").unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "## Significant results (p <= {})", opts.alpha).unwrap();
    writeln!(out).unwrap();
    let mut any = false;
    for cell in cells {
        let hits: Vec<String> = Alternative::ALL
            .iter()
            .zip(cell.outcomes.iter().zip(cell.significant))
            .filter(|(_, (_, s))| *s)
            .map(|(alt, (o, _))| format!("{} p={}", alt.symbol(), format_pvalue(o.p_value)))
            .collect();
        if !hits.is_empty() {
            any = true;
            writeln!(
                out,
                "- `{}` {} vs {}: {}",
                cell.family.slug(),
                cell.source,
                cell.target,
                hits.join(", ")
            )
            .unwrap();
        }
    }
    if !any {
        writeln!(out, "None.").unwrap();
    }
    if !omitted.is_empty() {
        writeln!(out).unwrap();
        writeln!(out, "## Warnings").unwrap();
        writeln!(out).unwrap();
        for f in omitted {
            writeln!(out, "- WARNING: `{}` omitted, no comparable data", f.slug()).unwrap();
        }
    }
    out
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    fs::write(path, bytes).map_err(io_err(path))
}

/// Writes the report files into `dir` and returns their paths.
pub fn render_report(
    profiles: &[CorpusProfile],
    cells: &[ReportCell],
    opts: &CompareOptions,
    dir: &Path,
) -> Result<Vec<PathBuf>, PipelineError> {
    if cells.is_empty() {
        return Err(PipelineError::Config(
            "no comparison results to report".into(),
        ));
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let names: Vec<&str> = profiles.iter().map(|p| p.name.as_str()).collect();
    let mut by_family: BTreeMap<FeatureFamily, Vec<&ReportCell>> = BTreeMap::new();
    for cell in cells {
        by_family.entry(cell.family).or_default().push(cell);
    }

    let mut written = Vec::new();
    let mut omitted = Vec::new();
    for family in FeatureFamily::ALL {
        let Some(family_cells) = by_family.get(&family) else {
            warn!("{family}: no results, table omitted");
            omitted.push(family);
            continue;
        };
        let md = dir.join(format!("{}.md", family.slug()));
        write_file(&md, markdown_table(family, &names, family_cells).as_bytes())?;
        let csv_path = dir.join(format!("{}.csv", family.slug()));
        write_file(&csv_path, &csv_table(family, &names, family_cells)?)?;
        written.push(csv_path);
        written.push(md);
    }
    let cells_path = dir.join("cells.csv");
    write_file(&cells_path, &cells_csv(cells)?)?;
    written.push(cells_path);
    let summary_path = dir.join("summary.md");
    write_file(
        &summary_path,
        summary(profiles, cells, opts, &omitted).as_bytes(),
    )?;
    written.push(summary_path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ks::{KsOutcome, PValueMethod};

    fn cell(family: FeatureFamily, source: &str, target: &str, p: [f64; 3]) -> ReportCell {
        let mut i = 0;
        let outcomes = Alternative::ALL.map(|alt| {
            let o = KsOutcome {
                statistic: 0.5,
                p_value: p[i],
                n1: 10,
                n2: 10,
                alternative: alt,
                method: PValueMethod::Asymptotic,
            };
            i += 1;
            o
        });
        ReportCell {
            family,
            source: source.into(),
            target: target.into(),
            significant: p.map(|v| v <= 0.05),
            outcomes,
        }
    }

    #[test]
    fn pvalue_format() {
        assert_eq!(format_pvalue(1.66e-2), "1.66e-02");
        assert_eq!(format_pvalue(8.25e-1), "8.25e-01");
        assert_eq!(format_pvalue(1.0), "1.00e+00");
        assert_eq!(format_pvalue(0.0), "0.00e+00");
        assert_eq!(format_pvalue(3.06e-17), "3.06e-17");
        assert_eq!(format_pvalue(1.92e-122), "1.92e-122");
        assert_eq!(format_pvalue(0.013475889875863689), "1.35e-02");
    }

    #[test]
    fn cell_format() {
        let c = cell(
            FeatureFamily::CharLength,
            "Classical",
            "Blog",
            [1.66e-2, 8.25e-1, 8.33e-3],
        );
        assert_eq!(format_cell(&c), "1.66e-02 | 8.25e-01 | 8.33e-03");
    }

    #[test]
    fn symmetric_markdown_layout() {
        let cells = [
            cell(
                FeatureFamily::CharLength,
                "C",
                "B",
                [1.66e-2, 8.25e-1, 8.33e-3],
            ),
            cell(
                FeatureFamily::CharLength,
                "C",
                "N",
                [6.56e-4, 9.14e-1, 3.28e-4],
            ),
            cell(
                FeatureFamily::CharLength,
                "B",
                "N",
                [2.09e-2, 9.11e-1, 3.28e-4],
            ),
        ];
        let refs: Vec<&ReportCell> = cells.iter().collect();
        let md = markdown_table(FeatureFamily::CharLength, &["C", "B", "N"], &refs);
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines[2], "| | B ≠ | B > | B < | N ≠ | N > | N < |");
        assert_eq!(
            lines[4],
            "| C | 1.66e-02 | 8.25e-01 | 8.33e-03 | 6.56e-04 | 9.14e-01 | 3.28e-04 |"
        );
        assert_eq!(
            lines[5],
            "| B | - | - | - | 2.09e-02 | 9.11e-01 | 3.28e-04 |"
        );
        assert_eq!(lines.len(), 6);
    }

    #[test]
    fn asymmetric_layout_has_diagonal_gaps() {
        let cells = [
            cell(FeatureFamily::CharUnigram, "A", "B", [0.5, 0.5, 0.5]),
            cell(FeatureFamily::CharUnigram, "B", "A", [0.25, 0.5, 0.5]),
        ];
        let refs: Vec<&ReportCell> = cells.iter().collect();
        let csv =
            String::from_utf8(csv_table(FeatureFamily::CharUnigram, &["A", "B"], &refs).unwrap())
                .unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "source,A:ne,A:gt,A:lt,B:ne,B:gt,B:lt");
        assert_eq!(lines[1], "A,-,-,-,5.00e-01,5.00e-01,5.00e-01");
        assert_eq!(lines[2], "B,2.50e-01,5.00e-01,5.00e-01,-,-,-");
    }
}
