//! LibSVM text format reading, writing and subsampling.
//!
//! Each non-blank line is `label idx:val idx:val ...` with 1-based, strictly
//! increasing indices. Anything after `#` is a comment. Binary labels are
//! normalized to -1/+1: a file whose labels are already within {-1, +1} is
//! kept, any other two-valued file maps its smaller label to -1 and its
//! larger label to +1 (so {0,1} and {1,2} both work).

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{contract, Error, Result};
use crate::problems::{sample_positions, Example, ProblemInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseExample {
    pub label: i8,
    /// `(index, value)` pairs, 1-based and strictly increasing.
    pub entries: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub examples: Vec<SparseExample>,
    /// Largest feature index seen.
    pub dim: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Converts to an SVM problem. `dim` overrides the inferred dimension and
    /// must cover every index present.
    pub fn to_problem(&self, mu: f64, dim: Option<usize>) -> Result<ProblemInstance> {
        let dim = dim.unwrap_or(self.dim);
        if dim < self.dim {
            return contract(format!(
                "dimension override {dim} below max feature index {}",
                self.dim
            ));
        }
        let examples = self
            .examples
            .iter()
            .map(|ex| Example {
                label: ex.label as f64,
                indices: ex.entries.iter().map(|&(i, _)| i as usize - 1).collect(),
                values: ex.entries.iter().map(|&(_, v)| v).collect(),
            })
            .collect();
        ProblemInstance::svm(examples, dim.max(1), mu)
    }
}

fn parse_error<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        message: message.into(),
    })
}

fn parse_line(line_no: usize, line: &str) -> Result<Option<(f64, Vec<(u32, f64)>)>> {
    let content = line.split('#').next().unwrap_or("").trim();
    if content.is_empty() {
        return Ok(None);
    }
    let mut tokens = content.split_ascii_whitespace();
    let label_tok = tokens.next().unwrap_or_default();
    let label: f64 = match label_tok.parse() {
        Ok(v) if f64::is_finite(v) => v,
        _ => return parse_error(line_no, format!("invalid label '{label_tok}'")),
    };
    let mut entries: Vec<(u32, f64)> = Vec::new();
    for tok in tokens {
        let Some((idx, val)) = tok.split_once(':') else {
            return parse_error(line_no, format!("expected index:value, got '{tok}'"));
        };
        let idx: u32 = match idx.parse() {
            Ok(i) if i > 0 => i,
            _ => return parse_error(line_no, format!("invalid feature index '{idx}'")),
        };
        let val: f64 = match val.parse() {
            Ok(v) if f64::is_finite(v) => v,
            _ => return parse_error(line_no, format!("invalid feature value '{val}'")),
        };
        if let Some(&(prev, _)) = entries.last() {
            if idx <= prev {
                return parse_error(
                    line_no,
                    format!("feature indices must increase ({idx} after {prev})"),
                );
            }
        }
        entries.push((idx, val));
    }
    Ok(Some((label, entries)))
}

fn normalize_labels(raw: &[(usize, f64)]) -> Result<Vec<i8>> {
    let mut distinct: Vec<f64> = Vec::new();
    for &(_, l) in raw {
        if !distinct.contains(&l) {
            distinct.push(l);
            if distinct.len() > 2 {
                let line = raw.iter().find(|&&(_, v)| v == l).map_or(0, |&(n, _)| n);
                return parse_error(line, format!("more than two distinct labels (saw {l})"));
            }
        }
    }
    let keep = distinct.iter().all(|&l| l == 1.0 || l == -1.0);
    let low = distinct.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(raw
        .iter()
        .map(|&(_, l)| {
            if keep {
                l as i8
            } else if distinct.len() == 2 {
                if l == low {
                    -1
                } else {
                    1
                }
            } else if l > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect())
}

pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut raw_labels = Vec::new();
    let mut dim = 0usize;
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        if let Some((label, entries)) = parse_line(line_no, &line)? {
            if let Some(&(last, _)) = entries.last() {
                dim = dim.max(last as usize);
            }
            raw_labels.push((line_no, label));
            rows.push(entries);
        }
    }
    let labels = normalize_labels(&raw_labels)?;
    let examples = labels
        .into_iter()
        .zip(rows)
        .map(|(label, entries)| SparseExample { label, entries })
        .collect();
    Ok(Dataset { examples, dim })
}

pub fn parse_libsvm_str(text: &str) -> Result<Dataset> {
    parse_libsvm(text.as_bytes())
}

/// Reads a LibSVM file; names ending in `.gz` are decompressed.
pub fn load_libsvm(path: &Path) -> Result<Dataset> {
    let file = File::open(path)?;
    let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(GzDecoder::new(file))
    } else {
        Box::new(file)
    };
    parse_libsvm(BufReader::new(reader))
}

pub fn write_libsvm<W: Write>(data: &Dataset, mut out: W) -> Result<()> {
    for ex in &data.examples {
        write!(out, "{}", if ex.label > 0 { "+1" } else { "-1" })?;
        for (i, v) in &ex.entries {
            write!(out, " {i}:{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn to_libsvm_string(data: &Dataset) -> String {
    let mut buf = Vec::new();
    write_libsvm(data, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Uniform sample of `n` examples without replacement, in sampled order.
/// The dimension of the source is kept.
pub fn subsample(data: &Dataset, n: usize, seed: u64) -> Result<Dataset> {
    if n > data.len() {
        return contract(format!("cannot subsample {n} of {} examples", data.len()));
    }
    let examples = sample_positions(data.len(), n, seed)
        .into_iter()
        .map(|i| data.examples[i].clone())
        .collect();
    Ok(Dataset {
        examples,
        dim: data.dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_line() {
        let d = parse_libsvm_str("+1 1:0.5 3:-2\n").unwrap();
        assert_eq!(d.examples[0].label, 1);
        assert_eq!(d.examples[0].entries, vec![(1, 0.5), (3, -2.0)]);
        assert!(d.dim >= 3);
    }

    #[test]
    fn label_only_line() {
        let d = parse_libsvm_str("-1\n").unwrap();
        assert_eq!(d.examples[0].label, -1);
        assert!(d.examples[0].entries.is_empty());
    }

    #[test]
    fn decreasing_index_is_an_error() {
        match parse_libsvm_str("1 3:1 2:1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn error_reports_line_number() {
        let text = "+1 1:1\n\n-1 2:x\n";
        match parse_libsvm_str(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("x"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_libsvm_str("+1 0:1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_libsvm_str("+1 -2:1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_libsvm_str("+1 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_libsvm_str("abc 1:1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_libsvm_str("+1 1:1 1:2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn blank_lines_and_comments_skipped() {
        let d = parse_libsvm_str("\n+1 2:1 # note\n   \n# whole line\n-1 1:2\n").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.dim, 2);
    }

    #[test]
    fn scientific_notation() {
        let d = parse_libsvm_str("+1 1:1e-3 2:-2.5E+2\n").unwrap();
        assert_eq!(d.examples[0].entries, vec![(1, 1e-3), (2, -250.0)]);
    }

    #[test]
    fn label_normalization() {
        let zero_one = parse_libsvm_str("0 1:1\n1 1:2\n").unwrap();
        assert_eq!(
            zero_one.examples.iter().map(|e| e.label).collect::<Vec<_>>(),
            vec![-1, 1]
        );
        let one_two = parse_libsvm_str("2 1:1\n1 1:2\n2 2:1\n").unwrap();
        assert_eq!(
            one_two.examples.iter().map(|e| e.label).collect::<Vec<_>>(),
            vec![1, -1, 1]
        );
        let pm = parse_libsvm_str("-1 1:1\n+1 1:2\n").unwrap();
        assert_eq!(
            pm.examples.iter().map(|e| e.label).collect::<Vec<_>>(),
            vec![-1, 1]
        );
        assert!(parse_libsvm_str("1 1:1\n2 1:1\n3 1:1\n").is_err());
    }

    #[test]
    fn subsample_rules() {
        let text: String = (0..50)
            .map(|i| format!("{} {}:1\n", if i % 2 == 0 { "+1" } else { "-1" }, i + 1))
            .collect();
        let d = parse_libsvm_str(&text).unwrap();
        assert!(subsample(&d, 51, 0).is_err());
        let a = subsample(&d, 20, 4).unwrap();
        let b = subsample(&d, 20, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim, d.dim);

        let full = subsample(&d, 50, 9).unwrap();
        let mut got: Vec<_> = full.examples.iter().map(|e| e.entries[0].0).collect();
        got.sort_unstable();
        assert_eq!(got, (1..=50).collect::<Vec<u32>>());
    }

    #[test]
    fn to_problem_converts_indices() {
        let d = parse_libsvm_str("+1 1:2 4:1\n-1 2:1\n").unwrap();
        let p = d.to_problem(1.0, None).unwrap();
        assert_eq!(p.dim(), 4);
        assert_eq!(p.examples()[0].indices, vec![0, 3]);
        assert!(d.to_problem(1.0, Some(3)).is_err());
        assert_eq!(d.to_problem(1.0, Some(10)).unwrap().dim(), 10);
    }
}
