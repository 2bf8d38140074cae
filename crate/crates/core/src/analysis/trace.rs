use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizers::Algorithm;
use crate::problems::DiagnosticsRecord;
use crate::schedules::ScheduleKind;

pub const CSV_HEADER: &str = "iter,algo,schedule,seed,f,gap,bound_rhs,grad_norm,time_ns";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: u64,
    /// Objective at the algorithm's output point.
    pub f_value: f64,
    pub gap: f64,
    /// `B_t`, for algorithms the bound applies to.
    pub bound_rhs: Option<f64>,
    /// Squared norm of the gradient consumed at iteration `t`.
    pub grad_norm_sq: f64,
    pub dist_to_opt_sq: Option<f64>,
    /// `(1/A_t) sum_k a_k f(w_k) - f*` (GDA, deterministic oracle only).
    pub weighted_value_gap: Option<f64>,
    /// Gap of the uniform average of iterates (GDA only).
    pub uniform_gap: Option<f64>,
    /// Wall time since the start of the run; zero when timing is off.
    pub time_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub algorithm: Algorithm,
    pub schedule: ScheduleKind,
    pub seed: u64,
    pub problem_id: String,
    pub stochastic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub meta: TraceMeta,
    pub records: Vec<TraceRecord>,
    pub diagnostics: DiagnosticsRecord,
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

impl RunTrace {
    pub fn final_record(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn gap_points(&self) -> Vec<(u64, f64)> {
        self.records.iter().map(|r| (r.t, r.gap)).collect()
    }

    /// Per-iteration `|g_t|^2`; errors unless every iteration was recorded.
    pub fn grad_norm_sq_series(&self) -> Result<Vec<f64>> {
        for (k, r) in self.records.iter().enumerate() {
            if r.t != k as u64 + 1 {
                return Err(Error::Contract(format!(
                    "trace is not dense: record {k} has t={}",
                    r.t
                )));
            }
        }
        Ok(self.records.iter().map(|r| r.grad_norm_sq).collect())
    }

    /// CSV rows without the header. `with_time = false` writes zero in the
    /// time column so that bodies can be compared byte for byte.
    pub fn csv_body(&self, with_time: bool) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{:e},{:e},{},{:e},{}",
                r.t,
                self.meta.algorithm,
                self.meta.schedule,
                self.meta.seed,
                r.f_value,
                r.gap,
                opt_num(r.bound_rhs),
                r.grad_norm_sq.sqrt(),
                if with_time { r.time_ns } else { 0 }
            );
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut out: W, header: bool) -> Result<()> {
        if header {
            writeln!(out, "{CSV_HEADER}")?;
        }
        out.write_all(self.csv_body(true).as_bytes())?;
        Ok(())
    }

    /// Reads traces back from CSV, grouping consecutive rows by
    /// `(algo, schedule, seed)`. Columns not present in the CSV come back
    /// as `None`.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<RunTrace>> {
        let mut traces: Vec<RunTrace> = Vec::new();
        for (k, line) in input.lines().enumerate() {
            let line_no = k + 1;
            let line = line?;
            if line_no == 1 {
                if line.trim() != CSV_HEADER {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("unexpected header '{line}'"),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |m: String| Error::Parse {
                line: line_no,
                message: m,
            };
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 9 {
                return Err(parse_err(format!("expected 9 columns, got {}", cols.len())));
            }
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| parse_err(format!("bad number '{s}': {e}")))
            };
            let int = |s: &str| -> Result<u64> {
                s.parse::<u64>()
                    .map_err(|e| parse_err(format!("bad integer '{s}': {e}")))
            };
            let algorithm: Algorithm = cols[1].parse()?;
            let schedule: ScheduleKind = cols[2].parse()?;
            let seed = int(cols[3])?;
            let grad_norm = num(cols[7])?;
            let record = TraceRecord {
                t: int(cols[0])?,
                f_value: num(cols[4])?,
                gap: num(cols[5])?,
                bound_rhs: if cols[6].is_empty() {
                    None
                } else {
                    Some(num(cols[6])?)
                },
                grad_norm_sq: grad_norm * grad_norm,
                dist_to_opt_sq: None,
                weighted_value_gap: None,
                uniform_gap: None,
                time_ns: int(cols[8])?,
            };
            let same = traces.last().is_some_and(|tr| {
                tr.meta.algorithm == algorithm && tr.meta.schedule == schedule && tr.meta.seed == seed
            });
            if !same {
                traces.push(RunTrace {
                    meta: TraceMeta {
                        algorithm,
                        schedule,
                        seed,
                        problem_id: String::new(),
                        stochastic: false,
                    },
                    records: Vec::new(),
                    diagnostics: DiagnosticsRecord::default(),
                });
            }
            let tr = traces.last_mut().expect("pushed above");
            if tr.records.last().is_some_and(|p| p.t >= record.t) {
                return Err(parse_err(format!("iteration {} is not increasing", record.t)));
            }
            tr.records.push(record);
        }
        Ok(traces)
    }
}
