//! Per-step diagnostics as CSV, one row per report.

use std::io::{Read, Write};

use pnp_core::diagnostics::{Flags, StepReport};

pub const COLUMNS: [&str; 15] = [
    "t",
    "mass_p",
    "mass_n",
    "energy_es",
    "entropy",
    "dissipation",
    "max_p",
    "min_p",
    "max_n",
    "min_n",
    "picard_iters",
    "dmp_ok",
    "mass_ok",
    "entropy_ok",
    "smallness_ok",
];

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("unexpected header {0:?}")]
    Header(Vec<String>),

    #[error("row {row}, column '{column}': cannot parse '{value}'")]
    Value { row: usize, column: &'static str, value: String },
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Writes a header followed by the reports.
pub fn write_reports<W: Write>(out: W, reports: &[StepReport]) -> Result<(), TableError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in reports {
        write_row(&mut w, r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Incremental writer, so a run can stream its rows.
pub struct ReportWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> ReportWriter<W> {
    pub fn new(out: W) -> Result<Self, TableError> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(COLUMNS)?;
        Ok(ReportWriter { inner })
    }

    pub fn push(&mut self, r: &StepReport) -> Result<(), TableError> {
        write_row(&mut self.inner, r)
    }

    pub fn finish(mut self) -> Result<(), TableError> {
        self.inner.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

fn write_row<W: Write>(w: &mut csv::Writer<W>, r: &StepReport) -> Result<(), TableError> {
    let values = [r.t, r.mass_p, r.mass_n, r.energy_es, r.entropy, r.dissipation, r.max_p, r.min_p, r.max_n, r.min_n];
    let mut record: Vec<String> = values.iter().map(|&x| float(x)).collect();
    record.push(r.picard_iters.to_string());
    let f = &r.flags;
    record.extend([f.dmp_ok, f.mass_ok, f.entropy_ok, f.smallness_ok].map(|b| flag(b).to_string()));
    w.write_record(&record)?;
    Ok(())
}

/// Reads rows written by [`write_reports`].
pub fn read_reports<R: Read>(input: R) -> Result<Vec<StepReport>, TableError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != COLUMNS {
        return Err(TableError::Header(header));
    }
    let mut out = Vec::new();
    for (row, rec) in rd.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let num = |c: usize| {
            let s = field(c);
            s.parse::<f64>().map_err(|_| TableError::Value { row, column: COLUMNS[c], value: s.to_string() })
        };
        let boolean = |c: usize| match field(c) {
            "1" => Ok(true),
            "0" => Ok(false),
            s => Err(TableError::Value { row, column: COLUMNS[c], value: s.to_string() }),
        };
        let iters = field(10).parse::<usize>().map_err(|_| TableError::Value {
            row,
            column: COLUMNS[10],
            value: field(10).to_string(),
        })?;
        out.push(StepReport {
            t: num(0)?,
            mass_p: num(1)?,
            mass_n: num(2)?,
            energy_es: num(3)?,
            entropy: num(4)?,
            dissipation: num(5)?,
            max_p: num(6)?,
            min_p: num(7)?,
            max_n: num(8)?,
            min_n: num(9)?,
            picard_iters: iters,
            flags: Flags {
                dmp_ok: boolean(11)?,
                mass_ok: boolean(12)?,
                entropy_ok: boolean(13)?,
                smallness_ok: boolean(14)?,
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(t: f64) -> StepReport {
        StepReport {
            t,
            mass_p: 1.0 / 3.0,
            mass_n: 2.0f64.sqrt(),
            energy_es: 1e-300,
            entropy: f64::NAN,
            dissipation: -0.0,
            max_p: 4.0,
            min_p: 1e-17,
            max_n: f64::MAX,
            min_n: -f64::MIN_POSITIVE,
            picard_iters: 7,
            flags: Flags { dmp_ok: true, mass_ok: false, entropy_ok: true, smallness_ok: false },
        }
    }

    #[test]
    fn values_round_trip_bitwise() {
        let rows = vec![report(0.0), report(0.1)];
        let mut buf = Vec::new();
        write_reports(&mut buf, &rows).unwrap();
        let back = read_reports(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.mass_p.to_bits(), b.mass_p.to_bits());
            assert_eq!(a.mass_n.to_bits(), b.mass_n.to_bits());
            assert_eq!(a.max_n, b.max_n);
            assert_eq!(a.min_n, b.min_n);
            assert!(b.entropy.is_nan());
            assert_eq!(a.flags, b.flags);
            assert_eq!(a.picard_iters, b.picard_iters);
        }
    }

    #[test]
    fn header_is_fixed() {
        let mut buf = Vec::new();
        write_reports(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), COLUMNS.join(","));
        assert!(matches!(read_reports("a,b\n1,2\n".as_bytes()), Err(TableError::Header(_))));
    }

    #[test]
    fn bad_cells_are_reported() {
        let mut buf = Vec::new();
        write_reports(&mut buf, &[report(0.0)]).unwrap();
        let text = String::from_utf8(buf).unwrap().replace(",7,", ",x,");
        assert!(matches!(read_reports(text.as_bytes()), Err(TableError::Value { column: "picard_iters", .. })));
    }
}
