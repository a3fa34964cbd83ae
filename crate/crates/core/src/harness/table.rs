//! Long-format CSV tables.

use std::path::Path;

use crate::{Error, Result};

/// Column order of observable tables.
pub const OBSERVABLE_COLUMNS: [&str; 8] = ["protocol", "L", "p", "t", "observable", "value", "stderr", "n_traj"];

/// Column order of cluster-size histograms.
pub const HISTOGRAM_COLUMNS: [&str; 9] = [
    "protocol", "L", "p", "s", "count", "count_tail", "n_traj", "volume", "n_s",
];

/// One aggregated observable value.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub protocol: String,
    pub l: usize,
    pub p: f64,
    pub t: usize,
    pub observable: String,
    pub value: f64,
    pub stderr: f64,
    pub n_traj: usize,
}

/// Cluster-size counts summed over trajectories. `count_tail` leaves out the
/// largest cluster of every trajectory; `n_s = count / (n_traj · volume)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HistogramRow {
    pub protocol: String,
    pub l: usize,
    pub p: f64,
    pub s: usize,
    pub count: u64,
    pub count_tail: u64,
    pub n_traj: usize,
    pub volume: usize,
    pub n_s: f64,
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse<T: std::str::FromStr>(field: &str, col: &str, line: u64) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::InvalidInput(format!("line {line}: cannot parse {col} from {field:?}")))
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn reader(path: &Path, expected: &[&str]) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != expected {
        return Err(Error::InvalidInput(format!(
            "{}: expected columns {expected:?}, found {header:?}",
            path.display()
        )));
    }
    Ok(rdr)
}

pub fn write_csv(rows: &[Row], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(OBSERVABLE_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.protocol.clone(),
            r.l.to_string(),
            fmt_f64(r.p),
            r.t.to_string(),
            r.observable.clone(),
            fmt_f64(r.value),
            fmt_f64(r.stderr),
            r.n_traj.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<Row>> {
    let mut rdr = reader(path, &OBSERVABLE_COLUMNS)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        out.push(Row {
            protocol: rec[0].to_owned(),
            l: parse(&rec[1], "L", line)?,
            p: parse(&rec[2], "p", line)?,
            t: parse(&rec[3], "t", line)?,
            observable: rec[4].to_owned(),
            value: parse(&rec[5], "value", line)?,
            stderr: parse(&rec[6], "stderr", line)?,
            n_traj: parse(&rec[7], "n_traj", line)?,
        });
    }
    Ok(out)
}

pub fn write_histogram(rows: &[HistogramRow], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(HISTOGRAM_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.protocol.clone(),
            r.l.to_string(),
            fmt_f64(r.p),
            r.s.to_string(),
            r.count.to_string(),
            r.count_tail.to_string(),
            r.n_traj.to_string(),
            r.volume.to_string(),
            fmt_f64(r.n_s),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_histogram(path: &Path) -> Result<Vec<HistogramRow>> {
    let mut rdr = reader(path, &HISTOGRAM_COLUMNS)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        out.push(HistogramRow {
            protocol: rec[0].to_owned(),
            l: parse(&rec[1], "L", line)?,
            p: parse(&rec[2], "p", line)?,
            s: parse(&rec[3], "s", line)?,
            count: parse(&rec[4], "count", line)?,
            count_tail: parse(&rec[5], "count_tail", line)?,
            n_traj: parse(&rec[6], "n_traj", line)?,
            volume: parse(&rec[7], "volume", line)?,
            n_s: parse(&rec[8], "n_s", line)?,
        });
    }
    Ok(out)
}

/// Sample mean and standard error of the mean, summed in slice order.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(v: f64) -> Row {
        Row {
            protocol: "clifford1d".into(),
            l: 16,
            p: 0.17,
            t: 64,
            observable: "i3".into(),
            value: v,
            stderr: v.abs() / 3.0,
            n_traj: 10,
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        write_csv(&[], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "protocol,L,p,t,observable,value,stderr,n_traj\n");
        assert!(read_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn histogram_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        let rows = vec![HistogramRow {
            protocol: "clifford2d".into(),
            l: 8,
            p: 0.3,
            s: 5,
            count: 12,
            count_tail: 11,
            n_traj: 4,
            volume: 64,
            n_s: 12.0 / 256.0,
        }];
        write_histogram(&rows, &path).unwrap();
        assert_eq!(read_histogram(&path).unwrap(), rows);
    }

    #[test]
    fn wrong_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "L,p\n1,2\n").unwrap();
        assert!(read_csv(&path).is_err());
    }

    #[test]
    fn mean_and_error() {
        let (m, e) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((e - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_stderr(&[7.0]), (7.0, 0.0));
    }

    proptest! {
        #[test]
        fn floats_round_trip_exactly(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..20)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("r.csv");
            let rows: Vec<Row> = values.iter().map(|&v| row(v)).collect();
            write_csv(&rows, &path).unwrap();
            prop_assert_eq!(read_csv(&path).unwrap(), rows);
        }
    }
}
