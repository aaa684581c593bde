//! Node-data tables and file helpers.
//!
//! Node data is CSV with header `unit,L_1,...,L_p,A,Y`, a 0-based unit column
//! and binary values.

use std::path::Path;

use crate::automodel::FieldSample;
use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn format_node_csv(data: &FieldSample) -> String {
    let p = data.n_covariates();
    let mut out = String::from("unit");
    for k in 1..=p {
        out.push_str(&format!(",L_{k}"));
    }
    out.push_str(",A,Y\n");
    for i in 0..data.n_units() {
        out.push_str(&i.to_string());
        for k in 0..p {
            out.push(',');
            out.push(char::from(b'0' + data.l(i, k)));
        }
        out.push_str(&format!(",{},{}\n", data.a(i), data.y(i)));
    }
    out
}

pub fn parse_node_csv(text: &str) -> Result<FieldSample> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let p = header.len().checked_sub(3).ok_or_else(|| Error::Parse("node table needs unit, A and Y columns".into()))?;
    let mut expected = vec!["unit".to_string()];
    expected.extend((1..=p).map(|k| format!("L_{k}")));
    expected.push("A".into());
    expected.push("Y".into());
    if header != expected {
        return Err(Error::Parse(format!("unexpected header {header:?}; expected {expected:?}")));
    }
    let mut rows: Vec<(usize, Vec<u8>)> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let unit: usize = rec[0].parse().map_err(|_| Error::Parse(format!("row {}: bad unit '{}'", line + 1, &rec[0])))?;
        let vals = (1..rec.len())
            .map(|c| match &rec[c] {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                v => Err(Error::Parse(format!("row {}: value '{v}' in column {} is not 0/1", line + 1, header[c]))),
            })
            .collect::<Result<Vec<u8>>>()?;
        rows.push((unit, vals));
    }
    let n = rows.len();
    rows.sort_by_key(|r| r.0);
    if rows.iter().enumerate().any(|(i, r)| r.0 != i) {
        return Err(Error::Parse(format!("unit column must list 0..{n} exactly once")));
    }
    let mut l = Vec::with_capacity(n * p);
    let mut a = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for (_, v) in rows {
        l.extend_from_slice(&v[..p]);
        a.push(v[p]);
        y.push(v[p + 1]);
    }
    FieldSample::new(n, p, l, a, y)
}

pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn read_node_csv(path: impl AsRef<Path>) -> Result<FieldSample> {
    parse_node_csv(&read_text(path)?)
}
