//! On-disk formats: labelled CSV matrices, vector tables and the binary
//! state trajectory file.

use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{invalid, CsstError, Result};
use crate::lindblad::{SignalMatrix, TimeGrid};
use crate::pauli::PauliString;
use crate::state::DensityMatrix;

const STATES_MAGIC: &[u8; 8] = b"CSSTRHO1";

fn csv_err(e: csv::Error) -> CsstError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CsstError::Io(io),
        other => CsstError::Parse(format!("{other:?}")),
    }
}

fn parse_f64(field: &str) -> Result<f64> {
    field.trim().parse().map_err(|_| CsstError::Parse(format!("bad number {field:?}")))
}

/// Rows labelled by Pauli word, header `pauli,t_1,...,t_N`.
pub fn write_signal_csv<W: Write>(w: W, observables: &[PauliString], values: &Array2<f64>) -> Result<()> {
    if observables.len() != values.nrows() {
        return Err(invalid!("{} labels for {} rows", observables.len(), values.nrows()));
    }
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["pauli".to_string()];
    header.extend((1..=values.ncols()).map(|j| format!("t_{j}")));
    out.write_record(&header).map_err(csv_err)?;
    for (p, row) in observables.iter().zip(values.rows()) {
        let mut rec = vec![p.to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_signal_csv<R: Read>(r: R) -> Result<(Vec<PauliString>, Array2<f64>)> {
    let mut rdr = csv::Reader::from_reader(r);
    let cols = rdr.headers().map_err(csv_err)?.len();
    if cols < 2 {
        return Err(CsstError::Parse("signal CSV needs at least one time column".into()));
    }
    let mut labels = Vec::new();
    let mut flat = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        labels.push(rec[0].parse::<PauliString>()?);
        for f in rec.iter().skip(1) {
            flat.push(parse_f64(f)?);
        }
    }
    let values = Array2::from_shape_vec((labels.len(), cols - 1), flat)
        .map_err(|e| CsstError::Parse(format!("ragged signal CSV: {e}")))?;
    Ok((labels, values))
}

pub fn save_signal_matrix(path: &Path, s: &SignalMatrix) -> Result<()> {
    write_signal_csv(std::fs::File::create(path)?, &s.observables, &s.values)
}

pub fn load_signal_matrix(path: &Path, grid: TimeGrid) -> Result<SignalMatrix> {
    let (labels, values) = read_signal_csv(std::fs::File::open(path)?)?;
    SignalMatrix::new(values, labels, grid)
}

/// Named numeric columns of equal length with a header row.
pub fn write_columns_csv<W: Write>(w: W, names: &[&str], columns: &[&[f64]]) -> Result<()> {
    if names.len() != columns.len() || columns.is_empty() {
        return Err(invalid!("column names and data disagree"));
    }
    let len = columns[0].len();
    if columns.iter().any(|c| c.len() != len) {
        return Err(invalid!("columns have different lengths"));
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(names).map_err(csv_err)?;
    for i in 0..len {
        out.write_record(columns.iter().map(|c| c[i].to_string())).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_columns_csv<R: Read>(r: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::Reader::from_reader(r);
    let names: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let mut cols = vec![Vec::new(); names.len()];
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        for (c, f) in cols.iter_mut().zip(rec.iter()) {
            c.push(parse_f64(f)?);
        }
    }
    Ok((names, cols))
}

/// Magic, `n` (u32), count (u64), then row-major `(re, im)` pairs, all little endian.
pub fn write_states<W: Write>(mut w: W, states: &[DensityMatrix]) -> Result<()> {
    let n = states.first().map_or(0, DensityMatrix::num_qubits);
    if states.iter().any(|s| s.num_qubits() != n) {
        return Err(invalid!("states have mixed sizes"));
    }
    w.write_all(STATES_MAGIC)?;
    w.write_all(&(n as u32).to_le_bytes())?;
    w.write_all(&(states.len() as u64).to_le_bytes())?;
    for s in states {
        for v in s.matrix().iter() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_states<R: Read>(mut r: R) -> Result<Vec<DensityMatrix>> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != STATES_MAGIC {
        return Err(CsstError::Parse("not a state trajectory file".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8)?;
    let count = u64::from_le_bytes(b8) as usize;
    if n > crate::lindblad::DEFAULT_QUBIT_CAP * 2 {
        return Err(CsstError::Parse(format!("implausible qubit count {n}")));
    }
    let d = 1usize << n;
    let mut out = Vec::with_capacity(count.min(1 << 20));
    let mut read = || -> Result<f64> {
        r.read_exact(&mut b8)?;
        Ok(f64::from_le_bytes(b8))
    };
    for _ in 0..count {
        let mut m = Array2::zeros((d, d));
        for v in m.iter_mut() {
            let re = read()?;
            let im = read()?;
            *v = Complex64::new(re, im);
        }
        out.push(DensityMatrix::new(m)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{initial_state, InitialState};

    #[test]
    fn signal_roundtrip() {
        let obs: Vec<PauliString> = vec!["XI".parse().unwrap(), "ZY".parse().unwrap()];
        let vals = Array2::from_shape_vec((2, 3), vec![0.1, -1.0 / 3.0, 1e-17, 1.0, 0.0, -0.5]).unwrap();
        let mut buf = Vec::new();
        write_signal_csv(&mut buf, &obs, &vals).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("pauli,t_1,t_2,t_3\nXI,"));
        let (o2, v2) = read_signal_csv(&buf[..]).unwrap();
        assert_eq!(o2, obs);
        assert_eq!(v2, vals);
    }

    #[test]
    fn columns_roundtrip() {
        let a = [1.0, 2.5];
        let b = [-0.1, 3e-9];
        let mut buf = Vec::new();
        write_columns_csv(&mut buf, &["a", "b"], &[&a, &b]).unwrap();
        let (names, cols) = read_columns_csv(&buf[..]).unwrap();
        assert_eq!(names, vec!["a", "b"]);
        assert_eq!(cols, vec![a.to_vec(), b.to_vec()]);
    }

    #[test]
    fn states_roundtrip() {
        let s = vec![
            initial_state(&InitialState::Ghz, 2).unwrap(),
            initial_state(&InitialState::PlusMinusProduct, 2).unwrap(),
        ];
        let mut buf = Vec::new();
        write_states(&mut buf, &s).unwrap();
        let back = read_states(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].matrix(), s[0].matrix());
        assert!(read_states(&b"garbage!"[..]).is_err());
    }
}
