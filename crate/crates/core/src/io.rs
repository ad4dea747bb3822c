//! Matrix and trajectory file formats.
//!
//! Matrices are stored either as JSON `{"d": 3, "rows": [[...], ...]}` or as
//! CSV with one row per line. Trajectories are plain text, one 0-based state
//! index per line.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chain::TransitionMatrix;
use crate::error::{Error, Result};
use crate::trajectory::{CountAccumulator, SkippedCounts, Trajectory};

#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    d: usize,
    rows: Vec<Vec<f64>>,
}

/// Parses a matrix from JSON or CSV text; the format is chosen by content.
pub fn parse_matrix(text: &str) -> Result<TransitionMatrix> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let file: MatrixFile =
            serde_json::from_str(trimmed).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
        if file.rows.len() != file.d {
            return Err(Error::Parse(format!(
                "matrix JSON declares d = {} but has {} rows",
                file.d,
                file.rows.len()
            )));
        }
        return TransitionMatrix::from_rows(&file.rows);
    }
    let rows = trimmed
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            line.split(',')
                .map(|cell| {
                    cell.trim().parse::<f64>().map_err(|e| {
                        Error::Parse(format!("matrix CSV line {}: {:?}: {e}", n + 1, cell.trim()))
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    TransitionMatrix::from_rows(&rows)
}

pub fn read_matrix(path: &Path) -> Result<TransitionMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn matrix_to_json(m: &TransitionMatrix) -> String {
    let file = MatrixFile {
        d: m.dim(),
        rows: m.rows(),
    };
    serde_json::to_string_pretty(&file).expect("matrix serialization cannot fail")
}

fn parse_state(line: &str, n: usize, d: usize) -> Result<Option<usize>> {
    let s = line.trim();
    if s.is_empty() {
        return Ok(None);
    }
    let x: usize = s
        .parse()
        .map_err(|e| Error::Parse(format!("trajectory line {}: {s:?}: {e}", n + 1)))?;
    if x >= d {
        return Err(Error::InvalidTrajectory(format!(
            "state {x} on line {} is outside [0, {d})",
            n + 1
        )));
    }
    Ok(Some(x))
}

/// Reads a whole trajectory over `d` states.
pub fn read_trajectory<R: Read>(reader: R, d: usize) -> Result<Trajectory> {
    let mut states = Vec::new();
    for (n, line) in BufReader::new(reader).lines().enumerate() {
        if let Some(x) = parse_state(&line?, n, d)? {
            states.push(x);
        }
    }
    Trajectory::new(states, d)
}

/// Streams a trajectory file into skipped counts for `k = 1..=k_max`,
/// without holding the trajectory in memory. Returns the counts and the
/// trajectory length.
pub fn stream_counts<R: Read>(reader: R, d: usize, k_max: usize) -> Result<(Vec<SkippedCounts>, usize)> {
    let mut acc = CountAccumulator::new(d, k_max);
    for (n, line) in BufReader::new(reader).lines().enumerate() {
        if let Some(x) = parse_state(&line?, n, d)? {
            acc.push(x)?;
        }
    }
    let m = acc.len();
    Ok((acc.finish()?, m))
}

pub fn write_trajectory<W: Write>(mut writer: W, traj: &Trajectory) -> Result<()> {
    let mut buf = std::io::BufWriter::new(&mut writer);
    for x in traj.states() {
        writeln!(buf, "{x}")?;
    }
    buf.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::skipped_counts;

    #[test]
    fn json_and_csv_agree() {
        let json = r#"{"d": 2, "rows": [[0.75, 0.25], [0.25, 0.75]]}"#;
        let csv = "0.75, 0.25\n0.25,0.75\n";
        assert_eq!(parse_matrix(json).unwrap(), parse_matrix(csv).unwrap());
        let back = parse_matrix(&matrix_to_json(&parse_matrix(csv).unwrap())).unwrap();
        assert_eq!(back, parse_matrix(csv).unwrap());
    }

    #[test]
    fn malformed_matrices() {
        assert!(matches!(parse_matrix("0.5,x\n0.5,0.5"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_matrix(r#"{"d": 3, "rows": [[1.0]]}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(parse_matrix("0.5,0.5\n0.5"), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn trajectory_text() {
        let t = read_trajectory("0\n1\n\n2\n0\n".as_bytes(), 3).unwrap();
        assert_eq!(t.states(), &[0, 1, 2, 0]);
        let mut out = Vec::new();
        write_trajectory(&mut out, &t).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0\n1\n2\n0\n");
        assert!(matches!(read_trajectory("0\n3\n".as_bytes(), 3), Err(Error::InvalidTrajectory(_))));
        assert!(matches!(read_trajectory("0\n-1\n".as_bytes(), 3), Err(Error::Parse(_))));
    }

    #[test]
    fn streamed_counts_match_batch() {
        let text = "0\n1\n2\n0\n1\n1\n2\n";
        let t = read_trajectory(text.as_bytes(), 3).unwrap();
        let (counts, m) = stream_counts(text.as_bytes(), 3, 3).unwrap();
        assert_eq!(m, 7);
        for c in counts {
            assert_eq!(c, skipped_counts(&t, c.k).unwrap());
        }
    }
}
