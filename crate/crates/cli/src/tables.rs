//! CSV tables: trajectories and loss logs.
//!
//! Trajectories use the header `sample_id,step,t,<coords>` where the
//! coordinate columns are the group's payload names (`x,y,theta` on SE(2),
//! `r00..r22` on SO(3), `v0..` on R^d, `f{i}_`-prefixed for products). Rows
//! are grouped by sample and ordered by step. Loss logs use `step,loss`.
//! Floats are written in shortest round-trip form.

use std::io::{Read, Write};

use lieflow_core::{Element, Group, LieGroup};

/// A CSV problem located at a 1-based line.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct TableError {
    pub line: u64,
    pub message: String,
}

fn table_err(line: u64, message: impl Into<String>) -> TableError {
    TableError { line, message: message.into() }
}

fn csv_err(e: csv::Error) -> TableError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            table_err(line, format!("expected {expected_len} fields, found {len}"))
        }
        kind => table_err(line, format!("{kind:?}")),
    }
}

pub fn trajectory_header(group: &Group) -> Vec<String> {
    let mut header = vec!["sample_id".to_string(), "step".to_string(), "t".to_string()];
    header.extend(group.coord_names());
    header
}

/// Writes trajectories of equal length (`steps + 1` points each).
pub fn write_trajectories<W: Write>(out: W, group: &Group, trajectories: &[Vec<Element>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trajectory_header(group))?;
    let mut coords = Vec::with_capacity(group.coord_dim());
    for (id, traj) in trajectories.iter().enumerate() {
        let steps = traj.len().saturating_sub(1).max(1);
        for (step, g) in traj.iter().enumerate() {
            coords.clear();
            group.coords_into(g, &mut coords);
            let mut row = vec![id.to_string(), step.to_string(), (step as f64 / steps as f64).to_string()];
            row.extend(coords.iter().map(f64::to_string));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads trajectories written by [`write_trajectories`], checking the
/// schema: exact header, consecutive sample ids from 0, steps from 0 with
/// strictly increasing `t` in `[0, 1]`, equal lengths, valid elements.
pub fn read_trajectories<R: Read>(input: R, group: &Group) -> Result<Vec<Vec<Element>>, TableError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let expected = trajectory_header(group);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(table_err(1, format!("header `{}` does not match {} (`{}`)", header.iter().collect::<Vec<_>>().join(","), group.name(), expected.join(","))));
    }
    let mut trajectories: Vec<Vec<Element>> = Vec::new();
    let mut last_t = 0.0;
    let mut end_lines = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let num = |i: usize| -> Result<f64, TableError> {
            record[i].trim().parse::<f64>().map_err(|_| table_err(line, format!("column `{}`: `{}` is not a number", expected[i], &record[i])))
        };
        let int = |i: usize| -> Result<usize, TableError> {
            record[i].trim().parse::<usize>().map_err(|_| table_err(line, format!("column `{}`: `{}` is not an index", expected[i], &record[i])))
        };
        let (id, step, t) = (int(0)?, int(1)?, num(2)?);
        if !(0.0..=1.0).contains(&t) {
            return Err(table_err(line, format!("t = {t} outside [0, 1]")));
        }
        if id == trajectories.len() {
            if step != 0 {
                return Err(table_err(line, format!("sample {id} starts at step {step}, expected 0")));
            }
            trajectories.push(Vec::new());
            end_lines.push(line);
        } else if id + 1 == trajectories.len() {
            let expected_step = trajectories[id].len();
            if step != expected_step {
                return Err(table_err(line, format!("sample {id}: step {step} follows step {}", expected_step - 1)));
            }
            if t <= last_t {
                return Err(table_err(line, format!("sample {id}: t = {t} does not increase")));
            }
        } else {
            return Err(table_err(line, format!("sample id {id} out of order (expected {} or {})", trajectories.len().saturating_sub(1), trajectories.len())));
        }
        let coords = (3..record.len()).map(num).collect::<Result<Vec<_>, _>>()?;
        let g = group.from_coords(&coords).map_err(|e| table_err(line, e.to_string()))?;
        trajectories[id].push(g);
        end_lines[id] = line;
        last_t = t;
    }
    if trajectories.is_empty() {
        return Err(table_err(1, "no trajectory rows"));
    }
    let len = trajectories[0].len();
    if let Some(i) = trajectories.iter().position(|t| t.len() != len) {
        return Err(table_err(end_lines[i], format!("sample {i} has {} points, sample 0 has {len}", trajectories[i].len())));
    }
    Ok(trajectories)
}

pub fn write_losses<W: Write>(out: W, losses: &[f64]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "loss"])?;
    for (step, loss) in losses.iter().enumerate() {
        w.write_record([step.to_string(), loss.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_losses<R: Read>(input: R) -> Result<Vec<f64>, TableError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(["step", "loss"]) {
        return Err(table_err(1, "expected header `step,loss`"));
    }
    let mut losses = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        match (record[0].trim().parse::<usize>(), record[1].trim().parse::<f64>()) {
            (Ok(step), Ok(loss)) if step == losses.len() => losses.push(loss),
            (Ok(step), Ok(_)) => return Err(table_err(line, format!("step {step} out of order"))),
            _ => return Err(table_err(line, "expected an integer step and a numeric loss")),
        }
    }
    Ok(losses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lieflow_core::rng;

    fn sample(group: &Group, n: usize, len: usize) -> Vec<Vec<Element>> {
        let mut r = rng::stream(4, "tables");
        (0..n).map(|_| (0..len).map(|_| group.random(&mut r)).collect()).collect()
    }

    fn written(group: &Group, t: &[Vec<Element>]) -> String {
        let mut buf = Vec::new();
        write_trajectories(&mut buf, group, t).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn trajectory_roundtrip_is_exact() {
        for id in ["r1", "r2", "se2", "so3", "se2xr2"] {
            let g = Group::from_id(id).unwrap();
            let t = sample(&g, 4, 3);
            let text = written(&g, &t);
            assert_eq!(text.lines().count(), 1 + 4 * 3);
            assert_eq!(read_trajectories(text.as_bytes(), &g).unwrap(), t);
        }
    }

    #[test]
    fn header_and_times() {
        let g = Group::se2();
        let text = written(&g, &sample(&g, 1, 2));
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("sample_id,step,t,x,y,theta"));
        assert!(lines.next().unwrap().starts_with("0,0,0,"));
        assert!(lines.next().unwrap().starts_with("0,1,1,"));
    }

    #[test]
    fn malformed_rows_report_their_line() {
        let g = Group::se2();
        let text = written(&g, &sample(&g, 2, 3));
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        let cases: Vec<(usize, String)> = vec![
            (3, "0,2,0.5,1,2,abc".into()),
            (4, "0,2,1,1,2".into()),
            (3, "0,5,1,1,2,3".into()),
            (5, "3,0,0,1,2,3".into()),
            (3, "0,1,1.5,1,2,3".into()),
        ];
        for (line, bad) in cases {
            let saved = std::mem::replace(&mut lines[line - 1], bad);
            let err = read_trajectories(lines.join("\n").as_bytes(), &g).unwrap_err();
            assert_eq!(err.line, line as u64, "{err}");
            lines[line - 1] = saved;
        }
        let short = lines[..lines.len() - 1].join("\n");
        assert_eq!(read_trajectories(short.as_bytes(), &g).unwrap_err().line, 6);
        let so3 = Group::so3();
        assert_eq!(read_trajectories(text.as_bytes(), &so3).unwrap_err().line, 1);
    }

    #[test]
    fn rotations_must_be_orthogonal() {
        let g = Group::so3();
        let text = "sample_id,step,t,r00,r01,r02,r10,r11,r12,r20,r21,r22\n0,0,0,2,0,0,0,1,0,0,0,1\n";
        assert_eq!(read_trajectories(text.as_bytes(), &g).unwrap_err().line, 2);
    }

    #[test]
    fn loss_log_roundtrip() {
        let losses = vec![1.5, 0.1 + 0.2, 1e-300, 0.0];
        let mut buf = Vec::new();
        write_losses(&mut buf, &losses).unwrap();
        assert!(buf.starts_with(b"step,loss\n0,1.5\n"));
        assert_eq!(read_losses(buf.as_slice()).unwrap(), losses);
        let err = read_losses("step,loss\n0,1\n2,1\n".as_bytes()).unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(read_losses("step,loss\n0,x\n".as_bytes()).unwrap_err().line, 2);
    }
}
