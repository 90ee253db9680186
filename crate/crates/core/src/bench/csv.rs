//! Plain CSV output: comma separated, LF line endings, mandatory header and
//! numbers in lowercase scientific notation with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::integrators::Trajectory;

/// `1.2345678901234567e-3` style formatting (17 significant digits).
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn channel_headers(prefix: &str, count: usize) -> Vec<String> {
    if count == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=count).map(|k| format!("{prefix}{k}")).collect()
    }
}

/// Header `t,z1..zn,ubar,ybar,newton_residual`; the final node leaves the
/// per-step columns empty.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.states[0].len();
    let m = traj.averaged_inputs.first().map_or(1, Vec::len);
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((1..=n).map(|k| format!("z{k}")));
    header.extend(channel_headers("ubar", m));
    header.extend(channel_headers("ybar", m));
    header.push("newton_residual".into());

    let mut out = String::new();
    push_row(&mut out, &header);
    let q = traj.grid.steps();
    for (i, &t) in traj.times().iter().enumerate() {
        let mut row = vec![format_number(t)];
        row.extend(traj.states[i].iter().map(|&v| format_number(v)));
        if i < q {
            row.extend(traj.averaged_inputs[i].iter().map(|&v| format_number(v)));
            row.extend(traj.discrete_outputs[i].iter().map(|&v| format_number(v)));
            row.push(format_number(traj.newton_residuals[i]));
        } else {
            row.extend(std::iter::repeat_n(String::new(), 2 * m + 1));
        }
        push_row(&mut out, &row);
    }
    out
}

/// Two-or-more column table of numbers.
pub fn table_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<Option<f64>>>) -> String {
    let mut out = String::new();
    push_row(&mut out, &header.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    for row in rows {
        let cells: Vec<String> = row
            .into_iter()
            .map(|c| c.map(format_number).unwrap_or_default())
            .collect();
        push_row(&mut out, &cells);
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)
}

/// Parsed CSV: header plus rows whose empty cells are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r.get(idx).copied().flatten()).collect())
    }
}

pub fn parse_csv(text: &str) -> Result<CsvTable, String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| "empty CSV".to_string())?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let cells = line
            .split(',')
            .map(|c| {
                if c.is_empty() {
                    Ok(None)
                } else {
                    c.parse::<f64>().map(Some).map_err(|e| format!("row {}: {e}", k + 1))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if cells.len() != header.len() {
            return Err(format!(
                "row {} has {} cells, header has {}",
                k + 1,
                cells.len(),
                header.len()
            ));
        }
        rows.push(cells);
    }
    Ok(CsvTable { header, rows })
}

/// Compact human-readable rendering of a vector for summaries.
pub fn format_vector(v: &[f64]) -> String {
    let mut s = String::from("(");
    for (k, x) in v.iter().enumerate() {
        if k > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{x:.10e}");
    }
    s.push(')');
    s
}
