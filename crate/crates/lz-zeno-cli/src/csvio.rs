//! Flat-file sweep output: one row per (gamma, n) cell.
//!
//! Schema: `gamma,n,method,probability,bound,instants,wall_time_ms` with the
//! variable-length schedule joined by `;` at fixed six-decimal formatting.
//! Probabilities and bounds use the shortest round-tripping float form, so
//! `parse(emit(rows)) == rows`.

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    pub n: usize,
    pub method: String,
    pub probability: f64,
    pub bound: f64,
    /// Quantized to 1e-6 on construction to match the emitted format.
    pub instants: Vec<f64>,
    pub wall_time_ms: u64,
}

impl SweepRow {
    pub fn new(
        gamma: f64,
        n: usize,
        method: String,
        probability: f64,
        bound: f64,
        instants: &[f64],
        wall_time_ms: u64,
    ) -> Self {
        let instants = instants.iter().map(|t| (t * 1e6).round() / 1e6).collect();
        Self { gamma, n, method, probability, bound, instants, wall_time_ms }
    }
}

pub const HEADER: &str = "gamma,n,method,probability,bound,instants,wall_time_ms";

pub fn emit(rows: &[SweepRow]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for row in rows {
        let instants = row
            .instants
            .iter()
            .map(|t| format!("{t:.6}"))
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.gamma, row.n, row.method, row.probability, row.bound, instants, row.wall_time_ms
        ));
    }
    out
}

#[cfg_attr(not(test), allow(dead_code))]
pub fn parse(text: &str) -> Result<Vec<SweepRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == HEADER => {}
        other => return Err(format!("bad header: {other:?}")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(format!("line {}: expected 7 fields, got {}", idx + 2, fields.len()));
        }
        let num = |s: &str, what: &str| -> Result<f64, String> {
            s.parse().map_err(|_| format!("line {}: bad {what} '{s}'", idx + 2))
        };
        let instants = if fields[5].is_empty() {
            Vec::new()
        } else {
            fields[5]
                .split(';')
                .map(|s| num(s, "instant"))
                .collect::<Result<Vec<f64>, _>>()?
        };
        rows.push(SweepRow {
            gamma: num(fields[0], "gamma")?,
            n: fields[1].parse().map_err(|_| format!("line {}: bad n", idx + 2))?,
            method: fields[2].to_string(),
            probability: num(fields[3], "probability")?,
            bound: num(fields[4], "bound")?,
            instants,
            wall_time_ms: fields[6]
                .parse()
                .map_err(|_| format!("line {}: bad wall_time_ms", idx + 2))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let rows = vec![
            SweepRow::new(0.1, 0, "auto".into(), 0.5334881, 0.5334881, &[], 12),
            SweepRow::new(5.0, 3, "adiabatic".into(), 0.62488, 0.625, &[-4.3188145, 0.0002586, 4.3191691], 857),
        ];
        let text = emit(&rows);
        let parsed = parse(&text).unwrap();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse("nope\n").is_err());
        let bad = format!("{HEADER}\n1,2,auto,x,0.5,,3\n");
        assert!(parse(&bad).is_err());
    }
}
