use crate::error::{Error, Result};

/// Parse a two-column numeric CSV (optional header line, dot-decimal).
/// Returns the two columns; validation beyond "two finite numbers per
/// line" is left to the caller.
pub(crate) fn parse_two_column_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let (fx, fy) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Csv {
                    line: idx + 1,
                    msg: format!("expected two comma-separated columns, got '{line}'"),
                })
            }
        };
        match (fx.parse::<f64>(), fy.parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                if !x.is_finite() || !y.is_finite() {
                    return Err(Error::Csv {
                        line: idx + 1,
                        msg: "non-finite value".into(),
                    });
                }
                xs.push(x);
                ys.push(y);
            }
            _ if idx == 0 => continue, // header row
            _ => {
                return Err(Error::Csv {
                    line: idx + 1,
                    msg: format!("cannot parse '{line}' as two numbers"),
                })
            }
        }
    }
    if xs.is_empty() {
        return Err(Error::Csv {
            line: 0,
            msg: "no data rows".into(),
        });
    }
    Ok((xs, ys))
}
