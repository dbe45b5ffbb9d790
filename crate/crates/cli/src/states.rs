//! Neighbor states for `rescon combine`: a CSV with header `id,x1,...,xn`.

use rescon_core::{AgentId, Point, PointSet};

use crate::CliError;

pub fn parse_states(text: &str) -> Result<PointSet, CliError> {
    let bad = |msg: String| CliError::Invalid(format!("states: {msg}"));
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let n = header.len().saturating_sub(1);
    let expected: Vec<String> =
        std::iter::once("id".to_string()).chain((1..=n).map(|c| format!("x{c}"))).collect();
    if n == 0 || header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(bad(format!("header must be id,x1,...,xn, found {:?}", header.as_slice())));
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let line = k + 2;
        let id: usize = row[0]
            .parse()
            .ok()
            .filter(|&id| id >= 1)
            .ok_or_else(|| bad(format!("line {line}: bad agent id {:?}", &row[0])))?;
        let coords = (1..=n)
            .map(|c| {
                row[c]
                    .parse::<f64>()
                    .map_err(|_| bad(format!("line {line}: bad coordinate {:?}", &row[c])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        points.push(Point::new(coords).map_err(|e| bad(format!("line {line}: {e}")))?);
        labels.push(AgentId(id));
    }
    PointSet::new(points, labels).map_err(|e| bad(e.to_string()))
}
