//! Plain-text output helpers shared by the CSV exporters.

/// Formats a double with 17 significant digits, `.` decimal, no grouping.
/// Parsing the string back yields the identical bit pattern.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Minimal CSV table: a header row plus numeric rows.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row whose first cell is an integer index.
    pub fn push_indexed(&mut self, index: usize, values: &[f64]) {
        let mut row = vec![index.to_string()];
        row.extend(values.iter().map(|&v| fmt_f64(v)));
        self.rows.push(row);
    }

    pub fn push(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

impl std::fmt::Display for CsvTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// `k,value` table of an ascending spectrum.
pub fn spectrum_csv(values: &[f64]) -> String {
    let mut t = CsvTable::new(["k", "value"]);
    for (k, &v) in values.iter().enumerate() {
        t.push_indexed(k, &[v]);
    }
    t.to_string()
}
