/// Comma-separated table with a header row.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            text: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Round-trip decimal (17 significant digits).
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Empty cell for absent values.
pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
