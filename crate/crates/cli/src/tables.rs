//! Deterministic CSV tables and gnuplot scripts.

/// One emitted file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub filename: String,
    pub contents: String,
}

/// A rectangular table rendered as RFC 4180 CSV (UTF-8, CRLF, '.' decimal).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, headers: &[&str]) -> Self {
        Self {
            name: name.into(),
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.headers.len(), "ragged table row");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push_str("\r\n");
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push_str("\r\n");
        }
        out
    }

    pub fn into_artifact(self) -> Artifact {
        Artifact {
            contents: self.to_csv(),
            filename: format!("{}.csv", self.name),
        }
    }
}

/// Scientific notation with six significant digits; the fixed float format
/// that makes repeated runs byte-identical.
pub fn sci6(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // Normalize negative zero so formatting cannot depend on its sign.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.5E}")
}

/// Plain decimal for integers and short parameters.
pub fn plain(x: f64) -> String {
    format!("{x}")
}

/// Gnuplot script for the spatial-convergence figure of the Schrödinger
/// benchmark (errors vs N for the two variable orders).
pub fn schrodinger_figure_script(csv_name: &str) -> String {
    format!(
        "set terminal pngcairo size 800,600\n\
         set output 'ex5_fig1.png'\n\
         set datafile separator ','\n\
         set logscale y\n\
         set xlabel 'N'\n\
         set ylabel 'Merr(Re u)'\n\
         set title 'Variable-order Schrodinger benchmark, K = 5, T = 1'\n\
         plot '{csv_name}' using 1:2 with linespoints title '4^{{t-1}}', \\\n\
         \x20    '{csv_name}' using 1:3 with linespoints title 'e^t/3'\n"
    )
}

/// Gnuplot script for the biharmonic benchmark's solution/error surfaces.
pub fn biharmonic_figure_script(csv_name: &str, grid: usize) -> String {
    format!(
        "set terminal pngcairo size 1200,500\n\
         set output 'ex8_fig2.png'\n\
         set datafile separator ','\n\
         set dgrid3d {grid},{grid}\n\
         set multiplot layout 1,2\n\
         set xlabel 'x1'\n\
         set ylabel 'x2'\n\
         set title 'numerical solution at T = 1'\n\
         splot '{csv_name}' using 1:2:3 with pm3d notitle\n\
         set title 'absolute error at T = 1'\n\
         splot '{csv_name}' using 1:2:4 with pm3d notitle\n\
         unset multiplot\n"
    )
}
