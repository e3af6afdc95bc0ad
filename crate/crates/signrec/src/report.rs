//! Per-symbol evaluation counts and their text/CSV rendering.

use std::fmt::Write as _;

/// Attempt/success counts for one symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalRow {
    pub symbol: String,
    pub attempted: u64,
    pub correct: u64,
}

impl EvalRow {
    pub fn success_rate(&self) -> f64 {
        100.0 * self.correct as f64 / self.attempted as f64
    }
}

/// Evaluation outcome over a labeled test set, one row per symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalReport {
    rows: Vec<EvalRow>,
}

impl EvalReport {
    /// Rows must already be sorted by symbol; rates are derived from the
    /// counts so the overall figure is their weighted mean by construction.
    pub fn new(rows: Vec<EvalRow>) -> Self {
        debug_assert!(rows.windows(2).all(|w| w[0].symbol <= w[1].symbol));
        Self { rows }
    }

    pub fn rows(&self) -> &[EvalRow] {
        &self.rows
    }

    pub fn total_attempted(&self) -> u64 {
        self.rows.iter().map(|r| r.attempted).sum()
    }

    pub fn total_correct(&self) -> u64 {
        self.rows.iter().map(|r| r.correct).sum()
    }

    pub fn overall_rate(&self) -> f64 {
        100.0 * self.total_correct() as f64 / self.total_attempted() as f64
    }

    /// Aligned four-column table with an overall footer.
    pub fn render_text(&self) -> String {
        let symbol_width = self
            .rows
            .iter()
            .map(|r| r.symbol.len())
            .chain(["Symbol".len(), "Overall".len()])
            .max()
            .unwrap();
        let mut out = String::new();
        writeln!(out, "{:symbol_width$}  {:>8}  {:>8}  {}", "Symbol", "Images", "Correct", "Success rate").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:symbol_width$}  {:>8}  {:>8}  {}",
                r.symbol,
                r.attempted,
                r.correct,
                format_percent(r.success_rate())
            )
            .unwrap();
        }
        writeln!(
            out,
            "{:symbol_width$}  {:>8}  {:>8}  {}",
            "Overall",
            self.total_attempted(),
            self.total_correct(),
            format_percent(self.overall_rate())
        )
        .unwrap();
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("symbol,images,correct,success_rate\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.symbol, r.attempted, r.correct, r.success_rate()).unwrap();
        }
        writeln!(
            out,
            "overall,{},{},{}",
            self.total_attempted(),
            self.total_correct(),
            self.overall_rate()
        )
        .unwrap();
        out
    }
}

/// `90` -> `90%`, `96.25` -> `96.25%`; at most two decimals, trailing zeros
/// trimmed.
pub fn format_percent(rate: f64) -> String {
    let mut s = format!("{rate:.2}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s.push('%');
    s
}
