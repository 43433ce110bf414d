//! Report model and its text, CSV and JSON renderings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const TOOL: &str = "erlab";
pub const DEFAULT_PRECISION: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Predicted,
    Measured,
    Derived,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Predicted => "predicted",
            Provenance::Measured => "measured",
            Provenance::Derived => "derived",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Parameters as given on the command line.
    pub inputs: BTreeMap<String, String>,
}

impl Header {
    pub fn new(command: &str, inputs: BTreeMap<String, String>) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            inputs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub quantity: String,
    pub value: f64,
    /// Unit label; ℏ-normalized values use "hbar", pure numbers "1".
    pub unit: String,
    pub provenance: Provenance,
}

impl Row {
    pub fn new(
        label: &str,
        quantity: &str,
        value: f64,
        unit: &str,
        provenance: Provenance,
    ) -> Self {
        Self {
            label: label.to_string(),
            quantity: quantity.to_string(),
            value,
            unit: unit.to_string(),
            provenance,
        }
    }
}

/// How rows are laid out in text and CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// One line per row.
    #[default]
    List,
    /// One line per label, one column per quantity.
    Wide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub header: Header,
    #[serde(default)]
    pub layout: Layout,
    pub rows: Vec<Row>,
    /// Printed on stderr, not part of the rendered report.
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(header: Header, layout: Layout) -> Self {
        Self {
            header,
            layout,
            rows: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        label: &str,
        quantity: &str,
        value: f64,
        unit: &str,
        provenance: Provenance,
    ) {
        self.rows
            .push(Row::new(label, quantity, value, unit, provenance));
    }

    /// The value of `quantity` for `label`, if present.
    pub fn value(&self, label: &str, quantity: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.label == label && r.quantity == quantity)
            .map(|r| r.value)
    }

    /// Copy with every value rounded to `precision` significant digits.
    pub fn rounded(&self, precision: usize) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            row.value = round_sig(row.value, precision);
        }
        out
    }

    pub fn to_text(&self, precision: usize) -> String {
        let mut out = format!(
            "# {} {} {}\n",
            self.header.tool, self.header.version, self.header.command
        );
        for (k, v) in &self.header.inputs {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        let table = match self.layout {
            Layout::List => self.list_cells(precision),
            Layout::Wide => self.wide_cells(precision),
        };
        out.push_str(&align(&table.header_lines, &table.body, &table.right));
        out
    }

    pub fn to_csv(&self, precision: usize) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let write_err = |e: csv::Error| CliError::Io(format!("csv: {e}"));
        match self.layout {
            Layout::List => {
                w.write_record(["label", "quantity", "value", "unit", "provenance"])
                    .map_err(write_err)?;
                for r in &self.rows {
                    let value = format_sig(r.value, precision);
                    w.write_record([
                        &r.label,
                        &r.quantity,
                        &value,
                        &r.unit,
                        r.provenance.as_str(),
                    ])
                    .map_err(write_err)?;
                }
            }
            Layout::Wide => {
                let (labels, quantities) = self.pivot_keys();
                let mut head = vec!["label".to_string()];
                head.extend(quantities.iter().map(|(q, _)| q.clone()));
                w.write_record(&head).map_err(write_err)?;
                for label in &labels {
                    let mut rec = vec![label.clone()];
                    for (q, _) in &quantities {
                        rec.push(
                            self.value(label, q)
                                .map(|v| format_sig(v, precision))
                                .unwrap_or_default(),
                        );
                    }
                    w.write_record(&rec).map_err(write_err)?;
                }
            }
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Io(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(format!("csv: {e}")))
    }

    pub fn to_json(&self, precision: usize) -> Result<String, CliError> {
        to_json(&self.rounded(precision))
    }

    /// Labels and (quantity, unit) pairs in first-appearance order.
    fn pivot_keys(&self) -> (Vec<String>, Vec<(String, String)>) {
        let mut labels: Vec<String> = Vec::new();
        let mut quantities: Vec<(String, String)> = Vec::new();
        for r in &self.rows {
            if !labels.contains(&r.label) {
                labels.push(r.label.clone());
            }
            if !quantities.iter().any(|(q, _)| *q == r.quantity) {
                quantities.push((r.quantity.clone(), r.unit.clone()));
            }
        }
        (labels, quantities)
    }

    fn list_cells(&self, precision: usize) -> Cells {
        let header = ["label", "quantity", "value", "unit", "provenance"]
            .map(String::from)
            .to_vec();
        let body = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.label.clone(),
                    r.quantity.clone(),
                    format_sig(r.value, precision),
                    r.unit.clone(),
                    r.provenance.as_str().to_string(),
                ]
            })
            .collect();
        Cells {
            header_lines: vec![header],
            body,
            right: vec![false, false, true, false, false],
        }
    }

    fn wide_cells(&self, precision: usize) -> Cells {
        let (labels, quantities) = self.pivot_keys();
        let mut names = vec!["label".to_string()];
        let mut units = vec![String::new()];
        for (q, u) in &quantities {
            names.push(q.clone());
            units.push(format!("[{u}]"));
        }
        let body = labels
            .iter()
            .map(|label| {
                let mut line = vec![label.clone()];
                for (q, _) in &quantities {
                    line.push(
                        self.value(label, q)
                            .map(|v| format_sig(v, precision))
                            .unwrap_or_else(|| "-".into()),
                    );
                }
                line
            })
            .collect();
        let mut right = vec![true; quantities.len() + 1];
        right[0] = false;
        Cells {
            header_lines: vec![names, units],
            body,
            right,
        }
    }
}

struct Cells {
    header_lines: Vec<Vec<String>>,
    body: Vec<Vec<String>>,
    right: Vec<bool>,
}

fn align(header_lines: &[Vec<String>], body: &[Vec<String>], right: &[bool]) -> String {
    let all: Vec<&Vec<String>> = header_lines.iter().chain(body).collect();
    let cols = right.len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            all.iter()
                .map(|line| line[c].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for line in all {
        let cells: Vec<String> = (0..cols)
            .map(|c| {
                let pad = widths[c] - line[c].chars().count();
                if right[c] {
                    format!("{}{}", " ".repeat(pad), line[c])
                } else {
                    format!("{}{}", line[c], " ".repeat(pad))
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Pretty JSON with sorted keys and a trailing newline, so that parsing the
/// output and emitting it again reproduces it byte for byte.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Validation(format!("json: {e}")))?;
    let mut s =
        serde_json::to_string_pretty(&v).map_err(|e| CliError::Validation(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// `%g`-style formatting with `precision` significant digits.
pub fn format_sig(value: f64, precision: usize) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let p = precision.max(1);
    let sci = format!("{:.*e}", p - 1, value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{value:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `value` rounded to `precision` significant digits.
pub fn round_sig(value: f64, precision: usize) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    format!("{:.*e}", precision.max(1) - 1, value)
        .parse()
        .expect("formatted float parses")
}
