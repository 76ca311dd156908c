//! Text, CSV and JSON rendering of command results.

use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// A command's result: named columns, one or more rows, and trailing notes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Output {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub notes: Vec<String>,
    /// Render a single row as a flat JSON object.
    pub single: bool,
    /// Replaces the aligned table in text mode.
    pub text: Option<String>,
}

impl Output {
    pub fn table(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn record(fields: Vec<(&str, Value)>) -> Self {
        let (h, r): (Vec<&str>, Vec<Value>) = fields.into_iter().unzip();
        let mut out = Self::table(&h);
        out.rows.push(r);
        out.single = true;
        out
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn render(&self, format: Format, header: Option<&str>) -> String {
        match format {
            Format::Text => self.render_text(header),
            Format::Csv => self.render_csv(header),
            Format::Json => self.render_json(header),
        }
    }

    fn render_text(&self, header: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(h) = header {
            out.push_str(&format!("# {h}\n"));
        }
        match &self.text {
            Some(t) => {
                out.push_str(t);
                if !t.ends_with('\n') {
                    out.push('\n');
                }
            }
            None => {
                let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
                let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
                for r in &cells {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |items: &[String]| {
                    let parts: Vec<String> = items
                        .iter()
                        .zip(&widths)
                        .map(|(s, w)| format!("{s:<w$}"))
                        .collect();
                    parts.join("  ").trim_end().to_string()
                };
                out.push_str(&line(&self.headers));
                out.push('\n');
                for r in &cells {
                    out.push_str(&line(r));
                    out.push('\n');
                }
            }
        }
        for n in &self.notes {
            out.push_str(n);
            out.push('\n');
        }
        out
    }

    fn render_csv(&self, header: Option<&str>) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(cell)).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input");
        let mut out = String::new();
        if let Some(h) = header {
            out.push_str(&format!("# {h}\n"));
        }
        out.push_str(&body);
        for n in &self.notes {
            out.push_str(&format!("# {n}\n"));
        }
        out
    }

    fn render_json(&self, header: Option<&str>) -> String {
        let object = |r: &Vec<Value>| -> Value {
            let m: Map<String, Value> = self.headers.iter().cloned().zip(r.iter().cloned()).collect();
            Value::Object(m)
        };
        let mut top = if self.single && self.rows.len() == 1 {
            match object(&self.rows[0]) {
                Value::Object(m) => m,
                _ => unreachable!(),
            }
        } else {
            let mut m = Map::new();
            m.insert("rows".into(), Value::Array(self.rows.iter().map(object).collect()));
            m
        };
        if !self.notes.is_empty() {
            top.insert("notes".into(), self.notes.iter().map(|n| Value::String(n.clone())).collect());
        }
        if let Some(h) = header {
            top.insert("generated".into(), Value::String(h.into()));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("serializable");
        s.push('\n');
        s
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
