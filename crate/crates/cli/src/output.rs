use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::config::Format;
use crate::CliResult;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// 17 significant digits; round-trips every double. `-0` prints as `0`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        "0.0000000000000000e0".into()
    } else if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> CliResult<()> {
        writeln!(
            w,
            "{}",
            self.columns
                .iter()
                .map(|c| csv_field(c))
                .collect::<Vec<_>>()
                .join(",")
        )?;
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Float(x) => format_float(*x),
                    Cell::Text(s) => csv_field(s),
                    Cell::Empty => String::new(),
                })
                .collect();
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self, meta: Value) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.clone(), json_cell(c)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("meta".into(), meta);
        top.insert("rows".into(), Value::Array(rows));
        Value::Object(top)
    }

    pub fn write(&self, format: Format, meta: Value, w: &mut dyn Write) -> CliResult<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &self.to_json(meta)).map_err(std::io::Error::from)?;
                writeln!(w)?;
                Ok(())
            }
        }
    }
}

/// Floats keep the CSV text exactly; non-finite values become `null`.
pub fn json_float(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(
            format_float(x)
                .parse::<Number>()
                .expect("formatted float is a JSON number"),
        )
    } else {
        Value::Null
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Int(i) => Value::from(*i),
        Cell::Float(x) => json_float(*x),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Empty => Value::Null,
    }
}

pub fn flags(list: &[(bool, &str)]) -> Cell {
    let on: Vec<&str> = list.iter().filter(|(b, _)| *b).map(|(_, s)| *s).collect();
    Cell::Text(on.join("|"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(f64::NAN), "nan");
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(["a", "b", "c"]);
        t.push(vec![1usize.into(), 0.5.into(), "x,y".into()]);
        t.push(vec![Cell::Empty, f64::INFINITY.into(), "".into()]);
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "a,b,c\n1,5.0000000000000000e-1,\"x,y\"\n,inf,\n"
        );
        let j = t.to_json(Value::Null);
        assert_eq!(j["rows"][0]["b"].to_string(), "5.0000000000000000e-1");
        assert!(j["rows"][1]["b"].is_null());
    }
}
