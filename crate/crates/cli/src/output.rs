use serde_json::{Map, Number, Value};

/// `v` rounded to `digits` significant decimal digits.
pub fn round_sig(v: f64, digits: u8) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    let d = usize::from(digits.max(1)) - 1;
    format!("{v:.d$e}").parse().unwrap_or(v)
}

pub fn fmt_num(v: f64, digits: u8) -> String {
    let r = round_sig(v, digits);
    if r.is_finite() && r != 0.0 && !(1e-4..1e9).contains(&r.abs()) {
        format!("{r:e}")
    } else if r.is_finite() {
        format!("{r}")
    } else {
        format!("{v}")
    }
}

/// Rounds every number in a JSON tree. Non-finite values become null.
pub fn round_json(v: Value, digits: u8) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => Number::from_f64(round_sig(f, digits)).map_or(Value::Null, Value::Number),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(|x| round_json(x, digits)).collect()),
        Value::Object(o) => Value::Object(
            o.into_iter()
                .map(|(k, x)| (k, round_json(x, digits)))
                .collect::<Map<_, _>>(),
        ),
        other => other,
    }
}

/// Header plus rows, written with quoting where needed.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Column names `{prefix}0 .. {prefix}{m-1}`.
pub fn coord_columns(prefix: &str, m: usize) -> Vec<String> {
    (0..m).map(|i| format!("{prefix}{i}")).collect()
}

pub fn coord_cells(x: &[f64], digits: u8) -> Vec<String> {
    x.iter().map(|v| fmt_num(*v, digits)).collect()
}

pub fn fmt_point(x: &[f64], digits: u8) -> String {
    format!("({})", coord_cells(x, digits).join(", "))
}
