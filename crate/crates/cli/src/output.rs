//! Report rendering: a header with the resolved parameters, then either a
//! table or a flat key/value record.

use std::io::{self, Write};

use serde_json::{json, Map, Value};

pub enum Body {
    Table { columns: Vec<&'static str>, rows: Vec<Vec<Value>> },
    Record(Value),
}

pub struct Report {
    pub command: &'static str,
    pub params: Value,
    pub body: Body,
}

/// Shortest text with at most 12 significant digits.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim_zeros(format!("{:.*}", (11 - exp).max(0) as usize, x))
    } else {
        format!("{}e{exp}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (None, Some(i)) => i.to_string(),
            _ => fmt_real(n.as_f64().expect("finite number")),
        },
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(";"),
        Value::Object(_) => unreachable!("objects are flattened"),
    }
}

fn is_flat(v: &Value) -> bool {
    !matches!(v, Value::Object(_)) && !matches!(v, Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()))
}

/// Dotted keys for nested objects and arrays of non-scalars; arrays of
/// scalars become one `;`-separated cell.
pub fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(items) if !is_flat(v) => {
            items.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out))
        }
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

pub fn write(report: &Report, json: bool, mut w: impl Write) -> io::Result<()> {
    if json {
        let result = match &report.body {
            Body::Table { columns, rows } => json!({ "columns": columns, "rows": rows }),
            Body::Record(v) => v.clone(),
        };
        let doc = json!({
            "tool": "workbench",
            "version": env!("CARGO_PKG_VERSION"),
            "command": report.command,
            "params": report.params,
            "result": result,
        });
        serde_json::to_writer_pretty(&mut w, &doc)?;
        return writeln!(w);
    }
    writeln!(w, "# workbench {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# command = {}", report.command)?;
    let mut params = Vec::new();
    flatten("", &report.params, &mut params);
    for (k, v) in params {
        let v = if v.is_empty() { "none" } else { v.as_str() };
        writeln!(w, "# {k} = {v}")?;
    }
    match &report.body {
        Body::Table { columns, rows } => {
            writeln!(w, "{}", columns.join(","))?;
            for row in rows {
                let cells: Vec<String> = row.iter().map(|c| quote(&scalar(c))).collect();
                writeln!(w, "{}", cells.join(","))?;
            }
        }
        Body::Record(v) => {
            writeln!(w, "key,value")?;
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            for (k, v) in rows {
                writeln!(w, "{},{}", quote(&k), quote(&v))?;
            }
        }
    }
    Ok(())
}

/// Inserts `extra` into the object `v`.
pub fn merged(v: Value, extra: Map<String, Value>) -> Value {
    match v {
        Value::Object(mut m) => {
            m.extend(extra);
            Value::Object(m)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_real(1.0), "1");
        assert_eq!(fmt_real(0.1 + 0.2), "0.3");
        assert_eq!(fmt_real(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_real(-2.5e-7), "-2.5e-7");
        assert_eq!(fmt_real(6.02214076e23), "6.02214076e23");
        assert_eq!(fmt_real(123456789012.3), "123456789012");
        assert_eq!(fmt_real(9.999999999999999), "10");
        assert_eq!(fmt_real(f64::INFINITY), "inf");
    }

    #[test]
    fn flattening() {
        let v = json!({"a": {"b": [1, 2]}, "c": [{"d": 0.5}], "e": null});
        let mut out = Vec::new();
        flatten("", &v, &mut out);
        let want = [("a.b", "1;2"), ("c.0.d", "0.5"), ("e", "")];
        assert_eq!(out, want.map(|(k, v)| (k.to_string(), v.to_string())));
    }

    #[test]
    fn csv_cells_are_quoted() {
        let r = Report {
            command: "x",
            params: json!({"tuple": [0, 2]}),
            body: Body::Table { columns: vec!["a", "b"], rows: vec![vec![json!("p,q"), json!(1.5)]] },
        };
        let mut buf = Vec::new();
        write(&r, false, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.ends_with("# tuple = 0;2\na,b\n\"p,q\",1.5\n"), "{text}");
    }
}
