//! JSON and CSV writers that print every float with 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

struct Sig17;

impl Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", float(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// `d.dddddddddddddddde±x`; non-finite values print as Rust does.
pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    value.serialize(&mut ser).expect("serializing to memory");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// `value` as a JSON object with `"schema": 1` added.
pub fn with_schema<T: Serialize>(value: &T) -> Value {
    let mut v = serde_json::to_value(value).expect("payload serializes");
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), Value::from(1));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 4.0 / std::f64::consts::PI, 1e-300, -2.5e17, 0.0] {
            let s = to_json(&x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let v: Value = serde_json::from_str(&s).unwrap();
            assert_eq!(v.as_f64().unwrap(), x);
        }
        assert_eq!(to_json(&1.0), "1.0000000000000000e0");
        assert_eq!(to_json(&serde_json::json!({"a": 3})), r#"{"a":3}"#);
    }
}
