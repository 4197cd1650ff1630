//! JSON and CSV writers that print every float with 17 significant digits.

use std::cell::Cell;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::CliError;

/// `d.dddddddddddddddde±x`: enough digits to recover the exact `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON whose floats use [`fmt_float`].
///
/// serde_json writes non-finite floats as `null`. Reports have no optional
/// fields, so any `null` is remembered as a non-finite value.
struct Exact<'a> {
    inner: PrettyFormatter<'a>,
    non_finite: &'a Cell<bool>,
}

impl Formatter for Exact<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_float(value).as_bytes())
    }

    fn write_null<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.non_finite.set(true);
        w.write_all(b"null")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serialise `value`, failing with [`CliError::Numeric`] if any float is not finite.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let non_finite = Cell::new(false);
    let mut buf = Vec::new();
    let fmt = Exact {
        inner: PrettyFormatter::new(),
        non_finite: &non_finite,
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Numeric(format!("cannot serialise report: {e}")))?;
    if non_finite.get() {
        return Err(CliError::Numeric(
            "report contains a non-finite value".into(),
        ));
    }
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Write CSV rows of floats under `header`, after optional `#` comment lines.
pub fn write_csv<W: Write>(
    out: W,
    comments: &[String],
    header: &[&str],
    rows: &[Vec<f64>],
) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| fmt_float(x)))?;
    }
    w.flush()
}
