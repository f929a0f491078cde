//! JSON run reports.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use rupert_core::verify::CheckStat;

/// One named pass/fail check with its measured value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `measured ≤ tolerance`.
    pub fn at_most(name: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: measured <= tolerance,
            measured,
            tolerance,
        }
    }

    /// Passes when `measured > floor`.
    pub fn above(name: &str, measured: f64, floor: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: measured > floor,
            measured,
            tolerance: floor,
        }
    }
}

impl From<&CheckStat> for Check {
    fn from(c: &CheckStat) -> Self {
        Self {
            name: c.name.clone(),
            pass: c.pass,
            measured: c.measured,
            tolerance: c.tolerance,
        }
    }
}

/// Top-level document. Wall time is reported on stderr only, so that equal
/// inputs give byte-equal files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport<I, O> {
    pub command: String,
    pub inputs: I,
    pub outputs: O,
    pub checks: Vec<Check>,
}

impl<I, O> RunReport<I, O> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Pretty printer that writes every float with 17 significant digits.
pub struct FloatFormatter<'a>(PrettyFormatter<'a>);

impl Default for FloatFormatter<'_> {
    fn default() -> Self {
        Self(PrettyFormatter::new())
    }
}

impl Formatter for FloatFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FloatFormatter::default());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}
