//! CSV output shared by every subcommand.

use std::io::Write;

use crate::error::Result;

pub const HEADER: [&str; 8] = [
    "param",
    "value",
    "capacity_bits",
    "quad_err",
    "mc_mean",
    "mc_stderr",
    "rel_gap",
    "error",
];

/// One output row; `None` cells are written empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    pub param: Option<String>,
    pub value: Option<f64>,
    pub capacity_bits: Option<f64>,
    pub quad_err: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub rel_gap: Option<f64>,
    pub error: Option<String>,
}

/// 17 significant digits.
pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl Row {
    fn cells(&self) -> [String; 8] {
        let real = |v: Option<f64>| v.map(format_real).unwrap_or_default();
        [
            self.param.clone().unwrap_or_default(),
            real(self.value),
            real(self.capacity_bits),
            real(self.quad_err),
            real(self.mc_mean),
            real(self.mc_stderr),
            real(self.rel_gap),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.cells())?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[Row]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}
