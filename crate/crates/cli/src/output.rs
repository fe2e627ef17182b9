// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

/// `v` with 9 significant digits: plain decimal for moderate magnitudes,
/// scientific otherwise.
pub fn sig9(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    // round once through the exponent form so that 9.9999999995 becomes 10.0000000
    let sci = format!("{v:.8e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..9).contains(&exp) {
        format!("{v:.*}", (8 - exp) as usize)
    } else {
        sci
    }
}

pub fn bool_cell(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Writes to `out`, or to stdout when it is `None`.
pub fn with_sink<F>(out: Option<&Path>, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|source| CliError::Io { path: path.to_path_buf(), source })
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush().map_err(CliError::Output)
        }
    }
}

pub fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    with_sink(out, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w).map_err(CliError::Output)
    })
}

/// CSV with a header row; every row must have the header's width.
pub fn write_csv(out: Option<&Path>, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    with_sink(out, |w| {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(header)?;
        for r in rows {
            wr.write_record(r)?;
        }
        wr.flush().map_err(CliError::Output)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.5), "0.500000000");
        assert_eq!(sig9(-1.0953026854), "-1.09530269");
        assert_eq!(sig9(123456.789123), "123456.789");
        assert_eq!(sig9(9.9999999996), "10.0000000");
        assert_eq!(sig9(1.5e-7), "1.50000000e-7");
        assert_eq!(sig9(2.5e12), "2.50000000e12");
        assert_eq!(sig9(0.0), "0");
    }
}
