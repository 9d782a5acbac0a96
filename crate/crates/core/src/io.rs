//! Dataset CSV: header `x1,...,xd,y,missing`, `missing` ∈ {0,1}, and an empty
//! `y` field on masked rows.

use std::io::{Read, Write};

use crate::data::{Dataset, Universe};
use crate::error::{Error, Result};
use crate::simulation::format_f64;

pub fn read_dataset_csv<R: Read>(reader: R, universe_for_dim: impl FnOnce(usize) -> Result<Universe>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let cols: Vec<&str> = headers.iter().map(str::trim).collect();
    if cols.len() < 2 || cols[cols.len() - 2] != "y" || cols[cols.len() - 1] != "missing" {
        return Err(Error::Format("header must end with `y,missing`".into()));
    }
    let d = cols.len() - 2;
    for (j, c) in cols[..d].iter().enumerate() {
        if *c != format!("x{}", j + 1) {
            return Err(Error::Format(format!("column {} should be `x{}`, found `{c}`", j + 1, j + 1)));
        }
    }
    let universe = universe_for_dim(d)?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut mask = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = line + 1;
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("row {row}: cannot parse {what} `{s}`")))
        };
        for j in 0..d {
            x.push(parse(&rec[j], &format!("x{}", j + 1))?);
        }
        let missing = match rec[d + 1].trim() {
            "0" => false,
            "1" => true,
            other => return Err(Error::Format(format!("row {row}: missing must be 0 or 1, found `{other}`"))),
        };
        let yv = rec[d].trim();
        if missing {
            y.push(f64::NAN);
        } else if yv.is_empty() {
            return Err(Error::Format(format!("row {row}: empty y on an observed row")));
        } else {
            y.push(parse(yv, "y")?);
        }
        mask.push(missing);
    }
    Dataset::new(x, y, mask, universe)
}

pub fn write_dataset_csv<W: Write>(mut w: W, d: &Dataset) -> Result<()> {
    let mut header: Vec<String> = (1..=d.dim()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    header.push("missing".into());
    writeln!(w, "{}", header.join(","))?;
    for i in 0..d.len() {
        let mut fields: Vec<String> = d.row(i).iter().map(|&v| format_f64(v)).collect();
        match d.response(i) {
            Some(v) => {
                fields.push(format_f64(v));
                fields.push("0".into());
            }
            None => {
                fields.push(String::new());
                fields.push("1".into());
            }
        }
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}
