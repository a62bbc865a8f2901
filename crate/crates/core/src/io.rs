//! Profile files: comma-separated, one header line, columns
//! `t,u,du,ddu,dddu,f,df,ddf` in any order. `t`, `u` and `f` are required;
//! missing derivative columns are reconstructed on reading.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::SpaceParams;
use crate::profile::{Profile, ProfileColumns};

pub const COLUMNS: [&str; 8] = ["t", "u", "du", "ddu", "dddu", "f", "df", "ddf"];

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_profile<W: Write>(out: W, profile: &Profile) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(COLUMNS).map_err(csv_err)?;
    for s in &profile.states {
        let row = [s.t, s.u, s.du, s.ddu, s.dddu, s.f, s.df, s.ddf].map(format_value);
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_profile<R: Read>(input: R, params: SpaceParams) -> Result<Profile> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let mut index = [None; 8];
    for (pos, name) in header.iter().enumerate() {
        let slot = COLUMNS
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::Parse(format!("unknown column `{name}`")))?;
        if index[slot].replace(pos).is_some() {
            return Err(Error::Parse(format!("duplicate column `{name}`")));
        }
    }
    for required in [0, 1, 5] {
        if index[required].is_none() {
            return Err(Error::Parse(format!("missing column `{}`", COLUMNS[required])));
        }
    }
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 8];
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        for (slot, pos) in index.iter().enumerate() {
            let Some(pos) = pos else { continue };
            let field = record.get(*pos).unwrap_or("");
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: `{field}` is not a number", line + 2)))?;
            cols[slot].push(v);
        }
    }
    let mut take = |i: usize| index[i].map(|_| std::mem::take(&mut cols[i]));
    let columns = ProfileColumns {
        t: take(0).unwrap_or_default(),
        u: take(1).unwrap_or_default(),
        du: take(2),
        ddu: take(3),
        dddu: take(4),
        f: take(5).unwrap_or_default(),
        df: take(6),
        ddf: take(7),
    };
    Profile::from_columns(params, columns)
}

pub fn write_profile_file(path: &Path, profile: &Profile) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_profile(std::io::BufWriter::new(file), profile)
}

pub fn read_profile_file(path: &Path, params: SpaceParams) -> Result<Profile> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_profile(std::io::BufReader::new(file), params)
}
