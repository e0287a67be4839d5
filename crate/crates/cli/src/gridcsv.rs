//! `index,re,im` CSV files holding uniformly sampled grid functions.

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use fracdirac_core::{GridFunction, C64};

const HEADER: [&str; 3] = ["index", "re", "im"];

pub fn read(path: &Path, length: f64) -> anyhow::Result<GridFunction> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let header = reader.headers().with_context(|| format!("{}: unreadable header", path.display()))?;
    if header.iter().ne(HEADER) {
        bail!(
            "{}: header must be 'index,re,im', found '{}'",
            path.display(),
            header.iter().collect::<Vec<_>>().join(",")
        );
    }
    let mut samples = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: row {row}: malformed record", path.display()))?;
        let line = record.position().map_or(0, |p| p.line());
        let at = |col: &str| format!("{}: row {row} (line {line}), column '{col}'", path.display());
        if record.len() != 3 {
            bail!("{}: row {row} (line {line}): expected 3 columns, found {}", path.display(), record.len());
        }
        let index: usize = record[0]
            .parse()
            .map_err(|_| anyhow!("{}: '{}' is not an index", at("index"), &record[0]))?;
        if index != row {
            bail!("{}: expected index {row}, found {index}", at("index"));
        }
        let mut value = [0.0; 2];
        for (slot, col) in value.iter_mut().zip([1, 2]) {
            let v: f64 = record[col]
                .parse()
                .map_err(|_| anyhow!("{}: '{}' is not a number", at(HEADER[col]), &record[col]))?;
            if !v.is_finite() {
                bail!("{}: value is not finite", at(HEADER[col]));
            }
            *slot = v;
        }
        samples.push(C64::new(value[0], value[1]));
    }
    GridFunction::new(length, samples).with_context(|| format!("{}: invalid grid", path.display()))
}

pub fn write(path: &Path, f: &GridFunction) -> anyhow::Result<()> {
    let mut writer = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    writer.write_record(HEADER)?;
    for (i, z) in f.samples().iter().enumerate() {
        writer.write_record([i.to_string(), z.re.to_string(), z.im.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}
