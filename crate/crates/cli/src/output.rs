use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qsched_core::rng::GENERATOR_NAME;
use serde::Serialize;

use crate::config::RunConfig;

/// Writes into a temporary file next to `path` and renames it into place,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, f: impl FnOnce(&mut dyn Write) -> qsched_core::Result<()>) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        f(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush()?;
    }
    tmp.persist(path).with_context(|| format!("cannot move output into {}", path.display()))?;
    Ok(())
}

pub struct OutDir(PathBuf);

impl OutDir {
    pub fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("cannot create output directory {}", root.display()))?;
        Ok(Self(root.to_path_buf()))
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    pub fn write(&self, name: &str, f: impl FnOnce(&mut dyn Write) -> qsched_core::Result<()>) -> Result<PathBuf> {
        let path = self.path(name);
        write_atomic(&path, f)?;
        Ok(path)
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    generator: &'a str,
    config: &'a RunConfig,
}

/// `metadata.toml`: the command, the generator and every effective setting.
pub fn write_metadata(out: &OutDir, command: &str, cfg: &RunConfig) -> Result<PathBuf> {
    let meta = Metadata { command, version: env!("CARGO_PKG_VERSION"), generator: GENERATOR_NAME, config: cfg };
    let text = toml::to_string(&meta).context("serializing run metadata")?;
    out.write("metadata.toml", |w| Ok(w.write_all(text.as_bytes())?))
}

/// `x` rounded to `digits` significant digits, in plain decimal notation.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding may carry into a new leading digit, e.g. 9.999995 -> 10.00000
    let rounded: f64 = s.parse().expect("formatted float parses");
    let new_mag = rounded.abs().log10().floor() as i64;
    if new_mag > magnitude && decimals > 0 {
        format!("{rounded:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(significant(-7.370526315789, 6), "-7.37053");
        assert_eq!(significant(-7.645275840, 6), "-7.64528");
        assert_eq!(significant(-4.6, 6), "-4.60000");
        assert_eq!(significant(-12.34567891, 6), "-12.3457");
        assert_eq!(significant(0.000123456789, 6), "0.000123457");
        assert_eq!(significant(9.9999996, 6), "10.0000");
        assert_eq!(significant(0.0, 6), "0");
    }

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutDir::new(&dir.path().join("nested")).unwrap();
        out.write("a.csv", |w| Ok(w.write_all(b"first\n")?)).unwrap();
        out.write("a.csv", |w| Ok(w.write_all(b"second\n")?)).unwrap();
        assert_eq!(fs::read_to_string(out.path("a.csv")).unwrap(), "second\n");
        assert_eq!(fs::read_dir(dir.path().join("nested")).unwrap().count(), 1);
    }

    #[test]
    fn failed_write_leaves_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutDir::new(dir.path()).unwrap();
        let res = out.write("b.csv", |_| Err(qsched_core::Error::Invalid("boom".into())));
        assert!(res.is_err());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
