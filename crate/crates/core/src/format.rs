//! Text output helpers shared by the CSV writers.

use std::fs;
use std::io::Write;
use std::path::Path;

/// Formats a float with 17 significant digits, which round-trips any `f64`.
pub fn float17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Joins floats as CSV fields.
pub fn float_fields(xs: &[f64]) -> String {
    xs.iter().map(|&x| float17(x)).collect::<Vec<_>>().join(",")
}

/// Writes `contents` to `path` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)
}
