//! Deterministic artifact emission: pinned 9-significant-digit number
//! formatting and atomic file writes (no torn CSVs on failure).

use anyhow::{Context, Result};
use std::path::{Path, PathBuf};

/// Formats with exactly nine significant digits in positional notation.
/// Pinned formatting keeps CSV output byte-identical across platforms.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Writes `content` to `path` via a temporary sibling and an atomic rename.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Output directory resolution: `--out` flag beats the scenario's
/// `reporting.output_dir`; the `MDPMIX_OUT` environment variable, when set,
/// is the root both are joined onto.
pub fn resolve_output_dir(flag: Option<&str>, scenario_dir: &str) -> PathBuf {
    let dir = flag.unwrap_or(scenario_dir);
    match std::env::var_os("MDPMIX_OUT") {
        Some(root) => PathBuf::from(root).join(dir),
        None => PathBuf::from(dir),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(136.795432101), "136.795432");
        assert_eq!(sig9(0.00014), "0.000140000000");
        assert_eq!(sig9(0.0), "0.00000000");
        assert_eq!(sig9(-5.5), "-5.50000000");
        assert_eq!(sig9(123456789.0), "123456789");
        assert_eq!(sig9(1.0), "1.00000000");
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = std::env::temp_dir().join(format!("mdpmix-test-{}", std::process::id()));
        let path = dir.join("x.csv");
        write_atomic(&path, "a,b\n").unwrap();
        write_atomic(&path, "c,d\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "c,d\n");
        std::fs::remove_dir_all(&dir).ok();
    }
}
