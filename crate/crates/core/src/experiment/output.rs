use std::fs::File;
use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::{Error, Result};

/// Writes through a temporary file in the destination directory and renames
/// it into place, so `path` never holds a partial file.
pub fn write_atomic<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut File) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    write(tmp.as_file_mut())?;
    tmp.as_file_mut().flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_text_atomic(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, |f| {
        f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
    })
}

/// Fixed-point with 12 decimals in `[1e-3, 1e15)`, scientific otherwise.
/// Always uses `.` as the decimal separator.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e15).contains(&a) {
        format!("{v:.12}")
    } else if v.is_finite() {
        format!("{v:.12e}")
    } else {
        v.to_string()
    }
}

/// Full-precision form used in CSV tables.
pub fn format_exact(v: f64) -> String {
    format!("{v:.16e}")
}

/// Sizes the global thread pool from `threads`, or else from the
/// `PM_THREADS` environment variable. Later calls have no effect.
pub fn configure_threads(threads: Option<usize>) -> Result<()> {
    let requested =
        match threads {
            Some(n) => Some(n),
            None => match std::env::var("PM_THREADS") {
                Ok(s) => Some(s.trim().parse().map_err(|_| {
                    Error::Config(format!("PM_THREADS must be a positive integer, got `{s}`"))
                })?),
                Err(_) => None,
            },
        };
    if let Some(n) = requested {
        if n == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(format_number(4.0), "4.000000000000");
        assert_eq!(format_number(0.0), "0.000000000000");
        assert_eq!(format_number(1e-5), "1.000000000000e-5");
        assert_eq!(format_exact(0.625), "6.2500000000000000e-1");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_text_atomic(&path, "first").unwrap();
        write_text_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn failed_write_leaves_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        let err = write_atomic(&path, |_| Err(Error::Config("boom".into())));
        assert!(err.is_err());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
