//! Flag and file parsing.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use urnlab_core::rational::{self, Rational};
use urnlab_core::urn::Windows;

use crate::output::{usage, Failure, Run};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Run<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

pub fn list(s: &str) -> Run<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::Usage(format!("bad integer {t:?} in {s:?}"))))
        .collect()
}

/// `"0,1;2"` is the list of sets `{0,1}` and `{2}`.
pub fn sets(s: &str) -> Run<Vec<Vec<usize>>> {
    s.split(';').map(list).collect()
}

pub fn rational(s: &str) -> Run<Rational> {
    Ok(rational::parse(s)?)
}

/// `a:b` as an inclusive range.
pub fn range(s: &str) -> Run<(usize, usize)> {
    let parts = list(&s.replace(':', ","))?;
    match parts[..] {
        [a, b] if a <= b => Ok((a, b)),
        _ => usage(format!("expected lo:hi with lo <= hi, got {s:?}")),
    }
}

/// Window flags: `j:lo:hi` for one urn, or `lo:hi` for every urn in `default_urns`.
pub fn windows(flags: &[String], default_urns: impl Fn() -> Vec<usize>) -> Run<Windows> {
    let mut out = Windows::new();
    for f in flags {
        let parts = list(&f.replace(':', ","))?;
        match parts[..] {
            [j, lo, hi] => {
                out.insert(j, (lo, hi));
            }
            [lo, hi] => {
                for j in default_urns() {
                    out.insert(j, (lo, hi));
                }
            }
            _ => return usage(format!("expected j:lo:hi or lo:hi, got {f:?}")),
        }
    }
    Ok(out)
}
