//! Factor lists and matrix files.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::graph::LevelledGraph;

const REPEAT: [char; 3] = ['*', '^', '×'];

/// Splits a comma-separated factor list. Bare numbers continue the
/// previous item (`kbip:4,4`), and a trailing `*N`, `^N` or `×N` repeats it.
pub fn split_factor_list(s: &str) -> Result<Vec<String>> {
    let mut items: Vec<String> = Vec::new();
    for tok in s.split(',').map(str::trim) {
        if tok.is_empty() {
            return Err(Error::Parse(format!("empty entry in factor list {s:?}")));
        }
        let head = tok.split(REPEAT).next().unwrap_or(tok).trim();
        if head.chars().all(|c| c.is_ascii_digit()) {
            let last = items.last_mut().ok_or_else(|| Error::Parse(format!("factor list starts with a number: {s:?}")))?;
            last.push(',');
            last.push_str(tok);
        } else {
            items.push(tok.to_string());
        }
    }
    let mut out = Vec::new();
    for item in items {
        match item.rsplit_once(REPEAT) {
            Some((base, count)) => {
                let n: usize = count.trim().parse().map_err(|_| Error::Parse(format!("bad repeat count in {item:?}")))?;
                if n == 0 {
                    return Err(Error::Parse(format!("zero repeat in {item:?}")));
                }
                out.extend(std::iter::repeat(base.trim().to_string()).take(n));
            }
            None => out.push(item),
        }
    }
    Ok(out)
}

/// A generator shorthand, or else a path to a graph JSON file.
pub fn load_factor(src: &str) -> Result<LevelledGraph> {
    match LevelledGraph::from_shorthand(src) {
        Ok(g) => Ok(g),
        Err(e) => {
            if Path::new(src).is_file() {
                LevelledGraph::from_json(&std::fs::read_to_string(src)?)
            } else {
                Err(e)
            }
        }
    }
}

pub fn load_factors(lists: &[String]) -> Result<Vec<LevelledGraph>> {
    let mut out = Vec::new();
    for l in lists {
        for item in split_factor_list(l)? {
            out.push(load_factor(&item)?);
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("no factors given".into()));
    }
    Ok(out)
}

/// One row per line, characters `0` and `1`.
pub fn dense_rows(m: &BitMatrix) -> String {
    m.to_string()
}

pub fn read_alist(path: &Path) -> Result<BitMatrix> {
    crate::code::CssCode::from_alist(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_lists() {
        assert_eq!(split_factor_list("cycle:4,cycle:4").unwrap(), vec!["cycle:4", "cycle:4"]);
        assert_eq!(split_factor_list("kbip:4,4,fig8").unwrap(), vec!["kbip:4,4", "fig8"]);
        assert_eq!(split_factor_list("kbip:4,4*3").unwrap(), vec!["kbip:4,4"; 3]);
        assert_eq!(split_factor_list("kbip:4,4 ×3").unwrap(), vec!["kbip:4,4"; 3]);
        assert_eq!(split_factor_list("fig8^2,cycle:6").unwrap(), vec!["fig8", "fig8", "cycle:6"]);
        assert!(split_factor_list("4,fig8").is_err());
        assert!(split_factor_list("fig8,,fig8").is_err());
        assert!(split_factor_list("fig8*0").is_err());
        assert_eq!(load_factors(&["cycle:4,kbip:2,2".into()]).unwrap().len(), 2);
        assert!(load_factor("no-such-graph").is_err());
    }
}
