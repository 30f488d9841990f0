use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::json;
use twmatch_core::decomp::write_td;
use twmatch_core::oracle::Cell;
use twmatch_core::reduction::build_reduction;
use twmatch_core::write_gr;

use crate::report::SCHEMA_VERSION;

/// Parses `"(1,1) (2,2); (1,2)"` into one cell list per set. Empty
/// segments between semicolons are ignored, so `""` is the empty family.
pub fn parse_sets(spec: &str) -> Result<Vec<Vec<Cell>>> {
    spec.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_set)
        .collect()
}

fn parse_set(text: &str) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let Some(body) = rest.strip_prefix('(') else {
            bail!("expected `(` at `{rest}`");
        };
        let Some((inner, tail)) = body.split_once(')') else {
            bail!("unclosed cell in `{text}`");
        };
        let Some((r, c)) = inner.split_once(',') else {
            bail!("cell `({inner})` needs a row and a column");
        };
        let num = |s: &str| {
            s.trim()
                .parse::<usize>()
                .with_context(|| format!("`{}` is not a positive integer", s.trim()))
        };
        cells.push((num(r)?, num(c)?));
        rest = tail.trim_start_matches(|ch: char| ch == ',' || ch.is_whitespace());
    }
    Ok(cells)
}

pub fn hitting_set(k: usize, spec: &str, dir: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let sets = parse_sets(spec)?;
    let inst = build_reduction(k, &sets)?;
    let gr = write_gr(&inst.graph);
    let td = write_td(&inst.path_decomposition, inst.graph.n());
    let sidecar = inst.sidecar();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "n": inst.graph.n(),
        "m": inst.graph.m(),
        "ell": inst.ell,
        "c": inst.c,
        "pathwidth": inst.path_decomposition.width(),
    });
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let write = |name: &str, text: &str| {
                let p = dir.join(name);
                fs::write(&p, text).with_context(|| format!("writing {}", p.display()))
            };
            write("instance.gr", &gr)?;
            write("instance.td", &td)?;
            write("instance.json", &serde_json::to_string_pretty(&sidecar)?)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
        }
        None => {
            let mut all = summary;
            all["sidecar"] = serde_json::to_value(&sidecar)?;
            all["graph"] = gr.into();
            all["td"] = td.into();
            writeln!(out, "{}", serde_json::to_string_pretty(&all)?)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_specs() {
        assert_eq!(parse_sets("(1,1)").unwrap(), vec![vec![(1, 1)]]);
        assert_eq!(
            parse_sets(" (1,1) (2, 2); (1,2),(2,1) ;").unwrap(),
            vec![vec![(1, 1), (2, 2)], vec![(1, 2), (2, 1)]]
        );
        assert!(parse_sets("").unwrap().is_empty());
        assert!(parse_sets("(1;1)").is_err());
        assert!(parse_sets("(1,x)").is_err());
        assert!(parse_sets("1,1").is_err());
        assert!(parse_sets("(1,1").is_err());
    }
}
