//! Election file formats.
//!
//! The native text format is
//!
//! ```text
//! m n
//! 0,name0
//! ...
//! m-1,name(m-1)
//! ranking of vote 1 (comma-separated indices, most preferred first)
//! ...
//! ranking of vote n
//! ```
//!
//! Lines starting with `#` are comments and are skipped by the reader; the
//! writer uses them to record provenance (seed, config hash).
//!
//! PrefLib strict-order-complete (`.soc`) files are also readable: `#`
//! metadata lines followed by `count: i1,i2,...` lines with 1-based
//! alternative indices.

use std::io::{BufRead, Write};

use crate::election::{default_names, Election, Vote};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_ranking(s: &str, line: usize, one_based: bool) -> Result<Vote> {
    let ranking = s
        .split(',')
        .map(|t| {
            let t = t.trim();
            let i: usize = t
                .parse()
                .map_err(|_| parse_err(line, format!("bad candidate index `{t}`")))?;
            if one_based {
                i.checked_sub(1)
                    .ok_or_else(|| parse_err(line, "PrefLib indices start at 1"))
            } else {
                Ok(i)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Vote::new(ranking).map_err(|e| parse_err(line, e.to_string()))
}

/// Reads an election in the native text format.
pub fn read_election<R: BufRead>(reader: R) -> Result<Election> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => {
                let t = s.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        });

    let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty file"))?;
    let header = header?;
    let mut it = header.split_whitespace();
    let mut num = |what: &str| -> Result<usize> {
        it.next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(ln, format!("header must be `m n`, missing {what}")))
    };
    let m = num("m")?;
    let n = num("n")?;

    let mut names = vec![None; m];
    for _ in 0..m {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(ln, "truncated candidate list"))?;
        let l = l?;
        let (idx, name) = l
            .split_once(',')
            .ok_or_else(|| parse_err(ln, "candidate line must be `index,name`"))?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|_| parse_err(ln, format!("bad candidate index `{idx}`")))?;
        if idx >= m {
            return Err(parse_err(ln, format!("candidate index {idx} >= {m}")));
        }
        if names[idx].replace(name.trim().to_string()).is_some() {
            return Err(parse_err(ln, format!("candidate {idx} declared twice")));
        }
    }
    let names: Vec<String> = names.into_iter().map(|n| n.unwrap()).collect();

    let mut votes = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, "truncated vote list"))?;
        let v = parse_ranking(&l?, ln, false)?;
        if v.len() != m {
            return Err(parse_err(ln, format!("vote ranks {} of {m} candidates", v.len())));
        }
        votes.push(v);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing data after the last vote"));
    }
    Election::new(names, votes).map_err(|e| parse_err(ln, e.to_string()))
}

/// Writes an election in the native text format, preceded by `# ` comment
/// lines for each entry of `comments`.
pub fn write_election<W: Write>(mut w: W, e: &Election, comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{} {}", e.m(), e.n())?;
    for (i, name) in e.names().iter().enumerate() {
        writeln!(w, "{i},{name}")?;
    }
    for v in e.votes() {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

pub fn election_to_string(e: &Election) -> String {
    let mut buf = Vec::new();
    write_election(&mut buf, e, &[]).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 output")
}

/// Reads a PrefLib strict-order-complete file, expanding vote multiplicities.
pub fn read_soc<R: BufRead>(reader: R) -> Result<Election> {
    let mut declared_m: Option<usize> = None;
    let mut names: Vec<(usize, String)> = Vec::new();
    let mut votes = Vec::new();
    let mut last = 0;
    for (i, line) in reader.lines().enumerate() {
        let ln = i + 1;
        last = ln;
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(meta) = t.strip_prefix('#') {
            let meta = meta.trim();
            if let Some((key, value)) = meta.split_once(':') {
                let key = key.trim().to_ascii_uppercase();
                let value = value.trim();
                if key == "NUMBER ALTERNATIVES" {
                    declared_m = Some(
                        value
                            .parse()
                            .map_err(|_| parse_err(ln, "bad NUMBER ALTERNATIVES"))?,
                    );
                } else if let Some(idx) = key.strip_prefix("ALTERNATIVE NAME") {
                    let idx: usize = idx
                        .trim()
                        .parse()
                        .map_err(|_| parse_err(ln, "bad ALTERNATIVE NAME index"))?;
                    let idx = idx
                        .checked_sub(1)
                        .ok_or_else(|| parse_err(ln, "PrefLib indices start at 1"))?;
                    names.push((idx, value.to_string()));
                }
            }
            continue;
        }
        let (count, ranking) = t
            .split_once(':')
            .ok_or_else(|| parse_err(ln, "vote line must be `count: i1,i2,...`"))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| parse_err(ln, format!("bad multiplicity `{count}`")))?;
        let v = parse_ranking(ranking, ln, true)?;
        if let Some(m) = declared_m {
            if v.len() != m {
                return Err(parse_err(ln, format!("vote ranks {} of {m} alternatives", v.len())));
            }
        }
        votes.extend(std::iter::repeat(v).take(count));
    }
    let m = declared_m
        .or_else(|| votes.first().map(Vote::len))
        .ok_or_else(|| parse_err(last, "no votes"))?;
    let mut roster = default_names(m);
    for (idx, name) in names {
        if idx >= m {
            return Err(parse_err(last, format!("alternative {} out of range", idx + 1)));
        }
        roster[idx] = name;
    }
    Election::new(roster, votes).map_err(|e| parse_err(last, e.to_string()))
}
