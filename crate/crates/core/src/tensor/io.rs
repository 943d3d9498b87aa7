//! Plain-text TT container.
//!
//! ```text
//! # hatt-tt v1
//! # core values listed per core in (left, mode, right) order, right index fastest
//! order 3
//! modes 4 4 4
//! ranks 1 2 2 1
//! core 1
//! <left·mode·right values, whitespace separated>
//! core 2
//! ...
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::cores::TtCore;
use crate::tensor::train::TtTensor;
use crate::Scalar;

const MAGIC: &str = "# hatt-tt v1";

pub fn write_tt<T: Scalar, W: Write>(x: &TtTensor<T>, mut out: W) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(
        out,
        "# core values listed per core in (left, mode, right) order, right index fastest"
    )?;
    writeln!(out, "order {}", x.order())?;
    let modes: Vec<String> = x.shape().dims().iter().map(|n| n.to_string()).collect();
    writeln!(out, "modes {}", modes.join(" "))?;
    let ranks: Vec<String> = x.ranks().as_slice().iter().map(|r| r.to_string()).collect();
    writeln!(out, "ranks {}", ranks.join(" "))?;
    for (k, core) in x.cores().iter().enumerate() {
        writeln!(out, "core {}", k + 1)?;
        let (l, n, r) = core.dims();
        let mut values = Vec::with_capacity(core.num_elements());
        for a in 1..=l {
            for i in 1..=n {
                for b in 1..=r {
                    values.push(core.get(a, i, b).to_string());
                }
            }
        }
        writeln!(out, "{}", values.join(" "))?;
    }
    Ok(())
}

pub fn read_tt<T: Scalar, R: BufRead>(input: R) -> Result<TtTensor<T>> {
    let mut lines = input.lines();
    let mut next_line = || -> Result<String> {
        for line in lines.by_ref() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || (trimmed.starts_with('#') && trimmed != MAGIC) {
                continue;
            }
            return Ok(trimmed.to_string());
        }
        Err(Error::Format("unexpected end of file".into()))
    };
    if next_line()? != MAGIC {
        return Err(Error::Format("missing header line".into()));
    }
    let d = parse_fields::<usize>(&next_line()?, "order")?;
    let d = match d.as_slice() {
        [d] if *d > 0 => *d,
        _ => {
            return Err(Error::Format(
                "order line needs one positive integer".into(),
            ))
        }
    };
    let modes = parse_fields::<usize>(&next_line()?, "modes")?;
    let ranks = parse_fields::<usize>(&next_line()?, "ranks")?;
    if modes.len() != d || ranks.len() != d + 1 {
        return Err(Error::Format(
            "modes/ranks lengths disagree with order".into(),
        ));
    }
    let mut cores = Vec::with_capacity(d);
    for k in 0..d {
        let tag = parse_fields::<usize>(&next_line()?, "core")?;
        if tag != [k + 1] {
            return Err(Error::Format(format!("expected core {}", k + 1)));
        }
        let values: Vec<T> = next_line()?
            .split_whitespace()
            .map(|t| {
                t.parse::<T>()
                    .map_err(|_| Error::Format(format!("bad value {t:?}")))
            })
            .collect::<Result<_>>()?;
        let (l, n, r) = (ranks[k], modes[k], ranks[k + 1]);
        if values.len() != l * n * r {
            return Err(Error::Format(format!(
                "core {} has {} values, expected {}",
                k + 1,
                values.len(),
                l * n * r
            )));
        }
        let core = TtCore::from_fn(l, n, r, |a, i, b| {
            values[((a - 1) * n + (i - 1)) * r + (b - 1)]
        })
        .map_err(|e| Error::Format(e.to_string()))?;
        cores.push(core);
    }
    TtTensor::new(cores).map_err(|e| Error::Format(e.to_string()))
}

pub fn save_tt<T: Scalar>(x: &TtTensor<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_tt(x, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_tt<T: Scalar>(path: impl AsRef<Path>) -> Result<TtTensor<T>> {
    read_tt(BufReader::new(File::open(path)?))
}

fn parse_fields<N: std::str::FromStr>(line: &str, key: &str) -> Result<Vec<N>> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err(Error::Format(format!(
            "expected `{key}` line, found {line:?}"
        )));
    }
    parts
        .map(|t| {
            t.parse::<N>()
                .map_err(|_| Error::Format(format!("bad {key} entry {t:?}")))
        })
        .collect()
}
