//! Plain-text instance dumps.
//!
//! ```text
//! # comment
//! jointsc-blp 1
//! edges 6
//! triangles 4
//! c1 3
//! c2 1
//! alpha 0.5
//! h1 0 0.25
//! ...
//! h2 3 1.5
//! tri 0 0 1 3
//! ...
//! ```
//!
//! One line per cost entry (`h1 <edge> <value>`, `h2 <triangle> <value>`) and
//! one per triangle inclusion constraint (`tri <triangle> <e0> <e1> <e2>`).
//! Values are written in shortest round-trip form so a dump reloads exactly.

use std::io::{BufRead, Write};

use super::instance::BlpInstance;
use crate::error::{Error, Result};

const MAGIC: &str = "jointsc-blp";

pub fn write_instance<W: Write>(inst: &BlpInstance, mut out: W) -> Result<()> {
    writeln!(out, "{MAGIC} 1")?;
    writeln!(out, "edges {}", inst.n_edges())?;
    writeln!(out, "triangles {}", inst.n_triangles())?;
    writeln!(out, "c1 {}", inst.c1)?;
    writeln!(out, "c2 {}", inst.c2)?;
    writeln!(out, "alpha {:?}", inst.alpha)?;
    for (e, h) in inst.h1.iter().enumerate() {
        writeln!(out, "h1 {e} {h:?}")?;
    }
    for (t, h) in inst.h2.iter().enumerate() {
        writeln!(out, "h2 {t} {h:?}")?;
    }
    for (t, [a, b, c]) in inst.triangle_edges.iter().enumerate() {
        writeln!(out, "tri {t} {a} {b} {c}")?;
    }
    Ok(())
}

fn malformed(line_no: usize, msg: impl std::fmt::Display) -> Error {
    Error::Malformed(format!("instance line {line_no}: {msg}"))
}

pub fn read_instance<R: BufRead>(input: R) -> Result<BlpInstance> {
    let mut n_edges: Option<usize> = None;
    let mut n_triangles: Option<usize> = None;
    let mut c1 = None;
    let mut c2 = None;
    let mut alpha = None;
    let mut h1: Vec<Option<f64>> = Vec::new();
    let mut h2: Vec<Option<f64>> = Vec::new();
    let mut tri: Vec<Option<[usize; 3]>> = Vec::new();
    let mut saw_magic = false;

    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let fields: Vec<&str> = parts.collect();
        let int = |i: usize| -> Result<usize> {
            fields
                .get(i)
                .ok_or_else(|| malformed(line_no, format!("missing field {i}")))?
                .parse()
                .map_err(|e| malformed(line_no, e))
        };
        let float = |i: usize| -> Result<f64> {
            fields
                .get(i)
                .ok_or_else(|| malformed(line_no, format!("missing field {i}")))?
                .parse()
                .map_err(|e| malformed(line_no, e))
        };
        let expect_fields = |n: usize| -> Result<()> {
            if fields.len() == n {
                Ok(())
            } else {
                Err(malformed(line_no, format!("`{key}` takes {n} fields, got {}", fields.len())))
            }
        };
        match key {
            MAGIC => {
                expect_fields(1)?;
                if int(0)? != 1 {
                    return Err(malformed(line_no, "unsupported format version"));
                }
                saw_magic = true;
            }
            "edges" => {
                expect_fields(1)?;
                let n = int(0)?;
                n_edges = Some(n);
                h1 = vec![None; n];
            }
            "triangles" => {
                expect_fields(1)?;
                let n = int(0)?;
                n_triangles = Some(n);
                h2 = vec![None; n];
                tri = vec![None; n];
            }
            "c1" => {
                expect_fields(1)?;
                c1 = Some(int(0)?);
            }
            "c2" => {
                expect_fields(1)?;
                c2 = Some(int(0)?);
            }
            "alpha" => {
                expect_fields(1)?;
                alpha = Some(float(0)?);
            }
            "h1" | "h2" => {
                expect_fields(2)?;
                let i = int(0)?;
                let slot = if key == "h1" { &mut h1 } else { &mut h2 };
                let cell = slot
                    .get_mut(i)
                    .ok_or_else(|| malformed(line_no, format!("{key} index {i} out of range or size not declared")))?;
                if cell.replace(float(1)?).is_some() {
                    return Err(malformed(line_no, format!("duplicate {key} entry {i}")));
                }
            }
            "tri" => {
                expect_fields(4)?;
                let t = int(0)?;
                let faces = [int(1)?, int(2)?, int(3)?];
                let cell = tri
                    .get_mut(t)
                    .ok_or_else(|| malformed(line_no, format!("triangle {t} out of range or size not declared")))?;
                if cell.replace(faces).is_some() {
                    return Err(malformed(line_no, format!("duplicate tri entry {t}")));
                }
            }
            other => return Err(malformed(line_no, format!("unknown record `{other}`"))),
        }
    }

    if !saw_magic {
        return Err(Error::Malformed(format!("missing `{MAGIC}` header")));
    }
    let missing = |what: &str| Error::Malformed(format!("missing `{what}` record"));
    n_edges.ok_or_else(|| missing("edges"))?;
    n_triangles.ok_or_else(|| missing("triangles"))?;
    let collect = |v: Vec<Option<f64>>, what: &str| -> Result<Vec<f64>> {
        v.into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| Error::Malformed(format!("missing {what} entry {i}"))))
            .collect()
    };
    let inst = BlpInstance {
        h1: collect(h1, "h1")?,
        h2: collect(h2, "h2")?,
        c1: c1.ok_or_else(|| missing("c1"))?,
        c2: c2.ok_or_else(|| missing("c2"))?,
        triangle_edges: tri
            .into_iter()
            .enumerate()
            .map(|(t, x)| x.ok_or_else(|| Error::Malformed(format!("missing tri entry {t}"))))
            .collect::<Result<_>>()?,
        alpha: alpha.ok_or_else(|| missing("alpha"))?,
    };
    inst.validate()?;
    Ok(inst)
}
