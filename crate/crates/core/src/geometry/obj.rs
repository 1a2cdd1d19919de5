use std::io::{BufRead, Write};

use super::QuadMesh;
use crate::{Error, Result};

/// `%.9g`-style formatting: 9 significant digits, trailing zeros trimmed.
fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let fixed = format!("{:.*}", (8 - exp) as usize, x);
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

/// Writes an ASCII OBJ. With `groups`, faces are preceded by `g sheet_<s>`
/// whenever their sheet changes.
pub fn export_obj<W: Write>(m: &QuadMesh, mut out: W, groups: bool) -> Result<()> {
    for p in &m.positions {
        writeln!(out, "v {} {} {}", sig9(p[0]), sig9(p[1]), sig9(p[2]))?;
    }
    let mut current = None;
    for (k, f) in m.faces.iter().enumerate() {
        if groups {
            if let Some(&g) = m.face_groups.get(k) {
                if current != Some(g) {
                    writeln!(out, "g sheet_{g}")?;
                    current = Some(g);
                }
            }
        }
        writeln!(out, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads the vertices and quad faces of an OBJ file. Texture and normal
/// indices are ignored; non-quad faces are rejected.
pub fn read_obj<R: BufRead>(input: R) -> Result<QuadMesh> {
    let mut mesh = QuadMesh::default();
    let mut group = None;
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let mut parts = line.split_whitespace();
        let bad = |what: &str| Error::Argument(format!("line {}: {what}", lineno + 1));
        match parts.next() {
            Some("v") => {
                let coords: Vec<f64> = parts
                    .take(3)
                    .map(|s| s.parse::<f64>().map_err(|_| bad("bad coordinate")))
                    .collect::<Result<_>>()?;
                let p: [f64; 3] = coords.try_into().map_err(|_| bad("vertex needs 3 coordinates"))?;
                mesh.positions.push(p);
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|s| {
                        s.split('/')
                            .next()
                            .and_then(|i| i.parse::<usize>().ok())
                            .filter(|&i| i >= 1)
                            .map(|i| i - 1)
                            .ok_or_else(|| bad("bad face index"))
                    })
                    .collect::<Result<_>>()?;
                let f: [usize; 4] = idx.try_into().map_err(|_| bad("only quad faces are supported"))?;
                mesh.faces.push(f);
                if let Some(g) = group {
                    mesh.face_groups.push(g);
                }
            }
            Some("g") => {
                group = parts
                    .next()
                    .and_then(|g| g.strip_prefix("sheet_"))
                    .and_then(|s| s.parse().ok());
            }
            _ => {}
        }
    }
    if mesh.faces.iter().flatten().any(|&i| i >= mesh.positions.len()) {
        return Err(Error::Argument("face index out of range".into()));
    }
    Ok(mesh)
}
