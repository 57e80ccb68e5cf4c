//! Plain-text potential files: `# key=value` header lines, then one sample per line.

use std::io::{BufRead, Write};
use std::path::Path;

use super::grid::GridSpec;
use super::potential::Potential;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn write_potential<T: Real, W: Write>(p: &Potential<T>, mut out: W) -> Result<()> {
    let g = p.grid();
    writeln!(out, "# dim={}", g.dim())?;
    writeln!(out, "# L={:.16e}", g.half_width())?;
    writeln!(out, "# N={}", g.points())?;
    writeln!(out, "# R={:.16e}", p.support_radius())?;
    for v in p.values() {
        writeln!(out, "{:.16e}", v.f64())?;
    }
    Ok(())
}

pub fn read_potential<T: Real, R: BufRead>(input: R) -> Result<Potential<T>> {
    let (mut dim, mut half, mut n, mut radius) = (None, None, None, None);
    let mut values = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Format(format!("line {}: {what}: '{line}'", lineno + 1));
        if let Some(rest) = line.strip_prefix('#') {
            let Some((key, val)) = rest.split_once('=') else { continue };
            let val = val.trim();
            match key.trim() {
                "dim" => dim = Some(val.parse::<usize>().map_err(|_| bad("bad dim"))?),
                "L" => half = Some(val.parse::<f64>().map_err(|_| bad("bad L"))?),
                "N" => n = Some(val.parse::<usize>().map_err(|_| bad("bad N"))?),
                "R" => radius = Some(val.parse::<f64>().map_err(|_| bad("bad R"))?),
                _ => {}
            }
            continue;
        }
        let v: f64 = line.parse().map_err(|_| bad("not a number"))?;
        values.push(T::lit(v));
    }
    let missing = |k: &str| Error::Format(format!("missing header '# {k}='"));
    let grid = GridSpec::new(dim.ok_or_else(|| missing("dim"))?, half.ok_or_else(|| missing("L"))?, n.ok_or_else(|| missing("N"))?)?;
    Potential::from_values(grid, values, radius.ok_or_else(|| missing("R"))?)
}

pub fn save_potential<T: Real>(p: &Potential<T>, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_potential(p, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_potential<T: Real>(path: &Path) -> Result<Potential<T>> {
    let file = std::fs::File::open(path)?;
    read_potential(std::io::BufReader::new(file))
}
