//! Text checkpoint of a [`FactorModel`]:
//!
//! ```text
//! ctar-factor-model 1
//! dim <d>
//! global <g>
//! users <n>
//! <id> <bias> <v_1> … <v_d>      (n lines)
//! tags <n>
//! <id> <bias> <v_1> … <v_d>      (n lines)
//! ```
//!
//! Floats use Rust's shortest round-trip formatting, so save then load
//! reproduces every parameter bit for bit.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::mf::FactorModel;
use super::BaselineError;

const MAGIC: &str = "ctar-factor-model 1";

pub fn write_model(model: &FactorModel, mut w: impl Write) -> Result<(), BaselineError> {
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "dim {}", model.dim)?;
    writeln!(w, "global {}", model.global_bias)?;
    let d = model.dim;
    for (name, ids, bias, vecs) in [
        ("users", &model.user_ids, &model.user_bias, &model.user_vecs),
        ("tags", &model.tag_ids, &model.tag_bias, &model.tag_vecs),
    ] {
        writeln!(w, "{name} {}", ids.len())?;
        for (i, id) in ids.iter().enumerate() {
            write!(w, "{id} {}", bias[i])?;
            for x in &vecs[i * d..(i + 1) * d] {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
    }
    Ok(())
}

pub fn save_model(model: &FactorModel, path: impl AsRef<Path>) -> Result<(), BaselineError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_model(model, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Ids, biases and flattened vectors of one section.
type Rows = (Vec<u32>, Vec<f64>, Vec<f64>);

struct Lines<R> {
    inner: std::io::Lines<BufReader<R>>,
    line: usize,
}

impl<R: Read> Lines<R> {
    fn err(&self, message: impl Into<String>) -> BaselineError {
        BaselineError::Checkpoint {
            line: self.line,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<String, BaselineError> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => Ok(l?),
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn keyed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, BaselineError> {
        let l = self.next()?;
        l.strip_prefix(key)
            .and_then(|v| v.strip_prefix(' '))
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| self.err(format!("expected `{key} <value>`")))
    }

    fn rows(&mut self, key: &str, d: usize) -> Result<Rows, BaselineError> {
        let n: usize = self.keyed(key)?;
        let (mut ids, mut bias, mut vecs) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n * d));
        for _ in 0..n {
            let l = self.next()?;
            let fields: Vec<&str> = l.split_ascii_whitespace().collect();
            if fields.len() != d + 2 {
                return Err(self.err(format!("expected {} fields, found {}", d + 2, fields.len())));
            }
            let id: u32 = fields[0].parse().map_err(|_| self.err("bad id"))?;
            if ids.last().is_some_and(|&last| last >= id) {
                return Err(self.err("ids must be strictly increasing"));
            }
            ids.push(id);
            let nums = fields[1..]
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| self.err(e.to_string()))?;
            bias.push(nums[0]);
            vecs.extend(&nums[1..]);
        }
        Ok((ids, bias, vecs))
    }
}

pub fn read_model(r: impl Read) -> Result<FactorModel, BaselineError> {
    let mut lines = Lines {
        inner: BufReader::new(r).lines(),
        line: 0,
    };
    if lines.next()?.trim() != MAGIC {
        return Err(lines.err(format!("expected `{MAGIC}`")));
    }
    let dim: usize = lines.keyed("dim")?;
    let global_bias: f64 = lines.keyed("global")?;
    let (user_ids, user_bias, user_vecs) = lines.rows("users", dim)?;
    let (tag_ids, tag_bias, tag_vecs) = lines.rows("tags", dim)?;
    Ok(FactorModel {
        dim,
        global_bias,
        user_ids,
        user_bias,
        user_vecs,
        tag_ids,
        tag_bias,
        tag_vecs,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<FactorModel, BaselineError> {
    read_model(std::fs::File::open(path)?)
}
