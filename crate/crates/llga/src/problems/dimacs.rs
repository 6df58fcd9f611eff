//! Instance persistence in DIMACS-CNF with metadata comments.
//!
//! Layout: `c seed <u64>` and `c planted <bitstring>` comments, then the
//! `p cnf <n> <m>` header, then one zero-terminated clause of 1-based signed
//! literals per line. Reading verifies every structural invariant, including
//! that the planted assignment satisfies all clauses, so a file is either
//! rejected with a line-numbered reason or yields a valid instance.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problems::sat::{Clause, Formula, PlantedInstance};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub fn write_instance(path: impl AsRef<Path>, instance: &PlantedInstance) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    write_instance_to(&mut w, instance)?;
    w.flush()?;
    Ok(())
}

pub fn write_instance_to(w: &mut impl Write, instance: &PlantedInstance) -> Result<()> {
    writeln!(w, "c seed {}", instance.seed())?;
    writeln!(w, "c planted {}", instance.planted())?;
    writeln!(w, "p cnf {} {}", instance.n(), instance.m())?;
    for c in instance.formula().clauses() {
        let vars = c.vars();
        let signs = c.signs();
        for i in 0..3 {
            let lit = (vars[i] + 1) as i64 * if signs[i] { 1 } else { -1 };
            write!(w, "{lit} ")?;
        }
        writeln!(w, "0")?;
    }
    Ok(())
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<PlantedInstance> {
    let origin = path.as_ref().display().to_string();
    let file = File::open(path.as_ref())?;
    read_instance_from(BufReader::new(file), &origin)
}

pub fn read_instance_from(r: impl BufRead, origin: &str) -> Result<PlantedInstance> {
    let fail = |line: usize, message: String| Error::Dimacs {
        path: origin.to_string(),
        line,
        message,
    };

    let mut seed: Option<u64> = None;
    let mut planted: Option<BitString> = None;
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut pending: Vec<i64> = Vec::new();
    let mut line_no = 0usize;

    for line in r.lines() {
        line_no += 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('c') {
            if header.is_some() {
                return Err(fail(line_no, "comment after header".into()));
            }
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("seed ") {
                let value = v
                    .trim()
                    .parse::<u64>()
                    .map_err(|e| fail(line_no, format!("bad seed: {e}")))?;
                if seed.replace(value).is_some() {
                    return Err(fail(line_no, "duplicate seed comment".into()));
                }
            } else if let Some(v) = comment.strip_prefix("planted ") {
                let bits = BitString::parse(v.trim())
                    .map_err(|e| fail(line_no, format!("bad planted assignment: {e}")))?;
                if planted.replace(bits).is_some() {
                    return Err(fail(line_no, "duplicate planted comment".into()));
                }
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("p ") {
            if header.is_some() {
                return Err(fail(line_no, "duplicate header".into()));
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(fail(line_no, format!("malformed header {trimmed:?}")));
            }
            let n = fields[1]
                .parse::<usize>()
                .map_err(|e| fail(line_no, format!("bad variable count: {e}")))?;
            let m = fields[2]
                .parse::<usize>()
                .map_err(|e| fail(line_no, format!("bad clause count: {e}")))?;
            header = Some((n, m));
            continue;
        }
        let (n, m) = header.ok_or_else(|| fail(line_no, "clause before header".into()))?;
        for token in trimmed.split_whitespace() {
            let lit = token
                .parse::<i64>()
                .map_err(|e| fail(line_no, format!("bad literal {token:?}: {e}")))?;
            if lit == 0 {
                if pending.len() != 3 {
                    return Err(fail(
                        line_no,
                        format!("clause has {} literals, expected 3", pending.len()),
                    ));
                }
                if clauses.len() == m {
                    return Err(fail(line_no, format!("more than {m} clauses")));
                }
                let mut vars = [0u32; 3];
                let mut signs = [false; 3];
                for (i, &l) in pending.iter().enumerate() {
                    let v = l.unsigned_abs();
                    if v as usize > n {
                        return Err(fail(
                            line_no,
                            format!("literal {l} outside variable range 1..={n}"),
                        ));
                    }
                    vars[i] = (v - 1) as u32;
                    signs[i] = l > 0;
                }
                let clause = Clause::new(vars, signs)
                    .map_err(|e| fail(line_no, format!("invalid clause: {e}")))?;
                clauses.push(clause);
                pending.clear();
            } else {
                pending.push(lit);
            }
        }
    }

    let (n, m) = header.ok_or_else(|| fail(line_no, "missing header".into()))?;
    if !pending.is_empty() {
        return Err(fail(line_no, "unterminated clause at end of file".into()));
    }
    if clauses.len() != m {
        return Err(fail(
            line_no,
            format!("expected {m} clauses, found {}", clauses.len()),
        ));
    }
    let seed = seed.ok_or_else(|| fail(line_no, "missing seed comment".into()))?;
    let planted = planted.ok_or_else(|| fail(line_no, "missing planted comment".into()))?;
    if planted.len() != n {
        return Err(fail(
            line_no,
            format!("planted assignment has {} bits, expected {n}", planted.len()),
        ));
    }
    let formula = Formula::new(n, clauses)
        .map_err(|e| fail(line_no, format!("invalid formula: {e}")))?;
    PlantedInstance::from_parts(formula, planted, seed)
}
