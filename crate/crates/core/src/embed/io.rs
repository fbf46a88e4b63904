//! Text exchange format for embeddings:
//!
//! ```text
//! WSE<TAB>1<TAB><d>
//! USERS<TAB><count>
//! <user_id><TAB>v1<TAB>...<TAB>vd
//! ITEMS<TAB><count>
//! <item_id><TAB>v1<TAB>...<TAB>vd
//! ```
//!
//! Rows are keyed by external id, so their order need not match the id maps.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::embedding::{DenseMatrix, EmbeddingPair};
use crate::error::{Error, Result};
use crate::interactions::IdMap;

const MAGIC: &str = "WSE";
const VERSION: &str = "1";

pub fn write_embeddings<W: Write>(
    e: &EmbeddingPair,
    user_map: &IdMap,
    item_map: &IdMap,
    mut w: W,
) -> std::io::Result<()> {
    assert_eq!(e.n_users(), user_map.len(), "user factors must match the user map");
    assert_eq!(e.n_items(), item_map.len(), "item factors must match the item map");
    writeln!(w, "{MAGIC}\t{VERSION}\t{}", e.dim())?;
    for (label, map, m) in [("USERS", user_map, e.users()), ("ITEMS", item_map, e.items())] {
        writeln!(w, "{label}\t{}", map.len())?;
        for (id, row) in map.ids().iter().zip(m.iter_rows()) {
            w.write_all(id.as_bytes())?;
            for v in row {
                // 17 significant digits round-trips every f64
                write!(w, "\t{v:.16e}")?;
            }
            writeln!(w)?;
        }
    }
    w.flush()
}

pub fn export_embeddings(e: &EmbeddingPair, user_map: &IdMap, item_map: &IdMap, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|err| Error::io(path, err))?;
    write_embeddings(e, user_map, item_map, BufWriter::new(file)).map_err(|err| Error::io(path, err))
}

pub fn import_embeddings(path: &Path, user_map: &IdMap, item_map: &IdMap) -> Result<EmbeddingPair> {
    let file = File::open(path).map_err(|err| Error::io(path, err))?;
    let mut e = read_embeddings(BufReader::new(file), user_map, item_map)?;
    e = {
        let (p, q, _) = e.into_parts();
        EmbeddingPair::new(p, q, format!("import {}", path.display()))?
    };
    Ok(e)
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<Option<String>> {
        match self.inner.next() {
            None => Ok(None),
            Some(line) => {
                self.number += 1;
                line.map(Some).map_err(|e| self.err(e.to_string()))
            }
        }
    }

    fn expect_line(&mut self, what: &str) -> Result<String> {
        self.next_line()?
            .ok_or_else(|| self.err(format!("unexpected end of file, expected {what}")))
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::EmbeddingFormat {
            line: self.number,
            message: message.into(),
        }
    }
}

pub fn read_embeddings<R: BufRead>(reader: R, user_map: &IdMap, item_map: &IdMap) -> Result<EmbeddingPair> {
    let mut lines = Lines {
        inner: reader.lines(),
        number: 0,
    };
    let header = lines.expect_line("header")?;
    let fields: Vec<&str> = header.split('\t').collect();
    if fields.len() != 3 || fields[0] != MAGIC || fields[1] != VERSION {
        return Err(lines.err(format!("bad header {header:?}")));
    }
    let dim: usize = fields[2]
        .parse()
        .map_err(|_| lines.err(format!("bad dimension {:?}", fields[2])))?;

    let users = read_section(&mut lines, "USERS", "user", dim, user_map)?;
    let items = read_section(&mut lines, "ITEMS", "item", dim, item_map)?;
    EmbeddingPair::new(users, items, "import")
}

fn read_section<R: BufRead>(
    lines: &mut Lines<R>,
    label: &str,
    kind: &'static str,
    dim: usize,
    map: &IdMap,
) -> Result<DenseMatrix> {
    let head = lines.expect_line(label)?;
    let count: usize = head
        .strip_prefix(label)
        .and_then(|rest| rest.strip_prefix('\t'))
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| lines.err(format!("expected \"{label}<TAB><count>\", found {head:?}")))?;

    let mut out = DenseMatrix::zeros(map.len(), dim);
    let mut seen: HashMap<String, ()> = HashMap::with_capacity(count);
    let mut filled = vec![false; map.len()];
    for _ in 0..count {
        let line = lines.expect_line(&format!("{label} row"))?;
        let mut fields = line.split('\t');
        let id = fields.next().unwrap_or_default();
        if seen.insert(id.to_owned(), ()).is_some() {
            return Err(Error::DuplicateId {
                kind,
                id: id.to_owned(),
            });
        }
        let values: Vec<&str> = fields.collect();
        if values.len() != dim {
            return Err(lines.err(format!(
                "{kind} {id:?} has {} values, header declares {dim}",
                values.len()
            )));
        }
        let Some(idx) = map.index_of(id) else {
            log::debug!("ignoring {kind} {id:?} absent from the id map");
            continue;
        };
        let row = out.row_mut(idx);
        for (slot, v) in row.iter_mut().zip(values) {
            let v: f64 = v
                .parse()
                .map_err(|_| lines.err(format!("{kind} {id:?}: bad number {v:?}")))?;
            if !v.is_finite() {
                return Err(lines.err(format!("{kind} {id:?}: non-finite value")));
            }
            *slot = v;
        }
        filled[idx] = true;
    }
    if let Some(missing) = filled.iter().position(|f| !f) {
        return Err(Error::MissingId {
            kind,
            id: map.id(missing).to_owned(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn maps() -> (IdMap, IdMap) {
        (
            IdMap::from_ids(["u1", "u2", "u3"], "user").unwrap(),
            IdMap::from_ids(["a", "b", "c"], "item").unwrap(),
        )
    }

    fn random_pair() -> EmbeddingPair {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let p = DenseMatrix::from_fn(3, 2, |_, _| rng.gen_range(-5.0..5.0));
        let q = DenseMatrix::from_fn(3, 2, |_, _| rng.gen_range(-1e-7..1e7));
        EmbeddingPair::new(p, q, "test").unwrap()
    }

    fn text(e: &EmbeddingPair, u: &IdMap, i: &IdMap) -> String {
        let mut buf = Vec::new();
        write_embeddings(e, u, i, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn round_trip() {
        let (u, i) = maps();
        let e = random_pair();
        let s = text(&e, &u, &i);
        assert!(s.starts_with("WSE\t1\t2\nUSERS\t3\nu1\t"));
        let back = read_embeddings(s.as_bytes(), &u, &i).unwrap();
        let max = e
            .users()
            .as_slice()
            .iter()
            .chain(e.items().as_slice())
            .zip(back.users().as_slice().iter().chain(back.items().as_slice()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max <= 1e-12, "{max}");
    }

    #[test]
    fn order_independent() {
        let (u, i) = maps();
        let s = "WSE\t1\t1\nUSERS\t3\nu3\t3\nu1\t1\nu2\t2\nITEMS\t4\nzz\t9\nc\t-3\nb\t-2\na\t-1\n";
        let e = read_embeddings(s.as_bytes(), &u, &i).unwrap();
        assert_eq!(e.users().as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(e.items().as_slice(), &[-1.0, -2.0, -3.0]);
    }

    #[test]
    fn errors() {
        let (u, i) = maps();
        let s = text(&random_pair(), &u, &i);

        let missing: String = s.lines().filter(|l| !l.starts_with("b\t")).map(|l| {
            if l == "ITEMS\t3" { "ITEMS\t2\n".to_owned() } else { format!("{l}\n") }
        }).collect();
        let err = read_embeddings(missing.as_bytes(), &u, &i).unwrap_err();
        assert!(matches!(err, Error::MissingId { kind: "item", ref id } if id == "b"), "{err}");

        let dup = s.replacen("u2\t", "u1\t", 1);
        assert!(matches!(read_embeddings(dup.as_bytes(), &u, &i), Err(Error::DuplicateId { .. })));

        let bad_dim = s.replacen("WSE\t1\t2", "WSE\t1\t3", 1);
        assert!(matches!(read_embeddings(bad_dim.as_bytes(), &u, &i), Err(Error::EmbeddingFormat { line: 3, .. })));

        let nan = "WSE\t1\t1\nUSERS\t3\nu1\tNaN\nu2\t1\nu3\t1\nITEMS\t0\n";
        assert!(matches!(read_embeddings(nan.as_bytes(), &u, &i), Err(Error::EmbeddingFormat { line: 3, .. })));

        assert!(read_embeddings("WSX\t1\t2\n".as_bytes(), &u, &i).is_err());
    }
}
