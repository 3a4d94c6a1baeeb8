//! On-disk relation cache.
//!
//! One file per maximal order, named by its fingerprint. The file holds the
//! factor-base bound, the search budget, the saturation record and every
//! relation with its witness. Nothing is trusted on load: each relation is
//! refactored, the Smith form is recomputed, and any mismatch is treated as
//! a cache miss.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::numfield::MaximalOrder;

use super::relations::{verify, Relation, RelationMatrix, SearchBudget};
use super::{dense, relation_snf, ClassGroupData, FactorBase, Saturation};

const MAGIC: &str = "s3tower-classgroup 1";

pub fn cache_path(dir: &Path, order: &MaximalOrder) -> PathBuf {
    dir.join(format!("{}.cg", order.fingerprint()))
}

fn encode_relation(tag: &str, r: &Relation) -> String {
    let e: Vec<String> = r.exponents.iter().map(|(i, x)| format!("{i}:{x}")).collect();
    let w: Vec<String> = r.witness.iter().map(|x| x.to_string()).collect();
    format!("{tag} {} | {}", e.join(","), w.join(" "))
}

fn decode_relation(body: &str) -> Option<Relation> {
    let (e, w) = body.split_once(" | ")?;
    let mut exponents = Vec::new();
    for t in e.split(',').filter(|t| !t.is_empty()) {
        let (i, x) = t.split_once(':')?;
        exponents.push((i.parse().ok()?, x.parse().ok()?));
    }
    let witness = w.split_whitespace().map(|x| x.parse::<BigInt>().ok()).collect::<Option<Vec<_>>>()?;
    Some(Relation { exponents, witness })
}

fn render(cg: &ClassGroupData) -> Result<String> {
    let mut s = String::new();
    s.push_str(MAGIC);
    s.push('\n');
    s.push_str(&format!("fingerprint {}\n", cg.order().fingerprint()));
    s.push_str(&format!("bound {}\n", cg.factor_base.bound));
    s.push_str(&format!("primes {}\n", cg.factor_base.len()));
    s.push_str(&format!("core {}\n", cg.relations.core));
    s.push_str(&format!("budget {}\n", json(cg.budget())?));
    s.push_str(&format!("status {}\n", json(&cg.status)?));
    for r in &cg.relations.core_rows {
        s.push_str(&encode_relation("rel", r));
        s.push('\n');
    }
    for r in &cg.relations.eliminations {
        s.push_str(&encode_relation("elim", r));
        s.push('\n');
    }
    s.push_str("end\n");
    Ok(s)
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Cache(e.to_string()))
}

/// Writes the cache entry atomically (temporary file, then rename).
pub fn store_cached(dir: &Path, cg: &ClassGroupData) -> Result<()> {
    if matches!(cg.status, Saturation::Trivial) {
        return Ok(());
    }
    fs::create_dir_all(dir)?;
    let path = cache_path(dir, cg.order());
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(render(cg)?.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(())
}

/// Loads and re-verifies a cache entry. Returns `Ok(None)` when there is no
/// entry and `Err(Error::Cache)` when the entry is unusable.
pub fn load_cached(dir: &Path, order: &Arc<MaximalOrder>, fb: &FactorBase) -> Result<Option<ClassGroupData>> {
    let path = cache_path(dir, order);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let bad = |what: &str| Error::Cache(format!("{}: {what}", path.display()));
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(bad("unknown format"));
    }
    let mut field = |key: &str| -> Result<String> {
        let line = lines.next().ok_or_else(|| bad("truncated"))?;
        line.strip_prefix(key).and_then(|r| r.strip_prefix(' ')).map(str::to_string).ok_or_else(|| bad(key))
    };
    if field("fingerprint")? != order.fingerprint() {
        return Err(bad("fingerprint mismatch"));
    }
    if field("bound")? != fb.bound.to_string() {
        return Err(bad("factor-base bound mismatch"));
    }
    if field("primes")?.parse::<usize>().ok() != Some(fb.len()) {
        return Err(bad("factor-base size mismatch"));
    }
    let core: usize = field("core")?.parse().map_err(|_| bad("core"))?;
    let budget: SearchBudget = serde_json::from_str(&field("budget")?).map_err(|_| bad("budget"))?;
    let status: Saturation = serde_json::from_str(&field("status")?).map_err(|_| bad("status"))?;
    if core == 0 || core > fb.len() {
        return Err(bad("core size"));
    }
    let mut core_rows = Vec::new();
    let mut eliminations = Vec::new();
    let mut ended = false;
    for line in lines {
        if line == "end" {
            ended = true;
            break;
        }
        let (tag, body) = line.split_once(' ').ok_or_else(|| bad("malformed line"))?;
        let r = decode_relation(body).ok_or_else(|| bad("malformed relation"))?;
        match tag {
            "rel" => core_rows.push(r),
            "elim" => eliminations.push(r),
            _ => return Err(bad("unknown record")),
        }
    }
    if !ended {
        return Err(bad("truncated"));
    }
    if eliminations.len() != fb.len() - core {
        return Err(bad("elimination count"));
    }
    for r in &core_rows {
        if !verify(order, fb, r, core) {
            return Err(bad("core relation fails verification"));
        }
    }
    for (i, r) in eliminations.iter().enumerate() {
        let k = core + i;
        if r.exponents.last() != Some(&(k, 1)) || !verify(order, fb, r, k + 1) {
            return Err(bad("eliminating relation fails verification"));
        }
    }
    let rows = core_rows.iter().map(|r| (r.exponents.clone(), r.witness.clone())).collect();
    let snf = relation_snf(&dense(&rows, core), core).ok_or_else(|| bad("relations do not have full rank"))?;
    if let Saturation::Stabilized { history, .. } = &status {
        if history.last() != Some(&snf.divisors) {
            return Err(bad("recorded Smith form differs from recomputed one"));
        }
    }
    let relations = RelationMatrix { core, core_rows, eliminations };
    Ok(Some(ClassGroupData::assemble(order.clone(), fb.clone(), relations, Some(snf), status, budget)))
}
