//! On-disk cache of reduction bases, one JSON file per level and code version.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use eiscycles::modgroup::LevelContext;
use eiscycles::msym::{build_quotient, RelationBasis, RelationBasisData};
use sha2::{Digest, Sha256};

const FORMAT_TAG: &str = "relation-basis/1";

pub fn version_hash() -> String {
    let mut h = Sha256::new();
    h.update(eiscycles::VERSION.as_bytes());
    h.update(b"\0");
    h.update(FORMAT_TAG.as_bytes());
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn cache_path(dir: &Path, level: u32) -> PathBuf {
    dir.join(format!("basis-N{level}-{}.json", version_hash()))
}

/// Load the basis for `ctx` from `dir` if present and consistent, else build it and
/// write it back. A corrupt or stale entry is rebuilt silently.
pub fn load_or_build(ctx: &LevelContext, dir: Option<&Path>) -> Result<RelationBasis, eiscycles::Error> {
    let Some(dir) = dir else {
        return Ok(build_quotient(ctx));
    };
    let path = cache_path(dir, ctx.level());
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(data) = serde_json::from_str::<RelationBasisData>(&text) {
            if let Some(b) = RelationBasis::from_data(&data, ctx) {
                return Ok(b);
            }
        }
    }
    let basis = build_quotient(ctx);
    store(&path, &basis.to_data(ctx)).map_err(|e| eiscycles::Error::Io(format!("{}: {e}", path.display())))?;
    Ok(basis)
}

fn store(path: &Path, data: &RelationBasisData) -> std::io::Result<()> {
    let dir = path.parent().expect("cache file has a parent");
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    serde_json::to_writer(&mut tmp, data)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_rebuild_on_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = LevelContext::new(5).unwrap();
        let a = load_or_build(&ctx, Some(dir.path())).unwrap();
        let path = cache_path(dir.path(), 5);
        assert!(path.exists());
        let b = load_or_build(&ctx, Some(dir.path())).unwrap();
        assert_eq!(a.dim(), b.dim());
        fs::write(&path, "{not json").unwrap();
        let c = load_or_build(&ctx, Some(dir.path())).unwrap();
        assert_eq!(c.dim(), 11);
        assert!(serde_json::from_str::<RelationBasisData>(&fs::read_to_string(&path).unwrap()).is_ok());
    }

    #[test]
    fn hash_is_stable_hex() {
        let h = version_hash();
        assert_eq!(h.len(), 16);
        assert_eq!(h, version_hash());
    }
}
