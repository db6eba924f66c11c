//! Regenerates the bundled desk corpora under `data/`.
//!
//! cargo run --example gen_corpora

use std::fs;
use std::path::Path;

use rdf_summarize::synthetic;

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    fs::create_dir_all(&dir)?;
    let corpora = [
        ("lubm_like.nt", synthetic::lubm_like(120, 7)),
        ("semanticdb_like.nt", synthetic::semanticdb_like(60, 11)),
        ("dbpedia_like.nt", synthetic::dbpedia_like(150, 13)),
        ("planted3.nt", synthetic::planted_types(3, 20, 17)),
    ];
    for (name, text) in corpora {
        println!("{name}: {} triples", text.lines().count());
        fs::write(dir.join(name), text)?;
    }
    Ok(())
}
