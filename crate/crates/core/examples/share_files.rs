//! Persist shares in the binary share-file format, lose one, rebuild it from
//! the files of its helpers and check the bytes match.

use std::collections::BTreeMap;

use mdcsr::cli::files::{decode_share_file, encode_share_file, share_path, ConfigFile};

fn main() -> mdcsr::Result<()> {
    let cfg = ConfigFile::parse(r#"{"n":4,"d":3,"l1":0,"l2":1,"p":257,"files":{"2":2,"3":3},"seed":11}"#)?;
    let system = cfg.system()?;
    let dir = std::env::temp_dir().join(format!("mdcsr-share-files-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let messages = BTreeMap::from([(2, vec![5, 6]), (3, vec![7, 8, 9])]);
    for share in system.encode(&messages, cfg.seed)? {
        std::fs::write(share_path(&dir, share.node_id), encode_share_file(&system, &share)?)?;
    }
    let lost = std::fs::read(share_path(&dir, 2))?;
    std::fs::remove_file(share_path(&dir, 2))?;

    let helpers = [1, 3, 4]
        .iter()
        .map(|&i| Ok(decode_share_file(&std::fs::read(share_path(&dir, i))?)?.1))
        .collect::<mdcsr::Result<Vec<_>>>()?;
    let rebuilt = encode_share_file(&system, &system.repair_node(2, &helpers)?)?;
    println!(
        "node_2.mdcs: {} bytes, rebuilt copy identical: {}",
        lost.len(),
        rebuilt == lost
    );
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
