use std::path::PathBuf;

use gindex::{Error, GrammarIndex, IndexOptions};

fn golden() -> Vec<u8> {
    std::fs::read(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/e1.gcix")).unwrap()
}

#[test]
fn golden_file_is_current() {
    let fresh = GrammarIndex::build(b"abab", &IndexOptions::default())
        .unwrap()
        .to_bytes();
    assert_eq!(fresh, golden());
}

#[test]
fn layout_is_little_endian() {
    let g = golden();
    assert_eq!(&g[..4], b"GCIX");
    assert_eq!(u16::from_le_bytes([g[4], g[5]]), 1);
    let sections = u16::from_le_bytes([g[6], g[7]]);
    assert_eq!(sections, 7);
    // header section: tag 1, then n = 4 as the first u64 of the payload
    assert_eq!(g[8], 1);
    let len = u64::from_le_bytes(g[9..17].try_into().unwrap()) as usize;
    assert_eq!(u64::from_le_bytes(g[17..25].try_into().unwrap()), 4);
    let payloads: usize = {
        let mut at = 8;
        let mut total = 0;
        for _ in 0..sections {
            let l = u64::from_le_bytes(g[at + 1..at + 9].try_into().unwrap()) as usize;
            total += l;
            at += 9 + l;
        }
        assert_eq!(at + 4, g.len());
        total
    };
    assert!(payloads >= len);
    let crc = u32::from_le_bytes(g[g.len() - 4..].try_into().unwrap());
    let mut h = crc32fast::Hasher::new();
    let mut at = 8;
    for _ in 0..sections {
        let l = u64::from_le_bytes(g[at + 1..at + 9].try_into().unwrap()) as usize;
        h.update(&g[at + 9..at + 9 + l]);
        at += 9 + l;
    }
    assert_eq!(h.finalize(), crc);
}

#[test]
fn golden_answers() {
    let ix = GrammarIndex::from_bytes(&golden()).unwrap();
    assert_eq!(ix.locate(b"ab").unwrap(), vec![0, 2]);
    assert_eq!(ix.locate(b"ba").unwrap(), vec![1]);
    assert_eq!(ix.extract(0, 4).unwrap(), b"abab");
    assert_eq!((ix.g(), ix.g_tree(), ix.sigma()), (4, 4, 2));
}

#[test]
fn corruption_is_reported() {
    let g = golden();
    let mut bad = g.clone();
    bad[0] = b'X';
    assert!(matches!(
        GrammarIndex::from_bytes(&bad),
        Err(Error::Format(_))
    ));
    let mut bad = g.clone();
    bad[4] = 2;
    assert!(matches!(
        GrammarIndex::from_bytes(&bad),
        Err(Error::Version {
            found: 2,
            expected: 1
        })
    ));
    let mut bad = g.clone();
    let last = bad.len() - 5;
    bad[last] ^= 1;
    assert!(matches!(
        GrammarIndex::from_bytes(&bad),
        Err(Error::Checksum { .. })
    ));
    assert!(GrammarIndex::from_bytes(&g[..g.len() - 1]).is_err());
    let mut long = g.clone();
    long.push(0);
    assert!(GrammarIndex::from_bytes(&long).is_err());
}

#[test]
fn optional_sections_round_trip() {
    let t = b"abracadabra abracadabra abracadabra";
    let opts = IndexOptions {
        with_trie: true,
        patricia: Some(4),
        perm_step: 3,
    };
    let ix = GrammarIndex::build(t, &opts).unwrap();
    let dir = std::env::temp_dir().join(format!("gindex-ff-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("a.gcix");
    ix.save_file(&path).unwrap();
    let back = GrammarIndex::load_file(&path).unwrap();
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(back.options(), opts);
    assert_eq!(back.locate(b"abra").unwrap(), ix.locate(b"abra").unwrap());
    assert_eq!(back.stats(), ix.stats());
}
