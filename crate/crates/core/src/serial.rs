//! Binary index file format.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic            4 bytes  "GCIX"
//! format_version   u16
//! section_count    u16
//! sections         section_count x { tag: u8, byte_len: u64, payload }
//! checksum         u32      CRC-32 over the concatenated section payloads
//! ```
//!
//! The first section is always the header (n, g, G_tree, height, raw grammar
//! size, flags, Patricia sample rate, permutation step, alphabet). Rank/select
//! directories are not stored; they are rebuilt on load.

use std::io::Write;

use byteorder::{ByteOrder, LittleEndian};

use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"GCIX";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Default)]
pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, x: u8) {
        self.buf.push(x);
    }

    pub fn u16(&mut self, x: u16) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    pub fn u32(&mut self, x: u32) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    pub fn u64(&mut self, x: u64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    pub fn bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.buf
    }
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Format("unexpected end of data".into()));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(LittleEndian::read_u16(self.take(2)?))
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(LittleEndian::read_u32(self.take(4)?))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(LittleEndian::read_u64(self.take(8)?))
    }

    pub fn bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        self.take(n)
    }

    /// A `u64` length that must fit in `usize`.
    pub fn len_u64(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Format("length overflow".into()))
    }

    /// Rejects element counts that cannot possibly be backed by the remaining bytes.
    pub fn bounded_capacity(&self, count: usize, elem_bytes: usize) -> Result<usize> {
        match count.checked_mul(elem_bytes) {
            Some(b) if b <= self.buf.len() => Ok(count),
            _ => Err(Error::Format(format!(
                "declared {count} elements but only {} bytes remain",
                self.buf.len()
            ))),
        }
    }

    pub fn finish(&self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(Error::Format(format!("{} trailing bytes", self.buf.len())))
        }
    }
}

/// Assembles a file from `(tag, payload)` sections.
pub(crate) fn write_file<W: Write>(out: &mut W, sections: &[(u8, Vec<u8>)]) -> Result<()> {
    let mut crc = crc32fast::Hasher::new();
    out.write_all(MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&(sections.len() as u16).to_le_bytes())?;
    for (tag, payload) in sections {
        out.write_all(&[*tag])?;
        out.write_all(&(payload.len() as u64).to_le_bytes())?;
        out.write_all(payload)?;
        crc.update(payload);
    }
    out.write_all(&crc.finalize().to_le_bytes())?;
    Ok(())
}

/// Splits a file into sections after checking magic, version and checksum.
pub(crate) fn read_file(data: &[u8]) -> Result<Vec<(u8, &[u8])>> {
    let mut r = Reader::new(data);
    if r.bytes(4)
        .map_err(|_| Error::Format("file too short".into()))?
        != MAGIC
    {
        return Err(Error::Format("bad magic (not an index file)".into()));
    }
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(Error::Version {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let count = r.u16()? as usize;
    let mut crc = crc32fast::Hasher::new();
    let mut sections = Vec::with_capacity(count);
    for _ in 0..count {
        let tag = r.u8()?;
        let len = r.len_u64()?;
        let payload = r.bytes(len)?;
        crc.update(payload);
        sections.push((tag, payload));
    }
    let stored = r.u32()?;
    r.finish()?;
    let computed = crc.finalize();
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }
    Ok(sections)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_round_trip_and_detect_corruption() {
        let mut buf = Vec::new();
        write_file(&mut buf, &[(1, vec![1, 2, 3]), (7, vec![])]).unwrap();
        let secs = read_file(&buf).unwrap();
        assert_eq!(secs, vec![(1u8, &[1u8, 2, 3][..]), (7u8, &[][..])]);

        let mut bad = buf.clone();
        bad[4 + 2 + 2 + 1 + 8] ^= 0xff;
        assert!(matches!(read_file(&bad), Err(Error::Checksum { .. })));

        let mut old = buf.clone();
        old[4] = 0;
        old[5] = 0;
        assert!(matches!(
            read_file(&old),
            Err(Error::Version { found: 0, .. })
        ));

        assert!(matches!(read_file(b"XXXX"), Err(Error::Format(_))));
    }
}
