//! Program installation: ELF32 executables (from this toolchain or an
//! external one) and raw flat binaries, copied into a [`LimMemory`]
//! without touching cell states or access counters.

use crate::elf::{
    ELFCLASS32, ELFDATA2LSB, ELF_MAGIC, EM_RISCV, ET_EXEC, PF_X, PT_LOAD,
};
use crate::mem::LimMemory;

/// Where a loaded program starts and what was written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedProgram {
    pub entry: u32,
    /// (vaddr, length in bytes) for each segment installed.
    pub segments: Vec<(u32, u32)>,
    /// Top-of-memory stack pointer, 16-byte aligned.
    pub initial_sp: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error("not an ELF file (bad magic)")]
    BadMagic,
    #[error("not a 32-bit ELF")]
    Not32Bit,
    #[error("not a little-endian ELF")]
    NotLittleEndian,
    #[error("not a RISC-V ELF")]
    NotRiscv,
    #[error("not an executable (ET_EXEC) ELF")]
    NotExecutable,
    #[error("file is truncated or malformed")]
    Truncated,
    #[error("segment at 0x{vaddr:08x} (+{size} bytes) does not fit in memory")]
    SegmentOutOfBounds { vaddr: u32, size: u32 },
    #[error("entry point 0x{entry:08x} is outside every executable segment")]
    EntryOutsideSegment { entry: u32 },
}

fn read_u16(bytes: &[u8], at: usize) -> Result<u16, LoadError> {
    bytes
        .get(at..at + 2)
        .map(|b| u16::from_le_bytes(b.try_into().unwrap()))
        .ok_or(LoadError::Truncated)
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32, LoadError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
        .ok_or(LoadError::Truncated)
}

fn initial_sp(mem: &LimMemory) -> u32 {
    (mem.size_bytes() - 16) & !0xf
}

/// One PT_LOAD segment pulled out of an ELF image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElfSegment {
    pub vaddr: u32,
    pub executable: bool,
    pub data: Vec<u8>,
    /// In-memory size; any tail beyond `data.len()` is zero-filled.
    pub memsz: u32,
}

/// Validates the ELF32 header and extracts entry and PT_LOAD segments.
pub fn parse_elf(bytes: &[u8]) -> Result<(u32, Vec<ElfSegment>), LoadError> {
    if bytes.len() < 4 || bytes[0..4] != ELF_MAGIC {
        return Err(LoadError::BadMagic);
    }
    if bytes.len() < 52 {
        return Err(LoadError::Truncated);
    }
    if bytes[4] != ELFCLASS32 {
        return Err(LoadError::Not32Bit);
    }
    if bytes[5] != ELFDATA2LSB {
        return Err(LoadError::NotLittleEndian);
    }
    if read_u16(bytes, 18)? != EM_RISCV {
        return Err(LoadError::NotRiscv);
    }
    if read_u16(bytes, 16)? != ET_EXEC {
        return Err(LoadError::NotExecutable);
    }

    let entry = read_u32(bytes, 24)?;
    let phoff = read_u32(bytes, 28)? as usize;
    let phentsize = read_u16(bytes, 42)? as usize;
    let phnum = read_u16(bytes, 44)? as usize;
    if phentsize < 32 {
        return Err(LoadError::Truncated);
    }

    let mut segments = Vec::new();
    for i in 0..phnum {
        let at = phoff + i * phentsize;
        if read_u32(bytes, at)? != PT_LOAD {
            continue;
        }
        let offset = read_u32(bytes, at + 4)? as usize;
        let vaddr = read_u32(bytes, at + 8)?;
        let filesz = read_u32(bytes, at + 16)? as usize;
        let memsz = read_u32(bytes, at + 20)?;
        let flags = read_u32(bytes, at + 24)?;
        if (memsz as usize) < filesz {
            return Err(LoadError::Truncated);
        }
        let data = bytes.get(offset..offset + filesz).ok_or(LoadError::Truncated)?;
        segments.push(ElfSegment {
            vaddr,
            executable: flags & PF_X != 0,
            data: data.to_vec(),
            memsz,
        });
    }
    Ok((entry, segments))
}

/// Installs an ELF32 executable: each PT_LOAD is copied to its vaddr with
/// any memsz tail beyond filesz zero-filled.
pub fn load_elf(bytes: &[u8], mem: &mut LimMemory) -> Result<LoadedProgram, LoadError> {
    let (entry, elf_segments) = parse_elf(bytes)?;
    let mut segments = Vec::new();
    let mut entry_ok = false;
    for seg in &elf_segments {
        if seg.vaddr as u64 + seg.memsz as u64 > mem.size_bytes() as u64 {
            return Err(LoadError::SegmentOutOfBounds { vaddr: seg.vaddr, size: seg.memsz });
        }
        mem.poke_bytes(seg.vaddr, &seg.data).expect("bounds checked above");
        if seg.memsz as usize > seg.data.len() {
            // BSS-style tail: zero-fill the remainder.
            let zeros = vec![0u8; seg.memsz as usize - seg.data.len()];
            mem.poke_bytes(seg.vaddr + seg.data.len() as u32, &zeros)
                .expect("bounds checked above");
        }
        if seg.executable && (seg.vaddr..seg.vaddr + seg.memsz).contains(&entry) {
            entry_ok = true;
        }
        segments.push((seg.vaddr, seg.memsz));
    }
    if !entry_ok {
        return Err(LoadError::EntryOutsideSegment { entry });
    }
    Ok(LoadedProgram { entry, segments, initial_sp: initial_sp(mem) })
}

/// Installs an assembled image directly, without an ELF round trip.
pub fn load_image(
    image: &crate::asm::ProgramImage,
    mem: &mut LimMemory,
) -> Result<LoadedProgram, LoadError> {
    let mut segments = Vec::new();
    for seg in &image.segments {
        if seg.base as u64 + seg.data.len() as u64 > mem.size_bytes() as u64 {
            return Err(LoadError::SegmentOutOfBounds {
                vaddr: seg.base,
                size: seg.data.len() as u32,
            });
        }
        mem.poke_bytes(seg.base, &seg.data).expect("bounds checked above");
        segments.push((seg.base, seg.data.len() as u32));
    }
    let executable = image
        .segments
        .iter()
        .any(|s| !s.writable && (s.base..s.end()).contains(&image.entry));
    if !executable {
        return Err(LoadError::EntryOutsideSegment { entry: image.entry });
    }
    Ok(LoadedProgram { entry: image.entry, segments, initial_sp: initial_sp(mem) })
}

/// Installs a raw binary at `base`; the entry defaults to `base`.
pub fn load_flat(
    bytes: &[u8],
    base: u32,
    entry: Option<u32>,
    mem: &mut LimMemory,
) -> Result<LoadedProgram, LoadError> {
    let len = bytes.len() as u64;
    if base as u64 + len > mem.size_bytes() as u64 {
        return Err(LoadError::SegmentOutOfBounds { vaddr: base, size: len as u32 });
    }
    let entry = entry.unwrap_or(base);
    if !(base..base + len as u32).contains(&entry) {
        return Err(LoadError::EntryOutsideSegment { entry });
    }
    mem.poke_bytes(base, bytes).expect("bounds checked above");
    Ok(LoadedProgram {
        entry,
        segments: vec![(base, bytes.len() as u32)],
        initial_sp: initial_sp(mem),
    })
}
