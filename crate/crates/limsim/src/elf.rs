//! Minimal ELF32 executable writer: little-endian, EM_RISCV, ET_EXEC, one
//! PT_LOAD program header per segment, no section table.

use crate::asm::ProgramImage;

pub(crate) const ELF_MAGIC: [u8; 4] = [0x7f, b'E', b'L', b'F'];
pub(crate) const ELFCLASS32: u8 = 1;
pub(crate) const ELFDATA2LSB: u8 = 1;
pub(crate) const ET_EXEC: u16 = 2;
pub(crate) const EM_RISCV: u16 = 243;
pub(crate) const PT_LOAD: u32 = 1;
pub(crate) const PF_X: u32 = 1;
pub(crate) const PF_W: u32 = 2;
pub(crate) const PF_R: u32 = 4;

pub(crate) const EHDR_SIZE: u32 = 52;
pub(crate) const PHDR_SIZE: u32 = 32;

/// Serializes an image as a loadable ELF32 executable. Empty segments are
/// omitted from the program headers.
pub fn write_elf(image: &ProgramImage) -> Vec<u8> {
    let segments: Vec<_> = image.segments.iter().filter(|s| !s.data.is_empty()).collect();
    let phnum = segments.len() as u32;

    let mut out = Vec::new();
    out.extend_from_slice(&ELF_MAGIC);
    out.push(ELFCLASS32);
    out.push(ELFDATA2LSB);
    out.push(1); // EI_VERSION
    out.extend_from_slice(&[0; 9]); // OS/ABI and padding
    out.extend_from_slice(&ET_EXEC.to_le_bytes());
    out.extend_from_slice(&EM_RISCV.to_le_bytes());
    out.extend_from_slice(&1u32.to_le_bytes()); // e_version
    out.extend_from_slice(&image.entry.to_le_bytes());
    out.extend_from_slice(&EHDR_SIZE.to_le_bytes()); // e_phoff
    out.extend_from_slice(&0u32.to_le_bytes()); // e_shoff
    out.extend_from_slice(&0u32.to_le_bytes()); // e_flags
    out.extend_from_slice(&(EHDR_SIZE as u16).to_le_bytes());
    out.extend_from_slice(&(PHDR_SIZE as u16).to_le_bytes());
    out.extend_from_slice(&(phnum as u16).to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes()); // e_shentsize
    out.extend_from_slice(&0u16.to_le_bytes()); // e_shnum
    out.extend_from_slice(&0u16.to_le_bytes()); // e_shstrndx

    // Segment bytes follow the headers; each file offset is padded so that
    // offset and vaddr agree modulo the declared 4-byte alignment.
    let mut offset = EHDR_SIZE + PHDR_SIZE * phnum;
    let mut placements = Vec::new();
    for seg in &segments {
        let pad = (seg.base.wrapping_sub(offset)) % 4;
        offset += pad;
        placements.push((offset, pad));
        offset += seg.data.len() as u32;
    }

    for (seg, (file_offset, _)) in segments.iter().zip(&placements) {
        let flags = if seg.writable { PF_R | PF_W } else { PF_R | PF_X };
        out.extend_from_slice(&PT_LOAD.to_le_bytes());
        out.extend_from_slice(&file_offset.to_le_bytes());
        out.extend_from_slice(&seg.base.to_le_bytes()); // p_vaddr
        out.extend_from_slice(&seg.base.to_le_bytes()); // p_paddr
        out.extend_from_slice(&(seg.data.len() as u32).to_le_bytes()); // p_filesz
        out.extend_from_slice(&(seg.data.len() as u32).to_le_bytes()); // p_memsz
        out.extend_from_slice(&flags.to_le_bytes());
        out.extend_from_slice(&4u32.to_le_bytes()); // p_align
    }

    for (seg, (_, pad)) in segments.iter().zip(&placements) {
        out.extend_from_slice(&vec![0; *pad as usize]);
        out.extend_from_slice(&seg.data);
    }
    out
}
