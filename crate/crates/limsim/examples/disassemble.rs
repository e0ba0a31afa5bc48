//! Assemble a program to an ELF image in memory, then disassemble every
//! executable word back to text.
//!
//! Run with: cargo run --example disassemble

use limsim::asm::{assemble, AsmOptions};
use limsim::elf::write_elf;
use limsim::isa::{decode, disassemble};
use limsim::loader::parse_elf;

const SOURCE: &str = "
_start:
    la   a0, table
    li   a1, 4
    lim.active a0, a1, nand
    lw   t0, 0(a0)
    mul  t1, t0, t0
    lim.loadmask t2, a0, t1, nand
    beqz t2, done
    addi t2, t2, -1
done:
    li   a7, 93
    ecall

    .data
table: .word 1, 2, 3, 4
";

fn main() {
    let image = assemble(SOURCE, &AsmOptions::default()).unwrap();
    let elf = write_elf(&image);
    println!("{}-byte ELF, entry 0x{:08x}\n", elf.len(), image.entry);

    let (_, segments) = parse_elf(&elf).unwrap();
    for seg in segments {
        println!("segment at 0x{:08x} ({}):", seg.vaddr, if seg.executable { "rx" } else { "rw" });
        for (i, chunk) in seg.data.chunks_exact(4).enumerate() {
            let addr = seg.vaddr + 4 * i as u32;
            let word = u32::from_le_bytes(chunk.try_into().unwrap());
            let text = if seg.executable {
                decode(word).map(|inst| disassemble(&inst)).unwrap_or(format!(".word 0x{word:08x}"))
            } else {
                format!(".word 0x{word:08x}")
            };
            println!("  {addr:08x}: {word:08x}  {text}");
        }
    }
}
