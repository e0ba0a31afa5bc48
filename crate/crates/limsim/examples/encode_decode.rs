//! Build the two custom instruction words by hand, decode them back, and
//! print their encodings next to the equivalent assembly.
//!
//! Run with: cargo run --example encode_decode

use limsim::isa::{
    decode, disassemble, encode_load_mask, encode_store_active_logic, MemOpCode, Reg,
};

fn main() {
    let base = Reg::new(10).unwrap();
    let range = Reg::new(11).unwrap();
    let dest = Reg::new(5).unwrap();
    let mask = Reg::new(7).unwrap();

    println!("cell-activation words (rs1=x10 base address, rs2=x11 cell count):");
    for op in MemOpCode::ALL {
        let word = encode_store_active_logic(base, range, op);
        let inst = decode(word).unwrap();
        println!("  0x{word:08x}  {}", disassemble(&inst));
    }

    println!("\nmasked-load words (rd=x5, rs1=x10 address, rs2=x7 mask):");
    for op in [MemOpCode::And, MemOpCode::Or, MemOpCode::Xnor] {
        let word = encode_load_mask(dest, base, mask, op);
        let inst = decode(word).unwrap();
        println!("  0x{word:08x}  {}", disassemble(&inst));
    }

    // The reserved mem-op slot (funct3 = 7) never decodes.
    let bad = encode_store_active_logic(base, range, MemOpCode::Xnor) | 1 << 12;
    println!("\nreserved funct3=7 word 0x{bad:08x}: {:?}", decode(bad).unwrap_err());
}
