//! Masked loads: read a word already combined with a register mask, in
//! one memory access, without modifying the stored data.
//!
//! Run with: cargo run --example load_mask

use limsim::mem::{LimMemory, MemRequest};
use limsim::MemOpCode;

fn main() {
    let mut mem = LimMemory::new(64 * 1024);
    mem.handle(MemRequest::write_word(0x40, 0xdead_beef)).unwrap();

    for (op, mask) in [
        (MemOpCode::And, 0xffff_0000u32),
        (MemOpCode::Or, 0x0000_00ff),
        (MemOpCode::Xor, 0xffff_ffff),
        (MemOpCode::None, 0),
    ] {
        let resp = mem.handle(MemRequest::load_mask(0x40, mask, op)).unwrap();
        println!("load_mask(0x40, 0x{mask:08x}, {op:5}) -> 0x{:08x}", resp.data);
    }

    // The word itself never changed.
    assert_eq!(mem.peek_word(0x40).unwrap(), 0xdead_beef);
    println!("memory word unchanged: 0x{:08x}", mem.peek_word(0x40).unwrap());
    println!("masked loads performed: {}", mem.stats().load_masks);

    // Strict mode insists the op matches the cell's activation state.
    let mut strict = LimMemory::new(64 * 1024).with_strict_lim(true);
    strict.activate(0x40, 1, MemOpCode::And).unwrap();
    strict.handle(MemRequest::load_mask(0x40, 1, MemOpCode::And)).unwrap();
    let err = strict.handle(MemRequest::load_mask(0x40, 1, MemOpCode::Or)).unwrap_err();
    println!("strict mode with mismatched op: {err}");
}
