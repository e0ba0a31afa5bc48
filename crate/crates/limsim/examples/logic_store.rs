//! Drive the memory array directly through packets: activate a region,
//! watch plain stores turn into in-place logic, deactivate, and dump the
//! cells.
//!
//! Run with: cargo run --example logic_store

use limsim::mem::{LimMemory, MemRequest};
use limsim::MemOpCode;

fn dump(mem: &LimMemory, label: &str) {
    println!("{label}:");
    for cell in mem.snapshot(0x08, 0x1c).unwrap() {
        println!("  0x{:02x}: 0x{:08x}  state={}", cell.addr, cell.word, cell.state);
    }
}

fn main() {
    let mut mem = LimMemory::new(64 * 1024);

    // Seed three words, then flip the region into or-accumulation mode.
    for (i, value) in [0x0000_00f0u32, 0x0000_0f00, 0x0000_f000].iter().enumerate() {
        mem.handle(MemRequest::write_word(0x08 + 4 * i as u32, *value)).unwrap();
    }
    mem.activate(0x08, 3, MemOpCode::Or).unwrap();
    dump(&mem, "after activation");

    // These are ordinary word stores; the active cells combine instead of
    // overwrite.
    for (i, incoming) in [0x0000_000fu32, 0x0000_00f0, 0x0000_0f00].iter().enumerate() {
        let resp = mem.handle(MemRequest::write_word(0x08 + 4 * i as u32, *incoming)).unwrap();
        assert!(resp.logic_store);
    }
    dump(&mem, "after streaming three stores");

    mem.activate(0x08, 3, MemOpCode::None).unwrap();
    dump(&mem, "after deactivation");

    let stats = mem.stats();
    println!(
        "traffic: {} plain writes, {} logic stores, {} activations (peak {} active cells)",
        stats.plain_writes, stats.logic_stores, stats.activations, stats.activated_cells_peak
    );
}
