//! Assemble a program from source text, load it, execute it, and print
//! the run statistics. The program ors a constant into three memory
//! cells using an activated region and exits with the combined value's
//! low byte.
//!
//! Run with: cargo run --example assemble_and_run

use limsim::asm::{assemble, AsmOptions};
use limsim::cpu::{Simulator, TimingModel};
use limsim::loader::load_image;
use limsim::mem::LimMemory;

const SOURCE: &str = "
_start:
    la   a0, cells          # base address of the region
    li   a1, 3              # three word cells
    lim.active a0, a1, or

    li   t0, 0x0f           # combine into each cell with plain stores
    sw   t0, 0(a0)
    addi a0, a0, 4
    sw   t0, 0(a0)
    addi a0, a0, 4
    sw   t0, 0(a0)

    la   a0, cells
    lim.active a0, a1, none # back to plain memory

    lw   a0, 0(a0)          # 0xf0 | 0x0f
    li   a7, 93
    ecall

    .data
cells:
    .word 0xf0, 0xf0, 0xf0
";

fn main() {
    let image = assemble(SOURCE, &AsmOptions::default()).expect("assembles");
    println!("entry 0x{:08x}, {} segment(s)", image.entry, image.segments.len());
    for (name, addr) in &image.symbols {
        println!("  symbol {name} = 0x{addr:08x}");
    }

    let mut mem = LimMemory::new(1 << 24);
    let prog = load_image(&image, &mut mem).expect("loads");
    let mut sim = Simulator::new(mem, TimingModel::default());
    sim.reset_to(&prog);

    let (halt, stats) = sim.run(10_000);
    println!("\nhalt: {halt:?}");
    println!("instret={} cycles={} fetches={}", stats.instret, stats.cycles, stats.fetches);
    println!(
        "reads={} writes={} logic_stores={} activations={}",
        stats.mem.plain_reads, stats.mem.plain_writes, stats.mem.logic_stores,
        stats.mem.activations
    );
}
