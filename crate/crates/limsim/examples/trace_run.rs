//! Execute a short program with tracing enabled and print the trace in
//! the stable one-line-per-instruction format.
//!
//! Run with: cargo run --example trace_run

use limsim::asm::{assemble, AsmOptions};
use limsim::cpu::{Simulator, TimingModel};
use limsim::loader::load_image;
use limsim::mem::LimMemory;

const SOURCE: &str = "
_start:
    li   a0, 0x2000
    li   a1, 2
    li   t0, 0xff
    sw   t0, 0(a0)          # plain store
    lim.active a0, a1, xor
    sw   t0, 0(a0)          # logic store: 0xff ^ 0xff = 0
    lim.loadmask t1, a0, t0, or
    li   a0, 0
    li   a7, 93
    ecall
";

fn main() {
    let image = assemble(SOURCE, &AsmOptions::default()).unwrap();
    let mut mem = LimMemory::new(1 << 20);
    let prog = load_image(&image, &mut mem).unwrap();
    let mut sim = Simulator::new(mem, TimingModel::default());
    sim.set_tracing(true);
    sim.reset_to(&prog);
    let (halt, _) = sim.run(100);

    for record in &sim.trace {
        println!("{}", record.format_line());
    }
    println!("# {halt:?}");
}
