//! Compare the memory traffic of an in-place combine against the classic
//! load-op-store loop on the same inputs. The destination region starts
//! as a copy of a[]; the in-memory version only ever touches b[] and the
//! destination.
//!
//! Run with: cargo run --example access_accounting

use limsim::mem::{LimMemory, MemRequest, MemStats};
use limsim::MemOpCode;

const N: u32 = 64;
const A_BASE: u32 = 0x1000;
const B_BASE: u32 = 0x2000;
const DST_BASE: u32 = 0x3000;

fn install(mem: &mut LimMemory) {
    for i in 0..N {
        let a = 0x1111_0000u32.wrapping_add(i);
        mem.poke_bytes(A_BASE + 4 * i, &a.to_le_bytes()).unwrap();
        mem.poke_bytes(B_BASE + 4 * i, &(0x0f0f_0f0fu32 ^ i).to_le_bytes()).unwrap();
        mem.poke_bytes(DST_BASE + 4 * i, &a.to_le_bytes()).unwrap();
    }
}

fn report(label: &str, stats: &MemStats) {
    println!(
        "{label:22} reads={:3} writes={:3} logic_stores={:3} activations={:2}  total data accesses={}",
        stats.plain_reads, stats.plain_writes, stats.logic_stores, stats.activations,
        stats.data_accesses()
    );
}

fn main() {
    // In-memory: activate dst (already holding a[]), stream b[] through.
    let mut lim = LimMemory::new(64 * 1024);
    install(&mut lim);
    lim.activate(DST_BASE, N, MemOpCode::Xor).unwrap();
    for i in 0..N {
        let b = lim.handle(MemRequest::read_word(B_BASE + 4 * i)).unwrap().data;
        lim.handle(MemRequest::write_word(DST_BASE + 4 * i, b)).unwrap();
    }
    lim.activate(DST_BASE, N, MemOpCode::None).unwrap();
    report("activated region", lim.stats());

    // Scalar: load both operands, combine host-side, store the result.
    let mut base = LimMemory::new(64 * 1024);
    install(&mut base);
    for i in 0..N {
        let a = base.handle(MemRequest::read_word(A_BASE + 4 * i)).unwrap().data;
        let b = base.handle(MemRequest::read_word(B_BASE + 4 * i)).unwrap().data;
        base.handle(MemRequest::write_word(DST_BASE + 4 * i, a ^ b)).unwrap();
    }
    report("load-op-store", base.stats());

    // Same results either way.
    for i in 0..N {
        assert_eq!(
            lim.peek_word(DST_BASE + 4 * i).unwrap(),
            base.peek_word(DST_BASE + 4 * i).unwrap()
        );
    }
    let saved = base.stats().data_accesses() - lim.stats().data_accesses();
    println!("identical results, {saved} fewer data accesses in the activated version");
}
