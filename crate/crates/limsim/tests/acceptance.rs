//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `--nocapture` to see them).

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use limsim::asm::{assemble, assemble_line, AsmOptions, ProgramImage, Segment};
use limsim::bench;
use limsim::cli::{cmd_asm, cmd_run, OutputFormat, RunConfig};
use limsim::cpu::{HaltReason, MemEffectKind, Simulator, TimingModel};
use limsim::elf::write_elf;
use limsim::isa::{
    decode, encode, encode_load_mask, encode_store_active_logic, Instruction, MemOpCode, Reg,
};
use limsim::loader::{load_elf, load_image};
use limsim::mem::{LimMemory, MemRequest};

mod common;
use common::{random_instruction, reg};

fn manifest_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("benchmarks/manifest.txt")
}

/// Runs an assembled source to completion and returns the simulator.
fn run_source(source: &str, tracing: bool) -> (Simulator, HaltReason) {
    let image = assemble(source, &AsmOptions::default()).unwrap();
    let mut mem = LimMemory::new(1 << 24);
    let prog = load_image(&image, &mut mem).unwrap();
    let mut sim = Simulator::new(mem, TimingModel::default());
    sim.set_tracing(tracing);
    sim.reset_to(&prog);
    let (halt, _) = sim.run(10_000_000);
    (sim, halt)
}

/// Criterion 1: decode(encode(i)) is the identity, exhaustively for both
/// custom instructions and for >= 1e5 randomized RV32IM forms.
#[test]
fn criterion_1_encoding_round_trip() {
    let started = Instant::now();

    for base in 0..32u8 {
        for other in 0..32u8 {
            for op in MemOpCode::ALL {
                let active = Instruction::LimStoreActiveLogic {
                    base_reg: reg(base),
                    range_reg: reg(other),
                    mem_op: op,
                };
                assert_eq!(decode(encode(&active)), Ok(active));
                for dest in 0..32u8 {
                    let mask = Instruction::LimLoadMask {
                        dest_reg: reg(dest),
                        base_reg: reg(base),
                        source_reg: reg(other),
                        mem_op: op,
                    };
                    assert_eq!(decode(encode(&mask)), Ok(mask));
                }
            }
        }
    }

    let mut rng = StdRng::seed_from_u64(0x11_22_33);
    for _ in 0..100_000 {
        let inst = random_instruction(&mut rng);
        let word = encode(&inst);
        assert_eq!(decode(word), Ok(inst), "word 0x{word:08x}");
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 10, "round-trip took {elapsed:?}");
    println!("ACCEPTANCE 1 (encoding round-trip): PASS in {elapsed:?}");
}

/// Criterion 2: an activated cell combines stores exactly like a host
/// load-op-store sequence, over >= 1e4 randomized triples.
#[test]
fn criterion_2_logic_store_oracle() {
    // Host-side oracle, independent of the simulator's logic path.
    fn oracle(op: MemOpCode, old: u32, src: u32) -> u32 {
        match op {
            MemOpCode::And => old & src,
            MemOpCode::Or => old | src,
            MemOpCode::Xor => old ^ src,
            MemOpCode::Nand => !(old & src),
            MemOpCode::Nor => !(old | src),
            MemOpCode::Xnor => !(old ^ src),
            MemOpCode::None => unreachable!(),
        }
    }

    let mut rng = StdRng::seed_from_u64(0xfeed);
    let mut mem = LimMemory::new(64 * 1024);
    for round in 0..10_000 {
        let op = MemOpCode::LOGIC[rng.gen_range(0..6)];
        let old: u32 = rng.gen();
        let src: u32 = rng.gen();
        let addr = (rng.gen_range(0..16 * 1024) * 4) as u32;

        mem.activate(addr, 1, MemOpCode::None).unwrap();
        mem.handle(MemRequest::write_word(addr, old)).unwrap();
        mem.activate(addr, 1, op).unwrap();
        mem.handle(MemRequest::write_word(addr, src)).unwrap();
        let got = mem.peek_word(addr).unwrap();
        assert_eq!(got, oracle(op, old, src), "round {round}: {op:?} {old:#x} {src:#x}");
    }
    println!("ACCEPTANCE 2 (logic-store oracle equivalence): PASS (10000 triples)");
}

/// Criterion 3: activating three word cells for or and issuing the paired
/// store leaves exactly three or-cells, the or-combined value, and a trace
/// with one activation record and one logic-flagged store.
#[test]
fn criterion_3_activation_scenario() {
    let source = "
        _start:
            li   a0, 0x08
            li   a1, 3
            li   t0, 0x000000f0
            sw   t0, 0(a0)           # preload the cell, plain store
            lim.active a0, a1, or
            li   t1, 0x0000000f
            sw   t1, 0(a0)           # reinterpreted as a logic store
            li   a0, 0
            li   a7, 93
            ecall
    ";
    let (sim, halt) = run_source(source, true);
    assert_eq!(halt, HaltReason::Exit { code: 0 });

    // Exactly the three cells 0x08, 0x0c, 0x10 are in state or.
    let cells = sim.mem.snapshot(0x0, 0x40).unwrap();
    for cell in &cells {
        let expected = if (0x08..0x14).contains(&cell.addr) {
            MemOpCode::Or
        } else {
            MemOpCode::None
        };
        assert_eq!(cell.state, expected, "cell 0x{:02x}", cell.addr);
    }
    assert_eq!(sim.mem.activated_cells(), 3);
    assert_eq!(sim.mem.peek_word(0x08).unwrap(), 0x0000_00ff, "or-combined value");

    let activations: Vec<_> = sim
        .trace
        .iter()
        .filter(|r| matches!(r.mem, Some(e) if e.kind == MemEffectKind::Activate))
        .collect();
    let logic_stores: Vec<_> = sim
        .trace
        .iter()
        .filter(|r| matches!(r.mem, Some(e) if e.kind == MemEffectKind::LogicWrite))
        .collect();
    assert_eq!(activations.len(), 1);
    assert_eq!(activations[0].mem.unwrap().addr, 0x08);
    assert_eq!(activations[0].mem.unwrap().data, 3);
    assert_eq!(logic_stores.len(), 1);
    assert_eq!(logic_stores[0].mem.unwrap().data, 0x0000_00ff);
    assert_eq!(sim.mem.stats().activations, 1);
    assert_eq!(sim.mem.stats().logic_stores, 1);
    println!("ACCEPTANCE 3 (three-cell or activation scenario): PASS");
}

/// Criterion 4: all five benchmarks self-check PASS in both variants and
/// the whole suite finishes inside the time budget.
#[test]
fn criterion_4_benchmark_self_checks() {
    let started = Instant::now();
    let outcomes = bench::run_suite(&manifest_path()).unwrap();
    let elapsed = started.elapsed();

    let names: Vec<_> = outcomes.iter().map(|o| (o.benchmark.as_str(), o.variant)).collect();
    assert_eq!(
        names,
        vec![
            ("aes128_arkey", "base"),
            ("aes128_arkey", "lim"),
            ("bitmap_search", "base"),
            ("bitmap_search", "lim"),
            ("bitwise", "base"),
            ("bitwise", "lim"),
            ("max_min", "base"),
            ("xnor_net", "base"),
            ("xnor_net", "lim"),
        ]
    );
    for outcome in &outcomes {
        assert!(outcome.passed, "{} {}: {}", outcome.benchmark, outcome.variant, outcome.detail);
    }
    assert!(elapsed.as_secs() < 60, "suite took {elapsed:?}");
    println!("ACCEPTANCE 4 (benchmark self-checks): PASS in {elapsed:?}");
}

/// Criterion 5: the in-memory variants of bitwise, aes128_arkey, and
/// xnor_net reduce data accesses, and every counter equals the statically
/// derived count for the default problem sizes.
#[test]
fn criterion_5_access_reduction() {
    let outcomes = bench::run_suite(&manifest_path()).unwrap();
    let find = |name: &str, variant: &str| {
        outcomes
            .iter()
            .find(|o| o.benchmark == name && o.variant == variant)
            .unwrap_or_else(|| panic!("{name}/{variant} missing"))
    };

    // Statically derived totals for the manifest's problem sizes
    // (bitwise n=256, aes n=4, xnor n=64): see the kernel sources.
    let expectations = [
        ("bitwise", 1 + 24 * 256 + 6 * 256, 1 + 30 * 256 + 6 * 256),
        ("aes128_arkey", 8 * 4 + 4 + 2 * 4, 10 * 4 + 3 * 4),
        ("xnor_net", 5 * 64 + 2 + 64 + 1, 6 * 64 + 2 + 64 + 1),
    ];
    for (name, lim_expected, base_expected) in expectations {
        let lim = find(name, "lim");
        let base = find(name, "base");
        assert!(lim.passed && base.passed, "{name} failed verification");
        assert_eq!(lim.stats.mem.data_accesses(), lim_expected, "{name} lim data accesses");
        assert_eq!(base.stats.mem.data_accesses(), base_expected, "{name} base data accesses");
        assert!(
            lim.stats.mem.data_accesses() < base.stats.mem.data_accesses(),
            "{name}: lim must reduce data accesses"
        );
    }
    println!("ACCEPTANCE 5 (access reduction, exact static counts): PASS");
}

/// Criterion 6: identical runs produce byte-identical trace and stats
/// files, wall-clock field aside.
#[test]
fn criterion_6_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = manifest_path();
    let entries = bench::parse_manifest(&manifest).unwrap();
    let entry = entries.iter().find(|e| e.name == "bitwise").unwrap();
    let workload = bench::build_workload(entry.oracle, entry.n, entry.seed);
    let kernel = std::fs::read_to_string(entry.lim_path.as_ref().unwrap()).unwrap();
    let source_path = dir.path().join("bitwise_lim.s");
    std::fs::write(&source_path, bench::compose_source(&kernel, &workload)).unwrap();

    let elf_path = dir.path().join("bitwise_lim.elf");
    cmd_asm(&source_path, &elf_path, OutputFormat::Elf, &AsmOptions::default()).unwrap();

    let run = |tag: &str| {
        let trace = dir.path().join(format!("trace.{tag}"));
        let stats = dir.path().join(format!("stats.{tag}"));
        let cfg = RunConfig {
            trace_path: Some(trace.clone()),
            stats_path: Some(stats.clone()),
            mem_bytes: 1 << 24,
            ..RunConfig::default()
        };
        let outcome = cmd_run(&elf_path, &cfg).unwrap();
        assert_eq!(outcome.exit_status, 0);
        (std::fs::read(trace).unwrap(), std::fs::read_to_string(stats).unwrap())
    };
    let (trace_a, stats_a) = run("a");
    let (trace_b, stats_b) = run("b");

    assert_eq!(trace_a, trace_b, "trace files must be byte-identical");
    assert!(!trace_a.is_empty());

    let normalize = |text: &str| {
        let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
        v["wall_seconds"] = 0.0.into();
        v
    };
    assert_eq!(normalize(&stats_a), normalize(&stats_b), "stats identical modulo wall clock");
    println!("ACCEPTANCE 6 (bit-deterministic traces and stats): PASS");
}

/// Criterion 7: the assembler matches a reference RISC-V assembler on the
/// frozen golden corpus, and the custom mnemonics match the encoders.
#[test]
fn criterion_7_assembler_conformance() {
    let mut forms = 0;
    for line in include_str!("golden_rv32im.txt").lines() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (enc, text) = line.split_once('\t').unwrap();
        let expected: Vec<u32> =
            enc.split_whitespace().map(|w| u32::from_str_radix(w, 16).unwrap()).collect();
        assert_eq!(assemble_line(text, 0).unwrap(), expected, "form `{text}`");
        forms += 1;
    }
    assert!(forms >= 60, "only {forms} golden forms");

    for op in MemOpCode::ALL {
        let text = format!("lim.active x10, x11, {op}");
        assert_eq!(
            assemble_line(&text, 0).unwrap(),
            vec![encode_store_active_logic(reg(10), reg(11), op)]
        );
        let text = format!("lim.loadmask x5, x6, x7, {op}");
        assert_eq!(
            assemble_line(&text, 0).unwrap(),
            vec![encode_load_mask(reg(5), reg(6), reg(7), op)]
        );
    }
    println!("ACCEPTANCE 7 (assembler conformance, {forms} forms): PASS");
}

/// Criterion 8: write_elf -> load_elf reproduces segments and entry for
/// 100 randomized small programs.
#[test]
fn criterion_8_elf_round_trip() {
    let mut rng = StdRng::seed_from_u64(0xe1f);
    for round in 0..100 {
        let text_len = rng.gen_range(1..=16) * 4;
        let text_base = rng.gen_range(1..=64) * 0x100;
        let text: Vec<u8> = (0..text_len).map(|_| rng.gen()).collect();

        let mut segments =
            vec![Segment { base: text_base, data: text.clone(), writable: false }];
        if rng.gen_bool(0.7) {
            let data_len = rng.gen_range(1..=64);
            let data_base = text_base + text_len + rng.gen_range(1..=64) * 0x100;
            segments.push(Segment {
                base: data_base,
                data: (0..data_len).map(|_| rng.gen()).collect(),
                writable: true,
            });
        }
        let entry = text_base + rng.gen_range(0..text_len / 4) * 4;
        let image = ProgramImage { segments, entry, symbols: Default::default() };

        let bytes = write_elf(&image);
        let mut mem = LimMemory::new(1 << 20);
        let prog = load_elf(&bytes, &mut mem).unwrap();

        assert_eq!(prog.entry, image.entry, "round {round}: entry");
        assert_eq!(prog.segments.len(), image.segments.len());
        for seg in &image.segments {
            assert!(prog.segments.contains(&(seg.base, seg.data.len() as u32)));
            assert_eq!(
                mem.peek_bytes(seg.base, seg.data.len() as u32).unwrap(),
                &seg.data[..],
                "round {round}: segment at 0x{:x}",
                seg.base
            );
        }
    }
    println!("ACCEPTANCE 8 (ELF round-trip, 100 programs): PASS");
}

/// Criterion 9: ISA-mandated results for division/remainder edge cases,
/// shift-amount masking, and signed/unsigned comparisons, observed through
/// full program execution.
#[test]
fn criterion_9_semantic_spot_suite() {
    // Each case: program fragment computing into a0, expected a0.
    let cases: Vec<(&str, u32)> = vec![
        // Division by zero: quotient is all ones, remainder passes through.
        ("li a1, 7\nli a2, 0\ndiv a0, a1, a2", u32::MAX),
        ("li a1, 7\nli a2, 0\ndivu a0, a1, a2", u32::MAX),
        ("li a1, 7\nli a2, 0\nrem a0, a1, a2", 7),
        ("li a1, -7\nli a2, 0\nremu a0, a1, a2", (-7i32) as u32),
        // Signed overflow case: INT_MIN / -1 wraps, remainder is zero.
        ("li a1, 0x80000000\nli a2, -1\ndiv a0, a1, a2", 0x8000_0000),
        ("li a1, 0x80000000\nli a2, -1\nrem a0, a1, a2", 0),
        // Ordinary signed division truncates toward zero.
        ("li a1, -7\nli a2, 2\ndiv a0, a1, a2", (-3i32) as u32),
        ("li a1, -7\nli a2, 2\nrem a0, a1, a2", (-1i32) as u32),
        // Shift amounts use only the low five bits of rs2.
        ("li a1, 1\nli a2, 33\nsll a0, a1, a2", 2),
        ("li a1, 0x80000000\nli a2, 63\nsrl a0, a1, a2", 1),
        ("li a1, 0x80000000\nli a2, 31\nsra a0, a1, a2", u32::MAX),
        ("li a1, 0xf0f0f0f0\nslli a0, a1, 4", 0x0f0f_0f00),
        ("li a1, 0xf0f0f0f0\nsrai a0, a1, 4", 0xff0f_0f0f),
        // Signed vs unsigned comparisons of the same operands.
        ("li a1, -1\nli a2, 1\nslt a0, a1, a2", 1),
        ("li a1, -1\nli a2, 1\nsltu a0, a1, a2", 0),
        ("li a1, -1\nli a2, 1\nli a0, 0\nblt a1, a2, 8\nli a0, 1", 0),
        ("li a1, -1\nli a2, 1\nli a0, 0\nbltu a1, a2, 8\nli a0, 1", 1),
        ("li a1, -1\nli a2, 1\nli a0, 0\nbge a2, a1, 8\nli a0, 1", 0),
        ("li a1, -1\nli a2, 1\nli a0, 0\nbgeu a2, a1, 8\nli a0, 1", 1),
        // Multiplication high halves.
        ("li a1, 0x80000000\nli a2, 0x80000000\nmulh a0, a1, a2", 0x4000_0000),
        ("li a1, -1\nli a2, -1\nmulhu a0, a1, a2", 0xffff_fffe),
        ("li a1, -1\nli a2, -1\nmulhsu a0, a1, a2", u32::MAX),
        ("li a1, -1\nli a2, -1\nmul a0, a1, a2", 1),
    ];

    for (body, expected) in cases {
        let source = format!("_start:\n{body}\nmv a1, a0\nli a7, 93\necall\n");
        let (sim, halt) = run_source(&source, false);
        assert!(matches!(halt, HaltReason::Exit { .. }), "{body}: {halt:?}");
        assert_eq!(sim.cpu.reg(reg(11)), expected, "fragment:\n{body}");
    }
    println!("ACCEPTANCE 9 (RV32IM semantic spot-suite): PASS");
}
