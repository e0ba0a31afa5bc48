//! Self-checking benchmark suite.
//!
//! Every benchmark ships as assembly kernels (a scalar baseline and,
//! where the workload benefits, an in-memory variant) that verify their
//! own results in-guest and report PASS/FAIL through the write syscall.
//! The harness adds a second, independent layer: it generates the input
//! data, recomputes the expected outputs on the host, compares final
//! memory snapshots, and checks every access counter against counts
//! derived from the emitted instruction sequences.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::asm::{assemble, AsmError, AsmOptions};
use crate::cpu::{HaltReason, RunStats, Simulator, TimingModel};
use crate::loader::load_image;
use crate::mem::LimMemory;

/// Instruction budget for one benchmark run.
pub const BENCH_MAX_INSTRUCTIONS: u64 = 100_000_000;
const BENCH_MEM_BYTES: u32 = 16 * 1024 * 1024;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("manifest {path}: {msg}")]
    Manifest { path: PathBuf, msg: String },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("assembling {path}: {source}")]
    Asm {
        path: PathBuf,
        #[source]
        source: AsmError,
    },
}

/// Which host-side verifier drives a benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleId {
    Bitwise,
    Aes128Arkey,
    BitmapSearch,
    MaxMin,
    XnorNet,
}

impl OracleId {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "bitwise" => OracleId::Bitwise,
            "aes128_arkey" => OracleId::Aes128Arkey,
            "bitmap_search" => OracleId::BitmapSearch,
            "max_min" => OracleId::MaxMin,
            "xnor_net" => OracleId::XnorNet,
            _ => return None,
        })
    }
}

/// One manifest entry.
#[derive(Debug, Clone)]
pub struct BenchEntry {
    pub name: String,
    pub lim_path: Option<PathBuf>,
    pub base_path: PathBuf,
    pub oracle: OracleId,
    pub n: usize,
    pub seed: u64,
}

/// Parses the plain-text key=value manifest. Blocks are separated by the
/// `name=` key; paths are resolved relative to the manifest file.
pub fn parse_manifest(path: &Path) -> Result<Vec<BenchEntry>, BenchError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| BenchError::Io { path: path.to_path_buf(), source })?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let err = |msg: String| BenchError::Manifest { path: path.to_path_buf(), msg };

    struct Block {
        name: String,
        line: usize,
        keys: BTreeMap<String, String>,
    }
    let mut blocks: Vec<Block> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("line {}: expected key=value", idx + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "name" {
            blocks.push(Block { name: value.to_string(), line: idx + 1, keys: BTreeMap::new() });
        } else {
            let block = blocks
                .last_mut()
                .ok_or_else(|| err(format!("line {}: key before any name=", idx + 1)))?;
            block.keys.insert(key.to_string(), value.to_string());
        }
    }

    let mut entries = Vec::new();
    for block in blocks {
        let get = |key: &str| {
            block.keys.get(key).ok_or_else(|| {
                err(format!("benchmark '{}' (line {}): missing {key}=", block.name, block.line))
            })
        };
        let oracle_name = get("oracle")?;
        let oracle = OracleId::from_name(oracle_name).ok_or_else(|| {
            err(format!("benchmark '{}': unknown oracle '{oracle_name}'", block.name))
        })?;
        let n: usize = get("n")?
            .parse()
            .map_err(|_| err(format!("benchmark '{}': n must be a count", block.name)))?;
        if n == 0 {
            return Err(err(format!("benchmark '{}': n must be positive", block.name)));
        }
        let seed: u64 = get("seed")?
            .parse()
            .map_err(|_| err(format!("benchmark '{}': seed must be an integer", block.name)))?;
        entries.push(BenchEntry {
            name: block.name.clone(),
            lim_path: block.keys.get("lim").map(|p| dir.join(p)),
            base_path: dir.join(get("base")?),
            oracle,
            n,
            seed,
        });
    }
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(entries)
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn gen_words(state: &mut u64, count: usize) -> Vec<u32> {
    (0..count).map(|_| splitmix64(state) as u32).collect()
}

/// Expected access counters for one variant, derived from the emitted
/// instruction sequence of its kernel (not from running it).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedCounts {
    pub plain_reads: u64,
    pub plain_writes: u64,
    pub logic_stores: u64,
    pub load_masks: u64,
    pub activations: u64,
    pub activated_cells_peak: u64,
}

impl ExpectedCounts {
    pub fn data_accesses(&self) -> u64 {
        self.plain_reads + self.plain_writes + self.logic_stores + self.load_masks
    }
}

/// Expected final content of one labelled region.
#[derive(Debug, Clone)]
pub struct RegionCheck {
    pub symbol: String,
    pub words: Vec<u32>,
}

/// Generated input data plus every host-side expectation for a benchmark.
pub struct Workload {
    pub data_section: String,
    pub checks: Vec<RegionCheck>,
    pub expected_lim: Option<ExpectedCounts>,
    pub expected_base: ExpectedCounts,
}

fn words_directive(out: &mut String, label: &str, words: &[u32]) {
    out.push_str(label);
    out.push_str(":\n");
    for chunk in words.chunks(8) {
        let row: Vec<String> = chunk.iter().map(|w| format!("0x{w:08x}")).collect();
        out.push_str("    .word ");
        out.push_str(&row.join(", "));
        out.push('\n');
    }
}

/// FIPS-197 example input block and cipher key, packed into little-endian
/// words the way the kernels index them.
const AES_STATE: [u32; 4] = [0xa8f6_4332, 0x8d30_5a88, 0xa298_3131, 0x3407_37e0];
const AES_KEY: [u32; 4] = [0x1615_7e2b, 0xa6d2_ae28, 0x8815_f7ab, 0x3c4f_cf09];

/// Builds the generated data section and all expectations for a workload.
pub fn build_workload(oracle: OracleId, n: usize, seed: u64) -> Workload {
    let mut state = seed;
    let n64 = n as u64;
    let mut data = String::from("\n    .data\n    .align 2\n");
    data.push_str(&format!("nwords: .word {n}\n"));

    match oracle {
        OracleId::Bitwise => {
            let a = gen_words(&mut state, n);
            let b = gen_words(&mut state, n);
            words_directive(&mut data, "a", &a);
            words_directive(&mut data, "b", &b);
            let combos: [(&str, fn(u32, u32) -> u32); 6] = [
                ("dst_and", |x, y| x & y),
                ("dst_or", |x, y| x | y),
                ("dst_xor", |x, y| x ^ y),
                ("dst_nand", |x, y| !(x & y)),
                ("dst_nor", |x, y| !(x | y)),
                ("dst_xnor", |x, y| !(x ^ y)),
            ];
            let mut checks = vec![
                RegionCheck { symbol: "a".into(), words: a.clone() },
                RegionCheck { symbol: "b".into(), words: b.clone() },
            ];
            for (label, f) in combos {
                // Every destination region starts as a copy of a[].
                words_directive(&mut data, label, &a);
                checks.push(RegionCheck {
                    symbol: label.into(),
                    words: a.iter().zip(&b).map(|(&x, &y)| f(x, y)).collect(),
                });
            }
            Workload {
                data_section: data,
                checks,
                expected_lim: Some(ExpectedCounts {
                    plain_reads: 1 + 24 * n64,
                    plain_writes: 0,
                    logic_stores: 6 * n64,
                    load_masks: 0,
                    activations: 12,
                    activated_cells_peak: n64,
                }),
                expected_base: ExpectedCounts {
                    plain_reads: 1 + 30 * n64,
                    plain_writes: 6 * n64,
                    logic_stores: 0,
                    load_masks: 0,
                    activations: 0,
                    activated_cells_peak: 0,
                },
            }
        }
        OracleId::Aes128Arkey => {
            assert_eq!(n, 4, "aes128_arkey state is fixed at 4 words");
            words_directive(&mut data, "state0", &AES_STATE);
            words_directive(&mut data, "key", &AES_KEY);
            words_directive(&mut data, "st", &AES_STATE);
            words_directive(&mut data, "out", &[0; 4]);
            let xored: Vec<u32> = AES_STATE.iter().zip(&AES_KEY).map(|(&s, &k)| s ^ k).collect();
            Workload {
                data_section: data,
                checks: vec![
                    RegionCheck { symbol: "out".into(), words: xored },
                    RegionCheck { symbol: "st".into(), words: AES_STATE.to_vec() },
                    RegionCheck { symbol: "state0".into(), words: AES_STATE.to_vec() },
                    RegionCheck { symbol: "key".into(), words: AES_KEY.to_vec() },
                ],
                expected_lim: Some(ExpectedCounts {
                    plain_reads: 8 * n64,
                    plain_writes: n64,
                    logic_stores: 2 * n64,
                    load_masks: 0,
                    activations: 2,
                    activated_cells_peak: n64,
                }),
                expected_base: ExpectedCounts {
                    plain_reads: 10 * n64,
                    plain_writes: 3 * n64,
                    logic_stores: 0,
                    load_masks: 0,
                    activations: 0,
                    activated_cells_peak: 0,
                },
            }
        }
        OracleId::BitmapSearch => {
            let qmask =
                1u32 << (splitmix64(&mut state) % 32) | 1u32 << (splitmix64(&mut state) % 32);
            let bitmap = gen_words(&mut state, n);
            data.push_str(&format!("qmask: .word 0x{qmask:08x}\n"));
            words_directive(&mut data, "bitmap", &bitmap);
            words_directive(&mut data, "out_idx", &vec![0; n]);
            words_directive(&mut data, "out_count", &[0]);

            let indices: Vec<u32> = bitmap
                .iter()
                .enumerate()
                .filter(|(_, &w)| w & qmask == qmask)
                .map(|(i, _)| i as u32)
                .collect();
            let m = indices.len() as u64;
            let mut out_idx = indices;
            out_idx.resize(n, 0);
            Workload {
                data_section: data,
                checks: vec![
                    RegionCheck { symbol: "bitmap".into(), words: bitmap },
                    RegionCheck { symbol: "out_idx".into(), words: out_idx },
                    RegionCheck { symbol: "out_count".into(), words: vec![m as u32] },
                ],
                expected_lim: Some(ExpectedCounts {
                    plain_reads: n64 + m + 3,
                    plain_writes: m + 1,
                    logic_stores: 0,
                    load_masks: n64,
                    activations: 2,
                    activated_cells_peak: n64,
                }),
                expected_base: ExpectedCounts {
                    plain_reads: 2 * n64 + m + 3,
                    plain_writes: m + 1,
                    logic_stores: 0,
                    load_masks: 0,
                    activations: 0,
                    activated_cells_peak: 0,
                },
            }
        }
        OracleId::MaxMin => {
            let arr = gen_words(&mut state, n);
            words_directive(&mut data, "arr", &arr);
            words_directive(&mut data, "out", &[0, 0]);
            let max = arr.iter().map(|&w| w as i32).max().unwrap();
            let min = arr.iter().map(|&w| w as i32).min().unwrap();
            Workload {
                data_section: data,
                checks: vec![
                    RegionCheck { symbol: "arr".into(), words: arr },
                    RegionCheck { symbol: "out".into(), words: vec![max as u32, min as u32] },
                ],
                expected_lim: None,
                expected_base: ExpectedCounts {
                    plain_reads: 2 * n64 + 3,
                    plain_writes: 2,
                    logic_stores: 0,
                    load_masks: 0,
                    activations: 0,
                    activated_cells_peak: 0,
                },
            }
        }
        OracleId::XnorNet => {
            let a = gen_words(&mut state, n);
            let b = gen_words(&mut state, n);
            words_directive(&mut data, "a", &a);
            words_directive(&mut data, "b", &b);
            words_directive(&mut data, "dst", &a);
            words_directive(&mut data, "out_sim", &[0]);
            let xnor: Vec<u32> = a.iter().zip(&b).map(|(&x, &y)| !(x ^ y)).collect();
            let popcount: u32 = xnor.iter().map(|w| w.count_ones()).sum();
            let similarity = 2 * popcount as i64 - 32 * n as i64;
            Workload {
                data_section: data,
                checks: vec![
                    RegionCheck { symbol: "a".into(), words: a },
                    RegionCheck { symbol: "b".into(), words: b },
                    RegionCheck { symbol: "dst".into(), words: xnor },
                    RegionCheck { symbol: "out_sim".into(), words: vec![similarity as i32 as u32] },
                ],
                expected_lim: Some(ExpectedCounts {
                    plain_reads: 5 * n64 + 2,
                    plain_writes: 1,
                    logic_stores: n64,
                    load_masks: 0,
                    activations: 2,
                    activated_cells_peak: n64,
                }),
                expected_base: ExpectedCounts {
                    plain_reads: 6 * n64 + 2,
                    plain_writes: n64 + 1,
                    logic_stores: 0,
                    load_masks: 0,
                    activations: 0,
                    activated_cells_peak: 0,
                },
            }
        }
    }
}

/// Kernel text plus the generated data section.
pub fn compose_source(kernel: &str, workload: &Workload) -> String {
    let mut source = kernel.to_string();
    if !source.ends_with('\n') {
        source.push('\n');
    }
    source.push_str(&workload.data_section);
    source
}

/// Result of one benchmark variant run plus its verification verdict.
#[derive(Debug, Clone)]
pub struct VariantOutcome {
    pub benchmark: String,
    pub variant: &'static str,
    pub stats: RunStats,
    pub passed: bool,
    /// Empty when passed; otherwise the first failed check.
    pub detail: String,
}

fn run_one(
    benchmark: &str,
    variant: &'static str,
    kernel_path: &Path,
    workload: &Workload,
    expected: &ExpectedCounts,
) -> Result<VariantOutcome, BenchError> {
    let kernel = std::fs::read_to_string(kernel_path)
        .map_err(|source| BenchError::Io { path: kernel_path.to_path_buf(), source })?;
    let source = compose_source(&kernel, workload);
    let image = assemble(&source, &AsmOptions::default())
        .map_err(|source| BenchError::Asm { path: kernel_path.to_path_buf(), source })?;

    let mut mem = LimMemory::new(BENCH_MEM_BYTES);
    let prog = load_image(&image, &mut mem).expect("benchmark image fits default memory");
    let mut sim = Simulator::new(mem, TimingModel::default());
    sim.reset_to(&prog);
    let (halt, stats) = sim.run(BENCH_MAX_INSTRUCTIONS);

    let mut failure = None;
    if halt != (HaltReason::Exit { code: 0 }) {
        failure = Some(format!("guest did not exit cleanly: {halt:?}"));
    } else if sim.stdout != b"PASS\n" {
        failure =
            Some(format!("guest self-check output {:?}", String::from_utf8_lossy(&sim.stdout)));
    }

    if failure.is_none() {
        'checks: for check in &workload.checks {
            let Some(&base) = image.symbols.get(&check.symbol) else {
                failure = Some(format!("symbol '{}' missing from image", check.symbol));
                break;
            };
            for (i, &want) in check.words.iter().enumerate() {
                let got = sim.mem.peek_word(base + 4 * i as u32).unwrap_or(!want);
                if got != want {
                    failure = Some(format!(
                        "{}[{}] = 0x{:08x}, host oracle expects 0x{:08x}",
                        check.symbol, i, got, want
                    ));
                    break 'checks;
                }
            }
        }
    }

    if failure.is_none() {
        let m = &stats.mem;
        let got = ExpectedCounts {
            plain_reads: m.plain_reads,
            plain_writes: m.plain_writes,
            logic_stores: m.logic_stores,
            load_masks: m.load_masks,
            activations: m.activations,
            activated_cells_peak: m.activated_cells_peak,
        };
        if got != *expected {
            failure = Some(format!(
                "access counters {got:?} differ from statically derived {expected:?}"
            ));
        }
    }

    Ok(VariantOutcome {
        benchmark: benchmark.to_string(),
        variant,
        stats,
        passed: failure.is_none(),
        detail: failure.unwrap_or_default(),
    })
}

/// Assembles, runs, and verifies every benchmark in the manifest. The
/// returned outcomes are ordered by (benchmark, variant).
pub fn run_suite(manifest: &Path) -> Result<Vec<VariantOutcome>, BenchError> {
    let entries = parse_manifest(manifest)?;
    let mut outcomes = Vec::new();
    for entry in &entries {
        let workload = build_workload(entry.oracle, entry.n, entry.seed);
        let base =
            run_one(&entry.name, "base", &entry.base_path, &workload, &workload.expected_base)?;
        let lim = match (&entry.lim_path, &workload.expected_lim) {
            (Some(path), Some(expected)) => {
                Some(run_one(&entry.name, "lim", path, &workload, expected)?)
            }
            _ => None,
        };

        // Cross-variant expectations: the in-memory variants must touch
        // the data arrays strictly less often; the masked-load search must
        // retire fewer instructions.
        if let Some(mut lim) = lim {
            if lim.passed && base.passed {
                match entry.oracle {
                    OracleId::Bitwise | OracleId::Aes128Arkey | OracleId::XnorNet => {
                        if lim.stats.mem.data_accesses() >= base.stats.mem.data_accesses() {
                            lim.passed = false;
                            lim.detail = format!(
                                "no data-access reduction: lim {} vs base {}",
                                lim.stats.mem.data_accesses(),
                                base.stats.mem.data_accesses()
                            );
                        }
                    }
                    OracleId::BitmapSearch => {
                        if lim.stats.instret >= base.stats.instret {
                            lim.passed = false;
                            lim.detail = format!(
                                "no instruction reduction: lim {} vs base {}",
                                lim.stats.instret, base.stats.instret
                            );
                        }
                    }
                    OracleId::MaxMin => {}
                }
            }
            outcomes.push(lim);
        }
        outcomes.push(base);
    }
    outcomes
        .sort_by(|a, b| (a.benchmark.as_str(), a.variant).cmp(&(b.benchmark.as_str(), b.variant)));
    Ok(outcomes)
}
