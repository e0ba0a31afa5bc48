//! A functional simulator and toolchain for 32-bit RISC-V extended with
//! logic-in-memory (LiM) instructions.
//!
//! Memory cells in this machine can be *activated* with a logic state
//! (and/or/xor and their complements). While a cell is active, an ordinary
//! word store is reinterpreted by the memory as a logic store: the cell
//! combines its old content with the incoming word in place. A companion
//! masked-load instruction reads a word combined with a register mask
//! without a round trip through the ALU.
//!
//! The crate bundles everything needed to experiment with that model:
//!
//! * [`isa`]: encodings, decoder, and disassembler for RV32IM plus the
//!   `lim.active` / `lim.loadmask` instructions;
//! * [`mem`]: the word-cell memory array behind a packet interface, with
//!   full access accounting;
//! * [`cpu`]: an in-order interpreter with a configurable timing model
//!   and per-instruction tracing;
//! * [`asm`]: a two-pass assembler for a strict subset of RISC-V assembly
//!   extended with the LiM mnemonics;
//! * [`elf`] / [`loader`]: ELF32 emission and loading, plus flat images;
//! * [`bench`]: self-checking benchmark kernels in both LiM and scalar
//!   form, with host-side result and access-count verification;
//! * [`cli`]: the `asm` / `disasm` / `run` / `bench` commands used by the
//!   `limsim` binary.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod asm;
pub mod bench;
pub mod cli;
pub mod cpu;
pub mod elf;
pub mod isa;
pub mod loader;
pub mod mem;

pub use asm::{assemble, AsmOptions, ProgramImage};
pub use cpu::{HaltReason, RunStats, Simulator, TimingModel};
pub use isa::{apply_mem_op, decode, disassemble, Instruction, MemOpCode, Reg};
pub use loader::{load_elf, load_flat, LoadedProgram};
pub use mem::{LimMemory, MemRequest, MemResponse, MemStats};
