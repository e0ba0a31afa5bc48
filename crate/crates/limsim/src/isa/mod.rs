//! Instruction set definitions: RV32IM base instructions plus the two
//! logic-in-memory (LiM) instructions, their encodings, decoder,
//! disassembler, and the pure cell-logic function.
//!
//! The LiM extension lives in the reserved custom opcode spaces so it can
//! never collide with a standard RV32IM encoding:
//!
//! * `lim.active`: custom-0 (0b0001011), S-type field layout with all
//!   immediate bits zero. rs1 holds the base byte address, rs2 the cell
//!   count, funct3 the memory operation.
//! * `lim.loadmask`: custom-1 (0b0101011), R-type field layout with
//!   funct7 zero. rd receives the masked word, rs1 holds the address,
//!   rs2 the mask, funct3 the memory operation.

mod decode;
mod disasm;
mod encode;

pub use decode::{decode, IllegalInstruction};
pub use disasm::disassemble;
pub use encode::{encode, encode_load_mask, encode_store_active_logic};

/// Major opcode values (instruction bits [6:0]).
pub mod opcodes {
    pub const LOAD: u32 = 0x03;
    pub const MISC_MEM: u32 = 0x0f;
    pub const OP_IMM: u32 = 0x13;
    pub const AUIPC: u32 = 0x17;
    pub const STORE: u32 = 0x23;
    pub const OP: u32 = 0x33;
    pub const LUI: u32 = 0x37;
    pub const BRANCH: u32 = 0x63;
    pub const JALR: u32 = 0x67;
    pub const JAL: u32 = 0x6f;
    pub const SYSTEM: u32 = 0x73;
    /// custom-0: `lim.active` (cell activation).
    pub const LIM_ACTIVE: u32 = 0x0b;
    /// custom-1: `lim.loadmask` (masked load).
    pub const LIM_LOADMASK: u32 = 0x2b;
}

/// CSR numbers for the two architectural counters (low/high halves).
pub mod csr {
    pub const CYCLE: u32 = 0xc00;
    pub const INSTRET: u32 = 0xc02;
    pub const CYCLEH: u32 = 0xc80;
    pub const INSTRETH: u32 = 0xc82;
}

/// A general-purpose register index in [0, 31].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reg(u8);

impl Reg {
    pub const ZERO: Reg = Reg(0);
    pub const RA: Reg = Reg(1);
    pub const SP: Reg = Reg(2);

    /// Builds a register index, rejecting values outside [0, 31].
    pub fn new(index: u8) -> Option<Reg> {
        (index < 32).then_some(Reg(index))
    }

    /// Extracts a register index from the low five bits of an instruction field.
    pub(crate) fn from_bits(bits: u32) -> Reg {
        Reg((bits & 0x1f) as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn bits(self) -> u32 {
        self.0 as u32
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for Reg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Per-cell memory operation selector.
///
/// `None` marks a plain memory cell; the six logic states make subsequent
/// word stores combine the incoming data with the stored word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MemOpCode {
    #[default]
    None,
    And,
    Or,
    Xor,
    Nand,
    Nor,
    Xnor,
}

impl MemOpCode {
    pub const ALL: [MemOpCode; 7] = [
        MemOpCode::None,
        MemOpCode::And,
        MemOpCode::Or,
        MemOpCode::Xor,
        MemOpCode::Nand,
        MemOpCode::Nor,
        MemOpCode::Xnor,
    ];

    /// The six states that actually perform logic (everything but `None`).
    pub const LOGIC: [MemOpCode; 6] = [
        MemOpCode::And,
        MemOpCode::Or,
        MemOpCode::Xor,
        MemOpCode::Nand,
        MemOpCode::Nor,
        MemOpCode::Xnor,
    ];

    /// 3-bit wire encoding. Value 7 is reserved.
    pub fn to_bits(self) -> u32 {
        match self {
            MemOpCode::None => 0,
            MemOpCode::And => 1,
            MemOpCode::Or => 2,
            MemOpCode::Xor => 3,
            MemOpCode::Nand => 4,
            MemOpCode::Nor => 5,
            MemOpCode::Xnor => 6,
        }
    }

    /// Decodes the 3-bit wire value; 7 (reserved) and out-of-range values
    /// yield `None`.
    pub fn from_bits(bits: u32) -> Option<MemOpCode> {
        Some(match bits {
            0 => MemOpCode::None,
            1 => MemOpCode::And,
            2 => MemOpCode::Or,
            3 => MemOpCode::Xor,
            4 => MemOpCode::Nand,
            5 => MemOpCode::Nor,
            6 => MemOpCode::Xnor,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            MemOpCode::None => "none",
            MemOpCode::And => "and",
            MemOpCode::Or => "or",
            MemOpCode::Xor => "xor",
            MemOpCode::Nand => "nand",
            MemOpCode::Nor => "nor",
            MemOpCode::Xnor => "xnor",
        }
    }

    pub fn from_name(name: &str) -> Option<MemOpCode> {
        Some(match name {
            "none" => MemOpCode::None,
            "and" => MemOpCode::And,
            "or" => MemOpCode::Or,
            "xor" => MemOpCode::Xor,
            "nand" => MemOpCode::Nand,
            "nor" => MemOpCode::Nor,
            "xnor" => MemOpCode::Xnor,
            _ => return None,
        })
    }
}

impl std::fmt::Display for MemOpCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Combines an old cell value with incoming data under a logic state.
///
/// Callers split out `MemOpCode::None` themselves (plain store / plain
/// load); passing it here is a contract violation.
pub fn apply_mem_op(op: MemOpCode, old: u32, incoming: u32) -> u32 {
    match op {
        MemOpCode::And => old & incoming,
        MemOpCode::Or => old | incoming,
        MemOpCode::Xor => old ^ incoming,
        MemOpCode::Nand => !(old & incoming),
        MemOpCode::Nor => !(old | incoming),
        MemOpCode::Xnor => !(old ^ incoming),
        MemOpCode::None => panic!("apply_mem_op called with MemOpCode::None"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AluOp {
    Add,
    Sub,
    Sll,
    Slt,
    Sltu,
    Xor,
    Srl,
    Sra,
    Or,
    And,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MulDivOp {
    Mul,
    Mulh,
    Mulhsu,
    Mulhu,
    Div,
    Divu,
    Rem,
    Remu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchCond {
    Eq,
    Ne,
    Lt,
    Ge,
    Ltu,
    Geu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoadWidth {
    Byte,
    Half,
    Word,
    ByteUnsigned,
    HalfUnsigned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StoreWidth {
    Byte,
    Half,
    Word,
}

/// Which architectural counter a counter-read instruction samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CounterId {
    Cycle,
    CycleHigh,
    InstRet,
    InstRetHigh,
}

/// A decoded instruction: every RV32IM form in scope plus the two LiM
/// instructions.
///
/// Immediates are stored sign-extended exactly as the base ISA defines per
/// format; `Lui`/`Auipc` keep the already-shifted upper-immediate value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instruction {
    Lui { rd: Reg, imm: u32 },
    Auipc { rd: Reg, imm: u32 },
    Jal { rd: Reg, offset: i32 },
    Jalr { rd: Reg, rs1: Reg, offset: i32 },
    Branch { cond: BranchCond, rs1: Reg, rs2: Reg, offset: i32 },
    Load { width: LoadWidth, rd: Reg, rs1: Reg, offset: i32 },
    Store { width: StoreWidth, rs1: Reg, rs2: Reg, offset: i32 },
    OpImm { op: AluOp, rd: Reg, rs1: Reg, imm: i32 },
    Op { op: AluOp, rd: Reg, rs1: Reg, rs2: Reg },
    MulDiv { op: MulDivOp, rd: Reg, rs1: Reg, rs2: Reg },
    Fence,
    Ecall,
    Ebreak,
    ReadCounter { rd: Reg, counter: CounterId },
    /// Sets the activation state of `regs[range_reg]` word cells starting
    /// at byte address `regs[base_reg]`.
    LimStoreActiveLogic { base_reg: Reg, range_reg: Reg, mem_op: MemOpCode },
    /// Loads the word at `regs[base_reg]` combined with the mask in
    /// `regs[source_reg]`, writing the result to `dest_reg`.
    LimLoadMask { dest_reg: Reg, base_reg: Reg, source_reg: Reg, mem_op: MemOpCode },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mem_op_bits_round_trip() {
        for op in MemOpCode::ALL {
            assert_eq!(MemOpCode::from_bits(op.to_bits()), Some(op));
            assert_eq!(MemOpCode::from_name(op.name()), Some(op));
        }
        assert_eq!(MemOpCode::from_bits(7), None);
        assert_eq!(MemOpCode::from_name("max"), None);
    }

    #[test]
    fn mem_op_encoding_matches_assignment() {
        let expected = [
            (MemOpCode::None, 0),
            (MemOpCode::And, 1),
            (MemOpCode::Or, 2),
            (MemOpCode::Xor, 3),
            (MemOpCode::Nand, 4),
            (MemOpCode::Nor, 5),
            (MemOpCode::Xnor, 6),
        ];
        for (op, bits) in expected {
            assert_eq!(op.to_bits(), bits);
        }
    }

    #[test]
    fn apply_mem_op_basics() {
        assert_eq!(apply_mem_op(MemOpCode::Xor, 0xff00ff00, 0x0f0f0f0f), 0xf00ff00f);
        assert_eq!(apply_mem_op(MemOpCode::Nand, 0xffffffff, 0xffffffff), 0x00000000);
        assert_eq!(apply_mem_op(MemOpCode::Or, 0x000000f0, 0x0000000f), 0x000000ff);
        assert_eq!(apply_mem_op(MemOpCode::And, 0xdeadbeef, 0xffff0000), 0xdead0000);
        assert_eq!(apply_mem_op(MemOpCode::Nor, 0, 0), 0xffffffff);
        assert_eq!(apply_mem_op(MemOpCode::Xnor, 0x5555aaaa, 0x5555aaaa), 0xffffffff);
    }

    #[test]
    #[should_panic(expected = "MemOpCode::None")]
    fn apply_mem_op_rejects_none() {
        apply_mem_op(MemOpCode::None, 0, 0);
    }

    #[test]
    fn reg_bounds() {
        assert_eq!(Reg::new(31).map(|r| r.index()), Some(31));
        assert_eq!(Reg::new(32), None);
        assert_eq!(Reg::ZERO.to_string(), "x0");
    }
}
