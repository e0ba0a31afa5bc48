//! Instruction encoders. `encode` is the inverse of `decode` over the
//! whole supported set.

use super::{
    csr, opcodes, AluOp, BranchCond, CounterId, Instruction, LoadWidth, MemOpCode, MulDivOp, Reg,
    StoreWidth,
};

fn r_type(opcode: u32, rd: Reg, funct3: u32, rs1: Reg, rs2: Reg, funct7: u32) -> u32 {
    funct7 << 25 | rs2.bits() << 20 | rs1.bits() << 15 | funct3 << 12 | rd.bits() << 7 | opcode
}

fn i_type(opcode: u32, rd: Reg, funct3: u32, rs1: Reg, imm: i32) -> u32 {
    (imm as u32 & 0xfff) << 20 | rs1.bits() << 15 | funct3 << 12 | rd.bits() << 7 | opcode
}

fn s_type(opcode: u32, funct3: u32, rs1: Reg, rs2: Reg, imm: i32) -> u32 {
    let imm = imm as u32;
    (imm >> 5 & 0x7f) << 25
        | rs2.bits() << 20
        | rs1.bits() << 15
        | funct3 << 12
        | (imm & 0x1f) << 7
        | opcode
}

fn b_type(opcode: u32, funct3: u32, rs1: Reg, rs2: Reg, offset: i32) -> u32 {
    let imm = offset as u32;
    (imm >> 12 & 1) << 31
        | (imm >> 5 & 0x3f) << 25
        | rs2.bits() << 20
        | rs1.bits() << 15
        | funct3 << 12
        | (imm >> 1 & 0xf) << 8
        | (imm >> 11 & 1) << 7
        | opcode
}

fn u_type(opcode: u32, rd: Reg, imm: u32) -> u32 {
    (imm & 0xffff_f000) | rd.bits() << 7 | opcode
}

fn j_type(opcode: u32, rd: Reg, offset: i32) -> u32 {
    let imm = offset as u32;
    (imm >> 20 & 1) << 31
        | (imm >> 1 & 0x3ff) << 21
        | (imm >> 11 & 1) << 20
        | (imm >> 12 & 0xff) << 12
        | rd.bits() << 7
        | opcode
}

/// Encodes `lim.active`: custom-0 opcode, S-type layout, zero immediate.
pub fn encode_store_active_logic(base_reg: Reg, range_reg: Reg, mem_op: MemOpCode) -> u32 {
    s_type(opcodes::LIM_ACTIVE, mem_op.to_bits(), base_reg, range_reg, 0)
}

/// Encodes `lim.loadmask`: custom-1 opcode, R-type layout, zero funct7.
pub fn encode_load_mask(dest_reg: Reg, base_reg: Reg, source_reg: Reg, mem_op: MemOpCode) -> u32 {
    r_type(opcodes::LIM_LOADMASK, dest_reg, mem_op.to_bits(), base_reg, source_reg, 0)
}

fn branch_funct3(cond: BranchCond) -> u32 {
    match cond {
        BranchCond::Eq => 0b000,
        BranchCond::Ne => 0b001,
        BranchCond::Lt => 0b100,
        BranchCond::Ge => 0b101,
        BranchCond::Ltu => 0b110,
        BranchCond::Geu => 0b111,
    }
}

fn load_funct3(width: LoadWidth) -> u32 {
    match width {
        LoadWidth::Byte => 0b000,
        LoadWidth::Half => 0b001,
        LoadWidth::Word => 0b010,
        LoadWidth::ByteUnsigned => 0b100,
        LoadWidth::HalfUnsigned => 0b101,
    }
}

fn store_funct3(width: StoreWidth) -> u32 {
    match width {
        StoreWidth::Byte => 0b000,
        StoreWidth::Half => 0b001,
        StoreWidth::Word => 0b010,
    }
}

fn alu_funct3(op: AluOp) -> u32 {
    match op {
        AluOp::Add | AluOp::Sub => 0b000,
        AluOp::Sll => 0b001,
        AluOp::Slt => 0b010,
        AluOp::Sltu => 0b011,
        AluOp::Xor => 0b100,
        AluOp::Srl | AluOp::Sra => 0b101,
        AluOp::Or => 0b110,
        AluOp::And => 0b111,
    }
}

fn muldiv_funct3(op: MulDivOp) -> u32 {
    match op {
        MulDivOp::Mul => 0b000,
        MulDivOp::Mulh => 0b001,
        MulDivOp::Mulhsu => 0b010,
        MulDivOp::Mulhu => 0b011,
        MulDivOp::Div => 0b100,
        MulDivOp::Divu => 0b101,
        MulDivOp::Rem => 0b110,
        MulDivOp::Remu => 0b111,
    }
}

/// Encodes any supported instruction back into its 32-bit word.
pub fn encode(inst: &Instruction) -> u32 {
    match *inst {
        Instruction::Lui { rd, imm } => u_type(opcodes::LUI, rd, imm),
        Instruction::Auipc { rd, imm } => u_type(opcodes::AUIPC, rd, imm),
        Instruction::Jal { rd, offset } => j_type(opcodes::JAL, rd, offset),
        Instruction::Jalr { rd, rs1, offset } => i_type(opcodes::JALR, rd, 0, rs1, offset),
        Instruction::Branch { cond, rs1, rs2, offset } => {
            b_type(opcodes::BRANCH, branch_funct3(cond), rs1, rs2, offset)
        }
        Instruction::Load { width, rd, rs1, offset } => {
            i_type(opcodes::LOAD, rd, load_funct3(width), rs1, offset)
        }
        Instruction::Store { width, rs1, rs2, offset } => {
            s_type(opcodes::STORE, store_funct3(width), rs1, rs2, offset)
        }
        Instruction::OpImm { op, rd, rs1, imm } => match op {
            AluOp::Sll => {
                i_type(opcodes::OP_IMM, rd, alu_funct3(op), rs1, imm & 0x1f)
            }
            AluOp::Srl => i_type(opcodes::OP_IMM, rd, alu_funct3(op), rs1, imm & 0x1f),
            AluOp::Sra => {
                i_type(opcodes::OP_IMM, rd, alu_funct3(op), rs1, (imm & 0x1f) | 0x400)
            }
            AluOp::Sub => panic!("subtract-immediate does not exist in RV32I"),
            _ => i_type(opcodes::OP_IMM, rd, alu_funct3(op), rs1, imm),
        },
        Instruction::Op { op, rd, rs1, rs2 } => {
            let funct7 = match op {
                AluOp::Sub | AluOp::Sra => 0b0100000,
                _ => 0,
            };
            r_type(opcodes::OP, rd, alu_funct3(op), rs1, rs2, funct7)
        }
        Instruction::MulDiv { op, rd, rs1, rs2 } => {
            r_type(opcodes::OP, rd, muldiv_funct3(op), rs1, rs2, 0b0000001)
        }
        Instruction::Fence => 0x0ff0_000f,
        Instruction::Ecall => 0x0000_0073,
        Instruction::Ebreak => 0x0010_0073,
        Instruction::ReadCounter { rd, counter } => {
            let num = match counter {
                CounterId::Cycle => csr::CYCLE,
                CounterId::CycleHigh => csr::CYCLEH,
                CounterId::InstRet => csr::INSTRET,
                CounterId::InstRetHigh => csr::INSTRETH,
            };
            num << 20 | 0b010 << 12 | rd.bits() << 7 | opcodes::SYSTEM
        }
        Instruction::LimStoreActiveLogic { base_reg, range_reg, mem_op } => {
            encode_store_active_logic(base_reg, range_reg, mem_op)
        }
        Instruction::LimLoadMask { dest_reg, base_reg, source_reg, mem_op } => {
            encode_load_mask(dest_reg, base_reg, source_reg, mem_op)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::decode;
    use super::*;

    fn reg(n: u8) -> Reg {
        Reg::new(n).unwrap()
    }

    #[test]
    fn lim_active_round_trip() {
        let word = encode_store_active_logic(reg(10), reg(11), MemOpCode::Or);
        assert_eq!(word & 0x7f, opcodes::LIM_ACTIVE);
        assert_eq!(
            decode(word),
            Ok(Instruction::LimStoreActiveLogic {
                base_reg: reg(10),
                range_reg: reg(11),
                mem_op: MemOpCode::Or,
            })
        );
    }

    #[test]
    fn lim_active_minimal_fields() {
        let word = encode_store_active_logic(Reg::ZERO, Reg::ZERO, MemOpCode::None);
        assert_eq!(word >> 12 & 0x7, 0);
        assert!(decode(word).is_ok());
    }

    #[test]
    fn lim_loadmask_round_trip() {
        let word = encode_load_mask(reg(5), reg(6), reg(7), MemOpCode::And);
        assert_eq!(word & 0x7f, opcodes::LIM_LOADMASK);
        assert_eq!(
            decode(word),
            Ok(Instruction::LimLoadMask {
                dest_reg: reg(5),
                base_reg: reg(6),
                source_reg: reg(7),
                mem_op: MemOpCode::And,
            })
        );
    }

    #[test]
    fn lim_encodings_exhaustive_round_trip() {
        for base in 0..32u8 {
            for range in 0..32u8 {
                for op in MemOpCode::ALL {
                    let inst = Instruction::LimStoreActiveLogic {
                        base_reg: reg(base),
                        range_reg: reg(range),
                        mem_op: op,
                    };
                    assert_eq!(decode(encode(&inst)), Ok(inst));
                }
            }
        }
    }

    #[test]
    fn custom_opcodes_disjoint_from_base() {
        // The two custom opcode values must not be claimed by any base decode arm.
        assert_ne!(opcodes::LIM_ACTIVE, opcodes::STORE);
        assert_ne!(opcodes::LIM_LOADMASK, opcodes::LOAD);
        for op in MemOpCode::ALL {
            let active = encode_store_active_logic(reg(1), reg(2), op);
            let mask = encode_load_mask(reg(1), reg(2), reg(3), op);
            assert!(matches!(decode(active), Ok(Instruction::LimStoreActiveLogic { .. })));
            assert!(matches!(decode(mask), Ok(Instruction::LimLoadMask { .. })));
        }
    }
}
