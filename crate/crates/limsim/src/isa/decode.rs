//! Table-free nested decoder: match on opcode, then funct3/funct7.

use super::{
    csr, opcodes, AluOp, BranchCond, CounterId, Instruction, LoadWidth, MemOpCode, MulDivOp, Reg,
    StoreWidth,
};

/// Raised for any 32-bit word that is not a legal instruction in this
/// artifact's scope, carrying the offending word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IllegalInstruction(pub u32);

impl std::fmt::Display for IllegalInstruction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "illegal instruction word 0x{:08x}", self.0)
    }
}

impl std::error::Error for IllegalInstruction {}

fn bits(word: u32, hi: u32, lo: u32) -> u32 {
    (word >> lo) & ((1 << (hi - lo + 1)) - 1)
}

fn sign_extend(value: u32, width: u32) -> i32 {
    let shift = 32 - width;
    ((value << shift) as i32) >> shift
}

fn imm_i(word: u32) -> i32 {
    sign_extend(bits(word, 31, 20), 12)
}

fn imm_s(word: u32) -> i32 {
    sign_extend(bits(word, 31, 25) << 5 | bits(word, 11, 7), 12)
}

fn imm_b(word: u32) -> i32 {
    sign_extend(
        bits(word, 31, 31) << 12
            | bits(word, 7, 7) << 11
            | bits(word, 30, 25) << 5
            | bits(word, 11, 8) << 1,
        13,
    )
}

fn imm_j(word: u32) -> i32 {
    sign_extend(
        bits(word, 31, 31) << 20
            | bits(word, 19, 12) << 12
            | bits(word, 20, 20) << 11
            | bits(word, 30, 21) << 1,
        21,
    )
}

/// Decodes one little-endian instruction word.
///
/// Every legal RV32IM word and every legal LiM word maps to exactly one
/// `Instruction`; anything else (including custom-opcode words with the
/// reserved funct3 = 7 or nonzero reserved bits) is an [`IllegalInstruction`].
pub fn decode(word: u32) -> Result<Instruction, IllegalInstruction> {
    // Quadrant check: only 32-bit encodings (bits [1:0] = 11) are in scope.
    if word & 0b11 != 0b11 {
        return Err(IllegalInstruction(word));
    }

    let opcode = bits(word, 6, 0);
    let rd = Reg::from_bits(bits(word, 11, 7));
    let funct3 = bits(word, 14, 12);
    let rs1 = Reg::from_bits(bits(word, 19, 15));
    let rs2 = Reg::from_bits(bits(word, 24, 20));
    let funct7 = bits(word, 31, 25);
    let illegal = || IllegalInstruction(word);

    let inst = match opcode {
        opcodes::LUI => Instruction::Lui { rd, imm: word & 0xffff_f000 },
        opcodes::AUIPC => Instruction::Auipc { rd, imm: word & 0xffff_f000 },
        opcodes::JAL => Instruction::Jal { rd, offset: imm_j(word) },
        opcodes::JALR => {
            if funct3 != 0 {
                return Err(illegal());
            }
            Instruction::Jalr { rd, rs1, offset: imm_i(word) }
        }
        opcodes::BRANCH => {
            let cond = match funct3 {
                0b000 => BranchCond::Eq,
                0b001 => BranchCond::Ne,
                0b100 => BranchCond::Lt,
                0b101 => BranchCond::Ge,
                0b110 => BranchCond::Ltu,
                0b111 => BranchCond::Geu,
                _ => return Err(illegal()),
            };
            Instruction::Branch { cond, rs1, rs2, offset: imm_b(word) }
        }
        opcodes::LOAD => {
            let width = match funct3 {
                0b000 => LoadWidth::Byte,
                0b001 => LoadWidth::Half,
                0b010 => LoadWidth::Word,
                0b100 => LoadWidth::ByteUnsigned,
                0b101 => LoadWidth::HalfUnsigned,
                _ => return Err(illegal()),
            };
            Instruction::Load { width, rd, rs1, offset: imm_i(word) }
        }
        opcodes::STORE => {
            let width = match funct3 {
                0b000 => StoreWidth::Byte,
                0b001 => StoreWidth::Half,
                0b010 => StoreWidth::Word,
                _ => return Err(illegal()),
            };
            Instruction::Store { width, rs1, rs2, offset: imm_s(word) }
        }
        opcodes::OP_IMM => {
            let imm = imm_i(word);
            let op = match funct3 {
                0b000 => AluOp::Add,
                0b010 => AluOp::Slt,
                0b011 => AluOp::Sltu,
                0b100 => AluOp::Xor,
                0b110 => AluOp::Or,
                0b111 => AluOp::And,
                0b001 => {
                    if funct7 != 0 {
                        return Err(illegal());
                    }
                    return Ok(Instruction::OpImm {
                        op: AluOp::Sll,
                        rd,
                        rs1,
                        imm: rs2.bits() as i32,
                    });
                }
                0b101 => {
                    let op = match funct7 {
                        0b0000000 => AluOp::Srl,
                        0b0100000 => AluOp::Sra,
                        _ => return Err(illegal()),
                    };
                    return Ok(Instruction::OpImm { op, rd, rs1, imm: rs2.bits() as i32 });
                }
                _ => unreachable!(),
            };
            Instruction::OpImm { op, rd, rs1, imm }
        }
        opcodes::OP => match funct7 {
            0b0000000 => {
                let op = match funct3 {
                    0b000 => AluOp::Add,
                    0b001 => AluOp::Sll,
                    0b010 => AluOp::Slt,
                    0b011 => AluOp::Sltu,
                    0b100 => AluOp::Xor,
                    0b101 => AluOp::Srl,
                    0b110 => AluOp::Or,
                    0b111 => AluOp::And,
                    _ => unreachable!(),
                };
                Instruction::Op { op, rd, rs1, rs2 }
            }
            0b0100000 => {
                let op = match funct3 {
                    0b000 => AluOp::Sub,
                    0b101 => AluOp::Sra,
                    _ => return Err(illegal()),
                };
                Instruction::Op { op, rd, rs1, rs2 }
            }
            0b0000001 => {
                let op = match funct3 {
                    0b000 => MulDivOp::Mul,
                    0b001 => MulDivOp::Mulh,
                    0b010 => MulDivOp::Mulhsu,
                    0b011 => MulDivOp::Mulhu,
                    0b100 => MulDivOp::Div,
                    0b101 => MulDivOp::Divu,
                    0b110 => MulDivOp::Rem,
                    0b111 => MulDivOp::Remu,
                    _ => unreachable!(),
                };
                Instruction::MulDiv { op, rd, rs1, rs2 }
            }
            _ => return Err(illegal()),
        },
        opcodes::MISC_MEM => {
            if funct3 != 0 {
                return Err(illegal());
            }
            Instruction::Fence
        }
        opcodes::SYSTEM => match funct3 {
            0b000 => {
                if rd.bits() != 0 || rs1.bits() != 0 {
                    return Err(illegal());
                }
                match bits(word, 31, 20) {
                    0 => Instruction::Ecall,
                    1 => Instruction::Ebreak,
                    _ => return Err(illegal()),
                }
            }
            // CSRRS with rs1 = x0: the read-only counter access form.
            0b010 => {
                if rs1.bits() != 0 {
                    return Err(illegal());
                }
                let counter = match bits(word, 31, 20) {
                    csr::CYCLE => CounterId::Cycle,
                    csr::CYCLEH => CounterId::CycleHigh,
                    csr::INSTRET => CounterId::InstRet,
                    csr::INSTRETH => CounterId::InstRetHigh,
                    _ => return Err(illegal()),
                };
                Instruction::ReadCounter { rd, counter }
            }
            _ => return Err(illegal()),
        },
        opcodes::LIM_ACTIVE => {
            // S-type layout with every immediate bit reserved-zero.
            if imm_s(word) != 0 {
                return Err(illegal());
            }
            let mem_op = MemOpCode::from_bits(funct3).ok_or_else(illegal)?;
            Instruction::LimStoreActiveLogic { base_reg: rs1, range_reg: rs2, mem_op }
        }
        opcodes::LIM_LOADMASK => {
            // R-type layout with funct7 reserved-zero.
            if funct7 != 0 {
                return Err(illegal());
            }
            let mem_op = MemOpCode::from_bits(funct3).ok_or_else(illegal)?;
            Instruction::LimLoadMask { dest_reg: rd, base_reg: rs1, source_reg: rs2, mem_op }
        }
        _ => return Err(illegal()),
    };
    Ok(inst)
}
