//! Assembler conformance against a frozen reference corpus, plus the
//! disassembler fixpoint over the same forms and a randomized sweep of
//! the whole mnemonic table through the text path.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use limsim::asm::assemble_line;
use limsim::isa::{decode, disassemble, encode, Instruction, MemOpCode};

mod common;
use common::{random_instruction, reg};

struct GoldenCase {
    text: &'static str,
    words: Vec<u32>,
}

fn corpus() -> Vec<GoldenCase> {
    include_str!("golden_rv32im.txt")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|line| {
            let (enc, text) = line.split_once('\t').expect("corpus line format");
            let words = enc
                .split_whitespace()
                .map(|w| u32::from_str_radix(w, 16).expect("hex word"))
                .collect();
            GoldenCase { text, words }
        })
        .collect()
}

#[test]
fn corpus_is_large_enough() {
    assert!(corpus().len() >= 60, "golden corpus must cover at least 60 forms");
}

#[test]
fn matches_reference_assembler() {
    let mut failures = Vec::new();
    for case in corpus() {
        match assemble_line(case.text, 0) {
            Ok(words) if words == case.words => {}
            Ok(words) => failures.push(format!(
                "{}: assembled {:08x?}, reference {:08x?}",
                case.text, words, case.words
            )),
            Err(err) => failures.push(format!("{}: {err}", case.text)),
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

/// Full-table sweep through the text path: any legal instruction,
/// rendered as text, assembles back to its own encoding.
#[test]
fn randomized_table_sweep_through_source_text() {
    let mut rng = StdRng::seed_from_u64(0xa5b);
    for _ in 0..10_000 {
        let inst = random_instruction(&mut rng);
        let word = encode(&inst);
        let text = disassemble(&inst);
        let words = assemble_line(&text, 0).unwrap_or_else(|e| panic!("`{text}`: {e}"));
        assert_eq!(words, vec![word], "text `{text}`");
        assert_eq!(decode(words[0]), Ok(inst));
    }

    // The custom forms, with randomized registers across all seven ops.
    for _ in 0..1_000 {
        for inst in [
            Instruction::LimStoreActiveLogic {
                base_reg: reg(rng.gen_range(0..32)),
                range_reg: reg(rng.gen_range(0..32)),
                mem_op: MemOpCode::ALL[rng.gen_range(0..7)],
            },
            Instruction::LimLoadMask {
                dest_reg: reg(rng.gen_range(0..32)),
                base_reg: reg(rng.gen_range(0..32)),
                source_reg: reg(rng.gen_range(0..32)),
                mem_op: MemOpCode::ALL[rng.gen_range(0..7)],
            },
        ] {
            let text = disassemble(&inst);
            assert_eq!(assemble_line(&text, 0).unwrap(), vec![encode(&inst)], "text `{text}`");
        }
    }
}

/// decode -> disassemble -> assemble must reproduce the original word for
/// every non-pseudo form in the corpus.
#[test]
fn disassembly_fixpoint_over_corpus() {
    for case in corpus() {
        // Pseudo-instructions disassemble to their base forms, so skip the
        // names that are not in the decoder's output alphabet.
        let mnemonic = case.text.split_whitespace().next().unwrap();
        if ["li", "mv", "nop", "j", "jr", "ret", "beqz", "bnez"].contains(&mnemonic) {
            continue;
        }
        for &word in &case.words {
            let inst = decode(word).expect("corpus word decodes");
            let text = disassemble(&inst);
            let again = assemble_line(&text, 0)
                .unwrap_or_else(|e| panic!("`{text}` from {:08x} failed: {e}", word));
            assert_eq!(again, vec![word], "fixpoint broken for `{}`", case.text);
            assert_eq!(encode(&inst), word);
        }
    }
}
