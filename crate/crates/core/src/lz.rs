//! LZ78 incremental parsing with an idealized real-valued code length.
//!
//! The input is parsed into phrases, each the longest previously seen
//! phrase plus one literal. Phrase `i` (1-based) costs `log2(i) + log2(D)`
//! bits: a pointer into the `i` phrases known so far (including the empty
//! phrase) plus one literal. A trailing incomplete phrase equals some
//! earlier phrase and is charged the same way, its literal being its last
//! symbol. Costs are real-valued, not ceiled, so rates vary smoothly with
//! the block length. No bitstream is emitted.

use std::collections::HashMap;

use crate::{Error, Result};

/// An LZ78 parse: `phrases[i]` is `(prefix phrase index, literal)` with the
/// prefix index strictly below `i + 1` (0 denotes the empty phrase).
#[derive(Debug, Clone, PartialEq)]
pub struct LzParse {
    pub phrases: Vec<(u32, u8)>,
    /// Total idealized code length in bits.
    pub code_bits: f64,
}

impl LzParse {
    /// Expand the phrase list back into the original input.
    pub fn decode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut buf = Vec::new();
        for &(prefix, literal) in &self.phrases {
            buf.clear();
            buf.push(literal);
            let mut j = prefix;
            while j != 0 {
                let (pj, lj) = self.phrases[j as usize - 1];
                buf.push(lj);
                j = pj;
            }
            out.extend(buf.iter().rev());
        }
        out
    }
}

/// Parse `z` and price it at `log2(i) + log2(d)` bits per phrase.
pub fn parse(z: &[u8], d: u16) -> Result<LzParse> {
    if z.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if d < 2 {
        return Err(Error::Config(format!("alphabet size {d} < 2")));
    }
    let log2_d = f64::from(d).log2();
    let mut dict: HashMap<(u32, u8), u32> = HashMap::new();
    let mut phrases: Vec<(u32, u8)> = Vec::new();
    let mut code_bits = 0.0;
    let mut node: u32 = 0;
    for &sym in z {
        if u16::from(sym) >= d {
            return Err(Error::SymbolRange {
                symbol: u32::from(sym),
                d: u32::from(d),
            });
        }
        match dict.get(&(node, sym)) {
            Some(&next) => node = next,
            None => {
                let id = phrases.len() as u32 + 1;
                dict.insert((node, sym), id);
                phrases.push((node, sym));
                code_bits += f64::from(id).log2() + log2_d;
                node = 0;
            }
        }
    }
    if node != 0 {
        // trailing incomplete phrase: equals phrase `node`, re-emitted as
        // (its prefix, its last symbol)
        let (prefix, literal) = phrases[node as usize - 1];
        let id = phrases.len() as u32 + 1;
        phrases.push((prefix, literal));
        code_bits += f64::from(id).log2() + log2_d;
    }
    Ok(LzParse { phrases, code_bits })
}

/// Code length of `z` in bits under the LZ78 parse.
pub fn lz_code_length(z: &[u8], d: u16) -> Result<f64> {
    Ok(parse(z, d)?.code_bits)
}
