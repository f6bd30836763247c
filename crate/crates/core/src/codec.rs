//! Prefix-free coding of posets-with-realisers over the 3n-symbol alphabet
//! `{x_i, x_m, x_f}`, plus the binary code that serialises an embedding into
//! a cube. The decoder is strict: any deviation from the block grammar is
//! rejected, since prefix-freeness rests on that grammar.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poset::{Elem, Poset};
use crate::realiser::LocalRealiser;

/// Symbol role within a codeword.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tag {
    /// First element of a list.
    Init,
    /// Interior element.
    Mid,
    /// Final element of the whole word (rewritten from `Mid`).
    Fin,
}

/// A word over the alphabet `{x_i, x_m, x_f : x in 1..=n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    pub n: u32,
    pub symbols: Vec<(Elem, Tag)>,
}

impl Codeword {
    /// Cost in bits of transmitting the word: one symbol takes
    /// `log2(3n)` bits.
    pub fn bit_cost(&self) -> f64 {
        self.symbols.len() as f64 * (3.0 * self.n as f64).log2()
    }
}

/// Encodes the realiser's lists in the given order: each list contributes an
/// `Init` symbol then `Mid` symbols, and the very last symbol is rewritten
/// to `Fin`. All lists must have length at least two; drop trivial lists
/// first (they cover nothing, so the realiser stays a realiser).
pub fn crespelle_encode(realiser: &LocalRealiser, list_order: &[usize]) -> Result<Codeword> {
    let lists = realiser.lists();
    if lists.is_empty() {
        return Err(Error::EmptyRealiser);
    }
    let mut seen = vec![false; lists.len()];
    for &i in list_order {
        if i >= lists.len() || seen[i] {
            return Err(Error::Parameter("list order is not a permutation of the lists".into()));
        }
        seen[i] = true;
    }
    if list_order.len() != lists.len() {
        return Err(Error::Parameter("list order is not a permutation of the lists".into()));
    }
    for &i in list_order {
        if lists[i].len() < 2 {
            return Err(Error::TrivialList(i));
        }
    }

    let mut symbols = Vec::with_capacity(lists.iter().map(Vec::len).sum());
    for &i in list_order {
        for (pos, &e) in lists[i].iter().enumerate() {
            symbols.push((e, if pos == 0 { Tag::Init } else { Tag::Mid }));
        }
    }
    let last = symbols.last_mut().expect("nonempty by construction");
    debug_assert_eq!(last.1, Tag::Mid);
    last.1 = Tag::Fin;
    Ok(Codeword { n: realiser.n(), symbols })
}

/// Splits a codeword back into lists and infers the order: `a < b` iff some
/// list places `a` before `b` and no list places `b` before `a`. For a word
/// encoding a valid local realiser this recovers the host poset exactly.
pub fn crespelle_decode(word: &Codeword) -> Result<(Vec<Vec<Elem>>, Poset)> {
    let symbols = &word.symbols;
    if symbols.is_empty() {
        return Err(Error::Grammar("empty codeword".into()));
    }
    if symbols[0].1 != Tag::Init {
        return Err(Error::Grammar("first symbol must be an Init".into()));
    }
    for (i, &(e, tag)) in symbols.iter().enumerate() {
        if e < 1 || e > word.n {
            return Err(Error::Range { id: e as u64, n: word.n as u64 });
        }
        match tag {
            Tag::Fin if i + 1 != symbols.len() => {
                return Err(Error::Grammar(format!("Fin tag at position {i} is not final")));
            }
            Tag::Mid if i + 1 == symbols.len() => {
                return Err(Error::Grammar("final symbol must carry the Fin tag".into()));
            }
            _ => {}
        }
    }

    let mut lists: Vec<Vec<Elem>> = Vec::new();
    for &(e, tag) in symbols {
        if tag == Tag::Init {
            lists.push(vec![e]);
        } else {
            lists.last_mut().expect("leading Init checked").push(e);
        }
    }
    for list in &lists {
        if list.len() < 2 {
            return Err(Error::Grammar("block of length one".into()));
        }
        let mut sorted = list.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Grammar("repeated element within a block".into()));
        }
    }

    let n = word.n as usize;
    let mut before = vec![false; n * n];
    for list in &lists {
        for j in 1..list.len() {
            for i in 0..j {
                before[(list[i] as usize - 1) * n + (list[j] as usize - 1)] = true;
            }
        }
    }
    let mut relations = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if before[a * n + b] && !before[b * n + a] {
                relations.push((a as Elem + 1, b as Elem + 1));
            }
        }
    }
    let poset = Poset::new(word.n, &relations)?;
    Ok((lists, poset))
}

/// Bit sequence; serialised as an ASCII 0/1 line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BitString {
    pub bits: Vec<bool>,
}

fn header_len(n: u32) -> u32 {
    // ceil(log2 n)
    u32::BITS - (n - 1).leading_zeros()
}

/// Binary code for an embedding of an `n`-element poset into the `d`-cube:
/// `ceil(log2 n)` header bits carry `d` big-endian, then one `d`-bit block
/// per element, bit `j` flagging membership of coordinate `j`.
pub fn twodim_binary_encode(d: u32, images: &[u64]) -> Result<BitString> {
    let n = images.len() as u32;
    if n == 0 {
        return Err(Error::Parameter("need at least one image".into()));
    }
    let h = header_len(n);
    if h < 32 && d >= 1 << h {
        return Err(Error::HeaderRange { d, n });
    }
    for &img in images {
        if d < 64 && img >> d != 0 {
            return Err(Error::Parameter(format!(
                "image {img:#b} uses a coordinate beyond d={d}"
            )));
        }
    }
    let mut bits = Vec::with_capacity((h + n * d) as usize);
    for i in (0..h).rev() {
        bits.push(d >> i & 1 == 1);
    }
    for &img in images {
        for j in 0..d {
            bits.push(img >> j & 1 == 1);
        }
    }
    Ok(BitString { bits })
}

/// Inverse of [`twodim_binary_encode`]; returns `(d, images)`.
pub fn twodim_binary_decode(bits: &BitString, n: u32) -> Result<(u32, Vec<u64>)> {
    if n == 0 {
        return Err(Error::Parameter("need n >= 1".into()));
    }
    let h = header_len(n) as usize;
    if bits.bits.len() < h {
        return Err(Error::Grammar("bit string shorter than its header".into()));
    }
    let mut d = 0u32;
    for &bit in &bits.bits[..h] {
        d = d << 1 | bit as u32;
    }
    let expected = h + (n as usize) * d as usize;
    if bits.bits.len() != expected {
        return Err(Error::Grammar(format!(
            "bit string has {} bits, want {expected} for n={n}, d={d}",
            bits.bits.len()
        )));
    }
    let mut images = Vec::with_capacity(n as usize);
    for block in bits.bits[h..].chunks(d.max(1) as usize) {
        if d == 0 {
            break;
        }
        let mut img = 0u64;
        for (j, &bit) in block.iter().enumerate() {
            if bit {
                img |= 1 << j;
            }
        }
        images.push(img);
    }
    if d == 0 {
        images = vec![0; n as usize];
    }
    Ok((d, images))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Poset;
    use crate::realiser::verify_local_realiser;

    fn antichain_realiser() -> LocalRealiser {
        LocalRealiser::new(2, vec![vec![1, 2], vec![2, 1]]).unwrap()
    }

    #[test]
    fn encode_traces() {
        let w = crespelle_encode(&antichain_realiser(), &[0, 1]).unwrap();
        assert_eq!(
            w.symbols,
            vec![(1, Tag::Init), (2, Tag::Mid), (2, Tag::Init), (1, Tag::Fin)]
        );
        let chain = LocalRealiser::new(2, vec![vec![1, 2]]).unwrap();
        let w = crespelle_encode(&chain, &[0]).unwrap();
        assert_eq!(w.symbols, vec![(1, Tag::Init), (2, Tag::Fin)]);
    }

    #[test]
    fn encode_rejects_trivial_and_empty() {
        let r = LocalRealiser::new(2, vec![vec![1, 2], vec![1]]).unwrap();
        assert!(matches!(crespelle_encode(&r, &[0, 1]), Err(Error::TrivialList(1))));
        let empty = LocalRealiser::new(2, vec![]).unwrap();
        assert!(matches!(crespelle_encode(&empty, &[]), Err(Error::EmptyRealiser)));
    }

    #[test]
    fn decode_recovers_lists_and_poset() {
        let w = Codeword {
            n: 2,
            symbols: vec![(1, Tag::Init), (2, Tag::Mid), (2, Tag::Init), (1, Tag::Fin)],
        };
        let (lists, poset) = crespelle_decode(&w).unwrap();
        assert_eq!(lists, vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(poset.relation_pairs(), vec![]);

        let w = Codeword { n: 2, symbols: vec![(1, Tag::Init), (2, Tag::Fin)] };
        let (lists, poset) = crespelle_decode(&w).unwrap();
        assert_eq!(lists, vec![vec![1, 2]]);
        assert_eq!(poset.relation_pairs(), vec![(1, 2)]);
    }

    #[test]
    fn grammar_errors() {
        let block_of_one = Codeword {
            n: 2,
            symbols: vec![(1, Tag::Init), (2, Tag::Init), (1, Tag::Fin)],
        };
        assert!(matches!(crespelle_decode(&block_of_one), Err(Error::Grammar(_))));
        let no_fin = Codeword { n: 2, symbols: vec![(1, Tag::Init), (2, Tag::Mid)] };
        assert!(matches!(crespelle_decode(&no_fin), Err(Error::Grammar(_))));
        let fin_inside = Codeword {
            n: 2,
            symbols: vec![(1, Tag::Init), (2, Tag::Fin), (1, Tag::Init), (2, Tag::Fin)],
        };
        assert!(matches!(crespelle_decode(&fin_inside), Err(Error::Grammar(_))));
        let no_init = Codeword { n: 2, symbols: vec![(1, Tag::Mid), (2, Tag::Fin)] };
        assert!(matches!(crespelle_decode(&no_init), Err(Error::Grammar(_))));
    }

    #[test]
    fn roundtrip_preserves_order_and_host() {
        let p = Poset::new(3, &[(1, 3)]).unwrap();
        let r = LocalRealiser::new(3, vec![vec![2, 1, 3], vec![1, 3, 2], vec![3, 2]]).unwrap();
        assert!(verify_local_realiser(&p, &r).unwrap().valid);
        for order in [[0usize, 1, 2], [2, 0, 1]] {
            let w = crespelle_encode(&r, &order).unwrap();
            let (lists, host) = crespelle_decode(&w).unwrap();
            let want: Vec<_> = order.iter().map(|&i| r.lists()[i].clone()).collect();
            assert_eq!(lists, want);
            assert_eq!(host.relation_pairs(), p.relation_pairs());
        }
    }

    #[test]
    fn bit_costs() {
        let w = Codeword {
            n: 2,
            symbols: vec![(1, Tag::Init), (2, Tag::Mid), (2, Tag::Init), (1, Tag::Fin)],
        };
        assert!((w.bit_cost() - 4.0 * 6f64.log2()).abs() < 1e-12);
        let short = Codeword { n: 2, symbols: vec![(1, Tag::Init), (2, Tag::Fin)] };
        assert!((short.bit_cost() - 2.0 * 6f64.log2()).abs() < 1e-12);
        let empty = Codeword { n: 2, symbols: vec![] };
        assert_eq!(empty.bit_cost(), 0.0);
    }

    #[test]
    fn binary_code_traces() {
        // 2-chain embedded as {}, {1} in the 1-cube
        let bits = twodim_binary_encode(1, &[0b0, 0b1]).unwrap();
        assert_eq!(bits.bits, vec![true, false, true]);
        // header "10", blocks 00, 10, 11
        let bits = twodim_binary_encode(2, &[0b00, 0b01, 0b11]).unwrap();
        assert_eq!(
            bits.bits,
            vec![true, false, false, false, true, false, true, true]
        );
        let (d, images) = twodim_binary_decode(&bits, 3).unwrap();
        assert_eq!(d, 2);
        assert_eq!(images, vec![0b00, 0b01, 0b11]);
    }

    #[test]
    fn header_range_enforced() {
        // n = 3 gives 2 header bits, so d must stay below 4
        assert!(matches!(
            twodim_binary_encode(4, &[0, 1, 2]),
            Err(Error::HeaderRange { .. })
        ));
        assert!(twodim_binary_encode(3, &[0, 1, 2]).is_ok());
    }
}
