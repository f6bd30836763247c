//! Text wire formats. Parsers are strict and report the offending line;
//! writers emit the canonical form the parsers accept.
//!
//! ```text
//! poset <n>          realiser <n> <L>      1i 2m 2i 1f      0101...
//! < a b              <ids per line>
//! ```

use crate::codec::{BitString, Codeword, Tag};
use crate::constructions::Embedding;
use crate::error::{Error, Result};
use crate::poset::{Elem, Poset};
use crate::realiser::LocalRealiser;

fn fail(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_u32(token: &str, line: usize, what: &str) -> Result<u32> {
    token.parse().map_err(|_| fail(line, format!("expected {what}, got `{token}`")))
}

/// Numbered, non-blank lines.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

pub fn parse_poset(text: &str) -> Result<Poset> {
    let lines = content_lines(text);
    let Some(&(line, header)) = lines.first() else {
        return Err(fail(1, "missing `poset <n>` header"));
    };
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 2 || tokens[0] != "poset" {
        return Err(fail(line, "expected `poset <n>`"));
    }
    let n = parse_u32(tokens[1], line, "ground-set size")?;
    let mut relations = Vec::new();
    for &(line, l) in &lines[1..] {
        let tokens: Vec<&str> = l.split_whitespace().collect();
        if tokens.len() != 3 || tokens[0] != "<" {
            return Err(fail(line, "expected `< a b`"));
        }
        relations.push((
            parse_u32(tokens[1], line, "element id")?,
            parse_u32(tokens[2], line, "element id")?,
        ));
    }
    Poset::new(n, &relations)
}

pub fn write_poset(p: &Poset) -> String {
    let mut out = format!("poset {}\n", p.n());
    for (a, b) in p.relation_pairs() {
        out.push_str(&format!("< {a} {b}\n"));
    }
    out
}

pub fn parse_realiser(text: &str) -> Result<LocalRealiser> {
    let lines = content_lines(text);
    let Some(&(line, header)) = lines.first() else {
        return Err(fail(1, "missing `realiser <n> <L>` header"));
    };
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 3 || tokens[0] != "realiser" {
        return Err(fail(line, "expected `realiser <n> <L>`"));
    }
    let n = parse_u32(tokens[1], line, "ground-set size")?;
    let count = parse_u32(tokens[2], line, "list count")? as usize;
    if lines.len() - 1 != count {
        return Err(fail(line, format!("expected {count} list lines, found {}", lines.len() - 1)));
    }
    let mut lists = Vec::with_capacity(count);
    for &(line, l) in &lines[1..] {
        let list: Result<Vec<Elem>> =
            l.split_whitespace().map(|t| parse_u32(t, line, "element id")).collect();
        lists.push(list?);
    }
    LocalRealiser::new(n, lists)
}

pub fn write_realiser(r: &LocalRealiser) -> String {
    let mut out = format!("realiser {} {}\n", r.n(), r.list_count());
    for list in r.lists() {
        let ids: Vec<String> = list.iter().map(u32::to_string).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_codeword(text: &str) -> Result<Codeword> {
    let lines = content_lines(text);
    if lines.len() != 1 {
        return Err(fail(1, "codeword must be a single line of `<id><tag>` tokens"));
    }
    let (line, content) = lines[0];
    let mut symbols = Vec::new();
    let mut n = 0;
    for token in content.split_whitespace() {
        let (id_part, tag_char) = token.split_at(token.len() - 1);
        let tag = match tag_char {
            "i" => Tag::Init,
            "m" => Tag::Mid,
            "f" => Tag::Fin,
            other => return Err(fail(line, format!("unknown tag `{other}` in `{token}`"))),
        };
        let id = parse_u32(id_part, line, "element id")?;
        n = n.max(id);
        symbols.push((id, tag));
    }
    if symbols.is_empty() {
        return Err(fail(line, "empty codeword"));
    }
    Ok(Codeword { n, symbols })
}

pub fn write_codeword(w: &Codeword) -> String {
    let tokens: Vec<String> = w
        .symbols
        .iter()
        .map(|&(e, tag)| {
            let t = match tag {
                Tag::Init => 'i',
                Tag::Mid => 'm',
                Tag::Fin => 'f',
            };
            format!("{e}{t}")
        })
        .collect();
    tokens.join(" ") + "\n"
}

pub fn parse_bitstring(text: &str) -> Result<BitString> {
    let lines = content_lines(text);
    if lines.len() != 1 {
        return Err(fail(1, "bit string must be a single 0/1 line"));
    }
    let (line, content) = lines[0];
    let mut bits = Vec::with_capacity(content.len());
    for ch in content.chars() {
        match ch {
            '0' => bits.push(false),
            '1' => bits.push(true),
            other => return Err(fail(line, format!("unexpected character `{other}`"))),
        }
    }
    Ok(BitString { bits })
}

pub fn write_bitstring(b: &BitString) -> String {
    let mut out: String = b.bits.iter().map(|&bit| if bit { '1' } else { '0' }).collect();
    out.push('\n');
    out
}

/// `f <source-id> <target-id>` lines, ascending by source id.
pub fn write_embedding(e: &Embedding) -> String {
    let mut out = String::new();
    for (i, &t) in e.map.iter().enumerate() {
        out.push_str(&format!("f {} {}\n", i + 1, t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poset_roundtrip() {
        let p = Poset::new(3, &[(1, 2), (2, 3)]).unwrap();
        let text = write_poset(&p);
        let q = parse_poset(&text).unwrap();
        assert_eq!(p.relation_pairs(), q.relation_pairs());
    }

    #[test]
    fn poset_parse_errors_carry_line_numbers() {
        assert!(matches!(parse_poset(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_poset("poset two"), Err(Error::Parse { line: 1, .. })));
        let bad = "poset 3\n< 1 2\n< 2\n";
        assert!(matches!(parse_poset(bad), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn realiser_roundtrip() {
        let r = LocalRealiser::new(3, vec![vec![1, 2, 3], vec![3, 2, 1]]).unwrap();
        let text = write_realiser(&r);
        assert_eq!(text, "realiser 3 2\n1 2 3\n3 2 1\n");
        let back = parse_realiser(&text).unwrap();
        assert_eq!(back.lists(), r.lists());
    }

    #[test]
    fn realiser_list_count_checked() {
        assert!(matches!(
            parse_realiser("realiser 2 2\n1 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn codeword_roundtrip() {
        let text = "1i 2m 2i 1f\n";
        let w = parse_codeword(text).unwrap();
        assert_eq!(w.n, 2);
        assert_eq!(write_codeword(&w), text);
        assert!(parse_codeword("1i 2x").is_err());
    }

    #[test]
    fn bitstring_roundtrip() {
        let b = parse_bitstring("10110\n").unwrap();
        assert_eq!(write_bitstring(&b), "10110\n");
        assert!(parse_bitstring("10a").is_err());
    }
}
