use std::fmt;

use super::{Group, GroupDescriptor, GroupError, GroupKind};

/// Freely reduced word. Letter `i+1` is generator `i`, `-(i+1)` its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreeWord(Vec<i8>);

impl FreeWord {
    pub fn letters(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<i8> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<i8> {
        self.0.last().copied()
    }

    /// Reduces the given letters.
    pub fn from_letters(letters: &[i8]) -> FreeWord {
        let mut out: Vec<i8> = Vec::with_capacity(letters.len());
        for &l in letters {
            assert!(l != 0, "letter 0 is not a generator");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord(out)
    }
}

pub fn letter_char(l: i8) -> char {
    let base = (b'a' + (l.unsigned_abs() - 1)) as char;
    if l < 0 {
        base.to_ascii_uppercase()
    } else {
        base
    }
}

pub fn char_letter(c: char) -> Option<i8> {
    if c.is_ascii_lowercase() && c != 'e' {
        Some((c as u8 - b'a' + 1) as i8)
    } else if c.is_ascii_uppercase() && c != 'E' {
        Some(-((c.to_ascii_lowercase() as u8 - b'a' + 1) as i8))
    } else {
        None
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for &l in &self.0 {
            write!(f, "{}", letter_char(l))?;
        }
        Ok(())
    }
}

/// Free group on `a, b, ...` (rank at most 4). Inverses print in upper case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeGroup {
    rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Self {
        assert!((1..=4).contains(&rank), "free group rank must be in 1..=4");
        FreeGroup { rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn word(&self, text: &str) -> FreeWord {
        self.parse_elem(text).expect("valid free word")
    }
}

impl Group for FreeGroup {
    type Elem = FreeWord;

    fn descriptor(&self) -> GroupDescriptor {
        GroupDescriptor {
            kind: GroupKind::FreeGroup(self.rank),
            generators: (1..=self.rank as i8).map(|l| letter_char(l).to_string()).collect(),
        }
    }

    fn identity(&self) -> FreeWord {
        FreeWord::default()
    }

    fn mul(&self, a: &FreeWord, b: &FreeWord) -> FreeWord {
        let mut k = 0;
        while k < a.0.len() && k < b.0.len() && a.0[a.0.len() - 1 - k] == -b.0[k] {
            k += 1;
        }
        let mut out = Vec::with_capacity(a.0.len() + b.0.len() - 2 * k);
        out.extend_from_slice(&a.0[..a.0.len() - k]);
        out.extend_from_slice(&b.0[k..]);
        FreeWord(out)
    }

    fn inv(&self, a: &FreeWord) -> FreeWord {
        FreeWord(a.0.iter().rev().map(|l| -l).collect())
    }

    fn generators(&self) -> Vec<FreeWord> {
        (1..=self.rank as i8).map(|l| FreeWord(vec![l])).collect()
    }

    fn parse_elem(&self, s: &str) -> Result<FreeWord, GroupError> {
        let t = s.trim();
        if t == "e" || t.is_empty() {
            return Ok(FreeWord::default());
        }
        let mut letters = Vec::new();
        for c in t.chars() {
            match char_letter(c) {
                Some(l) if (l.unsigned_abs() as usize) <= self.rank => letters.push(l),
                _ => {
                    return Err(GroupError::Parse {
                        group: self.descriptor().kind.to_string(),
                        text: s.to_string(),
                        reason: format!("bad letter {c:?}"),
                    })
                }
            }
        }
        Ok(FreeWord::from_letters(&letters))
    }

    fn word_length(&self, g: &FreeWord) -> Option<u64> {
        Some(g.len() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation() {
        let f = FreeGroup::new(2);
        let a = f.word("a");
        assert_eq!(f.mul(&a, &f.inv(&a)), f.identity());
        assert_eq!(f.identity().to_string(), "e");
        assert_eq!(f.parse("word:a b a^-1").unwrap().to_string(), "abA");
        assert_eq!(f.mul(&f.word("abA"), &f.word("aB")), f.word("a"));
        assert_eq!(f.word("aAb"), f.word("b"));
        assert!(f.parse("c").is_err());
    }
}
