use std::cmp::Ordering;
use std::fmt;

/// Projector `M^{(party)}_{outcome|input}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub party: usize,
    pub input: usize,
    pub outcome: usize,
}

impl Symbol {
    pub fn new(party: usize, input: usize, outcome: usize) -> Self {
        Self { party, input, outcome }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}|{}", party_letter(self.party), self.outcome, self.input)
    }
}

fn party_letter(p: usize) -> String {
    if p < 26 {
        char::from(b'A' + p as u8).to_string()
    } else {
        format!("P{p}")
    }
}

/// Canonical product of projectors: symbols grouped by party (stable),
/// no two adjacent symbols of a party share an input. Ordered by length,
/// then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn symbol(s: Symbol) -> Self {
        Word(vec![s])
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Symbols of one party, in operator order.
    pub fn party(&self, p: usize) -> &[Symbol] {
        let start = self.0.partition_point(|s| s.party < p);
        let end = self.0.partition_point(|s| s.party <= p);
        &self.0[start..end]
    }

    /// `w†`: each party's sequence reversed.
    pub fn adjoint(&self) -> Word {
        let mut out = Vec::with_capacity(self.0.len());
        let mut start = 0;
        while start < self.0.len() {
            let p = self.0[start].party;
            let end = start + self.0[start..].iter().take_while(|s| s.party == p).count();
            out.extend(self.0[start..end].iter().rev());
            start = end;
        }
        Word(out)
    }

    /// `canonical(self · other)`.
    pub fn mul(&self, other: &Word) -> Option<Word> {
        let mut seq = self.0.clone();
        seq.extend_from_slice(&other.0);
        canonicalize(&seq)
    }

    /// Representative of `{w, w†}` used to index real moments.
    pub fn moment_key(&self) -> Word {
        let adj = self.adjoint();
        if adj < *self {
            adj
        } else {
            self.clone()
        }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Reduces a product of projectors: parties commute (stable sort), `P·P = P`,
/// and distinct outcomes of one input are orthogonal (`None` is zero).
pub fn canonicalize(symbols: &[Symbol]) -> Option<Word> {
    let mut sorted = symbols.to_vec();
    sorted.sort_by_key(|s| s.party);
    let mut out: Vec<Symbol> = Vec::with_capacity(sorted.len());
    for s in sorted {
        match out.last() {
            Some(top) if top.party == s.party && top.input == s.input => {
                if top.outcome != s.outcome {
                    return None;
                }
            }
            _ => out.push(s),
        }
    }
    Some(Word(out))
}
