use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use crate::shift_core::{Alphabet, Sym, Word};

/// A sliding block code given by a finite table: output at `i` is
/// `table[x[i-memory ..= i+anticipation]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "BlockMapDoc", try_from = "BlockMapDoc")]
pub struct BlockMap {
    source: Alphabet,
    target: Alphabet,
    memory: usize,
    anticipation: usize,
    table: HashMap<Word, Sym>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowDoc {
    pub window: Vec<String>,
    pub output: String,
}

/// Serialized form of a block map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockMapDoc {
    pub source_alphabet: Vec<String>,
    pub target_alphabet: Vec<String>,
    pub memory: usize,
    pub anticipation: usize,
    pub table: Vec<WindowDoc>,
}

impl BlockMap {
    pub fn new(
        source: Alphabet,
        target: Alphabet,
        memory: usize,
        anticipation: usize,
        table: HashMap<Word, Sym>,
    ) -> Result<Self> {
        let width = memory + anticipation + 1;
        for (w, &s) in &table {
            if w.len() != width {
                return Err(Error::InvalidInput(format!(
                    "window of length {} in a code of width {width}",
                    w.len()
                )));
            }
            if w.iter().any(|&a| a as usize >= source.len()) || s as usize >= target.len() {
                return Err(Error::InvalidInput("table entry outside the alphabets".into()));
            }
        }
        Ok(BlockMap {
            source,
            target,
            memory,
            anticipation,
            table,
        })
    }

    /// Identity 1-block code.
    pub fn identity(alphabet: &Alphabet) -> Self {
        let table = alphabet.symbols().map(|a| (vec![a], a)).collect();
        BlockMap {
            source: alphabet.clone(),
            target: alphabet.clone(),
            memory: 0,
            anticipation: 0,
            table,
        }
    }

    /// 1-block code from a symbol map.
    pub fn one_block(source: &Alphabet, target: &Alphabet, f: impl Fn(Sym) -> Sym) -> Self {
        let table = source.symbols().map(|a| (vec![a], f(a))).collect();
        BlockMap {
            source: source.clone(),
            target: target.clone(),
            memory: 0,
            anticipation: 0,
            table,
        }
    }

    /// 1-block code from `(source name, target name)` pairs.
    pub fn relabeling(source: &Alphabet, target: &Alphabet, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut table = HashMap::new();
        for (a, b) in pairs {
            let a = source
                .sym(a)
                .ok_or_else(|| Error::InvalidInput(format!("unknown source symbol {a:?}")))?;
            let b = target
                .sym(b)
                .ok_or_else(|| Error::InvalidInput(format!("unknown target symbol {b:?}")))?;
            table.insert(vec![a], b);
        }
        Self::new(source.clone(), target.clone(), 0, 0, table)
    }

    /// Tabulates `f` on the given windows.
    pub fn tabulate<'a>(
        source: &Alphabet,
        target: &Alphabet,
        memory: usize,
        anticipation: usize,
        windows: impl IntoIterator<Item = &'a Word>,
        f: impl Fn(&[Sym]) -> Sym,
    ) -> Result<Self> {
        let table = windows.into_iter().map(|w| (w.clone(), f(w))).collect();
        Self::new(source.clone(), target.clone(), memory, anticipation, table)
    }

    /// As [`BlockMap::tabulate`] with a rule that may reject a window.
    pub fn tabulate_fallible<'a>(
        source: &Alphabet,
        target: &Alphabet,
        memory: usize,
        anticipation: usize,
        windows: impl IntoIterator<Item = &'a Word>,
        f: impl Fn(&[Sym]) -> Result<Sym>,
    ) -> Result<Self> {
        let table = windows.into_iter().map(|w| Ok((w.clone(), f(w)?))).collect::<Result<_>>()?;
        Self::new(source.clone(), target.clone(), memory, anticipation, table)
    }

    pub fn source(&self) -> &Alphabet {
        &self.source
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn anticipation(&self) -> usize {
        self.anticipation
    }

    /// Window length `memory + anticipation + 1`.
    pub fn width(&self) -> usize {
        self.memory + self.anticipation + 1
    }

    pub fn is_one_block(&self) -> bool {
        self.width() == 1
    }

    pub fn table(&self) -> &HashMap<Word, Sym> {
        &self.table
    }

    pub fn lookup(&self, window: &[Sym]) -> Option<Sym> {
        self.table.get(window).copied()
    }

    /// Symbol image of a 1-block code.
    pub fn symbol(&self, a: Sym) -> Option<Sym> {
        debug_assert!(self.is_one_block());
        self.lookup(&[a])
    }

    /// Applies the code to a finite word; the output is shorter by `width - 1`.
    pub fn apply(&self, w: &[Sym]) -> Result<Word> {
        let width = self.width();
        if w.len() < width {
            return Err(Error::WindowTooShort {
                need: width,
                got: w.len(),
            });
        }
        w.windows(width)
            .map(|win| {
                self.lookup(win)
                    .ok_or_else(|| Error::UndefinedWindow(self.source.render(win)))
            })
            .collect()
    }

    /// `self ∘ inner`: apply `inner` first. The table covers every word whose windows
    /// are all in `inner`'s table and whose image is in `self`'s domain.
    pub fn compose(&self, inner: &BlockMap, budget: &Budget) -> Result<BlockMap> {
        if inner.target != self.source {
            return Err(Error::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                inner.target, self.source
            )));
        }
        let width = self.width() + inner.width() - 1;
        let windows = inner.chain_windows(width, budget)?;
        let mut table = HashMap::new();
        for w in windows {
            let mid = inner.apply(&w)?;
            if let Ok(out) = self.apply(&mid) {
                table.insert(w, out[0]);
            }
        }
        BlockMap::new(
            inner.source.clone(),
            self.target.clone(),
            self.memory + inner.memory,
            self.anticipation + inner.anticipation,
            table,
        )
    }

    /// Words of length `len` all of whose windows lie in the table.
    pub fn chain_windows(&self, len: usize, budget: &Budget) -> Result<Vec<Word>> {
        let width = self.width();
        assert!(len >= width);
        let mut by_prefix: HashMap<&[Sym], Vec<Sym>> = HashMap::new();
        for w in self.table.keys() {
            by_prefix.entry(&w[..width - 1]).or_default().push(w[width - 1]);
        }
        let mut cur: Vec<Word> = self.table.keys().cloned().collect();
        cur.sort();
        for _ in width..len {
            let mut next = Vec::new();
            for w in &cur {
                if let Some(ext) = by_prefix.get(&w[w.len() + 1 - width..]) {
                    for &a in ext {
                        let mut v = w.clone();
                        v.push(a);
                        next.push(v);
                    }
                }
            }
            budget.check_words(next.len() as u64, "composition windows")?;
            next.sort();
            cur = next;
        }
        Ok(cur)
    }

    pub fn to_doc(&self) -> BlockMapDoc {
        let sorted: BTreeMap<&Word, Sym> = self.table.iter().map(|(w, &s)| (w, s)).collect();
        BlockMapDoc {
            source_alphabet: self.source.names().to_vec(),
            target_alphabet: self.target.names().to_vec(),
            memory: self.memory,
            anticipation: self.anticipation,
            table: sorted
                .into_iter()
                .map(|(w, s)| WindowDoc {
                    window: w.iter().map(|&a| self.source.name(a).to_string()).collect(),
                    output: self.target.name(s).to_string(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &BlockMapDoc) -> Result<Self> {
        let source = Alphabet::with_blank(doc.source_alphabet.clone())?;
        let target = Alphabet::with_blank(doc.target_alphabet.clone())?;
        let width = doc.memory + doc.anticipation + 1;
        let mut table = HashMap::new();
        for (i, row) in doc.table.iter().enumerate() {
            if row.window.len() != width {
                return Err(Error::Malformed(format!(
                    "table[{i}].window has length {} but the code width is {width}",
                    row.window.len()
                )));
            }
            let w = row
                .window
                .iter()
                .map(|s| {
                    source.sym(s).ok_or_else(|| {
                        Error::Malformed(format!("table[{i}].window: unknown symbol {s:?}"))
                    })
                })
                .collect::<Result<Word>>()?;
            let out = target.sym(&row.output).ok_or_else(|| {
                Error::Malformed(format!("table[{i}].output: unknown symbol {:?}", row.output))
            })?;
            if table.insert(w, out).is_some() {
                return Err(Error::Malformed(format!("table[{i}]: duplicate window")));
            }
        }
        Self::new(source, target, doc.memory, doc.anticipation, table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BlockMapDoc = serde_json::from_str(text)
            .map_err(|e| Error::Malformed(format!("line {} column {}: {e}", e.line(), e.column())))?;
        Self::from_doc(&doc)
    }
}

impl From<BlockMap> for BlockMapDoc {
    fn from(m: BlockMap) -> Self {
        m.to_doc()
    }
}

impl TryFrom<BlockMapDoc> for BlockMap {
    type Error = Error;

    fn try_from(doc: BlockMapDoc) -> Result<Self> {
        BlockMap::from_doc(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor() -> BlockMap {
        let a = Alphabet::digits(2);
        let windows: Vec<Word> = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        BlockMap::tabulate(&a, &a, 0, 1, &windows, |w| w[0] ^ w[1]).unwrap()
    }

    #[test]
    fn apply_relabel_and_xor() {
        let x = Alphabet::digits(3);
        let y = Alphabet::new(["a", "b"]).unwrap();
        let pi = BlockMap::relabeling(&x, &y, &[("0", "a"), ("1", "b"), ("2", "b")]).unwrap();
        assert_eq!(y.render(&pi.apply(&x.parse("0120").unwrap()).unwrap()), "abba");
        let a = Alphabet::digits(2);
        assert_eq!(a.render(&xor().apply(&a.parse("0110").unwrap()).unwrap()), "101");
        assert!(matches!(xor().apply(&[0]), Err(Error::WindowTooShort { .. })));
    }

    #[test]
    fn xor_twice_is_second_difference() {
        let a = Alphabet::digits(2);
        let c = xor().compose(&xor(), &Budget::default()).unwrap();
        assert_eq!(c.width(), 3);
        for bits in 0u32..64 {
            let w: Word = (0..6).map(|i| (bits >> i) & 1).collect();
            let direct = xor().apply(&xor().apply(&w).unwrap()).unwrap();
            assert_eq!(c.apply(&w).unwrap(), direct);
            let second: Word = w.windows(3).map(|t| t[0] ^ t[2]).collect();
            assert_eq!(direct, second);
        }
        let id = BlockMap::identity(&a);
        assert_eq!(id.compose(&xor(), &Budget::default()).unwrap(), xor());
        assert_eq!(xor().compose(&id, &Budget::default()).unwrap(), xor());
    }

    #[test]
    fn document_round_trip() {
        let c = xor();
        assert_eq!(BlockMap::from_json(&c.to_json()).unwrap(), c);
    }
}
