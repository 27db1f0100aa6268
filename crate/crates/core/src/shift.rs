//! Finite-alphabet topologically mixing subshifts, plus truncations of
//! countable Markov shifts. Symbols are 1-based. Words are enumerated in
//! lexicographic order and streamed; nothing here materialises the full word
//! list.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

pub type Symbol = u16;

/// A finite admissible word. Ordered lexicographically (derived Ord on the
/// symbol vector), which is the enumeration order everywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|s| *s <= 9) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join("-"))
        }
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

/// A mixing subshift of finite type over symbols 1..=alphabet, given by a 0/1
/// transition matrix (row = current symbol, column = allowed successor).
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSpace {
    alphabet: usize,
    transition: Vec<bool>, // row-major alphabet x alphabet
    mixing_witness: Option<usize>,
}

impl ShiftSpace {
    /// Validate a 0/1 matrix and compute the primitivity witness: the smallest
    /// N with transition^N entrywise positive, searched up to alphabet^2
    /// (a hair above the Wielandt bound, so absence is conclusive).
    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
            for (j, &e) in r.iter().enumerate() {
                if e > 1 {
                    return Err(Error::NonBinaryEntry { row: i + 1, col: j + 1 });
                }
            }
        }
        if n == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        for i in 0..n {
            if rows[i].iter().all(|&e| e == 0) {
                return Err(Error::ZeroRowOrColumn {
                    kind: "row",
                    index: i + 1,
                });
            }
        }
        for j in 0..n {
            if (0..n).all(|i| rows[i][j] == 0) {
                return Err(Error::ZeroRowOrColumn {
                    kind: "column",
                    index: j + 1,
                });
            }
        }
        let transition: Vec<bool> = rows.iter().flatten().map(|&e| e == 1).collect();
        let mixing_witness = mixing_witness(&transition, n);
        Ok(ShiftSpace {
            alphabet: n,
            transition,
            mixing_witness,
        })
    }

    /// Full shift on k symbols.
    pub fn full(k: usize) -> Self {
        assert!(k >= 1);
        ShiftSpace {
            alphabet: k,
            transition: vec![true; k * k],
            mixing_witness: Some(1),
        }
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet
    }

    pub fn mixing_witness(&self) -> Option<usize> {
        self.mixing_witness
    }

    pub fn is_full(&self) -> bool {
        self.transition.iter().all(|&b| b)
    }

    #[inline]
    pub fn allows(&self, a: Symbol, b: Symbol) -> bool {
        self.transition[(a as usize - 1) * self.alphabet + (b as usize - 1)]
    }

    pub fn is_admissible(&self, w: &[Symbol]) -> bool {
        w.windows(2).all(|p| self.allows(p[0], p[1]))
            && w.iter().all(|&s| s >= 1 && (s as usize) <= self.alphabet)
    }

    pub fn is_cyclically_admissible(&self, w: &[Symbol]) -> bool {
        !w.is_empty() && self.is_admissible(w) && self.allows(w[w.len() - 1], w[0])
    }

    /// Stream admissible words of length n in lexicographic order, optionally
    /// pinned to a first symbol.
    pub fn words(&self, n: usize, anchor: Option<Symbol>) -> WordIter<'_> {
        WordIter::new(self, n, anchor, false)
    }

    /// Stream words of period-n points: cyclically admissible words of length
    /// n starting with `anchor`.
    pub fn periodic_words(&self, n: usize, anchor: Symbol) -> WordIter<'_> {
        WordIter::new(self, n, Some(anchor), true)
    }

    /// Number of admissible words of length n (saturating at u128::MAX).
    pub fn word_count(&self, n: usize) -> u128 {
        if n == 0 {
            return 1;
        }
        let p = self.count_power(n - 1);
        let mut total: u128 = 0;
        for v in &p {
            total = total.saturating_add(*v);
        }
        total
    }

    /// trace(T^n): number of period-n points (all anchors).
    pub fn periodic_point_count(&self, n: usize) -> u128 {
        let k = self.alphabet;
        let m = self.count_power_matrix(n);
        let mut tr: u128 = 0;
        for i in 0..k {
            tr = tr.saturating_add(m[i * k + i]);
        }
        tr
    }

    fn count_power_matrix(&self, n: usize) -> Vec<u128> {
        let k = self.alphabet;
        let base: Vec<u128> = self.transition.iter().map(|&b| u128::from(b)).collect();
        let mut acc: Vec<u128> = {
            let mut id = vec![0u128; k * k];
            for i in 0..k {
                id[i * k + i] = 1;
            }
            id
        };
        for _ in 0..n {
            acc = mat_mul_sat(&acc, &base, k);
        }
        acc
    }

    fn count_power(&self, n: usize) -> Vec<u128> {
        let k = self.alphabet;
        let m = self.count_power_matrix(n);
        let mut total: Vec<u128> = vec![0; k];
        for i in 0..k {
            for j in 0..k {
                total[i] = total[i].saturating_add(m[i * k + j]);
            }
        }
        total
    }

    /// Smallest connector length k <= mixing witness such that every ordered
    /// symbol pair (a, b) admits a word w of length k with a w b admissible;
    /// stores the lexicographically smallest such w per pair.
    pub fn connectivity(&self) -> Result<ConnectivityData> {
        let witness = self.mixing_witness.ok_or(Error::NotMixing {
            cap: self.alphabet * self.alphabet,
        })?;
        let k = self.alphabet;
        // bool powers up to witness + 1 edges
        let mut pows: Vec<Vec<bool>> = Vec::with_capacity(witness + 2);
        pows.push({
            let mut id = vec![false; k * k];
            for i in 0..k {
                id[i * k + i] = true;
            }
            id
        });
        for j in 1..=witness + 1 {
            let prev = &pows[j - 1];
            pows.push(bool_mul(prev, &self.transition, k));
        }
        for len in 1..=witness {
            let reach = &pows[len + 1]; // paths with len+1 edges: a -> w -> b
            if reach.iter().all(|&b| b) {
                let mut connectors = BTreeMap::new();
                let mut set = BTreeSet::new();
                for a in 1..=k as Symbol {
                    for b in 1..=k as Symbol {
                        let w = self.smallest_connector(a, b, len, &pows);
                        set.insert(w.clone());
                        connectors.insert((a, b), w);
                    }
                }
                return Ok(ConnectivityData {
                    connector_len: len,
                    connectors,
                    connector_set: set,
                });
            }
        }
        // witness exists, so length witness - 1 connects everything when
        // witness >= 2 and length 1 works for full shifts; reaching here
        // means the witness bound was too tight, which cannot happen.
        Err(Error::NotMixing {
            cap: self.alphabet * self.alphabet,
        })
    }

    fn smallest_connector(
        &self,
        a: Symbol,
        b: Symbol,
        len: usize,
        pows: &[Vec<bool>],
    ) -> Word {
        let k = self.alphabet;
        let mut w = Vec::with_capacity(len);
        let mut prev = a;
        for i in 1..=len {
            let remaining = len - i + 1; // edges still needed to reach b
            let mut chosen = None;
            for s in 1..=k as Symbol {
                if self.allows(prev, s)
                    && pows[remaining][(s as usize - 1) * k + (b as usize - 1)]
                {
                    chosen = Some(s);
                    break;
                }
            }
            let s = chosen.expect("connector existence certified by reachability");
            w.push(s);
            prev = s;
        }
        Word(w)
    }
}

fn mat_mul_sat(a: &[u128], b: &[u128], k: usize) -> Vec<u128> {
    let mut out = vec![0u128; k * k];
    for i in 0..k {
        for l in 0..k {
            let ail = a[i * k + l];
            if ail == 0 {
                continue;
            }
            for j in 0..k {
                out[i * k + j] = out[i * k + j].saturating_add(ail.saturating_mul(b[l * k + j]));
            }
        }
    }
    out
}

fn bool_mul(a: &[bool], b: &[bool], k: usize) -> Vec<bool> {
    let mut out = vec![false; k * k];
    for i in 0..k {
        for l in 0..k {
            if a[i * k + l] {
                for j in 0..k {
                    if b[l * k + j] {
                        out[i * k + j] = true;
                    }
                }
            }
        }
    }
    out
}

fn mixing_witness(transition: &[bool], k: usize) -> Option<usize> {
    let cap = (k * k).max(1);
    let mut p = transition.to_vec();
    for n in 1..=cap {
        if p.iter().all(|&b| b) {
            return Some(n);
        }
        p = bool_mul(&p, transition, k);
    }
    None
}

/// Streaming lexicographic enumeration. Every symbol has an out-edge (no zero
/// rows), so greedy smallest-extension always completes a word and no
/// backtracking over dead ends is needed.
pub struct WordIter<'a> {
    shift: &'a ShiftSpace,
    len: usize,
    anchor: Option<Symbol>,
    cyclic: bool,
    current: Vec<Symbol>,
    started: bool,
    done: bool,
}

impl<'a> WordIter<'a> {
    fn new(shift: &'a ShiftSpace, len: usize, anchor: Option<Symbol>, cyclic: bool) -> Self {
        WordIter {
            shift,
            len,
            anchor,
            cyclic,
            current: Vec::with_capacity(len),
            started: false,
            done: len == 0,
        }
    }

    fn first_symbol_candidates(&self) -> std::ops::RangeInclusive<Symbol> {
        match self.anchor {
            Some(a) => a..=a,
            None => 1..=self.shift.alphabet_len() as Symbol,
        }
    }

    fn fill_greedy(&mut self) -> bool {
        while self.current.len() < self.len {
            let prev = *self.current.last().unwrap();
            let mut found = false;
            for s in 1..=self.shift.alphabet_len() as Symbol {
                if self.shift.allows(prev, s) {
                    self.current.push(s);
                    found = true;
                    break;
                }
            }
            if !found {
                return false; // unreachable: no zero rows
            }
        }
        true
    }

    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            for s in self.first_symbol_candidates() {
                self.current.clear();
                self.current.push(s);
                if self.fill_greedy() {
                    return true;
                }
            }
            return false;
        }
        loop {
            // bump the deepest position that still has a larger admissible symbol
            while let Some(&last) = self.current.last() {
                let depth = self.current.len();
                let can_bump_here = depth > 1 || self.anchor.is_none();
                if can_bump_here {
                    let next = ((last + 1)..=self.shift.alphabet_len() as Symbol).find(|&s| {
                        if depth == 1 {
                            true
                        } else {
                            self.shift.allows(self.current[depth - 2], s)
                        }
                    });
                    if let Some(s) = next {
                        *self.current.last_mut().unwrap() = s;
                        if self.fill_greedy() {
                            return true;
                        }
                        continue;
                    }
                }
                self.current.pop();
            }
            return false;
        }
    }
}

impl Iterator for WordIter<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        loop {
            if !self.advance() {
                self.done = true;
                return None;
            }
            if !self.cyclic
                || self
                    .shift
                    .allows(self.current[self.len - 1], self.current[0])
            {
                return Some(Word(self.current.clone()));
            }
        }
    }
}

/// Connector words certifying topological mixing: for every ordered pair
/// (a, b) a word w of fixed length with a w b admissible.
#[derive(Debug, Clone)]
pub struct ConnectivityData {
    pub connector_len: usize,
    pub connectors: BTreeMap<(Symbol, Symbol), Word>,
    pub connector_set: BTreeSet<Word>,
}

impl ConnectivityData {
    pub fn connector(&self, a: Symbol, b: Symbol) -> &Word {
        &self.connectors[&(a, b)]
    }
}

/// Finite truncations of a countable Markov shift: level l keeps symbols
/// 1..=l. Levels whose restriction is invalid or not primitive are skipped
/// and reported, not fatal.
#[derive(Debug)]
pub struct TruncationFamily {
    pub levels: Vec<(usize, ShiftSpace)>,
    pub skipped: Vec<(usize, String)>,
}

pub fn truncate<G>(generator: G, levels: &[usize]) -> Result<TruncationFamily>
where
    G: Fn(usize, usize) -> bool,
{
    if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadModel {
            reason: "truncation levels must be strictly increasing and nonempty".into(),
        });
    }
    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    for &l in levels {
        if l == 0 {
            skipped.push((l, "level 0 has no symbols".to_string()));
            continue;
        }
        let rows: Vec<Vec<u8>> = (1..=l)
            .map(|i| (1..=l).map(|j| u8::from(generator(i, j))).collect())
            .collect();
        match ShiftSpace::from_matrix(&rows) {
            Ok(s) if s.mixing_witness().is_some() => kept.push((l, s)),
            Ok(_) => skipped.push((l, "restriction is not primitive".to_string())),
            Err(e) => skipped.push((l, e.to_string())),
        }
    }
    if kept.is_empty() {
        return Err(Error::NoPrimitiveLevels);
    }
    Ok(TruncationFamily {
        levels: kept,
        skipped,
    })
}

pub fn golden_mean() -> ShiftSpace {
    ShiftSpace::from_matrix(&[vec![1, 1], vec![1, 0]]).expect("static matrix")
}
