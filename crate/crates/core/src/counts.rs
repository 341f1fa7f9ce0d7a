//! Substring occurrence statistics behind the adaptive Markov conditionals.
//!
//! A [`CountStore`] tracks two numbers for every gram of length `1..=s+1`
//! that has occurred in the counted string: `occ(v)`, the number of
//! (possibly overlapping) occurrences of `v` in the whole string, and
//! `ext(w)` for contexts of length `0..=s`, the number of occurrences of `w`
//! in the string minus its final symbol — i.e. occurrences that are followed
//! by at least one more symbol. Occurrence counts run one symbol ahead of
//! extension counts, which is exactly the asymmetry the smoothed conditional
//! needs between its numerator and denominator.
//!
//! Counts live in a reversed-context trie: the node for context `w` is
//! reached from the root by reading `w` backwards (most recent symbol
//! first), and holds `ext(w)` together with `occ(w·a)` for every extension
//! symbol `a` seen so far. One append touches the `s+1` nodes on the path of
//! the current history window.

use std::collections::VecDeque;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::{Error, Result};

/// Update regime of a [`CountStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Counts start empty and adapt to the input.
    Plain,
    /// Counts come from training data and are frozen afterwards.
    Fixed,
    /// Counts start from training data and keep adapting to the input.
    Preadapted,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Plain => "plain",
            Mode::Fixed => "fixed",
            Mode::Preadapted => "preadapted",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Node {
    /// ext(w): occurrences of this context in the counted string minus its
    /// last symbol.
    ext: u64,
    /// occ(w·a) keyed by next symbol `a`, sorted.
    counts: Vec<(u8, u64)>,
    /// Longer contexts `b·w` keyed by the preceding symbol `b`, sorted.
    children: Vec<(u8, u32)>,
}

/// Occurrence and extension counts of substrings up to length `s + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountStore {
    nodes: Vec<Node>,
    history: VecDeque<u8>,
    s: usize,
    mode: Mode,
    appended: u64,
    frozen: bool,
}

impl CountStore {
    pub fn new(s: usize, mode: Mode) -> Self {
        CountStore {
            nodes: vec![Node::default()],
            history: VecDeque::with_capacity(s.min(1 << 20)),
            s,
            mode,
            appended: 0,
            frozen: false,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Context-length cap `s`; grams up to `s + 1` are counted.
    pub fn depth_cap(&self) -> usize {
        self.s
    }

    /// Total symbols appended (training plus on-line).
    pub fn appended(&self) -> u64 {
        self.appended
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    fn child(&self, node: usize, back: u8) -> Option<usize> {
        let ch = &self.nodes[node].children;
        ch.binary_search_by_key(&back, |e| e.0)
            .ok()
            .map(|i| ch[i].1 as usize)
    }

    fn child_or_insert(&mut self, node: usize, back: u8) -> usize {
        match self.nodes[node]
            .children
            .binary_search_by_key(&back, |e| e.0)
        {
            Ok(i) => self.nodes[node].children[i].1 as usize,
            Err(i) => {
                let id = self.nodes.len() as u32;
                self.nodes.push(Node::default());
                self.nodes[node].children.insert(i, (back, id));
                id as usize
            }
        }
    }

    fn node_for(&self, context: &[u8]) -> Option<usize> {
        let mut node = 0usize;
        for &b in context.iter().rev() {
            node = self.child(node, b)?;
        }
        Some(node)
    }

    /// `(occ(context·next), ext(context))` at a trie node.
    pub(crate) fn node_stats(&self, node: usize, next: u8) -> (u64, u64) {
        let n = &self.nodes[node];
        let occ = n
            .counts
            .binary_search_by_key(&next, |e| e.0)
            .map(|i| n.counts[i].1)
            .unwrap_or(0);
        (occ, n.ext)
    }

    pub(crate) fn descend(&self, node: usize, back: u8) -> Option<usize> {
        self.child(node, back)
    }

    /// Occurrence count of `gram` in the counted string. The empty gram
    /// counts every boundary position, `appended + 1`.
    pub fn occ(&self, gram: &[u8]) -> u64 {
        match gram.split_last() {
            None => self.appended + 1,
            Some((&next, context)) => match self.node_for(context) {
                Some(node) => self.node_stats(node, next).0,
                None => 0,
            },
        }
    }

    /// Extension count of `context`: occurrences in the counted string minus
    /// its last symbol. `ext(∅)` equals the number of appended symbols.
    pub fn ext(&self, context: &[u8]) -> u64 {
        match self.node_for(context) {
            Some(node) => self.nodes[node].ext,
            None => 0,
        }
    }

    /// Record one more symbol: for every context length `0..=min(s, history)`
    /// bump `ext(context)` and `occ(context·symbol)`.
    pub fn append(&mut self, symbol: u8) -> Result<()> {
        if self.frozen {
            return Err(Error::FrozenStore);
        }
        let depth = self.history.len().min(self.s);
        let mut node = 0usize;
        for l in 0..=depth {
            let n = &mut self.nodes[node];
            n.ext += 1;
            match n.counts.binary_search_by_key(&symbol, |e| e.0) {
                Ok(i) => n.counts[i].1 += 1,
                Err(i) => n.counts.insert(i, (symbol, 1)),
            }
            if l < depth {
                let back = self.history[self.history.len() - 1 - l];
                node = self.child_or_insert(node, back);
            }
        }
        if self.s > 0 {
            self.history.push_back(symbol);
            if self.history.len() > self.s {
                self.history.pop_front();
            }
        }
        self.appended += 1;
        Ok(())
    }

    fn freeze(&mut self) {
        self.frozen = true;
    }

    /// Walk every stored (context, stats) pair; test support.
    pub fn for_each_context(&self, mut f: impl FnMut(&[u8], u64, &[(u8, u64)])) {
        let mut stack: Vec<(usize, Vec<u8>)> = vec![(0, Vec::new())];
        while let Some((id, ctx)) = stack.pop() {
            let node = &self.nodes[id];
            f(&ctx, node.ext, &node.counts);
            for &(b, child) in &node.children {
                let mut longer = Vec::with_capacity(ctx.len() + 1);
                longer.push(b);
                longer.extend_from_slice(&ctx);
                stack.push((child as usize, longer));
            }
        }
    }

    /// Serialize to a private, versioned cache format. `tag` identifies the
    /// corpus the counts came from (e.g. a SHA-256 of the training file) and
    /// is verified on load.
    pub fn write_cache(&self, path: &Path, tag: &[u8; 32]) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(tag)?;
        w.write_all(&[mode_code(self.mode), self.frozen as u8])?;
        w.write_all(&(self.s as u64).to_le_bytes())?;
        w.write_all(&self.appended.to_le_bytes())?;
        w.write_all(&(self.history.len() as u64).to_le_bytes())?;
        for &b in &self.history {
            w.write_all(&[b])?;
        }
        w.write_all(&(self.nodes.len() as u64).to_le_bytes())?;
        for node in &self.nodes {
            w.write_all(&node.ext.to_le_bytes())?;
            w.write_all(&(node.counts.len() as u32).to_le_bytes())?;
            for &(sym, c) in &node.counts {
                w.write_all(&[sym])?;
                w.write_all(&c.to_le_bytes())?;
            }
            w.write_all(&(node.children.len() as u32).to_le_bytes())?;
            for &(sym, id) in &node.children {
                w.write_all(&[sym])?;
                w.write_all(&id.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Load a cache written by [`CountStore::write_cache`], verifying the
    /// corpus tag.
    pub fn read_cache(path: &Path, expected_tag: &[u8; 32]) -> Result<CountStore> {
        let file = std::fs::File::open(path)?;
        let mut r = BufReader::new(file);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Cache("bad magic or unsupported version".into()));
        }
        let mut tag = [0u8; 32];
        r.read_exact(&mut tag)?;
        if &tag != expected_tag {
            return Err(Error::Cache("corpus tag mismatch".into()));
        }
        let mut two = [0u8; 2];
        r.read_exact(&mut two)?;
        let mode = mode_from_code(two[0])?;
        let frozen = two[1] != 0;
        let s = read_u64(&mut r)? as usize;
        let appended = read_u64(&mut r)?;
        let hist_len = read_u64(&mut r)? as usize;
        let mut hist = vec![0u8; hist_len];
        r.read_exact(&mut hist)?;
        let node_count = read_u64(&mut r)? as usize;
        let mut nodes = Vec::with_capacity(node_count);
        for _ in 0..node_count {
            let ext = read_u64(&mut r)?;
            let n_counts = read_u32(&mut r)? as usize;
            let mut counts = Vec::with_capacity(n_counts);
            for _ in 0..n_counts {
                let mut sym = [0u8; 1];
                r.read_exact(&mut sym)?;
                counts.push((sym[0], read_u64(&mut r)?));
            }
            let n_children = read_u32(&mut r)? as usize;
            let mut children = Vec::with_capacity(n_children);
            for _ in 0..n_children {
                let mut sym = [0u8; 1];
                r.read_exact(&mut sym)?;
                children.push((sym[0], read_u32(&mut r)?));
            }
            nodes.push(Node {
                ext,
                counts,
                children,
            });
        }
        if nodes.is_empty() {
            return Err(Error::Cache("no nodes".into()));
        }
        Ok(CountStore {
            nodes,
            history: hist.into(),
            s,
            mode,
            appended,
            frozen,
        })
    }
}

const CACHE_MAGIC: &[u8; 8] = b"SWSTORE1";

fn mode_code(m: Mode) -> u8 {
    match m {
        Mode::Plain => 0,
        Mode::Fixed => 1,
        Mode::Preadapted => 2,
    }
}

fn mode_from_code(c: u8) -> Result<Mode> {
    match c {
        0 => Ok(Mode::Plain),
        1 => Ok(Mode::Fixed),
        2 => Ok(Mode::Preadapted),
        _ => Err(Error::Cache(format!("unknown mode code {c}"))),
    }
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

/// Reference substring counter: the number of positions `i` with
/// `0 <= i <= |z| - |w|` where `w` matches `z` at `i`. Occurrences may
/// overlap; the empty substring occurs `|z| + 1` times. Quadratic and only
/// meant for testing the store, never for the hot path.
pub fn count(w: &[u8], z: &[u8]) -> usize {
    if w.len() > z.len() {
        return 0;
    }
    if w.is_empty() {
        return z.len() + 1;
    }
    z.windows(w.len()).filter(|g| *g == w).count()
}

/// Build a store over a training corpus, appending symbol by symbol. Fixed
/// stores are frozen afterwards; preadapted stores keep their history window
/// so grams spanning the training/input junction get counted.
pub fn train(corpus: &[u8], s: usize, mode: Mode) -> Result<CountStore> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut store = CountStore::new(s, mode);
    for &b in corpus {
        store.append(b)?;
    }
    if mode == Mode::Fixed {
        store.freeze();
    }
    Ok(store)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn count_examples() {
        assert_eq!(count(b"ab", b"abab"), 2);
        assert_eq!(count(b"aa", b"aaaa"), 3);
        assert_eq!(count(b"", b"abc"), 4);
        assert_eq!(count(b"ba", b"abab"), 1);
        assert_eq!(count(b"abc", b"ab"), 0);
        assert_eq!(count(b"", b""), 1);
    }

    #[test]
    fn append_matches_reference_counts() {
        let mut store = CountStore::new(3, Mode::Plain);
        for &b in b"abab" {
            store.append(b).unwrap();
        }
        assert_eq!(store.occ(b"ab"), 2);
        assert_eq!(store.ext(b"ab"), 1);
        // ext(∅) counts over "aba", the string minus its last symbol
        assert_eq!(store.ext(b""), count(b"", b"aba") as u64);
        assert_eq!(store.ext(b""), 4);
        assert_eq!(store.occ(b"aba"), 1);
        assert_eq!(store.occ(b"b"), 2);
    }

    #[test]
    fn first_appends() {
        let mut store = CountStore::new(2, Mode::Plain);
        store.append(b'a').unwrap();
        assert_eq!(store.occ(b"a"), 1);
        assert_eq!(store.ext(b""), 1);
        store.append(b'b').unwrap();
        assert_eq!(store.ext(b""), 2);
        assert_eq!(store.occ(b"ab"), 1);
        assert_eq!(store.ext(b"a"), 1);
    }

    #[test]
    fn append_to_frozen_store_fails() {
        let mut store = train(b"abc", 2, Mode::Fixed).unwrap();
        assert!(matches!(store.append(b'x'), Err(Error::FrozenStore)));
        assert_eq!(store.occ(b"ab"), 1);
    }

    #[test]
    fn train_examples() {
        let store = train(b"aaaa", 2, Mode::Plain).unwrap();
        assert_eq!(store.occ(b"aa"), 3);
        assert_eq!(store.occ(b"aaa"), 2);
        assert_eq!(store.ext(b"aa"), 2);
        assert!(matches!(
            train(b"", 2, Mode::Plain),
            Err(Error::EmptyCorpus)
        ));
    }

    fn check_against_reference(store: &CountStore, z: &[u8]) {
        let z_minus = &z[..z.len().saturating_sub(1)];
        store.for_each_context(|ctx, ext, cts| {
            // extension counts live on the counted string minus its last
            // symbol; with nothing counted that "string" has length -1 and
            // every count is 0
            let want = if z.is_empty() {
                0
            } else {
                count(ctx, z_minus) as u64
            };
            assert_eq!(ext, want, "ext({:?}) over {:?}", ctx, z_minus);
            let mut sum = 0u64;
            for &(sym, occ) in cts {
                let mut gram = ctx.to_vec();
                gram.push(sym);
                assert_eq!(occ, count(&gram, z) as u64, "occ({:?})", gram);
                sum += occ;
            }
            assert_eq!(sum, ext, "sum rule at context {:?}", ctx);
        });
    }

    proptest! {
        #[test]
        fn oracle_equivalence(
            z in proptest::collection::vec(0u8..5, 0..200),
            s in 0usize..6,
        ) {
            let mut store = CountStore::new(s, Mode::Plain);
            for &b in &z {
                store.append(b).unwrap();
            }
            check_against_reference(&store, &z);
        }

        #[test]
        fn preadapted_junction_counts(
            y in proptest::collection::vec(0u8..3, 1..40),
            x in proptest::collection::vec(0u8..3, 0..40),
            s in 1usize..5,
        ) {
            let mut store = train(&y, s, Mode::Preadapted).unwrap();
            for &b in &x {
                store.append(b).unwrap();
            }
            let mut joined = y.clone();
            joined.extend_from_slice(&x);
            check_against_reference(&store, &joined);
        }
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.bin");
        let store = train(b"the cat sat on the mat", 3, Mode::Preadapted).unwrap();
        let tag = [7u8; 32];
        store.write_cache(&path, &tag).unwrap();
        let loaded = CountStore::read_cache(&path, &tag).unwrap();
        assert_eq!(store, loaded);
        assert!(matches!(
            CountStore::read_cache(&path, &[8u8; 32]),
            Err(Error::Cache(_))
        ));
    }
}
