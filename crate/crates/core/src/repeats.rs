//! Depth of a string: the longest substring occurring at least twice.
//!
//! Built on a suffix automaton, so the whole computation is linear in the
//! input length (transitions are kept in small sorted per-state vectors,
//! giving `O(n log σ)`). Occurrence counts per automaton state come from
//! propagating end-position counts up the suffix links; a substring repeats
//! iff its state's count is at least 2, and overlapping occurrences count
//! separately.

/// Result of a depth query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthResult {
    /// Length of the longest substring occurring at least twice; 0 when all
    /// symbols are distinct or the input has at most one symbol.
    pub depth: usize,
    /// Start offset of one witness occurrence (0 when `depth == 0`).
    pub offset: usize,
}

impl DepthResult {
    /// The witness substring inside the queried string.
    pub fn witness<'z>(&self, z: &'z [u8]) -> &'z [u8] {
        &z[self.offset..self.offset + self.depth]
    }
}

struct Automaton {
    len: Vec<u32>,
    link: Vec<i32>,
    edges: Vec<Vec<(u8, u32)>>,
    first_end: Vec<u32>,
    /// True for states created as a new rightmost state (not clones); these
    /// seed the end-position counts.
    primary: Vec<bool>,
    last: usize,
}

impl Automaton {
    fn with_capacity(n: usize) -> Self {
        let cap = 2 * n + 2;
        let mut a = Automaton {
            len: Vec::with_capacity(cap),
            link: Vec::with_capacity(cap),
            edges: Vec::with_capacity(cap),
            first_end: Vec::with_capacity(cap),
            primary: Vec::with_capacity(cap),
            last: 0,
        };
        a.push_state(0, -1, 0, false);
        a
    }

    fn push_state(&mut self, len: u32, link: i32, first_end: u32, primary: bool) -> usize {
        self.len.push(len);
        self.link.push(link);
        self.edges.push(Vec::new());
        self.first_end.push(first_end);
        self.primary.push(primary);
        self.len.len() - 1
    }

    fn edge(&self, state: usize, sym: u8) -> Option<u32> {
        let e = &self.edges[state];
        e.binary_search_by_key(&sym, |t| t.0).ok().map(|i| e[i].1)
    }

    fn set_edge(&mut self, state: usize, sym: u8, to: u32) {
        let e = &mut self.edges[state];
        match e.binary_search_by_key(&sym, |t| t.0) {
            Ok(i) => e[i].1 = to,
            Err(i) => e.insert(i, (sym, to)),
        }
    }

    fn extend(&mut self, sym: u8, pos: u32) {
        let cur = self.push_state(self.len[self.last] + 1, -1, pos, true);
        let mut p = self.last as i32;
        while p >= 0 && self.edge(p as usize, sym).is_none() {
            self.set_edge(p as usize, sym, cur as u32);
            p = self.link[p as usize];
        }
        if p < 0 {
            self.link[cur] = 0;
        } else {
            let q = self.edge(p as usize, sym).unwrap() as usize;
            if self.len[p as usize] + 1 == self.len[q] {
                self.link[cur] = q as i32;
            } else {
                let clone = self.push_state(
                    self.len[p as usize] + 1,
                    self.link[q],
                    self.first_end[q],
                    false,
                );
                self.edges[clone] = self.edges[q].clone();
                while p >= 0 && self.edge(p as usize, sym) == Some(q as u32) {
                    self.set_edge(p as usize, sym, clone as u32);
                    p = self.link[p as usize];
                }
                self.link[q] = clone as i32;
                self.link[cur] = clone as i32;
            }
        }
        self.last = cur;
    }
}

/// Longest substring of `z` occurring at least twice (overlaps allowed),
/// with one witness offset.
pub fn max_repeat_length(z: &[u8]) -> DepthResult {
    if z.len() < 2 {
        return DepthResult {
            depth: 0,
            offset: 0,
        };
    }
    let mut sam = Automaton::with_capacity(z.len());
    for (i, &b) in z.iter().enumerate() {
        sam.extend(b, i as u32);
    }
    let states = sam.len.len();

    // end-position counts: seed primary states, push along suffix links in
    // order of decreasing len (counting sort over len)
    let n = z.len();
    let mut buckets = vec![0u32; n + 2];
    for u in 0..states {
        buckets[sam.len[u] as usize + 1] += 1;
    }
    for i in 1..buckets.len() {
        buckets[i] += buckets[i - 1];
    }
    let mut by_len = vec![0u32; states];
    for u in 0..states {
        by_len[buckets[sam.len[u] as usize] as usize] = u as u32;
        buckets[sam.len[u] as usize] += 1;
    }
    let mut cnt = vec![0u64; states];
    for (c, &primary) in cnt.iter_mut().zip(&sam.primary) {
        if primary {
            *c = 1;
        }
    }
    for &u in by_len.iter().rev() {
        let u = u as usize;
        let l = sam.link[u];
        if l >= 0 {
            cnt[l as usize] += cnt[u];
        }
    }

    let mut best = DepthResult {
        depth: 0,
        offset: 0,
    };
    for (u, &c) in cnt.iter().enumerate().skip(1) {
        if c >= 2 && sam.len[u] as usize > best.depth {
            let depth = sam.len[u] as usize;
            let end = sam.first_end[u] as usize;
            best = DepthResult {
                depth,
                offset: end + 1 - depth,
            };
        }
    }
    best
}
