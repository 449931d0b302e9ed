//! Suffix array and LCP array over the source side of the corpus.
//!
//! Suffixes are compared word by word up to and including their sentence
//! terminator. Terminators compare smaller than every word, so a suffix
//! sorts before any longer suffix sharing its prefix. Two suffixes that
//! reach their terminators at the same offset are ordered by position.

use crate::corpus::{DataArray, WordId, SENTINEL};

/// Sorted suffixes of every non-sentinel position of a [`DataArray`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SuffixArray {
    sa: Vec<u32>,
}

/// Half-open range `[low, high)` of the suffix array whose suffixes all
/// start with the same `matched_length` words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SuffixInterval {
    pub low: usize,
    pub high: usize,
    pub matched_length: usize,
}

impl SuffixInterval {
    pub fn len(&self) -> usize {
        self.high - self.low
    }

    pub fn is_empty(&self) -> bool {
        self.low == self.high
    }
}

impl SuffixArray {
    pub fn build(data: &DataArray) -> Self {
        SuffixArray {
            sa: prefix_doubling(data),
        }
    }

    pub(crate) fn from_raw(sa: Vec<u32>) -> Self {
        SuffixArray { sa }
    }

    pub fn positions(&self) -> &[u32] {
        &self.sa
    }

    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    pub fn full_interval(&self) -> SuffixInterval {
        SuffixInterval {
            low: 0,
            high: self.sa.len(),
            matched_length: 0,
        }
    }

    /// Restricts `interval` to the suffixes whose word at offset
    /// `matched_length` equals `word`. Only that single word of each suffix
    /// is inspected, so one step costs O(log N) comparisons.
    pub fn narrow(
        &self,
        data: &DataArray,
        interval: SuffixInterval,
        word: WordId,
    ) -> SuffixInterval {
        let ids = data.ids();
        let offset = interval.matched_length;
        let range = &self.sa[interval.low..interval.high];
        // Keys are non-decreasing across the interval; terminators (id 0)
        // come first.
        let key = |&p: &u32| ids[p as usize + offset];
        let (low, high) = if word == SENTINEL {
            (0, 0)
        } else {
            (
                range.partition_point(|p| key(p) < word),
                range.partition_point(|p| key(p) <= word),
            )
        };
        SuffixInterval {
            low: interval.low + low,
            high: interval.low + high,
            matched_length: offset + 1,
        }
    }

    /// Interval of suffixes starting with `phrase`.
    pub fn lookup(&self, data: &DataArray, phrase: &[WordId]) -> SuffixInterval {
        let mut interval = self.full_interval();
        for &w in phrase {
            interval = self.narrow(data, interval, w);
            if interval.is_empty() {
                break;
            }
        }
        interval
    }

    /// Kasai et al. linear-time LCP construction. Common prefixes never
    /// extend past a terminator.
    pub fn lcp(&self, data: &DataArray) -> LcpArray {
        let ids = data.ids();
        let mut rank = vec![u32::MAX; ids.len()];
        for (r, &p) in self.sa.iter().enumerate() {
            rank[p as usize] = r as u32;
        }
        let mut lcp = vec![0u32; self.sa.len()];
        let mut h = 0usize;
        for p in 0..ids.len() {
            if ids[p] == SENTINEL {
                h = 0;
                continue;
            }
            let r = rank[p] as usize;
            if r == 0 {
                h = 0;
                continue;
            }
            let q = self.sa[r - 1] as usize;
            while ids[p + h] != SENTINEL && ids[p + h] == ids[q + h] {
                h += 1;
            }
            lcp[r] = h as u32;
            h = h.saturating_sub(1);
        }
        LcpArray { lcp }
    }
}

/// `lcp[i]` is the common prefix length of suffixes `sa[i - 1]` and `sa[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LcpArray {
    lcp: Vec<u32>,
}

impl LcpArray {
    pub fn values(&self) -> &[u32] {
        &self.lcp
    }

    pub fn len(&self) -> usize {
        self.lcp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lcp.is_empty()
    }
}

/// Larsson-Sadakane suffix sorting: prefix doubling where each unsorted
/// group is refined with a ternary-split quicksort.
///
/// `order` holds positions in sorted order; a negative entry `-k` marks a
/// run of `k` fully sorted positions. `group[p]` is the index of the last
/// slot of the group containing `p`.
fn prefix_doubling(data: &DataArray) -> Vec<u32> {
    let ids = data.ids();
    let n = ids.len();
    if n == 0 {
        return Vec::new();
    }

    // Every terminator gets its own symbol, smaller than all words and
    // ordered by sentence, which makes every suffix unique.
    let num_sentences = data.num_sentences();
    let key = |p: usize| -> usize {
        match ids[p] {
            SENTINEL => data.sentence_index(p),
            w => num_sentences + w as usize,
        }
    };
    let alphabet = num_sentences + ids.iter().copied().max().unwrap_or(0) as usize + 1;

    let mut bucket = vec![0usize; alphabet + 1];
    for p in 0..n {
        bucket[key(p) + 1] += 1;
    }
    for s in 0..alphabet {
        bucket[s + 1] += bucket[s];
    }
    let mut order = vec![0isize; n];
    let mut group = vec![0isize; n];
    {
        let mut next = bucket.clone();
        for p in 0..n {
            let s = key(p);
            order[next[s]] = p as isize;
            next[s] += 1;
        }
    }
    for s in 0..alphabet {
        let (lo, hi) = (bucket[s], bucket[s + 1]);
        if lo == hi {
            continue;
        }
        for &p in &order[lo..hi] {
            group[p as usize] = (hi - 1) as isize;
        }
        if hi - lo == 1 {
            order[lo] = -1;
        }
    }

    let mut sorter = Splitter {
        order: &mut order,
        group: &mut group,
        h: 1,
    };
    while sorter.order[0] != -(n as isize) {
        let mut i = 0usize;
        let mut sorted_run = 0isize;
        while i < n {
            let s = sorter.order[i];
            if s < 0 {
                i += (-s) as usize;
                sorted_run += s;
            } else {
                if sorted_run != 0 {
                    sorter.order[(i as isize + sorted_run) as usize] = sorted_run;
                    sorted_run = 0;
                }
                let end = sorter.group[s as usize] as usize + 1;
                sorter.sort_split(i, end - i);
                i = end;
            }
        }
        if sorted_run != 0 {
            sorter.order[(n as isize + sorted_run) as usize] = sorted_run;
        }
        sorter.h *= 2;
    }

    let mut sa = vec![0u32; n];
    for (p, &g) in group.iter().enumerate() {
        sa[g as usize] = p as u32;
    }
    // Terminators hold the smallest symbols and occupy the first slots.
    sa.drain(..num_sentences);
    sa
}

struct Splitter<'a> {
    order: &'a mut [isize],
    group: &'a mut [isize],
    h: usize,
}

impl Splitter<'_> {
    #[inline]
    fn key(&self, slot: usize) -> isize {
        self.group[self.order[slot] as usize + self.h]
    }

    fn update_group(&mut self, first: usize, last: usize) {
        let g = last as isize;
        for slot in first..=last {
            self.group[self.order[slot] as usize] = g;
        }
        if first == last {
            self.order[first] = -1;
        }
    }

    fn select_sort_split(&mut self, start: usize, len: usize) {
        let mut a = start;
        let last = start + len - 1;
        while a < last {
            let mut b = a + 1;
            let mut f = self.key(a);
            for i in a + 1..=last {
                let v = self.key(i);
                if v < f {
                    f = v;
                    self.order.swap(i, a);
                    b = a + 1;
                } else if v == f {
                    self.order.swap(i, b);
                    b += 1;
                }
            }
            self.update_group(a, b - 1);
            a = b;
        }
        if a == last {
            self.group[self.order[a] as usize] = a as isize;
            self.order[a] = -1;
        }
    }

    fn choose_pivot(&self, start: usize, len: usize) -> isize {
        let a = self.key(start);
        let b = self.key(start + len / 2);
        let c = self.key(start + len - 1);
        a.max(b).min(a.min(b).max(c))
    }

    /// Ternary-split quicksort of `order[start..start + len]` on the key
    /// `group[p + h]`, refining group numbers as subgroups become final.
    fn sort_split(&mut self, start: usize, len: usize) {
        if len < 7 {
            self.select_sort_split(start, len);
            return;
        }
        let v = self.choose_pivot(start, len);
        // Bentley-McIlroy partition: [== | < | ? | > | ==]
        let (mut pa, mut pb) = (start as isize, start as isize);
        let (mut pc, mut pd) = ((start + len - 1) as isize, (start + len - 1) as isize);
        loop {
            while pb <= pc {
                let f = self.key(pb as usize);
                if f > v {
                    break;
                }
                if f == v {
                    self.order.swap(pa as usize, pb as usize);
                    pa += 1;
                }
                pb += 1;
            }
            while pc >= pb {
                let f = self.key(pc as usize);
                if f < v {
                    break;
                }
                if f == v {
                    self.order.swap(pc as usize, pd as usize);
                    pd -= 1;
                }
                pc -= 1;
            }
            if pb > pc {
                break;
            }
            self.order.swap(pb as usize, pc as usize);
            pb += 1;
            pc -= 1;
        }
        let end = (start + len) as isize;
        let s = (pa - start as isize).min(pb - pa);
        self.swap_ranges(start as isize, pb - s, s);
        let t = (pd - pc).min(end - pd - 1);
        self.swap_ranges(pb, end - t, t);

        let less = (pb - pa) as usize;
        let greater = (pd - pc) as usize;
        if less > 0 {
            self.sort_split(start, less);
        }
        self.update_group(start + less, start + len - greater - 1);
        if greater > 0 {
            self.sort_split(start + len - greater, greater);
        }
    }

    fn swap_ranges(&mut self, a: isize, b: isize, count: isize) {
        for k in 0..count {
            self.order.swap((a + k) as usize, (b + k) as usize);
        }
    }
}
