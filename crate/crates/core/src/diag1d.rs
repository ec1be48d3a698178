//! Semi-dynamic 1D structure over the implicit matrix `M[i][j] = p_j - p_i`.
//!
//! The structure keeps the logical diagonals `k, k+1, ..., k+q` of `M`
//! restricted to surviving points, each as a doubly linked list of
//! fragments. An entry whose row or column is a marked point is kept as its
//! own singleton fragment; the maximal stretches between singletons are
//! stored as runs holding only their minimum. Deleting a marked point moves
//! the stretch between its two singletons from list `L+1` to list `L`, so
//! list 0 always describes windows of exactly `k` surviving points.
//!
//! In weight mode an entry is the total weight of a window. Deleting a point
//! lowers every window spanning it by the point's weight; runs store their
//! minimum relative to their first entry and every node stores the shift
//! between its first entry and the next node's first entry, so a query
//! recovers absolute values with one left-to-right scan.
//!
//! Per marked point the singletons in which it appears as a row (resp.
//! column) are threaded into a chain ordered by list index; the node at
//! position `L` of the chain lives in list `L`.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::minplus::convolve_extended;
use crate::scalar::Scalar;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Length,
    Weight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragmentKind {
    /// Singleton entry; carries the marked positions that own it.
    Singleton { row_owner: Option<usize>, col_owner: Option<usize> },
    Run,
}

/// Snapshot of one fragment of a logical diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentSummary<T> {
    /// Original diagonal of the minimum entry (window length in positions).
    pub diag_index: usize,
    /// Start positions of the first and last window covered.
    pub span: (usize, usize),
    pub min_value: T,
    pub min_witness: (usize, usize),
    pub kind: FragmentKind,
}

#[derive(Debug, Clone, Copy)]
struct Node<T> {
    prev: u32,
    next: u32,
    row_prev: u32,
    row_next: u32,
    col_prev: u32,
    col_next: u32,
    /// Start position of the first window in the node.
    first: u32,
    wi: u32,
    wj: u32,
    singleton: bool,
    live: bool,
    /// Minimum entry, relative to the shift at the node's first entry.
    min_rel: T,
    /// Row part of the shift to the next node, including the node's own
    /// internal shift.
    r: T,
    /// Column part of the shift to the next node.
    c: T,
}

impl<T: Scalar> Node<T> {
    fn fix(&self) -> T {
        self.r - self.c
    }
}

#[derive(Debug, Clone)]
struct List<T> {
    head: u32,
    tail: u32,
    head_off: T,
}

impl<T: Scalar> List<T> {
    fn empty() -> Self {
        List { head: NIL, tail: NIL, head_off: T::zero() }
    }
}

#[derive(Clone, Copy)]
struct Seg {
    first: u32,
    last: u32,
}

impl Seg {
    const EMPTY: Seg = Seg { first: NIL, last: NIL };

    fn is_empty(&self) -> bool {
        self.first == NIL
    }
}

/// The fragmented-diagonal structure. Cloning copies the fragment lists and
/// shares the value and prefix arrays.
#[derive(Debug, Clone)]
pub struct DiagStructure<T> {
    values: Arc<[T]>,
    prefix: Option<Arc<[T]>>,
    k: usize,
    survivors: usize,
    marked: Vec<u32>,
    row_head: Vec<u32>,
    col_head: Vec<u32>,
    deleted: DeletedLog,
    lists: Vec<List<T>>,
    nodes: Vec<Node<T>>,
    live: usize,
}

impl<T: Scalar> DiagStructure<T> {
    /// Builds the structure over sorted `values`. With `weights` the
    /// structure runs in weight mode. `q` is the marked budget and must be at
    /// least `marked.len()`; lists exist for diagonals `k..=k+marked.len()`.
    /// With `fast` the run minima come from per-chunk minima obtained by
    /// (min,+)-convolution.
    pub fn build(
        values: &[T],
        weights: Option<&[T]>,
        k: usize,
        q: usize,
        marked: &[usize],
        fast: bool,
    ) -> Result<Self> {
        let n = values.len();
        if k == 0 || k > n {
            return invalid(format!("k = {k} must lie in [1, {n}]"));
        }
        if n >= NIL as usize {
            return invalid("too many values");
        }
        if values.windows(2).any(|w| w[1] < w[0]) || values.iter().any(|v| !v.is_finite_value()) {
            return invalid("values must be finite and nondecreasing");
        }
        let mut mk: Vec<u32> = marked.iter().map(|&m| m as u32).collect();
        mk.sort_unstable();
        mk.dedup();
        if mk.len() != marked.len() || mk.last().map_or(false, |&m| m as usize >= n) {
            return invalid("marked positions must be distinct and in range");
        }
        if mk.len() > q {
            return invalid("more marked points than the marked budget q");
        }
        let prefix = match weights {
            None => None,
            Some(w) => {
                if w.len() != n || w.iter().any(|v| !v.is_finite_value()) {
                    return invalid("weights must be finite, one per value");
                }
                let mut p = Vec::with_capacity(n + 1);
                let mut acc = T::zero();
                p.push(acc);
                for &x in w {
                    acc = acc + x;
                    p.push(acc);
                }
                Some(Arc::from(p))
            }
        };
        let m = mk.len();
        let mut ds = DiagStructure {
            values: Arc::from(values),
            prefix,
            k,
            survivors: n,
            row_head: vec![NIL; m],
            col_head: vec![NIL; m],
            marked: mk,
            deleted: DeletedLog::default(),
            lists: Vec::new(),
            nodes: Vec::new(),
            live: 0,
        };
        let nl = m + 1;
        let chunks = if fast { Some(ChunkMinima::new(&ds, nl)) } else { None };
        let mut row_tail = vec![NIL; m];
        let mut col_tail = vec![NIL; m];
        for l in 0..nl {
            let d = k + l;
            let mut list = List::empty();
            if d <= n {
                let last_row = n - d;
                let mut singles: Vec<usize> = Vec::new();
                for &mp in &ds.marked {
                    let mp = mp as usize;
                    if mp <= last_row {
                        singles.push(mp);
                    }
                    if mp + 1 >= d {
                        singles.push(mp + 1 - d);
                    }
                }
                singles.sort_unstable();
                singles.dedup();
                let mut cursor = 0usize;
                let push_run = |ds: &mut Self, list: &mut List<T>, a: usize, b: usize| {
                    let (v, wi) = match &chunks {
                        Some(ch) => ch.run_min(ds, d, a, b),
                        None => ds.run_min_slow(d, a, b),
                    };
                    let id = ds.alloc(a as u32, wi as u32, (wi + d - 1) as u32, false, v);
                    ds.append(list, id);
                };
                for &s in &singles {
                    if cursor < s {
                        push_run(&mut ds, &mut list, cursor, s - 1);
                    }
                    let j = s + d - 1;
                    let v = ds.entry(s, j);
                    let id = ds.alloc(s as u32, s as u32, j as u32, true, v);
                    ds.append(&mut list, id);
                    if let Some(o) = ds.marked_index(s) {
                        if row_tail[o] == NIL {
                            ds.row_head[o] = id;
                        } else {
                            ds.nodes[row_tail[o] as usize].row_next = id;
                            ds.nodes[id as usize].row_prev = row_tail[o];
                        }
                        row_tail[o] = id;
                    }
                    if let Some(o) = ds.marked_index(j) {
                        if col_tail[o] == NIL {
                            ds.col_head[o] = id;
                        } else {
                            ds.nodes[col_tail[o] as usize].col_next = id;
                            ds.nodes[id as usize].col_prev = col_tail[o];
                        }
                        col_tail[o] = id;
                    }
                    cursor = s + 1;
                }
                if cursor <= last_row {
                    push_run(&mut ds, &mut list, cursor, last_row);
                }
            }
            ds.lists.push(list);
        }
        Ok(ds)
    }

    pub fn mode(&self) -> Mode {
        if self.prefix.is_some() {
            Mode::Weight
        } else {
            Mode::Length
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn survivors(&self) -> usize {
        self.survivors
    }

    pub fn marked(&self) -> impl Iterator<Item = usize> + '_ {
        self.marked.iter().map(|&m| m as usize)
    }

    pub fn is_marked(&self, pos: usize) -> bool {
        self.marked_index(pos).is_some()
    }

    pub fn is_deleted(&self, pos: usize) -> bool {
        self.deleted.iter().any(|d| d == pos as u32)
    }

    /// Number of fragments on the current k-th logical diagonal.
    pub fn fragment_count(&self) -> usize {
        self.list_nodes(0).count()
    }

    /// Minimum entry of the current k-th logical diagonal and its window as
    /// original positions `(lo, hi)`; ties go to the leftmost window.
    pub fn query(&self) -> Result<(T, (usize, usize))> {
        let list = &self.lists[0];
        if list.head == NIL {
            return Err(Error::Infeasible(format!(
                "{} surviving points, fewer than k = {}",
                self.survivors, self.k
            )));
        }
        let mut cur = list.head_off;
        let mut best: Option<(T, u32, u32)> = None;
        let mut id = list.head;
        while id != NIL {
            let nd = &self.nodes[id as usize];
            let v = cur + nd.min_rel;
            if best.map_or(true, |(b, _, _)| v < b) {
                best = Some((v, nd.wi, nd.wj));
            }
            cur = cur + nd.fix();
            id = nd.next;
        }
        let (v, i, j) = best.expect("non-empty list");
        Ok((v, (i as usize, j as usize)))
    }

    /// Fragments of the current k-th logical diagonal, in order.
    pub fn fragments(&self) -> Vec<FragmentSummary<T>> {
        self.list_fragments(0)
    }

    /// Fragments of logical diagonal `k + level`.
    pub fn list_fragments(&self, level: usize) -> Vec<FragmentSummary<T>> {
        let Some(list) = self.lists.get(level) else {
            return Vec::new();
        };
        let ids: Vec<u32> = self.list_nodes(level).collect();
        if ids.is_empty() {
            return Vec::new();
        }
        let deleted = self.deleted.sorted();
        let last_start = self.last_start(level, &deleted);
        let mut out = Vec::with_capacity(ids.len());
        let mut cur = list.head_off;
        for (t, &id) in ids.iter().enumerate() {
            let nd = &self.nodes[id as usize];
            let end = match ids.get(t + 1) {
                Some(&nx) => prev_survivor(self.nodes[nx as usize].first as usize, &deleted),
                None => last_start,
            };
            let kind = if nd.singleton {
                FragmentKind::Singleton {
                    row_owner: self.marked_index(nd.wi as usize).map(|_| nd.wi as usize),
                    col_owner: self.marked_index(nd.wj as usize).map(|_| nd.wj as usize),
                }
            } else {
                FragmentKind::Run
            };
            out.push(FragmentSummary {
                diag_index: (nd.wj - nd.wi) as usize + 1,
                span: (nd.first as usize, end),
                min_value: cur + nd.min_rel,
                min_witness: (nd.wi as usize, nd.wj as usize),
                kind,
            });
            cur = cur + nd.fix();
        }
        out
    }

    /// Removes a marked point from the represented point set.
    pub fn delete_marked(&mut self, pos: usize) -> Result<()> {
        let Some(mi) = self.marked_index(pos) else {
            return Err(self.not_marked(pos));
        };
        let m = pos as u32;
        let w = match &self.prefix {
            Some(p) => p[pos + 1] - p[pos],
            None => T::zero(),
        };
        let nl = self.lists.len();
        let cs = self.chain(self.col_head[mi], false, nl);
        let rs = self.chain(self.row_head[mi], true, nl);

        let mut prefix = vec![Seg::EMPTY; nl];
        let mut block = vec![Seg::EMPTY; nl];
        let mut suffix = vec![Seg::EMPTY; nl];
        for l in 0..nl {
            let list = &self.lists[l];
            if list.head == NIL {
                continue;
            }
            let (c, r) = (cs[l], rs[l]);
            if c != NIL && self.nodes[c as usize].prev != NIL {
                prefix[l] = Seg { first: list.head, last: self.nodes[c as usize].prev };
            }
            if r != NIL && self.nodes[r as usize].next != NIL {
                suffix[l] = Seg { first: self.nodes[r as usize].next, last: list.tail };
            }
            if !(c != NIL && c == r) {
                let first = if c != NIL { self.nodes[c as usize].next } else { list.head };
                let last = if r != NIL { self.nodes[r as usize].prev } else { list.tail };
                if first != NIL && last != NIL && first != r && last != c {
                    block[l] = Seg { first, last };
                }
            }
        }

        // Everything that does not survive: the point's own singletons, the
        // block of list 0, and the whole top list apart from its block.
        let mut doomed: Vec<u32> = Vec::with_capacity(2 * nl + 8 * nl.max(1));
        for l in 0..nl {
            if cs[l] != NIL {
                doomed.push(cs[l]);
            }
            if rs[l] != NIL && rs[l] != cs[l] {
                doomed.push(rs[l]);
            }
        }
        self.collect_seg(block[0], &mut doomed);
        let top = nl - 1;
        self.collect_seg(prefix[top], &mut doomed);
        self.collect_seg(suffix[top], &mut doomed);
        if top == 0 {
            // block[0] already collected
        }

        let mut new_lists = Vec::with_capacity(nl.saturating_sub(1));
        // runs can only meet where segments were spliced together
        let mut joints: Vec<(usize, u32)> = Vec::with_capacity(2 * nl);
        for l in 0..top {
            let (p, b, s) = (prefix[l], block[l + 1], suffix[l]);
            let c_l = cs[l];
            let r_l = rs[l];
            let c_up = cs[l + 1];
            let old = &self.lists[l];
            let head_off = if !p.is_empty() {
                old.head_off
            } else if !b.is_empty() {
                let up = &self.lists[l + 1];
                let base = if c_up != NIL {
                    debug_assert_eq!(up.head, c_up);
                    up.head_off + self.nodes[c_up as usize].fix()
                } else {
                    up.head_off
                };
                base - w
            } else if !s.is_empty() {
                debug_assert!(r_l != NIL);
                let at_r = if c_l != NIL && c_l != r_l {
                    debug_assert_eq!(old.head, c_l);
                    old.head_off + self.nodes[c_l as usize].fix()
                } else {
                    old.head_off
                };
                at_r + self.nodes[r_l as usize].fix()
            } else {
                T::zero()
            };

            // Junction shifts, computed before any relinking.
            if !p.is_empty() && !b.is_empty() {
                let cc = self.nodes[c_up as usize].c;
                let pl = &mut self.nodes[p.last as usize];
                pl.c = pl.c + w + cc;
            }
            if !b.is_empty() && !s.is_empty() {
                let rr = self.nodes[r_l as usize].r;
                let bl = &mut self.nodes[b.last as usize];
                bl.r = bl.r + w + rr;
            }
            if !p.is_empty() && b.is_empty() && !s.is_empty() {
                debug_assert_eq!(c_l, r_l);
                let (cr, ccol) = (self.nodes[c_l as usize].r, self.nodes[c_l as usize].c);
                let pl = &mut self.nodes[p.last as usize];
                pl.r = pl.r + w + cr;
                pl.c = pl.c + w + ccol;
            }

            let mut list = List { head: NIL, tail: NIL, head_off };
            for seg in [p, b, s] {
                if !seg.is_empty() && list.tail != NIL {
                    joints.push((l, list.tail));
                }
                self.splice(&mut list, seg);
            }
            new_lists.push(list);
        }

        for &id in &doomed {
            self.discard(id, m);
        }
        self.lists = new_lists;
        // later joints first, so an absorbed segment never leaves a stale id
        for &(l, id) in joints.iter().rev() {
            let next = self.nodes[id as usize].next;
            if next != NIL && !self.nodes[id as usize].singleton && !self.nodes[next as usize].singleton {
                self.absorb_next(l, id);
            }
        }
        self.marked.remove(mi);
        self.row_head.remove(mi);
        self.col_head.remove(mi);
        self.deleted.push(m);
        self.survivors -= 1;
        self.maybe_compact();
        Ok(())
    }

    /// Stops treating a marked point specially; the point set is unchanged.
    pub fn unmark(&mut self, pos: usize) -> Result<()> {
        let Some(mi) = self.marked_index(pos) else {
            return Err(self.not_marked(pos));
        };
        let nl = self.lists.len();
        let cs = self.chain(self.col_head[mi], false, nl);
        let rs = self.chain(self.row_head[mi], true, nl);
        self.marked.remove(mi);
        self.row_head.remove(mi);
        self.col_head.remove(mi);
        for l in 0..nl {
            for id in [cs[l], rs[l]] {
                if id == NIL || !self.nodes[id as usize].singleton {
                    continue;
                }
                let (i, j) = (self.nodes[id as usize].wi, self.nodes[id as usize].wj);
                if self.marked_index(i as usize).is_some() || self.marked_index(j as usize).is_some()
                {
                    continue;
                }
                self.nodes[id as usize].singleton = false;
                let mut cur = id;
                let prev = self.nodes[id as usize].prev;
                if prev != NIL && !self.nodes[prev as usize].singleton {
                    self.absorb_next(l, prev);
                    cur = prev;
                }
                let next = self.nodes[cur as usize].next;
                if next != NIL && !self.nodes[next as usize].singleton {
                    self.absorb_next(l, cur);
                }
            }
        }
        while self.lists.len() > self.marked.len() + 1 {
            let list = self.lists.pop().expect("non-empty");
            let mut doomed = Vec::new();
            self.collect_seg(Seg { first: list.head, last: list.tail }, &mut doomed);
            for id in doomed {
                self.discard(id, NIL);
            }
        }
        self.maybe_compact();
        Ok(())
    }

    fn not_marked(&self, pos: usize) -> Error {
        if self.is_deleted(pos) {
            Error::ContractViolation(format!("position {pos} is already deleted"))
        } else {
            Error::ContractViolation(format!("position {pos} is not marked"))
        }
    }

    fn marked_index(&self, pos: usize) -> Option<usize> {
        self.marked.binary_search(&(pos as u32)).ok()
    }

    fn entry(&self, i: usize, j: usize) -> T {
        match &self.prefix {
            Some(p) => p[j + 1] - p[i],
            None => self.values[j] - self.values[i],
        }
    }

    fn run_min_slow(&self, d: usize, a: usize, b: usize) -> (T, usize) {
        let mut best = self.entry(a, a + d - 1);
        let mut at = a;
        for i in a + 1..=b {
            let v = self.entry(i, i + d - 1);
            if v < best {
                best = v;
                at = i;
            }
        }
        (best, at)
    }

    fn alloc(&mut self, first: u32, wi: u32, wj: u32, singleton: bool, v: T) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            prev: NIL,
            next: NIL,
            row_prev: NIL,
            row_next: NIL,
            col_prev: NIL,
            col_next: NIL,
            first,
            wi,
            wj,
            singleton,
            live: true,
            min_rel: v,
            r: T::zero(),
            c: T::zero(),
        });
        self.live += 1;
        id
    }

    fn append(&mut self, list: &mut List<T>, id: u32) {
        if list.tail == NIL {
            list.head = id;
        } else {
            self.nodes[list.tail as usize].next = id;
        }
        self.nodes[id as usize].prev = list.tail;
        self.nodes[id as usize].next = NIL;
        list.tail = id;
    }

    fn splice(&mut self, list: &mut List<T>, seg: Seg) {
        if seg.is_empty() {
            return;
        }
        if list.tail == NIL {
            list.head = seg.first;
        } else {
            self.nodes[list.tail as usize].next = seg.first;
        }
        self.nodes[seg.first as usize].prev = list.tail;
        self.nodes[seg.last as usize].next = NIL;
        list.tail = seg.last;
    }

    fn chain(&self, head: u32, row: bool, nl: usize) -> Vec<u32> {
        let mut out = vec![NIL; nl];
        let mut id = head;
        let mut l = 0;
        while id != NIL && l < nl {
            out[l] = id;
            let nd = &self.nodes[id as usize];
            id = if row { nd.row_next } else { nd.col_next };
            l += 1;
        }
        out
    }

    fn collect_seg(&self, seg: Seg, out: &mut Vec<u32>) {
        if seg.is_empty() {
            return;
        }
        let mut id = seg.first;
        loop {
            out.push(id);
            if id == seg.last {
                break;
            }
            id = self.nodes[id as usize].next;
        }
    }

    /// Frees a node, detaching it from the chains of owners other than `skip`.
    fn discard(&mut self, id: u32, skip: u32) {
        let (i, j, single) = {
            let nd = &self.nodes[id as usize];
            (nd.wi, nd.wj, nd.singleton)
        };
        if single {
            if i != skip {
                if let Some(o) = self.marked_index(i as usize) {
                    let (p, n) = (self.nodes[id as usize].row_prev, self.nodes[id as usize].row_next);
                    if p != NIL {
                        self.nodes[p as usize].row_next = n;
                    } else if self.row_head[o] == id {
                        self.row_head[o] = n;
                    }
                    if n != NIL {
                        self.nodes[n as usize].row_prev = p;
                    }
                }
            }
            if j != skip {
                if let Some(o) = self.marked_index(j as usize) {
                    let (p, n) = (self.nodes[id as usize].col_prev, self.nodes[id as usize].col_next);
                    if p != NIL {
                        self.nodes[p as usize].col_next = n;
                    } else if self.col_head[o] == id {
                        self.col_head[o] = n;
                    }
                    if n != NIL {
                        self.nodes[n as usize].col_prev = p;
                    }
                }
            }
        }
        let nd = &mut self.nodes[id as usize];
        nd.live = false;
        nd.prev = NIL;
        nd.next = NIL;
        self.live -= 1;
    }

    /// Merges the run following `id` into the run `id`.
    fn absorb_next(&mut self, l: usize, id: u32) {
        let nx = self.nodes[id as usize].next;
        let (nmin, nwi, nwj, nr, nc, nnext) = {
            let b = &self.nodes[nx as usize];
            (b.min_rel, b.wi, b.wj, b.r, b.c, b.next)
        };
        let a = &mut self.nodes[id as usize];
        let shift = a.r - a.c;
        let cand = shift + nmin;
        if cand < a.min_rel {
            a.min_rel = cand;
            a.wi = nwi;
            a.wj = nwj;
        }
        a.r = shift + nr;
        a.c = nc;
        a.next = nnext;
        if nnext != NIL {
            self.nodes[nnext as usize].prev = id;
        } else {
            self.lists[l].tail = id;
        }
        let b = &mut self.nodes[nx as usize];
        b.live = false;
        b.prev = NIL;
        b.next = NIL;
        self.live -= 1;
    }

    fn list_nodes(&self, l: usize) -> impl Iterator<Item = u32> + '_ {
        let mut id = self.lists.get(l).map_or(NIL, |li| li.head);
        std::iter::from_fn(move || {
            if id == NIL {
                return None;
            }
            let cur = id;
            id = self.nodes[id as usize].next;
            Some(cur)
        })
    }

    /// Start position of the last window of logical diagonal `k + level`.
    fn last_start(&self, level: usize, deleted: &[u32]) -> usize {
        let mut need = self.k + level;
        let mut p = self.values.len();
        while need > 0 {
            p -= 1;
            if deleted.binary_search(&(p as u32)).is_err() {
                need -= 1;
            }
        }
        p
    }

    fn maybe_compact(&mut self) {
        if self.nodes.len() > 2 * self.live + 64 {
            self.compact();
        }
    }

    /// Drops dead nodes from the arena.
    pub fn compact(&mut self) {
        if self.nodes.len() == self.live {
            return;
        }
        let mut remap = vec![NIL; self.nodes.len()];
        let mut kept = Vec::with_capacity(self.live);
        for (old, nd) in self.nodes.iter().enumerate() {
            if nd.live {
                remap[old] = kept.len() as u32;
                kept.push(*nd);
            }
        }
        let fix = |x: u32| if x == NIL { NIL } else { remap[x as usize] };
        for nd in &mut kept {
            nd.prev = fix(nd.prev);
            nd.next = fix(nd.next);
            nd.row_prev = fix(nd.row_prev);
            nd.row_next = fix(nd.row_next);
            nd.col_prev = fix(nd.col_prev);
            nd.col_next = fix(nd.col_next);
        }
        for list in &mut self.lists {
            list.head = fix(list.head);
            list.tail = fix(list.tail);
        }
        for h in self.row_head.iter_mut().chain(self.col_head.iter_mut()) {
            *h = fix(*h);
        }
        self.nodes = kept;
    }
}

fn prev_survivor(pos: usize, deleted: &[u32]) -> usize {
    let mut p = pos - 1;
    while deleted.binary_search(&(p as u32)).is_ok() {
        p -= 1;
    }
    p
}

/// Deleted positions as a persistent stack, so clones share their common
/// history and cost O(1) regardless of how many points are gone.
#[derive(Debug, Clone, Default)]
struct DeletedLog {
    head: Option<Arc<LogNode>>,
}

#[derive(Debug)]
struct LogNode {
    pos: u32,
    next: Option<Arc<LogNode>>,
}

impl Drop for LogNode {
    fn drop(&mut self) {
        // unlink iteratively; long unshared tails would overflow the stack
        let mut cur = self.next.take();
        while let Some(node) = cur {
            match Arc::try_unwrap(node) {
                Ok(mut n) => cur = n.next.take(),
                Err(_) => break,
            }
        }
    }
}

impl DeletedLog {
    fn push(&mut self, pos: u32) {
        let next = self.head.take();
        self.head = Some(Arc::new(LogNode { pos, next }));
    }

    fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        let mut cur = self.head.as_deref();
        std::iter::from_fn(move || {
            let n = cur?;
            cur = n.next.as_deref();
            Some(n.pos)
        })
    }

    fn sorted(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.iter().collect();
        v.sort_unstable();
        v
    }
}

/// Minimum entry of every (diagonal, column chunk) pair, where chunks are
/// `width` consecutive columns and diagonals run over `k..k+width`.
struct ChunkMinima<T> {
    width: usize,
    k: usize,
    mins: Vec<Vec<Option<T>>>,
}

impl<T: Scalar> ChunkMinima<T> {
    fn new(ds: &DiagStructure<T>, diagonals: usize) -> Self {
        let n = ds.values.len();
        let q = diagonals.max(1);
        let k = ds.k;
        let col_val = |j: usize| match &ds.prefix {
            Some(p) => p[j + 1],
            None => ds.values[j],
        };
        let row_val = |i: usize| match &ds.prefix {
            Some(p) => p[i],
            None => ds.values[i],
        };
        let mut mins = Vec::new();
        for c in 0..n.div_ceil(q) {
            let a: Vec<Option<T>> = (0..q)
                .map(|t| {
                    let j = c * q + q - 1 - t;
                    (j < n).then(|| col_val(j))
                })
                .collect();
            let base = (c * q) as isize - k as isize - q as isize + 2;
            let b: Vec<Option<T>> = (0..2 * q - 1)
                .map(|r| {
                    let i = base + r as isize;
                    (i >= 0 && (i as usize) < n).then(|| -row_val(i as usize))
                })
                .collect();
            let conv = convolve_extended(&a, &b);
            mins.push((0..q).map(|s| conv[2 * q - 2 - s]).collect());
        }
        ChunkMinima { width: q, k, mins }
    }

    /// Minimum over rows `a..=b` of diagonal `d`, leftmost on ties.
    fn run_min(&self, ds: &DiagStructure<T>, d: usize, a: usize, b: usize) -> (T, usize) {
        let q = self.width;
        let s = d - self.k;
        let (lo, hi) = (a + d - 1, b + d - 1);
        let mut best: Option<(T, usize)> = None;
        let mut best_chunk: Option<(T, usize)> = None;
        let consider = |v: T, row: Option<usize>, chunk: Option<usize>,
                            best: &mut Option<(T, usize)>,
                            best_chunk: &mut Option<(T, usize)>| {
            let cur = match (best.as_ref(), best_chunk.as_ref()) {
                (Some(x), _) => Some(x.0),
                (None, Some(y)) => Some(y.0),
                _ => None,
            };
            if cur.map_or(true, |c| v < c) {
                if let Some(r) = row {
                    *best = Some((v, r));
                    *best_chunk = None;
                } else if let Some(ch) = chunk {
                    *best_chunk = Some((v, ch));
                    *best = None;
                }
            }
        };
        let mut j = lo;
        while j <= hi {
            let c = j / q;
            let chunk_end = c * q + q - 1;
            if j == c * q && chunk_end <= hi {
                if let Some(v) = self.mins[c][s] {
                    consider(v, None, Some(c), &mut best, &mut best_chunk);
                }
                j = chunk_end + 1;
            } else {
                let i = j + 1 - d;
                consider(ds.entry(i, j), Some(i), None, &mut best, &mut best_chunk);
                j += 1;
            }
        }
        if let Some((v, c)) = best_chunk {
            for j in c * q..c * q + q {
                let i = j + 1 - d;
                if ds.entry(i, j) == v {
                    return (v, i);
                }
            }
            unreachable!("chunk minimum must be attained");
        }
        best.expect("non-empty run")
    }
}
