//! Forest diagrams, the exact word-length formula, breadth-first ball
//! enumeration, the positive-element growth series, and the slice
//! recurrence for sphere sizes of F in the {x_0, x_1} generating set.

use std::collections::HashMap;


use crate::error::{Error, Result};
use crate::tree::BinaryTree;
use crate::word::{Letter, Word};

/// A bounded bi-infinite binary forest: a finite window of trees (all
/// nontrivial trees lie inside) plus a pointer at one window position.
/// Trees outside the window are trivial.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Forest {
    pub trees: Vec<BinaryTree>,
    pub pointer: usize,
}

impl Forest {
    fn leaves(&self) -> usize {
        self.trees.iter().map(|t| t.leaves()).sum()
    }
}

/// A forest diagram: top and bottom forests with leaf-aligned windows and
/// an order-preserving leaf bijection. Stored trimmed (canonical).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ForestDiagram {
    pub top: Forest,
    pub bottom: Forest,
}

impl ForestDiagram {
    pub fn identity() -> Self {
        ForestDiagram {
            top: Forest { trees: vec![BinaryTree::Leaf], pointer: 0 },
            bottom: Forest { trees: vec![BinaryTree::Leaf], pointer: 0 },
        }
    }

    pub fn is_identity(&self) -> bool {
        self == &ForestDiagram::identity()
    }

    fn assert_invariants(&self) {
        debug_assert_eq!(self.top.leaves(), self.bottom.leaves());
        debug_assert!(self.top.pointer < self.top.trees.len());
        debug_assert!(self.bottom.pointer < self.bottom.trees.len());
    }

    /// Trim trivial aligned tree pairs off both window ends.
    fn trim(&mut self) {
        loop {
            let t = &self.top.trees;
            let b = &self.bottom.trees;
            if t.len() > 1
                && b.len() > 1
                && matches!(t[0], BinaryTree::Leaf)
                && matches!(b[0], BinaryTree::Leaf)
                && self.top.pointer > 0
                && self.bottom.pointer > 0
            {
                self.top.trees.remove(0);
                self.bottom.trees.remove(0);
                self.top.pointer -= 1;
                self.bottom.pointer -= 1;
                continue;
            }
            let (tl, bl) = (t.len(), b.len());
            if tl > 1
                && bl > 1
                && matches!(t[tl - 1], BinaryTree::Leaf)
                && matches!(b[bl - 1], BinaryTree::Leaf)
                && self.top.pointer < tl - 1
                && self.bottom.pointer < bl - 1
            {
                self.top.trees.pop();
                self.bottom.trees.pop();
                continue;
            }
            break;
        }
        self.assert_invariants();
    }

    /// Grow the window on the left/right with aligned trivial pairs so that
    /// the top window index `i` (possibly -1 or len) becomes valid.
    fn ensure_top_index(&mut self, i: i64) -> usize {
        if i < 0 {
            let k = (-i) as usize;
            for _ in 0..k {
                self.top.trees.insert(0, BinaryTree::Leaf);
                self.bottom.trees.insert(0, BinaryTree::Leaf);
            }
            self.top.pointer += k;
            self.bottom.pointer += k;
            0
        } else {
            while (i as usize) >= self.top.trees.len() {
                self.top.trees.push(BinaryTree::Leaf);
                self.bottom.trees.push(BinaryTree::Leaf);
            }
            i as usize
        }
    }

    /// Left multiplication by x_0: move the top pointer one tree right.
    pub fn act_x0(&self) -> Self {
        let mut d = self.clone();
        let i = d.ensure_top_index(d.top.pointer as i64 + 1);
        let _ = i;
        d.top.pointer += 1;
        d.trim();
        d
    }

    /// Left multiplication by x_0^{-1}: move the top pointer one tree left.
    pub fn act_x0_inv(&self) -> Self {
        let mut d = self.clone();
        if d.top.pointer == 0 {
            d.ensure_top_index(-1);
            // pointers shifted right by 1; now step left
        }
        d.top.pointer -= 1;
        d.trim();
        d
    }

    /// Left multiplication by x_1: drop a caret joining the pointer tree
    /// and its right neighbor; reduce if it opposes a grounded bottom caret.
    pub fn act_x1(&self) -> Self {
        let mut d = self.clone();
        let p = d.top.pointer;
        d.ensure_top_index(p as i64 + 1);
        let right = d.top.trees.remove(p + 1);
        let left = std::mem::replace(&mut d.top.trees[p], BinaryTree::Leaf);
        let grounded =
            matches!(left, BinaryTree::Leaf) && matches!(right, BinaryTree::Leaf);
        d.top.trees[p] = BinaryTree::caret(left, right);
        if d.bottom.pointer > p && d.bottom.pointer > 0 {
            // bottom window may have lost alignment only via tree count:
            // bottom trees unchanged, nothing to do
        }
        if grounded {
            // leaf index of the new caret's left leaf
            let k: usize = d.top.trees[..p].iter().map(|t| t.leaves()).sum();
            if let Some((bt, off)) = d.bottom_tree_of_leaf(k) {
                let tree = &d.bottom.trees[bt];
                // an opposing grounded caret may sit anywhere inside the
                // bottom tree, as long as it joins exactly leaves k, k+1
                if tree.leaves() > off + 1 && tree.sibling_pairs().contains(&off) {
                    d.top.trees[p] = BinaryTree::Leaf;
                    d.bottom.trees[bt] = tree.remove_grounded_caret(off);
                }
            }
        }
        d.trim();
        d
    }

    /// Left multiplication by x_1^{-1}: delete the top caret of the
    /// pointer tree (expanding first when the tree is trivial); the pointer
    /// ends on the left child tree.
    pub fn act_x1_inv(&self) -> Self {
        let mut d = self.clone();
        let p = d.top.pointer;
        if matches!(d.top.trees[p], BinaryTree::Leaf) {
            // expansion: opposing carets added top and bottom
            let k: usize = d.top.trees[..p].iter().map(|t| t.leaves()).sum();
            let (bt, off) = d.bottom_tree_of_leaf(k).expect("aligned leaf");
            d.bottom.trees[bt] = expand_leaf_at(&d.bottom.trees[bt], off);
            d.top.trees[p] = BinaryTree::caret(BinaryTree::Leaf, BinaryTree::Leaf);
        }
        let BinaryTree::Caret(l, r) = d.top.trees[p].clone() else {
            unreachable!("pointer tree is a caret now");
        };
        d.top.trees[p] = *l;
        d.top.trees.insert(p + 1, *r);
        d.trim();
        d
    }

    /// Which bottom tree contains global leaf `k`, and the offset inside.
    fn bottom_tree_of_leaf(&self, k: usize) -> Option<(usize, usize)> {
        let mut acc = 0usize;
        for (i, t) in self.bottom.trees.iter().enumerate() {
            let n = t.leaves();
            if k < acc + n {
                return Some((i, k - acc));
            }
            acc += n;
        }
        None
    }

    pub fn act_letter(&self, l: Letter) -> Result<Self> {
        match (l.index, l.sign) {
            (0, 1) => Ok(self.act_x0()),
            (0, -1) => Ok(self.act_x0_inv()),
            (1, 1) => Ok(self.act_x1()),
            (1, -1) => Ok(self.act_x1_inv()),
            _ => Err(Error::Precondition(format!(
                "forest actions take x0/x1 letters, got x{}",
                l.index
            ))),
        }
    }

    /// Compact canonical serialization (dedup key for searches).
    pub fn key(&self) -> Vec<u8> {
        fn enc(t: &BinaryTree, out: &mut Vec<u8>) {
            match t {
                BinaryTree::Leaf => out.push(b'0'),
                BinaryTree::Caret(l, r) => {
                    out.push(b'1');
                    enc(l, out);
                    enc(r, out);
                }
            }
        }
        let mut out = Vec::new();
        out.push(self.top.pointer as u8);
        out.push(self.bottom.pointer as u8);
        for t in &self.top.trees {
            enc(t, &mut out);
            out.push(b',');
        }
        out.push(b'|');
        for t in &self.bottom.trees {
            enc(t, &mut out);
            out.push(b',');
        }
        out
    }
}

fn expand_leaf_at(t: &BinaryTree, leaf: usize) -> BinaryTree {
    t.expand_leaf(leaf)
}

/// Rewrite a word over all x_k into the {x0, x1} alphabet via
/// `x_k = x_0^{1-k} x_1 x_0^{k-1}`.
pub fn rewrite_to_x0x1(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for &l in w.letters() {
        match l.index {
            0 | 1 => out.push(l),
            k => {
                let k = k as i64;
                if l.sign > 0 {
                    for _ in 0..(k - 1) {
                        out.push(Letter::neg(0));
                    }
                    out.push(Letter::pos(1));
                    for _ in 0..(k - 1) {
                        out.push(Letter::pos(0));
                    }
                } else {
                    for _ in 0..(k - 1) {
                        out.push(Letter::neg(0));
                    }
                    out.push(Letter::neg(1));
                    for _ in 0..(k - 1) {
                        out.push(Letter::pos(0));
                    }
                }
            }
        }
    }
    Word::from_letters(out)
}

/// Forest diagram of a word over {x0, x1} (apply letters right to left).
pub fn forest_from_word(w: &Word) -> Result<ForestDiagram> {
    let mut d = ForestDiagram::identity();
    for &l in w.letters().iter().rev() {
        d = d.act_letter(l)?;
    }
    Ok(d)
}

/// Space labels of the length formula.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SpaceLabel {
    L,
    N,
    I,
    R,
}

fn weight(top: SpaceLabel, bottom: SpaceLabel) -> u64 {
    use SpaceLabel::*;
    match (top, bottom) {
        (N, N) => 2,
        (N, I) => 2,
        (N, R) => 2,
        (N, L) => 1,
        (I, N) => 2,
        (I, I) => 0,
        (I, R) => 0,
        (I, L) => 1,
        (R, N) => 2,
        (R, I) => 0,
        (R, R) => 2,
        (R, L) => 1,
        (L, N) => 1,
        (L, I) => 1,
        (L, R) => 1,
        (L, L) => 2,
    }
}

/// Per-forest space labels over global leaf gaps `0..leaves-1`.
fn labels(f: &Forest) -> Vec<SpaceLabel> {
    // leaf -> (tree index, is-left-child, first-leaf-of-tree?)
    let mut tree_of_leaf = Vec::new();
    let mut is_left_child = Vec::new();
    for (ti, t) in f.trees.iter().enumerate() {
        // record for each leaf whether it is a left child of its caret
        fn walk(t: &BinaryTree, side: Option<bool>, out: &mut Vec<bool>) {
            match t {
                BinaryTree::Leaf => out.push(side == Some(true)),
                BinaryTree::Caret(l, r) => {
                    walk(l, Some(true), out);
                    walk(r, Some(false), out);
                }
            }
        }
        let mut flags = Vec::new();
        walk(t, None, &mut flags);
        for fl in flags {
            tree_of_leaf.push(ti);
            is_left_child.push(fl);
        }
    }
    let n = tree_of_leaf.len();
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let t_l = tree_of_leaf[i];
        let t_r = tree_of_leaf[i + 1];
        let exterior = t_l != t_r;
        let label = if exterior && t_r <= f.pointer {
            SpaceLabel::L
        } else if is_left_child[i + 1] {
            SpaceLabel::N
        } else if !exterior {
            SpaceLabel::I
        } else {
            SpaceLabel::R
        };
        out.push(label);
    }
    out
}

/// Leaf index range `[first, last]` of the support: pointers plus all
/// nontrivial trees.
fn support_leaf_range(d: &ForestDiagram) -> (usize, usize) {
    let mut first = usize::MAX;
    let mut last = 0usize;
    let mut mark = |forest: &Forest| {
        let mut acc = 0usize;
        for (i, t) in forest.trees.iter().enumerate() {
            let n = t.leaves();
            if i == forest.pointer || n > 1 {
                first = first.min(acc);
                last = last.max(acc + n - 1);
            }
            acc += n;
        }
    };
    mark(&d.top);
    mark(&d.bottom);
    (first, last)
}

/// The exact word length of a reduced forest diagram in the `{x0, x1}`
/// metric: caret count plus the summed space-pair weights over the support.
pub fn length(d: &ForestDiagram) -> u64 {
    let carets: u64 = d
        .top
        .trees
        .iter()
        .chain(&d.bottom.trees)
        .map(|t| t.carets() as u64)
        .sum();
    let lt = labels(&d.top);
    let lb = labels(&d.bottom);
    debug_assert_eq!(lt.len(), lb.len());
    if lt.is_empty() {
        return carets;
    }
    let (first, last) = support_leaf_range(d);
    let mut w = 0u64;
    for i in first..last {
        w += weight(lt[i], lb[i]);
    }
    carets + w
}

const GENS: [Letter; 4] = [
    Letter { index: 0, sign: 1 },
    Letter { index: 0, sign: -1 },
    Letter { index: 1, sign: 1 },
    Letter { index: 1, sign: -1 },
];

/// Greedy geodesic extraction: repeatedly left-multiply by the generator
/// that reduces the length, recording the inverse letters.
pub fn forest_to_word(d: &ForestDiagram) -> Word {
    let mut cur = d.clone();
    let mut letters = Vec::new();
    let mut len = length(&cur);
    while !cur.is_identity() {
        let mut advanced = false;
        for g in GENS {
            let next = cur.act_letter(g).expect("x0/x1 letters");
            let nl = length(&next);
            if nl < len {
                letters.push(g.inverse());
                cur = next;
                len = nl;
                advanced = true;
                break;
            }
        }
        assert!(advanced, "length formula must admit a descent direction");
    }
    Word::from_letters(letters)
}

/// Breadth-first sphere sizes `|S_0|, ..., |S_max|` in the Cayley graph of
/// F with generators `{x0^±, x1^±}`.
pub fn bfs_spheres(max_n: usize) -> Vec<u64> {
    bfs_internal(max_n).0
}

fn bfs_internal(max_n: usize) -> (Vec<u64>, Vec<Vec<ForestDiagram>>) {
    let mut seen: HashMap<Vec<u8>, ()> = HashMap::new();
    let id = ForestDiagram::identity();
    seen.insert(id.key(), ());
    let mut frontier = vec![id];
    let mut sizes = vec![1u64];
    let mut layers = vec![frontier.clone()];
    for _ in 1..=max_n {
        let mut next = Vec::new();
        for f in &frontier {
            for g in GENS {
                let d = f.act_letter(g).expect("x0/x1");
                let k = d.key();
                if !seen.contains_key(&k) {
                    seen.insert(k, ());
                    next.push(d);
                }
            }
        }
        sizes.push(next.len() as u64);
        layers.push(next.clone());
        frontier = next;
    }
    (sizes, layers)
}

/// `bfs_sphere(n)`: exact sphere size via BFS, with a budget guard.
pub fn bfs_sphere(n: usize) -> Result<u64> {
    if n > 14 {
        return Err(Error::Budget(format!("bfs_sphere({n}) exceeds the default budget")));
    }
    Ok(bfs_spheres(n)[n])
}

/// Number of positive elements of length n, from the rational series
/// `p(x) = (1 - x^2) / (1 - 2x - x^2 + x^3)`.
pub fn positive_count(n: usize) -> u128 {
    // (1 - x^2) = p(x) (1 - 2x - x^2 + x^3)
    let mut p: Vec<i128> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let numer: i128 = match k {
            0 => 1,
            2 => -1,
            _ => 0,
        };
        let mut acc = numer;
        if k >= 1 {
            acc += 2 * p[k - 1];
        }
        if k >= 2 {
            acc += p[k - 2];
        }
        if k >= 3 {
            acc -= p[k - 3];
        }
        p.push(acc);
    }
    p[n] as u128
}

/// Positivity of an element given by its forest diagram: trivial bottom
/// forest and a normal form free of inverse letters.
pub fn is_positive(d: &ForestDiagram) -> bool {
    if d.bottom.trees.iter().any(|t| t.carets() > 0) {
        return false;
    }
    let w = forest_to_word(d).normal_form();
    w.letters().iter().all(|l| l.sign > 0)
}

/// Positive-element counts per length up to `max_n`, by filtering the BFS
/// ball (the independent check for the rational series).
pub fn positive_counts_via_bfs(max_n: usize) -> Vec<u64> {
    let (_, layers) = bfs_internal(max_n);
    layers
        .iter()
        .map(|layer| layer.iter().filter(|d| is_positive(d)).count() as u64)
        .collect()
}

// ---------------------------------------------------------------------
// Slice machinery: the five-parameter partition of the sphere and the
// reduction maps that shrink it.
// ---------------------------------------------------------------------

/// Slice coordinates of `f ∉ <x_0>`: right-arm lengths of the critical
/// trees, pointer offsets (leftward positive), and the length.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SliceCoords {
    pub i: u32,
    pub j: u32,
    pub p: i64,
    pub q: i64,
    pub n: u64,
}

fn right_arm(t: &BinaryTree) -> u32 {
    match t {
        BinaryTree::Leaf => 0,
        BinaryTree::Caret(_, r) => 1 + right_arm(r),
    }
}

/// Classify a non-`x_0`-power into its slice.
pub fn classify(d: &ForestDiagram) -> Option<SliceCoords> {
    // tree index per leaf for both forests
    let leafmap = |f: &Forest| -> Vec<usize> {
        let mut v = Vec::new();
        for (i, t) in f.trees.iter().enumerate() {
            for _ in 0..t.leaves() {
                v.push(i);
            }
        }
        v
    };
    let lt = leafmap(&d.top);
    let lb = leafmap(&d.bottom);
    let nleaves = lt.len();
    let mut crit = None;
    for k in (0..nleaves).rev() {
        let tt = &d.top.trees[lt[k]];
        let bt = &d.bottom.trees[lb[k]];
        if tt.leaves() > 1 || bt.leaves() > 1 {
            crit = Some(k);
            break;
        }
    }
    let k = crit?;
    let tplus = lt[k];
    let tminus = lb[k];
    let i = right_arm(&d.top.trees[tplus]);
    let j = right_arm(&d.bottom.trees[tminus]);
    let p = tplus as i64 - d.top.pointer as i64;
    let q = tminus as i64 - d.bottom.pointer as i64;
    Some(SliceCoords { i, j, p, q, n: length(d) })
}

/// Memoized slice counts `|Z_{i,j,p,q,n}|` via the reduction maps.
pub struct SliceTable {
    memo: HashMap<SliceCoords, u128>,
}

impl SliceTable {
    pub fn new() -> Self {
        SliceTable { memo: HashMap::new() }
    }

    pub fn z(&mut self, c: SliceCoords) -> u128 {
        if let Some(&v) = self.memo.get(&c) {
            return v;
        }
        let v = self.compute(c);
        self.memo.insert(c, v);
        v
    }

    fn compute(&mut self, c: SliceCoords) -> u128 {
        let SliceCoords { i, j, p, q, n } = c;
        if (i, j) == (0, 0) {
            return 0;
        }
        let nn = n as i64;
        if i as i64 > nn || j as i64 > nn || p > nn || q > nn || p < -nn || q < -nn {
            return 0;
        }
        if p < 0 && q < 0 {
            if n < 2 {
                return 0;
            }
            return self.z(SliceCoords { i, j, p: p + 1, q: q + 1, n: n - 2 });
        }
        if q < 0 {
            // q < 0 <= p: move the bottom pointer left
            if n < 1 {
                return 0;
            }
            return self.z(SliceCoords { i, j, p, q: q + 1, n: n - 1 });
        }
        if p < 0 {
            // mirror through inversion
            return self.z(SliceCoords { i: j, j: i, p: q, q: p, n });
        }
        // p, q >= 0
        if i >= 1 && j >= 1 {
            if n < 1 {
                return 0;
            }
            return self.z(SliceCoords { i: i - 1, j, p: p + 1, q, n: n - 1 });
        }
        if i == 0 {
            return self.z(SliceCoords { i: j, j: i, p: q, q: p, n });
        }
        if i >= 2 {
            if n < 1 {
                return 0;
            }
            return self.z(SliceCoords { i: i - 1, j: 0, p: p + 1, q, n: n - 1 });
        }
        // i == 1, j == 0
        if n < 1 {
            return 0;
        }
        if q == 0 {
            // lambda image: all slices with both pointers strictly right of
            // the critical pair, at length n-1, top offset shifted by p+1,
            // plus the power of x_0
            let mut acc: u128 = 1;
            let m = n - 1;
            for r in -(m as i64)..=-1 {
                acc += self.slice_row_sum(r + p + 1, r, m);
            }
            acc
        } else {
            // q > 0
            let mut acc: u128 = 1;
            for r in 0..=(q - 1) {
                let drop = 2 * (r - (q - 1)) + 1; // note r - (q-1) <= 0
                let m = nn - drop.abs() - if drop >= 0 { drop } else { 0 };
                let _ = m;
                let mm = nn - (2 * ((q - 1) - r) + 1);
                if mm < 0 {
                    continue;
                }
                acc += self.slice_row_sum(r + p + 1 - q, r, mm as u64);
            }
            let mm = nn - (2 * (q - 1) + 1);
            if mm >= 0 {
                for r in -(mm as i64)..=-1 {
                    acc += self.slice_row_sum(r + p + 1 - q, r, mm as u64);
                }
            }
            acc
        }
    }

    /// Sum over all (c, d) != (0, 0) of |Z_{c,d,pp,qq,m}|.
    fn slice_row_sum(&mut self, pp: i64, qq: i64, m: u64) -> u128 {
        let mut acc = 0u128;
        for c in 0..=(m as u32) {
            for d in 0..=(m as u32) {
                if (c, d) == (0, 0) {
                    continue;
                }
                acc += self.z(SliceCoords { i: c, j: d, p: pp, q: qq, n: m });
            }
        }
        acc
    }

    /// Sphere size from the slice decomposition: the two powers of x_0
    /// plus all slices of length n.
    pub fn sphere(&mut self, n: u64) -> u128 {
        if n == 0 {
            return 1;
        }
        let mut acc: u128 = 2;
        let nn = n as i64;
        for i in 0..=(n as u32) {
            for j in 0..=(n as u32) {
                if (i, j) == (0, 0) {
                    continue;
                }
                for p in -nn..=nn {
                    for q in -nn..=nn {
                        acc += self.z(SliceCoords { i, j, p, q, n });
                    }
                }
            }
        }
        acc
    }
}

impl Default for SliceTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Sphere size via the slice recurrence, validated against the BFS oracle
/// up to `validate_to`; a disagreement is a hard error.
pub fn sphere_count_recursive(n: usize, validate_to: usize) -> Result<u128> {
    let check = validate_to.min(n);
    let oracle = bfs_spheres(check);
    let mut table = SliceTable::new();
    for (m, &expected) in oracle.iter().enumerate() {
        let got = table.sphere(m as u64);
        if got != expected as u128 {
            return Err(Error::ValidationMismatch { n: m, got, expected: expected as u128 });
        }
    }
    Ok(table.sphere(n as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::word_to_plmap;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn trivial_diagram_and_generators() {
        let id = ForestDiagram::identity();
        assert_eq!(length(&id), 0);
        assert_eq!(length(&id.act_x0()), 1);
        assert_eq!(length(&id.act_x0_inv()), 1);
        assert_eq!(length(&id.act_x1()), 1);
        assert_eq!(length(&id.act_x1_inv()), 1);
        // x1 drops one grounded caret at the pointer
        let x1 = id.act_x1();
        assert_eq!(x1.top.trees.iter().map(|t| t.carets()).sum::<usize>(), 1);
        assert_eq!(x1.bottom.trees.iter().map(|t| t.carets()).sum::<usize>(), 0);
    }

    #[test]
    fn inverses_cancel() {
        let id = ForestDiagram::identity();
        for g in GENS {
            let d = id.act_letter(g).unwrap().act_letter(g.inverse()).unwrap();
            assert!(d.is_identity(), "letter {g:?}");
        }
        // longer random walk forward and back
        let word = w("x1 x0 x1^-1 x0 x1 x1 x0^-1 x1^-1");
        let d = forest_from_word(&word).unwrap();
        let back = forest_from_word(&word.inverse()).unwrap();
        let mut z = d.clone();
        for &l in word.inverse().letters().iter().rev() {
            z = z.act_letter(l).unwrap();
        }
        let _ = back;
        assert!(z.is_identity());
    }

    #[test]
    fn defining_relations_hold() {
        // [x0 x1^{-1}, x0^{-1} x1 x0] = 1 and [x0 x1^{-1}, x0^{-2} x1 x0^2] = 1
        let r1 = w("x0 x1^-1 x0^-1 x1 x0 x1 x0^-1 x0^-1 x1^-1 x0");
        let _ = r1;
        let a = w("x0 x1^-1");
        let b1 = w("x0^-1 x1 x0");
        let b2 = w("x0^-1 x0^-1 x1 x0 x0");
        for b in [b1, b2] {
            let comm = a
                .concat(&b)
                .concat(&a.inverse())
                .concat(&b.inverse());
            let d = forest_from_word(&rewrite_to_x0x1(&comm)).unwrap();
            assert!(d.is_identity(), "commutator relation failed");
        }
    }

    #[test]
    fn forest_equality_matches_plmap_equality() {
        // the forest diagram is a faithful canonical form: two words over
        // {x0, x1} represent the same element iff diagrams agree
        let pairs = [
            ("x1 x0", "x0 x0^-1 x1 x0"),
            ("x0 x1", "x0 x1"),
            ("x1 x1^-1", ""),
        ];
        for (a, b) in pairs {
            let (wa, wb) = (w(a), w(b));
            let da = forest_from_word(&wa).unwrap();
            let db = forest_from_word(&wb).unwrap();
            assert_eq!(da == db, word_to_plmap(&wa) == word_to_plmap(&wb));
        }
        // random-ish inequality checks
        let (wa, wb) = (w("x0 x1"), w("x1 x0"));
        assert_ne!(forest_from_word(&wa).unwrap(), forest_from_word(&wb).unwrap());
    }

    #[test]
    fn lengths_of_xk() {
        // l(x_k) = 2k - 1 for k >= 2 (paper's standard fact), 1 for k <= 1
        for k in 2..6u32 {
            let word = rewrite_to_x0x1(&Word::gen(k));
            let d = forest_from_word(&word).unwrap();
            assert_eq!(length(&d), (2 * k - 1) as u64, "x_{k}");
        }
    }

    #[test]
    fn small_spheres() {
        let s = bfs_spheres(4);
        assert_eq!(s[0], 1);
        assert_eq!(s[1], 4);
        assert_eq!(s[2], 12);
        // |S_3| and |S_4| frozen from the oracle itself once computed;
        // cross-checked against the recurrence in the acceptance suite
        assert_eq!(s[3], 36);
        assert!(s[4] > s[3]);
    }

    #[test]
    fn geodesic_extraction_round_trip() {
        for word in ["x0 x1", "x1 x1 x0^-1", "x0^-1 x1^-1 x0 x1"] {
            let d = forest_from_word(&w(word)).unwrap();
            let geo = forest_to_word(&d);
            assert_eq!(geo.len() as u64, length(&d));
            let back = forest_from_word(&geo).unwrap();
            assert_eq!(back, d);
        }
    }

    #[test]
    fn positive_series_values() {
        assert_eq!(positive_count(0), 1);
        assert_eq!(positive_count(1), 2);
        assert_eq!(positive_count(2), 4);
        assert_eq!(positive_count(3), 9);
    }

    #[test]
    fn positive_counts_match_series_small() {
        let counts = positive_counts_via_bfs(6);
        for (n, &c) in counts.iter().enumerate() {
            assert_eq!(c as u128, positive_count(n), "positive count at n={n}");
        }
    }

    #[test]
    fn classify_generators() {
        let x1 = forest_from_word(&w("x1")).unwrap();
        let c = classify(&x1).unwrap();
        assert_eq!((c.i, c.j, c.n), (1, 0, 1));
        assert!(classify(&forest_from_word(&w("x0")).unwrap()).is_none());
    }

    #[test]
    fn recurrence_matches_bfs_small() {
        let s = bfs_spheres(6);
        let mut t = SliceTable::new();
        for (n, &expected) in s.iter().enumerate() {
            assert_eq!(t.sphere(n as u64), expected as u128, "sphere({n})");
        }
    }
}
