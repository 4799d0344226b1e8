//! Binary trees, tree pair diagrams, and conversions to and from exact PL
//! maps and normal-form words.

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::plmap::PLMap;
use crate::word::Word;

/// A rooted planar binary tree (caret/leaf structure).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum BinaryTree {
    Leaf,
    Caret(Box<BinaryTree>, Box<BinaryTree>),
}

use BinaryTree::{Caret, Leaf};

impl BinaryTree {
    pub fn caret(l: BinaryTree, r: BinaryTree) -> Self {
        Caret(Box::new(l), Box::new(r))
    }

    pub fn leaves(&self) -> usize {
        match self {
            Leaf => 1,
            Caret(l, r) => l.leaves() + r.leaves(),
        }
    }

    pub fn carets(&self) -> usize {
        self.leaves() - 1
    }

    /// Right vine with `n` leaves (n >= 1).
    pub fn right_vine(n: usize) -> Self {
        assert!(n >= 1);
        let mut t = Leaf;
        for _ in 1..n {
            t = Self::caret(Leaf, t);
        }
        t
    }

    /// The dyadic partition of `[0,1]` whose pieces are the leaf intervals.
    pub fn partition(&self) -> Vec<Dyadic> {
        let mut pts = vec![Dyadic::zero()];
        fn rec(t: &BinaryTree, a: Dyadic, b: Dyadic, pts: &mut Vec<Dyadic>) {
            match t {
                Leaf => pts.push(b),
                Caret(l, r) => {
                    let mid = (&a + &b).half();
                    rec(l, a, mid.clone(), pts);
                    rec(r, mid, b, pts);
                }
            }
        }
        rec(self, Dyadic::zero(), Dyadic::one(), &mut pts);
        pts
    }

    /// Build the tree whose leaf intervals realize the given standard
    /// dyadic partition of `[lo, hi]`. Panics if the partition is not
    /// realizable (interior points must bisect recursively).
    pub fn from_partition(points: &[Dyadic]) -> Self {
        assert!(points.len() >= 2);
        fn rec(points: &[Dyadic]) -> BinaryTree {
            if points.len() == 2 {
                return Leaf;
            }
            let mid = (&points[0] + &points[points.len() - 1]).half();
            let pos = points
                .iter()
                .position(|p| *p == mid)
                .expect("partition does not bisect at the midpoint");
            BinaryTree::caret(rec(&points[..=pos]), rec(&points[pos..]))
        }
        rec(points)
    }

    /// Leaf indices `i` such that leaves `i` and `i+1` are the two children
    /// of one caret.
    pub(crate) fn sibling_pairs(&self) -> Vec<usize> {
        let mut out = Vec::new();
        fn rec(t: &BinaryTree, next_leaf: &mut usize, out: &mut Vec<usize>) {
            match t {
                Leaf => *next_leaf += 1,
                Caret(l, r) => {
                    if matches!(**l, Leaf) && matches!(**r, Leaf) {
                        out.push(*next_leaf);
                        *next_leaf += 2;
                    } else {
                        rec(l, next_leaf, out);
                        rec(r, next_leaf, out);
                    }
                }
            }
        }
        rec(self, &mut 0, &mut out);
        out
    }

    /// Replace the caret whose children are leaves `i`, `i+1` by a leaf.
    pub(crate) fn remove_grounded_caret(&self, i: usize) -> BinaryTree {
        fn rec(t: &BinaryTree, next_leaf: &mut usize, target: usize) -> BinaryTree {
            match t {
                Leaf => {
                    *next_leaf += 1;
                    Leaf
                }
                Caret(l, r) => {
                    if matches!(**l, Leaf) && matches!(**r, Leaf) && *next_leaf == target {
                        *next_leaf += 2;
                        return Leaf;
                    }
                    let nl = rec(l, next_leaf, target);
                    let nr = rec(r, next_leaf, target);
                    BinaryTree::caret(nl, nr)
                }
            }
        }
        rec(self, &mut 0, i)
    }

    /// Insert a caret at leaf `i` (the expansion move).
    pub fn expand_leaf(&self, i: usize) -> BinaryTree {
        fn rec(t: &BinaryTree, next_leaf: &mut usize, target: usize) -> BinaryTree {
            match t {
                Leaf => {
                    let here = *next_leaf;
                    *next_leaf += 1;
                    if here == target {
                        BinaryTree::caret(Leaf, Leaf)
                    } else {
                        Leaf
                    }
                }
                Caret(l, r) => {
                    let nl = rec(l, next_leaf, target);
                    let nr = rec(r, next_leaf, target);
                    BinaryTree::caret(nl, nr)
                }
            }
        }
        rec(self, &mut 0, i)
    }

    /// Leaf exponents for normal-form extraction: for leaf `k`, the number
    /// of consecutive left edges climbing from the leaf, minus one when that
    /// chain tops out at a vertex on the right spine of the tree.
    pub fn leaf_exponents(&self) -> Vec<u32> {
        let mut exps = Vec::with_capacity(self.leaves());
        // upchain: consecutive left edges immediately above the node;
        // top_on_spine: whether the top vertex of that chain is on the
        // right spine; on_spine: whether the node itself is.
        fn rec(
            t: &BinaryTree,
            upchain: u32,
            top_on_spine: bool,
            on_spine: bool,
            exps: &mut Vec<u32>,
        ) {
            match t {
                Leaf => {
                    let e = if upchain > 0 && top_on_spine { upchain - 1 } else { upchain };
                    exps.push(e);
                }
                Caret(l, r) => {
                    let left_top = if upchain > 0 { top_on_spine } else { on_spine };
                    rec(l, upchain + 1, left_top, false, exps);
                    rec(r, 0, on_spine, on_spine, exps);
                }
            }
        }
        rec(self, 0, true, true, &mut exps);
        exps
    }
}

/// A tree pair diagram `(domain, range)` with equal leaf counts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct TreePair {
    pub domain: BinaryTree,
    pub range: BinaryTree,
}

impl TreePair {
    pub fn new(domain: BinaryTree, range: BinaryTree) -> Result<Self> {
        if domain.leaves() != range.leaves() {
            return Err(Error::Precondition("leaf counts differ".into()));
        }
        Ok(TreePair { domain, range })
    }

    pub fn identity() -> Self {
        TreePair { domain: Leaf, range: Leaf }
    }

    pub fn leaves(&self) -> usize {
        self.domain.leaves()
    }

    pub fn inverse(&self) -> TreePair {
        TreePair { domain: self.range.clone(), range: self.domain.clone() }
    }

    /// Cancel opposing pairs of bottom carets until reduced.
    pub fn reduce(&self) -> TreePair {
        let mut d = self.domain.clone();
        let mut r = self.range.clone();
        loop {
            let sd = d.sibling_pairs();
            let sr = r.sibling_pairs();
            let common = sd.iter().find(|i| sr.contains(i)).copied();
            match common {
                Some(i) if d.leaves() > 2 || r.leaves() > 2 => {
                    d = d.remove_grounded_caret(i);
                    r = r.remove_grounded_caret(i);
                }
                Some(i) => {
                    // 2-leaf case: both trees single carets => identity
                    d = d.remove_grounded_caret(i);
                    r = r.remove_grounded_caret(i);
                }
                None => break,
            }
        }
        TreePair { domain: d, range: r }
    }

    pub fn is_reduced(&self) -> bool {
        let sd = self.domain.sibling_pairs();
        let sr = self.range.sibling_pairs();
        !sd.iter().any(|i| sr.contains(i))
    }

    /// Expand both trees at leaf `i` (inverse of a reduction).
    pub fn expand(&self, i: usize) -> TreePair {
        TreePair {
            domain: self.domain.expand_leaf(i),
            range: self.range.expand_leaf(i),
        }
    }
}

/// The PL map realizing a tree pair: domain partition mapped linearly onto
/// the range partition, piece by piece.
pub fn plmap_from_tree_pair(t: &TreePair) -> PLMap {
    let d = t.domain.partition();
    let r = t.range.partition();
    let pts: Vec<(Dyadic, Dyadic)> = d.into_iter().zip(r).collect();
    PLMap::new(pts).expect("tree pair partitions give a dyadic rearrangement")
}

/// The reduced tree pair of a PL map (must be a dyadic rearrangement of
/// `[0,1]`).
pub fn tree_pair_from_plmap(f: &PLMap) -> Result<TreePair> {
    let (eta, zeta) = f.domain();
    if eta != Dyadic::zero() || zeta != Dyadic::one() {
        return Err(Error::DomainMismatch("tree pairs require domain [0,1]".into()));
    }
    // Refine to a standard dyadic partition on which f is linear with
    // standard dyadic image pieces, take both trees, then reduce.
    fn is_standard(a: &Dyadic, b: &Dyadic) -> bool {
        let len = b - a;
        // length 2^-k and a a multiple of it
        if len.numerator() != &num_bigint::BigInt::from(1) {
            return false;
        }
        let k = len.exponent();
        a.exponent() <= k
    }
    fn rec(
        f: &PLMap,
        a: Dyadic,
        b: Dyadic,
        dom: &mut Vec<Dyadic>,
    ) -> Result<()> {
        let fa = f.eval_dyadic(&a)?;
        let fb = f.eval_dyadic(&b)?;
        let linear = {
            let mid = (&a + &b).half();
            let fm = f.eval_dyadic(&mid)?;
            // f linear on [a,b] iff it is linear at every interior
            // breakpoint; test by comparing against the chord
            let chord_ok = (&fm - &fa) + (&fm - &fb) == Dyadic::zero()
                || chord_value(&a, &b, &fa, &fb, &mid) == Some(fm);
            chord_ok && f.breakpoints().iter().all(|(x, y)| {
                if *x <= a || *x >= b {
                    true
                } else {
                    chord_value(&a, &b, &fa, &fb, x) == Some(y.clone())
                }
            })
        };
        if linear && is_standard(&a, &b) && is_standard(&fa, &fb) {
            dom.push(b);
            return Ok(());
        }
        let mid = (&a + &b).half();
        rec(f, a, mid.clone(), dom)?;
        rec(f, mid, b, dom)
    }
    let mut dom = vec![Dyadic::zero()];
    rec(f, Dyadic::zero(), Dyadic::one(), &mut dom)?;
    let domain = BinaryTree::from_partition(&dom);
    let range_pts: Vec<Dyadic> =
        dom.iter().map(|x| f.eval_dyadic(x)).collect::<Result<_>>()?;
    let range = BinaryTree::from_partition(&range_pts);
    Ok(TreePair { domain, range }.reduce())
}

/// Value on the chord from `(a, fa)` to `(b, fb)` at `x`, when dyadic.
fn chord_value(a: &Dyadic, b: &Dyadic, fa: &Dyadic, fb: &Dyadic, x: &Dyadic) -> Option<Dyadic> {
    let num = (fb - fa).to_rational() * (x - a).to_rational();
    let den = (b - a).to_rational();
    let v = fa.to_rational() + num / den;
    Dyadic::from_rational(&v).ok()
}

/// Normal-form word of a reduced tree pair via leaf exponents: positive
/// part from the range tree, negative part from the domain tree.
pub fn word_from_tree_pair(t: &TreePair) -> Word {
    let t = t.reduce();
    let pos_exp = t.range.leaf_exponents();
    let neg_exp = t.domain.leaf_exponents();
    let mut pos = Vec::new();
    for (k, &e) in pos_exp.iter().enumerate() {
        for _ in 0..e {
            pos.push(k as u32);
        }
    }
    let mut neg = Vec::new();
    for (k, &e) in neg_exp.iter().enumerate() {
        for _ in 0..e {
            neg.push(k as u32);
        }
    }
    Word::from_parts(&pos, &neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::word_to_plmap;

    #[test]
    fn x0_tree_pair() {
        let f = PLMap::x0();
        let t = tree_pair_from_plmap(&f).unwrap();
        assert_eq!(t.domain.carets(), 2);
        assert_eq!(t.range.carets(), 2);
        assert_eq!(t.domain, BinaryTree::caret(Leaf, BinaryTree::caret(Leaf, Leaf)));
        assert_eq!(t.range, BinaryTree::caret(BinaryTree::caret(Leaf, Leaf), Leaf));
        assert_eq!(plmap_from_tree_pair(&t), f);
    }

    #[test]
    fn identity_pair() {
        let t = tree_pair_from_plmap(&PLMap::id_unit()).unwrap();
        assert_eq!(t.leaves(), 1);
        assert!(plmap_from_tree_pair(&TreePair::identity()).is_identity());
    }

    #[test]
    fn reduce_expand_round_trip() {
        let t = tree_pair_from_plmap(&word_to_plmap(&Word::parse("x0 x1^-1 x2").unwrap()))
            .unwrap();
        for i in 0..t.leaves() {
            assert_eq!(t.expand(i).reduce(), t);
        }
    }

    #[test]
    fn word_extraction_round_trip() {
        for s in [
            "x0",
            "x1",
            "x0^-1",
            "x2 x0^-1",
            "x0 x1",
            "x0 x0 x1^-1",
            "x1 x0 x3^-1 x2",
            "x0^-1 x1 x0",
        ] {
            let w = Word::parse(s).unwrap();
            let f = word_to_plmap(&w);
            let t = tree_pair_from_plmap(&f).unwrap();
            let back = word_from_tree_pair(&t);
            assert_eq!(
                word_to_plmap(&back),
                f,
                "extraction failed for {s}: got {back}"
            );
            // extraction yields exactly the normal form
            assert_eq!(back, w.normal_form(), "normal form mismatch for {s}");
        }
    }
}
