//! Exact piecewise-linear homeomorphisms with dyadic breakpoints and
//! power-of-two slopes.
//!
//! A `PLMap` is stored as its ordered breakpoint list, endpoints included,
//! in canonical form: no two consecutive segments share a slope. The
//! product convention throughout the crate is standard composition,
//! `(f * g)(t) = f(g(t))`; a startup test pins the presentation relations
//! against this choice.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, Rational};
use crate::error::{Error, Result};
use crate::word::{Letter, Word};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PLMap {
    /// Breakpoints `(x, y)`, strictly increasing in both coordinates,
    /// first pair maps eta to eta and last maps zeta to zeta.
    breakpoints: Vec<(Dyadic, Dyadic)>,
}

impl fmt::Debug for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PLMap[")?;
        for (i, (x, y)) in self.breakpoints.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({x},{y})")?;
        }
        write!(f, "]")
    }
}

/// Slope of the segment from `a` to `b` as an exact rational.
fn slope(a: &(Dyadic, Dyadic), b: &(Dyadic, Dyadic)) -> Rational {
    let dx = (&b.0 - &a.0).to_rational();
    let dy = (&b.1 - &a.1).to_rational();
    dy / dx
}

/// Whether `r` is an integral power of two; returns the exponent.
pub fn log2_exact(r: &Rational) -> Option<i64> {
    if r.numer().is_negative() || r.numer().is_zero() {
        return None;
    }
    let mut n = r.numer().clone();
    let mut d = r.denom().clone();
    let mut e: i64 = 0;
    while n.clone() % 2 == BigInt::zero() {
        n /= 2;
        e += 1;
    }
    while d.clone() % 2 == BigInt::zero() {
        d /= 2;
        e -= 1;
    }
    if n.is_one() && d.is_one() {
        Some(e)
    } else {
        None
    }
}

impl PLMap {
    /// Build from breakpoints, validating monotonicity, endpoint fixing and
    /// power-of-two slopes, and merging collinear segments.
    pub fn new(breakpoints: Vec<(Dyadic, Dyadic)>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::BadPartition("need at least two breakpoints".into()));
        }
        let first = &breakpoints[0];
        let last = &breakpoints[breakpoints.len() - 1];
        if first.0 != first.1 || last.0 != last.1 {
            return Err(Error::NotRearrangement(
                "endpoints must be fixed by the map".into(),
            ));
        }
        for w in breakpoints.windows(2) {
            if w[0].0 >= w[1].0 || w[0].1 >= w[1].1 {
                return Err(Error::BadPartition("breakpoints must strictly increase".into()));
            }
            if log2_exact(&slope(&w[0], &w[1])).is_none() {
                return Err(Error::NotRearrangement(format!(
                    "slope {} is not a power of two",
                    slope(&w[0], &w[1])
                )));
            }
        }
        Ok(Self::new_unchecked(breakpoints))
    }

    /// Build without the PL_2 slope check (used internally where slopes are
    /// guaranteed by construction); still canonicalizes.
    pub(crate) fn new_unchecked(breakpoints: Vec<(Dyadic, Dyadic)>) -> Self {
        let mut out: Vec<(Dyadic, Dyadic)> = Vec::with_capacity(breakpoints.len());
        for p in breakpoints {
            while out.len() >= 2 {
                let n = out.len();
                if slope(&out[n - 2], &out[n - 1]) == slope(&out[n - 1], &p) {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        PLMap { breakpoints: out }
    }

    /// Identity on `[eta, zeta]`.
    pub fn identity(eta: Dyadic, zeta: Dyadic) -> Self {
        assert!(eta < zeta);
        PLMap { breakpoints: vec![(eta.clone(), eta), (zeta.clone(), zeta)] }
    }

    /// Identity on `[0,1]`.
    pub fn id_unit() -> Self {
        PLMap::identity(Dyadic::zero(), Dyadic::one())
    }

    pub fn breakpoints(&self) -> &[(Dyadic, Dyadic)] {
        &self.breakpoints
    }

    pub fn domain(&self) -> (Dyadic, Dyadic) {
        (
            self.breakpoints[0].0.clone(),
            self.breakpoints[self.breakpoints.len() - 1].0.clone(),
        )
    }

    pub fn is_identity(&self) -> bool {
        self.breakpoints.len() == 2 && self.breakpoints[0].0 == self.breakpoints[0].1
    }

    /// The generator `x_0`: `0 -> 0, 1/2 -> 1/4, 3/4 -> 1/2, 1 -> 1`.
    pub fn x0() -> Self {
        PLMap {
            breakpoints: vec![
                (Dyadic::zero(), Dyadic::zero()),
                (Dyadic::ratio(1, 1), Dyadic::ratio(1, 2)),
                (Dyadic::ratio(3, 2), Dyadic::ratio(1, 1)),
                (Dyadic::one(), Dyadic::one()),
            ],
        }
    }

    /// The generator `x_k`, `x_0` shrunk onto `[1 - 2^-k, 1]`.
    pub fn generator(k: u32) -> Self {
        if k == 0 {
            return Self::x0();
        }
        let base = Dyadic::one() - Dyadic::pow2(-(k as i32));
        let scale = |d: Dyadic| &base + &d.mul_pow2(-(k as i32));
        let x0 = Self::x0();
        let mut pts = vec![(Dyadic::zero(), Dyadic::zero())];
        for (x, y) in x0.breakpoints {
            pts.push((scale(x), scale(y)));
        }
        Self::new_unchecked(pts)
    }

    /// Exact evaluation at a rational point of the domain.
    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        let (eta, zeta) = self.domain();
        if *t < eta.to_rational() || *t > zeta.to_rational() {
            return Err(Error::OutsideDomain(t.to_string()));
        }
        // binary search for the segment containing t
        let pts = &self.breakpoints;
        let mut lo = 0usize;
        let mut hi = pts.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if pts[mid].0.to_rational() <= *t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (x0, y0) = (&pts[lo].0.to_rational(), &pts[lo].1.to_rational());
        let s = slope(&pts[lo], &pts[lo + 1]);
        Ok(y0 + s * (t - x0))
    }

    /// Exact evaluation at a dyadic point (image is dyadic).
    pub fn eval_dyadic(&self, t: &Dyadic) -> Result<Dyadic> {
        let r = self.eval(&t.to_rational())?;
        Dyadic::from_rational(&r)
    }

    /// One-sided slope exponent at the left end: `f'(eta^+) = 2^k`.
    pub fn initial_slope_exp(&self) -> i64 {
        log2_exact(&slope(&self.breakpoints[0], &self.breakpoints[1]))
            .expect("PLMap invariant: power-of-two slopes")
    }

    /// One-sided slope exponent at the right end: `f'(zeta^-) = 2^k`.
    pub fn final_slope_exp(&self) -> i64 {
        let n = self.breakpoints.len();
        log2_exact(&slope(&self.breakpoints[n - 2], &self.breakpoints[n - 1]))
            .expect("PLMap invariant: power-of-two slopes")
    }

    /// Slope exponent on the segment immediately right of rational `t`.
    pub fn slope_exp_right_of(&self, t: &Rational) -> i64 {
        let pts = &self.breakpoints;
        let mut i = 0;
        while i + 2 < pts.len() && pts[i + 1].0.to_rational() <= *t {
            i += 1;
        }
        log2_exact(&slope(&pts[i], &pts[i + 1])).expect("power-of-two slope")
    }

    /// Composition `self(g(t))`; requires equal domains. This realizes the
    /// group product `self * g`.
    pub fn compose(&self, g: &PLMap) -> Result<PLMap> {
        if self.domain() != g.domain() {
            return Err(Error::DomainMismatch(format!(
                "{:?} vs {:?}",
                self.domain(),
                g.domain()
            )));
        }
        // Breakpoints of self∘g: x-breakpoints of g plus g^{-1}(x-breakpoints of self).
        let mut xs: Vec<Dyadic> = g.breakpoints.iter().map(|p| p.0.clone()).collect();
        let ginv = g.inverse();
        for (x, _) in &self.breakpoints {
            xs.push(ginv.eval_dyadic(x).expect("domain"));
        }
        xs.sort();
        xs.dedup();
        let mut pts = Vec::with_capacity(xs.len());
        for x in xs {
            let y = g.eval_dyadic(&x)?;
            let z = self.eval_dyadic(&y)?;
            pts.push((x, z));
        }
        Ok(Self::new_unchecked(pts))
    }

    pub fn inverse(&self) -> PLMap {
        PLMap {
            breakpoints: self.breakpoints.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
        }
    }

    /// Integer power via repeated squaring on small exponents.
    pub fn pow(&self, n: i64) -> PLMap {
        let (eta, zeta) = self.domain();
        let mut acc = PLMap::identity(eta, zeta);
        if n == 0 {
            return acc;
        }
        let base = if n < 0 { self.inverse() } else { self.clone() };
        for _ in 0..n.unsigned_abs() {
            acc = base.compose(&acc).expect("equal domains");
        }
        acc
    }

    /// Conjugate `g^{-1} * self * g`.
    pub fn conjugate_by(&self, g: &PLMap) -> Result<PLMap> {
        g.inverse().compose(self)?.compose(g)
    }

    /// Structural equality of canonical forms.
    pub fn equal(&self, other: &PLMap) -> bool {
        self == other
    }

    /// Restrict to `[a, b]` (both must be fixed points mapped to themselves).
    pub fn restrict(&self, a: &Dyadic, b: &Dyadic) -> Result<PLMap> {
        if self.eval_dyadic(a)? != *a || self.eval_dyadic(b)? != *b {
            return Err(Error::Precondition("restriction endpoints must be fixed".into()));
        }
        let mut pts = vec![(a.clone(), a.clone())];
        for (x, y) in &self.breakpoints {
            if *x > *a && *x < *b {
                pts.push((x.clone(), y.clone()));
            }
        }
        pts.push((b.clone(), b.clone()));
        Ok(Self::new_unchecked(pts))
    }

    /// Extend by the identity outside `[a, b] ⊆ [lo, hi]`.
    pub fn extend_identity(&self, lo: &Dyadic, hi: &Dyadic) -> PLMap {
        let (eta, zeta) = self.domain();
        assert!(lo <= &eta && hi >= &zeta);
        let mut pts = Vec::new();
        if lo < &eta {
            pts.push((lo.clone(), lo.clone()));
        }
        pts.extend(self.breakpoints.iter().cloned());
        if hi > &zeta {
            pts.push((hi.clone(), hi.clone()));
        }
        Self::new_unchecked(pts)
    }

    /// Glue finitely many maps on consecutive intervals into one map.
    /// Adjacent pieces must share endpoints.
    pub fn glue(pieces: &[PLMap]) -> Result<PLMap> {
        assert!(!pieces.is_empty());
        let mut pts: Vec<(Dyadic, Dyadic)> = Vec::new();
        for (i, p) in pieces.iter().enumerate() {
            if i > 0 {
                let prev = pieces[i - 1].domain().1;
                if p.domain().0 != prev {
                    return Err(Error::BadPartition("glue pieces must be consecutive".into()));
                }
                pts.pop();
            }
            pts.extend(p.breakpoints.iter().cloned());
        }
        Ok(Self::new_unchecked(pts))
    }

    /// Whether every slope is a power of two and all breakpoints dyadic
    /// (always true by construction; kept as a debug check).
    pub fn is_thompson(&self) -> bool {
        self.breakpoints
            .windows(2)
            .all(|w| log2_exact(&slope(&w[0], &w[1])).is_some())
    }
}

/// `word_to_plmap`: the exact composite of generator maps. The empty word
/// gives the identity on `[0,1]`.
pub fn word_to_plmap(w: &Word) -> PLMap {
    let mut acc = PLMap::id_unit();
    // the written product l_1 l_2 ... l_n denotes l_1 ∘ l_2 ∘ ... ∘ l_n
    for &Letter { index, sign } in w.letters() {
        let g = PLMap::generator(index);
        let g = if sign < 0 { g.inverse() } else { g };
        acc = acc.compose(&g).expect("unit domain");
    }
    acc
}

/// Evaluate a word at a rational point without building the full PLMap
/// (linear in word length; used by the cryptanalysis case split).
pub fn word_eval(w: &Word, t: &Rational) -> Rational {
    let mut v = t.clone();
    for &Letter { index, sign } in w.letters().iter().rev() {
        let g = PLMap::generator(index);
        let g = if sign < 0 { g.inverse() } else { g };
        v = g.eval(&v).expect("unit domain");
    }
    v
}

/// `map_partition(src, dst)`: a PL_2 map of `[0,1]` with `g(src_i) = dst_i`.
///
/// Both lists must be strictly increasing dyadic partitions of `[0,1]`
/// including the endpoints 0 and 1.
pub fn map_partition(src: &[Dyadic], dst: &[Dyadic]) -> Result<PLMap> {
    if src.len() != dst.len() || src.len() < 2 {
        return Err(Error::BadPartition("partition lengths differ".into()));
    }
    let chk = |v: &[Dyadic]| -> Result<()> {
        if v[0] != Dyadic::zero() || v[v.len() - 1] != Dyadic::one() {
            return Err(Error::BadPartition("partitions must span [0,1]".into()));
        }
        for w in v.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::BadPartition("partitions must strictly increase".into()));
            }
        }
        Ok(())
    };
    chk(src)?;
    chk(dst)?;
    let mut pieces = Vec::new();
    for i in 0..src.len() - 1 {
        pieces.push(dyadic_interval_map(&src[i], &src[i + 1], &dst[i], &dst[i + 1]));
    }
    PLMap::glue(&pieces)
}

/// A PL_2-style homeomorphism `[a,b] -> [c,d]` between dyadic intervals
/// (dyadic breakpoints, power-of-two slopes), as a breakpoint list. Note the
/// result is not a `PLMap` (endpoints are not fixed); it is returned as raw
/// breakpoints for gluing into larger maps.
pub fn dyadic_interval_map_points(
    a: &Dyadic,
    b: &Dyadic,
    c: &Dyadic,
    d: &Dyadic,
) -> Vec<(Dyadic, Dyadic)> {
    assert!(a < b && c < d);
    // Greedy partitions into standard dyadic intervals, padded to equal
    // length by halving, then matched linearly piece by piece.
    let s1 = standard_partition(a, b);
    let s2 = standard_partition(c, d);
    let (s1, s2) = equalize(s1, s2);
    let mut pts: Vec<(Dyadic, Dyadic)> = vec![(a.clone(), c.clone())];
    for i in 0..s1.len() {
        pts.push((s1[i].1.clone(), s2[i].1.clone()));
    }
    pts
}

/// Same as `dyadic_interval_map_points` but wrapped with identity outside so
/// that it is a self-map piece; only used via `glue`.
fn dyadic_interval_map(a: &Dyadic, b: &Dyadic, c: &Dyadic, d: &Dyadic) -> PLMap {
    // Runs through new_unchecked: the caller glues pieces so endpoint fixing
    // holds only for the assembled map. We cheat by constructing the piece as
    // a raw map; glue() re-canonicalizes.
    PLMap { breakpoints: dyadic_interval_map_points(a, b, c, d) }
}

/// Greedy decomposition of a dyadic interval into standard dyadic intervals
/// `[m/2^e, (m+1)/2^e]`, walking left to right.
fn standard_partition(a: &Dyadic, b: &Dyadic) -> Vec<(Dyadic, Dyadic)> {
    let mut out = Vec::new();
    let mut x = a.clone();
    while x < *b {
        // largest standard interval starting at x and fitting in [x, b]
        // length 2^-k with x multiple of 2^-k and x + 2^-k <= b
        let mut k = x.exponent() as i32; // x is a multiple of 2^-k exactly
        loop {
            let len = Dyadic::pow2(-k);
            let end = &x + &len;
            if end <= *b {
                out.push((x.clone(), end.clone()));
                x = end;
                break;
            }
            k += 1;
        }
    }
    out
}

/// Pad the shorter list of standard intervals by halving entries until both
/// lists have equal length.
fn equalize(
    mut s1: Vec<(Dyadic, Dyadic)>,
    mut s2: Vec<(Dyadic, Dyadic)>,
) -> (Vec<(Dyadic, Dyadic)>, Vec<(Dyadic, Dyadic)>) {
    fn split_once(v: &mut Vec<(Dyadic, Dyadic)>) {
        // halve the widest interval (first of maximal width)
        let mut best = 0usize;
        for i in 1..v.len() {
            let wi = &v[i].1 - &v[i].0;
            let wb = &v[best].1 - &v[best].0;
            if wi > wb {
                best = i;
            }
        }
        let (a, b) = v[best].clone();
        let mid = (&a + &b).half();
        v[best] = (a, mid.clone());
        v.insert(best + 1, (mid, b));
    }
    while s1.len() < s2.len() {
        split_once(&mut s1);
    }
    while s2.len() < s1.len() {
        split_once(&mut s2);
    }
    (s1, s2)
}

/// Extension of partial maps on `[lo, hi]`: given disjoint dyadic
/// sub-intervals `I_i` and PL_2 partial maps `g_i : I_i -> J_i` with the
/// `J_i` disjoint and in the same order, produce `g ∈ PL_2([lo, hi])`
/// restricting to each `g_i`, filling the gaps with dyadic rearrangements.
pub fn extend_partial_maps_on(
    pieces: &[Vec<(Dyadic, Dyadic)>],
    lo: &Dyadic,
    hi: &Dyadic,
) -> Result<PLMap> {
    let mut pts: Vec<(Dyadic, Dyadic)> = Vec::new();
    let mut cur = (lo.clone(), lo.clone());
    pts.push(cur.clone());
    for piece in pieces {
        assert!(piece.len() >= 2);
        let start = &piece[0];
        if start.0 < cur.0 || start.1 < cur.1 {
            return Err(Error::BadPartition("partial maps out of order".into()));
        }
        if start.0 > cur.0 {
            // filler on [cur.0, start.0] -> [cur.1, start.1]
            if start.1 == cur.1 {
                return Err(Error::BadPartition("filler range collapsed".into()));
            }
            let fill = dyadic_interval_map_points(&cur.0, &start.0, &cur.1, &start.1);
            pts.extend(fill.into_iter().skip(1));
        } else if start.1 != cur.1 {
            return Err(Error::BadPartition("inconsistent piece start".into()));
        }
        pts.extend(piece.iter().skip(1).cloned());
        cur = piece[piece.len() - 1].clone();
    }
    if cur.0 < *hi {
        if cur.1 >= *hi {
            return Err(Error::BadPartition("no room for final filler".into()));
        }
        let fill = dyadic_interval_map_points(&cur.0, hi, &cur.1, hi);
        pts.extend(fill.into_iter().skip(1));
    } else if cur.1 != *hi {
        return Err(Error::BadPartition("last piece must end at the right endpoint".into()));
    }
    PLMap::new(pts)
}

/// `extend_partial_maps_on` specialized to the unit interval.
pub fn extend_partial_maps(pieces: &[Vec<(Dyadic, Dyadic)>]) -> Result<PLMap> {
    extend_partial_maps_on(pieces, &Dyadic::zero(), &Dyadic::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Word;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn x0_breakpoints_and_values() {
        let x0 = PLMap::x0();
        assert_eq!(x0.eval(&rat(1, 2)).unwrap(), rat(1, 4));
        assert_eq!(x0.eval(&rat(3, 4)).unwrap(), rat(1, 2));
        assert_eq!(x0.inverse().eval(&rat(1, 4)).unwrap(), rat(1, 2));
        assert_eq!(x0.initial_slope_exp(), -1);
        assert_eq!(x0.final_slope_exp(), 1);
    }

    #[test]
    fn identity_laws() {
        let x0 = PLMap::x0();
        let id = PLMap::id_unit();
        assert_eq!(id.compose(&x0).unwrap(), x0);
        assert_eq!(x0.compose(&x0.inverse()).unwrap(), id);
        assert_eq!(id.eval(&rat(1, 3)).unwrap(), rat(1, 3));
    }

    #[test]
    fn presentation_relations_under_standard_composition() {
        // x_k^{-1} x_n x_k = x_{n+1} for 0 <= k < n <= 8, with the product
        // being function composition.
        for k in 0..8u32 {
            for n in (k + 1)..=8 {
                let xk = PLMap::generator(k);
                let xn = PLMap::generator(n);
                let lhs = xk
                    .inverse()
                    .compose(&xn)
                    .unwrap()
                    .compose(&xk)
                    .unwrap();
                assert_eq!(lhs, PLMap::generator(n + 1), "failed at k={k} n={n}");
            }
        }
    }

    #[test]
    fn word_to_plmap_examples() {
        assert!(word_to_plmap(&Word::empty()).is_identity());
        let w = Word::parse("x0").unwrap();
        assert_eq!(word_to_plmap(&w), PLMap::x0());
        let w1 = Word::parse("x1 x0").unwrap();
        let w2 = Word::parse("x0 x2").unwrap();
        assert_eq!(word_to_plmap(&w1), word_to_plmap(&w2));
    }

    #[test]
    fn map_partition_examples() {
        let g = map_partition(
            &[Dyadic::zero(), Dyadic::one()],
            &[Dyadic::zero(), Dyadic::one()],
        )
        .unwrap();
        assert!(g.is_identity());

        let g = map_partition(
            &[Dyadic::zero(), Dyadic::ratio(1, 1), Dyadic::one()],
            &[Dyadic::zero(), Dyadic::ratio(1, 2), Dyadic::one()],
        )
        .unwrap();
        assert_eq!(g.eval(&rat(1, 2)).unwrap(), rat(1, 4));

        let src = [Dyadic::zero(), Dyadic::ratio(1, 2), Dyadic::ratio(3, 3), Dyadic::one()];
        let dst = [Dyadic::zero(), Dyadic::ratio(1, 1), Dyadic::ratio(3, 2), Dyadic::one()];
        let g = map_partition(&src, &dst).unwrap();
        for i in 0..4 {
            assert_eq!(g.eval_dyadic(&src[i]).unwrap(), dst[i]);
        }
        assert!(g.is_thompson());
    }

    #[test]
    fn word_eval_matches_plmap() {
        let w = Word::parse("x0 x1 x0^-1 x2").unwrap();
        let f = word_to_plmap(&w);
        for (p, q) in [(1i64, 3i64), (1, 2), (7, 8), (2, 5)] {
            assert_eq!(word_eval(&w, &rat(p, q)), f.eval(&rat(p, q)).unwrap());
        }
    }
}
