//! Piecewise-linear homeomorphisms with rational breakpoints, used by the
//! stair machinery on intervals whose endpoints are non-dyadic fixed
//! points. Group elements themselves always have dyadic data; the rational
//! generality is for restrictions and intermediate conjugator candidates.

use num_traits::{One, Signed};

use crate::dyadic::{Dyadic, Rational};
use crate::plmap::PLMap;

/// A PL self-homeomorphism of a rational interval `[eta, zeta]` fixing both
/// endpoints, stored canonically (no collinear consecutive segments).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatPL {
    pts: Vec<(Rational, Rational)>,
}

impl RatPL {
    pub fn new(pts: Vec<(Rational, Rational)>) -> Self {
        assert!(pts.len() >= 2);
        debug_assert!(pts.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        debug_assert_eq!(pts[0].0, pts[0].1);
        debug_assert_eq!(pts[pts.len() - 1].0, pts[pts.len() - 1].1);
        Self::canonical(pts)
    }

    fn canonical(pts: Vec<(Rational, Rational)>) -> Self {
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(pts.len());
        for p in pts {
            while out.len() >= 2 {
                let n = out.len();
                if seg_slope(&out[n - 2], &out[n - 1]) == seg_slope(&out[n - 1], &p) {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        RatPL { pts: out }
    }

    pub fn identity(eta: Rational, zeta: Rational) -> Self {
        assert!(eta < zeta);
        RatPL { pts: vec![(eta.clone(), eta), (zeta.clone(), zeta)] }
    }

    pub fn from_plmap(f: &PLMap) -> Self {
        RatPL {
            pts: f
                .breakpoints()
                .iter()
                .map(|(x, y)| (x.to_rational(), y.to_rational()))
                .collect(),
        }
    }

    /// Restriction to `[a, b]`; both must be fixed points of `f`.
    pub fn restrict(&self, a: &Rational, b: &Rational) -> RatPL {
        debug_assert_eq!(self.eval(a), *a);
        debug_assert_eq!(self.eval(b), *b);
        let mut pts = vec![(a.clone(), a.clone())];
        for (x, y) in &self.pts {
            if x > a && x < b {
                pts.push((x.clone(), y.clone()));
            }
        }
        pts.push((b.clone(), b.clone()));
        RatPL::canonical(pts)
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.pts
    }

    pub fn domain(&self) -> (Rational, Rational) {
        (self.pts[0].0.clone(), self.pts[self.pts.len() - 1].0.clone())
    }

    pub fn is_identity(&self) -> bool {
        self.pts.len() == 2
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let pts = &self.pts;
        assert!(*t >= pts[0].0 && *t <= pts[pts.len() - 1].0, "eval outside domain");
        let mut lo = 0usize;
        let mut hi = pts.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if pts[mid].0 <= *t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = seg_slope(&pts[lo], &pts[lo + 1]);
        &pts[lo].1 + s * (t - &pts[lo].0)
    }

    pub fn inverse(&self) -> RatPL {
        RatPL { pts: self.pts.iter().map(|(x, y)| (y.clone(), x.clone())).collect() }
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &RatPL) -> RatPL {
        debug_assert_eq!(self.domain(), g.domain());
        let ginv = g.inverse();
        let mut xs: Vec<Rational> = g.pts.iter().map(|p| p.0.clone()).collect();
        for (x, _) in &self.pts {
            xs.push(ginv.eval(x));
        }
        xs.sort();
        xs.dedup();
        let pts = xs
            .into_iter()
            .map(|x| {
                let y = self.eval(&g.eval(&x));
                (x, y)
            })
            .collect();
        RatPL::canonical(pts)
    }

    pub fn pow(&self, n: i64) -> RatPL {
        let (eta, zeta) = self.domain();
        let mut acc = RatPL::identity(eta, zeta);
        let base = if n < 0 { self.inverse() } else { self.clone() };
        for _ in 0..n.unsigned_abs() {
            acc = base.compose(&acc);
        }
        acc
    }

    /// Slope on the segment right of the left endpoint.
    pub fn initial_slope(&self) -> Rational {
        seg_slope(&self.pts[0], &self.pts[1])
    }

    pub fn final_slope(&self) -> Rational {
        let n = self.pts.len();
        seg_slope(&self.pts[n - 2], &self.pts[n - 1])
    }

    /// Strictly below the diagonal on the open interior? (Interior
    /// breakpoints strictly below suffice: below-the-diagonal is convex.)
    pub fn below_diagonal(&self) -> bool {
        self.pts.len() >= 3 && self.pts[1..self.pts.len() - 1].iter().all(|(x, y)| y < x)
    }

    /// Strictly above the diagonal on the open interior?
    pub fn above_diagonal(&self) -> bool {
        self.pts.len() >= 3 && self.pts[1..self.pts.len() - 1].iter().all(|(x, y)| y > x)
    }

    /// Fixed points inside the open interval, exact.
    pub fn interior_fixed_points(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let (eta, zeta) = self.domain();
        for w in self.pts.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, _y1) = &w[1];
            let s = seg_slope(&w[0], &w[1]);
            if s.is_one() {
                if y0 == x0 {
                    // segment on the diagonal: endpoints only are recorded
                    // by the caller via component logic; push both ends
                    out.push(x0.clone());
                    out.push(x1.clone());
                }
            } else {
                // solve y0 + s(t - x0) = t  =>  t = (y0 - s x0) / (1 - s)
                let one = Rational::one();
                let t = (y0 - &s * x0) / (&one - &s);
                if t >= *x0 && t <= *x1 {
                    out.push(t);
                }
            }
        }
        out.sort();
        out.dedup();
        out.retain(|t| *t > eta && *t < zeta);
        out
    }

    /// Convert to a `PLMap` when all data is dyadic (panics otherwise in
    /// debug; returns None on non-dyadic data).
    pub fn to_plmap(&self) -> Option<PLMap> {
        let mut pts = Vec::with_capacity(self.pts.len());
        for (x, y) in &self.pts {
            pts.push((Dyadic::from_rational(x).ok()?, Dyadic::from_rational(y).ok()?));
        }
        PLMap::new(pts).ok()
    }

    /// Affine rescale of both axes by `t -> a*t + b` (conjugation by the
    /// affine map); keeps the map's graph shape on a new interval.
    pub fn affine_conjugate(&self, a: &Rational, b: &Rational) -> RatPL {
        assert!(a.is_positive());
        let pts = self
            .pts
            .iter()
            .map(|(x, y)| (a * x + b, a * y + b))
            .collect();
        RatPL::canonical(pts)
    }

    /// Conjugation by the orientation-reversing flip of the domain
    /// interval; swaps below- and above-diagonal behavior and the two
    /// endpoint slopes.
    pub fn mirror(&self) -> RatPL {
        let (eta, zeta) = self.domain();
        let s = &eta + &zeta;
        let pts = self
            .pts
            .iter()
            .rev()
            .map(|(x, y)| (&s - x, &s - y))
            .collect();
        RatPL::canonical(pts)
    }
}

pub fn seg_slope(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&b.1 - &a.1) / (&b.0 - &a.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn compose_inverse_identity() {
        let f = RatPL::from_plmap(&PLMap::x0());
        let g = f.compose(&f.inverse());
        assert!(g.is_identity());
        assert_eq!(f.eval(&rat(1, 2)), rat(1, 4));
    }

    #[test]
    fn interior_fixed_points_of_bump() {
        let f = RatPL::from_plmap(&PLMap::x0());
        assert!(f.interior_fixed_points().is_empty());
        assert!(f.below_diagonal());
        assert!(!f.above_diagonal());
        assert!(f.inverse().above_diagonal());
    }

    #[test]
    fn restriction_and_rescale() {
        let f = RatPL::from_plmap(&PLMap::generator(1));
        let r = f.restrict(&rat(1, 2), &rat(1, 1));
        assert_eq!(r.domain(), (rat(1, 2), rat(1, 1)));
        let s = r.affine_conjugate(&rat(2, 1), &rat(-1, 1));
        assert_eq!(s.domain(), (rat(0, 1), rat(1, 1)));
        // x_1 on [1/2,1] is a rescaled x_0
        assert_eq!(s, RatPL::from_plmap(&PLMap::x0()));
    }
}
