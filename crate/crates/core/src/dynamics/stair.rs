//! The stair algorithm: unique-conjugator construction with a prescribed
//! initial slope, for PL maps strictly below (or above) the diagonal, and
//! its extension to maps with finitely many interior fixed points.

use num_traits::One;

use super::ratpl::RatPL;
use crate::dyadic::Rational;

/// Iteration cap for the staircase index `r` and related searches.
pub const STAIR_ITER_CAP: usize = 10_000;

/// Unique conjugator `g` with `g^{-1} y g = z` and `g'(eta^+) = q`, for
/// `y, z` strictly below the diagonal on the interior of their common
/// domain. Returns `None` when no such conjugator exists.
pub fn stair_below(y: &RatPL, z: &RatPL, q: &Rational) -> Option<RatPL> {
    debug_assert_eq!(y.domain(), z.domain());
    let (eta, zeta) = y.domain();
    let one = Rational::one();
    if *q > one {
        return stair_below(z, y, &(one / q)).map(|g| g.inverse());
    }
    if y == z && *q == one {
        return Some(RatPL::identity(eta, zeta));
    }
    if y.initial_slope() != z.initial_slope() || y.final_slope() != z.final_slope() {
        return None;
    }

    // initial linearity box [eta, alpha]^2, final box [beta, zeta]^2
    let alpha = {
        let ay = &y.points()[1].0;
        let az = &z.points()[1].0;
        if ay < az { ay.clone() } else { az.clone() }
    };
    let beta = {
        let by = &y.points()[y.points().len() - 2].0;
        let bz = &z.points()[z.points().len() - 2].0;
        if by > bz { by.clone() } else { bz.clone() }
    };

    // g0: linear with slope q on [eta, alpha], then straight to (zeta, zeta)
    let g0_alpha = &eta + q * (&alpha - &eta);
    let g0 = RatPL::new(vec![
        (eta.clone(), eta.clone()),
        (alpha.clone(), g0_alpha.clone()),
        (zeta.clone(), zeta.clone()),
    ]);

    // smallest r with min{ z^{-r}(alpha), y^{-r}(g0(alpha)) } > beta
    let yinv = y.inverse();
    let zinv = z.inverse();
    let mut t1 = alpha.clone();
    let mut t2 = g0_alpha;
    let mut r = 0usize;
    while t1 <= beta || t2 <= beta {
        t1 = zinv.eval(&t1);
        t2 = yinv.eval(&t2);
        r += 1;
        if r > STAIR_ITER_CAP {
            return None;
        }
    }

    // candidate g = y^{-r} g0 z^r on [eta, z^{-r}(alpha)], linear beyond
    let mut h = g0;
    for _ in 0..r {
        h = yinv.compose(&h).compose(z);
    }
    let w = t1; // z^{-r}(alpha)
    let v = h.eval(&w);
    if v >= zeta {
        return None;
    }
    let mut pts: Vec<(Rational, Rational)> = h
        .points()
        .iter()
        .take_while(|(x, _)| *x < w)
        .cloned()
        .collect();
    pts.push((w, v));
    pts.push((zeta.clone(), zeta.clone()));
    if pts.windows(2).any(|p| p[0].0 >= p[1].0 || p[0].1 >= p[1].1) {
        return None;
    }
    let g = RatPL::new(pts);

    // exact verification: g ∘ z == y ∘ g
    if g.compose(z) == y.compose(&g) {
        Some(g)
    } else {
        None
    }
}

/// Stair algorithm for maps whose common fixed set inside the interval is a
/// finite set of points (the `PL_2^0`-style case): conjugator with
/// prescribed initial slope `q`, built block by block between consecutive
/// fixed points, the slope chaining across non-breakpoint seams.
pub fn stair_chain(y: &RatPL, z: &RatPL, q: &Rational) -> Option<RatPL> {
    debug_assert_eq!(y.domain(), z.domain());
    let fy = y.interior_fixed_points();
    let fz = z.interior_fixed_points();
    if fy != fz {
        return None;
    }
    let (eta, zeta) = y.domain();
    let mut cuts = vec![eta];
    cuts.extend(fy);
    cuts.push(zeta);

    let mut pieces: Vec<RatPL> = Vec::new();
    let mut slope = q.clone();
    for w in cuts.windows(2) {
        let yb = y.restrict(&w[0], &w[1]);
        let zb = z.restrict(&w[0], &w[1]);
        let g = if yb.below_diagonal() && zb.below_diagonal() {
            stair_below(&yb, &zb, &slope)?
        } else if yb.above_diagonal() && zb.above_diagonal() {
            stair_below(&yb.inverse(), &zb.inverse(), &slope)?
        } else {
            return None;
        };
        slope = g.final_slope();
        pieces.push(g);
    }
    Some(glue_ratpl(&pieces))
}

/// Glue consecutive-domain pieces into one map.
pub fn glue_ratpl(pieces: &[RatPL]) -> RatPL {
    assert!(!pieces.is_empty());
    let mut pts: Vec<(Rational, Rational)> = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        if i > 0 {
            debug_assert_eq!(pieces[i - 1].domain().1, p.domain().0);
            pts.pop();
        }
        pts.extend(p.points().iter().cloned());
    }
    RatPL::new(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::PLMap;
    use num_bigint::BigInt;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn x0_self_conjugator_with_slope_half_is_x0() {
        let y = RatPL::from_plmap(&PLMap::x0());
        let g = stair_below(&y, &y, &rat(1, 2)).expect("x0 centralizes itself");
        assert_eq!(g, y);
    }

    #[test]
    fn constructed_conjugate_is_recovered() {
        // y = x0, z = g^{-1} y g for g = x1; conjugator with the right
        // initial slope must verify exactly
        let y = PLMap::x0();
        let g = PLMap::generator(1);
        let z = y.conjugate_by(&g).unwrap();
        let ry = RatPL::from_plmap(&y);
        let rz = RatPL::from_plmap(&z);
        // g has initial slope 1 here
        let found = stair_below(&ry, &rz, &Rational::one()).expect("conjugate");
        assert_eq!(found, RatPL::from_plmap(&g));
    }

    #[test]
    fn wrong_slope_class_gives_none() {
        let y = RatPL::from_plmap(&PLMap::x0());
        // a conjugator of x0 to itself with initial slope 2^-2 would be
        // x0 itself squared-ish; slope 1/4 corresponds to x0^2 which works,
        // but 1/8 with no cube root fails... use q=1/2 vs a different target
        let z = RatPL::from_plmap(&PLMap::x0().pow(2));
        // x0 and x0^2 are not conjugate (initial slopes differ)
        assert!(stair_below(&y, &z, &rat(1, 2)).is_none());
        assert!(stair_below(&y, &z, &rat(1, 4)).is_none());
    }

    #[test]
    fn chain_handles_interior_fixed_point() {
        // y with a fixed point at 1/2: x1 restricted acts on [1/2,1] only;
        // conjugating by elements fixing 1/2 stays in the class
        let y = PLMap::generator(1);
        let g = PLMap::generator(2);
        let z = y.conjugate_by(&g).unwrap();
        let ry = RatPL::from_plmap(&y).restrict(&rat(1, 2), &rat(1, 1));
        let rz = RatPL::from_plmap(&z).restrict(&rat(1, 2), &rat(1, 1));
        let found = stair_chain(&ry, &rz, &Rational::one());
        assert!(found.is_some());
        let gg = found.unwrap();
        assert_eq!(gg.compose(&rz), ry.compose(&gg));
    }
}
