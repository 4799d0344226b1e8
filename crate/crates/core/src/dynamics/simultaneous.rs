//! Simultaneous conjugacy: conjugating k-tuples coordinatewise by a single
//! element, via ordinary conjugacy constrained to intersections of
//! centralizers, plus the bounded power-equation solver it rests on.

use num_integer::Integer;

use super::ratpl::RatPL;
use super::stair::{glue_ratpl, STAIR_ITER_CAP};
use super::{conjugate_block, fixed_set, log2_rat, minimal_root_block, shrink_to_brick};
use crate::dyadic::{Dyadic, Rational};
use crate::error::{Error, Result};
use crate::plmap::{extend_partial_maps_on, PLMap};

/// Cap on the power-equation exponent search.
const POWER_CAP: i64 = 10_000;

/// Solution set of a power equation: either every integer works, or an
/// explicit finite list.
#[derive(Debug, Clone, PartialEq, Eq)]
enum PowerSolutions {
    All,
    Few(Vec<i64>),
}

impl PowerSolutions {
    fn none() -> Self {
        PowerSolutions::Few(Vec::new())
    }
    fn first(&self) -> Option<i64> {
        match self {
            PowerSolutions::All => Some(0),
            PowerSolutions::Few(v) => v.iter().copied().min_by_key(|k| (k.abs(), *k < 0)),
        }
    }
    fn filter(self, pred: impl Fn(i64) -> bool) -> Self {
        match self {
            PowerSolutions::All => PowerSolutions::All,
            PowerSolutions::Few(v) => {
                PowerSolutions::Few(v.into_iter().filter(|&k| pred(k)).collect())
            }
        }
    }
}

/// Find some `k` with `x^k = g0 ∘ y^k` exactly. The search range is
/// bounded by the monotone-comparison argument; exceeding the cap
/// (default 10^4) is a loud error.
pub fn solve_power_equation(x: &PLMap, g0: &PLMap, y: &PLMap) -> Result<Option<i64>> {
    let rx = RatPL::from_plmap(x);
    let rg = RatPL::from_plmap(g0);
    let ry = RatPL::from_plmap(y);
    Ok(solve_power_all(&rx, &rg, &ry)?.first())
}

fn check_power(x: &RatPL, g0: &RatPL, y: &RatPL, k: i64) -> bool {
    x.pow(k) == g0.compose(&y.pow(k))
}

fn solve_power_all(x: &RatPL, g0: &RatPL, y: &RatPL) -> Result<PowerSolutions> {
    // slope prefilter: any solution satisfies ea*k = eg + eb*k at the left
    // endpoint
    if let (Some(ea), Some(eb), Some(eg)) = (
        log2_rat(&x.initial_slope()),
        log2_rat(&y.initial_slope()),
        log2_rat(&g0.initial_slope()),
    ) {
        if ea == eb {
            if eg != 0 {
                return Ok(PowerSolutions::none());
            }
        } else {
            if eg % (ea - eb) != 0 {
                return Ok(PowerSolutions::none());
            }
            let k = eg / (ea - eb);
            return Ok(PowerSolutions::Few(
                if check_power(x, g0, y, k) { vec![k] } else { vec![] },
            ));
        }
    }
    if x == y {
        return Ok(if g0.is_identity() { PowerSolutions::All } else { PowerSolutions::none() });
    }
    let fx = x.interior_fixed_points();
    let fy = y.interior_fixed_points();
    if fx != fy {
        // a point fixed by one map but not the other pins k uniquely
        let cand = match fy.iter().find(|t| !fx.contains(t)) {
            Some(t) => orbit_power_rat(x, t, &g0.eval(t)),
            None => {
                let t = fx.iter().find(|t| !fy.contains(t)).expect("sets differ");
                orbit_power_rat(y, t, &g0.inverse().eval(t))
            }
        };
        let v: Vec<i64> = cand.into_iter().filter(|&k| check_power(x, g0, y, k)).collect();
        return Ok(PowerSolutions::Few(v));
    }
    if !fx.is_empty() {
        // common interior fixed points: g0 must fix them; combine per gap
        for t in &fx {
            if g0.eval(t) != *t {
                return Ok(PowerSolutions::none());
            }
        }
        let (eta, zeta) = x.domain();
        let mut cuts = vec![eta];
        cuts.extend(fx);
        cuts.push(zeta);
        let mut acc = PowerSolutions::All;
        for w in cuts.windows(2) {
            let xb = x.restrict(&w[0], &w[1]);
            let yb = y.restrict(&w[0], &w[1]);
            let gb = g0.restrict(&w[0], &w[1]);
            let here = solve_power_all(&xb, &gb, &yb)?;
            acc = match (acc, here) {
                (PowerSolutions::All, h) => h,
                (a, PowerSolutions::All) => a,
                (PowerSolutions::Few(a), PowerSolutions::Few(b)) => {
                    PowerSolutions::Few(a.into_iter().filter(|k| b.contains(k)).collect())
                }
            };
            if acc == PowerSolutions::none() {
                return Ok(acc);
            }
        }
        return Ok(acc.filter(|k| check_power(x, g0, y, k)));
    }
    // fixed-point free on the interior: normalize to below the diagonal
    if x.above_diagonal() {
        return solve_power_all(&x.mirror(), &g0.mirror(), &y.mirror());
    }
    if !x.below_diagonal() || !y.below_diagonal() {
        return Ok(PowerSolutions::none());
    }
    let hi = power_upper_bound(x, y, g0)?;
    let xh = g0.inverse().compose(x).compose(g0);
    let lo = power_upper_bound(y, &xh, g0)?;
    let mut v = Vec::new();
    for k in -lo..=hi {
        if check_power(x, g0, y, k) {
            v.push(k);
        }
    }
    Ok(PowerSolutions::Few(v))
}

/// Upper bound for `{k >= 0 : x^k = g0 y^k}` when `x != y` are below the
/// diagonal: the smallest `k0` with `y^{k0}(psi) < theta`, where everything
/// is inert on `[eta, theta]` and `psi` is a point where `x`, `y` differ
/// with consistent inequality to its left.
fn power_upper_bound(x: &RatPL, y: &RatPL, g0: &RatPL) -> Result<i64> {
    let id = RatPL::identity(x.domain().0, x.domain().1);
    let div_xy = first_divergence(x, y);
    let div_g = first_divergence(g0, &id);
    let Some((theta_xy, psi)) = div_xy else {
        return Ok(0); // x == y: contradiction chain unavailable, k=0 bound
    };
    let theta = match div_g {
        Some((t, _)) if t < theta_xy => t,
        _ => theta_xy,
    };
    let (eta, _) = x.domain();
    if theta <= eta {
        return Err(Error::Precondition("no inert initial segment".into()));
    }
    let mut t = psi;
    let mut k: i64 = 0;
    while t >= theta {
        t = y.eval(&t);
        k += 1;
        if k > POWER_CAP {
            return Err(Error::BoundExceeded(POWER_CAP as usize));
        }
    }
    Ok(k)
}

/// For distinct maps: `(sup of the common initial segment, a point where
/// they differ with agreement everywhere left of it)`.
fn first_divergence(a: &RatPL, b: &RatPL) -> Option<(Rational, Rational)> {
    if a == b {
        return None;
    }
    let mut xs: Vec<Rational> = a.points().iter().map(|p| p.0.clone()).collect();
    xs.extend(b.points().iter().map(|p| p.0.clone()));
    xs.sort();
    xs.dedup();
    for i in 1..xs.len() {
        if a.eval(&xs[i]) != b.eval(&xs[i]) {
            return Some((xs[i - 1].clone(), xs[i].clone()));
        }
    }
    unreachable!("PL maps agreeing on all joint breakpoints are equal");
}

/// Orbit power over rational PL maps: the unique `n` with `h^n(tau) = mu`.
pub(super) fn orbit_power_rat(h: &RatPL, tau: &Rational, mu: &Rational) -> Option<i64> {
    if tau == mu {
        return Some(0);
    }
    let htau = h.eval(tau);
    if htau == *tau {
        return None;
    }
    let forward = htau > *tau;
    let right = *mu > *tau;
    let step = if forward == right { h.clone() } else { h.inverse() };
    let sign: i64 = if forward == right { 1 } else { -1 };
    let mut t = tau.clone();
    let mut prev = tau.clone();
    for n in 1..=STAIR_ITER_CAP as i64 {
        t = step.eval(&t);
        if t == *mu {
            return Some(sign * n);
        }
        if (right && t > *mu) || (!right && t < *mu) {
            return None;
        }
        if t == prev {
            return None; // converged onto a fixed point short of mu
        }
        prev = t.clone();
    }
    None
}

/// Search for `k` with `c^k` a conjugator of the block pair, i.e.
/// `c^k = h0 ∘ zhat^n` for some `n` (conjugators form the coset
/// `h0 ⟨zhat⟩`). Reduced to a power equation via the slope lattice.
fn solve_in_cyclic(c: &RatPL, h0: &RatPL, zhat: &RatPL) -> Result<Option<i64>> {
    let a = match log2_rat(&c.initial_slope()) {
        Some(e) if e != 0 => e,
        _ => return Ok(None),
    };
    let b = match log2_rat(&zhat.initial_slope()) {
        Some(e) if e != 0 => e,
        _ => return Ok(None),
    };
    let gamma = match log2_rat(&h0.initial_slope()) {
        Some(e) => e,
        None => return Ok(None),
    };
    let d = a.gcd(&b);
    if gamma % d != 0 {
        return Ok(None);
    }
    // base solution of a*k0 - b*n0 = gamma
    let e = i64::extended_gcd(&a, &b);
    let scale = gamma / d;
    let (k0, n0) = (e.x * scale, -e.y * scale);
    debug_assert_eq!(a * k0 - b * n0, gamma);
    // c^{k0} (c^{b/d})^j = h0 zhat^{n0} (zhat^{a/d})^j
    // => X^j = G0 Y^j with X = c^{b/d}, Y = zhat^{a/d},
    //    G0 = c^{-k0} h0 zhat^{n0}
    let x = c.pow(b / d);
    let y = zhat.pow(a / d);
    let g0 = c.pow(-k0).compose(h0).compose(&zhat.pow(n0));
    let sols = solve_power_all(&x, &g0, &y)?;
    let j = match sols {
        PowerSolutions::All => 0,
        PowerSolutions::Few(v) => match v.first() {
            Some(&j) => j,
            None => return Ok(None),
        },
    };
    Ok(Some(k0 + (b / d) * j))
}

/// Conjugacy constrained to `∩ C(constraints)`: find `h` centralizing all
/// constraints with `h^{-1} y h = z`, verified exactly.
pub fn constrained_conjugate(
    constraints: &[PLMap],
    y: &PLMap,
    z: &PLMap,
) -> Result<Option<PLMap>> {
    let Some(h0) = constrained_align(constraints, y, z)? else {
        return Ok(None);
    };
    let yh = y.conjugate_by(&h0)?;
    if fixed_set(&yh) != fixed_set(z) {
        return Ok(None);
    }
    // cut at the dyadic fixed boundary of z only; constraint boundary
    // points interior to a block act as pins on the conjugator
    let (eta, zeta) = y.domain();
    let mut cuts: Vec<Dyadic> = vec![eta.clone(), zeta.clone()];
    cuts.extend(fixed_set(z).dyadic_boundary());
    cuts.sort();
    cuts.dedup();
    let mut pins: Vec<Rational> = Vec::new();
    for c in constraints {
        for p in fixed_set(c).dyadic_boundary() {
            let pr = p.to_rational();
            if !cuts.contains(&p) && !pins.contains(&pr) {
                pins.push(pr);
            }
        }
    }
    pins.sort();
    let ry = RatPL::from_plmap(&yh);
    let rz = RatPL::from_plmap(z);
    let rcs: Vec<RatPL> = constraints.iter().map(RatPL::from_plmap).collect();
    let mut pieces: Vec<RatPL> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0].to_rational(), w[1].to_rational());
        let yb = ry.restrict(&a, &b);
        let zb = rz.restrict(&a, &b);
        let block_pins: Vec<Rational> =
            pins.iter().filter(|p| **p > a && **p < b).cloned().collect();
        match constrained_block(&rcs, &yb, &zb, &a, &b, &block_pins)? {
            Some(p) => pieces.push(p),
            None => return Ok(None),
        }
    }
    let glued = glue_ratpl(&pieces);
    let Some(h1) = glued.to_plmap() else {
        return Ok(None);
    };
    let h = h0.compose(&h1)?;
    if y.conjugate_by(&h)? != *z {
        return Ok(None);
    }
    for c in constraints {
        if c.compose(&h)? != h.compose(c)? {
            return Ok(None);
        }
    }
    Ok(Some(h))
}

/// One block `[a, b]` (dyadic fixed boundary of `z`). `pins` are
/// constraint-boundary points interior to the block: the conjugator must
/// fix them pointwise.
fn constrained_block(
    constraints: &[RatPL],
    yb: &RatPL,
    zb: &RatPL,
    a: &Rational,
    b: &Rational,
    pins: &[Rational],
) -> Result<Option<RatPL>> {
    if yb.is_identity() && zb.is_identity() {
        return Ok(Some(RatPL::identity(a.clone(), b.clone())));
    }
    if yb.is_identity() != zb.is_identity() {
        return Ok(None);
    }
    let Some(h0) = conjugate_block(yb, zb) else {
        return Ok(None);
    };
    let Some(zhat) = minimal_root_block(zb) else {
        return Ok(None);
    };
    if !pins.is_empty() {
        // pinned case: h = h0 ∘ zhat^m with zhat^m(pin) = h0^{-1}(pin)
        let lam = &pins[0];
        let target = h0.inverse().eval(lam);
        let Some(m) = orbit_power_rat(&zhat, lam, &target) else {
            return Ok(None);
        };
        let h = h0.compose(&zhat.pow(m));
        if pins.iter().any(|p| h.eval(p) != *p) {
            return Ok(None);
        }
        return Ok(Some(h));
    }
    // no pins: the constraint intersection restricted to this block is
    // full, cyclic, or trivial
    #[derive(Clone)]
    enum K {
        Full,
        Cyclic(RatPL),
        Trivial,
    }
    let mut kind = K::Full;
    for c in constraints {
        // a constraint moving the block forces triviality
        if c.eval(a) != *a || c.eval(b) != *b {
            kind = K::Trivial;
            break;
        }
        let cb = c.restrict(a, b);
        if cb.is_identity() {
            continue;
        }
        let gen = match minimal_root_block(&cb) {
            Some(g) => g,
            None => {
                kind = K::Trivial;
                break;
            }
        };
        kind = match kind {
            K::Full => K::Cyclic(gen),
            K::Cyclic(prev) => match super::cyclic_intersection(&prev, &gen) {
                Some(c) => K::Cyclic(c),
                None => K::Trivial,
            },
            K::Trivial => unreachable!(),
        };
        if matches!(kind, K::Trivial) {
            break;
        }
    }
    match kind {
        K::Full => Ok(Some(h0)),
        K::Trivial => {
            if yb == zb {
                Ok(Some(RatPL::identity(a.clone(), b.clone())))
            } else {
                Ok(None)
            }
        }
        K::Cyclic(c) => {
            let Some(k) = solve_in_cyclic(&c, &h0, &zhat)? else {
                return Ok(None);
            };
            let h = c.pow(k);
            if h.compose(zb) == yb.compose(&h) {
                Ok(Some(h))
            } else {
                Ok(None)
            }
        }
    }
}

/// Alignment inside the constrained group: `h0` centralizing the
/// constraints with `D(y^{h0}) = D(z)`.
fn constrained_align(
    constraints: &[PLMap],
    y: &PLMap,
    z: &PLMap,
) -> Result<Option<PLMap>> {
    let dy = fixed_set(y);
    let dz = fixed_set(z);
    let (eta, zeta) = y.domain();
    if dy == dz {
        return Ok(Some(PLMap::identity(eta, zeta)));
    }
    if dy.components.len() != dz.components.len() {
        return Ok(None);
    }
    for (cy, cz) in dy.components.iter().zip(&dz.components) {
        if (cy.0 == cy.1) != (cz.0 == cz.1) {
            return Ok(None);
        }
    }
    // h0 must fix all constraint boundary points, so cut there
    let mut cuts: Vec<Dyadic> = vec![eta.clone(), zeta.clone()];
    for c in constraints {
        cuts.extend(fixed_set(c).dyadic_boundary());
    }
    cuts.sort();
    cuts.dedup();
    let rcs: Vec<RatPL> = constraints.iter().map(RatPL::from_plmap).collect();
    // pins send z-boundary points to y-boundary points, in order
    let mut pins: Vec<(Rational, Rational)> = Vec::new();
    for (cy, cz) in dy.components.iter().zip(&dz.components) {
        pins.push((cz.0.clone(), cy.0.clone()));
        if cz.0 != cz.1 {
            pins.push((cz.1.clone(), cy.1.clone()));
        }
    }
    pins.dedup();
    let cut_rats: Vec<Rational> = cuts.iter().map(|c| c.to_rational()).collect();
    // boundary pins must be trivial; interior pins distribute over blocks
    let mut moving: Vec<(Rational, Rational)> = Vec::new();
    for (p, q) in pins {
        if cut_rats.contains(&p) {
            if p != q {
                return Ok(None);
            }
        } else {
            moving.push((p, q));
        }
    }
    let mut pieces: Vec<RatPL> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0].to_rational(), w[1].to_rational());
        let block_pins: Vec<(Rational, Rational)> = moving
            .iter()
            .filter(|(p, _)| *p > a && *p < b)
            .cloned()
            .collect();
        if block_pins.iter().any(|(_, q)| !(*q > a && *q < b)) {
            return Ok(None); // pins may not cross constraint blocks
        }
        if block_pins.is_empty() {
            pieces.push(RatPL::identity(a.clone(), b.clone()));
            continue;
        }
        // constraint structure on the block
        let mut gens: Vec<RatPL> = Vec::new();
        let mut trivial = false;
        for c in &rcs {
            let cb = c.restrict(&a, &b);
            if cb.is_identity() {
                continue;
            }
            match minimal_root_block(&cb) {
                Some(g) => gens.push(g),
                None => {
                    trivial = true;
                    break;
                }
            }
        }
        if trivial {
            return Ok(None); // pins must move but only the identity is allowed
        }
        let piece = if gens.is_empty() {
            match block_brick_align(&w[0], &w[1], &block_pins)? {
                Some(p) => p,
                None => return Ok(None),
            }
        } else {
            let mut gen = gens[0].clone();
            for g in &gens[1..] {
                match super::cyclic_intersection(&gen, g) {
                    Some(c) => gen = c,
                    None => return Ok(None),
                }
            }
            let (p0, q0) = &block_pins[0];
            let Some(k) = orbit_power_rat(&gen, p0, q0) else {
                return Ok(None);
            };
            let cand = gen.pow(k);
            if block_pins.iter().any(|(p, q)| cand.eval(p) != *q) {
                return Ok(None);
            }
            cand
        };
        pieces.push(piece);
    }
    let glued = glue_ratpl(&pieces);
    let Some(h0) = glued.to_plmap() else {
        return Ok(None);
    };
    for c in constraints {
        if c.compose(&h0)? != h0.compose(c)? {
            return Ok(None);
        }
    }
    let yc = y.conjugate_by(&h0)?;
    if fixed_set(&yc) == dz {
        Ok(Some(h0))
    } else {
        Ok(None)
    }
}

/// Unconstrained alignment of pins inside one dyadic block: affine bricks
/// around each pin, extended by dyadic fillers. The orbit criterion is
/// local, so the global `same_orbit` witnesses restrict correctly.
fn block_brick_align(
    a: &Dyadic,
    b: &Dyadic,
    pins: &[(Rational, Rational)],
) -> Result<Option<RatPL>> {
    let mut bricks: Vec<Vec<(Dyadic, Dyadic)>> = Vec::new();
    for (i, (p, q)) in pins.iter().enumerate() {
        let Some(local) = super::same_orbit(p, q)? else {
            return Ok(None);
        };
        let prev = if i == 0 {
            (a.to_rational(), a.to_rational())
        } else {
            let last = bricks.last().unwrap().last().unwrap();
            (last.0.to_rational(), last.1.to_rational())
        };
        let next = if i + 1 < pins.len() {
            pins[i + 1].clone()
        } else {
            (b.to_rational(), b.to_rational())
        };
        let brick = shrink_to_brick(&local, p, &prev, &next)?;
        bricks.push(brick);
    }
    let g = extend_partial_maps_on(&bricks, a, b)?;
    Ok(Some(RatPL::from_plmap(&g)))
}

/// Simultaneous conjugacy for k-tuples: a single verified `g` with
/// `g^{-1} x_i g = y_i` for all `i`.
pub fn simultaneous_conjugate(xs: &[PLMap], ys: &[PLMap]) -> Result<Option<PLMap>> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::Precondition("tuples must have equal positive length".into()));
    }
    let Some(mut g) = super::conjugate_pl(&xs[0], &ys[0])? else {
        return Ok(None);
    };
    let mut constraints: Vec<PLMap> = vec![ys[0].clone()];
    for i in 1..xs.len() {
        let yi = xs[i].conjugate_by(&g)?;
        let Some(h) = constrained_conjugate(&constraints, &yi, &ys[i])? else {
            return Ok(None);
        };
        g = g.compose(&h)?;
        constraints.push(ys[i].clone());
    }
    for (x, y) in xs.iter().zip(ys) {
        if x.conjugate_by(&g)? != *y {
            return Ok(None);
        }
    }
    Ok(Some(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::word_to_plmap;
    use crate::word::Word;

    #[test]
    fn power_equation_basics() {
        let x0 = PLMap::x0();
        let id = PLMap::id_unit();
        assert_eq!(solve_power_equation(&x0, &id, &x0).unwrap(), Some(0));
        // x = y = x0, g0 = x0 would force x0 = id
        assert!(solve_power_equation(&x0, &x0, &x0).unwrap().is_none());
        // constructed instance g0 = x^j y^{-j}
        let y = word_to_plmap(&Word::parse("x0 x1").unwrap());
        let j = 3;
        let g0 = x0.pow(j).compose(&y.pow(-j)).unwrap();
        assert_eq!(g0.initial_slope_exp(), 0);
        assert_eq!(solve_power_equation(&x0, &g0, &y).unwrap(), Some(j));
    }

    #[test]
    fn simultaneous_identity_tuple() {
        let xs = vec![PLMap::x0(), PLMap::generator(1)];
        let g = simultaneous_conjugate(&xs, &xs).unwrap().expect("identity works");
        // <x0, x1> = F has trivial center, so the only conjugator is id
        assert!(g.is_identity());
    }

    #[test]
    fn simultaneous_conjugated_tuple() {
        let xs = vec![PLMap::x0(), PLMap::generator(1)];
        let c = word_to_plmap(&Word::parse("x1 x0^-1 x2").unwrap());
        let ys: Vec<PLMap> = xs.iter().map(|x| x.conjugate_by(&c).unwrap()).collect();
        let g = simultaneous_conjugate(&xs, &ys).unwrap().expect("conjugate");
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(x.conjugate_by(&g).unwrap(), *y);
        }
    }

    #[test]
    fn simultaneous_relation_instance() {
        // x0 centralizes itself and conjugates x1 to x2 (defining relation),
        // so (x0, x1) and (x0, x2) ARE simultaneously conjugate
        let xs = vec![PLMap::x0(), PLMap::generator(1)];
        let ys = vec![PLMap::x0(), PLMap::generator(2)];
        let g = simultaneous_conjugate(&xs, &ys).unwrap().expect("via x0");
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(x.conjugate_by(&g).unwrap(), *y);
        }
    }

    #[test]
    fn simultaneous_counterexample() {
        // perturbing one coordinate by a non-conjugate element certifies None
        let xs = vec![PLMap::x0(), PLMap::generator(1)];
        let ys = vec![PLMap::x0(), PLMap::generator(1).pow(2)];
        assert!(simultaneous_conjugate(&xs, &ys).unwrap().is_none());
    }
}
