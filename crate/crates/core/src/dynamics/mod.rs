//! Decision procedures over exact PL maps of the interval: fixed sets,
//! orbit tests, the stair algorithm and full conjugacy pipeline, roots,
//! centralizers, power and simultaneous conjugacy, and the Mather
//! invariant for one-bump functions.

pub mod mather;
pub mod ratpl;
pub mod simultaneous;
pub mod stair;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::dyadic::{two_power_decompose, Dyadic, Rational};
use crate::error::{Error, Result};
use crate::plmap::{extend_partial_maps, log2_exact, PLMap};
use ratpl::RatPL;
use stair::{glue_ratpl, stair_chain, STAIR_ITER_CAP};

pub use mather::{mather_conjugate, mather_invariant, CircleMapPL};
pub use simultaneous::{simultaneous_conjugate, solve_power_equation};

/// The exact fixed set `D(f)` of a PL map: disjoint sorted components,
/// each a closed interval (or point, when the endpoints coincide).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedSet {
    pub components: Vec<(Rational, Rational)>,
}

impl FixedSet {
    /// Boundary points that are dyadic (the set `∂_2 D`).
    pub fn dyadic_boundary(&self) -> Vec<Dyadic> {
        let mut out = Vec::new();
        for (a, b) in &self.components {
            for p in [a, b] {
                if let Ok(d) = Dyadic::from_rational(p) {
                    if out.last() != Some(&d) {
                        out.push(d);
                    }
                }
            }
        }
        out.dedup();
        out
    }

    pub fn contains(&self, t: &Rational) -> bool {
        self.components.iter().any(|(a, b)| a <= t && t <= b)
    }
}

/// Exact fixed set of `f`.
pub fn fixed_set(f: &PLMap) -> FixedSet {
    let r = RatPL::from_plmap(f);
    let pts = r.points();
    let mut comps: Vec<(Rational, Rational)> = Vec::new();
    let mut push = |a: Rational, b: Rational| {
        if let Some(last) = comps.last_mut() {
            if last.1 == a {
                last.1 = b;
                return;
            }
        }
        comps.push((a, b));
    };
    for w in pts.windows(2) {
        let (x0, y0) = &w[0];
        let (x1, _y1) = &w[1];
        let s = ratpl::seg_slope(&w[0], &w[1]);
        if s.is_one() {
            if y0 == x0 {
                push(x0.clone(), x1.clone());
            }
        } else {
            let t = (y0 - &s * x0) / (Rational::one() - &s);
            if t >= *x0 && t <= *x1 && self_fixed(y0, x0, &s, &t) {
                push(t.clone(), t);
            }
        }
    }
    FixedSet { components: comps }
}

fn self_fixed(y0: &Rational, x0: &Rational, s: &Rational, t: &Rational) -> bool {
    y0 + s * (t - x0) == *t
}

/// Orbit test for rationals in (0,1): is there `g ∈ PL_2(I)` with
/// `g(alpha) = beta`? Returns a verified witness.
pub fn same_orbit(alpha: &Rational, beta: &Rational) -> Result<Option<PLMap>> {
    let zero = Rational::zero();
    let one = Rational::one();
    if *alpha <= zero || *alpha >= one || *beta <= zero || *beta >= one {
        return Err(Error::Precondition("orbit test needs points in (0,1)".into()));
    }
    let (t, m, n) = two_power_decompose(alpha);
    let (k, u, n2) = two_power_decompose(beta);
    if n != n2 {
        return Ok(None);
    }
    if n.is_one() {
        // dyadic transitivity
        let a = Dyadic::from_rational(alpha).expect("dyadic");
        let b = Dyadic::from_rational(beta).expect("dyadic");
        let g = crate::plmap::map_partition(
            &[Dyadic::zero(), a, Dyadic::one()],
            &[Dyadic::zero(), b, Dyadic::one()],
        )?;
        debug_assert_eq!(g.eval(alpha)?, *beta);
        return Ok(Some(g));
    }
    // find R with 2^R * m ≡ u (mod n); powers of 2 cycle with period ord_2(n)
    let mut pow = BigInt::one();
    let mut found: Option<i64> = None;
    let mut r_exp: i64 = 0;
    loop {
        if (&pow * &m - &u).mod_floor(&n).is_zero() {
            found = Some(r_exp);
            break;
        }
        pow = (&pow * BigInt::from(2)).mod_floor(&n);
        r_exp += 1;
        if pow.is_one() {
            break; // full multiplicative cycle of 2 mod n exhausted
        }
    }
    let Some(rr) = found else {
        return Ok(None);
    };
    // local affine map g(x) = 2^r x + c with r = R + k - t, c = beta - 2^r alpha
    let r = rr + k - t;
    let c = beta - pow2_rat(r) * alpha;
    debug_assert!(Dyadic::from_rational(&c).is_ok());
    let g = extend_affine_around(alpha, r, &c)?;
    debug_assert_eq!(g.eval(alpha)?, *beta);
    Ok(Some(g))
}

pub(crate) fn pow2_rat(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << e as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Extend the affine germ `x -> 2^r x + c` at `alpha` to an element of
/// PL_2(I), choosing a small dyadic interval around `alpha` on which the
/// affine map stays inside (0,1).
fn extend_affine_around(alpha: &Rational, r: i64, c: &Rational) -> Result<PLMap> {
    let one = Rational::one();
    let zero = Rational::zero();
    let s = pow2_rat(r);
    for e in 1..512u32 {
        let step = pow2_rat(-(e as i64));
        // dyadic bracket around alpha
        let lo_i = (alpha / &step).floor();
        let lo = &step * &lo_i;
        let hi = &lo + &step;
        if lo <= zero || hi >= one || lo == *alpha {
            continue;
        }
        let glo = &s * &lo + c;
        let ghi = &s * &hi + c;
        if glo > zero && ghi < one {
            let a = Dyadic::from_rational(&lo).expect("dyadic");
            let b = Dyadic::from_rational(&hi).expect("dyadic");
            let ga = Dyadic::from_rational(&glo).expect("dyadic");
            let gb = Dyadic::from_rational(&ghi).expect("dyadic");
            return extend_partial_maps(&[vec![(a, ga), (b, gb)]]);
        }
    }
    Err(Error::Precondition("could not bracket the affine germ".into()))
}

/// Decide whether some `g ∈ PL_2(I)` aligns the fixed-point structure of
/// `y` with that of `z`, i.e. `D(g^{-1} y g) = D(z)`; returns a witness.
pub fn align_fixed_sets(y: &PLMap, z: &PLMap) -> Result<Option<PLMap>> {
    let dy = fixed_set(y);
    let dz = fixed_set(z);
    if dy.components.len() != dz.components.len() {
        return Ok(None);
    }
    // component types must match in order
    for (cy, cz) in dy.components.iter().zip(&dz.components) {
        if (cy.0 == cy.1) != (cz.0 == cz.1) {
            return Ok(None);
        }
    }
    // match boundary points in order: g(zpt) = ypt
    let mut pairs: Vec<(Rational, Rational)> = Vec::new(); // (from=z, to=y)
    for (cy, cz) in dy.components.iter().zip(&dz.components) {
        pairs.push((cz.0.clone(), cy.0.clone()));
        if cz.0 != cz.1 {
            pairs.push((cz.1.clone(), cy.1.clone()));
        }
    }
    pairs.dedup();
    let zero = Rational::zero();
    let one = Rational::one();
    // drop the trivial endpoint pins
    pairs.retain(|(a, b)| !(a.is_zero() && b.is_zero()) && !(*a == one && *b == one));
    if pairs
        .iter()
        .any(|(a, b)| (*a == zero) != (*b == zero) || (*a == one) != (*b == one))
    {
        return Ok(None);
    }
    if pairs.is_empty() {
        return Ok(Some(PLMap::id_unit()));
    }
    // feasibility of each pin, then a combined witness via disjoint bricks
    let mut bricks: Vec<Vec<(Dyadic, Dyadic)>> = Vec::new();
    let one = Rational::one();
    for (i, (a, b)) in pairs.iter().enumerate() {
        let Some(local) = same_orbit(a, b)? else {
            return Ok(None);
        };
        let prev = if i == 0 {
            (Rational::zero(), Rational::zero())
        } else {
            let last = bricks.last().unwrap().last().unwrap();
            (last.0.to_rational(), last.1.to_rational())
        };
        let next = if i + 1 < pairs.len() {
            pairs[i + 1].clone()
        } else {
            (one.clone(), one.clone())
        };
        // shrink the local witness to an affine brick around `a` confined
        // between the neighboring pins in both coordinates
        let brick = shrink_to_brick(&local, a, &prev, &next)?;
        bricks.push(brick);
    }
    let g = extend_partial_maps(&bricks)?;
    // exact check of the alignment
    let yc = y.conjugate_by(&g)?;
    if fixed_set(&yc) == dz {
        Ok(Some(g))
    } else {
        Ok(None)
    }
}

/// Extract from a witness `g(a) = b` a small two-point brick around `a`,
/// strictly inside the window `(prev, next)` in both coordinates.
pub(crate) fn shrink_to_brick(
    g: &PLMap,
    a: &Rational,
    prev: &(Rational, Rational),
    next: &(Rational, Rational),
) -> Result<Vec<(Dyadic, Dyadic)>> {
    let gr = RatPL::from_plmap(g);
    let b = gr.eval(a);
    if let (Ok(ad), Ok(bd)) = (Dyadic::from_rational(a), Dyadic::from_rational(&b)) {
        // dyadic pin: a slope-1 translation brick around it
        for e in 1..1024i64 {
            let d = Dyadic::pow2(-(e as i32));
            let lo = &ad - &d;
            let blo = &bd - &d;
            if lo.to_rational() <= prev.0 || blo.to_rational() <= prev.1 {
                continue;
            }
            for e2 in 1..1024i64 {
                let d2 = Dyadic::pow2(-(e2 as i32));
                let hi = &ad + &d2;
                let bhi = &bd + &d2;
                if hi.to_rational() >= next.0 || bhi.to_rational() >= next.1 {
                    continue;
                }
                return Ok(vec![(lo, blo), (hi, bhi)]);
            }
        }
        return Err(Error::Precondition("could not bracket a dyadic pin".into()));
    }
    for e in 1..1024u32 {
        let step = pow2_rat(-(e as i64));
        let lo_i = (a / &step).floor();
        let lo = &step * &lo_i;
        let hi = &lo + &step;
        if lo <= prev.0 || lo == *a || hi >= next.0 {
            continue;
        }
        let glo = gr.eval(&lo);
        let ghi = gr.eval(&hi);
        if glo <= prev.1 || ghi >= next.1 {
            continue;
        }
        // need linearity of g on [lo, hi] so the brick is exactly affine
        if gr.eval(&((&lo + &hi) / Rational::from_integer(2.into())))
            != (&glo + &ghi) / Rational::from_integer(2.into())
        {
            continue;
        }
        let (Ok(la), Ok(lb), Ok(ha), Ok(hb)) = (
            Dyadic::from_rational(&lo),
            Dyadic::from_rational(&glo),
            Dyadic::from_rational(&hi),
            Dyadic::from_rational(&ghi),
        ) else {
            continue;
        };
        return Ok(vec![(la, lb), (ha, hb)]);
    }
    Err(Error::Precondition("could not shrink witness to a brick".into()))
}

/// Full conjugacy decision for PL_2(I): returns a verified conjugator
/// `g` with `g^{-1} y g = z`, or `None`.
pub fn conjugate_pl(y: &PLMap, z: &PLMap) -> Result<Option<PLMap>> {
    if y.domain() != z.domain() {
        return Err(Error::DomainMismatch("conjugacy needs equal domains".into()));
    }
    if y == z {
        return Ok(Some(PLMap::identity(y.domain().0, y.domain().1)));
    }
    let Some(g0) = align_fixed_sets(y, z)? else {
        return Ok(None);
    };
    let yh = y.conjugate_by(&g0)?;
    let dz = fixed_set(z);
    // split at the dyadic fixed boundary
    let mut cuts = dz.dyadic_boundary();
    let (eta, zeta) = y.domain();
    if cuts.first() != Some(&eta) {
        cuts.insert(0, eta.clone());
    }
    if cuts.last() != Some(&zeta) {
        cuts.push(zeta.clone());
    }
    let ry = RatPL::from_plmap(&yh);
    let rz = RatPL::from_plmap(z);
    let mut pieces: Vec<RatPL> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0].to_rational(), w[1].to_rational());
        let yb = ry.restrict(&a, &b);
        let zb = rz.restrict(&a, &b);
        match conjugate_block(&yb, &zb) {
            Some(g) => pieces.push(g),
            None => return Ok(None),
        }
    }
    let glued = glue_ratpl(&pieces);
    let Some(h) = glued.to_plmap() else {
        return Ok(None);
    };
    let g = g0.compose(&h)?;
    if y.conjugate_by(&g)? == *z {
        Ok(Some(g))
    } else {
        Ok(None)
    }
}

/// Conjugacy on one dyadic block: identity blocks are free, otherwise run
/// the stair chain over the finite set of candidate initial slopes.
pub(crate) fn conjugate_block(yb: &RatPL, zb: &RatPL) -> Option<RatPL> {
    let (a, b) = yb.domain();
    if yb.is_identity() && zb.is_identity() {
        return Some(RatPL::identity(a, b));
    }
    if yb.is_identity() != zb.is_identity() {
        return None;
    }
    // normalize to initial slope < 1 by inverting both (same conjugators)
    let (yb, zb) = if yb.initial_slope() > Rational::one() {
        (yb.inverse(), zb.inverse())
    } else {
        (yb.clone(), zb.clone())
    };
    if yb.initial_slope() != zb.initial_slope() {
        return None;
    }
    let u = log2_rat(&yb.initial_slope())?;
    debug_assert!(u < 0);
    for e in u..=-1 {
        if let Some(g) = stair_chain(&yb, &zb, &pow2_rat(e)) {
            return Some(g);
        }
    }
    None
}

pub(crate) fn log2_rat(r: &Rational) -> Option<i64> {
    log2_exact(r)
}

/// `orbit_power(h, tau, mu)`: the unique `n` with `h^n(tau) = mu`, if any.
pub fn orbit_power(h: &PLMap, tau: &Rational, mu: &Rational) -> Option<i64> {
    let r = RatPL::from_plmap(h);
    if tau == mu {
        return Some(0);
    }
    let htau = r.eval(tau);
    if htau == *tau {
        return None; // tau fixed, orbit is {tau}, mu != tau
    }
    // the orbit is strictly monotone within the gap between the adjacent
    // fixed points of h; check mu lies in that gap first
    let fixed = fixed_set(h);
    let mut lo = h.domain().0.to_rational();
    let mut hi = h.domain().1.to_rational();
    for (a, b) in &fixed.components {
        if *b < *tau && *b > lo {
            lo = b.clone();
        }
        if *a > *tau && *a < hi {
            hi = a.clone();
        }
    }
    if *mu <= lo || *mu >= hi {
        return None;
    }
    let forward_increases = htau > *tau;
    let target_right = *mu > *tau;
    let step = if forward_increases == target_right { r.clone() } else { r.inverse() };
    let sign: i64 = if forward_increases == target_right { 1 } else { -1 };
    let mut t = tau.clone();
    for n in 1..=STAIR_ITER_CAP as i64 {
        t = step.eval(&t);
        if t == *mu {
            return Some(sign * n);
        }
        if (target_right && t > *mu) || (!target_right && t < *mu) {
            return None;
        }
    }
    None
}

/// `nth_root(f, n)`: the unique `h` with `h^n = f`, if one exists.
pub fn nth_root(f: &PLMap, n: u32) -> Result<Option<PLMap>> {
    if n == 0 {
        return Err(Error::Precondition("root order must be positive".into()));
    }
    if n == 1 {
        return Ok(Some(f.clone()));
    }
    if f.is_identity() {
        return Ok(Some(f.clone()));
    }
    let d = fixed_set(f);
    let mut cuts = d.dyadic_boundary();
    let (eta, zeta) = f.domain();
    if cuts.first() != Some(&eta) {
        cuts.insert(0, eta.clone());
    }
    if cuts.last() != Some(&zeta) {
        cuts.push(zeta.clone());
    }
    let rf = RatPL::from_plmap(f);
    let mut pieces = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0].to_rational(), w[1].to_rational());
        let fb = rf.restrict(&a, &b);
        if fb.is_identity() {
            pieces.push(fb);
            continue;
        }
        match block_root(&fb, n as i64) {
            Some(h) => pieces.push(h),
            None => return Ok(None),
        }
    }
    let glued = glue_ratpl(&pieces);
    let Some(h) = glued.to_plmap() else {
        return Ok(None);
    };
    if h.pow(n as i64) == *f {
        Ok(Some(h))
    } else {
        Ok(None)
    }
}

/// Root on one non-identity block: solve the self-conjugacy equation with
/// initial slope the n-th root of the block's initial slope.
fn block_root(fb: &RatPL, n: i64) -> Option<RatPL> {
    let m = log2_rat(&fb.initial_slope())?;
    if m == 0 || m % n != 0 {
        return None;
    }
    let h = stair_chain(fb, fb, &pow2_rat(m / n))?;
    if h.pow(n) == *fb {
        Some(h)
    } else {
        None
    }
}

/// Per-interval description of a centralizer.
#[derive(Clone, Debug)]
pub enum CentralizerKind {
    FullGroup,
    Cyclic(PLMap),
    Trivial,
}

#[derive(Clone, Debug)]
pub struct CentralizerDescription {
    /// `(left, right, kind)` over the blocks cut at the dyadic fixed
    /// boundary; cyclic generators are extended by the identity outside
    /// their block.
    pub intervals: Vec<(Dyadic, Dyadic, CentralizerKind)>,
}

impl CentralizerDescription {
    /// Sample elements of the centralizer (products of generators and, on
    /// full blocks, a standard bump).
    pub fn sample_elements(&self) -> Vec<PLMap> {
        let mut out = Vec::new();
        for (a, b, kind) in &self.intervals {
            match kind {
                CentralizerKind::FullGroup => {
                    // a bump supported on [a,b]: rescaled x0
                    let bump = rescaled_x0(a, b);
                    out.push(bump);
                }
                CentralizerKind::Cyclic(g) => {
                    out.push(g.clone());
                    out.push(g.inverse());
                    out.push(g.pow(2));
                }
                CentralizerKind::Trivial => {}
            }
        }
        out
    }
}

/// The standard bump `x_0` rescaled onto a dyadic interval `[a, b]` and
/// extended by the identity to `[0,1]`.
pub fn rescaled_x0(a: &Dyadic, b: &Dyadic) -> PLMap {
    let r = RatPL::from_plmap(&PLMap::x0());
    let scale = (b - a).to_rational();
    let shift = a.to_rational();
    let s = r.affine_conjugate(&scale, &shift);
    let piece = s.to_plmap().expect("dyadic rescale");
    piece.extend_identity(&Dyadic::zero(), &Dyadic::one())
}

/// Centralizer of a single element, per blocks at the dyadic fixed boundary.
pub fn centralizer(f: &PLMap) -> CentralizerDescription {
    let d = fixed_set(f);
    let mut cuts = d.dyadic_boundary();
    let (eta, zeta) = f.domain();
    if cuts.first() != Some(&eta) {
        cuts.insert(0, eta.clone());
    }
    if cuts.last() != Some(&zeta) {
        cuts.push(zeta.clone());
    }
    let rf = RatPL::from_plmap(f);
    let mut intervals = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0].clone(), w[1].clone());
        let fb = rf.restrict(&a.to_rational(), &b.to_rational());
        if fb.is_identity() {
            intervals.push((a, b, CentralizerKind::FullGroup));
        } else {
            let gen = minimal_root_block(&fb).expect("non-identity block has a minimal root");
            let gen_pl = gen.to_plmap().expect("dyadic block root");
            let gen_full = gen_pl.extend_identity(&eta, &zeta);
            intervals.push((a, b, CentralizerKind::Cyclic(gen_full)));
        }
    }
    CentralizerDescription { intervals }
}

/// The minimal root generating the (cyclic) centralizer of a non-identity
/// block map.
pub(crate) fn minimal_root_block(fb: &RatPL) -> Option<RatPL> {
    let m = log2_rat(&fb.initial_slope())?;
    debug_assert!(m != 0);
    let am = m.unsigned_abs() as i64;
    let mut best: Option<(i64, RatPL)> = None;
    for k in (1..=am).rev() {
        if m % k != 0 {
            continue;
        }
        if let Some(h) = stair_chain(fb, fb, &pow2_rat(m / k)) {
            if h.pow(k) == *fb {
                best = Some((k, h));
                break;
            }
        }
    }
    best.map(|(_, h)| h)
}

/// Intersection of centralizers of several elements.
pub fn centralizer_intersection(fs: &[PLMap]) -> CentralizerDescription {
    assert!(!fs.is_empty());
    let (eta, zeta) = fs[0].domain();
    let mut cutset: Vec<Dyadic> = vec![eta.clone(), zeta.clone()];
    for f in fs {
        cutset.extend(fixed_set(f).dyadic_boundary());
    }
    cutset.sort();
    cutset.dedup();
    let rs: Vec<RatPL> = fs.iter().map(RatPL::from_plmap).collect();
    let mut intervals = Vec::new();
    for w in cutset.windows(2) {
        let (a, b) = (w[0].clone(), w[1].clone());
        let (ar, br) = (a.to_rational(), b.to_rational());
        let mut kind = CentralizerKind::FullGroup;
        for rf in &rs {
            let fb = rf.restrict(&ar, &br);
            if fb.is_identity() {
                continue;
            }
            // this element's centralizer restricted to the block is cyclic
            let gen = match minimal_root_block(&fb) {
                Some(g) => g,
                None => {
                    kind = CentralizerKind::Trivial;
                    break;
                }
            };
            kind = match kind {
                CentralizerKind::FullGroup => CentralizerKind::Cyclic(
                    gen.to_plmap()
                        .expect("dyadic root")
                        .extend_identity(&eta, &zeta),
                ),
                CentralizerKind::Cyclic(prev) => {
                    let prev_block = RatPL::from_plmap(&prev).restrict(&ar, &br);
                    match cyclic_intersection(&prev_block, &gen) {
                        Some(c) => CentralizerKind::Cyclic(
                            c.to_plmap()
                                .expect("dyadic root")
                                .extend_identity(&eta, &zeta),
                        ),
                        None => CentralizerKind::Trivial,
                    }
                }
                CentralizerKind::Trivial => CentralizerKind::Trivial,
            };
            if matches!(kind, CentralizerKind::Trivial) {
                break;
            }
        }
        intervals.push((a, b, kind));
    }
    CentralizerDescription { intervals }
}

/// Generator of `⟨a⟩ ∩ ⟨b⟩` for block maps with cyclic centralizers: the
/// candidate exponents come from the slope lattice, the maps verify it.
pub(crate) fn cyclic_intersection(a: &RatPL, b: &RatPL) -> Option<RatPL> {
    let ea = log2_rat(&a.initial_slope())?;
    let eb = log2_rat(&b.initial_slope())?;
    debug_assert!(ea != 0 && eb != 0);
    let l = ea.lcm(&eb);
    let ca = a.pow(l / ea);
    let cb = b.pow(l / eb);
    if ca == cb {
        Some(ca)
    } else {
        None
    }
}

/// Power conjugacy: minimal positive exponents `(m, n)` and a verified `g`
/// with `g^{-1} y^m g = z^n`, if any exist.
pub fn power_conjugate(y: &PLMap, z: &PLMap) -> Result<Option<(i64, i64, PLMap)>> {
    if y.is_identity() || z.is_identity() {
        return Ok(if y.is_identity() && z.is_identity() {
            Some((1, 1, PLMap::identity(y.domain().0, y.domain().1)))
        } else {
            None
        });
    }
    // fixed sets are invariant under nonzero powers, so alignment must
    // already work for (y, z)
    let Some(g0) = align_fixed_sets(y, z)? else {
        return Ok(None);
    };
    let yh = y.conjugate_by(&g0)?;
    // per-block initial-slope exponents give the linear constraint a*m = b*n
    let dz = fixed_set(z);
    let mut cuts = dz.dyadic_boundary();
    let (eta, zeta) = y.domain();
    if cuts.first() != Some(&eta) {
        cuts.insert(0, eta.clone());
    }
    if cuts.last() != Some(&zeta) {
        cuts.push(zeta.clone());
    }
    let ry = RatPL::from_plmap(&yh);
    let rz = RatPL::from_plmap(z);
    let mut constraint: Option<(i64, i64)> = None; // (a, b): a*m = b*n
    for w in cuts.windows(2) {
        let (a, b) = (w[0].to_rational(), w[1].to_rational());
        let yb = ry.restrict(&a, &b);
        let zb = rz.restrict(&a, &b);
        if yb.is_identity() != zb.is_identity() {
            return Ok(None);
        }
        if yb.is_identity() {
            continue;
        }
        let ea = log2_rat(&yb.initial_slope()).expect("pl2 slopes");
        let eb = log2_rat(&zb.initial_slope()).expect("pl2 slopes");
        match constraint {
            None => constraint = Some((ea, eb)),
            Some((pa, pb)) => {
                // require (ea, eb) proportional to (pa, pb)
                if ea as i128 * pb as i128 != eb as i128 * pa as i128 {
                    return Ok(None);
                }
            }
        }
    }
    let Some((a, b)) = constraint else {
        // both identity everywhere was handled above
        return Ok(None);
    };
    // minimal positive (m, n) with a*m = b*n
    let g = a.gcd(&b);
    let (mut m, mut n) = ((b / g).abs(), (a / g).abs());
    if m == 0 || n == 0 {
        return Ok(None);
    }
    // orientations: need sign(a*m) == sign(b*n); try (m,n) and (m,-n)
    for (mm, nn) in [(m, n), (m, -n)] {
        if a * mm != b * nn {
            continue;
        }
        m = mm;
        n = nn;
        if let Some(g1) = conjugate_pl(&y.pow(m), &z.pow(n))? {
            return Ok(Some((m, n, g1)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::word_to_plmap;
    use crate::word::Word;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn fixed_sets_of_generators() {
        let id = PLMap::id_unit();
        let d = fixed_set(&id);
        assert_eq!(d.components, vec![(rat(0, 1), rat(1, 1))]);

        let d0 = fixed_set(&PLMap::x0());
        assert_eq!(d0.components, vec![(rat(0, 1), rat(0, 1)), (rat(1, 1), rat(1, 1))]);

        let d1 = fixed_set(&PLMap::generator(1));
        assert_eq!(
            d1.components,
            vec![(rat(0, 1), rat(1, 2)), (rat(1, 1), rat(1, 1))]
        );
    }

    #[test]
    fn orbit_17ths_example() {
        let g = same_orbit(&rat(1, 17), &rat(13, 17)).unwrap();
        let g = g.expect("1/17 and 13/17 share an orbit");
        assert_eq!(g.eval(&rat(1, 17)).unwrap(), rat(13, 17));
        assert!(same_orbit(&rat(1, 17), &rat(3, 17)).unwrap().is_none());
        assert!(same_orbit(&rat(1, 4), &rat(3, 8)).unwrap().is_some());
    }

    #[test]
    fn align_examples() {
        let y = PLMap::x0();
        let g = align_fixed_sets(&y, &y).unwrap().unwrap();
        let _ = g;
        assert!(align_fixed_sets(&PLMap::x0(), &PLMap::generator(1))
            .unwrap()
            .is_none());
    }

    #[test]
    fn conjugacy_examples() {
        // (x1, x2) conjugate, e.g. by x0
        let x1 = PLMap::generator(1);
        let x2 = PLMap::generator(2);
        let g = conjugate_pl(&x1, &x2).unwrap().expect("x1 ~ x2");
        assert_eq!(x1.conjugate_by(&g).unwrap(), x2);

        // x0 and x0^{-1} are not conjugate
        assert!(conjugate_pl(&PLMap::x0(), &PLMap::x0().inverse())
            .unwrap()
            .is_none());

        // constructed conjugates are found
        let w = word_to_plmap(&Word::parse("x0 x1^-1").unwrap());
        let c = word_to_plmap(&Word::parse("x1 x2 x0^-1").unwrap());
        let z = w.conjugate_by(&c).unwrap();
        let g = conjugate_pl(&w, &z).unwrap().expect("conjugate by construction");
        assert_eq!(w.conjugate_by(&g).unwrap(), z);
    }

    #[test]
    fn orbit_power_examples() {
        let x0 = PLMap::x0();
        assert_eq!(orbit_power(&x0, &rat(1, 2), &rat(1, 4)), Some(1));
        assert_eq!(orbit_power(&x0, &rat(1, 2), &rat(1, 3)), None);
        assert_eq!(orbit_power(&PLMap::id_unit(), &rat(1, 3), &rat(1, 3)), Some(0));
        assert_eq!(orbit_power(&x0, &rat(1, 4), &rat(1, 2)), Some(-1));
    }

    #[test]
    fn root_examples() {
        let x0 = PLMap::x0();
        let sq = x0.pow(2);
        let h = nth_root(&sq, 2).unwrap().expect("x0^2 has a square root");
        assert_eq!(h, x0);
        assert!(nth_root(&x0, 2).unwrap().is_none());
        assert_eq!(nth_root(&x0, 1).unwrap().unwrap(), x0);
    }

    #[test]
    fn centralizer_examples() {
        let c = centralizer(&PLMap::id_unit());
        assert_eq!(c.intervals.len(), 1);
        assert!(matches!(c.intervals[0].2, CentralizerKind::FullGroup));

        let c0 = centralizer(&PLMap::x0());
        assert_eq!(c0.intervals.len(), 1);
        match &c0.intervals[0].2 {
            CentralizerKind::Cyclic(g) => assert_eq!(*g, PLMap::x0()),
            k => panic!("expected cyclic, got {k:?}"),
        }

        let c1 = centralizer(&PLMap::generator(1));
        assert_eq!(c1.intervals.len(), 2);
        assert!(matches!(c1.intervals[0].2, CentralizerKind::FullGroup));
        match &c1.intervals[1].2 {
            CentralizerKind::Cyclic(g) => assert_eq!(*g, PLMap::generator(1)),
            k => panic!("expected cyclic, got {k:?}"),
        }
        // sampled elements commute
        for s in c1.sample_elements() {
            let f = PLMap::generator(1);
            assert_eq!(s.compose(&f).unwrap(), f.compose(&s).unwrap());
        }
    }

    #[test]
    fn power_conjugacy_examples() {
        let x0 = PLMap::x0();
        let (m, n, g) = power_conjugate(&x0, &x0).unwrap().expect("x0 ~ x0");
        assert_eq!((m, n), (1, 1));
        let _ = g;
        let (m, n, g) = power_conjugate(&x0, &x0.pow(2)).unwrap().expect("powers");
        assert_eq!((m, n), (2, 1));
        assert_eq!(x0.pow(2).conjugate_by(&g).unwrap(), x0.pow(2));
        assert!(power_conjugate(&x0, &PLMap::generator(1)).unwrap().is_none());
    }
}
