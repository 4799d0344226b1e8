//! The Shpilrain-Ushakov decomposition-problem protocol over F with the
//! commuting subgroups A_s, B_s, and the deterministic attacks recovering
//! the shared key: the normal-form factorization attack, the transitivity
//! attack, and the attack on the Ko-Lee style variant.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::plmap::{
    dyadic_interval_map_points, extend_partial_maps_on, word_eval, word_to_plmap, PLMap,
};
use crate::tree::{tree_pair_from_plmap, word_from_tree_pair};
use crate::word::{Letter, Word};

/// `phi_s = 1 - 2^{-(s+1)}`, the support boundary between A_s and B_s.
pub fn phi(s: u32) -> Dyadic {
    Dyadic::one() - Dyadic::pow2(-(s as i32 + 1))
}

#[derive(Clone, Copy, Debug)]
pub struct ProtocolParams {
    pub s: u32,
    pub m: usize,
    pub seed: u64,
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        if !(3..=8).contains(&self.s) {
            return Err(Error::Precondition("s must lie in [3,8]".into()));
        }
        if self.m % 2 != 0 || self.m < 2 {
            return Err(Error::Precondition("M must be a positive even integer".into()));
        }
        Ok(())
    }
}

/// Public transcript of one exchange: `u1 = a1 w b1`, `u2 = b2 w a2`.
#[derive(Clone, Debug)]
pub struct Transcript {
    pub s: u32,
    pub w: Word,
    pub u1: Word,
    pub u2: Word,
}

/// Ko-Lee style variant: `u1 = a1 w a2`, `u2 = b1 w b2`.
#[derive(Clone, Debug)]
pub struct TranscriptKoLee {
    pub s: u32,
    pub w: Word,
    pub u1: Word,
    pub u2: Word,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

/// A recovered private pair and the shared key it reproduces.
#[derive(Clone, Debug)]
pub struct RecoveredKey {
    pub a: Word,
    pub b: Word,
    pub key: Word,
    pub which_party: Party,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subgroup {
    A,
    B,
}

fn subgroup_generators(group: Subgroup, s: u32) -> Vec<Word> {
    match group {
        Subgroup::A => (1..=s)
            .map(|k| Word::from_letters(vec![Letter::pos(0), Letter::neg(k)]))
            .collect(),
        Subgroup::B => ((s + 1)..=(2 * s)).map(Word::gen).collect(),
    }
}

/// Random reduced word in the given generators, normal-formed, resampled
/// until the normal-form length lands in `[target-8, target+8]` (or hits
/// `target` exactly when `exact` is set).
fn random_in_generators(gens: &[Word], target: usize, exact: bool, rng: &mut ChaCha8Rng) -> Word {
    let mut letters_goal = target.max(2);
    for _attempt in 0..100_000 {
        let mut w = Word::empty();
        let mut prev: Option<(usize, i8)> = None;
        let mut len = 0usize;
        while len < letters_goal {
            let gi = rng.gen_range(0..gens.len());
            let sign: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
            if let Some((pg, ps)) = prev {
                if pg == gi && ps == -sign {
                    continue; // keep the generator word freely reduced
                }
            }
            let g = if sign > 0 { gens[gi].clone() } else { gens[gi].inverse() };
            w = w.concat(&g);
            prev = Some((gi, sign));
            len += 1;
        }
        let nf = w.normal_form();
        let l = nf.len();
        let ok = if exact { l == target } else { l + 8 >= target && l <= target + 8 };
        if ok && !nf.is_empty() {
            return nf;
        }
        if l < target {
            letters_goal += ((target - l) / 2).max(1);
        } else if l > target {
            letters_goal = letters_goal.saturating_sub(((l - target) / 2).max(1)).max(2);
        }
    }
    panic!("could not sample a word of normal-form length {target}");
}

/// Random element of A_s or B_s with normal-form length in `M ± 8`.
pub fn random_subgroup_element(group: Subgroup, s: u32, m: usize, rng: &mut ChaCha8Rng) -> Word {
    let gens = subgroup_generators(group, s);
    random_in_generators(&gens, m, false, rng)
}

/// Factor `z = a · b` with `a ∈ A_s` (balanced normal form with the index
/// condition `i_k - k < s`) and `b ∈ B_s` (indices at least `s+1` after
/// the shift by the prefix length), when possible.
pub fn membership_as_bs(z: &Word, s: u32) -> Option<(Word, Word)> {
    let z = z.normal_form();
    let Ok((pos, neg)) = z.to_parts() else {
        return None;
    };
    let mut m = 0usize;
    while m < pos.len() && m < neg.len() {
        let k = (m + 1) as i64;
        if (pos[m] as i64) - k < s as i64 && (neg[m] as i64) - k < s as i64 {
            m += 1;
        } else {
            break;
        }
    }
    let shift = m as u32;
    let mid_pos: Vec<u32> = pos[m..].iter().map(|&i| i.checked_sub(shift)).collect::<Option<_>>()?;
    let mid_neg: Vec<u32> = neg[m..].iter().map(|&i| i.checked_sub(shift)).collect::<Option<_>>()?;
    if mid_pos.iter().chain(&mid_neg).any(|&i| i < s + 1) {
        return None;
    }
    let a = Word::from_parts(&pos[..m], &neg[..m]);
    let b = Word::from_parts(&mid_pos, &mid_neg);
    // verify the factorization exactly
    if a.concat(&b).normal_form() == z {
        Some((a, b))
    } else {
        None
    }
}

/// One full protocol run; asserts `K_A = K_B` and returns the transcript
/// with the honest shared key.
pub fn run_protocol(params: ProtocolParams) -> Result<(Transcript, Word)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let s = params.s;
    let m = params.m;
    let wgens: Vec<Word> = (0..=(s + 2)).map(Word::gen).collect();
    let w = random_in_generators(&wgens, m, true, &mut rng);
    let a1 = random_subgroup_element(Subgroup::A, s, m, &mut rng);
    let b1 = random_subgroup_element(Subgroup::B, s, m, &mut rng);
    let b2 = random_subgroup_element(Subgroup::B, s, m, &mut rng);
    let a2 = random_subgroup_element(Subgroup::A, s, m, &mut rng);
    let u1 = a1.concat(&w).concat(&b1).normal_form();
    let u2 = b2.concat(&w).concat(&a2).normal_form();
    let ka = a1.concat(&u2).concat(&b1).normal_form();
    let kb = b2.concat(&u1).concat(&a2).normal_form();
    assert_eq!(ka, kb, "elementwise commutation must make the keys agree");
    Ok((Transcript { s, w, u1, u2 }, ka))
}

/// The §-outline factorization attack; always recovers the key on honest
/// transcripts. Prefers the `z2` (Bob) branch, cross-checking the `z1`
/// branch when both factor.
pub fn attack(t: &Transcript, s: u32) -> Result<RecoveredKey> {
    let z2 = t.w.inverse().concat(&t.u2).normal_form();
    let z1 = t.u1.concat(&t.w.inverse()).normal_form();
    let bob = membership_as_bs(&z2, s).and_then(|(a, _)| {
        let b2 = t.u2.concat(&a.inverse()).concat(&t.w.inverse()).normal_form();
        if !in_bs(&b2, s) {
            return None;
        }
        if b2.concat(&t.w).concat(&a).normal_form() != t.u2.normal_form() {
            return None;
        }
        let key = b2.concat(&t.u1).concat(&a).normal_form();
        Some(RecoveredKey { a, b: b2, key, which_party: Party::Bob })
    });
    let alice = membership_as_bs(&z1, s).and_then(|(a, _)| {
        let b1 = t.w.inverse().concat(&a.inverse()).concat(&t.u1).normal_form();
        if !in_bs(&b1, s) {
            return None;
        }
        if a.concat(&t.w).concat(&b1).normal_form() != t.u1.normal_form() {
            return None;
        }
        let key = a.concat(&t.u2).concat(&b1).normal_form();
        Some(RecoveredKey { a, b: b1, key, which_party: Party::Alice })
    });
    match (bob, alice) {
        (Some(kb), Some(ka)) => {
            debug_assert_eq!(kb.key, ka.key, "both branches must agree when both factor");
            Ok(kb)
        }
        (Some(kb), None) => Ok(kb),
        (None, Some(ka)) => Ok(ka),
        (None, None) => Err(Error::Precondition(
            "one of z1, z2 must lie in A_s B_s for honest transcripts".into(),
        )),
    }
}

fn in_bs(w: &Word, s: u32) -> bool {
    w.normal_form().letters().iter().all(|l| l.index >= s + 1)
}

fn in_as(w: &Word, s: u32) -> bool {
    membership_as_bs(w, s).map(|(_, b)| b.is_empty()).unwrap_or(false)
}

/// Convert a PL map back to a normal-form word.
pub fn plmap_to_word(f: &PLMap) -> Result<Word> {
    Ok(word_from_tree_pair(&tree_pair_from_plmap(f)?))
}

/// Extend the partial map `p|[0, cut]` (fixing 0) into `PL_2([0, stop])`,
/// identity beyond, returned as a word.
fn extend_left_partial(p: &PLMap, cut: &Dyadic, stop: &Dyadic) -> Result<Word> {
    let mut brick: Vec<(Dyadic, Dyadic)> = vec![(Dyadic::zero(), Dyadic::zero())];
    for (x, y) in p.breakpoints() {
        if *x > Dyadic::zero() && x < cut {
            brick.push((x.clone(), y.clone()));
        }
    }
    brick.push((cut.clone(), p.eval_dyadic(cut)?));
    let ext = extend_partial_maps_on(&[brick], &Dyadic::zero(), stop)?;
    let full = ext.extend_identity(&Dyadic::zero(), &Dyadic::one());
    plmap_to_word(&full)
}

/// The transitivity attack: recovers the party the factorization attack
/// skips (Alice when `w(phi_s) <= phi_s`, Bob otherwise, via inverses).
pub fn attack_transitivity(t: &Transcript, s: u32) -> Result<RecoveredKey> {
    let phi_s = phi(s).to_rational();
    let w_phi = word_eval(&t.w, &phi_s);
    if w_phi <= phi_s {
        // a_1 = u_1 w^{-1} on [0, w(phi_s)]
        let wm = word_to_plmap(&t.w);
        let u1m = word_to_plmap(&t.u1);
        let p = u1m.compose(&wm.inverse())?;
        let cut = Dyadic::from_rational(&w_phi).expect("dyadic image");
        let a_sigma = if cut == phi(s) {
            let r = p.restrict(&Dyadic::zero(), &phi(s))?;
            plmap_to_word(&r.extend_identity(&Dyadic::zero(), &Dyadic::one()))?
        } else {
            extend_left_partial(&p, &cut, &phi(s))?
        };
        let b_sigma = t.w.inverse().concat(&a_sigma.inverse()).concat(&t.u1).normal_form();
        if !in_bs(&b_sigma, s) || !in_as(&a_sigma, s) {
            return Err(Error::Precondition("transitivity recovery failed membership".into()));
        }
        if a_sigma.concat(&t.w).concat(&b_sigma).normal_form() != t.u1.normal_form() {
            return Err(Error::Precondition("recovered pair does not reproduce u1".into()));
        }
        let key = a_sigma.concat(&t.u2).concat(&b_sigma).normal_form();
        Ok(RecoveredKey { a: a_sigma, b: b_sigma, key, which_party: Party::Alice })
    } else {
        // Bob through inverses: u_2^{-1} = a_2^{-1} w^{-1} b_2^{-1}
        let hat = Transcript {
            s,
            w: t.w.inverse().normal_form(),
            u1: t.u2.inverse().normal_form(),
            u2: Word::empty(),
        };
        let rk = attack_transitivity(&hat, s)?;
        let a_sigma = rk.a.inverse().normal_form();
        let b_sigma = rk.b.inverse().normal_form();
        if b_sigma.concat(&t.w).concat(&a_sigma).normal_form() != t.u2.normal_form() {
            return Err(Error::Precondition("recovered pair does not reproduce u2".into()));
        }
        let key = b_sigma.concat(&t.u1).concat(&a_sigma).normal_form();
        Ok(RecoveredKey { a: a_sigma, b: b_sigma, key, which_party: Party::Bob })
    }
}

/// One run of the Ko-Lee style variant: Alice sends `a1 w a2`, Bob sends
/// `b1 w b2`; the key is `K = a1 b1 w b2 a2`.
pub fn run_protocol_kolee(params: ProtocolParams) -> Result<(TranscriptKoLee, Word)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x4b6f_4c65);
    let s = params.s;
    let m = params.m;
    let wgens: Vec<Word> = (0..=(s + 2)).map(Word::gen).collect();
    let w = random_in_generators(&wgens, m, true, &mut rng);
    let a1 = random_subgroup_element(Subgroup::A, s, m, &mut rng);
    let a2 = random_subgroup_element(Subgroup::A, s, m, &mut rng);
    let b1 = random_subgroup_element(Subgroup::B, s, m, &mut rng);
    let b2 = random_subgroup_element(Subgroup::B, s, m, &mut rng);
    let u1 = a1.concat(&w).concat(&a2).normal_form();
    let u2 = b1.concat(&w).concat(&b2).normal_form();
    let ka = a1.concat(&u2).concat(&a2).normal_form();
    let kb = b1.concat(&u1).concat(&b2).normal_form();
    assert_eq!(ka, kb);
    Ok((TranscriptKoLee { s, w, u1, u2 }, ka))
}

/// Attack on the Ko-Lee variant: normalize one end by transitivity of the
/// supported subgroup, then recover by extension.
pub fn attack_kolee(t: &TranscriptKoLee, s: u32) -> Result<RecoveredKey> {
    let phi_s = phi(s).to_rational();
    let w_phi = word_eval(&t.w, &phi_s);
    if w_phi <= phi_s {
        // attack Bob's u2 = b1 w b2 with B_s transitivity on [phi_s, 1]
        let wm = word_to_plmap(&t.w);
        let u2m = word_to_plmap(&t.u2);
        let p = Dyadic::from_rational(&wm.inverse().eval(&phi_s)?).expect("dyadic");
        let q = Dyadic::from_rational(&u2m.inverse().eval(&phi_s)?).expect("dyadic");
        let b0 = move_point_in_interval(&q, &p, &phi(s), &Dyadic::one())?;
        let b0w = plmap_to_word(&b0)?;
        let u2p = t.u2.concat(&b0w.inverse()).normal_form();
        // b2' = w^{-1} u2' on [0, w^{-1}(phi_s)], and it fixes that point
        let u2pm = word_to_plmap(&u2p);
        let part = wm.inverse().compose(&u2pm)?;
        let b_sigma2 = {
            let restricted = part.restrict(&Dyadic::zero(), &p)?;
            plmap_to_word(&restricted.extend_identity(&Dyadic::zero(), &Dyadic::one()))?
        };
        let b_sigma1 = u2p.concat(&b_sigma2.inverse()).concat(&t.w.inverse()).normal_form();
        if !in_bs(&b_sigma1, s) || !in_bs(&b_sigma2, s) {
            return Err(Error::Precondition("kolee recovery failed membership".into()));
        }
        let b_second = b_sigma2.concat(&b0w).normal_form();
        if b_sigma1.concat(&t.w).concat(&b_second).normal_form() != t.u2.normal_form() {
            return Err(Error::Precondition("recovered pair does not reproduce u2".into()));
        }
        let key = b_sigma1.concat(&t.u1).concat(&b_second).normal_form();
        Ok(RecoveredKey { a: b_sigma1, b: b_second, key, which_party: Party::Bob })
    } else {
        // attack Alice's u1 = a1 w a2 with A_s transitivity on [0, phi_s]
        let wm = word_to_plmap(&t.w);
        let u1m = word_to_plmap(&t.u1);
        let p = Dyadic::from_rational(&wm.inverse().eval(&phi_s)?).expect("dyadic");
        let q = Dyadic::from_rational(&u1m.inverse().eval(&phi_s)?).expect("dyadic");
        let a0 = move_point_in_interval(&q, &p, &Dyadic::zero(), &phi(s))?;
        let a0w = plmap_to_word(&a0)?;
        let u1p = t.u1.concat(&a0w.inverse()).normal_form();
        // a2' = w^{-1} u1' on [w^{-1}(phi_s), 1]; extend into [0, w^{-1}(phi_s)]
        let u1pm = word_to_plmap(&u1p);
        let part = wm.inverse().compose(&u1pm)?;
        let a_sigma2 = extend_fixing_outside(&part, &p, &phi(s))?;
        let a_sigma1 = u1p.concat(&a_sigma2.inverse()).concat(&t.w.inverse()).normal_form();
        if !in_as(&a_sigma1, s) || !in_as(&a_sigma2, s) {
            return Err(Error::Precondition("kolee recovery failed membership".into()));
        }
        let a_second = a_sigma2.concat(&a0w).normal_form();
        if a_sigma1.concat(&t.w).concat(&a_second).normal_form() != t.u1.normal_form() {
            return Err(Error::Precondition("recovered pair does not reproduce u1".into()));
        }
        let key = a_sigma1.concat(&t.u2).concat(&a_second).normal_form();
        Ok(RecoveredKey { a: a_sigma1, b: a_second, key, which_party: Party::Alice })
    }
}

/// An element of PL_2 supported on `[lo, hi]` sending `q` to `p`.
fn move_point_in_interval(q: &Dyadic, p: &Dyadic, lo: &Dyadic, hi: &Dyadic) -> Result<PLMap> {
    if q == p {
        return Ok(PLMap::id_unit());
    }
    if !(q > lo && q < hi && p > lo && p < hi) {
        return Err(Error::Precondition("points must be interior to the support".into()));
    }
    let mut pts = vec![(lo.clone(), lo.clone())];
    pts.extend(dyadic_interval_map_points(lo, q, lo, p).into_iter().skip(1));
    pts.extend(dyadic_interval_map_points(q, hi, p, hi).into_iter().skip(1));
    let piece = PLMap::new(pts)?;
    Ok(piece.extend_identity(&Dyadic::zero(), &Dyadic::one()))
}

/// Extension for the A-side Ko-Lee case: the partial map is known on
/// `[cut, phi_s]` (fixing both ends, identity beyond `phi_s`); fill
/// `[0, cut]` arbitrarily inside PL_2([0, phi_s]).
fn extend_fixing_outside(part: &PLMap, cut: &Dyadic, phi_s: &Dyadic) -> Result<Word> {
    let mut brick: Vec<(Dyadic, Dyadic)> = vec![(cut.clone(), cut.clone())];
    for (x, y) in part.breakpoints() {
        if x > cut && x < phi_s {
            brick.push((x.clone(), y.clone()));
        }
    }
    let at_phi = part.eval_dyadic(phi_s)?;
    if at_phi != *phi_s {
        return Err(Error::Precondition("partial map must fix phi_s".into()));
    }
    brick.push((phi_s.clone(), at_phi));
    let ext = extend_partial_maps_on(&[brick], &Dyadic::zero(), phi_s)?;
    let full = ext.extend_identity(&Dyadic::zero(), &Dyadic::one());
    plmap_to_word(&full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Rational;

    #[test]
    fn phi_values() {
        assert_eq!(phi(2), Dyadic::ratio(7, 3));
        assert_eq!(phi(0), Dyadic::ratio(1, 1));
        assert_eq!(phi(3), Dyadic::ratio(15, 4));
    }

    #[test]
    fn subgroup_elements_have_membership_and_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = 3;
        let a = random_subgroup_element(Subgroup::A, s, 40, &mut rng);
        let (fa, fb) = membership_as_bs(&a, s).expect("A_s element factors");
        assert!(fb.is_empty());
        assert_eq!(fa, a);
        let am = word_to_plmap(&a);
        let pr = phi(s).to_rational();
        for t in [pr.clone(), Rational::new(31.into(), 32.into())] {
            assert_eq!(am.eval(&t).unwrap(), t);
        }
        let b = random_subgroup_element(Subgroup::B, s, 40, &mut rng);
        assert!(in_bs(&b, s));
        let ab = a.concat(&b).normal_form();
        let ba = b.concat(&a).normal_form();
        assert_eq!(ab, ba, "A_s and B_s commute elementwise");
    }

    #[test]
    fn membership_examples() {
        let s = 3;
        let w = Word::parse("x0 x1^-1").unwrap();
        let (a, b) = membership_as_bs(&w, s).unwrap();
        assert_eq!(a, w.normal_form());
        assert!(b.is_empty());
        let g = Word::gen(s + 1);
        let (a, b) = membership_as_bs(&g, s).unwrap();
        assert!(a.is_empty());
        assert_eq!(b, g);
        assert!(membership_as_bs(&Word::gen(1), s).is_none());
    }

    #[test]
    fn protocol_and_attack_roundtrip() {
        for seed in 0..4 {
            let params = ProtocolParams { s: 4, m: 64, seed };
            let (t, k) = run_protocol(params).unwrap();
            let rk = attack(&t, params.s).unwrap();
            assert_eq!(rk.key, k, "seed {seed}");
        }
    }

    #[test]
    fn attack_on_trivial_keys() {
        // hand-built transcript with empty private keys: K = w
        let s = 3;
        let w = Word::parse("x0 x1 x4^-1").unwrap().normal_form();
        let t = Transcript { s, w: w.clone(), u1: w.clone(), u2: w.clone() };
        let rk = attack(&t, s).unwrap();
        assert_eq!(rk.key, w);
    }

    #[test]
    fn transitivity_attack_roundtrip() {
        for seed in 0..3 {
            let params = ProtocolParams { s: 3, m: 40, seed };
            let (t, k) = run_protocol(params).unwrap();
            let rk = attack_transitivity(&t, params.s).unwrap();
            assert_eq!(rk.key, k, "seed {seed}");
        }
    }

    #[test]
    fn kolee_attack_roundtrip() {
        for seed in 0..3 {
            let params = ProtocolParams { s: 3, m: 40, seed };
            let (t, k) = run_protocol_kolee(params).unwrap();
            let rk = attack_kolee(&t, params.s).unwrap();
            assert_eq!(rk.key, k, "seed {seed}");
        }
    }
}
