//! Checking the two Lee properties of a candidate word on tuples from a
//! ball of the free group `F(a,b)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::freewords::{free_ball, Word};
use crate::groups::format_word;

use super::sml::LeeCandidate;

/// Radius of the ball searched for simultaneous conjugators when
/// re-verifying an L1 counterexample.
pub const CONJUGATOR_SEARCH_RADIUS: usize = 6;

const KEEP: usize = 20;

#[derive(Debug, Clone)]
pub struct LeeReport {
    pub candidate: LeeCandidate,
    pub radius: usize,
    pub tuples: usize,
    pub l1_pairs_checked: usize,
    /// Tuples with equal nontrivial values and no simultaneous conjugator.
    pub l1_counterexamples: Vec<(Vec<Word>, Vec<Word>)>,
    pub l1_total: usize,
    /// Tuples whose value is trivial exactly when they do not generate a
    /// cyclic subgroup.
    pub l2_counterexamples: Vec<Vec<Word>>,
    pub l2_total: usize,
    pub conjugator_search_radius: usize,
}

fn name(g: u32) -> String {
    ["a", "b"]
        .get(g as usize)
        .map_or_else(|| format!("g{g}"), |s| s.to_string())
}

fn fmt_tuple(t: &[Word]) -> String {
    let parts: Vec<String> = t.iter().map(|w| format_word(w, name)).collect();
    format!("({})", parts.join(", "))
}

impl LeeReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "candidate": self.candidate.to_string(),
            "radius": self.radius,
            "tuples": self.tuples,
            "l1_pairs_checked": self.l1_pairs_checked,
            "l1_counterexamples": self.l1_counterexamples.iter()
                .map(|(v, w)| json!([fmt_tuple(v), fmt_tuple(w)]))
                .collect::<Vec<_>>(),
            "l1_total": self.l1_total,
            "l2_counterexamples": self.l2_counterexamples.iter().map(|v| fmt_tuple(v)).collect::<Vec<_>>(),
            "l2_total": self.l2_total,
            "conjugator_search_radius": self.conjugator_search_radius,
        })
    }
}

/// Whether the entries lie in one cyclic subgroup: all nontrivial entries
/// share a primitive root up to inversion.
pub fn generates_cyclic(tuple: &[Word]) -> Result<bool> {
    let mut root: Option<Word> = None;
    for w in tuple {
        if w.is_identity() {
            continue;
        }
        let r = w.primitive_root()?.0.canonical_up_to_inverse();
        match &root {
            Some(r0) if *r0 != r => return Ok(false),
            None => root = Some(r),
            _ => {}
        }
    }
    Ok(true)
}

fn conjugates_all(s: &Word, v: &[Word], w: &[Word]) -> bool {
    v.iter().zip(w).all(|(x, y)| x.conjugate(s) == *y)
}

/// An `s` with `v_i^s = w_i` for all `i`, decided exactly: the conjugators
/// taking the first nontrivial `v_i` to `w_i` are `root^k s0`, and only
/// finitely many `k` can work for the other entries.
pub fn simultaneous_conjugator(v: &[Word], w: &[Word]) -> Option<Word> {
    if v.len() != w.len() {
        return None;
    }
    let Some(i) = v.iter().position(|x| !x.is_identity()) else {
        return w.iter().all(Word::is_identity).then(Word::identity);
    };
    let s0 = v[i].conjugator_to(&w[i])?;
    let (root, _) = v[i].primitive_root().ok()?;
    // beyond this bound root^-k v_j root^k is longer than any target
    let bound = v
        .iter()
        .zip(w)
        .map(|(x, y)| x.len() + y.len() + 2 * s0.len())
        .max()
        .unwrap_or(0) as i64
        + 2 * root.len() as i64
        + 4;
    for k in 0..=bound {
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let s = root.pow(kk).mul(&s0);
            if conjugates_all(&s, v, w) {
                return Some(s);
            }
        }
    }
    None
}

/// Searches `ball(F_rank, radius)` for a simultaneous conjugator.
pub fn ball_conjugator(v: &[Word], w: &[Word], rank: u32, radius: usize) -> Option<Word> {
    free_ball(rank, radius)
        .into_par_iter()
        .find_first(|s| conjugates_all(s, v, w))
}

pub fn check_lee_properties(lee: &LeeCandidate, radius: usize) -> Result<LeeReport> {
    if radius < 1 {
        return Err(Error::Precondition("radius must be at least 1".into()));
    }
    let m = lee.arity();
    let ball = free_ball(2, radius);
    let n = ball.len();
    let total = n
        .checked_pow(m as u32)
        .ok_or_else(|| Error::Precondition("too many tuples".into()))?;
    let tuple = |mut k: usize| -> Vec<Word> {
        let mut t = vec![Word::identity(); m];
        for slot in t.iter_mut().rev() {
            *slot = ball[k % n].clone();
            k /= n;
        }
        t
    };
    let evaluated: Vec<(Vec<Word>, Word, bool)> = (0..total)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let t = tuple(k);
            let value = lee.evaluate_free(&t)?;
            let cyclic = generates_cyclic(&t)?;
            Ok((t, value, cyclic))
        })
        .collect::<Result<_>>()?;

    let mut l2 = Vec::new();
    let mut l2_total = 0;
    let mut classes: BTreeMap<Word, Vec<usize>> = BTreeMap::new();
    for (k, (t, value, cyclic)) in evaluated.iter().enumerate() {
        if value.is_identity() != *cyclic {
            l2_total += 1;
            if l2.len() < KEEP {
                l2.push(t.clone());
            }
        }
        if !value.is_identity() {
            classes.entry(value.clone()).or_default().push(k);
        }
    }

    let pairs: Vec<(usize, usize)> = classes
        .values()
        .flat_map(|ks| {
            ks.iter()
                .enumerate()
                .flat_map(move |(i, &a)| ks[i + 1..].iter().map(move |&b| (a, b)))
        })
        .collect();
    let failing: Vec<(usize, usize)> = pairs
        .par_iter()
        .filter(|&&(a, b)| simultaneous_conjugator(&evaluated[a].0, &evaluated[b].0).is_none())
        .copied()
        .collect();

    let mut l1 = Vec::new();
    for &(a, b) in failing.iter().take(KEEP) {
        let (v, w) = (&evaluated[a].0, &evaluated[b].0);
        // re-verify: equal nontrivial values and no conjugator in the ball
        let (x, y) = (lee.evaluate_free(v)?, lee.evaluate_free(w)?);
        if x != y || x.is_identity() {
            return Err(Error::Verification(format!(
                "L1 counterexample {} / {} does not re-evaluate",
                fmt_tuple(v),
                fmt_tuple(w)
            )));
        }
        if let Some(s) = ball_conjugator(v, w, 2, CONJUGATOR_SEARCH_RADIUS) {
            return Err(Error::Verification(format!(
                "ball search conjugates {} to {} by {}",
                fmt_tuple(v),
                fmt_tuple(w),
                format_word(&s, name)
            )));
        }
        l1.push((v.clone(), w.clone()));
    }
    for t in &l2 {
        let value = lee.evaluate_free(t)?;
        if value.is_identity() == generates_cyclic(t)? {
            return Err(Error::Verification(format!(
                "L2 counterexample {} does not re-evaluate",
                fmt_tuple(t)
            )));
        }
    }

    Ok(LeeReport {
        candidate: lee.clone(),
        radius,
        tuples: total,
        l1_pairs_checked: pairs.len(),
        l1_total: failing.len(),
        l1_counterexamples: l1,
        l2_counterexamples: l2,
        l2_total,
        conjugator_search_radius: CONJUGATOR_SEARCH_RADIUS,
    })
}
