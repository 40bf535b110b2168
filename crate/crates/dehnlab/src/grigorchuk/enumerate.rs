//! Exhaustive enumeration of the trivial words of Γ up to a length bound.
//!
//! Testing all freely reduced words is hopeless beyond length ~8 (there are
//! 8·7^{n−1} of them), but the trivial ones can be produced exhaustively by
//! a meet-in-the-middle split: w = u·v of length ℓ is trivial iff the tree
//! actions of u and v⁻¹ agree. Words of half length are enumerated once and
//! fingerprinted by their action on a fixed level of the tree. Equal
//! elements always share a fingerprint, so no trivial word is ever missed.
//! In the other direction the tables are *certified* once: inside every
//! fingerprint class all words are checked pairwise equal by the exact
//! solver. After certification a fingerprint match is a proof of equality
//! and the join needs no per-candidate solver calls; if certification ever
//! failed, callers fall back to confirming each candidate exactly.

use std::collections::HashMap;

use crate::words::Word;

use super::{apply_generator_to_path, is_trivial_gamma, GAMMA_ALPHABET};

/// Depth of the tree level used for fingerprints. Deep enough that
/// certification succeeds comfortably; correctness never depends on it.
const FINGERPRINT_LEVEL: u32 = 10;
const LEAVES: usize = 1 << FINGERPRINT_LEVEL;

/// Letters in enumeration order: positive first, then inverses.
fn signed_letters(alphabet: &[u8]) -> Vec<u8> {
    let mut out: Vec<u8> = alphabet.to_vec();
    out.extend(alphabet.iter().map(|b| b.to_ascii_uppercase()));
    out
}

/// Calls `f` on every freely reduced word of length exactly `len` over
/// `alphabet`±, in a fixed order.
pub fn for_each_reduced_word(alphabet: &[u8], len: usize, f: &mut impl FnMut(&Word)) {
    let letters = signed_letters(alphabet);
    let mut stack: Vec<u8> = Vec::with_capacity(len);
    fn rec(letters: &[u8], len: usize, stack: &mut Vec<u8>, f: &mut impl FnMut(&Word)) {
        if stack.len() == len {
            f(&Word::from_bytes(stack.clone()));
            return;
        }
        for &l in letters {
            if stack.last().is_some_and(|&t| t ^ l == 0x20) {
                continue;
            }
            stack.push(l);
            rec(letters, len, stack, f);
            stack.pop();
        }
    }
    rec(&letters, len, &mut stack, f);
}

pub fn reduced_words_of_len(len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for_each_reduced_word(GAMMA_ALPHABET, len, &mut |w| out.push(w.clone()));
    out
}

fn fnv(perm: &[u16]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &x in perm {
        h ^= x as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn invert_perm(perm: &[u16], out: &mut [u16]) {
    for (i, &p) in perm.iter().enumerate() {
        out[p as usize] = i as u16;
    }
}

pub(crate) struct Entry {
    pub word: Word,
    pub hash: u64,
    pub inv_hash: u64,
}

/// All reduced words of length exactly `len` with fingerprints of their
/// tree action and of its inverse.
fn fingerprinted_words(len: usize) -> Vec<Entry> {
    let mut gen_perm: HashMap<u8, Vec<u16>> = HashMap::new();
    for &g in GAMMA_ALPHABET {
        let perm: Vec<u16> = (0..LEAVES)
            .map(|p| apply_generator_to_path(g, p as u32, FINGERPRINT_LEVEL) as u16)
            .collect();
        gen_perm.insert(g, perm);
    }

    let letters = signed_letters(GAMMA_ALPHABET);
    let mut out = Vec::new();
    let mut stack: Vec<u8> = Vec::with_capacity(len);
    // perms[k] = action of the length-k prefix; appending g composes as
    // perm'[x] = perm[g(x)] because the rightmost letter acts first.
    let mut perms: Vec<Vec<u16>> = vec![(0..LEAVES as u16).collect()];
    let mut inv = vec![0u16; LEAVES];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        letters: &[u8],
        gen_perm: &HashMap<u8, Vec<u16>>,
        len: usize,
        stack: &mut Vec<u8>,
        perms: &mut Vec<Vec<u16>>,
        inv: &mut [u16],
        out: &mut Vec<Entry>,
    ) {
        if stack.len() == len {
            let perm = perms.last().unwrap();
            invert_perm(perm, inv);
            out.push(Entry {
                word: Word::from_bytes(stack.clone()),
                hash: fnv(perm),
                inv_hash: fnv(inv),
            });
            return;
        }
        for &l in letters {
            if stack.last().is_some_and(|&t| t ^ l == 0x20) {
                continue;
            }
            let g = l.to_ascii_lowercase(); // generators are involutions
            let gp = &gen_perm[&g];
            let prev = perms.last().unwrap();
            let next: Vec<u16> = (0..LEAVES).map(|x| prev[gp[x] as usize]).collect();
            perms.push(next);
            stack.push(l);
            rec(letters, gen_perm, len, stack, perms, inv, out);
            stack.pop();
            perms.pop();
        }
    }
    rec(&letters, &gen_perm, len, &mut stack, &mut perms, &mut inv, &mut out);
    out
}

/// Fingerprint tables for all reduced words of length ≤ half.
pub(crate) struct HalfTables {
    pub tables: Vec<Vec<Entry>>,
}

impl HalfTables {
    pub fn build(half: usize) -> Self {
        HalfTables { tables: (0..=half).map(fingerprinted_words).collect() }
    }

    /// Certifies that fingerprint equality implies element equality across
    /// all tabled words: within each fingerprint class, every word is
    /// checked against a representative with the exact solver. Inversion is
    /// covered because the tables are closed under inverses.
    pub fn certify(&self) -> bool {
        let mut classes: HashMap<u64, &Word> = HashMap::new();
        for table in &self.tables {
            for e in table {
                match classes.entry(e.hash) {
                    std::collections::hash_map::Entry::Vacant(slot) => {
                        slot.insert(&e.word);
                    }
                    std::collections::hash_map::Entry::Occupied(slot) => {
                        let rep = slot.get();
                        let diff = rep.concat(&e.word.inverse()).free_reduce();
                        if !is_trivial_gamma(&diff).unwrap_or(false) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Index of table `len` by fingerprint.
    pub fn bucket(&self, len: usize) -> HashMap<u64, Vec<u32>> {
        let mut b: HashMap<u64, Vec<u32>> = HashMap::new();
        for (i, e) in self.tables[len].iter().enumerate() {
            b.entry(e.hash).or_default().push(i as u32);
        }
        b
    }
}

/// Calls `f` on every freely reduced nonempty word of length ≤ `max_len`
/// that is trivial in Γ, exhaustively, in order of increasing length. Every
/// reported word is confirmed by the exact solver.
pub fn for_each_trivial_word(max_len: usize, f: &mut impl FnMut(&Word)) {
    let half = max_len.div_ceil(2);
    let tables = HalfTables::build(half);

    // Short lengths: filter the enumeration directly.
    for table in tables.tables.iter().take(half + 1).skip(1) {
        for e in table {
            if is_trivial_gamma(&e.word).unwrap() {
                f(&e.word);
            }
        }
    }

    // Longer lengths: join half words by fingerprint.
    let mut buckets: HashMap<usize, HashMap<u64, Vec<u32>>> = HashMap::new();
    for len in (half + 1)..=max_len {
        let l1 = len.div_ceil(2);
        let l2 = len - l1;
        let bucket = buckets.entry(l1).or_insert_with(|| tables.bucket(l1));
        for v in &tables.tables[l2] {
            let Some(cands) = bucket.get(&v.inv_hash) else { continue };
            let v_first = v.word.letter(0);
            for &ui in cands {
                let u = &tables.tables[l1][ui as usize];
                let u_last = u.word.letter(u.word.len() - 1);
                if u_last == v_first.inverse() {
                    continue; // would cancel at the seam
                }
                let w = u.word.concat(&v.word);
                debug_assert!(w.is_freely_reduced());
                if is_trivial_gamma(&w).unwrap() {
                    f(&w);
                }
            }
        }
    }
}
