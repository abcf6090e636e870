#![allow(dead_code)]

//! Shared test support: an exhaustive single-relation rewriting oracle for
//! normal forms, independent of the merge-based implementation under test,
//! plus small helpers.

use std::sync::RwLock;

use thompson::words::{Letter, NormalForm, Sign, Word};
use thompson::Dyadic;

/// Concurrency gate for timing-sensitive tests: measurement tests take the
/// write side and so run alone; everything else holds a read guard and
/// parallelizes freely.
pub static TIMING_GATE: RwLock<()> = RwLock::new(());

pub fn quiet_machine() -> std::sync::RwLockWriteGuard<'static, ()> {
    TIMING_GATE.write().unwrap_or_else(|e| e.into_inner())
}

pub fn shared_machine() -> std::sync::RwLockReadGuard<'static, ()> {
    TIMING_GATE.read().unwrap_or_else(|e| e.into_inner())
}

pub fn dy(num: i64, scale: i64) -> Dyadic {
    Dyadic::new(num, scale).unwrap()
}

/// Normal form by brute-force rewriting: apply the first applicable rewrite
/// anywhere in the letter list, restart, and repeat to a fixpoint. The rules
/// are free cancellation, pushing inverse letters right past positive ones,
/// sorting each block, and the global pair deletion with its conjugation
/// shift. Only suitable for short words.
pub fn oracle_normal_form(w: &Word) -> NormalForm {
    let mut ls: Vec<Letter> = w.letters.clone();
    let mut steps = 0usize;
    loop {
        steps += 1;
        assert!(steps < 1_000_000, "oracle failed to terminate");
        if free_cancel(&mut ls)
            || push_negative_right(&mut ls)
            || sort_positives(&mut ls)
            || sort_negatives(&mut ls)
            || global_reduction(&mut ls)
        {
            continue;
        }
        break;
    }
    let split = ls
        .iter()
        .position(|l| l.sign == Sign::Minus)
        .unwrap_or(ls.len());
    let pos: Vec<u32> = ls[..split].iter().map(|l| l.index).collect();
    let mut neg: Vec<u32> = ls[split..].iter().map(|l| l.index).collect();
    neg.reverse();
    NormalForm::from_parts(pos, neg).expect("oracle output is a normal form")
}

fn free_cancel(ls: &mut Vec<Letter>) -> bool {
    for i in 0..ls.len().saturating_sub(1) {
        if ls[i].index == ls[i + 1].index && ls[i].sign != ls[i + 1].sign {
            ls.drain(i..=i + 1);
            return true;
        }
    }
    false
}

fn push_negative_right(ls: &mut [Letter]) -> bool {
    for i in 0..ls.len().saturating_sub(1) {
        let (l, r) = (ls[i], ls[i + 1]);
        if l.sign == Sign::Minus && r.sign == Sign::Plus {
            let (a, b) = (l.index, r.index);
            if a < b {
                // x_a^-1 x_b = x_{b+1} x_a^-1
                ls[i] = Letter::positive(b + 1);
                ls[i + 1] = Letter::negative(a);
                return true;
            }
            if a > b {
                // x_a^-1 x_b = x_b x_{a+1}^-1
                ls[i] = Letter::positive(b);
                ls[i + 1] = Letter::negative(a + 1);
                return true;
            }
        }
    }
    false
}

fn sort_positives(ls: &mut [Letter]) -> bool {
    for i in 0..ls.len().saturating_sub(1) {
        let (l, r) = (ls[i], ls[i + 1]);
        if l.sign == Sign::Plus && r.sign == Sign::Plus && l.index > r.index {
            // x_a x_b = x_b x_{a+1} for a > b
            ls[i] = Letter::positive(r.index);
            ls[i + 1] = Letter::positive(l.index + 1);
            return true;
        }
    }
    false
}

fn sort_negatives(ls: &mut [Letter]) -> bool {
    for i in 0..ls.len().saturating_sub(1) {
        let (l, r) = (ls[i], ls[i + 1]);
        if l.sign == Sign::Minus && r.sign == Sign::Minus && l.index < r.index {
            // x_a^-1 x_b^-1 = x_{b+1}^-1 x_a^-1 for a < b
            ls[i] = Letter::negative(r.index + 1);
            ls[i + 1] = Letter::negative(l.index);
            return true;
        }
    }
    false
}

/// On a sorted seesaw word, deletes the innermost `x_i ... x_i^{-1}` pair
/// when index `i+1` occurs nowhere, decrementing the letters in between.
fn global_reduction(ls: &mut Vec<Letter>) -> bool {
    let occurs = |ls: &[Letter], i: u32| ls.iter().any(|l| l.index == i);
    let candidates: Vec<u32> = ls
        .iter()
        .filter(|l| l.sign == Sign::Plus)
        .map(|l| l.index)
        .collect();
    for i in candidates {
        if !ls.iter().any(|l| l.sign == Sign::Minus && l.index == i) {
            continue;
        }
        if occurs(ls, i + 1) {
            continue;
        }
        let p = ls
            .iter()
            .rposition(|l| l.sign == Sign::Plus && l.index == i)
            .unwrap();
        let q = ls
            .iter()
            .position(|l| l.sign == Sign::Minus && l.index == i)
            .unwrap();
        assert!(p < q, "word is not in seesaw order");
        for l in &mut ls[p + 1..q] {
            assert!(l.index > i);
            l.index -= 1;
        }
        ls.remove(q);
        ls.remove(p);
        return true;
    }
    false
}

/// Deterministic word from raw (index, is_inverse) pairs.
pub fn word_from_pairs(pairs: &[(u32, bool)]) -> Word {
    Word::new(
        pairs
            .iter()
            .map(|&(i, inv)| {
                if inv {
                    Letter::negative(i)
                } else {
                    Letter::positive(i)
                }
            })
            .collect(),
    )
}
