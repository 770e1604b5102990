//! Small named monoids used by the CLI keywords and the test sweeps.

use super::FiniteMonoid;
use crate::error::{Error, Result};

pub fn trivial() -> FiniteMonoid {
    FiniteMonoid::from_flat_unchecked(1, vec![0], 0)
}

/// `ℤ/k` under addition.
pub fn cyclic(k: usize) -> FiniteMonoid {
    assert!(k >= 1);
    FiniteMonoid::from_fn(k, 0, |a, b| (a + b) % k).expect("cyclic group table")
}

/// The chain semilattice `0 > 1 > … > k-1` with product `max`; `0` is the identity.
pub fn chain(k: usize) -> FiniteMonoid {
    assert!(k >= 1);
    FiniteMonoid::from_fn(k, 0, usize::max).expect("chain table")
}

/// `{e, a, …, a^(k-1), 0}` with `a^k = 0` absorbing; `e = 0`, `a^i = i`, zero `= k`.
pub fn nilpotent(k: usize) -> FiniteMonoid {
    assert!(k >= 1);
    FiniteMonoid::from_fn(k + 1, 0, |i, j| (i + j).min(k)).expect("nilpotent table")
}

/// The monogenic monoid `⟨a | a^(index+period) = a^index⟩`; `e = 0`, `a^i = i`.
pub fn monogenic(index: usize, period: usize) -> FiniteMonoid {
    assert!(index >= 1 && period >= 1);
    let top = index + period;
    let reduce = move |n: usize| if n < top { n } else { index + (n - index) % period };
    FiniteMonoid::from_fn(top, 0, move |i, j| reduce(i + j)).expect("monogenic table")
}

/// The flip-flop monoid: two right zeros `a = 1`, `b = 2` (`xy = y`) with identity `0` adjoined.
/// It is the smallest non-commutative monoid.
pub fn flipflop1() -> FiniteMonoid {
    FiniteMonoid::from_fn(3, 0, |x, y| if x == 0 { y } else if y == 0 { x } else { y })
        .expect("flip-flop table")
}

/// Words of length ≤ 2 over `{a, b}` with every longer word collapsed to an absorbing zero.
/// Indices: `e, a, b, aa, ab, ba, bb, 0`.
pub fn truncated_free2() -> FiniteMonoid {
    const WORDS: [&str; 7] = ["", "a", "b", "aa", "ab", "ba", "bb"];
    let zero = WORDS.len();
    FiniteMonoid::from_fn(zero + 1, 0, |x, y| {
        if x == zero || y == zero {
            return zero;
        }
        let w = format!("{}{}", WORDS[x], WORDS[y]);
        WORDS.iter().position(|&v| v == w).unwrap_or(zero)
    })
    .expect("truncated free monoid table")
}

/// Resolves a keyword such as `cyclic:3`, `semilattice:chain:4`, `flipflop1`, `trivial`,
/// `nilpotent:2`, `monogenic:2:1` or `truncated-free2`.
pub fn by_name(name: &str) -> Result<FiniteMonoid> {
    let parts: Vec<&str> = name.split(':').collect();
    let num = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .ok()
            .filter(|&k| k >= 1)
            .ok_or_else(|| Error::Validation(format!("bad parameter `{s}` in `{name}`")))
    };
    match parts.as_slice() {
        ["trivial"] => Ok(trivial()),
        ["cyclic", k] => Ok(cyclic(num(k)?)),
        ["semilattice", "chain", k] => Ok(chain(num(k)?)),
        ["nilpotent", k] => Ok(nilpotent(num(k)?)),
        ["monogenic", i, p] => Ok(monogenic(num(i)?, num(p)?)),
        ["flipflop1"] => Ok(flipflop1()),
        ["truncated-free2"] => Ok(truncated_free2()),
        _ => Err(Error::Validation(format!("unknown monoid keyword `{name}`"))),
    }
}
