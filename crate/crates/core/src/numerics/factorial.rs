//! The factorial-like exponent functions `f_P` and `f_SP`.
//!
//! Both return a factorial, so every fixed integer eventually divides their
//! values. `f_P(n)` is the largest factorial at most `n`; `f_SP(n)` the largest
//! factorial at most `2^(⌈log₂ n⌉²)`, a super-polynomial, sub-exponential
//! threshold evaluated exactly.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Largest `k!` with `k! <= bound`. `bound` must be positive.
fn largest_factorial_at_most(bound: &BigUint) -> BigUint {
    assert!(
        !bound.is_zero(),
        "factorial-like functions are defined for n >= 1"
    );
    let mut k = BigUint::one();
    let mut fact = BigUint::one();
    loop {
        let next_k = &k + 1u32;
        let next = &fact * &next_k;
        if &next > bound {
            return fact;
        }
        fact = next;
        k = next_k;
    }
}

/// `⌈log₂ n⌉` for `n >= 1`.
pub fn ceil_log2(n: &BigUint) -> u64 {
    assert!(!n.is_zero());
    let bits = n.bits();
    if n.count_ones() == 1 {
        bits - 1
    } else {
        bits
    }
}

/// Polynomial schedule: the largest factorial `<= n`. Panics on `n = 0`.
pub fn f_p(n: &BigUint) -> BigUint {
    largest_factorial_at_most(n)
}

/// `2^(⌈log₂ n⌉²)`, the exact stand-in for `n^(log₂ n)`.
pub fn superpolynomial_threshold(n: &BigUint) -> BigUint {
    let l = ceil_log2(n);
    BigUint::one() << (l * l)
}

/// Super-polynomial schedule: the largest factorial `<= 2^(⌈log₂ n⌉²)`. Panics on `n = 0`.
pub fn f_sp(n: &BigUint) -> BigUint {
    largest_factorial_at_most(&superpolynomial_threshold(n))
}

pub fn f_p_u64(n: u64) -> BigUint {
    f_p(&BigUint::from(n))
}

pub fn f_sp_u64(n: u64) -> BigUint {
    f_sp(&BigUint::from(n))
}
