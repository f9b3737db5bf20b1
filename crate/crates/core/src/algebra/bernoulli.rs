//! Bernoulli numbers with the `y/(e^y - 1)` convention (`B_1 = -1/2`).

use num_traits::Zero;

use super::rational::{binomial, int, Rational};

/// `B_0, ..., B_n` from the recursion `sum_{j<=m} C(m+1, j) B_j = 0`.
pub fn bernoulli_table(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(int(1));
    for m in 1..=n {
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += bj * Rational::from_integer(binomial(m as u32 + 1, j as u32));
        }
        b.push(-acc / int(m as i64 + 1));
    }
    b
}

pub fn bernoulli(n: usize) -> Rational {
    bernoulli_table(n).pop().expect("table has n+1 entries")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    // independent oracle: B_n from sum_{j<n} C(n, j) B_j = 0 read as an equation
    // for B_{n-1}, n >= 2
    fn oracle(n: usize) -> Rational {
        let mut b = vec![int(1)];
        for m in 2..=n + 1 {
            let mut acc = Rational::zero();
            for (j, bj) in b.iter().enumerate() {
                acc += bj * Rational::from_integer(binomial(m as u32, j as u32));
            }
            let c = Rational::from_integer(binomial(m as u32, m as u32 - 1));
            b.push(-acc / c);
        }
        b[n].clone()
    }

    #[test]
    fn known_values() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn odd_vanish() {
        for n in [3, 5, 7, 9, 11] {
            assert!(bernoulli(n).is_zero(), "B_{n}");
        }
    }

    #[test]
    fn matches_oracle() {
        let t = bernoulli_table(16);
        for (n, b) in t.iter().enumerate() {
            assert_eq!(*b, oracle(n), "B_{n}");
        }
    }
}
