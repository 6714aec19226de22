//! Factorials, multinomial coefficients and enumeration of compositions.

use crate::scalar::Scalar;

pub fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_usize(k))
}

/// Binomial coefficient with a non-negative integer top.
pub fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(T::one(), |acc, i| {
        acc * T::from_usize(n - i) / T::from_usize(i + 1)
    })
}

/// Generalised binomial coefficient `x (x-1) ... (x-k+1) / k!` for any scalar top.
pub fn binomial_general<T: Scalar>(x: &T, k: usize) -> T {
    falling(x, k) / factorial::<T>(k)
}

/// Rising factorial `x (x+1) ... (x+k-1)`.
pub fn rising<T: Scalar>(x: &T, k: usize) -> T {
    (0..k).fold(T::one(), |acc, i| acc * (x.clone() + T::from_usize(i)))
}

/// Falling factorial `x (x-1) ... (x-k+1)`.
pub fn falling<T: Scalar>(x: &T, k: usize) -> T {
    (0..k).fold(T::one(), |acc, i| acc * (x.clone() - T::from_usize(i)))
}

/// Multinomial coefficient `(sum parts)! / prod parts!`.
pub fn multinomial<T: Scalar>(parts: &[usize]) -> T {
    let mut total = 0usize;
    let mut acc = T::one();
    for &p in parts {
        for i in 1..=p {
            total += 1;
            acc = acc * T::from_usize(total) / T::from_usize(i);
        }
    }
    acc
}

/// All vectors of `parts` non-negative integers summing to `total`, in
/// ascending lexicographic order.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0usize; parts];
    fill(total, 0, &mut cur, &mut out);
    out
}

fn fill(remaining: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    for v in 0..=remaining {
        cur[pos] = v;
        fill(remaining - v, pos + 1, cur, out);
    }
}

/// All vectors of length `len` with entry sum at most `max_total`, in
/// graded order (by total, then ascending lexicographic).
pub fn bounded_indices(len: usize, max_total: usize) -> Vec<Vec<usize>> {
    (0..=max_total)
        .flat_map(|t| compositions(t, len))
        .collect()
}

pub fn count_compositions(total: usize, parts: usize) -> usize {
    if parts == 0 {
        return usize::from(total == 0);
    }
    // C(total + parts - 1, parts - 1) without overflow for desk-scale sizes.
    let n = total + parts - 1;
    let k = (parts - 1).min(total);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Elementary symmetric polynomials `e_0..=e_max` of `values`.
pub fn elementary_symmetric<T: Scalar>(values: &[T], max: usize) -> Vec<T> {
    let mut e = vec![T::zero(); max + 1];
    e[0] = T::one();
    for v in values {
        for k in (1..=max).rev() {
            let add = e[k - 1].clone() * v.clone();
            e[k] = e[k].clone() + add;
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn multinomial_small_cases() {
        assert_eq!(multinomial::<Rational>(&[1, 1, 0]), rat(2, 1));
        assert_eq!(multinomial::<Rational>(&[2, 1, 1]), rat(12, 1));
        assert_eq!(multinomial::<Rational>(&[]), rat(1, 1));
    }

    #[test]
    fn composition_counts_match_enumeration() {
        for total in 0..6 {
            for parts in 1..5 {
                let c = compositions(total, parts);
                assert_eq!(c.len(), count_compositions(total, parts));
                assert!(c.iter().all(|v| v.iter().sum::<usize>() == total));
                assert!(c.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn generalised_binomial_negative_top() {
        // C(-3, 2) = (-3)(-4)/2 = 6
        assert_eq!(binomial_general(&rat(-3, 1), 2), rat(6, 1));
        assert_eq!(binomial::<Rational>(5, 2), rat(10, 1));
        assert_eq!(rising(&rat(1, 2), 3), rat(15, 8));
    }

    #[test]
    fn elementary_symmetric_of_three() {
        let e = elementary_symmetric(&[rat(1, 1), rat(2, 1), rat(3, 1)], 3);
        assert_eq!(e, vec![rat(1, 1), rat(6, 1), rat(11, 1), rat(6, 1)]);
    }
}
