//! Exact integer matrices and division-free determinants.

mod berkowitz;
pub mod ring;

use std::collections::HashMap;

pub use berkowitz::{adjugate, characteristic_polynomial, EvalMode};
pub use num_bigint::BigInt;
use num_traits::{One, Zero};
use ring::Integers;

use crate::error::{Error, Result};

/// Largest dimension accepted by [`BigMatrix::det_naive`].
pub const NAIVE_LIMIT: usize = 10;

/// Square matrix of exact integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl BigMatrix {
    pub fn new(n: usize, entries: Vec<BigInt>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("matrix dimension must be at least 1"));
        }
        if entries.len() != n * n {
            return Err(Error::param(format!("{} entries for a {n}x{n} matrix", entries.len())));
        }
        Ok(BigMatrix { n, entries })
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::param("matrix is not square"));
        }
        Self::new(n, rows.iter().flatten().cloned().map(Into::into).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![BigInt::zero(); n * n])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.n + j] = v;
    }

    /// `A - lambda I`.
    pub fn shifted(&self, lambda: &BigInt) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.entries[i * self.n + i] -= lambda;
        }
        m
    }

    /// Drops one row and one column.
    pub fn minor(&self, drop_row: usize, drop_col: usize) -> Result<Self> {
        let n = self.n;
        if n < 2 {
            return Err(Error::param("minor of a 1x1 matrix"));
        }
        if drop_row >= n || drop_col >= n {
            return Err(Error::param(format!("minor ({drop_row}, {drop_col}) out of range for n = {n}")));
        }
        let entries = (0..n)
            .filter(|&i| i != drop_row)
            .flat_map(|i| {
                (0..n).filter(move |&j| j != drop_col).map(move |j| self.entries[i * n + j].clone())
            })
            .collect();
        Self::new(n - 1, entries)
    }

    pub fn det_berkowitz(&self) -> BigInt {
        self.det_berkowitz_with(EvalMode::Sequential)
    }

    pub fn det_berkowitz_with(&self, mode: EvalMode) -> BigInt {
        self.characteristic_coefficients_with(mode).pop().expect("n + 1 coefficients")
    }

    /// `p_0..p_n` with `det(A - x I) = sum_i p_i x^(n - i)`.
    pub fn characteristic_coefficients(&self) -> Vec<BigInt> {
        self.characteristic_coefficients_with(EvalMode::Sequential)
    }

    pub fn characteristic_coefficients_with(&self, mode: EvalMode) -> Vec<BigInt> {
        characteristic_polynomial(&Integers, self.n, &self.entries, mode)
    }

    pub fn adjugate(&self) -> BigMatrix {
        let p = self.characteristic_coefficients();
        let entries = adjugate(&Integers, self.n, &self.entries, &p);
        BigMatrix { n: self.n, entries }
    }

    /// Laplace expansion along the top row, memoised over column subsets.
    pub fn det_naive(&self) -> Result<BigInt> {
        let n = self.n;
        if n > NAIVE_LIMIT {
            return Err(Error::TooLarge { vertices: n, limit: NAIVE_LIMIT });
        }
        let mut memo = HashMap::new();
        Ok(self.expand(0, (1u32 << n) - 1, &mut memo))
    }

    fn expand(&self, row: usize, cols: u32, memo: &mut HashMap<u32, BigInt>) -> BigInt {
        if cols == 0 {
            return BigInt::one();
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut total = BigInt::zero();
        let mut position = 0;
        for j in 0..self.n {
            if cols & (1 << j) == 0 {
                continue;
            }
            let a = &self.entries[row * self.n + j];
            if !a.is_zero() {
                let sub = self.expand(row + 1, cols & !(1 << j), memo);
                if position % 2 == 0 {
                    total += a * sub;
                } else {
                    total -= a * sub;
                }
            }
            position += 1;
        }
        memo.insert(cols, total.clone());
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::RandBigInt;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, bits: u64) -> BigMatrix {
        let entries = (0..n * n).map(|_| rng.gen_bigint(bits)).collect();
        BigMatrix::new(n, entries).unwrap()
    }

    fn random_antisymmetric(rng: &mut ChaCha8Rng, n: usize) -> BigMatrix {
        let mut m = BigMatrix::zeros(n).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_bigint(40);
                m.set(j, i, -&v);
                m.set(i, j, v);
            }
        }
        m
    }

    #[test]
    fn base_cases() {
        let m = BigMatrix::from_rows(&[vec![-7]]).unwrap();
        assert_eq!(m.det_berkowitz(), BigInt::from(-7));
        let w = 100u32;
        let x = BigInt::one() << w;
        let m = BigMatrix::from_rows(&[vec![BigInt::zero(), x.clone()], vec![-x, BigInt::zero()]]).unwrap();
        assert_eq!(m.det_berkowitz(), BigInt::one() << (2 * w));
    }

    #[test]
    fn naive_examples() {
        assert_eq!(BigMatrix::identity(4).unwrap().det_naive().unwrap(), BigInt::one());
        let m = BigMatrix::from_rows(&[vec![1, 2, 3], vec![4, 5, 6], vec![1, 2, 3]]).unwrap();
        assert!(m.det_naive().unwrap().is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(random_antisymmetric(&mut rng, 5).det_naive().unwrap().is_zero());
        assert!(matches!(BigMatrix::zeros(11).unwrap().det_naive(), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn characteristic_examples() {
        let c = BigMatrix::identity(2).unwrap().characteristic_coefficients();
        assert_eq!(c, vec![BigInt::from(1), BigInt::from(-2), BigInt::from(1)]);
        let c = BigMatrix::zeros(3).unwrap().characteristic_coefficients();
        assert_eq!(c, vec![BigInt::from(-1), BigInt::zero(), BigInt::zero(), BigInt::zero()]);
    }

    #[test]
    fn minor_examples() {
        let m = BigMatrix::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(m.minor(0, 0).unwrap(), BigMatrix::from_rows(&[vec![4]]).unwrap());
        let i3 = BigMatrix::identity(3).unwrap();
        assert_eq!(i3.minor(1, 1).unwrap(), BigMatrix::identity(2).unwrap());
        assert!(i3.minor(3, 0).is_err());
        assert!(BigMatrix::identity(1).unwrap().minor(0, 0).is_err());
    }

    #[test]
    fn minors_are_cofactors_and_adjugate_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..=6 {
            let m = random_matrix(&mut rng, n, 20);
            let adj = m.adjugate();
            let mut expansion = BigInt::zero();
            for j in 0..n {
                let minor = m.minor(0, j).unwrap().det_naive().unwrap();
                let cofactor = if j % 2 == 0 { minor.clone() } else { -minor.clone() };
                expansion += m.get(0, j) * &cofactor;
                for i in 0..n {
                    let mij = m.minor(i, j).unwrap().det_berkowitz();
                    let sign = if (i + j) % 2 == 0 { mij.clone() } else { -mij };
                    assert_eq!(adj.get(j, i), &sign);
                }
            }
            assert_eq!(expansion, m.det_naive().unwrap());
        }
    }

    #[test]
    fn modes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=9 {
            let m = random_matrix(&mut rng, n, 70);
            assert_eq!(
                m.characteristic_coefficients_with(EvalMode::Sequential),
                m.characteristic_coefficients_with(EvalMode::Parallel)
            );
        }
    }

    #[test]
    fn antisymmetric_even_is_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let n = 2 * rng.gen_range(1..=5);
            let d = random_antisymmetric(&mut rng, n).det_berkowitz();
            assert!(d >= BigInt::zero());
            let r = d.sqrt();
            assert_eq!(&r * &r, d);
        }
    }

    proptest! {
        #[test]
        fn berkowitz_matches_laplace(seed in any::<u64>(), n in 1usize..=7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, n, 65);
            prop_assert_eq!(m.det_berkowitz(), m.det_naive().unwrap());
        }

        #[test]
        fn constant_term_is_determinant(seed in any::<u64>(), n in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, n, 30);
            let p = m.characteristic_coefficients();
            prop_assert_eq!(&p[n], &m.det_naive().unwrap());
            prop_assert_eq!(&p[0], &BigInt::from(if n % 2 == 0 { 1 } else { -1 }));
        }
    }
}
