//! Banded matrices with in-place LU factorization.
//!
//! Row `i` stores columns `i - kl ..= i + ku + kl`; the extra `kl`
//! superdiagonals hold fill-in from row interchanges. Multipliers are kept
//! in place and interchanges are replayed during the solve, so earlier
//! columns of `L` are never permuted.

use super::{FemError, Scalar};

/// Pivoting strategy for [`BandedSystem::factorize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pivoting {
    /// For symmetric positive definite forms (mass, stiffness, projections).
    None,
    /// For the non-Hermitian step matrices.
    Partial,
}

#[derive(Debug, Clone, PartialEq)]
enum State {
    Unfactored,
    Lu { pivots: Vec<usize> },
}

/// Square banded matrix with `kl` sub- and `ku` superdiagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSystem<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
    state: State,
}

/// Smallest acceptable `|u_ii| / max|u_jj|` before a factorization is
/// reported as ill-conditioned.
const PIVOT_RATIO_FLOOR: f64 = 1e-14;

impl<T: Scalar> BandedSystem<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandedSystem {
            n,
            kl,
            ku,
            width,
            data: vec![T::zero(); n * width],
            state: State::Unfactored,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, 0, 0);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    pub fn is_factored(&self) -> bool {
        matches!(self.state, State::Lu { .. })
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> T {
        assert!(
            !self.is_factored(),
            "entries of a factored matrix are LU data"
        );
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            T::zero()
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(
            self.in_band(i, j),
            "({i},{j}) outside band ({},{})",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(self.in_band(i, j), "({i},{j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// `self += alpha * other`; `other` must fit inside this band.
    pub fn add_scaled<S: Scalar>(&mut self, alpha: T, other: &BandedSystem<S>)
    where
        T: From<S>,
    {
        assert_eq!(self.n, other.n);
        assert!(other.kl <= self.kl && other.ku <= self.ku);
        assert!(!self.is_factored() && !other.is_factored());
        for i in 0..self.n {
            let lo = i.saturating_sub(other.kl);
            let hi = (i + other.ku).min(self.n - 1);
            for j in lo..=hi {
                let v = other.data[other.idx(i, j)];
                self.add(i, j, alpha * T::from(v));
            }
        }
    }

    /// Same matrix, stored with wider bands.
    pub fn widened(&self, kl: usize, ku: usize) -> Self {
        assert!(kl >= self.kl && ku >= self.ku && !self.is_factored());
        let mut m = Self::zeros(self.n, kl, ku);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            for j in lo..=hi {
                m.set(i, j, self.data[self.idx(i, j)]);
            }
        }
        m
    }

    /// `A x`.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert!(!self.is_factored());
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                let mut acc = T::zero();
                for (j, xj) in x.iter().enumerate().take(hi + 1).skip(lo) {
                    acc += self.data[self.idx(i, j)] * *xj;
                }
                acc
            })
            .collect()
    }

    /// `x^H A y` (sesquilinear in the first argument).
    pub fn form(&self, x: &[T], y: &[T]) -> T {
        let ay = self.matvec(y);
        x.iter()
            .zip(ay)
            .fold(T::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    /// Factorizes in place. A failed factorization leaves the matrix unusable.
    pub fn factorize(&mut self, pivoting: Pivoting) -> Result<(), FemError> {
        if self.is_factored() {
            return Ok(());
        }
        let n = self.n;
        let kl = self.kl;
        let uw = self.ku + self.kl; // upper bandwidth of U after fill
        let scale = self.max_abs();
        if scale == 0.0 && n > 0 {
            return Err(FemError::Singular { index: 0 });
        }
        let tiny = scale * f64::EPSILON * (n.max(1) as f64);
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            if pivoting == Pivoting::Partial {
                let mut best = self.data[self.idx(k, k)].modulus();
                for i in k + 1..=last_row {
                    let m = self.data[self.idx(i, k)].modulus();
                    if m > best {
                        best = m;
                        p = i;
                    }
                }
            }
            pivots[k] = p;
            let last_col = (k + uw).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let a = self.idx(k, j);
                    let b = self.idx(p, j);
                    self.data.swap(a, b);
                }
            }
            let piv = self.data[self.idx(k, k)];
            if !(piv.modulus() > tiny) {
                return Err(FemError::Singular { index: k });
            }
            for i in k + 1..=last_row {
                let ik = self.idx(i, k);
                let l = self.data[ik] / piv;
                self.data[ik] = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..=last_col {
                    let kj = self.data[self.idx(k, j)];
                    let ij = self.idx(i, j);
                    self.data[ij] -= l * kj;
                }
            }
        }
        let (mut umin, mut umax) = (f64::INFINITY, 0.0f64);
        for k in 0..n {
            let d = self.data[self.idx(k, k)].modulus();
            umin = umin.min(d);
            umax = umax.max(d);
        }
        if n > 0 && umin < PIVOT_RATIO_FLOOR * umax {
            return Err(FemError::IllConditioned { ratio: umin / umax });
        }
        self.state = State::Lu { pivots };
        Ok(())
    }

    /// Solves `A x = rhs` with a factored matrix.
    pub fn solve_factored(&self, rhs: &[T]) -> Result<Vec<T>, FemError> {
        let State::Lu { pivots } = &self.state else {
            return Err(FemError::NotFactored);
        };
        assert_eq!(rhs.len(), self.n);
        let n = self.n;
        let mut x = rhs.to_vec();
        for k in 0..n {
            let p = pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for i in k + 1..=(k + self.kl).min(n.saturating_sub(1)) {
                let l = self.data[self.idx(i, k)];
                x[i] -= l * xk;
            }
        }
        let uw = self.ku + self.kl;
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..=(i + uw).min(n - 1) {
                acc -= self.data[self.idx(i, j)] * x[j];
            }
            x[i] = acc / self.data[self.idx(i, i)];
        }
        Ok(x)
    }
}

impl<T: Scalar> BandedSystem<T> {
    /// Dense copy, for tests and small diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Solves `system · x = rhs`, factorizing a copy when needed.
pub fn solve<T: Scalar>(
    system: &BandedSystem<T>,
    rhs: &[T],
    pivoting: Pivoting,
) -> Result<Vec<T>, FemError> {
    if system.is_factored() {
        return system.solve_factored(rhs);
    }
    let mut lu = system.clone();
    lu.factorize(pivoting)?;
    lu.solve_factored(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::C64;

    fn norm<T: Scalar>(v: &[T]) -> f64 {
        v.iter().map(|x| x.modulus().powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn identity_returns_rhs() {
        let a = BandedSystem::<f64>::identity(5);
        let b = vec![1.0, -2.0, 3.0, 0.5, 7.0];
        assert_eq!(solve(&a, &b, Pivoting::None).unwrap(), b);
    }

    #[test]
    fn tridiagonal_spd_no_pivot() {
        let n = 50;
        let mut a = BandedSystem::<f64>::zeros(n, 1, 1);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i > 0 {
                a.set(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b = a.matvec(&x);
        let got = solve(&a, &b, Pivoting::None).unwrap();
        let err: Vec<f64> = got.iter().zip(&x).map(|(g, w)| g - w).collect();
        assert!(norm(&err) < 1e-10);
    }

    #[test]
    fn partial_pivoting_handles_zero_diagonal() {
        // [[0,1],[1,0]] needs a row swap
        let mut a = BandedSystem::<C64>::zeros(2, 1, 1);
        a.set(0, 1, C64::new(1.0, 0.0));
        a.set(1, 0, C64::new(1.0, 0.0));
        assert!(solve(&a, &[C64::new(1.0, 0.0); 2], Pivoting::None).is_err());
        let x = solve(
            &a,
            &[C64::new(2.0, 0.0), C64::new(3.0, 1.0)],
            Pivoting::Partial,
        )
        .unwrap();
        assert_eq!(x, vec![C64::new(3.0, 1.0), C64::new(2.0, 0.0)]);
    }

    #[test]
    fn singular_is_reported() {
        let mut a = BandedSystem::<f64>::zeros(3, 1, 1);
        a.set(0, 0, 1.0);
        a.set(1, 1, 1.0);
        let err = solve(&a, &[1.0, 1.0, 1.0], Pivoting::Partial).unwrap_err();
        assert!(matches!(err, FemError::Singular { index: 2 }));
    }

    #[test]
    fn solve_before_factorize_is_an_error() {
        let a = BandedSystem::<f64>::identity(2);
        assert!(matches!(
            a.solve_factored(&[1.0, 1.0]),
            Err(FemError::NotFactored)
        ));
    }
}
