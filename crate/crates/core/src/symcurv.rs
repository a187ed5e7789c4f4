//! Elementary symmetric functions of eigenvalues and matrices, Newton tensors
//! and the definiteness test behind ellipticity of the `sigma_{2k}` equation.

#[cfg(not(any(test, feature = "std")))]
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;

use crate::numerics::binomial;
use crate::{GeoError, Result};

/// Ambient dimension minus one (`n`) and Lovelock degree (`k`), with
/// `2 <= 2k <= n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DimensionPair {
    n: usize,
    k: usize,
}

impl DimensionPair {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 3 || k < 1 || 2 * k > n - 1 {
            return Err(GeoError::Domain(alloc::format!(
                "dimension pair (n = {n}, k = {k}) violates 2 <= 2k <= n - 1"
            )));
        }
        Ok(DimensionPair { n, k })
    }

    /// Every admissible pair with `n <= n_max`, ordered by `n` then `k`.
    pub fn all_up_to(n_max: usize) -> Vec<DimensionPair> {
        let mut out = Vec::new();
        for n in 3..=n_max {
            for k in 1..=(n - 1) / 2 {
                out.push(DimensionPair { n, k });
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `q = n/(2k) - 1` as an exact fraction.
    pub fn q_ratio(&self) -> Ratio<i64> {
        Ratio::new((self.n - 2 * self.k) as i64, 2 * self.k as i64)
    }

    pub fn q(&self) -> f64 {
        (self.n - 2 * self.k) as f64 / (2 * self.k) as f64
    }

    /// `n/k - 2`, the decay exponent of the potential (equal to `2q`).
    pub fn potential_exponent(&self) -> f64 {
        (self.n - 2 * self.k) as f64 / self.k as f64
    }

    /// `r^{n/k - 2}`, with an integer fast path when `k | n`.
    pub fn pow_potential(&self, r: f64) -> f64 {
        if self.n.is_multiple_of(self.k) {
            r.powi((self.n / self.k - 2) as i32)
        } else {
            (self.potential_exponent() * r.ln()).exp()
        }
    }

    /// `k / (n - 2k)`, the exponent taking `2m` to the horizon radius.
    pub fn horizon_exponent(&self) -> f64 {
        self.k as f64 / (self.n - 2 * self.k) as f64
    }
}

/// A real symmetric matrix, symmetrized exactly on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(GeoError::domain("symmetric matrix must be square"));
        }
        if !is_symmetric(&m, 1e-10) {
            return Err(GeoError::domain("matrix is not symmetric"));
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(SymmetricMatrix(sym))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymmetricMatrix(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

impl Deref for SymmetricMatrix {
    type Target = DMatrix<f64>;
    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

pub(crate) fn is_symmetric(m: &DMatrix<f64>, rel: f64) -> bool {
    let scale = m.amax().max(1.0);
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > rel * scale {
                return false;
            }
        }
    }
    true
}

/// All elementary symmetric functions `sigma_0 .. sigma_len` of the inputs,
/// adding one value at a time to the prefix polynomial.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (count, v) in values.iter().enumerate() {
        for j in (1..=count + 1).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e
}

/// `sigma_p` of a list of principal curvatures (or any reals).
pub fn sigma_p_eigen(kappas: &[f64], p: usize) -> Result<f64> {
    if p > kappas.len() {
        return Err(GeoError::Domain(alloc::format!(
            "sigma_{p} requested for {} values",
            kappas.len()
        )));
    }
    let mut e = vec![0.0; p + 1];
    e[0] = 1.0;
    for (count, v) in kappas.iter().enumerate() {
        for j in (1..=(count + 1).min(p)).rev() {
            e[j] += v * e[j - 1];
        }
    }
    Ok(e[p])
}

/// `sigma_0 .. sigma_order` of a square matrix: through the spectrum for
/// symmetric input, through the characteristic polynomial of the Hessenberg
/// form otherwise.
pub fn matrix_sigmas(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(GeoError::domain("sigma_p needs a square matrix"));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(vec![1.0]);
    }
    if is_symmetric(a, 1e-12) {
        let sym = (a + a.transpose()) * 0.5;
        let ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
        return Ok(elementary_symmetric(&ev));
    }
    let h = a.clone().hessenberg().h();
    // polys[i] holds det(lambda I - H[..i, ..i]) with coefficients low -> high.
    let mut polys: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    polys.push(vec![1.0]);
    for kk in 1..=n {
        let prev = &polys[kk - 1];
        let mut next = vec![0.0; kk + 1];
        for (d, c) in prev.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= h[(kk - 1, kk - 1)] * c;
        }
        let mut prod = 1.0;
        for i in (1..kk).rev() {
            prod *= h[(i, i - 1)];
            let coef = h[(i - 1, kk - 1)] * prod;
            if coef != 0.0 {
                for (d, c) in polys[i - 1].iter().enumerate() {
                    next[d] -= coef * c;
                }
            }
        }
        polys.push(next);
    }
    let char_poly = &polys[n];
    Ok((0..=n)
        .map(|p| if p % 2 == 0 { char_poly[n - p] } else { -char_poly[n - p] })
        .collect())
}

/// Sum of the principal minors of order `p`.
pub fn sigma_p_matrix(a: &DMatrix<f64>, p: usize) -> Result<f64> {
    if !a.is_square() {
        return Err(GeoError::domain("sigma_p needs a square matrix"));
    }
    if p > a.nrows() {
        return Err(GeoError::Domain(alloc::format!("sigma_{p} of an order-{} matrix", a.nrows())));
    }
    Ok(matrix_sigmas(a)?[p])
}

/// Direct principal-minor enumeration; the cross-check path for small orders.
pub fn sigma_p_minors(a: &DMatrix<f64>, p: usize) -> Result<f64> {
    if !a.is_square() {
        return Err(GeoError::domain("sigma_p needs a square matrix"));
    }
    let n = a.nrows();
    if p > n {
        return Err(GeoError::Domain(alloc::format!("sigma_{p} of an order-{n} matrix")));
    }
    if n > 16 {
        return Err(GeoError::domain("principal-minor enumeration limited to order 16"));
    }
    if p == 0 {
        return Ok(1.0);
    }
    let mut total = 0.0;
    let mut idx: Vec<usize> = (0..p).collect();
    loop {
        let sub = DMatrix::from_fn(p, p, |i, j| a[(idx[i], idx[j])]);
        total += sub.determinant();
        // next combination in lexicographic order
        let mut i = p;
        loop {
            if i == 0 {
                return Ok(total);
            }
            i -= 1;
            if idx[i] < n - p + i {
                idx[i] += 1;
                for j in (i + 1)..p {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// `N_p(A) = sigma_p I - sigma_{p-1} A + ... + (-1)^p A^p`, built by
/// `N_p = sigma_p I - A N_{p-1}` from `N_0 = I`.
pub fn newton_tensor(a: &DMatrix<f64>, p: usize) -> Result<DMatrix<f64>> {
    let sigmas = matrix_sigmas(a)?;
    let n = a.nrows();
    if p > n {
        return Err(GeoError::Domain(alloc::format!("N_{p} of an order-{n} matrix")));
    }
    if is_symmetric(a, 1e-12) {
        return Ok(newton_symmetric(a, p));
    }
    Ok(newton_from_sigmas(a, &sigmas, p))
}

/// `N_p` of a symmetric matrix from its eigendecomposition: the eigenvalue of
/// `N_p` on the `i`-th eigenvector is `sigma_p` of the other eigenvalues.
fn newton_symmetric(a: &DMatrix<f64>, p: usize) -> DMatrix<f64> {
    let eig = ((a + a.transpose()) * 0.5).symmetric_eigen();
    let ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let n = ev.len();
    let diag = DVector::from_fn(n, |i, _| {
        let rest: Vec<f64> = ev.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
        if p > rest.len() {
            0.0
        } else {
            elementary_symmetric(&rest)[p]
        }
    });
    let q = &eig.eigenvectors;
    q * DMatrix::from_diagonal(&diag) * q.transpose()
}

pub(crate) fn newton_from_sigmas(a: &DMatrix<f64>, sigmas: &[f64], p: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let mut acc = DMatrix::<f64>::identity(n, n);
    for j in 1..=p {
        let mut next = -(a * &acc);
        for i in 0..n {
            next[(i, i)] += sigmas[j];
        }
        acc = next;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DefiniteSign {
    Positive,
    Negative,
    Indefinite,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EllipticityVerdict {
    pub definite_sign: DefiniteSign,
    pub sigma_2k1: f64,
    /// Ascending eigenvalues of the symmetrized `N_{2k-1}(A)`.
    pub newton_eigenvalues: Vec<f64>,
}

impl EllipticityVerdict {
    /// Definite Newton tensor and nonzero `sigma_{2k+1}`, reported together.
    pub fn is_elliptic(&self) -> bool {
        self.definite_sign != DefiniteSign::Indefinite && self.sigma_2k1 != 0.0
    }
}

/// Classifies `N_{2k-1}(A)` by the signs of the eigenvalues of its
/// symmetric part. Eigenvalues below `1e-10` times the larger of the Newton
/// spectral radius and `sigma_{2k-1}` of the singular values of `A` count as zero.
pub fn is_elliptic(a: &DMatrix<f64>, k: usize) -> Result<EllipticityVerdict> {
    if k == 0 || 2 * k - 1 > a.nrows() {
        return Err(GeoError::Domain(alloc::format!("N_(2k-1) with k = {k} on an order-{} matrix", a.nrows())));
    }
    let sigmas = matrix_sigmas(a)?;
    let newton = if is_symmetric(a, 1e-12) {
        newton_symmetric(a, 2 * k - 1)
    } else {
        newton_from_sigmas(a, &sigmas, 2 * k - 1)
    };
    let sym = (&newton + newton.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    let radius = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let singular: Vec<f64> = a.singular_values().iter().copied().collect();
    let tol = 1e-10 * radius.max(elementary_symmetric(&singular)[2 * k - 1]);
    let definite_sign = if ev.iter().all(|v| *v > tol) {
        DefiniteSign::Positive
    } else if ev.iter().all(|v| *v < -tol) {
        DefiniteSign::Negative
    } else {
        DefiniteSign::Indefinite
    };
    let sigma_2k1 = sigmas.get(2 * k + 1).copied().unwrap_or(0.0);
    Ok(EllipticityVerdict { definite_sign, sigma_2k1, newton_eigenvalues: ev })
}

/// `sigma_p` of a diagonal-with-multiplicity spectrum `(x, ..., x, y)` with
/// `x` repeated `n - 1` times.
pub(crate) fn sigma_p_rotational_spectrum(x: f64, y: f64, n: usize, p: usize) -> f64 {
    if p == 0 {
        return 1.0;
    }
    binomial(n - 1, p) * x.powi(p as i32) + binomial(n - 1, p - 1) * y * x.powi(p as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Subset-sum oracle.
    fn brute_sigma(values: &[f64], p: usize) -> f64 {
        let n = values.len();
        (0u32..(1 << n))
            .filter(|mask| mask.count_ones() as usize == p)
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(|i| values[i]).product::<f64>())
            .sum()
    }

    fn perm_sign(perm: &[usize]) -> f64 {
        let mut sign = 1.0;
        for i in 0..perm.len() {
            for j in (i + 1)..perm.len() {
                if perm[i] > perm[j] {
                    sign = -sign;
                }
            }
        }
        sign
    }

    fn permutations(p: usize) -> Vec<Vec<usize>> {
        if p == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for rest in permutations(p - 1) {
            for pos in 0..=rest.len() {
                let mut v = rest.clone();
                v.insert(pos, p - 1);
                out.push(v);
            }
        }
        out
    }

    /// Generalized Kronecker delta contraction `(1/p!) sum delta^{I}_{J} A_{i1 j1} ... A_{ip jp}`.
    fn kronecker_sigma(a: &DMatrix<f64>, p: usize) -> f64 {
        let n = a.nrows();
        let perms = permutations(p);
        let mut total = 0.0;
        let mut tuple = vec![0usize; p];
        let count = n.pow(p as u32);
        for code in 0..count {
            let mut c = code;
            for t in tuple.iter_mut() {
                *t = c % n;
                c /= n;
            }
            let distinct = (0..p).all(|i| (i + 1..p).all(|j| tuple[i] != tuple[j]));
            if !distinct {
                continue;
            }
            for perm in &perms {
                let prod: f64 = (0..p).map(|l| a[(tuple[l], tuple[perm[l]])]).product();
                total += perm_sign(perm) * prod;
            }
        }
        let fact: f64 = (1..=p).map(|v| v as f64).product();
        total / fact
    }

    #[test]
    fn dimension_pair_gate() {
        assert!(DimensionPair::new(4, 2).is_err());
        assert!(DimensionPair::new(2, 1).is_err());
        assert!(DimensionPair::new(3, 0).is_err());
        let d = DimensionPair::new(5, 2).unwrap();
        assert_eq!(d.q(), 0.25);
        assert_eq!(d.q_ratio(), Ratio::new(1, 4));
        assert_eq!(DimensionPair::all_up_to(10).len(), 20);
        for d in DimensionPair::all_up_to(20) {
            let q = d.q();
            assert!(q >= 1.0 / (2 * d.k()) as f64 - 1e-15 && q <= d.n() as f64 / 2.0 - 1.0 + 1e-15);
        }
    }

    #[test]
    fn pow_potential_paths_agree() {
        let integral = DimensionPair::new(6, 2).unwrap();
        assert_eq!(integral.pow_potential(3.0), 3.0);
        let fractional = DimensionPair::new(5, 2).unwrap();
        assert!((fractional.pow_potential(4.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sigma_eigen_examples() {
        assert_eq!(sigma_p_eigen(&[1.0; 4], 2).unwrap(), 6.0);
        assert_eq!(sigma_p_eigen(&[2.0, 3.0], 2).unwrap(), 6.0);
        let horizon = [1.0, 1.0, 1.0, 1.0, -0.25];
        assert_eq!(brute_sigma(&horizon, 4), 0.0);
        assert!(sigma_p_eigen(&horizon, 4).unwrap().abs() < 1e-15);
        assert_eq!(sigma_p_eigen(&[], 0).unwrap(), 1.0);
        assert!(sigma_p_eigen(&[1.0], 2).is_err());
    }

    #[test]
    fn sigma_matrix_examples() {
        let id = DMatrix::<f64>::identity(5, 5);
        assert!((sigma_p_matrix(&id, 3).unwrap() - 10.0).abs() < 1e-12);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]));
        assert!((sigma_p_matrix(&d, 2).unwrap() - 11.0).abs() < 1e-12);
        assert!(sigma_p_matrix(&DMatrix::<f64>::zeros(2, 3), 1).is_err());
        assert!(sigma_p_matrix(&id, 6).is_err());
    }

    #[test]
    fn random_symmetric_3x3_against_minors_and_delta() {
        let a = DMatrix::from_row_slice(3, 3, &[0.3, -1.2, 0.7, -1.2, 2.1, 0.4, 0.7, 0.4, -0.9]);
        for p in 0..=3 {
            let minors = sigma_p_minors(&a, p).unwrap();
            let chars = sigma_p_matrix(&a, p).unwrap();
            assert!((minors - chars).abs() < 1e-12, "p = {p}");
            if p > 0 {
                assert!((kronecker_sigma(&a, p) - minors).abs() < 1e-12, "p = {p}");
            }
        }
        // sigma_3 = det, sigma_1 = trace
        assert!((sigma_p_matrix(&a, 3).unwrap() - a.determinant()).abs() < 1e-12);
        assert!((sigma_p_matrix(&a, 1).unwrap() - a.trace()).abs() < 1e-12);
    }

    #[test]
    fn nonsymmetric_path_matches_minors() {
        let a = DMatrix::from_row_slice(4, 4, &[
            1.0, 2.0, 0.0, -1.0, 0.5, -1.0, 3.0, 0.2, 0.0, 1.5, 2.0, 1.0, -0.3, 0.0, 0.7, 0.4,
        ]);
        for p in 0..=4 {
            let lhs = sigma_p_matrix(&a, p).unwrap();
            let rhs = sigma_p_minors(&a, p).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()), "p = {p}: {lhs} vs {rhs}");
        }
        assert!((kronecker_sigma(&a, 4) - a.determinant()).abs() < 1e-12);
    }

    #[test]
    fn newton_examples() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        assert_eq!(newton_tensor(&a, 0).unwrap(), DMatrix::identity(2, 2));
        let n1 = newton_tensor(&a, 1).unwrap();
        assert!((n1 - DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])).amax() < 1e-15);
        // Cayley-Hamilton on a symmetric 4x4
        let b = DMatrix::from_row_slice(4, 4, &[
            2.0, 0.5, -0.3, 1.0, 0.5, -1.0, 0.2, 0.0, -0.3, 0.2, 0.7, 0.4, 1.0, 0.0, 0.4, 1.3,
        ]);
        let n4 = newton_tensor(&b, 4).unwrap();
        assert!(n4.amax() < 1e-12);
        // alternating-sum definition
        let s = matrix_sigmas(&b).unwrap();
        let mut power = DMatrix::<f64>::identity(4, 4);
        let mut alt = DMatrix::<f64>::zeros(4, 4);
        for j in 0..=3 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            alt += &power * (sign * s[3 - j]);
            power = &power * &b;
        }
        assert!((alt - newton_tensor(&b, 3).unwrap()).amax() < 1e-12);
    }

    #[test]
    fn ellipticity_examples() {
        let id = DMatrix::<f64>::identity(5, 5);
        let v = is_elliptic(&id, 2).unwrap();
        assert_eq!(v.definite_sign, DefiniteSign::Positive);
        assert!((v.sigma_2k1 - 1.0).abs() < 1e-12);

        let horizon = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, 1.0, -0.25]));
        let v = is_elliptic(&horizon, 2).unwrap();
        assert_ne!(v.definite_sign, DefiniteSign::Indefinite);
        assert!((v.sigma_2k1 + 0.25).abs() < 1e-12);
        // N_3 = diag(sigma_3 of the other four): (1/4, 1/4, 1/4, 1/4, 4)
        let expect = [0.25, 0.25, 0.25, 0.25, 4.0];
        for (a, b) in v.newton_eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }

        let zero = DMatrix::<f64>::zeros(3, 3);
        let v = is_elliptic(&zero, 1).unwrap();
        assert_eq!(v.definite_sign, DefiniteSign::Indefinite);
        assert_eq!(v.sigma_2k1, 0.0);
        assert!(!v.is_elliptic());

        for scale in [1e-6, 1e-3, 1e3, 1e6] {
            let v = is_elliptic(&(&horizon * scale), 2).unwrap();
            assert_ne!(v.definite_sign, DefiniteSign::Indefinite, "scale {scale}");
        }
    }

    #[test]
    fn rotational_spectrum_shortcut() {
        for p in 0..=5 {
            let kappas = [0.7, 0.7, 0.7, 0.7, -0.3];
            let lhs = sigma_p_rotational_spectrum(0.7, -0.3, 5, p);
            assert!((lhs - brute_sigma(&kappas, p)).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn prefix_recurrence_matches_subsets(values in prop::collection::vec(-3.0f64..3.0, 0..=8), p in 0usize..=8) {
            prop_assume!(p <= values.len());
            let fast = sigma_p_eigen(&values, p).unwrap();
            let slow = brute_sigma(&values, p);
            prop_assert!((fast - slow).abs() <= 1e-12 * (1.0 + slow.abs()));
        }

        #[test]
        fn permutation_invariant(mut values in prop::collection::vec(-2.0f64..2.0, 1..=7), p in 0usize..=7, seed in 0u64..1000) {
            prop_assume!(p <= values.len());
            let before = sigma_p_eigen(&values, p).unwrap();
            let mut rng = crate::numerics::SplitMix64(seed);
            for i in (1..values.len()).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                values.swap(i, j);
            }
            let after = sigma_p_eigen(&values, p).unwrap();
            prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before.abs()));
        }

        #[test]
        fn diagonal_matrix_matches_eigen(values in prop::collection::vec(-3.0f64..3.0, 1..=6)) {
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(values.clone()));
            for p in 0..=values.len() {
                let lhs = sigma_p_matrix(&d, p).unwrap();
                let rhs = sigma_p_eigen(&values, p).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
            }
        }
    }
}
