use crate::error::{shape_err, Error, Result};
use crate::linalg::{econ_qr, matmul, FlopLedger, Matrix};
use crate::tensor::cores::{pkp_cores_with_limits, TtCore};
use crate::tensor::dense::{contract_mode1, DenseTensor};
use crate::tensor::shape::{Limits, RankChain, Shape};
use crate::Scalar;

/// A tensor in TT format: a chain of order-3 cores with matching ranks and
/// unit boundary ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct TtTensor<T> {
    cores: Vec<TtCore<T>>,
}

/// Orthogonality state of a TT tensor's cores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orthogonality {
    None,
    /// Cores `1..=k` are left-orthogonal.
    LeftUpTo(usize),
    /// Cores `k..=d` are right-orthogonal.
    RightFrom(usize),
}

impl<T: Scalar> TtTensor<T> {
    pub fn new(cores: Vec<TtCore<T>>) -> Result<Self> {
        let Some(first) = cores.first() else {
            return shape_err("a TT tensor needs at least one core");
        };
        if first.left_rank() != 1 {
            return shape_err(format!("first core has left rank {}", first.left_rank()));
        }
        let last = &cores[cores.len() - 1];
        if last.right_rank() != 1 {
            return shape_err(format!("last core has right rank {}", last.right_rank()));
        }
        for (k, pair) in cores.windows(2).enumerate() {
            if pair[0].right_rank() != pair[1].left_rank() {
                return shape_err(format!(
                    "core {} right rank {} != core {} left rank {}",
                    k + 1,
                    pair[0].right_rank(),
                    k + 2,
                    pair[1].left_rank()
                ));
            }
        }
        Ok(Self { cores })
    }

    /// Rank-1 tensor of all ones.
    pub fn ones(shape: &Shape) -> Self {
        let cores = shape
            .dims()
            .iter()
            .map(|&n| TtCore::from_fn(1, n, 1, |_, _, _| T::one()).expect("positive mode"))
            .collect();
        Self { cores }
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.cores.iter().map(TtCore::mode_size).collect()).expect("valid cores")
    }

    pub fn ranks(&self) -> RankChain {
        let mut r = Vec::with_capacity(self.cores.len() + 1);
        r.push(1);
        r.extend(self.cores.iter().map(TtCore::right_rank));
        RankChain::new(r).expect("valid cores")
    }

    pub fn cores(&self) -> &[TtCore<T>] {
        &self.cores
    }

    pub fn into_cores(self) -> Vec<TtCore<T>> {
        self.cores
    }

    pub fn num_parameters(&self) -> usize {
        self.cores.iter().map(TtCore::num_elements).sum()
    }

    /// Element at a 1-based multi-index: the product of the slices.
    pub fn evaluate(&self, indices: &[usize]) -> Result<T> {
        crate::tensor::multi_index(indices, &self.shape())?;
        let mut row = vec![T::one()];
        for (core, &i) in self.cores.iter().zip(indices) {
            let s = core.slice(i);
            row = (0..s.cols())
                .map(|b| row.iter().zip(s.col(b)).map(|(&x, &y)| x * y).sum())
                .collect();
        }
        Ok(row[0])
    }

    /// Largest `k` with cores `1..=k` left-orthogonal (among the first
    /// `d − 1`), else the smallest `k ≥ 2` with cores `k..=d`
    /// right-orthogonal, within `tol`.
    pub fn orthogonality(&self, tol: T) -> Orthogonality {
        let d = self.order();
        let left = self.cores[..d.saturating_sub(1)]
            .iter()
            .take_while(|c| c.left_orthogonality_defect() <= tol)
            .count();
        if left > 0 {
            return Orthogonality::LeftUpTo(left);
        }
        let right = self.cores[1..]
            .iter()
            .rev()
            .take_while(|c| c.right_orthogonality_defect() <= tol)
            .count();
        if right > 0 {
            Orthogonality::RightFrom(d - right + 1)
        } else {
            Orthogonality::None
        }
    }

    /// Worst left-orthogonality defect over cores `1..d−1`.
    pub fn max_left_orthogonality_defect(&self) -> T {
        let d = self.order();
        self.cores[..d - 1]
            .iter()
            .map(TtCore::left_orthogonality_defect)
            .fold(T::zero(), T::max)
    }
}

/// Dense reconstruction, capped by [`Limits::from_env`].
pub fn tt_to_dense<T: Scalar>(x: &TtTensor<T>) -> Result<DenseTensor<T>> {
    tt_to_dense_with_limits(x, &Limits::from_env())
}

pub fn tt_to_dense_with_limits<T: Scalar>(
    x: &TtTensor<T>,
    limits: &Limits,
) -> Result<DenseTensor<T>> {
    let shape = x.shape();
    limits.check_dense("dense reconstruction", shape.num_elements())?;
    let mut ledger = FlopLedger::new();
    // Rows of `acc` enumerate the prefix multi-index, last index fastest.
    let mut acc = Matrix::identity(1);
    for core in x.cores() {
        let (prefix, n, r) = (acc.rows(), core.mode_size(), core.right_rank());
        let mut next = Matrix::zeros(prefix * n, r);
        for (i, s) in core.slices().iter().enumerate() {
            let part = matmul(&acc, s, &mut ledger)?;
            for b in 0..r {
                for (p, &v) in part.col(b).iter().enumerate() {
                    next[(p * n + i, b)] = v;
                }
            }
        }
        acc = next;
    }
    DenseTensor::from_values(shape, acc.into_vec())
}

/// Contraction `X^(k) ×¹ ⋯ ×¹ X^(l)` of cores `k..=l` (1-based) as a dense
/// tensor of shape `(r_{k−1}, n_k, …, n_l, r_l)`.
pub fn partial_contracted_product<T: Scalar>(
    x: &TtTensor<T>,
    k: usize,
    l: usize,
    limits: &Limits,
) -> Result<DenseTensor<T>> {
    if k == 0 || l < k || l > x.order() {
        return Err(Error::Bounds(format!(
            "core range {k}..={l} outside 1..={}",
            x.order()
        )));
    }
    let mut acc = x.cores()[k - 1].to_dense();
    for core in &x.cores()[k..l] {
        acc = contract_mode1(&acc, &core.to_dense(), 1, limits)?;
    }
    Ok(acc)
}

/// TT representation of the elementwise product; ranks multiply.
pub fn tt_hadamard<T: Scalar>(y: &TtTensor<T>, z: &TtTensor<T>) -> Result<TtTensor<T>> {
    tt_hadamard_with_limits(y, z, &Limits::unlimited())
}

/// [`tt_hadamard`] failing with a resource error when any product core
/// would exceed `limits.core_elements`.
pub fn tt_hadamard_with_limits<T: Scalar>(
    y: &TtTensor<T>,
    z: &TtTensor<T>,
    limits: &Limits,
) -> Result<TtTensor<T>> {
    same_shape(y, z)?;
    let cores = y
        .cores()
        .iter()
        .zip(z.cores())
        .map(|(a, b)| pkp_cores_with_limits(a, b, limits))
        .collect::<Result<Vec<_>>>()?;
    TtTensor::new(cores)
}

/// Unrounded TT sum by block concatenation; interior ranks add.
pub fn tt_add<T: Scalar>(y: &TtTensor<T>, z: &TtTensor<T>) -> Result<TtTensor<T>> {
    same_shape(y, z)?;
    let d = y.order();
    if d == 1 {
        let (a, b) = (&y.cores()[0], &z.cores()[0]);
        let data = a
            .as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(&p, &q)| p + q)
            .collect();
        return TtTensor::new(vec![TtCore::new(1, a.mode_size(), 1, data)?]);
    }
    let mut cores = Vec::with_capacity(d);
    for (k, (a, b)) in y.cores().iter().zip(z.cores()).enumerate() {
        let (ra0, n, ra1) = a.dims();
        let (rb0, _, rb1) = b.dims();
        let core = if k == 0 {
            TtCore::from_fn(1, n, ra1 + rb1, |_, i, c| {
                if c <= ra1 {
                    a.get(1, i, c)
                } else {
                    b.get(1, i, c - ra1)
                }
            })?
        } else if k == d - 1 {
            TtCore::from_fn(ra0 + rb0, n, 1, |r, i, _| {
                if r <= ra0 {
                    a.get(r, i, 1)
                } else {
                    b.get(r - ra0, i, 1)
                }
            })?
        } else {
            TtCore::from_fn(ra0 + rb0, n, ra1 + rb1, |r, i, c| {
                match (r <= ra0, c <= ra1) {
                    (true, true) => a.get(r, i, c),
                    (false, false) => b.get(r - ra0, i, c - ra1),
                    _ => T::zero(),
                }
            })?
        };
        cores.push(core);
    }
    TtTensor::new(cores)
}

/// `c·Y`, applied to the first core.
pub fn tt_scale<T: Scalar>(y: &TtTensor<T>, c: T) -> TtTensor<T> {
    let mut cores = y.cores().to_vec();
    cores[0] = cores[0].clone().scale(c);
    TtTensor { cores }
}

/// Inner product `Σ Y(i)·Z(i)` by a left-to-right sweep.
pub fn tt_dot<T: Scalar>(y: &TtTensor<T>, z: &TtTensor<T>) -> Result<T> {
    same_shape(y, z)?;
    let mut ledger = FlopLedger::new();
    let mut w = Matrix::identity(1);
    for (a, b) in y.cores().iter().zip(z.cores()) {
        let mut next = Matrix::zeros(a.right_rank(), b.right_rank());
        for (ya, zb) in a.slices().iter().zip(b.slices()) {
            let wz = matmul(&w, &zb, &mut ledger)?;
            let term = crate::linalg::matmul_tn(ya, &wz, &mut ledger)?;
            next = next.add(&term)?;
        }
        w = next;
    }
    Ok(w[(0, 0)])
}

/// `Σ A(i)·B(i)·C(i)` without forming any Hadamard core.
pub fn tt_inner3<T: Scalar>(a: &TtTensor<T>, b: &TtTensor<T>, c: &TtTensor<T>) -> Result<T> {
    same_shape(a, b)?;
    same_shape(a, c)?;
    // state[(α·rb + β)·rc + γ]
    let mut state = vec![T::one()];
    let (mut ra, mut rb, mut rc) = (1usize, 1usize, 1usize);
    for ((ca, cb), cc) in a.cores().iter().zip(b.cores()).zip(c.cores()) {
        let (na, nb, nc) = (ca.right_rank(), cb.right_rank(), cc.right_rank());
        let mut next = vec![T::zero(); na * nb * nc];
        for i in 1..=ca.mode_size() {
            let (sa, sb, sc) = (ca.slice(i), cb.slice(i), cc.slice(i));
            // contract α, then β, then γ
            let mut t1 = vec![T::zero(); na * rb * rc];
            for al in 0..ra {
                for a2 in 0..na {
                    let f = sa[(al, a2)];
                    if f == T::zero() {
                        continue;
                    }
                    let src = &state[al * rb * rc..(al + 1) * rb * rc];
                    let dst = &mut t1[a2 * rb * rc..(a2 + 1) * rb * rc];
                    for (o, &s) in dst.iter_mut().zip(src) {
                        *o += f * s;
                    }
                }
            }
            let mut t2 = vec![T::zero(); na * nb * rc];
            for a2 in 0..na {
                for be in 0..rb {
                    for b2 in 0..nb {
                        let f = sb[(be, b2)];
                        if f == T::zero() {
                            continue;
                        }
                        let src = &t1[(a2 * rb + be) * rc..][..rc];
                        let dst = &mut t2[(a2 * nb + b2) * rc..][..rc];
                        for (o, &s) in dst.iter_mut().zip(src) {
                            *o += f * s;
                        }
                    }
                }
            }
            for ab in 0..na * nb {
                let src = &t2[ab * rc..(ab + 1) * rc];
                let dst = &mut next[ab * nc..(ab + 1) * nc];
                for (g, &s) in src.iter().enumerate() {
                    if s == T::zero() {
                        continue;
                    }
                    for (g2, o) in dst.iter_mut().enumerate() {
                        *o += s * sc[(g, g2)];
                    }
                }
            }
        }
        state = next;
        ra = na;
        rb = nb;
        rc = nc;
    }
    Ok(state[0])
}

/// Frobenius norm via a left-to-right QR sweep, which stays accurate when
/// the tensor is a small difference of large terms.
pub fn tt_norm<T: Scalar>(y: &TtTensor<T>) -> T {
    let mut ledger = FlopLedger::new();
    let mut carry = Matrix::identity(1);
    let d = y.order();
    for (k, core) in y.cores().iter().enumerate() {
        let h = matmul(&carry, &core.horizontal(), &mut ledger).expect("conformant ranks");
        if k == d - 1 {
            return h.frobenius_norm();
        }
        let moved = TtCore::from_horizontal(&h, core.mode_size(), core.right_rank())
            .expect("consistent extents");
        carry = econ_qr(&moved.vertical(), &mut ledger)
            .expect("finite core")
            .r;
    }
    unreachable!("a TT tensor has at least one core")
}

/// `‖X − X_ref‖_F / ‖X_ref‖_F` evaluated in TT form.
pub fn relative_error<T: Scalar>(approx: &TtTensor<T>, reference: &TtTensor<T>) -> Result<T> {
    same_shape(approx, reference)?;
    let denom = tt_norm(reference);
    if denom == T::zero() {
        return Err(Error::Domain("reference tensor has zero norm".into()));
    }
    let diff = tt_add(approx, &tt_scale(reference, -T::one()))?;
    Ok(tt_norm(&diff) / denom)
}

/// `‖X − X_ref‖_F / ‖X_ref‖_F` against a dense reference.
pub fn relative_error_dense<T: Scalar>(
    approx: &TtTensor<T>,
    reference: &DenseTensor<T>,
    limits: &Limits,
) -> Result<T> {
    let dense = tt_to_dense_with_limits(approx, limits)?;
    let denom = reference.frobenius_norm();
    if denom == T::zero() {
        return Err(Error::Domain("reference tensor has zero norm".into()));
    }
    Ok(dense.sub(reference)?.frobenius_norm() / denom)
}

fn same_shape<T: Scalar>(a: &TtTensor<T>, b: &TtTensor<T>) -> Result<()> {
    if a.order() != b.order()
        || a.cores()
            .iter()
            .zip(b.cores())
            .any(|(x, y)| x.mode_size() != y.mode_size())
    {
        return shape_err(format!("TT shapes {} and {} differ", a.shape(), b.shape()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_tt, Distribution, RandomSpec};
    use crate::tensor::dense::{for_each_index, hadamard_dense};

    fn rand_tt(dims: &[usize], ranks: &[usize], seed: u64) -> TtTensor<f64> {
        random_tt(&RandomSpec {
            shape: Shape::new(dims.to_vec()).unwrap(),
            ranks: RankChain::new(ranks.to_vec()).unwrap(),
            kind: Distribution::Gaussian,
            seed,
        })
        .unwrap()
    }

    fn rel(a: &DenseTensor<f64>, b: &DenseTensor<f64>) -> f64 {
        a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm()
    }

    #[test]
    fn rank_one_pair_reconstructs() {
        let a = TtCore::new(1, 2, 1, vec![1.0, 2.0]).unwrap();
        let b = TtCore::new(1, 2, 1, vec![3.0, 4.0]).unwrap();
        let x = TtTensor::new(vec![a, b]).unwrap();
        let dense = tt_to_dense(&x).unwrap();
        assert_eq!(dense.values(), &[3.0, 4.0, 6.0, 8.0]);
    }

    #[test]
    fn ones_tensor() {
        let s = Shape::new(vec![2, 2, 2]).unwrap();
        let x = TtTensor::<f64>::ones(&s);
        assert!(tt_to_dense(&x).unwrap().values().iter().all(|&v| v == 1.0));
        assert!((tt_norm(&x) - 8f64.sqrt()).abs() < 1e-14);
        assert!(tt_dot(&x, &x).unwrap() >= 0.0);
    }

    #[test]
    fn invalid_chains_rejected() {
        let c = TtCore::<f64>::zeros(1, 2, 2);
        assert!(TtTensor::new(vec![c.clone()]).is_err());
        assert!(TtTensor::new(vec![c.clone(), TtCore::zeros(3, 2, 1)]).is_err());
        assert!(TtTensor::new(vec![c, TtCore::zeros(2, 2, 1)]).is_ok());
    }

    #[test]
    fn dense_matches_product_of_slices_and_contraction_chain() {
        let x = rand_tt(&[2, 3, 2], &[1, 2, 3, 1], 5);
        let dense = tt_to_dense(&x).unwrap();
        for_each_index(&x.shape(), |idx| {
            assert!((dense.get(idx).unwrap() - x.evaluate(idx).unwrap()).abs() < 1e-14);
        });
        let chain = partial_contracted_product(&x, 1, 3, &Limits::default()).unwrap();
        assert_eq!(chain.shape().dims(), &[1, 2, 3, 2, 1]);
        for (a, b) in chain.values().iter().zip(dense.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_core_contraction_is_neutral() {
        let x = rand_tt(&[2, 2], &[1, 3, 1], 9);
        let id = TtCore::from_slices(&[Matrix::identity(3)]).unwrap();
        let mut cores = x.cores().to_vec();
        cores.insert(1, id);
        let padded = TtTensor::new(cores).unwrap();
        assert_eq!(
            tt_to_dense(&padded).unwrap().values(),
            tt_to_dense(&x).unwrap().values()
        );
    }

    #[test]
    fn hadamard_rank_rule_and_oracle() {
        let y = rand_tt(&[3, 3, 3], &[1, 2, 2, 1], 1);
        let z = rand_tt(&[3, 3, 3], &[1, 3, 3, 1], 2);
        let h = tt_hadamard(&y, &z).unwrap();
        assert_eq!(h.ranks().as_slice(), &[1, 6, 6, 1]);
        let oracle = hadamard_dense(&tt_to_dense(&y).unwrap(), &tt_to_dense(&z).unwrap()).unwrap();
        assert!(rel(&tt_to_dense(&h).unwrap(), &oracle) < 1e-12);

        let ones = TtTensor::ones(&y.shape());
        let h1 = tt_hadamard(&y, &ones).unwrap();
        assert_eq!(h1.ranks(), y.ranks());
        assert!(rel(&tt_to_dense(&h1).unwrap(), &tt_to_dense(&y).unwrap()) < 1e-15);
    }

    #[test]
    fn hadamard_cap() {
        let y = rand_tt(&[3, 3, 3], &[1, 4, 4, 1], 1);
        let limits = Limits {
            core_elements: 100,
            ..Limits::default()
        };
        assert!(tt_hadamard_with_limits(&y, &y, &limits)
            .unwrap_err()
            .is_resource());
    }

    #[test]
    fn add_scale_dot_norm() {
        let y = rand_tt(&[3, 2], &[1, 2, 1], 3);
        let z = rand_tt(&[3, 2], &[1, 3, 1], 4);
        let s = tt_add(&y, &z).unwrap();
        assert_eq!(s.ranks().as_slice(), &[1, 5, 1]);
        let (dy, dz) = (tt_to_dense(&y).unwrap(), tt_to_dense(&z).unwrap());
        let ds = tt_to_dense(&s).unwrap();
        for ((a, b), c) in dy.values().iter().zip(dz.values()).zip(ds.values()) {
            assert!((a + b - c).abs() < 1e-14);
        }
        let dot = tt_dot(&y, &z).unwrap();
        assert!(
            (dot - dy.dot(&dz).unwrap()).abs() < 1e-12 * dy.frobenius_norm() * dz.frobenius_norm()
        );
        assert!((tt_norm(&y) - dy.frobenius_norm()).abs() < 1e-12 * dy.frobenius_norm());
        let scaled = tt_to_dense(&tt_scale(&y, 2.5)).unwrap();
        assert!(rel(&scaled, &dy.clone().scale(2.5)) < 1e-15);
    }

    #[test]
    fn inner3_matches_dense() {
        let a = rand_tt(&[2, 3, 2], &[1, 2, 2, 1], 11);
        let b = rand_tt(&[2, 3, 2], &[1, 3, 1, 1], 12);
        let c = rand_tt(&[2, 3, 2], &[1, 1, 2, 1], 13);
        let dense = hadamard_dense(&tt_to_dense(&a).unwrap(), &tt_to_dense(&b).unwrap()).unwrap();
        let expect = dense.dot(&tt_to_dense(&c).unwrap()).unwrap();
        assert!((tt_inner3(&a, &b, &c).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn relative_error_cases() {
        let y = rand_tt(&[3, 3, 3], &[1, 2, 2, 1], 21);
        assert!(relative_error(&y, &y).unwrap() < 1e-14);
        let twice = tt_scale(&y, 2.0);
        assert!((relative_error(&twice, &y).unwrap() - 1.0).abs() < 1e-13);
        let z = rand_tt(&[3, 3, 3], &[1, 3, 2, 1], 22);
        let tt_path = relative_error(&z, &y).unwrap();
        let dense_path =
            relative_error_dense(&z, &tt_to_dense(&y).unwrap(), &Limits::default()).unwrap();
        assert!((tt_path - dense_path).abs() < 1e-10);
        let zero = tt_scale(&y, 0.0);
        assert!(matches!(relative_error(&y, &zero), Err(Error::Domain(_))));
    }

    #[test]
    fn orthogonality_detection() {
        let y = rand_tt(&[3, 3, 3], &[1, 2, 2, 1], 2);
        assert_eq!(y.orthogonality(1e-10), Orthogonality::None);
    }
}
