use std::ops::AddAssign;

/// Leading coefficient of the thin R-SVD cost estimate `k·m·n²` (`m ≥ n`).
pub const SVD_FLOP_CONSTANT: u64 = 6;

/// Operation counters for one recompression run.
///
/// `matmul_flops` and `qr_flops` follow closed-form kernel costs exactly;
/// `svd_flops` is an order-of-magnitude bucket and is kept apart from them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlopLedger {
    pub matmul_flops: u64,
    pub qr_flops: u64,
    pub svd_flops: u64,
}

impl FlopLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Charges an `m×n` by `n×r` product: `m(2n−1)r`.
    pub fn charge_matmul(&mut self, m: usize, n: usize, r: usize) {
        if n == 0 {
            return;
        }
        self.matmul_flops += (m as u64) * (2 * n as u64 - 1) * (r as u64);
    }

    /// Charges elementwise work (scalings, diagonal products) to the matmul
    /// counter.
    pub fn charge_elementwise(&mut self, count: usize) {
        self.matmul_flops += count as u64;
    }

    /// Charges an economy Householder QR of an `m×n` matrix.
    ///
    /// For `m ≥ n` this is `4mn² − 4n³/3`. For `m < n` the leading `m×m`
    /// block costs `8m³/3` and updating the remaining `n−m` columns costs
    /// `2m²(n−m)`.
    pub fn charge_qr(&mut self, m: usize, n: usize) {
        let (mf, nf) = (m as f64, n as f64);
        let cost = if m >= n {
            4.0 * mf * nf * nf - 4.0 * nf.powi(3) / 3.0
        } else {
            8.0 * mf.powi(3) / 3.0 + 2.0 * mf * mf * (nf - mf)
        };
        self.qr_flops += cost.max(0.0).round() as u64;
    }

    /// Charges a thin SVD of an `m×n` matrix to the SVD bucket.
    pub fn charge_svd(&mut self, m: usize, n: usize) {
        let (big, small) = if m >= n { (m, n) } else { (n, m) };
        self.svd_flops += SVD_FLOP_CONSTANT * (big as u64) * (small as u64).pow(2);
    }

    /// Exactly counted flops: products plus QR.
    pub fn measured(&self) -> u64 {
        self.matmul_flops + self.qr_flops
    }

    /// Exactly counted flops plus the SVD estimate.
    pub fn total_with_svd(&self) -> u64 {
        self.measured() + self.svd_flops
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

impl AddAssign for FlopLedger {
    fn add_assign(&mut self, rhs: Self) {
        self.matmul_flops += rhs.matmul_flops;
        self.qr_flops += rhs.qr_flops;
        self.svd_flops += rhs.svd_flops;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_cost_formula() {
        let mut l = FlopLedger::new();
        l.charge_matmul(2, 3, 4);
        assert_eq!(l.matmul_flops, 40);
        l.charge_matmul(3, 3, 2);
        assert_eq!(l.matmul_flops, 70);
    }

    #[test]
    fn qr_cost_formula() {
        let mut l = FlopLedger::new();
        l.charge_qr(20, 5);
        // 4·20·25 − 4·125/3 = 2000 − 166.67
        assert_eq!(l.qr_flops, 1833);
    }

    #[test]
    fn merge_and_reset() {
        let mut a = FlopLedger::new();
        a.charge_matmul(1, 1, 1);
        let mut b = FlopLedger::new();
        b.charge_svd(4, 2);
        a += b;
        assert_eq!(a.svd_flops, SVD_FLOP_CONSTANT * 16);
        assert_eq!(a.measured(), 1);
        a.reset();
        assert_eq!(a, FlopLedger::default());
    }
}
