//! Centralized numeric tolerances.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Normalization and non-negativity slack for probability vectors.
    pub norm: f64,
    /// Per-prefix slack for majorization; the k-th prefix gets `maj * k`.
    pub maj: f64,
    /// Margins below this are reported as boundary cases.
    pub boundary: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        norm: 1e-10,
        maj: 1e-12,
        boundary: 1e-6,
    };

    pub fn maj_at(&self, k: usize) -> f64 {
        self.maj * k as f64
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
