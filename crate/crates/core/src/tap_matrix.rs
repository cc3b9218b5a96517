/// Row-major `[n_samples × n_taps]` matrix of cascade tap outputs.
///
/// Row `t` holds every tap at time `t`; column `k` is the output of
/// section `k` (base first).
#[derive(Debug, Clone, PartialEq)]
pub struct TapMatrix {
    n_taps: usize,
    data: Vec<f64>,
}

impl TapMatrix {
    pub fn new(n_taps: usize) -> Self {
        Self {
            n_taps,
            data: Vec::new(),
        }
    }

    pub fn with_capacity(n_taps: usize, n_samples: usize) -> Self {
        Self {
            n_taps,
            data: Vec::with_capacity(n_taps * n_samples),
        }
    }

    /// Wraps row-major data. Panics if `data.len()` is not a multiple of `n_taps`.
    pub fn from_rows(n_taps: usize, data: Vec<f64>) -> Self {
        assert!(
            n_taps == 0 && data.is_empty() || n_taps > 0 && data.len().is_multiple_of(n_taps),
            "data length {} is not a multiple of {n_taps} taps",
            data.len()
        );
        Self { n_taps, data }
    }

    pub fn n_taps(&self) -> usize {
        self.n_taps
    }

    pub fn n_samples(&self) -> usize {
        self.data.len().checked_div(self.n_taps).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.n_taps..(t + 1) * self.n_taps]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_taps.max(1))
    }

    pub fn get(&self, t: usize, tap: usize) -> f64 {
        self.data[t * self.n_taps + tap]
    }

    pub fn column(&self, tap: usize) -> Vec<f64> {
        self.rows().map(|row| row[tap]).collect()
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.n_taps, "row width mismatch");
        self.data.extend_from_slice(row);
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }
}
