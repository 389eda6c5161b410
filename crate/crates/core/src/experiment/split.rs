use thiserror::Error;

/// 64-bit linear congruential generator (Knuth's MMIX constants); outputs
/// the high 31 bits of the state.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        (self.state >> 33) as u32
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SplitError {
    #[error("need at least 2 entries to split, got {0}")]
    TooSmall(usize),
    #[error("test ratio must lie strictly between 0 and 1, got {0}")]
    BadRatio(f64),
}

/// Test-set size: `round(ratio * n)` clamped so both halves are non-empty.
pub fn test_size(n: usize, ratio: f64) -> usize {
    ((ratio * n as f64).round() as usize).clamp(1, n - 1)
}

/// Indices of the (train, test) halves, each in ascending order.
///
/// Fisher-Yates over `0..n` driven by [`Lcg`]; the first `test_size`
/// shuffled positions form the test set.
pub fn split_indices(n: usize, ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>), SplitError> {
    if n < 2 {
        return Err(SplitError::TooSmall(n));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(SplitError::BadRatio(ratio));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = Lcg::new(seed);
    for i in (1..n).rev() {
        let j = rng.next_u32() as usize % (i + 1);
        order.swap(i, j);
    }
    let m = test_size(n, ratio);
    let mut test = order[..m].to_vec();
    let mut train = order[m..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// Deterministic train/test split preserving input order within each half.
pub fn split_corpus<T: Clone>(entries: &[T], ratio: f64, seed: u64) -> Result<(Vec<T>, Vec<T>), SplitError> {
    let (train, test) = split_indices(entries.len(), ratio, seed)?;
    Ok((
        train.iter().map(|&i| entries[i].clone()).collect(),
        test.iter().map(|&i| entries[i].clone()).collect(),
    ))
}
