use alloc::collections::BTreeMap;

use crate::error::{Error, Result};

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .map(|c| {
            let p = c as f64 / n;
            -p * libm::log(p)
        })
        .sum()
}

/// Normalized mutual information with arithmetic-mean normalization,
/// `2 I(A; B) / (H(A) + H(B))`. Two single-block partitions score 1.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidPartition(alloc::format!(
            "partitions cover {} and {} elements",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidPartition("empty partitions".into()));
    }
    let n = a.len() as f64;
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut left: BTreeMap<usize, usize> = BTreeMap::new();
    let mut right: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_insert(0) += 1;
        *left.entry(x).or_insert(0) += 1;
        *right.entry(y).or_insert(0) += 1;
    }
    if joint.len() == left.len() && joint.len() == right.len() {
        // identical up to relabeling; skip the rounding of the general path
        return Ok(1.0);
    }
    let h_a = entropy(left.values().copied(), n);
    let h_b = entropy(right.values().copied(), n);
    if h_a + h_b == 0.0 {
        return Ok(1.0);
    }
    let mutual: f64 = joint
        .iter()
        .map(|(&(x, y), &c)| {
            let p = c as f64 / n;
            p * libm::log(p * n * n / (left[&x] as f64 * right[&y] as f64))
        })
        .sum();
    Ok((2.0 * mutual / (h_a + h_b)).clamp(0.0, 1.0))
}
