use std::collections::BTreeMap;

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;

/// Row indices kept by random undersampling: every minority row plus an
/// equal-sized uniform sample of the majority, in original order.
pub fn undersample_indices(labels: &[i8], seed: u64) -> Result<Vec<usize>> {
    let pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] > 0).collect();
    let neg: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] <= 0).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::DegenerateLabels("undersampling needs both classes".into()));
    }
    let (minority, majority) = if pos.len() <= neg.len() { (pos, neg) } else { (neg, pos) };
    let mut rng = seeded(seed);
    let mut keep: Vec<usize> = index::sample(&mut rng, majority.len(), minority.len())
        .into_iter()
        .map(|k| majority[k])
        .chain(minority)
        .collect();
    keep.sort_unstable();
    Ok(keep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

/// How many of each class to draw so the total is `n` and every class gets
/// its proportional share rounded by largest remainder (ties to the smaller
/// label).
fn allocate(counts: &BTreeMap<i8, usize>, n: usize) -> BTreeMap<i8, usize> {
    let total: usize = counts.values().sum();
    let mut alloc: BTreeMap<i8, usize> = counts.iter().map(|(k, c)| (*k, c * n / total)).collect();
    let mut remainders: Vec<(usize, i8)> = counts.iter().map(|(k, c)| ((c * n) % total, *k)).collect();
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let short = n - alloc.values().sum::<usize>();
    for (_, k) in remainders.into_iter().take(short) {
        *alloc.get_mut(&k).unwrap() += 1;
    }
    alloc
}

/// `n` row indices drawn without replacement, stratified by `labels`,
/// returned ascending.
pub fn stratified_sample(labels: &[i8], n: usize, seed: u64) -> Result<Vec<usize>> {
    if n > labels.len() {
        return Err(Error::Argument(format!(
            "cannot draw {n} rows from {}",
            labels.len()
        )));
    }
    let mut by_class: BTreeMap<i8, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_class.entry(*l).or_default().push(i);
    }
    let counts = by_class.iter().map(|(k, v)| (*k, v.len())).collect();
    let alloc = allocate(&counts, n);
    let mut rng = seeded(seed);
    let mut out = Vec::with_capacity(n);
    for (k, rows) in &mut by_class {
        rows.shuffle(&mut rng);
        out.extend_from_slice(&rows[..alloc[k]]);
    }
    out.sort_unstable();
    Ok(out)
}

/// Seeded split with `floor(ratio * m)` training rows. With `stratify`, each
/// class is split in proportion.
pub fn train_test_split(m: usize, ratio: f64, seed: u64, stratify: Option<&[i8]>) -> Result<SplitIndices> {
    if m < 2 {
        return Err(Error::Argument(format!("split needs at least 2 rows, got {m}")));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Argument(format!("split ratio must be in (0, 1), got {ratio}")));
    }
    let n_train = (ratio * m as f64).floor() as usize;
    let mut train = match stratify {
        Some(labels) => {
            if labels.len() != m {
                return Err(Error::Shape(format!("{} labels for {m} rows", labels.len())));
            }
            stratified_sample(labels, n_train, seed)?
        }
        None => {
            let mut rows: Vec<usize> = (0..m).collect();
            rows.shuffle(&mut seeded(seed));
            rows.truncate(n_train);
            rows
        }
    };
    train.sort_unstable();
    let mut in_train = vec![false; m];
    for &i in &train {
        in_train[i] = true;
    }
    let test = (0..m).filter(|&i| !in_train[i]).collect();
    Ok(SplitIndices { train, test, seed })
}
