//! Integer partitions, standard Young tableaux, and the orthogonal
//! representation matrices of adjacent transpositions built from axial
//! distances. These are the ingredients for symmetric-group irreps.

use crate::linalg::{CMat, C};

/// All partitions of n with parts descending, ordered reverse-
/// lexicographically: (n) first, (1,...,1) last.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let top = remaining.min(max_part);
        for part in (1..=top).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

pub fn partition_label(shape: &[usize]) -> String {
    format!(
        "({})",
        shape
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )
}

/// A standard tableau stored as the cell (row, col) of each value 0..n-1.
pub type Tableau = Vec<(u8, u8)>;

/// Enumerate the standard Young tableaux of a shape in a deterministic
/// order (values placed 0..n-1, candidate rows scanned top to bottom).
pub fn standard_tableaux(shape: &[usize]) -> Vec<Tableau> {
    let n: usize = shape.iter().sum();
    let rows = shape.len();
    let mut filled = vec![0usize; rows]; // cells already used per row
    let mut cur: Tableau = Vec::with_capacity(n);
    let mut out = Vec::new();
    fn rec(
        value: usize,
        n: usize,
        shape: &[usize],
        filled: &mut Vec<usize>,
        cur: &mut Tableau,
        out: &mut Vec<Tableau>,
    ) {
        if value == n {
            out.push(cur.clone());
            return;
        }
        for r in 0..shape.len() {
            let c = filled[r];
            if c >= shape[r] {
                continue;
            }
            // column constraint: the cell above must already be filled
            if r > 0 && filled[r - 1] <= c {
                continue;
            }
            filled[r] += 1;
            cur.push((r as u8, c as u8));
            rec(value + 1, n, shape, filled, cur, out);
            cur.pop();
            filled[r] -= 1;
        }
    }
    rec(0, n, shape, &mut filled, &mut cur, &mut out);
    out
}

/// Number of standard tableaux by the hook length formula; used as an
/// independent check on the enumeration.
pub fn hook_length_dim(shape: &[usize]) -> usize {
    let n: usize = shape.iter().sum();
    let mut numer: u128 = 1;
    for k in 1..=n as u128 {
        numer *= k;
    }
    let mut denom: u128 = 1;
    for (r, &len) in shape.iter().enumerate() {
        for c in 0..len {
            let arm = len - c - 1;
            let leg = shape[r + 1..].iter().filter(|&&l| l > c).count();
            denom *= (arm + leg + 1) as u128;
        }
    }
    (numer / denom) as usize
}

/// The orthogonal matrices of the adjacent transpositions (k, k+1) for
/// k = 0..n-2, in the standard-tableau basis of the given shape.
///
/// For a tableau T with axial distance d between the cells of k and k+1,
/// the transposition fixes the span of T and the swapped tableau T':
/// the T column gets 1/d on the diagonal and sqrt(1 - 1/d^2) towards T'
/// when T' is standard.
pub fn transposition_matrices(shape: &[usize]) -> Vec<CMat> {
    let n: usize = shape.iter().sum();
    let tabs = standard_tableaux(shape);
    let dim = tabs.len();
    let index: std::collections::HashMap<Tableau, usize> = tabs
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let mut m = CMat::zeros(dim, dim);
        for (t, tab) in tabs.iter().enumerate() {
            let (r1, c1) = tab[k];
            let (r2, c2) = tab[k + 1];
            let content = |r: u8, c: u8| c as i64 - r as i64;
            let d = (content(r2, c2) - content(r1, c1)) as f64;
            m[(t, t)] = C::new(1.0 / d, 0.0);
            if r1 != r2 && c1 != c2 {
                let mut swapped = tab.clone();
                swapped.swap(k, k + 1);
                let t2 = index[&swapped];
                m[(t2, t)] = C::new((1.0 - 1.0 / (d * d)).sqrt(), 0.0);
            }
        }
        out.push(m);
    }
    out
}
