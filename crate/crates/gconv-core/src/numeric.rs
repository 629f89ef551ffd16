//! Irrep systems for groups given only by a Cayley table.
//!
//! The left regular representation is split into irreducible subspaces by
//! diagonalizing a group-averaged random Hermitian matrix: its eigenspaces
//! are irreducible subspaces of the regular representation (one eigenvalue
//! cluster per copy, generically). Each cluster yields one unitary irrep;
//! equivalent copies are merged by character comparison. Seeds are tried in
//! a fixed order until the resulting system passes all checks, so the
//! construction is deterministic.

use std::sync::Arc;

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{max_abs_diff, CMat, C};
use crate::repr::Irrep;

pub fn numeric_irreps(g: &Arc<FiniteGroup>) -> Result<Vec<Irrep>> {
    for seed in 0..16u64 {
        if let Some(irreps) = try_seed(g, seed) {
            return Ok(irreps);
        }
    }
    Err(Error::Invalid(format!(
        "failed to decompose the regular representation of {}",
        g.name
    )))
}

fn try_seed(g: &Arc<FiniteGroup>, seed: u64) -> Option<Vec<Irrep>> {
    let n = g.order;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = CMat::from_fn(n, n, |_, _| {
        C::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let herm = (&raw + raw.adjoint()).unscale(2.0);

    // Group-average by permutation indexing: [R(h) A R(h)^†]_{hu,hv} = A_{u,v}.
    let mut avg = CMat::zeros(n, n);
    for h in 0..n {
        for u in 0..n {
            let hu = g.mul(h, u);
            for v in 0..n {
                avg[(hu, g.mul(h, v))] += herm[(u, v)];
            }
        }
    }
    avg.unscale_mut(n as f64);

    let eig = SymmetricEigen::new(avg);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let spread = eig.eigenvalues.max() - eig.eigenvalues.min() + 1.0;
    let gap = 1e-6 * spread;

    // Cluster sorted eigenvalues; each cluster spans one candidate subspace.
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for idx in order {
        match clusters.last_mut() {
            Some(c) if (eig.eigenvalues[idx] - eig.eigenvalues[*c.last().unwrap()]).abs() < gap => {
                c.push(idx)
            }
            _ => clusters.push(vec![idx]),
        }
    }

    let mut kept: Vec<Irrep> = Vec::new();
    let mut dim_sum = 0usize;
    for cluster in clusters {
        let d = cluster.len();
        let mut basis = CMat::zeros(n, d);
        for (j, &col) in cluster.iter().enumerate() {
            basis.set_column(j, &eig.eigenvectors.column(col));
        }
        // Refine: average the subspace projector over the group so the span
        // is exactly invariant, then re-extract an orthonormal basis.
        let proj = &basis * basis.adjoint();
        let mut avg_proj = CMat::zeros(n, n);
        for h in 0..n {
            for u in 0..n {
                let hu = g.mul(h, u);
                for v in 0..n {
                    avg_proj[(hu, g.mul(h, v))] += proj[(u, v)];
                }
            }
        }
        avg_proj.unscale_mut(n as f64);
        let peig = SymmetricEigen::new(avg_proj);
        let mut pord: Vec<usize> = (0..n).collect();
        pord.sort_by(|&a, &b| peig.eigenvalues[b].total_cmp(&peig.eigenvalues[a]));
        // eigenvalues must be ~1 on the subspace and ~0 elsewhere
        if peig.eigenvalues[pord[d - 1]] < 0.9 || (d < n && peig.eigenvalues[pord[d]] > 0.1) {
            return None;
        }
        let mut v = CMat::zeros(n, d);
        for (j, &col) in pord[..d].iter().enumerate() {
            v.set_column(j, &peig.eigenvectors.column(col));
        }

        let matrices: Vec<CMat> = (0..n)
            .map(|h| {
                // rho(h) = V^† R(h) V with R(h) e_u = e_{hu}
                let mut moved = CMat::zeros(n, d);
                for u in 0..n {
                    let hu = g.mul(h, u);
                    for j in 0..d {
                        moved[(hu, j)] = v[(u, j)];
                    }
                }
                v.adjoint() * moved
            })
            .collect();

        let character: Vec<C> = matrices.iter().map(|m| m.trace()).collect();
        let self_ip: C = character.iter().map(|c| c.conj() * c).sum::<C>() / C::new(n as f64, 0.0);
        if (self_ip - C::new(1.0, 0.0)).norm() > 1e-6 {
            return None; // cluster was not a single irreducible subspace
        }
        let duplicate = kept.iter().any(|other| {
            let ip: C = other
                .character()
                .iter()
                .zip(&character)
                .map(|(a, b)| a.conj() * b)
                .sum::<C>()
                / C::new(n as f64, 0.0);
            ip.norm() > 0.5
        });
        if !duplicate {
            dim_sum += d * d;
            kept.push(Irrep {
                label: String::new(),
                dim: d,
                matrices,
            });
        }
    }
    if dim_sum != g.order {
        return None;
    }
    for irrep in &kept {
        if max_abs_diff(&irrep.matrices[0], &CMat::identity(irrep.dim, irrep.dim)) > 1e-9 {
            return None;
        }
        let lefts: Vec<usize> = if n <= 24 {
            (0..n).collect()
        } else {
            g.generators().to_vec()
        };
        for u in 0..n {
            let gram = irrep.matrices[u].adjoint() * &irrep.matrices[u];
            if max_abs_diff(&gram, &CMat::identity(irrep.dim, irrep.dim)) > 1e-10 {
                return None;
            }
            for &w in &lefts {
                let prod = &irrep.matrices[w] * &irrep.matrices[u];
                if max_abs_diff(&prod, &irrep.matrices[g.mul(w, u)]) > 1e-10 {
                    return None;
                }
            }
        }
    }

    // Canonical order: trivial first, then ascending dimension with ties
    // broken by the rounded character vector.
    let fingerprint = |ir: &Irrep| -> Vec<(i64, i64)> {
        ir.character()
            .iter()
            .map(|c| ((c.re * 1e6).round() as i64, (c.im * 1e6).round() as i64))
            .collect()
    };
    kept.sort_by(|a, b| {
        let ta = a.is_trivial_fast();
        let tb = b.is_trivial_fast();
        tb.cmp(&ta)
            .then(a.dim.cmp(&b.dim))
            .then_with(|| fingerprint(a).cmp(&fingerprint(b)))
    });
    for (i, ir) in kept.iter_mut().enumerate() {
        ir.label = format!("u{i}");
    }
    Some(kept)
}

impl Irrep {
    pub(crate) fn is_trivial_fast(&self) -> bool {
        self.dim == 1
            && self
                .matrices
                .iter()
                .all(|m| (m[(0, 0)] - C::new(1.0, 0.0)).norm() < 1e-8)
    }
}
