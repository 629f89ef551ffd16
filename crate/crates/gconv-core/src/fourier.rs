//! Fourier transforms on a group and its quotient spaces, the sparsity
//! masks that quotient-space transforms obey, and convolution through the
//! Fourier domain.
//!
//! Convention: the forward transform is F(rho) = sum_u f(u) rho(u) with no
//! normalization; the inverse carries the 1/|G| factor. On Z_n this is the
//! complex conjugate of the classical DFT (the characters here use +i in
//! the exponent); the mismatch is deliberate and documented rather than
//! patched over.

use std::ops::AddAssign;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{lift, QuotientKind, QuotientSpace, Space, SpaceFunction};
use crate::linalg::{CMat, C};
use crate::repr::{adapt_subgroup, IrrepSystem, SubgroupAdapter};

/// Per-irrep Fourier components. For a function with n x m matrix values
/// the component of an irrep of dimension d is an (n d) x (m d) block
/// matrix, one d x d block per channel pair.
pub struct FourierTransform {
    pub system: Arc<IrrepSystem>,
    pub shape: (usize, usize),
    pub components: Vec<CMat>,
}

impl FourierTransform {
    pub fn component(&self, label: &str) -> Option<&CMat> {
        self.system
            .irreps
            .iter()
            .position(|i| i.label == label)
            .map(|idx| &self.components[idx])
    }

    /// The d x d channel block (i, j) of a component.
    pub fn block(&self, irrep_idx: usize, i: usize, j: usize) -> CMat {
        let d = self.system.irreps[irrep_idx].dim;
        self.components[irrep_idx]
            .view((i * d, j * d), (d, d))
            .into_owned()
    }

    pub fn max_abs_diff(&self, other: &FourierTransform) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| crate::linalg::max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }
}

/// Forward transform; quotient-space functions are lifted to G internally.
pub fn fourier(f: &SpaceFunction, sys: &Arc<IrrepSystem>) -> Result<FourierTransform> {
    if f.space.group().name != sys.group.name {
        return Err(Error::GroupMismatch(format!(
            "function on {} transformed against a system for {}",
            f.space.group().name,
            sys.group.name
        )));
    }
    let up = lift(f);
    let (rows, cols) = f.shape;
    let components = sys
        .irreps
        .iter()
        .map(|irrep| {
            let d = irrep.dim;
            let mut comp = CMat::zeros(rows * d, cols * d);
            for (u, value) in up.values.iter().enumerate() {
                let rho = &irrep.matrices[u];
                for i in 0..rows {
                    for j in 0..cols {
                        let scaled = rho * value[(i, j)];
                        comp.view_mut((i * d, j * d), (d, d)).add_assign(&scaled);
                    }
                }
            }
            comp
        })
        .collect();
    Ok(FourierTransform {
        system: sys.clone(),
        shape: f.shape,
        components,
    })
}

/// Inverse transform back to a function on the group:
/// f(u) = (1/|G|) sum_rho d_rho tr[F(rho) rho(u^-1)], per channel block.
pub fn inverse_fourier(ft: &FourierTransform) -> SpaceFunction {
    let sys = &ft.system;
    let g = &sys.group;
    let n = g.order;
    let (rows, cols) = ft.shape;
    let mut values = vec![CMat::zeros(rows, cols); n];
    for (irrep, comp) in sys.irreps.iter().zip(&ft.components) {
        let d = irrep.dim;
        let weight = d as f64 / n as f64;
        for (u, value) in values.iter_mut().enumerate() {
            let rho_inv = &irrep.matrices[g.inv(u)];
            for i in 0..rows {
                for j in 0..cols {
                    let block = comp.view((i * d, j * d), (d, d));
                    let mut tr = C::new(0.0, 0.0);
                    for a in 0..d {
                        for b in 0..d {
                            tr += block[(a, b)] * rho_inv[(b, a)];
                        }
                    }
                    value[(i, j)] += tr * C::new(weight, 0.0);
                }
            }
        }
    }
    SpaceFunction {
        space: Space::Group(g.clone()),
        shape: ft.shape,
        values,
    }
}

// ---------------------------------------------------------------------------
// Sparsity
// ---------------------------------------------------------------------------

/// Which entries of each Fourier component may be nonzero in the adapted
/// basis, for functions on one quotient space.
pub struct SparsityMask {
    pub kind: QuotientKind,
    pub h_name: String,
    pub k_name: Option<String>,
    pub irrep_labels: Vec<String>,
    /// Per irrep: allowed rows and allowed columns; the mask is their
    /// product (full rows for LEFT, full columns for RIGHT).
    pub allowed_rows: Vec<Vec<usize>>,
    pub allowed_cols: Vec<Vec<usize>>,
    pub allowed_count: usize,
}

impl SparsityMask {
    pub fn allowed(&self, irrep_idx: usize, r: usize, c: usize) -> bool {
        self.allowed_rows[irrep_idx].contains(&r) && self.allowed_cols[irrep_idx].contains(&c)
    }

    /// Trivial multiplicity bound on the rank of the raw-basis component.
    pub fn rank_bound(&self, irrep_idx: usize) -> usize {
        self.allowed_rows[irrep_idx]
            .len()
            .min(self.allowed_cols[irrep_idx].len())
    }
}

/// A quotient space together with the adapted-basis data of its subgroups:
/// the sparsity mask and the Q matrices needed to check it.
pub struct QuotientAnalysis {
    pub space: Arc<QuotientSpace>,
    pub mask: SparsityMask,
    pub h_adapter: SubgroupAdapter,
    /// Present only for DOUBLE spaces.
    pub k_adapter: Option<SubgroupAdapter>,
}

/// Decompose every irrep over the space's subgroup(s) and derive the mask.
pub fn analyze_quotient(
    space: &Arc<QuotientSpace>,
    sys: &Arc<IrrepSystem>,
) -> Result<QuotientAnalysis> {
    if space.group.name != sys.group.name {
        return Err(Error::GroupMismatch(
            "quotient space and irrep system belong to different groups".into(),
        ));
    }
    let h_adapter = adapt_subgroup(sys, &space.h)?;
    let k_adapter = match space.kind {
        QuotientKind::Double => Some(adapt_subgroup(
            sys,
            space.k.as_ref().expect("double space carries K"),
        )?),
        _ => None,
    };
    let mut allowed_rows = Vec::new();
    let mut allowed_cols = Vec::new();
    let mut count = 0usize;
    for (idx, irrep) in sys.irreps.iter().enumerate() {
        let full: Vec<usize> = (0..irrep.dim).collect();
        let h_trivial = h_adapter.decompositions[idx].trivial_block_columns.clone();
        let (rows, cols) = match space.kind {
            QuotientKind::Left => (full, h_trivial),
            QuotientKind::Right => (h_trivial, full),
            QuotientKind::Double => {
                let k_trivial = k_adapter.as_ref().unwrap().decompositions[idx]
                    .trivial_block_columns
                    .clone();
                (h_trivial, k_trivial)
            }
        };
        count += rows.len() * cols.len();
        allowed_rows.push(rows);
        allowed_cols.push(cols);
    }
    let mask = SparsityMask {
        kind: space.kind,
        h_name: space.h.name.clone(),
        k_name: space.k.as_ref().map(|k| k.name.clone()),
        irrep_labels: sys.irreps.iter().map(|i| i.label.clone()).collect(),
        allowed_rows,
        allowed_cols,
        allowed_count: count,
    };
    // dimension count: allowed entries must match the number of points
    assert_eq!(
        mask.allowed_count,
        space.len(),
        "sparsity mask of {} allows {} entries for {} points",
        space.kind,
        mask.allowed_count,
        space.len()
    );
    Ok(QuotientAnalysis {
        space: space.clone(),
        mask,
        h_adapter,
        k_adapter,
    })
}

/// The mask alone (see [`analyze_quotient`] to keep the adapters too).
pub fn sparsity_mask(space: &Arc<QuotientSpace>, sys: &Arc<IrrepSystem>) -> Result<SparsityMask> {
    Ok(analyze_quotient(space, sys)?.mask)
}

/// Per-irrep outcome of a sparsity check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IrrepSparsity {
    pub label: String,
    pub off_mask: f64,
    pub rank_bound: usize,
    /// Largest raw-basis singular value beyond the allowed rank.
    pub rank_excess: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SparsityReport {
    pub per_irrep: Vec<IrrepSparsity>,
    pub max_off_mask: f64,
    pub max_rank_excess: f64,
    pub allowed_count: usize,
    pub space_size: usize,
    pub tol: f64,
    pub pass: bool,
}

/// Transform `f`, move each component to the adapted basis (F Q_H for LEFT,
/// Q_H^† F for RIGHT, Q_H^† F Q_K for DOUBLE), and report the largest
/// magnitude found at a masked-out entry. Also checks the raw-basis rank
/// bound through singular values. Functions on the full group pass
/// vacuously.
pub fn check_sparsity(
    f: &SpaceFunction,
    sys: &Arc<IrrepSystem>,
    tol: f64,
) -> Result<SparsityReport> {
    match f.space.quotient() {
        None => Ok(SparsityReport {
            per_irrep: Vec::new(),
            max_off_mask: 0.0,
            max_rank_excess: 0.0,
            allowed_count: sys.group.order,
            space_size: sys.group.order,
            tol,
            pass: true,
        }),
        Some(q) => {
            let analysis = analyze_quotient(q, sys)?;
            check_sparsity_with(&analysis, f, sys, tol)
        }
    }
}

/// Same as [`check_sparsity`] but reusing a precomputed analysis.
pub fn check_sparsity_with(
    analysis: &QuotientAnalysis,
    f: &SpaceFunction,
    sys: &Arc<IrrepSystem>,
    tol: f64,
) -> Result<SparsityReport> {
    let ft = fourier(f, sys)?;
    let (rows, cols) = f.shape;
    let mut per_irrep = Vec::new();
    let mut max_off: f64 = 0.0;
    let mut max_excess: f64 = 0.0;
    for (idx, irrep) in sys.irreps.iter().enumerate() {
        let d = irrep.dim;
        let qh = &analysis.h_adapter.decompositions[idx].q;
        let qk = analysis
            .k_adapter
            .as_ref()
            .map(|a| &a.decompositions[idx].q);
        let mut off: f64 = 0.0;
        let mut excess: f64 = 0.0;
        let bound = analysis.mask.rank_bound(idx);
        for i in 0..rows {
            for j in 0..cols {
                let raw = ft.block(idx, i, j);
                let adapted = match analysis.space.kind {
                    QuotientKind::Left => &raw * qh,
                    QuotientKind::Right => qh.adjoint() * &raw,
                    QuotientKind::Double => qh.adjoint() * &raw * qk.unwrap(),
                };
                for r in 0..d {
                    for c in 0..d {
                        if !analysis.mask.allowed(idx, r, c) {
                            off = off.max(adapted[(r, c)].norm());
                        }
                    }
                }
                let svals = raw.singular_values();
                for (k, s) in svals.iter().enumerate() {
                    if k >= bound {
                        excess = excess.max(*s);
                    }
                }
            }
        }
        max_off = max_off.max(off);
        max_excess = max_excess.max(excess);
        per_irrep.push(IrrepSparsity {
            label: irrep.label.clone(),
            off_mask: off,
            rank_bound: bound,
            rank_excess: excess,
        });
    }
    Ok(SparsityReport {
        per_irrep,
        max_off_mask: max_off,
        max_rank_excess: max_excess,
        allowed_count: analysis.mask.allowed_count,
        space_size: analysis.space.len(),
        tol,
        pass: max_off < tol,
    })
}

// ---------------------------------------------------------------------------
// Convolution through the Fourier domain
// ---------------------------------------------------------------------------

/// Multiply two transforms per irrep as block matrices (inner channel
/// dimensions must agree) and invert. With scalar inputs this is exactly
/// the convolution theorem; with matrix values it is the block form of it.
pub fn convolve_fourier(
    f: &SpaceFunction,
    g: &SpaceFunction,
    sys: &Arc<IrrepSystem>,
) -> Result<SpaceFunction> {
    if f.space.group().name != g.space.group().name {
        return Err(Error::GroupMismatch(
            "convolution operands live over different groups".into(),
        ));
    }
    if f.shape.1 != g.shape.0 {
        return Err(Error::ShapeMismatch(format!(
            "cannot chain {}x{} with {}x{} values",
            f.shape.0, f.shape.1, g.shape.0, g.shape.1
        )));
    }
    let ff = fourier(f, sys)?;
    let fg = fourier(g, sys)?;
    let components = ff
        .components
        .iter()
        .zip(&fg.components)
        .zip(&sys.irreps)
        .map(|((a, b), irrep)| {
            let d = irrep.dim;
            let (n, m, k) = (f.shape.0, f.shape.1, g.shape.1);
            let mut out = CMat::zeros(n * d, k * d);
            for i in 0..n {
                for c in 0..k {
                    let mut acc = CMat::zeros(d, d);
                    for j in 0..m {
                        acc += a.view((i * d, j * d), (d, d)) * b.view((j * d, c * d), (d, d));
                    }
                    out.view_mut((i * d, c * d), (d, d)).copy_from(&acc);
                }
            }
            out
        })
        .collect();
    let ft = FourierTransform {
        system: sys.clone(),
        shape: (f.shape.0, g.shape.1),
        components,
    };
    Ok(inverse_fourier(&ft))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{
        build_group, coset_space, subgroup_from_labels, translate, QuotientKind, Space,
        SpaceFunction,
    };
    use crate::linalg::max_abs_diff;
    use crate::repr::build_irrep_system;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delta_transforms_to_identities() {
        let g = build_group("S3").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let delta = SpaceFunction::delta(Space::Group(g.clone()), 0);
        let ft = fourier(&delta, &sys).unwrap();
        for (irrep, comp) in sys.irreps.iter().zip(&ft.components) {
            assert!(max_abs_diff(comp, &CMat::identity(irrep.dim, irrep.dim)) < 1e-12);
        }
    }

    #[test]
    fn constant_transforms_to_trivial_only() {
        let g = build_group("S3").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let one = SpaceFunction::constant(Space::Group(g.clone()), C::new(1.0, 0.0));
        let ft = fourier(&one, &sys).unwrap();
        for (idx, comp) in ft.components.iter().enumerate() {
            if idx == sys.trivial_index {
                assert!((comp[(0, 0)] - C::new(6.0, 0.0)).norm() < 1e-12);
            } else {
                assert!(crate::linalg::max_abs(comp) < 1e-12);
            }
        }
        // inverting the all-identity transform gives the delta back
        let all_identity = FourierTransform {
            system: sys.clone(),
            shape: (1, 1),
            components: sys
                .irreps
                .iter()
                .map(|i| CMat::identity(i.dim, i.dim))
                .collect(),
        };
        let back = inverse_fourier(&all_identity);
        let delta = SpaceFunction::delta(Space::Group(g), 0);
        assert!(back.max_diff(&delta) < 1e-12);
    }

    #[test]
    fn quotient_transform_matches_brute_force_sum() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = SpaceFunction::random(Space::Quotient(x.clone()), (1, 1), &mut rng);
        let ft = fourier(&f, &sys).unwrap();
        for (irrep, comp) in sys.irreps.iter().zip(&ft.components) {
            let mut brute = CMat::zeros(irrep.dim, irrep.dim);
            for u in 0..g.order {
                brute += &irrep.matrices[u] * f.scalar(x.point_of(u));
            }
            assert!(max_abs_diff(comp, &brute) < 1e-12);
        }
    }

    #[test]
    fn round_trip_on_s4() {
        let g = build_group("S4").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = SpaceFunction::random(Space::Group(g), (1, 1), &mut rng);
        let back = inverse_fourier(&fourier(&f, &sys).unwrap());
        assert!(back.max_diff(&f) < 1e-9);
    }

    #[test]
    fn round_trip_matrix_valued() {
        let g = build_group("D4").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let f = SpaceFunction::random(Space::Group(g), (2, 3), &mut rng);
        let back = inverse_fourier(&fourier(&f, &sys).unwrap());
        assert!(back.max_diff(&f) < 1e-9);
    }

    #[test]
    fn translation_theorem_on_z6() {
        let g = build_group("Z6").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = SpaceFunction::random(Space::Group(g.clone()), (1, 1), &mut rng);
        let ft = fourier(&f, &sys).unwrap();
        for t in 0..g.order {
            let shifted = fourier(&translate(t, &f).unwrap(), &sys).unwrap();
            for (idx, irrep) in sys.irreps.iter().enumerate() {
                let expect = &irrep.matrices[t] * &ft.components[idx];
                assert!(max_abs_diff(&shifted.components[idx], &expect) < 1e-10);
            }
        }
    }

    #[test]
    fn sparsity_mask_trivial_subgroup_is_full() {
        let g = build_group("S3").unwrap();
        let h = crate::group::Subgroup::trivial(&g);
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mask = sparsity_mask(&x, &sys).unwrap();
        assert_eq!(mask.allowed_count, 6);
    }

    #[test]
    fn sparsity_mask_s3_over_s2() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mask = sparsity_mask(&x, &sys).unwrap();
        assert_eq!(mask.allowed_count, 3);
        // dims 1 (trivial, allowed), 1 (sign, zero), 2 (standard, one column)
        let mut per_irrep: Vec<usize> = (0..sys.irreps.len())
            .map(|i| mask.allowed_rows[i].len() * mask.allowed_cols[i].len())
            .collect();
        per_irrep.sort_unstable();
        assert_eq!(per_irrep, vec![0, 1, 2]);
    }

    #[test]
    fn sparsity_mask_s4_over_s3() {
        let g = build_group("S4").unwrap();
        let a = g.element_by_label("(12)").unwrap();
        let b = g.element_by_label("(123)").unwrap();
        let h = crate::group::subgroup_from_generators(&g, &[a, b]).unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mask = sparsity_mask(&x, &sys).unwrap();
        assert_eq!(mask.allowed_count, 4);
        // only (4) and (3,1) carry allowed columns
        for (i, irrep) in sys.irreps.iter().enumerate() {
            let allowed = mask.allowed_rows[i].len() * mask.allowed_cols[i].len();
            match irrep.label.as_str() {
                "(4)" => assert_eq!(allowed, 1),
                "(3,1)" => assert_eq!(allowed, 3),
                _ => assert_eq!(allowed, 0, "{}", irrep.label),
            }
        }
    }

    #[test]
    fn random_quotient_functions_obey_the_mask() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for kind in [
            QuotientKind::Left,
            QuotientKind::Right,
            QuotientKind::Double,
        ] {
            let k = if kind == QuotientKind::Double {
                Some(&h)
            } else {
                None
            };
            let x = coset_space(kind, &h, k).unwrap();
            let f = SpaceFunction::random(Space::Quotient(x.clone()), (1, 1), &mut rng);
            let report = check_sparsity(&f, &sys, 1e-9).unwrap();
            assert!(report.pass, "{kind}: off-mask {}", report.max_off_mask);
            assert_eq!(report.allowed_count, x.len());
            assert!(report.max_rank_excess < 1e-9);
        }
    }

    #[test]
    fn full_group_function_passes_vacuously() {
        let g = build_group("S3").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = SpaceFunction::random(Space::Group(g), (1, 1), &mut rng);
        let report = check_sparsity(&f, &sys, 1e-9).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn fourier_convolution_matches_circular_convolution_on_z12() {
        let g = build_group("Z12").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = SpaceFunction::random(Space::Group(g.clone()), (1, 1), &mut rng);
        let h = SpaceFunction::random(Space::Group(g.clone()), (1, 1), &mut rng);
        let viaft = convolve_fourier(&f, &h, &sys).unwrap();
        let n = g.order;
        for u in 0..n {
            let direct: C = (0..n)
                .map(|v| f.scalar((u + n - v) % n) * h.scalar(v))
                .sum();
            assert!((viaft.scalar(u) - direct).norm() < 1e-9);
        }
    }

    #[test]
    fn plancherel_inner_product() {
        let g = build_group("S4").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let f = SpaceFunction::random(Space::Group(g.clone()), (1, 1), &mut rng);
        let h = SpaceFunction::random(Space::Group(g.clone()), (1, 1), &mut rng);
        let direct: C = (0..g.order).map(|u| f.scalar(u).conj() * h.scalar(u)).sum();
        let ff = fourier(&f, &sys).unwrap();
        let fh = fourier(&h, &sys).unwrap();
        let mut viaft = C::new(0.0, 0.0);
        for (idx, irrep) in sys.irreps.iter().enumerate() {
            let prod = ff.components[idx].adjoint() * &fh.components[idx];
            viaft += prod.trace() * C::new(irrep.dim as f64 / g.order as f64, 0.0);
        }
        assert!((direct - viaft).norm() < 1e-9);
    }
}
