//! Equivariance of linear maps between quotient spaces, made executable:
//! check the commutation residual of a map, solve for the complete basis of
//! equivariant maps, verify that equivariant maps act on each Fourier
//! component by right multiplication, and extract the convolution filter
//! realizing any equivariant map.

use std::sync::Arc;

use crate::convolution::{convolve_case3, Filter, ProductMode};
use crate::error::{Error, Result};
use crate::fourier::{
    analyze_quotient, fourier, inverse_fourier, FourierTransform, QuotientAnalysis,
};
use crate::group::{
    coset_space, project, QuotientKind, QuotientSpace, Space, SpaceFunction, Subgroup,
};
use crate::linalg::{frobenius_inner, max_abs, max_abs_diff, nullspace_real, CMat, RMat, C};
use crate::repr::IrrepSystem;

/// A linear map between value vectors of scalar functions on two spaces, in
/// canonical point order. Rows index the codomain, columns the domain.
pub struct LinearMap {
    pub domain: Space,
    pub codomain: Space,
    pub matrix: CMat,
}

impl LinearMap {
    pub fn new(domain: Space, codomain: Space, matrix: CMat) -> Result<LinearMap> {
        if matrix.nrows() != codomain.len() || matrix.ncols() != domain.len() {
            return Err(Error::ShapeMismatch(format!(
                "map matrix is {}x{} but the spaces have {} and {} points",
                matrix.nrows(),
                matrix.ncols(),
                codomain.len(),
                domain.len()
            )));
        }
        left_like(&domain)?;
        left_like(&codomain)?;
        Ok(LinearMap {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn identity(space: Space) -> LinearMap {
        let n = space.len();
        LinearMap {
            domain: space.clone(),
            codomain: space,
            matrix: CMat::identity(n, n),
        }
    }

    /// Apply to a scalar function on the domain.
    pub fn apply(&self, f: &SpaceFunction) -> Result<SpaceFunction> {
        if !f.space.same_as(&self.domain) {
            return Err(Error::GroupMismatch(
                "function is not on the map's domain".into(),
            ));
        }
        if f.shape != (1, 1) {
            return Err(Error::ShapeMismatch(
                "linear maps act on scalar functions".into(),
            ));
        }
        let vec = nalgebra::DVector::<C>::from_iterator(
            f.values.len(),
            f.values.iter().map(|m| m[(0, 0)]),
        );
        let out = &self.matrix * vec;
        Ok(SpaceFunction {
            space: self.codomain.clone(),
            shape: (1, 1),
            values: out.iter().map(|&z| CMat::from_element(1, 1, z)).collect(),
        })
    }
}

fn left_like(space: &Space) -> Result<()> {
    match space {
        Space::Group(_) => Ok(()),
        Space::Quotient(q) if q.kind == QuotientKind::Left => Ok(()),
        _ => Err(Error::KindMismatch(
            "equivariance is checked between LEFT quotients (or the full group)".into(),
        )),
    }
}

/// Permutation matrix of the translation action of g on a space's points:
/// P e_x = e_{g.x}.
pub fn action_matrix(space: &Space, g: usize) -> Result<RMat> {
    let n = space.len();
    let mut p = RMat::zeros(n, n);
    for x in 0..n {
        p[(space.act(g, x)?, x)] = 1.0;
    }
    Ok(p)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EquivarianceReport {
    pub per_generator: Vec<(String, f64)>,
    pub max_residual: f64,
    pub worst_generator: String,
    pub tol: f64,
    pub pass: bool,
}

/// Residual of the commutative diagram phi . T_g = T'_g . phi over the
/// group's generators (sufficient, since the actions are homomorphisms).
pub fn check_map_equivariance(map: &LinearMap, tol: f64) -> Result<EquivarianceReport> {
    if map.domain.group().name != map.codomain.group().name {
        return Err(Error::GroupMismatch(
            "domain and codomain belong to different groups".into(),
        ));
    }
    let grp = map.domain.group().clone();
    let complexify = |m: RMat| m.map(|x| C::new(x, 0.0));
    let mut per_generator = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut worst = "e".to_string();
    for &g in grp.generators() {
        let p_in = complexify(action_matrix(&map.domain, g)?);
        let p_out = complexify(action_matrix(&map.codomain, g)?);
        let residual = max_abs(&(&p_out * &map.matrix - &map.matrix * &p_in));
        if residual > max_residual {
            max_residual = residual;
            worst = grp.label(g).to_string();
        }
        per_generator.push((grp.label(g).to_string(), residual));
    }
    Ok(EquivarianceReport {
        per_generator,
        max_residual,
        worst_generator: worst,
        tol,
        pass: max_residual < tol,
    })
}

/// An orthonormal basis (in the Frobenius inner product) of all equivariant
/// linear maps between two spaces, with its Gram matrix and the singular
/// values of the constraint system it was solved from.
pub struct EquivariantBasis {
    pub maps: Vec<LinearMap>,
    pub gram: CMat,
    pub singular_values: Vec<f64>,
    pub rank_threshold: f64,
}

/// Solve the null space of the stacked constraints P^out_g M - M P^in_g = 0
/// over the generators. The constraint matrix has entries in {0, +1, -1},
/// so the kernel is computed over the reals and complexified; the basis is
/// orthonormal with each element's largest entry made real positive.
///
/// Errors when singular values fall near the rank threshold (within a
/// factor of 10 of 1e-7 relative) instead of silently picking a side, and
/// when the dimension disagrees with the double-coset count.
pub fn solve_equivariant_basis(x_in: &Space, x_out: &Space) -> Result<EquivariantBasis> {
    left_like(x_in)?;
    left_like(x_out)?;
    if x_in.group().name != x_out.group().name {
        return Err(Error::GroupMismatch(
            "domain and codomain belong to different groups".into(),
        ));
    }
    let grp = x_in.group().clone();
    let n_in = x_in.len();
    let n_out = x_out.len();
    let n = n_in * n_out;
    let gens: Vec<usize> = grp.generators().to_vec();
    let rows = n * gens.len().max(1);
    let mut a = RMat::zeros(rows, n);
    for (gi, &g) in gens.iter().enumerate() {
        // act tables for this generator
        let act_out: Vec<usize> = (0..n_out).map(|x| x_out.act(g, x)).collect::<Result<_>>()?;
        let act_in: Vec<usize> = (0..n_in).map(|x| x_in.act(g, x)).collect::<Result<_>>()?;
        for r in 0..n_out {
            for c in 0..n_in {
                let row = gi * n + r * n_in + c;
                let moved = act_out[r] * n_in + act_in[c];
                let fixed = r * n_in + c;
                a[(row, moved)] += 1.0;
                a[(row, fixed)] -= 1.0;
            }
        }
    }
    let rel_tol = 1e-7;
    let ns = nullspace_real(&a, rel_tol);
    if !ns.ambiguous.is_empty() {
        return Err(Error::RankAmbiguity {
            values: ns.ambiguous.clone(),
            threshold: ns.cut,
        });
    }
    // independent dimension check through coset enumeration
    let expected = double_coset_count(x_in, x_out)?;
    if ns.basis.len() != expected {
        return Err(Error::Invalid(format!(
            "equivariant basis dimension {} disagrees with the double-coset count {}",
            ns.basis.len(),
            expected
        )));
    }
    let mut maps = Vec::with_capacity(ns.basis.len());
    for v in &ns.basis {
        let mut m = CMat::from_fn(n_out, n_in, |r, c| C::new(v[r * n_in + c], 0.0));
        crate::linalg::fix_phase(&mut m);
        maps.push(LinearMap {
            domain: x_in.clone(),
            codomain: x_out.clone(),
            matrix: m,
        });
    }
    // exhaustive cross-check at small order: generators were enough
    if grp.order <= 24 {
        for map in &maps {
            for g in 0..grp.order {
                let p_in = action_matrix(x_in, g)?.map(|x| C::new(x, 0.0));
                let p_out = action_matrix(x_out, g)?.map(|x| C::new(x, 0.0));
                let res = max_abs(&(&p_out * &map.matrix - &map.matrix * &p_in));
                if res > 1e-10 {
                    return Err(Error::Invalid(format!(
                        "basis element violates the full-group constraint at {} by {res:.3e}",
                        grp.label(g)
                    )));
                }
            }
        }
    }
    let k = maps.len();
    let gram = CMat::from_fn(k, k, |i, j| {
        frobenius_inner(&maps[i].matrix, &maps[j].matrix)
    });
    Ok(EquivariantBasis {
        maps,
        gram,
        singular_values: ns.singular_values,
        rank_threshold: rel_tol,
    })
}

/// |H\G/K| for domain G/H and codomain G/K, by coset enumeration.
fn double_coset_count(x_in: &Space, x_out: &Space) -> Result<usize> {
    let h = match x_in {
        Space::Group(g) => Subgroup::trivial(g),
        Space::Quotient(q) => q.h.clone(),
    };
    let k = match x_out {
        Space::Group(g) => Subgroup::trivial(g),
        Space::Quotient(q) => q.h.clone(),
    };
    Ok(coset_space(QuotientKind::Double, &h, Some(&k))?.len())
}

// ---------------------------------------------------------------------------
// Fourier-domain structure of equivariant maps
// ---------------------------------------------------------------------------

/// The fitted right-multiplication data for one irrep.
pub struct IrrepBlockFit {
    pub label: String,
    /// Adapted-basis coefficient matrix, nonzero only at (allowed input
    /// columns) x (allowed output columns).
    pub c_adapted: CMat,
    /// Raw-basis right-multiplier B = Q_H C Q_K^†.
    pub b_matrix: CMat,
    /// Deviation from exact M -> M B structure over the probe basis.
    pub fit_residual: f64,
    /// Largest magnitude this irrep's probes produced in other irreps.
    pub leakage: f64,
    /// True when a trivial block appears with multiplicity > 1 on either
    /// side, so B acts on several allowed columns at once.
    pub degenerate_multiplicity: bool,
}

pub struct FourierBlocks {
    pub per_irrep: Vec<IrrepBlockFit>,
    pub max_fit_residual: f64,
    pub max_leakage: f64,
}

fn as_left_quotient(space: &Space) -> Result<Arc<QuotientSpace>> {
    match space {
        Space::Quotient(q) if q.kind == QuotientKind::Left => Ok(q.clone()),
        Space::Group(g) => coset_space(QuotientKind::Left, &Subgroup::trivial(g), None),
        _ => Err(Error::KindMismatch(
            "expected a LEFT quotient or the group".into(),
        )),
    }
}

/// A scalar function on `target` whose transform has a single nonzero
/// component: adapted matrix E_{(row a, column t)} at the given irrep.
/// `target` must be the space the analysis describes (or the bare group
/// when the analysis is over the trivial subgroup).
fn probe_function(
    analysis: &QuotientAnalysis,
    sys: &Arc<IrrepSystem>,
    irrep_idx: usize,
    a: usize,
    t: usize,
    target: &Space,
) -> Result<SpaceFunction> {
    let components: Vec<CMat> = sys
        .irreps
        .iter()
        .enumerate()
        .map(|(idx, irrep)| {
            let d = irrep.dim;
            if idx == irrep_idx {
                let mut e = CMat::zeros(d, d);
                e[(a, t)] = C::new(1.0, 0.0);
                // adapted A = F Q  =>  F = A Q^†
                &e * analysis.h_adapter.decompositions[idx].q.adjoint()
            } else {
                CMat::zeros(d, d)
            }
        })
        .collect();
    let ft = FourierTransform {
        system: sys.clone(),
        shape: (1, 1),
        components,
    };
    let on_group = inverse_fourier(&ft);
    match target {
        Space::Group(_) => Ok(on_group),
        Space::Quotient(_) => project(&on_group, &analysis.space),
    }
}

/// Conjugate an equivariant map into the Fourier domain and fit, per irrep,
/// the matrix B acting by right multiplication on the sparsity-allowed
/// columns; verifies isotypic preservation (no cross-irrep leakage) along
/// the way. Errors if the fit residual exceeds 1e-8, which would contradict
/// the right-multiplication structure.
pub fn fourier_blocks_of_map(map: &LinearMap, sys: &Arc<IrrepSystem>) -> Result<FourierBlocks> {
    let domain_q = as_left_quotient(&map.domain)?;
    let codomain_q = as_left_quotient(&map.codomain)?;
    let in_analysis = analyze_quotient(&domain_q, sys)?;
    let out_analysis = analyze_quotient(&codomain_q, sys)?;
    fourier_blocks_with(map, sys, &in_analysis, &out_analysis)
}

/// Same as [`fourier_blocks_of_map`] with precomputed analyses.
pub fn fourier_blocks_with(
    map: &LinearMap,
    sys: &Arc<IrrepSystem>,
    in_analysis: &QuotientAnalysis,
    out_analysis: &QuotientAnalysis,
) -> Result<FourierBlocks> {
    let mut per_irrep = Vec::new();
    let mut max_fit: f64 = 0.0;
    let mut max_leak: f64 = 0.0;
    for (idx, irrep) in sys.irreps.iter().enumerate() {
        let d = irrep.dim;
        let t_in = in_analysis.mask.allowed_cols[idx].clone();
        let t_out = out_analysis.mask.allowed_cols[idx].clone();
        let qh = &in_analysis.h_adapter.decompositions[idx].q;
        let qk = &out_analysis.h_adapter.decompositions[idx].q;
        let mut c = CMat::zeros(d, d);
        let mut fit: f64 = 0.0;
        let mut leak: f64 = 0.0;
        // accumulate row estimates of C across probe rows a, then measure
        // the deviation of every probe from the fitted structure
        let mut estimates: Vec<Vec<CMat>> = vec![Vec::new(); t_in.len()];
        for (ti, &t) in t_in.iter().enumerate() {
            for a in 0..d {
                let f = probe_function(in_analysis, sys, idx, a, t, &map.domain)?;
                let out = map.apply(&f)?;
                let out_ft = fourier(&out, sys)?;
                for jdx in 0..sys.irreps.len() {
                    if jdx != idx {
                        leak = leak.max(max_abs(&out_ft.components[jdx]));
                    }
                }
                let adapted = &out_ft.components[idx] * qk;
                // expected: row a of `adapted` carries C[t, :], rows != a zero
                for r in 0..d {
                    for cc in 0..d {
                        if r != a || !t_out.contains(&cc) {
                            fit = fit.max(adapted[(r, cc)].norm());
                        }
                    }
                }
                estimates[ti].push(CMat::from_fn(1, d, |_, cc| adapted[(a, cc)]));
            }
        }
        for (ti, &t) in t_in.iter().enumerate() {
            if estimates[ti].is_empty() {
                continue;
            }
            let mut mean = CMat::zeros(1, d);
            for e in &estimates[ti] {
                mean += e;
            }
            mean.unscale_mut(estimates[ti].len() as f64);
            for &cc in &t_out {
                c[(t, cc)] = mean[(0, cc)];
            }
            for e in &estimates[ti] {
                for &cc in &t_out {
                    fit = fit.max((e[(0, cc)] - c[(t, cc)]).norm());
                }
            }
        }
        let b = qh * &c * qk.adjoint();
        max_fit = max_fit.max(fit);
        max_leak = max_leak.max(leak);
        per_irrep.push(IrrepBlockFit {
            label: irrep.label.clone(),
            c_adapted: c,
            b_matrix: b,
            fit_residual: fit,
            leakage: leak,
            degenerate_multiplicity: t_in.len() > 1 || t_out.len() > 1,
        });
    }
    if max_fit > 1e-8 {
        return Err(Error::Invalid(format!(
            "Fourier components of the map do not fit right multiplication: residual {max_fit:.3e}"
        )));
    }
    Ok(FourierBlocks {
        per_irrep,
        max_fit_residual: max_fit,
        max_leakage: max_leak,
    })
}

/// The matrix of f |-> f * chi as a linear map L(G/H) -> L(G/K), built by
/// convolving the delta function of every domain point.
pub fn conv_operator_matrix(chi: &Filter, x_in: &Arc<QuotientSpace>) -> Result<CMat> {
    let mut columns = Vec::with_capacity(x_in.len());
    let mut n_out = 0;
    for p in 0..x_in.len() {
        let delta = SpaceFunction::delta(Space::Quotient(x_in.clone()), p);
        let out = convolve_case3(&delta, chi)?;
        n_out = out.values.len();
        columns.push(out);
    }
    let mut m = CMat::zeros(n_out, x_in.len());
    for (j, col) in columns.iter().enumerate() {
        for i in 0..n_out {
            m[(i, j)] = col.scalar(i);
        }
    }
    Ok(m)
}

/// Assemble the fitted right-multipliers into a transform, invert it, and
/// project onto H\G/K: the filter that realizes the map as a Case III
/// convolution. The returned residual compares the filter's convolution
/// operator with the original map entrywise; it exceeds 1e-8 only if the
/// fit failed.
pub fn filter_from_map(map: &LinearMap, sys: &Arc<IrrepSystem>) -> Result<(Filter, f64)> {
    let domain_q = as_left_quotient(&map.domain)?;
    let codomain_q = as_left_quotient(&map.codomain)?;
    let in_analysis = analyze_quotient(&domain_q, sys)?;
    let out_analysis = analyze_quotient(&codomain_q, sys)?;
    let blocks = fourier_blocks_with(map, sys, &in_analysis, &out_analysis)?;
    let components: Vec<CMat> = blocks
        .per_irrep
        .iter()
        .map(|fit| fit.b_matrix.clone())
        .collect();
    let ft = FourierTransform {
        system: sys.clone(),
        shape: (1, 1),
        components,
    };
    let on_group = inverse_fourier(&ft);
    let double = coset_space(QuotientKind::Double, &domain_q.h, Some(&codomain_q.h))?;
    let chi_fn = project(&on_group, &double)?;
    let chi = Filter::new(chi_fn, ProductMode::Scalar)?;
    let op = conv_operator_matrix(&chi, &domain_q)?;
    let residual = max_abs_diff(&op, &map.matrix);
    if residual > 1e-8 {
        return Err(Error::Invalid(format!(
            "extracted filter reproduces the map only to {residual:.3e}"
        )));
    }
    Ok((chi, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, subgroup_from_labels, translate};
    use crate::repr::build_irrep_system;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn left_space(spec: &str, gens: &str) -> (Arc<crate::group::FiniteGroup>, Space) {
        let g = build_group(spec).unwrap();
        let h = subgroup_from_labels(&g, gens).unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        (g, Space::Quotient(x))
    }

    #[test]
    fn identity_map_is_equivariant() {
        let (_, x) = left_space("S3", "(12)");
        let map = LinearMap::identity(x);
        let report = check_map_equivariance(&map, 1e-10).unwrap();
        assert!(report.pass);
        assert_eq!(report.max_residual, 0.0);
    }

    #[test]
    fn case3_operator_is_equivariant_and_random_dense_is_not() {
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let d = coset_space(QuotientKind::Double, &h, Some(&h)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let chi = Filter::new(
            SpaceFunction::random(Space::Quotient(d), (1, 1), &mut rng),
            ProductMode::Scalar,
        )
        .unwrap();
        let op = conv_operator_matrix(&chi, &x).unwrap();
        let map =
            LinearMap::new(Space::Quotient(x.clone()), Space::Quotient(x.clone()), op).unwrap();
        assert!(check_map_equivariance(&map, 1e-10).unwrap().pass);

        let noise = CMat::from_fn(x.len(), x.len(), |i, j| {
            C::new(
                ((i * 7 + j * 13) % 5) as f64 - 2.0,
                ((i + 2 * j) % 3) as f64,
            )
        });
        let bad = LinearMap::new(Space::Quotient(x.clone()), Space::Quotient(x), noise).unwrap();
        let report = check_map_equivariance(&bad, 1e-10).unwrap();
        assert!(report.max_residual > 0.1);
    }

    #[test]
    fn circulant_commutant_has_dimension_four() {
        let g = build_group("Z4").unwrap();
        let x = Space::Group(g);
        let basis = solve_equivariant_basis(&x, &x).unwrap();
        assert_eq!(basis.maps.len(), 4);
        // gram is the identity: orthonormal and independent
        assert!(max_abs_diff(&basis.gram, &CMat::identity(4, 4)) < 1e-10);
    }

    #[test]
    fn s3_over_s2_pair_has_two_dimensions() {
        let (_, x) = left_space("S3", "(12)");
        let basis = solve_equivariant_basis(&x, &x).unwrap();
        assert_eq!(basis.maps.len(), 2);
        for map in &basis.maps {
            assert!(check_map_equivariance(map, 1e-10).unwrap().pass);
        }
    }

    #[test]
    fn s4_cross_quotient_dimension_matches_double_cosets() {
        let g = build_group("S4").unwrap();
        let h = subgroup_from_labels(&g, "(12),(123)").unwrap();
        let k = subgroup_from_labels(&g, "(12),(34)").unwrap();
        let x_in = Space::Quotient(coset_space(QuotientKind::Left, &h, None).unwrap());
        let x_out = Space::Quotient(coset_space(QuotientKind::Left, &k, None).unwrap());
        let basis = solve_equivariant_basis(&x_in, &x_out).unwrap();
        let expected = coset_space(QuotientKind::Double, &h, Some(&k))
            .unwrap()
            .len();
        assert_eq!(basis.maps.len(), expected);
    }

    #[test]
    fn identity_fits_identity_blocks() {
        let (_, x) = left_space("S3", "(12)");
        let g = build_group("S3").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let map = LinearMap::identity(x);
        let blocks = fourier_blocks_of_map(&map, &sys).unwrap();
        assert!(blocks.max_fit_residual < 1e-9);
        assert!(blocks.max_leakage < 1e-9);
        for fit in &blocks.per_irrep {
            // C restricted to allowed columns is the identity there
            for (r, row) in fit.c_adapted.row_iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    let expect = if r == c && v.norm() > 0.5 { 1.0 } else { 0.0 };
                    if expect == 1.0 {
                        assert!((v - C::new(1.0, 0.0)).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn right_translation_fits_inverse_irrep_blocks() {
        // on the full group, right translation commutes with the left action
        // and its Fourier blocks are exactly rho(g0^-1)
        let g = build_group("S3").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let x = Space::Group(g.clone());
        let g0 = g.element_by_label("(123)").unwrap();
        let mut m = CMat::zeros(g.order, g.order);
        for u in 0..g.order {
            // (R f)(u) = f(u g0)
            m[(u, g.mul(u, g0))] = C::new(1.0, 0.0);
        }
        let map = LinearMap::new(x.clone(), x, m).unwrap();
        assert!(check_map_equivariance(&map, 1e-10).unwrap().pass);
        let blocks = fourier_blocks_of_map(&map, &sys).unwrap();
        assert!(blocks.max_fit_residual < 1e-9);
        for (irrep, fit) in sys.irreps.iter().zip(&blocks.per_irrep) {
            let expect = &irrep.matrices[g.inv(g0)];
            assert!(
                max_abs_diff(&fit.b_matrix, expect) < 1e-9,
                "{}",
                irrep.label
            );
        }
    }

    #[test]
    fn solved_basis_elements_fit_right_multiplication() {
        let g = build_group("S3").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let (_, x) = left_space("S3", "(12)");
        let basis = solve_equivariant_basis(&x, &x).unwrap();
        for map in &basis.maps {
            let blocks = fourier_blocks_of_map(map, &sys).unwrap();
            assert!(blocks.max_fit_residual < 1e-9);
        }
    }

    #[test]
    fn filter_round_trip_recovers_the_operator() {
        let g = build_group("S3").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let d = coset_space(QuotientKind::Double, &h, Some(&h)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let chi0 = Filter::new(
            SpaceFunction::random(Space::Quotient(d), (1, 1), &mut rng),
            ProductMode::Scalar,
        )
        .unwrap();
        let op = conv_operator_matrix(&chi0, &x).unwrap();
        let map = LinearMap::new(
            Space::Quotient(x.clone()),
            Space::Quotient(x.clone()),
            op.clone(),
        )
        .unwrap();
        let (chi, residual) = filter_from_map(&map, &sys).unwrap();
        assert!(residual < 1e-9);
        // the recovered filter matches chi0 pointwise
        assert!(chi.function.max_diff(&chi0.function) < 1e-8);
    }

    #[test]
    fn identity_map_extracts_scaled_delta_filter() {
        let g = build_group("S3").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let (_, x) = left_space("S3", "(12)");
        let map = LinearMap::identity(x);
        let (chi, residual) = filter_from_map(&map, &sys).unwrap();
        assert!(residual < 1e-9);
        // the unique filter with f * chi = f is (1/|H|) delta at the double
        // coset of the identity
        let space = chi.space().clone();
        for p in 0..space.len() {
            let expect = if space.point_of(0) == p { 0.5 } else { 0.0 };
            assert!((chi.function.scalar(p) - C::new(expect, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn zero_map_extracts_zero_filter() {
        let g = build_group("S3").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let (_, x) = left_space("S3", "(12)");
        let map = LinearMap::new(x.clone(), x.clone(), CMat::zeros(3, 3)).unwrap();
        let (chi, residual) = filter_from_map(&map, &sys).unwrap();
        assert!(residual < 1e-12);
        assert!(chi.function.max_abs() < 1e-12);
    }

    #[test]
    fn left_multiplication_is_excluded() {
        // on the full group every matrix unit is reachable, so fitting
        // M -> B M against a convolution whose Fourier block is not a
        // multiple of the identity must leave a residual bounded away from
        // zero (on single-column quotients the two structures degenerate to
        // the same scalar, so the full group is the discriminating case)
        let g = build_group("S3").unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let x = Space::Group(g.clone());
        let trivial = Subgroup::trivial(&g);
        let d = coset_space(QuotientKind::Double, &trivial, Some(&trivial)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let chi = Filter::new(
            SpaceFunction::random(Space::Quotient(d), (1, 1), &mut rng),
            ProductMode::Scalar,
        )
        .unwrap();
        let gq = coset_space(QuotientKind::Left, &trivial, None).unwrap();
        let op = conv_operator_matrix(&chi, &gq).unwrap();
        let map = LinearMap::new(x.clone(), x.clone(), op).unwrap();
        assert!(check_map_equivariance(&map, 1e-9).unwrap().pass);
        // probe the standard irrep: collect (input, output) Fourier pairs
        let std_idx = sys.irreps.iter().position(|i| i.dim == 2).unwrap();
        let domain_q = as_left_quotient(&x).unwrap();
        let analysis = analyze_quotient(&domain_q, &sys).unwrap();
        let mut ins = Vec::new();
        let mut outs = Vec::new();
        for &t in &analysis.mask.allowed_cols[std_idx] {
            for a in 0..2 {
                let f = probe_function(&analysis, &sys, std_idx, a, t, &map.domain).unwrap();
                let out = map.apply(&f).unwrap();
                ins.push(fourier(&f, &sys).unwrap().components[std_idx].clone());
                outs.push(fourier(&out, &sys).unwrap().components[std_idx].clone());
            }
        }
        // least-squares fit of out = B in over the probes, B vectorized
        let dim = 2;
        let mut a_rows = Vec::new();
        let mut b_rows = Vec::new();
        for (m_in, m_out) in ins.iter().zip(&outs) {
            for r in 0..dim {
                for c in 0..dim {
                    // (B m_in)[r,c] = sum_k B[r,k] m_in[k,c]
                    let mut row = vec![C::new(0.0, 0.0); dim * dim];
                    for k in 0..dim {
                        row[r * dim + k] = m_in[(k, c)];
                    }
                    a_rows.push(row);
                    b_rows.push(m_out[(r, c)]);
                }
            }
        }
        let lhs = CMat::from_fn(a_rows.len(), dim * dim, |i, j| a_rows[i][j]);
        let rhs = CMat::from_fn(b_rows.len(), 1, |i, _| b_rows[i]);
        let sol = crate::linalg::lstsq(&lhs, &rhs, 1e-12);
        let residual = max_abs(&(&lhs * &sol - &rhs));
        assert!(
            residual > 1e-3,
            "left multiplication unexpectedly fit with residual {residual:.3e}"
        );
    }

    #[test]
    fn translations_of_functions_match_map_application() {
        let (g, x) = left_space("S3", "(12)");
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let f = SpaceFunction::random(x.clone(), (1, 1), &mut rng);
        for &gen in g.generators() {
            let p = action_matrix(&x, gen).unwrap().map(|v| C::new(v, 0.0));
            let map = LinearMap::new(x.clone(), x.clone(), p).unwrap();
            let by_map = map.apply(&f).unwrap();
            let by_translate = translate(gen, &f).unwrap();
            assert!(by_map.max_diff(&by_translate) < 1e-12);
        }
    }
}
