//! Complete systems of unitary irreducible representations, and the
//! restriction/decomposition machinery that adapts a group's irreps to a
//! subgroup (the unitary Q change of basis that block-diagonalizes every
//! restricted matrix).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupFamily, Subgroup};
use crate::linalg::{max_abs_diff, orthonormal_column_space, CMat, C};
use crate::numeric::numeric_irreps;
use crate::young;

/// A unitary irreducible representation with one matrix per element id.
#[derive(Debug, Clone)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    pub matrices: Vec<CMat>,
}

impl Irrep {
    pub fn character(&self) -> Vec<C> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }
}

/// A complete set of inequivalent irreps of a group.
#[derive(Debug)]
pub struct IrrepSystem {
    pub group: Arc<FiniteGroup>,
    pub irreps: Vec<Irrep>,
    pub trivial_index: usize,
}

/// Residuals from checking a system's defining invariants.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IrrepChecks {
    pub homomorphism: f64,
    pub unitarity: f64,
    pub identity: f64,
    pub dim_square_sum: usize,
    pub completeness_ok: bool,
    pub character_orthogonality: f64,
}

impl IrrepChecks {
    pub fn max_residual(&self) -> f64 {
        self.homomorphism
            .max(self.unitarity)
            .max(self.identity)
            .max(self.character_orthogonality)
    }
}

impl IrrepSystem {
    pub fn trivial(&self) -> &Irrep {
        &self.irreps[self.trivial_index]
    }

    pub fn irrep_by_label(&self, label: &str) -> Option<&Irrep> {
        self.irreps.iter().find(|i| i.label == label)
    }

    /// Homomorphism, unitarity, identity, completeness, and character
    /// orthogonality residuals. The homomorphism check is exhaustive for
    /// |G| <= 24 and generator-complete beyond that.
    pub fn check(&self) -> IrrepChecks {
        let g = &self.group;
        let n = g.order;
        let mut hom: f64 = 0.0;
        let mut unit: f64 = 0.0;
        let mut ident: f64 = 0.0;
        let lefts: Vec<usize> = if n <= 24 {
            (0..n).collect()
        } else {
            g.generators().to_vec()
        };
        for irrep in &self.irreps {
            let eye = CMat::identity(irrep.dim, irrep.dim);
            ident = ident.max(max_abs_diff(&irrep.matrices[0], &eye));
            for u in 0..n {
                unit = unit.max(max_abs_diff(
                    &(irrep.matrices[u].adjoint() * &irrep.matrices[u]),
                    &eye,
                ));
                for &w in &lefts {
                    let prod = &irrep.matrices[w] * &irrep.matrices[u];
                    hom = hom.max(max_abs_diff(&prod, &irrep.matrices[g.mul(w, u)]));
                }
            }
        }
        let dim_square_sum: usize = self.irreps.iter().map(|i| i.dim * i.dim).sum();
        let chars: Vec<Vec<C>> = self.irreps.iter().map(|i| i.character()).collect();
        let mut ortho: f64 = 0.0;
        for i in 0..chars.len() {
            for j in 0..chars.len() {
                let ip: C = chars[i]
                    .iter()
                    .zip(&chars[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum::<C>()
                    / C::new(n as f64, 0.0);
                let target = if i == j {
                    C::new(1.0, 0.0)
                } else {
                    C::new(0.0, 0.0)
                };
                ortho = ortho.max((ip - target).norm());
            }
        }
        IrrepChecks {
            homomorphism: hom,
            unitarity: unit,
            identity: ident,
            dim_square_sum,
            completeness_ok: dim_square_sum == n,
            character_orthogonality: ortho,
        }
    }
}

/// Build the complete irrep system of a group produced by `build_group`
/// (or of a subgroup rebuilt over its own Cayley table, which falls back to
/// a numerical decomposition of the regular representation).
pub fn build_irrep_system(g: &Arc<FiniteGroup>) -> Result<Arc<IrrepSystem>> {
    let irreps = match &g.family {
        GroupFamily::Cyclic { n } => cyclic_irreps(*n),
        GroupFamily::Dihedral { n } => dihedral_irreps(*n),
        GroupFamily::Symmetric { n, perms } => symmetric_irreps(g, *n, perms),
        GroupFamily::Product { factors } => product_irreps(g, factors)?,
        GroupFamily::Table => numeric_irreps(g)?,
    };
    let trivial_index = irreps
        .iter()
        .position(|i| i.is_trivial_fast())
        .ok_or_else(|| Error::Invalid(format!("no trivial irrep found for {}", g.name)))?;
    let sys = IrrepSystem {
        group: g.clone(),
        irreps,
        trivial_index,
    };
    let checks = sys.check();
    if !checks.completeness_ok || checks.max_residual() > 1e-10 {
        return Err(Error::Invalid(format!(
            "irrep system for {} fails construction checks: residual {:.3e}, sum d^2 = {}",
            g.name,
            checks.max_residual(),
            checks.dim_square_sum
        )));
    }
    Ok(Arc::new(sys))
}

/// Characters rho_j(k) = exp(2*pi*i*j*k/n). Note the +i sign: the classical
/// DFT convention uses exp(-2*pi*i*j*k/n), so on Z_n this transform is the
/// conjugate of the usual DFT.
fn cyclic_irreps(n: usize) -> Vec<Irrep> {
    (0..n)
        .map(|j| {
            let matrices = (0..n)
                .map(|k| {
                    let angle = 2.0 * std::f64::consts::PI * (j * k % n) as f64 / n as f64;
                    CMat::from_element(1, 1, C::new(angle.cos(), angle.sin()))
                })
                .collect();
            Irrep {
                label: j.to_string(),
                dim: 1,
                matrices,
            }
        })
        .collect()
}

/// The standard one- and two-dimensional real orthogonal irreps of the
/// dihedral group of order 2n (element id = b*n + a encodes r^a s^b).
fn dihedral_irreps(n: usize) -> Vec<Irrep> {
    let order = 2 * n;
    let decode = |id: usize| (id % n, id / n);
    let mut out = Vec::new();
    let one_dim = |f: &dyn Fn(usize, usize) -> f64, label: &str| Irrep {
        label: label.to_string(),
        dim: 1,
        matrices: (0..order)
            .map(|id| {
                let (a, b) = decode(id);
                CMat::from_element(1, 1, C::new(f(a, b), 0.0))
            })
            .collect(),
    };
    out.push(one_dim(&|_, _| 1.0, "A1"));
    out.push(one_dim(&|_, b| if b == 0 { 1.0 } else { -1.0 }, "A2"));
    if n.is_multiple_of(2) {
        out.push(one_dim(
            &|a, _| if a.is_multiple_of(2) { 1.0 } else { -1.0 },
            "B1",
        ));
        out.push(one_dim(
            &|a, b| if (a + b) % 2 == 0 { 1.0 } else { -1.0 },
            "B2",
        ));
    }
    let two_dim_count = if n.is_multiple_of(2) {
        n / 2 - 1
    } else {
        (n - 1) / 2
    };
    for j in 1..=two_dim_count {
        let matrices = (0..order)
            .map(|id| {
                let (a, b) = decode(id);
                let t = 2.0 * std::f64::consts::PI * (j * a) as f64 / n as f64;
                let (c, s) = (t.cos(), t.sin());
                if b == 0 {
                    CMat::from_row_slice(
                        2,
                        2,
                        &[
                            C::new(c, 0.0),
                            C::new(-s, 0.0),
                            C::new(s, 0.0),
                            C::new(c, 0.0),
                        ],
                    )
                } else {
                    CMat::from_row_slice(
                        2,
                        2,
                        &[
                            C::new(c, 0.0),
                            C::new(s, 0.0),
                            C::new(s, 0.0),
                            C::new(-c, 0.0),
                        ],
                    )
                }
            })
            .collect();
        out.push(Irrep {
            label: format!("E{j}"),
            dim: 2,
            matrices,
        });
    }
    out
}

/// Irreps of S_n indexed by integer partitions, in the orthogonal
/// (real unitary) tableau basis. Matrices for all elements are grown from
/// the adjacent-transposition matrices along a breadth-first walk of the
/// Cayley graph.
fn symmetric_irreps(g: &Arc<FiniteGroup>, n: usize, perms: &[Vec<u8>]) -> Vec<Irrep> {
    // element ids of the adjacent transpositions (k, k+1)
    let adjacent_ids: Vec<usize> = (0..n.saturating_sub(1))
        .map(|k| {
            let mut t: Vec<u8> = (0..n as u8).collect();
            t.swap(k, k + 1);
            perms.iter().position(|p| *p == t).unwrap()
        })
        .collect();
    young::partitions(n)
        .into_iter()
        .map(|shape| {
            let gens = young::transposition_matrices(&shape);
            let dim = if gens.is_empty() { 1 } else { gens[0].nrows() };
            let mut matrices: Vec<Option<CMat>> = vec![None; g.order];
            matrices[0] = Some(CMat::identity(dim, dim));
            let mut queue = std::collections::VecDeque::from([0usize]);
            while let Some(u) = queue.pop_front() {
                let current = matrices[u].clone().unwrap();
                for (k, &sid) in adjacent_ids.iter().enumerate() {
                    let v = g.mul(sid, u);
                    if matrices[v].is_none() {
                        matrices[v] = Some(&gens[k] * &current);
                        queue.push_back(v);
                    }
                }
            }
            Irrep {
                label: young::partition_label(&shape),
                dim,
                matrices: matrices.into_iter().map(Option::unwrap).collect(),
            }
        })
        .collect()
}

/// All tensor products of factor irreps, enumerated with the first factor
/// most significant, matching the element id encoding.
fn product_irreps(g: &Arc<FiniteGroup>, factors: &[Arc<FiniteGroup>]) -> Result<Vec<Irrep>> {
    let systems: Vec<Arc<IrrepSystem>> = factors
        .iter()
        .map(build_irrep_system)
        .collect::<Result<Vec<_>>>()?;
    let sizes: Vec<usize> = factors.iter().map(|f| f.order).collect();
    let counts: Vec<usize> = systems.iter().map(|s| s.irreps.len()).collect();
    let mut combos = vec![vec![0usize; counts.len()]];
    for (i, &c) in counts.iter().enumerate() {
        let mut next = Vec::new();
        for combo in combos {
            for j in 0..c {
                let mut ext = combo.clone();
                ext[i] = j;
                next.push(ext);
            }
        }
        combos = next;
    }
    // restore most-significant-first enumeration order
    combos.sort();
    let decode = |mut id: usize| -> Vec<usize> {
        let mut parts = vec![0usize; sizes.len()];
        for i in (0..sizes.len()).rev() {
            parts[i] = id % sizes[i];
            id /= sizes[i];
        }
        parts
    };
    Ok(combos
        .into_iter()
        .map(|combo| {
            let parts_irreps: Vec<&Irrep> = combo
                .iter()
                .enumerate()
                .map(|(i, &j)| &systems[i].irreps[j])
                .collect();
            let label = parts_irreps
                .iter()
                .map(|i| i.label.clone())
                .collect::<Vec<_>>()
                .join("|");
            let dim = parts_irreps.iter().map(|i| i.dim).product();
            let matrices = (0..g.order)
                .map(|id| {
                    let parts = decode(id);
                    let mut m = parts_irreps[0].matrices[parts[0]].clone();
                    for (ir, &p) in parts_irreps.iter().zip(&parts).skip(1) {
                        m = m.kronecker(&ir.matrices[p]);
                    }
                    m
                })
                .collect();
            Irrep {
                label,
                dim,
                matrices,
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Restriction and decomposition
// ---------------------------------------------------------------------------

/// The restriction of an irrep to a subgroup: one matrix per member of H,
/// in member order. A valid (generally reducible) representation of H.
pub fn restrict(rho: &Irrep, h: &Subgroup) -> Vec<CMat> {
    h.members.iter().map(|&m| rho.matrices[m].clone()).collect()
}

/// Sum of rho over the whole group; zero for nontrivial irreps and (|G|)
/// for the trivial one.
pub fn group_sum(rho: &Irrep) -> CMat {
    let mut acc = CMat::zeros(rho.dim, rho.dim);
    for m in &rho.matrices {
        acc += m;
    }
    acc
}

/// Multiplicity of the trivial representation in rho restricted to H,
/// computed as the averaged character sum.
pub fn trivial_multiplicity(rho: &Irrep, h: &Subgroup) -> Result<usize> {
    let sum: C = h.members.iter().map(|&m| rho.matrices[m].trace()).sum();
    let avg = sum / C::new(h.order() as f64, 0.0);
    let rounded = avg.re.round();
    let residual = (avg - C::new(rounded, 0.0)).norm();
    if residual >= 1e-8 || rounded < 0.0 {
        return Err(Error::RoundingResidual {
            residual,
            tol: 1e-8,
        });
    }
    Ok(rounded as usize)
}

/// A block in the adapted decomposition: which H-irrep it carries, its
/// starting row/column in Q-adapted coordinates, and its dimension.
#[derive(Debug, Clone)]
pub struct DecompositionBlock {
    pub h_label: String,
    pub start: usize,
    pub dim: usize,
}

/// The unitary change of basis Q making every restricted matrix
/// block-diagonal, together with the block layout.
#[derive(Debug, Clone)]
pub struct RestrictionDecomposition {
    pub parent_label: String,
    pub q: CMat,
    pub blocks: Vec<DecompositionBlock>,
    pub trivial_block_columns: Vec<usize>,
    pub multiplicities: Vec<(String, usize)>,
    pub residual: f64,
}

/// Decompose rho restricted to H into H-irreps: find unitary Q with
/// Q^† rho(h) Q = mu_1(h) + mu_2(h) + ... (direct sum) for all h in H.
///
/// For each H-irrep the projector onto vectors transforming as its first
/// basis vector is orthonormalized (largest pivot first), and partner
/// vectors are generated with the matrix-element operators, which fixes the
/// intertwiner alignment without group-specific branching rules.
pub fn decompose_restriction(
    rho: &Irrep,
    h: &Subgroup,
    sys_h: &IrrepSystem,
) -> Result<RestrictionDecomposition> {
    let hn = h.order();
    if sys_h.group.order != hn {
        return Err(Error::GroupMismatch(
            "sys_h must be a complete irrep system for H as a standalone group".into(),
        ));
    }
    let restricted = restrict(rho, h);
    let d = rho.dim;
    let mut q_columns: Vec<CMat> = Vec::new(); // d x d_mu blocks
    let mut blocks = Vec::new();
    let mut trivial_block_columns = Vec::new();
    let mut multiplicities = Vec::new();
    let mut start = 0usize;
    for (mu_idx, mu) in sys_h.irreps.iter().enumerate() {
        let dm = mu.dim;
        // multiplicity from characters
        let ip: C = (0..hn)
            .map(|i| mu.matrices[i].trace().conj() * restricted[i].trace())
            .sum::<C>()
            / C::new(hn as f64, 0.0);
        let m_rounded = ip.re.round();
        if (ip - C::new(m_rounded, 0.0)).norm() > 1e-8 || m_rounded < 0.0 {
            return Err(Error::DecompositionResidual {
                label: rho.label.clone(),
                residual: (ip - C::new(m_rounded, 0.0)).norm(),
                tol: 1e-8,
            });
        }
        let mult = m_rounded as usize;
        multiplicities.push((mu.label.clone(), mult));
        if mult == 0 {
            continue;
        }
        // projector onto the (1,1) matrix-element isotypic slice
        let mut p11 = CMat::zeros(d, d);
        for i in 0..hn {
            p11 += &restricted[i] * mu.matrices[i][(0, 0)].conj();
        }
        p11 *= C::new(dm as f64 / hn as f64, 0.0);
        let seeds = orthonormal_column_space(&p11, 1e-8);
        if seeds.len() != mult {
            return Err(Error::DecompositionResidual {
                label: rho.label.clone(),
                residual: seeds.len() as f64 - mult as f64,
                tol: 0.0,
            });
        }
        for seed in seeds {
            let mut block = CMat::zeros(d, dm);
            for k in 0..dm {
                // P_{k,1} seed generates the k-th partner vector
                let mut w = nalgebra::DVector::<C>::zeros(d);
                for i in 0..hn {
                    w += &restricted[i] * &seed * mu.matrices[i][(k, 0)].conj();
                }
                w *= C::new(dm as f64 / hn as f64, 0.0);
                block.set_column(k, &w);
            }
            if mu_idx == sys_h.trivial_index {
                trivial_block_columns.push(start);
            }
            blocks.push(DecompositionBlock {
                h_label: mu.label.clone(),
                start,
                dim: dm,
            });
            start += dm;
            q_columns.push(block);
        }
    }
    if start != d {
        return Err(Error::DecompositionResidual {
            label: rho.label.clone(),
            residual: start as f64 - d as f64,
            tol: 0.0,
        });
    }
    let mut q = CMat::zeros(d, d);
    let mut col = 0usize;
    for block in &q_columns {
        for j in 0..block.ncols() {
            q.set_column(col, &block.column(j));
            col += 1;
        }
    }
    // verify unitarity and the block-diagonal form
    let mut residual = max_abs_diff(&(q.adjoint() * &q), &CMat::identity(d, d));
    for (i, _) in h.members.iter().enumerate() {
        let conj = q.adjoint() * &restricted[i] * &q;
        let mut target = CMat::zeros(d, d);
        for b in &blocks {
            let mu = sys_h.irrep_by_label(&b.h_label).unwrap();
            target
                .view_mut((b.start, b.start), (b.dim, b.dim))
                .copy_from(&mu.matrices[i]);
        }
        residual = residual.max(max_abs_diff(&conj, &target));
    }
    if residual > 1e-9 {
        return Err(Error::DecompositionResidual {
            label: rho.label.clone(),
            residual,
            tol: 1e-9,
        });
    }
    Ok(RestrictionDecomposition {
        parent_label: rho.label.clone(),
        q,
        blocks,
        trivial_block_columns,
        multiplicities,
        residual,
    })
}

/// Everything needed to adapt a full irrep system to one subgroup: the
/// standalone rebuild of H, its irrep system, and the decomposition of
/// every G-irrep over it.
pub struct SubgroupAdapter {
    pub subgroup: Subgroup,
    pub standalone: Arc<FiniteGroup>,
    pub system: Arc<IrrepSystem>,
    pub decompositions: Vec<RestrictionDecomposition>,
}

pub fn adapt_subgroup(sys: &IrrepSystem, h: &Subgroup) -> Result<SubgroupAdapter> {
    if h.parent.name != sys.group.name {
        return Err(Error::GroupMismatch(format!(
            "subgroup of {} adapted against a system for {}",
            h.parent.name, sys.group.name
        )));
    }
    let standalone = h.standalone()?;
    let system = build_irrep_system(&standalone)?;
    let decompositions = sys
        .irreps
        .iter()
        .map(|rho| decompose_restriction(rho, h, &system))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubgroupAdapter {
        subgroup: h.clone(),
        standalone,
        system,
        decompositions,
    })
}
