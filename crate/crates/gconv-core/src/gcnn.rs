//! Multilayer networks whose linear maps are Case III convolutions over a
//! chain of quotient spaces, forward evaluation, whole-network equivariance
//! certification, and the message-passing chain over k-subset spaces of the
//! symmetric group.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::convolution::{convolve_case3, Filter, ProductMode};
use crate::error::{Error, Result};
use crate::fourier::{analyze_quotient, check_sparsity_with, inverse_fourier, FourierTransform};
use crate::group::{
    build_group, coset_space, project, subgroup_from_generators, translate, FiniteGroup,
    QuotientKind, QuotientSpace, Space, SpaceFunction, Subgroup,
};
use crate::linalg::{CMat, C};
use crate::repr::{build_irrep_system, IrrepSystem};

/// Pointwise nonlinearities. Both nonlinear choices send 0 to 0 and act
/// entry by entry, so they commute with point permutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Nonlinearity {
    #[serde(rename = "NONE")]
    None,
    /// ReLU applied independently to the real and imaginary parts.
    #[serde(rename = "RELU_RE_IM")]
    ReluReIm,
    /// z -> max(|z| - 1/2, 0) z / |z|.
    #[serde(rename = "MODULUS_RELU")]
    ModulusRelu,
}

impl Nonlinearity {
    pub fn apply(&self, z: C) -> C {
        match self {
            Nonlinearity::None => z,
            Nonlinearity::ReluReIm => C::new(z.re.max(0.0), z.im.max(0.0)),
            Nonlinearity::ModulusRelu => {
                let r = z.norm();
                let theta = 0.5;
                if r <= theta {
                    C::new(0.0, 0.0)
                } else {
                    z * ((r - theta) / r)
                }
            }
        }
    }
}

/// One layer: a filter on H_prev\G/H_next mapping channels_in to
/// channels_out, followed by a pointwise nonlinearity.
pub struct LayerSpec {
    pub h_prev: Subgroup,
    pub h_next: Subgroup,
    pub channels_in: usize,
    pub channels_out: usize,
    pub filter: Filter,
    pub nonlinearity: Nonlinearity,
}

impl LayerSpec {
    pub fn new(
        filter: Filter,
        channels_in: usize,
        channels_out: usize,
        nonlinearity: Nonlinearity,
    ) -> Result<LayerSpec> {
        let space = filter.space().clone();
        if filter.function.shape != (channels_in, channels_out) {
            return Err(Error::ShapeMismatch(format!(
                "filter values are {:?} but the layer maps {} -> {} channels",
                filter.function.shape, channels_in, channels_out
            )));
        }
        Ok(LayerSpec {
            h_prev: space.h.clone(),
            h_next: space.k.clone().expect("double space carries K"),
            channels_in,
            channels_out,
            nonlinearity,
            filter,
        })
    }
}

/// A feed-forward network over one group; layer l maps functions on
/// G/H_prev to functions on G/H_next.
pub struct Network {
    pub group: Arc<FiniteGroup>,
    pub layers: Vec<LayerSpec>,
}

impl Network {
    pub fn validate(&self) -> Result<()> {
        for layer in &self.layers {
            if layer.h_prev.parent.name != self.group.name {
                return Err(Error::GroupMismatch(
                    "layer subgroups must live in the network's group".into(),
                ));
            }
        }
        for pair in self.layers.windows(2) {
            if !pair[0].h_next.same_as(&pair[1].h_prev) {
                return Err(Error::KindMismatch(
                    "consecutive layers must chain: H_next of one is H_prev of the next".into(),
                ));
            }
            if pair[0].channels_out != pair[1].channels_in {
                return Err(Error::ShapeMismatch(
                    "consecutive layers must agree on channel counts".into(),
                ));
            }
        }
        Ok(())
    }

    /// The input space G/H_0.
    pub fn input_space(&self) -> Result<Arc<QuotientSpace>> {
        let first = self
            .layers
            .first()
            .ok_or_else(|| Error::Invalid("network has no layers".into()))?;
        coset_space(QuotientKind::Left, &first.h_prev, None)
    }
}

/// Run the network: f_l = sigma_l(f_{l-1} * chi_l). Returns all activations
/// f_1 .. f_L. The input must be a (1 x channels_in) valued function on the
/// first layer's quotient.
pub fn forward(net: &Network, f0: &SpaceFunction) -> Result<Vec<SpaceFunction>> {
    net.validate()?;
    let expect_space = net.input_space()?;
    match f0.space.quotient() {
        Some(q) if q.same_as(&expect_space) => {}
        _ => {
            return Err(Error::KindMismatch(
                "input does not live on the first layer's quotient space".into(),
            ))
        }
    }
    if f0.shape != (1, net.layers[0].channels_in) {
        return Err(Error::ShapeMismatch(format!(
            "input values must be 1x{} rows, got {:?}",
            net.layers[0].channels_in, f0.shape
        )));
    }
    let mut activations = Vec::with_capacity(net.layers.len());
    let mut current = f0.clone();
    for layer in &net.layers {
        let convolved = convolve_case3(&current, &layer.filter)?;
        let sigma = layer.nonlinearity;
        current = convolved.map_entries(|z| sigma.apply(z));
        activations.push(current.clone());
    }
    Ok(activations)
}

/// The convolution outputs before the nonlinearity, for support checks.
pub fn forward_preactivations(net: &Network, f0: &SpaceFunction) -> Result<Vec<SpaceFunction>> {
    net.validate()?;
    let mut pre = Vec::with_capacity(net.layers.len());
    let mut current = f0.clone();
    for layer in &net.layers {
        let convolved = convolve_case3(&current, &layer.filter)?;
        pre.push(convolved.clone());
        let sigma = layer.nonlinearity;
        current = convolved.map_entries(|z| sigma.apply(z));
    }
    Ok(pre)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct NetworkEquivarianceReport {
    pub per_generator: Vec<(String, f64)>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// For every generator g: translating the input and running the network
/// must equal running the network and translating every activation.
pub fn check_network_equivariance(
    net: &Network,
    f0: &SpaceFunction,
    tol: f64,
) -> Result<NetworkEquivarianceReport> {
    let base = forward(net, f0)?;
    let mut per_generator = Vec::new();
    let mut max_residual: f64 = 0.0;
    for &g in net.group.generators() {
        let shifted = forward(net, &translate(g, f0)?)?;
        let mut residual: f64 = 0.0;
        for (a, b) in base.iter().zip(&shifted) {
            let translated = translate(g, a)?;
            residual = residual.max(b.max_diff(&translated));
        }
        max_residual = max_residual.max(residual);
        per_generator.push((net.group.label(g).to_string(), residual));
    }
    Ok(NetworkEquivarianceReport {
        per_generator,
        max_residual,
        tol,
        pass: max_residual < tol,
    })
}

/// Seeded random filter: a plain random function on H\G/K (every
/// double-coset function is a valid filter).
pub fn random_filter<R: Rng>(
    h: &Subgroup,
    k: &Subgroup,
    channels_in: usize,
    channels_out: usize,
    rng: &mut R,
) -> Result<Filter> {
    let space = coset_space(QuotientKind::Double, h, Some(k))?;
    let function = SpaceFunction::random(Space::Quotient(space), (channels_in, channels_out), rng);
    Filter::new(function, ProductMode::MatVec)
}

// ---------------------------------------------------------------------------
// Message-passing chain over k-subset spaces
// ---------------------------------------------------------------------------

/// The subgroup of S_n preserving the last `l` points as a set: the product
/// of the symmetric groups on the first n-l and the last l points.
pub fn subset_stabilizer(g: &Arc<FiniteGroup>, n: usize, l: usize) -> Result<Subgroup> {
    let mut gens = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let within_first = i + 1 < n - l;
        let within_last = i >= n - l;
        if within_first || within_last {
            let label = format!("({}{})", i + 1, i + 2);
            gens.push(g.element_by_label(&label)?);
        }
    }
    let mut sub = subgroup_from_generators(g, &gens)?;
    sub.name = format!("S{}xS{}", n - l, l);
    Ok(sub)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct MpnnLayerReport {
    pub layer: usize,
    pub space: String,
    pub points: usize,
    /// Irreps carrying allowed Fourier entries for this layer's space,
    /// with the number of allowed entries (single columns look like the
    /// irrep's dimension).
    pub support: Vec<(String, usize)>,
    pub off_mask_pre_nonlinearity: f64,
    pub off_mask_post_nonlinearity: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct MpnnReport {
    pub n: usize,
    pub layers: usize,
    pub seed: u64,
    pub layer_reports: Vec<MpnnLayerReport>,
    pub equivariance_residual: f64,
    pub pass: bool,
}

/// Build the S_n chain X_1 -> X_2 -> ... -> X_{L+1} with X_l the space of
/// l-subsets (stabilizers S_{n-l} x S_l, the S_l factor permuting the last
/// l points), filters drawn as seeded scalars on the allowed Fourier
/// entries, and certify both the single-column support of every activation
/// and whole-chain equivariance on a seeded random input.
pub fn mpnn_chain(n: usize, layers: usize, seed: u64) -> Result<(Network, MpnnReport)> {
    if !(2..=5).contains(&n) || layers == 0 || layers >= n {
        return Err(Error::Invalid(
            "the subset chain needs 2 <= n <= 5 and 1 <= layers < n".into(),
        ));
    }
    let g = build_group(&format!("S{n}"))?;
    let sys = build_irrep_system(&g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net_layers = Vec::new();
    for l in 1..=layers {
        let h_prev = subset_stabilizer(&g, n, l)?;
        let h_next = subset_stabilizer(&g, n, l + 1)?;
        let filter = masked_random_filter(&sys, &h_prev, &h_next, &mut rng)?;
        net_layers.push(LayerSpec::new(filter, 1, 1, Nonlinearity::ReluReIm)?);
    }
    let net = Network {
        group: g.clone(),
        layers: net_layers,
    };
    net.validate()?;

    let input_space = net.input_space()?;
    let f0 = SpaceFunction::random(Space::Quotient(input_space), (1, 1), &mut rng);
    let pre = forward_preactivations(&net, &f0)?;
    let post = forward(&net, &f0)?;
    let mut layer_reports = Vec::new();
    for (i, (p, q)) in pre.iter().zip(&post).enumerate() {
        let space = q.space.quotient().expect("activations live on quotients");
        let analysis = analyze_quotient(space, &sys)?;
        let support: Vec<(String, usize)> = sys
            .irreps
            .iter()
            .enumerate()
            .filter_map(|(idx, irrep)| {
                let count =
                    analysis.mask.allowed_rows[idx].len() * analysis.mask.allowed_cols[idx].len();
                (count > 0).then(|| (irrep.label.clone(), count))
            })
            .collect();
        let pre_report = check_sparsity_with(&analysis, p, &sys, 1e-9)?;
        let post_report = check_sparsity_with(&analysis, q, &sys, 1e-9)?;
        layer_reports.push(MpnnLayerReport {
            layer: i + 1,
            space: q.space.describe(),
            points: space.len(),
            support,
            off_mask_pre_nonlinearity: pre_report.max_off_mask,
            off_mask_post_nonlinearity: post_report.max_off_mask,
        });
    }
    let eq = check_network_equivariance(&net, &f0, 1e-9)?;
    let pass = eq.pass
        && layer_reports
            .iter()
            .all(|r| r.off_mask_pre_nonlinearity < 1e-9 && r.off_mask_post_nonlinearity < 1e-9);
    let report = MpnnReport {
        n,
        layers,
        seed,
        layer_reports,
        equivariance_residual: eq.max_residual,
        pass,
    };
    Ok((net, report))
}

/// A filter on H\G/K drawn by seeding each allowed Fourier entry (in the
/// adapted basis) with a complex Gaussian and inverting; on subset chains
/// this is exactly one scalar per two-row partition.
pub fn masked_random_filter<R: Rng>(
    sys: &Arc<IrrepSystem>,
    h: &Subgroup,
    k: &Subgroup,
    rng: &mut R,
) -> Result<Filter> {
    let space = coset_space(QuotientKind::Double, h, Some(k))?;
    let analysis = analyze_quotient(&space, sys)?;
    let components: Vec<CMat> = sys
        .irreps
        .iter()
        .enumerate()
        .map(|(idx, irrep)| {
            let d = irrep.dim;
            let mut c = CMat::zeros(d, d);
            for &r in &analysis.mask.allowed_rows[idx] {
                for &col in &analysis.mask.allowed_cols[idx] {
                    c[(r, col)] = C::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                }
            }
            let qh = &analysis.h_adapter.decompositions[idx].q;
            let qk = &analysis.k_adapter.as_ref().unwrap().decompositions[idx].q;
            qh * c * qk.adjoint()
        })
        .collect();
    let ft = FourierTransform {
        system: sys.clone(),
        shape: (1, 1),
        components,
    };
    let chi = project(&inverse_fourier(&ft), &space)?;
    Filter::new(chi, ProductMode::MatVec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::subgroup_from_labels;

    fn s3_identity_layer_net() -> (Network, Arc<QuotientSpace>) {
        // single layer with the (1/|H|) delta filter: the identity map
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let d = coset_space(QuotientKind::Double, &h, Some(&h)).unwrap();
        let mut chi_fn = SpaceFunction::zeros(Space::Quotient(d.clone()), (1, 1));
        chi_fn.values[d.point_of(0)][(0, 0)] = C::new(1.0 / h.order() as f64, 0.0);
        let filter = Filter::new(chi_fn, ProductMode::MatVec).unwrap();
        let layer = LayerSpec::new(filter, 1, 1, Nonlinearity::None).unwrap();
        (
            Network {
                group: g,
                layers: vec![layer],
            },
            x,
        )
    }

    #[test]
    fn zero_input_stays_zero() {
        let (net, x) = s3_identity_layer_net();
        let f0 = SpaceFunction::zeros(Space::Quotient(x), (1, 1));
        let acts = forward(&net, &f0).unwrap();
        assert!(acts[0].max_abs() < 1e-15);
    }

    #[test]
    fn delta_filter_layer_is_the_identity() {
        let (net, x) = s3_identity_layer_net();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f0 = SpaceFunction::random(Space::Quotient(x), (1, 1), &mut rng);
        let acts = forward(&net, &f0).unwrap();
        assert!(acts[0].max_diff(&f0) < 1e-12);
    }

    #[test]
    fn random_multichannel_network_is_equivariant() {
        let g = build_group("S4").unwrap();
        let h0 = subgroup_from_labels(&g, "(12),(123)").unwrap();
        let h1 = subgroup_from_labels(&g, "(12),(34)").unwrap();
        let h2 = subgroup_from_labels(&g, "(12),(123)").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let layers = vec![
            LayerSpec::new(
                random_filter(&h0, &h1, 1, 2, &mut rng).unwrap(),
                1,
                2,
                Nonlinearity::ReluReIm,
            )
            .unwrap(),
            LayerSpec::new(
                random_filter(&h1, &h2, 2, 2, &mut rng).unwrap(),
                2,
                2,
                Nonlinearity::ModulusRelu,
            )
            .unwrap(),
            LayerSpec::new(
                random_filter(&h2, &h1, 2, 1, &mut rng).unwrap(),
                2,
                1,
                Nonlinearity::ReluReIm,
            )
            .unwrap(),
        ];
        let net = Network {
            group: g.clone(),
            layers,
        };
        let x0 = net.input_space().unwrap();
        let f0 = SpaceFunction::random(Space::Quotient(x0), (1, 1), &mut rng);
        let report = check_network_equivariance(&net, &f0, 1e-9).unwrap();
        assert!(report.pass, "residual {}", report.max_residual);
    }

    #[test]
    fn sabotaged_layer_is_flagged() {
        // replace the single layer's action by a non-convolution linear map
        let g = build_group("S3").unwrap();
        let h = subgroup_from_labels(&g, "(12)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f0 = SpaceFunction::random(Space::Quotient(x.clone()), (1, 1), &mut rng);
        // a dense map applied directly in place of a convolution layer
        let dense = CMat::from_fn(3, 3, |i, j| C::new((i * 3 + j) as f64 * 0.3 - 1.0, 0.1));
        let apply_dense = |f: &SpaceFunction| {
            let mut out = SpaceFunction::zeros(f.space.clone(), (1, 1));
            for i in 0..3 {
                for j in 0..3 {
                    let add = f.values[j][(0, 0)] * dense[(i, j)];
                    out.values[i][(0, 0)] += add;
                }
            }
            out
        };
        let base = apply_dense(&f0);
        let mut worst: f64 = 0.0;
        for &gen in g.generators() {
            let shifted = apply_dense(&translate(gen, &f0).unwrap());
            let translated = translate(gen, &base).unwrap();
            worst = worst.max(shifted.max_diff(&translated));
        }
        assert!(worst > 0.1);
    }

    #[test]
    fn subset_stabilizer_orders() {
        let g = build_group("S4").unwrap();
        assert_eq!(subset_stabilizer(&g, 4, 1).unwrap().order(), 6); // S3 x S1
        assert_eq!(subset_stabilizer(&g, 4, 2).unwrap().order(), 4); // S2 x S2
        assert_eq!(subset_stabilizer(&g, 4, 3).unwrap().order(), 6); // S1 x S3
        assert_eq!(subset_stabilizer(&g, 4, 4).unwrap().order(), 24); // S0 x S4
    }

    #[test]
    fn mpnn_chain_spaces_and_support() {
        let (_, report) = mpnn_chain(4, 2, 7).unwrap();
        assert!(report.pass);
        // layer 1 outputs X_2: C(4,2) = 6 points, support (4), (3,1), (2,2)
        let l1 = &report.layer_reports[0];
        assert_eq!(l1.points, 6);
        let labels: Vec<&str> = l1.support.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, vec!["(4)", "(3,1)", "(2,2)"]);
        let counts: Vec<usize> = l1.support.iter().map(|(_, c)| *c).collect();
        assert_eq!(counts, vec![1, 3, 2]);
        // layer 2 outputs X_3: 4 points, stabilizer S1 x S3, support 1 + 3
        let l2 = &report.layer_reports[1];
        assert_eq!(l2.points, 4);
        let counts2: Vec<usize> = l2.support.iter().map(|(_, c)| *c).collect();
        assert_eq!(counts2, vec![1, 3]);
    }

    #[test]
    fn pointwise_nonlinearities_commute_with_translation() {
        let g = build_group("S4").unwrap();
        let h = subgroup_from_labels(&g, "(12),(34)").unwrap();
        let x = coset_space(QuotientKind::Left, &h, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let f = SpaceFunction::random(Space::Quotient(x), (1, 2), &mut rng);
        for sigma in [Nonlinearity::ReluReIm, Nonlinearity::ModulusRelu] {
            for &gen in g.generators() {
                let a = translate(gen, &f.map_entries(|z| sigma.apply(z))).unwrap();
                let b = translate(gen, &f).unwrap().map_entries(|z| sigma.apply(z));
                assert_eq!(a.max_diff(&b), 0.0);
            }
        }
    }

    #[test]
    fn mpnn_rejects_out_of_range_arguments() {
        assert!(mpnn_chain(6, 1, 0).is_err());
        assert!(mpnn_chain(4, 4, 0).is_err());
        assert!(mpnn_chain(4, 0, 0).is_err());
    }
}
