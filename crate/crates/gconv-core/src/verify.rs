//! Verification suites over a fixed matrix of groups and subgroup pairs:
//! irrep integrity, Fourier round trips, the convolution theorem across all
//! quotient combinations, sparsity masks, forward and reverse equivariance,
//! the group-sum and lifting lemmas, the subset-chain demo, and
//! representative independence. The same code backs `gconv verify` and the
//! acceptance test target.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convolution::{
    case3_spaces, convolve_case1, convolve_case2, convolve_case3, convolve_case3_with_reps,
    convolve_def4, Filter, ProductMode,
};
use crate::equivariance::{
    check_map_equivariance, conv_operator_matrix, filter_from_map, fourier_blocks_of_map,
    solve_equivariant_basis,
};
use crate::error::Result;
use crate::fourier::{analyze_quotient, check_sparsity_with, convolve_fourier, QuotientAnalysis};
use crate::gcnn::{
    check_network_equivariance, forward, mpnn_chain, random_filter, LayerSpec, Network,
    Nonlinearity,
};
use crate::group::{
    build_group, coset_space, lift, subgroup_from_labels, FiniteGroup, QuotientKind, QuotientSpace,
    Space, SpaceFunction, Subgroup,
};
use crate::linalg::{lstsq, max_abs, CMat, C};
use crate::report::Report;
use crate::repr::{build_irrep_system, group_sum, IrrepSystem};

#[derive(Debug, Clone, Default)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Include the S5 tier (slower; outside the default time budget).
    pub slow: bool,
    /// Optional cap tightening every threshold to min(pinned, cap).
    pub tol_cap: Option<f64>,
    /// Attach wall times to checks (makes JSON output vary across runs).
    pub timing: bool,
}

impl VerifyConfig {
    fn thr(&self, pinned: f64) -> f64 {
        match self.tol_cap {
            Some(cap) => pinned.min(cap),
            None => pinned,
        }
    }

    fn rng(&self, tag: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

pub const SUITES: &[&str] = &[
    "irreps",
    "fourier",
    "convolution",
    "sparsity",
    "forward",
    "reverse",
    "lemmas",
    "mpnn",
    "representatives",
    "all",
];

/// The verification matrix: each entry carries a group and the generator
/// labels of its designated subgroup pair (H, K).
struct GroupCase {
    spec: &'static str,
    h: &'static str,
    k: &'static str,
}

fn matrix(slow: bool) -> Vec<GroupCase> {
    let mut cases = vec![
        GroupCase {
            spec: "Z12",
            h: "6",
            k: "4",
        },
        GroupCase {
            spec: "Z8xZ8",
            h: "1|0",
            k: "0|1",
        },
        GroupCase {
            spec: "D4",
            h: "s",
            k: "r2s",
        },
        GroupCase {
            spec: "S3",
            h: "(12)",
            k: "(12)",
        },
        GroupCase {
            spec: "S4",
            h: "(12),(123)",
            k: "(12),(34)",
        },
    ];
    if slow {
        cases.push(GroupCase {
            spec: "S5",
            h: "(12),(123),(1234)",
            k: "(12),(123),(45)",
        });
    }
    cases
}

/// Everything the criteria share for one matrix entry.
struct CaseContext {
    spec: String,
    group: Arc<FiniteGroup>,
    sys: Arc<IrrepSystem>,
    h: Subgroup,
    k: Subgroup,
    left: Arc<QuotientSpace>,
    right: Arc<QuotientSpace>,
    double: Arc<QuotientSpace>,
    left_analysis: QuotientAnalysis,
    right_analysis: QuotientAnalysis,
    double_analysis: QuotientAnalysis,
}

fn build_cases(slow: bool) -> Result<Vec<CaseContext>> {
    matrix(slow)
        .into_iter()
        .map(|c| {
            let group = build_group(c.spec)?;
            let sys = build_irrep_system(&group)?;
            let h = subgroup_from_labels(&group, c.h)?;
            let k = subgroup_from_labels(&group, c.k)?;
            let left = coset_space(QuotientKind::Left, &h, None)?;
            let right = coset_space(QuotientKind::Right, &h, None)?;
            let double = coset_space(QuotientKind::Double, &h, Some(&k))?;
            let left_analysis = analyze_quotient(&left, &sys)?;
            let right_analysis = analyze_quotient(&right, &sys)?;
            let double_analysis = analyze_quotient(&double, &sys)?;
            Ok(CaseContext {
                spec: c.spec.to_string(),
                group,
                sys,
                h,
                k,
                left,
                right,
                double,
                left_analysis,
                right_analysis,
                double_analysis,
            })
        })
        .collect()
}

/// Run one named suite ("all" chains every criterion in order).
pub fn run_suite(suite: &str, cfg: &VerifyConfig) -> Result<Report> {
    let config = serde_json::json!({
        "suite": suite,
        "seed": cfg.seed,
        "slow": cfg.slow,
        "tol_cap": cfg.tol_cap,
    });
    let mut report = Report::new(format!("verify --suite {suite}"), config);
    let cases = build_cases(cfg.slow)?;
    let start = std::time::Instant::now();
    let wanted = |name: &str| suite == "all" || suite == name;
    let mut matched = false;
    macro_rules! run {
        ($name:literal, $f:expr) => {
            if wanted($name) {
                matched = true;
                let t0 = std::time::Instant::now();
                $f?;
                if cfg.timing {
                    report.set_last_seconds(t0.elapsed().as_secs_f64());
                }
            }
        };
    }
    run!("irreps", criterion_irreps(&mut report, cfg, &cases));
    run!("fourier", criterion_fourier(&mut report, cfg, &cases));
    run!(
        "convolution",
        criterion_convolution(&mut report, cfg, &cases)
    );
    run!("sparsity", criterion_sparsity(&mut report, cfg, &cases));
    run!("forward", criterion_forward(&mut report, cfg, &cases));
    run!("reverse", criterion_reverse(&mut report, cfg, &cases));
    run!("lemmas", criterion_lemmas(&mut report, cfg, &cases));
    run!("mpnn", criterion_mpnn(&mut report, cfg));
    run!(
        "representatives",
        criterion_representatives(&mut report, cfg, &cases)
    );
    if !matched {
        return Err(crate::error::Error::Invalid(format!(
            "unknown suite `{suite}`; expected one of {SUITES:?}"
        )));
    }
    if cfg.timing {
        report.total_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}

// --- criterion 1: irrep integrity -----------------------------------------

fn criterion_irreps(report: &mut Report, cfg: &VerifyConfig, cases: &[CaseContext]) -> Result<()> {
    for case in cases {
        let checks = case.sys.check();
        let name = |what: &str| format!("irreps {} {what}", case.spec);
        report.check(name("homomorphism"), checks.homomorphism, cfg.thr(1e-10));
        report.check(name("unitarity"), checks.unitarity, cfg.thr(1e-10));
        report.check(name("identity"), checks.identity, cfg.thr(1e-10));
        report.check(
            name("character orthogonality"),
            checks.character_orthogonality,
            cfg.thr(1e-10),
        );
        report.check_count(
            name("completeness sum d^2"),
            checks.dim_square_sum,
            case.group.order,
        );
    }
    Ok(())
}

// --- criterion 2: Fourier round trip + Plancherel --------------------------

fn criterion_fourier(report: &mut Report, cfg: &VerifyConfig, cases: &[CaseContext]) -> Result<()> {
    for case in cases {
        let mut rng = cfg.rng(2);
        let mut worst_rt: f64 = 0.0;
        let mut worst_pl: f64 = 0.0;
        let mut fns = Vec::new();
        for _ in 0..20 {
            let f = SpaceFunction::random(Space::Group(case.group.clone()), (1, 1), &mut rng);
            let ft = crate::fourier::fourier(&f, &case.sys)?;
            let back = crate::fourier::inverse_fourier(&ft);
            worst_rt = worst_rt.max(back.max_diff(&f));
            fns.push((f, ft));
        }
        for pair in fns.chunks(2) {
            if pair.len() < 2 {
                continue;
            }
            let (f, ff) = &pair[0];
            let (g, fg) = &pair[1];
            let direct: C = (0..case.group.order)
                .map(|u| f.scalar(u).conj() * g.scalar(u))
                .sum();
            let mut viaft = C::new(0.0, 0.0);
            for (idx, irrep) in case.sys.irreps.iter().enumerate() {
                let prod = ff.components[idx].adjoint() * &fg.components[idx];
                viaft += prod.trace() * C::new(irrep.dim as f64 / case.group.order as f64, 0.0);
            }
            worst_pl = worst_pl.max((direct - viaft).norm());
        }
        report.check(
            format!("fourier {} round trip (20 fns)", case.spec),
            worst_rt,
            cfg.thr(1e-9),
        );
        report.check(
            format!("fourier {} plancherel", case.spec),
            worst_pl,
            cfg.thr(1e-9),
        );
    }
    Ok(())
}

// --- criterion 3: convolution theorem --------------------------------------

fn criterion_convolution(
    report: &mut Report,
    cfg: &VerifyConfig,
    cases: &[CaseContext],
) -> Result<()> {
    for case in cases {
        let mut rng = cfg.rng(3);
        let g_space = Space::Group(case.group.clone());
        type Combo<'a> = (&'a str, Box<dyn Fn(&mut ChaCha8Rng) -> Result<f64> + 'a>);
        let combos: [Combo; 4] = [
            (
                "G*G",
                Box::new(|rng: &mut ChaCha8Rng| {
                    let f = SpaceFunction::random(g_space.clone(), (1, 1), rng);
                    let g = SpaceFunction::random(g_space.clone(), (1, 1), rng);
                    let spatial = convolve_def4(&f, &g, ProductMode::Scalar)?;
                    let viaft = convolve_fourier(&f, &g, &case.sys)?;
                    Ok(spatial.max_diff(&viaft))
                }),
            ),
            (
                "G*G/H",
                Box::new(|rng: &mut ChaCha8Rng| {
                    let f = SpaceFunction::random(g_space.clone(), (1, 1), rng);
                    let g = SpaceFunction::random(Space::Quotient(case.left.clone()), (1, 1), rng);
                    let spatial = lift(&convolve_case1(&f, &g, ProductMode::Scalar)?);
                    let viaft = convolve_fourier(&f, &g, &case.sys)?;
                    Ok(spatial.max_diff(&viaft))
                }),
            ),
            (
                "G/H*H\\G",
                Box::new(|rng: &mut ChaCha8Rng| {
                    let f = SpaceFunction::random(Space::Quotient(case.left.clone()), (1, 1), rng);
                    let g = SpaceFunction::random(Space::Quotient(case.right.clone()), (1, 1), rng);
                    let spatial = convolve_case2(&f, &g, ProductMode::Scalar)?;
                    let viaft = convolve_fourier(&f, &g, &case.sys)?;
                    Ok(spatial.max_diff(&viaft))
                }),
            ),
            (
                "G/H*H\\G/K",
                Box::new(|rng: &mut ChaCha8Rng| {
                    let f = SpaceFunction::random(Space::Quotient(case.left.clone()), (1, 1), rng);
                    let chi_fn =
                        SpaceFunction::random(Space::Quotient(case.double.clone()), (1, 1), rng);
                    let chi = Filter::new(chi_fn.clone(), ProductMode::Scalar)?;
                    let spatial = lift(&convolve_case3(&f, &chi)?);
                    let viaft = convolve_fourier(&f, &chi_fn, &case.sys)?;
                    Ok(spatial.max_diff(&viaft))
                }),
            ),
        ];
        for (label, run) in &combos {
            let mut worst: f64 = 0.0;
            for _ in 0..10 {
                worst = worst.max(run(&mut rng)?);
            }
            report.check(
                format!("convolution theorem {} {label}", case.spec),
                worst,
                cfg.thr(1e-8),
            );
        }
    }
    Ok(())
}

// --- criterion 4: sparsity --------------------------------------------------

fn criterion_sparsity(
    report: &mut Report,
    cfg: &VerifyConfig,
    cases: &[CaseContext],
) -> Result<()> {
    for case in cases {
        let mut rng = cfg.rng(4);
        for (label, space, analysis) in [
            ("G/H", &case.left, &case.left_analysis),
            ("H\\G", &case.right, &case.right_analysis),
            ("H\\G/K", &case.double, &case.double_analysis),
        ] {
            let mut worst_off: f64 = 0.0;
            let mut worst_rank: f64 = 0.0;
            for _ in 0..10 {
                let f = SpaceFunction::random(Space::Quotient(space.clone()), (1, 1), &mut rng);
                let rep = check_sparsity_with(analysis, &f, &case.sys, 1e-9)?;
                worst_off = worst_off.max(rep.max_off_mask);
                worst_rank = worst_rank.max(rep.max_rank_excess);
            }
            report.check(
                format!("sparsity {} {label} off-mask", case.spec),
                worst_off,
                cfg.thr(1e-9),
            );
            report.check(
                format!("sparsity {} {label} raw rank bound", case.spec),
                worst_rank,
                cfg.thr(1e-9),
            );
            report.check_count(
                format!("sparsity {} {label} allowed = points", case.spec),
                analysis.mask.allowed_count,
                space.len(),
            );
        }
    }
    Ok(())
}

// --- criterion 5: forward equivariance of convolutional networks -------------

/// Per-group layer chains: subgroup generator labels and channel widths.
fn forward_chain(spec: &str) -> (Vec<&'static str>, Vec<usize>) {
    match spec {
        "Z12" => (vec!["", "6", "6"], vec![1, 2, 1]),
        "Z8xZ8" => (vec!["", "", ""], vec![1, 2, 1]),
        "D4" => (vec!["", "s", "s"], vec![1, 2, 1]),
        "S3" => (vec!["", "(12)", "(12)"], vec![1, 2, 1]),
        "S4" => (
            vec!["(12),(123)", "(12),(34)", "(12),(123)", "(12),(34)"],
            vec![1, 2, 2, 1],
        ),
        "S5" => (
            vec!["(12),(123),(1234)", "(12),(123),(45)", "(12),(123),(1234)"],
            vec![1, 2, 1],
        ),
        other => panic!("no forward chain configured for {other}"),
    }
}

fn criterion_forward(report: &mut Report, cfg: &VerifyConfig, cases: &[CaseContext]) -> Result<()> {
    for case in cases {
        let mut rng = cfg.rng(5);
        let (chain, channels) = forward_chain(&case.spec);
        let subgroups: Vec<Subgroup> = chain
            .iter()
            .map(|labels| subgroup_from_labels(&case.group, labels))
            .collect::<Result<_>>()?;
        let sigmas = [Nonlinearity::ReluReIm, Nonlinearity::ModulusRelu];
        let mut layers = Vec::new();
        for i in 0..subgroups.len() - 1 {
            layers.push(LayerSpec::new(
                random_filter(
                    &subgroups[i],
                    &subgroups[i + 1],
                    channels[i],
                    channels[i + 1],
                    &mut rng,
                )?,
                channels[i],
                channels[i + 1],
                sigmas[i % 2],
            )?);
        }
        let net = Network {
            group: case.group.clone(),
            layers,
        };
        let x0 = net.input_space()?;
        let f0 = SpaceFunction::random(Space::Quotient(x0), (1, 1), &mut rng);
        let eq = check_network_equivariance(&net, &f0, cfg.thr(1e-9))?;
        report.check(
            format!(
                "forward {} {}-layer network equivariance",
                case.spec,
                net.layers.len()
            ),
            eq.max_residual,
            cfg.thr(1e-9),
        );
        if case.spec == "Z8xZ8" {
            let residual = classic_cnn_vs_oracle(&case.group, cfg)?;
            report.check(
                "forward Z8xZ8 classic CNN matches direct 2D circular oracle",
                residual,
                cfg.thr(1e-12),
            );
        }
    }
    Ok(())
}

/// Two-layer CNN on the 8x8 torus with 3x3-window filters, checked layer by
/// layer against the textbook circular convolution double sum.
fn classic_cnn_vs_oracle(group: &Arc<FiniteGroup>, cfg: &VerifyConfig) -> Result<f64> {
    let n = 8usize;
    let mut rng = cfg.rng(55);
    let trivial = Subgroup::trivial(group);
    let double = coset_space(QuotientKind::Double, &trivial, Some(&trivial))?;
    let window_filter = |rng: &mut ChaCha8Rng| -> Result<(Filter, Vec<Vec<C>>)> {
        let mut w = vec![vec![C::new(0.0, 0.0); 3]; 3];
        let mut chi = SpaceFunction::zeros(Space::Quotient(double.clone()), (1, 1));
        for (u1, row) in w.iter_mut().enumerate() {
            for (u2, entry) in row.iter_mut().enumerate() {
                let z = C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                *entry = z;
                // window offsets are 1..=3 in each axis, wrapped on the torus
                let id = (u1 + 1) * n + (u2 + 1);
                chi.values[double.point_of(id)][(0, 0)] = z;
            }
        }
        Ok((Filter::new(chi, ProductMode::MatVec)?, w))
    };
    let (chi1, w1) = window_filter(&mut rng)?;
    let (chi2, w2) = window_filter(&mut rng)?;
    let net = Network {
        group: group.clone(),
        layers: vec![
            LayerSpec::new(chi1, 1, 1, Nonlinearity::ReluReIm)?,
            LayerSpec::new(chi2, 1, 1, Nonlinearity::ReluReIm)?,
        ],
    };
    let x0 = net.input_space()?;
    let f0 = SpaceFunction::random(Space::Quotient(x0), (1, 1), &mut rng);
    let acts = forward(&net, &f0)?;

    // oracle: plain nested loops over pixels and window offsets
    let to_grid = |f: &SpaceFunction| -> Vec<Vec<C>> {
        (0..n)
            .map(|a| (0..n).map(|b| f.scalar(a * n + b)).collect())
            .collect()
    };
    let layer = |input: &[Vec<C>], w: &[Vec<C>]| -> Vec<Vec<C>> {
        let mut out = vec![vec![C::new(0.0, 0.0); n]; n];
        for x1 in 0..n {
            for x2 in 0..n {
                let mut acc = C::new(0.0, 0.0);
                for u1 in 1..=3usize {
                    for u2 in 1..=3usize {
                        let y1 = (x1 + n - u1) % n;
                        let y2 = (x2 + n - u2) % n;
                        acc += input[y1][y2] * w[u1 - 1][u2 - 1];
                    }
                }
                out[x1][x2] = C::new(acc.re.max(0.0), acc.im.max(0.0));
            }
        }
        out
    };
    let l1 = layer(&to_grid(&f0), &w1);
    let l2 = layer(&l1, &w2);
    let mut residual: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            residual = residual.max((acts[0].scalar(a * n + b) - l1[a][b]).norm());
            residual = residual.max((acts[1].scalar(a * n + b) - l2[a][b]).norm());
        }
    }
    Ok(residual)
}

// --- criterion 6: equivariant maps are convolutions --------------------------

/// Independent double-coset counter (raw multiplication only, no reuse of
/// the quotient-space machinery).
fn brute_double_coset_count(g: &FiniteGroup, h: &[usize], k: &[usize]) -> usize {
    let mut seen = vec![false; g.order];
    let mut count = 0;
    for u in 0..g.order {
        if seen[u] {
            continue;
        }
        count += 1;
        for &a in h {
            let au = g.mul(a, u);
            for &b in k {
                seen[g.mul(au, b)] = true;
            }
        }
    }
    count
}

fn reverse_pairs(spec: &str) -> Vec<(&'static str, &'static str)> {
    match spec {
        "Z12" => vec![("", ""), ("6", "4")],
        "Z8xZ8" => vec![("1|0", "0|1"), ("1|0", "1|0"), ("", "1|0")],
        "D4" => vec![("", ""), ("s", "r2s")],
        "S3" => vec![("", ""), ("(12)", "(12)")],
        "S4" => vec![("(12),(123)", "(12),(34)"), ("(12),(34)", "(12),(123)")],
        "S5" => vec![("(12),(123),(1234)", "(12),(123),(45)")],
        other => panic!("no reverse pairs configured for {other}"),
    }
}

fn criterion_reverse(report: &mut Report, cfg: &VerifyConfig, cases: &[CaseContext]) -> Result<()> {
    for case in cases {
        for (h_labels, k_labels) in reverse_pairs(&case.spec) {
            let h = subgroup_from_labels(&case.group, h_labels)?;
            let k = subgroup_from_labels(&case.group, k_labels)?;
            let x_in = Space::Quotient(coset_space(QuotientKind::Left, &h, None)?);
            let x_out = Space::Quotient(coset_space(QuotientKind::Left, &k, None)?);
            let tag = format!("reverse {} H=<{h_labels}> K=<{k_labels}>", case.spec);
            let basis = match solve_equivariant_basis(&x_in, &x_out) {
                Ok(b) => b,
                Err(e) => {
                    report.check(format!("{tag} solve failed: {e}"), 1.0, 0.0);
                    continue;
                }
            };
            let expected = brute_double_coset_count(&case.group, &h.members, &k.members);
            report.check_count(
                format!("{tag} dimension = |H\\G/K|"),
                basis.maps.len(),
                expected,
            );
            let mut worst_eq: f64 = 0.0;
            let mut worst_fit: f64 = 0.0;
            let mut worst_leak: f64 = 0.0;
            let mut worst_op: f64 = 0.0;
            for map in &basis.maps {
                worst_eq = worst_eq.max(check_map_equivariance(map, 1e-10)?.max_residual);
                match fourier_blocks_of_map(map, &case.sys) {
                    Ok(blocks) => {
                        worst_fit = worst_fit.max(blocks.max_fit_residual);
                        worst_leak = worst_leak.max(blocks.max_leakage);
                    }
                    Err(_) => worst_fit = 1.0,
                }
                match filter_from_map(map, &case.sys) {
                    Ok((_, residual)) => worst_op = worst_op.max(residual),
                    Err(_) => worst_op = 1.0,
                }
            }
            report.check(
                format!("{tag} basis equivariance"),
                worst_eq,
                cfg.thr(1e-10),
            );
            report.check(
                format!("{tag} Fourier right-multiplication fit"),
                worst_fit,
                cfg.thr(1e-8),
            );
            report.check(
                format!("{tag} isotypic preservation (cross-irrep leakage)"),
                worst_leak,
                cfg.thr(1e-9),
            );
            report.check(
                format!("{tag} filter reconstruction"),
                worst_op,
                cfg.thr(1e-8),
            );

            // converse containment: every delta-filter convolution operator
            // lies in the solved span
            let x_in_q = x_in.quotient().unwrap();
            let double = coset_space(QuotientKind::Double, &h, Some(&k))?;
            let n_total = x_in.len() * x_out.len();
            let span = CMat::from_fn(n_total, basis.maps.len(), |r, c| {
                let (i, j) = (r / x_in.len(), r % x_in.len());
                basis.maps[c].matrix[(i, j)]
            });
            let mut worst_span: f64 = 0.0;
            for p in 0..double.len() {
                let delta = SpaceFunction::delta(Space::Quotient(double.clone()), p);
                let chi = Filter::new(delta, ProductMode::Scalar)?;
                let op = conv_operator_matrix(&chi, x_in_q)?;
                let target = CMat::from_fn(n_total, 1, |r, _| {
                    let (i, j) = (r / x_in.len(), r % x_in.len());
                    op[(i, j)]
                });
                let sol = lstsq(&span, &target, 1e-12);
                worst_span = worst_span.max(max_abs(&(&span * &sol - &target)));
            }
            report.check(
                format!("{tag} convolutions lie in the solved span"),
                worst_span,
                cfg.thr(1e-8),
            );
        }
    }
    Ok(())
}

// --- criterion 7: group-sum and lifting lemmas ------------------------------

fn criterion_lemmas(report: &mut Report, cfg: &VerifyConfig, cases: &[CaseContext]) -> Result<()> {
    for case in cases {
        let mut worst_sum: f64 = 0.0;
        let mut trivial_ok = true;
        for (idx, irrep) in case.sys.irreps.iter().enumerate() {
            let s = group_sum(irrep);
            if idx == case.sys.trivial_index {
                trivial_ok &=
                    (s[(0, 0)] - C::new(case.group.order as f64, 0.0)).norm() < cfg.thr(1e-9);
            } else {
                worst_sum = worst_sum.max(max_abs(&s));
            }
        }
        report.check(
            format!(
                "lemmas {} group sums vanish off the trivial irrep",
                case.spec
            ),
            worst_sum,
            cfg.thr(1e-9),
        );
        report.check_count(
            format!("lemmas {} trivial irrep sums to |G|", case.spec),
            trivial_ok as usize,
            1,
        );

        // lifted functions carry one-sided invariances exactly
        let mut rng = cfg.rng(7);
        let g = &case.group;
        let mut worst_inv: f64 = 0.0;
        for _ in 0..10 {
            let fl = lift(&SpaceFunction::random(
                Space::Quotient(case.left.clone()),
                (1, 1),
                &mut rng,
            ));
            for u in 0..g.order {
                for &m in &case.h.members {
                    worst_inv = worst_inv.max((fl.scalar(g.mul(u, m)) - fl.scalar(u)).norm());
                }
            }
            let fr = lift(&SpaceFunction::random(
                Space::Quotient(case.right.clone()),
                (1, 1),
                &mut rng,
            ));
            for u in 0..g.order {
                for &m in &case.h.members {
                    worst_inv = worst_inv.max((fr.scalar(g.mul(m, u)) - fr.scalar(u)).norm());
                }
            }
            let fd = lift(&SpaceFunction::random(
                Space::Quotient(case.double.clone()),
                (1, 1),
                &mut rng,
            ));
            for u in 0..g.order {
                for &m in &case.h.members {
                    worst_inv = worst_inv.max((fd.scalar(g.mul(m, u)) - fd.scalar(u)).norm());
                }
                for &m in &case.k.members {
                    worst_inv = worst_inv.max((fd.scalar(g.mul(u, m)) - fd.scalar(u)).norm());
                }
            }
        }
        report.check(
            format!("lemmas {} lifted invariances are exact", case.spec),
            worst_inv,
            0.0,
        );
    }
    Ok(())
}

// --- criterion 8: subset-chain demo ------------------------------------------

fn criterion_mpnn(report: &mut Report, cfg: &VerifyConfig) -> Result<()> {
    for n in [4usize, 5] {
        let layers = n - 2;
        let (_, rep) = mpnn_chain(n, layers, cfg.seed)?;
        let mut worst_mask: f64 = 0.0;
        let mut support_ok = true;
        for lr in &rep.layer_reports {
            worst_mask = worst_mask
                .max(lr.off_mask_pre_nonlinearity)
                .max(lr.off_mask_post_nonlinearity);
            let l = lr.layer + 1; // output space index X_{l}
            for (label, _) in &lr.support {
                // labels must be two-row partitions (n-p, p) with p <= min(l, n-l)
                let parts: Vec<usize> = label
                    .trim_matches(|c| c == '(' || c == ')')
                    .split(',')
                    .map(|s| s.parse().unwrap_or(0))
                    .collect();
                let p = if parts.len() == 1 { 0 } else { parts[1] };
                support_ok &=
                    parts.len() <= 2 && parts.iter().sum::<usize>() == n && p <= l.min(n - l);
            }
        }
        report.check(
            format!("mpnn n={n} single-column Fourier support (off-mask)"),
            worst_mask,
            cfg.thr(1e-9),
        );
        report.check_count(
            format!("mpnn n={n} support confined to partitions (n-p,p)"),
            support_ok as usize,
            1,
        );
        report.check(
            format!("mpnn n={n} whole-chain equivariance"),
            rep.equivariance_residual,
            cfg.thr(1e-9),
        );
    }
    Ok(())
}

// --- criterion 9: representative independence --------------------------------

fn criterion_representatives(
    report: &mut Report,
    cfg: &VerifyConfig,
    cases: &[CaseContext],
) -> Result<()> {
    for case in cases {
        let mut rng = cfg.rng(9);
        let f = SpaceFunction::random(Space::Quotient(case.left.clone()), (1, 1), &mut rng);
        let chi = Filter::new(
            SpaceFunction::random(Space::Quotient(case.double.clone()), (1, 1), &mut rng),
            ProductMode::Scalar,
        )?;
        let (out_space, right) = case3_spaces(&f, &chi)?;
        let canonical = convolve_case3(&f, &chi)?;
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let reps_x: Vec<usize> = out_space
                .points
                .iter()
                .map(|c| c[rng.gen_range(0..c.len())])
                .collect();
            let reps_y: Vec<usize> = right
                .points
                .iter()
                .map(|c| c[rng.gen_range(0..c.len())])
                .collect();
            let alt = convolve_case3_with_reps(&f, &chi, &out_space, &right, &reps_x, &reps_y)?;
            worst = worst.max(alt.max_diff(&canonical));
        }
        report.check(
            format!("representatives {} case III invariance", case.spec),
            worst,
            cfg.thr(1e-10),
        );
    }
    Ok(())
}
