//! gconv: generalized convolution and Fourier analysis on finite groups,
//! with verification suites for equivariance properties.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gconv_core::convolution::{
    convolve_case1, convolve_case2, convolve_case3, convolve_def4, Filter, ProductMode,
};
use gconv_core::equivariance::{check_map_equivariance, filter_from_map, solve_equivariant_basis};
use gconv_core::fourier::{analyze_quotient, check_sparsity_with, convolve_fourier, fourier};
use gconv_core::gcnn::{check_network_equivariance, forward, mpnn_chain};
use gconv_core::group::{
    build_group, coset_space, lift, subgroup_from_labels, QuotientKind, Space,
};
use gconv_core::io::{
    function_from_spec, function_to_spec, network_from_json, read_function, space_from_spec,
    FunctionSpec, NetworkJson, QuotientSpec, SpaceSpec,
};
use gconv_core::report::Report;
use gconv_core::repr::build_irrep_system;
use gconv_core::verify::{run_suite, VerifyConfig, SUITES};

#[derive(Parser)]
#[command(
    name = "gconv",
    about = "Convolution, Fourier analysis, and equivariance checks on finite groups and their quotient spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Emit a machine-readable JSON report instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect groups built from the spec grammar (Z<n>, D<n>, S<n>, products with x).
    Group {
        #[command(subcommand)]
        action: GroupAction,
    },
    /// List the irreducible representations of a group.
    Irreps {
        /// Group spec, e.g. S4 or Z4xZ4.
        spec: String,
        /// Re-run the construction checks and report residuals.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Fourier-transform a function and optionally check its sparsity mask.
    Fourier {
        #[arg(long)]
        group: String,
        /// Quotient spec as JSON, e.g. {"kind":"LEFT","H":["(12)"]}.
        #[arg(long)]
        quotient: Option<String>,
        /// Input function (JSON file).
        #[arg(long)]
        input: String,
        /// Also emit adapted-basis components (F Q_H etc.).
        #[arg(long)]
        adapted: bool,
        /// Check the transform against the quotient's sparsity mask.
        #[arg(long)]
        mask: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Convolve two functions (case 0 = full-group reference sum).
    Convolve {
        /// 0: both on G; 1: f on G, g on G/H; 2: f on G/H, g on H\G;
        /// 3: f on G/H, filter on H\G/K.
        #[arg(long)]
        case: u8,
        #[arg(long)]
        group: String,
        /// Generator labels for H; validated against the operands' spaces.
        #[arg(long)]
        h: Option<String>,
        /// Generator labels for K; validated against the operands' spaces.
        #[arg(long)]
        k: Option<String>,
        /// First operand (JSON file).
        #[arg(short = 'f', long = "f")]
        f_path: String,
        /// Second operand / filter (JSON file).
        #[arg(short = 'g', long = "g")]
        g_path: String,
        /// Value product: scalar, dot, matvec, or reverse.
        #[arg(long, default_value = "scalar")]
        mode: String,
        /// Compute through the Fourier domain as well and compare.
        #[arg(long)]
        via_fourier: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve the complete basis of equivariant maps L(G/H) -> L(G/K).
    SolveBasis {
        #[arg(long)]
        group: String,
        /// Generator labels for H, comma separated.
        #[arg(long)]
        h: String,
        /// Generator labels for K, comma separated.
        #[arg(long)]
        k: String,
        /// Extract the Case III filter realizing each basis element.
        #[arg(long)]
        extract_filters: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a network from a JSON spec.
    Net {
        #[command(subcommand)]
        action: NetAction,
    },
    /// Built-in demos.
    Demo {
        #[command(subcommand)]
        action: DemoAction,
    },
    /// Run the verification suites.
    Verify {
        /// One of irreps, fourier, convolution, sparsity, forward, reverse,
        /// lemmas, mpnn, representatives, or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tighten every threshold to at most this value.
        #[arg(long)]
        tol: Option<f64>,
        /// Include the S5 tier.
        #[arg(long)]
        slow: bool,
        /// Attach wall times (JSON output then varies across runs).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand)]
enum GroupAction {
    /// Order, generators, element labels, and table checks.
    Info {
        spec: String,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand)]
enum NetAction {
    /// Forward-evaluate a network spec on an input function and certify
    /// its equivariance.
    Run {
        /// Network spec (JSON file).
        #[arg(long)]
        spec: String,
        /// Input function (JSON file).
        #[arg(long)]
        input: String,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand)]
enum DemoAction {
    /// The S_n subset-chain network with single-column Fourier support.
    Mpnn {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        layers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(report: &Report, json: bool) -> bool {
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_table());
    }
    report.pass
}

fn emit_with_payload(
    report: &Report,
    payload: &serde_json::Value,
    json: bool,
) -> anyhow::Result<bool> {
    if json {
        let full = serde_json::json!({"result": payload, "report": report});
        println!("{}", serde_json::to_string_pretty(&full)?);
    } else {
        print!("{}", report.render_table());
        println!("{}", serde_json::to_string_pretty(&payload)?);
    }
    Ok(report.pass)
}

fn complex_matrix_json(m: &gconv_core::linalg::CMat) -> serde_json::Value {
    serde_json::json!((0..m.nrows())
        .map(|i| (0..m.ncols())
            .map(|j| [m[(i, j)].re, m[(i, j)].im])
            .collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Group {
            action: GroupAction::Info { spec, out },
        } => {
            let g = build_group(&spec)?;
            let mut report = Report::new(
                format!("group info {spec}"),
                serde_json::json!({
                    "spec": spec,
                    "order": g.order,
                    "generators": g.generators().iter().map(|&x| g.label(x)).collect::<Vec<_>>(),
                    "labels": g.labels(),
                }),
            );
            let ok = g.validate().is_ok();
            report.check_count("cayley table invariants", ok as usize, 1);
            Ok(emit(&report, out.json))
        }
        Command::Irreps { spec, check, out } => {
            let g = build_group(&spec)?;
            let sys = build_irrep_system(&g)?;
            let irreps: Vec<serde_json::Value> = sys
                .irreps
                .iter()
                .map(|i| serde_json::json!({"label": i.label, "dim": i.dim}))
                .collect();
            let mut report = Report::new(
                format!("irreps {spec}"),
                serde_json::json!({"spec": spec, "irreps": irreps}),
            );
            report.check_count(
                "completeness sum d^2 = |G|",
                sys.irreps.iter().map(|i| i.dim * i.dim).sum::<usize>(),
                g.order,
            );
            if check {
                let checks = sys.check();
                report.check("homomorphism", checks.homomorphism, 1e-10);
                report.check("unitarity", checks.unitarity, 1e-10);
                report.check("identity", checks.identity, 1e-10);
                report.check(
                    "character orthogonality",
                    checks.character_orthogonality,
                    1e-10,
                );
            }
            Ok(emit(&report, out.json))
        }
        Command::Fourier {
            group,
            quotient,
            input,
            adapted,
            mask,
            out,
        } => {
            let g = build_group(&group)?;
            let sys = build_irrep_system(&g)?;
            let spec = SpaceSpec {
                group: group.clone(),
                quotient: match &quotient {
                    Some(q) => Some(serde_json::from_str::<QuotientSpec>(q)?),
                    None => None,
                },
            };
            let space = space_from_spec(&spec)?;
            let raw: FunctionSpec = serde_json::from_str(&std::fs::read_to_string(&input)?)?;
            let f = function_from_spec(&FunctionSpec {
                space: spec,
                shape: raw.shape,
                values: raw.values,
            })?;
            let ft = fourier(&f, &sys)?;
            let mut components = serde_json::Map::new();
            for (irrep, comp) in sys.irreps.iter().zip(&ft.components) {
                components.insert(irrep.label.clone(), complex_matrix_json(comp));
            }
            let mut payload = serde_json::json!({
                "group": group,
                "shape": f.shape,
                "components": components,
            });
            let mut report = Report::new(
                format!("fourier --group {group}"),
                serde_json::json!({"input": input, "adapted": adapted, "mask": mask}),
            );
            if let Space::Quotient(q) = &space {
                if adapted || mask {
                    let analysis = analyze_quotient(q, &sys)?;
                    if adapted {
                        let mut ad = serde_json::Map::new();
                        for (idx, irrep) in sys.irreps.iter().enumerate() {
                            let qh = &analysis.h_adapter.decompositions[idx].q;
                            let raw_c = &ft.components[idx];
                            let a = match q.kind {
                                QuotientKind::Left => raw_c * qh,
                                QuotientKind::Right => qh.adjoint() * raw_c,
                                QuotientKind::Double => {
                                    let qk =
                                        &analysis.k_adapter.as_ref().unwrap().decompositions[idx].q;
                                    qh.adjoint() * raw_c * qk
                                }
                            };
                            ad.insert(irrep.label.clone(), complex_matrix_json(&a));
                        }
                        payload["adapted_components"] = serde_json::Value::Object(ad);
                    }
                    if mask {
                        let rep = check_sparsity_with(&analysis, &f, &sys, 1e-9)?;
                        payload["sparsity"] = serde_json::to_value(&rep)?;
                        report.check("off-mask magnitude", rep.max_off_mask, 1e-9);
                        report.check_count(
                            "allowed entries = points",
                            rep.allowed_count,
                            rep.space_size,
                        );
                    }
                }
            }
            emit_with_payload(&report, &payload, out.json)
        }
        Command::Convolve {
            case,
            group,
            h,
            k,
            f_path,
            g_path,
            mode,
            via_fourier,
            out,
        } => {
            let grp = build_group(&group)?;
            let sys = build_irrep_system(&grp)?;
            let mode = match mode.as_str() {
                "scalar" => ProductMode::Scalar,
                "dot" => ProductMode::Dot,
                "matvec" => ProductMode::MatVec,
                "reverse" => ProductMode::Reverse,
                other => anyhow::bail!("unknown mode `{other}`"),
            };
            let f = read_function(&f_path)?;
            let g = read_function(&g_path)?;
            if f.space.group().name != grp.name {
                anyhow::bail!(
                    "operands live over {} but --group is {}",
                    f.space.group().name,
                    grp.name
                );
            }
            // --h / --k assert which subgroups the operand spaces must use
            if let Some(h_labels) = &h {
                let hs = subgroup_from_labels(&grp, h_labels)?;
                let used = [f.space.quotient(), g.space.quotient()]
                    .into_iter()
                    .flatten()
                    .any(|q| q.h.same_as(&hs));
                if !used {
                    anyhow::bail!("no operand lives on a quotient by H = <{h_labels}>");
                }
            }
            if let Some(k_labels) = &k {
                let ks = subgroup_from_labels(&grp, k_labels)?;
                let used = [f.space.quotient(), g.space.quotient()]
                    .into_iter()
                    .flatten()
                    .any(|q| q.k.as_ref().map(|kk| kk.same_as(&ks)).unwrap_or(false));
                if !used {
                    anyhow::bail!("no operand lives on a double quotient with K = <{k_labels}>");
                }
            }
            let spatial = match case {
                0 => convolve_def4(&f, &g, mode)?,
                1 => convolve_case1(&f, &g, mode)?,
                2 => convolve_case2(&f, &g, mode)?,
                3 => {
                    let chi = Filter::new(g.clone(), mode)?;
                    convolve_case3(&f, &chi)?
                }
                other => anyhow::bail!("--case must be 0..=3, got {other}"),
            };
            let mut report = Report::new(
                format!("convolve --case {case} --group {group}"),
                serde_json::json!({
                    "f": f_path, "g": g_path, "case": case,
                    "mode": mode, "via_fourier": via_fourier,
                }),
            );
            if via_fourier {
                let viaft = convolve_fourier(&f, &g, &sys)?;
                let residual = lift(&spatial).max_diff(&viaft);
                report.check("spatial vs Fourier-domain convolution", residual, 1e-8);
            }
            let payload = serde_json::to_value(function_to_spec(&spatial))?;
            emit_with_payload(&report, &payload, out.json)
        }
        Command::SolveBasis {
            group,
            h,
            k,
            extract_filters,
            out,
        } => {
            let g = build_group(&group)?;
            let sys = build_irrep_system(&g)?;
            let hs = subgroup_from_labels(&g, &h)?;
            let ks = subgroup_from_labels(&g, &k)?;
            let x_in = Space::Quotient(coset_space(QuotientKind::Left, &hs, None)?);
            let x_out = Space::Quotient(coset_space(QuotientKind::Left, &ks, None)?);
            let basis = solve_equivariant_basis(&x_in, &x_out)?;
            let mut report = Report::new(
                format!("solve-basis --group {group} --h {h} --k {k}"),
                serde_json::json!({
                    "group": group, "h": h, "k": k,
                    "dimension": basis.maps.len(),
                    "rank_threshold": basis.rank_threshold,
                }),
            );
            let dcount = coset_space(QuotientKind::Double, &hs, Some(&ks))?.len();
            report.check_count("dimension = |H\\G/K|", basis.maps.len(), dcount);
            let mut payload = serde_json::json!({
                "dimension": basis.maps.len(),
                "maps": basis.maps.iter().map(|m| complex_matrix_json(&m.matrix)).collect::<Vec<_>>(),
            });
            let mut worst_eq: f64 = 0.0;
            for map in &basis.maps {
                worst_eq = worst_eq.max(check_map_equivariance(map, 1e-10)?.max_residual);
            }
            report.check("basis equivariance residual", worst_eq, 1e-10);
            if extract_filters {
                let mut filters = Vec::new();
                let mut worst_rec: f64 = 0.0;
                for map in &basis.maps {
                    let (chi, residual) = filter_from_map(map, &sys)?;
                    worst_rec = worst_rec.max(residual);
                    filters.push(serde_json::to_value(function_to_spec(&chi.function))?);
                }
                report.check("filter reconstruction residual", worst_rec, 1e-8);
                payload["filters"] = serde_json::Value::Array(filters);
            }
            emit_with_payload(&report, &payload, out.json)
        }
        Command::Net {
            action: NetAction::Run { spec, input, out },
        } => {
            let net_spec: NetworkJson = serde_json::from_str(&std::fs::read_to_string(&spec)?)?;
            let net = network_from_json(&net_spec)?;
            let f0 = read_function(&input)?;
            let activations = forward(&net, &f0)?;
            let eq = check_network_equivariance(&net, &f0, 1e-9)?;
            let mut report = Report::new(
                format!("net run --spec {spec}"),
                serde_json::json!({"spec": spec, "input": input}),
            );
            report.check("network equivariance", eq.max_residual, 1e-9);
            let payload = serde_json::json!({
                "activations": activations
                    .iter()
                    .map(|a| serde_json::to_value(function_to_spec(a)).unwrap())
                    .collect::<Vec<_>>(),
            });
            emit_with_payload(&report, &payload, out.json)
        }
        Command::Demo {
            action:
                DemoAction::Mpnn {
                    n,
                    layers,
                    seed,
                    out,
                },
        } => {
            let (_, rep) = mpnn_chain(n, layers, seed)?;
            let mut report = Report::new(
                format!("demo mpnn --n {n} --layers {layers} --seed {seed}"),
                serde_json::json!({"n": n, "layers": layers, "seed": seed}),
            );
            for lr in &rep.layer_reports {
                report.check(
                    format!("layer {} ({}) conv output obeys mask", lr.layer, lr.space),
                    lr.off_mask_pre_nonlinearity,
                    1e-9,
                );
                report.check(
                    format!("layer {} ({}) activation obeys mask", lr.layer, lr.space),
                    lr.off_mask_post_nonlinearity,
                    1e-9,
                );
            }
            report.check("whole-chain equivariance", rep.equivariance_residual, 1e-9);
            if out.json {
                let full = serde_json::json!({
                    "result": serde_json::to_value(&rep)?,
                    "report": report,
                });
                println!("{}", serde_json::to_string_pretty(&full)?);
            } else {
                print!("{}", report.render_table());
                for lr in &rep.layer_reports {
                    let support: Vec<String> =
                        lr.support.iter().map(|(l, c)| format!("{l}:{c}")).collect();
                    println!(
                        "layer {} -> {} ({} points), Fourier support {}",
                        lr.layer,
                        lr.space,
                        lr.points,
                        support.join(" ")
                    );
                }
            }
            Ok(report.pass)
        }
        Command::Verify {
            suite,
            seed,
            tol,
            slow,
            timing,
            out,
        } => {
            if !SUITES.contains(&suite.as_str()) {
                anyhow::bail!("unknown suite `{suite}`; expected one of {SUITES:?}");
            }
            let cfg = VerifyConfig {
                seed,
                slow,
                tol_cap: tol,
                timing,
            };
            let report = run_suite(&suite, &cfg)?;
            Ok(emit(&report, out.json))
        }
    }
}
