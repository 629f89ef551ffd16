//! Spatial-domain generalized convolution: the double-lift reference sum
//! over the whole group and its three reduced forms for quotient-space
//! operands, scalar or matrix valued.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{coset_space, lift, QuotientKind, QuotientSpace, Space, SpaceFunction};
use crate::linalg::CMat;

/// How the values of the two operands combine pointwise.
///
/// `MatVec` is the ordinary matrix product of an n x m value with an m x k
/// value (this covers both matrix-times-column filters and the row-vector
/// activation convention where a 1 x m activation meets an m_in x m_out
/// filter). `Dot` pairs equal-shaped values into a scalar; `Reverse` applies
/// the second operand's matrix to the first operand's column from the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductMode {
    Scalar,
    Dot,
    MatVec,
    Reverse,
}

impl ProductMode {
    fn output_shape(&self, f: (usize, usize), g: (usize, usize)) -> Result<(usize, usize)> {
        match self {
            ProductMode::Scalar => {
                if f == (1, 1) && g == (1, 1) {
                    Ok((1, 1))
                } else {
                    Err(Error::ShapeMismatch(format!(
                        "scalar mode needs 1x1 values, got {f:?} and {g:?}"
                    )))
                }
            }
            ProductMode::Dot => {
                if f == g {
                    Ok((1, 1))
                } else {
                    Err(Error::ShapeMismatch(format!(
                        "dot mode needs equal shapes, got {f:?} and {g:?}"
                    )))
                }
            }
            ProductMode::MatVec => {
                if f.1 == g.0 {
                    Ok((f.0, g.1))
                } else {
                    Err(Error::ShapeMismatch(format!(
                        "matvec mode cannot chain {f:?} with {g:?}"
                    )))
                }
            }
            ProductMode::Reverse => {
                if g.1 == f.0 && f.1 == 1 {
                    Ok((g.0, 1))
                } else {
                    Err(Error::ShapeMismatch(format!(
                        "reverse mode needs an m x 1 value and an n x m value, got {f:?} and {g:?}"
                    )))
                }
            }
        }
    }

    fn apply(&self, fv: &CMat, gv: &CMat) -> CMat {
        match self {
            ProductMode::Scalar | ProductMode::MatVec => fv * gv,
            ProductMode::Dot => {
                let s = fv.iter().zip(gv.iter()).map(|(a, b)| a * b).sum();
                CMat::from_element(1, 1, s)
            }
            ProductMode::Reverse => gv * fv,
        }
    }
}

/// A filter lives on a double-coset space; inside a network its value at
/// each point maps input channels to output channels.
#[derive(Debug, Clone)]
pub struct Filter {
    pub function: SpaceFunction,
    pub mode: ProductMode,
}

impl Filter {
    pub fn new(function: SpaceFunction, mode: ProductMode) -> Result<Filter> {
        match function.space.quotient() {
            Some(q) if q.kind == QuotientKind::Double => Ok(Filter { function, mode }),
            _ => Err(Error::KindMismatch(
                "filters live on double-coset spaces H\\G/K".into(),
            )),
        }
    }

    pub fn space(&self) -> &Arc<QuotientSpace> {
        self.function
            .space
            .quotient()
            .expect("checked at construction")
    }
}

fn same_group(f: &SpaceFunction, g: &SpaceFunction) -> Result<()> {
    if f.space.group().name != g.space.group().name {
        return Err(Error::GroupMismatch(format!(
            "operands live over {} and {}",
            f.space.group().name,
            g.space.group().name
        )));
    }
    Ok(())
}

/// The reference convolution: (f * g)(u) = sum_v f^G(u v^-1) g^G(v), both
/// operands lifted to the group. Everything else in this module reduces to
/// this sum.
pub fn convolve_def4(
    f: &SpaceFunction,
    g: &SpaceFunction,
    mode: ProductMode,
) -> Result<SpaceFunction> {
    same_group(f, g)?;
    let shape = mode.output_shape(f.shape, g.shape)?;
    let grp = f.space.group().clone();
    let fu = lift(f);
    let gu = lift(g);
    let n = grp.order;
    let mut values = Vec::with_capacity(n);
    for u in 0..n {
        let mut acc = CMat::zeros(shape.0, shape.1);
        for v in 0..n {
            let uv_inv = grp.mul(u, grp.inv(v));
            acc += mode.apply(&fu.values[uv_inv], &gu.values[v]);
        }
        values.push(acc);
    }
    Ok(SpaceFunction {
        space: Space::Group(grp),
        shape,
        values,
    })
}

/// Case I: f on G, g on G/H. The result is constant on left H-cosets, so it
/// is returned on G/H: (f * g)(x) = sum_v f(r(x) v^-1) g([v]).
pub fn convolve_case1(
    f: &SpaceFunction,
    g: &SpaceFunction,
    mode: ProductMode,
) -> Result<SpaceFunction> {
    same_group(f, g)?;
    if f.space.quotient().is_some() {
        return Err(Error::KindMismatch(
            "case I expects f on the full group".into(),
        ));
    }
    let x_space = match g.space.quotient() {
        Some(q) if q.kind == QuotientKind::Left => q.clone(),
        _ => {
            return Err(Error::KindMismatch(
                "case I expects g on a LEFT quotient".into(),
            ))
        }
    };
    let shape = mode.output_shape(f.shape, g.shape)?;
    let grp = f.space.group().clone();
    let n = grp.order;
    let mut values = Vec::with_capacity(x_space.len());
    for x in 0..x_space.len() {
        let rx = x_space.representative[x];
        let mut acc = CMat::zeros(shape.0, shape.1);
        for v in 0..n {
            let arg = grp.mul(rx, grp.inv(v));
            acc += mode.apply(&f.values[arg], &g.values[x_space.point_of(v)]);
        }
        values.push(acc);
    }
    Ok(SpaceFunction {
        space: Space::Quotient(x_space),
        shape,
        values,
    })
}

/// Case II: f on G/H, g on H\G (same H). The sum collapses to right cosets:
/// (f * g)(u) = |H| sum_y f([u r(y)^-1]) g(y), a function on G.
pub fn convolve_case2(
    f: &SpaceFunction,
    g: &SpaceFunction,
    mode: ProductMode,
) -> Result<SpaceFunction> {
    same_group(f, g)?;
    let x_space = match f.space.quotient() {
        Some(q) if q.kind == QuotientKind::Left => q.clone(),
        _ => {
            return Err(Error::KindMismatch(
                "case II expects f on a LEFT quotient".into(),
            ))
        }
    };
    let y_space = match g.space.quotient() {
        Some(q) if q.kind == QuotientKind::Right => q.clone(),
        _ => {
            return Err(Error::KindMismatch(
                "case II expects g on a RIGHT quotient".into(),
            ))
        }
    };
    if !x_space.h.same_as(&y_space.h) {
        return Err(Error::GroupMismatch(
            "case II needs the same H on both quotients".into(),
        ));
    }
    let shape = mode.output_shape(f.shape, g.shape)?;
    let grp = f.space.group().clone();
    let n = grp.order;
    let scale = crate::linalg::C::new(x_space.h.order() as f64, 0.0);
    let mut values = Vec::with_capacity(n);
    for u in 0..n {
        let mut acc = CMat::zeros(shape.0, shape.1);
        for y in 0..y_space.len() {
            let arg = grp.mul(u, grp.inv(y_space.representative[y]));
            acc += mode.apply(&f.values[x_space.point_of(arg)], &g.values[y]);
        }
        values.push(acc * scale);
    }
    Ok(SpaceFunction {
        space: Space::Group(grp),
        shape,
        values,
    })
}

/// Case III: f on G/H, filter on H\G/K. The layer map of a G-CNN:
/// (f * chi)(x) = |H| sum_{y in H\G} f([r(x) r(y)^-1]) chi([r(y)]), read on
/// G/K.
pub fn convolve_case3(f: &SpaceFunction, chi: &Filter) -> Result<SpaceFunction> {
    let (out_space, right) = case3_spaces(f, chi)?;
    let reps_x: Vec<usize> = out_space.representative.clone();
    let reps_y: Vec<usize> = right.representative.clone();
    convolve_case3_with_reps(f, chi, &out_space, &right, &reps_x, &reps_y)
}

/// Resolve and validate the output space G/K and the intermediate right
/// quotient H\G used by the Case III sum.
pub fn case3_spaces(
    f: &SpaceFunction,
    chi: &Filter,
) -> Result<(Arc<QuotientSpace>, Arc<QuotientSpace>)> {
    same_group(f, &chi.function)?;
    let x_space = match f.space.quotient() {
        Some(q) if q.kind == QuotientKind::Left => q.clone(),
        _ => {
            return Err(Error::KindMismatch(
                "case III expects f on a LEFT quotient".into(),
            ))
        }
    };
    let chi_space = chi.space();
    if !x_space.h.same_as(&chi_space.h) {
        return Err(Error::GroupMismatch(
            "filter's left subgroup must match the input quotient's H".into(),
        ));
    }
    let k = chi_space.k.as_ref().expect("double space carries K");
    let out_space = coset_space(QuotientKind::Left, k, None)?;
    let right = coset_space(QuotientKind::Right, &x_space.h, None)?;
    Ok((out_space, right))
}

/// Case III with explicit coset representatives. `reps_x[i]` must lie in
/// the i-th coset of `out_space` and `reps_y[j]` in the j-th coset of
/// `right`; the canonical choice is each coset's minimal element. The
/// output is invariant under the choice, which dedicated tests verify.
pub fn convolve_case3_with_reps(
    f: &SpaceFunction,
    chi: &Filter,
    out_space: &Arc<QuotientSpace>,
    right: &Arc<QuotientSpace>,
    reps_x: &[usize],
    reps_y: &[usize],
) -> Result<SpaceFunction> {
    let x_space = f.space.quotient().expect("validated by case3_spaces");
    let shape = chi.mode.output_shape(f.shape, chi.function.shape)?;
    let grp = f.space.group().clone();
    let chi_space = chi.space();
    let scale = crate::linalg::C::new(x_space.h.order() as f64, 0.0);
    let mut values = Vec::with_capacity(out_space.len());
    for x in 0..out_space.len() {
        let rx = reps_x[x];
        let mut acc = CMat::zeros(shape.0, shape.1);
        for (y, &ry) in reps_y.iter().enumerate() {
            debug_assert_eq!(right.point_of(ry), y);
            let arg = grp.mul(rx, grp.inv(ry));
            acc += chi.mode.apply(
                &f.values[x_space.point_of(arg)],
                &chi.function.values[chi_space.point_of(ry)],
            );
        }
        values.push(acc * scale);
    }
    Ok(SpaceFunction {
        space: Space::Quotient(out_space.clone()),
        shape,
        values,
    })
}
