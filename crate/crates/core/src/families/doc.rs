//! Serializable term data of a solution and its reload.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    AlphaFn, Coeff, EllipticTerm, Equation, Family, FamilyError, Frame, Mode, PolyYZ,
    XPolySolution,
};
use crate::elliptic::WpEvaluator;
use crate::paramdsl::ParamFn;
use crate::series::{BiField, EtaPoly, RadialField};
use crate::texpr::{ParamSource, ParamTable, TExpr, TermRecord};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub family: String,
    pub equation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub mode: String,
    pub params: Vec<ParamDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameDoc>,
    pub coeffs: Vec<CoeffDoc>,
}

/// A named parameter: either an expression or the integrated frame angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaDoc {
    pub gamma2: String,
    pub epsilon: f64,
    pub t0: f64,
    pub alpha0: f64,
}

/// A time-dependent coefficient: readable text plus exact monomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExprDoc {
    pub text: String,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameDoc {
    Line { scale: f64, shift: ExprDoc },
    Plane { alpha: ExprDoc, beta: ExprDoc },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialTermDoc {
    pub power: i32,
    pub log_power: u8,
    pub coeff: ExprDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiTermDoc {
    pub zeta_power: i32,
    pub eta_power: usize,
    pub coeff: ExprDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTermDoc {
    pub y_power: u32,
    pub z_power: u32,
    pub coeff: ExprDoc,
}

/// One x-coefficient. Radial terms are in `s = scale*y + shift(t)`; bi
/// terms in the moving-plane coordinates `(zeta, eta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoeffDoc {
    Zero,
    Radial {
        scale: f64,
        shift: ExprDoc,
        terms: Vec<RadialTermDoc>,
    },
    Bi {
        terms: Vec<BiTermDoc>,
    },
    Polynomial {
        terms: Vec<PolyTermDoc>,
    },
    Elliptic {
        iota: f64,
        a: f64,
        b: f64,
    },
}

fn expr_doc(e: &TExpr, names: &[String]) -> ExprDoc {
    ExprDoc {
        text: e.render(names),
        terms: e.to_records(names),
    }
}

fn expr_back(d: &ExprDoc, names: &[String]) -> Result<TExpr, FamilyError> {
    TExpr::from_records(&d.terms, names).map_err(FamilyError::Invalid)
}

impl XPolySolution {
    pub fn to_doc(&self) -> SolutionDoc {
        let names = self.params.names();
        let params = (0..self.params.len())
            .map(|i| {
                let name = names[i].clone();
                match self.params.source(i as u16) {
                    ParamSource::Expr(f) => ParamDoc {
                        name,
                        expr: Some(f.source_text().to_string()),
                        var: Some(f.var().to_string()),
                        alpha: None,
                    },
                    ParamSource::Alpha(a) => ParamDoc {
                        name,
                        expr: None,
                        var: None,
                        alpha: Some(AlphaDoc {
                            gamma2: a.gamma2().source_text().to_string(),
                            epsilon: a.eps(),
                            t0: a.t0(),
                            alpha0: a.alpha0(),
                        }),
                    },
                }
            })
            .collect();
        let frame = self.frame.as_ref().map(|f| match f {
            Frame::Line { scale, shift } => FrameDoc::Line {
                scale: *scale,
                shift: expr_doc(shift, names),
            },
            Frame::Plane { alpha, beta } => FrameDoc::Plane {
                alpha: expr_doc(alpha, names),
                beta: expr_doc(beta, names),
            },
        });
        let coeffs = self.coeffs[..self.equation.n_coeffs()]
            .iter()
            .map(|c| match c {
                Coeff::Zero => CoeffDoc::Zero,
                Coeff::Radial(r) => CoeffDoc::Radial {
                    scale: r.scale(),
                    shift: expr_doc(r.shift(), names),
                    terms: r
                        .terms()
                        .map(|((p, l), e)| RadialTermDoc {
                            power: p,
                            log_power: l,
                            coeff: expr_doc(e, names),
                        })
                        .collect(),
                },
                Coeff::Bi(b) => CoeffDoc::Bi {
                    terms: b
                        .terms()
                        .flat_map(|(p, cf)| {
                            cf.coeffs()
                                .iter()
                                .enumerate()
                                .filter(|(_, e)| !e.is_zero())
                                .map(move |(j, e)| BiTermDoc {
                                    zeta_power: p,
                                    eta_power: j,
                                    coeff: expr_doc(e, names),
                                })
                        })
                        .collect(),
                },
                Coeff::PolyYZ(p) => CoeffDoc::Polynomial {
                    terms: p
                        .terms()
                        .map(|((a, b), e)| PolyTermDoc {
                            y_power: a,
                            z_power: b,
                            coeff: expr_doc(e, names),
                        })
                        .collect(),
                },
                Coeff::Elliptic(e) => CoeffDoc::Elliptic {
                    iota: e.evaluator().iota(),
                    a: e.a(),
                    b: e.b(),
                },
            })
            .collect();
        SolutionDoc {
            family: self.family.name(),
            equation: self.equation.name().to_string(),
            k: match self.equation {
                Equation::Shortwave { k } => Some(k),
                _ => None,
            },
            mode: self.mode.name().to_string(),
            params,
            frame,
            coeffs,
        }
    }
}

impl SolutionDoc {
    /// Rebuilds an evaluable solution from the stored term lists.
    pub fn to_solution(&self) -> Result<XPolySolution, FamilyError> {
        let bad = |what: &str| FamilyError::Invalid(format!("solution document: {what}"));
        let family = Family::from_name(&self.family).ok_or_else(|| bad("unknown family"))?;
        let equation = match self.equation.as_str() {
            "shortwave" => Equation::Shortwave {
                k: self.k.ok_or_else(|| bad("shortwave needs k"))?,
            },
            "kz2d" => Equation::Kz2d,
            "kz3d" => Equation::Kz3d,
            _ => return Err(bad("unknown equation")),
        };
        if family.equation_name() != equation.name() {
            return Err(bad("family does not match equation"));
        }
        let mode = Mode::from_name(&self.mode).ok_or_else(|| bad("unknown mode"))?;

        let mut table = ParamTable::new();
        for p in &self.params {
            let source = match (&p.expr, &p.alpha) {
                (Some(e), None) => {
                    let var = p.var.as_deref().unwrap_or("t");
                    let f = ParamFn::parse_with_var(e, var)
                        .map_err(|err| bad(&format!("parameter `{}`: {err}", p.name)))?;
                    ParamSource::Expr(f)
                }
                (None, Some(a)) => {
                    let g2 = ParamFn::parse(&a.gamma2)
                        .map_err(|err| bad(&format!("parameter `{}`: {err}", p.name)))?;
                    ParamSource::Alpha(AlphaFn::new(g2, a.epsilon, a.t0, a.alpha0)?)
                }
                _ => return Err(bad(&format!("parameter `{}` needs exactly one of expr, alpha", p.name))),
            };
            table.insert(&p.name, source);
        }
        let names = table.names().to_vec();

        let frame = match &self.frame {
            None => None,
            Some(FrameDoc::Line { scale, shift }) => Some(Frame::Line {
                scale: *scale,
                shift: expr_back(shift, &names)?,
            }),
            Some(FrameDoc::Plane { alpha, beta }) => Some(Frame::Plane {
                alpha: expr_back(alpha, &names)?,
                beta: expr_back(beta, &names)?,
            }),
        };
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(match c {
                CoeffDoc::Zero => Coeff::Zero,
                CoeffDoc::Radial { scale, shift, terms } => {
                    let mut r =
                        RadialField::new(*scale, expr_back(shift, &names)?).map_err(FamilyError::Series)?;
                    for t in terms {
                        r.add_term(t.power, t.log_power, expr_back(&t.coeff, &names)?);
                    }
                    Coeff::Radial(r)
                }
                CoeffDoc::Bi { terms } => {
                    let mut b = BiField::zero();
                    for t in terms {
                        let mut cs = vec![TExpr::zero(); t.eta_power + 1];
                        cs[t.eta_power] = expr_back(&t.coeff, &names)?;
                        b.add_term(t.zeta_power, EtaPoly::from_coeffs(cs));
                    }
                    Coeff::Bi(b)
                }
                CoeffDoc::Polynomial { terms } => {
                    let mut p = PolyYZ::new();
                    for t in terms {
                        p.add_term(t.y_power, t.z_power, expr_back(&t.coeff, &names)?);
                    }
                    Coeff::PolyYZ(p)
                }
                CoeffDoc::Elliptic { iota, a, b } => Coeff::Elliptic(EllipticTerm::new(
                    Arc::new(WpEvaluator::new(*iota)?),
                    *a,
                    *b,
                )),
            });
        }
        if coeffs.len() > 4 {
            return Err(bad("more than four coefficients"));
        }
        Ok(XPolySolution::new(family, equation, mode, table, coeffs, frame))
    }
}
