//! The construction-expression grammar: named sets, functors and tensor
//! combinations, evaluated to stratified sets. Expressions never embed
//! file contents; files are referenced by path arguments.

use anyhow::{anyhow, bail, Context, Result};
use complicial::lifting;
use complicial::strata::{extract, locate_subset, Subset, TruncatedStratifiedSet};
use complicial::tensors::{self, BaseMode, TensorKind};
use complicial::zoo::{self, BasicKind, ComplicialVariant, EFamily, NerveStrat, Sign};
use std::fs;

#[derive(Debug, Clone)]
pub enum Expr {
    Delta(usize),
    DeltaThin(usize),
    Boundary(usize),
    SimplicialHorn(usize, usize),
    Comp(usize, usize),
    CompHorn(usize, usize),
    CompPrime(usize, usize),
    CompDoublePrime(usize, usize),
    CompHornPrime(usize, usize),
    Generalized(usize, Vec<usize>),
    E(Sign, usize),
    E2Prime,
    E2,
    Nerve(String, NerveStrat),
    Triv(usize, Box<Expr>),
    Sst(usize, Box<Expr>),
    Sk(usize, Box<Expr>),
    Dual(Box<Expr>),
    Estrat(Box<Expr>),
    Join(Box<Expr>, Box<Expr>),
    Gray(Box<Expr>, Box<Expr>),
    Lax(Box<Expr>, Box<Expr>),
    Pre(Box<Expr>, Box<Expr>),
    Boxdot(Box<Expr>, Box<Expr>),
    Corner(Box<Expr>, Box<Expr>, Box<Expr>, Box<Expr>, TensorKind),
    Pd(Box<Expr>, i64),
    Load(String),
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser { input, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.input[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.input[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.input[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            bail!("expected `{c}` at position {} in `{}`", self.pos, self.input)
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        for (i, c) in self.input[self.pos..].char_indices() {
            if c.is_alphanumeric() || c == '_' {
                continue;
            }
            self.pos += i;
            break;
        }
        if self.pos == start {
            if self.input[start..].chars().all(|c| c.is_alphanumeric() || c == '_') {
                self.pos = self.input.len();
            } else {
                bail!("expected identifier at position {start} in `{}`", self.input);
            }
        }
        Ok(self.input[start..self.pos].to_string())
    }

    fn number(&mut self) -> Result<usize> {
        let id = self.ident()?;
        id.parse().with_context(|| format!("expected a number, found `{id}`"))
    }

    /// Raw token up to the next `,` or `)` at this nesting level; used
    /// for file paths.
    fn raw(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.input[self.pos..].chars().next() {
            if c == ',' || c == ')' {
                break;
            }
            self.pos += c.len_utf8();
        }
        self.input[start..self.pos].trim().to_string()
    }

    fn expr(&mut self) -> Result<Expr> {
        let head = self.ident()?;
        let arity1 = |p: &mut Self| -> Result<usize> {
            p.eat('(')?;
            let n = p.number()?;
            p.eat(')')?;
            Ok(n)
        };
        let arity2 = |p: &mut Self| -> Result<(usize, usize)> {
            p.eat('(')?;
            let n = p.number()?;
            p.eat(',')?;
            let k = p.number()?;
            p.eat(')')?;
            Ok((n, k))
        };
        let unary_set = |p: &mut Self| -> Result<(usize, Box<Expr>)> {
            p.eat('(')?;
            let n = p.number()?;
            p.eat(',')?;
            let e = p.expr()?;
            p.eat(')')?;
            Ok((n, Box::new(e)))
        };
        let binary = |p: &mut Self| -> Result<(Box<Expr>, Box<Expr>)> {
            p.eat('(')?;
            let a = p.expr()?;
            p.eat(',')?;
            let b = p.expr()?;
            p.eat(')')?;
            Ok((Box::new(a), Box::new(b)))
        };
        Ok(match head.as_str() {
            "delta" => Expr::Delta(arity1(self)?),
            "deltat" => Expr::DeltaThin(arity1(self)?),
            "bdry" => Expr::Boundary(arity1(self)?),
            "shorn" => {
                let (n, k) = arity2(self)?;
                Expr::SimplicialHorn(n, k)
            }
            "comp" => {
                let (n, k) = arity2(self)?;
                Expr::Comp(n, k)
            }
            "chorn" => {
                let (n, k) = arity2(self)?;
                Expr::CompHorn(n, k)
            }
            "compP" => {
                let (n, k) = arity2(self)?;
                Expr::CompPrime(n, k)
            }
            "compPP" => {
                let (n, k) = arity2(self)?;
                Expr::CompDoublePrime(n, k)
            }
            "chornP" => {
                let (n, k) = arity2(self)?;
                Expr::CompHornPrime(n, k)
            }
            "gen" => {
                self.eat('(')?;
                let n = self.number()?;
                self.eat(',')?;
                self.eat('[')?;
                let mut ks = Vec::new();
                loop {
                    ks.push(self.number()?);
                    if self.peek() == Some(',') {
                        self.eat(',')?;
                    } else {
                        break;
                    }
                }
                self.eat(']')?;
                self.eat(')')?;
                Expr::Generalized(n, ks)
            }
            "E" => {
                self.eat('(')?;
                let sign = match self.peek() {
                    Some('-') | Some('m') => Sign::Minus,
                    Some('+') | Some('p') => Sign::Plus,
                    other => bail!("expected `-` or `+`, found {other:?}"),
                };
                self.pos += 1;
                self.eat(',')?;
                let n = self.number()?;
                self.eat(')')?;
                Expr::E(sign, n)
            }
            "E2p" => Expr::E2Prime,
            "E2" => Expr::E2,
            "nerve" => {
                self.eat('(')?;
                let path = self.raw();
                self.eat(',')?;
                let strat = match self.ident()?.as_str() {
                    "minimal" => NerveStrat::Minimal,
                    "zero" | "zero_trivial" => NerveStrat::ZeroTrivial,
                    "natural" => NerveStrat::Natural,
                    "estrat" => {
                        self.eat(')')?;
                        return Ok(Expr::Estrat(Box::new(Expr::Nerve(
                            path,
                            NerveStrat::Minimal,
                        ))));
                    }
                    other => bail!("unknown nerve stratification `{other}`"),
                };
                self.eat(')')?;
                Expr::Nerve(path, strat)
            }
            "triv" => {
                let (n, e) = unary_set(self)?;
                Expr::Triv(n, e)
            }
            "sst" => {
                let (n, e) = unary_set(self)?;
                Expr::Sst(n, e)
            }
            "sk" => {
                let (n, e) = unary_set(self)?;
                Expr::Sk(n, e)
            }
            "dual" => {
                self.eat('(')?;
                let e = self.expr()?;
                self.eat(')')?;
                Expr::Dual(Box::new(e))
            }
            "estrat" => {
                self.eat('(')?;
                let e = self.expr()?;
                self.eat(')')?;
                Expr::Estrat(Box::new(e))
            }
            "join" => {
                let (a, b) = binary(self)?;
                Expr::Join(a, b)
            }
            "gray" => {
                let (a, b) = binary(self)?;
                Expr::Gray(a, b)
            }
            "lax" => {
                let (a, b) = binary(self)?;
                Expr::Lax(a, b)
            }
            "pre" => {
                let (a, b) = binary(self)?;
                Expr::Pre(a, b)
            }
            "boxdot" => {
                let (a, b) = binary(self)?;
                Expr::Boxdot(a, b)
            }
            "corner" => {
                self.eat('(')?;
                let u = self.expr()?;
                self.eat(',')?;
                let v = self.expr()?;
                self.eat(',')?;
                let x = self.expr()?;
                self.eat(',')?;
                let y = self.expr()?;
                self.eat(',')?;
                let kind = match self.ident()?.as_str() {
                    "join" => TensorKind::Join,
                    "gray" => TensorKind::Gray,
                    "lax" => TensorKind::Lax,
                    "pre" => TensorKind::Pretensor,
                    other => bail!("unknown corner kind `{other}`"),
                };
                self.eat(')')?;
                Expr::Corner(Box::new(u), Box::new(v), Box::new(x), Box::new(y), kind)
            }
            "Pd" => {
                self.eat('(')?;
                let e = self.expr()?;
                self.eat(',')?;
                let d = self.number()? as i64;
                self.eat(')')?;
                Expr::Pd(Box::new(e), d)
            }
            "load" => {
                self.eat('(')?;
                let path = self.raw();
                self.eat(')')?;
                Expr::Load(path)
            }
            other => bail!("unknown construction `{other}`"),
        })
    }
}

pub fn parse(input: &str) -> Result<Expr> {
    let mut p = Parser::new(input);
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        bail!("trailing input at position {} in `{input}`", p.pos);
    }
    Ok(e)
}

/// Evaluation options: an optional truncation override for constructors
/// whose natural truncation differs, and a search budget.
pub struct EvalOptions {
    pub trunc: Option<usize>,
    pub budget: u64,
}

pub fn eval(expr: &Expr, opts: &EvalOptions) -> Result<TruncatedStratifiedSet> {
    let set = eval_inner(expr, opts)?;
    Ok(match opts.trunc {
        Some(d) if d != set.truncation() => set.with_truncation(d),
        _ => set,
    })
}

fn eval_child(expr: &Expr, opts: &EvalOptions) -> Result<TruncatedStratifiedSet> {
    // Truncation overrides apply to the outermost constructor only.
    eval_inner(expr, opts)
}

fn eval_inner(expr: &Expr, opts: &EvalOptions) -> Result<TruncatedStratifiedSet> {
    let err = |e: complicial::StrataError| anyhow!(e.to_string());
    Ok(match expr {
        Expr::Delta(n) => zoo::build_basic(BasicKind::Standard, *n, None).map_err(err)?,
        Expr::DeltaThin(n) => zoo::build_basic(BasicKind::StandardThin, *n, None).map_err(err)?,
        Expr::Boundary(n) => zoo::build_basic(BasicKind::Boundary, *n, None).map_err(err)?,
        Expr::SimplicialHorn(n, k) => {
            zoo::build_basic(BasicKind::SimplicialHorn, *n, Some(*k)).map_err(err)?
        }
        Expr::Comp(n, k) => zoo::build_complicial(*n, *k, ComplicialVariant::Plain).map_err(err)?,
        Expr::CompHorn(n, k) => {
            zoo::build_complicial(*n, *k, ComplicialVariant::Horn).map_err(err)?
        }
        Expr::CompPrime(n, k) => {
            zoo::build_complicial(*n, *k, ComplicialVariant::Prime).map_err(err)?
        }
        Expr::CompDoublePrime(n, k) => {
            zoo::build_complicial(*n, *k, ComplicialVariant::DoublePrime).map_err(err)?
        }
        Expr::CompHornPrime(n, k) => {
            zoo::build_complicial(*n, *k, ComplicialVariant::HornPrime).map_err(err)?
        }
        Expr::Generalized(n, ks) => zoo::build_generalized(*n, ks).map_err(err)?.0,
        Expr::E(sign, n) => {
            let trunc = opts.trunc.unwrap_or(*n).max(*n);
            zoo::build_e(EFamily::EPN(*sign, *n), trunc, false).map_err(err)?
        }
        Expr::E2Prime => {
            zoo::build_e(EFamily::E2Prime, opts.trunc.unwrap_or(2).max(2), false).map_err(err)?
        }
        Expr::E2 => {
            zoo::build_e(EFamily::E2, opts.trunc.unwrap_or(2).max(2), false).map_err(err)?
        }
        Expr::Nerve(path, strat) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let file: complicial::io::CatFile = complicial::io::from_json(&text)?;
            let cat = complicial::io::category_from_file(&file)?;
            zoo::nerve(&cat, opts.trunc.unwrap_or(3), *strat).map_err(err)?
        }
        Expr::Triv(n, e) => zoo::triv(*n, &eval_child(e, opts)?),
        Expr::Sst(n, e) => {
            let x = eval_child(e, opts)?;
            let sub = zoo::sst(*n, &x).map_err(err)?;
            extract(&x, &sub).map_err(err)?
        }
        Expr::Sk(n, e) => {
            let x = eval_child(e, opts)?;
            let sub = zoo::sk(*n, &x);
            extract(&x, &sub).map_err(err)?
        }
        Expr::Dual(e) => zoo::dual_set(&eval_child(e, opts)?),
        Expr::Estrat(e) => {
            let x = eval_child(e, opts)?;
            lifting::estrat(&x, opts.budget).map_err(|e| anyhow!(e.to_string()))?
        }
        Expr::Join(a, b) => {
            let x = eval_child(a, opts)?;
            let y = eval_child(b, opts)?;
            let cap = opts.trunc.unwrap_or(x.truncation() + y.truncation() + 1);
            tensors::join(&x, &y, tensors::JoinAug::Canonical, tensors::JoinAug::Canonical, cap)
                .map_err(err)?
                .set
        }
        Expr::Gray(a, b) | Expr::Lax(a, b) | Expr::Pre(a, b) | Expr::Boxdot(a, b) => {
            let x = eval_child(a, opts)?;
            let y = eval_child(b, opts)?;
            let trunc = opts.trunc.unwrap_or(x.truncation().max(y.truncation()));
            let (xr, yr) = (x.with_truncation(trunc), y.with_truncation(trunc));
            let p = match expr {
                Expr::Gray(..) => tensors::gray(&xr, &yr),
                Expr::Lax(..) => tensors::lax(&xr, &yr),
                Expr::Pre(..) => tensors::pretensor(&xr, &yr),
                _ => tensors::boxdot(&xr, &yr),
            }
            .map_err(err)?;
            p.set
        }
        Expr::Corner(u, v, x, y, kind) => {
            let vs = eval_child(v, opts)?;
            let us = eval_child(u, opts)?;
            let ys = eval_child(y, opts)?;
            let xs = eval_child(x, opts)?;
            let usub = locate_subset(&vs, &us).map_err(err)?;
            let xsub = locate_subset(&ys, &xs).map_err(err)?;
            // A sub-side with no vertices is read as a representable
            // boundary, whose augmentation keeps the base point.
            let base = |sub: &Subset, amb: &TruncatedStratifiedSet| {
                if amb.gen_count(0) > 0 && sub.members[0].iter().all(|&b| !b) {
                    BaseMode::Full
                } else {
                    BaseMode::Canonical
                }
            };
            let trunc = opts.trunc.unwrap_or(match kind {
                TensorKind::Join => vs.truncation() + ys.truncation() + 1,
                _ => vs.truncation().max(ys.truncation()),
            });
            let (vv, yy) = match kind {
                TensorKind::Join => (vs.clone(), ys.clone()),
                _ => (vs.with_truncation(trunc), ys.with_truncation(trunc)),
            };
            let (usubr, xsubr) = match kind {
                TensorKind::Join => (usub.clone(), xsub.clone()),
                _ => (
                    retrunc_subset(&usub, trunc),
                    retrunc_subset(&xsub, trunc),
                ),
            };
            let c = tensors::corner_domain(
                &vv,
                &usubr,
                base(&usub, &vs),
                &yy,
                &xsubr,
                base(&xsub, &ys),
                *kind,
                trunc,
            )
            .map_err(err)?;
            extract(c.ambient.set(), &c.domain).map_err(err)?
        }
        Expr::Pd(e, d) => {
            let (p, xr, yr, n, m) = eval_tensor_product(e, opts)?;
            let slice = tensors::depth_filtration(&p, &xr, &yr, n, m, *d).map_err(err)?;
            extract(&p.set, &slice.p_d).map_err(err)?
        }
        Expr::Load(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let file: complicial::io::SetFile = complicial::io::from_json(&text)?;
            complicial::io::set_from_file(&file)?
        }
    })
}

fn retrunc_subset(sub: &Subset, trunc: usize) -> Subset {
    let mut members = sub.members.clone();
    let mut flags = sub.flags.clone();
    members.resize(trunc + 1, Vec::new());
    flags.resize(trunc + 1, Vec::new());
    members.truncate(trunc + 1);
    flags.truncate(trunc + 1);
    Subset { members, flags }
}

/// Evaluates a `gray`/`lax` expression over simplex-shaped factors,
/// keeping the product structure for the depth filtration.
pub fn eval_tensor_product(
    expr: &Expr,
    opts: &EvalOptions,
) -> Result<(
    complicial::strata::Product,
    TruncatedStratifiedSet,
    TruncatedStratifiedSet,
    usize,
    usize,
)> {
    let (a, b, is_gray) = match expr {
        Expr::Gray(a, b) => (a, b, true),
        Expr::Lax(a, b) => (a, b, false),
        _ => bail!("depth filtrations need a gray(..) or lax(..) expression"),
    };
    let x = eval_child(a, opts)?;
    let y = eval_child(b, opts)?;
    let n = x.truncation();
    let m = y.truncation();
    let trunc = n + m;
    let xr = x.with_truncation(trunc);
    let yr = y.with_truncation(trunc);
    let p = if is_gray { tensors::gray(&xr, &yr) } else { tensors::lax(&xr, &yr) }
        .map_err(|e| anyhow!(e.to_string()))?;
    Ok((p, xr, yr, n, m))
}
