//! Resolution of a parsed model into the engine's objects.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use vtc_core::foliation::FoliationContext;
use vtc_core::forms::{base_interior, d, delta, Frame};
use vtc_core::symplectic::PresympStructure;
use vtc_core::{FieldSpec, Monomial, MultiIndex, Parity, Poly, Rational, Role, Spectrum};

use crate::ast::*;
use crate::error::ModelError;
use crate::parser::{parse_expr, parse_model_ast};

pub type P = Poly<Rational>;
type MResult<T> = Result<T, ModelError>;

/// Resolved field declaration: component labels and their indices.
#[derive(Clone, Debug)]
pub struct FieldInfo {
    pub shape: ShapeKind,
    pub comps: Vec<(Vec<u8>, u32)>,
    pub form: P,
}

/// Lie algebra tables with the implied symmetries filled in.
#[derive(Clone, Debug, Default)]
pub struct Algebra {
    pub dim: u8,
    pub constants: BTreeMap<(u8, u8, u8), Rational>,
    pub form: BTreeMap<(u8, u8), Rational>,
}

impl Algebra {
    fn new(a: &AlgebraDecl) -> MResult<Self> {
        let mut out = Algebra { dim: a.dim, ..Default::default() };
        let check = |i: &u8| {
            if *i >= a.dim {
                Err(ModelError::Invalid(format!("algebra index {i} out of range")))
            } else {
                Ok(())
            }
        };
        for (i, j, k, c) in &a.constants {
            [i, j, k].into_iter().try_for_each(check)?;
            insert(&mut out.constants, (*i, *j, *k), c.clone())?;
            insert(&mut out.constants, (*j, *i, *k), -c.clone())?;
        }
        for (i, j, c) in &a.form {
            [i, j].into_iter().try_for_each(check)?;
            insert(&mut out.form, (*i, *j), c.clone())?;
            insert(&mut out.form, (*j, *i), c.clone())?;
        }
        Ok(out)
    }

    /// `⟨a, b⟩`.
    pub fn pair(&self, a: &[P], b: &[P]) -> P {
        let mut out = P::zero();
        for ((i, j), c) in &self.form {
            out.add_scaled(&a[*i as usize].mul(&b[*j as usize]), c);
        }
        out
    }

    /// `[a, b]`.
    pub fn comm(&self, a: &[P], b: &[P]) -> Vec<P> {
        let mut out = vec![P::zero(); self.dim as usize];
        for ((i, j, k), c) in &self.constants {
            out[*k as usize].add_scaled(&a[*i as usize].mul(&b[*j as usize]), c);
        }
        out
    }
}

fn insert<K: Ord + std::fmt::Debug>(m: &mut BTreeMap<K, Rational>, k: K, v: Rational) -> MResult<()> {
    match m.get(&k) {
        Some(old) if *old != v => Err(ModelError::Invalid(format!("conflicting algebra entries at {k:?}"))),
        _ => {
            m.insert(k, v);
            Ok(())
        }
    }
}

/// Leaf data: the foliation context and the checks declared with it.
#[derive(Clone, Debug)]
pub struct Leaves {
    pub ctx: FoliationContext<Rational>,
    pub energy: Option<String>,
    pub affine: Option<String>,
    pub central: Option<P>,
}

#[derive(Clone, Debug)]
pub struct Model {
    pub ast: ModelAst,
    pub name: String,
    pub sp: Spectrum,
    pub frame: Frame,
    pub fields: BTreeMap<String, FieldInfo>,
    pub algebra: Option<Algebra>,
    pub structure: PresympStructure<Rational>,
    pub densities: BTreeMap<String, P>,
    pub master: String,
    pub leaves: Option<Leaves>,
}

/// Value of an expression: a scalar form or algebra components.
#[derive(Clone, Debug, PartialEq)]
pub enum Val {
    S(P),
    V(Vec<P>),
}

pub fn parse_model(src: &str) -> MResult<Model> {
    Model::from_ast(parse_model_ast(src)?)
}

fn role(r: &str) -> Role {
    match r {
        "antifield" => Role::Antifield,
        "source" => Role::Source,
        _ => Role::Field,
    }
}

impl Model {
    pub fn from_ast(ast: ModelAst) -> MResult<Self> {
        let n = ast.dim;
        if n == 0 {
            return Err(ModelError::Invalid("dimension must be positive".into()));
        }
        let metric: Vec<i64> = if ast.metric.is_empty() {
            vec![1; n as usize]
        } else if ast.metric.len() == n as usize {
            ast.metric.iter().map(|v| *v as i64).collect()
        } else {
            return Err(ModelError::Invalid(format!("metric has {} entries for dimension {n}", ast.metric.len())));
        };
        let mut sp = Spectrum::new(n as usize).with_metric(metric);
        for p in &ast.params {
            sp.add_param(p);
        }
        let algebra = ast.algebra.as_ref().map(Algebra::new).transpose()?;
        let mut model = Model {
            name: if ast.name.is_empty() { "model".into() } else { ast.name.clone() },
            sp,
            frame: Frame::covariant(n as usize),
            fields: BTreeMap::new(),
            algebra,
            structure: PresympStructure {
                omega: P::zero(),
                theta: None,
                frame: Frame::covariant(n as usize),
                odd: false,
                ghost: 0,
                degree: 1,
                bar: Default::default(),
            },
            densities: BTreeMap::new(),
            master: String::new(),
            leaves: None,
            ast,
        };
        model.declare_fields()?;
        model.build_structure()?;
        model.build_densities()?;
        model.build_leaves()?;
        Ok(model)
    }

    fn declare_fields(&mut self) -> MResult<()> {
        let decls = self.ast.fields.clone();
        for f in &decls {
            if self.fields.contains_key(&f.name) || self.ast.params.contains(&f.name) {
                return Err(ModelError::Invalid(format!("'{}' is declared twice", f.name)));
            }
            let labels: Vec<Vec<u8>> = match f.shape.kind {
                ShapeKind::Scalar => vec![vec![]],
                ShapeKind::Vector => {
                    let r = f.shape.range.clone().unwrap_or(Range { lo: 0, hi: self.ast.dim - 1 });
                    if r.hi >= self.ast.dim {
                        return Err(ModelError::Invalid(format!("components of '{}' exceed the dimension", f.name)));
                    }
                    (r.lo..=r.hi).map(|i| vec![i]).collect()
                }
                ShapeKind::Algebra => {
                    let a = self.algebra.as_ref().ok_or_else(|| {
                        ModelError::Invalid(format!("'{}' is algebra valued but no algebra is declared", f.name))
                    })?;
                    (0..a.dim).map(|i| vec![i]).collect()
                }
            };
            let parity = if f.parity_odd { Parity::Odd } else { Parity::Even };
            let comps = labels
                .into_iter()
                .map(|l| {
                    let id = self.sp.add_field(FieldSpec::new(&f.name, l.clone(), parity, f.ghost, role(&f.role)));
                    (l, id)
                })
                .collect();
            self.fields.insert(f.name.clone(), FieldInfo { shape: f.shape.kind, comps, form: P::one() });
        }
        for f in &decls {
            if let Some(form) = &f.form {
                let v = self.scalar(form, &BTreeMap::new())?;
                if !v.generators().iter().all(|g| matches!(g, vtc_core::Gen::Dx(_) | vtc_core::Gen::Coord(_) | vtc_core::Gen::Param(_))) {
                    return Err(ModelError::Grading(format!("the form of '{}' must be a base form", f.name)));
                }
                self.fields.get_mut(&f.name).expect("declared").form = v;
            }
            if let Some(c) = &f.conj {
                let own = self.fields[&f.name].comps.clone();
                let other = self.fields.get(c).ok_or_else(|| ModelError::UnknownField(c.clone()))?.comps.clone();
                for (label, id) in &own {
                    let target = other
                        .iter()
                        .find(|(l, _)| l == label)
                        .ok_or_else(|| ModelError::Invalid(format!("'{c}' has no component matching {}{label:?}", f.name)))?;
                    self.sp.fields[*id as usize].conj = Some(target.1);
                }
            }
        }
        self.sp.validate().map_err(|e| ModelError::Grading(e.to_string()))?;
        Ok(())
    }

    fn build_structure(&mut self) -> MResult<()> {
        let Some(decl) = self.ast.structure.clone() else {
            return Err(ModelError::Invalid("no structure declared".into()));
        };
        let top = self.frame.top();
        let st = match &decl {
            StructureDecl::Theta(e) => {
                let t = self.scalar(e, &BTreeMap::new())?;
                expect_bidegree(&t, (1, top), "theta")?;
                PresympStructure::from_potential(t, self.frame.clone())
            }
            StructureDecl::Omega(e) => {
                let w = self.scalar(e, &BTreeMap::new())?;
                expect_bidegree(&w, (2, top), "omega")?;
                PresympStructure::new(w, self.frame.clone())
            }
        }
        .map_err(|e| ModelError::Grading(e.to_string()))?;
        let bar: Vec<u32> = (0..self.sp.fields.len() as u32).filter(|c| self.sp.field(*c).conj.is_some()).collect();
        let st = st.with_bar(bar).with_labels(self.ast.structure_ghost.unwrap_or(0), 1);
        if !st.is_consistent() {
            return Err(ModelError::Invalid("the structure is not δ-closed".into()));
        }
        self.structure = st;
        Ok(())
    }

    fn build_densities(&mut self) -> MResult<()> {
        let top = self.frame.top();
        for (name, e) in self.ast.densities.clone() {
            if self.densities.contains_key(&name) || self.fields.contains_key(&name) {
                return Err(ModelError::Invalid(format!("'{name}' is declared twice")));
            }
            let v = self.scalar(&e, &BTreeMap::new())?;
            if !v.is_zero() && !matches!(v.bidegree(), Some((0, p)) if p <= top) {
                return Err(ModelError::Grading(format!("density '{name}' is not a horizontal form of one bidegree")));
            }
            if !v.is_zero() && v.parity().is_none() {
                return Err(ModelError::Grading(format!("density '{name}' has mixed parity")));
            }
            self.densities.insert(name, v);
        }
        let master = match &self.ast.master {
            Some(m) => m.clone(),
            None => self
                .ast
                .densities
                .first()
                .map(|d| d.0.clone())
                .ok_or_else(|| ModelError::Invalid("no density declared".into()))?,
        };
        let o = self.densities.get(&master).ok_or_else(|| ModelError::UnknownField(master.clone()))?;
        expect_bidegree(o, (0, top), &master)?;
        if let Some(par) = o.parity() {
            if par == self.structure.odd {
                return Err(ModelError::Grading(format!(
                    "master density '{master}' must be {} for an {} structure",
                    if self.structure.odd { "even" } else { "odd" },
                    if self.structure.odd { "odd" } else { "even" }
                )));
            }
        }
        self.master = master;
        Ok(())
    }

    fn build_leaves(&mut self) -> MResult<()> {
        let Some(fd) = self.ast.foliation.clone() else { return Ok(()) };
        if let Some(t) = fd.time.iter().find(|t| **t >= self.ast.dim) {
            return Err(ModelError::Invalid(format!("time direction x[{t}] exceeds the dimension")));
        }
        let mut ctx = FoliationContext::new(&self.sp, &fd.time);
        for rule in &fd.phase {
            let values: Vec<Option<(String, u8)>> = match &rule.family {
                None => vec![None],
                Some((v, r)) => (r.lo..=r.hi).map(|i| Some((v.clone(), i))).collect(),
            };
            for binding in values {
                let env: BTreeMap<String, u8> = binding.into_iter().collect();
                let Expr::Ref { name, idx, der: Some(der) } = &rule.lhs else {
                    return Err(ModelError::Invalid("phase rule must rewrite a derivative".into()));
                };
                let comp = self.component(name, idx, &env)?;
                let der = self.literal_indices(der, &env)?;
                let image = self.scalar(&rule.rhs, &env)?;
                ctx = ctx
                    .with_rule(comp, MultiIndex::from_entries(der), image)
                    .map_err(|e| ModelError::Grading(e.to_string()))?;
            }
        }
        if let Some(h) = &fd.energy {
            if !self.densities.contains_key(h) {
                return Err(ModelError::UnknownField(h.clone()));
            }
        }
        if let Some(a) = &fd.affine {
            match self.fields.get(a) {
                Some(f) if f.shape == ShapeKind::Algebra => {}
                Some(_) => return Err(ModelError::Grading(format!("'{a}' is not algebra valued"))),
                None => return Err(ModelError::UnknownField(a.clone())),
            }
        }
        let central = fd.central.as_ref().map(|c| self.scalar(c, &BTreeMap::new())).transpose()?;
        self.leaves = Some(Leaves { ctx, energy: fd.energy, affine: fd.affine, central });
        Ok(())
    }

    // ---- evaluation ----

    /// Evaluates a standalone expression against this model.
    pub fn eval_str(&self, src: &str) -> MResult<P> {
        self.scalar(&parse_expr(src)?, &BTreeMap::new())
    }

    pub fn scalar(&self, e: &Expr, env: &BTreeMap<String, u8>) -> MResult<P> {
        match self.eval(e, env)? {
            Val::S(p) => Ok(p),
            Val::V(_) => Err(ModelError::Grading("expected a scalar, found an algebra-valued expression".into())),
        }
    }

    /// Components of an algebra-valued field, each times its base form.
    pub fn algebra_field(&self, name: &str) -> MResult<Vec<P>> {
        match self.eval(&Expr::Name(name.into()), &BTreeMap::new())? {
            Val::V(v) => Ok(v),
            Val::S(_) => Err(ModelError::Grading(format!("'{name}' is not algebra valued"))),
        }
    }

    fn index(&self, i: &Idx, env: &BTreeMap<String, u8>) -> MResult<u8> {
        match i {
            Idx::Lit(v) => Ok(*v),
            Idx::Var(s) => env.get(s).copied().ok_or_else(|| ModelError::UnknownField(s.clone())),
        }
    }

    fn literal_indices(&self, ix: &[Idx], env: &BTreeMap<String, u8>) -> MResult<Vec<u8>> {
        let out: Vec<u8> = ix.iter().map(|i| self.index(i, env)).collect::<MResult<_>>()?;
        if let Some(bad) = out.iter().find(|v| **v >= self.ast.dim) {
            return Err(ModelError::Invalid(format!("derivative index {bad} exceeds the dimension")));
        }
        Ok(out)
    }

    fn component(&self, name: &str, idx: &[Idx], env: &BTreeMap<String, u8>) -> MResult<u32> {
        let f = self.fields.get(name).ok_or_else(|| ModelError::UnknownField(name.into()))?;
        let label: Vec<u8> = idx.iter().map(|i| self.index(i, env)).collect::<MResult<_>>()?;
        f.comps
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, c)| *c)
            .ok_or_else(|| ModelError::UnknownField(format!("{name}{label:?}")))
    }

    fn jet(&self, comp: u32, der: &[u8]) -> P {
        P::jet(self.sp.jet(comp, MultiIndex::from_entries(der.iter().copied())))
    }

    fn constant_index(&self, e: &Expr, env: &BTreeMap<String, u8>) -> MResult<u8> {
        let p = self.scalar(e, env)?;
        let c = constant_of(&p).ok_or_else(|| ModelError::Grading("expected a constant index".into()))?;
        if !c.is_integer() || c < Rational::zero() || c >= Rational::from_integer(self.ast.dim.into()) {
            return Err(ModelError::Invalid(format!("index {c} out of range")));
        }
        Ok(c.to_integer().try_into().unwrap_or(0))
    }

    pub fn eval(&self, e: &Expr, env: &BTreeMap<String, u8>) -> MResult<Val> {
        let lift = |v: Val, f: &dyn Fn(&P) -> P| match v {
            Val::S(p) => Val::S(f(&p)),
            Val::V(v) => Val::V(v.iter().map(f).collect()),
        };
        Ok(match e {
            Expr::Num(r) => Val::S(P::constant(r.clone())),
            Expr::Name(n) => self.name(n, env)?,
            Expr::Ref { name, idx, der } => {
                let der = self.literal_indices(der.as_deref().unwrap_or(&[]), env)?;
                if (name == "x" || name == "dx") && !self.fields.contains_key(name) && der.is_empty() && idx.len() == 1 {
                    let i = self.index(&idx[0], env)?;
                    if i >= self.ast.dim {
                        return Err(ModelError::Invalid(format!("coordinate index {i} out of range")));
                    }
                    return Ok(Val::S(if name == "x" { P::coord(i) } else { P::dx(i) }));
                }
                self.field_value(name, idx, &der, false, env)?
            }
            Expr::Neg(x) => lift(self.eval(x, env)?, &|p| -p),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let sign = if matches!(e, Expr::Add(..)) { Rational::one() } else { -Rational::one() };
                match (self.eval(a, env)?, self.eval(b, env)?) {
                    (Val::S(x), Val::S(y)) => {
                        let mut x = x;
                        x.add_scaled(&y, &sign);
                        Val::S(x)
                    }
                    (Val::V(x), Val::V(y)) => Val::V(
                        x.iter()
                            .zip(&y)
                            .map(|(p, q)| {
                                let mut p = p.clone();
                                p.add_scaled(q, &sign);
                                p
                            })
                            .collect(),
                    ),
                    _ => return Err(ModelError::Grading("cannot add a scalar and an algebra-valued expression".into())),
                }
            }
            Expr::Mul(a, b) => self.product(self.eval(a, env)?, self.eval(b, env)?)?,
            Expr::Div(a, b) => {
                let den = self.scalar(b, env)?;
                let c = constant_of(&den)
                    .filter(|c| !c.is_zero())
                    .ok_or_else(|| ModelError::Grading("division by a non-constant or zero".into()))?;
                let inv = c.recip();
                lift(self.eval(a, env)?, &|p| p.scale(&inv))
            }
            Expr::Pow(b, k) => {
                let base = self.scalar(b, env)?;
                let mut out = P::one();
                for _ in 0..*k {
                    out = out.mul(&base);
                }
                Val::S(out)
            }
            Expr::Call(f, args) => self.call(f, args, env)?,
            Expr::Sum { var, range, body } => {
                let r = range.clone().unwrap_or(Range { lo: 0, hi: self.ast.dim - 1 });
                let mut acc: Option<Val> = None;
                for i in r.lo..=r.hi {
                    let mut env = env.clone();
                    env.insert(var.clone(), i);
                    let v = self.eval(body, &env)?;
                    acc = Some(match acc {
                        None => v,
                        Some(Val::S(mut x)) => match v {
                            Val::S(y) => {
                                x.add_assign(&y);
                                Val::S(x)
                            }
                            Val::V(_) => return Err(ModelError::Grading("sum mixes shapes".into())),
                        },
                        Some(Val::V(x)) => match v {
                            Val::V(y) => Val::V(x.iter().zip(&y).map(|(p, q)| p + q).collect()),
                            Val::S(_) => return Err(ModelError::Grading("sum mixes shapes".into())),
                        },
                    });
                }
                acc.unwrap_or(Val::S(P::zero()))
            }
            Expr::Pair(a, b) | Expr::Comm(a, b) => {
                let alg = self
                    .algebra
                    .as_ref()
                    .ok_or_else(|| ModelError::Invalid("pairing or bracket without an algebra".into()))?;
                match (self.eval(a, env)?, self.eval(b, env)?) {
                    (Val::V(x), Val::V(y)) => {
                        if matches!(e, Expr::Pair(..)) {
                            Val::S(alg.pair(&x, &y))
                        } else {
                            Val::V(alg.comm(&x, &y))
                        }
                    }
                    _ => return Err(ModelError::Grading("pairing and bracket need algebra-valued arguments".into())),
                }
            }
        })
    }

    /// A field reference. Only the bare name carries the declared base
    /// form; indexed or differentiated references are plain jets, so that
    /// rendered engine output reads back unchanged.
    fn field_value(&self, name: &str, idx: &[Idx], der: &[u8], bare: bool, env: &BTreeMap<String, u8>) -> MResult<Val> {
        let f = self.fields.get(name).ok_or_else(|| ModelError::UnknownField(name.into()))?;
        let form = if bare { f.form.clone() } else { P::one() };
        if idx.is_empty() && f.shape == ShapeKind::Algebra {
            return Ok(Val::V(f.comps.iter().map(|(_, c)| self.jet(*c, der).mul(&form)).collect()));
        }
        let c = self.component(name, idx, env)?;
        Ok(Val::S(self.jet(c, der).mul(&form)))
    }

    fn product(&self, a: Val, b: Val) -> MResult<Val> {
        Ok(match (a, b) {
            (Val::S(x), Val::S(y)) => Val::S(x.mul(&y)),
            (Val::S(x), Val::V(v)) => Val::V(v.iter().map(|p| x.mul(p)).collect()),
            (Val::V(v), Val::S(y)) => Val::V(v.iter().map(|p| p.mul(&y)).collect()),
            (Val::V(_), Val::V(_)) => {
                return Err(ModelError::Grading("product of two algebra-valued expressions; use <,> or [,]".into()))
            }
        })
    }

    fn name(&self, n: &str, env: &BTreeMap<String, u8>) -> MResult<Val> {
        if let Some(v) = env.get(n) {
            return Ok(Val::S(P::int(*v as i64)));
        }
        if let Some(p) = self.sp.param(n) {
            return Ok(Val::S(P::param(p)));
        }
        if let Some(d) = self.densities.get(n) {
            return Ok(Val::S(d.clone()));
        }
        if n == "vol" {
            return Ok(Val::S(self.frame.volume()));
        }
        if self.fields.contains_key(n) {
            return self.field_value(n, &[], &[], true, env);
        }
        for (prefix, dx) in [("dx", true), ("x", false)] {
            if let Some(i) = n.strip_prefix(prefix).and_then(|r| r.parse::<u8>().ok()) {
                if i < self.ast.dim {
                    return Ok(Val::S(if dx { P::dx(i) } else { P::coord(i) }));
                }
            }
        }
        Err(ModelError::UnknownField(n.into()))
    }

    fn call(&self, f: &str, args: &[Expr], env: &BTreeMap<String, u8>) -> MResult<Val> {
        let arity = |k: usize| {
            if args.len() == k {
                Ok(())
            } else {
                Err(ModelError::Invalid(format!("{f} takes {k} argument(s)")))
            }
        };
        let each = |v: Val, op: &dyn Fn(&P) -> P| match v {
            Val::S(p) => Val::S(op(&p)),
            Val::V(v) => Val::V(v.iter().map(op).collect()),
        };
        Ok(match f {
            "d" => {
                arity(1)?;
                each(self.eval(&args[0], env)?, &|p| d(p, &self.frame))
            }
            "del" => {
                arity(1)?;
                each(self.eval(&args[0], env)?, &|p| delta(p))
            }
            "ib" => {
                arity(2)?;
                let mu = self.constant_index(&args[0], env)?;
                each(self.eval(&args[1], env)?, &|p| base_interior(p, mu))
            }
            "eta" => {
                arity(2)?;
                let (a, b) = (self.constant_index(&args[0], env)?, self.constant_index(&args[1], env)?);
                Val::S(if a == b { P::int(self.sp.metric[a as usize]) } else { P::zero() })
            }
            "wedge" => {
                arity(2)?;
                self.product(self.eval(&args[0], env)?, self.eval(&args[1], env)?)?
            }
            other => return Err(ModelError::UnknownField(format!("{other}(..)"))),
        })
    }
}

fn expect_bidegree(p: &P, want: (u32, u32), what: &str) -> MResult<()> {
    match p.bidegree() {
        _ if p.is_zero() => Ok(()),
        Some(b) if b == want => Ok(()),
        found => Err(ModelError::Grading(format!("'{what}' should have bidegree {want:?}, found {found:?}"))),
    }
}

/// The value of a field-free constant, if `p` is one.
pub fn constant_of(p: &P) -> Option<Rational> {
    if p.is_zero() {
        return Some(Rational::zero());
    }
    (p.len() == 1 && p.generators().is_empty()).then(|| p.coefficient(&Monomial::one()))
}
