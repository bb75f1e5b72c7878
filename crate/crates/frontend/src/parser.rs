//! Recursive-descent parser for model files and expressions.

use vtc_core::Rational;

use crate::ast::*;
use crate::error::ModelError;
use crate::lexer::{lex, Tok, Token};

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ModelError>;

/// Parses a complete model file.
pub fn parse_model_ast(src: &str) -> PResult<ModelAst> {
    let mut p = Parser::new(src)?;
    let ast = p.model()?;
    Ok(ast)
}

/// Parses a standalone expression, rejecting trailing input.
pub fn parse_expr(src: &str) -> PResult<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

impl Parser {
    pub fn new(src: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ModelError::Syntax { line: t.line, col: t.col, msg: msg.into() })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected '{s}', found {}", describe(self.peek())))
        }
    }

    fn kw(&mut self, s: &str) -> PResult<()> {
        if self.is_kw(s) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected '{s}', found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => self.err(format!("expected a name, found {}", describe(&t))),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat_sym("-");
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                let v: i64 = s.parse().or_else(|_| self.err("integer out of range"))?;
                Ok(if neg { -v } else { v })
            }
            t => self.err(format!("expected an integer, found {}", describe(&t))),
        }
    }

    fn small(&mut self) -> PResult<u8> {
        let v = self.int()?;
        u8::try_from(v).or_else(|_| self.err(format!("index {v} out of range")))
    }

    /// A signed rational literal `-p/q`.
    fn number(&mut self) -> PResult<Rational> {
        let n = self.int()?;
        let d = if self.eat_sym("/") { self.int()? } else { 1 };
        if d == 0 {
            return self.err("zero denominator");
        }
        Ok(vtc_core::q(n, d))
    }

    fn range(&mut self) -> PResult<Range> {
        let lo = self.small()?;
        self.sym("..")?;
        let hi = self.small()?;
        if hi < lo {
            return self.err("empty range");
        }
        Ok(Range { lo, hi })
    }

    pub fn expect_eof(&self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => self.err(format!("unexpected {}", describe(t))),
        }
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.term()?;
        loop {
            if self.eat_sym("+") {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat_sym("-") {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat_sym("*") {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat_sym("/") {
                e = Expr::Div(Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_sym("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.primary()?;
        if self.eat_sym("^") {
            let k = self.int()?;
            let k = u32::try_from(k).or_else(|_| self.err("negative exponent"))?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn indices(&mut self) -> PResult<Vec<Idx>> {
        self.sym("[")?;
        let mut out = Vec::new();
        while !self.eat_sym("]") {
            match self.peek().clone() {
                Tok::Int(_) => out.push(Idx::Lit(self.small()?)),
                Tok::Ident(s) => {
                    self.bump();
                    out.push(Idx::Var(s));
                }
                t => return self.err(format!("expected an index, found {}", describe(&t))),
            }
        }
        Ok(out)
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                let v: Rational = s.parse().or_else(|_| self.err("bad number"))?;
                Ok(Expr::Num(v))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.sym(")")?;
                Ok(e)
            }
            Tok::Sym("<") => {
                self.bump();
                let a = self.expr()?;
                self.sym(",")?;
                let b = self.expr()?;
                self.sym(">")?;
                Ok(Expr::Pair(Box::new(a), Box::new(b)))
            }
            Tok::Sym("[") => {
                self.bump();
                let a = self.expr()?;
                self.sym(",")?;
                let b = self.expr()?;
                self.sym("]")?;
                Ok(Expr::Comm(Box::new(a), Box::new(b)))
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "sum" && self.is_sym("(") {
                    return self.sum();
                }
                if self.eat_sym("(") {
                    let mut args = vec![self.expr()?];
                    while self.eat_sym(",") {
                        args.push(self.expr()?);
                    }
                    self.sym(")")?;
                    return Ok(Expr::Call(name, args));
                }
                let idx = if self.is_sym("[") { Some(self.indices()?) } else { None };
                let der = if matches!(self.peek(), Tok::DerComma) {
                    self.bump();
                    Some(self.indices()?)
                } else {
                    None
                };
                Ok(match (idx, der) {
                    (None, None) => Expr::Name(name),
                    (idx, der) => Expr::Ref { name, idx: idx.unwrap_or_default(), der },
                })
            }
            t => self.err(format!("expected an expression, found {}", describe(&t))),
        }
    }

    fn sum(&mut self) -> PResult<Expr> {
        self.sym("(")?;
        let var = self.ident()?;
        let range = if self.is_kw("in") {
            self.bump();
            Some(self.range()?)
        } else {
            None
        };
        self.sym(",")?;
        let body = self.expr()?;
        self.sym(")")?;
        Ok(Expr::Sum { var, range, body: Box::new(body) })
    }

    // ---- model items ----

    fn model(&mut self) -> PResult<ModelAst> {
        let mut m = ModelAst::default();
        let mut seen_dim = false;
        if matches!(self.peek(), Tok::Eof) {
            return self.err("empty model");
        }
        while !matches!(self.peek(), Tok::Eof) {
            let kw = self.ident()?;
            match kw.as_str() {
                "model" => m.name = self.ident()?,
                "dim" => {
                    m.dim = self.small()?;
                    seen_dim = true;
                }
                "metric" => {
                    while self.is_sym("+") || self.is_sym("-") {
                        m.metric.push(if self.eat_sym("+") { 1 } else { self.bump_sign() });
                    }
                }
                "param" => {
                    m.params.push(self.ident()?);
                    while self.eat_sym(",") {
                        m.params.push(self.ident()?);
                    }
                }
                "algebra" => m.algebra = Some(self.algebra()?),
                "field" => m.fields.push(self.field()?),
                "structure" => self.structure(&mut m)?,
                "density" => {
                    let name = self.ident()?;
                    self.sym("=")?;
                    m.densities.push((name, self.expr()?));
                }
                "master" => m.master = Some(self.ident()?),
                "foliation" => m.foliation = Some(self.foliation()?),
                other => {
                    self.pos -= 1;
                    return self.err(format!("unknown declaration '{other}'"));
                }
            }
            self.eat_sym(";");
        }
        if !seen_dim {
            return self.err("missing 'dim' declaration");
        }
        Ok(m)
    }

    fn bump_sign(&mut self) -> i8 {
        self.bump();
        -1
    }

    /// Comma-separated entries inside braces.
    fn block(&mut self, mut entry: impl FnMut(&mut Self, &str) -> PResult<()>) -> PResult<()> {
        self.sym("{")?;
        while !self.eat_sym("}") {
            let key = self.ident()?;
            entry(self, &key)?;
            if !self.eat_sym(",") && !self.eat_sym(";") && !self.is_sym("}") {
                return self.err("expected ',' or '}'");
            }
        }
        Ok(())
    }

    fn algebra(&mut self) -> PResult<AlgebraDecl> {
        let mut a = AlgebraDecl { dim: 0, constants: vec![], form: vec![] };
        self.block(|p, key| {
            match key {
                "dim" => a.dim = p.small()?,
                "constant" => {
                    let ix = p.lit_indices(3)?;
                    p.sym("=")?;
                    a.constants.push((ix[0], ix[1], ix[2], p.number()?));
                }
                "form" => {
                    let ix = p.lit_indices(2)?;
                    p.sym("=")?;
                    a.form.push((ix[0], ix[1], p.number()?));
                }
                other => return p.back_err(format!("unknown algebra entry '{other}'")),
            }
            Ok(())
        })?;
        Ok(a)
    }

    fn back_err<T>(&mut self, msg: String) -> PResult<T> {
        self.pos -= 1;
        self.err(msg)
    }

    fn lit_indices(&mut self, n: usize) -> PResult<Vec<u8>> {
        let ix = self.indices()?;
        let mut out = Vec::new();
        for i in &ix {
            match i {
                Idx::Lit(v) => out.push(*v),
                Idx::Var(_) => return self.err("expected literal indices"),
            }
        }
        if out.len() != n {
            return self.err(format!("expected {n} indices"));
        }
        Ok(out)
    }

    fn field(&mut self) -> PResult<FieldDecl> {
        let name = self.ident()?;
        let mut f = FieldDecl {
            name,
            parity_odd: false,
            ghost: 0,
            role: "field".into(),
            shape: Shape { kind: ShapeKind::Scalar, range: None },
            conj: None,
            form: None,
        };
        self.block(|p, key| {
            match key {
                "parity" => {
                    f.parity_odd = match p.ident()?.as_str() {
                        "even" => false,
                        "odd" => true,
                        other => return p.back_err(format!("parity must be even or odd, not '{other}'")),
                    }
                }
                "ghost" => f.ghost = p.int()? as i32,
                "role" => {
                    let r = p.ident()?;
                    if !["field", "antifield", "source"].contains(&r.as_str()) {
                        return p.back_err(format!("unknown role '{r}'"));
                    }
                    f.role = r;
                }
                "shape" => {
                    let kind = match p.ident()?.as_str() {
                        "scalar" => ShapeKind::Scalar,
                        "vector" => ShapeKind::Vector,
                        "algebra" => ShapeKind::Algebra,
                        other => return p.back_err(format!("unknown shape '{other}'")),
                    };
                    let range = if kind == ShapeKind::Vector && matches!(p.peek(), Tok::Int(_)) {
                        Some(p.range()?)
                    } else {
                        None
                    };
                    f.shape = Shape { kind, range };
                }
                "conj" => f.conj = Some(p.ident()?),
                "form" => f.form = Some(p.expr()?),
                other => return p.back_err(format!("unknown field attribute '{other}'")),
            }
            Ok(())
        })?;
        Ok(f)
    }

    fn structure(&mut self, m: &mut ModelAst) -> PResult<()> {
        let mut decl = None;
        let mut ghost = None;
        self.block(|p, key| {
            match key {
                "theta" | "omega" => {
                    p.sym("=")?;
                    let e = p.expr()?;
                    decl = Some(if key == "theta" { StructureDecl::Theta(e) } else { StructureDecl::Omega(e) });
                }
                "ghost" => ghost = Some(p.int()?),
                other => return p.back_err(format!("unknown structure entry '{other}'")),
            }
            Ok(())
        })?;
        if decl.is_none() {
            return self.err("structure needs 'theta' or 'omega'");
        }
        m.structure = decl;
        m.structure_ghost = ghost;
        Ok(())
    }

    fn foliation(&mut self) -> PResult<FoliationDecl> {
        let mut fd = FoliationDecl::default();
        self.block(|p, key| {
            match key {
                "time" => {
                    p.sym("=")?;
                    fd.time.push(p.coordinate()?);
                }
                "phase" => {
                    let lhs = p.primary()?;
                    if !matches!(lhs, Expr::Ref { der: Some(_), .. }) {
                        return p.err("phase rule must rewrite a derivative like A[i],[0]");
                    }
                    p.sym(":=")?;
                    let rhs = p.expr()?;
                    let family = if p.is_kw("for") {
                        p.bump();
                        let v = p.ident()?;
                        p.kw("in")?;
                        Some((v, p.range()?))
                    } else {
                        None
                    };
                    fd.phase.push(PhaseRule { lhs, rhs, family });
                }
                "energy" | "affine" => {
                    p.sym("=")?;
                    let n = p.ident()?;
                    if key == "energy" {
                        fd.energy = Some(n);
                    } else {
                        fd.affine = Some(n);
                    }
                }
                "central" => {
                    p.sym("=")?;
                    fd.central = Some(p.expr()?);
                }
                other => return p.back_err(format!("unknown foliation entry '{other}'")),
            }
            Ok(())
        })?;
        if fd.time.is_empty() {
            return self.err("foliation needs a 'time' direction");
        }
        Ok(fd)
    }

    /// `x[i]` or `xi`.
    fn coordinate(&mut self) -> PResult<u8> {
        let name = self.ident()?;
        if name == "x" {
            let ix = self.lit_indices(1)?;
            return Ok(ix[0]);
        }
        match name.strip_prefix('x').and_then(|r| r.parse().ok()) {
            Some(v) => Ok(v),
            None => self.back_err(format!("expected a coordinate like x[0], found '{name}'")),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Int(s) => format!("'{s}'"),
        Tok::DerComma => "',['".into(),
        Tok::Sym(s) => format!("'{s}'"),
        Tok::Eof => "end of input".into(),
    }
}
