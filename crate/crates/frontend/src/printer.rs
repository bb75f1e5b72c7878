//! Canonical text of models and expressions; parsing the output gives back
//! the same syntax tree.

use std::fmt::Write;

use vtc_core::Rational;

use crate::ast::*;

fn idx_text(ix: &[Idx]) -> String {
    let parts: Vec<String> = ix
        .iter()
        .map(|i| match i {
            Idx::Lit(v) => v.to_string(),
            Idx::Var(s) => s.clone(),
        })
        .collect();
    format!("[{}]", parts.join(" "))
}

fn number_text(r: &Rational) -> String {
    r.to_string()
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        Expr::Num(r) if !r.is_integer() || r < &vtc_core::q(0, 1) => 0,
        _ => 5,
    }
}

fn wrap(e: &Expr, min: u8, out: &mut String) {
    if prec(e) < min {
        out.push('(');
        write_expr(e, out);
        out.push(')');
    } else {
        write_expr(e, out);
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Num(r) => out.push_str(&number_text(r)),
        Expr::Name(n) => out.push_str(n),
        Expr::Ref { name, idx, der } => {
            out.push_str(name);
            if !idx.is_empty() || der.is_none() {
                out.push_str(&idx_text(idx));
            }
            if let Some(d) = der {
                out.push(',');
                out.push_str(&idx_text(d));
            }
        }
        Expr::Neg(x) => {
            out.push('-');
            wrap(x, 3, out);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            wrap(a, 1, out);
            out.push_str(if matches!(e, Expr::Add(..)) { " + " } else { " - " });
            wrap(b, 2, out);
        }
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            wrap(a, 2, out);
            out.push(if matches!(e, Expr::Mul(..)) { '*' } else { '/' });
            wrap(b, 3, out);
        }
        Expr::Pow(b, k) => {
            wrap(b, 5, out);
            let _ = write!(out, "^{k}");
        }
        Expr::Call(f, args) => {
            out.push_str(f);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(a, out);
            }
            out.push(')');
        }
        Expr::Sum { var, range, body } => {
            let _ = write!(out, "sum({var}");
            if let Some(r) = range {
                let _ = write!(out, " in {}..{}", r.lo, r.hi);
            }
            out.push_str(", ");
            write_expr(body, out);
            out.push(')');
        }
        Expr::Pair(a, b) | Expr::Comm(a, b) => {
            let (l, r) = if matches!(e, Expr::Pair(..)) { ('<', '>') } else { ('[', ']') };
            out.push(l);
            write_expr(a, out);
            out.push_str(", ");
            write_expr(b, out);
            out.push(r);
        }
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(e, &mut s);
    s
}

pub fn print_model(m: &ModelAst) -> String {
    let mut s = String::new();
    if !m.name.is_empty() {
        let _ = writeln!(s, "model {}", m.name);
    }
    let _ = writeln!(s, "dim {}", m.dim);
    if !m.metric.is_empty() {
        let signs: Vec<&str> = m.metric.iter().map(|v| if *v > 0 { "+" } else { "-" }).collect();
        let _ = writeln!(s, "metric {}", signs.join(" "));
    }
    if !m.params.is_empty() {
        let _ = writeln!(s, "param {}", m.params.join(", "));
    }
    if let Some(a) = &m.algebra {
        let mut entries = vec![format!("dim {}", a.dim)];
        for (i, j, k, c) in &a.constants {
            entries.push(format!("constant [{i} {j} {k}] = {}", number_text(c)));
        }
        for (i, j, c) in &a.form {
            entries.push(format!("form [{i} {j}] = {}", number_text(c)));
        }
        let _ = writeln!(s, "algebra {{\n  {}\n}}", entries.join(",\n  "));
    }
    for f in &m.fields {
        let shape = match (f.shape.kind, &f.shape.range) {
            (ShapeKind::Scalar, _) => "scalar".to_string(),
            (ShapeKind::Vector, None) => "vector".to_string(),
            (ShapeKind::Vector, Some(r)) => format!("vector {}..{}", r.lo, r.hi),
            (ShapeKind::Algebra, _) => "algebra".to_string(),
        };
        let mut attrs = vec![
            format!("parity {}", if f.parity_odd { "odd" } else { "even" }),
            format!("ghost {}", f.ghost),
            format!("role {}", f.role),
            format!("shape {shape}"),
        ];
        if let Some(c) = &f.conj {
            attrs.push(format!("conj {c}"));
        }
        if let Some(e) = &f.form {
            attrs.push(format!("form {}", print_expr(e)));
        }
        let _ = writeln!(s, "field {} {{ {} }}", f.name, attrs.join(", "));
    }
    if let Some(st) = &m.structure {
        let (k, e) = match st {
            StructureDecl::Theta(e) => ("theta", e),
            StructureDecl::Omega(e) => ("omega", e),
        };
        let mut entries = vec![format!("{k} = {}", print_expr(e))];
        if let Some(g) = m.structure_ghost {
            entries.push(format!("ghost {g}"));
        }
        let _ = writeln!(s, "structure {{\n  {}\n}}", entries.join(",\n  "));
    }
    for (n, e) in &m.densities {
        let _ = writeln!(s, "density {n} = {}", print_expr(e));
    }
    if let Some(n) = &m.master {
        let _ = writeln!(s, "master {n}");
    }
    if let Some(f) = &m.foliation {
        let mut entries: Vec<String> = f.time.iter().map(|t| format!("time = x[{t}]")).collect();
        for r in &f.phase {
            let mut e = format!("phase {} := {}", print_expr(&r.lhs), print_expr(&r.rhs));
            if let Some((v, rg)) = &r.family {
                let _ = write!(e, " for {v} in {}..{}", rg.lo, rg.hi);
            }
            entries.push(e);
        }
        if let Some(h) = &f.energy {
            entries.push(format!("energy = {h}"));
        }
        if let Some(a) = &f.affine {
            entries.push(format!("affine = {a}"));
        }
        if let Some(c) = &f.central {
            entries.push(format!("central = {}", print_expr(c)));
        }
        let _ = writeln!(s, "foliation {{\n  {}\n}}", entries.join(",\n  "));
    }
    s
}
