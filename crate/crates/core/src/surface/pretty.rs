use std::fmt::Write;

use super::program::Program;
use super::{SysfFile, SysfItem};
use crate::syntax::{Constraint, Scheme, SrcExpr, SrcType, TargetTerm, TargetType};

const FULL: u8 = 0;
const APP: u8 = 1;
const ATOM: u8 = 2;

fn src_view(t: &SrcType) -> TargetType {
    match t {
        SrcType::Var(v) => TargetType::var(v.clone()),
        SrcType::Arrow(a, b) => TargetType::arrow(src_view(a), src_view(b)),
        SrcType::Dict(c, a) => TargetType::dict(c.clone(), src_view(a)),
        SrcType::Con(c, args) => TargetType::con(c.clone(), args.iter().map(src_view).collect()),
    }
}

fn write_type(out: &mut String, t: &TargetType, prec: u8) {
    let paren = |out: &mut String, needed: bool, f: &dyn Fn(&mut String)| {
        if needed {
            out.push('(');
        }
        f(out);
        if needed {
            out.push(')');
        }
    };
    match t {
        TargetType::Var(v) => out.push_str(v),
        TargetType::Con(c, args) if args.is_empty() => out.push_str(c),
        TargetType::Con(c, args) => paren(out, prec > APP, &|out| {
            out.push_str(c);
            for a in args {
                out.push(' ');
                write_type(out, a, ATOM);
            }
        }),
        TargetType::Dict(c, a) => paren(out, prec > APP, &|out| {
            write!(out, "Dict {c} ").unwrap();
            write_type(out, a, ATOM);
        }),
        TargetType::Arrow(a, b) => paren(out, prec > FULL, &|out| {
            write_type(out, a, APP);
            out.push_str(" -> ");
            write_type(out, b, FULL);
        }),
        TargetType::Forall(..) => paren(out, prec > FULL, &|out| {
            out.push_str("forall");
            let mut cur = t;
            let mut group: Vec<&str> = Vec::new();
            while let TargetType::Forall(b, body) = cur {
                if group.contains(&b.as_str()) {
                    break;
                }
                group.push(b);
                out.push(' ');
                out.push_str(b);
                cur = body;
            }
            out.push_str(". ");
            write_type(out, cur, FULL);
        }),
    }
}

pub fn pretty_target_type(t: &TargetType) -> String {
    let mut out = String::new();
    write_type(&mut out, t, FULL);
    out
}

pub fn pretty_src_type(t: &SrcType) -> String {
    pretty_target_type(&src_view(t))
}

pub fn pretty_constraint(c: &Constraint) -> String {
    let mut out = c.class.clone();
    out.push(' ');
    write_type(&mut out, &src_view(&c.arg), ATOM);
    out
}

fn write_context(out: &mut String, ctx: &[Constraint]) {
    match ctx {
        [] => {}
        [c] => {
            out.push_str(&pretty_constraint(c));
            out.push_str(" => ");
        }
        cs => {
            out.push('(');
            let parts: Vec<String> = cs.iter().map(pretty_constraint).collect();
            out.push_str(&parts.join(", "));
            out.push_str(") => ");
        }
    }
}

pub fn pretty_scheme(s: &Scheme) -> String {
    let mut out = String::new();
    if !s.quantified.is_empty() {
        out.push_str("forall ");
        out.push_str(&s.quantified.join(" "));
        out.push_str(". ");
    }
    write_context(&mut out, s.context());
    out.push_str(&pretty_src_type(s.body()));
    out
}

fn write_expr(out: &mut String, e: &SrcExpr, prec: u8) {
    match e {
        SrcExpr::Var(x) => out.push_str(x),
        SrcExpr::Lam(..) => {
            if prec > FULL {
                out.push('(');
            }
            out.push('\\');
            let mut cur = e;
            let mut first = true;
            while let SrcExpr::Lam(x, body) = cur {
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(x);
                cur = body;
            }
            out.push_str(". ");
            write_expr(out, cur, FULL);
            if prec > FULL {
                out.push(')');
            }
        }
        SrcExpr::App(f, a) => {
            if prec > APP {
                out.push('(');
            }
            write_expr(out, f, APP);
            out.push(' ');
            write_expr(out, a, ATOM);
            if prec > APP {
                out.push(')');
            }
        }
        SrcExpr::DictApp { fun, dict, at } => {
            let fun_paren = !matches!(**fun, SrcExpr::Var(_) | SrcExpr::Annot(..));
            if fun_paren {
                out.push('(');
                write_expr(out, fun, FULL);
                out.push(')');
            } else {
                write_expr(out, fun, ATOM);
            }
            out.push_str(" [| ");
            write_expr(out, dict, FULL);
            write!(out, " as {} |]", pretty_constraint(at)).unwrap();
        }
        SrcExpr::Annot(e, s) => {
            out.push('(');
            write_expr(out, e, FULL);
            write!(out, " : {})", pretty_scheme(s)).unwrap();
        }
    }
}

pub fn pretty_expr(e: &SrcExpr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, FULL);
    out
}

pub fn pretty_program(p: &Program) -> String {
    let mut out = String::new();
    for (name, arity) in &p.tycons {
        if *arity == 0 {
            writeln!(out, "tycon {name};").unwrap();
        } else {
            writeln!(out, "tycon {name} {arity};").unwrap();
        }
    }
    for c in &p.classes {
        writeln!(out, "class {c};").unwrap();
    }
    for ax in p.axioms.iter() {
        write!(out, "instance {} : ", ax.name).unwrap();
        if !ax.quantified.is_empty() {
            write!(out, "forall {}. ", ax.quantified.join(" ")).unwrap();
        }
        write_context(&mut out, &ax.premises);
        writeln!(out, "{};", pretty_constraint(&ax.head)).unwrap();
    }
    for (name, s) in &p.prims {
        writeln!(out, "prim {name} : {};", pretty_scheme(s)).unwrap();
    }
    for d in &p.defs {
        if let Some(s) = &d.sig {
            writeln!(out, "sig {} : {};", d.name, pretty_scheme(s)).unwrap();
        }
        writeln!(out, "def {} = {};", d.name, pretty_expr(&d.body)).unwrap();
    }
    for c in &p.checks {
        writeln!(out, "check {} = {};", c.name, pretty_expr(&c.body)).unwrap();
    }
    out
}

fn write_term(out: &mut String, t: &TargetTerm, prec: u8) {
    match t {
        TargetTerm::Var(x) => out.push_str(x),
        TargetTerm::Lam(..) => {
            if prec > FULL {
                out.push('(');
            }
            out.push('\\');
            let mut cur = t;
            let mut first = true;
            while let TargetTerm::Lam(x, ty, body) = cur {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "({x}:{})", pretty_target_type(ty)).unwrap();
                cur = body;
            }
            out.push_str(". ");
            write_term(out, cur, FULL);
            if prec > FULL {
                out.push(')');
            }
        }
        TargetTerm::TyLam(..) => {
            if prec > FULL {
                out.push('(');
            }
            out.push_str("/\\");
            let mut cur = t;
            let mut group: Vec<&str> = Vec::new();
            while let TargetTerm::TyLam(b, body) = cur {
                if group.contains(&b.as_str()) {
                    break;
                }
                out.push_str(if group.is_empty() { "" } else { " " });
                group.push(b);
                out.push_str(b);
                cur = body;
            }
            out.push_str(". ");
            write_term(out, cur, FULL);
            if prec > FULL {
                out.push(')');
            }
        }
        TargetTerm::App(f, a) => {
            if prec > APP {
                out.push('(');
            }
            write_term(out, f, APP);
            out.push(' ');
            write_term(out, a, ATOM);
            if prec > APP {
                out.push(')');
            }
        }
        TargetTerm::TyApp(f, ty) => {
            if prec > APP {
                out.push('(');
            }
            write_term(out, f, APP);
            write!(out, " [{}]", pretty_target_type(ty)).unwrap();
            if prec > APP {
                out.push(')');
            }
        }
    }
}

pub fn pretty_target(t: &TargetTerm) -> String {
    let mut out = String::new();
    write_term(&mut out, t, FULL);
    out
}

pub fn pretty_sysf_file(f: &SysfFile) -> String {
    let mut out = String::new();
    for item in &f.items {
        match item {
            SysfItem::Val(n, ty) => {
                writeln!(out, "val {n} : {};", pretty_target_type(ty)).unwrap();
            }
            SysfItem::Def(n, ty, t) => {
                writeln!(
                    out,
                    "def {n} : {} = {};",
                    pretty_target_type(ty),
                    pretty_target(t)
                )
                .unwrap();
            }
        }
    }
    if let Some(m) = &f.main {
        writeln!(out, "{};", pretty_target(m)).unwrap();
    }
    out
}
