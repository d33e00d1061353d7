use std::collections::BTreeSet;

use super::lexer::{lex, Tok, Token};
use super::program::{Item, ItemKind, Span};
use super::{ParseError, SysfFile, SysfItem};
use crate::syntax::{Constraint, Scheme, SrcExpr, SrcType, TargetTerm, TargetType};

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> Span {
        let t = &self.toks[self.pos];
        Span {
            line: t.line,
            col: t.col,
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let t = &self.toks[self.pos];
        if t.tok == Tok::Sym("~") {
            return Err(ParseError::EqualityConstraint {
                line: t.line,
                col: t.col,
            });
        }
        Err(ParseError::syntax(
            t.line,
            t.col,
            format!("expected {expected}, found {}", t.tok.describe()),
        ))
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.is_kw(s) {
            self.bump();
            Ok(())
        } else {
            self.error(&format!("`{s}`"))
        }
    }

    fn lower(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Lower(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error("a lowercase name"),
        }
    }

    fn upper(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Upper(s) if s != "Dict" => {
                self.bump();
                Ok(s)
            }
            _ => self.error("an uppercase name"),
        }
    }

    fn term_name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Lower(s) | Tok::Dollar(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error("a variable"),
        }
    }

    pub fn expect_eof(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    fn furthest(&self, a: ParseError, b: ParseError) -> ParseError {
        if b.position() > a.position() {
            b
        } else {
            a
        }
    }

    // ---- types ----

    /// Full type, `forall` permitted.
    pub fn ty(&mut self) -> PResult<TargetType> {
        if self.is_kw("forall") {
            self.bump();
            let binders = self.binders()?;
            self.expect_sym(".")?;
            let body = self.ty()?;
            return Ok(TargetType::foralls(binders, body));
        }
        let dom = self.btype()?;
        if self.eat_sym("->") {
            let cod = self.ty()?;
            Ok(TargetType::arrow(dom, cod))
        } else {
            Ok(dom)
        }
    }

    fn binders(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.lower()?];
        while let Tok::Lower(_) = self.peek() {
            out.push(self.lower()?);
        }
        let mut seen = BTreeSet::new();
        for b in &out {
            if !seen.insert(b) {
                let sp = self.here();
                return Err(ParseError::syntax(
                    sp.line,
                    sp.col,
                    format!("type variable `{b}` bound twice"),
                ));
            }
        }
        Ok(out)
    }

    fn btype(&mut self) -> PResult<TargetType> {
        match self.peek().clone() {
            Tok::Upper(d) if d == "Dict" => {
                self.bump();
                let class = self.upper()?;
                let arg = self.atype()?;
                Ok(TargetType::dict(class, arg))
            }
            Tok::Upper(c) => {
                self.bump();
                let mut args = Vec::new();
                while self.starts_atype() {
                    args.push(self.atype()?);
                }
                Ok(TargetType::con(c, args))
            }
            _ => self.atype(),
        }
    }

    fn starts_atype(&self) -> bool {
        match self.peek() {
            Tok::Lower(_) => true,
            Tok::Upper(u) => u != "Dict",
            Tok::Sym("(") => true,
            _ => false,
        }
    }

    fn atype(&mut self) -> PResult<TargetType> {
        match self.peek().clone() {
            Tok::Lower(v) => {
                self.bump();
                Ok(TargetType::var(v))
            }
            Tok::Upper(c) if c != "Dict" => {
                self.bump();
                Ok(TargetType::base(c))
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.ty()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            _ => self.error("a type"),
        }
    }

    fn src_type(&mut self) -> PResult<SrcType> {
        let start = self.here();
        let t = self.ty()?;
        to_src(&t).ok_or_else(|| {
            ParseError::syntax(
                start.line,
                start.col,
                "`forall` is only allowed at the top of a type signature",
            )
        })
    }

    fn src_atype(&mut self) -> PResult<SrcType> {
        let start = self.here();
        let t = self.atype()?;
        to_src(&t).ok_or_else(|| {
            ParseError::syntax(start.line, start.col, "`forall` is not allowed here")
        })
    }

    pub fn constraint(&mut self) -> PResult<Constraint> {
        if !matches!(self.peek(), Tok::Upper(_)) {
            // `a ~ b`: surface a dedicated diagnostic instead of a generic one.
            let save = self.pos;
            if self.atype().is_ok() && self.is_sym("~") {
                return self.error("a class constraint");
            }
            self.pos = save;
        }
        let class = self.upper()?;
        let arg = self.src_atype()?;
        Ok(Constraint::new(class, arg))
    }

    /// `C =>` or `(C, ..., C) =>`, without consuming anything on failure.
    fn try_context(&mut self) -> PResult<Option<Vec<Constraint>>> {
        let save = self.pos;
        let attempt = (|| -> PResult<Vec<Constraint>> {
            let cs = if self.eat_sym("(") {
                let mut cs = vec![self.constraint()?];
                while self.eat_sym(",") {
                    cs.push(self.constraint()?);
                }
                self.expect_sym(")")?;
                cs
            } else {
                vec![self.constraint()?]
            };
            self.expect_sym("=>")?;
            Ok(cs)
        })();
        match attempt {
            Ok(cs) => Ok(Some(cs)),
            Err(e) => {
                self.pos = save;
                // Context errors only matter when no type can be read either.
                let type_err = self.src_type().err();
                self.pos = save;
                match type_err {
                    None => Ok(None),
                    Some(te) => Err(self.furthest(e, te)),
                }
            }
        }
    }

    fn context_and<T>(
        &mut self,
        tail: impl FnOnce(&mut Self) -> PResult<T>,
    ) -> PResult<(Vec<Constraint>, T)> {
        let mut ctx = Vec::new();
        while let Some(cs) = self.try_context()? {
            ctx.extend(cs);
        }
        let t = tail(self)?;
        Ok((ctx, t))
    }

    /// A source scheme; without an explicit `forall` free variables are quantified
    /// in order of first occurrence.
    pub fn scheme(&mut self) -> PResult<Scheme> {
        let start = self.here();
        let explicit = if self.is_kw("forall") {
            self.bump();
            let b = self.binders()?;
            self.expect_sym(".")?;
            Some(b)
        } else {
            None
        };
        let (ctx, body) = self.context_and(|p| p.src_type())?;
        let mut order = Vec::new();
        for c in &ctx {
            c.arg.ftv_ordered(&mut order);
        }
        body.ftv_ordered(&mut order);
        let quantified = match explicit {
            Some(q) => {
                if let Some(v) = order.iter().find(|v| !q.contains(v)) {
                    return Err(ParseError::syntax(
                        start.line,
                        start.col,
                        format!("type variable `{v}` is not bound by `forall`"),
                    ));
                }
                q
            }
            None => order,
        };
        Ok(Scheme::new(quantified, ctx, body))
    }

    fn axiom_type(&mut self) -> PResult<(Vec<String>, Vec<Constraint>, Constraint)> {
        let start = self.here();
        let explicit = if self.is_kw("forall") {
            self.bump();
            let b = self.binders()?;
            self.expect_sym(".")?;
            Some(b)
        } else {
            None
        };
        let (premises, head) = self.context_and(|p| p.constraint())?;
        let mut order = Vec::new();
        head.arg.ftv_ordered(&mut order);
        for c in &premises {
            c.arg.ftv_ordered(&mut order);
        }
        let quantified = match explicit {
            Some(q) => {
                if let Some(v) = order.iter().find(|v| !q.contains(v)) {
                    return Err(ParseError::syntax(
                        start.line,
                        start.col,
                        format!("type variable `{v}` is not bound by `forall`"),
                    ));
                }
                q
            }
            None => order,
        };
        Ok((quantified, premises, head))
    }

    // ---- source expressions ----

    pub fn expr(&mut self) -> PResult<SrcExpr> {
        if self.eat_sym("\\") {
            let mut binders = vec![self.lower()?];
            while let Tok::Lower(_) = self.peek() {
                binders.push(self.lower()?);
            }
            self.expect_sym(".")?;
            let body = self.expr()?;
            return Ok(binders
                .into_iter()
                .rev()
                .fold(body, |acc, b| SrcExpr::lam(b, acc)));
        }
        let mut e = self.postfix()?;
        while self.starts_atom() {
            let arg = self.postfix()?;
            e = SrcExpr::app(e, arg);
        }
        if self.is_sym("\\") {
            let arg = self.expr()?;
            e = SrcExpr::app(e, arg);
        }
        Ok(e)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Lower(_) | Tok::Sym("("))
    }

    fn postfix(&mut self) -> PResult<SrcExpr> {
        let e = self.atom()?;
        if self.eat_sym("[|") {
            let dict = self.expr()?;
            self.expect_kw("as")?;
            let at = self.constraint()?;
            self.expect_sym("|]")?;
            if self.is_sym("[|") {
                return self.error("an argument (dictionary applications cannot be chained)");
            }
            return Ok(SrcExpr::dict_app(e, dict, at));
        }
        Ok(e)
    }

    fn atom(&mut self) -> PResult<SrcExpr> {
        match self.peek().clone() {
            Tok::Lower(x) => {
                self.bump();
                Ok(SrcExpr::var(x))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                if self.eat_sym(":") {
                    let s = self.scheme()?;
                    self.expect_sym(")")?;
                    return Ok(SrcExpr::annot(e, s));
                }
                self.expect_sym(")")?;
                Ok(e)
            }
            _ => self.error("an expression"),
        }
    }

    // ---- programs ----

    pub fn items(&mut self) -> PResult<Vec<Item>> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            out.push(self.item()?);
        }
        Ok(out)
    }

    fn item(&mut self) -> PResult<Item> {
        let span = self.here();
        let kw = match self.peek() {
            Tok::Kw(k) => *k,
            _ => return self.error("a declaration"),
        };
        self.bump();
        let kind = match kw {
            "tycon" => {
                let name = self.upper()?;
                let arity = match self.peek() {
                    Tok::Nat(n) => {
                        let n = *n;
                        self.bump();
                        n
                    }
                    _ => 0,
                };
                ItemKind::TyCon(name, arity)
            }
            "class" => ItemKind::Class(self.upper()?),
            "instance" => {
                let name = match self.peek().clone() {
                    Tok::Dollar(n) => {
                        self.bump();
                        n
                    }
                    _ => return self.error("an instance name starting with `$`"),
                };
                self.expect_sym(":")?;
                let (q, premises, head) = self.axiom_type()?;
                ItemKind::Instance(name, q, premises, head)
            }
            "prim" => {
                let name = self.lower()?;
                self.expect_sym(":")?;
                ItemKind::Prim(name, self.scheme()?)
            }
            "sig" => {
                let name = self.lower()?;
                self.expect_sym(":")?;
                ItemKind::Sig(name, self.scheme()?)
            }
            "def" => {
                let name = self.lower()?;
                self.expect_sym("=")?;
                ItemKind::Def(name, self.expr()?)
            }
            "check" => {
                let name = self.lower()?;
                self.expect_sym("=")?;
                ItemKind::Check(name, self.expr()?)
            }
            _ => {
                self.pos -= 1;
                return self.error("a declaration");
            }
        };
        self.expect_sym(";")?;
        Ok(Item { span, kind })
    }

    // ---- target terms ----

    pub fn term(&mut self) -> PResult<TargetTerm> {
        if self.eat_sym("/\\") {
            let binders = self.binders()?;
            self.expect_sym(".")?;
            let body = self.term()?;
            return Ok(TargetTerm::ty_lams(binders, body));
        }
        if self.eat_sym("\\") {
            let mut binders = Vec::new();
            loop {
                self.expect_sym("(")?;
                let x = self.term_name()?;
                self.expect_sym(":")?;
                let t = self.ty()?;
                self.expect_sym(")")?;
                binders.push((x, t));
                if !self.is_sym("(") {
                    break;
                }
            }
            self.expect_sym(".")?;
            let body = self.term()?;
            return Ok(TargetTerm::lams(binders, body));
        }
        let mut t = self.term_atom()?;
        loop {
            if self.eat_sym("[") {
                let ty = self.ty()?;
                self.expect_sym("]")?;
                t = TargetTerm::ty_app(t, ty);
            } else if matches!(self.peek(), Tok::Lower(_) | Tok::Dollar(_) | Tok::Sym("(")) {
                let a = self.term_atom()?;
                t = TargetTerm::app(t, a);
            } else if self.is_sym("\\") || self.is_sym("/\\") {
                let a = self.term()?;
                t = TargetTerm::app(t, a);
            } else {
                break;
            }
        }
        Ok(t)
    }

    fn term_atom(&mut self) -> PResult<TargetTerm> {
        match self.peek().clone() {
            Tok::Lower(x) | Tok::Dollar(x) => {
                self.bump();
                Ok(TargetTerm::var(x))
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.term()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            _ => self.error("a term"),
        }
    }

    pub fn sysf_file(&mut self) -> PResult<SysfFile> {
        let mut items = Vec::new();
        loop {
            if self.is_kw("val") {
                self.bump();
                let name = self.term_name()?;
                self.expect_sym(":")?;
                let ty = self.ty()?;
                self.expect_sym(";")?;
                items.push(SysfItem::Val(name, ty));
            } else if self.is_kw("def") {
                self.bump();
                let name = self.term_name()?;
                self.expect_sym(":")?;
                let ty = self.ty()?;
                self.expect_sym("=")?;
                let body = self.term()?;
                self.expect_sym(";")?;
                items.push(SysfItem::Def(name, ty, body));
            } else {
                break;
            }
        }
        let main = if *self.peek() == Tok::Eof {
            None
        } else {
            let t = self.term()?;
            self.eat_sym(";");
            Some(t)
        };
        self.expect_eof()?;
        Ok(SysfFile { items, main })
    }

}

pub(crate) fn to_src(t: &TargetType) -> Option<SrcType> {
    Some(match t {
        TargetType::Var(v) => SrcType::var(v.clone()),
        TargetType::Arrow(a, b) => SrcType::arrow(to_src(a)?, to_src(b)?),
        TargetType::Dict(c, a) => SrcType::dict(c.clone(), to_src(a)?),
        TargetType::Con(c, args) => SrcType::con(
            c.clone(),
            args.iter().map(to_src).collect::<Option<Vec<_>>>()?,
        ),
        TargetType::Forall(..) => return None,
    })
}
