//! Random small programs in the supported Java subset, and random
//! mutations of them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub enum Expr {
    Lit(i32),
    Name(String),
    Call(Option<Box<Expr>>, String, Vec<Expr>),
    Bin(Box<Expr>, &'static str, Box<Expr>),
    Field(Box<Expr>, String),
}

#[derive(Debug, Clone)]
pub enum Stmt {
    Local(&'static str, String, Expr),
    Assign(String, Expr),
    Call(Expr),
    If(Expr, Vec<Stmt>, Option<Vec<Stmt>>),
    While(Expr, Vec<Stmt>),
    Return(Option<Expr>),
}

#[derive(Debug, Clone)]
pub struct Method {
    pub mods: Vec<&'static str>,
    pub ret: &'static str,
    pub name: String,
    pub params: Vec<(&'static str, String)>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone)]
pub struct Field {
    pub mods: Vec<&'static str>,
    pub ty: &'static str,
    pub name: String,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone)]
pub enum Member {
    Field(Field),
    Method(Method),
}

#[derive(Debug, Clone)]
pub struct Program {
    pub imports: Vec<String>,
    pub name: String,
    pub members: Vec<Member>,
}

const NAMES: &[&str] = &["a", "b", "count", "total", "item", "size", "x", "y", "value", "next"];
const CALLS: &[&str] = &["run", "log", "check", "update", "get", "put", "apply"];
const TYPES: &[&str] = &["int", "long", "String", "List<String>", "Object", "boolean"];
const OPS: &[&str] = &["+", "-", "*", "<", ">", "==", "&&", "||", "<<"];
const MODS: &[&str] = &["public", "private", "static", "final", "protected"];

fn pick<T: Copy>(rng: &mut impl Rng, xs: &[T]) -> T {
    *xs.choose(rng).unwrap()
}

fn name(rng: &mut impl Rng) -> String {
    pick(rng, NAMES).to_owned()
}

pub fn expr(rng: &mut impl Rng, depth: usize) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.4);
    match if leaf { rng.gen_range(0..2) } else { rng.gen_range(0..5) } {
        0 => Expr::Lit(rng.gen_range(0..100)),
        1 => Expr::Name(name(rng)),
        2 => {
            let recv = rng.gen_bool(0.4).then(|| Box::new(Expr::Name(name(rng))));
            let args = (0..rng.gen_range(0..3)).map(|_| expr(rng, depth - 1)).collect();
            Expr::Call(recv, pick(rng, CALLS).to_owned(), args)
        }
        3 => Expr::Bin(Box::new(expr(rng, depth - 1)), pick(rng, OPS), Box::new(expr(rng, depth - 1))),
        _ => Expr::Field(Box::new(Expr::Name(name(rng))), name(rng)),
    }
}

fn call(rng: &mut impl Rng) -> Expr {
    let args = (0..rng.gen_range(0..3)).map(|_| expr(rng, 1)).collect();
    Expr::Call(None, pick(rng, CALLS).to_owned(), args)
}

pub fn stmt(rng: &mut impl Rng, depth: usize) -> Stmt {
    let simple = depth == 0 || rng.gen_bool(0.6);
    match if simple { rng.gen_range(0..4) } else { rng.gen_range(4..6) } {
        0 => Stmt::Local(pick(rng, &["int", "long", "String"]), name(rng), expr(rng, 2)),
        1 => Stmt::Assign(name(rng), expr(rng, 2)),
        2 => Stmt::Call(call(rng)),
        3 => Stmt::Return(rng.gen_bool(0.5).then(|| expr(rng, 1))),
        4 => Stmt::If(
            expr(rng, 2),
            block(rng, depth - 1),
            rng.gen_bool(0.3).then(|| block(rng, depth - 1)),
        ),
        _ => Stmt::While(expr(rng, 2), block(rng, depth - 1)),
    }
}

fn block(rng: &mut impl Rng, depth: usize) -> Vec<Stmt> {
    (0..rng.gen_range(0..4)).map(|_| stmt(rng, depth)).collect()
}

fn mods(rng: &mut impl Rng) -> Vec<&'static str> {
    let mut m: Vec<&'static str> = MODS.iter().copied().filter(|_| rng.gen_bool(0.2)).collect();
    m.dedup();
    m
}

fn member(rng: &mut impl Rng, index: usize) -> Member {
    if rng.gen_bool(0.35) {
        Member::Field(Field {
            mods: mods(rng),
            ty: pick(rng, TYPES),
            name: format!("{}{index}", name(rng)),
            init: rng.gen_bool(0.5).then(|| expr(rng, 1)),
        })
    } else {
        Member::Method(Method {
            mods: mods(rng),
            ret: pick(rng, &["void", "int", "String"]),
            name: format!("{}{index}", pick(rng, CALLS)),
            params: (0..rng.gen_range(0..3)).map(|_| (pick(rng, TYPES), name(rng))).collect(),
            body: block(rng, 2),
        })
    }
}

pub fn program(rng: &mut impl Rng) -> Program {
    Program {
        imports: (0..rng.gen_range(0..3)).map(|i| format!("java.util.T{i}")).collect(),
        name: format!("K{}", rng.gen_range(0..10)),
        members: (0..rng.gen_range(1..6)).map(|i| member(rng, i)).collect(),
    }
}

fn render_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Lit(v) => out.push_str(&v.to_string()),
        Expr::Name(n) => out.push_str(n),
        Expr::Call(recv, n, args) => {
            if let Some(r) = recv {
                render_expr(r, out);
                out.push('.');
            }
            out.push_str(n);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render_expr(a, out);
            }
            out.push(')');
        }
        Expr::Bin(l, op, r) => {
            out.push('(');
            render_expr(l, out);
            out.push_str(&format!(" {op} "));
            render_expr(r, out);
            out.push(')');
        }
        Expr::Field(r, n) => {
            render_expr(r, out);
            out.push('.');
            out.push_str(n);
        }
    }
}

fn render_block(b: &[Stmt], indent: usize, out: &mut String) {
    out.push_str("{\n");
    for s in b {
        render_stmt(s, indent + 1, out);
    }
    out.push_str(&"    ".repeat(indent));
    out.push('}');
}

fn render_stmt(s: &Stmt, indent: usize, out: &mut String) {
    out.push_str(&"    ".repeat(indent));
    let mut e = String::new();
    match s {
        Stmt::Local(ty, n, v) => {
            render_expr(v, &mut e);
            out.push_str(&format!("{ty} {n} = {e};"));
        }
        Stmt::Assign(n, v) => {
            render_expr(v, &mut e);
            out.push_str(&format!("{n} = {e};"));
        }
        Stmt::Call(c) => {
            render_expr(c, &mut e);
            out.push_str(&format!("{e};"));
        }
        Stmt::Return(v) => match v {
            Some(v) => {
                render_expr(v, &mut e);
                out.push_str(&format!("return {e};"));
            }
            None => out.push_str("return;"),
        },
        Stmt::If(c, then, other) => {
            render_expr(c, &mut e);
            out.push_str(&format!("if ({e}) "));
            render_block(then, indent, out);
            if let Some(o) = other {
                out.push_str(" else ");
                render_block(o, indent, out);
            }
        }
        Stmt::While(c, body) => {
            render_expr(c, &mut e);
            out.push_str(&format!("while ({e}) "));
            render_block(body, indent, out);
        }
    }
    out.push('\n');
}

pub fn render(p: &Program) -> String {
    let mut out = String::from("package gen;\n\n");
    for i in &p.imports {
        out.push_str(&format!("import {i};\n"));
    }
    out.push_str(&format!("\nclass {} {{\n", p.name));
    for m in &p.members {
        match m {
            Member::Field(f) => {
                out.push_str("    ");
                for m in &f.mods {
                    out.push_str(&format!("{m} "));
                }
                out.push_str(&format!("{} {}", f.ty, f.name));
                if let Some(v) = &f.init {
                    let mut e = String::new();
                    render_expr(v, &mut e);
                    out.push_str(&format!(" = {e}"));
                }
                out.push_str(";\n");
            }
            Member::Method(m) => {
                out.push_str("    ");
                for md in &m.mods {
                    out.push_str(&format!("{md} "));
                }
                let params: Vec<String> = m.params.iter().map(|(t, n)| format!("{t} {n}")).collect();
                out.push_str(&format!("{} {}({}) ", m.ret, m.name, params.join(", ")));
                render_block(&m.body, 1, &mut out);
                out.push('\n');
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Calls `f` on the `target`-th statement list in preorder; returns the
/// number of lists seen when the target is out of range.
fn with_block(b: &mut Vec<Stmt>, target: usize, seen: &mut usize, f: &mut dyn FnMut(&mut Vec<Stmt>)) -> bool {
    if *seen == target {
        f(b);
        return true;
    }
    *seen += 1;
    for s in b.iter_mut() {
        let done = match s {
            Stmt::If(_, then, other) => {
                with_block(then, target, seen, f) || other.as_mut().is_some_and(|o| with_block(o, target, seen, f))
            }
            Stmt::While(_, body) => with_block(body, target, seen, f),
            _ => false,
        };
        if done {
            return true;
        }
    }
    false
}

fn count_blocks(b: &[Stmt]) -> usize {
    1 + b
        .iter()
        .map(|s| match s {
            Stmt::If(_, t, o) => count_blocks(t) + o.as_ref().map_or(0, |o| count_blocks(o)),
            Stmt::While(_, body) => count_blocks(body),
            _ => 0,
        })
        .sum::<usize>()
}

fn exprs_mut(s: &mut Stmt) -> Vec<&mut Expr> {
    match s {
        Stmt::Local(_, _, e) | Stmt::Assign(_, e) | Stmt::Call(e) => vec![e],
        Stmt::Return(e) => e.iter_mut().collect(),
        Stmt::If(c, ..) | Stmt::While(c, _) => vec![c],
    }
}

fn tweak_expr(rng: &mut impl Rng, e: &mut Expr) {
    match e {
        Expr::Lit(v) => *v += rng.gen_range(1..5),
        Expr::Name(n) => *n = name(rng),
        Expr::Call(_, n, args) => {
            if args.is_empty() || rng.gen_bool(0.5) {
                *n = pick(rng, CALLS).to_owned();
            } else {
                let i = rng.gen_range(0..args.len());
                tweak_expr(rng, &mut args[i]);
            }
        }
        Expr::Bin(l, op, r) => match rng.gen_range(0..3) {
            0 => *op = pick(rng, OPS),
            1 => tweak_expr(rng, l),
            _ => tweak_expr(rng, r),
        },
        Expr::Field(_, n) => *n = name(rng),
    }
}

/// Applies one random edit: statement insert/delete/move/wrap, expression
/// tweak, modifier toggle, member reorder/insert/delete, parameter or
/// import change.
pub fn mutate(rng: &mut impl Rng, p: &mut Program) {
    let methods: Vec<usize> =
        p.members.iter().enumerate().filter(|(_, m)| matches!(m, Member::Method(_))).map(|(i, _)| i).collect();
    let choice = rng.gen_range(0..10);
    if choice < 5 && !methods.is_empty() {
        let Member::Method(m) = &mut p.members[methods[rng.gen_range(0..methods.len())]] else { unreachable!() };
        let target = rng.gen_range(0..count_blocks(&m.body));
        let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
        with_block(&mut m.body, target, &mut 0, &mut |b: &mut Vec<Stmt>| match choice {
            0 => {
                let at = r.gen_range(0..=b.len());
                b.insert(at, stmt(&mut r, 1));
            }
            1 if !b.is_empty() => {
                b.remove(r.gen_range(0..b.len()));
            }
            2 if b.len() >= 2 => {
                let s = b.remove(r.gen_range(0..b.len()));
                let at = r.gen_range(0..=b.len());
                b.insert(at, s);
            }
            3 if !b.is_empty() => {
                let i = r.gen_range(0..b.len());
                let s = b.remove(i);
                b.insert(i, Stmt::If(expr(&mut r, 1), vec![s], None));
            }
            _ if !b.is_empty() => {
                let i = r.gen_range(0..b.len());
                let mut es = exprs_mut(&mut b[i]);
                if !es.is_empty() {
                    let j = r.gen_range(0..es.len());
                    tweak_expr(&mut r, es[j]);
                }
            }
            _ => b.push(stmt(&mut r, 1)),
        });
        return;
    }
    match rng.gen_range(0..7) {
        0 => {
            let i = rng.gen_range(0..p.members.len());
            let mods = match &mut p.members[i] {
                Member::Field(f) => &mut f.mods,
                Member::Method(m) => &mut m.mods,
            };
            let m = pick(rng, MODS);
            if let Some(pos) = mods.iter().position(|x| *x == m) {
                mods.remove(pos);
            } else {
                mods.insert(0, m);
            }
        }
        1 if p.members.len() >= 2 => {
            let m = p.members.remove(rng.gen_range(0..p.members.len()));
            let at = rng.gen_range(0..=p.members.len());
            p.members.insert(at, m);
        }
        2 => {
            let at = rng.gen_range(0..=p.members.len());
            let salt = 10 + rng.gen_range(0..10);
            let m = member(rng, salt);
            p.members.insert(at, m);
        }
        3 if p.members.len() >= 2 => {
            p.members.remove(rng.gen_range(0..p.members.len()));
        }
        4 if !methods.is_empty() => {
            let Member::Method(m) = &mut p.members[methods[rng.gen_range(0..methods.len())]] else { unreachable!() };
            if m.params.is_empty() || rng.gen_bool(0.5) {
                m.params.push((pick(rng, TYPES), name(rng)));
            } else {
                m.params.remove(rng.gen_range(0..m.params.len()));
            }
        }
        5 => {
            if p.imports.is_empty() || rng.gen_bool(0.5) {
                p.imports.push(format!("java.io.I{}", rng.gen_range(0..10)));
            } else {
                p.imports.remove(rng.gen_range(0..p.imports.len()));
            }
        }
        _ => {
            let i = rng.gen_range(0..p.members.len());
            match &mut p.members[i] {
                Member::Field(f) => match &mut f.init {
                    Some(e) => tweak_expr(rng, e),
                    None => f.init = Some(expr(rng, 1)),
                },
                Member::Method(m) => m.name = format!("{}{}", pick(rng, CALLS), rng.gen_range(20..30)),
            }
        }
    }
}

/// A random before/after pair of programs, one to four edits apart.
pub fn program_pair(rng: &mut impl Rng) -> (String, String) {
    let p = program(rng);
    let mut q = p.clone();
    for _ in 0..rng.gen_range(1..=4) {
        mutate(rng, &mut q);
    }
    (render(&p), render(&q))
}
