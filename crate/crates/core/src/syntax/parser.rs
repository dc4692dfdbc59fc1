//! Recursive-descent parser for a Java subset.
//!
//! Covers type, field, method and constructor declarations, initializers,
//! modifiers and annotations, the common statement forms and the full
//! operator-precedence expression grammar. Lambdas, method references,
//! try-with-resources, arrow switches and annotation type declarations are
//! rejected, which makes the whole file unparseable.
//!
//! As a relaxation, member declarations are accepted at the top level, so
//! snippets such as `final int x = 1;` parse.

use super::lexer::{tokenize, Token, TokenKind};
use super::tree::{Kind, Node, NodeId, SyntaxTree};

const MAX_DEPTH: usize = 200;

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while", "true", "false", "null",
];

const PRIMITIVES: &[&str] = &["boolean", "byte", "char", "short", "int", "long", "float", "double", "void"];

const MODIFIERS: &[&str] = &[
    "public", "protected", "private", "static", "final", "abstract", "native", "synchronized",
    "transient", "volatile", "strictfp", "default",
];

const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// Parses source text. Never fails: input outside the grammar yields a
/// single opaque node flagged unparseable.
pub fn parse(source: &str) -> SyntaxTree {
    let Ok(tokens) = tokenize(source) else {
        return SyntaxTree::opaque(source);
    };
    let mut p = Parser { tokens, pos: 0, nodes: Vec::new(), depth: 0 };
    match p.compilation_unit() {
        Ok(root) => SyntaxTree { nodes: p.nodes, root, tokens: p.tokens, unparseable: false },
        Err(_) => SyntaxTree::opaque(source),
    }
}

#[derive(Debug)]
struct ParseError;

type PResult<T> = Result<T, ParseError>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    nodes: Vec<Node>,
    depth: usize,
}

impl Parser {
    // ---- token helpers ----

    fn peek_at(&self, k: usize) -> Option<&Token> {
        self.tokens.get(self.pos + k)
    }

    fn text_at(&self, k: usize) -> &str {
        self.peek_at(k).map_or("", |t| t.text.as_str())
    }

    fn is(&self, text: &str) -> bool {
        self.peek_at(0).is_some_and(|t| t.text == text && matches!(t.kind, TokenKind::Op | TokenKind::Ident))
    }

    fn eof(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.is(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> PResult<()> {
        if self.eat(text) {
            Ok(())
        } else {
            Err(ParseError)
        }
    }

    fn is_ident_at(&self, k: usize) -> bool {
        self.peek_at(k).is_some_and(|t| t.kind == TokenKind::Ident && !is_keyword(&t.text))
    }

    fn ident(&mut self) -> PResult<String> {
        if self.is_ident_at(0) {
            self.pos += 1;
            Ok(self.tokens[self.pos - 1].text.clone())
        } else {
            Err(ParseError)
        }
    }

    fn glued(&self, k: usize) -> bool {
        self.peek_at(k).is_some_and(|t| !t.spaced)
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(ParseError)
        } else {
            Ok(())
        }
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // ---- node construction ----

    fn mk(&mut self, kind: Kind, label: impl Into<String>, children: Vec<NodeId>, start: usize) -> NodeId {
        let id = self.nodes.len();
        for &c in &children {
            self.nodes[c].parent = Some(id);
        }
        self.nodes.push(Node {
            kind,
            label: label.into(),
            parent: None,
            children,
            first_token: start,
            end_token: self.pos,
        });
        id
    }

    fn leaf(&mut self, kind: Kind, label: impl Into<String>, start: usize) -> NodeId {
        self.mk(kind, label, Vec::new(), start)
    }

    fn mark(&self) -> (usize, usize) {
        (self.pos, self.nodes.len())
    }

    fn reset(&mut self, mark: (usize, usize)) {
        self.pos = mark.0;
        self.nodes.truncate(mark.1);
    }

    /// Whitespace-insensitive rendering of a token range.
    fn normalized(&self, start: usize, end: usize) -> String {
        let mut out = String::new();
        let mut prev_word = false;
        for t in &self.tokens[start..end] {
            let word = matches!(t.kind, TokenKind::Ident | TokenKind::Number);
            if word && prev_word {
                out.push(' ');
            }
            out.push_str(&t.text);
            prev_word = word;
        }
        out
    }

    // ---- declarations ----

    fn compilation_unit(&mut self) -> PResult<NodeId> {
        let mut children = Vec::new();
        if self.is("package") {
            let start = self.pos;
            self.pos += 1;
            let name = self.qualified_name(false)?;
            self.expect(";")?;
            children.push(self.leaf(Kind::PackageDecl, name, start));
        }
        while self.is("import") {
            let start = self.pos;
            self.pos += 1;
            let is_static = self.eat("static");
            let name = self.qualified_name(true)?;
            self.expect(";")?;
            let label = if is_static { format!("static {name}") } else { name };
            children.push(self.leaf(Kind::ImportDecl, label, start));
        }
        while !self.eof() {
            if self.eat(";") {
                continue;
            }
            let member = self.member()?;
            children.push(member);
        }
        Ok(self.mk(Kind::CompilationUnit, "", children, 0))
    }

    fn qualified_name(&mut self, allow_star: bool) -> PResult<String> {
        let mut name = self.ident()?;
        while self.is(".") {
            if allow_star && self.text_at(1) == "*" {
                self.pos += 2;
                name.push_str(".*");
                break;
            }
            self.pos += 1;
            name.push('.');
            name.push_str(&self.ident()?);
        }
        Ok(name)
    }

    fn modifiers(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        let mut children = Vec::new();
        loop {
            let t = self.text_at(0).to_owned();
            if MODIFIERS.contains(&t.as_str()) && self.peek_at(0).is_some_and(|t| t.kind == TokenKind::Ident) {
                // `default:` inside a switch is not a modifier
                if t == "default" && self.text_at(1) == ":" {
                    break;
                }
                let s = self.pos;
                self.pos += 1;
                children.push(self.leaf(Kind::Modifier, t, s));
            } else if t == "@" && self.text_at(1) != "interface" {
                children.push(self.annotation()?);
            } else {
                break;
            }
        }
        Ok(self.mk(Kind::Modifiers, "", children, start))
    }

    fn annotation(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.expect("@")?;
        let name = self.qualified_name(false)?;
        let mut args = Vec::new();
        if self.eat("(") {
            if !self.is(")") {
                loop {
                    let arg_start = self.pos;
                    if self.is_ident_at(0) && self.text_at(1) == "=" && self.text_at(2) != "=" {
                        let name = self.ident()?;
                        let key = self.leaf(Kind::SimpleName, name, arg_start);
                        self.expect("=")?;
                        let value = self.element_value()?;
                        args.push(self.mk(Kind::Assign, "=", vec![key, value], arg_start));
                    } else {
                        args.push(self.element_value()?);
                    }
                    if !self.eat(",") {
                        break;
                    }
                }
            }
            self.expect(")")?;
        }
        Ok(self.mk(Kind::Annotation, format!("@{name}"), args, start))
    }

    fn element_value(&mut self) -> PResult<NodeId> {
        if self.is("{") {
            self.array_init()
        } else if self.is("@") {
            self.annotation()
        } else {
            self.expression()
        }
    }

    fn member(&mut self) -> PResult<NodeId> {
        self.enter()?;
        let r = self.member_inner();
        self.leave();
        r
    }

    fn member_inner(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        if self.is("{") || (self.is("static") && self.text_at(1) == "{") {
            let label = if self.eat("static") { "static" } else { "" };
            let block = self.block()?;
            return Ok(self.mk(Kind::Initializer, label, vec![block], start));
        }
        let mods = self.modifiers()?;
        if self.is("class") || self.is("interface") || self.is("enum") {
            return self.type_decl(start, mods);
        }
        let mut children = vec![mods];
        if self.is("<") {
            children.push(self.type_params()?);
        }
        if self.is_ident_at(0) && self.text_at(1) == "(" {
            children.push(self.simple_name()?);
            children.push(self.params()?);
            if let Some(t) = self.throws()? {
                children.push(t);
            }
            children.push(self.block()?);
            return Ok(self.mk(Kind::ConstructorDecl, "", children, start));
        }
        let ty = self.type_node()?;
        let name = self.simple_name()?;
        if self.is("(") {
            children.push(ty);
            children.push(name);
            children.push(self.params()?);
            self.skip_dims();
            if let Some(t) = self.throws()? {
                children.push(t);
            }
            if !self.eat(";") {
                children.push(self.block()?);
            }
            return Ok(self.mk(Kind::MethodDecl, "", children, start));
        }
        if children.len() > 1 {
            // type parameters on a field
            return Err(ParseError);
        }
        children.push(ty);
        children.push(self.var_declarator(name)?);
        while self.eat(",") {
            let name = self.simple_name()?;
            children.push(self.var_declarator(name)?);
        }
        self.expect(";")?;
        Ok(self.mk(Kind::FieldDecl, "", children, start))
    }

    fn type_decl(&mut self, start: usize, mods: NodeId) -> PResult<NodeId> {
        let keyword = self.text_at(0).to_owned();
        self.pos += 1;
        let mut children = vec![mods, self.simple_name()?];
        if self.is("<") {
            children.push(self.type_params()?);
        }
        if self.is("extends") {
            let s = self.pos;
            self.pos += 1;
            let types = self.type_list()?;
            children.push(self.mk(Kind::Extends, "", types, s));
        }
        if self.is("implements") {
            let s = self.pos;
            self.pos += 1;
            let types = self.type_list()?;
            children.push(self.mk(Kind::Implements, "", types, s));
        }
        let body = if keyword == "enum" { self.enum_body()? } else { self.class_body()? };
        children.push(body);
        Ok(self.mk(Kind::TypeDecl, keyword, children, start))
    }

    fn type_list(&mut self) -> PResult<Vec<NodeId>> {
        let mut types = vec![self.type_node()?];
        while self.eat(",") {
            types.push(self.type_node()?);
        }
        Ok(types)
    }

    fn class_body(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.expect("{")?;
        let mut members = Vec::new();
        while !self.is("}") {
            if self.eof() {
                return Err(ParseError);
            }
            if self.eat(";") {
                continue;
            }
            members.push(self.member()?);
        }
        self.pos += 1;
        Ok(self.mk(Kind::Body, "", members, start))
    }

    fn enum_body(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.expect("{")?;
        let mut members = Vec::new();
        while !self.is(";") && !self.is("}") {
            let s = self.pos;
            let mut children = Vec::new();
            if self.is("@") {
                children.push(self.modifiers()?);
            }
            let name = self.ident()?;
            if self.is("(") {
                children.push(self.args()?);
            }
            if self.is("{") {
                children.push(self.class_body()?);
            }
            members.push(self.mk(Kind::EnumConstant, name, children, s));
            if !self.eat(",") {
                break;
            }
        }
        if self.eat(";") {
            while !self.is("}") {
                if self.eof() {
                    return Err(ParseError);
                }
                if self.eat(";") {
                    continue;
                }
                members.push(self.member()?);
            }
        }
        self.expect("}")?;
        Ok(self.mk(Kind::Body, "", members, start))
    }

    fn type_params(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.expect("<")?;
        let mut depth = 1;
        while depth > 0 {
            match self.text_at(0) {
                "" => return Err(ParseError),
                "<" => depth += 1,
                ">" => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        let label = self.normalized(start, self.pos);
        Ok(self.leaf(Kind::TypeParams, label, start))
    }

    fn simple_name(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        let name = self.ident()?;
        Ok(self.leaf(Kind::SimpleName, name, start))
    }

    fn params(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.is(")") {
            loop {
                params.push(self.param(false)?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(self.mk(Kind::Params, "", params, start))
    }

    fn param(&mut self, catch_union: bool) -> PResult<NodeId> {
        let start = self.pos;
        let mods = self.modifiers()?;
        let ty_start = self.pos;
        self.skip_type(true)?;
        while catch_union && self.eat("|") {
            self.skip_type(true)?;
        }
        self.eat("...");
        let label = self.normalized(ty_start, self.pos);
        let ty = self.leaf(Kind::Type, label, ty_start);
        let name = self.simple_name()?;
        self.skip_dims();
        Ok(self.mk(Kind::Param, "", vec![mods, ty, name], start))
    }

    fn throws(&mut self) -> PResult<Option<NodeId>> {
        if !self.is("throws") {
            return Ok(None);
        }
        let start = self.pos;
        self.pos += 1;
        let types = self.type_list()?;
        Ok(Some(self.mk(Kind::Throws, "", types, start)))
    }

    fn var_declarator(&mut self, name: NodeId) -> PResult<NodeId> {
        let start = self.nodes[name].first_token;
        self.skip_dims();
        let mut children = vec![name];
        if self.eat("=") {
            let init = if self.is("{") { self.array_init()? } else { self.expression()? };
            children.push(init);
        }
        Ok(self.mk(Kind::VarDeclarator, "", children, start))
    }

    // ---- types ----

    fn skip_dims(&mut self) {
        while self.is("[") && self.text_at(1) == "]" {
            self.pos += 2;
        }
    }

    /// Advances over a type without building nodes.
    fn skip_type(&mut self, dims: bool) -> PResult<()> {
        if PRIMITIVES.contains(&self.text_at(0)) {
            self.pos += 1;
        } else {
            self.ident()?;
            self.skip_type_args()?;
            while self.is(".") && self.is_ident_at(1) {
                self.pos += 2;
                self.skip_type_args()?;
            }
        }
        if dims {
            self.skip_dims();
        }
        Ok(())
    }

    fn skip_type_args(&mut self) -> PResult<()> {
        if !self.eat("<") {
            return Ok(());
        }
        if self.eat(">") {
            return Ok(());
        }
        loop {
            if self.eat("?") {
                if self.eat("extends") || self.eat("super") {
                    self.skip_type(true)?;
                }
            } else {
                self.skip_type(true)?;
            }
            if !self.eat(",") {
                break;
            }
        }
        self.expect(">")
    }

    fn type_node(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.skip_type(true)?;
        let label = self.normalized(start, self.pos);
        Ok(self.leaf(Kind::Type, label, start))
    }

    // ---- statements ----

    fn block(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.expect("{")?;
        let mut stmts = Vec::new();
        while !self.is("}") {
            if self.eof() {
                return Err(ParseError);
            }
            stmts.push(self.statement()?);
        }
        self.pos += 1;
        Ok(self.mk(Kind::Block, "", stmts, start))
    }

    fn statement(&mut self) -> PResult<NodeId> {
        self.enter()?;
        let r = self.statement_inner();
        self.leave();
        r
    }

    fn paren_expr(&mut self) -> PResult<NodeId> {
        self.expect("(")?;
        let e = self.expression()?;
        self.expect(")")?;
        Ok(e)
    }

    fn statement_inner(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        let head = if self.peek_at(0).is_some_and(|t| t.kind == TokenKind::Ident || t.kind == TokenKind::Op) {
            self.text_at(0).to_owned()
        } else {
            String::new()
        };
        match head.as_str() {
            "{" => return self.block(),
            ";" => {
                self.pos += 1;
                return Ok(self.leaf(Kind::EmptyStmt, "", start));
            }
            "if" => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let then = self.statement()?;
                let mut children = vec![cond, then];
                if self.eat("else") {
                    children.push(self.statement()?);
                }
                return Ok(self.mk(Kind::If, "", children, start));
            }
            "while" => {
                self.pos += 1;
                let cond = self.paren_expr()?;
                let body = self.statement()?;
                return Ok(self.mk(Kind::While, "", vec![cond, body], start));
            }
            "do" => {
                self.pos += 1;
                let body = self.statement()?;
                self.expect("while")?;
                let cond = self.paren_expr()?;
                self.expect(";")?;
                return Ok(self.mk(Kind::DoWhile, "", vec![body, cond], start));
            }
            "for" => return self.for_statement(),
            "return" => {
                self.pos += 1;
                let mut children = Vec::new();
                if !self.is(";") {
                    children.push(self.expression()?);
                }
                self.expect(";")?;
                return Ok(self.mk(Kind::Return, "", children, start));
            }
            "throw" => {
                self.pos += 1;
                let e = self.expression()?;
                self.expect(";")?;
                return Ok(self.mk(Kind::Throw, "", vec![e], start));
            }
            "break" | "continue" => {
                self.pos += 1;
                let target = if self.is_ident_at(0) { self.ident()? } else { String::new() };
                self.expect(";")?;
                let kind = if head == "break" { Kind::Break } else { Kind::Continue };
                return Ok(self.leaf(kind, target, start));
            }
            "try" => return self.try_statement(),
            "switch" => return self.switch_statement(),
            "synchronized" if self.text_at(1) == "(" => {
                self.pos += 1;
                let lock = self.paren_expr()?;
                let body = self.block()?;
                return Ok(self.mk(Kind::Synchronized, "", vec![lock, body], start));
            }
            "assert" => {
                self.pos += 1;
                let mut children = vec![self.expression()?];
                if self.eat(":") {
                    children.push(self.expression()?);
                }
                self.expect(";")?;
                return Ok(self.mk(Kind::Assert, "", children, start));
            }
            _ => {}
        }
        if self.is_ident_at(0) && self.text_at(1) == ":" {
            let label = self.ident()?;
            self.pos += 1;
            let body = self.statement()?;
            return Ok(self.mk(Kind::Labeled, label, vec![body], start));
        }
        // local class declarations
        let m = self.mark();
        let mods = self.modifiers()?;
        if self.is("class") || self.is("interface") || self.is("enum") {
            let decl = self.type_decl(start, mods)?;
            return Ok(self.mk(Kind::LocalTypeDecl, "", vec![decl], start));
        }
        self.reset(m);

        if self.looks_like_local_var() {
            let decl = self.local_var_decl()?;
            self.expect(";")?;
            return Ok(decl);
        }
        let e = self.expression()?;
        self.expect(";")?;
        Ok(self.mk(Kind::ExprStmt, "", vec![e], start))
    }

    fn looks_like_local_var(&mut self) -> bool {
        if self.is("final") || self.is("@") {
            return true;
        }
        let m = self.mark();
        let ok = self.skip_type(true).is_ok()
            && self.is_ident_at(0)
            && matches!(self.text_at(1), "=" | ";" | "," | "[" | ":");
        self.reset(m);
        ok
    }

    fn local_var_decl(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        let mods = self.modifiers()?;
        let ty = self.type_node()?;
        let mut children = vec![mods, ty];
        loop {
            let name = self.simple_name()?;
            children.push(self.var_declarator(name)?);
            if !self.eat(",") {
                break;
            }
        }
        Ok(self.mk(Kind::LocalVarDecl, "", children, start))
    }

    fn for_statement(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.expect("for")?;
        self.expect("(")?;

        // enhanced for: [mods] Type name ':'
        let m = self.mark();
        if let Ok(var) = self.param(false) {
            if self.eat(":") {
                let iterable = self.expression()?;
                self.expect(")")?;
                let body = self.statement()?;
                return Ok(self.mk(Kind::ForEach, "", vec![var, iterable, body], start));
            }
        }
        self.reset(m);

        let init_start = self.pos;
        let mut init = Vec::new();
        if !self.is(";") {
            if self.looks_like_local_var() {
                init.push(self.local_var_decl()?);
            } else {
                init = self.expression_list()?;
            }
        }
        let init = self.mk(Kind::ForInit, "", init, init_start);
        self.expect(";")?;
        let mut children = vec![init];
        if !self.is(";") {
            children.push(self.expression()?);
        }
        self.expect(";")?;
        let update_start = self.pos;
        let update = if self.is(")") { Vec::new() } else { self.expression_list()? };
        children.push(self.mk(Kind::ForUpdate, "", update, update_start));
        self.expect(")")?;
        children.push(self.statement()?);
        Ok(self.mk(Kind::For, "", children, start))
    }

    fn expression_list(&mut self) -> PResult<Vec<NodeId>> {
        let mut list = vec![self.expression()?];
        while self.eat(",") {
            list.push(self.expression()?);
        }
        Ok(list)
    }

    fn try_statement(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.expect("try")?;
        let mut children = vec![self.block()?];
        while self.is("catch") {
            let s = self.pos;
            self.pos += 1;
            self.expect("(")?;
            let param = self.param(true)?;
            self.expect(")")?;
            let body = self.block()?;
            children.push(self.mk(Kind::Catch, "", vec![param, body], s));
        }
        if self.is("finally") {
            let s = self.pos;
            self.pos += 1;
            let body = self.block()?;
            children.push(self.mk(Kind::Finally, "", vec![body], s));
        }
        if children.len() == 1 {
            return Err(ParseError);
        }
        Ok(self.mk(Kind::Try, "", children, start))
    }

    fn switch_statement(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.expect("switch")?;
        let mut children = vec![self.paren_expr()?];
        self.expect("{")?;
        while !self.eat("}") {
            let s = self.pos;
            let mut parts = Vec::new();
            let label = if self.eat("default") {
                "default"
            } else {
                self.expect("case")?;
                parts = self.expression_list()?;
                "case"
            };
            self.expect(":")?;
            while !self.is("case") && !self.is("default") && !self.is("}") {
                if self.eof() {
                    return Err(ParseError);
                }
                parts.push(self.statement()?);
            }
            children.push(self.mk(Kind::SwitchCase, label, parts, s));
        }
        Ok(self.mk(Kind::Switch, "", children, start))
    }

    // ---- expressions ----

    fn expression(&mut self) -> PResult<NodeId> {
        self.enter()?;
        let r = self.assignment();
        self.leave();
        r
    }

    /// Operator at the cursor and the number of tokens it spans, gluing
    /// adjacent `>` tokens into shifts.
    fn operator(&self) -> Option<(String, usize)> {
        let t = self.peek_at(0)?;
        if t.kind != TokenKind::Op {
            return (t.kind == TokenKind::Ident && t.text == "instanceof").then(|| ("instanceof".to_owned(), 1));
        }
        if t.text == ">" && self.text_at(1) == ">" && self.glued(1) {
            if self.text_at(2) == ">" && self.glued(2) {
                return Some((">>>".to_owned(), 3));
            }
            if self.text_at(2) == ">=" && self.glued(2) {
                return Some((">>>=".to_owned(), 3));
            }
            return Some((">>".to_owned(), 2));
        }
        if t.text == ">" && self.text_at(1) == ">=" && self.glued(1) {
            return Some((">>=".to_owned(), 2));
        }
        Some((t.text.clone(), 1))
    }

    fn assignment(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        let lhs = self.conditional()?;
        if let Some((op, len)) = self.operator() {
            if ASSIGN_OPS.contains(&op.as_str()) {
                self.pos += len;
                let rhs = self.expression()?;
                return Ok(self.mk(Kind::Assign, op, vec![lhs, rhs], start));
            }
        }
        Ok(lhs)
    }

    fn conditional(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        let cond = self.binary(1)?;
        if self.eat("?") {
            let then = self.expression()?;
            self.expect(":")?;
            self.enter()?;
            let other = self.conditional();
            self.leave();
            let other = other?;
            return Ok(self.mk(Kind::Conditional, "", vec![cond, then, other], start));
        }
        Ok(cond)
    }

    fn precedence(op: &str) -> Option<u8> {
        Some(match op {
            "||" => 1,
            "&&" => 2,
            "|" => 3,
            "^" => 4,
            "&" => 5,
            "==" | "!=" => 6,
            "<" | ">" | "<=" | ">=" | "instanceof" => 7,
            "<<" | ">>" | ">>>" => 8,
            "+" | "-" => 9,
            "*" | "/" | "%" => 10,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<NodeId> {
        let start = self.pos;
        let mut left = self.unary()?;
        while let Some((op, len)) = self.operator() {
            let Some(prec) = Self::precedence(&op) else { break };
            if prec < min_prec {
                break;
            }
            self.pos += len;
            if op == "instanceof" {
                self.eat("final");
                let ty = self.type_node()?;
                left = self.mk(Kind::InstanceOf, "", vec![left, ty], start);
                continue;
            }
            self.enter()?;
            let right = self.binary(prec + 1);
            self.leave();
            let right = right?;
            left = self.mk(Kind::Binary, op, vec![left, right], start);
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<NodeId> {
        self.enter()?;
        let r = self.unary_inner();
        self.leave();
        r
    }

    fn unary_inner(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        let is_op = self.peek_at(0).is_some_and(|t| t.kind == TokenKind::Op);
        if is_op {
            let op = self.text_at(0).to_owned();
            if matches!(op.as_str(), "+" | "-" | "!" | "~" | "++" | "--") {
                self.pos += 1;
                let operand = self.unary()?;
                return Ok(self.mk(Kind::Unary, op, vec![operand], start));
            }
            if op == "(" {
                if let Some(cast) = self.try_cast()? {
                    return Ok(cast);
                }
            }
        }
        let primary = self.primary()?;
        self.postfix(primary, start)
    }

    fn try_cast(&mut self) -> PResult<Option<NodeId>> {
        let start = self.pos;
        let m = self.mark();
        self.pos += 1;
        let primitive = PRIMITIVES.contains(&self.text_at(0));
        let ty_start = self.pos;
        if self.skip_type(true).is_err() || !self.is(")") {
            self.reset(m);
            return Ok(None);
        }
        let ty_end = self.pos;
        self.pos += 1;
        let next_starts_operand = self.peek_at(0).is_some_and(|t| match t.kind {
            TokenKind::Ident => !is_keyword(&t.text) || matches!(t.text.as_str(), "this" | "super" | "new" | "true" | "false" | "null"),
            TokenKind::Number | TokenKind::Str | TokenKind::Char => true,
            TokenKind::Op => matches!(t.text.as_str(), "(" | "!" | "~"),
        });
        let numeric_sign = primitive && (self.is("-") || self.is("+"));
        if !(next_starts_operand || numeric_sign) {
            self.reset(m);
            return Ok(None);
        }
        let label = self.normalized(ty_start, ty_end);
        let saved = self.pos;
        self.pos = ty_end;
        let ty = self.leaf(Kind::Type, label, ty_start);
        self.pos = saved;
        let operand = self.unary()?;
        Ok(Some(self.mk(Kind::Cast, "", vec![ty, operand], start)))
    }

    fn args(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.is(")") {
            args = self.expression_list()?;
        }
        self.expect(")")?;
        Ok(self.mk(Kind::Args, "", args, start))
    }

    fn array_init(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.expect("{")?;
        let mut items = Vec::new();
        while !self.is("}") {
            let item = if self.is("{") { self.array_init()? } else { self.expression()? };
            items.push(item);
            if !self.eat(",") {
                break;
            }
        }
        self.expect("}")?;
        Ok(self.mk(Kind::ArrayInit, "", items, start))
    }

    fn primary(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        let Some(tok) = self.peek_at(0).cloned() else {
            return Err(ParseError);
        };
        match tok.kind {
            TokenKind::Number | TokenKind::Str | TokenKind::Char => {
                self.pos += 1;
                return Ok(self.leaf(Kind::Literal, tok.text, start));
            }
            TokenKind::Op => {
                if tok.text == "(" {
                    self.pos += 1;
                    let inner = self.expression()?;
                    self.expect(")")?;
                    return Ok(self.mk(Kind::Paren, "", vec![inner], start));
                }
                return Err(ParseError);
            }
            TokenKind::Ident => {}
        }
        match tok.text.as_str() {
            "true" | "false" | "null" => {
                self.pos += 1;
                Ok(self.leaf(Kind::Literal, tok.text, start))
            }
            "this" | "super" => {
                self.pos += 1;
                let kind = if tok.text == "this" { Kind::This } else { Kind::Super };
                let node = self.leaf(kind, "", start);
                if self.is("(") {
                    let args = self.args()?;
                    return Ok(self.mk(Kind::Call, "", vec![node, args], start));
                }
                Ok(node)
            }
            "new" => self.creator(),
            w if PRIMITIVES.contains(&w) => {
                let ty = self.type_node()?;
                self.expect(".")?;
                self.expect("class")?;
                Ok(self.mk(Kind::ClassLit, "", vec![ty], start))
            }
            _ => {
                let name = self.simple_name()?;
                if self.is("(") {
                    let args = self.args()?;
                    return Ok(self.mk(Kind::Call, "", vec![name, args], start));
                }
                if self.is("->") {
                    return Err(ParseError);
                }
                Ok(name)
            }
        }
    }

    fn creator(&mut self) -> PResult<NodeId> {
        let start = self.pos;
        self.expect("new")?;
        let ty_start = self.pos;
        self.skip_type(false)?;
        let label = self.normalized(ty_start, self.pos);
        let ty = self.leaf(Kind::Type, label, ty_start);
        if self.is("[") {
            let mut children = vec![ty];
            let mut dims = 0;
            while self.eat("[") {
                dims += 1;
                if !self.eat("]") {
                    children.push(self.expression()?);
                    self.expect("]")?;
                }
            }
            if self.is("{") {
                children.push(self.array_init()?);
            }
            return Ok(self.mk(Kind::NewArray, "[]".repeat(dims), children, start));
        }
        let mut children = vec![ty, self.args()?];
        if self.is("{") {
            children.push(self.class_body()?);
        }
        Ok(self.mk(Kind::New, "", children, start))
    }

    fn postfix(&mut self, mut expr: NodeId, start: usize) -> PResult<NodeId> {
        loop {
            if self.is(".") {
                self.pos += 1;
                if self.eat("class") {
                    expr = self.mk(Kind::ClassLit, "", vec![expr], start);
                } else if self.is("this") {
                    let s = self.pos;
                    self.pos += 1;
                    let this = self.leaf(Kind::This, "", s);
                    expr = self.mk(Kind::FieldAccess, "", vec![expr, this], start);
                } else {
                    let name = self.simple_name()?;
                    if self.is("(") {
                        let args = self.args()?;
                        expr = self.mk(Kind::Call, "", vec![expr, name, args], start);
                    } else {
                        expr = self.mk(Kind::FieldAccess, "", vec![expr, name], start);
                    }
                }
            } else if self.is("[") {
                self.pos += 1;
                let index = self.expression()?;
                self.expect("]")?;
                expr = self.mk(Kind::ArrayAccess, "", vec![expr, index], start);
            } else if self.is("++") || self.is("--") {
                let op = self.text_at(0).to_owned();
                self.pos += 1;
                expr = self.mk(Kind::Postfix, op, vec![expr], start);
            } else if self.is("::") || self.is("->") {
                return Err(ParseError);
            } else {
                return Ok(expr);
            }
        }
    }
}
