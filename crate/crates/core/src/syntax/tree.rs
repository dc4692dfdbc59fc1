use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::lexer::Token;

pub type NodeId = usize;

macro_rules! kinds {
    ($($name:ident),* $(,)?) => {
        /// Syntactic category of a node.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum Kind { $($name),* }

        impl Kind {
            pub fn as_str(self) -> &'static str {
                match self { $(Kind::$name => stringify!($name)),* }
            }
        }
    };
}

kinds! {
    CompilationUnit, Opaque, PackageDecl, ImportDecl,
    TypeDecl, TypeParams, Extends, Implements, Body, EnumConstant,
    FieldDecl, MethodDecl, ConstructorDecl, Initializer,
    Modifiers, Modifier, Annotation, Params, Param, Throws, Type, SimpleName, VarDeclarator,
    Block, LocalVarDecl, LocalTypeDecl, ExprStmt, If, While, DoWhile, For, ForInit, ForUpdate, ForEach,
    Return, Throw, Break, Continue, Try, Catch, Finally, Switch, SwitchCase, Synchronized,
    Assert, EmptyStmt, Labeled,
    Assign, Conditional, Binary, Unary, Postfix, Cast, InstanceOf, Call, Args, FieldAccess,
    ArrayAccess, New, NewArray, ArrayInit, Literal, This, Super, ClassLit, Paren,
}

impl Kind {
    /// Declarations that form a member for edit grouping.
    pub fn is_member(self) -> bool {
        matches!(
            self,
            Kind::TypeDecl
                | Kind::FieldDecl
                | Kind::MethodDecl
                | Kind::ConstructorDecl
                | Kind::Initializer
                | Kind::EnumConstant
        )
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub kind: Kind,
    pub label: String,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Half-open token range `[first_token, end_token)` this node spans.
    pub first_token: usize,
    pub end_token: usize,
}

/// Arena-backed syntax tree over one source file.
#[derive(Debug, Clone)]
pub struct SyntaxTree {
    pub(crate) nodes: Vec<Node>,
    pub(crate) root: NodeId,
    pub(crate) tokens: Vec<Token>,
    pub(crate) unparseable: bool,
}

impl SyntaxTree {
    pub(crate) fn opaque(source: &str) -> SyntaxTree {
        let label = source.split_whitespace().collect::<Vec<_>>().join(" ");
        SyntaxTree {
            nodes: vec![Node {
                kind: Kind::Opaque,
                label,
                parent: None,
                children: Vec::new(),
                first_token: 0,
                end_token: 0,
            }],
            root: 0,
            tokens: Vec::new(),
            unparseable: true,
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_unparseable(&self) -> bool {
        self.unparseable
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn kind(&self, id: NodeId) -> Kind {
        self.nodes[id].kind
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.nodes[id].label
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    /// Source lines `(first, last)` covered by the node, if it spans tokens.
    pub fn span(&self, id: NodeId) -> Option<(u32, u32)> {
        let n = &self.nodes[id];
        (n.first_token < n.end_token)
            .then(|| (self.tokens[n.first_token].line, self.tokens[n.end_token - 1].line))
    }

    /// Source text of the node with comments removed and every whitespace
    /// run collapsed to one space.
    pub fn text(&self, id: NodeId) -> String {
        let n = &self.nodes[id];
        let mut out = String::new();
        for (i, tok) in self.tokens[n.first_token..n.end_token].iter().enumerate() {
            if i > 0 && tok.spaced {
                out.push(' ');
            }
            out.push_str(&tok.text);
        }
        out
    }

    /// Ancestors from the parent upward.
    pub fn ancestors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(self.parent(id), move |&n| self.parent(n))
    }

    pub fn preorder(&self) -> Vec<NodeId> {
        self.preorder_from(self.root)
    }

    pub fn preorder_from(&self, start: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.children(n).iter().rev());
        }
        out
    }

    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((n, expanded)) = stack.pop() {
            if expanded {
                out.push(n);
            } else {
                stack.push((n, true));
                stack.extend(self.children(n).iter().rev().map(|&c| (c, false)));
            }
        }
        out
    }

    /// Structural hash of every node (kind, label and ordered children).
    pub fn subtree_hashes(&self) -> Vec<u64> {
        let mut hashes = vec![0u64; self.nodes.len()];
        for n in self.postorder() {
            let mut h = DefaultHasher::new();
            self.nodes[n].kind.hash(&mut h);
            self.nodes[n].label.hash(&mut h);
            for &c in self.children(n) {
                hashes[c].hash(&mut h);
            }
            hashes[n] = h.finish();
        }
        hashes
    }

    /// Owned label tree, the form isomorphism is checked on.
    pub fn to_plain(&self) -> PlainTree {
        self.plain_from(self.root)
    }

    pub fn plain_from(&self, id: NodeId) -> PlainTree {
        PlainTree {
            kind: self.kind(id),
            label: self.label(id).to_owned(),
            children: self.children(id).iter().map(|&c| self.plain_from(c)).collect(),
        }
    }

    /// Indented one-node-per-line rendering, for debugging.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(self.root, 0usize)];
        while let Some((n, depth)) = stack.pop() {
            out.push_str(&"  ".repeat(depth));
            out.push_str(self.kind(n).as_str());
            if !self.label(n).is_empty() {
                out.push_str(&format!(" {:?}", self.label(n)));
            }
            out.push('\n');
            stack.extend(self.children(n).iter().rev().map(|&c| (c, depth + 1)));
        }
        out
    }
}

/// A tree reduced to what isomorphism compares.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlainTree {
    pub kind: Kind,
    pub label: String,
    pub children: Vec<PlainTree>,
}

impl PlainTree {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(PlainTree::size).sum::<usize>()
    }
}
