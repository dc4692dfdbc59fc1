//! Java-subset syntax trees.

pub mod lexer;
mod parser;
mod tree;

pub use parser::{is_keyword, parse};
pub use tree::{Kind, Node, NodeId, PlainTree, SyntaxTree};
