//! Finite-depth pruned trees of value pairs.
//!
//! A node at level `j` (counting from 1) fixes the images of the `j`-th
//! elements of `A_x` and `A_y`. Grammar, with `#` starting a comment that runs
//! to the end of the line:
//!
//! ```text
//! tree  := '(' [ node { ',' node } ] ')'
//! node  := '<' value ',' value '>' [ tree ]
//! value := nat          index into the increasing enumeration of T_x (first) or T_y (second)
//!        | '@' nat      the value itself
//! ```
//!
//! Every leaf must sit at the same depth. `()` is the tree of depth 0.

use std::fmt;

use serde::Serialize;

use super::MonoidError;
use crate::parse::{Cursor, ParseError, MAX_DEPTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Value {
    Index(u64),
    Literal(u64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Index(i) => write!(f, "{i}"),
            Value::Literal(v) => write!(f, "@{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Label {
    pub x: Value,
    pub y: Value,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub label: Label,
    pub children: Vec<TreeNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedPairSet {
    roots: Vec<TreeNode>,
    depth: usize,
}

impl ClosedPairSet {
    pub fn parse(src: &str) -> Result<Self, MonoidError> {
        let cleaned = strip_comments(src);
        let mut cur = Cursor::new(&cleaned);
        let roots = parse_children(&mut cur, 0)?;
        if !cur.at_end() {
            return Err(cur.error("trailing input after tree").into());
        }
        Self::from_roots(roots)
    }

    /// Checks that every leaf sits at the same depth.
    pub fn from_roots(roots: Vec<TreeNode>) -> Result<Self, MonoidError> {
        fn leaf_depths(nodes: &[TreeNode], level: usize, out: &mut Vec<usize>) {
            for n in nodes {
                if n.children.is_empty() {
                    out.push(level);
                } else {
                    leaf_depths(&n.children, level + 1, out);
                }
            }
        }
        let mut depths = Vec::new();
        leaf_depths(&roots, 1, &mut depths);
        let depth = depths.iter().copied().max().unwrap_or(0);
        if let Some(&shallow) = depths.iter().find(|&&d| d != depth) {
            return Err(MonoidError::DeadLeaf { level: shallow, depth });
        }
        Ok(ClosedPairSet { roots, depth })
    }

    /// The tree whose single branch repeats `<0,0>` to the given depth.
    pub fn single_branch(depth: usize) -> Self {
        Self::full(depth, &[Label { x: Value::Index(0), y: Value::Index(0) }])
    }

    /// Every node has the children `<j,j>` for `j < arity`.
    pub fn full_tree(depth: usize, arity: u64) -> Self {
        let labels: Vec<Label> = (0..arity).map(|j| Label { x: Value::Index(j), y: Value::Index(j) }).collect();
        Self::full(depth, &labels)
    }

    fn full(depth: usize, labels: &[Label]) -> Self {
        fn level(d: usize, labels: &[Label]) -> Vec<TreeNode> {
            if d == 0 {
                return Vec::new();
            }
            labels.iter().map(|&label| TreeNode { label, children: level(d - 1, labels) }).collect()
        }
        ClosedPairSet { roots: level(depth, labels), depth }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn roots(&self) -> &[TreeNode] {
        &self.roots
    }

    /// Full-depth branches in depth-first order, at most `cap` of them; the
    /// flag reports whether more exist.
    pub fn branches(&self, cap: usize) -> (Vec<Vec<Label>>, bool) {
        fn walk(nodes: &[TreeNode], path: &mut Vec<Label>, cap: usize, out: &mut Vec<Vec<Label>>, more: &mut bool) {
            for n in nodes {
                if out.len() >= cap {
                    *more = true;
                    return;
                }
                path.push(n.label);
                if n.children.is_empty() {
                    out.push(path.clone());
                } else {
                    walk(&n.children, path, cap, out, more);
                }
                path.pop();
            }
        }
        let mut out = Vec::new();
        let mut more = false;
        if self.depth == 0 {
            return (vec![Vec::new()], false);
        }
        walk(&self.roots, &mut Vec::new(), cap, &mut out, &mut more);
        (out, more)
    }

    /// Length of the longest prefix of `path` that is a path from the root.
    pub fn matched_prefix(&self, path: &[Label]) -> usize {
        let mut nodes = &self.roots;
        for (j, label) in path.iter().enumerate() {
            match nodes.iter().find(|n| n.label == *label) {
                Some(n) => nodes = &n.children,
                None => return j,
            }
        }
        path.len()
    }

    /// Replaces every label in place; used to build corrupted variants.
    pub fn map_labels(&self, f: &mut impl FnMut(usize, Label) -> Label) -> Self {
        fn go(nodes: &[TreeNode], level: usize, f: &mut impl FnMut(usize, Label) -> Label) -> Vec<TreeNode> {
            nodes.iter().map(|n| TreeNode { label: f(level, n.label), children: go(&n.children, level + 1, f) }).collect()
        }
        ClosedPairSet { roots: go(&self.roots, 1, f), depth: self.depth }
    }
}

impl fmt::Display for ClosedPairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_list(nodes: &[TreeNode], f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("(")?;
            for (i, n) in nodes.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", n.label)?;
                if !n.children.is_empty() {
                    write_list(&n.children, f)?;
                }
            }
            f.write_str(")")
        }
        write_list(&self.roots, f)
    }
}

fn strip_comments(src: &str) -> String {
    src.lines()
        .map(|line| match line.find('#') {
            Some(i) => format!("{}{}", &line[..i], " ".repeat(line.len() - i)),
            None => line.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn parse_children(cur: &mut Cursor<'_>, level: usize) -> Result<Vec<TreeNode>, ParseError> {
    if level >= MAX_DEPTH {
        return Err(cur.error("tree nested too deeply"));
    }
    cur.expect("(")?;
    let mut out = Vec::new();
    if cur.eat(")") {
        return Ok(out);
    }
    loop {
        cur.expect("<")?;
        let x = parse_value(cur)?;
        cur.expect(",")?;
        let y = parse_value(cur)?;
        cur.expect(">")?;
        cur.skip_ws();
        let children = if cur.peek() == Some('(') { parse_children(cur, level + 1)? } else { Vec::new() };
        out.push(TreeNode { label: Label { x, y }, children });
        if cur.eat(")") {
            return Ok(out);
        }
        cur.expect(",")?;
    }
}

fn parse_value(cur: &mut Cursor<'_>) -> Result<Value, ParseError> {
    if cur.eat("@") {
        Ok(Value::Literal(cur.nat()?))
    } else {
        Ok(Value::Index(cur.nat()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let t = ClosedPairSet::parse("( <0,0>(<1,@9>), # left\n <2,0>(<0,0>) )").unwrap();
        assert_eq!(t.depth(), 2);
        assert_eq!(t.to_string(), "(<0,0>(<1,@9>),<2,0>(<0,0>))");
        assert_eq!(ClosedPairSet::parse(&t.to_string()).unwrap(), t);
        let (b, more) = t.branches(10);
        assert_eq!(b.len(), 2);
        assert!(!more);
        assert_eq!(t.matched_prefix(&b[1]), 2);
    }

    #[test]
    fn dead_leaves_rejected() {
        assert!(matches!(
            ClosedPairSet::parse("(<0,0>(<1,1>),<2,2>)"),
            Err(MonoidError::DeadLeaf { level: 1, depth: 2 })
        ));
    }

    #[test]
    fn malformed_inputs() {
        for src in ["", "(", "(<0,0>", "(<0>)", "(<0,0>,)", "(<a,0>)", "()x", "(<0,0>)(<0,0>)"] {
            assert!(ClosedPairSet::parse(src).is_err(), "{src:?}");
        }
        assert_eq!(ClosedPairSet::parse(" ( ) ").unwrap().depth(), 0);
        let deep = "(<0,0>".repeat(400) + &")".repeat(400);
        assert!(ClosedPairSet::parse(&deep).is_err());
    }

    #[test]
    fn shipped_shapes() {
        let full = ClosedPairSet::full_tree(6, 2);
        assert_eq!(full.branches(1000).0.len(), 64);
        let (capped, more) = full.branches(10);
        assert_eq!(capped.len(), 10);
        assert!(more);
        assert_eq!(ClosedPairSet::single_branch(6).branches(10).0.len(), 1);
    }
}
