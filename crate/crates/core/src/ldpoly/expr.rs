use std::fmt;

use super::poly::LowDefectPoly;
use super::tree::LowDefectTree;
use crate::complexity::ComplexityTable;
use crate::error::{Error, Result};

/// A low-defect expression.
///
/// Variables are numbered `x1..xd` in construction order: everything inside
/// `inner` is built before the variable an [`LowDefectExpr::Extend`] adds,
/// and the left factor of a product before the right one. Since this is also
/// left-to-right textual order, the parser requires variables to appear as
/// `x1, x2, …` from left to right, each exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LowDefectExpr {
    Const(u64),
    Product(Box<LowDefectExpr>, Box<LowDefectExpr>),
    /// `inner · x_var + c`.
    Extend {
        inner: Box<LowDefectExpr>,
        var: usize,
        c: u64,
    },
}

impl LowDefectExpr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser {
            bytes: src.as_bytes(),
            pos: 0,
        };
        let node = p.sum()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.err("unexpected trailing input"));
        }
        let e = lower(node)?;
        let mut seen = Vec::new();
        e.collect_vars(&mut seen);
        for (i, &v) in seen.iter().enumerate() {
            if v != i + 1 {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!(
                        "variables must be x1..x{} in construction order, each once; found x{v} in position {}",
                        seen.len(),
                        i + 1
                    ),
                });
            }
        }
        Ok(e)
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            LowDefectExpr::Const(_) => {}
            LowDefectExpr::Product(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            LowDefectExpr::Extend { inner, var, .. } => {
                inner.collect_vars(out);
                out.push(*var);
            }
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            LowDefectExpr::Const(_) => 0,
            LowDefectExpr::Product(a, b) => a.degree() + b.degree(),
            LowDefectExpr::Extend { inner, .. } => inner.degree() + 1,
        }
    }

    /// Every integer constant, including the added `c` of each extension.
    pub fn constants(&self) -> Vec<u64> {
        match self {
            LowDefectExpr::Const(k) => vec![*k],
            LowDefectExpr::Product(a, b) => {
                let mut v = a.constants();
                v.extend(b.constants());
                v
            }
            LowDefectExpr::Extend { inner, c, .. } => {
                let mut v = inner.constants();
                v.push(*c);
                v
            }
        }
    }

    /// `‖E‖`: the sum of the complexities of all constants.
    pub fn complexity(&self, table: &ComplexityTable) -> Result<u64> {
        self.constants()
            .into_iter()
            .try_fold(0u64, |acc, k| Ok(acc + table.complexity(k)? as u64))
    }

    pub fn to_tree(&self) -> Result<LowDefectTree> {
        match self {
            LowDefectExpr::Const(k) => Ok(LowDefectTree::vertex(*k)),
            LowDefectExpr::Product(a, b) => a.to_tree()?.merge(b.to_tree()?),
            LowDefectExpr::Extend { inner, c, .. } => Ok(inner.to_tree()?.lift(*c)),
        }
    }

    pub fn to_poly(&self) -> Result<LowDefectPoly> {
        self.to_tree()?.to_poly()
    }
}

pub fn expr_to_tree(e: &LowDefectExpr) -> Result<LowDefectTree> {
    e.to_tree()
}

pub fn expr_to_poly(e: &LowDefectExpr) -> Result<LowDefectPoly> {
    e.to_poly()
}

impl fmt::Display for LowDefectExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factor = |e: &LowDefectExpr| match e {
            LowDefectExpr::Extend { .. } => format!("({e})"),
            _ => e.to_string(),
        };
        // Products parse left-associated, so a product on the right needs
        // parentheses to survive a round trip.
        let right = |e: &LowDefectExpr| match e {
            LowDefectExpr::Const(_) => e.to_string(),
            _ => format!("({e})"),
        };
        match self {
            LowDefectExpr::Const(k) => write!(f, "{k}"),
            LowDefectExpr::Product(a, b) => write!(f, "{}*{}", factor(a), right(b)),
            LowDefectExpr::Extend { inner, var, c } => match inner.as_ref() {
                LowDefectExpr::Const(1) => write!(f, "x{var}+{c}"),
                other => write!(f, "{}*x{var}+{c}", factor(other)),
            },
        }
    }
}

/// Untyped syntax tree before the read-once rules are applied.
#[derive(Debug)]
enum Node {
    Num(u64, usize),
    Var(usize, usize),
    Sum(Vec<Node>, usize),
    Prod(Vec<Node>, usize),
}

impl Node {
    fn pos(&self) -> usize {
        match self {
            Node::Num(_, p) | Node::Var(_, p) | Node::Sum(_, p) | Node::Prod(_, p) => *p,
        }
    }
}

fn bad(pos: usize, msg: &str) -> Error {
    Error::Parse {
        pos,
        msg: msg.to_string(),
    }
}

fn lower(node: Node) -> Result<LowDefectExpr> {
    match node {
        Node::Num(0, p) => Err(bad(p, "constants must be positive")),
        Node::Num(k, _) => Ok(LowDefectExpr::Const(k)),
        Node::Var(_, p) => Err(bad(p, "a variable must appear as E*x+c")),
        Node::Prod(factors, _) => {
            let mut it = factors.into_iter();
            let first = lower(it.next().expect("product has a factor"))?;
            it.try_fold(first, |acc, f| {
                Ok(LowDefectExpr::Product(Box::new(acc), Box::new(lower(f)?)))
            })
        }
        Node::Sum(terms, p) => {
            let [a, b]: [Node; 2] = terms
                .try_into()
                .map_err(|_| bad(p, "a sum must have the form E*x+c"))?;
            let (scaled, c) = match (a, b) {
                (s, Node::Num(c, _)) | (Node::Num(c, _), s) => (s, c),
                (_, other) => {
                    return Err(bad(other.pos(), "expected an integer constant in E*x+c"))
                }
            };
            if c == 0 {
                return Err(bad(p, "the added constant must be positive"));
            }
            let (inner, var) = match scaled {
                Node::Var(v, _) => (LowDefectExpr::Const(1), v),
                Node::Prod(mut fs, fp) => match fs.pop() {
                    Some(Node::Var(v, _)) => {
                        let inner = if fs.len() == 1 {
                            lower(fs.pop().unwrap())?
                        } else {
                            lower(Node::Prod(fs, fp))?
                        };
                        (inner, v)
                    }
                    _ => return Err(bad(fp, "expected a variable as the last factor of E*x")),
                },
                other => return Err(bad(other.pos(), "expected E*x before +c")),
            };
            Ok(LowDefectExpr::Extend {
                inner: Box::new(inner),
                var,
                c,
            })
        }
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        bad(self.pos, msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Node> {
        let start = self.pos;
        let mut terms = vec![self.product()?];
        while self.peek() == Some(b'+') {
            self.pos += 1;
            terms.push(self.product()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Node::Sum(terms, start)
        })
    }

    fn product(&mut self) -> Result<Node> {
        let start = self.pos;
        let mut factors = vec![self.atom()?];
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    factors.push(self.atom()?);
                }
                Some(b'(') | Some(b'x') => factors.push(self.atom()?),
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Node::Prod(factors, start)
        })
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| bad(start, "integer does not fit in 64 bits"))
    }

    fn atom(&mut self) -> Result<Node> {
        let start = self.pos;
        match self.peek() {
            Some(b'0'..=b'9') => {
                let p = self.pos;
                Ok(Node::Num(self.number()?, p))
            }
            Some(b'x') => {
                let p = self.pos;
                self.pos += 1;
                let v = self.number()?;
                if v == 0 {
                    return Err(bad(p, "variables are numbered from x1"));
                }
                Ok(Node::Var(v as usize, p))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                // Parenthesized sums stay atomic: `(E*x+c)` is one factor.
                Ok(match inner {
                    Node::Prod(fs, _) => Node::Prod(fs, start),
                    other => other,
                })
            }
            Some(_) => Err(self.err("expected an integer, a variable or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(src: &str) -> String {
        LowDefectExpr::parse(src)
            .unwrap()
            .to_poly()
            .unwrap()
            .to_string()
    }

    #[test]
    fn parses_examples() {
        assert_eq!(poly("2*(2x1+1)"), "4x1 + 2");
        assert_eq!(poly("5"), "5");
        assert_eq!(poly("(2x1+1)(3x2+1)"), "6x1x2 + 2x1 + 3x2 + 1");
        assert_eq!(poly("(2x1+1)*x2+1"), "2x1x2 + x2 + 1");
        assert_eq!(poly("x1+1"), "x1 + 1");
        assert_eq!(poly("1+x1"), "x1 + 1");
        assert_eq!(poly("2*(1094*x1+1)"), "2188x1 + 2");
    }

    #[test]
    fn tree_of_product() {
        let e = LowDefectExpr::parse("2(2x1+1)").unwrap();
        let t = e.to_tree().unwrap();
        assert_eq!(t.label, 2);
        assert_eq!(t.children.len(), 1);
        assert_eq!(t.children[0].label, 2);
        assert_eq!(t.children[0].edge_label, Some(1));
        assert!(t.children[0].is_leaf());

        let e = LowDefectExpr::parse("(2x1+1)(3x2+1)").unwrap();
        let t = e.to_tree().unwrap();
        assert_eq!(t.label, 1);
        assert_eq!(t.children.len(), 2);
    }

    #[test]
    fn display_reparses() {
        for src in [
            "2*(2x1+1)",
            "((2x1+1)x2+1)x3+1",
            "(2x1+1)(3x2+1)*4",
            "x1+1",
            "7",
        ] {
            let e = LowDefectExpr::parse(src).unwrap();
            let again = LowDefectExpr::parse(&e.to_string()).unwrap();
            assert_eq!(again, e, "{src} -> {e}");
        }
    }

    #[test]
    fn enforces_read_once_rules() {
        for src in [
            "x1",
            "x1*x1+1",
            "(x1+1)(x1+1)",
            "(x2+1)(x1+1)",
            "x2+1",
            "2x1+1+1",
            "2x1+0",
            "0",
            "x1*2+1",
            "2+3",
            "(2x1+1",
            "",
            "x0+1",
        ] {
            assert!(
                LowDefectExpr::parse(src).is_err(),
                "{src} should be rejected"
            );
        }
    }

    #[test]
    fn expression_complexity() {
        let table = ComplexityTable::build(2200).unwrap();
        let e = LowDefectExpr::parse("2*(1094x1+1)").unwrap();
        assert_eq!(e.complexity(&table).unwrap(), 2 + 22 + 1);
        assert_eq!(e.to_tree().unwrap().complexity(&table).unwrap(), 25);
        // 1·(…) costs an extra one in the expression but not in the tree.
        let e = LowDefectExpr::parse("1*(2x1+1)").unwrap();
        assert_eq!(e.complexity(&table).unwrap(), 4);
        assert_eq!(e.to_tree().unwrap().complexity(&table).unwrap(), 3);
    }
}
