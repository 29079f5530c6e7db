use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::poly::LowDefectPoly;
use crate::complexity::ComplexityTable;
use crate::error::{Error, Result};

/// A rooted tree with positive vertex and edge labels.
///
/// `edge_label` is the label of the edge to the parent and is `None` exactly
/// at the root. Every such tree arises from the construction rules: build each
/// child, extend it by its edge label, then multiply everything with the
/// constant vertex label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowDefectTree {
    pub label: u64,
    pub edge_label: Option<u64>,
    #[serde(default)]
    pub children: Vec<LowDefectTree>,
}

impl LowDefectTree {
    pub fn vertex(label: u64) -> Self {
        Self {
            label,
            edge_label: None,
            children: Vec::new(),
        }
    }

    /// Adds `child` below this vertex via an edge labeled `edge`.
    pub fn with_child(mut self, edge: u64, mut child: LowDefectTree) -> Self {
        child.edge_label = Some(edge);
        self.children.push(child);
        self
    }

    /// Checks labels: all positive, edge labels exactly off the root.
    pub fn validate(&self) -> Result<()> {
        if self.edge_label.is_some() {
            return Err(Error::Contract("root must not carry an edge label".into()));
        }
        self.validate_below()
    }

    fn validate_below(&self) -> Result<()> {
        if self.label == 0 {
            return Err(Error::Contract("vertex labels must be positive".into()));
        }
        for child in &self.children {
            match child.edge_label {
                Some(e) if e >= 1 => child.validate_below()?,
                _ => {
                    return Err(Error::Contract(
                        "every non-root vertex needs a positive edge label".into(),
                    ))
                }
            }
        }
        Ok(())
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(src)?;
        t.validate()?;
        Ok(t)
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Number of edges, which is the degree of the polynomial.
    pub fn degree(&self) -> usize {
        self.children.iter().map(|c| 1 + c.degree()).sum()
    }

    /// Product of all vertex labels.
    pub fn leading_coefficient(&self) -> BigUint {
        self.children
            .iter()
            .fold(BigUint::from(self.label), |acc, c| {
                acc * c.leading_coefficient()
            })
    }

    pub fn vertex_labels(&self) -> Vec<u64> {
        let mut out = vec![self.label];
        for c in &self.children {
            out.extend(c.vertex_labels());
        }
        out
    }

    pub fn edge_labels(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for c in &self.children {
            out.extend(c.edge_label);
            out.extend(c.edge_labels());
        }
        out
    }

    pub fn leaf_labels(&self) -> Vec<u64> {
        if self.is_leaf() {
            return vec![self.label];
        }
        self.children.iter().flat_map(|c| c.leaf_labels()).collect()
    }

    /// Labels of non-leaf vertices.
    pub fn inner_labels(&self) -> Vec<u64> {
        if self.is_leaf() {
            return Vec::new();
        }
        let mut out = vec![self.label];
        for c in &self.children {
            out.extend(c.inner_labels());
        }
        out
    }

    /// `Σ‖w(e)‖ + Σ_leaves ‖w(v)‖ + Σ_{inner, w(v)>1} ‖w(v)‖`.
    pub fn complexity(&self, table: &ComplexityTable) -> Result<u64> {
        let mut total = 0u64;
        for e in self.edge_labels() {
            total += table.complexity(e)? as u64;
        }
        for l in self.leaf_labels() {
            total += table.complexity(l)? as u64;
        }
        for w in self.inner_labels() {
            if w > 1 {
                total += table.complexity(w)? as u64;
            }
        }
        Ok(total)
    }

    /// `poly(v) = w(v) · ∏ (poly(child)·x_e + w(e))`, numbering variables in
    /// post-order so that a child's variables precede its edge variable.
    pub fn to_poly(&self) -> Result<LowDefectPoly> {
        let mut acc = LowDefectPoly::constant(self.label)?;
        for child in &self.children {
            let edge = child
                .edge_label
                .ok_or_else(|| Error::Contract("missing edge label".into()))?;
            let term = child.to_poly()?.times_var_plus(edge)?;
            acc = acc.tensor(&term)?;
        }
        Ok(acc)
    }

    /// Merges the roots of two trees, multiplying their labels.
    pub(crate) fn merge(mut self, other: LowDefectTree) -> Result<Self> {
        self.label = self
            .label
            .checked_mul(other.label)
            .ok_or_else(|| Error::TooLarge(format!("{}·{}", self.label, other.label)))?;
        self.children.extend(other.children);
        Ok(self)
    }

    /// New root labeled 1 above this tree, via an edge labeled `c`.
    pub(crate) fn lift(self, c: u64) -> Self {
        LowDefectTree::vertex(1).with_child(c, self)
    }
}

pub fn tree_to_poly(t: &LowDefectTree) -> Result<LowDefectPoly> {
    t.to_poly()
}

pub fn tree_complexity(t: &LowDefectTree, table: &ComplexityTable) -> Result<u64> {
    t.complexity(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_x_plus_two() {
        let t = LowDefectTree::vertex(2).with_child(1, LowDefectTree::vertex(2));
        let table = ComplexityTable::build(100).unwrap();
        assert_eq!(t.complexity(&table).unwrap(), 5);
        assert_eq!(t.to_poly().unwrap().to_string(), "4x1 + 2");
        assert_eq!(t.degree(), 1);
        assert_eq!(t.leading_coefficient(), BigUint::from(4u32));
    }

    #[test]
    fn ax_plus_one_complexity() {
        let table = ComplexityTable::build(100).unwrap();
        let t = LowDefectTree::vertex(1).with_child(1, LowDefectTree::vertex(2));
        assert_eq!(t.complexity(&table).unwrap(), 3);
        let single = LowDefectTree::vertex(5);
        assert_eq!(single.complexity(&table).unwrap(), 5);
        assert_eq!(single.to_poly().unwrap().to_string(), "5");
    }

    #[test]
    fn lead_and_degree() {
        let t = LowDefectTree::vertex(2).with_child(1, LowDefectTree::vertex(5));
        assert_eq!(t.leading_coefficient(), BigUint::from(10u32));
        assert_eq!(t.degree(), 1);
        let c = LowDefectTree::vertex(7);
        assert_eq!(c.leading_coefficient(), BigUint::from(7u32));
        assert_eq!(c.degree(), 0);
    }

    #[test]
    fn post_order_variables() {
        // root 1 -1- mid 1 -1- leaf 2 : ((2x1+1)x2+1)
        let t = LowDefectTree::vertex(1).with_child(
            1,
            LowDefectTree::vertex(1).with_child(1, LowDefectTree::vertex(2)),
        );
        assert_eq!(t.to_poly().unwrap().to_string(), "2x1x2 + x2 + 1");
    }

    #[test]
    fn complexity_range_error() {
        let table = ComplexityTable::build(10).unwrap();
        let t = LowDefectTree::vertex(11);
        assert!(matches!(
            t.complexity(&table),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn json_roundtrip() {
        let t = LowDefectTree::vertex(2).with_child(1, LowDefectTree::vertex(2));
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"edge_label\":null"));
        assert_eq!(LowDefectTree::from_json(&s).unwrap(), t);
        let bad = r#"{"label":2,"edge_label":null,"children":[{"label":3,"edge_label":null}]}"#;
        assert!(LowDefectTree::from_json(bad).is_err());
        let zero = r#"{"label":0,"edge_label":null}"#;
        assert!(LowDefectTree::from_json(zero).is_err());
    }
}
