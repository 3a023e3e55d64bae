//! Order-statistic sequence of distinct integers.
//!
//! `DynSeq` is the evolving input shared by every dynamic engine. It is an
//! indexed treap with parent pointers: access, insert and delete are
//! O(log n) expected, and an element keeps a stable [`Handle`] for its whole
//! lifetime even as positions shift around it. `index_of` recovers the
//! current 1-based position of a handle in O(log n), which is what lets the
//! level structures compare element order without ever reindexing.

use std::collections::HashSet;

use crate::rng::Rng64;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SeqError {
    #[error("position {pos} out of range (len {len})")]
    OutOfRange { pos: usize, len: usize },
    #[error("value {0} already present")]
    Duplicate(i64),
}

/// Stable identifier for a live element. Invalidated by `delete`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Handle(pub u32);

/// A single edit. Positions are 1-based; insert accepts `len + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EditOp {
    Insert { pos: usize, val: i64 },
    Delete { pos: usize },
}

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    left: u32,
    right: u32,
    parent: u32,
    size: u32,
    prio: u64,
    val: i64,
}

/// Order-statistic sequence container; all values pairwise distinct.
#[derive(Clone, Debug)]
pub struct DynSeq {
    nodes: Vec<Node>,
    free: Vec<u32>,
    root: u32,
    values: HashSet<i64>,
    rng: Rng64,
}

impl Default for DynSeq {
    fn default() -> Self {
        Self::new()
    }
}

impl DynSeq {
    pub fn new() -> Self {
        Self::with_seed(0x0ddb_a115)
    }

    pub fn with_seed(seed: u64) -> Self {
        DynSeq {
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            values: HashSet::new(),
            rng: Rng64::new(seed),
        }
    }

    pub fn from_values(vals: &[i64]) -> Self {
        let mut s = Self::new();
        for (i, &v) in vals.iter().enumerate() {
            s.insert(i + 1, v).expect("distinct values");
        }
        s
    }

    pub fn len(&self) -> usize {
        if self.root == NIL {
            0
        } else {
            self.nodes[self.root as usize].size as usize
        }
    }

    /// Upper bound on live handle slab indices; sizing hint for dense
    /// handle-indexed side tables.
    pub fn capacity_hint(&self) -> usize {
        self.nodes.len() + 16
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    pub fn contains_value(&self, val: i64) -> bool {
        self.values.contains(&val)
    }

    /// Insert `val` so that it becomes the element at `pos` (1-based).
    pub fn insert(&mut self, pos: usize, val: i64) -> Result<Handle, SeqError> {
        let len = self.len();
        if pos == 0 || pos > len + 1 {
            return Err(SeqError::OutOfRange { pos, len });
        }
        if !self.values.insert(val) {
            return Err(SeqError::Duplicate(val));
        }
        let id = self.alloc(val);
        let (a, b) = self.split(self.root, pos - 1);
        let ab = self.merge(a, id);
        self.root = self.merge(ab, b);
        self.set_parent(self.root, NIL);
        Ok(Handle(id))
    }

    /// Remove and return the element at `pos` (1-based).
    pub fn delete(&mut self, pos: usize) -> Result<(i64, Handle), SeqError> {
        let len = self.len();
        if pos == 0 || pos > len {
            return Err(SeqError::OutOfRange { pos, len });
        }
        let (a, bc) = self.split(self.root, pos - 1);
        let (b, c) = self.split(bc, 1);
        let val = self.nodes[b as usize].val;
        self.values.remove(&val);
        self.free.push(b);
        self.root = self.merge(a, c);
        self.set_parent(self.root, NIL);
        Ok((val, Handle(b)))
    }

    pub fn apply(&mut self, op: EditOp) -> Result<(), SeqError> {
        match op {
            EditOp::Insert { pos, val } => self.insert(pos, val).map(|_| ()),
            EditOp::Delete { pos } => self.delete(pos).map(|_| ()),
        }
    }

    /// Value at `pos` (1-based), without mutation.
    pub fn get(&self, pos: usize) -> Result<i64, SeqError> {
        let len = self.len();
        if pos == 0 || pos > len {
            return Err(SeqError::OutOfRange { pos, len });
        }
        let mut cur = self.root;
        let mut k = pos;
        loop {
            let n = &self.nodes[cur as usize];
            let ls = self.size(n.left) as usize;
            if k <= ls {
                cur = n.left;
            } else if k == ls + 1 {
                return Ok(n.val);
            } else {
                k -= ls + 1;
                cur = n.right;
            }
        }
    }

    pub fn handle_at(&self, pos: usize) -> Result<Handle, SeqError> {
        let len = self.len();
        if pos == 0 || pos > len {
            return Err(SeqError::OutOfRange { pos, len });
        }
        let mut cur = self.root;
        let mut k = pos;
        loop {
            let n = &self.nodes[cur as usize];
            let ls = self.size(n.left) as usize;
            if k <= ls {
                cur = n.left;
            } else if k == ls + 1 {
                return Ok(Handle(cur));
            } else {
                k -= ls + 1;
                cur = n.right;
            }
        }
    }

    pub fn value_of(&self, h: Handle) -> i64 {
        self.nodes[h.0 as usize].val
    }

    /// Current 1-based position of a live handle. O(log n) expected.
    pub fn index_of(&self, h: Handle) -> usize {
        let mut cur = h.0;
        let mut pos = self.size(self.nodes[cur as usize].left) as usize + 1;
        loop {
            let parent = self.nodes[cur as usize].parent;
            if parent == NIL {
                break;
            }
            let p = &self.nodes[parent as usize];
            if p.right == cur {
                pos += self.size(p.left) as usize + 1;
            }
            cur = parent;
        }
        pos
    }

    /// True iff `a` currently sits strictly left of `b`.
    pub fn before(&self, a: Handle, b: Handle) -> bool {
        self.index_of(a) < self.index_of(b)
    }

    pub fn to_vec(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.len());
        self.collect(self.root, &mut out);
        out
    }

    fn collect(&self, node: u32, out: &mut Vec<i64>) {
        if node == NIL {
            return;
        }
        let n = &self.nodes[node as usize];
        self.collect(n.left, out);
        out.push(n.val);
        self.collect(n.right, out);
    }

    fn alloc(&mut self, val: i64) -> u32 {
        let prio = self.rng.next_u64();
        let node = Node {
            left: NIL,
            right: NIL,
            parent: NIL,
            size: 1,
            prio,
            val,
        };
        if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = node;
            id
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    fn size(&self, node: u32) -> u32 {
        if node == NIL {
            0
        } else {
            self.nodes[node as usize].size
        }
    }

    fn pull(&mut self, node: u32) {
        let (l, r) = {
            let n = &self.nodes[node as usize];
            (n.left, n.right)
        };
        let sz = 1 + self.size(l) + self.size(r);
        self.nodes[node as usize].size = sz;
        if l != NIL {
            self.nodes[l as usize].parent = node;
        }
        if r != NIL {
            self.nodes[r as usize].parent = node;
        }
    }

    fn set_parent(&mut self, node: u32, parent: u32) {
        if node != NIL {
            self.nodes[node as usize].parent = parent;
        }
    }

    /// Split into (first `k` elements, rest).
    fn split(&mut self, node: u32, k: usize) -> (u32, u32) {
        if node == NIL {
            return (NIL, NIL);
        }
        let ls = self.size(self.nodes[node as usize].left) as usize;
        if k <= ls {
            let left = self.nodes[node as usize].left;
            let (a, b) = self.split(left, k);
            self.nodes[node as usize].left = b;
            self.pull(node);
            self.set_parent(a, NIL);
            (a, node)
        } else {
            let right = self.nodes[node as usize].right;
            let (a, b) = self.split(right, k - ls - 1);
            self.nodes[node as usize].right = a;
            self.pull(node);
            self.set_parent(b, NIL);
            (node, b)
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio >= self.nodes[b as usize].prio {
            let ar = self.nodes[a as usize].right;
            let m = self.merge(ar, b);
            self.nodes[a as usize].right = m;
            self.pull(a);
            a
        } else {
            let bl = self.nodes[b as usize].left;
            let m = self.merge(a, bl);
            self.nodes[b as usize].left = m;
            self.pull(b);
            b
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_insert_delete() {
        let mut s = DynSeq::new();
        s.insert(1, 5).unwrap();
        assert_eq!(s.to_vec(), vec![5]);
        assert_eq!(s.get(1).unwrap(), 5);
        let (v, _) = s.delete(1).unwrap();
        assert_eq!(v, 5);
        assert!(s.is_empty());
    }

    #[test]
    fn mid_insert_and_figure_array() {
        let mut s = DynSeq::from_values(&[7, 2]);
        s.insert(2, 4).unwrap();
        assert_eq!(s.to_vec(), vec![7, 4, 2]);
        assert_eq!(s.get(3).unwrap(), 2);

        let mut s = DynSeq::from_values(&[1, 5, 2, 4, 6, 7, 9, 10, 8]);
        s.insert(4, 3).unwrap();
        assert_eq!(s.to_vec(), vec![1, 5, 2, 3, 4, 6, 7, 9, 10, 8]);
        assert_eq!(s.get(4).unwrap(), 3);
    }

    #[test]
    fn delete_mid() {
        let mut s = DynSeq::from_values(&[1, 5, 2, 3, 4]);
        let (v, _) = s.delete(4).unwrap();
        assert_eq!(v, 3);
        assert_eq!(s.to_vec(), vec![1, 5, 2, 4]);

        let mut s = DynSeq::from_values(&[7, 2, 4]);
        let (v, _) = s.delete(2).unwrap();
        assert_eq!(v, 2);
        assert_eq!(s.to_vec(), vec![7, 4]);
    }

    #[test]
    fn errors() {
        let mut s = DynSeq::from_values(&[1, 2]);
        assert_eq!(
            s.insert(4, 9),
            Err(SeqError::OutOfRange { pos: 4, len: 2 })
        );
        assert_eq!(s.insert(1, 2), Err(SeqError::Duplicate(2)));
        assert_eq!(s.delete(3), Err(SeqError::OutOfRange { pos: 3, len: 2 }));
        assert_eq!(s.get(0), Err(SeqError::OutOfRange { pos: 0, len: 2 }));
    }

    #[test]
    fn handles_track_positions() {
        let mut s = DynSeq::from_values(&[10, 20, 30]);
        let h = s.handle_at(2).unwrap();
        assert_eq!(s.index_of(h), 2);
        s.insert(1, 5).unwrap();
        assert_eq!(s.index_of(h), 3);
        s.delete(1).unwrap();
        assert_eq!(s.index_of(h), 2);
        assert_eq!(s.value_of(h), 20);
    }

    #[test]
    fn random_ops_match_vec_model() {
        let mut rng = Rng64::new(123);
        for _ in 0..40 {
            let mut model: Vec<i64> = Vec::new();
            let mut s = DynSeq::new();
            let mut next_val = 0i64;
            for _ in 0..400 {
                let insert = model.is_empty() || rng.gen_bool();
                if insert {
                    let pos = rng.gen_usize(model.len() + 1) + 1;
                    model.insert(pos - 1, next_val);
                    s.insert(pos, next_val).unwrap();
                    next_val += 1;
                } else {
                    let pos = rng.gen_usize(model.len()) + 1;
                    let expect = model.remove(pos - 1);
                    let (got, _) = s.delete(pos).unwrap();
                    assert_eq!(got, expect);
                }
            }
            assert_eq!(s.to_vec(), model);
            for (i, &v) in model.iter().enumerate() {
                assert_eq!(s.get(i + 1).unwrap(), v);
                let h = s.handle_at(i + 1).unwrap();
                assert_eq!(s.index_of(h), i + 1);
            }
        }
    }
}
