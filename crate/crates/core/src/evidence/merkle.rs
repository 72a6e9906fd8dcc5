//! Binary Poseidon-Merkle tree over chain links.
//!
//! Leaf `j - 1` commits to the link `(s_{j-1}, s_j)` for `j` in `1..=N`:
//! `leaf = H(H(lo_{j-1}, hi_{j-1}), H(lo_j, hi_j))`, where `lo`/`hi` are the
//! little-endian 128-bit halves of a digest. One opening therefore
//! authenticates both endpoints of a sampled link.

use ark_bn254::Fr;
use ark_ff::PrimeField;

use super::swf::SwfChain;
use crate::poseidon::hash2;
use crate::{Error, Result};

pub fn digest_limbs(d: &[u8; 32]) -> [Fr; 2] {
    [
        Fr::from_le_bytes_mod_order(&d[..16]),
        Fr::from_le_bytes_mod_order(&d[16..]),
    ]
}

pub fn digest_node(d: &[u8; 32]) -> Fr {
    let [lo, hi] = digest_limbs(d);
    hash2(lo, hi)
}

pub fn link_leaf(prev: &[u8; 32], cur: &[u8; 32]) -> Fr {
    hash2(digest_node(prev), digest_node(cur))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerklePath {
    pub index: usize,
    pub siblings: Vec<Fr>,
}

#[derive(Clone, Debug)]
pub struct MerkleTree {
    levels: Vec<Vec<Fr>>,
}

impl MerkleTree {
    pub fn from_leaves(leaves: Vec<Fr>) -> Result<Self> {
        if leaves.len() < 2 || !leaves.len().is_power_of_two() {
            return Err(Error::InvalidInput("leaf count must be a power of two >= 2".into()));
        }
        let mut levels = vec![leaves];
        while levels.last().expect("nonempty").len() > 1 {
            let next = levels
                .last()
                .expect("nonempty")
                .chunks(2)
                .map(|p| hash2(p[0], p[1]))
                .collect();
            levels.push(next);
        }
        Ok(MerkleTree { levels })
    }

    pub fn root(&self) -> Fr {
        self.levels.last().expect("nonempty")[0]
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn leaf(&self, index: usize) -> Option<Fr> {
        self.levels[0].get(index).copied()
    }

    pub fn path(&self, index: usize) -> Option<MerklePath> {
        if index >= self.levels[0].len() {
            return None;
        }
        let siblings = (0..self.depth())
            .map(|k| self.levels[k][(index >> k) ^ 1])
            .collect();
        Some(MerklePath { index, siblings })
    }
}

impl MerklePath {
    pub fn root_from(&self, leaf: Fr) -> Fr {
        self.siblings.iter().enumerate().fold(leaf, |node, (k, s)| {
            if (self.index >> k) & 1 == 1 {
                hash2(*s, node)
            } else {
                hash2(node, *s)
            }
        })
    }

    pub fn verify(&self, root: Fr, leaf: Fr) -> bool {
        self.root_from(leaf) == root
    }
}

/// Commits to every link of a finished chain.
pub fn merkle_commit(chain: &SwfChain) -> Result<MerkleTree> {
    if chain.steps() < 2 {
        return Err(Error::InvalidInput("chain needs at least two steps".into()));
    }
    let nodes: Vec<Fr> = chain.states().iter().map(digest_node).collect();
    let leaves = nodes.windows(2).map(|w| hash2(w[0], w[1])).collect();
    MerkleTree::from_leaves(leaves)
}
