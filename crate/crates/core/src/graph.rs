//! Pearls, necklaces and the necklace adjacency Hamiltonian.
//!
//! All vertex indices are 0-based. Vertex `m` of pearl `j` sits at flattened
//! index `j * M + m`. Pearl `j` links its `root_out` to `root_in` of pearl
//! `j + 1 (mod K)`.

use std::collections::BTreeSet;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Adjacency structure of a single pearl with its two attachment roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PearlSpec {
    m: usize,
    edges: Vec<(usize, usize)>,
    root_in: usize,
    root_out: usize,
}

/// On-disk pearl description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PearlFile {
    pub m: usize,
    pub edges: Vec<[usize; 2]>,
    pub root_in: usize,
    pub root_out: usize,
}

impl PearlSpec {
    /// Validated pearl from an explicit edge list.
    pub fn custom(m: usize, edges: &[(usize, usize)], root_in: usize, root_out: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidPearl("pearl must have at least one vertex".into()));
        }
        for (name, r) in [("root_in", root_in), ("root_out", root_out)] {
            if r >= m {
                return Err(Error::InvalidPearl(format!("{name} = {r} is out of range for m = {m}")));
            }
        }
        let mut seen = BTreeSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= m || b >= m {
                return Err(Error::InvalidPearl(format!(
                    "edge [{a}, {b}] has a vertex out of range for m = {m}"
                )));
            }
            if a == b {
                return Err(Error::InvalidPearl(format!("edge [{a}, {b}] is a self-loop")));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::InvalidPearl(format!("edge [{a}, {b}] is a duplicate")));
            }
            normalized.push(key);
        }
        Ok(Self { m, edges: normalized, root_in, root_out })
    }

    /// A single vertex with no internal edges; necklaces of it are plain cycles.
    pub fn cycle() -> Self {
        Self { m: 1, edges: Vec::new(), root_in: 0, root_out: 0 }
    }

    /// Pearl of the (K, d)-comb: a path `0..d` with a tooth at vertex `d`
    /// hanging off vertex 0. Roots are 0 and `d - 1`.
    pub fn comb(d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidParameter(format!("comb spacing d must be >= 1, got {d}")));
        }
        let mut edges: Vec<(usize, usize)> = (0..d - 1).map(|v| (v, v + 1)).collect();
        edges.push((0, d));
        Self::custom(d + 1, &edges, 0, d - 1)
    }

    pub fn from_file(file: &PearlFile) -> Result<Self> {
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::custom(file.m, &edges, file.root_in, file.root_out)
    }

    pub fn to_file(&self) -> PearlFile {
        PearlFile {
            m: self.m,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            root_in: self.root_in,
            root_out: self.root_out,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PearlFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidPearl(format!("malformed pearl JSON: {e}")))?;
        Self::from_file(&file)
    }

    pub fn load(path: &Path) -> std::io::Result<Result<Self>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::from_json(&text))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn root_in(&self) -> usize {
        self.root_in
    }

    pub fn root_out(&self) -> usize {
        self.root_out
    }

    /// Both inter-pearl links attach to the same vertex.
    pub fn single_root(&self) -> bool {
        self.root_in == self.root_out
    }

    /// Pearl adjacency matrix `P`.
    pub fn adjacency(&self) -> Array2<f64> {
        let mut p = Array2::zeros((self.m, self.m));
        for &(a, b) in &self.edges {
            p[[a, b]] = 1.0;
            p[[b, a]] = 1.0;
        }
        p
    }

    /// Relabel vertices: old vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.m || perm.iter().copied().collect::<BTreeSet<_>>().len() != self.m {
            return Err(Error::InvalidParameter("relabeling must be a permutation of the pearl vertices".into()));
        }
        let edges: Vec<_> = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        Self::custom(self.m, &edges, perm[self.root_in], perm[self.root_out])
    }
}

/// A pearl replicated `k` times around a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NecklaceSpec {
    pearl: PearlSpec,
    k: usize,
}

impl NecklaceSpec {
    pub fn new(pearl: PearlSpec, k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidParameter(format!("necklace needs K >= 3 pearls, got {k}")));
        }
        Ok(Self { pearl, k })
    }

    pub fn pearl(&self) -> &PearlSpec {
        &self.pearl
    }

    /// Number of pearls.
    pub fn pearls(&self) -> usize {
        self.k
    }

    /// Total vertex count `K * M`.
    pub fn vertex_count(&self) -> usize {
        self.k * self.pearl.m
    }

    pub fn index(&self, j: usize, m: usize) -> usize {
        debug_assert!(j < self.k && m < self.pearl.m);
        j * self.pearl.m + m
    }

    /// Inverse of [`NecklaceSpec::index`].
    pub fn site(&self, index: usize) -> (usize, usize) {
        (index / self.pearl.m, index % self.pearl.m)
    }
}

/// Dense real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(Array2<f64>);

impl SymmetricMatrix {
    pub fn new(a: Array2<f64>) -> Result<Self> {
        let (r, c) = a.dim();
        if r != c || r == 0 {
            return Err(Error::InvalidMatrix(format!("expected a non-empty square matrix, got {r}x{c}")));
        }
        for i in 0..r {
            for j in 0..i {
                if a[[i, j]] != a[[j, i]] {
                    return Err(Error::InvalidMatrix(format!("entries ({i}, {j}) and ({j}, {i}) differ")));
                }
            }
        }
        Ok(Self(a))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_array(self) -> Array2<f64> {
        self.0
    }
}

/// Full necklace adjacency: block-diagonal copies of `P` plus the ring links.
pub fn assemble_hamiltonian(necklace: &NecklaceSpec) -> SymmetricMatrix {
    let pearl = necklace.pearl();
    let m = pearl.m();
    let k = necklace.pearls();
    let n = necklace.vertex_count();
    let mut h = Array2::zeros((n, n));
    for j in 0..k {
        for &(a, b) in pearl.edges() {
            h[[j * m + a, j * m + b]] = 1.0;
            h[[j * m + b, j * m + a]] = 1.0;
        }
        let from = necklace.index(j, pearl.root_out());
        let to = necklace.index((j + 1) % k, pearl.root_in());
        h[[from, to]] = 1.0;
        h[[to, from]] = 1.0;
    }
    SymmetricMatrix(h)
}
