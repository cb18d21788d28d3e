use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Trained user vectors. Unknown users map to the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationalEmbedding {
    index: BTreeMap<String, usize>,
    users: Vec<String>,
    vectors: Vec<f64>,
    dim: usize,
}

impl RelationalEmbedding {
    /// `vectors` is row-major, one row of `dim` values per entry of `users`.
    pub fn new(users: Vec<String>, vectors: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("embedding dimension must be at least 1".into()));
        }
        if vectors.len() != users.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: users.len() * dim,
                got: vectors.len(),
            });
        }
        if !math::all_finite(&vectors) {
            return Err(Error::NonFinite("embedding vectors"));
        }
        let mut index = BTreeMap::new();
        for (i, u) in users.iter().enumerate() {
            if u.is_empty() {
                return Err(Error::InvalidId("empty user id in embedding"));
            }
            if index.insert(u.clone(), i).is_some() {
                return Err(Error::DuplicateId(u.clone()));
            }
        }
        Ok(Self {
            index,
            users,
            vectors,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    /// Users in row order.
    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn is_known(&self, user: &str) -> bool {
        self.index.contains_key(user)
    }

    pub fn row(&self, user: &str) -> Option<&[f64]> {
        self.index
            .get(user)
            .map(|&i| &self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    pub fn row_at(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    /// Stored row for a known user, zeros otherwise.
    pub fn lookup(&self, user: &str) -> Vec<f64> {
        self.row(user).map_or_else(|| vec![0.0; self.dim], <[f64]>::to_vec)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.users
            .iter()
            .enumerate()
            .map(|(i, u)| (u.as_str(), self.row_at(i)))
    }

    pub fn matrix(&self) -> &[f64] {
        &self.vectors
    }
}
