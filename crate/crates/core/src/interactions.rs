//! Id maps and the deduplicated implicit-feedback interaction matrix.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Bijection between opaque external ids and dense indices `0..len`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdMap {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a map in iteration order, rejecting repeated ids.
    pub fn from_ids<I, S>(ids: I, kind: &'static str) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut map = IdMap::new();
        for id in ids {
            let id = id.into();
            if map.index.contains_key(&id) {
                return Err(Error::DuplicateId { kind, id });
            }
            map.insert_new(id);
        }
        Ok(map)
    }

    fn insert_new(&mut self, id: String) -> usize {
        let idx = self.ids.len();
        self.index.insert(id.clone(), idx);
        self.ids.push(id);
        idx
    }

    /// Index of `id`, assigning the next free index on first sight.
    pub fn intern(&mut self, id: &str) -> usize {
        match self.index.get(id) {
            Some(&idx) => idx,
            None => self.insert_new(id.to_owned()),
        }
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Binary user × item matrix stored user-major (CSR without values; every
/// stored entry is an implicit 1.0).
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionMatrix {
    user_map: Arc<IdMap>,
    item_map: Arc<IdMap>,
    indptr: Vec<usize>,
    indices: Vec<usize>,
}

impl InteractionMatrix {
    /// Builds the matrix from deduplicated `(user_id, item_id)` records. Users
    /// and items are indexed in order of first appearance.
    pub fn from_pairs<U, I>(records: &[(U, I)]) -> Result<Self>
    where
        U: AsRef<str>,
        I: AsRef<str>,
    {
        let mut users = IdMap::new();
        let mut items = IdMap::new();
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for (u, i) in records {
            let ui = users.intern(u.as_ref());
            let ii = items.intern(i.as_ref());
            if ui == rows.len() {
                rows.push(Vec::new());
            }
            rows[ui].push(ii);
        }
        let (indptr, indices) = compress(rows, |u, i| Error::DuplicateInteraction {
            user: users.id(u).to_owned(),
            item: items.id(i).to_owned(),
        })?;
        Ok(Self {
            user_map: Arc::new(users),
            item_map: Arc::new(items),
            indptr,
            indices,
        })
    }

    /// Builds a matrix over existing id maps from index pairs. Used for fold
    /// training matrices, which keep the full id universe so that embeddings
    /// from every fold share one index space.
    pub fn from_indexed(
        user_map: Arc<IdMap>,
        item_map: Arc<IdMap>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut rows = vec![Vec::new(); user_map.len()];
        for (u, i) in pairs {
            if u >= user_map.len() || i >= item_map.len() {
                return Err(Error::MapMismatch(format!(
                    "pair ({u}, {i}) outside a {}x{} id space",
                    user_map.len(),
                    item_map.len()
                )));
            }
            rows[u].push(i);
        }
        let (indptr, indices) = compress(rows, |u, i| Error::DuplicateInteraction {
            user: user_map.id(u).to_owned(),
            item: item_map.id(i).to_owned(),
        })?;
        Ok(Self {
            user_map,
            item_map,
            indptr,
            indices,
        })
    }

    pub fn user_map(&self) -> &Arc<IdMap> {
        &self.user_map
    }

    pub fn item_map(&self) -> &Arc<IdMap> {
        &self.item_map
    }

    pub fn n_users(&self) -> usize {
        self.user_map.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_map.len()
    }

    pub fn interaction_count(&self) -> usize {
        self.indices.len()
    }

    /// Items consumed by `user`, strictly increasing.
    pub fn row(&self, user: usize) -> &[usize] {
        &self.indices[self.indptr[user]..self.indptr[user + 1]]
    }

    pub fn contains(&self, user: usize, item: usize) -> bool {
        self.row(user).binary_search(&item).is_ok()
    }

    /// All `(user, item)` index pairs in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_users()).flat_map(move |u| self.row(u).iter().map(move |&i| (u, i)))
    }

    /// All `(user_id, item_id)` pairs in row-major order.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        self.iter()
            .map(|(u, i)| {
                (
                    self.user_map.id(u).to_owned(),
                    self.item_map.id(i).to_owned(),
                )
            })
            .collect()
    }

    /// Item-major view: for each item, the users who consumed it (ascending).
    pub fn item_major(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.n_items()];
        for (u, i) in self.iter() {
            cols[i].push(u);
        }
        cols
    }

    /// Interaction count per item.
    pub fn item_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_items()];
        for &i in &self.indices {
            counts[i] += 1;
        }
        counts
    }
}

fn compress(
    rows: Vec<Vec<usize>>,
    dup: impl Fn(usize, usize) -> Error,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut indptr = Vec::with_capacity(rows.len() + 1);
    let mut indices = Vec::with_capacity(rows.iter().map(Vec::len).sum());
    indptr.push(0);
    for (u, mut row) in rows.into_iter().enumerate() {
        row.sort_unstable();
        if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
            return Err(dup(u, w[0]));
        }
        indices.extend_from_slice(&row);
        indptr.push(indices.len());
    }
    Ok((indptr, indices))
}

/// `1 - |R| / (|U| * |I|)`.
pub fn sparsity(m: &InteractionMatrix) -> Result<f64> {
    sparsity_from_counts(m.n_users(), m.n_items(), m.interaction_count())
}

pub fn sparsity_from_counts(users: usize, items: usize, interactions: usize) -> Result<f64> {
    if users == 0 || items == 0 {
        return Err(Error::UndefinedSparsity { users, items });
    }
    Ok(1.0 - interactions as f64 / (users as f64 * items as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn small_build() {
        let m = InteractionMatrix::from_pairs(&[("u1", "i1"), ("u1", "i2"), ("u2", "i1")]).unwrap();
        assert_eq!(m.n_users(), 2);
        assert_eq!(m.n_items(), 2);
        assert_eq!(m.interaction_count(), 3);
        assert_eq!(m.row(0), &[0, 1]);
        assert_eq!(m.row(1), &[0]);
        assert_eq!(m.item_major(), vec![vec![0, 1], vec![0]]);
        assert_eq!(m.item_counts(), vec![2, 1]);
    }

    #[test]
    fn empty_build() {
        let m = InteractionMatrix::from_pairs::<&str, &str>(&[]).unwrap();
        assert_eq!((m.n_users(), m.n_items(), m.interaction_count()), (0, 0, 0));
        assert!(matches!(sparsity(&m), Err(Error::UndefinedSparsity { .. })));
    }

    #[test]
    fn duplicate_pair_rejected() {
        let err = InteractionMatrix::from_pairs(&[("a", "x"), ("b", "x"), ("a", "x")]).unwrap_err();
        assert!(matches!(err, Error::DuplicateInteraction { ref user, ref item } if user == "a" && item == "x"));
    }

    #[test]
    fn first_appearance_order() {
        let m = InteractionMatrix::from_pairs(&[("b", "z"), ("a", "y"), ("b", "y")]).unwrap();
        assert_eq!(m.user_map().ids(), &["b", "a"]);
        assert_eq!(m.item_map().ids(), &["z", "y"]);
        assert_eq!(m.row(0), &[0, 1]);
    }

    #[test]
    fn sparsity_table_rows() {
        let s = sparsity_from_counts(6039, 3628, 836_478).unwrap();
        assert!((s - 0.9618).abs() < 1e-4, "{s}");
        let s = sparsity_from_counts(122_293, 150, 3_587_186).unwrap();
        assert!((s - 0.8044).abs() < 1e-4, "{s}");
        let s = sparsity_from_counts(1492, 1881, 28_579).unwrap();
        assert!((s - 0.9898).abs() < 1e-4, "{s}");
        let m = InteractionMatrix::from_pairs(&[("u", "i")]).unwrap();
        assert_eq!(sparsity(&m).unwrap(), 0.0);
    }

    #[test]
    fn from_indexed_out_of_range() {
        let users = Arc::new(IdMap::from_ids(["a"], "user").unwrap());
        let items = Arc::new(IdMap::from_ids(["x"], "item").unwrap());
        assert!(InteractionMatrix::from_indexed(users, items, [(0, 1)]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_and_bijection(pairs in proptest::collection::btree_set((0u8..12, 0u8..12), 0..60)) {
            let records: Vec<(String, String)> =
                pairs.iter().map(|(u, i)| (format!("u{u}"), format!("i{i}"))).collect();
            let m = InteractionMatrix::from_pairs(&records).unwrap();
            let back: BTreeSet<(String, String)> = m.to_pairs().into_iter().collect();
            let want: BTreeSet<(String, String)> = records.iter().cloned().collect();
            prop_assert_eq!(back, want);
            for map in [m.user_map(), m.item_map()] {
                for (k, id) in map.ids().iter().enumerate() {
                    prop_assert_eq!(map.index_of(id), Some(k));
                }
            }
            for u in 0..m.n_users() {
                prop_assert!(m.row(u).windows(2).all(|w| w[0] < w[1]));
            }
            if m.interaction_count() > 0 {
                let s = sparsity(&m).unwrap();
                prop_assert!((0.0..1.0).contains(&s));
            }
        }
    }
}
