use super::{EdgeId, Path, PathSet};

/// A maximal run of consecutive edges shared by two paths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OverlapSegment {
    pub edges: Vec<EdgeId>,
    /// Ids of the two paths, in the order they were compared.
    pub paths: (usize, usize),
}

impl OverlapSegment {
    pub fn first(&self) -> EdgeId {
        self.edges[0]
    }

    pub fn last(&self) -> EdgeId {
        *self.edges.last().expect("segments are nonempty")
    }
}

/// All maximal shared runs of `p1` and `p2`, ordered along `p1`.
///
/// In a DAG, two edges that are consecutive on `p1` and both lie on `p2` are
/// consecutive on `p2` as well, so runs along `p1` are runs along `p2`.
pub fn overlap_segments(p1: &Path, p2: &Path) -> Vec<OverlapSegment> {
    let mut out = Vec::new();
    let mut current: Vec<EdgeId> = Vec::new();
    for &e in &p1.edges {
        if p2.contains(e) {
            current.push(e);
        } else if !current.is_empty() {
            out.push(OverlapSegment {
                edges: std::mem::take(&mut current),
                paths: (p1.id, p2.id),
            });
        }
    }
    if !current.is_empty() {
        out.push(OverlapSegment {
            edges: current,
            paths: (p1.id, p2.id),
        });
    }
    out
}

/// Every overlap segment of `p` with any path in `others`, ordered along `p`.
pub fn segments_along(p: &Path, others: &PathSet) -> Vec<OverlapSegment> {
    let mut all: Vec<OverlapSegment> = others.iter().flat_map(|q| overlap_segments(p, q)).collect();
    all.sort_by_key(|s| p.position(s.first()).expect("segment lies on p"));
    all
}

/// The overlap segment of `p` with `others` whose last edge comes latest on
/// `p`.
pub fn last_overlap_segment(p: &Path, others: &PathSet) -> Option<OverlapSegment> {
    others
        .iter()
        .flat_map(|q| overlap_segments(p, q))
        .max_by_key(|s| p.position(s.last()).expect("segment lies on p"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_and_identical_paths() {
        let a = Path::new(0, vec![1, 2, 3]);
        let b = Path::new(1, vec![4, 5]);
        assert!(overlap_segments(&a, &b).is_empty());
        let same = overlap_segments(&a, &Path::new(2, vec![1, 2, 3]));
        assert_eq!(same.len(), 1);
        assert_eq!(same[0].edges, vec![1, 2, 3]);
        assert_eq!(same[0].paths, (0, 2));
    }

    #[test]
    fn two_separated_runs() {
        let a = Path::new(0, vec![1, 2, 3, 4, 5, 6]);
        let b = Path::new(1, vec![9, 2, 3, 10, 5, 11]);
        let segs = overlap_segments(&a, &b);
        assert_eq!(
            segs.iter().map(|s| s.edges.clone()).collect::<Vec<_>>(),
            vec![vec![2, 3], vec![5]]
        );
    }

    #[test]
    fn last_segment_is_topologically_last() {
        let p = Path::new(0, vec![1, 2, 3, 4, 5, 6, 7]);
        let others = PathSet::new(vec![
            Path::new(1, vec![20, 2, 21]),
            Path::new(2, vec![22, 6, 23]),
            Path::new(3, vec![24, 4, 25]),
        ]);
        let last = last_overlap_segment(&p, &others).unwrap();
        assert_eq!(last.edges, vec![6]);
        assert_eq!(last.paths, (0, 2));
        assert_eq!(segments_along(&p, &others).len(), 3);
        assert!(last_overlap_segment(&p, &PathSet::default()).is_none());
    }
}
