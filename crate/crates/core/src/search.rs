//! Grid search over input distributions for the deterministic class.

use rayon::prelude::*;

use crate::det_class::{self, DetError, DetInput, InjectiveDetSpec};
use crate::geom::{hull_union, GeomError, Polygon2D, RateRegion2D};

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("grid step {0} must divide [0, 1] evenly")]
    Step(f64),
    #[error(transparent)]
    Det(#[from] DetError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Every pmf on `k` letters whose entries are multiples of `1 / n`, in
/// lexicographic order of the numerators.
pub fn simplex_grid(k: usize, n: usize) -> Vec<Vec<f64>> {
    fn fill(k: usize, left: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() + 1 == k {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / n as f64).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            fill(k, left - c, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        fill(k, n, n, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

pub struct DetSearch {
    pub hull: Polygon2D,
    pub polygons: Vec<Polygon2D>,
}

impl DetSearch {
    /// Whether every per-input polygon lies inside the hull.
    pub fn hull_contains_all(&self) -> bool {
        self.polygons.iter().all(|p| p.is_within(&self.hull))
    }
}

/// Union over product inputs `p(x1) p(x2)` on a grid of the given step.
/// Time sharing is accounted for by taking the convex hull.
pub fn det_grid_search(spec: &InjectiveDetSpec, step: f64) -> Result<DetSearch, SearchError> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(SearchError::Step(step));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 {
        return Err(SearchError::Step(step));
    }
    let n = n as usize;
    let g1 = simplex_grid(spec.x1_size, n);
    let g2 = simplex_grid(spec.x2_size, n);
    let pairs: Vec<(&Vec<f64>, &Vec<f64>)> = g1.iter().flat_map(|a| g2.iter().map(move |b| (a, b))).collect();
    let polygons = pairs
        .par_iter()
        .map(|(a, b)| {
            let input = DetInput::product((*a).clone(), (*b).clone())?;
            let region = RateRegion2D::new(det_class::theorem2_region(spec, &input)?)?;
            Ok(region.frontier())
        })
        .collect::<Result<Vec<_>, SearchError>>()?;
    Ok(DetSearch {
        hull: hull_union(&polygons)?,
        polygons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_grid_counts() {
        assert_eq!(simplex_grid(2, 4).len(), 5);
        assert_eq!(simplex_grid(3, 10).len(), 66);
        assert_eq!(simplex_grid(1, 3), vec![vec![1.0]]);
        assert!(simplex_grid(3, 4)
            .iter()
            .all(|p| (p.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn modulo2_hull() {
        let s = det_grid_search(&det_class::modulo2_example(1.0), 0.25).unwrap();
        assert_eq!(s.polygons.len(), 25);
        assert!(s.hull_contains_all());
        let (v, _) = s.hull.max_weighted(1.0, 1.0).unwrap();
        assert!(v <= 2.0 + 1e-9);
        assert!(matches!(
            det_grid_search(&det_class::modulo2_example(1.0), 0.3),
            Err(SearchError::Step(_))
        ));
    }
}
