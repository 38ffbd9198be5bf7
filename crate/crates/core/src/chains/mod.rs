//! Longest chains: the patience-sorting engine, the band order through its
//! linear embedding, a quadratic oracle, optimal supports, and the process
//! augmented with sources and sinks.

mod boundary;

pub use boundary::{
    boundary_increment_sinks, boundary_increment_sources, crossing_check, crossing_margins,
    hammersley_lines, length_with_boundary, z_statistic, BoundaryChainResult, HammersleyLine,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{order_embedding, ConvexPolygon, PlanarPoint, SlopeBand};
use crate::sampler::PointCloud;

/// Largest input accepted by [`longest_chain_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 5000;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainResult {
    pub length: usize,
    pub path: Vec<PlanarPoint>,
}

/// Patience sorting for the longest nondecreasing subsequence.
///
/// Each new value replaces the leftmost pile top strictly greater than it,
/// so equal values stack onto the same chain. `pred[i]` is the top of the
/// pile to the left at insertion time.
struct Patience {
    tops: Vec<f64>,
    top_idx: Vec<u32>,
}

impl Patience {
    fn new() -> Self {
        Self {
            tops: Vec::new(),
            top_idx: Vec::new(),
        }
    }

    /// Returns the 0-based pile index the value landed on.
    #[inline]
    fn push(&mut self, idx: u32, y: f64) -> usize {
        let k = self.tops.partition_point(|&t| t <= y);
        if k == self.tops.len() {
            self.tops.push(y);
            self.top_idx.push(idx);
        } else {
            self.tops[k] = y;
            self.top_idx[k] = idx;
        }
        k
    }

    #[inline]
    fn pred_of(&self, pile: usize) -> u32 {
        if pile == 0 {
            NONE
        } else {
            self.top_idx[pile - 1]
        }
    }

    fn len(&self) -> usize {
        self.tops.len()
    }
}

/// Length of the longest nondecreasing subsequence and the indices of one.
pub(crate) fn lnds_path(ys: impl ExactSizeIterator<Item = f64>) -> (usize, Vec<usize>) {
    let n = ys.len();
    assert!(n < NONE as usize, "too many points for 32-bit indices");
    let mut piles = Patience::new();
    let mut pred = vec![NONE; n];
    for (i, y) in ys.enumerate() {
        let k = piles.push(i as u32, y);
        pred[i] = piles.pred_of(k);
    }
    let len = piles.len();
    let mut path = Vec::with_capacity(len);
    let mut cur = piles.top_idx.last().copied().unwrap_or(NONE);
    while cur != NONE {
        path.push(cur as usize);
        cur = pred[cur as usize];
    }
    path.reverse();
    (len, path)
}

/// Length of the longest nondecreasing subsequence ending at each element.
pub(crate) fn lnds_lengths(ys: impl Iterator<Item = f64>) -> Vec<u32> {
    let mut tops: Vec<f64> = Vec::new();
    ys.map(|y| {
        let k = tops.partition_point(|&t| t <= y);
        if k == tops.len() {
            tops.push(y);
        } else {
            tops[k] = y;
        }
        k as u32 + 1
    })
    .collect()
}

/// Indices of `sorted` lying on at least one longest chain.
pub(crate) fn support_indices(sorted: &[PlanarPoint]) -> (usize, Vec<usize>) {
    let ending = lnds_lengths(sorted.iter().map(|p| p.y));
    let mut starting = lnds_lengths(sorted.iter().rev().map(|p| -p.y));
    starting.reverse();
    let best = ending.iter().copied().max().unwrap_or(0);
    let idx = (0..sorted.len())
        .filter(|&i| ending[i] + starting[i] - 1 == best)
        .collect();
    (best as usize, idx)
}

/// Longest chain under coordinatewise (non-strict) dominance.
pub fn longest_chain_standard(cloud: &PointCloud) -> ChainResult {
    debug_assert!(cloud.points.windows(2).all(|w| w[0].lex_cmp(&w[1]).is_le()));
    let (length, idx) = lnds_path(cloud.points.iter().map(|p| p.y));
    ChainResult {
        length,
        path: idx.into_iter().map(|i| cloud.points[i]).collect(),
    }
}

/// Length only; skips predecessor bookkeeping.
pub fn longest_chain_length(points: &[PlanarPoint]) -> usize {
    lnds_length(points.iter().map(|p| p.y))
}

pub(crate) fn lnds_length(ys: impl Iterator<Item = f64>) -> usize {
    let mut tops: Vec<f64> = Vec::new();
    for y in ys {
        let k = tops.partition_point(|&t| t <= y);
        if k == tops.len() {
            tops.push(y);
        } else {
            tops[k] = y;
        }
    }
    tops.len()
}

/// Points mapped by the band's embedding, sorted, with their original index.
fn embedded(points: &[PlanarPoint], band: SlopeBand) -> Vec<(PlanarPoint, u32)> {
    let m = order_embedding(band);
    let mut v: Vec<(PlanarPoint, u32)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (m.apply(*p), i as u32))
        .collect();
    v.sort_unstable_by(|a, b| a.0.lex_cmp(&b.0));
    v
}

/// Longest chain under the slope-band order. The path is reported in the
/// original coordinates.
pub fn longest_chain_lipschitz(cloud: &PointCloud, band: SlopeBand) -> ChainResult {
    if band.is_classical() {
        return longest_chain_standard(cloud);
    }
    let img = embedded(&cloud.points, band);
    let (length, idx) = lnds_path(img.iter().map(|(p, _)| p.y));
    ChainResult {
        length,
        path: idx
            .into_iter()
            .map(|k| cloud.points[img[k].1 as usize])
            .collect(),
    }
}

/// Points of the cloud lying on some longest band-order chain (original
/// coordinates, in embedded order).
pub fn optimal_support_lipschitz(cloud: &PointCloud, band: SlopeBand) -> Vec<PlanarPoint> {
    if band.is_classical() {
        return optimal_support(cloud);
    }
    let img = embedded(&cloud.points, band);
    let mapped: Vec<PlanarPoint> = img.iter().map(|(p, _)| *p).collect();
    let (_, idx) = support_indices(&mapped);
    idx.into_iter()
        .map(|k| cloud.points[img[k].1 as usize])
        .collect()
}

/// Quadratic DP over the comparator's DAG.
///
/// `order` must be compatible with the lexicographic `(x, y)` order: if
/// `order(p, q)` holds for distinct points then `p` sorts before `q`.
pub fn longest_chain_bruteforce<F>(points: &[PlanarPoint], order: F) -> Result<usize>
where
    F: Fn(&PlanarPoint, &PlanarPoint) -> bool,
{
    let n = points.len();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(PlanarPoint::lex_cmp);
    let mut best = vec![1usize; n];
    for j in 0..n {
        for i in 0..j {
            if best[i] + 1 > best[j] && order(&sorted[i], &sorted[j]) {
                best[j] = best[i] + 1;
            }
        }
    }
    Ok(best.into_iter().max().unwrap_or(0))
}

/// Longest dominance chain among the cloud points inside `poly`.
pub fn longest_chain_in_polygon(cloud: &PointCloud, poly: &ConvexPolygon) -> ChainResult {
    longest_chain_standard(&cloud.restrict_to_polygon(poly))
}

/// Every point on at least one longest dominance chain: those with
/// `len_ending_at + len_starting_at - 1 = L`.
pub fn optimal_support(cloud: &PointCloud) -> Vec<PlanarPoint> {
    let (_, idx) = support_indices(&cloud.points);
    idx.into_iter().map(|i| cloud.points[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::order_holds;

    fn five() -> PointCloud {
        PointCloud::from_points(
            [(0.1, 0.2), (0.2, 0.1), (0.3, 0.5), (0.5, 0.4), (0.6, 0.7)]
                .into_iter()
                .map(PlanarPoint::from)
                .collect(),
        )
    }

    fn is_chain(path: &[PlanarPoint], ord: impl Fn(&PlanarPoint, &PlanarPoint) -> bool) -> bool {
        path.windows(2).all(|w| ord(&w[0], &w[1]))
    }

    #[test]
    fn empty_and_single() {
        let empty = PointCloud::from_points(vec![]);
        assert_eq!(longest_chain_standard(&empty).length, 0);
        assert!(longest_chain_standard(&empty).path.is_empty());
        assert!(optimal_support(&empty).is_empty());
        assert_eq!(longest_chain_bruteforce(&[], |a, b| a.dominated_by(b)).unwrap(), 0);
        let one = [PlanarPoint::new(1.0, 1.0)];
        assert_eq!(longest_chain_bruteforce(&one, |a, b| a.dominated_by(b)).unwrap(), 1);
    }

    #[test]
    fn five_point_standard() {
        let c = five();
        let r = longest_chain_standard(&c);
        assert_eq!(r.length, 3);
        assert_eq!(r.path.len(), 3);
        assert!(is_chain(&r.path, |a, b| a.dominated_by(b)));
        let brute = longest_chain_bruteforce(&c.points, |a, b| a.dominated_by(b)).unwrap();
        assert_eq!(brute, 3);
    }

    #[test]
    fn five_point_lipschitz_unique_path() {
        let band = SlopeBand::new(0.5, 2.0).unwrap();
        let r = longest_chain_lipschitz(&five(), band);
        assert_eq!(r.length, 3);
        let expect: Vec<PlanarPoint> = [(0.1, 0.2), (0.3, 0.5), (0.6, 0.7)]
            .into_iter()
            .map(PlanarPoint::from)
            .collect();
        assert_eq!(r.path, expect);
        assert!(is_chain(&r.path, |a, b| order_holds(*a, *b, band)));
    }

    #[test]
    fn classical_band_routes_to_standard() {
        let c = five();
        assert_eq!(
            longest_chain_lipschitz(&c, SlopeBand::classical()),
            longest_chain_standard(&c)
        );
    }

    #[test]
    fn five_point_support() {
        let s = optimal_support(&five());
        let expect: Vec<PlanarPoint> = [(0.1, 0.2), (0.2, 0.1), (0.3, 0.5), (0.5, 0.4), (0.6, 0.7)]
            .into_iter()
            .map(PlanarPoint::from)
            .collect();
        // all five lie on some length-3 chain: 0.2/0.1 -> 0.3/0.5 or 0.5/0.4 -> 0.6/0.7
        assert_eq!(s, expect);
    }

    #[test]
    fn collinear_chain_support() {
        let c = PointCloud::from_points(vec![
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(1.0, 1.0),
            PlanarPoint::new(2.0, 2.0),
        ]);
        assert_eq!(optimal_support(&c).len(), 3);
    }

    #[test]
    fn ties_chain_non_strictly() {
        let c = PointCloud::from_points(vec![
            PlanarPoint::new(0.0, 1.0),
            PlanarPoint::new(0.0, 2.0),
            PlanarPoint::new(1.0, 0.0),
            PlanarPoint::new(2.0, 0.0),
            PlanarPoint::new(2.0, 2.0),
        ]);
        assert_eq!(longest_chain_standard(&c).length, 3);
        assert_eq!(
            longest_chain_bruteforce(&c.points, |a, b| a.dominated_by(b)).unwrap(),
            3
        );
    }

    #[test]
    fn bruteforce_size_limit() {
        let pts = vec![PlanarPoint::ORIGIN; BRUTEFORCE_LIMIT + 1];
        assert!(matches!(
            longest_chain_bruteforce(&pts, |a, b| a.dominated_by(b)),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn polygon_restriction() {
        let c = five();
        let far = ConvexPolygon::new(vec![
            PlanarPoint::new(10.0, 10.0),
            PlanarPoint::new(11.0, 10.0),
            PlanarPoint::new(11.0, 11.0),
        ])
        .unwrap();
        assert_eq!(longest_chain_in_polygon(&c, &far).length, 0);
        let bb = ConvexPolygon::from_rect(&crate::geometry::Rect::new(0.1, 0.6, 0.1, 0.7).unwrap()).unwrap();
        assert_eq!(longest_chain_in_polygon(&c, &bb), longest_chain_standard(&c));
    }
}
