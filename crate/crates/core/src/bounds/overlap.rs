//! Maximum covering multiplicity of the arcs `(x_j - π/2N, x_j + π/2N]`.

use std::cmp::Ordering;
use std::ops::{Add, Sub};

use num_rational::Ratio;

use crate::bounds::sigma;
use crate::error::{Error, Result};
use crate::trigpoly::NodeSet;

/// Largest number of half-open arcs `(c - half, c + half]` covering a single
/// point of the circle `(lo, hi]`, found by an endpoint sweep.
///
/// Requires `2 * half < hi - lo` and every center in `(lo, hi]`.
pub fn max_cover_count<T>(centers: &[T], half: T, lo: T, hi: T) -> usize
where
    T: Copy + PartialOrd + Add<Output = T> + Sub<Output = T>,
{
    let period = hi - lo;
    // (coordinate, +1 for an open start, -1 for a closed end)
    let mut events: Vec<(T, i32)> = Vec::with_capacity(centers.len() * 4);
    let mut push_arc = |a: T, b: T| {
        events.push((a, 1));
        events.push((b, -1));
    };
    for &c in centers {
        let a = c - half;
        let b = c + half;
        if a < lo {
            push_arc(a + period, hi);
            push_arc(lo, b);
        } else if b > hi {
            push_arc(a, hi);
            push_arc(lo, b - period);
        } else {
            push_arc(a, b);
        }
    }
    // At a shared coordinate the closing arc still covers it and the opening
    // one does not yet, so ends are processed first.
    events.sort_by(|x, y| {
        x.0.partial_cmp(&y.0)
            .unwrap_or(Ordering::Equal)
            .then(x.1.cmp(&y.1))
    });
    let mut count = 0i64;
    let mut best = 0i64;
    for (_, delta) in events {
        count += delta as i64;
        best = best.max(count);
    }
    best as usize
}

/// Covering multiplicity of the node arcs for degree `n`.
///
/// Exact when the nodes carry rational multiples of π. The result is checked
/// against σ(δ; N) and an [`Error::IdentityViolation`] is returned if it
/// exceeds it.
pub fn overlap_multiplicity(nodes: &NodeSet, n: u32) -> Result<u32> {
    if n == 0 {
        return Err(Error::Domain("degree N must be at least 1".into()));
    }
    let count = match nodes.pi_rational() {
        Some(rats) => {
            let half = Ratio::new(1, 2 * n as i64);
            max_cover_count(rats, half, Ratio::from_integer(-1), Ratio::from_integer(1))
        }
        None => {
            let half = std::f64::consts::PI / (2.0 * n as f64);
            let pi = std::f64::consts::PI;
            max_cover_count(nodes.points(), half, -pi, pi)
        }
    };
    let sig = sigma(&nodes.separation(), n)?;
    if count as u64 > sig {
        return Err(Error::IdentityViolation(format!(
            "{count} arcs overlap but sigma = {sig}"
        )));
    }
    Ok(count as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rationals(v: &[(i64, i64)]) -> NodeSet {
        NodeSet::from_pi_rationals(v.iter().map(|&(a, b)| Ratio::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn equispaced_arcs_tile() {
        let n = 6;
        let pts: Vec<_> = (0..2 * n).map(|j| (2 * j + 2 - 2 * n, 2 * n)).collect();
        let nodes = rationals(&pts);
        assert_eq!(overlap_multiplicity(&nodes, n as u32).unwrap(), 1);
    }

    #[test]
    fn close_pair_overlaps() {
        let n = 4;
        // δ = π/8 < π/N
        let nodes = rationals(&[(0, 1), (1, 8)]);
        assert_eq!(overlap_multiplicity(&nodes, n).unwrap(), 2);
    }

    #[test]
    fn arcs_wrap_across_pi() {
        let nodes = rationals(&[(-7, 8), (1, 1)]);
        // Distance across the wrap is π/8; arcs of half-width π/8 overlap.
        assert_eq!(overlap_multiplicity(&nodes, 4).unwrap(), 2);
        // Half-width π/16: arcs just touch and half-openness keeps them apart.
        assert_eq!(overlap_multiplicity(&nodes, 8).unwrap(), 1);
    }

    #[test]
    fn brute_force_agrees_with_sweep() {
        // Count coverage at every arc's right endpoint, where the maximum of
        // a union of half-open arcs is attained.
        let centers: Vec<Ratio<i64>> = [-9, -8, -3, 0, 1, 2, 7, 10]
            .iter()
            .map(|&k| Ratio::new(k, 10))
            .collect();
        let half = Ratio::new(3, 20);
        let one = Ratio::from_integer(1);
        let two = Ratio::from_integer(2);
        let covers = |c: Ratio<i64>, y: Ratio<i64>| {
            let mut d = y - c;
            while d <= -one {
                d += two;
            }
            while d > one {
                d -= two;
            }
            d > -half && d <= half
        };
        let brute = centers
            .iter()
            .map(|&c| {
                let mut y = c + half;
                if y > one {
                    y -= two;
                }
                centers.iter().filter(|&&o| covers(o, y)).count()
            })
            .max()
            .unwrap();
        assert_eq!(max_cover_count(&centers, half, -one, one), brute);
    }
}
