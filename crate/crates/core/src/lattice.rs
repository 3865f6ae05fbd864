//! Periodic d-dimensional lattices (rings and tori).
//!
//! Vertices are flattened row-major with axis 0 varying slowest, so on a
//! 2D torus `(x, y)` maps to `x * side + y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side length and dimension of a periodic lattice with `side^dim` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    dim: usize,
    side: usize,
    n_vertices: usize,
}

/// Sign of a step along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A coin basis direction: an edge along one axis, or the self-loop.
///
/// Coin indices are `2 * axis` for `+`, `2 * axis + 1` for `-`, and `2 * dim`
/// for the self-loop when one is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Edge { axis: usize, sign: Sign },
    SelfLoop,
}

impl Direction {
    pub fn plus(axis: usize) -> Self {
        Direction::Edge { axis, sign: Sign::Plus }
    }

    pub fn minus(axis: usize) -> Self {
        Direction::Edge { axis, sign: Sign::Minus }
    }

    pub fn coin_index(self, dim: usize) -> usize {
        match self {
            Direction::Edge { axis, sign: Sign::Plus } => 2 * axis,
            Direction::Edge { axis, sign: Sign::Minus } => 2 * axis + 1,
            Direction::SelfLoop => 2 * dim,
        }
    }

    pub fn from_coin_index(index: usize, dim: usize, self_loop: bool) -> Option<Self> {
        if index < 2 * dim {
            let axis = index / 2;
            Some(if index.is_multiple_of(2) {
                Direction::plus(axis)
            } else {
                Direction::minus(axis)
            })
        } else if self_loop && index == 2 * dim {
            Some(Direction::SelfLoop)
        } else {
            None
        }
    }

    /// All `2d` (or `2d + 1` with the self-loop) directions in coin-index order.
    pub fn all(dim: usize, self_loop: bool) -> Vec<Direction> {
        let count = 2 * dim + usize::from(self_loop);
        (0..count)
            .filter_map(|i| Direction::from_coin_index(i, dim, self_loop))
            .collect()
    }

    /// The label the flip-flop shift assigns after moving along `self`.
    pub fn reversed(self) -> Self {
        match self {
            Direction::Edge { axis, sign } => Direction::Edge {
                axis,
                sign: sign.flipped(),
            },
            Direction::SelfLoop => Direction::SelfLoop,
        }
    }
}

impl Geometry {
    pub fn new(dim: usize, side: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidGeometry(format!("dimension must be >= 1, got {dim}")));
        }
        if side < 2 {
            return Err(Error::InvalidGeometry(format!("side must be >= 2, got {side}")));
        }
        let n_vertices = u32::try_from(dim)
            .ok()
            .and_then(|d| side.checked_pow(d))
            .ok_or_else(|| {
                Error::InvalidGeometry(format!("{side}^{dim} vertices overflows the index type"))
            })?;
        Ok(Geometry {
            dim,
            side,
            n_vertices,
        })
    }

    pub fn ring(n: usize) -> Result<Self> {
        Geometry::new(1, n)
    }

    pub fn torus(side: usize) -> Result<Self> {
        Geometry::new(2, side)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Number of edge directions at every vertex, `2d`.
    pub fn degree(&self) -> usize {
        2 * self.dim
    }

    /// Index distance between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        debug_assert!(axis < self.dim);
        self.side.pow((self.dim - 1 - axis) as u32)
    }

    pub fn vertex_index(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.dim {
            return Err(Error::CoordinateArity {
                expected: self.dim,
                got: coords.len(),
            });
        }
        let mut index = 0;
        for (axis, &c) in coords.iter().enumerate() {
            if c >= self.side {
                return Err(Error::CoordinateOutOfRange {
                    axis,
                    value: c,
                    side: self.side,
                });
            }
            index = index * self.side + c;
        }
        Ok(index)
    }

    pub fn vertex_coords(&self, v: usize) -> Result<Vec<usize>> {
        if v >= self.n_vertices {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} outside [0, {})",
                self.n_vertices
            )));
        }
        let mut coords = vec![0; self.dim];
        let mut rest = v;
        for c in coords.iter_mut().rev() {
            *c = rest % self.side;
            rest /= self.side;
        }
        Ok(coords)
    }

    /// Vertex reached from `v` by one step along `dir`, with periodic wrap.
    pub fn neighbor(&self, v: usize, dir: Direction) -> usize {
        debug_assert!(v < self.n_vertices);
        match dir {
            Direction::SelfLoop => v,
            Direction::Edge { axis, sign } => {
                let stride = self.stride(axis);
                let c = (v / stride) % self.side;
                match sign {
                    Sign::Plus if c + 1 == self.side => v - c * stride,
                    Sign::Plus => v + stride,
                    Sign::Minus if c == 0 => v + (self.side - 1) * stride,
                    Sign::Minus => v - stride,
                }
            }
        }
    }

    /// `neighbor(v, dir)` for every vertex `v`.
    pub fn neighbor_table(&self, dir: Direction) -> Vec<usize> {
        (0..self.n_vertices).map(|v| self.neighbor(v, dir)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vertex_counts() {
        assert_eq!(Geometry::new(1, 200).unwrap().n_vertices(), 200);
        assert_eq!(Geometry::new(2, 70).unwrap().n_vertices(), 4900);
        assert_eq!(Geometry::new(3, 4).unwrap().n_vertices(), 64);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Geometry::new(2, 1).is_err());
        assert!(Geometry::new(0, 10).is_err());
        assert!(Geometry::new(64, 1 << 20).is_err());
    }

    #[test]
    fn row_major_index() {
        let g = Geometry::new(2, 10).unwrap();
        assert_eq!(g.vertex_index(&[3, 7]).unwrap(), 37);
        assert_eq!(Geometry::ring(8).unwrap().vertex_index(&[5]).unwrap(), 5);
        assert!(g.vertex_index(&[10, 0]).is_err());
        assert!(g.vertex_index(&[1]).is_err());
    }

    #[test]
    fn periodic_wrap() {
        let ring = Geometry::ring(5).unwrap();
        assert_eq!(ring.neighbor(4, Direction::plus(0)), 0);
        assert_eq!(ring.neighbor(0, Direction::minus(0)), 4);

        let t = Geometry::torus(10).unwrap();
        let origin = t.vertex_index(&[0, 0]).unwrap();
        let n = t.neighbor(origin, Direction::minus(0));
        assert_eq!(t.vertex_coords(n).unwrap(), vec![9, 0]);
        let n = t.neighbor(origin, Direction::minus(1));
        assert_eq!(t.vertex_coords(n).unwrap(), vec![0, 9]);
        assert_eq!(t.neighbor(37, Direction::SelfLoop), 37);
    }

    #[test]
    fn direction_counts() {
        assert_eq!(Direction::all(2, true).len(), 5);
        assert_eq!(Direction::all(2, false).len(), 4);
        for (i, d) in Direction::all(3, true).into_iter().enumerate() {
            assert_eq!(d.coin_index(3), i);
        }
        assert_eq!(Direction::from_coin_index(4, 2, false), None);
    }

    fn geometry() -> impl Strategy<Value = Geometry> {
        (1usize..=3, 2usize..=9).prop_map(|(d, s)| Geometry::new(d, s).unwrap())
    }

    proptest! {
        #[test]
        fn coords_round_trip(g in geometry(), seed in any::<usize>()) {
            let v = seed % g.n_vertices();
            let c = g.vertex_coords(v).unwrap();
            prop_assert_eq!(g.vertex_index(&c).unwrap(), v);
        }

        #[test]
        fn opposite_steps_cancel(g in geometry(), seed in any::<usize>(), axis_seed in any::<usize>()) {
            let v = seed % g.n_vertices();
            let axis = axis_seed % g.dim();
            let there = g.neighbor(v, Direction::plus(axis));
            prop_assert_eq!(g.neighbor(there, Direction::minus(axis)), v);
        }

        #[test]
        fn neighbor_maps_are_permutations(g in geometry()) {
            for dir in Direction::all(g.dim(), true) {
                let mut seen = vec![false; g.n_vertices()];
                for w in g.neighbor_table(dir) {
                    prop_assert!(!seen[w]);
                    seen[w] = true;
                }
            }
        }
    }
}
