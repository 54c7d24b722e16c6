//! Dense row-major 2-D storage shared by every image-like type.

use crate::error::{Error, Result};
use crate::par;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T> Grid<T> {
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::invalid("grid dimensions overflow"))?;
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "grid of {width}x{height} needs {expected} values, got {}",
                data.len()
            )));
        }
        Ok(Grid {
            width,
            height,
            data,
        })
    }

    /// Builds a grid by evaluating `f(x, y)` at every pixel. Evaluation may be
    /// parallel; placement is always row-major.
    pub fn from_fn<F>(width: usize, height: usize, f: F) -> Self
    where
        T: Send,
        F: Fn(usize, usize) -> T + Sync + Send,
    {
        let data = if width == 0 {
            Vec::new()
        } else {
            par::map_indices(width * height, |i| f(i % width, i / width))
        };
        Grid {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn same_shape<U>(&self, other: &Grid<U>) -> bool {
        self.width == other.width && self.height == other.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> &T {
        &self.data[y * self.width + x]
    }

    #[inline]
    pub fn get_mut(&mut self, x: usize, y: usize) -> &mut T {
        &mut self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: T) {
        self.data[y * self.width + x] = v;
    }

    /// Replicate-padded access: out-of-range coordinates clamp to the border.
    #[inline]
    pub fn clamped(&self, x: isize, y: isize) -> &T {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.get(cx, cy)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    pub fn map<U, F>(&self, f: F) -> Grid<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        Grid {
            width: self.width,
            height: self.height,
            data: par::map_slice(&self.data, f),
        }
    }

    /// Swaps axes.
    pub fn transpose(&self) -> Grid<T>
    where
        T: Clone + Send + Sync,
    {
        Grid::from_fn(self.height, self.width, |x, y| self.get(y, x).clone())
    }
}

impl<T: Clone> Grid<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Grid {
            width,
            height,
            data: vec![value; width * height],
        }
    }
}

impl Grid<f64> {
    /// Largest entry, or 0 for an empty grid.
    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(0.0_f64, f64::max)
    }
}
