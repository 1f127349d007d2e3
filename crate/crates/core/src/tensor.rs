//! Small dense n-dimensional arrays.

use std::ops::{Index, IndexMut};

use crate::taylor::Taylor;

#[derive(Debug, Clone, PartialEq)]
pub struct Arr<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

impl<T> Arr<T> {
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> T) -> Arr<T> {
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..len {
            data.push(f(&idx));
            for d in (0..shape.len()).rev() {
                idx[d] += 1;
                if idx[d] < shape[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        Arr {
            shape: shape.to_vec(),
            data,
        }
    }

    pub fn try_from_fn<E>(
        shape: &[usize],
        mut f: impl FnMut(&[usize]) -> Result<T, E>,
    ) -> Result<Arr<T>, E> {
        let mut err = None;
        let a = Arr::from_fn(shape, |i| {
            if err.is_some() {
                return None;
            }
            match f(i) {
                Ok(v) => Some(v),
                Err(e) => {
                    err = Some(e);
                    None
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(Arr {
                shape: a.shape,
                data: a.data.into_iter().map(|v| v.expect("filled")).collect(),
            }),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut off = 0;
        for (i, (&k, &s)) in idx.iter().zip(&self.shape).enumerate() {
            debug_assert!(k < s, "index {idx:?} out of shape {:?} at axis {i}", self.shape);
            off = off * s + k;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.data[self.offset(idx)]
    }

    pub fn get_mut(&mut self, idx: &[usize]) -> &mut T {
        let o = self.offset(idx);
        &mut self.data[o]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Arr<U> {
        Arr {
            shape: self.shape.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> Arr<T> {
    pub fn filled(shape: &[usize], v: T) -> Arr<T> {
        Arr {
            shape: shape.to_vec(),
            data: vec![v; shape.iter().product()],
        }
    }
}

impl<T, const N: usize> Index<[usize; N]> for Arr<T> {
    type Output = T;
    fn index(&self, idx: [usize; N]) -> &T {
        self.get(&idx)
    }
}

impl<T, const N: usize> IndexMut<[usize; N]> for Arr<T> {
    fn index_mut(&mut self, idx: [usize; N]) -> &mut T {
        self.get_mut(&idx)
    }
}

impl Arr<f64> {
    pub fn zeros(shape: &[usize]) -> Arr<f64> {
        Arr::filled(shape, 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Arr<f64>) -> f64 {
        assert_eq!(self.shape, other.shape);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl Arr<Taylor> {
    pub fn values(&self) -> Arr<f64> {
        self.map(|t| t.value())
    }

    /// Partial derivatives as an array with a leading derivative axis.
    pub fn derivatives(&self) -> Arr<f64> {
        let m = self.data.first().map(|t| t.nvars()).unwrap_or(0);
        let mut shape = vec![m];
        shape.extend_from_slice(&self.shape);
        let grads: Vec<Vec<f64>> = self.data.iter().map(|t| t.gradient()).collect();
        let inner = self.data.len();
        Arr {
            shape,
            data: (0..m * inner).map(|k| grads[k % inner][k / inner]).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Arr<Taylor> {
        self.map(|t| t.truncate(order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_indexing() {
        let a = Arr::from_fn(&[2, 3], |i| (10 * i[0] + i[1]) as f64);
        assert_eq!(a[[1, 2]], 12.0);
        assert_eq!(a.data()[5], 12.0);
    }

    #[test]
    fn try_from_fn_stops_on_error() {
        let ok: Result<Arr<usize>, ()> = Arr::try_from_fn(&[2, 2], |i| Ok(i[0] + i[1]));
        assert_eq!(ok.unwrap()[[1, 1]], 2);
        let bad: Result<Arr<usize>, &str> =
            Arr::try_from_fn(&[2, 2], |i| if i[1] == 1 { Err("no") } else { Ok(0) });
        assert_eq!(bad.unwrap_err(), "no");
    }

    #[test]
    fn derivative_axis_leads() {
        let v = Taylor::variables(&[1.0, 2.0], 1);
        let a = Arr::from_fn(&[2], |i| v[i[0]].scale(3.0));
        let d = a.derivatives();
        assert_eq!(d.shape(), &[2, 2]);
        assert_eq!(d[[0, 0]], 3.0);
        assert_eq!(d[[1, 0]], 0.0);
        assert_eq!(d[[1, 1]], 3.0);
    }
}
