//! Ordered finite sample spaces of fixed-width bit vectors.

use crate::error::{Error, Result};

/// Either every bit vector of a width, in counting order, or an explicit
/// ordered subset of them. The first variable is the most significant bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    width: usize,
    points: Option<Vec<u64>>,
}

impl Space {
    pub fn full(width: usize) -> Self {
        assert!(width < 64, "space width {width} too large");
        Space { width, points: None }
    }

    /// Explicit points; must be distinct and fit in `width` bits.
    pub fn subset(width: usize, points: Vec<u64>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &p in &points {
            if width < 64 && p >> width != 0 {
                return Err(Error::PointNotInSpace(format!("{p:#b}")));
            }
            if !seen.insert(p) {
                return Err(Error::DimensionMismatch(format!("duplicate point {}", bits_to_string(p, width))));
            }
        }
        Ok(Space { width, points: Some(points) })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        match &self.points {
            Some(p) => p.len(),
            None => 1usize << self.width,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_full(&self) -> bool {
        self.points.is_none()
    }

    pub fn code(&self, index: usize) -> u64 {
        match &self.points {
            Some(p) => p[index],
            None => index as u64,
        }
    }

    pub fn index_of(&self, code: u64) -> Option<usize> {
        match &self.points {
            Some(p) => p.iter().position(|&c| c == code),
            None => ((code >> self.width) == 0).then_some(code as usize),
        }
    }

    pub fn codes(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len()).map(move |i| self.code(i))
    }

    pub fn label(&self, index: usize) -> String {
        bits_to_string(self.code(index), self.width)
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    /// Pairs `(a, b)` ordered with `a` major, codes concatenated `a ++ b`.
    pub fn product(a: &Space, b: &Space) -> Self {
        let width = a.width + b.width;
        if a.is_full() && b.is_full() {
            return Space::full(width);
        }
        let mut points = Vec::with_capacity(a.len() * b.len());
        for x in a.codes() {
            for y in b.codes() {
                points.push(x << b.width | y);
            }
        }
        Space { width, points: Some(points) }
    }
}

pub fn bits_to_string(code: u64, width: usize) -> String {
    (0..width)
        .map(|i| if code >> (width - 1 - i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bits(text: &str, width: usize) -> Result<u64> {
    if text.len() != width {
        return Err(Error::WidthMismatch { expected: width, got: text.len() });
    }
    text.chars().try_fold(0u64, |acc, c| match c {
        '0' | 'F' | 'f' => Ok(acc << 1),
        '1' | 'T' | 't' => Ok(acc << 1 | 1),
        _ => Err(Error::PointNotInSpace(text.to_string())),
    })
}
