//! Real scalar fields on the plane with analytic gradients.

use crate::domain::Point;

pub trait Field: Send + Sync {
    fn value(&self, x: Point) -> f64;

    fn gradient(&self, x: Point) -> [f64; 2];
}

/// A field backed by plain function pointers.
#[derive(Clone, Copy)]
pub struct FnField {
    pub value: fn(Point) -> f64,
    pub gradient: fn(Point) -> [f64; 2],
}

impl Field for FnField {
    fn value(&self, x: Point) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: Point) -> [f64; 2] {
        (self.gradient)(x)
    }
}

impl core::fmt::Debug for FnField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("FnField")
    }
}

/// A constant field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl Field for Constant {
    fn value(&self, _: Point) -> f64 {
        self.0
    }

    fn gradient(&self, _: Point) -> [f64; 2] {
        [0.0, 0.0]
    }
}

pub const ZERO: Constant = Constant(0.0);

impl<F: Field + ?Sized> Field for &F {
    fn value(&self, x: Point) -> f64 {
        (**self).value(x)
    }

    fn gradient(&self, x: Point) -> [f64; 2] {
        (**self).gradient(x)
    }
}

impl<F: Field + ?Sized> Field for alloc::boxed::Box<F> {
    fn value(&self, x: Point) -> f64 {
        (**self).value(x)
    }

    fn gradient(&self, x: Point) -> [f64; 2] {
        (**self).gradient(x)
    }
}

impl<F: Field + ?Sized> Field for alloc::sync::Arc<F> {
    fn value(&self, x: Point) -> f64 {
        (**self).value(x)
    }

    fn gradient(&self, x: Point) -> [f64; 2] {
        (**self).gradient(x)
    }
}
