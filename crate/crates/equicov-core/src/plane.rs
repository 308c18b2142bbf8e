//! Planar primitives: points and the disk/rectangle shapes used both as
//! observation windows and as void-probability test regions.

use rand::Rng;

use crate::error::{Error, Result};

/// A point in the plane, coordinates in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn scaled(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// A compact planar set: an observation window or a test region.
///
/// Membership is closed (boundary points belong to the shape).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Disk { center: Point, radius: f64 },
    Rect { min: Point, max: Point },
}

impl Shape {
    pub fn disk(center: Point, radius: f64) -> Result<Shape> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!(
                "disk radius must be finite and positive, got {radius}"
            )));
        }
        Ok(Shape::Disk { center, radius })
    }

    pub fn rect(min: Point, max: Point) -> Result<Shape> {
        let finite = min.x.is_finite() && min.y.is_finite() && max.x.is_finite() && max.y.is_finite();
        if !finite || max.x <= min.x || max.y <= min.y {
            return Err(Error::invalid(format!(
                "rectangle must have positive extent, got min=({},{}) max=({},{})",
                min.x, min.y, max.x, max.y
            )));
        }
        Ok(Shape::Rect { min, max })
    }

    /// Unit square `[0,1]²`.
    pub fn unit_square() -> Shape {
        Shape::Rect {
            min: Point::ORIGIN,
            max: Point::new(1.0, 1.0),
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Shape::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
            Shape::Rect { min, max } => (max.x - min.x) * (max.y - min.y),
        }
    }

    pub fn center(&self) -> Point {
        match *self {
            Shape::Disk { center, .. } => center,
            Shape::Rect { min, max } => Point::new(0.5 * (min.x + max.x), 0.5 * (min.y + max.y)),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Shape::Disk { center, radius } => p.dist(center) <= radius,
            Shape::Rect { min, max } => {
                p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y
            }
        }
    }

    /// Whether `inner` lies entirely within `self`.
    pub fn contains_shape(&self, inner: &Shape) -> bool {
        match (*self, *inner) {
            (Shape::Disk { center: c, radius: r }, Shape::Disk { center: ci, radius: ri }) => {
                ci.dist(c) + ri <= r
            }
            (Shape::Rect { min, max }, Shape::Rect { min: mi, max: ma }) => {
                mi.x >= min.x && mi.y >= min.y && ma.x <= max.x && ma.y <= max.y
            }
            (Shape::Disk { center, radius }, Shape::Rect { min, max }) => {
                let corners = [
                    Point::new(min.x, min.y),
                    Point::new(min.x, max.y),
                    Point::new(max.x, min.y),
                    Point::new(max.x, max.y),
                ];
                corners.iter().all(|p| p.dist(center) <= radius)
            }
            (Shape::Rect { min, max }, Shape::Disk { center, radius }) => {
                center.x - radius >= min.x
                    && center.x + radius <= max.x
                    && center.y - radius >= min.y
                    && center.y + radius <= max.y
            }
        }
    }

    /// Expand outward by `margin` on every side.
    pub fn dilated(&self, margin: f64) -> Shape {
        match *self {
            Shape::Disk { center, radius } => Shape::Disk {
                center,
                radius: radius + margin,
            },
            Shape::Rect { min, max } => Shape::Rect {
                min: Point::new(min.x - margin, min.y - margin),
                max: Point::new(max.x + margin, max.y + margin),
            },
        }
    }

    /// Scale about the origin by `k > 0`.
    pub fn scaled(&self, k: f64) -> Shape {
        match *self {
            Shape::Disk { center, radius } => Shape::Disk {
                center: center.scaled(k),
                radius: radius * k,
            },
            Shape::Rect { min, max } => Shape::Rect {
                min: min.scaled(k),
                max: max.scaled(k),
            },
        }
    }

    /// Shrink about the shape's own center; `factor` in (0, 1].
    pub fn shrunk_about_center(&self, factor: f64) -> Shape {
        match *self {
            Shape::Disk { center, radius } => Shape::Disk {
                center,
                radius: radius * factor,
            },
            Shape::Rect { min, max } => {
                let c = self.center();
                Shape::Rect {
                    min: c + (min - c).scaled(factor),
                    max: c + (max - c).scaled(factor),
                }
            }
        }
    }

    /// Smallest distance from the center to the boundary.
    pub fn min_half_extent(&self) -> f64 {
        match *self {
            Shape::Disk { radius, .. } => radius,
            Shape::Rect { min, max } => 0.5 * (max.x - min.x).min(max.y - min.y),
        }
    }

    /// Draw a uniform point. Disks use the polar transform, so every draw
    /// consumes exactly two uniforms.
    pub fn sample_uniform(&self, rng: &mut impl Rng) -> Point {
        match *self {
            Shape::Disk { center, radius } => {
                let r = radius * rng.random::<f64>().sqrt();
                let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                Point::new(center.x + r * theta.cos(), center.y + r * theta.sin())
            }
            Shape::Rect { min, max } => Point::new(
                min.x + rng.random::<f64>() * (max.x - min.x),
                min.y + rng.random::<f64>() * (max.y - min.y),
            ),
        }
    }

    /// Key/value description used in CSV metadata blocks.
    pub fn metadata(&self) -> Vec<(String, String)> {
        match *self {
            Shape::Disk { center, radius } => vec![
                ("window_kind".into(), "disk".into()),
                ("window_center_x_m".into(), format!("{}", center.x)),
                ("window_center_y_m".into(), format!("{}", center.y)),
                ("window_radius_m".into(), format!("{radius}")),
            ],
            Shape::Rect { min, max } => vec![
                ("window_kind".into(), "rect".into()),
                ("window_min_x_m".into(), format!("{}", min.x)),
                ("window_min_y_m".into(), format!("{}", min.y)),
                ("window_max_x_m".into(), format!("{}", max.x)),
                ("window_max_y_m".into(), format!("{}", max.y)),
            ],
        }
    }
}
