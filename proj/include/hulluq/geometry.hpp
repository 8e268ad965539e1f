#pragma once

#include <span>
#include <vector>

namespace hulluq {

/// A response embedding projected to the 2D PCA plane.
struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D& a, const Point2D& b) {
    return a.x == b.x && a.y == b.y;
  }
};

/// Convex hull of a point set: vertices in counter-clockwise order with
/// collinear interior points dropped, plus the enclosed (shoelace) area.
/// Degenerate hulls (point, segment) keep only the extreme points and
/// have area 0.
struct HullPolygon {
  std::vector<Point2D> vertices;
  double area = 0.0;
};

/// Shoelace area of a counter-clockwise vertex ring. Fewer than 3
/// vertices is the degenerate-hull convention and yields 0.
double polygon_area(std::span<const Point2D> vertices);
double polygon_area(const HullPolygon& polygon);

/// Andrew's monotone chain. Throws std::invalid_argument on an empty
/// input ("empty point set") or any NaN/Inf coordinate ("non-finite
/// coordinate"). Collinear inputs collapse to the two extreme points.
HullPolygon convex_hull(std::span<const Point2D> points);

}  // namespace hulluq
