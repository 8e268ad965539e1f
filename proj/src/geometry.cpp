#include "hulluq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hulluq {

namespace {

// Cross product of (b-a) x (c-a); > 0 means c is left of a->b.
double cross(const Point2D& a, const Point2D& b, const Point2D& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool lex_less(const Point2D& a, const Point2D& b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

}  // namespace

double polygon_area(std::span<const Point2D> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2D& p = vertices[i];
    const Point2D& q = vertices[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return std::abs(twice) / 2.0;
}

double polygon_area(const HullPolygon& polygon) {
  return polygon_area(std::span<const Point2D>(polygon.vertices));
}

HullPolygon convex_hull(std::span<const Point2D> points) {
  if (points.empty()) throw std::invalid_argument("empty point set");
  for (const Point2D& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("non-finite coordinate");
    }
  }

  std::vector<Point2D> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  HullPolygon hull;
  const std::size_t n = pts.size();
  if (n == 1) {
    hull.vertices = pts;
    hull.area = 0.0;
    return hull;
  }

  // Strictly convex turns only: collinear boundary points are popped.
  std::vector<Point2D> ring(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross(ring[k - 2], ring[k - 1], pts[i]) <= 0.0) --k;
    ring[k++] = pts[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {  // upper chain
    while (k >= lower && cross(ring[k - 2], ring[k - 1], pts[i]) <= 0.0) --k;
    ring[k++] = pts[i];
  }
  ring.resize(k - 1);  // last point repeats the first

  hull.vertices = std::move(ring);
  hull.area = polygon_area(std::span<const Point2D>(hull.vertices));
  return hull;
}

}  // namespace hulluq
