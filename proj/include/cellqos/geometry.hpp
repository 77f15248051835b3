#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cellqos {

struct Point2D {
  double x = 0.0;  // km
  double y = 0.0;  // km
};

/// Rectangular torus holding grid_order^2 hexagonal cells of spacing delta:
/// [-n*delta/2, n*delta/2) x [-n*sqrt(3)*delta/4, n*sqrt(3)*delta/4).
class TorusSpec {
 public:
  /// Throws Error unless grid_order is even and positive and delta > 0.
  TorusSpec(int grid_order, double delta_km);

  int grid_order() const { return grid_order_; }
  double delta() const { return delta_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double area() const { return width_ * height_; }

  /// Canonical representative in the half-open rectangle.
  Point2D canonical(Point2D p) const;
  bool is_canonical(Point2D p) const;

  friend bool operator==(const TorusSpec&, const TorusSpec&) = default;

 private:
  int grid_order_;
  double delta_;
  double width_;
  double height_;
};

enum class LayoutKind { Hexagonal, Poisson };

struct BaseStationLayout {
  TorusSpec torus;
  std::vector<Point2D> positions;
  LayoutKind kind;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
};

/// The grid_order^2 vertices {delta*(u1 + u2*e^{i*pi/3})} reduced onto the
/// torus. Deterministic: no random shift.
BaseStationLayout hex_layout(const TorusSpec& torus);

/// Poisson(intensity * area) base stations placed i.i.d. uniformly.
/// A layout with zero stations is returned as-is.
BaseStationLayout poisson_layout(const TorusSpec& torus, double intensity, std::uint64_t seed);

/// Minimum-image Euclidean distance. Both points must be canonical.
double toroidal_distance(Point2D a, Point2D b, const TorusSpec& torus);
double toroidal_sq_distance(Point2D a, Point2D b, const TorusSpec& torus);

/// Base-station intensity of a hexagonal grid with spacing delta, 2/(sqrt(3) delta^2).
double hex_intensity(double delta_km);

/// CSV: "# torus grid_order=<n> delta_km=<delta>", "# kind=<hexagonal|poisson>",
/// then header "bs_id,x_km,y_km" and one row per station.
void write_layout_csv(std::ostream& out, const BaseStationLayout& layout);
BaseStationLayout read_layout_csv(std::istream& in);

}  // namespace cellqos
