#include "cellqos/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include <fmt/format.h>

#include "cellqos/error.hpp"
#include "cellqos/rng.hpp"

namespace cellqos {

namespace {

double reduce(double v, double period) {
  const double half = 0.5 * period;
  double r = v - period * std::floor((v + half) / period);
  if (r >= half) r -= period;
  if (r < -half) r += period;
  return r;
}

double wrap_abs(double d, double period) {
  d = std::abs(d);
  return std::min(d, period - d);
}

}  // namespace

TorusSpec::TorusSpec(int grid_order, double delta_km) : grid_order_(grid_order), delta_(delta_km) {
  if (grid_order <= 0 || grid_order % 2 != 0)
    throw Error(fmt::format("grid_order must be a positive even integer, got {}", grid_order));
  if (!(delta_km > 0.0) || !std::isfinite(delta_km))
    throw Error(fmt::format("delta_km must be positive, got {}", delta_km));
  width_ = grid_order * delta_km;
  height_ = grid_order * std::numbers::sqrt3 * delta_km / 2.0;
}

Point2D TorusSpec::canonical(Point2D p) const { return {reduce(p.x, width_), reduce(p.y, height_)}; }

bool TorusSpec::is_canonical(Point2D p) const {
  return p.x >= -0.5 * width_ && p.x < 0.5 * width_ && p.y >= -0.5 * height_ && p.y < 0.5 * height_;
}

BaseStationLayout hex_layout(const TorusSpec& torus) {
  const int n = torus.grid_order();
  const double d = torus.delta();
  BaseStationLayout layout{torus, {}, LayoutKind::Hexagonal};
  layout.positions.reserve(static_cast<std::size_t>(n) * n);
  for (int u2 = 0; u2 < n; ++u2) {
    for (int u1 = 0; u1 < n; ++u1) {
      const Point2D p{d * (u1 + 0.5 * u2), d * u2 * std::numbers::sqrt3 / 2.0};
      layout.positions.push_back(torus.canonical(p));
    }
  }
  return layout;
}

BaseStationLayout poisson_layout(const TorusSpec& torus, double intensity, std::uint64_t seed) {
  if (!(intensity > 0.0) || !std::isfinite(intensity))
    throw Error(fmt::format("Poisson intensity must be positive, got {}", intensity));
  Xoshiro256pp rng(seed);
  std::poisson_distribution<std::int64_t> count_dist(intensity * torus.area());
  const auto count = static_cast<std::size_t>(count_dist(rng));
  BaseStationLayout layout{torus, {}, LayoutKind::Poisson};
  layout.positions.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = (rng.uniform() - 0.5) * torus.width();
    const double y = (rng.uniform() - 0.5) * torus.height();
    layout.positions.push_back(torus.canonical({x, y}));
  }
  return layout;
}

double toroidal_sq_distance(Point2D a, Point2D b, const TorusSpec& torus) {
  const double dx = wrap_abs(a.x - b.x, torus.width());
  const double dy = wrap_abs(a.y - b.y, torus.height());
  return dx * dx + dy * dy;
}

double toroidal_distance(Point2D a, Point2D b, const TorusSpec& torus) {
  return std::sqrt(toroidal_sq_distance(a, b, torus));
}

double hex_intensity(double delta_km) {
  if (!(delta_km > 0.0)) throw Error(fmt::format("delta_km must be positive, got {}", delta_km));
  return 2.0 / (std::numbers::sqrt3 * delta_km * delta_km);
}

void write_layout_csv(std::ostream& out, const BaseStationLayout& layout) {
  out << fmt::format("# torus grid_order={} delta_km={}\n", layout.torus.grid_order(), layout.torus.delta());
  out << "# kind=" << (layout.kind == LayoutKind::Hexagonal ? "hexagonal" : "poisson") << '\n';
  out << "bs_id,x_km,y_km\n";
  for (std::size_t i = 0; i < layout.positions.size(); ++i)
    out << fmt::format("{},{},{}\n", i, layout.positions[i].x, layout.positions[i].y);
}

namespace {

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(fmt::format("layout CSV: bad {} '{}'", what, s));
  return v;
}

std::string_view field_after(std::string_view line, std::string_view key) {
  const auto pos = line.find(key);
  if (pos == std::string_view::npos) throw Error(fmt::format("layout CSV: missing '{}'", key));
  auto rest = line.substr(pos + key.size());
  return rest.substr(0, rest.find(' '));
}

}  // namespace

BaseStationLayout read_layout_csv(std::istream& in) {
  std::string line;
  int grid_order = 0;
  double delta = 0.0;
  bool have_torus = false;
  LayoutKind kind = LayoutKind::Poisson;
  std::vector<Point2D> positions;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view view = line;
    if (view.starts_with("#")) {
      if (view.find("torus") != std::string_view::npos) {
        grid_order = static_cast<int>(parse_double(field_after(view, "grid_order="), "grid_order"));
        delta = parse_double(field_after(view, "delta_km="), "delta_km");
        have_torus = true;
      } else if (view.find("kind=") != std::string_view::npos) {
        kind = field_after(view, "kind=") == "hexagonal" ? LayoutKind::Hexagonal : LayoutKind::Poisson;
      }
      continue;
    }
    if (!have_header) {
      if (view != "bs_id,x_km,y_km") throw Error(fmt::format("layout CSV: unexpected header '{}'", view));
      have_header = true;
      continue;
    }
    const auto c1 = view.find(',');
    const auto c2 = view.find(',', c1 == std::string_view::npos ? c1 : c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos)
      throw Error(fmt::format("layout CSV: line {} has fewer than 3 fields", line_no));
    const auto id = parse_double(view.substr(0, c1), "bs_id");
    if (id != static_cast<double>(positions.size()))
      throw Error(fmt::format("layout CSV: line {} has bs_id {} out of sequence", line_no, id));
    positions.push_back({parse_double(view.substr(c1 + 1, c2 - c1 - 1), "x_km"),
                         parse_double(view.substr(c2 + 1), "y_km")});
  }
  if (!have_torus) throw Error("layout CSV: missing '# torus' line");
  TorusSpec torus(grid_order, delta);
  for (const auto& p : positions)
    if (!torus.is_canonical(p)) throw Error(fmt::format("layout CSV: point ({}, {}) outside torus", p.x, p.y));
  return {torus, std::move(positions), kind};
}

}  // namespace cellqos
