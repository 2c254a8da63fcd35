#include "lineglow/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace lineglow::synthetic {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
double normal(Rng& rng, double sd) { return std::normal_distribution<double>(0.0, sd)(rng); }

}  // namespace

std::vector<Polyline> corridor_lines(int count, int width, int height, std::uint64_t seed) {
  Rng rng(seed);
  const double w = width - 1, h = height - 1;
  // Corridor centerlines over s in [0,1].
  auto corridor = [&](int k, double s) -> Vec2 {
    switch (k) {
      case 0: return {0.05 * w + 0.9 * w * s, h * (0.30 + 0.08 * std::sin(2.0 * std::numbers::pi * s))};
      case 1: return {0.05 * w + 0.9 * w * s, h * (0.55 + 0.25 * s - 0.15 * s * s)};
      default: return {w * (0.20 + 0.55 * s), h * (0.95 - 0.85 * s)};
    }
  };
  std::vector<Polyline> out;
  out.reserve(static_cast<std::size_t>(count));
  const int crossers = std::max(1, count / 50);
  for (int i = 0; i < count; ++i) {
    Polyline line;
    line.id = i;
    if (i >= count - crossers) {
      line.cluster = 3;
      Vec2 p{uniform(rng, 0.1, 0.9) * w, uniform(rng, 0.1, 0.9) * h};
      double heading = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      line.vertices.push_back(p);
      for (int k = 0; k < 4; ++k) {
        heading += normal(rng, 0.4);
        const double len = uniform(rng, 20.0, 60.0);
        p = {std::clamp(p.x + len * std::cos(heading), 0.0, w), std::clamp(p.y + len * std::sin(heading), 0.0, h)};
        line.vertices.push_back(p);
      }
    } else {
      const int k = i % 3;
      line.cluster = k;
      const double offset = normal(rng, 0.02 * std::min(w, h));
      const double s0 = uniform(rng, 0.0, 0.25), s1 = uniform(rng, 0.75, 1.0);
      constexpr int kVerts = 14;
      for (int v = 0; v < kVerts; ++v) {
        const double s = s0 + (s1 - s0) * v / (kVerts - 1);
        const Vec2 a = corridor(k, std::max(0.0, s - 1e-3)), b = corridor(k, std::min(1.0, s + 1e-3));
        Vec2 dir = b - a;
        dir = (1.0 / norm(dir)) * dir;
        const Vec2 c = corridor(k, s) + offset * perp(dir);
        line.vertices.push_back({std::clamp(c.x + normal(rng, 1.0), 0.0, w), std::clamp(c.y + normal(rng, 1.0), 0.0, h)});
      }
    }
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<Polyline> random_lines(int count, int width, int height, std::uint64_t seed) {
  Rng rng(seed);
  const double w = width - 1, h = height - 1;
  std::vector<Polyline> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Polyline line;
    line.id = i;
    Vec2 p{uniform(rng, 0.1, 0.9) * w, uniform(rng, 0.1, 0.9) * h};
    double heading = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const int segments = 3 + static_cast<int>(rng() % 2);
    line.vertices.push_back(p);
    for (int s = 0; s < segments; ++s) {
      heading += uniform(rng, -0.8, 0.8);
      const double len = uniform(rng, 20.0, 50.0);
      Vec2 q{p.x + len * std::cos(heading), p.y + len * std::sin(heading)};
      // Bounce off the border instead of leaving the grid.
      if (q.x < 0.0 || q.x > w) heading = std::numbers::pi - heading;
      if (q.y < 0.0 || q.y > h) heading = -heading;
      q = {std::clamp(q.x, 0.0, w), std::clamp(q.y, 0.0, h)};
      line.vertices.push_back(q);
      p = q;
    }
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<Polyline> parallel_with_crosser(int copies, int width, int height) {
  std::vector<Polyline> out;
  const double row = std::floor(height / 2.0), col = std::floor(width / 2.0);
  for (int i = 0; i < copies; ++i) {
    out.push_back({i, {{0.2 * width, row}, {0.8 * width, row}}, std::nullopt});
  }
  out.push_back({copies, {{col, 0.2 * height}, {col, 0.8 * height}}, std::nullopt});
  return out;
}

std::vector<Polyline> tie_free_lines(int count, int size, std::uint64_t seed) {
  Rng rng(seed);
  const int lo = size / 10, hi = size - 1 - size / 10;
  std::vector<Polyline> out;
  for (int i = 0; i < count; ++i) {
    Polyline line;
    line.id = i;
    int x = lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo));
    int y = lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo));
    double heading = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    line.vertices.push_back({double(x), double(y)});
    const int segments = 2 + static_cast<int>(rng() % 3);
    for (int s = 0; s < segments; ++s) {
      heading += uniform(rng, -0.9, 0.9);
      const double len = uniform(rng, 15.0, 45.0);
      int dx = static_cast<int>(std::lround(len * std::cos(heading)));
      int dy = static_cast<int>(std::lround(len * std::sin(heading)));
      // Force an odd major-axis length.
      if (std::abs(dx) >= std::abs(dy)) {
        if (dx % 2 == 0) dx += dx >= 0 ? 1 : -1;
      } else if (dy % 2 == 0) {
        dy += dy >= 0 ? 1 : -1;
      }
      // Reflect steps that would leave the interior window.
      if (x + dx < lo || x + dx > hi) dx = -dx;
      if (y + dy < lo || y + dy > hi) dy = -dy;
      x += dx;
      y += dy;
      heading = std::atan2(dy, dx);
      line.vertices.push_back({double(x), double(y)});
    }
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<Polyline> rotate_quarter(const std::vector<Polyline>& lines, int size) {
  std::vector<Polyline> out = lines;
  for (auto& line : out) {
    for (auto& v : line.vertices) v = {size - 1 - v.y, v.x};
  }
  return out;
}

std::string to_csv(const std::vector<Polyline>& grid_lines) {
  std::ostringstream os;
  os.precision(17);
  const bool clustered = !grid_lines.empty() && grid_lines.front().cluster.has_value();
  os << (clustered ? "line_id,x,y,cluster\n" : "line_id,x,y\n");
  for (const auto& line : grid_lines) {
    for (const auto& v : line.vertices) {
      os << line.id << ',' << v.x << ',' << -v.y;
      if (clustered) os << ',' << line.cluster.value_or(0);
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace lineglow::synthetic
