#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lineglow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator-(Vec2 v) { return {-v.x, -v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

// Counter-clockwise quarter turn in grid coordinates.
inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return {v.x / n, v.y / n, v.z / n};
}

/// Integer pixel coordinate. Column grows to the right, row grows downward.
struct Pixel {
  int col = 0;
  int row = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major W×H field.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height), values_(static_cast<std::size_t>(width) * height, fill) {
    if (width < 0 || height < 0) throw std::invalid_argument("negative grid dimension");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  bool contains(int col, int row) const { return col >= 0 && row >= 0 && col < width_ && row < height_; }
  bool contains(Pixel p) const { return contains(p.col, p.row); }

  std::size_t index(int col, int row) const { return static_cast<std::size_t>(row) * width_ + col; }

  T& operator()(int col, int row) { return values_[index(col, row)]; }
  const T& operator()(int col, int row) const { return values_[index(col, row)]; }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  std::vector<T>& values() { return values_; }
  const std::vector<T>& values() const { return values_; }

  bool same_shape(int w, int h) const { return width_ == w && height_ == h; }
  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return same_shape(other.width(), other.height());
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
};

using ScalarGrid = Grid<double>;

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionMismatch(std::string(what) + ": grid dimensions differ (" + std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                            std::to_string(b.height()) + ")");
  }
}

}  // namespace lineglow
