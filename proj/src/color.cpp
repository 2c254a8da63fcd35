#include "lineglow/color.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lineglow {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// sRGB primaries with a D65 white point.
constexpr Mat3 kRgbToXyz{{{0.4124564, 0.3575761, 0.1804375},
                          {0.2126729, 0.7151522, 0.0721750},
                          {0.0193339, 0.1191920, 0.9503041}}};

Mat3 invert(const Mat3& m) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Mat3 inv{};
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

const Mat3& xyz_to_rgb() {
  static const Mat3 m = invert(kRgbToXyz);
  return m;
}

constexpr double kDelta = 6.0 / 29.0;
constexpr double kDeg = std::numbers::pi / 180.0;

double lab_f(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double f) { return f > kDelta ? f * f * f : 3.0 * kDelta * kDelta * (f - 4.0 / 29.0); }

double lightness(double y_rel) { return 116.0 * lab_f(y_rel) - 16.0; }

double y_from_lightness(double l) { return lab_f_inv((l + 16.0) / 116.0); }

void uv_prime(const Xyz& c, double& u, double& v) {
  const double den = c.x + 15.0 * c.y + 3.0 * c.z;
  if (den <= 0.0) {
    u = v = 0.0;
    return;
  }
  u = 4.0 * c.x / den;
  v = 9.0 * c.y / den;
}

}  // namespace

double srgb_to_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }

double linear_to_srgb(double c) { return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055; }

LinearRgb to_linear(Rgb8 c) { return {srgb_to_linear(c.r / 255.0), srgb_to_linear(c.g / 255.0), srgb_to_linear(c.b / 255.0)}; }

Xyz to_xyz(const LinearRgb& c) {
  const auto& m = kRgbToXyz;
  return {m[0][0] * c.r + m[0][1] * c.g + m[0][2] * c.b, m[1][0] * c.r + m[1][1] * c.g + m[1][2] * c.b,
          m[2][0] * c.r + m[2][1] * c.g + m[2][2] * c.b};
}

LinearRgb to_linear(const Xyz& c) {
  const auto& m = xyz_to_rgb();
  return {m[0][0] * c.x + m[0][1] * c.y + m[0][2] * c.z, m[1][0] * c.x + m[1][1] * c.y + m[1][2] * c.z,
          m[2][0] * c.x + m[2][1] * c.y + m[2][2] * c.z};
}

Xyz d65_white() { return to_xyz(LinearRgb{1.0, 1.0, 1.0}); }

Lab to_lab(const Xyz& c) {
  static const Xyz w = d65_white();
  const double fx = lab_f(c.x / w.x), fy = lab_f(c.y / w.y), fz = lab_f(c.z / w.z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Xyz to_xyz(const Lab& c) {
  static const Xyz w = d65_white();
  const double fy = (c.l + 16.0) / 116.0;
  const double fx = fy + c.a / 500.0;
  const double fz = fy - c.b / 200.0;
  return {w.x * lab_f_inv(fx), w.y * lab_f_inv(fy), w.z * lab_f_inv(fz)};
}

Lab to_lab(Rgb8 c) { return to_lab(to_xyz(to_linear(c))); }

Hcl to_hcl(const Xyz& c) {
  static const Xyz w = d65_white();
  double un = 0.0, vn = 0.0, up = 0.0, vp = 0.0;
  uv_prime(w, un, vn);
  uv_prime(c, up, vp);
  const double l = lightness(c.y / w.y);
  const double u = 13.0 * l * (up - un);
  const double v = 13.0 * l * (vp - vn);
  double h = std::atan2(v, u) / kDeg;
  if (h < 0.0) h += 360.0;
  return {h, std::hypot(u, v), l};
}

Xyz to_xyz(const Hcl& c) {
  static const Xyz w = d65_white();
  if (c.l <= 0.0) return {0.0, 0.0, 0.0};
  double un = 0.0, vn = 0.0;
  uv_prime(w, un, vn);
  const double u = c.c * std::cos(c.h * kDeg);
  const double v = c.c * std::sin(c.h * kDeg);
  const double up = u / (13.0 * c.l) + un;
  const double vp = v / (13.0 * c.l) + vn;
  const double y = w.y * y_from_lightness(c.l);
  const double x = y * 9.0 * up / (4.0 * vp);
  const double z = y * (12.0 - 3.0 * up - 20.0 * vp) / (4.0 * vp);
  return {x, y, z};
}

Hcl to_hcl(Rgb8 c) { return to_hcl(to_xyz(to_linear(c))); }

bool in_gamut(const LinearRgb& c) {
  constexpr double tol = 1e-9;
  auto ok = [](double v) { return v >= -tol && v <= 1.0 + tol; };
  return ok(c.r) && ok(c.g) && ok(c.b);
}

Rgb8 to_rgb8(const LinearRgb& c, bool* clamped) {
  if (clamped) *clamped = !in_gamut(c);
  auto q = [](double v) {
    const double s = linear_to_srgb(std::clamp(v, 0.0, 1.0));
    return static_cast<std::uint8_t>(std::clamp(std::lround(s * 255.0), 0L, 255L));
  };
  return {q(c.r), q(c.g), q(c.b)};
}

namespace {

// Nearest 8-bit color in CIELAB among the corners of the sRGB cell holding the target.
// Plain per-channel rounding can land up to ~0.6 a/b units away in dark colors.
Rgb8 quantize_nearest(const LinearRgb& c, bool* clamped) {
  if (clamped) *clamped = !in_gamut(c);
  const LinearRgb k{std::clamp(c.r, 0.0, 1.0), std::clamp(c.g, 0.0, 1.0), std::clamp(c.b, 0.0, 1.0)};
  const Lab target = to_lab(to_xyz(k));
  const double s[3] = {linear_to_srgb(k.r) * 255.0, linear_to_srgb(k.g) * 255.0, linear_to_srgb(k.b) * 255.0};
  int lo[3], hi[3];
  for (int i = 0; i < 3; ++i) {
    lo[i] = std::clamp(static_cast<int>(std::floor(s[i])), 0, 255);
    hi[i] = std::min(lo[i] + 1, 255);
  }
  Rgb8 best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int m = 0; m < 8; ++m) {
    const Rgb8 cand{static_cast<std::uint8_t>(m & 1 ? hi[0] : lo[0]), static_cast<std::uint8_t>(m & 2 ? hi[1] : lo[1]),
                    static_cast<std::uint8_t>(m & 4 ? hi[2] : lo[2])};
    const Lab q = to_lab(cand);
    const double d = (q.l - target.l) * (q.l - target.l) + (q.a - target.a) * (q.a - target.a) +
                     (q.b - target.b) * (q.b - target.b);
    if (d < best_d) best_d = d, best = cand;  // strict: first corner wins ties, so the result is deterministic
  }
  return best;
}

}  // namespace

Rgb8 to_rgb8(const Lab& c, bool* clamped) { return quantize_nearest(to_linear(to_xyz(c)), clamped); }

Hcl fit_chroma(const Hcl& hcl, bool* reduced) {
  if (reduced) *reduced = false;
  if (in_gamut(to_linear(to_xyz(hcl)))) return hcl;
  if (reduced) *reduced = true;
  double lo = 0.0, hi = hcl.c;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (in_gamut(to_linear(to_xyz(Hcl{hcl.h, mid, hcl.l})))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {hcl.h, lo, hcl.l};
}

Rgb8 to_rgb8(const Hcl& c, bool* reduced) {
  const Hcl fitted = fit_chroma(c, reduced);
  return quantize_nearest(to_linear(to_xyz(fitted)), nullptr);
}

double ciede2000(const Lab& c1, const Lab& c2) {
  const double c1ab = std::hypot(c1.a, c1.b);
  const double c2ab = std::hypot(c2.a, c2.b);
  const double cbar = 0.5 * (c1ab + c2ab);
  const double cbar7 = std::pow(cbar, 7.0);
  const double g = 0.5 * (1.0 - std::sqrt(cbar7 / (cbar7 + std::pow(25.0, 7.0))));
  const double a1p = (1.0 + g) * c1.a;
  const double a2p = (1.0 + g) * c2.a;
  const double c1p = std::hypot(a1p, c1.b);
  const double c2p = std::hypot(a2p, c2.b);

  auto hue = [](double b, double ap) {
    if (b == 0.0 && ap == 0.0) return 0.0;
    double h = std::atan2(b, ap) / kDeg;
    return h < 0.0 ? h + 360.0 : h;
  };
  const double h1p = hue(c1.b, a1p);
  const double h2p = hue(c2.b, a2p);

  const double dlp = c2.l - c1.l;
  const double dcp = c2p - c1p;
  double dhp = 0.0;
  if (c1p * c2p != 0.0) {
    dhp = h2p - h1p;
    if (dhp > 180.0) dhp -= 360.0;
    else if (dhp < -180.0) dhp += 360.0;
  }
  const double dHp = 2.0 * std::sqrt(c1p * c2p) * std::sin(0.5 * dhp * kDeg);

  const double lbarp = 0.5 * (c1.l + c2.l);
  const double cbarp = 0.5 * (c1p + c2p);
  double hbarp = h1p + h2p;
  if (c1p * c2p != 0.0) {
    if (std::abs(h1p - h2p) <= 180.0) {
      hbarp *= 0.5;
    } else if (h1p + h2p < 360.0) {
      hbarp = 0.5 * (h1p + h2p + 360.0);
    } else {
      hbarp = 0.5 * (h1p + h2p - 360.0);
    }
  }

  const double t = 1.0 - 0.17 * std::cos((hbarp - 30.0) * kDeg) + 0.24 * std::cos(2.0 * hbarp * kDeg) +
                   0.32 * std::cos((3.0 * hbarp + 6.0) * kDeg) - 0.20 * std::cos((4.0 * hbarp - 63.0) * kDeg);
  const double dtheta = 30.0 * std::exp(-std::pow((hbarp - 275.0) / 25.0, 2.0));
  const double cbarp7 = std::pow(cbarp, 7.0);
  const double rc = 2.0 * std::sqrt(cbarp7 / (cbarp7 + std::pow(25.0, 7.0)));
  const double lm = (lbarp - 50.0) * (lbarp - 50.0);
  const double sl = 1.0 + 0.015 * lm / std::sqrt(20.0 + lm);
  const double sc = 1.0 + 0.045 * cbarp;
  const double sh = 1.0 + 0.015 * cbarp * t;
  const double rt = -std::sin(2.0 * dtheta * kDeg) * rc;

  const double tl = dlp / sl;
  const double tc = dcp / sc;
  const double th = dHp / sh;
  return std::sqrt(std::max(0.0, tl * tl + tc * tc + th * th + rt * tc * th));
}

double ciede2000(Rgb8 c1, Rgb8 c2) {
  if (c1 == c2) return 0.0;
  return ciede2000(to_lab(c1), to_lab(c2));
}

}  // namespace lineglow
