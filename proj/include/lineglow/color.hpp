#pragma once

#include <array>
#include <cstdint>

namespace lineglow {

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

/// Linear-light sRGB, nominally in [0,1].
struct LinearRgb {
  double r = 0.0, g = 0.0, b = 0.0;
};

struct Xyz {
  double x = 0.0, y = 0.0, z = 0.0;
};

/// CIELAB, D65 white, 2 degree observer.
struct Lab {
  double l = 0.0, a = 0.0, b = 0.0;
};

/// Polar CIELUV (hue in degrees [0, 360), chroma, lightness).
struct Hcl {
  double h = 0.0, c = 0.0, l = 0.0;
};

double srgb_to_linear(double c);
double linear_to_srgb(double c);

LinearRgb to_linear(Rgb8 c);
Xyz to_xyz(const LinearRgb& c);
LinearRgb to_linear(const Xyz& c);
Xyz d65_white();

Lab to_lab(const Xyz& c);
Xyz to_xyz(const Lab& c);
Lab to_lab(Rgb8 c);

Hcl to_hcl(const Xyz& c);
Xyz to_xyz(const Hcl& c);
Hcl to_hcl(Rgb8 c);

/// True when every linear channel lies in [0,1] up to a small tolerance.
bool in_gamut(const LinearRgb& c);

/// Rounds to 8 bits with per-channel clamping. Sets *clamped when a channel was outside [0,1].
Rgb8 to_rgb8(const LinearRgb& c, bool* clamped = nullptr);
Rgb8 to_rgb8(const Lab& c, bool* clamped = nullptr);

/// Largest chroma in [0, hcl.c] at fixed hue and lightness that is inside the sRGB gamut.
Hcl fit_chroma(const Hcl& hcl, bool* reduced = nullptr);
Rgb8 to_rgb8(const Hcl& c, bool* reduced = nullptr);

/// CIEDE2000 color difference (kL = kC = kH = 1).
double ciede2000(const Lab& c1, const Lab& c2);
double ciede2000(Rgb8 c1, Rgb8 c2);

}  // namespace lineglow
