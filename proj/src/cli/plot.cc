#include "reblur/cli/plot.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "reblur/data/png_io.h"

namespace reblur::cli {
namespace {

using Rgb = std::array<std::uint8_t, 3>;

constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kGrid{225, 225, 225};
constexpr Rgb kPalette[] = {{31, 119, 180}, {214, 39, 40},  {44, 160, 44},
                            {255, 127, 14}, {148, 103, 189}, {140, 86, 75}};

// 3x5 glyphs; each row uses bits 4 (left), 2, 1 (right).
std::array<std::uint8_t, 5> Glyph(char ch) {
  switch (std::toupper(static_cast<unsigned char>(ch))) {
    case '0': return {7, 5, 5, 5, 7};
    case '1': return {2, 6, 2, 2, 7};
    case '2': return {7, 1, 7, 4, 7};
    case '3': return {7, 1, 7, 1, 7};
    case '4': return {5, 5, 7, 1, 1};
    case '5': return {7, 4, 7, 1, 7};
    case '6': return {7, 4, 7, 5, 7};
    case '7': return {7, 1, 1, 1, 1};
    case '8': return {7, 5, 7, 5, 7};
    case '9': return {7, 5, 7, 1, 7};
    case 'A': return {2, 5, 7, 5, 5};
    case 'B': return {6, 5, 6, 5, 6};
    case 'C': return {3, 4, 4, 4, 3};
    case 'D': return {6, 5, 5, 5, 6};
    case 'E': return {7, 4, 6, 4, 7};
    case 'F': return {7, 4, 6, 4, 4};
    case 'G': return {3, 4, 5, 5, 3};
    case 'H': return {5, 5, 7, 5, 5};
    case 'I': return {7, 2, 2, 2, 7};
    case 'J': return {1, 1, 1, 5, 2};
    case 'K': return {5, 5, 6, 5, 5};
    case 'L': return {4, 4, 4, 4, 7};
    case 'M': return {5, 7, 7, 5, 5};
    case 'N': return {6, 5, 5, 5, 5};
    case 'O': return {2, 5, 5, 5, 2};
    case 'P': return {6, 5, 6, 4, 4};
    case 'Q': return {2, 5, 5, 6, 3};
    case 'R': return {6, 5, 6, 5, 5};
    case 'S': return {3, 4, 2, 1, 6};
    case 'T': return {7, 2, 2, 2, 2};
    case 'U': return {5, 5, 5, 5, 7};
    case 'V': return {5, 5, 5, 5, 2};
    case 'W': return {5, 5, 7, 7, 5};
    case 'X': return {5, 5, 2, 5, 5};
    case 'Y': return {5, 5, 2, 2, 2};
    case 'Z': return {7, 1, 2, 4, 7};
    case '.': return {0, 0, 0, 0, 2};
    case ',': return {0, 0, 0, 2, 4};
    case '-': return {0, 0, 7, 0, 0};
    case '+': return {0, 2, 7, 2, 0};
    case '_': return {0, 0, 0, 0, 7};
    case '(': return {1, 2, 2, 2, 1};
    case ')': return {4, 2, 2, 2, 4};
    case '/': return {1, 1, 2, 4, 4};
    case ':': return {0, 2, 0, 2, 0};
    case '=': return {0, 7, 0, 7, 0};
    default: return {0, 0, 0, 0, 0};
  }
}

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h * 3, 255) {}

  void Set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    std::uint8_t* p = &px_[(static_cast<std::size_t>(y) * w_ + x) * 3];
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  void Line(int x0, int y0, int x1, int y1, Rgb c, int thickness = 1) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      for (int ty = 0; ty < thickness; ++ty) {
        for (int tx = 0; tx < thickness; ++tx) {
          Set(x0 + tx - thickness / 2, y0 + ty - thickness / 2, c);
        }
      }
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) { err += dy; x0 += sx; }
      if (e2 <= dx) { err += dx; y0 += sy; }
    }
  }

  void Box(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) Set(x, y, c);
    }
  }

  // Text at scale 2: glyphs 6x10 pixels with a 2-pixel gap.
  static int TextWidth(const std::string& s) { return static_cast<int>(s.size()) * 8; }

  void Text(int x, int y, const std::string& s, Rgb c, bool vertical = false) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto g = Glyph(s[k]);
      for (int row = 0; row < 5; ++row) {
        for (int col = 0; col < 3; ++col) {
          if (!(g[row] & (4 >> col))) continue;
          for (int sy = 0; sy < 2; ++sy) {
            for (int sx = 0; sx < 2; ++sx) {
              const int gx = static_cast<int>(k) * 8 + col * 2 + sx;
              const int gy = row * 2 + sy;
              if (vertical) {
                Set(x + gy, y - gx, c);
              } else {
                Set(x + gx, y + gy, c);
              }
            }
          }
        }
      }
    }
  }

  const std::vector<std::uint8_t>& pixels() const { return px_; }

 private:
  int w_, h_;
  std::vector<std::uint8_t> px_;
};

std::string Tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::pair<double, double> Range(double lo, double hi) {
  if (!(lo < hi)) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
    return {lo - pad, hi + pad};
  }
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

}  // namespace

void WriteLineChart(const std::filesystem::path& path, const LineChart& chart,
                    int width, int height) {
  if (width < 200 || height < 150) throw std::invalid_argument("chart too small");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : chart.series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series x/y size mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  std::tie(xmin, xmax) = Range(xmin, xmax);
  std::tie(ymin, ymax) = Range(ymin, ymax);

  Canvas cv(width, height);
  const int left = 90, right = width - 20, top = 40, bottom = height - 60;
  const auto px = [&](double x) {
    return left + static_cast<int>(std::lround((x - xmin) / (xmax - xmin) * (right - left)));
  };
  const auto py = [&](double y) {
    return bottom - static_cast<int>(std::lround((y - ymin) / (ymax - ymin) * (bottom - top)));
  };

  constexpr int kTicks = 5;
  for (int t = 0; t <= kTicks; ++t) {
    const double fx = xmin + (xmax - xmin) * t / kTicks;
    const double fy = ymin + (ymax - ymin) * t / kTicks;
    const int gx = px(fx), gy = py(fy);
    cv.Line(gx, top, gx, bottom, kGrid);
    cv.Line(left, gy, right, gy, kGrid);
    const std::string xs = Tick(fx), ys = Tick(fy);
    cv.Text(gx - Canvas::TextWidth(xs) / 2, bottom + 8, xs, kBlack);
    cv.Text(left - 8 - Canvas::TextWidth(ys), gy - 5, ys, kBlack);
  }
  cv.Line(left, top, left, bottom, kBlack);
  cv.Line(left, bottom, right, bottom, kBlack);
  cv.Text((left + right - Canvas::TextWidth(chart.x_label)) / 2, height - 24, chart.x_label,
          kBlack);
  cv.Text(8, (top + bottom + Canvas::TextWidth(chart.y_label)) / 2, chart.y_label, kBlack,
          /*vertical=*/true);
  cv.Text((width - Canvas::TextWidth(chart.title)) / 2, 12, chart.title, kBlack);

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const Series& s = chart.series[k];
    const Rgb color = kPalette[k % std::size(kPalette)];
    int prev_x = 0, prev_y = 0;
    bool have_prev = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        have_prev = false;
        continue;
      }
      const int x = px(s.x[i]), y = py(s.y[i]);
      if (have_prev) cv.Line(prev_x, prev_y, x, y, color, 2);
      cv.Box(x - 3, y - 3, x + 3, y + 3, color);
      prev_x = x;
      prev_y = y;
      have_prev = true;
    }
    const int ly = top + 6 + static_cast<int>(k) * 16;
    const int lx = right - 16 - Canvas::TextWidth(s.name);
    cv.Box(lx - 14, ly + 2, lx - 4, ly + 8, color);
    cv.Text(lx, ly, s.name, kBlack);
  }
  WriteRgb8Png(path, height, width, cv.pixels());
}

}  // namespace reblur::cli
