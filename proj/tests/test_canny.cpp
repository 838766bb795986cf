#include <cmath>

#include <gtest/gtest.h>

#include "deblur/canny.hpp"
#include "deblur/image.hpp"

using namespace deblur;

TEST(Canny, ConstantImageHasNoEdges) {
  const EdgeMask mask = canny_edges(Image(32, 32, 0.5), 0.05, 0.15);
  for (auto v : mask.on) EXPECT_EQ(v, 0);
}

TEST(Canny, RejectsBadThresholds) {
  EXPECT_THROW(canny_edges(Image(8, 8), 0.2, 0.1), std::invalid_argument);
  EXPECT_THROW(canny_edges(Image(8, 8), -0.1, 0.1), std::invalid_argument);
}

TEST(Canny, VerticalStepGivesOnePixelLine) {
  Image img(32, 32, 0.2);
  for (int y = 0; y < 32; ++y)
    for (int x = 16; x < 32; ++x) img.at(x, y) = 0.8;
  const EdgeMask mask = canny_edges(img, 0.05, 0.15);
  for (int y = 3; y < 29; ++y) {
    int count = 0;
    for (int x = 0; x < 32; ++x) count += mask.at(x, y) ? 1 : 0;
    EXPECT_EQ(count, 1) << "row " << y;
  }
}

TEST(Canny, CircleWithinOnePixelOfAnalyticRadius) {
  const int n = 64;
  const double cx = 31.5, cy = 31.5, r = 20.0;
  Image img(n, n, 0.15);
  // Anti-aliased disk via 4x4 supersampling.
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      int inside = 0;
      for (int sy = 0; sy < 4; ++sy)
        for (int sx = 0; sx < 4; ++sx) {
          const double px = x + (sx + 0.5) / 4.0 - 0.5;
          const double py = y + (sy + 0.5) / 4.0 - 0.5;
          if ((px - cx) * (px - cx) + (py - cy) * (py - cy) <= r * r) ++inside;
        }
      img.at(x, y) += 0.7 * inside / 16.0;
    }
  const EdgeMask mask = canny_edges(img, 0.05, 0.15);

  int on_circle = 0, total = 0;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (mask.at(x, y)) {
        ++total;
        const double d = std::hypot(x - cx, y - cy);
        if (std::fabs(d - r) <= 1.0) ++on_circle;
      }
  ASSERT_GT(total, 60);  // most of the circumference detected
  EXPECT_GE(static_cast<double>(on_circle) / total, 0.95);
}

TEST(Canny, HysteresisKeepsWeakEdgesConnectedToStrong) {
  // A step whose contrast fades along y: the weak parts survive only through
  // connectivity to the strong segment.
  Image img(32, 48, 0.3);
  for (int y = 0; y < 48; ++y) {
    const double h = 0.5 - 0.4 * y / 47.0;
    for (int x = 16; x < 32; ++x) img.at(x, y) = 0.3 + h;
  }
  const EdgeMask with_hyst = canny_edges(img, 0.02, 0.3);
  const EdgeMask strict = canny_edges(img, 0.3, 0.3);
  int n_hyst = 0, n_strict = 0;
  for (auto v : with_hyst.on) n_hyst += v;
  for (auto v : strict.on) n_strict += v;
  EXPECT_GT(n_hyst, n_strict);
}

TEST(Canny, Deterministic) {
  Image img(24, 24, 0.4);
  for (int y = 8; y < 16; ++y)
    for (int x = 8; x < 16; ++x) img.at(x, y) = 0.8;
  const EdgeMask a = canny_edges(img, 0.05, 0.15);
  const EdgeMask b = canny_edges(img, 0.05, 0.15);
  EXPECT_EQ(a.on, b.on);
}
