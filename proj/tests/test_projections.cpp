#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "zep/error.hpp"
#include "zep/projections.hpp"

using namespace zep;

namespace {

// Direct-summation oracle, written independently of the library.
std::vector<double> column_means(const GrayImage& img, const Rect& r) {
  std::vector<double> out;
  for (int c = r.col_min; c <= r.col_max; ++c) {
    long s = 0;
    for (int i = r.row_min; i <= r.row_max; ++i) s += img.at(i, c);
    out.push_back(static_cast<double>(s) / r.height());
  }
  return out;
}

std::vector<double> row_means(const GrayImage& img, const Rect& r) {
  return column_means(transpose(img), {r.col_min, r.col_max, r.row_min, r.row_max});
}

long sobel_oracle(const GrayImage& img, int r, int c) {
  if (r == 0 || c == 0 || r == img.height() - 1 || c == img.width() - 1) return 0;
  static const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  long gx = 0, gy = 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const int p = img.at(r + dr, c + dc);
      gx += kx[dr + 1][dc + 1] * p;
      gy += kx[dc + 1][dr + 1] * p;
    }
  }
  return gx * gx + gy * gy;
}

bool same(const Projection& a, const Projection& b) {
  return a.axis == b.axis && a.divisor == b.divisor && a.sums == b.sums && a.values == b.values;
}

}  // namespace

TEST_SUITE("projections") {

TEST_CASE("integral projections of small fixtures") {
  const GrayImage img(2, 2, {0, 2, 4, 6});
  const Rect all = img.bounds();
  CHECK(integral_projection_naive(img, all, Axis::Horizontal).values == std::vector{2.0, 4.0});
  CHECK(integral_projection_naive(img, all, Axis::Vertical).values == std::vector{1.0, 5.0});

  const GrayImage seven(9, 5, std::uint8_t{7});
  for (Axis ax : {Axis::Horizontal, Axis::Vertical}) {
    const auto p = integral_projection_naive(seven, {1, 3, 2, 7}, ax);
    CHECK(p.size() == (ax == Axis::Horizontal ? 6u : 3u));
    for (double v : p.values) CHECK(v == 7.0);
  }
  CHECK_THROWS_AS(integral_projection_naive(seven, {0, 5, 0, 0}, Axis::Horizontal), Error);
}

TEST_CASE("naive projections match the direct-summation oracle") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const GrayImage img = test::random_image(1 + k % 23, 1 + (k * 7) % 19, rng);
    const Rect r = test::random_rect(img.bounds(), rng);
    CHECK(integral_projection_naive(img, r, Axis::Horizontal).values == column_means(img, r));
    CHECK(integral_projection_naive(img, r, Axis::Vertical).values == row_means(img, r));
  }
}

TEST_CASE("sobel energy") {
  CHECK_THROWS_AS(sobel_energy(GrayImage(2, 5)), Error);

  const auto flat = sobel_energy(GrayImage(8, 8, std::uint8_t{90}));
  CHECK(std::all_of(flat.values.begin(), flat.values.end(), [](auto v) { return v == 0; }));

  // Vertical step: columns 0..4 are 0, 5..9 are 100. Column 4 and 5 sit on
  // the step: the horizontal-derivative kernel sees 4 * 100, the other 0.
  GrayImage step(10, 6);
  for (int r = 0; r < 6; ++r) {
    for (int c = 5; c < 10; ++c) step.at(r, c) = 100;
  }
  const auto e = sobel_energy(step);
  for (int r = 1; r < 5; ++r) {
    CHECK(e.at(r, 4) == 160000);
    CHECK(e.at(r, 5) == 160000);
    CHECK(e.at(r, 3) == 0);
    CHECK(e.at(r, 6) == 0);
  }
  CHECK(e.at(0, 4) == 0);  // border policy

  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const GrayImage img = test::random_image(17, 12, rng);
    const auto s = sobel_energy(img);
    const auto st = sobel_energy(transpose(img));
    for (int r = 0; r < img.height(); ++r) {
      for (int c = 0; c < img.width(); ++c) {
        CHECK(s.at(r, c) == sobel_oracle(img, r, c));
        CHECK(st.at(c, r) == s.at(r, c));
      }
    }
    // Region restriction keeps whole-image values.
    const Rect region{3, 11, 0, 9};
    const auto sub = sobel_energy(img, region);
    for (int r = region.row_min; r <= region.row_max; ++r) {
      for (int c = region.col_min; c <= region.col_max; ++c) CHECK(sub.at(r, c) == s.at(r, c));
    }
  }
}

TEST_CASE("edge projections") {
  const GrayImage flat(12, 12, std::uint8_t{40});
  for (double v : edge_projection_naive(flat, {2, 9, 2, 9}, Axis::Horizontal).values) CHECK(v == 0);

  std::mt19937_64 rng(8);
  const GrayImage img = test::random_image(20, 15, rng);
  const auto energy = sobel_energy(img);
  for (int k = 0; k < 50; ++k) {
    const Rect r = test::random_rect(img.bounds(), rng);
    for (Axis ax : {Axis::Horizontal, Axis::Vertical}) {
      const auto p = edge_projection_naive(img, r, ax);
      CHECK(same(p, edge_projection_naive(energy, r, ax)));
      CHECK(same(p, integral_projection_naive(energy, r, ax)));
      // Oracle: mean of the oracle energy along each line.
      const int n = ax == Axis::Horizontal ? r.width() : r.height();
      for (int j = 0; j < n; ++j) {
        long s = 0;
        const int len = ax == Axis::Horizontal ? r.height() : r.width();
        for (int i = 0; i < len; ++i) {
          s += ax == Axis::Horizontal ? sobel_oracle(img, r.row_min + i, r.col_min + j)
                                      : sobel_oracle(img, r.row_min + j, r.col_min + i);
        }
        CHECK(p.values[static_cast<std::size_t>(j)] == static_cast<double>(s) / len);
      }
    }
  }
}

TEST_CASE("edge projection of a dark disc peaks at its rim") {
  GrayImage patch(71, 71, std::uint8_t{200});
  const double cr = 35, cc = 35, radius = 9;
  for (int r = 0; r < 71; ++r) {
    for (int c = 0; c < 71; ++c) {
      if (std::hypot(r - cr, c - cc) <= radius) patch.at(r, c) = 30;
    }
  }
  const auto eh = edge_projection_naive(patch, patch.bounds(), Axis::Horizontal);
  const auto peak = std::max_element(eh.values.begin(), eh.values.end()) - eh.values.begin();
  // Brute force over the columns: the rim columns are 35 +- 9.
  CHECK((std::abs(peak - (35 - 9)) <= 2 || std::abs(peak - (35 + 9)) <= 2));
}

TEST_CASE("oriented integral tables") {
  const GrayImage column(1, 3, {3, 1, 2});
  const auto t = build_oriented_integrals(column);
  CHECK(t.col_prefix(0, 0) == 0);
  CHECK(t.col_prefix(0, 1) == 3);
  CHECK(t.col_prefix(0, 2) == 4);
  CHECK(t.col_prefix(0, 3) == 6);
  for (int r = 0; r < 3; ++r) CHECK(t.row_prefix(r, 0) == 0);

  const auto zero = build_oriented_integrals(GrayImage(7, 4));
  for (int c = 0; c < 7; ++c) {
    for (int r = 0; r <= 4; ++r) CHECK(zero.col_prefix(c, r) == 0);
  }

  std::mt19937_64 rng(21);
  const GrayImage img = test::random_image(64, 64, rng);
  const auto tab = build_oriented_integrals(img);
  for (int c = 0; c < 64; ++c) {
    long s = 0;
    for (int r = 0; r <= 64; ++r) {
      CHECK(tab.col_prefix(c, r) == s);
      if (r < 64) s += img.at(r, c);
    }
  }
  for (int r = 0; r < 64; ++r) {
    long s = 0;
    for (int c = 0; c <= 64; ++c) {
      CHECK(tab.row_prefix(r, c) == s);
      if (c < 64) s += img.at(r, c);
    }
  }
}

TEST_CASE("fast projection equals naive on every rect of a 16x16 image") {
  std::mt19937_64 rng(16);
  const GrayImage img = test::random_image(16, 16, rng);
  const auto gray = build_oriented_integrals(img);
  const auto energy = sobel_energy(img);
  const auto edges = build_oriented_integrals(energy);
  for (int r0 = 0; r0 < 16; ++r0) {
    for (int r1 = r0; r1 < 16; ++r1) {
      for (int c0 = 0; c0 < 16; ++c0) {
        for (int c1 = c0; c1 < 16; ++c1) {
          const Rect r{r0, r1, c0, c1};
          for (Axis ax : {Axis::Horizontal, Axis::Vertical}) {
            REQUIRE(same(fast_projection(gray, r, ax), integral_projection_naive(img, r, ax)));
            REQUIRE(same(fast_projection(edges, r, ax), edge_projection_naive(energy, r, ax)));
          }
        }
      }
    }
  }
}

TEST_CASE("fast projection: sub-region tables, disjoint rects, bounds") {
  std::mt19937_64 rng(31);
  const GrayImage img = test::random_image(32, 32, rng);
  const Rect region{4, 27, 6, 30};
  const auto t = build_oriented_integrals(img, region);
  const Rect a{4, 10, 6, 12};
  const Rect b{20, 27, 25, 30};
  for (Axis ax : {Axis::Horizontal, Axis::Vertical}) {
    CHECK(same(fast_projection(t, a, ax), integral_projection_naive(img, a, ax)));
    CHECK(same(fast_projection(t, b, ax), integral_projection_naive(img, b, ax)));
    CHECK(same(fast_projection(t, region, ax), integral_projection_naive(img, region, ax)));
  }
  CHECK_THROWS_AS(fast_projection(t, {3, 10, 6, 12}, Axis::Horizontal), Error);
}

TEST_CASE("scan positions and order") {
  std::mt19937_64 rng(2);
  const GrayImage img = test::random_image(30, 30, rng);
  CHECK(scan_projections(img, {5, 14, 5, 14}, 10, 10, 3).size() == 1);

  const auto w = scan_projections(img, {0, 9, 0, 9}, 4, 4, 2);
  REQUIRE(w.size() == 16);
  for (std::size_t k = 0; k < w.size(); ++k) {
    CHECK(w[k].window == Rect::from_origin(2 * static_cast<int>(k / 4), 2 * static_cast<int>(k % 4), 4, 4));
  }
  CHECK(scan_positions(10, 4, 2) == 4);

  const GrayImage big = test::random_image(80, 80, rng);
  CHECK_THROWS_AS(scan_projections(big, {0, 39, 0, 39}, 71, 71, 2), Error);
}

TEST_CASE("scan equals the per-window naive reference") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 5; ++k) {
    const GrayImage img = test::random_image(48, 40, rng);
    const Rect roi = {2, 37, 3, 45};
    const auto fast = scan_projections(img, roi, 9 + k, 7 + k, 1 + k % 3);
    const auto slow = scan_projections_naive(img, roi, 9 + k, 7 + k, 1 + k % 3);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i].window == slow[i].window);
      CHECK(same(fast[i].ph, slow[i].ph));
      CHECK(same(fast[i].pv, slow[i].pv));
      CHECK(same(fast[i].eh, slow[i].eh));
      CHECK(same(fast[i].ev, slow[i].ev));
    }
    // Reusing a buffer gives the same answer.
    std::vector<WindowProjections> buf = slow;
    scan_projections(img, roi, 5, 5, 2, buf);
    const auto fresh = scan_projections(img, roi, 5, 5, 2);
    REQUIRE(buf.size() == fresh.size());
    for (std::size_t i = 0; i < buf.size(); ++i) CHECK(same(buf[i].ev, fresh[i].ev));
  }
}

TEST_CASE("edge projections ignore clipping-free brightness offsets") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 30; ++k) {
    const GrayImage img = test::random_image(20, 20, rng, 10, 200);
    const GrayImage lit = add_constant(img, 1 + k);
    const Rect r = test::random_rect(img.bounds(), rng);
    for (Axis ax : {Axis::Horizontal, Axis::Vertical}) {
      CHECK(same(edge_projection_naive(img, r, ax), edge_projection_naive(lit, r, ax)));
    }
  }
}

TEST_CASE("duplicating rows keeps P_H, duplicating columns keeps P_V") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 30; ++k) {
    const GrayImage img = test::random_image(15, 11, rng);
    CHECK(integral_projection_naive(stretch_nearest(img, 2, 1), {0, 21, 0, 14}, Axis::Horizontal)
              .values == integral_projection_naive(img, img.bounds(), Axis::Horizontal).values);
    CHECK(integral_projection_naive(stretch_nearest(img, 1, 2), {0, 10, 0, 29}, Axis::Vertical)
              .values == integral_projection_naive(img, img.bounds(), Axis::Vertical).values);
  }
}

}  // TEST_SUITE
