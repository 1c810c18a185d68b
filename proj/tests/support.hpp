#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "zep/image.hpp"

namespace zep::test {

inline std::filesystem::path tmp_path(const std::string& name) {
  const std::filesystem::path dir = ZEP_TEST_TMP;
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline GrayImage random_image(int w, int h, std::mt19937_64& rng, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> px(lo, hi);
  GrayImage img(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) img.at(r, c) = static_cast<std::uint8_t>(px(rng));
  }
  return img;
}

inline Rect random_rect(const Rect& host, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rows(host.row_min, host.row_max);
  std::uniform_int_distribution<int> cols(host.col_min, host.col_max);
  int r0 = rows(rng), r1 = rows(rng), c0 = cols(rng), c1 = cols(rng);
  if (r0 > r1) std::swap(r0, r1);
  if (c0 > c1) std::swap(c0, c1);
  return {r0, r1, c0, c1};
}

}  // namespace zep::test
