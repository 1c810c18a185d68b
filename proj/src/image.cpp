#include "zep/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "zep/error.hpp"

namespace zep {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
      return "Io";
    case ErrorCode::MalformedHeader:
      return "MalformedHeader";
    case ErrorCode::UnsupportedMaxval:
      return "UnsupportedMaxval";
    case ErrorCode::Truncated:
      return "Truncated";
    case ErrorCode::InvalidArgument:
      return "InvalidArgument";
    case ErrorCode::OutOfBounds:
      return "OutOfBounds";
    case ErrorCode::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::Divergence:
      return "Divergence";
    case ErrorCode::Version:
      return "Version";
    case ErrorCode::Malformed:
      return "Malformed";
    case ErrorCode::NoCandidates:
      return "NoCandidates";
  }
  return "Unknown";
}

double distance(const Point& a, const Point& b) { return std::hypot(a.row - b.row, a.col - b.col); }

GrayImage::GrayImage(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative image dimension");
  }
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 0 || height < 0 || pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::InvalidArgument, "pixel buffer does not match image dimensions");
  }
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
bool read_token(std::istream& in, std::string& token) {
  token.clear();
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c != EOF) in.unget();
  return !token.empty();
}

long parse_header_number(std::istream& in, const char* field) {
  std::string token;
  if (!read_token(in, token)) {
    throw Error(ErrorCode::MalformedHeader, std::string("PGM header missing ") + field);
  }
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || value < 0) {
    throw Error(ErrorCode::MalformedHeader,
                std::string("PGM header has invalid ") + field + " '" + token + "'");
  }
  return value;
}

}  // namespace

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());

  std::string magic;
  if (!read_token(in, magic) || magic != "P5") {
    throw Error(ErrorCode::MalformedHeader, path.string() + ": not a binary graymap (P5)");
  }
  const long width = parse_header_number(in, "width");
  const long height = parse_header_number(in, "height");
  const long maxval = parse_header_number(in, "maxval");
  if (width == 0 || height == 0) {
    throw Error(ErrorCode::MalformedHeader, path.string() + ": zero dimension");
  }
  if (maxval == 0 || maxval > 255) {
    throw Error(ErrorCode::UnsupportedMaxval, path.string() + ": maxval " + std::to_string(maxval));
  }
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) {
    throw Error(ErrorCode::MalformedHeader, path.string() + ": missing separator after maxval");
  }

  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != pixels.size()) {
    throw Error(ErrorCode::Truncated, path.string() + ": payload has " +
                                          std::to_string(in.gcount()) + " of " +
                                          std::to_string(pixels.size()) + " bytes");
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels().data()),
            static_cast<std::streamsize>(img.pixels().size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

namespace {

constexpr std::int64_t kFixedOne = 1 << 16;

struct Tap {
  int lo;
  int hi;
  std::int64_t w_hi;  // weight of `hi`, in 1/kFixedOne units
};

// Source taps for pixel-center alignment: src = (dst + 0.5) * in / out - 0.5,
// evaluated exactly as the rational ((2 dst + 1) in - out) / (2 out).
std::vector<Tap> make_taps(int in, int out) {
  std::vector<Tap> taps(static_cast<std::size_t>(out));
  const std::int64_t den = 2LL * out;
  for (int d = 0; d < out; ++d) {
    std::int64_t num = (2LL * d + 1) * in - out;
    if (num < 0) num = 0;
    int lo = static_cast<int>(num / den);
    std::int64_t rem = num % den;
    if (lo >= in - 1) {
      lo = in - 1;
      rem = 0;
    }
    const int hi = std::min(lo + 1, in - 1);
    taps[static_cast<std::size_t>(d)] = {lo, hi, (rem * kFixedOne + den / 2) / den};
  }
  return taps;
}

}  // namespace

GrayImage resize_bilinear(const GrayImage& img, int new_w, int new_h) {
  if (new_w < 1 || new_h < 1) {
    throw Error(ErrorCode::InvalidArgument, "resize target dimension must be >= 1");
  }
  if (img.empty()) throw Error(ErrorCode::InvalidArgument, "resize of empty image");
  if (new_w == img.width() && new_h == img.height()) return img;

  const auto xt = make_taps(img.width(), new_w);
  const auto yt = make_taps(img.height(), new_h);
  GrayImage out(new_w, new_h);
  constexpr std::int64_t kHalf = kFixedOne * kFixedOne / 2;
  for (int r = 0; r < new_h; ++r) {
    const Tap& ty = yt[static_cast<std::size_t>(r)];
    const std::int64_t wy1 = ty.w_hi;
    const std::int64_t wy0 = kFixedOne - wy1;
    for (int c = 0; c < new_w; ++c) {
      const Tap& tx = xt[static_cast<std::size_t>(c)];
      const std::int64_t wx1 = tx.w_hi;
      const std::int64_t wx0 = kFixedOne - wx1;
      const std::int64_t top = wx0 * img.at(ty.lo, tx.lo) + wx1 * img.at(ty.lo, tx.hi);
      const std::int64_t bot = wx0 * img.at(ty.hi, tx.lo) + wx1 * img.at(ty.hi, tx.hi);
      const std::int64_t acc = wy0 * top + wy1 * bot;
      out.at(r, c) = static_cast<std::uint8_t>(
          std::clamp<std::int64_t>((acc + kHalf) / (kFixedOne * kFixedOne), 0, 255));
    }
  }
  return out;
}

GrayImage add_gaussian_noise(const GrayImage& img, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  if (sigma == 0.0) return img;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<std::uint8_t> px(img.pixels().begin(), img.pixels().end());
  for (auto& p : px) {
    const long v = std::lround(static_cast<double>(p) + noise(rng));
    p = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
  }
  return GrayImage(img.width(), img.height(), std::move(px));
}

GrayImage crop(const GrayImage& img, const Rect& rect) {
  if (!rect.valid() || !img.bounds().contains(rect)) {
    throw Error(ErrorCode::OutOfBounds, "crop rectangle outside image");
  }
  GrayImage out(rect.width(), rect.height());
  for (int r = 0; r < rect.height(); ++r) {
    for (int c = 0; c < rect.width(); ++c) {
      out.at(r, c) = img.at(rect.row_min + r, rect.col_min + c);
    }
  }
  return out;
}

GrayImage transpose(const GrayImage& img) {
  GrayImage out(img.height(), img.width());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) out.at(c, r) = img.at(r, c);
  }
  return out;
}

GrayImage add_constant(const GrayImage& img, int offset) {
  std::vector<std::uint8_t> px(img.pixels().begin(), img.pixels().end());
  for (auto& p : px) p = static_cast<std::uint8_t>(std::clamp(p + offset, 0, 255));
  return GrayImage(img.width(), img.height(), std::move(px));
}

GrayImage stretch_nearest(const GrayImage& img, int k_rows, int k_cols) {
  if (k_rows < 1 || k_cols < 1) {
    throw Error(ErrorCode::InvalidArgument, "stretch factors must be >= 1");
  }
  GrayImage out(img.width() * k_cols, img.height() * k_rows);
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) out.at(r, c) = img.at(r / k_rows, c / k_cols);
  }
  return out;
}

}  // namespace zep
