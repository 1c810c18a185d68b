#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "zep/dataset.hpp"
#include "zep/error.hpp"
#include "zep/eval.hpp"

using namespace zep;

namespace {

Annotation truth_at(Point l, Point r) {
  Annotation a;
  a.id = "t";
  a.face_rect = {0, 299, 0, 299};
  a.left_eye = l;
  a.right_eye = r;
  return a;
}

EyePair found_at(Point l, Point r) {
  EyePair p;
  p.left = l;
  p.right = r;
  return p;
}

LocalizationError with_eps(double eps) {
  LocalizationError e;
  e.d_eye = 1;
  e.eps_left = eps;
  e.eps_right = eps / 2;
  e.eps = eps;
  return e;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("stringent error") {
  const Annotation t = truth_at({100, 100}, {100, 150});
  CHECK(stringent_error(found_at({100, 100}, {100, 150}), t).eps == 0.0);
  CHECK(stringent_error(found_at({102.5, 100}, {100, 150}), t).eps == doctest::Approx(0.05));
  const auto e = stringent_error(found_at({100, 100}, {103, 154}), t);
  CHECK(e.eps == doctest::Approx(0.1));
  CHECK(e.eps_right == doctest::Approx(5.0));
  CHECK(e.d_eye == 50.0);
  CHECK(e.best() == 0.0);
  CHECK(e.average() == doctest::Approx(0.05));

  CHECK_THROWS_AS(stringent_error(found_at({0, 0}, {1, 1}), truth_at({5, 5}, {5, 5})), Error);

  FaceResult half;
  half.left = EyeEstimate{{100, 100}, 1.0};
  const auto missing = stringent_error(half, t);
  CHECK(std::isinf(missing.eps));
  CHECK(missing.best() == 0.0);
}

TEST_CASE("stringent error ignores translation and scale") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int k = 0; k < 100; ++k) {
    const Point tl{u(rng) + 100, u(rng) + 100}, tr{u(rng) + 100, u(rng) + 200};
    const Point fl{tl.row + u(rng) / 10, tl.col + u(rng) / 10};
    const Point fr{tr.row + u(rng) / 10, tr.col + u(rng) / 10};
    const double base = stringent_error(found_at(fl, fr), truth_at(tl, tr)).eps;
    const double dy = u(rng), dx = u(rng), s = 0.5 + (u(rng) + 50) / 25;
    const auto move = [&](Point p) { return Point{s * p.row + dy, s * p.col + dx}; };
    CHECK(stringent_error(found_at(move(fl), move(fr)), truth_at(move(tl), move(tr))).eps ==
          doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("accuracy curves") {
  const std::vector<double> th = {0.05, 0.1, 0.25};
  const std::vector<LocalizationError> zeros(4, with_eps(0));
  const auto all = accuracy_curve(zeros, th);
  CHECK(all.min_curve == std::vector<double>{1, 1, 1});

  // Strict comparison: an error equal to the threshold does not count.
  const std::vector<LocalizationError> step(10, with_eps(0.07));
  const std::vector<double> probe = {0.07, 0.0700001, 0.05};
  const auto c = accuracy_curve(step, probe);
  CHECK(c.thresholds == std::vector<double>{0.05, 0.07, 0.0700001});
  CHECK(c.min_curve == std::vector<double>{0, 0, 1});
  CHECK(c.max_curve == std::vector<double>{1, 1, 1});

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 0.4);
  std::vector<LocalizationError> errs;
  for (int k = 0; k < 100; ++k) {
    LocalizationError e;
    e.d_eye = 1;
    e.eps_left = u(rng);
    e.eps_right = u(rng);
    e.eps = std::max(e.eps_left, e.eps_right);
    errs.push_back(e);
  }
  std::vector<double> grid;
  for (int k = 1; k <= 50; ++k) grid.push_back(k / 100.0);
  const auto curve = accuracy_curve(errs, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(curve.min_curve[k] <= curve.avg_curve[k]);
    CHECK(curve.avg_curve[k] <= curve.max_curve[k]);
    if (k > 0) CHECK(curve.min_curve[k - 1] <= curve.min_curve[k]);
  }
  CHECK(curve.max_curve.back() == 1.0);
  CHECK(accuracy_at(errs, 0.25) == curve.min_curve[24]);

  std::vector<LocalizationError> with_miss = zeros;
  with_miss.push_back(with_eps(std::numeric_limits<double>::infinity()));
  CHECK(accuracy_at(with_miss, 0.25) == 0.8);

  CHECK_THROWS_AS(accuracy_curve({}, th), Error);
  const std::vector<double> bad = {0.0};
  CHECK_THROWS_AS(accuracy_curve(zeros, bad), Error);
}

TEST_CASE("throughput score") {
  // 76 fps at 1280x720 with a CPU score of 1747: 54720 / 1747, about 31.32.
  CHECK(tp_score(76, 1280, 720, 1747) == doctest::Approx(54720.0 / 1747));
  CHECK(tp_score(76, 720, 1280, 1747) == tp_score(76, 1280, 720, 1747));
  CHECK(tp_score(152, 1280, 720, 1747) == doctest::Approx(2 * tp_score(76, 1280, 720, 1747)));
  CHECK_THROWS_AS(tp_score(0, 1280, 720, 1747), Error);
  CHECK_THROWS_AS(tp_score(76, 1280, 720, -1), Error);
}

TEST_CASE("evaluate and noise sweep shapes") {
  CorpusSpec spec;
  spec.n_faces = 2;
  const auto faces = synth_corpus(spec);
  std::vector<LabeledImage> data;
  for (const auto& f : faces) data.push_back({&f.image, &f.annotation});
  const Mlp frontal = mlp_new(60, 30, 1, Head::Regression, 1);
  const Mlp lateral = mlp_new(60, 30, 1, Head::Binary, 2);
  const Evaluation ev = evaluate(data, frontal, lateral);
  CHECK(ev.results.size() == 2);
  CHECK(ev.errors.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(ev.errors[k].d_eye ==
          doctest::Approx(distance(faces[k].annotation.left_eye, faces[k].annotation.right_eye)));
  }
  const std::vector<double> sigmas = {0, 10, 30};
  const auto rows = noise_sweep(data, frontal, lateral, sigmas, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].sigma == 30);
  CHECK(rows[0].accuracy == accuracy_at(ev.errors, kIrisThreshold));
}

}  // TEST_SUITE
