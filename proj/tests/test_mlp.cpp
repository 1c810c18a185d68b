#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "support.hpp"
#include "zep/error.hpp"
#include "zep/mlp.hpp"

using namespace zep;

namespace {

Mlp zero_net(int n_in, int n_hidden, Head head) {
  Mlp m = mlp_new(n_in, n_hidden, 1, head, 1);
  for (auto* v : {&m.w1, &m.b1, &m.w2, &m.b2}) std::fill(v->begin(), v->end(), 0.0);
  return m;
}

std::vector<double> random_input(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = u(rng);
  return x;
}

// 200 points on either side of x - y = 0.1, with a 0.05 margin.
TrainingSet separable_set(std::uint64_t seed) {
  TrainingSet set;
  set.head = Head::Binary;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  while (set.features.size() < 200) {
    const double x = u(rng), y = u(rng);
    const double side = x - y - 0.1;
    if (std::abs(side) < 0.05) continue;
    set.features.push_back({x, y});
    set.targets.push_back(side > 0 ? 1.0 : -1.0);
  }
  return set;
}

// Brute-force search for any line with zero training errors.
bool linearly_separable(const TrainingSet& set) {
  for (int a = 0; a < 360; ++a) {
    const double th = a * M_PI / 180.0;
    for (int b = -150; b <= 150; ++b) {
      const double off = b / 100.0;
      bool ok = true;
      for (std::size_t k = 0; k < set.features.size() && ok; ++k) {
        const double s = std::cos(th) * set.features[k][0] + std::sin(th) * set.features[k][1] - off;
        ok = s * set.targets[k] > 0;
      }
      if (ok) return true;
    }
  }
  return false;
}

}  // namespace

TEST_SUITE("mlp") {

TEST_CASE("construction") {
  CHECK(default_hidden_width(60) == 30);
  const Mlp a = mlp_new(60, default_hidden_width(60), 1, Head::Binary, 7);
  CHECK(a.n_hidden == 30);
  CHECK(a.w1.size() == 1800);
  CHECK(a == mlp_new(60, 30, 1, Head::Binary, 7));
  CHECK(a != mlp_new(60, 30, 1, Head::Binary, 8));
  const double lim1 = 1 / std::sqrt(60.0), lim2 = 1 / std::sqrt(30.0);
  for (double w : a.w1) CHECK(std::abs(w) <= lim1);
  for (double w : a.w2) CHECK(std::abs(w) <= lim2);
  CHECK_THROWS_AS(mlp_new(0, 3, 1, Head::Binary, 1), Error);
  CHECK(head_from_string(to_string(Head::Regression)) == Head::Regression);
}

TEST_CASE("forward on fixed networks") {
  CHECK(forward(zero_net(4, 2, Head::Binary), std::vector<double>{1, 2, 3, 4}) == 0.0);
  CHECK(forward(zero_net(4, 2, Head::Regression), std::vector<double>{1, 2, 3, 4}) == 0.0);

  Mlp m = zero_net(2, 2, Head::Regression);
  m.w1 = {0.5, -1.0, 0.25, 0.75};
  m.b1 = {0.1, -0.2};
  m.w2 = {1.0, -2.0};
  m.b2 = {0.3};
  // By hand: h = (tanh(-1.4), tanh(1.55)) = (-0.885352, 0.914286);
  // y = h0 - 2 h1 + 0.3.
  const double expected = -2.412922628437918;
  CHECK(forward(m, std::vector<double>{1, 2}) == doctest::Approx(expected).epsilon(1e-12));
  m.head = Head::Binary;
  CHECK(forward(m, std::vector<double>{1, 2}) == doctest::Approx(std::tanh(expected)));

  CHECK_THROWS_AS(forward(m, std::vector<double>{1}), Error);
}

TEST_CASE("binary outputs stay strictly inside (-1, 1)") {
  Mlp m = mlp_new(3, 2, 1, Head::Binary, 2);
  m.w2 = {500.0, 500.0};
  std::mt19937_64 rng(4);
  for (int k = 0; k < 200; ++k) {
    auto x = random_input(3, rng);
    for (auto& v : x) v *= 1e6;
    const double y = forward(m, x);
    CHECK(y > -1.0);
    CHECK(y < 1.0);
  }
}

TEST_CASE("separable toy set is learned") {
  const TrainingSet set = separable_set(3);
  REQUIRE(linearly_separable(set));
  TrainOptions opts;
  opts.epochs = 200;
  opts.learning_rate = 0.05;
  const auto r = train(mlp_new(2, 4, 1, Head::Binary, 5), set, opts);
  CHECK(r.loss_trace.size() == 200);
  CHECK(binary_accuracy(r.model, set) >= 0.98);
}

TEST_CASE("degenerate training settings leave the model alone") {
  const TrainingSet set = separable_set(4);
  const Mlp init = mlp_new(2, 3, 1, Head::Binary, 9);
  TrainOptions opts;
  opts.epochs = 0;
  const auto none = train(init, set, opts);
  CHECK(none.model == init);
  CHECK(none.loss_trace.empty());

  opts.epochs = 4;
  opts.learning_rate = 0.0;
  const auto still = train(init, set, opts);
  CHECK(still.model == init);
  REQUIRE(still.loss_trace.size() == 4);
  for (double l : still.loss_trace) CHECK(l == doctest::Approx(still.loss_trace[0]).epsilon(1e-12));
}

TEST_CASE("training is deterministic and validates its input") {
  const TrainingSet set = separable_set(5);
  TrainOptions opts;
  opts.epochs = 5;
  opts.seed = 11;
  const Mlp init = mlp_new(2, 3, 1, Head::Binary, 1);
  CHECK(train(init, set, opts).model == train(init, set, opts).model);

  TrainingSet wrong_head = set;
  wrong_head.head = Head::Regression;
  CHECK_THROWS_AS(train(init, wrong_head, opts), Error);
  TrainingSet ragged = set;
  ragged.targets.pop_back();
  CHECK_THROWS_AS(train(init, ragged, opts), Error);
  CHECK_THROWS_AS(train(mlp_new(3, 3, 1, Head::Binary, 1), set, opts), Error);
}

TEST_CASE("divergence reports the epoch") {
  TrainingSet set;
  set.head = Head::Regression;
  set.features = {{1.0, -1.0}};
  set.targets = {1};
  TrainOptions opts;
  // The output error is multiplied by about -400 per step.
  opts.epochs = 1000;
  opts.learning_rate = 100.0;
  try {
    train(mlp_new(2, 2, 1, Head::Regression, 1), set, opts);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Divergence);
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("gradient check") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 10; ++k) {
    for (Head head : {Head::Regression, Head::Binary}) {
      const Mlp m = mlp_new(6, 3, 1, head, rng());
      const auto x = random_input(6, rng);
      const double err = gradient_check(m, x, std::uniform_real_distribution<double>(-1, 1)(rng));
      CHECK(err < 1e-4);
    }
  }
  const Mlp zero = zero_net(6, 3, Head::Regression);
  const std::vector<double> x0(6, 0.0);
  for (double g : backprop_gradient(zero, x0, 0.0)) CHECK(g == 0.0);
  CHECK(gradient_check(zero, x0, 0.0) == 0.0);

  const Mlp m = mlp_new(6, 3, 1, Head::Binary, 3);
  const auto x = random_input(6, rng);
  CHECK(gradient_check(m, x, 0.5) == gradient_check(m, x, 0.5));
}

TEST_CASE("model files") {
  std::mt19937_64 rng(10);
  const auto p = test::tmp_path("model.txt");
  for (Head head : {Head::Regression, Head::Binary}) {
    const Mlp m = mlp_new(60, 30, 1, head, 123);
    save_model(m, p);
    const Mlp back = load_model(p);
    CHECK(back == m);
    for (int k = 0; k < 100; ++k) {
      const auto x = random_input(60, rng);
      CHECK(forward(back, x) == forward(m, x));
    }
  }

  std::ifstream in(p);
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text.rfind("ZEPMLP v1\nbinary\n60 30 1\n", 0) == 0);

  auto code_of = [&](const std::string& body) {
    std::ofstream(p) << body;
    try {
      load_model(p);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code_of(text.substr(0, text.size() / 2)) == ErrorCode::Malformed);
  CHECK(code_of("ZEPMLP v2\n" + text.substr(10)) == ErrorCode::Version);
  CHECK(code_of("hello\n") == ErrorCode::Malformed);
  CHECK(code_of("") == ErrorCode::Malformed);
  CHECK_THROWS_AS(save_model(mlp_new(2, 2, 1, Head::Binary, 1), "/nonexistent/dir/m.txt"), Error);
}

}  // TEST_SUITE
