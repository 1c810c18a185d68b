#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace zep {

/// Regression: identity output (frontal model). Binary: tanh output in (-1, 1)
/// (lateral model).
enum class Head { Regression, Binary };

const char* to_string(Head head);
Head head_from_string(const std::string& s);

/// One tanh hidden layer. Weights are row-major, one row per destination unit.
struct Mlp {
  int n_in = 0;
  int n_hidden = 0;
  int n_out = 0;
  Head head = Head::Regression;
  std::vector<double> w1;  // n_hidden x n_in
  std::vector<double> b1;  // n_hidden
  std::vector<double> w2;  // n_out x n_hidden
  std::vector<double> b2;  // n_out

  std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
  friend bool operator==(const Mlp&, const Mlp&) = default;
};

/// Hidden width used by the localizer: half the feature length.
inline int default_hidden_width(int n_in) { return n_in / 2 > 0 ? n_in / 2 : 1; }

/// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)], deterministic per seed.
Mlp mlp_new(int n_in, int n_hidden, int n_out, Head head, std::uint64_t seed);

std::vector<double> forward_all(const Mlp& m, std::span<const double> x);
double forward(const Mlp& m, std::span<const double> x);

struct TrainingSet {
  Head head = Head::Regression;
  std::vector<std::vector<double>> features;
  std::vector<double> targets;
};

struct TrainOptions {
  int epochs = 50;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;
};

struct TrainResult {
  Mlp model;
  std::vector<double> loss_trace;  // mean squared error per epoch
};

/// Per-sample SGD on squared error, reshuffled every epoch.
TrainResult train(Mlp m, const TrainingSet& data, const TrainOptions& opts);

/// Gradient of (forward(x) - target)^2 with respect to every parameter, in
/// the order w1, b1, w2, b2.
std::vector<double> backprop_gradient(const Mlp& m, std::span<const double> x, double target);

/// Largest relative error between backprop and central differences (step 1e-4).
double gradient_check(const Mlp& m, std::span<const double> x, double target);

/// Fraction of samples whose output sign matches the +-1 target.
double binary_accuracy(const Mlp& m, const TrainingSet& data);
double mean_squared_error(const Mlp& m, const TrainingSet& data);

void save_model(const Mlp& m, const std::filesystem::path& path);
Mlp load_model(const std::filesystem::path& path);

}  // namespace zep
