#include "zep/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "zep/error.hpp"

namespace zep {

const char* to_string(Head head) { return head == Head::Regression ? "regression" : "binary"; }

Head head_from_string(const std::string& s) {
  if (s == "regression") return Head::Regression;
  if (s == "binary") return Head::Binary;
  throw Error(ErrorCode::InvalidArgument, "unknown head '" + s + "'");
}

Mlp mlp_new(int n_in, int n_hidden, int n_out, Head head, std::uint64_t seed) {
  if (n_in < 1 || n_hidden < 1 || n_out < 1) {
    throw Error(ErrorCode::InvalidArgument, "layer widths must be >= 1");
  }
  Mlp m;
  m.n_in = n_in;
  m.n_hidden = n_hidden;
  m.n_out = n_out;
  m.head = head;
  std::mt19937_64 rng(seed);
  auto fill = [&](std::vector<double>& v, std::size_t n, int fan_in) {
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-a, a);
    v.resize(n);
    for (auto& x : v) x = u(rng);
  };
  fill(m.w1, static_cast<std::size_t>(n_hidden) * n_in, n_in);
  fill(m.b1, static_cast<std::size_t>(n_hidden), n_in);
  fill(m.w2, static_cast<std::size_t>(n_out) * n_hidden, n_hidden);
  fill(m.b2, static_cast<std::size_t>(n_out), n_hidden);
  return m;
}

namespace {

void check_input(const Mlp& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.n_in) {
    throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                                  " values, model expects " +
                                                  std::to_string(m.n_in));
  }
}

void hidden_layer(const Mlp& m, std::span<const double> x, std::vector<double>& h) {
  h.resize(static_cast<std::size_t>(m.n_hidden));
  for (int u = 0; u < m.n_hidden; ++u) {
    const double* w = m.w1.data() + static_cast<std::size_t>(u) * m.n_in;
    double a = m.b1[static_cast<std::size_t>(u)];
    for (int i = 0; i < m.n_in; ++i) a += w[i] * x[static_cast<std::size_t>(i)];
    h[static_cast<std::size_t>(u)] = std::tanh(a);
  }
}

double output_unit(const Mlp& m, const std::vector<double>& h, int o) {
  const double* w = m.w2.data() + static_cast<std::size_t>(o) * m.n_hidden;
  double a = m.b2[static_cast<std::size_t>(o)];
  for (int u = 0; u < m.n_hidden; ++u) a += w[u] * h[static_cast<std::size_t>(u)];
  if (m.head == Head::Regression) return a;
  // tanh rounds to +-1 beyond |a| ~ 19; keep the binary output strictly inside.
  static const double bound = std::nextafter(1.0, 0.0);
  return std::clamp(std::tanh(a), -bound, bound);
}

}  // namespace

std::vector<double> forward_all(const Mlp& m, std::span<const double> x) {
  check_input(m, x);
  std::vector<double> h;
  hidden_layer(m, x, h);
  std::vector<double> y(static_cast<std::size_t>(m.n_out));
  for (int o = 0; o < m.n_out; ++o) y[static_cast<std::size_t>(o)] = output_unit(m, h, o);
  return y;
}

double forward(const Mlp& m, std::span<const double> x) {
  check_input(m, x);
  thread_local std::vector<double> h;
  hidden_layer(m, x, h);
  return output_unit(m, h, 0);
}

std::vector<double> backprop_gradient(const Mlp& m, std::span<const double> x, double target) {
  check_input(m, x);
  if (m.n_out != 1) {
    throw Error(ErrorCode::DimensionMismatch, "training supports a single output unit");
  }
  std::vector<double> h;
  hidden_layer(m, x, h);
  const double y = output_unit(m, h, 0);
  double delta_out = 2.0 * (y - target);
  if (m.head == Head::Binary) delta_out *= 1.0 - y * y;

  std::vector<double> g(m.parameter_count(), 0.0);
  double* gw1 = g.data();
  double* gb1 = gw1 + m.w1.size();
  double* gw2 = gb1 + m.b1.size();
  double* gb2 = gw2 + m.w2.size();
  gb2[0] = delta_out;
  for (int u = 0; u < m.n_hidden; ++u) {
    const auto uu = static_cast<std::size_t>(u);
    gw2[u] = delta_out * h[uu];
    const double delta_h = delta_out * m.w2[uu] * (1.0 - h[uu] * h[uu]);
    gb1[u] = delta_h;
    double* row = gw1 + uu * static_cast<std::size_t>(m.n_in);
    for (int i = 0; i < m.n_in; ++i) row[i] = delta_h * x[static_cast<std::size_t>(i)];
  }
  return g;
}

namespace {

std::vector<double*> parameter_slots(Mlp& m) {
  std::vector<double*> p;
  p.reserve(m.parameter_count());
  for (auto* v : {&m.w1, &m.b1, &m.w2, &m.b2}) {
    for (auto& x : *v) p.push_back(&x);
  }
  return p;
}

void validate_set(const Mlp& m, const TrainingSet& data) {
  if (data.features.size() != data.targets.size()) {
    throw Error(ErrorCode::DimensionMismatch, "features and targets differ in length");
  }
  if (data.head != m.head) {
    throw Error(ErrorCode::InvalidArgument, "training set head does not match the model");
  }
  for (const auto& f : data.features) check_input(m, f);
}

}  // namespace

TrainResult train(Mlp m, const TrainingSet& data, const TrainOptions& opts) {
  validate_set(m, data);
  if (data.features.empty()) throw Error(ErrorCode::InvalidArgument, "empty training set");
  if (m.n_out != 1) {
    throw Error(ErrorCode::DimensionMismatch, "training supports a single output unit");
  }

  TrainResult result;
  std::vector<std::size_t> order(data.features.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(opts.seed);
  std::vector<double> h;
  const double lr = opts.learning_rate;

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    for (std::size_t idx : order) {
      const auto& x = data.features[idx];
      const double t = data.targets[idx];
      hidden_layer(m, x, h);
      const double y = output_unit(m, h, 0);
      loss += (y - t) * (y - t);
      if (lr == 0.0) continue;

      double delta_out = 2.0 * (y - t);
      if (m.head == Head::Binary) delta_out *= 1.0 - y * y;
      for (int u = 0; u < m.n_hidden; ++u) {
        const auto uu = static_cast<std::size_t>(u);
        const double delta_h = delta_out * m.w2[uu] * (1.0 - h[uu] * h[uu]);
        m.w2[uu] -= lr * delta_out * h[uu];
        m.b1[uu] -= lr * delta_h;
        double* row = m.w1.data() + uu * static_cast<std::size_t>(m.n_in);
        for (int i = 0; i < m.n_in; ++i) row[i] -= lr * delta_h * x[static_cast<std::size_t>(i)];
      }
      m.b2[0] -= lr * delta_out;
    }
    loss /= static_cast<double>(order.size());
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::Divergence, "training diverged at epoch " + std::to_string(epoch));
    }
    result.loss_trace.push_back(loss);
  }
  result.model = std::move(m);
  return result;
}

double gradient_check(const Mlp& m, std::span<const double> x, double target) {
  const std::vector<double> analytic = backprop_gradient(m, x, target);
  Mlp probe = m;
  auto slots = parameter_slots(probe);
  constexpr double kStep = 1e-4;
  auto loss = [&] {
    const double y = forward(probe, x);
    return (y - target) * (y - target);
  };
  double worst = 0.0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const double saved = *slots[k];
    *slots[k] = saved + kStep;
    const double up = loss();
    *slots[k] = saved - kStep;
    const double down = loss();
    *slots[k] = saved;
    const double numeric = (up - down) / (2.0 * kStep);
    const double scale = std::max(std::abs(numeric), std::abs(analytic[k]));
    // Below this magnitude both are zero up to the finite-difference noise floor.
    if (scale < 1e-9) continue;
    worst = std::max(worst, std::abs(numeric - analytic[k]) / scale);
  }
  return worst;
}

double binary_accuracy(const Mlp& m, const TrainingSet& data) {
  validate_set(m, data);
  if (data.features.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < data.features.size(); ++k) {
    const double y = forward(m, data.features[k]);
    if ((y >= 0.0) == (data.targets[k] >= 0.0)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.features.size());
}

double mean_squared_error(const Mlp& m, const TrainingSet& data) {
  validate_set(m, data);
  if (data.features.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < data.features.size(); ++k) {
    const double d = forward(m, data.features[k]) - data.targets[k];
    acc += d * d;
  }
  return acc / static_cast<double>(data.features.size());
}

namespace {

constexpr const char* kMagic = "ZEPMLP v1";

void write_row(std::ostream& out, const double* v, std::size_t n) {
  char buf[64];
  for (std::size_t k = 0; k < n; ++k) {
    std::snprintf(buf, sizeof buf, "%a", v[k]);
    if (k) out << ' ';
    out << buf;
  }
  out << '\n';
}

std::vector<double> read_row(std::istream& in, std::size_t n, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::Malformed, "model file ends before " + what);
  }
  std::vector<double> row;
  row.reserve(n);
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw Error(ErrorCode::Malformed, "bad number '" + tok + "' in " + what);
    }
    row.push_back(v);
  }
  if (row.size() != n) {
    throw Error(ErrorCode::Malformed, what + " has " + std::to_string(row.size()) +
                                          " values, expected " + std::to_string(n));
  }
  return row;
}

}  // namespace

void save_model(const Mlp& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << kMagic << '\n'
      << to_string(m.head) << '\n'
      << m.n_in << ' ' << m.n_hidden << ' ' << m.n_out << '\n';
  for (int u = 0; u < m.n_hidden; ++u) {
    write_row(out, m.w1.data() + static_cast<std::size_t>(u) * m.n_in,
              static_cast<std::size_t>(m.n_in));
  }
  write_row(out, m.b1.data(), m.b1.size());
  for (int o = 0; o < m.n_out; ++o) {
    write_row(out, m.w2.data() + static_cast<std::size_t>(o) * m.n_hidden,
              static_cast<std::size_t>(m.n_hidden));
  }
  write_row(out, m.b2.data(), m.b2.size());
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

Mlp load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Malformed, "empty model file");
  if (line.rfind("ZEPMLP", 0) != 0) {
    throw Error(ErrorCode::Malformed, "not a model file: " + path.string());
  }
  if (line != kMagic) throw Error(ErrorCode::Version, "unsupported model version '" + line + "'");

  Mlp m;
  if (!std::getline(in, line)) throw Error(ErrorCode::Malformed, "missing head tag");
  try {
    m.head = head_from_string(line);
  } catch (const Error&) {
    throw Error(ErrorCode::Malformed, "bad head tag '" + line + "'");
  }
  if (!std::getline(in, line)) throw Error(ErrorCode::Malformed, "missing layer widths");
  std::istringstream widths(line);
  if (!(widths >> m.n_in >> m.n_hidden >> m.n_out) || m.n_in < 1 || m.n_hidden < 1 || m.n_out < 1) {
    throw Error(ErrorCode::Malformed, "bad layer widths '" + line + "'");
  }
  const auto n_in = static_cast<std::size_t>(m.n_in);
  const auto n_hidden = static_cast<std::size_t>(m.n_hidden);
  for (int u = 0; u < m.n_hidden; ++u) {
    auto row = read_row(in, n_in, "hidden weights row " + std::to_string(u));
    m.w1.insert(m.w1.end(), row.begin(), row.end());
  }
  m.b1 = read_row(in, n_hidden, "hidden biases");
  for (int o = 0; o < m.n_out; ++o) {
    auto row = read_row(in, n_hidden, "output weights row " + std::to_string(o));
    m.w2.insert(m.w2.end(), row.begin(), row.end());
  }
  m.b2 = read_row(in, static_cast<std::size_t>(m.n_out), "output biases");
  return m;
}

}  // namespace zep
