// zep: train, localize, eval, encode, project, bench, synth.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 a face without candidates.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zep/bench.hpp"
#include "zep/config.hpp"
#include "zep/dataset.hpp"
#include "zep/encoder.hpp"
#include "zep/error.hpp"
#include "zep/eval.hpp"
#include "zep/localizer.hpp"
#include "zep/mlp.hpp"
#include "zep/parallel.hpp"
#include "zep/projections.hpp"

namespace fs = std::filesystem;
using namespace zep;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNoCandidates = 3;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Output goes to a file when a path is given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw Error(ErrorCode::Io, "cannot write " + path);
  }
  std::ostream& out() { return file_.is_open() ? file_ : std::cout; }
  void close() {
    if (!file_.is_open()) return;
    file_.close();
    if (!file_) throw Error(ErrorCode::Io, "write failed");
  }

 private:
  std::ofstream file_;
};

struct Dataset {
  std::vector<Annotation> annotations;
  std::vector<GrayImage> images;

  std::vector<LabeledImage> labeled() const {
    std::vector<LabeledImage> v;
    for (std::size_t i = 0; i < images.size(); ++i) v.push_back({&images[i], &annotations[i]});
    return v;
  }
};

fs::path image_path(const fs::path& dir, const std::string& id) {
  fs::path p = dir / id;
  if (p.extension() != ".pgm") p += ".pgm";
  return p;
}

// Every annotation row must have a readable image; all problems are listed
// before failing.
Dataset load_dataset(const fs::path& images_dir, const fs::path& annotations) {
  Dataset d;
  d.annotations = load_annotations(annotations);
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < d.annotations.size(); ++i) {
    const auto& a = d.annotations[i];
    const fs::path p = image_path(images_dir, a.id);
    try {
      d.images.push_back(load_pgm(p));
      if (!d.images.back().bounds().contains(a.face_rect)) {
        problems.push_back("row " + std::to_string(i + 2) + " (" + a.id +
                           "): face rect outside the image");
      }
    } catch (const Error& e) {
      problems.push_back("row " + std::to_string(i + 2) + " (" + a.id + "): " + e.what());
      d.images.emplace_back();
    }
  }
  if (!problems.empty()) {
    std::string msg = "annotation/image mismatch:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::Malformed, msg);
  }
  return d;
}

struct Models {
  Mlp frontal;
  Mlp lateral;
};

Models load_models(const std::string& frontal, const std::string& lateral) {
  return {load_model(frontal), load_model(lateral)};
}

ShadingMix parse_mix(const std::string& s) {
  if (s == "mixed") return ShadingMix::Mixed;
  if (s == "frontal") return ShadingMix::FrontalOnly;
  if (s == "lateral") return ShadingMix::LateralOnly;
  throw Error(ErrorCode::InvalidArgument, "unknown shading mix '" + s + "'");
}

std::vector<double> read_signal(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<double> v;
  std::string tok;
  int line = 0;
  std::string text;
  while (std::getline(in, text)) {
    ++line;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    for (char& c : text) {
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream ss(text);
    while (ss >> tok) {
      std::size_t used = 0;
      double x = 0;
      try {
        x = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        throw Error(ErrorCode::Malformed,
                    path.string() + ":" + std::to_string(line) + ": bad number '" + tok + "'");
      }
      v.push_back(x);
    }
  }
  return v;
}

Rect parse_rect(const std::string& s) {
  Rect r;
  char sep[3] = {};
  std::istringstream in(s);
  if (!(in >> r.row_min >> sep[0] >> r.row_max >> sep[1] >> r.col_min >> sep[2] >> r.col_max) ||
      sep[0] != ',' || sep[1] != ',' || sep[2] != ',' || !r.valid()) {
    throw Error(ErrorCode::InvalidArgument, "rect must be r0,r1,c0,c1 (inclusive): '" + s + "'");
  }
  return r;
}

void write_epochs(std::ostream& out, const std::vector<Epoch>& epochs) {
  out << "index,duration,amplitude,shape\n";
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    out << i << ',' << epochs[i].duration << ',' << fmt("%.6g", epochs[i].amplitude) << ','
        << epochs[i].shape << '\n';
  }
}

void write_values(std::ostream& out, const std::vector<double>& values) {
  out << "index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << fmt("%.6f", values[i]) << '\n';
}

std::string coord(const std::optional<EyeEstimate>& e, bool row) {
  if (!e) return "";
  return fmt("%.2f", row ? e->center.row : e->center.col);
}

std::string confidence(const std::optional<EyeEstimate>& e) {
  return e ? fmt("%.4f", e->confidence) : "";
}

void write_localize_csv(std::ostream& out, const std::vector<Annotation>& anns,
                        const std::vector<FaceResult>& results) {
  out << "id,le_row,le_col,re_row,re_col,mode,le_conf,re_conf\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out << anns[i].id << ',' << coord(r.left, true) << ',' << coord(r.left, false) << ','
        << coord(r.right, true) << ',' << coord(r.right, false) << ',' << to_string(r.illumination)
        << ',' << confidence(r.left) << ',' << confidence(r.right) << '\n';
  }
}

std::string eps_text(double v) { return std::isfinite(v) ? fmt("%.6f", v) : "inf"; }

void write_accuracy_table(std::ostream& out, std::span<const LocalizationError> errors) {
  const double ts[] = {kPupilThreshold, kIrisThreshold, kScleraThreshold};
  const auto curve = accuracy_curve(errors, ts);
  out << "threshold,worst_eye,average,best_eye\n";
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    out << fmt("%.2f", curve.thresholds[i]) << ',' << fmt("%.4f", curve.min_curve[i]) << ','
        << fmt("%.4f", curve.avg_curve[i]) << ',' << fmt("%.4f", curve.max_curve[i]) << '\n';
  }
}

struct TrainArgs {
  std::string head = "binary";
  std::string out;
  std::string images;
  std::string annotations;
  int faces = 40;
  int val_faces = 40;
  std::string mix;  // default follows the head
  std::uint64_t seed = 1;
  int epochs = -1;
  double lr = -1;
  std::string loss_csv;
};

int cmd_train(const TrainArgs& a, const Config& base) {
  Config cfg = base;
  if (a.epochs >= 0) cfg.mlp_epochs = a.epochs;
  if (a.lr > 0) cfg.mlp_learning_rate = a.lr;
  const Head head = head_from_string(a.head);

  // Validation faces are always synthetic and held out (different seed).
  std::vector<PatchSample> train_samples;
  std::vector<PatchSample> val_samples;
  if (!a.images.empty() || !a.annotations.empty()) {
    if (a.images.empty() || a.annotations.empty()) {
      throw Error(ErrorCode::InvalidArgument, "--images and --annotations go together");
    }
    const Dataset d = load_dataset(a.images, a.annotations);
    const auto labeled = d.labeled();
    // Every fifth image is held out for validation.
    std::vector<LabeledImage> tr, va;
    for (std::size_t i = 0; i < labeled.size(); ++i) (i % 5 == 4 ? va : tr).push_back(labeled[i]);
    train_samples = extract_samples(tr, head, cfg.background_per_eye, a.seed, cfg);
    val_samples = extract_samples(va, head, 0, a.seed + 1, cfg);
  } else {
    CorpusSpec spec;
    spec.n_faces = a.faces;
    spec.seed = a.seed;
    spec.mix = a.mix.empty()
                   ? (head == Head::Binary ? ShadingMix::LateralOnly : ShadingMix::FrontalOnly)
                   : parse_mix(a.mix);
    spec.background_per_eye = cfg.background_per_eye;
    train_samples = build_corpus(spec, head, cfg).samples;
    CorpusSpec vspec;
    vspec.n_faces = a.val_faces;
    vspec.seed = a.seed + 0x9e3779b9ULL;
    vspec.id_prefix = "val";
    vspec.mix = spec.mix;
    val_samples = build_corpus(vspec, head, cfg).samples;
  }
  if (train_samples.empty()) throw Error(ErrorCode::InvalidArgument, "no training samples");

  // Open the output before the long part so a bad path fails fast.
  Sink model_check(a.out);
  model_check.close();

  const TrainingSet train_set = to_training_set(train_samples, head);
  const Mlp init =
      mlp_new(static_cast<int>(zep_length(cfg.encoder)), cfg.hidden_width(), 1, head, a.seed);
  TrainOptions opts;
  opts.epochs = cfg.mlp_epochs;
  opts.learning_rate = cfg.mlp_learning_rate;
  opts.seed = a.seed;
  const TrainResult r = train(init, train_set, opts);
  save_model(r.model, a.out);

  if (!a.loss_csv.empty()) {
    Sink loss(a.loss_csv);
    loss.out() << "epoch,loss\n";
    for (std::size_t i = 0; i < r.loss_trace.size(); ++i) {
      loss.out() << i << ',' << fmt("%.8f", r.loss_trace[i]) << '\n';
    }
    loss.close();
  }

  const TrainingSet val_set = to_training_set(val_samples, head);
  std::cout << "head," << to_string(head) << '\n'
            << "samples," << train_set.features.size() << '\n'
            << "epochs," << r.loss_trace.size() << '\n'
            << "final_loss,"
            << (r.loss_trace.empty() ? std::string("") : fmt("%.6f", r.loss_trace.back())) << '\n';
  if (!val_set.features.empty()) {
    std::cout << "validation_mse," << fmt("%.6f", mean_squared_error(r.model, val_set)) << '\n';
    if (head == Head::Binary) {
      std::cout << "validation_accuracy," << fmt("%.4f", binary_accuracy(r.model, val_set)) << '\n';
    }
  }
  return kExitOk;
}

int cmd_localize(const std::string& images, const std::string& annotations,
                 const std::string& frontal, const std::string& lateral, const std::string& out,
                 const Config& cfg) {
  const Models m = load_models(frontal, lateral);
  const Dataset d = load_dataset(images, annotations);
  const auto ev = evaluate(d.labeled(), m.frontal, m.lateral, cfg);
  Sink sink(out);
  write_localize_csv(sink.out(), d.annotations, ev.results);
  sink.close();
  int missing = 0;
  for (std::size_t i = 0; i < ev.results.size(); ++i) {
    if (!ev.results[i].complete()) {
      ++missing;
      std::cerr << "no candidates: " << d.annotations[i].id << '\n';
    }
  }
  return missing ? kExitNoCandidates : kExitOk;
}

struct EvalArgs {
  std::string images;
  std::string annotations;
  std::string frontal;
  std::string lateral;
  std::string per_image;
  std::string curve;
  std::vector<double> noise;
  std::uint64_t seed = 1;
};

int cmd_eval(const EvalArgs& a, const Config& cfg) {
  const Models m = load_models(a.frontal, a.lateral);
  const Dataset d = load_dataset(a.images, a.annotations);
  const auto labeled = d.labeled();
  const auto ev = evaluate(labeled, m.frontal, m.lateral, cfg);

  if (!a.per_image.empty()) {
    Sink s(a.per_image);
    s.out() << "id,eps_l,eps_r,eps\n";
    for (std::size_t i = 0; i < ev.errors.size(); ++i) {
      const auto& e = ev.errors[i];
      const double d_eye = e.d_eye > 0 ? e.d_eye : 1.0;
      s.out() << d.annotations[i].id << ',' << eps_text(e.eps_left / d_eye) << ','
              << eps_text(e.eps_right / d_eye) << ',' << eps_text(e.eps) << '\n';
    }
    s.close();
  }
  if (!a.curve.empty()) {
    std::vector<double> ts;
    for (int k = 1; k <= 50; ++k) ts.push_back(0.01 * k);
    const auto c = accuracy_curve(ev.errors, ts);
    Sink s(a.curve);
    s.out() << "threshold,min,avg,max\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
      s.out() << fmt("%.2f", ts[i]) << ',' << fmt("%.4f", c.min_curve[i]) << ','
              << fmt("%.4f", c.avg_curve[i]) << ',' << fmt("%.4f", c.max_curve[i]) << '\n';
    }
    s.close();
  }

  std::cout << "images," << ev.errors.size() << '\n';
  write_accuracy_table(std::cout, ev.errors);
  if (!a.noise.empty()) {
    const auto rows = noise_sweep(labeled, m.frontal, m.lateral, a.noise, a.seed, cfg);
    std::cout << "sigma,accuracy_at_0.10\n";
    for (const auto& r : rows)
      std::cout << fmt("%g", r.sigma) << ',' << fmt("%.4f", r.accuracy) << '\n';
  }
  return kExitOk;
}

struct EncodeArgs {
  std::string pgm;
  std::string signal;
  bool epochs = false;
  bool normalize = false;
  std::string projection = "ph";
  std::string out;
};

int cmd_encode(const EncodeArgs& a, const Config& cfg) {
  if (a.pgm.empty() == a.signal.empty()) {
    throw Error(ErrorCode::InvalidArgument, "give exactly one of --pgm or --signal");
  }
  Sink sink(a.out);
  if (!a.signal.empty()) {
    std::vector<double> s = read_signal(a.signal);
    if (a.normalize) s = normalize_projection(s).values;
    write_epochs(sink.out(), extract_epochs(s));
  } else {
    const GrayImage patch = load_pgm(a.pgm);
    if (!a.epochs) {
      write_values(sink.out(), zep_of_patch(patch, cfg.encoder).values);
    } else {
      const Rect r = patch.bounds();
      const SobelEnergy energy = sobel_energy(patch);
      Projection p;
      if (a.projection == "ph") {
        p = integral_projection_naive(patch, r, Axis::Horizontal);
      } else if (a.projection == "pv") {
        p = integral_projection_naive(patch, r, Axis::Vertical);
      } else if (a.projection == "eh") {
        p = integral_projection_naive(energy, r, Axis::Horizontal);
      } else if (a.projection == "ev") {
        p = integral_projection_naive(energy, r, Axis::Vertical);
      } else {
        throw Error(ErrorCode::InvalidArgument, "projection must be ph, pv, eh or ev");
      }
      write_epochs(sink.out(), extract_epochs(normalize_projection(p)));
    }
  }
  sink.close();
  return kExitOk;
}

int cmd_project(const std::string& pgm, const std::string& rect, const std::string& kind,
                const std::string& axis, bool naive, const std::string& out) {
  const GrayImage img = load_pgm(pgm);
  const Rect r = rect.empty() ? img.bounds() : parse_rect(rect);
  if (!img.bounds().contains(r)) throw Error(ErrorCode::OutOfBounds, "rect outside the image");
  Axis ax;
  if (axis == "h") {
    ax = Axis::Horizontal;
  } else if (axis == "v") {
    ax = Axis::Vertical;
  } else {
    throw Error(ErrorCode::InvalidArgument, "axis must be h or v");
  }
  Projection p;
  if (kind == "ipf") {
    p = naive ? integral_projection_naive(img, r, ax)
              : fast_projection(build_oriented_integrals(img, r), r, ax);
  } else if (kind == "epf") {
    p = naive ? edge_projection_naive(img, r, ax)
              : fast_projection(build_oriented_integrals(sobel_energy(img, r)), r, ax);
  } else {
    throw Error(ErrorCode::InvalidArgument, "kind must be ipf or epf");
  }
  Sink sink(out);
  write_values(sink.out(), p.values);
  sink.close();
  return kExitOk;
}

int cmd_bench(const BenchOptions& opts, const std::string& frontal, const std::string& lateral,
              const std::string& out, const Config& cfg) {
  const int n_in = static_cast<int>(zep_length(cfg.encoder));
  const Mlp fm = frontal.empty() ? mlp_new(n_in, cfg.hidden_width(), 1, Head::Regression, 1)
                                 : load_model(frontal);
  const Mlp lm =
      lateral.empty() ? mlp_new(n_in, cfg.hidden_width(), 1, Head::Binary, 2) : load_model(lateral);
  const BenchReport r = run_benchmark(opts, fm, lm, cfg);
  Sink sink(out);
  write_bench_csv(r, sink.out());
  sink.close();
  return kExitOk;
}

struct SynthArgs {
  std::string out;
  int faces = 20;
  std::uint64_t seed = 1;
  std::string mix = "mixed";
  double noise_max = -1;
  std::string id_prefix = "face";
};

int cmd_synth(const SynthArgs& a) {
  CorpusSpec spec;
  spec.n_faces = a.faces;
  spec.seed = a.seed;
  spec.mix = parse_mix(a.mix);
  spec.id_prefix = a.id_prefix;
  if (a.noise_max >= 0) spec.ranges.noise_max = a.noise_max;
  const auto faces = synth_corpus(spec);
  fs::create_directories(a.out);
  std::vector<Annotation> anns;
  for (const auto& f : faces) {
    save_pgm(f.image, image_path(a.out, f.annotation.id));
    anns.push_back(f.annotation);
  }
  save_annotations(anns, fs::path(a.out) / "annotations.csv");
  std::cout << "faces," << faces.size() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eye localization with zero-crossing encoded image projections"};
  app.require_subcommand(0, 1);

  std::string config_path;
  if (const char* env = std::getenv("ZEP_CONFIG")) config_path = env;
  std::vector<std::string> overrides;
  bool print_cfg = false;
  int threads = 0;
  app.add_option("--config", config_path, "key=value config file (default: $ZEP_CONFIG)");
  app.add_option("--set", overrides, "override one config key, key=value");
  app.add_flag("--print-config", print_cfg, "print the effective configuration and exit");
  app.add_option("--threads", threads, "worker threads (1 is the deterministic reference)")
      ->check(CLI::NonNegativeNumber);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "train one MLP head");
  train_cmd->add_option("--head", ta.head, "regression (frontal) or binary (lateral)")
      ->check(CLI::IsMember({"regression", "binary"}));
  train_cmd->add_option("-o,--out", ta.out, "model file")->required();
  train_cmd->add_option("--images", ta.images, "directory of <id>.pgm files");
  train_cmd->add_option("--annotations", ta.annotations, "annotation CSV");
  train_cmd->add_option("--faces", ta.faces, "synthetic training faces");
  train_cmd->add_option("--val-faces", ta.val_faces, "synthetic validation faces");
  train_cmd->add_option("--mix", ta.mix, "synthetic shading: mixed, frontal or lateral");
  train_cmd->add_option("--seed", ta.seed);
  train_cmd->add_option("--epochs", ta.epochs);
  train_cmd->add_option("--lr", ta.lr);
  train_cmd->add_option("--loss-csv", ta.loss_csv, "per-epoch loss trace");

  std::string images, annotations, frontal, lateral, out;
  auto* loc_cmd = app.add_subcommand("localize", "locate both eyes in every annotated face");
  loc_cmd->add_option("--images", images)->required();
  loc_cmd->add_option("--annotations", annotations)->required();
  loc_cmd->add_option("--frontal-model", frontal)->required();
  loc_cmd->add_option("--lateral-model", lateral)->required();
  loc_cmd->add_option("-o,--out", out, "results CSV (default stdout)");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "stringent-criterion accuracy");
  eval_cmd->add_option("--images", ea.images)->required();
  eval_cmd->add_option("--annotations", ea.annotations)->required();
  eval_cmd->add_option("--frontal-model", ea.frontal)->required();
  eval_cmd->add_option("--lateral-model", ea.lateral)->required();
  eval_cmd->add_option("--per-image", ea.per_image, "CSV id,eps_l,eps_r,eps");
  eval_cmd->add_option("--curve", ea.curve, "CSV threshold,min,avg,max");
  eval_cmd->add_option("--noise", ea.noise, "noise sigmas for a degradation sweep, e.g. 0,10,30")
      ->delimiter(',');
  eval_cmd->add_option("--seed", ea.seed, "noise seed");

  EncodeArgs ca;
  auto* enc_cmd = app.add_subcommand("encode", "ZEP feature or epoch list");
  enc_cmd->add_option("--pgm", ca.pgm, "patch image");
  enc_cmd->add_option("--signal", ca.signal, "CSV signal, taken as already centered");
  enc_cmd->add_flag("--epochs", ca.epochs, "epoch list for --pgm instead of the ZEP");
  enc_cmd->add_option("--projection", ca.projection, "ph, pv, eh or ev (with --epochs)");
  enc_cmd->add_flag("--normalize", ca.normalize, "center and scale the --signal first");
  enc_cmd->add_option("-o,--out", ca.out);

  std::string pgm, rect, kind = "ipf", axis = "h";
  bool naive = false;
  auto* proj_cmd = app.add_subcommand("project", "one projection as index,value CSV");
  proj_cmd->add_option("--pgm", pgm)->required();
  proj_cmd->add_option("--rect", rect, "r0,r1,c0,c1 inclusive (default: whole image)");
  proj_cmd->add_option("--kind", kind, "ipf or epf");
  proj_cmd->add_option("--axis", axis, "h (per column) or v (per row)");
  proj_cmd->add_flag("--naive", naive, "direct summation instead of integral images");
  proj_cmd->add_option("-o,--out", out);

  BenchOptions bo;
  bool no_naive = false;
  std::string bench_frontal, bench_lateral, bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "stage timings and naive/fast comparison");
  bench_cmd->add_option("--face-size", bo.face_size);
  bench_cmd->add_option("--iterations", bo.iterations)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--warmup", bo.warmup);
  bench_cmd->add_flag("--no-naive", no_naive, "skip the slow reference scan");
  bench_cmd->add_option("--cpu-score", bo.cpu_score);
  bench_cmd->add_option("--frame-width", bo.frame_w);
  bench_cmd->add_option("--frame-height", bo.frame_h);
  bench_cmd->add_option("--frontal-model", bench_frontal);
  bench_cmd->add_option("--lateral-model", bench_lateral);
  bench_cmd->add_option("-o,--out", bench_out);

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic face corpus");
  synth_cmd->add_option("-o,--out", sa.out, "output directory")->required();
  synth_cmd->add_option("--faces", sa.faces);
  synth_cmd->add_option("--seed", sa.seed);
  synth_cmd->add_option("--mix", sa.mix, "mixed, frontal or lateral");
  synth_cmd->add_option("--noise-max", sa.noise_max);
  synth_cmd->add_option("--id-prefix", sa.id_prefix);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    Config cfg = config_path.empty() ? Config{} : load_config(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::cerr << "--set expects key=value, got '" << kv << "'\n";
        return kExitUsage;
      }
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (threads > 0) set_num_threads(threads);

    if (print_cfg) {
      print_config(cfg, std::cout);
      return kExitOk;
    }
    if (*train_cmd) return cmd_train(ta, cfg);
    if (*loc_cmd) return cmd_localize(images, annotations, frontal, lateral, out, cfg);
    if (*eval_cmd) return cmd_eval(ea, cfg);
    if (*enc_cmd) return cmd_encode(ca, cfg);
    if (*proj_cmd) return cmd_project(pgm, rect, kind, axis, naive, out);
    if (*bench_cmd) {
      bo.include_naive = !no_naive;
      return cmd_bench(bo, bench_frontal, bench_lateral, bench_out, cfg);
    }
    if (*synth_cmd) return cmd_synth(sa);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "zep: " << to_string(e.code()) << ": " << e.what() << '\n';
    if (e.code() == ErrorCode::NoCandidates) return kExitNoCandidates;
    return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "zep: " << e.what() << '\n';
    return kExitData;
  }
}
