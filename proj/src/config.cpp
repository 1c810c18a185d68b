#include "zep/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "zep/error.hpp"

namespace zep {

const char* to_string(Illumination mode) {
  return mode == Illumination::Frontal ? "frontal" : "lateral";
}

const char* to_string(RegionRule rule) {
  return rule == RegionRule::LargestLower ? "largest-lower" : "largest";
}

const char* to_string(CenterRule rule) {
  return rule == CenterRule::WeightedCentroid ? "weighted-centroid" : "bounding-rect-center";
}

double Config::regression_distance_scale() const {
  if (regression_dmax > 0.0) return regression_dmax;
  // Offset along one axis at which two patch_size squares reach IoU 0.5:
  // (P - d) / (P + d) = 1/2. Targets hit zero where the negative band ends.
  return patch_size / 3.0;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(x)) {
    throw Error(ErrorCode::InvalidArgument, key + ": expected a number, got '" + v + "'");
  }
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_real(key, v);
  if (x != std::floor(x)) {
    throw Error(ErrorCode::InvalidArgument, key + ": expected an integer, got '" + v + "'");
  }
  return static_cast<int>(x);
}

RegionRule parse_region_rule(const std::string& key, const std::string& v) {
  if (v == "largest-lower") return RegionRule::LargestLower;
  if (v == "largest") return RegionRule::Largest;
  throw Error(ErrorCode::InvalidArgument, key + ": unknown region rule '" + v + "'");
}

CenterRule parse_center_rule(const std::string& key, const std::string& v) {
  if (v == "weighted-centroid") return CenterRule::WeightedCentroid;
  if (v == "bounding-rect-center") return CenterRule::BoundingRectCenter;
  throw Error(ErrorCode::InvalidArgument, key + ": unknown center rule '" + v + "'");
}

using Setter = std::function<void(Config&, const std::string&, const std::string&)>;

void add_mode_keys(std::map<std::string, Setter>& keys, const std::string& suffix,
                   ModeParams Config::* member) {
  keys["darkness_threshold." + suffix] = [member](Config& c, auto& k, auto& v) {
    (c.*member).darkness_threshold = parse_real(k, v);
  };
  keys["training_scheme." + suffix] = [member](Config& c, auto& k, auto& v) {
    try {
      (c.*member).head = head_from_string(v);
    } catch (const Error&) {
      throw Error(ErrorCode::InvalidArgument, k + ": unknown scheme '" + v + "'");
    }
  };
  keys["acceptance_threshold." + suffix] = [member](Config& c, auto& k, auto& v) {
    (c.*member).acceptance_threshold = parse_real(k, v);
  };
  keys["eye_area_selection." + suffix] = [member](Config& c, auto& k, auto& v) {
    (c.*member).region_rule = parse_region_rule(k, v);
  };
  keys["eye_center." + suffix] = [member](Config& c, auto& k, auto& v) {
    (c.*member).center_rule = parse_center_rule(k, v);
  };
  keys["training_database." + suffix] = [member](Config& c, auto&, auto& v) {
    (c.*member).training_database = v;
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> k;
    add_mode_keys(k, "frontal", &Config::frontal);
    add_mode_keys(k, "lateral", &Config::lateral);
    auto real = [&k](const char* name, double Config::* m) {
      k[name] = [m](Config& c, auto& key, auto& v) { c.*m = parse_real(key, v); };
    };
    auto integer = [&k](const char* name, int Config::* m) {
      k[name] = [m](Config& c, auto& key, auto& v) { c.*m = parse_int(key, v); };
    };
    k["encoder.max_epochs"] = [](Config& c, auto& key, auto& v) {
      c.encoder.max_epochs = parse_int(key, v);
    };
    k["encoder.shape_cap"] = [](Config& c, auto& key, auto& v) {
      c.encoder.shape_cap = parse_int(key, v);
    };
    k["encoder.shape_parameter"] = [](Config& c, auto& key, auto& v) {
      if (v == "extreme-count") {
        c.encoder.shape_parameter = ShapeParameter::ExtremeCount;
      } else if (v == "mode-range") {
        c.encoder.shape_parameter = ShapeParameter::ModeRange;
      } else {
        throw Error(ErrorCode::InvalidArgument, key + ": unknown shape parameter '" + v + "'");
      }
    };
    integer("face_size", &Config::face_size);
    integer("patch_size", &Config::patch_size);
    integer("scan_stride", &Config::scan_stride);
    real("roi.row_begin", &Config::roi_row_begin);
    real("roi.row_end", &Config::roi_row_end);
    real("roi.left_col_begin", &Config::roi_left_col_begin);
    real("roi.left_col_end", &Config::roi_left_col_end);
    real("roi.right_col_begin", &Config::roi_right_col_begin);
    real("roi.right_col_end", &Config::roi_right_col_end);
    real("illumination.ratio_min", &Config::illumination_ratio_min);
    real("illumination.ratio_max", &Config::illumination_ratio_max);
    real("lower_region_band", &Config::lower_region_band);
    integer("mlp.hidden", &Config::mlp_hidden);
    integer("mlp.epochs", &Config::mlp_epochs);
    real("mlp.learning_rate", &Config::mlp_learning_rate);
    real("mlp.regression_dmax", &Config::regression_dmax);
    integer("mlp.background_per_eye", &Config::background_per_eye);
    return k;
  }();
  return table;
}

}  // namespace

void apply_setting(Config& cfg, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end())
    throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
  it->second(cfg, key, value);
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Malformed,
                  path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void print_config(const Config& cfg, std::ostream& out) {
  const auto mode = [&](const char* suffix, const ModeParams& m) {
    out << "darkness_threshold." << suffix << '=' << m.darkness_threshold << '\n'
        << "training_database." << suffix << '=' << m.training_database << '\n'
        << "training_scheme." << suffix << '=' << to_string(m.head) << '\n'
        << "acceptance_threshold." << suffix << '=' << m.acceptance_threshold << '\n'
        << "eye_area_selection." << suffix << '=' << to_string(m.region_rule) << '\n'
        << "eye_center." << suffix << '=' << to_string(m.center_rule) << '\n';
  };
  out << "# per-illumination parameters\n";
  mode("frontal", cfg.frontal);
  mode("lateral", cfg.lateral);
  out << "# encoder\n"
      << "encoder.max_epochs=" << cfg.encoder.max_epochs << '\n'
      << "encoder.shape_cap=" << cfg.encoder.shape_cap << '\n'
      << "encoder.shape_parameter="
      << (cfg.encoder.shape_parameter == ShapeParameter::ExtremeCount ? "extreme-count"
                                                                      : "mode-range")
      << '\n'
      << "# geometry\n"
      << "face_size=" << cfg.face_size << '\n'
      << "patch_size=" << cfg.patch_size << '\n'
      << "scan_stride=" << cfg.scan_stride << '\n'
      << "roi.row_begin=" << cfg.roi_row_begin << '\n'
      << "roi.row_end=" << cfg.roi_row_end << '\n'
      << "roi.left_col_begin=" << cfg.roi_left_col_begin << '\n'
      << "roi.left_col_end=" << cfg.roi_left_col_end << '\n'
      << "roi.right_col_begin=" << cfg.roi_right_col_begin << '\n'
      << "roi.right_col_end=" << cfg.roi_right_col_end << '\n'
      << "illumination.ratio_min=" << cfg.illumination_ratio_min << '\n'
      << "illumination.ratio_max=" << cfg.illumination_ratio_max << '\n'
      << "lower_region_band=" << cfg.lower_region_band << '\n'
      << "# training\n"
      << "mlp.hidden=" << cfg.mlp_hidden << '\n'
      << "mlp.epochs=" << cfg.mlp_epochs << '\n'
      << "mlp.learning_rate=" << cfg.mlp_learning_rate << '\n'
      << "mlp.regression_dmax=" << cfg.regression_dmax << '\n'
      << "mlp.background_per_eye=" << cfg.background_per_eye << '\n';
}

}  // namespace zep
