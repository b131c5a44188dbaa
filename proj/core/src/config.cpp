#include "stresspath/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace stresspath {

namespace {

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    while (used < value.size() && std::isspace(static_cast<unsigned char>(value[used]))) ++used;
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("key '" + key + "' expects a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  double v = parse_double(key, value);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ValidationError("key '" + key + "' expects an integer, got '" + value + "'");
  return i;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ValidationError("key '" + key + "' expects true/false, got '" + value + "'");
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

const std::set<std::string>& region_selectors() {
  static const std::set<std::string> names = {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
  return names;
}

}  // namespace

void Config::validate() const {
  material.validate();
  if (!region_selectors().count(base_face))
    throw ValidationError("base_face must be one of xmin/xmax/ymin/ymax/zmin/zmax, got '" +
                          base_face + "'");
  for (const auto& r : fix_regions)
    if (!region_selectors().count(r.selector))
      throw ValidationError("fix_region selector '" + r.selector + "' is not recognised");
  for (const auto& r : load_regions)
    if (!region_selectors().count(r.selector))
      throw ValidationError("load_region selector '" + r.selector + "' is not recognised");
  if (!(base_face_tol > 0)) throw ValidationError("base_face_tol must be positive");
  if (!(theta_a > 1.0)) throw ValidationError("theta_a must be > 1");
  if (!(theta_s > 0.0 && theta_s < 1.0)) throw ValidationError("theta_s must lie in (0, 1)");
  if (!(layer_height > 0)) throw ValidationError("layer_height must be positive");
  if (!(line_spacing > 0)) throw ValidationError("line_spacing must be positive");
  if (contour_count < 0) throw ValidationError("contour_count must be >= 0");
  if (!(spline_p >= 0 && spline_p <= 1)) throw ValidationError("spline_p must lie in [0, 1]");
  if (!(epsilon_rel > 0)) throw ValidationError("epsilon_rel must be positive");
  if (!(solver_tol > 0)) throw ValidationError("solver_tol must be positive");
  if (solver_max_iter < 0) throw ValidationError("solver_max_iter must be >= 0");
  if (!(resample_step > 0)) throw ValidationError("resample_step must be positive");
  if (!(deviation_bound > 0)) throw ValidationError("deviation_bound must be positive");
  if (!(slice_min_edge_ratio >= 0 && slice_min_edge_ratio < 1))
    throw ValidationError("slice_min_edge_ratio must lie in [0, 1)");
  if (!(spacing_max_normalized > 1)) throw ValidationError("spacing_max_normalized must be > 1");
  if (!(histogram_bin > 0)) throw ValidationError("histogram_bin must be positive");
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
}

Config parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());

  Config cfg;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) +
                            " is not 'key = value': '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ValidationError("config line " + std::to_string(line_no) + " has an empty key or value");

    if (key == "node_path") cfg.node_path = value;
    else if (key == "ele_path") cfg.ele_path = value;
    else if (key == "stress_csv") cfg.stress_csv = value;
    else if (key == "base_face") cfg.base_face = value;
    else if (key == "base_face_tol") cfg.base_face_tol = parse_double(key, value);
    else if (key == "young_modulus") cfg.material.young_modulus = parse_double(key, value);
    else if (key == "poisson_ratio") cfg.material.poisson_ratio = parse_double(key, value);
    else if (key == "theta_a") cfg.theta_a = parse_double(key, value);
    else if (key == "theta_s") cfg.theta_s = parse_double(key, value);
    else if (key == "layer_height") cfg.layer_height = parse_double(key, value);
    else if (key == "line_spacing") cfg.line_spacing = parse_double(key, value);
    else if (key == "contour_count") cfg.contour_count = parse_int(key, value);
    else if (key == "spline_p") cfg.spline_p = parse_double(key, value);
    else if (key == "epsilon_rel") cfg.epsilon_rel = parse_double(key, value);
    else if (key == "solver_tol") cfg.solver_tol = parse_double(key, value);
    else if (key == "solver_max_iter") cfg.solver_max_iter = parse_int(key, value);
    else if (key == "resample_step") cfg.resample_step = parse_double(key, value);
    else if (key == "deviation_bound") cfg.deviation_bound = parse_double(key, value);
    else if (key == "rectify_pca") cfg.rectify_pca = parse_bool(key, value);
    else if (key == "slice_min_edge_ratio") cfg.slice_min_edge_ratio = parse_double(key, value);
    else if (key == "spacing_max_normalized") cfg.spacing_max_normalized = parse_double(key, value);
    else if (key == "histogram_bin") cfg.histogram_bin = parse_double(key, value);
    else if (key == "svg_export") cfg.svg_export = parse_bool(key, value);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "jobs") cfg.jobs = parse_int(key, value);
    else if (key == "fix") {
      // fix = <node> [axes], axes a subset of "xyz" (default all)
      std::istringstream ss(value);
      BoundaryConditions::Fix fix;
      std::string axes = "xyz";
      if (!(ss >> fix.node)) throw ValidationError("fix expects '<node> [axes]', got '" + value + "'");
      ss >> axes;
      fix.axes = {false, false, false};
      for (char c : axes) {
        if (c == 'x') fix.axes[0] = true;
        else if (c == 'y') fix.axes[1] = true;
        else if (c == 'z') fix.axes[2] = true;
        else throw ValidationError("fix axes must use only 'xyz', got '" + axes + "'");
      }
      cfg.fixes.push_back(fix);
    } else if (key == "load") {
      std::istringstream ss(value);
      BoundaryConditions::Load load;
      if (!(ss >> load.node >> load.force[0] >> load.force[1] >> load.force[2]))
        throw ValidationError("load expects '<node> <fx> <fy> <fz>', got '" + value + "'");
      cfg.loads.push_back(load);
    } else if (key == "fix_region") {
      cfg.fix_regions.push_back({value});
    } else if (key == "load_region") {
      std::istringstream ss(value);
      Config::LoadRegion region;
      if (!(ss >> region.selector >> region.total_force[0] >> region.total_force[1] >>
            region.total_force[2]))
        throw ValidationError("load_region expects '<selector> <fx> <fy> <fz>', got '" + value +
                              "'");
      cfg.load_regions.push_back(region);
    } else {
      throw ValidationError("unknown config key '" + key + "' on line " +
                            std::to_string(line_no));
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace stresspath
