#include "stresspath/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "parallel.hpp"
#include "stresspath/slicing.hpp"
#include "stresspath/stressflow.hpp"

namespace stresspath {

namespace fs = std::filesystem;

std::vector<int> select_region_nodes(const TetMesh& mesh, const std::string& selector,
                                     double tol) {
  if (selector.size() != 4)
    throw ValidationError("region selector must look like 'zmin', got '" + selector + "'");
  int axis;
  switch (selector[0]) {
    case 'x': axis = 0; break;
    case 'y': axis = 1; break;
    case 'z': axis = 2; break;
    default:
      throw ValidationError("region selector must start with x, y or z: '" + selector + "'");
  }
  const std::string side = selector.substr(1);
  if (side != "min" && side != "max")
    throw ValidationError("region selector must end in min or max: '" + selector + "'");

  std::vector<int> boundary = mesh.boundary_vertices();
  if (boundary.empty()) throw ValidationError("mesh has no boundary vertices");
  double extreme = mesh.vertices[boundary.front()][axis];
  for (int v : boundary)
    extreme = side == "min" ? std::min(extreme, mesh.vertices[v][axis])
                            : std::max(extreme, mesh.vertices[v][axis]);
  std::vector<int> nodes;
  for (int v : boundary)
    if (std::abs(mesh.vertices[v][axis] - extreme) <= tol) nodes.push_back(v);
  return nodes;
}

BoundaryConditions assemble_boundary_conditions(const TetMesh& mesh, const Config& cfg) {
  BoundaryConditions bc;
  bc.fixed = cfg.fixes;
  bc.loads = cfg.loads;
  for (const auto& region : cfg.fix_regions)
    for (int v : select_region_nodes(mesh, region.selector, cfg.base_face_tol))
      bc.fixed.push_back({v, {true, true, true}, Vec3::Zero()});
  for (const auto& region : cfg.load_regions) {
    std::vector<int> nodes = select_region_nodes(mesh, region.selector, cfg.base_face_tol);
    if (nodes.empty())
      throw ValidationError("load_region '" + region.selector + "' selected no nodes");
    const Vec3 per_node = region.total_force / static_cast<double>(nodes.size());
    for (int v : nodes) bc.loads.push_back({v, per_node});
  }
  return bc;
}

namespace {

void write_num(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(name) + ": " + e.what());
  } catch (const ComputeError& e) {
    throw ComputeError(std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw ComputeError(std::string(name) + ": " + e.what());
  }
}

std::string layer_name(int index, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "layer_%03d.%s", index, ext);
  return buf;
}

// ---------------------------------------------------------------- artifacts

void write_displacements(const std::vector<Vec3>& u, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "node,ux,uy,uz\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    out << i;
    for (int c = 0; c < 3; ++c) {
      out << ',';
      write_num(out, u[i][c]);
    }
    out << '\n';
  }
}

void write_distance(const DistanceField& dist, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "node,phi\n";
  for (Eigen::Index i = 0; i < dist.phi.size(); ++i) {
    out << i << ',';
    write_num(out, dist.phi[i]);
    out << '\n';
  }
}

DistanceField read_distance(const fs::path& path, std::size_t node_count) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  DistanceField dist;
  dist.phi.resize(static_cast<Eigen::Index>(node_count));
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    long node;
    double phi;
    if (!(ss >> node >> phi)) throw ValidationError("malformed distance row: " + line);
    if (node < 0 || node >= static_cast<long>(node_count))
      throw ValidationError("distance row for unknown node " + std::to_string(node));
    dist.phi[node] = phi;
    ++rows;
  }
  if (rows != node_count)
    throw ValidationError("distance file covers " + std::to_string(rows) + " of " +
                          std::to_string(node_count) + " nodes");
  return dist;
}

void write_slice(const Slice& slice, const fs::path& dir) {
  save_obj(slice.surface, dir / layer_name(slice.layer_index, "obj"));
  std::ofstream out(dir / layer_name(slice.layer_index, "csv"), std::ios::binary);
  if (!out) throw ValidationError("cannot write slice sidecar");
  out << "vertex,sxx,syy,szz,sxy,sxz,syz,nx,ny,nz\n";
  for (std::size_t v = 0; v < slice.surface.vertex_count(); ++v) {
    out << v;
    for (double c : slice.tensors[v]) {
      out << ',';
      write_num(out, c);
    }
    for (int c = 0; c < 3; ++c) {
      out << ',';
      write_num(out, slice.normals[v][c]);
    }
    out << '\n';
  }
}

Slice read_slice(const fs::path& dir, int layer_index, double iso_value) {
  Slice slice;
  slice.layer_index = layer_index;
  slice.iso_value = iso_value;
  slice.surface = load_tri_mesh(dir / layer_name(layer_index, "obj"));

  std::ifstream in(dir / layer_name(layer_index, "csv"));
  if (!in) throw ValidationError("missing slice sidecar for layer " + std::to_string(layer_index));
  std::string line;
  std::getline(in, line);
  slice.tensors.assign(slice.surface.vertex_count(), {0, 0, 0, 0, 0, 0});
  slice.normals.assign(slice.surface.vertex_count(), Vec3::UnitZ());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    long v;
    if (!(ss >> v) || v < 0 || v >= static_cast<long>(slice.surface.vertex_count()))
      throw ValidationError("malformed slice sidecar row: " + line);
    for (double& c : slice.tensors[v])
      if (!(ss >> c)) throw ValidationError("malformed slice sidecar row: " + line);
    for (int c = 0; c < 3; ++c)
      if (!(ss >> slice.normals[v][c]))
        throw ValidationError("malformed slice sidecar row: " + line);
  }
  StressTensorField local;
  local.tensors = slice.tensors;
  slice.stress = principal_decomposition(local).nodes;
  return slice;
}

void write_flow(const Slice& slice, const TangentFlow& projected, const TangentFlow& rectified,
                const TangentFlow& preprocessed, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write flow dump " + path.string());
  out << "vertex,critical,valid,fpx,fpy,fpz,frx,fry,frz,fx,fy,fz\n";
  for (std::size_t v = 0; v < slice.surface.vertex_count(); ++v) {
    out << v << ',' << (slice.critical[v] ? 1 : 0) << ',' << (projected.valid[v] ? 1 : 0);
    auto emit = [&](const Vec3& vec) {
      for (int c = 0; c < 3; ++c) {
        out << ',';
        write_num(out, vec[c]);
      }
    };
    emit(projected.vectors[v]);
    emit(rectified.vectors[v]);
    emit(preprocessed.vectors[v]);
    out << '\n';
  }
}

bool read_flow(Slice& slice, TangentFlow& preprocessed, const fs::path& path) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  std::getline(in, line);
  const std::size_t n = slice.surface.vertex_count();
  slice.critical.assign(n, 0);
  preprocessed.stage = FlowStage::preprocessed;
  preprocessed.vectors.assign(n, Vec3::Zero());
  preprocessed.valid.assign(n, 1);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    long v;
    int critical, valid;
    double skip;
    if (!(ss >> v >> critical >> valid)) return false;
    if (v < 0 || v >= static_cast<long>(n)) return false;
    for (int c = 0; c < 6; ++c)
      if (!(ss >> skip)) return false;
    for (int c = 0; c < 3; ++c)
      if (!(ss >> preprocessed.vectors[v][c])) return false;
    slice.critical[v] = static_cast<char>(critical);
    ++rows;
  }
  return rows == n;
}

void write_layer_csv(const LayerToolpath& layer, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "line,kind,iso_index,closed,x,y,z,nx,ny,nz\n";
  for (std::size_t l = 0; l < layer.paths.size(); ++l) {
    const auto& p = layer.paths[l];
    const char* kind = p.kind == MoveKind::travel ? "travel"
                       : p.kind == MoveKind::contour ? "contour" : "infill";
    for (std::size_t i = 0; i < p.points.size(); ++i) {
      out << l << ',' << kind << ',' << p.iso_index << ',' << (p.closed ? 1 : 0);
      for (int c = 0; c < 3; ++c) {
        out << ',';
        write_num(out, p.points[i][c]);
      }
      for (int c = 0; c < 3; ++c) {
        out << ',';
        write_num(out, p.normals[i][c]);
      }
      out << '\n';
    }
  }
}

bool read_layer_csv(LayerToolpath& layer, const fs::path& path) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  std::getline(in, line);
  long current = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    long id;
    std::string kind;
    int iso, closed;
    Vec3 p, n;
    if (!(ss >> id >> kind >> iso >> closed >> p[0] >> p[1] >> p[2] >> n[0] >> n[1] >> n[2]))
      return false;
    if (id != current) {
      layer.paths.push_back({});
      current = id;
      auto& poly = layer.paths.back();
      poly.kind = kind == "travel" ? MoveKind::travel
                  : kind == "contour" ? MoveKind::contour : MoveKind::infill;
      poly.iso_index = iso;
      poly.closed = closed != 0;
    }
    layer.paths.back().points.push_back(p);
    layer.paths.back().normals.push_back(n);
  }
  for (const auto& p : layer.paths)
    if (p.kind != MoveKind::travel) layer.print_length += p.length();
  return !layer.paths.empty();
}

// Projected per-layer figure: contours blue, infill black, travels red.
void write_layer_svg(const LayerToolpath& layer, const Slice& slice, const fs::path& path) {
  Vec3 center = Vec3::Zero(), normal = Vec3::Zero();
  for (const auto& v : slice.surface.vertices) center += v;
  if (!slice.surface.vertices.empty()) center /= static_cast<double>(slice.surface.vertices.size());
  for (const auto& n : slice.normals) normal += n;
  if (normal.norm() < 1e-9) normal = Vec3::UnitZ();
  normal.normalize();
  Vec3 u = normal.cross(Vec3::UnitX());
  if (u.norm() < 1e-6) u = normal.cross(Vec3::UnitY());
  u.normalize();
  Vec3 v = normal.cross(u);

  auto project = [&](const Vec3& p) {
    return std::pair<double, double>{(p - center).dot(u), -(p - center).dot(v)};
  };

  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool first = true;
  for (const auto& line : layer.paths)
    for (const auto& p : line.points) {
      auto [x, y] = project(p);
      if (first) {
        x0 = x1 = x;
        y0 = y1 = y;
        first = false;
      }
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  const double margin = 1.0;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x0 - margin << ' '
      << y0 - margin << ' ' << (x1 - x0) + 2 * margin << ' ' << (y1 - y0) + 2 * margin
      << "\">\n";
  for (const auto& line : layer.paths) {
    const char* style = line.kind == MoveKind::travel
                            ? "fill:none;stroke:#c03030;stroke-width:0.08;stroke-dasharray:0.4 0.2"
                        : line.kind == MoveKind::contour
                            ? "fill:none;stroke:#2060c0;stroke-width:0.12"
                            : "fill:none;stroke:#202020;stroke-width:0.12";
    out << "  <path style=\"" << style << "\" d=\"";
    for (std::size_t i = 0; i < line.points.size(); ++i) {
      auto [x, y] = project(line.points[i]);
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%c%.3f %.3f", i == 0 ? 'M' : 'L', x, y);
      out << buf;
    }
    if (line.closed) out << 'Z';
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace

// ------------------------------------------------------------------ runner

struct PipelineRunner::State {
  Config cfg;
  fs::path out;

  std::unique_ptr<TetMesh> mesh;
  std::unique_ptr<TetOperators> tet_ops;
  std::unique_ptr<StressTensorField> stress;
  std::unique_ptr<PrincipalStressField> principal;
  std::unique_ptr<DistanceField> distance;
  std::vector<Slice> slices;
  std::vector<TangentFlow> flows;  // preprocessed, parallel to slices
  std::unique_ptr<ToolpathProgram> program;

  bool fresh = false;  // run_all: ignore cached artifacts

  SolveOptions solver() const {
    SolveOptions opts;
    opts.tol = cfg.solver_tol;
    opts.max_iterations = cfg.solver_max_iter;
    return opts;
  }

  void ensure_mesh() {
    if (mesh) return;
    stage("mesh", [&] {
      if (cfg.node_path.empty() || cfg.ele_path.empty())
        throw ValidationError("node_path and ele_path are required");
      mesh = std::make_unique<TetMesh>(load_tet_mesh(cfg.node_path, cfg.ele_path));
      log_info("mesh: " + std::to_string(mesh->vertex_count()) + " nodes, " +
               std::to_string(mesh->tet_count()) + " tets");
      return 0;
    });
  }

  void ensure_stress() {
    if (stress) return;
    ensure_mesh();
    stage("fea", [&] {
      const fs::path cached = out / "stress.csv";
      if (!fresh && fs::exists(cached)) {
        stress = std::make_unique<StressTensorField>(
            load_stress_csv(cached, mesh->vertex_count()));
        log_info("fea: reusing " + cached.string());
      } else if (!cfg.stress_csv.empty()) {
        stress = std::make_unique<StressTensorField>(
            load_stress_csv(cfg.stress_csv, mesh->vertex_count()));
        save_stress_csv(*stress, cached);
        log_info("fea: stress read from " + cfg.stress_csv);
      } else {
        BoundaryConditions bc = assemble_boundary_conditions(*mesh, cfg);
        ElasticitySolution sol = solve_elasticity(*mesh, cfg.material, bc);
        stress = std::make_unique<StressTensorField>(std::move(sol.stress));
        save_stress_csv(*stress, cached);
        write_displacements(sol.displacements, out / "displacements.csv");
      }
      principal = std::make_unique<PrincipalStressField>(principal_decomposition(*stress));
      return 0;
    });
  }

  void ensure_distance() {
    if (distance) return;
    ensure_mesh();
    stage("slice", [&] {
      const fs::path cached = out / "distance.csv";
      if (!fresh && fs::exists(cached)) {
        distance = std::make_unique<DistanceField>(read_distance(cached, mesh->vertex_count()));
        log_info("slice: reusing " + cached.string());
        return 0;
      }
      if (!tet_ops) tet_ops = std::make_unique<TetOperators>(build_tet_operators(*mesh));
      std::vector<int> source = select_region_nodes(*mesh, cfg.base_face, cfg.base_face_tol);
      if (source.empty())
        throw ValidationError("base_face '" + cfg.base_face + "' selected no nodes");
      distance = std::make_unique<DistanceField>(
          geodesic_heat(*mesh, *tet_ops, source, solver()));
      write_distance(*distance, cached);
      return 0;
    });
  }

  void ensure_slices() {
    if (!slices.empty()) return;
    ensure_stress();
    ensure_distance();
    stage("slice", [&] {
      const fs::path dir = out / "slices";
      const fs::path index = dir / "index.csv";
      if (!fresh && fs::exists(index)) {
        std::ifstream in(index);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          std::replace(line.begin(), line.end(), ',', ' ');
          std::istringstream ss(line);
          int layer_index;
          double iso;
          if (!(ss >> layer_index >> iso))
            throw ValidationError("malformed slice index row: " + line);
          slices.push_back(read_slice(dir, layer_index, iso));
        }
        log_info("slice: reusing " + std::to_string(slices.size()) + " cached slices");
        return 0;
      }
      fs::create_directories(dir);
      SliceOptions opts;
      opts.min_edge_collapse_ratio = cfg.slice_min_edge_ratio;
      opts.jobs = cfg.jobs;
      slices = extract_slices(*mesh, *distance, *stress, cfg.layer_height, opts);
      if (slices.empty()) throw ComputeError("no slices were extracted");
      std::ofstream idx(index, std::ios::binary);
      idx << "layer_index,iso_value\n";
      for (const auto& slice : slices) {
        write_slice(slice, dir);
        idx << slice.layer_index << ',';
        write_num(idx, slice.iso_value);
        idx << '\n';
      }
      log_info("slice: " + std::to_string(slices.size()) + " layers");
      return 0;
    });
  }

  void ensure_flow() {
    if (!flows.empty()) return;
    ensure_slices();
    stage("flow", [&] {
      const fs::path dir = out / "flow";
      flows.resize(slices.size());
      bool cached = !fresh;
      if (cached)
        for (std::size_t i = 0; i < slices.size(); ++i)
          if (!read_flow(slices[i], flows[i],
                         dir / layer_name(slices[i].layer_index, "csv"))) {
            cached = false;
            break;
          }
      if (cached) {
        log_info("flow: reusing cached flow fields");
        return 0;
      }

      fs::create_directories(dir);
      const double global_max = principal->max_abs_s1();
      const RectifyAxisMode mode =
          cfg.rectify_pca ? RectifyAxisMode::pca : RectifyAxisMode::cartesian;
      detail::parallel_for(static_cast<long>(slices.size()), cfg.jobs, [&](long i) {
        Slice& slice = slices[i];
        CriticalMask mask = classify_critical(slice, cfg.theta_a, cfg.theta_s, global_max);
        slice.critical = mask.flags;
        TangentFlow projected = project_orthogonal(slice);
        RectifyInfo info;
        TangentFlow rectified = rectify(projected, &info, mode);
        if (info.ambiguous && !cfg.rectify_pca)
          log_warn("layer " + std::to_string(slice.layer_index) +
                   ": dominant flow axis is ambiguous (top two scores within 10%); "
                   "consider rectify_pca = true");
        int components = critical_component_count(slice, mask);
        if (components > 1)
          log_info("layer " + std::to_string(slice.layer_index) + ": critical region has " +
                   std::to_string(components) + " connected components");
        flows[i] = extrapolate_uncritical(slice, rectified, mask, solver());
        write_flow(slice, projected, rectified, flows[i],
                   dir / layer_name(slice.layer_index, "csv"));
      });
      return 0;
    });
  }

  void ensure_paths() {
    if (program) return;
    ensure_flow();
    stage("paths", [&] {
      const fs::path dir = out / "paths";
      program = std::make_unique<ToolpathProgram>();
      program->layers.resize(slices.size());

      bool cached = !fresh;
      if (cached)
        for (std::size_t i = 0; i < slices.size(); ++i) {
          program->layers[i].layer_index = slices[i].layer_index;
          program->layers[i].iso_value = slices[i].iso_value;
          if (!read_layer_csv(program->layers[i],
                              dir / layer_name(slices[i].layer_index, "csv"))) {
            cached = false;
            program = std::make_unique<ToolpathProgram>();
            program->layers.resize(slices.size());
            break;
          }
        }
      if (cached) {
        log_info("paths: reusing cached layer paths");
        return 0;
      }

      fs::create_directories(dir);
      LayerPathOptions opts;
      opts.contour_count = cfg.contour_count;
      opts.spacing = cfg.line_spacing;
      opts.travel_lift = cfg.layer_height;
      detail::parallel_for(static_cast<long>(slices.size()), cfg.jobs, [&](long i) {
        const Slice& slice = slices[i];
        ScalarFieldOnSlice field = fit_scalar_field(slice, flows[i], cfg.epsilon_rel, solver());
        std::vector<Polyline> isolines = extract_isolines(slice, field, cfg.line_spacing);
        std::vector<Polyline> smoothed;
        smoothed.reserve(isolines.size());
        for (const auto& line : isolines)
          smoothed.push_back(
              smooth_resample(line, cfg.spline_p, cfg.resample_step, cfg.deviation_bound));
        program->layers[i] = build_layer_path(smoothed, slice, opts);
        write_layer_csv(program->layers[i], dir / layer_name(slice.layer_index, "csv"));
        if (cfg.svg_export)
          write_layer_svg(program->layers[i], slice, dir / layer_name(slice.layer_index, "svg"));
      });
      write_toolpath(*program, out / "toolpath.txt");
      double total = 0.0;
      for (const auto& layer : program->layers) total += layer.print_length;
      log_info("paths: " + std::to_string(program->layers.size()) + " layers, " +
               std::to_string(total) + " mm of print moves");
      return 0;
    });
  }

  PipelineResult metrics() {
    ensure_paths();
    return stage("metrics", [&] {
      PipelineResult result;
      result.program = *program;

      std::vector<std::pair<std::string, DistanceField>> variants;
      variants.emplace_back("offset", *distance);
      variants.emplace_back("planar_x", axis_distance_field(*mesh, 0));
      variants.emplace_back("planar_y", axis_distance_field(*mesh, 1));
      variants.emplace_back("planar_z", axis_distance_field(*mesh, 2));
      SliceOptions slice_opts;
      slice_opts.min_edge_collapse_ratio = cfg.slice_min_edge_ratio;
      slice_opts.jobs = cfg.jobs;
      result.alignment = compare_slicings(*mesh, *stress, *principal, variants,
                                          cfg.layer_height, cfg.theta_a, cfg.theta_s,
                                          slice_opts);

      std::vector<char> node_mask = volumetric_critical_mask(*principal, cfg.theta_a, cfg.theta_s);
      TrajectoryAlignment beta = trajectory_alignment(*program, *mesh, *stress, node_mask);
      result.alignment.beta_bar = beta.beta_bar;
      result.alignment.critical_trajectory_points = beta.critical_points;
      result.alignment.beta_per_layer = beta.per_layer;

      SpacingOptions spacing_opts;
      spacing_opts.max_normalized = cfg.spacing_max_normalized;
      spacing_opts.bin_width = cfg.histogram_bin;
      result.spacing = spacing_distribution(*program, cfg.line_spacing, spacing_opts);

      write_report_json(result.alignment, result.spacing, out / "report.json");
      write_histogram_csv(result.spacing, out / "spacing_hist.csv");
      log_info("metrics: beta_bar = " + std::to_string(beta.beta_bar) +
               ", spacing mean = " + std::to_string(result.spacing.mean) + ", variance = " +
               std::to_string(result.spacing.variance));
      return result;
    });
  }
};

PipelineRunner::PipelineRunner(Config cfg) : state_(std::make_unique<State>()) {
  cfg.validate();
  state_->cfg = std::move(cfg);
  state_->out = state_->cfg.out_dir;
  fs::create_directories(state_->out);
}

PipelineRunner::~PipelineRunner() = default;

void PipelineRunner::run_fea() { state_->ensure_stress(); }
void PipelineRunner::run_slice() { state_->ensure_slices(); }
void PipelineRunner::run_flow() { state_->ensure_flow(); }
void PipelineRunner::run_paths() { state_->ensure_paths(); }
PipelineResult PipelineRunner::run_metrics() { return state_->metrics(); }

PipelineResult PipelineRunner::run_all() {
  state_->fresh = true;
  return state_->metrics();
}

PipelineResult run_pipeline(const Config& cfg) { return PipelineRunner(cfg).run_all(); }

}  // namespace stresspath
