#include "stresspath/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "stresspath/spline.hpp"
#include "stresspath/stressflow.hpp"

namespace stresspath {

TetLocator::TetLocator(const TetMesh& mesh) : mesh_(mesh) {
  Vec3 lo = mesh.vertices.front(), hi = mesh.vertices.front();
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  origin_ = lo;
  cell_ = std::max(mesh.mean_edge_length() * 2.0, 1e-9);
  for (int a = 0; a < 3; ++a)
    dims_[a] = std::max(1, static_cast<int>(std::ceil((hi[a] - lo[a]) / cell_)));
  cells_.resize(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2]);

  auto clamp_cell = [&](int i, int a) { return std::clamp(i, 0, dims_[a] - 1); };
  for (int t = 0; t < static_cast<int>(mesh.tet_count()); ++t) {
    Vec3 tlo = mesh.vertices[mesh.tets[t][0]], thi = tlo;
    for (int i = 1; i < 4; ++i) {
      tlo = tlo.cwiseMin(mesh.vertices[mesh.tets[t][i]]);
      thi = thi.cwiseMax(mesh.vertices[mesh.tets[t][i]]);
    }
    std::array<int, 3> c0, c1;
    for (int a = 0; a < 3; ++a) {
      c0[a] = clamp_cell(static_cast<int>(std::floor((tlo[a] - origin_[a]) / cell_)), a);
      c1[a] = clamp_cell(static_cast<int>(std::floor((thi[a] - origin_[a]) / cell_)), a);
    }
    for (int x = c0[0]; x <= c1[0]; ++x)
      for (int y = c0[1]; y <= c1[1]; ++y)
        for (int z = c0[2]; z <= c1[2]; ++z)
          cells_[(static_cast<std::size_t>(z) * dims_[1] + y) * dims_[0] + x].push_back(t);
  }
}

std::optional<TetLocator::Hit> TetLocator::locate(const Vec3& point, double tol) const {
  std::array<int, 3> c;
  for (int a = 0; a < 3; ++a) {
    c[a] = static_cast<int>(std::floor((point[a] - origin_[a]) / cell_));
    if (c[a] < -1 || c[a] > dims_[a]) return std::nullopt;
    c[a] = std::clamp(c[a], 0, dims_[a] - 1);
  }
  const auto& candidates = cells_[(static_cast<std::size_t>(c[2]) * dims_[1] + c[1]) * dims_[0] + c[0]];

  std::optional<Hit> best;
  double best_slack = -std::numeric_limits<double>::infinity();
  for (int t : candidates) {
    const auto& q = mesh_.tets[t];
    Eigen::Matrix3d m;
    m.col(0) = mesh_.vertices[q[1]] - mesh_.vertices[q[0]];
    m.col(1) = mesh_.vertices[q[2]] - mesh_.vertices[q[0]];
    m.col(2) = mesh_.vertices[q[3]] - mesh_.vertices[q[0]];
    Vec3 local = m.partialPivLu().solve(point - mesh_.vertices[q[0]]);
    Eigen::Vector4d bary(1.0 - local.sum(), local[0], local[1], local[2]);
    double slack = bary.minCoeff();
    if (slack > best_slack) {
      best_slack = slack;
      best = Hit{t, bary};
    }
  }
  if (best && best_slack >= -tol) return best;
  return std::nullopt;
}

std::vector<char> volumetric_critical_mask(const PrincipalStressField& principal,
                                           double theta_a, double theta_s) {
  if (!(theta_a > 1.0)) throw ValidationError("theta_a must be > 1");
  if (!(theta_s > 0.0 && theta_s < 1.0)) throw ValidationError("theta_s must lie in (0, 1)");
  const double global_max = principal.max_abs_s1();
  std::vector<char> mask(principal.size(), 0);
  if (global_max == 0) return mask;
  for (std::size_t v = 0; v < principal.size(); ++v) {
    const double s1 = std::abs(principal.nodes[v].s1);
    const double s3 = std::abs(principal.nodes[v].s3);
    const bool anisotropic = (s3 == 0.0) ? (s1 > 0.0) : (s1 / s3 > theta_a);
    mask[v] = (anisotropic && s1 / global_max > theta_s) ? 1 : 0;
  }
  return mask;
}

namespace {

Vec3 principal_direction_at(const TetMesh& mesh, const StressTensorField& stress,
                            const TetLocator::Hit& hit) {
  std::array<double, 6> interp = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    const auto& tens = stress.tensors[mesh.tets[hit.tet][i]];
    for (int c = 0; c < 6; ++c) interp[c] += hit.barycentric[i] * tens[c];
  }
  StressTensorField one;
  one.tensors = {interp};
  return principal_decomposition(one).nodes[0].d1;
}

}  // namespace

TrajectoryAlignment trajectory_alignment(const ToolpathProgram& program, const TetMesh& mesh,
                                         const StressTensorField& stress,
                                         const std::vector<char>& node_mask) {
  if (node_mask.size() != mesh.vertex_count())
    throw ValidationError("node mask size does not match the mesh");
  TetLocator locator(mesh);
  const double tol = 1e-3 * std::max(mesh.mean_edge_length(), 1e-9);

  TrajectoryAlignment out;
  double total_sum = 0.0;
  for (const auto& layer : program.layers) {
    double layer_sum = 0.0;
    long layer_count = 0;
    for (const auto& line : layer.paths) {
      if (line.kind != MoveKind::infill || line.points.size() < 2) continue;
      const int n = static_cast<int>(line.points.size());
      for (int i = 0; i < n; ++i) {
        // Central-difference tangent; one-sided at open ends.
        Vec3 a, b;
        if (line.closed) {
          a = line.points[(i - 1 + n) % n];
          b = line.points[(i + 1) % n];
        } else {
          a = line.points[std::max(i - 1, 0)];
          b = line.points[std::min(i + 1, n - 1)];
        }
        Vec3 d = b - a;
        if (d.norm() < 1e-12) continue;
        d.normalize();

        auto hit = locator.locate(line.points[i], tol);
        if (!hit) continue;
        ++out.total_points;
        bool critical = false;
        for (int k = 0; k < 4; ++k) critical |= node_mask[mesh.tets[hit->tet][k]] != 0;
        if (!critical) continue;
        const Vec3 f = principal_direction_at(mesh, stress, *hit);
        const double beta = std::abs(f.dot(d));
        layer_sum += beta;
        ++layer_count;
      }
    }
    if (layer_count > 0)
      out.per_layer.emplace_back(layer.layer_index, layer_sum / layer_count);
    total_sum += layer_sum;
    out.critical_points += layer_count;
  }
  if (out.critical_points == 0)
    throw ComputeError("no trajectory point fell in a critical region; "
                       "check thresholds or the toolpath");
  out.beta_bar = total_sum / static_cast<double>(out.critical_points);
  return out;
}

namespace {

void collect_spacing_samples(const LayerToolpath& layer, double nominal,
                             const SpacingOptions& opts, std::vector<double>& samples) {
  std::map<int, std::vector<const Polyline*>> by_iso;
  for (const auto& line : layer.paths)
    if (line.kind == MoveKind::infill && line.iso_index >= 0 && line.points.size() >= 2)
      by_iso[line.iso_index].push_back(&line);

  for (const auto& [iso, lines] : by_iso) {
    for (int delta : {-1, +1}) {
      auto it = by_iso.find(iso + delta);
      if (it == by_iso.end()) continue;
      for (const Polyline* line : lines)
        for (const auto& p : line->points) {
          double d = std::numeric_limits<double>::infinity();
          for (const Polyline* other : it->second)
            d = std::min(d, distance_to_polyline(p, *other));
          const double normalized = d / nominal;
          if (normalized <= opts.max_normalized) samples.push_back(normalized);
        }
    }
  }
}

SpacingReport report_from_samples(std::vector<double>&& samples, double nominal,
                                  const SpacingOptions& opts) {
  SpacingReport report;
  report.nominal = nominal;
  report.bin_width = opts.bin_width;
  report.samples = static_cast<long>(samples.size());
  if (samples.empty())
    throw ComputeError("no spacing samples; layers need at least two adjacent isolines");

  double sum = 0.0;
  double max_val = 0.0;
  for (double s : samples) {
    sum += s;
    max_val = std::max(max_val, s);
  }
  report.mean = sum / report.samples;
  double var = 0.0;
  for (double s : samples) var += (s - report.mean) * (s - report.mean);
  report.variance = var / report.samples;

  const int bins = std::max(1, static_cast<int>(std::ceil(max_val / opts.bin_width)) + 1);
  report.histogram.assign(bins, 0.0);
  for (double s : samples) {
    int b = std::min(bins - 1, static_cast<int>(std::floor(s / opts.bin_width)));
    report.histogram[b] += 1.0;
  }
  for (double& h : report.histogram) h /= report.samples;
  return report;
}

long count_infill(const LayerToolpath& layer) {
  long n = 0;
  for (const auto& line : layer.paths)
    if (line.kind == MoveKind::infill && line.points.size() >= 2) ++n;
  return n;
}

}  // namespace

SpacingReport spacing_distribution(const LayerToolpath& layer, double nominal,
                                   const SpacingOptions& opts) {
  if (!(nominal > 0)) throw ValidationError("nominal spacing must be positive");
  if (count_infill(layer) < 2)
    throw ValidationError("spacing statistics need at least two infill polylines");
  std::vector<double> samples;
  collect_spacing_samples(layer, nominal, opts, samples);
  return report_from_samples(std::move(samples), nominal, opts);
}

SpacingReport spacing_distribution(const ToolpathProgram& program, double nominal,
                                   const SpacingOptions& opts) {
  if (!(nominal > 0)) throw ValidationError("nominal spacing must be positive");
  std::vector<double> samples;
  long usable_layers = 0;
  for (const auto& layer : program.layers) {
    if (count_infill(layer) < 2) continue;
    ++usable_layers;
    collect_spacing_samples(layer, nominal, opts, samples);
  }
  if (usable_layers == 0)
    throw ValidationError("no layer has two or more infill polylines");
  return report_from_samples(std::move(samples), nominal, opts);
}

AlignmentReport compare_slicings(const TetMesh& mesh, const StressTensorField& stress,
                                 const PrincipalStressField& principal,
                                 const std::vector<std::pair<std::string, DistanceField>>& variants,
                                 double layer_height, double theta_a, double theta_s,
                                 const SliceOptions& slice_opts) {
  AlignmentReport report;
  const double global_max = principal.max_abs_s1();
  for (const auto& [name, field] : variants) {
    std::vector<Slice> slices = extract_slices(mesh, field, stress, layer_height, slice_opts);
    for (auto& slice : slices) {
      CriticalMask mask = classify_critical(slice, theta_a, theta_s, global_max);
      slice.critical = mask.flags;
    }
    SlicingAlignment alignment = slicing_alignment(slices);
    report.gamma_by_variant.emplace_back(name, alignment.overall);
    if (name == "offset") {
      report.gamma_per_slice = alignment.per_slice;
      report.critical_slice_vertices = alignment.critical_count;
    }
  }
  return report;
}

void write_report_json(const AlignmentReport& alignment, const SpacingReport& spacing,
                       const std::filesystem::path& path) {
  nlohmann::json doc;
  for (const auto& [name, gamma] : alignment.gamma_by_variant)
    doc["slicing_alignment"][name] = gamma;
  doc["slicing_alignment_per_slice"] = alignment.gamma_per_slice;
  doc["critical_slice_vertices"] = alignment.critical_slice_vertices;
  doc["trajectory_alignment"]["beta_bar"] = alignment.beta_bar;
  doc["trajectory_alignment"]["critical_points"] = alignment.critical_trajectory_points;
  for (const auto& [layer, beta] : alignment.beta_per_layer)
    doc["trajectory_alignment"]["per_layer"][std::to_string(layer)] = beta;
  doc["spacing"]["nominal_mm"] = spacing.nominal;
  doc["spacing"]["mean"] = spacing.mean;
  doc["spacing"]["variance"] = spacing.variance;
  doc["spacing"]["samples"] = spacing.samples;
  doc["spacing"]["bin_width"] = spacing.bin_width;
  doc["spacing"]["histogram"] = spacing.histogram;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write report " + path.string());
  out << doc.dump(2) << "\n";
}

void write_histogram_csv(const SpacingReport& spacing, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write histogram " + path.string());
  out << "bin_lo,bin_hi,mass\n";
  for (std::size_t b = 0; b < spacing.histogram.size(); ++b)
    out << b * spacing.bin_width << ',' << (b + 1) * spacing.bin_width << ','
        << spacing.histogram[b] << "\n";
}

}  // namespace stresspath
