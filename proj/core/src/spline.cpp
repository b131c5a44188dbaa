#include "stresspath/spline.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>

namespace stresspath {

namespace {

// Least-squares line through (t_i, y_i), the p -> 0 limit.
Eigen::MatrixX3d line_fit(const std::vector<double>& t, const Eigen::MatrixX3d& y) {
  const int n = static_cast<int>(t.size());
  double mean_t = 0.0;
  for (double v : t) mean_t += v;
  mean_t /= n;
  Eigen::RowVector3d mean_y = y.colwise().mean();
  double var = 0.0;
  Eigen::RowVector3d cov = Eigen::RowVector3d::Zero();
  for (int i = 0; i < n; ++i) {
    var += (t[i] - mean_t) * (t[i] - mean_t);
    cov += (t[i] - mean_t) * (y.row(i) - mean_y);
  }
  Eigen::RowVector3d slope = var > 0 ? Eigen::RowVector3d(cov / var) : Eigen::RowVector3d::Zero();
  Eigen::MatrixX3d out(n, 3);
  for (int i = 0; i < n; ++i) out.row(i) = mean_y + (t[i] - mean_t) * slope;
  return out;
}

}  // namespace

SmoothingSpline SmoothingSpline::fit(const std::vector<double>& knots,
                                     const Eigen::MatrixX3d& values, double p, bool periodic,
                                     double period_gap) {
  const int n = static_cast<int>(knots.size());
  if (n < 3) throw ValidationError("smoothing spline needs at least 3 knots");
  if (values.rows() != n) throw ValidationError("knot/value count mismatch");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("smoothing parameter must be in [0, 1]");
  for (int i = 1; i < n; ++i)
    if (!(knots[i] > knots[i - 1]))
      throw ValidationError("smoothing spline knots must be strictly increasing");
  if (periodic && !(period_gap > 0))
    throw ValidationError("periodic spline needs a positive closing interval");

  SmoothingSpline s;
  s.knots_ = knots;
  s.periodic_ = periodic;
  s.period_gap_ = period_gap;

  if (p <= 1e-12 && !periodic) {
    s.values_ = line_fit(knots, values);
    s.second_deriv_ = Eigen::MatrixX3d::Zero(n, 3);
    return s;
  }
  // A periodic "line" is a constant; treat tiny p the same way.
  if (p <= 1e-12 && periodic) {
    s.values_ = values.colwise().mean().replicate(n, 1);
    s.second_deriv_ = Eigen::MatrixX3d::Zero(n, 3);
    return s;
  }

  const double mu = (1.0 - p) / p;

  // Second derivatives gamma solve (R + mu Q^T Q) gamma = Q^T y, and the
  // smoothed values are a = y - mu Q gamma (Green & Silverman). For the
  // natural spline the end gammas are fixed at zero; the periodic variant
  // keeps all n unknowns with indices wrapping over the closing interval.
  const int m = periodic ? n : n - 2;
  if (m <= 0) throw ValidationError("too few knots for a cubic fit");

  auto interval = [&](int i) {
    // length of [t_i, t_{i+1}]; for periodic meshes i = n-1 wraps.
    if (i < n - 1) return knots[i + 1] - knots[i];
    return period_gap;
  };
  auto col_of = [&](int j) { return periodic ? j : j - 1; };

  std::vector<Eigen::Triplet<double>> q_trip, r_trip;
  const int j_begin = periodic ? 0 : 1;
  const int j_end = periodic ? n : n - 1;
  for (int j = j_begin; j < j_end; ++j) {
    const int jm = (j - 1 + n) % n;
    const double h_prev = interval(jm);
    const double h_next = interval(j);
    const int col = col_of(j);
    q_trip.emplace_back(jm, col, 1.0 / h_prev);
    q_trip.emplace_back(j, col, -1.0 / h_prev - 1.0 / h_next);
    q_trip.emplace_back((j + 1) % n, col, 1.0 / h_next);
    r_trip.emplace_back(col, col, (h_prev + h_next) / 3.0);
    if (periodic || j + 1 < j_end) {
      const int col_next = col_of((j + 1) % n == 0 ? j_begin : j + 1);
      if (col_next != col) {
        r_trip.emplace_back(col, col_next, h_next / 6.0);
        r_trip.emplace_back(col_next, col, h_next / 6.0);
      }
    }
  }

  Eigen::SparseMatrix<double> q(n, m), r(m, m);
  q.setFromTriplets(q_trip.begin(), q_trip.end());
  r.setFromTriplets(r_trip.begin(), r_trip.end());

  Eigen::SparseMatrix<double> system = r + mu * Eigen::SparseMatrix<double>(q.transpose() * q);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(system);
  if (solver.info() != Eigen::Success)
    throw ComputeError("smoothing spline system factorization failed");

  Eigen::MatrixX3d gamma_reduced(m, 3);
  Eigen::MatrixX3d qty = q.transpose() * values;
  for (int c = 0; c < 3; ++c) gamma_reduced.col(c) = solver.solve(qty.col(c));

  s.values_ = values - mu * (q * gamma_reduced);
  s.second_deriv_ = Eigen::MatrixX3d::Zero(n, 3);
  for (int j = j_begin; j < j_end; ++j) s.second_deriv_.row(j) = gamma_reduced.row(col_of(j));
  return s;
}

double SmoothingSpline::domain_end() const {
  return periodic_ ? knots_.back() + period_gap_ : knots_.back();
}

Vec3 SmoothingSpline::eval(double t) const {
  const int n = static_cast<int>(knots_.size());
  double u = t;
  if (periodic_) {
    const double t0 = knots_.front();
    const double period = domain_end() - t0;
    u = t0 + std::fmod(std::fmod(t - t0, period) + period, period);
  } else {
    u = std::clamp(t, knots_.front(), knots_.back());
  }

  int i = static_cast<int>(std::upper_bound(knots_.begin(), knots_.end(), u) - knots_.begin()) - 1;
  i = std::clamp(i, 0, periodic_ ? n - 1 : n - 2);
  const int j = (i + 1) % n;
  const double h = (i < n - 1) ? knots_[i + 1] - knots_[i] : period_gap_;
  const double t_hi = knots_[i] + h;

  const double d_hi = t_hi - u, d_lo = u - knots_[i];
  Eigen::RowVector3d out =
      values_.row(i) * (d_hi / h) + values_.row(j) * (d_lo / h) +
      second_deriv_.row(i) * ((d_hi * d_hi * d_hi) / (6.0 * h) - h * d_hi / 6.0) +
      second_deriv_.row(j) * ((d_lo * d_lo * d_lo) / (6.0 * h) - h * d_lo / 6.0);
  return out.transpose();
}

double distance_to_polyline(const Vec3& point, const Polyline& line) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = line.points.size();
  if (n == 0) return best;
  if (n == 1) return (point - line.points[0]).norm();
  const std::size_t segs = line.closed ? n : n - 1;
  for (std::size_t i = 0; i < segs; ++i) {
    const Vec3& a = line.points[i];
    const Vec3& b = line.points[(i + 1) % n];
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    double s = len2 > 0 ? std::clamp((point - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (point - (a + s * ab)).norm());
  }
  return best;
}

namespace {

struct ChordParam {
  std::vector<double> t;
  double closing_gap = 0.0;
};

ChordParam chord_parameter(const Polyline& line) {
  ChordParam cp;
  cp.t.resize(line.points.size());
  cp.t[0] = 0.0;
  for (std::size_t i = 1; i < line.points.size(); ++i)
    cp.t[i] = cp.t[i - 1] + (line.points[i] - line.points[i - 1]).norm();
  if (line.closed) cp.closing_gap = (line.points.front() - line.points.back()).norm();
  return cp;
}

Vec3 interp_normal(const Polyline& line, const ChordParam& cp, double u) {
  const auto& t = cp.t;
  const std::size_t n = t.size();
  if (line.closed) {
    const double period = t.back() + cp.closing_gap;
    u = std::fmod(std::fmod(u, period) + period, period);
    auto it = std::upper_bound(t.begin(), t.end(), u);
    std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
    std::size_t j = (i + 1) % n;
    double h = (i + 1 < n) ? t[i + 1] - t[i] : cp.closing_gap;
    double w = h > 0 ? (u - t[i]) / h : 0.0;
    Vec3 v = (1.0 - w) * line.normals[i] + w * line.normals[j];
    return v.norm() > 1e-12 ? Vec3(v.normalized()) : line.normals[i];
  }
  u = std::clamp(u, t.front(), t.back());
  auto it = std::upper_bound(t.begin(), t.end(), u);
  std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - t.begin()), n - 1);
  if (i == 0) return line.normals[0];
  double h = t[i] - t[i - 1];
  double w = h > 0 ? (u - t[i - 1]) / h : 0.0;
  Vec3 v = (1.0 - w) * line.normals[i - 1] + w * line.normals[i];
  return v.norm() > 1e-12 ? Vec3(v.normalized()) : line.normals[i - 1];
}

Polyline resample_spline(const SmoothingSpline& spline, const Polyline& input,
                         const ChordParam& cp, double step) {
  // Dense arc-length table over the spline.
  const int n = static_cast<int>(cp.t.size());
  const int intervals = input.closed ? n : n - 1;
  const int subdiv = 8;
  std::vector<double> params, arcs;
  params.reserve(static_cast<std::size_t>(intervals) * subdiv + 1);
  const double t_end = input.closed ? cp.t.back() + cp.closing_gap : cp.t.back();
  for (int i = 0; i < intervals; ++i) {
    const double lo = cp.t[i];
    const double hi = (i + 1 < n) ? cp.t[i + 1] : t_end;
    for (int s = 0; s < subdiv; ++s)
      params.push_back(lo + (hi - lo) * s / subdiv);
  }
  params.push_back(t_end);
  arcs.resize(params.size());
  arcs[0] = 0.0;
  Vec3 prev = spline.eval(params[0]);
  for (std::size_t i = 1; i < params.size(); ++i) {
    Vec3 cur = spline.eval(params[i]);
    arcs[i] = arcs[i - 1] + (cur - prev).norm();
    prev = cur;
  }
  const double total = arcs.back();

  auto param_at_arc = [&](double s) {
    auto it = std::lower_bound(arcs.begin(), arcs.end(), s);
    if (it == arcs.begin()) return params.front();
    if (it == arcs.end()) return params.back();
    std::size_t i = static_cast<std::size_t>(it - arcs.begin());
    double span = arcs[i] - arcs[i - 1];
    double w = span > 0 ? (s - arcs[i - 1]) / span : 0.0;
    return params[i - 1] + w * (params[i] - params[i - 1]);
  };

  Polyline out;
  out.closed = input.closed;
  out.kind = input.kind;
  out.iso_index = input.iso_index;
  if (input.closed) {
    const long count = std::max<long>(3, std::lround(total / step));
    for (long k = 0; k < count; ++k) {
      double u = param_at_arc(total * static_cast<double>(k) / static_cast<double>(count));
      out.points.push_back(spline.eval(u));
      out.normals.push_back(interp_normal(input, cp, u));
    }
  } else {
    const long count = std::max<long>(2, std::lround(total / step) + 1);
    for (long k = 0; k < count; ++k) {
      double u = param_at_arc(total * static_cast<double>(k) / static_cast<double>(count - 1));
      out.points.push_back(spline.eval(u));
      out.normals.push_back(interp_normal(input, cp, u));
    }
    out.points.front() = input.points.front();
    out.points.back() = input.points.back();
    out.normals.front() = input.normals.front();
    out.normals.back() = input.normals.back();
  }
  return out;
}

double max_deviation(const Polyline& candidate, const Polyline& input) {
  double worst = 0.0;
  for (const auto& p : candidate.points)
    worst = std::max(worst, distance_to_polyline(p, input));
  return worst;
}

}  // namespace

Polyline smooth_resample(const Polyline& line, double p, double step, double deviation_bound) {
  if (!(step > 0)) throw ValidationError("resample step must be positive");
  if (!(p >= 0 && p <= 1)) throw ValidationError("smoothing parameter must be in [0, 1]");
  if (line.points.size() != line.normals.size())
    throw ValidationError("polyline/normal count mismatch");
  if (line.points.size() < 4) {
    log_warn("polyline with " + std::to_string(line.points.size()) +
             " points is too short for spline smoothing; returned unchanged");
    return line;
  }

  ChordParam cp = chord_parameter(line);
  Eigen::MatrixX3d y(line.points.size(), 3);
  for (std::size_t i = 0; i < line.points.size(); ++i) y.row(i) = line.points[i].transpose();

  double p_cur = p;
  Polyline best;
  for (int round = 0; round < 7; ++round) {
    SmoothingSpline spline = SmoothingSpline::fit(cp.t, y, p_cur, line.closed, cp.closing_gap);
    best = resample_spline(spline, line, cp, step);
    if (max_deviation(best, line) <= deviation_bound) return best;
    p_cur = 1.0 - (1.0 - p_cur) * 0.25;
  }
  // Hard cap: pull any stray sample back to the deviation shell.
  for (auto& pt : best.points) {
    double d = distance_to_polyline(pt, line);
    if (d > deviation_bound && d > 0) {
      // Nearest input vertex is a cheap stand-in for the exact projection.
      Vec3 nearest = line.points[0];
      double nd = (pt - nearest).norm();
      for (const auto& q : line.points) {
        double dq = (pt - q).norm();
        if (dq < nd) {
          nd = dq;
          nearest = q;
        }
      }
      pt = nearest + (pt - nearest) * (deviation_bound / std::max(nd, 1e-12));
    }
  }
  return best;
}

}  // namespace stresspath
