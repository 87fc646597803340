#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "evsink/cluster.hpp"
#include "evsink/core.hpp"
#include "evsink/errors.hpp"

namespace evsink {

// Hard data association of cluster points to the inner or outer circle edge.
// Point order inside each set follows the input order.
struct RadialAssignment {
  std::vector<std::pair<double, double>> inner;
  std::vector<std::pair<double, double>> outer;
};

struct FitConfig {
  double huber_delta = 1.0;  // residuals are squared distances, so this is px^2
  int max_iterations = 100;
  double cost_rel_tol = 1e-9;
  double gradient_tol = 1e-9;
  double lambda_init = 1e-3;
  double lambda_decrease = 0.2;
  double lambda_increase = 5.0;
  double min_annulus_px = 1.0;  // least acceptable R0 - r0 at initialization
  std::size_t min_points = 8;
};

struct FitReport {
  CircleFitParams params;
  int iterations = 0;
  double final_cost = 0.0;
  bool converged = false;
  double inlier_fraction = 0.0;
};

// Initial guess: center at the cluster centroid, radii from the mean of each
// half of the radial distances split at the median.
inline CircleFitParams init_params(const Cluster& cluster, std::size_t min_points = 8) {
  const auto& pts = cluster.members;
  if (pts.size() < min_points) {
    throw TooFewPointsError("circle initialization needs >= " + std::to_string(min_points) +
                            " points, got " + std::to_string(pts.size()));
  }
  std::vector<double> radii;
  radii.reserve(pts.size());
  for (const auto& [x, y] : pts) {
    radii.push_back(std::hypot(x - cluster.centroid_x, y - cluster.centroid_y));
  }
  std::sort(radii.begin(), radii.end());
  const std::size_t half = radii.size() / 2;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < half; ++i) lo += radii[i];
  for (std::size_t i = half; i < radii.size(); ++i) hi += radii[i];
  CircleFitParams p;
  p.inner_radius = lo / double(half);
  p.outer_radius = hi / double(radii.size() - half);
  p.center_x = cluster.centroid_x;
  p.center_y = cluster.centroid_y;
  return p;
}

// Assigns each point to the circle whose radius is nearest its own radial
// distance; exact ties go to the inner edge, where bore reflections live.
inline RadialAssignment associate_radial(const std::vector<std::pair<double, double>>& points,
                                         const CircleFitParams& params) {
  RadialAssignment out;
  for (const auto& p : points) {
    const double rho = std::hypot(p.first - params.center_x, p.second - params.center_y);
    if (std::abs(rho - params.inner_radius) <= std::abs(rho - params.outer_radius)) {
      out.inner.push_back(p);
    } else {
      out.outer.push_back(p);
    }
  }
  return out;
}

// Squared-distance residuals: (X-h)^2 + (Y-k)^2 - r^2 against the assigned
// circle, inner points first, preserving input order.
inline std::vector<double> residuals(const RadialAssignment& assign,
                                     const CircleFitParams& params) {
  std::vector<double> xi;
  xi.reserve(assign.inner.size() + assign.outer.size());
  for (const auto& [x, y] : assign.inner) {
    const double dx = x - params.center_x;
    const double dy = y - params.center_y;
    xi.push_back(dx * dx + dy * dy - params.inner_radius * params.inner_radius);
  }
  for (const auto& [x, y] : assign.outer) {
    const double dx = x - params.center_x;
    const double dy = y - params.center_y;
    xi.push_back(dx * dx + dy * dy - params.outer_radius * params.outer_radius);
  }
  return xi;
}

// Analytic Jacobian of the residual vector w.r.t. [inner_radius,
// outer_radius, center_x, center_y], rows ordered like residuals().
inline Eigen::MatrixXd residual_jacobian(const RadialAssignment& assign,
                                         const CircleFitParams& params) {
  const std::size_t n = assign.inner.size() + assign.outer.size();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(Eigen::Index(n), 4);
  Eigen::Index row = 0;
  for (const auto& [x, y] : assign.inner) {
    jac(row, 0) = -2.0 * params.inner_radius;
    jac(row, 2) = -2.0 * (x - params.center_x);
    jac(row, 3) = -2.0 * (y - params.center_y);
    ++row;
  }
  for (const auto& [x, y] : assign.outer) {
    jac(row, 1) = -2.0 * params.outer_radius;
    jac(row, 2) = -2.0 * (x - params.center_x);
    jac(row, 3) = -2.0 * (y - params.center_y);
    ++row;
  }
  return jac;
}

// Huber penalty: quadratic inside the threshold, linear outside, continuous
// and C1 at |xi| = delta.
inline double huber(double xi, double delta = 1.0) {
  const double a = std::abs(xi);
  if (a <= delta) return xi * xi;
  return 2.0 * delta * a - delta * delta;
}

inline double huber_cost(const std::vector<double>& xi, double delta) {
  double c = 0.0;
  for (const double v : xi) c += huber(v, delta);
  return c;
}

namespace detail {

inline double association_cost(const std::vector<std::pair<double, double>>& points,
                               const CircleFitParams& params, double delta) {
  return huber_cost(residuals(associate_radial(points, params), params), delta);
}

}  // namespace detail

// Joint radial association and Huber-robust Levenberg-Marquardt refinement
// of the concentric circle pair. The association is redone at every
// iteration; robustness enters as IRLS weights in the normal equations.
inline FitReport fit_circles(const Cluster& cluster, const FitConfig& config = {}) {
  CircleFitParams params = init_params(cluster, config.min_points);
  if (params.outer_radius - params.inner_radius < config.min_annulus_px) {
    throw DegenerateAnnulusError("initial radii separated by less than " +
                                 std::to_string(config.min_annulus_px) + " px");
  }
  const auto& pts = cluster.members;
  const double delta = config.huber_delta;

  FitReport report;
  double lambda = config.lambda_init;
  double cost = detail::association_cost(pts, params, delta);

  int iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    const RadialAssignment assign = associate_radial(pts, params);
    const std::vector<double> xi = residuals(assign, params);
    const Eigen::MatrixXd jac = residual_jacobian(assign, params);

    // IRLS weights realize the Huber loss inside plain normal equations.
    const Eigen::Index n = jac.rows();
    Eigen::VectorXd w(n);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      r(i) = xi[std::size_t(i)];
      const double a = std::abs(r(i));
      w(i) = (a <= delta || a == 0.0) ? 1.0 : delta / a;
    }
    const Eigen::MatrixXd jw = w.asDiagonal() * jac;
    const Eigen::Matrix4d hessian = jac.transpose() * jw;
    const Eigen::Vector4d gradient = 2.0 * jac.transpose() * (w.cwiseProduct(r));

    if (gradient.cwiseAbs().maxCoeff() < config.gradient_tol) {
      report.converged = true;
      break;
    }

    Eigen::Matrix4d damped = hessian;
    for (int d = 0; d < 4; ++d) {
      damped(d, d) += lambda * std::max(hessian(d, d), 1e-12);
    }
    const Eigen::Vector4d step = damped.ldlt().solve(-0.5 * gradient);

    CircleFitParams trial = params;
    trial.inner_radius = std::abs(trial.inner_radius + step(0));
    trial.outer_radius = std::abs(trial.outer_radius + step(1));
    trial.center_x += step(2);
    trial.center_y += step(3);
    if (trial.inner_radius > trial.outer_radius) {
      std::swap(trial.inner_radius, trial.outer_radius);
    }

    const double trial_cost = detail::association_cost(pts, trial, delta);
    if (trial_cost < cost) {
      const double drop = cost - trial_cost;
      params = trial;
      cost = trial_cost;
      lambda *= config.lambda_decrease;
      if (drop <= config.cost_rel_tol * (cost + 1e-30)) {
        report.converged = true;
        ++iter;
        break;
      }
    } else {
      lambda *= config.lambda_increase;
    }
  }

  report.params = params;
  report.iterations = iter;
  report.final_cost = cost;
  const std::vector<double> xi_final = residuals(associate_radial(pts, params), params);
  std::size_t inliers = 0;
  for (const double v : xi_final) {
    if (std::abs(v) <= delta) ++inliers;
  }
  report.inlier_fraction = xi_final.empty() ? 0.0 : double(inliers) / double(xi_final.size());
  return report;
}

}  // namespace evsink
