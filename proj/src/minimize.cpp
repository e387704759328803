#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cknlab/error.hpp"
#include "cknlab/variational.hpp"

namespace cknlab::variational {
namespace {

struct Problem {
  Eigen::MatrixXd A, B;      // C is the identity in these coordinates
  Eigen::MatrixXd to_triple;  // triple coordinates = to_triple * y
};

struct Point {
  Eigen::VectorXd y;
  double f = 0.0;  // log Q
  Eigen::VectorXd g;
  bool positive = true;  // a > 0 and b > 0
  double q = 0.0;        // Q itself
};

Point evaluate(const Problem& p, const Eigen::VectorXd& y) {
  Point pt;
  pt.y = y;
  const Eigen::VectorXd Ay = p.A * y;
  const Eigen::VectorXd By = p.B * y;
  const double a = y.dot(Ay);
  const double b = y.dot(By);
  const double c = y.squaredNorm();
  pt.q = a * b / (c * c);
  if (!(a > 0.0) || !(b > 0.0)) {
    pt.positive = false;
    pt.f = -std::numeric_limits<double>::infinity();
    pt.g = Eigen::VectorXd::Zero(y.size());
    return pt;
  }
  pt.f = std::log(a) + std::log(b) - 2.0 * std::log(c);
  pt.g = 2.0 * Ay / a + 2.0 * By / b - 4.0 * y / c;
  return pt;
}

struct RunResult {
  Point best;
  int iterations = 0;
  bool converged = false;
};

// Quasi-Newton (BFGS on the inverse Hessian) with Armijo backtracking; every
// iterate is renormalized to the unit sphere.
RunResult bfgs(const Problem& p, Eigen::VectorXd y0, double tol, int max_iter) {
  const int m = static_cast<int>(y0.size());
  Point x = evaluate(p, y0.normalized());
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(m, m);
  RunResult out;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (!x.positive) break;
    if (x.g.norm() <= tol) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd d = -H * x.g;
    double slope = x.g.dot(d);
    if (!(slope < 0.0)) {
      H.setIdentity();
      d = -x.g;
      slope = -x.g.squaredNorm();
    }
    double step = 1.0;
    bool accepted = false;
    Point next;
    for (int ls = 0; ls < 60; ++ls) {
      next = evaluate(p, (x.y + step * d).normalized());
      if (!next.positive || next.f <= x.f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further decrease representable
    if (!next.positive) {
      x = next;
      break;
    }
    const Eigen::VectorXd s = next.y - x.y;
    const Eigen::VectorXd yk = next.g - x.g;
    const double sy = s.dot(yk);
    if (sy > 1e-300) {
      const Eigen::VectorXd Hy = H * yk;
      const double rho = 1.0 / sy;
      H += (rho * rho * yk.dot(Hy) + rho) * (s * s.transpose()) -
           rho * (Hy * s.transpose() + s * Hy.transpose());
    }
    x = next;
  }
  out.best = x;
  out.iterations = it;
  if (x.positive && x.g.norm() <= tol) out.converged = true;
  return out;
}

// Newton steps restricted to the tangent space of the unit sphere, with the
// exact Hessian of log Q; resolves the nearly flat dilation direction that
// slows the quasi-Newton iteration.
void polish(const Problem& p, RunResult& r, double tol) {
  for (int it = 0; it < 50; ++it) {
    Point& x = r.best;
    if (!x.positive || x.g.norm() <= tol) break;
    const Eigen::VectorXd& y = x.y;
    const int m = static_cast<int>(y.size());
    const Eigen::VectorXd Ay = p.A * y;
    const Eigen::VectorXd By = p.B * y;
    const double a = y.dot(Ay);
    const double b = y.dot(By);
    Eigen::MatrixXd H = 2.0 * p.A / a - 4.0 * Ay * Ay.transpose() / (a * a) + 2.0 * p.B / b -
                        4.0 * By * By.transpose() / (b * b) -
                        4.0 * Eigen::MatrixXd::Identity(m, m) + 8.0 * y * y.transpose();
    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(m, m) - y * y.transpose();
    Eigen::MatrixXd K = P * H * P;
    K = 0.5 * (K + K.transpose()) + y * y.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    if (es.info() != Eigen::Success) break;
    const double floor = 1e-10 * es.eigenvalues().cwiseAbs().maxCoeff();
    const Eigen::VectorXd lam = es.eigenvalues().cwiseAbs().cwiseMax(floor);
    const Eigen::VectorXd pg = P * x.g;
    const Eigen::VectorXd d =
        -(es.eigenvectors() * (es.eigenvectors().transpose() * pg).cwiseQuotient(lam));
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      Point next = evaluate(p, (y + step * d).normalized());
      if (next.positive && (next.f < x.f || (next.f <= x.f + 1e-15 * std::abs(x.f) &&
                                             next.g.norm() < x.g.norm()))) {
        x = next;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++r.iterations;
    if (!accepted) break;
  }
  r.converged = r.best.positive && r.best.g.norm() <= tol;
}

Problem reduce(const GramTriple& g) {
  Problem p;
  if (g.conditioned) {
    p.A = g.A;
    p.B = g.B;
    p.to_triple = Eigen::MatrixXd::Identity(g.A.rows(), g.A.cols());
    return p;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(g.C);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::consistency, "M_C is not numerically positive definite (Cholesky failed)");
  }
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd Li = L.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(g.C.rows(), g.C.cols()));
  p.A = Li * g.A * Li.transpose();
  p.B = Li * g.B * Li.transpose();
  p.A = 0.5 * (p.A + p.A.transpose());
  p.B = 0.5 * (p.B + p.B.transpose());
  p.to_triple = Li.transpose();
  return p;
}

}  // namespace

LogQuotient log_quotient(const GramTriple& g, const Eigen::VectorXd& y) {
  if (y.size() != g.A.rows()) fail(ErrorKind::domain, "coefficient vector has the wrong size");
  const Eigen::VectorXd Ay = g.A * y;
  const Eigen::VectorXd By = g.B * y;
  const Eigen::VectorXd Cy = g.C * y;
  const double a = y.dot(Ay);
  const double b = y.dot(By);
  const double c = y.dot(Cy);
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0)) {
    fail(ErrorKind::domain, "log-quotient needs positive A, B and C energies");
  }
  LogQuotient out;
  out.value = std::log(a) + std::log(b) - 2.0 * std::log(c);
  out.gradient = 2.0 * Ay / a + 2.0 * By / b - 4.0 * Cy / c;
  return out;
}

MinimizationResult minimize_quotient(const GramTriple& g, const MinimizeOptions& opts) {
  if (opts.restarts < 1) fail(ErrorKind::domain, "restarts must be >= 1");
  if (!(opts.tol > 0.0)) fail(ErrorKind::domain, "tolerance must be positive");
  const int m = static_cast<int>(g.A.rows());
  if (m < 1 || g.B.rows() != m || g.C.rows() != m) fail(ErrorKind::domain, "malformed Gram triple");

  const Problem p = reduce(g);

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Unit(m, 0));
  if (opts.warm_start) {
    if (opts.warm_start->size() != m) fail(ErrorKind::domain, "warm start has the wrong size");
    // Back to the orthonormal coordinates: y = to_triple⁻¹ c.
    Eigen::VectorXd y = p.to_triple.triangularView<Eigen::Upper>().solve(*opts.warm_start);
    if (y.norm() > 0.0 && y.allFinite()) starts.push_back(y);
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int r = 0; r < opts.restarts; ++r) {
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) y(i) = normal(rng);
    starts.push_back(y);
  }

  MinimizationResult res;
  res.basis_size = m;
  bool have = false;
  RunResult best;
  for (const auto& s : starts) {
    RunResult r = bfgs(p, s, opts.tol, opts.max_iter);
    polish(p, r, opts.tol);
    res.iterations += r.iterations;
    if (!have || r.best.q < best.best.q) {
      best = std::move(r);
      have = true;
    }
  }

  res.value = best.best.q;
  res.y = p.to_triple * best.best.y;
  res.coeffs = g.to_monomial * res.y;
  res.gradient_norm = best.best.positive ? best.best.g.norm() : std::numeric_limits<double>::infinity();
  res.converged = best.converged && std::isfinite(res.value);
  if (g.a_indefinite) {
    res.warnings.emplace_back(
        "M_A is indefinite: (2 alpha + 1)(N + 2k - 1) < 0 lets the quotient approach 0 or below");
  }
  if (!best.best.positive) res.warnings.emplace_back("minimization reached a non-positive quotient");
  if (!res.converged) {
    std::ostringstream os;
    os << "gradient norm " << res.gradient_norm << " above tolerance " << opts.tol;
    res.warnings.push_back(os.str());
  }
  return res;
}

}  // namespace cknlab::variational
