#include "mpsc/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace mpsc {

namespace {

double* field(ToleranceConfig& t, const std::string& key) {
  if (key == "rank_scale") return &t.rank_scale;
  if (key == "rank_floor") return &t.rank_floor;
  if (key == "eig_deadzone") return &t.eig_deadzone;
  if (key == "active") return &t.active;
  if (key == "feas") return &t.feas;
  if (key == "resid") return &t.resid;
  if (key == "sign") return &t.sign;
  if (key == "comp") return &t.comp;
  if (key == "dedup") return &t.dedup;
  if (key == "match") return &t.match;
  return nullptr;
}

}  // namespace

void ToleranceConfig::set(const std::string& key, double value) {
  double* f = field(*this, key);
  if (!f) throw std::invalid_argument("unknown tolerance key '" + key + "'");
  if (!(value >= 0.0)) throw std::invalid_argument("tolerance '" + key + "' must be nonnegative");
  *f = value;
}

std::map<std::string, double> ToleranceConfig::as_map() const {
  return {{"rank_scale", rank_scale}, {"rank_floor", rank_floor}, {"eig_deadzone", eig_deadzone},
          {"active", active},         {"feas", feas},             {"resid", resid},
          {"sign", sign},             {"comp", comp},             {"dedup", dedup},
          {"match", match}};
}

double rank_threshold(const Matrix& a, double largest_pivot, const ToleranceConfig& tol) {
  const double dim = static_cast<double>(std::max(a.rows(), a.cols()));
  return std::max(dim * tol.rank_scale * largest_pivot, tol.rank_floor);
}

namespace {

int qr_rank(const Eigen::ColPivHouseholderQR<Matrix>& qr, const Matrix& a, const ToleranceConfig& tol) {
  const Matrix& r = qr.matrixQR();
  const Eigen::Index diag = std::min(r.rows(), r.cols());
  if (diag == 0) return 0;
  const double largest = std::abs(r(0, 0));
  const double tau = rank_threshold(a, largest, tol);
  int count = 0;
  for (Eigen::Index i = 0; i < diag; ++i) {
    if (std::abs(r(i, i)) > tau) ++count;
  }
  return count;
}

}  // namespace

int rank(const Matrix& a, const ToleranceConfig& tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  return qr_rank(qr, a, tol);
}

Matrix nullspace_basis(const Matrix& a, const ToleranceConfig& tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return Matrix::Identity(n, n);
  if (n == 0) return Matrix(0, 0);
  // Q of A^T = [range(A^T) | ker(A)], ordered by pivot magnitude.
  const Matrix at = a.transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(at);
  const int r = qr_rank(qr, at, tol);
  const Matrix q = qr.householderQ();
  return q.rightCols(n - r);
}

Vector solve_linear(const Matrix& a, const Vector& b, const ToleranceConfig& tol) {
  if (a.rows() != b.size()) throw std::invalid_argument("solve_linear: dimension mismatch");
  if (a.cols() == 0) return Vector(0);
  if (a.rows() < a.cols()) throw SingularSystemError("solve_linear: underdetermined system");
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr_rank(qr, a, tol) < a.cols()) throw SingularSystemError("solve_linear: column rank deficient");
  return qr.solve(b);
}

Vector solve_min_norm(const Matrix& a, const Vector& b, const ToleranceConfig& tol) {
  if (a.rows() != b.size()) throw std::invalid_argument("solve_min_norm: dimension mismatch");
  if (a.cols() == 0) return Vector(0);
  if (a.rows() == 0) return Vector::Zero(a.cols());
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(std::max(a.rows(), a.cols()) * tol.rank_scale);
  cod.compute(a);
  return cod.solve(b);
}

Vector symmetric_eigenvalues(const Matrix& s) {
  if (s.rows() != s.cols()) throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
  const Eigen::Index n = s.rows();
  Matrix a = 0.5 * (s + s.transpose());
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-300 || off <= 1e-32 * a.squaredNorm()) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // rotation annihilating a(p, q)
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  Vector ev = a.diagonal();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

Inertia inertia(const Matrix& s, const ToleranceConfig& tol) {
  Inertia in;
  if (s.rows() == 0) return in;
  const Vector ev = symmetric_eigenvalues(s);
  const double scale = ev.cwiseAbs().maxCoeff();
  const double tau = tol.eig_deadzone * std::max(1.0, scale);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -tau)
      ++in.n_neg;
    else if (ev[i] > tau)
      ++in.n_pos;
    else
      ++in.n_zero;
  }
  return in;
}

int det_sign(const Inertia& in) {
  if (in.n_zero > 0) return 0;
  return (in.n_neg % 2 == 0) ? 1 : -1;
}

int det_sign(const Matrix& s, const ToleranceConfig& tol) { return det_sign(inertia(s, tol)); }

}  // namespace mpsc
