#include "mimo_switch/linalg.hpp"

#include <cmath>

namespace mimo_switch::linalg {

CMatrix pinv(const CMatrix& a, double rcond) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const double cutoff = s.size() ? rcond * s[0] : 0.0;
  RVector inv = RVector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > cutoff) inv[i] = 1.0 / s[i];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

int rank(const CMatrix& a, double rcond) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  const RVector& s = svd.singularValues();
  if (s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rcond * s[0]) ++r;
  return r;
}

CMatrix hermitian_solve(const CMatrix& a, const CMatrix& b) {
  Eigen::LDLT<CMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw NumericError("Hermitian factorization failed");
  return ldlt.solve(b);
}

CMatrix right_hermitian_solve(const CMatrix& x, const CMatrix& a) {
  return hermitian_solve(a, x.adjoint()).adjoint();
}

double trace_real(const CMatrix& a) { return a.trace().real(); }

CVector vec(const CMatrix& a) { return Eigen::Map<const CVector>(a.data(), a.size()); }

CMatrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

CVector normalize_phase(const CVector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best]) * (1.0 + 1e-12)) best = i;
  if (v.size() == 0 || std::abs(v[best]) == 0.0) return v;
  return v * (std::conj(v[best]) / std::abs(v[best]));
}

}  // namespace mimo_switch::linalg
