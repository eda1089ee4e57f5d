#include "mimo_switch/asymptotics.hpp"

#include <string>
#include <vector>

#include "mimo_switch/linalg.hpp"

namespace mimo_switch {

PsiMatrix build_psi(const Scenario& sc, const SwitchPattern& pat) {
  if (pat.size() != sc.users()) throw ContractViolation("pattern size differs from K");
  const int n = sc.antennas();
  const int k = sc.users();
  CMatrix psi = CMatrix::Zero(n * n, n * n);
  for (int l = 0; l < k; ++l) {
    const int j = pat.receiver_of(l);
    const double scale = sc.powers()[l] * sc.powers()[l] * sc.mse_weights()[j];
    if (scale == 0.0) continue;
    const CVector h = sc.uplink().col(l);
    const CMatrix left = (h * h.adjoint()).transpose();
    const CVector f = sc.downlink().row(j).transpose();
    const CMatrix right = f.conjugate() * f.transpose();  // F^H p p^T F
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) psi.block(a * n, b * n, n, n) += scale * left(a, b) * right;
  }
  return PsiMatrix{psi};
}

RelaySolution low_snr_precoder(const Scenario& sc, const SwitchPattern& pat) {
  const PsiMatrix psi = build_psi(sc, pat);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(psi.psi);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition of Psi failed");
  const auto n = sc.antennas();
  const CVector v = linalg::normalize_phase(eig.eigenvectors().col(n * n - 1));
  return scale_to_budget(linalg::unvec(v, n, n), sc);
}

CMatrix high_snr_zf_precoder(const Scenario& sc, const SwitchPattern& pat, const CVector& b,
                             const CVector& c) {
  const int k = sc.users();
  if (sc.antennas() < k) throw ContractViolation("zero-forcing relay needs N >= K");
  if (b.size() != k || c.size() != k) throw ContractViolation("b and c must have K entries");
  for (int j = 0; j < k; ++j)
    if (c[j] == Complex(0.0)) throw ContractViolation("receive scalings must be nonzero");
  if (linalg::rank(sc.uplink()) < k || linalg::rank(sc.downlink()) < k)
    throw RankError("channels have rank below K");
  CMatrix target = pat.matrix().cast<Complex>();
  target.diagonal() += b;
  const CMatrix scaled = c.cwiseInverse().asDiagonal() * target;
  return linalg::pinv(sc.downlink()) * scaled * linalg::pinv(sc.uplink());
}

RelaySolution null_space_precoder(const Scenario& sc, const SwitchPattern& pat) {
  const int k = sc.users();
  const int n = sc.antennas();
  if (n != k - 1) throw ContractViolation("null-space precoder needs N = K - 1");
  if (pat.size() != k) throw ContractViolation("pattern size differs from K");

  std::vector<CVector> rows;
  for (int i = 0; i < k; ++i) {
    const CVector h = sc.uplink().col(i);
    for (int j = 0; j < k; ++j) {
      if (j == i || j == pat.receiver_of(i)) continue;
      const CVector f = sc.downlink().row(j).transpose();
      CVector row(n * n);
      for (int b = 0; b < n; ++b) row.segment(b * n, n) = h[b] * f;
      rows.push_back(std::move(row));
    }
  }
  CMatrix s(static_cast<Eigen::Index>(rows.size()), n * n);
  for (std::size_t r = 0; r < rows.size(); ++r) s.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();

  Eigen::JacobiSVD<CMatrix> svd(s, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * sv[0]) ++rank;
  const int nullity = n * n - rank;
  if (nullity < 1) throw DegenerateSolution("coupling constraints leave no null space");

  std::vector<CMatrix> basis;
  for (int d = 0; d < nullity; ++d) basis.push_back(linalg::unvec(svd.matrixV().col(n * n - 1 - d), n, n));
  if (nullity == 1) return scale_to_budget(linalg::unvec(linalg::normalize_phase(linalg::vec(basis[0])), n, n), sc);

  // Pairwise-symmetric patterns leave more than one direction; take the one with the most
  // useful signal per unit of relay power.
  const CMatrix r = relay_covariance(sc);
  CMatrix useful = CMatrix::Zero(nullity, nullity);
  CMatrix power(nullity, nullity);
  for (int i = 0; i < k; ++i) {
    const CVector h = sc.uplink().col(i);
    const auto f = sc.downlink().row(pat.receiver_of(i));
    CVector u(nullity);
    for (int d = 0; d < nullity; ++d) u[d] = (f * basis[d] * h).value();
    useful += sc.powers()[i] * u.conjugate() * u.transpose();
  }
  for (int a = 0; a < nullity; ++a)
    for (int b = 0; b < nullity; ++b) power(a, b) = (basis[b] * r * basis[a].adjoint()).trace();
  Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> eig(useful, power);
  if (eig.info() != Eigen::Success) throw NumericError("generalized eigenproblem failed");
  const CVector y = eig.eigenvectors().col(nullity - 1);
  CMatrix g = CMatrix::Zero(n, n);
  for (int d = 0; d < nullity; ++d) g += y[d] * basis[d];
  return scale_to_budget(linalg::unvec(linalg::normalize_phase(linalg::vec(g)), n, n), sc);
}

}  // namespace mimo_switch
