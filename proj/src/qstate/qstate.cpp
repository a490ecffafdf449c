#include "qlc/qstate/qstate.hpp"

#include <limits>
#include <stdexcept>

namespace qlc {

int num_qubits(const StateVector& psi) {
  int n = 0;
  while ((Eigen::Index{1} << n) < psi.size()) ++n;
  if ((Eigen::Index{1} << n) != psi.size()) throw std::invalid_argument("state size is not 2^n");
  return n;
}

StateVector append_qubit(const StateVector& psi, int b) {
  StateVector out = StateVector::Zero(psi.size() * 2);
  for (Eigen::Index k = 0; k < psi.size(); ++k) out(2 * k + (b ? 1 : 0)) = psi(k);
  return out;
}

StateVector apply_unitary(const StateVector& psi, const Eigen::MatrixXcd& u,
                          const std::vector<int>& positions) {
  int n = num_qubits(psi);
  int k = static_cast<int>(positions.size());
  if (u.rows() != (Eigen::Index{1} << k) || u.cols() != u.rows())
    throw std::invalid_argument("unitary size does not match the number of positions");
  std::vector<Eigen::Index> masks(k);
  Eigen::Index all = 0;
  for (int j = 0; j < k; ++j) {
    int p = positions[j];
    if (p < 0 || p >= n) throw std::out_of_range("qubit position out of range");
    masks[j] = Eigen::Index{1} << (n - 1 - p);
    if (all & masks[j]) throw std::invalid_argument("repeated qubit position");
    all |= masks[j];
  }
  const Eigen::Index d = Eigen::Index{1} << k;
  StateVector out = psi;
  Eigen::VectorXcd in(d), res(d);
  std::vector<Eigen::Index> idx(d);
  for (Eigen::Index base = 0; base < psi.size(); ++base) {
    if (base & all) continue;
    for (Eigen::Index s = 0; s < d; ++s) {
      Eigen::Index i = base;
      for (int j = 0; j < k; ++j)
        if (s & (Eigen::Index{1} << (k - 1 - j))) i |= masks[j];
      idx[s] = i;
      in(s) = psi(i);
    }
    res.noalias() = u * in;
    for (Eigen::Index s = 0; s < d; ++s) out(idx[s]) = res(s);
  }
  return out;
}

Measurement measure(const StateVector& psi, int i) {
  int n = num_qubits(psi);
  if (i < 0 || i >= n) throw std::out_of_range("qubit position out of range");
  Eigen::Index mask = Eigen::Index{1} << (n - 1 - i);
  StateVector s0 = StateVector::Zero(psi.size()), s1 = StateVector::Zero(psi.size());
  for (Eigen::Index k = 0; k < psi.size(); ++k) (k & mask ? s1 : s0)(k) = psi(k);
  Measurement m;
  m.p0 = s0.squaredNorm();
  m.p1 = s1.squaredNorm();
  if (m.p0 > 0) m.psi0 = s0 / std::sqrt(m.p0);
  if (m.p1 > 0) m.psi1 = s1 / std::sqrt(m.p1);
  return m;
}

double state_distance(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace qlc
