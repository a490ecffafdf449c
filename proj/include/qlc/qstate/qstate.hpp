#pragma once

#include <Eigen/Dense>
#include <vector>

namespace qlc {

// Normalized vector in (C^2)^{⊗n}. Qubit 0 is the leftmost tensor factor,
// i.e. the most significant bit of the amplitude index.
using StateVector = Eigen::VectorXcd;

int num_qubits(const StateVector& psi);

// |ψ> ⊗ |b>, the new qubit becomes the last (rightmost) one.
StateVector append_qubit(const StateVector& psi, int b);

// Applies the 2^k x 2^k unitary u to the qubits at positions (positions[0]
// is the most significant qubit of u's index).
StateVector apply_unitary(const StateVector& psi, const Eigen::MatrixXcd& u,
                          const std::vector<int>& positions);

struct Measurement {
  double p0 = 0, p1 = 0;
  StateVector psi0, psi1;  // normalized post-measurement states (empty if p == 0)
};

// Computational-basis measurement of qubit i; the qubit stays in the register.
Measurement measure(const StateVector& psi, int i);

// Max-abs entrywise difference; states of different size compare as infinity.
double state_distance(const StateVector& a, const StateVector& b);

}  // namespace qlc
