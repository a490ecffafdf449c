#pragma once

// Schrödinger-picture evaluation of morphism IR. A morphism e: X → Y acts on
// normal states backwards, e_*: states(Y) → states(X). States on concrete
// objects are coordinate vectors ω(E_rc); on the formal objects they are
// finite formal sums:
//   Hom(A, B)  Σ c·[γ, f]  with f: B → C ⊗ A and γ a state on C, meaning the
//              map α ↦ f_*(γ ⊗ α)
//   L X        Σ w·δ_p     measures over points p (pure states of X)
//   tensors    Σ c·(s₁ ⊗ ... ⊗ sₙ) over the flattened factors
//   sums       pairs (s_A, s_B)

#include <complex>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qlc/denot/ir.hpp"

namespace qlc::denot {

using cd = std::complex<double>;

class State;
using St = std::shared_ptr<const State>;

struct FormalClosure {
  St gamma;
  Mor f;
  Obj c, a;
};

class State {
 public:
  Obj obj;
  vna::Vec vec;                                         // Concrete
  std::vector<std::pair<cd, FormalClosure>> closures;   // Hom
  std::vector<std::pair<cd, St>> points;                // LFormal
  std::vector<std::pair<cd, std::vector<St>>> terms;    // TensorF
  St left, right;                                       // SumF
};

St zero_state(const Obj& o);
St vec_state(const Obj& o, vna::Vec v);
St add(const St& a, const St& b);
St scale(cd c, const St& s);
cd mass(const St& s);  // ω(1)

St tensor_state(const std::vector<Obj>& factors, const std::vector<St>& states);
// Writes a state on tensor(factors) as a sum of product states.
std::vector<std::pair<cd, std::vector<St>>> split_state(const std::vector<Obj>& factors,
                                                        const St& s);
St sum_state(const Obj& a, const Obj& b, const St& sa, const St& sb);
std::pair<St, St> split_sum(const Obj& a, const Obj& b, const St& s);

// Measures on nsp X, as states on lform(X), and back. Points are represented
// as states on X; from_points rejects concrete states that are not points.
std::vector<std::pair<cd, St>> points_of(const Obj& x, const St& s);
St from_points(const Obj& x, const std::vector<std::pair<cd, St>>& pts);

class Evaluator {
 public:
  // Subtrees whose objects are all concrete and small enough are evaluated
  // once as matrices with the vna operations.
  explicit Evaluator(int matrix_limit = 1 << 16) : limit_(matrix_limit) {}

  St pull(const Mor& e, const St& s);
  vna::Vec pull(const Mor& e, const vna::Vec& s);

  // Heisenberg matrix of e; dom and cod must be concrete.
  vna::Morphism to_matrix(const Mor& e);

  // Matrix of an all-concrete subtree computed with vna arithmetic.
  const vna::Morphism& concrete_matrix(const Mor& e);

 private:
  St apply(const FormalClosure& cl, const St& arg);
  St pull_structural(const Mor& e, const St& s);

  int limit_;
  std::unordered_map<const MorNode*, std::pair<Mor, vna::Morphism>> memo_;
};

}  // namespace qlc::denot
