#pragma once

// Finite-dimensional von Neumann algebras ⊕_i M_{n_i} and the linear maps
// between them, in the Heisenberg direction: a morphism f: A → B sends
// elements of A to elements of B.
//
// Layout: an element is vectorized block by block, each block column-major,
// so the matrix unit E_rc of block b sits at offset(b) + r + c·n_b.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlc/error.hpp"

namespace qlc::vna {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

class VnaError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kTol = 1e-9;

struct Object {
  std::vector<int> blocks;

  int dim() const;                 // Σ n_i²
  int offset(std::size_t b) const;  // start of block b in the vectorization
  int index(std::size_t b, int r, int c) const { return offset(b) + r + c * blocks[b]; }
  bool is_lform() const;            // every block is 1x1
  bool operator==(const Object& o) const { return blocks == o.blocks; }
  bool operator!=(const Object& o) const { return blocks != o.blocks; }
};

Object scalars();  // ℂ = [1]
Object bit_obj();  // ℂ² = [1,1]
Object qubits(int k);  // M_{2^k}

std::string to_string(const Object& a);

using Element = std::vector<Mat>;

Element unit(const Object& a);
Element zero(const Object& a);
Vec vec(const Object& a, const Element& x);
Element unvec(const Object& a, const Vec& v);
Element multiply(const Element& x, const Element& y);
Element adjoint(const Element& x);
bool is_self_adjoint(const Element& x, double tol = kTol);
bool is_positive(const Element& x, double tol = kTol);

// Flags are only ever set when the property is known by construction or has
// been verified; unset means "not claimed".
struct Flags {
  bool cp = false, miu = false, unital = false, subunital = false;
};

struct Morphism {
  Object dom, cod;
  Mat m;  // dim(cod) x dim(dom)
  Flags flags;

  Element operator()(const Element& x) const;
  Vec apply(const Vec& x) const { return m * x; }
};

Morphism identity(const Object& a);
Morphism compose(const Morphism& g, const Morphism& f);  // g ∘ f
// Unflagged linear combination; used for tests and formal sums.
Morphism linear(const Object& dom, const Object& cod, Mat m);
bool approx_equal(const Morphism& f, const Morphism& g, double tol = kTol);

bool is_cp(const Morphism& f);
bool is_miu(const Morphism& f);
bool is_unital(const Morphism& f);
bool is_subunital(const Morphism& f);

// Re-runs the predicates behind every claimed flag.
bool flags_hold(const Morphism& f);

// Tensor products. Blocks are n_i·m_j in lexicographic (i, j) order; inside a
// block the row index of E ⊗ E' is r·m_j + r'.
Object tensor(const Object& a, const Object& b);
Object tensor(const std::vector<Object>& factors);
Vec tensor_vec(const Object& a, const Object& b, const Vec& x, const Vec& y);
Morphism tensor_mor(const Morphism& f, const Morphism& g);  // requires CP inputs
// Plain linear tensor of the matrices, no positivity check; flags are the
// conjunction of the inputs'.
Morphism tensor_linear(const Morphism& f, const Morphism& g);
// idx[i·dim(b) + j] = flat index of E_i ⊗ E_j in tensor(a, b).
std::vector<int> tensor_index(const Object& a, const Object& b);

// Direct sums (products in the MIU and CPsU categories).
Object direct_sum(const Object& a, const Object& b);
Morphism proj1(const Object& a, const Object& b);  // A ⊕ B → A
Morphism proj2(const Object& a, const Object& b);
Morphism tuple(const Morphism& f, const Morphism& g);  // C → A ⊕ B
Morphism oplus_mor(const Morphism& f, const Morphism& g);

// Normal spectrum: one point per 1x1 block, labelled by block index.
struct FiniteSet {
  std::vector<std::string> labels;
  std::size_t size() const { return labels.size(); }
};

FiniteSet nsp(const Object& a);
std::vector<int> nsp_blocks(const Object& a);
Morphism point(const Object& a, std::size_t k);  // A → ℂ, evaluation at the k-th point

Object linf(const FiniteSet& x);
// h: Y → X given as h[y] = index in X; yields ℓ∞(X) → ℓ∞(Y), φ ↦ φ∘h.
Morphism linf_mor(const std::vector<int>& h, std::size_t x_size);

// The monad L = ℓ∞ ∘ nsp and its structure.
Object L_obj(const Object& a);
Morphism L_mor(const Morphism& f);  // requires f MIU
Morphism eta(const Object& a);      // A → LA
Morphism eta_inv(const Object& a);  // LA → A for L-form A (an identity)
Morphism mu(const Object& a);       // L²A → LA
Morphism dL(const Object& a, const Object& b);      // LA ⊗ LB → L(A⊗B)
Morphism dL_inv(const Object& a, const Object& b);
Morphism eL(const Object& a, const Object& b);      // LA ⊕ LB → L(A⊕B)
Morphism eL_inv(const Object& a, const Object& b);
Morphism nabla(const Object& a);                    // LA ⊗ LA → LA, pointwise product

// (A⊗B) ⊕ (A⊗C) → A ⊗ (B⊕C) and its inverse.
Morphism theta(const Object& a, const Object& b, const Object& c);
Morphism theta_inv(const Object& a, const Object& b, const Object& c);
Morphism gamma(const Object& a, const Object& b);  // A ⊗ B → B ⊗ A

// Morphism between block objects that just reorders blocks: cod block k is dom
// block perm[k].
Morphism block_permutation(const Object& dom, const std::vector<int>& perm);

// A context shape names each tensor factor.
using Shape = std::vector<std::pair<std::string, Object>>;

Object shape_object(const Shape& s);

// The map (⊗ sources) → target that routes each named factor to the target
// factor with the same name. A target factor with no source receives the
// unit (the unique MIU map ℂ → A); a name present in several sources must
// be of L-form and is combined with ∇. Every source name must occur in the
// target.
Morphism rewire(const std::vector<Shape>& sources, const Shape& target);

Morphism iota(const Shape& sub, const Shape& super);
Morphism merge(const Shape& left, const Shape& right, const Shape& target);

// Unital, CP (complete positivity is used as the positivity test), and the
// unit and associativity laws on matrix units.
bool is_duplicator(const Object& a, const Morphism& m);

// ⟨ψ|−|ψ⟩ : M_{dim ψ} → ℂ
Morphism psi_functional(const Vec& psi);

// Interpretations of the constants.
Morphism f_new();                      // M₂ → ℂ², A ↦ (⟨0|A|0⟩, ⟨1|A|1⟩)
Morphism f_meas();                     // ℂ² → M₂, (λ, ρ) ↦ diag(λ, ρ)
Morphism f_unitary(const Mat& u);      // A ↦ U*AU

}  // namespace qlc::vna
