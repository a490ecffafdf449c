#pragma once

// Semantic objects and the symbolic morphism language used by the
// denotational semantics. Morphisms point in the Heisenberg direction: the
// meaning of a judgement Δ ▷ M : A is a map [[A]] → [[Δ]].

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qlc/error.hpp"
#include "qlc/vna/vna.hpp"

namespace qlc::denot {

class SemObject;
using Obj = std::shared_ptr<const SemObject>;

class SemObject {
 public:
  enum class Kind { Concrete, Hom, LFormal, TensorF, SumF };

  Kind kind;
  vna::Object conc;        // Concrete
  std::vector<Obj> parts;  // Hom {A, B}; LFormal {X}; TensorF factors (>= 2); SumF {A, B}
};

// Smart constructors keep objects canonical:
//  - L of a concrete object is evaluated, L is idempotent on LFormal;
//  - tensors are flattened, adjacent concrete factors are multiplied out and
//    ℂ factors dropped (a zero-algebra factor makes the whole tensor zero);
//  - sums of concrete objects are evaluated.
Obj concrete(vna::Object o);
Obj scalars();
Obj hom(Obj a, Obj b);
Obj lform(Obj x);
Obj tensor(const std::vector<Obj>& factors);
Obj tensor(Obj a, Obj b);
Obj sum(Obj a, Obj b);

bool same(const Obj& a, const Obj& b);
bool is_concrete(const Obj& a);
bool is_lform(const Obj& a);  // L-form: lform(a) is a
std::string to_string(const Obj& a);

// Parts of a flattened tensor: TensorF → its factors, ℂ → {}, otherwise {a}.
std::vector<Obj> tensor_parts(const Obj& a);

class MorNode;
using Mor = std::shared_ptr<const MorNode>;

enum class Op {
  Id, Conc, Comp, Tens, Oplus, Tuple, Proj, Lam, Eps, Lmap, Eta, EtaInv, Mu,
  DL, DLInv, EL, ELInv, Nabla, Theta, ThetaInv, Gamma, Iota, Merge, Bang
};

const char* op_name(Op op);

// Named tensor factors, as in a typing context.
using Shape = std::vector<std::pair<std::string, Obj>>;

Obj shape_object(const Shape& s);

class MorNode {
 public:
  Op op;
  Obj dom, cod;
  std::vector<Mor> kids;
  std::vector<Obj> objs;  // parameters of structure maps
  std::shared_ptr<const vna::Morphism> conc;
  int index = 0;              // Proj: 1 or 2
  std::vector<Shape> shapes;  // Iota {from, to}; Merge {left, right, target}
  bool all_concrete = false;  // every object in the subtree is concrete
};

// All constructors check that the pieces fit and throw DenotError otherwise.
Mor id(Obj x);
Mor conc(vna::Morphism f);
Mor comp(Mor g, Mor f);                 // g ∘ f
Mor comp(const std::vector<Mor>& chain);  // chain[0] ∘ chain[1] ∘ ...
Mor tens(Mor a, Mor b);
Mor oplus(Mor a, Mor b);
Mor tuple(Mor f, Mor g);
Mor proj(int i, Obj a, Obj b);          // A₁ ⊕ A₂ → A_i
Mor lam(Mor f, Obj c, Obj a);           // f: B → C ⊗ A gives Λf: (A ⊸ B) → C
Mor eps(Obj a, Obj b);                  // B → (A ⊸ B) ⊗ A
Mor lmap(Mor h);
Mor eta(Obj x);                         // X → LX
Mor eta_inv(Obj x);                     // LX → X, X of L-form
Mor mu(Obj x);                          // LLX → LX
Mor dl(const std::vector<Obj>& xs);     // LX₁ ⊗ ... ⊗ LXₙ → L(X₁ ⊗ ... ⊗ Xₙ)
Mor dl_inv(const std::vector<Obj>& xs);
Mor el(Obj a, Obj b);                   // LA ⊕ LB → L(A ⊕ B)
Mor el_inv(Obj a, Obj b);
Mor nabla(Obj x);                       // LX ⊗ LX → LX
Mor theta(Obj a, Obj b, Obj c);         // (A⊗B) ⊕ (A⊗C) → A ⊗ (B⊕C)
Mor theta_inv(Obj a, Obj b, Obj c);
Mor gamma(Obj a, Obj b);                // A ⊗ B → B ⊗ A
Mor iota(Shape from, Shape to);
Mor merge(Shape left, Shape right, Shape target);
Mor bang(Obj a);                        // ℂ → A, the unit

std::string print(const Mor& e);
std::size_t size(const Mor& e);  // node count

}  // namespace qlc::denot
