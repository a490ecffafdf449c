#pragma once

#include "qlc/denot/eval.hpp"
#include "qlc/denot/ir.hpp"
#include "qlc/opsem/opsem.hpp"
#include "qlc/typing/typing.hpp"

namespace qlc::denot {

Obj interp_type(const Type& a);
Shape interp_context(const Context& ctx);

// [[A <: B]] : [[B]] → [[A]]
Mor interp_subtype(const Type& a, const Type& b);

// [[c]] : [[!A_c]] → ℂ
Mor interp_constant(ConstKind c, const Gate* gate);

// [[Δ ▷ M : A]] : [[A]] → [[Δ]]
Mor interp_judgement(const Derivation& d);
// The same map with the context restricted to the free variables of M.
Mor interp_judgement_fv(const Derivation& d);

// [[ [|ψ>, L, M] : A ]] : [[A]] → ℂ
Mor interp_closure(const Closure& c);

// Raised when an IR has a function-type object at its boundary, so no matrix
// exists; carries the smallest subtree with a non-concrete object.
class ResidualError : public DenotError {
 public:
  ResidualError(const std::string& msg, Mor residual) : DenotError(msg), residual_(std::move(residual)) {}
  const Mor& residual() const { return residual_; }

 private:
  Mor residual_;
};

// Normalizes e and evaluates what is left to a single matrix.
vna::Morphism to_concrete(const Mor& e);

// Denotation of a closed program's closure as a matrix [[A]] → ℂ.
vna::Morphism denote(const Closure& c);

}  // namespace qlc::denot
