#pragma once

#include <cstddef>

#include "qlc/denot/ir.hpp"

namespace qlc::denot {

struct NormalizeStats {
  std::size_t rewrites = 0;
  bool budget_exhausted = false;
};

// Rewrites e with the laws of the semantics until no rule applies or the
// budget (counted in visited nodes) runs out:
//   adjunction         (Λf ⊗ id) ∘ ε → f
//   naturality of η    Lh ∘ η → η ∘ h
//   functoriality      Lg ∘ Lf → L(g∘f), L(id) → id
//   inverse pairs      η⁻¹∘η, dᴸ⁻¹∘dᴸ, eᴸ⁻¹∘eᴸ, θ⁻¹∘θ, γ∘γ (and the converses) → id
//   monad              μ ∘ η → id, μ ∘ Lη → id
//   products           π_i ∘ ⟨f₁, f₂⟩ → f_i, ⟨f, g⟩ ∘ e → ⟨f∘e, g∘e⟩
//   interchange        (q∘p) ⊗ (s∘r) → (q⊗s) ∘ (p⊗r)
//   distributivity     id ⊗ ⟨h₁, h₂⟩ → θ ∘ ⟨id⊗h₁, id⊗h₂⟩
//   concrete folding   a subtree over concrete objects becomes one matrix
Mor normalize(const Mor& e, std::size_t budget = 1000000, NormalizeStats* stats = nullptr);

}  // namespace qlc::denot
