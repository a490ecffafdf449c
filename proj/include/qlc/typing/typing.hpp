#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlc/error.hpp"
#include "qlc/syntax/term.hpp"

namespace qlc {

// Ordered typing context. Names are distinct.
using Context = std::vector<std::pair<std::string, Type>>;

enum class Rule { Ax1, Ax2, TopI, LamI1, LamI2, LamE, TensorI, TensorE, SumI1, SumI2, SumE };

const char* rule_name(Rule r);

struct Derivation {
  Rule rule;
  Context ctx;
  Term term;
  Type type;
  std::vector<Derivation> premises;
  // Ax1: ctx type of the variable and the annotation; Ax2: !A_c and the
  // annotation.
  std::optional<std::pair<Type, Type>> subtyping;
};

bool subtype(const Type& a, const Type& b);

// Builds the unique derivation of ctx ▷ m. Binders that shadow a context
// variable are renamed, so the derivation's term is alpha-equivalent to m.
// Throws TypeError carrying the offending subterm's location.
Derivation typecheck(const Context& ctx, const Term& m);

// Register of a closure [|ψ>, L, M]: every name has type qbit.
Derivation check_closure(const std::vector<std::string>& reg, const Term& m);

// Sub-context of variables in fv, in ctx order.
Context restrict_ctx(const Context& ctx, const std::set<std::string>& fv);

std::optional<Type> lookup(const Context& ctx, const std::string& x);

}  // namespace qlc
