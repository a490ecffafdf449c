#pragma once

#include <map>
#include <string>
#include <vector>

#include "qlc/syntax/term.hpp"

namespace qlc {

struct PrintOptions {
  // Omit annotations equal to the parser defaults, omit ^0 indices and use
  // the if/let/ff/tt sugar. Full mode prints every annotation and index.
  bool concise = false;
};

std::string print_type(const Type& t);

// ctx supplies the types of free variables, used to decide which variable
// annotations the concise form may omit.
std::string print_term(const Term& m, PrintOptions opts = {},
                       const std::map<std::string, Type>& ctx = {});

std::string print_gate_decl(const Gate& g);

}  // namespace qlc
