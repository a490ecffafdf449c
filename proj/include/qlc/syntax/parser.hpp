#pragma once

#include <map>
#include <string>
#include <vector>

#include "qlc/error.hpp"
#include "qlc/syntax/term.hpp"

namespace qlc {

// Gate declarations followed by one closed term.
struct Program {
  std::vector<GatePtr> gates;  // user declarations, in order
  Term term;
};

// Surface grammar (ASCII; λ ⊸ ⊗ ⊕ ⊤ ⟨ ⟩ accepted as synonyms):
//
//   program ::= { "gate" NAME "=" matrix } term
//   type    ::= sum ["-o" type]          sum ::= tensor {"+" tensor}
//   tensor  ::= pre {"*" pre}            pre ::= "!" pre | "qbit" | "top" | "bit" | "(" type ")"
//   term    ::= "lambda"[^n] x ":" type "." term
//             | "let" "<" x ":" type "," y ":" type ">"[^n] "=" term "in" term
//             | "let" x ":" type "=" term "in" term          (sugar for (lambda x:A. M) N)
//             | "match"[^n] term "with" "(" x ":" type "->" term "|" y ":" type "->" term ")"
//             | "if" term "then" term "else" term            (sugar for match^0 on bit)
//             | atom {atom}
//   atom    ::= x["^{" type "}"] | "new"|"meas"|GATE ["^{" type "}"] | "*"[^n]
//             | "ff"[^n] | "tt"[^n] | "<" term {"," term} ">"[^n]
//             | ("inl"|"inr")[^n] "[" type "," type "]" atom | "(" term ")"
//
// Unannotated variables take their binder's type (!^n A for let/match
// binders); unannotated constants take default_const_type. "#" starts a line
// comment.
Program parse_program(const std::string& text);

// Parses a term. gates extends the built-in gate table; ctx gives default
// annotations for free variables.
Term parse_term(const std::string& text, const std::vector<GatePtr>& gates = {},
                const std::map<std::string, Type>& ctx = {});

Type parse_type(const std::string& text);

}  // namespace qlc
