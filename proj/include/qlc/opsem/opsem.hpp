#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qlc/error.hpp"
#include "qlc/qstate/qstate.hpp"
#include "qlc/syntax/term.hpp"

namespace qlc {

// [|ψ>, L, M]: register names L[i] label qubit i of psi.
struct Closure {
  StateVector psi;
  std::vector<std::string> reg;
  Term term;
};

Closure make_closure(const Term& m);  // empty register, ψ = 1

struct Successor {
  double prob;
  Closure closure;
  std::string rule;  // beta.lam, beta.tensor, beta.sum1, beta.sum2, U, meas0, meas1, new0, new1
};

// Branches with probability below this are dropped.
inline constexpr double kPruneTol = 1e-12;

// One reduction step. Empty result for values; throws EvalError when the
// closure is stuck (only possible for ill-typed input).
std::vector<Successor> step(const Closure& c);

struct Leaf {
  double prob;
  Closure closure;
};

struct Distribution {
  std::vector<Leaf> leaves;  // merged, in depth-first order of first occurrence
  double truncated = 0;      // mass of paths that hit the step cap
  std::size_t paths = 0;     // leaves before merging
  std::size_t longest = 0;   // steps on the longest path
};

struct BigStepOptions {
  std::size_t max_steps = 100000;  // per path
  unsigned threads = 1;
  double merge_tol = 1e-9;
};

Distribution big_step(const Closure& c, const BigStepOptions& opts = {});

// Probability mass on ff^0 and tt^0 leaves.
std::pair<double, double> observe(const Distribution& d);

struct TraceStep {
  std::string rule;
  double prob;  // probability of the chosen branch
  Closure closure;
};

struct Run {
  Closure result;
  std::vector<TraceStep> trace;
  bool finished = false;  // false if max_steps was reached
};

Run sample(const Closure& c, std::mt19937_64& rng, std::size_t max_steps = 100000);

bool closures_equivalent(const Closure& a, const Closure& b, double tol = 1e-9);

}  // namespace qlc
