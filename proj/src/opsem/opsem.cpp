#include "qlc/opsem/opsem.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "qlc/syntax/printer.hpp"

namespace qlc {

Closure make_closure(const Term& m) {
  StateVector one(1);
  one(0) = 1;
  return {one, {}, m};
}

namespace {

using K = Term::Kind;

int position(const std::vector<std::string>& reg, const std::string& x) {
  auto it = std::find(reg.begin(), reg.end(), x);
  if (it == reg.end()) throw EvalError("variable '" + x + "' is not in the register");
  return static_cast<int>(it - reg.begin());
}

[[noreturn]] void stuck(const Term& m, const std::string& why) {
  throw EvalError("stuck at " + print_term(m, {true}) + ": " + why);
}

using Names = std::set<std::string>;

std::string new_qubit_name(const Closure& c, const Names& used) {
  for (std::size_t k = c.reg.size();; ++k) {
    std::string n = "q" + std::to_string(k);
    if (!used.count(n)) return n;
  }
}

std::vector<Successor> redex(const Closure& c, const Term& f, const Term& v, const Names& used) {
  const Term& m = c.term;
  if (f.is(K::Lam)) {
    if (f.index() != 0) stuck(m, "applying a duplicable abstraction");
    return {{1.0, {c.psi, c.reg, substitute(f.child(0), f.name(), v)}, "beta.lam"}};
  }
  if (!f.is(K::Const)) stuck(m, "applying a non-function value");
  const Type& ann = f.type_a();
  if (!ann.is(Type::Kind::Lollipop)) stuck(m, "constant annotation is not a function type");
  switch (f.const_kind()) {
    case ConstKind::New: {
      if (!(v.is(K::Inl) || v.is(K::Inr)) || !v.child(0).is(K::Star))
        stuck(m, "new expects a classical bit");
      int b = v.is(K::Inr) ? 1 : 0;
      std::string y = new_qubit_name(c, used);
      Closure out{append_qubit(c.psi, b), c.reg, Term::var(y, ann.rhs())};
      out.reg.push_back(y);
      return {{1.0, std::move(out), b ? "new1" : "new0"}};
    }
    case ConstKind::Meas: {
      if (!v.is(K::Var)) stuck(m, "meas expects a qubit variable");
      int i = position(c.reg, v.name());
      Measurement r = measure(c.psi, i);
      int n = ann.rhs().bangs();
      std::vector<Successor> out;
      if (r.p0 >= kPruneTol) out.push_back({r.p0, {r.psi0, c.reg, Term::ff(n)}, "meas0"});
      if (r.p1 >= kPruneTol) out.push_back({r.p1, {r.psi1, c.reg, Term::tt(n)}, "meas1"});
      return out;
    }
    case ConstKind::Unitary: {
      auto xs = vars_of_tuple(v);
      if (static_cast<int>(xs.size()) != f.gate()->arity)
        stuck(m, "gate " + f.gate()->name + " expects a " + std::to_string(f.gate()->arity) +
                     "-tuple of qubits");
      std::vector<int> pos;
      for (auto& x : xs) pos.push_back(position(c.reg, x));
      return {{1.0, {apply_unitary(c.psi, f.gate()->matrix, pos), c.reg, v}, "U"}};
    }
  }
  stuck(m, "unknown constant");
}

// Reduces the leftmost-innermost redex of c.term and plugs the results back
// through wrap.
template <class Wrap>
std::vector<Successor> under(const Closure& c, const Term& sub, const Names& used, Wrap wrap);

std::vector<Successor> reduce(const Closure& c, const Names& used) {
  const Term& m = c.term;
  switch (m.kind()) {
    case K::Var:
    case K::Const:
    case K::Star:
    case K::Lam:
      return {};
    case K::App: {
      const Term &f = m.child(0), &a = m.child(1);
      if (!is_value(f)) return under(c, f, used, [&](Term t) { return Term::app(t, a, m.loc()); });
      if (!is_value(a)) return under(c, a, used, [&](Term t) { return Term::app(f, t, m.loc()); });
      return redex(c, f, a, used);
    }
    case K::Pair: {
      const Term &a = m.child(0), &b = m.child(1);
      if (!is_value(a))
        return under(c, a, used, [&](Term t) { return Term::pair(m.index(), t, b, m.loc()); });
      if (!is_value(b))
        return under(c, b, used, [&](Term t) { return Term::pair(m.index(), a, t, m.loc()); });
      return {};
    }
    case K::Inl:
    case K::Inr: {
      const Term& a = m.child(0);
      if (is_value(a)) return {};
      bool left = m.is(K::Inl);
      return under(c, a, used, [&](Term t) {
        return left ? Term::inl(m.index(), m.type_a(), m.type_b(), t, m.loc())
                    : Term::inr(m.index(), m.type_a(), m.type_b(), t, m.loc());
      });
    }
    case K::LetPair: {
      const Term& n = m.child(0);
      if (!is_value(n))
        return under(c, n, used, [&](Term t) {
          return Term::let_pair(m.index(), m.name(), m.type_a(), m.name2(), m.type_b(), t,
                                m.child(1), m.loc());
        });
      if (!n.is(K::Pair)) stuck(m, "let-pair of a non-pair value");
      std::map<std::string, Term> sub{{m.name(), n.child(0)}, {m.name2(), n.child(1)}};
      return {{1.0, {c.psi, c.reg, substitute(m.child(1), sub)}, "beta.tensor"}};
    }
    case K::Match: {
      const Term& l = m.child(0);
      if (!is_value(l))
        return under(c, l, used, [&](Term t) {
          return Term::match(m.index(), t, m.name(), m.type_a(), m.child(1), m.name2(),
                             m.type_b(), m.child(2), m.loc());
        });
      if (l.is(K::Inl))
        return {{1.0, {c.psi, c.reg, substitute(m.child(1), m.name(), l.child(0))}, "beta.sum1"}};
      if (l.is(K::Inr))
        return {{1.0, {c.psi, c.reg, substitute(m.child(2), m.name2(), l.child(0))}, "beta.sum2"}};
      stuck(m, "match on a non-injection value");
    }
  }
  stuck(m, "unknown term");
}

template <class Wrap>
std::vector<Successor> under(const Closure& c, const Term& sub, const Names& used, Wrap wrap) {
  auto out = reduce({c.psi, c.reg, sub}, used);
  if (out.empty()) stuck(sub, "no redex in a non-value");
  for (auto& s : out) s.closure.term = wrap(s.closure.term);
  return out;
}

struct PathLeaf {
  std::vector<int> path;
  double prob;
  Closure closure;
  bool truncated;
  std::size_t depth;
};

// Depth-first enumeration. Only branching steps extend the path, so long
// deterministic runs do not deepen the recursion.
void explore(Closure c, double prob, std::vector<int>& path, std::size_t depth,
             std::size_t max_steps, std::vector<PathLeaf>& out) {
  for (;;) {
    if (is_value(c.term)) {
      out.push_back({path, prob, std::move(c), false, depth});
      return;
    }
    if (depth >= max_steps) {
      out.push_back({path, prob, std::move(c), true, depth});
      return;
    }
    auto next = step(c);
    ++depth;
    if (next.size() == 1) {
      prob *= next[0].prob;
      c = std::move(next[0].closure);
      continue;
    }
    for (std::size_t i = 0; i < next.size(); ++i) {
      path.push_back(static_cast<int>(i));
      explore(std::move(next[i].closure), prob * next[i].prob, path, depth, max_steps, out);
      path.pop_back();
    }
    return;
  }
}

struct Frontier {
  std::vector<int> path;
  double prob;
  Closure closure;
  std::size_t depth;
};

}  // namespace

std::vector<Successor> step(const Closure& c) {
  Names used(c.reg.begin(), c.reg.end());
  auto names = all_names(c.term);
  used.insert(names.begin(), names.end());
  return reduce(c, used);
}

bool closures_equivalent(const Closure& a, const Closure& b, double tol) {
  return a.reg == b.reg && state_distance(a.psi, b.psi) <= tol && alpha_eq(a.term, b.term);
}

Distribution big_step(const Closure& c, const BigStepOptions& opts) {
  std::vector<PathLeaf> leaves;
  if (opts.threads <= 1) {
    std::vector<int> path;
    explore(c, 1.0, path, 0, opts.max_steps, leaves);
  } else {
    // Breadth-first expansion until there is enough independent work, then
    // depth-first per frontier node. Leaves are ordered by path afterwards,
    // so the result does not depend on scheduling.
    std::vector<Frontier> frontier{{{}, 1.0, c, 0}};
    const std::size_t want = opts.threads * 4;
    for (bool grew = true; grew && frontier.size() < want;) {
      grew = false;
      std::vector<Frontier> next;
      for (auto& f : frontier) {
        if (is_value(f.closure.term) || f.depth >= opts.max_steps) {
          next.push_back(std::move(f));
          continue;
        }
        auto succ = step(f.closure);
        for (std::size_t i = 0; i < succ.size(); ++i) {
          auto p = f.path;
          p.push_back(static_cast<int>(i));
          next.push_back({std::move(p), f.prob * succ[i].prob, std::move(succ[i].closure),
                          f.depth + 1});
          grew = true;
        }
      }
      frontier = std::move(next);
    }
    std::vector<std::vector<PathLeaf>> parts(frontier.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
      for (std::size_t i; (i = cursor.fetch_add(1)) < frontier.size();) {
        auto path = frontier[i].path;
        explore(frontier[i].closure, frontier[i].prob, path, frontier[i].depth, opts.max_steps,
                parts[i]);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < opts.threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& p : parts)
      for (auto& l : p) leaves.push_back(std::move(l));
    std::sort(leaves.begin(), leaves.end(),
              [](const PathLeaf& a, const PathLeaf& b) { return a.path < b.path; });
  }
  Distribution d;
  d.paths = leaves.size();
  for (auto& l : leaves) {
    d.longest = std::max(d.longest, l.depth);
    if (l.truncated) {
      d.truncated += l.prob;
      continue;
    }
    bool merged = false;
    for (auto& e : d.leaves) {
      if (closures_equivalent(e.closure, l.closure, opts.merge_tol)) {
        e.prob += l.prob;
        merged = true;
        break;
      }
    }
    if (!merged) d.leaves.push_back({l.prob, std::move(l.closure)});
  }
  return d;
}

std::pair<double, double> observe(const Distribution& d) {
  double pf = 0, pt = 0;
  for (auto& l : d.leaves) {
    const Term& t = l.closure.term;
    if (t.index() != 0 || !(t.is(K::Inl) || t.is(K::Inr))) continue;
    if (!is_bit(Type::sum(t.type_a(), t.type_b())) || !t.child(0).is(K::Star)) continue;
    (t.is(K::Inl) ? pf : pt) += l.prob;
  }
  return {pf, pt};
}

Run sample(const Closure& c, std::mt19937_64& rng, std::size_t max_steps) {
  Run r{c, {}, false};
  for (std::size_t k = 0; k < max_steps; ++k) {
    if (is_value(r.result.term)) {
      r.finished = true;
      return r;
    }
    auto next = step(r.result);
    double total = 0;
    for (auto& s : next) total += s.prob;
    // 53 random bits -> uniform double in [0, 1).
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
    std::size_t pick = next.size() - 1;
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (u < next[i].prob) {
        pick = i;
        break;
      }
      u -= next[i].prob;
    }
    r.trace.push_back({next[pick].rule, next[pick].prob, next[pick].closure});
    r.result = std::move(next[pick].closure);
  }
  r.finished = is_value(r.result.term);
  return r;
}

}  // namespace qlc
