#include "qlc/syntax/term.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace qlc {

using cd = std::complex<double>;

GatePtr builtin_gate(const std::string& name) {
  static const std::map<std::string, GatePtr> table = [] {
    std::map<std::string, GatePtr> t;
    auto add = [&](const std::string& n, int k, Eigen::MatrixXcd m) {
      t[n] = std::make_shared<Gate>(Gate{n, k, std::move(m)});
    };
    const double r = 1.0 / std::sqrt(2.0);
    const cd i(0, 1);
    Eigen::MatrixXcd m(2, 2);
    m << r, r, r, -r;
    add("H", 1, m);
    m << 0, 1, 1, 0;
    add("X", 1, m);
    m << 0, -i, i, 0;
    add("Y", 1, m);
    m << 1, 0, 0, -1;
    add("Z", 1, m);
    m << 1, 0, 0, i;
    add("S", 1, m);
    m << 1, 0, 0, std::polar(1.0, M_PI / 4);
    add("T", 1, m);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Identity(4, 4);
    c(2, 2) = 0, c(3, 3) = 0, c(2, 3) = 1, c(3, 2) = 1;
    add("CNOT", 2, c);
    c = Eigen::MatrixXcd::Identity(4, 4);
    c(1, 1) = 0, c(2, 2) = 0, c(1, 2) = 1, c(2, 1) = 1;
    add("SWAP", 2, c);
    c = Eigen::MatrixXcd::Identity(4, 4);
    c(3, 3) = -1;
    add("CZ", 2, c);
    Eigen::MatrixXcd tof = Eigen::MatrixXcd::Identity(8, 8);
    tof(6, 6) = 0, tof(7, 7) = 0, tof(6, 7) = 1, tof(7, 6) = 1;
    add("TOFFOLI", 3, tof);
    return t;
  }();
  auto it = table.find(name);
  return it == table.end() ? nullptr : it->second;
}

std::vector<std::string> builtin_gate_names() {
  return {"H", "X", "Y", "Z", "S", "T", "CNOT", "SWAP", "CZ", "TOFFOLI"};
}

Term Term::make(Node n) { return Term(std::make_shared<const Node>(std::move(n))); }

Term Term::var(std::string x, Type a, SourceLoc loc) {
  Node n;
  n.kind = Kind::Var;
  n.x = std::move(x);
  n.a = std::move(a);
  n.loc = loc;
  return make(std::move(n));
}

Term Term::constant(ConstKind c, Type a, GatePtr gate, SourceLoc loc) {
  if (c == ConstKind::Unitary && !gate) throw std::invalid_argument("unitary constant without gate");
  Node n;
  n.kind = Kind::Const;
  n.c = c;
  n.a = std::move(a);
  n.gate = std::move(gate);
  n.loc = loc;
  return make(std::move(n));
}

Term Term::lam(int idx, std::string x, Type a, Term body, SourceLoc loc) {
  Node n;
  n.kind = Kind::Lam;
  n.n = idx;
  n.x = std::move(x);
  n.a = std::move(a);
  n.kids = {std::move(body)};
  n.loc = loc;
  return make(std::move(n));
}

Term Term::app(Term f, Term arg, SourceLoc loc) {
  Node n;
  n.kind = Kind::App;
  n.kids = {std::move(f), std::move(arg)};
  n.loc = loc;
  return make(std::move(n));
}

Term Term::star(int idx, SourceLoc loc) {
  Node n;
  n.kind = Kind::Star;
  n.n = idx;
  n.loc = loc;
  return make(std::move(n));
}

Term Term::let_pair(int idx, std::string x, Type a, std::string y, Type b, Term bound, Term body,
                    SourceLoc loc) {
  if (x == y) throw std::invalid_argument("let pair binds the same name twice: " + x);
  Node n;
  n.kind = Kind::LetPair;
  n.n = idx;
  n.x = std::move(x);
  n.y = std::move(y);
  n.a = std::move(a);
  n.b = std::move(b);
  n.kids = {std::move(bound), std::move(body)};
  n.loc = loc;
  return make(std::move(n));
}

Term Term::pair(int idx, Term m, Term k, SourceLoc loc) {
  Node n;
  n.kind = Kind::Pair;
  n.n = idx;
  n.kids = {std::move(m), std::move(k)};
  n.loc = loc;
  return make(std::move(n));
}

Term Term::inl(int idx, Type a, Type b, Term m, SourceLoc loc) {
  Node n;
  n.kind = Kind::Inl;
  n.n = idx;
  n.a = std::move(a);
  n.b = std::move(b);
  n.kids = {std::move(m)};
  n.loc = loc;
  return make(std::move(n));
}

Term Term::inr(int idx, Type a, Type b, Term m, SourceLoc loc) {
  Node n;
  n.kind = Kind::Inr;
  n.n = idx;
  n.a = std::move(a);
  n.b = std::move(b);
  n.kids = {std::move(m)};
  n.loc = loc;
  return make(std::move(n));
}

Term Term::match(int idx, Term scrut, std::string x, Type a, Term left, std::string y, Type b,
                 Term right, SourceLoc loc) {
  Node n;
  n.kind = Kind::Match;
  n.n = idx;
  n.x = std::move(x);
  n.y = std::move(y);
  n.a = std::move(a);
  n.b = std::move(b);
  n.kids = {std::move(scrut), std::move(left), std::move(right)};
  n.loc = loc;
  return make(std::move(n));
}

Term Term::ff(int n) { return inl(n, Type::top(), Type::top(), star(n)); }
Term Term::tt(int n) { return inr(n, Type::top(), Type::top(), star(n)); }

Type axiom_const_type(ConstKind c, const Gate* gate) {
  switch (c) {
    case ConstKind::New:
      return Type::lollipop(Type::bit(), Type::qbit());
    case ConstKind::Meas:
      return Type::lollipop(Type::qbit(), Type::bang(Type::bit()));
    case ConstKind::Unitary:
      return Type::lollipop(Type::qbits(gate->arity), Type::qbits(gate->arity));
  }
  throw std::logic_error("bad constant");
}

Type default_const_type(ConstKind c, const Gate* gate) {
  if (c == ConstKind::Meas) return Type::lollipop(Type::qbit(), Type::bit());
  return axiom_const_type(c, gate);
}

namespace {

void collect_fv(const Term& m, std::multiset<std::string>& bound, std::set<std::string>& out) {
  using K = Term::Kind;
  switch (m.kind()) {
    case K::Var:
      if (!bound.count(m.name())) out.insert(m.name());
      return;
    case K::Const:
    case K::Star:
      return;
    case K::Lam: {
      auto it = bound.insert(m.name());
      collect_fv(m.child(0), bound, out);
      bound.erase(it);
      return;
    }
    case K::LetPair: {
      collect_fv(m.child(0), bound, out);
      auto i1 = bound.insert(m.name());
      auto i2 = bound.insert(m.name2());
      collect_fv(m.child(1), bound, out);
      bound.erase(i1);
      bound.erase(i2);
      return;
    }
    case K::Match: {
      collect_fv(m.child(0), bound, out);
      auto i1 = bound.insert(m.name());
      collect_fv(m.child(1), bound, out);
      bound.erase(i1);
      auto i2 = bound.insert(m.name2());
      collect_fv(m.child(2), bound, out);
      bound.erase(i2);
      return;
    }
    default:
      for (std::size_t i = 0; i < m.arity(); ++i)
        collect_fv(m.child(i), bound, out);
  }
}

void collect_names(const Term& m, std::set<std::string>& out) {
  if (!m.name().empty()) out.insert(m.name());
  if (!m.name2().empty()) out.insert(m.name2());
  for (std::size_t i = 0; i < m.arity(); ++i) collect_names(m.child(i), out);
}

}  // namespace

std::set<std::string> free_vars(const Term& m) {
  std::set<std::string> out;
  std::multiset<std::string> bound;
  collect_fv(m, bound, out);
  return out;
}

std::set<std::string> all_names(const Term& m) {
  std::set<std::string> out;
  collect_names(m, out);
  return out;
}

bool is_value(const Term& m) {
  using K = Term::Kind;
  switch (m.kind()) {
    case K::Var:
    case K::Const:
    case K::Star:
    case K::Lam:
      return true;
    case K::Pair:
      return is_value(m.child(0)) && is_value(m.child(1));
    case K::Inl:
    case K::Inr:
      return is_value(m.child(0));
    default:
      return false;
  }
}

Type annotated_type(const Term& m) {
  using K = Term::Kind;
  switch (m.kind()) {
    case K::Var:
    case K::Const:
      return m.type_a();
    case K::Star:
      return Type::bang(Type::top(), m.index());
    case K::Lam:
      return Type::bang(Type::lollipop(m.type_a(), annotated_type(m.child(0))), m.index());
    case K::App: {
      Type f = annotated_type(m.child(0));
      if (!f.is(Type::Kind::Lollipop)) throw std::invalid_argument("application of a non-function");
      return f.rhs();
    }
    case K::LetPair:
      return annotated_type(m.child(1));
    case K::Pair: {
      Type a = annotated_type(m.child(0)), b = annotated_type(m.child(1));
      int n = m.index();
      if (a.bangs() < n || b.bangs() < n) throw std::invalid_argument("pair components lack bangs");
      for (int i = 0; i < n; ++i) a = a.lhs(), b = b.lhs();
      return Type::bang(Type::tensor(a, b), n);
    }
    case K::Inl:
    case K::Inr:
      return Type::bang(Type::sum(m.type_a(), m.type_b()), m.index());
    case K::Match:
      return annotated_type(m.child(1));
  }
  throw std::logic_error("bad term");
}

Term coerce(const Term& m, const Type& target) {
  using K = Term::Kind;
  using TK = Type::Kind;
  Type cur = annotated_type(m);
  if (cur == target) return m;
  int mm = target.bangs();
  Type core = target.strip();
  switch (m.kind()) {
    case K::Var:
      return Term::var(m.name(), target, m.loc());
    case K::Const:
      return Term::constant(m.const_kind(), target, m.gate(), m.loc());
    case K::Star:
      if (!core.is(TK::Top)) break;
      return Term::star(mm, m.loc());
    case K::Lam:
      if (!core.is(TK::Lollipop)) break;
      return Term::lam(mm, m.name(), core.lhs(), coerce(m.child(0), core.rhs()), m.loc());
    case K::App: {
      Type f = annotated_type(m.child(0));
      return Term::app(coerce(m.child(0), Type::lollipop(f.lhs(), target)), m.child(1), m.loc());
    }
    case K::LetPair:
      return Term::let_pair(m.index(), m.name(), m.type_a(), m.name2(), m.type_b(), m.child(0),
                            coerce(m.child(1), target), m.loc());
    case K::Pair:
      if (!core.is(TK::Tensor)) break;
      return Term::pair(mm, coerce(m.child(0), Type::bang(core.lhs(), mm)),
                        coerce(m.child(1), Type::bang(core.rhs(), mm)), m.loc());
    case K::Inl:
      if (!core.is(TK::Sum)) break;
      return Term::inl(mm, core.lhs(), core.rhs(), coerce(m.child(0), Type::bang(core.lhs(), mm)),
                       m.loc());
    case K::Inr:
      if (!core.is(TK::Sum)) break;
      return Term::inr(mm, core.lhs(), core.rhs(), coerce(m.child(0), Type::bang(core.rhs(), mm)),
                       m.loc());
    case K::Match:
      return Term::match(m.index(), m.child(0), m.name(), m.type_a(), coerce(m.child(1), target),
                         m.name2(), m.type_b(), coerce(m.child(2), target), m.loc());
  }
  throw std::invalid_argument("coerce: term shape does not match target type");
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  std::string stem = base;
  auto pos = stem.find_last_of('_');
  if (pos != std::string::npos && pos + 1 < stem.size() &&
      stem.find_first_not_of("0123456789", pos + 1) == std::string::npos)
    stem = stem.substr(0, pos);
  if (!used.count(stem)) return stem;
  for (int k = 1;; ++k) {
    std::string c = stem + "_" + std::to_string(k);
    if (!used.count(c)) return c;
  }
}

namespace {

struct Subst {
  std::map<std::string, Term> map;
  std::set<std::string> fv_of_values;  // free variables of the substituted values
};

Term subst(const Term& m, const Subst& s);

Term rename_var(const Term& m, const std::string& x, const std::string& nx);

Term subst(const Term& m, const Subst& s) {
  using K = Term::Kind;
  if (s.map.empty()) return m;
  switch (m.kind()) {
    case K::Var: {
      auto it = s.map.find(m.name());
      if (it == s.map.end()) return m;
      return coerce(it->second, m.type_a());
    }
    case K::Const:
    case K::Star:
      return m;
    case K::Lam: {
      Subst inner = s;
      inner.map.erase(m.name());
      std::string x = m.name();
      Term body = m.child(0);
      if (!inner.map.empty() && inner.fv_of_values.count(x)) {
        std::set<std::string> used = inner.fv_of_values;
        for (auto& [k, v] : inner.map) used.insert(k);
        auto n = all_names(body);
        used.insert(n.begin(), n.end());
        std::string nx = fresh_name(x, used);
        body = rename_var(body, x, nx);
        x = nx;
      }
      return Term::lam(m.index(), x, m.type_a(), subst(body, inner), m.loc());
    }
    case K::App:
      return Term::app(subst(m.child(0), s), subst(m.child(1), s), m.loc());
    case K::Pair:
      return Term::pair(m.index(), subst(m.child(0), s), subst(m.child(1), s), m.loc());
    case K::Inl:
      return Term::inl(m.index(), m.type_a(), m.type_b(), subst(m.child(0), s), m.loc());
    case K::Inr:
      return Term::inr(m.index(), m.type_a(), m.type_b(), subst(m.child(0), s), m.loc());
    case K::LetPair: {
      Term bound = subst(m.child(0), s);
      Subst inner = s;
      inner.map.erase(m.name());
      inner.map.erase(m.name2());
      std::string x = m.name(), y = m.name2();
      Term body = m.child(1);
      if (!inner.map.empty()) {
        std::set<std::string> used = inner.fv_of_values;
        for (auto& [k, v] : inner.map) used.insert(k);
        auto n = all_names(body);
        used.insert(n.begin(), n.end());
        used.insert(x);
        used.insert(y);
        if (inner.fv_of_values.count(x)) {
          std::string nx = fresh_name(x, used);
          used.insert(nx);
          body = rename_var(body, x, nx);
          x = nx;
        }
        if (inner.fv_of_values.count(y)) {
          std::string ny = fresh_name(y, used);
          body = rename_var(body, y, ny);
          y = ny;
        }
      }
      return Term::let_pair(m.index(), x, m.type_a(), y, m.type_b(), bound, subst(body, inner),
                            m.loc());
    }
    case K::Match: {
      Term scrut = subst(m.child(0), s);
      std::string names[2] = {m.name(), m.name2()};
      Term branches[2] = {m.child(1), m.child(2)};
      for (int i = 0; i < 2; ++i) {
        Subst inner = s;
        inner.map.erase(names[i]);
        if (!inner.map.empty() && inner.fv_of_values.count(names[i])) {
          std::set<std::string> used = inner.fv_of_values;
          for (auto& [k, v] : inner.map) used.insert(k);
          auto n = all_names(branches[i]);
          used.insert(n.begin(), n.end());
          std::string nx = fresh_name(names[i], used);
          branches[i] = rename_var(branches[i], names[i], nx);
          names[i] = nx;
        }
        branches[i] = subst(branches[i], inner);
      }
      return Term::match(m.index(), scrut, names[0], m.type_a(), branches[0], names[1], m.type_b(),
                         branches[1], m.loc());
    }
  }
  throw std::logic_error("bad term");
}

Term rename_var(const Term& m, const std::string& x, const std::string& nx) {
  // nx is fresh for m, so nothing can be captured. Occurrences keep their
  // own annotations.
  struct Local {
    static Term go(const Term& t, const std::string& x, const std::string& nx) {
      using K = Term::Kind;
      switch (t.kind()) {
        case K::Var:
          return t.name() == x ? Term::var(nx, t.type_a(), t.loc()) : t;
        case K::Const:
        case K::Star:
          return t;
        case K::Lam:
          if (t.name() == x) return t;
          return Term::lam(t.index(), t.name(), t.type_a(), go(t.child(0), x, nx), t.loc());
        case K::App:
          return Term::app(go(t.child(0), x, nx), go(t.child(1), x, nx), t.loc());
        case K::Pair:
          return Term::pair(t.index(), go(t.child(0), x, nx), go(t.child(1), x, nx), t.loc());
        case K::Inl:
          return Term::inl(t.index(), t.type_a(), t.type_b(), go(t.child(0), x, nx), t.loc());
        case K::Inr:
          return Term::inr(t.index(), t.type_a(), t.type_b(), go(t.child(0), x, nx), t.loc());
        case K::LetPair: {
          Term body = (t.name() == x || t.name2() == x) ? t.child(1) : go(t.child(1), x, nx);
          return Term::let_pair(t.index(), t.name(), t.type_a(), t.name2(), t.type_b(),
                                go(t.child(0), x, nx), body, t.loc());
        }
        case K::Match: {
          Term l = t.name() == x ? t.child(1) : go(t.child(1), x, nx);
          Term r = t.name2() == x ? t.child(2) : go(t.child(2), x, nx);
          return Term::match(t.index(), go(t.child(0), x, nx), t.name(), t.type_a(), l, t.name2(),
                             t.type_b(), r, t.loc());
        }
      }
      throw std::logic_error("bad term");
    }
  };
  return Local::go(m, x, nx);
}

}  // namespace

Term rename_free_var(const Term& m, const std::string& x, const std::string& nx) {
  return rename_var(m, x, nx);
}

Term substitute(const Term& m, const std::map<std::string, Term>& sub) {
  Subst s;
  for (auto& [x, v] : sub) {
    s.map.emplace(x, v);
    auto fv = free_vars(v);
    s.fv_of_values.insert(fv.begin(), fv.end());
  }
  return subst(m, s);
}

Term substitute(const Term& m, const std::string& x, const Term& v) {
  return substitute(m, std::map<std::string, Term>{{x, v}});
}

Term freshen_binders(const Term& m, const std::set<std::string>& avoid) {
  using K = Term::Kind;
  std::set<std::string> used = avoid;
  auto names = all_names(m);
  used.insert(names.begin(), names.end());
  auto pick = [&](const std::string& x, Term& body) {
    if (!avoid.count(x)) return x;
    std::string nx = fresh_name(x, used);
    used.insert(nx);
    body = rename_var(body, x, nx);
    return nx;
  };
  switch (m.kind()) {
    case K::Var:
    case K::Const:
    case K::Star:
      return m;
    case K::Lam: {
      Term body = m.child(0);
      std::string x = pick(m.name(), body);
      return Term::lam(m.index(), x, m.type_a(), freshen_binders(body, avoid), m.loc());
    }
    case K::App:
      return Term::app(freshen_binders(m.child(0), avoid), freshen_binders(m.child(1), avoid),
                       m.loc());
    case K::Pair:
      return Term::pair(m.index(), freshen_binders(m.child(0), avoid),
                        freshen_binders(m.child(1), avoid), m.loc());
    case K::Inl:
      return Term::inl(m.index(), m.type_a(), m.type_b(), freshen_binders(m.child(0), avoid),
                       m.loc());
    case K::Inr:
      return Term::inr(m.index(), m.type_a(), m.type_b(), freshen_binders(m.child(0), avoid),
                       m.loc());
    case K::LetPair: {
      Term body = m.child(1);
      std::string x = pick(m.name(), body);
      std::string y = pick(m.name2(), body);
      return Term::let_pair(m.index(), x, m.type_a(), y, m.type_b(),
                            freshen_binders(m.child(0), avoid), freshen_binders(body, avoid),
                            m.loc());
    }
    case K::Match: {
      Term l = m.child(1), r = m.child(2);
      std::string x = pick(m.name(), l);
      std::string y = pick(m.name2(), r);
      return Term::match(m.index(), freshen_binders(m.child(0), avoid), x, m.type_a(),
                         freshen_binders(l, avoid), y, m.type_b(), freshen_binders(r, avoid),
                         m.loc());
    }
  }
  throw std::logic_error("bad term");
}

namespace {

bool gate_eq(const GatePtr& a, const GatePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->name == b->name && a->arity == b->arity && a->matrix == b->matrix;
}

using Env = std::map<std::string, int>;

bool aeq(const Term& a, const Term& b, Env& ea, Env& eb, int depth) {
  using K = Term::Kind;
  if (a.kind() != b.kind() || a.index() != b.index()) return false;
  auto bind = [&](const std::string& x, const std::string& y, auto&& body) {
    auto sa = ea.find(x) != ea.end() ? std::optional<int>(ea[x]) : std::nullopt;
    auto sb = eb.find(y) != eb.end() ? std::optional<int>(eb[y]) : std::nullopt;
    ea[x] = depth;
    eb[y] = depth;
    bool r = body();
    if (sa) ea[x] = *sa; else ea.erase(x);
    if (sb) eb[y] = *sb; else eb.erase(y);
    return r;
  };
  switch (a.kind()) {
    case K::Var: {
      if (a.type_a() != b.type_a()) return false;
      auto ia = ea.find(a.name());
      auto ib = eb.find(b.name());
      if (ia == ea.end() && ib == eb.end()) return a.name() == b.name();
      return ia != ea.end() && ib != eb.end() && ia->second == ib->second;
    }
    case K::Const:
      return a.const_kind() == b.const_kind() && a.type_a() == b.type_a() &&
             gate_eq(a.gate(), b.gate());
    case K::Star:
      return true;
    case K::Lam:
      if (a.type_a() != b.type_a()) return false;
      return bind(a.name(), b.name(),
                  [&] { return aeq(a.child(0), b.child(0), ea, eb, depth + 1); });
    case K::App:
    case K::Pair:
      return aeq(a.child(0), b.child(0), ea, eb, depth) &&
             aeq(a.child(1), b.child(1), ea, eb, depth);
    case K::Inl:
    case K::Inr:
      return a.type_a() == b.type_a() && a.type_b() == b.type_b() &&
             aeq(a.child(0), b.child(0), ea, eb, depth);
    case K::LetPair:
      if (a.type_a() != b.type_a() || a.type_b() != b.type_b()) return false;
      if (!aeq(a.child(0), b.child(0), ea, eb, depth)) return false;
      return bind(a.name(), b.name(), [&] {
        return bind(a.name2(), b.name2(),
                    [&] { return aeq(a.child(1), b.child(1), ea, eb, depth + 2); });
      });
    case K::Match:
      if (a.type_a() != b.type_a() || a.type_b() != b.type_b()) return false;
      if (!aeq(a.child(0), b.child(0), ea, eb, depth)) return false;
      return bind(a.name(), b.name(),
                  [&] { return aeq(a.child(1), b.child(1), ea, eb, depth + 1); }) &&
             bind(a.name2(), b.name2(),
                  [&] { return aeq(a.child(2), b.child(2), ea, eb, depth + 1); });
  }
  return false;
}

}  // namespace

bool alpha_eq(const Term& a, const Term& b) {
  Env ea, eb;
  return aeq(a, b, ea, eb, 0);
}

Term tuple_of_vars(const std::vector<std::string>& xs) {
  if (xs.empty()) throw std::invalid_argument("empty tuple");
  Term t = Term::var(xs[0], Type::qbit());
  for (std::size_t i = 1; i < xs.size(); ++i) t = Term::pair(0, t, Term::var(xs[i], Type::qbit()));
  return t;
}

std::vector<std::string> vars_of_tuple(const Term& m) {
  if (m.is(Term::Kind::Var)) return {m.name()};
  if (m.is(Term::Kind::Pair) && m.index() == 0 && m.child(1).is(Term::Kind::Var)) {
    auto l = vars_of_tuple(m.child(0));
    if (l.empty()) return {};
    l.push_back(m.child(1).name());
    return l;
  }
  return {};
}

}  // namespace qlc
