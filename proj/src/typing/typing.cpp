#include "qlc/typing/typing.hpp"

#include "qlc/syntax/printer.hpp"

namespace qlc {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Ax1: return "ax1";
    case Rule::Ax2: return "ax2";
    case Rule::TopI: return "top.I";
    case Rule::LamI1: return "lam.I1";
    case Rule::LamI2: return "lam.I2";
    case Rule::LamE: return "lam.E";
    case Rule::TensorI: return "tensor.I";
    case Rule::TensorE: return "tensor.E";
    case Rule::SumI1: return "sum.I1";
    case Rule::SumI2: return "sum.I2";
    case Rule::SumE: return "sum.E";
  }
  return "?";
}

bool subtype(const Type& a, const Type& b) {
  using K = Type::Kind;
  int n = a.bangs(), m = b.bangs();
  if (n == 0 && m > 0) return false;
  Type a0 = a.strip(), b0 = b.strip();
  if (a0.kind() != b0.kind()) return false;
  switch (a0.kind()) {
    case K::Qbit:
    case K::Top:
      return true;
    case K::Tensor:
    case K::Sum:
      return subtype(a0.lhs(), b0.lhs()) && subtype(a0.rhs(), b0.rhs());
    case K::Lollipop:
      return subtype(b0.lhs(), a0.lhs()) && subtype(a0.rhs(), b0.rhs());
    case K::Bang:
      break;
  }
  return false;
}

std::optional<Type> lookup(const Context& ctx, const std::string& x) {
  for (auto& [n, t] : ctx)
    if (n == x) return t;
  return std::nullopt;
}

Context restrict_ctx(const Context& ctx, const std::set<std::string>& fv) {
  Context out;
  for (auto& e : ctx)
    if (fv.count(e.first)) out.push_back(e);
  return out;
}

namespace {

bool is_banged(const Type& t) { return t.is(Type::Kind::Bang); }

Context without(const Context& ctx, const std::string& x) {
  Context out;
  for (auto& e : ctx)
    if (e.first != x) out.push_back(e);
  return out;
}

// Premise context: every !-variable, plus the linear variables in `used`.
Context share(const Context& ctx, const std::set<std::string>& used) {
  Context out;
  for (auto& e : ctx)
    if (is_banged(e.second) || used.count(e.first)) out.push_back(e);
  return out;
}

std::set<std::string> linear_in(const Context& ctx, const std::set<std::string>& fv) {
  std::set<std::string> out;
  for (auto& [x, t] : ctx)
    if (!is_banged(t) && fv.count(x)) out.insert(x);
  return out;
}

std::set<std::string> minus(std::set<std::string> s, std::initializer_list<std::string> xs) {
  for (auto& x : xs) s.erase(x);
  return s;
}

// Linear variables of ctx used by none of the premises.
std::set<std::string> unused_linear(const Context& ctx, const std::set<std::string>& fv) {
  std::set<std::string> out;
  for (auto& [x, t] : ctx)
    if (!is_banged(t) && !fv.count(x)) out.insert(x);
  return out;
}

void check_disjoint(const Context& ctx, const std::set<std::string>& a,
                    const std::set<std::string>& b, const Term& at) {
  for (auto& x : linear_in(ctx, a))
    if (b.count(x))
      throw TypeError(at.loc(), "non-duplicable variable '" + x + "' used more than once");
}

std::string show(const Type& t) { return print_type(t); }

// Renames binder x of the given bodies when it shadows a context variable.
std::string fresh_binder(const Context& ctx, const std::string& x, std::vector<Term*> bodies,
                         const std::string& avoid = "") {
  if (!lookup(ctx, x)) return x;
  std::set<std::string> used;
  for (auto* b : bodies) {
    auto n = all_names(*b);
    used.insert(n.begin(), n.end());
  }
  for (auto& e : ctx) used.insert(e.first);
  used.insert(x);
  if (!avoid.empty()) used.insert(avoid);
  std::string nx = fresh_name(x, used);
  for (auto* b : bodies) *b = rename_free_var(*b, x, nx);
  return nx;
}

Context extend(const Context& ctx, const std::string& x, const Type& t) {
  Context out = without(ctx, x);
  out.emplace_back(x, t);
  return out;
}

Derivation infer(const Context& ctx, const Term& m) {
  using K = Term::Kind;
  using TK = Type::Kind;
  switch (m.kind()) {
    case K::Var: {
      auto t = lookup(ctx, m.name());
      if (!t) throw TypeError(m.loc(), "unbound variable '" + m.name() + "'");
      if (!subtype(*t, m.type_a()))
        throw TypeError(m.loc(), "variable '" + m.name() + "' has type " + show(*t) +
                                     ", not a subtype of its annotation " + show(m.type_a()));
      return {Rule::Ax1, ctx, m, m.type_a(), {}, std::make_pair(*t, m.type_a())};
    }
    case K::Const: {
      Type ac = Type::bang(axiom_const_type(m.const_kind(), m.gate().get()));
      if (!subtype(ac, m.type_a()))
        throw TypeError(m.loc(), "constant annotation " + show(m.type_a()) +
                                     " is not a supertype of " + show(ac));
      return {Rule::Ax2, ctx, m, m.type_a(), {}, std::make_pair(ac, m.type_a())};
    }
    case K::Star:
      return {Rule::TopI, ctx, m, Type::bang(Type::top(), m.index()), {}, std::nullopt};
    case K::Lam: {
      Term body = m.child(0);
      std::string x = fresh_binder(ctx, m.name(), {&body});
      Derivation d = infer(extend(ctx, x, m.type_a()), body);
      Term t = Term::lam(m.index(), x, m.type_a(), d.term, m.loc());
      Type ty = Type::bang(Type::lollipop(m.type_a(), d.type), m.index());
      if (m.index() == 0) return {Rule::LamI1, ctx, t, ty, {std::move(d)}, std::nullopt};
      for (auto& y : minus(free_vars(body), {x})) {
        auto yt = lookup(ctx, y);
        if (yt && !is_banged(*yt))
          throw TypeError(m.loc(), "duplicable function captures non-duplicable variable '" + y +
                                       "'");
      }
      return {Rule::LamI2, ctx, t, ty, {std::move(d)}, std::nullopt};
    }
    case K::App: {
      auto fa = free_vars(m.child(0)), fb = free_vars(m.child(1));
      check_disjoint(ctx, fa, fb, m);
      auto left = linear_in(ctx, fa);
      for (auto& x : unused_linear(ctx, free_vars(m))) left.insert(x);
      Derivation df = infer(share(ctx, left), m.child(0));
      Derivation da = infer(share(ctx, linear_in(ctx, fb)), m.child(1));
      if (!df.type.is(TK::Lollipop))
        throw TypeError(m.child(0).loc(), "applying a term of type " + show(df.type) +
                                              ", which is not a function type");
      if (df.type.lhs() != da.type)
        throw TypeError(m.child(1).loc(), "argument has type " + show(da.type) + ", expected " +
                                              show(df.type.lhs()));
      Type ty = df.type.rhs();
      Term t = Term::app(df.term, da.term, m.loc());
      return {Rule::LamE, ctx, t, ty, {std::move(df), std::move(da)}, std::nullopt};
    }
    case K::Pair: {
      auto fa = free_vars(m.child(0)), fb = free_vars(m.child(1));
      check_disjoint(ctx, fa, fb, m);
      auto left = linear_in(ctx, fa);
      for (auto& x : unused_linear(ctx, free_vars(m))) left.insert(x);
      Derivation d1 = infer(share(ctx, left), m.child(0));
      Derivation d2 = infer(share(ctx, linear_in(ctx, fb)), m.child(1));
      int n = m.index();
      if (d1.type.bangs() < n || d2.type.bangs() < n)
        throw TypeError(m.loc(), "components of a ^" + std::to_string(n) + " pair need " +
                                     std::to_string(n) + " leading bangs");
      Type a = d1.type, b = d2.type;
      for (int i = 0; i < n; ++i) a = a.lhs(), b = b.lhs();
      Term t = Term::pair(n, d1.term, d2.term, m.loc());
      return {Rule::TensorI, ctx, t, Type::bang(Type::tensor(a, b), n),
              {std::move(d1), std::move(d2)}, std::nullopt};
    }
    case K::LetPair: {
      Term body = m.child(1);
      std::string x = fresh_binder(ctx, m.name(), {&body}, m.name2());
      std::string y = fresh_binder(ctx, m.name2(), {&body}, x);
      auto fn = free_vars(m.child(0));
      auto fbody = minus(free_vars(body), {x, y});
      check_disjoint(ctx, fn, fbody, m);
      int n = m.index();
      auto g1 = linear_in(ctx, fbody);
      for (auto& z : unused_linear(ctx, free_vars(m))) g1.insert(z);
      Derivation dn = infer(share(ctx, linear_in(ctx, fn)), m.child(0));
      Type want = Type::bang(Type::tensor(m.type_a(), m.type_b()), n);
      if (dn.type != want)
        throw TypeError(m.child(0).loc(),
                        "let-pair scrutinee has type " + show(dn.type) + ", expected " + show(want));
      Context inner = extend(extend(share(ctx, g1), x, Type::bang(m.type_a(), n)), y,
                             Type::bang(m.type_b(), n));
      Derivation db = infer(inner, body);
      Type ty = db.type;
      Term t = Term::let_pair(n, x, m.type_a(), y, m.type_b(), dn.term, db.term, m.loc());
      // Premise order follows the rule: body first, then the bound pair.
      return {Rule::TensorE, ctx, t, ty, {std::move(db), std::move(dn)}, std::nullopt};
    }
    case K::Inl:
    case K::Inr: {
      bool left = m.is(K::Inl);
      Derivation d = infer(ctx, m.child(0));
      int n = m.index();
      Type want = Type::bang(left ? m.type_a() : m.type_b(), n);
      if (d.type != want)
        throw TypeError(m.child(0).loc(), std::string(left ? "inl" : "inr") +
                                              " payload has type " + show(d.type) + ", expected " +
                                              show(want));
      Term t = left ? Term::inl(n, m.type_a(), m.type_b(), d.term, m.loc())
                    : Term::inr(n, m.type_a(), m.type_b(), d.term, m.loc());
      return {left ? Rule::SumI1 : Rule::SumI2, ctx, t,
              Type::bang(Type::sum(m.type_a(), m.type_b()), n), {std::move(d)}, std::nullopt};
    }
    case K::Match: {
      Term lb = m.child(1), rb = m.child(2);
      std::string x = fresh_binder(ctx, m.name(), {&lb});
      std::string y = fresh_binder(ctx, m.name2(), {&rb});
      auto fs = free_vars(m.child(0));
      auto fl = minus(free_vars(lb), {x});
      auto fr = minus(free_vars(rb), {y});
      std::set<std::string> branches = fl;
      branches.insert(fr.begin(), fr.end());
      check_disjoint(ctx, fs, branches, m);
      int n = m.index();
      auto g1 = linear_in(ctx, branches);
      for (auto& z : unused_linear(ctx, free_vars(m))) g1.insert(z);
      Derivation ds = infer(share(ctx, linear_in(ctx, fs)), m.child(0));
      Type want = Type::bang(Type::sum(m.type_a(), m.type_b()), n);
      if (ds.type != want)
        throw TypeError(m.child(0).loc(),
                        "match scrutinee has type " + show(ds.type) + ", expected " + show(want));
      Context base = share(ctx, g1);
      Derivation dl = infer(extend(base, x, Type::bang(m.type_a(), n)), lb);
      Derivation dr = infer(extend(base, y, Type::bang(m.type_b(), n)), rb);
      if (dl.type != dr.type)
        throw TypeError(m.loc(), "match branches have different types " + show(dl.type) +
                                     " and " + show(dr.type));
      Type ty = dl.type;
      Term t = Term::match(n, ds.term, x, m.type_a(), dl.term, y, m.type_b(), dr.term, m.loc());
      return {Rule::SumE, ctx, t, ty, {std::move(dl), std::move(dr), std::move(ds)}, std::nullopt};
    }
  }
  throw std::logic_error("bad term");
}

}  // namespace

Derivation typecheck(const Context& ctx, const Term& m) {
  for (std::size_t i = 0; i < ctx.size(); ++i)
    for (std::size_t j = i + 1; j < ctx.size(); ++j)
      if (ctx[i].first == ctx[j].first)
        throw TypeError({}, "context lists '" + ctx[i].first + "' twice");
  return infer(ctx, m);
}

Derivation check_closure(const std::vector<std::string>& reg, const Term& m) {
  Context ctx;
  for (auto& x : reg) ctx.emplace_back(x, Type::qbit());
  for (auto& x : free_vars(m))
    if (!lookup(ctx, x)) throw TypeError(m.loc(), "free variable '" + x + "' is not a qubit");
  return typecheck(ctx, m);
}

}  // namespace qlc
