#include "qlc/syntax/printer.hpp"

#include <cstdio>
#include <optional>
#include <sstream>

namespace qlc {

namespace {

std::string type_at(const Type& t, int level) {
  using K = Type::Kind;
  switch (t.kind()) {
    case K::Qbit:
      return "qbit";
    case K::Top:
      return "top";
    case K::Bang:
      return "!" + type_at(t.lhs(), 3);
    case K::Tensor: {
      std::string s = type_at(t.lhs(), 2) + " * " + type_at(t.rhs(), 3);
      return level > 2 ? "(" + s + ")" : s;
    }
    case K::Sum: {
      if (is_bit(t)) return "bit";
      std::string s = type_at(t.lhs(), 1) + " + " + type_at(t.rhs(), 2);
      return level > 1 ? "(" + s + ")" : s;
    }
    case K::Lollipop: {
      std::string s = type_at(t.lhs(), 1) + " -o " + type_at(t.rhs(), 0);
      return level > 0 ? "(" + s + ")" : s;
    }
  }
  return "?";
}

std::string real_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string complex_str(std::complex<double> z) {
  if (z.imag() == 0) return real_str(z.real());
  if (z.real() == 0) return real_str(z.imag()) + "i";
  std::string im = real_str(std::abs(z.imag()));
  return "(" + real_str(z.real()) + (z.imag() < 0 ? " - " : " + ") + im + "i)";
}

class Printer {
 public:
  Printer(PrintOptions o, const std::map<std::string, Type>& ctx) : opt_(o), scope_(ctx) {}

  // level 0: any term; 1: function position; 2: argument position.
  std::string term(const Term& m, int level) {
    using K = Term::Kind;
    switch (m.kind()) {
      case K::Var: {
        auto it = scope_.find(m.name());
        if (opt_.concise && it != scope_.end() && it->second == m.type_a()) return m.name();
        return m.name() + "^{" + print_type(m.type_a()) + "}";
      }
      case K::Const: {
        std::string n = m.const_kind() == ConstKind::New    ? "new"
                        : m.const_kind() == ConstKind::Meas ? "meas"
                                                            : m.gate()->name;
        if (opt_.concise && m.type_a() == default_const_type(m.const_kind(), m.gate().get()))
          return n;
        return n + "^{" + print_type(m.type_a()) + "}";
      }
      case K::Star:
        return "*" + idx(m.index());
      case K::Lam: {
        std::string s = "lambda" + idx(m.index()) + " " + m.name() + ":" + print_type(m.type_a()) +
                        ". " + bind(m.name(), m.type_a(), m.child(0));
        return level > 0 ? "(" + s + ")" : s;
      }
      case K::App: {
        const Term& f = m.child(0);
        if (opt_.concise && f.is(K::Lam) && f.index() == 0) {
          std::string s = "let " + f.name() + ":" + print_type(f.type_a()) + " = " +
                          term(m.child(1), 0) + " in " + bind(f.name(), f.type_a(), f.child(0));
          return level > 0 ? "(" + s + ")" : s;
        }
        std::string s = term(f, 1) + " " + term(m.child(1), 2);
        return level > 1 ? "(" + s + ")" : s;
      }
      case K::Pair:
        return "<" + term(m.child(0), 0) + ", " + term(m.child(1), 0) + ">" + idx(m.index());
      case K::Inl:
      case K::Inr: {
        bool left = m.is(K::Inl);
        if (opt_.concise && is_bit(Type::sum(m.type_a(), m.type_b())) &&
            m.child(0).is(K::Star) && m.child(0).index() == m.index())
          return (left ? "ff" : "tt") + idx(m.index());
        std::string s = std::string(left ? "inl" : "inr") + idx(m.index()) + "[" +
                        print_type(m.type_a()) + ", " + print_type(m.type_b()) + "] " +
                        term(m.child(0), 2);
        return level > 1 ? "(" + s + ")" : s;
      }
      case K::LetPair: {
        std::string s = "let <" + m.name() + ":" + print_type(m.type_a()) + ", " + m.name2() + ":" +
                        print_type(m.type_b()) + ">" + idx(m.index()) + " = " +
                        term(m.child(0), 0) + " in ";
        Type ta = Type::bang(m.type_a(), m.index()), tb = Type::bang(m.type_b(), m.index());
        auto sa = save(m.name()), sb = save(m.name2());
        scope_.insert_or_assign(m.name(), ta);
        scope_.insert_or_assign(m.name2(), tb);
        s += term(m.child(1), 0);
        restore(m.name(), sa);
        restore(m.name2(), sb);
        return level > 0 ? "(" + s + ")" : s;
      }
      case K::Match: {
        std::string s;
        bool sugar = opt_.concise && m.index() == 0 && m.type_a().is(Type::Kind::Top) &&
                     m.type_b().is(Type::Kind::Top) && !free_vars(m.child(1)).count(m.name()) &&
                     !free_vars(m.child(2)).count(m.name2());
        if (sugar) {
          // then is the tt (inr) alternative
          s = "if " + term(m.child(0), 0) + " then " + term(m.child(2), 0) + " else " +
              term(m.child(1), 0);
        } else {
          int n = m.index();
          s = "match" + idx(n) + " " + term(m.child(0), 0) + " with (" + m.name() + ":" +
              print_type(m.type_a()) + " -> " +
              bind(m.name(), Type::bang(m.type_a(), n), m.child(1)) + " | " + m.name2() + ":" +
              print_type(m.type_b()) + " -> " +
              bind(m.name2(), Type::bang(m.type_b(), n), m.child(2)) + ")";
        }
        return level > 0 ? "(" + s + ")" : s;
      }
    }
    return "?";
  }

 private:
  std::string idx(int n) const {
    if (opt_.concise && n == 0) return "";
    return "^" + std::to_string(n);
  }

  std::optional<Type> save(const std::string& x) const {
    auto it = scope_.find(x);
    if (it == scope_.end()) return std::nullopt;
    return it->second;
  }
  void restore(const std::string& x, const std::optional<Type>& t) {
    if (t) scope_.insert_or_assign(x, *t);
    else scope_.erase(x);
  }

  std::string bind(const std::string& x, const Type& t, const Term& body) {
    auto saved = save(x);
    scope_.insert_or_assign(x, t);
    std::string s = term(body, 0);
    restore(x, saved);
    return s;
  }

  PrintOptions opt_;
  std::map<std::string, Type> scope_;
};

}  // namespace

std::string print_type(const Type& t) { return type_at(t, 0); }

std::string print_term(const Term& m, PrintOptions opts, const std::map<std::string, Type>& ctx) {
  return Printer(opts, ctx).term(m, 0);
}

std::string print_gate_decl(const Gate& g) {
  std::ostringstream os;
  os << "gate " << g.name << " = [";
  for (int r = 0; r < g.matrix.rows(); ++r) {
    os << (r ? ", [" : "[");
    for (int c = 0; c < g.matrix.cols(); ++c) os << (c ? ", " : "") << complex_str(g.matrix(r, c));
    os << "]";
  }
  os << "]";
  return os.str();
}

}  // namespace qlc
