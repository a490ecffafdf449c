#include "qlc/syntax/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>

namespace qlc {

namespace {

enum class Tok { Ident, Number, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  SourceLoc loc;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  static const std::pair<const char*, const char*> unicode[] = {
      {"\xCE\xBB", "lambda"}, {"\xE2\x8A\xB8", "-o"}, {"\xE2\x8A\x97", "*"},
      {"\xE2\x8A\x95", "+"},  {"\xE2\x8A\xA4", "top"}, {"\xE2\x9F\xA8", "<"},
      {"\xE2\x9F\xA9", ">"},  {"\xE2\x86\x92", "->"}};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    SourceLoc loc{line, col};
    bool matched = false;
    for (auto& [u, rep] : unicode) {
      std::size_t n = std::char_traits<char>::length(u);
      if (src.compare(i, n, u) == 0) {
        bool ident = std::isalpha(static_cast<unsigned char>(rep[0]));
        out.push_back({ident ? Tok::Ident : Tok::Sym, rep, loc});
        adv(n);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), loc});
      adv(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      char* end = nullptr;
      std::strtod(src.c_str() + i, &end);
      std::size_t n = static_cast<std::size_t>(end - (src.c_str() + i));
      out.push_back({Tok::Number, src.substr(i, n), loc});
      adv(n);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && (src[i + 1] == 'o' || src[i + 1] == '>')) {
      bool arrow = src[i + 1] == '>';
      bool ident_follows = !arrow && i + 2 < src.size() &&
                           (std::isalnum(static_cast<unsigned char>(src[i + 2])) || src[i + 2] == '_');
      if (!ident_follows) {
        out.push_back({Tok::Sym, arrow ? "->" : "-o", loc});
        adv(2);
        continue;
      }
    }
    if (std::string("()<>[]{},.:^|=*+-!/;").find(c) != std::string::npos) {
      out.push_back({Tok::Sym, std::string(1, c), loc});
      adv(1);
      continue;
    }
    throw ParseError(loc, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {"lambda", "let", "in",  "match", "with", "if",
                                          "then",   "else", "inl", "inr",   "ff",   "tt",
                                          "new",    "meas", "gate", "qbit", "top",  "bit"};
  return k;
}

class Parser {
 public:
  Parser(const std::string& text, std::map<std::string, GatePtr> gates,
         std::map<std::string, Type> ctx)
      : toks_(lex(text)), gates_(std::move(gates)), free_ctx_(std::move(ctx)) {
    for (auto& t : toks_)
      if (t.kind == Tok::Ident) used_names_.insert(t.text);
  }

  Program program() {
    Program p{{}, Term::star(0)};
    while (peek_ident("gate")) p.gates.push_back(gate_decl());
    p.term = term();
    expect_end();
    return p;
  }

  Term whole_term() {
    Term t = term();
    expect_end();
    return t;
  }

  Type whole_type() {
    Type t = type();
    expect_end();
    return t;
  }

 private:
  // ---- token helpers ----
  const Token& cur() const { return toks_[pos_]; }
  bool peek_sym(const char* s) const { return cur().kind == Tok::Sym && cur().text == s; }
  bool peek_ident(const char* s) const { return cur().kind == Tok::Ident && cur().text == s; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  [[noreturn]] void fail(const std::string& msg) const {
    std::string near = cur().kind == Tok::End ? "end of input" : "'" + cur().text + "'";
    throw ParseError(cur().loc, msg + " near " + near);
  }
  void expect_sym(const char* s) {
    if (!peek_sym(s)) fail(std::string("expected '") + s + "'");
    next();
  }
  void expect_kw(const char* s) {
    if (!peek_ident(s)) fail(std::string("expected '") + s + "'");
    next();
  }
  void expect_end() {
    if (cur().kind != Tok::End) fail("unexpected trailing input");
  }
  std::string ident() {
    if (cur().kind != Tok::Ident || keywords().count(cur().text)) fail("expected identifier");
    return next().text;
  }
  int opt_index() {
    if (!peek_sym("^") || toks_[pos_ + 1].kind != Tok::Number) return 0;
    next();
    return bare_index();
  }
  int bare_index() {
    Token n = next();
    if (n.text.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError(n.loc, "index must be a natural number");
    return std::stoi(n.text);
  }
  std::optional<Type> opt_annotation() {
    if (!peek_sym("^") || !(toks_[pos_ + 1].kind == Tok::Sym && toks_[pos_ + 1].text == "{"))
      return std::nullopt;
    next();
    next();
    Type t = type();
    expect_sym("}");
    return t;
  }

  // ---- types ----
  Type type() {
    Type a = sum_type();
    if (peek_sym("-o")) {
      next();
      return Type::lollipop(a, type());
    }
    return a;
  }
  Type sum_type() {
    Type a = tensor_type();
    while (peek_sym("+")) {
      next();
      a = Type::sum(a, tensor_type());
    }
    return a;
  }
  Type tensor_type() {
    Type a = prefix_type();
    while (peek_sym("*")) {
      next();
      a = Type::tensor(a, prefix_type());
    }
    return a;
  }
  Type prefix_type() {
    if (peek_sym("!")) {
      next();
      return Type::bang(prefix_type());
    }
    if (peek_ident("qbit")) return next(), Type::qbit();
    if (peek_ident("top")) return next(), Type::top();
    if (peek_ident("bit")) return next(), Type::bit();
    if (peek_sym("(")) {
      next();
      Type t = type();
      expect_sym(")");
      return t;
    }
    fail("expected a type");
  }

  // ---- gate declarations ----
  std::complex<double> cexpr() {
    std::complex<double> v = cterm();
    while (peek_sym("+") || peek_sym("-")) {
      bool plus = next().text == "+";
      auto r = cterm();
      v = plus ? v + r : v - r;
    }
    return v;
  }
  std::complex<double> cterm() {
    std::complex<double> v = cunary();
    while (peek_sym("*") || peek_sym("/")) {
      bool mul = next().text == "*";
      auto r = cunary();
      v = mul ? v * r : v / r;
    }
    return v;
  }
  std::complex<double> cunary() {
    if (peek_sym("-")) return next(), -cunary();
    if (peek_sym("+")) return next(), cunary();
    return cprimary();
  }
  std::complex<double> cprimary() {
    if (cur().kind == Tok::Number) {
      double v = std::strtod(next().text.c_str(), nullptr);
      if (peek_ident("i")) return next(), std::complex<double>(0, v);
      return v;
    }
    if (peek_ident("i")) return next(), std::complex<double>(0, 1);
    if (peek_ident("pi")) return next(), M_PI;
    if (peek_ident("sqrt") || peek_ident("exp")) {
      bool sq = next().text == "sqrt";
      expect_sym("(");
      auto v = cexpr();
      expect_sym(")");
      return sq ? std::sqrt(v) : std::exp(v);
    }
    if (peek_sym("(")) {
      next();
      auto v = cexpr();
      expect_sym(")");
      return v;
    }
    fail("expected a complex number");
  }

  GatePtr gate_decl() {
    expect_kw("gate");
    SourceLoc loc = cur().loc;
    std::string name = ident();
    if (builtin_gate(name) || gates_.count(name))
      throw ParseError(loc, "gate '" + name + "' is already defined");
    expect_sym("=");
    std::vector<std::vector<std::complex<double>>> rows;
    expect_sym("[");
    do {
      expect_sym("[");
      std::vector<std::complex<double>> row;
      do row.push_back(cexpr());
      while (peek_sym(",") && (next(), true));
      expect_sym("]");
      rows.push_back(std::move(row));
    } while (peek_sym(",") && (next(), true));
    expect_sym("]");
    if (peek_sym(";")) next();
    std::size_t d = rows.size();
    int k = 0;
    while ((std::size_t{1} << k) < d) ++k;
    if (d < 2 || (std::size_t{1} << k) != d)
      throw ParseError(loc, "gate '" + name + "' dimension is not a power of two");
    Eigen::MatrixXcd m(d, d);
    for (std::size_t r = 0; r < d; ++r) {
      if (rows[r].size() != d) throw ParseError(loc, "gate '" + name + "' is not square");
      for (std::size_t c = 0; c < d; ++c) m(r, c) = rows[r][c];
    }
    double err = (m.adjoint() * m - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
    if (err > 1e-9) throw ParseError(loc, "gate '" + name + "' is not unitary");
    auto g = std::make_shared<Gate>(Gate{name, k, m});
    gates_[name] = g;
    return g;
  }

  // ---- terms ----
  std::string fresh() {
    for (;;) {
      std::string n = "_b" + std::to_string(fresh_counter_++);
      if (!used_names_.count(n)) {
        used_names_.insert(n);
        return n;
      }
    }
  }

  struct Scoped {
    Parser& p;
    std::string x;
    std::optional<Type> saved;
    Scoped(Parser& p, std::string name, Type t) : p(p), x(std::move(name)) {
      auto it = p.scope_.find(x);
      if (it != p.scope_.end()) saved = it->second;
      p.scope_.insert_or_assign(x, std::move(t));
    }
    ~Scoped() {
      if (saved) p.scope_.insert_or_assign(x, *saved);
      else p.scope_.erase(x);
    }
  };

  Term term() {
    SourceLoc loc = cur().loc;
    if (peek_ident("lambda")) {
      next();
      int n = cur().kind == Tok::Number ? bare_index() : opt_index();
      std::string x = ident();
      expect_sym(":");
      Type a = type();
      expect_sym(".");
      Scoped s(*this, x, a);
      return Term::lam(n, x, a, term(), loc);
    }
    if (peek_ident("let")) {
      next();
      if (peek_sym("<")) {
        next();
        std::string x = ident();
        expect_sym(":");
        Type a = type();
        expect_sym(",");
        std::string y = ident();
        expect_sym(":");
        Type b = type();
        expect_sym(">");
        int n = opt_index();
        if (x == y) throw ParseError(loc, "let binds '" + x + "' twice");
        expect_sym("=");
        Term bound = term();
        expect_kw("in");
        Scoped sx(*this, x, Type::bang(a, n));
        Scoped sy(*this, y, Type::bang(b, n));
        return Term::let_pair(n, x, a, y, b, bound, term(), loc);
      }
      std::string x = ident();
      expect_sym(":");
      Type a = type();
      expect_sym("=");
      Term bound = term();
      expect_kw("in");
      Scoped s(*this, x, a);
      Term body = term();
      return Term::app(Term::lam(0, x, a, body, loc), bound, loc);
    }
    if (peek_ident("match")) {
      next();
      int n = opt_index();
      Term scrut = term();
      expect_kw("with");
      expect_sym("(");
      std::string x = ident();
      expect_sym(":");
      Type a = type();
      expect_sym("->");
      std::optional<Term> left;
      {
        Scoped s(*this, x, Type::bang(a, n));
        left = term();
      }
      expect_sym("|");
      std::string y = ident();
      expect_sym(":");
      Type b = type();
      expect_sym("->");
      std::optional<Term> right;
      {
        Scoped s(*this, y, Type::bang(b, n));
        right = term();
      }
      expect_sym(")");
      return Term::match(n, scrut, x, a, *left, y, b, *right, loc);
    }
    if (peek_ident("if")) {
      next();
      Term c = term();
      expect_kw("then");
      Term t = term();
      expect_kw("else");
      Term e = term();
      // ff is inl, so the then-branch (tt) is the right alternative.
      return Term::match(0, c, fresh(), Type::top(), e, fresh(), Type::top(), t, loc);
    }
    Term f = atom();
    while (starts_atom()) {
      SourceLoc l = cur().loc;
      f = Term::app(f, atom(), l);
    }
    return f;
  }

  bool starts_atom() const {
    if (cur().kind == Tok::Sym) return peek_sym("(") || peek_sym("<") || peek_sym("*");
    if (cur().kind != Tok::Ident) return false;
    const std::string& s = cur().text;
    if (!keywords().count(s)) return true;
    return s == "ff" || s == "tt" || s == "new" || s == "meas" || s == "inl" || s == "inr";
  }

  Term atom() {
    SourceLoc loc = cur().loc;
    if (peek_sym("(")) {
      next();
      Term t = term();
      expect_sym(")");
      return t;
    }
    if (peek_sym("*")) {
      next();
      return Term::star(opt_index(), loc);
    }
    if (peek_sym("<")) {
      next();
      Term t = term();
      std::vector<Term> rest;
      expect_sym(",");
      do rest.push_back(term());
      while (peek_sym(",") && (next(), true));
      expect_sym(">");
      int n = opt_index();
      for (auto& r : rest) t = Term::pair(n, t, r, loc);
      return t;
    }
    if (peek_ident("ff") || peek_ident("tt")) {
      bool f = next().text == "ff";
      int n = opt_index();
      Term s = Term::star(n, loc);
      return f ? Term::inl(n, Type::top(), Type::top(), s, loc)
               : Term::inr(n, Type::top(), Type::top(), s, loc);
    }
    if (peek_ident("inl") || peek_ident("inr")) {
      bool left = next().text == "inl";
      int n = opt_index();
      expect_sym("[");
      Type a = type();
      expect_sym(",");
      Type b = type();
      expect_sym("]");
      Term m = atom();
      return left ? Term::inl(n, a, b, m, loc) : Term::inr(n, a, b, m, loc);
    }
    if (peek_ident("new") || peek_ident("meas")) {
      ConstKind c = next().text == "new" ? ConstKind::New : ConstKind::Meas;
      auto ann = opt_annotation();
      return Term::constant(c, ann ? *ann : default_const_type(c, nullptr), nullptr, loc);
    }
    std::string x = ident();
    auto ann = opt_annotation();
    if (auto it = scope_.find(x); it != scope_.end()) return Term::var(x, ann ? *ann : it->second, loc);
    if (GatePtr g = lookup_gate(x)) {
      return Term::constant(ConstKind::Unitary,
                            ann ? *ann : default_const_type(ConstKind::Unitary, g.get()), g, loc);
    }
    if (ann) return Term::var(x, *ann, loc);
    if (auto it = free_ctx_.find(x); it != free_ctx_.end()) return Term::var(x, it->second, loc);
    throw ParseError(loc, "unbound variable '" + x + "' needs a type annotation");
  }

  GatePtr lookup_gate(const std::string& x) const {
    if (auto it = gates_.find(x); it != gates_.end()) return it->second;
    return builtin_gate(x);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, GatePtr> gates_;
  std::map<std::string, Type> free_ctx_;
  std::map<std::string, Type> scope_;
  std::set<std::string> used_names_;
  int fresh_counter_ = 0;
};

std::map<std::string, GatePtr> gate_map(const std::vector<GatePtr>& gates) {
  std::map<std::string, GatePtr> m;
  for (auto& g : gates) m[g->name] = g;
  return m;
}

}  // namespace

Program parse_program(const std::string& text) { return Parser(text, {}, {}).program(); }

Term parse_term(const std::string& text, const std::vector<GatePtr>& gates,
                const std::map<std::string, Type>& ctx) {
  return Parser(text, gate_map(gates), ctx).whole_term();
}

Type parse_type(const std::string& text) { return Parser(text, {}, {}).whole_type(); }

}  // namespace qlc
