#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "qlc/syntax/type.hpp"

namespace qlc {

struct SourceLoc {
  int line = 0;
  int col = 0;
};

// A named unitary on k qubits (2^k x 2^k).
struct Gate {
  std::string name;
  int arity = 1;
  Eigen::MatrixXcd matrix;
};
using GatePtr = std::shared_ptr<const Gate>;

// Built-in gate table: H, X, Y, Z, S, T, CNOT, SWAP, CZ, TOFFOLI.
GatePtr builtin_gate(const std::string& name);
std::vector<std::string> builtin_gate_names();

enum class ConstKind { New, Meas, Unitary };

class Term {
 public:
  enum class Kind { Var, Const, Lam, App, Star, LetPair, Pair, Inl, Inr, Match };

  static Term var(std::string x, Type a, SourceLoc loc = {});
  static Term constant(ConstKind c, Type a, GatePtr gate = nullptr, SourceLoc loc = {});
  static Term lam(int n, std::string x, Type a, Term body, SourceLoc loc = {});
  static Term app(Term f, Term arg, SourceLoc loc = {});
  static Term star(int n, SourceLoc loc = {});
  // let <x:A, y:B>^n = bound in body
  static Term let_pair(int n, std::string x, Type a, std::string y, Type b, Term bound, Term body,
                       SourceLoc loc = {});
  static Term pair(int n, Term m, Term k, SourceLoc loc = {});
  static Term inl(int n, Type a, Type b, Term m, SourceLoc loc = {});
  static Term inr(int n, Type a, Type b, Term m, SourceLoc loc = {});
  // match^n scrut with (x:A -> left | y:B -> right)
  static Term match(int n, Term scrut, std::string x, Type a, Term left, std::string y, Type b,
                    Term right, SourceLoc loc = {});

  static Term ff(int n = 0);
  static Term tt(int n = 0);

  Kind kind() const { return node_->kind; }
  bool is(Kind k) const { return node_->kind == k; }
  int index() const { return node_->n; }
  // Var name, or first binder (Lam, LetPair, Match).
  const std::string& name() const { return node_->x; }
  // Second binder (LetPair, Match).
  const std::string& name2() const { return node_->y; }
  // Var/Const annotation, binder type, or left injection type.
  const Type& type_a() const { return node_->a; }
  // Second binder type or right injection type.
  const Type& type_b() const { return node_->b; }
  ConstKind const_kind() const { return node_->c; }
  const GatePtr& gate() const { return node_->gate; }
  const SourceLoc& loc() const { return node_->loc; }

  // Children by position:
  //   Lam: body; App: f, arg; LetPair: bound, body; Pair: m, k;
  //   Inl/Inr: m; Match: scrut, left, right.
  const Term& child(std::size_t i) const { return node_->kids.at(i); }
  std::size_t arity() const { return node_->kids.size(); }

  bool same_node(const Term& o) const { return node_ == o.node_; }

 private:
  struct Node {
    Kind kind = Kind::Star;
    int n = 0;
    std::string x, y;
    Type a = Type::top(), b = Type::top();
    ConstKind c = ConstKind::New;
    GatePtr gate;
    std::vector<Term> kids;
    SourceLoc loc;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Term make(Node n);
  std::shared_ptr<const Node> node_;
};

// Default annotation of a constant when none is written.
Type default_const_type(ConstKind c, const Gate* gate);
// The typing-rule type A_c (before the implicit outer bang).
Type axiom_const_type(ConstKind c, const Gate* gate);

std::set<std::string> free_vars(const Term& m);
// Every identifier occurring in m, bound or free.
std::set<std::string> all_names(const Term& m);
bool is_value(const Term& m);

// Type determined by annotations alone (no context needed). Throws on
// structurally ill-formed terms.
Type annotated_type(const Term& m);

// Rewrites annotations so that value/term m of type S <: target gets type
// exactly target. Used when substituting a value at an annotated occurrence.
Term coerce(const Term& m, const Type& target);

// Capture-avoiding simultaneous substitution; each occurrence x^{A'} is
// replaced by coerce(sub[x], A').
Term substitute(const Term& m, const std::map<std::string, Term>& sub);
Term substitute(const Term& m, const std::string& x, const Term& v);

// Renames free occurrences of x to nx (nx must be fresh for m), keeping
// each occurrence's annotation.
Term rename_free_var(const Term& m, const std::string& x, const std::string& nx);

// Renames bound variable occurrences so no binder uses a name in avoid.
Term freshen_binders(const Term& m, const std::set<std::string>& avoid);

bool alpha_eq(const Term& a, const Term& b);

// Builds the left-nested tuple <x1,...,xk>^0 and flattens it back.
Term tuple_of_vars(const std::vector<std::string>& xs);
// Nonempty list of variable names when m is a left-nested 0-tuple of variables.
std::vector<std::string> vars_of_tuple(const Term& m);

std::string fresh_name(const std::string& base, const std::set<std::string>& used);

}  // namespace qlc
