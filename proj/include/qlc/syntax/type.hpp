#pragma once

#include <memory>
#include <string>

namespace qlc {

// Immutable, structurally shared type tree.
class Type {
 public:
  enum class Kind { Qbit, Top, Bang, Lollipop, Tensor, Sum };

  static Type qbit();
  static Type top();
  static Type bang(const Type& a);
  static Type bang(const Type& a, int n);  // !^n a
  static Type lollipop(const Type& a, const Type& b);
  static Type tensor(const Type& a, const Type& b);
  static Type sum(const Type& a, const Type& b);
  static Type bit();  // top + top
  // qbit^{⊗k}, left nested; k >= 1.
  static Type qbits(int k);

  Kind kind() const { return node_->kind; }
  bool is(Kind k) const { return node_->kind == k; }
  // Child of Bang, left operand of binary constructors.
  const Type& lhs() const;
  const Type& rhs() const;

  // Number of leading bangs and the remaining type.
  int bangs() const;
  Type strip() const;

  bool operator==(const Type& o) const;
  bool operator!=(const Type& o) const { return !(*this == o); }

  std::size_t hash() const;

 private:
  struct Node {
    Kind kind;
    std::shared_ptr<const Type> a, b;
  };
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

bool is_bit(const Type& t);

}  // namespace qlc
