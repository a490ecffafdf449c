#include "qlc/syntax/type.hpp"

#include <stdexcept>

namespace qlc {

namespace {
const Type& qbit_singleton() {
  static const Type t = Type::qbit();
  return t;
}
}  // namespace

Type Type::qbit() { return Type(std::make_shared<Node>(Node{Kind::Qbit, nullptr, nullptr})); }
Type Type::top() { return Type(std::make_shared<Node>(Node{Kind::Top, nullptr, nullptr})); }

Type Type::bang(const Type& a) {
  return Type(std::make_shared<Node>(Node{Kind::Bang, std::make_shared<Type>(a), nullptr}));
}

Type Type::bang(const Type& a, int n) {
  Type t = a;
  for (int i = 0; i < n; ++i) t = bang(t);
  return t;
}

Type Type::lollipop(const Type& a, const Type& b) {
  return Type(std::make_shared<Node>(
      Node{Kind::Lollipop, std::make_shared<Type>(a), std::make_shared<Type>(b)}));
}

Type Type::tensor(const Type& a, const Type& b) {
  return Type(std::make_shared<Node>(
      Node{Kind::Tensor, std::make_shared<Type>(a), std::make_shared<Type>(b)}));
}

Type Type::sum(const Type& a, const Type& b) {
  return Type(
      std::make_shared<Node>(Node{Kind::Sum, std::make_shared<Type>(a), std::make_shared<Type>(b)}));
}

Type Type::bit() { return sum(top(), top()); }

Type Type::qbits(int k) {
  if (k < 1) throw std::invalid_argument("qbits: k must be positive");
  Type t = qbit_singleton();
  for (int i = 1; i < k; ++i) t = tensor(t, qbit_singleton());
  return t;
}

const Type& Type::lhs() const {
  if (!node_->a) throw std::logic_error("type has no operand");
  return *node_->a;
}

const Type& Type::rhs() const {
  if (!node_->b) throw std::logic_error("type has no right operand");
  return *node_->b;
}

int Type::bangs() const {
  int n = 0;
  const Type* t = this;
  while (t->is(Kind::Bang)) {
    ++n;
    t = &t->lhs();
  }
  return n;
}

Type Type::strip() const {
  const Type* t = this;
  while (t->is(Kind::Bang)) t = &t->lhs();
  return *t;
}

bool Type::operator==(const Type& o) const {
  if (node_ == o.node_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::Qbit:
    case Kind::Top:
      return true;
    case Kind::Bang:
      return lhs() == o.lhs();
    default:
      return lhs() == o.lhs() && rhs() == o.rhs();
  }
}

std::size_t Type::hash() const {
  std::size_t h = static_cast<std::size_t>(kind()) * 0x9e3779b97f4a7c15ULL;
  if (node_->a) h ^= node_->a->hash() + 0x9e3779b9 + (h << 6) + (h >> 2);
  if (node_->b) h ^= node_->b->hash() + 0x7f4a7c15 + (h << 6) + (h >> 2);
  return h;
}

bool is_bit(const Type& t) {
  return t.is(Type::Kind::Sum) && t.lhs().is(Type::Kind::Top) && t.rhs().is(Type::Kind::Top);
}

}  // namespace qlc
