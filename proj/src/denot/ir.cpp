#include "qlc/denot/ir.hpp"

#include <sstream>

namespace qlc::denot {

namespace {

using K = SemObject::Kind;

Obj make(K k, vna::Object c, std::vector<Obj> parts) {
  auto o = std::make_shared<SemObject>();
  o->kind = k;
  o->conc = std::move(c);
  o->parts = std::move(parts);
  return o;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw DenotError(msg);
}

bool is_unit(const Obj& a) { return a->kind == K::Concrete && a->conc == vna::scalars(); }

}  // namespace

Obj concrete(vna::Object o) { return make(K::Concrete, std::move(o), {}); }

Obj scalars() {
  static const Obj c = concrete(vna::scalars());
  return c;
}

Obj hom(Obj a, Obj b) { return make(K::Hom, {}, {std::move(a), std::move(b)}); }

Obj lform(Obj x) {
  if (x->kind == K::Concrete) return concrete(vna::L_obj(x->conc));
  if (x->kind == K::LFormal) return x;
  return make(K::LFormal, {}, {std::move(x)});
}

Obj tensor(const std::vector<Obj>& factors) {
  std::vector<Obj> flat;
  for (auto& f : factors)
    for (auto& p : tensor_parts(f)) {
      if (p->kind == K::Concrete && p->conc.blocks.empty()) return concrete({});
      if (p->kind == K::Concrete && !flat.empty() && flat.back()->kind == K::Concrete)
        flat.back() = concrete(vna::tensor(flat.back()->conc, p->conc));
      else
        flat.push_back(p);
    }
  if (flat.empty()) return scalars();
  if (flat.size() == 1) return flat[0];
  return make(K::TensorF, {}, std::move(flat));
}

Obj tensor(Obj a, Obj b) { return tensor(std::vector<Obj>{std::move(a), std::move(b)}); }

Obj sum(Obj a, Obj b) {
  if (a->kind == K::Concrete && b->kind == K::Concrete)
    return concrete(vna::direct_sum(a->conc, b->conc));
  return make(K::SumF, {}, {std::move(a), std::move(b)});
}

bool same(const Obj& a, const Obj& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->parts.size() != b->parts.size()) return false;
  if (a->kind == K::Concrete) return a->conc == b->conc;
  for (std::size_t i = 0; i < a->parts.size(); ++i)
    if (!same(a->parts[i], b->parts[i])) return false;
  return true;
}

bool is_concrete(const Obj& a) { return a->kind == K::Concrete; }

bool is_lform(const Obj& a) {
  return a->kind == K::LFormal || (a->kind == K::Concrete && a->conc.is_lform());
}

std::string to_string(const Obj& a) {
  switch (a->kind) {
    case K::Concrete: return vna::to_string(a->conc);
    case K::Hom: return "(" + to_string(a->parts[0]) + " -o " + to_string(a->parts[1]) + ")";
    case K::LFormal: return "L" + to_string(a->parts[0]);
    case K::SumF: return "(" + to_string(a->parts[0]) + " + " + to_string(a->parts[1]) + ")";
    case K::TensorF: {
      std::string s = "(";
      for (std::size_t i = 0; i < a->parts.size(); ++i) s += (i ? " * " : "") + to_string(a->parts[i]);
      return s + ")";
    }
  }
  return "?";
}

std::vector<Obj> tensor_parts(const Obj& a) {
  if (a->kind == K::TensorF) return a->parts;
  if (is_unit(a)) return {};
  return {a};
}

Obj shape_object(const Shape& s) {
  std::vector<Obj> fs;
  for (auto& [name, o] : s) fs.push_back(o);
  return tensor(fs);
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Id: return "Id";
    case Op::Conc: return "Conc";
    case Op::Comp: return "Comp";
    case Op::Tens: return "Tens";
    case Op::Oplus: return "Oplus";
    case Op::Tuple: return "Tuple";
    case Op::Proj: return "Proj";
    case Op::Lam: return "Lam";
    case Op::Eps: return "Eps";
    case Op::Lmap: return "Lmap";
    case Op::Eta: return "Eta";
    case Op::EtaInv: return "EtaInv";
    case Op::Mu: return "Mu";
    case Op::DL: return "DL";
    case Op::DLInv: return "DLInv";
    case Op::EL: return "EL";
    case Op::ELInv: return "ELInv";
    case Op::Nabla: return "Nabla";
    case Op::Theta: return "Theta";
    case Op::ThetaInv: return "ThetaInv";
    case Op::Gamma: return "Gamma";
    case Op::Iota: return "Iota";
    case Op::Merge: return "Merge";
    case Op::Bang: return "Bang";
  }
  return "?";
}

namespace {

Mor node(Op op, Obj dom, Obj cod, std::vector<Mor> kids = {}, std::vector<Obj> objs = {}) {
  auto n = std::make_shared<MorNode>();
  n->op = op;
  n->dom = std::move(dom);
  n->cod = std::move(cod);
  n->kids = std::move(kids);
  n->objs = std::move(objs);
  bool conc = is_concrete(n->dom) && is_concrete(n->cod);
  for (auto& k : n->kids) conc = conc && k->all_concrete;
  for (auto& o : n->objs) conc = conc && is_concrete(o);
  n->all_concrete = conc;
  return n;
}

}  // namespace

Mor id(Obj x) { return node(Op::Id, x, x); }

Mor conc(vna::Morphism f) {
  auto n = std::make_shared<MorNode>();
  n->op = Op::Conc;
  n->dom = concrete(f.dom);
  n->cod = concrete(f.cod);
  n->conc = std::make_shared<const vna::Morphism>(std::move(f));
  n->all_concrete = true;
  return n;
}

Mor comp(Mor g, Mor f) {
  require(same(g->dom, f->cod), "composite does not fit: " + to_string(f->cod) + " vs " +
                                    to_string(g->dom));
  Obj d = f->dom, c = g->cod;
  return node(Op::Comp, d, c, {std::move(g), std::move(f)});
}

Mor comp(const std::vector<Mor>& chain) {
  require(!chain.empty(), "empty composite");
  Mor e = chain.back();
  for (std::size_t i = chain.size() - 1; i-- > 0;) e = comp(chain[i], e);
  return e;
}

Mor tens(Mor a, Mor b) {
  Obj d = tensor(a->dom, b->dom), c = tensor(a->cod, b->cod);
  return node(Op::Tens, d, c, {std::move(a), std::move(b)});
}

Mor oplus(Mor a, Mor b) {
  Obj d = sum(a->dom, b->dom), c = sum(a->cod, b->cod);
  return node(Op::Oplus, d, c, {std::move(a), std::move(b)});
}

Mor tuple(Mor f, Mor g) {
  require(same(f->dom, g->dom), "tuple components have different domains");
  Obj d = f->dom, c = sum(f->cod, g->cod);
  return node(Op::Tuple, d, c, {std::move(f), std::move(g)});
}

Mor proj(int i, Obj a, Obj b) {
  require(i == 1 || i == 2, "projection index must be 1 or 2");
  auto n = std::const_pointer_cast<MorNode>(node(Op::Proj, sum(a, b), i == 1 ? a : b, {}, {a, b}));
  n->index = i;
  return n;
}

Mor lam(Mor f, Obj c, Obj a) {
  require(same(f->cod, tensor(c, a)), "curried map has codomain " + to_string(f->cod) +
                                          ", expected " + to_string(tensor(c, a)));
  Obj d = hom(a, f->dom);
  return node(Op::Lam, d, c, {std::move(f)}, {c, a});
}

Mor eps(Obj a, Obj b) { return node(Op::Eps, b, tensor(hom(a, b), a), {}, {a, b}); }

Mor lmap(Mor h) {
  Obj d = lform(h->dom), c = lform(h->cod);
  return node(Op::Lmap, d, c, {std::move(h)});
}

Mor eta(Obj x) { return node(Op::Eta, x, lform(x), {}, {x}); }

Mor eta_inv(Obj x) {
  require(is_lform(x), "eta inverse needs an object of L-form, got " + to_string(x));
  return node(Op::EtaInv, lform(x), x, {}, {x});
}

Mor mu(Obj x) { return node(Op::Mu, lform(lform(x)), lform(x), {}, {x}); }

namespace {

std::vector<Obj> lforms(const std::vector<Obj>& xs) {
  std::vector<Obj> out;
  for (auto& x : xs) out.push_back(lform(x));
  return out;
}

}  // namespace

Mor dl(const std::vector<Obj>& xs) { return node(Op::DL, tensor(lforms(xs)), lform(tensor(xs)), {}, xs); }

Mor dl_inv(const std::vector<Obj>& xs) {
  return node(Op::DLInv, lform(tensor(xs)), tensor(lforms(xs)), {}, xs);
}

Mor el(Obj a, Obj b) { return node(Op::EL, sum(lform(a), lform(b)), lform(sum(a, b)), {}, {a, b}); }

Mor el_inv(Obj a, Obj b) {
  return node(Op::ELInv, lform(sum(a, b)), sum(lform(a), lform(b)), {}, {a, b});
}

Mor nabla(Obj x) { return node(Op::Nabla, tensor(lform(x), lform(x)), lform(x), {}, {x}); }

Mor theta(Obj a, Obj b, Obj c) {
  return node(Op::Theta, sum(tensor(a, b), tensor(a, c)), tensor(a, sum(b, c)), {}, {a, b, c});
}

Mor theta_inv(Obj a, Obj b, Obj c) {
  return node(Op::ThetaInv, tensor(a, sum(b, c)), sum(tensor(a, b), tensor(a, c)), {}, {a, b, c});
}

Mor gamma(Obj a, Obj b) { return node(Op::Gamma, tensor(a, b), tensor(b, a), {}, {a, b}); }

namespace {

bool shape_concrete(const Shape& s) {
  for (auto& [n, o] : s)
    if (!is_concrete(o)) return false;
  return true;
}

const Obj* find(const Shape& s, const std::string& name) {
  for (auto& [n, o] : s)
    if (n == name) return &o;
  return nullptr;
}

Mor shaped(Op op, std::vector<Shape> shapes, Obj dom, Obj cod) {
  auto n = std::const_pointer_cast<MorNode>(node(op, std::move(dom), std::move(cod)));
  for (auto& s : shapes) n->all_concrete = n->all_concrete && shape_concrete(s);
  n->shapes = std::move(shapes);
  return n;
}

}  // namespace

Mor iota(Shape from, Shape to) {
  for (auto& [name, o] : from) {
    const Obj* t = find(to, name);
    require(t && same(*t, o), "iota: factor " + name + " missing from the target");
  }
  Obj d = shape_object(from), c = shape_object(to);
  return shaped(Op::Iota, {std::move(from), std::move(to)}, d, c);
}

Mor merge(Shape left, Shape right, Shape target) {
  for (const Shape* s : {&left, &right})
    for (auto& [name, o] : *s) {
      const Obj* t = find(target, name);
      require(t && same(*t, o), "merge: factor " + name + " missing from the target");
    }
  for (auto& [name, o] : left)
    if (find(right, name))
      require(is_lform(o), "merge: shared factor " + name + " is not of L-form");
  Obj d = tensor(shape_object(left), shape_object(right)), c = shape_object(target);
  return shaped(Op::Merge, {std::move(left), std::move(right), std::move(target)}, d, c);
}

Mor bang(Obj a) { return node(Op::Bang, scalars(), a, {}, {a}); }

std::string print(const Mor& e) {
  std::ostringstream os;
  os << op_name(e->op);
  switch (e->op) {
    case Op::Conc: os << "[" << vna::to_string(e->conc->dom) << "->" << vna::to_string(e->conc->cod) << "]"; break;
    case Op::Proj: os << e->index; break;
    case Op::Iota:
    case Op::Merge:
      os << "{";
      for (std::size_t i = 0; i < e->shapes.size(); ++i) {
        os << (i ? ";" : "");
        for (std::size_t j = 0; j < e->shapes[i].size(); ++j) os << (j ? "," : "") << e->shapes[i][j].first;
      }
      os << "}";
      break;
    default: break;
  }
  if (e->kids.empty() && e->op != Op::Conc && e->op != Op::Iota && e->op != Op::Merge) {
    os << "<";
    if (e->objs.empty()) os << to_string(e->dom);
    for (std::size_t i = 0; i < e->objs.size(); ++i) os << (i ? "," : "") << to_string(e->objs[i]);
    os << ">";
  }
  if (!e->kids.empty()) {
    os << "(";
    for (std::size_t i = 0; i < e->kids.size(); ++i) os << (i ? ", " : "") << print(e->kids[i]);
    os << ")";
  }
  return os.str();
}

std::size_t size(const Mor& e) {
  std::size_t n = 1;
  for (auto& k : e->kids) n += size(k);
  return n;
}

}  // namespace qlc::denot
