#include "qlc/denot/normalize.hpp"

#include <optional>

#include "qlc/denot/eval.hpp"

namespace qlc::denot {

namespace {

void flatten(const Mor& e, std::vector<Mor>& out) {
  if (e->op == Op::Comp) {
    flatten(e->kids[0], out);
    flatten(e->kids[1], out);
  } else {
    out.push_back(e);
  }
}

bool same_objs(const Mor& a, const Mor& b) {
  if (a->objs.size() != b->objs.size()) return false;
  for (std::size_t i = 0; i < a->objs.size(); ++i)
    if (!same(a->objs[i], b->objs[i])) return false;
  return true;
}

bool inverse_pair(Op outer, Op inner) {
  switch (outer) {
    case Op::EtaInv: return inner == Op::Eta;
    case Op::Eta: return inner == Op::EtaInv;
    case Op::DLInv: return inner == Op::DL;
    case Op::DL: return inner == Op::DLInv;
    case Op::ELInv: return inner == Op::EL;
    case Op::EL: return inner == Op::ELInv;
    case Op::ThetaInv: return inner == Op::Theta;
    case Op::Theta: return inner == Op::ThetaInv;
    case Op::Mu: return inner == Op::Eta;
    default: return false;
  }
}

class Normalizer {
 public:
  Normalizer(std::size_t budget, NormalizeStats* st) : budget_(budget), st_(st) {}

  Mor run(Mor e) {
    while (true) {
      Mor n = pass(e);
      if (n == e || exhausted_) {
        if (st_) st_->budget_exhausted = exhausted_;
        return n;
      }
      e = n;
    }
  }

 private:
  void count() {
    if (st_) ++st_->rewrites;
  }

  Mor pass(const Mor& e) {
    if (++visited_ > budget_) {
      exhausted_ = true;
      return e;
    }
    if (e->all_concrete && e->op != Op::Conc && e->op != Op::Id) {
      long d = static_cast<long>(e->dom->conc.dim()) * e->cod->conc.dim();
      if (d <= kFoldLimit) {
        count();
        return folded(ev_.concrete_matrix(e));
      }
    }
    std::vector<Mor> kids;
    bool changed = false;
    for (auto& k : e->kids) {
      kids.push_back(pass(k));
      changed = changed || kids.back() != k;
    }
    Mor x = changed ? rebuild(e, kids) : e;
    if (exhausted_) return x;
    Mor y = local(x);
    if (y != x) count();
    return y;
  }

  static Mor folded(const vna::Morphism& m) {
    if (m.dom == m.cod && vna::approx_equal(m, vna::identity(m.dom), 1e-12)) return id(concrete(m.dom));
    return conc(m);
  }

  static Mor rebuild(const Mor& e, const std::vector<Mor>& k) {
    switch (e->op) {
      case Op::Comp: return comp(k[0], k[1]);
      case Op::Tens: return tens(k[0], k[1]);
      case Op::Oplus: return oplus(k[0], k[1]);
      case Op::Tuple: return tuple(k[0], k[1]);
      case Op::Lam: return lam(k[0], e->objs[0], e->objs[1]);
      case Op::Lmap: return lmap(k[0]);
      default: return e;
    }
  }

  Mor local(const Mor& e) {
    switch (e->op) {
      case Op::Comp: return chain(e);
      case Op::Lmap:
        if (e->kids[0]->op == Op::Id) return id(e->cod);
        return e;
      case Op::Tens: return tensor_rules(e);
      case Op::Iota:
      case Op::Merge: {
        // rewiring that keeps every factor in place
        std::vector<std::string> from, to;
        for (std::size_t i = 0; i + 1 < e->shapes.size(); ++i)
          for (auto& [n, o] : e->shapes[i]) from.push_back(n);
        for (auto& [n, o] : e->shapes.back()) to.push_back(n);
        return from == to ? id(e->dom) : e;
      }
      default: return e;
    }
  }

  Mor tensor_rules(const Mor& e) {
    const Mor &a = e->kids[0], &b = e->kids[1];
    bool ida = a->op == Op::Id, idb = b->op == Op::Id;
    if (ida && idb) return id(e->dom);
    // unit factors
    if (ida && same(a->dom, scalars())) return b;
    if (idb && same(b->dom, scalars())) return a;
    // interchange: split composites, then one-sided tensors
    if (a->op == Op::Comp || b->op == Op::Comp) {
      std::vector<Mor> ca, cb;
      flatten(a, ca);
      flatten(b, cb);
      // (a_1∘...∘a_k) ⊗ (b_1∘...∘b_l) = (id⊗b_1)∘...∘(id⊗b_l)∘(a_1⊗id)∘...∘(a_k⊗id)
      std::vector<Mor> out;
      for (auto& x : cb) out.push_back(tens(id(a->cod), x));
      for (auto& x : ca) out.push_back(tens(x, id(b->dom)));
      return comp(out);
    }
    if (!ida && !idb && !e->all_concrete) return comp(tens(id(a->cod), b), tens(a, id(b->dom)));
    // distributivity
    if (ida && b->op == Op::Tuple) {
      const Mor &h1 = b->kids[0], &h2 = b->kids[1];
      return comp(theta(a->dom, h1->cod, h2->cod), tuple(tens(a, h1), tens(a, h2)));
    }
    if (idb && a->op == Op::Tuple) {
      const Mor &h1 = a->kids[0], &h2 = a->kids[1];
      Obj d = b->dom, x = h1->cod, y = h2->cod;
      Mor right = comp({gamma(d, sum(x, y)), theta(d, x, y), oplus(gamma(x, d), gamma(y, d))});
      return comp(right, tuple(tens(h1, b), tens(h2, b)));
    }
    return e;
  }

  // g ∘ f rewritten to a shorter or more canonical chain, or nothing.
  std::optional<std::vector<Mor>> pair_rule(const Mor& g, const Mor& f) {
    // adjunction
    if (f->op == Op::Eps) {
      const Obj &a = f->objs[0];
      if (g->op == Op::Tens && g->kids[0]->op == Op::Lam && g->kids[1]->op == Op::Id &&
          same(g->kids[0]->objs[1], a) && same(g->kids[1]->dom, a))
        return std::vector<Mor>{g->kids[0]->kids[0]};
      if (g->op == Op::Lam && same(g->objs[1], scalars()) && same(a, scalars()))
        return std::vector<Mor>{g->kids[0]};
    }
    // naturality of η and its inverse
    if (g->op == Op::Lmap && f->op == Op::Eta) return std::vector<Mor>{eta(g->kids[0]->cod), g->kids[0]};
    if (g->op == Op::EtaInv && f->op == Op::Lmap && is_lform(f->kids[0]->dom))
      return std::vector<Mor>{f->kids[0], eta_inv(f->kids[0]->dom)};
    // functoriality
    if (g->op == Op::Lmap && f->op == Op::Lmap) return std::vector<Mor>{lmap(comp(g->kids[0], f->kids[0]))};
    // inverse pairs and monad laws
    if (inverse_pair(g->op, f->op) && (same_objs(g, f) || g->op == Op::Mu)) return std::vector<Mor>{};
    if (g->op == Op::Mu && f->op == Op::Lmap && f->kids[0]->op == Op::Eta) return std::vector<Mor>{};
    if (g->op == Op::Gamma && f->op == Op::Gamma && same(g->objs[0], f->objs[1]) &&
        same(g->objs[1], f->objs[0]))
      return std::vector<Mor>{};
    // products
    if (g->op == Op::Proj && f->op == Op::Tuple) return std::vector<Mor>{f->kids[g->index - 1]};
    if (g->op == Op::Tuple) return std::vector<Mor>{tuple(comp(g->kids[0], f), comp(g->kids[1], f))};
    // (x ⊗ id) ∘ (y ⊗ id) = (x∘y) ⊗ id, used only when x∘y itself rewrites
    if (g->op == Op::Tens && f->op == Op::Tens) {
      for (int side : {0, 1}) {
        const Mor &gi = g->kids[side], &fi = f->kids[side];
        if (gi->op != Op::Id || fi->op != Op::Id || !same(gi->dom, fi->dom)) continue;
        const Mor &x = g->kids[1 - side], &y = f->kids[1 - side];
        if (!same(x->dom, y->cod)) continue;
        auto r = pair_rule(x, y);
        if (!r) continue;
        Mor inner = r->empty() ? id(y->dom) : comp(*r);
        return std::vector<Mor>{side == 1 ? tens(inner, gi) : tens(gi, inner)};
      }
    }
    // adjacent concrete pieces
    if (g->all_concrete && f->all_concrete &&
        static_cast<long>(f->dom->conc.dim()) * g->cod->conc.dim() <= kFoldLimit)
      return std::vector<Mor>{folded(vna::compose(ev_.concrete_matrix(g), ev_.concrete_matrix(f)))};
    return std::nullopt;
  }

  Mor chain(const Mor& e) {
    std::vector<Mor> c;
    flatten(e, c);
    std::vector<Mor> out;
    bool changed = false;
    for (auto& x : c) {
      if (x->op == Op::Id)
        changed = true;
      else
        out.push_back(x);
    }
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
      auto r = pair_rule(out[i], out[i + 1]);
      if (!r) continue;
      std::vector<Mor> next(out.begin(), out.begin() + i);
      next.insert(next.end(), r->begin(), r->end());
      next.insert(next.end(), out.begin() + i + 2, out.end());
      out = std::move(next);
      changed = true;
      break;
    }
    if (!changed) return e;
    if (out.empty()) return id(e->dom);
    return comp(out);
  }

  static constexpr long kFoldLimit = 1 << 16;

  std::size_t budget_;
  NormalizeStats* st_;
  std::size_t visited_ = 0;
  bool exhausted_ = false;
  Evaluator ev_;
};

}  // namespace

Mor normalize(const Mor& e, std::size_t budget, NormalizeStats* stats) {
  return Normalizer(budget, stats).run(e);
}

}  // namespace qlc::denot
