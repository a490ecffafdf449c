#include "qlc/denot/eval.hpp"

#include <cmath>

namespace qlc::denot {

namespace {

using K = SemObject::Kind;

constexpr double kPointTol = 1e-7;

void require(bool ok, const std::string& msg) {
  if (!ok) throw DenotError(msg);
}

std::shared_ptr<State> blank(const Obj& o) {
  auto s = std::make_shared<State>();
  s->obj = o;
  return s;
}

// In-place accumulation of Σ c·x.
class Acc {
 public:
  explicit Acc(const Obj& o) : s_(blank(o)) {
    if (o->kind == K::Concrete) s_->vec = vna::Vec::Zero(o->conc.dim());
    if (o->kind == K::SumF) {
      s_->left = zero_state(o->parts[0]);
      s_->right = zero_state(o->parts[1]);
    }
  }

  void add(cd c, const St& x) {
    if (c == cd(0)) return;
    switch (s_->obj->kind) {
      case K::Concrete: s_->vec += c * x->vec; break;
      case K::Hom:
        for (auto& [k, cl] : x->closures) s_->closures.emplace_back(c * k, cl);
        break;
      case K::LFormal:
        for (auto& [w, p] : x->points) s_->points.emplace_back(c * w, p);
        break;
      case K::TensorF:
        for (auto& [k, ps] : x->terms) s_->terms.emplace_back(c * k, ps);
        break;
      case K::SumF:
        s_->left = denot::add(s_->left, scale(c, x->left));
        s_->right = denot::add(s_->right, scale(c, x->right));
        break;
    }
  }

  St done() { return s_; }

 private:
  std::shared_ptr<State> s_;
};

vna::Vec unit_vec(int dim, int i) {
  vna::Vec v = vna::Vec::Zero(dim);
  v(i) = 1;
  return v;
}

// Σ_k c_k (v_k1 ⊗ ... ⊗ v_kn) over the given concrete objects.
std::vector<std::pair<cd, std::vector<vna::Vec>>> split_concrete(const std::vector<vna::Object>& os,
                                                                std::size_t from,
                                                                const vna::Vec& v) {
  if (from + 1 == os.size()) return {{cd(1), {v}}};
  vna::Object rest = vna::tensor(std::vector<vna::Object>(os.begin() + from + 1, os.end()));
  auto idx = vna::tensor_index(os[from], rest);
  const int da = os[from].dim(), dr = rest.dim();
  std::vector<std::pair<cd, std::vector<vna::Vec>>> out;
  for (int i = 0; i < da; ++i) {
    vna::Vec r(dr);
    for (int j = 0; j < dr; ++j) r(j) = v(idx[i * dr + j]);
    if (r.isZero(0)) continue;
    for (auto& [c, vs] : split_concrete(os, from + 1, r)) {
      std::vector<vna::Vec> row{unit_vec(da, i)};
      row.insert(row.end(), vs.begin(), vs.end());
      out.emplace_back(c, std::move(row));
    }
  }
  return out;
}

// Terms of s over the flattened parts of its object.
std::vector<std::pair<cd, std::vector<St>>> part_terms(const St& s) {
  const Obj& o = s->obj;
  if (o->kind == K::TensorF) return s->terms;
  if (o->kind == K::Concrete && o->conc == vna::scalars()) return {{s->vec(0), {}}};
  return {{cd(1), {s}}};
}

St factor_from_atoms(const Obj& f, std::vector<St> atoms) {
  if (tensor_parts(f).empty()) return vec_state(f, vna::Vec::Ones(1));
  if (f->kind != K::TensorF) return atoms.at(0);
  auto s = blank(f);
  s->terms.emplace_back(cd(1), std::move(atoms));
  return s;
}

template <class T, class Fn>
void cartesian(const std::vector<std::vector<T>>& opts, Fn fn) {
  for (auto& o : opts)
    if (o.empty()) return;
  std::vector<std::size_t> at(opts.size(), 0);
  while (true) {
    fn(at);
    std::size_t i = opts.size();
    while (i > 0) {
      --i;
      if (++at[i] < opts[i].size()) break;
      at[i] = 0;
      if (i == 0) return;
    }
    if (opts.empty()) return;
  }
}

std::vector<Obj> lforms(const std::vector<Obj>& xs) {
  std::vector<Obj> out;
  for (auto& x : xs) out.push_back(lform(x));
  return out;
}

St marginal(const std::vector<Obj>& fs, const St& s, std::size_t i) {
  Acc acc(fs[i]);
  for (auto& [c, ps] : split_state(fs, s)) {
    cd k = c;
    for (std::size_t j = 0; j < ps.size(); ++j)
      if (j != i) k *= mass(ps[j]);
    acc.add(k, ps[i]);
  }
  return acc.done();
}

std::vector<Obj> shape_objs(const Shape& s) {
  std::vector<Obj> out;
  for (auto& [n, o] : s) out.push_back(o);
  return out;
}

vna::Shape concrete_shape(const Shape& s) {
  vna::Shape out;
  for (auto& [n, o] : s) out.emplace_back(n, o->conc);
  return out;
}

}  // namespace

St zero_state(const Obj& o) { return Acc(o).done(); }

St vec_state(const Obj& o, vna::Vec v) {
  require(o->kind == K::Concrete && v.size() == o->conc.dim(), "state vector does not fit its object");
  auto s = blank(o);
  s->vec = std::move(v);
  return s;
}

St add(const St& a, const St& b) {
  Acc acc(a->obj);
  acc.add(1, a);
  acc.add(1, b);
  return acc.done();
}

St scale(cd c, const St& s) {
  Acc acc(s->obj);
  acc.add(c, s);
  return acc.done();
}

cd mass(const St& s) {
  const Obj& o = s->obj;
  cd m = 0;
  switch (o->kind) {
    case K::Concrete:
      for (std::size_t b = 0; b < o->conc.blocks.size(); ++b)
        for (int r = 0; r < o->conc.blocks[b]; ++r) m += s->vec(o->conc.index(b, r, r));
      return m;
    case K::Hom:
      for (auto& [c, cl] : s->closures) m += c * mass(cl.gamma);
      return m;
    case K::LFormal:
      for (auto& [w, p] : s->points) m += w * mass(p);
      return m;
    case K::TensorF:
      for (auto& [c, ps] : s->terms) {
        cd t = c;
        for (auto& p : ps) t *= mass(p);
        m += t;
      }
      return m;
    case K::SumF: return mass(s->left) + mass(s->right);
  }
  return m;
}

St tensor_state(const std::vector<Obj>& fs, const std::vector<St>& ss) {
  require(fs.size() == ss.size(), "tensor_state: arity mismatch");
  Obj total = tensor(fs);
  if (total->kind == K::Concrete && total->conc.blocks.empty()) return zero_state(total);
  std::vector<std::vector<std::pair<cd, std::vector<St>>>> opts;
  std::vector<Obj> atom_objs;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    require(same(ss[i]->obj, fs[i]), "tensor_state: state on " + to_string(ss[i]->obj) +
                                         " given for factor " + to_string(fs[i]));
    opts.push_back(part_terms(ss[i]));
    for (auto& p : tensor_parts(fs[i])) atom_objs.push_back(p);
  }
  const auto total_parts = tensor_parts(total);
  Acc acc(total);
  cartesian(opts, [&](const std::vector<std::size_t>& at) {
    cd c = 1;
    std::vector<St> atoms;
    for (std::size_t i = 0; i < opts.size(); ++i) {
      c *= opts[i][at[i]].first;
      for (auto& a : opts[i][at[i]].second) atoms.push_back(a);
    }
    if (c == cd(0)) return;
    std::vector<St> merged;
    std::vector<Obj> merged_objs;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const Obj& o = atom_objs[k];
      if (o->kind == K::Concrete && !merged.empty() && merged_objs.back()->kind == K::Concrete) {
        Obj mo = concrete(vna::tensor(merged_objs.back()->conc, o->conc));
        merged.back() = vec_state(mo, vna::tensor_vec(merged_objs.back()->conc, o->conc,
                                                       merged.back()->vec, atoms[k]->vec));
        merged_objs.back() = mo;
      } else {
        merged.push_back(atoms[k]);
        merged_objs.push_back(o);
      }
    }
    if (total->kind == K::TensorF) {
      auto t = blank(total);
      t->terms.emplace_back(cd(1), std::move(merged));
      acc.add(c, t);
    } else if (merged.empty()) {
      acc.add(c, vec_state(total, vna::Vec::Ones(1)));
    } else {
      acc.add(c, merged[0]);
    }
  });
  return acc.done();
}

std::vector<std::pair<cd, std::vector<St>>> split_state(const std::vector<Obj>& fs, const St& s) {
  Obj total = tensor(fs);
  require(same(total, s->obj), "split_state: state on " + to_string(s->obj) + " split over " +
                                   to_string(total));
  if (total->kind == K::Concrete && total->conc.blocks.empty()) return {};
  // Atoms of the factors, and the groups of consecutive concrete atoms that
  // make up each flattened part of the total.
  std::vector<std::vector<Obj>> fparts;
  std::vector<std::size_t> owner;
  std::vector<Obj> atoms;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    fparts.push_back(tensor_parts(fs[i]));
    for (auto& p : fparts.back()) atoms.push_back(p), owner.push_back(i);
  }
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    bool join = atoms[k]->kind == K::Concrete && !groups.empty() &&
                atoms[groups.back().back()]->kind == K::Concrete;
    if (join)
      groups.back().push_back(k);
    else
      groups.push_back({k});
  }
  require(groups.size() == tensor_parts(total).size(), "split_state: inconsistent flattening");

  std::vector<std::pair<cd, std::vector<St>>> out;
  for (auto& [c, parts] : part_terms(s)) {
    std::vector<std::vector<std::pair<cd, std::vector<St>>>> opts;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (groups[g].size() == 1) {
        opts.push_back({{cd(1), {parts[g]}}});
        continue;
      }
      std::vector<vna::Object> os;
      for (auto k : groups[g]) os.push_back(atoms[k]->conc);
      std::vector<std::pair<cd, std::vector<St>>> o;
      for (auto& [k, vs] : split_concrete(os, 0, parts[g]->vec)) {
        std::vector<St> sts;
        for (std::size_t t = 0; t < vs.size(); ++t)
          sts.push_back(vec_state(atoms[groups[g][t]], vs[t]));
        o.emplace_back(k, std::move(sts));
      }
      opts.push_back(std::move(o));
    }
    cartesian(opts, [&](const std::vector<std::size_t>& at) {
      cd k = c;
      std::vector<St> flat;
      for (std::size_t g = 0; g < opts.size(); ++g) {
        k *= opts[g][at[g]].first;
        for (auto& x : opts[g][at[g]].second) flat.push_back(x);
      }
      if (k == cd(0)) return;
      std::vector<std::vector<St>> per(fs.size());
      for (std::size_t a = 0; a < flat.size(); ++a) per[owner[a]].push_back(flat[a]);
      std::vector<St> states;
      for (std::size_t i = 0; i < fs.size(); ++i) states.push_back(factor_from_atoms(fs[i], per[i]));
      out.emplace_back(k, std::move(states));
    });
  }
  return out;
}

St sum_state(const Obj& a, const Obj& b, const St& sa, const St& sb) {
  Obj o = sum(a, b);
  if (o->kind == K::Concrete) {
    vna::Vec v(sa->vec.size() + sb->vec.size());
    v << sa->vec, sb->vec;
    return vec_state(o, std::move(v));
  }
  auto s = blank(o);
  s->left = sa;
  s->right = sb;
  return s;
}

std::pair<St, St> split_sum(const Obj& a, const Obj& b, const St& s) {
  require(same(s->obj, sum(a, b)), "split_sum: object mismatch");
  if (s->obj->kind == K::Concrete) {
    int da = a->conc.dim();
    return {vec_state(a, s->vec.head(da)), vec_state(b, s->vec.tail(s->vec.size() - da))};
  }
  return {s->left, s->right};
}

std::vector<std::pair<cd, St>> points_of(const Obj& x, const St& s) {
  require(same(s->obj, lform(x)), "points_of: state is not on L" + to_string(x));
  std::vector<std::pair<cd, St>> out;
  if (x->kind == K::Concrete) {
    auto blocks = vna::nsp_blocks(x->conc);
    for (std::size_t k = 0; k < blocks.size(); ++k)
      if (s->vec(k) != cd(0))
        out.emplace_back(s->vec(k), vec_state(x, unit_vec(x->conc.dim(), x->conc.index(blocks[k], 0, 0))));
    return out;
  }
  if (x->kind == K::LFormal) {
    for (auto& [w, z] : s->points) {
      auto p = blank(x);
      p->points.emplace_back(cd(1), z);
      out.emplace_back(w, p);
    }
    return out;
  }
  return s->points;
}

St from_points(const Obj& x, const std::vector<std::pair<cd, St>>& pts) {
  Obj lx = lform(x);
  if (x->kind == K::Concrete) {
    auto blocks = vna::nsp_blocks(x->conc);
    vna::Vec v = vna::Vec::Zero(lx->conc.dim());
    for (auto& [w, p] : pts) {
      int hit = -1;
      for (std::size_t k = 0; k < blocks.size(); ++k)
        if (std::abs(p->vec(x->conc.index(blocks[k], 0, 0))) > 0.5) {
          require(hit < 0, "state is not a point of the spectrum");
          hit = static_cast<int>(k);
        }
      require(hit >= 0, "state is not a point of the spectrum");
      vna::Vec rest = p->vec;
      rest(x->conc.index(blocks[hit], 0, 0)) -= 1.0;
      require(rest.cwiseAbs().maxCoeff() < kPointTol, "state is not a point of the spectrum");
      v(hit) += w;
    }
    return vec_state(lx, std::move(v));
  }
  auto s = blank(lx);
  if (x->kind == K::LFormal) {
    for (auto& [w, p] : pts)
      for (auto& [w2, z] : p->points) s->points.emplace_back(w * w2, z);
  } else {
    s->points = pts;
  }
  return s;
}

St Evaluator::apply(const FormalClosure& cl, const St& arg) {
  return pull(cl.f, tensor_state({cl.c, cl.a}, {cl.gamma, arg}));
}

vna::Vec Evaluator::pull(const Mor& e, const vna::Vec& s) { return pull(e, vec_state(e->cod, s))->vec; }

St Evaluator::pull(const Mor& e, const St& s) {
  require(same(s->obj, e->cod), std::string("pull through ") + op_name(e->op) + ": state on " +
                                    to_string(s->obj) + ", expected " + to_string(e->cod));
  if (e->op == Op::Conc ||
      (e->all_concrete && static_cast<long>(e->dom->conc.dim()) * e->cod->conc.dim() <= limit_))
    return vec_state(e->dom, concrete_matrix(e).m.transpose() * s->vec);
  return pull_structural(e, s);
}

St Evaluator::pull_structural(const Mor& e, const St& s) {
  const auto& o = e->objs;
  switch (e->op) {
    case Op::Id:
    case Op::EtaInv:
    case Op::Mu: return s;
    case Op::Conc: return vec_state(e->dom, e->conc->m.transpose() * s->vec);
    case Op::Comp: return pull(e->kids[1], pull(e->kids[0], s));
    case Op::Tens: {
      const Mor &a = e->kids[0], &b = e->kids[1];
      Acc acc(e->dom);
      for (auto& [c, ps] : split_state({a->cod, b->cod}, s))
        acc.add(c, tensor_state({a->dom, b->dom}, {pull(a, ps[0]), pull(b, ps[1])}));
      return acc.done();
    }
    case Op::Oplus: {
      const Mor &a = e->kids[0], &b = e->kids[1];
      auto [sa, sb] = split_sum(a->cod, b->cod, s);
      return sum_state(a->dom, b->dom, pull(a, sa), pull(b, sb));
    }
    case Op::Tuple: {
      const Mor &f = e->kids[0], &g = e->kids[1];
      auto [sa, sb] = split_sum(f->cod, g->cod, s);
      return add(pull(f, sa), pull(g, sb));
    }
    case Op::Proj:
      return e->index == 1 ? sum_state(o[0], o[1], s, zero_state(o[1]))
                           : sum_state(o[0], o[1], zero_state(o[0]), s);
    case Op::Lam: {
      auto h = blank(e->dom);
      h->closures.emplace_back(cd(1), FormalClosure{s, e->kids[0], o[0], o[1]});
      return h;
    }
    case Op::Eps: {
      Acc acc(e->dom);
      for (auto& [c, ps] : split_state({hom(o[0], o[1]), o[0]}, s))
        for (auto& [k, cl] : ps[0]->closures) acc.add(c * k, apply(cl, ps[1]));
      return acc.done();
    }
    case Op::Lmap: {
      const Mor& h = e->kids[0];
      std::vector<std::pair<cd, St>> pts;
      for (auto& [w, p] : points_of(h->cod, s)) pts.emplace_back(w, pull(h, p));
      return from_points(h->dom, pts);
    }
    case Op::Eta: {
      Acc acc(o[0]);
      for (auto& [w, p] : points_of(o[0], s)) acc.add(w, p);
      return acc.done();
    }
    case Op::DL: {
      Obj t = tensor(o);
      Acc acc(e->dom);
      for (auto& [w, p] : points_of(t, s)) {
        std::vector<St> ls;
        for (std::size_t i = 0; i < o.size(); ++i)
          ls.push_back(from_points(o[i], {{cd(1), marginal(o, p, i)}}));
        acc.add(w, tensor_state(lforms(o), ls));
      }
      return acc.done();
    }
    case Op::DLInv: {
      std::vector<std::pair<cd, St>> pts;
      for (auto& [c, ls] : split_state(lforms(o), s)) {
        std::vector<std::vector<std::pair<cd, St>>> opts;
        for (std::size_t i = 0; i < o.size(); ++i) opts.push_back(points_of(o[i], ls[i]));
        cartesian(opts, [&](const std::vector<std::size_t>& at) {
          cd w = c;
          std::vector<St> ps;
          for (std::size_t i = 0; i < opts.size(); ++i) {
            w *= opts[i][at[i]].first;
            ps.push_back(opts[i][at[i]].second);
          }
          pts.emplace_back(w, tensor_state(o, ps));
        });
      }
      return from_points(tensor(o), pts);
    }
    case Op::EL: {
      std::vector<std::pair<cd, St>> l, r;
      for (auto& [w, p] : points_of(sum(o[0], o[1]), s)) {
        auto [pa, pb] = split_sum(o[0], o[1], p);
        if (std::abs(mass(pa)) > 0.5)
          l.emplace_back(w, pa);
        else
          r.emplace_back(w, pb);
      }
      return sum_state(lform(o[0]), lform(o[1]), from_points(o[0], l), from_points(o[1], r));
    }
    case Op::ELInv: {
      auto [la, lb] = split_sum(lform(o[0]), lform(o[1]), s);
      std::vector<std::pair<cd, St>> pts;
      for (auto& [w, p] : points_of(o[0], la))
        pts.emplace_back(w, sum_state(o[0], o[1], p, zero_state(o[1])));
      for (auto& [w, p] : points_of(o[1], lb))
        pts.emplace_back(w, sum_state(o[0], o[1], zero_state(o[0]), p));
      return from_points(sum(o[0], o[1]), pts);
    }
    case Op::Nabla: {
      Obj lx = lform(o[0]);
      Acc acc(e->dom);
      for (auto& [w, p] : points_of(o[0], s)) {
        St d = from_points(o[0], {{cd(1), p}});
        acc.add(w, tensor_state({lx, lx}, {d, d}));
      }
      return acc.done();
    }
    case Op::Theta: {
      Obj ab = tensor(o[0], o[1]), ac = tensor(o[0], o[2]);
      Acc l(ab), r(ac);
      for (auto& [c, ps] : split_state({o[0], sum(o[1], o[2])}, s)) {
        auto [sb, sc] = split_sum(o[1], o[2], ps[1]);
        l.add(c, tensor_state({o[0], o[1]}, {ps[0], sb}));
        r.add(c, tensor_state({o[0], o[2]}, {ps[0], sc}));
      }
      return sum_state(ab, ac, l.done(), r.done());
    }
    case Op::ThetaInv: {
      Obj bc = sum(o[1], o[2]);
      auto [s1, s2] = split_sum(tensor(o[0], o[1]), tensor(o[0], o[2]), s);
      Acc acc(e->dom);
      for (auto& [c, ps] : split_state({o[0], o[1]}, s1))
        acc.add(c, tensor_state({o[0], bc}, {ps[0], sum_state(o[1], o[2], ps[1], zero_state(o[2]))}));
      for (auto& [c, ps] : split_state({o[0], o[2]}, s2))
        acc.add(c, tensor_state({o[0], bc}, {ps[0], sum_state(o[1], o[2], zero_state(o[1]), ps[1])}));
      return acc.done();
    }
    case Op::Gamma: {
      Acc acc(e->dom);
      for (auto& [c, ps] : split_state({o[1], o[0]}, s))
        acc.add(c, tensor_state({o[0], o[1]}, {ps[1], ps[0]}));
      return acc.done();
    }
    case Op::Iota: {
      const Shape &from = e->shapes[0], &to = e->shapes[1];
      Acc acc(e->dom);
      for (auto& [c, ps] : split_state(shape_objs(to), s)) {
        cd k = c;
        std::vector<St> picked(from.size());
        for (std::size_t j = 0; j < to.size(); ++j) {
          bool used = false;
          for (std::size_t i = 0; i < from.size(); ++i)
            if (from[i].first == to[j].first) picked[i] = ps[j], used = true;
          if (!used) k *= mass(ps[j]);
        }
        acc.add(k, tensor_state(shape_objs(from), picked));
      }
      return acc.done();
    }
    case Op::Merge: {
      const Shape &l = e->shapes[0], &r = e->shapes[1], &t = e->shapes[2];
      std::vector<Obj> objs = shape_objs(l);
      for (auto& x : shape_objs(r)) objs.push_back(x);
      Acc acc(e->dom);
      for (auto& [c, ps] : split_state(shape_objs(t), s)) {
        // Slots in the dom factor list filled by target factor j; a shared
        // factor fills two slots and is expanded into its points.
        std::vector<std::vector<std::size_t>> slots(t.size());
        for (std::size_t i = 0; i < l.size(); ++i)
          for (std::size_t j = 0; j < t.size(); ++j)
            if (t[j].first == l[i].first) slots[j].push_back(i);
        for (std::size_t i = 0; i < r.size(); ++i)
          for (std::size_t j = 0; j < t.size(); ++j)
            if (t[j].first == r[i].first) slots[j].push_back(l.size() + i);
        cd k = c;
        std::vector<std::vector<std::pair<cd, St>>> opts;
        std::vector<std::size_t> shared;
        std::vector<St> states(objs.size());
        for (std::size_t j = 0; j < t.size(); ++j) {
          if (slots[j].empty()) k *= mass(ps[j]);
          if (slots[j].size() == 1) states[slots[j][0]] = ps[j];
          if (slots[j].size() == 2) {
            shared.push_back(j);
            opts.push_back(points_of(t[j].second, ps[j]));
          }
        }
        cartesian(opts, [&](const std::vector<std::size_t>& at) {
          cd w = k;
          for (std::size_t q = 0; q < shared.size(); ++q) {
            auto& [pw, p] = opts[q][at[q]];
            w *= pw;
            for (auto slot : slots[shared[q]]) states[slot] = p;
          }
          acc.add(w, tensor_state(objs, states));
        });
      }
      return acc.done();
    }
    case Op::Bang: return vec_state(scalars(), vna::Vec::Constant(1, mass(s)));
  }
  throw DenotError("pull: unknown node");
}

const vna::Morphism& Evaluator::concrete_matrix(const Mor& e) {
  auto it = memo_.find(e.get());
  if (it != memo_.end()) return it->second.second;
  require(e->all_concrete, std::string("concrete_matrix on non-concrete ") + op_name(e->op));
  const auto& o = e->objs;
  auto c = [](const Obj& x) { return x->conc; };
  auto M = [&](std::size_t i) -> vna::Morphism { return concrete_matrix(e->kids[i]); };
  vna::Morphism m;
  switch (e->op) {
    case Op::Id: m = vna::identity(c(e->dom)); break;
    case Op::Conc: m = *e->conc; break;
    case Op::Comp: m = vna::compose(M(0), M(1)); break;
    case Op::Tens: m = vna::tensor_linear(M(0), M(1)); break;
    case Op::Oplus: m = vna::oplus_mor(M(0), M(1)); break;
    case Op::Tuple: m = vna::tuple(M(0), M(1)); break;
    case Op::Proj: m = e->index == 1 ? vna::proj1(c(o[0]), c(o[1])) : vna::proj2(c(o[0]), c(o[1])); break;
    case Op::Lmap: m = vna::L_mor(M(0)); break;
    case Op::Eta: m = vna::eta(c(o[0])); break;
    case Op::EtaInv: m = vna::eta_inv(c(o[0])); break;
    case Op::Mu: m = vna::mu(c(o[0])); break;
    case Op::DL:
    case Op::DLInv:
    case Op::EL:
    case Op::ELInv:
      m = vna::identity(c(e->dom));
      require(c(e->dom).dim() == c(e->cod).dim(), "distributivity map between different dimensions");
      m.cod = c(e->cod);
      break;
    case Op::Nabla: m = vna::nabla(c(o[0])); break;
    case Op::Theta: m = vna::theta(c(o[0]), c(o[1]), c(o[2])); break;
    case Op::ThetaInv: m = vna::theta_inv(c(o[0]), c(o[1]), c(o[2])); break;
    case Op::Gamma: m = vna::gamma(c(o[0]), c(o[1])); break;
    case Op::Iota: m = vna::iota(concrete_shape(e->shapes[0]), concrete_shape(e->shapes[1])); break;
    case Op::Merge:
      m = vna::merge(concrete_shape(e->shapes[0]), concrete_shape(e->shapes[1]),
                     concrete_shape(e->shapes[2]));
      break;
    case Op::Bang: {
      vna::Mat u(c(o[0]).dim(), 1);
      u.col(0) = vna::vec(c(o[0]), vna::unit(c(o[0])));
      m = vna::linear(vna::scalars(), c(o[0]), u);
      m.flags = {true, true, true, true};
      break;
    }
    case Op::Lam:
    case Op::Eps: throw DenotError("function objects are never concrete");
  }
  require(m.dom == c(e->dom) && m.cod == c(e->cod),
          std::string("concrete evaluation of ") + op_name(e->op) + " changed its objects");
  return memo_.emplace(e.get(), std::make_pair(e, std::move(m))).first->second.second;
}

vna::Morphism Evaluator::to_matrix(const Mor& e) {
  require(is_concrete(e->dom) && is_concrete(e->cod),
          "to_matrix needs concrete objects, got " + to_string(e->dom) + " -> " + to_string(e->cod));
  if (e->all_concrete) return concrete_matrix(e);
  const int n = e->cod->conc.dim();
  vna::Mat m(n, e->dom->conc.dim());
  for (int j = 0; j < n; ++j) m.row(j) = pull(e, unit_vec(n, j)).transpose();
  return vna::linear(e->dom->conc, e->cod->conc, std::move(m));
}

}  // namespace qlc::denot
