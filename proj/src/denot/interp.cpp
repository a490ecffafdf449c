#include "qlc/denot/interp.hpp"

#include "qlc/denot/normalize.hpp"
#include "qlc/syntax/printer.hpp"

namespace qlc::denot {

namespace {

using TK = Type::Kind;

Type unbang(Type t, int n) {
  for (int i = 0; i < n; ++i) t = t.lhs();
  return t;
}

Obj lpow(Obj x, int n) {
  for (int i = 0; i < n; ++i) x = lform(x);
  return x;
}

Mor lmap_pow(Mor h, int n) {
  for (int i = 0; i < n; ++i) h = h->op == Op::Id ? id(lform(h->dom)) : lmap(h);
  return h;
}

// d^{L^n}: LⁿA ⊗ LⁿB → Lⁿ(A⊗B)
Mor dl_pow(int n, const Obj& a, const Obj& b) {
  if (n == 0) return id(tensor(a, b));
  return comp(lmap(dl_pow(n - 1, a, b)), dl({lpow(a, n - 1), lpow(b, n - 1)}));
}

Mor dl_pow_inv(int n, const Obj& a, const Obj& b) {
  if (n == 0) return id(tensor(a, b));
  return comp(dl_inv({lpow(a, n - 1), lpow(b, n - 1)}), lmap(dl_pow_inv(n - 1, a, b)));
}

// e^{L^n}: LⁿA ⊕ LⁿB → Lⁿ(A⊕B)
Mor el_pow(int n, const Obj& a, const Obj& b) {
  if (n == 0) return id(sum(a, b));
  return comp(lmap(el_pow(n - 1, a, b)), el(lpow(a, n - 1), lpow(b, n - 1)));
}

Shape fv_shape(const Context& ctx, const Term& m) { return interp_context(restrict_ctx(ctx, free_vars(m))); }

Shape append(Shape s, const std::string& x, const Obj& o) {
  s.emplace_back(x, o);
  return s;
}

Mor core_subtype(const Type& a, const Type& b) {
  switch (a.kind()) {
    case TK::Qbit:
    case TK::Top: return id(interp_type(a));
    case TK::Tensor: return tens(interp_subtype(a.lhs(), b.lhs()), interp_subtype(a.rhs(), b.rhs()));
    case TK::Sum: return oplus(interp_subtype(a.lhs(), b.lhs()), interp_subtype(a.rhs(), b.rhs()));
    case TK::Lollipop: {
      // [[A₁⊸A₂ <: B₁⊸B₂]] = Λ((id ⊗ [[B₁<:A₁]]) ∘ ε ∘ [[A₂<:B₂]])
      Obj a1 = interp_type(a.lhs()), a2 = interp_type(a.rhs()), b1 = interp_type(b.lhs());
      Obj fa = hom(a1, a2);
      Mor h = comp({tens(id(fa), interp_subtype(b.lhs(), a.lhs())), eps(a1, a2),
                    interp_subtype(a.rhs(), b.rhs())});
      return lam(h, fa, b1);
    }
    case TK::Bang: break;
  }
  throw DenotError("core_subtype on a banged type");
}

Mor mu_context(const Shape& s) {
  // μ on every factor of a !-context; the factors are L-form objects already.
  Mor m = id(scalars());
  for (auto& [x, o] : s) m = tens(m, mu(o));
  return m;
}

}  // namespace

Obj interp_type(const Type& a) {
  switch (a.kind()) {
    case TK::Qbit: return concrete(vna::qubits(1));
    case TK::Top: return scalars();
    case TK::Bang: return lform(interp_type(a.lhs()));
    case TK::Lollipop: return hom(interp_type(a.lhs()), interp_type(a.rhs()));
    case TK::Tensor: return tensor(interp_type(a.lhs()), interp_type(a.rhs()));
    case TK::Sum: return sum(interp_type(a.lhs()), interp_type(a.rhs()));
  }
  throw DenotError("bad type");
}

Shape interp_context(const Context& ctx) {
  Shape s;
  for (auto& [x, t] : ctx) s.emplace_back(x, interp_type(t));
  return s;
}

Mor interp_subtype(const Type& a, const Type& b) {
  if (!subtype(a, b)) throw DenotError(print_type(a) + " is not a subtype of " + print_type(b));
  if (a == b) return id(interp_type(a));
  const int n = a.bangs(), m = b.bangs();
  Type a0 = a.strip(), b0 = b.strip();
  Obj x = interp_type(a0);
  Mor e = lmap_pow(a0 == b0 ? id(x) : core_subtype(a0, b0), m);  // Lᵐ[[B₀]] → Lᵐ[[A₀]]
  auto then = [&e](Mor g) { e = e->op == Op::Id ? g : comp(g, e); };
  for (int k = m; k < n; ++k) then(eta(lpow(x, k)));
  for (int k = m; k > n; --k) then(mu(lpow(x, k - 2)));
  return e;
}

Mor interp_constant(ConstKind c, const Gate* gate) {
  Mor f;
  Obj arg;
  switch (c) {
    case ConstKind::New:
      f = conc(vna::f_new());
      arg = interp_type(Type::bit());
      break;
    case ConstKind::Meas:
      f = comp(conc(vna::f_meas()), eta_inv(interp_type(Type::bang(Type::bit()))));
      arg = interp_type(Type::qbit());
      break;
    case ConstKind::Unitary:
      if (!gate) throw DenotError("unitary constant without a gate");
      f = conc(vna::f_unitary(gate->matrix));
      arg = interp_type(Type::qbits(gate->arity));
      break;
  }
  return comp(eta_inv(scalars()), lmap(lam(f, scalars(), arg)));
}

Mor interp_judgement(const Derivation& d) {
  return comp(iota(fv_shape(d.ctx, d.term), interp_context(d.ctx)), interp_judgement_fv(d));
}

Mor interp_judgement_fv(const Derivation& d) {
  const Term& t = d.term;
  const Shape target = fv_shape(d.ctx, t);
  switch (d.rule) {
    case Rule::Ax1: return interp_subtype(d.subtyping->first, d.subtyping->second);
    case Rule::Ax2:
      return comp(interp_constant(t.const_kind(), t.gate().get()),
                  interp_subtype(d.subtyping->first, d.subtyping->second));
    case Rule::TopI: return comp(dl_inv({}), interp_subtype(Type::bang(Type::top()), d.type));
    case Rule::LamI1:
    case Rule::LamI2: {
      const Derivation& p = d.premises[0];
      Obj a = interp_type(t.type_a());
      Mor f = comp(iota(fv_shape(p.ctx, p.term), append(target, t.name(), a)), interp_judgement_fv(p));
      Obj c = shape_object(target);
      Mor l = lam(f, c, a);
      if (d.rule == Rule::LamI1) return l;
      // μ ∘ (dᴸ)⁻¹ ∘ L(Λf) ∘ [[!(A⊸B) <: !ⁿ⁺¹(A⊸B)]]
      std::vector<Obj> xs;
      for (auto& [x, o] : target) xs.push_back(o);
      Type fun = Type::bang(d.type.strip());
      return comp({mu_context(target), dl_inv(xs), lmap(l), interp_subtype(fun, d.type)});
    }
    case Rule::LamE: {
      const Derivation &pf = d.premises[0], &pa = d.premises[1];
      Shape s1 = fv_shape(pf.ctx, t), s2 = fv_shape(pa.ctx, t);
      Obj a = interp_type(pf.type.lhs()), b = interp_type(pf.type.rhs());
      return comp({merge(s1, s2, target),
                   tens(iota(fv_shape(pf.ctx, pf.term), s1), iota(fv_shape(pa.ctx, pa.term), s2)),
                   tens(interp_judgement_fv(pf), interp_judgement_fv(pa)), eps(a, b)});
    }
    case Rule::TensorI: {
      const Derivation &p1 = d.premises[0], &p2 = d.premises[1];
      const int n = t.index();
      Shape s1 = fv_shape(p1.ctx, t), s2 = fv_shape(p2.ctx, t);
      Obj a = interp_type(unbang(p1.type, n)), b = interp_type(unbang(p2.type, n));
      return comp({merge(s1, s2, target),
                   tens(iota(fv_shape(p1.ctx, p1.term), s1), iota(fv_shape(p2.ctx, p2.term), s2)),
                   tens(interp_judgement_fv(p1), interp_judgement_fv(p2)), dl_pow_inv(n, a, b)});
    }
    case Rule::TensorE: {
      const Derivation &pb = d.premises[0], &pn = d.premises[1];
      const int n = t.index();
      Shape s1 = fv_shape(pb.ctx, t), s2 = fv_shape(pn.ctx, t);
      Obj a = interp_type(t.type_a()), b = interp_type(t.type_b());
      Obj o1 = shape_object(s1);
      Shape inner = append(append(s1, t.name(), lpow(a, n)), t.name2(), lpow(b, n));
      return comp({merge(s1, s2, target), tens(id(o1), iota(fv_shape(pn.ctx, pn.term), s2)),
                   tens(id(o1), interp_judgement_fv(pn)), tens(id(o1), dl_pow(n, a, b)),
                   iota(fv_shape(pb.ctx, pb.term), inner), interp_judgement_fv(pb)});
    }
    case Rule::SumI1:
    case Rule::SumI2: {
      const int n = t.index();
      Obj a = interp_type(t.type_a()), b = interp_type(t.type_b());
      return comp(interp_judgement_fv(d.premises[0]),
                  lmap_pow(proj(d.rule == Rule::SumI1 ? 1 : 2, a, b), n));
    }
    case Rule::SumE: {
      const Derivation &pl = d.premises[0], &pr = d.premises[1], &ps = d.premises[2];
      const int n = t.index();
      Obj a = interp_type(t.type_a()), b = interp_type(t.type_b());
      Obj la = lpow(a, n), lb = lpow(b, n);
      Shape s1 = fv_shape(pl.ctx, t), s2 = fv_shape(ps.ctx, t);
      Obj o1 = shape_object(s1);
      Mor il = iota(fv_shape(pl.ctx, pl.term), append(s1, t.name(), la));
      Mor ir = iota(fv_shape(pr.ctx, pr.term), append(s1, t.name2(), lb));
      return comp({merge(s1, s2, target), tens(id(o1), iota(fv_shape(ps.ctx, ps.term), s2)),
                   tens(id(o1), interp_judgement_fv(ps)), tens(id(o1), el_pow(n, a, b)),
                   theta(o1, la, lb), oplus(il, ir),
                   tuple(interp_judgement_fv(pl), interp_judgement_fv(pr))});
    }
  }
  throw DenotError("unknown typing rule");
}

Mor interp_closure(const Closure& c) {
  Derivation d = check_closure(c.reg, c.term);
  return comp(conc(vna::psi_functional(c.psi)), interp_judgement(d));
}

namespace {

// A deepest node whose dom or cod is not concrete.
Mor smallest_residual(const Mor& e) {
  for (auto& k : e->kids)
    if (!is_concrete(k->dom) || !is_concrete(k->cod)) return smallest_residual(k);
  for (auto& k : e->kids)
    if (!k->all_concrete) return smallest_residual(k);
  return e;
}

}  // namespace

vna::Morphism to_concrete(const Mor& e) {
  if (!is_concrete(e->dom) || !is_concrete(e->cod)) {
    Mor r = smallest_residual(e);
    throw ResidualError("no matrix for a morphism " + to_string(e->dom) + " -> " + to_string(e->cod) +
                            "; residual " + print(r),
                        r);
  }
  Mor n = normalize(e);
  Evaluator ev;
  return ev.to_matrix(n);
}

vna::Morphism denote(const Closure& c) { return to_concrete(interp_closure(c)); }

}  // namespace qlc::denot
