#include <gtest/gtest.h>

#include <map>
#include <random>

#include "corpus.hpp"
#include "oracles.hpp"
#include "qlc/denot/interp.hpp"
#include "qlc/denot/normalize.hpp"
#include "qlc/syntax/printer.hpp"

using namespace qlc;
using namespace qlc::denot;
namespace oracle = qlc::testing::oracle;

namespace {

Closure load(const std::string& name) { return make_closure(qlc::testing::load_corpus(name).term); }

std::vector<Closure> reachable(const Closure& start, std::size_t limit) {
  std::vector<Closure> seen{start};
  for (std::size_t i = 0; i < seen.size() && seen.size() < limit; ++i)
    for (auto& s : step(seen[i])) seen.push_back(s.closure);
  return seen;
}

double max_diff(const vna::Morphism& a, const vna::Morphism& b) {
  EXPECT_EQ(a.dom, b.dom);
  EXPECT_EQ(a.cod, b.cod);
  if (a.dom != b.dom || a.cod != b.cod) return 1e9;
  if (a.m.size() == 0) return 0;
  return (a.m - b.m).cwiseAbs().maxCoeff();
}

Obj cobj(std::vector<int> blocks) { return concrete(vna::Object{std::move(blocks)}); }

// Random CP map between concrete objects, from Kraus operators on the full
// block-diagonal algebras, then compressed onto the blocks.
vna::Morphism random_cp(const vna::Object& dom, const vna::Object& cod, std::mt19937_64& rng) {
  auto total = [](const vna::Object& o) {
    int n = 0;
    for (int b : o.blocks) n += b;
    return n;
  };
  int n = total(dom), m = total(cod);
  // a ↦ Σ K* a K on the big matrix algebra, restricted to block-diagonal input
  // and read back on the diagonal blocks of the output.
  std::vector<oracle::Mat> ks;
  for (int i = 0; i < 2; ++i) ks.push_back(oracle::random_unitary(std::max(n, m), rng).topLeftCorner(n, m) * 0.5);
  vna::Mat out = vna::Mat::Zero(cod.dim(), dom.dim());
  for (int j = 0; j < dom.dim(); ++j) {
    vna::Vec e = vna::Vec::Zero(dom.dim());
    e(j) = 1;
    vna::Element x = vna::unvec(dom, e);
    oracle::Mat big = oracle::Mat::Zero(n, n);
    for (std::size_t b = 0, o = 0; b < dom.blocks.size(); o += dom.blocks[b], ++b)
      big.block(o, o, dom.blocks[b], dom.blocks[b]) = x[b];
    oracle::Mat y = oracle::Mat::Zero(m, m);
    for (auto& k : ks) y += k.adjoint() * big * k;
    vna::Element ye;
    for (std::size_t b = 0, o = 0; b < cod.blocks.size(); o += cod.blocks[b], ++b)
      ye.push_back(y.block(o, o, cod.blocks[b], cod.blocks[b]));
    out.col(j) = vna::vec(cod, ye);
  }
  return vna::linear(dom, cod, out);
}

// [[P : A]]^(l): the first l register qubits are not free in the term and
// are passed through with an identity, M₂^{⊗l} ⊗ [[A]] → ℂ.
Mor sem_l(const Closure& c, std::size_t l) {
  std::vector<std::string> rest(c.reg.begin() + static_cast<long>(l), c.reg.end());
  Mor j = interp_judgement(check_closure(rest, c.term));
  return comp(conc(vna::psi_functional(c.psi)), tens(id(concrete(vna::qubits(static_cast<int>(l)))), j));
}

std::size_t unused_prefix(const Closure& c) {
  auto fv = free_vars(c.term);
  std::size_t l = 0;
  while (l < c.reg.size() && !fv.count(c.reg[l])) ++l;
  return l;
}

vna::Shape to_vna(const Shape& s) {
  vna::Shape out;
  for (auto& [x, o] : s) out.emplace_back(x, o->conc);
  return out;
}

}  // namespace

// ---- objects

TEST(InterpType, Examples) {
  EXPECT_TRUE(same(interp_type(Type::qbit()), cobj({2})));
  EXPECT_TRUE(same(interp_type(Type::bang(Type::qbit())), cobj({})));
  EXPECT_TRUE(same(interp_type(Type::bit()), cobj({1, 1})));
  EXPECT_TRUE(same(interp_type(Type::bang(Type::bit())), cobj({1, 1})));
  EXPECT_TRUE(same(interp_type(Type::top()), scalars()));
  EXPECT_TRUE(same(interp_type(Type::tensor(Type::qbit(), Type::bit())), cobj({2, 2})));
  EXPECT_TRUE(same(interp_type(Type::bang(Type::sum(Type::qbit(), Type::top()))), cobj({1})));
  Obj f = interp_type(parse_type("bit -o bit"));
  EXPECT_EQ(f->kind, SemObject::Kind::Hom);
  Obj lf = interp_type(parse_type("!!(bit -o bit)"));
  EXPECT_EQ(lf->kind, SemObject::Kind::LFormal);
  EXPECT_TRUE(same(lf, lform(f)));
}

TEST(InterpType, TensorsFlatten) {
  Obj f = interp_type(parse_type("bit -o bit"));
  Obj t = tensor({cobj({2}), f, cobj({2}), cobj({2})});
  auto parts = tensor_parts(t);
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_TRUE(same(parts[2], cobj({4})));
  EXPECT_TRUE(same(tensor(scalars(), f), f));
  EXPECT_TRUE(same(tensor(f, cobj({})), cobj({})));
  EXPECT_TRUE(same(tensor(tensor(f, f), f), tensor(f, tensor(f, f))));
}

TEST(Ir, ConstructorsCheckTypes) {
  EXPECT_THROW(comp(id(cobj({2})), id(cobj({1, 1}))), DenotError);
  EXPECT_THROW(eta_inv(cobj({2})), DenotError);
  Obj f = interp_type(parse_type("bit -o bit"));
  EXPECT_THROW(lam(id(cobj({2})), scalars(), cobj({1, 1})), DenotError);
  EXPECT_NO_THROW(lam(id(cobj({1, 1})), scalars(), cobj({1, 1})));
  EXPECT_THROW(merge({{"x", cobj({2})}}, {{"x", cobj({2})}}, {{"x", cobj({2})}}), DenotError);
  EXPECT_NO_THROW(merge({{"x", cobj({1, 1})}}, {{"x", cobj({1, 1})}}, {{"x", cobj({1, 1})}}));
  EXPECT_TRUE(same(eps(cobj({2}), cobj({1, 1}))->cod, tensor(hom(cobj({2}), cobj({1, 1})), cobj({2}))));
  (void)f;
}

// ---- states

TEST(States, SplitAndRecombine) {
  std::mt19937_64 rng(3);
  std::vector<Obj> fs{cobj({2}), cobj({1, 1}), cobj({1, 2})};
  Obj t = tensor(fs);
  ASSERT_TRUE(is_concrete(t));
  oracle::Vec v = oracle::random_state(t->conc.dim(), rng);
  St s = vec_state(t, v);
  auto terms = split_state(fs, s);
  St back = zero_state(t);
  for (auto& [c, parts] : terms) back = add(back, scale(c, tensor_state(fs, parts)));
  EXPECT_LT((back->vec - v).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(States, PointsOfConcreteLForm) {
  Obj b = cobj({1, 1});
  vna::Vec v(2);
  v << 0.25, 0.75;
  auto pts = points_of(b, vec_state(b, v));
  St back = from_points(b, pts);
  EXPECT_LT((back->vec - v).cwiseAbs().maxCoeff(), 1e-12);
  vna::Vec half(2);
  half << 0.5, 0.5;
  EXPECT_THROW(from_points(b, {{1.0, vec_state(b, half)}}), DenotError);
}

// ---- the evaluator against vna arithmetic

TEST(Evaluator, StructureMapsMatchVna) {
  vna::Object a{{2}}, b{{1, 1}}, c{{1, 2}};
  Obj A = concrete(a), B = concrete(b), C = concrete(c);
  std::mt19937_64 rng(11);
  vna::Morphism f = random_cp(b, c, rng), g = random_cp(a, b, rng);
  std::vector<std::pair<Mor, vna::Morphism>> cases = {
      {theta(A, B, C), vna::theta(a, b, c)},
      {theta_inv(A, B, C), vna::theta_inv(a, b, c)},
      {gamma(A, C), vna::gamma(a, c)},
      {gamma(B, C), vna::gamma(b, c)},
      {dl({B, C}), vna::dL(b, c)},
      {dl_inv({A, C}), vna::dL_inv(a, c)},
      {dl_inv({B, C}), vna::dL_inv(b, c)},
      {el(A, C), vna::eL(a, c)},
      {el_inv(B, C), vna::eL_inv(b, c)},
      {nabla(C), vna::nabla(c)},
      {eta(C), vna::eta(c)},
      {mu(A), vna::mu(a)},
      {eta_inv(B), vna::eta_inv(b)},
      {proj(2, A, C), vna::proj2(a, c)},
      {oplus(conc(f), conc(g)), vna::oplus_mor(f, g)},
      {tuple(conc(f), conc(vna::compose(f, vna::eta(b)))), vna::tuple(f, vna::compose(f, vna::eta(b)))},
      {tens(conc(f), conc(g)), vna::tensor_mor(f, g)},
      {comp(conc(f), conc(vna::compose(vna::eta(b), g))), vna::compose(f, vna::compose(vna::eta(b), g))},
      {lmap(conc(vna::eta(b))), vna::L_mor(vna::eta(b))},
      {lmap(proj(1, A, C)), vna::L_mor(vna::proj1(a, c))},
      {iota({{"x", C}}, {{"y", A}, {"x", C}}), vna::iota({{"x", c}}, {{"y", a}, {"x", c}})},
      {merge({{"x", B}, {"y", A}}, {{"x", B}}, {{"y", A}, {"x", B}}),
       vna::merge({{"x", b}, {"y", a}}, {{"x", b}}, {{"y", a}, {"x", b}})},
  };
  Evaluator structural(0);
  for (auto& [e, expect] : cases) {
    SCOPED_TRACE(print(e));
    EXPECT_TRUE(e->all_concrete);
    EXPECT_LT(max_diff(structural.to_matrix(e), expect), 1e-12);
    Evaluator fast;
    EXPECT_LT(max_diff(fast.to_matrix(e), expect), 1e-12);
  }
  // the unit ℂ → A picks out 1
  vna::Morphism u = Evaluator(0).to_matrix(bang(C));
  EXPECT_LT((u.m.col(0) - vna::vec(c, vna::unit(c))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Evaluator, AdjunctionThroughFormalClosures) {
  std::mt19937_64 rng(5);
  vna::Object a{{2}}, b{{1, 2}}, c{{1, 1}};
  Obj A = concrete(a), B = concrete(b), Cc = concrete(c);
  for (int trial = 0; trial < 5; ++trial) {
    vna::Morphism f = random_cp(b, vna::tensor(c, a), rng);
    Mor lf = lam(conc(f), Cc, A);
    Mor e = comp(tens(lf, id(A)), eps(A, B));
    EXPECT_LT(max_diff(Evaluator().to_matrix(e), f), 1e-12);
    // naturality: h ∘ Λf = Λ((h ⊗ id) ∘ f)
    vna::Morphism h = random_cp(c, a, rng);
    Mor lhs = comp(tens(comp(conc(h), lf), id(A)), eps(A, B));
    vna::Morphism rhs = vna::compose(vna::tensor_mor(h, vna::identity(a)), f);
    EXPECT_LT(max_diff(Evaluator().to_matrix(lhs), rhs), 1e-12);
  }
}

TEST(Evaluator, BangedHomRoundTrip) {
  // ((η⁻¹ ∘ LΛg ∘ η) ⊗ id) ∘ ε = g without rewriting
  std::mt19937_64 rng(8);
  vna::Object a{{2}}, b{{1, 1}}, c{{1, 1}};
  Obj A = concrete(a), B = concrete(b), Cc = concrete(c);
  vna::Morphism g = random_cp(b, vna::tensor(c, a), rng);
  Mor lg = lam(conc(g), Cc, A);
  Mor h = comp({eta_inv(Cc), lmap(lg), eta(lg->dom)});
  Mor e = comp(tens(h, id(A)), eps(A, B));
  EXPECT_LT(max_diff(Evaluator().to_matrix(e), g), 1e-12);
}

// ---- subtyping and constants

TEST(InterpSubtype, Examples) {
  EXPECT_EQ(interp_subtype(Type::qbit(), Type::qbit())->op, Op::Id);
  Mor e = interp_subtype(Type::bang(Type::bit()), Type::bit());
  EXPECT_EQ(e->op, Op::Eta);
  EXPECT_LT(max_diff(to_concrete(e), vna::identity(vna::bit_obj())), 1e-15);
  EXPECT_THROW(interp_subtype(Type::bit(), Type::bang(Type::bit())), DenotError);
}

TEST(InterpSubtype, LollipopIsEtaArrowMu) {
  // [[A⊸!B <: !A⊸!!B]] = η_A ⊸ μ_B: precomposed with Λg and applied, it is
  // η ∘ g ∘ μ.
  Type a = Type::sum(Type::qbit(), Type::top()), b = Type::bit();
  Type lo = Type::lollipop(a, Type::bang(b));
  Type hi = Type::lollipop(Type::bang(a), Type::bang(b, 2));
  Mor sub = interp_subtype(lo, hi);
  Obj A = interp_type(a), LA = interp_type(Type::bang(a)), LLB = interp_type(Type::bang(b, 2));
  vna::Morphism g = vna::tuple(vna::f_meas(), vna::proj1(vna::scalars(), vna::scalars()));
  Mor lg = lam(conc(g), scalars(), A);
  Mor applied = comp(tens(comp(lg, sub), id(LA)), eps(LA, LLB));
  Mor expect = comp({eta(A), conc(g), mu(interp_type(b))});
  EXPECT_LT(max_diff(Evaluator().to_matrix(applied), Evaluator().to_matrix(expect)), 1e-12);
  EXPECT_LT(max_diff(to_concrete(applied), Evaluator().to_matrix(expect)), 1e-12);
}

TEST(InterpSubtype, CoherentOnConcreteTypes) {
  // [[A <: C]] = [[A <: B]] ∘ [[B <: C]] for first-order chains
  std::vector<std::string> chains[] = {
      {"!!bit", "!bit", "bit"},
      {"!(qbit + top) * !!bit", "!(qbit + top) * !bit", "(qbit + top) * bit"},
      {"!!!top", "!!top", "!top"},
      {"!!(!bit + bit)", "!(!bit + bit)", "bit + bit"},
  };
  for (auto& ch : chains) {
    Type a = parse_type(ch[0]), b = parse_type(ch[1]), c = parse_type(ch[2]);
    SCOPED_TRACE(ch[0] + " <: " + ch[2]);
    vna::Morphism direct = to_concrete(interp_subtype(a, c));
    vna::Morphism via = to_concrete(comp(interp_subtype(a, b), interp_subtype(b, c)));
    EXPECT_LT(max_diff(direct, via), 1e-12);
    EXPECT_TRUE(vna::is_miu(direct));
  }
}

TEST(InterpConstant, Shapes) {
  Mor n = interp_constant(ConstKind::New, nullptr);
  ASSERT_EQ(n->op, Op::Comp);
  EXPECT_EQ(n->kids[0]->op, Op::EtaInv);
  ASSERT_EQ(n->kids[1]->op, Op::Lmap);
  EXPECT_EQ(n->kids[1]->kids[0]->op, Op::Lam);
  auto h = builtin_gate("H");
  Mor u = interp_constant(ConstKind::Unitary, h.get());
  EXPECT_TRUE(same(u->dom, lform(hom(cobj({2}), cobj({2})))));
  Mor m = interp_constant(ConstKind::Meas, nullptr);
  EXPECT_TRUE(same(m->dom, lform(hom(cobj({2}), cobj({1, 1})))));
  EXPECT_THROW(interp_constant(ConstKind::Unitary, nullptr), DenotError);
}

// ---- judgements and closures

TEST(InterpJudgement, Examples) {
  Context q{{"x", Type::qbit()}};
  std::map<std::string, Type> qm{{"x", Type::qbit()}};
  Mor var = normalize(interp_judgement(typecheck(q, parse_term("x", {}, qm))));
  EXPECT_EQ(var->op, Op::Id);
  EXPECT_TRUE(same(var->dom, cobj({2})));

  Mor star = normalize(interp_judgement(typecheck({}, parse_term("*"))));
  EXPECT_EQ(star->op, Op::Id);
  EXPECT_TRUE(same(star->dom, scalars()));

  Mor meas = normalize(interp_judgement(typecheck(q, parse_term("meas x", {}, qm))));
  ASSERT_EQ(meas->op, Op::Conc);
  EXPECT_LT(max_diff(*meas->conc, vna::f_meas()), 1e-15);
}

TEST(InterpClosure, Examples) {
  vna::Morphism t = denote(make_closure(Term::tt()));
  EXPECT_NEAR(std::abs(t.m(0, 0)), 0, 1e-15);
  EXPECT_NEAR(std::abs(t.m(0, 1) - 1.0), 0, 1e-15);
  vna::Morphism f = denote(make_closure(Term::ff()));
  EXPECT_NEAR(std::abs(f.m(0, 0) - 1.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(f.m(0, 1)), 0, 1e-15);

  StateVector zero = StateVector::Zero(2);
  zero(0) = 1;
  Closure c{zero, {"x"}, parse_term("x", {}, {{"x", Type::qbit()}})};
  EXPECT_LT(max_diff(denote(c), vna::psi_functional(zero)), 1e-15);
}

TEST(ToConcrete, FunctionTypeIsResidual) {
  Derivation d = typecheck({}, parse_term("lambda x:qbit. x"));
  try {
    to_concrete(interp_judgement(d));
    FAIL() << "expected a residual";
  } catch (const ResidualError& e) {
    ASSERT_TRUE(e.residual());
    EXPECT_FALSE(is_concrete(e.residual()->dom) && is_concrete(e.residual()->cod));
  }
}

TEST(ToConcrete, IdentityOnQubit) {
  EXPECT_LT(max_diff(to_concrete(id(cobj({2}))), vna::identity(vna::qubits(1))), 1e-15);
}

// ---- normalization

TEST(Normalize, Adjunction) {
  std::mt19937_64 rng(2);
  vna::Object a{{2}}, b{{1, 1}};
  Obj A = concrete(a), B = concrete(b);
  Mor f = conc(random_cp(b, a, rng));
  Mor e = comp(tens(lam(f, scalars(), A), id(A)), eps(A, B));
  EXPECT_EQ(normalize(e), f);
}

TEST(Normalize, EtaNaturality) {
  std::mt19937_64 rng(4);
  vna::Object a{{2}}, b{{1, 2}}, c{{1, 1}};
  Obj Cc = concrete(c);
  Mor lg = lam(conc(random_cp(b, vna::tensor(c, a), rng)), Cc, concrete(a));
  Mor e = comp({eta_inv(Cc), lmap(lg), eta(lg->dom)});
  EXPECT_EQ(print(normalize(e)), print(lg));
}

TEST(Normalize, ConcreteTreeFolds) {
  std::mt19937_64 rng(6);
  vna::Object a{{2}}, b{{1, 1}}, c{{1, 2}};
  vna::Morphism f = random_cp(b, c, rng), g = random_cp(a, b, rng), h = random_cp(c, a, rng);
  Mor e = comp({tens(conc(f), id(concrete(a))), gamma(concrete(a), concrete(b)), tens(conc(g), conc(h))});
  Mor n = normalize(e);
  ASSERT_EQ(n->op, Op::Conc);
  vna::Morphism expect = vna::compose(vna::compose(vna::tensor_mor(f, vna::identity(a)), vna::gamma(a, b)),
                                      vna::tensor_mor(g, h));
  EXPECT_LT(max_diff(*n->conc, expect), 1e-12);
}

TEST(Normalize, BudgetIsReported) {
  Closure c = load("teleport");
  NormalizeStats st;
  Mor e = interp_closure(c);
  Mor n = normalize(e, 3, &st);
  EXPECT_TRUE(st.budget_exhausted);
  EXPECT_LT(max_diff(Evaluator().to_matrix(n), Evaluator().to_matrix(e)), 1e-12);
}

// ---- substitution and permutation

TEST(Substitution, ValueIntoContext) {
  // [[Γ ▷ M[V/x]]] = (id ⊗ [[▷ V]]) ∘ [[Γ, x:A ▷ M]]
  struct Case {
    std::string m, x, a, v;
  };
  std::vector<Case> cases = {
      {"if x then X q else q", "x", "bit", "tt"},
      {"if x then X q else q", "x", "bit", "ff"},
      {"<q, x>", "x", "!bit", "tt^1"},
      {"x q", "x", "qbit -o qbit", "lambda y:qbit. H y"},
      {"x^{qbit -o qbit} (x^{qbit -o qbit} q)", "x", "!(qbit -o qbit)", "lambda^1 y:qbit. S y"},
      {"match x with (u:top -> q | w:bit -> H q)", "x", "top + bit", "inr[top, bit] tt"},
  };
  for (auto& k : cases) {
    SCOPED_TRACE(k.m + " [" + k.v + "/" + k.x + "]");
    Type a = parse_type(k.a);
    Context gamma{{"q", Type::qbit()}};
    Context ext{{"q", Type::qbit()}, {k.x, a}};
    Term m = parse_term(k.m, {}, {{"q", Type::qbit()}, {k.x, a}});
    Term v = parse_term(k.v);
    Mor jm = interp_judgement(typecheck(ext, m));
    Mor jv = interp_judgement(typecheck({}, v));
    Mor lhs = interp_judgement(typecheck(gamma, substitute(m, k.x, v)));
    Mor rhs = comp(tens(id(cobj({2})), jv), jm);
    EXPECT_LT(max_diff(to_concrete(lhs), to_concrete(rhs)), 1e-12);
  }
}

TEST(Permutation, ContextOrderIsCoherent) {
  Context ctx{{"a", Type::qbit()}, {"b", Type::bang(Type::bit())}, {"c", Type::qbit()}};
  std::map<std::string, Type> names(ctx.begin(), ctx.end());
  std::vector<std::string> terms = {
      "<if b^{bit} then a else X a, <c, b^{bit}>>",
      "<CNOT <a, c>, b^{bit}>",
      "meas (if b^{bit} then H c else a)",
  };
  std::vector<std::vector<int>> perms = {{2, 0, 1}, {1, 2, 0}, {0, 2, 1}};
  for (auto& s : terms) {
    Term t = parse_term(s, {}, names);
    Derivation d = typecheck(ctx, t);
    vna::Morphism base = to_concrete(interp_judgement(d));
    for (auto& p : perms) {
      Context pc{ctx[p[0]], ctx[p[1]], ctx[p[2]]};
      vna::Morphism permuted = to_concrete(interp_judgement(typecheck(pc, t)));
      vna::Morphism sigma = vna::iota(to_vna(interp_context(ctx)), to_vna(interp_context(pc)));
      EXPECT_LT(max_diff(permuted, vna::compose(sigma, base)), 1e-12) << s;
    }
  }
}

// ---- corpus

class CorpusDenot : public ::testing::TestWithParam<qlc::testing::CorpusEntry> {};

TEST_P(CorpusDenot, Adequacy) {
  auto& e = GetParam();
  Closure c = load(e.name);
  vna::Morphism m = denote(c);
  ASSERT_EQ(m.dom, vna::bit_obj());
  ASSERT_EQ(m.cod, vna::scalars());
  EXPECT_NEAR(std::abs(m.m(0, 0) - e.p_ff), 0, 1e-9);
  EXPECT_NEAR(std::abs(m.m(0, 1) - e.p_tt), 0, 1e-9);
  auto [ff, tt] = observe(big_step(c));
  EXPECT_NEAR(std::abs(m.m(0, 0) - ff), 0, 1e-9);
  EXPECT_NEAR(std::abs(m.m(0, 1) - tt), 0, 1e-9);
}

TEST_P(CorpusDenot, NormalizationPreservesMeaning) {
  Closure c = load(GetParam().name);
  Mor e = interp_closure(c);
  EXPECT_LT(max_diff(Evaluator().to_matrix(normalize(e)), Evaluator().to_matrix(e)), 1e-12);
}

TEST_P(CorpusDenot, BigStepSoundness) {
  Closure c = load(GetParam().name);
  vna::Morphism lhs = denote(c);
  vna::Mat sum = vna::Mat::Zero(lhs.m.rows(), lhs.m.cols());
  for (auto& leaf : big_step(c).leaves) sum += leaf.prob * denote(leaf.closure).m;
  EXPECT_LT((lhs.m - sum).cwiseAbs().maxCoeff(), 1e-9);
}

TEST_P(CorpusDenot, StepSoundness) {
  for (auto& p : reachable(load(GetParam().name), 150)) {
    auto succ = step(p);
    if (succ.empty()) continue;
    SCOPED_TRACE(print_term(p.term));
    vna::Morphism lhs = denote(p);
    vna::Mat sum = vna::Mat::Zero(lhs.m.rows(), lhs.m.cols());
    for (auto& s : succ) sum += s.prob * denote(s.closure).m;
    EXPECT_LT((lhs.m - sum).cwiseAbs().maxCoeff(), 1e-9);

    // the strengthened form with unused register qubits passed through
    std::size_t l = unused_prefix(p);
    if (l == 0) continue;
    vna::Morphism lhs_l = to_concrete(sem_l(p, l));
    vna::Mat sum_l = vna::Mat::Zero(lhs_l.m.rows(), lhs_l.m.cols());
    for (auto& s : succ) sum_l += s.prob * to_concrete(sem_l(s.closure, l)).m;
    EXPECT_LT((lhs_l.m - sum_l).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST_P(CorpusDenot, ExtractedMapsAreCPsU) {
  for (auto& p : reachable(load(GetParam().name), 60)) {
    SCOPED_TRACE(print_term(p.term));
    vna::Morphism m = denote(p);
    EXPECT_TRUE(vna::is_cp(m));
    EXPECT_TRUE(vna::is_subunital(m));
    if (is_value(p.term)) EXPECT_TRUE(vna::is_miu(to_concrete(interp_judgement(check_closure(p.reg, p.term)))));
  }
}

INSTANTIATE_TEST_SUITE_P(Corpus, CorpusDenot, ::testing::ValuesIn(qlc::testing::corpus()),
                         [](const auto& info) { return info.param.name; });

TEST(Beta, RedexAndContractumAgree) {
  // Judgement-level equality for every β step met in the corpus, plus
  // hand-written redexes under a qubit context.
  int pairs = 0;
  auto check = [&](const Closure& p, const Closure& q) {
    ASSERT_EQ(p.reg, q.reg);
    vna::Morphism a = to_concrete(interp_judgement(check_closure(p.reg, p.term)));
    vna::Morphism b = to_concrete(interp_judgement(check_closure(q.reg, q.term)));
    EXPECT_LT(max_diff(a, b), 1e-9) << print_term(p.term) << "  ~>  " << print_term(q.term);
    ++pairs;
  };
  for (auto& e : qlc::testing::corpus())
    for (auto& p : reachable(load(e.name), 200))
      for (auto& s : step(p))
        if (s.rule.rfind("beta", 0) == 0) check(p, s.closure);

  std::vector<std::string> extra = {
      "(lambda y:qbit. H y) q",
      "(lambda y:qbit. lambda z:bit. if z then y else X y) q tt",
      "let <a:qbit, b:bit> = <q, ff> in if b then a else Z a",
      "let <a:bit, b:bit>^1 = <tt^1, ff^1>^1 in if a^{bit} then q else H q",
      "match inl[qbit, qbit] q with (u:qbit -> u | w:qbit -> X w)",
      "match inr[top, qbit] q with (u:top -> H (new ff) | w:qbit -> S w)",
      "(lambda f:!(qbit -o qbit). f^{qbit -o qbit} (f^{qbit -o qbit} q)) (lambda^1 y:qbit. T y)",
  };
  for (auto& s : extra) {
    Term t = parse_term(s, {}, {{"q", Type::qbit()}});
    StateVector psi = StateVector::Zero(2);
    psi(1) = 1;
    Closure p{psi, {"q"}, t};
    auto succ = step(p);
    ASSERT_EQ(succ.size(), 1u) << s;
    ASSERT_EQ(succ[0].rule.rfind("beta", 0), 0u) << s;
    check(p, succ[0].closure);
  }
  EXPECT_GE(pairs, 50);
}
