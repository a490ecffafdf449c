// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "corpus.hpp"
#include "oracles.hpp"
#include "qlc/denot/interp.hpp"
#include "qlc/opsem/opsem.hpp"
#include "qlc/syntax/printer.hpp"
#include "qlc/typing/typing.hpp"

using namespace qlc;
namespace oracle = qlc::testing::oracle;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Closure load(const std::string& name) { return make_closure(qlc::testing::load_corpus(name).term); }

std::vector<Closure> reachable(const Closure& start) {
  std::vector<Closure> seen{start};
  for (std::size_t i = 0; i < seen.size(); ++i)
    for (auto& s : step(seen[i])) seen.push_back(s.closure);
  return seen;
}

double max_abs(const vna::Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// ---- 1
Outcome adequacy() {
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  std::set<std::string> names;
  for (auto& e : qlc::testing::corpus()) {
    Closure c = load(e.name);
    Distribution d = big_step(c);
    auto [ff, tt] = observe(d);
    vna::Morphism m = denot::denote(c);
    worst = std::max({worst, std::abs(ff - m.m(0, 0)), std::abs(tt - m.m(0, 1))});
    if (d.truncated > 0) return {false, e.name + " hit the step cap"};
    names.insert(e.name);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool coverage = names.count("teleport") && names.count("deutsch_balanced") && names.count("dup_not");
  bool ok = worst <= 1e-9 && names.size() >= 10 && coverage && secs < 10;
  return {ok, std::to_string(names.size()) + " programs, max |diff| " + fmt(worst) + ", " + fmt(secs) + " s"};
}

// ---- 2 and 3
Outcome progress() {
  std::size_t visited = 0;
  double worst = 0;
  std::size_t max_branches = 0;
  for (auto& e : qlc::testing::corpus())
    for (auto& c : reachable(load(e.name))) {
      if (is_value(c.term)) continue;
      ++visited;
      auto succ = step(c);
      double mass = 0;
      for (auto& s : succ) mass += s.prob;
      worst = std::max(worst, std::abs(mass - 1));
      max_branches = std::max(max_branches, succ.size());
    }
  bool ok = worst <= 1e-9 && max_branches <= 2 && max_branches >= 1;
  return {ok, std::to_string(visited) + " closures, max |mass-1| " + fmt(worst) + ", max branches " +
                  std::to_string(max_branches)};
}

Outcome subject_reduction() {
  std::size_t edges = 0, kept = 0;
  for (auto& e : qlc::testing::corpus()) {
    Closure start = load(e.name);
    Type ty = check_closure(start.reg, start.term).type;
    for (auto& c : reachable(start))
      for (auto& s : step(c)) {
        ++edges;
        try {
          kept += check_closure(s.closure.reg, s.closure.term).type == ty;
        } catch (const TypeError&) {
        }
      }
  }
  return {edges > 0 && kept == edges, std::to_string(kept) + "/" + std::to_string(edges) + " edges keep the type"};
}

// ---- 4
Outcome step_soundness() {
  std::size_t checked = 0, skipped = 0;
  double worst = 0;
  for (auto& e : qlc::testing::corpus())
    for (auto& p : reachable(load(e.name))) {
      auto succ = step(p);
      if (succ.empty()) continue;
      try {
        vna::Morphism lhs = denot::denote(p);
        vna::Mat sum = vna::Mat::Zero(lhs.m.rows(), lhs.m.cols());
        for (auto& s : succ) sum += s.prob * denot::denote(s.closure).m;
        worst = std::max(worst, max_abs(lhs.m - sum));
        ++checked;
      } catch (const denot::ResidualError&) {
        ++skipped;
      }
    }
  bool ok = checked >= 100 && worst <= 1e-9;
  return {ok, std::to_string(checked) + " closures (" + std::to_string(skipped) + " not extractable), max diff " +
                  fmt(worst)};
}

// ---- 5
Outcome beta() {
  std::size_t pairs = 0;
  double worst = 0;
  auto check = [&](const Closure& p, const Closure& q) {
    vna::Morphism a = denot::to_concrete(denot::interp_judgement(check_closure(p.reg, p.term)));
    vna::Morphism b = denot::to_concrete(denot::interp_judgement(check_closure(q.reg, q.term)));
    worst = std::max(worst, a.dom == b.dom && a.cod == b.cod ? max_abs(a.m - b.m) : 1e9);
    ++pairs;
  };
  for (auto& e : qlc::testing::corpus())
    for (auto& p : reachable(load(e.name)))
      for (auto& s : step(p))
        if (s.rule.rfind("beta", 0) == 0) check(p, s.closure);

  // Generated redexes over a register qubit q, one per gate and shape.
  const std::vector<std::string> shapes = {
      "(lambda y:qbit. G y) q",
      "(lambda y:qbit. lambda b:bit. if b then G y else y) q tt",
      "let <a:qbit, b:bit> = <q, tt> in if b then G a else a",
      "match inr[top, qbit] q with (u:top -> new ff | w:qbit -> G w)",
      "match inl[qbit, qbit] q with (u:qbit -> G u | w:qbit -> w)",
      "(lambda f:!(qbit -o qbit). f^{qbit -o qbit} (f^{qbit -o qbit} q)) (lambda^1 y:qbit. G y)",
  };
  StateVector psi(2);
  psi << std::sqrt(0.3), std::complex<double>(0, std::sqrt(0.7));
  for (const std::string g : {"H", "X", "Y", "Z", "S", "T"})
    for (auto s : shapes) {
      for (std::size_t i; (i = s.find('G')) != std::string::npos;) s.replace(i, 1, g);
      Closure p{psi, {"q"}, parse_term(s, {}, {{"q", Type::qbit()}})};
      auto succ = step(p);
      if (succ.size() != 1 || succ[0].rule.rfind("beta", 0) != 0) return {false, "not a redex: " + s};
      check(p, succ[0].closure);
    }
  return {pairs >= 50 && worst <= 1e-9, std::to_string(pairs) + " pairs, max diff " + fmt(worst)};
}

// ---- 6
vna::Mat random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  vna::Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

vna::Object random_object(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nb(1, 4), d(1, 3);
  vna::Object o;
  for (int i = nb(rng); i > 0; --i) o.blocks.push_back(d(rng));
  return o;
}

double diff(const vna::Morphism& f, const vna::Morphism& g) {
  if (f.dom != g.dom || f.cod != g.cod) return 1e9;
  return max_abs(f.m - g.m);
}

Outcome vna_laws() {
  using namespace vna;
  std::mt19937_64 rng(2024);
  double worst = 0;
  int objects = 0;
  for (int i = 0; i < 40; ++i) {
    Object a = random_object(rng), b = random_object(rng), c = random_object(rng);
    Object la = L_obj(a);
    ++objects;
    // monad
    worst = std::max(worst, diff(compose(mu(a), eta(la)), identity(la)));
    worst = std::max(worst, diff(compose(mu(a), L_mor(eta(a))), identity(la)));
    worst = std::max(worst, diff(compose(mu(a), L_mor(mu(a))), compose(mu(a), mu(la))));
    std::vector<int> perm(a.blocks.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Morphism f = block_permutation(a, perm);
    worst = std::max(worst, diff(compose(eta(f.cod), f), compose(L_mor(f), eta(a))));
    // isomorphisms
    Morphism d = dL(a, b), di = dL_inv(a, b), e = eL(a, b), ei = eL_inv(a, b);
    worst = std::max({worst, diff(compose(di, d), identity(d.dom)), diff(compose(d, di), identity(d.cod))});
    worst = std::max({worst, diff(compose(ei, e), identity(e.dom)), diff(compose(e, ei), identity(e.cod))});
    Morphism t = theta(a, b, c), ti = theta_inv(a, b, c);
    worst = std::max({worst, diff(compose(ti, t), identity(t.dom)), diff(compose(t, ti), identity(t.cod))});
    worst = std::max(worst, diff(compose(gamma(b, a), gamma(a, b)), identity(tensor(a, b))));
    // spectrum of sums and tensors
    std::size_t na = nsp(a).size(), nb = nsp(b).size();
    if (static_cast<int>(na) != oracle::count_points(a.blocks)) return {false, "nsp count " + to_string(a)};
    Object s = direct_sum(a, b), ab = tensor(a, b);
    if (nsp(s).size() != na + nb || nsp(ab).size() != na * nb) return {false, "spectrum size"};
    for (std::size_t k = 0; k < na + nb; ++k) {
      Morphism expect = k < na ? compose(point(a, k), proj1(a, b)) : compose(point(b, k - na), proj2(a, b));
      worst = std::max(worst, diff(point(s, k), expect));
    }
    for (std::size_t x = 0; x < na; ++x)
      for (std::size_t y = 0; y < nb; ++y)
        worst = std::max(worst, diff(point(ab, x * nb + y), tensor_mor(point(a, x), point(b, y))));
  }
  // is_cp against Kraus operators with signs; CP exactly when all signs are +
  std::uniform_int_distribution<int> dim(1, 3), coin(0, 1);
  int agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = dim(rng), m = dim(rng);
    int k = std::uniform_int_distribution<int>(1, n * m)(rng);
    std::vector<oracle::Mat> ks;
    std::vector<int> signs;
    bool cp = true;
    for (int i = 0; i < k; ++i) {
      ks.push_back(random_matrix(n, m, rng));
      signs.push_back(coin(rng) ? -1 : 1);
      cp = cp && signs.back() > 0;
    }
    agree += is_cp(linear({{n}}, {{m}}, oracle::kraus_heisenberg(ks, signs))) == cp;
  }
  bool ok = worst <= 1e-9 && agree == 200;
  return {ok, std::to_string(objects) + " object triples, max law error " + fmt(worst) + ", is_cp agrees " +
                  std::to_string(agree) + "/200"};
}

// ---- 7
Outcome duplicators() {
  using namespace vna;
  for (int k = 1; k <= 3; ++k) {
    Object x{std::vector<int>(k, 1)};
    Eigen::MatrixXd sol = oracle::unique_duplicator(k);
    if (sol.rows() != k) return {false, "no unique solution for |X| = " + std::to_string(k)};
    Morphism cand = linear(tensor(x, x), x, sol.cast<std::complex<double>>());
    if (diff(cand, nabla(x)) > 1e-9 || !is_duplicator(x, cand)) return {false, "|X| = " + std::to_string(k)};
  }
  // nsp(M₂) = ∅: φ([a,b]) = 0 and φ(1) = 1 have the unique solution tr/2
  // (full rank), which is not multiplicative: φ(E₀₀)² ≠ φ(E₀₀).
  Eigen::MatrixXcd a(17, 4);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(17);
  Object q{{2}};
  int row = 0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t, ++row) {
          a.row(row).setZero();
          if (c == s) a(row, q.index(0, r, t)) += 1.0;
          if (t == r) a(row, q.index(0, s, c)) -= 1.0;
        }
  a.row(16).setZero();
  a(16, q.index(0, 0, 0)) = a(16, q.index(0, 1, 1)) = 1.0;
  rhs(16) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
  lu.setThreshold(1e-9);
  Eigen::VectorXcd phi = lu.solve(rhs);
  bool unique = lu.rank() == 4 && (a * phi - rhs).cwiseAbs().maxCoeff() <= 1e-9;
  std::complex<double> p00 = phi(q.index(0, 0, 0));
  double defect = std::abs(p00 * p00 - p00);
  bool ok = unique && defect > 1e-9 && nsp(q).size() == 0 && oracle::count_points({2}) == 0;
  return {ok, "unique duplicator for |X| = 1..3; nsp([2]) empty (rank " + std::to_string(lu.rank()) +
                  ", multiplicativity defect " + fmt(defect) + ")"};
}

// ---- 8
std::pair<int, std::string> run(const std::string& args) {
  std::string cmd = std::string("'") + QLC_BIN + "' " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), p)) > 0;) out.append(buf.data(), n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome determinism() {
  std::size_t compared = 0;
  for (auto& e : qlc::testing::corpus()) {
    std::string file = qlc::testing::corpus_path(e.name);
    auto base = run("enumerate '" + file + "' --json");
    if (base.first != 0 || base.second.empty()) return {false, e.name + ": enumerate failed"};
    for (int t : {1, 2, 4, 8}) {
      auto again = run("enumerate '" + file + "' --json --threads " + std::to_string(t));
      ++compared;
      if (again != base) return {false, e.name + " differs with " + std::to_string(t) + " threads"};
    }
  }
  return {true, std::to_string(compared) + " reruns byte-identical (threads 1, 2, 4, 8)"};
}

// ---- 9
Outcome sampling() {
  Closure c = load("coin");
  int ff = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(i));
    ff += sample(c, rng).result.term.is(Term::Kind::Inl);
  }
  double freq = static_cast<double>(ff) / n;
  return {std::abs(freq - 0.5) <= 0.03, "ff frequency " + fmt(freq) + " over seeds 0..9999"};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"adequacy", adequacy},
      {"progress", progress},
      {"subject reduction", subject_reduction},
      {"step soundness", step_soundness},
      {"beta equations", beta},
      {"vna laws", vna_laws},
      {"duplicators", duplicators},
      {"operational determinism", determinism},
      {"sampling consistency", sampling},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "[" << i + 1 << "] " << criteria[i].first << ": " << (o.pass ? "PASS" : "FAIL") << "  ("
              << o.detail << ")" << std::endl;
  }
  return failed ? 1 : 0;
}
