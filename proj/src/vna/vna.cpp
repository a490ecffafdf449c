#include "qlc/vna/vna.hpp"

#include <numeric>

namespace qlc::vna {

namespace {

Flags all_flags() { return {true, true, true, true}; }

Morphism make(const Object& dom, const Object& cod, Mat m, Flags fl) {
  return {dom, cod, std::move(m), fl};
}

struct Triple {
  int block, r, c;
};

// Decoding table: flat index -> (block, r, c).
std::vector<Triple> decode_table(const Object& a) {
  std::vector<Triple> t;
  t.reserve(a.dim());
  for (std::size_t b = 0; b < a.blocks.size(); ++b) {
    int n = a.blocks[b];
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) t.push_back({static_cast<int>(b), r, c});
  }
  return t;
}

// Flattened tensor of several factors. Blocks are mixed-radix tuples of
// factor blocks; inside a block rows are mixed-radix tuples of factor rows.
class Layout {
 public:
  explicit Layout(std::vector<Object> factors) : f_(std::move(factors)) {
    total_ = tensor(f_);
    int off = 0;
    for (int n : total_.blocks) offsets_.push_back(off), off += n * n;
  }
  const Object& total() const { return total_; }
  std::size_t size() const { return f_.size(); }
  const Object& factor(std::size_t t) const { return f_[t]; }

  int encode(const std::vector<Triple>& parts) const {
    int blk = 0, n = 1, r = 0, c = 0;
    for (std::size_t t = 0; t < f_.size(); ++t) {
      const auto& p = parts[t];
      int nt = f_[t].blocks[p.block];
      blk = blk * static_cast<int>(f_[t].blocks.size()) + p.block;
      r = r * nt + p.r;
      c = c * nt + p.c;
      n *= nt;
    }
    return offsets_[blk] + r + c * n;
  }

  // Calls fn(flat_index, parts) for every matrix unit of the total object.
  template <class Fn>
  void for_each_unit(Fn fn) const {
    std::vector<Triple> parts(f_.size());
    for (std::size_t t = 0; t < f_.size(); ++t)
      if (f_[t].blocks.empty()) return;
    std::vector<int> bt(f_.size(), 0);
    for (int blk = 0; blk < static_cast<int>(total_.blocks.size()); ++blk) {
      int n = total_.blocks[blk];
      for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) {
          int rr = r, cc = c;
          for (std::size_t t = f_.size(); t-- > 0;) {
            int nt = f_[t].blocks[bt[t]];
            parts[t] = {bt[t], rr % nt, cc % nt};
            rr /= nt;
            cc /= nt;
          }
          fn(offsets_[blk] + r + c * n, parts);
        }
      for (std::size_t t = f_.size(); t-- > 0;) {
        if (++bt[t] < static_cast<int>(f_[t].blocks.size())) break;
        bt[t] = 0;
      }
    }
  }

 private:
  std::vector<Object> f_;
  Object total_;
  std::vector<int> offsets_;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw VnaError(msg);
}

Element image(const Morphism& f, int col) { return unvec(f.cod, f.m.col(col)); }

double max_abs(const Element& x, const Element& y) {
  double d = 0;
  for (std::size_t b = 0; b < x.size(); ++b)
    if (x[b].size()) d = std::max(d, (x[b] - y[b]).cwiseAbs().maxCoeff());
  return d;
}

bool is_zero(const Element& x, double tol) {
  for (auto& b : x)
    if (b.size() && b.cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

}  // namespace

int Object::dim() const {
  int d = 0;
  for (int n : blocks) d += n * n;
  return d;
}

int Object::offset(std::size_t b) const {
  int d = 0;
  for (std::size_t i = 0; i < b; ++i) d += blocks[i] * blocks[i];
  return d;
}

bool Object::is_lform() const {
  return std::all_of(blocks.begin(), blocks.end(), [](int n) { return n == 1; });
}

Object scalars() { return {{1}}; }
Object bit_obj() { return {{1, 1}}; }
Object qubits(int k) { return {{1 << k}}; }

std::string to_string(const Object& a) {
  std::string s = "[";
  for (std::size_t i = 0; i < a.blocks.size(); ++i)
    s += (i ? "," : "") + std::to_string(a.blocks[i]);
  return s + "]";
}

Element unit(const Object& a) {
  Element x;
  for (int n : a.blocks) x.push_back(Mat::Identity(n, n));
  return x;
}

Element zero(const Object& a) {
  Element x;
  for (int n : a.blocks) x.push_back(Mat::Zero(n, n));
  return x;
}

Vec vec(const Object& a, const Element& x) {
  require(x.size() == a.blocks.size(), "element does not match object " + to_string(a));
  Vec v(a.dim());
  int off = 0;
  for (std::size_t b = 0; b < x.size(); ++b) {
    int n = a.blocks[b];
    require(x[b].rows() == n && x[b].cols() == n, "block shape mismatch");
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) v(off++) = x[b](r, c);
  }
  return v;
}

Element unvec(const Object& a, const Vec& v) {
  require(v.size() == a.dim(), "vector does not match object " + to_string(a));
  Element x;
  int off = 0;
  for (int n : a.blocks) {
    Mat m(n, n);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) m(r, c) = v(off++);
    x.push_back(std::move(m));
  }
  return x;
}

Element multiply(const Element& x, const Element& y) {
  require(x.size() == y.size(), "element shape mismatch");
  Element z;
  for (std::size_t b = 0; b < x.size(); ++b) {
    require(x[b].cols() == y[b].rows(), "element shape mismatch");
    z.push_back(x[b] * y[b]);
  }
  return z;
}

Element adjoint(const Element& x) {
  Element z;
  for (auto& b : x) z.push_back(b.adjoint());
  return z;
}

bool is_self_adjoint(const Element& x, double tol) {
  for (auto& b : x)
    if (b.size() && (b - b.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

bool is_positive(const Element& x, double tol) {
  if (!is_self_adjoint(x, tol)) return false;
  for (auto& b : x) {
    if (!b.size()) continue;
    Mat h = (b + b.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) return false;
  }
  return true;
}

Element Morphism::operator()(const Element& x) const { return unvec(cod, m * vec(dom, x)); }

Morphism identity(const Object& a) {
  return make(a, a, Mat::Identity(a.dim(), a.dim()), all_flags());
}

Morphism compose(const Morphism& g, const Morphism& f) {
  require(g.dom == f.cod, "cannot compose " + to_string(f.dom) + "→" + to_string(f.cod) +
                              " with " + to_string(g.dom) + "→" + to_string(g.cod));
  Flags fl{g.flags.cp && f.flags.cp, g.flags.miu && f.flags.miu, g.flags.unital && f.flags.unital,
           g.flags.subunital && f.flags.subunital};
  return make(f.dom, g.cod, g.m * f.m, fl);
}

Morphism linear(const Object& dom, const Object& cod, Mat m) {
  require(m.rows() == cod.dim() && m.cols() == dom.dim(), "matrix does not match objects");
  return make(dom, cod, std::move(m), {});
}

bool approx_equal(const Morphism& f, const Morphism& g, double tol) {
  if (f.dom != g.dom || f.cod != g.cod) return false;
  if (f.m.size() == 0) return true;
  return (f.m - g.m).cwiseAbs().maxCoeff() <= tol;
}

bool is_cp(const Morphism& f) {
  for (std::size_t i = 0; i < f.dom.blocks.size(); ++i) {
    int n = f.dom.blocks[i];
    for (std::size_t j = 0; j < f.cod.blocks.size(); ++j) {
      int m = f.cod.blocks[j];
      Mat choi(n * m, n * m);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q)
              choi(r * m + p, c * m + q) = f.m(f.cod.index(j, p, q), f.dom.index(i, r, c));
      if ((choi - choi.adjoint()).cwiseAbs().maxCoeff() > kTol) return false;
      Mat h = (choi + choi.adjoint()) / 2.0;
      Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -kTol) return false;
    }
  }
  return true;
}

bool is_unital(const Morphism& f) { return max_abs(f(unit(f.dom)), unit(f.cod)) <= kTol; }

bool is_subunital(const Morphism& f) {
  Element d = unit(f.cod), fu = f(unit(f.dom));
  for (std::size_t b = 0; b < d.size(); ++b) d[b] -= fu[b];
  return is_positive(d);
}

bool is_miu(const Morphism& f) {
  if (!is_unital(f)) return false;
  const Object& a = f.dom;
  std::vector<Element> img(a.dim());
  for (int k = 0; k < a.dim(); ++k) img[k] = image(f, k);
  std::vector<Element> block_unit;
  for (std::size_t b = 0; b < a.blocks.size(); ++b) {
    int n = a.blocks[b];
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const Element& x = img[a.index(b, r, c)];
        if (max_abs(adjoint(x), img[a.index(b, c, r)]) > kTol) return false;
        for (int s = 0; s < n; ++s)
          for (int t = 0; t < n; ++t) {
            Element lhs = multiply(x, img[a.index(b, s, t)]);
            Element rhs = c == s ? img[a.index(b, r, t)] : zero(f.cod);
            if (max_abs(lhs, rhs) > kTol) return false;
          }
      }
    Vec u = Vec::Zero(a.dim());
    for (int r = 0; r < n; ++r) u(a.index(b, r, r)) = 1;
    block_unit.push_back(unvec(f.cod, f.m * u));
  }
  // Units of different blocks are orthogonal; together with multiplicativity
  // inside each block this covers every cross-block pair.
  for (std::size_t b = 0; b < block_unit.size(); ++b)
    for (std::size_t b2 = 0; b2 < block_unit.size(); ++b2)
      if (b != b2 && !is_zero(multiply(block_unit[b], block_unit[b2]), kTol)) return false;
  return true;
}

bool flags_hold(const Morphism& f) {
  return (!f.flags.cp || is_cp(f)) && (!f.flags.miu || is_miu(f)) &&
         (!f.flags.unital || is_unital(f)) && (!f.flags.subunital || is_subunital(f));
}

Object tensor(const Object& a, const Object& b) {
  Object t;
  for (int n : a.blocks)
    for (int m : b.blocks) t.blocks.push_back(n * m);
  return t;
}

Object tensor(const std::vector<Object>& factors) {
  Object t = scalars();
  for (auto& f : factors) t = tensor(t, f);
  return t;
}

std::vector<int> tensor_index(const Object& a, const Object& b) {
  Object ab = tensor(a, b);
  auto ta = decode_table(a), tb = decode_table(b);
  const int nb = static_cast<int>(b.blocks.size());
  std::vector<int> idx(ta.size() * tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i)
    for (std::size_t j = 0; j < tb.size(); ++j) {
      const Triple &p = ta[i], &q = tb[j];
      int m = b.blocks[q.block];
      int blk = p.block * nb + q.block;
      int n = a.blocks[p.block] * m;
      idx[i * tb.size() + j] = ab.offset(blk) + (p.r * m + q.r) + (p.c * m + q.c) * n;
    }
  return idx;
}

Vec tensor_vec(const Object& a, const Object& b, const Vec& x, const Vec& y) {
  Vec out = Vec::Zero(tensor(a, b).dim());
  auto idx = tensor_index(a, b);
  for (int i = 0; i < x.size(); ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < y.size(); ++j)
      if (y(j) != 0.0) out(idx[i * y.size() + j]) += x(i) * y(j);
  }
  return out;
}

Morphism tensor_mor(const Morphism& f, const Morphism& g) {
  require(f.flags.cp || is_cp(f), "tensor of morphisms requires completely positive maps");
  require(g.flags.cp || is_cp(g), "tensor of morphisms requires completely positive maps");
  Morphism t = tensor_linear(f, g);
  t.flags.cp = true;
  return t;
}

Morphism tensor_linear(const Morphism& f, const Morphism& g) {
  Layout dom({f.dom, g.dom});
  Object cod = tensor(f.cod, g.cod);
  Mat m = Mat::Zero(cod.dim(), dom.total().dim());
  dom.for_each_unit([&](int idx, const std::vector<Triple>& parts) {
    int i = f.dom.index(parts[0].block, parts[0].r, parts[0].c);
    int j = g.dom.index(parts[1].block, parts[1].r, parts[1].c);
    m.col(idx) = tensor_vec(f.cod, g.cod, f.m.col(i), g.m.col(j));
  });
  Flags fl{f.flags.cp && g.flags.cp, f.flags.miu && g.flags.miu,
           f.flags.unital && g.flags.unital, f.flags.subunital && g.flags.subunital};
  return make(dom.total(), cod, std::move(m), fl);
}

Object direct_sum(const Object& a, const Object& b) {
  Object s = a;
  s.blocks.insert(s.blocks.end(), b.blocks.begin(), b.blocks.end());
  return s;
}

Morphism proj1(const Object& a, const Object& b) {
  Mat m = Mat::Zero(a.dim(), a.dim() + b.dim());
  m.leftCols(a.dim()).setIdentity();
  return make(direct_sum(a, b), a, std::move(m), all_flags());
}

Morphism proj2(const Object& a, const Object& b) {
  Mat m = Mat::Zero(b.dim(), a.dim() + b.dim());
  m.rightCols(b.dim()).setIdentity();
  return make(direct_sum(a, b), b, std::move(m), all_flags());
}

Morphism tuple(const Morphism& f, const Morphism& g) {
  require(f.dom == g.dom, "tupling needs a common domain");
  Mat m(f.m.rows() + g.m.rows(), f.m.cols());
  m << f.m, g.m;
  Flags fl{f.flags.cp && g.flags.cp, f.flags.miu && g.flags.miu, f.flags.unital && g.flags.unital,
           f.flags.subunital && g.flags.subunital};
  return make(f.dom, direct_sum(f.cod, g.cod), std::move(m), fl);
}

Morphism oplus_mor(const Morphism& f, const Morphism& g) {
  Mat m = Mat::Zero(f.m.rows() + g.m.rows(), f.m.cols() + g.m.cols());
  m.topLeftCorner(f.m.rows(), f.m.cols()) = f.m;
  m.bottomRightCorner(g.m.rows(), g.m.cols()) = g.m;
  Flags fl{f.flags.cp && g.flags.cp, f.flags.miu && g.flags.miu, f.flags.unital && g.flags.unital,
           f.flags.subunital && g.flags.subunital};
  return make(direct_sum(f.dom, g.dom), direct_sum(f.cod, g.cod), std::move(m), fl);
}

std::vector<int> nsp_blocks(const Object& a) {
  std::vector<int> out;
  for (std::size_t b = 0; b < a.blocks.size(); ++b)
    if (a.blocks[b] == 1) out.push_back(static_cast<int>(b));
  return out;
}

FiniteSet nsp(const Object& a) {
  FiniteSet s;
  for (int b : nsp_blocks(a)) s.labels.push_back("block" + std::to_string(b));
  return s;
}

Morphism point(const Object& a, std::size_t k) {
  auto bs = nsp_blocks(a);
  require(k < bs.size(), "no such spectrum point");
  Mat m = Mat::Zero(1, a.dim());
  m(0, a.index(bs[k], 0, 0)) = 1;
  return make(a, scalars(), std::move(m), all_flags());
}

Object linf(const FiniteSet& x) { return {std::vector<int>(x.size(), 1)}; }

Morphism linf_mor(const std::vector<int>& h, std::size_t x_size) {
  Object x{std::vector<int>(x_size, 1)}, y{std::vector<int>(h.size(), 1)};
  Mat m = Mat::Zero(y.dim(), x.dim());
  for (std::size_t i = 0; i < h.size(); ++i) {
    require(h[i] >= 0 && static_cast<std::size_t>(h[i]) < x_size, "map leaves its codomain");
    m(i, h[i]) = 1;
  }
  return make(x, y, std::move(m), all_flags());
}

Object L_obj(const Object& a) { return linf(nsp(a)); }

Morphism L_mor(const Morphism& f) {
  require(f.flags.miu || is_miu(f), "L applies only to MIU maps");
  auto xa = nsp_blocks(f.dom), xb = nsp_blocks(f.cod);
  std::vector<int> h;
  for (int by : xb) {
    // The point y of B pulled back along f is a point of A.
    Eigen::RowVectorXcd row = f.m.row(f.cod.index(by, 0, 0));
    int found = -1;
    for (std::size_t x = 0; x < xa.size() && found < 0; ++x) {
      Eigen::RowVectorXcd e = Eigen::RowVectorXcd::Zero(f.dom.dim());
      e(f.dom.index(xa[x], 0, 0)) = 1;
      if ((row - e).cwiseAbs().maxCoeff() <= kTol) found = static_cast<int>(x);
    }
    require(found >= 0, "spectrum point does not pull back to a point");
    h.push_back(found);
  }
  return linf_mor(h, xa.size());
}

Morphism eta(const Object& a) {
  auto bs = nsp_blocks(a);
  Object la = L_obj(a);
  Mat m = Mat::Zero(la.dim(), a.dim());
  for (std::size_t k = 0; k < bs.size(); ++k) m(k, a.index(bs[k], 0, 0)) = 1;
  return make(a, la, std::move(m), all_flags());
}

Morphism eta_inv(const Object& a) {
  require(a.is_lform(), "η is invertible only on L-form objects");
  return identity(a);
}

Morphism mu(const Object& a) { return identity(L_obj(a)); }

// L(A⊗B) keeps the pairs of 1-blocks, in the same lexicographic order as
// LA ⊗ LB; likewise L(A⊕B) lists the 1-blocks of A then of B.
Morphism dL(const Object& a, const Object& b) { return identity(tensor(L_obj(a), L_obj(b))); }
Morphism dL_inv(const Object& a, const Object& b) { return dL(a, b); }
Morphism eL(const Object& a, const Object& b) { return identity(direct_sum(L_obj(a), L_obj(b))); }
Morphism eL_inv(const Object& a, const Object& b) { return eL(a, b); }

Morphism nabla(const Object& a) {
  Object la = L_obj(a);
  int k = static_cast<int>(la.blocks.size());
  Mat m = Mat::Zero(k, k * k);
  for (int x = 0; x < k; ++x) m(x, x * k + x) = 1;
  return make(tensor(la, la), la, std::move(m), all_flags());
}

Morphism block_permutation(const Object& dom, const std::vector<int>& perm) {
  require(perm.size() == dom.blocks.size(), "block permutation has the wrong length");
  Object cod;
  std::vector<bool> seen(perm.size());
  for (int p : perm) {
    require(p >= 0 && p < static_cast<int>(perm.size()) && !seen[p], "not a permutation");
    seen[p] = true;
    cod.blocks.push_back(dom.blocks[p]);
  }
  Mat m = Mat::Zero(cod.dim(), dom.dim());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    int n = cod.blocks[k];
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(cod.index(k, r, c), dom.index(perm[k], r, c)) = 1;
  }
  return make(dom, cod, std::move(m), all_flags());
}

namespace {
std::vector<int> theta_perm(const Object& a, const Object& b, const Object& c) {
  const int na = static_cast<int>(a.blocks.size()), nb = static_cast<int>(b.blocks.size()),
            nc = static_cast<int>(c.blocks.size());
  std::vector<int> perm;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) perm.push_back(i * nb + j);
    for (int k = 0; k < nc; ++k) perm.push_back(na * nb + i * nc + k);
  }
  return perm;
}
}  // namespace

Morphism theta(const Object& a, const Object& b, const Object& c) {
  return block_permutation(direct_sum(tensor(a, b), tensor(a, c)), theta_perm(a, b, c));
}

Morphism theta_inv(const Object& a, const Object& b, const Object& c) {
  auto perm = theta_perm(a, b, c);
  std::vector<int> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = static_cast<int>(k);
  return block_permutation(tensor(a, direct_sum(b, c)), inv);
}

Morphism gamma(const Object& a, const Object& b) {
  return rewire({{{"0", a}, {"1", b}}}, {{"1", b}, {"0", a}});
}

Object shape_object(const Shape& s) {
  std::vector<Object> fs;
  for (auto& [n, o] : s) fs.push_back(o);
  return tensor(fs);
}

Morphism rewire(const std::vector<Shape>& sources, const Shape& target) {
  std::vector<Object> src_objs, tgt_objs;
  std::vector<std::string> src_names;
  for (auto& s : sources)
    for (auto& [n, o] : s) src_objs.push_back(o), src_names.push_back(n);
  for (auto& [n, o] : target) tgt_objs.push_back(o);
  Layout dom(src_objs), cod(tgt_objs);

  // feeds[t]: source factors routed to target factor t.
  std::vector<std::vector<std::size_t>> feeds(target.size());
  for (std::size_t s = 0; s < src_names.size(); ++s) {
    std::size_t t = 0;
    while (t < target.size() && target[t].first != src_names[s]) ++t;
    require(t < target.size(), "factor '" + src_names[s] + "' has no place in the target");
    require(src_objs[s] == target[t].second, "factor '" + src_names[s] + "' changes its object");
    feeds[t].push_back(s);
  }
  for (std::size_t t = 0; t < target.size(); ++t)
    require(feeds[t].size() < 2 || target[t].second.is_lform(),
            "shared factor '" + target[t].first + "' is not of L-form");

  Mat m = Mat::Zero(cod.total().dim(), dom.total().dim());
  std::vector<std::vector<Triple>> alts(target.size());
  std::vector<Triple> pick(target.size());
  dom.for_each_unit([&](int col, const std::vector<Triple>& parts) {
    for (std::size_t t = 0; t < target.size(); ++t) {
      alts[t].clear();
      if (feeds[t].empty()) {
        const Object& o = target[t].second;
        for (std::size_t b = 0; b < o.blocks.size(); ++b)
          for (int d = 0; d < o.blocks[b]; ++d) alts[t].push_back({static_cast<int>(b), d, d});
      } else {
        Triple first = parts[feeds[t][0]];
        bool nonzero = true;
        for (std::size_t s : feeds[t]) nonzero = nonzero && parts[s].block == first.block;
        if (!nonzero) return;  // e_x · e_y = 0 for distinct points
        alts[t].push_back(first);
      }
      if (alts[t].empty()) return;  // zero algebra
    }
    // Cartesian product of the alternatives.
    std::vector<std::size_t> k(target.size(), 0);
    for (;;) {
      for (std::size_t t = 0; t < target.size(); ++t) pick[t] = alts[t][k[t]];
      m(cod.encode(pick), col) += 1.0;
      std::size_t t = target.size();
      while (t-- > 0) {
        if (++k[t] < alts[t].size()) break;
        k[t] = 0;
      }
      if (t == static_cast<std::size_t>(-1)) break;
    }
  });
  return make(dom.total(), cod.total(), std::move(m), all_flags());
}

Morphism iota(const Shape& sub, const Shape& super) { return rewire({sub}, super); }

Morphism merge(const Shape& left, const Shape& right, const Shape& target) {
  return rewire({left, right}, target);
}

bool is_duplicator(const Object& a, const Morphism& m) {
  require(m.dom == tensor(a, a) && m.cod == a, "duplicator candidate has the wrong type");
  if (!is_unital(m) || !is_cp(m)) return false;
  const int d = a.dim();
  Vec one = vec(a, unit(a));
  auto e = [&](int i) {
    Vec v = Vec::Zero(d);
    v(i) = 1;
    return v;
  };
  auto mul = [&](const Vec& x, const Vec& y) -> Vec { return m.m * tensor_vec(a, a, x, y); };
  for (int i = 0; i < d; ++i) {
    if ((mul(one, e(i)) - e(i)).cwiseAbs().maxCoeff() > kTol) return false;
    if ((mul(e(i), one) - e(i)).cwiseAbs().maxCoeff() > kTol) return false;
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Vec ij = mul(e(i), e(j));
      for (int k = 0; k < d; ++k)
        if ((mul(e(i), mul(e(j), e(k))) - mul(ij, e(k))).cwiseAbs().maxCoeff() > kTol) return false;
    }
  return true;
}

Morphism psi_functional(const Vec& psi) {
  const int n = static_cast<int>(psi.size());
  Object dom{{n}};
  Mat m(1, n * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(0, r + c * n) = std::conj(psi(r)) * psi(c);
  Flags fl{true, false, std::abs(psi.squaredNorm() - 1) <= kTol, psi.squaredNorm() <= 1 + kTol};
  return make(dom, scalars(), std::move(m), fl);
}

Morphism f_new() {
  Mat m = Mat::Zero(2, 4);
  m(0, 0) = 1;  // ⟨0|A|0⟩
  m(1, 3) = 1;  // ⟨1|A|1⟩
  return make(qubits(1), bit_obj(), std::move(m), {true, false, true, true});
}

Morphism f_meas() {
  Mat m = Mat::Zero(4, 2);
  m(0, 0) = 1;
  m(3, 1) = 1;
  return make(bit_obj(), qubits(1), std::move(m), all_flags());
}

Morphism f_unitary(const Mat& u) {
  const int n = static_cast<int>(u.rows());
  require(u.cols() == n, "gate matrix is not square");
  Mat m(n * n, n * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) m(p + q * n, r + c * n) = std::conj(u(r, p)) * u(c, q);
  return make({{n}}, {{n}}, std::move(m), all_flags());
}

}  // namespace qlc::vna
