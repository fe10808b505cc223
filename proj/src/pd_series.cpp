#include "prl/pd_series.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace prl {

namespace {

struct IndexHash {
  size_t operator()(const MultiIndex& m) const {
    u64 h = 1469598103934665603ull;
    for (auto e : m) {
      h ^= static_cast<std::uint16_t>(e);
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

inline u64 mulmod(const PrecisionContext& c, u64 a, u64 b) { return c.mul(a, b); }

// out += f * (a b), where either factor may be a 1x1 scalar.
void mul_acc(const PrecisionContext& c, std::vector<u64>& out, const std::vector<u64>& a,
             const std::vector<u64>& b, int d, u64 f) {
  if (a.size() == 1 && b.size() == 1) {
    out[0] = c.add(out[0], mulmod(c, mulmod(c, a[0], b[0]), f));
    return;
  }
  if (a.size() == 1 || b.size() == 1) {
    const auto& s = a.size() == 1 ? a : b;
    const auto& m = a.size() == 1 ? b : a;
    u64 k = mulmod(c, s[0], f);
    for (size_t i = 0; i < m.size(); ++i) out[i] = c.add(out[i], mulmod(c, m[i], k));
    return;
  }
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      u64 x = a[i * d + k];
      if (!x) continue;
      x = mulmod(c, x, f);
      for (int j = 0; j < d; ++j) {
        u64 y = b[k * d + j];
        if (y) out[i * d + j] = c.add(out[i * d + j], mulmod(c, x, y));
      }
    }
}

bool all_zero(const std::vector<u64>& v) {
  return std::all_of(v.begin(), v.end(), [](u64 x) { return x == 0; });
}

std::vector<std::vector<u64>> binomial_table(const PrecisionContext& c, int n) {
  std::vector<std::vector<u64>> t(n + 1, std::vector<u64>(n + 1, 0));
  for (int i = 0; i <= n; ++i) {
    t[i][0] = 1 % c.modulus();
    for (int j = 1; j <= i; ++j) t[i][j] = c.add(t[i - 1][j - 1], j <= i - 1 ? t[i - 1][j] : 0);
  }
  return t;
}

}  // namespace

u64 binomial_mod(const PrecisionContext& ctx, int n, int k) {
  if (k < 0 || k > n) return 0;
  return binomial_table(ctx, n)[n][k];
}

// RingSpec

RingSpec::RingSpec(std::vector<VarSpec> vars, int pd_order, std::optional<Relation> rel)
    : vars_(std::move(vars)), pd_order_(pd_order), rel_(rel) {
  if (vars_.size() > static_cast<size_t>(kMaxVars))
    throw InputError("too many ring variables (max " + std::to_string(kMaxVars) + ")");
  if (pd_order_ < 0) throw InputError("negative truncation order");
  for (size_t i = 0; i < vars_.size(); ++i) {
    for (size_t j = 0; j < i; ++j)
      if (vars_[i].name == vars_[j].name)
        throw InputError("duplicate variable name '" + vars_[i].name + "'");
    auto& v = vars_[i];
    if (v.kind == VarKind::pd) {
      v.lo = 0;
      v.hi = pd_order_;
    } else if (v.kind == VarKind::poly) {
      v.lo = 0;
    }
    if (v.lo > 0 || v.hi < 0) throw InputError("variable caps must bracket 0");
  }
  if (rel_) {
    int n = size();
    if (rel_->x < 0 || rel_->x >= n || rel_->y < 0 || rel_->y >= n || rel_->x == rel_->y ||
        vars_[rel_->x].kind != VarKind::poly || vars_[rel_->y].kind != VarKind::poly)
      throw InputError("relation must join two distinct polynomial variables");
  }
}

std::optional<int> RingSpec::find(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (vars_[i].name == name) return i;
  return std::nullopt;
}

int RingSpec::index(const std::string& name) const {
  auto i = find(name);
  if (!i) throw InputError("unknown variable '" + name + "'");
  return *i;
}

bool RingSpec::operator==(const RingSpec& o) const {
  if (pd_order_ != o.pd_order_ || vars_.size() != o.vars_.size()) return false;
  if (rel_.has_value() != o.rel_.has_value()) return false;
  if (rel_ && (rel_->x != o.rel_->x || rel_->y != o.rel_->y)) return false;
  for (size_t i = 0; i < vars_.size(); ++i) {
    const auto &a = vars_[i], &b = o.vars_[i];
    if (a.name != b.name || a.kind != b.kind || a.lo != b.lo || a.hi != b.hi) return false;
  }
  return true;
}

Ring make_ring(std::vector<VarSpec> vars, int pd_order, std::optional<Relation> rel) {
  return std::make_shared<const RingSpec>(std::move(vars), pd_order, rel);
}

Ring pd_ring(const std::vector<std::string>& names, int pd_order) {
  std::vector<VarSpec> v;
  for (const auto& n : names) v.push_back({n, VarKind::pd});
  return make_ring(std::move(v), pd_order);
}

static bool same_ring(const Ring& a, const Ring& b) { return a == b || *a == *b; }

bool GradedLess::operator()(const MultiIndex& a, const MultiIndex& b) const {
  int pa = 0, pb = 0, ta = 0, tb = 0;
  for (int i = 0; i < ring->size(); ++i) {
    if (ring->var(i).kind == VarKind::pd) {
      pa += a[i];
      pb += b[i];
    }
    ta += a[i];
    tb += b[i];
  }
  if (pa != pb) return pa < pb;
  if (ta != tb) return ta < tb;
  return a < b;
}

// PDSeries

PDSeries::PDSeries(Ring ring, const PrecisionContext& ctx, int dim)
    : ring_(std::move(ring)), ctx_(ctx), dim_(dim), terms_(GradedLess{ring_.get()}) {
  if (dim < 1) throw InputError("series rank must be positive");
}

PDSeries PDSeries::constant(Ring ring, const PadicMatrix& c) {
  if (!c.square()) throw InputError("series coefficients must be square");
  PDSeries s(std::move(ring), c.ctx(), c.dim());
  s.add_term(MultiIndex{}, c);
  return s;
}

PDSeries PDSeries::identity(Ring ring, const PrecisionContext& ctx, int dim) {
  return constant(std::move(ring), PadicMatrix::identity(ctx, dim));
}

PDSeries PDSeries::monomial(Ring ring, const MultiIndex& idx, const PadicMatrix& c) {
  PDSeries s(std::move(ring), c.ctx(), c.dim());
  s.add_term(idx, c);
  return s;
}

PDSeries PDSeries::scalar_monomial(Ring ring, const PrecisionContext& ctx, const MultiIndex& idx,
                                   i64 c) {
  PDSeries s(std::move(ring), ctx, 1);
  s.add_term(idx, Coeff{ctx.reduce(c)});
  return s;
}

PDSeries PDSeries::variable(Ring ring, const PrecisionContext& ctx, const std::string& name) {
  MultiIndex idx{};
  idx[ring->index(name)] = 1;
  return scalar_monomial(std::move(ring), ctx, idx);
}

MultiIndex PDSeries::index_of(const std::map<std::string, int>& exps) const {
  MultiIndex idx{};
  for (const auto& [n, e] : exps) idx[ring_->index(n)] = static_cast<std::int16_t>(e);
  return idx;
}

int PDSeries::pd_degree(const MultiIndex& idx) const {
  int s = 0;
  for (int i = 0; i < ring_->size(); ++i)
    if (ring_->var(i).kind == VarKind::pd) s += idx[i];
  return s;
}

PadicMatrix PDSeries::coeff(const MultiIndex& idx) const {
  PadicMatrix m(ctx_, dim_, dim_);
  auto it = terms_.find(idx);
  if (it != terms_.end())
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m.at(i, j) = it->second[i * dim_ + j];
  return m;
}

u64 PDSeries::scalar_coeff(const MultiIndex& idx) const {
  if (dim_ != 1) throw InputError("scalar coefficient of a matrix series");
  auto it = terms_.find(idx);
  return it == terms_.end() ? 0 : it->second[0];
}

bool PDSeries::normalize(MultiIndex& idx, u64& factor) const {
  if (const auto& r = ring_->relation()) {
    int k = std::min(idx[r->x], idx[r->y]);
    if (k > 0) {
      idx[r->x] -= k;
      idx[r->y] -= k;
      factor = ctx_.mul(factor, ctx_.pow(ctx_.p(), k));
    }
  }
  if (pd_degree(idx) > ring_->pd_order()) return false;
  for (int i = ring_->size(); i < kMaxVars; ++i)
    if (idx[i]) throw InputError("index uses a variable outside the ring");
  for (int i = 0; i < ring_->size(); ++i) {
    const auto& v = ring_->var(i);
    if (v.kind == VarKind::pd) {
      if (idx[i] < 0) throw InputError("negative exponent on divided-power variable " + v.name);
      continue;
    }
    if (idx[i] < v.lo || idx[i] > v.hi)
      throw TruncationInsufficient("exponent " + std::to_string(idx[i]) + " of '" + v.name +
                                   "' exceeds its cap");
  }
  return factor != 0;
}

void PDSeries::add_term(MultiIndex idx, const Coeff& c) {
  if (c.size() != static_cast<size_t>(dim_) * dim_) throw InputError("coefficient size mismatch");
  u64 f = 1 % ctx_.modulus();
  if (!normalize(idx, f)) return;
  auto it = terms_.find(idx);
  if (it == terms_.end()) {
    Coeff v(c.size());
    for (size_t i = 0; i < c.size(); ++i) v[i] = ctx_.mul(c[i] % ctx_.modulus(), f);
    if (!all_zero(v)) terms_.emplace(idx, std::move(v));
    return;
  }
  for (size_t i = 0; i < c.size(); ++i) it->second[i] = ctx_.add(it->second[i], ctx_.mul(c[i], f));
  if (all_zero(it->second)) terms_.erase(it);
}

void PDSeries::add_term(const MultiIndex& idx, const PadicMatrix& c) {
  if (!(c.ctx() == ctx_)) throw ContextMismatch("coefficient precision differs from the series");
  if (c.rows() != dim_ || c.cols() != dim_) throw InputError("coefficient shape mismatch");
  add_term(idx, c.data());
}

static void check_compatible(const PDSeries& a, const PDSeries& b, bool allow_broadcast) {
  if (!same_ring(a.ring(), b.ring())) throw ContextMismatch("series live in different rings");
  if (!(a.ctx() == b.ctx())) throw ContextMismatch("series carry different precision");
  if (a.dim() != b.dim() && !(allow_broadcast && (a.dim() == 1 || b.dim() == 1)))
    throw ContextMismatch("series ranks differ");
}

PDSeries& PDSeries::operator+=(const PDSeries& o) {
  check_compatible(*this, o, false);
  for (const auto& [idx, c] : o.terms_) {
    auto it = terms_.find(idx);
    if (it == terms_.end()) {
      terms_.emplace(idx, c);
      continue;
    }
    for (size_t i = 0; i < c.size(); ++i) it->second[i] = ctx_.add(it->second[i], c[i]);
    if (all_zero(it->second)) terms_.erase(it);
  }
  return *this;
}

PDSeries PDSeries::operator+(const PDSeries& o) const {
  PDSeries r = *this;
  r += o;
  return r;
}

PDSeries PDSeries::operator-() const {
  PDSeries r = *this;
  for (auto& [idx, c] : r.terms_)
    for (auto& x : c) x = ctx_.neg(x);
  return r;
}

PDSeries PDSeries::operator-(const PDSeries& o) const { return *this + (-o); }
PDSeries PDSeries::operator*(const PDSeries& o) const { return pd_multiply(*this, o); }

PDSeries PDSeries::scaled(u64 c) const {
  PDSeries r(ring_, ctx_, dim_);
  for (const auto& [idx, v] : terms_) {
    Coeff w(v.size());
    for (size_t i = 0; i < v.size(); ++i) w[i] = ctx_.mul(v[i], c);
    if (!all_zero(w)) r.terms_.emplace(idx, std::move(w));
  }
  return r;
}

PDSeries PDSeries::left_mul(const PadicMatrix& m) const {
  PDSeries r(ring_, ctx_, dim_);
  for (const auto& [idx, v] : terms_) r.add_term(idx, m * coeff(idx));
  return r;
}

PDSeries PDSeries::right_mul(const PadicMatrix& m) const {
  PDSeries r(ring_, ctx_, dim_);
  for (const auto& [idx, v] : terms_) r.add_term(idx, coeff(idx) * m);
  return r;
}

PDSeries PDSeries::change_prec(int m) const {
  PDSeries r(ring_, ctx_.with_prec(m), dim_);
  for (const auto& [idx, v] : terms_) r.add_term(idx, v);
  return r;
}

PDSeries PDSeries::filtered(const std::function<bool(const MultiIndex&)>& pred) const {
  PDSeries r(ring_, ctx_, dim_);
  for (const auto& [idx, v] : terms_)
    if (pred(idx)) r.terms_.emplace(idx, v);
  return r;
}

bool PDSeries::operator==(const PDSeries& o) const {
  return same_ring(ring_, o.ring_) && ctx_ == o.ctx_ && dim_ == o.dim_ && terms_ == o.terms_;
}

std::string PDSeries::index_str(const MultiIndex& idx) const {
  std::string s;
  for (int i = 0; i < ring_->size(); ++i) {
    if (!idx[i]) continue;
    if (!s.empty()) s += '*';
    const auto& v = ring_->var(i);
    s += v.name;
    if (v.kind == VarKind::pd)
      s += "^[" + std::to_string(idx[i]) + "]";
    else if (idx[i] != 1)
      s += "^" + std::to_string(idx[i]);
  }
  return s.empty() ? "1" : s;
}

std::string PDSeries::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [idx, v] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << (dim_ == 1 ? std::to_string(v[0]) : coeff(idx).str()) << '*' << index_str(idx);
  }
  if (first) os << '0';
  return os.str();
}

PDSeries pd_multiply(const PDSeries& f, const PDSeries& g) {
  check_compatible(f, g, true);
  const RingSpec& ring = *f.ring();
  const PrecisionContext& c = f.ctx();
  const int d = std::max(f.dim(), g.dim());
  const int order = ring.pd_order();
  const auto binom = binomial_table(c, order);
  std::vector<int> pd_vars;
  for (int i = 0; i < ring.size(); ++i)
    if (ring.var(i).kind == VarKind::pd) pd_vars.push_back(i);

  std::vector<std::pair<int, const std::pair<const MultiIndex, PDSeries::Coeff>*>> gs;
  for (const auto& t : g.terms()) gs.emplace_back(g.pd_degree(t.first), &t);

  std::unordered_map<MultiIndex, PDSeries::Coeff, IndexHash> acc;
  PDSeries out(f.ring(), c, d);
  for (const auto& [ia, ca] : f.terms()) {
    int da = f.pd_degree(ia);
    for (const auto& [db, tb] : gs) {
      if (da + db > order) break;
      const auto& [ib, cb] = *tb;
      MultiIndex idx;
      for (int i = 0; i < kMaxVars; ++i) idx[i] = static_cast<std::int16_t>(ia[i] + ib[i]);
      u64 fac = 1 % c.modulus();
      for (int v : pd_vars)
        if (ia[v] && ib[v]) fac = c.mul(fac, binom[idx[v]][ia[v]]);
      if (!out.normalize(idx, fac)) continue;
      auto [it, fresh] = acc.try_emplace(idx);
      if (fresh) it->second.assign(static_cast<size_t>(d) * d, 0);
      mul_acc(c, it->second, ca, cb, d, fac);
    }
  }
  for (auto& [idx, v] : acc)
    if (!all_zero(v)) out.terms_.emplace(idx, std::move(v));
  return out;
}

std::optional<MultiIndex> first_difference(const PDSeries& a, const PDSeries& b) {
  check_compatible(a, b, false);
  auto ia = a.terms().begin(), ib = b.terms().begin();
  GradedLess less{a.ring().get()};
  while (ia != a.terms().end() || ib != b.terms().end()) {
    if (ib == b.terms().end() || (ia != a.terms().end() && less(ia->first, ib->first)))
      return ia->first;
    if (ia == a.terms().end() || less(ib->first, ia->first)) return ib->first;
    if (ia->second != ib->second) return ia->first;
    ++ia;
    ++ib;
  }
  return std::nullopt;
}

namespace {

// Ordinary powers g^0..g^n.
std::vector<PDSeries> ordinary_powers(const PDSeries& g, int n) {
  std::vector<PDSeries> pw;
  pw.push_back(PDSeries::identity(g.ring(), g.ctx(), 1));
  for (int k = 1; k <= n; ++k) pw.push_back(pw.back() * g);
  return pw;
}

// Divided powers g^[0]..g^[n]: g^k is formed at raised precision, then
// divided by k! with an integrality audit.
std::vector<PDSeries> divided_powers(const std::string& var, const PDSeries& g, int n) {
  const PrecisionContext& c = g.ctx();
  const u64 p = c.p();
  const int extra = factorial_valuation(p, static_cast<u64>(n));
  PrecisionContext wide = c.widened(extra);
  PDSeries gw(g.ring(), wide, 1);
  for (const auto& [idx, v] : g.terms()) gw.add_term(idx, v);

  std::vector<PDSeries> out;
  out.push_back(PDSeries::identity(g.ring(), c, 1));
  PDSeries pw = PDSeries::identity(g.ring(), wide, 1);
  u64 unit_fact = 1;
  int vfact = 0;
  for (int k = 1; k <= n; ++k) {
    pw = pw * gw;
    u64 kk = static_cast<u64>(k);
    while (kk % p == 0) {
      kk /= p;
      ++vfact;
    }
    unit_fact = c.mul(unit_fact, kk % c.modulus());
    u64 uinv = c.inv(unit_fact);
    PDSeries q(g.ring(), c, 1);
    for (const auto& [idx, v] : pw.terms()) {
      if (wide.val(v[0]) < vfact) throw IntegralityFailure(var, k);
      u64 r = wide.shift_down(v[0], vfact) % c.modulus();
      q.add_term(idx, PDSeries::Coeff{c.mul(r, uinv)});
    }
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace

PDSeries pd_substitute(const PDSeries& f, const Substitution& s) {
  const RingSpec& src = *f.ring();
  const PrecisionContext& c = f.ctx();
  const int n = src.size();

  std::vector<int> hi(n, 0), lo(n, 0);
  for (const auto& [idx, v] : f.terms())
    for (int i = 0; i < n; ++i) {
      hi[i] = std::max<int>(hi[i], idx[i]);
      lo[i] = std::min<int>(lo[i], idx[i]);
    }
  for (const auto& [name, img] : s.images) {
    if (!src.find(name)) throw InputError("substitution names unknown variable '" + name + "'");
    if (!same_ring(img.ring(), s.target))
      throw ContextMismatch("image of '" + name + "' is not in the target ring");
    if (!(img.ctx() == c)) throw ContextMismatch("image of '" + name + "' has other precision");
    if (img.dim() != 1) throw InputError("image of '" + name + "' must be scalar");
  }

  // pos[i][e] = image^(e) (divided for pd variables); neg[i][e] = image^(-e).
  std::vector<std::vector<PDSeries>> pos(n), neg(n);
  for (int i = 0; i < n; ++i) {
    if (hi[i] == 0 && lo[i] == 0) continue;
    const VarSpec& v = src.var(i);
    auto it = s.images.find(v.name);
    PDSeries img = it != s.images.end() ? it->second : PDSeries(s.target, c, 1);
    if (it == s.images.end()) {
      auto j = s.target->find(v.name);
      if (!j) throw InputError("no image for variable '" + v.name + "'");
      if (s.target->var(*j).kind != v.kind)
        throw InputError("implicit image of '" + v.name + "' changes its kind");
      img = PDSeries::variable(s.target, c, v.name);
    }
    if (v.kind == VarKind::pd) {
      if (!img.constant_term().is_zero())
        throw NonTopologicallyNilpotentSubstitution("image of '" + v.name +
                                                    "' has a nonzero constant term");
      pos[i] = divided_powers(v.name, img, hi[i]);
    } else {
      pos[i] = ordinary_powers(img, hi[i]);
    }
    if (lo[i] < 0) {
      if (img.size() != 1) throw InputError("negative powers need a monomial image for " + v.name);
      auto [midx, mc] = *img.terms().begin();
      if (mc[0] % c.p() == 0) throw NonUnitInverse("image of '" + v.name + "' is not a unit");
      MultiIndex inv{};
      for (int j = 0; j < s.target->size(); ++j) {
        if (!midx[j]) continue;
        if (s.target->var(j).kind != VarKind::laurent)
          throw InputError("image of '" + v.name + "' is not invertible in the target ring");
        inv[j] = static_cast<std::int16_t>(-midx[j]);
      }
      PDSeries ii(s.target, c, 1);
      ii.add_term(inv, PDSeries::Coeff{c.inv(mc[0])});
      neg[i] = ordinary_powers(ii, -lo[i]);
    }
  }

  // Cache partial products over prefixes of the variable list.
  std::vector<std::map<MultiIndex, PDSeries>> cache(n + 1);
  std::function<const PDSeries&(const MultiIndex&, int)> prefix =
      [&](const MultiIndex& idx, int k) -> const PDSeries& {
    MultiIndex key{};
    for (int i = 0; i < k; ++i) key[i] = idx[i];
    auto it = cache[k].find(key);
    if (it != cache[k].end()) return it->second;
    if (k == 0) return cache[0].emplace(key, PDSeries::identity(s.target, c, 1)).first->second;
    const PDSeries& before = prefix(idx, k - 1);
    int e = idx[k - 1];
    if (e == 0) return cache[k].emplace(key, before).first->second;
    const PDSeries& factor = e > 0 ? pos[k - 1][e] : neg[k - 1][-e];
    return cache[k].emplace(key, before * factor).first->second;
  };

  PDSeries out(s.target, c, f.dim());
  for (const auto& [idx, v] : f.terms()) {
    const PDSeries& img = prefix(idx, n);
    for (const auto& [j, sc] : img.terms()) {
      PDSeries::Coeff w(v.size());
      for (size_t q = 0; q < v.size(); ++q) w[q] = c.mul(v[q], sc[0]);
      out.add_term(j, w);
    }
  }
  return out;
}

PDSeries log1p_series(Ring ring, const PrecisionContext& ctx, const std::string& var) {
  const int k = ring->index(var);
  if (ring->var(k).kind != VarKind::pd) throw InputError("log1p needs a divided-power variable");
  if (ring->pd_order() < 1) throw InputError("log1p needs truncation order >= 1");
  PDSeries s(ring, ctx, 1);
  u64 fact = 1 % ctx.modulus();
  for (int i = 1; i <= ring->pd_order(); ++i) {
    if (i > 1) fact = ctx.mul(fact, static_cast<u64>(i - 1) % ctx.modulus());
    MultiIndex idx{};
    idx[k] = static_cast<std::int16_t>(i);
    s.add_term(idx, PDSeries::Coeff{i % 2 ? fact : ctx.neg(fact)});
  }
  return s;
}

PDSeries binomial_power(Ring ring, const std::string& var, const PadicMatrix& n) {
  const int k = ring->index(var);
  if (ring->var(k).kind != VarKind::pd) throw InputError("binomial power needs a pd variable");
  if (!n.square()) throw InputError("exponent matrix must be square");
  const PrecisionContext& c = n.ctx();
  const int d = n.dim();
  PDSeries s(ring, c, d);
  PadicMatrix term = PadicMatrix::identity(c, d);
  for (int i = 0; i <= ring->pd_order(); ++i) {
    if (i > 0) term = term * (n - PadicMatrix::scalar(c, d, i - 1));
    MultiIndex idx{};
    idx[k] = static_cast<std::int16_t>(i);
    s.add_term(idx, term);
  }
  return s;
}

}  // namespace prl
