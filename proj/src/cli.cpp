#include "prl/cli.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "prl/adic_points.hpp"
#include "prl/dodging.hpp"
#include "prl/line_node.hpp"
#include "prl/log_connection.hpp"
#include "prl/log_point.hpp"
#include "prl/semistable.hpp"

namespace prl::cli {

namespace {

std::string escape_token(const std::string& k) {
  std::string out;
  for (char ch : k) {
    if (ch == '~')
      out += "~0";
    else if (ch == '/')
      out += "~1";
    else
      out += ch;
  }
  return out;
}

// A position in the task document; every accessor reports failures at its pointer.
class Node {
 public:
  Node(const json& j, std::string ptr) : j_(&j), ptr_(std::move(ptr)) {}

  const std::string& ptr() const { return ptr_; }
  const json& raw() const { return *j_; }
  [[noreturn]] void fail(const std::string& what) const { throw SchemaError(ptr_, what); }

  bool has(const std::string& k) const { return j_->is_object() && j_->contains(k); }
  Node at(const std::string& k) const {
    if (!j_->is_object()) fail("expected an object");
    auto it = j_->find(k);
    if (it == j_->end()) throw SchemaError(ptr_ + "/" + escape_token(k), "missing field");
    return Node(*it, ptr_ + "/" + escape_token(k));
  }
  std::optional<Node> opt(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    return at(k);
  }

  std::vector<Node> items() const {
    if (!j_->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (size_t i = 0; i < j_->size(); ++i) out.emplace_back((*j_)[i], ptr_ + "/" + std::to_string(i));
    return out;
  }
  std::vector<std::pair<std::string, Node>> fields() const {
    if (!j_->is_object()) fail("expected an object");
    std::vector<std::pair<std::string, Node>> out;
    for (auto it = j_->begin(); it != j_->end(); ++it)
      out.emplace_back(it.key(), Node(it.value(), ptr_ + "/" + escape_token(it.key())));
    return out;
  }

  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  bool boolean() const {
    if (!j_->is_boolean()) fail("expected a boolean");
    return j_->get<bool>();
  }
  i64 integer() const {
    std::string s = str();
    size_t pos = 0;
    i64 v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::logic_error&) {
      fail("malformed integer '" + s + "'");
    }
    if (pos != s.size() || s.empty()) fail("malformed integer '" + s + "'");
    return v;
  }
  int bounded(i64 lo, i64 hi) const {
    i64 v = integer();
    if (v < lo || v > hi) fail("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
  }
  Rational rational() const {
    std::string s = str();
    try {
      return parse_rational(s);
    } catch (const std::exception&) {
      fail("malformed exponent '" + s + "'");
    }
  }

 private:
  const json* j_;
  std::string ptr_;
};

// Integers, or a/b with b a unit.
PadicScalar scalar(const Node& n, const PrecisionContext& ctx) {
  std::string s = n.str();
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return PadicScalar::parse(ctx, s);
    PadicScalar num = PadicScalar::parse(ctx, s.substr(0, slash));
    PadicScalar den = PadicScalar::parse(ctx, s.substr(slash + 1));
    if (!den.is_unit()) n.fail("denominator of '" + s + "' is not a unit");
    return num * den.inv();
  } catch (const SchemaError&) {
    throw;
  } catch (const InputError& e) {
    n.fail(e.what());
  }
}

PadicMatrix matrix(const Node& n, const PrecisionContext& ctx) {
  auto rows = n.items();
  if (rows.empty()) n.fail("matrix has no rows");
  size_t cols = rows[0].items().size();
  if (cols == 0) n.fail("matrix has no columns");
  PadicMatrix m(ctx, static_cast<int>(rows.size()), static_cast<int>(cols));
  for (size_t i = 0; i < rows.size(); ++i) {
    auto row = rows[i].items();
    if (row.size() != cols) rows[i].fail("row length differs from the first row");
    for (size_t j = 0; j < cols; ++j) m.set(static_cast<int>(i), static_cast<int>(j), scalar(row[j], ctx));
  }
  return m;
}

PadicMatrix square_matrix(const Node& n, const PrecisionContext& ctx) {
  PadicMatrix m = matrix(n, ctx);
  if (!m.square()) n.fail("expected a square matrix");
  return m;
}

json matrix_json(const PadicMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(std::to_string(m.at(i, j)));
    rows.push_back(row);
  }
  return rows;
}

PDSeries series(const Node& n, const Ring& ring, const PrecisionContext& ctx) {
  int dim = n.at("dim").bounded(1, 16);
  PDSeries s(ring, ctx, dim);
  if (auto terms = n.opt("terms")) {
    for (const Node& t : terms->items()) {
      MultiIndex idx{};
      if (auto ex = t.opt("exps")) {
        for (const auto& [name, e] : ex->fields()) {
          auto v = ring->find(name);
          if (!v) e.fail("ring has no variable '" + name + "'");
          idx[*v] = static_cast<std::int16_t>(e.bounded(-64, 64));
        }
      }
      Node cn = t.at("coeff");
      PadicMatrix c = matrix(cn, ctx);
      if (c.rows() != dim || c.cols() != dim) cn.fail("coefficient shape differs from dim");
      try {
        s.add_term(idx, c);
      } catch (const InputError& e) {
        t.fail(e.what());
      }
    }
  }
  return s;
}

json series_json(const PDSeries& s) {
  json terms = json::array();
  const RingSpec& r = *s.ring();
  for (const auto& [idx, coeff] : s.terms()) {
    json exps = json::object();
    for (int i = 0; i < r.size(); ++i)
      if (idx[i] != 0) exps[r.var(i).name] = std::to_string(idx[i]);
    terms.push_back({{"exps", exps}, {"coeff", matrix_json(s.coeff(idx))}});
  }
  return {{"dim", std::to_string(s.dim())}, {"terms", terms}};
}

std::vector<GaugeFactor> gauge(const Node& n) {
  std::vector<GaugeFactor> g;
  for (const Node& f : n.items()) {
    GaugeFactor x;
    x.i = f.at("i").bounded(0, 15);
    x.j = f.at("j").bounded(0, 15);
    x.c = f.at("c").integer();
    x.a = f.has("a") ? f.at("a").bounded(0, 16) : 0;
    x.b = f.has("b") ? f.at("b").bounded(0, 16) : 0;
    g.push_back(x);
  }
  return g;
}

Disc disc(const Node& n, const PrecisionContext& ctx) { return {scalar(n.at("center"), ctx), n.at("v").rational()}; }

std::vector<Disc> discs(const Node& n, const PrecisionContext& ctx) {
  std::vector<Disc> out;
  for (const Node& d : n.items()) out.push_back(disc(d, ctx));
  return out;
}

DiscPoint point(const Node& n, const PrecisionContext& ctx) {
  PointSpec s;
  if (auto c = n.opt("center")) s.center = scalar(*c, ctx);
  if (auto r = n.opt("radius")) {
    std::string k = r->str();
    if (k == "zero")
      s.radius = PointSpec::Radius::zero;
    else if (k == "rational")
      s.radius = PointSpec::Radius::rational;
    else if (k == "irrational")
      s.radius = PointSpec::Radius::irrational;
    else if (k != "none")
      r->fail("radius must be zero, rational, irrational or none");
  }
  if (auto v = n.opt("v")) s.v = v->rational();
  if (auto v = n.opt("lo")) s.lo = v->rational();
  if (auto v = n.opt("hi")) s.hi = v->rational();
  if (auto v = n.opt("prefix")) s.prefix = discs(*v, ctx);
  if (auto v = n.opt("certified")) s.certified = v->boolean();
  if (auto v = n.opt("side")) {
    std::string k = v->str();
    if (k != "inner" && k != "outer") v->fail("side must be inner or outer");
    s.side = k == "inner" ? Side::inner : Side::outer;
  }
  if (auto v = n.opt("beta")) s.beta = scalar(*v, ctx);
  try {
    return classify(s);
  } catch (const MalformedSpec& e) {
    n.fail(e.what());
  }
}

json point_json(const DiscPoint& x) { return {{"kind", kind_name(kind_of(x))}, {"point", point_str(x)}}; }

LaurentFunction laurent_function(const Node& n, const PrecisionContext& ctx) {
  if (auto poly = n.opt("poly")) {
    LaurentFunction f(ctx, PadicScalar(ctx));
    int i = 0;
    for (const Node& a : poly->items()) f.set(i++, scalar(a, ctx));
    return f;
  }
  PadicScalar center = n.has("center") ? scalar(n.at("center"), ctx) : PadicScalar(ctx);
  std::map<int, PadicScalar> coeffs;
  for (const auto& [k, a] : n.at("coeffs").fields()) {
    size_t pos = 0;
    int e = 0;
    try {
      e = std::stoi(k, &pos);
    } catch (const std::logic_error&) {
      a.fail("exponent key '" + k + "' is not an integer");
    }
    if (pos != k.size()) a.fail("exponent key '" + k + "' is not an integer");
    coeffs.emplace(e, scalar(a, ctx));
  }
  return LaurentFunction(center, coeffs);
}

CoordMap coord_map(const Node& n, const PrecisionContext& ctx) {
  Node kn = n.at("kind");
  std::string k = kn.str();
  CoordMap m = [&]() -> CoordMap {
    if (k == "mobius")
      return Mobius{scalar(n.at("a"), ctx), scalar(n.at("b"), ctx), scalar(n.at("c"), ctx), scalar(n.at("d"), ctx)};
    if (k == "hn") return PolyHn{n.at("n").bounded(1, 64), scalar(n.at("a"), ctx)};
    if (k == "hn_prime") return PolyHnPrime{n.at("n").bounded(1, 64), scalar(n.at("a"), ctx)};
    kn.fail("map kind must be mobius, hn or hn_prime");
  }();
  try {
    validate(m);
  } catch (const MalformedSpec& e) {
    n.fail(e.what());
  }
  return m;
}

NeighborhoodSpec neighborhood(const Node& n, const PrecisionContext& ctx) {
  static const std::map<std::string, NbhdCase> kinds{{"typeII", NbhdCase::typeII},
                                                     {"typeIII", NbhdCase::typeIII},
                                                     {"typeIV", NbhdCase::typeIV},
                                                     {"typeV_inner", NbhdCase::typeV_inner},
                                                     {"typeV_outer", NbhdCase::typeV_outer}};
  Node kn = n.at("kind");
  auto it = kinds.find(kn.str());
  if (it == kinds.end()) kn.fail("unknown neighborhood kind");
  NeighborhoodSpec u;
  u.kind = it->second;
  if (auto v = n.opt("v_min")) u.v_min = v->rational();
  if (auto v = n.opt("v_max")) u.v_max = v->rational();
  if (auto v = n.opt("prefix")) u.prefix = discs(*v, ctx);
  if (auto v = n.opt("removed")) u.removed = discs(*v, ctx);
  if (auto v = n.opt("direction")) u.direction = scalar(*v, ctx);
  return u;
}

ComponentVerdict component_verdict(const Node& n) {
  std::string s = n.str();
  if (s == "finite") return ComponentVerdict::finite;
  if (s == "contracted") return ComponentVerdict::contracted;
  n.fail("verdict must be finite or contracted");
}

std::vector<std::pair<int, int>> pairs(const Node& n) {
  std::vector<std::pair<int, int>> out;
  for (const Node& e : n.items()) {
    auto ab = e.items();
    if (ab.size() != 2) e.fail("expected a pair");
    out.emplace_back(ab[0].bounded(0, 1 << 20), ab[1].bounded(0, 1 << 20));
  }
  return out;
}

DualGraphMap dual_graph(const Node& n) {
  DualGraphMap f;
  for (const Node& s : n.at("names").items()) f.names.push_back(s.str());
  for (const Node& s : n.at("verdicts").items()) f.verdicts.push_back(component_verdict(s));
  if (auto v = n.opt("nodes")) f.nodes = pairs(*v);
  f.target_components = n.at("target_components").bounded(0, 1 << 20);
  for (const Node& s : n.at("image").items()) f.image.push_back(s.bounded(0, 1 << 20));
  try {
    validate(f);
  } catch (const MalformedSpec& e) {
    n.fail(e.what());
  }
  return f;
}

LaurentMatrix laurent_matrix(const Node& n, const PrecisionContext& ctx, int& dim) {
  LaurentMatrix out;
  dim = 0;
  for (const auto& [k, m] : n.fields()) {
    size_t pos = 0;
    int e = 0;
    try {
      e = std::stoi(k, &pos);
    } catch (const std::logic_error&) {
      m.fail("exponent key '" + k + "' is not an integer");
    }
    if (pos != k.size()) m.fail("exponent key '" + k + "' is not an integer");
    PadicMatrix a = square_matrix(m, ctx);
    if (dim && a.dim() != dim) m.fail("all coefficients need the same size");
    dim = a.dim();
    out = laurent_add(out, {{e, a}});
  }
  if (!dim) n.fail("connection matrix has no coefficients; give one zero matrix for A = 0");
  return out;
}

json laurent_json(const LaurentMatrix& a) {
  json out = json::object();
  for (const auto& [k, m] : a) out[std::to_string(k)] = matrix_json(m);
  return out;
}

json verdict_json(const Verdict& v) {
  json out{{"verdict", v.ok ? "ok" : "fail"}, {"precision", v.precision}};
  if (!v.ok) out["failing"] = v.failing;
  return out;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

json rationals_json(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& r : v) out.push_back(rational_str(r));
  return out;
}

json ints_json(const std::vector<int>& v) {
  json out = json::array();
  for (int x : v) out.push_back(std::to_string(x));
  return out;
}

template <class C>
json int_set_json(const C& v) {
  json out = json::array();
  for (int x : v) out.push_back(std::to_string(x));
  return out;
}

inline constexpr int kDefaultOrder = 8;

struct Settings {
  PrecisionContext ctx;
  int order;
  int window;
  bool capped = false;
};

std::map<std::string, std::string> parse_override(const std::string& s) {
  std::map<std::string, std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw SchemaError("--precision", "expected key=value, got '" + item + "'");
    std::string key = item.substr(0, eq);
    if (key != "p" && key != "M" && key != "D") throw SchemaError("--precision", "unknown key '" + key + "'");
    out[key] = item.substr(eq + 1);
  }
  return out;
}

Settings settings(const Node& task, const Options& opts) {
  Node prec = task.at("precision");
  json merged = prec.raw();
  if (!merged.is_object()) prec.fail("expected an object");
  if (opts.precision) {
    auto o = parse_override(*opts.precision);
    if (o.count("p")) merged["p"] = o["p"];
    if (o.count("M")) merged["abs_prec"] = o["M"];
    if (o.count("D")) {
      if (!merged.contains("truncations") || !merged["truncations"].is_object()) merged["truncations"] = json::object();
      merged["truncations"]["order"] = o["D"];
      merged["truncations"]["window"] = o["D"];
    }
  }
  Node n(merged, "/precision");
  Node pn = n.at("p");
  i64 p = pn.integer();
  if (p < 2 || !is_prime(static_cast<u64>(p))) pn.fail("p must be a prime");
  Node mn = n.at("abs_prec");
  int m = mn.bounded(1, 62);
  std::optional<PrecisionContext> ctx;
  try {
    ctx.emplace(static_cast<u64>(p), m);
  } catch (const InputError& e) {
    mn.fail(e.what());
  }
  Settings s{*ctx, kDefaultOrder, kDefaultWindow};
  if (auto t = n.opt("truncations")) {
    if (auto o = t->opt("order")) s.order = o->bounded(0, 64);
    if (auto w = t->opt("window")) s.window = w->bounded(0, 256);
  }
  if (opts.max_trunc) {
    if (s.order > *opts.max_trunc) s.order = *opts.max_trunc, s.capped = true;
    if (s.window > *opts.max_trunc) s.window = *opts.max_trunc, s.capped = true;
  }
  return s;
}

struct Task {
  Node params;
  Settings set;
  const Options& opts;
  std::string dot;
  const PrecisionContext& ctx() const { return set.ctx; }
  std::string mod() const { return "mod p^" + std::to_string(set.ctx.abs_prec()); }
  std::string series_precision() const { return precision_statement(set.ctx, set.order); }
};

using Handler = std::function<json(Task&)>;

LogPointDatum log_point_datum(const Task& t) {
  std::optional<PadicMatrix> phi;
  if (auto f = t.params.opt("phi")) phi = square_matrix(*f, t.ctx());
  if (auto T = t.params.opt("T")) return LogPointDatum(series(*T, pd_ring({"t"}, t.set.order), t.ctx()), phi);
  LogPointDatum d = from_monodromy(square_matrix(t.params.at("N"), t.ctx()), t.set.order);
  d.phi = phi;
  return d;
}

NodeDescentDatum node_datum(const Task& t) {
  if (auto T = t.params.opt("T")) return NodeDescentDatum(series(*T, node_ring(t.set.order), t.ctx()));
  std::vector<GaugeFactor> g;
  if (auto gn = t.params.opt("gauge")) g = gauge(*gn);
  return node_gauge_datum(square_matrix(t.params.at("N"), t.ctx()), g, t.set.order);
}

AffineDescentDatum affine_datum(const Task& t) {
  if (auto T = t.params.opt("T")) return AffineDescentDatum(series(*T, affine_ring(t.set.order), t.ctx()));
  std::vector<GaugeFactor> g;
  if (auto gn = t.params.opt("gauge")) g = gauge(*gn);
  return affine_gauge_datum(square_matrix(t.params.at("N"), t.ctx()), g, t.set.order);
}

NodeIsocrystalDatum isocrystal_datum(const Task& t) {
  std::string ring = t.params.has("ring") ? t.params.at("ring").str() : "isocrystal";
  if (ring == "node" || !t.params.has("T")) return to_isocrystal(node_datum(t));
  if (ring != "isocrystal") t.params.at("ring").fail("ring must be isocrystal or node");
  return NodeIsocrystalDatum(series(t.params.at("T"), isocrystal_ring(t.set.order), t.ctx()));
}

LogConnection connection(const Task& t) {
  if (auto a = t.params.opt("A")) {
    int d = 0;
    LaurentMatrix m = laurent_matrix(*a, t.ctx(), d);
    return LogConnection{t.ctx(), d, m};
  }
  return connection_from_descent(isocrystal_datum(t));
}

std::vector<u64> alphas(const Task& t, u64 first) {
  if (auto a = t.params.opt("alpha")) return {static_cast<u64>(a->bounded(0, static_cast<i64>(t.ctx().p()) - 1))};
  std::vector<u64> out;
  for (u64 a = first; a < t.ctx().p(); ++a) out.push_back(a);
  return out;
}

int window_of(const Task& t) {
  int w = t.set.window;
  if (auto n = t.params.opt("window")) w = n->bounded(0, 256);
  if (t.opts.max_trunc && w > *t.opts.max_trunc) w = *t.opts.max_trunc;
  return w;
}

AnnulusModel model_of(const Task& t) {
  Node mn = t.params.at("m");
  try {
    return build_model(mn.bounded(1, 4096), t.ctx().p());
  } catch (const OutOfRange& e) {
    mn.fail(e.what());
  }
}

std::vector<PadicScalar> scalars(const Node& n, const PrecisionContext& ctx) {
  std::vector<PadicScalar> out;
  for (const Node& a : n.items()) out.push_back(scalar(a, ctx));
  return out;
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"descent check", [](Task& t) { return verdict_json(cocycle_check(log_point_datum(t))); }},
      {"descent monodromy",
       [](Task& t) {
         return json{{"verdict", "ok"}, {"N", matrix_json(monodromy(log_point_datum(t)))}, {"precision", t.series_precision()}};
       }},
      {"descent from-n",
       [](Task& t) {
         LogPointDatum d = from_monodromy(square_matrix(t.params.at("N"), t.ctx()), t.set.order);
         return json{{"verdict", "ok"}, {"T", series_json(d.T)}, {"precision", t.series_precision()}};
       }},
      {"descent descends",
       [](Task& t) {
         return json{{"verdict", bool_str(descends_to_point(log_point_datum(t)))}, {"precision", t.series_precision()}};
       }},
      {"descent phi",
       [](Task& t) {
         PadicMatrix phi = square_matrix(t.params.at("phi"), t.ctx());
         PadicMatrix n = t.params.has("T") ? monodromy(log_point_datum(t)) : square_matrix(t.params.at("N"), t.ctx());
         return verdict_json(phi_compatibility(PhiNModule(phi, n)));
       }},

      {"node check", [](Task& t) { return verdict_json(node_cocycle_check(node_datum(t))); }},
      {"node branch",
       [](Task& t) {
         int branch = t.params.has("branch") ? t.params.at("branch").bounded(0, 1) : 0;
         BranchDatum b = node_branch_restriction(node_datum(t), branch);
         json mono = json::object();
         for (u64 a : alphas(t, 1)) {
           if (a == 0) t.params.at("alpha").fail("alpha must be nonzero on a branch");
           mono[std::to_string(a)] = matrix_json(branch_monodromy_at(b, a));
         }
         return json{{"verdict", "ok"}, {"branch", std::to_string(branch)}, {"monodromy", mono},
                     {"precision", t.series_precision()}};
       }},
      {"node center",
       [](Task& t) {
         MultiLogPointDatum c = node_center_restriction(node_datum(t));
         json out = verdict_json(multi_cocycle_check(c));
         out["all_directions_trivial"] = bool_str(all_directions_trivial(c));
         if (auto dir = t.params.opt("direction")) {
           std::vector<int> v;
           for (const Node& x : dir->items()) v.push_back(x.bounded(-1000, 1000));
           if (v.size() != 2) dir->fail("direction has two entries");
           out["directional_monodromy"] = matrix_json(directional_monodromy(c, v));
         }
         return out;
       }},
      {"node descends",
       [](Task& t) {
         return json{{"verdict", bool_str(node_descends(node_datum(t)))}, {"precision", t.series_precision()}};
       }},

      {"affine check", [](Task& t) { return verdict_json(affine_cocycle_check(affine_datum(t))); }},
      {"affine monodromy",
       [](Task& t) {
         AffineDescentDatum d = affine_datum(t);
         json mono = json::object();
         for (u64 a : alphas(t, 0)) mono[std::to_string(a)] = matrix_json(monodromy_at_point(d, a));
         return json{{"verdict", "ok"}, {"monodromy", mono}, {"precision", t.series_precision()}};
       }},
      {"affine rigidity",
       [](Task& t) {
         u64 a = t.params.has("alpha") ? static_cast<u64>(t.params.at("alpha").bounded(0, static_cast<i64>(t.ctx().p()) - 1)) : 0;
         RigidityCertificate r = affine_rigidity_witness(affine_datum(t), a);
         json out{{"verdict", r.ok ? "ok" : "fail"}, {"precision", r.precision}};
         if (!r.ok) out["counterexample"] = r.counterexample;
         return out;
       }},

      {"points classify",
       [](Task& t) {
         json out = point_json(point(t.params.at("point"), t.ctx()));
         out["verdict"] = "ok";
         out["precision"] = t.mod();
         return out;
       }},
      {"points gauss-norm",
       [](Task& t) {
         LaurentFunction f = laurent_function(t.params.at("f"), t.ctx());
         PadicScalar c = t.params.has("center") ? scalar(t.params.at("center"), t.ctx()) : f.center();
         return json{{"verdict", "ok"}, {"exponent", gauss_norm(f, c, t.params.at("v").rational()).str()}, {"precision", t.mod()}};
       }},
      {"points spectral-norm",
       [](Task& t) {
         LaurentFunction f = laurent_function(t.params.at("f"), t.ctx());
         ValueExponent e = annulus_spectral_norm(f, t.params.at("v1").rational(), t.params.at("v2").rational());
         return json{{"verdict", "ok"}, {"exponent", e.str()}, {"precision", t.mod()}};
       }},
      {"points specializes",
       [](Task& t) {
         bool s = specializes(point(t.params.at("x"), t.ctx()), point(t.params.at("y"), t.ctx()));
         return json{{"verdict", bool_str(s)}, {"precision", t.mod()}};
       }},
      {"points newton",
       [](Task& t) {
         json segs = json::array();
         for (const auto& s : newton_polygon(scalars(t.params.at("coeffs"), t.ctx())))
           segs.push_back({{"slope", rational_str(s.slope)}, {"length", std::to_string(s.length)}});
         return json{{"verdict", "ok"}, {"segments", segs}, {"precision", t.mod()}};
       }},
      {"points stability",
       [](Task& t) {
         auto b = polygon_stability_bound(scalars(t.params.at("coeffs"), t.ctx()));
         return json{{"verdict", "ok"}, {"bounds", rationals_json(b)}, {"precision", t.mod()}};
       }},

      {"model build",
       [](Task& t) {
         AnnulusModel m = model_of(t);
         json comps = json::array();
         for (auto k : m.components) comps.push_back(k == ComponentKind::affine_line ? "A1" : "P1");
         json edges = json::array();
         for (auto [a, b] : m.edges) edges.push_back({std::to_string(a), std::to_string(b)});
         t.dot = to_dot(m);
         return json{{"verdict", "ok"}, {"m", std::to_string(m.m)}, {"components", comps}, {"edges", edges}, {"precision", "exact"}};
       }},
      {"model specialize",
       [](Task& t) {
         AnnulusModel m = model_of(t);
         Residue r;
         if (auto rn = t.params.opt("residue")) {
           if (rn->str() != "generic") r = static_cast<u64>(rn->bounded(0, static_cast<i64>(t.ctx().p()) - 1));
         }
         Node vn = t.params.at("v");
         std::optional<SpecTarget> target;
         try {
           target = specialize(m, vn.rational(), r);
         } catch (const OutOfRange& e) {
           vn.fail(e.what());
         }
         return json{{"verdict", "ok"}, {"target", target_str(*target)}, {"precision", "exact"}};
       }},
      {"model shilov",
       [](Task& t) {
         json pts = json::array();
         for (const auto& x : shilov_points(model_of(t), t.ctx())) pts.push_back(point_json(x));
         return json{{"verdict", "ok"}, {"points", pts}, {"precision", "exact"}};
       }},
      {"model dot",
       [](Task& t) {
         t.dot = to_dot(model_of(t));
         return json{{"verdict", "ok"}, {"dot", t.dot}, {"precision", "exact"}};
       }},

      {"cover partition",
       [](Task& t) {
         DualGraphMap f = dual_graph(t.params.at("map"));
         Partition p = contracting_partition(f);
         t.dot = to_dot(f);
         return json{{"verdict", "ok"},
                     {"contracting", int_set_json(p.contracting)},
                     {"non_contracting", int_set_json(p.non_contracting)},
                     {"precision", "exact"}};
       }},
      {"cover classify-point",
       [](Task& t) {
         DualGraphMap f = dual_graph(t.params.at("map"));
         SourcePoint v;
         for (const Node& c : t.params.at("components").items()) v.components.push_back(c.bounded(0, 1 << 20));
         t.dot = to_dot(f);
         Node cn = t.params.at("components");
         try {
           return json{{"verdict", "ok"}, {"class", fiber_class_name(fiber_point_class(f, v))}, {"precision", "exact"}};
         } catch (const MalformedSpec& e) {
           cn.fail(e.what());
         }
       }},
      {"cover propagate",
       [](Task& t) {
         std::vector<ComponentVerdict> verdicts;
         for (const Node& v : t.params.at("verdicts").items()) verdicts.push_back(component_verdict(v));
         std::set<int> seeds;
         for (const Node& s : t.params.at("seeds").items()) seeds.insert(s.bounded(0, 1 << 20));
         auto linked = linkage_propagation(verdicts, pairs(t.params.at("links")), seeds);
         return json{{"verdict", "ok"}, {"linked", int_set_json(linked)}, {"precision", "exact"}};
       }},

      {"dodge image",
       [](Task& t) {
         ValueExponent e = image_valuation(coord_map(t.params.at("map"), t.ctx()), point(t.params.at("point"), t.ctx()));
         return json{{"verdict", "ok"}, {"exponent", e.str()}, {"precision", t.mod()}};
       }},
      {"dodge lemma46",
       [](Task& t) {
         NeighborhoodSpec u = neighborhood(t.params.at("neighborhood"), t.ctx());
         PadicScalar s0 = scalar(t.params.at("s0"), t.ctx());
         PadicScalar s1 = t.params.has("s1") ? scalar(t.params.at("s1"), t.ctx()) : PadicScalar(t.ctx());
         int samples = t.params.has("samples") ? t.params.at("samples").bounded(0, 100000) : 50;
         SamplingOptions so;
         if (auto d = t.params.opt("depth")) so.depth = d->bounded(1, 62);
         if (auto s = t.params.opt("seed")) so.seed = static_cast<unsigned long long>(s->integer());
         if (t.opts.seed) so.seed = *t.opts.seed;
         Lemma46Report r = lemma46_verify(u, s0, s1, samples, so);
         json vals = json::array();
         for (const auto& v : r.sample_valuations) vals.push_back(v.str());
         json out{{"verdict", r.ok ? "ok" : "fail"},
                  {"t_prime", map_str(r.t_prime)},
                  {"short_circuit", bool_str(r.short_circuit)},
                  {"shrunk", bool_str(r.shrunk)},
                  {"separation_case", std::to_string(r.separation_case)},
                  {"delta_exponent", rational_str(r.delta_exponent)},
                  {"at_s0", r.at_s0.str()},
                  {"at_s1", r.at_s1.str()},
                  {"sample_valuations", vals},
                  {"depth", std::to_string(r.depth)},
                  {"seed", std::to_string(so.seed)},
                  {"precision", r.precision}};
         if (u.kind == NbhdCase::typeIV) out["prefix_index"] = std::to_string(r.prefix_index);
         if (!r.ok) out["failing"] = r.failing;
         return out;
       }},
      {"dodge hn-exponent",
       [](Task& t) {
         Node mn = t.params.at("map");
         CoordMap m = coord_map(mn, t.ctx());
         if (std::holds_alternative<Mobius>(m)) mn.fail("hn-exponent takes an hn or hn_prime map");
         int order = t.params.has("order") ? t.params.at("order").bounded(1, 64) : t.set.order;
         if (t.opts.max_trunc && order > *t.opts.max_trunc) order = *t.opts.max_trunc;
         return json{{"verdict", "ok"},
                     {"N", std::to_string(hn_integral_exponent(m, order))},
                     {"precision", "exact, to order " + std::to_string(order)}};
       }},
      {"dodge hn-bound",
       [](Task& t) {
         Rational b = hn_uniform_bound(t.params.at("n").bounded(1, 64), t.params.at("val_a").rational(),
                                       t.params.at("val_delta").rational());
         return json{{"verdict", "ok"}, {"bound", rational_str(b)}, {"precision", "exact"}};
       }},

      {"conn build",
       [](Task& t) {
         LogConnection c = connection(t);
         return json{{"verdict", "ok"}, {"d", std::to_string(c.d)}, {"A", laurent_json(c.A)}, {"precision", t.series_precision()}};
       }},
      {"conn residues",
       [](Task& t) {
         Residues r = residues(connection(t));
         return json{{"verdict", "ok"}, {"res_x", matrix_json(r.res_x)}, {"res_y", matrix_json(r.res_y)}, {"precision", t.mod()}};
       }},
      {"conn solve",
       [](Task& t) {
         HorizontalSolutions s = solve_horizontal(connection(t), window_of(t));
         json basis = json::array();
         for (const auto& f : s.basis) basis.push_back(laurent_json(f));
         json out{{"verdict", s.full ? "full" : "partial"},
                  {"window", std::to_string(s.window)},
                  {"basis", basis},
                  {"resonant", ints_json(s.resonant)},
                  {"precision", s.precision}};
         if (!s.full) out["obstruction"] = s.obstruction;
         return out;
       }},
      {"conn trivial",
       [](Task& t) {
         int w = window_of(t);
         bool ok = thin_annulus_trivial(connection(t), w);
         return json{{"verdict", bool_str(ok)},
                     {"precision", t.mod() + ", Laurent window |k| <= " + std::to_string(w)}};
       }},
  };
  return table;
}

std::string error_type(const std::exception& e) {
#define PRL_NAME(T) \
  if (dynamic_cast<const T*>(&e)) return #T;
  PRL_NAME(SchemaError)
  PRL_NAME(NonUnitInverse)
  PRL_NAME(ContextMismatch)
  PRL_NAME(NonTopologicallyNilpotentSubstitution)
  PRL_NAME(CocycleInvalid)
  PRL_NAME(PreconditionFailed)
  PRL_NAME(MalformedSpec)
  PRL_NAME(OutOfRange)
  PRL_NAME(SeedNotFinite)
  PRL_NAME(IndeterminateAtPole)
  PRL_NAME(ConfigMismatch)
  PRL_NAME(SampleExhausted)
  PRL_NAME(NonUnitConstantTerm)
  PRL_NAME(InsufficientPrefix)
  PRL_NAME(IntegralityFailure)
  PRL_NAME(PrecisionInsufficient)
  PRL_NAME(TruncationInsufficient)
  PRL_NAME(InternalConsistency)
  PRL_NAME(InputError)
  PRL_NAME(PrecisionError)
#undef PRL_NAME
  return "InternalError";
}

Outcome failure(int code, const std::exception& e, const std::string& pointer) {
  Outcome out;
  out.exit_code = code;
  out.report = {{"error", {{"type", error_type(e)}, {"message", e.what()}, {"pointer", pointer}}}};
  return out;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : handlers()) out.push_back(k);
  return out;
}

Outcome run_task(const json& doc, const Options& opts) {
  auto start = std::chrono::steady_clock::now();
  try {
    Node task(doc, "");
    if (!doc.is_object()) task.fail("task must be an object");
    Node vn = task.at("version");
    if (vn.str() != "1") vn.fail("unsupported version '" + vn.str() + "'");
    Node cn = task.at("command");
    auto it = handlers().find(cn.str());
    if (it == handlers().end()) cn.fail("unknown command '" + cn.str() + "'");
    Settings set = settings(task, opts);
    json empty = json::object();
    Node params = task.has("params") ? task.at("params") : Node(empty, "/params");
    if (!params.raw().is_object()) params.fail("expected an object");
    Task t{params, set, opts, {}};
    json report = it->second(t);
    report["command"] = cn.str();
    if (set.capped) report["truncation_capped"] = "PRL_MAX_TRUNC=" + std::to_string(*opts.max_trunc);
    if (opts.dot && t.dot.empty()) throw SchemaError("/command", "command '" + cn.str() + "' renders no graph");
    if (opts.timing) {
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", ms);
      report["timing_ms"] = buf;
    }
    return {kExitOk, report, t.dot};
  } catch (const SchemaError& e) {
    return failure(kExitInput, e, e.pointer());
  } catch (const InputError& e) {
    return failure(kExitInput, e, "/params");
  } catch (const PrecisionError& e) {
    return failure(kExitPrecision, e, "/precision");
  } catch (const std::exception& e) {
    return failure(1, e, "");
  }
}

std::string render(const Outcome& out, const Options& opts) {
  if (opts.json) return out.report.dump(2) + "\n";
  if (out.exit_code != kExitOk) {
    const json& e = out.report["error"];
    std::string where = e["pointer"].get<std::string>();
    return "error: " + e["type"].get<std::string>() + (where.empty() ? "" : " at " + where) + ": " +
           e["message"].get<std::string>() + "\n";
  }
  if (opts.dot) return out.dot;
  std::string text;
  for (auto it = out.report.begin(); it != out.report.end(); ++it) {
    if (it.key() == "dot") continue;
    text += it.key() + ": " + (it->is_string() ? it->get<std::string>() : it->dump()) + "\n";
  }
  if (out.report.contains("dot")) text += out.report["dot"].get<std::string>();
  return text;
}

}  // namespace prl::cli
