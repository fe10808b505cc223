#include "prl/semistable.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace prl {

AnnulusModel build_model(int m, u64 p) {
  if (m < 1) throw OutOfRange("annulus depth must be at least 1");
  if (!is_prime(p)) throw InputError("p = " + std::to_string(p) + " is not prime");
  AnnulusModel model{m, p, {}, {}};
  for (int j = 0; j <= m; ++j)
    model.components.push_back(j == 0 || j == m ? ComponentKind::affine_line : ComponentKind::projective_line);
  for (int j = 0; j < m; ++j) model.edges.emplace_back(j, j + 1);
  return model;
}

std::string target_str(const SpecTarget& t) {
  if (t.kind == SpecTarget::Kind::node)
    return "node(" + std::to_string(t.j) + "," + std::to_string(t.j + 1) + ")";
  return "smooth(C" + std::to_string(t.j) + ", " + (t.residue ? std::to_string(*t.residue) : "generic") + ")";
}

SpecTarget specialize(const AnnulusModel& model, const Rational& v, Residue residue) {
  if (v < 0 || v > model.m) throw OutOfRange("valuation " + rational_str(v) + " outside [0, m]");
  if (residue && (*residue == 0 || *residue >= model.p))
    throw OutOfRange("residue " + std::to_string(*residue) + " is not a nonzero class mod p");
  i64 j = floor_rational(v);
  if (v.denominator() == 1) return {SpecTarget::Kind::smooth, static_cast<int>(j), residue};
  return {SpecTarget::Kind::node, static_cast<int>(j), std::nullopt};
}

std::vector<DiscPoint> shilov_points(const AnnulusModel& model, const PrecisionContext& ctx) {
  if (model.m < 1) throw OutOfRange("annulus depth must be at least 1");
  if (ctx.p() != model.p) throw ConfigMismatch("model and context disagree on p");
  std::vector<DiscPoint> out;
  for (int j = 0; j <= model.m; ++j) out.push_back(TypeII{PadicScalar(ctx), j});
  return out;
}

std::function<bool(const Rational&, Residue)> smooth_boundary_of(const AnnulusModel& model, int j) {
  if (j < 0 || j > model.m) throw OutOfRange("component index " + std::to_string(j) + " out of range");
  return [model, j](const Rational& v, Residue r) {
    SpecTarget t = specialize(model, v, r);
    return t.kind == SpecTarget::Kind::smooth && t.j == j;
  };
}

void validate(const DualGraphMap& f) {
  size_t n = f.verdicts.size();
  if (f.names.size() != n || f.image.size() != n)
    throw MalformedSpec("names, verdicts and images must have one entry per component");
  for (auto [a, b] : f.nodes)
    if (a < 0 || b < 0 || static_cast<size_t>(a) >= n || static_cast<size_t>(b) >= n || a == b)
      throw MalformedSpec("node (" + std::to_string(a) + "," + std::to_string(b) + ") is not between two components");
  for (size_t i = 0; i < n; ++i)
    if (f.verdicts[i] == ComponentVerdict::finite && (f.image[i] < 0 || f.image[i] >= f.target_components))
      throw MalformedSpec("finite component " + f.names[i] + " has no target component");
}

Partition contracting_partition(const DualGraphMap& f) {
  validate(f);
  Partition out;
  for (int i = 0; i < static_cast<int>(f.verdicts.size()); ++i)
    (f.verdicts[i] == ComponentVerdict::contracted ? out.contracting : out.non_contracting).push_back(i);
  return out;
}

std::string fiber_class_name(FiberClass c) {
  switch (c) {
    case FiberClass::good: return "good";
    case FiberClass::finite_singular: return "finite_singular";
    case FiberClass::degenerate: return "degenerate";
  }
  return "";
}

FiberClass fiber_point_class(const DualGraphMap& f, const SourcePoint& v) {
  validate(f);
  const auto& c = v.components;
  int n = static_cast<int>(f.verdicts.size());
  if (c.empty() || c.size() > 2) throw MalformedSpec("a closed point lies on one component or on two branches");
  for (int i : c)
    if (i < 0 || i >= n) throw MalformedSpec("component " + std::to_string(i) + " out of range");
  if (c.size() == 2) {
    auto is_node = [&](std::pair<int, int> e) {
      return (e.first == c[0] && e.second == c[1]) || (e.first == c[1] && e.second == c[0]);
    };
    if (std::none_of(f.nodes.begin(), f.nodes.end(), is_node))
      throw MalformedSpec("components " + std::to_string(c[0]) + " and " + std::to_string(c[1]) + " do not meet");
  }
  for (int i : c)
    if (f.verdicts[i] == ComponentVerdict::contracted) return FiberClass::degenerate;
  return c.size() == 2 ? FiberClass::finite_singular : FiberClass::good;
}

std::set<int> linkage_propagation(const std::vector<ComponentVerdict>& verdicts,
                                  const std::vector<std::pair<int, int>>& links, const std::set<int>& seeds) {
  int n = static_cast<int>(verdicts.size());
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : links) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw MalformedSpec("link endpoint out of range");
    if (verdicts[a] == ComponentVerdict::contracted || verdicts[b] == ComponentVerdict::contracted)
      throw PreconditionFailed("links join finite components only");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::set<int> out;
  std::deque<int> queue;
  for (int s : seeds) {
    if (s < 0 || s >= n) throw MalformedSpec("seed out of range");
    if (verdicts[s] == ComponentVerdict::contracted)
      throw SeedNotFinite("seed " + std::to_string(s) + " lies on a contracted component");
    if (out.insert(s).second) queue.push_back(s);
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int w : adj[u])
      if (out.insert(w).second) queue.push_back(w);
  }
  return out;
}

std::string to_dot(const AnnulusModel& model) {
  std::ostringstream os;
  os << "graph annulus_m" << model.m << " {\n  rankdir=LR;\n";
  for (int j = 0; j <= model.m; ++j)
    os << "  C" << j << " [label=\"C" << j << "\\n"
       << (model.components[j] == ComponentKind::affine_line ? "A1" : "P1") << "\"];\n";
  for (auto [a, b] : model.edges) os << "  C" << a << " -- C" << b << ";\n";
  os << "}\n";
  return os.str();
}

std::string to_dot(const DualGraphMap& f) {
  validate(f);
  std::ostringstream os;
  os << "graph dual {\n";
  for (size_t i = 0; i < f.names.size(); ++i) {
    os << "  Z" << i << " [label=\"" << f.names[i] << "\"";
    if (f.verdicts[i] == ComponentVerdict::contracted) os << ", shape=box, style=dashed";
    os << "];\n";
  }
  for (auto [a, b] : f.nodes) os << "  Z" << a << " -- Z" << b << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace prl
