#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "prl/adic_points.hpp"

namespace prl {

enum class ComponentKind { affine_line, projective_line };

// Chain C_0 - C_1 - ... - C_m; C_j carries the circle |z| = p^{-j}.
struct AnnulusModel {
  int m;
  u64 p;
  std::vector<ComponentKind> components;
  std::vector<std::pair<int, int>> edges;
};

AnnulusModel build_model(int m, u64 p);

// nullopt stands for the generic point of a component.
using Residue = std::optional<u64>;

struct SpecTarget {
  enum class Kind { smooth, node };
  Kind kind;
  int j;  // component, or the lower end of the edge (j, j+1)
  Residue residue;
  bool operator==(const SpecTarget&) const = default;
};

std::string target_str(const SpecTarget& t);

SpecTarget specialize(const AnnulusModel& model, const Rational& v, Residue residue);
std::vector<DiscPoint> shilov_points(const AnnulusModel& model, const PrecisionContext& ctx);
std::function<bool(const Rational&, Residue)> smooth_boundary_of(const AnnulusModel& model, int j);

enum class ComponentVerdict { finite, contracted };

// Source side of a map of special fibers: components with their verdicts and
// the nodes between them.  image[i] is the target component of a finite
// component, or the target point a contracted one collapses to.
struct DualGraphMap {
  std::vector<std::string> names;
  std::vector<ComponentVerdict> verdicts;
  std::vector<std::pair<int, int>> nodes;
  int target_components = 0;
  std::vector<int> image;
};

void validate(const DualGraphMap& f);

struct Partition {
  std::vector<int> contracting, non_contracting;
};
Partition contracting_partition(const DualGraphMap& f);

// A closed point of the source: one component for a smooth point, the two
// branches for a node.
struct SourcePoint {
  std::vector<int> components;
};

enum class FiberClass { good, finite_singular, degenerate };
std::string fiber_class_name(FiberClass c);
FiberClass fiber_point_class(const DualGraphMap& f, const SourcePoint& v);

std::set<int> linkage_propagation(const std::vector<ComponentVerdict>& verdicts,
                                  const std::vector<std::pair<int, int>>& links, const std::set<int>& seeds);

std::string to_dot(const AnnulusModel& model);
std::string to_dot(const DualGraphMap& f);

}  // namespace prl
