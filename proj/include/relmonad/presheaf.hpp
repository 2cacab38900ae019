#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "relmonad/fincat.hpp"

namespace relmonad {

/// A finite set with distinct element labels.
struct FinSet {
  std::vector<std::string> labels;
  int size() const { return static_cast<int>(labels.size()); }
};

/// Contravariant finite-set-valued functor on a FinCategory. Elements of each
/// value set are the integers 0..size-1; `act(m)` maps at(tgt m) to at(src m).
class Presheaf {
 public:
  Presheaf(CatPtr base, std::vector<int> sizes, std::vector<std::vector<int>> act);

  const CatPtr& base() const { return base_; }
  int size(ObjId a) const { return sizes_[a]; }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<int>& act(MorId m) const { return act_[m]; }
  int apply(MorId m, int e) const { return act_[m][e]; }
  const std::vector<std::vector<int>>& actions() const { return act_; }
  int total_size() const;

  /// Content key, equal for structurally equal presheaves on the same base.
  const std::string& key() const { return key_; }

  bool operator==(const Presheaf& other) const;

 private:
  CatPtr base_;
  std::vector<int> sizes_;
  std::vector<std::vector<int>> act_;
  std::string key_;
};

using PshPtr = std::shared_ptr<const Presheaf>;

/// Empty string when act(id) = id and act(g∘f) = act(f)∘act(g) everywhere;
/// otherwise the first violation with its witnesses.
std::string validate_presheaf(const Presheaf& p);

/// Natural family of functions between two presheaves on the same base.
class PresheafMorphism {
 public:
  PresheafMorphism(PshPtr src, PshPtr dst, std::vector<std::vector<int>> components);

  const PshPtr& src() const { return src_; }
  const PshPtr& dst() const { return dst_; }
  const std::vector<int>& at(ObjId a) const { return components_[a]; }
  int apply(ObjId a, int e) const { return components_[a][e]; }
  const std::vector<std::vector<int>>& components() const { return components_; }
  const std::string& key() const { return key_; }

  bool operator==(const PresheafMorphism& other) const;

 private:
  PshPtr src_;
  PshPtr dst_;
  std::vector<std::vector<int>> components_;
  std::string key_;
};

using PshMorPtr = std::shared_ptr<const PresheafMorphism>;

std::string validate_presheaf_morphism(const PresheafMorphism& m);
bool is_bijective(const PresheafMorphism& m);

PshMorPtr identity_morphism(const PshPtr& p);
/// g∘f; throws TypeMismatch unless f.dst equals g.src.
PshMorPtr compose(const PresheafMorphism& g, const PresheafMorphism& f);
/// Pointwise inverse; throws Error if some component is not a bijection.
PshMorPtr inverse(const PresheafMorphism& m);

PshPtr representable(const CatPtr& c, ObjId a);
PshMorPtr yoneda_action(const CatPtr& c, MorId f);
PshPtr empty_presheaf(const CatPtr& c);
PshPtr terminal_presheaf(const CatPtr& c);
PshPtr coproduct(const PshPtr& p, const PshPtr& q);

/// Quotient of `p` by the smallest congruence identifying each listed pair
/// (object, element, element). Classes are numbered by least member.
PshPtr quotient_presheaf(const PshPtr& p, const std::vector<std::tuple<ObjId, int, int>>& merges);

/// Diagram of finite sets on a directed multigraph. Colimits only depend on
/// the generated equivalence, so no composition data is needed.
struct SetDiagram {
  struct Arrow {
    int src = 0;
    int dst = 0;
    std::vector<int> map;
  };
  std::vector<int> sizes;
  std::vector<Arrow> arrows;
};

/// Quotient of the disjoint union. Each class is represented by its least
/// (node, element) pair and classes are numbered in order of representatives.
struct Colimit {
  int size = 0;
  std::vector<int> offset;    // node -> first flat index
  std::vector<int> class_of;  // flat index -> class
  std::vector<std::pair<int, int>> representative;
  int coprojection(int node, int elem) const { return class_of[offset[node] + elem]; }
};

/// Throws BudgetExceeded when the disjoint union exceeds coend_budget().
Colimit colimit_finset(const SetDiagram& d);

/// Validating variant for a functor shape -> FinSet given by per-object sizes
/// and per-morphism maps. Throws TypeMismatch if the diagram is not functorial.
Colimit colimit_finset(const FinCategory& shape, const std::vector<int>& sizes,
                       const std::vector<std::vector<int>>& maps);

/// Element cap for a single colimit; RELMONAD_BUDGET, default 100000.
std::int64_t coend_budget();
/// Number of union-find unions that merged two distinct classes, process-wide.
std::int64_t colimit_merge_count();

/// Objects (x, e) in lexicographic order; one arrow per base morphism
/// m : x -> x' and e' in p(x'), from (x, p(m)e') to (x', e').
struct ElementIndex {
  struct Arrow {
    int src = 0;
    int dst = 0;
    MorId base = 0;
  };
  std::vector<std::pair<ObjId, int>> nodes;
  std::vector<int> first;  // object -> index of (object, 0)
  std::vector<Arrow> arrows;
  int node(ObjId x, int e) const { return first[x] + e; }
};

ElementIndex element_index(const Presheaf& p);

struct CategoryOfElements {
  CatPtr category;
  FunctorTable projection;
  ElementIndex index;
};

CategoryOfElements category_of_elements(const PshPtr& p);

/// Finite-set-valued data on a graph; natural families are maps commuting
/// with every arrow. Both systems must have the same nodes and arrows.
struct SetSystem {
  std::vector<int> sizes;
  std::vector<SetDiagram::Arrow> arrows;
};

using Family = std::vector<std::vector<int>>;

/// All natural families a -> b, in lexicographic order of components.
/// Throws BudgetExceeded after `budget` partial assignments.
std::vector<Family> enumerate_natural_families(const SetSystem& a, const SetSystem& b,
                                               std::int64_t budget = 1'000'000);

SetSystem set_system(const Presheaf& p);
std::vector<PshMorPtr> enumerate_nat_trans(const PshPtr& p, const PshPtr& q,
                                           std::int64_t budget = 1'000'000);

/// `at <obj> = {labels}` and `act <mor> : <label> -> <label>` lines over an
/// already-parsed base category.
PshPtr parse_presheaf(const CatPtr& base, std::string_view text);
std::string format_presheaf(const Presheaf& p);

}  // namespace relmonad
