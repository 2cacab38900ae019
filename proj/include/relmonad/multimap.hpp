#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "relmonad/error.hpp"
#include "relmonad/fincat.hpp"
#include "relmonad/presheaf.hpp"
#include "relmonad/tuple_index.hpp"

namespace relmonad {

/// A slot is either a finite category (image of J) or its presheaf category.
struct SlotType {
  enum class Kind { kFin, kPsh };
  Kind kind = Kind::kFin;
  CatPtr cat;

  static SlotType fin(CatPtr c) { return {Kind::kFin, std::move(c)}; }
  static SlotType psh(CatPtr c) { return {Kind::kPsh, std::move(c)}; }
  bool is_fin() const { return kind == Kind::kFin; }
  bool is_psh() const { return kind == Kind::kPsh; }
};

bool same_slot(const SlotType& a, const SlotType& b);

using Arg = std::variant<ObjId, PshPtr>;
using Args = std::vector<Arg>;
using ArgMor = std::variant<MorId, PshMorPtr>;

std::string args_key(const Args& args);
/// Human-readable argument tuple: object names for Fin slots, value-set sizes
/// for presheaf slots.
std::string describe_args(const Args& args, const std::vector<SlotType>& slots);

/// Thrown when a composite of 2-cells does not typecheck at some argument.
class CellMismatch : public Error {
 public:
  using Error::Error;
};

/// Finite-set-valued functor on Y^op × B1 × … × Bn stored per variable: one
/// presheaf on Y per object tuple, and for each slot variable the covariant
/// action of every morphism as a presheaf morphism.
class MultiProfunctor {
 public:
  /// `actions[v][t * |mor B_v| + g]` is the action of g at tuple t, present
  /// exactly when src(g) is the v-th coordinate of t.
  MultiProfunctor(std::vector<CatPtr> slots, CatPtr codomain, std::vector<PshPtr> values,
                  std::vector<std::vector<PshMorPtr>> actions);

  const std::vector<CatPtr>& slots() const { return slots_; }
  const CatPtr& codomain() const { return codomain_; }
  int arity() const { return static_cast<int>(slots_.size()); }
  const TupleIndex& tuples() const { return tuples_; }

  const PshPtr& value(int tuple) const { return values_[tuple]; }
  const PshMorPtr& action(int var, int tuple, MorId g) const;
  const std::vector<PshPtr>& values() const { return values_; }
  const std::vector<std::vector<PshMorPtr>>& actions() const { return actions_; }

 private:
  std::vector<CatPtr> slots_;
  CatPtr codomain_;
  TupleIndex tuples_;
  std::vector<PshPtr> values_;
  std::vector<std::vector<PshMorPtr>> actions_;
};

using ProfPtr = std::shared_ptr<const MultiProfunctor>;

/// Empty string when every value is a presheaf, every action is natural, and
/// each variable is functorial and commutes with every other variable.
std::string validate_profunctor(const MultiProfunctor& p);

/// Functor B1 × … × Bn -> Y between finite categories, stored per variable.
class MultiFunctor {
 public:
  /// `mor_map[v][t * |mor B_v| + g]` is the image of g at tuple t, or -1 when
  /// src(g) differs from the v-th coordinate of t.
  MultiFunctor(std::vector<CatPtr> slots, CatPtr codomain, std::vector<ObjId> obj_map,
               std::vector<std::vector<MorId>> mor_map);

  const std::vector<CatPtr>& slots() const { return slots_; }
  const CatPtr& codomain() const { return codomain_; }
  int arity() const { return static_cast<int>(slots_.size()); }
  const TupleIndex& tuples() const { return tuples_; }
  ObjId object(int tuple) const { return obj_map_[tuple]; }
  MorId action(int var, int tuple, MorId g) const;
  const std::vector<ObjId>& obj_map() const { return obj_map_; }
  const std::vector<std::vector<MorId>>& mor_map() const { return mor_map_; }

 private:
  std::vector<CatPtr> slots_;
  CatPtr codomain_;
  TupleIndex tuples_;
  std::vector<ObjId> obj_map_;
  std::vector<std::vector<MorId>> mor_map_;
};

using FunctorPtr = std::shared_ptr<const MultiFunctor>;

std::string validate_multifunctor(const MultiFunctor& f);

FunctorPtr identity_multifunctor(const CatPtr& c);
FunctorPtr unary_multifunctor(const FunctorTable& f);
/// B1,…,Bn -> B1 × … × Bn with the product ordering of product_category.
FunctorPtr pairing_multifunctor(const std::vector<CatPtr>& slots);
FunctorPtr projection_multifunctor(const std::vector<CatPtr>& slots, int index);
FunctorPtr constant_multifunctor(const std::vector<CatPtr>& slots, const CatPtr& codomain, ObjId value);
/// f ∘_i g: g's slots spliced in at position i.
FunctorPtr compose_multifunctor(const FunctorPtr& f, int i, const FunctorPtr& g);
/// Postcomposition with a unary functor.
FunctorPtr postcompose_multifunctor(const FunctorTable& u, const FunctorPtr& f);

/// A multimorphism B1,…,Bn -> Psh Y, evaluated pointwise. Evaluation is
/// deterministic and memoized on the argument key.
class MapNode {
 public:
  MapNode(std::vector<SlotType> slots, CatPtr codomain, std::string label);
  virtual ~MapNode() = default;

  const std::vector<SlotType>& slots() const { return slots_; }
  const CatPtr& codomain() const { return codomain_; }
  int arity() const { return static_cast<int>(slots_.size()); }
  const std::string& label() const { return label_; }

  /// Throws TypeMismatch when `args` does not match the slots.
  PshPtr evaluate(const Args& args) const;
  /// Action of the morphism `mor` in variable `var`, out of evaluate(args).
  PshMorPtr evaluate_mor(const Args& args, int var, const ArgMor& mor) const;

  /// Whether the map preserves colimits in the presheaf slot `slot`.
  virtual bool cocontinuous(int slot) const = 0;

 protected:
  virtual PshPtr do_evaluate(const Args& args) const = 0;
  virtual PshMorPtr do_evaluate_mor(const Args& args, int var, const ArgMor& mor) const = 0;

 private:
  void check_args(const Args& args) const;

  std::vector<SlotType> slots_;
  CatPtr codomain_;
  std::string label_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, PshPtr> values_;
  mutable std::unordered_map<std::string, PshMorPtr> actions_;
};

using MultiMap = std::shared_ptr<const MapNode>;

MultiMap table_map(ProfPtr p, std::string label);
/// Yoneda embedding y_X : X -> Psh X.
MultiMap unit_map(const CatPtr& x);
/// 1 : Psh X -> Psh X.
MultiMap identity_map(const CatPtr& x);
/// f ∘_j g for g into the presheaf category at slot j.
MultiMap compose_at(const MultiMap& f, int j, const MultiMap& g);
/// f ∘_j Jg for a functor between finite categories into the Fin slot j.
MultiMap reindex_at(const MultiMap& f, int j, const FunctorPtr& g);
/// Fixes slot j to a value; the slot is removed.
MultiMap plug_at(const MultiMap& f, int j, Arg value);

/// Evaluator-backed map with user-declared cocontinuity.
struct CustomMap {
  std::vector<SlotType> slots;
  CatPtr codomain;
  std::string label;
  std::function<PshPtr(const Args&)> evaluate;
  std::function<PshMorPtr(const Args&, int, const ArgMor&)> evaluate_mor;
  std::vector<bool> cocontinuous;
};
MultiMap custom_map(CustomMap spec);

/// A transformation between parallel multimaps, evaluated pointwise.
class TwoCell {
 public:
  using Fn = std::function<PshMorPtr(const Args&)>;
  TwoCell(MultiMap src, MultiMap dst, std::string name, Fn fn);

  const MultiMap& src() const { return src_; }
  const MultiMap& dst() const { return dst_; }
  const std::string& name() const { return name_; }
  PshMorPtr at(const Args& args) const;

 private:
  MultiMap src_;
  MultiMap dst_;
  std::string name_;
  Fn fn_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, PshMorPtr> cache_;
};

using CellPtr = std::shared_ptr<const TwoCell>;

CellPtr make_cell(MultiMap src, MultiMap dst, std::string name, TwoCell::Fn fn);
CellPtr identity_cell(const MultiMap& f);
/// beta · alpha. Throws CellMismatch at an argument where alpha's target
/// and beta's source evaluate differently.
CellPtr vcomp(const CellPtr& beta, const CellPtr& alpha);
/// Composite of cells listed in application order.
CellPtr chain(const std::vector<CellPtr>& cells);
/// alpha ∘_j g.
CellPtr whisker(const CellPtr& alpha, int j, const MultiMap& g);
/// alpha ∘_j Jg.
CellPtr whisker(const CellPtr& alpha, int j, const FunctorPtr& g);
/// f ∘_j beta.
CellPtr whisker(const MultiMap& f, int j, const CellPtr& beta);
/// Pointwise inverse; throws Error where a component is not bijective.
CellPtr inverse(const CellPtr& alpha);
/// Identity components between maps that evaluate identically; these are
/// the reindexing isomorphisms of canonical colimit representatives.
CellPtr canonical_iso(const MultiMap& f, const MultiMap& g);

enum class Policy { kTranspose, kSample };
const char* to_string(Policy p);

struct Verdict {
  bool equal = true;
  std::string witness;  // argument tuple, codomain object, element
};

/// Equality of parallel cells. TRANSPOSE restricts every presheaf slot along
/// the Yoneda embedding (exact when the common source is cocontinuous in
/// that slot) and compares on all object tuples; SAMPLE compares on the
/// fixed sample family of each presheaf slot.
Verdict two_cell_equal(const CellPtr& a, const CellPtr& b, Policy policy);

/// Bijectivity of every component at the arguments TRANSPOSE or SAMPLE visits.
Verdict cell_bijective(const CellPtr& a, Policy policy);

/// Naturality of a cell in every variable, at the sample arguments, against
/// each generating morphism of each slot.
Verdict cell_natural(const CellPtr& a);

/// Representables in object order, then y(a)+y(b) for a <= b, then one quotient:
/// the pushout of y(a) <- y(c) -> y(b) for the first span with a < b, or the
/// terminal presheaf obtained by collapsing the coproduct of all representables.
std::vector<PshPtr> sample_family(const CatPtr& x);

/// Every argument tuple ranging over objects in Fin slots and over the given
/// presheaf choices in presheaf slots.
std::vector<Args> all_args(const std::vector<SlotType>& slots,
                           const std::vector<std::vector<PshPtr>>& choices);

/// Sample-policy tuples: presheaf slots range over representables, and in
/// addition each presheaf slot in turn takes every other sample member.
std::vector<Args> sample_args(const std::vector<SlotType>& slots);

/// All Fin-slot object tuples of a map whose slots are all finite.
std::vector<Args> object_tuples(const std::vector<SlotType>& slots);

/// Replaces every presheaf slot by its finite category, restricting along y.
CellPtr restrict_to_representables(const CellPtr& a);

/// Block bodies over known slot and codomain categories. Profunctor lines:
///   at (<y>; <b1>,...) = {<labels>}
///   act 0 <u> (<y>; <b1>,...) : <label> -> <label>     codomain action, y = tgt u
///   act <i> <g> (<y>; <b1>,...) : <label> -> <label>   slot i (1-based), b_i = src g
/// Functor lines:
///   obj (<b1>,...) = <y>
///   mor <i> <g> (<b1>,...) = <m>
/// Identity actions may be omitted; every other action must be listed.
ProfPtr parse_profunctor(std::vector<CatPtr> slots, CatPtr codomain, std::string_view text);
std::string format_profunctor(const MultiProfunctor& p);
FunctorPtr parse_multifunctor(std::vector<CatPtr> slots, CatPtr codomain, std::string_view text);
std::string format_multifunctor(const MultiFunctor& f);

}  // namespace relmonad
