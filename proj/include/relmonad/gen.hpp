#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "relmonad/multimap.hpp"

namespace relmonad {

/// Groups of coherence laws; each group has its own instance shape.
enum class LawGroup {
  kRelPseudomonad,
  kStrong,
  kMultifunctor,
  kPseudocommutativity,
  kPermutation,
  kMulticategorical,
  kLaxIdempotent,
  kPresheaf,
};

const char* to_string(LawGroup g);
/// Throws Error on an unknown name.
LawGroup parse_law_group(std::string_view name);
const std::vector<LawGroup>& all_law_groups();

struct GenConfig {
  std::uint64_t seed = 42;
  int max_objects = 3;
  int max_edges = 3;
  int max_values = 3;
  int max_arity = 3;
};

/// Throws Error when a bound is below its minimum.
void validate_config(const GenConfig& cfg);

using Rng = std::mt19937_64;

/// Uniform in [0, n) by modular reduction; identical on every platform.
int pick(Rng& rng, int n);

/// Seed of instance `index` of `law`, mixed with splitmix64.
std::uint64_t instance_seed(std::uint64_t seed, LawGroup law, int index);

CatPtr group_z2();
CatPtr idempotent_monoid();
CatPtr commuting_square();

/// Free category on a random acyclic graph, occasionally a hand-written
/// non-free category that fits the bounds.
CatPtr gen_category(const GenConfig& cfg, Rng& rng);
/// Free category on a random acyclic graph only.
CatPtr gen_free_category(const GenConfig& cfg, Rng& rng);

/// A quotient of a coproduct of one to three representables of
/// Y × B1^op × … × Bn^op, with every value set of size at most max_values.
ProfPtr gen_profunctor(const GenConfig& cfg, Rng& rng, const std::vector<CatPtr>& slots, const CatPtr& codomain);

/// A functor src -> dst found by randomized backtracking; a constant functor
/// when none is found quickly.
FunctorTable gen_functor(Rng& rng, const CatPtr& src, const CatPtr& dst);
FunctorPtr gen_multifunctor(Rng& rng, const std::vector<CatPtr>& slots, const CatPtr& codomain);

struct NamedMap {
  std::string name;
  std::vector<int> slots;  // indices into Instance::cats
  int codomain = 0;
  ProfPtr table;
  MultiMap map;
};

struct NamedFunctor {
  std::string name;
  std::vector<int> slots;
  int codomain = 0;
  FunctorPtr table;
};

/// The finite data one law group is checked on. Maps and functors refer to
/// categories by position in `cats`.
struct Instance {
  LawGroup law = LawGroup::kRelPseudomonad;
  std::uint64_t seed = 0;
  int index = 0;
  std::string defect = "none";
  std::vector<CatPtr> cats;
  std::vector<NamedMap> maps;
  std::vector<NamedFunctor> functors;
  std::map<std::string, int> params;

  const NamedMap& map(std::string_view name) const;
  const NamedFunctor& functor(std::string_view name) const;
  int param(std::string_view name) const;
  bool has_map(std::string_view name) const;
  /// `law#index` followed by category sizes and total value sizes.
  std::string describe() const;
};

Instance gen_instance(const GenConfig& cfg, LawGroup law, int index);

/// Replaces one value presheaf of the first map by a copy whose codomain
/// action is no longer functorial. Returns false when no map admits this.
bool corrupt_contravariance(Instance& inst);

/// Text format with header `relmonad-instance 1`.
std::string format_instance(const Instance& inst);
/// Throws ParseError on malformed or truncated input or an unknown version.
Instance parse_instance(std::string_view text);

}  // namespace relmonad
