#include "relmonad/gen.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "text_util.hpp"
#include "union_find.hpp"

namespace relmonad {

namespace {

struct LawName {
  LawGroup law;
  const char* name;
};

constexpr LawName kLawNames[] = {
    {LawGroup::kRelPseudomonad, "relpsm"},
    {LawGroup::kStrong, "strong"},
    {LawGroup::kMultifunctor, "multifunctor"},
    {LawGroup::kPseudocommutativity, "pscom"},
    {LawGroup::kPermutation, "permutation"},
    {LawGroup::kMulticategorical, "multicategorical"},
    {LawGroup::kLaxIdempotent, "laxid"},
    {LawGroup::kPresheaf, "presheaf"},
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Category from a composition function on morphism ids.
template <class Compose>
CatPtr table_category(std::vector<std::string> objects, std::vector<FinCategory::Morphism> mors,
                      std::vector<MorId> ids, Compose compose) {
  const int n = static_cast<int>(mors.size());
  std::vector<MorId> comp(n * n, -1);
  for (MorId g = 0; g < n; ++g)
    for (MorId f = 0; f < n; ++f)
      if (mors[f].tgt == mors[g].src) comp[g * n + f] = compose(g, f);
  auto c = std::make_shared<const FinCategory>(std::move(objects), std::move(mors), std::move(ids), std::move(comp));
  if (auto r = validate_category(*c); !r.ok()) throw Error("hand-written category: " + r.message);
  return c;
}

void check_category(const CatPtr& c) {
  if (auto r = validate_category(*c); !r.ok()) throw Error("generated category: " + r.message);
}

/// Elements of a coproduct of representables of Y × B1^op × … × Bn^op,
/// quotiented by a congruence.
class ProfunctorBuilder {
 public:
  ProfunctorBuilder(const std::vector<CatPtr>& slots, const CatPtr& codomain)
      : slots_(slots), codomain_(codomain) {
    std::vector<int> radices;
    for (const auto& s : slots_) radices.push_back(s->num_objects());
    tuples_ = TupleIndex(radices);
  }

  void add_generator(ObjId z0, const std::vector<ObjId>& b0) {
    const int gen = generators_++;
    const auto& y = *codomain_;
    std::vector<std::vector<MorId>> choices(slots_.size() + 1);
    for (MorId m = 0; m < y.num_morphisms(); ++m)
      if (y.tgt(m) == z0) choices[0].push_back(m);
    for (size_t i = 0; i < slots_.size(); ++i)
      for (MorId m = 0; m < slots_[i]->num_morphisms(); ++m)
        if (slots_[i]->src(m) == b0[i]) choices[i + 1].push_back(m);
    std::vector<int> radices;
    for (const auto& c : choices) radices.push_back(static_cast<int>(c.size()));
    TupleIndex ti(radices);
    for (int k = 0; k < ti.size(); ++k) {
      auto pos = ti.decode(k);
      std::vector<int> coords{gen};
      for (size_t i = 0; i < pos.size(); ++i) coords.push_back(choices[i][pos[i]]);
      add_element(coords);
    }
  }

  /// Number of elements added so far.
  int size() const { return static_cast<int>(elements_.size()); }

  void finish_elements() {
    uf_ = UnionFind(size());
    actions_.assign(size(), {});
    for (int e = 0; e < size(); ++e) {
      const auto& c = elements_[e];
      const auto& y = *codomain_;
      for (MorId u = 0; u < y.num_morphisms(); ++u)
        if (y.tgt(u) == y.src(c[1]) && !y.is_identity(u)) {
          auto d = c;
          d[1] = y.compose(c[1], u);
          actions_[e].push_back({key(0, u), index_.at(d)});
        }
      for (size_t i = 0; i < slots_.size(); ++i) {
        const auto& b = *slots_[i];
        for (MorId g = 0; g < b.num_morphisms(); ++g)
          if (b.src(g) == b.tgt(c[i + 2]) && !b.is_identity(g)) {
            auto d = c;
            d[i + 2] = b.compose(g, c[i + 2]);
            actions_[e].push_back({key(static_cast<int>(i) + 1, g), index_.at(d)});
          }
      }
    }
  }

  /// Fibre of element e: (object tuple, codomain object).
  std::pair<int, ObjId> fibre(int e) const {
    const auto& c = elements_[e];
    std::vector<int> t;
    for (size_t i = 0; i < slots_.size(); ++i) t.push_back(slots_[i]->tgt(c[i + 2]));
    return {tuples_.encode(t), codomain_->src(c[1])};
  }

  void merge(int a, int b) {
    uf_.unite(a, b);
    close();
  }

  /// Classes of each fibre, least member first, ordered by least member.
  std::map<std::pair<int, ObjId>, std::vector<int>> classes() {
    std::map<std::pair<int, ObjId>, std::vector<int>> out;
    std::vector<bool> seen(size(), false);
    for (int e = 0; e < size(); ++e) {
      int r = uf_.find(e);
      if (seen[r]) continue;
      seen[r] = true;
      out[fibre(e)].push_back(e);
    }
    return out;
  }

  ProfPtr build() {
    auto cls = classes();
    const auto& y = *codomain_;
    auto class_index = [&](int e) {
      const auto& v = cls.at(fibre(e));
      int r = uf_.find(e);
      for (size_t i = 0; i < v.size(); ++i)
        if (uf_.find(v[i]) == r) return static_cast<int>(i);
      throw Error("profunctor builder: element without class");
    };
    auto count = [&](int t, ObjId z) {
      auto it = cls.find({t, z});
      return it == cls.end() ? 0 : static_cast<int>(it->second.size());
    };
    auto rep = [&](int t, ObjId z, int i) { return cls.at({t, z})[i]; };
    std::vector<PshPtr> values;
    for (int t = 0; t < tuples_.size(); ++t) {
      std::vector<int> sizes;
      for (ObjId z = 0; z < y.num_objects(); ++z) sizes.push_back(count(t, z));
      std::vector<std::vector<int>> act(y.num_morphisms());
      for (MorId u = 0; u < y.num_morphisms(); ++u)
        for (int i = 0; i < sizes[y.tgt(u)]; ++i) {
          auto d = elements_[rep(t, y.tgt(u), i)];
          d[1] = y.compose(d[1], u);
          act[u].push_back(class_index(index_.at(d)));
        }
      values.push_back(std::make_shared<const Presheaf>(codomain_, std::move(sizes), std::move(act)));
    }
    std::vector<std::vector<PshMorPtr>> actions(slots_.size());
    for (size_t v = 0; v < slots_.size(); ++v) {
      const auto& b = *slots_[v];
      actions[v].resize(tuples_.size() * b.num_morphisms());
      for (int t = 0; t < tuples_.size(); ++t)
        for (MorId g = 0; g < b.num_morphisms(); ++g) {
          if (b.src(g) != tuples_.component(t, static_cast<int>(v))) continue;
          int t2 = tuples_.with(t, static_cast<int>(v), b.tgt(g));
          std::vector<std::vector<int>> comps(y.num_objects());
          for (ObjId z = 0; z < y.num_objects(); ++z)
            for (int i = 0; i < count(t, z); ++i) {
              auto d = elements_[rep(t, z, i)];
              d[v + 2] = b.compose(g, d[v + 2]);
              comps[z].push_back(class_index(index_.at(d)));
            }
          actions[v][t * b.num_morphisms() + g] =
              std::make_shared<const PresheafMorphism>(values[t], values[t2], std::move(comps));
        }
    }
    return std::make_shared<const MultiProfunctor>(slots_, codomain_, std::move(values), std::move(actions));
  }

 private:
  static long key(int var, MorId m) { return static_cast<long>(var) * 100000 + m; }

  void add_element(const std::vector<int>& coords) {
    index_.emplace(coords, size());
    elements_.push_back(coords);
  }

  /// Smallest congruence containing the current merges.
  void close() {
    bool changed = true;
    while (changed) {
      changed = false;
      std::map<std::pair<int, long>, int> image;
      for (int e = 0; e < size(); ++e)
        for (const auto& [k, d] : actions_[e]) {
          auto [it, fresh] = image.emplace(std::make_pair(uf_.find(e), k), d);
          if (!fresh && uf_.find(it->second) != uf_.find(d)) {
            uf_.unite(it->second, d);
            changed = true;
          }
        }
    }
  }

  std::vector<CatPtr> slots_;
  CatPtr codomain_;
  TupleIndex tuples_;
  int generators_ = 0;
  std::vector<std::vector<int>> elements_;  // (generator, codomain morphism, slot morphisms…)
  std::map<std::vector<int>, int> index_;
  std::vector<std::vector<std::pair<long, int>>> actions_;
  UnionFind uf_{0};
};

bool functor_search(Rng& rng, const FinCategory& c, const FinCategory& d, std::vector<ObjId>& obj,
                    std::vector<MorId>& mor, MorId next, long& steps) {
  if (++steps > 20000) return false;
  if (next == c.num_morphisms()) return true;
  if (c.is_identity(next)) {
    mor[next] = d.identity(obj[c.src(next)]);
    return functor_search(rng, c, d, obj, mor, next + 1, steps);
  }
  auto cands = d.hom(obj[c.src(next)], obj[c.tgt(next)]);
  std::shuffle(cands.begin(), cands.end(), rng);
  for (MorId m : cands) {
    mor[next] = m;
    bool ok = true;
    for (MorId g = 0; g <= next && ok; ++g)
      for (MorId f = 0; f <= next && ok; ++f) {
        if (!c.composable(g, f)) continue;
        MorId gf = c.compose(g, f);
        if (gf > next) continue;
        ok = d.compose(mor[g], mor[f]) == mor[gf];
      }
    if (ok && functor_search(rng, c, d, obj, mor, next + 1, steps)) return true;
  }
  mor[next] = -1;
  return false;
}

std::vector<CatPtr> cats_of(const Instance& inst, const std::vector<int>& ids) {
  std::vector<CatPtr> out;
  for (int i : ids) out.push_back(inst.cats.at(i));
  return out;
}

void add_map(Instance& inst, const GenConfig& cfg, Rng& rng, std::string name, std::vector<int> slots, int codomain) {
  auto table = gen_profunctor(cfg, rng, cats_of(inst, slots), inst.cats.at(codomain));
  auto map = table_map(table, name);
  inst.maps.push_back({std::move(name), std::move(slots), codomain, table, map});
}

void add_functor(Instance& inst, Rng& rng, std::string name, std::vector<int> slots, int codomain) {
  auto table = gen_multifunctor(rng, cats_of(inst, slots), inst.cats.at(codomain));
  inst.functors.push_back({std::move(name), std::move(slots), codomain, table});
}

int add_cat(Instance& inst, CatPtr c) {
  inst.cats.push_back(std::move(c));
  return static_cast<int>(inst.cats.size()) - 1;
}

/// Slot list of the given arity with `special` at position `pos` and fresh
/// categories elsewhere.
std::vector<int> slots_with(Instance& inst, const GenConfig& cfg, Rng& rng, int arity, int pos, int special) {
  std::vector<int> out;
  for (int i = 0; i < arity; ++i) out.push_back(i == pos ? special : add_cat(inst, gen_category(cfg, rng)));
  return out;
}

}  // namespace

const char* to_string(LawGroup g) {
  for (const auto& [law, name] : kLawNames)
    if (law == g) return name;
  return "?";
}

LawGroup parse_law_group(std::string_view name) {
  for (const auto& [law, n] : kLawNames)
    if (name == n) return law;
  throw Error("unknown law group '" + std::string(name) + "'");
}

const std::vector<LawGroup>& all_law_groups() {
  static const std::vector<LawGroup> out = [] {
    std::vector<LawGroup> v;
    for (const auto& [law, name] : kLawNames) v.push_back(law);
    return v;
  }();
  return out;
}

void validate_config(const GenConfig& cfg) {
  if (cfg.max_objects < 1) throw Error("max-objects must be at least 1");
  if (cfg.max_edges < 0) throw Error("max-edges must be non-negative");
  if (cfg.max_values < 0) throw Error("max-values must be non-negative");
  if (cfg.max_arity < 1) throw Error("max-arity must be at least 1");
}

int pick(Rng& rng, int n) {
  if (n <= 0) throw Error("pick: empty range");
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

std::uint64_t instance_seed(std::uint64_t seed, LawGroup law, int index) {
  return splitmix64(splitmix64(seed ^ (static_cast<std::uint64_t>(law) << 40)) + static_cast<std::uint64_t>(index));
}

CatPtr group_z2() {
  return table_category({"*"}, {{"1", 0, 0}, {"s", 0, 0}}, {0}, [](MorId g, MorId f) { return g ^ f; });
}

CatPtr idempotent_monoid() {
  return table_category({"*"}, {{"1", 0, 0}, {"e", 0, 0}}, {0}, [](MorId g, MorId f) { return g | f; });
}

CatPtr commuting_square() {
  // a -f-> b -h-> d, a -g-> c -k-> d, h∘f = k∘g = d.
  std::vector<FinCategory::Morphism> mors = {{"1a", 0, 0}, {"1b", 1, 1}, {"1c", 2, 2}, {"1d", 3, 3}, {"f", 0, 1},
                                             {"g", 0, 2},  {"h", 1, 3},  {"k", 2, 3},  {"d", 0, 3}};
  return table_category({"a", "b", "c", "d"}, mors, {0, 1, 2, 3}, [](MorId g, MorId f) -> MorId {
    if (g < 4) return f;
    if (f < 4) return g;
    return 8;
  });
}

CatPtr gen_free_category(const GenConfig& cfg, Rng& rng) {
  static const char* const kNames[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  const int n = 1 + pick(rng, std::min(cfg.max_objects, 8));
  std::vector<std::pair<ObjId, ObjId>> pairs;
  for (ObjId a = 0; a < n; ++a)
    for (ObjId b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  const int m = pairs.empty() ? 0 : pick(rng, std::min<int>(cfg.max_edges, pairs.size()) + 1);
  pairs.resize(m);
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::string> objects(kNames, kNames + n);
  std::vector<std::string> edge_names;
  for (int i = 0; i < m; ++i) edge_names.push_back("m" + std::to_string(i));
  auto c = free_category(objects, pairs, edge_names);
  check_category(c);
  return c;
}

CatPtr gen_category(const GenConfig& cfg, Rng& rng) {
  if (pick(rng, 5) == 0) {
    std::vector<CatPtr> options = {group_z2(), idempotent_monoid()};
    if (cfg.max_objects >= 4 && cfg.max_edges >= 4) options.push_back(commuting_square());
    return options[pick(rng, static_cast<int>(options.size()))];
  }
  return gen_free_category(cfg, rng);
}

ProfPtr gen_profunctor(const GenConfig& cfg, Rng& rng, const std::vector<CatPtr>& slots, const CatPtr& codomain) {
  ProfunctorBuilder b(slots, codomain);
  if (cfg.max_values > 0) {
    const int gens = 1 + pick(rng, 3);
    for (int i = 0; i < gens; ++i) {
      ObjId z0 = pick(rng, codomain->num_objects());
      std::vector<ObjId> b0;
      for (const auto& s : slots) b0.push_back(pick(rng, s->num_objects()));
      b.add_generator(z0, b0);
    }
  }
  b.finish_elements();
  for (int extra = pick(rng, 3); extra > 0 && b.size() > 1; --extra) {
    int e = pick(rng, b.size());
    auto cls = b.classes().at(b.fibre(e));
    b.merge(e, cls[pick(rng, static_cast<int>(cls.size()))]);
  }
  for (bool over = true; over;) {
    over = false;
    for (const auto& [fib, members] : b.classes())
      if (static_cast<int>(members.size()) > cfg.max_values) {
        int i = pick(rng, static_cast<int>(members.size()));
        int j = pick(rng, static_cast<int>(members.size()) - 1);
        if (j >= i) ++j;
        b.merge(members[i], members[j]);
        over = true;
        break;
      }
  }
  auto p = b.build();
  if (auto why = validate_profunctor(*p); !why.empty()) throw Error("generated profunctor: " + why);
  return p;
}

FunctorTable gen_functor(Rng& rng, const CatPtr& src, const CatPtr& dst) {
  FunctorTable f{src, dst, {}, {}};
  for (int attempt = 0; attempt < 20; ++attempt) {
    f.obj_map.assign(src->num_objects(), 0);
    for (auto& o : f.obj_map) o = pick(rng, dst->num_objects());
    f.mor_map.assign(src->num_morphisms(), -1);
    long steps = 0;
    if (functor_search(rng, *src, *dst, f.obj_map, f.mor_map, 0, steps)) {
      if (auto why = validate_functor(f); !why.empty()) throw Error("generated functor: " + why);
      return f;
    }
  }
  ObjId c = pick(rng, dst->num_objects());
  f.obj_map.assign(src->num_objects(), c);
  f.mor_map.assign(src->num_morphisms(), dst->identity(c));
  return f;
}

FunctorPtr gen_multifunctor(Rng& rng, const std::vector<CatPtr>& slots, const CatPtr& codomain) {
  FunctorPtr out;
  if (slots.size() == 1) {
    out = unary_multifunctor(gen_functor(rng, slots[0], codomain));
  } else if (pick(rng, 4) == 0) {
    int i = pick(rng, static_cast<int>(slots.size()));
    out = postcompose_multifunctor(gen_functor(rng, slots[i], codomain), projection_multifunctor(slots, i));
  } else {
    out = postcompose_multifunctor(gen_functor(rng, product_category(slots), codomain), pairing_multifunctor(slots));
  }
  if (auto why = validate_multifunctor(*out); !why.empty()) throw Error("generated multifunctor: " + why);
  return out;
}

const NamedMap& Instance::map(std::string_view name) const {
  for (const auto& m : maps)
    if (m.name == name) return m;
  throw Error("instance has no map '" + std::string(name) + "'");
}

bool Instance::has_map(std::string_view name) const {
  return std::any_of(maps.begin(), maps.end(), [&](const NamedMap& m) { return m.name == name; });
}

const NamedFunctor& Instance::functor(std::string_view name) const {
  for (const auto& f : functors)
    if (f.name == name) return f;
  throw Error("instance has no functor '" + std::string(name) + "'");
}

int Instance::param(std::string_view name) const {
  auto it = params.find(std::string(name));
  if (it == params.end()) throw Error("instance has no parameter '" + std::string(name) + "'");
  return it->second;
}

std::string Instance::describe() const {
  std::ostringstream os;
  os << to_string(law) << '#' << index << " objects=";
  for (size_t i = 0; i < cats.size(); ++i) os << (i ? "," : "") << cats[i]->num_objects();
  os << " values=";
  for (size_t i = 0; i < maps.size(); ++i) {
    int total = 0;
    for (const auto& v : maps[i].table->values()) total += v->total_size();
    os << (i ? "," : "") << total;
  }
  return os.str();
}

Instance gen_instance(const GenConfig& cfg, LawGroup law, int index) {
  validate_config(cfg);
  Instance inst;
  inst.law = law;
  inst.index = index;
  inst.seed = instance_seed(cfg.seed, law, index);
  Rng rng(inst.seed);
  const int max_arity = std::min(cfg.max_arity, 3);
  auto cat = [&] { return add_cat(inst, gen_category(cfg, rng)); };
  switch (law) {
    case LawGroup::kRelPseudomonad: {
      int c0 = cat(), c1 = cat(), c2 = cat(), c3 = cat();
      add_map(inst, cfg, rng, "f", {c1}, c0);
      add_map(inst, cfg, rng, "g", {c2}, c1);
      add_map(inst, cfg, rng, "h", {c3}, c2);
      inst.params = {{"j", 0}, {"k", 0}, {"l", 0}};
      break;
    }
    case LawGroup::kStrong: {
      const int af = max_arity >= 3 && index % 2 == 1 ? 3 : std::min(2, max_arity);
      const int ag = std::min(af == 3 ? 1 : 2, max_arity);
      const int ah = std::min(af == 3 ? 2 : 1, max_arity);
      int j = pick(rng, af), k = pick(rng, ag), l = pick(rng, ah);
      int c0 = cat(), c1 = cat(), c2 = cat(), c3 = cat();
      add_map(inst, cfg, rng, "f", slots_with(inst, cfg, rng, af, j, c1), c0);
      add_map(inst, cfg, rng, "g", slots_with(inst, cfg, rng, ag, k, c2), c1);
      add_map(inst, cfg, rng, "h", slots_with(inst, cfg, rng, ah, l, c3), c2);
      inst.params = {{"j", j}, {"k", k}, {"l", l}};
      break;
    }
    case LawGroup::kMultifunctor: {
      const int af = std::min(2, max_arity), ag = std::min(2, max_arity), ah = 1 + pick(rng, std::min(2, max_arity));
      int i = pick(rng, af), j = pick(rng, ag);
      int y = cat();
      auto fs = slots_with(inst, cfg, rng, af, -1, 0);
      auto gs = slots_with(inst, cfg, rng, ag, -1, 0);
      auto hs = slots_with(inst, cfg, rng, ah, -1, 0);
      add_functor(inst, rng, "f", fs, y);
      add_functor(inst, rng, "g", gs, fs[i]);
      add_functor(inst, rng, "h", hs, gs[j]);
      inst.params = {{"i", i}, {"j", j}};
      break;
    }
    case LawGroup::kPseudocommutativity: {
      int y = cat();
      auto fs = slots_with(inst, cfg, rng, 2, -1, 0);
      add_map(inst, cfg, rng, "f", fs, y);
      if (max_arity >= 3) add_map(inst, cfg, rng, "f3", slots_with(inst, cfg, rng, 3, -1, 0), y);
      const int ag = std::min(2, max_arity);
      int l = pick(rng, ag), r = 0;
      add_map(inst, cfg, rng, "g", slots_with(inst, cfg, rng, ag, l, cat()), fs[0]);
      add_map(inst, cfg, rng, "h", slots_with(inst, cfg, rng, 1, r, cat()), fs[1]);
      inst.params = {{"l", l}, {"r", r}};
      break;
    }
    case LawGroup::kPermutation: {
      if (max_arity < 3) throw Error("permutation laws need max-arity 3");
      int y = cat();
      add_map(inst, cfg, rng, "f3", slots_with(inst, cfg, rng, 3, -1, 0), y);
      break;
    }
    case LawGroup::kMulticategorical: {
      const int n = std::min(2, max_arity);
      auto xs = slots_with(inst, cfg, rng, n, -1, 0);
      int y = cat(), y1 = cat(), y2 = cat();
      add_functor(inst, rng, "f", xs, y);
      add_functor(inst, rng, "u", {y}, y1);
      add_functor(inst, rng, "v", {y1}, y2);
      break;
    }
    case LawGroup::kLaxIdempotent: {
      GenConfig small = cfg;
      small.max_objects = std::min(cfg.max_objects, 3);
      auto scat = [&] { return add_cat(inst, gen_category(small, rng)); };
      const int af = 1 + pick(rng, std::min(2, max_arity));
      int j = pick(rng, af);
      int c0 = scat(), c1 = scat();
      auto fs = slots_with(inst, small, rng, af, j, c1);
      add_map(inst, small, rng, "f", fs, c0);
      add_map(inst, small, rng, "g", fs, c0);
      inst.params = {{"j", j}};
      break;
    }
    case LawGroup::kPresheaf: {
      int y = cat();
      add_map(inst, cfg, rng, "f", slots_with(inst, cfg, rng, std::min(2, max_arity), -1, 0), y);
      break;
    }
  }
  return inst;
}

bool corrupt_contravariance(Instance& inst) {
  for (auto& nm : inst.maps) {
    const auto& p = *nm.table;
    const auto& y = *p.codomain();
    // Prefer a non-identity action, so that composition rather than identity breaks.
    for (int pass = 0; pass < 2; ++pass)
      for (int t = 0; t < p.tuples().size(); ++t)
        for (MorId u = 0; u < y.num_morphisms(); ++u) {
          if ((pass == 0) == y.is_identity(u)) continue;
          const auto& v = *p.value(t);
          if (v.size(y.src(u)) < 2 || v.size(y.tgt(u)) == 0) continue;
          auto act = v.actions();
          for (int& e : act[u]) e = e == 0 ? 1 : e == 1 ? 0 : e;
          auto bad = std::make_shared<const Presheaf>(p.codomain(), v.sizes(), std::move(act));
          if (validate_presheaf(*bad).empty()) continue;
          auto values = p.values();
          values[t] = bad;
          auto actions = p.actions();
          for (auto& per_var : actions)
            for (auto& a : per_var) {
              if (!a) continue;
              auto src = a->src() == p.value(t) ? bad : a->src();
              auto dst = a->dst() == p.value(t) ? bad : a->dst();
              if (src != a->src() || dst != a->dst())
                a = std::make_shared<const PresheafMorphism>(src, dst, a->components());
            }
          nm.table = std::make_shared<const MultiProfunctor>(p.slots(), p.codomain(), values, actions);
          nm.map = table_map(nm.table, nm.name);
          inst.defect = "contravariance-broken";
          return true;
        }
  }
  return false;
}

std::string format_instance(const Instance& inst) {
  std::ostringstream os;
  os << "relmonad-instance 1\n";
  os << "law " << to_string(inst.law) << "\n";
  os << "seed " << inst.seed << "\n";
  os << "index " << inst.index << "\n";
  os << "defect " << inst.defect << "\n";
  for (const auto& [k, v] : inst.params) os << "param " << k << " " << v << "\n";
  for (size_t i = 0; i < inst.cats.size(); ++i)
    os << "category " << i << "\n" << format_category(*inst.cats[i]) << "end\n";
  auto slot_list = [](const std::vector<int>& s) {
    std::vector<std::string> parts;
    for (int i : s) parts.push_back(std::to_string(i));
    return "(" + text::join(parts, ",") + ")";
  };
  for (const auto& m : inst.maps)
    os << "map " << m.name << " " << slot_list(m.slots) << " -> " << m.codomain << "\n"
       << format_profunctor(*m.table) << "end\n";
  for (const auto& f : inst.functors)
    os << "functor " << f.name << " " << slot_list(f.slots) << " -> " << f.codomain << "\n"
       << format_multifunctor(*f.table) << "end\n";
  os << "end-instance\n";
  return os.str();
}

Instance parse_instance(std::string_view input) {
  auto ls = text::lines(input);
  if (ls.empty()) throw ParseError("empty instance file");
  auto head = text::tokens(ls[0].content);
  if (head.size() != 2 || head[0] != "relmonad-instance") text::fail(ls[0], "missing relmonad-instance header");
  if (head[1] != "1") text::fail(ls[0], "unsupported instance version " + head[1]);

  auto to_int = [](const text::Line& line, const std::string& s) {
    try {
      size_t used = 0;
      long long v = std::stoll(s, &used);
      if (used != s.size()) text::fail(line, "bad integer");
      return v;
    } catch (const std::logic_error&) {
      text::fail(line, "bad integer");
    }
  };
  // Body lines between a block header and its `end`, re-joined as text.
  size_t pos = 1;
  auto block = [&](const text::Line& header) {
    std::string body;
    for (++pos; pos < ls.size(); ++pos) {
      if (ls[pos].content == "end") return body;
      body += std::string(ls[pos].content) + "\n";
    }
    text::fail(header, "block is not terminated by end");
  };
  auto parse_slots = [&](const text::Line& line, const std::vector<std::string>& tk, size_t& slots_end) {
    // name (a,b,...) -> c
    if (tk.size() != 5 || tk[3] != "->") text::fail(line, "expected '<kind> <name> (<cats>) -> <cat>'");
    const auto& s = tk[2];
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') text::fail(line, "expected slot list");
    std::vector<int> out;
    for (const auto& piece : text::split(std::string_view(s).substr(1, s.size() - 2), ','))
      out.push_back(static_cast<int>(to_int(line, piece)));
    slots_end = 4;
    return out;
  };

  Instance inst;
  bool has_law = false, finished = false;
  for (; pos < ls.size(); ++pos) {
    const auto line = ls[pos];
    auto tk = text::tokens(line.content);
    const auto& kw = tk[0];
    if (kw == "end-instance") {
      finished = true;
      break;
    }
    if (kw == "law" && tk.size() == 2) {
      try {
        inst.law = parse_law_group(tk[1]);
      } catch (const Error& e) {
        text::fail(line, e.what());
      }
      has_law = true;
    } else if (kw == "seed" && tk.size() == 2) {
      try {
        inst.seed = std::stoull(tk[1]);
      } catch (const std::logic_error&) {
        text::fail(line, "bad seed");
      }
    } else if (kw == "index" && tk.size() == 2) {
      inst.index = static_cast<int>(to_int(line, tk[1]));
    } else if (kw == "defect" && tk.size() == 2) {
      inst.defect = tk[1];
    } else if (kw == "param" && tk.size() == 3) {
      inst.params[tk[1]] = static_cast<int>(to_int(line, tk[2]));
    } else if (kw == "category" && tk.size() == 2) {
      if (to_int(line, tk[1]) != static_cast<long long>(inst.cats.size())) text::fail(line, "categories out of order");
      auto c = parse_category(block(line));
      if (auto r = validate_category(*c); !r.ok()) text::fail(line, "invalid category: " + r.message);
      inst.cats.push_back(c);
    } else if (kw == "map" || kw == "functor") {
      size_t end = 0;
      auto slots = parse_slots(line, tk, end);
      int codomain = static_cast<int>(to_int(line, tk[end]));
      auto check = [&](int c) {
        if (c < 0 || c >= static_cast<int>(inst.cats.size())) text::fail(line, "unknown category " + std::to_string(c));
      };
      for (int s : slots) check(s);
      check(codomain);
      auto body = block(line);
      if (kw == "map") {
        auto table = parse_profunctor(cats_of(inst, slots), inst.cats[codomain], body);
        inst.maps.push_back({tk[1], slots, codomain, table, table_map(table, tk[1])});
      } else {
        auto table = parse_multifunctor(cats_of(inst, slots), inst.cats[codomain], body);
        if (auto why = validate_multifunctor(*table); !why.empty()) text::fail(line, "invalid functor: " + why);
        inst.functors.push_back({tk[1], slots, codomain, table});
      }
    } else {
      text::fail(line, "unexpected line");
    }
  }
  if (!has_law) throw ParseError("instance has no law line");
  if (!finished) throw ParseError("instance is truncated: missing end-instance");
  return inst;
}

}  // namespace relmonad
