#include "relmonad/checker.hpp"

#include <chrono>
#include <functional>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "text_util.hpp"

namespace relmonad {

namespace {

const std::vector<LawDoc> kLaws = {
    {"relpsm.associativity", LawGroup::kRelPseudomonad,
     "(t̂[f,g] ∘ h^t) · t̂[f^t∘g, h]",
     "(f^t ∘ t̂[g,h]) · t̂[f, g^t∘h] · (t̂[f,g] ∘ h)^t"},
    {"relpsm.unit", LawGroup::kRelPseudomonad, "(f^t ∘ θ) · t̂[f, y] · (t̃[f])^t", "f^t ≅ f^t ∘ 1"},
    {"relpsm.unit-transpose", LawGroup::kRelPseudomonad, "(t̂[f,g] ∘ y) · t̃[f^t∘g]", "f^t ∘ t̃[g]"},
    {"relpsm.theta-extension", LawGroup::kRelPseudomonad, "(θ ∘ f^t) · t̂[y, f]", "(θ ∘ f)^t"},
    {"relpsm.theta-unit", LawGroup::kRelPseudomonad, "(θ ∘ y) · t̃[y]", "y ≅ 1 ∘ y"},
    {"relpsm.naturality", LawGroup::kRelPseudomonad, "t̃[f], t̂[f,g], θ at each generating morphism",
     "the same morphism applied after the component"},
    {"strong.associativity", LawGroup::kStrong,
     "(t̂[f,g] ∘_{j+k} h^t) · t̂[f^t∘_j g, h]",
     "(f^t ∘_j t̂[g,h]) · t̂[f, g^t∘_k h] · (t̂[f,g] ∘_{j+k} h)^t"},
    {"strong.unit", LawGroup::kStrong, "(f^t ∘_j θ) · t̂[f, y] · (t̃[f])^t", "f^t ≅ f^t ∘_j 1"},
    {"strong.unit-transpose", LawGroup::kStrong, "(t̂[f,g] ∘_{j+k} y) · t̃[f^t∘_j g]", "f^t ∘_j t̃[g]"},
    {"strong.theta-extension", LawGroup::kStrong, "(θ ∘ f^t) · t̂[y, f]", "(θ ∘ f)^t"},
    {"strong.theta-unit", LawGroup::kStrong, "(θ ∘ y) · t̃[y]", "y ≅ 1 ∘ y"},
    {"strong.naturality", LawGroup::kStrong, "t̃[f], t̂[f,g], θ at each generating morphism",
     "the same morphism applied after the component"},
    {"multifunctor.unit-left", LawGroup::kMultifunctor, "(T̃ ∘ Tf) · T̂[1,f]", "T(1∘f) ≅ 1 ∘ Tf"},
    {"multifunctor.unit-right", LawGroup::kMultifunctor, "(Tf ∘_i T̃) · T̂[f,1] for every slot i",
     "T(f∘_i 1) ≅ Tf ∘_i 1"},
    {"multifunctor.associativity", LawGroup::kMultifunctor, "(Tf ∘_i T̂[g,h]) · T̂[f, g∘_j h]",
     "(T̂[f,g] ∘_{i+j} Th) · T̂[f∘_i g, h]"},
    {"multifunctor.invertible", LawGroup::kMultifunctor, "T̂[f,g], T̃ componentwise", "bijections"},
    {"pscom.unit-first", LawGroup::kPseudocommutativity, "(γ[f] ∘_s y) · t̃[f^t at s]", "(t̃[f] at s)^t"},
    {"pscom.unit-second", LawGroup::kPseudocommutativity, "(γ[f] ∘_t y) · (t̃[f] at t)^s", "t̃[f^s at t]"},
    {"pscom.precompose-first", LawGroup::kPseudocommutativity, "(γ[f] ∘_s g^t) · t̂[f^t, g]",
     "(t̂[f, g])^t · γ[f^s ∘_s g] · (γ[f] ∘_s g)^s"},
    {"pscom.precompose-second", LawGroup::kPseudocommutativity, "(γ[f] ∘_t h^t) · (t̂[f, h])^s",
     "t̂[f^s, h] · (γ[f] ∘_t h)^t · γ[f^t ∘_t h]"},
    {"pscom.braiding", LawGroup::kPseudocommutativity, "(γ[f] at s,t)^u · γ[f^t] at s,u · (γ[f] at t,u)^s",
     "γ[f^s] at t,u · (γ[f] at s,u)^t · γ[f^u] at s,t"},
    {"pscom.invertible", LawGroup::kPseudocommutativity, "γ⁻¹ · γ", "identity"},
    {"permutation.factorizations", LawGroup::kPermutation,
     "γ/γ⁻¹ composite along the bubble-sort word for σ ∈ S3",
     "γ/γ⁻¹ composite along a different word for σ"},
    {"multicategorical.eta", LawGroup::kMulticategorical, "(α* ∘ (y,…,y)) · (h^t ∘ ī[f]) · (t̃[h] ∘ Jf)",
     "(Tf' ∘ (t̃[g_1],…,t̃[g_n])) · α"},
    {"multicategorical.mu", LawGroup::kMulticategorical, "(β* ∘ (g^t)) · (h'^t ∘ α*) · (t̂[h',h] ∘ Tf)",
     "(Tf'' ∘ (t̂[g'_i,g_i])) · ((β* ∘ (g)) · (h'^t ∘ α))*"},
    {"multicategorical.theta", LawGroup::kMulticategorical, "(Tf ∘ (θ,…,θ)) · ī[f]*", "θ ∘ Tf"},
    {"laxid.unit-invertible", LawGroup::kLaxIdempotent, "t̃[f] componentwise", "bijections"},
    {"laxid.triangle-strengthen", LawGroup::kLaxIdempotent, "σ[f^t] · (t̃[f])^t", "identity on f^t"},
    {"laxid.triangle-unit", LawGroup::kLaxIdempotent, "(σ[G] ∘ y) · t̃[G∘y]", "identity on G∘y"},
    {"laxid.kan-universal", LawGroup::kLaxIdempotent,
     "transpose of untranspose of every β : f => G∘y; Nat(f^t P, G P) restricted to cocones",
     "β; every cocone over the elements of P exactly once"},
    {"presheaf.profunctor-valid", LawGroup::kPresheaf, "every table's actions", "functorial and natural"},
    {"presheaf.yoneda", LawGroup::kPresheaf, "|Nat(y a, y b)|", "|hom(a, b)|"},
};

std::string clean(std::string s) {
  for (char& c : s)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return s;
}

class Runner {
 public:
  Runner(const Instance& inst, Policy policy) : inst_(inst), policy_(policy), desc_(inst.describe()) {}

  void run(const std::string& law, const std::function<Verdict()>& fn) {
    auto start = std::chrono::steady_clock::now();
    LawReport r{law, desc_, inst_.seed, policy_, true, "", "", 0};
    try {
      Verdict v = fn();
      r.pass = v.equal;
      (r.pass ? r.note : r.witness) = v.witness;
    } catch (const BudgetExceeded&) {
      throw;
    } catch (const std::exception& e) {
      r.pass = false;
      r.witness = std::string("error: ") + e.what();
    }
    if (!r.pass && r.witness.empty()) r.witness = "sides differ";
    r.witness = clean(r.witness);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out_.push_back(std::move(r));
  }

  std::vector<LawReport> take() { return std::move(out_); }

 private:
  const Instance& inst_;
  Policy policy_;
  std::string desc_;
  std::vector<LawReport> out_;
};

/// Compares lhs with rhs after identifying their endpoints canonically. A
/// TRANSPOSE pass is followed by a SAMPLE comparison, which also sees element
/// orderings at non-representable arguments.
Verdict same(const CellPtr& lhs, const CellPtr& rhs, Policy policy) {
  auto r = chain({canonical_iso(lhs->src(), rhs->src()), rhs, canonical_iso(rhs->dst(), lhs->dst())});
  auto v = two_cell_equal(lhs, r, policy);
  if (!v.equal || policy == Policy::kSample) return v;
  v = two_cell_equal(lhs, r, Policy::kSample);
  if (!v.equal) v.witness = "[SAMPLE] " + v.witness;
  return v;
}

Verdict first_failure(std::initializer_list<std::function<Verdict()>> checks) {
  for (const auto& c : checks)
    if (auto v = c(); !v.equal) return v;
  return {};
}

Verdict labelled(std::string label, Verdict v) {
  if (!v.equal) v.witness = label + " " + v.witness;
  return v;
}

CatPtr slot_cat(const MultiMap& f, int j) { return f->slots().at(j).cat; }

/// Laws shared by the unary and the strong case: f slot j, g slot k, h slot l.
void check_strength_laws(Runner& run, const std::string& group, const Instance& inst, const PresheafMonad& t,
                         Policy policy) {
  const auto f = inst.map("f").map, g = inst.map("g").map, h = inst.map("h").map;
  const int j = inst.param("j"), k = inst.param("k"), l = inst.param("l");
  const auto ft = strengthen(f, j);
  const auto fg = compose_at(ft, j, g);
  const auto y0 = unit_map(f->codomain());

  run.run(group + ".associativity", [&] {
    auto that_fg = t.mu(f, j, g, k);
    auto lhs = chain({t.mu(fg, j + k, h, l), whisker(that_fg, j + k, strengthen(h, l))});
    auto step1 = strengthen_cell(whisker(that_fg, j + k, h), j + k + l);
    auto gth = compose_at(strengthen(g, k), k, h);
    auto step2 = t.mu(f, j, gth, k + l);
    auto step3 = whisker(ft, j, t.mu(g, k, h, l));
    auto rhs = chain({step1, canonical_iso(step1->dst(), step2->src()), step2, step3});
    return same(lhs, rhs, policy);
  });
  run.run(group + ".unit", [&] {
    auto y1 = unit_map(slot_cat(f, j));
    auto lhs = chain({strengthen_cell(t.eta(f, j), j), t.mu(f, j, y1, 0), whisker(ft, j, t.theta(slot_cat(f, j)))});
    return same(lhs, canonical_iso(ft, lhs->dst()), policy);
  });
  run.run(group + ".unit-transpose", [&] {
    auto y2 = unit_map(slot_cat(g, k));
    auto lhs = chain({t.eta(fg, j + k), whisker(t.mu(f, j, g, k), j + k, y2)});
    auto rhs = whisker(ft, j, t.eta(g, k));
    return same(lhs, rhs, policy);
  });
  run.run(group + ".theta-extension", [&] {
    auto lhs = chain({t.mu(y0, 0, f, j), whisker(t.theta(f->codomain()), 0, ft)});
    auto rhs = strengthen_cell(whisker(t.theta(f->codomain()), 0, f), j);
    return same(lhs, rhs, policy);
  });
  run.run(group + ".theta-unit", [&] {
    auto lhs = chain({t.eta(y0, 0), whisker(t.theta(f->codomain()), 0, y0)});
    return same(lhs, canonical_iso(y0, lhs->dst()), policy);
  });
  run.run(group + ".naturality", [&] {
    return first_failure({[&] { return labelled("t̃[f]", cell_natural(t.eta(f, j))); },
                          [&] { return labelled("t̂[f,g]", cell_natural(t.mu(f, j, g, k))); },
                          [&] { return labelled("θ", cell_natural(t.theta(f->codomain()))); }});
  });
}

/// Another adjacent-swap word for the same permutation: the braid relation
/// for 010 and 101, otherwise a cancelling pair prepended.
std::vector<int> alternative_word(const std::vector<int>& word) {
  if (word == std::vector<int>{0, 1, 0}) return {1, 0, 1};
  if (word == std::vector<int>{1, 0, 1}) return {0, 1, 0};
  std::vector<int> out = {word.empty() ? 0 : word[0], word.empty() ? 0 : word[0]};
  out.insert(out.end(), word.begin(), word.end());
  return out;
}

struct Square {
  CellPtr alpha;  // h ∘ Jf => Tf' ∘ (g_1, …, g_n)
  MultiMap h;
  FunctorPtr f;
  FunctorPtr f_prime;
  std::vector<MultiMap> gs;
};

std::vector<MultiMap> units_of(const FunctorPtr& f) {
  std::vector<MultiMap> out;
  for (const auto& c : f->slots()) out.push_back(unit_map(c));
  return out;
}

/// The square of lift(u) over f: α = ī[u∘f] after identifying y∘Ju∘Jf.
Square lifted_square(const PresheafMonad& t, const FunctorPtr& u, const FunctorPtr& f) {
  Square s;
  s.h = t.lift(u);
  s.f = f;
  s.f_prime = compose_multifunctor(u, 0, f);
  s.gs = units_of(f);
  auto ibar = t.unit_square(s.f_prime);
  s.alpha = chain({canonical_iso(reindex_at(s.h, 0, f), ibar->src()), ibar});
  return s;
}

CellPtr whisker_all(CellPtr c, const std::vector<MultiMap>& gs) {
  for (int i = 0; i < static_cast<int>(gs.size()); ++i) c = whisker(c, i, gs[i]);
  return c;
}

std::vector<MultiMap> strengthened(const std::vector<MultiMap>& gs) {
  std::vector<MultiMap> out;
  for (const auto& g : gs) out.push_back(strengthen(g, 0));
  return out;
}

/// Finite data of a map with only Fin slots as a set system: nodes are
/// (object tuple, codomain object), arrows the codomain and slot actions.
struct MapSystem {
  SetSystem system;
  std::vector<Args> tuples;
  int codomain_objects = 0;
};

MapSystem map_system(const MultiMap& m, const std::vector<Args>& tuples) {
  MapSystem out;
  out.tuples = tuples;
  const auto& y = *m->codomain();
  out.codomain_objects = y.num_objects();
  std::map<std::string, int> tuple_id;
  for (size_t i = 0; i < tuples.size(); ++i) tuple_id[args_key(tuples[i])] = static_cast<int>(i);
  auto node = [&](int t, ObjId z) { return t * y.num_objects() + z; };
  for (size_t ti = 0; ti < tuples.size(); ++ti) {
    const int t = static_cast<int>(ti);
    auto v = m->evaluate(tuples[t]);
    for (ObjId z = 0; z < y.num_objects(); ++z) out.system.sizes.push_back(v->size(z));
    for (MorId u = 0; u < y.num_morphisms(); ++u)
      if (!y.is_identity(u)) out.system.arrows.push_back({node(t, y.tgt(u)), node(t, y.src(u)), v->act(u)});
    for (int i = 0; i < m->arity(); ++i) {
      const auto& c = *m->slots()[i].cat;
      ObjId b = std::get<ObjId>(tuples[t][i]);
      for (MorId g = 0; g < c.num_morphisms(); ++g) {
        if (c.src(g) != b || c.is_identity(g)) continue;
        auto next = tuples[t];
        next[i] = c.tgt(g);
        auto act = m->evaluate_mor(tuples[t], i, g);
        int t2 = tuple_id.at(args_key(next));
        for (ObjId z = 0; z < y.num_objects(); ++z) out.system.arrows.push_back({node(t, z), node(t2, z), act->at(z)});
      }
    }
  }
  return out;
}

/// Same graph as `shape`, with the sizes and maps of `m`.
SetSystem like(const MapSystem& shape, const MultiMap& m) {
  auto other = map_system(m, shape.tuples);
  return other.system;
}

CellPtr family_cell(const MultiMap& src, const MultiMap& dst, const MapSystem& shape, const Family& fam) {
  std::map<std::string, int> tuple_id;
  for (size_t i = 0; i < shape.tuples.size(); ++i) tuple_id[args_key(shape.tuples[i])] = static_cast<int>(i);
  const int ny = shape.codomain_objects;
  return make_cell(src, dst, "β", [=](const Args& args) {
    int t = tuple_id.at(args_key(args));
    std::vector<std::vector<int>> comps(ny);
    for (ObjId z = 0; z < ny; ++z) comps[z] = fam[t * ny + z];
    return std::make_shared<const PresheafMorphism>(src->evaluate(args), dst->evaluate(args), std::move(comps));
  });
}

PshMorPtr element_map(const CatPtr& x, const PshPtr& p, ObjId a, int e) {
  // ē : y a -> P sends u : b -> a to P(u)(e).
  auto ya = representable(x, a);
  std::vector<std::vector<int>> comps(x->num_objects());
  for (ObjId b = 0; b < x->num_objects(); ++b)
    for (MorId u : x->hom(b, a)) comps[b].push_back(p->apply(u, e));
  return std::make_shared<const PresheafMorphism>(ya, p, std::move(comps));
}

constexpr std::int64_t kEnumerationBudget = 200000;

/// Nat(f^t P, G P) restricts bijectively onto the cocones from f over the
/// elements of P into G P, for every sample P in slot j and object tuple elsewhere.
Verdict cocone_bijection(const PresheafMonad& t, const MultiMap& f, const MultiMap& big_g, int j, int& checked,
                         int& skipped) {
  const auto ft = strengthen(f, j);
  const auto x = slot_cat(f, j);
  const auto& y = *f->codomain();
  auto eta = t.eta(f, j);
  auto rest = object_tuples(f->slots());
  for (const auto& p : sample_family(x)) {
    for (const auto& base : rest) {
      if (std::get<ObjId>(base[j]) != 0) continue;
      Args args = base;
      args[j] = p;
      auto target = big_g->evaluate(args);
      // Cocones: one map f(…,a,…) -> G P per element (a, e), compatible along el(P).
      auto index = element_index(*p);
      SetSystem src, dst;
      const int ny = y.num_objects();
      std::vector<PshPtr> fvals;
      for (const auto& [a, e] : index.nodes) {
        Args at = base;
        at[j] = a;
        fvals.push_back(f->evaluate(at));
      }
      const int nodes = static_cast<int>(index.nodes.size());
      for (int n = 0; n < nodes; ++n)
        for (ObjId z = 0; z < ny; ++z) {
          src.sizes.push_back(fvals[n]->size(z));
          dst.sizes.push_back(target->size(z));
        }
      for (int n = 0; n < nodes; ++n)
        for (MorId u = 0; u < y.num_morphisms(); ++u) {
          if (y.is_identity(u)) continue;
          src.arrows.push_back({n * ny + y.tgt(u), n * ny + y.src(u), fvals[n]->act(u)});
          dst.arrows.push_back({n * ny + y.tgt(u), n * ny + y.src(u), target->act(u)});
        }
      for (const auto& arrow : index.arrows) {
        Args at = base;
        at[j] = index.nodes[arrow.src].first;
        auto act = f->evaluate_mor(at, j, arrow.base);
        for (ObjId z = 0; z < ny; ++z) {
          std::vector<int> id(target->size(z));
          std::iota(id.begin(), id.end(), 0);
          src.arrows.push_back({arrow.src * ny + z, arrow.dst * ny + z, act->at(z)});
          dst.arrows.push_back({arrow.src * ny + z, arrow.dst * ny + z, id});
        }
      }
      std::vector<Family> cocones;
      std::vector<PshMorPtr> candidates;
      try {
        cocones = enumerate_natural_families(src, dst, kEnumerationBudget);
        candidates = enumerate_nat_trans(ft->evaluate(args), target, kEnumerationBudget);
      } catch (const BudgetExceeded&) {
        ++skipped;
        continue;
      }
      ++checked;
      std::set<Family> cocone_set(cocones.begin(), cocones.end());
      auto where = describe_args(args, ft->slots());
      // Candidates: every natural map f^t P -> G P, restricted along the coprojections.
      std::set<Family> seen;
      for (const auto& cand : candidates) {
        Family restricted;
        for (int n = 0; n < nodes; ++n) {
          const auto& [a, e] = index.nodes[n];
          Args at = base;
          at[j] = a;
          Args at_y = base;
          at_y[j] = representable(x, a);
          auto unit = eta->at(at);
          auto push = ft->evaluate_mor(at_y, j, element_map(x, p, a, e));
          auto c = compose(*cand, *compose(*push, *unit));
          for (ObjId z = 0; z < ny; ++z) restricted.push_back(c->at(z));
        }
        if (!cocone_set.count(restricted))
          return {false, "at " + where + ": a natural map restricts to a non-cocone"};
        if (!seen.insert(restricted).second)
          return {false, "at " + where + ": two natural maps restrict to the same cocone"};
      }
      if (seen.size() != cocone_set.size())
        return {false, "at " + where + ": " + std::to_string(cocone_set.size() - seen.size()) +
                           " cocones have no extension (" + std::to_string(cocone_set.size()) + " cocones, " +
                           std::to_string(candidates.size()) + " natural maps)"};
    }
  }
  return {};
}

}  // namespace

const std::vector<LawDoc>& law_table() { return kLaws; }

std::vector<std::string> laws_of(LawGroup group) {
  std::vector<std::string> out;
  for (const auto& l : kLaws)
    if (l.group == group) out.push_back(l.id);
  return out;
}

std::vector<LawReport> check_relpseudomonad(const Instance& inst, const PresheafMonad& t, Policy policy) {
  Runner run(inst, policy);
  check_strength_laws(run, "relpsm", inst, t, policy);
  return run.take();
}

std::vector<LawReport> check_strong(const Instance& inst, const PresheafMonad& t, Policy policy) {
  Runner run(inst, policy);
  check_strength_laws(run, "strong", inst, t, policy);
  return run.take();
}

std::vector<LawReport> check_multifunctor(const Instance& inst, const PresheafMonad& t, Policy policy) {
  Runner run(inst, policy);
  const auto f = inst.functor("f").table, g = inst.functor("g").table, h = inst.functor("h").table;
  const int i = inst.param("i"), j = inst.param("j");
  const auto y = f->codomain();
  run.run("multifunctor.unit-left", [&] {
    auto lhs = chain({t.apply_mult(identity_multifunctor(y), 0, f), whisker(t.apply_unit(y), 0, t.apply(f))});
    return same(lhs, canonical_iso(lhs->src(), lhs->dst()), policy);
  });
  run.run("multifunctor.unit-right", [&] {
    for (int s = 0; s < f->arity(); ++s) {
      auto x = f->slots()[s];
      auto lhs = chain({t.apply_mult(f, s, identity_multifunctor(x)), whisker(t.apply(f), s, t.apply_unit(x))});
      auto v = labelled("slot " + std::to_string(s), same(lhs, canonical_iso(lhs->src(), lhs->dst()), policy));
      if (!v.equal) return v;
    }
    return Verdict{};
  });
  run.run("multifunctor.associativity", [&] {
    auto lhs = chain({t.apply_mult(f, i, compose_multifunctor(g, j, h)), whisker(t.apply(f), i, t.apply_mult(g, j, h))});
    auto rhs = chain({t.apply_mult(compose_multifunctor(f, i, g), i + j, h),
                      whisker(t.apply_mult(f, i, g), i + j, t.apply(h))});
    return same(lhs, rhs, policy);
  });
  run.run("multifunctor.invertible", [&] {
    return first_failure({[&] { return labelled("T̂[f,g]", cell_bijective(t.apply_mult(f, i, g), policy)); },
                          [&] { return labelled("T̂[g,h]", cell_bijective(t.apply_mult(g, j, h), policy)); },
                          [&] { return labelled("T̃", cell_bijective(t.apply_unit(y), policy)); }});
  });
  return run.take();
}

std::vector<LawReport> check_pseudocommutativity(const Instance& inst, const PresheafMonad& t, Policy policy) {
  Runner run(inst, policy);
  const auto f = inst.map("f").map;
  const int s = 0, u = 1;
  const auto fs = strengthen(f, s), fu = strengthen(f, u);
  run.run("pscom.unit-first", [&] {
    auto lhs = chain({t.eta(fu, s), whisker(t.gamma(f, s, u), s, unit_map(slot_cat(f, s)))});
    auto rhs = strengthen_cell(t.eta(f, s), u);
    return same(lhs, rhs, policy);
  });
  run.run("pscom.unit-second", [&] {
    auto first = strengthen_cell(t.eta(f, u), s);
    auto gy = whisker(t.gamma(f, s, u), u, unit_map(slot_cat(f, u)));
    auto lhs = chain({first, canonical_iso(first->dst(), gy->src()), gy});
    return same(lhs, t.eta(fs, u), policy);
  });
  run.run("pscom.precompose-first", [&] {
    const auto g = inst.map("g").map;
    const int l = inst.param("l"), m = g->arity();
    const int s2 = s + l, u2 = u + m - 1;
    auto lhs = chain({t.mu(fu, s, g, l), whisker(t.gamma(f, s, u), s, strengthen(g, l))});
    auto big = compose_at(fs, s, g);
    auto a = strengthen_cell(whisker(t.gamma(f, s, u), s, g), s2);
    auto gam = t.gamma(big, s2, u2);
    auto b = strengthen_cell(t.mu(f, s, g, l), u2);
    auto rhs = chain({a, canonical_iso(a->dst(), gam->src()), gam, canonical_iso(gam->dst(), b->src()), b});
    return same(lhs, rhs, policy);
  });
  run.run("pscom.precompose-second", [&] {
    const auto h = inst.map("h").map;
    const int r = inst.param("r");
    const int u2 = u + r;
    auto a = strengthen_cell(t.mu(f, u, h, r), s);
    auto gh = whisker(t.gamma(f, s, u), u, strengthen(h, r));
    auto lhs = chain({a, canonical_iso(a->dst(), gh->src()), gh});
    auto big = compose_at(fu, u, h);
    auto gam = t.gamma(big, s, u2);
    auto b = strengthen_cell(whisker(t.gamma(f, s, u), u, h), u2);
    auto c = t.mu(fs, u, h, r);
    auto rhs = chain({gam, canonical_iso(gam->dst(), b->src()), b, canonical_iso(b->dst(), c->src()), c});
    return same(lhs, rhs, policy);
  });
  run.run("pscom.braiding", [&] {
    if (!inst.has_map("f3")) return Verdict{};
    const auto f3 = inst.map("f3").map;
    const int a = 0, b = 1, c = 2;
    auto top = chain({strengthen_cell(t.gamma(f3, b, c), a), t.gamma(strengthen(f3, b), a, c),
                      strengthen_cell(t.gamma(f3, a, b), c)});
    auto bottom = chain({t.gamma(strengthen(f3, c), a, b), strengthen_cell(t.gamma(f3, a, c), b),
                         t.gamma(strengthen(f3, a), b, c)});
    return same(top, bottom, policy);
  });
  run.run("pscom.invertible", [&] {
    auto round = vcomp(t.gamma_inverse(f, s, u), t.gamma(f, s, u));
    return first_failure({[&] { return labelled("γ", cell_bijective(t.gamma(f, s, u), policy)); },
                          [&] { return labelled("γ⁻¹·γ", same(round, identity_cell(round->src()), policy)); }});
  });
  return run.take();
}

std::vector<LawReport> check_permutations(const Instance& inst, const PresheafMonad& t, Policy policy) {
  Runner run(inst, policy);
  const auto f3 = inst.map("f3").map;
  run.run("permutation.factorizations", [&] {
    std::vector<int> from = {0, 1, 2}, to = from;
    do {
      auto word = bubble_swaps(from, to);
      auto other = alternative_word(word);
      auto a = t.gamma_perm(f3, from, to, word);
      auto b = t.gamma_perm(f3, from, to, other);
      auto v = same(a, b, policy);
      if (!v.equal) {
        std::string name = "σ=(" + std::to_string(to[0]) + std::to_string(to[1]) + std::to_string(to[2]) + ")";
        return labelled(name, v);
      }
    } while (std::next_permutation(to.begin(), to.end()));
    return Verdict{};
  });
  return run.take();
}

std::vector<LawReport> check_multicategorical(const Instance& inst, const PresheafMonad& t, Policy policy) {
  Runner run(inst, policy);
  const auto f = inst.functor("f").table, u = inst.functor("u").table, v = inst.functor("v").table;
  run.run("multicategorical.eta", [&] {
    auto sq = lifted_square(t, u, f);
    auto ht = strengthen(sq.h, 0);
    auto astar = t.extend_square(sq.alpha, sq.h, sq.f, sq.f_prime, sq.gs);
    auto a = whisker(t.eta(sq.h, 0), 0, sq.f);
    auto b = whisker(ht, 0, t.unit_square(sq.f));
    auto c = whisker_all(astar, sq.gs);
    auto lhs = chain({a, canonical_iso(a->dst(), b->src()), b, canonical_iso(b->dst(), c->src()), c});
    std::vector<CellPtr> units;
    for (const auto& g : sq.gs) units.push_back(t.eta(g, 0));
    auto rhs = chain({sq.alpha, t.after(t.apply(sq.f_prime), units)});
    return same(lhs, rhs, policy);
  });
  run.run("multicategorical.mu", [&] {
    auto alpha = lifted_square(t, u, f);
    auto beta = lifted_square(t, v, alpha.f_prime);
    auto hpt = strengthen(beta.h, 0);
    auto astar = t.extend_square(alpha.alpha, alpha.h, alpha.f, alpha.f_prime, alpha.gs);
    auto bstar = t.extend_square(beta.alpha, beta.h, beta.f, beta.f_prime, beta.gs);
    const auto gs_t = strengthened(alpha.gs);

    auto a = whisker(t.mu(beta.h, 0, alpha.h, 0), 0, t.apply(f));
    auto b = whisker(hpt, 0, astar);
    auto c = whisker_all(bstar, gs_t);
    auto lhs = chain({a, canonical_iso(a->dst(), b->src()), b, canonical_iso(b->dst(), c->src()), c});

    auto big_h = compose_at(hpt, 0, alpha.h);
    std::vector<MultiMap> big_g;
    for (size_t i = 0; i < alpha.gs.size(); ++i) big_g.push_back(compose_at(strengthen(beta.gs[i], 0), 0, alpha.gs[i]));
    auto p = whisker(hpt, 0, alpha.alpha);
    auto q = whisker_all(bstar, alpha.gs);
    auto composite_target = t.after(t.apply(beta.f_prime), big_g);
    auto composite = chain({canonical_iso(reindex_at(big_h, 0, f), p->src()), p, canonical_iso(p->dst(), q->src()), q,
                            canonical_iso(q->dst(), composite_target)});
    auto extended = t.extend_square(composite, big_h, f, beta.f_prime, big_g);
    std::vector<CellPtr> mults;
    for (size_t i = 0; i < alpha.gs.size(); ++i) mults.push_back(t.mu(beta.gs[i], 0, alpha.gs[i], 0));
    auto rhs = chain({extended, t.after(t.apply(beta.f_prime), mults)});
    return same(lhs, rhs, policy);
  });
  run.run("multicategorical.theta", [&] {
    const auto units = units_of(f);
    const auto y = f->codomain();
    auto ext = t.extend_square(t.unit_square(f), unit_map(y), f, f, units);
    std::vector<CellPtr> thetas;
    for (const auto& c : f->slots()) thetas.push_back(t.theta(c));
    auto lhs = chain({ext, t.after(t.apply(f), thetas)});
    auto rhs = whisker(t.theta(y), 0, t.apply(f));
    return same(lhs, rhs, policy);
  });
  return run.take();
}

std::vector<LawReport> check_lax_idempotent(const Instance& inst, const PresheafMonad& t, Policy policy) {
  Runner run(inst, policy);
  const auto f = inst.map("f").map, g = inst.map("g").map;
  const int j = inst.param("j");
  const auto ft = strengthen(f, j);
  const auto big_g = strengthen(g, j);
  const auto yx = unit_map(slot_cat(f, j));
  run.run("laxid.unit-invertible", [&] { return cell_bijective(t.eta(f, j), policy); });
  run.run("laxid.triangle-strengthen", [&] {
    auto lhs = chain({strengthen_cell(t.eta(f, j), j), t.sigma(ft, j)});
    return same(lhs, identity_cell(ft), policy);
  });
  run.run("laxid.triangle-unit", [&] {
    auto gy = compose_at(big_g, j, yx);
    auto lhs = chain({t.eta(gy, j), whisker(t.sigma(big_g, j), j, yx)});
    return same(lhs, identity_cell(gy), policy);
  });
  run.run("laxid.kan-universal", [&] {
    auto gy = compose_at(big_g, j, yx);
    auto shape = map_system(f, object_tuples(f->slots()));
    auto target = like(shape, gy);
    for (const auto& fam : enumerate_natural_families(shape.system, target)) {
      auto beta = family_cell(f, gy, shape, fam);
      auto alpha = untranspose(beta, big_g, j);
      auto v = two_cell_equal(transpose(alpha, j), beta, Policy::kTranspose);
      if (!v.equal) return labelled("transpose of untranspose", v);
    }
    int checked = 0, skipped = 0;
    auto v = cocone_bijection(t, f, big_g, j, checked, skipped);
    if (v.equal)
      v.witness = std::to_string(checked) + " sample presheaves enumerated, " + std::to_string(skipped) +
                  " over the enumeration budget";
    return v;
  });
  return run.take();
}

std::vector<LawReport> check_presheaf(const Instance& inst, const PresheafMonad&, Policy policy) {
  Runner run(inst, policy);
  run.run("presheaf.profunctor-valid", [&] {
    for (const auto& m : inst.maps)
      if (auto why = validate_profunctor(*m.table); !why.empty()) return Verdict{false, "map " + m.name + ": " + why};
    return Verdict{};
  });
  run.run("presheaf.yoneda", [&] {
    for (size_t i = 0; i < inst.cats.size(); ++i) {
      const auto& c = inst.cats[i];
      for (ObjId a = 0; a < c->num_objects(); ++a)
        for (ObjId b = 0; b < c->num_objects(); ++b) {
          auto n = enumerate_nat_trans(representable(c, a), representable(c, b)).size();
          if (n != c->hom(a, b).size())
            return Verdict{false, "category " + std::to_string(i) + " objects " + c->object_name(a) + "," +
                                      c->object_name(b) + ": " + std::to_string(n) + " natural maps vs " +
                                      std::to_string(c->hom(a, b).size()) + " morphisms"};
        }
    }
    return Verdict{};
  });
  return run.take();
}

std::vector<LawReport> check_instance(const Instance& inst, Policy policy, Defect defect) {
  PresheafMonad t(defect);
  switch (inst.law) {
    case LawGroup::kRelPseudomonad: return check_relpseudomonad(inst, t, policy);
    case LawGroup::kStrong: return check_strong(inst, t, policy);
    case LawGroup::kMultifunctor: return check_multifunctor(inst, t, policy);
    case LawGroup::kPseudocommutativity: return check_pseudocommutativity(inst, t, policy);
    case LawGroup::kPermutation: return check_permutations(inst, t, policy);
    case LawGroup::kMulticategorical: return check_multicategorical(inst, t, policy);
    case LawGroup::kLaxIdempotent: return check_lax_idempotent(inst, t, policy);
    case LawGroup::kPresheaf: return check_presheaf(inst, t, policy);
  }
  throw Error("unknown law group");
}

int SuiteReport::failures() const {
  int n = 0;
  for (const auto& r : reports) n += r.pass ? 0 : 1;
  return n;
}

SuiteReport run_suite(const SuiteConfig& cfg) {
  validate_config(cfg.gen);
  if (cfg.instances < 0) throw Error("instances must be non-negative");
  SuiteReport out;
  const auto merges_before = colimit_merge_count();
  for (LawGroup law : cfg.laws) {
    bool recorded = false;
    for (int i = 0; i < cfg.instances; ++i) {
      auto inst = gen_instance(cfg.gen, law, i);
      if (cfg.defect == Defect::kContravarianceBroken) corrupt_contravariance(inst);
      else inst.defect = to_string(cfg.defect);
      auto reports = check_instance(inst, cfg.policy, cfg.defect);
      bool failed = false;
      for (auto& r : reports) {
        failed = failed || !r.pass;
        out.reports.push_back(std::move(r));
      }
      if (failed && !recorded) {
        out.failing.push_back(inst);
        recorded = true;
      }
    }
  }
  out.merges = colimit_merge_count() - merges_before;
  return out;
}

namespace {

std::string config_line(const SuiteConfig& cfg) {
  std::vector<std::string> laws;
  for (LawGroup l : cfg.laws) laws.push_back(to_string(l));
  std::ostringstream os;
  os << "seed=" << cfg.gen.seed << "\tinstances=" << cfg.instances << "\tmax-objects=" << cfg.gen.max_objects
     << "\tmax-edges=" << cfg.gen.max_edges << "\tmax-values=" << cfg.gen.max_values << "\tlaws=" << text::join(laws, ",")
     << "\tpolicy=" << to_string(cfg.policy) << "\tinject=" << to_string(cfg.defect);
  return os.str();
}

}  // namespace

std::string format_machine(const SuiteConfig& cfg, const SuiteReport& report) {
  std::ostringstream os;
  os << "relmonad-report 1\n";
  os << "config\t" << config_line(cfg) << "\n";
  for (const auto& r : report.reports)
    os << "law\t" << r.law << "\t" << r.instance << "\t" << r.seed << "\t" << to_string(r.policy) << "\t"
       << (r.pass ? "pass" : "fail") << "\t" << (r.pass ? "-" : r.witness) << "\n";
  os << "summary\ttotal=" << report.reports.size() << "\tfailures=" << report.failures() << "\n";
  return os.str();
}

std::string format_text(const SuiteConfig& cfg, const SuiteReport& report) {
  std::ostringstream os;
  os << "config: " << config_line(cfg) << "\n";
  for (const auto& r : report.reports) {
    os << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(30) << r.law << " " << r.instance << " ["
       << to_string(r.policy) << ", " << std::fixed << std::setprecision(3) << r.seconds << "s]\n";
    if (!r.pass) os << "     witness: " << r.witness << "\n";
    if (r.pass && !r.note.empty()) os << "     note: " << r.note << "\n";
  }
  os << report.reports.size() << " checks, " << report.failures() << " failures, " << report.merges
     << " colimit merges\n";
  return os.str();
}

}  // namespace relmonad
