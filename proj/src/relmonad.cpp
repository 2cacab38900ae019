#include "relmonad/relmonad.hpp"

#include <algorithm>
#include <numeric>

namespace relmonad {

namespace {

struct DefectName {
  Defect defect;
  const char* name;
};

constexpr DefectName kDefectNames[] = {
    {Defect::kNone, "none"},
    {Defect::kThetaCorrupt, "theta-corrupt"},
    {Defect::kMultCorrupt, "that-corrupt"},
    {Defect::kGammaIdentity, "gamma-identity"},
    {Defect::kTOrderScrambled, "t-order-scrambled"},
    {Defect::kNaturalityBroken, "naturality-broken"},
    {Defect::kContravarianceBroken, "contravariance-broken"},
    {Defect::kSigmaCorrupt, "sigma-corrupt"},
    {Defect::kUnitSquareDropped, "unit-square-dropped"},
};

std::vector<int> range(int from, int to) {
  std::vector<int> out;
  for (int i = from; i < to; ++i) out.push_back(i);
  return out;
}

CellPtr strengthen_cell_on(CellPtr c, const std::vector<int>& slots) {
  for (int s : slots) c = strengthen_cell(c, s);
  return c;
}

}  // namespace

const char* to_string(Defect d) {
  for (const auto& [defect, name] : kDefectNames)
    if (defect == d) return name;
  return "?";
}

std::optional<Defect> parse_defect(std::string_view name) {
  for (const auto& [defect, n] : kDefectNames)
    if (name == n) return defect;
  return std::nullopt;
}

const std::vector<Defect>& all_defects() {
  static const std::vector<Defect> out = {Defect::kThetaCorrupt,     Defect::kMultCorrupt,
                                          Defect::kGammaIdentity,    Defect::kTOrderScrambled,
                                          Defect::kNaturalityBroken, Defect::kContravarianceBroken,
                                          Defect::kSigmaCorrupt,     Defect::kUnitSquareDropped};
  return out;
}

CellPtr corrupt_cell(const CellPtr& cell, std::function<bool(const Args&)> where) {
  return make_cell(cell->src(), cell->dst(), cell->name() + "!", [cell, where](const Args& args) {
    auto m = cell->at(args);
    if (where && !where(args)) return m;
    auto comps = m->components();
    for (auto& c : comps)
      if (c.size() >= 2 && c[0] != c[1]) {
        std::swap(c[0], c[1]);
        return std::make_shared<const PresheafMorphism>(m->src(), m->dst(), std::move(comps));
      }
    return m;
  });
}

MultiMap strengthen_in_order(MultiMap f, const std::vector<int>& order) {
  for (int s : order) f = strengthen(f, s);
  return f;
}

std::vector<int> bubble_swaps(const std::vector<int>& from, const std::vector<int>& to) {
  if (from.size() != to.size() || !std::is_permutation(from.begin(), from.end(), to.begin()))
    throw TypeMismatch("bubble_swaps: orders are not permutations of each other");
  std::vector<int> rank(from.size());
  for (size_t i = 0; i < from.size(); ++i)
    rank[i] = static_cast<int>(std::find(to.begin(), to.end(), from[i]) - to.begin());
  std::vector<int> swaps;
  for (size_t pass = 0; pass < rank.size(); ++pass)
    for (size_t p = 0; p + 1 < rank.size(); ++p)
      if (rank[p] > rank[p + 1]) {
        std::swap(rank[p], rank[p + 1]);
        swaps.push_back(static_cast<int>(p));
      }
  return swaps;
}

CellPtr PresheafMonad::eta(const MultiMap& f, int j) const {
  auto cell = unit_cell(f, j);
  if (defect_ != Defect::kNaturalityBroken) return cell;
  const CatPtr x = f->slots()[j].cat;
  return corrupt_cell(cell, [j, x](const Args& args) { return std::get<ObjId>(args[j]) == x->num_objects() - 1; });
}

CellPtr PresheafMonad::mu(const MultiMap& f, int j, const MultiMap& g, int k) const {
  auto cell = mult_cell(f, j, g, k);
  return defect_ == Defect::kMultCorrupt ? corrupt_cell(cell) : cell;
}

CellPtr PresheafMonad::theta(const CatPtr& x) const {
  auto cell = theta_cell(x);
  return defect_ == Defect::kThetaCorrupt ? corrupt_cell(cell) : cell;
}

CellPtr PresheafMonad::sigma(const MultiMap& g, int j) const {
  auto cell = counit_cell(g, j);
  return defect_ == Defect::kSigmaCorrupt ? corrupt_cell(cell) : cell;
}

MultiMap PresheafMonad::lift(const FunctorPtr& f) const { return reindex_at(unit_map(f->codomain()), 0, f); }

MultiMap PresheafMonad::apply(const FunctorPtr& f) const {
  auto order = range(0, f->arity());
  if (defect_ == Defect::kTOrderScrambled) std::reverse(order.begin(), order.end());
  return strengthen_in_order(lift(f), order);
}

CellPtr PresheafMonad::apply_unit(const CatPtr& x) const {
  auto t1 = apply(identity_multifunctor(x));
  return vcomp(theta(x), canonical_iso(t1, strengthen(unit_map(x), 0)));
}

CellPtr PresheafMonad::apply_mult(const FunctorPtr& f, int i, const FunctorPtr& g) const {
  const int n = f->arity(), m = g->arity();
  const int total = n + m - 1;
  auto src = apply(compose_multifunctor(f, i, g));
  auto fi = strengthen_in_order(lift(f), range(0, i));
  auto gbar = lift(g);
  std::vector<CellPtr> steps;
  auto lifted = strengthen_cell_on(whisker(eta(fi, i), i, g), range(i, total));
  steps.push_back(canonical_iso(src, lifted->src()));
  steps.push_back(lifted);
  for (int r = 0; r < m; ++r) {
    auto c = mu(fi, i, strengthen_in_order(gbar, range(0, r)), r);
    steps.push_back(strengthen_cell_on(c, range(i + r + 1, total)));
  }
  steps.push_back(canonical_iso(steps.back()->dst(), compose_at(apply(f), i, apply(g))));
  auto out = chain(steps);
  return make_cell(out->src(), out->dst(), "T̂", [out](const Args& args) { return out->at(args); });
}

MultiMap PresheafMonad::after(const MultiMap& outer, const std::vector<MultiMap>& gs) const {
  if (static_cast<int>(gs.size()) != outer->arity()) throw TypeMismatch("after: one map per slot");
  MultiMap out = outer;
  for (int i = 0; i < static_cast<int>(gs.size()); ++i) {
    if (gs[i]->arity() != 1) throw TypeMismatch("after: maps must be unary");
    out = compose_at(out, i, gs[i]);
  }
  return out;
}

CellPtr PresheafMonad::after(const MultiMap& outer, const std::vector<CellPtr>& cells) const {
  const int n = static_cast<int>(cells.size());
  if (n != outer->arity()) throw TypeMismatch("after: one cell per slot");
  std::vector<CellPtr> steps;
  for (int i = 0; i < n; ++i) {
    MultiMap context = outer;
    for (int j = 0; j < n; ++j)
      if (j != i) context = compose_at(context, j, j < i ? cells[j]->dst() : cells[j]->src());
    steps.push_back(whisker(context, i, cells[i]));
  }
  if (steps.empty()) return identity_cell(outer);
  return chain(steps);
}

CellPtr PresheafMonad::unit_square(const FunctorPtr& f) const {
  const int n = f->arity();
  auto fbar = lift(f);
  std::vector<MultiMap> units;
  for (const auto& c : f->slots()) units.push_back(unit_map(c));
  auto target = after(apply(f), units);
  if (defect_ == Defect::kUnitSquareDropped) return canonical_iso(fbar, target);
  if (n == 0) return canonical_iso(fbar, target);
  std::vector<CellPtr> steps;
  for (int r = 0; r < n; ++r) {
    auto c = eta(strengthen_in_order(fbar, range(0, r)), r);
    for (int s = 0; s < r; ++s) c = whisker(c, s, units[s]);
    steps.push_back(c);
  }
  steps.push_back(canonical_iso(steps.back()->dst(), target));
  auto out = chain(steps);
  return make_cell(out->src(), out->dst(), "ī", [out](const Args& args) { return out->at(args); });
}

CellPtr PresheafMonad::gamma(const MultiMap& g, int s, int t) const {
  if (!(s < t) || !g->slots()[s].is_fin() || !g->slots()[t].is_fin())
    throw TypeMismatch("gamma: slots must be Fin with s < t");
  auto gts = strengthen(strengthen(g, t), s);
  auto gst = strengthen(strengthen(g, s), t);
  if (defect_ == Defect::kGammaIdentity)
    return make_cell(gts, gst, "γ=1", [gts, gst](const Args& args) {
      auto a = gts->evaluate(args);
      auto b = gst->evaluate(args);
      std::vector<std::vector<int>> comps(a->sizes().size());
      for (size_t z = 0; z < comps.size(); ++z) {
        comps[z].resize(a->size(static_cast<int>(z)));
        std::iota(comps[z].begin(), comps[z].end(), 0);
      }
      return std::make_shared<const PresheafMorphism>(a, b, std::move(comps));
    });
  auto ys = unit_map(g->slots()[s].cat);
  auto lifted = strengthen_cell(strengthen_cell(eta(g, s), t), s);
  auto counit = sigma(gst, s);
  auto out = chain({lifted, canonical_iso(lifted->dst(), counit->src()), counit});
  return make_cell(gts, gst, "γ[" + g->label() + "]", [out](const Args& args) { return out->at(args); });
}

CellPtr PresheafMonad::gamma_inverse(const MultiMap& g, int s, int t) const {
  if (!(s < t) || !g->slots()[s].is_fin() || !g->slots()[t].is_fin())
    throw TypeMismatch("gamma: slots must be Fin with s < t");
  auto gts = strengthen(strengthen(g, t), s);
  auto gst = strengthen(strengthen(g, s), t);
  if (defect_ == Defect::kGammaIdentity) return inverse(gamma(g, s, t));
  auto lifted = strengthen_cell(strengthen_cell(eta(g, t), s), t);
  auto counit = sigma(gts, t);
  auto out = chain({lifted, canonical_iso(lifted->dst(), counit->src()), counit});
  return make_cell(gst, gts, "γ⁻¹[" + g->label() + "]", [out](const Args& args) { return out->at(args); });
}

CellPtr PresheafMonad::gamma_perm(const MultiMap& f, const std::vector<int>& from, const std::vector<int>& to,
                                  std::optional<std::vector<int>> swaps) const {
  std::vector<int> word = swaps ? *swaps : bubble_swaps(from, to);
  std::vector<int> cur = from;
  std::vector<CellPtr> steps;
  for (int p : word) {
    if (p < 0 || p + 1 >= static_cast<int>(cur.size())) throw TypeMismatch("gamma_perm: swap position out of range");
    auto g = strengthen_in_order(f, std::vector<int>(cur.begin(), cur.begin() + p));
    int a = cur[p], b = cur[p + 1];
    auto c = a > b ? gamma(g, b, a) : gamma_inverse(g, a, b);
    steps.push_back(strengthen_cell_on(c, std::vector<int>(cur.begin() + p + 2, cur.end())));
    std::swap(cur[p], cur[p + 1]);
  }
  if (cur != to) throw TypeMismatch("gamma_perm: swaps do not reach the target order");
  if (steps.empty()) return identity_cell(strengthen_in_order(f, from));
  return chain(steps);
}

CellPtr PresheafMonad::extend_square(const CellPtr& alpha, const MultiMap& h, const FunctorPtr& f,
                                     const FunctorPtr& f_prime, const std::vector<MultiMap>& gs) const {
  const int n = f->arity();
  if (f_prime->arity() != n || static_cast<int>(gs.size()) != n)
    throw TypeMismatch("extend_square: arities of f, f' and g differ");
  auto fbar = lift(f);
  auto fbar_prime = lift(f_prime);
  std::vector<MultiMap> gs_t;
  for (const auto& g : gs) gs_t.push_back(strengthen(g, 0));
  auto all = range(0, n);

  std::vector<CellPtr> steps;
  auto source = compose_at(strengthen(h, 0), 0, apply(f));
  for (int r = n - 1; r >= 0; --r) {
    auto c = inverse(mu(h, 0, strengthen_in_order(fbar, range(0, r)), r));
    steps.push_back(strengthen_cell_on(c, range(r + 1, n)));
  }
  steps.push_back(strengthen_cell_on(inverse(whisker(eta(h, 0), 0, f)), all));
  steps.push_back(strengthen_cell_on(alpha, all));

  std::vector<int> order = all;
  for (int k = 0; k < n; ++k) {
    std::vector<int> next = range(k + 1, n);
    for (int i = 0; i <= k; ++i) next.push_back(i);
    auto c = gamma_perm(fbar_prime, order, next);
    for (int i = 0; i < n; ++i) c = whisker(c, i, i < k ? gs_t[i] : gs[i]);
    steps.push_back(strengthen_cell_on(c, range(k, n)));

    std::vector<int> rest = range(k + 1, n);
    for (int i = 0; i < k; ++i) rest.push_back(i);
    auto m = mu(strengthen_in_order(fbar_prime, rest), k, gs[k], 0);
    for (int i = 0; i < n; ++i)
      if (i != k) m = whisker(m, i, i < k ? gs_t[i] : gs[i]);
    steps.push_back(strengthen_cell_on(m, range(k + 1, n)));
    order = next;
  }
  auto target = after(apply(f_prime), gs_t);
  steps.insert(steps.begin(), canonical_iso(source, steps.front()->src()));
  steps.push_back(canonical_iso(steps.back()->dst(), target));
  auto out = chain(steps);
  return make_cell(out->src(), out->dst(), alpha->name() + "*", [out](const Args& args) { return out->at(args); });
}

}  // namespace relmonad
