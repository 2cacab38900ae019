#include "relmonad/kan.hpp"

#include <algorithm>
#include <map>

namespace relmonad {

namespace {

struct CoendEval {
  ElementIndex index;
  std::vector<PshPtr> fibers;  // per object x of the strengthened slot; null where P(x) is empty
  std::vector<Colimit> colimits;  // per codomain object
  PshPtr value;
};

Args with_arg(const Args& args, int j, Arg value) {
  Args out = args;
  out[j] = std::move(value);
  return out;
}

class StrengthenNode final : public MapNode {
 public:
  StrengthenNode(MultiMap f, int j)
      : MapNode(psh_slot(f->slots(), j), f->codomain(), f->label() + "^t" + std::to_string(j)),
        f_(std::move(f)),
        j_(j) {}

  const MultiMap& base() const { return f_; }
  int slot() const { return j_; }

  bool cocontinuous(int slot) const override { return slot == j_ || f_->cocontinuous(slot); }

  std::shared_ptr<const CoendEval> coend(const Args& args) const {
    std::string key = args_key(args);
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto out = compute(args);
    std::lock_guard lock(mutex_);
    return cache_.emplace(std::move(key), std::move(out)).first->second;
  }

 protected:
  PshPtr do_evaluate(const Args& args) const override { return coend(args)->value; }

  PshMorPtr do_evaluate_mor(const Args& args, int var, const ArgMor& mor) const override {
    auto src = coend(args);
    const auto& y = *codomain();
    const auto& nodes = src->index.nodes;
    std::vector<std::vector<int>> comps(y.num_objects());
    if (var == j_) {
      const auto& phi = std::get<PshMorPtr>(mor);
      auto dst = coend(with_arg(args, j_, phi->dst()));
      for (ObjId z = 0; z < y.num_objects(); ++z)
        for (const auto& [node, a] : src->colimits[z].representative) {
          auto [x, e] = nodes[node];
          comps[z].push_back(dst->colimits[z].coprojection(dst->index.node(x, phi->apply(x, e)), a));
        }
      return std::make_shared<const PresheafMorphism>(src->value, dst->value, std::move(comps));
    }
    Arg target = std::holds_alternative<MorId>(mor) ? Arg{slots()[var].cat->tgt(std::get<MorId>(mor))}
                                                    : Arg{std::get<PshMorPtr>(mor)->dst()};
    auto dst = coend(with_arg(args, var, target));
    const auto& x_cat = *slots()[j_].cat;
    std::vector<PshMorPtr> fiber_maps(x_cat.num_objects());
    for (ObjId x = 0; x < x_cat.num_objects(); ++x)
      if (src->fibers[x]) fiber_maps[x] = f_->evaluate_mor(with_arg(args, j_, x), var, mor);
    for (ObjId z = 0; z < y.num_objects(); ++z)
      for (const auto& [node, a] : src->colimits[z].representative) {
        ObjId x = nodes[node].first;
        comps[z].push_back(dst->colimits[z].coprojection(node, fiber_maps[x]->apply(z, a)));
      }
    return std::make_shared<const PresheafMorphism>(src->value, dst->value, std::move(comps));
  }

 private:
  static std::vector<SlotType> psh_slot(std::vector<SlotType> slots, int j) {
    if (j < 0 || j >= static_cast<int>(slots.size())) throw TypeMismatch("strengthen: slot out of range");
    if (!slots[j].is_fin()) throw TypeMismatch("strengthen: slot " + std::to_string(j) + " is not a Fin slot");
    slots[j].kind = SlotType::Kind::kPsh;
    return slots;
  }

  std::shared_ptr<const CoendEval> compute(const Args& args) const {
    const auto& p = std::get<PshPtr>(args[j_]);
    const auto& x_cat = *slots()[j_].cat;
    const auto& y = *codomain();
    auto out = std::make_shared<CoendEval>();
    out->index = element_index(*p);
    out->fibers.resize(x_cat.num_objects());
    for (ObjId x = 0; x < x_cat.num_objects(); ++x)
      if (p->size(x) > 0) out->fibers[x] = f_->evaluate(with_arg(args, j_, x));
    std::map<MorId, PshMorPtr> arrow_maps;
    for (const auto& arrow : out->index.arrows)
      if (!arrow_maps.count(arrow.base))
        arrow_maps[arrow.base] = f_->evaluate_mor(with_arg(args, j_, x_cat.src(arrow.base)), j_, arrow.base);
    const auto& nodes = out->index.nodes;
    out->colimits.resize(y.num_objects());
    std::vector<int> sizes(y.num_objects());
    for (ObjId z = 0; z < y.num_objects(); ++z) {
      SetDiagram d;
      for (const auto& [x, e] : nodes) d.sizes.push_back(out->fibers[x]->size(z));
      for (const auto& arrow : out->index.arrows)
        d.arrows.push_back({arrow.src, arrow.dst, arrow_maps[arrow.base]->at(z)});
      out->colimits[z] = colimit_finset(d);
      sizes[z] = out->colimits[z].size;
    }
    std::vector<std::vector<int>> act(y.num_morphisms());
    for (MorId u = 0; u < y.num_morphisms(); ++u) {
      ObjId from = y.tgt(u), to = y.src(u);
      for (const auto& [node, a] : out->colimits[from].representative) {
        ObjId x = nodes[node].first;
        act[u].push_back(out->colimits[to].coprojection(node, out->fibers[x]->apply(u, a)));
      }
    }
    out->value = std::make_shared<const Presheaf>(codomain(), std::move(sizes), std::move(act));
    return out;
  }

  MultiMap f_;
  int j_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, std::shared_ptr<const CoendEval>> cache_;
};

const StrengthenNode& as_strengthening(const MultiMap& m, int j) {
  const auto* node = dynamic_cast<const StrengthenNode*>(m.get());
  if (!node || node->slot() != j)
    throw Error("map " + m->label() + " is not a strengthening in slot " + std::to_string(j));
  return *node;
}

const StrengthenNode& as_strengthening(const MultiMap& m) {
  const auto* node = dynamic_cast<const StrengthenNode*>(m.get());
  if (!node) throw Error("map " + m->label() + " is not a strengthening");
  return *node;
}

int identity_element(const FinCategory& c, ObjId x) {
  const auto& h = c.hom(x, x);
  return static_cast<int>(std::find(h.begin(), h.end(), c.identity(x)) - h.begin());
}

/// ē : y x -> P with ē_w(m) = P(m)(e).
PshMorPtr yoneda_map(const CatPtr& c, ObjId x, const PshPtr& p, int e) {
  std::vector<std::vector<int>> comps(c->num_objects());
  for (ObjId w = 0; w < c->num_objects(); ++w)
    for (MorId m : c->hom(w, x)) comps[w].push_back(p->apply(m, e));
  return std::make_shared<const PresheafMorphism>(representable(c, x), p, std::move(comps));
}

std::mutex g_strengthen_mutex;
std::map<std::pair<const MapNode*, int>, std::weak_ptr<const MapNode>> g_strengthen_cache;

}  // namespace

MultiMap strengthen(const MultiMap& f, int j) {
  std::lock_guard lock(g_strengthen_mutex);
  auto& slot = g_strengthen_cache[{f.get(), j}];
  if (auto live = slot.lock()) return live;
  MultiMap out = std::make_shared<const StrengthenNode>(f, j);
  slot = out;
  if (g_strengthen_cache.size() > 4096)
    std::erase_if(g_strengthen_cache, [](const auto& kv) { return kv.second.expired(); });
  return out;
}

MultiMap strengthened_base(const MultiMap& m, int j) { return as_strengthening(m, j).base(); }

bool is_strengthening(const MultiMap& m, int j) {
  const auto* node = dynamic_cast<const StrengthenNode*>(m.get());
  return node && node->slot() == j;
}

CoendElement coend_representative(const MultiMap& m, const Args& args, ObjId z, int cls) {
  auto eval = as_strengthening(m).coend(args);
  auto [node, a] = eval->colimits.at(z).representative.at(cls);
  auto [x, e] = eval->index.nodes[node];
  return {x, e, a};
}

int coend_class(const MultiMap& m, const Args& args, ObjId z, const CoendElement& el) {
  auto eval = as_strengthening(m).coend(args);
  return eval->colimits.at(z).coprojection(eval->index.node(el.x, el.e), el.a);
}

CellPtr unit_cell(const MultiMap& f, int j) {
  auto ft = strengthen(f, j);
  const CatPtr x_cat = f->slots()[j].cat;
  auto dst = compose_at(ft, j, unit_map(x_cat));
  return make_cell(f, dst, "t̃[" + f->label() + "]", [f, ft, j, x_cat](const Args& args) {
    ObjId x = std::get<ObjId>(args[j]);
    Args outer = with_arg(args, j, representable(x_cat, x));
    int e = identity_element(*x_cat, x);
    auto src = f->evaluate(args);
    auto eval = as_strengthening(ft).coend(outer);
    std::vector<std::vector<int>> comps(src->sizes().size());
    for (ObjId z = 0; z < static_cast<int>(comps.size()); ++z)
      for (int a = 0; a < src->size(z); ++a) comps[z].push_back(eval->colimits[z].coprojection(eval->index.node(x, e), a));
    return std::make_shared<const PresheafMorphism>(src, eval->value, std::move(comps));
  });
}

CellPtr untranspose(const CellPtr& beta, const MultiMap& h, int j) {
  const auto& g = beta->src();
  if (j < 0 || j >= h->arity() || !h->slots()[j].is_psh())
    throw TypeMismatch("untranspose: slot " + std::to_string(j) + " of " + h->label() + " is not a presheaf slot");
  const CatPtr x_cat = h->slots()[j].cat;
  auto expected = compose_at(h, j, unit_map(x_cat));
  bool ok = expected->arity() == beta->dst()->arity() && same_category(expected->codomain(), beta->dst()->codomain());
  for (int i = 0; ok && i < expected->arity(); ++i) ok = same_slot(expected->slots()[i], beta->dst()->slots()[i]);
  if (!ok) throw TypeMismatch("untranspose: target of " + beta->name() + " is not " + h->label() + " ∘ y");
  auto gt = strengthen(g, j);
  return make_cell(gt, h, "⌊" + beta->name() + "⌋", [beta, h, gt, j, x_cat](const Args& args) {
    const auto& p = std::get<PshPtr>(args[j]);
    auto eval = as_strengthening(gt).coend(args);
    auto target = h->evaluate(args);
    const int ny = static_cast<int>(target->sizes().size());
    std::map<int, PshMorPtr> lifted;  // node -> h(ē)
    std::vector<PshMorPtr> beta_at(x_cat->num_objects());
    std::vector<std::vector<int>> comps(ny);
    for (ObjId z = 0; z < ny; ++z)
      for (const auto& [node, a] : eval->colimits[z].representative) {
        auto [x, e] = eval->index.nodes[node];
        if (!beta_at[x]) beta_at[x] = beta->at(with_arg(args, j, x));
        auto& hm = lifted[node];
        if (!hm) hm = h->evaluate_mor(with_arg(args, j, representable(x_cat, x)), j, yoneda_map(x_cat, x, p, e));
        comps[z].push_back(hm->apply(z, beta_at[x]->apply(z, a)));
      }
    return std::make_shared<const PresheafMorphism>(eval->value, target, std::move(comps));
  });
}

CellPtr transpose(const CellPtr& alpha, int j) {
  const auto& f = strengthened_base(alpha->src(), j);
  const CatPtr x_cat = f->slots()[j].cat;
  return vcomp(whisker(alpha, j, unit_map(x_cat)), unit_cell(f, j));
}

CellPtr theta_cell(const CatPtr& x) {
  auto y = unit_map(x);
  auto one = identity_map(x);
  auto cell = untranspose(canonical_iso(y, compose_at(one, 0, y)), one, 0);
  return make_cell(cell->src(), cell->dst(), "θ", [cell](const Args& args) { return cell->at(args); });
}

CellPtr counit_cell(const MultiMap& g, int j) {
  if (j < 0 || j >= g->arity() || !g->slots()[j].is_psh())
    throw TypeMismatch("counit: slot " + std::to_string(j) + " of " + g->label() + " is not a presheaf slot");
  auto gy = compose_at(g, j, unit_map(g->slots()[j].cat));
  auto cell = untranspose(identity_cell(gy), g, j);
  return make_cell(cell->src(), cell->dst(), "σ[" + g->label() + "]", [cell](const Args& args) { return cell->at(args); });
}

CellPtr mult_cell(const MultiMap& f, int j, const MultiMap& g, int k) {
  auto ft = strengthen(f, j);
  auto gt = strengthen(g, k);
  auto beta = whisker(ft, j, unit_cell(g, k));
  auto cell = untranspose(beta, compose_at(ft, j, gt), j + k);
  return make_cell(cell->src(), cell->dst(), "t̂[" + f->label() + "," + g->label() + "]",
                   [cell](const Args& args) { return cell->at(args); });
}

CellPtr strengthen_cell(const CellPtr& alpha, int j) {
  auto src = strengthen(alpha->src(), j);
  auto dst = strengthen(alpha->dst(), j);
  return make_cell(src, dst, alpha->name() + "^t" + std::to_string(j), [alpha, src, dst, j](const Args& args) {
    auto s = as_strengthening(src).coend(args);
    auto d = as_strengthening(dst).coend(args);
    const int ny = static_cast<int>(s->colimits.size());
    std::vector<PshMorPtr> alpha_at(s->fibers.size());
    std::vector<std::vector<int>> comps(ny);
    for (ObjId z = 0; z < ny; ++z)
      for (const auto& [node, a] : s->colimits[z].representative) {
        ObjId x = s->index.nodes[node].first;
        if (!alpha_at[x]) alpha_at[x] = alpha->at(with_arg(args, j, x));
        comps[z].push_back(d->colimits[z].coprojection(node, alpha_at[x]->apply(z, a)));
      }
    return std::make_shared<const PresheafMorphism>(s->value, d->value, std::move(comps));
  });
}

}  // namespace relmonad
