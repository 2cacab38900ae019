#include "relmonad/multimap.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "text_util.hpp"

namespace relmonad {

namespace {

void append_int(std::string& key, int v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); }

std::vector<int> mor_counts(const std::vector<CatPtr>& cats) {
  std::vector<int> out;
  for (const auto& c : cats) out.push_back(c->num_morphisms());
  return out;
}

TupleIndex object_index(const std::vector<CatPtr>& cats) {
  std::vector<int> radices;
  for (const auto& c : cats) radices.push_back(c->num_objects());
  return TupleIndex(std::move(radices));
}

const std::string& slot_name(const SlotType& s) {
  static const std::string fin = "Fin", psh = "Psh";
  return s.is_fin() ? fin : psh;
}

}  // namespace

bool same_slot(const SlotType& a, const SlotType& b) {
  return a.kind == b.kind && same_category(a.cat, b.cat);
}

std::string args_key(const Args& args) {
  std::string key;
  for (const auto& a : args) {
    if (const auto* o = std::get_if<ObjId>(&a)) {
      key.push_back('o');
      append_int(key, *o);
    } else {
      const auto& k = std::get<PshPtr>(a)->key();
      key.push_back('p');
      append_int(key, static_cast<int>(k.size()));
      key += k;
    }
  }
  return key;
}

std::string describe_args(const Args& args, const std::vector<SlotType>& slots) {
  std::vector<std::string> parts;
  for (size_t i = 0; i < args.size(); ++i) {
    const auto& c = slots[i].cat;
    if (const auto* o = std::get_if<ObjId>(&args[i])) {
      parts.push_back(c->object_name(*o));
      continue;
    }
    const auto& p = std::get<PshPtr>(args[i]);
    std::string name;
    for (ObjId a = 0; a < c->num_objects() && name.empty(); ++a)
      if (*representable(c, a) == *p) name = "y(" + c->object_name(a) + ")";
    if (name.empty()) {
      std::vector<std::string> sizes;
      for (int s : p->sizes()) sizes.push_back(std::to_string(s));
      name = "P[" + text::join(sizes, ",") + "]";
    }
    parts.push_back(name);
  }
  return "(" + text::join(parts, ", ") + ")";
}

// ---------------------------------------------------------------------------
// MultiProfunctor

MultiProfunctor::MultiProfunctor(std::vector<CatPtr> slots, CatPtr codomain, std::vector<PshPtr> values,
                                 std::vector<std::vector<PshMorPtr>> actions)
    : slots_(std::move(slots)),
      codomain_(std::move(codomain)),
      tuples_(object_index(slots_)),
      values_(std::move(values)),
      actions_(std::move(actions)) {
  if (static_cast<int>(values_.size()) != tuples_.size())
    throw TypeMismatch("profunctor: expected " + std::to_string(tuples_.size()) + " values");
  for (const auto& v : values_)
    if (!v || !same_category(v->base(), codomain_)) throw TypeMismatch("profunctor: value on wrong base");
  if (static_cast<int>(actions_.size()) != arity()) throw TypeMismatch("profunctor: one action table per slot");
  for (int v = 0; v < arity(); ++v) {
    const auto& c = *slots_[v];
    if (static_cast<int>(actions_[v].size()) != tuples_.size() * c.num_morphisms())
      throw TypeMismatch("profunctor: action table size in slot " + std::to_string(v));
    for (int t = 0; t < tuples_.size(); ++t)
      for (MorId g = 0; g < c.num_morphisms(); ++g) {
        const auto& a = actions_[v][t * c.num_morphisms() + g];
        bool expected = c.src(g) == tuples_.component(t, v);
        if (expected != static_cast<bool>(a)) throw TypeMismatch("profunctor: action presence mismatch");
        if (!a) continue;
        if (!(*a->src() == *values_[t]) || !(*a->dst() == *values_[tuples_.with(t, v, c.tgt(g))]))
          throw TypeMismatch("profunctor: action of " + c.morphism_name(g) + " has wrong endpoints");
      }
  }
}

const PshMorPtr& MultiProfunctor::action(int var, int tuple, MorId g) const {
  const auto& a = actions_[var][tuple * slots_[var]->num_morphisms() + g];
  if (!a) throw TypeMismatch("profunctor: morphism does not start at the tuple coordinate");
  return a;
}

std::string validate_profunctor(const MultiProfunctor& p) {
  const auto& ti = p.tuples();
  for (int t = 0; t < ti.size(); ++t)
    if (auto e = validate_presheaf(*p.value(t)); !e.empty()) return "value " + std::to_string(t) + ": " + e;
  for (int v = 0; v < p.arity(); ++v) {
    const auto& c = *p.slots()[v];
    for (int t = 0; t < ti.size(); ++t) {
      ObjId b = ti.component(t, v);
      if (!is_bijective(*p.action(v, t, c.identity(b))) ||
          !(*p.action(v, t, c.identity(b)) == *identity_morphism(p.value(t))))
        return "slot " + std::to_string(v + 1) + ": identity " + c.morphism_name(c.identity(b)) + " acts non-trivially";
      for (MorId f = 0; f < c.num_morphisms(); ++f) {
        if (c.src(f) != b) continue;
        const auto& af = p.action(v, t, f);
        if (auto e = validate_presheaf_morphism(*af); !e.empty())
          return "slot " + std::to_string(v + 1) + " action of " + c.morphism_name(f) + ": " + e;
        int t2 = ti.with(t, v, c.tgt(f));
        for (MorId g = 0; g < c.num_morphisms(); ++g) {
          if (c.src(g) != c.tgt(f)) continue;
          MorId gf = c.compose(g, f);
          if (!(*compose(*p.action(v, t2, g), *af) == *p.action(v, t, gf)))
            return "slot " + std::to_string(v + 1) + ": action of " + c.morphism_name(gf) + " is not the composite of " +
                   c.morphism_name(g) + " and " + c.morphism_name(f);
        }
        for (int w = v + 1; w < p.arity(); ++w) {
          const auto& d = *p.slots()[w];
          for (MorId h = 0; h < d.num_morphisms(); ++h) {
            if (d.src(h) != ti.component(t, w)) continue;
            auto lhs = compose(*p.action(w, t2, h), *af);
            auto rhs = compose(*p.action(v, ti.with(t, w, d.tgt(h)), f), *p.action(w, t, h));
            if (!(*lhs == *rhs))
              return "slots " + std::to_string(v + 1) + "," + std::to_string(w + 1) + ": actions of " +
                     c.morphism_name(f) + " and " + d.morphism_name(h) + " do not commute";
          }
        }
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// MultiFunctor

MultiFunctor::MultiFunctor(std::vector<CatPtr> slots, CatPtr codomain, std::vector<ObjId> obj_map,
                           std::vector<std::vector<MorId>> mor_map)
    : slots_(std::move(slots)),
      codomain_(std::move(codomain)),
      tuples_(object_index(slots_)),
      obj_map_(std::move(obj_map)),
      mor_map_(std::move(mor_map)) {
  if (static_cast<int>(obj_map_.size()) != tuples_.size()) throw TypeMismatch("functor: object map size");
  for (ObjId y : obj_map_)
    if (y < 0 || y >= codomain_->num_objects()) throw TypeMismatch("functor: object out of range");
  if (static_cast<int>(mor_map_.size()) != arity()) throw TypeMismatch("functor: one morphism table per slot");
  for (int v = 0; v < arity(); ++v) {
    const auto& c = *slots_[v];
    if (static_cast<int>(mor_map_[v].size()) != tuples_.size() * c.num_morphisms())
      throw TypeMismatch("functor: morphism table size in slot " + std::to_string(v));
    for (int t = 0; t < tuples_.size(); ++t)
      for (MorId g = 0; g < c.num_morphisms(); ++g) {
        MorId m = mor_map_[v][t * c.num_morphisms() + g];
        bool expected = c.src(g) == tuples_.component(t, v);
        if (expected != (m >= 0)) throw TypeMismatch("functor: morphism presence mismatch");
        if (m >= codomain_->num_morphisms()) throw TypeMismatch("functor: morphism out of range");
      }
  }
}

MorId MultiFunctor::action(int var, int tuple, MorId g) const {
  MorId m = mor_map_[var][tuple * slots_[var]->num_morphisms() + g];
  if (m < 0) throw TypeMismatch("functor: morphism does not start at the tuple coordinate");
  return m;
}

std::string validate_multifunctor(const MultiFunctor& f) {
  const auto& ti = f.tuples();
  const auto& y = *f.codomain();
  for (int v = 0; v < f.arity(); ++v) {
    const auto& c = *f.slots()[v];
    for (int t = 0; t < ti.size(); ++t) {
      ObjId b = ti.component(t, v);
      if (f.action(v, t, c.identity(b)) != y.identity(f.object(t)))
        return "slot " + std::to_string(v + 1) + ": identity not preserved";
      for (MorId g = 0; g < c.num_morphisms(); ++g) {
        if (c.src(g) != b) continue;
        int t2 = ti.with(t, v, c.tgt(g));
        MorId m = f.action(v, t, g);
        if (y.src(m) != f.object(t) || y.tgt(m) != f.object(t2))
          return "slot " + std::to_string(v + 1) + ": image of " + c.morphism_name(g) + " has wrong endpoints";
        for (MorId h = 0; h < c.num_morphisms(); ++h) {
          if (c.src(h) != c.tgt(g)) continue;
          if (y.compose(f.action(v, t2, h), m) != f.action(v, t, c.compose(h, g)))
            return "slot " + std::to_string(v + 1) + ": composite " + c.morphism_name(c.compose(h, g)) + " not preserved";
        }
        for (int w = v + 1; w < f.arity(); ++w) {
          const auto& d = *f.slots()[w];
          for (MorId h = 0; h < d.num_morphisms(); ++h) {
            if (d.src(h) != ti.component(t, w)) continue;
            MorId lhs = y.compose(f.action(w, t2, h), m);
            MorId rhs = y.compose(f.action(v, ti.with(t, w, d.tgt(h)), g), f.action(w, t, h));
            if (lhs != rhs)
              return "slots " + std::to_string(v + 1) + "," + std::to_string(w + 1) + ": images of " +
                     c.morphism_name(g) + " and " + d.morphism_name(h) + " do not commute";
          }
        }
      }
    }
  }
  return {};
}

namespace {

using ObjFn = std::function<ObjId(const std::vector<int>&)>;
using MorFn = std::function<MorId(int, const std::vector<int>&, MorId)>;

FunctorPtr tabulate(std::vector<CatPtr> slots, CatPtr codomain, const ObjFn& obj, const MorFn& mor) {
  TupleIndex ti = object_index(slots);
  std::vector<ObjId> obj_map(ti.size());
  for (int t = 0; t < ti.size(); ++t) obj_map[t] = obj(ti.decode(t));
  std::vector<std::vector<MorId>> mor_map(slots.size());
  for (size_t v = 0; v < slots.size(); ++v) {
    const auto& c = *slots[v];
    mor_map[v].assign(static_cast<size_t>(ti.size()) * c.num_morphisms(), -1);
    for (int t = 0; t < ti.size(); ++t) {
      auto tuple = ti.decode(t);
      for (MorId g = 0; g < c.num_morphisms(); ++g)
        if (c.src(g) == tuple[v]) mor_map[v][t * c.num_morphisms() + g] = mor(static_cast<int>(v), tuple, g);
    }
  }
  return std::make_shared<const MultiFunctor>(std::move(slots), std::move(codomain), std::move(obj_map),
                                              std::move(mor_map));
}

}  // namespace

FunctorPtr identity_multifunctor(const CatPtr& c) {
  return tabulate({c}, c, [](const std::vector<int>& t) { return t[0]; },
                  [](int, const std::vector<int>&, MorId g) { return g; });
}

FunctorPtr unary_multifunctor(const FunctorTable& f) {
  return tabulate({f.src}, f.dst, [&](const std::vector<int>& t) { return f.obj_map[t[0]]; },
                  [&](int, const std::vector<int>&, MorId g) { return f.mor_map[g]; });
}

FunctorPtr pairing_multifunctor(const std::vector<CatPtr>& slots) {
  TupleIndex objs = object_index(slots);
  TupleIndex mors(mor_counts(slots));
  return tabulate(
      slots, product_category(slots), [&](const std::vector<int>& t) { return objs.encode(t); },
      [&](int v, const std::vector<int>& t, MorId g) {
        std::vector<int> m(t.size());
        for (size_t i = 0; i < t.size(); ++i) m[i] = slots[i]->identity(t[i]);
        m[v] = g;
        return mors.encode(m);
      });
}

FunctorPtr projection_multifunctor(const std::vector<CatPtr>& slots, int index) {
  if (index < 0 || index >= static_cast<int>(slots.size())) throw TypeMismatch("projection index out of range");
  const auto& c = slots[index];
  return tabulate(
      slots, c, [&](const std::vector<int>& t) { return t[index]; },
      [&](int v, const std::vector<int>& t, MorId g) { return v == index ? g : c->identity(t[index]); });
}

FunctorPtr constant_multifunctor(const std::vector<CatPtr>& slots, const CatPtr& codomain, ObjId value) {
  return tabulate(
      slots, codomain, [&](const std::vector<int>&) { return value; },
      [&](int, const std::vector<int>&, MorId) { return codomain->identity(value); });
}

FunctorPtr compose_multifunctor(const FunctorPtr& f, int i, const FunctorPtr& g) {
  if (i < 0 || i >= f->arity()) throw TypeMismatch("compose: slot index out of range");
  if (!same_category(f->slots()[i], g->codomain())) throw TypeMismatch("compose: slot category mismatch");
  const int m = g->arity();
  std::vector<CatPtr> slots(f->slots().begin(), f->slots().begin() + i);
  slots.insert(slots.end(), g->slots().begin(), g->slots().end());
  slots.insert(slots.end(), f->slots().begin() + i + 1, f->slots().end());
  auto split = [&](const std::vector<int>& t) {
    std::vector<int> inner(t.begin() + i, t.begin() + i + m);
    int gt = g->tuples().encode(inner);
    std::vector<int> outer(t.begin(), t.begin() + i);
    outer.push_back(g->object(gt));
    outer.insert(outer.end(), t.begin() + i + m, t.end());
    return std::pair{gt, f->tuples().encode(outer)};
  };
  return tabulate(
      std::move(slots), f->codomain(), [&](const std::vector<int>& t) { return f->object(split(t).second); },
      [&](int v, const std::vector<int>& t, MorId h) {
        auto [gt, ft] = split(t);
        if (v < i) return f->action(v, ft, h);
        if (v >= i + m) return f->action(v - m + 1, ft, h);
        return f->action(i, ft, g->action(v - i, gt, h));
      });
}

FunctorPtr postcompose_multifunctor(const FunctorTable& u, const FunctorPtr& f) {
  if (!same_category(u.src, f->codomain())) throw TypeMismatch("postcompose: category mismatch");
  return tabulate(
      f->slots(), u.dst, [&](const std::vector<int>& t) { return u.obj_map[f->object(f->tuples().encode(t))]; },
      [&](int v, const std::vector<int>& t, MorId g) { return u.mor_map[f->action(v, f->tuples().encode(t), g)]; });
}

// ---------------------------------------------------------------------------
// MapNode

MapNode::MapNode(std::vector<SlotType> slots, CatPtr codomain, std::string label)
    : slots_(std::move(slots)), codomain_(std::move(codomain)), label_(std::move(label)) {
  for (const auto& s : slots_)
    if (!s.cat) throw TypeMismatch("map " + label_ + ": slot without category");
}

void MapNode::check_args(const Args& args) const {
  if (args.size() != slots_.size())
    throw TypeMismatch("map " + label_ + ": expected " + std::to_string(slots_.size()) + " arguments, got " +
                       std::to_string(args.size()));
  for (size_t i = 0; i < args.size(); ++i) {
    const auto& s = slots_[i];
    if (s.is_fin()) {
      const auto* o = std::get_if<ObjId>(&args[i]);
      if (!o || *o < 0 || *o >= s.cat->num_objects())
        throw TypeMismatch("map " + label_ + ": slot " + std::to_string(i) + " expects an object");
    } else {
      const auto* p = std::get_if<PshPtr>(&args[i]);
      if (!p || !*p || !same_category((*p)->base(), s.cat))
        throw TypeMismatch("map " + label_ + ": slot " + std::to_string(i) + " expects a presheaf");
    }
  }
}

PshPtr MapNode::evaluate(const Args& args) const {
  check_args(args);
  std::string key = args_key(args);
  {
    std::lock_guard lock(mutex_);
    if (auto it = values_.find(key); it != values_.end()) return it->second;
  }
  PshPtr out = do_evaluate(args);
  if (!same_category(out->base(), codomain_)) throw TypeMismatch("map " + label_ + ": value on wrong base");
  std::lock_guard lock(mutex_);
  return values_.emplace(std::move(key), std::move(out)).first->second;
}

PshMorPtr MapNode::evaluate_mor(const Args& args, int var, const ArgMor& mor) const {
  check_args(args);
  if (var < 0 || var >= arity()) throw TypeMismatch("map " + label_ + ": variable out of range");
  const auto& s = slots_[var];
  std::string key = args_key(args);
  append_int(key, var);
  if (s.is_fin()) {
    const auto* m = std::get_if<MorId>(&mor);
    if (!m || *m < 0 || *m >= s.cat->num_morphisms() || s.cat->src(*m) != std::get<ObjId>(args[var]))
      throw TypeMismatch("map " + label_ + ": morphism does not start at the argument");
    key.push_back('m');
    append_int(key, *m);
  } else {
    const auto* m = std::get_if<PshMorPtr>(&mor);
    if (!m || !*m || !(*(*m)->src() == *std::get<PshPtr>(args[var])))
      throw TypeMismatch("map " + label_ + ": presheaf morphism does not start at the argument");
    const auto& dk = (*m)->dst()->key();
    const auto& mk = (*m)->key();
    key.push_back('q');
    append_int(key, static_cast<int>(dk.size()));
    key += dk;
    key += mk;
  }
  {
    std::lock_guard lock(mutex_);
    if (auto it = actions_.find(key); it != actions_.end()) return it->second;
  }
  PshMorPtr out = do_evaluate_mor(args, var, mor);
  std::lock_guard lock(mutex_);
  return actions_.emplace(std::move(key), std::move(out)).first->second;
}

namespace {

Arg target_of(const FinCategory& c, const ArgMor& mor) {
  if (const auto* m = std::get_if<MorId>(&mor)) return c.tgt(*m);
  return std::get<PshMorPtr>(mor)->dst();
}

class TableNode final : public MapNode {
 public:
  TableNode(ProfPtr p, std::string label)
      : MapNode(fin_slots(*p), p->codomain(), std::move(label)), table_(std::move(p)) {}

  bool cocontinuous(int) const override { return false; }

 protected:
  PshPtr do_evaluate(const Args& args) const override { return table_->value(tuple(args)); }
  PshMorPtr do_evaluate_mor(const Args& args, int var, const ArgMor& mor) const override {
    return table_->action(var, tuple(args), std::get<MorId>(mor));
  }

 private:
  static std::vector<SlotType> fin_slots(const MultiProfunctor& p) {
    std::vector<SlotType> out;
    for (const auto& c : p.slots()) out.push_back(SlotType::fin(c));
    return out;
  }
  int tuple(const Args& args) const {
    std::vector<int> t;
    for (const auto& a : args) t.push_back(std::get<ObjId>(a));
    return table_->tuples().encode(t);
  }
  ProfPtr table_;
};

class UnitNode final : public MapNode {
 public:
  explicit UnitNode(const CatPtr& x) : MapNode({SlotType::fin(x)}, x, "y") {
    for (ObjId a = 0; a < x->num_objects(); ++a) reps_.push_back(representable(x, a));
    for (MorId f = 0; f < x->num_morphisms(); ++f) arrows_.push_back(yoneda_action(x, f));
  }
  bool cocontinuous(int) const override { return false; }

 protected:
  PshPtr do_evaluate(const Args& args) const override { return reps_[std::get<ObjId>(args[0])]; }
  PshMorPtr do_evaluate_mor(const Args&, int, const ArgMor& mor) const override {
    return arrows_[std::get<MorId>(mor)];
  }

 private:
  std::vector<PshPtr> reps_;
  std::vector<PshMorPtr> arrows_;
};

class IdentityNode final : public MapNode {
 public:
  explicit IdentityNode(const CatPtr& x) : MapNode({SlotType::psh(x)}, x, "1") {}
  bool cocontinuous(int) const override { return true; }

 protected:
  PshPtr do_evaluate(const Args& args) const override { return std::get<PshPtr>(args[0]); }
  PshMorPtr do_evaluate_mor(const Args&, int, const ArgMor& mor) const override {
    return std::get<PshMorPtr>(mor);
  }
};

std::vector<SlotType> splice(const std::vector<SlotType>& outer, int j, const std::vector<SlotType>& inner) {
  std::vector<SlotType> out(outer.begin(), outer.begin() + j);
  out.insert(out.end(), inner.begin(), inner.end());
  out.insert(out.end(), outer.begin() + j + 1, outer.end());
  return out;
}

class ComposeNode final : public MapNode {
 public:
  ComposeNode(MultiMap f, int j, MultiMap g)
      : MapNode(splice(f->slots(), j, g->slots()), f->codomain(), f->label() + "∘" + std::to_string(j) + g->label()),
        f_(std::move(f)),
        g_(std::move(g)),
        j_(j) {}

  bool cocontinuous(int slot) const override {
    const int m = g_->arity();
    if (slot < j_) return f_->cocontinuous(slot);
    if (slot >= j_ + m) return f_->cocontinuous(slot - m + 1);
    return f_->cocontinuous(j_) && g_->cocontinuous(slot - j_);
  }

 protected:
  PshPtr do_evaluate(const Args& args) const override {
    auto [outer, inner] = split(args);
    return f_->evaluate(outer);
  }
  PshMorPtr do_evaluate_mor(const Args& args, int var, const ArgMor& mor) const override {
    const int m = g_->arity();
    auto [outer, inner] = split(args);
    if (var < j_) return f_->evaluate_mor(outer, var, mor);
    if (var >= j_ + m) return f_->evaluate_mor(outer, var - m + 1, mor);
    return f_->evaluate_mor(outer, j_, g_->evaluate_mor(inner, var - j_, mor));
  }

 private:
  std::pair<Args, Args> split(const Args& args) const {
    const int m = g_->arity();
    Args inner(args.begin() + j_, args.begin() + j_ + m);
    Args outer(args.begin(), args.begin() + j_);
    outer.emplace_back(g_->evaluate(inner));
    outer.insert(outer.end(), args.begin() + j_ + m, args.end());
    return {std::move(outer), std::move(inner)};
  }
  MultiMap f_, g_;
  int j_;
};

class ReindexNode final : public MapNode {
 public:
  ReindexNode(MultiMap f, int j, FunctorPtr g)
      : MapNode(splice(f->slots(), j, fin_slots(*g)), f->codomain(), f->label() + "∘" + std::to_string(j) + "J"),
        f_(std::move(f)),
        g_(std::move(g)),
        j_(j) {}

  bool cocontinuous(int slot) const override {
    const int m = g_->arity();
    if (slot < j_) return f_->cocontinuous(slot);
    if (slot >= j_ + m) return f_->cocontinuous(slot - m + 1);
    return false;
  }

 protected:
  PshPtr do_evaluate(const Args& args) const override { return f_->evaluate(split(args).first); }
  PshMorPtr do_evaluate_mor(const Args& args, int var, const ArgMor& mor) const override {
    const int m = g_->arity();
    auto [outer, gt] = split(args);
    if (var < j_) return f_->evaluate_mor(outer, var, mor);
    if (var >= j_ + m) return f_->evaluate_mor(outer, var - m + 1, mor);
    return f_->evaluate_mor(outer, j_, g_->action(var - j_, gt, std::get<MorId>(mor)));
  }

 private:
  static std::vector<SlotType> fin_slots(const MultiFunctor& g) {
    std::vector<SlotType> out;
    for (const auto& c : g.slots()) out.push_back(SlotType::fin(c));
    return out;
  }
  std::pair<Args, int> split(const Args& args) const {
    const int m = g_->arity();
    std::vector<int> inner;
    for (int i = 0; i < m; ++i) inner.push_back(std::get<ObjId>(args[j_ + i]));
    int gt = g_->tuples().encode(inner);
    Args outer(args.begin(), args.begin() + j_);
    outer.emplace_back(g_->object(gt));
    outer.insert(outer.end(), args.begin() + j_ + m, args.end());
    return {std::move(outer), gt};
  }
  MultiMap f_;
  FunctorPtr g_;
  int j_;
};

class PlugNode final : public MapNode {
 public:
  PlugNode(MultiMap f, int j, Arg value)
      : MapNode(splice(f->slots(), j, {}), f->codomain(), f->label() + "[" + std::to_string(j) + "]"),
        f_(std::move(f)),
        j_(j),
        value_(std::move(value)) {}

  bool cocontinuous(int slot) const override { return f_->cocontinuous(slot < j_ ? slot : slot + 1); }

 protected:
  PshPtr do_evaluate(const Args& args) const override { return f_->evaluate(full(args)); }
  PshMorPtr do_evaluate_mor(const Args& args, int var, const ArgMor& mor) const override {
    return f_->evaluate_mor(full(args), var < j_ ? var : var + 1, mor);
  }

 private:
  Args full(const Args& args) const {
    Args out(args.begin(), args.begin() + j_);
    out.push_back(value_);
    out.insert(out.end(), args.begin() + j_, args.end());
    return out;
  }
  MultiMap f_;
  int j_;
  Arg value_;
};

class CustomNode final : public MapNode {
 public:
  explicit CustomNode(CustomMap spec)
      : MapNode(spec.slots, spec.codomain, spec.label), spec_(std::move(spec)) {
    if (spec_.cocontinuous.size() != spec_.slots.size()) spec_.cocontinuous.resize(spec_.slots.size(), false);
  }
  bool cocontinuous(int slot) const override { return spec_.slots[slot].is_psh() && spec_.cocontinuous[slot]; }

 protected:
  PshPtr do_evaluate(const Args& args) const override { return spec_.evaluate(args); }
  PshMorPtr do_evaluate_mor(const Args& args, int var, const ArgMor& mor) const override {
    return spec_.evaluate_mor(args, var, mor);
  }

 private:
  CustomMap spec_;
};

}  // namespace

MultiMap table_map(ProfPtr p, std::string label) {
  return std::make_shared<const TableNode>(std::move(p), std::move(label));
}

MultiMap unit_map(const CatPtr& x) { return std::make_shared<const UnitNode>(x); }

MultiMap identity_map(const CatPtr& x) { return std::make_shared<const IdentityNode>(x); }

MultiMap compose_at(const MultiMap& f, int j, const MultiMap& g) {
  if (j < 0 || j >= f->arity()) throw TypeMismatch("compose_at: slot " + std::to_string(j) + " out of range");
  const auto& s = f->slots()[j];
  if (!s.is_psh() || !same_category(s.cat, g->codomain()))
    throw TypeMismatch("compose_at: slot " + std::to_string(j) + " of " + f->label() + " is " + slot_name(s) +
                       ", not the presheaf category of the inner codomain");
  return std::make_shared<const ComposeNode>(f, j, g);
}

MultiMap reindex_at(const MultiMap& f, int j, const FunctorPtr& g) {
  if (j < 0 || j >= f->arity()) throw TypeMismatch("reindex_at: slot " + std::to_string(j) + " out of range");
  const auto& s = f->slots()[j];
  if (!s.is_fin() || !same_category(s.cat, g->codomain()))
    throw TypeMismatch("reindex_at: slot " + std::to_string(j) + " of " + f->label() + " is " + slot_name(s) +
                       ", not the functor's codomain");
  return std::make_shared<const ReindexNode>(f, j, g);
}

MultiMap plug_at(const MultiMap& f, int j, Arg value) {
  if (j < 0 || j >= f->arity()) throw TypeMismatch("plug_at: slot " + std::to_string(j) + " out of range");
  const auto& s = f->slots()[j];
  bool ok = s.is_fin() ? std::holds_alternative<ObjId>(value) &&
                             std::get<ObjId>(value) >= 0 && std::get<ObjId>(value) < s.cat->num_objects()
                       : std::holds_alternative<PshPtr>(value) && std::get<PshPtr>(value) &&
                             same_category(std::get<PshPtr>(value)->base(), s.cat);
  if (!ok) throw TypeMismatch("plug_at: value does not fit slot " + std::to_string(j));
  return std::make_shared<const PlugNode>(f, j, std::move(value));
}

MultiMap custom_map(CustomMap spec) {
  if (!spec.evaluate || !spec.evaluate_mor) throw TypeMismatch("custom_map: missing evaluator");
  return std::make_shared<const CustomNode>(std::move(spec));
}

// ---------------------------------------------------------------------------
// TwoCell

namespace {

/// First place where two presheaves on the same base differ.
std::string presheaf_difference(const Presheaf& p, const Presheaf& q) {
  const auto& c = *p.base();
  for (ObjId z = 0; z < c.num_objects(); ++z)
    if (p.size(z) != q.size(z))
      return "object " + c.object_name(z) + " sizes " + std::to_string(p.size(z)) + " vs " + std::to_string(q.size(z));
  for (MorId m = 0; m < c.num_morphisms(); ++m)
    for (int e = 0; e < p.size(c.tgt(m)); ++e)
      if (p.apply(m, e) != q.apply(m, e))
        return "action of " + c.morphism_name(m) + " on element " + std::to_string(e) + ": " +
               std::to_string(p.apply(m, e)) + " vs " + std::to_string(q.apply(m, e));
  return "no difference";
}

void require_parallel(const MultiMap& a, const MultiMap& b, const std::string& what) {
  bool ok = a->arity() == b->arity() && same_category(a->codomain(), b->codomain());
  for (int i = 0; ok && i < a->arity(); ++i) ok = same_slot(a->slots()[i], b->slots()[i]);
  if (!ok) throw TypeMismatch(what + ": maps " + a->label() + " and " + b->label() + " are not parallel");
}

}  // namespace

TwoCell::TwoCell(MultiMap src, MultiMap dst, std::string name, Fn fn)
    : src_(std::move(src)), dst_(std::move(dst)), name_(std::move(name)), fn_(std::move(fn)) {
  require_parallel(src_, dst_, "cell " + name_);
}

PshMorPtr TwoCell::at(const Args& args) const {
  std::string key = args_key(args);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  PshMorPtr out = fn_(args);
  if (!(*out->src() == *src_->evaluate(args)) || !(*out->dst() == *dst_->evaluate(args)))
    throw CellMismatch("cell " + name_ + " at " + describe_args(args, src_->slots()) +
                       ": component has the wrong endpoints (" +
                       (*out->src() == *src_->evaluate(args) ? presheaf_difference(*out->dst(), *dst_->evaluate(args))
                                                            : presheaf_difference(*out->src(), *src_->evaluate(args))) +
                       ")");
  std::lock_guard lock(mutex_);
  return cache_.emplace(std::move(key), std::move(out)).first->second;
}

CellPtr make_cell(MultiMap src, MultiMap dst, std::string name, TwoCell::Fn fn) {
  return std::make_shared<const TwoCell>(std::move(src), std::move(dst), std::move(name), std::move(fn));
}

CellPtr identity_cell(const MultiMap& f) {
  return make_cell(f, f, "1", [f](const Args& args) { return identity_morphism(f->evaluate(args)); });
}

CellPtr vcomp(const CellPtr& beta, const CellPtr& alpha) {
  require_parallel(alpha->dst(), beta->src(), "vcomp");
  return make_cell(alpha->src(), beta->dst(), beta->name() + "·" + alpha->name(), [alpha, beta](const Args& args) {
    auto a = alpha->at(args);
    auto b = beta->at(args);
    if (!(*a->dst() == *b->src()))
      throw CellMismatch("composite " + beta->name() + "·" + alpha->name() + " at " +
                         describe_args(args, alpha->src()->slots()) + ": target of " + alpha->name() +
                         " differs from source of " + beta->name() + " (" +
                         presheaf_difference(*a->dst(), *b->src()) + ")");
    return compose(*b, *a);
  });
}

CellPtr chain(const std::vector<CellPtr>& cells) {
  if (cells.empty()) throw TypeMismatch("chain of no cells");
  CellPtr out = cells.front();
  for (size_t i = 1; i < cells.size(); ++i) out = vcomp(cells[i], out);
  return out;
}

CellPtr whisker(const CellPtr& alpha, int j, const MultiMap& g) {
  auto src = compose_at(alpha->src(), j, g);
  auto dst = compose_at(alpha->dst(), j, g);
  const int m = g->arity();
  return make_cell(src, dst, "(" + alpha->name() + "∘" + std::to_string(j) + g->label() + ")",
                   [alpha, j, g, m](const Args& args) {
                     Args inner(args.begin() + j, args.begin() + j + m);
                     Args outer(args.begin(), args.begin() + j);
                     outer.emplace_back(g->evaluate(inner));
                     outer.insert(outer.end(), args.begin() + j + m, args.end());
                     return alpha->at(outer);
                   });
}

CellPtr whisker(const CellPtr& alpha, int j, const FunctorPtr& g) {
  auto src = reindex_at(alpha->src(), j, g);
  auto dst = reindex_at(alpha->dst(), j, g);
  const int m = g->arity();
  return make_cell(src, dst, "(" + alpha->name() + "∘" + std::to_string(j) + "J)", [alpha, j, g, m](const Args& args) {
    std::vector<int> inner;
    for (int i = 0; i < m; ++i) inner.push_back(std::get<ObjId>(args[j + i]));
    Args outer(args.begin(), args.begin() + j);
    outer.emplace_back(g->object(g->tuples().encode(inner)));
    outer.insert(outer.end(), args.begin() + j + m, args.end());
    return alpha->at(outer);
  });
}

CellPtr whisker(const MultiMap& f, int j, const CellPtr& beta) {
  auto src = compose_at(f, j, beta->src());
  auto dst = compose_at(f, j, beta->dst());
  const int m = beta->src()->arity();
  return make_cell(src, dst, "(" + f->label() + "∘" + std::to_string(j) + beta->name() + ")",
                   [f, j, beta, m](const Args& args) {
                     Args inner(args.begin() + j, args.begin() + j + m);
                     Args outer(args.begin(), args.begin() + j);
                     outer.emplace_back(beta->src()->evaluate(inner));
                     outer.insert(outer.end(), args.begin() + j + m, args.end());
                     return f->evaluate_mor(outer, j, beta->at(inner));
                   });
}

CellPtr inverse(const CellPtr& alpha) {
  return make_cell(alpha->dst(), alpha->src(), alpha->name() + "⁻¹",
                   [alpha](const Args& args) { return inverse(*alpha->at(args)); });
}

CellPtr canonical_iso(const MultiMap& f, const MultiMap& g) {
  return make_cell(f, g, "~", [f, g](const Args& args) {
    auto p = f->evaluate(args);
    auto q = g->evaluate(args);
    if (!(*p == *q))
      throw CellMismatch("canonical iso " + f->label() + " ~ " + g->label() + " at " +
                         describe_args(args, f->slots()) + ": evaluations differ (" + presheaf_difference(*p, *q) + ")");
    return identity_morphism(p);
  });
}

// ---------------------------------------------------------------------------
// Equality

const char* to_string(Policy p) { return p == Policy::kTranspose ? "TRANSPOSE" : "SAMPLE"; }

std::vector<PshPtr> sample_family(const CatPtr& x) {
  std::vector<PshPtr> out;
  const int n = x->num_objects();
  for (ObjId a = 0; a < n; ++a) out.push_back(representable(x, a));
  for (ObjId a = 0; a < n; ++a)
    for (ObjId b = a; b < n; ++b) out.push_back(coproduct(out[a], out[b]));
  for (ObjId c = 0; c < n; ++c)
    for (MorId u = 0; u < x->num_morphisms(); ++u) {
      if (x->src(u) != c) continue;
      for (MorId v = 0; v < x->num_morphisms(); ++v) {
        if (x->src(v) != c || x->tgt(u) >= x->tgt(v)) continue;
        ObjId a = x->tgt(u), b = x->tgt(v);
        const auto& ha = x->hom(c, a);
        const auto& hb = x->hom(c, b);
        int eu = static_cast<int>(std::find(ha.begin(), ha.end(), u) - ha.begin());
        int ev = static_cast<int>(std::find(hb.begin(), hb.end(), v) - hb.begin());
        out.push_back(quotient_presheaf(coproduct(out[a], out[b]), {{c, eu, static_cast<int>(ha.size()) + ev}}));
        return out;
      }
    }
  PshPtr all = out[0];
  for (ObjId a = 1; a < n; ++a) all = coproduct(all, out[a]);
  std::vector<std::tuple<ObjId, int, int>> merges;
  for (ObjId z = 0; z < n; ++z)
    for (int e = 1; e < all->size(z); ++e) merges.emplace_back(z, 0, e);
  out.push_back(quotient_presheaf(all, merges));
  return out;
}

std::vector<Args> all_args(const std::vector<SlotType>& slots, const std::vector<std::vector<PshPtr>>& choices) {
  std::vector<Args> out{Args{}};
  for (size_t i = 0; i < slots.size(); ++i) {
    std::vector<Args> next;
    for (const auto& prefix : out) {
      if (slots[i].is_fin()) {
        for (ObjId a = 0; a < slots[i].cat->num_objects(); ++a) {
          next.push_back(prefix);
          next.back().emplace_back(a);
        }
      } else {
        for (const auto& p : choices[i]) {
          next.push_back(prefix);
          next.back().emplace_back(p);
        }
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<Args> sample_args(const std::vector<SlotType>& slots) {
  std::vector<std::vector<PshPtr>> reps(slots.size()), extra(slots.size());
  for (size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].is_psh()) continue;
    auto family = sample_family(slots[i].cat);
    const int n = slots[i].cat->num_objects();
    reps[i].assign(family.begin(), family.begin() + n);
    extra[i].assign(family.begin() + n, family.end());
  }
  auto out = all_args(slots, reps);
  for (size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].is_psh()) continue;
    auto choices = reps;
    choices[i] = extra[i];
    auto more = all_args(slots, choices);
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

std::vector<Args> object_tuples(const std::vector<SlotType>& slots) {
  for (const auto& s : slots)
    if (!s.is_fin()) throw TypeMismatch("object_tuples: presheaf slot");
  return all_args(slots, std::vector<std::vector<PshPtr>>(slots.size()));
}

CellPtr restrict_to_representables(const CellPtr& a) {
  CellPtr out = a;
  const auto& slots = a->src()->slots();
  for (int s = 0; s < static_cast<int>(slots.size()); ++s) {
    if (!slots[s].is_psh()) continue;
    if (!a->src()->cocontinuous(s))
      throw Error("TRANSPOSE: source of " + a->name() + " is not a strengthening in slot " + std::to_string(s));
    out = whisker(out, s, unit_map(slots[s].cat));
  }
  return out;
}

namespace {

/// Argument tuples visited by a policy, and the original-slot description of each.
struct Plan {
  CellPtr a, b;
  std::vector<Args> args;
  std::vector<SlotType> shown;
};

Args lift(const Args& args, const std::vector<SlotType>& slots) {
  Args out = args;
  for (size_t i = 0; i < slots.size(); ++i)
    if (slots[i].is_psh()) out[i] = representable(slots[i].cat, std::get<ObjId>(args[i]));
  return out;
}

std::string element_witness(const std::string& where, ObjId z, const FinCategory& y, int e, int lhs, int rhs) {
  return "at " + where + " object " + y.object_name(z) + " element " + std::to_string(e) + ": " + std::to_string(lhs) +
         " vs " + std::to_string(rhs);
}

}  // namespace

Verdict two_cell_equal(const CellPtr& a, const CellPtr& b, Policy policy) {
  require_parallel(a->src(), b->src(), "two_cell_equal");
  require_parallel(a->dst(), b->dst(), "two_cell_equal");
  const auto& slots = a->src()->slots();
  const auto& y = *a->src()->codomain();
  CellPtr ra = a, rb = b;
  std::vector<Args> tuples;
  if (policy == Policy::kTranspose) {
    ra = restrict_to_representables(a);
    rb = restrict_to_representables(b);
    tuples = object_tuples(ra->src()->slots());
  } else {
    tuples = sample_args(slots);
  }
  for (const auto& args : tuples) {
    std::string where = describe_args(policy == Policy::kTranspose ? lift(args, slots) : args, slots);
    auto ma = ra->at(args);
    auto mb = rb->at(args);
    if (!(*ma->src() == *mb->src()) || !(*ma->dst() == *mb->dst()))
      return {false, "at " + where + ": the two sides have different endpoints"};
    for (ObjId z = 0; z < y.num_objects(); ++z)
      for (int e = 0; e < ma->src()->size(z); ++e)
        if (ma->apply(z, e) != mb->apply(z, e)) return {false, element_witness(where, z, y, e, ma->apply(z, e), mb->apply(z, e))};
  }
  return {};
}

Verdict cell_bijective(const CellPtr& a, Policy policy) {
  const auto& slots = a->src()->slots();
  CellPtr ra = a;
  std::vector<Args> tuples;
  if (policy == Policy::kTranspose) {
    ra = restrict_to_representables(a);
    tuples = object_tuples(ra->src()->slots());
  } else {
    tuples = sample_args(slots);
  }
  for (const auto& args : tuples) {
    auto m = ra->at(args);
    if (is_bijective(*m)) continue;
    std::string where = describe_args(policy == Policy::kTranspose ? lift(args, slots) : args, slots);
    const auto& y = *a->src()->codomain();
    for (ObjId z = 0; z < y.num_objects(); ++z) {
      const auto& comp = m->at(z);
      std::vector<int> seen(m->dst()->size(z), -1);
      for (int e = 0; e < static_cast<int>(comp.size()); ++e) {
        if (seen[comp[e]] >= 0)
          return {false, "at " + where + " object " + y.object_name(z) + " elements " + std::to_string(seen[comp[e]]) +
                             " and " + std::to_string(e) + " both map to " + std::to_string(comp[e])};
        seen[comp[e]] = e;
      }
      if (comp.size() != seen.size())
        return {false, "at " + where + " object " + y.object_name(z) + ": sizes " + std::to_string(comp.size()) +
                           " vs " + std::to_string(seen.size())};
    }
  }
  return {};
}

Verdict cell_natural(const CellPtr& a) {
  const auto& slots = a->src()->slots();
  const auto& y = *a->src()->codomain();
  for (const auto& args : sample_args(slots)) {
    for (int v = 0; v < static_cast<int>(slots.size()); ++v) {
      const auto& c = slots[v].cat;
      std::vector<ArgMor> mors;
      if (slots[v].is_fin()) {
        for (MorId g = 0; g < c->num_morphisms(); ++g)
          if (c->src(g) == std::get<ObjId>(args[v]) && !c->is_identity(g)) mors.emplace_back(g);
      } else {
        const auto& p = std::get<PshPtr>(args[v]);
        for (MorId g = 0; g < c->num_morphisms(); ++g)
          if (!c->is_identity(g) && *representable(c, c->src(g)) == *p) mors.emplace_back(yoneda_action(c, g));
      }
      for (const auto& m : mors) {
        Args next = args;
        next[v] = target_of(*c, m);
        auto lhs = compose(*a->dst()->evaluate_mor(args, v, m), *a->at(args));
        auto rhs = compose(*a->at(next), *a->src()->evaluate_mor(args, v, m));
        if (*lhs == *rhs) continue;
        std::string where = describe_args(args, slots);
        for (ObjId z = 0; z < y.num_objects(); ++z)
          for (int e = 0; e < lhs->src()->size(z); ++e)
            if (lhs->apply(z, e) != rhs->apply(z, e))
              return {false, "naturality in slot " + std::to_string(v) + " " +
                                 element_witness(where, z, y, e, lhs->apply(z, e), rhs->apply(z, e))};
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

struct TupleRef {
  std::string head;               // codomain object for profunctor lines
  std::vector<std::string> body;  // slot objects
};

/// Parses "(y; b1,b2)" (profunctor) or "(b1,b2)" (functor) at the start of `s`;
/// returns the remainder after ')'.
std::string_view parse_tuple(const text::Line& line, std::string_view s, bool with_head, TupleRef& out) {
  s = text::trim(s);
  if (s.empty() || s.front() != '(') text::fail(line, "expected (");
  auto close = s.find(')');
  if (close == std::string_view::npos) text::fail(line, "unterminated tuple");
  std::string_view inner = s.substr(1, close - 1);
  if (with_head) {
    auto semi = inner.find(';');
    out.head = std::string(text::trim(inner.substr(0, semi)));
    inner = semi == std::string_view::npos ? std::string_view{} : inner.substr(semi + 1);
  }
  out.body = text::split(inner, ',');
  return s.substr(close + 1);
}

ObjId lookup_object(const text::Line& line, const FinCategory& c, const std::string& name) {
  auto o = c.find_object(name);
  if (!o) text::fail(line, "unknown object '" + name + "'");
  return *o;
}

MorId lookup_morphism(const text::Line& line, const FinCategory& c, const std::string& name) {
  auto m = c.find_morphism(name);
  if (!m) text::fail(line, "unknown morphism '" + name + "'");
  return *m;
}

int tuple_of(const text::Line& line, const std::vector<CatPtr>& slots, const TupleIndex& ti,
             const std::vector<std::string>& names) {
  if (names.size() != slots.size()) text::fail(line, "tuple arity");
  std::vector<int> t;
  for (size_t i = 0; i < names.size(); ++i) t.push_back(lookup_object(line, *slots[i], names[i]));
  return ti.encode(t);
}

std::string expect_prefix(const text::Line& line, std::string_view& s, std::string_view word) {
  s = text::trim(s);
  if (s.substr(0, word.size()) != word) text::fail(line, "expected '" + std::string(word) + "'");
  s.remove_prefix(word.size());
  return {};
}

/// "a -> b"
std::pair<std::string, std::string> parse_arrow(const text::Line& line, std::string_view s) {
  auto arrow = s.find("->");
  if (arrow == std::string_view::npos) text::fail(line, "expected ->");
  auto a = std::string(text::trim(s.substr(0, arrow)));
  auto b = std::string(text::trim(s.substr(arrow + 2)));
  if (a.empty() || b.empty()) text::fail(line, "empty label");
  return {a, b};
}

std::string tuple_text(const std::vector<CatPtr>& slots, const TupleIndex& ti, int t) {
  std::vector<std::string> parts;
  for (int i = 0; i < ti.arity(); ++i) parts.push_back(slots[i]->object_name(ti.component(t, i)));
  return text::join(parts, ",");
}

}  // namespace

ProfPtr parse_profunctor(std::vector<CatPtr> slots, CatPtr codomain, std::string_view input) {
  TupleIndex ti = object_index(slots);
  const auto& y = *codomain;
  const int ny = y.num_objects();
  std::vector<std::vector<std::vector<std::string>>> labels(ti.size(), std::vector<std::vector<std::string>>(ny));
  std::vector<std::vector<bool>> seen(ti.size(), std::vector<bool>(ny, false));
  // (var, tuple, morphism, codomain object) -> label map
  std::map<std::tuple<int, int, MorId, ObjId>, std::map<std::string, std::string>> acts;
  std::vector<std::pair<text::Line, std::string>> act_lines;

  for (const auto& line : text::lines(input)) {
    std::string_view s = line.content;
    auto toks = text::tokens(s);
    if (toks[0] == "at") {
      s.remove_prefix(2);
      TupleRef ref;
      s = parse_tuple(line, s, true, ref);
      int t = tuple_of(line, slots, ti, ref.body);
      ObjId z = lookup_object(line, y, ref.head);
      expect_prefix(line, s, "=");
      if (seen[t][z]) text::fail(line, "duplicate value");
      seen[t][z] = true;
      labels[t][z] = text::brace_list(line, s);
      auto sorted = labels[t][z];
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) text::fail(line, "duplicate label");
    } else if (toks[0] == "act") {
      act_lines.emplace_back(line, std::string(s));
    } else {
      text::fail(line, "unknown directive");
    }
  }
  for (int t = 0; t < ti.size(); ++t)
    for (ObjId z = 0; z < ny; ++z)
      if (!seen[t][z])
        throw ParseError("missing value at (" + y.object_name(z) + "; " + tuple_text(slots, ti, t) + ")");

  auto index_of = [&](const text::Line& line, int t, ObjId z, const std::string& label) {
    const auto& l = labels[t][z];
    auto it = std::find(l.begin(), l.end(), label);
    if (it == l.end()) text::fail(line, "unknown label '" + label + "'");
    return static_cast<int>(it - l.begin());
  };

  // var 0: codomain action; var i >= 1: slot i.
  std::map<std::tuple<int, int, MorId, ObjId>, std::vector<int>> maps;
  auto entry = [&](int var, int t, MorId g, ObjId z, int size) -> std::vector<int>& {
    auto [it, inserted] = maps.try_emplace({var, t, g, z}, std::vector<int>(size, -1));
    return it->second;
  };
  for (const auto& [line, content] : act_lines) {
    std::string_view s = content;
    s.remove_prefix(3);
    auto toks = text::tokens(s);
    if (toks.size() < 2) text::fail(line, "expected variable and morphism");
    int var = 0;
    try {
      var = std::stoi(toks[0]);
    } catch (const std::exception&) {
      text::fail(line, "bad variable");
    }
    if (var < 0 || var > static_cast<int>(slots.size())) text::fail(line, "variable out of range");
    s = text::trim(s);
    s.remove_prefix(toks[0].size());
    s = text::trim(s);
    s.remove_prefix(toks[1].size());
    TupleRef ref;
    s = parse_tuple(line, s, true, ref);
    int t = tuple_of(line, slots, ti, ref.body);
    ObjId z = lookup_object(line, y, ref.head);
    expect_prefix(line, s, ":");
    auto [from, to] = parse_arrow(line, s);
    if (var == 0) {
      MorId u = lookup_morphism(line, y, toks[1]);
      if (y.tgt(u) != z) text::fail(line, "codomain object must be the target of the morphism");
      auto& m = entry(0, t, u, z, static_cast<int>(labels[t][z].size()));
      int e = index_of(line, t, z, from);
      if (m[e] >= 0) text::fail(line, "duplicate action entry");
      m[e] = index_of(line, t, y.src(u), to);
    } else {
      const auto& c = *slots[var - 1];
      MorId g = lookup_morphism(line, c, toks[1]);
      if (c.src(g) != ti.component(t, var - 1)) text::fail(line, "slot object must be the source of the morphism");
      auto& m = entry(var, t, g, z, static_cast<int>(labels[t][z].size()));
      int e = index_of(line, t, z, from);
      if (m[e] >= 0) text::fail(line, "duplicate action entry");
      m[e] = index_of(line, ti.with(t, var - 1, c.tgt(g)), z, to);
    }
  }
  auto take = [&](int var, int t, MorId g, ObjId z, int size, bool identity, const std::string& what) {
    auto it = maps.find({var, t, g, z});
    std::vector<int> out;
    if (it == maps.end()) {
      if (!identity && size > 0) throw ParseError("missing action " + what);
      out.resize(size);
      for (int e = 0; e < size; ++e) out[e] = e;
      return out;
    }
    if (std::find(it->second.begin(), it->second.end(), -1) != it->second.end())
      throw ParseError("incomplete action " + what);
    return it->second;
  };

  std::vector<PshPtr> values(ti.size());
  for (int t = 0; t < ti.size(); ++t) {
    std::vector<int> sizes(ny);
    for (ObjId z = 0; z < ny; ++z) sizes[z] = static_cast<int>(labels[t][z].size());
    std::vector<std::vector<int>> act(y.num_morphisms());
    for (MorId u = 0; u < y.num_morphisms(); ++u)
      act[u] = take(0, t, u, y.tgt(u), sizes[y.tgt(u)], y.is_identity(u),
                    "0 " + y.morphism_name(u) + " at (" + tuple_text(slots, ti, t) + ")");
    values[t] = std::make_shared<const Presheaf>(codomain, std::move(sizes), std::move(act));
  }
  std::vector<std::vector<PshMorPtr>> actions(slots.size());
  for (size_t v = 0; v < slots.size(); ++v) {
    const auto& c = *slots[v];
    actions[v].resize(static_cast<size_t>(ti.size()) * c.num_morphisms());
    for (int t = 0; t < ti.size(); ++t)
      for (MorId g = 0; g < c.num_morphisms(); ++g) {
        if (c.src(g) != ti.component(t, v)) continue;
        int t2 = ti.with(t, v, c.tgt(g));
        std::vector<std::vector<int>> comps(ny);
        for (ObjId z = 0; z < ny; ++z) {
          comps[z] = take(static_cast<int>(v) + 1, t, g, z, values[t]->size(z), c.is_identity(g),
                          std::to_string(v + 1) + " " + c.morphism_name(g) + " at (" + tuple_text(slots, ti, t) + ")");
          for (int x : comps[z])
            if (x >= values[t2]->size(z)) throw ParseError("action out of range");
        }
        actions[v][t * c.num_morphisms() + g] =
            std::make_shared<const PresheafMorphism>(values[t], values[t2], std::move(comps));
      }
  }
  return std::make_shared<const MultiProfunctor>(std::move(slots), std::move(codomain), std::move(values),
                                                 std::move(actions));
}

std::string format_profunctor(const MultiProfunctor& p) {
  std::ostringstream out;
  const auto& ti = p.tuples();
  const auto& y = *p.codomain();
  auto where = [&](ObjId z, int t) { return "(" + y.object_name(z) + "; " + tuple_text(p.slots(), ti, t) + ")"; };
  for (int t = 0; t < ti.size(); ++t)
    for (ObjId z = 0; z < y.num_objects(); ++z) {
      std::vector<std::string> labels;
      for (int e = 0; e < p.value(t)->size(z); ++e) labels.push_back(std::to_string(e));
      out << "at " << where(z, t) << " = {" << text::join(labels, ",") << "}\n";
    }
  for (int t = 0; t < ti.size(); ++t)
    for (MorId u = 0; u < y.num_morphisms(); ++u) {
      if (y.is_identity(u)) continue;
      const auto& act = p.value(t)->act(u);
      for (int e = 0; e < static_cast<int>(act.size()); ++e)
        out << "act 0 " << y.morphism_name(u) << " " << where(y.tgt(u), t) << " : " << e << " -> " << act[e] << "\n";
    }
  for (int v = 0; v < p.arity(); ++v) {
    const auto& c = *p.slots()[v];
    for (int t = 0; t < ti.size(); ++t)
      for (MorId g = 0; g < c.num_morphisms(); ++g) {
        if (c.src(g) != ti.component(t, v) || c.is_identity(g)) continue;
        const auto& m = *p.action(v, t, g);
        for (ObjId z = 0; z < y.num_objects(); ++z)
          for (int e = 0; e < m.src()->size(z); ++e)
            out << "act " << v + 1 << " " << c.morphism_name(g) << " " << where(z, t) << " : " << e << " -> "
                << m.apply(z, e) << "\n";
      }
  }
  return out.str();
}

FunctorPtr parse_multifunctor(std::vector<CatPtr> slots, CatPtr codomain, std::string_view input) {
  TupleIndex ti = object_index(slots);
  const auto& y = *codomain;
  std::vector<ObjId> obj_map(ti.size(), -1);
  std::vector<std::vector<MorId>> mor_map(slots.size());
  for (size_t v = 0; v < slots.size(); ++v) mor_map[v].assign(static_cast<size_t>(ti.size()) * slots[v]->num_morphisms(), -1);
  for (const auto& line : text::lines(input)) {
    std::string_view s = line.content;
    auto toks = text::tokens(s);
    if (toks[0] == "obj") {
      s.remove_prefix(3);
      TupleRef ref;
      s = parse_tuple(line, s, false, ref);
      int t = tuple_of(line, slots, ti, ref.body);
      expect_prefix(line, s, "=");
      if (obj_map[t] >= 0) text::fail(line, "duplicate object entry");
      obj_map[t] = lookup_object(line, y, std::string(text::trim(s)));
    } else if (toks[0] == "mor") {
      if (toks.size() < 3) text::fail(line, "expected variable and morphism");
      int var = 0;
      try {
        var = std::stoi(toks[1]);
      } catch (const std::exception&) {
        text::fail(line, "bad variable");
      }
      if (var < 1 || var > static_cast<int>(slots.size())) text::fail(line, "variable out of range");
      const auto& c = *slots[var - 1];
      MorId g = lookup_morphism(line, c, toks[2]);
      s = text::trim(s);
      s.remove_prefix(3);
      s = text::trim(s);
      s.remove_prefix(toks[1].size());
      s = text::trim(s);
      s.remove_prefix(toks[2].size());
      TupleRef ref;
      s = parse_tuple(line, s, false, ref);
      int t = tuple_of(line, slots, ti, ref.body);
      if (c.src(g) != ti.component(t, var - 1)) text::fail(line, "slot object must be the source of the morphism");
      expect_prefix(line, s, "=");
      auto& cell = mor_map[var - 1][t * c.num_morphisms() + g];
      if (cell >= 0) text::fail(line, "duplicate morphism entry");
      cell = lookup_morphism(line, y, std::string(text::trim(s)));
    } else {
      text::fail(line, "unknown directive");
    }
  }
  for (int t = 0; t < ti.size(); ++t)
    if (obj_map[t] < 0) throw ParseError("missing object image at (" + tuple_text(slots, ti, t) + ")");
  for (size_t v = 0; v < slots.size(); ++v) {
    const auto& c = *slots[v];
    for (int t = 0; t < ti.size(); ++t)
      for (MorId g = 0; g < c.num_morphisms(); ++g) {
        if (c.src(g) != ti.component(t, v)) continue;
        auto& cell = mor_map[v][t * c.num_morphisms() + g];
        if (cell >= 0) continue;
        if (!c.is_identity(g))
          throw ParseError("missing morphism image " + std::to_string(v + 1) + " " + c.morphism_name(g) + " at (" +
                           tuple_text(slots, ti, t) + ")");
        cell = y.identity(obj_map[t]);
      }
  }
  return std::make_shared<const MultiFunctor>(std::move(slots), std::move(codomain), std::move(obj_map),
                                              std::move(mor_map));
}

std::string format_multifunctor(const MultiFunctor& f) {
  std::ostringstream out;
  const auto& ti = f.tuples();
  const auto& y = *f.codomain();
  for (int t = 0; t < ti.size(); ++t)
    out << "obj (" << tuple_text(f.slots(), ti, t) << ") = " << y.object_name(f.object(t)) << "\n";
  for (int v = 0; v < f.arity(); ++v) {
    const auto& c = *f.slots()[v];
    for (int t = 0; t < ti.size(); ++t)
      for (MorId g = 0; g < c.num_morphisms(); ++g) {
        if (c.src(g) != ti.component(t, v) || c.is_identity(g)) continue;
        out << "mor " << v + 1 << " " << c.morphism_name(g) << " (" << tuple_text(f.slots(), ti, t)
            << ") = " << y.morphism_name(f.action(v, t, g)) << "\n";
      }
  }
  return out.str();
}

}  // namespace relmonad
