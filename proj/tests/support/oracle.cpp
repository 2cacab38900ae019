#include "oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "relmonad/kan.hpp"

namespace relmonad::oracle {

namespace {

int find(std::vector<int>& parent, int i) {
  while (parent[i] != i) i = parent[i];
  return i;
}

void unite(std::vector<int>& parent, int i, int k) {
  int a = find(parent, i), b = find(parent, k);
  if (a != b) parent[std::max(a, b)] = std::min(a, b);
}

Partition close(std::vector<int> parent) {
  Partition out;
  out.class_of.assign(parent.size(), -1);
  std::vector<int> class_of_root(parent.size(), -1);
  for (size_t i = 0; i < parent.size(); ++i) {
    int r = find(parent, static_cast<int>(i));
    if (class_of_root[r] < 0) class_of_root[r] = out.classes++;
    out.class_of[i] = class_of_root[r];
  }
  return out;
}

Args with(Args args, int j, Arg v) {
  args[j] = std::move(v);
  return args;
}

}  // namespace

int hom_count(const FinCategory& c, ObjId a, ObjId b) {
  return static_cast<int>(std::count_if(c.morphisms().begin(), c.morphisms().end(),
                                        [&](const auto& m) { return m.src == a && m.tgt == b; }));
}

FlatCoend flat_coend(const MultiMap& f, int j, const Args& args, const PshPtr& p, ObjId z) {
  const auto& x = *f->slots().at(j).cat;
  FlatCoend out;
  std::map<std::vector<int>, int> index;
  for (ObjId a = 0; a < x.num_objects(); ++a) {
    auto v = f->evaluate(with(args, j, a));
    for (int e = 0; e < p->size(a); ++e)
      for (int u = 0; u < v->size(z); ++u) {
        index[{a, e, u}] = static_cast<int>(out.elements.size());
        out.elements.push_back({a, e, u});
      }
  }
  std::vector<int> parent(out.elements.size());
  std::iota(parent.begin(), parent.end(), 0);
  // (src m, P(m) e', u) ~ (tgt m, e', f(m) u) for every m and e' in P(tgt m).
  for (MorId m = 0; m < x.num_morphisms(); ++m) {
    ObjId a = x.src(m), b = x.tgt(m);
    auto act = f->evaluate_mor(with(args, j, a), j, m);
    for (int e = 0; e < p->size(b); ++e)
      for (int u = 0; u < act->src()->size(z); ++u)
        unite(parent, index.at({a, p->apply(m, e), u}), index.at({b, e, act->apply(z, u)}));
  }
  out.partition = close(std::move(parent));
  return out;
}

int FlatDoubleCoend::class_of(const std::vector<int>& element) const {
  auto it = std::lower_bound(elements.begin(), elements.end(), element);
  if (it == elements.end() || *it != element) throw Error("element outside the double coend");
  return partition.class_of[it - elements.begin()];
}

FlatDoubleCoend flat_double_coend(const MultiMap& f, int s, int t, const Args& args, const PshPtr& p,
                                  const PshPtr& q, ObjId z) {
  const auto& xs = *f->slots().at(s).cat;
  const auto& xt = *f->slots().at(t).cat;
  FlatDoubleCoend out;
  for (ObjId a = 0; a < xs.num_objects(); ++a)
    for (int e = 0; e < p->size(a); ++e)
      for (ObjId b = 0; b < xt.num_objects(); ++b)
        for (int e2 = 0; e2 < q->size(b); ++e2) {
          auto v = f->evaluate(with(with(args, s, a), t, b));
          for (int u = 0; u < v->size(z); ++u) out.elements.push_back({a, e, b, e2, u});
        }
  auto pos = [&](const std::vector<int>& el) {
    return static_cast<int>(std::lower_bound(out.elements.begin(), out.elements.end(), el) - out.elements.begin());
  };
  std::vector<int> parent(out.elements.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (ObjId b = 0; b < xt.num_objects(); ++b)
    for (MorId m = 0; m < xs.num_morphisms(); ++m) {
      ObjId a = xs.src(m), a2 = xs.tgt(m);
      auto act = f->evaluate_mor(with(with(args, s, a), t, b), s, m);
      for (int e = 0; e < p->size(a2); ++e)
        for (int e2 = 0; e2 < q->size(b); ++e2)
          for (int u = 0; u < act->src()->size(z); ++u)
            unite(parent, pos({a, p->apply(m, e), b, e2, u}), pos({a2, e, b, e2, act->apply(z, u)}));
    }
  for (ObjId a = 0; a < xs.num_objects(); ++a)
    for (MorId m = 0; m < xt.num_morphisms(); ++m) {
      ObjId b = xt.src(m), b2 = xt.tgt(m);
      auto act = f->evaluate_mor(with(with(args, s, a), t, b), t, m);
      for (int e = 0; e < p->size(a); ++e)
        for (int e2 = 0; e2 < q->size(b2); ++e2)
          for (int u = 0; u < act->src()->size(z); ++u)
            unite(parent, pos({a, e, b, q->apply(m, e2), u}), pos({a, e, b2, e2, act->apply(z, u)}));
    }
  out.partition = close(std::move(parent));
  return out;
}

std::vector<int> fubini_component(const MultiMap& f, int s, int t, const Args& args, ObjId z) {
  const auto& p = std::get<PshPtr>(args.at(s));
  const auto& q = std::get<PshPtr>(args.at(t));
  Args base = with(with(args, s, ObjId{0}), t, ObjId{0});
  auto flat = flat_double_coend(f, s, t, base, p, q, z);

  // Strengthen `inner_slot` first, then `outer_slot`; map each class to its flat class.
  auto to_flat = [&](int inner_slot, int outer_slot) {
    auto inner = strengthen(f, inner_slot);
    auto outer = strengthen(inner, outer_slot);
    std::vector<int> out(outer->evaluate(args)->size(z));
    std::vector<bool> hit(flat.partition.classes, false);
    for (int c = 0; c < static_cast<int>(out.size()); ++c) {
      auto o = coend_representative(outer, args, z, c);
      auto i = coend_representative(inner, with(args, outer_slot, o.x), z, o.a);
      std::vector<int> el = inner_slot == t ? std::vector<int>{o.x, o.e, i.x, i.e, i.a}
                                            : std::vector<int>{i.x, i.e, o.x, o.e, i.a};
      out[c] = flat.class_of(el);
      if (hit[out[c]]) throw Error("two coend classes share a flat class");
      hit[out[c]] = true;
    }
    if (std::find(hit.begin(), hit.end(), false) != hit.end()) throw Error("a flat class is not reached");
    return out;
  };
  auto from = to_flat(t, s);
  auto to = to_flat(s, t);
  std::vector<int> inv(flat.partition.classes);
  for (int c = 0; c < static_cast<int>(to.size()); ++c) inv[to[c]] = c;
  std::vector<int> out(from.size());
  for (int c = 0; c < static_cast<int>(from.size()); ++c) out[c] = inv[from[c]];
  return out;
}

}  // namespace relmonad::oracle
