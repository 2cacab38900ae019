#include "relmonad/fincat.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "relmonad/error.hpp"
#include "relmonad/tuple_index.hpp"
#include "text_util.hpp"

namespace relmonad {

FinCategory::FinCategory(std::vector<std::string> objects, std::vector<Morphism> morphisms,
                         std::vector<MorId> identities, std::vector<MorId> comp)
    : objects_(std::move(objects)),
      morphisms_(std::move(morphisms)),
      identities_(std::move(identities)),
      comp_(std::move(comp)) {
  const int n = num_objects();
  const int m = num_morphisms();
  if (static_cast<int>(identities_.size()) != n) throw ParseError("identity table has wrong size");
  if (static_cast<int>(comp_.size()) != m * m) throw ParseError("composition table has wrong size");
  std::set<std::string_view> seen;
  for (const auto& name : objects_)
    if (!seen.insert(name).second) throw ParseError("duplicate object '" + name + "'");
  seen.clear();
  for (const auto& mor : morphisms_) {
    if (!seen.insert(mor.name).second) throw ParseError("duplicate morphism '" + mor.name + "'");
    if (mor.src < 0 || mor.src >= n || mor.tgt < 0 || mor.tgt >= n)
      throw ParseError("morphism '" + mor.name + "' has a dangling endpoint");
  }
  for (ObjId a = 0; a < n; ++a) {
    MorId i = identities_[a];
    if (i < 0 || i >= m) throw ParseError("object '" + objects_[a] + "' has no identity");
    if (morphisms_[i].src != a || morphisms_[i].tgt != a)
      throw ParseError("identity of '" + objects_[a] + "' is not an endomorphism of it");
  }
  for (MorId gf : comp_)
    if (gf < -1 || gf >= m) throw ParseError("composition table entry out of range");
  hom_.assign(static_cast<size_t>(n) * n, {});
  for (MorId f = 0; f < m; ++f) hom_[morphisms_[f].src * n + morphisms_[f].tgt].push_back(f);
}

std::optional<ObjId> FinCategory::find_object(std::string_view name) const {
  for (ObjId a = 0; a < num_objects(); ++a)
    if (objects_[a] == name) return a;
  return std::nullopt;
}

std::optional<MorId> FinCategory::find_morphism(std::string_view name) const {
  for (MorId f = 0; f < num_morphisms(); ++f)
    if (morphisms_[f].name == name) return f;
  return std::nullopt;
}

bool FinCategory::operator==(const FinCategory& other) const {
  return objects_ == other.objects_ && morphisms_ == other.morphisms_ &&
         identities_ == other.identities_ && comp_ == other.comp_;
}

bool same_category(const CatPtr& a, const CatPtr& b) {
  return a == b || (a && b && *a == *b);
}

const char* to_string(CategoryDefect defect) {
  switch (defect) {
    case CategoryDefect::kNone: return "ok";
    case CategoryDefect::kMissingComposite: return "MissingComposite";
    case CategoryDefect::kIllTypedComposite: return "IllTypedComposite";
    case CategoryDefect::kBrokenIdentity: return "BrokenIdentity";
    case CategoryDefect::kBrokenAssociativity: return "BrokenAssociativity";
  }
  return "?";
}

CategoryReport validate_category(const FinCategory& c) {
  const int m = c.num_morphisms();
  auto report = [&](CategoryDefect d, std::vector<MorId> w) {
    CategoryReport r{d, std::move(w), {}};
    r.message = to_string(d);
    r.message += "(";
    for (size_t i = 0; i < r.witnesses.size(); ++i) {
      if (i) r.message += ",";
      r.message += c.morphism_name(r.witnesses[i]);
    }
    r.message += ")";
    return r;
  };
  for (MorId g = 0; g < m; ++g)
    for (MorId f = 0; f < m; ++f)
      if (c.composable(g, f) && c.compose(g, f) < 0) return report(CategoryDefect::kMissingComposite, {g, f});
  for (MorId g = 0; g < m; ++g)
    for (MorId f = 0; f < m; ++f) {
      MorId gf = c.compose(g, f);
      if (gf < 0) continue;
      if (!c.composable(g, f) || c.src(gf) != c.src(f) || c.tgt(gf) != c.tgt(g))
        return report(CategoryDefect::kIllTypedComposite, {g, f});
    }
  for (MorId f = 0; f < m; ++f) {
    if (c.compose(c.identity(c.tgt(f)), f) != f || c.compose(f, c.identity(c.src(f))) != f)
      return report(CategoryDefect::kBrokenIdentity, {f});
  }
  for (MorId h = 0; h < m; ++h)
    for (MorId g = 0; g < m; ++g) {
      if (!c.composable(h, g)) continue;
      MorId hg = c.compose(h, g);
      for (MorId f = 0; f < m; ++f) {
        if (!c.composable(g, f)) continue;
        if (c.compose(h, c.compose(g, f)) != c.compose(hg, f))
          return report(CategoryDefect::kBrokenAssociativity, {h, g, f});
      }
    }
  return {};
}

CatPtr terminal_category() {
  static const CatPtr terminal = std::make_shared<const FinCategory>(
      std::vector<std::string>{"*"}, std::vector<FinCategory::Morphism>{{"1_*", 0, 0}},
      std::vector<MorId>{0}, std::vector<MorId>{0});
  return terminal;
}

CatPtr free_category(std::vector<std::string> objects, const std::vector<std::pair<ObjId, ObjId>>& edges,
                     std::vector<std::string> edge_names) {
  const int n = static_cast<int>(objects.size());
  if (edge_names.empty())
    for (size_t e = 0; e < edges.size(); ++e) edge_names.push_back("e" + std::to_string(e));
  if (edge_names.size() != edges.size()) throw ParseError("edge name count mismatch");
  for (auto [a, b] : edges)
    if (a < 0 || a >= n || b < 0 || b >= n) throw ParseError("edge endpoint out of range");

  // Enumerate paths by length; a cycle would make this run forever, so
  // bound the length by the object count.
  std::vector<std::vector<int>> paths;
  std::vector<std::vector<int>> frontier;
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) frontier.push_back({e});
  for (int len = 1; !frontier.empty(); ++len) {
    if (len > n) throw ParseError("free_category: graph has a cycle");
    std::sort(frontier.begin(), frontier.end());
    paths.insert(paths.end(), frontier.begin(), frontier.end());
    std::vector<std::vector<int>> next;
    for (const auto& p : frontier)
      for (int e = 0; e < static_cast<int>(edges.size()); ++e)
        if (edges[e].first == edges[p.back()].second) {
          auto q = p;
          q.push_back(e);
          next.push_back(std::move(q));
        }
    frontier = std::move(next);
  }

  std::vector<FinCategory::Morphism> mors;
  std::vector<MorId> ids(n);
  for (ObjId a = 0; a < n; ++a) {
    ids[a] = a;
    mors.push_back({"1_" + objects[a], a, a});
  }
  std::map<std::vector<int>, MorId> path_id;
  for (const auto& p : paths) {
    std::string name;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
      if (!name.empty()) name += ".";
      name += edge_names[*it];
    }
    path_id[p] = static_cast<MorId>(mors.size());
    mors.push_back({name, edges[p.front()].first, edges[p.back()].second});
  }
  const int m = static_cast<int>(mors.size());
  std::vector<MorId> comp(static_cast<size_t>(m) * m, -1);
  auto path_of = [&](MorId f) -> std::vector<int> {
    if (f < n) return {};
    return paths[f - n];
  };
  for (MorId g = 0; g < m; ++g)
    for (MorId f = 0; f < m; ++f) {
      if (mors[f].tgt != mors[g].src) continue;
      if (g < n) {
        comp[g * m + f] = f;
      } else if (f < n) {
        comp[g * m + f] = g;
      } else {
        auto p = path_of(f);
        auto q = path_of(g);
        p.insert(p.end(), q.begin(), q.end());
        comp[g * m + f] = path_id.at(p);
      }
    }
  return std::make_shared<const FinCategory>(std::move(objects), std::move(mors), std::move(ids), std::move(comp));
}

CatPtr walking_arrow() {
  return free_category({"a", "b"}, {{0, 1}}, {"f"});
}

CatPtr product_category(const std::vector<CatPtr>& factors) {
  if (factors.empty()) return terminal_category();
  std::vector<int> obj_radix, mor_radix;
  for (const auto& c : factors) {
    obj_radix.push_back(c->num_objects());
    mor_radix.push_back(c->num_morphisms());
  }
  TupleIndex objs(obj_radix), mors(mor_radix);
  const int k = static_cast<int>(factors.size());
  auto tuple_name = [](const std::vector<std::string>& parts) { return "(" + text::join(parts, ",") + ")"; };

  std::vector<std::string> obj_names;
  for (int o = 0; o < objs.size(); ++o) {
    std::vector<std::string> parts;
    for (int i = 0; i < k; ++i) parts.push_back(factors[i]->object_name(objs.component(o, i)));
    obj_names.push_back(tuple_name(parts));
  }
  std::vector<FinCategory::Morphism> mor_list;
  std::vector<int> s(k), t(k);
  for (int f = 0; f < mors.size(); ++f) {
    std::vector<std::string> parts;
    for (int i = 0; i < k; ++i) {
      MorId fi = mors.component(f, i);
      parts.push_back(factors[i]->morphism_name(fi));
      s[i] = factors[i]->src(fi);
      t[i] = factors[i]->tgt(fi);
    }
    mor_list.push_back({tuple_name(parts), objs.encode(s), objs.encode(t)});
  }
  std::vector<MorId> ids(objs.size());
  std::vector<int> tuple(k);
  for (int o = 0; o < objs.size(); ++o) {
    for (int i = 0; i < k; ++i) tuple[i] = factors[i]->identity(objs.component(o, i));
    ids[o] = mors.encode(tuple);
  }
  const int m = mors.size();
  std::vector<MorId> comp(static_cast<size_t>(m) * m, -1);
  for (int g = 0; g < m; ++g)
    for (int f = 0; f < m; ++f) {
      if (mor_list[g].src != mor_list[f].tgt) continue;
      bool defined = true;
      for (int i = 0; i < k && defined; ++i) {
        tuple[i] = factors[i]->compose(mors.component(g, i), mors.component(f, i));
        defined = tuple[i] >= 0;
      }
      if (defined) comp[g * m + f] = mors.encode(tuple);
    }
  return std::make_shared<const FinCategory>(std::move(obj_names), std::move(mor_list), std::move(ids), std::move(comp));
}

CatPtr opposite_category(const FinCategory& c) {
  std::vector<FinCategory::Morphism> mors;
  for (const auto& f : c.morphisms()) mors.push_back({f.name, f.tgt, f.src});
  const int m = c.num_morphisms();
  std::vector<MorId> comp(static_cast<size_t>(m) * m, -1);
  for (MorId g = 0; g < m; ++g)
    for (MorId f = 0; f < m; ++f) comp[g * m + f] = c.compose(f, g);
  return std::make_shared<const FinCategory>(c.objects(), std::move(mors), c.identities(), std::move(comp));
}

FunctorTable identity_functor(const CatPtr& c) {
  FunctorTable f{c, c, {}, {}};
  for (ObjId a = 0; a < c->num_objects(); ++a) f.obj_map.push_back(a);
  for (MorId m = 0; m < c->num_morphisms(); ++m) f.mor_map.push_back(m);
  return f;
}

std::string validate_functor(const FunctorTable& f) {
  const auto& a = *f.src;
  const auto& b = *f.dst;
  if (static_cast<int>(f.obj_map.size()) != a.num_objects() ||
      static_cast<int>(f.mor_map.size()) != a.num_morphisms())
    return "table sizes do not match the source category";
  for (ObjId x : f.obj_map)
    if (x < 0 || x >= b.num_objects()) return "object image out of range";
  for (MorId m = 0; m < a.num_morphisms(); ++m) {
    MorId fm = f.mor_map[m];
    if (fm < 0 || fm >= b.num_morphisms()) return "morphism image out of range";
    if (b.src(fm) != f.obj_map[a.src(m)] || b.tgt(fm) != f.obj_map[a.tgt(m)])
      return "morphism " + a.morphism_name(m) + " is sent outside the image hom-set";
  }
  for (ObjId x = 0; x < a.num_objects(); ++x)
    if (f.mor_map[a.identity(x)] != b.identity(f.obj_map[x]))
      return "identity of " + a.object_name(x) + " not preserved";
  for (MorId g = 0; g < a.num_morphisms(); ++g)
    for (MorId h = 0; h < a.num_morphisms(); ++h) {
      if (!a.composable(g, h)) continue;
      if (f.mor_map[a.compose(g, h)] != b.compose(f.mor_map[g], f.mor_map[h]))
        return "composite " + a.morphism_name(g) + "∘" + a.morphism_name(h) + " not preserved";
    }
  return {};
}

std::string validate_nat_trans(const NatTransTable& t) {
  if (t.src.src != t.dst.src || t.src.dst != t.dst.dst) return "functors are not parallel";
  const auto& a = *t.src.src;
  const auto& b = *t.src.dst;
  if (static_cast<int>(t.components.size()) != a.num_objects()) return "component count mismatch";
  for (ObjId x = 0; x < a.num_objects(); ++x) {
    MorId c = t.components[x];
    if (c < 0 || c >= b.num_morphisms() || b.src(c) != t.src.obj_map[x] || b.tgt(c) != t.dst.obj_map[x])
      return "component at " + a.object_name(x) + " has the wrong type";
  }
  for (MorId m = 0; m < a.num_morphisms(); ++m) {
    MorId lhs = b.compose(t.dst.mor_map[m], t.components[a.src(m)]);
    MorId rhs = b.compose(t.components[a.tgt(m)], t.src.mor_map[m]);
    if (lhs != rhs) return "naturality square at " + a.morphism_name(m) + " does not commute";
  }
  return {};
}

CatPtr parse_category(std::string_view input) {
  std::vector<std::string> objects;
  std::vector<FinCategory::Morphism> mors;
  std::map<std::string, ObjId, std::less<>> obj_id;
  std::map<std::string, MorId, std::less<>> mor_id;
  std::vector<std::pair<text::Line, std::vector<std::string>>> later;

  for (const auto& line : text::lines(input)) {
    auto tok = text::tokens(line.content);
    if (tok[0] == "obj") {
      if (tok.size() != 2) text::fail(line, "expected 'obj <id>'");
      if (obj_id.count(tok[1])) text::fail(line, "duplicate object");
      obj_id[tok[1]] = static_cast<ObjId>(objects.size());
      objects.push_back(tok[1]);
    } else if (tok[0] == "mor") {
      if (tok.size() != 6 || tok[2] != ":" || tok[4] != "->") text::fail(line, "expected 'mor <id> : <src> -> <tgt>'");
      if (mor_id.count(tok[1])) text::fail(line, "duplicate morphism");
      auto s = obj_id.find(tok[3]);
      auto t = obj_id.find(tok[5]);
      if (s == obj_id.end() || t == obj_id.end()) text::fail(line, "dangling object");
      mor_id[tok[1]] = static_cast<MorId>(mors.size());
      mors.push_back({tok[1], s->second, t->second});
    } else if (tok[0] == "id" || tok[0] == "comp") {
      later.emplace_back(line, std::move(tok));
    } else {
      text::fail(line, "unknown directive");
    }
  }
  const int m = static_cast<int>(mors.size());
  std::vector<MorId> ids(objects.size(), -1);
  std::vector<MorId> comp(static_cast<size_t>(m) * m, -1);
  auto mor = [&](const text::Line& line, const std::string& name) {
    auto it = mor_id.find(name);
    if (it == mor_id.end()) text::fail(line, "dangling morphism '" + name + "'");
    return it->second;
  };
  for (const auto& [line, tok] : later) {
    if (tok[0] == "id") {
      if (tok.size() != 4 || tok[2] != "=") text::fail(line, "expected 'id <obj> = <mor>'");
      auto o = obj_id.find(tok[1]);
      if (o == obj_id.end()) text::fail(line, "dangling object");
      if (ids[o->second] >= 0) text::fail(line, "duplicate identity");
      ids[o->second] = mor(line, tok[3]);
    } else {
      if (tok.size() != 5 || tok[3] != "=") text::fail(line, "expected 'comp <g> <f> = <gf>'");
      MorId g = mor(line, tok[1]);
      MorId f = mor(line, tok[2]);
      if (comp[g * m + f] >= 0) text::fail(line, "duplicate composite");
      comp[g * m + f] = mor(line, tok[4]);
    }
  }
  for (size_t a = 0; a < objects.size(); ++a)
    if (ids[a] < 0) throw ParseError("object '" + objects[a] + "' has no identity line");
  return std::make_shared<const FinCategory>(std::move(objects), std::move(mors), std::move(ids), std::move(comp));
}

std::string format_category(const FinCategory& c) {
  std::string out;
  for (const auto& o : c.objects()) out += "obj " + o + "\n";
  for (const auto& f : c.morphisms())
    out += "mor " + f.name + " : " + c.object_name(f.src) + " -> " + c.object_name(f.tgt) + "\n";
  for (ObjId a = 0; a < c.num_objects(); ++a)
    out += "id " + c.object_name(a) + " = " + c.morphism_name(c.identity(a)) + "\n";
  for (MorId g = 0; g < c.num_morphisms(); ++g)
    for (MorId f = 0; f < c.num_morphisms(); ++f)
      if (MorId gf = c.compose(g, f); gf >= 0)
        out += "comp " + c.morphism_name(g) + " " + c.morphism_name(f) + " = " + c.morphism_name(gf) + "\n";
  return out;
}

}  // namespace relmonad
