#include "relmonad/presheaf.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <numeric>

#include "relmonad/error.hpp"
#include "text_util.hpp"
#include "union_find.hpp"

namespace relmonad {

namespace {

std::atomic<std::int64_t> g_merges{0};

void append_int(std::string& key, int v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); }

void append_table(std::string& key, const std::vector<std::vector<int>>& rows) {
  append_int(key, static_cast<int>(rows.size()));
  for (const auto& row : rows) {
    append_int(key, static_cast<int>(row.size()));
    for (int v : row) append_int(key, v);
  }
}

}  // namespace

Presheaf::Presheaf(CatPtr base, std::vector<int> sizes, std::vector<std::vector<int>> act)
    : base_(std::move(base)), sizes_(std::move(sizes)), act_(std::move(act)) {
  if (static_cast<int>(sizes_.size()) != base_->num_objects() ||
      static_cast<int>(act_.size()) != base_->num_morphisms())
    throw TypeMismatch("presheaf tables do not match the base category");
  for (MorId m = 0; m < base_->num_morphisms(); ++m) {
    if (static_cast<int>(act_[m].size()) != sizes_[base_->tgt(m)])
      throw TypeMismatch("action of " + base_->morphism_name(m) + " has the wrong domain size");
    for (int v : act_[m])
      if (v < 0 || v >= sizes_[base_->src(m)])
        throw TypeMismatch("action of " + base_->morphism_name(m) + " leaves its codomain");
  }
  key_.reserve(sizeof(int) * (sizes_.size() + 2));
  append_int(key_, static_cast<int>(sizes_.size()));
  for (int s : sizes_) append_int(key_, s);
  append_table(key_, act_);
}

int Presheaf::total_size() const {
  int n = 0;
  for (int s : sizes_) n += s;
  return n;
}

bool Presheaf::operator==(const Presheaf& other) const {
  return this == &other || (key_ == other.key_ && same_category(base_, other.base_));
}

std::string validate_presheaf(const Presheaf& p) {
  const auto& c = *p.base();
  for (ObjId a = 0; a < c.num_objects(); ++a) {
    const auto& id = p.act(c.identity(a));
    for (int e = 0; e < p.size(a); ++e)
      if (id[e] != e)
        return "identity " + c.morphism_name(c.identity(a)) + " moves element " + std::to_string(e);
  }
  for (MorId g = 0; g < c.num_morphisms(); ++g)
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
      if (!c.composable(g, f)) continue;
      MorId gf = c.compose(g, f);
      if (gf < 0) continue;
      for (int e = 0; e < p.size(c.tgt(g)); ++e)
        if (p.apply(gf, e) != p.apply(f, p.apply(g, e)))
          return "contravariance fails at (" + c.morphism_name(g) + "," + c.morphism_name(f) + ") on element " +
                 std::to_string(e);
    }
  return {};
}

PresheafMorphism::PresheafMorphism(PshPtr src, PshPtr dst, std::vector<std::vector<int>> components)
    : src_(std::move(src)), dst_(std::move(dst)), components_(std::move(components)) {
  const int n = src_->base()->num_objects();
  if (!same_category(src_->base(), dst_->base()) || static_cast<int>(components_.size()) != n)
    throw TypeMismatch("presheaf morphism components do not match the base");
  for (ObjId a = 0; a < n; ++a) {
    if (static_cast<int>(components_[a].size()) != src_->size(a))
      throw TypeMismatch("component at " + src_->base()->object_name(a) + " has the wrong domain size");
    for (int v : components_[a])
      if (v < 0 || v >= dst_->size(a))
        throw TypeMismatch("component at " + src_->base()->object_name(a) + " leaves its codomain");
  }
  key_ = src_->key();
  key_ += dst_->key();
  append_table(key_, components_);
}

bool PresheafMorphism::operator==(const PresheafMorphism& other) const {
  return this == &other || (*src_ == *other.src_ && *dst_ == *other.dst_ && components_ == other.components_);
}

std::string validate_presheaf_morphism(const PresheafMorphism& m) {
  const auto& c = *m.src()->base();
  for (MorId f = 0; f < c.num_morphisms(); ++f)
    for (int e = 0; e < m.src()->size(c.tgt(f)); ++e)
      if (m.apply(c.src(f), m.src()->apply(f, e)) != m.dst()->apply(f, m.apply(c.tgt(f), e)))
        return "naturality fails at " + c.morphism_name(f) + " on element " + std::to_string(e);
  return {};
}

bool is_bijective(const PresheafMorphism& m) {
  for (ObjId a = 0; a < m.src()->base()->num_objects(); ++a) {
    if (m.src()->size(a) != m.dst()->size(a)) return false;
    std::vector<char> hit(m.dst()->size(a), 0);
    for (int v : m.at(a)) {
      if (hit[v]) return false;
      hit[v] = 1;
    }
  }
  return true;
}

PshMorPtr identity_morphism(const PshPtr& p) {
  std::vector<std::vector<int>> comps(p->sizes().size());
  for (size_t a = 0; a < comps.size(); ++a) {
    comps[a].resize(p->sizes()[a]);
    std::iota(comps[a].begin(), comps[a].end(), 0);
  }
  return std::make_shared<const PresheafMorphism>(p, p, std::move(comps));
}

PshMorPtr compose(const PresheafMorphism& g, const PresheafMorphism& f) {
  if (!(*f.dst() == *g.src())) throw TypeMismatch("composite of presheaf morphisms is ill-typed");
  std::vector<std::vector<int>> comps(f.components().size());
  for (size_t a = 0; a < comps.size(); ++a) {
    comps[a].reserve(f.at(a).size());
    for (int v : f.at(a)) comps[a].push_back(g.at(a)[v]);
  }
  return std::make_shared<const PresheafMorphism>(f.src(), g.dst(), std::move(comps));
}

PshMorPtr inverse(const PresheafMorphism& m) {
  if (!is_bijective(m)) throw Error("presheaf morphism is not invertible");
  std::vector<std::vector<int>> comps(m.components().size());
  for (size_t a = 0; a < comps.size(); ++a) {
    comps[a].assign(m.at(a).size(), 0);
    for (size_t e = 0; e < m.at(a).size(); ++e) comps[a][m.at(a)[e]] = static_cast<int>(e);
  }
  return std::make_shared<const PresheafMorphism>(m.dst(), m.src(), std::move(comps));
}

PshPtr representable(const CatPtr& c, ObjId a) {
  if (a < 0 || a >= c->num_objects()) throw TypeMismatch("representable: unknown object");
  std::vector<int> sizes(c->num_objects());
  for (ObjId b = 0; b < c->num_objects(); ++b) sizes[b] = static_cast<int>(c->hom(b, a).size());
  // Position of each morphism inside its hom-set.
  std::vector<int> pos(c->num_morphisms(), -1);
  for (ObjId b = 0; b < c->num_objects(); ++b) {
    const auto& h = c->hom(b, a);
    for (size_t i = 0; i < h.size(); ++i) pos[h[i]] = static_cast<int>(i);
  }
  std::vector<std::vector<int>> act(c->num_morphisms());
  for (MorId m = 0; m < c->num_morphisms(); ++m)
    for (MorId g : c->hom(c->tgt(m), a)) act[m].push_back(pos[c->compose(g, m)]);
  return std::make_shared<const Presheaf>(c, std::move(sizes), std::move(act));
}

PshMorPtr yoneda_action(const CatPtr& c, MorId f) {
  auto src = representable(c, c->src(f));
  auto dst = representable(c, c->tgt(f));
  std::vector<std::vector<int>> comps(c->num_objects());
  for (ObjId b = 0; b < c->num_objects(); ++b) {
    const auto& target = c->hom(b, c->tgt(f));
    for (MorId g : c->hom(b, c->src(f))) {
      MorId fg = c->compose(f, g);
      comps[b].push_back(static_cast<int>(std::find(target.begin(), target.end(), fg) - target.begin()));
    }
  }
  return std::make_shared<const PresheafMorphism>(src, dst, std::move(comps));
}

PshPtr empty_presheaf(const CatPtr& c) {
  return std::make_shared<const Presheaf>(c, std::vector<int>(c->num_objects(), 0),
                                          std::vector<std::vector<int>>(c->num_morphisms()));
}

PshPtr terminal_presheaf(const CatPtr& c) {
  return std::make_shared<const Presheaf>(c, std::vector<int>(c->num_objects(), 1),
                                          std::vector<std::vector<int>>(c->num_morphisms(), std::vector<int>{0}));
}

PshPtr coproduct(const PshPtr& p, const PshPtr& q) {
  if (!same_category(p->base(), q->base())) throw TypeMismatch("coproduct of presheaves on different bases");
  const auto& c = *p->base();
  std::vector<int> sizes(c.num_objects());
  for (ObjId a = 0; a < c.num_objects(); ++a) sizes[a] = p->size(a) + q->size(a);
  std::vector<std::vector<int>> act(c.num_morphisms());
  for (MorId m = 0; m < c.num_morphisms(); ++m) {
    act[m] = p->act(m);
    for (int v : q->act(m)) act[m].push_back(v + p->size(c.src(m)));
  }
  return std::make_shared<const Presheaf>(p->base(), std::move(sizes), std::move(act));
}

PshPtr quotient_presheaf(const PshPtr& p, const std::vector<std::tuple<ObjId, int, int>>& merges) {
  const auto& c = *p->base();
  std::vector<int> offset(c.num_objects() + 1, 0);
  for (ObjId a = 0; a < c.num_objects(); ++a) offset[a + 1] = offset[a] + p->size(a);
  UnionFind uf(offset.back());
  for (auto [a, e1, e2] : merges) uf.unite(offset[a] + e1, offset[a] + e2);
  for (bool changed = true; changed;) {
    changed = false;
    for (MorId m = 0; m < c.num_morphisms(); ++m) {
      ObjId s = c.src(m), t = c.tgt(m);
      for (int e = 0; e < p->size(t); ++e) {
        int root = uf.find(offset[t] + e) - offset[t];
        if (uf.unite(offset[s] + p->apply(m, e), offset[s] + p->apply(m, root))) changed = true;
      }
    }
  }
  std::vector<int> cls(offset.back(), -1);
  std::vector<int> sizes(c.num_objects(), 0);
  for (ObjId a = 0; a < c.num_objects(); ++a)
    for (int e = 0; e < p->size(a); ++e) {
      int r = uf.find(offset[a] + e);
      if (r == offset[a] + e) cls[r] = sizes[a]++;
    }
  std::vector<std::vector<int>> act(c.num_morphisms());
  for (MorId m = 0; m < c.num_morphisms(); ++m) {
    ObjId s = c.src(m), t = c.tgt(m);
    act[m].assign(sizes[t], 0);
    for (int e = 0; e < p->size(t); ++e) {
      int r = uf.find(offset[t] + e);
      act[m][cls[r]] = cls[uf.find(offset[s] + p->apply(m, e))];
    }
  }
  return std::make_shared<const Presheaf>(p->base(), std::move(sizes), std::move(act));
}

std::int64_t coend_budget() {
  static const std::int64_t budget = [] {
    const char* env = std::getenv("RELMONAD_BUDGET");
    if (!env || !*env) return std::int64_t{100000};
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (*end != '\0' || v <= 0) throw Error("RELMONAD_BUDGET must be a positive integer");
    return static_cast<std::int64_t>(v);
  }();
  return budget;
}

std::int64_t colimit_merge_count() { return g_merges.load(); }

Colimit colimit_finset(const SetDiagram& d) {
  Colimit out;
  const int nodes = static_cast<int>(d.sizes.size());
  out.offset.assign(nodes + 1, 0);
  for (int i = 0; i < nodes; ++i) out.offset[i + 1] = out.offset[i] + d.sizes[i];
  const int total = out.offset.back();
  if (total > coend_budget())
    throw BudgetExceeded("colimit of " + std::to_string(total) + " elements exceeds budget " +
                         std::to_string(coend_budget()));
  UnionFind uf(total);
  std::int64_t merges = 0;
  for (const auto& arrow : d.arrows)
    for (int e = 0; e < d.sizes[arrow.src]; ++e)
      if (uf.unite(out.offset[arrow.src] + e, out.offset[arrow.dst] + arrow.map[e])) ++merges;
  g_merges += merges;
  out.class_of.assign(total, -1);
  for (int node = 0, flat = 0; node < nodes; ++node)
    for (int e = 0; e < d.sizes[node]; ++e, ++flat) {
      int root = uf.find(flat);
      if (root == flat) {
        out.class_of[flat] = out.size++;
        out.representative.emplace_back(node, e);
      } else {
        out.class_of[flat] = out.class_of[root];
      }
    }
  return out;
}

Colimit colimit_finset(const FinCategory& shape, const std::vector<int>& sizes,
                       const std::vector<std::vector<int>>& maps) {
  if (static_cast<int>(sizes.size()) != shape.num_objects() ||
      static_cast<int>(maps.size()) != shape.num_morphisms())
    throw TypeMismatch("diagram tables do not match the shape");
  SetDiagram d{sizes, {}};
  for (MorId m = 0; m < shape.num_morphisms(); ++m) {
    ObjId s = shape.src(m), t = shape.tgt(m);
    if (static_cast<int>(maps[m].size()) != sizes[s]) throw TypeMismatch("diagram map has the wrong domain");
    for (int v : maps[m])
      if (v < 0 || v >= sizes[t]) throw TypeMismatch("diagram map leaves its codomain");
    for (int e = 0; e < sizes[s]; ++e)
      if (shape.is_identity(m) && maps[m][e] != e)
        throw TypeMismatch("diagram moves elements along identity " + shape.morphism_name(m));
  }
  for (MorId g = 0; g < shape.num_morphisms(); ++g)
    for (MorId f = 0; f < shape.num_morphisms(); ++f) {
      if (!shape.composable(g, f)) continue;
      MorId gf = shape.compose(g, f);
      for (int e = 0; e < sizes[shape.src(f)]; ++e)
        if (maps[gf][e] != maps[g][maps[f][e]])
          throw TypeMismatch("diagram is not functorial at (" + shape.morphism_name(g) + "," +
                             shape.morphism_name(f) + ")");
    }
  for (MorId m = 0; m < shape.num_morphisms(); ++m) d.arrows.push_back({shape.src(m), shape.tgt(m), maps[m]});
  return colimit_finset(d);
}

ElementIndex element_index(const Presheaf& p) {
  const auto& c = *p.base();
  ElementIndex idx;
  idx.first.assign(c.num_objects(), 0);
  for (ObjId x = 0; x < c.num_objects(); ++x) {
    idx.first[x] = static_cast<int>(idx.nodes.size());
    for (int e = 0; e < p.size(x); ++e) idx.nodes.emplace_back(x, e);
  }
  for (MorId m = 0; m < c.num_morphisms(); ++m)
    for (int e = 0; e < p.size(c.tgt(m)); ++e)
      idx.arrows.push_back({idx.node(c.src(m), p.apply(m, e)), idx.node(c.tgt(m), e), m});
  return idx;
}

CategoryOfElements category_of_elements(const PshPtr& p) {
  const auto& c = *p->base();
  CategoryOfElements out;
  out.index = element_index(*p);
  const auto& idx = out.index;
  std::vector<std::string> objects;
  for (auto [x, e] : idx.nodes) objects.push_back("(" + c.object_name(x) + "," + std::to_string(e) + ")");
  std::vector<FinCategory::Morphism> mors;
  std::vector<MorId> mor_map;
  std::map<std::pair<MorId, int>, MorId> id_of;  // (base morphism, element at target) -> morphism
  for (const auto& a : idx.arrows) {
    int e = idx.nodes[a.dst].second;
    id_of[{a.base, e}] = static_cast<MorId>(mors.size());
    mors.push_back({c.morphism_name(a.base) + "@" + std::to_string(e), a.src, a.dst});
    mor_map.push_back(a.base);
  }
  std::vector<MorId> ids;
  for (auto [x, e] : idx.nodes) ids.push_back(id_of.at({c.identity(x), e}));
  const int m = static_cast<int>(mors.size());
  std::vector<MorId> comp(static_cast<size_t>(m) * m, -1);
  for (MorId g = 0; g < m; ++g)
    for (MorId f = 0; f < m; ++f)
      if (mors[f].tgt == mors[g].src)
        comp[g * m + f] = id_of.at({c.compose(mor_map[g], mor_map[f]), idx.nodes[mors[g].tgt].second});
  std::vector<ObjId> obj_map;
  for (auto [x, e] : idx.nodes) obj_map.push_back(x);
  out.category = std::make_shared<const FinCategory>(std::move(objects), std::move(mors), std::move(ids),
                                                     std::move(comp));
  out.projection = FunctorTable{out.category, p->base(), std::move(obj_map), std::move(mor_map)};
  return out;
}

std::vector<Family> enumerate_natural_families(const SetSystem& a, const SetSystem& b, std::int64_t budget) {
  const int nodes = static_cast<int>(a.sizes.size());
  if (b.sizes.size() != a.sizes.size() || b.arrows.size() != a.arrows.size())
    throw TypeMismatch("set systems have different shapes");
  for (size_t i = 0; i < a.arrows.size(); ++i)
    if (a.arrows[i].src != b.arrows[i].src || a.arrows[i].dst != b.arrows[i].dst)
      throw TypeMismatch("set systems have different arrows");

  // Flatten (node, element) slots in order; out[k] lists arrows leaving a
  // node, in[k] arrows entering it.
  std::vector<std::vector<int>> out(nodes), in(nodes);
  for (int i = 0; i < static_cast<int>(a.arrows.size()); ++i) {
    out[a.arrows[i].src].push_back(i);
    in[a.arrows[i].dst].push_back(i);
  }
  // preimage[arrow][e] = elements of the source mapped to e.
  std::vector<std::vector<std::vector<int>>> preimage(a.arrows.size());
  for (size_t i = 0; i < a.arrows.size(); ++i) {
    const auto& ar = a.arrows[i];
    preimage[i].assign(a.sizes[ar.dst], {});
    for (int e = 0; e < a.sizes[ar.src]; ++e) preimage[i][ar.map[e]].push_back(e);
  }
  std::vector<std::pair<int, int>> slots;
  for (int n = 0; n < nodes; ++n)
    for (int e = 0; e < a.sizes[n]; ++e) slots.emplace_back(n, e);

  Family current(nodes);
  for (int n = 0; n < nodes; ++n) current[n].assign(a.sizes[n], -1);
  std::vector<Family> results;
  std::int64_t tried = 0;

  auto consistent = [&](int n, int e) {
    int v = current[n][e];
    for (int i : out[n]) {
      const auto& ar = a.arrows[i];
      int w = current[ar.dst][ar.map[e]];
      if (w >= 0 && w != b.arrows[i].map[v]) return false;
    }
    for (int i : in[n]) {
      const auto& ar = a.arrows[i];
      for (int pre : preimage[i][e]) {
        int w = current[ar.src][pre];
        if (w >= 0 && b.arrows[i].map[w] != v) return false;
      }
    }
    return true;
  };

  auto search = [&](auto&& self, size_t k) -> void {
    if (k == slots.size()) {
      results.push_back(current);
      return;
    }
    auto [n, e] = slots[k];
    for (int v = 0; v < b.sizes[n]; ++v) {
      if (++tried > budget) throw BudgetExceeded("natural-family enumeration exceeded its budget");
      current[n][e] = v;
      if (consistent(n, e)) self(self, k + 1);
    }
    current[n][e] = -1;
  };
  search(search, 0);
  return results;
}

SetSystem set_system(const Presheaf& p) {
  const auto& c = *p.base();
  SetSystem s{p.sizes(), {}};
  for (MorId m = 0; m < c.num_morphisms(); ++m) s.arrows.push_back({c.tgt(m), c.src(m), p.act(m)});
  return s;
}

std::vector<PshMorPtr> enumerate_nat_trans(const PshPtr& p, const PshPtr& q, std::int64_t budget) {
  if (!same_category(p->base(), q->base())) throw TypeMismatch("presheaves on different bases");
  std::vector<PshMorPtr> out;
  for (auto& fam : enumerate_natural_families(set_system(*p), set_system(*q), budget))
    out.push_back(std::make_shared<const PresheafMorphism>(p, q, std::move(fam)));
  return out;
}

PshPtr parse_presheaf(const CatPtr& base, std::string_view input) {
  const auto& c = *base;
  std::vector<std::vector<std::string>> labels(c.num_objects());
  std::vector<bool> seen(c.num_objects(), false);
  std::vector<std::vector<int>> act(c.num_morphisms());
  std::vector<text::Line> act_lines;
  auto label_index = [&](const text::Line& line, ObjId a, const std::string& l) {
    auto it = std::find(labels[a].begin(), labels[a].end(), l);
    if (it == labels[a].end()) text::fail(line, "unknown label '" + l + "' at " + c.object_name(a));
    return static_cast<int>(it - labels[a].begin());
  };
  for (const auto& line : text::lines(input)) {
    auto tok = text::tokens(line.content);
    if (tok[0] == "at") {
      auto eq = line.content.find('=');
      if (tok.size() < 3 || tok[2] != "=" || eq == std::string_view::npos) text::fail(line, "expected 'at <obj> = {..}'");
      auto a = c.find_object(tok[1]);
      if (!a) text::fail(line, "dangling object");
      if (seen[*a]) text::fail(line, "duplicate value set");
      seen[*a] = true;
      labels[*a] = text::brace_list(line, line.content.substr(eq + 1));
      std::vector<std::string> sorted = labels[*a];
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) text::fail(line, "duplicate label");
    } else if (tok[0] == "act") {
      act_lines.push_back(line);
    } else {
      text::fail(line, "unknown directive");
    }
  }
  for (ObjId a = 0; a < c.num_objects(); ++a)
    if (!seen[a]) throw ParseError("no value set for object '" + c.object_name(a) + "'");
  for (MorId m = 0; m < c.num_morphisms(); ++m) act[m].assign(labels[c.tgt(m)].size(), -1);
  for (const auto& line : act_lines) {
    auto tok = text::tokens(line.content);
    if (tok.size() != 6 || tok[2] != ":" || tok[4] != "->") text::fail(line, "expected 'act <mor> : <l> -> <l>'");
    auto m = c.find_morphism(tok[1]);
    if (!m) text::fail(line, "dangling morphism");
    int from = label_index(line, c.tgt(*m), tok[3]);
    int to = label_index(line, c.src(*m), tok[5]);
    if (act[*m][from] >= 0) text::fail(line, "duplicate action");
    act[*m][from] = to;
  }
  for (MorId m = 0; m < c.num_morphisms(); ++m)
    for (size_t e = 0; e < act[m].size(); ++e) {
      if (act[m][e] >= 0) continue;
      if (!c.is_identity(m))
        throw ParseError("missing action of '" + c.morphism_name(m) + "' on '" + labels[c.tgt(m)][e] + "'");
      act[m][e] = static_cast<int>(e);
    }
  std::vector<int> sizes;
  for (const auto& l : labels) sizes.push_back(static_cast<int>(l.size()));
  return std::make_shared<const Presheaf>(base, std::move(sizes), std::move(act));
}

std::string format_presheaf(const Presheaf& p) {
  const auto& c = *p.base();
  std::string out;
  for (ObjId a = 0; a < c.num_objects(); ++a) {
    std::vector<std::string> ls;
    for (int e = 0; e < p.size(a); ++e) ls.push_back(std::to_string(e));
    out += "at " + c.object_name(a) + " = {" + text::join(ls, ",") + "}\n";
  }
  for (MorId m = 0; m < c.num_morphisms(); ++m) {
    if (c.is_identity(m)) continue;
    for (int e = 0; e < p.size(c.tgt(m)); ++e)
      out += "act " + c.morphism_name(m) + " : " + std::to_string(e) + " -> " + std::to_string(p.apply(m, e)) + "\n";
  }
  return out;
}

}  // namespace relmonad
