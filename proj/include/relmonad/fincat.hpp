#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relmonad {

using ObjId = int;
using MorId = int;

/// A finite category stored as a full composition table. Object and
/// morphism ids are dense integers; every construction in this library fixes
/// its output ordering so results are reproducible bit for bit.
class FinCategory {
 public:
  struct Morphism {
    std::string name;
    ObjId src = 0;
    ObjId tgt = 0;
    bool operator==(const Morphism&) const = default;
  };

  /// `comp` is row-major over (g, f) and holds g∘f, or -1 where no composite
  /// is recorded. Throws ParseError on out-of-range ids or duplicate names;
  /// the category laws are checked separately by validate_category.
  FinCategory(std::vector<std::string> objects, std::vector<Morphism> morphisms,
              std::vector<MorId> identities, std::vector<MorId> comp);

  int num_objects() const { return static_cast<int>(objects_.size()); }
  int num_morphisms() const { return static_cast<int>(morphisms_.size()); }

  const std::string& object_name(ObjId a) const { return objects_[a]; }
  const std::string& morphism_name(MorId m) const { return morphisms_[m].name; }
  ObjId src(MorId m) const { return morphisms_[m].src; }
  ObjId tgt(MorId m) const { return morphisms_[m].tgt; }
  MorId identity(ObjId a) const { return identities_[a]; }
  bool is_identity(MorId m) const { return identities_[src(m)] == m; }

  /// g∘f, or -1 when the table has no entry.
  MorId compose(MorId g, MorId f) const { return comp_[g * num_morphisms() + f]; }
  bool composable(MorId g, MorId f) const { return tgt(f) == src(g); }

  const std::vector<MorId>& hom(ObjId a, ObjId b) const { return hom_[a * num_objects() + b]; }

  std::optional<ObjId> find_object(std::string_view name) const;
  std::optional<MorId> find_morphism(std::string_view name) const;

  const std::vector<std::string>& objects() const { return objects_; }
  const std::vector<Morphism>& morphisms() const { return morphisms_; }
  const std::vector<MorId>& identities() const { return identities_; }
  const std::vector<MorId>& comp_table() const { return comp_; }

  bool operator==(const FinCategory& other) const;

 private:
  std::vector<std::string> objects_;
  std::vector<Morphism> morphisms_;
  std::vector<MorId> identities_;
  std::vector<MorId> comp_;
  std::vector<std::vector<MorId>> hom_;
};

using CatPtr = std::shared_ptr<const FinCategory>;

bool same_category(const CatPtr& a, const CatPtr& b);

enum class CategoryDefect {
  kNone,
  kMissingComposite,
  kIllTypedComposite,
  kBrokenIdentity,
  kBrokenAssociativity,
};

struct CategoryReport {
  CategoryDefect defect = CategoryDefect::kNone;
  std::vector<MorId> witnesses;  // offending morphisms, outermost first
  std::string message;
  bool ok() const { return defect == CategoryDefect::kNone; }
};

const char* to_string(CategoryDefect defect);

/// Returns the first violated law with the morphisms that witness it.
/// Checks run in a fixed order: completeness, typing, identities, associativity.
CategoryReport validate_category(const FinCategory& c);

CatPtr terminal_category();

/// Free category on an acyclic graph: morphisms are paths. Identities come
/// first (one per object, in object order), then non-trivial paths ordered by
/// length and then by their edge sequence. A path e1 then e2 is named "e2.e1".
/// Throws ParseError if the graph has a cycle.
CatPtr free_category(std::vector<std::string> objects,
                     const std::vector<std::pair<ObjId, ObjId>>& edges,
                     std::vector<std::string> edge_names = {});

CatPtr walking_arrow();

/// Objects and morphisms are tuples in lexicographic order (first factor most
/// significant). The empty product is the terminal category.
CatPtr product_category(const std::vector<CatPtr>& factors);

/// Same ids, sources and targets swapped, composition reversed.
CatPtr opposite_category(const FinCategory& c);

struct FunctorTable {
  CatPtr src;
  CatPtr dst;
  std::vector<ObjId> obj_map;
  std::vector<MorId> mor_map;
};

FunctorTable identity_functor(const CatPtr& c);

/// Empty string on success, otherwise a description of the first violation.
std::string validate_functor(const FunctorTable& f);

struct NatTransTable {
  FunctorTable src;
  FunctorTable dst;
  std::vector<MorId> components;  // object of src category -> morphism of dst category
};

std::string validate_nat_trans(const NatTransTable& t);

/// Line-oriented text format: `obj <id>`, `mor <id> : <src> -> <tgt>`,
/// `id <obj> = <mor>`, `comp <g> <f> = <gf>`. Blank lines and `#` comments
/// are ignored. Duplicates and dangling ids are rejected.
CatPtr parse_category(std::string_view text);
std::string format_category(const FinCategory& c);

}  // namespace relmonad
