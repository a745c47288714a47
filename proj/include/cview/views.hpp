#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cview/errors.hpp"
#include "cview/formal_context.hpp"
#include "cview/lattice.hpp"
#include "cview/mvcontext.hpp"
#include "cview/tree.hpp"

namespace cview {

enum class ViewKind { leaf, tree, tree_predicate, interordinal_predicate };

inline const char* view_kind_name(ViewKind k) {
  switch (k) {
    case ViewKind::leaf: return "leaf";
    case ViewKind::tree: return "tree";
    case ViewKind::tree_predicate: return "tree-predicate";
    case ViewKind::interordinal_predicate: return "interordinal-predicate";
  }
  return "?";
}

inline ViewKind parse_view_kind(const std::string& s) {
  for (auto k : {ViewKind::leaf, ViewKind::tree, ViewKind::tree_predicate, ViewKind::interordinal_predicate})
    if (s == view_kind_name(k)) return k;
  if (s == "treepred" || s == "tree_predicate") return ViewKind::tree_predicate;
  if (s == "interpred" || s == "interordinal_predicate") return ViewKind::interordinal_predicate;
  throw InvalidArgument("unknown view kind '" + s + "'");
}

/// Where a view column comes from: a tree node (leaf/tree views) or a
/// predicate (predicate views). `grade` is set on aggregated columns.
struct ColumnInfo {
  std::optional<std::size_t> tree;
  std::optional<std::size_t> node;
  std::optional<Predicate> predicate;
  std::optional<std::string> grade;

  friend bool operator==(const ColumnInfo&, const ColumnInfo&) = default;
};

/// A view of a tree or forest on a set of objects, as a formal context plus
/// column provenance. object_leaves[t][g] is the leaf of tree t reached by
/// the view's g-th object.
struct ViewContext {
  ViewKind kind = ViewKind::leaf;
  std::shared_ptr<const Forest> source;
  std::shared_ptr<const FormalContext> context;
  std::vector<ColumnInfo> columns;
  std::vector<std::vector<std::size_t>> object_leaves;

  const Schema& schema() const { return *source->schema; }
  const FormalContext& formal() const { return *context; }

  std::string display_name(std::size_t column) const {
    const auto& c = columns.at(column);
    if (c.predicate) {
      if (c.grade) {
        const auto& dom = schema()[c.predicate->attribute];
        return dom.name() + direction_symbol(c.predicate->direction) + *c.grade;
      }
      return cview::display_name(schema(), *c.predicate);
    }
    return context->attribute(column);
  }
  std::vector<std::string> display_names() const {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < columns.size(); ++j) out.push_back(display_name(j));
    return out;
  }

  std::optional<std::size_t> find_predicate(const Predicate& p) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
      if (columns[j].predicate == p && !columns[j].grade) return j;
    return std::nullopt;
  }
};

namespace detail {

inline std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

inline void check_schema(const ManyValuedContext& ctx, const Schema& schema) {
  if (!(ctx.schema() == schema)) throw SchemaMismatch("objects do not use the model's attributes and domains");
}

inline std::vector<std::string> object_names(const ManyValuedContext& ctx, std::span<const std::size_t> objects) {
  std::vector<std::string> out;
  for (auto g : objects) out.push_back(ctx.object(g));
  return out;
}

inline std::vector<std::vector<std::size_t>> paths_of(const DecisionTree& tree, const ManyValuedContext& ctx,
                                                      std::span<const std::size_t> objects) {
  std::vector<std::vector<std::size_t>> out;
  for (auto g : objects) out.push_back(decision_path(tree, ctx, g));
  return out;
}

// Predicates annotated along a root path.
inline std::set<Predicate> path_predicates(const DecisionTree& tree, const std::vector<std::size_t>& path) {
  std::set<Predicate> s;
  for (auto n : path)
    if (tree.node(n).predicate) s.insert(*tree.node(n).predicate);
  return s;
}

inline std::shared_ptr<const Forest> single(const DecisionTree& tree) {
  return std::make_shared<const Forest>(Forest{tree.schema_ptr(), {tree}, {}});
}

// Leaf and tree view of one tree, with column names produced by `name`.
template <typename Name>
ViewContext node_view(ViewKind kind, const ManyValuedContext& ctx, std::span<const std::size_t> objects,
                      std::shared_ptr<const Forest> source, Name name) {
  ViewContext v;
  v.kind = kind;
  v.source = std::move(source);
  std::vector<std::string> attrs;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> col;
  for (std::size_t t = 0; t < v.source->trees.size(); ++t) {
    const auto& tree = v.source->trees[t];
    const auto ids = kind == ViewKind::leaf ? tree.leaves() : all_indices(tree.size());
    for (auto id : ids) {
      col[{t, id}] = attrs.size();
      attrs.push_back(name(t, tree, id));
      v.columns.push_back(ColumnInfo{t, id, std::nullopt, std::nullopt});
    }
  }
  std::vector<Bitset> rows(objects.size(), Bitset(attrs.size()));
  v.object_leaves.resize(v.source->trees.size());
  for (std::size_t t = 0; t < v.source->trees.size(); ++t) {
    const auto paths = paths_of(v.source->trees[t], ctx, objects);
    for (std::size_t i = 0; i < objects.size(); ++i) {
      v.object_leaves[t].push_back(paths[i].back());
      if (kind == ViewKind::leaf) {
        rows[i].set(col.at({t, paths[i].back()}));
      } else {
        for (auto n : paths[i]) rows[i].set(col.at({t, n}));
      }
    }
  }
  v.context = std::make_shared<const FormalContext>(object_names(ctx, objects), std::move(attrs), std::move(rows));
  return v;
}

// Predicate views over the union of the trees' predicate alphabets.
inline ViewContext predicate_view(ViewKind kind, const ManyValuedContext& ctx, std::span<const std::size_t> objects,
                                  std::shared_ptr<const Forest> source) {
  ViewContext v;
  v.kind = kind;
  v.source = std::move(source);
  const auto& schema = *v.source->schema;
  std::set<Predicate> alphabet;
  for (const auto& t : v.source->trees)
    for (const auto& p : predicates_of(t)) alphabet.insert(p);
  std::vector<Predicate> preds(alphabet.begin(), alphabet.end());
  std::map<Predicate, std::size_t> col;
  std::vector<std::string> attrs;
  for (const auto& p : preds) {
    col[p] = attrs.size();
    attrs.push_back(canonical_name(schema, p));
    v.columns.push_back(ColumnInfo{std::nullopt, std::nullopt, p, std::nullopt});
  }
  std::vector<Bitset> rows(objects.size(), Bitset(attrs.size()));
  v.object_leaves.resize(v.source->trees.size());
  for (std::size_t t = 0; t < v.source->trees.size(); ++t) {
    const auto& tree = v.source->trees[t];
    for (std::size_t i = 0; i < objects.size(); ++i) {
      if (kind == ViewKind::interordinal_predicate) {
        // the model relation needs every tested attribute present
        for (const auto& p : preds)
          if (!ctx.value(objects[i], p.attribute)) throw MissingValue(schema[p.attribute].name());
      }
      const auto path = decision_path(tree, ctx, objects[i]);
      v.object_leaves[t].push_back(path.back());
      if (kind == ViewKind::tree_predicate)
        for (const auto& p : path_predicates(tree, path)) rows[i].set(col.at(p));
    }
  }
  if (kind == ViewKind::interordinal_predicate) {
    for (std::size_t i = 0; i < objects.size(); ++i)
      for (std::size_t j = 0; j < preds.size(); ++j)
        if (preds[j].holds_for(*ctx.value(objects[i], preds[j].attribute))) rows[i].set(j);
  }
  v.context = std::make_shared<const FormalContext>(object_names(ctx, objects), std::move(attrs), std::move(rows));
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Single-tree views

/// Objects against leaves; each object is incident with the leaf it reaches.
inline ViewContext leaf_view(const ManyValuedContext& ctx, std::span<const std::size_t> objects, const DecisionTree& tree) {
  detail::check_schema(ctx, tree.schema());
  return detail::node_view(ViewKind::leaf, ctx, objects, detail::single(tree),
                           [](std::size_t, const DecisionTree& t, std::size_t id) { return t.leaf_name(id); });
}

/// Objects against all nodes; the row of an object is its decision path.
inline ViewContext tree_view(const ManyValuedContext& ctx, std::span<const std::size_t> objects, const DecisionTree& tree) {
  detail::check_schema(ctx, tree.schema());
  return detail::node_view(ViewKind::tree, ctx, objects, detail::single(tree),
                           [](std::size_t, const DecisionTree& t, std::size_t id) { return t.node_name(id); });
}

/// Nodes against predicates: n is incident with P iff P annotates n or an ancestor of n.
inline FormalContext predicate_context(const DecisionTree& tree) {
  const auto preds = predicates_of(tree);
  std::map<Predicate, std::size_t> col;
  std::vector<std::string> attrs;
  for (const auto& p : preds) {
    col[p] = attrs.size();
    attrs.push_back(canonical_name(tree.schema(), p));
  }
  std::vector<std::string> nodes;
  std::vector<Bitset> rows(tree.size(), Bitset(attrs.size()));
  for (std::size_t n = 0; n < tree.size(); ++n) {
    nodes.push_back(tree.node_name(n));
    for (const auto& p : detail::path_predicates(tree, tree.path_from_root(n))) rows[n].set(col.at(p));
  }
  return FormalContext(std::move(nodes), std::move(attrs), std::move(rows));
}

/// Objects against the tree's predicates; (g, P) iff P annotates a node on g's path.
inline ViewContext tree_predicate_view(const ManyValuedContext& ctx, std::span<const std::size_t> objects,
                                       const DecisionTree& tree) {
  detail::check_schema(ctx, tree.schema());
  return detail::predicate_view(ViewKind::tree_predicate, ctx, objects, detail::single(tree));
}

/// Objects against the tree's predicates; (g, P) iff g satisfies P.
inline ViewContext interordinal_predicate_view(const ManyValuedContext& ctx, std::span<const std::size_t> objects,
                                               const DecisionTree& tree) {
  detail::check_schema(ctx, tree.schema());
  return detail::predicate_view(ViewKind::interordinal_predicate, ctx, objects, detail::single(tree));
}

inline ViewContext make_view(ViewKind kind, const ManyValuedContext& ctx, std::span<const std::size_t> objects,
                             const DecisionTree& tree) {
  switch (kind) {
    case ViewKind::leaf: return leaf_view(ctx, objects, tree);
    case ViewKind::tree: return tree_view(ctx, objects, tree);
    case ViewKind::tree_predicate: return tree_predicate_view(ctx, objects, tree);
    case ViewKind::interordinal_predicate: return interordinal_predicate_view(ctx, objects, tree);
  }
  throw InvalidArgument("unknown view kind");
}

inline ViewContext make_view(ViewKind kind, const ManyValuedContext& ctx, const DecisionTree& tree) {
  const auto all = detail::all_indices(ctx.object_count());
  return make_view(kind, ctx, all, tree);
}

// ---------------------------------------------------------------------------
// Forest views

/// Union of the per-tree views. Leaf and tree views keep trees apart with
/// "t{tree}.n{node}" column names (an apposition); predicate views share
/// columns across trees by predicate.
inline ViewContext forest_view(const ManyValuedContext& ctx, std::span<const std::size_t> objects,
                               std::shared_ptr<const Forest> forest, ViewKind kind) {
  if (!forest || forest->trees.empty()) throw EmptyForest("forest has no trees");
  detail::check_schema(ctx, *forest->schema);
  if (kind == ViewKind::leaf || kind == ViewKind::tree)
    return detail::node_view(kind, ctx, objects, std::move(forest), [](std::size_t t, const DecisionTree& tree, std::size_t id) {
      return "t" + std::to_string(t) + "." + tree.node_name(id);
    });
  return detail::predicate_view(kind, ctx, objects, std::move(forest));
}

inline ViewContext forest_view(const ManyValuedContext& ctx, const Forest& forest, ViewKind kind) {
  const auto all = detail::all_indices(ctx.object_count());
  return forest_view(ctx, all, std::make_shared<const Forest>(forest), kind);
}

// ---------------------------------------------------------------------------
// Classification through a predicate view

struct LeafCandidate {
  std::size_t tree;
  std::size_t leaf;
  std::string label;
  Bitset intent;
  Bitset generator;  // a minimal generator of the leaf intent contained in S
  std::optional<std::size_t> concept_index;
};

struct ViewClassification {
  Bitset satisfied;  // view columns the row provably satisfies
  std::vector<LeafCandidate> candidates;
  std::string label;
  bool ambiguous = false;
};

/// Classifies a row with absent cells. A leaf is a candidate when its concept
/// in the view has a minimal generator made only of predicates the row
/// provably satisfies, and no predicate on the leaf's own path is provably
/// false for the row. Leaves no view object reaches have no concept and are
/// never candidates.
inline ViewClassification classify_via_view(const ViewContext& view, const std::vector<ManyValuedContext::Cell>& row,
                                            const ConceptLattice* lattice = nullptr) {
  if (view.kind != ViewKind::tree_predicate && view.kind != ViewKind::interordinal_predicate)
    throw InvalidArgument("classification needs a predicate view");
  const auto& schema = view.schema();
  if (row.size() != schema.size()) throw SchemaMismatch("row width does not match the schema");
  const auto& ctx = view.formal();
  ViewClassification out;
  out.satisfied = ctx.empty_attributes();
  for (std::size_t j = 0; j < view.columns.size(); ++j) {
    const auto& p = view.columns[j].predicate;
    if (!p) continue;
    auto v = row[p->attribute];
    if (!v) continue;
    // merged columns carry their extreme member threshold, so this covers them too
    if (p->holds_for(*v)) out.satisfied.set(j);
  }
  for (std::size_t t = 0; t < view.source->trees.size(); ++t) {
    const auto& tree = view.source->trees[t];
    for (auto leaf : tree.leaves()) {
      Bitset extent = ctx.empty_objects();
      for (std::size_t g = 0; g < ctx.object_count(); ++g)
        if (view.object_leaves[t][g] == leaf) extent.set(g);
      if (extent.none()) continue;
      bool consistent = true;
      for (auto n : tree.path_from_root(leaf)) {
        const auto& p = tree.node(n).predicate;
        if (p && row[p->attribute] && !p->holds_for(*row[p->attribute])) consistent = false;
      }
      if (!consistent) continue;
      const Bitset intent = ctx.derive_attributes(extent);
      for (const auto& gen : minimal_generators(ctx, intent)) {
        if (!gen.is_subset_of(out.satisfied)) continue;
        LeafCandidate c{t, leaf, *tree.node(leaf).label, intent, gen, std::nullopt};
        if (lattice) c.concept_index = lattice->find_by_intent(intent);
        out.candidates.push_back(std::move(c));
        break;
      }
    }
  }
  if (out.candidates.empty()) throw Unclassifiable("no leaf is supported by the known values");
  std::map<std::string, std::size_t> votes;
  for (const auto& c : out.candidates) ++votes[c.label];
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it)
    if (it->second > best->second) best = it;
  out.label = best->first;
  out.ambiguous = votes.size() > 1;
  return out;
}

/// Concept generated by the view objects that reach a given leaf.
struct LeafConcept {
  std::size_t tree;
  std::size_t leaf;
  Bitset extent;
  Bitset intent;
};

inline std::vector<LeafConcept> leaf_concepts(const ViewContext& view) {
  std::vector<LeafConcept> out;
  const auto& ctx = view.formal();
  for (std::size_t t = 0; t < view.source->trees.size(); ++t) {
    for (auto leaf : view.source->trees[t].leaves()) {
      Bitset extent = ctx.empty_objects();
      for (std::size_t g = 0; g < ctx.object_count(); ++g)
        if (view.object_leaves[t][g] == leaf) extent.set(g);
      if (extent.none()) continue;
      Bitset intent = ctx.derive_attributes(extent);
      out.push_back({t, leaf, ctx.derive_objects(intent), std::move(intent)});
    }
  }
  return out;
}

}  // namespace cview
