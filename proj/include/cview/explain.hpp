#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "cview/errors.hpp"
#include "cview/lattice.hpp"
#include "cview/views.hpp"

namespace cview {

/// Names under which a leaf can be targeted: its display name, and for
/// forests "t{tree}.{name}" and "t{tree}.n{id}".
inline std::vector<std::string> leaf_aliases(const ViewContext& view, std::size_t tree, std::size_t leaf) {
  const auto& t = view.source->trees.at(tree);
  if (view.source->trees.size() == 1) return {t.leaf_name(leaf), t.node_name(leaf)};
  const std::string prefix = "t" + std::to_string(tree) + ".";
  return {prefix + t.leaf_name(leaf), prefix + t.node_name(leaf)};
}

namespace detail {

inline nlohmann::json names_of(const Bitset& s, const std::vector<std::string>& names) {
  nlohmann::json out = nlohmann::json::array();
  s.for_each([&](std::size_t i) { out.push_back(names.at(i)); });
  return out;
}

inline nlohmann::json generators_json(const FormalContext& ctx, const Bitset& intent, const std::vector<std::string>& names) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& g : minimal_generators(ctx, intent)) out.push_back(names_of(g, names));
  return out;
}

}  // namespace detail

/// Explanation report for a target in a view lattice. Targets:
///   top | object:<id> | leaf:<name> | leaves:<a>,<b>,... | predicate:<p> | dominates:<p>,<q>
/// Unknown targets raise NoSuchTarget.
inline nlohmann::json explain(const ViewContext& view, const ConceptLattice& lattice, const std::string& target) {
  const auto& ctx = view.formal();
  const auto names = view.display_names();
  const auto leaves = leaf_concepts(view);
  auto concept_json = [&](std::size_t i) {
    return nlohmann::json{{"intent", detail::names_of(lattice[i].intent, names)},
                          {"extent", detail::names_of(lattice[i].extent, ctx.objects())},
                          {"support", lattice.support(i)}};
  };
  auto find_leaf = [&](const std::string& name) -> const LeafConcept& {
    for (const auto& lc : leaves)
      for (const auto& alias : leaf_aliases(view, lc.tree, lc.leaf))
        if (alias == name) return lc;
    throw NoSuchTarget("no supported leaf '" + name + "'");
  };
  auto find_column = [&](const std::string& text) {
    try {
      auto j = view.find_predicate(parse_predicate(view.schema(), text));
      if (j) return *j;
    } catch (const Error&) {
    }
    for (std::size_t j = 0; j < names.size(); ++j)
      if (names[j] == text || ctx.attribute(j) == text) return j;
    throw NoSuchTarget("no predicate column '" + text + "'");
  };
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
      auto pos = s.find(',', start);
      parts.push_back(s.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    return parts;
  };
  auto leaf_indices = [&] {
    std::vector<std::size_t> idx;
    for (const auto& lc : leaves)
      if (auto i = lattice.find_by_extent(lc.extent)) idx.push_back(*i);
    return idx;
  };

  nlohmann::json out{{"target", target}};
  const auto colon = target.find(':');
  const std::string kind = target.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : target.substr(colon + 1);

  if (target == "top") {
    const auto t = lattice.top();
    out["concept"] = concept_json(t);
    out["minimal_generators"] = detail::generators_json(ctx, lattice[t].intent, names);
    return out;
  }
  if (kind == "object" && !arg.empty()) {
    auto g = ctx.find_object(arg);
    if (!g) throw NoSuchTarget("no object '" + arg + "'");
    auto oc = lattice.object_concept(*g);
    if (!oc) throw NoSuchTarget("object concept of '" + arg + "' is below the support threshold");
    out["object_concept"] = concept_json(*oc);
    nlohmann::json leaf_names = nlohmann::json::array();
    for (std::size_t t = 0; t < view.object_leaves.size(); ++t)
      leaf_names.push_back(leaf_aliases(view, t, view.object_leaves[t][*g]).front());
    out["leaves"] = leaf_names;
    out["alternative_descriptions"] = detail::generators_json(ctx, lattice[*oc].intent, names);
    nlohmann::json filter = nlohmann::json::array();
    for (auto i : local_view(lattice, *g, false)) filter.push_back(concept_json(i));
    out["filter"] = filter;
    if (lattice.has_covers()) {
      nlohmann::json up = nlohmann::json::array();
      for (auto u : lattice.upper_neighbors(*oc)) up.push_back(concept_json(u));
      out["upper_neighbors"] = up;
    }
    return out;
  }
  if (kind == "leaf" && !arg.empty()) {
    const auto& lc = find_leaf(arg);
    out["leaf"] = arg;
    out["intent"] = detail::names_of(lc.intent, names);
    out["extent"] = detail::names_of(lc.extent, ctx.objects());
    out["label"] = *view.source->trees[lc.tree].node(lc.leaf).label;
    out["minimal_generators"] = detail::generators_json(ctx, lc.intent, names);
    const auto idx = leaf_indices();
    nlohmann::json cov = nlohmann::json::object();
    lc.intent.for_each([&](std::size_t j) { cov[names[j]] = leaf_coverage(lattice, j, idx); });
    out["coverage"] = cov;
    return out;
  }
  if (kind == "leaves" && !arg.empty()) {
    std::vector<std::size_t> members;
    nlohmann::json which = nlohmann::json::array();
    for (const auto& name : split(arg)) {
      const auto& lc = find_leaf(name);
      auto i = lattice.find_by_extent(lc.extent);
      if (!i) throw NoSuchTarget("leaf '" + name + "' has no concept in this lattice");
      members.push_back(*i);
      which.push_back(name);
    }
    const auto j = concept_join(lattice, members);
    out["leaves"] = which;
    out["join"] = {{"intent", detail::names_of(j.intent, names)}, {"extent", detail::names_of(j.extent, ctx.objects())}};
    out["shared_predicates"] = detail::names_of(j.intent, names);
    out["minimal_generators"] = detail::generators_json(ctx, j.intent, names);
    return out;
  }
  if (kind == "predicate" && !arg.empty()) {
    const auto p = find_column(arg);
    out["predicate"] = names[p];
    out["support"] = ctx.column(p).count();
    out["leaf_coverage"] = leaf_coverage(lattice, p, leaf_indices());
    nlohmann::json above = nlohmann::json::array(), below = nlohmann::json::array();
    for (std::size_t q = 0; q < names.size(); ++q) {
      if (q == p) continue;
      if (dominated_by(lattice, p, q)) above.push_back(names[q]);
      if (dominated_by(lattice, q, p)) below.push_back(names[q]);
    }
    out["implies"] = above;
    out["implied_by"] = below;
    return out;
  }
  if (kind == "dominates" && !arg.empty()) {
    const auto parts = split(arg);
    if (parts.size() != 2) throw NoSuchTarget("dominates needs two predicates");
    const auto p = find_column(parts[0]), q = find_column(parts[1]);
    out["p"] = names[p];
    out["q"] = names[q];
    out["p_dominated_by_q"] = dominated_by(lattice, p, q);
    out["q_dominated_by_p"] = dominated_by(lattice, q, p);
    return out;
  }
  throw NoSuchTarget("unknown target '" + target + "'");
}

}  // namespace cview
