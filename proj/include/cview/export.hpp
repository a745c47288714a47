#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cview/errors.hpp"
#include "cview/formal_context.hpp"
#include "cview/lattice.hpp"

namespace cview {

inline nlohmann::json context_to_json(const FormalContext& ctx) {
  nlohmann::json inc = nlohmann::json::array();
  for (auto [g, m] : ctx.incidence_pairs()) inc.push_back({g, m});
  return {{"objects", ctx.objects()}, {"attributes", ctx.attributes()}, {"incidence", std::move(inc)}};
}

inline FormalContext context_from_json(const nlohmann::json& j) {
  try {
    auto objects = j.at("objects").get<std::vector<std::string>>();
    auto attributes = j.at("attributes").get<std::vector<std::string>>();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& p : j.at("incidence")) {
      if (!p.is_array() || p.size() != 2) throw ParseError("incidence entries must be [row, col] pairs");
      pairs.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
    }
    return FormalContext::from_pairs(std::move(objects), std::move(attributes), pairs);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed context document: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("malformed context document: ") + e.what());
  }
}

/// {concepts: [{extent, intent, support, support_count}], covers: [[lo, hi]]}.
/// attribute_labels, when given, replace the context's attribute names.
inline nlohmann::json lattice_to_json(const ConceptLattice& lattice,
                                      const std::vector<std::string>* attribute_labels = nullptr) {
  const auto& ctx = lattice.context();
  const auto& attrs = attribute_labels ? *attribute_labels : ctx.attributes();
  nlohmann::json concepts = nlohmann::json::array();
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    nlohmann::json ext = nlohmann::json::array(), in = nlohmann::json::array();
    lattice[i].extent.for_each([&](std::size_t g) { ext.push_back(ctx.object(g)); });
    lattice[i].intent.for_each([&](std::size_t m) { in.push_back(attrs.at(m)); });
    concepts.push_back({{"extent", std::move(ext)},
                        {"intent", std::move(in)},
                        {"support", lattice.relative_support(i)},
                        {"support_count", lattice.support(i)}});
  }
  nlohmann::json covers = nlohmann::json::array();
  for (auto [lo, hi] : lattice.covers()) covers.push_back({lo, hi});
  return {{"concepts", std::move(concepts)}, {"covers", std::move(covers)}};
}

struct DotOptions {
  std::string graph_name = "lattice";
  std::optional<std::vector<std::string>> attribute_labels;
  bool object_labels = true;
  // Class of each context object; enables "a/b" purity annotations whose
  // parts follow class_order.
  std::optional<std::vector<std::optional<std::string>>> object_classes;
  std::vector<std::string> class_order;
};

namespace detail {
inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out + "\"";
}
}  // namespace detail

/// Hasse diagram in Graphviz DOT with reduced labelling: an attribute name
/// sits at its attribute concept, an object name at its object concept.
/// Nodes and edges are emitted in lattice order, so output is stable.
inline std::string lattice_to_dot(const ConceptLattice& lattice, const DotOptions& opts = {}) {
  const auto& ctx = lattice.context();
  const auto& attr_names = opts.attribute_labels ? *opts.attribute_labels : ctx.attributes();
  std::vector<std::vector<std::string>> up(lattice.size()), down(lattice.size());
  for (std::size_t m = 0; m < ctx.attribute_count(); ++m)
    if (auto c = lattice.attribute_concept(m)) up[*c].push_back(attr_names.at(m));
  if (opts.object_labels)
    for (std::size_t g = 0; g < ctx.object_count(); ++g)
      if (auto c = lattice.object_concept(g)) down[*c].push_back(ctx.object(g));

  std::ostringstream out;
  out << "digraph " << detail::dot_quote(opts.graph_name) << " {\n";
  out << "  rankdir=BT;\n";
  out << "  node [shape=box, fontsize=10];\n";
  out << "  edge [arrowhead=none];\n";
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    std::string label;
    auto join = [](const std::vector<std::string>& parts) {
      std::string s;
      for (std::size_t k = 0; k < parts.size(); ++k) s += (k ? ", " : "") + parts[k];
      return s;
    };
    if (!up[i].empty()) label += join(up[i]);
    label += "\n";
    std::string middle = std::to_string(lattice.support(i));
    if (opts.object_classes) {
      std::map<std::string, std::size_t> counts;
      lattice[i].extent.for_each([&](std::size_t g) {
        const auto& c = opts.object_classes->at(g);
        if (c) ++counts[*c];
      });
      std::string purity;
      for (std::size_t k = 0; k < opts.class_order.size(); ++k)
        purity += (k ? "/" : "") + std::to_string(counts[opts.class_order[k]]);
      middle = purity;
    }
    label += middle + "\n";
    if (!down[i].empty()) label += join(down[i]);
    out << "  c" << i << " [label=" << detail::dot_quote(label) << "];\n";
  }
  for (auto [lo, hi] : lattice.covers()) out << "  c" << lo << " -> c" << hi << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace cview
