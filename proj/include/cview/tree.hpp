#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "cview/errors.hpp"
#include "cview/mvcontext.hpp"
#include "cview/rng.hpp"

namespace cview {

struct TreeNode {
  std::size_t id = 0;
  std::optional<std::size_t> parent;
  std::optional<Predicate> predicate;  // absent only at the root
  std::optional<std::string> label;    // present iff leaf
  std::vector<std::size_t> children;   // none, or two ids in increasing order
  std::optional<std::string> name;     // display name for leaves, e.g. "l3"

  bool is_leaf() const noexcept { return children.empty(); }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Proper binary tree whose non-root nodes carry threshold predicates; the
/// two children of a node carry mutually negated predicates.
class DecisionTree {
 public:
  DecisionTree() = default;

  DecisionTree(SchemaPtr schema, std::vector<TreeNode> nodes, std::size_t root = 0, bool degenerate = false)
      : schema_(std::move(schema)), nodes_(std::move(nodes)), root_(root), degenerate_(degenerate) {
    validate();
  }

  const Schema& schema() const noexcept { return *schema_; }
  const SchemaPtr& schema_ptr() const noexcept { return schema_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& node(std::size_t id) const { return nodes_.at(id); }
  std::size_t root() const noexcept { return root_; }
  // Set when training had to force a split (pure or unsplittable root).
  bool degenerate() const noexcept { return degenerate_; }

  std::vector<std::size_t> leaves() const {
    std::vector<std::size_t> out;
    for (const auto& n : nodes_)
      if (n.is_leaf()) out.push_back(n.id);
    return out;
  }

  std::string node_name(std::size_t id) const { return "n" + std::to_string(node(id).id); }
  std::string leaf_name(std::size_t id) const { return node(id).name.value_or(node_name(id)); }

  // Root first.
  std::vector<std::size_t> path_from_root(std::size_t id) const {
    std::vector<std::size_t> out;
    for (std::optional<std::size_t> cur = id; cur; cur = node(*cur).parent) out.push_back(*cur);
    std::reverse(out.begin(), out.end());
    return out;
  }

  // Longest root-to-leaf path counted in edges.
  std::size_t depth() const {
    std::size_t d = 0;
    for (auto l : leaves()) d = std::max(d, path_from_root(l).size() - 1);
    return d;
  }

  friend bool operator==(const DecisionTree& a, const DecisionTree& b) {
    return *a.schema_ == *b.schema_ && a.nodes_ == b.nodes_ && a.root_ == b.root_ && a.degenerate_ == b.degenerate_;
  }

 private:
  void validate() const {
    if (!schema_) throw InvalidTree("tree has no schema");
    if (nodes_.empty()) throw InvalidTree("tree has no nodes");
    if (root_ >= nodes_.size()) throw InvalidTree("root id out of range");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      if (n.id != i) throw InvalidTree("node ids must equal their positions");
      if (i == root_) {
        if (n.parent || n.predicate) throw InvalidTree("root must have no parent and no predicate");
      } else {
        if (!n.parent || *n.parent >= nodes_.size()) throw InvalidTree("node n" + std::to_string(i) + " has no valid parent");
        if (!n.predicate) throw InvalidTree("non-root node n" + std::to_string(i) + " lacks a predicate");
        const auto& p = *n.predicate;
        if (p.attribute >= schema_->size() || p.value >= (*schema_)[p.attribute].size())
          throw InvalidTree("predicate of n" + std::to_string(i) + " is outside the schema");
      }
      if (n.children.size() != 0 && n.children.size() != 2)
        throw InvalidTree("node n" + std::to_string(i) + " must have zero or two children");
      if (n.is_leaf() != n.label.has_value())
        throw InvalidTree("node n" + std::to_string(i) + ": class label must be present exactly at leaves");
      if (n.children.size() == 2) {
        const auto& a = nodes_.at(n.children[0]);
        const auto& b = nodes_.at(n.children[1]);
        if (a.parent != i || b.parent != i) throw InvalidTree("child/parent links disagree at n" + std::to_string(i));
        if (!a.predicate || !b.predicate || negation(*schema_, *a.predicate) != b.predicate)
          throw InvalidTree("children of n" + std::to_string(i) + " are not annotated by a predicate and its negation");
      }
    }
    if (nodes_[root_].is_leaf()) throw InvalidTree("tree needs at least one split");
    // connectivity: every node reachable from root exactly once
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<std::size_t> stack{root_};
    std::size_t visited = 0;
    while (!stack.empty()) {
      auto id = stack.back();
      stack.pop_back();
      if (seen[id]++) throw InvalidTree("cycle at n" + std::to_string(id));
      ++visited;
      for (auto c : nodes_[id].children) stack.push_back(c);
    }
    if (visited != nodes_.size()) throw InvalidTree("tree is not connected");
  }

  SchemaPtr schema_;
  std::vector<TreeNode> nodes_;
  std::size_t root_ = 0;
  bool degenerate_ = false;
};

struct TrainConfig {
  std::size_t n_trees = 1;
  std::optional<std::size_t> max_depth;
  std::uint64_t rng_seed = 0;
  bool bagging = true;
  std::optional<std::size_t> features_per_split;
  std::size_t workers = 1;
};

/// Trees trained on bootstrap bags of the same objects. bags[i] lists the
/// object indices (with repetition) tree i was trained on.
struct Forest {
  SchemaPtr schema;
  std::vector<DecisionTree> trees;
  std::vector<std::vector<std::size_t>> bags;
};

// ---------------------------------------------------------------------------
// Classification

/// Node ids from the root to the leaf whose annotations a row satisfies.
inline std::vector<std::size_t> decision_path(const DecisionTree& tree, const std::vector<ManyValuedContext::Cell>& row) {
  std::vector<std::size_t> path{tree.root()};
  while (!tree.node(path.back()).is_leaf()) {
    const auto& n = tree.node(path.back());
    const auto& left = tree.node(n.children[0]);
    const auto attr = left.predicate->attribute;
    const auto v = row.at(attr);
    if (!v) throw MissingValueAtNode(n.id, tree.schema()[attr].name());
    path.push_back(left.predicate->holds_for(*v) ? left.id : n.children[1]);
  }
  return path;
}

inline std::vector<std::size_t> decision_path(const DecisionTree& tree, const ManyValuedContext& ctx, std::size_t g) {
  if (g >= ctx.object_count()) throw NoSuchObject("object index " + std::to_string(g) + " out of range");
  return decision_path(tree, ctx.row(g));
}

inline std::vector<std::size_t> decision_path(const DecisionTree& tree, const ManyValuedContext& ctx,
                                              const std::string& object_id) {
  return decision_path(tree, ctx, ctx.require_object(object_id));
}

inline std::size_t leaf_of(const DecisionTree& tree, const std::vector<ManyValuedContext::Cell>& row) {
  return decision_path(tree, row).back();
}

inline const std::string& predict(const DecisionTree& tree, const std::vector<ManyValuedContext::Cell>& row) {
  return *tree.node(leaf_of(tree, row)).label;
}

// Majority over tree votes; ties go to the lexicographically least label.
inline std::string predict(const Forest& forest, const std::vector<ManyValuedContext::Cell>& row) {
  if (forest.trees.empty()) throw EmptyForest("forest has no trees");
  std::map<std::string, std::size_t> votes;
  for (const auto& t : forest.trees) ++votes[predict(t, row)];
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

/// All non-root annotations, deduplicated and sorted.
inline std::vector<Predicate> predicates_of(const DecisionTree& tree) {
  std::set<Predicate> s;
  for (const auto& n : tree.nodes())
    if (n.predicate) s.insert(*n.predicate);
  return {s.begin(), s.end()};
}

struct Evaluation {
  double accuracy = 0.0;
  std::vector<std::string> per_object;
};

namespace detail {
template <typename Model>
Evaluation evaluate_model(const Model& model, const ManyValuedContext& ctx) {
  Evaluation ev;
  std::size_t correct = 0;
  for (std::size_t g = 0; g < ctx.object_count(); ++g) {
    ev.per_object.push_back(predict(model, ctx.row(g)));
    const auto& truth = ctx.label(g);
    if (!truth) throw MissingLabel("object '" + ctx.object(g) + "' has no label");
    if (*truth == ev.per_object.back()) ++correct;
  }
  ev.accuracy = ctx.object_count() == 0 ? 1.0 : static_cast<double>(correct) / ctx.object_count();
  return ev;
}
}  // namespace detail

inline Evaluation evaluate(const DecisionTree& tree, const ManyValuedContext& ctx) {
  return detail::evaluate_model(tree, ctx);
}
inline Evaluation evaluate(const Forest& forest, const ManyValuedContext& ctx) {
  if (forest.trees.empty()) throw EmptyForest("forest has no trees");
  return detail::evaluate_model(forest, ctx);
}

inline double generalization_error(double acc_train, double acc_test) { return acc_train - acc_test; }

// ---------------------------------------------------------------------------
// Training

namespace detail {

inline double entropy(std::span<const std::size_t> counts, std::size_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

struct Split {
  std::size_t attribute;
  std::size_t value;
  double gain;
};

class TreeBuilder {
 public:
  TreeBuilder(const ManyValuedContext& ctx, const TrainConfig& cfg, std::uint64_t seed)
      : ctx_(ctx), cfg_(cfg), rng_(seed), classes_(ctx.classes()) {
    for (std::size_t c = 0; c < classes_.size(); ++c) class_index_[classes_[c]] = c;
  }

  DecisionTree build(std::span<const std::size_t> rows) {
    if (rows.empty()) throw EmptyTraining("no training objects");
    for (auto g : rows) {
      if (!ctx_.label(g)) throw MissingLabel("object '" + ctx_.object(g) + "' has no label");
      for (std::size_t m = 0; m < ctx_.attribute_count(); ++m)
        if (!ctx_.value(g, m))
          throw IncompleteContext("object '" + ctx_.object(g) + "' has no value for '" + ctx_.schema()[m].name() + "'");
    }
    nodes_.clear();
    nodes_.push_back(TreeNode{});
    struct Work {
      std::size_t id;
      std::vector<std::size_t> rows;
      std::size_t depth;
    };
    std::deque<Work> queue;
    queue.push_back({0, {rows.begin(), rows.end()}, 0});
    bool degenerate = false;
    while (!queue.empty()) {
      Work w = std::move(queue.front());
      queue.pop_front();
      const bool is_root = w.id == 0;
      auto split = choose_split(w.rows, w.depth);
      if (!split && is_root) {
        split = forced_split(w.rows);
        degenerate = true;
      }
      if (!split) {
        nodes_[w.id].label = majority(w.rows);
        continue;
      }
      std::vector<std::size_t> left, right;
      for (auto g : w.rows) (*ctx_.value(g, split->attribute) <= split->value ? left : right).push_back(g);
      const std::size_t l = nodes_.size(), r = l + 1;
      const Predicate p{split->attribute, Direction::leq, split->value};
      nodes_.push_back(TreeNode{l, w.id, p, std::nullopt, {}, std::nullopt});
      nodes_.push_back(TreeNode{r, w.id, negation(ctx_.schema(), p), std::nullopt, {}, std::nullopt});
      nodes_[w.id].children = {l, r};
      if (degenerate && is_root) {
        // forced stump: children become leaves immediately
        nodes_[l].label = left.empty() ? majority(w.rows) : majority(left);
        nodes_[r].label = right.empty() ? majority(w.rows) : majority(right);
        continue;
      }
      queue.push_back({l, std::move(left), w.depth + 1});
      queue.push_back({r, std::move(right), w.depth + 1});
    }
    return DecisionTree(ctx_.schema_ptr(), std::move(nodes_), 0, degenerate);
  }

 private:
  std::string majority(const std::vector<std::size_t>& rows) const {
    std::vector<std::size_t> counts(classes_.size(), 0);
    for (auto g : rows) ++counts[class_index_.at(*ctx_.label(g))];
    return classes_[std::max_element(counts.begin(), counts.end()) - counts.begin()];
  }

  std::vector<std::size_t> candidate_attributes() {
    std::vector<std::size_t> attrs(ctx_.attribute_count());
    std::iota(attrs.begin(), attrs.end(), 0);
    if (cfg_.features_per_split && *cfg_.features_per_split < attrs.size()) {
      const std::size_t k = *cfg_.features_per_split;
      for (std::size_t i = 0; i < k; ++i) std::swap(attrs[i], attrs[i + rng_.below(attrs.size() - i)]);
      attrs.resize(k);
      std::sort(attrs.begin(), attrs.end());
    }
    return attrs;
  }

  std::optional<Split> choose_split(const std::vector<std::size_t>& rows, std::size_t depth) {
    if (cfg_.max_depth && depth >= *cfg_.max_depth) return std::nullopt;
    const std::size_t k = classes_.size();
    std::vector<std::size_t> total(k, 0);
    for (auto g : rows) ++total[class_index_.at(*ctx_.label(g))];
    if (std::count_if(total.begin(), total.end(), [](std::size_t c) { return c > 0; }) <= 1) return std::nullopt;
    const double parent = entropy(total, rows.size());
    constexpr double eps = 1e-12;
    std::optional<Split> best;
    for (auto m : candidate_attributes()) {
      const std::size_t nv = ctx_.schema()[m].size();
      std::vector<std::size_t> hist(nv * k, 0);
      for (auto g : rows) ++hist[*ctx_.value(g, m) * k + class_index_.at(*ctx_.label(g))];
      std::vector<std::size_t> left(k, 0), right(k, 0);
      std::size_t nl = 0;
      for (std::size_t v = 0; v + 1 < nv; ++v) {
        for (std::size_t c = 0; c < k; ++c) {
          left[c] += hist[v * k + c];
          nl += hist[v * k + c];
        }
        if (nl == 0 || nl == rows.size()) continue;
        for (std::size_t c = 0; c < k; ++c) right[c] = total[c] - left[c];
        const std::size_t nr = rows.size() - nl;
        const double gain = parent - (static_cast<double>(nl) / rows.size()) * entropy(left, nl) -
                            (static_cast<double>(nr) / rows.size()) * entropy(right, nr);
        if (gain > eps && (!best || gain > best->gain + eps)) best = Split{m, v, gain};
      }
    }
    return best;
  }

  // First (attribute, threshold) that puts objects on both sides; failing
  // that, the first threshold of the first attribute with at least two values.
  std::optional<Split> forced_split(const std::vector<std::size_t>& rows) const {
    std::optional<Split> fallback;
    for (std::size_t m = 0; m < ctx_.attribute_count(); ++m) {
      const std::size_t nv = ctx_.schema()[m].size();
      if (nv < 2) continue;
      if (!fallback) fallback = Split{m, 0, 0.0};
      std::size_t lo = nv, hi = 0;
      for (auto g : rows) {
        lo = std::min(lo, *ctx_.value(g, m));
        hi = std::max(hi, *ctx_.value(g, m));
      }
      if (lo < hi) return Split{m, lo, 0.0};
    }
    if (!fallback) throw InvalidTree("no attribute admits a split");
    return fallback;
  }

  const ManyValuedContext& ctx_;
  const TrainConfig& cfg_;
  Rng rng_;
  std::vector<std::string> classes_;
  std::map<std::string, std::size_t> class_index_;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

/// Trains one tree on the multiset `rows` of object indices.
inline DecisionTree train_tree_on(const ManyValuedContext& ctx, std::span<const std::size_t> rows,
                                  const TrainConfig& cfg, std::uint64_t seed) {
  if (cfg.max_depth && *cfg.max_depth < 1) throw InvalidArgument("max_depth must be at least 1");
  detail::TreeBuilder b(ctx, cfg, seed);
  return b.build(rows);
}

/// Greedy entropy tree on all objects of ctx.
inline DecisionTree train_tree(const ManyValuedContext& ctx, const TrainConfig& cfg = {}) {
  std::vector<std::size_t> rows(ctx.object_count());
  std::iota(rows.begin(), rows.end(), 0);
  Rng rng(cfg.rng_seed);
  return train_tree_on(ctx, rows, cfg, rng.next());
}

/// Bags (|G| draws with replacement, in order) are drawn first, then one seed
/// per tree; trees are then trained independently, possibly in parallel.
inline Forest train_forest(const ManyValuedContext& ctx, const TrainConfig& cfg) {
  if (cfg.n_trees < 1) throw InvalidArgument("n_trees must be at least 1");
  if (ctx.object_count() == 0) throw EmptyTraining("no training objects");
  Rng rng(cfg.rng_seed);
  Forest f;
  f.schema = ctx.schema_ptr();
  const std::size_t n = ctx.object_count();
  for (std::size_t t = 0; t < cfg.n_trees; ++t) {
    std::vector<std::size_t> bag(n);
    if (cfg.bagging) {
      for (auto& g : bag) g = rng.below(n);
    } else {
      std::iota(bag.begin(), bag.end(), 0);
    }
    f.bags.push_back(std::move(bag));
  }
  std::vector<std::uint64_t> seeds(cfg.n_trees);
  for (auto& s : seeds) s = rng.next();

  std::vector<std::optional<DecisionTree>> trees(cfg.n_trees);
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, cfg.n_trees));
  if (workers == 1) {
    for (std::size_t t = 0; t < cfg.n_trees; ++t) trees[t] = train_tree_on(ctx, f.bags[t], cfg, seeds[t]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t; (t = next.fetch_add(1)) < cfg.n_trees;)
            trees[t] = train_tree_on(ctx, f.bags[t], cfg, seeds[t]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  for (auto& t : trees) f.trees.push_back(std::move(*t));
  return f;
}

/// Mean accuracy drop when one attribute's column is shuffled, per attribute.
/// Shuffles are drawn from rng_seed in attribute order, n_repeats each.
inline std::vector<double> permutation_importance(const Forest& forest, const ManyValuedContext& ctx,
                                                  std::size_t n_repeats, std::uint64_t rng_seed) {
  if (n_repeats == 0) throw InvalidArgument("n_repeats must be positive");
  const std::size_t n = ctx.object_count();
  auto accuracy = [&](const std::vector<std::vector<ManyValuedContext::Cell>>& rows) {
    std::size_t ok = 0;
    for (std::size_t g = 0; g < n; ++g) {
      const auto& truth = ctx.label(g);
      if (!truth) throw MissingLabel("object '" + ctx.object(g) + "' has no label");
      if (predict(forest, rows[g]) == *truth) ++ok;
    }
    return n == 0 ? 1.0 : static_cast<double>(ok) / n;
  };
  std::vector<std::vector<ManyValuedContext::Cell>> rows;
  for (std::size_t g = 0; g < n; ++g) rows.push_back(ctx.row(g));
  const double baseline = accuracy(rows);
  Rng rng(rng_seed);
  std::vector<double> scores(ctx.attribute_count(), 0.0);
  for (std::size_t m = 0; m < ctx.attribute_count(); ++m) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n_repeats; ++r) {
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(std::span<std::size_t>(perm));
      auto shuffled = rows;
      for (std::size_t g = 0; g < n; ++g) shuffled[g][m] = rows[perm[g]][m];
      sum += baseline - accuracy(shuffled);
    }
    scores[m] = sum / n_repeats;
  }
  return scores;
}

inline std::vector<double> permutation_importance(const DecisionTree& tree, const ManyValuedContext& ctx,
                                                  std::size_t n_repeats, std::uint64_t rng_seed) {
  Forest f{tree.schema_ptr(), {tree}, {}};
  return permutation_importance(f, ctx, n_repeats, rng_seed);
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json predicate_to_json(const Schema& schema, const Predicate& p) {
  return {{"attr", schema[p.attribute].name()},
          {"dir", direction_symbol(p.direction)},
          {"value", schema[p.attribute].value(p.value)}};
}

inline Predicate predicate_from_json(const Schema& schema, const nlohmann::json& j) {
  try {
    const auto attr = j.at("attr").get<std::string>();
    const auto dir = j.at("dir").get<std::string>();
    const auto value = j.at("value").get<std::string>();
    const auto m = schema.require(attr);
    const auto v = schema[m].find(value);
    if (!v) throw ParseError("value '" + value + "' not in domain of '" + attr + "'");
    if (dir != "<=" && dir != ">=") throw ParseError("direction must be '<=' or '>=', got '" + dir + "'");
    return Predicate{m, dir == "<=" ? Direction::leq : Direction::geq, *v};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed predicate: ") + e.what());
  }
}

inline nlohmann::json tree_to_json(const DecisionTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes()) {
    nlohmann::json j;
    j["id"] = n.id;
    j["parent"] = n.parent ? nlohmann::json(*n.parent) : nlohmann::json(nullptr);
    j["predicate"] = n.predicate ? predicate_to_json(tree.schema(), *n.predicate) : nlohmann::json(nullptr);
    j["label"] = n.label ? nlohmann::json(*n.label) : nlohmann::json(nullptr);
    if (n.name) j["name"] = *n.name;
    nodes.push_back(std::move(j));
  }
  nlohmann::json out{{"nodes", std::move(nodes)}, {"root", tree.root()}};
  if (tree.degenerate()) out["degenerate"] = true;
  return out;
}

inline DecisionTree tree_from_json(const nlohmann::json& j, SchemaPtr schema) {
  try {
    if (!j.is_object()) throw ParseError("tree document must be a JSON object");
    const auto& arr = j.at("nodes");
    if (!arr.is_array()) throw ParseError("'nodes' must be an array");
    std::vector<TreeNode> nodes(arr.size());
    std::vector<char> filled(arr.size(), 0);
    for (const auto& jn : arr) {
      const auto id = jn.at("id").get<std::size_t>();
      if (id >= nodes.size() || filled[id]) throw InvalidTree("node ids must be 0..n-1 without repeats");
      filled[id] = 1;
      TreeNode& n = nodes[id];
      n.id = id;
      if (!jn.at("parent").is_null()) n.parent = jn.at("parent").get<std::size_t>();
      if (!jn.at("predicate").is_null()) n.predicate = predicate_from_json(*schema, jn.at("predicate"));
      if (!jn.at("label").is_null()) n.label = jn.at("label").get<std::string>();
      if (jn.contains("name")) n.name = jn.at("name").get<std::string>();
    }
    for (const auto& n : nodes) {
      if (!n.parent) continue;
      if (*n.parent >= nodes.size()) throw InvalidTree("parent id out of range");
      nodes[*n.parent].children.push_back(n.id);
    }
    const auto root = j.at("root").get<std::size_t>();
    return DecisionTree(std::move(schema), std::move(nodes), root, j.value("degenerate", false));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed tree document: ") + e.what());
  }
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& what) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ParseError(what + " is empty");
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << text;
}

inline void save_tree(const std::string& path, const DecisionTree& tree) {
  write_text_file(path, tree_to_json(tree).dump(2) + "\n");
}

inline DecisionTree load_tree(const std::string& path, SchemaPtr schema) {
  return tree_from_json(parse_json_text(read_text_file(path), "tree file '" + path + "'"), std::move(schema));
}

inline nlohmann::json forest_to_json(const Forest& f) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : f.trees) trees.push_back(tree_to_json(t));
  return {{"trees", std::move(trees)}, {"bags", f.bags}};
}

inline Forest forest_from_json(const nlohmann::json& j, SchemaPtr schema) {
  try {
    Forest f;
    f.schema = schema;
    for (const auto& jt : j.at("trees")) f.trees.push_back(tree_from_json(jt, schema));
    if (j.contains("bags")) f.bags = j.at("bags").get<std::vector<std::vector<std::size_t>>>();
    if (f.trees.empty()) throw EmptyForest("forest document has no trees");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed forest document: ") + e.what());
  }
}

inline void save_forest(const std::string& path, const Forest& f) {
  write_text_file(path, forest_to_json(f).dump(2) + "\n");
}

// Accepts a forest document or a single tree document.
inline Forest load_forest(const std::string& path, SchemaPtr schema) {
  auto j = parse_json_text(read_text_file(path), "model file '" + path + "'");
  if (j.is_object() && j.contains("nodes")) return Forest{schema, {tree_from_json(j, schema)}, {}};
  return forest_from_json(j, std::move(schema));
}

}  // namespace cview
