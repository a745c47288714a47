// cview: conceptual views of decision trees and forests.
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "cview.hpp"
#include "cview/config.hpp"
#include "cview/explain.hpp"

using namespace cview;
namespace fs = std::filesystem;

namespace {

std::size_t worker_count() {
  if (const char* env = std::getenv("CVIEW_WORKERS")) {
    try {
      const auto n = std::stoul(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw InvalidArgument(std::string("CVIEW_WORKERS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Options shared by the data-driven verbs; set values override the config.
struct Common {
  std::string config;
  std::string data, domain, label, model, view;
  std::optional<std::size_t> n_trees, max_depth;
  std::optional<std::uint64_t> seed;
  bool no_bagging = false;

  void add_to(CLI::App* app, bool training = true) {
    app->add_option("-c,--config", config, "run configuration (JSON)");
    app->add_option("--data", data, "CSV data file");
    app->add_option("--domain", domain, "domain specification file");
    app->add_option("--label", label, "label column");
    if (!training) return;
    app->add_option("--model", model, "tree or forest JSON to use instead of training");
    app->add_option("--view", view, "leaf | tree | tree-predicate | interordinal-predicate");
    app->add_option("--n-trees", n_trees, "number of trees");
    app->add_option("--max-depth", max_depth, "maximal tree depth");
    app->add_option("--seed", seed, "random seed");
    app->add_flag("--no-bagging", no_bagging, "train every tree on all objects");
  }

  RunConfig load() const {
    RunConfig c = config.empty() ? RunConfig{} : load_run_config(config);
    const auto here = fs::current_path();
    auto abs = [&](const std::string& p) { return fs::absolute(here / p).lexically_normal().string(); };
    if (!data.empty()) c.data = abs(data);
    if (!domain.empty()) c.domain = abs(domain);
    if (!label.empty()) c.label = label;
    if (!model.empty()) c.model = abs(model);
    if (!view.empty()) c.view = parse_view_kind(view);
    if (n_trees) c.train.n_trees = *n_trees;
    if (max_depth) c.train.max_depth = *max_depth;
    if (seed) c.train.rng_seed = *seed;
    if (no_bagging) c.train.bagging = false;
    if (c.train.n_trees < 1) throw InvalidArgument("--n-trees must be at least 1");
    if (c.train.max_depth && *c.train.max_depth < 1) throw InvalidArgument("--max-depth must be at least 1");
    c.train.workers = worker_count();
    return c;
  }
};

// Purity annotations list the most frequent class first ("9/5" on tennis).
std::vector<std::string> classes_by_frequency(const ManyValuedContext& ctx) {
  std::map<std::string, std::size_t> n;
  for (std::size_t g = 0; g < ctx.object_count(); ++g)
    if (const auto& l = ctx.label(g)) ++n[*l];
  std::vector<std::string> out = ctx.classes();
  std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return n[a] > n[b]; });
  return out;
}

// A single tree is fit on all objects; bags only make sense in an ensemble.
Forest fit(const ManyValuedContext& ctx, TrainConfig cfg) {
  if (cfg.n_trees == 1) cfg.bagging = false;
  return train_forest(ctx, cfg);
}

Forest obtain_model(const RunConfig& c, const ManyValuedContext& ctx) {
  if (c.model) return load_forest(c.resolve(*c.model), ctx.schema_ptr());
  return fit(ctx, c.train);
}

ViewContext build_view(const RunConfig& c, const ManyValuedContext& ctx, const Forest& forest) {
  if (forest.trees.size() == 1) return make_view(c.view, ctx, forest.trees.front());
  return forest_view(ctx, forest, c.view);
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  if (suffix.empty()) return path;
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + "-" + suffix + p.extension().string())).string();
}

std::string part_suffix(const std::string& name) {
  if (name == "<=") return "leq";
  if (name == ">=") return "geq";
  return name;
}

void ensure_parent(const std::string& path) {
  auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_file(const std::string& path, const std::string& text) {
  ensure_parent(path);
  write_text_file(path, text);
}

int cmd_scale(const Common& common, const std::string& scale_override, const std::vector<std::string>& formulas,
              const std::string& out, bool count) {
  auto c = common.load();
  if (!scale_override.empty()) c.scale = scale_override;
  if (!formulas.empty()) c.formulas = formulas;
  const auto ctx = load_config_data(c);
  FormalContext k;
  if (c.scale == "interordinal") {
    k = interordinal_scale_context(ctx);
  } else if (c.scale == "nominal") {
    std::map<std::string, FormalContext> scales;
    for (const auto& d : ctx.schema().attributes()) scales.emplace(d.name(), nominal_scale(d));
    k = plain_scale(ctx, scales);
  } else if (c.scale == "logical") {
    if (c.formulas.empty()) throw InvalidArgument("logical scaling needs at least one formula");
    std::vector<LogicalFormula> fs_;
    for (const auto& f : c.formulas) fs_.push_back(parse_formula(f));
    k = logical_scale(ctx, fs_);
  } else {
    throw InvalidArgument("unknown scale '" + c.scale + "' (interordinal, nominal, logical)");
  }
  const auto target = !out.empty() ? std::optional<std::string>(out) : c.output("context");
  if (target) write_file(*target, context_to_json(k).dump(2) + "\n");
  std::cout << "objects: " << k.object_count() << "\n";
  std::cout << "attributes: " << k.attribute_count() << "\n";
  if (count) std::cout << "concepts: " << count_concepts(k, 0, worker_count()) << "\n";
  return 0;
}

int cmd_train(const Common& common, const std::string& out) {
  const auto c = common.load();
  const auto ctx = load_config_data(c);
  const auto forest = fit(ctx, c.train);
  const auto target = !out.empty() ? std::optional<std::string>(out) : c.output("model");
  if (target) {
    ensure_parent(*target);
    if (forest.trees.size() == 1) save_tree(*target, forest.trees.front());
    else save_forest(*target, forest);
  }
  std::size_t nodes = 0, leaves = 0;
  for (const auto& t : forest.trees) {
    nodes += t.size();
    leaves += t.leaves().size();
  }
  std::cout << "trees: " << forest.trees.size() << "\n";
  std::cout << "nodes: " << nodes << "\n";
  std::cout << "leaves: " << leaves << "\n";
  std::cout << "train accuracy: " << evaluate(forest, ctx).accuracy << "\n";
  return 0;
}

int cmd_views(const Common& common, std::optional<std::size_t> min_support, const std::string& out_dir) {
  auto c = common.load();
  if (min_support) c.plan.min_support = *min_support;
  const auto ctx = load_config_data(c);
  const auto forest = obtain_model(c, ctx);
  const auto view = build_view(c, ctx, forest);
  std::vector<std::string> warnings;
  const auto parts = apply_plan(view, ctx, forest, c.plan, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  auto path_for = [&](const std::string& key, const std::string& file) -> std::optional<std::string> {
    if (!out_dir.empty()) return (fs::path(out_dir) / file).string();
    return c.output(key);
  };
  const auto classes = classes_by_frequency(ctx);
  for (const auto& part : parts) {
    EnumerationOptions opts;
    opts.min_support = c.plan.min_support.value_or(0);
    opts.workers = worker_count();
    const auto lattice = enumerate_concepts(part.view.context, opts);
    const auto names = part.view.display_names();
    const auto suffix = part_suffix(part.name);
    if (auto p = path_for("context", "context.json")) {
      auto j = context_to_json(part.view.formal());
      j["display_names"] = names;
      j["kind"] = view_kind_name(part.view.kind);
      write_file(with_suffix(*p, suffix), j.dump(2) + "\n");
    }
    if (auto p = path_for("lattice", "lattice.json")) write_file(with_suffix(*p, suffix), lattice_to_json(lattice, &names).dump(2) + "\n");
    if (auto p = path_for("dot", "lattice.dot")) {
      DotOptions d;
      d.graph_name = part.name.empty() ? std::string(view_kind_name(part.view.kind)) : part.name;
      d.attribute_labels = names;
      if (ctx.has_labels()) {
        d.object_classes = view_labels(part.view, ctx);
        d.class_order = classes;
      }
      write_file(with_suffix(*p, suffix), lattice_to_dot(lattice, d));
    }
    const std::string prefix = part.name.empty() ? "" : "[" + part.name + "] ";
    std::cout << prefix << "objects: " << part.view.formal().object_count() << "\n";
    std::cout << prefix << "attributes: " << part.view.formal().attribute_count() << "\n";
    std::cout << prefix << "concepts: " << lattice.size() << "\n";
  }
  return 0;
}

int cmd_explain(const Common& common, const std::string& target, const std::string& out) {
  const auto c = common.load();
  const auto ctx = load_config_data(c);
  const auto forest = obtain_model(c, ctx);
  const auto view = build_view(c, ctx, forest);
  EnumerationOptions opts;
  opts.workers = worker_count();
  const auto lattice = enumerate_concepts(view.context, opts);
  const auto report = explain(view, lattice, target).dump(2) + "\n";
  if (!out.empty()) write_file(out, report);
  else std::cout << report;
  return 0;
}

std::vector<std::size_t> parse_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto pos = s.find(',', start);
    auto item = s.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (auto dash = item.find('-'); dash != std::string::npos) {
      const auto a = std::stoul(item.substr(0, dash)), b = std::stoul(item.substr(dash + 1));
      for (auto x = a; x <= b; ++x) out.push_back(x);
    } else if (!item.empty()) {
      out.push_back(std::stoul(item));
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (out.empty()) throw InvalidArgument("empty list '" + s + "'");
  return out;
}

int cmd_experiment(const Common& common, const std::string& nt, const std::string& md, const std::string& seeds,
                   std::optional<std::size_t> folds, bool no_counts, const std::string& out) {
  auto c = common.load();
  try {
    if (!nt.empty()) c.grid.n_trees = parse_list(nt);
    if (!md.empty()) c.grid.max_depths = parse_list(md);
    if (!seeds.empty()) {
      c.grid.seeds.clear();
      for (auto s : parse_list(seeds)) c.grid.seeds.push_back(s);
    }
  } catch (const std::logic_error&) {
    throw InvalidArgument("grid lists look like '2,4' or '3-7'");
  }
  if (folds) c.grid.folds = *folds;
  const auto ctx = load_config_data(c);
  const auto rows = run_experiment(ctx, c.grid, c.train, worker_count(), !no_counts);
  const auto csv = experiment_csv(rows);
  const auto target = !out.empty() ? std::optional<std::string>(out) : c.output("report");
  if (target) {
    write_file(*target, csv);
    std::cout << "rows: " << rows.size() << "\n";
  } else {
    std::cout << csv;
  }
  return 0;
}

int cmd_export(const std::string& context_path, std::optional<std::size_t> min_support, const std::string& lattice_out,
               const std::string& dot_out) {
  const auto j = parse_json_text(read_text_file(context_path), context_path);
  const auto k = context_from_json(j);
  EnumerationOptions opts;
  opts.min_support = min_support.value_or(0);
  opts.workers = worker_count();
  const auto lattice = enumerate_concepts(k, opts);
  std::optional<std::vector<std::string>> labels;
  if (j.contains("display_names")) labels = j["display_names"].get<std::vector<std::string>>();
  if (!lattice_out.empty()) write_file(lattice_out, lattice_to_json(lattice, labels ? &*labels : nullptr).dump(2) + "\n");
  if (!dot_out.empty()) {
    DotOptions d;
    d.attribute_labels = labels;
    write_file(dot_out, lattice_to_dot(lattice, d));
  }
  std::cout << "concepts: " << lattice.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conceptual views of decision trees and random forests"};
  app.require_subcommand(1);

  Common common;

  auto* scale = app.add_subcommand("scale", "scale the data into a formal context");
  common.add_to(scale, false);
  std::string scale_kind, scale_out;
  std::vector<std::string> formulas;
  bool count = false;
  scale->add_option("--scale", scale_kind, "interordinal | nominal | logical");
  scale->add_option("--formula", formulas, "logical attribute, e.g. \"nice := temperature = mild & !windy = True\"");
  scale->add_option("-o,--out", scale_out, "context JSON output");
  scale->add_flag("--count", count, "print the number of concepts");

  Common train_common;
  auto* train = app.add_subcommand("train", "train a tree or forest");
  train_common.add_to(train);
  std::string train_out;
  train->add_option("-o,--out", train_out, "model JSON output");

  Common views_common;
  auto* views = app.add_subcommand("views", "build a view, reduce it, and write its lattice");
  views_common.add_to(views);
  std::optional<std::size_t> min_support;
  std::string out_dir;
  views->add_option("--min-support", min_support, "iceberg threshold (object count)");
  views->add_option("--out-dir", out_dir, "directory for context.json, lattice.json, lattice.dot");

  Common explain_common;
  auto* expl = app.add_subcommand("explain", "explain a leaf, object, or predicate in a view lattice");
  explain_common.add_to(expl);
  std::string target, explain_out;
  expl->add_option("-t,--target", target,
                   "top | object:<id> | leaf:<name> | leaves:<a>,<b> | predicate:<p> | dominates:<p>,<q>")
      ->required();
  expl->add_option("-o,--out", explain_out, "report output (default: stdout)");

  Common exp_common;
  auto* exper = app.add_subcommand("experiment", "parameter study over (n_trees, max_depth, seed)");
  exp_common.add_to(exper);
  std::string nt, md, seeds, exp_out;
  std::optional<std::size_t> folds;
  bool no_counts = false;
  exper->add_option("--nt", nt, "tree counts, e.g. 2,4 or 2-10");
  exper->add_option("--md", md, "depths, e.g. 3,5,7");
  exper->add_option("--seeds", seeds, "seeds, e.g. 0-9");
  exper->add_option("--folds", folds, "cross-validation folds");
  exper->add_flag("--no-counts", no_counts, "skip concept counting");
  exper->add_option("-o,--out", exp_out, "CSV output (default: stdout)");

  auto* exp = app.add_subcommand("export", "lattice JSON and DOT of a context JSON");
  std::string context_path, lattice_out, dot_out;
  std::optional<std::size_t> export_support;
  exp->add_option("--context", context_path, "context JSON")->required();
  exp->add_option("--min-support", export_support, "iceberg threshold (object count)");
  exp->add_option("--lattice", lattice_out, "lattice JSON output");
  exp->add_option("--dot", dot_out, "DOT output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*scale) return cmd_scale(common, scale_kind, formulas, scale_out, count);
    if (*train) return cmd_train(train_common, train_out);
    if (*views) return cmd_views(views_common, min_support, out_dir);
    if (*expl) return cmd_explain(explain_common, target, explain_out);
    if (*exper) return cmd_experiment(exp_common, nt, md, seeds, folds, no_counts, exp_out);
    if (*exp) return cmd_export(context_path, export_support, lattice_out, dot_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
