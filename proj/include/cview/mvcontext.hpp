#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "cview/bitset.hpp"
#include "cview/errors.hpp"
#include "cview/formal_context.hpp"

namespace cview {

// ---------------------------------------------------------------------------
// Value domains and schemas

/// Linearly ordered value domain of one many-valued attribute, least first.
class ValueDomain {
 public:
  ValueDomain(std::string name, std::vector<std::string> values) : name_(std::move(name)), values_(std::move(values)) {
    if (values_.empty()) throw InvalidDomain("domain of '" + name_ + "' is empty");
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (!index_.emplace(values_[i], i).second)
        throw InvalidDomain("domain of '" + name_ + "' repeats value '" + values_[i] + "'");
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::string& value(std::size_t i) const { return values_.at(i); }

  std::optional<std::size_t> find(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Two-valued domain over true/false tokens (any case).
  bool is_boolean() const {
    if (values_.size() != 2) return false;
    auto lower = [](std::string s) {
      std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
      return s;
    };
    auto a = lower(values_[0]), b = lower(values_[1]);
    return (a == "true" && b == "false") || (a == "false" && b == "true");
  }

  friend bool operator==(const ValueDomain& a, const ValueDomain& b) {
    return a.name_ == b.name_ && a.values_ == b.values_;
  }

 private:
  std::string name_;
  std::vector<std::string> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Ordered list of attribute domains shared by data sets and models.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<ValueDomain> attributes) : attributes_(std::move(attributes)) {
    for (std::size_t i = 0; i < attributes_.size(); ++i)
      if (!index_.emplace(attributes_[i].name(), i).second)
        throw InvalidDomain("attribute '" + attributes_[i].name() + "' declared twice");
  }

  std::size_t size() const noexcept { return attributes_.size(); }
  const std::vector<ValueDomain>& attributes() const noexcept { return attributes_; }
  const ValueDomain& operator[](std::size_t m) const { return attributes_.at(m); }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t require(const std::string& name) const {
    auto m = find(name);
    if (!m) throw UnknownAttribute("unknown attribute '" + name + "'");
    return *m;
  }

  friend bool operator==(const Schema& a, const Schema& b) { return a.attributes_ == b.attributes_; }

 private:
  std::vector<ValueDomain> attributes_;
  std::unordered_map<std::string, std::size_t> index_;
};

using SchemaPtr = std::shared_ptr<const Schema>;

// ---------------------------------------------------------------------------
// Predicates

enum class Direction { leq, geq };

inline const char* direction_symbol(Direction d) { return d == Direction::leq ? "<=" : ">="; }

/// Threshold test (attribute, direction, value) over a schema; value is an
/// index into the attribute's domain.
struct Predicate {
  std::size_t attribute = 0;
  Direction direction = Direction::leq;
  std::size_t value = 0;

  friend bool operator==(const Predicate&, const Predicate&) = default;
  friend auto operator<=>(const Predicate& a, const Predicate& b) {
    if (auto c = a.attribute <=> b.attribute; c != 0) return c;
    if (auto c = static_cast<int>(a.direction) <=> static_cast<int>(b.direction); c != 0) return c;
    return a.value <=> b.value;
  }

  bool holds_for(std::size_t v) const { return direction == Direction::leq ? v <= value : v >= value; }
};

struct PredicateHash {
  std::size_t operator()(const Predicate& p) const noexcept {
    return (p.attribute * 1315423911u) ^ (p.value * 2654435761u) ^ static_cast<std::size_t>(p.direction);
  }
};

// (m, <=, v) -> (m, >=, succ v); (m, >=, v) -> (m, <=, pred v).
inline std::optional<Predicate> negation(const Schema& schema, const Predicate& p) {
  const auto& dom = schema[p.attribute];
  if (p.direction == Direction::leq) {
    if (p.value + 1 >= dom.size()) return std::nullopt;
    return Predicate{p.attribute, Direction::geq, p.value + 1};
  }
  if (p.value == 0) return std::nullopt;
  return Predicate{p.attribute, Direction::leq, p.value - 1};
}

// Holds for every value of the domain.
inline bool is_tautology(const Schema& schema, const Predicate& p) {
  return p.direction == Direction::leq ? p.value + 1 == schema[p.attribute].size() : p.value == 0;
}

/// "attr:<=:value", the collision-free column name used across views.
inline std::string canonical_name(const Schema& schema, const Predicate& p) {
  const auto& dom = schema[p.attribute];
  return dom.name() + ":" + direction_symbol(p.direction) + ":" + dom.value(p.value);
}

/// Human label: "humidity>=high", or "windy" / "not windy" on boolean domains.
inline std::string display_name(const Schema& schema, const Predicate& p) {
  const auto& dom = schema[p.attribute];
  if (dom.is_boolean() && !is_tautology(schema, p)) {
    const std::size_t selected = p.direction == Direction::leq ? 0 : 1;
    std::string token = dom.value(selected);
    std::transform(token.begin(), token.end(), token.begin(), [](unsigned char c) { return std::tolower(c); });
    return token == "true" ? dom.name() : "not " + dom.name();
  }
  return dom.name() + direction_symbol(p.direction) + dom.value(p.value);
}

inline Predicate parse_predicate(const Schema& schema, const std::string& text) {
  // accepts canonical "a:<=:v" and display "a<=v" forms, plus boolean aliases
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  const std::string t = trim(text);
  for (std::size_t m = 0; m < schema.size(); ++m) {
    const auto& dom = schema[m];
    if (dom.is_boolean()) {
      for (Direction d : {Direction::leq, Direction::geq}) {
        Predicate p{m, d, d == Direction::leq ? 0u : 1u};
        if (display_name(schema, p) == t) return p;
      }
    }
  }
  for (const char* sep : {":<=:", ":>=:", "<=", ">="}) {
    auto pos = t.find(sep);
    if (pos == std::string::npos) continue;
    const std::string s(sep);
    const auto attr = trim(t.substr(0, pos));
    const auto val = trim(t.substr(pos + s.size()));
    const auto m = schema.require(attr);
    const auto v = schema[m].find(val);
    if (!v) throw InvalidArgument("value '" + val + "' not in domain of '" + attr + "'");
    return Predicate{m, s.find("<=") != std::string::npos ? Direction::leq : Direction::geq, *v};
  }
  throw ParseError("cannot parse predicate '" + text + "'");
}

// ---------------------------------------------------------------------------
// Many-valued context

/// Objects x many-valued attributes with at most one value per cell.
/// Cells hold value indices into the schema's domains; absent cells are nullopt.
class ManyValuedContext {
 public:
  using Cell = std::optional<std::size_t>;

  ManyValuedContext() : schema_(std::make_shared<Schema>()) {}

  ManyValuedContext(SchemaPtr schema, std::vector<std::string> objects, std::vector<std::vector<Cell>> rows,
                    std::optional<std::vector<std::optional<std::string>>> labels = std::nullopt,
                    std::string label_name = "class")
      : schema_(std::move(schema)),
        objects_(std::move(objects)),
        rows_(std::move(rows)),
        labels_(std::move(labels)),
        label_name_(std::move(label_name)) {
    if (rows_.size() != objects_.size()) throw InvalidArgument("row count does not match object count");
    if (labels_ && labels_->size() != objects_.size()) throw InvalidArgument("label count does not match object count");
    for (std::size_t g = 0; g < objects_.size(); ++g) {
      if (!index_.emplace(objects_[g], g).second) throw DuplicateObject("duplicate object id '" + objects_[g] + "'");
      if (rows_[g].size() != schema_->size()) throw InvalidArgument("row width does not match schema");
      for (std::size_t m = 0; m < schema_->size(); ++m)
        if (rows_[g][m] && *rows_[g][m] >= (*schema_)[m].size())
          throw DomainViolation(g, (*schema_)[m].name(), std::to_string(*rows_[g][m]));
    }
  }

  const Schema& schema() const noexcept { return *schema_; }
  const SchemaPtr& schema_ptr() const noexcept { return schema_; }
  std::size_t object_count() const noexcept { return objects_.size(); }
  std::size_t attribute_count() const noexcept { return schema_->size(); }
  const std::vector<std::string>& objects() const noexcept { return objects_; }
  const std::string& object(std::size_t g) const { return objects_.at(g); }
  const std::vector<Cell>& row(std::size_t g) const { return rows_.at(g); }
  Cell value(std::size_t g, std::size_t m) const { return rows_.at(g).at(m); }

  std::size_t require_object(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw NoSuchObject("no object '" + id + "'");
    return it->second;
  }
  std::optional<std::size_t> find_object(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool complete() const {
    for (const auto& r : rows_)
      for (const auto& c : r)
        if (!c) return false;
    return true;
  }

  bool has_labels() const noexcept { return labels_.has_value(); }
  const std::string& label_name() const noexcept { return label_name_; }
  const std::optional<std::string>& label(std::size_t g) const {
    static const std::optional<std::string> none;
    return labels_ ? labels_->at(g) : none;
  }
  const std::optional<std::vector<std::optional<std::string>>>& labels() const noexcept { return labels_; }

  // Sorted distinct labels.
  std::vector<std::string> classes() const {
    std::set<std::string> s;
    if (labels_)
      for (const auto& l : *labels_)
        if (l) s.insert(*l);
    return {s.begin(), s.end()};
  }

  /// Object-induced subcontext; ids are kept unless `rename` is set, in which
  /// case repeated rows are materialized as copies named "id#k".
  ManyValuedContext select(std::span<const std::size_t> rows_to_keep, bool rename_copies = false) const {
    std::vector<std::string> ids;
    std::vector<std::vector<Cell>> rows;
    std::optional<std::vector<std::optional<std::string>>> labels;
    if (labels_) labels.emplace();
    std::unordered_map<std::size_t, std::size_t> seen;
    for (auto g : rows_to_keep) {
      auto k = seen[g]++;
      ids.push_back(rename_copies && k > 0 ? objects_.at(g) + "#" + std::to_string(k) : objects_.at(g));
      rows.push_back(rows_.at(g));
      if (labels_) labels->push_back(labels_->at(g));
    }
    return ManyValuedContext(schema_, std::move(ids), std::move(rows), std::move(labels), label_name_);
  }

  friend bool operator==(const ManyValuedContext& a, const ManyValuedContext& b) {
    return *a.schema_ == *b.schema_ && a.objects_ == b.objects_ && a.rows_ == b.rows_ && a.labels_ == b.labels_ &&
           (!a.labels_ || a.label_name_ == b.label_name_);
  }

 private:
  SchemaPtr schema_;
  std::vector<std::string> objects_;
  std::vector<std::vector<Cell>> rows_;
  std::optional<std::vector<std::optional<std::string>>> labels_;
  std::string label_name_ = "class";
  std::unordered_map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Domain declarations

/// Parsed domain sidecar. Text format, one declaration per line:
///
///     # comment
///     @id id              (optional object-id column)
///     @label play         (optional class column)
///     overlook: rainy < overcast < sunny
///
/// Attribute order in the file is the attribute order of the schema.
struct DomainSpec {
  SchemaPtr schema;
  std::optional<std::string> id_column;
  std::optional<std::string> label_column;
};

namespace detail {
inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// One CSV record; double quotes group fields, "" escapes a quote.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}
}  // namespace detail

inline DomainSpec parse_domain_spec(std::istream& in) {
  DomainSpec spec;
  std::vector<ValueDomain> domains;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line[0] == '@') {
      std::istringstream ls(line.substr(1));
      std::string key, value;
      ls >> key >> value;
      if (value.empty()) throw ParseError("line " + std::to_string(lineno) + ": directive without value");
      if (key == "id") spec.id_column = value;
      else if (key == "label") spec.label_column = value;
      else throw ParseError("line " + std::to_string(lineno) + ": unknown directive '@" + key + "'");
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected 'name: v1 < v2'");
    auto name = detail::trim(line.substr(0, colon));
    std::vector<std::string> values;
    for (auto& v : detail::split(line.substr(colon + 1), '<')) values.push_back(detail::trim(v));
    for (const auto& v : values)
      if (v.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty value token");
    domains.emplace_back(name, std::move(values));
  }
  spec.schema = std::make_shared<Schema>(std::move(domains));
  return spec;
}

inline DomainSpec load_domain_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open domain spec '" + path + "'");
  return parse_domain_spec(in);
}

inline void write_domain_spec(std::ostream& out, const DomainSpec& spec) {
  if (spec.id_column) out << "@id " << *spec.id_column << "\n";
  if (spec.label_column) out << "@label " << *spec.label_column << "\n";
  for (const auto& d : spec.schema->attributes()) {
    out << d.name() << ":";
    for (std::size_t i = 0; i < d.size(); ++i) out << (i ? " < " : " ") << d.value(i);
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// CSV ingestion

/// Reads a header-led CSV against a domain declaration. Empty cells become
/// absent values. Without an id column, objects are named by row number.
inline ManyValuedContext read_csv(std::istream& in, const DomainSpec& spec) {
  const Schema& schema = *spec.schema;
  std::string line;
  if (!std::getline(in, line)) {
    // no header at all: only valid for an empty body
    return ManyValuedContext(spec.schema, {}, {},
                             spec.label_column ? std::optional<std::vector<std::optional<std::string>>>(
                                                     std::vector<std::optional<std::string>>{})
                                               : std::nullopt,
                             spec.label_column.value_or("class"));
  }
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  const auto header = detail::split_csv_line(line);
  std::optional<std::size_t> id_col, label_col;
  std::vector<std::optional<std::size_t>> column_attr(header.size());
  std::vector<bool> attr_seen(schema.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (spec.id_column && header[c] == *spec.id_column) {
      id_col = c;
    } else if (spec.label_column && header[c] == *spec.label_column) {
      label_col = c;
    } else if (auto m = schema.find(header[c])) {
      column_attr[c] = *m;
      attr_seen[*m] = true;
    } else {
      throw UnknownAttribute("CSV column '" + header[c] + "' is not declared in the domain spec");
    }
  }
  for (std::size_t m = 0; m < schema.size(); ++m)
    if (!attr_seen[m]) throw UnknownAttribute("declared attribute '" + schema[m].name() + "' missing from CSV header");
  if (spec.id_column && !id_col) throw UnknownAttribute("id column '" + *spec.id_column + "' missing from CSV header");
  if (spec.label_column && !label_col)
    throw UnknownAttribute("label column '" + *spec.label_column + "' missing from CSV header");

  std::vector<std::string> ids;
  std::vector<std::vector<ManyValuedContext::Cell>> rows;
  std::optional<std::vector<std::optional<std::string>>> labels;
  if (label_col) labels.emplace();
  std::unordered_set<std::string> seen;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError("row " + std::to_string(row_no) + " has " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    std::vector<ManyValuedContext::Cell> row(schema.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!column_attr[c] || fields[c].empty()) continue;
      const auto m = *column_attr[c];
      auto v = schema[m].find(fields[c]);
      if (!v) throw DomainViolation(row_no, header[c], fields[c]);
      row[m] = *v;
    }
    std::string id = id_col ? fields[*id_col] : std::to_string(row_no);
    if (!seen.insert(id).second) throw DuplicateObject("duplicate object id '" + id + "'");
    ids.push_back(std::move(id));
    rows.push_back(std::move(row));
    if (labels) labels->push_back(fields[*label_col].empty() ? std::nullopt : std::optional(fields[*label_col]));
    ++row_no;
  }
  return ManyValuedContext(spec.schema, std::move(ids), std::move(rows), std::move(labels),
                           spec.label_column.value_or("class"));
}

inline ManyValuedContext load_csv(const std::string& path, const DomainSpec& spec) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CSV '" + path + "'");
  return read_csv(in, spec);
}

inline void write_csv(std::ostream& out, const ManyValuedContext& ctx, const std::string& id_column = "id") {
  const auto& schema = ctx.schema();
  out << detail::csv_field(id_column);
  for (const auto& d : schema.attributes()) out << "," << detail::csv_field(d.name());
  if (ctx.has_labels()) out << "," << detail::csv_field(ctx.label_name());
  out << "\n";
  for (std::size_t g = 0; g < ctx.object_count(); ++g) {
    out << detail::csv_field(ctx.object(g));
    for (std::size_t m = 0; m < schema.size(); ++m) {
      out << ",";
      if (auto v = ctx.value(g, m)) out << detail::csv_field(schema[m].value(*v));
    }
    if (ctx.has_labels()) out << "," << detail::csv_field(ctx.label(g).value_or(""));
    out << "\n";
  }
}

inline void save_csv(const std::string& path, const ManyValuedContext& ctx, const std::string& id_column = "id") {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write CSV '" + path + "'");
  write_csv(out, ctx, id_column);
}

// ---------------------------------------------------------------------------
// Model relation

enum class Truth { no, yes, unknown };

inline Truth satisfies(const ManyValuedContext& ctx, std::size_t g, const Predicate& p) {
  if (g >= ctx.object_count()) throw NoSuchObject("object index " + std::to_string(g) + " out of range");
  if (p.attribute >= ctx.attribute_count()) throw UnknownAttribute("predicate attribute out of range");
  const auto v = ctx.value(g, p.attribute);
  if (!v) return Truth::unknown;
  return p.holds_for(*v) ? Truth::yes : Truth::no;
}

inline Truth satisfies(const ManyValuedContext& ctx, const std::string& object_id, const Predicate& p) {
  return satisfies(ctx, ctx.require_object(object_id), p);
}

// ---------------------------------------------------------------------------
// Scaling

/// Interordinal predicates over observed values, per attribute: all <= tests
/// ascending, then all >= tests ascending. Full columns are not filtered here.
inline std::vector<Predicate> interordinal_alphabet(const ManyValuedContext& ctx) {
  std::vector<Predicate> out;
  for (std::size_t m = 0; m < ctx.attribute_count(); ++m) {
    std::set<std::size_t> observed;
    for (std::size_t g = 0; g < ctx.object_count(); ++g)
      if (auto v = ctx.value(g, m)) observed.insert(*v);
    for (auto v : observed) out.push_back({m, Direction::leq, v});
    for (auto v : observed) out.push_back({m, Direction::geq, v});
  }
  return out;
}

/// Context whose columns are the given predicates under the model relation.
/// Requires every referenced cell to be present.
inline FormalContext predicate_scale(const ManyValuedContext& ctx, std::span<const Predicate> preds) {
  std::vector<std::string> names;
  for (const auto& p : preds) names.push_back(canonical_name(ctx.schema(), p));
  std::vector<Bitset> rows(ctx.object_count(), Bitset(preds.size()));
  for (std::size_t g = 0; g < ctx.object_count(); ++g) {
    for (std::size_t j = 0; j < preds.size(); ++j) {
      auto v = ctx.value(g, preds[j].attribute);
      if (!v) throw IncompleteContext("object '" + ctx.object(g) + "' has no value for '" +
                                      ctx.schema()[preds[j].attribute].name() + "'");
      if (preds[j].holds_for(*v)) rows[g].set(j);
    }
  }
  return FormalContext(ctx.objects(), std::move(names), std::move(rows));
}

/// Interordinally scaled context I(D); attributes holding for all objects are omitted.
inline FormalContext interordinal_scale_context(const ManyValuedContext& ctx) {
  if (!ctx.complete()) throw IncompleteContext("interordinal scaling requires a complete context");
  const auto alphabet = interordinal_alphabet(ctx);
  return drop_full_columns(predicate_scale(ctx, alphabet));
}

/// Predicates of interordinal_scale_context's columns, in column order.
inline std::vector<Predicate> interordinal_scale_predicates(const ManyValuedContext& ctx) {
  std::vector<Predicate> out;
  for (const auto& p : interordinal_alphabet(ctx)) {
    bool full = true;
    for (std::size_t g = 0; g < ctx.object_count() && full; ++g)
      full = ctx.value(g, p.attribute) && p.holds_for(*ctx.value(g, p.attribute));
    if (!full) out.push_back(p);
  }
  return out;
}

/// Nominal scale on a domain: identity context, one attribute per value.
inline FormalContext nominal_scale(const ValueDomain& dom) {
  std::vector<Bitset> rows;
  for (std::size_t i = 0; i < dom.size(); ++i) rows.push_back(Bitset::from_indices(dom.size(), {i}));
  return FormalContext(dom.values(), dom.values(), std::move(rows));
}

/// One-dimensional interordinal scale on a domain, attributes "<=:v" then ">=:v".
inline FormalContext interordinal_scale(const ValueDomain& dom) {
  const std::size_t n = dom.size();
  std::vector<std::string> attrs;
  for (const auto& v : dom.values()) attrs.push_back("<=:" + v);
  for (const auto& v : dom.values()) attrs.push_back(">=:" + v);
  std::vector<Bitset> rows(n, Bitset(2 * n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i <= j) rows[i].set(j);
      if (i >= j) rows[i].set(n + j);
    }
  return FormalContext(dom.values(), std::move(attrs), std::move(rows));
}

/// Plain scaling: each cell is replaced by the row of its attribute's scale.
/// Derived attribute names are "attr:scale_attr". Absent cells stay empty.
inline FormalContext plain_scale(const ManyValuedContext& ctx, const std::map<std::string, FormalContext>& scales) {
  const auto& schema = ctx.schema();
  struct Part {
    std::size_t attribute;
    const FormalContext* scale;
    std::size_t offset;
  };
  std::vector<Part> parts;
  std::vector<std::string> names;
  for (std::size_t m = 0; m < schema.size(); ++m) {
    auto it = scales.find(schema[m].name());
    if (it == scales.end()) continue;
    parts.push_back({m, &it->second, names.size()});
    for (const auto& a : it->second.attributes()) names.push_back(schema[m].name() + ":" + a);
  }
  for (const auto& [name, _] : scales) schema.require(name);
  std::vector<Bitset> rows(ctx.object_count(), Bitset(names.size()));
  for (std::size_t g = 0; g < ctx.object_count(); ++g) {
    for (const auto& part : parts) {
      auto v = ctx.value(g, part.attribute);
      if (!v) continue;
      const auto& token = schema[part.attribute].value(*v);
      auto srow = part.scale->find_object(token);
      if (!srow)
        throw ScaleDomainViolation("scale for '" + schema[part.attribute].name() + "' has no row for '" + token + "'");
      part.scale->row(*srow).for_each([&](std::size_t a) { rows[g].set(part.offset + a); });
    }
  }
  return FormalContext(ctx.objects(), std::move(names), std::move(rows));
}

// ---------------------------------------------------------------------------
// Logical scaling

/// Boolean combination of threshold/equality tests on attribute values.
/// Attributes and values are kept as names and resolved against a schema
/// when evaluated.
class LogicalFormula {
 public:
  enum class Op { atom, truth, conj, disj, neg };
  enum class Cmp { le, ge, eq };

  static LogicalFormula atom(std::string attribute, Cmp cmp, std::string value) {
    LogicalFormula f(Op::atom);
    f.attribute_ = std::move(attribute);
    f.cmp_ = cmp;
    f.value_ = std::move(value);
    return f;
  }
  static LogicalFormula truth() { return LogicalFormula(Op::truth); }
  static LogicalFormula all_of(std::vector<LogicalFormula> cs) {
    if (cs.empty()) return truth();
    LogicalFormula f(Op::conj);
    f.children_ = std::move(cs);
    return f;
  }
  static LogicalFormula any_of(std::vector<LogicalFormula> cs) {
    LogicalFormula f(Op::disj);
    f.children_ = std::move(cs);
    return f;
  }
  static LogicalFormula negate(LogicalFormula c) {
    LogicalFormula f(Op::neg);
    f.children_.push_back(std::move(c));
    return f;
  }

  LogicalFormula& named(std::string name) {
    display_name_ = std::move(name);
    return *this;
  }
  const std::string& display_name() const noexcept { return display_name_; }
  Op op() const noexcept { return op_; }

  // Throws UnknownAttribute / InvalidArgument on names outside the schema.
  void check(const Schema& schema) const {
    if (op_ == Op::atom) {
      auto m = schema.require(attribute_);
      if (!schema[m].find(value_))
        throw InvalidArgument("value '" + value_ + "' not in domain of '" + attribute_ + "'");
    }
    for (const auto& c : children_) c.check(schema);
  }

  bool evaluate(const ManyValuedContext& ctx, std::size_t g) const {
    switch (op_) {
      case Op::truth:
        return true;
      case Op::atom: {
        const auto& schema = ctx.schema();
        const auto m = schema.require(attribute_);
        const auto w = *schema[m].find(value_);
        const auto v = ctx.value(g, m);
        if (!v) throw IncompleteContext("object '" + ctx.object(g) + "' has no value for '" + attribute_ + "'");
        return cmp_ == Cmp::le ? *v <= w : cmp_ == Cmp::ge ? *v >= w : *v == w;
      }
      case Op::conj:
        return std::all_of(children_.begin(), children_.end(), [&](const auto& c) { return c.evaluate(ctx, g); });
      case Op::disj:
        return std::any_of(children_.begin(), children_.end(), [&](const auto& c) { return c.evaluate(ctx, g); });
      case Op::neg:
        return !children_.front().evaluate(ctx, g);
    }
    return false;
  }

 private:
  explicit LogicalFormula(Op op) : op_(op) {}

  Op op_;
  std::string attribute_;
  Cmp cmp_ = Cmp::eq;
  std::string value_;
  std::vector<LogicalFormula> children_;
  std::string display_name_;
};

/// Parses "name := expr" (or a bare expr) with
///   expr := term ('|' term)* ; term := factor ('&' factor)* ;
///   factor := '!' factor | '(' expr ')' | 'true' | attr ('<='|'>='|'=') value
inline LogicalFormula parse_formula(const std::string& text) {
  std::string body = text;
  std::string name;
  if (auto pos = text.find(":="); pos != std::string::npos) {
    name = detail::trim(text.substr(0, pos));
    body = text.substr(pos + 2);
  }
  struct Parser {
    const std::string& s;
    std::size_t i = 0;
    void skip() {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
      skip();
      if (i < s.size() && s[i] == c) {
        ++i;
        return true;
      }
      return false;
    }
    std::string word() {
      skip();
      std::size_t b = i;
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) &&
             std::string("()&|!<>=").find(s[i]) == std::string::npos)
        ++i;
      if (b == i) throw ParseError("formula: expected identifier at offset " + std::to_string(b));
      return s.substr(b, i - b);
    }
    LogicalFormula expr() {
      std::vector<LogicalFormula> parts{term()};
      while (eat('|')) parts.push_back(term());
      return parts.size() == 1 ? std::move(parts.front()) : LogicalFormula::any_of(std::move(parts));
    }
    LogicalFormula term() {
      std::vector<LogicalFormula> parts{factor()};
      while (eat('&')) parts.push_back(factor());
      return parts.size() == 1 ? std::move(parts.front()) : LogicalFormula::all_of(std::move(parts));
    }
    LogicalFormula factor() {
      if (eat('!')) return LogicalFormula::negate(factor());
      if (eat('(')) {
        auto e = expr();
        if (!eat(')')) throw ParseError("formula: missing ')'");
        return e;
      }
      auto attr = word();
      if (attr == "true") return LogicalFormula::truth();
      skip();
      LogicalFormula::Cmp cmp;
      if (s.compare(i, 2, "<=") == 0) {
        cmp = LogicalFormula::Cmp::le;
        i += 2;
      } else if (s.compare(i, 2, ">=") == 0) {
        cmp = LogicalFormula::Cmp::ge;
        i += 2;
      } else if (i < s.size() && s[i] == '=') {
        cmp = LogicalFormula::Cmp::eq;
        ++i;
      } else {
        throw ParseError("formula: expected comparison after '" + attr + "'");
      }
      return LogicalFormula::atom(attr, cmp, word());
    }
  } p{body};
  auto f = p.expr();
  p.skip();
  if (p.i != body.size()) throw ParseError("formula: trailing input at offset " + std::to_string(p.i));
  f.named(name.empty() ? detail::trim(body) : name);
  return f;
}

/// One derived attribute per formula; (g, f) incident iff f holds on g's row.
inline FormalContext logical_scale(const ManyValuedContext& ctx, std::span<const LogicalFormula> formulas) {
  std::vector<std::string> names;
  for (const auto& f : formulas) {
    f.check(ctx.schema());
    names.push_back(f.display_name());
  }
  std::vector<Bitset> rows(ctx.object_count(), Bitset(formulas.size()));
  for (std::size_t g = 0; g < ctx.object_count(); ++g)
    for (std::size_t j = 0; j < formulas.size(); ++j)
      if (formulas[j].evaluate(ctx, g)) rows[g].set(j);
  return FormalContext(ctx.objects(), std::move(names), std::move(rows));
}

}  // namespace cview
