#include "fhmix_cli/config.hpp"

#include <fstream>
#include <sstream>

#include "fhmix/error.hpp"

namespace fhmix::cli {

using nlohmann::json;
using nlohmann::ordered_json;

ConfigError::ConfigError(std::string field, std::string message,
                         std::optional<std::size_t> line, std::optional<std::size_t> column)
    : std::runtime_error([&] {
        std::string where;
        if (line) where = "line " + std::to_string(*line) + ", column " + std::to_string(*column);
        if (!field.empty()) where += (where.empty() ? "" : ", ") + std::string("field '") + field + "'";
        return where.empty() ? message : where + ": " + message;
      }()),
      field_(std::move(field)),
      line_(line),
      column_(column) {}

namespace {

// Cursor over the document that remembers how it got here.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const json& value() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(path_, message); }

  Node field(const std::string& key) const {
    require_object();
    const auto it = value_.find(key);
    if (it == value_.end()) throw ConfigError(join(key), "missing required field");
    return {*it, join(key)};
  }

  std::optional<Node> optional_field(const std::string& key) const {
    require_object();
    const auto it = value_.find(key);
    if (it == value_.end() || it->is_null()) return std::nullopt;
    return Node{*it, join(key)};
  }

  Node at(std::size_t i) const { return {value_[i], path_ + "[" + std::to_string(i) + "]"}; }

  void require_object() const {
    if (!value_.is_object()) fail("expected an object");
  }

  std::size_t array_size() const {
    if (!value_.is_array()) fail("expected an array");
    return value_.size();
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    return value_.get<double>();
  }

  std::uint64_t unsigned_integer() const {
    if (!value_.is_number_unsigned()) fail("expected a non-negative integer");
    return value_.get<std::uint64_t>();
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  std::vector<double> numbers() const {
    std::vector<double> out(array_size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).number();
    return out;
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    require_object();
    for (const auto& item : value_.items()) {
      bool known = false;
      for (auto k : keys) known = known || item.key() == k;
      if (!known) throw ConfigError(join(item.key()), "unknown field");
    }
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& value_;
  std::string path_;
};

// A library error already tagged with the field it came from.
class FieldError : public Error {
 public:
  using Error::Error;
};

// Library errors raised while building a value are re-labelled with the
// innermost field they came from; the code and message are kept.
template <class F>
auto at_field(const Node& node, F&& build) {
  try {
    return build();
  } catch (const FieldError&) {
    throw;
  } catch (const Error& e) {
    // what() is "<code>: <message>"; keep the message, prefix the field.
    std::string_view message = e.what();
    message.remove_prefix(std::min(message.size(), to_string(e.code()).size() + 2));
    throw FieldError(e.code(), node.path() + ": " + std::string(message), e.value());
  }
}

SequenceSpec parse_sequence(const Node& node) {
  if (node.value().is_number()) return SequenceSpec::constant(node.number());
  const std::string type = node.field("type").string();
  return at_field(node, [&]() -> SequenceSpec {
    if (type == "constant") {
      node.allow_only({"type", "c"});
      return SequenceSpec::constant(node.field("c").number());
    }
    if (type == "power_law") {
      node.allow_only({"type", "c", "alpha"});
      const double c = node.field("c").number();
      return SequenceSpec::power_law(c, node.field("alpha").number());
    }
    if (type == "geometric") {
      node.allow_only({"type", "c", "r"});
      const double c = node.field("c").number();
      return SequenceSpec::geometric(c, node.field("r").number());
    }
    if (type == "sum" || type == "product") {
      const std::string key = type == "sum" ? "terms" : "factors";
      node.allow_only({"type", key});
      const Node list = node.field(key);
      std::vector<SequenceSpec> parts;
      for (std::size_t i = 0; i < list.array_size(); ++i) parts.push_back(parse_sequence(list.at(i)));
      if (parts.empty()) list.fail("expected at least one entry");
      return type == "sum" ? SequenceSpec::sum(std::move(parts))
                           : SequenceSpec::product(std::move(parts));
    }
    if (type == "quotient") {
      node.allow_only({"type", "numerator", "denominator"});
      SequenceSpec numerator = parse_sequence(node.field("numerator"));
      return SequenceSpec::quotient(std::move(numerator),
                                    parse_sequence(node.field("denominator")));
    }
    if (type == "explicit") {
      node.allow_only({"type", "values", "tail"});
      std::optional<SequenceSpec> tail;
      if (const auto t = node.optional_field("tail")) tail = parse_sequence(*t);
      return SequenceSpec::explicit_values(node.field("values").numbers(), std::move(tail));
    }
    node.field("type").fail("unknown sequence type '" + type + "'");
  });
}

Eigen::VectorXd parse_vector(const Node& node) {
  const std::vector<double> v = node.numbers();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd parse_matrix(const Node& node) {
  const std::size_t rows = node.array_size();
  Eigen::MatrixXd m(rows, rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const Node row = node.at(i);
    if (row.array_size() != rows) row.fail("covariance must be square");
    for (std::size_t j = 0; j < rows; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row.at(j).number();
    }
  }
  return m;
}

MixtureSpec parse_mixture(const Node& node) {
  node.allow_only({"mode", "components", "weights"});
  const std::string mode = node.field("mode").string();
  if (mode != "diagonal" && mode != "dense") {
    node.field("mode").fail("expected \"diagonal\" or \"dense\"");
  }
  MixtureSpec m;
  const Node comps = node.field("components");
  for (std::size_t i = 0; i < comps.array_size(); ++i) {
    const Node c = comps.at(i);
    if (mode == "diagonal") {
      c.allow_only({"mean", "variance"});
      SequenceSpec mean = parse_sequence(c.field("mean"));
      SequenceSpec variance = parse_sequence(c.field("variance"));
      m.components.push_back(at_field(c.field("variance"), [&] {
        return GaussianSpec::diagonal(std::move(mean), std::move(variance));
      }));
    } else {
      c.allow_only({"mean", "covariance"});
      Eigen::VectorXd mean = parse_vector(c.field("mean"));
      Eigen::MatrixXd cov = parse_matrix(c.field("covariance"));
      m.components.push_back(
          at_field(c, [&] { return GaussianSpec::dense(std::move(mean), std::move(cov)); }));
    }
  }
  m.weights = node.field("weights").numbers();
  at_field(node, [&] { return validate_mixture(m); });
  return m;
}

std::vector<std::size_t> parse_counts(const Node& node) {
  std::vector<std::size_t> out(node.array_size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = node.at(i).unsigned_integer();
  return out;
}

ExperimentParams parse_experiment(const Node& node) {
  node.allow_only({"dims", "n", "seed", "priors", "tau", "checkpoints"});
  ExperimentParams p;
  if (const auto v = node.optional_field("dims")) {
    p.dims = parse_counts(*v);
    for (std::size_t i = 0; i < p.dims.size(); ++i) {
      if (p.dims[i] == 0 || (i > 0 && p.dims[i] <= p.dims[i - 1])) {
        v->fail("dims must be strictly increasing positive integers");
      }
    }
    if (p.dims.empty()) v->fail("dims must not be empty");
  }
  if (const auto v = node.optional_field("n")) {
    p.n = v->unsigned_integer();
    if (p.n == 0) v->fail("n must be >= 1");
  }
  if (const auto v = node.optional_field("seed")) p.seed = v->unsigned_integer();
  if (const auto v = node.optional_field("priors")) {
    const std::vector<double> pr = v->numbers();
    if (pr.size() != 2 || pr[0] < 0 || pr[1] < 0 || std::abs(pr[0] + pr[1] - 1) > 1e-12) {
      v->fail("priors must be two non-negative numbers summing to 1");
    }
    p.priors = {pr[0], pr[1]};
  }
  if (const auto v = node.optional_field("tau")) {
    p.tau = v->number();
    if (!std::isfinite(p.tau)) v->fail("tau must be finite");
  }
  if (const auto v = node.optional_field("checkpoints")) {
    p.checkpoints = parse_counts(*v);
    for (std::size_t c : p.checkpoints) {
      if (c == 0) v->fail("checkpoints must be >= 1");
    }
  }
  return p;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

ordered_json numbers_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (double x : v) out.push_back(x);
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte);
    std::string message = e.what();
    if (const auto pos = message.find("syntax error"); pos != std::string::npos) {
      message = message.substr(pos);
    }
    throw ConfigError("", message, line, column);
  }
  const Node root(doc, "");
  root.allow_only({"schema_version", "mu", "nu", "experiment"});
  ExperimentConfig config;
  const Node version = root.field("schema_version");
  config.schema_version = static_cast<int>(version.unsigned_integer());
  if (config.schema_version != kSchemaVersion) {
    version.fail("unsupported schema version " + std::to_string(config.schema_version));
  }
  config.mu = parse_mixture(root.field("mu"));
  config.nu = parse_mixture(root.field("nu"));
  if (config.mu.mode() != config.nu.mode()) {
    root.field("nu").field("mode").fail("mu and nu must share a covariance mode");
  }
  if (const auto e = root.optional_field("experiment")) config.experiment = parse_experiment(*e);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ordered_json to_json(const SequenceSpec& s) {
  return std::visit(
      [](const auto& v) -> ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, seq::Constant>) {
          return {{"type", "constant"}, {"c", v.c}};
        } else if constexpr (std::is_same_v<T, seq::PowerLaw>) {
          return {{"type", "power_law"}, {"c", v.c}, {"alpha", v.alpha}};
        } else if constexpr (std::is_same_v<T, seq::Geometric>) {
          return {{"type", "geometric"}, {"c", v.c}, {"r", v.r}};
        } else if constexpr (std::is_same_v<T, seq::Sum>) {
          ordered_json terms = ordered_json::array();
          for (const auto& t : v.terms) terms.push_back(to_json(t));
          return {{"type", "sum"}, {"terms", terms}};
        } else if constexpr (std::is_same_v<T, seq::Product>) {
          ordered_json factors = ordered_json::array();
          for (const auto& f : v.factors) factors.push_back(to_json(f));
          return {{"type", "product"}, {"factors", factors}};
        } else if constexpr (std::is_same_v<T, seq::Quotient>) {
          return {{"type", "quotient"},
                  {"numerator", to_json(v.numerator)},
                  {"denominator", to_json(v.denominator)}};
        } else {
          return {{"type", "explicit"},
                  {"values", v.values},
                  {"tail", v.tail ? to_json(*v.tail) : ordered_json(nullptr)}};
        }
      },
      s.node().value);
}

ordered_json to_json(const MixtureSpec& m) {
  ordered_json out;
  out["mode"] = std::string(to_string(m.mode()));
  ordered_json comps = ordered_json::array();
  for (const auto& g : m.components) {
    if (g.is_diagonal()) {
      comps.push_back({{"mean", to_json(g.mean_sequence())},
                       {"variance", to_json(g.variance_sequence())}});
    } else {
      ordered_json cov = ordered_json::array();
      for (Eigen::Index i = 0; i < g.covariance().rows(); ++i) {
        cov.push_back(numbers_json(g.covariance().row(i).transpose()));
      }
      comps.push_back({{"mean", numbers_json(g.mean_vector())}, {"covariance", cov}});
    }
  }
  out["components"] = comps;
  out["weights"] = m.weights;
  return out;
}

ordered_json to_json(const ExperimentConfig& config) {
  const ExperimentParams& e = config.experiment;
  ordered_json out;
  out["schema_version"] = config.schema_version;
  out["mu"] = to_json(config.mu);
  out["nu"] = to_json(config.nu);
  out["experiment"] = {{"dims", e.dims},         {"n", e.n},
                       {"seed", e.seed},         {"priors", e.priors},
                       {"tau", e.tau},           {"checkpoints", e.checkpoints}};
  return out;
}

std::string serialize_config(const ExperimentConfig& config) {
  return to_json(config).dump(2) + "\n";
}

}  // namespace fhmix::cli
