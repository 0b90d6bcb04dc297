#include "fhmix/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhmix/error.hpp"

namespace fhmix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidSequence,
                std::string(what) + " must be finite");
  }
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

}  // namespace

SequenceSpec::SequenceSpec()
    : node_(std::make_shared<const Node>(Node{seq::Constant{0.0}})) {}

SequenceSpec::SequenceSpec(std::shared_ptr<const Node> node)
    : node_(std::move(node)) {}

SequenceSpec SequenceSpec::constant(double c) {
  require_finite(c, "constant value");
  return SequenceSpec(std::make_shared<const Node>(Node{seq::Constant{c}}));
}

SequenceSpec SequenceSpec::power_law(double c, double alpha) {
  require_finite(c, "power_law coefficient");
  require_finite(alpha, "power_law exponent");
  return SequenceSpec(
      std::make_shared<const Node>(Node{seq::PowerLaw{c, alpha}}));
}

SequenceSpec SequenceSpec::geometric(double c, double r) {
  require_finite(c, "geometric coefficient");
  require_finite(r, "geometric ratio");
  if (!(r > 0.0)) {
    throw Error(ErrorCode::InvalidSequence,
                "geometric ratio must be positive, got " + format_number(r), r);
  }
  return SequenceSpec(
      std::make_shared<const Node>(Node{seq::Geometric{c, r}}));
}

SequenceSpec SequenceSpec::sum(std::vector<SequenceSpec> terms) {
  if (terms.empty()) {
    throw Error(ErrorCode::InvalidSequence, "sum needs at least one term");
  }
  return SequenceSpec(
      std::make_shared<const Node>(Node{seq::Sum{std::move(terms)}}));
}

SequenceSpec SequenceSpec::product(std::vector<SequenceSpec> factors) {
  if (factors.empty()) {
    throw Error(ErrorCode::InvalidSequence, "product needs at least one factor");
  }
  return SequenceSpec(
      std::make_shared<const Node>(Node{seq::Product{std::move(factors)}}));
}

SequenceSpec SequenceSpec::quotient(SequenceSpec numerator,
                                    SequenceSpec denominator) {
  return SequenceSpec(std::make_shared<const Node>(
      Node{seq::Quotient{std::move(numerator), std::move(denominator)}}));
}

SequenceSpec SequenceSpec::explicit_values(std::vector<double> values,
                                           std::optional<SequenceSpec> tail) {
  for (double v : values) require_finite(v, "explicit value");
  if (tail && !tail->is_analytic()) {
    throw Error(ErrorCode::InvalidSequence,
                "the tail of an explicit sequence must be analytic");
  }
  if (values.empty() && !tail) {
    throw Error(ErrorCode::InvalidSequence,
                "explicit sequence without a tail needs at least one value");
  }
  return SequenceSpec(std::make_shared<const Node>(
      Node{seq::Explicit{std::move(values), std::move(tail)}}));
}

bool SequenceSpec::is_analytic() const {
  return std::visit(
      overloaded{
          [](const seq::Constant&) { return true; },
          [](const seq::PowerLaw&) { return true; },
          [](const seq::Geometric&) { return true; },
          [](const seq::Sum& s) {
            return std::all_of(s.terms.begin(), s.terms.end(),
                               [](const auto& t) { return t.is_analytic(); });
          },
          [](const seq::Product& p) {
            return std::all_of(p.factors.begin(), p.factors.end(),
                               [](const auto& t) { return t.is_analytic(); });
          },
          [](const seq::Quotient& q) {
            return q.numerator.is_analytic() && q.denominator.is_analytic();
          },
          [](const seq::Explicit&) { return false; },
      },
      node_->value);
}

std::optional<std::size_t> SequenceSpec::horizon() const {
  auto min_of = [](const std::vector<SequenceSpec>& xs) {
    std::optional<std::size_t> h;
    for (const auto& x : xs) {
      if (auto hx = x.horizon()) h = h ? std::min(*h, *hx) : *hx;
    }
    return h;
  };
  return std::visit(
      overloaded{
          [](const seq::Constant&) -> std::optional<std::size_t> { return {}; },
          [](const seq::PowerLaw&) -> std::optional<std::size_t> { return {}; },
          [](const seq::Geometric&) -> std::optional<std::size_t> { return {}; },
          [&](const seq::Sum& s) { return min_of(s.terms); },
          [&](const seq::Product& p) { return min_of(p.factors); },
          [&](const seq::Quotient& q) {
            return min_of({q.numerator, q.denominator});
          },
          [](const seq::Explicit& e) -> std::optional<std::size_t> {
            if (e.tail) return {};
            return e.values.size();
          },
      },
      node_->value);
}

std::string SequenceSpec::describe() const {
  auto join = [](const std::vector<SequenceSpec>& xs, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out += sep;
      out += xs[i].describe();
    }
    return out;
  };
  return std::visit(
      overloaded{
          [](const seq::Constant& c) {
            return "constant(" + format_number(c.c) + ")";
          },
          [](const seq::PowerLaw& p) {
            return "power_law(c=" + format_number(p.c) +
                   ", alpha=" + format_number(p.alpha) + ")";
          },
          [](const seq::Geometric& g) {
            return "geometric(c=" + format_number(g.c) +
                   ", r=" + format_number(g.r) + ")";
          },
          [&](const seq::Sum& s) { return "(" + join(s.terms, " + ") + ")"; },
          [&](const seq::Product& p) {
            return "(" + join(p.factors, " * ") + ")";
          },
          [](const seq::Quotient& q) {
            return "(" + q.numerator.describe() + " / " +
                   q.denominator.describe() + ")";
          },
          [](const seq::Explicit& e) {
            std::string out =
                "explicit(" + std::to_string(e.values.size()) + " values";
            out += e.tail ? ", tail=" + e.tail->describe() : ", tail=unspecified";
            return out + ")";
          },
      },
      node_->value);
}

bool operator==(const SequenceSpec& a, const SequenceSpec& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->value.index() != b.node_->value.index()) return false;
  return std::visit(
      overloaded{
          [&](const seq::Constant& x) {
            return x.c == b.get_if<seq::Constant>()->c;
          },
          [&](const seq::PowerLaw& x) {
            const auto* y = b.get_if<seq::PowerLaw>();
            return x.c == y->c && x.alpha == y->alpha;
          },
          [&](const seq::Geometric& x) {
            const auto* y = b.get_if<seq::Geometric>();
            return x.c == y->c && x.r == y->r;
          },
          [&](const seq::Sum& x) { return x.terms == b.get_if<seq::Sum>()->terms; },
          [&](const seq::Product& x) {
            return x.factors == b.get_if<seq::Product>()->factors;
          },
          [&](const seq::Quotient& x) {
            const auto* y = b.get_if<seq::Quotient>();
            return x.numerator == y->numerator && x.denominator == y->denominator;
          },
          [&](const seq::Explicit& x) {
            const auto* y = b.get_if<seq::Explicit>();
            return x.values == y->values && x.tail == y->tail;
          },
      },
      a.node_->value);
}

SequenceSpec operator+(const SequenceSpec& a, const SequenceSpec& b) {
  return SequenceSpec::sum({a, b});
}

SequenceSpec operator-(const SequenceSpec& a, const SequenceSpec& b) {
  return SequenceSpec::sum({a, -b});
}

SequenceSpec operator-(const SequenceSpec& a) {
  return SequenceSpec::product({SequenceSpec::constant(-1.0), a});
}

SequenceSpec operator*(const SequenceSpec& a, const SequenceSpec& b) {
  return SequenceSpec::product({a, b});
}

SequenceSpec operator/(const SequenceSpec& a, const SequenceSpec& b) {
  return SequenceSpec::quotient(a, b);
}

double eval_at(const SequenceSpec& s, std::size_t n) {
  if (n == 0) {
    throw Error(ErrorCode::InvalidArgument, "sequence index starts at 1");
  }
  const double x = static_cast<double>(n);
  return std::visit(
      overloaded{
          [](const seq::Constant& c) { return c.c; },
          [&](const seq::PowerLaw& p) {
            return p.alpha == 0.0 ? p.c : p.c * std::pow(x, -p.alpha);
          },
          [&](const seq::Geometric& g) { return g.c * std::pow(g.r, x); },
          [&](const seq::Sum& sum) {
            double acc = 0.0;
            for (const auto& t : sum.terms) acc += eval_at(t, n);
            return acc;
          },
          [&](const seq::Product& p) {
            double acc = 1.0;
            for (const auto& f : p.factors) acc *= eval_at(f, n);
            return acc;
          },
          [&](const seq::Quotient& q) {
            return eval_at(q.numerator, n) / eval_at(q.denominator, n);
          },
          [&](const seq::Explicit& e) {
            if (n <= e.values.size()) return e.values[n - 1];
            if (!e.tail) {
              throw Error(ErrorCode::IndexBeyondHorizon,
                          "index " + std::to_string(n) +
                              " is beyond the explicit horizon " +
                              std::to_string(e.values.size()),
                          static_cast<double>(e.values.size()));
            }
            return eval_at(*e.tail, n);
          },
      },
      s.node().value);
}

namespace {

// Rebuilds a composite node from the analytic tails of its children.
std::optional<SequenceSpec> composite_tail(const SequenceSpec& s) {
  auto tails = [](const std::vector<SequenceSpec>& xs) {
    std::vector<SequenceSpec> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(*flatten(x).tail);
    return out;
  };
  return std::visit(
      overloaded{
          [&](const seq::Sum& sum) -> std::optional<SequenceSpec> {
            return SequenceSpec::sum(tails(sum.terms));
          },
          [&](const seq::Product& p) -> std::optional<SequenceSpec> {
            return SequenceSpec::product(tails(p.factors));
          },
          [&](const seq::Quotient& q) -> std::optional<SequenceSpec> {
            return SequenceSpec::quotient(*flatten(q.numerator).tail,
                                          *flatten(q.denominator).tail);
          },
          [&](const auto&) -> std::optional<SequenceSpec> { return s; },
      },
      s.node().value);
}

std::size_t prefix_length(const SequenceSpec& s) {
  auto max_of = [](const std::vector<SequenceSpec>& xs) {
    std::size_t m = 0;
    for (const auto& x : xs) m = std::max(m, prefix_length(x));
    return m;
  };
  return std::visit(
      overloaded{
          [&](const seq::Sum& sum) { return max_of(sum.terms); },
          [&](const seq::Product& p) { return max_of(p.factors); },
          [&](const seq::Quotient& q) {
            return std::max(prefix_length(q.numerator),
                            prefix_length(q.denominator));
          },
          [](const seq::Explicit& e) { return e.values.size(); },
          [](const auto&) { return std::size_t{0}; },
      },
      s.node().value);
}

}  // namespace

FlatSequence flatten(const SequenceSpec& s) {
  if (s.is_analytic()) return {{}, s};
  FlatSequence out;
  const auto horizon = s.horizon();
  const std::size_t len = horizon ? *horizon : prefix_length(s);
  out.prefix.reserve(len);
  for (std::size_t n = 1; n <= len; ++n) out.prefix.push_back(eval_at(s, n));
  if (!horizon) {
    if (const auto* e = s.get_if<seq::Explicit>()) {
      out.tail = e->tail;
    } else {
      out.tail = composite_tail(s);
    }
  }
  return out;
}

}  // namespace fhmix
