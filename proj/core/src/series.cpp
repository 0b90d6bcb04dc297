#include "fhmix/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fhmix/compensated_sum.hpp"
#include "fhmix/error.hpp"

namespace fhmix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kPowerTol = 1e-12;
constexpr double kRatioTol = 1e-12;
// Coefficients that cancel to within this fraction of their magnitude are
// treated as exactly zero.
constexpr double kCancelTol = 1e-12;

// c * n^(-p) * r^n
struct Monomial {
  double c;
  double p;
  double r;
};

using Poly = std::vector<Monomial>;

bool same_power(double a, double b) {
  return std::abs(a - b) <= kPowerTol * std::max(1.0, std::abs(a));
}

bool same_ratio(double a, double b) {
  return std::abs(a - b) <= kRatioTol * std::max(a, b);
}

bool same_key(const Monomial& a, const Monomial& b) {
  return same_ratio(a.r, b.r) && same_power(a.p, b.p);
}

// Sorted by increasing asymptotic dominance; back() is the leading term.
Poly normalize(Poly poly) {
  std::sort(poly.begin(), poly.end(), [](const Monomial& a, const Monomial& b) {
    if (!same_ratio(a.r, b.r)) return a.r < b.r;
    return a.p > b.p;
  });
  Poly out;
  std::size_t i = 0;
  while (i < poly.size()) {
    Monomial m = poly[i];
    CompensatedSum coeff;
    double magnitude = 0.0;
    std::size_t j = i;
    for (; j < poly.size() && same_key(poly[j], m); ++j) {
      coeff += poly[j].c;
      magnitude = std::max(magnitude, std::abs(poly[j].c));
    }
    m.c = coeff.value();
    if (m.c != 0.0 && std::abs(m.c) > kCancelTol * magnitude) out.push_back(m);
    i = j;
  }
  return out;
}

Poly add(const Poly& a, const Poly& b) {
  Poly out = a;
  out.insert(out.end(), b.begin(), b.end());
  return normalize(std::move(out));
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) out.push_back({x.c * y.c, x.p + y.p, x.r * y.r});
  }
  return normalize(std::move(out));
}

Poly divide(const Poly& a, const Monomial& m) {
  Poly out;
  out.reserve(a.size());
  for (const auto& x : a) out.push_back({x.c / m.c, x.p - m.p, x.r / m.r});
  return normalize(std::move(out));
}

bool poly_equal(const Poly& a, const Poly& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_key(a[i], b[i]) || a[i].c != b[i].c) return false;
  }
  return true;
}

const Poly kOne{{1.0, 0.0, 1.0}};

struct Rational {
  Poly num;
  Poly den;

  bool is_zero() const { return num.empty(); }
  bool has_unit_denominator() const { return poly_equal(den, kOne); }
};

Rational make_rational(Poly num, Poly den) {
  num = normalize(std::move(num));
  den = normalize(std::move(den));
  if (den.empty()) {
    throw Error(ErrorCode::InvalidSequence,
                "quotient by an identically zero sequence");
  }
  if (num.empty()) return {{}, kOne};
  if (den.size() == 1) {
    const Monomial d = den.front();
    return {divide(num, d), kOne};
  }
  return {std::move(num), std::move(den)};
}

Rational add(const Rational& a, const Rational& b) {
  if (poly_equal(a.den, b.den)) return make_rational(add(a.num, b.num), a.den);
  return make_rational(add(multiply(a.num, b.den), multiply(b.num, a.den)),
                       multiply(a.den, b.den));
}

Rational multiply(const Rational& a, const Rational& b) {
  return make_rational(multiply(a.num, b.num), multiply(a.den, b.den));
}

Rational divide(const Rational& a, const Rational& b) {
  if (b.is_zero()) {
    throw Error(ErrorCode::InvalidSequence,
                "quotient by an identically zero sequence");
  }
  return make_rational(multiply(a.num, b.den), multiply(a.den, b.num));
}

Rational to_rational(const SequenceSpec& s) {
  return std::visit(
      overloaded{
          [](const seq::Constant& c) { return make_rational({{c.c, 0.0, 1.0}}, kOne); },
          [](const seq::PowerLaw& p) {
            return make_rational({{p.c, p.alpha, 1.0}}, kOne);
          },
          [](const seq::Geometric& g) {
            return make_rational({{g.c, 0.0, g.r}}, kOne);
          },
          [](const seq::Sum& sum) {
            Rational acc = to_rational(sum.terms.front());
            for (std::size_t i = 1; i < sum.terms.size(); ++i) {
              acc = add(acc, to_rational(sum.terms[i]));
            }
            return acc;
          },
          [](const seq::Product& p) {
            Rational acc = to_rational(p.factors.front());
            for (std::size_t i = 1; i < p.factors.size(); ++i) {
              acc = multiply(acc, to_rational(p.factors[i]));
            }
            return acc;
          },
          [](const seq::Quotient& q) {
            return divide(to_rational(q.numerator), to_rational(q.denominator));
          },
          [](const seq::Explicit&) -> Rational {
            throw Error(ErrorCode::InvalidSequence,
                        "explicit prefixes have no closed form");
          },
      },
      s.node().value);
}

double eval_monomial(const Monomial& m, double n) {
  if (m.p == 0.0 && m.r == 1.0) return m.c;
  return m.c * std::exp(n * std::log(m.r) - m.p * std::log(n));
}

struct Evaluated {
  double value;
  double magnitude;  // scale used to judge sign against rounding noise
};

Evaluated eval_poly(const Poly& poly, double n) {
  CompensatedSum acc;
  double magnitude = 0.0;
  for (const auto& m : poly) {
    const double v = eval_monomial(m, n);
    acc += v;
    magnitude = std::max(magnitude, std::abs(v));
  }
  return {acc.value(), magnitude};
}

Evaluated eval_rational(const Rational& q, double n) {
  const auto num = eval_poly(q.num, n);
  const auto den = eval_poly(q.den, n);
  return {num.value / den.value, num.magnitude / std::abs(den.value)};
}

LeadingTerm leading_of(const Rational& q) {
  const Monomial& a = q.num.back();
  const Monomial& b = q.den.back();
  return {a.c / b.c, a.p - b.p, a.r / b.r};
}

bool summable(const LeadingTerm& t) {
  if (!same_ratio(t.ratio, 1.0)) return t.ratio < 1.0;
  return t.power > 1.0 + kPowerTol;
}

// sum_{n >= start} n^(-s), s > 1, via Euler–Maclaurin beyond a cutoff.
double hurwitz_tail(double s, std::size_t start) {
  constexpr std::size_t kCutoff = 64;
  CompensatedSum acc;
  std::size_t m = start;
  for (; m < kCutoff; ++m) acc += std::pow(static_cast<double>(m), -s);
  const double x = static_cast<double>(m);
  const double xs = std::pow(x, -s);
  const double s1 = s, s2 = s * (s + 1) * (s + 2),
               s3 = s2 * (s + 3) * (s + 4), s4 = s3 * (s + 5) * (s + 6);
  acc += x * xs / (s - 1.0);
  acc += 0.5 * xs;
  acc += s1 * xs / (12.0 * x);
  acc += -s2 * xs / (720.0 * x * x * x);
  acc += s3 * xs / (30240.0 * std::pow(x, 5));
  acc += -s4 * xs / (1209600.0 * std::pow(x, 7));
  return acc.value();
}

// sum_{n >= start} n^(-p) r^n for r < 1.
double geometric_tail(double p, double r, std::size_t start) {
  constexpr std::size_t kMaxTerms = 50'000'000;
  const double log_r = std::log(r);
  const double peak = p < 0.0 ? -p / -log_r : 0.0;
  CompensatedSum acc;
  double term = 0.0;
  std::size_t n = start;
  for (std::size_t k = 0; k < kMaxTerms; ++k, ++n) {
    const double x = static_cast<double>(n);
    term = std::exp(x * log_r - p * std::log(x));
    acc += term;
    if (x > peak && (term == 0.0 || term <= 1e-18 * std::abs(acc.value()))) {
      return acc.value();
    }
  }
  return acc.value() + term * r / (1.0 - r);
}

double monomial_tail(double c, double p, double r, std::size_t start) {
  if (same_ratio(r, 1.0)) return c * hurwitz_tail(p, start);
  return c * geometric_tail(p, r, start);
}

double tail_sum(const Rational& q, std::size_t start) {
  if (q.is_zero()) return 0.0;
  if (q.has_unit_denominator()) {
    CompensatedSum acc;
    for (const auto& m : q.num) acc += monomial_tail(m.c, m.p, m.r, start);
    return acc.value();
  }
  // No closed form: sum a block directly, then close with the leading term.
  constexpr std::size_t kBlock = 4096;
  CompensatedSum acc;
  for (std::size_t n = start; n < start + kBlock; ++n) {
    acc += eval_rational(q, static_cast<double>(n)).value;
  }
  const LeadingTerm lead = leading_of(q);
  acc += monomial_tail(lead.coeff, lead.power, lead.ratio, start + kBlock);
  return acc.value();
}

double apply(Transform t, double v) { return t == Transform::Square ? v * v : v; }

Rational apply(Transform t, const Rational& q) {
  return t == Transform::Square ? multiply(q, q) : q;
}

[[noreturn]] void throw_negative(std::size_t n, double v) {
  throw Error(ErrorCode::NegativeTerm,
              "term " + std::to_string(n) + " is negative under the identity "
              "transform",
              v);
}

}  // namespace

bool LeadingTerm::is_order_one() const {
  return same_ratio(ratio, 1.0) && same_power(power, 0.0);
}

std::string_view to_string(SeriesVerdict::Status status) {
  switch (status) {
    case SeriesVerdict::Status::Converges: return "converges";
    case SeriesVerdict::Status::Diverges: return "diverges";
    case SeriesVerdict::Status::Undecided: return "undecided";
  }
  return "unknown";
}

SeriesVerdict classify_series(const SequenceSpec& s, Transform transform) {
  const FlatSequence flat = flatten(s);

  CompensatedSum prefix;
  for (std::size_t i = 0; i < flat.prefix.size(); ++i) {
    const double t = apply(transform, flat.prefix[i]);
    if (transform == Transform::Identity && t < 0.0) throw_negative(i + 1, t);
    prefix += t;
  }

  SeriesVerdict v;
  if (!flat.tail) {
    v.status = SeriesVerdict::Status::Undecided;
    v.horizon = flat.prefix.size();
    v.partial_sum = prefix.value();
    return v;
  }

  const Rational terms = apply(transform, to_rational(*flat.tail));
  const std::size_t start = flat.prefix.size() + 1;
  if (terms.is_zero()) {
    v.status = SeriesVerdict::Status::Converges;
    v.limit_estimate = prefix.value();
    return v;
  }

  const LeadingTerm lead = leading_of(terms);
  v.leading = lead;
  if (transform == Transform::Identity) {
    if (lead.coeff < 0.0) throw_negative(start, lead.coeff);
    constexpr std::size_t kScan = 1024;
    for (std::size_t n = start; n < start + kScan; ++n) {
      const auto e = eval_rational(terms, static_cast<double>(n));
      if (e.value < -1e-12 * e.magnitude) throw_negative(n, e.value);
    }
  }

  if (summable(lead)) {
    v.status = SeriesVerdict::Status::Converges;
    v.limit_estimate = prefix.value() + tail_sum(terms, start);
  } else {
    v.status = SeriesVerdict::Status::Diverges;
  }
  return v;
}

double partial_sum(const SequenceSpec& s, Transform transform, std::size_t n) {
  if (n == 0) {
    throw Error(ErrorCode::InvalidArgument, "partial sums start at n = 1");
  }
  CompensatedSum acc;
  for (std::size_t k = 1; k <= n; ++k) acc += apply(transform, eval_at(s, k));
  return acc.value();
}

std::optional<LeadingTerm> leading_term(const SequenceSpec& s) {
  const FlatSequence flat = flatten(s);
  if (!flat.tail) return std::nullopt;
  const Rational q = to_rational(*flat.tail);
  if (q.is_zero()) return std::nullopt;
  return leading_of(q);
}

std::optional<double> fit_decay_exponent(const SequenceSpec& s,
                                         Transform transform) {
  const FlatSequence flat = flatten(s);
  const std::size_t len = flat.prefix.size();
  std::vector<double> xs, ys;
  for (std::size_t i = len / 2; i < len; ++i) {
    const double t = std::abs(apply(transform, flat.prefix[i]));
    if (t > 0.0) {
      xs.push_back(std::log(static_cast<double>(i + 1)));
      ys.push_back(std::log(t));
    }
  }
  if (xs.size() < 3) return std::nullopt;
  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return -sxy / sxx;
}

}  // namespace fhmix
