#include "infocommit/audit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "infocommit/errors.hpp"

namespace infocommit {

namespace {

mpz_class binom(std::uint64_t n, std::uint64_t k) {
  mpz_class r;
  if (k > n) return 0;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

std::int64_t signed_d(std::uint64_t d) { return static_cast<std::int64_t>(d); }

std::int64_t square(std::uint64_t x) { return static_cast<std::int64_t>(x * x); }

// All k-subsets of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::vector<Fe> pick(const std::vector<Fe>& from, const std::vector<std::size_t>& idx) {
  std::vector<Fe> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(from[i]);
  return out;
}

std::vector<Fe> legal_queries(const ProtocolConfig& config) {
  std::vector<Fe> xs;
  for (std::uint64_t x = 0; x <= config.xi.v; ++x) xs.push_back(Fe{x});
  return xs;
}

// q^e, or 0 when it exceeds limit.
std::uint64_t bounded_power(std::uint64_t q, std::uint64_t e, std::uint64_t limit) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (r > limit / q) return 0;
    r *= q;
  }
  return r;
}

// Every rows x cols matrix over a small field.
std::vector<Matrix> all_matrices(const Field& field, std::size_t rows, std::size_t cols) {
  const std::uint64_t q = field.order();
  const std::uint64_t count = bounded_power(q, rows * cols, std::uint64_t{1} << 20);
  if (count == 0) throw ConfigError("too many matrices to enumerate");
  std::vector<Matrix> out;
  out.reserve(count);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    std::vector<Fe> data(rows * cols);
    std::uint64_t rest = idx;
    for (auto& e : data) {
      e = Fe{rest % q};
      rest /= q;
    }
    out.emplace_back(field, rows, cols, std::move(data));
  }
  return out;
}

std::vector<Matrix> full_rank_matrices(const Field& field, std::size_t rows, std::size_t cols) {
  std::vector<Matrix> out;
  for (auto& m : all_matrices(field, rows, cols)) {
    if (rank(m) == std::min(rows, cols)) out.push_back(std::move(m));
  }
  return out;
}

Matrix random_full_rank(const Field& field, std::size_t rows, std::size_t cols, Rng& rng) {
  while (true) {
    Matrix m = Matrix::random(field, rows, cols, rng);
    if (rank(m) == std::min(rows, cols)) return m;
  }
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string fmt(const mpq_class& x) {
  std::string s = x.get_str();
  if (x.get_den() != 1) s += " (" + fmt(x.get_d()) + ")";
  return s;
}

}  // namespace

void ObservationSystem::add_row(std::span<const Fe> a_part, std::span<const Fe> b_part, RowTag tag) {
  if ((!a_part.empty() && a_part.size() != d_) || (!b_part.empty() && b_part.size() != d_)) {
    throw DimensionMismatch("observation row parts must have length d");
  }
  for (int half = 0; half < 2; ++half) {
    auto part = half == 0 ? a_part : b_part;
    if (part.empty()) {
      rows_.insert(rows_.end(), d_, Fe{0});
    } else {
      rows_.insert(rows_.end(), part.begin(), part.end());
    }
  }
  tags_.push_back(tag);
}

Matrix ObservationSystem::full() const { return Matrix(field_, size(), 2 * d_, rows_); }

Matrix ObservationSystem::a_block() const {
  Matrix m(field_, size(), d_);
  for (std::size_t i = 0; i < size(); ++i) {
    std::copy_n(rows_.begin() + i * 2 * d_, d_, m.row(i).begin());
  }
  return m;
}

Matrix ObservationSystem::b_block() const {
  Matrix m(field_, size(), d_);
  for (std::size_t i = 0; i < size(); ++i) {
    std::copy_n(rows_.begin() + i * 2 * d_ + d_, d_, m.row(i).begin());
  }
  return m;
}

View legal_view(const ProtocolConfig& config, const VerifierKey& kv, std::vector<Fe> queries) {
  return View{lambda_matrix(config, kv), theta_matrix(config, kv), std::move(queries), true};
}

ObservationSystem observation_system(const View& view) {
  const Field& f = view.lambda.field();
  const std::size_t s = view.lambda.cols();
  if (view.theta.cols() != s) throw DimensionMismatch("lambda and theta widths differ");
  const std::size_t d = s * s;
  ObservationSystem sys(f, d);
  std::vector<Fe> row(d);
  const std::span<const Fe> none;

  for (std::size_t k = 0; k < view.lambda.rows(); ++k) {
    for (std::size_t j = 0; j < s; ++j) {
      std::fill(row.begin(), row.end(), Fe{0});
      for (std::size_t i = 0; i < s; ++i) row[i * s + j] = view.lambda.at(k, i);
      sys.add_row(row, view.masked ? std::span<const Fe>(row) : none, RowTag::gamma);
    }
  }
  if (view.masked) {
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t k = 0; k < view.theta.rows(); ++k) {
        std::fill(row.begin(), row.end(), Fe{0});
        for (std::size_t j = 0; j < s; ++j) row[i * s + j] = view.theta.at(k, j);
        sys.add_row(none, row, RowTag::omega);
      }
    }
  }
  for (Fe x : view.queries) {
    const auto low = power_row(f, x, s, PowerDirection::low).entries;
    const auto high = power_row(f, x, s, PowerDirection::high).entries;
    for (std::size_t i = 0; i < s; ++i) {
      std::fill(row.begin(), row.end(), Fe{0});
      for (std::size_t j = 0; j < s; ++j) row[i * s + j] = low[j];
      sys.add_row(row, view.masked ? std::span<const Fe>(row) : none, RowTag::v);
    }
    if (!view.masked) continue;
    for (std::size_t j = 0; j < s; ++j) {
      std::fill(row.begin(), row.end(), Fe{0});
      for (std::size_t i = 0; i < s; ++i) row[i * s + j] = high[i];
      sys.add_row(none, row, RowTag::u);
    }
  }
  return sys;
}

std::uint64_t conditional_entropy(const ObservationSystem& system) {
  if (system.size() == 0) return system.d();
  return system.d() + rank(system.b_block()) - rank(system.full());
}

std::uint64_t privacy_rank_oracle(const View& view) { return conditional_entropy(observation_system(view)); }

double privacy_enumeration_oracle(const View& view) {
  const Field& f = view.lambda.field();
  const std::uint64_t q = f.order();
  const std::size_t s = view.lambda.cols();
  const std::size_t d = s * s;
  const std::uint64_t total = bounded_power(q, 2 * d, kEnumerationLimit);
  if (total == 0) throw ConfigError("instance too large to enumerate: q^(2d) exceeds 2^20");
  const std::uint64_t a_count = bounded_power(q, d, kEnumerationLimit);

  std::vector<std::vector<Fe>> lows, highs;
  for (Fe x : view.queries) {
    lows.push_back(power_row(f, x, s, PowerDirection::low).entries);
    highs.push_back(power_row(f, x, s, PowerDirection::high).entries);
  }

  std::unordered_map<std::string, std::unordered_map<std::uint64_t, std::uint64_t>> groups;
  std::vector<Fe> a(d), b(d), h(d);
  std::string key;
  auto put = [&key](Fe e) {
    key.push_back(static_cast<char>(e.v & 0xff));
    key.push_back(static_cast<char>(e.v >> 8));
  };
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t rest = idx;
    for (auto& e : a) {
      e = Fe{rest % q};
      rest /= q;
    }
    for (auto& e : b) {
      e = Fe{rest % q};
      rest /= q;
    }
    for (std::size_t t = 0; t < d; ++t) h[t] = view.masked ? f.add(a[t], b[t]) : a[t];

    key.clear();
    for (std::size_t k = 0; k < view.lambda.rows(); ++k) {
      for (std::size_t j = 0; j < s; ++j) {
        Fe acc{0};
        for (std::size_t i = 0; i < s; ++i) acc = f.mul_add(view.lambda.at(k, i), h[i * s + j], acc);
        put(acc);
      }
    }
    if (view.masked) {
      for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t k = 0; k < view.theta.rows(); ++k) {
          Fe acc{0};
          for (std::size_t j = 0; j < s; ++j) acc = f.mul_add(b[i * s + j], view.theta.at(k, j), acc);
          put(acc);
        }
      }
    }
    for (std::size_t n = 0; n < lows.size(); ++n) {
      for (std::size_t i = 0; i < s; ++i) {
        Fe acc{0};
        for (std::size_t j = 0; j < s; ++j) acc = f.mul_add(h[i * s + j], lows[n][j], acc);
        put(acc);
      }
      if (!view.masked) continue;
      for (std::size_t j = 0; j < s; ++j) {
        Fe acc{0};
        for (std::size_t i = 0; i < s; ++i) acc = f.mul_add(highs[n][i], b[i * s + j], acc);
        put(acc);
      }
    }
    ++groups[key][idx % a_count];
  }

  const long double log_q = std::log(static_cast<long double>(q));
  long double h_total = 0;
  for (const auto& [obs, counts] : groups) {
    std::uint64_t n_obs = 0;
    for (const auto& [_, n] : counts) n_obs += n;
    for (const auto& [_, n] : counts) {
      const long double p_joint = static_cast<long double>(n) / total;
      const long double p_cond = static_cast<long double>(n) / n_obs;
      h_total -= p_joint * std::log(p_cond) / log_q;
    }
  }
  return static_cast<double>(h_total);
}

PrivacyCase random_privacy_case(const ProtocolConfig& config, std::uint64_t m, Rng& rng) {
  if (m > config.xi.v + 1) throw ConfigError("more queries than legal points");
  PrivacyCase pc;
  pc.kv = keygen_verifier(config, rng);
  while (pc.queries.size() < m) {
    const Fe x{rng.uniform(config.xi.v + 1)};
    if (std::find(pc.queries.begin(), pc.queries.end(), x) == pc.queries.end()) pc.queries.push_back(x);
  }
  pc.entropy = privacy_rank_oracle(legal_view(config, pc.kv, pc.queries));
  pc.bound = signed_d(config.d) - square(m + config.c);
  return pc;
}

WorstCase worst_case_queries(const ProtocolConfig& config, std::uint64_t m) {
  const auto xs = legal_queries(config);
  const mpz_class instances = binom(config.S.size(), config.c) * binom(config.S.size(), config.c) * binom(xs.size(), m);
  if (instances > 1000000) throw ConfigError("worst-case sweep too large: " + instances.get_str() + " instances");

  WorstCase wc;
  wc.worst.entropy = config.d + 1;
  for_each_subset(config.S.size(), config.c, [&](const auto& li) {
    for_each_subset(config.S.size(), config.c, [&](const auto& ti) {
      const VerifierKey kv{pick(config.S, li), pick(config.S, ti)};
      const View base = legal_view(config, kv, {});
      for_each_subset(xs.size(), m, [&](const auto& qi) {
        View view = base;
        view.queries = pick(xs, qi);
        const auto h = privacy_rank_oracle(view);
        ++wc.instances;
        if (h < wc.worst.entropy) {
          wc.worst.entropy = h;
          wc.worst.kv = kv;
          wc.worst.queries = view.queries;
        }
      });
    });
  });
  wc.worst.bound = signed_d(config.d) - square(m + config.c);
  return wc;
}

AttackReport attack_demo_unrestricted(const ProtocolConfig& config) {
  const Field& f = config.field;
  const std::size_t s = config.s;
  Matrix e1(f, 1, s);
  e1.at(0, 0) = f.one();
  const VerifierKey legal_key{{config.S.front()}, {config.S.front()}};

  AttackReport rep{0, 0, 0, 0, View{e1, theta_matrix(config, legal_key), {Fe{0}}, true},
                   legal_view(config, legal_key, {Fe{0}})};
  rep.attacked_entropy = privacy_rank_oracle(rep.attacked);
  rep.attacked_ceiling = signed_d(config.d) - static_cast<std::int64_t>(s);
  rep.legal_entropy = privacy_rank_oracle(rep.legal);
  rep.legal_floor = signed_d(config.d) - 4;
  return rep;
}

BaselineReport baseline_leakage(const ProtocolConfig& config, std::uint64_t m) {
  if (config.c + m > config.s) throw ConfigError("baseline needs c + m <= s");
  if (m > config.xi.v + 1) throw ConfigError("more queries than legal points");
  const std::vector<Fe> keys(config.S.begin(), config.S.begin() + static_cast<std::ptrdiff_t>(config.c));
  const VerifierKey kv{keys, keys};
  std::vector<Fe> queries;
  for (std::uint64_t x = 0; x < m; ++x) queries.push_back(Fe{x});

  BaselineReport rep;
  rep.m = m;
  View view = legal_view(config, kv, queries);
  rep.masked_entropy = privacy_rank_oracle(view);
  view.masked = false;
  rep.basic_entropy = privacy_rank_oracle(view);
  const auto c = static_cast<std::int64_t>(config.c);
  const auto s = static_cast<std::int64_t>(config.s);
  const auto mm = static_cast<std::int64_t>(m);
  rep.basic_expected = signed_d(config.d) - (c + mm) * s + c * mm;
  rep.masked_floor = signed_d(config.d) - square(m + config.c);
  return rep;
}

LemmaResult lemma1_check(const Matrix& f, const Matrix& g) {
  const std::size_t s = f.cols();
  const std::size_t c = f.rows();
  const std::size_t d = g.cols();
  if (g.rows() != s) throw DimensionMismatch("G must have s rows");
  if (c > s || d > s) throw DomainError("lemma needs c, d <= s");
  if (rank(f) != c || rank(g) != d) throw DomainError("F and G must have full rank");
  const Field& field = f.field();
  // vec(E) row-major: FE = (F kron I) vec(E), EG = (I kron G^T) vec(E).
  const Matrix fe = kron(f, Matrix::identity(field, s));
  const Matrix eg = kron(Matrix::identity(field, s), transpose(g));
  LemmaResult r;
  r.value = static_cast<std::int64_t>(rank(vconcat(fe, eg))) - static_cast<std::int64_t>(rank(eg));
  r.bound = static_cast<std::int64_t>(c * s) - static_cast<std::int64_t>(c * d);
  return r;
}

LemmaResult lemma3_check(const Matrix& f, const Matrix& g) {
  const std::size_t s = f.cols();
  const std::size_t c = f.rows();
  const std::size_t d = g.rows();
  if (g.cols() != s) throw DimensionMismatch("G must have s columns");
  if (c > s || d > s) throw DomainError("lemma needs c, d <= s");
  if (rank(f) != c || rank(g) != d) throw DomainError("F and G must have full rank");
  const Field& field = f.field();
  const Matrix h = vconcat(kron(Matrix::identity(field, s), f), kron(g, Matrix::identity(field, s)));
  LemmaResult r;
  r.value = static_cast<std::int64_t>(rank(h));
  r.bound = static_cast<std::int64_t>((c + d) * s) - static_cast<std::int64_t>(c * d);
  return r;
}

ExhaustiveLemmaResult exhaustive_lemma1(const Field& field, std::size_t s) {
  ExhaustiveLemmaResult out;
  for (std::size_t c = 1; c <= s; ++c) {
    const auto fs = full_rank_matrices(field, c, s);
    for (std::size_t d = 1; d <= s; ++d) {
      const auto gs = full_rank_matrices(field, s, d);
      for (const auto& f : fs) {
        for (const auto& g : gs) {
          ++out.cases;
          if (lemma1_check(f, g).pass()) ++out.passed;
        }
      }
    }
  }
  return out;
}

ExhaustiveLemmaResult exhaustive_lemma3(const Field& field, std::size_t s) {
  ExhaustiveLemmaResult out;
  for (std::size_t c = 1; c <= s; ++c) {
    const auto fs = full_rank_matrices(field, c, s);
    for (std::size_t d = 1; d <= s; ++d) {
      const auto gs = full_rank_matrices(field, d, s);
      for (const auto& f : fs) {
        for (const auto& g : gs) {
          ++out.cases;
          if (lemma3_check(f, g).pass()) ++out.passed;
        }
      }
    }
  }
  return out;
}

namespace {

bool is_zero(std::span<const Fe> v) {
  return std::all_of(v.begin(), v.end(), [](Fe e) { return e.v == 0; });
}

Fe eval_poly(const Field& f, std::span<const Fe> coeffs, Fe y) {
  Fe acc{0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = f.mul_add(acc, y, *it);
  return acc;
}

std::uint64_t root_count(std::span<const Fe> delta, const std::vector<Fe>& S, const Field& field, Side side) {
  std::uint64_t t = 0;
  for (Fe y : S) {
    const Fe point = side == Side::v ? field.pow(y, delta.size()) : y;
    if (eval_poly(field, delta, point).v == 0) ++t;
  }
  return t;
}

mpq_class probability_for_roots(std::uint64_t t, std::uint64_t set_size, std::uint64_t c) {
  mpq_class p(binom(t, c), binom(set_size, c));
  p.canonicalize();
  return p;
}

void check_soundness_inputs(std::size_t s, const std::vector<Fe>& S, std::uint64_t c, const Field& field) {
  if (s == 0) throw DimensionMismatch("empty perturbation");
  if (!validate_spec(field, s).ok) throw ConfigError("gcd(s, q-1) != 1");
  if (c == 0 || c > S.size()) throw ConfigError("c must lie in [1, |S|]");
}

}  // namespace

mpq_class soundness_exact(std::span<const Fe> delta, const std::vector<Fe>& S, std::uint64_t c,
                          const Field& field, Side side) {
  check_soundness_inputs(delta.size(), S, c, field);
  if (is_zero(delta)) throw DomainError("zero perturbation is not an attack");
  return probability_for_roots(root_count(delta, S, field, side), S.size(), c);
}

mpq_class soundness_exact(std::span<const Fe> delta_v, std::span<const Fe> delta_u, const std::vector<Fe>& S,
                          std::uint64_t c, const Field& field) {
  const bool zv = is_zero(delta_v);
  const bool zu = is_zero(delta_u);
  if (zv && zu) throw DomainError("zero perturbation is not an attack");
  mpq_class p = 1;
  if (!zv) p *= soundness_exact(delta_v, S, c, field, Side::v);
  if (!zu) p *= soundness_exact(delta_u, S, c, field, Side::u);
  return p;
}

std::vector<Fe> poly_from_roots(const Field& field, std::span<const Fe> roots) {
  std::vector<Fe> coeffs{field.one()};
  for (Fe root : roots) {
    std::vector<Fe> next(coeffs.size() + 1, Fe{0});
    const Fe neg = field.neg(root);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      next[i + 1] = field.add(next[i + 1], coeffs[i]);
      next[i] = field.mul_add(neg, coeffs[i], next[i]);
    }
    coeffs = std::move(next);
  }
  return coeffs;
}

std::string adversary_name(const Adversary& adversary) {
  std::string name;
  switch (adversary.kind) {
    case AdversaryKind::random_perturbation: name = "random-perturbation"; break;
    case AdversaryKind::root_crafting: name = "root-crafting"; break;
    case AdversaryKind::replay: name = "replay"; break;
  }
  if (adversary.kind != AdversaryKind::replay) {
    name += adversary.support == Support::v ? "/v" : adversary.support == Support::u ? "/u" : "/both";
  }
  return name;
}

mpq_class random_perturbation_exact(const ProtocolConfig& config, Support support) {
  const Field& f = config.field;
  const std::uint64_t q = f.order();
  const std::uint64_t total = bounded_power(q, config.s, std::uint64_t{1} << 24);
  if (total == 0) throw ConfigError("perturbation space too large to enumerate");
  check_soundness_inputs(config.s, config.S, config.c, f);

  // Acceptance depends only on the root count, so tally root counts.
  std::vector<std::uint64_t> tally_v(config.s + 1), tally_u(config.s + 1);
  std::vector<Fe> delta(config.s);
  for (std::uint64_t idx = 1; idx < total; ++idx) {
    std::uint64_t rest = idx;
    for (auto& e : delta) {
      e = Fe{rest % q};
      rest /= q;
    }
    if (support != Support::u) ++tally_v[root_count(delta, config.S, f, Side::v)];
    if (support != Support::v) ++tally_u[root_count(delta, config.S, f, Side::u)];
  }
  auto sum = [&](const std::vector<std::uint64_t>& tally) {
    mpq_class acc = 0;
    for (std::uint64_t t = 0; t < tally.size(); ++t) {
      acc += probability_for_roots(t, config.S.size(), config.c) * mpz_class(static_cast<unsigned long>(tally[t]));
    }
    return acc;
  };
  const mpz_class nonzero = mpz_class(static_cast<unsigned long>(total)) - 1;
  mpq_class p;
  switch (support) {
    case Support::v: p = sum(tally_v) / nonzero; break;
    case Support::u: p = sum(tally_u) / nonzero; break;
    case Support::both: {
      const mpz_class all = mpz_class(static_cast<unsigned long>(total)) * total;
      p = ((1 + sum(tally_v)) * (1 + sum(tally_u)) - 1) / mpq_class(all - 1);
      break;
    }
  }
  p.canonicalize();
  return p;
}

bool DetectionResult::within_3sigma() const { return std::abs(rate - exact_mean.get_d()) <= 3 * sigma + 1e-12; }

namespace {

// Acceptance of a perturbation depends only on the root count of each side,
// so trials are tallied per (t_v, t_u) with index 0 for an unperturbed side.
struct TrialTally {
  std::uint64_t accepted = 0;
  std::vector<std::uint64_t> by_roots;
};

std::vector<Fe> random_vector(const Field& f, std::size_t n, Rng& rng) {
  std::vector<Fe> v(n);
  for (auto& e : v) e = f.sample(rng);
  return v;
}

std::vector<Fe> crafted(const ProtocolConfig& config, std::uint64_t t, Side side, Rng& rng) {
  const Field& f = config.field;
  std::vector<Fe> pool = config.S;
  std::vector<Fe> roots;
  for (std::uint64_t i = 0; i < t; ++i) {
    const auto j = i + rng.uniform(pool.size() - i);
    std::swap(pool[i], pool[j]);
    roots.push_back(side == Side::v ? f.pow(pool[i], config.s) : pool[i]);
  }
  auto coeffs = poly_from_roots(f, roots);
  coeffs.resize(config.s, Fe{0});
  return coeffs;
}

std::vector<Fe> diff(const Field& f, const std::vector<Fe>& a, const std::vector<Fe>& b) {
  std::vector<Fe> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f.sub(a[i], b[i]);
  return out;
}

std::vector<Fe> plus(const Field& f, const std::vector<Fe>& a, const std::vector<Fe>& b) {
  std::vector<Fe> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f.add(a[i], b[i]);
  return out;
}

}  // namespace

DetectionResult monte_carlo_detection(const Adversary& adversary, const ProtocolConfig& config,
                                      std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1000) throw ConfigError("at least 1000 trials are required");
  const std::uint64_t t_roots = adversary.roots == 0 ? config.s - 1 : adversary.roots;
  if (adversary.kind == AdversaryKind::root_crafting && (t_roots >= config.s || t_roots > config.S.size())) {
    throw ConfigError("root-crafting subset must have fewer than s elements");
  }
  if (adversary.kind == AdversaryKind::replay && config.xi.v == 0) throw ConfigError("replay needs two legal points");

  const Field& f = config.field;
  Rng poly_rng = Rng::derive(seed, "polynomial");
  Rng prover_rng = Rng::derive(seed, "prover");
  const Polynomial poly = Polynomial::random(f, config.d, poly_rng);
  const ProverKey kp = keygen_prover(poly, config, prover_rng);
  const Matrix a = to_matrix(poly, config.s);
  const Matrix h = add(a, kp.B);

  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    TrialTally tally{0, std::vector<std::uint64_t>((config.s + 1) * (config.s + 1))};
    for (std::uint64_t i = begin; i < end; ++i) {
      Rng rng = Rng::derive(seed, "trial", i);
      const VerifierKey kv = keygen_verifier(config, rng);
      const Fe x{rng.uniform(config.xi.v + 1)};
      const EvalResponse honest = eval_with_sum(x, h, kp.B, config);

      std::vector<Fe> dv(config.s, Fe{0}), du(config.s, Fe{0});
      switch (adversary.kind) {
        case AdversaryKind::random_perturbation:
          do {
            if (adversary.support != Support::u) dv = random_vector(f, config.s, rng);
            if (adversary.support != Support::v) du = random_vector(f, config.s, rng);
          } while (is_zero(dv) && is_zero(du));
          break;
        case AdversaryKind::root_crafting:
          if (adversary.support != Support::u) dv = crafted(config, t_roots, Side::v, rng);
          if (adversary.support != Support::v) du = crafted(config, t_roots, Side::u, rng);
          break;
        case AdversaryKind::replay:
          do {
            Fe other{rng.uniform(config.xi.v)};
            if (other.v >= x.v) other.v += 1;
            const EvalResponse old = eval_with_sum(other, h, kp.B, config);
            dv = diff(f, old.v, honest.v);
            du = diff(f, old.u, honest.u);
          } while (is_zero(dv) && is_zero(du));
          break;
      }

      const EvalResponse forged{plus(f, honest.v, dv), plus(f, honest.u, du)};
      const VerificationKey vk = expected_verification_key(a, kv, kp, config);
      if (verify_with(x, forged, vk, lambda_matrix(config, kv), theta_matrix(config, kv), config).accept) {
        ++tally.accepted;
      }
      const std::size_t tv = is_zero(dv) ? 0 : 1 + root_count(dv, config.S, f, Side::v);
      const std::size_t tu = is_zero(du) ? 0 : 1 + root_count(du, config.S, f, Side::u);
      ++tally.by_roots[tv * (config.s + 1) + tu];
    }
    return tally;
  };

  const std::uint64_t workers = std::clamp<std::uint64_t>(std::thread::hardware_concurrency(), 1, 16);
  std::vector<std::future<TrialTally>> parts;
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t begin = trials * w / workers;
    const std::uint64_t end = trials * (w + 1) / workers;
    parts.push_back(std::async(std::launch::async, run_range, begin, end));
  }
  std::uint64_t accepted = 0;
  std::vector<std::uint64_t> by_roots((config.s + 1) * (config.s + 1));
  for (auto& part : parts) {
    auto t = part.get();
    accepted += t.accepted;
    for (std::size_t k = 0; k < by_roots.size(); ++k) by_roots[k] += t.by_roots[k];
  }
  mpq_class exact_sum = 0, variance_sum = 0;
  for (std::size_t k = 0; k < by_roots.size(); ++k) {
    if (by_roots[k] == 0) continue;
    const std::size_t tv = k / (config.s + 1), tu = k % (config.s + 1);
    mpq_class p = 1;
    if (tv > 0) p *= probability_for_roots(tv - 1, config.S.size(), config.c);
    if (tu > 0) p *= probability_for_roots(tu - 1, config.S.size(), config.c);
    const mpz_class n(static_cast<unsigned long>(by_roots[k]));
    exact_sum += p * n;
    variance_sum += p * (1 - p) * n;
  }

  DetectionResult r;
  r.trials = trials;
  r.accepted = accepted;
  r.rate = static_cast<double>(accepted) / static_cast<double>(trials);
  r.exact_mean = exact_sum / mpz_class(static_cast<unsigned long>(trials));
  r.exact_mean.canonicalize();
  r.sigma = std::sqrt(variance_sum.get_d()) / static_cast<double>(trials);
  return r;
}

BenchRow bench_point(std::uint64_t d, std::uint64_t c, std::uint64_t rounds, std::uint64_t seed) {
  const std::uint64_t s = exact_sqrt(d);
  if (s == 0) throw ConfigError("d must be a perfect square");
  const std::uint64_t r = 2;
  const std::uint64_t q = suggest_prime_modulus(s, std::uint64_t{1} << 40);
  if (q == 0) throw ConfigError("no prime modulus with gcd(s, q-1) = 1; s must be odd");
  const ProtocolConfig config = ProtocolConfig::make(Field::prime(q), d, r, c, Fe{q - 1 - r * (s - 1)});

  Rng poly_rng = Rng::derive(seed, "polynomial");
  Rng prover_rng = Rng::derive(seed, "prover");
  Rng verifier_rng = Rng::derive(seed, "verifier");
  const Polynomial poly = Polynomial::random(config.field, d, poly_rng);
  const ProverKey kp = keygen_prover(poly, config, prover_rng);
  const VerifierKey kv = keygen_verifier(config, verifier_rng);
  const VerificationKey vk = expected_verification_key(to_matrix(poly, s), kv, kp, config);
  Prover prover(config, poly, kp);
  Verifier verifier(config, kv, vk);

  BenchRow row{d, s, q, 0, 0, 0, 0};
  using clock = std::chrono::steady_clock;
  for (std::uint64_t i = 0; i < rounds; ++i) {
    const Fe x{verifier_rng.uniform(config.xi.v + 1)};
    reset_op_count();
    const auto t0 = clock::now();
    const EvalResponse resp = prover.answer(x);
    const auto t1 = clock::now();
    row.prover_ops += static_cast<double>(op_count().total());
    reset_op_count();
    const auto t2 = clock::now();
    const QueryOutcome out = verifier.check(x, resp);
    const auto t3 = clock::now();
    row.verifier_ops += static_cast<double>(op_count().total());
    if (!out.accepted) throw Error("honest response rejected during bench: " + out.diagnostic);
    row.prover_seconds += std::chrono::duration<double>(t1 - t0).count();
    row.verifier_seconds += std::chrono::duration<double>(t3 - t2).count();
  }
  const auto n = static_cast<double>(rounds);
  row.prover_ops /= n;
  row.verifier_ops /= n;
  row.prover_seconds /= n;
  row.verifier_seconds /= n;
  return row;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::string out = "check,params,bound,measured,verdict\n";
  for (const auto& r : rows) {
    out += csv_field(r.check) + "," + csv_field(r.params) + "," + csv_field(r.bound) + "," + csv_field(r.measured) +
           "," + (r.pass ? "pass" : "fail") + "\n";
  }
  return out;
}

std::string summary(const std::vector<ReportRow>& rows) {
  std::size_t passed = 0;
  std::string failures;
  for (const auto& r : rows) {
    if (r.pass) {
      ++passed;
    } else {
      failures += "  FAIL " + r.check + " [" + r.params + "]: bound " + r.bound + ", measured " + r.measured + "\n";
    }
  }
  return std::to_string(passed) + "/" + std::to_string(rows.size()) + " checks passed\n" + failures;
}

bool all_pass(const std::vector<ReportRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

namespace {

std::string describe(const ProtocolConfig& config) {
  return "q=" + std::to_string(config.field.order()) + ";d=" + std::to_string(config.d) +
         ";r=" + std::to_string(config.r) + ";c=" + std::to_string(config.c);
}

double one_over_rc(const ProtocolConfig& config) { return 1.0 / std::pow(static_cast<double>(config.r), config.c); }

}  // namespace

std::vector<ReportRow> soundness_suite(const SoundnessSuiteOptions& options) {
  const std::vector<ProtocolConfig> configs{
      ProtocolConfig::make(Field::prime(11), 9, 2, 3, Fe{6}),
      ProtocolConfig::make(Field::prime(11), 9, 2, 1, Fe{6}),
      ProtocolConfig::make(Field::prime(13), 25, 2, 3, Fe{4}),
  };
  std::vector<ReportRow> rows;
  std::uint64_t stream = 0;
  for (const auto& config : configs) {
    const std::string params = describe(config);
    const double cap = 2 * one_over_rc(config);
    const mpq_class tight = probability_for_roots(config.s - 1, config.S.size(), config.c);

    for (Side side : {Side::v, Side::u}) {
      // Worst case over every nonzero perturbation.
      const std::uint64_t q = config.field.order();
      const std::uint64_t total = bounded_power(q, config.s, std::uint64_t{1} << 24);
      std::uint64_t worst_t = 0;
      std::vector<Fe> delta(config.s);
      for (std::uint64_t idx = 1; idx < total; ++idx) {
        std::uint64_t rest = idx;
        for (auto& e : delta) {
          e = Fe{rest % q};
          rest /= q;
        }
        worst_t = std::max(worst_t, root_count(delta, config.S, config.field, side));
      }
      const mpq_class worst = probability_for_roots(worst_t, config.S.size(), config.c);
      rows.push_back({std::string("soundness_exact worst case ") + (side == Side::v ? "v" : "u"), params,
                      "<= " + fmt(tight) + " <= 1/r^c", fmt(worst),
                      worst <= tight && worst.get_d() <= one_over_rc(config) + 1e-15});
    }

    for (Support support : {Support::v, Support::u, Support::both}) {
      const Adversary adv{AdversaryKind::random_perturbation, support, 0};
      const auto res = monte_carlo_detection(adv, config, options.trials, Rng::derive(options.seed, "soundness", stream++).fork_seed());
      const mpq_class oracle = random_perturbation_exact(config, support);
      const double sigma = std::sqrt(oracle.get_d() * (1 - oracle.get_d()) / static_cast<double>(res.trials));
      const bool ok = res.rate <= cap && res.within_3sigma() &&
                      std::abs(res.rate - oracle.get_d()) <= 3 * sigma + 1e-12;
      rows.push_back({adversary_name(adv), params + ";trials=" + std::to_string(res.trials),
                      "rate <= 2/r^c = " + fmt(cap) + "; within 3 sigma of " + fmt(oracle),
                      fmt(res.rate) + " (" + std::to_string(res.accepted) + " accepted)", ok});
    }

    for (Side side : {Side::v, Side::u}) {
      Rng rng = Rng::derive(options.seed, "crafted", stream);
      const auto delta = crafted(config, config.s - 1, side, rng);
      const mpq_class p = soundness_exact(delta, config.S, config.c, config.field, side);
      const Adversary adv{AdversaryKind::root_crafting, side == Side::v ? Support::v : Support::u, 0};
      const auto res = monte_carlo_detection(adv, config, options.trials, Rng::derive(options.seed, "soundness", stream++).fork_seed());
      const bool ok = p == tight && res.exact_mean == tight && res.within_3sigma() && res.rate <= cap;
      rows.push_back({adversary_name(adv), params + ";t=s-1;trials=" + std::to_string(res.trials),
                      "exact = C(s-1,c)/C(|S|,c) = " + fmt(tight),
                      "exact " + fmt(p) + "; rate " + fmt(res.rate), ok});
    }

    const Adversary replay{AdversaryKind::replay, Support::both, 0};
    const auto res = monte_carlo_detection(replay, config, options.trials, Rng::derive(options.seed, "soundness", stream++).fork_seed());
    rows.push_back({adversary_name(replay), params + ";trials=" + std::to_string(res.trials),
                    "rate <= 2/r^c = " + fmt(cap) + "; within 3 sigma of " + fmt(res.exact_mean),
                    fmt(res.rate), res.rate <= cap && res.within_3sigma()});
  }
  return rows;
}

std::vector<ReportRow> privacy_suite(const PrivacySuiteOptions& options) {
  std::vector<ReportRow> rows;
  for (std::uint64_t c : {1, 2}) {
    const auto config = ProtocolConfig::make(Field::prime(11), 9, 2, c, Fe{6});
    for (std::uint64_t m : {1, 2, 3}) {
      const std::string params = describe(config) + ";m=" + std::to_string(m);
      Rng rng = Rng::derive(options.seed, "privacy", c * 10 + m);
      std::uint64_t min_h = config.d + 1;
      std::uint64_t failures = 0;
      std::int64_t bound = 0;
      for (std::uint64_t i = 0; i < options.instances; ++i) {
        const auto pc = random_privacy_case(config, m, rng);
        min_h = std::min(min_h, pc.entropy);
        bound = pc.bound;
        if (!pc.pass()) ++failures;
      }
      rows.push_back({"privacy random legal", params + ";instances=" + std::to_string(options.instances),
                      ">= d-(m+c)^2 = " + std::to_string(bound), "min " + std::to_string(min_h), failures == 0});

      const auto wc = worst_case_queries(config, m);
      rows.push_back({"privacy worst-case sweep", params + ";instances=" + std::to_string(wc.instances),
                      ">= " + std::to_string(wc.worst.bound), "min " + std::to_string(wc.worst.entropy),
                      wc.worst.pass()});
    }
  }

  {
    const auto config = ProtocolConfig::make(Field::prime(11), 9, 2, 1, Fe{6});
    const auto rep = attack_demo_unrestricted(config);
    rows.push_back({"attack unrestricted lambda=e1", describe(config) + ";x=0",
                    "<= d-s = " + std::to_string(rep.attacked_ceiling), std::to_string(rep.attacked_entropy),
                    static_cast<std::int64_t>(rep.attacked_entropy) <= rep.attacked_ceiling});
    rows.push_back({"attack legal key", describe(config) + ";x=0",
                    ">= d-(m+c)^2 = " + std::to_string(rep.legal_floor), std::to_string(rep.legal_entropy),
                    static_cast<std::int64_t>(rep.legal_entropy) >= rep.legal_floor});
  }

  for (std::uint64_t c : {1, 2}) {
    const auto config = ProtocolConfig::make(Field::prime(11), 9, 2, c, Fe{6});
    for (std::uint64_t m = 0; c + m <= config.s; ++m) {
      const auto rep = baseline_leakage(config, m);
      bool ok = rep.pass();
      std::string bound = "basic = d-(c+m)s+cm = " + std::to_string(rep.basic_expected);
      if (m == 0) {
        const std::int64_t masked_floor = signed_d(config.d) - square(c);
        ok = ok && static_cast<std::int64_t>(rep.basic_entropy) == signed_d(config.d) - static_cast<std::int64_t>(c * config.s) &&
             (c < config.s ? static_cast<std::int64_t>(rep.basic_entropy) < masked_floor : true) &&
             static_cast<std::int64_t>(rep.masked_entropy) >= masked_floor;
        bound += "; < d-c^2 = " + std::to_string(masked_floor) + " <= masked";
      }
      rows.push_back({"baseline basic vs masked", describe(config) + ";m=" + std::to_string(m), bound,
                      "basic " + std::to_string(rep.basic_entropy) + "; masked " + std::to_string(rep.masked_entropy),
                      ok});
    }
  }

  if (options.enumeration) {
    const auto config = ProtocolConfig::make(Field::gf4(), 4, 2, 1, Fe{1});
    const Field& f = config.field;
    std::vector<View> views;
    views.push_back(View{Matrix(f, 0, 2), Matrix(f, 0, 2), {}, true});
    for (std::uint64_t c : {1, 2}) {
      std::vector<std::vector<Fe>> keys;
      if (c == 1) {
        for (Fe y : config.S) keys.push_back({y});
      } else {
        keys.push_back({config.S[0], config.S[1]});
        keys.push_back({config.S[1], config.S[0]});
      }
      for (const auto& lam : keys) {
        for (const auto& th : keys) {
          for (const auto& qs : std::vector<std::vector<Fe>>{{}, {Fe{0}}, {Fe{1}}, {Fe{0}, Fe{1}}}) {
            views.push_back(legal_view(config, VerifierKey{lam, th}, qs));
          }
        }
      }
    }
    View degenerate = legal_view(config, VerifierKey{{config.S[0]}, {config.S[1]}}, {Fe{1}});
    degenerate.lambda = Matrix(f, 1, 2);
    views.push_back(degenerate);
    View basic = legal_view(config, VerifierKey{{config.S[0]}, {config.S[0]}}, {Fe{0}});
    basic.masked = false;
    views.push_back(basic);
    views.push_back(attack_demo_unrestricted(config).attacked);

    std::size_t agree = 0;
    double worst_gap = 0;
    for (const auto& view : views) {
      const double enumerated = privacy_enumeration_oracle(view);
      const double gap = std::abs(enumerated - static_cast<double>(privacy_rank_oracle(view)));
      worst_gap = std::max(worst_gap, gap);
      if (gap < 1e-9) ++agree;
    }
    rows.push_back({"rank oracle vs enumeration", "GF(4);d=4;s=2;views=" + std::to_string(views.size()) + ";pairs=65536",
                    "equal on every view", std::to_string(agree) + " agree; max gap " + fmt(worst_gap),
                    agree == views.size()});
  }
  return rows;
}

std::vector<ReportRow> lemma_suite(const LemmaSuiteOptions& options) {
  std::vector<ReportRow> rows;
  const Field f11 = Field::prime(11);
  Rng rng = Rng::derive(options.seed, "lemmas");

  std::uint64_t pass1 = 0, pass3 = 0;
  for (std::uint64_t i = 0; i < options.instances; ++i) {
    const std::size_t s = 1 + rng.uniform(6);
    const std::size_t c = 1 + rng.uniform(s);
    const std::size_t d = 1 + rng.uniform(s);
    const Matrix f = random_full_rank(f11, c, s, rng);
    if (lemma1_check(f, random_full_rank(f11, s, d, rng)).pass()) ++pass1;
    if (lemma3_check(f, random_full_rank(f11, d, s, rng)).pass()) ++pass3;
  }
  const std::string n = std::to_string(options.instances);
  rows.push_back({"lemma1 random", "GF(11);s<=6;instances=" + n, "H(FE|EG) >= cs-cd", std::to_string(pass1) + "/" + n,
                  pass1 == options.instances});
  rows.push_back({"lemma3 random", "GF(11);s<=6;instances=" + n, "rank >= (c+d)s-cd", std::to_string(pass3) + "/" + n,
                  pass3 == options.instances});

  for (const auto& [field, s] : std::vector<std::pair<Field, std::size_t>>{
           {Field::binary_extension(1), 2},
           {Field::binary_extension(1), 3},
           {Field::prime(3), 2}}) {
    const auto e1 = exhaustive_lemma1(field, s);
    const auto e3 = exhaustive_lemma3(field, s);
    const std::string params = "GF(" + std::to_string(field.order()) + ");s=" + std::to_string(s);
    rows.push_back({"lemma1 exhaustive", params, "all pass",
                    std::to_string(e1.passed) + "/" + std::to_string(e1.cases), e1.passed == e1.cases});
    rows.push_back({"lemma3 exhaustive", params, "all pass",
                    std::to_string(e3.passed) + "/" + std::to_string(e3.cases), e3.passed == e3.cases});
  }

  {
    Rng shape = Rng::derive(options.seed, "lemma3-shape");
    const auto r = lemma3_check(random_full_rank(f11, 3, 4, shape), random_full_rank(f11, 2, 4, shape));
    rows.push_back({"lemma3 illustrated shape", "GF(11);s=4;c=3;d=2", ">= 14", std::to_string(r.value),
                    r.bound == 14 && r.pass()});
  }
  {
    const std::size_t s = 5, c = 3, d = 2;
    Matrix f(f11, c, s), g(f11, s, d);
    for (std::size_t i = 0; i < c; ++i) f.at(i, i) = f11.one();
    for (std::size_t j = 0; j < d; ++j) g.at(j, j) = f11.one();
    const auto r = lemma1_check(f, g);
    rows.push_back({"lemma1 coordinate-aligned", "GF(11);s=5;c=3;d=2", "= cs-cd = " + std::to_string(r.bound),
                    std::to_string(r.value), r.value == r.bound});
  }
  return rows;
}

}  // namespace infocommit
