#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "infocommit/protocol.hpp"

namespace infocommit {

enum class RowTag { gamma, omega, v, u, custom };

// Linear functionals on vec(A) || vec(B), both row-major s x s.
class ObservationSystem {
 public:
  ObservationSystem(Field field, std::size_t d) : field_(std::move(field)), d_(d) {}

  const Field& field() const { return field_; }
  std::size_t d() const { return d_; }
  std::size_t size() const { return tags_.size(); }
  const std::vector<RowTag>& tags() const { return tags_; }

  // Either part may be empty, meaning all zero.
  void add_row(std::span<const Fe> a_part, std::span<const Fe> b_part, RowTag tag);

  Matrix full() const;
  Matrix a_block() const;
  Matrix b_block() const;

 private:
  Field field_;
  std::size_t d_;
  std::vector<Fe> rows_;
  std::vector<RowTag> tags_;
};

// What the verifier sees: the commitment under (lambda, theta) and one
// response per query. Unmasked views model the basic scheme: Gamma = Lambda A,
// v = A low(x)^T, and no Omega or u.
struct View {
  Matrix lambda;  // c x s
  Matrix theta;   // c x s
  std::vector<Fe> queries;
  bool masked = true;
};

View legal_view(const ProtocolConfig& config, const VerifierKey& kv, std::vector<Fe> queries);

ObservationSystem observation_system(const View& view);

// H_q(A | observations) for uniform (A, B): d + rank(M_B) - rank(M).
std::uint64_t conditional_entropy(const ObservationSystem& system);
std::uint64_t privacy_rank_oracle(const View& view);

// Largest instance the enumeration oracle accepts: q^(2d) <= 2^20.
constexpr std::uint64_t kEnumerationLimit = std::uint64_t{1} << 20;

// H_q(A | Gamma, Omega, v, u) by enumerating every (A, B) and grouping by the
// observed values. ConfigError for instances above the limit.
double privacy_enumeration_oracle(const View& view);

struct PrivacyCase {
  VerifierKey kv;
  std::vector<Fe> queries;
  std::uint64_t entropy = 0;
  std::int64_t bound = 0;  // d - (m + c)^2
  bool pass() const { return static_cast<std::int64_t>(entropy) >= bound; }
};

// Random legal keys and m distinct legal queries.
PrivacyCase random_privacy_case(const ProtocolConfig& config, std::uint64_t m, Rng& rng);

struct WorstCase {
  PrivacyCase worst;
  std::uint64_t instances = 0;
};

// Minimum entropy over every pair of key sets from S and every m-subset of
// the legal queries. Only practical at tiny sizes.
WorstCase worst_case_queries(const ProtocolConfig& config, std::uint64_t m);

struct AttackReport {
  std::uint64_t attacked_entropy = 0;
  std::int64_t attacked_ceiling = 0;  // d - s
  std::uint64_t legal_entropy = 0;
  std::int64_t legal_floor = 0;  // d - (1 + 1)^2
  View attacked;
  View legal;
  bool pass() const {
    return static_cast<std::int64_t>(attacked_entropy) <= attacked_ceiling &&
           static_cast<std::int64_t>(legal_entropy) >= legal_floor;
  }
};

// Lambda = e_1 with one query at x = 0, next to a legal single-key view with
// the same query.
AttackReport attack_demo_unrestricted(const ProtocolConfig& config);

struct BaselineReport {
  std::uint64_t m = 0;
  std::uint64_t basic_entropy = 0;
  std::int64_t basic_expected = 0;  // d - (c + m)s + cm
  std::uint64_t masked_entropy = 0;
  std::int64_t masked_floor = 0;  // d - (m + c)^2
  bool pass() const {
    return static_cast<std::int64_t>(basic_entropy) == basic_expected &&
           static_cast<std::int64_t>(masked_entropy) >= masked_floor;
  }
};

// Basic and masked scheme under the same legal keys and the first m legal
// queries; requires c + m <= s.
BaselineReport baseline_leakage(const ProtocolConfig& config, std::uint64_t m);

struct LemmaResult {
  std::int64_t value = 0;
  std::int64_t bound = 0;
  bool pass() const { return value >= bound; }
};

// H_q(FE | EG) for uniform s x s E; F is c x s, G is s x d, both full rank.
LemmaResult lemma1_check(const Matrix& f, const Matrix& g);
// rank of (I kron F) stacked on (G kron I); F is c x s, G is d x s.
LemmaResult lemma3_check(const Matrix& f, const Matrix& g);

struct ExhaustiveLemmaResult {
  std::uint64_t cases = 0;
  std::uint64_t passed = 0;
};

// Every full-rank F and G of every admissible shape over the field.
ExhaustiveLemmaResult exhaustive_lemma1(const Field& field, std::size_t s);
ExhaustiveLemmaResult exhaustive_lemma3(const Field& field, std::size_t s);

enum class Side { v, u };

// Acceptance probability over uniform distinct key points of a response
// perturbed by delta on one side. On the v side the roots of the delta
// polynomial are compared against y^s, on the u side against y.
mpq_class soundness_exact(std::span<const Fe> delta, const std::vector<Fe>& S, std::uint64_t c,
                          const Field& field, Side side = Side::v);
// Both sides; a zero side passes with probability one.
mpq_class soundness_exact(std::span<const Fe> delta_v, std::span<const Fe> delta_u, const std::vector<Fe>& S,
                          std::uint64_t c, const Field& field);

// Coefficients of prod (y - root), lowest degree first.
std::vector<Fe> poly_from_roots(const Field& field, std::span<const Fe> roots);

enum class AdversaryKind { random_perturbation, root_crafting, replay };
enum class Support { v, u, both };

struct Adversary {
  AdversaryKind kind = AdversaryKind::random_perturbation;
  Support support = Support::v;
  // Root-crafting subset size; 0 means s - 1.
  std::uint64_t roots = 0;
};

std::string adversary_name(const Adversary& adversary);

// Exact acceptance of random perturbation averaged over its delta
// distribution (uniform over nonzero perturbations of the chosen support).
mpq_class random_perturbation_exact(const ProtocolConfig& config, Support support);

struct DetectionResult {
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  double rate = 0;
  // Mean exact acceptance of the deltas the adversary actually emitted.
  mpq_class exact_mean;
  // Binomial standard deviation of the rate around exact_mean.
  double sigma = 0;
  bool within_3sigma() const;
};

// Fresh verifier key and query per trial; the adversary never sees the key.
// ConfigError for fewer than 1000 trials.
DetectionResult monte_carlo_detection(const Adversary& adversary, const ProtocolConfig& config,
                                      std::uint64_t trials, std::uint64_t seed);

struct BenchRow {
  std::uint64_t d = 0;
  std::uint64_t s = 0;
  std::uint64_t q = 0;
  double prover_ops = 0;    // per round
  double verifier_ops = 0;  // per round
  double prover_seconds = 0;
  double verifier_seconds = 0;
};

// Evaluation-phase cost per round at degree bound d (an odd square).
BenchRow bench_point(std::uint64_t d, std::uint64_t c, std::uint64_t rounds, std::uint64_t seed);

struct ReportRow {
  std::string check;
  std::string params;
  std::string bound;
  std::string measured;
  bool pass = false;
};

std::string to_csv(const std::vector<ReportRow>& rows);
std::string summary(const std::vector<ReportRow>& rows);
bool all_pass(const std::vector<ReportRow>& rows);

struct SoundnessSuiteOptions {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
};
std::vector<ReportRow> soundness_suite(const SoundnessSuiteOptions& options);

struct PrivacySuiteOptions {
  std::uint64_t instances = 1000;
  std::uint64_t seed = 1;
  bool enumeration = true;
};
std::vector<ReportRow> privacy_suite(const PrivacySuiteOptions& options);

struct LemmaSuiteOptions {
  std::uint64_t instances = 1000;
  std::uint64_t seed = 1;
};
std::vector<ReportRow> lemma_suite(const LemmaSuiteOptions& options);

}  // namespace infocommit
