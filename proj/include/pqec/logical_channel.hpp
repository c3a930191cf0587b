// Extraction of the effective logical Pauli channel of one QEC round:
// enumerate (or sample) physical error patterns, decode, apply the recovery
// policy, and classify the residual by stabilizer-coset membership.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pqec/channel.hpp"
#include "pqec/errors.hpp"
#include "pqec/numerics.hpp"
#include "pqec/pauli.hpp"
#include "pqec/surface_code.hpp"

namespace pqec {

struct EstimationMethod {
  enum class Kind { exact_enumeration, monte_carlo } kind = Kind::exact_enumeration;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  static EstimationMethod exact() { return {Kind::exact_enumeration, 0, 0}; }
  static EstimationMethod monte_carlo(std::uint64_t samples, std::uint64_t seed) {
    return {Kind::monte_carlo, samples, seed};
  }
};

// A modification of the baseline decoder: an appended logical Pauli frame
// and optionally a deliberate coset flip on selected joint syndromes.
struct RecoveryPolicy {
  std::string name = "baseline";
  int frame = 0;  // Pauli index 0..3 appended after recovery

  struct CosetFlip {
    std::uint32_t x_syndrome = 0;
    std::uint32_t z_syndrome = 0;
    int logical = 0;  // extra logical Pauli applied when the syndrome matches
  };
  std::vector<CosetFlip> flips;

  static RecoveryPolicy baseline() { return {}; }
  static RecoveryPolicy frame_policy(int pauli_index) {
    static const char* names[] = {"frame_I", "frame_X", "frame_Y", "frame_Z"};
    RecoveryPolicy p;
    p.name = names[pauli_index & 3];
    p.frame = pauli_index & 3;
    return p;
  }
  static std::vector<RecoveryPolicy> all_frames() {
    return {frame_policy(0), frame_policy(1), frame_policy(2), frame_policy(3)};
  }
};

struct LogicalRoundChannel {
  int distance = 0;
  NoiseModel noise;
  EstimationMethod method;
  std::string policy = "baseline";
  PauliChannel pauli_probs = PauliChannel::identity(1);
  std::vector<double> standard_errors = {0, 0, 0, 0};  // I, X, Y, Z (zero for exact)

  Channel to_channel() const { return Channel::from_pauli(pauli_probs); }
};

namespace detail {

// symplectic bits <-> Pauli label index: I=(0,0) X=(1,0) Y=(1,1) Z=(0,1)
inline int bits_to_pauli_index(int bx, int bz) {
  if (bx && bz) return 2;
  if (bx) return 1;
  if (bz) return 3;
  return 0;
}
inline std::pair<int, int> pauli_index_to_bits(int idx) {
  switch (idx & 3) {
    case 1: return {1, 0};
    case 2: return {1, 1};
    case 3: return {0, 1};
    default: return {0, 0};
  }
}

struct RoundOutcome {
  std::uint32_t x_syndrome = 0;
  std::uint32_t z_syndrome = 0;
  int residual_class = 0;  // Pauli index of the raw residual
};

inline RoundOutcome run_round(const SurfaceCode& code, const MwpmDecoder& decoder,
                              const PauliError& error) {
  RoundOutcome out;
  out.x_syndrome = code.x_syndrome(error);
  out.z_syndrome = code.z_syndrome(error);
  const PauliError correction = decoder.decode_syndromes(out.x_syndrome, out.z_syndrome);
  const PauliError residual = error * correction;
  if (!code.commutes_with_all_stabilizers(residual))
    throw numeric_error("extract: residual does not commute with the stabilizer group");
  const auto [bx, bz] = code.logical_class(residual);
  out.residual_class = bits_to_pauli_index(bx, bz);
  return out;
}

inline int apply_policy(const RoundOutcome& outcome, const RecoveryPolicy& policy) {
  auto [bx, bz] = pauli_index_to_bits(outcome.residual_class);
  for (const auto& flip : policy.flips)
    if (flip.x_syndrome == outcome.x_syndrome && flip.z_syndrome == outcome.z_syndrome) {
      const auto [fx, fz] = pauli_index_to_bits(flip.logical);
      bx ^= fx;
      bz ^= fz;
    }
  const auto [fx, fz] = pauli_index_to_bits(policy.frame);
  return bits_to_pauli_index(bx ^ fx, bz ^ fz);
}

// enumerate one sector's 2^(d^2) single-type error patterns, weighting each
// by p^w (1-p)^(n-w); calls visit(error, probability)
template <typename Visit>
void enumerate_sector(int n_data, double p, bool z_type, Visit&& visit) {
  const std::uint64_t total = std::uint64_t(1) << n_data;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    const int w = __builtin_popcountll(bits);
    const double prob = std::pow(p, w) * std::pow(1.0 - p, n_data - w);
    PauliError e;
    if (z_type) e.z_mask = bits;
    else e.x_mask = bits;
    visit(e, prob);
  }
}

}  // namespace detail

// Accumulated per-policy class probabilities with deterministic chunked
// Monte Carlo (counter-based per-chunk seeds merged in chunk order).
class LogicalChannelExtractor {
 public:
  LogicalChannelExtractor(const SurfaceCode& code) : code_(&code), decoder_(code) {}

  std::vector<LogicalRoundChannel> extract(const NoiseModel& noise,
                                           const EstimationMethod& method,
                                           const std::vector<RecoveryPolicy>& policies) const {
    noise.validate();
    if (policies.empty()) throw invalid_parameter_error("extract: empty policy list");
    std::vector<std::array<double, 4>> probs;
    std::vector<std::array<double, 4>> sems;
    if (method.kind == EstimationMethod::Kind::exact_enumeration) {
      if (code_->distance() > 3)
        throw resource_limit_error(
            "extract: exact enumeration is limited to distance 3 (4^9 patterns); "
            "use monte_carlo");
      probs = exact_tallies(noise, policies);
      sems.assign(policies.size(), {0, 0, 0, 0});
    } else {
      std::tie(probs, sems) = monte_carlo_tallies(noise, method, policies);
    }

    std::vector<LogicalRoundChannel> out;
    for (std::size_t i = 0; i < policies.size(); ++i) {
      LogicalRoundChannel ch;
      ch.distance = code_->distance();
      ch.noise = noise;
      ch.method = method;
      ch.policy = policies[i].name;
      const double tol = method.kind == EstimationMethod::Kind::exact_enumeration ? 1e-12 : 1e-9;
      ch.pauli_probs = PauliChannel(
          1, {probs[i][0], probs[i][1], probs[i][2], probs[i][3]}, tol);
      ch.standard_errors.assign(sems[i].begin(), sems[i].end());
      out.push_back(std::move(ch));
    }
    return out;
  }

  const MwpmDecoder& decoder() const { return decoder_; }

 private:
  std::vector<std::array<double, 4>> exact_tallies(
      const NoiseModel& noise, const std::vector<RecoveryPolicy>& policies) const {
    std::vector<std::array<double, 4>> tallies(policies.size(), {0, 0, 0, 0});
    const int n = code_->n_data();
    const double p = noise.p_phys;

    auto accumulate = [&](const PauliError& e, double prob) {
      if (prob == 0.0) return;
      const detail::RoundOutcome outcome = detail::run_round(*code_, decoder_, e);
      for (std::size_t i = 0; i < policies.size(); ++i)
        tallies[i][detail::apply_policy(outcome, policies[i])] += prob;
    };

    switch (noise.kind) {
      case NoiseKind::dephasing_only:
        detail::enumerate_sector(n, p, /*z_type=*/true, accumulate);
        break;
      case NoiseKind::independent_xz: {
        // sectors decouple: tally the raw-residual marginals, combine as a
        // product, then apply the policy frames
        std::array<double, 2> z_flip{0, 0}, x_flip{0, 0};
        detail::enumerate_sector(n, p, true, [&](const PauliError& e, double prob) {
          const auto outcome = detail::run_round(*code_, decoder_, e);
          const auto [bx, bz] = detail::pauli_index_to_bits(outcome.residual_class);
          (void)bx;
          z_flip[bz] += prob;
        });
        detail::enumerate_sector(n, p, false, [&](const PauliError& e, double prob) {
          const auto outcome = detail::run_round(*code_, decoder_, e);
          const auto [bx, bz] = detail::pauli_index_to_bits(outcome.residual_class);
          (void)bz;
          x_flip[bx] += prob;
        });
        for (std::size_t i = 0; i < policies.size(); ++i)
          for (int bx = 0; bx < 2; ++bx)
            for (int bz = 0; bz < 2; ++bz) {
              auto [fx, fz] = detail::pauli_index_to_bits(policies[i].frame);
              // syndrome-conditioned flips are not separable across sectors
              if (!policies[i].flips.empty())
                throw invalid_parameter_error(
                    "extract: coset-flip policies need dephasing_only or depolarizing "
                    "enumeration");
              tallies[i][detail::bits_to_pauli_index(bx ^ fx, bz ^ fz)] +=
                  x_flip[bx] * z_flip[bz];
            }
        break;
      }
      case NoiseKind::depolarizing: {
        const std::uint64_t total = std::uint64_t(1) << (2 * n);  // 4^n patterns
        for (std::uint64_t pattern = 0; pattern < total; ++pattern) {
          PauliError e;
          int weight = 0;
          std::uint64_t bits = pattern;
          for (int q = 0; q < n; ++q, bits >>= 2) {
            switch (bits & 3) {
              case 1: e.x_mask |= qubit_bit(q); ++weight; break;
              case 2: e.x_mask |= qubit_bit(q); e.z_mask |= qubit_bit(q); ++weight; break;
              case 3: e.z_mask |= qubit_bit(q); ++weight; break;
              default: break;
            }
          }
          const double prob = std::pow(p / 3.0, weight) * std::pow(1.0 - p, n - weight);
          accumulate(e, prob);
        }
        break;
      }
    }
    return tallies;
  }

  std::pair<std::vector<std::array<double, 4>>, std::vector<std::array<double, 4>>>
  monte_carlo_tallies(const NoiseModel& noise, const EstimationMethod& method,
                      const std::vector<RecoveryPolicy>& policies) const {
    if (method.samples == 0)
      throw invalid_parameter_error("extract: monte_carlo needs a sample count");
    const int n = code_->n_data();
    std::vector<std::array<std::uint64_t, 4>> counts(policies.size(), {0, 0, 0, 0});

    constexpr std::uint64_t kChunk = 1 << 16;
    const std::uint64_t n_chunks = (method.samples + kChunk - 1) / kChunk;
    for (std::uint64_t chunk = 0; chunk < n_chunks; ++chunk) {
      CounterRng rng(method.seed, chunk);
      const std::uint64_t lo = chunk * kChunk;
      const std::uint64_t hi = std::min(method.samples, lo + kChunk);
      for (std::uint64_t s = lo; s < hi; ++s) {
        PauliError e;
        for (int q = 0; q < n; ++q) {
          const double u = rng.next_double();
          switch (noise.kind) {
            case NoiseKind::dephasing_only:
              if (u < noise.p_phys) e.z_mask |= qubit_bit(q);
              break;
            case NoiseKind::independent_xz: {
              if (u < noise.p_phys) e.x_mask |= qubit_bit(q);
              if (rng.next_double() < noise.p_phys) e.z_mask |= qubit_bit(q);
              break;
            }
            case NoiseKind::depolarizing:
              if (u < noise.p_phys) {
                const double which = u / noise.p_phys;  // uniform given an error
                if (which < 1.0 / 3.0) e.x_mask |= qubit_bit(q);
                else if (which < 2.0 / 3.0) { e.x_mask |= qubit_bit(q); e.z_mask |= qubit_bit(q); }
                else e.z_mask |= qubit_bit(q);
              }
              break;
          }
        }
        const detail::RoundOutcome outcome = detail::run_round(*code_, decoder_, e);
        for (std::size_t i = 0; i < policies.size(); ++i)
          counts[i][detail::apply_policy(outcome, policies[i])] += 1;
      }
    }

    std::vector<std::array<double, 4>> probs(policies.size());
    std::vector<std::array<double, 4>> sems(policies.size());
    const double n_samp = static_cast<double>(method.samples);
    for (std::size_t i = 0; i < policies.size(); ++i)
      for (int c = 0; c < 4; ++c) {
        const double ph = static_cast<double>(counts[i][c]) / n_samp;
        probs[i][c] = ph;
        sems[i][c] = std::sqrt(std::max(0.0, ph * (1.0 - ph) / n_samp));
      }
    return {probs, sems};
  }

  const SurfaceCode* code_;
  MwpmDecoder decoder_;
};

inline LogicalRoundChannel extract_logical_channel(const SurfaceCode& code,
                                                   const NoiseModel& noise,
                                                   const EstimationMethod& method) {
  return LogicalChannelExtractor(code).extract(noise, method, {RecoveryPolicy::baseline()})[0];
}

inline std::vector<LogicalRoundChannel> logical_channel_family(
    const SurfaceCode& code, const NoiseModel& noise, const EstimationMethod& method,
    const std::vector<RecoveryPolicy>& policies) {
  return LogicalChannelExtractor(code).extract(noise, method, policies);
}

}  // namespace pqec
