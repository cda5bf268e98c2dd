#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "ndsub/nucleotide.hpp"
#include "ndsub/params.hpp"

namespace ndsub {

/// All simulation randomness comes from a 64-bit Mersenne Twister. Replicate k
/// of a run seeded with s uses make_rng(s, k); the two words are fed through
/// std::seed_seq so that neighbouring streams are decorrelated.
using Rng = std::mt19937_64;
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

struct AlignedPair {
  Sequence left;
  Sequence right;
  Mode mode = Mode::Ancestor;

  std::size_t size() const { return left.size(); }
  /// Throws std::invalid_argument if the two sequences differ in length.
  void validate() const;
};

struct ExperimentSpec {
  SubstitutionParams params;
  std::size_t n = 10000;
  double t = 0.0;
  Mode mode = Mode::Ancestor;
  double burn_in = 5.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// 5 for Jukes-Cantor + CpG; otherwise 10 / (spectral gap of the nine-state chain).
double default_burn_in(const SubstitutionParams& params);

/// Exact simulation of the whole-sequence process on a circle.
///
/// Uses uniformization: proposals arrive at rate N * max_total_site_rate, pick a
/// site uniformly, and are accepted into a concrete target with probability
/// site_rate / bound. The accepted jumps form an exact realization of the chain.
class Simulator {
 public:
  explicit Simulator(const SubstitutionParams& params);

  const SubstitutionParams& params() const { return params_; }
  double rate_bound() const { return bound_; }

  /// Uniform i.i.d. start, then `burn_in` units of evolution.
  Sequence sample_stationary(std::size_t n, double burn_in, Rng& rng) const;

  void evolve_in_place(Sequence& seq, double t, Rng& rng) const;
  Sequence evolve(Sequence seq, double t, Rng& rng) const;

  AlignedPair experiment(const ExperimentSpec& spec, Rng& rng) const;

 private:
  struct Neighbourhood {
    std::array<double, 3> cumulative{};
    std::array<Nucleotide, 3> target{};
  };

  SubstitutionParams params_;
  double bound_ = 0.0;
  std::array<Neighbourhood, 64> table_{};
};

Sequence sample_stationary(const SubstitutionParams& params, std::size_t n, double burn_in, Rng& rng);
Sequence evolve(const Sequence& seq, const SubstitutionParams& params, double t, Rng& rng);

/// left = stationary ancestor, right = ancestor evolved for spec.t.
AlignedPair experiment_ancestor(const ExperimentSpec& spec, Rng& rng);
/// left and right are two independent spec.t evolutions of one stationary ancestor.
AlignedPair experiment_divergence(const ExperimentSpec& spec, Rng& rng);

/// Dispatches on spec.mode using make_rng(spec.seed, stream).
AlignedPair run_experiment(const ExperimentSpec& spec, std::uint64_t stream = 0);

}  // namespace ndsub
