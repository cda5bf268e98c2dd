#include "ndsub/simulator.hpp"

#include <stdexcept>

#include "ndsub/encoded_chain.hpp"

namespace ndsub {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

void AlignedPair::validate() const {
  if (left.size() != right.size()) {
    throw std::invalid_argument("aligned sequences differ in length (" + std::to_string(left.size()) +
                                " vs " + std::to_string(right.size()) + ")");
  }
  if (left.size() < Sequence::kMinLength) throw std::invalid_argument("alignment needs N >= 3");
}

void ExperimentSpec::validate() const {
  params.validate();
  if (n < Sequence::kMinLength) throw std::invalid_argument("N must be >= 3");
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  if (!(burn_in >= 0.0)) throw std::invalid_argument("burn-in must be >= 0");
}

double default_burn_in(const SubstitutionParams& params) {
  if (params.jc_cpg_r()) return 5.0;
  return 10.0 / spectral_gap(build_nine_state(params));
}

Simulator::Simulator(const SubstitutionParams& params) : params_(params) {
  params_.validate();
  for (auto l : kNucleotides) {
    for (auto x : kNucleotides) {
      for (auto r : kNucleotides) {
        auto& entry = table_[(index(l) * 4 + index(x)) * 4 + index(r)];
        double acc = 0.0;
        std::size_t k = 0;
        for (auto y : kNucleotides) {
          if (y == x) continue;
          acc += site_rate(params_, l, x, r, y);
          entry.cumulative[k] = acc;
          entry.target[k] = y;
          ++k;
        }
        bound_ = std::max(bound_, acc);
      }
    }
  }
}

void Simulator::evolve_in_place(Sequence& seq, double t, Rng& rng) const {
  if (!(t >= 0.0)) throw std::invalid_argument("evolve: t must be >= 0");
  const std::size_t n = seq.size();
  if (t == 0.0 || n == 0) return;
  std::poisson_distribution<std::uint64_t> proposals(static_cast<double>(n) * bound_ * t);
  std::uniform_int_distribution<std::size_t> pick_site(0, n - 1);
  std::uniform_real_distribution<double> pick_rate(0.0, bound_);

  for (auto k = proposals(rng); k > 0; --k) {
    const std::size_t i = pick_site(rng);
    const double u = pick_rate(rng);
    const auto l = seq[i == 0 ? n - 1 : i - 1];
    const auto r = seq[i + 1 == n ? 0 : i + 1];
    const auto& entry = table_[(index(l) * 4 + index(seq[i])) * 4 + index(r)];
    for (std::size_t j = 0; j < 3; ++j) {
      if (u < entry.cumulative[j]) {
        seq[i] = entry.target[j];
        break;
      }
    }
  }
}

Sequence Simulator::evolve(Sequence seq, double t, Rng& rng) const {
  evolve_in_place(seq, t, rng);
  return seq;
}

Sequence Simulator::sample_stationary(std::size_t n, double burn_in, Rng& rng) const {
  if (!(burn_in >= 0.0)) throw std::invalid_argument("burn-in must be >= 0");
  std::uniform_int_distribution<int> letter(0, 3);
  std::vector<Nucleotide> sites(n);
  for (auto& s : sites) s = static_cast<Nucleotide>(letter(rng));
  Sequence seq(std::move(sites));
  evolve_in_place(seq, burn_in, rng);
  return seq;
}

AlignedPair Simulator::experiment(const ExperimentSpec& spec, Rng& rng) const {
  spec.validate();
  auto ancestor = sample_stationary(spec.n, spec.burn_in, rng);
  if (spec.mode == Mode::Ancestor) {
    auto present = evolve(ancestor, spec.t, rng);
    return {std::move(ancestor), std::move(present), Mode::Ancestor};
  }
  auto left = evolve(ancestor, spec.t, rng);
  auto right = evolve(std::move(ancestor), spec.t, rng);
  return {std::move(left), std::move(right), Mode::Divergence};
}

Sequence sample_stationary(const SubstitutionParams& params, std::size_t n, double burn_in, Rng& rng) {
  return Simulator(params).sample_stationary(n, burn_in, rng);
}

Sequence evolve(const Sequence& seq, const SubstitutionParams& params, double t, Rng& rng) {
  return Simulator(params).evolve(seq, t, rng);
}

AlignedPair experiment_ancestor(const ExperimentSpec& spec, Rng& rng) {
  auto s = spec;
  s.mode = Mode::Ancestor;
  return Simulator(spec.params).experiment(s, rng);
}

AlignedPair experiment_divergence(const ExperimentSpec& spec, Rng& rng) {
  auto s = spec;
  s.mode = Mode::Divergence;
  return Simulator(spec.params).experiment(s, rng);
}

AlignedPair run_experiment(const ExperimentSpec& spec, std::uint64_t stream) {
  auto rng = make_rng(spec.seed, stream);
  return Simulator(spec.params).experiment(spec, rng);
}

}  // namespace ndsub
