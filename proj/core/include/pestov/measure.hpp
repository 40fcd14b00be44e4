#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pestov/derive.hpp"
#include "pestov/rng.hpp"

namespace pestov {

/// Lazy description of a reproducible Liouville sample stream; samples are
/// addressed by index (counter-based RNG), so identical (model, seed, count)
/// reproduce identical samples bit-for-bit for any worker count.
struct SampleStream {
  MetricModel model;
  std::uint64_t seed = 0;
  std::int64_t count = 0;
};

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::int64_t count = 0;
};

/// Haar-distributed rotation: QR of a Gaussian matrix with the R diagonal
/// sign-fixed, determinant corrected to +1.
MatD haar_rotation(int n, Philox& rng);

/// Liouville sampling is defined on the closed models only:
/// FlatTorus (product of Lebesgue and Haar) and RoundSphere (Haar on the
/// rotation group of the ambient space). Normalized to probability.
SampleStream sample_liouville(const MetricModel& m, std::uint64_t seed,
                              std::int64_t count);
FramePoint liouville_sample(const MetricModel& m, std::uint64_t seed,
                            std::int64_t index);
std::vector<FramePoint> take(const SampleStream& s, std::int64_t k);

/// Uniform-in-chart frame point for pointwise sweeps; defined for every
/// model (hyperbolic sampling stays within |x| <= kBallSampleRadius). Not
/// the Liouville measure on the non-closed models.
FramePoint sweep_point(const MetricModel& m, std::uint64_t seed,
                       std::int64_t index);

/// One-pass Monte Carlo estimates of several scalar functionals of one
/// shared sample stream. The reduction is chunked (chunk = 2^16) and
/// combined in chunk order, so results are bit-identical for any worker
/// count. Throws DataError (naming the sample) on non-finite values.
using SampleFunctional =
    std::function<void(const FramePoint&, std::span<double>)>;
std::vector<McEstimate> mc_multi(const MetricModel& m,
                                 const SampleFunctional& eval, int n_out,
                                 std::uint64_t seed, std::int64_t count,
                                 int workers = 1);

McEstimate integrate(const MetricModel& m, const ScalarField& f,
                     std::uint64_t seed, std::int64_t count, int workers = 1);

McEstimate l2_inner(const MetricModel& m, const ScalarField& f,
                    const ScalarField& g, std::uint64_t seed,
                    std::int64_t count, int workers = 1);

McEstimate l2_inner_2form(const MetricModel& m, const TwoFormField& F,
                          const TwoFormField& G, std::uint64_t seed,
                          std::int64_t count, int workers = 1);

inline constexpr std::int64_t kMcChunk = 1 << 16;

}  // namespace pestov
