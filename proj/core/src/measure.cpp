#include "pestov/measure.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace pestov {

MatD haar_rotation(int n, Philox& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.next_gauss();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(n - 1) *= -1.0;
  MatD a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = q(i, j);
  return a;
}

namespace {

FramePoint torus_sample(const MetricModel& m, Philox& rng) {
  const int n = m.dim;
  VecD x(n);
  for (int i = 0; i < n; ++i)
    x[i] = m.params.torus_periods[i] * rng.next_double();
  return FramePoint{{x, 0}, haar_rotation(n, rng)};
}

FramePoint sphere_sample(const MetricModel& m, Philox& rng) {
  const int n = m.dim;
  const double r = m.params.sphere_radius;
  MatD Q = haar_rotation(n + 1, rng);

  // Base point and embedded frame vectors; the last frame vector is negated
  // so that the chart-level rotation has determinant +1 in both charts.
  SVec<double> p(n + 1);
  for (int i = 0; i <= n; ++i) p[i] = r * Q(i, n);
  const int chart = sphere_preferred_chart(m, p);

  SVec<Jet> pv(n + 1);
  for (int i = 0; i <= n; ++i) pv[i] = Jet(p[i]);
  VecD x = values(sphere_chart_coords(m, chart, pv));

  // chart components of each frame vector via the chart differential
  VarScope aux(1);
  const int v = aux.var();
  const Jet eps = Jet::variable(0.0, v);
  MatJ V(n, n);
  for (int col = 0; col < n; ++col) {
    const double sign = col == n - 1 ? -1.0 : 1.0;
    SVec<Jet> ps(n + 1);
    for (int i = 0; i <= n; ++i) ps[i] = Jet(p[i]) + eps * (sign * Q(i, col));
    VecJ xs = sphere_chart_coords(m, chart, ps);
    for (int i = 0; i < n; ++i) V(i, col) = xs[i].extract(v);
  }
  MatJ E = reference_frame_jet(m, chart, lift(x));
  MatD a = values(matmul(inverse(E), V));
  a = polar_project(a);
  return FramePoint{{x, chart}, a};
}

}  // namespace

FramePoint liouville_sample(const MetricModel& m, std::uint64_t seed,
                            std::int64_t index) {
  Philox rng(seed, static_cast<std::uint64_t>(index));
  switch (m.kind) {
    case ModelKind::FlatTorus:
      return torus_sample(m, rng);
    case ModelKind::RoundSphere:
      return sphere_sample(m, rng);
    default:
      throw UnsupportedModelError(
          "Liouville sampling requires a closed model (flat_torus or "
          "round_sphere), got " +
          m.name());
  }
}

SampleStream sample_liouville(const MetricModel& m, std::uint64_t seed,
                              std::int64_t count) {
  if (!m.closed()) {
    throw UnsupportedModelError(
        "Liouville sampling requires a closed model (flat_torus or "
        "round_sphere), got " +
        m.name());
  }
  return SampleStream{m, seed, count};
}

std::vector<FramePoint> take(const SampleStream& s, std::int64_t k) {
  std::vector<FramePoint> out;
  out.reserve(static_cast<size_t>(k));
  for (std::int64_t i = 0; i < k && i < s.count; ++i) {
    out.push_back(liouville_sample(s.model, s.seed, i));
  }
  return out;
}

FramePoint sweep_point(const MetricModel& m, std::uint64_t seed,
                       std::int64_t index) {
  if (m.closed()) return liouville_sample(m, seed, index);
  // hyperbolic models: x uniform in the ball of radius kBallSampleRadius
  Philox rng(seed, static_cast<std::uint64_t>(index));
  const int n = m.dim;
  VecD dir(n);
  double nrm2 = 0.0;
  do {
    nrm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      dir[i] = rng.next_gauss();
      nrm2 += dir[i] * dir[i];
    }
  } while (nrm2 < 1e-12);
  const double radius =
      kBallSampleRadius * std::pow(rng.next_double(), 1.0 / n);
  const double s = radius / std::sqrt(nrm2);
  VecD x(n);
  for (int i = 0; i < n; ++i) x[i] = s * dir[i];
  return FramePoint{{x, 0}, haar_rotation(n, rng)};
}

std::vector<McEstimate> mc_multi(const MetricModel& m,
                                 const SampleFunctional& eval, int n_out,
                                 std::uint64_t seed, std::int64_t count,
                                 int workers) {
  if (count < 1) throw ConfigError("mc_multi: count must be >= 1");
  if (workers < 1) workers = 1;
  const std::int64_t n_chunks = (count + kMcChunk - 1) / kMcChunk;

  struct ChunkAcc {
    std::vector<double> sum;
    std::vector<double> sumsq;
  };
  std::vector<ChunkAcc> partial(static_cast<size_t>(n_chunks));

  std::atomic<std::int64_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto run = [&]() {
    std::vector<double> out(static_cast<size_t>(n_out));
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      const std::int64_t lo = c * kMcChunk;
      const std::int64_t hi = std::min(count, lo + kMcChunk);
      ChunkAcc acc;
      acc.sum.assign(static_cast<size_t>(n_out), 0.0);
      acc.sumsq.assign(static_cast<size_t>(n_out), 0.0);
      try {
        for (std::int64_t i = lo; i < hi; ++i) {
          FramePoint w = liouville_sample(m, seed, i);
          eval(w, std::span<double>(out));
          for (int k = 0; k < n_out; ++k) {
            if (!std::isfinite(out[static_cast<size_t>(k)])) {
              throw DataError("non-finite value at sample " +
                              std::to_string(i) + ", output " +
                              std::to_string(k));
            }
            acc.sum[static_cast<size_t>(k)] += out[static_cast<size_t>(k)];
            acc.sumsq[static_cast<size_t>(k)] +=
                out[static_cast<size_t>(k)] * out[static_cast<size_t>(k)];
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
      partial[static_cast<size_t>(c)] = std::move(acc);
    }
  };

  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // deterministic reduction in chunk order
  std::vector<double> sum(static_cast<size_t>(n_out), 0.0);
  std::vector<double> sumsq(static_cast<size_t>(n_out), 0.0);
  for (const ChunkAcc& acc : partial) {
    for (int k = 0; k < n_out; ++k) {
      sum[static_cast<size_t>(k)] += acc.sum[static_cast<size_t>(k)];
      sumsq[static_cast<size_t>(k)] += acc.sumsq[static_cast<size_t>(k)];
    }
  }
  std::vector<McEstimate> est(static_cast<size_t>(n_out));
  for (int k = 0; k < n_out; ++k) {
    const double s = sum[static_cast<size_t>(k)];
    const double s2 = sumsq[static_cast<size_t>(k)];
    const double mean = s / static_cast<double>(count);
    double se = 0.0;
    if (count > 1) {
      const double var =
          std::max(0.0, (s2 - s * s / static_cast<double>(count)) /
                            static_cast<double>(count - 1));
      se = std::sqrt(var / static_cast<double>(count));
    }
    est[static_cast<size_t>(k)] = McEstimate{mean, se, count};
  }
  return est;
}

McEstimate integrate(const MetricModel& m, const ScalarField& f,
                     std::uint64_t seed, std::int64_t count, int workers) {
  auto eval = [&f, &m](const FramePoint& w, std::span<double> out) {
    out[0] = f(m, lift(w)).value();
  };
  return mc_multi(m, eval, 1, seed, count, workers)[0];
}

McEstimate l2_inner(const MetricModel& m, const ScalarField& f,
                    const ScalarField& g, std::uint64_t seed,
                    std::int64_t count, int workers) {
  auto eval = [&](const FramePoint& w, std::span<double> out) {
    FrameJet wj = lift(w);
    out[0] = f(m, wj).value() * g(m, wj).value();
  };
  return mc_multi(m, eval, 1, seed, count, workers)[0];
}

McEstimate l2_inner_2form(const MetricModel& m, const TwoFormField& F,
                          const TwoFormField& G, std::uint64_t seed,
                          std::int64_t count, int workers) {
  auto eval = [&](const FramePoint& w, std::span<double> out) {
    FrameJet wj = lift(w);
    double acc = 0.0;
    for (int a = 0; a < l2_dim(m.dim); ++a) {
      acc += F.comps[a](m, wj).value() * G.comps[a](m, wj).value();
    }
    out[0] = acc;
  };
  return mc_multi(m, eval, 1, seed, count, workers)[0];
}

}  // namespace pestov
