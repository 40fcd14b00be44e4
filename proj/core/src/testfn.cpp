#include "pestov/testfn.hpp"

#include <cmath>
#include <memory>

#include "pestov/rng.hpp"

namespace pestov {

namespace {

constexpr double kBumpRadius = 0.96;  // support |x| <= 0.96, inside the ball

struct TrigFactor {
  int axis = 0;
  int harmonic = 1;
  bool is_sin = true;
};

struct Term {
  double coeff = 0.0;
  std::vector<TrigFactor> trig;                // torus only
  std::vector<std::pair<int, int>> a_entries;  // entries of a (or of Q)
  std::vector<int> x_exponents;                // chart bump only
};

std::vector<Term> make_terms(const MetricModel& m, TestFnKind kind, int degree,
                             std::uint64_t seed,
                             const std::vector<int>& allowed_cols) {
  Philox rng(mix_seed(seed, 0xf17e));
  const int n = m.dim;
  const int nterms = std::max(2, degree + 1);
  std::vector<Term> terms(nterms);
  for (Term& t : terms) {
    t.coeff = rng.uniform(-1.0, 1.0);
    if (kind == TestFnKind::TorusTrigPoly) {
      for (int axis = 0; axis < n; ++axis) {
        if (rng.next_double() < 0.6) {
          TrigFactor f;
          f.axis = axis;
          f.harmonic = 1 + static_cast<int>(rng.next_below(2));
          f.is_sin = rng.next_double() < 0.5;
          t.trig.push_back(f);
        }
      }
    }
    if (kind == TestFnKind::ChartBump) {
      t.x_exponents.assign(n, 0);
      int budget = static_cast<int>(rng.next_below(degree + 1));
      while (budget-- > 0) t.x_exponents[rng.next_below(n)] += 1;
    }
    const int rows = kind == TestFnKind::GroupMatrixPoly ? n + 1 : n;
    const int na = static_cast<int>(rng.next_below(degree + 1));
    for (int k = 0; k < na; ++k) {
      const int p = static_cast<int>(rng.next_below(rows));
      int q;
      if (allowed_cols.empty()) {
        q = static_cast<int>(
            rng.next_below(kind == TestFnKind::GroupMatrixPoly ? n + 1 : n));
      } else {
        q = allowed_cols[rng.next_below(
            static_cast<std::uint32_t>(allowed_cols.size()))];
      }
      t.a_entries.emplace_back(p, q);
    }
  }
  return terms;
}

Jet eval_torus(const MetricModel& m, const FrameJet& w,
               const std::vector<Term>& terms) {
  Jet val;
  for (const Term& t : terms) {
    Jet prod(t.coeff);
    for (const TrigFactor& f : t.trig) {
      const double freq =
          2.0 * M_PI * f.harmonic / m.params.torus_periods[f.axis];
      Jet ang = freq * w.x[f.axis];
      prod *= f.is_sin ? sin(ang) : cos(ang);
    }
    for (auto [p, q] : t.a_entries) prod *= w.a(p, q);
    val += prod;
  }
  return val;
}

Jet eval_group_poly(const MetricModel& m, const FrameJet& w,
                    const std::vector<Term>& terms) {
  SMat<Jet> Q = sphere_group_matrix(m, w);
  Jet val;
  for (const Term& t : terms) {
    Jet prod(t.coeff);
    for (auto [p, q] : t.a_entries) prod *= Q(p, q);
    val += prod;
  }
  return val;
}

Jet eval_chart_bump(const MetricModel& m, const FrameJet& w,
                    const std::vector<Term>& terms) {
  const int n = m.dim;
  Jet s;
  for (int i = 0; i < n; ++i) s += w.x[i] * w.x[i];
  s *= 1.0 / (kBumpRadius * kBumpRadius);
  if (s.value() >= 1.0) return Jet(0.0);
  Jet bump = exp(-s * inv(1.0 - s));
  Jet poly;
  for (const Term& t : terms) {
    Jet prod(t.coeff);
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < t.x_exponents[i]; ++e) prod *= w.x[i];
    for (auto [p, q] : t.a_entries) prod *= w.a(p, q);
    poly += prod;
  }
  return bump * poly;
}

ScalarField field_from_terms(TestFnKind kind, std::vector<Term> terms) {
  auto data = std::make_shared<std::vector<Term>>(std::move(terms));
  switch (kind) {
    case TestFnKind::TorusTrigPoly:
      return [data](const MetricModel& m, const FrameJet& w) {
        return eval_torus(m, w, *data);
      };
    case TestFnKind::GroupMatrixPoly:
      return [data](const MetricModel& m, const FrameJet& w) {
        return eval_group_poly(m, w, *data);
      };
    case TestFnKind::ChartBump:
      return [data](const MetricModel& m, const FrameJet& w) {
        return eval_chart_bump(m, w, *data);
      };
  }
  return constant_field(0.0);
}

}  // namespace

ScalarField make_test_function(const MetricModel& m, TestFnKind kind,
                               int degree, std::uint64_t seed) {
  if (kind == TestFnKind::TorusTrigPoly && m.kind != ModelKind::FlatTorus) {
    throw PreconditionError("TorusTrigPoly requires a flat torus model");
  }
  if (kind == TestFnKind::GroupMatrixPoly &&
      m.kind != ModelKind::RoundSphere) {
    throw PreconditionError("GroupMatrixPoly requires a sphere model");
  }
  if (kind == TestFnKind::ChartBump && m.kind != ModelKind::HyperbolicBall &&
      m.kind != ModelKind::PerturbedHyperbolic) {
    throw PreconditionError("ChartBump requires a hyperbolic model");
  }
  return field_from_terms(kind, make_terms(m, kind, degree, seed, {}));
}

TestFnKind default_test_fn_kind(const MetricModel& m) {
  switch (m.kind) {
    case ModelKind::FlatTorus:
      return TestFnKind::TorusTrigPoly;
    case ModelKind::RoundSphere:
      return TestFnKind::GroupMatrixPoly;
    default:
      return TestFnKind::ChartBump;
  }
}

ScalarField default_test_function(const MetricModel& m, int degree,
                                  std::uint64_t seed) {
  return make_test_function(m, default_test_fn_kind(m), degree, seed);
}

ScalarField make_invariant_function(const MetricModel& m, InvarianceGroup g,
                                    int degree, std::uint64_t seed) {
  const int ncols = g == InvarianceGroup::SOn1 ? 1 : 2;
  if (ncols >= m.dim) {
    throw PreconditionError(
        "invariance class requires dim > number of fixed columns");
  }
  std::vector<int> cols;
  for (int c = 0; c < ncols; ++c) cols.push_back(c);
  if (m.kind == ModelKind::FlatTorus) {
    return field_from_terms(
        TestFnKind::TorusTrigPoly,
        make_terms(m, TestFnKind::TorusTrigPoly, degree, seed, cols));
  }
  if (m.kind == ModelKind::RoundSphere) {
    cols.push_back(m.dim);  // the base-point column is always G-invariant
    return field_from_terms(
        TestFnKind::GroupMatrixPoly,
        make_terms(m, TestFnKind::GroupMatrixPoly, degree, seed, cols));
  }
  throw UnsupportedModelError(
      "invariant test functions exist for the closed models only");
}

TwoFormField random_two_form(const MetricModel& m, int degree,
                             std::uint64_t seed) {
  TwoFormField F;
  F.n = m.dim;
  const int d2 = l2_dim(m.dim);
  F.comps.reserve(d2);
  for (int i = 0; i < d2; ++i) {
    F.comps.push_back(
        default_test_function(m, degree, mix_seed(seed, 0x2f0 + i)));
  }
  return F;
}

ScalarField constant_field(double c) {
  return [c](const MetricModel&, const FrameJet&) { return Jet(c); };
}

ScalarField entry_field(int p, int q) {
  return [p, q](const MetricModel&, const FrameJet& w) { return w.a(p, q); };
}

}  // namespace pestov
