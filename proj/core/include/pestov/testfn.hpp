#pragma once

#include <cstdint>

#include "pestov/derive.hpp"

namespace pestov {

/// Seeded families of globally smooth test functions on the model frame
/// bundles. Coefficients are reproducible from (kind, degree, seed).
enum class TestFnKind { TorusTrigPoly, GroupMatrixPoly, ChartBump };

/// Invariance class for the associated identities: G = SO(n-1) gives the
/// unit tangent bundle, G = SO(n-2) the bundle of orthogonal 2-frames.
enum class InvarianceGroup { SOn1, SOn2 };

ScalarField make_test_function(const MetricModel& m, TestFnKind kind,
                               int degree, std::uint64_t seed);

/// Family matching the model: trig polynomials on the torus, group matrix
/// polynomials on the sphere, chart bumps on the hyperbolic models.
ScalarField default_test_function(const MetricModel& m, int degree,
                                  std::uint64_t seed);

TestFnKind default_test_fn_kind(const MetricModel& m);

/// G-invariant member: built from x together with the first column of a
/// (SOn1), or the first two columns (SOn2).
ScalarField make_invariant_function(const MetricModel& m, InvarianceGroup g,
                                    int degree, std::uint64_t seed);

/// Lambda^2-valued field with independent family members as components.
TwoFormField random_two_form(const MetricModel& m, int degree,
                             std::uint64_t seed);

ScalarField constant_field(double c);

/// Matrix-coefficient field w -> a_{pq}.
ScalarField entry_field(int p, int q);

}  // namespace pestov
