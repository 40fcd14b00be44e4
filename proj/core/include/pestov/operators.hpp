#pragma once

#include <string>

#include "pestov/derive.hpp"

namespace pestov {

/// Generator of the frame flow applied to f: (B_{e_1} f)(w).
double X_apply(const MetricModel& m, const ScalarField& f,
               const FramePoint& w);

/// Vertical gradient: components (Y_{ij} f)(w) along e_i ^ e_j, i < j.
SVec<double, kMaxL2> grad_V(const MetricModel& m, const ScalarField& f,
                            const FramePoint& w);

/// Horizontal gradient: (B_{e_j} f)(w) along e_1 ^ e_j for j >= 2, zero on
/// the remaining basis 2-forms.
SVec<double, kMaxL2> grad_H(const MetricModel& m, const ScalarField& f,
                            const FramePoint& w);

/// Formal adjoints (divergences): -sum Y_{ij} F_{ij} and -sum B_{e_j} F_{1j}.
double div_V(const MetricModel& m, const TwoFormField& F, const FramePoint& w);
double div_H(const MetricModel& m, const TwoFormField& F, const FramePoint& w);

/// Curvature endomorphism of the frame bundle as a bilinear-form matrix in
/// the Lambda^2 basis: <R_FM xi, xi'> = sum xi'^beta M(beta, alpha) xi^alpha.
/// Only rows beta = (e_1 ^ e_j) are nonzero.
SMat<double, kMaxL2> r_fm_matrix(const MetricModel& m, const FramePoint& w);
SMat<Jet, kMaxL2> r_fm_matrix_jet(const MetricModel& m, const FrameJet& w);

SkewForm R_FM_apply(const MetricModel& m, const FramePoint& w,
                    const SkewForm& xi);

/// Scalar field w -> (R_FM grad_V f)_alpha, usable inside further derivative
/// chains.
ScalarField rfm_grad_v_component(const ScalarField& f, int alpha);

/// grad_V f as a TwoFormField (each component a scalar field in its own
/// right, differentiable again).
TwoFormField grad_v_field(const ScalarField& f, int n);

/// grad_H f as a TwoFormField.
TwoFormField grad_h_field(const ScalarField& f, int n);

/// Structural identities:
///   VV : [Y_xi, Y_xi'] = Y_[xi,xi']
///   VB : [Y_xi, B_theta] = B_{xi theta}
///   BB : [B_theta, B_theta'] = -(w^{-1} R(w theta ^ w theta'))^V
///   XV : grad_H = -[X, grad_V]
///   XH : [X, grad_H] = R_FM grad_V
///   L25: div_H grad_V - div_V grad_H = -(n-1) X
enum class StructuralKind { VV, VB, BB, XV, XH, L25 };

std::string to_string(StructuralKind k);

struct ResidualDetail {
  double residual = 0.0;  // max |LHS - RHS| over basis instantiations
  double scale = 0.0;     // max individual term magnitude
  double relative = 0.0;  // residual / max(scale, 1e-12)
  double lhs = 0.0;       // values at the worst instantiation
  double rhs = 0.0;
};

ResidualDetail structural_residual_detail(const MetricModel& m,
                                          const ScalarField& f,
                                          const FramePoint& w,
                                          StructuralKind kind);

/// Relative residual (the detail's `relative` entry).
double structural_residual(const MetricModel& m, const ScalarField& f,
                           const FramePoint& w, StructuralKind kind);

inline constexpr double kResidualFloor = 1e-12;

}  // namespace pestov
