#include "doctest.h"

#include <cmath>

#include "pestov/frame.hpp"
#include "pestov/measure.hpp"
#include "test_support.hpp"

using namespace pestov;
using namespace pestov::testing;

namespace {

std::vector<MetricModel> all_models() {
  return {MetricModel::flat_torus(2),
          MetricModel::flat_torus(3),
          MetricModel::round_sphere(2),
          MetricModel::round_sphere(3),
          MetricModel::hyperbolic_ball(3),
          MetricModel::perturbed_hyperbolic(3, 0.05)};
}

double g_inner(const MetricModel& m, const ChartPoint& x, const VecD& u,
               const VecD& v) {
  MatD g = metric_at(m, x);
  double s = 0.0;
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j) s += u[i] * g(i, j) * v[j];
  return s;
}

VecD frame_vector(const MetricModel& m, const FramePoint& w, int j) {
  MatD E = reference_frame(m, w.x);
  MatD W = matmul(E, w.a);
  VecD v(m.dim);
  for (int i = 0; i < m.dim; ++i) v[i] = W(i, j);
  return v;
}

}  // namespace

TEST_CASE("reference frame: identity on the torus, half identity at the ball origin") {
  auto mt = MetricModel::flat_torus(3);
  FramePoint wt = sweep_point(mt, 1, 0);
  MatD Et = reference_frame(mt, wt.x);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(Et(i, j) == (i == j ? 1.0 : 0.0));

  auto mh = MetricModel::hyperbolic_ball(3);
  MatD Eh = reference_frame(mh, ChartPoint{VecD(3), 0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(Eh(i, j) == doctest::Approx(i == j ? 0.5 : 0.0).epsilon(1e-14));
}

TEST_CASE("reference frame columns are g-orthonormal everywhere") {
  for (const auto& m : all_models()) {
    for (int it = 0; it < 8; ++it) {
      FramePoint w = sweep_point(m, 3, it);
      MatD E = reference_frame(m, w.x);
      for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j) {
          VecD ci(m.dim), cj(m.dim);
          for (int k = 0; k < m.dim; ++k) {
            ci[k] = E(k, i);
            cj[k] = E(k, j);
          }
          CHECK(std::abs(g_inner(m, w.x, ci, cj) - (i == j ? 1.0 : 0.0)) <
                1e-12);
        }
    }
  }
}

TEST_CASE("connection form: zero on the torus, linear, FD oracle on the ball") {
  auto mt = MetricModel::flat_torus(2);
  FramePoint wt = sweep_point(mt, 5, 1);
  VecD z = axis(0, 2);
  CHECK(connection_form(mt, wt.x, z).norm() == 0.0);

  auto m = MetricModel::hyperbolic_ball(3);
  Philox rng(7);
  for (int it = 0; it < 5; ++it) {
    FramePoint w = sweep_point(m, 7, it);
    VecD Z(3);
    for (int i = 0; i < 3; ++i) Z[i] = rng.uniform(-1.0, 1.0);

    SkewForm om = connection_form(m, w.x, Z);

    // linearity
    VecD Z2 = Z;
    for (int i = 0; i < 3; ++i) Z2[i] *= 2.0;
    SkewForm omd = connection_form(m, w.x, Z2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(omd.entries(i, j) - 2.0 * om.entries(i, j)) < 1e-12);

    // FD oracle: omega(Z)_{ij} = g(dE.Z + Gamma(Z, E_j), E_i)
    const double h = 1e-5;
    ChartPoint xp = w.x, xm = w.x;
    for (int i = 0; i < 3; ++i) {
      xp.coords[i] = w.x.coords[i] + h * Z[i];
      xm.coords[i] = w.x.coords[i] - h * Z[i];
    }
    MatD Ep = reference_frame(m, xp);
    MatD Em = reference_frame(m, xm);
    MatD E = reference_frame(m, w.x);
    ChristoffelD G = christoffel_at(m, w.x);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        VecD cov(3);
        for (int k = 0; k < 3; ++k) {
          double acc = (Ep(k, j) - Em(k, j)) / (2 * h);
          for (int mm = 0; mm < 3; ++mm)
            for (int l = 0; l < 3; ++l)
              acc += Z[mm] * G.at(k, mm, l) * E(l, j);
          cov[k] = acc;
        }
        VecD Ei(3);
        for (int k = 0; k < 3; ++k) Ei[k] = E(k, i);
        CHECK(std::abs(g_inner(m, w.x, cov, Ei) - om.entries(i, j)) < 1e-8);
      }
  }
}

TEST_CASE("vertical field: exact flow derivative, zero projection") {
  auto m = MetricModel::round_sphere(3);
  FramePoint w = sweep_point(m, 9, 2);
  SkewForm xi = SkewForm::wedge(0, 2, 3);

  FrameTangent t = vertical_field(w, xi);
  for (int i = 0; i < 3; ++i) CHECK(t.dx[i] == 0.0);  // ker d(projection)

  SkewForm zero = SkewForm::zero(3);
  FrameTangent tz = vertical_field(w, zero);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(tz.da(i, j) == 0.0);

  // exponential-flow oracle with second-order convergence
  std::vector<double> hs{1e-2, 5e-3, 2.5e-3};
  std::vector<double> errs;
  for (double h : hs) {
    FramePoint wp = vertical_flow(w, xi, h);
    FramePoint wm = vertical_flow(w, xi, -h);
    double err = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double fd = (wp.a(i, j) - wm.a(i, j)) / (2 * h);
        err = std::max(err, std::abs(fd - t.da(i, j)));
      }
    errs.push_back(err);
  }
  CHECK(fit_loglog_slope(hs, errs) > 1.9);
}

TEST_CASE("standard field: flat case, horizontal projection, equivariance") {
  auto mt = MetricModel::flat_torus(2);
  FramePoint wt{{VecD(2), 0}, MatD::identity(2)};
  FrameTangent t = standard_field(mt, wt, Direction{axis(0, 2)});
  CHECK(t.dx[0] == 1.0);
  CHECK(t.dx[1] == 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(t.da(i, j) == 0.0);

  Philox rng(11);
  for (const auto& m : all_models()) {
    FramePoint w = sweep_point(m, 13, 3);
    VecD th(m.dim);
    for (int i = 0; i < m.dim; ++i) th[i] = rng.uniform(-1.0, 1.0);
    FrameTangent bt = standard_field(m, w, Direction{th});

    // projection to the base is w(theta)
    VecD wth = matvec(matmul(reference_frame(m, w.x), w.a), th);
    for (int i = 0; i < m.dim; ++i)
      CHECK(std::abs(bt.dx[i] - wth[i]) < 1e-12);

    // horizontality: da = -omega(dx) a
    SkewForm om = connection_form(m, w.x, bt.dx);
    MatD expect = matmul(om.entries, w.a);
    for (int i = 0; i < m.dim; ++i)
      for (int j = 0; j < m.dim; ++j)
        CHECK(std::abs(bt.da(i, j) + expect(i, j)) < 1e-11);

    // equivariance: B_{a^{-1} theta} at w a equals (R_a)_* B_theta(w)
    MatD rot;
    {
      Philox r2(29);
      rot = haar_rotation(m.dim, r2);
    }
    FramePoint wa{w.x, matmul(w.a, rot)};
    VecD rth = matvec(rot.transposed(), th);
    FrameTangent bta = standard_field(m, wa, Direction{rth});
    MatD pushed = matmul(bt.da, rot);
    for (int i = 0; i < m.dim; ++i) {
      CHECK(std::abs(bta.dx[i] - bt.dx[i]) < 1e-11);
      for (int j = 0; j < m.dim; ++j)
        CHECK(std::abs(bta.da(i, j) - pushed(i, j)) < 1e-11);
    }
  }
}

TEST_CASE("frame flow on the torus is a straight line with constant frame") {
  auto m = MetricModel::flat_torus(2);
  Philox rng(17);
  FramePoint w = sweep_point(m, 17, 0);
  FramePoint w2 = frame_flow(m, w, 0.7, 1e-3);
  VecD v = frame_vector(m, w, 0);
  for (int i = 0; i < 2; ++i)
    CHECK(w2.x.coords[i] ==
          doctest::Approx(w.x.coords[i] + 0.7 * v[i]).epsilon(1e-12));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(w2.a(i, j) == doctest::Approx(w.a(i, j)).epsilon(1e-12));
}

TEST_CASE("sphere frame flow follows the closed-form great circle") {
  auto m = MetricModel::round_sphere(2);
  FramePoint w = sweep_point(m, 19, 1);
  EmbeddedFrame e0 = embed_frame(m, w);

  const double t = 1.1;
  FramePoint wt = frame_flow(m, w, t, 1e-3);
  EmbeddedFrame e1 = embed_frame(m, wt);
  EmbeddedFrame ec = sphere_flow_closed_form(e0, t, 1.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(e1.p[i] - ec.p[i]) < 1e-9);
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(e1.U(i, j) - ec.U(i, j)) < 1e-9);
  }
}

TEST_CASE("sphere flow crosses charts and returns after one period") {
  auto m = MetricModel::round_sphere(2);
  FramePoint w = sweep_point(m, 23, 4);
  FramePoint back = frame_flow(m, w, 2.0 * M_PI, 1e-3);
  // compare in embedded form (the chart may differ)
  EmbeddedFrame a = embed_frame(m, w);
  EmbeddedFrame b = embed_frame(m, back);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(a.p[i] - b.p[i]) < 1e-6);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(a.U(i, j) - b.U(i, j)) < 1e-6);
  }
}

TEST_CASE("hyperbolic radial geodesic has the closed form tanh(t/2)") {
  auto m = MetricModel::hyperbolic_ball(3);
  FramePoint w{{VecD(3), 0}, MatD::identity(3)};
  const double t = 1.4;
  FramePoint wt = frame_flow(m, w, t, 1e-3);
  CHECK(wt.x.coords[0] == doctest::Approx(std::tanh(t / 2)).epsilon(1e-9));
  CHECK(std::abs(wt.x.coords[1]) < 1e-12);
  CHECK(std::abs(wt.x.coords[2]) < 1e-12);
  // the rotation part stays the identity along this radial line
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(wt.a(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
}

TEST_CASE("RK4 order: sphere flow error scales as dt^4") {
  auto m = MetricModel::round_sphere(2);
  FramePoint w = sweep_point(m, 29, 2);
  EmbeddedFrame e0 = embed_frame(m, w);
  const double t = 1.0;
  EmbeddedFrame ec = sphere_flow_closed_form(e0, t, 1.0);

  std::vector<double> dts{0.04, 0.02, 0.01, 0.005};
  std::vector<double> errs;
  for (double dt : dts) {
    FramePoint wt = frame_flow(m, w, t, dt);
    EmbeddedFrame e1 = embed_frame(m, wt);
    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
      err = std::max(err, std::abs(e1.p[i] - ec.p[i]));
      for (int j = 0; j < 2; ++j)
        err = std::max(err, std::abs(e1.U(i, j) - ec.U(i, j)));
    }
    errs.push_back(err);
  }
  const double slope = fit_loglog_slope(dts, errs);
  CHECK(slope > 3.7);
  CHECK(slope < 4.3);
}

TEST_CASE("vertical flows are exact and preserve orthogonality") {
  auto m = MetricModel::perturbed_hyperbolic(3, 0.05);
  FramePoint w = sweep_point(m, 31, 1);
  SkewForm xi = SkewForm::wedge(1, 2, 3);
  FramePoint wt = vertical_flow(w, xi, 5.0);
  for (int i = 0; i < 3; ++i) CHECK(wt.x.coords[i] == w.x.coords[i]);
  CHECK(so_defect(wt.a) < 1e-13);
}

TEST_CASE("orthonormality drift stays at rounding level along the flow") {
  // torus and sphere over t = 2 at dt = 1e-3 (the long t = 10 run is part of
  // the acceptance suite)
  for (const auto& m :
       {MetricModel::flat_torus(2), MetricModel::round_sphere(2)}) {
    FramePoint w = sweep_point(m, 37, 0);
    FramePoint wt = frame_flow(m, w, 2.0, 1e-3);
    CHECK(so_defect(wt.a) < 1e-9);
  }
}

TEST_CASE("flow validations and domain exits") {
  auto m = MetricModel::hyperbolic_ball(2);
  FramePoint w{{VecD(2), 0}, MatD::identity(2)};
  CHECK_THROWS_AS(frame_flow(m, w, 1.0, 0.0), PreconditionError);

  // a long geodesic leaves the chart domain: partial trajectory reported
  FlowResult r = b_theta_flow_result(m, w, Direction{axis(0, 2)}, 20.0, 1e-2,
                                     /*record_every=*/10);
  CHECK(r.exited);
  CHECK(r.exit_time < 20.0);
  CHECK(!r.steps.empty());
  CHECK_THROWS_AS(frame_flow(m, w, 20.0, 1e-2), DomainError);
}

TEST_CASE("unit speed and geodesic property along the numeric trajectory") {
  auto m = MetricModel::perturbed_hyperbolic(3, 0.05);
  FramePoint w = sweep_point(m, 41, 2);
  FlowResult r = b_theta_flow_result(m, w, Direction{axis(0, 3)}, 0.5, 1e-3,
                                     /*record_every=*/1);
  REQUIRE(!r.exited);
  // g(xdot, xdot) = 1 via FD velocity along the recorded trajectory
  for (size_t k = 2; k + 2 < r.steps.size(); k += 97) {
    const double dt = r.steps[k + 1].t - r.steps[k].t;
    VecD vel(3);
    for (int i = 0; i < 3; ++i)
      vel[i] = (r.steps[k + 1].w.x.coords[i] - r.steps[k - 1].w.x.coords[i]) /
               (2 * dt);
    const double speed = g_inner(m, r.steps[k].w.x, vel, vel);
    CHECK(speed == doctest::Approx(1.0).epsilon(1e-6));

    // geodesic equation: xdotdot^k + Gamma^k_ij xdot^i xdot^j ~ 0
    ChristoffelD G = christoffel_at(m, r.steps[k].w.x);
    for (int c = 0; c < 3; ++c) {
      double acc = (r.steps[k + 1].w.x.coords[c] -
                    2 * r.steps[k].w.x.coords[c] +
                    r.steps[k - 1].w.x.coords[c]) /
                   (dt * dt);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) acc += G.at(c, i, j) * vel[i] * vel[j];
      CHECK(std::abs(acc) < 1e-5);
    }
  }
}

TEST_CASE("b_theta flows: group law and consistency with frame_flow") {
  auto m = MetricModel::round_sphere(2);
  FramePoint w = sweep_point(m, 43, 3);

  FramePoint f1 = frame_flow(m, w, 0.42, 1e-3);
  FramePoint f2 = b_theta_flow(m, w, Direction{axis(0, 2)}, 0.42, 1e-3);
  CHECK(frame_distance(f1, f2) < 1e-12);

  VecD th(2);
  th[0] = 0.6;
  th[1] = -0.8;
  FramePoint a = b_theta_flow(m, w, Direction{th}, 0.5, 1e-3);
  FramePoint b = b_theta_flow(m, a, Direction{th}, 0.3, 1e-3);
  FramePoint c = b_theta_flow(m, w, Direction{th}, 0.8, 1e-3);
  EmbeddedFrame eb = embed_frame(m, b), ecf = embed_frame(m, c);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(eb.p[i] - ecf.p[i]) < 1e-9);
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(eb.U(i, j) - ecf.U(i, j)) < 1e-9);
  }

  // theta = 0 is the identity map
  FramePoint z = b_theta_flow(m, w, Direction{VecD(2)}, 1.0, 1e-3);
  CHECK(frame_distance(z, w) == 0.0);
}

TEST_CASE("recharting is an involution preserving the embedded frame") {
  auto m = MetricModel::round_sphere(3);
  int found = 0;
  for (int it = 0; found < 6 && it < 200; ++it) {
    FramePoint w = sweep_point(m, 47, it);
    // only points of the overlap annulus are representable in both charts
    double nrm2 = 0.0;
    for (int i = 0; i < 3; ++i) nrm2 += w.x.coords[i] * w.x.coords[i];
    if (nrm2 < 0.36) continue;
    ++found;
    FramePoint o = rechart(m, w, 1 - w.x.chart_id);
    validate_frame_point(m, o);
    EmbeddedFrame a = embed_frame(m, w), b = embed_frame(m, o);
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(a.p[i] - b.p[i]) < 1e-10);
      for (int j = 0; j < 3; ++j) CHECK(std::abs(a.U(i, j) - b.U(i, j)) < 1e-10);
    }
    FramePoint back = rechart(m, o, w.x.chart_id);
    CHECK(frame_distance(back, w) < 1e-12);
  }
}

TEST_CASE("connection map: kernel, vertical identification, image") {
  auto m = MetricModel::perturbed_hyperbolic(3, 0.05);
  FramePoint w = sweep_point(m, 53, 1);
  VecD v = frame_vector(m, w, 0);

  // the projection of the standard field is in the kernel
  FrameTangent bt = standard_field(m, w, Direction{axis(0, 3)});
  // dv = d/dt of (E a e_1) along the flow, from the jet machinery
  {
    VarScope scope(1);
    const Jet eps = Jet::variable(0.0, scope.var());
    FrameJet s = lift(w);
    FrameVelocityJ vel = standard_velocity_jet(m, s, lift(axis(0, 3)));
    for (int i = 0; i < 3; ++i) s.x[i] += eps * vel.dx[i];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s.a(i, j) += eps * vel.da(i, j);
    MatJ W = matmul(reference_frame_jet(m, s.chart_id, s.x), s.a);
    VecD dv(3);
    for (int i = 0; i < 3; ++i) dv[i] = W(i, 0).extract(scope.var()).value();
    VecD K = connection_map(m, SMPoint{w.x, v}, SMTangent{bt.dx, dv});
    for (int i = 0; i < 3; ++i) CHECK(std::abs(K[i]) < 1e-10);
  }

  // vertical rotation of v toward a unit u perp v maps to u
  VecD u = frame_vector(m, w, 1);
  VecD K = connection_map(m, SMPoint{w.x, v}, SMTangent{VecD(3), u});
  for (int i = 0; i < 3; ++i) CHECK(K[i] == doctest::Approx(u[i]).epsilon(1e-10));
  CHECK(std::abs(g_inner(m, w.x, K, v)) < 1e-10);

  // parallel-transport FD oracle for the defining formula, on a path moving
  // in the base with a tangency-compatible v(t)
  {
    const double h = 1e-3;
    auto path = [&](double t) {
      VecD x = w.x.coords;
      for (int i = 0; i < 3; ++i) x[i] += t * bt.dx[i];
      return x;
    };
    // dv chosen so that K = dv + Gamma(dx) v equals u (tangent to SM)
    ChristoffelD G = christoffel_at(m, w.x);
    VecD dv = u;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) dv[k] -= G.at(k, i, j) * bt.dx[i] * v[j];
    auto v_of = [&](double t) {
      VecD vt(3);
      for (int i = 0; i < 3; ++i) vt[i] = v[i] + t * dv[i];
      return vt;
    };
    auto centered = [&](double hh) {
      VecD tp = parallel_transport_back(m, path, hh, v_of(hh));
      VecD tm = parallel_transport_back(
          m, [&](double t) { return path(-t); }, hh, v_of(-hh));
      VecD d(3);
      for (int i = 0; i < 3; ++i) d[i] = (tp[i] - tm[i]) / (2 * hh);
      return d;
    };
    VecD c1 = centered(h), c2 = centered(h / 2);
    VecD K2(3);
    for (int i = 0; i < 3; ++i) K2[i] = (4.0 * c2[i] - c1[i]) / 3.0;
    VecD K3 = connection_map(m, SMPoint{w.x, v}, SMTangent{bt.dx, dv});
    for (int i = 0; i < 3; ++i) CHECK(std::abs(K2[i] - K3[i]) < 1e-7);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(K3[i] - u[i]) < 1e-10);
  }

  // non-tangent input trips the precondition
  CHECK_THROWS_AS(connection_map(m, SMPoint{w.x, v}, SMTangent{VecD(3), v}),
                  PreconditionError);
}

TEST_CASE("frame point validation") {
  auto m = MetricModel::round_sphere(2);
  FramePoint w = sweep_point(m, 59, 0);
  validate_frame_point(m, w);
  FramePoint bad = w;
  bad.a(0, 0) += 0.1;
  CHECK_THROWS_AS(validate_frame_point(m, bad), PreconditionError);
}
