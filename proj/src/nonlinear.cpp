#include "ilcgap/nonlinear.hpp"

#include <cmath>
#include <numbers>

#include "ilcgap/errors.hpp"

namespace ilcgap {

namespace {

double fd_step(double v) { return 1e-6 * std::max(1.0, std::abs(v)); }

// Central-difference Jacobian of g with respect to its argument.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& g, const Vec& z) {
  const Vec g0 = g(z);
  Mat J(g0.size(), z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double h = fd_step(z(i));
    Vec zp = z, zm = z;
    zp(i) += h;
    zm(i) -= h;
    J.col(i) = (g(zp) - g(zm)) / (2.0 * h);
  }
  return J;
}

Vec fd_gradient(const std::function<double(const Vec&)>& g, const Vec& z) {
  Vec out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double h = fd_step(z(i));
    Vec zp = z, zm = z;
    zp(i) += h;
    zm(i) -= h;
    out(i) = (g(zp) - g(zm)) / (2.0 * h);
  }
  return out;
}

Mat fd_hessian(const std::function<double(const Vec&)>& g, const Vec& z) {
  const auto grad = [&g](const Vec& v) { return fd_gradient(g, v); };
  return symmetrized(fd_jacobian(grad, z));
}

bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace

Vec rk4_step(const Dynamics& f, const Vec& x, const Vec& u, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("RK4 step size must be positive");
  const Vec k1 = f(x, u);
  const Vec k2 = f(x + 0.5 * dt * k1, u);
  const Vec k3 = f(x + 0.5 * dt * k2, u);
  const Vec k4 = f(x + dt * k3, u);
  Vec next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!all_finite(next)) throw NumericBlowup("RK4 step produced a non-finite state");
  return next;
}

Vec NonlinearSystem::step(const Vec& x, const Vec& u) const { return rk4_step(f, x, u, dt); }

Mat NonlinearSystem::jacobian_x(const Vec& x, const Vec& u) const {
  if (dfdx) return dfdx(x, u);
  return fd_jacobian([&](const Vec& z) { return f(z, u); }, x);
}

Mat NonlinearSystem::jacobian_u(const Vec& x, const Vec& u) const {
  if (dfdu) return dfdu(x, u);
  return fd_jacobian([&](const Vec& z) { return f(x, z); }, u);
}

void NonlinearSystem::discrete_jacobians(const Vec& x, const Vec& u, Mat& A, Mat& B) const {
  const double h = dt;
  const Mat I = Mat::Identity(state_dim, state_dim);

  const Vec k1 = f(x, u);
  const Mat k1x = jacobian_x(x, u);
  const Mat k1u = jacobian_u(x, u);

  const Vec x2 = x + 0.5 * h * k1;
  const Vec k2 = f(x2, u);
  const Mat F2x = jacobian_x(x2, u);
  const Mat k2x = F2x * (I + 0.5 * h * k1x);
  const Mat k2u = F2x * (0.5 * h * k1u) + jacobian_u(x2, u);

  const Vec x3 = x + 0.5 * h * k2;
  const Mat F3x = jacobian_x(x3, u);
  const Mat k3x = F3x * (I + 0.5 * h * k2x);
  const Mat k3u = F3x * (0.5 * h * k2u) + jacobian_u(x3, u);
  const Vec k3 = f(x3, u);

  const Vec x4 = x + h * k3;
  const Mat F4x = jacobian_x(x4, u);
  const Mat k4x = F4x * (I + h * k3x);
  const Mat k4u = F4x * (h * k3u) + jacobian_u(x4, u);

  A = I + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  B = h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
}

StageExpansion RunningCost::expand(const Vec& x, const Vec& u) const {
  if (stage_expansion) return stage_expansion(x, u);
  const auto nx = x.size();
  const auto nu = u.size();
  Vec z(nx + nu);
  z << x, u;
  const auto joint = [&](const Vec& v) { return stage(v.head(nx), v.tail(nu)); };
  const Vec g = fd_gradient(joint, z);
  const Mat Hs = fd_hessian(joint, z);
  return {g.head(nx), g.tail(nu), Hs.topLeftCorner(nx, nx), Hs.bottomRightCorner(nu, nu),
          Hs.bottomLeftCorner(nu, nx)};
}

TerminalExpansion RunningCost::expand_terminal(const Vec& x) const {
  if (terminal_expansion) return terminal_expansion(x);
  return {fd_gradient(terminal, x), fd_hessian(terminal, x)};
}

Rollout simulate(const NonlinearSystem& sys, const RunningCost& cost, const Vec& x0,
                 const std::vector<Vec>& u) {
  if (static_cast<int>(u.size()) != sys.horizon)
    throw InvalidInput("control sequence length must equal the horizon");
  Rollout r;
  r.u = u;
  r.x.reserve(u.size() + 1);
  r.x.push_back(x0);
  double J = 0.0;
  try {
    for (std::size_t t = 0; t < u.size(); ++t) {
      J += cost.stage(r.x.back(), u[t]);
      r.x.push_back(sys.step(r.x.back(), u[t]));
    }
    J += cost.terminal(r.x.back());
  } catch (const NumericBlowup&) {
    return r;
  }
  if (std::isfinite(J) && J < kSentinelCost) {
    r.cost = J;
    r.diverged = false;
  }
  return r;
}

Rollout simulate_feedback(const NonlinearSystem& sys, const RunningCost& cost, const Vec& x0,
                          const std::vector<Vec>& u_nom, const std::vector<Vec>& x_nom,
                          const std::vector<Mat>& K) {
  const auto H = static_cast<std::size_t>(sys.horizon);
  if (u_nom.size() != H || x_nom.size() != H + 1 || K.size() != H)
    throw InvalidInput("nominal trajectory and gains must match the horizon");
  Rollout r;
  r.x.push_back(x0);
  double J = 0.0;
  try {
    for (std::size_t t = 0; t < H; ++t) {
      r.u.push_back(u_nom[t] + K[t] * (r.x.back() - x_nom[t]));
      J += cost.stage(r.x.back(), r.u.back());
      r.x.push_back(sys.step(r.x.back(), r.u.back()));
    }
    J += cost.terminal(r.x.back());
  } catch (const NumericBlowup&) {
    return r;
  }
  if (std::isfinite(J) && J < kSentinelCost) {
    r.cost = J;
    r.diverged = false;
  }
  return r;
}

const char* to_string(IlqrStop stop) {
  switch (stop) {
    case IlqrStop::kTolerance: return "tolerance";
    case IlqrStop::kLineSearch: return "line_search";
    case IlqrStop::kMaxIters: return "max_iters";
    case IlqrStop::kDiverged: return "diverged";
  }
  return "unknown";
}

IlqrResult ilqr(const NonlinearSystem& forward, const NonlinearSystem& backward,
                const RunningCost& cost, const Vec& x0, std::vector<Vec> u_init,
                const IlqrOptions& opts) {
  if (forward.horizon != backward.horizon || forward.state_dim != backward.state_dim ||
      forward.control_dim != backward.control_dim)
    throw InvalidInput("forward and backward systems must share dimensions and horizon");
  if (opts.max_iters < 0 || !(opts.shrink > 0.0 && opts.shrink < 1.0) || opts.max_halvings < 0 ||
      !(opts.reg_init > 0.0) || !(opts.reg_factor > 1.0))
    throw InvalidInput("invalid iLQR options");

  const auto H = static_cast<std::size_t>(forward.horizon);
  const int d = forward.control_dim;

  IlqrResult res;
  Rollout nominal = simulate(forward, cost, x0, u_init);
  res.u = nominal.u;
  res.x = nominal.x;
  res.cost = nominal.cost;
  res.cost_trace.push_back(nominal.cost);
  if (nominal.diverged) {
    res.diverged = true;
    res.stop = IlqrStop::kDiverged;
    return res;
  }

  std::vector<Vec> k(H);
  std::vector<Mat> K(H);
  std::vector<Mat> A(H), B(H);

  for (res.iterations = 0; res.iterations < opts.max_iters; ++res.iterations) {
    for (std::size_t t = 0; t < H; ++t)
      backward.discrete_jacobians(nominal.x[t], nominal.u[t], A[t], B[t]);

    // Backward pass, raising the regularization until every control
    // Hessian is positive definite.
    for (double lambda = opts.reg_init;; lambda *= opts.reg_factor) {
      if (lambda > opts.reg_max)
        throw SynthesisFailure("iLQR control Hessian indefinite at maximum regularization");
      const auto term = cost.expand_terminal(nominal.x[H]);
      Vec Vx = term.lx;
      Mat Vxx = term.lxx;
      bool ok = true;
      for (std::size_t t = H; t-- > 0;) {
        const auto e = cost.expand(nominal.x[t], nominal.u[t]);
        const Vec Qx = e.lx + A[t].transpose() * Vx;
        const Vec Qu = e.lu + B[t].transpose() * Vx;
        const Mat Qxx = e.lxx + A[t].transpose() * Vxx * A[t];
        const Mat Quu = e.luu + B[t].transpose() * Vxx * B[t];
        const Mat Qux = e.lux + B[t].transpose() * Vxx * A[t];
        Eigen::LLT<Mat> llt(symmetrized(Quu) + lambda * Mat::Identity(d, d));
        if (llt.info() != Eigen::Success) {
          ok = false;
          break;
        }
        k[t] = -llt.solve(Qu);
        K[t] = -llt.solve(Qux);
        Vx = Qx + K[t].transpose() * Quu * k[t] + K[t].transpose() * Qu + Qux.transpose() * k[t];
        Vxx = symmetrized(Qxx + K[t].transpose() * Quu * K[t] + K[t].transpose() * Qux +
                          Qux.transpose() * K[t]);
      }
      if (ok) break;
    }
    res.K = K;

    // Backtracking on the forward system.
    bool accepted = false;
    Rollout candidate;
    double alpha = 1.0;
    for (int h = 0; h <= opts.max_halvings; ++h, alpha *= opts.shrink) {
      std::vector<Vec> u_ff(H);
      for (std::size_t t = 0; t < H; ++t) u_ff[t] = nominal.u[t] + alpha * k[t];
      candidate = simulate_feedback(forward, cost, x0, u_ff, nominal.x, K);
      if (!candidate.diverged && candidate.cost <= nominal.cost) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.stop = IlqrStop::kLineSearch;
      break;
    }

    const double improvement = (nominal.cost - candidate.cost) / std::max(std::abs(nominal.cost), 1e-300);
    nominal = std::move(candidate);
    res.cost_trace.push_back(nominal.cost);
    if (improvement < opts.rel_tol) {
      ++res.iterations;
      res.stop = IlqrStop::kTolerance;
      break;
    }
  }

  res.u = nominal.u;
  res.x = nominal.x;
  res.cost = nominal.cost;
  return res;
}

// ---- Pendulum --------------------------------------------------------------

double wrap_angle(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(theta + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  return w - std::numbers::pi;
}

NonlinearSystem pendulum_system(const PendulumParams& p) {
  if (!(p.m > 0.0) || !(p.l > 0.0)) throw InvalidInput("pendulum mass and length must be positive");
  if (!(p.tau_min <= p.tau_max)) throw InvalidInput("pendulum torque limits are inverted");
  if (!(p.dt > 0.0) || p.horizon < 1) throw InvalidInput("pendulum needs dt > 0 and H ≥ 1");

  NonlinearSystem sys;
  sys.state_dim = 2;
  sys.control_dim = 1;
  sys.dt = p.dt;
  sys.horizon = p.horizon;
  const double inertia = p.m * p.l * p.l;
  sys.f = [p, inertia](const Vec& x, const Vec& u) {
    const double tau = std::clamp(u(0), p.tau_min, p.tau_max);
    Vec dx(2);
    dx << x(1), tau / inertia - p.gravity_sign * p.g * std::sin(x(0)) / p.l;
    return dx;
  };
  sys.dfdx = [p](const Vec& x, const Vec&) {
    Mat J(2, 2);
    J << 0.0, 1.0, -p.gravity_sign * p.g * std::cos(x(0)) / p.l, 0.0;
    return J;
  };
  sys.dfdu = [p, inertia](const Vec&, const Vec& u) {
    const bool inside = u(0) >= p.tau_min && u(0) <= p.tau_max;
    Mat J(2, 1);
    J << 0.0, inside ? 1.0 / inertia : 0.0;
    return J;
  };
  return sys;
}

RunningCost pendulum_cost(double torque_weight) {
  RunningCost c;
  c.stage = [torque_weight](const Vec& x, const Vec& u) {
    const double th = wrap_angle(x(0));
    return torque_weight * u(0) * u(0) + th * th;
  };
  c.terminal = [](const Vec& x) {
    const double th = wrap_angle(x(0));
    return th * th;
  };
  c.stage_expansion = [torque_weight](const Vec& x, const Vec& u) {
    StageExpansion e;
    e.lx = Vec::Zero(2);
    e.lx(0) = 2.0 * wrap_angle(x(0));
    e.lu = Vec::Constant(1, 2.0 * torque_weight * u(0));
    e.lxx = Mat::Zero(2, 2);
    e.lxx(0, 0) = 2.0;
    e.luu = Mat::Constant(1, 1, 2.0 * torque_weight);
    e.lux = Mat::Zero(1, 2);
    return e;
  };
  c.terminal_expansion = [](const Vec& x) {
    TerminalExpansion e;
    e.lx = Vec::Zero(2);
    e.lx(0) = 2.0 * wrap_angle(x(0));
    e.lxx = Mat::Zero(2, 2);
    e.lxx(0, 0) = 2.0;
    return e;
  };
  return c;
}

// ---- Planar quadrotor --------------------------------------------------------

NonlinearSystem quadrotor_system(const QuadrotorParams& p) {
  if (!(p.m > 0.0) || !(p.l > 0.0) || !(p.J > 0.0))
    throw InvalidInput("quadrotor m, l and J must be positive");
  if (!(p.dt > 0.0) || p.horizon < 1) throw InvalidInput("quadrotor needs dt > 0 and H ≥ 1");

  NonlinearSystem sys;
  sys.state_dim = 6;
  sys.control_dim = 2;
  sys.dt = p.dt;
  sys.horizon = p.horizon;
  const double arm = p.l / (2.0 * p.J);
  sys.f = [p, arm](const Vec& x, const Vec& u) {
    const double thrust = (u(0) + u(1)) / p.m;
    Vec dx(6);
    dx << x(3), x(4), x(5), thrust * std::sin(x(2)) + p.eta * x(0),
        thrust * std::cos(x(2)) - p.g + p.eta * x(1), arm * (u(1) - u(0));
    return dx;
  };
  sys.dfdx = [p](const Vec& x, const Vec& u) {
    const double thrust = (u(0) + u(1)) / p.m;
    Mat J = Mat::Zero(6, 6);
    J(0, 3) = J(1, 4) = J(2, 5) = 1.0;
    J(3, 0) = p.eta;
    J(3, 2) = thrust * std::cos(x(2));
    J(4, 1) = p.eta;
    J(4, 2) = -thrust * std::sin(x(2));
    return J;
  };
  sys.dfdu = [p, arm](const Vec& x, const Vec&) {
    Mat J = Mat::Zero(6, 2);
    J(3, 0) = J(3, 1) = std::sin(x(2)) / p.m;
    J(4, 0) = J(4, 1) = std::cos(x(2)) / p.m;
    J(5, 0) = -arm;
    J(5, 1) = arm;
    return J;
  };
  return sys;
}

RunningCost quadrotor_cost(const Mat& Q, const Mat& R, const Mat& Qf, const Vec& x_goal,
                           const Vec& u_hover) {
  if (Q.rows() != 6 || Q.cols() != 6 || Qf.rows() != 6 || Qf.cols() != 6 || R.rows() != 2 ||
      R.cols() != 2 || x_goal.size() != 6 || u_hover.size() != 2)
    throw InvalidInput("quadrotor cost expects 6×6 Q, Q_f, 2×2 R, 6-vector goal, 2-vector hover");
  const Mat Qs = symmetrized(Q);
  const Mat Rs = symmetrized(R);
  const Mat Qfs = symmetrized(Qf);
  RunningCost c;
  c.stage = [=](const Vec& x, const Vec& u) {
    const Vec dx = x - x_goal;
    const Vec du = u - u_hover;
    return dx.dot(Qs * dx) + du.dot(Rs * du);
  };
  c.terminal = [=](const Vec& x) {
    const Vec dx = x - x_goal;
    return dx.dot(Qfs * dx);
  };
  c.stage_expansion = [=](const Vec& x, const Vec& u) {
    return StageExpansion{2.0 * Qs * (x - x_goal), 2.0 * Rs * (u - u_hover), 2.0 * Qs, 2.0 * Rs,
                          Mat::Zero(2, 6)};
  };
  c.terminal_expansion = [=](const Vec& x) {
    return TerminalExpansion{2.0 * Qfs * (x - x_goal), 2.0 * Qfs};
  };
  return c;
}

}  // namespace ilcgap
