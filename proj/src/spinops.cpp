#include "rnnv/spinops.hpp"

#include <cmath>
#include <stdexcept>

namespace rnnv {

namespace {

const Complex I_unit(0.0, 1.0);

Matrix2 pauli(Axis axis) {
  Matrix2 s = Matrix2::Zero();
  switch (axis) {
    case Axis::x:
      s(0, 1) = 1.0;
      s(1, 0) = 1.0;
      break;
    case Axis::y:
      s(0, 1) = -I_unit;
      s(1, 0) = I_unit;
      break;
    case Axis::z:
      s(0, 0) = 1.0;
      s(1, 1) = -1.0;
      break;
    default:
      throw std::invalid_argument("pauli: axis must be x, y or z");
  }
  return s;
}

Matrix2 single_spin(Axis axis) {
  Matrix2 op = Matrix2::Zero();
  switch (axis) {
    case Axis::plus:
      op(0, 1) = 1.0;
      break;
    case Axis::minus:
      op(1, 0) = 1.0;
      break;
    default:
      op = 0.5 * pauli(axis);
      break;
  }
  return op;
}

Operator kron2(const Matrix2& a, const Matrix2& b) {
  Operator out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

} // namespace

Operator angular_momentum(int spin_index, Axis axis) {
  const Matrix2 op = single_spin(axis);
  const Matrix2 id = Matrix2::Identity();
  if (spin_index == 1) return kron2(op, id);
  if (spin_index == 2) return kron2(id, op);
  throw std::invalid_argument("angular_momentum: spin index must be 1 or 2");
}

Operator total_angular_momentum(Axis axis) {
  return angular_momentum(1, axis) + angular_momentum(2, axis);
}

STStates singlet_triplet_states() {
  const double r = 1.0 / std::sqrt(2.0);
  STStates st;
  st.S0 = StateVector(0.0, r, -r, 0.0);
  st.T0 = StateVector(0.0, r, r, 0.0);
  st.Tp1 = StateVector(1.0, 0.0, 0.0, 0.0);
  st.Tm1 = StateVector(0.0, 0.0, 0.0, 1.0);
  return st;
}

Operator exchange_operator() {
  Operator p = Operator::Zero();
  p(0, 0) = 1.0;
  p(1, 2) = 1.0;
  p(2, 1) = 1.0;
  p(3, 3) = 1.0;
  return p;
}

Operator tensor_gerade(int m) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (m) {
    case 1:
      return -r * (angular_momentum(1, Axis::plus) + angular_momentum(2, Axis::plus));
    case 0:
      return total_angular_momentum(Axis::z);
    case -1:
      return r * (angular_momentum(1, Axis::minus) + angular_momentum(2, Axis::minus));
    default:
      throw std::invalid_argument("tensor_gerade: m must be -1, 0 or +1");
  }
}

Operator tensor_ungerade(int m) {
  const STStates st = singlet_triplet_states();
  const StateVector* tm = nullptr;
  switch (m) {
    case 1: tm = &st.Tp1; break;
    case 0: tm = &st.T0; break;
    case -1: tm = &st.Tm1; break;
    default:
      throw std::invalid_argument("tensor_ungerade: m must be -1, 0 or +1");
  }
  return (*tm) * st.S0.adjoint();
}

Operator single_transition(Axis axis, Branch branch) {
  const STStates st = singlet_triplet_states();
  const StateVector& t = (branch == Branch::plus) ? st.Tp1 : st.Tm1;
  const Operator ts = t * st.S0.adjoint();
  switch (axis) {
    case Axis::x:
      return 0.5 * (ts + ts.adjoint().eval());
    case Axis::y:
      return -0.5 * I_unit * (ts - ts.adjoint().eval());
    case Axis::z:
      return 0.5 * (t * t.adjoint() - st.S0 * st.S0.adjoint());
    default:
      throw std::invalid_argument("single_transition: axis must be x, y or z");
  }
}

Operator rotation_axis(double theta, Axis axis) {
  switch (axis) {
    case Axis::x:
      return two_spin_rotation(su2_rotation(theta, 0.0));
    case Axis::y:
      return two_spin_rotation(su2_rotation(theta, 0.5 * pi));
    case Axis::z:
      return two_spin_rotation(su2_z(theta));
    default:
      throw std::invalid_argument("rotation_axis: axis must be x, y or z");
  }
}

Operator rotation(const EulerAngles& omega) {
  return rotation_axis(omega.alpha, Axis::z) * rotation_axis(omega.beta, Axis::y) *
         rotation_axis(omega.gamma, Axis::z);
}

double wigner_d1(int mu_prime, int mu, double beta) {
  if (mu_prime < -1 || mu_prime > 1 || mu < -1 || mu > 1)
    throw std::invalid_argument("wigner_d1: indices must be in {-1,0,1}");
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  const double r = 1.0 / std::sqrt(2.0);
  if (mu_prime == mu) return (mu == 0) ? c : 0.5 * (1.0 + c);
  if (mu_prime == -mu && mu != 0) return 0.5 * (1.0 - c);
  if (mu_prime == 1 && mu == 0) return -s * r;
  if (mu_prime == 0 && mu == 1) return s * r;
  if (mu_prime == 0 && mu == -1) return -s * r;
  return s * r;  // mu_prime == -1, mu == 0
}

Complex wigner_D1(int mu_prime, int mu, const EulerAngles& omega) {
  return std::exp(-I_unit * (mu_prime * omega.alpha)) * wigner_d1(mu_prime, mu, omega.beta) *
         std::exp(-I_unit * (mu * omega.gamma));
}

Matrix2 su2_rotation(double flip, double phase) {
  const Matrix2 axis = std::cos(phase) * pauli(Axis::x) + std::sin(phase) * pauli(Axis::y);
  return std::cos(0.5 * flip) * Matrix2::Identity() - I_unit * std::sin(0.5 * flip) * axis;
}

Matrix2 su2_z(double angle) {
  Matrix2 u = Matrix2::Zero();
  u(0, 0) = std::exp(-I_unit * (0.5 * angle));
  u(1, 1) = std::exp(I_unit * (0.5 * angle));
  return u;
}

Operator two_spin_rotation(const Matrix2& u) {
  return kron2(u, u);
}

EulerAngles su2_euler_angles(const Matrix2& u, double gamma_hint) {
  // assumes special-unitary input (all internal rotations have traceless
  // generators); normalize away any numerical determinant drift.
  Matrix2 v = u;
  const Complex det = v(0, 0) * v(1, 1) - v(0, 1) * v(1, 0);
  v /= std::sqrt(det);
  const Complex a = v(0, 0);
  const Complex b = v(0, 1);
  const double absa = std::abs(a);
  const double absb = std::abs(b);
  EulerAngles e;
  e.beta = std::atan2(2.0 * absa * absb, absa * absa - absb * absb);
  const double sinb = 2.0 * absa * absb;
  if (sinb < 1e-9) {
    e.gamma = gamma_hint;
    if (absa >= absb)
      e.alpha = -2.0 * std::arg(a) - e.gamma;  // beta ~ 0
    else
      e.alpha = e.gamma - 2.0 * std::arg(-b);  // beta ~ pi
  } else {
    const Complex zeta = -2.0 * std::conj(a) * b;  // sin(beta) e^{i gamma}
    const Complex xi = -2.0 * a * b;               // sin(beta) e^{-i alpha}
    e.gamma = std::arg(zeta);
    e.alpha = -std::arg(xi);
  }
  return e;
}

Complex hs_inner(const Operator& a, const Operator& b) {
  return (a.adjoint() * b).trace();
}

} // namespace rnnv
