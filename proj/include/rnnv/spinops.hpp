#pragma once
// operator algebra for the two-spin-1/2 Hilbert space: basis states,
// angular momenta, spherical tensors, single-transition operators, rotations.
//
// conventions (fixed project-wide):
//   Zeeman product basis ordered {|aa>, |ab>, |ba>, |bb>}
//   R_chi(theta) = exp(-i theta I_chi)          (active rotations)
//   rotation(alpha,beta,gamma) = R_z(alpha) R_y(beta) R_z(gamma)
//   D^1_{m'm}(alpha,beta,gamma) = exp(-i m' alpha) d^1_{m'm}(beta) exp(-i m gamma)

#include <Eigen/Dense>
#include <complex>

#include "rnnv/context.hpp"

namespace rnnv {

using Complex = std::complex<double>;
using Operator = Eigen::Matrix4cd;
using StateVector = Eigen::Vector4cd;
using Matrix2 = Eigen::Matrix2cd;

enum class Axis { x, y, z, plus, minus };
enum class Branch { plus, minus };

struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

struct STStates {
  StateVector S0, Tp1, T0, Tm1;
};

// single-spin operator embedded in the two-spin space (identity on the other spin)
Operator angular_momentum(int spin_index, Axis axis);

// I1a + I2a
Operator total_angular_momentum(Axis axis);

STStates singlet_triplet_states();

// particle-exchange operator (12)
Operator exchange_operator();

// rank-1 spherical tensors: gerade T^g_{1m} (built from total shift operators)
// and ungerade T^u_{1m} = |T_m><S0|
Operator tensor_gerade(int m);
Operator tensor_ungerade(int m);

// single-transition operators on the |T_{+/-1}>, |S0> two-level subspaces
Operator single_transition(Axis axis, Branch branch);

// total-spin rotations on the 4-dim space
Operator rotation_axis(double theta, Axis axis);
Operator rotation(const EulerAngles& omega);

// rank-1 reduced Wigner element d^1_{mu',mu}(beta), closed form
double wigner_d1(int mu_prime, int mu, double beta);

// full rank-1 Wigner element D^1_{mu',mu}(Omega)
Complex wigner_D1(int mu_prime, int mu, const EulerAngles& omega);

// --- SU(2) helpers used by the sequence/symmetry machinery ----------------

// exp(-i flip (cos(phase) Ix + sin(phase) Iy)) on a single spin
Matrix2 su2_rotation(double flip, double phase);

// exp(-i angle Iz) on a single spin
Matrix2 su2_z(double angle);

// kron(u, u): simultaneous single-spin rotation on both spins
Operator two_spin_rotation(const Matrix2& u);

// Euler decomposition of an SU(2) element, R_z(a) R_y(b) R_z(g) with
// beta in [0, pi]; at gimbal lock (sin beta = 0) gamma is held at
// gamma_hint and alpha absorbs the remainder.
EulerAngles su2_euler_angles(const Matrix2& u, double gamma_hint = 0.0);

// Hilbert-Schmidt inner product <A,B> = tr(A^dag B)
Complex hs_inner(const Operator& a, const Operator& b);

} // namespace rnnv
