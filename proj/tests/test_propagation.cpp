#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bloc/models.hpp"
#include "bloc/propagation.hpp"
#include "bloc/units.hpp"

using namespace bloc;

namespace {

SystemModel random_dipole_system(int dim, std::mt19937& rng) {
  std::normal_distribution<double> dist;
  RealVector e(dim);
  e[0] = 0.0;
  for (int i = 1; i < dim; ++i) e[i] = e[i - 1] + 500.0 + 400.0 * std::abs(dist(rng));
  RealMatrix mu(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c <= r; ++c) mu(r, c) = mu(c, r) = dist(rng);
  return build_nlevel_dipole(e, mu);
}

ControlField band_limited_random_field(const TimeGrid& g, std::mt19937& rng,
                                       double amp = 0.02) {
  std::normal_distribution<double> dist;
  std::uniform_int_distribution<int> bin(5, 40);
  ControlField f;
  f.samples.setZero(g.n_nodes());
  for (int c = 0; c < 6; ++c) {
    const double k = bin(rng);
    const double phase = dist(rng);
    const double a = amp * dist(rng);
    for (int j = 0; j < g.n_nodes(); ++j)
      f.samples[j] += a * std::cos(2.0 * M_PI * k * j / g.n_nodes() + phase);
  }
  return f;
}

StateVector random_state(int dim, std::mt19937& rng) {
  std::normal_distribution<double> dist;
  StateVector s(dim);
  for (int i = 0; i < dim; ++i) s[i] = Complex(dist(rng), dist(rng));
  s.normalize();
  return s;
}

ComplexMatrix random_hermitian(int dim, std::mt19937& rng) {
  std::normal_distribution<double> dist;
  ComplexMatrix h(dim, dim);
  for (int r = 0; r < dim; ++r) {
    h(r, r) = dist(rng);
    for (int c = 0; c < r; ++c) {
      h(r, c) = Complex(dist(rng), dist(rng));
      h(c, r) = std::conj(h(r, c));
    }
  }
  return h;
}

} // namespace

TEST_CASE("interaction prefactor") {
  std::mt19937 rng(1);
  const SystemModel raman =
      make_system((RealVector(2) << 0.0, 3000.0).finished(),
                  RealMatrix::Identity(2, 2), InteractionKind::Raman);
  CHECK(interaction_prefactor(0.0, 123.0, raman) == 0.0);
  CHECK(interaction_prefactor(2.0, 3.0, raman) == doctest::Approx(-3.0));
  const double e = 0.7;
  CHECK(interaction_prefactor(e, e, raman) == doctest::Approx(-0.5 * e * e));

  const SystemModel dip = random_dipole_system(3, rng);
  CHECK(interaction_prefactor(0.25, 0.0, dip) == doctest::Approx(-0.25));
}

TEST_CASE("chebyshev step: zero and diagonal Hamiltonians") {
  PropagatorConfig cfg;
  std::mt19937 rng(2);
  const StateVector psi = random_state(5, rng);

  const ComplexMatrix zero = ComplexMatrix::Zero(5, 5);
  const StateVector same = chebyshev_step(zero, psi, 0.7, cfg);
  CHECK((same - psi).norm() < 1e-14);

  ComplexMatrix diag = ComplexMatrix::Zero(5, 5);
  for (int i = 0; i < 5; ++i) diag(i, i) = 0.1 * (i + 1);
  StateVector basis = StateVector::Zero(5);
  basis[3] = 1.0;
  const StateVector out = chebyshev_step(diag, basis, 2.0, cfg);
  const Complex expected = std::exp(Complex(0.0, -0.4 * 2.0));
  CHECK(std::abs(out[3] - expected) < 1e-12);
}

TEST_CASE("chebyshev step matches dense exponential") {
  PropagatorConfig cfg;
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix h = random_hermitian(8, rng);
    const StateVector psi = random_state(8, rng);
    const StateVector cheb = chebyshev_step(h, psi, 1.0, cfg);
    // Oracle: eigendecomposition-based exponential.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    StateVector in_eig = es.eigenvectors().adjoint() * psi;
    for (int i = 0; i < 8; ++i)
      in_eig[i] *= std::exp(Complex(0.0, -es.eigenvalues()[i]));
    const StateVector exact = es.eigenvectors() * in_eig;
    CHECK((cheb - exact).norm() <= 1e-10);
  }
}

TEST_CASE("chebyshev order cap signals oversized steps") {
  PropagatorConfig cfg;
  cfg.max_order = 10;
  std::mt19937 rng(4);
  const ComplexMatrix h = 100.0 * random_hermitian(6, rng);
  const StateVector psi = random_state(6, rng);
  CHECK_THROWS_AS(chebyshev_step(h, psi, 10.0, cfg), std::runtime_error);
}

TEST_CASE("free evolution accumulates eigenstate phases") {
  std::mt19937 rng(5);
  const SystemModel sys = random_dipole_system(6, rng);
  const TimeGrid grid(500, 4.0);
  std::vector<ControlField> fields(1);
  fields[0].samples = RealVector::Zero(grid.n_nodes());

  StateVector psi0 = StateVector::Zero(6);
  psi0[2] = 1.0;
  const Trajectory traj = propagate(sys, fields, psi0, grid);
  const Complex expected = std::exp(Complex(0.0, -sys.energies[2] * grid.total_time()));
  CHECK(std::abs(traj.final_state()[2] - expected) < 1e-9);
}

TEST_CASE("resonant pi pulse transfers a two-level system") {
  // Weak resonant drive, pulse area pi: population inversion in the
  // rotating-wave regime (analytic Rabi oracle).
  const double delta_cm = 2000.0;
  const double delta = units::cm_to_hartree(delta_cm);
  const double mu01 = 1.0;
  const double amp = delta / 500.0;
  const double T = M_PI / (amp * mu01);

  RealVector e(2);
  e << 0.0, delta_cm;
  RealMatrix mu = RealMatrix::Zero(2, 2);
  mu(0, 1) = mu(1, 0) = mu01;
  const SystemModel sys = build_nlevel_dipole(e, mu);

  const int n_steps = 40000;
  const TimeGrid grid = TimeGrid::from_total_time(T, n_steps);
  std::vector<ControlField> fields(1);
  fields[0].samples.resize(grid.n_nodes());
  for (int j = 0; j < grid.n_nodes(); ++j)
    fields[0].samples[j] = amp * std::cos(delta * grid.node(j));

  StateVector psi0 = StateVector::Zero(2);
  psi0[0] = 1.0;
  const Trajectory traj = propagate(sys, fields, psi0, grid);
  CHECK(std::norm(traj.final_state()[1]) > 0.999);
}

TEST_CASE("chebyshev and reference propagators agree") {
  std::mt19937 rng(6);
  PropagatorConfig cfg;
  for (int trial = 0; trial < 10; ++trial) {
    const SystemModel sys = random_dipole_system(8, rng);
    const TimeGrid grid(400, 3.0);
    std::vector<ControlField> fields = {band_limited_random_field(grid, rng)};
    const StateVector psi0 = random_state(8, rng);

    const Trajectory a = propagate(sys, fields, psi0, grid, cfg);
    const Trajectory b = reference_propagate(sys, fields, psi0, grid);
    REQUIRE(a.states.size() == b.states.size());
    for (size_t i = 0; i < a.states.size(); ++i)
      CHECK((a.states[i] - b.states[i]).norm() <= 1e-8);
  }
}

TEST_CASE("reference propagator first-order limit") {
  std::mt19937 rng(7);
  const SystemModel sys = random_dipole_system(5, rng);
  StateVector psi0 = random_state(5, rng);

  // One tiny step: (psi(dt) - psi0) / dt -> -i H psi0.
  const double eps_val = 0.01;
  for (double dt : {1e-4, 1e-5}) {
    const TimeGrid grid(2, dt);
    std::vector<ControlField> fields(1);
    fields[0].samples = RealVector::Constant(grid.n_nodes(), eps_val);
    const Trajectory traj = reference_propagate(sys, fields, psi0, grid);
    const StateVector derivative = (traj.states[1] - psi0) / dt;
    const ComplexMatrix h =
        (RealMatrix(sys.energies.asDiagonal()) - eps_val * sys.coupling_op).cast<Complex>();
    const StateVector expected = Complex(0.0, -1.0) * (h * psi0);
    CHECK((derivative - expected).norm() < std::max(1e-6, 10.0 * dt));
  }
}

TEST_CASE("norm and energy conservation along trajectories") {
  std::mt19937 rng(8);
  const SystemModel sys = random_dipole_system(8, rng);
  const TimeGrid grid(600, 2.5);
  std::vector<ControlField> fields = {band_limited_random_field(grid, rng)};
  const StateVector psi0 = random_state(8, rng);

  const Trajectory traj = propagate(sys, fields, psi0, grid);
  for (const auto& s : traj.states) CHECK(std::abs(s.norm() - 1.0) < 1e-6);

  // Zero field: <H0> is conserved.
  fields[0].samples.setZero();
  const Trajectory free_traj = propagate(sys, fields, psi0, grid);
  const RealVector& e = sys.energies;
  auto energy = [&](const StateVector& s) {
    double acc = 0.0;
    for (int i = 0; i < s.size(); ++i) acc += e[i] * std::norm(s[i]);
    return acc;
  };
  const double e0 = energy(free_traj.states.front());
  for (const auto& s : free_traj.states) CHECK(std::abs(energy(s) - e0) < 1e-10);
}

TEST_CASE("time reversal recovers the initial state") {
  std::mt19937 rng(9);
  const SystemModel sys = random_dipole_system(6, rng);
  const TimeGrid grid(500, 3.0);
  std::vector<ControlField> fields = {band_limited_random_field(grid, rng)};
  const StateVector psi0 = random_state(6, rng);

  const Trajectory fwd = propagate(sys, fields, psi0, grid);
  const Trajectory back = propagate(sys, fields, fwd.final_state(), grid, {}, 1, true);
  CHECK((back.states.front() - psi0).norm() < 1e-6);
}

TEST_CASE("field count and stride validation") {
  std::mt19937 rng(10);
  const SystemModel sys = random_dipole_system(4, rng);
  const TimeGrid grid(100, 1.0);
  const StateVector psi0 = random_state(4, rng);
  std::vector<ControlField> two(2);
  two[0].samples = RealVector::Zero(grid.n_nodes());
  two[1].samples = RealVector::Zero(grid.n_nodes());
  CHECK_THROWS_AS(propagate(sys, two, psi0, grid), std::invalid_argument);

  std::vector<ControlField> one(1);
  one[0].samples = RealVector::Zero(grid.n_nodes());
  const Trajectory strided = propagate(sys, one, psi0, grid, {}, 7);
  CHECK(static_cast<int>(strided.states.size()) == 100 / 7 + 2);
}

TEST_CASE("reference propagator dimension guard") {
  std::mt19937 rng(11);
  const SystemModel sys = random_dipole_system(65, rng);
  const TimeGrid grid(10, 1.0);
  std::vector<ControlField> fields(1);
  fields[0].samples = RealVector::Zero(grid.n_nodes());
  StateVector psi0 = StateVector::Zero(65);
  psi0[0] = 1.0;
  CHECK_THROWS_AS(reference_propagate(sys, fields, psi0, grid), std::invalid_argument);
}
