#ifndef RBMTOMO_LINDBLAD_HPP
#define RBMTOMO_LINDBLAD_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rbmtomo/hamiltonian.hpp"
#include "rbmtomo/state.hpp"

namespace rbmtomo {

/// Piecewise-linear function of time given as sorted (t, value) points;
/// evaluation clamps to the end values outside the node range.
struct PiecewiseLinear {
    std::vector<std::pair<double, double>> points;
    double operator()(double t) const;
};

struct SweepProfile {
    double total_time_us = 0.0;
    PiecewiseLinear omega_mhz; // Omega(t)
    PiecewiseLinear delta_mhz; // Delta(t)
    std::vector<double> checkpoints_us;

    void validate() const;
};

/// Laser sweep used throughout: Delta ramps -10 -> +10 MHz linearly, Omega is
/// a trapezoid 0 -> 2 -> 2 -> 0 MHz with 10% ramps, n equally spaced
/// checkpoints ending exactly at total_time_us.
SweepProfile default_sweep(double total_time_us = 3.4, int n_checkpoints = 15,
                           double omega_peak_mhz = 2.0, double delta_start_mhz = -10.0,
                           double delta_end_mhz = 10.0);

struct LindbladParams {
    double gamma_rg = 0.0;       // 1/us, |g><r| decay rate
    double gamma_gg = 0.0;       // 1/us, |g><g| dephasing rate
    double doppler_rms_mhz = 0.0; // rms width of per-site Gaussian shifts
    int n_disorder = 1;

    void validate() const;
};

struct LindbladOptions {
    double dt_us = 0.0;          // <=0: total_time / 4096
    double angular_factor = kTwoPi; // MHz -> rad/us conversion for coherent terms
    double trace_tol = 1e-6;
    bool validate_checkpoints = true;
};

/// Gaussian per-site Doppler shifts (MHz) for one disorder realization.
/// Streams are split off the master seed by realization index.
Eigen::VectorXd doppler_shifts(const LindbladParams& lp, int n_sites, std::uint64_t master_seed,
                               int realization);

/// Fixed-step RK4 integration of the master equation
///   drho/dt = -i[H(t) + H_dis, rho]
///             + sum_i sum_{c in {rg,gg}} gamma_c (L rho L^+ - {L^+L, rho}/2)
/// with H_dis = -sum_i disorder_mhz[i] n_i. Returns the mixed state at each
/// checkpoint. Throws NumericError if the trace drifts beyond options.trace_tol.
std::vector<QuantumState> evolve_lindblad(const QuantumState& initial, const SweepProfile& sweep,
                                          const HamiltonianParams& hp, const LindbladParams& lp,
                                          const Eigen::VectorXd& disorder_mhz,
                                          const LindbladOptions& options = {});

/// Mean of evolve_lindblad over lp.n_disorder Doppler realizations, averaged
/// checkpoint-wise. Realizations use independent derived seeds and a fixed
/// reduction order, so results do not depend on scheduling.
std::vector<QuantumState> disorder_averaged_evolution(const QuantumState& initial,
                                                      const SweepProfile& sweep,
                                                      const HamiltonianParams& hp,
                                                      const LindbladParams& lp,
                                                      std::uint64_t master_seed,
                                                      const LindbladOptions& options = {},
                                                      int threads = 1);

} // namespace rbmtomo

#endif
