#include "rbmtomo/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <condition_variable>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace rbmtomo {

double PiecewiseLinear::operator()(double t) const {
    if (points.empty()) throw ArgumentError("PiecewiseLinear: no points");
    if (t <= points.front().first) return points.front().second;
    if (t >= points.back().first) return points.back().second;
    for (std::size_t k = 1; k < points.size(); ++k) {
        if (t <= points[k].first) {
            const auto& [t0, v0] = points[k - 1];
            const auto& [t1, v1] = points[k];
            if (t1 == t0) return v1;
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        }
    }
    return points.back().second;
}

void SweepProfile::validate() const {
    if (total_time_us <= 0.0) throw ArgumentError("SweepProfile: total_time_us must be positive");
    if (omega_mhz.points.empty() || delta_mhz.points.empty())
        throw ArgumentError("SweepProfile: omega/delta profiles must be defined");
    if (!std::is_sorted(checkpoints_us.begin(), checkpoints_us.end()))
        throw ArgumentError("SweepProfile: checkpoints must be sorted");
    for (double t : checkpoints_us)
        if (t < 0.0 || t > total_time_us + 1e-12)
            throw ArgumentError("SweepProfile: checkpoint outside [0, total_time]");
}

SweepProfile default_sweep(double total_time_us, int n_checkpoints, double omega_peak_mhz,
                           double delta_start_mhz, double delta_end_mhz) {
    SweepProfile s;
    s.total_time_us = total_time_us;
    s.omega_mhz.points = {{0.0, 0.0},
                          {0.1 * total_time_us, omega_peak_mhz},
                          {0.9 * total_time_us, omega_peak_mhz},
                          {total_time_us, 0.0}};
    s.delta_mhz.points = {{0.0, delta_start_mhz}, {total_time_us, delta_end_mhz}};
    for (int k = 1; k <= n_checkpoints; ++k)
        s.checkpoints_us.push_back(total_time_us * k / n_checkpoints);
    return s;
}

void LindbladParams::validate() const {
    if (gamma_rg < 0.0 || gamma_gg < 0.0) throw ArgumentError("LindbladParams: negative rate");
    if (doppler_rms_mhz < 0.0) throw ArgumentError("LindbladParams: negative doppler width");
    if (n_disorder < 1) throw ArgumentError("LindbladParams: n_disorder must be >= 1");
}

Eigen::VectorXd doppler_shifts(const LindbladParams& lp, int n_sites, std::uint64_t master_seed,
                               int realization) {
    Rng rng(master_seed, static_cast<std::uint64_t>(realization));
    Eigen::VectorXd shifts(n_sites);
    for (int i = 0; i < n_sites; ++i) shifts(i) = lp.doppler_rms_mhz * rng.gaussian();
    return shifts;
}

namespace {

// Master-equation right-hand side, written against the bit structure of the
// operators instead of dense matrix products:
//  * diagonal Hamiltonian terms and the local dissipator pieces reduce to an
//    elementwise multiply,
//  * the sigma^x sum reduces to column gathers plus one conjugate transpose
//    (valid because every RK4 stage matrix stays exactly Hermitian),
//  * the |g><r| jump reduces to block-shifted adds.
class LindbladRhs {
  public:
    LindbladRhs(const HamiltonianParams& hp, const LindbladParams& lp,
                const Eigen::VectorXd& disorder_mhz, double angular)
        : n_(hp.n_sites), dim_(Eigen::Index{1} << hp.n_sites), angular_(angular),
          gamma_rg_(lp.gamma_rg) {
        Eigen::VectorXd diag_static = hamiltonian_diagonal(
            HamiltonianParams{hp.n_sites, hp.v_nn, hp.omega, 0.0, hp.interaction_cutoff});
        Eigen::VectorXd n_exc(dim_);
        for (Eigen::Index s = 0; s < dim_; ++s) {
            const auto idx = static_cast<BasisIndex>(s);
            double shift = 0.0;
            int cnt = 0;
            for (int i = 1; i <= n_; ++i) {
                if (bit_at(idx, i, n_)) {
                    shift += disorder_mhz(i - 1);
                    ++cnt;
                }
            }
            n_exc(s) = cnt;
            diag_static(s) = angular * (diag_static(s) - shift);
        }

        real_coef_.resize(dim_, dim_);
        imag_static_.resize(dim_, dim_);
        n_diff_.resize(dim_, dim_);
        for (Eigen::Index b = 0; b < dim_; ++b) {
            for (Eigen::Index a = 0; a < dim_; ++a) {
                const int xdiff = __builtin_popcountll(static_cast<unsigned long long>(a ^ b));
                real_coef_(a, b) = -0.5 * lp.gamma_gg * xdiff -
                                   0.5 * lp.gamma_rg * (n_exc(a) + n_exc(b));
                imag_static_(a, b) = diag_static(b) - diag_static(a);
                n_diff_(a, b) = n_exc(a) - n_exc(b);
            }
        }
    }

    double omega_angular(const SweepProfile& sweep, double t) const {
        return angular_ * sweep.omega_mhz(t);
    }
    double delta_angular(const SweepProfile& sweep, double t) const {
        return angular_ * sweep.delta_mhz(t);
    }

    void operator()(double omega_ang, double delta_ang, const Eigen::MatrixXcd& rho,
                    Eigen::MatrixXcd& out, Eigen::MatrixXcd& scratch) const {
        // local terms: out = (R + i(I0 + delta*ND)) .* rho
        const Eigen::Index total = dim_ * dim_;
        const std::complex<double>* rp = rho.data();
        std::complex<double>* op = out.data();
        const double* rc = real_coef_.data();
        const double* is = imag_static_.data();
        const double* nd = n_diff_.data();
        for (Eigen::Index k = 0; k < total; ++k) {
            const double re = rc[k];
            const double im = is[k] + delta_ang * nd[k];
            const double x = rp[k].real();
            const double y = rp[k].imag();
            op[k] = std::complex<double>(re * x - im * y, re * y + im * x);
        }

        if (omega_ang != 0.0) {
            // A = rho * S, S = sum_i sx_i; then -i[-omega/2 S, rho] = i omega/2 (A^+ - A)
            scratch.setZero();
            for (int i = 1; i <= n_; ++i) {
                const Eigen::Index m = Eigen::Index{1} << (n_ - i);
                for (Eigen::Index base = 0; base < dim_; base += 2 * m) {
                    scratch.middleCols(base, m) += rho.middleCols(base + m, m);
                    scratch.middleCols(base + m, m) += rho.middleCols(base, m);
                }
            }
            const std::complex<double> factor(0.0, 0.5 * omega_ang);
            out.noalias() += factor * (scratch.adjoint() - scratch);
        }

        if (gamma_rg_ != 0.0) {
            // out[a,b] += gamma_rg rho[a|m, b|m] on the (0,0) bit blocks
            for (int i = 1; i <= n_; ++i) {
                const Eigen::Index m = Eigen::Index{1} << (n_ - i);
                for (Eigen::Index bh = 0; bh < dim_; bh += 2 * m) {
                    for (Eigen::Index bl = 0; bl < m; ++bl) {
                        const Eigen::Index b0 = bh + bl;
                        auto dst = out.col(b0);
                        auto src = rho.col(b0 + m);
                        for (Eigen::Index ah = 0; ah < dim_; ah += 2 * m)
                            dst.segment(ah, m) += gamma_rg_ * src.segment(ah + m, m);
                    }
                }
            }
        }
    }

    Eigen::Index dim() const { return dim_; }

  private:
    int n_;
    Eigen::Index dim_;
    double angular_;
    double gamma_rg_;
    Eigen::MatrixXd real_coef_;
    Eigen::MatrixXd imag_static_;
    Eigen::MatrixXd n_diff_;
};

} // namespace

std::vector<QuantumState> evolve_lindblad(const QuantumState& initial, const SweepProfile& sweep,
                                          const HamiltonianParams& hp, const LindbladParams& lp,
                                          const Eigen::VectorXd& disorder_mhz,
                                          const LindbladOptions& options) {
    sweep.validate();
    hp.validate();
    lp.validate();
    if (initial.n_sites() != hp.n_sites)
        throw ArgumentError("evolve_lindblad: state/Hamiltonian size mismatch");
    if (hp.n_sites > 8)
        throw ResourceError("evolve_lindblad: N > 8 exceeds the density-matrix cap");
    if (disorder_mhz.size() != hp.n_sites)
        throw ArgumentError("evolve_lindblad: disorder vector must have one entry per site");
    initial.validate();

    const double dt_max = options.dt_us > 0.0 ? options.dt_us : sweep.total_time_us / 4096.0;
    LindbladRhs rhs(hp, lp, disorder_mhz, options.angular_factor);
    const Eigen::Index dim = rhs.dim();

    Eigen::MatrixXcd rho = initial.density_matrix();
    Eigen::MatrixXcd k(dim, dim), acc(dim, dim), stage(dim, dim), scratch(dim, dim);

    std::vector<double> emit = sweep.checkpoints_us;
    if (emit.empty()) emit.push_back(sweep.total_time_us);

    std::vector<QuantumState> out;
    out.reserve(emit.size());
    double t = 0.0;
    for (double target : emit) {
        const double span = target - t;
        if (span < -1e-12) throw ArgumentError("evolve_lindblad: checkpoints must be sorted");
        const int n_steps = std::max<int>(1, static_cast<int>(std::ceil(span / dt_max - 1e-12)));
        const double h = span / n_steps;
        for (int step = 0; step < n_steps && span > 0.0; ++step) {
            const double t0 = t + step * h;
            const double t_mid = t0 + 0.5 * h;
            const double t_end = t0 + h;

            rhs(rhs.omega_angular(sweep, t0), rhs.delta_angular(sweep, t0), rho, k, scratch);
            acc = rho + (h / 6.0) * k;
            stage = rho + (0.5 * h) * k;
            rhs(rhs.omega_angular(sweep, t_mid), rhs.delta_angular(sweep, t_mid), stage, k, scratch);
            acc += (h / 3.0) * k;
            stage = rho + (0.5 * h) * k;
            rhs(rhs.omega_angular(sweep, t_mid), rhs.delta_angular(sweep, t_mid), stage, k, scratch);
            acc += (h / 3.0) * k;
            stage = rho + h * k;
            rhs(rhs.omega_angular(sweep, t_end), rhs.delta_angular(sweep, t_end), stage, k, scratch);
            acc += (h / 6.0) * k;
            rho.swap(acc);
        }
        t = target;

        const double trace_drift = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
        if (trace_drift >= options.trace_tol)
            throw NumericError("evolve_lindblad: trace drift " + std::to_string(trace_drift) +
                               " at t=" + std::to_string(t) + " us; reduce the step size");
        QuantumState state = QuantumState::mixed(hp.n_sites, rho);
        // Hermiticity is preserved exactly by the update; the spectrum floor
        // is bounded by the integrator accuracy, not machine precision.
        if (options.validate_checkpoints) state.validate(1e-9, 10.0 * options.trace_tol);
        out.push_back(std::move(state));
    }
    return out;
}

namespace {

// Pairwise (binary-counter) accumulator over realization index; the reduction
// tree depends only on the index sequence, so averages are identical for any
// thread count.
class PairwiseMean {
  public:
    void add(std::vector<Eigen::MatrixXcd> item) {
        std::size_t level = 0;
        while (level < stack_.size() && stack_[level].has_value()) {
            auto& held = *stack_[level];
            for (std::size_t c = 0; c < item.size(); ++c) item[c] += held[c];
            stack_[level].reset();
            ++level;
        }
        if (level == stack_.size()) stack_.emplace_back();
        stack_[level] = std::move(item);
        ++count_;
    }

    std::vector<Eigen::MatrixXcd> finish() {
        std::vector<Eigen::MatrixXcd> total;
        for (auto& slot : stack_) {
            if (!slot.has_value()) continue;
            if (total.empty()) {
                total = std::move(*slot);
            } else {
                for (std::size_t c = 0; c < total.size(); ++c) total[c] += (*slot)[c];
            }
        }
        for (auto& m : total) m /= static_cast<double>(count_);
        return total;
    }

  private:
    std::vector<std::optional<std::vector<Eigen::MatrixXcd>>> stack_;
    std::int64_t count_ = 0;
};

} // namespace

std::vector<QuantumState> disorder_averaged_evolution(const QuantumState& initial,
                                                      const SweepProfile& sweep,
                                                      const HamiltonianParams& hp,
                                                      const LindbladParams& lp,
                                                      std::uint64_t master_seed,
                                                      const LindbladOptions& options, int threads) {
    lp.validate();
    const int n_real = lp.n_disorder;
    threads = std::max(1, std::min(threads, n_real));

    LindbladOptions per_run = options;
    per_run.validate_checkpoints = false; // the average is validated instead

    auto run_one = [&](int r) {
        const Eigen::VectorXd shifts = doppler_shifts(lp, hp.n_sites, master_seed, r);
        std::vector<QuantumState> states =
            evolve_lindblad(initial, sweep, hp, lp, shifts, per_run);
        std::vector<Eigen::MatrixXcd> densities;
        densities.reserve(states.size());
        for (auto& s : states) densities.push_back(s.density_matrix());
        return densities;
    };

    PairwiseMean mean;
    if (threads == 1) {
        for (int r = 0; r < n_real; ++r) mean.add(run_one(r));
    } else {
        std::mutex mu;
        std::condition_variable cv;
        std::map<int, std::vector<Eigen::MatrixXcd>> ready;
        int next_job = 0;
        int next_consume = 0;
        const int max_pending = threads + 2;

        auto worker = [&] {
            while (true) {
                int r;
                {
                    std::unique_lock<std::mutex> lock(mu);
                    if (next_job >= n_real) return;
                    r = next_job++;
                }
                auto result = run_one(r);
                std::unique_lock<std::mutex> lock(mu);
                cv.wait(lock, [&] { return static_cast<int>(ready.size()) < max_pending; });
                ready.emplace(r, std::move(result));
                cv.notify_all();
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker);

        while (next_consume < n_real) {
            std::vector<Eigen::MatrixXcd> item;
            {
                std::unique_lock<std::mutex> lock(mu);
                cv.wait(lock, [&] { return ready.count(next_consume) > 0; });
                item = std::move(ready.at(next_consume));
                ready.erase(next_consume);
                cv.notify_all();
            }
            mean.add(std::move(item));
            ++next_consume;
        }
        for (auto& th : pool) th.join();
    }

    std::vector<Eigen::MatrixXcd> averaged = mean.finish();
    std::vector<QuantumState> out;
    out.reserve(averaged.size());
    for (auto& rho : averaged) {
        QuantumState s = QuantumState::mixed(hp.n_sites, std::move(rho));
        if (options.validate_checkpoints) s.validate(1e-9, 10.0 * options.trace_tol);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace rbmtomo
