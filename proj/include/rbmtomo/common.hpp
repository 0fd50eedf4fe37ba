#ifndef RBMTOMO_COMMON_HPP
#define RBMTOMO_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rbmtomo {

// Error taxonomy; the CLI maps these onto exit codes.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ProvenanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Basis convention: configuration index = sum_i sigma_i 2^(N-i), so site 1 is
// the most significant bit and index order equals lexicographic order of the
// bit strings.
using BasisIndex = std::uint32_t;

inline int bit_at(BasisIndex s, int site, int n_sites) {
    return static_cast<int>((s >> (n_sites - site)) & 1u);
}

inline BasisIndex flip_site(BasisIndex s, int site, int n_sites) {
    return s ^ (BasisIndex{1} << (n_sites - site));
}

inline std::string index_to_string(BasisIndex s, int n_sites) {
    std::string out(static_cast<std::size_t>(n_sites), '0');
    for (int i = 1; i <= n_sites; ++i)
        if (bit_at(s, i, n_sites)) out[static_cast<std::size_t>(i - 1)] = '1';
    return out;
}

inline BasisIndex string_to_index(const std::string& bits) {
    BasisIndex s = 0;
    for (char ch : bits) {
        if (ch != '0' && ch != '1')
            throw ArgumentError("bit string must contain only '0'/'1', got '" +
                                std::string(1, ch) + "'");
        s = (s << 1) | static_cast<BasisIndex>(ch == '1');
    }
    return s;
}

// SplitMix64: tiny deterministic PRNG used for every stochastic operation in
// the library. We avoid std::uniform_*_distribution so that seeded runs are
// bit-reproducible independent of the standard library implementation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream-splitting rule: child streams are derived from a master seed and a
// stream index by hashing both through mix64. Disorder realizations, Gibbs
// chains and minibatch entries each get their own stream id, which makes the
// per-item work order-independent and safe to parallelize.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(mix64(master) ^ mix64(stream ^ 0x5851f42d4c957f2dULL));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    Rng(std::uint64_t master, std::uint64_t stream) : state_(split_seed(master, stream)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Marsaglia polar method; deterministic given the stream.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

constexpr double kTwoPi = 6.283185307179586476925286766559;

} // namespace rbmtomo

#endif
