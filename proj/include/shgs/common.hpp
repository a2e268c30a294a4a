#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

namespace shgs {

// Error categories, mapped to CLI exit codes 1/2/3.
struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using rng_t = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic seed tree: derive_seed(s, a, b) != derive_seed(s, a') for
// any distinct salt paths, so concurrent consumers never share a stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    return splitmix64(base ^ splitmix64(salt));
}

template <class... Rest>
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt, Rest... rest) {
    return derive_seed(derive_seed(base, salt), rest...);
}

// Fixed salts for the independent random streams of one run.
namespace seed_salt {
constexpr std::uint64_t holdout = 0xA1;
constexpr std::uint64_t kfold = 0xA2;
constexpr std::uint64_t background = 0xB1;
constexpr std::uint64_t trial = 0xB2;
constexpr std::uint64_t init = 0xC1;
constexpr std::uint64_t shuffle = 0xC2;
}  // namespace seed_salt

// round-half-up, used for stratified class counts
inline long long round_half_up(double x) {
    return static_cast<long long>(std::floor(x + 0.5));
}

// 6 significant digits, the precision of all reals in result files
inline std::string fmt_g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace shgs
