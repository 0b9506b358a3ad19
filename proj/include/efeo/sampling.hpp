#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "efeo/problem.hpp"

namespace efeo {

/// f(x)   = m0 sin(n0 x) + m1 cos(n1 x)                         (1D)
/// f(x,y) = m0 sin(n0 x + n1 y) + m1 cos(n2 x + n3 y)           (2D)
/// With compat_factor the 1D forcing is multiplied by x so that f(0) = 0.
struct ForcingParams {
    int dimension = 1;
    double m0 = 0.0;
    double m1 = 0.0;
    std::array<double, 4> n{0.0, 0.0, 0.0, 0.0};
    bool compat_factor = false;

    static ForcingParams one_d(double m0, double m1, double n0, double n1, bool compat = false);
    static ForcingParams two_d(double m0, double m1, double n0, double n1, double n2, double n3);

    /// Flat parameter list in the order m0, m1, n0, n1[, n2, n3].
    std::vector<double> flat() const;
    bool operator==(const ForcingParams&) const = default;
};

struct Range {
    double lo = -2.0;
    double hi = 2.0;
};

struct SamplingSpec {
    Range amplitude{-2.0, 2.0};
    Range frequency{-2.0, 2.0};
    int samples = 64;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Counter-based generator: the k-th draw of stream (key) is
/// splitmix64(key + (k + 1) * 0x9E3779B97F4A7C15). Streams are independent
/// functions of (seed, purpose, index), so draws can be made in any order.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}
    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double next_unit();
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);
/// Stream key derived from the top-level seed, a purpose tag and an index.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index);

/// Deterministic sample `index` of the forcing family of `cls`.
/// interior1d samples carry the compatibility factor.
ForcingParams sample_forcing(const SamplingSpec& spec, ProblemClass cls, std::uint64_t index,
                             std::string_view purpose = "train");

double forcing_eval(const ForcingParams& f, double x, double y = 0.0);

/// Values on the uniform grid of R points over `x` (1D) or R x R points over
/// x by y flattened row-major with y as the row index (2D).
std::vector<double> discretize_forcing(const ForcingParams& f, int resolution, Interval x,
                                       Interval y = {0.0, 1.0});

/// "m0,m1,n0,n1[,n2,n3]" as written by the CLI.
ForcingParams parse_forcing(std::string_view text, ProblemClass cls);

/// One parameter row per sample with a header.
void write_samples_csv(const std::vector<ForcingParams>& samples, const std::string& path);

}  // namespace efeo
