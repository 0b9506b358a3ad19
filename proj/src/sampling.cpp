#include "efeo/sampling.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>

#include "efeo/error.hpp"

namespace efeo {

ForcingParams ForcingParams::one_d(double m0, double m1, double n0, double n1, bool compat) {
    ForcingParams f;
    f.dimension = 1;
    f.m0 = m0;
    f.m1 = m1;
    f.n = {n0, n1, 0.0, 0.0};
    f.compat_factor = compat;
    return f;
}

ForcingParams ForcingParams::two_d(double m0, double m1, double n0, double n1, double n2, double n3) {
    ForcingParams f;
    f.dimension = 2;
    f.m0 = m0;
    f.m1 = m1;
    f.n = {n0, n1, n2, n3};
    return f;
}

std::vector<double> ForcingParams::flat() const {
    if (dimension == 1) return {m0, m1, n[0], n[1]};
    return {m0, m1, n[0], n[1], n[2], n[3]};
}

void SamplingSpec::validate() const {
    for (const Range& r : {amplitude, frequency}) {
        EFEO_REQUIRE(std::isfinite(r.lo) && std::isfinite(r.hi), "sampling range must be finite");
        EFEO_REQUIRE(r.lo <= r.hi, "sampling range must satisfy lo <= hi");
    }
    EFEO_REQUIRE(samples >= 1, "sample count must be positive");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t CounterRng::next_u64() {
    ++counter_;
    return splitmix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
}

double CounterRng::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index) {
    // FNV-1a over the purpose tag
    std::uint64_t tag = 0xCBF29CE484222325ULL;
    for (char ch : purpose) {
        tag ^= static_cast<unsigned char>(ch);
        tag *= 0x100000001B3ULL;
    }
    return splitmix64(splitmix64(seed ^ tag) + index);
}

ForcingParams sample_forcing(const SamplingSpec& spec, ProblemClass cls, std::uint64_t index,
                             std::string_view purpose) {
    spec.validate();
    CounterRng rng(derive_seed(spec.seed, purpose, index));
    const double m0 = rng.uniform(spec.amplitude.lo, spec.amplitude.hi);
    const double m1 = rng.uniform(spec.amplitude.lo, spec.amplitude.hi);
    if (cls == ProblemClass::square2d) {
        std::array<double, 4> n{};
        for (double& v : n) v = rng.uniform(spec.frequency.lo, spec.frequency.hi);
        return ForcingParams::two_d(m0, m1, n[0], n[1], n[2], n[3]);
    }
    const double n0 = rng.uniform(spec.frequency.lo, spec.frequency.hi);
    const double n1 = rng.uniform(spec.frequency.lo, spec.frequency.hi);
    return ForcingParams::one_d(m0, m1, n0, n1, cls == ProblemClass::interior1d);
}

double forcing_eval(const ForcingParams& f, double x, double y) {
    if (f.dimension == 2) return f.m0 * std::sin(f.n[0] * x + f.n[1] * y) + f.m1 * std::cos(f.n[2] * x + f.n[3] * y);
    const double v = f.m0 * std::sin(f.n[0] * x) + f.m1 * std::cos(f.n[1] * x);
    return f.compat_factor ? x * v : v;
}

namespace {

double grid_point(Interval iv, int i, int r) {
    if (i == r - 1) return iv.hi;
    return iv.lo + iv.length() * static_cast<double>(i) / static_cast<double>(r - 1);
}

}  // namespace

std::vector<double> discretize_forcing(const ForcingParams& f, int resolution, Interval x, Interval y) {
    EFEO_REQUIRE(resolution >= 2, "discretize_forcing: resolution must be at least 2");
    std::vector<double> out;
    if (f.dimension == 1) {
        out.reserve(static_cast<std::size_t>(resolution));
        for (int i = 0; i < resolution; ++i) out.push_back(forcing_eval(f, grid_point(x, i, resolution)));
        return out;
    }
    out.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
    for (int j = 0; j < resolution; ++j) {
        const double yj = grid_point(y, j, resolution);
        for (int i = 0; i < resolution; ++i) out.push_back(forcing_eval(f, grid_point(x, i, resolution), yj));
    }
    return out;
}

ForcingParams parse_forcing(std::string_view text, ProblemClass cls) {
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        std::string part(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        // trim spaces
        const auto b = part.find_first_not_of(" \t");
        const auto e = part.find_last_not_of(" \t");
        part = b == std::string::npos ? std::string() : part.substr(b, e - b + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(part, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("forcing: cannot parse number '" + part + "'");
        }
        if (used != part.size() || !std::isfinite(v)) throw InvalidArgument("forcing: cannot parse number '" + part + "'");
        vals.push_back(v);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (cls == ProblemClass::square2d) {
        if (vals.size() != 6) throw InvalidArgument("forcing: square2d expects m0,m1,n0,n1,n2,n3");
        return ForcingParams::two_d(vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]);
    }
    if (vals.size() != 4) throw InvalidArgument("forcing: 1D problems expect m0,m1,n0,n1");
    return ForcingParams::one_d(vals[0], vals[1], vals[2], vals[3], cls == ProblemClass::interior1d);
}

void write_samples_csv(const std::vector<ForcingParams>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write samples file: " + path);
    const bool two = !samples.empty() && samples.front().dimension == 2;
    out << (two ? "index,m0,m1,n0,n1,n2,n3\n" : "index,m0,m1,n0,n1,compat\n");
    out << std::setprecision(17);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        out << k;
        for (double v : samples[k].flat()) out << ',' << v;
        if (!two) out << ',' << (samples[k].compat_factor ? 1 : 0);
        out << '\n';
    }
}

}  // namespace efeo
