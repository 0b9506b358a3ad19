#include "run_config.hpp"

#include <cmath>
#include <fstream>

#include "efeo/error.hpp"

namespace efeo::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config " + path + ": " + what);
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
}

int integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

std::string text(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

bool boolean(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
}

template <class T, class Fn>
std::vector<T> list(const json& v, const std::string& path, Fn&& item) {
    if (!v.is_array()) fail(path, "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(item(v[i], path + "/" + std::to_string(i)));
    return out;
}

Range range(const json& v, const std::string& path) {
    const std::vector<double> r = list<double>(v, path, number);
    if (r.size() != 2) fail(path, "expected [lo, hi]");
    if (r[0] > r[1]) fail(path, "lo must not exceed hi");
    return {r[0], r[1]};
}

}  // namespace

void apply_json(const json& j, RunConfig& c) {
    if (!j.is_object()) fail("/", "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const json& v = it.value();
        const std::string p = "/" + k;
        if (k == "problem") c.problem = text(v, p);
        else if (k == "epsilon") c.epsilon = number(v, p);
        else if (k == "mesh_n") c.mesh_n = integer(v, p);
        else if (k == "resolution") c.resolution = integer(v, p);
        else if (k == "samples") c.samples = integer(v, p);
        else if (k == "mode") c.mode = text(v, p);
        else if (k == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
                fail(p, "expected a non-negative integer");
            }
            c.seed = v.get<std::uint64_t>();
        } else if (k == "out") c.out = text(v, p);
        else if (k == "checkpoint") c.checkpoint = text(v, p);
        else if (k == "forcing") c.forcing = text(v, p);
        else if (k == "forcing_index") c.forcing_index = integer(v, p);
        else if (k == "modes") c.modes = list<std::string>(v, p, text);
        else if (k == "epsilons") c.epsilons = list<double>(v, p, number);
        else if (k == "grids") c.grids = list<std::string>(v, p, text);
        else if (k == "n_test") c.n_test = integer(v, p);
        else if (k == "n_ref") c.n_ref = integer(v, p);
        else if (k == "timing") c.timing = boolean(v, p);
        else if (k == "cache_dir") c.cache_dir = text(v, p);
        else if (k == "architecture") c.architecture = text(v, p);
        else if (k == "hidden") c.hidden = list<int>(v, p, integer);
        else if (k == "optimizer") c.optimizer = text(v, p);
        else if (k == "learning_rate") c.learning_rate = number(v, p);
        else if (k == "max_iterations") c.max_iterations = integer(v, p);
        else if (k == "history_size") c.history_size = integer(v, p);
        else if (k == "steps") c.steps = integer(v, p);
        else if (k == "loss_tolerance") c.loss_tolerance = number(v, p);
        else if (k == "precondition") c.precondition = boolean(v, p);
        else if (k == "encoding") c.encoding = text(v, p);
        else if (k == "sampling") {
            if (!v.is_object()) fail(p, "expected an object");
            for (auto s = v.begin(); s != v.end(); ++s) {
                if (s.key() == "amplitude") c.amplitude = range(s.value(), p + "/amplitude");
                else if (s.key() == "frequency") c.frequency = range(s.value(), p + "/frequency");
                else fail(p + "/" + s.key(), "unknown key");
            }
        } else {
            fail(p, "unknown key");
        }
    }
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    RunConfig c;
    apply_json(j, c);
    return c;
}

json to_json(const RunConfig& c) {
    json j{{"problem", c.problem},
           {"mesh_n", c.mesh_n},
           {"resolution", c.resolution},
           {"samples", c.samples},
           {"mode", c.mode},
           {"seed", c.seed},
           {"out", c.out},
           {"checkpoint", c.checkpoint},
           {"forcing", c.forcing},
           {"forcing_index", c.forcing_index},
           {"modes", c.modes},
           {"epsilons", c.epsilons},
           {"grids", c.grids},
           {"n_test", c.n_test},
           {"timing", c.timing},
           {"cache_dir", c.cache_dir},
           {"architecture", c.architecture},
           {"hidden", c.hidden},
           {"optimizer", c.optimizer},
           {"learning_rate", c.learning_rate},
           {"max_iterations", c.max_iterations},
           {"history_size", c.history_size},
           {"steps", c.steps},
           {"loss_tolerance", c.loss_tolerance},
           {"precondition", c.precondition},
           {"encoding", c.encoding},
           {"sampling",
            {{"amplitude", {c.amplitude.lo, c.amplitude.hi}}, {"frequency", {c.frequency.lo, c.frequency.hi}}}}};
    if (c.epsilon) j["epsilon"] = *c.epsilon;
    if (c.n_ref) j["n_ref"] = *c.n_ref;
    return j;
}

SamplingSpec sampling_of(const RunConfig& c) {
    SamplingSpec s;
    s.amplitude = c.amplitude;
    s.frequency = c.frequency;
    s.samples = c.samples;
    s.seed = c.seed;
    return s;
}

}  // namespace efeo::cli
