#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "../../tools/run_config.hpp"
#include "efeo/error.hpp"

using namespace efeo;
using namespace efeo::cli;

TEST(RunConfig, AppliesKnownKeys) {
    RunConfig c;
    apply_json(nlohmann::json::parse(R"({"problem": "interior1d", "epsilon": 1e-4, "hidden": [8, 8, 8],
                                         "sampling": {"amplitude": [-1, 1]}, "timing": false})"),
               c);
    EXPECT_EQ(c.problem, "interior1d");
    EXPECT_EQ(*c.epsilon, 1e-4);
    EXPECT_EQ(c.hidden, (std::vector<int>{8, 8, 8}));
    EXPECT_EQ(c.amplitude.lo, -1.0);
    EXPECT_EQ(c.frequency.hi, 2.0);
    EXPECT_FALSE(c.timing);
    EXPECT_EQ(sampling_of(c).amplitude.hi, 1.0);
}

TEST(RunConfig, ErrorsNameTheJsonPath) {
    const auto message = [](const char* text) {
        RunConfig c;
        try {
            apply_json(nlohmann::json::parse(text), c);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message(R"({"mesh_n": "ten"})").find("/mesh_n"), std::string::npos);
    EXPECT_NE(message(R"({"sampling": {"amplitude": [1]}})").find("/sampling/amplitude"), std::string::npos);
    EXPECT_NE(message(R"({"hidden": [4, "x"]})").find("/hidden/1"), std::string::npos);
    EXPECT_NE(message(R"({"colour": 1})").find("/colour"), std::string::npos);
}

TEST(RunConfig, FileRoundTrip) {
    RunConfig c;
    c.problem = "square2d";
    c.epsilon = 1e-3;
    c.epsilons = {1e-2};
    const auto path = std::filesystem::temp_directory_path() / "efeo_run_config.json";
    {
        std::ofstream out(path);
        out << to_json(c).dump();
    }
    const RunConfig back = load_config_file(path.string());
    EXPECT_EQ(back.problem, "square2d");
    EXPECT_EQ(*back.epsilon, 1e-3);
    EXPECT_EQ(back.epsilons, c.epsilons);
    EXPECT_EQ(to_json(back), to_json(c));
    std::filesystem::remove(path);
    EXPECT_THROW(load_config_file(path.string()), IoError);
}
