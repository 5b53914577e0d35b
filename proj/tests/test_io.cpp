#include "generators.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

using namespace nhfloquet;

namespace {

ErrorCode parse_error(const std::string& s) {
    try {
        parse_complex(s);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "parsed '" << s << "'";
    return ErrorCode::NoConvergence;
}

}  // namespace

TEST(ParseComplex, Literals) {
    EXPECT_EQ(parse_complex("0.2i"), cplx(0, 0.2));
    EXPECT_EQ(parse_complex("-0.8"), cplx(-0.8, 0));
    EXPECT_EQ(parse_complex("1+0.5i"), cplx(1, 0.5));
    EXPECT_EQ(parse_complex("1-0.5i"), cplx(1, -0.5));
    EXPECT_EQ(parse_complex("i"), cplx(0, 1));
    EXPECT_EQ(parse_complex("-i"), cplx(0, -1));
    EXPECT_EQ(parse_complex("2-i"), cplx(2, -1));
    EXPECT_EQ(parse_complex("1e-3+2e+1i"), cplx(1e-3, 20));
    EXPECT_EQ(parse_complex("-1.5e2i"), cplx(0, -150));
}

TEST(ParseComplex, Rejects) {
    for (const char* s : {"", "1 + 2i", " 1", "abc", "1+", "1+2j", "i2", "1++2i"})
        EXPECT_EQ(parse_error(s), ErrorCode::ConfigError) << s;
}

TEST(Format, RoundTrips) {
    for (cplx z : {cplx(0.1, -0.2), cplx(1.0 / 3, 2e-17), cplx(-5, 0)}) {
        EXPECT_EQ(parse_complex(format_complex(z)), z);
    }
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(JsonWriter, NestedAndNonFinite) {
    std::ostringstream os;
    JsonWriter w(os);
    w.begin_object();
    w.field("a", 1);
    w.field("z", cplx(1, -2));
    w.field("nan", std::nan(""));
    w.key("list").values({1.0, 2.5});
    w.key("empty").begin_array().end_array();
    w.field("s", std::string("q\"x"));
    w.end_object();
    w.finish();
    nlohmann::json j = nlohmann::json::parse(os.str());
    EXPECT_EQ(j["a"], 1);
    EXPECT_EQ(j["z"][1], -2.0);
    EXPECT_TRUE(j["nan"].is_null());
    EXPECT_EQ(j["list"].size(), 2u);
    EXPECT_TRUE(j["empty"].empty());
    EXPECT_EQ(j["s"], "q\"x");
}

TEST(Presets, AllBuild) {
    for (const auto& n : preset_names()) EXPECT_NO_THROW(make_preset(n)) << n;
    EXPECT_THROW(make_preset("nope"), Error);
}

TEST(Presets, UcfDefaultsAndOverrides) {
    DriveSpec s = make_preset("ucf");
    EXPECT_NEAR(s.period(), 300.0, 1e-12);
    EXPECT_LT(std::abs(cdot(s.coeff(0), s.coeff(0)) - 1.04), 1e-15);
    PresetParams pp;
    pp.r = 0.5;
    pp.rho = 0.1;
    pp.omega = 1.0;
    DriveSpec t = make_preset("ucf", pp);
    EXPECT_LT(std::abs(cdot(t.coeff(0), t.coeff(0)) - 0.75), 1e-15);
    EXPECT_EQ(t.omega, 1.0);
}

TEST(Presets, FamiliesMatch) {
    EXPECT_EQ(classify_solvable(make_preset("airy")).family, SolvableFamily::H12_Airy);
    EXPECT_EQ(classify_solvable(make_preset("h12")).family, SolvableFamily::H12_ParabolicCylinder);
    EXPECT_EQ(classify_solvable(make_preset("appB-m101")).family, SolvableFamily::AppB_m101_Whittaker);
    EXPECT_EQ(classify_solvable(make_preset("appB-012")).family, SolvableFamily::AppB_012_Kummer);
    EXPECT_EQ(classify_solvable(make_preset("single-frequency")).family, SolvableFamily::SingleFrequency);
}

TEST(ModelJson, PresetForm) {
    auto j = nlohmann::json::parse(R"({"preset": "ucf", "r": "0.1", "rho": [0.3, 0], "T": 100})");
    DriveSpec s = model_from_json(j);
    EXPECT_NEAR(s.period(), 100.0, 1e-12);
    EXPECT_LT(std::abs(cdot(s.coeff(0), s.coeff(0)) - 0.99), 1e-15);
}

TEST(ModelJson, HarmonicForm) {
    auto j = nlohmann::json::parse(R"({"omega": 0.5, "f0": "0.1i", "harmonics": [
        {"n": 0, "f1_re": 1.0},
        {"n": 2, "f2_im": -0.5, "f3_re": 0.25}]})");
    DriveSpec s = model_from_json(j);
    EXPECT_EQ(s.omega, 0.5);
    EXPECT_EQ(s.f0, cplx(0, 0.1));
    EXPECT_EQ(s.coeff(0).f1, cplx(1, 0));
    EXPECT_EQ(s.coeff(2).f2, cplx(0, -0.5));
    EXPECT_EQ(s.coeff(2).f3, cplx(0.25, 0));
}

TEST(ModelJson, Rejects) {
    for (const char* text :
         {R"([1, 2])", R"({"omega": 1, "T": 2, "preset": "ucf"})", R"({"harmonics": [{"n": 0}]})",
          R"({"omega": -1, "harmonics": [{"n": 0}]})", R"({"omega": 1, "harmonics": []})",
          R"({"omega": 1, "harmonics": [{"n": 0}, {"n": 0}]})", R"({"omega": 1, "harmonics": [{"n": 0.5}]})",
          R"({"omega": 1, "harmonics": [{"n": 0, "f1_re": "x"}]})", R"({"preset": "nope"})"}) {
        try {
            model_from_json(nlohmann::json::parse(text));
            ADD_FAILURE() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::ConfigError) << text;
        }
    }
}

TEST(ModelJson, WriteThenLoadRoundTrip) {
    DriveSpec s = make_preset("appB-012");
    s.f0 = cplx(0.25, -0.5);
    auto path = std::filesystem::temp_directory_path() / "nhfloquet_test_model.json";
    {
        std::ofstream out(path);
        JsonWriter w(out);
        write_model_json(w, s);
        w.finish();
    }
    DriveSpec t = load_model_file(path.string());
    std::filesystem::remove(path);
    EXPECT_EQ(t.omega, s.omega);
    EXPECT_EQ(t.f0, s.f0);
    ASSERT_EQ(t.harmonics.size(), s.harmonics.size());
    for (auto& [n, v] : s.harmonics) EXPECT_EQ(norm(t.coeff(n) - v), 0.0);
}

TEST(ModelJson, MissingFile) { EXPECT_THROW(load_model_file("/nonexistent/model.json"), Error); }
