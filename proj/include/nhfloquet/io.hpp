#pragma once

// Text formats: complex literals, model config files, presets, and a small
// JSON emitter with fixed 17-digit numbers so outputs are byte-stable.

#include "core_algebra.hpp"
#include "error.hpp"
#include "models.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace nhfloquet {

// Parses `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`); no spaces.
inline cplx parse_complex(const std::string& text) {
    auto bad = [&]() { return Error(ErrorCode::ConfigError, "cannot parse complex literal '" + text + "'"); };
    if (text.empty()) throw bad();
    for (char ch : text)
        if (std::isspace(static_cast<unsigned char>(ch))) throw bad();
    auto real_part = [&](const std::string& s) -> double {
        if (s.empty()) throw bad();
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(s, &pos);
        } catch (...) {
            throw bad();
        }
        if (pos != s.size()) throw bad();
        return v;
    };
    auto imag_part = [&](std::string s) -> double {
        // s ends with 'i'
        s.pop_back();
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        return real_part(s);
    };
    if (text.back() != 'i') return {real_part(text), 0.0};
    std::size_t split = std::string::npos;
    for (std::size_t k = text.size() - 1; k >= 1; --k) {
        char ch = text[k];
        if ((ch == '+' || ch == '-') && text[k - 1] != 'e' && text[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) return {0.0, imag_part(text)};
    return {real_part(text.substr(0, split)), imag_part(text.substr(split))};
}

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_complex(cplx z) {
    std::string im = format_double(z.imag());
    if (im[0] != '-' && im[0] != '+') im = "+" + im;
    return format_double(z.real()) + im + "i";
}

// Minimal streaming JSON writer. Numbers are printed with %.17g; non-finite
// values become null.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& os) : os_(os) {}

    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(const std::string& k) {
        sep();
        write_string(k);
        os_ << ": ";
        after_key_ = true;
        return *this;
    }
    JsonWriter& value(double x) {
        sep();
        if (std::isfinite(x)) {
            os_ << format_double(x);
        } else {
            os_ << "null";
        }
        return *this;
    }
    JsonWriter& value(int x) {
        sep();
        os_ << x;
        return *this;
    }
    JsonWriter& value(bool x) {
        sep();
        os_ << (x ? "true" : "false");
        return *this;
    }
    JsonWriter& value(const std::string& s) {
        sep();
        write_string(s);
        return *this;
    }
    JsonWriter& value(const char* s) { return value(std::string(s)); }
    // Complex numbers as [re, im].
    JsonWriter& value(cplx z) {
        begin_array();
        value(z.real());
        value(z.imag());
        return end_array();
    }
    JsonWriter& values(const std::vector<double>& v) {
        begin_array();
        for (double x : v) value(x);
        return end_array();
    }
    template <class V>
    JsonWriter& field(const std::string& k, const V& v) {
        key(k);
        return value(v);
    }
    void finish() { os_ << "\n"; }

private:
    JsonWriter& open(char c) {
        sep();
        os_ << c;
        first_.push_back(true);
        return *this;
    }
    JsonWriter& close(char c) {
        bool empty = first_.back();
        first_.pop_back();
        if (!empty) newline();
        os_ << c;
        return *this;
    }
    void newline() {
        os_ << "\n";
        for (std::size_t k = 0; k < first_.size(); ++k) os_ << "  ";
    }
    void sep() {
        if (after_key_) {
            after_key_ = false;
            return;
        }
        if (first_.empty()) return;
        if (!first_.back()) os_ << ",";
        first_.back() = false;
        newline();
    }
    void write_string(const std::string& s) {
        os_ << '"';
        for (char ch : s) {
            switch (ch) {
                case '"': os_ << "\\\""; break;
                case '\\': os_ << "\\\\"; break;
                case '\n': os_ << "\\n"; break;
                default: os_ << ch;
            }
        }
        os_ << '"';
    }

    std::ostream& os_;
    std::vector<bool> first_;
    bool after_key_ = false;
};

// ------------------------------------------------------------- presets

struct PresetParams {
    std::optional<cplx> r, rho;
    std::optional<double> omega;
};

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"ucf", "berry-uzdin", "airy", "h12", "appB-m101", "appB-012",
                                                "single-frequency"};
    return names;
}

inline DriveSpec make_preset(const std::string& name, const PresetParams& pp = {}) {
    const cplx i(0, 1);
    const double tp = 2 * std::acos(-1.0);
    if (name == "ucf")
        return model_ucf(pp.r.value_or(0.2 * i), pp.rho.value_or(-0.8), pp.omega.value_or(tp / 300));
    if (name == "berry-uzdin")
        return model_berry_uzdin(pp.r.value_or(0.3), pp.rho.value_or(0.5), pp.omega.value_or(tp / 300));
    if (name == "airy") return model_airy({1.0, 0.0, 0.5 * i}, 0.6, pp.omega.value_or(tp / 50));
    if (name == "h12") return model_h12({0.5, 0.3 * i, 0.4}, {0.3, -0.3 * i, 0.5}, pp.omega.value_or(1.0));
    if (name == "appB-m101") return appB_gauge_pair(0.4, 0.3, 0.5, 0.6, 0.2, pp.omega.value_or(1.0)).h1;
    if (name == "appB-012")
        return model_appB_012({0.7, 0.2, 0.3}, {0.3 * i, 0.3, 0.25}, {0.2 * i, 0.2, 0.0}, pp.omega.value_or(1.0));
    if (name == "single-frequency") return model_single_frequency({1.0, 0.0, 0.5 * i}, pp.omega.value_or(tp / 50));
    throw Error(ErrorCode::ConfigError, "unknown preset '" + name + "'");
}

// --------------------------------------------------------- config files

namespace detail {

inline cplx json_complex(const nlohmann::json& j, const std::string& what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_string()) return parse_complex(j.get<std::string>());
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw Error(ErrorCode::ConfigError, "field '" + what + "' must be a number, [re, im] or a complex literal");
}

inline double json_number(const nlohmann::json& j, const std::string& what) {
    if (!j.is_number()) throw Error(ErrorCode::ConfigError, "field '" + what + "' must be a number");
    return j.get<double>();
}

}  // namespace detail

// Either {"preset": name, "r": .., "rho": .., "omega"|"T": ..} or
// {"omega"|"T": .., "f0": .., "harmonics": [{"n", "f1_re", "f1_im", ...}]}.
inline DriveSpec model_from_json(const nlohmann::json& j) {
    using detail::json_complex;
    using detail::json_number;
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
    std::optional<double> omega;
    if (j.contains("omega")) omega = json_number(j["omega"], "omega");
    if (j.contains("T")) {
        double w = 2 * std::acos(-1.0) / json_number(j["T"], "T");
        // both are accepted only when they agree (files written by write_model_json)
        if (omega && !(std::abs(w - *omega) <= 1e-12 * std::abs(*omega)))
            throw Error(ErrorCode::ConfigError, "omega and T disagree");
        if (!omega) omega = w;
    }
    if (omega && !(*omega > 0 && std::isfinite(*omega))) throw Error(ErrorCode::ConfigError, "omega must be positive");
    if (j.contains("preset")) {
        PresetParams pp;
        pp.omega = omega;
        if (j.contains("r")) pp.r = json_complex(j["r"], "r");
        if (j.contains("rho")) pp.rho = json_complex(j["rho"], "rho");
        return make_preset(j["preset"].get<std::string>(), pp);
    }
    DriveSpec s;
    if (!omega) throw Error(ErrorCode::ConfigError, "config needs omega or T");
    s.omega = *omega;
    if (j.contains("f0")) s.f0 = json_complex(j["f0"], "f0");
    if (!j.contains("harmonics") || !j["harmonics"].is_array())
        throw Error(ErrorCode::ConfigError, "config needs a harmonics list");
    for (const auto& h : j["harmonics"]) {
        if (!h.is_object() || !h.contains("n") || !h["n"].is_number_integer())
            throw Error(ErrorCode::ConfigError, "each harmonic needs an integer n");
        auto get = [&](const char* k) { return h.contains(k) ? json_number(h[k], k) : 0.0; };
        Complex3 v{cplx(get("f1_re"), get("f1_im")), cplx(get("f2_re"), get("f2_im")), cplx(get("f3_re"), get("f3_im"))};
        int n = h["n"].get<int>();
        if (s.harmonics.count(n)) throw Error(ErrorCode::ConfigError, "duplicate harmonic n");
        s.harmonics[n] = v;
    }
    if (s.harmonics.empty()) throw Error(ErrorCode::ConfigError, "harmonics list is empty");
    return s;
}

inline DriveSpec load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("config parse error: ") + e.what());
    }
    return model_from_json(j);
}

inline void write_model_json(JsonWriter& w, const DriveSpec& s) {
    w.begin_object();
    w.field("omega", s.omega);
    w.field("T", s.period());
    w.field("f0", s.f0);
    w.key("harmonics").begin_array();
    for (auto& [n, v] : s.harmonics) {
        w.begin_object();
        w.field("n", n);
        w.field("f1_re", v.f1.real()).field("f1_im", v.f1.imag());
        w.field("f2_re", v.f2.real()).field("f2_im", v.f2.imag());
        w.field("f3_re", v.f3.real()).field("f3_im", v.f3.imag());
        w.end_object();
    }
    w.end_array();
    w.end_object();
}

}  // namespace nhfloquet
