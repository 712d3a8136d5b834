#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "decompose.hpp"
#include "function_rep.hpp"
#include "measure.hpp"
#include "variation.hpp"

// Report serialization shared by the command-line tool and its tests. All
// formatting here is deterministic: fixed float conversion, sorted object
// keys (the json library stores objects in a std::map), no timestamps.

namespace bv {

inline constexpr const char* kSchemaTag = "bv-toolkit/1";
inline constexpr const char* kToolkitVersion = "0.1.0";

// Shortest exact decimal form, stable across runs and platforms that round
// correctly. Infinities spell themselves out since CSV has no null.
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

// JSON cannot hold infinities; null stands in for them.
inline nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline const char* verdict_name(VariationReport::Verdict v) {
    switch (v) {
        case VariationReport::Verdict::Converged: return "Converged";
        case VariationReport::Verdict::ExceededBound: return "ExceededBound";
        default: return "Inconclusive";
    }
}

inline const char* ac_verdict_name(ACVerdict v) {
    switch (v) {
        case ACVerdict::AbsolutelyContinuous: return "AbsolutelyContinuous";
        case ACVerdict::SingularPartPresent: return "SingularPartPresent";
        default: return "NotOfBoundedVariation";
    }
}

inline nlohmann::json variation_report_json(const VariationReport& r) {
    nlohmann::json j;
    j["verdict"] = verdict_name(r.verdict);
    j["value"] = json_number(r.value);
    j["depth"] = r.depth;
    j["lower_bounds"] = r.lower_bounds;
    return j;
}

inline nlohmann::json jump_list_json(const std::vector<JumpRecord>& jumps) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& jr : jumps)
        arr.push_back({{"x", jr.x}, {"left", jr.left}, {"value", jr.value}, {"right", jr.right}});
    return arr;
}

// Uniform sampling of a representation as "x,f" rows. A grid rep whose
// sample count already matches is copied through untouched, so emitting and
// re-parsing such a grid reproduces it bit for bit.
inline std::string grid_csv(const FunctionRep& f, int samples) {
    const auto* g = std::get_if<GridFunction>(&f.rep);
    const bool passthrough = g && static_cast<int>(g->values.size()) == samples;
    std::string out = "x,f\n";
    for (int i = 0; i < samples; ++i) {
        double x = f.domain.a +
                   f.domain.length() * (static_cast<double>(i) / static_cast<double>(samples - 1));
        if (i + 1 == samples) x = f.domain.b;
        out += fmt_double(x);
        out += ',';
        out += fmt_double(passthrough ? g->values[static_cast<std::size_t>(i)] : evaluate(f, x));
        out += '\n';
    }
    return out;
}

// {"density": sampled grid, "atoms": [[x, w], ...], "singular": [...]}.
// The density is resampled so the report stays plot-ready even when the
// measure carries an opaque callable.
inline nlohmann::json measure_json(const FiniteSignedMeasure& mu, int density_samples = 129) {
    nlohmann::json j;
    if (detail::is_zero_step(mu.ac_density)) {
        j["density"] = nullptr;
    } else {
        nlohmann::json vals = nlohmann::json::array();
        for (int i = 0; i < density_samples; ++i) {
            double x = mu.domain.a + mu.domain.length() * (static_cast<double>(i) /
                                                           static_cast<double>(density_samples - 1));
            if (i + 1 == density_samples) x = mu.domain.b;
            vals.push_back(evaluate(mu.ac_density, x));
        }
        j["density"] = {{"domain", {mu.domain.a, mu.domain.b}}, {"values", std::move(vals)}};
    }
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& [x, w] : mu.atoms) atoms.push_back({x, w});
    j["atoms"] = std::move(atoms);
    nlohmann::json sing = nlohmann::json::array();
    for (const auto& s : mu.singular) sing.push_back({{"kind", s.kind}, {"mass", s.mass}});
    j["singular"] = std::move(sing);
    return j;
}

}  // namespace bv
