#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "catalog.hpp"
#include "errors.hpp"
#include "essential.hpp"
#include "function_rep.hpp"

// Input loading for the command-line tool: catalog shorthand like
// "heaviside:c=0.5", JSON function specs (catalog reference or a piecewise
// formula list), grid CSVs, and corrupted-grid JSON for the essential
// variation commands.

namespace bv {

namespace detail {

// Locale-independent double parsing; the whole token must be consumed.
inline double parse_number_token(const std::string& s, const char* what) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ConfigError(std::string(what) + ": cannot parse number '" + s + "'");
    return v;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("cannot read " + path);
    return text;
}

// One formula piece of a piecewise spec, with its own derivative and the
// interior critical points that subdivide it into monotone runs.
struct SpecPiece {
    double from = 0.0;
    double to = 0.0;
    std::function<double(double)> fn;
    std::function<double(double)> dfn;
    std::vector<double> critical;
};

inline double horner(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
}

// Interior sign changes of dfn located by a scan plus bisection. Grazing
// zeros without a sign change do not split a monotone run, so only strict
// crossings matter; a zero landing exactly on a sample is kept anyway,
// which at worst adds a harmless extra knot.
inline std::vector<double> derivative_crossings(const std::function<double(double)>& dfn,
                                                double a, double b) {
    const int n = 512;
    std::vector<double> out;
    double x0 = a;
    double f0 = dfn(x0);
    for (int i = 1; i <= n; ++i) {
        double x1 = (i == n) ? b : a + (b - a) * (static_cast<double>(i) / n);
        double f1 = dfn(x1);
        if (f0 == 0.0 && i > 1) out.push_back(x0);
        if (f0 * f1 < 0.0) {
            double lo = x0, hi = x1, flo = f0;
            for (int it = 0; it < 80 && hi - lo > 0.0; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = dfn(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((flo < 0.0) != (fm < 0.0))
                    hi = mid;
                else
                    lo = mid, flo = fm;
            }
            out.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    return out;
}

inline double json_field(const nlohmann::json& j, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) throw ConfigError(std::string("piecewise: '") + key + "' must be a number");
    return j[key].get<double>();
}

inline SpecPiece build_piece(const nlohmann::json& pj, double from, double to) {
    if (!pj.is_object()) throw ConfigError("piecewise: each piece must be an object");
    if (!pj.contains("fn") || !pj["fn"].is_string())
        throw ConfigError("piecewise: each piece needs an \"fn\" string");
    std::string kind = pj["fn"].get<std::string>();
    SpecPiece p;
    p.from = from;
    p.to = to;

    if (kind == "poly") {
        if (!pj.contains("coeffs") || !pj["coeffs"].is_array() || pj["coeffs"].empty() ||
            pj["coeffs"].size() > 16)
            throw ConfigError("piecewise: poly needs 1..16 \"coeffs\"");
        std::vector<double> c;
        for (const auto& e : pj["coeffs"]) {
            if (!e.is_number()) throw ConfigError("piecewise: poly coefficients must be numbers");
            c.push_back(e.get<double>());
        }
        std::vector<double> dc;
        for (std::size_t i = 1; i < c.size(); ++i) dc.push_back(static_cast<double>(i) * c[i]);
        if (dc.empty()) dc.push_back(0.0);
        p.fn = [c](double x) { return horner(c, x); };
        p.dfn = [dc](double x) { return horner(dc, x); };
        if (dc.size() >= 2) p.critical = derivative_crossings(p.dfn, from, to);
        return p;
    }

    if (kind == "sin" || kind == "cos") {
        double amp = json_field(pj, "amp", 1.0);
        double freq = json_field(pj, "freq", 1.0);
        double phase = json_field(pj, "phase", 0.0);
        bool is_sin = kind == "sin";
        p.fn = [=](double x) {
            double t = freq * x + phase;
            return amp * (is_sin ? std::sin(t) : std::cos(t));
        };
        p.dfn = [=](double x) {
            double t = freq * x + phase;
            return amp * freq * (is_sin ? std::cos(t) : -std::sin(t));
        };
        if (amp != 0.0 && freq != 0.0) {
            // Extrema sit where the phase argument hits pi/2 + k*pi (sin)
            // or k*pi (cos); enumerate the ones inside the open piece.
            double base = is_sin ? kPi / 2.0 : 0.0;
            double klo = (freq * std::min(from, to) + phase - base) / kPi;
            double khi = (freq * std::max(from, to) + phase - base) / kPi;
            if (khi - klo > 4096.0)
                throw ConfigError("piecewise: trig frequency too high to import");
            for (long k = static_cast<long>(std::floor(klo)) - 1;
                 k <= static_cast<long>(std::ceil(khi)) + 1; ++k) {
                double x = (base + static_cast<double>(k) * kPi - phase) / freq;
                if (x > from && x < to) p.critical.push_back(x);
            }
            std::sort(p.critical.begin(), p.critical.end());
        }
        return p;
    }

    if (kind == "sqrt") {
        double scale = json_field(pj, "scale", 1.0);
        double shift = json_field(pj, "shift", 0.0);
        if (from < shift) throw ConfigError("piecewise: sqrt piece needs x >= shift");
        p.fn = [=](double x) { return scale * std::sqrt(std::max(0.0, x - shift)); };
        p.dfn = [=](double x) { return scale / (2.0 * std::sqrt(x - shift)); };
        return p;
    }

    if (kind == "recip") {
        double scale = json_field(pj, "scale", 1.0);
        double shift = json_field(pj, "shift", 0.0);
        if (shift >= from && shift <= to)
            throw ConfigError("piecewise: recip pole must lie outside the piece");
        p.fn = [=](double x) { return scale / (x - shift); };
        p.dfn = [=](double x) { return -scale / ((x - shift) * (x - shift)); };
        return p;
    }

    throw ConfigError("piecewise: fn must be one of poly, sin, cos, sqrt, recip");
}

}  // namespace detail

// Catalog shorthand "name" or "name:key=value,key=value".
inline std::pair<std::string, std::map<std::string, double>> parse_catalog_ref(
    const std::string& s) {
    auto colon = s.find(':');
    std::string name = s.substr(0, colon);
    if (name.empty()) throw ConfigError("catalog reference: empty name");
    std::map<std::string, double> params;
    if (colon != std::string::npos) {
        std::string rest = s.substr(colon + 1);
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            std::size_t comma = rest.find(',', pos);
            std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                           : comma - pos);
            auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ConfigError("catalog reference: parameters must look like key=value");
            params[item.substr(0, eq)] =
                detail::parse_number_token(item.substr(eq + 1), "catalog reference");
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    return {std::move(name), std::move(params)};
}

// JSON function spec: {"name": ..., "params": {...}} resolves through the
// catalog; {"from": a, "piecewise": [{"to": b, "fn": ...}, ...]} builds a
// piecewise-monotone representation from whitelisted formulas. Pieces own
// [from, to), so at an interior joint the function takes the right piece's
// value and any mismatch becomes a recorded jump.
inline FunctionRep parse_function_spec(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("function spec: expected a JSON object");

    if (j.contains("name")) {
        if (!j["name"].is_string()) throw ConfigError("function spec: \"name\" must be a string");
        std::map<std::string, double> params;
        if (j.contains("params")) {
            if (!j["params"].is_object())
                throw ConfigError("function spec: \"params\" must be an object");
            for (const auto& [key, val] : j["params"].items()) {
                if (!val.is_number())
                    throw ConfigError("function spec: parameter '" + key + "' must be a number");
                params[key] = val.get<double>();
            }
        }
        return catalog_get(j["name"].get<std::string>(), params);
    }

    if (!j.contains("piecewise") || !j["piecewise"].is_array() || j["piecewise"].empty())
        throw ConfigError("function spec: need \"name\" or a nonempty \"piecewise\" array");
    if (!j.contains("from") || !j["from"].is_number())
        throw ConfigError("function spec: piecewise form needs a numeric \"from\"");

    double cursor = j["from"].get<double>();
    const double start = cursor;
    std::vector<detail::SpecPiece> pieces;
    for (const auto& pj : j["piecewise"]) {
        if (!pj.is_object() || !pj.contains("to") || !pj["to"].is_number())
            throw ConfigError("piecewise: each piece needs a numeric \"to\"");
        double to = pj["to"].get<double>();
        if (!(to > cursor)) throw ConfigError("piecewise: piece ends must strictly increase");
        pieces.push_back(detail::build_piece(pj, cursor, to));
        cursor = to;
    }
    Interval dom(start, cursor);

    std::vector<double> raw;
    for (const auto& p : pieces) {
        for (double c : p.critical) raw.push_back(c);
        if (p.to < dom.b) raw.push_back(p.to);
    }
    std::sort(raw.begin(), raw.end());
    const double tol = 1e-12 * std::max(1.0, dom.length());
    std::vector<double> knots{dom.a};
    for (double k : raw)
        if (k - knots.back() > tol && dom.b - k > tol) knots.push_back(k);
    knots.push_back(dom.b);

    auto shared = std::make_shared<std::vector<detail::SpecPiece>>(std::move(pieces));
    auto fn = [shared](double x) {
        for (const auto& p : *shared)
            if (x < p.to) return p.fn(x);
        return shared->back().fn(x);
    };
    auto dfn = [shared](double x) {
        for (const auto& p : *shared)
            if (x < p.to) return p.dfn(x);
        return shared->back().dfn(x);
    };
    FunctionRep f = make_piecewise_monotone(dom, std::move(knots), fn, dfn, "piecewise", {});

    auto& pm = std::get<PiecewiseMonotone>(f.rep);
    for (std::size_t i = 1; i + 1 < pm.knots.size(); ++i) {
        for (const auto& p : *shared) {
            if (p.to != pm.knots[i]) continue;
            double lv = p.fn(p.to);
            double rv = pm.at_knot[i].value;  // already from the right piece
            if (lv != rv) pm.at_knot[i] = {lv, rv, rv};
            break;
        }
    }
    for (std::size_t i = 0; i + 1 < pm.knots.size(); ++i) {
        double d = pm.at_knot[i + 1].left - pm.at_knot[i].right;
        pm.direction[i] = d > 0   ? Direction::Increasing
                          : d < 0 ? Direction::Decreasing
                                  : Direction::Constant;
    }
    return f;
}

// Grid import: header "x,f", then uniformly spaced rows in increasing x.
inline FunctionRep parse_grid_csv(std::istream& in) {
    std::string line;
    auto strip = [](std::string& s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
            s.pop_back();
    };
    if (!std::getline(in, line)) throw ConfigError("grid csv: empty input");
    strip(line);
    if (line != "x,f") throw ConfigError("grid csv: first line must be \"x,f\"");
    std::vector<double> xs, vs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip(line);
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("grid csv: line " + std::to_string(lineno) + " is not \"x,f\"");
        xs.push_back(detail::parse_number_token(line.substr(0, comma), "grid csv"));
        vs.push_back(detail::parse_number_token(line.substr(comma + 1), "grid csv"));
    }
    if (xs.size() < 2) throw ConfigError("grid csv: need at least two rows");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw ConfigError("grid csv: x must strictly increase");
    const double span = xs.back() - xs.front();
    const double h = span / static_cast<double>(xs.size() - 1);
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - (xs.front() + h * static_cast<double>(i))) > 1e-9 * span)
            throw ConfigError("grid csv: nodes must be uniformly spaced");
    return FunctionRep{Interval(xs.front(), xs.back()), GridFunction{std::move(vs)}, "grid", {}};
}

// {"samples": [...], "corrupt": [indices], "domain": [a, b]?}.
inline CorruptedGrid parse_corrupted_grid(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("samples") || !j["samples"].is_array())
        throw ConfigError("corrupted grid: need a \"samples\" array");
    std::vector<double> values;
    for (const auto& e : j["samples"]) {
        if (!e.is_number()) throw ConfigError("corrupted grid: samples must be numbers");
        values.push_back(e.get<double>());
    }
    if (values.size() < 2) throw ConfigError("corrupted grid: need at least two samples");
    Interval dom(0.0, 1.0);
    if (j.contains("domain")) {
        const auto& d = j["domain"];
        if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number() ||
            !(d[0].get<double>() < d[1].get<double>()))
            throw ConfigError("corrupted grid: \"domain\" must be [a, b] with a < b");
        dom = Interval(d[0].get<double>(), d[1].get<double>());
    }
    std::vector<std::size_t> corrupt;
    if (j.contains("corrupt")) {
        if (!j["corrupt"].is_array()) throw ConfigError("corrupted grid: \"corrupt\" must be an array");
        for (const auto& e : j["corrupt"]) {
            if (!e.is_number_integer() || e.get<long long>() < 0)
                throw ConfigError("corrupted grid: corrupt indices must be nonnegative integers");
            corrupt.push_back(static_cast<std::size_t>(e.get<long long>()));
        }
    }
    return CorruptedGrid{FunctionRep{dom, GridFunction{std::move(values)}, "grid", {}},
                         std::move(corrupt)};
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("invalid JSON in " + origin);
    return j;
}

// Dispatch on the input string: *.json loads a spec file, *.csv loads a
// grid, anything else is catalog shorthand.
inline FunctionRep load_function(const std::string& input) {
    auto ends_with = [&input](const char* suf) {
        std::string s(suf);
        return input.size() > s.size() && input.compare(input.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".json"))
        return parse_function_spec(parse_json_text(detail::read_text_file(input), input));
    if (ends_with(".csv")) {
        std::ifstream in(input, std::ios::binary);
        if (!in) throw IoError("cannot open " + input);
        return parse_grid_csv(in);
    }
    auto [name, params] = parse_catalog_ref(input);
    return catalog_get(name, params);
}

}  // namespace bv
