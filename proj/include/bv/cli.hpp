#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "catalog.hpp"
#include "decompose.hpp"
#include "errors.hpp"
#include "essential.hpp"
#include "function_rep.hpp"
#include "indicatrix.hpp"
#include "measure.hpp"
#include "mollify.hpp"
#include "parse.hpp"
#include "sequences.hpp"
#include "serialize.hpp"
#include "variation.hpp"

// Command dispatch for the bvcli tool. Kept in a header so the test suite
// can drive commands in-process and check artifacts byte for byte.

namespace bv {

struct RunConfig {
    std::string command;
    std::string input;
    std::string second;  // integrator g for the stieltjes command
    int depth = 12;      // refinement depth, member count, or search budget
    double tol = 1e-6;   // classification tolerance
    double bound = std::numeric_limits<double>::infinity();
    std::vector<double> h_schedule;
    int grid = 129;  // sampling resolution for emitted tables
    std::string out_dir = ".";
    bool require_bv = false;
    std::string format = "json";
};

namespace detail {

inline void validate(const RunConfig& c) {
    static const std::vector<std::string> known{"analyze", "indicatrix", "decompose", "mollify",
                                                "helly",   "essential",  "stieltjes"};
    if (std::find(known.begin(), known.end(), c.command) == known.end())
        throw ConfigError("unknown command '" + c.command + "'");
    if (c.input.empty()) throw ConfigError("missing input function");
    if (c.command == "stieltjes" && c.second.empty())
        throw ConfigError("stieltjes needs an integrand and an integrator");
    if (c.depth < 1) throw ConfigError("--depth must be at least 1");
    if (!(c.tol > 0.0)) throw ConfigError("--tol must be positive");
    if (c.grid < 2) throw ConfigError("--grid must be at least 2");
    if (c.format != "json" && c.format != "csv") throw ConfigError("--format must be json or csv");
    for (double h : c.h_schedule)
        if (!(h > 0.0)) throw ConfigError("--h-schedule entries must be positive");
}

inline std::string join_path(const std::string& dir, const std::string& file) {
    if (dir.empty() || dir == ".") return file;
    if (dir.back() == '/') return dir + file;
    return dir + "/" + file;
}

// Reports land first in a sibling temp file and move into place with a
// rename, so a crash mid-write never leaves a truncated artifact behind.
inline void write_file_atomic(const std::string& path, const std::string& bytes) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw IoError("short write on " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot move report into place at " + path);
}

inline nlohmann::json config_json(const RunConfig& c) {
    nlohmann::json j;
    j["command"] = c.command;
    j["input"] = c.input;
    if (!c.second.empty()) j["integrator"] = c.second;
    j["depth"] = c.depth;
    j["tol"] = c.tol;
    j["bound"] = json_number(c.bound);
    if (!c.h_schedule.empty()) j["h_schedule"] = c.h_schedule;
    j["grid"] = c.grid;
    j["out"] = c.out_dir;
    j["require_bv"] = c.require_bv;
    j["format"] = c.format;
    return j;
}

inline nlohmann::json report_shell(const RunConfig& c) {
    nlohmann::json j;
    j["schema"] = kSchemaTag;
    j["version"] = kToolkitVersion;
    j["config"] = config_json(c);
    return j;
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline int run_analyze(const RunConfig& cfg, std::ostream& out) {
    FunctionRep f = load_function(cfg.input);
    nlohmann::json rep = report_shell(cfg);
    rep["domain"] = {f.domain.a, f.domain.b};

    std::optional<double> exact;
    try {
        exact = total_variation_exact(f);
    } catch (const NotBV&) {
    } catch (const UnsupportedRep&) {
    }
    VariationReport vr = total_variation_refine(f, cfg.depth, cfg.bound);
    std::string cls = "Unavailable";
    try {
        cls = ac_verdict_name(classify_ac(f, cfg.tol));
    } catch (const UnsupportedRep&) {
    } catch (const QuadratureFailure&) {
    }

    rep["total_variation"] = exact ? nlohmann::json(*exact) : nlohmann::json(nullptr);
    rep["refine"] = variation_report_json(vr);
    rep["classification"] = cls;

    if (cfg.format == "json") {
        write_file_atomic(join_path(cfg.out_dir, "analyze.json"), dump(rep));
    } else {
        std::string csv = "depth,lower_bound\n";
        for (std::size_t i = 0; i < vr.lower_bounds.size(); ++i)
            csv += std::to_string(i + 1) + "," + fmt_double(vr.lower_bounds[i]) + "\n";
        write_file_atomic(join_path(cfg.out_dir, "analyze.csv"), csv);
    }
    out << "total_variation " << fmt_double(exact ? *exact : vr.value) << "\n"
        << "verdict " << verdict_name(vr.verdict) << "\n"
        << "classification " << cls << "\n";
    return cfg.require_bv && cls == "NotOfBoundedVariation" ? 2 : 0;
}

inline int run_indicatrix(const RunConfig& cfg, std::ostream& out) {
    FunctionRep f = load_function(cfg.input);
    if (cfg.require_bv && has_divergent_tail(f)) return 2;
    int depth = std::min(cfg.depth, 20);

    LevelFunction level = banach_level(f, depth);
    double lo = *std::min_element(level.cell_min.begin(), level.cell_min.end());
    double hi = *std::max_element(level.cell_max.begin(), level.cell_max.end());

    struct Row {
        double y, count;
        int corrected, chi;
    };
    std::vector<Row> rows;
    for (int j = 0; j < cfg.grid; ++j) {
        // midpoints, so the samples dodge plateau values and exact extrema
        double y = lo + (hi - lo) * ((static_cast<double>(j) + 0.5) / cfg.grid);
        double count;
        try {
            count = indicatrix_exact(f, y);
        } catch (const UnsupportedRep&) {
            count = level.count_at(y);
        }
        rows.push_back({y, count, corrected_multiplicity(f, y, depth), level.count_at(y)});
    }

    std::vector<int> depths;
    for (int n = 1; n <= depth; ++n) depths.push_back(n);
    std::vector<BanachEntry> table = banach_integral_sequence(f, depths);

    if (cfg.format == "json") {
        nlohmann::json rep = report_shell(cfg);
        rep["y_range"] = {lo, hi};
        nlohmann::json jrows = nlohmann::json::array();
        for (const auto& r : rows)
            jrows.push_back({{"y", r.y},
                             {"N", json_number(r.count)},
                             {"cN", r.corrected},
                             {"chi_n", r.chi}});
        rep["rows"] = std::move(jrows);
        nlohmann::json conv = nlohmann::json::array();
        for (const auto& e : table) conv.push_back({{"depth", e.depth}, {"integral", e.integral}});
        rep["convergence"] = std::move(conv);
        write_file_atomic(join_path(cfg.out_dir, "indicatrix.json"), dump(rep));
    } else {
        std::string csv = "y,N,cN,chi_n\n";
        for (const auto& r : rows)
            csv += fmt_double(r.y) + "," + fmt_double(r.count) + "," + std::to_string(r.corrected) +
                   "," + std::to_string(r.chi) + "\n";
        write_file_atomic(join_path(cfg.out_dir, "indicatrix.csv"), csv);
        std::string conv = "depth,integral\n";
        for (const auto& e : table)
            conv += std::to_string(e.depth) + "," + fmt_double(e.integral) + "\n";
        write_file_atomic(join_path(cfg.out_dir, "indicatrix_convergence.csv"), conv);
    }
    out << "levels " << cfg.grid << " in [" << fmt_double(lo) << ", " << fmt_double(hi) << "]\n"
        << "integral " << fmt_double(table.empty() ? 0.0 : table.back().integral) << "\n";
    return 0;
}

inline int run_decompose(const RunConfig& cfg, std::ostream& out) {
    FunctionRep f = load_function(cfg.input);
    if (cfg.require_bv && has_divergent_tail(f)) return 2;

    ThreeParts parts = three_part_decompose(f);
    std::vector<JumpRecord> jumps = detect_jumps(f);
    std::string cls = "Unavailable";
    try {
        cls = ac_verdict_name(classify_ac(f, cfg.tol));
    } catch (const UnsupportedRep&) {
    } catch (const QuadratureFailure&) {
    }

    write_file_atomic(join_path(cfg.out_dir, "decompose_F.csv"), grid_csv(parts.ac, cfg.grid));
    write_file_atomic(join_path(cfg.out_dir, "decompose_fcs.csv"),
                      grid_csv(parts.continuous_singular, cfg.grid));
    if (cfg.format == "json") {
        nlohmann::json rep = report_shell(cfg);
        rep["F"] = "decompose_F.csv";
        rep["f_cs"] = "decompose_fcs.csv";
        rep["s_f"] = jump_list_json(jumps);
        rep["classification"] = cls;
        write_file_atomic(join_path(cfg.out_dir, "decompose.json"), dump(rep));
    } else {
        std::string csv = "x,left,value,right\n";
        for (const auto& jr : jumps)
            csv += fmt_double(jr.x) + "," + fmt_double(jr.left) + "," + fmt_double(jr.value) +
                   "," + fmt_double(jr.right) + "\n";
        write_file_atomic(join_path(cfg.out_dir, "decompose_jumps.csv"), csv);
    }
    out << "jumps " << jumps.size() << "\n"
        << "classification " << cls << "\n";
    return 0;
}

inline int run_mollify(const RunConfig& cfg, std::ostream& out) {
    FunctionRep f = load_function(cfg.input);
    if (cfg.require_bv && has_divergent_tail(f)) return 2;

    const double len = f.domain.length();
    double delta = cfg.h_schedule.empty()
                       ? len / 8.0
                       : 2.0 * *std::max_element(cfg.h_schedule.begin(), cfg.h_schedule.end());
    if (!(delta < len)) throw ConfigError("--h-schedule too coarse for the domain");
    Interval sub(f.domain.a, f.domain.b - delta);
    MeanSweep sweep = variation_via_means(f, cfg.h_schedule, sub);

    if (cfg.format == "json") {
        nlohmann::json rep = report_shell(cfg);
        rep["subinterval"] = {sub.a, sub.b};
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& [h, v] : sweep.entries) entries.push_back({h, v});
        rep["entries"] = std::move(entries);
        rep["limit"] = sweep.limit;
        write_file_atomic(join_path(cfg.out_dir, "mollify.json"), dump(rep));
    } else {
        std::string csv = "h,variation\n";
        for (const auto& [h, v] : sweep.entries)
            csv += fmt_double(h) + "," + fmt_double(v) + "\n";
        write_file_atomic(join_path(cfg.out_dir, "mollify.csv"), csv);
    }
    out << "limit " << fmt_double(sweep.limit) << "\n";
    return 0;
}

inline int run_helly(const RunConfig& cfg, std::ostream& out) {
    auto [name, params] = parse_catalog_ref(cfg.input);
    FamilySpec fam{[name = name, params = params](int n) {
                       auto p = params;
                       p["n"] = static_cast<double>(n);
                       return catalog_get(name, p);
                   },
                   cfg.bound};
    HellyResult res = helly_select(fam, cfg.depth, cfg.grid);
    const auto& limit = std::get<GridFunction>(res.limit.rep);

    if (cfg.format == "json") {
        nlohmann::json rep = report_shell(cfg);
        rep["indices"] = res.indices;
        rep["member_variation"] = res.member_variation;
        rep["limit"] = {{"domain", {res.limit.domain.a, res.limit.domain.b}},
                        {"values", limit.values}};
        rep["limit_variation"] = total_variation_exact(res.limit);
        write_file_atomic(join_path(cfg.out_dir, "helly.json"), dump(rep));
    } else {
        write_file_atomic(join_path(cfg.out_dir, "helly_limit.csv"),
                          grid_csv(res.limit, static_cast<int>(limit.values.size())));
        std::string members = "n,variation\n";
        for (std::size_t i = 0; i < res.member_variation.size(); ++i)
            members += std::to_string(i + 1) + "," + fmt_double(res.member_variation[i]) + "\n";
        write_file_atomic(join_path(cfg.out_dir, "helly_members.csv"), members);
    }
    out << "selected " << res.indices.size() << " of " << cfg.depth << "\n"
        << "limit_variation " << fmt_double(total_variation_exact(res.limit)) << "\n";
    return 0;
}

inline int run_essential(const RunConfig& cfg, std::ostream& out) {
    CorruptedGrid cg{FunctionRep{Interval(0.0, 1.0), GridFunction{{0.0, 0.0}}, "", {}}, {}};
    bool have_corrupt_list = false;
    if (cfg.input.size() > 5 && cfg.input.compare(cfg.input.size() - 5, 5, ".json") == 0) {
        nlohmann::json j = parse_json_text(detail::read_text_file(cfg.input), cfg.input);
        if (j.is_object() && j.contains("samples")) {
            cg = parse_corrupted_grid(j);
            have_corrupt_list = !cg.corrupt_indices.empty();
        } else {
            cg.base = parse_function_spec(j);
        }
    } else {
        cg.base = load_function(cfg.input);
    }
    if (!std::holds_alternative<GridFunction>(cg.base.rep))
        cg.base = to_grid(cg.base, cfg.grid - 1);

    double restricted = have_corrupt_list ? restricted_variation(cg)
                                          : total_variation_exact(cg.base);
    PhiSearch search = phi_search(cg.base, static_cast<std::size_t>(cfg.depth));
    std::optional<double> estimate;
    try {
        estimate = essential_variation_estimate(cg.base);
    } catch (const DegenerateGrid&) {
    }

    const auto& values = std::get<GridFunction>(cg.base.rep).values;
    if (cfg.format == "json") {
        nlohmann::json rep = report_shell(cfg);
        rep["samples"] = static_cast<int>(values.size());
        rep["restricted_variation"] = restricted;
        rep["search"] = {{"value", search.value},
                         {"exceptional", search.exceptional},
                         {"exhaustive", search.exhaustive}};
        rep["estimate"] = estimate ? nlohmann::json(*estimate) : nlohmann::json(nullptr);
        write_file_atomic(join_path(cfg.out_dir, "essential.json"), dump(rep));
    } else {
        std::string csv = "i,sample,excluded\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            bool ex = std::find(search.exceptional.begin(), search.exceptional.end(), i) !=
                      search.exceptional.end();
            csv += std::to_string(i) + "," + fmt_double(values[i]) + "," + (ex ? "1" : "0") + "\n";
        }
        write_file_atomic(join_path(cfg.out_dir, "essential.csv"), csv);
    }
    out << "search_value " << fmt_double(search.value) << "\n"
        << "exceptional " << search.exceptional.size() << "\n";
    return 0;
}

inline int run_stieltjes(const RunConfig& cfg, std::ostream& out) {
    FunctionRep f = load_function(cfg.input);
    FunctionRep g = load_function(cfg.second);
    if (cfg.require_bv && has_divergent_tail(g)) return 2;
    double value = stieltjes(f, g, std::min(cfg.depth, 26));

    nlohmann::json rep = report_shell(cfg);
    rep["value"] = value;
    write_file_atomic(join_path(cfg.out_dir, "stieltjes.json"), dump(rep));
    out << fmt_double(value) << "\n";
    return 0;
}

}  // namespace detail

// Exit codes: 0 success, 1 input or configuration problems, 2 when
// --require-bv is set and the input fails the BV classification.
inline int run_command(const RunConfig& cfg, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    try {
        detail::validate(cfg);
        if (cfg.command == "analyze") return detail::run_analyze(cfg, out);
        if (cfg.command == "indicatrix") return detail::run_indicatrix(cfg, out);
        if (cfg.command == "decompose") return detail::run_decompose(cfg, out);
        if (cfg.command == "mollify") return detail::run_mollify(cfg, out);
        if (cfg.command == "helly") return detail::run_helly(cfg, out);
        if (cfg.command == "essential") return detail::run_essential(cfg, out);
        return detail::run_stieltjes(cfg, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace bv
