#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectral/analysis.hpp"
#include "spectral/cluster.hpp"
#include "spectral/kernel_smoothing.hpp"
#include "spectral/lanczos.hpp"
#include "spectral/maxent.hpp"
#include "spectral/moments.hpp"

namespace spectral {

using Json = nlohmann::ordered_json;

inline constexpr const char* library_version = "1.0.0";

/// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// ---- moments ---------------------------------------------------------------

inline Json to_json(const MomentVector& mv) {
    return Json{{"basis", to_string(mv.basis)},
                {"n", mv.dimension},
                {"d", mv.probes},
                {"m", mv.order()},
                {"values", mv.values}};
}

inline MomentVector moment_vector_from_json(const Json& j) {
    MomentVector mv;
    mv.basis = parse_basis(j.at("basis").get<std::string>());
    mv.values = j.at("values").get<std::vector<double>>();
    mv.dimension = j.value("n", std::size_t{0});
    mv.probes = j.value("d", std::size_t{0});
    if (j.contains("m") && j.at("m").get<std::size_t>() != mv.order()) {
        throw std::invalid_argument("moment JSON: m does not match the number of values");
    }
    return mv;
}

inline void write_moments_csv(const MomentVector& mv, std::ostream& out) {
    out << "k,basis,value\n";
    for (std::size_t k = 0; k < mv.values.size(); ++k) {
        out << k << ',' << to_string(mv.basis) << ',' << format_double(mv.values[k]) << '\n';
    }
}

// ---- MaxEnt ----------------------------------------------------------------

inline Json to_json(const FitReport& r) {
    return Json{{"converged", r.converged},
                {"gradient_norm", finite_or_null(r.gradient_norm)},
                {"iterations", r.iterations},
                {"objective", finite_or_null(r.objective)},
                {"exponent_clamped", r.exponent_clamped},
                {"stop_reason", r.stop_reason}};
}

inline Json to_json(const MaxEntDensity& d) {
    return Json{{"basis", to_string(d.basis())},
                {"m", d.order()},
                {"alpha", d.alpha()},
                {"grid_step", d.grid_step()},
                {"fit_report", to_json(d.fit_report())}};
}

inline MaxEntDensity density_from_json(const Json& j) {
    FitReport r;
    if (j.contains("fit_report")) {
        const auto& f = j.at("fit_report");
        r.converged = f.value("converged", false);
        if (f.contains("gradient_norm") && !f.at("gradient_norm").is_null()) r.gradient_norm = f.at("gradient_norm").get<double>();
        r.iterations = f.value("iterations", std::size_t{0});
        if (f.contains("objective") && !f.at("objective").is_null()) r.objective = f.at("objective").get<double>();
        r.exponent_clamped = f.value("exponent_clamped", false);
        r.stop_reason = f.value("stop_reason", std::string{});
    }
    auto alpha = j.at("alpha").get<std::vector<double>>();
    if (j.contains("m") && j.at("m").get<std::size_t>() + 1 != alpha.size()) {
        throw std::invalid_argument("density JSON: m does not match the number of coefficients");
    }
    return MaxEntDensity(parse_basis(j.at("basis").get<std::string>()), std::move(alpha),
                         j.value("grid_step", 1e-4), r);
}

inline void write_grid_csv(const std::vector<double>& values, double grid_step, std::ostream& out,
                           const char* column = "p") {
    UniformGrid grid(grid_step);
    out << "lambda," << column << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << format_double(grid.point(i)) << ',' << format_double(values[i]) << '\n';
    }
}

inline void write_density_csv(const MaxEntDensity& d, double grid_step, std::ostream& out) {
    write_grid_csv(d.on_grid(grid_step), grid_step, out);
}

// ---- Lanczos / smoothing ---------------------------------------------------

inline Json to_json(const DiracSpectrum& ds) {
    return Json{{"steps", ds.steps},
                {"starts", ds.starts},
                {"breakdowns", ds.breakdowns},
                {"atoms", ds.size()},
                {"nodes", ds.nodes},
                {"weights", ds.weights}};
}

inline Json to_json(const SmoothedDensity& s) {
    return Json{{"kernel", "gaussian"},
                {"sigma", s.sigma},
                {"grid_step", s.grid_step},
                {"inside_mass", s.inside_mass},
                {"base", to_json(s.base)}};
}

// ---- clusters --------------------------------------------------------------

inline Json to_json(const ClusterEstimate& e) {
    Json j{{"n", e.n}, {"gap_found", e.gap_found}, {"eta", e.eta}};
    if (e.gap_found) {
        j["n_c"] = e.n_c;
        j["n_c_rounded"] = e.n_c_rounded;
        j["lambda_star"] = e.lambda_star;
    } else {
        j["n_c"] = nullptr;
        j["n_c_rounded"] = nullptr;
        j["lambda_star"] = nullptr;
    }
    return j;
}

inline Json to_json(const ArmResult& a) {
    return Json{{"estimate", to_json(a.estimate)}, {"error", a.error ? Json(*a.error) : Json(nullptr)}};
}

inline Json to_json(const DetectorComparison& c) {
    return Json{{"truth", c.truth},
                {"m", c.m},
                {"maxent", to_json(c.maxent)},
                {"lanczos", to_json(c.lanczos)},
                {"fit_report", to_json(c.fit_report)},
                {"lanczos_breakdowns", c.lanczos_breakdowns}};
}

inline constexpr const char* comparison_csv_header = "graph_id,n,truth,m,arm,error";

/// Appends one row per arm; the header is written when the file is new or empty.
inline void append_comparison_rows(const std::string& path, const std::string& graph_id, std::size_t n,
                                   const DetectorComparison& c) {
    bool need_header = true;
    {
        std::ifstream probe(path, std::ios::binary | std::ios::ate);
        if (probe && probe.tellg() > 0) need_header = false;
    }
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for appending");
    if (need_header) out << comparison_csv_header << '\n';
    auto row = [&](const char* arm, const ArmResult& a) {
        out << graph_id << ',' << n << ',' << c.truth << ',' << c.m << ',' << arm << ','
            << (a.error ? format_double(*a.error) : std::string("nogap")) << '\n';
    };
    row("maxent", c.maxent);
    row("lanczos", c.lanczos);
}

// ---- analysis --------------------------------------------------------------

inline Json to_json(const SimilarityMatrix& s) {
    Json reports = Json::array();
    for (const auto& r : s.reports) reports.push_back(to_json(r));
    return Json{{"labels", s.labels},
                {"m", s.m},
                {"d", s.probes},
                {"values", s.values},
                {"flagged", s.flagged},
                {"fit_reports", reports}};
}

inline void write_similarity_csv(const SimilarityMatrix& s, std::ostream& out) {
    out << "label";
    for (const auto& l : s.labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << s.labels[i];
        for (std::size_t j = 0; j < s.size(); ++j) out << ',' << format_double(s.values[i][j]);
        out << '\n';
    }
}

inline Json to_json(const InferenceResult& r) {
    return Json{{"family", to_string(r.family)},
                {"grid", r.grid},
                {"divergences", r.divergences},
                {"best_parameter", r.best_parameter},
                {"best_divergence", r.best_divergence()},
                {"replicates", r.replicates},
                {"unconverged_fits", r.unconverged_fits}};
}

inline void write_inference_csv(const InferenceResult& r, std::ostream& out) {
    out << "parameter,divergence\n";
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        out << format_double(r.grid[i]) << ',' << format_double(r.divergences[i]) << '\n';
    }
}

inline Json to_json(const std::vector<ClassificationEntry>& ranking) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        arr.push_back(Json{{"rank", i + 1},
                           {"family", to_string(ranking[i].family)},
                           {"best_parameter", ranking[i].best_parameter},
                           {"divergence", ranking[i].divergence},
                           {"curve", to_json(ranking[i].curve)}});
    }
    return arr;
}

// ---- files -----------------------------------------------------------------

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return Json::parse(in);
}

} // namespace spectral
