#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectral/spectral.hpp"

namespace {

using namespace spectral;

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_unconverged = 3;

/// Raised for problems with the command line or its referenced inputs.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::vector<std::string> input;
    std::size_t m = 30;
    std::size_t probes = 100;
    std::uint64_t seed = 0;
    std::string basis = "chebyshev";
    double grid_step = 1e-4;
    std::optional<double> eta;
    double sigma = 1e-3;
    std::string out;
    std::string format = "json";
    std::string manifest;

    double tolerance = 1e-6;
    double hessian_noise = 1e-8;
    std::size_t max_iterations = 500;
    double gap_depth = 1e-2;
    double gap_width = 1e-2;
    std::string distribution = "gaussian";

    // generate
    std::string model;
    std::size_t n = 0;
    double param = 0.0;
    std::size_t ws_k = 4;
    std::string sizes;
    std::optional<double> intra_p;
    std::size_t inter_edges = 0;

    // analysis
    std::vector<std::string> labels;
    std::string family;
    std::string families = "er,ws,ba";
    std::string grid;
    std::string grid_er, grid_ws, grid_ba;
    std::size_t replicates = 10;
    std::optional<std::uint64_t> graph_seed;
    std::optional<std::size_t> truth;
    std::string graph_id;
    std::string append_csv;
};

// ---- option plumbing -------------------------------------------------------

void add_output(CLI::App* cmd, Options& o, bool csv = true) {
    cmd->add_option("--out", o.out, "Output path (stdout when omitted)");
    if (csv) {
        cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    } else {
        cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json"}));
    }
}

void add_probe_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--moments", o.m, "Moment order m (Lanczos steps for lanczos)")->check(CLI::PositiveNumber);
    cmd->add_option("--probes", o.probes, "Number of random probe vectors d")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Probe seed");
    cmd->add_option("--basis", o.basis, "Moment basis")->check(CLI::IsMember({"power", "chebyshev"}));
    cmd->add_option("--probe-distribution", o.distribution, "Probe entry distribution")
        ->check(CLI::IsMember({"gaussian", "rademacher"}));
}

void add_solver_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--grid-step", o.grid_step, "Integration and output grid step")->check(CLI::Range(1e-7, 1e-2));
    cmd->add_option("--tolerance", o.tolerance, "Gradient tolerance of the MaxEnt solver")->check(CLI::PositiveNumber);
    cmd->add_option("--hessian-noise", o.hessian_noise, "Hessian diagonal regularization")->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-iterations", o.max_iterations, "Newton iteration cap");
}

void add_cluster_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--eta", o.eta, "Absolute derivative tolerance for the minimum search")->check(CLI::PositiveNumber);
    cmd->add_option("--gap-depth", o.gap_depth, "Largest density value accepted at a spectral gap")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--gap-width", o.gap_width, "Smallest width of the low-density stretch at a spectral gap")
        ->check(CLI::NonNegativeNumber);
}

void add_manifest(CLI::App* cmd, Options& o) {
    cmd->add_option("--manifest", o.manifest, "Manifest path (default: <out>.manifest.json)");
}

ProbeConfig probe_config(const Options& o) {
    ProbeConfig cfg;
    cfg.probes = o.probes;
    cfg.seed = o.seed;
    cfg.distribution = o.distribution == "rademacher" ? ProbeDistribution::rademacher : ProbeDistribution::gaussian;
    return cfg;
}

SolverConfig solver_config(const Options& o) {
    SolverConfig cfg;
    cfg.tolerance = o.tolerance;
    cfg.hessian_noise = o.hessian_noise;
    cfg.max_outer_iterations = o.max_iterations;
    cfg.grid_step = o.grid_step;
    return cfg;
}

ClusterConfig cluster_config(const Options& o) {
    ClusterConfig cfg;
    cfg.eta = o.eta;
    cfg.gap_depth = o.gap_depth;
    cfg.gap_width = o.gap_width;
    cfg.grid_step = o.grid_step;
    return cfg;
}

EslConfig esl_config(const Options& o) {
    EslConfig cfg;
    cfg.m = o.m;
    cfg.probes = probe_config(o);
    cfg.solver = solver_config(o);
    cfg.basis = parse_basis(o.basis);
    return cfg;
}

Json probe_json(const Options& o) {
    return Json{{"m", o.m}, {"d", o.probes}, {"seed", o.seed}, {"basis", o.basis}, {"probe_distribution", o.distribution}};
}

Json solver_json(const Options& o) {
    return Json{{"tolerance", o.tolerance},
                {"hessian_noise", o.hessian_noise},
                {"max_iterations", o.max_iterations},
                {"grid_step", o.grid_step}};
}

// ---- inputs / outputs ------------------------------------------------------

const std::string& single_input(const Options& o) {
    if (o.input.size() != 1) throw UsageError("expected exactly one --input");
    return o.input.front();
}

SparseGraph load_graph(const std::string& path) {
    if (!std::filesystem::exists(path)) throw UsageError("input file not found: " + path);
    try {
        return load_edge_list(path);
    } catch (const EdgeListError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        std::cout.flush();
    } else {
        write_text_file(o.out, text);
    }
}

void emit_json(const Options& o, const Json& j) { emit(o, dump(j)); }

void write_manifest(const Options& o, const std::string& command, Json parameters) {
    std::string path = o.manifest;
    if (path.empty()) {
        if (o.out.empty()) return;
        path = o.out + ".manifest.json";
    }
    Json m{{"command", command},
           {"version", library_version},
           {"inputs", o.input},
           {"parameters", std::move(parameters)}};
    write_text_file(path, dump(m));
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("invalid value '") + item + "' in " + what);
        }
    }
    if (out.empty()) throw UsageError(std::string("empty list for ") + what);
    return out;
}

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int status(bool converged) { return converged ? exit_ok : exit_unconverged; }

// ---- commands --------------------------------------------------------------

int run_generate(const Options& o) {
    if (o.out.empty()) throw UsageError("generate requires --out");
    GraphModel model;
    std::size_t n = o.n;
    if (o.model == "er") {
        model = ErdosRenyi{o.param};
    } else if (o.model == "ws") {
        model = WattsStrogatz{o.ws_k, o.param};
    } else if (o.model == "ba") {
        model = make_model(ModelFamily::barabasi_albert, o.param);
    } else {
        if (o.sizes.empty()) throw UsageError("planted model requires --sizes");
        PlantedClusters pc;
        for (double s : parse_list(o.sizes, "--sizes")) {
            if (!(s >= 1.0) || s != std::floor(s)) throw UsageError("--sizes entries must be positive integers");
            pc.sizes.push_back(static_cast<std::size_t>(s));
        }
        if (o.intra_p) {
            pc.intra = ErdosRenyi{*o.intra_p};
        } else {
            pc.intra = CompleteGraph{};
        }
        pc.inter_edges = o.inter_edges;
        model = pc;
        n = 0;
    }
    if (o.model != "planted" && n < 1) throw UsageError("--n is required for " + o.model);
    const auto gen = generate(model, n, o.seed);
    std::ostringstream text;
    write_edge_list(gen.graph, text);
    write_text_file(o.out, text.str());

    Json params{{"model", o.model}, {"n", gen.graph.size()}, {"seed", o.seed}};
    if (o.model == "planted") {
        params["sizes"] = o.sizes;
        params["intra"] = o.intra_p ? Json(*o.intra_p) : Json("complete");
        params["inter_edges"] = o.inter_edges;
    } else {
        params["param"] = o.param;
        if (o.model == "ws") params["k"] = o.ws_k;
    }
    params["edges"] = gen.graph.edge_count();
    params["components"] = connected_components(gen.graph);
    params["ground_truth_clusters"] = gen.ground_truth_clusters ? Json(*gen.ground_truth_clusters) : Json(nullptr);
    write_manifest(o, "generate", params);
    return exit_ok;
}

int run_moments(const Options& o) {
    const auto g = load_graph(single_input(o));
    const auto mv = estimate_moments(normalized_laplacian(g), o.m, probe_config(o), parse_basis(o.basis));
    if (o.format == "csv") {
        std::ostringstream s;
        write_moments_csv(mv, s);
        emit(o, s.str());
    } else {
        Json j = to_json(mv);
        j["seed"] = o.seed;
        emit_json(o, j);
    }
    return exit_ok;
}

MomentVector load_moments(const std::string& path) {
    if (!std::filesystem::exists(path)) throw UsageError("input file not found: " + path);
    Json j;
    try {
        j = read_json_file(path);
        if (j.contains("moments")) j = j.at("moments");
        return moment_vector_from_json(j);
    } catch (const Json::exception& e) {
        throw UsageError(path + ": not a moment vector JSON (" + e.what() + ")");
    }
}

void emit_density(const Options& o, const Json& doc, const MaxEntDensity& d) {
    if (o.format == "csv") {
        std::ostringstream s;
        write_density_csv(d, o.grid_step, s);
        emit(o, s.str());
    } else {
        emit_json(o, doc);
    }
}

int run_fit(const Options& o) {
    const auto mv = load_moments(single_input(o));
    const auto d = fit_maxent(mv, solver_config(o));
    emit_density(o, Json{{"density", to_json(d)}}, d);
    return status(d.fit_report().converged);
}

int run_esl(const Options& o) {
    const auto g = load_graph(single_input(o));
    const auto r = esl(g, esl_config(o));
    Json doc{{"moments", to_json(r.moments)}, {"density", to_json(r.density)}, {"seed", o.seed}};
    doc["entropy"] = entropy_analytic(r.density, r.moments);
    emit_density(o, doc, r.density);
    return status(r.density.fit_report().converged);
}

/// Edge lists are fitted; JSON files holding {moments, density} are reused.
EslResult load_fit(const std::string& path, const EslConfig& cfg) {
    if (std::filesystem::path(path).extension() == ".json") {
        if (!std::filesystem::exists(path)) throw UsageError("input file not found: " + path);
        try {
            const Json j = read_json_file(path);
            return EslResult{moment_vector_from_json(j.at("moments")), density_from_json(j.at("density"))};
        } catch (const Json::exception& e) {
            throw UsageError(path + ": expected an esl JSON document (" + e.what() + ")");
        }
    }
    return esl(load_graph(path), cfg);
}

int run_divergence(const Options& o) {
    if (o.input.size() != 2) throw UsageError("divergence expects exactly two --input values");
    const auto cfg = esl_config(o);
    const auto a = load_fit(o.input[0], cfg);
    const auto b = load_fit(o.input[1], cfg);
    Json doc{{"inputs", o.input},
             {"kl_ab", kl_analytic(a.density, b.density, a.moments)},
             {"kl_ba", kl_analytic(b.density, a.density, b.moments)},
             {"symmetric_kl", symmetric_kl(a, b)},
             {"entropy_a", entropy_analytic(a.density, a.moments)},
             {"entropy_b", entropy_analytic(b.density, b.moments)},
             {"fit_reports", Json::array({to_json(a.density.fit_report()), to_json(b.density.fit_report())})}};
    if (o.format == "csv") {
        std::ostringstream s;
        s << "quantity,value\n";
        for (const char* key : {"kl_ab", "kl_ba", "symmetric_kl", "entropy_a", "entropy_b"}) {
            s << key << ',' << format_double(doc[key].get<double>()) << '\n';
        }
        emit(o, s.str());
    } else {
        emit_json(o, doc);
    }
    return status(a.density.fit_report().converged && b.density.fit_report().converged);
}

int run_heatmap(const Options& o) {
    if (o.input.size() < 2) throw UsageError("heatmap needs at least two --input graphs");
    if (!o.labels.empty() && o.labels.size() != o.input.size()) throw UsageError("--labels must match --input count");
    std::vector<SparseGraph> graphs;
    for (const auto& path : o.input) graphs.push_back(load_graph(path));
    auto labels = o.labels;
    if (labels.empty()) {
        for (const auto& path : o.input) labels.push_back(std::filesystem::path(path).stem().string());
    }
    const auto sm = similarity_matrix(graphs, labels, esl_config(o));
    if (o.format == "csv") {
        std::ostringstream s;
        write_similarity_csv(sm, s);
        emit(o, s.str());
    } else {
        emit_json(o, to_json(sm));
    }
    Json params = probe_json(o);
    params["solver"] = solver_json(o);
    params["labels"] = sm.labels;
    write_manifest(o, "heatmap", params);
    bool ok = true;
    for (bool f : sm.flagged) ok = ok && !f;
    return status(ok);
}

std::vector<double> grid_for(const Options& o, ModelFamily f, std::size_t n, const std::string& text) {
    if (!text.empty()) {
        auto g = parse_list(text, "grid");
        std::sort(g.begin(), g.end());
        return g;
    }
    return default_grid(f, n);
}

InferenceConfig inference_config(const Options& o) {
    InferenceConfig cfg;
    cfg.esl = esl_config(o);
    if (o.replicates < 1) throw UsageError("--replicates must be at least 1");
    cfg.replicates = o.replicates;
    cfg.graph_seed = o.graph_seed ? *o.graph_seed : o.seed * 100;
    cfg.ws_neighbors = o.ws_k;
    return cfg;
}

int run_infer(const Options& o) {
    const auto g = load_graph(single_input(o));
    if (o.family.empty()) throw UsageError("infer-param requires --family");
    const auto family = parse_model_family(o.family);
    const std::size_t n = o.n > 0 ? o.n : g.size();
    const auto grid = grid_for(o, family, n, o.grid);
    const auto cfg = inference_config(o);
    const auto reference = esl(g, cfg.esl);
    const auto result = infer_parameter(reference, family, n, grid, cfg);
    if (o.format == "csv") {
        std::ostringstream s;
        write_inference_csv(result, s);
        emit(o, s.str());
    } else {
        Json doc = to_json(result);
        doc["reference_fit_report"] = to_json(reference.density.fit_report());
        emit_json(o, doc);
    }
    Json params = probe_json(o);
    params["solver"] = solver_json(o);
    params["family"] = to_string(family);
    params["n"] = n;
    params["grid"] = grid;
    params["replicates"] = cfg.replicates;
    params["graph_seed"] = cfg.graph_seed;
    params["ws_k"] = cfg.ws_neighbors;
    write_manifest(o, "infer-param", params);
    return status(reference.density.fit_report().converged && result.unconverged_fits == 0);
}

int run_classify(const Options& o) {
    const auto g = load_graph(single_input(o));
    const std::size_t n = o.n > 0 ? o.n : g.size();
    std::vector<ModelFamily> families;
    std::vector<std::vector<double>> grids;
    for (const auto& name : split(o.families)) {
        const auto f = parse_model_family(name);
        families.push_back(f);
        const std::string& text = f == ModelFamily::erdos_renyi      ? o.grid_er
                                  : f == ModelFamily::watts_strogatz ? o.grid_ws
                                                                     : o.grid_ba;
        grids.push_back(grid_for(o, f, n, text));
    }
    if (families.empty()) throw UsageError("--families is empty");
    const auto cfg = inference_config(o);
    const auto ranking = classify_network(g, families, n, grids, cfg);
    if (o.format == "csv") {
        std::ostringstream s;
        s << "rank,family,best_parameter,divergence\n";
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            s << i + 1 << ',' << to_string(ranking[i].family) << ',' << format_double(ranking[i].best_parameter) << ','
              << format_double(ranking[i].divergence) << '\n';
        }
        emit(o, s.str());
    } else {
        emit_json(o, Json{{"ranking", to_json(ranking)}});
    }
    Json params = probe_json(o);
    params["solver"] = solver_json(o);
    params["n_match"] = n;
    Json g_json = Json::object();
    for (std::size_t i = 0; i < families.size(); ++i) g_json[std::string(to_string(families[i]))] = grids[i];
    params["grids"] = g_json;
    params["replicates"] = cfg.replicates;
    params["graph_seed"] = cfg.graph_seed;
    params["ws_k"] = cfg.ws_neighbors;
    write_manifest(o, "classify", params);
    bool ok = true;
    for (const auto& e : ranking) ok = ok && e.curve.unconverged_fits == 0;
    return status(ok);
}

int run_clusters(const Options& o) {
    const auto g = load_graph(single_input(o));
    const auto r = esl(g, esl_config(o));
    const auto est = estimate_clusters(r.density, g.size(), cluster_config(o));
    if (o.format == "csv") {
        std::ostringstream s;
        s << "n,n_c,n_c_rounded,lambda_star,gap_found\n";
        s << g.size() << ',' << (est.gap_found ? format_double(est.n_c) : "nogap") << ','
          << (est.gap_found ? std::to_string(est.n_c_rounded) : "nogap") << ','
          << (est.gap_found ? format_double(est.lambda_star) : "nogap") << ',' << (est.gap_found ? 1 : 0) << '\n';
        emit(o, s.str());
    } else {
        emit_json(o, Json{{"clusters", to_json(est)},
                          {"components", connected_components(g)},
                          {"fit_report", to_json(r.density.fit_report())}});
    }
    Json params = probe_json(o);
    params["solver"] = solver_json(o);
    params["eta"] = o.eta ? Json(*o.eta) : Json(nullptr);
    params["gap_depth"] = o.gap_depth;
    params["gap_width"] = o.gap_width;
    write_manifest(o, "clusters", params);
    return status(r.density.fit_report().converged);
}

int run_compare(const Options& o) {
    const auto& path = single_input(o);
    const auto g = load_graph(path);
    const std::size_t truth = o.truth ? *o.truth : connected_components(g);
    if (truth < 1) throw UsageError("--truth must be at least 1");
    DetectorConfig cfg;
    cfg.solver = solver_config(o);
    cfg.cluster = cluster_config(o);
    cfg.sigma = o.sigma;
    cfg.basis = parse_basis(o.basis);
    const auto cmp = compare_detectors(g, truth, o.m, probe_config(o), cfg);
    const std::string id = o.graph_id.empty() ? std::filesystem::path(path).stem().string() : o.graph_id;
    if (!o.append_csv.empty()) append_comparison_rows(o.append_csv, id, g.size(), cmp);
    if (o.format == "csv") {
        std::ostringstream s;
        s << comparison_csv_header << '\n';
        for (const auto& [arm, res] : {std::pair{"maxent", cmp.maxent}, std::pair{"lanczos", cmp.lanczos}}) {
            s << id << ',' << g.size() << ',' << truth << ',' << o.m << ',' << arm << ','
              << (res.error ? format_double(*res.error) : std::string("nogap")) << '\n';
        }
        emit(o, s.str());
    } else {
        Json doc = to_json(cmp);
        doc["graph_id"] = id;
        doc["n"] = g.size();
        emit_json(o, doc);
    }
    Json params = probe_json(o);
    params["solver"] = solver_json(o);
    params["sigma"] = o.sigma;
    params["eta"] = o.eta ? Json(*o.eta) : Json(nullptr);
    params["gap_depth"] = o.gap_depth;
    params["gap_width"] = o.gap_width;
    params["truth"] = truth;
    write_manifest(o, "compare-detectors", params);
    return status(cmp.fit_report.converged);
}

int run_lanczos(const Options& o) {
    const auto g = load_graph(single_input(o));
    const std::size_t steps = std::min(o.m, g.size());
    const auto ds = lanczos_spectrum(normalized_laplacian(g), steps, probe_config(o));
    const auto smooth = kernel_smooth(ds, o.sigma, o.grid_step);
    if (o.format == "csv") {
        std::ostringstream s;
        write_grid_csv(smooth.values, o.grid_step, s);
        emit(o, s.str());
    } else {
        emit_json(o, Json{{"spectrum", to_json(ds)},
                          {"smoothed", to_json(smooth)},
                          {"clusters", to_json(estimate_clusters(smooth, g.size(), cluster_config(o)))}});
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximum-entropy spectral densities of sparse graphs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(library_version));
    Options o;

    auto* gen = app.add_subcommand("generate", "Write a random graph as an edge list");
    gen->add_option("--model", o.model, "Graph model")->required()->check(CLI::IsMember({"er", "ws", "ba", "planted"}));
    gen->add_option("--n", o.n, "Number of nodes (not used by planted)");
    gen->add_option("--param", o.param, "ER/WS probability or BA edges per arriving node");
    gen->add_option("--k", o.ws_k, "Watts-Strogatz ring neighbours (even)");
    gen->add_option("--sizes", o.sizes, "Planted cluster sizes, comma separated");
    gen->add_option("--intra-p", o.intra_p, "Planted intra-cluster ER probability (complete when omitted)");
    gen->add_option("--inter-edges", o.inter_edges, "Planted inter-cluster edges");
    gen->add_option("--seed", o.seed, "Generator seed");
    gen->add_option("--out", o.out, "Edge-list output path")->required();
    add_manifest(gen, o);

    auto* mom = app.add_subcommand("moments", "Stochastic moments of the scaled normalized Laplacian");
    mom->add_option("--input", o.input, "Edge-list file")->required()->expected(1);
    add_probe_options(mom, o);
    add_output(mom, o);

    auto* fit = app.add_subcommand("fit", "MaxEnt density from a moment JSON file");
    fit->add_option("--input", o.input, "Moment JSON (moments output or esl output)")->required()->expected(1);
    add_solver_options(fit, o);
    add_output(fit, o);

    auto* esl_cmd = app.add_subcommand("esl", "Moments and MaxEnt density of a graph");
    esl_cmd->add_option("--input", o.input, "Edge-list file")->required()->expected(1);
    add_probe_options(esl_cmd, o);
    add_solver_options(esl_cmd, o);
    add_output(esl_cmd, o);

    auto* div = app.add_subcommand("divergence", "Analytic KL divergences between two graphs or esl fits");
    div->add_option("--input", o.input, "Two edge lists or esl JSON files")->required()->expected(2);
    add_probe_options(div, o);
    add_solver_options(div, o);
    add_output(div, o);

    auto* heat = app.add_subcommand("heatmap", "Pairwise symmetric KL matrix");
    heat->add_option("--input", o.input, "Edge-list files")->required()->expected(2, 1 << 20);
    heat->add_option("--labels", o.labels, "Labels, one per input");
    add_probe_options(heat, o);
    add_solver_options(heat, o);
    add_output(heat, o);
    add_manifest(heat, o);

    auto add_inference = [&](CLI::App* cmd) {
        cmd->add_option("--input", o.input, "Edge-list file")->required()->expected(1);
        cmd->add_option("--n", o.n, "Size of generated candidates (default: input size)");
        cmd->add_option("--replicates", o.replicates, "Replicates per grid value");
        cmd->add_option("--graph-seed", o.graph_seed, "Seed of the first replicate (default: 100 * seed)");
        cmd->add_option("--k", o.ws_k, "Watts-Strogatz ring neighbours");
        add_probe_options(cmd, o);
        add_solver_options(cmd, o);
        add_output(cmd, o);
        add_manifest(cmd, o);
    };
    auto* cls = app.add_subcommand("classify", "Rank random-graph families by divergence to a target");
    add_inference(cls);
    cls->add_option("--families", o.families, "Comma-separated families (er,ws,ba)");
    cls->add_option("--grid-er", o.grid_er, "ER probability grid");
    cls->add_option("--grid-ws", o.grid_ws, "WS rewiring grid");
    cls->add_option("--grid-ba", o.grid_ba, "BA attachment grid");

    auto* inf = app.add_subcommand("infer-param", "Grid search for a model parameter");
    add_inference(inf);
    inf->add_option("--family", o.family, "Model family (er|ws|ba)")->required();
    inf->add_option("--grid", o.grid, "Comma-separated parameter grid");

    auto* clu = app.add_subcommand("clusters", "Cluster count from the MaxEnt spectral gap");
    clu->add_option("--input", o.input, "Edge-list file")->required()->expected(1);
    add_probe_options(clu, o);
    add_solver_options(clu, o);
    add_cluster_options(clu, o);
    add_output(clu, o);
    add_manifest(clu, o);

    auto* cmp = app.add_subcommand("compare-detectors", "MaxEnt versus Lanczos cluster counts at equal budget");
    cmp->add_option("--input", o.input, "Edge-list file")->required()->expected(1);
    cmp->add_option("--truth", o.truth, "True cluster count (default: connected components)");
    cmp->add_option("--graph-id", o.graph_id, "Identifier used in CSV rows");
    cmp->add_option("--append-csv", o.append_csv, "Append one row per arm to this CSV file");
    cmp->add_option("--sigma", o.sigma, "Gaussian kernel width for the Lanczos arm")->check(CLI::PositiveNumber);
    add_probe_options(cmp, o);
    add_solver_options(cmp, o);
    add_cluster_options(cmp, o);
    add_output(cmp, o);
    add_manifest(cmp, o);

    auto* lan = app.add_subcommand("lanczos", "Stochastic Lanczos quadrature with Gaussian smoothing");
    lan->add_option("--input", o.input, "Edge-list file")->required()->expected(1);
    lan->add_option("--sigma", o.sigma, "Gaussian kernel width")->check(CLI::PositiveNumber);
    add_probe_options(lan, o);
    lan->add_option("--grid-step", o.grid_step, "Output grid step")->check(CLI::Range(1e-7, 1e-2));
    add_cluster_options(lan, o);
    add_output(lan, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*gen) return run_generate(o);
        if (*mom) return run_moments(o);
        if (*fit) return run_fit(o);
        if (*esl_cmd) return run_esl(o);
        if (*div) return run_divergence(o);
        if (*heat) return run_heatmap(o);
        if (*cls) return run_classify(o);
        if (*inf) return run_infer(o);
        if (*clu) return run_clusters(o);
        if (*cmp) return run_compare(o);
        if (*lan) return run_lanczos(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_usage;
}
