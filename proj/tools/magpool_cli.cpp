/*
Copyright 2026 The magpool Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Command-line front end: pool, diversity, eval, sweep, gen.
// Exit codes: 0 success, 1 input error, 2 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "magpool/magpool.hpp"

namespace {

using namespace magpool;

constexpr int kInputError = 1;
constexpr int kNumericalError = 2;

Graph load_input(const std::string& input) {
    if (input.rfind("gen:", 0) == 0) return generate_from_spec(input.substr(4));
    return read_graph(input);
}

TieBreak parse_tiebreak(const std::string& s) {
    if (s == "lex") return TieBreak::lexicographic();
    if (s.rfind("seed:", 0) == 0) {
        const std::string digits = s.substr(5);
        std::uint64_t seed = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && !digits.empty()) {
            return TieBreak::seeded(seed);
        }
    }
    throw Error(ErrorCode::InvalidParams, "--tiebreak expects seed:N or lex, got '" + s + "'");
}

std::vector<double> parse_reals(const std::string& csv) {
    std::vector<double> out;
    std::string_view rest = csv;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string item(rest.substr(0, comma));
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size()) {
            throw Error(ErrorCode::InvalidParams, "bad number '" + item + "'");
        }
        out.push_back(v);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    return out;
}

std::string real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct PoolArgs {
    std::string input;
    double ratio = 0.5;
    std::string measure = "spread";
    std::string metric;
    std::string agg = "mean";
    std::string tiebreak = "seed:0";
    double scale = 1.0;
    std::string out;
};

int run_pool(const PoolArgs& a) {
    const Graph g = load_input(a.input);
    PoolingConfig cfg;
    cfg.ratio = a.ratio;
    cfg.measure = a.measure == "mag" ? Measure::Magnitude : Measure::Spread;
    if (a.metric == "exact") cfg.metric_mode = MetricMode::Exact;
    if (a.metric == "minupdate") cfg.metric_mode = MetricMode::MinUpdate;
    cfg.aggregation = a.agg == "sum" ? Aggregation::Sum : Aggregation::Mean;
    cfg.tie_break = parse_tiebreak(a.tiebreak);
    cfg.scale = a.scale;
    const PoolingResult res = pool(g, cfg);
    write_result(a.out, res);
    std::cout << "pooled " << g.node_count() << " -> " << res.pooled.node_count() << " nodes, "
              << res.pooled.edge_count() << " edges, " << res.trace.rescoring_boundaries.size()
              << " rounds" << (res.exhausted ? " (exhausted)" : "") << "\n";
    if (res.unscoreable_edges > 0) {
        std::cerr << "warning: " << res.unscoreable_edges << " edge scores could not be solved\n";
    }
    return 0;
}

struct DiversityArgs {
    std::string input;
    std::string measure = "both";
    double scale = 1.0;
    std::string profile;
};

int run_diversity(const DiversityArgs& a) {
    const Graph g = load_input(a.input);
    const DistanceMatrix d = diffusion_distances(g);
    if (!a.profile.empty()) {
        // T1:T2:STEPS, evenly spaced and inclusive of both ends.
        const auto c1 = a.profile.find(':');
        const auto c2 = a.profile.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw Error(ErrorCode::InvalidParams, "--profile expects T1:T2:STEPS");
        }
        const double t1 = parse_reals(a.profile.substr(0, c1)).at(0);
        const double t2 = parse_reals(a.profile.substr(c1 + 1, c2 - c1 - 1)).at(0);
        const auto steps = static_cast<Index>(parse_reals(a.profile.substr(c2 + 1)).at(0));
        if (steps < 1 || !(t1 > 0.0) || t2 < t1) {
            throw Error(ErrorCode::InvalidParams, "--profile needs 0 < T1 <= T2 and STEPS >= 1");
        }
        std::vector<double> grid;
        for (Index i = 0; i < steps; ++i) {
            grid.push_back(steps == 1 ? t1 : t1 + (t2 - t1) * static_cast<double>(i) /
                                                      static_cast<double>(steps - 1));
        }
        bool failed = false;
        std::vector<Measure> measures;
        if (a.measure != "spread") measures.push_back(Measure::Magnitude);
        if (a.measure != "mag") measures.push_back(Measure::Spread);
        for (Measure m : measures) {
            for (const auto& p : diversity_profile(d, grid, m)) {
                std::cout << (m == Measure::Magnitude ? "magnitude" : "spread") << " "
                          << real(p.scale) << " ";
                if (p.value) {
                    std::cout << real(*p.value) << "\n";
                } else {
                    std::cout << "nan\n";
                    std::cerr << "t=" << real(p.scale) << ": " << *p.error << "\n";
                    failed = true;
                }
            }
        }
        return failed ? kNumericalError : 0;
    }
    if (a.measure != "spread") std::cout << "magnitude " << real(magnitude_value(d, a.scale)) << "\n";
    if (a.measure != "mag") std::cout << "spread " << real(spread_value(d, a.scale)) << "\n";
    return 0;
}

int run_eval(const std::string& original, const std::string& pooled, double scale) {
    const Graph g = load_input(original);
    const Graph p = load_input(pooled);
    std::cout << "spectral_distance " << real(spectral_distance(g, p)) << "\n";
    std::cout << "relative_magnitude_difference " << real(relative_magnitude_difference(g, p, scale))
              << "\n";
    return 0;
}

struct SweepArgs {
    std::string dataset;
    std::string name;
    std::string ratios = "0.125,0.25,0.5,0.75";
    std::string methods = "mag,spread,random";
    std::string out;
    std::string summary;
    std::string tiebreak = "seed:0";
    double scale = 1.0;
};

int run_sweep(const SweepArgs& a) {
    std::vector<Graph> graphs;
    if (a.dataset.rfind("synthetic:", 0) == 0) {
        // synthetic:COUNT[:SEED]
        const std::string spec = a.dataset.substr(10);
        const auto colon = spec.find(':');
        const auto count = static_cast<Index>(parse_reals(spec.substr(0, colon)).at(0));
        const auto seed = colon == std::string::npos
                              ? 0ULL
                              : static_cast<unsigned long long>(parse_reals(spec.substr(colon + 1)).at(0));
        graphs = synthetic_corpus(count, seed);
    } else {
        const std::filesystem::path dir(a.dataset);
        const std::string name = a.name.empty() ? dir.filename().string() : a.name;
        graphs = load_tudataset(dir, name).graphs;
    }
    const std::vector<double> ratios = parse_reals(a.ratios);
    std::vector<PoolingMethod> methods;
    std::string_view rest = a.methods;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        methods.push_back(parse_pooling_method(rest.substr(0, comma)));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    PoolingConfig cfg;
    cfg.tie_break = parse_tiebreak(a.tiebreak);
    cfg.scale = a.scale;
    const SweepResult res = ratio_sweep(graphs, ratios, methods, cfg);
    write_sweep_csv(a.out, res.rows);
    std::filesystem::path summary = a.summary;
    if (summary.empty()) {
        const std::filesystem::path out(a.out);
        summary = out.parent_path() / (out.stem().string() + "_summary.csv");
    }
    io_detail::dump(summary, format_sweep_summary_csv(res.summary));
    for (const auto& msg : res.failure_messages) std::cerr << "failed: " << msg << "\n";
    std::cout << res.rows.size() << " rows, " << res.failures << " failures\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"magpool: magnitude- and spread-guided edge-contraction graph pooling"};
    app.require_subcommand(1);

    PoolArgs pool_args;
    auto* pool_cmd = app.add_subcommand("pool", "Pool a graph by edge contraction");
    pool_cmd->add_option("--input", pool_args.input, "Graph file or gen:SPEC")->required();
    pool_cmd->add_option("--ratio", pool_args.ratio, "Pooling ratio in (0, 1]")->required();
    pool_cmd->add_option("--measure", pool_args.measure)->check(CLI::IsMember({"mag", "spread"}));
    pool_cmd->add_option("--metric", pool_args.metric, "exact or minupdate (default: by size)")
        ->check(CLI::IsMember({"exact", "minupdate"}));
    pool_cmd->add_option("--agg", pool_args.agg)->check(CLI::IsMember({"mean", "sum"}));
    pool_cmd->add_option("--tiebreak", pool_args.tiebreak, "seed:N or lex");
    pool_cmd->add_option("--scale", pool_args.scale, "Similarity scale t");
    pool_cmd->add_option("--out", pool_args.out, "Result file")->required();

    DiversityArgs div_args;
    auto* div_cmd = app.add_subcommand("diversity", "Magnitude and spread of a graph");
    div_cmd->add_option("--input", div_args.input)->required();
    div_cmd->add_option("--measure", div_args.measure)->check(CLI::IsMember({"mag", "spread", "both"}));
    div_cmd->add_option("--scale", div_args.scale);
    div_cmd->add_option("--profile", div_args.profile, "T1:T2:STEPS");

    std::string eval_original, eval_pooled;
    double eval_scale = 1.0;
    auto* eval_cmd = app.add_subcommand("eval", "Spectral distance and relative magnitude difference");
    eval_cmd->add_option("--original", eval_original)->required();
    eval_cmd->add_option("--pooled", eval_pooled)->required();
    eval_cmd->add_option("--scale", eval_scale);

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "Structure preservation across pooling ratios");
    sweep_cmd->add_option("--dataset", sweep_args.dataset, "TUDataset directory or synthetic:COUNT[:SEED]")
        ->required();
    sweep_cmd->add_option("--name", sweep_args.name, "Dataset file prefix (default: directory name)");
    sweep_cmd->add_option("--ratios", sweep_args.ratios);
    sweep_cmd->add_option("--methods", sweep_args.methods);
    sweep_cmd->add_option("--out", sweep_args.out)->required();
    sweep_cmd->add_option("--summary", sweep_args.summary);
    sweep_cmd->add_option("--tiebreak", sweep_args.tiebreak);
    sweep_cmd->add_option("--scale", sweep_args.scale);

    std::string gen_kind, gen_out;
    GeneratorParams gen_params;
    std::uint64_t gen_seed = 0;
    auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic graph");
    gen_cmd->add_option("--kind", gen_kind)
        ->required()
        ->check(CLI::IsMember({"ring", "barbell", "erdos_renyi", "random_geometric", "star", "path"}));
    gen_cmd->add_option("--n", gen_params.n);
    gen_cmd->add_option("--m1", gen_params.m1);
    gen_cmd->add_option("--m2", gen_params.m2);
    gen_cmd->add_option("--bridge", gen_params.bridge);
    gen_cmd->add_option("--p", gen_params.p);
    gen_cmd->add_option("--radius", gen_params.radius);
    gen_cmd->add_option("--seed", gen_seed);
    gen_cmd->add_option("--out", gen_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInputError;
    }

    try {
        if (*pool_cmd) return run_pool(pool_args);
        if (*div_cmd) return run_diversity(div_args);
        if (*eval_cmd) return run_eval(eval_original, eval_pooled, eval_scale);
        if (*sweep_cmd) return run_sweep(sweep_args);
        if (*gen_cmd) {
            write_graph(gen_out, generate(parse_generator_kind(gen_kind), gen_params, gen_seed));
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_numerical(e.code()) ? kNumericalError : kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
