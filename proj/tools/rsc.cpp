// rsc: command line front end for sampling random complexes, building their
// matrices, computing spectra and running the acceptance suite.

#include "rsc/acceptance.hpp"
#include "rsc/error.hpp"
#include "rsc/experiment.hpp"
#include "rsc/matrices.hpp"
#include "rsc/sampler.hpp"
#include "rsc/words.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using nlohmann::json;

namespace {

std::uint64_t parse_seed(const std::string& s) {
    try {
        std::size_t used = 0;
        std::uint64_t v = 0;
        if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
            v = std::stoull(s.substr(2), &used, 16);
            used += 2;
        } else {
            v = std::stoull(s, &used, 10);
        }
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::logic_error&) {
        throw rsc::InvalidArgument("seed '" + s + "' is not a decimal or 0x-prefixed hex integer");
    }
}

template <typename T>
std::vector<T> parse_list(const std::string& s, const char* what) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::istringstream is(tok);
        T v{};
        if (!(is >> v) || !(is >> std::ws).eof()) {
            throw rsc::InvalidArgument(std::string("bad ") + what + " value '" + tok + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw rsc::InvalidArgument(std::string("empty ") + what + " list");
    }
    return out;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) {
            out.push_back(tok);
        }
    }
    return out;
}

/// Raw flag values; applied over a config file when given.
struct Flags {
    std::string config;
    std::string n, p, model, matrix, normalize, seed, out_dir, format;
    int d = 2;
    std::size_t realizations = 1;
    int moments = 12;
    std::size_t dense_cutoff = 4000;
    std::size_t trace_probes = 0;
    std::size_t workers = 0;
};

struct FlagOptions {
    CLI::Option* d = nullptr;
    CLI::Option* realizations = nullptr;
    CLI::Option* moments = nullptr;
    CLI::Option* dense_cutoff = nullptr;
    CLI::Option* trace_probes = nullptr;
    CLI::Option* workers = nullptr;
};

FlagOptions add_model_flags(CLI::App* app, Flags& f) {
    FlagOptions o;
    app->add_option("--config", f.config, "JSON config file; flags override its fields");
    app->add_option("--n", f.n, "vertex count, or a comma list for a grid");
    o.d = app->add_option("--d", f.d, "top dimension (>= 2)");
    app->add_option("--p", f.p, "comma list p_1,...,p_d");
    app->add_option("--model", f.model, "lower or upper");
    app->add_option("--seed", f.seed, "base seed, decimal or 0x hex");
    return o;
}

void add_matrix_flags(CLI::App* app, Flags& f, FlagOptions& o) {
    app->add_option("--matrix", f.matrix,
                    "unsigned, signed, extended, extended-signed, centered, centered-signed");
    app->add_option("--normalize", f.normalize, "on or off");
    o.realizations = app->add_option("--realizations", f.realizations, "number of realizations");
    app->add_option("--out-dir", f.out_dir, "output directory");
    app->add_option("--format", f.format, "comma list of csv, json, svg");
    o.moments = app->add_option("--moments", f.moments, "highest moment order (<= 12)");
    o.dense_cutoff = app->add_option("--dense-cutoff", f.dense_cutoff, "largest dense eigensolve");
    o.trace_probes = app->add_option("--trace-probes", f.trace_probes,
                                     "estimate moments with this many probes instead of eigenvalues");
    o.workers = app->add_option("--workers", f.workers, "worker threads (0 = all cores)");
}

rsc::ExperimentConfig build_config(const Flags& f, const FlagOptions& o, rsc::ExperimentConfig base) {
    if (!f.config.empty()) {
        std::ifstream is(f.config);
        if (!is) {
            throw rsc::InvalidArgument("cannot read config file " + f.config);
        }
        json j;
        try {
            is >> j;
        } catch (const json::exception& e) {
            throw rsc::InvalidArgument("config file " + f.config + ": " + e.what());
        }
        base.merge_json(j);
    }
    if (!f.n.empty()) {
        base.n = parse_list<std::uint32_t>(f.n, "n");
    }
    if (o.d && o.d->count()) {
        base.d = f.d;
    }
    if (!f.p.empty()) {
        base.p = parse_list<double>(f.p, "p");
    }
    if (!f.model.empty()) {
        base.model = rsc::parse_model(f.model);
    }
    if (!f.matrix.empty()) {
        base.matrix = rsc::parse_matrix_kind(f.matrix);
    }
    if (!f.normalize.empty()) {
        if (f.normalize != "on" && f.normalize != "off") {
            throw rsc::InvalidArgument("--normalize takes on or off");
        }
        base.normalize = f.normalize == "on";
    }
    if (!f.seed.empty()) {
        base.seed = parse_seed(f.seed);
    }
    if (!f.out_dir.empty()) {
        base.out_dir = f.out_dir;
    }
    if (!f.format.empty()) {
        base.formats = split(f.format);
    }
    if (o.realizations && o.realizations->count()) {
        base.realizations = f.realizations;
    }
    if (o.moments && o.moments->count()) {
        base.moments = f.moments;
    }
    if (o.dense_cutoff && o.dense_cutoff->count()) {
        base.dense_cutoff = f.dense_cutoff;
    }
    if (o.trace_probes && o.trace_probes->count()) {
        base.trace_probes = f.trace_probes;
    }
    if (o.workers && o.workers->count()) {
        base.workers = f.workers;
    }
    return base;
}

void print_aggregates(const rsc::Report& report) {
    for (const auto& a : report.aggregates) {
        std::printf("n=%u realizations=%zu c=%.6g mean f_{d-1}/C(n,d)=%.6g (expected %.6g) "
                    "mean N_{d-1}=%.6g (expected %.6g)\n",
                    a.n, a.count, a.c, a.mean_c_hat, a.expected_c_hat, a.mean_maximal,
                    a.expected_maximal);
        for (std::size_t k = 0; k < a.mean_moments.size(); ++k) {
            std::printf("  m_%zu = %.6g +- %.3g\n", k + 1, a.mean_moments[k], a.stderr_moments[k]);
        }
        std::printf("  median KS semicircle = %.6g, median KS tensor(c) = %.6g\n",
                    a.median_ks_semicircle, a.median_ks_tensor);
    }
    if (!report.config.out_dir.empty()) {
        std::printf("outputs written to %s\n", report.config.out_dir.c_str());
    }
}

int cmd_generate(const Flags& f, const FlagOptions& o) {
    rsc::ExperimentConfig base;
    base.matrix = rsc::MatrixKind::signed_adj;
    base.normalize = false;
    const auto config = build_config(f, o, base);
    config.validate();
    const std::uint32_t n = config.n.front();
    const auto params = config.params(n, config.seed);
    const rsc::ComplexView view(rsc::OutcomeOracle(params), n, config.model);
    std::printf("n=%u d=%d model=%s seed=%llu\n", n, config.d, rsc::to_string(config.model).c_str(),
                static_cast<unsigned long long>(config.seed));
    for (int j = 1; j <= config.d; ++j) {
        std::printf("  %d-cells: %llu\n", j, static_cast<unsigned long long>(view.count_cells(j)));
    }
    std::printf("  maximal (d-1)-cells: %llu\n",
                static_cast<unsigned long long>(rsc::count_maximal(view)));
    const auto m = rsc::build_experiment_matrix(config, n, config.seed);
    std::printf("  matrix %s: dim %zu, nnz %zu\n", m.label.c_str(), m.dim(), m.matrix.nnz());
    if (!config.out_dir.empty()) {
        const std::filesystem::path dir(config.out_dir);
        std::filesystem::create_directories(dir);
        std::ostringstream coords, rows, cells;
        rsc::write_coordinates(m.matrix, coords);
        rsc::write_row_cells(m, rows);
        for (int j = 1; j <= config.d; ++j) {
            for (const auto& c : view.list_cells(j)) {
                for (std::size_t i = 0; i < c.size(); ++i) {
                    cells << (i ? "," : "") << c[i];
                }
                cells << '\n';
            }
        }
        rsc::write_atomic(dir / "matrix.txt", coords.str());
        rsc::write_atomic(dir / "rows.txt", rows.str());
        rsc::write_atomic(dir / "cells.txt", cells.str());
        std::printf("wrote matrix.txt, rows.txt and cells.txt to %s\n", config.out_dir.c_str());
    }
    return 0;
}

int cmd_spectrum(const Flags& f, const FlagOptions& o, rsc::ExperimentConfig base) {
    const auto report = rsc::run(build_config(f, o, std::move(base)));
    print_aggregates(report);
    return 0;
}

int cmd_stats(const Flags& f, const FlagOptions& o) {
    rsc::ExperimentConfig base;
    base.realizations = 1;
    const auto config = build_config(f, o, base);
    config.validate();
    json rows = json::array();
    for (auto n : config.n) {
        const auto params = config.params(n, config.seed);
        double sum_f = 0.0, sum_n = 0.0;
        for (std::size_t i = 0; i < config.realizations; ++i) {
            const std::uint64_t seed = config.seed + i;
            const rsc::ComplexView view(rsc::OutcomeOracle(params.p, seed), n, config.model);
            const auto fd = view.count_cells(config.d - 1);
            const auto nm = rsc::count_maximal(view);
            sum_f += static_cast<double>(fd);
            sum_n += static_cast<double>(nm);
            rows.push_back({{"n", n}, {"seed", seed}, {"f_dminus1", fd}, {"maximal", nm}});
        }
        const double r = static_cast<double>(config.realizations);
        std::printf("n=%u: mean f_{d-1} = %.6g (expected %.6g), mean N_{d-1} = %.6g (expected %.6g), "
                    "c = %.6g\n",
                    n, sum_f / r, rsc::expected_fdminus1(params), sum_n / r,
                    rsc::expected_maximal(params), rsc::dom_c_value(params));
    }
    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        rsc::write_atomic(std::filesystem::path(config.out_dir) / "stats.json",
                          json{{"config", config.to_json()}, {"runs", rows}}.dump(2) + "\n");
    }
    return 0;
}

int cmd_words(int k, int s, int d, int kmax, bool verify, const std::string& out) {
    if (verify) {
        bool all = true;
        std::printf("k,enumerated,expected,match\n");
        for (const auto& row : rsc::words_verify(kmax, d)) {
            std::printf("%d,%llu,%llu,%s\n", row.k, static_cast<unsigned long long>(row.enumerated),
                        static_cast<unsigned long long>(row.expected), row.match ? "yes" : "no");
            all = all && row.match;
        }
        return all ? 0 : 1;
    }
    if (s == 0) {
        s = k / 2 + d;
    }
    const auto classes = rsc::enumerate_classes(k, s, d);
    std::ostringstream os;
    rsc::write_classes(classes, os);
    if (out.empty()) {
        std::cout << os.str();
    } else {
        rsc::write_atomic(out, os.str());
    }
    std::fprintf(stderr, "%zu classes (k=%d, s=%d, d=%d)\n", classes.size(), k, s, d);
    return 0;
}

int cmd_verify(const std::vector<int>& only, const std::string& report_path, std::size_t workers) {
    rsc::AcceptanceOptions opts;
    opts.only = only;
    opts.workers = workers;
    std::vector<rsc::CriterionResult> results;
    json report;
    try {
        results = rsc::run_acceptance(opts, [](const rsc::CriterionResult& r) {
            std::printf("%s\n", rsc::format_result_line(r).c_str());
            std::fflush(stdout);
        });
        report = rsc::acceptance_json(results);
    } catch (const std::exception& e) {
        report = {{"all_passed", false}, {"error", e.what()}, {"criteria", json::array()}};
    }
    rsc::write_atomic(report_path, report.dump(2) + "\n");
    std::printf("report written to %s\n", report_path.c_str());
    return report.value("all_passed", false) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random simplicial complexes: sampling, adjacency matrices and spectra"};
    app.require_subcommand(1);

    Flags gen_flags;
    auto* gen = app.add_subcommand("generate", "sample one complex and export its matrix");
    auto gen_opts = add_model_flags(gen, gen_flags);
    add_matrix_flags(gen, gen_flags, gen_opts);

    Flags spectrum_flags;
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, moments and KS distances over realizations");
    auto spectrum_opts = add_model_flags(spectrum, spectrum_flags);
    add_matrix_flags(spectrum, spectrum_flags, spectrum_opts);

    Flags fig_flags;
    auto* fig = app.add_subcommand("reproduce-fig",
                                   "histogram of the normalized centered matrix, n=40 d=2 p=(0.8,0.7)");
    auto fig_opts = add_model_flags(fig, fig_flags);
    add_matrix_flags(fig, fig_flags, fig_opts);

    Flags stat_flags;
    auto* stats = app.add_subcommand("stats", "cell counts and maximal cells against their expectations");
    auto stat_opts = add_model_flags(stats, stat_flags);
    stat_opts.realizations = stats->add_option("--realizations", stat_flags.realizations, "seeds");
    stats->add_option("--out-dir", stat_flags.out_dir, "write stats.json here");

    int wk = 4, ws = 0, wd = 2, kmax = 6;
    bool wverify = false;
    std::string wout;
    auto* words = app.add_subcommand("words", "enumerate word classes or verify class counts");
    words->add_option("--k", wk, "closed word length minus one");
    words->add_option("--s", ws, "support size (default k/2 + d)");
    words->add_option("--d", wd, "dimension");
    words->add_option("--kmax", kmax, "largest k for --verify");
    words->add_flag("--verify", wverify, "compare class counts with catalan(k/2) d^(k/2)");
    words->add_option("--out", wout, "write the class dump here instead of stdout");

    std::vector<int> only;
    std::string report_path = "acceptance_report.json";
    std::size_t vworkers = 0;
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--only", only, "criterion numbers to run");
    verify->add_option("--report", report_path, "JSON report path");
    verify->add_option("--workers", vworkers, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return cmd_generate(gen_flags, gen_opts);
        }
        if (spectrum->parsed()) {
            return cmd_spectrum(spectrum_flags, spectrum_opts, rsc::ExperimentConfig{});
        }
        if (fig->parsed()) {
            rsc::ExperimentConfig base;
            base.out_dir = "reproduce-fig";
            return cmd_spectrum(fig_flags, fig_opts, base);
        }
        if (stats->parsed()) {
            return cmd_stats(stat_flags, stat_opts);
        }
        if (words->parsed()) {
            return cmd_words(wk, ws, wd, kmax, wverify, wout);
        }
        if (verify->parsed()) {
            return cmd_verify(only, report_path, vworkers);
        }
    } catch (const rsc::TooLarge& e) {
        std::fprintf(stderr, "error: %s (try --trace-probes N)\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
