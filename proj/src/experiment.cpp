#include "rsc/experiment.hpp"

#include "rsc/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace rsc {

using nlohmann::json;

namespace {

const char* const kFormats[] = {"csv", "json", "svg"};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(double v, int digits = 6) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

json number_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

} // namespace

void ExperimentConfig::validate() const {
    if (n.empty()) {
        throw InvalidArgument("at least one vertex count is required");
    }
    if (realizations < 1) {
        throw InvalidArgument("realizations must be at least 1");
    }
    if (moments < 1 || moments > 12) {
        throw InvalidArgument("moments must lie in [1, 12]");
    }
    for (auto nv : n) {
        params(nv, seed).validate();
    }
    for (const auto& f : formats) {
        if (std::find(std::begin(kFormats), std::end(kFormats), f) == std::end(kFormats)) {
            throw InvalidArgument("unknown output format '" + f + "' (expected csv, json or svg)");
        }
    }
    if (model == Model::upper &&
        (matrix == MatrixKind::centered || matrix == MatrixKind::centered_signed)) {
        throw InvalidArgument("centered matrices are defined for the lower model only");
    }
    if (normalize && p.size() == static_cast<std::size_t>(d) && p.back() >= 1.0) {
        throw InvalidArgument("normalization needs p_d < 1");
    }
}

ModelParams ExperimentConfig::params(std::uint32_t n_value, std::uint64_t seed_value) const {
    return ModelParams{n_value, d, p, seed_value};
}

bool ExperimentConfig::wants(const std::string& format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

json ExperimentConfig::to_json() const {
    return json{{"n", n},
                {"d", d},
                {"p", p},
                {"model", to_string(model)},
                {"matrix", to_string(matrix)},
                {"normalize", normalize},
                {"realizations", realizations},
                {"seed", seed},
                {"out_dir", out_dir},
                {"formats", formats},
                {"moments", moments},
                {"dense_cutoff", dense_cutoff},
                {"trace_probes", trace_probes}};
}

void ExperimentConfig::merge_json(const json& j) {
    if (!j.is_object()) {
        throw InvalidArgument("config must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "n") {
                n = value.is_array() ? value.get<std::vector<std::uint32_t>>()
                                     : std::vector<std::uint32_t>{value.get<std::uint32_t>()};
            } else if (key == "d") {
                d = value.get<int>();
            } else if (key == "p") {
                p = value.get<std::vector<double>>();
            } else if (key == "model") {
                model = parse_model(value.get<std::string>());
            } else if (key == "matrix") {
                matrix = parse_matrix_kind(value.get<std::string>());
            } else if (key == "normalize") {
                normalize = value.is_boolean() ? value.get<bool>() : value.get<std::string>() == "on";
            } else if (key == "realizations") {
                realizations = value.get<std::size_t>();
            } else if (key == "seed") {
                seed = value.get<std::uint64_t>();
            } else if (key == "out_dir") {
                out_dir = value.get<std::string>();
            } else if (key == "formats") {
                formats = value.get<std::vector<std::string>>();
            } else if (key == "moments") {
                moments = value.get<int>();
            } else if (key == "dense_cutoff") {
                dense_cutoff = value.get<std::size_t>();
            } else if (key == "trace_probes") {
                trace_probes = value.get<std::size_t>();
            } else if (key == "workers") {
                workers = value.get<std::size_t>();
            } else {
                throw InvalidArgument("unknown config field '" + key + "'");
            }
        } catch (const json::exception& e) {
            throw InvalidArgument("config field '" + key + "': " + e.what());
        }
    }
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    c.merge_json(j);
    return c;
}

SymMatrixView build_experiment_matrix(const ExperimentConfig& config, std::uint32_t n,
                                      std::uint64_t seed) {
    const ModelParams params = config.params(n, seed);
    const ComplexView view(OutcomeOracle(params), n, config.model);
    SymMatrixView m = build_matrix(view, config.matrix);
    return config.normalize ? normalize(m, params) : m;
}

ReferenceLaw overlay_law(const ExperimentConfig& config, std::uint32_t n) {
    if (is_extended(config.matrix) && config.model == Model::lower) {
        return ReferenceLaw::tensor(dom_c_value(config.params(n, config.seed)));
    }
    return ReferenceLaw::semicircle();
}

namespace {

RealizationResult run_one(const ExperimentConfig& config, std::uint32_t n, std::uint64_t seed) {
    RealizationResult r;
    r.n = n;
    r.seed = seed;
    const ModelParams params = config.params(n, seed);
    const ComplexView view(OutcomeOracle(params), n, config.model);
    SymMatrixView m = build_matrix(view, config.matrix);
    if (config.normalize) {
        m = normalize(m, params);
    }
    r.dim = m.dim();
    r.f_dminus1 = view.count_cells(config.d - 1);
    r.maximal = count_maximal(view);
    r.c_hat = static_cast<double>(r.f_dminus1) / static_cast<double>(binomial(n, config.d));

    if (config.trace_probes > 0) {
        const MomentEstimate est = trace_moments(m.matrix, config.moments, config.trace_probes, seed);
        r.moments = est.mean;
        r.moment_stderr = est.stderr_;
        r.ks_semicircle = std::numeric_limits<double>::quiet_NaN();
        r.ks_tensor = std::numeric_limits<double>::quiet_NaN();
        return r;
    }

    EigenOptions opts;
    opts.dense_cutoff = config.dense_cutoff;
    r.eigenvalues = eigenvalues_sym(m.matrix, opts);
    r.trace_identities_ok = check_trace_identities(m.matrix, r.eigenvalues).ok;
    if (r.dim == 0) {
        r.moments.assign(static_cast<std::size_t>(config.moments), 0.0);
        return r;
    }
    r.moments = empirical_moments(r.eigenvalues, config.moments, r.dim);
    const StepCdf f = esd(r.eigenvalues, r.dim);
    r.ks_semicircle = ks_distance(f, ReferenceLaw::semicircle());
    r.ks_tensor = ks_distance(f, ReferenceLaw::tensor(dom_c_value(params)));
    return r;
}

} // namespace

double median(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
    if (v.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Aggregate aggregate(const ExperimentConfig& config, std::uint32_t n,
                    const std::vector<const RealizationResult*>& rows) {
    Aggregate a;
    a.n = n;
    a.count = rows.size();
    const auto K = static_cast<std::size_t>(config.moments);
    a.mean_moments.assign(K, 0.0);
    a.stderr_moments.assign(K, 0.0);
    std::vector<double> ks_sc, ks_t;
    for (const auto* r : rows) {
        for (std::size_t k = 0; k < K && k < r->moments.size(); ++k) {
            a.mean_moments[k] += r->moments[k];
        }
        a.mean_c_hat += r->c_hat;
        a.mean_maximal += static_cast<double>(r->maximal);
        ks_sc.push_back(r->ks_semicircle);
        ks_t.push_back(r->ks_tensor);
    }
    const double cnt = static_cast<double>(rows.size());
    for (auto& m : a.mean_moments) {
        m /= cnt;
    }
    a.mean_c_hat /= cnt;
    a.mean_maximal /= cnt;
    if (rows.size() > 1) {
        for (std::size_t k = 0; k < K; ++k) {
            double ss = 0.0;
            for (const auto* r : rows) {
                const double dlt = r->moments[k] - a.mean_moments[k];
                ss += dlt * dlt;
            }
            a.stderr_moments[k] = std::sqrt(ss / (cnt - 1.0) / cnt);
        }
    }
    a.median_ks_semicircle = median(ks_sc);
    a.median_ks_tensor = median(ks_t);
    const ModelParams params = config.params(n, config.seed);
    a.c = dom_c_value(params);
    a.expected_c_hat = expected_fdminus1(params) / static_cast<double>(binomial(n, config.d));
    a.expected_maximal = expected_maximal(params);
    return a;
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    next.store(count);
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

Report run(const ExperimentConfig& config) {
    config.validate();
    Report report;
    report.config = config;
    const std::size_t per_n = config.realizations;
    const std::size_t total = per_n * config.n.size();
    report.realizations.resize(total);
    parallel_for(total, config.workers, [&](std::size_t i) {
        const std::uint32_t n = config.n[i / per_n];
        const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(i % per_n);
        report.realizations[i] = run_one(config, n, seed);
    });
    for (std::size_t g = 0; g < config.n.size(); ++g) {
        std::vector<const RealizationResult*> rows;
        for (std::size_t i = 0; i < per_n; ++i) {
            rows.push_back(&report.realizations[g * per_n + i]);
        }
        report.aggregates.push_back(aggregate(config, config.n[g], rows));
    }
    if (!config.out_dir.empty()) {
        write_outputs(report);
    }
    return report;
}

json Report::to_json() const {
    json rows = json::array();
    for (const auto& r : realizations) {
        json moments = json::array();
        for (double m : r.moments) {
            moments.push_back(number_or_null(m));
        }
        json row{{"matrix", to_string(config.matrix)},
                 {"n", r.n},
                 {"d", config.d},
                 {"p", config.p},
                 {"seed", r.seed},
                 {"dim", r.dim},
                 {"moments", moments},
                 {"ks_semicircle", number_or_null(r.ks_semicircle)},
                 {"ks_tensor", number_or_null(r.ks_tensor)},
                 {"c_hat", r.c_hat},
                 {"f_dminus1", r.f_dminus1},
                 {"maximal", r.maximal},
                 {"trace_identities_ok", r.trace_identities_ok}};
        if (!r.moment_stderr.empty()) {
            row["moment_stderr"] = r.moment_stderr;
        }
        rows.push_back(std::move(row));
    }
    json aggs = json::array();
    for (const auto& a : aggregates) {
        aggs.push_back({{"n", a.n},
                        {"realizations", a.count},
                        {"mean_moments", a.mean_moments},
                        {"stderr_moments", a.stderr_moments},
                        {"mean_c_hat", a.mean_c_hat},
                        {"expected_c_hat", a.expected_c_hat},
                        {"c", a.c},
                        {"mean_maximal", a.mean_maximal},
                        {"expected_maximal", a.expected_maximal},
                        {"median_ks_semicircle", number_or_null(a.median_ks_semicircle)},
                        {"median_ks_tensor", number_or_null(a.median_ks_tensor)}});
    }
    return json{{"config", config.to_json()},
                {"aggregate", aggs},
                {"realizations", rows},
                {"note", "moment predictions use the dominant word classes only"}};
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        os << contents;
        os.flush();
        if (!os) {
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " +
                                 ec.message());
    }
}

std::string eigenvalues_csv(const Report& report) {
    std::string out;
    for (const auto& r : report.realizations) {
        for (double l : r.eigenvalues) {
            out += fmt17(l);
            out += '\n';
        }
    }
    return out;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_left,bin_right,count,density\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out += fmt17(h.edges[i]) + "," + fmt17(h.edges[i + 1]) + "," + std::to_string(h.counts[i]) +
               "," + fmt17(h.density(i)) + "\n";
    }
    return out;
}

std::vector<std::pair<double, double>> overlay_curve(const ReferenceLaw& ref, double lo, double hi,
                                                     std::size_t samples) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i <= samples; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples);
        double y = 0.0;
        if (ref.kind() == ReferenceLaw::Kind::semicircle) {
            y = semicircle_density(x);
        } else if (ref.kind() == ReferenceLaw::Kind::tensor) {
            y = ref.c() * semicircle_density(x);
        }
        out.emplace_back(x, y);
    }
    return out;
}

std::string histogram_svg(const Histogram& h, const ReferenceLaw& ref, const std::string& title) {
    constexpr double W = 640, H = 400, ml = 50, mr = 20, mt = 40, mb = 40;
    const double lo = h.edges.front(), hi = h.edges.back();
    double ymax = 0.45;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        ymax = std::max(ymax, h.density(i));
    }
    ymax *= 1.05;
    auto sx = [&](double x) { return ml + (x - lo) / (hi - lo) * (W - ml - mr); };
    auto sy = [&](double y) { return H - mb - y / ymax * (H - mt - mb); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"14\">" << title << "</text>\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double x0 = sx(h.edges[i]), x1 = sx(h.edges[i + 1]);
        const double y = sy(h.density(i));
        os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(x1 - x0)
           << "\" height=\"" << fmt(H - mb - y) << "\" fill=\"#9ecae1\" stroke=\"#3182bd\" "
           << "stroke-width=\"0.5\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
    const auto curve = overlay_curve(ref, lo, hi);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        os << (i ? " " : "") << fmt(sx(curve[i].first)) << ',' << fmt(sy(curve[i].second));
    }
    os << "\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
       << "\" stroke=\"black\"/>\n";
    for (int t = -2; t <= 2; ++t) {
        if (t < lo || t > hi) {
            continue;
        }
        os << "<text x=\"" << fmt(sx(t)) << "\" y=\"" << H - mb + 16
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << t
           << "</text>\n";
    }
    os << "<text x=\"" << W - mr << "\" y=\"" << mt - 4 << "\" text-anchor=\"end\" "
       << "font-family=\"sans-serif\" font-size=\"11\" fill=\"#d62728\">" << ref.name()
       << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

void write_outputs(const Report& report) {
    const auto& config = report.config;
    const std::filesystem::path dir(config.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                                 ec.message());
    }
    if (config.wants("csv")) {
        write_atomic(dir / "eigenvalues.csv", eigenvalues_csv(report));
    }
    if (config.wants("json")) {
        write_atomic(dir / "summary.json", report.to_json().dump(2) + "\n");
    }
    if (config.trace_probes > 0) {
        return;
    }
    std::vector<double> pooled;
    for (const auto& r : report.realizations) {
        pooled.insert(pooled.end(), r.eigenvalues.begin(), r.eigenvalues.end());
    }
    const Histogram h = make_histogram(pooled);
    if (config.wants("csv")) {
        write_atomic(dir / "histogram.csv", histogram_csv(h));
    }
    if (config.wants("svg")) {
        const std::uint32_t n = config.n.back();
        std::string title = to_string(config.matrix) + " n=" + std::to_string(n) +
                            " d=" + std::to_string(config.d) + " p=(";
        for (std::size_t i = 0; i < config.p.size(); ++i) {
            title += (i ? "," : "") + fmt(config.p[i], 4);
        }
        title += "), " + std::to_string(config.realizations) + " realizations";
        write_atomic(dir / "histogram.svg", histogram_svg(h, overlay_law(config, n), title));
    }
}

} // namespace rsc
