#include "rmtt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

namespace rmtt {

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::vector<std::string> words(const std::string& s) {
    std::vector<std::string> out;
    std::string w;
    std::string spaced = s;
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    std::istringstream is(spaced);
    while (is >> w) out.push_back(w);
    return out;
}

void mean_var(const std::vector<double>& v, double& mean, double& var) {
    mean = var = 0.0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size() - 1);
}

CellKey baseline_of(const CellKey& k) { return CellKey{k.n, Strategy::None, k.fusion}; }

const TrialLog* find_log(const std::vector<TrialOutcome>& outcomes, std::uint64_t seed) {
    for (const auto& o : outcomes)
        if (o.seed == seed && o.log) return &*o.log;
    return nullptr;
}

/// Parsed CSV with a header row.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name, const std::string& file) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw SchemaError(file + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    }
};

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path.string() + ": cannot open");
    Table t;
    std::string line;
    if (!std::getline(in, line) || trim(line).empty()) throw SchemaError(path.string() + ": empty file");
    t.header = split(trim(line), ',');
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto row = split(trim(line), ',');
        if (row.size() != t.header.size())
            throw SchemaError(path.string() + ": row has " + std::to_string(row.size()) + " fields, header has " +
                              std::to_string(t.header.size()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

double parse_double(const std::string& s, const std::string& column, const std::string& file) {
    if (s == "nan") return std::nan("");
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw SchemaError(file + ": column '" + column + "' holds a non-numeric value '" + s + "'");
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string CellKey::label() const {
    return "n" + std::to_string(n) + "_" + std::string(to_string(strategy)) + "_" + std::string(to_string(fusion));
}

void ExperimentMatrix::validate() const {
    if (team_sizes.empty()) throw ConfigError("team_sizes must not be empty");
    if (strategies.empty()) throw ConfigError("strategies must not be empty");
    if (trials_per_cell < 1) throw ConfigError("trials must be >= 1");
    for (int n : team_sizes)
        if (n < 1) throw ConfigError("team sizes must be >= 1");
    ScenarioConfig probe = scenario;
    for (int n : team_sizes) {
        probe.n = n;
        probe.validate();
    }
}

ExperimentMatrix parse_experiment_config(std::istream& in) {
    ExperimentMatrix m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "team_sizes") {
                m.team_sizes.clear();
                for (const auto& w : words(value)) m.team_sizes.push_back(std::stoi(w));
            } else if (key == "strategies") {
                m.strategies.clear();
                for (const auto& w : words(value)) m.strategies.push_back(strategy_from_string(w));
            } else if (key == "trials") {
                m.trials_per_cell = std::stoi(value);
            } else if (key == "base_seed") {
                m.base_seed = std::stoull(value);
            } else if (!apply_scenario_key(m.scenario, key, value)) {
                throw ConfigError("unknown key '" + key + "'");
            }
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        } catch (const std::exception& e) {
            throw ConfigError(where + "invalid value for '" + key + "': " + value);
        }
    }
    m.validate();
    return m;
}

ExperimentMatrix load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_experiment_config(in);
}

const CellSummary* MatrixReport::summary(const CellKey& key) const {
    for (const auto& s : summaries)
        if (s.key == key) return &s;
    return nullptr;
}

std::vector<CellKey> matrix_cells(const ExperimentMatrix& matrix) {
    std::set<CellKey> cells;
    for (int n : matrix.team_sizes) {
        for (Strategy s : matrix.strategies) {
            const FusionRule rule = fusion_rule_for(s, matrix.scenario.fusion);
            cells.insert(CellKey{n, s, rule});
            cells.insert(CellKey{n, Strategy::None, rule});
        }
    }
    return {cells.begin(), cells.end()};
}

double sign_test_p(int positive, int trials) {
    if (trials <= 0) return 1.0;
    double p = 0.0;
    for (int k = positive; k <= trials; ++k)
        p += std::exp(std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0) - trials * std::log(2.0));
    return std::min(1.0, p);
}

MatrixReport run_matrix(const ExperimentMatrix& matrix, int workers, const std::optional<std::filesystem::path>& out_dir) {
    matrix.validate();
    MatrixReport report;
    report.cells = matrix_cells(matrix);

    struct Job {
        CellKey key;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& key : report.cells)
        for (int t = 0; t < matrix.trials_per_cell; ++t) jobs.push_back({key, matrix.base_seed + static_cast<std::uint64_t>(t)});
    std::vector<TrialOutcome> results(jobs.size());

    if (out_dir) std::filesystem::create_directories(*out_dir / "trials");
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            ScenarioConfig cfg = matrix.scenario;
            cfg.n = jobs[j].key.n;
            cfg.strategy = jobs[j].key.strategy;
            cfg.fusion = jobs[j].key.fusion;
            cfg.seed = jobs[j].seed;
            TrialOutcome& out = results[j];
            out.seed = cfg.seed;
            try {
                out.log = run_trial(cfg);
                if (out_dir) {
                    const std::string stem = jobs[j].key.label() + "_seed" + std::to_string(cfg.seed);
                    std::ofstream csv(*out_dir / "trials" / (stem + ".csv"));
                    write_trial_csv(*out.log, csv);
                    std::ofstream js(*out_dir / "trials" / (stem + ".events.json"));
                    write_event_json(*out.log, js);
                }
            } catch (const std::exception& e) {
                out.log.reset();
                out.error = e.what();
            }
        }
    };
    const int pool = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
    std::vector<std::thread> threads;
    for (int w = 1; w < pool; ++w) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();

    for (std::size_t j = 0; j < jobs.size(); ++j) report.outcomes[jobs[j].key].push_back(std::move(results[j]));

    for (const auto& key : report.cells) {
        const auto& outs = report.outcomes[key];
        const auto& base = report.outcomes[baseline_of(key)];
        CellSummary s;
        s.key = key;
        s.trials = static_cast<int>(outs.size());
        std::vector<double> ospa, nm, dens, d_ospa, d_nmse;
        for (const auto& o : outs) {
            if (!o.log) {
                ++s.failures;
                report.any_failure = true;
                continue;
            }
            ospa.push_back(o.log->mean_ospa());
            const double e = o.log->cardinality_nmse();
            if (std::isfinite(e)) nm.push_back(e);
            dens.push_back(o.log->final_edge_density());
            if (const TrialLog* b = find_log(base, o.seed)) {
                d_ospa.push_back(b->mean_ospa() - o.log->mean_ospa());
                const double be = b->cardinality_nmse();
                if (std::isfinite(be) && std::isfinite(e)) d_nmse.push_back(be - e);
            }
        }
        if (s.failures == s.trials) report.any_cell_failed = true;
        mean_var(ospa, s.ospa_mean, s.ospa_var);
        mean_var(nm, s.nmse_mean, s.nmse_var);
        double unused = 0.0;
        mean_var(dens, s.edge_density_mean, unused);
        mean_var(d_ospa, s.ospa_diff_mean, unused);
        mean_var(d_nmse, s.nmse_diff_mean, unused);
        s.pairs = static_cast<int>(d_ospa.size());
        for (double d : d_ospa) s.ospa_diff_positive += d > 0.0, s.ospa_diff_negative += d < 0.0;
        for (double d : d_nmse) s.nmse_diff_positive += d > 0.0, s.nmse_diff_negative += d < 0.0;
        s.ospa_sign_p = sign_test_p(s.ospa_diff_positive, s.ospa_diff_positive + s.ospa_diff_negative);
        s.nmse_sign_p = sign_test_p(s.nmse_diff_positive, s.nmse_diff_positive + s.nmse_diff_negative);
        report.summaries.push_back(s);

        // Per-epoch pairing against the baseline, binned by edge density.
        struct Acc {
            int epochs = 0;
            double ospa = 0.0, ospa_diff = 0.0, sq_diff = 0.0, truth_sq = 0.0;
        };
        std::map<int, Acc> bins;
        for (const auto& o : outs) {
            if (!o.log) continue;
            const TrialLog* b = find_log(base, o.seed);
            if (!b) continue;
            const std::size_t len = std::min(b->epochs.size(), o.log->epochs.size());
            for (std::size_t e = 0; e < len; ++e) {
                const EpochRecord& r = o.log->epochs[e];
                const EpochRecord& rb = b->epochs[e];
                const int bin = std::min(9, static_cast<int>(std::floor(r.edge_density * 10.0 + 1e-9)));
                Acc& a = bins[bin];
                ++a.epochs;
                a.ospa += r.ospa_team;
                a.ospa_diff += rb.ospa_team - r.ospa_team;
                const double eb = rb.est_cardinality - rb.true_cardinality;
                const double es = r.est_cardinality - r.true_cardinality;
                a.sq_diff += eb * eb - es * es;
                a.truth_sq += static_cast<double>(r.true_cardinality) * r.true_cardinality;
            }
        }
        for (const auto& [bin, a] : bins) {
            DensityBin d;
            d.key = key;
            d.bin_low = bin / 10.0;
            d.epochs = a.epochs;
            d.ospa_mean = a.ospa / a.epochs;
            d.ospa_diff = a.ospa_diff / a.epochs;
            d.nmse_diff = a.truth_sq > 0.0 ? a.sq_diff / a.truth_sq : 0.0;
            report.density.push_back(d);
        }
    }

    for (int n : matrix.team_sizes) {
        double max_o = 0.0, max_n = 0.0;
        for (const auto& s : report.summaries)
            if (s.key.n == n) {
                max_o = std::max(max_o, std::abs(s.ospa_diff_mean));
                max_n = std::max(max_n, std::abs(s.nmse_diff_mean));
            }
        for (auto& s : report.summaries)
            if (s.key.n == n) {
                s.ospa_diff_norm = max_o > 0.0 ? s.ospa_diff_mean / max_o : 0.0;
                s.nmse_diff_norm = max_n > 0.0 ? s.nmse_diff_mean / max_n : 0.0;
            }
    }
    return report;
}

void write_aggregate_csv(const MatrixReport& report, std::ostream& out) {
    out << "n,strategy,fusion,trials,failures,ospa_mean,ospa_var,nmse_mean,nmse_var,edge_density_mean,pairs,"
           "ospa_diff_mean,nmse_diff_mean,ospa_diff_positive,nmse_diff_positive,ospa_diff_negative,nmse_diff_negative,"
           "ospa_sign_p,nmse_sign_p,ospa_diff_norm,nmse_diff_norm\n";
    for (const auto& s : report.summaries) {
        out << s.key.n << ',' << to_string(s.key.strategy) << ',' << to_string(s.key.fusion) << ',' << s.trials << ','
            << s.failures << ',' << fmt(s.ospa_mean) << ',' << fmt(s.ospa_var) << ',' << fmt(s.nmse_mean) << ','
            << fmt(s.nmse_var) << ',' << fmt(s.edge_density_mean) << ',' << s.pairs << ',' << fmt(s.ospa_diff_mean) << ','
            << fmt(s.nmse_diff_mean) << ',' << s.ospa_diff_positive << ',' << s.nmse_diff_positive << ','
            << s.ospa_diff_negative << ',' << s.nmse_diff_negative << ',' << fmt(s.ospa_sign_p) << ','
            << fmt(s.nmse_sign_p) << ',' << fmt(s.ospa_diff_norm) << ',' << fmt(s.nmse_diff_norm) << '\n';
    }
}

void write_density_csv(const MatrixReport& report, std::ostream& out) {
    out << "n,strategy,fusion,density_bin,epochs,ospa_mean,ospa_diff,nmse_diff\n";
    for (const auto& d : report.density)
        out << d.key.n << ',' << to_string(d.key.strategy) << ',' << to_string(d.key.fusion) << ',' << fmt(d.bin_low)
            << ',' << d.epochs << ',' << fmt(d.ospa_mean) << ',' << fmt(d.ospa_diff) << ',' << fmt(d.nmse_diff) << '\n';
}

void write_summary(const MatrixReport& report, std::ostream& out) {
    out << std::left << std::setw(22) << "cell" << std::right << std::setw(8) << "trials" << std::setw(8) << "failed"
        << std::setw(11) << "ospa" << std::setw(11) << "nmse" << std::setw(9) << "density" << std::setw(12)
        << "d_ospa" << std::setw(12) << "d_nmse" << '\n';
    for (const auto& s : report.summaries) {
        out << std::left << std::setw(22) << s.key.label() << std::right << std::setw(8) << s.trials << std::setw(8)
            << s.failures << std::setw(11) << fmt(s.ospa_mean).substr(0, 9) << std::setw(11)
            << fmt(s.nmse_mean).substr(0, 9) << std::setw(9) << fmt(s.edge_density_mean).substr(0, 7) << std::setw(12)
            << fmt(s.ospa_diff_mean).substr(0, 10) << std::setw(12) << fmt(s.nmse_diff_mean).substr(0, 10) << '\n';
    }
    for (const auto& [key, outs] : report.outcomes)
        for (const auto& o : outs)
            if (!o.log) out << "failed: " << key.label() << " seed " << o.seed << ": " << o.error << '\n';
}

void write_report(const MatrixReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream agg(out_dir / "aggregate.csv");
    write_aggregate_csv(report, agg);
    std::ofstream den(out_dir / "density.csv");
    write_density_csv(report, den);
}

std::string render_svg(const std::string& title, const std::string& y_label, const std::vector<Series>& series) {
    constexpr double W = 640, H = 400, L = 70, R = 170, T = 40, B = 50;
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    double scale = 0.0;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points)
            if (std::isfinite(y)) scale = std::max(scale, std::abs(y));
    if (scale == 0.0) scale = 1.0;
    auto px = [&](double x) { return L + x * (W - L - R); };
    auto py = [&](double y) { return T + (1.0 - (y / scale + 1.0) / 2.0) * (H - T - B); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
       << xml_escape(title) << "</text>\n";
    os << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(0)
       << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 10; t += 2) {
        const double x = t / 10.0;
        os << "<text x=\"" << fmt(px(x)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << t * 10 << "%</text>\n";
    }
    for (int t = -2; t <= 2; ++t) {
        const double y = t / 2.0;
        os << "<text x=\"" << L - 8 << "\" y=\"" << fmt(py(y * scale) + 4) << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << fmt(y) << "</text>\n";
    }
    os << "<text x=\"" << fmt(px(0.5)) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">edge density</text>\n";
    os << "<text x=\"16\" y=\"" << fmt((T + H - B) / 2) << "\" transform=\"rotate(-90 16 " << fmt((T + H - B) / 2)
       << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(y_label) << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* colour = palette[i % 10];
        std::ostringstream pts;
        for (const auto& [x, y] : series[i].points)
            if (std::isfinite(y)) pts << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
        os << "<polyline class=\"series\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\""
           << trim(pts.str()) << "\"/>\n";
        for (const auto& [x, y] : series[i].points)
            if (std::isfinite(y))
                os << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
        const double ly = T + 14 + 18.0 * static_cast<double>(i);
        os << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 32 << "\" y2=\"" << ly
           << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - R + 38 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
           << xml_escape(series[i].name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::vector<std::filesystem::path> plot_report(const std::filesystem::path& in_dir, const std::filesystem::path& out_dir) {
    const auto agg_path = in_dir / "aggregate.csv";
    const auto den_path = in_dir / "density.csv";
    const Table agg = read_table(agg_path);
    for (const char* c : {"n", "strategy", "fusion", "ospa_diff_norm", "nmse_diff_norm"}) agg.column(c, agg_path.string());
    if (agg.rows.empty()) throw SchemaError(agg_path.string() + ": no rows");
    const Table den = read_table(den_path);
    const std::string dfile = den_path.string();
    const auto cn = den.column("n", dfile), cs = den.column("strategy", dfile), cf = den.column("fusion", dfile),
               cb = den.column("density_bin", dfile), co = den.column("ospa_diff", dfile), cm = den.column("nmse_diff", dfile);

    std::map<std::string, Series> ospa_series, nmse_series;
    std::vector<std::string> order;
    for (const auto& row : agg.rows) order.push_back("n=" + row[agg.column("n", "")] + " " + row[agg.column("strategy", "")] + "/" + row[agg.column("fusion", "")]);
    for (const auto& name : order) {
        ospa_series[name].name = name;
        nmse_series[name].name = name;
    }
    for (const auto& row : den.rows) {
        const std::string name = "n=" + row[cn] + " " + row[cs] + "/" + row[cf];
        const double x = parse_double(row[cb], "density_bin", dfile) + 0.05;
        if (!ospa_series.count(name)) {
            order.push_back(name);
            ospa_series[name].name = nmse_series[name].name = name;
        }
        ospa_series[name].points.emplace_back(x, parse_double(row[co], "ospa_diff", dfile));
        nmse_series[name].points.emplace_back(x, parse_double(row[cm], "nmse_diff", dfile));
    }
    std::vector<Series> o, m;
    for (const auto& name : order) {
        o.push_back(ospa_series[name]);
        m.push_back(nmse_series[name]);
    }
    std::filesystem::create_directories(out_dir);
    const std::vector<std::filesystem::path> paths{out_dir / "ospa_vs_density.svg", out_dir / "nmse_vs_density.svg"};
    std::ofstream(paths[0]) << render_svg("OSPA difference (baseline - strategy)", "normalised difference", o);
    std::ofstream(paths[1]) << render_svg("NMSE difference (baseline - strategy)", "normalised difference", m);
    return paths;
}

}  // namespace rmtt
