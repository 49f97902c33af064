// Command-line front end: evidence runs on the analytic benchmarks, aggregate
// reporting, and the shear-building model-updating demo.
//
// Run records go out as JSON Lines, one object per repetition with a fixed
// field order and floats at 17 significant digits, so a fixed config yields
// byte-identical output no matter how many workers execute it. Wall time is
// only written under --timing for the same reason. Aggregates are CSV.

#include "semis/benchmarks.hpp"
#include "semis/estimators.hpp"
#include "semis/fem.hpp"
#include "semis/semis.hpp"
#include "semis/sus.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
    return out;
}

// Builds one record with the fields in insertion order.
class JsonLine {
   public:
    void field(const char* k, const std::string& v) { put(k, json_escape(v)); }
    void field(const char* k, const char* v) { put(k, json_escape(v)); }
    void field(const char* k, double v) { put(k, fmt_double(v)); }
    void field(const char* k, std::int64_t v) { put(k, std::to_string(v)); }
    void field(const char* k, int v) { put(k, std::to_string(v)); }
    void field(const char* k, std::uint64_t v) { put(k, std::to_string(v)); }
    void field(const char* k, bool v) { put(k, v ? "true" : "false"); }
    void field_null(const char* k) { put(k, "null"); }
    void field_raw(const char* k, const std::string& raw) { put(k, raw); }

    std::string close() { return s_ + "}"; }

   private:
    void put(const char* k, const std::string& v) {
        s_ += first_ ? "{\"" : ",\"";
        first_ = false;
        s_ += k;
        s_ += "\":";
        s_ += v;
    }

    std::string s_;
    bool first_ = true;
};

std::string levels_json(const semis::Schedule& s) {
    std::string a = "[";
    bool first = true;
    for (const auto& lv : s.levels()) {
        if (!first) a += ",";
        first = false;
        JsonLine j;
        j.field("index", lv.index);
        j.field("r", lv.r);
        j.field("ln_r", lv.ln_r);
        j.field("ln_threshold", lv.ln_threshold);
        j.field("mean_beta", lv.mean_beta);
        j.field("ln_rho_hat", lv.ln_rho_hat);
        j.field("n", static_cast<std::int64_t>(lv.n_samples));
        a += j.close();
    }
    return a + "]";
}

std::string levels_json(const semis::SusTrace& t) {
    std::string a = "[";
    bool first = true;
    for (const auto& lv : t.levels) {
        if (!first) a += ",";
        first = false;
        JsonLine j;
        j.field("index", lv.index);
        j.field("ln_l", lv.ln_l);
        j.field("ln_phi_hat", lv.ln_phi_hat);
        j.field("n", static_cast<std::int64_t>(lv.n_samples));
        a += j.close();
    }
    return a + "]";
}

std::string with_rep_suffix(const std::string& path, int rep, int reps) {
    if (reps <= 1) return path;
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + ".rep" + std::to_string(rep);
    return path.substr(0, dot) + ".rep" + std::to_string(rep) + path.substr(dot);
}

void write_posterior_csv(const std::string& path, const Eigen::MatrixXd& draws) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (Eigen::Index d = 0; d < draws.rows(); ++d)
        out << (d ? "," : "") << "theta_" << (d + 1);
    out << "\n";
    for (Eigen::Index k = 0; k < draws.cols(); ++k) {
        for (Eigen::Index d = 0; d < draws.rows(); ++d)
            out << (d ? "," : "") << fmt_double(draws(d, k));
        out << "\n";
    }
}

// Per-story posterior statistics of the structural parameters. Stiffness
// change is reported against a baseline multiplier (1.0, i.e. the intact
// structure, unless a previous damage CSV supplies its posterior means).
void write_damage_csv(std::ostream& out, const Eigen::MatrixXd& draws,
                      const std::vector<double>& baseline_k) {
    const Eigen::Index n = draws.rows() / 2;
    const Eigen::Index m = draws.cols();
    out << "story,k_mean,k_std,m_mean,m_std,k_change\n";
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto stat = [&](Eigen::Index row) {
            const double mean = draws.row(row).mean();
            double var = 0.0;
            if (m > 1) var = (draws.row(row).array() - mean).square().sum() / double(m - 1);
            return std::pair<double, double>(mean, std::sqrt(var));
        };
        const auto [km, ks] = stat(i);
        const auto [mm, ms] = stat(n + i);
        const double base = baseline_k[static_cast<size_t>(i)];
        const double change = 1.0 - km / base;
        out << (i + 1) << "," << fmt_double(km) << "," << fmt_double(ks) << ","
            << fmt_double(mm) << "," << fmt_double(ms) << "," << fmt_double(change) << "\n";
    }
}

std::vector<double> load_baseline_k(const std::string& path, Eigen::Index n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open baseline " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> k;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error("malformed baseline row in " + path);
        k.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    }
    if (static_cast<Eigen::Index>(k.size()) != n)
        throw std::runtime_error("baseline has " + std::to_string(k.size()) +
                                 " stories, expected " + std::to_string(n));
    return k;
}

struct RunOptions {
    std::string example;
    long long dim = 2;
    std::string algorithm = "semis";
    long long n = 0;  // 0: per-algorithm default (1000 semis, 500 sus)
    double p = 0.1;
    long long reps = 1;
    std::uint64_t seed = 0;
    long long max_levels = 100;
    long long workers = 1;
    std::string out;
    std::string dump_posterior;
    bool timing = false;

    bool fem = false;
    long long pattern = 1;
    double noise_scale = 1.0;
    std::string damage_csv;
    std::string baseline;
};

struct RepResult {
    double ln_z_mis = 0.0;
    std::optional<double> ln_z_sis;
    std::int64_t n_cal = 0;
    double ess = 0.0;
    int levels_used = 0;
    bool terminated = false;
    std::string stop;
    std::string levels;
    Eigen::MatrixXd draws;
};

RepResult execute_rep(const semis::TargetModel& model, const RunOptions& o,
                      std::uint64_t rep_seed) {
    RepResult r;
    if (o.algorithm == "semis") {
        semis::SemisConfig c;
        c.n_per_level = o.n;
        c.p = o.p;
        c.max_levels = static_cast<int>(o.max_levels);
        c.seed = rep_seed;
        c.workers = static_cast<int>(o.workers);
        auto res = semis::run_semis(model, c);
        r.ln_z_mis = res.ln_z_mis;
        r.ln_z_sis = res.ln_z_sis;
        r.n_cal = res.n_cal;
        r.ess = res.ess;
        r.levels_used = res.levels_used;
        r.terminated = res.terminated;
        r.stop = res.terminated ? "terminated" : "max_levels";
        r.levels = levels_json(res.trace.schedule);
        r.draws = std::move(res.draws);
    } else {
        semis::SusConfig c;
        c.n_per_level = o.n;
        c.p_c = o.p;
        c.max_levels = static_cast<int>(o.max_levels);
        c.seed = rep_seed;
        c.workers = static_cast<int>(o.workers);
        auto res = semis::run_sus(model, c);
        r.ln_z_mis = res.ln_z;
        r.n_cal = res.n_cal;
        r.ess = res.ess;
        r.levels_used = res.levels_used;
        r.terminated = res.trace.stop == semis::SusStop::contribution;
        r.stop = semis::to_string(res.trace.stop);
        r.levels = levels_json(res.trace);
        r.draws = std::move(res.draws);
    }
    return r;
}

int cmd_run(RunOptions o, bool damage_to_stdout) {
    if (o.algorithm != "semis" && o.algorithm != "sus") {
        std::cerr << "error: --algorithm must be semis or sus\n";
        return 2;
    }
    if (o.n == 0) o.n = (o.algorithm == "semis") ? 1000 : 500;
    if (o.n < 2 || o.p <= 0.0 || o.p >= 1.0 || o.reps < 1 || o.max_levels < 1 ||
        o.workers < 1) {
        std::cerr << "error: invalid run parameters (n >= 2, 0 < p < 1, reps >= 1, "
                     "max-levels >= 1, workers >= 1)\n";
        return 2;
    }

    semis::ExampleId id{};
    std::optional<double> ref;
    if (o.fem) {
        if (o.pattern < 0 || o.pattern > 2) {
            std::cerr << "error: --pattern must be 0, 1 or 2\n";
            return 2;
        }
        if (o.noise_scale < 0.0) {
            std::cerr << "error: --noise-scale must be >= 0\n";
            return 2;
        }
    } else {
        if (o.example.empty()) {
            std::cerr << "error: --example is required (or pass --fem)\n";
            return 2;
        }
        try {
            id = semis::example_from_string(o.example);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        if (id == semis::ExampleId::eggbox && o.dim != 2) {
            std::cerr << "error: eggbox is only defined for --dim 2\n";
            return 2;
        }
        const Eigen::Index min_dim = (id == semis::ExampleId::nlg) ? 2 : 1;
        if (o.dim < min_dim) {
            std::cerr << "error: --dim too small for " << o.example << "\n";
            return 2;
        }
        ref = semis::reference_log_evidence(id, o.dim);
    }

    std::ofstream fout;
    std::ostream* rec = &std::cout;
    if (!o.out.empty()) {
        fout.open(o.out, std::ios::binary);
        if (!fout) {
            std::cerr << "error: cannot write " << o.out << "\n";
            return 3;
        }
        rec = &fout;
    }

    int failures = 0;
    for (long long rep = 0; rep < o.reps; ++rep) {
        const std::uint64_t rep_seed = o.seed + static_cast<std::uint64_t>(rep);

        std::unique_ptr<semis::TargetModel> model;
        std::string example_label;
        long long dim = o.dim;
        if (o.fem) {
            semis::RngStream noise(rep_seed, 0, 0, semis::SubStream::noise);
            const auto c = semis::make_case(static_cast<int>(o.pattern), o.noise_scale, noise);
            model = semis::make_fem_model(c);
            example_label = "fem";
            dim = 2 * c.building.n_stories();
        } else {
            model = semis::make_benchmark(id, o.dim);
            example_label = semis::to_string(id);
        }

        JsonLine j;
        j.field("schema", "semis/run/v1");
        j.field("algorithm", o.algorithm);
        j.field("example", example_label);
        j.field("dim", static_cast<std::int64_t>(dim));
        if (o.fem)
            j.field("pattern", static_cast<std::int64_t>(o.pattern));
        else
            j.field_null("pattern");
        if (o.fem)
            j.field("noise_scale", o.noise_scale);
        else
            j.field_null("noise_scale");
        j.field("rep", static_cast<std::int64_t>(rep));
        j.field("seed", rep_seed);
        j.field("n_per_level", static_cast<std::int64_t>(o.n));
        j.field("p", o.p);
        j.field("max_levels", static_cast<std::int64_t>(o.max_levels));

        const auto t0 = std::chrono::steady_clock::now();
        try {
            const RepResult r = execute_rep(*model, o, rep_seed);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

            std::string post_path;
            if (!o.dump_posterior.empty()) {
                post_path = with_rep_suffix(o.dump_posterior, static_cast<int>(rep),
                                            static_cast<int>(o.reps));
                write_posterior_csv(post_path, r.draws);
            }

            if (o.fem) {
                std::vector<double> base(static_cast<size_t>(dim / 2), 1.0);
                if (!o.baseline.empty()) base = load_baseline_k(o.baseline, dim / 2);
                if (damage_to_stdout && o.damage_csv.empty()) {
                    write_damage_csv(std::cout, r.draws, base);
                } else {
                    std::string path = o.damage_csv.empty()
                                           ? "fem-damage-pattern" + std::to_string(o.pattern) + ".csv"
                                           : o.damage_csv;
                    path = with_rep_suffix(path, static_cast<int>(rep), static_cast<int>(o.reps));
                    std::ofstream dmg(path, std::ios::binary);
                    if (!dmg) throw std::runtime_error("cannot write " + path);
                    write_damage_csv(dmg, r.draws, base);
                }
            }

            j.field("ln_z_mis", r.ln_z_mis);
            if (r.ln_z_sis)
                j.field("ln_z_sis", *r.ln_z_sis);
            else
                j.field_null("ln_z_sis");
            if (ref)
                j.field("ln_z_ref", *ref);
            else
                j.field_null("ln_z_ref");
            j.field("n_cal", r.n_cal);
            j.field("ess", r.ess);
            j.field("ess_ratio", r.n_cal > 0 ? r.ess / double(r.n_cal) : 0.0);
            j.field("levels_used", r.levels_used);
            j.field("terminated", r.terminated);
            j.field("stop", r.stop);
            j.field("posterior_draws", static_cast<std::int64_t>(r.draws.cols()));
            if (post_path.empty())
                j.field_null("posterior_path");
            else
                j.field("posterior_path", post_path);
            j.field_raw("levels", r.levels);
            if (o.timing)
                j.field("wall_time_s", secs);
            else
                j.field_null("wall_time_s");
            j.field_null("error");
        } catch (const std::exception& e) {
            ++failures;
            for (const char* k : {"ln_z_mis", "ln_z_sis", "ln_z_ref", "n_cal", "ess",
                                  "ess_ratio", "levels_used", "terminated", "stop",
                                  "posterior_draws", "posterior_path", "levels", "wall_time_s"})
                j.field_null(k);
            j.field("error", std::string(e.what()));
        }
        *rec << j.close() << "\n";
    }
    rec->flush();
    return failures ? 3 : 0;
}

// --- report ---------------------------------------------------------------

double json_num(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw std::runtime_error("expected a number, got " + v.dump());
}

struct GroupKey {
    std::string algorithm, example;
    long long dim = 0, pattern = -1;
    bool operator<(const GroupKey& o) const {
        return std::tie(algorithm, example, dim, pattern) <
               std::tie(o.algorithm, o.example, o.dim, o.pattern);
    }
};

struct GroupAgg {
    int n_ok = 0, n_fail = 0;
    std::vector<double> lnz_mis, lnz_sis, ess, n_cal, ess_ratio;
    std::optional<double> ref;
    std::vector<double> ks1, ks2, ks_rest;  // posterior K-S, when dumps exist
};

double vec_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

double vec_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = vec_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size() - 1));
}

std::vector<std::vector<double>> load_csv_columns(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open posterior dump " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> cols;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        size_t start = 0, idx = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const auto len = comma == std::string::npos ? std::string::npos : comma - start;
            if (idx >= cols.size()) cols.resize(idx + 1);
            cols[idx].push_back(std::stod(line.substr(start, len)));
            ++idx;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    return cols;
}

int cmd_report(const std::vector<std::string>& files, const std::string& out_csv) {
    std::map<GroupKey, GroupAgg> groups;

    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) {
            std::cerr << "error: cannot open " << file << "\n";
            return 3;
        }
        std::string line;
        long long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            json r;
            try {
                r = json::parse(line);
            } catch (const std::exception& e) {
                std::cerr << "error: " << file << ":" << lineno << ": not JSON: " << e.what()
                          << "\n";
                return 3;
            }
            if (!r.contains("schema") || r["schema"] != "semis/run/v1") {
                std::cerr << "error: " << file << ":" << lineno
                          << ": unsupported record schema "
                          << (r.contains("schema") ? r["schema"].dump() : "(missing)") << "\n";
                return 3;
            }
            GroupKey key;
            key.algorithm = r["algorithm"].get<std::string>();
            key.example = r["example"].get<std::string>();
            key.dim = r["dim"].get<long long>();
            if (r.contains("pattern") && !r["pattern"].is_null())
                key.pattern = r["pattern"].get<long long>();
            auto& g = groups[key];

            if (!r["error"].is_null()) {
                ++g.n_fail;
                continue;
            }
            ++g.n_ok;
            g.lnz_mis.push_back(json_num(r["ln_z_mis"]));
            if (!r["ln_z_sis"].is_null()) g.lnz_sis.push_back(json_num(r["ln_z_sis"]));
            if (!r["ln_z_ref"].is_null()) g.ref = json_num(r["ln_z_ref"]);
            g.ess.push_back(json_num(r["ess"]));
            g.n_cal.push_back(json_num(r["n_cal"]));
            g.ess_ratio.push_back(json_num(r["ess_ratio"]));

            if (key.example == "nlg" && !r["posterior_path"].is_null()) {
                const auto cols = load_csv_columns(r["posterior_path"].get<std::string>());
                if (static_cast<long long>(cols.size()) != key.dim)
                    throw std::runtime_error("posterior dump width does not match dim");
                std::vector<double> ks(cols.size());
                for (size_t d = 0; d < cols.size(); ++d)
                    ks[d] = semis::ks_statistic(cols[d], [&](double x) {
                        return semis::nlg_marginal_cdf(static_cast<Eigen::Index>(d), key.dim, x);
                    });
                g.ks1.push_back(ks[0]);
                if (ks.size() > 1) g.ks2.push_back(ks[1]);
                if (ks.size() > 2)
                    g.ks_rest.push_back(*std::max_element(ks.begin() + 2, ks.end()));
            }
        }
    }

    if (groups.empty()) {
        std::cerr << "error: no records found\n";
        return 3;
    }

    std::ostringstream csv;
    csv << "algorithm,example,dim,pattern,reps,failed,ref_ln_z,mean_ln_z_mis,rel_bias,"
           "cov,mean_ln_z_sis,mean_ess,mean_n_cal,mean_ess_ratio,ks_dim1,ks_dim2,ks_max_dims3plus\n";

    std::printf("%-6s %-8s %5s %4s %6s %12s %12s %10s %10s %10s\n", "algo", "example", "dim",
                "pat", "reps", "mean ln z", "ref ln z", "bias", "cov", "ESS/Ncal");
    for (const auto& [key, g] : groups) {
        const double mean_mis = g.lnz_mis.empty() ? std::nan("") : vec_mean(g.lnz_mis);
        const double cov = g.lnz_mis.size() >= 2 && mean_mis != 0.0
                               ? vec_std(g.lnz_mis) / std::fabs(mean_mis)
                               : std::nan("");
        const double bias = g.ref && !g.lnz_mis.empty() ? mean_mis / *g.ref - 1.0 : std::nan("");
        const double ratio = g.ess_ratio.empty() ? std::nan("") : vec_mean(g.ess_ratio);

        csv << key.algorithm << "," << key.example << "," << key.dim << ","
            << (key.pattern >= 0 ? std::to_string(key.pattern) : "") << "," << g.n_ok << ","
            << g.n_fail << ",";
        const auto opt_fmt = [&](double v) { return std::isnan(v) ? std::string() : fmt_double(v); };
        csv << (g.ref ? fmt_double(*g.ref) : "") << "," << opt_fmt(mean_mis) << ","
            << opt_fmt(bias) << "," << opt_fmt(cov) << ","
            << (g.lnz_sis.empty() ? "" : fmt_double(vec_mean(g.lnz_sis))) << ","
            << (g.ess.empty() ? "" : fmt_double(vec_mean(g.ess))) << ","
            << (g.n_cal.empty() ? "" : fmt_double(vec_mean(g.n_cal))) << "," << opt_fmt(ratio)
            << "," << (g.ks1.empty() ? "" : fmt_double(vec_mean(g.ks1))) << ","
            << (g.ks2.empty() ? "" : fmt_double(vec_mean(g.ks2))) << ","
            << (g.ks_rest.empty() ? "" : fmt_double(vec_mean(g.ks_rest))) << "\n";

        std::printf("%-6s %-8s %5lld %4s %6d %12.5f %12s %10s %10s %10s\n",
                    key.algorithm.c_str(), key.example.c_str(), key.dim,
                    key.pattern >= 0 ? std::to_string(key.pattern).c_str() : "-", g.n_ok,
                    mean_mis, g.ref ? (std::to_string(*g.ref)).c_str() : "-",
                    std::isnan(bias) ? "-" : (std::to_string(bias)).c_str(),
                    std::isnan(cov) ? "-" : (std::to_string(cov)).c_str(),
                    std::isnan(ratio) ? "-" : (std::to_string(ratio)).c_str());
        if (!g.ks1.empty()) {
            std::printf("       posterior K-S: dim1 %.4f", vec_mean(g.ks1));
            if (!g.ks2.empty()) std::printf("  dim2 %.4f", vec_mean(g.ks2));
            if (!g.ks_rest.empty()) std::printf("  max(dims 3+) %.4f", vec_mean(g.ks_rest));
            std::printf("\n");
        }
    }

    if (!out_csv.empty()) {
        std::ofstream out(out_csv, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << out_csv << "\n";
            return 3;
        }
        out << csv.str();
    }
    return 0;
}

// --- option plumbing --------------------------------------------------------

void merge_config(const CLI::App* cmd, const std::string& config_path, RunOptions& o) {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config " + config_path);
    json cfg = json::parse(in);

    const auto unset = [&](const std::string& flag) {
        const auto* opt = cmd->get_option_no_throw("--" + flag);
        return opt == nullptr || opt->count() == 0;
    };
    const auto take = [&](const char* key, auto& var) {
        std::string flag = key;
        for (auto& ch : flag)
            if (ch == '_') ch = '-';
        if (cfg.contains(key) && unset(flag)) var = cfg[key].get<std::decay_t<decltype(var)>>();
    };
    take("example", o.example);
    take("dim", o.dim);
    take("algorithm", o.algorithm);
    take("n", o.n);
    take("p", o.p);
    take("reps", o.reps);
    take("seed", o.seed);
    take("max_levels", o.max_levels);
    take("workers", o.workers);
    take("out", o.out);
    take("dump_posterior", o.dump_posterior);
    take("timing", o.timing);
    take("fem", o.fem);
    take("pattern", o.pattern);
    take("noise_scale", o.noise_scale);
    take("damage_csv", o.damage_csv);
    take("baseline", o.baseline);
}

void add_common_flags(CLI::App* cmd, RunOptions& o, std::string& config_path) {
    cmd->add_option("--n", o.n, "samples per level (default 1000 semis, 500 sus)");
    cmd->add_option("--p", o.p, "target acceptance (semis) / level probability (sus)");
    cmd->add_option("--reps", o.reps, "number of repetitions");
    cmd->add_option("--seed", o.seed, "base seed; repetition k runs at seed+k");
    cmd->add_option("--max-levels", o.max_levels, "proposal-ladder budget");
    cmd->add_option("--workers", o.workers, "worker threads (does not change results)");
    cmd->add_option("--dump-posterior", o.dump_posterior, "write posterior draws CSV here");
    cmd->add_flag("--timing", o.timing, "include wall_time_s in records");
    cmd->add_option("--config", config_path, "JSON config; explicit flags win");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evidence estimation by sequential multiple importance sampling"};
    app.require_subcommand(1);

    RunOptions ro;
    std::string run_config;
    auto* run = app.add_subcommand("run", "run repetitions on a benchmark (or --fem)");
    run->add_option("--example", ro.example, "eggbox | shells | nlg");
    run->add_option("--dim", ro.dim, "parameter dimension");
    run->add_option("--algorithm", ro.algorithm, "semis | sus");
    run->add_flag("--fem", ro.fem, "run the shear-building demo instead of a benchmark");
    run->add_option("--pattern", ro.pattern, "damage pattern 0|1|2 (with --fem)");
    run->add_option("--noise-scale", ro.noise_scale, "data noise covariance scale (with --fem)");
    run->add_option("--damage-csv", ro.damage_csv, "damage report path (with --fem)");
    run->add_option("--baseline", ro.baseline, "damage CSV of an intact-case run to diff against");
    run->add_option("--out", ro.out, "records file (JSON Lines); default stdout");
    add_common_flags(run, ro, run_config);

    RunOptions fo;
    fo.algorithm = "semis";
    std::string fem_config;
    auto* fem = app.add_subcommand("fem", "shear-building model updating; damage report CSV");
    fem->add_option("--pattern", fo.pattern, "damage pattern 0|1|2");
    fem->add_option("--noise-scale", fo.noise_scale, "data noise covariance scale");
    fem->add_option("--algorithm", fo.algorithm, "semis | sus");
    fem->add_option("--out", fo.damage_csv, "damage report path; default stdout");
    fem->add_option("--records", fo.out, "also write run records (JSON Lines) here");
    fem->add_option("--baseline", fo.baseline, "damage CSV of an intact-case run to diff against");
    add_common_flags(fem, fo, fem_config);

    std::vector<std::string> report_files;
    std::string report_out;
    auto* rep = app.add_subcommand("report", "aggregate run records into a table and CSV");
    rep->add_option("files", report_files, "record files (JSON Lines)")->required();
    rep->add_option("--out", report_out, "aggregate CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            merge_config(run, run_config, ro);
            return cmd_run(ro, false);
        }
        if (fem->parsed()) {
            merge_config(fem, fem_config, fo);
            fo.fem = true;
            // records are opt-in here; damage CSV goes to stdout unless --out
            if (fo.out.empty()) {
                RunOptions q = fo;
                q.out = "/dev/null";
                return cmd_run(q, true);
            }
            return cmd_run(fo, true);
        }
        if (rep->parsed()) return cmd_report(report_files, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
