// End-to-end checks of the command-line binary. Every case shells out to the
// real executable (path injected at compile time) and inspects exit codes,
// record files and CSV output.

#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + SEMIS_CLI_PATH + "\" " + args;
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(bool(in), "cannot open ", path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> non_empty_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(line);
    return out;
}

std::vector<std::string> split_csv_row(const std::string& row) {
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
        const auto comma = row.find(',', start);
        cells.push_back(row.substr(start, comma == std::string::npos ? comma : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path("cli-scratch") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("cli exits cleanly on help and rejects bad usage") {
    CHECK(run_cli("--help > /dev/null") == 0);
    CHECK(run_cli("run --help > /dev/null") == 0);

    CHECK(run_cli("2> /dev/null") == 2);                       // a subcommand is required
    CHECK(run_cli("run --bogus-flag 2> /dev/null") == 2);      // unknown flag
    CHECK(run_cli("run 2> /dev/null") == 2);                   // no example, no --fem
    CHECK(run_cli("run --example banana 2> /dev/null") == 2);  // unknown example
    CHECK(run_cli("run --example eggbox --dim 3 2> /dev/null") == 2);
    CHECK(run_cli("run --example nlg --dim 1 2> /dev/null") == 2);
    CHECK(run_cli("run --example nlg --dim 2 --algorithm mcmc 2> /dev/null") == 2);
    CHECK(run_cli("run --example nlg --dim 2 --p 1.5 2> /dev/null") == 2);
    CHECK(run_cli("run --example nlg --dim 2 --n 1 2> /dev/null") == 2);
    CHECK(run_cli("fem --pattern 7 2> /dev/null") == 2);
    CHECK(run_cli("report 2> /dev/null") == 2);  // record files are required

    // IO failures exit with 3, not 2.
    CHECK(run_cli("run --example nlg --dim 2 --n 50 --out /nonexistent-dir/x.jsonl "
                  "2> /dev/null") == 3);
}

TEST_CASE("a benchmark run writes one parseable record per repetition") {
    const auto dir = scratch("single-run");
    const auto rec_path = (dir / "rec.jsonl").string();
    const auto post_path = (dir / "post.csv").string();

    const int rc = run_cli("run --example nlg --dim 2 --n 200 --seed 7 --out " + rec_path +
                           " --dump-posterior " + post_path);
    REQUIRE(rc == 0);

    const auto lines = non_empty_lines(slurp(rec_path));
    REQUIRE(lines.size() == 1);
    const json r = json::parse(lines[0]);

    CHECK(r["schema"] == "semis/run/v1");
    CHECK(r["algorithm"] == "semis");
    CHECK(r["example"] == "nlg");
    CHECK(r["dim"] == 2);
    CHECK(r["pattern"].is_null());
    CHECK(r["noise_scale"].is_null());
    CHECK(r["rep"] == 0);
    CHECK(r["seed"] == 7);
    CHECK(r["n_per_level"] == 200);
    CHECK(r["p"].get<double>() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(r["max_levels"] == 100);

    REQUIRE(r["ln_z_mis"].is_number());
    CHECK(std::isfinite(r["ln_z_mis"].get<double>()));
    CHECK(r["ln_z_ref"].get<double>() == doctest::Approx(-8.19).epsilon(1e-12));

    CHECK(r["n_cal"].get<long long>() > 0);
    CHECK(r["ess"].get<double>() > 0.0);
    CHECK(r["ess_ratio"].get<double>() ==
          doctest::Approx(r["ess"].get<double>() / r["n_cal"].get<double>()).epsilon(1e-12));

    REQUIRE(r["terminated"].is_boolean());
    if (r["terminated"].get<bool>()) {
        CHECK(r["stop"] == "terminated");
        CHECK(r["ln_z_sis"].is_number());
    }
    CHECK(r["levels_used"].get<int>() >= 2);
    REQUIRE(r["levels"].is_array());
    CHECK(static_cast<int>(r["levels"].size()) == r["levels_used"].get<int>());
    CHECK(r["levels"][0]["index"] == 0);
    CHECK(r["levels"][0]["ln_rho_hat"] == 0.0);

    CHECK(r["wall_time_s"].is_null());  // only written under --timing
    CHECK(r["error"].is_null());

    // The posterior dump matches what the record claims.
    REQUIRE(r["posterior_path"] == post_path);
    const auto csv = non_empty_lines(slurp(post_path));
    REQUIRE(!csv.empty());
    CHECK(csv[0] == "theta_1,theta_2");
    CHECK(static_cast<long long>(csv.size()) - 1 == r["posterior_draws"].get<long long>());
    CHECK(r["posterior_draws"].get<long long>() > 0);
}

TEST_CASE("records and posterior dumps do not depend on worker count") {
    const auto dir = scratch("workers");
    const auto rec1 = (dir / "rec1.jsonl").string();
    const auto rec3 = (dir / "rec3.jsonl").string();
    const auto post = (dir / "post.csv").string();

    REQUIRE(run_cli("run --example nlg --dim 2 --n 150 --seed 11 --workers 1 --out " + rec1 +
                    " --dump-posterior " + post) == 0);
    const std::string post1 = slurp(post);

    REQUIRE(run_cli("run --example nlg --dim 2 --n 150 --seed 11 --workers 3 --out " + rec3 +
                    " --dump-posterior " + post) == 0);

    CHECK(slurp(rec1) == slurp(rec3));
    CHECK(post1 == slurp(post));
}

TEST_CASE("repetitions get consecutive seeds and suffixed dumps") {
    const auto dir = scratch("reps");
    const auto rec_path = (dir / "rec.jsonl").string();
    const auto post_path = (dir / "m.csv").string();

    REQUIRE(run_cli("run --example nlg --dim 2 --n 120 --seed 40 --reps 2 --timing --out " +
                    rec_path + " --dump-posterior " + post_path) == 0);

    const auto lines = non_empty_lines(slurp(rec_path));
    REQUIRE(lines.size() == 2);
    for (int rep = 0; rep < 2; ++rep) {
        const json r = json::parse(lines[static_cast<size_t>(rep)]);
        CHECK(r["rep"] == rep);
        CHECK(r["seed"] == 40 + rep);
        const auto expect = (dir / ("m.rep" + std::to_string(rep) + ".csv")).string();
        CHECK(r["posterior_path"] == expect);
        CHECK(fs::exists(expect));
        REQUIRE(r["wall_time_s"].is_number());
        CHECK(r["wall_time_s"].get<double>() >= 0.0);
    }
}

TEST_CASE("the report command reproduces pinned aggregate statistics") {
    const auto dir = scratch("report");
    const auto rec_path = (dir / "runs.jsonl").string();
    const auto csv_path = (dir / "agg.csv").string();

    // Two successful repetitions at ln z of -8.0 and -8.4 against a reference
    // of -8.19, plus one failed repetition that only the failure counter sees.
    {
        std::ofstream out(rec_path);
        const char* common =
            "\"schema\":\"semis/run/v1\",\"algorithm\":\"semis\",\"example\":\"nlg\","
            "\"dim\":2,\"pattern\":null";
        out << "{" << common
            << ",\"ln_z_mis\":-8.0,\"ln_z_sis\":null,\"ln_z_ref\":-8.19,"
               "\"n_cal\":100,\"ess\":10.0,\"ess_ratio\":0.1,\"posterior_path\":null,"
               "\"error\":null}\n";
        out << "{" << common
            << ",\"ln_z_mis\":-8.4,\"ln_z_sis\":null,\"ln_z_ref\":-8.19,"
               "\"n_cal\":100,\"ess\":10.0,\"ess_ratio\":0.1,\"posterior_path\":null,"
               "\"error\":null}\n";
        out << "{" << common << ",\"error\":\"solver blew up\"}\n";
    }

    REQUIRE(run_cli("report " + rec_path + " --out " + csv_path + " > /dev/null") == 0);

    const auto lines = non_empty_lines(slurp(csv_path));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] ==
          "algorithm,example,dim,pattern,reps,failed,ref_ln_z,mean_ln_z_mis,rel_bias,"
          "cov,mean_ln_z_sis,mean_ess,mean_n_cal,mean_ess_ratio,ks_dim1,ks_dim2,"
          "ks_max_dims3plus");

    const auto cells = split_csv_row(lines[1]);
    REQUIRE(cells.size() == 17);
    CHECK(cells[0] == "semis");
    CHECK(cells[1] == "nlg");
    CHECK(cells[2] == "2");
    CHECK(cells[3] == "");  // no damage pattern for a benchmark
    CHECK(cells[4] == "2");
    CHECK(cells[5] == "1");
    CHECK(std::stod(cells[6]) == doctest::Approx(-8.19).epsilon(1e-15));
    CHECK(std::stod(cells[7]) == doctest::Approx(-8.2).epsilon(1e-15));
    CHECK(std::stod(cells[8]) == doctest::Approx(0.001221001221001195).epsilon(1e-12));
    CHECK(std::stod(cells[9]) == doctest::Approx(0.034493013716416952).epsilon(1e-12));
    CHECK(cells[10] == "");  // no importance-path estimate in the synthetic records
    CHECK(std::stod(cells[11]) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(std::stod(cells[12]) == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(std::stod(cells[13]) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(cells[14] == "");
    CHECK(cells[15] == "");
    CHECK(cells[16] == "");
}

TEST_CASE("the report command rejects unreadable or malformed records") {
    const auto dir = scratch("report-errors");

    CHECK(run_cli("report " + (dir / "missing.jsonl").string() + " 2> /dev/null") == 3);

    const auto bad_schema = dir / "schema.jsonl";
    std::ofstream(bad_schema) << "{\"schema\":\"other/v0\"}\n";
    CHECK(run_cli("report " + bad_schema.string() + " 2> /dev/null") == 3);

    const auto not_json = dir / "text.jsonl";
    std::ofstream(not_json) << "this is not a record\n";
    CHECK(run_cli("report " + not_json.string() + " 2> /dev/null") == 3);

    const auto empty = dir / "empty.jsonl";
    std::ofstream(empty) << "";
    CHECK(run_cli("report " + empty.string() + " 2> /dev/null") == 3);
}

TEST_CASE("the shear-building demo writes a per-story damage table") {
    const auto dir = scratch("fem");
    const auto damage_path = (dir / "damage.csv").string();
    const auto rec_path = (dir / "fem.jsonl").string();

    REQUIRE(run_cli("fem --pattern 1 --n 150 --seed 3 --out " + damage_path + " --records " +
                    rec_path) == 0);

    const auto csv = non_empty_lines(slurp(damage_path));
    REQUIRE(csv.size() == 5);  // header plus one row per story
    CHECK(csv[0] == "story,k_mean,k_std,m_mean,m_std,k_change");
    for (int i = 1; i <= 4; ++i) {
        const auto cells = split_csv_row(csv[static_cast<size_t>(i)]);
        REQUIRE(cells.size() == 6);
        CHECK(std::stoi(cells[0]) == i);
        const double k_mean = std::stod(cells[1]);
        const double k_std = std::stod(cells[2]);
        const double m_mean = std::stod(cells[3]);
        const double k_change = std::stod(cells[5]);
        CHECK(k_mean > 0.0);
        CHECK(k_mean < 1.5);
        CHECK(k_std >= 0.0);
        CHECK(m_mean > 0.9);
        CHECK(m_mean < 1.1);
        // Against the default intact baseline the change is just 1 - mean.
        CHECK(k_change == doctest::Approx(1.0 - k_mean).epsilon(1e-12));
    }

    const auto lines = non_empty_lines(slurp(rec_path));
    REQUIRE(lines.size() == 1);
    const json r = json::parse(lines[0]);
    CHECK(r["example"] == "fem");
    CHECK(r["dim"] == 8);
    CHECK(r["pattern"] == 1);
    CHECK(r["noise_scale"].get<double>() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r["ln_z_ref"].is_null());
    CHECK(r["error"].is_null());
}

TEST_CASE("config files fill in unset flags and explicit flags win") {
    const auto dir = scratch("config");
    const auto cfg_path = (dir / "cfg.json").string();
    const auto rec_path = (dir / "rec.jsonl").string();

    std::ofstream(cfg_path) << "{\"example\":\"nlg\",\"dim\":2,\"n\":80,\"seed\":5,\"p\":0.2}";

    REQUIRE(run_cli("run --config " + cfg_path + " --seed 6 --out " + rec_path) == 0);
    const auto lines = non_empty_lines(slurp(rec_path));
    REQUIRE(lines.size() == 1);
    const json r = json::parse(lines[0]);
    CHECK(r["example"] == "nlg");
    CHECK(r["dim"] == 2);
    CHECK(r["n_per_level"] == 80);
    CHECK(r["p"].get<double>() == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(r["seed"] == 6);  // the flag beats the config file

    CHECK(run_cli("run --config " + (dir / "missing.json").string() + " 2> /dev/null") == 3);
}
