#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cdslab/error.hpp"
#include "cdslab/suites.hpp"

namespace {

using cdslab::SuiteConfig;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Options {
    SuiteConfig suite;
    std::string out;
    std::string format = "json";
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

// Values in the file replace whatever the flags set.
void apply_config(const std::string& path, Options& o) {
    std::ifstream in(path);
    if (!in) throw UsageError(path + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw UsageError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError(path + ":1:1: config must be a JSON object");
    auto field = [&](const std::string& key, const char* what) -> const nlohmann::json& {
        const auto& v = j.at(key);
        const bool ok = std::string(what) == "string" ? v.is_string() : v.is_number_integer();
        if (!ok) throw UsageError(path + ": field '" + key + "' must be " + (std::string(what) == "string" ? "a string" : "an integer"));
        return v;
    };
    for (const auto& [key, value] : j.items()) {
        if (key == "suite") {
            o.suite.suite = field(key, "string").get<std::string>();
        } else if (key == "n") {
            o.suite.n = field(key, "int").get<int>();
        } else if (key == "k") {
            o.suite.k = field(key, "int").get<int>();
        } else if (key == "reps") {
            o.suite.reps = field(key, "int").get<int>();
        } else if (key == "seed") {
            if (!value.is_number_unsigned()) throw UsageError(path + ": field 'seed' must be a non-negative integer");
            o.suite.seed = value.get<cdslab::u64>();
        } else if (key == "workers") {
            o.suite.workers = field(key, "int").get<int>();
        } else if (key == "protocol") {
            o.suite.protocol = field(key, "string").get<std::string>();
        } else if (key == "out") {
            o.out = field(key, "string").get<std::string>();
        } else if (key == "format") {
            o.format = field(key, "string").get<std::string>();
        } else {
            throw UsageError(path + ": unknown field '" + key + "'");
        }
    }
}

void validate(const Options& o) {
    const auto names = cdslab::suite_names();
    if (o.suite.suite.empty()) throw UsageError("no suite given (--suite)");
    if (std::find(names.begin(), names.end(), o.suite.suite) == names.end()) {
        throw UsageError("unknown suite '" + o.suite.suite + "'");
    }
    if (o.format != "json" && o.format != "csv") throw UsageError("format must be json or csv");
    if (o.suite.workers < 1) throw UsageError("workers must be at least 1");
    for (const auto& [name, v] : {std::pair{"n", o.suite.n}, {"k", o.suite.k}, {"reps", o.suite.reps}}) {
        if (v && *v < 1) throw UsageError(std::string(name) + " must be positive");
    }
}

// Written next to the target and renamed, so a failed run leaves no partial file.
void write_atomically(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        if (!f.flush()) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    std::string config_path;
    bool list = false;
    int n = 0, k = 0, reps = 0;

    CLI::App app{"Exact verification suites for CDS, CDQS and PSM protocols"};
    app.add_option("--suite", o.suite.suite, "Suite to run (see --list)");
    auto* n_opt = app.add_option("--n", n, "Input size; default is the suite's sweep");
    auto* k_opt = app.add_option("--k", k, "Secret copies (two-prover) or digits (one-way)");
    auto* reps_opt = app.add_option("--reps", reps, "Shots (forrelation), instances (bhm, qtools) or samples");
    app.add_option("--seed", o.suite.seed, "Root seed");
    app.add_option("--out", o.out, "Output file; stdout when omitted");
    app.add_option("--format", o.format, "json or csv");
    app.add_option("--workers", o.suite.workers, "Worker threads");
    app.add_option("--protocol", o.suite.protocol, "Only protocols whose name contains this");
    app.add_option("--config", config_path, "JSON config; its fields override flags");
    app.add_flag("--list", list, "List suites and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }
    if (list) {
        for (const auto& s : cdslab::suite_names()) std::cout << s << "\n";
        return kExitPass;
    }
    if (*n_opt) o.suite.n = n;
    if (*k_opt) o.suite.k = k;
    if (*reps_opt) o.suite.reps = reps;

    try {
        if (!config_path.empty()) apply_config(config_path, o);
        validate(o);
    } catch (const UsageError& e) {
        std::cerr << "cdslab: " << e.what() << "\n";
        return kExitUsage;
    }

    cdslab::SuiteOutput result;
    try {
        result = cdslab::run_suite(o.suite);
    } catch (const cdslab::DomainError& e) {
        std::cerr << "cdslab: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cdslab::BudgetError& e) {
        std::cerr << "cdslab: " << e.what() << "\n";
        return kExitUsage;
    }

    const std::string text = o.format == "json" ? cdslab::format_json(result) : cdslab::format_csv(result);
    try {
        if (o.out.empty()) {
            std::cout << text;
        } else {
            write_atomically(o.out, text);
        }
    } catch (const std::exception& e) {
        std::cerr << "cdslab: " << e.what() << "\n";
        return kExitFail;
    }

    std::size_t passed = 0;
    for (const auto& c : result.checks) {
        if (c.passed) {
            ++passed;
        } else {
            std::cerr << "FAIL " << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
        }
    }
    std::cerr << o.suite.suite << ": " << passed << "/" << result.checks.size() << " checks passed\n";
    return result.passed() ? kExitPass : kExitFail;
}
