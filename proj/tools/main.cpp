#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "config.hpp"
#include "tasks.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace cusp::cli;

int run(const std::string& task, const std::string& config_path, const std::string& out_path,
        const std::string& format, int threads, double tol)
{
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "config: cannot open '" << config_path << "'\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    RunConfig cfg;
    try {
        cfg = parse_config(buf.str());
        if (!cfg.task.empty() && cfg.task != task)
            throw ConfigError(0, "config names task '" + cfg.task + "' but the subcommand is '" + task + "'");
        cfg.task = task;
        if (threads > 0) cfg.threads = threads;
        if (tol > 0.0) {
            cfg.policy.tol = tol;
            cfg.policy.validate();
        }
        validate_for_task(cfg);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    Table table;
    try {
        table = run_task(cfg);
    } catch (const cusp::AccuracyError& e) {
        std::cerr << "accuracy: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    json side;
    side["tool"] = "cusp";
    side["version"] = kVersion;
    side["task"] = task;
    side["status"] = table.accuracy_failure ? "accuracy_failure" : "ok";
    side["config"] = to_config_text(cfg);
    side["policy"] = {{"M", cfg.policy.M},
                      {"V", cfg.policy.V},
                      {"N", cfg.policy.N},
                      {"t_max", cfg.policy.t_max},
                      {"tol", cfg.policy.tol}};
    side["columns"] = table.header;
    side["rows"] = table.meta;
    side["extra"] = table.extra;

    const std::string path = out_path.empty() ? task + (format == "json" ? ".json" : ".csv") : out_path;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write '" << path << "'\n";
        return 2;
    }
    if (format == "json") {
        json doc = side;
        doc["data"] = table.rows;
        out << doc.dump(2) << "\n";
    } else {
        out << to_csv(table);
        std::ofstream sc(path + ".json", std::ios::binary);
        sc << side.dump(2) << "\n";
    }
    if (task == "verify")
        for (const auto& r : table.rows) std::cout << r[0] << ": " << r[1] << " (" << r[2] << ")\n";
    std::cout << "wrote " << path << (table.accuracy_failure ? " (accuracy failures flagged)" : "") << "\n";
    return table.accuracy_failure ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Model-cusp spectral toolkit: modes, resolvent kernels, scattering and lattice counting"};
    app.require_subcommand(1);
    std::string config, out, format = "csv";
    int threads = 0;
    double tol = 0.0;
    for (const auto& name : task_names()) {
        auto* sub = app.add_subcommand(name, "run the '" + name + "' task");
        sub->add_option("--config", config, "run configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output path (default <task>.csv)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", threads, "maximum worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--tol", tol, "override the policy tolerance")->check(CLI::Range(0.0, 1.0));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    for (auto* sub : app.get_subcommands()) return run(sub->get_name(), config, out, format, threads, tol);
    return 2;
}
