#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "relfit/cli.hpp"

namespace {

using relfit::Error;
using relfit::ErrorCode;
namespace cli = relfit::cli;

std::shared_ptr<spdlog::logger> make_logger()
{
    auto logger = spdlog::stderr_color_mt("relfit");
    logger->set_pattern("[relfit] [%l] %v");
    const char* level = std::getenv("RELFIT_LOG");
    logger->set_level(level ? spdlog::level::from_str(level) : spdlog::level::off);
    return logger;
}

cli::Logger forward_to(const std::shared_ptr<spdlog::logger>& logger)
{
    return [logger](cli::LogLevel level, const std::string& msg) {
        switch (level) {
        case cli::LogLevel::debug: logger->debug(msg); break;
        case cli::LogLevel::info: logger->info(msg); break;
        case cli::LogLevel::warn: logger->warn(msg); break;
        }
    };
}

int fail(const Error& e)
{
    const auto report = relfit::doc::make_error(e);
    std::cerr << relfit::emit_json(report);
    return report.error.exit_code;
}

/**
 * A manifest is a JSON array of jobs such as
 *   {"command": "fit", "matrix": "a.csv", "data": "y.csv", "sampling": "poisson"}
 * with paths relative to the manifest. Results are written as one document
 * listing each job's exit code and its output or error document.
 */
int run_batch(const std::string& manifest_path, const std::shared_ptr<spdlog::logger>& logger)
{
    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(relfit::csv::read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, manifest_path + ": " + e.what());
    }
    if (!manifest.is_array())
        throw Error(ErrorCode::ParseError, manifest_path + ": manifest must be a JSON array of jobs");

    auto path_of = [&](const nlohmann::json& entry, const char* key) -> std::string {
        if (!entry.contains(key))
            return {};
        const std::filesystem::path p = entry.at(key).get<std::string>();
        return p.is_absolute() ? p.string() : (base / p).string();
    };

    std::vector<cli::JobSpec> jobs;
    for (std::size_t k = 0; k < manifest.size(); ++k) {
        const auto& entry = manifest[k];
        const auto where = manifest_path + ": job " + std::to_string(k + 1);
        try {
            cli::JobSpec job;
            const auto command = cli::parse_command(entry.at("command").get<std::string>());
            if (!command)
                throw Error(ErrorCode::InvalidConfig, where + ": unknown command");
            job.command = *command;
            job.matrix_path = path_of(entry, "matrix");
            job.data_path = path_of(entry, "data");
            job.reference_path = path_of(entry, "reference");
            job.kernel_path = path_of(entry, "kernel");
            if (entry.contains("sampling")) {
                job.sampling = cli::parse_sampling(entry.at("sampling").get<std::string>());
                if (!job.sampling)
                    throw Error(ErrorCode::InvalidConfig, where + ": unknown sampling");
            }
            job.config.margin_tol = entry.value("tol", job.config.margin_tol);
            job.config.bisection_tol = entry.value("bisection_tol", job.config.bisection_tol);
            job.config.max_inner_iters = entry.value("max_iters", job.config.max_inner_iters);
            jobs.push_back(std::move(job));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, where + ": " + e.what());
        }
    }

    logger->info("running {} jobs", jobs.size());
    const auto results = cli::run_batch(jobs);
    nlohmann::json doc;
    doc["schema"] = relfit::schema_version;
    doc["command"] = "batch";
    doc["jobs"] = nlohmann::json::array();
    int worst = 0;
    for (const auto& r : results) {
        nlohmann::json entry;
        entry["exit_code"] = r.exit_code;
        entry["output"] = r.output.empty() ? nlohmann::json(nullptr) : nlohmann::json::parse(r.output);
        entry["error"] = r.error.empty() ? nlohmann::json(nullptr) : nlohmann::json::parse(r.error);
        doc["jobs"].push_back(std::move(entry));
        worst = std::max(worst, r.exit_code);
    }
    std::cout << doc.dump() << "\n";
    return worst;
}

} // namespace

int main(int argc, char** argv)
{
    auto logger = make_logger();

    CLI::App app{"Fit relational models to contingency tables and inspect their geometry", "relfit"};
    app.set_version_flag("--version", std::string(relfit::schema_version));

    std::string command;
    std::string sampling;
    std::string output = "json";
    std::string manifest;
    cli::JobSpec job;

    app.add_option("command", command,
                   "fit | exists | faces | kernel | divergence | check-variety | batch")
        ->required();
    app.add_option("--matrix", job.matrix_path, "CSV of 0/1 rows, one generating subset per line");
    app.add_option("--data", job.data_path, "CSV of counts (fit, exists) or a distribution");
    app.add_option("--reference", job.reference_path, "second distribution for divergence");
    app.add_option("--kernel", job.kernel_path, "kernel basis rows for check-variety");
    app.add_option("--sampling", sampling, "poisson | multinomial");
    app.add_option("--tol", job.config.margin_tol, "relative margin tolerance")->capture_default_str();
    app.add_option("--bisection-tol", job.config.bisection_tol, "tolerance on the total probability")
        ->capture_default_str();
    app.add_option("--max-iters", job.config.max_inner_iters, "IPF cycles allowed per call")
        ->capture_default_str();
    app.add_option("--max-cells", job.max_cells, "largest table accepted by faces")->capture_default_str();
    app.add_option("--variety-tol", job.variety_tol, "tolerance for check-variety")->capture_default_str();
    app.add_option("--output", output, "json | table")->capture_default_str();
    app.add_option("--manifest", manifest, "JSON job list for batch");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(Error(ErrorCode::InvalidConfig, e.what()));
    }

    try {
        if (output == "json")
            job.output = cli::OutputFormat::json;
        else if (output == "table")
            job.output = cli::OutputFormat::table;
        else
            throw Error(ErrorCode::InvalidConfig, "--output must be json or table");

        if (!sampling.empty()) {
            job.sampling = cli::parse_sampling(sampling);
            if (!job.sampling)
                throw Error(ErrorCode::InvalidConfig, "--sampling must be poisson or multinomial");
        }

        if (command == "batch") {
            if (manifest.empty())
                throw Error(ErrorCode::InvalidConfig, "--manifest is required for batch");
            return run_batch(manifest, logger);
        }
        const auto parsed = cli::parse_command(command);
        if (!parsed)
            throw Error(ErrorCode::InvalidConfig, "unknown command '" + command + "'");
        job.command = *parsed;
        return cli::run(job, std::cout, std::cerr, forward_to(logger));
    } catch (const Error& e) {
        return fail(e);
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"schema", relfit::schema_version},
                                    {"error", {{"code", "Internal"}, {"message", e.what()}, {"exit_code", 1}}}}
                         .dump()
                  << "\n";
        return 1;
    }
}
