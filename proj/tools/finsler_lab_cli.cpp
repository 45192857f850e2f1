#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "finsler_lab.h"

namespace {

using json = nlohmann::ordered_json;

struct Options {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::string format;
    std::string out = "-";
    std::string metric;
    std::vector<double> x0, v0, w, span;
    std::optional<int> samples;
    std::vector<std::string> metrics;
};

void add_common(CLI::App* cmd, Options& o, bool inline_fields)
{
    cmd->add_option("--scenario", o.scenario, "scenario document (path, or - for stdin)");
    cmd->add_option("--seed", o.seed, "seed override");
    cmd->add_option("--tol", o.tol, "integrator rtol/atol override");
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out, "output path, - for stdout");
    if (!inline_fields) return;
    cmd->add_option("--metric", o.metric, "catalog id or JSON metric object");
    cmd->add_option("--x0", o.x0)->delimiter(',');
    cmd->add_option("--v0", o.v0)->delimiter(',');
    cmd->add_option("--w", o.w)->delimiter(',');
    cmd->add_option("--span", o.span)->delimiter(',')->expected(2);
    cmd->add_option("--samples", o.samples);
    cmd->add_option("--metrics", o.metrics, "catalog ids for validate")->delimiter(',');
}

std::string read_all(std::istream& in)
{
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int error_exit(const std::string& kind, const std::string& code, const std::string& message)
{
    json e;
    e["error"] = {{"kind", kind}, {"code", code}, {"message", message}};
    std::cerr << e.dump() << "\n";
    return 1;
}

int run(const std::string& task, const Options& o)
{
    json doc = json::object();
    if (!o.scenario.empty()) {
        std::string text;
        if (o.scenario == "-") {
            text = read_all(std::cin);
        } else {
            std::ifstream f(o.scenario);
            if (!f) return error_exit("schema", "schema.io", "cannot read " + o.scenario);
            text = read_all(f);
        }
        try {
            doc = json::parse(text);
        } catch (const json::exception& e) {
            return error_exit("schema", "schema.parse", e.what());
        }
    }
    if (!o.metric.empty()) {
        const auto parsed = json::parse(o.metric, nullptr, false);
        doc["metric"] = parsed.is_discarded() ? json(o.metric) : parsed;
    }
    if (!o.x0.empty()) doc["x0"] = o.x0;
    if (!o.v0.empty()) doc["v0"] = o.v0;
    if (!o.w.empty()) doc["w"] = o.w;
    if (!o.span.empty()) doc["span"] = o.span;
    if (o.samples) doc["samples"] = *o.samples;
    if (!o.metrics.empty()) doc["metrics"] = o.metrics;

    fl_run_options opts{};
    opts.has_seed = o.seed.has_value();
    opts.seed = o.seed.value_or(0);
    opts.has_tol = o.tol.has_value();
    opts.tol = o.tol.value_or(0.0);
    opts.format = o.format.empty() ? nullptr : o.format.c_str();
    opts.task = task.empty() ? nullptr : task.c_str();

    char* output = nullptr;
    char* error = nullptr;
    int code = 0;
    const std::string text = doc.dump();
    const fl_status s = fl_run_scenario(text.c_str(), &opts, &output, &error, &code);
    if (s != FL_OK) {
        json e;
        e["error"] = {{"kind", "internal"}, {"code", fl_status_name(s)}, {"message", fl_last_error()}};
        std::cerr << e.dump() << "\n";
        return 2;
    }
    const std::string out_text = output ? output : "";
    const std::string err_text = error ? error : "";
    fl_string_free(output);
    fl_string_free(error);

    if (!out_text.empty()) {
        if (o.out == "-") {
            std::cout << out_text;
            std::cout.flush();
        } else {
            std::ofstream f(o.out, std::ios::binary);
            if (!f) return error_exit("schema", "schema.io", "cannot write " + o.out);
            f << out_text;
        }
    }
    if (!err_text.empty()) std::cerr << err_text;
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"finsler_lab: numerical Finsler geometry scenarios"};
    app.require_subcommand(1);

    static const std::vector<std::string> tasks{"geodesic", "exp",       "transport", "christoffel",
                                                "flagcurv", "jacobi",    "conjugate", "focal",
                                                "variation", "indexform", "validate"};
    Options options;
    std::string chosen;
    auto* runner = app.add_subcommand("run", "run a scenario document as written");
    add_common(runner, options, false);
    runner->callback([&] { chosen = "run"; });
    for (const auto& t : tasks) {
        auto* cmd = app.add_subcommand(t, "run the " + t + " task");
        add_common(cmd, options, true);
        cmd->callback([&chosen, t] { chosen = t; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    if (chosen == "run" && options.scenario.empty())
        return error_exit("schema", "schema.missing_field", "run requires --scenario");
    return run(chosen == "run" ? std::string() : chosen, options);
}
