#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../tests/support/acceptance.hpp"
#include "fraclab/commands.hpp"
#include "fraclab/config.hpp"
#include "fraclab/errors.hpp"

namespace fs = std::filesystem;

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<int> only;
};

int run_subcommand(const std::string& name, const Flags& flags) {
    fraclab::RunConfig config = fraclab::load_config(flags.config);
    if (flags.seed) config.mc.walk.seed = *flags.seed;
    const fs::path out = flags.out.empty() ? fs::path(config.output_dir) : fs::path(flags.out);
    const fraclab::RunSummary summary = fraclab::run_command(name, config, out);
    for (const auto& v : summary.verdicts)
        std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.name << ": " << v.detail << "\n";
    for (const auto& a : summary.artifacts) std::cout << "wrote " << a.string() << "\n";
    return fraclab::kExitSuccess;
}

int run_accept(const Flags& flags) {
    acceptance::Options options;
    options.config_dir = flags.config;
    options.out = flags.out.empty() ? fs::path("acceptance_out") : fs::path(flags.out);
    options.seed = flags.seed;
    options.only = flags.only;
    const auto results = acceptance::run(options, [](const acceptance::CriterionResult& r) {
        std::cout << acceptance::format_line(r) << std::endl;
    });
    std::size_t passed = 0;
    for (const auto& r : results) passed += r.pass ? 1 : 0;
    std::cout << passed << "/" << results.size() << " criteria passed; verdicts in "
              << (options.out / "acceptance.json").string() << "\n";
    return passed == results.size() ? fraclab::kExitSuccess : fraclab::kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semilinear singular problems for the fractional Laplacian on an interval"};
    app.require_subcommand(1);

    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"solve", "Solve the singular problem on one grid"},
        {"bracket", "Solve the c1 and c2 power problems around a general nonlinearity"},
        {"capacity", "Point capacity under grid refinement"},
        {"stability", "Stability and vanishing experiments"},
        {"mc-verify", "Monte Carlo cross-check of a deterministic solution"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "INI configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "Output directory (default: [output] dir)");
        sub->add_option("--seed", flags.seed, "Monte Carlo seed, overrides [mc] seed");
    }
    auto* accept = app.add_subcommand("accept", "Run the acceptance suite");
    accept->add_option("--config", flags.config, "Directory holding accept.ini and reference configs")
        ->required()
        ->check(CLI::ExistingDirectory);
    accept->add_option("--out", flags.out, "Output directory (default: acceptance_out)");
    accept->add_option("--seed", flags.seed, "Seed, overrides [mc] seed of accept.ini");
    accept->add_option("--only", flags.only, "Run only these criterion ids")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fraclab::kExitConfig;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return name == "accept" ? run_accept(flags) : run_subcommand(name, flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fraclab::exit_code_for(e);
    }
}
