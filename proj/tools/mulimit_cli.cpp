// mulimit run|oracle|diagram --config PATH
// Exit codes: 0 success, 1 error, 2 inconclusive verdict under --strict.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mulimit/errors.hpp"
#include "mulimit/experiment.hpp"

using namespace mulimit;

namespace {

ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

int cmd_run(const std::string& path, bool strict, const std::string& out_flag) {
    ExperimentConfig c = load(path);
    if (c.mode == Mode::Oracle) {
        throw std::runtime_error("run: config is in oracle mode, use `oracle`");
    }
    const std::filesystem::path dir = out_flag.empty() ? c.out : out_flag;
    const ExperimentResult r = run_experiment(c);
    write_outputs(r, dir);
    if (c.diagram) {
        for (std::size_t k = 0; k < c.trials; ++k) {
            const auto file = dir / ("diagram_" + std::to_string(k) + ".pgm");
            std::ofstream f(file);
            if (!f) {
                throw std::runtime_error("cannot write " + file.string());
            }
            write_diagram(c, k, f);
        }
    }
    bool inconclusive = false;
    for (const auto& v : r.verdicts) {
        std::cout << r.alphabet.render(v.word) << " " << verdict_name(v.cls) << "\n";
        inconclusive = inconclusive || v.cls == VerdictClass::Inconclusive;
    }
    return strict && inconclusive ? 2 : 0;
}

int cmd_oracle(const std::string& path) {
    const ExperimentConfig c = load(path);
    if (c.mode != Mode::Oracle) {
        throw std::runtime_error("oracle: config must use mode = oracle");
    }
    std::cout << run_oracle(c).line << "\n";
    return 0;
}

int cmd_diagram(const std::string& path, std::size_t trial, const std::string& out_flag) {
    const ExperimentConfig c = load(path);
    if (trial >= c.trials) {
        throw std::runtime_error("diagram: --trial must be below trials");
    }
    const std::filesystem::path dir = out_flag.empty() ? c.out : out_flag;
    std::filesystem::create_directories(dir);
    const auto file = dir / ("diagram_" + std::to_string(trial) + ".pgm");
    std::ofstream f(file);
    if (!f) {
        throw std::runtime_error("cannot write " + file.string());
    }
    write_diagram(c, trial, f);
    std::cout << file.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mu-limit construction experiments"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    bool strict = false;
    std::size_t trial = 0;

    auto* run = app.add_subcommand("run", "run trials, write densities/segments/verdicts CSV");
    run->add_option("--config", config, "config file")->required();
    run->add_flag("--strict", strict, "exit 2 when a verdict is inconclusive");
    run->add_option("--out", out, "output directory (overrides `out`)");

    auto* oracle = app.add_subcommand("oracle", "exact predecessor count of a word");
    oracle->add_option("--config", config, "config file")->required();

    auto* diagram = app.add_subcommand("diagram", "write a P2 graymap of one trial");
    diagram->add_option("--config", config, "config file")->required();
    diagram->add_option("--trial", trial, "trial index")->default_val(0);
    diagram->add_option("--out", out, "output directory (overrides `out`)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            return cmd_run(config, strict, out);
        }
        if (*oracle) {
            return cmd_oracle(config);
        }
        return cmd_diagram(config, trial, out);
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
    } catch (const ValidationError& e) {
        std::cerr << "invalid " << e.what() << "\n";
    } catch (const EnumerationTooLarge& e) {
        std::cerr << "enumeration cap: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return 1;
}
