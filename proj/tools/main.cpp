#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "config.hpp"
#include "optokerr/error.hpp"
#include "output.hpp"
#include "parallel.hpp"
#include "workflows.hpp"

namespace {

enum Exit { ok = 0, config_error = 1, numerical_failure = 2 };

}  // namespace

int main(int argc, char** argv) {
    using namespace okerr;
    using namespace okerr::app;

    CLI::App cli{"Kerr / cross-Kerr optomechanics toolkit"};
    cli.set_version_flag("--version", tool_version);
    cli.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<int> threads;
    for (Workflow w : {Workflow::verify_averaging, Workflow::dynamics, Workflow::steady_sweep, Workflow::cat}) {
        CLI::App* sub = cli.add_subcommand(to_string(w));
        sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--threads", threads, "worker threads (overrides OPTOKERR_THREADS)");
    }
    cli.get_subcommand("verify-averaging")->description("derive the averaged Hamiltonian and check it");
    cli.get_subcommand("dynamics")->description("full vs averaged unitary dynamics, or the master equation");
    cli.get_subcommand("steady-sweep")->description("mean-field branch sweeps over drive or detuning");
    cli.get_subcommand("cat")->description("Kerr cats, revivals and coherence times");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? Exit::ok : Exit::config_error;
    }

    Workflow workflow = Workflow::verify_averaging;
    for (Workflow w : {Workflow::verify_averaging, Workflow::dynamics, Workflow::steady_sweep, Workflow::cat}) {
        if (cli.got_subcommand(to_string(w))) {
            workflow = w;
        }
    }

    RunConfig rc;
    int n_threads = 1;
    try {
        rc = config_path.empty() ? parse_config(nlohmann::json::object()) : load_config(config_path);
        if (rc.workflow && *rc.workflow != workflow) {
            throw InputError(std::string("config: workflow is \"") + to_string(*rc.workflow) +
                             "\" but the subcommand is \"" + to_string(workflow) + "\"");
        }
        n_threads = resolve_threads(threads);
        if (rc.physical && !rc.physical->valid_averaging(rc.averaging_threshold)) {
            std::cerr << "warning: couplings are not small against the mechanical frequency "
                         "(threshold " << rc.averaging_threshold << "); averaged results are outside their validity range\n";
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::config_error;
    }

    try {
        const OutputSet out = run_workflow(workflow, rc, n_threads);
        write_outputs(out_dir, to_string(workflow), canonical_text(rc.document), out);
        std::cout << out.summary;
        return Exit::ok;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::config_error;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        try {
            write_diagnostic(out_dir, to_string(workflow), e.what());
        } catch (const std::exception& w) {
            std::cerr << "could not write diagnostic: " << w.what() << '\n';
        }
        return Exit::numerical_failure;
    }
}
