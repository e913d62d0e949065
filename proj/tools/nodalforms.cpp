#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nodalforms/cli.hpp"
#include "nodalforms/errors.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Spectra, nodal domains and invariant sets of finite weighted graphs"};
    nodalforms::RunConfig config;
    std::string mode = "spectrum";
    std::string input;
    std::string out = "out";
    unsigned long long seed = 0;

    app.add_option("--mode", mode, "spectrum, nodal, invariance, corpus, search-tight or grid")
        ->check(CLI::IsMember({"spectrum", "nodal", "invariance", "corpus", "search-tight", "grid"}));
    app.add_option("--input", input, "graph or grid JSON; a directory or \"builtin\" for corpus mode");
    app.add_option("--n", config.n_range, "eigenvalue indices: all, 3 or 1..8");
    app.add_option("--tau", config.tau, "sign tolerance relative to max |f|");
    app.add_option("--cluster-tol", config.cluster_tol, "relative eigenvalue gap that separates clusters");
    app.add_option("--alpha", config.alpha, "resolvent parameter for invariance tests");
    app.add_option("--samples", config.samples, "eigenspace samples per degenerate cluster");
    app.add_option("--seed", seed, "random seed, recorded in every report");
    app.add_option("--out", out, "output directory");
    app.add_flag("--render", config.render, "write SVG renderings");
    app.add_flag("--default-measure-one", config.default_measure_one, "use m = 1 where a vertex omits \"m\"");
    app.add_option("--family", config.family, "search-tight family: star, path, cycle or complete");
    app.add_option("--max-size", config.max_size, "search-tight largest vertex count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : nodalforms::kExitFailure;
    }

    config.mode = nodalforms::parse_mode(mode);
    config.input = input;
    config.out = out;
    config.seed = seed;
    if (input.empty() && config.mode != nodalforms::Mode::search_tight && config.mode != nodalforms::Mode::corpus) {
        std::cerr << "error: --input is required for mode " << mode << "\n";
        return nodalforms::kExitFailure;
    }
    return nodalforms::run(config, std::cout, std::cerr);
}
