#include <CLI11.hpp>

#include "bv/cli.hpp"

// bvcli <command> <input> [options]
//
// Commands: analyze, indicatrix, decompose, mollify, helly, essential,
// stieltjes. Inputs are catalog references ("sin", "spikes:c=0.5,K=8"),
// JSON function specs (*.json), or sampled grids (*.csv). Reports go to
// --out as json or csv and are byte-identical across runs.

int main(int argc, char** argv) {
    CLI::App app{"Bounded-variation analysis toolkit"};
    app.require_subcommand(1);

    bv::RunConfig cfg;

    auto add_common = [&cfg](CLI::App* cmd) {
        cmd->add_option("input", cfg.input, "catalog name, spec.json, or grid.csv")->required();
        cmd->add_option("--depth", cfg.depth, "refinement depth / member count / search budget");
        cmd->add_option("--tol", cfg.tol, "classification tolerance");
        cmd->add_option("--bound", cfg.bound, "variation budget before refinement stops");
        cmd->add_option("--h-schedule", cfg.h_schedule, "mean widths, largest first")
            ->delimiter(',');
        cmd->add_option("--grid", cfg.grid, "samples per emitted table");
        cmd->add_option("--out", cfg.out_dir, "directory for report artifacts");
        cmd->add_flag("--require-bv", cfg.require_bv, "exit 2 if the input is not BV");
        cmd->add_option("--format", cfg.format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        return cmd;
    };

    add_common(app.add_subcommand("analyze", "variation report and BV/AC classification"));
    add_common(app.add_subcommand("indicatrix", "level counts and their integrals"));
    add_common(app.add_subcommand("decompose", "jump, singular, and AC parts"));
    add_common(app.add_subcommand("mollify", "variation of integral means as h shrinks"));
    add_common(app.add_subcommand("helly", "select a pointwise-convergent subsequence"));
    add_common(app.add_subcommand("essential", "variation off small exceptional sets"));
    auto* st = add_common(
        app.add_subcommand("stieltjes", "integrate the first input against the second"));
    st->add_option("integrator", cfg.second, "function g supplying dg")->required();

    CLI11_PARSE(app, argc, argv);

    cfg.command = app.get_subcommands().front()->get_name();
    return bv::run_command(cfg);
}
